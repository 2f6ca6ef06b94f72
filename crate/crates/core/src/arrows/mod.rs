//! Arrow diagrams and w-Jacobi diagrams on line, circle and strand
//! skeletons: enumeration, canonical forms, the 6T/TC/4T/RI/FI relations,
//! graded quotient dimensions, coproduct and primitives, bracket-rise
//! elimination of internal vertices, wheels, and Lie-algebra weight systems.

mod jacobi;
mod relations;
mod weights;
mod wheels;

pub use jacobi::{
    d_a_element, wheel_element, wheel_jacobi, ElimOrder, EndKind, JVertex, JacobiDiagram,
};
pub use relations::{
    coproduct, enumerate_diagrams, graded_dimension, primitive_dimension, relation_vectors,
    QuotientSpace,
};
pub use weights::{weight_system, weight_system_arrow, LieAlgebraData, UIgElement};
pub use wheels::{
    sw_monomials, wheel_monomial_vector, wheels_coordinates, WheelMonomial, WheelsPolynomial,
};

use crate::linalg::{fmt_rat, parse_rat, Rat};
use num_traits::Zero;
use std::collections::BTreeMap;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ArrowError {
    #[error("degree {degree} exceeds the enumeration cap {cap} for this space")]
    CapExceeded { degree: usize, cap: usize },
    #[error("skeletons differ")]
    SkeletonMismatch,
    #[error("malformed w-Jacobi diagram: {reason}")]
    MalformedJacobi { reason: String },
    #[error("element is not in the span of the quotient basis (relation generation bug?)")]
    NotInSpan,
    #[error("cannot parse diagram token '{token}'")]
    BadToken { token: String },
    #[error(transparent)]
    Linalg(#[from] crate::linalg::LinalgError),
}

/// The skeleta arrow diagrams live on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Skeleton {
    LongLine,
    Circle,
    Strands(usize),
}

/// The six graded spaces: v = mod 6T; w = mod TC + 4T; the s-variants add
/// RI, the r-variants add FI.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SpaceKind {
    V,
    Sv,
    Rv,
    W,
    Sw,
    Rw,
}

impl SpaceKind {
    pub fn is_w(self) -> bool {
        matches!(self, SpaceKind::W | SpaceKind::Sw | SpaceKind::Rw)
    }

    pub fn has_ri(self) -> bool {
        matches!(self, SpaceKind::Sv | SpaceKind::Sw)
    }

    pub fn has_fi(self) -> bool {
        matches!(self, SpaceKind::Rv | SpaceKind::Rw)
    }

    pub fn parse(s: &str) -> Option<SpaceKind> {
        match s {
            "v" => Some(SpaceKind::V),
            "sv" => Some(SpaceKind::Sv),
            "rv" => Some(SpaceKind::Rv),
            "w" => Some(SpaceKind::W),
            "sw" => Some(SpaceKind::Sw),
            "rw" => Some(SpaceKind::Rw),
            _ => None,
        }
    }
}

impl fmt::Display for SpaceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            SpaceKind::V => "v",
            SpaceKind::Sv => "sv",
            SpaceKind::Rv => "rv",
            SpaceKind::W => "w",
            SpaceKind::Sw => "sw",
            SpaceKind::Rw => "rw",
        };
        write!(f, "{s}")
    }
}

/// Per-space enumeration caps; relation generation refuses degrees above
/// them (ambient diagram counts grow like (2m)!/m!).
#[derive(Debug, Clone, Copy)]
pub struct EnumerationCaps {
    pub v_max: usize,
    pub w_max: usize,
    pub strands_max: usize,
}

impl Default for EnumerationCaps {
    fn default() -> Self {
        EnumerationCaps {
            v_max: 5,
            w_max: 6,
            strands_max: 6,
        }
    }
}

impl EnumerationCaps {
    pub fn cap_for(&self, skeleton: Skeleton, space: SpaceKind) -> usize {
        match skeleton {
            Skeleton::Strands(_) => self.strands_max,
            _ => {
                if space.is_w() {
                    self.w_max
                } else {
                    self.v_max
                }
            }
        }
    }

    pub fn check(
        &self,
        skeleton: Skeleton,
        space: SpaceKind,
        degree: usize,
    ) -> Result<(), ArrowError> {
        let cap = self.cap_for(skeleton, space);
        if degree > cap {
            return Err(ArrowError::CapExceeded { degree, cap });
        }
        Ok(())
    }
}

/// One arrow endpoint on a line or circle skeleton.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct End {
    pub arrow: u8,
    pub head: bool,
}

/// A canonical arrow diagram. Line/circle diagrams are endpoint sequences
/// (arrows renumbered in first-endpoint order; circle sequences stored as
/// the minimal rotation). Strand diagrams are words of arrows (tail strand,
/// head strand) with disjoint adjacent letters sorted ascending.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ArrowDiagram {
    Line(Vec<End>),
    Circle(Vec<End>),
    Strands { n: u8, word: Vec<(u8, u8)> },
}

impl ArrowDiagram {
    pub fn empty(skeleton: Skeleton) -> Self {
        match skeleton {
            Skeleton::LongLine => ArrowDiagram::Line(vec![]),
            Skeleton::Circle => ArrowDiagram::Circle(vec![]),
            Skeleton::Strands(n) => ArrowDiagram::Strands {
                n: n as u8,
                word: vec![],
            },
        }
    }

    pub fn skeleton(&self) -> Skeleton {
        match self {
            ArrowDiagram::Line(_) => Skeleton::LongLine,
            ArrowDiagram::Circle(_) => Skeleton::Circle,
            ArrowDiagram::Strands { n, .. } => Skeleton::Strands(*n as usize),
        }
    }

    pub fn degree(&self) -> usize {
        match self {
            ArrowDiagram::Line(e) | ArrowDiagram::Circle(e) => e.len() / 2,
            ArrowDiagram::Strands { word, .. } => word.len(),
        }
    }

    /// Canonical line diagram from an arbitrary end list.
    pub fn line_from_ends(ends: &[End]) -> Self {
        ArrowDiagram::Line(renumber(ends))
    }

    /// Canonical circle diagram: minimal renumbered rotation.
    pub fn circle_from_ends(ends: &[End]) -> Self {
        if ends.is_empty() {
            return ArrowDiagram::Circle(vec![]);
        }
        let mut best: Option<Vec<End>> = None;
        let mut cur = ends.to_vec();
        for _ in 0..ends.len() {
            let cand = renumber(&cur);
            if best.as_ref().map(|b| cand < *b).unwrap_or(true) {
                best = Some(cand);
            }
            cur.rotate_left(1);
        }
        ArrowDiagram::Circle(best.unwrap_or_default())
    }

    /// Closes a line diagram into a circle diagram.
    pub fn close(&self) -> Self {
        match self {
            ArrowDiagram::Line(e) => ArrowDiagram::circle_from_ends(e),
            other => other.clone(),
        }
    }

    /// Canonical strand monomial: bubble-sort adjacent letters acting on
    /// disjoint strand pairs into ascending order.
    pub fn strands_from_word(n: u8, word: &[(u8, u8)]) -> Self {
        let mut w = word.to_vec();
        loop {
            let mut changed = false;
            for i in 0..w.len().saturating_sub(1) {
                let (a, b) = (w[i], w[i + 1]);
                let disjoint = a.0 != b.0 && a.0 != b.1 && a.1 != b.0 && a.1 != b.1;
                if disjoint && b < a {
                    w.swap(i, i + 1);
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        ArrowDiagram::Strands { n, word: w }
    }

    pub fn ends(&self) -> Option<&[End]> {
        match self {
            ArrowDiagram::Line(e) | ArrowDiagram::Circle(e) => Some(e),
            _ => None,
        }
    }

    /// Sub-diagram spanned by the arrow ids selected by `keep` (line/circle).
    pub fn restrict(&self, keep: &dyn Fn(u8) -> bool) -> Self {
        match self {
            ArrowDiagram::Line(e) => {
                let sub: Vec<End> = e.iter().copied().filter(|x| keep(x.arrow)).collect();
                ArrowDiagram::line_from_ends(&sub)
            }
            ArrowDiagram::Circle(e) => {
                let sub: Vec<End> = e.iter().copied().filter(|x| keep(x.arrow)).collect();
                ArrowDiagram::circle_from_ends(&sub)
            }
            ArrowDiagram::Strands { n, word } => ArrowDiagram::Strands {
                n: *n,
                word: word.clone(),
            },
        }
    }

    /// Parses a line diagram from token strings `H<k>` / `T<k>`.
    pub fn parse_line(text: &str) -> Result<Self, ArrowError> {
        let mut ends = Vec::new();
        for tok in text.split_whitespace() {
            if tok.len() < 2 || !tok.is_ascii() {
                return Err(ArrowError::BadToken { token: tok.into() });
            }
            let (head, rest) = match tok.split_at(1) {
                ("H", r) => (true, r),
                ("T", r) => (false, r),
                _ => {
                    return Err(ArrowError::BadToken { token: tok.into() });
                }
            };
            let id: u8 = rest
                .parse()
                .map_err(|_| ArrowError::BadToken { token: tok.into() })?;
            if id == 0 {
                return Err(ArrowError::BadToken { token: tok.into() });
            }
            ends.push(End {
                arrow: id - 1,
                head,
            });
        }
        let mut seen: BTreeMap<u8, Vec<bool>> = BTreeMap::new();
        for e in &ends {
            seen.entry(e.arrow).or_default().push(e.head);
        }
        for (id, roles) in &seen {
            if roles.len() != 2 || roles[0] == roles[1] {
                return Err(ArrowError::BadToken {
                    token: format!("arrow {}", id + 1),
                });
            }
        }
        Ok(ArrowDiagram::line_from_ends(&ends))
    }
}

fn renumber(ends: &[End]) -> Vec<End> {
    let mut map: BTreeMap<u8, u8> = BTreeMap::new();
    let mut out = Vec::with_capacity(ends.len());
    for e in ends {
        let next = map.len() as u8;
        let id = *map.entry(e.arrow).or_insert(next);
        out.push(End {
            arrow: id,
            head: e.head,
        });
    }
    out
}

impl fmt::Display for ArrowDiagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ArrowDiagram::Line(e) | ArrowDiagram::Circle(e) => {
                if e.is_empty() {
                    return write!(f, "1");
                }
                let mut first = true;
                for x in e {
                    if !first {
                        write!(f, " ")?;
                    }
                    first = false;
                    write!(f, "{}{}", if x.head { 'H' } else { 'T' }, x.arrow + 1)?;
                }
                Ok(())
            }
            ArrowDiagram::Strands { word, .. } => {
                if word.is_empty() {
                    return write!(f, "1");
                }
                let mut first = true;
                for (t, h) in word {
                    if !first {
                        write!(f, " ")?;
                    }
                    first = false;
                    write!(f, "a{}{}", t + 1, h + 1)?;
                }
                Ok(())
            }
        }
    }
}

/// A rational linear combination of arrow diagrams on one skeleton,
/// truncated in degree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArrowCombination {
    pub skeleton: Skeleton,
    pub trunc: usize,
    pub terms: BTreeMap<ArrowDiagram, Rat>,
}

impl ArrowCombination {
    pub fn zero(skeleton: Skeleton, trunc: usize) -> Self {
        ArrowCombination {
            skeleton,
            trunc,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(skeleton: Skeleton, trunc: usize) -> Self {
        let mut c = Self::zero(skeleton, trunc);
        c.add_diagram(ArrowDiagram::empty(skeleton), crate::linalg::rat(1));
        c
    }

    pub fn single(d: ArrowDiagram, trunc: usize) -> Self {
        let mut c = Self::zero(d.skeleton(), trunc);
        c.add_diagram(d, crate::linalg::rat(1));
        c
    }

    pub fn add_diagram(&mut self, d: ArrowDiagram, c: Rat) {
        if c.is_zero() || d.degree() > self.trunc {
            return;
        }
        debug_assert_eq!(d.skeleton(), self.skeleton);
        let e = self
            .terms
            .entry(d.clone())
            .or_insert_with(|| crate::linalg::rat(0));
        *e += c;
        if e.is_zero() {
            self.terms.remove(&d);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = ArrowCombination::zero(self.skeleton, self.trunc.min(other.trunc));
        for (d, c) in self.terms.iter().chain(other.terms.iter()) {
            out.add_diagram(d.clone(), c.clone());
        }
        out
    }

    pub fn scale(&self, c: &Rat) -> Self {
        if c.is_zero() {
            return ArrowCombination::zero(self.skeleton, self.trunc);
        }
        ArrowCombination {
            skeleton: self.skeleton,
            trunc: self.trunc,
            terms: self.terms.iter().map(|(d, x)| (d.clone(), x * c)).collect(),
        }
    }

    pub fn neg(&self) -> Self {
        self.scale(&crate::linalg::rat(-1))
    }

    pub fn degree_part(&self, d: usize) -> Self {
        ArrowCombination {
            skeleton: self.skeleton,
            trunc: self.trunc,
            terms: self
                .terms
                .iter()
                .filter(|(k, _)| k.degree() == d)
                .map(|(k, v)| (k.clone(), v.clone()))
                .collect(),
        }
    }

    pub fn max_degree_present(&self) -> Option<usize> {
        self.terms.keys().map(|d| d.degree()).max()
    }

    /// The same combination carried at a different truncation degree.
    pub fn with_trunc(&self, trunc: usize) -> Self {
        ArrowCombination {
            skeleton: self.skeleton,
            trunc,
            terms: self
                .terms
                .iter()
                .filter(|(d, _)| d.degree() <= trunc)
                .map(|(d, c)| (d.clone(), c.clone()))
                .collect(),
        }
    }

    /// Concatenation product along a long-line skeleton.
    pub fn concat(&self, other: &Self) -> Self {
        assert_eq!(self.skeleton, Skeleton::LongLine);
        assert_eq!(other.skeleton, Skeleton::LongLine);
        let trunc = self.trunc.min(other.trunc);
        let mut out = ArrowCombination::zero(Skeleton::LongLine, trunc);
        for (d1, c1) in &self.terms {
            let e1 = d1.ends().unwrap();
            for (d2, c2) in &other.terms {
                if d1.degree() + d2.degree() > trunc {
                    continue;
                }
                let e2 = d2.ends().unwrap();
                let mut ends = e1.to_vec();
                let off = d1.degree() as u8;
                ends.extend(e2.iter().map(|x| End {
                    arrow: x.arrow + off,
                    head: x.head,
                }));
                out.add_diagram(ArrowDiagram::line_from_ends(&ends), c1 * c2);
            }
        }
        out
    }

    /// Maps a line combination to its circle closure.
    pub fn close(&self) -> Self {
        let mut out = ArrowCombination::zero(Skeleton::Circle, self.trunc);
        for (d, c) in &self.terms {
            out.add_diagram(d.close(), c.clone());
        }
        out
    }

    /// Deterministic JSON object {"diagram tokens": "p/q"}.
    pub fn to_json(&self) -> serde_json::Value {
        let mut map = serde_json::Map::new();
        for (d, c) in &self.terms {
            map.insert(d.to_string(), serde_json::Value::String(fmt_rat(c)));
        }
        serde_json::Value::Object(map)
    }

    pub fn from_json(
        skeleton: Skeleton,
        trunc: usize,
        v: &serde_json::Value,
    ) -> Result<Self, ArrowError> {
        let mut out = ArrowCombination::zero(skeleton, trunc);
        let obj = v.as_object().ok_or_else(|| ArrowError::BadToken {
            token: "expected JSON object".into(),
        })?;
        for (k, val) in obj {
            let d = if k == "1" {
                ArrowDiagram::empty(skeleton)
            } else {
                ArrowDiagram::parse_line(k)?
            };
            let s = val.as_str().ok_or_else(|| ArrowError::BadToken {
                token: val.to_string(),
            })?;
            let c = parse_rat(s).ok_or_else(|| ArrowError::BadToken { token: s.into() })?;
            out.add_diagram(d, c);
        }
        Ok(out)
    }
}
