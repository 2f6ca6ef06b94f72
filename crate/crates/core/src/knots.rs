//! Gauss diagrams for long v/w-knots, move rewriting, and v/w-braid words
//! with their action on the free group.
//!
//! A Gauss diagram is the list of crossing visits read along the long line:
//! one `O` (over) and one `U` (under) token per crossing, both carrying the
//! crossing sign. Crossings are renumbered in first-appearance order, so two
//! diagrams are equal iff their token lists are equal.

use std::fmt;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Role {
    Over,
    Under,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Token {
    /// 1-based crossing id, contiguous in first-appearance order.
    pub crossing: usize,
    pub role: Role,
    pub sign: i8,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct GaussDiagram {
    tokens: Vec<Token>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GaussError {
    #[error("token {pos}: malformed token '{text}' (expected O<k><s> or U<k><s>)")]
    MalformedToken { pos: usize, text: String },
    #[error("crossing {id} appears {count} times (expected exactly 2)")]
    WrongCount { id: usize, count: usize },
    #[error("crossing {id} does not appear once as O and once as U")]
    RolePair { id: usize },
    #[error("crossing {id}: the two occurrences carry different signs")]
    SignMismatch { id: usize },
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MoveError {
    #[error("move site {pos} out of range")]
    SiteOutOfRange { pos: usize },
    #[error("pattern mismatch at site: {reason}")]
    PatternMismatch { reason: String },
}

impl GaussDiagram {
    pub fn empty() -> Self {
        GaussDiagram::default()
    }

    /// Builds a diagram from raw tokens, renumbering crossings in
    /// first-appearance order and checking the pairing invariants.
    pub fn from_tokens(raw: &[(usize, Role, i8)]) -> Result<Self, GaussError> {
        use std::collections::HashMap;
        let mut order: HashMap<usize, usize> = HashMap::new();
        let mut count: HashMap<usize, usize> = HashMap::new();
        let mut roles: HashMap<usize, Vec<Role>> = HashMap::new();
        let mut signs: HashMap<usize, Vec<i8>> = HashMap::new();
        for &(id, role, sign) in raw {
            let next = order.len() + 1;
            order.entry(id).or_insert(next);
            *count.entry(id).or_insert(0) += 1;
            roles.entry(id).or_default().push(role);
            signs.entry(id).or_default().push(sign);
        }
        for (&id, &c) in &count {
            if c != 2 {
                return Err(GaussError::WrongCount { id, count: c });
            }
            let r = &roles[&id];
            if r[0] == r[1] {
                return Err(GaussError::RolePair { id });
            }
            let s = &signs[&id];
            if s[0] != s[1] {
                return Err(GaussError::SignMismatch { id });
            }
        }
        let tokens = raw
            .iter()
            .map(|&(id, role, sign)| Token {
                crossing: order[&id],
                role,
                sign,
            })
            .collect();
        Ok(GaussDiagram { tokens })
    }

    pub fn tokens(&self) -> &[Token] {
        &self.tokens
    }

    pub fn n_crossings(&self) -> usize {
        self.tokens.len() / 2
    }

    pub fn sign(&self, crossing: usize) -> i8 {
        self.tokens
            .iter()
            .find(|t| t.crossing == crossing)
            .map(|t| t.sign)
            .unwrap_or(0)
    }

    /// Positions of the two visits of a crossing (over position, under position).
    pub fn visits(&self, crossing: usize) -> (usize, usize) {
        let mut over = usize::MAX;
        let mut under = usize::MAX;
        for (i, t) in self.tokens.iter().enumerate() {
            if t.crossing == crossing {
                match t.role {
                    Role::Over => over = i,
                    Role::Under => under = i,
                }
            }
        }
        (over, under)
    }

    /// Sum of crossing signs.
    pub fn self_linking(&self) -> i64 {
        self.tokens.iter().map(|t| t.sign as i64).sum::<i64>() / 2
    }

    /// Removes a crossing outright (used by semi-virtual resolutions).
    pub fn delete_crossing(&self, crossing: usize) -> GaussDiagram {
        let raw: Vec<(usize, Role, i8)> = self
            .tokens
            .iter()
            .filter(|t| t.crossing != crossing)
            .map(|t| (t.crossing, t.role, t.sign))
            .collect();
        GaussDiagram::from_tokens(&raw).expect("deleting a crossing keeps the diagram valid")
    }

    fn rebuild(raw: Vec<(usize, Role, i8)>) -> GaussDiagram {
        GaussDiagram::from_tokens(&raw).expect("move rewriting keeps the diagram valid")
    }

    pub fn apply_move(&self, m: &Move) -> Result<GaussDiagram, MoveError> {
        let n = self.tokens.len();
        let raw = |d: &GaussDiagram| -> Vec<(usize, Role, i8)> {
            d.tokens
                .iter()
                .map(|t| (t.crossing, t.role, t.sign))
                .collect()
        };
        match *m {
            Move::Vr1 | Move::Vr2 | Move::Vr3 | Move::Mixed => Ok(self.clone()),
            Move::R2Insert {
                gap,
                over_pass_first,
                parallel,
                sign,
            } => {
                if gap > n {
                    return Err(MoveError::SiteOutOfRange { pos: gap });
                }
                if sign != 1 && sign != -1 {
                    return Err(MoveError::PatternMismatch {
                        reason: "sign must be +1 or -1".into(),
                    });
                }
                let a = usize::MAX - 1;
                let b = usize::MAX;
                let (ra, rb) = if over_pass_first {
                    (Role::Over, Role::Under)
                } else {
                    (Role::Under, Role::Over)
                };
                // first pass visits a then b; second pass order depends on parallel
                let block = if parallel {
                    [(a, ra, sign), (b, ra, -sign), (a, rb, sign), (b, rb, -sign)]
                } else {
                    [(a, ra, sign), (b, ra, -sign), (b, rb, -sign), (a, rb, sign)]
                };
                let mut v = raw(self);
                for (k, t) in block.into_iter().enumerate() {
                    v.insert(gap + k, t);
                }
                Ok(GaussDiagram::rebuild(v))
            }
            Move::R2Delete { c1, c2 } => {
                if c1 == c2
                    || c1 == 0
                    || c2 == 0
                    || c1 > self.n_crossings()
                    || c2 > self.n_crossings()
                {
                    return Err(MoveError::PatternMismatch {
                        reason: "need two distinct crossings in range".into(),
                    });
                }
                if self.sign(c1) != -self.sign(c2) {
                    return Err(MoveError::PatternMismatch {
                        reason: "the two crossings must have opposite signs".into(),
                    });
                }
                let pos: Vec<usize> = self
                    .tokens
                    .iter()
                    .enumerate()
                    .filter(|(_, t)| t.crossing == c1 || t.crossing == c2)
                    .map(|(i, _)| i)
                    .collect();
                // the four tokens must form two adjacent pairs, each pair one
                // token of each crossing with equal roles within the pair
                // (one all-over pass and one all-under pass through the bigon)
                if !(pos[1] == pos[0] + 1 && pos[3] == pos[2] + 1) {
                    return Err(MoveError::PatternMismatch {
                        reason: "tokens are not adjacent in both places".into(),
                    });
                }
                for &(i, j) in &[(pos[0], pos[1]), (pos[2], pos[3])] {
                    let (ti, tj) = (&self.tokens[i], &self.tokens[j]);
                    if ti.crossing == tj.crossing {
                        return Err(MoveError::PatternMismatch {
                            reason: "a pair holds both ends of one crossing (a kink)".into(),
                        });
                    }
                    if ti.role != tj.role {
                        return Err(MoveError::PatternMismatch {
                            reason: "each pass of an R2 bigon is all-over or all-under".into(),
                        });
                    }
                }
                if self.tokens[pos[0]].role == self.tokens[pos[2]].role {
                    return Err(MoveError::PatternMismatch {
                        reason: "the two passes must be one over and one under".into(),
                    });
                }
                let v = self
                    .tokens
                    .iter()
                    .filter(|t| t.crossing != c1 && t.crossing != c2)
                    .map(|t| (t.crossing, t.role, t.sign))
                    .collect();
                Ok(GaussDiagram::rebuild(v))
            }
            Move::R3 { p, q, r } => {
                let mut sites = [p, q, r];
                sites.sort_unstable();
                let [p, q, r] = sites;
                if r + 1 >= n {
                    return Err(MoveError::SiteOutOfRange { pos: r });
                }
                if q < p + 2 || r < q + 2 {
                    return Err(MoveError::PatternMismatch {
                        reason: "the three adjacent pairs must be disjoint".into(),
                    });
                }
                let pairs = [(p, p + 1), (q, q + 1), (r, r + 1)];
                let mut ids = std::collections::BTreeSet::new();
                for &(i, j) in &pairs {
                    if self.tokens[i].crossing == self.tokens[j].crossing {
                        return Err(MoveError::PatternMismatch {
                            reason: "a pass visits the same crossing twice".into(),
                        });
                    }
                    ids.insert(self.tokens[i].crossing);
                    ids.insert(self.tokens[j].crossing);
                }
                if ids.len() != 3 {
                    return Err(MoveError::PatternMismatch {
                        reason: "the three pairs must involve exactly three crossings".into(),
                    });
                }
                let all: Vec<usize> = pairs.iter().flat_map(|&(i, j)| [i, j]).collect();
                for &id in &ids {
                    let k = all
                        .iter()
                        .filter(|&&i| self.tokens[i].crossing == id)
                        .count();
                    if k != 2 {
                        return Err(MoveError::PatternMismatch {
                            reason: "each crossing must have both ends in the triangle".into(),
                        });
                    }
                }
                // one pass all-over, one all-under, one mixed
                let mut oo = 0;
                let mut uu = 0;
                for &(i, j) in &pairs {
                    match (self.tokens[i].role, self.tokens[j].role) {
                        (Role::Over, Role::Over) => oo += 1,
                        (Role::Under, Role::Under) => uu += 1,
                        _ => {}
                    }
                }
                if oo != 1 || uu != 1 {
                    return Err(MoveError::PatternMismatch {
                        reason: "need one all-over pass, one all-under pass, one mixed".into(),
                    });
                }
                let mut v = raw(self);
                for &(i, j) in &pairs {
                    v.swap(i, j);
                }
                Ok(GaussDiagram::rebuild(v))
            }
            Move::Oc { pos } => {
                if pos + 1 >= n {
                    return Err(MoveError::SiteOutOfRange { pos });
                }
                let (a, b) = (&self.tokens[pos], &self.tokens[pos + 1]);
                if a.role != Role::Over || b.role != Role::Over {
                    return Err(MoveError::PatternMismatch {
                        reason: "both tokens must be Over endpoints".into(),
                    });
                }
                if a.crossing == b.crossing {
                    return Err(MoveError::PatternMismatch {
                        reason: "the two Over endpoints must belong to distinct crossings".into(),
                    });
                }
                let mut v = raw(self);
                v.swap(pos, pos + 1);
                Ok(GaussDiagram::rebuild(v))
            }
            Move::R1sSpin { pos } => {
                if pos + 1 >= n {
                    return Err(MoveError::SiteOutOfRange { pos });
                }
                if self.tokens[pos].crossing != self.tokens[pos + 1].crossing {
                    return Err(MoveError::PatternMismatch {
                        reason: "tokens at the site are not an isolated kink".into(),
                    });
                }
                let mut v = raw(self);
                v.swap(pos, pos + 1);
                Ok(GaussDiagram::rebuild(v))
            }
            Move::R1sSlide { pos, right } => {
                if pos + 1 >= n {
                    return Err(MoveError::SiteOutOfRange { pos });
                }
                if self.tokens[pos].crossing != self.tokens[pos + 1].crossing {
                    return Err(MoveError::PatternMismatch {
                        reason: "tokens at the site are not an isolated kink".into(),
                    });
                }
                let mut v = raw(self);
                if right {
                    if pos + 2 >= n {
                        return Err(MoveError::SiteOutOfRange { pos: pos + 2 });
                    }
                    // kink block moves across the next token
                    v.swap(pos + 1, pos + 2);
                    v.swap(pos, pos + 1);
                } else {
                    if pos == 0 {
                        return Err(MoveError::SiteOutOfRange { pos });
                    }
                    v.swap(pos - 1, pos);
                    v.swap(pos, pos + 1);
                }
                Ok(GaussDiagram::rebuild(v))
            }
        }
    }

    /// All kink positions (left index of a crossing whose ends are adjacent).
    pub fn kink_sites(&self) -> Vec<usize> {
        (0..self.tokens.len().saturating_sub(1))
            .filter(|&i| self.tokens[i].crossing == self.tokens[i + 1].crossing)
            .collect()
    }

    /// All OC sites (left index of two adjacent Over endpoints of distinct crossings).
    pub fn oc_sites(&self) -> Vec<usize> {
        (0..self.tokens.len().saturating_sub(1))
            .filter(|&i| {
                self.tokens[i].role == Role::Over
                    && self.tokens[i + 1].role == Role::Over
                    && self.tokens[i].crossing != self.tokens[i + 1].crossing
            })
            .collect()
    }
}

/// The move alphabet. The virtual moves are identities on Gauss diagrams
/// (Gauss diagrams already quotient them out) and are accepted for
/// completeness.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Move {
    /// Insert a cancelling R2 bigon as four contiguous tokens at `gap`.
    /// `over_pass_first` picks which pass comes first along the line,
    /// `parallel` picks whether the second pass traverses the bigon in the
    /// same or the opposite order, `sign` is the sign of the first crossing
    /// (the second gets the opposite sign).
    R2Insert {
        gap: usize,
        over_pass_first: bool,
        parallel: bool,
        sign: i8,
    },
    /// Delete the R2 bigon formed by crossings `c1`, `c2`.
    R2Delete {
        c1: usize,
        c2: usize,
    },
    /// Slide a strand across a crossing: `p`, `q`, `r` are the left indices
    /// of the three adjacent token pairs forming the triangle.
    R3 {
        p: usize,
        q: usize,
        r: usize,
    },
    /// Transpose two adjacent Over endpoints of distinct crossings.
    Oc {
        pos: usize,
    },
    /// Spin the isolated kink at `pos`: transpose its O and U tokens.
    R1sSpin {
        pos: usize,
    },
    /// Relocate the isolated kink block at `pos` across its neighbor token.
    R1sSlide {
        pos: usize,
        right: bool,
    },
    Vr1,
    Vr2,
    Vr3,
    Mixed,
}

// ---------------------------------------------------------------------------
// parsing and printing

/// Parses whitespace-separated tokens `O<k><s>` / `U<k><s>` with `s` in {+,-}.
pub fn parse_gauss_code(text: &str) -> Result<GaussDiagram, GaussError> {
    let mut raw = Vec::new();
    for (pos, word) in text.split_whitespace().enumerate() {
        if word.starts_with('#') {
            break;
        }
        let mut chars = word.chars();
        let role = match chars.next() {
            Some('O') => Role::Over,
            Some('U') => Role::Under,
            _ => {
                return Err(GaussError::MalformedToken {
                    pos,
                    text: word.into(),
                })
            }
        };
        let rest: String = chars.collect();
        let (digits, sign) = rest.split_at(rest.len().saturating_sub(1));
        let sign = match sign {
            "+" => 1i8,
            "-" => -1i8,
            _ => {
                return Err(GaussError::MalformedToken {
                    pos,
                    text: word.into(),
                })
            }
        };
        let id: usize = digits.parse().map_err(|_| GaussError::MalformedToken {
            pos,
            text: word.into(),
        })?;
        if id == 0 {
            return Err(GaussError::MalformedToken {
                pos,
                text: word.into(),
            });
        }
        raw.push((id, role, sign));
    }
    GaussDiagram::from_tokens(&raw)
}

/// Parses a corpus file: `#` starts a comment line, tokens may span lines.
pub fn parse_gauss_file(text: &str) -> Result<GaussDiagram, GaussError> {
    let joined: String = text
        .lines()
        .map(|l| l.split('#').next().unwrap_or(""))
        .collect::<Vec<_>>()
        .join(" ");
    parse_gauss_code(&joined)
}

impl fmt::Display for GaussDiagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for t in &self.tokens {
            if !first {
                write!(f, " ")?;
            }
            first = false;
            let r = match t.role {
                Role::Over => 'O',
                Role::Under => 'U',
            };
            let s = if t.sign > 0 { '+' } else { '-' };
            write!(f, "{}{}{}", r, t.crossing, s)?;
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// braids

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BraidLetter {
    /// sigma_i: strand at position i crosses over position i+1.
    Pos(usize),
    /// sigma_i^{-1}.
    Neg(usize),
    /// s_i: virtual crossing.
    Virt(usize),
}

impl BraidLetter {
    pub fn index(&self) -> usize {
        match *self {
            BraidLetter::Pos(i) | BraidLetter::Neg(i) | BraidLetter::Virt(i) => i,
        }
    }

    pub fn inverse(&self) -> BraidLetter {
        match *self {
            BraidLetter::Pos(i) => BraidLetter::Neg(i),
            BraidLetter::Neg(i) => BraidLetter::Pos(i),
            BraidLetter::Virt(i) => BraidLetter::Virt(i),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BraidWord {
    pub n_strands: usize,
    pub letters: Vec<BraidLetter>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BraidError {
    #[error("token {pos}: malformed braid token '{text}'")]
    MalformedToken { pos: usize, text: String },
    #[error("letter index {index} out of range for {n_strands} strands")]
    IndexOutOfRange { index: usize, n_strands: usize },
    #[error("strand counts differ: {a} vs {b}")]
    StrandMismatch { a: usize, b: usize },
    #[error("free word uses generator {index}, braid has {n_strands} strands")]
    GeneratorMismatch { index: usize, n_strands: usize },
    #[error("closure of this braid is a link with {components} components, not a knot")]
    ClosureNotAKnot { components: usize },
}

impl BraidWord {
    pub fn new(n_strands: usize, letters: Vec<BraidLetter>) -> Result<Self, BraidError> {
        for l in &letters {
            let i = l.index();
            if i == 0 || i + 1 > n_strands {
                return Err(BraidError::IndexOutOfRange {
                    index: i,
                    n_strands,
                });
            }
        }
        Ok(BraidWord { n_strands, letters })
    }

    /// Parses tokens `p<i>` (sigma_i), `m<i>` (sigma_i^{-1}), `v<i>` (s_i).
    /// Tokens may be separated by whitespace or juxtaposed ("p1p1").
    pub fn parse(n_strands: usize, text: &str) -> Result<Self, BraidError> {
        let mut letters = Vec::new();
        let mut chars = text.chars().peekable();
        let mut pos = 0usize;
        while let Some(&c) = chars.peek() {
            if c.is_whitespace() {
                chars.next();
                continue;
            }
            chars.next();
            let mut digits = String::new();
            while let Some(&d) = chars.peek() {
                if d.is_ascii_digit() {
                    digits.push(d);
                    chars.next();
                } else {
                    break;
                }
            }
            let idx: usize = digits.parse().map_err(|_| BraidError::MalformedToken {
                pos,
                text: format!("{c}{digits}"),
            })?;
            let letter = match c {
                'p' => BraidLetter::Pos(idx),
                'm' => BraidLetter::Neg(idx),
                'v' => BraidLetter::Virt(idx),
                _ => {
                    return Err(BraidError::MalformedToken {
                        pos,
                        text: format!("{c}{digits}"),
                    })
                }
            };
            letters.push(letter);
            pos += 1;
        }
        BraidWord::new(n_strands, letters)
    }

    pub fn compose(&self, other: &BraidWord) -> Result<BraidWord, BraidError> {
        if self.n_strands != other.n_strands {
            return Err(BraidError::StrandMismatch {
                a: self.n_strands,
                b: other.n_strands,
            });
        }
        let mut letters = self.letters.clone();
        letters.extend_from_slice(&other.letters);
        Ok(BraidWord {
            n_strands: self.n_strands,
            letters,
        })
    }

    pub fn invert(&self) -> BraidWord {
        BraidWord {
            n_strands: self.n_strands,
            letters: self.letters.iter().rev().map(|l| l.inverse()).collect(),
        }
    }

    /// Image under the skeleton morphism: perm[i] is where the strand
    /// starting at bottom position i ends up (0-based), letters composed
    /// left to right (bottom to top).
    pub fn skeleton_perm(&self) -> Vec<usize> {
        let mut pos: Vec<usize> = (0..self.n_strands).collect();
        let mut at: Vec<usize> = (0..self.n_strands).collect();
        for l in &self.letters {
            let i = l.index() - 1;
            let (a, b) = (at[i], at[i + 1]);
            at.swap(i, i + 1);
            pos[a] = i + 1;
            pos[b] = i;
        }
        pos
    }

    /// Deletes the strand starting at bottom position `k` (1-based).
    pub fn delete_strand(&self, k: usize) -> Result<BraidWord, BraidError> {
        if k == 0 || k > self.n_strands {
            return Err(BraidError::IndexOutOfRange {
                index: k,
                n_strands: self.n_strands,
            });
        }
        let mut tracked = k - 1; // current position of the deleted strand
        let mut letters = Vec::new();
        for l in &self.letters {
            let i = l.index() - 1;
            if i == tracked {
                tracked = i + 1;
            } else if i + 1 == tracked {
                tracked = i;
            } else {
                let ni = if i > tracked { i - 1 } else { i };
                letters.push(match l {
                    BraidLetter::Pos(_) => BraidLetter::Pos(ni + 1),
                    BraidLetter::Neg(_) => BraidLetter::Neg(ni + 1),
                    BraidLetter::Virt(_) => BraidLetter::Virt(ni + 1),
                });
            }
        }
        BraidWord::new(self.n_strands - 1, letters)
    }

    /// Inserts an inert strand at bottom position `k` (1-based): the new
    /// strand stays put and every crossing of the original braid detours
    /// around it virtually when needed.
    pub fn insert_strand(&self, k: usize) -> Result<BraidWord, BraidError> {
        if k == 0 || k > self.n_strands + 1 {
            return Err(BraidError::IndexOutOfRange {
                index: k,
                n_strands: self.n_strands,
            });
        }
        let t = k - 1; // 0-based fixed position of the inert strand
        let map = |p: usize| if p >= t { p + 1 } else { p };
        let mut letters = Vec::new();
        for l in &self.letters {
            let i = l.index() - 1;
            let (a, b) = (map(i), map(i + 1));
            if b == a + 1 {
                letters.push(relabel(l, a + 1));
            } else {
                // inert strand sits between the two strands: move it aside
                // with a virtual crossing, cross, and move it back
                letters.push(BraidLetter::Virt(a + 2));
                letters.push(relabel(l, a + 1));
                letters.push(BraidLetter::Virt(a + 2));
            }
        }
        BraidWord::new(self.n_strands + 1, letters)
    }

    /// Unzips (doubles) the strand starting at bottom position `k` (1-based).
    pub fn unzip_strand(&self, k: usize) -> Result<BraidWord, BraidError> {
        if k == 0 || k > self.n_strands {
            return Err(BraidError::IndexOutOfRange {
                index: k,
                n_strands: self.n_strands,
            });
        }
        // widths of the tracks in current position order
        let mut wide = k - 1; // index (in track order) of the doubled track
        let mut letters = Vec::new();
        // start position (in the new braid) of each track
        let offset = |tracks: &[usize], t: usize| -> usize { tracks[..t].iter().sum() };
        let mut tracks: Vec<usize> = (0..self.n_strands).map(|_| 1).collect();
        tracks[wide] = 2;
        for l in &self.letters {
            let i = l.index() - 1;
            let o = offset(&tracks, i);
            let (wa, wb) = (tracks[i], tracks[i + 1]);
            match (wa, wb) {
                (1, 1) => letters.push(relabel(l, o + 1)),
                (2, 1) => {
                    letters.push(relabel(l, o + 2));
                    letters.push(relabel(l, o + 1));
                }
                (1, 2) => {
                    letters.push(relabel(l, o + 1));
                    letters.push(relabel(l, o + 2));
                }
                _ => unreachable!("only one strand is doubled"),
            }
            tracks.swap(i, i + 1);
            if wide == i {
                wide = i + 1;
            } else if wide == i + 1 {
                wide = i;
            }
        }
        BraidWord::new(self.n_strands + 1, letters)
    }
}

fn relabel(l: &BraidLetter, idx: usize) -> BraidLetter {
    match l {
        BraidLetter::Pos(_) => BraidLetter::Pos(idx),
        BraidLetter::Neg(_) => BraidLetter::Neg(idx),
        BraidLetter::Virt(_) => BraidLetter::Virt(idx),
    }
}

impl fmt::Display for BraidWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for l in &self.letters {
            if !first {
                write!(f, " ")?;
            }
            first = false;
            match l {
                BraidLetter::Pos(i) => write!(f, "p{i}")?,
                BraidLetter::Neg(i) => write!(f, "m{i}")?,
                BraidLetter::Virt(i) => write!(f, "v{i}")?,
            }
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// the free group and the braid action

/// A reduced word in the free group on `n_generators` generators.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FreeWord {
    pub n_generators: usize,
    /// letters: (generator 1-based, exponent +1/-1), freely reduced
    pub letters: Vec<(usize, i8)>,
}

impl FreeWord {
    pub fn identity(n: usize) -> Self {
        FreeWord {
            n_generators: n,
            letters: Vec::new(),
        }
    }

    pub fn generator(n: usize, i: usize) -> Self {
        FreeWord {
            n_generators: n,
            letters: vec![(i, 1)],
        }
    }

    pub fn push(&mut self, gen: usize, exp: i8) {
        if let Some(&(g, e)) = self.letters.last() {
            if g == gen && e == -exp {
                self.letters.pop();
                return;
            }
        }
        self.letters.push((gen, exp));
    }

    pub fn mul(&self, other: &FreeWord) -> FreeWord {
        let mut out = self.clone();
        for &(g, e) in &other.letters {
            out.push(g, e);
        }
        out
    }

    pub fn inverse(&self) -> FreeWord {
        FreeWord {
            n_generators: self.n_generators,
            letters: self.letters.iter().rev().map(|&(g, e)| (g, -e)).collect(),
        }
    }

    /// Parses tokens `x<i>` (generator) and `X<i>` (inverse), whitespace
    /// separated or juxtaposed.
    pub fn parse(n: usize, text: &str) -> Result<Self, BraidError> {
        let mut out = FreeWord::identity(n);
        let mut chars = text.chars().peekable();
        let mut pos = 0;
        while let Some(&c) = chars.peek() {
            if c.is_whitespace() {
                chars.next();
                continue;
            }
            chars.next();
            let exp = match c {
                'x' => 1i8,
                'X' => -1i8,
                _ => {
                    return Err(BraidError::MalformedToken {
                        pos,
                        text: c.to_string(),
                    })
                }
            };
            let mut digits = String::new();
            while let Some(&d) = chars.peek() {
                if d.is_ascii_digit() {
                    digits.push(d);
                    chars.next();
                } else {
                    break;
                }
            }
            let idx: usize = digits.parse().map_err(|_| BraidError::MalformedToken {
                pos,
                text: format!("{c}{digits}"),
            })?;
            if idx == 0 || idx > n {
                return Err(BraidError::GeneratorMismatch {
                    index: idx,
                    n_strands: n,
                });
            }
            out.push(idx, exp);
            pos += 1;
        }
        Ok(out)
    }
}

impl fmt::Display for FreeWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return write!(f, "1");
        }
        let mut first = true;
        for &(g, e) in &self.letters {
            if !first {
                write!(f, " ")?;
            }
            first = false;
            if e > 0 {
                write!(f, "x{g}")?;
            } else {
                write!(f, "X{g}")?;
            }
        }
        Ok(())
    }
}

/// The right action of a braid word on the free group:
/// `(xi_i, xi_{i+1}) // s_i = (xi_{i+1}, xi_i)` and
/// `(xi_i, xi_{i+1}) // sigma_i = (xi_{i+1}, xi_{i+1} xi_i xi_{i+1}^{-1})`.
pub fn braid_act(w: &FreeWord, b: &BraidWord) -> Result<FreeWord, BraidError> {
    if w.n_generators != b.n_strands {
        return Err(BraidError::GeneratorMismatch {
            index: w.n_generators,
            n_strands: b.n_strands,
        });
    }
    let n = b.n_strands;
    let mut cur = w.clone();
    for l in &b.letters {
        let i = l.index();
        let image = |g: usize| -> FreeWord {
            let xi = |k: usize| FreeWord::generator(n, k);
            match l {
                BraidLetter::Virt(_) => {
                    if g == i {
                        xi(i + 1)
                    } else if g == i + 1 {
                        xi(i)
                    } else {
                        xi(g)
                    }
                }
                BraidLetter::Pos(_) => {
                    if g == i {
                        xi(i + 1)
                    } else if g == i + 1 {
                        xi(i + 1).mul(&xi(i)).mul(&xi(i + 1).inverse())
                    } else {
                        xi(g)
                    }
                }
                BraidLetter::Neg(_) => {
                    if g == i {
                        xi(i).inverse().mul(&xi(i + 1)).mul(&xi(i))
                    } else if g == i + 1 {
                        xi(i)
                    } else {
                        xi(g)
                    }
                }
            }
        };
        let mut next = FreeWord::identity(n);
        for &(g, e) in &cur.letters {
            let im = image(g);
            let im = if e > 0 { im } else { im.inverse() };
            next = next.mul(&im);
        }
        cur = next;
    }
    Ok(cur)
}

// ---------------------------------------------------------------------------
// braid closures as Gauss diagrams

/// Traces the closure of a braid word and returns the long Gauss diagram
/// obtained by cutting the closed knot at the bottom of strand
/// `cut_strand` (1-based). Fails if the closure is not a knot.
pub fn braid_closure_gauss(b: &BraidWord, cut_strand: usize) -> Result<GaussDiagram, BraidError> {
    let perm = b.skeleton_perm();
    // count cycles
    let mut seen = vec![false; b.n_strands];
    let mut components = 0;
    for s in 0..b.n_strands {
        if !seen[s] {
            components += 1;
            let mut t = s;
            while !seen[t] {
                seen[t] = true;
                t = perm[t];
            }
        }
    }
    if components != 1 {
        return Err(BraidError::ClosureNotAKnot { components });
    }
    if cut_strand == 0 || cut_strand > b.n_strands {
        return Err(BraidError::IndexOutOfRange {
            index: cut_strand,
            n_strands: b.n_strands,
        });
    }
    let mut raw = Vec::new();
    let mut strand = cut_strand - 1;
    loop {
        // walk this strand bottom to top
        let mut pos = strand;
        for (li, l) in b.letters.iter().enumerate() {
            let i = l.index() - 1;
            if pos == i {
                let (role, sign) = match l {
                    BraidLetter::Pos(_) => (Role::Over, 1),
                    BraidLetter::Neg(_) => (Role::Under, -1),
                    BraidLetter::Virt(_) => {
                        pos = i + 1;
                        continue;
                    }
                };
                raw.push((li + 1, role, sign));
                pos = i + 1;
            } else if pos == i + 1 {
                let (role, sign) = match l {
                    BraidLetter::Pos(_) => (Role::Under, 1),
                    BraidLetter::Neg(_) => (Role::Over, -1),
                    BraidLetter::Virt(_) => {
                        pos = i;
                        continue;
                    }
                };
                raw.push((li + 1, role, sign));
                pos = i;
            }
        }
        strand = pos;
        if strand == cut_strand - 1 {
            break;
        }
    }
    Ok(GaussDiagram::from_tokens(&raw).expect("closure trace produces a valid Gauss code"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_empty_and_smallest() {
        assert_eq!(parse_gauss_code("").unwrap(), GaussDiagram::empty());
        let k = parse_gauss_code("O1+ U1+").unwrap();
        assert_eq!(k.n_crossings(), 1);
        assert_eq!(k.self_linking(), 1);
    }

    #[test]
    fn parse_renumbers_in_first_appearance_order() {
        let k = parse_gauss_code("O7+ U3- O3- U7+").unwrap();
        assert_eq!(k.to_string(), "O1+ U2- O2- U1+");
    }

    #[test]
    fn parse_errors_are_reported() {
        assert!(matches!(
            parse_gauss_code("Q1+"),
            Err(GaussError::MalformedToken { pos: 0, .. })
        ));
        assert!(matches!(
            parse_gauss_code("O1+ U1+ O1+"),
            Err(GaussError::WrongCount { id: 1, count: 3 })
        ));
        assert!(matches!(
            parse_gauss_code("O1+ O2+ O1+ U2+"),
            Err(GaussError::RolePair { id: 1 })
        ));
        assert!(matches!(
            parse_gauss_code("O1+ U1-"),
            Err(GaussError::SignMismatch { id: 1 })
        ));
    }

    #[test]
    fn trefoil_self_linking() {
        let k = parse_gauss_code("O1+ U2+ O3+ U1+ O2+ U3+").unwrap();
        assert_eq!(k.self_linking(), 3);
    }

    #[test]
    fn r2_insert_then_delete_roundtrips() {
        let empty = GaussDiagram::empty();
        for &over_first in &[true, false] {
            for &parallel in &[true, false] {
                for &sign in &[1i8, -1] {
                    let m = Move::R2Insert {
                        gap: 0,
                        over_pass_first: over_first,
                        parallel,
                        sign,
                    };
                    let k = empty.apply_move(&m).unwrap();
                    assert_eq!(k.n_crossings(), 2);
                    assert_eq!(k.self_linking(), 0);
                    let back = k.apply_move(&Move::R2Delete { c1: 1, c2: 2 }).unwrap();
                    assert_eq!(back, empty);
                }
            }
        }
    }

    #[test]
    fn r2_delete_rejects_clasp() {
        // O1 U2 U1 O2 is a clasp, not a cancelling bigon
        let k = parse_gauss_code("O1+ U2- U1+ O2-").unwrap();
        assert!(k.apply_move(&Move::R2Delete { c1: 1, c2: 2 }).is_err());
    }

    #[test]
    fn oc_swaps_adjacent_over_tokens() {
        let k = parse_gauss_code("O1+ O2+ U1+ U2+").unwrap();
        let k2 = k.apply_move(&Move::Oc { pos: 0 }).unwrap();
        assert_eq!(k2.to_string(), "O1+ O2+ U2+ U1+");
        assert_eq!(k2.self_linking(), k.self_linking());
    }

    #[test]
    fn skeleton_perm_of_sigma_is_transposition() {
        let b = BraidWord::parse(2, "p1").unwrap();
        assert_eq!(b.skeleton_perm(), vec![1, 0]);
        let b = BraidWord::parse(3, "v1 v2").unwrap();
        assert_eq!(b.skeleton_perm(), vec![2, 0, 1]);
    }

    #[test]
    fn skeleton_perm_is_a_homomorphism() {
        let a = BraidWord::parse(4, "p1 v2 m3").unwrap();
        let b = BraidWord::parse(4, "v1 p3 p2").unwrap();
        let ab = a.compose(&b).unwrap();
        let pa = a.skeleton_perm();
        let pb = b.skeleton_perm();
        let composed: Vec<usize> = (0..4).map(|i| pb[pa[i]]).collect();
        assert_eq!(ab.skeleton_perm(), composed);
    }

    #[test]
    fn explicit_action_on_generators() {
        let b = BraidWord::parse(2, "p1").unwrap();
        let x1 = FreeWord::parse(2, "x1").unwrap();
        let x2 = FreeWord::parse(2, "x2").unwrap();
        assert_eq!(braid_act(&x1, &b).unwrap().to_string(), "x2");
        assert_eq!(braid_act(&x2, &b).unwrap().to_string(), "x2 x1 X2");
    }

    #[test]
    fn action_of_word_times_inverse_is_identity() {
        let b = BraidWord::parse(3, "p1 m2 v1 p2").unwrap();
        let bb = b.compose(&b.invert()).unwrap();
        for i in 1..=3 {
            let w = FreeWord::generator(3, i);
            assert_eq!(braid_act(&w, &bb).unwrap(), w);
        }
    }

    /// Both sides of every defining relation of wB_n act identically, n <= 4.
    #[test]
    fn action_respects_wb_relations() {
        for n in 2..=4usize {
            let mut rels: Vec<(String, String)> = Vec::new();
            for i in 1..n {
                rels.push((format!("v{i} v{i}"), String::new()));
                rels.push((format!("p{i} m{i}"), String::new()));
                for j in 1..n {
                    if (i as i64 - j as i64).abs() > 1 {
                        rels.push((format!("v{i} v{j}"), format!("v{j} v{i}")));
                        rels.push((format!("p{i} p{j}"), format!("p{j} p{i}")));
                        rels.push((format!("v{i} p{j}"), format!("p{j} v{i}")));
                    }
                }
            }
            for i in 1..n.saturating_sub(1) {
                let j = i + 1;
                rels.push((format!("v{i} v{j} v{i}"), format!("v{j} v{i} v{j}")));
                rels.push((format!("p{i} p{j} p{i}"), format!("p{j} p{i} p{j}")));
                rels.push((format!("v{i} p{j} v{i}"), format!("v{j} p{i} v{j}")));
                rels.push((format!("v{i} m{j} v{i}"), format!("v{j} m{i} v{j}")));
                // overcrossings commute
                rels.push((format!("p{i} p{j} v{i}"), format!("v{j} p{i} p{j}")));
            }
            for (lhs, rhs) in rels {
                let bl = BraidWord::parse(n, &lhs).unwrap();
                let br = BraidWord::parse(n, &rhs).unwrap();
                for g in 1..=n {
                    let w = FreeWord::generator(n, g);
                    assert_eq!(
                        braid_act(&w, &bl).unwrap(),
                        braid_act(&w, &br).unwrap(),
                        "relation {lhs} = {rhs} failed on generator {g} (n={n})"
                    );
                }
            }
        }
    }

    /// The undercrossings-commute analogue must NOT hold for the action.
    #[test]
    fn uc_is_not_a_relation() {
        let n = 3;
        let lhs = BraidWord::parse(n, "v1 p1 p2").unwrap();
        let rhs = BraidWord::parse(n, "p2 p1 v2").unwrap();
        let mut all_equal = true;
        for g in 1..=n {
            let w = FreeWord::generator(n, g);
            if braid_act(&w, &lhs).unwrap() != braid_act(&w, &rhs).unwrap() {
                all_equal = false;
            }
        }
        assert!(!all_equal);
    }

    #[test]
    fn closure_of_sigma1_cubed_is_the_long_trefoil() {
        let b = BraidWord::parse(2, "p1 p1 p1").unwrap();
        let k = braid_closure_gauss(&b, 1).unwrap();
        assert_eq!(k.to_string(), "O1+ U2+ O3+ U1+ O2+ U3+");
    }

    #[test]
    fn closure_rejects_links() {
        let b = BraidWord::parse(2, "p1 p1").unwrap();
        assert!(matches!(
            braid_closure_gauss(&b, 1),
            Err(BraidError::ClosureNotAKnot { components: 2 })
        ));
    }

    #[test]
    fn moves_preserve_self_linking() {
        let k = parse_gauss_code("O1+ U2+ O3+ U1+ O2+ U3+").unwrap();
        for pos in k.oc_sites() {
            let k2 = k.apply_move(&Move::Oc { pos }).unwrap();
            assert_eq!(k2.self_linking(), k.self_linking());
        }
        let kinked = parse_gauss_code("O1+ U1+ O2- U3+ U2- O3+").unwrap();
        for pos in kinked.kink_sites() {
            let a = kinked.apply_move(&Move::R1sSpin { pos }).unwrap();
            assert_eq!(a.self_linking(), kinked.self_linking());
        }
    }

    #[test]
    fn unzip_of_sigma1_is_sigma2_sigma1() {
        let b = BraidWord::parse(2, "p1").unwrap();
        let u = b.unzip_strand(1).unwrap();
        assert_eq!(u.to_string(), "p2 p1");
        let u2 = b.unzip_strand(2).unwrap();
        assert_eq!(u2.to_string(), "p1 p2");
    }

    #[test]
    fn delete_strand_drops_its_crossings() {
        let b = BraidWord::parse(3, "p1 p2 v1").unwrap();
        // strand 1: p1 involves it, p2 involves it after moving to 2, v1 not
        let d = b.delete_strand(1).unwrap();
        assert_eq!(d.n_strands, 2);
        assert_eq!(d.to_string(), "v1");
    }
}
