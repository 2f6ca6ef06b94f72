//! The wheels normal form of the s-w quotient on a long line: it is the
//! polynomial algebra on the single arrow D_A and the wheels w_k (k >= 2),
//! and every combination can be expressed in the monomial basis by a linear
//! solve in the quotient.

use super::{
    d_a_element, wheel_element, ArrowCombination, ArrowError, ElimOrder, EnumerationCaps,
    QuotientSpace, Skeleton, SpaceKind,
};
use crate::alexander::PowerSeries;
use crate::linalg::{fmt_rat, parse_rat, rat, Rat, RowSpace, SparseVec};
use num_traits::{One, Zero};
use std::collections::BTreeMap;
use std::fmt;

/// A monomial D_A^a * prod_{k>=2} w_k^{m_k}.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Default)]
pub struct WheelMonomial {
    pub d_a: usize,
    /// wheel size -> multiplicity, sizes >= 2
    pub wheels: BTreeMap<usize, usize>,
}

impl WheelMonomial {
    pub fn one() -> Self {
        WheelMonomial::default()
    }

    pub fn degree(&self) -> usize {
        self.d_a + self.wheels.iter().map(|(k, m)| k * m).sum::<usize>()
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.d_a += other.d_a;
        for (&k, &m) in &other.wheels {
            *out.wheels.entry(k).or_insert(0) += m;
        }
        out
    }

    pub fn parse(s: &str) -> Option<Self> {
        let s = s.trim();
        if s == "1" {
            return Some(WheelMonomial::one());
        }
        let mut out = WheelMonomial::one();
        for f in s.split_whitespace() {
            let (base, pow) = match f.split_once('^') {
                Some((b, p)) => (b, p.parse::<usize>().ok()?),
                None => (f, 1),
            };
            if base == "DA" {
                out.d_a += pow;
            } else {
                let k = base.strip_prefix('w')?;
                let k: usize = k.parse().ok()?;
                if k < 2 {
                    return None;
                }
                *out.wheels.entry(k).or_insert(0) += pow;
            }
        }
        Some(out)
    }
}

impl fmt::Display for WheelMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.d_a == 0 && self.wheels.is_empty() {
            return write!(f, "1");
        }
        let mut parts = Vec::new();
        if self.d_a == 1 {
            parts.push("DA".to_string());
        } else if self.d_a > 1 {
            parts.push(format!("DA^{}", self.d_a));
        }
        for (&k, &m) in &self.wheels {
            if m == 1 {
                parts.push(format!("w{k}"));
            } else {
                parts.push(format!("w{k}^{m}"));
            }
        }
        write!(f, "{}", parts.join(" "))
    }
}

/// A polynomial in D_A and the wheels, truncated in total degree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WheelsPolynomial {
    pub trunc: usize,
    pub terms: BTreeMap<WheelMonomial, Rat>,
}

impl WheelsPolynomial {
    pub fn zero(trunc: usize) -> Self {
        WheelsPolynomial {
            trunc,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(trunc: usize) -> Self {
        let mut p = Self::zero(trunc);
        p.add_term(WheelMonomial::one(), rat(1));
        p
    }

    pub fn add_term(&mut self, m: WheelMonomial, c: Rat) {
        if c.is_zero() || m.degree() > self.trunc {
            return;
        }
        let e = self.terms.entry(m.clone()).or_insert_with(|| rat(0));
        *e += c;
        if e.is_zero() {
            self.terms.remove(&m);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = Self::zero(self.trunc.min(other.trunc));
        for (m, c) in self.terms.iter().chain(other.terms.iter()) {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn scale(&self, c: &Rat) -> Self {
        if c.is_zero() {
            return Self::zero(self.trunc);
        }
        WheelsPolynomial {
            trunc: self.trunc,
            terms: self.terms.iter().map(|(m, x)| (m.clone(), x * c)).collect(),
        }
    }

    pub fn neg(&self) -> Self {
        self.scale(&rat(-1))
    }

    pub fn mul(&self, other: &Self) -> Self {
        let trunc = self.trunc.min(other.trunc);
        let mut out = Self::zero(trunc);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                if m1.degree() + m2.degree() > trunc {
                    continue;
                }
                out.add_term(m1.mul(m2), c1 * c2);
            }
        }
        out
    }

    /// exp of a polynomial with no constant term.
    pub fn exp(&self) -> Self {
        debug_assert!(!self.terms.contains_key(&WheelMonomial::one()));
        let mut out = Self::one(self.trunc);
        let mut pw = Self::one(self.trunc);
        let mut fact = rat(1);
        for k in 1..=self.trunc {
            pw = pw.mul(self);
            if pw.is_zero() {
                break;
            }
            fact *= rat(k as i64);
            out = out.add(&pw.scale(&fact.clone().recip()));
        }
        out
    }

    /// log of a polynomial with constant term 1.
    pub fn log(&self) -> Self {
        assert!(self
            .terms
            .get(&WheelMonomial::one())
            .map(|c| c.is_one())
            .unwrap_or(false));
        let mut u = self.clone();
        u.terms.remove(&WheelMonomial::one());
        let mut out = Self::zero(self.trunc);
        let mut pw = Self::one(self.trunc);
        for k in 1..=self.trunc {
            pw = pw.mul(&u);
            if pw.is_zero() {
                break;
            }
            let sign = if k % 2 == 1 { 1 } else { -1 };
            out = out.add(&pw.scale(&Rat::new(sign.into(), (k as i64).into())));
        }
        out
    }

    pub fn degree_part(&self, d: usize) -> Self {
        WheelsPolynomial {
            trunc: self.trunc,
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.degree() == d)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    /// The Euler operator: scales each degree-m term by m.
    pub fn euler(&self) -> Self {
        let mut out = Self::zero(self.trunc);
        for (m, c) in &self.terms {
            out.add_term(m.clone(), c * rat(m.degree() as i64));
        }
        out
    }

    /// The reduction D_A = 0, w_k w_l = w_{k+l}: a power series in x with
    /// w_k identified with x^k.
    pub fn reduced_series(&self) -> PowerSeries {
        let mut s = PowerSeries::zero(self.trunc);
        for (m, c) in &self.terms {
            if m.d_a > 0 {
                continue;
            }
            s.c[m.degree()] += c.clone();
        }
        s
    }

    /// Deterministic JSON object {"DA^a w2^m2 ...": "p/q"}.
    pub fn to_json(&self) -> serde_json::Value {
        let mut map = serde_json::Map::new();
        for (m, c) in &self.terms {
            map.insert(m.to_string(), serde_json::Value::String(fmt_rat(c)));
        }
        serde_json::Value::Object(map)
    }

    pub fn from_json(trunc: usize, v: &serde_json::Value) -> Result<Self, ArrowError> {
        let mut out = Self::zero(trunc);
        let obj = v.as_object().ok_or_else(|| ArrowError::BadToken {
            token: "expected JSON object".into(),
        })?;
        for (k, val) in obj {
            let m =
                WheelMonomial::parse(k).ok_or_else(|| ArrowError::BadToken { token: k.clone() })?;
            let s = val.as_str().ok_or_else(|| ArrowError::BadToken {
                token: val.to_string(),
            })?;
            let c = parse_rat(s).ok_or_else(|| ArrowError::BadToken { token: s.into() })?;
            out.add_term(m, c);
        }
        Ok(out)
    }
}

/// All monomials of exact degree d (partitions of d into parts from
/// {1} and {2, 3, ...}, the 1-parts going to D_A).
pub fn sw_monomials(degree: usize) -> Vec<WheelMonomial> {
    let mut out = Vec::new();
    fn rec(
        remaining: usize,
        min_part: usize,
        cur: &mut BTreeMap<usize, usize>,
        out: &mut Vec<WheelMonomial>,
        d_a_total: usize,
    ) {
        if remaining == 0 {
            out.push(WheelMonomial {
                d_a: d_a_total,
                wheels: cur.clone(),
            });
            return;
        }
        for part in min_part..=remaining {
            if part < 2 {
                continue;
            }
            *cur.entry(part).or_insert(0) += 1;
            rec(remaining - part, part, cur, out, d_a_total);
            let e = cur.get_mut(&part).unwrap();
            *e -= 1;
            if *e == 0 {
                cur.remove(&part);
            }
        }
    }
    for d_a in 0..=degree {
        rec(degree - d_a, 2, &mut BTreeMap::new(), &mut out, d_a);
    }
    out.sort();
    out
}

/// Realizes a monomial as a pure-arrow combination: D_L^a followed by the
/// wheel combinations in ascending size, concatenated along the skeleton.
pub fn wheel_monomial_vector(
    m: &WheelMonomial,
    trunc: usize,
) -> Result<ArrowCombination, ArrowError> {
    let mut acc = ArrowCombination::one(Skeleton::LongLine, trunc);
    for _ in 0..m.d_a {
        acc = acc.concat(&d_a_element().with_trunc(trunc));
    }
    for (&k, &mult) in &m.wheels {
        let w = wheel_element(k, ElimOrder::Leftmost)?.with_trunc(trunc);
        for _ in 0..mult {
            acc = acc.concat(&w);
        }
    }
    Ok(acc)
}

/// Expresses a long-line combination in the monomial basis of the s-w
/// quotient, degree by degree up to `max_deg`.
pub fn wheels_coordinates(
    e: &ArrowCombination,
    max_deg: usize,
    caps: &EnumerationCaps,
) -> Result<WheelsPolynomial, ArrowError> {
    assert_eq!(e.skeleton, Skeleton::LongLine);
    let mut out = WheelsPolynomial::zero(max_deg);
    for d in 0..=max_deg {
        let part = e.degree_part(d);
        if d == 0 {
            let c = part
                .terms
                .get(&super::ArrowDiagram::empty(Skeleton::LongLine))
                .cloned()
                .unwrap_or_else(|| rat(0));
            out.add_term(WheelMonomial::one(), c);
            continue;
        }
        if part.is_zero() {
            continue;
        }
        let q = QuotientSpace::new(Skeleton::LongLine, SpaceKind::Sw, d, caps)?;
        let monomials = sw_monomials(d);
        // residuals of the monomial vectors span the quotient
        let mut residuals: Vec<SparseVec> = Vec::new();
        for m in &monomials {
            let vec = wheel_monomial_vector(m, d)?;
            residuals.push(q.reduce(&vec)?);
        }
        // re-index residual columns compactly
        let mut cols: BTreeMap<usize, usize> = BTreeMap::new();
        for r in &residuals {
            for &c in r.keys() {
                let next = cols.len();
                cols.entry(c).or_insert(next);
            }
        }
        let compact = |v: &SparseVec| -> SparseVec {
            v.iter()
                .filter_map(|(c, x)| cols.get(c).map(|&cc| (cc, x.clone())))
                .collect()
        };
        let mut basis2 = RowSpace::with_tracking(cols.len().max(1));
        for r in &residuals {
            basis2.insert(&compact(r));
        }
        let target = q.reduce(&part)?;
        if target.keys().any(|c| !cols.contains_key(c)) {
            return Err(ArrowError::NotInSpan);
        }
        let coeffs = basis2
            .express(&compact(&target))
            .ok_or(ArrowError::NotInSpan)?;
        for (m, c) in monomials.iter().zip(coeffs) {
            out.add_term(m.clone(), c);
        }
    }
    Ok(out)
}
