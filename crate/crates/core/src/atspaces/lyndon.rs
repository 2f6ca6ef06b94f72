//! Lyndon words, the free associative algebra of words, and free Lie
//! elements on the Lyndon basis.

use super::AtError;
use crate::linalg::{rat, Rat};
use num_traits::{One, Zero};
use std::collections::BTreeMap;
use std::sync::{Arc, Mutex, OnceLock};

/// All words of length 1..=max_deg over n letters.
pub fn all_words(n: usize, max_deg: usize) -> Vec<Vec<u8>> {
    let mut out = Vec::new();
    let mut cur = vec![vec![]];
    for _ in 1..=max_deg {
        let mut next = Vec::new();
        for w in &cur {
            for g in 0..n as u8 {
                let mut v = w.clone();
                v.push(g);
                next.push(v);
            }
        }
        out.extend(next.iter().cloned());
        cur = next;
    }
    out
}

pub fn is_lyndon(w: &[u8]) -> bool {
    if w.is_empty() {
        return false;
    }
    for k in 1..w.len() {
        if w[k..] <= *w {
            return false;
        }
    }
    true
}

/// Lyndon words over n letters, by degree then lexicographically (Duval).
pub fn lyndon_words(n: usize, max_deg: usize) -> Vec<Vec<u8>> {
    let mut out: Vec<Vec<u8>> = Vec::new();
    if n == 0 || max_deg == 0 {
        return out;
    }
    let mut w = vec![0u8];
    loop {
        if w.len() <= max_deg {
            out.push(w.clone());
        }
        let m = w.len();
        let mut t = w.clone();
        while t.len() < max_deg {
            t.push(t[t.len() - m]);
        }
        while let Some(&last) = t.last() {
            if last as usize == n - 1 {
                t.pop();
            } else {
                break;
            }
        }
        if t.is_empty() {
            break;
        }
        *t.last_mut().unwrap() += 1;
        w = t;
    }
    out.sort_by_key(|w| (w.len(), w.clone()));
    out
}

/// Standard factorization of a Lyndon word of length >= 2: w = uv with v the
/// longest proper Lyndon suffix.
fn std_factorization(w: &[u8]) -> (Vec<u8>, Vec<u8>) {
    debug_assert!(w.len() >= 2);
    for k in 1..w.len() {
        if is_lyndon(&w[k..]) {
            return (w[..k].to_vec(), w[k..].to_vec());
        }
    }
    unreachable!("every Lyndon word of length >= 2 factors")
}

// ---------------------------------------------------------------------------

/// An element of the free associative algebra on n generators, truncated in
/// degree. Keys are words over 0-based generators; the empty word is the unit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AssocElement {
    pub n: usize,
    pub trunc: usize,
    pub terms: BTreeMap<Vec<u8>, Rat>,
}

impl AssocElement {
    pub fn zero(n: usize, trunc: usize) -> Self {
        AssocElement {
            n,
            trunc,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(n: usize, trunc: usize) -> Self {
        let mut e = Self::zero(n, trunc);
        e.add_term(vec![], rat(1));
        e
    }

    pub fn gen(n: usize, g: u8, trunc: usize) -> Self {
        let mut e = Self::zero(n, trunc);
        e.add_term(vec![g], rat(1));
        e
    }

    pub fn add_term(&mut self, w: Vec<u8>, c: Rat) {
        if c.is_zero() || w.len() > self.trunc {
            return;
        }
        let e = self.terms.entry(w).or_insert_with(|| rat(0));
        *e += c;
        if e.is_zero() {
            let k = self
                .terms
                .iter()
                .find(|(_, v)| v.is_zero())
                .map(|(k, _)| k.clone());
            if let Some(k) = k {
                self.terms.remove(&k);
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, other: &Self) -> Self {
        let trunc = self.trunc.min(other.trunc);
        let mut out = AssocElement::zero(self.n, trunc);
        for (w, c) in self.terms.iter().chain(other.terms.iter()) {
            out.add_term(w.clone(), c.clone());
        }
        out
    }

    pub fn scale(&self, c: &Rat) -> Self {
        if c.is_zero() {
            return AssocElement::zero(self.n, self.trunc);
        }
        AssocElement {
            n: self.n,
            trunc: self.trunc,
            terms: self.terms.iter().map(|(w, x)| (w.clone(), x * c)).collect(),
        }
    }

    pub fn neg(&self) -> Self {
        self.scale(&rat(-1))
    }

    pub fn mul(&self, other: &Self) -> Self {
        let trunc = self.trunc.min(other.trunc);
        let mut out = AssocElement::zero(self.n, trunc);
        for (w1, c1) in &self.terms {
            if w1.len() > trunc {
                continue;
            }
            for (w2, c2) in &other.terms {
                if w1.len() + w2.len() > trunc {
                    continue;
                }
                let mut w = w1.clone();
                w.extend_from_slice(w2);
                out.add_term(w, c1 * c2);
            }
        }
        out
    }

    pub fn commutator(&self, other: &Self) -> Self {
        self.mul(other).add(&other.mul(self).neg())
    }

    pub fn degree_part(&self, d: usize) -> Self {
        AssocElement {
            n: self.n,
            trunc: self.trunc,
            terms: self
                .terms
                .iter()
                .filter(|(w, _)| w.len() == d)
                .map(|(w, c)| (w.clone(), c.clone()))
                .collect(),
        }
    }

    pub fn min_degree(&self) -> Option<usize> {
        self.terms.keys().map(|w| w.len()).min()
    }

    /// Relabels generators through `perm` (new letter = perm[old letter]).
    pub fn relabel(&self, perm: &[u8]) -> Self {
        let mut out = AssocElement::zero(self.n, self.trunc);
        for (w, c) in &self.terms {
            out.add_term(w.iter().map(|&g| perm[g as usize]).collect(), c.clone());
        }
        out
    }
}

/// exp of an element with no constant term.
pub fn assoc_exp(a: &AssocElement) -> AssocElement {
    debug_assert!(a.terms.keys().all(|w| !w.is_empty()));
    let mut out = AssocElement::one(a.n, a.trunc);
    let mut pw = AssocElement::one(a.n, a.trunc);
    let mut fact = rat(1);
    for k in 1..=a.trunc {
        pw = pw.mul(a);
        if pw.is_zero() {
            break;
        }
        fact *= rat(k as i64);
        out = out.add(&pw.scale(&fact.clone().recip()));
    }
    out
}

/// log of an element with constant term 1.
pub fn assoc_log(a: &AssocElement) -> Result<AssocElement, AtError> {
    if a.terms.get(&vec![]).map(|c| c.is_one()) != Some(true) {
        return Err(AtError::BadConstantTerm);
    }
    let mut u = a.clone();
    u.terms.remove(&vec![]);
    let mut out = AssocElement::zero(a.n, a.trunc);
    let mut pw = AssocElement::one(a.n, a.trunc);
    for k in 1..=a.trunc {
        pw = pw.mul(&u);
        if pw.is_zero() {
            break;
        }
        let sign = if k % 2 == 1 { 1 } else { -1 };
        out = out.add(&pw.scale(&Rat::new(sign.into(), (k as i64).into())));
    }
    Ok(out)
}

/// The associative expansion of the standard Lyndon bracketing of `w`.
pub fn lyndon_bracket_assoc(n: usize, w: &[u8], trunc: usize) -> AssocElement {
    if w.len() == 1 {
        return AssocElement::gen(n, w[0], trunc);
    }
    let (u, v) = std_factorization(w);
    let a = lyndon_bracket_assoc(n, &u, trunc);
    let b = lyndon_bracket_assoc(n, &v, trunc);
    a.commutator(&b)
}

// ---------------------------------------------------------------------------

/// A free Lie element on the Lyndon basis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LieElement {
    pub n: usize,
    pub trunc: usize,
    pub coeffs: BTreeMap<Vec<u8>, Rat>,
}

impl LieElement {
    pub fn zero(n: usize, trunc: usize) -> Self {
        LieElement {
            n,
            trunc,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn gen(n: usize, g: u8, trunc: usize) -> Self {
        let mut e = Self::zero(n, trunc);
        e.add_term(vec![g], rat(1));
        e
    }

    pub fn add_term(&mut self, w: Vec<u8>, c: Rat) {
        debug_assert!(is_lyndon(&w), "Lie keys must be Lyndon words");
        if c.is_zero() || w.len() > self.trunc {
            return;
        }
        let e = self.coeffs.entry(w.clone()).or_insert_with(|| rat(0));
        *e += c;
        if e.is_zero() {
            self.coeffs.remove(&w);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn add(&self, other: &Self) -> Self {
        let trunc = self.trunc.min(other.trunc);
        let mut out = LieElement::zero(self.n, trunc);
        for (w, c) in self.coeffs.iter().chain(other.coeffs.iter()) {
            out.add_term(w.clone(), c.clone());
        }
        out
    }

    pub fn scale(&self, c: &Rat) -> Self {
        if c.is_zero() {
            return LieElement::zero(self.n, self.trunc);
        }
        LieElement {
            n: self.n,
            trunc: self.trunc,
            coeffs: self
                .coeffs
                .iter()
                .map(|(w, x)| (w.clone(), x * c))
                .collect(),
        }
    }

    pub fn neg(&self) -> Self {
        self.scale(&rat(-1))
    }

    pub fn degree_part(&self, d: usize) -> Self {
        LieElement {
            n: self.n,
            trunc: self.trunc,
            coeffs: self
                .coeffs
                .iter()
                .filter(|(w, _)| w.len() == d)
                .map(|(w, c)| (w.clone(), c.clone()))
                .collect(),
        }
    }

    pub fn max_degree_present(&self) -> Option<usize> {
        self.coeffs.keys().map(|w| w.len()).max()
    }

    /// Embeds into the free associative algebra.
    pub fn to_assoc(&self) -> AssocElement {
        let mut out = AssocElement::zero(self.n, self.trunc);
        for (w, c) in &self.coeffs {
            out = out.add(&lyndon_bracket_assoc(self.n, w, self.trunc).scale(c));
        }
        out
    }

    pub fn bracket(&self, other: &Self) -> Self {
        let trunc = self.trunc.min(other.trunc);
        let comm = self.to_assoc().commutator(&other.to_assoc());
        lie_from_assoc(&comm)
            .expect("commutator of Lie elements is primitive")
            .truncated(trunc)
    }

    pub fn truncated(&self, trunc: usize) -> Self {
        LieElement {
            n: self.n,
            trunc,
            coeffs: self
                .coeffs
                .iter()
                .filter(|(w, _)| w.len() <= trunc)
                .map(|(w, c)| (w.clone(), c.clone()))
                .collect(),
        }
    }

    pub fn relabel(&self, perm: &[u8]) -> Self {
        lie_from_assoc(&self.to_assoc().relabel(perm)).expect("relabeling preserves primitivity")
    }
}

/// Extracts Lyndon-basis coordinates from a primitive associative element by
/// triangularity: the expansion of the bracketing of a Lyndon word w is
/// w plus lexicographically larger words.
pub fn lie_from_assoc(a: &AssocElement) -> Result<LieElement, AtError> {
    let mut out = LieElement::zero(a.n, a.trunc);
    for d in 1..=a.trunc {
        let mut part = a.degree_part(d);
        while let Some((w, c)) = part
            .terms
            .iter()
            .next()
            .map(|(w, c)| (w.clone(), c.clone()))
        {
            if !is_lyndon(&w) {
                return Err(AtError::NotPrimitive {
                    word: format!("{w:?}"),
                });
            }
            let b = lyndon_bracket_assoc(a.n, &w, a.trunc);
            part = part.add(&b.scale(&c).neg());
            out.add_term(w, c);
        }
    }
    Ok(out)
}

/// The Dynkin projection: word x1...xm maps to [...[[x1,x2],x3]...,xm]/m.
/// Acts as the identity on primitives; used as an independent oracle for
/// [`lie_from_assoc`].
pub fn dynkin_project(a: &AssocElement) -> AssocElement {
    let mut out = AssocElement::zero(a.n, a.trunc);
    for (w, c) in &a.terms {
        if w.is_empty() {
            continue;
        }
        let mut acc = AssocElement::gen(a.n, w[0], a.trunc);
        for &g in &w[1..] {
            acc = acc.commutator(&AssocElement::gen(a.n, g, a.trunc));
        }
        out = out.add(&acc.scale(&(c / rat(w.len() as i64))));
    }
    out
}

// ---------------------------------------------------------------------------
// BCH

/// Anything with a graded Lie bracket; used to evaluate the universal BCH
/// series in algebras without a small associative model.
pub trait LieBracket: Clone {
    fn lb_zero(&self) -> Self;
    fn lb_add(&self, other: &Self) -> Self;
    fn lb_scale(&self, c: &Rat) -> Self;
    fn lb_bracket(&self, other: &Self) -> Self;
}

impl LieBracket for LieElement {
    fn lb_zero(&self) -> Self {
        LieElement::zero(self.n, self.trunc)
    }
    fn lb_add(&self, other: &Self) -> Self {
        self.add(other)
    }
    fn lb_scale(&self, c: &Rat) -> Self {
        self.scale(c)
    }
    fn lb_bracket(&self, other: &Self) -> Self {
        self.bracket(other)
    }
}

/// Coefficients of the universal BCH series on the two-letter Lyndon basis.
pub type BchSeries = Arc<Vec<(Vec<u8>, Rat)>>;

/// Universal BCH coefficients to degree N: log(e^x e^y) on the Lyndon basis
/// of the free Lie algebra on two generators. Memoized; safe to share.
pub fn bch_universal(max_deg: usize) -> BchSeries {
    static CACHE: OnceLock<Mutex<BTreeMap<usize, BchSeries>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(BTreeMap::new()));
    {
        let lock = cache.lock().unwrap();
        if let Some(v) = lock.get(&max_deg) {
            return v.clone();
        }
    }
    let x = AssocElement::gen(2, 0, max_deg);
    let y = AssocElement::gen(2, 1, max_deg);
    let prod = assoc_exp(&x).mul(&assoc_exp(&y));
    let log = assoc_log(&prod).expect("product of group-likes has constant term 1");
    let lie = lie_from_assoc(&log).expect("BCH is primitive");
    let v: BchSeries = Arc::new(lie.coeffs.into_iter().collect());
    cache.lock().unwrap().insert(max_deg, v.clone());
    v
}

/// BCH in an arbitrary graded Lie algebra via the universal series.
/// `max_deg` bounds the word length that can contribute.
pub fn bch_generic<L: LieBracket>(p: &L, q: &L, max_deg: usize) -> L {
    let series = bch_universal(max_deg);
    let mut out = p.lb_zero();
    for (w, c) in series.iter() {
        out = out.lb_add(&eval_bracketing(w, p, q).lb_scale(c));
    }
    out
}

fn eval_bracketing<L: LieBracket>(w: &[u8], p: &L, q: &L) -> L {
    if w.len() == 1 {
        return if w[0] == 0 { p.clone() } else { q.clone() };
    }
    let (u, v) = std_factorization(w);
    eval_bracketing(&u, p, q).lb_bracket(&eval_bracketing(&v, p, q))
}

/// BCH of two free Lie elements, truncated at `max_deg`.
pub fn bch(a: &LieElement, b: &LieElement, max_deg: usize) -> LieElement {
    let trunc = max_deg.min(a.trunc).min(b.trunc);
    let prod =
        assoc_exp(&a.truncated(trunc).to_assoc()).mul(&assoc_exp(&b.truncated(trunc).to_assoc()));
    let log = assoc_log(&prod).expect("group-like");
    lie_from_assoc(&log).expect("BCH is primitive")
}
