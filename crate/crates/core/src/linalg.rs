//! Sparse exact and modular linear algebra over the rationals.
//!
//! Everything downstream (quotient dimensions, span membership, wheels
//! coordinates) runs through the two rank engines here: a fraction-free
//! Bareiss-style elimination over the integers for exact mode, and a
//! two-prime certified elimination over random prime fields for the fast
//! mode used by the dimension tables.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rand::Rng;
use std::collections::BTreeMap;
use thiserror::Error;

/// Arbitrary-precision rational, always stored reduced with positive denominator.
pub type Rat = num_rational::BigRational;

/// Sparse vector keyed by column index; no zero entries are stored.
pub type SparseVec = BTreeMap<usize, Rat>;

pub fn rat(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

pub fn frac(p: i64, q: i64) -> Rat {
    Rat::new(BigInt::from(p), BigInt::from(q))
}

/// Parses "p/q" or "p" into a rational.
pub fn parse_rat(s: &str) -> Option<Rat> {
    let s = s.trim();
    match s.split_once('/') {
        Some((p, q)) => {
            let p: BigInt = p.trim().parse().ok()?;
            let q: BigInt = q.trim().parse().ok()?;
            if q.is_zero() {
                return None;
            }
            Some(Rat::new(p, q))
        }
        None => Some(Rat::from_integer(s.parse().ok()?)),
    }
}

/// Renders a rational as "p" or "p/q".
pub fn fmt_rat(r: &Rat) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn sparse_from(entries: &[(usize, i64)]) -> SparseVec {
    let mut v = SparseVec::new();
    for &(c, x) in entries {
        add_entry(&mut v, c, rat(x));
    }
    v
}

pub fn add_entry(v: &mut SparseVec, col: usize, x: Rat) {
    if x.is_zero() {
        return;
    }
    match v.entry(col) {
        std::collections::btree_map::Entry::Vacant(e) => {
            e.insert(x);
        }
        std::collections::btree_map::Entry::Occupied(mut e) => {
            let sum = e.get().clone() + x;
            if sum.is_zero() {
                e.remove();
            } else {
                *e.get_mut() = sum;
            }
        }
    }
}

#[derive(Debug, Error)]
pub enum LinalgError {
    #[error("entry at ({row}, {col}) outside a {n_rows}x{n_cols} matrix")]
    IndexOutOfRange {
        row: usize,
        col: usize,
        n_rows: usize,
        n_cols: usize,
    },
    #[error("relation vector has length {got}, ambient dimension is {ambient}")]
    LengthMismatch { got: usize, ambient: usize },
    #[error("modular ranks disagreed {attempts} times; rank indeterminate")]
    IndeterminateRank { attempts: usize },
}

/// How ranks are computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RankMode {
    /// Fraction-free elimination over the integers; always exact.
    ExactRational,
    /// Gaussian elimination modulo two independently chosen random primes
    /// greater than 2^30; the value is returned only if both agree.
    #[default]
    ModularCertified,
}

/// A sparse matrix stored row-wise.
#[derive(Debug, Clone, Default)]
pub struct SparseMatrix {
    pub n_rows: usize,
    pub n_cols: usize,
    pub rows: Vec<SparseVec>,
}

impl SparseMatrix {
    pub fn new(n_cols: usize) -> Self {
        SparseMatrix {
            n_rows: 0,
            n_cols,
            rows: Vec::new(),
        }
    }

    pub fn from_rows(n_cols: usize, rows: Vec<SparseVec>) -> Result<Self, LinalgError> {
        for (i, r) in rows.iter().enumerate() {
            if let Some((&c, _)) = r.iter().next_back() {
                if c >= n_cols {
                    return Err(LinalgError::IndexOutOfRange {
                        row: i,
                        col: c,
                        n_rows: rows.len(),
                        n_cols,
                    });
                }
            }
        }
        Ok(SparseMatrix {
            n_rows: rows.len(),
            n_cols,
            rows,
        })
    }

    pub fn push_row(&mut self, row: SparseVec) {
        debug_assert!(row.keys().all(|&c| c < self.n_cols));
        self.rows.push(row);
        self.n_rows += 1;
    }

    pub fn identity(n: usize) -> Self {
        let rows = (0..n).map(|i| sparse_from(&[(i, 1)])).collect();
        SparseMatrix {
            n_rows: n,
            n_cols: n,
            rows,
        }
    }

    pub fn transpose(&self) -> Self {
        let mut rows = vec![SparseVec::new(); self.n_cols];
        for (i, r) in self.rows.iter().enumerate() {
            for (&c, x) in r {
                rows[c].insert(i, x.clone());
            }
        }
        SparseMatrix {
            n_rows: self.n_cols,
            n_cols: self.n_rows,
            rows,
        }
    }

    /// Rank of the matrix over the rationals.
    pub fn rank(&self, mode: RankMode) -> Result<usize, LinalgError> {
        match mode {
            RankMode::ExactRational => Ok(rank_exact(&self.rows)),
            RankMode::ModularCertified => rank_modular_certified(&self.rows, 3),
        }
    }
}

/// ambient - rank(relations); every relation vector must have length `ambient`.
pub fn quotient_dim(
    ambient: usize,
    relations: &[SparseVec],
    mode: RankMode,
) -> Result<usize, LinalgError> {
    for r in relations {
        if let Some((&c, _)) = r.iter().next_back() {
            if c >= ambient {
                return Err(LinalgError::LengthMismatch {
                    got: c + 1,
                    ambient,
                });
            }
        }
    }
    let rk = match mode {
        RankMode::ExactRational => rank_exact(relations),
        RankMode::ModularCertified => rank_modular_certified(relations, 3)?,
    };
    Ok(ambient - rk)
}

// ---------------------------------------------------------------------------
// exact fraction-free elimination

type IntVec = BTreeMap<usize, BigInt>;

fn clear_denominators(row: &SparseVec) -> IntVec {
    let mut l = BigInt::one();
    for x in row.values() {
        l = l.lcm(x.denom());
    }
    row.iter()
        .map(|(&c, x)| (c, x.numer() * (&l / x.denom())))
        .collect()
}

/// Fraction-free (Bareiss/Montante-style) elimination. Pivot rows are chosen
/// by a least-entries heuristic; the one-step update keeps every intermediate
/// entry an exact minor of the input, so the division is always exact.
fn rank_exact(rows: &[SparseVec]) -> usize {
    let mut act: Vec<IntVec> = rows
        .iter()
        .map(clear_denominators)
        .filter(|r| !r.is_empty())
        .collect();
    let mut rank = 0usize;
    let mut prev = BigInt::one();
    while !act.is_empty() {
        let pi = (0..act.len()).min_by_key(|&i| act[i].len()).unwrap();
        let pivot_row = act.swap_remove(pi);
        let (&pcol, pval) = pivot_row.iter().next().unwrap();
        let pval = pval.clone();
        rank += 1;
        let mut next: Vec<IntVec> = Vec::with_capacity(act.len());
        for row in act.into_iter() {
            let out = match row.get(&pcol) {
                None => {
                    // still rescale so everything stays on the same minor level
                    let mut m: IntVec = BTreeMap::new();
                    for (c, x) in row {
                        let v = x * &pval / &prev;
                        if !v.is_zero() {
                            m.insert(c, v);
                        }
                    }
                    m
                }
                Some(f) => {
                    let f = f.clone();
                    let mut m: IntVec = BTreeMap::new();
                    for &c in row.keys().chain(pivot_row.keys()) {
                        if m.contains_key(&c) || c == pcol {
                            continue;
                        }
                        let a = row.get(&c).cloned().unwrap_or_else(BigInt::zero);
                        let b = pivot_row.get(&c).cloned().unwrap_or_else(BigInt::zero);
                        let v = (a * &pval - b * &f) / &prev;
                        if !v.is_zero() {
                            m.insert(c, v);
                        }
                    }
                    m
                }
            };
            if !out.is_empty() {
                next.push(out);
            }
        }
        act = next;
        prev = pval;
    }
    rank
}

// ---------------------------------------------------------------------------
// modular elimination

const MOD_BASE: u64 = 1 << 30;

fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1u64;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, b, p);
        }
        b = mul_mod(b, b, p);
        e >>= 1;
    }
    acc
}

fn inv_mod(a: u64, p: u64) -> u64 {
    pow_mod(a, p - 2, p)
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for q in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31] {
        if n == q {
            return true;
        }
        if n.is_multiple_of(q) {
            return false;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    // deterministic for n < 3.2e18 with these bases
    'outer: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if a % n == 0 {
            continue;
        }
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 0..s - 1 {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'outer;
            }
        }
        return false;
    }
    true
}

/// A uniformly random prime in (2^30, 2^31).
pub fn random_prime<R: Rng>(rng: &mut R) -> u64 {
    loop {
        let c = rng.gen_range(MOD_BASE + 1..2 * MOD_BASE) | 1;
        if is_prime(c) {
            return c;
        }
    }
}

fn reduce_mod(x: &Rat, p: u64) -> u64 {
    let pb = BigInt::from(p);
    let num = ((x.numer() % &pb) + &pb) % &pb;
    let den = ((x.denom() % &pb) + &pb) % &pb;
    let n = num.to_u64().unwrap();
    let d = den.to_u64().unwrap();
    // denominators are coprime to a random 31-bit prime in practice; if not,
    // the caller retries with a fresh prime
    mul_mod(n, inv_mod(d, p), p)
}

/// Forward-only insertion echelon: each incoming row is reduced against the
/// pivots found so far (shortest rows first, which keeps fill-in modest) and
/// becomes a new pivot if anything survives.
fn rank_mod_p(rows: &[SparseVec], p: u64) -> usize {
    let mut work: Vec<BTreeMap<usize, u64>> = rows
        .iter()
        .map(|r| {
            r.iter()
                .filter_map(|(&c, x)| {
                    let v = reduce_mod(x, p);
                    (v != 0).then_some((c, v))
                })
                .collect::<BTreeMap<_, _>>()
        })
        .filter(|r: &BTreeMap<usize, u64>| !r.is_empty())
        .collect();
    work.sort_by_key(|r| r.len());
    // pivot column -> normalized pivot row
    let mut pivots: BTreeMap<usize, BTreeMap<usize, u64>> = BTreeMap::new();
    for mut row in work {
        while let Some((&col, &val)) = row.iter().next() {
            let Some(prow) = pivots.get(&col) else {
                let vinv = inv_mod(val, p);
                let norm: BTreeMap<usize, u64> = row
                    .iter()
                    .map(|(&c, &x)| (c, mul_mod(x, vinv, p)))
                    .collect();
                pivots.insert(col, norm);
                break;
            };
            // eliminate the leading entry
            for (&c, &x) in prow {
                let cur = row.get(&c).copied().unwrap_or(0);
                let nxt = (cur + p - mul_mod(val, x, p)) % p;
                if nxt == 0 {
                    row.remove(&c);
                } else {
                    row.insert(c, nxt);
                }
            }
        }
    }
    pivots.len()
}

fn rank_modular_certified(rows: &[SparseVec], retries: usize) -> Result<usize, LinalgError> {
    let mut rng = rand::thread_rng();
    for _ in 0..retries {
        let p1 = random_prime(&mut rng);
        let mut p2 = random_prime(&mut rng);
        while p2 == p1 {
            p2 = random_prime(&mut rng);
        }
        let r1 = rank_mod_p(rows, p1);
        let r2 = rank_mod_p(rows, p2);
        if r1 == r2 {
            return Ok(r1);
        }
    }
    Err(LinalgError::IndeterminateRank { attempts: retries })
}

// ---------------------------------------------------------------------------
// incremental echelon spaces

/// An incrementally built row space over the rationals, kept in reduced
/// echelon form. Optionally each row remembers its expression in terms of the
/// vectors inserted so far, which is what `solve_in_span` reads off.
#[derive(Debug, Clone)]
pub struct RowSpace {
    n_cols: usize,
    track: bool,
    n_inserted: usize,
    /// (pivot column, row with pivot normalized to 1, combination over inputs)
    rows: Vec<(usize, SparseVec, SparseVec)>,
}

impl RowSpace {
    pub fn new(n_cols: usize) -> Self {
        RowSpace {
            n_cols,
            track: false,
            n_inserted: 0,
            rows: Vec::new(),
        }
    }

    pub fn with_tracking(n_cols: usize) -> Self {
        RowSpace {
            n_cols,
            track: true,
            n_inserted: 0,
            rows: Vec::new(),
        }
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Columns that carry no pivot, i.e. a basis of the quotient.
    pub fn free_columns(&self) -> Vec<usize> {
        let pivots: std::collections::BTreeSet<usize> =
            self.rows.iter().map(|(p, _, _)| *p).collect();
        (0..self.n_cols).filter(|c| !pivots.contains(c)).collect()
    }

    fn reduce_inner(&self, v: &SparseVec) -> (SparseVec, SparseVec) {
        let mut v = v.clone();
        let mut combo = SparseVec::new();
        for (pcol, row, rc) in &self.rows {
            if let Some(f) = v.get(pcol).cloned() {
                for (&c, x) in row {
                    add_entry(&mut v, c, -(&f * x));
                }
                if self.track {
                    for (&c, x) in rc {
                        add_entry(&mut combo, c, &f * x);
                    }
                }
            }
        }
        (v, combo)
    }

    /// Residual of `v` modulo the span.
    pub fn reduce(&self, v: &SparseVec) -> SparseVec {
        self.reduce_inner(v).0
    }

    pub fn contains(&self, v: &SparseVec) -> bool {
        self.reduce(v).is_empty()
    }

    /// Inserts a vector; returns true when the rank grew.
    pub fn insert(&mut self, v: &SparseVec) -> bool {
        let idx = self.n_inserted;
        self.n_inserted += 1;
        let (mut red, mut combo) = self.reduce_inner(v);
        if self.track {
            // combo so far expresses (v - red); flip to express red in inputs
            let mut c = SparseVec::new();
            add_entry(&mut c, idx, rat(1));
            for (&k, x) in &combo {
                add_entry(&mut c, k, -x.clone());
            }
            combo = c;
        }
        let Some((&pcol, pval)) = red.iter().next() else {
            return false;
        };
        let pinv = pval.clone().recip();
        for x in red.values_mut() {
            *x *= &pinv;
        }
        if self.track {
            for x in combo.values_mut() {
                *x *= &pinv;
            }
        }
        // back-substitute into existing rows to keep the form reduced
        for (_, row, rc) in self.rows.iter_mut() {
            if let Some(f) = row.get(&pcol).cloned() {
                for (&c, x) in &red {
                    add_entry(row, c, -(&f * x));
                }
                if self.track {
                    for (&c, x) in &combo {
                        add_entry(rc, c, -(&f * x));
                    }
                }
            }
        }
        self.rows.push((pcol, red, combo));
        self.rows.sort_by_key(|(p, _, _)| *p);
        true
    }

    /// If `v` lies in the span, the coefficients over the inserted vectors.
    /// Requires tracking.
    pub fn express(&self, v: &SparseVec) -> Option<Vec<Rat>> {
        assert!(self.track, "RowSpace::express requires with_tracking");
        let (red, combo) = self.reduce_inner(v);
        if !red.is_empty() {
            return None;
        }
        let mut out = vec![rat(0); self.n_inserted];
        for (&k, x) in &combo {
            out[k] = x.clone();
        }
        Some(out)
    }
}

/// Coefficients expressing `target` as a linear combination of `relations`,
/// if it lies in their span.
pub fn solve_in_span(target: &SparseVec, relations: &[SparseVec]) -> Option<Vec<Rat>> {
    let n_cols = relations
        .iter()
        .chain(std::iter::once(target))
        .filter_map(|r| r.keys().next_back().map(|c| c + 1))
        .max()
        .unwrap_or(0);
    let mut space = RowSpace::with_tracking(n_cols);
    for r in relations {
        space.insert(r);
    }
    let mut out = space.express(target)?;
    out.truncate(relations.len());
    out.resize(relations.len(), rat(0));
    Some(out)
}

/// Echelon space over a fixed prime field, for fast membership and
/// quotient-coordinate computations.
#[derive(Debug, Clone)]
pub struct ModRowSpace {
    pub p: u64,
    n_cols: usize,
    rows: Vec<(usize, BTreeMap<usize, u64>)>,
}

impl ModRowSpace {
    pub fn new(n_cols: usize, p: u64) -> Self {
        ModRowSpace {
            p,
            n_cols,
            rows: Vec::new(),
        }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn free_columns(&self) -> Vec<usize> {
        let pivots: std::collections::BTreeSet<usize> = self.rows.iter().map(|(p, _)| *p).collect();
        (0..self.n_cols).filter(|c| !pivots.contains(c)).collect()
    }

    pub fn reduce_rat(&self, v: &SparseVec) -> BTreeMap<usize, u64> {
        let w = v
            .iter()
            .filter_map(|(&c, x)| {
                let m = reduce_mod(x, self.p);
                (m != 0).then_some((c, m))
            })
            .collect();
        self.reduce(w)
    }

    pub fn reduce(&self, mut v: BTreeMap<usize, u64>) -> BTreeMap<usize, u64> {
        let p = self.p;
        for (pcol, row) in &self.rows {
            if let Some(&f) = v.get(pcol) {
                for (&c, &x) in row {
                    let cur = v.get(&c).copied().unwrap_or(0);
                    let nxt = (cur + p - mul_mod(f, x, p)) % p;
                    if nxt == 0 {
                        v.remove(&c);
                    } else {
                        v.insert(c, nxt);
                    }
                }
            }
        }
        v
    }

    pub fn insert_rat(&mut self, v: &SparseVec) -> bool {
        let mut red = self.reduce_rat(v);
        let Some((&pcol, &pval)) = red.iter().next() else {
            return false;
        };
        let pinv = inv_mod(pval, self.p);
        for x in red.values_mut() {
            *x = mul_mod(*x, pinv, self.p);
        }
        for (_, row) in self.rows.iter_mut() {
            if let Some(&f) = row.get(&pcol) {
                let mut upd = Vec::new();
                for (&c, &x) in &red {
                    let cur = row.get(&c).copied().unwrap_or(0);
                    upd.push((c, (cur + self.p - mul_mod(f, x, self.p)) % self.p));
                }
                for (c, v) in upd {
                    if v == 0 {
                        row.remove(&c);
                    } else {
                        row.insert(c, v);
                    }
                }
            }
        }
        self.rows.push((pcol, red));
        self.rows.sort_by_key(|(p, _)| *p);
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_matrix_has_rank_zero() {
        let m = SparseMatrix::from_rows(0, vec![]).unwrap();
        assert_eq!(m.rank(RankMode::ExactRational).unwrap(), 0);
        assert_eq!(m.rank(RankMode::ModularCertified).unwrap(), 0);
    }

    #[test]
    fn identity_rank() {
        let m = SparseMatrix::identity(3);
        assert_eq!(m.rank(RankMode::ExactRational).unwrap(), 3);
        assert_eq!(m.rank(RankMode::ModularCertified).unwrap(), 3);
    }

    #[test]
    fn quotient_dim_no_relations() {
        assert_eq!(quotient_dim(5, &[], RankMode::ExactRational).unwrap(), 5);
    }

    #[test]
    fn quotient_dim_full_rank_random_rows() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let n = 8;
        loop {
            let rows: Vec<SparseVec> = (0..n)
                .map(|_| {
                    (0..n)
                        .filter_map(|c| {
                            let x = rng.gen_range(-4i64..=4);
                            (x != 0).then(|| (c, rat(x)))
                        })
                        .collect()
                })
                .collect();
            if rank_exact(&rows) == n {
                assert_eq!(quotient_dim(n, &rows, RankMode::ExactRational).unwrap(), 0);
                assert_eq!(
                    quotient_dim(n, &rows, RankMode::ModularCertified).unwrap(),
                    0
                );
                break;
            }
        }
    }

    #[test]
    fn rank_equals_transpose_rank_on_random_matrices() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
        for _ in 0..20 {
            let rows: Vec<SparseVec> = (0..6)
                .map(|_| {
                    (0..9)
                        .filter_map(|c| {
                            let x = rng.gen_range(-3i64..=3);
                            (x != 0 && rng.gen_bool(0.5)).then(|| (c, frac(x, 1 + (c as i64))))
                        })
                        .collect()
                })
                .collect();
            let m = SparseMatrix::from_rows(9, rows).unwrap();
            let a = m.rank(RankMode::ExactRational).unwrap();
            let b = m.transpose().rank(RankMode::ExactRational).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn modular_matches_exact_on_random_rational_matrices() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..10 {
            let rows: Vec<SparseVec> = (0..10)
                .map(|_| {
                    (0..10)
                        .filter_map(|c| {
                            let p = rng.gen_range(-9i64..=9);
                            let q = rng.gen_range(1i64..=7);
                            (p != 0).then(|| (c, frac(p, q)))
                        })
                        .collect()
                })
                .collect();
            let m = SparseMatrix::from_rows(10, rows).unwrap();
            assert_eq!(
                m.rank(RankMode::ExactRational).unwrap(),
                m.rank(RankMode::ModularCertified).unwrap()
            );
        }
    }

    #[test]
    fn solve_in_span_trivial_cases() {
        let rels = vec![sparse_from(&[(0, 1), (1, -1)]), sparse_from(&[(1, 2)])];
        // zero target: empty combination
        let c = solve_in_span(&SparseVec::new(), &rels).unwrap();
        assert!(c.iter().all(|x| x.is_zero()));
        // first relation itself
        let c = solve_in_span(&rels[0], &rels).unwrap();
        let mut recon = SparseVec::new();
        for (i, coef) in c.iter().enumerate() {
            for (&col, x) in &rels[i] {
                add_entry(&mut recon, col, coef * x);
            }
        }
        assert_eq!(recon, rels[0]);
        // something outside the span
        assert!(solve_in_span(&sparse_from(&[(2, 1)]), &rels).is_none());
    }

    #[test]
    fn membership_iff_rank_unchanged() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let rels: Vec<SparseVec> = (0..4)
                .map(|_| {
                    (0..6)
                        .filter_map(|c| {
                            let x = rng.gen_range(-2i64..=2);
                            (x != 0).then(|| (c, rat(x)))
                        })
                        .collect()
                })
                .collect();
            let t: SparseVec = (0..6)
                .filter_map(|c| {
                    let x = rng.gen_range(-2i64..=2);
                    (x != 0).then(|| (c, rat(x)))
                })
                .collect();
            let r0 = rank_exact(&rels);
            let mut with = rels.clone();
            with.push(t.clone());
            let r1 = rank_exact(&with);
            assert_eq!(solve_in_span(&t, &rels).is_some(), r0 == r1);
        }
    }
}
