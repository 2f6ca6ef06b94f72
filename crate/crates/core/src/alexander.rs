//! The determinant formula for the Alexander polynomial of a long w-knot:
//! A(K)(X) = det(I + T(I - X^{-S})) built from the span/sign/direction data
//! of a Gauss diagram, plus exact power-series forms in X = e^x.

use crate::knots::GaussDiagram;
use crate::linalg::{rat, Rat};
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use std::collections::BTreeMap;
use std::fmt;

/// An integer Laurent polynomial in X; no zero coefficients are stored.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LaurentPoly {
    terms: BTreeMap<i64, BigInt>,
}

impl LaurentPoly {
    pub fn zero() -> Self {
        LaurentPoly::default()
    }

    pub fn one() -> Self {
        LaurentPoly::constant(1)
    }

    pub fn constant(c: i64) -> Self {
        let mut p = LaurentPoly::zero();
        p.add_term(0, BigInt::from(c));
        p
    }

    pub fn monomial(exp: i64, c: i64) -> Self {
        let mut p = LaurentPoly::zero();
        p.add_term(exp, BigInt::from(c));
        p
    }

    pub fn add_term(&mut self, exp: i64, c: BigInt) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry(exp).or_insert_with(BigInt::zero);
        *e += c;
        if e.is_zero() {
            self.terms.remove(&exp);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, &BigInt)> {
        self.terms.iter().map(|(&e, c)| (e, c))
    }

    pub fn coeff(&self, exp: i64) -> BigInt {
        self.terms.get(&exp).cloned().unwrap_or_else(BigInt::zero)
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (&e, c) in &other.terms {
            out.add_term(e, c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (&e, c) in &other.terms {
            out.add_term(e, -c.clone());
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = LaurentPoly::zero();
        for (&e1, c1) in &self.terms {
            for (&e2, c2) in &other.terms {
                out.add_term(e1 + e2, c1 * c2);
            }
        }
        out
    }

    pub fn shift(&self, k: i64) -> Self {
        LaurentPoly {
            terms: self
                .terms
                .iter()
                .map(|(&e, c)| (e + k, c.clone()))
                .collect(),
        }
    }

    pub fn min_exp(&self) -> Option<i64> {
        self.terms.keys().next().copied()
    }

    pub fn max_exp(&self) -> Option<i64> {
        self.terms.keys().next_back().copied()
    }

    /// X -> X^{-1}.
    pub fn invert_variable(&self) -> Self {
        LaurentPoly {
            terms: self.terms.iter().map(|(&e, c)| (-e, c.clone())).collect(),
        }
    }

    pub fn eval_at_one(&self) -> BigInt {
        self.terms.values().sum()
    }

    /// Exact division (panics if not exact); both sides ordinary polynomials
    /// after shifting, used by the fraction-free determinant.
    fn div_exact(&self, d: &Self) -> Self {
        if self.is_zero() {
            return LaurentPoly::zero();
        }
        let mut rem = self.clone();
        let mut out = LaurentPoly::zero();
        let dl = d.max_exp().expect("division by zero polynomial");
        let dc = d.coeff(dl);
        while !rem.is_zero() {
            let rl = rem.max_exp().unwrap();
            let rc = rem.coeff(rl);
            let q = &rc / &dc;
            assert!(
                (q.clone() * &dc - &rc).is_zero(),
                "non-exact division in fraction-free elimination"
            );
            let mono = LaurentPoly {
                terms: BTreeMap::from([(rl - dl, q)]),
            };
            rem = rem.sub(&mono.mul(d));
            out = out.add(&mono);
        }
        out
    }

    /// Substitute X = e^x and truncate at degree `n`.
    pub fn eval_exp(&self, n: usize) -> PowerSeries {
        let mut out = PowerSeries::zero(n);
        for (&e, c) in &self.terms {
            let expo = PowerSeries::exp_cx(rat(e), n);
            out = out.add(&expo.scale(&Rat::from_integer(c.clone())));
        }
        out
    }
}

impl fmt::Display for LaurentPoly {
    /// Terms in descending exponent order: "-X^3+4X^2-8X+11-8X^-1+...".
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (&e, c) in self.terms.iter().rev() {
            let neg = c.is_negative();
            let mag = c.magnitude();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else if neg {
                write!(f, "-")?;
            } else {
                write!(f, "+")?;
            }
            first = false;
            let show_coeff = !mag.is_one() || e == 0;
            if show_coeff {
                write!(f, "{mag}")?;
            }
            if e == 1 {
                write!(f, "X")?;
            } else if e != 0 {
                write!(f, "X^{e}")?;
            }
        }
        Ok(())
    }
}

/// A rational power series in x truncated at a fixed degree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PowerSeries {
    /// coefficients of x^0 .. x^n
    pub c: Vec<Rat>,
}

impl PowerSeries {
    pub fn zero(n: usize) -> Self {
        PowerSeries {
            c: vec![rat(0); n + 1],
        }
    }

    pub fn one(n: usize) -> Self {
        let mut s = Self::zero(n);
        s.c[0] = rat(1);
        s
    }

    pub fn x(n: usize) -> Self {
        let mut s = Self::zero(n);
        if n >= 1 {
            s.c[1] = rat(1);
        }
        s
    }

    pub fn trunc(&self) -> usize {
        self.c.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|x| x.is_zero())
    }

    /// exp(a x) truncated.
    pub fn exp_cx(a: Rat, n: usize) -> Self {
        let mut s = Self::zero(n);
        let mut term = rat(1);
        for k in 0..=n {
            if k > 0 {
                term = term * &a / rat(k as i64);
            }
            s.c[k] = term.clone();
        }
        s
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.trunc().min(other.trunc());
        PowerSeries {
            c: (0..=n).map(|k| &self.c[k] + &other.c[k]).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&rat(-1)))
    }

    pub fn scale(&self, a: &Rat) -> Self {
        PowerSeries {
            c: self.c.iter().map(|x| x * a).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let n = self.trunc().min(other.trunc());
        let mut out = Self::zero(n);
        for i in 0..=n {
            if self.c[i].is_zero() {
                continue;
            }
            for j in 0..=n - i {
                if !other.c[j].is_zero() {
                    let p = &self.c[i] * &other.c[j];
                    out.c[i + j] += p;
                }
            }
        }
        out
    }

    /// log of a series with constant term 1.
    pub fn log(&self) -> Self {
        assert!(self.c[0].is_one(), "log needs constant term 1");
        let n = self.trunc();
        let mut u = self.clone();
        u.c[0] = rat(0);
        let mut out = Self::zero(n);
        let mut pw = Self::one(n);
        for k in 1..=n {
            pw = pw.mul(&u);
            if pw.is_zero() {
                break;
            }
            let sign = if k % 2 == 1 { 1 } else { -1 };
            out = out.add(&pw.scale(&Rat::new(sign.into(), (k as i64).into())));
        }
        out
    }

    /// Multiplicative inverse of a series with constant term 1.
    pub fn recip(&self) -> Self {
        assert!(self.c[0].is_one(), "recip needs constant term 1");
        let n = self.trunc();
        let mut u = self.clone();
        u.c[0] = rat(0);
        let mut out = Self::one(n);
        let mut pw = Self::one(n);
        for k in 1..=n {
            pw = pw.mul(&u);
            if pw.is_zero() {
                break;
            }
            let sign = if k % 2 == 1 { -1 } else { 1 };
            out = out.add(&pw.scale(&rat(sign)));
        }
        out
    }

    /// x d/dx: multiply the degree-k coefficient by k.
    pub fn euler(&self) -> Self {
        PowerSeries {
            c: self
                .c
                .iter()
                .enumerate()
                .map(|(k, x)| x * rat(k as i64))
                .collect(),
        }
    }

    /// d/dx.
    pub fn derivative(&self) -> Self {
        let n = self.trunc();
        let mut out = Self::zero(n);
        for k in 1..=n {
            out.c[k - 1] = &self.c[k] * rat(k as i64);
        }
        out
    }
}

/// The span/sign/direction matrices of Definition-style crossing data.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CrossingMatrices {
    /// t[i][j] = 1 iff the under visit of crossing j+1 lies strictly inside
    /// the open span of crossing i+1
    pub t: Vec<Vec<u8>>,
    /// crossing signs
    pub s: Vec<i8>,
    /// d[i] = +1 iff the over strand of crossing i+1 is visited first
    pub d: Vec<i8>,
}

impl CrossingMatrices {
    pub fn n(&self) -> usize {
        self.s.len()
    }

    /// Diagonal entries of S: s_i d_i.
    pub fn s_diag(&self) -> Vec<i8> {
        self.s.iter().zip(&self.d).map(|(&s, &d)| s * d).collect()
    }
}

/// Builds T, s, d from a Gauss diagram (crossings in first-appearance order).
pub fn crossing_matrices(k: &GaussDiagram) -> CrossingMatrices {
    let n = k.n_crossings();
    let mut s = vec![0i8; n];
    let mut d = vec![0i8; n];
    let mut span = vec![(0usize, 0usize); n];
    let mut under_pos = vec![0usize; n];
    for i in 1..=n {
        let (over, under) = k.visits(i);
        s[i - 1] = k.sign(i);
        d[i - 1] = if over < under { 1 } else { -1 };
        span[i - 1] = (over.min(under), over.max(under));
        under_pos[i - 1] = under;
    }
    let t = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let (a, b) = span[i];
                    u8::from(under_pos[j] > a && under_pos[j] < b)
                })
                .collect()
        })
        .collect();
    CrossingMatrices { t, s, d }
}

/// A(K)(X) = det(I + T(I - X^{-S})), computed exactly over Z[X, X^{-1}]
/// by fraction-free elimination.
pub fn alexander_poly(k: &GaussDiagram) -> LaurentPoly {
    let cm = crossing_matrices(k);
    alexander_from_matrices(&cm)
}

pub fn alexander_from_matrices(cm: &CrossingMatrices) -> LaurentPoly {
    let n = cm.n();
    let sd = cm.s_diag();
    // M = I + T (I - X^{-S}); column j gets 1 - X^{-sd_j}
    let mut m: Vec<Vec<LaurentPoly>> = vec![vec![LaurentPoly::zero(); n]; n];
    #[allow(clippy::needless_range_loop)]
    for i in 0..n {
        for j in 0..n {
            let mut e = LaurentPoly::zero();
            if i == j {
                e = e.add(&LaurentPoly::one());
            }
            if cm.t[i][j] == 1 {
                e = e.add(&LaurentPoly::one().sub(&LaurentPoly::monomial(-(sd[j] as i64), 1)));
            }
            m[i][j] = e;
        }
    }
    laurent_det(m)
}

/// Fraction-free determinant of a matrix of Laurent polynomials.
fn laurent_det(mut m: Vec<Vec<LaurentPoly>>) -> LaurentPoly {
    let n = m.len();
    if n == 0 {
        return LaurentPoly::one();
    }
    // clear negative exponents row by row, remembering the total shift
    let mut shift = 0i64;
    for row in &mut m {
        let min = row
            .iter()
            .filter_map(|p| p.min_exp())
            .min()
            .unwrap_or(0)
            .min(0);
        if min < 0 {
            shift += -min;
            for p in row.iter_mut() {
                *p = p.shift(-min);
            }
        }
    }
    let mut sign = 1i64;
    let mut prev = LaurentPoly::one();
    for k in 0..n {
        // pivot: any row with nonzero entry in column k
        let Some(pr) = (k..n).find(|&r| !m[r][k].is_zero()) else {
            return LaurentPoly::zero();
        };
        if pr != k {
            m.swap(pr, k);
            sign = -sign;
        }
        let pivot = m[k][k].clone();
        for r in k + 1..n {
            for c in k + 1..n {
                let v = m[r][c]
                    .mul(&pivot)
                    .sub(&m[r][k].mul(&m[k][c]))
                    .div_exact(&prev);
                m[r][c] = v;
            }
            m[r][k] = LaurentPoly::zero();
        }
        prev = pivot;
    }
    let det = m[n - 1][n - 1].clone().shift(-shift);
    if sign < 0 {
        LaurentPoly::zero().sub(&det)
    } else {
        det
    }
}

/// Series data attached to a knot: A(e^x), log A(e^x), d/dx log A(e^x) and
/// the trace series x tr((I-B)^{-1} T S e^{-xS}) with B = T(e^{-xS} - I).
#[derive(Debug, Clone)]
pub struct AlexanderSeries {
    pub a: PowerSeries,
    pub log_a: PowerSeries,
    pub dlog_a: PowerSeries,
    /// tr((I-B)^{-1} T S e^{-xS})
    pub euler_trace: PowerSeries,
}

pub fn alexander_series(k: &GaussDiagram, n_deg: usize) -> AlexanderSeries {
    let cm = crossing_matrices(k);
    let a = alexander_from_matrices(&cm).eval_exp(n_deg);
    let log_a = a.log();
    let dlog_a = log_a.derivative();
    let euler_trace = euler_trace_series(&cm, n_deg);
    AlexanderSeries {
        a,
        log_a,
        dlog_a,
        euler_trace,
    }
}

/// tr((I - B)^{-1} T S exp(-xS)) with B = T(exp(-xS) - I).
fn euler_trace_series(cm: &CrossingMatrices, n_deg: usize) -> PowerSeries {
    let n = cm.n();
    if n == 0 {
        return PowerSeries::zero(n_deg);
    }
    let sd = cm.s_diag();
    let exp_m: Vec<PowerSeries> = sd
        .iter()
        .map(|&s| PowerSeries::exp_cx(rat(-(s as i64)), n_deg))
        .collect();
    // B[i][j] = T[i][j] (exp(-x sd_j) - 1)
    let b: Vec<Vec<PowerSeries>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if cm.t[i][j] == 1 {
                        exp_m[j].sub(&PowerSeries::one(n_deg))
                    } else {
                        PowerSeries::zero(n_deg)
                    }
                })
                .collect()
        })
        .collect();
    // (I - B)^{-1} = sum B^k; B has no constant term
    let mut inv: Vec<Vec<PowerSeries>> = identity_series(n, n_deg);
    let mut pw = identity_series(n, n_deg);
    for _ in 1..=n_deg {
        pw = mat_mul(&pw, &b, n_deg);
        if pw.iter().all(|row| row.iter().all(|e| e.is_zero())) {
            break;
        }
        inv = mat_add(&inv, &pw);
    }
    // C = (I-B)^{-1} T S exp(-xS): column j scaled by sd_j * exp(-x sd_j)
    let mut tr = PowerSeries::zero(n_deg);
    #[allow(clippy::needless_range_loop)]
    for i in 0..n {
        let mut diag = PowerSeries::zero(n_deg);
        for l in 0..n {
            if cm.t[l][i] == 1 {
                let scaled = exp_m[i].scale(&rat(sd[i] as i64));
                diag = diag.add(&inv[i][l].mul(&scaled));
            }
        }
        tr = tr.add(&diag);
    }
    tr
}

fn identity_series(n: usize, deg: usize) -> Vec<Vec<PowerSeries>> {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j {
                        PowerSeries::one(deg)
                    } else {
                        PowerSeries::zero(deg)
                    }
                })
                .collect()
        })
        .collect()
}

fn mat_mul(a: &[Vec<PowerSeries>], b: &[Vec<PowerSeries>], deg: usize) -> Vec<Vec<PowerSeries>> {
    let n = a.len();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let mut e = PowerSeries::zero(deg);
                    for k in 0..n {
                        if !a[i][k].is_zero() && !b[k][j].is_zero() {
                            e = e.add(&a[i][k].mul(&b[k][j]));
                        }
                    }
                    e
                })
                .collect()
        })
        .collect()
}

fn mat_add(a: &[Vec<PowerSeries>], b: &[Vec<PowerSeries>]) -> Vec<Vec<PowerSeries>> {
    a.iter()
        .zip(b)
        .map(|(ra, rb)| ra.iter().zip(rb).map(|(x, y)| x.add(y)).collect())
        .collect()
}

/// Checks T_ii = 0, A(1) = 1 and the "no linear term in A(e^x)" identity.
pub fn series_sanity(k: &GaussDiagram) -> bool {
    let cm = crossing_matrices(k);
    let diag_zero = (0..cm.n()).all(|i| cm.t[i][i] == 0);
    let poly = alexander_from_matrices(&cm);
    let at_one = poly.eval_at_one() == BigInt::one();
    let series = poly.eval_exp(2);
    diag_zero && at_one && series.c[1].is_zero()
}
