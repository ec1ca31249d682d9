//! Exact integer polynomials and truncated power series.
//!
//! The signature of a 6-dimensional circle manifold with isolated fixed points
//! is the constant
//!
//! ```text
//!     sum_p  eps(p) * prod_i (1 + t^w_pi) / (1 - t^w_pi)
//! ```
//!
//! and that constant is zero. Two exact routes decide whether a data set
//! satisfies this identity: clearing all denominators and expanding the
//! numerator ([`signature_identity_poly`], or the much smaller
//! [`reduced_signature_numerator`]), and expanding each summand as a power
//! series ([`signature_series`]). The second route is kept as an oracle for
//! the first.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::fpdata::{FixedPointData, Sign, Weight};

/// Largest total degree any expansion in this module will allocate.
pub const MAX_EXPANSION_DEGREE: usize = 1 << 24;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SymbolicError {
    #[error("weight must be positive")]
    NonPositiveWeight,
    #[error("fixed point data is empty")]
    EmptyData,
    #[error("expansion degree exceeds {MAX_EXPANSION_DEGREE}")]
    DegreeTooLarge,
    #[error("series truncated at degree {0} and {1} cannot be combined")]
    TruncationMismatch(usize, usize),
}

fn degree_of(w: &Weight) -> Result<usize, SymbolicError> {
    match w.to_usize() {
        Some(0) => Err(SymbolicError::NonPositiveWeight),
        Some(d) if d <= MAX_EXPANSION_DEGREE => Ok(d),
        _ => Err(SymbolicError::DegreeTooLarge),
    }
}

/// Dense univariate polynomial in `t` with big-integer coefficients.
///
/// `coeffs[i]` is the coefficient of `t^i`; trailing zeros are never stored,
/// so the zero polynomial has no coefficients at all.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct IntPolynomial {
    coeffs: Vec<BigInt>,
}

impl IntPolynomial {
    pub fn zero() -> Self {
        IntPolynomial { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        IntPolynomial {
            coeffs: vec![BigInt::one()],
        }
    }

    pub fn from_coeffs<I, C>(coeffs: I) -> Self
    where
        I: IntoIterator<Item = C>,
        C: Into<BigInt>,
    {
        let mut p = IntPolynomial {
            coeffs: coeffs.into_iter().map(Into::into).collect(),
        };
        p.trim();
        p
    }

    /// `c * t^degree`.
    pub fn monomial(c: impl Into<BigInt>, degree: usize) -> Self {
        let mut coeffs = vec![BigInt::zero(); degree + 1];
        coeffs[degree] = c.into();
        IntPolynomial::from_coeffs(coeffs)
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    /// Coefficient of `t^i` (zero beyond the degree).
    pub fn coeff(&self, i: usize) -> BigInt {
        self.coeffs.get(i).cloned().unwrap_or_default()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    fn trim(&mut self) {
        while self.coeffs.last().is_some_and(Zero::is_zero) {
            self.coeffs.pop();
        }
    }

    /// In-place multiplication by `1 + t^w` (`sign = Plus`) or `1 - t^w`.
    pub fn mul_binomial(&mut self, sign: Sign, w: usize) {
        if self.is_zero() {
            return;
        }
        let n = self.coeffs.len();
        self.coeffs.resize(n + w, BigInt::zero());
        for i in (w..n + w).rev() {
            let (lo, hi) = self.coeffs.split_at_mut(i);
            match sign {
                Sign::Plus => hi[0] += &lo[i - w],
                Sign::Minus => hi[0] -= &lo[i - w],
            }
        }
        self.trim();
    }

    /// Quotient by a monic divisor, `None` if the division leaves a remainder.
    pub fn div_exact_monic(&self, divisor: &IntPolynomial) -> Option<IntPolynomial> {
        let dd = divisor.degree()?;
        if !divisor.coeffs[dd].is_one() {
            return None;
        }
        let Some(nd) = self.degree() else {
            return Some(IntPolynomial::zero());
        };
        if nd < dd {
            return None;
        }
        let mut rem = self.coeffs.clone();
        let mut quot = vec![BigInt::zero(); nd - dd + 1];
        for k in (0..=nd - dd).rev() {
            let q = std::mem::take(&mut rem[k + dd]);
            if q.is_zero() {
                continue;
            }
            for (j, c) in divisor.coeffs[..dd].iter().enumerate() {
                if !c.is_zero() {
                    rem[k + j] -= &q * c;
                }
            }
            quot[k] = q;
        }
        if rem.iter().all(Zero::is_zero) {
            Some(IntPolynomial::from_coeffs(quot))
        } else {
            None
        }
    }

    pub fn pow(&self, mut exp: u32) -> IntPolynomial {
        let mut base = self.clone();
        let mut acc = IntPolynomial::one();
        while exp > 0 {
            if exp & 1 == 1 {
                acc = &acc * &base;
            }
            exp >>= 1;
            if exp > 0 {
                base = &base * &base;
            }
        }
        acc
    }
}

/// `1 + t^w`.
pub fn one_plus_t_pow(w: &Weight) -> Result<IntPolynomial, SymbolicError> {
    let d = degree_of(w)?;
    let mut p = IntPolynomial::one();
    p.mul_binomial(Sign::Plus, d);
    Ok(p)
}

/// `1 - t^w`.
pub fn one_minus_t_pow(w: &Weight) -> Result<IntPolynomial, SymbolicError> {
    let d = degree_of(w)?;
    let mut p = IntPolynomial::one();
    p.mul_binomial(Sign::Minus, d);
    Ok(p)
}

impl Add for &IntPolynomial {
    type Output = IntPolynomial;

    fn add(self, rhs: &IntPolynomial) -> IntPolynomial {
        let (long, short) = if self.coeffs.len() >= rhs.coeffs.len() {
            (self, rhs)
        } else {
            (rhs, self)
        };
        let mut out = long.clone();
        for (a, b) in out.coeffs.iter_mut().zip(&short.coeffs) {
            *a += b;
        }
        out.trim();
        out
    }
}

impl Sub for &IntPolynomial {
    type Output = IntPolynomial;

    fn sub(self, rhs: &IntPolynomial) -> IntPolynomial {
        self + &(-rhs)
    }
}

impl Neg for &IntPolynomial {
    type Output = IntPolynomial;

    fn neg(self) -> IntPolynomial {
        IntPolynomial {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

impl Mul for &IntPolynomial {
    type Output = IntPolynomial;

    fn mul(self, rhs: &IntPolynomial) -> IntPolynomial {
        if self.is_zero() || rhs.is_zero() {
            return IntPolynomial::zero();
        }
        let mut out = vec![BigInt::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    out[i + j] += a * b;
                }
            }
        }
        IntPolynomial::from_coeffs(out)
    }
}

macro_rules! forward_owned {
    ($($tr:ident $m:ident),*) => {$(
        impl $tr for IntPolynomial {
            type Output = IntPolynomial;
            fn $m(self, rhs: IntPolynomial) -> IntPolynomial {
                (&self).$m(&rhs)
            }
        }
    )*};
}
forward_owned!(Add add, Sub sub, Mul mul);

impl Neg for IntPolynomial {
    type Output = IntPolynomial;

    fn neg(self) -> IntPolynomial {
        -&self
    }
}

impl fmt::Display for IntPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let mag = c.abs();
            match (first, neg) {
                (true, true) => write!(f, "-")?,
                (false, true) => write!(f, " - ")?,
                (false, false) => write!(f, " + ")?,
                (true, false) => {}
            }
            first = false;
            let show_mag = i == 0 || !mag.is_one();
            if show_mag {
                write!(f, "{mag}")?;
            }
            match i {
                0 => {}
                1 => write!(f, "t")?,
                _ => write!(f, "t^{i}")?,
            }
        }
        Ok(())
    }
}

/// Power series in `t` known up to and including `t^N`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TruncatedSeries {
    // always exactly N + 1 entries
    coeffs: Vec<BigInt>,
}

impl TruncatedSeries {
    pub fn zero(truncation_degree: usize) -> Self {
        TruncatedSeries {
            coeffs: vec![BigInt::zero(); truncation_degree + 1],
        }
    }

    pub fn one(truncation_degree: usize) -> Self {
        let mut s = Self::zero(truncation_degree);
        s.coeffs[0] = BigInt::one();
        s
    }

    pub fn from_polynomial(p: &IntPolynomial, truncation_degree: usize) -> Self {
        let mut s = Self::zero(truncation_degree);
        for (i, c) in p.coeffs().iter().enumerate().take(truncation_degree + 1) {
            s.coeffs[i] = c.clone();
        }
        s
    }

    pub fn truncation_degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> &BigInt {
        &self.coeffs[i]
    }

    /// True if every known coefficient vanishes.
    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    /// Degree of the first nonzero coefficient, if any is known.
    pub fn order(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    fn check(&self, other: &Self) -> Result<(), SymbolicError> {
        if self.coeffs.len() == other.coeffs.len() {
            Ok(())
        } else {
            Err(SymbolicError::TruncationMismatch(
                self.truncation_degree(),
                other.truncation_degree(),
            ))
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self, SymbolicError> {
        self.check(other)?;
        Ok(TruncatedSeries {
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self, SymbolicError> {
        self.check(other)?;
        Ok(TruncatedSeries {
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a - b).collect(),
        })
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self, SymbolicError> {
        self.check(other)?;
        let n = self.coeffs.len();
        let mut out = vec![BigInt::zero(); n];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs[..n - i].iter().enumerate() {
                if !b.is_zero() {
                    out[i + j] += a * b;
                }
            }
        }
        Ok(TruncatedSeries { coeffs: out })
    }

    pub fn negated(&self) -> Self {
        TruncatedSeries {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

/// `sum_p eps(p) prod_i (1 + t^w_pi) prod_{q != p} prod_j (1 - t^w_qj)`.
///
/// This is the signature sum multiplied by the product of all denominators,
/// so it is the zero polynomial exactly when the signature identity holds
/// with signature zero.
pub fn signature_identity_poly(data: &FixedPointData) -> Result<IntPolynomial, SymbolicError> {
    if data.is_empty() {
        return Err(SymbolicError::EmptyData);
    }
    let mut total = 0usize;
    let mut degrees = Vec::with_capacity(data.len());
    for p in data.iter() {
        let mut ws = [0usize; 3];
        for (slot, w) in ws.iter_mut().zip(p.weights()) {
            *slot = degree_of(w)?;
            total += *slot;
        }
        if total > MAX_EXPANSION_DEGREE {
            return Err(SymbolicError::DegreeTooLarge);
        }
        degrees.push((p.sign(), ws));
    }

    // acc_k = sum_{p <= k} eps(p) num_p prod_{q <= k, q != p} den_q
    // prefix_k = prod_{q <= k} den_q
    let mut acc = IntPolynomial::zero();
    let mut prefix = IntPolynomial::one();
    for (sign, ws) in degrees {
        for &w in &ws {
            acc.mul_binomial(Sign::Minus, w);
        }
        let mut term = prefix.clone();
        for &w in &ws {
            term.mul_binomial(Sign::Plus, w);
        }
        acc = match sign {
            Sign::Plus => &acc + &term,
            Sign::Minus => &acc - &term,
        };
        for &w in &ws {
            prefix.mul_binomial(Sign::Minus, w);
        }
    }
    Ok(acc)
}

fn divisors(n: u64) -> Vec<u64> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            small.push(d);
            if d * d != n {
                large.push(n / d);
            }
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

struct Cyclotomics {
    cache: HashMap<u64, IntPolynomial>,
}

impl Cyclotomics {
    fn new() -> Self {
        Cyclotomics {
            cache: HashMap::new(),
        }
    }

    /// The `n`-th cyclotomic polynomial, from `t^n - 1 = prod_{d | n} Phi_d`.
    fn get(&mut self, n: u64) -> IntPolynomial {
        if let Some(p) = self.cache.get(&n) {
            return p.clone();
        }
        let mut p = IntPolynomial::one();
        p.mul_binomial(Sign::Minus, n as usize);
        let mut p = -p;
        for d in divisors(n) {
            if d == n {
                break;
            }
            let phi = self.get(d);
            p = p
                .div_exact_monic(&phi)
                .expect("cyclotomic factors divide t^n - 1");
        }
        self.cache.insert(n, p.clone());
        p
    }
}

/// Signature sum multiplied by the least common multiple of its denominators.
///
/// Points with identical weights and opposite signs cancel before anything is
/// expanded, and each remaining weight class contributes
/// `prod (1 - t^w) = -prod_d Phi_d^{e_d}` in factored form. The result is
/// zero exactly when [`signature_identity_poly`] is zero, and is typically of
/// far smaller degree. Empty data yields the zero polynomial.
pub fn reduced_signature_numerator(
    data: &FixedPointData,
) -> Result<IntPolynomial, SymbolicError> {
    // net signed count per weight multiset
    let mut classes: BTreeMap<[u64; 3], i64> = BTreeMap::new();
    for (p, n) in data.distinct() {
        let mut ws = [0u64; 3];
        for (slot, w) in ws.iter_mut().zip(p.weights()) {
            *slot = degree_of(w)? as u64;
        }
        let n = n as i64;
        *classes.entry(ws).or_insert(0) += if p.sign() == Sign::Plus { n } else { -n };
    }
    classes.retain(|_, c| *c != 0);
    if classes.is_empty() {
        return Ok(IntPolynomial::zero());
    }

    let exponents: Vec<BTreeMap<u64, u32>> = classes
        .keys()
        .map(|ws| {
            let mut e = BTreeMap::new();
            for &w in ws {
                for d in divisors(w) {
                    *e.entry(d).or_insert(0) += 1;
                }
            }
            e
        })
        .collect();
    let mut lcm: BTreeMap<u64, u32> = BTreeMap::new();
    for e in &exponents {
        for (&d, &k) in e {
            let slot = lcm.entry(d).or_insert(0);
            *slot = (*slot).max(k);
        }
    }
    let lcm_degree: u64 = lcm.iter().map(|(&d, &k)| euler_phi(d) * k as u64).sum();
    let max_num: u64 = classes.keys().map(|ws| ws.iter().sum::<u64>()).max().unwrap_or(0);
    if (lcm_degree + max_num) as usize > MAX_EXPANSION_DEGREE {
        return Err(SymbolicError::DegreeTooLarge);
    }

    let mut cyc = Cyclotomics::new();
    let mut acc = IntPolynomial::zero();
    for ((ws, &count), e) in classes.iter().zip(&exponents) {
        let mut term = IntPolynomial::from_coeffs([-count]);
        for &w in ws {
            term.mul_binomial(Sign::Plus, w as usize);
        }
        for (&d, &k) in &lcm {
            let missing = k - e.get(&d).copied().unwrap_or(0);
            if missing > 0 {
                term = &term * &cyc.get(d).pow(missing);
            }
        }
        acc = &acc + &term;
    }
    Ok(acc)
}

fn euler_phi(mut n: u64) -> u64 {
    let mut result = n;
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            while n.is_multiple_of(p) {
                n /= p;
            }
            result -= result / p;
        }
        p += 1;
    }
    if n > 1 {
        result -= result / n;
    }
    result
}

/// Coefficients `0..=n` of `sum_p eps(p) prod_i (1 + 2 sum_{j>=1} t^{j w_pi})`,
/// the power series expansion of the signature sum.
pub fn signature_series(
    data: &FixedPointData,
    n: usize,
) -> Result<TruncatedSeries, SymbolicError> {
    if data.is_empty() {
        return Err(SymbolicError::EmptyData);
    }
    let mut total = TruncatedSeries::zero(n);
    for (p, mult) in data.distinct() {
        let mut prod = TruncatedSeries::one(n);
        for w in p.weights() {
            prod = prod.try_mul(&geometric_factor(w, n))?;
        }
        let mut signed = match p.sign() {
            Sign::Plus => prod,
            Sign::Minus => prod.negated(),
        };
        let m = BigInt::from(mult);
        signed.coeffs.iter_mut().for_each(|c| *c *= &m);
        total = total.try_add(&signed)?;
    }
    Ok(total)
}

/// `(1 + t^w) / (1 - t^w) = 1 + 2 t^w + 2 t^{2w} + ...`, truncated at `n`.
fn geometric_factor(w: &Weight, n: usize) -> TruncatedSeries {
    let mut s = TruncatedSeries::one(n);
    if let Some(step) = w.to_usize().filter(|&s| s > 0) {
        for k in (step..=n).step_by(step) {
            s.coeffs[k] = BigInt::from(2);
        }
    }
    s
}

/// `prod_p prod_i (1 - t^w_pi) / L` where `L` is the denominator used by
/// [`reduced_signature_numerator`]; multiplying the reduced numerator by this
/// recovers [`signature_identity_poly`]. Exposed for cross-checking.
pub fn reduction_cofactor(data: &FixedPointData) -> Result<IntPolynomial, SymbolicError> {
    let mut classes: BTreeMap<[u64; 3], i64> = BTreeMap::new();
    let mut all: BTreeMap<u64, u32> = BTreeMap::new();
    for p in data.iter() {
        let mut ws = [0u64; 3];
        for (slot, w) in ws.iter_mut().zip(p.weights()) {
            *slot = degree_of(w)? as u64;
            for d in divisors(*slot) {
                *all.entry(d).or_insert(0) += 1;
            }
        }
        *classes.entry(ws).or_insert(0) += p.sign().to_i32() as i64;
    }
    let mut lcm: BTreeMap<u64, u32> = BTreeMap::new();
    for ws in classes.iter().filter(|(_, c)| **c != 0).map(|(ws, _)| ws) {
        let mut e: BTreeMap<u64, u32> = BTreeMap::new();
        for &w in ws {
            for d in divisors(w) {
                *e.entry(d).or_insert(0) += 1;
            }
        }
        for (d, k) in e {
            let slot = lcm.entry(d).or_insert(0);
            *slot = (*slot).max(k);
        }
    }
    let mut cyc = Cyclotomics::new();
    let sign = if data.len().is_multiple_of(2) { 1 } else { -1 };
    let mut out = IntPolynomial::from_coeffs([sign]);
    for (&d, &k) in &all {
        let missing = k - lcm.get(&d).copied().unwrap_or(0);
        if missing > 0 {
            out = &out * &cyc.get(d).pow(missing);
        }
    }
    Ok(out)
}
