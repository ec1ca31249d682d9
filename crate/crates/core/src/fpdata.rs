//! Canonical fixed point data.
//!
//! A [`FixedPoint`] is a sign together with the multiset of its three
//! weights. Weights are kept sorted in descending order so that equality of
//! fixed points is plain structural equality. A [`FixedPointData`] is a
//! multiset of fixed points, stored in a canonical total order: positive
//! points first, then weights compared lexicographically with larger weights
//! first.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::Neg;

use num_bigint::{BigInt, BigUint, Sign as BigSign};
use num_integer::Integer;
use num_traits::{One, Zero};
use thiserror::Error;

/// A weight at a fixed point. Always strictly positive once inside a
/// [`FixedPoint`].
pub type Weight = BigUint;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DataError {
    #[error("weight {0} is not positive")]
    NonPositiveWeight(BigInt),
    #[error("fixed point data is empty")]
    EmptyData,
    #[error("fixed point {0} is not present")]
    PointNotPresent(FixedPoint),
}

/// Orientation sign of a fixed point.
///
/// `Plus` orders before `Minus`, which puts positive points first in the
/// canonical order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }

    pub fn to_i32(self) -> i32 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    /// `(-1)^count`.
    pub fn from_parity(count: usize) -> Sign {
        if count.is_multiple_of(2) {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }

    /// Product of two signs.
    pub fn times(self, other: Sign) -> Sign {
        if self == other {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Sign::Plus => '+',
            Sign::Minus => '-',
        }
    }
}

impl Neg for Sign {
    type Output = Sign;

    fn neg(self) -> Sign {
        self.flip()
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.symbol())
    }
}

/// The data `{sign, w1, w2, w3}` of one isolated fixed point.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FixedPoint {
    sign: Sign,
    // sorted descending
    weights: [Weight; 3],
}

impl FixedPoint {
    /// Builds a canonical fixed point from three weights given in any order.
    pub fn new<W: Into<BigInt>>(sign: Sign, w1: W, w2: W, w3: W) -> Result<Self, DataError> {
        let to_weight = |w: BigInt| match w.sign() {
            BigSign::Plus => Ok(w.magnitude().clone()),
            _ => Err(DataError::NonPositiveWeight(w)),
        };
        Self::from_weights(
            sign,
            [to_weight(w1.into())?, to_weight(w2.into())?, to_weight(w3.into())?],
        )
    }

    /// Builds a canonical fixed point from unsigned weights, rejecting zeros.
    pub fn from_weights(sign: Sign, mut weights: [Weight; 3]) -> Result<Self, DataError> {
        if let Some(w) = weights.iter().find(|w| w.is_zero()) {
            return Err(DataError::NonPositiveWeight(BigInt::from(w.clone())));
        }
        weights.sort_by(|a, b| b.cmp(a));
        Ok(FixedPoint { sign, weights })
    }

    pub fn sign(&self) -> Sign {
        self.sign
    }

    /// Weights in descending order.
    pub fn weights(&self) -> &[Weight; 3] {
        &self.weights
    }

    pub fn max_weight(&self) -> &Weight {
        &self.weights[0]
    }

    pub fn min_weight(&self) -> &Weight {
        &self.weights[2]
    }

    /// Number of times `w` occurs among the three weights.
    pub fn weight_count(&self, w: &Weight) -> usize {
        self.weights.iter().filter(|x| *x == w).count()
    }

    pub fn weight_sum(&self) -> Weight {
        self.weights.iter().sum()
    }

    pub fn with_sign(&self, sign: Sign) -> FixedPoint {
        FixedPoint {
            sign,
            weights: self.weights.clone(),
        }
    }

    /// Same weights, opposite sign.
    pub fn reversed(&self) -> FixedPoint {
        self.with_sign(self.sign.flip())
    }

    pub fn same_weights(&self, other: &FixedPoint) -> bool {
        self.weights == other.weights
    }

    pub fn gcd(&self) -> Weight {
        self.weights
            .iter()
            .fold(Weight::zero(), |acc, w| acc.gcd(w))
    }

    fn divided_by(&self, divisor: &Weight) -> FixedPoint {
        FixedPoint {
            sign: self.sign,
            weights: [
                &self.weights[0] / divisor,
                &self.weights[1] / divisor,
                &self.weights[2] / divisor,
            ],
        }
    }
}

impl Ord for FixedPoint {
    fn cmp(&self, other: &Self) -> Ordering {
        self.sign
            .cmp(&other.sign)
            .then_with(|| other.weights.cmp(&self.weights))
    }
}

impl PartialOrd for FixedPoint {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for FixedPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c] = &self.weights;
        write!(f, "{{{},{},{},{}}}", self.sign, a, b, c)
    }
}

/// Multiset of fixed points in canonical order.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct FixedPointData {
    points: BTreeMap<FixedPoint, usize>,
    len: usize,
}

impl FixedPointData {
    pub fn new() -> Self {
        Self::default()
    }

    /// Number of fixed points, counted with multiplicity.
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn insert(&mut self, point: FixedPoint) {
        *self.points.entry(point).or_insert(0) += 1;
        self.len += 1;
    }

    /// Removes one copy of `point`. Returns `false` if it was absent.
    pub fn remove(&mut self, point: &FixedPoint) -> bool {
        match self.points.get_mut(point) {
            Some(count) => {
                *count -= 1;
                if *count == 0 {
                    self.points.remove(point);
                }
                self.len -= 1;
                true
            }
            None => false,
        }
    }

    /// Removes every point of `points` (with multiplicity) or nothing at all.
    pub fn remove_all<'a, I>(&mut self, points: I) -> Result<(), DataError>
    where
        I: IntoIterator<Item = &'a FixedPoint>,
    {
        let mut next = self.clone();
        for p in points {
            if !next.remove(p) {
                return Err(DataError::PointNotPresent(p.clone()));
            }
        }
        *self = next;
        Ok(())
    }

    pub fn count(&self, point: &FixedPoint) -> usize {
        self.points.get(point).copied().unwrap_or(0)
    }

    pub fn contains(&self, point: &FixedPoint) -> bool {
        self.points.contains_key(point)
    }

    /// True if `points` (with multiplicity) is a sub-multiset of `self`.
    pub fn contains_all<'a, I>(&self, points: I) -> bool
    where
        I: IntoIterator<Item = &'a FixedPoint>,
    {
        let mut need: BTreeMap<&FixedPoint, usize> = BTreeMap::new();
        for p in points {
            *need.entry(p).or_insert(0) += 1;
        }
        need.into_iter().all(|(p, n)| self.count(p) >= n)
    }

    /// Points in canonical order, repeated according to multiplicity.
    pub fn iter(&self) -> impl Iterator<Item = &FixedPoint> + '_ {
        self.points
            .iter()
            .flat_map(|(p, &n)| std::iter::repeat_n(p, n))
    }

    /// Distinct points with their multiplicities, in canonical order.
    pub fn distinct(&self) -> impl Iterator<Item = (&FixedPoint, usize)> + '_ {
        self.points.iter().map(|(p, &n)| (p, n))
    }

    pub fn count_sign(&self, sign: Sign) -> usize {
        self.distinct()
            .filter(|(p, _)| p.sign() == sign)
            .map(|(_, n)| n)
            .sum()
    }

    /// Every sign flipped, weights untouched.
    pub fn reverse_orientation(&self) -> FixedPointData {
        self.distinct()
            .flat_map(|(p, n)| std::iter::repeat_n(p.reversed(), n))
            .collect()
    }

    /// Greatest common divisor of all weights of all points.
    pub fn overall_gcd(&self) -> Result<Weight, DataError> {
        if self.is_empty() {
            return Err(DataError::EmptyData);
        }
        let mut g = Weight::zero();
        for p in self.points.keys() {
            g = g.gcd(&p.gcd());
            if g.is_one() {
                break;
            }
        }
        Ok(g)
    }

    /// Divides every weight by the overall gcd; returns the result and the divisor.
    pub fn normalize_effective(&self) -> Result<(FixedPointData, Weight), DataError> {
        let g = self.overall_gcd()?;
        if g.is_one() {
            return Ok((self.clone(), g));
        }
        let data = self
            .distinct()
            .flat_map(|(p, n)| std::iter::repeat_n(p.divided_by(&g), n))
            .collect();
        Ok((data, g))
    }

    /// The biggest weight over all points.
    pub fn max_weight(&self) -> Result<Weight, DataError> {
        self.points
            .keys()
            .map(|p| p.max_weight())
            .max()
            .cloned()
            .ok_or(DataError::EmptyData)
    }

    /// The smallest weight over all points.
    pub fn min_weight(&self) -> Result<Weight, DataError> {
        self.points
            .keys()
            .map(|p| p.min_weight())
            .min()
            .cloned()
            .ok_or(DataError::EmptyData)
    }

    /// Total number of occurrences of `w` as a weight, over all points.
    pub fn weight_occurrences(&self, w: &Weight) -> usize {
        self.distinct().map(|(p, n)| n * p.weight_count(w)).sum()
    }

    /// Sum of all weights of all points, with multiplicity.
    pub fn weight_sum(&self) -> Weight {
        self.distinct()
            .map(|(p, n)| p.weight_sum() * Weight::from(n))
            .sum()
    }

    /// Multiset union.
    pub fn union(&self, other: &FixedPointData) -> FixedPointData {
        let mut out = self.clone();
        out.extend(other.iter().cloned());
        out
    }
}

impl FromIterator<FixedPoint> for FixedPointData {
    fn from_iter<T: IntoIterator<Item = FixedPoint>>(iter: T) -> Self {
        let mut data = FixedPointData::new();
        data.extend(iter);
        data
    }
}

impl Extend<FixedPoint> for FixedPointData {
    fn extend<T: IntoIterator<Item = FixedPoint>>(&mut self, iter: T) {
        for p in iter {
            self.insert(p);
        }
    }
}

impl fmt::Display for FixedPointData {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, p) in self.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, "}}")
    }
}

/// Shorthand for building a point from small integers, panicking on invalid
/// weights. Meant for tests and literal tables.
pub fn fp(sign: Sign, w1: i64, w2: i64, w3: i64) -> FixedPoint {
    FixedPoint::new(sign, w1, w2, w3).expect("literal fixed point must have positive weights")
}
