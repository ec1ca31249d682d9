//! Model manifolds and equivariant connected sums on data.
//!
//! The circle actions on `S^6`, `CP^3`, the Hirzebruch-type manifolds `Z_n`
//! and the ten-point sum `Z_2 # -Z_2` are described here only through their
//! fixed point data. `Z_n` is specified by complex weights at its six fixed
//! points; [`complex_to_real`] turns those into signed real data.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fpdata::{DataError, FixedPoint, FixedPointData, Sign};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GeneratorError {
    #[error("weight {0} is not positive")]
    NonPositiveWeight(BigInt),
    #[error("complex weight is zero")]
    ZeroWeight,
    #[error("parameters must satisfy {0}")]
    ParameterOrder(&'static str),
    #[error("degenerate parameters: {0}")]
    DegenerateParameters(&'static str),
    #[error("{family} takes {expected} parameters, got {got}")]
    ParameterCount {
        family: Family,
        expected: usize,
        got: usize,
    },
    #[error("fixed point {0} is not available for gluing")]
    PairNotPresent(FixedPoint),
    #[error("cannot glue {0} to {1}: weights differ")]
    WeightMismatch(FixedPoint, FixedPoint),
    #[error("cannot glue {0} to {1}: signs must be opposite")]
    SignMismatch(FixedPoint, FixedPoint),
}

impl From<DataError> for GeneratorError {
    fn from(e: DataError) -> Self {
        match e {
            DataError::NonPositiveWeight(w) => GeneratorError::NonPositiveWeight(w),
            DataError::PointNotPresent(p) => GeneratorError::PairNotPresent(p),
            DataError::EmptyData => GeneratorError::DegenerateParameters("empty data"),
        }
    }
}

/// Weights of the tangent representation at a fixed point of a complex
/// manifold, as signed integers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComplexWeights([BigInt; 3]);

impl ComplexWeights {
    pub fn new<T: Into<BigInt>>(a: T, b: T, c: T) -> Result<Self, GeneratorError> {
        let w = [a.into(), b.into(), c.into()];
        if w.iter().any(Zero::is_zero) {
            return Err(GeneratorError::ZeroWeight);
        }
        Ok(ComplexWeights(w))
    }

    pub fn weights(&self) -> &[BigInt; 3] {
        &self.0
    }
}

/// Real fixed point data of a complex fixed point: each negative weight
/// reverses the orientation of its plane.
pub fn complex_to_real(cw: &ComplexWeights) -> FixedPoint {
    let negatives = cw.0.iter().filter(|w| w.is_negative()).count();
    let [a, b, c] = cw.0.clone().map(|w| w.abs());
    FixedPoint::new(Sign::from_parity(negatives), a, b, c)
        .expect("complex weights are nonzero")
}

fn positive(w: &BigInt) -> Result<(), GeneratorError> {
    if w.is_positive() {
        Ok(())
    } else {
        Err(GeneratorError::NonPositiveWeight(w.clone()))
    }
}

/// Rotation of `S^6` with weights `a, b, c`: `{+,a,b,c}`, `{-,a,b,c}`.
pub fn gen_s6<T: Into<BigInt>>(a: T, b: T, c: T) -> Result<FixedPointData, GeneratorError> {
    let (a, b, c) = (a.into(), b.into(), c.into());
    let plus = FixedPoint::new(Sign::Plus, a, b, c)?;
    let minus = plus.reversed();
    Ok([plus, minus].into_iter().collect())
}

/// `CP^3` with the action `[z0 : t^a z1 : t^b z2 : t^c z3]`, `0 < a < b < c`.
pub fn gen_cp3<T: Into<BigInt>>(a: T, b: T, c: T) -> Result<FixedPointData, GeneratorError> {
    let (a, b, c) = (a.into(), b.into(), c.into());
    if !(a.is_positive() && a < b && b < c) {
        return Err(GeneratorError::ParameterOrder("0 < a < b < c"));
    }
    let pts = [
        FixedPoint::new(Sign::Plus, a.clone(), b.clone(), c.clone())?,
        FixedPoint::new(Sign::Minus, a.clone(), &b - &a, &c - &a)?,
        FixedPoint::new(Sign::Plus, b.clone(), &b - &a, &c - &b)?,
        FixedPoint::new(Sign::Minus, c.clone(), &c - &a, &c - &b)?,
    ];
    Ok(pts.into_iter().collect())
}

/// Complex weights of `Z_n(a, b, c)` at its six fixed points.
pub fn zn_complex_weights<T: Into<BigInt>>(
    n: T,
    a: T,
    b: T,
    c: T,
) -> Result<[ComplexWeights; 6], GeneratorError> {
    let (n, a, b, c) = (n.into(), a.into(), b.into(), c.into());
    for w in [&a, &b, &c] {
        positive(w)?;
    }
    let nc = &n * &c;
    if a == b {
        return Err(GeneratorError::DegenerateParameters("b - a must be nonzero"));
    }
    if nc == a {
        return Err(GeneratorError::DegenerateParameters("nc - a must be nonzero"));
    }
    if nc == b {
        return Err(GeneratorError::DegenerateParameters("nc - b must be nonzero"));
    }
    let cw = |x: BigInt, y: BigInt, z: BigInt| ComplexWeights::new(x, y, z);
    Ok([
        cw(&b - &a, -a.clone(), c.clone())?,
        cw(&b - &a, &nc - &a, -c.clone())?,
        cw(&a - &b, -b.clone(), c.clone())?,
        cw(&a - &b, &nc - &b, -c.clone())?,
        cw(a.clone(), b.clone(), c.clone())?,
        cw(&a - &nc, &b - &nc, -c)?,
    ])
}

/// Fixed point data of `Z_n(a, b, c)`.
///
/// Only `n = 1` and `n = 2` are used by the reduction; other values of `n`
/// are accepted but have not been cross-checked against worked tables.
pub fn gen_zn<T: Into<BigInt>>(n: T, a: T, b: T, c: T) -> Result<FixedPointData, GeneratorError> {
    Ok(zn_complex_weights(n, a, b, c)?
        .iter()
        .map(complex_to_real)
        .collect())
}

/// Equivariant connected sum at the listed pairs of fixed points.
///
/// Each pair `(p, q)` takes `p` out of `m` and `q` out of `n`; the two must
/// share their weights and carry opposite signs.
pub fn connected_sum(
    m: &FixedPointData,
    n: &FixedPointData,
    pairs: &[(FixedPoint, FixedPoint)],
) -> Result<FixedPointData, GeneratorError> {
    let mut left = m.clone();
    let mut right = n.clone();
    for (p, q) in pairs {
        if !p.same_weights(q) {
            return Err(GeneratorError::WeightMismatch(p.clone(), q.clone()));
        }
        if p.sign() == q.sign() {
            return Err(GeneratorError::SignMismatch(p.clone(), q.clone()));
        }
        if !left.remove(p) {
            return Err(GeneratorError::PairNotPresent(p.clone()));
        }
        if !right.remove(q) {
            return Err(GeneratorError::PairNotPresent(q.clone()));
        }
    }
    Ok(left.union(&right))
}

/// `Z_2(a,e,e) # -Z_2(a,a-e,a-e)`, glued at the points `{+-, a-e, a, e}`.
pub fn gen_z2sum<T: Into<BigInt>>(a: T, e: T) -> Result<FixedPointData, GeneratorError> {
    let (a, e) = (a.into(), e.into());
    if !(e.is_positive() && BigInt::from(2) * &e < a) {
        return Err(GeneratorError::DegenerateParameters("0 < 2e < a"));
    }
    let d = &a - &e;
    let left = gen_zn(BigInt::from(2), a.clone(), e.clone(), e.clone())?;
    let right = gen_zn(BigInt::from(2), a.clone(), d.clone(), d.clone())?.reverse_orientation();
    let glue = FixedPoint::new(Sign::Plus, d, a, e)?;
    let mate = glue.reversed();
    connected_sum(&left, &right, &[(glue, mate)])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    #[serde(rename = "S6")]
    S6,
    #[serde(rename = "CP3")]
    Cp3,
    #[serde(rename = "Z1")]
    Z1,
    #[serde(rename = "Z2")]
    Z2,
    #[serde(rename = "Z2SUM")]
    Z2Sum,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::S6 => "S6",
            Family::Cp3 => "CP3",
            Family::Z1 => "Z1",
            Family::Z2 => "Z2",
            Family::Z2Sum => "Z2SUM",
        }
    }

    pub fn arity(self) -> usize {
        match self {
            Family::Z2Sum => 2,
            _ => 3,
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Names one model manifold with its parameters and orientation.
///
/// Parameters are `(a, b, c)` for `S6`, `CP3`, `Z1` and `Z2` (the latter two
/// being `Z_n(a, b, c)` with `n = 1, 2`) and `(a, e)` for `Z2SUM`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GeneratorLabel {
    pub family: Family,
    pub params: Vec<BigInt>,
    pub reversed: bool,
}

impl GeneratorLabel {
    pub fn new(family: Family, params: Vec<BigInt>, reversed: bool) -> Self {
        GeneratorLabel {
            family,
            params,
            reversed,
        }
    }

    /// Fixed point data of the labelled manifold, orientation included.
    pub fn data(&self) -> Result<FixedPointData, GeneratorError> {
        if self.params.len() != self.family.arity() {
            return Err(GeneratorError::ParameterCount {
                family: self.family,
                expected: self.family.arity(),
                got: self.params.len(),
            });
        }
        let p = |i: usize| self.params[i].clone();
        let data = match self.family {
            Family::S6 => gen_s6(p(0), p(1), p(2))?,
            Family::Cp3 => gen_cp3(p(0), p(1), p(2))?,
            Family::Z1 => gen_zn(BigInt::one(), p(0), p(1), p(2))?,
            Family::Z2 => gen_zn(BigInt::from(2), p(0), p(1), p(2))?,
            Family::Z2Sum => gen_z2sum(p(0), p(1))?,
        };
        Ok(if self.reversed {
            data.reverse_orientation()
        } else {
            data
        })
    }
}

impl fmt::Display for GeneratorLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.reversed {
            write!(f, "-")?;
        }
        write!(f, "{}(", self.family)?;
        for (i, p) in self.params.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, ")")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fpdata::fp;
    use Sign::{Minus, Plus};

    fn data(points: &[(Sign, i64, i64, i64)]) -> FixedPointData {
        points.iter().map(|&(s, a, b, c)| fp(s, a, b, c)).collect()
    }

    #[test]
    fn complex_to_real_examples() {
        let cw = ComplexWeights::new(-1, 1, 2).unwrap();
        assert_eq!(complex_to_real(&cw), fp(Minus, 2, 1, 1));
        let cw = ComplexWeights::new(-2, -1, 1).unwrap();
        assert_eq!(complex_to_real(&cw), fp(Plus, 2, 1, 1));
        let cw = ComplexWeights::new(1, 2, 3).unwrap();
        assert_eq!(complex_to_real(&cw), fp(Plus, 3, 2, 1));
        assert_eq!(ComplexWeights::new(1, 0, 3), Err(GeneratorError::ZeroWeight));
    }

    #[test]
    fn s6_examples() {
        assert_eq!(gen_s6(1, 2, 3).unwrap(), data(&[(Plus, 3, 2, 1), (Minus, 3, 2, 1)]));
        assert_eq!(gen_s6(1, 1, 1).unwrap(), data(&[(Plus, 1, 1, 1), (Minus, 1, 1, 1)]));
        assert_eq!(gen_s6(2, 2, 5).unwrap(), data(&[(Plus, 5, 2, 2), (Minus, 5, 2, 2)]));
        assert!(matches!(gen_s6(0, 2, 5), Err(GeneratorError::NonPositiveWeight(_))));
    }

    #[test]
    fn cp3_examples() {
        assert_eq!(
            gen_cp3(1, 2, 3).unwrap(),
            data(&[(Plus, 3, 2, 1), (Minus, 2, 1, 1), (Plus, 2, 1, 1), (Minus, 3, 2, 1)])
        );
        assert_eq!(
            gen_cp3(1, 2, 4).unwrap(),
            data(&[(Plus, 4, 2, 1), (Minus, 3, 1, 1), (Plus, 2, 2, 1), (Minus, 4, 3, 2)])
        );
        assert_eq!(
            gen_cp3(2, 3, 7).unwrap(),
            data(&[(Plus, 7, 3, 2), (Minus, 5, 2, 1), (Plus, 4, 3, 1), (Minus, 7, 5, 4)])
        );
        for bad in [(2, 2, 3), (3, 2, 4), (1, 4, 4), (0, 1, 2)] {
            assert!(matches!(
                gen_cp3(bad.0, bad.1, bad.2),
                Err(GeneratorError::ParameterOrder(_))
            ));
        }
    }

    #[test]
    fn zn_examples() {
        assert_eq!(
            gen_zn(1, 3, 2, 1).unwrap(),
            data(&[
                (Plus, 3, 1, 1),
                (Minus, 2, 1, 1),
                (Minus, 2, 1, 1),
                (Plus, 1, 1, 1),
                (Plus, 3, 2, 1),
                (Minus, 2, 1, 1)
            ])
        );
        assert_eq!(
            gen_zn(2, 5, 2, 2).unwrap(),
            data(&[
                (Plus, 5, 3, 2),
                (Minus, 3, 2, 1),
                (Minus, 3, 2, 2),
                (Minus, 3, 2, 2),
                (Plus, 5, 2, 2),
                (Plus, 2, 2, 1)
            ])
        );
        assert_eq!(
            gen_zn(2, 3, 2, 2).unwrap(),
            data(&[
                (Plus, 3, 2, 1),
                (Plus, 2, 1, 1),
                (Minus, 2, 2, 1),
                (Minus, 2, 2, 1),
                (Plus, 3, 2, 2),
                (Minus, 2, 2, 1)
            ])
        );
    }

    #[test]
    fn zn_rejects_degenerate_parameters() {
        for (n, a, b, c) in [(1, 2, 2, 1), (1, 3, 2, 3), (2, 5, 4, 2), (1, 0, 2, 1)] {
            assert!(gen_zn(n, a, b, c).is_err(), "({n},{a},{b},{c})");
        }
        assert!(matches!(
            gen_zn(1, 3, 3, 1),
            Err(GeneratorError::DegenerateParameters(_))
        ));
    }

    #[test]
    fn connected_sum_examples() {
        let s6 = gen_s6(1, 2, 3).unwrap();
        let pairs = [
            (fp(Plus, 3, 2, 1), fp(Minus, 3, 2, 1)),
            (fp(Minus, 3, 2, 1), fp(Plus, 3, 2, 1)),
        ];
        assert!(connected_sum(&s6, &s6, &pairs).unwrap().is_empty());

        let cp3 = gen_cp3(1, 2, 3).unwrap();
        let bar = cp3.reverse_orientation();
        let all: Vec<_> = cp3.iter().map(|p| (p.clone(), p.reversed())).collect();
        assert!(connected_sum(&cp3, &bar, &all).unwrap().is_empty());
    }

    #[test]
    fn connected_sum_errors() {
        let s6 = gen_s6(1, 2, 3).unwrap();
        assert_eq!(
            connected_sum(&s6, &s6, &[(fp(Plus, 3, 2, 1), fp(Plus, 3, 2, 1))]),
            Err(GeneratorError::SignMismatch(fp(Plus, 3, 2, 1), fp(Plus, 3, 2, 1)))
        );
        assert_eq!(
            connected_sum(&s6, &s6, &[(fp(Plus, 3, 2, 1), fp(Minus, 3, 2, 2))]),
            Err(GeneratorError::WeightMismatch(fp(Plus, 3, 2, 1), fp(Minus, 3, 2, 2)))
        );
        // the same point cannot be used twice
        let twice = [
            (fp(Plus, 3, 2, 1), fp(Minus, 3, 2, 1)),
            (fp(Plus, 3, 2, 1), fp(Minus, 3, 2, 1)),
        ];
        assert_eq!(
            connected_sum(&s6, &s6, &twice),
            Err(GeneratorError::PairNotPresent(fp(Plus, 3, 2, 1)))
        );
    }

    #[test]
    fn connected_sum_point_count() {
        let m = gen_zn(2, 5, 2, 2).unwrap();
        let n = gen_zn(2, 5, 3, 3).unwrap().reverse_orientation();
        let sum = connected_sum(&m, &n, &[(fp(Plus, 5, 3, 2), fp(Minus, 5, 3, 2))]).unwrap();
        assert_eq!(sum.len(), m.len() + n.len() - 2);
        assert_eq!(sum.count_sign(Plus), sum.count_sign(Minus));
        assert_eq!(sum, gen_z2sum(5, 2).unwrap());
    }

    #[test]
    fn z2sum_rejects_bad_parameters() {
        for (a, e) in [(4, 2), (3, 2), (5, 0), (2, 1)] {
            assert!(matches!(
                gen_z2sum(a, e),
                Err(GeneratorError::DegenerateParameters(_))
            ));
        }
    }

    #[test]
    fn label_data_respects_orientation() {
        let label = GeneratorLabel::new(
            Family::Cp3,
            vec![1.into(), 2.into(), 3.into()],
            true,
        );
        assert_eq!(label.data().unwrap(), gen_cp3(1, 2, 3).unwrap().reverse_orientation());
        assert_eq!(label.to_string(), "-CP3(1,2,3)");
        let short = GeneratorLabel::new(Family::Z2Sum, vec![5.into()], false);
        assert!(matches!(short.data(), Err(GeneratorError::ParameterCount { .. })));
    }
}
