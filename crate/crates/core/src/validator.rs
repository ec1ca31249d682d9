//! Necessary conditions on the fixed point data of a 6-dimensional compact
//! oriented circle manifold with isolated fixed points.
//!
//! Passing every check does not prove that a manifold with the given data
//! exists; reducing the data to the empty set (see [`crate::reducer`]) is the
//! stronger test.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::One;
use serde::Serialize;

use crate::fpdata::{FixedPointData, Sign, Weight};
use crate::symbolic::{reduced_signature_numerator, SymbolicError};

const NOT_APPLICABLE: &str = "not applicable";

/// The fixed, ordered list of checks run by [`validate_all`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CheckName {
    #[serde(rename = "sign_balance")]
    SignBalance,
    #[serde(rename = "weight_parity")]
    WeightParity,
    #[serde(rename = "smallest_weight_balance")]
    SmallestWeightBalance,
    #[serde(rename = "top_weight_double")]
    TopWeightDouble,
    #[serde(rename = "signature_zero")]
    SignatureZero,
    #[serde(rename = "two_points")]
    TwoPoints,
}

impl CheckName {
    pub const ALL: [CheckName; 6] = [
        CheckName::SignBalance,
        CheckName::WeightParity,
        CheckName::SmallestWeightBalance,
        CheckName::TopWeightDouble,
        CheckName::SignatureZero,
        CheckName::TwoPoints,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            CheckName::SignBalance => "sign_balance",
            CheckName::WeightParity => "weight_parity",
            CheckName::SmallestWeightBalance => "smallest_weight_balance",
            CheckName::TopWeightDouble => "top_weight_double",
            CheckName::SignatureZero => "signature_zero",
            CheckName::TwoPoints => "two_points",
        }
    }

    fn run(self, data: &FixedPointData) -> CheckResult {
        let (passed, detail) = match self {
            CheckName::SignBalance => sign_balance(data),
            CheckName::WeightParity => weight_parity(data),
            CheckName::SmallestWeightBalance => smallest_weight_balance(data),
            CheckName::TopWeightDouble => top_weight_double(data),
            CheckName::SignatureZero => signature_zero(data),
            CheckName::TwoPoints => two_points(data),
        };
        CheckResult {
            name: self,
            passed,
            detail,
        }
    }
}

impl fmt::Display for CheckName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CheckResult {
    pub name: CheckName,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    /// Common factor divided out of all weights before checking.
    #[serde(with = "crate::bigserde::uint")]
    pub divisor: Weight,
    pub checks: Vec<CheckResult>,
    pub overall: bool,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.overall
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckResult> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn check(&self, name: CheckName) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "divisor: {}", self.divisor)?;
        for c in &self.checks {
            let mark = if c.passed { "PASS" } else { "FAIL" };
            writeln!(f, "{mark} {:<24} {}", c.name.as_str(), c.detail)?;
        }
        write!(f, "overall: {}", if self.overall { "PASS" } else { "FAIL" })
    }
}

fn sign_balance(data: &FixedPointData) -> (bool, String) {
    let plus = data.count_sign(Sign::Plus);
    let minus = data.count_sign(Sign::Minus);
    (plus == minus, format!("{plus} positive, {minus} negative"))
}

fn weight_parity(data: &FixedPointData) -> (bool, String) {
    let mut counts: BTreeMap<&Weight, usize> = BTreeMap::new();
    for (p, n) in data.distinct() {
        for w in p.weights() {
            *counts.entry(w).or_insert(0) += n;
        }
    }
    let odd: Vec<String> = counts
        .iter()
        .filter(|(_, n)| *n % 2 == 1)
        .map(|(w, n)| format!("weight {w} occurs {n}x"))
        .collect();
    if odd.is_empty() {
        (true, format!("{} distinct weights, all even", counts.len()))
    } else {
        (false, odd.join("; "))
    }
}

fn smallest_weight_balance(data: &FixedPointData) -> (bool, String) {
    let Ok(a) = data.min_weight() else {
        return (true, NOT_APPLICABLE.to_string());
    };
    let side = |sign: Sign| -> usize {
        data.distinct()
            .filter(|(p, _)| p.sign() == sign)
            .map(|(p, n)| n * p.weight_count(&a))
            .sum()
    };
    let (plus, minus) = (side(Sign::Plus), side(Sign::Minus));
    (
        plus == minus,
        format!("smallest weight {a}: {plus} on + side, {minus} on - side"),
    )
}

fn top_weight_double(data: &FixedPointData) -> (bool, String) {
    let Ok((norm, _)) = data.normalize_effective() else {
        return (true, NOT_APPLICABLE.to_string());
    };
    let l = norm.max_weight().expect("non-empty");
    if l.is_one() {
        return (true, NOT_APPLICABLE.to_string());
    }
    // third weight -> (plus count, minus count) over points {l, l, a}
    let mut doubles: BTreeMap<&Weight, (usize, usize)> = BTreeMap::new();
    for (p, n) in norm.distinct() {
        let w = p.weights();
        if w[2] == l {
            return (false, format!("point {p} has all weights equal to {l}"));
        }
        if w[1] == l {
            let slot = doubles.entry(&w[2]).or_insert((0, 0));
            match p.sign() {
                Sign::Plus => slot.0 += n,
                Sign::Minus => slot.1 += n,
            }
        }
    }
    let unmatched: Vec<String> = doubles
        .iter()
        .filter(|(_, (plus, minus))| plus != minus)
        .map(|(a, (plus, minus))| format!("{{{l},{l},{a}}}: {plus} positive vs {minus} negative"))
        .collect();
    if unmatched.is_empty() {
        (true, format!("top weight {l}: {} matched classes", doubles.len()))
    } else {
        (false, unmatched.join("; "))
    }
}

fn signature_zero(data: &FixedPointData) -> (bool, String) {
    match reduced_signature_numerator(data) {
        Ok(p) if p.is_zero() => (true, "signature identity holds with signature 0".into()),
        Ok(p) => (
            false,
            format!("reduced numerator has degree {}", p.degree().unwrap_or(0)),
        ),
        Err(SymbolicError::DegreeTooLarge) => {
            (false, "weights too large to expand the identity".into())
        }
        Err(e) => (false, e.to_string()),
    }
}

fn two_points(data: &FixedPointData) -> (bool, String) {
    if data.len() != 2 {
        return (true, NOT_APPLICABLE.to_string());
    }
    let mut it = data.iter();
    let (p, q) = (it.next().unwrap(), it.next().unwrap());
    if !p.same_weights(q) {
        (false, format!("{p} and {q} have different weights"))
    } else if p.sign() == q.sign() {
        (false, format!("{p} and {q} have the same sign"))
    } else {
        (true, "weights equal, signs opposite".into())
    }
}

/// Equal numbers of positive and negative points.
pub fn check_sign_balance(data: &FixedPointData) -> bool {
    sign_balance(data).0
}

/// Every weight occurs an even number of times over all points.
pub fn check_weight_parity(data: &FixedPointData) -> bool {
    weight_parity(data).0
}

/// The smallest weight occurs equally often on both sides.
pub fn check_smallest_weight_balance(data: &FixedPointData) -> bool {
    smallest_weight_balance(data).0
}

/// At the biggest weight `l > 1` of the effective data, points `{+,l,l,a}`
/// and `{-,l,l,a}` are equinumerous for every `a`, and no point is `{l,l,l}`.
pub fn check_top_weight_double(data: &FixedPointData) -> bool {
    top_weight_double(data).0
}

pub fn check_signature_zero(data: &FixedPointData) -> bool {
    signature_zero(data).0
}

/// With exactly two points, they share weights and have opposite signs.
pub fn check_two_points(data: &FixedPointData) -> bool {
    two_points(data).0
}

/// Normalizes to an effective action and runs every check in order.
pub fn validate_all(data: &FixedPointData) -> ValidationReport {
    let (norm, divisor) = data
        .normalize_effective()
        .unwrap_or_else(|_| (FixedPointData::new(), Weight::one()));
    let checks: Vec<CheckResult> = CheckName::ALL.iter().map(|c| c.run(&norm)).collect();
    let overall = checks.iter().all(|c| c.passed);
    ValidationReport {
        divisor,
        checks,
        overall,
    }
}
