//! Rewriting fixed point data to the empty set by connected sums with model
//! manifolds, and replaying the resulting certificates.
//!
//! Every operation removes two points carrying the current biggest weight `C`
//! and adds points whose weights are all below `C`. The pair
//! `(biggest weight, number of times it occurs)` therefore decreases
//! lexicographically, which bounds the number of steps.

use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, Sign as BigSign};
use num_traits::{One, Zero};
use thiserror::Error;

use crate::fpdata::{FixedPoint, FixedPointData, Sign, Weight};
use crate::generators::{Family, GeneratorLabel};
use crate::validator::validate_all;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReduceError {
    #[error("operation not applicable: {0}")]
    NotApplicable(String),
    #[error("not realizable: {0}")]
    NotRealizable(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("step limit of {0} exceeded")]
    MaxStepsExceeded(usize),
}

fn not_applicable<T>(msg: impl Into<String>) -> Result<T, ReduceError> {
    Err(ReduceError::NotApplicable(msg.into()))
}

fn not_realizable<T>(msg: impl Into<String>) -> Result<T, ReduceError> {
    Err(ReduceError::NotRealizable(msg.into()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum OperationKind {
    Op1,
    Op2,
    Op3,
    Op3P,
    Op4,
    Op4P,
    Op5,
}

impl OperationKind {
    pub const ALL: [OperationKind; 7] = [
        OperationKind::Op1,
        OperationKind::Op2,
        OperationKind::Op3,
        OperationKind::Op3P,
        OperationKind::Op4,
        OperationKind::Op4P,
        OperationKind::Op5,
    ];

    pub fn name(self) -> &'static str {
        match self {
            OperationKind::Op1 => "OP1",
            OperationKind::Op2 => "OP2",
            OperationKind::Op3 => "OP3",
            OperationKind::Op3P => "OP3P",
            OperationKind::Op4 => "OP4",
            OperationKind::Op4P => "OP4P",
            OperationKind::Op5 => "OP5",
        }
    }

    /// Number of parameters: `(A, B, C)` or `(A, C)`.
    pub fn arity(self) -> usize {
        match self {
            OperationKind::Op4 | OperationKind::Op4P | OperationKind::Op5 => 2,
            _ => 3,
        }
    }

    pub fn added_len(self) -> usize {
        match self {
            OperationKind::Op1 => 0,
            OperationKind::Op2 => 2,
            OperationKind::Op5 => 8,
            _ => 4,
        }
    }

    pub fn family(self) -> Family {
        match self {
            OperationKind::Op1 => Family::S6,
            OperationKind::Op2 => Family::Cp3,
            OperationKind::Op3 | OperationKind::Op3P => Family::Z1,
            OperationKind::Op4 | OperationKind::Op4P => Family::Z2,
            OperationKind::Op5 => Family::Z2Sum,
        }
    }
}

impl fmt::Display for OperationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for OperationKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        OperationKind::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown operation kind `{s}`"))
    }
}

/// One operation: the two points taken out, the points put in, and the model
/// manifold whose connected sum effects the change.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReductionStep {
    pub kind: OperationKind,
    pub params: Vec<BigInt>,
    pub removed: Vec<FixedPoint>,
    pub added: Vec<FixedPoint>,
    pub generator: GeneratorLabel,
}

impl ReductionStep {
    /// Instantiates `kind` at `params`. `sign` is the sign written `±` in the
    /// operation's template; it is ignored by `OP1`, whose template is
    /// symmetric.
    pub fn new(kind: OperationKind, params: &[BigInt], sign: Sign) -> Result<Self, ReduceError> {
        if params.len() != kind.arity() {
            return not_applicable(format!(
                "{kind} takes {} parameters, got {}",
                kind.arity(),
                params.len()
            ));
        }
        if let Some(w) = params.iter().find(|w| w.sign() != BigSign::Plus) {
            return not_applicable(format!("{kind} parameter {w} is not positive"));
        }
        let s = sign;
        let t = sign.flip();
        let two = BigInt::from(2);
        let pt = |sg: Sign, a: &BigInt, b: &BigInt, c: &BigInt| -> Result<FixedPoint, ReduceError> {
            FixedPoint::new(sg, a.clone(), b.clone(), c.clone())
                .map_err(|e| ReduceError::NotApplicable(e.to_string()))
        };
        let (removed, added, reversed) = match kind {
            OperationKind::Op1 => {
                let (a, b, c) = (&params[0], &params[1], &params[2]);
                (vec![pt(Sign::Plus, a, b, c)?, pt(Sign::Minus, a, b, c)?], vec![], false)
            }
            OperationKind::Op2 => {
                let (a, b, c) = (&params[0], &params[1], &params[2]);
                if !(a < b && b < c) {
                    return not_applicable("OP2 requires A < B < C");
                }
                let removed = vec![pt(s, a, b, c)?, pt(t, &(c - a), &(c - b), c)?];
                let added = vec![
                    pt(s, a, &(b - a), &(c - a))?,
                    pt(t, b, &(b - a), &(c - b))?,
                ];
                (removed, added, s == Sign::Plus)
            }
            OperationKind::Op3 | OperationKind::Op3P => {
                let (a, b, c) = (&params[0], &params[1], &params[2]);
                let removed = vec![pt(s, a, b, c)?, pt(s, a, &(c - b), c)?];
                let added = if kind == OperationKind::Op3 {
                    if !(a < b && b < c) {
                        return not_applicable("OP3 requires A < B < C");
                    }
                    vec![
                        pt(s, &(c - b), &(c - a), a)?,
                        pt(s, &(c - b), b, a)?,
                        pt(t, &(c - b), &(b - a), a)?,
                        pt(s, &(c - a), &(b - a), a)?,
                    ]
                } else {
                    if !(b < a && a < c) {
                        return not_applicable("OP3P requires B < A < C");
                    }
                    vec![
                        pt(s, &(c - b), &(c - a), a)?,
                        pt(s, &(c - b), b, a)?,
                        pt(s, &(c - b), &(a - b), a)?,
                        pt(t, &(c - a), &(a - b), a)?,
                    ]
                };
                (removed, added, s == Sign::Plus)
            }
            OperationKind::Op4 | OperationKind::Op4P => {
                let (a, c) = (&params[0], &params[1]);
                let removed = vec![pt(s, a, a, c)?, pt(s, a, &(c - a), c)?];
                let twice = &two * a;
                let added = if kind == OperationKind::Op4 {
                    if twice >= *c {
                        return not_applicable("OP4 requires 2A < C");
                    }
                    vec![
                        pt(s, &(c - a), &(c - &twice), a)?,
                        pt(s, &(c - a), a, a)?,
                        pt(s, &(c - a), a, a)?,
                        pt(t, &(c - &twice), a, a)?,
                    ]
                } else {
                    if !(a < c && *c < twice) {
                        return not_applicable("OP4P requires A < C < 2A");
                    }
                    vec![
                        pt(t, &(c - a), &(&twice - c), a)?,
                        pt(s, &(c - a), a, a)?,
                        pt(s, &(c - a), a, a)?,
                        pt(s, &(&twice - c), a, a)?,
                    ]
                };
                (removed, added, s == Sign::Plus)
            }
            OperationKind::Op5 => {
                let (a, c) = (&params[0], &params[1]);
                let twice = &two * a;
                if twice >= *c {
                    return not_applicable("OP5 requires 2A < C");
                }
                let (d, e) = (c - a, c - &twice);
                let removed = vec![pt(s, c, a, a)?, pt(t, c, &d, &d)?];
                let added = vec![
                    pt(s, &d, &e, a)?,
                    pt(s, &d, a, a)?,
                    pt(s, &d, a, a)?,
                    pt(t, &e, a, a)?,
                    pt(s, a, &e, &d)?,
                    pt(t, a, &d, &d)?,
                    pt(t, a, &d, &d)?,
                    pt(t, &e, &d, &d)?,
                ];
                (removed, added, s == Sign::Plus)
            }
        };
        let gen_params = match kind {
            OperationKind::Op1 | OperationKind::Op2 => params.to_vec(),
            OperationKind::Op3 | OperationKind::Op3P => {
                vec![params[2].clone(), params[1].clone(), params[0].clone()]
            }
            OperationKind::Op4 | OperationKind::Op4P => {
                vec![params[1].clone(), params[0].clone(), params[0].clone()]
            }
            OperationKind::Op5 => vec![params[1].clone(), params[0].clone()],
        };
        let mut removed = removed;
        let mut added = added;
        removed.sort();
        added.sort();
        Ok(ReductionStep {
            kind,
            params: params.to_vec(),
            removed,
            added,
            generator: GeneratorLabel::new(kind.family(), gen_params, reversed),
        })
    }

    /// The same operation with every sign flipped and the generator's
    /// orientation reversed. `S6` is its own mirror image.
    pub fn mirrored(&self) -> ReductionStep {
        let flip = |v: &[FixedPoint]| {
            let mut out: Vec<FixedPoint> = v.iter().map(|p| p.reversed()).collect();
            out.sort();
            out
        };
        let mut generator = self.generator.clone();
        if self.kind != OperationKind::Op1 {
            generator.reversed = !generator.reversed;
        }
        ReductionStep {
            kind: self.kind,
            params: self.params.clone(),
            removed: flip(&self.removed),
            added: flip(&self.added),
            generator,
        }
    }

    /// The biggest weight among the removed points, `C` in the template.
    pub fn top_weight(&self) -> Option<&Weight> {
        self.removed.iter().map(|p| p.max_weight()).max()
    }
}

impl fmt::Display for ReductionStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(", self.kind)?;
        for (i, p) in self.params.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, ") with {}: remove", self.generator)?;
        for p in &self.removed {
            write!(f, " {p}")?;
        }
        write!(f, "; add")?;
        if self.added.is_empty() {
            write!(f, " nothing")?;
        }
        for p in &self.added {
            write!(f, " {p}")?;
        }
        Ok(())
    }
}

fn as_multiset(points: &[FixedPoint]) -> FixedPointData {
    points.iter().cloned().collect()
}

/// Applies `step` to `data` after checking that the step is a correct
/// instance of its operation template, in either orientation.
pub fn apply_operation(
    data: &FixedPointData,
    step: &ReductionStep,
) -> Result<FixedPointData, ReduceError> {
    let removed = as_multiset(&step.removed);
    let added = as_multiset(&step.added);
    let mut mismatch = format!(
        "removed points do not match the {} template at these parameters",
        step.kind
    );
    let mut matched = false;
    for sign in [Sign::Plus, Sign::Minus] {
        let t = ReductionStep::new(step.kind, &step.params, sign)?;
        if as_multiset(&t.removed) != removed {
            continue;
        }
        if as_multiset(&t.added) != added {
            mismatch = format!("added points do not match the {} template", step.kind);
        } else if t.generator != step.generator {
            mismatch = format!("generator {} does not match the template", step.generator);
        } else {
            matched = true;
            break;
        }
    }
    if !matched {
        return not_applicable(mismatch);
    }
    let mut out = data.clone();
    if out.remove_all(&step.removed).is_err() {
        return not_applicable("a removed point is not present in the data");
    }
    out.extend(step.added.iter().cloned());
    Ok(out)
}

/// Which of `p`'s two smaller weights the partner replaces by its
/// complement in `l`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ComplementedSlot {
    Larger,
    Smaller,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PartnerCase {
    /// Opposite sign, same weights.
    Same(FixedPoint),
    /// Opposite sign, both smaller weights replaced by `l - x`, `l - y`.
    Complement(FixedPoint),
    /// Same sign, one smaller weight replaced by its complement.
    Mixed {
        partner: FixedPoint,
        complemented: ComplementedSlot,
    },
}

impl PartnerCase {
    pub fn partner(&self) -> &FixedPoint {
        match self {
            PartnerCase::Same(q) | PartnerCase::Complement(q) => q,
            PartnerCase::Mixed { partner, .. } => partner,
        }
    }
}

fn point(sign: Sign, a: &Weight, b: &Weight, c: &Weight) -> FixedPoint {
    FixedPoint::from_weights(sign, [a.clone(), b.clone(), c.clone()])
        .expect("weights below l are positive")
}

/// Finds a fixed point that can be removed together with `p`, where `l` is
/// the biggest weight of `data` and `p` carries it.
///
/// With `p = {e, l, x, y}`, `x >= y`, the candidates are tried in the order
/// `{-e,l,x,y}`, `{-e,l,l-x,l-y}`, `{e,l,x,l-y}`, `{e,l,l-x,y}`. When
/// `x + y = l` the first two coincide; the point is then reported as a
/// complement only if the rest of a `CP3` pattern is also present, so that
/// an embedded `CP3` is reduced through its own operation.
pub fn find_partner(
    data: &FixedPointData,
    p: &FixedPoint,
    l: &Weight,
) -> Result<PartnerCase, ReduceError> {
    if !data.contains(p) {
        return Err(ReduceError::InvalidInput(format!("{p} is not in the data")));
    }
    let available = |q: &FixedPoint| data.count(q) > usize::from(q == p);
    let e = p.sign();
    let [w0, x, y] = p.weights();
    match p.weight_count(l) {
        0 => {
            return Err(ReduceError::InvalidInput(format!(
                "{p} does not carry weight {l}"
            )))
        }
        3 => return not_realizable(format!("{p} has all weights equal to {l}")),
        2 => {
            let q = point(e.flip(), l, l, y);
            return if available(&q) {
                Ok(PartnerCase::Same(q))
            } else {
                not_realizable(format!("no partner {q} for {p}"))
            };
        }
        _ => {}
    }
    if w0 != l {
        return Err(ReduceError::InvalidInput(format!(
            "{l} is not the biggest weight of {p}"
        )));
    }
    let (lx, ly) = (l - x, l - y);
    let same = point(e.flip(), l, x, y);
    let complement = point(e.flip(), l, &lx, &ly);
    if same == complement && x != y {
        if available(&same) {
            let closure = [
                point(e.flip(), y, &(x - y), &ly),
                point(e, x, &(x - y), &lx),
            ];
            return Ok(if data.contains_all(&closure) {
                PartnerCase::Complement(same)
            } else {
                PartnerCase::Same(same)
            });
        }
    } else {
        if available(&same) {
            return Ok(PartnerCase::Same(same));
        }
        if available(&complement) {
            return Ok(PartnerCase::Complement(complement));
        }
    }
    let mixed = [
        (point(e, l, x, &ly), ComplementedSlot::Smaller),
        (point(e, l, &lx, y), ComplementedSlot::Larger),
    ];
    for (q, complemented) in mixed {
        if available(&q) {
            return Ok(PartnerCase::Mixed {
                partner: q,
                complemented,
            });
        }
    }
    not_realizable(format!("no partner for {p} at weight {l}"))
}

fn int(w: &Weight) -> BigInt {
    BigInt::from(w.clone())
}

/// Chooses the operation that removes `p` and its partner.
fn dispatch(p: &FixedPoint, l: &Weight, case: &PartnerCase) -> Result<ReductionStep, ReduceError> {
    let e = p.sign();
    let [_, x, y] = p.weights();
    let two = Weight::from(2u8);
    let (kind, params, sign) = match case {
        PartnerCase::Same(_) => {
            let w = p.weights();
            (OperationKind::Op1, vec![int(&w[0]), int(&w[1]), int(&w[2])], e)
        }
        PartnerCase::Complement(_) if x != y => {
            (OperationKind::Op2, vec![int(y), int(x), int(l)], e)
        }
        PartnerCase::Complement(_) => {
            let lx = l - x;
            if &lx == x {
                return not_realizable(format!("{p} has 2x = l with l > 2"));
            }
            if x < &lx {
                (OperationKind::Op5, vec![int(x), int(l)], e)
            } else {
                (OperationKind::Op5, vec![int(&lx), int(l)], e.flip())
            }
        }
        PartnerCase::Mixed { complemented, .. } if x != y => match complemented {
            ComplementedSlot::Smaller => (OperationKind::Op3P, vec![int(x), int(y), int(l)], e),
            ComplementedSlot::Larger => (OperationKind::Op3, vec![int(y), int(x), int(l)], e),
        },
        PartnerCase::Mixed { .. } => {
            let twice = &two * x;
            if &twice < l {
                (OperationKind::Op4, vec![int(x), int(l)], e)
            } else if &twice > l {
                (OperationKind::Op4P, vec![int(x), int(l)], e)
            } else {
                return not_realizable(format!("{p} has 2x = l with l > 2"));
            }
        }
    };
    ReductionStep::new(kind, &params, sign)
}

/// Lexicographic termination measure: the biggest weight and the number of
/// times it occurs. `None` for empty data.
pub fn termination_measure(data: &FixedPointData) -> Option<(Weight, usize)> {
    let l = data.max_weight().ok()?;
    let n = data.weight_occurrences(&l);
    Some((l, n))
}

/// Performs one step on non-empty data that passes validation.
///
/// Of the data and its mirror image, the one that comes first in canonical
/// order is reduced and the step mirrored back if needed, so that mirror
/// images get mirror-image steps. The step removes the canonically first
/// point carrying the biggest weight `l` and its partner. When `l` is at most
/// twice the common divisor of the weights, the point is paired with its
/// mirror image.
pub fn reduce_once(data: &FixedPointData) -> Result<(FixedPointData, ReductionStep), ReduceError> {
    let mirror = data.reverse_orientation();
    if mirror.iter().lt(data.iter()) {
        let (next, step) = reduce_oriented(&mirror)?;
        return Ok((next.reverse_orientation(), step.mirrored()));
    }
    reduce_oriented(data)
}

fn reduce_oriented(data: &FixedPointData) -> Result<(FixedPointData, ReductionStep), ReduceError> {
    let (Ok(l), Ok(g)) = (data.max_weight(), data.overall_gcd()) else {
        return Err(ReduceError::InvalidInput("no fixed points to remove".into()));
    };
    let p = data
        .iter()
        .find(|q| q.max_weight() == &l)
        .expect("some point carries the biggest weight")
        .clone();
    let step = if l <= &g * 2u8 {
        let q = p.reversed();
        if data.count(&q) == 0 {
            return not_realizable(format!("{p} has no mirror point"));
        }
        let w = p.weights();
        ReductionStep::new(
            OperationKind::Op1,
            &[int(&w[0]), int(&w[1]), int(&w[2])],
            p.sign(),
        )?
    } else {
        if p.weight_count(&l) == 3 {
            return not_realizable(format!("{p} has all weights equal to {l}"));
        }
        let case = find_partner(data, &p, &l)?;
        dispatch(&p, &l, &case)?
    };
    let next = apply_operation(data, &step)?;
    Ok((next, step))
}

/// A replayable reduction of `initial` to the empty set.
///
/// The steps act on `initial` with all weights divided by
/// `effectiveness_divisor`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CobordismCertificate {
    pub initial: FixedPointData,
    pub steps: Vec<ReductionStep>,
    pub effectiveness_divisor: Weight,
}

impl CobordismCertificate {
    pub fn kinds(&self) -> Vec<OperationKind> {
        self.steps.iter().map(|s| s.kind).collect()
    }
}

/// Upper bound on the number of steps, four per weight slot of the input.
pub fn step_cap(data: &FixedPointData) -> usize {
    4 * 3 * data.len()
}

fn validation_summary(data: &FixedPointData) -> Option<String> {
    let report = validate_all(data);
    if report.passed() {
        return None;
    }
    let failed: Vec<String> = report
        .failures()
        .map(|c| format!("{} ({})", c.name, c.detail))
        .collect();
    Some(failed.join("; "))
}

pub fn reduce_to_empty(data: &FixedPointData) -> Result<CobordismCertificate, ReduceError> {
    if let Some(msg) = validation_summary(data) {
        return Err(ReduceError::InvalidInput(msg));
    }
    let (mut current, divisor) = if data.is_empty() {
        (FixedPointData::new(), Weight::one())
    } else {
        data.normalize_effective()
            .map_err(|e| ReduceError::InvalidInput(e.to_string()))?
    };
    let cap = step_cap(data);
    let mut steps = Vec::new();
    while !current.is_empty() {
        if steps.len() >= cap {
            return Err(ReduceError::MaxStepsExceeded(cap));
        }
        let (next, step) = reduce_once(&current)?;
        steps.push(step);
        current = next;
    }
    Ok(CobordismCertificate {
        initial: data.clone(),
        steps,
        effectiveness_divisor: divisor,
    })
}

/// Replays `cert` using only [`apply_operation`], validating every
/// intermediate state. Reports the first failure.
pub fn check_certificate(cert: &CobordismCertificate) -> Result<(), String> {
    let mut current = if cert.initial.is_empty() {
        if !cert.effectiveness_divisor.is_one() {
            return Err("empty data must have divisor 1".into());
        }
        FixedPointData::new()
    } else {
        let (norm, g) = cert
            .initial
            .normalize_effective()
            .map_err(|e| e.to_string())?;
        if g != cert.effectiveness_divisor {
            return Err(format!(
                "divisor {} does not match the weights' common divisor {g}",
                cert.effectiveness_divisor
            ));
        }
        norm
    };
    if cert.effectiveness_divisor.is_zero() {
        return Err("divisor must be positive".into());
    }
    if let Some(msg) = validation_summary(&current) {
        return Err(format!("initial data fails validation: {msg}"));
    }
    for (i, step) in cert.steps.iter().enumerate() {
        current = apply_operation(&current, step).map_err(|e| format!("step {}: {e}", i + 1))?;
        if let Some(msg) = validation_summary(&current) {
            return Err(format!("after step {}: {msg}", i + 1));
        }
    }
    if !current.is_empty() {
        return Err(format!("{} points remain after the last step", current.len()));
    }
    Ok(())
}

pub fn verify_certificate(cert: &CobordismCertificate) -> bool {
    check_certificate(cert).is_ok()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fpdata::fp;
    use crate::generators::{gen_cp3, gen_s6, gen_z2sum, gen_zn};
    use crate::validator::{check_sign_balance, check_signature_zero, check_weight_parity};
    use proptest::prelude::*;
    use Sign::{Minus, Plus};

    fn data(points: &[(Sign, i64, i64, i64)]) -> FixedPointData {
        points.iter().map(|&(s, a, b, c)| fp(s, a, b, c)).collect()
    }

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    fn w(x: u32) -> Weight {
        Weight::from(x)
    }

    #[test]
    fn kind_names_round_trip() {
        for k in OperationKind::ALL {
            assert_eq!(k.name().parse::<OperationKind>().unwrap(), k);
        }
        assert!("OP6".parse::<OperationKind>().is_err());
    }

    #[test]
    fn op2_on_cp3() {
        let step = ReductionStep::new(OperationKind::Op2, &ints(&[1, 2, 3]), Plus).unwrap();
        let out = apply_operation(&gen_cp3(1, 2, 3).unwrap(), &step).unwrap();
        assert_eq!(
            out,
            data(&[(Minus, 2, 1, 1), (Plus, 2, 1, 1), (Plus, 2, 1, 1), (Minus, 2, 1, 1)])
        );
    }

    #[test]
    fn op1_empties_a_pair() {
        let step = ReductionStep::new(OperationKind::Op1, &ints(&[2, 1, 1]), Plus).unwrap();
        let out = apply_operation(&data(&[(Plus, 2, 1, 1), (Minus, 2, 1, 1)]), &step).unwrap();
        assert!(out.is_empty());
    }

    #[test]
    fn op4_example() {
        let step = ReductionStep::new(OperationKind::Op4, &ints(&[1, 3]), Plus).unwrap();
        let out = apply_operation(&data(&[(Plus, 3, 1, 1), (Plus, 3, 2, 1)]), &step).unwrap();
        assert_eq!(
            out,
            data(&[(Plus, 2, 1, 1), (Plus, 2, 1, 1), (Plus, 2, 1, 1), (Minus, 1, 1, 1)])
        );
    }

    #[test]
    fn side_conditions_are_enforced() {
        let bad: [(OperationKind, &[i64]); 7] = [
            (OperationKind::Op2, &[2, 2, 3]),
            (OperationKind::Op3, &[2, 1, 3]),
            (OperationKind::Op3P, &[1, 2, 3]),
            (OperationKind::Op4, &[2, 4]),
            (OperationKind::Op4P, &[1, 3]),
            (OperationKind::Op5, &[3, 5]),
            (OperationKind::Op1, &[1, 0, 1]),
        ];
        for (kind, params) in bad {
            assert!(
                matches!(
                    ReductionStep::new(kind, &ints(params), Plus),
                    Err(ReduceError::NotApplicable(_))
                ),
                "{kind} {params:?}"
            );
        }
        assert!(ReductionStep::new(OperationKind::Op4, &ints(&[1, 2, 3]), Plus).is_err());
    }

    #[test]
    fn apply_rejects_missing_points() {
        let step = ReductionStep::new(OperationKind::Op2, &ints(&[1, 2, 3]), Plus).unwrap();
        let err = apply_operation(&gen_s6(1, 1, 1).unwrap(), &step).unwrap_err();
        assert!(matches!(err, ReduceError::NotApplicable(_)));
    }

    #[test]
    fn apply_accepts_both_mirror_images() {
        let plus = ReductionStep::new(OperationKind::Op2, &ints(&[1, 2, 3]), Plus).unwrap();
        let minus = ReductionStep::new(OperationKind::Op2, &ints(&[1, 2, 3]), Minus).unwrap();
        let d = gen_cp3(1, 2, 3).unwrap();
        assert!(apply_operation(&d, &plus).is_ok());
        assert!(apply_operation(&d.reverse_orientation(), &minus).is_ok());
        // CP3(1,2,3) is its own mirror image, so use an asymmetric instance
        let d = gen_cp3(1, 2, 4).unwrap();
        let mut forged = ReductionStep::new(OperationKind::Op2, &ints(&[1, 2, 4]), Plus).unwrap();
        assert!(apply_operation(&d, &forged).is_ok());
        forged.generator.reversed = !forged.generator.reversed;
        assert!(apply_operation(&d, &forged).is_err());
    }

    // Each operation is a connected sum with its generator: the generator
    // holds the mirrors of the removed points, and the rest is what is added.
    fn assert_connected_sum_shape(step: &ReductionStep) {
        let g = step.generator.data().unwrap();
        let mut expected: FixedPointData = step.removed.iter().map(|p| p.reversed()).collect();
        expected.extend(step.added.iter().cloned());
        assert_eq!(g, expected, "{step}");
    }

    fn admissible(kind: OperationKind) -> Vec<Vec<i64>> {
        let mut out = Vec::new();
        for c in 1..=12i64 {
            for b in 1..c {
                for a in 1..c {
                    let ok = match kind {
                        OperationKind::Op1 => true,
                        OperationKind::Op2 | OperationKind::Op3 => a < b,
                        OperationKind::Op3P => b < a,
                        _ => false,
                    };
                    if ok {
                        out.push(vec![a, b, c]);
                    }
                }
            }
            for a in 1..c {
                let ok = match kind {
                    OperationKind::Op4 | OperationKind::Op5 => 2 * a < c,
                    OperationKind::Op4P => c < 2 * a,
                    _ => false,
                };
                if ok {
                    out.push(vec![a, c]);
                }
            }
        }
        out
    }

    #[test]
    fn every_operation_is_a_connected_sum_with_its_generator() {
        for kind in OperationKind::ALL {
            let cases = admissible(kind);
            assert!(!cases.is_empty());
            for params in cases {
                for sign in [Plus, Minus] {
                    let step = ReductionStep::new(kind, &ints(&params), sign).unwrap();
                    assert_eq!(step.removed.len(), 2);
                    assert_eq!(step.added.len(), kind.added_len());
                    let c = step.top_weight().unwrap().clone();
                    assert!(step.removed.iter().all(|p| p.max_weight() == &c));
                    assert!(step.added.iter().all(|p| p.max_weight() < &c));
                    assert_connected_sum_shape(&step);
                }
            }
        }
    }

    #[test]
    fn mirrored_step_is_the_flipped_template() {
        for kind in OperationKind::ALL {
            for params in admissible(kind).into_iter().take(20) {
                let plus = ReductionStep::new(kind, &ints(&params), Plus).unwrap();
                let minus = ReductionStep::new(kind, &ints(&params), Minus).unwrap();
                assert_eq!(plus.mirrored(), minus);
                assert_eq!(plus.mirrored().mirrored(), plus);
            }
        }
    }

    #[test]
    fn find_partner_examples() {
        let cp3 = gen_cp3(1, 2, 3).unwrap();
        assert_eq!(
            find_partner(&cp3, &fp(Plus, 3, 2, 1), &w(3)).unwrap(),
            PartnerCase::Complement(fp(Minus, 3, 2, 1))
        );
        let d = data(&[(Plus, 3, 3, 1), (Minus, 3, 3, 1), (Plus, 3, 2, 1), (Minus, 3, 2, 1)]);
        assert_eq!(
            find_partner(&d, &fp(Plus, 3, 3, 1), &w(3)).unwrap(),
            PartnerCase::Same(fp(Minus, 3, 3, 1))
        );
        let d = data(&[(Plus, 3, 2, 1), (Plus, 3, 2, 2)]);
        assert_eq!(
            find_partner(&d, &fp(Plus, 3, 2, 1), &w(3)).unwrap(),
            PartnerCase::Mixed {
                partner: fp(Plus, 3, 2, 2),
                complemented: ComplementedSlot::Smaller
            }
        );
    }

    #[test]
    fn find_partner_on_bare_s6_is_same() {
        let s6 = gen_s6(1, 2, 3).unwrap();
        assert_eq!(
            find_partner(&s6, &fp(Plus, 3, 2, 1), &w(3)).unwrap(),
            PartnerCase::Same(fp(Minus, 3, 2, 1))
        );
    }

    #[test]
    fn find_partner_failures() {
        let d = data(&[(Plus, 5, 2, 1), (Minus, 5, 3, 3)]);
        assert!(matches!(
            find_partner(&d, &fp(Plus, 5, 2, 1), &w(5)),
            Err(ReduceError::NotRealizable(_))
        ));
        let d = data(&[(Plus, 3, 3, 1), (Minus, 3, 3, 2)]);
        assert!(matches!(
            find_partner(&d, &fp(Plus, 3, 3, 1), &w(3)),
            Err(ReduceError::NotRealizable(_))
        ));
        // a point is never its own partner
        let d = data(&[(Plus, 4, 2, 2)]);
        assert!(find_partner(&d, &fp(Plus, 4, 2, 2), &w(4)).is_err());
        assert!(matches!(
            find_partner(&d, &fp(Plus, 1, 1, 1), &w(4)),
            Err(ReduceError::InvalidInput(_))
        ));
    }

    #[test]
    fn reduce_once_on_cp3() {
        let (next, step) = reduce_once(&gen_cp3(1, 2, 3).unwrap()).unwrap();
        assert_eq!(step.kind, OperationKind::Op2);
        assert_eq!(step.removed, vec![fp(Plus, 3, 2, 1), fp(Minus, 3, 2, 1)]);
        assert_eq!(as_multiset(&step.added), data(&[(Plus, 2, 1, 1), (Minus, 2, 1, 1)]));
        assert_eq!(next.len(), 4);
    }

    #[test]
    fn reduce_once_on_unit_pair() {
        let (next, step) = reduce_once(&gen_s6(1, 1, 1).unwrap()).unwrap();
        assert_eq!(step.kind, OperationKind::Op1);
        assert!(next.is_empty());
    }

    #[test]
    fn reduce_once_on_z1_removes_top_weight_points() {
        let z1 = gen_zn(1, 3, 2, 1).unwrap();
        let (_, step) = reduce_once(&z1).unwrap();
        assert!(step.removed.iter().all(|p| p.max_weight() == &w(3)));
        assert!(step.removed.contains(&fp(Plus, 3, 1, 1)));
    }

    #[test]
    fn reduce_once_rejects_triple_top_weight() {
        let d = data(&[(Plus, 3, 3, 3), (Minus, 3, 3, 3), (Plus, 1, 1, 1), (Minus, 1, 1, 1)]);
        assert!(matches!(reduce_once(&d), Err(ReduceError::NotRealizable(_))));
    }

    #[test]
    fn cp3_reduces_in_three_steps() {
        let cert = reduce_to_empty(&gen_cp3(1, 2, 3).unwrap()).unwrap();
        use OperationKind::*;
        assert_eq!(cert.kinds(), vec![Op2, Op1, Op1]);
        assert!(verify_certificate(&cert));
    }

    #[test]
    fn s6_reduces_in_one_step() {
        for (a, b, c) in [(1, 2, 3), (4, 4, 1), (5, 3, 2), (2, 2, 2)] {
            let cert = reduce_to_empty(&gen_s6(a, b, c).unwrap()).unwrap();
            assert_eq!(cert.kinds(), vec![OperationKind::Op1]);
            assert!(verify_certificate(&cert));
        }
    }

    #[test]
    fn z2sum_reduces_and_replays() {
        let cert = reduce_to_empty(&gen_z2sum(5, 2).unwrap()).unwrap();
        assert_eq!(cert.kinds().first(), Some(&OperationKind::Op5));
        assert!(verify_certificate(&cert));
    }

    #[test]
    fn reduce_records_divisor() {
        let cert = reduce_to_empty(&gen_cp3(3, 6, 9).unwrap()).unwrap();
        assert_eq!(cert.effectiveness_divisor, w(3));
        assert_eq!(cert.kinds().len(), 3);
        assert!(verify_certificate(&cert));
    }

    #[test]
    fn empty_data_has_empty_certificate() {
        let cert = reduce_to_empty(&FixedPointData::new()).unwrap();
        assert!(cert.steps.is_empty());
        assert!(verify_certificate(&cert));
    }

    #[test]
    fn invalid_input_is_reported_before_any_step() {
        for d in [
            data(&[(Plus, 1, 1, 1)]),
            data(&[(Plus, 3, 2, 1), (Plus, 3, 2, 1)]),
            data(&[(Plus, 1, 2, 3), (Minus, 1, 2, 4)]),
        ] {
            assert!(matches!(reduce_to_empty(&d), Err(ReduceError::InvalidInput(_))));
        }
    }

    #[test]
    fn tampered_certificates_fail() {
        let cert = reduce_to_empty(&gen_cp3(1, 2, 4).unwrap()).unwrap();
        assert_eq!(cert.steps.len(), 3);

        let mut t = cert.clone();
        let p = &t.steps[0].added[0];
        let mut ws: Vec<BigInt> = p.weights().iter().map(int).collect();
        ws[0] += 1;
        t.steps[0].added[0] = FixedPoint::new(p.sign(), ws[0].clone(), ws[1].clone(), ws[2].clone()).unwrap();
        assert!(!verify_certificate(&t));

        let mut t = cert.clone();
        t.steps.swap(0, 2);
        assert!(check_certificate(&t).unwrap_err().contains("step 1"));

        let mut t = cert.clone();
        t.steps.pop();
        assert!(!verify_certificate(&t));

        let mut t = cert;
        t.effectiveness_divisor = w(2);
        assert!(!verify_certificate(&t));
    }

    fn step_strategy() -> impl Strategy<Value = ReductionStep> {
        let kinds = proptest::sample::select(OperationKind::ALL.to_vec());
        (kinds, 1i64..40, 1i64..40, 1i64..40, any::<bool>()).prop_filter_map(
            "inadmissible",
            |(kind, a, b, c, plus)| {
                let params = if kind.arity() == 3 { vec![a, b, c] } else { vec![a, c] };
                let sign = if plus { Plus } else { Minus };
                ReductionStep::new(kind, &ints(&params), sign).ok()
            },
        )
    }

    fn ordered_triple() -> impl Strategy<Value = (i64, i64, i64)> {
        (1i64..4, 1i64..4, 1i64..4).prop_map(|(a, b, c)| (a, a + b, a + b + c))
    }

    proptest! {
        #[test]
        fn operations_preserve_the_necessary_conditions(
            step in step_strategy(),
            bg in (1i64..6, 1i64..6, 1i64..6),
        ) {
            let mut d: FixedPointData = step.removed.iter().cloned().collect();
            // close the removed pair into valid data with the generator's remainder
            let g = step.generator.data().unwrap();
            let mut rest = g.clone();
            rest.remove_all(&step.removed.iter().map(|p| p.reversed()).collect::<Vec<_>>()).unwrap();
            d = d.union(&rest.reverse_orientation());
            d = d.union(&gen_s6(bg.0, bg.1, bg.2).unwrap());
            prop_assert!(check_signature_zero(&d));
            let out = apply_operation(&d, &step).unwrap();
            prop_assert!(check_signature_zero(&out));
            prop_assert!(check_sign_balance(&out));
            prop_assert!(check_weight_parity(&out));
            let diff = out.len() as i64 - d.len() as i64;
            prop_assert!([-2, 0, 2, 6].contains(&diff));
        }

        #[test]
        fn measure_strictly_decreases((a, b, c) in ordered_triple(), rev in any::<bool>()) {
            let mut d = gen_cp3(a, b, c).unwrap().union(&gen_zn(1, c + 1, a, b).unwrap());
            if rev {
                d = d.reverse_orientation();
            }
            let cert = reduce_to_empty(&d).unwrap();
            let mut cur = d;
            let mut last = termination_measure(&cur);
            for s in &cert.steps {
                cur = apply_operation(&cur, s).unwrap();
                let m = termination_measure(&cur);
                prop_assert!(m < last);
                last = m;
            }
        }

        #[test]
        fn mirror_image_reduces_in_as_many_steps((a, b, c) in ordered_triple()) {
            for d in [gen_cp3(a, b, c).unwrap(), gen_zn(1, c, b, a).unwrap(), gen_zn(2, c, a, a).unwrap_or_default()] {
                let fwd = reduce_to_empty(&d);
                let back = reduce_to_empty(&d.reverse_orientation());
                prop_assert_eq!(fwd.is_ok(), back.is_ok());
                if let (Ok(f), Ok(b)) = (fwd, back) {
                    prop_assert_eq!(f.steps.len(), b.steps.len());
                    // states that are their own mirror image get the same step
                    for (x, y) in f.steps.iter().zip(&b.steps) {
                        prop_assert!(*y == x.mirrored() || y == x);
                    }
                }
            }
        }
    }
}
