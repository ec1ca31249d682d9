//! Random fixed point data of iterated equivariant connected sums of the
//! model manifolds, and a fuzz driver that reduces and replays each sample.

use num_bigint::BigInt;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::fpdata::{FixedPoint, FixedPointData};
use crate::generators::{connected_sum, Family, GeneratorLabel};
use crate::reducer::{check_certificate, reduce_to_empty};

/// Attempts at finding a summand that shares a gluing point with the sum so
/// far, before that summand is skipped.
const GLUE_ATTEMPTS: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SampleConfig {
    pub max_summands: usize,
    pub max_param: u32,
}

impl Default for SampleConfig {
    fn default() -> Self {
        SampleConfig {
            max_summands: 12,
            max_param: 10,
        }
    }
}

/// Deterministic generator for iteration `index` of a run seeded with `seed`.
pub fn iteration_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

fn label(family: Family, params: &[u32], reversed: bool) -> GeneratorLabel {
    GeneratorLabel::new(family, params.iter().map(|&p| BigInt::from(p)).collect(), reversed)
}

/// A random model manifold with parameters in `1..=max_param` and random
/// orientation. Families whose constraints cannot be met fall back to `S6`.
pub fn random_generator<R: Rng + ?Sized>(rng: &mut R, max_param: u32) -> GeneratorLabel {
    let p = max_param.max(1);
    let reversed = rng.gen_bool(0.5);
    let families = [Family::S6, Family::Cp3, Family::Z1, Family::Z2, Family::Z2Sum];
    let family = *families.choose(rng).expect("non-empty");
    let mut draw = || rng.gen_range(1..=p);
    match family {
        Family::Cp3 if p >= 3 => {
            loop {
                let mut v = [draw(), draw(), draw()];
                v.sort_unstable();
                if v[0] < v[1] && v[1] < v[2] {
                    return label(Family::Cp3, &v, reversed);
                }
            }
        }
        Family::Z1 | Family::Z2 if p >= 2 => {
            let n = if family == Family::Z1 { 1 } else { 2 };
            loop {
                let (a, b, c) = (draw(), draw(), draw());
                if a != b && n * c != a && n * c != b {
                    return label(family, &[a, b, c], reversed);
                }
            }
        }
        Family::Z2Sum if p >= 3 => {
            let a = 3 + draw() % (p - 2);
            let e = 1 + draw() % ((a - 1) / 2);
            label(Family::Z2Sum, &[a, e], reversed)
        }
        _ => label(Family::S6, &[draw(), draw(), draw()], reversed),
    }
}

/// A connected sum of up to `max_summands` random model manifolds.
///
/// Each new summand is glued at a randomly chosen pair of points with equal
/// weights and opposite signs. Summands that share no such pair with the
/// sum so far are redrawn, and skipped after a bounded number of attempts.
/// Returns the data and the labels of the summands actually used.
pub fn random_connected_sum<R: Rng + ?Sized>(
    rng: &mut R,
    cfg: &SampleConfig,
) -> (FixedPointData, Vec<GeneratorLabel>) {
    let first = random_generator(rng, cfg.max_param);
    let mut data = first.data().expect("sampled parameters are admissible");
    let mut used = vec![first];
    let target = rng.gen_range(1..=cfg.max_summands.max(1));
    for _ in 1..target {
        for _ in 0..GLUE_ATTEMPTS {
            let g = random_generator(rng, cfg.max_param);
            let gdata = g.data().expect("sampled parameters are admissible");
            let pairs: Vec<(FixedPoint, FixedPoint)> = gdata
                .distinct()
                .filter_map(|(q, _)| {
                    let p = q.reversed();
                    data.contains(&p).then(|| (p, q.clone()))
                })
                .collect();
            if let Some(pair) = pairs.choose(rng) {
                data = connected_sum(&data, &gdata, std::slice::from_ref(pair))
                    .expect("pair was checked to be present");
                used.push(g);
                break;
            }
        }
    }
    (data, used)
}

#[derive(Debug, Clone)]
pub struct FuzzOutcome {
    pub index: u64,
    pub summands: Vec<GeneratorLabel>,
    pub data: FixedPointData,
    /// Step count on success, or the reason for failure.
    pub result: Result<usize, String>,
}

impl FuzzOutcome {
    pub fn passed(&self) -> bool {
        self.result.is_ok()
    }
}

/// Samples one connected sum, reduces it, and replays the certificate.
pub fn fuzz_iteration(seed: u64, index: u64, cfg: &SampleConfig) -> FuzzOutcome {
    let mut rng = iteration_rng(seed, index);
    let (data, summands) = random_connected_sum(&mut rng, cfg);
    let result = reduce_to_empty(&data)
        .map_err(|e| e.to_string())
        .and_then(|cert| {
            check_certificate(&cert)
                .map(|_| cert.steps.len())
                .map_err(|e| format!("certificate does not replay: {e}"))
        });
    FuzzOutcome {
        index,
        summands,
        data,
        result,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::validator::validate_all;

    #[test]
    fn sampling_is_deterministic() {
        let cfg = SampleConfig::default();
        let a = random_connected_sum(&mut iteration_rng(7, 3), &cfg);
        let b = random_connected_sum(&mut iteration_rng(7, 3), &cfg);
        assert_eq!(a, b);
        let c = random_connected_sum(&mut iteration_rng(7, 4), &cfg);
        assert_ne!(a.0, c.0);
    }

    #[test]
    fn generators_respect_bounds() {
        let mut rng = iteration_rng(1, 0);
        for _ in 0..500 {
            let g = random_generator(&mut rng, 6);
            assert!(g.params.iter().all(|p| *p >= BigInt::from(1) && *p <= BigInt::from(6)));
            assert!(g.data().is_ok(), "{g}");
        }
    }

    #[test]
    fn small_parameters_fall_back() {
        let mut rng = iteration_rng(2, 0);
        for _ in 0..50 {
            let g = random_generator(&mut rng, 1);
            assert_eq!(g.family, Family::S6);
        }
    }

    #[test]
    fn samples_pass_validation() {
        let cfg = SampleConfig::default();
        for i in 0..40 {
            let (d, used) = random_connected_sum(&mut iteration_rng(11, i), &cfg);
            assert!(!used.is_empty() && used.len() <= cfg.max_summands);
            assert!(validate_all(&d).passed(), "{d}");
        }
    }

    #[test]
    fn fuzz_iterations_reduce() {
        let cfg = SampleConfig::default();
        for i in 0..40 {
            let out = fuzz_iteration(5, i, &cfg);
            assert!(out.passed(), "{}: {:?} on {}", i, out.result, out.data);
        }
    }
}
