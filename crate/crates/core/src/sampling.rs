//! Seeded random generators for systems and exact assignments, shared by the
//! randomized identity sweeps and the oracle-equivalence suites.

use num::bigint::BigInt;
use num::rational::BigRational;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::jordan::{BlockVector, JordanBlock, JordanSystem, Segment};
use crate::scalar::Scalar;

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// The eigenvalue pool exercised by the equivalence suites: zero, one, roots
/// of unity, contractions, expansions, and an exact point on the unit circle.
pub fn standard_lambda_pool() -> Vec<Scalar> {
    vec![
        Scalar::zero(),
        Scalar::one(),
        Scalar::i(),
        Scalar::from_int(-1),
        Scalar::from_ratio(1, 2),
        Scalar::from_int(2),
        Scalar::from_int(3),
        Scalar::gaussian(3, 5, 4, 5),
    ]
}

#[derive(Clone, Debug)]
pub struct PoolConfig {
    pub max_blocks: usize,
    pub max_size: usize,
    pub lambdas: Vec<Scalar>,
    /// Entries of x and c are Gaussian integers with parts in
    /// [-entry_magnitude, entry_magnitude].
    pub entry_magnitude: i64,
    /// Probability that a coordinate is exactly zero (keeps the nilpotent
    /// indices varied).
    pub zero_entry_prob: f64,
}

impl Default for PoolConfig {
    fn default() -> Self {
        PoolConfig {
            max_blocks: 4,
            max_size: 5,
            lambdas: standard_lambda_pool(),
            entry_magnitude: 3,
            zero_entry_prob: 0.35,
        }
    }
}

fn random_entry(rng: &mut ChaCha8Rng, cfg: &PoolConfig) -> Scalar {
    if rng.gen::<f64>() < cfg.zero_entry_prob {
        return Scalar::zero();
    }
    let m = cfg.entry_magnitude;
    let re = rng.gen_range(-m..=m);
    let im = if rng.gen::<f64>() < 0.5 {
        0
    } else {
        rng.gen_range(-m..=m)
    };
    Scalar::gaussian(re, 1, im, 1)
}

fn random_segment(rng: &mut ChaCha8Rng, cfg: &PoolConfig, size: usize) -> Segment {
    (0..size).map(|_| random_entry(rng, cfg)).collect()
}

/// Draw a random exact system from the pool.
pub fn random_system(rng: &mut ChaCha8Rng, cfg: &PoolConfig) -> JordanSystem {
    let n_blocks = rng.gen_range(1..=cfg.max_blocks);
    let blocks: Vec<JordanBlock> = (0..n_blocks)
        .map(|_| {
            let lambda = cfg.lambdas[rng.gen_range(0..cfg.lambdas.len())].clone();
            JordanBlock::new(lambda, rng.gen_range(1..=cfg.max_size))
        })
        .collect();
    let c = BlockVector {
        segments: blocks.iter().map(|b| random_segment(rng, cfg, b.size)).collect(),
    };
    let x = BlockVector {
        segments: blocks.iter().map(|b| random_segment(rng, cfg, b.size)).collect(),
    };
    JordanSystem::new(blocks, c, x).expect("generated shapes are consistent")
}

/// Draw a random linear system (c = 0) from the pool.
pub fn random_linear_system(rng: &mut ChaCha8Rng, cfg: &PoolConfig) -> JordanSystem {
    let mut sys = random_system(rng, cfg);
    sys.c = sys.zero_vector();
    sys
}

/// A small exact rational with numerator in [-9,9] and denominator in [1,9].
pub fn random_rational(rng: &mut ChaCha8Rng) -> BigRational {
    let num = rng.gen_range(-9i64..=9);
    let den = rng.gen_range(1i64..=9);
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// A nonzero exact rational scalar, for symmetric-function assignments.
pub fn random_nonzero_rational_scalar(rng: &mut ChaCha8Rng) -> Scalar {
    loop {
        let r = random_rational(rng);
        if !num::traits::Zero::is_zero(&r) {
            return Scalar::from_rational(r);
        }
    }
}

/// One structured block for the fixed-point/H-degree equivalence sweep:
/// x sits at the block fixed point perturbed along one nilpotent-chain
/// direction e_q (or exactly at the fixed point when `perturbed` is None).
#[derive(Clone, Debug)]
pub struct FixedPointPerturbation {
    pub block: JordanBlock,
    pub c: Segment,
    pub x: Segment,
    /// Index q of the perturbation direction; None means x is the fixed point.
    pub perturbed: Option<usize>,
}

/// Deterministic family over lambda in {2, 1/2, i, (3+4i)/5}, sizes <= 4,
/// several c patterns, perturbation directions q < t and offsets in
/// {1, -1, 3/2}.
pub fn fixed_point_perturbation_family() -> Vec<FixedPointPerturbation> {
    let lambdas = [
        Scalar::from_int(2),
        Scalar::from_ratio(1, 2),
        Scalar::i(),
        Scalar::gaussian(3, 5, 4, 5),
    ];
    let offsets = [
        Scalar::from_int(1),
        Scalar::from_int(-1),
        Scalar::from_ratio(3, 2),
    ];
    let mut family = Vec::new();
    for lambda in &lambdas {
        for size in 1..=4usize {
            let mut c_patterns: Vec<Segment> = vec![
                (0..size).map(|_| Scalar::one()).collect(),
                (0..size)
                    .map(|q| if q == size - 1 { Scalar::from_int(3) } else { Scalar::from_int(2) })
                    .collect(),
            ];
            if size >= 2 {
                // t < size: top coordinate zero
                c_patterns.push(
                    (0..size)
                        .map(|q| if q == size - 1 { Scalar::zero() } else { Scalar::one() })
                        .collect(),
                );
            }
            for c in c_patterns {
                let block = JordanBlock::new(lambda.clone(), size);
                let one_minus = &Scalar::one() - lambda;
                let t = crate::jordan::nilpotent_index(&c);
                // block fixed point sum_j N^j c/(1-lambda)^{j+1}
                let mut star: Segment = (0..size).map(|_| Scalar::zero()).collect();
                for j in 0..t {
                    let coeff = one_minus.pow(-(j as i64 + 1)).expect("lambda != 1");
                    for (q, v) in crate::jordan::shift_down_pow(&c, j).iter().enumerate() {
                        star[q] = &star[q] + &(v * &coeff);
                    }
                }
                family.push(FixedPointPerturbation {
                    block: block.clone(),
                    c: c.clone(),
                    x: star.clone(),
                    perturbed: None,
                });
                for q in 0..t {
                    for delta in &offsets {
                        let mut x = star.clone();
                        x[q] = &x[q] + delta;
                        family.push(FixedPointPerturbation {
                            block: block.clone(),
                            c: c.clone(),
                            x,
                            perturbed: Some(q),
                        });
                    }
                }
            }
        }
    }
    family
}

/// Values f(1), ..., f(l+1) of a random integer polynomial of degree l,
/// returned with its coefficients (constant first).
pub fn random_integer_polynomial_samples(
    rng: &mut ChaCha8Rng,
    degree: usize,
) -> (Vec<i64>, Vec<Scalar>) {
    let coeffs: Vec<i64> = (0..=degree).map(|_| rng.gen_range(-9i64..=9)).collect();
    let values = (1..=degree as i64 + 1)
        .map(|x| {
            let mut acc = 0i64;
            let mut pow = 1i64;
            for &c in &coeffs {
                acc += c * pow;
                pow *= x;
            }
            Scalar::from_int(acc)
        })
        .collect();
    (coeffs, values)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generation_is_deterministic_per_seed() {
        let cfg = PoolConfig::default();
        let a = random_system(&mut rng_from_seed(7), &cfg);
        let b = random_system(&mut rng_from_seed(7), &cfg);
        assert_eq!(a.blocks, b.blocks);
        assert_eq!(a.x, b.x);
        assert_eq!(a.c, b.c);
        let c = random_system(&mut rng_from_seed(8), &cfg);
        assert!(a.blocks != c.blocks || a.x != c.x || a.c != c.c);
    }

    #[test]
    fn linear_systems_have_zero_c() {
        let cfg = PoolConfig::default();
        let mut rng = rng_from_seed(3);
        for _ in 0..10 {
            assert!(random_linear_system(&mut rng, &cfg).is_linear());
        }
    }
}
