//! Operators with a finite Jordan head and an explicit contraction tail,
//! simulated on a truncated sequence space, plus the weighted-shift
//! counterexample whose orbit is neither bounded nor divergent.
//!
//! The tail space carries the sup norm; the full-space norm is
//! |x| = (head block norm) + (tail sup norm). "Infinite-dimensional" means a
//! truncation dimension with a hard error when an orbit would leave the
//! simulated space, never silent wraparound.

use num::rational::BigRational;
use num::traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::iterates::{classify_norms, classify_system, EmpiricalClass};
use crate::jordan::{apply_affine, block_norm, BlockVector, JordanSystem};
use crate::scalar::Scalar;
use crate::verdict::{Verdict, VerdictKind};

/// How the tail operator acts on basis vectors.
#[derive(Clone, Debug)]
pub enum TailKind {
    /// A e_q = f_q e_q; factors are cycled over the truncated coordinates.
    Diagonal(Vec<Scalar>),
    /// A e_q = w_q e_{q+1}; weights are cycled.
    Shift(Vec<Scalar>),
}

#[derive(Clone, Debug)]
pub struct TailOperator {
    pub kind: TailKind,
    pub truncation: usize,
}

impl TailOperator {
    fn weight(&self, q: usize) -> &Scalar {
        match &self.kind {
            TailKind::Diagonal(f) => &f[q % f.len()],
            TailKind::Shift(w) => &w[q % w.len()],
        }
    }

    /// Apply the operator once. A shift moving a nonzero top coordinate off
    /// the end of the truncated space is an overflow error.
    pub fn apply(&self, v: &[Scalar], step: usize) -> Result<Vec<Scalar>> {
        match &self.kind {
            TailKind::Diagonal(_) => Ok(v
                .iter()
                .enumerate()
                .map(|(q, x)| x * self.weight(q))
                .collect()),
            TailKind::Shift(_) => {
                if v.last().map(|x| !x.is_zero()).unwrap_or(false) {
                    return Err(Error::TruncationOverflow {
                        step,
                        truncation: self.truncation,
                    });
                }
                let mut out = vec![Scalar::zero(); v.len()];
                for q in 0..v.len().saturating_sub(1) {
                    out[q + 1] = &v[q] * self.weight(q);
                }
                Ok(out)
            }
        }
    }
}

/// The contraction tail: rate r < 1 and start index N such that
/// ||A^k x|| <= r^k ||x|| for k >= N, asserted by construction and
/// spot-checked on samples.
#[derive(Clone, Debug)]
pub struct PropertyPTail {
    pub r: BigRational,
    pub n_start: usize,
    pub op: TailOperator,
    pub c: Vec<Scalar>,
    pub x: Vec<Scalar>,
}

#[derive(Clone, Debug)]
pub struct PropertyPOperator {
    pub head: JordanSystem,
    pub tail: PropertyPTail,
}

pub fn sup_norm(v: &[Scalar]) -> f64 {
    v.iter().map(Scalar::modulus).fold(0.0, f64::max)
}

impl PropertyPOperator {
    pub fn new(head: JordanSystem, tail: PropertyPTail) -> Result<Self> {
        if tail.r < BigRational::zero() || tail.r >= BigRational::one() {
            return Err(Error::domain(
                "property_p",
                format!("contraction rate r must lie in [0,1), got {}", tail.r),
            ));
        }
        if tail.c.len() != tail.op.truncation || tail.x.len() != tail.op.truncation {
            return Err(Error::ShapeMismatch(format!(
                "tail vectors must have the truncation length {}",
                tail.op.truncation
            )));
        }
        let op = PropertyPOperator { head, tail };
        if !op.spot_check_contraction() {
            return Err(Error::domain(
                "property_p",
                "tail operator violates ||A^k x|| <= r^k ||x|| on a sampled orbit".to_string(),
            ));
        }
        Ok(op)
    }

    /// Verify the contraction inequality on a deterministic sample: basis
    /// vectors (where the horizon keeps shifts inside the truncation) and the
    /// supplied tail start vector, for k in N..N+8.
    fn spot_check_contraction(&self) -> bool {
        let t = &self.tail;
        let k_max = t.n_start + 8;
        let mut samples: Vec<Vec<Scalar>> = Vec::new();
        let probe = t.op.truncation.min(12);
        for q in 0..probe {
            if matches!(t.op.kind, TailKind::Shift(_)) && q + k_max >= t.op.truncation {
                continue;
            }
            let mut e = vec![Scalar::zero(); t.op.truncation];
            e[q] = Scalar::one();
            samples.push(e);
        }
        if sup_norm(&t.x) > 0.0 {
            samples.push(t.x.clone());
        }
        let r = t.r.to_f64().unwrap_or(1.0);
        for x in &samples {
            let x_norm = sup_norm(x);
            let mut v = x.clone();
            for k in 1..=k_max {
                v = match t.op.apply(&v, k) {
                    Ok(v) => v,
                    Err(_) => return false,
                };
                if k >= t.n_start && sup_norm(&v) > r.powi(k as i32) * x_norm + 1e-12 {
                    return false;
                }
            }
        }
        true
    }

    /// The tail fixed point sum_{i>=0} A^i c, computed coordinatewise
    /// (exactly, in exact mode).
    pub fn tail_limit(&self) -> Vec<Scalar> {
        let t = &self.tail;
        match &t.op.kind {
            TailKind::Diagonal(_) => t
                .c
                .iter()
                .enumerate()
                .map(|(q, c)| c / &(&Scalar::one() - t.op.weight(q)))
                .collect(),
            TailKind::Shift(_) => {
                // coordinate q collects c_{q-i} shifted up i times
                (0..t.op.truncation)
                    .map(|q| {
                        let mut acc = t.c[q].clone();
                        let mut prod = Scalar::one();
                        for i in 1..=q {
                            prod = &prod * t.op.weight(q - i);
                            acc = &acc + &(&t.c[q - i] * &prod);
                        }
                        acc
                    })
                    .collect()
            }
        }
    }
}

/// The boundedness certificate for the tail orbit at step k >= N:
/// r^k ||x_2|| + ||c_2 + A c_2 + ... + A^{N-1} c_2|| + ||c_2||/(1-r).
pub fn tail_bound(tail: &PropertyPTail, x_tail: &[Scalar], k: usize) -> Result<f64> {
    if k < tail.n_start {
        return Err(Error::domain(
            "tail_bound",
            format!("bound holds for k >= N = {}; got k={k}", tail.n_start),
        ));
    }
    let r = tail.r.to_f64().unwrap_or(1.0);
    let mut prefix = vec![Scalar::zero(); tail.op.truncation];
    let mut power = tail.c.clone();
    for i in 0..tail.n_start {
        if i > 0 {
            power = tail.op.apply(&power, i)?;
        }
        for (acc, p) in prefix.iter_mut().zip(&power) {
            *acc = &*acc + p;
        }
    }
    Ok(r.powi(k as i32) * sup_norm(x_tail) + sup_norm(&prefix) + sup_norm(&tail.c) / (1.0 - r))
}

/// One full-space orbit step: head and tail move independently.
pub fn property_p_step(
    op: &PropertyPOperator,
    head: &BlockVector,
    tail: &[Scalar],
    step: usize,
) -> Result<(BlockVector, Vec<Scalar>)> {
    let new_head = apply_affine(&op.head, head)?;
    let mut new_tail = op.tail.op.apply(tail, step)?;
    for (t, c) in new_tail.iter_mut().zip(&op.tail.c) {
        *t = &*t + c;
    }
    Ok((new_head, new_tail))
}

#[derive(Clone, Debug)]
pub struct PropertyPTrace {
    pub norms: Vec<f64>,
    pub head_norms: Vec<f64>,
    pub tail_norms: Vec<f64>,
    pub empirical: EmpiricalClass,
}

/// Simulate the full orbit, recording |T^k x| = head norm + tail norm.
pub fn property_p_orbit(op: &PropertyPOperator, horizon: usize) -> Result<PropertyPTrace> {
    let mut head = op.head.x.clone();
    let mut tail = op.tail.x.clone();
    let mut norms = Vec::with_capacity(horizon + 1);
    let mut head_norms = Vec::with_capacity(horizon + 1);
    let mut tail_norms = Vec::with_capacity(horizon + 1);
    for k in 0..=horizon {
        let hn = block_norm(&head);
        let tn = sup_norm(&tail);
        head_norms.push(hn);
        tail_norms.push(tn);
        norms.push(hn + tn);
        if k < horizon {
            (head, tail) = property_p_step(op, &head, &tail, k + 1)?;
        }
    }
    let scale = 1.0
        + op.head.input_scale().max(sup_norm(&op.tail.x)).max(sup_norm(&op.tail.c));
    let empirical = classify_norms(&norms, scale, false);
    Ok(PropertyPTrace {
        norms,
        head_norms,
        tail_norms,
        empirical,
    })
}

/// Verdict for an operator with property (P): the tail is always bounded
/// (and converges to its fixed point), so the head decides. For c = 0 the
/// tail tends to 0 and the linear trichotomy passes through from the head.
pub fn classify_property_p(op: &PropertyPOperator) -> PropertyPVerdict {
    assemble_with_tail(op, classify_system(&op.head))
}

/// Same assembly for the average sequence: the tail averages converge to the
/// tail fixed point, so again the head's average verdict decides.
pub fn classify_property_p_average(op: &PropertyPOperator) -> Result<PropertyPVerdict> {
    let head_verdict = crate::averages::classify_average_system(&op.head)?;
    Ok(assemble_with_tail(op, head_verdict))
}

fn assemble_with_tail(op: &PropertyPOperator, head_verdict: Verdict) -> PropertyPVerdict {
    let tail_limit = op.tail_limit();
    let tail_limit_zero = tail_limit.iter().all(Scalar::is_zero);
    let kind = match &head_verdict.kind {
        VerdictKind::DivergesToInfinity => VerdictKind::DivergesToInfinity,
        VerdictKind::ConvergesToZero => {
            if tail_limit_zero {
                VerdictKind::ConvergesToZero
            } else {
                VerdictKind::ConvergesToConstant(op.head.zero_vector())
            }
        }
        VerdictKind::ConvergesToConstant(limit) => {
            if limit.is_zero() && tail_limit_zero {
                VerdictKind::ConvergesToZero
            } else {
                VerdictKind::ConvergesToConstant(limit.clone())
            }
        }
        VerdictKind::BoundedAwayFromZero { f_empirical, g_empirical } => {
            VerdictKind::BoundedAwayFromZero {
                f_empirical: *f_empirical,
                g_empirical: *g_empirical,
            }
        }
        VerdictKind::Bounded => VerdictKind::Bounded,
    };
    PropertyPVerdict {
        verdict: Verdict {
            kind,
            blocks: head_verdict.blocks,
            numerically_uncertain: head_verdict.numerically_uncertain,
        },
        tail_limit,
    }
}

#[derive(Clone, Debug)]
pub struct PropertyPVerdict {
    /// Overall kind, with the head's per-block sub-verdicts. A constant limit
    /// refers to the head part; the tail converges to `tail_limit`.
    pub verdict: Verdict,
    pub tail_limit: Vec<Scalar>,
}

/// The bounded, non-compact weighted shift A e_i = w_i e_{i+1} whose weight
/// schedule alternates between 1/2-runs and 2-runs on triangular-number
/// blocks, defeating the bounded-or-divergent dichotomy.
#[derive(Clone, Debug)]
pub struct WeightedShift {
    pub truncation: usize,
}

impl WeightedShift {
    pub fn new(truncation: usize) -> Self {
        WeightedShift { truncation }
    }

    /// n(n+1)/2: the boundaries of the weight runs.
    pub fn boundary(n: usize) -> usize {
        n * (n + 1) / 2
    }

    /// w_i = 1/2 on [c_{2n}, c_{2n+1}-1] and 2 on [c_{2n-1}, c_{2n}-1].
    pub fn weight(&self, i: usize) -> Scalar {
        // find n with boundary(n) <= i < boundary(n+1)
        let mut n = 0usize;
        while Self::boundary(n + 1) <= i {
            n += 1;
        }
        if n % 2 == 0 {
            Scalar::from_ratio(1, 2)
        } else {
            Scalar::from_int(2)
        }
    }
}

/// Orbit of e_0 under the weighted shift: A^k e_0 = (w_0 w_1 ... w_{k-1}) e_k.
/// Returns the coefficient at each step; its modulus is the orbit norm.
pub fn weighted_shift_orbit(shift: &WeightedShift, horizon: usize) -> Result<Vec<(usize, Scalar)>> {
    if horizon >= shift.truncation {
        return Err(Error::TruncationOverflow {
            step: shift.truncation,
            truncation: shift.truncation,
        });
    }
    let mut out = Vec::with_capacity(horizon + 1);
    let mut coeff = Scalar::one();
    out.push((0, coeff.clone()));
    for k in 1..=horizon {
        coeff = &coeff * &shift.weight(k - 1);
        out.push((k, coeff.clone()));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tail_diag(r_num: i64, r_den: i64, truncation: usize) -> PropertyPTail {
        PropertyPTail {
            r: BigRational::new(r_num.into(), r_den.into()),
            n_start: 1,
            op: TailOperator {
                kind: TailKind::Diagonal(vec![Scalar::from_ratio(r_num, r_den)]),
                truncation,
            },
            c: vec![Scalar::zero(); truncation],
            x: vec![Scalar::zero(); truncation],
        }
    }

    fn head(lambda: Scalar, x: i64, c: i64) -> JordanSystem {
        JordanSystem::diagonal(
            vec![lambda],
            vec![Scalar::from_int(c)],
            vec![Scalar::from_int(x)],
        )
        .unwrap()
    }

    #[test]
    fn tail_bound_examples() {
        // pure contraction: r = 1/2, N = 1, c = 0, ||x|| = 1, k = 10
        let mut t = tail_diag(1, 2, 8);
        t.x[0] = Scalar::one();
        let b = tail_bound(&t, &t.x, 10).unwrap();
        assert!((b - 2f64.powi(-10)).abs() < 1e-15);
        // ||c|| = 1, x = 0: bound = 1 + 1/(1 - 1/2) = 3 at any k
        let mut t = tail_diag(1, 2, 8);
        t.c[0] = Scalar::one();
        for k in [1, 5, 40] {
            let b = tail_bound(&t, &t.x, k).unwrap();
            assert!((b - 3.0).abs() < 1e-12);
        }
        // k = N, x = 0, c = 0 -> 0... up to the r^k * 0 term
        let t = tail_diag(1, 2, 8);
        assert_eq!(tail_bound(&t, &t.x, 1).unwrap(), 0.0);
        assert!(tail_bound(&t, &t.x, 0).is_err());
    }

    #[test]
    fn tail_bound_dominates_orbit() {
        let mut t = tail_diag(1, 2, 8);
        t.c[0] = Scalar::from_ratio(1, 3);
        t.c[2] = Scalar::from_ratio(-1, 2);
        t.x[1] = Scalar::from_int(2);
        let op = PropertyPOperator::new(head(Scalar::from_ratio(1, 2), 0, 0), t).unwrap();
        let trace = property_p_orbit(&op, 60).unwrap();
        for k in op.tail.n_start..=60 {
            let bound = tail_bound(&op.tail, &op.tail.x, k).unwrap();
            assert!(
                trace.tail_norms[k] <= bound + 1e-12,
                "tail norm {} exceeds bound {} at k={k}",
                trace.tail_norms[k],
                bound
            );
        }
    }

    #[test]
    fn classify_examples() {
        // diverging head dominates any tail
        let op = PropertyPOperator::new(head(Scalar::from_int(2), 1, 0), tail_diag(1, 2, 4)).unwrap();
        assert_eq!(
            classify_property_p(&op).verdict.kind,
            VerdictKind::DivergesToInfinity
        );
        // trivial head + contraction tail + c = 0 converges to zero
        let mut t = tail_diag(1, 2, 4);
        t.x[0] = Scalar::from_int(3);
        let op = PropertyPOperator::new(head(Scalar::zero(), 0, 0), t).unwrap();
        assert_eq!(classify_property_p(&op).verdict.kind, VerdictKind::ConvergesToZero);
        // head lambda = i, x != 0, c = 0, contraction tail: bounded away
        let mut t = tail_diag(1, 2, 4);
        t.x[0] = Scalar::one();
        let op = PropertyPOperator::new(head(Scalar::i(), 1, 0), t).unwrap();
        assert!(matches!(
            classify_property_p(&op).verdict.kind,
            VerdictKind::BoundedAwayFromZero { .. }
        ));
    }

    #[test]
    fn tail_limit_is_a_fixed_point() {
        let mut t = tail_diag(1, 2, 6);
        t.c = (0..6).map(|q| Scalar::from_int(q as i64 - 2)).collect();
        let op = PropertyPOperator::new(head(Scalar::zero(), 0, 0), t).unwrap();
        let limit = op.tail_limit();
        let mut moved = op.tail.op.apply(&limit, 1).unwrap();
        for (m, c) in moved.iter_mut().zip(&op.tail.c) {
            *m = &*m + c;
        }
        assert_eq!(moved, limit);

        // shift tail with a delayed contraction window: the weight cycle
        // (3/2, 3/2, 1/8) only beats r = 9/10 from N = 6 onward
        let t = PropertyPTail {
            r: BigRational::new(9.into(), 10.into()),
            n_start: 6,
            op: TailOperator {
                kind: TailKind::Shift(vec![
                    Scalar::from_ratio(3, 2),
                    Scalar::from_ratio(3, 2),
                    Scalar::from_ratio(1, 8),
                ]),
                truncation: 64,
            },
            c: {
                let mut c = vec![Scalar::zero(); 64];
                c[0] = Scalar::one();
                c
            },
            x: {
                let mut x = vec![Scalar::zero(); 64];
                x[1] = Scalar::from_int(2);
                x
            },
        };
        let op = PropertyPOperator::new(head(Scalar::zero(), 0, 0), t).unwrap();
        let limit = op.tail_limit();
        // once k > q, tail coordinate q has settled to the limit exactly
        let mut head_state = op.head.x.clone();
        let mut tail_state = op.tail.x.clone();
        for k in 1..=40 {
            (head_state, tail_state) = property_p_step(&op, &head_state, &tail_state, k).unwrap();
        }
        for q in 0..40 {
            assert_eq!(tail_state[q], limit[q], "tail coordinate {q}");
        }
    }

    #[test]
    fn weighted_shift_matches_advertised_subsequences() {
        let shift = WeightedShift::new(512);
        let orbit = weighted_shift_orbit(&shift, 30).unwrap();
        // norms at c_1..c_6 = 1, 3, 6, 10, 15, 21: (1/2, 2, 1/4, 4, 1/8, 8)
        let expect = [
            (1, Scalar::from_ratio(1, 2)),
            (3, Scalar::from_int(2)),
            (6, Scalar::from_ratio(1, 4)),
            (10, Scalar::from_int(4)),
            (15, Scalar::from_ratio(1, 8)),
            (21, Scalar::from_int(8)),
        ];
        for (k, v) in expect {
            assert_eq!(orbit[k].1, v, "orbit coefficient at k={k}");
        }
        // overflow is an error, not a wraparound
        assert!(weighted_shift_orbit(&WeightedShift::new(16), 30).is_err());
    }

    #[test]
    fn contraction_violation_is_rejected() {
        let mut t = tail_diag(1, 2, 4);
        t.op.kind = TailKind::Diagonal(vec![Scalar::from_int(2)]);
        assert!(PropertyPOperator::new(head(Scalar::zero(), 0, 0), t).is_err());
        let mut t = tail_diag(1, 2, 4);
        t.r = BigRational::one();
        assert!(PropertyPOperator::new(head(Scalar::zero(), 0, 0), t).is_err());
    }
}
