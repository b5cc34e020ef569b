//! Closed-form expansion and classification of the running averages
//! Ave_k T(x) = (x + Tx + ... + T^{k-1}x)/k, blockwise.
//!
//! For lambda != 1 (including lambda = 0) the average splits as
//! E + F/k + G(k,lambda), where E is the affine fixed point of the block and
//! G(k,lambda) = (lambda^k/k) H(k,lambda) for a polynomial H in k with
//! segment coefficients. For lambda = 1 the average is a pure binomial
//! expression, Eqs.-(9)/(10)-shaped. The degree of H decides boundedness in
//! the s = t case, and H vanishes identically exactly at the fixed point.

use std::cmp::Ordering;

use crate::combinatorics::{binom_scalar, binom_symbolic, binom_symbolic_shifted, d_factor};
use crate::error::{Error, Result};
use crate::iterates::{classify_norms, DEFAULT_EMPIRICAL_HORIZON};
use crate::jordan::{
    apply_affine, block_norm, nilpotent_index, shift_down, shift_down_pow, BlockVector,
    JordanBlock, JordanSystem, Segment,
};
use crate::iterates::{EmpiricalClass, ZeroCtx};
use crate::kpoly::KPoly;
use crate::scalar::{Mode, Scalar};
use crate::verdict::{BlockKind, BlockVerdict, CaseLabel, Verdict, VerdictKind};

/// Eq.-(7)/(8)-shaped average expansion, for lambda != 1.
#[derive(Clone, Debug)]
pub struct AverageExpansion {
    pub lambda: Scalar,
    pub s: usize,
    pub t: usize,
    pub w: usize,
    /// E: the constant part (the block fixed point).
    pub e: Segment,
    /// F: the 1/k coefficient.
    pub f: Segment,
    /// Average-side A_j = -sum_{i=j}^{s-1} N^i x/(1-lambda)^{i-j+1}, j < s.
    pub a_avg: Vec<Segment>,
    /// N^j c for j < t: the data the D-correction multiplies inside G.
    pub nc: Vec<Segment>,
}

/// Eq.-(9)/(10)-shaped average expansion for lambda = 1.
#[derive(Clone, Debug)]
pub struct UnitAverageExpansion {
    pub s: usize,
    pub t: usize,
    /// N^{j-1} x for j = 1..=s (coefficient C(k,j)/k).
    pub x_terms: Vec<Segment>,
    /// N^j c for j = 0..t-1 (coefficient C(k,j+2)/k).
    pub c_terms: Vec<Segment>,
}

#[derive(Clone, Debug)]
pub enum AvgBlockExpansion {
    Geometric(AverageExpansion),
    Unit(UnitAverageExpansion),
}

impl AvgBlockExpansion {
    pub fn s(&self) -> usize {
        match self {
            AvgBlockExpansion::Geometric(e) => e.s,
            AvgBlockExpansion::Unit(e) => e.s,
        }
    }

    pub fn t(&self) -> usize {
        match self {
            AvgBlockExpansion::Geometric(e) => e.t,
            AvgBlockExpansion::Unit(e) => e.t,
        }
    }

    /// The T_j closed form needs k >= j+2, so averages are evaluated for
    /// k > max{s,t} + 1.
    pub fn valid_from(&self) -> usize {
        self.s().max(self.t()) + 2
    }

    /// Exact Ave_k T(x) on the block.
    pub fn eval(&self, k: i64) -> Result<Segment> {
        if k < self.valid_from() as i64 {
            return Err(Error::domain(
                "eval_average",
                format!(
                    "average closed form is valid only for k > max{{s,t}}+1 = {}; got k={k}",
                    self.valid_from() - 1
                ),
            ));
        }
        match self {
            AvgBlockExpansion::Geometric(e) => {
                let inv_k = Scalar::from_int(k).with_mode_of(&e.lambda).inv()?;
                let mut acc: Segment = e
                    .e
                    .iter()
                    .zip(&e.f)
                    .map(|(ee, ff)| ee + &(ff * &inv_k))
                    .collect();
                for (q, g) in self.eval_g(k)?.iter().enumerate() {
                    acc[q] = &acc[q] + g;
                }
                Ok(acc)
            }
            AvgBlockExpansion::Unit(e) => {
                let inv_k = Scalar::from_int(k).inv()?;
                let mut acc = vec![Scalar::zero(); e.x_terms.first().or(e.c_terms.first()).map_or(0, Vec::len)];
                if acc.is_empty() {
                    // s = t = 0 block: need the segment length from somewhere
                    return Ok(Vec::new());
                }
                for (j, seg) in e.x_terms.iter().enumerate() {
                    let coeff = &binom_scalar(k, j as i64 + 1) * &inv_k;
                    for (q, v) in seg.iter().enumerate() {
                        acc[q] = &acc[q] + &(v * &coeff);
                    }
                }
                for (j, seg) in e.c_terms.iter().enumerate() {
                    let coeff = &binom_scalar(k, j as i64 + 2) * &inv_k;
                    for (q, v) in seg.iter().enumerate() {
                        acc[q] = &acc[q] + &(v * &coeff);
                    }
                }
                Ok(acc)
            }
        }
    }

    /// G(k,lambda), evaluated from the definition with the concrete
    /// D-correction factors (independent of the symbolic H route).
    pub fn eval_g(&self, k: i64) -> Result<Segment> {
        let e = match self {
            AvgBlockExpansion::Geometric(e) => e,
            AvgBlockExpansion::Unit(_) => {
                return Err(Error::domain("eval_g", "G is defined for lambda != 1".to_string()))
            }
        };
        let len = e.e.len();
        let mut acc: Segment = (0..len).map(|_| Scalar::zero().with_mode_of(&e.lambda)).collect();
        let inv_k = Scalar::from_int(k).with_mode_of(&e.lambda).inv()?;
        let one_minus_sq = (&Scalar::one().with_mode_of(&e.lambda) - &e.lambda).pow(2)?;
        for j in 0..e.w {
            let outer = &(&binom_scalar(k, j as i64).with_mode_of(&e.lambda) * &e.lambda.pow(k - j as i64)?) * &inv_k;
            let mut inner: Segment = (0..len).map(|_| Scalar::zero().with_mode_of(&e.lambda)).collect();
            if let Some(aj) = e.a_avg.get(j) {
                for (q, a) in aj.iter().enumerate() {
                    inner[q] = &inner[q] + a;
                }
            }
            if let Some(ncj) = e.nc.get(j) {
                let dcoef = &d_factor(k, j as i64, &e.lambda)? / &one_minus_sq;
                for (q, c) in ncj.iter().enumerate() {
                    inner[q] = &inner[q] + &(c * &dcoef);
                }
            }
            for q in 0..len {
                acc[q] = &acc[q] + &(&inner[q] * &outer);
            }
        }
        Ok(acc)
    }
}

fn zero_segment_like(seg: &[Scalar]) -> Segment {
    seg.iter().map(|s| Scalar::zero().with_mode_of(s)).collect()
}

/// The block fixed point sum_{j<t} N^j c/(1-lambda)^{j+1} (lambda != 1).
fn block_fixed_point(lambda: &Scalar, d: &[Scalar]) -> Segment {
    let t = nilpotent_index(d);
    let one_minus = &Scalar::one().with_mode_of(lambda) - lambda;
    let mut e = zero_segment_like(d);
    for j in 0..t {
        let coeff = one_minus.pow(-(j as i64 + 1)).expect("lambda != 1");
        for (q, v) in shift_down_pow(d, j).iter().enumerate() {
            e[q] = &e[q] + &(v * &coeff);
        }
    }
    e
}

/// Expand one block's average sequence into its closed form.
pub fn expand_average_block(block: &JordanBlock, v: &[Scalar], d: &[Scalar]) -> AvgBlockExpansion {
    let s = nilpotent_index(v);
    let t = nilpotent_index(d);
    if block.lambda.is_one() {
        return AvgBlockExpansion::Unit(UnitAverageExpansion {
            s,
            t,
            x_terms: (1..=s).map(|j| shift_down_pow(v, j - 1)).collect(),
            c_terms: (0..t).map(|j| shift_down_pow(d, j)).collect(),
        });
    }
    let lambda = &block.lambda;
    let one_minus = &Scalar::one().with_mode_of(lambda) - lambda;
    let e = block_fixed_point(lambda, d);
    // F = sum_{j<s} N^j x/(1-lambda)^{j+1} - sum_{j<t} (j+1) N^j c/(1-lambda)^{j+2}
    let mut f = zero_segment_like(v);
    for j in 0..s {
        let coeff = one_minus.pow(-(j as i64 + 1)).expect("lambda != 1");
        for (q, x) in shift_down_pow(v, j).iter().enumerate() {
            f[q] = &f[q] + &(x * &coeff);
        }
    }
    for j in 0..t {
        let coeff = &Scalar::from_int(j as i64 + 1).with_mode_of(lambda)
            * &one_minus.pow(-(j as i64 + 2)).expect("lambda != 1");
        for (q, c) in shift_down_pow(d, j).iter().enumerate() {
            f[q] = &f[q] - &(c * &coeff);
        }
    }
    // A_j = -sum_{i=j}^{s-1} N^i x/(1-lambda)^{i-j+1}
    let a_avg = (0..s)
        .map(|j| {
            let mut aj = zero_segment_like(v);
            for i in j..s {
                let coeff = one_minus.pow(-((i - j) as i64 + 1)).expect("lambda != 1");
                for (q, x) in shift_down_pow(v, i).iter().enumerate() {
                    aj[q] = &aj[q] - &(x * &coeff);
                }
            }
            aj
        })
        .collect();
    AvgBlockExpansion::Geometric(AverageExpansion {
        lambda: block.lambda.clone(),
        s,
        t,
        w: s.max(t),
        e,
        f,
        a_avg,
        nc: (0..t).map(|j| shift_down_pow(d, j)).collect(),
    })
}

/// Which rule classifies the G part of a block average.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum HRule {
    /// s = t: the degree of H decides.
    Degree,
    /// s > t: the coefficient A_{s-1} != 0 dominates.
    DominantX { index: usize },
    /// t > s: the coefficient N^{t-1} c != 0 dominates.
    DominantC { index: usize },
}

/// H(k,lambda) as an exact polynomial in k with segment coefficients.
#[derive(Clone, Debug)]
pub struct HPolynomial {
    pub poly: KPoly<Segment>,
}

impl HPolynomial {
    pub fn degree(&self) -> Option<usize> {
        self.poly.degree()
    }

    pub fn is_identically_zero(&self) -> bool {
        self.poly.is_zero()
    }

    pub fn leading(&self) -> Option<&Segment> {
        self.poly.leading()
    }

    /// Degree under a float-mode tolerance context.
    pub fn degree_with(&self, ctx: &ZeroCtx) -> Option<usize> {
        self.poly
            .coeffs()
            .iter()
            .rposition(|c| !ctx.segment_is_zero(c))
    }

    pub fn eval(&self, k: i64, segment_len: usize) -> Segment {
        self.poly
            .eval_with(&Scalar::from_int(k), vec![Scalar::zero(); segment_len])
    }
}

#[derive(Clone, Debug)]
pub struct HAnalysis {
    pub h: HPolynomial,
    pub rule: HRule,
}

/// Build H(k,lambda) symbolically: H = sum_j C(k,j) lambda^{-j} A_j
/// + lambda^{-j} (C(k,j) D(k,j,lambda)) N^j c/(1-lambda)^2, where
/// C(k,j) D(k,j,lambda) expands through the product identity into
/// sum_i (-1)^{j-i} C(k,i) C(k-i-2,j-i) lambda^{j-i} / (1-lambda)^j,
/// every factor a polynomial in k. Then G(k,lambda) = (lambda^k/k) H.
/// Requires lambda != 0, 1. When s != t the paper's dominant-coefficient
/// rule applies instead of the H-degree rule; the returned `rule` says which.
pub fn h_polynomial(e: &AverageExpansion) -> Result<HAnalysis> {
    if e.lambda.is_zero() || e.lambda.is_one() {
        return Err(Error::InvalidLambda {
            op: "h_polynomial",
            lambda: e.lambda.to_string(),
        });
    }
    let one_minus = &Scalar::one().with_mode_of(&e.lambda) - &e.lambda;
    let mut h: KPoly<Segment> = KPoly::zero();
    for j in 0..e.w {
        let lam_mj = e.lambda.pow(-(j as i64))?;
        if let Some(aj) = e.a_avg.get(j) {
            // C(k,j) lambda^{-j} A_j
            let poly = binom_symbolic(j as i64).scale(&lam_mj);
            h = h.add(&poly.tensor_segment(aj));
        }
        if let Some(ncj) = e.nc.get(j) {
            // lambda^{-j}/(1-lambda)^2 * [C(k,j) D(k,j,lambda)] N^j c
            let mut cd: KPoly<Scalar> = KPoly::zero();
            for i in 0..=j {
                let sign = if (j - i) % 2 == 0 { Scalar::one() } else { -Scalar::one() };
                let coeff = &(&sign * &e.lambda.pow((j - i) as i64)?)
                    / &one_minus.pow(j as i64)?;
                let prod = binom_symbolic(i as i64)
                    .mul(&binom_symbolic_shifted(-(i as i64) - 2, (j - i) as i64));
                cd = cd.add(&prod.scale(&coeff));
            }
            let scale = &lam_mj / &one_minus.pow(2)?;
            h = h.add(&cd.scale(&scale).tensor_segment(ncj));
        }
    }
    let rule = match e.s.cmp(&e.t) {
        Ordering::Equal => HRule::Degree,
        Ordering::Greater => HRule::DominantX { index: e.s - 1 },
        Ordering::Less => HRule::DominantC { index: e.t - 1 },
    };
    Ok(HAnalysis {
        h: HPolynomial { poly: h },
        rule,
    })
}

/// Theorem-7 condition Eq. (11) at index i:
/// N^i x == sum_{j=i}^{t-1} N^j c/(1-lambda)^{j-i+1}, exactly.
pub fn theorem7_condition(block: &JordanBlock, v: &[Scalar], d: &[Scalar], i: usize) -> Result<bool> {
    if block.lambda.is_zero() || block.lambda.is_one() {
        return Err(Error::InvalidLambda {
            op: "theorem7_condition",
            lambda: block.lambda.to_string(),
        });
    }
    let t = nilpotent_index(d);
    if !(1 <= i && i + 1 <= t) {
        return Err(Error::domain(
            "theorem7_condition",
            format!("index must satisfy 1 <= i <= t-1 = {}; got i={i}", t.saturating_sub(1)),
        ));
    }
    let one_minus = &Scalar::one().with_mode_of(&block.lambda) - &block.lambda;
    let lhs = shift_down_pow(v, i);
    let mut rhs = zero_segment_like(v);
    for j in i..t {
        let coeff = one_minus.pow(-((j - i) as i64 + 1))?;
        for (q, c) in shift_down_pow(d, j).iter().enumerate() {
            rhs[q] = &rhs[q] + &(c * &coeff);
        }
    }
    Ok(lhs == rhs)
}

/// The unique fixed point of T, blockwise: x* = sum_j N^j c/(1-lambda)^{j+1}.
/// A lambda = 1 block admits this only when its c segment vanishes (the fixed
/// point set is then a whole subspace; we return its canonical member 0).
pub fn fixed_point(sys: &JordanSystem) -> Result<BlockVector> {
    let segments = sys
        .blocks
        .iter()
        .zip(&sys.c.segments)
        .map(|(block, d)| {
            if block.lambda.is_one() {
                if d.iter().any(|c| !c.is_zero()) {
                    return Err(Error::NoFixedPoint(
                        "a lambda = 1 block with nonzero c has no fixed point".to_string(),
                    ));
                }
                Ok(zero_segment_like(d))
            } else {
                Ok(block_fixed_point(&block.lambda, d))
            }
        })
        .collect::<Result<Vec<Segment>>>()?;
    Ok(BlockVector { segments })
}

/// Case analysis for one block's average sequence.
pub fn classify_average_block(
    block: &JordanBlock,
    v: &[Scalar],
    d: &[Scalar],
    ctx: &ZeroCtx,
) -> Result<BlockVerdict> {
    let case = crate::iterates::case_label(&block.lambda);
    let expansion = expand_average_block(block, v, d);
    let (s, t) = (expansion.s(), expansion.t());
    match &expansion {
        AvgBlockExpansion::Unit(_) => {
            // Ave_k = x + (1/k) sum_{j>=2} C(k,j) N^{j-2}(c + Nx); constant
            // exactly when c + Nx = 0 (which covers the t = 0, s <= 1 and
            // the t = s-1 chain-cancellation cases), divergent otherwise.
            let u: Segment = d
                .iter()
                .zip(&shift_down(v))
                .map(|(c, nx)| c + nx)
                .collect();
            if ctx.segment_is_zero(&u) {
                Ok(BlockVerdict {
                    case,
                    kind: BlockKind::ConvergesTo(v.to_vec()),
                    witness: None,
                    empirical: false,
                })
            } else {
                Ok(BlockVerdict {
                    case,
                    kind: BlockKind::Diverges,
                    witness: Some(nilpotent_index(&u) + 1),
                    empirical: false,
                })
            }
        }
        AvgBlockExpansion::Geometric(e) => match case {
            CaseLabel::ModulusBelowOne => Ok(BlockVerdict {
                case,
                kind: BlockKind::ConvergesTo(e.e.clone()),
                witness: None,
                empirical: false,
            }),
            CaseLabel::ModulusAboveOne => {
                if s != t {
                    // dominant coefficient (A_{s-1} or N^{t-1}c) is nonzero
                    // by minimality of the nilpotent index
                    Ok(BlockVerdict {
                        case,
                        kind: BlockKind::Diverges,
                        witness: Some(e.w - 1),
                        empirical: false,
                    })
                } else if s == 0 {
                    Ok(BlockVerdict {
                        case,
                        kind: BlockKind::ConvergesTo(e.e.clone()),
                        witness: None,
                        empirical: false,
                    })
                } else {
                    let analysis = h_polynomial(e)?;
                    match analysis.h.degree_with(ctx) {
                        None => Ok(BlockVerdict {
                            case,
                            kind: BlockKind::ConvergesTo(e.e.clone()),
                            witness: None,
                            empirical: false,
                        }),
                        Some(deg) => Ok(BlockVerdict {
                            case,
                            kind: BlockKind::Diverges,
                            witness: Some(deg),
                            empirical: false,
                        }),
                    }
                }
            }
            CaseLabel::UnitCircle => {
                if s != t {
                    if s.max(t) >= 3 {
                        return Ok(BlockVerdict {
                            case,
                            kind: BlockKind::Diverges,
                            witness: Some(e.w - 1),
                            empirical: false,
                        });
                    }
                    // max{s,t} <= 2: bounded ("approaches 0 or is bounded").
                    // With d = 0 the closed form decides exactly: the block
                    // average is B/k + sum lambda^{k-j} (C(k,j)/k) A_j, which
                    // converges to 0 for s <= 1 and has norm -> |A_1| > 0
                    // for s = 2.
                    if ctx.segment_is_zero(d) {
                        if s <= 1 {
                            return Ok(BlockVerdict {
                                case,
                                kind: BlockKind::ConvergesTo(zero_segment_like(v)),
                                witness: None,
                                empirical: false,
                            });
                        }
                        return Ok(BlockVerdict {
                            case,
                            kind: BlockKind::Bounded {
                                away_from_zero: Some(true),
                            },
                            witness: None,
                            empirical: false,
                        });
                    }
                    return Ok(BlockVerdict {
                        case,
                        kind: BlockKind::Bounded {
                            away_from_zero: None,
                        },
                        witness: None,
                        empirical: true,
                    });
                }
                if s == 0 {
                    return Ok(BlockVerdict {
                        case,
                        kind: BlockKind::ConvergesTo(e.e.clone()),
                        witness: None,
                        empirical: false,
                    });
                }
                let analysis = h_polynomial(e)?;
                match analysis.h.degree_with(ctx) {
                    // H identically 0 or constant: G -> 0, so Ave -> E
                    None => Ok(BlockVerdict {
                        case,
                        kind: BlockKind::ConvergesTo(e.e.clone()),
                        witness: None,
                        empirical: false,
                    }),
                    Some(0) => Ok(BlockVerdict {
                        case,
                        kind: BlockKind::ConvergesTo(e.e.clone()),
                        witness: None,
                        empirical: false,
                    }),
                    // degree 1: G stays bounded away from 0
                    Some(1) => Ok(BlockVerdict {
                        case,
                        kind: BlockKind::Bounded {
                            away_from_zero: if ctx.segment_is_zero(&e.e) {
                                Some(true)
                            } else {
                                None
                            },
                        },
                        witness: Some(1),
                        empirical: false,
                    }),
                    Some(deg) => Ok(BlockVerdict {
                        case,
                        kind: BlockKind::Diverges,
                        witness: Some(deg),
                        empirical: false,
                    }),
                }
            }
            CaseLabel::One => unreachable!("lambda = 1 takes the unit expansion path"),
        },
    }
}

fn assemble_limit(blocks: &[BlockVerdict]) -> Option<BlockVector> {
    let segments: Option<Vec<Segment>> = blocks
        .iter()
        .map(|b| match &b.kind {
            BlockKind::ConvergesTo(seg) => Some(seg.clone()),
            _ => None,
        })
        .collect();
    segments.map(|segments| BlockVector { segments })
}

/// Theorem-4 dichotomy (and, for c = 0, the Theorem-5 trichotomy) for the
/// average sequence of the whole system.
pub fn classify_average_system(sys: &JordanSystem) -> Result<Verdict> {
    classify_average_system_with_horizon(sys, DEFAULT_EMPIRICAL_HORIZON)
}

pub fn classify_average_system_with_horizon(sys: &JordanSystem, horizon: usize) -> Result<Verdict> {
    let ctx = ZeroCtx::for_system(sys);
    let blocks: Vec<BlockVerdict> = sys
        .blocks
        .iter()
        .zip(&sys.x.segments)
        .zip(&sys.c.segments)
        .map(|((block, v), d)| classify_average_block(block, v, d, &ctx))
        .collect::<Result<_>>()?;

    let any_diverges = blocks.iter().any(|b| b.kind == BlockKind::Diverges);
    let kind = if any_diverges {
        VerdictKind::DivergesToInfinity
    } else if sys.is_linear() {
        match assemble_limit(&blocks) {
            Some(limit) if limit.is_zero() => VerdictKind::ConvergesToZero,
            _ => {
                let trace = brute_force_average(&sys.to_float(), horizon)?;
                let lo = horizon / 2;
                let window = &trace.norms[lo.min(trace.norms.len() - 1)..];
                VerdictKind::BoundedAwayFromZero {
                    f_empirical: window.iter().cloned().fold(f64::INFINITY, f64::min),
                    g_empirical: window.iter().cloned().fold(0.0, f64::max),
                }
            }
        }
    } else {
        match assemble_limit(&blocks) {
            Some(limit) if limit.is_zero() => VerdictKind::ConvergesToZero,
            Some(limit) => VerdictKind::ConvergesToConstant(limit),
            None => VerdictKind::Bounded,
        }
    };

    Ok(Verdict {
        kind,
        blocks,
        numerically_uncertain: ctx.float_scale.is_some(),
    })
}

#[derive(Clone, Debug)]
pub struct AverageTrace {
    /// Ave_k for k = 1..=K; index k-1.
    pub averages: Vec<BlockVector>,
    /// Norms of the averages, same indexing.
    pub norms: Vec<f64>,
    pub empirical: EmpiricalClass,
    pub overflow_at: Option<usize>,
}

/// Definitional oracle: running sums of the orbit divided by k.
/// Exact in exact mode.
pub fn brute_force_average(sys: &JordanSystem, horizon: usize) -> Result<AverageTrace> {
    assert!(horizon >= 1, "horizon must be >= 1");
    let scale = 1.0 + sys.input_scale();
    let mut averages = Vec::with_capacity(horizon);
    let mut norms = Vec::with_capacity(horizon);
    let mut overflow_at = None;
    let mut state = sys.x.clone();
    let mut running = sys.x.clone();
    for k in 1..=horizon {
        let inv_k = Scalar::from_int(k as i64)
            .with_mode_of(&sys.blocks.first().map(|b| b.lambda.clone()).unwrap_or_else(Scalar::one))
            .inv()?;
        let ave = running.scale(&inv_k);
        let norm = block_norm(&ave);
        averages.push(ave);
        norms.push(norm);
        if sys.mode() == Mode::Float && (!norm.is_finite() || norm > 1e300) {
            overflow_at = Some(k);
            break;
        }
        if k < horizon {
            state = apply_affine(sys, &state)?;
            running = running.add(&state);
        }
    }
    let empirical = classify_norms(&norms, scale, overflow_at.is_some());
    Ok(AverageTrace {
        averages,
        norms,
        empirical,
        overflow_at,
    })
}

/// Closed forms for all blocks of a system.
#[derive(Clone, Debug)]
pub struct SystemAverageExpansion {
    pub blocks: Vec<AvgBlockExpansion>,
}

impl SystemAverageExpansion {
    pub fn valid_from(&self) -> usize {
        self.blocks.iter().map(|b| b.valid_from()).max().unwrap_or(2)
    }

    pub fn eval(&self, k: i64, sys: &JordanSystem) -> Result<BlockVector> {
        Ok(BlockVector {
            segments: self
                .blocks
                .iter()
                .zip(&sys.blocks)
                .map(|(b, jb)| {
                    let seg = b.eval(k)?;
                    // s = t = 0 unit blocks evaluate to an empty segment;
                    // restore the block shape.
                    if seg.is_empty() {
                        Ok((0..jb.size)
                            .map(|_| Scalar::zero().with_mode_of(&jb.lambda))
                            .collect())
                    } else {
                        Ok(seg)
                    }
                })
                .collect::<Result<_>>()?,
        })
    }
}

pub fn expand_average_system(sys: &JordanSystem) -> SystemAverageExpansion {
    SystemAverageExpansion {
        blocks: sys
            .blocks
            .iter()
            .zip(&sys.x.segments)
            .zip(&sys.c.segments)
            .map(|((block, v), d)| expand_average_block(block, v, d))
            .collect(),
    }
}

/// Compare the closed-form average against the running-sum oracle at every
/// valid k up to the horizon; exact equality in exact mode.
pub fn average_oracle_check(
    sys: &JordanSystem,
    horizon: usize,
    tol: Option<f64>,
) -> Result<crate::iterates::OracleComparison> {
    let expansion = expand_average_system(sys);
    let trace = brute_force_average(sys, horizon)?;
    let mut checked = 0usize;
    let mut max_dev: f64 = 0.0;
    for k in expansion.valid_from()..=horizon.min(trace.averages.len()) {
        let closed = expansion.eval(k as i64, sys)?;
        let direct = &trace.averages[k - 1];
        match sys.mode() {
            Mode::Exact => {
                if &closed != direct {
                    return Err(Error::identity(
                        "average_oracle_check",
                        format!("closed-form average differs from running sum at k={k}"),
                    ));
                }
            }
            Mode::Float => {
                let tol = tol.unwrap_or(1e-9);
                for (a, b) in closed.segments.iter().flatten().zip(direct.segments.iter().flatten()) {
                    let dev = (a.to_complex64() - b.to_complex64()).norm();
                    let rel = dev / (1.0 + b.to_complex64().norm());
                    max_dev = max_dev.max(rel);
                    if rel > tol {
                        return Err(Error::identity(
                            "average_oracle_check",
                            format!("float closed form deviates by {rel:.3e} (tol {tol:.3e}) at k={k}"),
                        ));
                    }
                }
            }
        }
        checked += 1;
    }
    Ok(crate::iterates::OracleComparison { checked, max_dev })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jordan::JordanBlock;

    fn ints(vals: &[i64]) -> Segment {
        vals.iter().map(|&n| Scalar::from_int(n)).collect()
    }

    fn block_sys(lambda: Scalar, size: usize, x: Segment, c: Segment) -> JordanSystem {
        JordanSystem::new(
            vec![JordanBlock::new(lambda, size)],
            BlockVector { segments: vec![c] },
            BlockVector { segments: vec![x] },
        )
        .unwrap()
    }

    #[test]
    fn unit_case_constant_average() {
        // lambda = 1, s = 1, t = 0: Ave_k = x for all k
        let b = JordanBlock::new(Scalar::one(), 1);
        let e = expand_average_block(&b, &ints(&[4]), &ints(&[0]));
        for k in 3..=12 {
            assert_eq!(e.eval(k).unwrap(), ints(&[4]));
        }
        let sys = block_sys(Scalar::one(), 1, ints(&[4]), ints(&[0]));
        let trace = brute_force_average(&sys, 9).unwrap();
        assert_eq!(trace.averages[8].segments[0], ints(&[4]));
    }

    #[test]
    fn geometric_scalar_average() {
        // lambda = 2, d = 0, v = x: A_0 = x, B-part F = -x, Ave_k = (2^k - 1) x / k
        let b = JordanBlock::new(Scalar::from_int(2), 1);
        let e = expand_average_block(&b, &ints(&[1]), &ints(&[0]));
        match &e {
            AvgBlockExpansion::Geometric(g) => {
                assert_eq!(g.a_avg, vec![ints(&[1])]);
                assert_eq!(g.f, ints(&[-1]));
                assert!(g.e.iter().all(Scalar::is_zero));
            }
            _ => panic!("expected geometric"),
        }
        assert_eq!(e.eval(4).unwrap(), vec![Scalar::from_ratio(15, 4)]);
    }

    #[test]
    fn trivial_block_average_is_zero() {
        let b = JordanBlock::new(Scalar::from_int(2), 2);
        let e = expand_average_block(&b, &ints(&[0, 0]), &ints(&[0, 0]));
        assert_eq!(e.eval(5).unwrap(), ints(&[0, 0]));
    }

    #[test]
    fn h_polynomial_fixed_point_examples() {
        // lambda = 2 size-2, c = (0,1): fixed point is (1,-1)
        let b = JordanBlock::new(Scalar::from_int(2), 2);
        let c = ints(&[0, 1]);
        let sys = block_sys(Scalar::from_int(2), 2, ints(&[1, -1]), c.clone());
        let star = fixed_point(&sys).unwrap();
        assert_eq!(star.segments[0], ints(&[1, -1]));
        assert_eq!(apply_affine(&sys, &star).unwrap(), star);

        // x at the fixed point: H identically zero
        let e = expand_average_block(&b, &ints(&[1, -1]), &c);
        if let AvgBlockExpansion::Geometric(g) = &e {
            let analysis = h_polynomial(g).unwrap();
            assert!(analysis.h.is_identically_zero());
            assert_eq!(analysis.rule, HRule::Degree);
        } else {
            panic!("expected geometric");
        }

        // x = (0,-1): condition at i = 1 holds, H has degree 0
        let e = expand_average_block(&b, &ints(&[0, -1]), &c);
        if let AvgBlockExpansion::Geometric(g) = &e {
            let analysis = h_polynomial(g).unwrap();
            assert_eq!(analysis.h.degree(), Some(0));
        } else {
            panic!("expected geometric");
        }
        assert!(theorem7_condition(&b, &ints(&[0, -1]), &c, 1).unwrap());

        // x = 0: condition fails at i = 1, H has degree 1 (dominant-c rule)
        let e = expand_average_block(&b, &ints(&[0, 0]), &c);
        if let AvgBlockExpansion::Geometric(g) = &e {
            let analysis = h_polynomial(g).unwrap();
            assert_eq!(analysis.h.degree(), Some(1));
            assert_eq!(analysis.rule, HRule::DominantC { index: 1 });
        } else {
            panic!("expected geometric");
        }
        assert!(!theorem7_condition(&b, &ints(&[0, 0]), &c, 1).unwrap());
    }

    #[test]
    fn fixed_point_simple_cases() {
        // lambda = 1/2 scalar, c = 1: x* = 2
        let sys = block_sys(Scalar::from_ratio(1, 2), 1, ints(&[0]), ints(&[1]));
        assert_eq!(fixed_point(&sys).unwrap().segments[0], ints(&[2]));
        // c = 0: x* = 0
        let sys = block_sys(Scalar::from_int(3), 2, ints(&[1, 1]), ints(&[0, 0]));
        assert!(fixed_point(&sys).unwrap().is_zero());
        // lambda = 1 with nonzero c: no fixed point
        let sys = block_sys(Scalar::one(), 1, ints(&[0]), ints(&[1]));
        assert!(fixed_point(&sys).is_err());
    }

    #[test]
    fn average_at_fixed_point_is_e() {
        let sys = block_sys(Scalar::from_int(2), 2, ints(&[1, -1]), ints(&[0, 1]));
        let exp = expand_average_system(&sys);
        let e = match &exp.blocks[0] {
            AvgBlockExpansion::Geometric(g) => g.e.clone(),
            _ => panic!(),
        };
        for k in exp.valid_from()..=20 {
            assert_eq!(exp.eval(k as i64, &sys).unwrap().segments[0], e);
        }
        let trace = brute_force_average(&sys, 20).unwrap();
        for ave in &trace.averages {
            assert_eq!(ave.segments[0], e);
        }
    }

    #[test]
    fn average_classification_examples() {
        let ctx = ZeroCtx::exact();
        // lambda = 1, t = s-1 with N^i c + N^{i+1} x = 0: Ave is constant x
        let b = JordanBlock::new(Scalar::one(), 2);
        let x = ints(&[3, -2]);
        let c = ints(&[2, 0]); // c + Nx = (2,0) + (-2,0) = 0
        let v = classify_average_block(&b, &x, &c, &ctx).unwrap();
        assert_eq!(v.kind, BlockKind::ConvergesTo(x.clone()));
        // cross-check via the oracle
        let sys = block_sys(Scalar::one(), 2, x.clone(), c);
        let trace = brute_force_average(&sys, 12).unwrap();
        for ave in &trace.averages {
            assert_eq!(ave.segments[0], x);
        }

        // lambda = i scalar, c != 0, x = 0: bounded (empirically refined)
        let b = JordanBlock::new(Scalar::i(), 1);
        let v = classify_average_block(&b, &ints(&[0]), &ints(&[1]), &ctx).unwrap();
        assert!(matches!(v.kind, BlockKind::Bounded { .. }));
        assert!(v.empirical);

        // lambda = 2 scalar, c = 0, x != 0: diverges
        let b = JordanBlock::new(Scalar::from_int(2), 1);
        let v = classify_average_block(&b, &ints(&[1]), &ints(&[0]), &ctx).unwrap();
        assert_eq!(v.kind, BlockKind::Diverges);
    }

    #[test]
    fn example3_average_values() {
        // A = [[i,1],[0,i]], c = e0, x = e1: Ave_5 = v/5
        let sys = block_sys(Scalar::i(), 2, ints(&[0, 1]), ints(&[1, 0]));
        let trace = brute_force_average(&sys, 5).unwrap();
        assert_eq!(
            trace.averages[4].segments[0],
            vec![Scalar::zero(), Scalar::from_ratio(1, 5)]
        );
        // k = 1: the average is x itself
        assert_eq!(trace.averages[0], sys.x);
    }

    #[test]
    fn g_factorization_on_an_s_equals_t_block() {
        // s = t = 2, lambda = i
        let b = JordanBlock::new(Scalar::i(), 2);
        let e = expand_average_block(&b, &ints(&[1, 2]), &ints(&[0, 1]));
        if let AvgBlockExpansion::Geometric(g) = &e {
            let analysis = h_polynomial(g).unwrap();
            for k in e.valid_from() as i64..=24 {
                let g_direct = e.eval_g(k).unwrap();
                let factor = &Scalar::i().pow(k).unwrap() / &Scalar::from_int(k);
                let h_val = analysis.h.eval(k, 2);
                let recomposed: Segment = h_val.iter().map(|h| h * &factor).collect();
                assert_eq!(g_direct, recomposed, "k = {k}");
            }
        } else {
            panic!("expected geometric");
        }
    }
}
