//! Closed-form expansion of the iterates T^k x per block, the case analysis
//! that classifies each orbit, and the definitional brute-force oracle.
//!
//! On a block with eigenvalue lambda, writing v and d for the block's
//! segments of x and c, s and t for their nilpotent indices under N, and
//! w = max{s,t}: for k > max{s,t} the block orbit is
//!
//!   lambda != 1:  B + sum_{j=0}^{w-1} lambda^{k-j} C(k,j) A_j
//!   lambda  = 1:  v + sum_{j=1}^{l} C(k,j) B_j,   l = max{s-1,t}
//!
//! with constant segments A_j, B, B_j. The nilpotency conventions
//! (N^j v = 0 for j >= s, empty sums are zero) make one formula per case
//! cover the epsilon-cutoff subcases.

use std::cmp::Ordering;

use crate::combinatorics::binom_scalar;
use crate::error::{Error, Result};
use crate::jordan::{
    apply_affine, block_norm, nilpotent_index, shift_down_pow, BlockVector, JordanBlock,
    JordanSystem, Segment,
};
use crate::scalar::{Mode, Scalar};
use crate::verdict::{BlockKind, BlockVerdict, CaseLabel, Verdict, VerdictKind};

/// Default oracle horizon used when a verdict needs an empirical window.
pub const DEFAULT_EMPIRICAL_HORIZON: usize = 1000;
/// A bounded orbit never exceeds this multiple of the input scale; exceeding
/// it is empirical divergence.
pub const DIVERGENCE_NORM_FACTOR: f64 = 1e6;
/// Empirical growth: the max over the second half of the horizon exceeds the
/// max over the first half by more than this many input scales. Bounded
/// sequences gain at most vanishing amounts between the halves, while any
/// in-pool divergence (at least linear in k) clears the margin easily.
pub const GROWTH_MARGIN_SCALES: f64 = 5.0;
/// Relative level below which an empirical norm counts as zero.
pub const EMPIRICAL_ZERO_LEVEL: f64 = 1e-9;

/// Eq.-(4)-shaped expansion, valid for lambda != 1.
#[derive(Clone, Debug)]
pub struct IterateExpansion {
    pub lambda: Scalar,
    pub s: usize,
    pub t: usize,
    pub w: usize,
    /// A_0 .. A_{w-1}
    pub a: Vec<Segment>,
    pub b: Segment,
}

/// Eq.-(5)-shaped expansion for lambda = 1.
#[derive(Clone, Debug)]
pub struct UnitIterateExpansion {
    pub v: Segment,
    pub s: usize,
    pub t: usize,
    pub l: usize,
    /// B_1 .. B_l (index 0 holds B_1)
    pub bseq: Vec<Segment>,
}

#[derive(Clone, Debug)]
pub enum BlockExpansion {
    Geometric(IterateExpansion),
    Unit(UnitIterateExpansion),
}

impl BlockExpansion {
    pub fn s(&self) -> usize {
        match self {
            BlockExpansion::Geometric(e) => e.s,
            BlockExpansion::Unit(e) => e.s,
        }
    }

    pub fn t(&self) -> usize {
        match self {
            BlockExpansion::Geometric(e) => e.t,
            BlockExpansion::Unit(e) => e.t,
        }
    }

    /// Closed forms hold strictly beyond max{s,t}.
    pub fn valid_from(&self) -> usize {
        self.s().max(self.t()) + 1
    }

    /// Exact value of the block orbit at step k.
    pub fn eval(&self, k: i64) -> Result<Segment> {
        if k < self.valid_from() as i64 {
            return Err(Error::domain(
                "eval_iterate",
                format!("closed form is valid only for k > max{{s,t}} = {}; got k={k}", self.valid_from() - 1),
            ));
        }
        match self {
            BlockExpansion::Geometric(e) => {
                let mut acc = e.b.clone();
                for (j, aj) in e.a.iter().enumerate() {
                    let coeff = &e.lambda.pow(k - j as i64)? * &binom_scalar(k, j as i64).with_mode_of(&e.lambda);
                    for (q, a) in aj.iter().enumerate() {
                        acc[q] = &acc[q] + &(a * &coeff);
                    }
                }
                Ok(acc)
            }
            BlockExpansion::Unit(e) => {
                let mut acc = e.v.clone();
                for (idx, bj) in e.bseq.iter().enumerate() {
                    let coeff = binom_scalar(k, idx as i64 + 1);
                    for (q, b) in bj.iter().enumerate() {
                        acc[q] = &acc[q] + &(b * &coeff);
                    }
                }
                Ok(acc)
            }
        }
    }
}

fn zero_segment(like: &[Scalar]) -> Segment {
    like.iter().map(|s| Scalar::zero().with_mode_of(s)).collect()
}

/// B = sum_{i=0}^{t-1} N^i d / (1-lambda)^{i+1}.
fn geometric_limit(lambda: &Scalar, d: &[Scalar]) -> Segment {
    let t = nilpotent_index(d);
    let one_minus = &Scalar::one().with_mode_of(lambda) - lambda;
    let mut b = zero_segment(d);
    for i in 0..t {
        let coeff = one_minus.pow(-(i as i64 + 1)).expect("lambda != 1");
        let nd = shift_down_pow(d, i);
        for (q, x) in nd.iter().enumerate() {
            b[q] = &b[q] + &(x * &coeff);
        }
    }
    b
}

/// Expand one block's orbit into its closed form.
pub fn expand_block(block: &JordanBlock, v: &[Scalar], d: &[Scalar]) -> BlockExpansion {
    let s = nilpotent_index(v);
    let t = nilpotent_index(d);
    if block.lambda.is_one() {
        let l = t.max(s.saturating_sub(1));
        let bseq = (1..=l)
            .map(|j| {
                let nv = shift_down_pow(v, j);
                let nd = shift_down_pow(d, j - 1);
                nv.iter().zip(&nd).map(|(a, b)| a + b).collect()
            })
            .collect();
        BlockExpansion::Unit(UnitIterateExpansion {
            v: v.to_vec(),
            s,
            t,
            l,
            bseq,
        })
    } else {
        let w = s.max(t);
        let one_minus = &Scalar::one().with_mode_of(&block.lambda) - &block.lambda;
        let a = (0..w)
            .map(|j| {
                let mut aj = shift_down_pow(v, j);
                for i in j..t {
                    let coeff = one_minus.pow(-((i - j) as i64 + 1)).expect("lambda != 1");
                    let nd = shift_down_pow(d, i);
                    for (q, x) in nd.iter().enumerate() {
                        aj[q] = &aj[q] - &(x * &coeff);
                    }
                }
                aj
            })
            .collect();
        BlockExpansion::Geometric(IterateExpansion {
            lambda: block.lambda.clone(),
            s,
            t,
            w,
            a,
            b: geometric_limit(&block.lambda, d),
        })
    }
}

/// Closed form for the whole system.
#[derive(Clone, Debug)]
pub struct SystemExpansion {
    pub blocks: Vec<BlockExpansion>,
}

impl SystemExpansion {
    pub fn valid_from(&self) -> usize {
        self.blocks.iter().map(|b| b.valid_from()).max().unwrap_or(1)
    }

    pub fn eval(&self, k: i64) -> Result<BlockVector> {
        if k < self.valid_from() as i64 {
            return Err(Error::domain(
                "eval_iterate",
                format!("system closed form is valid from k = {}; got k={k}", self.valid_from()),
            ));
        }
        Ok(BlockVector {
            segments: self
                .blocks
                .iter()
                .map(|b| b.eval(k))
                .collect::<Result<_>>()?,
        })
    }
}

pub fn expand_system(sys: &JordanSystem) -> SystemExpansion {
    SystemExpansion {
        blocks: sys
            .blocks
            .iter()
            .zip(&sys.x.segments)
            .zip(&sys.c.segments)
            .map(|((block, v), d)| expand_block(block, v, d))
            .collect(),
    }
}

/// Float-mode zero tolerance context; `None` means exact predicates.
#[derive(Clone, Copy, Debug)]
pub struct ZeroCtx {
    pub float_scale: Option<f64>,
}

impl ZeroCtx {
    pub fn exact() -> Self {
        ZeroCtx { float_scale: None }
    }

    pub fn for_system(sys: &JordanSystem) -> Self {
        match sys.mode() {
            Mode::Exact => ZeroCtx::exact(),
            Mode::Float => ZeroCtx {
                float_scale: Some(sys.input_scale()),
            },
        }
    }

    pub fn segment_is_zero(&self, seg: &[Scalar]) -> bool {
        match self.float_scale {
            None => seg.iter().all(Scalar::is_zero),
            Some(scale) => seg.iter().all(|s| s.is_zero_tol(scale)),
        }
    }
}

pub fn case_label(lambda: &Scalar) -> CaseLabel {
    if lambda.is_one() {
        CaseLabel::One
    } else {
        match lambda.unit_circle_class() {
            Ordering::Greater => CaseLabel::ModulusAboveOne,
            Ordering::Equal => CaseLabel::UnitCircle,
            Ordering::Less => CaseLabel::ModulusBelowOne,
        }
    }
}

/// Case analysis for one block.
pub fn classify_block(expansion: &BlockExpansion, ctx: &ZeroCtx) -> BlockVerdict {
    match expansion {
        BlockExpansion::Unit(e) => {
            // lambda = 1: divergent iff some B_j != 0, else the orbit is
            // eventually the constant v.
            let witness = e.bseq.iter().position(|b| !ctx.segment_is_zero(b));
            BlockVerdict {
                case: CaseLabel::One,
                kind: match witness {
                    Some(_) => BlockKind::Diverges,
                    None => BlockKind::ConvergesTo(e.v.clone()),
                },
                witness: witness.map(|j| j + 1),
                empirical: false,
            }
        }
        BlockExpansion::Geometric(e) => {
            let case = case_label(&e.lambda);
            match case {
                CaseLabel::ModulusAboveOne => {
                    let witness = e.a.iter().position(|a| !ctx.segment_is_zero(a));
                    BlockVerdict {
                        case,
                        kind: match witness {
                            Some(_) => BlockKind::Diverges,
                            None => BlockKind::ConvergesTo(e.b.clone()),
                        },
                        witness,
                        empirical: false,
                    }
                }
                CaseLabel::UnitCircle => {
                    let witness = e
                        .a
                        .iter()
                        .enumerate()
                        .skip(1)
                        .find(|(_, a)| !ctx.segment_is_zero(a))
                        .map(|(j, _)| j);
                    if let Some(j) = witness {
                        return BlockVerdict {
                            case,
                            kind: BlockKind::Diverges,
                            witness: Some(j),
                            empirical: false,
                        };
                    }
                    let a0_zero = e.a.first().map(|a| ctx.segment_is_zero(a)).unwrap_or(true);
                    if a0_zero {
                        BlockVerdict {
                            case,
                            kind: BlockKind::ConvergesTo(e.b.clone()),
                            witness: None,
                            empirical: false,
                        }
                    } else {
                        // orbit is B + lambda^k A_0: bounded; with B = 0 the
                        // norm is the constant |A_0|, hence away from zero.
                        let away = if ctx.segment_is_zero(&e.b) {
                            Some(true)
                        } else {
                            None
                        };
                        BlockVerdict {
                            case,
                            kind: BlockKind::Bounded { away_from_zero: away },
                            witness: None,
                            empirical: false,
                        }
                    }
                }
                CaseLabel::ModulusBelowOne | CaseLabel::One => BlockVerdict {
                    case,
                    kind: BlockKind::ConvergesTo(e.b.clone()),
                    witness: None,
                    empirical: false,
                },
            }
        }
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

/// Min/max orbit norm over the window [K/2, K] of a float-mode oracle run.
fn empirical_window(sys: &JordanSystem, horizon: usize) -> (f64, f64) {
    let trace = brute_force_orbit(&sys.to_float(), horizon).expect("float orbit cannot fail");
    let lo = horizon / 2;
    let window = &trace.norms[lo.min(trace.norms.len() - 1)..];
    let f = window.iter().cloned().fold(f64::INFINITY, f64::min);
    let g = window.iter().cloned().fold(0.0, f64::max);
    (f, g)
}

/// Theorem-1 dichotomy (and, for c = 0, the Theorem-2 trichotomy) for the
/// whole system, assembled from the per-block case analysis.
pub fn classify_system(sys: &JordanSystem) -> Verdict {
    classify_system_with_horizon(sys, DEFAULT_EMPIRICAL_HORIZON)
}

pub fn classify_system_with_horizon(sys: &JordanSystem, horizon: usize) -> Verdict {
    let ctx = ZeroCtx::for_system(sys);
    let expansion = expand_system(sys);
    let blocks: Vec<BlockVerdict> = expansion
        .blocks
        .iter()
        .map(|b| classify_block(b, &ctx))
        .collect();
    let uncertain = ctx.float_scale.is_some();

    let any_diverges = blocks.iter().any(|b| b.kind == BlockKind::Diverges);
    let kind = if any_diverges {
        VerdictKind::DivergesToInfinity
    } else if sys.is_linear() {
        // Theorem-2 trichotomy: bounded and not convergent to 0 means
        // bounded away from 0.
        match assemble_limit(&blocks) {
            Some(limit) if limit.is_zero() => VerdictKind::ConvergesToZero,
            _ => {
                let (f, g) = empirical_window(sys, horizon);
                VerdictKind::BoundedAwayFromZero {
                    f_empirical: f,
                    g_empirical: g,
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

    Verdict {
        kind,
        blocks,
        numerically_uncertain: uncertain,
    }
}

/// Empirical classification of a norm sequence, by documented thresholds.
#[derive(Clone, Debug, PartialEq)]
pub enum EmpiricalClass {
    Diverges,
    Bounded,
    ConvergesToZero,
    BoundedAway { f: f64, g: f64 },
}

#[derive(Clone, Debug)]
pub struct OrbitTrace {
    /// Norm of T^k x for k = 0..=K.
    pub norms: Vec<f64>,
    /// The states T^k x themselves.
    pub states: Vec<BlockVector>,
    pub empirical: EmpiricalClass,
    /// Step at which float mode overflowed, if it did.
    pub overflow_at: Option<usize>,
}

/// Classify a norm sequence. Rules, in order: float overflow or a norm above
/// `DIVERGENCE_NORM_FACTOR * scale` diverges; a second-half max exceeding the
/// first-half max by more than `GROWTH_MARGIN_SCALES * scale` diverges;
/// a last-quarter max below `EMPIRICAL_ZERO_LEVEL * scale` converges to 0;
/// a last-half min above `EMPIRICAL_ZERO_LEVEL * scale` is bounded away.
pub fn classify_norms(norms: &[f64], scale: f64, overflowed: bool) -> EmpiricalClass {
    let max_norm = norms.iter().cloned().fold(0.0, f64::max);
    if overflowed || !max_norm.is_finite() || max_norm > DIVERGENCE_NORM_FACTOR * scale {
        return EmpiricalClass::Diverges;
    }
    let half = norms.len() / 2;
    let first_max = norms[..half].iter().cloned().fold(0.0, f64::max);
    let second_max = norms[half..].iter().cloned().fold(0.0, f64::max);
    if second_max - first_max > GROWTH_MARGIN_SCALES * scale {
        return EmpiricalClass::Diverges;
    }
    let quarter_start = norms.len() - norms.len() / 4;
    let tail_max = norms[quarter_start.min(norms.len() - 1)..]
        .iter()
        .cloned()
        .fold(0.0, f64::max);
    if tail_max < EMPIRICAL_ZERO_LEVEL * scale {
        return EmpiricalClass::ConvergesToZero;
    }
    let window = &norms[half..];
    let f = window.iter().cloned().fold(f64::INFINITY, f64::min);
    let g = window.iter().cloned().fold(0.0, f64::max);
    if f > EMPIRICAL_ZERO_LEVEL * scale {
        EmpiricalClass::BoundedAway { f, g }
    } else {
        EmpiricalClass::Bounded
    }
}

/// Iterate T from x, recording every state and norm up to the horizon.
/// Exact in exact mode; float overflow stops the run and is reported in the
/// trace as divergence at the overflow step.
pub fn brute_force_orbit(sys: &JordanSystem, horizon: usize) -> Result<OrbitTrace> {
    assert!(horizon >= 1, "horizon must be >= 1");
    let scale = 1.0 + sys.input_scale();
    let mut states = Vec::with_capacity(horizon + 1);
    let mut norms = Vec::with_capacity(horizon + 1);
    let mut overflow_at = None;
    let mut state = sys.x.clone();
    norms.push(block_norm(&state));
    states.push(state.clone());
    for k in 1..=horizon {
        state = apply_affine(sys, &state)?;
        let norm = block_norm(&state);
        if sys.mode() == Mode::Float && (!norm.is_finite() || norm > 1e300) {
            overflow_at = Some(k);
            norms.push(norm);
            states.push(state);
            break;
        }
        norms.push(norm);
        states.push(state.clone());
    }
    let empirical = classify_norms(&norms, scale, overflow_at.is_some());
    Ok(OrbitTrace {
        norms,
        states,
        empirical,
        overflow_at,
    })
}

/// Compare the closed form against the definitional oracle at every valid
/// step up to the horizon. Exact mode demands exact equality and reports a
/// mismatch as an identity violation; float mode uses a relative tolerance.
pub fn oracle_check(sys: &JordanSystem, horizon: usize, tol: Option<f64>) -> Result<OracleComparison> {
    let expansion = expand_system(sys);
    let trace = brute_force_orbit(sys, horizon)?;
    let mut checked = 0usize;
    let mut max_dev: f64 = 0.0;
    for k in expansion.valid_from()..=horizon.min(trace.states.len() - 1) {
        let closed = expansion.eval(k as i64)?;
        let direct = &trace.states[k];
        match sys.mode() {
            Mode::Exact => {
                if &closed != direct {
                    return Err(Error::identity(
                        "oracle_check",
                        format!("closed-form iterate differs from direct iteration at k={k}"),
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
                            "oracle_check",
                            format!("float closed form deviates by {rel:.3e} (tol {tol:.3e}) at k={k}"),
                        ));
                    }
                }
            }
        }
        checked += 1;
    }
    Ok(OracleComparison { checked, max_dev })
}

#[derive(Clone, Copy, Debug)]
pub struct OracleComparison {
    pub checked: usize,
    pub max_dev: f64,
}
