//! Classification outcomes for orbits and average sequences.

use crate::jordan::{BlockVector, Segment};

/// Which branch of the case analysis a block falls in.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CaseLabel {
    /// |lambda| > 1
    ModulusAboveOne,
    /// |lambda| = 1, lambda != 1
    UnitCircle,
    /// lambda = 1
    One,
    /// |lambda| < 1
    ModulusBelowOne,
}

impl CaseLabel {
    pub fn as_str(&self) -> &'static str {
        match self {
            CaseLabel::ModulusAboveOne => "Case 1: |lambda|>1",
            CaseLabel::UnitCircle => "Case 2: |lambda|=1, lambda!=1",
            CaseLabel::One => "Case 3: lambda=1",
            CaseLabel::ModulusBelowOne => "Case 4: |lambda|<1",
        }
    }
}

/// Per-block outcome.
#[derive(Clone, Debug, PartialEq)]
pub enum BlockKind {
    Diverges,
    /// The block sequence converges (or is eventually equal) to this segment.
    ConvergesTo(Segment),
    /// Bounded without converging. `away_from_zero` is set when the closed
    /// form pins the norm away from 0 (linear case); `None` when the closed
    /// form alone cannot decide (translated unit-circle oscillation).
    Bounded { away_from_zero: Option<bool> },
}

#[derive(Clone, Debug, PartialEq)]
pub struct BlockVerdict {
    pub case: CaseLabel,
    pub kind: BlockKind,
    /// First nonzero coefficient index backing a divergence claim.
    pub witness: Option<usize>,
    /// Set when the sub-verdict relies on an empirical refinement rather
    /// than a closed-form rule.
    pub empirical: bool,
}

/// Whole-system outcome.
#[derive(Clone, Debug, PartialEq)]
pub enum VerdictKind {
    DivergesToInfinity,
    Bounded,
    ConvergesToZero,
    ConvergesToConstant(BlockVector),
    /// Bounded and (for linear maps) eventually pinched between positive
    /// constants; F and G are estimates read off an oracle window.
    BoundedAwayFromZero { f_empirical: f64, g_empirical: f64 },
}

impl VerdictKind {
    pub fn name(&self) -> &'static str {
        match self {
            VerdictKind::DivergesToInfinity => "DivergesToInfinity",
            VerdictKind::Bounded => "Bounded",
            VerdictKind::ConvergesToZero => "ConvergesToZero",
            VerdictKind::ConvergesToConstant(_) => "ConvergesToConstant",
            VerdictKind::BoundedAwayFromZero { .. } => "BoundedAwayFromZero",
        }
    }

    pub fn is_bounded(&self) -> bool {
        !matches!(self, VerdictKind::DivergesToInfinity)
    }
}

#[derive(Clone, Debug)]
pub struct Verdict {
    pub kind: VerdictKind,
    pub blocks: Vec<BlockVerdict>,
    /// True when float-mode tolerance predicates were involved anywhere.
    pub numerically_uncertain: bool,
}
