//! Named counterexample instances used by the regression tests and the CLI.

use crate::jordan::{BlockVector, JordanBlock, JordanSystem};
use crate::property_p::WeightedShift;
use crate::scalar::Scalar;

/// The dichotomy-defeating weighted shift on the truncated sequence space.
pub fn example1(truncation: usize) -> WeightedShift {
    WeightedShift::new(truncation)
}

pub const EXAMPLE1_DEFAULT_TRUNCATION: usize = 512;

/// T x = i x + c on one coordinate, started at 0: the orbit cycles through
/// 0, c, (1+i)c, ic, 0, ... so it is neither convergent to 0 nor bounded
/// away from 0.
pub fn example2() -> JordanSystem {
    JordanSystem::diagonal(vec![Scalar::i()], vec![Scalar::one()], vec![Scalar::zero()])
        .expect("static shapes")
}

/// The affine map on C^2 with A = [[i,1],[0,i]], c = e_0, started at e_1:
/// its averages do not converge to 0 yet contain a subsequence that does.
pub fn example3() -> JordanSystem {
    JordanSystem::new(
        vec![JordanBlock::new(Scalar::i(), 2)],
        BlockVector {
            segments: vec![vec![Scalar::one(), Scalar::zero()]],
        },
        BlockVector {
            segments: vec![vec![Scalar::zero(), Scalar::one()]],
        },
    )
    .expect("static shapes")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::iterates::brute_force_orbit;
    use crate::verdict::VerdictKind;

    #[test]
    fn example2_orbit_pattern() {
        let sys = example2();
        let trace = brute_force_orbit(&sys, 101).unwrap();
        for n in 0..=25 {
            assert!(trace.states[4 * n].is_zero(), "T^{}(0) = 0", 4 * n);
            assert_eq!(
                trace.states[4 * n + 1].segments[0][0],
                Scalar::one(),
                "T^{}(0) = c",
                4 * n + 1
            );
        }
        assert_eq!(
            crate::iterates::classify_system(&sys).kind,
            VerdictKind::Bounded
        );
    }

    #[test]
    fn example3_first_average_subsequence() {
        let sys = example3();
        let trace = crate::averages::brute_force_average(&sys, 9).unwrap();
        // k = 5: Ave_5 = v/5
        assert_eq!(
            trace.averages[4].segments[0],
            vec![Scalar::zero(), Scalar::from_ratio(1, 5)]
        );
        assert_eq!(
            trace.averages[8].segments[0],
            vec![Scalar::zero(), Scalar::from_ratio(1, 9)]
        );
    }
}
