//! Jordan-block data: blocks, block vectors, the block norm, and the affine
//! action A v + c applied blockwise.
//!
//! Within a block of size n, the nilpotent part N shifts coordinates toward
//! index 0: N e_q = e_{q-1} and N e_0 = 0, so (N v)_q = v_{q+1}. The
//! within-block norm is max-modulus and the block norm is the sum of
//! within-block norms over blocks. Norms are reported as f64; exact-mode
//! comparisons go through squared moduli.

use num::rational::BigRational;

use crate::error::{Error, Result};
use crate::scalar::{Mode, Scalar};

pub type Segment = Vec<Scalar>;

#[derive(Clone, Debug, PartialEq)]
pub struct JordanBlock {
    pub lambda: Scalar,
    pub size: usize,
}

impl JordanBlock {
    pub fn new(lambda: Scalar, size: usize) -> Self {
        assert!(size >= 1, "Jordan block size must be >= 1");
        JordanBlock { lambda, size }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BlockVector {
    pub segments: Vec<Segment>,
}

impl BlockVector {
    pub fn zero(blocks: &[JordanBlock]) -> Self {
        BlockVector {
            segments: blocks
                .iter()
                .map(|b| {
                    (0..b.size)
                        .map(|_| Scalar::zero().with_mode_of(&b.lambda))
                        .collect()
                })
                .collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.segments.iter().flatten().all(Scalar::is_zero)
    }

    pub fn add(&self, other: &Self) -> Self {
        BlockVector {
            segments: self
                .segments
                .iter()
                .zip(&other.segments)
                .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x + y).collect())
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        BlockVector {
            segments: self
                .segments
                .iter()
                .zip(&other.segments)
                .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x - y).collect())
                .collect(),
        }
    }

    pub fn scale(&self, by: &Scalar) -> Self {
        BlockVector {
            segments: self
                .segments
                .iter()
                .map(|s| s.iter().map(|x| x * by).collect())
                .collect(),
        }
    }

    pub fn to_float(&self) -> Self {
        BlockVector {
            segments: self
                .segments
                .iter()
                .map(|s| s.iter().map(Scalar::to_float).collect())
                .collect(),
        }
    }
}

/// An affine map T(x) = Ax + c in decomposed form: the blocks fix A, and the
/// block vectors c and x give the translation and the initial point.
#[derive(Clone, Debug)]
pub struct JordanSystem {
    pub blocks: Vec<JordanBlock>,
    pub c: BlockVector,
    pub x: BlockVector,
}

impl JordanSystem {
    pub fn new(blocks: Vec<JordanBlock>, c: BlockVector, x: BlockVector) -> Result<Self> {
        let sys = JordanSystem { blocks, c, x };
        sys.check_shapes()?;
        Ok(sys)
    }

    /// Convenience constructor for a diagonal matrix with supplied exact
    /// eigenvalues: one size-1 block per entry.
    pub fn diagonal(lambdas: Vec<Scalar>, c: Vec<Scalar>, x: Vec<Scalar>) -> Result<Self> {
        if lambdas.len() != c.len() || lambdas.len() != x.len() {
            return Err(Error::ShapeMismatch(format!(
                "diagonal constructor: {} eigenvalues, {} c entries, {} x entries",
                lambdas.len(),
                c.len(),
                x.len()
            )));
        }
        let blocks = lambdas.into_iter().map(|l| JordanBlock::new(l, 1)).collect();
        JordanSystem::new(
            blocks,
            BlockVector {
                segments: c.into_iter().map(|s| vec![s]).collect(),
            },
            BlockVector {
                segments: x.into_iter().map(|s| vec![s]).collect(),
            },
        )
    }

    fn check_shapes(&self) -> Result<()> {
        for (name, v) in [("c", &self.c), ("x", &self.x)] {
            if v.segments.len() != self.blocks.len() {
                return Err(Error::ShapeMismatch(format!(
                    "{name} has {} segments, system has {} blocks",
                    v.segments.len(),
                    self.blocks.len()
                )));
            }
            for (i, (seg, block)) in v.segments.iter().zip(&self.blocks).enumerate() {
                if seg.len() != block.size {
                    return Err(Error::ShapeMismatch(format!(
                        "{name}[{i}] has {} coordinates, block {i} has size {}",
                        seg.len(),
                        block.size
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn dimension(&self) -> usize {
        self.blocks.iter().map(|b| b.size).sum()
    }

    pub fn mode(&self) -> Mode {
        self.blocks
            .first()
            .map(|b| b.lambda.mode())
            .unwrap_or(Mode::Exact)
    }

    pub fn is_linear(&self) -> bool {
        self.c.is_zero()
    }

    pub fn zero_vector(&self) -> BlockVector {
        BlockVector::zero(&self.blocks)
    }

    pub fn to_float(&self) -> JordanSystem {
        JordanSystem {
            blocks: self
                .blocks
                .iter()
                .map(|b| JordanBlock::new(b.lambda.to_float(), b.size))
                .collect(),
            c: self.c.to_float(),
            x: self.x.to_float(),
        }
    }

    /// Scale of the input data, used by float-mode zero tests: the largest
    /// modulus among the coordinates of x and c, plus 1.
    pub fn input_scale(&self) -> f64 {
        let mut scale: f64 = 0.0;
        for v in [&self.x, &self.c] {
            for s in v.segments.iter().flatten() {
                scale = scale.max(s.modulus());
            }
        }
        scale
    }
}

/// N v: shift every coordinate one step toward index 0.
pub fn shift_down(seg: &[Scalar]) -> Segment {
    let mut out: Segment = seg[1..].to_vec();
    if let Some(first) = seg.first() {
        out.push(Scalar::zero().with_mode_of(first));
    }
    out
}

/// N^p v.
pub fn shift_down_pow(seg: &[Scalar], p: usize) -> Segment {
    let n = seg.len();
    (0..n)
        .map(|q| {
            if q + p < n {
                seg[q + p].clone()
            } else {
                Scalar::zero().with_mode_of(&seg[0])
            }
        })
        .collect()
}

/// The smallest s with N^s v = 0: one past the last nonzero coordinate,
/// and 0 for the zero segment.
pub fn nilpotent_index(seg: &[Scalar]) -> usize {
    seg.iter()
        .rposition(|s| !s.is_zero())
        .map(|q| q + 1)
        .unwrap_or(0)
}

/// Max-modulus within one segment.
pub fn segment_norm(seg: &[Scalar]) -> f64 {
    seg.iter().map(Scalar::modulus).fold(0.0, f64::max)
}

/// Exact max of |z|^2 over a segment (exact mode only).
pub fn segment_max_modulus_sq(seg: &[Scalar]) -> BigRational {
    seg.iter()
        .map(Scalar::modulus_sq)
        .max()
        .unwrap_or_else(|| BigRational::from_integer(0.into()))
}

/// The norm used throughout: sum over blocks of the within-block max-modulus.
pub fn block_norm(v: &BlockVector) -> f64 {
    v.segments.iter().map(|s| segment_norm(s)).sum()
}

/// (lambda I + N) v on one block.
pub fn apply_block(block: &JordanBlock, seg: &[Scalar]) -> Segment {
    let shifted = shift_down(seg);
    seg.iter()
        .zip(&shifted)
        .map(|(s, n)| &(s * &block.lambda) + n)
        .collect()
}

/// A v + c, blockwise.
pub fn apply_affine(sys: &JordanSystem, v: &BlockVector) -> Result<BlockVector> {
    if v.segments.len() != sys.blocks.len()
        || v.segments
            .iter()
            .zip(&sys.blocks)
            .any(|(s, b)| s.len() != b.size)
    {
        return Err(Error::ShapeMismatch(
            "vector does not match system block structure".to_string(),
        ));
    }
    Ok(BlockVector {
        segments: sys
            .blocks
            .iter()
            .zip(&v.segments)
            .zip(&sys.c.segments)
            .map(|((block, seg), d)| {
                apply_block(block, seg)
                    .iter()
                    .zip(d)
                    .map(|(a, b)| a + b)
                    .collect()
            })
            .collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(vals: &[i64]) -> Segment {
        vals.iter().map(|&n| Scalar::from_int(n)).collect()
    }

    #[test]
    fn nilpotent_index_examples() {
        assert_eq!(nilpotent_index(&ints(&[0, 0])), 0);
        assert_eq!(nilpotent_index(&ints(&[0, 1])), 2);
        assert_eq!(nilpotent_index(&ints(&[1, 0])), 1);
    }

    #[test]
    fn nilpotent_index_drops_under_shift() {
        let segs = [ints(&[0, 3, 0, -2]), ints(&[5]), ints(&[0, 0, 0]), ints(&[1, 1])];
        for seg in &segs {
            let s = nilpotent_index(seg);
            assert_eq!(nilpotent_index(&shift_down(seg)), s.saturating_sub(1));
        }
    }

    #[test]
    fn block_norm_examples() {
        let zero = BlockVector { segments: vec![ints(&[0, 0])] };
        assert_eq!(block_norm(&zero), 0.0);
        // single block, segment (3, 4i): max(|3|, |4i|) = 4
        let v = BlockVector {
            segments: vec![vec![Scalar::from_int(3), Scalar::gaussian(0, 1, 4, 1)]],
        };
        assert_eq!(block_norm(&v), 4.0);
        // two blocks with segment norms 1 and 2 sum to 3
        let w = BlockVector { segments: vec![ints(&[1]), ints(&[2, 0])] };
        assert_eq!(block_norm(&w), 3.0);
    }

    #[test]
    fn apply_affine_examples() {
        // block (lambda = 2, size 1), c = (1), v = (1) -> (3)
        let sys = JordanSystem::diagonal(
            vec![Scalar::from_int(2)],
            vec![Scalar::from_int(1)],
            vec![Scalar::from_int(1)],
        )
        .unwrap();
        let out = apply_affine(&sys, &sys.x).unwrap();
        assert_eq!(out.segments[0], ints(&[3]));

        // block (lambda = i, size 2), v = (0,1), c = 0 -> (1, i)
        let sys = JordanSystem::new(
            vec![JordanBlock::new(Scalar::i(), 2)],
            BlockVector { segments: vec![ints(&[0, 0])] },
            BlockVector { segments: vec![ints(&[0, 1])] },
        )
        .unwrap();
        let out = apply_affine(&sys, &sys.x).unwrap();
        assert_eq!(out.segments[0], vec![Scalar::from_int(1), Scalar::i()]);

        // c = 0, v = 0 -> 0
        let z = apply_affine(&sys, &sys.zero_vector()).unwrap();
        assert!(z.is_zero());
    }

    #[test]
    fn shape_mismatch_is_reported() {
        let sys = JordanSystem::new(
            vec![JordanBlock::new(Scalar::i(), 2)],
            BlockVector { segments: vec![ints(&[0, 0])] },
            BlockVector { segments: vec![ints(&[0, 1])] },
        )
        .unwrap();
        let bad = BlockVector { segments: vec![ints(&[1])] };
        assert!(apply_affine(&sys, &bad).is_err());
        assert!(JordanSystem::new(
            vec![JordanBlock::new(Scalar::i(), 2)],
            BlockVector { segments: vec![ints(&[0])] },
            BlockVector { segments: vec![ints(&[0, 1])] },
        )
        .is_err());
    }
}
