//! Polynomials in one discrete variable, monomial basis, normalized.
//!
//! The coefficient type is generic: plain scalars for combinatorial closed
//! forms, block segments (`Vec<Scalar>`) for vector-coefficient polynomials.
//! The zero polynomial has an empty coefficient list and degree `None`.

use crate::scalar::Scalar;

/// Coefficient ring operations needed by `KPoly`.
pub trait Coeff: Clone + PartialEq {
    fn zero_like(&self) -> Self;
    fn is_zero(&self) -> bool;
    fn add_ref(&self, other: &Self) -> Self;
    fn scale(&self, by: &Scalar) -> Self;
}

impl Coeff for Scalar {
    fn zero_like(&self) -> Self {
        Scalar::zero().with_mode_of(self)
    }
    fn is_zero(&self) -> bool {
        Scalar::is_zero(self)
    }
    fn add_ref(&self, other: &Self) -> Self {
        self + other
    }
    fn scale(&self, by: &Scalar) -> Self {
        self * by
    }
}

impl Coeff for Vec<Scalar> {
    fn zero_like(&self) -> Self {
        self.iter().map(|s| Scalar::zero().with_mode_of(s)).collect()
    }
    fn is_zero(&self) -> bool {
        self.iter().all(Scalar::is_zero)
    }
    fn add_ref(&self, other: &Self) -> Self {
        assert_eq!(self.len(), other.len(), "segment length mismatch");
        self.iter().zip(other).map(|(a, b)| a + b).collect()
    }
    fn scale(&self, by: &Scalar) -> Self {
        self.iter().map(|a| a * by).collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct KPoly<T> {
    coeffs: Vec<T>,
}

impl<T: Coeff> KPoly<T> {
    pub fn zero() -> Self {
        KPoly { coeffs: Vec::new() }
    }

    /// Build from coefficients indexed by power; trailing zeros are trimmed.
    pub fn from_coeffs(coeffs: Vec<T>) -> Self {
        let mut p = KPoly { coeffs };
        p.normalize();
        p
    }

    fn normalize(&mut self) {
        while self.coeffs.last().is_some_and(|c| c.is_zero()) {
            self.coeffs.pop();
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Highest power with a nonzero coefficient; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn coeff(&self, power: usize) -> Option<&T> {
        self.coeffs.get(power)
    }

    pub fn leading(&self) -> Option<&T> {
        self.coeffs.last()
    }

    pub fn add(&self, other: &Self) -> Self {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        let n = self.coeffs.len().max(other.coeffs.len());
        let zero = self.coeffs[0].zero_like();
        let mut coeffs = Vec::with_capacity(n);
        for p in 0..n {
            let a = self.coeffs.get(p).unwrap_or(&zero);
            let b = other.coeffs.get(p).unwrap_or(&zero);
            coeffs.push(a.add_ref(b));
        }
        KPoly::from_coeffs(coeffs)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&-Scalar::one()))
    }

    pub fn scale(&self, by: &Scalar) -> Self {
        KPoly::from_coeffs(self.coeffs.iter().map(|c| c.scale(by)).collect())
    }

    /// Horner evaluation. `zero` supplies the result shape for the zero
    /// polynomial (segment coefficients carry a length).
    pub fn eval_with(&self, at: &Scalar, zero: T) -> T {
        let mut acc = zero;
        for c in self.coeffs.iter().rev() {
            acc = acc.scale(at).add_ref(c);
        }
        acc
    }
}

impl KPoly<Scalar> {
    pub fn constant(c: Scalar) -> Self {
        KPoly::from_coeffs(vec![c])
    }

    pub fn one() -> Self {
        KPoly::constant(Scalar::one())
    }

    /// The monomial `x`.
    pub fn variable() -> Self {
        KPoly::from_coeffs(vec![Scalar::zero(), Scalar::one()])
    }

    pub fn eval(&self, at: &Scalar) -> Scalar {
        self.eval_with(at, Scalar::zero().with_mode_of(at))
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return KPoly::zero();
        }
        let mut coeffs = vec![Scalar::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] = &coeffs[i + j] + &(a * b);
            }
        }
        KPoly::from_coeffs(coeffs)
    }

    /// Multiply by the monomial `x^p`.
    pub fn shift_up(&self, p: usize) -> Self {
        if self.is_zero() {
            return KPoly::zero();
        }
        let mut coeffs = vec![Scalar::zero(); p];
        coeffs.extend(self.coeffs.iter().cloned());
        KPoly::from_coeffs(coeffs)
    }

    /// Formal derivative with respect to the variable.
    pub fn derivative(&self) -> Self {
        if self.coeffs.len() <= 1 {
            return KPoly::zero();
        }
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(p, c)| c * &Scalar::from_int(p as i64))
            .collect();
        KPoly::from_coeffs(coeffs)
    }

    /// Scalar polynomial times a constant segment: a segment-coefficient
    /// polynomial with coefficient `c_p * seg` at each power.
    pub fn tensor_segment(&self, seg: &[Scalar]) -> KPoly<Vec<Scalar>> {
        KPoly::from_coeffs(
            self.coeffs
                .iter()
                .map(|c| seg.iter().map(|s| s * c).collect())
                .collect(),
        )
    }
}
