//! Complex scalars: exact Gaussian rationals or a 64-bit float fallback.
//!
//! Exact mode is the default. Every identity check and every classification
//! predicate (`lambda == 1`, `|lambda| == 1`, "coefficient is zero") is only
//! authoritative in exact mode; float mode exists for long-horizon empirical
//! sweeps and uses tolerance-based predicates.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num::bigint::BigInt;
use num::complex::Complex64;
use num::rational::BigRational;
use num::traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Relative tolerance for float-mode zero/equality predicates.
pub const FLOAT_ZERO_TOL: f64 = 1e-12;

#[derive(Clone, Debug)]
pub enum Scalar {
    Exact { re: BigRational, im: BigRational },
    Float(Complex64),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Exact,
    Float,
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar::Exact {
            re: BigRational::zero(),
            im: BigRational::zero(),
        }
    }

    pub fn one() -> Self {
        Scalar::from_int(1)
    }

    /// The imaginary unit.
    pub fn i() -> Self {
        Scalar::Exact {
            re: BigRational::zero(),
            im: BigRational::one(),
        }
    }

    pub fn from_int(n: i64) -> Self {
        Scalar::Exact {
            re: BigRational::from_integer(BigInt::from(n)),
            im: BigRational::zero(),
        }
    }

    pub fn from_bigint(n: BigInt) -> Self {
        Scalar::Exact {
            re: BigRational::from_integer(n),
            im: BigRational::zero(),
        }
    }

    pub fn from_ratio(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        Scalar::Exact {
            re: BigRational::new(BigInt::from(num), BigInt::from(den)),
            im: BigRational::zero(),
        }
    }

    pub fn from_rational(re: BigRational) -> Self {
        Scalar::Exact {
            re,
            im: BigRational::zero(),
        }
    }

    pub fn exact(re: BigRational, im: BigRational) -> Self {
        Scalar::Exact { re, im }
    }

    /// Exact Gaussian rational from four integer parts: re = a/b, im = c/d.
    pub fn gaussian(a: i64, b: i64, c: i64, d: i64) -> Self {
        assert!(b != 0 && d != 0, "zero denominator");
        Scalar::Exact {
            re: BigRational::new(BigInt::from(a), BigInt::from(b)),
            im: BigRational::new(BigInt::from(c), BigInt::from(d)),
        }
    }

    pub fn float(re: f64, im: f64) -> Self {
        Scalar::Float(Complex64::new(re, im))
    }

    pub fn mode(&self) -> Mode {
        match self {
            Scalar::Exact { .. } => Mode::Exact,
            Scalar::Float(_) => Mode::Float,
        }
    }

    pub fn is_exact(&self) -> bool {
        self.mode() == Mode::Exact
    }

    pub fn to_complex64(&self) -> Complex64 {
        match self {
            Scalar::Exact { re, im } => Complex64::new(rational_to_f64(re), rational_to_f64(im)),
            Scalar::Float(z) => *z,
        }
    }

    /// Demote to float mode (identity on float scalars).
    pub fn to_float(&self) -> Scalar {
        Scalar::Float(self.to_complex64())
    }

    pub fn re_rational(&self) -> Option<&BigRational> {
        match self {
            Scalar::Exact { re, .. } => Some(re),
            Scalar::Float(_) => None,
        }
    }

    pub fn im_rational(&self) -> Option<&BigRational> {
        match self {
            Scalar::Exact { im, .. } => Some(im),
            Scalar::Float(_) => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Exact { re, im } => re.is_zero() && im.is_zero(),
            Scalar::Float(z) => z.re == 0.0 && z.im == 0.0,
        }
    }

    /// Zero test with the float-mode tolerance rule: a float coefficient is
    /// treated as zero when its modulus is below `FLOAT_ZERO_TOL * (1 + scale)`.
    /// Exact scalars are tested exactly regardless of `scale`.
    pub fn is_zero_tol(&self, scale: f64) -> bool {
        match self {
            Scalar::Exact { .. } => self.is_zero(),
            Scalar::Float(z) => z.norm() < FLOAT_ZERO_TOL * (1.0 + scale),
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Scalar::Exact { re, im } => re.is_one() && im.is_zero(),
            Scalar::Float(z) => {
                (z.re - 1.0).abs() < FLOAT_ZERO_TOL && z.im.abs() < FLOAT_ZERO_TOL
            }
        }
    }

    /// |z|^2, exactly rational in exact mode.
    pub fn modulus_sq(&self) -> BigRational {
        match self {
            Scalar::Exact { re, im } => re * re + im * im,
            Scalar::Float(_) => panic!("modulus_sq is exact-mode only; use modulus_sq_f64"),
        }
    }

    pub fn modulus_sq_f64(&self) -> f64 {
        match self {
            Scalar::Exact { re, im } => {
                let r = rational_to_f64(re);
                let i = rational_to_f64(im);
                r * r + i * i
            }
            Scalar::Float(z) => z.norm_sqr(),
        }
    }

    pub fn modulus(&self) -> f64 {
        self.modulus_sq_f64().sqrt()
    }

    /// Compare |z| against 1. Exact mode compares |z|^2 to 1 as rationals
    /// (no square roots); float mode uses a `FLOAT_ZERO_TOL` band around 1.
    pub fn unit_circle_class(&self) -> Ordering {
        match self {
            Scalar::Exact { .. } => {
                let one = BigRational::one();
                self.modulus_sq().cmp(&one)
            }
            Scalar::Float(z) => {
                let m2 = z.norm_sqr();
                if (m2 - 1.0).abs() < FLOAT_ZERO_TOL {
                    Ordering::Equal
                } else if m2 < 1.0 {
                    Ordering::Less
                } else {
                    Ordering::Greater
                }
            }
        }
    }

    pub fn conj(&self) -> Scalar {
        match self {
            Scalar::Exact { re, im } => Scalar::Exact {
                re: re.clone(),
                im: -im,
            },
            Scalar::Float(z) => Scalar::Float(z.conj()),
        }
    }

    pub fn checked_div(&self, rhs: &Scalar) -> Result<Scalar> {
        if rhs.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(match (self, rhs) {
            (Scalar::Exact { re: a, im: b }, Scalar::Exact { re: c, im: d }) => {
                let den = c * c + d * d;
                Scalar::Exact {
                    re: (a * c + b * d) / &den,
                    im: (b * c - a * d) / &den,
                }
            }
            _ => Scalar::Float(self.to_complex64() / rhs.to_complex64()),
        })
    }

    pub fn inv(&self) -> Result<Scalar> {
        Scalar::one().with_mode_of(self).checked_div(self)
    }

    /// Integer power. `0^0 = 1`; negative exponents invert (error on zero base).
    pub fn pow(&self, exp: i64) -> Result<Scalar> {
        if exp < 0 {
            let inv = self.inv()?;
            return inv.pow(-exp);
        }
        let mut result = Scalar::one().with_mode_of(self);
        let mut base = self.clone();
        let mut e = exp as u64;
        while e > 0 {
            if e & 1 == 1 {
                result = &result * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        Ok(result)
    }

    /// Rebuild this value in the mode of `other` (used to keep zero/one
    /// constants from silently promoting float computations to exact).
    pub fn with_mode_of(&self, other: &Scalar) -> Scalar {
        match (self, other) {
            (s, Scalar::Exact { .. }) if s.is_exact() => s.clone(),
            (s, Scalar::Float(_)) => s.to_float(),
            // float value required in exact context: keep as float; the
            // binary ops will demote the whole expression anyway.
            (s, _) => s.clone(),
        }
    }

    /// Approximate equality used by float-mode oracle comparisons.
    pub fn approx_eq(&self, other: &Scalar, tol: f64) -> bool {
        match (self, other) {
            (Scalar::Exact { .. }, Scalar::Exact { .. }) => self == other,
            _ => {
                let a = self.to_complex64();
                let b = other.to_complex64();
                (a - b).norm() <= tol * (1.0 + a.norm().max(b.norm()))
            }
        }
    }
}

fn rational_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        // Fall back to a sign-correct infinity for values outside f64 range.
        if r.is_negative() {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        }
    })
}

impl PartialEq for Scalar {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Scalar::Exact { re: a, im: b }, Scalar::Exact { re: c, im: d }) => a == c && b == d,
            (Scalar::Float(a), Scalar::Float(b)) => a == b,
            _ => false,
        }
    }
}

macro_rules! binop {
    ($trait:ident, $method:ident, |$a:ident, $b:ident, $c:ident, $d:ident| $exact:expr, |$x:ident, $y:ident| $float:expr) => {
        impl $trait<&Scalar> for &Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                match (self, rhs) {
                    (Scalar::Exact { re: $a, im: $b }, Scalar::Exact { re: $c, im: $d }) => $exact,
                    _ => {
                        let $x = self.to_complex64();
                        let $y = rhs.to_complex64();
                        Scalar::Float($float)
                    }
                }
            }
        }
        impl $trait<Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                $trait::$method(&self, &rhs)
            }
        }
        impl $trait<&Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                $trait::$method(&self, rhs)
            }
        }
    };
}

binop!(Add, add, |a, b, c, d| Scalar::Exact { re: a + c, im: b + d }, |x, y| x + y);
binop!(Sub, sub, |a, b, c, d| Scalar::Exact { re: a - c, im: b - d }, |x, y| x - y);
binop!(Mul, mul, |a, b, c, d| Scalar::Exact {
    re: a * c - b * d,
    im: a * d + b * c,
}, |x, y| x * y);

impl Div<&Scalar> for &Scalar {
    type Output = Scalar;
    /// Panics on division by zero; use `checked_div` on fallible paths.
    fn div(self, rhs: &Scalar) -> Scalar {
        self.checked_div(rhs).expect("scalar division by zero")
    }
}

impl Div<Scalar> for Scalar {
    type Output = Scalar;
    fn div(self, rhs: Scalar) -> Scalar {
        &self / &rhs
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Exact { re, im } => Scalar::Exact { re: -re, im: -im },
            Scalar::Float(z) => Scalar::Float(-z),
        }
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

/// Parse a rational literal: an integer ("7", "-3") or a fraction ("3/7").
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let err = |reason: &str| Error::Parse {
        literal: s.to_string(),
        reason: reason.to_string(),
    };
    if s.is_empty() {
        return Err(err("empty string"));
    }
    let (num_str, den_str) = match s.split_once('/') {
        Some((n, d)) => (n, d),
        None => (s, "1"),
    };
    let num: BigInt = num_str
        .trim()
        .parse()
        .map_err(|_| err("numerator is not an integer"))?;
    let den: BigInt = den_str
        .trim()
        .parse()
        .map_err(|_| err("denominator is not an integer"))?;
    if den.is_zero() {
        return Err(err("zero denominator"));
    }
    Ok(BigRational::new(num, den))
}

/// Render a rational as "p" or "p/q" (always in lowest terms).
pub fn rational_string(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Exact { re, im } => {
                if im.is_zero() {
                    write!(f, "{}", rational_string(re))
                } else if re.is_zero() {
                    write!(f, "{}i", rational_string(im))
                } else if im.is_negative() {
                    write!(f, "{}{}i", rational_string(re), rational_string(im))
                } else {
                    write!(f, "{}+{}i", rational_string(re), rational_string(im))
                }
            }
            Scalar::Float(z) => {
                if z.im == 0.0 {
                    write!(f, "{}", z.re)
                } else if z.im < 0.0 {
                    write!(f, "{}{}i", z.re, z.im)
                } else {
                    write!(f, "{}+{}i", z.re, z.im)
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_arithmetic_is_closed() {
        let a = Scalar::gaussian(1, 3, 2, 7);
        let b = Scalar::gaussian(-2, 5, 1, 1);
        let sum = &a + &b;
        let prod = &a * &b;
        assert!(sum.is_exact());
        assert!(prod.is_exact());
        // (a+b) - b == a exactly
        assert_eq!(&sum - &b, a);
        // (a*b) / b == a exactly
        assert_eq!(prod.checked_div(&b).unwrap(), a);
    }

    #[test]
    fn division_by_zero_is_an_error() {
        let a = Scalar::from_int(1);
        assert!(matches!(
            a.checked_div(&Scalar::zero()),
            Err(Error::DivisionByZero)
        ));
        assert!(matches!(Scalar::zero().pow(-1), Err(Error::DivisionByZero)));
    }

    #[test]
    fn modulus_sq_is_exact() {
        // |3/5 + (4/5)i|^2 == 1 exactly
        let z = Scalar::gaussian(3, 5, 4, 5);
        assert_eq!(z.modulus_sq(), BigRational::one());
        assert_eq!(z.unit_circle_class(), Ordering::Equal);
        assert_eq!(Scalar::from_ratio(1, 2).unit_circle_class(), Ordering::Less);
        assert_eq!(Scalar::from_int(2).unit_circle_class(), Ordering::Greater);
    }

    #[test]
    fn integer_powers() {
        let i = Scalar::i();
        assert_eq!(i.pow(4).unwrap(), Scalar::one());
        assert_eq!(i.pow(2).unwrap(), Scalar::from_int(-1));
        assert_eq!(Scalar::from_int(2).pow(-2).unwrap(), Scalar::from_ratio(1, 4));
        assert_eq!(Scalar::zero().pow(0).unwrap(), Scalar::one());
        assert_eq!(Scalar::zero().pow(5).unwrap(), Scalar::zero());
    }

    #[test]
    fn mixed_mode_demotes_to_float() {
        let e = Scalar::from_int(2);
        let f = Scalar::float(0.5, 0.0);
        assert_eq!((&e * &f).mode(), Mode::Float);
    }

    #[test]
    fn parse_and_render_rationals() {
        assert_eq!(rational_string(&parse_rational("3/7").unwrap()), "3/7");
        assert_eq!(rational_string(&parse_rational("-8/4").unwrap()), "-2");
        assert_eq!(rational_string(&parse_rational("5").unwrap()), "5");
        assert!(parse_rational("3/0").is_err());
        assert!(parse_rational("x").is_err());
        assert!(parse_rational("").is_err());
    }
}
