//! Binomial sums and the combinatorial identities behind the closed forms.
//!
//! Closed forms for the geometric-binomial sums S(j,k) and T_j are always
//! cross-checked against their defining sums in exact mode; a mismatch is an
//! internal identity violation, not a user error.
//!
//! Conventions: C(k,0) = 1 for k >= 0, C(k,j) = 0 if k < j, and C(n,x) = 0
//! for x < 0. An empty sum is 0.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::traits::{One, Zero};

use crate::error::{Error, Result};
use crate::kpoly::KPoly;
use crate::scalar::Scalar;

/// Below this distance from lambda = 1, float mode falls back to direct
/// summation: the (1-lambda) powers in the closed forms cancel catastrophically.
pub const FLOAT_NEAR_ONE: f64 = 1e-6;

/// Binomial coefficient with the totalizing conventions above.
pub fn binom(k: i64, j: i64) -> BigInt {
    if j < 0 || k < j {
        return BigInt::zero();
    }
    // k >= j >= 0 here
    let j = j.min(k - j);
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for r in 0..j {
        num *= BigInt::from(k - r);
        den *= BigInt::from(r + 1);
    }
    num / den
}

pub fn binom_scalar(k: i64, j: i64) -> Scalar {
    Scalar::from_bigint(binom(k, j))
}

pub fn factorial(n: u64) -> BigInt {
    let mut acc = BigInt::one();
    for r in 2..=n {
        acc *= BigInt::from(r);
    }
    acc
}

/// C(k, j) as a polynomial in the symbolic variable k: the falling factorial
/// k(k-1)...(k-j+1)/j!, expanded into the monomial basis. Degree j.
pub fn binom_symbolic(j: i64) -> KPoly<Scalar> {
    binom_symbolic_shifted(0, j)
}

/// C(k + a, j) as a polynomial in k.
pub fn binom_symbolic_shifted(a: i64, j: i64) -> KPoly<Scalar> {
    if j < 0 {
        return KPoly::zero();
    }
    let mut p = KPoly::one();
    for r in 0..j {
        // factor (k + a - r)
        let factor = KPoly::from_coeffs(vec![Scalar::from_int(a - r), Scalar::one()]);
        p = p.mul(&factor);
    }
    p.scale(&Scalar::from_bigint(factorial(j as u64)).inv().expect("factorial is nonzero"))
}

/// S(j,k) = C(j,j) + C(j+1,j) lambda + ... + C(k-1,j) lambda^{k-1-j},
/// straight from the definition.
pub fn s_sum_direct(j: i64, k: i64, lambda: &Scalar) -> Scalar {
    let mut acc = Scalar::zero().with_mode_of(lambda);
    let mut lpow = Scalar::one().with_mode_of(lambda);
    for i in j..k {
        acc = &acc + &(&binom_scalar(i, j) * &lpow);
        lpow = &lpow * lambda;
    }
    acc
}

/// S(j,k) by closed form: C(k,j+1) for lambda = 1, otherwise the alternate
/// formula; verified against the direct sum in exact mode.
pub fn s_sum(j: i64, k: i64, lambda: &Scalar) -> Result<Scalar> {
    if !(0 <= j && j < k) {
        return Err(Error::domain("s_sum", format!("need k > j >= 0, got j={j}, k={k}")));
    }
    if lambda.is_one() {
        return Ok(binom_scalar(k, j + 1).with_mode_of(lambda));
    }
    let one = Scalar::one().with_mode_of(lambda);
    let one_minus = &one - lambda;
    if !lambda.is_exact() && one_minus.modulus() < FLOAT_NEAR_ONE {
        return Ok(s_sum_direct(j, k, lambda));
    }
    // (1 - lambda^k)/(1-lambda)^{j+1} - sum_{i=0}^{j-1} C(k,i+1) lambda^{k-i-1}/(1-lambda)^{j-i}
    let mut s = (&one - &lambda.pow(k)?) / one_minus.pow(j + 1)?;
    for i in 0..j {
        let term = &(&binom_scalar(k, i + 1) * &lambda.pow(k - i - 1)?) / &one_minus.pow(j - i)?;
        s = &s - &term;
    }
    if lambda.is_exact() {
        let direct = s_sum_direct(j, k, lambda);
        if s != direct {
            return Err(Error::identity(
                "s_sum",
                format!("closed form {s} != direct sum {direct} at j={j}, k={k}, lambda={lambda}"),
            ));
        }
    }
    Ok(s)
}

/// T_j = sum_{i=j}^{k-2} (k-i-1) C(i,j) lambda^{i-j}, from the definition.
pub fn t_sum_direct(j: i64, k: i64, lambda: &Scalar) -> Scalar {
    let mut acc = Scalar::zero().with_mode_of(lambda);
    let mut lpow = Scalar::one().with_mode_of(lambda);
    for i in j..=(k - 2) {
        let coeff = &Scalar::from_int(k - i - 1) * &binom_scalar(i, j);
        acc = &acc + &(&coeff * &lpow);
        lpow = &lpow * lambda;
    }
    acc
}

/// T_j by the closed form
/// k/(1-lambda)^{j+1} - (j+1)/(1-lambda)^{j+2} + C(k,j) lambda^{k-j} D(k,j,lambda)/(1-lambda)^2,
/// verified against the direct sum in exact mode. Rejects lambda = 1: the
/// lambda = 1 value is the plain binomial C(k, j+2).
pub fn t_sum(j: i64, k: i64, lambda: &Scalar) -> Result<Scalar> {
    if lambda.is_one() {
        return Err(Error::InvalidLambda {
            op: "t_sum",
            lambda: lambda.to_string(),
        });
    }
    if !(j >= 0 && k >= j + 2) {
        return Err(Error::domain("t_sum", format!("need k >= j+2, j >= 0; got j={j}, k={k}")));
    }
    let one = Scalar::one().with_mode_of(lambda);
    let one_minus = &one - lambda;
    if !lambda.is_exact() && one_minus.modulus() < FLOAT_NEAR_ONE {
        return Ok(t_sum_direct(j, k, lambda));
    }
    let head = &(&Scalar::from_int(k) / &one_minus.pow(j + 1)?)
        - &(&Scalar::from_int(j + 1) / &one_minus.pow(j + 2)?);
    let tail = &(&(&binom_scalar(k, j) * &lambda.pow(k - j)?) * &d_factor(k, j, lambda)?)
        / &one_minus.pow(2)?;
    let t = &head + &tail;
    if lambda.is_exact() {
        let direct = t_sum_direct(j, k, lambda);
        if t != direct {
            return Err(Error::identity(
                "t_sum",
                format!("closed form {t} != direct sum {direct} at j={j}, k={k}, lambda={lambda}"),
            ));
        }
    }
    Ok(t)
}

/// D(k,j,lambda) = (1-lambda)^{-j} [B_0 lambda^j + ... + B_{j-1} lambda + 1]
/// with B_i(k,j) = (-1)^{j-i} C(j,i) C(k-j,2)/C(k-i,2). Tends to 1 as k grows.
pub fn d_factor(k: i64, j: i64, lambda: &Scalar) -> Result<Scalar> {
    if lambda.is_one() {
        return Err(Error::InvalidLambda {
            op: "d_factor",
            lambda: lambda.to_string(),
        });
    }
    if !(j >= 0 && k >= j + 2) {
        return Err(Error::domain(
            "d_factor",
            format!("need k >= j+2 so C(k-i,2) stays nonzero; got j={j}, k={k}"),
        ));
    }
    let ckj2 = binom(k - j, 2);
    let mut bracket = Scalar::zero().with_mode_of(lambda);
    for i in 0..=j {
        let sign = if (j - i) % 2 == 0 { 1 } else { -1 };
        let b = Scalar::from_bigint(BigInt::from(sign) * binom(j, i) * &ckj2)
            .checked_div(&Scalar::from_bigint(binom(k - i, 2)))?;
        bracket = &bracket + &(&b.with_mode_of(lambda) * &lambda.pow(j - i)?);
    }
    let one_minus = &Scalar::one().with_mode_of(lambda) - lambda;
    Ok(&bracket / &one_minus.pow(j)?)
}

/// C(k,j) C(j,i) C(k-j,2)/C(k-i,2) == C(k,i) C(k-i-2,j-i), checked exactly
/// (cross-multiplied to stay in the integers).
pub fn binom_product_identity(k: i64, i: i64, j: i64) -> bool {
    let lhs = binom(k, j) * binom(j, i) * binom(k - j, 2);
    let rhs = binom(k, i) * binom(k - i - 2, j - i) * binom(k - i, 2);
    lhs == rhs
}

/// A(k,j) = sum_{i=0}^{j} (-1)^{j-i} C(k,i) C(k-i-2,j-i) lambda^{j-i},
/// the bracket of the T_j closed form, as a polynomial in lambda.
fn a_poly(k: i64, j: i64) -> KPoly<Scalar> {
    let mut coeffs = vec![Scalar::zero(); (j + 1) as usize];
    for i in 0..=j {
        let sign = if (j - i) % 2 == 0 { 1 } else { -1 };
        coeffs[(j - i) as usize] =
            Scalar::from_bigint(BigInt::from(sign) * binom(k, i) * binom(k - i - 2, j - i));
    }
    KPoly::from_coeffs(coeffs)
}

/// Checks the derivative route T_{j+1} = (1/(j+1)) dT_j/dlambda, where the
/// derivative is taken symbolically on the polynomial-in-lambda form of the
/// closed formula, plus the two supporting identities: the lambda-polynomial
/// identity [(1-l)(k-j) + (j+2)l] A + (1-l) l A' = (j+1) A_{j+1}, and the
/// coefficient identity
/// (k-i+1)C(k,i-1)C(k-i-1,j-i+1) + (k-i-j-2)C(k,i)C(k-i-2,j-i)
///   = (j+1)C(k,i)C(k-i-2,j-i+1).
pub fn tj_recurrence_check(j: i64, lambda: &Scalar, k: i64) -> bool {
    assert!(j >= 0 && k >= j + 3, "tj_recurrence_check needs k >= j+3");
    assert!(
        lambda.is_exact() && !lambda.is_zero() && !lambda.is_one(),
        "tj_recurrence_check is an exact-mode check with lambda != 0, 1"
    );

    // T_j = f(lambda)/(1-lambda)^{j+2} with f = k(1-lambda) - (j+1) + lambda^{k-j} A.
    let a = a_poly(k, j);
    let f = KPoly::from_coeffs(vec![Scalar::from_int(k - j - 1), Scalar::from_int(-k)])
        .add(&a.shift_up((k - j) as usize));
    // dT_j/dlambda = [f'(1-lambda) + (j+2) f]/(1-lambda)^{j+3}
    let one_minus_poly = KPoly::from_coeffs(vec![Scalar::one(), Scalar::from_int(-1)]);
    let numerator = f
        .derivative()
        .mul(&one_minus_poly)
        .add(&f.scale(&Scalar::from_int(j + 2)));
    let one_minus = &Scalar::one() - lambda;
    let derivative_at = match one_minus.pow(j + 3).and_then(|d| numerator.eval(lambda).checked_div(&d)) {
        Ok(v) => v,
        Err(_) => return false,
    };
    let lhs = t_sum_direct(j + 1, k, lambda);
    let rhs = &derivative_at / &Scalar::from_int(j + 1);
    if lhs != rhs {
        return false;
    }

    // [(1-l)(k-j) + (j+2)l] A + (1-l) l A' == (j+1) A_{j+1}, as polynomials.
    let bracket = KPoly::from_coeffs(vec![Scalar::from_int(k - j), Scalar::from_int(j + 2 - k + j)]);
    let l_times_one_minus = KPoly::from_coeffs(vec![Scalar::zero(), Scalar::one(), Scalar::from_int(-1)]);
    let deriv_side = bracket.mul(&a).add(&l_times_one_minus.mul(&a.derivative()));
    if deriv_side != a_poly(k, j + 1).scale(&Scalar::from_int(j + 1)) {
        return false;
    }

    // Coefficient identity, over the full i range (conventions cover the edges).
    for i in 0..=(j + 1) {
        let lhs = BigInt::from(k - i + 1) * binom(k, i - 1) * binom(k - i - 1, j - i + 1)
            + BigInt::from(k - i - j - 2) * binom(k, i) * binom(k - i - 2, j - i);
        let rhs = BigInt::from(j + 1) * binom(k, i) * binom(k - i - 2, j - i + 1);
        if lhs != rhs {
            return false;
        }
    }
    true
}

/// Forward-difference coefficients d_0..d_l of f given by its values at
/// 1, 2, ..., l+1: d_i = (1/i!) sum_p (-1)^p C(i,p) f(i+1-p).
pub fn newton_coeffs(values: &[Scalar]) -> Vec<Scalar> {
    assert!(!values.is_empty(), "newton_coeffs needs at least one sample");
    (0..values.len() as i64)
        .map(|i| {
            let mut acc = Scalar::zero().with_mode_of(&values[0]);
            for p in 0..=i {
                let sign = if p % 2 == 0 { 1 } else { -1 };
                let coeff = Scalar::from_bigint(BigInt::from(sign) * binom(i, p));
                acc = &acc + &(&coeff * &values[(i - p) as usize]);
            }
            &acc / &Scalar::from_bigint(factorial(i as u64))
        })
        .collect()
}

/// Evaluate sum_p d_p x_p at x, with the shifted falling-factorial basis
/// x_0 = 1, x_1 = x-1, x_2 = (x-2)(x-1), ..., x_p = (x-p)...(x-1).
pub fn newton_reconstruct(coeffs: &[Scalar], x: i64) -> Scalar {
    let mut acc = Scalar::zero();
    let mut basis = Scalar::one();
    for (p, d) in coeffs.iter().enumerate() {
        if p > 0 {
            basis = &basis * &Scalar::from_int(x - p as i64);
        }
        acc = &acc + &(d * &basis);
    }
    acc
}

/// The alternating-sum identity f(n+1) - C(n,1) f(n) + C(n,2) f(n-1) + ...
/// + (-1)^n f(1), which vanishes for every n larger than the degree.
pub fn newton_vanishing_sum(coeffs: &[Scalar], n: i64) -> Scalar {
    let mut acc = Scalar::zero();
    for p in 0..=n {
        let sign = if p % 2 == 0 { 1 } else { -1 };
        let term = &Scalar::from_bigint(BigInt::from(sign) * binom(n, p))
            * &newton_reconstruct(coeffs, n + 1 - p);
        acc = &acc + &term;
    }
    acc
}

pub fn newton_vanishing_check(coeffs: &[Scalar], n: i64) -> bool {
    assert!(n >= coeffs.len() as i64, "vanishing identity needs n > degree");
    newton_vanishing_sum(coeffs, n).is_zero()
}

/// P(i,j,m): the i-th coefficient of (j-i)^{m-1} over the shifted
/// falling-factorial basis; 0 for i < 0 and i >= m by convention.
pub fn p_coeff(i: i64, j: i64, m: i64) -> BigRational {
    assert!(m >= 1, "p_coeff needs m >= 1");
    if i < 0 || i >= m {
        return BigRational::zero();
    }
    let mut acc = BigInt::zero();
    for p in 0..=i {
        let sign = if p % 2 == 0 { 1 } else { -1 };
        let base = BigInt::from(j - i - 1 + p);
        acc += BigInt::from(sign) * binom(i, p) * base.pow((m - 1) as u32);
    }
    BigRational::new(acc, factorial(i as u64))
}

/// Cross-check of the recursion P(i,j,m) = (j-i-1) P(i,j,m-1) - P(i-1,j,m-1).
pub fn p_coeff_recurrence_holds(i: i64, j: i64, m: i64) -> bool {
    assert!(m >= 2);
    let expected = BigRational::from_integer(BigInt::from(j - i - 1)) * p_coeff(i, j, m - 1)
        - p_coeff(i - 1, j, m - 1);
    p_coeff(i, j, m) == expected
}

/// M(m,j,x) = sum_{i=1}^m (-1)^{i+1} (i+1)! P(i-1,j,m) C(j,i) x^i as an exact
/// polynomial in x.
pub fn m_poly(m: i64, j: i64) -> KPoly<Scalar> {
    assert!(m >= 1 && j >= 0, "m_poly needs m >= 1, j >= 0");
    let mut coeffs = vec![Scalar::zero(); (m + 1) as usize];
    for i in 1..=m {
        let sign = if (i + 1) % 2 == 0 { 1 } else { -1 };
        let c = BigRational::from_integer(BigInt::from(sign) * factorial((i + 1) as u64) * binom(j, i))
            * p_coeff(i - 1, j, m);
        coeffs[i as usize] = Scalar::from_rational(c);
    }
    KPoly::from_coeffs(coeffs)
}

/// L(m,j,lambda) = M(m,j, lambda/(1-lambda)): the 1/k^m coefficient in the
/// large-k expansion of D(k,j,lambda) - 1.
pub fn l_coeff(m: i64, j: i64, lambda: &Scalar) -> Result<Scalar> {
    if lambda.is_one() {
        return Err(Error::InvalidLambda {
            op: "l_coeff",
            lambda: lambda.to_string(),
        });
    }
    let x = lambda.checked_div(&(&Scalar::one().with_mode_of(lambda) - lambda))?;
    Ok(m_poly(m, j).eval(&x))
}

/// Elementary symmetric polynomial e_deg evaluated at `vals`.
pub fn elementary_symmetric(vals: &[Scalar], deg: usize) -> Scalar {
    if deg == 0 {
        return Scalar::one();
    }
    if deg > vals.len() {
        return Scalar::zero();
    }
    // dp[d] = e_d of the prefix processed so far
    let mut dp = vec![Scalar::zero(); deg + 1];
    dp[0] = Scalar::one();
    for v in vals {
        for d in (1..=deg).rev() {
            dp[d] = &dp[d] + &(&dp[d - 1] * v);
        }
    }
    dp[deg].clone()
}

/// Complete homogeneous symmetric polynomial h_deg evaluated at `vals`.
pub fn complete_homogeneous(vals: &[Scalar], deg: usize) -> Scalar {
    if deg == 0 {
        return Scalar::one();
    }
    if vals.is_empty() {
        return Scalar::zero();
    }
    // dp[d] = h_d of the prefix processed so far; adding a variable v:
    // h_d(new) = h_d(old) + v * h_{d-1}(new)
    let mut dp = vec![Scalar::zero(); deg + 1];
    dp[0] = Scalar::one();
    for v in vals {
        for d in 1..=deg {
            let carry = &dp[d - 1] * v;
            dp[d] = &dp[d] + &carry;
        }
    }
    dp[deg].clone()
}

/// The cancellation identity for M: M(m,j,x) - H_1 M(m-1,j,x) + ...
/// + (-1)^{m-1} H_{m-1} M(1,j,x) == j_0 j_1 ... j_{m-1} (m+1) x^m,
/// where j_i = j - i and H_i is the i-th elementary symmetric function of
/// j_1, ..., j_{m-1}. Exact polynomial comparison.
pub fn m_cancellation_check(m: i64, j: i64) -> bool {
    assert!(m >= 1 && j >= m, "m_cancellation_check needs m >= 1, j >= m");
    let js: Vec<Scalar> = (1..m).map(|i| Scalar::from_int(j - i)).collect();
    let mut lhs = KPoly::zero();
    for i in 0..m {
        // (-1)^i H_i * M(m-i, j, x)
        let h = elementary_symmetric(&js, i as usize);
        let sign = if i % 2 == 0 { Scalar::one() } else { -Scalar::one() };
        lhs = lhs.add(&m_poly(m - i, j).scale(&(&sign * &h)));
    }
    let mut lead = Scalar::from_int(m + 1);
    for i in 0..m {
        lead = &lead * &Scalar::from_int(j - i);
    }
    let mut rhs_coeffs = vec![Scalar::zero(); (m + 1) as usize];
    rhs_coeffs[m as usize] = lead;
    lhs == KPoly::from_coeffs(rhs_coeffs)
}

/// sum_{i=0}^q (-1)^i R(p+i, q-i) S(p+i-1, i) == 0, where R(k,j) is the
/// complete homogeneous and S(k,j) the elementary symmetric sum of degree j
/// in m_1..m_k, evaluated under `assignment`.
pub fn rs_identity_check(p: usize, q: usize, assignment: &[Scalar]) -> bool {
    assert!(p >= 1 && q >= 1, "rs_identity_check needs p, q >= 1");
    assert!(
        assignment.len() >= p + q,
        "assignment must supply m_1..m_{}",
        p + q
    );
    let mut acc = Scalar::zero();
    for i in 0..=q {
        let r = complete_homogeneous(&assignment[..p + i], q - i);
        let s = elementary_symmetric(&assignment[..p + i - 1], i);
        let sign = if i % 2 == 0 { Scalar::one() } else { -Scalar::one() };
        acc = &acc + &(&(&sign * &r) * &s);
    }
    acc.is_zero()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binom_conventions() {
        assert_eq!(binom(5, 2), BigInt::from(10));
        assert_eq!(binom(3, 5), BigInt::zero());
        assert_eq!(binom(4, 0), BigInt::one());
        assert_eq!(binom(6, -1), BigInt::zero());
        assert_eq!(binom(-2, 3), BigInt::zero());
    }

    #[test]
    fn symbolic_binom_matches_concrete() {
        // C(k,1) is the polynomial k
        assert_eq!(binom_symbolic(1), KPoly::from_coeffs(vec![Scalar::zero(), Scalar::one()]));
        for j in 0..=6i64 {
            let p = binom_symbolic(j);
            assert_eq!(p.degree(), Some(j as usize));
            for k in j..=j + 20 {
                assert_eq!(p.eval(&Scalar::from_int(k)), binom_scalar(k, j));
            }
        }
        // shifted variant: C(k-3, 2) at k = 9 is C(6,2) = 15
        assert_eq!(
            binom_symbolic_shifted(-3, 2).eval(&Scalar::from_int(9)),
            Scalar::from_int(15)
        );
    }

    #[test]
    fn s_sum_examples() {
        // lambda = 1: S(j,k) = C(k,j+1)
        assert_eq!(s_sum(1, 5, &Scalar::one()).unwrap(), Scalar::from_int(10));
        // direct sums: 1 + 2 + 4 = 7, C(1,1)+3C(2,1)+9C(3,1) = 34
        assert_eq!(s_sum(0, 3, &Scalar::from_int(2)).unwrap(), Scalar::from_int(7));
        assert_eq!(s_sum(1, 4, &Scalar::from_int(3)).unwrap(), Scalar::from_int(34));
        assert!(s_sum(3, 3, &Scalar::one()).is_err());
    }

    #[test]
    fn t_sum_examples() {
        // direct: 3 + 2*2 + 1*4 = 11 and 2*1*1 + 1*2*2 = 6
        assert_eq!(t_sum(0, 4, &Scalar::from_int(2)).unwrap(), Scalar::from_int(11));
        assert_eq!(t_sum(1, 4, &Scalar::from_int(2)).unwrap(), Scalar::from_int(6));
        assert!(t_sum(0, 4, &Scalar::one()).is_err());
        assert!(t_sum(2, 3, &Scalar::from_int(2)).is_err());
    }

    #[test]
    fn t0_closed_form_shape() {
        // T_0 = k/(1-lambda) - (1-lambda^k)/(1-lambda)^2
        for &(num, den) in &[(2, 1), (3, 1), (1, 2), (-1, 1)] {
            let lambda = Scalar::from_ratio(num, den);
            for k in 2..=12i64 {
                let one_minus = &Scalar::one() - &lambda;
                let expected = &(&Scalar::from_int(k) / &one_minus)
                    - &(&(&Scalar::one() - &lambda.pow(k).unwrap()) / &one_minus.pow(2).unwrap());
                assert_eq!(t_sum(0, k, &lambda).unwrap(), expected);
            }
        }
    }

    #[test]
    fn d_factor_values() {
        let lambda = Scalar::from_int(5);
        // D(k,0,lambda) = 1 for any valid k
        for k in 2..10 {
            assert_eq!(d_factor(k, 0, &lambda).unwrap(), Scalar::one());
        }
        // D(4,1,2) = 0: bracket (-1/2)*2 + 1 = 0
        assert!(d_factor(4, 1, &Scalar::from_int(2)).unwrap().is_zero());
        // D(10^4, 2, 1/2) within 10^-3 of 1
        let d = d_factor(10_000, 2, &Scalar::from_ratio(1, 2)).unwrap();
        let dev = &d - &Scalar::one();
        assert!(dev.modulus_sq() < BigRational::new(BigInt::one(), BigInt::from(1_000_000)));
        assert!(d_factor(3, 2, &lambda).is_err());
    }

    #[test]
    fn product_identity_spot_checks() {
        // k=6, j=3, i=1: both sides 18
        assert!(binom_product_identity(6, 1, 3));
        assert_eq!(binom(6, 1) * binom(6 - 1 - 2, 3 - 1), BigInt::from(18));
        assert!(binom_product_identity(5, 0, 0));
    }

    #[test]
    fn tj_recurrence_spot_checks() {
        assert!(tj_recurrence_check(0, &Scalar::from_int(2), 5));
        assert!(tj_recurrence_check(1, &Scalar::from_int(3), 6));
        assert!(tj_recurrence_check(0, &Scalar::from_ratio(1, 2), 4));
        let unit = Scalar::gaussian(3, 5, 4, 5);
        assert!(tj_recurrence_check(2, &unit, 9));
    }

    #[test]
    fn newton_square_example() {
        // f(x) = x^2 sampled at 1, 2, 3 gives d = (1, 3, 1)
        let values = vec![Scalar::from_int(1), Scalar::from_int(4), Scalar::from_int(9)];
        let d = newton_coeffs(&values);
        assert_eq!(d, vec![Scalar::from_int(1), Scalar::from_int(3), Scalar::from_int(1)]);
        for x in 1..=3 {
            assert_eq!(newton_reconstruct(&d, x), Scalar::from_int(x * x));
        }
        // constant f: all higher coefficients vanish
        let dc = newton_coeffs(&[Scalar::from_int(7), Scalar::from_int(7), Scalar::from_int(7)]);
        assert_eq!(dc, vec![Scalar::from_int(7), Scalar::zero(), Scalar::zero()]);
        // vanishing identity at n = 3 > degree
        assert!(newton_vanishing_check(&d, 3));
    }

    #[test]
    fn p_and_m_values() {
        // P(m-1,j,m) = (-1)^{m-1}
        for m in 1..=6i64 {
            for j in 0..=8 {
                let expect = if (m - 1) % 2 == 0 {
                    BigRational::one()
                } else {
                    -BigRational::one()
                };
                assert_eq!(p_coeff(m - 1, j, m), expect);
                assert!(p_coeff(-1, j, m).is_zero());
                assert!(p_coeff(m, j, m).is_zero());
            }
        }
        // M(1,j,x) = 2jx
        for j in 0..=8i64 {
            let expected = KPoly::from_coeffs(vec![Scalar::zero(), Scalar::from_int(2 * j)]);
            assert_eq!(m_poly(1, j), expected);
        }
        // M(2,j,x) = j(j-1)(3x^2 + 2x)
        for j in 0..=8i64 {
            let jj = Scalar::from_int(j * (j - 1));
            let expected = KPoly::from_coeffs(vec![
                Scalar::zero(),
                &Scalar::from_int(2) * &jj,
                &Scalar::from_int(3) * &jj,
            ]);
            assert_eq!(m_poly(2, j), expected);
        }
    }

    #[test]
    fn p_recurrence_cross_check() {
        for m in 2..=5i64 {
            for j in 0..=8 {
                for i in 0..m {
                    assert!(p_coeff_recurrence_holds(i, j, m), "P recursion at i={i}, j={j}, m={m}");
                }
            }
        }
    }

    #[test]
    fn m_cancellation_spot_checks() {
        assert!(m_cancellation_check(1, 2));
        assert!(m_cancellation_check(2, 5));
        assert!(m_cancellation_check(3, 4));
    }

    #[test]
    fn rs_identity_small_cases() {
        // p = q = 1: R(1,1)S(0,0) - R(2,0)S(1,1) = m1 - m1 = 0
        let m = vec![Scalar::from_ratio(3, 7), Scalar::from_int(2), Scalar::from_int(-1)];
        assert!(rs_identity_check(1, 1, &m));
        let m4 = vec![
            Scalar::from_ratio(1, 2),
            Scalar::from_int(3),
            Scalar::from_ratio(-2, 5),
            Scalar::from_int(1),
        ];
        assert!(rs_identity_check(2, 2, &m4));
    }

    #[test]
    fn symmetric_function_helpers() {
        let vals = vec![Scalar::from_int(1), Scalar::from_int(2), Scalar::from_int(3)];
        assert_eq!(elementary_symmetric(&vals, 2), Scalar::from_int(11)); // 2+3+6
        assert_eq!(complete_homogeneous(&vals, 2), Scalar::from_int(25)); // 1+4+9+2+3+6
        assert_eq!(elementary_symmetric(&vals, 4), Scalar::zero());
        assert_eq!(elementary_symmetric(&vals, 0), Scalar::one());
        assert_eq!(complete_homogeneous(&[], 3), Scalar::zero());
    }
}
