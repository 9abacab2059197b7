//! Exact scalar arithmetic and the combinatorial kernels shared by every
//! other module: Pochhammer symbols, binomials, gamma ratios with integer
//! offsets, alternating power sums, ordinary Bell sums and the coefficients
//! of the Laguerre polynomials of index one.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::{Error, Result};

/// Arbitrary-precision rational, always in lowest terms with a positive
/// denominator.
pub type Rational = num_rational::BigRational;

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// `num/den`, reduced. Panics if `den == 0`.
pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn half() -> Rational {
    rat(1, 2)
}

/// Integer power with a possibly negative exponent. Panics on `0^negative`.
pub fn powi(base: &Rational, exp: i64) -> Rational {
    let mut acc = Rational::one();
    let mut b = if exp < 0 { base.recip() } else { base.clone() };
    let mut e = exp.unsigned_abs();
    while e > 0 {
        if e & 1 == 1 {
            acc *= &b;
        }
        e >>= 1;
        if e > 0 {
            b = &b * &b;
        }
    }
    acc
}

/// `(-1)^k` as a rational.
pub fn sign(k: i64) -> Rational {
    if k.is_even() {
        Rational::one()
    } else {
        -Rational::one()
    }
}

pub fn factorial(n: u64) -> Rational {
    let mut acc = BigInt::one();
    for i in 2..=n {
        acc *= i;
    }
    Rational::from_integer(acc)
}

/// Returns the integer value of `r` when it is an integer.
pub fn as_integer(r: &Rational) -> Option<BigInt> {
    r.is_integer().then(|| r.to_integer())
}

/// True when `r` is an integer `<= 0`.
pub fn is_nonpositive_integer(r: &Rational) -> bool {
    r.is_integer() && !r.is_positive()
}

/// Rising factorial `a (a+1) ... (a+n-1)`; the empty product is 1.
pub fn pochhammer(a: &Rational, n: usize) -> Rational {
    let mut acc = Rational::one();
    let mut x = a.clone();
    for _ in 0..n {
        if x.is_zero() {
            return Rational::zero();
        }
        acc *= &x;
        x += BigInt::one();
    }
    acc
}

/// `C(n, k)` for integer `n >= 0`; zero when `k` is out of `0..=n`.
pub fn binomial(n: i64, k: i64) -> Result<Rational> {
    if n < 0 {
        return Err(Error::NegativeBinomial(n));
    }
    if k < 0 || k > n {
        return Ok(Rational::zero());
    }
    Ok(Rational::from_integer(num_integer::binomial(
        BigInt::from(n),
        BigInt::from(k),
    )))
}

/// Infallible `C(n, k)` for the many call sites where `n` is a count.
pub fn choose(n: usize, k: usize) -> Rational {
    if k > n {
        return Rational::zero();
    }
    Rational::from_integer(num_integer::binomial(BigInt::from(n), BigInt::from(k)))
}

/// `Gamma(a + offset) / Gamma(a)` for an integer offset.
///
/// Follows the reciprocal-gamma convention `1/Gamma(z) = 0` at the
/// nonpositive integers: a pole in the denominator alone gives an exact zero,
/// a pole in the numerator alone is an error, and when both arguments are
/// poles the ratio of residues is returned, which is what the Pochhammer
/// product yields.
pub fn gamma_ratio(a: &Rational, offset: i64) -> Result<Rational> {
    if offset >= 0 {
        return Ok(pochhammer(a, offset as usize));
    }
    let steps = offset.unsigned_abs() as usize;
    let lower = a + Rational::from_integer(BigInt::from(offset));
    let denom = pochhammer(&lower, steps);
    if denom.is_zero() {
        return Err(Error::Pole(format!("Gamma({lower}) over Gamma({a})")));
    }
    Ok(denom.recip())
}

/// `sum_{j=0}^{b} (-1)^j j^a C(b, j)` with `0^0 = 1`.
///
/// Vanishes for `a < b` and equals `(-1)^a a!` for `a = b`.
pub fn alternating_power_sum(a: u32, b: u32) -> Rational {
    let mut acc = BigInt::zero();
    let mut binom = BigInt::one();
    for j in 0..=b {
        let power = num_traits::pow(BigInt::from(j), a as usize);
        if j % 2 == 0 {
            acc += &binom * power;
        } else {
            acc -= &binom * power;
        }
        binom = binom * (b - j) / (j + 1);
    }
    Rational::from_integer(acc)
}

/// Coefficients (ascending powers of `x`) of the Laguerre polynomial
/// `L_degree^{(1)}(x) = sum_l (-x)^l / l! * C(degree + 1, l + 1)`.
pub fn laguerre_1_coeffs(degree: usize) -> Vec<Rational> {
    let h = degree + 1;
    (0..h)
        .map(|l| sign(l as i64) * choose(h, l + 1) / factorial(l as u64))
        .collect()
}

/// Evaluates a polynomial given by ascending coefficients at a float.
pub fn horner_f64(coeffs: &[Rational], x: f64) -> f64 {
    coeffs
        .iter()
        .rev()
        .fold(0.0, |acc, c| acc * x + c.to_f64().unwrap_or(f64::NAN))
}

/// Complete ordinary Bell sum
/// `gamma_a = sum_{v_1 + 2 v_2 + ... + a v_a = a} multinomial(v) prod (-beta_i)^{v_i}`
/// for `a = betas.len()`; `gamma_0 = 1`.
///
/// Enumerates the partitions of `a` directly, so the cost grows like the
/// partition numbers. This is the coefficient of `x^a` in
/// `1 / (1 + beta_1 x + ... + beta_a x^a)`.
pub fn bell_gamma(betas: &[Rational]) -> Rational {
    let a = betas.len();
    let mut total = Rational::zero();
    let mut mults = vec![0usize; a + 1];
    partitions(a, a, &mut mults, &mut |mults| {
        let parts: usize = mults.iter().sum();
        let mut term = factorial(parts as u64);
        for (size, &count) in mults.iter().enumerate().skip(1) {
            if count == 0 {
                continue;
            }
            term /= factorial(count as u64);
            term *= powi(&-&betas[size - 1], count as i64);
        }
        total += term;
    });
    total
}

fn partitions(rem: usize, max_part: usize, mults: &mut [usize], visit: &mut impl FnMut(&[usize])) {
    if rem == 0 {
        visit(mults);
        return;
    }
    for part in (1..=max_part.min(rem)).rev() {
        mults[part] += 1;
        partitions(rem - part, part, mults, visit);
        mults[part] -= 1;
    }
}

/// Corner parameters of the Jacobi process: an `m x p` corner of a `d x d`
/// unitary Brownian motion. `p` may be a half-integer.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HalfIntegerParams {
    m: u32,
    p: Rational,
    d: u32,
}

impl HalfIntegerParams {
    pub fn new(m: u32, p: Rational, d: u32) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidParams("m must be positive".into()));
        }
        if !(&p * int(2)).is_integer() {
            return Err(Error::InvalidParams(format!("2p must be an integer, got p = {p}")));
        }
        if p < int(m.into()) {
            return Err(Error::InvalidParams(format!("need p >= m, got p = {p}, m = {m}")));
        }
        if int(d.into()) <= p {
            return Err(Error::InvalidParams(format!("need q = d - p > 0, got d = {d}, p = {p}")));
        }
        Ok(Self { m, p, d })
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn p(&self) -> &Rational {
        &self.p
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    pub fn r(&self) -> Rational {
        &self.p - int(self.m.into())
    }

    pub fn q(&self) -> Rational {
        int(self.d.into()) - &self.p
    }

    pub fn s(&self) -> Rational {
        self.q() - int(self.m.into())
    }
}
