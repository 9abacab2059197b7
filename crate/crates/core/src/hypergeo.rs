//! Terminating generalized hypergeometric series at rational argument and
//! the reduction identities (Gauss, Carlitz, Chu) used to cross-check the
//! regrouped moment formula.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};

use crate::exact::{factorial, gamma_ratio, half, int, is_nonpositive_integer, pochhammer, sign, Rational};
use crate::{Error, Result};

/// `pFq(top; bottom; argument)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HypSeries {
    pub top: Vec<Rational>,
    pub bottom: Vec<Rational>,
    pub argument: Rational,
}

/// Both sides of an identity, kept apart so a mismatch can be printed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IdentityPair {
    pub lhs: Rational,
    pub rhs: Rational,
}

impl IdentityPair {
    pub fn holds(&self) -> bool {
        self.lhs == self.rhs
    }
}

impl HypSeries {
    pub fn new(top: Vec<Rational>, bottom: Vec<Rational>, argument: Rational) -> Self {
        Self { top, bottom, argument }
    }

    /// Smallest `N` such that `-N` is a top parameter.
    pub fn termination_index(&self) -> Option<usize> {
        self.top
            .iter()
            .filter(|a| is_nonpositive_integer(a))
            .filter_map(|a| (-a).to_integer().to_usize())
            .min()
    }

    pub fn is_one_balanced(&self) -> bool {
        is_one_balanced(self)
    }

    pub fn evaluate(&self) -> Result<Rational> {
        evaluate_terminating(self)
    }
}

/// `sum_{k=0}^{N} prod_top (a)_k / prod_bottom (b)_k * z^k / k!`.
///
/// Bottom parameters that vanish only after index `N` are harmless.
pub fn evaluate_terminating(s: &HypSeries) -> Result<Rational> {
    let n = s.termination_index().ok_or(Error::NotTerminating)?;
    let mut sum = Rational::zero();
    let mut term = Rational::one();
    for k in 0..=n {
        sum += &term;
        if k == n {
            break;
        }
        let shift = Rational::from_integer(BigInt::from(k));
        for b in &s.bottom {
            let factor = b + &shift;
            if factor.is_zero() {
                return Err(Error::PoleBeforeTermination { index: k + 1, termination: n });
            }
            term /= factor;
        }
        for a in &s.top {
            term *= a + &shift;
        }
        term *= &s.argument;
        term /= Rational::from_integer(BigInt::from(k + 1));
    }
    Ok(sum)
}

pub fn is_one_balanced(s: &HypSeries) -> bool {
    let top: Rational = s.top.iter().sum();
    let bottom: Rational = s.bottom.iter().sum();
    bottom == top + Rational::one()
}

/// Gauss summation `2F1(-N, b; c; 1) = (c-b)_N / (c)_N`.
pub fn gauss_2f1_unity(n: usize, b: &Rational, c: &Rational) -> Result<Rational> {
    let den = pochhammer(c, n);
    if den.is_zero() {
        return Err(Error::Pole(format!("(c)_N vanishes for c = {c}, N = {n}")));
    }
    Ok(pochhammer(&(c - b), n) / den)
}

/// Convenience constructor for `2F1(a, b; c; z)`.
pub fn hyp2f1(a: Rational, b: Rational, c: Rational, z: Rational) -> Result<Rational> {
    evaluate_terminating(&HypSeries::new(vec![a, b], vec![c], z))
}

/// Rejects bottom parameters `-M` with `M < n`, i.e. poles inside the range
/// the identity is stated for, even when another top parameter would cut the
/// series short.
fn check_generic_poles(bottom: &[Rational], n: usize) -> Result<()> {
    for b in bottom {
        if is_nonpositive_integer(b) {
            let m = (-b).to_integer();
            if m < BigInt::from(n) {
                return Err(Error::PoleBeforeTermination {
                    index: m.to_usize().unwrap_or(0) + 1,
                    termination: n,
                });
            }
        }
    }
    Ok(())
}

/// The Carlitz instance of the moment 4F3 at `p = m + 1/2`, `d = 2m`, and
/// its closed form.
pub fn carlitz_4f3(n: u32, h: u32, j: u32, m: &Rational) -> Result<IdentityPair> {
    if h < 1 || h > n || j >= h {
        return Err(Error::InvalidParams(format!("need 1 <= h <= n, j < h; got n={n}, h={h}, j={j}")));
    }
    let (ni, hi, ji) = (int(n.into()), int(h.into()), int(j.into()));
    let two = int(2);
    let mhj = m + &hi - &ji;
    let mnhj = m - &ni + &hi - &ji;
    let top = vec![
        -(&ni - &hi),
        mhj.clone(),
        &mhj + half(),
        &two * m - &ni + &hi - &two * &ji - int(1),
    ];
    let bottom = vec![mnhj.clone(), &mnhj + half(), &two * m + &two * &hi - &two * &ji];
    let n_minus_h = (n - h) as usize;
    check_generic_poles(&bottom, n_minus_h)?;
    let lhs = evaluate_terminating(&HypSeries::new(top, bottom, int(1)))?;

    let den = m - &ji - half();
    if den.is_zero() {
        return Err(Error::Pole(format!("m - j - 1/2 = 0 at m = {m}, j = {j}")));
    }
    let a = &two * m - &ni + &hi - &two * &ji - int(1);
    let rhs = sign((n - h).into()) * (&mnhj - half()) / den * factorial((2 * n).into())
        / factorial((n + h).into())
        * gamma_ratio(&a, -i64::from(n - h))?;
    Ok(IdentityPair { lhs, rhs })
}

fn chu_4f3_params(n: usize, a: &Rational, c: &Rational, e: &Rational) -> (Vec<Rational>, Vec<Rational>) {
    let nn = Rational::from_integer(BigInt::from(n));
    let one = Rational::one();
    let two = int(2);
    let top = vec![-nn.clone(), a - c + &nn, c / &two, (c + &one) / &two];
    let bottom = vec![&one + a - e, e / &two, (e + &one) / &two];
    (top, bottom)
}

/// The balanced `4F3` side of Chu's reduction on its own.
pub fn chu_4f3(n: usize, a: &Rational, c: &Rational, e: &Rational) -> Result<Rational> {
    let (top, bottom) = chu_4f3_params(n, a, c, e);
    check_generic_poles(&bottom, n)?;
    evaluate_terminating(&HypSeries::new(top, bottom, Rational::one()))
}

/// Chu's reduction of a terminating 1-balanced 4F3 to a 3F2:
/// `4F3(-N, a-c+N, c/2, (c+1)/2; 1+a-e, e/2, (e+1)/2; 1)
///  = (1+a-c-e)_N (e-c)_N / ((1+a-e)_N (e)_N) * 3F2(-N, a-c+N, c; c+e-a-N, e+N; 1)`.
pub fn chu_reduction_pair(n: usize, a: &Rational, c: &Rational, e: &Rational) -> Result<IdentityPair> {
    let nn = Rational::from_integer(BigInt::from(n));
    let one = Rational::one();
    let (top4, bottom4) = chu_4f3_params(n, a, c, e);
    let top3 = vec![-nn.clone(), a - c + &nn, c.clone()];
    let bottom3 = vec![c + e - a - &nn, e + &nn];
    check_generic_poles(&bottom4, n)?;
    check_generic_poles(&bottom3, n)?;
    let lhs = evaluate_terminating(&HypSeries::new(top4, bottom4, one.clone()))?;
    let den = pochhammer(&(&one + a - e), n) * pochhammer(e, n);
    if den.is_zero() {
        return Err(Error::Pole("prefactor denominator vanishes".into()));
    }
    let pre = pochhammer(&(&one + a - c - e), n) * pochhammer(&(e - c), n) / den;
    let rhs = pre * evaluate_terminating(&HypSeries::new(top3, bottom3, one))?;
    Ok(IdentityPair { lhs, rhs })
}
