//! Moments as exponential polynomials in `t`.
//!
//! Finite-size moments `M_n(t) = E tr(J_{t/d}^n)` come from the regrouped
//! hypergeometric form of the hook sum; their stationary part is closed with
//! the trace identity `M_n(0) = m`. Limits of `M_n(t) / m` are assembled
//! from a coefficient table.

use alloc::collections::btree_map::{BTreeMap, Entry};
use alloc::format;
use alloc::vec::Vec;
use core::fmt;

use num_traits::{One, ToPrimitive, Zero};

use crate::coefficients::CoeffTable;
use crate::exact::{choose, factorial, half, int, laguerre_1_coeffs, pochhammer, powi, sign, HalfIntegerParams, Rational};
use crate::{Error, Result};

/// `sum coef * t^power * exp(-rate * t)`, keyed by `(rate, power)`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ExpPoly {
    terms: BTreeMap<(Rational, u32), Rational>,
}

impl ExpPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: Rational) -> Self {
        let mut e = Self::zero();
        e.add_term(c, Rational::zero(), 0);
        e
    }

    pub fn add_term(&mut self, coef: Rational, rate: Rational, power: u32) {
        if coef.is_zero() {
            return;
        }
        match self.terms.entry((rate, power)) {
            Entry::Vacant(v) => {
                v.insert(coef);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += coef;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add(&mut self, other: &ExpPoly) {
        for ((rate, power), c) in &other.terms {
            self.add_term(c.clone(), rate.clone(), *power);
        }
    }

    pub fn scale(&self, c: &Rational) -> ExpPoly {
        let mut out = ExpPoly::zero();
        for ((rate, power), coef) in &self.terms {
            out.add_term(coef * c, rate.clone(), *power);
        }
        out
    }

    /// `(coef, rate, power)` in increasing `(rate, power)` order.
    pub fn terms(&self) -> impl Iterator<Item = (&Rational, &Rational, u32)> {
        self.terms.iter().map(|((rate, power), c)| (c, rate, *power))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, rate: &Rational, power: u32) -> Rational {
        self.terms.get(&(rate.clone(), power)).cloned().unwrap_or_else(Rational::zero)
    }

    /// The `rate = 0, power = 0` coefficient.
    pub fn constant_part(&self) -> Rational {
        self.coeff(&Rational::zero(), 0)
    }

    /// Everything except the constant term.
    pub fn time_part(&self) -> ExpPoly {
        let mut out = self.clone();
        out.terms.remove(&(Rational::zero(), 0));
        out
    }

    /// True when some term with rate zero grows or stays constant in `t`
    /// while not being the constant itself.
    pub fn has_zero_rate_nonconstant(&self) -> bool {
        self.terms.keys().any(|(rate, power)| rate.is_zero() && *power > 0)
    }

    /// Exact value at `t = 0`: the sum of the power-zero coefficients.
    pub fn eval_exact_at_zero(&self) -> Rational {
        self.terms.iter().filter(|((_, p), _)| *p == 0).map(|(_, c)| c).sum()
    }

    /// Double-precision value at `t >= 0`. Each term is rounded separately,
    /// so the relative error is about `1e-15` times the number of terms
    /// times the largest term over the result.
    pub fn eval(&self, t: f64) -> f64 {
        self.terms
            .iter()
            .map(|((rate, power), c)| {
                let r = rate.to_f64().unwrap_or(f64::NAN);
                let c = c.to_f64().unwrap_or(f64::NAN);
                let tp = if *power == 0 { 1.0 } else { libm::pow(t, f64::from(*power)) };
                c * tp * libm::exp(-r * t)
            })
            .sum()
    }
}

/// Terms in key order, e.g. `1/2 + 3*e^(-t) - 2*t^2*e^(-5/2 t)`.
impl fmt::Display for ExpPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return f.write_str("0");
        }
        for (i, (coef, rate, power)) in self.terms().enumerate() {
            let neg = coef < &Rational::zero();
            match (i, neg) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            write!(f, "{}", if neg { -coef } else { coef.clone() })?;
            match power {
                0 => {}
                1 => f.write_str("*t")?,
                _ => write!(f, "*t^{power}")?,
            }
            if !rate.is_zero() {
                if rate.is_one() {
                    f.write_str("*e^(-t)")?;
                } else {
                    write!(f, "*e^(-{rate} t)")?;
                }
            }
        }
        Ok(())
    }
}

/// Stationary value plus time-dependent part.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Moment {
    pub stationary: Rational,
    pub time_part: ExpPoly,
}

impl Moment {
    pub fn to_exp_poly(&self) -> ExpPoly {
        let mut e = self.time_part.clone();
        e.add_term(self.stationary.clone(), Rational::zero(), 0);
        e
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.stationary.to_f64().unwrap_or(f64::NAN) + self.time_part.eval(t)
    }

    /// Value at `t = 0`, exactly.
    pub fn at_zero(&self) -> Rational {
        &self.stationary + self.time_part.eval_exact_at_zero()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteMoment {
    pub n: u32,
    pub params: HalfIntegerParams,
    pub time_part: ExpPoly,
    pub stationary: Rational,
}

impl FiniteMoment {
    pub fn moment(&self) -> Moment {
        Moment { stationary: self.stationary.clone(), time_part: self.time_part.clone() }
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.moment().eval(t)
    }
}

fn nonzero(x: Rational, what: &str) -> Result<Rational> {
    if x.is_zero() {
        Err(Error::Pole(format!("{what} vanishes")))
    } else {
        Ok(x)
    }
}

/// Time-dependent part of `M_n(t)`.
///
/// One term per `(h, j, k)` with `1 <= h <= n`, `0 <= j < h`,
/// `0 <= k <= n - h`, at rate `(d h + h (h - 2j - 1)) / d`. Terms whose
/// hooks have more than `m` rows are dropped; their reciprocal gamma
/// factors vanish.
pub fn finite_time_part(n: u32, params: &HalfIntegerParams) -> Result<ExpPoly> {
    if n == 0 {
        return Err(Error::InvalidParams("n must be positive".into()));
    }
    let m = i64::from(params.m());
    let mr = int(m);
    let p = params.p().clone();
    let q = params.q();
    let di = i64::from(params.d());
    let d = int(di);
    let ni = i64::from(n);
    let nu = n as usize;
    let mut out = ExpPoly::zero();
    for h in 1..=ni {
        let hu = h as usize;
        for j in 0..h {
            if j >= m {
                continue;
            }
            let rate = int(di * h + h * (h - 2 * j - 1)) / &d;
            let num = (&d + int(2 * h - 2 * j - 1)) * (&d - int(2 * j + 1)) * pochhammer(&(&q - int(j)), hu)
                * pochhammer(&(&d - int(j)), hu);
            let den = nonzero(&d + int(h - 2 * j - 1), "d + h - 2j - 1")?
                * nonzero(pochhammer(&(&p - int(j)), hu), "(p - j)_h")?
                * int(h)
                * factorial((ni - h) as u64)
                * factorial((h - j - 1) as u64)
                * factorial(j as u64);
            let base = num / den;
            for k in 0..=(ni - h) {
                if ni - h + j - k >= m {
                    continue;
                }
                let tail = nonzero(pochhammer(&(&d + int(h - ni - 2 * j - 1 + k)), nu + hu + 1), "(d-n+h-2j-1+k)_{n+h+1}")?;
                let c = sign(ni - h + j + k)
                    * choose((ni - h) as usize, k as usize)
                    * &base
                    * pochhammer(&(&mr + int(h - ni - j + k)), nu)
                    * pochhammer(&(&p + int(h - ni - j + k)), nu)
                    / tail;
                out.add_term(c, rate.clone(), 0);
            }
        }
    }
    Ok(out)
}

/// `M_n(t)` with the stationary part fixed by `M_n(0) = m`.
pub fn finite_moment(n: u32, params: &HalfIntegerParams) -> Result<FiniteMoment> {
    let time_part = finite_time_part(n, params)?;
    let stationary = int(params.m().into()) - time_part.eval_exact_at_zero();
    Ok(FiniteMoment { n, params: params.clone(), time_part, stationary })
}

/// `sum_h (-1)^(h-1) / h sum_l (2h)^l / l! c_{n,h,l} t^l e^(-h t)`.
pub fn limit_time_part(n: u32, table: &CoeffTable) -> Result<ExpPoly> {
    let mut out = ExpPoly::zero();
    for h in 1..=n {
        let hi = i64::from(h);
        for l in 0..h {
            let c = table.require(n, h, l)?;
            let coef = sign(hi - 1) / int(hi) * powi(&int(2 * hi), l.into()) / factorial(l.into()) * c;
            out.add_term(coef, int(hi), l);
        }
    }
    Ok(out)
}

/// Limit of `M_n(t) / m`; the stationary part is `1 - time_part(0)`.
pub fn limit_moment(n: u32, table: &CoeffTable) -> Result<Moment> {
    let time_part = limit_time_part(n, table)?;
    let stationary = Rational::from(int(1)) - time_part.eval_exact_at_zero();
    Ok(Moment { stationary, time_part })
}

/// `C(2n, n) / 4^n + 2^(1-2n) sum_h C(2n, n-h) e^(-h t) / h L_{h-1}^{(1)}(2 h t)`.
pub fn spec_case_moment(n: u32) -> Result<Moment> {
    if n == 0 {
        return Err(Error::InvalidParams("n must be positive".into()));
    }
    let nu = n as usize;
    let ni = i64::from(n);
    let stationary = choose(2 * nu, nu) / powi(&int(4), ni);
    let pre = powi(&half(), 2 * ni - 1);
    let mut time_part = ExpPoly::zero();
    for h in 1..=ni {
        let outer = &pre * choose(2 * nu, nu - h as usize) / int(h);
        for (l, c) in laguerre_1_coeffs((h - 1) as usize).into_iter().enumerate() {
            let coef = &outer * c * powi(&int(2 * h), l as i64);
            time_part.add_term(coef, int(h), l as u32);
        }
    }
    Ok(Moment { stationary, time_part })
}

/// Candidate readings of the free index `i` in the `(2m - i)_n` factor of
/// the stationary sum.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum StationaryShift {
    /// `i = h`, the summation index.
    #[default]
    Summation,
    Zero,
    Degree,
    SummationPlusOne,
    One,
}

impl StationaryShift {
    pub const ALL: [StationaryShift; 5] = [
        StationaryShift::Summation,
        StationaryShift::Zero,
        StationaryShift::Degree,
        StationaryShift::SummationPlusOne,
        StationaryShift::One,
    ];

    fn index(self, h: i64, n: i64) -> i64 {
        match self {
            StationaryShift::Summation => h,
            StationaryShift::Zero => 0,
            StationaryShift::Degree => n,
            StationaryShift::SummationPlusOne => h + 1,
            StationaryShift::One => 1,
        }
    }

    pub fn describe(self) -> &'static str {
        match self {
            StationaryShift::Summation => "i = h",
            StationaryShift::Zero => "i = 0",
            StationaryShift::Degree => "i = n",
            StationaryShift::SummationPlusOne => "i = h + 1",
            StationaryShift::One => "i = 1",
        }
    }
}

/// Explicit `M_n(t)` at `p = m + 1/2`, `d = 2m`, with the stationary sum
/// read according to `shift`.
pub fn corollary21_moment(n: u32, m: u32, shift: StationaryShift) -> Result<Moment> {
    if n == 0 || m == 0 {
        return Err(Error::InvalidParams("n and m must be positive".into()));
    }
    let (ni, mi) = (i64::from(n), i64::from(m));
    let nu = n as usize;
    let mr = int(mi);
    let mut stationary = Rational::zero();
    for h in 0..ni {
        let den = pochhammer(&int(2 * mi - shift.index(h, ni)), nu);
        if den.is_zero() {
            return Err(Error::Pole(format!("(2m - i)_n vanishes at h = {h}")));
        }
        stationary += sign(h)
            * choose((ni - 1) as usize, h as usize)
            * pochhammer(&(&mr - int(h)), nu)
            * pochhammer(&(&mr - int(h) + half()), nu)
            / den;
    }
    stationary /= factorial(n.into());

    let mut time_part = ExpPoly::zero();
    let pre = powi(&half(), 2 * ni);
    for h in 1..=ni {
        let outer = &pre * choose(2 * nu, (ni - h) as usize);
        for j in 0..h {
            let den = 2 * mi + h - 2 * j - 1;
            if den == 0 {
                return Err(Error::Pole("2m + h - 2j - 1 vanishes".into()));
            }
            let coef = &outer
                * choose((h - 1) as usize, j as usize)
                * sign(j)
                * int(2 * mi - 2 * j - 1)
                / int(den)
                * pochhammer(&int(2 * mi - j), h as usize)
                / factorial(h as u64);
            let rate = int(2 * mi * h + h * (h - 1) - 2 * h * j) / int(2 * mi);
            time_part.add_term(coef, rate, 0);
        }
    }
    Ok(Moment { stationary, time_part })
}

/// `(1/2m) sum_j (-1)^j e^(h t j / 2m) C(h-1, j) (2m+h-j-1)! / (h! (2m-j-1)!)`.
pub fn biane_inner_sum(h: u32, m: u32, t: f64) -> f64 {
    let (hi, mi) = (i64::from(h), i64::from(m));
    let two_m = 2.0 * f64::from(m);
    let mut s = 0.0;
    for j in 0..hi {
        let ratio = pochhammer(&int(2 * mi - j), h as usize) / factorial(h.into())
            * choose((hi - 1) as usize, j as usize);
        let r = ratio.to_f64().unwrap_or(f64::NAN);
        let e = libm::exp(f64::from(h) * t * j as f64 / two_m);
        if j % 2 == 0 {
            s += r * e;
        } else {
            s -= r * e;
        }
    }
    s / two_m
}

/// `L_{h-1}^{(1)}(h t) / h`.
pub fn biane_limit(h: u32, t: f64) -> f64 {
    let coeffs = laguerre_1_coeffs((h - 1) as usize);
    crate::exact::horner_f64(&coeffs, f64::from(h) * t) / f64::from(h)
}

/// Rates `nu_{h,j}(d) / d` for all `1 <= h <= n`, `0 <= j < h`.
pub fn finite_rates(n: u32, d: u32) -> Vec<Rational> {
    let (ni, di) = (i64::from(n), i64::from(d));
    let mut out = Vec::new();
    for h in 1..=ni {
        for j in 0..h {
            out.push(int(di * h + h * (h - 2 * j - 1)) / int(di));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use alloc::string::ToString;

    #[test]
    fn display_terms() {
        let mut e = ExpPoly::constant(half());
        e.add_term(int(3), int(1), 0);
        e.add_term(int(-2), rat(5, 2), 2);
        assert_eq!(e.to_string(), "1/2 + 3*e^(-t) - 2*t^2*e^(-5/2 t)");
        assert_eq!(ExpPoly::zero().to_string(), "0");
    }

    use super::*;
    use crate::coefficients::{build_table, LimitParams, Route};
    use crate::exact::rat;

    fn hp(m: u32, p: Rational, d: u32) -> HalfIntegerParams {
        HalfIntegerParams::new(m, p, d).unwrap()
    }

    #[test]
    fn exp_poly_basics() {
        let mut e = ExpPoly::zero();
        e.add_term(int(1), int(1), 0);
        assert!((e.eval(0.0) - 1.0).abs() < 1e-15);
        let mut f = ExpPoly::zero();
        f.add_term(int(3), int(1), 2);
        f.add_term(int(5), int(2), 0);
        assert_eq!(f.eval_exact_at_zero(), int(5));
        f.add_term(int(-5), int(2), 0);
        assert_eq!(f.len(), 1);
        assert!(!f.has_zero_rate_nonconstant());
    }

    #[test]
    fn finite_n1() {
        let e = finite_time_part(1, &hp(2, int(2), 4)).unwrap();
        let mut expected = ExpPoly::zero();
        expected.add_term(int(1), int(1), 0);
        assert_eq!(e, expected);
        let fm = finite_moment(1, &hp(2, int(2), 4)).unwrap();
        assert_eq!(fm.stationary, int(1));

        let params = hp(3, rat(7, 2), 9);
        let e = finite_time_part(1, &params).unwrap();
        let mut expected = ExpPoly::zero();
        expected.add_term(int(3) * (int(1) - rat(7, 18)), int(1), 0);
        assert_eq!(e, expected);
    }

    #[test]
    fn finite_rates_n2() {
        // nu_{1,0} = d, nu_{2,0} = 2d + 2, nu_{2,1} = 2d - 2
        assert_eq!(finite_rates(2, 10), alloc::vec![rat(10, 10), rat(22, 10), rat(18, 10)]);
        let e = finite_time_part(2, &hp(4, int(5), 10)).unwrap();
        let rates: Vec<Rational> = e.terms().map(|(_, r, _)| r.clone()).collect();
        assert_eq!(rates, alloc::vec![rat(10, 10), rat(18, 10), rat(22, 10)]);
    }

    #[test]
    fn trace_at_zero() {
        for (n, m, p, d) in [(2u32, 2u32, int(2), 4u32), (3, 3, rat(7, 2), 7), (4, 2, int(3), 6)] {
            let fm = finite_moment(n, &hp(m, p, d)).unwrap();
            assert_eq!(fm.moment().at_zero(), int(m.into()));
        }
    }

    #[test]
    fn limit_n1() {
        let theta = rat(2, 5);
        let params = LimitParams::new(rat(1, 2), theta.clone()).unwrap();
        let table = build_table(1, &params, Route::Division).unwrap();
        let lim = limit_moment(1, &table).unwrap();
        let mut expected = ExpPoly::zero();
        expected.add_term(int(1) - &theta, int(1), 0);
        assert_eq!(lim.time_part, expected);
        assert_eq!(lim.stationary, theta);
        assert!(matches!(limit_time_part(2, &table), Err(Error::MissingCoefficient { .. })));
    }

    #[test]
    fn spec_case_examples() {
        let m1 = spec_case_moment(1).unwrap();
        assert_eq!(m1.stationary, half());
        let mut t1 = ExpPoly::zero();
        t1.add_term(half(), int(1), 0);
        assert_eq!(m1.time_part, t1);
        assert!((m1.eval(1.0) - 0.683_939_720_585_721_2).abs() < 1e-12);

        // n = 2: 3/8 + (1/8)[4 e^{-t} + (1/2) e^{-2t} (2 - 4t)... ] expanded
        let m2 = spec_case_moment(2).unwrap();
        assert_eq!(m2.stationary, rat(3, 8));
        assert_eq!(m2.time_part.coeff(&int(1), 0), rat(1, 2));
        assert_eq!(m2.time_part.coeff(&int(2), 0), rat(1, 8));
        assert_eq!(m2.time_part.coeff(&int(2), 1), rat(-1, 4));
        assert_eq!(m2.at_zero(), int(1));
    }

    #[test]
    fn explicit_moment_n1() {
        let c = corollary21_moment(1, 3, StationaryShift::Summation).unwrap();
        assert_eq!(c.time_part.len(), 1);
        assert_eq!(c.time_part.terms().next().unwrap().1, &int(1));
    }

    #[test]
    fn biane_h1() {
        assert!((biane_inner_sum(1, 50, 1.0) - biane_limit(1, 1.0)).abs() < 1e-12);
        assert!((biane_limit(2, 1.0)).abs() < 1e-15);
    }
}
