//! The limit coefficients `c_{n,h,l}` and the routes that compute them.
//!
//! The primary route builds the numerator `P_{n,h}` and denominator
//! `D_{n,h,l}` as polynomials in `d` with `(j, k)`-polynomial coefficients,
//! long-divides, and reads `c_{n,h,l}` off the quotient as the coefficient
//! of `j^(h-l-1) k^(n-h)` in `q_{n-l-1}`. The other routes go through
//! symmetric functions of the roots, the triangular recurrences, or closed
//! forms, and must agree exactly.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use num_traits::{One, Zero};

use crate::exact::{alternating_power_sum, bell_gamma, choose, factorial, int, pochhammer, powi, sign, Rational};
use crate::hypergeo::hyp2f1;
use crate::polyring::{
    complete_homogeneous_upto, elementary_symmetric_upto, long_divide, AffineRoot, BivarPoly, DPoly,
};
use crate::{Error, Result};

/// `(lambda, theta)` with `0 < lambda <= 1` and `0 < theta < 1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LimitParams {
    lambda: Rational,
    theta: Rational,
}

impl LimitParams {
    pub fn new(lambda: Rational, theta: Rational) -> Result<Self> {
        if lambda <= Rational::zero() || lambda > Rational::one() {
            return Err(Error::InvalidParams(format!("need 0 < lambda <= 1, got {lambda}")));
        }
        if theta <= Rational::zero() || theta >= Rational::one() {
            return Err(Error::InvalidParams(format!("need 0 < theta < 1, got {theta}")));
        }
        Ok(Self { lambda, theta })
    }

    /// `lambda = 1, theta = 1/2`
    pub fn arcsine() -> Self {
        Self { lambda: Rational::one(), theta: crate::exact::half() }
    }

    pub fn lambda(&self) -> &Rational {
        &self.lambda
    }

    pub fn theta(&self) -> &Rational {
        &self.theta
    }

    fn lt(&self) -> Rational {
        &self.lambda * &self.theta
    }

    fn one_minus_theta(&self) -> Rational {
        Rational::one() - &self.theta
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Route {
    /// Long division of `P` by `D`.
    Division,
    /// Elementary and complete homogeneous symmetric functions of the roots.
    Symmetric,
    /// The general triangular double recurrence in `Z_{a,b}`.
    Recurrence,
    /// The `h = n` recurrence in `X_i`.
    Diagonal,
    /// The `h = n` Toeplitz inversion through Bell sums.
    Toeplitz,
    /// The `l = h - 1` closed form.
    ClosedForm,
}

impl Route {
    pub const ALL: [Route; 6] = [
        Route::Division,
        Route::Symmetric,
        Route::Recurrence,
        Route::Diagonal,
        Route::Toeplitz,
        Route::ClosedForm,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Route::Division => "division",
            Route::Symmetric => "symmetric",
            Route::Recurrence => "recurrence",
            Route::Diagonal => "diagonal",
            Route::Toeplitz => "toeplitz",
            Route::ClosedForm => "closed",
        }
    }

    /// Whether the route produces `c_{n,h,l}` at this index.
    pub fn applies(self, n: u32, h: u32, l: u32) -> bool {
        let covered = match self {
            Route::Diagonal | Route::Toeplitz => h == n,
            Route::ClosedForm => l + 1 == h,
            _ => true,
        };
        covered && valid_index(n, h, l)
    }
}

impl fmt::Display for Route {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Route {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Route::ALL
            .into_iter()
            .find(|r| r.as_str() == s)
            .ok_or_else(|| Error::InvalidParams(format!("unknown route {s:?}")))
    }
}

pub fn valid_index(n: u32, h: u32, l: u32) -> bool {
    n >= 1 && h >= 1 && h <= n && l < h
}

fn check_index(n: u32, h: u32, l: u32) -> Result<()> {
    if valid_index(n, h, l) {
        Ok(())
    } else {
        Err(Error::InvalidParams(format!("need 1 <= h <= n and l < h, got (n,h,l) = ({n},{h},{l})")))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoeffEntry {
    pub value: Rational,
    pub route: Route,
}

/// `(n, h, l) -> c_{n,h,l}` at fixed `(lambda, theta)`, tagged with the route.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoeffTable {
    params: LimitParams,
    entries: BTreeMap<(u32, u32, u32), CoeffEntry>,
}

impl CoeffTable {
    pub fn new(params: LimitParams) -> Self {
        Self { params, entries: BTreeMap::new() }
    }

    pub fn params(&self) -> &LimitParams {
        &self.params
    }

    pub fn get(&self, n: u32, h: u32, l: u32) -> Option<&Rational> {
        self.entries.get(&(n, h, l)).map(|e| &e.value)
    }

    pub fn entry(&self, n: u32, h: u32, l: u32) -> Option<&CoeffEntry> {
        self.entries.get(&(n, h, l))
    }

    pub fn require(&self, n: u32, h: u32, l: u32) -> Result<&Rational> {
        self.get(n, h, l).ok_or(Error::MissingCoefficient { n, h, l })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&(u32, u32, u32), &CoeffEntry)> {
        self.entries.iter()
    }

    /// True when every `(n', h, l)` with `n' <= n_max` is present.
    pub fn covers(&self, n_max: u32) -> bool {
        (1..=n_max).all(|n| (1..=n).all(|h| (0..h).all(|l| self.entries.contains_key(&(n, h, l)))))
    }

    /// Inserts a value; a different value already stored at the same index
    /// is a route disagreement. The first route tag is kept.
    pub fn insert(&mut self, n: u32, h: u32, l: u32, value: Rational, route: Route) -> Result<()> {
        match self.entries.get(&(n, h, l)) {
            Some(old) if old.value != value => Err(Error::RouteDisagreement {
                n,
                h,
                l,
                first: format!("{} ({})", old.value, old.route),
                second: format!("{value} ({route})"),
            }),
            Some(_) => Ok(()),
            None => {
                self.entries.insert((n, h, l), CoeffEntry { value, route });
                Ok(())
            }
        }
    }

    /// Merges another table at the same parameters. The result does not
    /// depend on merge order except for which route tag is kept.
    pub fn merge(&mut self, other: &CoeffTable) -> Result<()> {
        if self.params != other.params {
            return Err(Error::InvalidParams("cannot merge tables at different (lambda, theta)".into()));
        }
        for (&(n, h, l), e) in &other.entries {
            self.insert(n, h, l, e.value.clone(), e.route)?;
        }
        Ok(())
    }
}

/// The `l`-dependent roots of `D_{n,h,l}` and the roots of `P_{n,h}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootLists {
    pub y: Vec<AffineRoot>,
    pub z: Vec<AffineRoot>,
}

/// Roots `y_1..y_A` of `P_{n,h}` and `z_1..z_B` of `D_{n,h,l}`, listed
/// branch by branch with 1-based `i`.
pub fn root_lists(n: u32, h: u32, l: u32, params: &LimitParams) -> RootLists {
    let (n, h, l) = (i64::from(n), i64::from(h), i64::from(l));
    let inv = |r: &Rational| r.recip();
    let inv_1mt = inv(&params.one_minus_theta());
    let inv_lt = inv(&params.lt());
    let inv_t = inv(params.theta());
    let jr = |c: i64| AffineRoot::new(int(c), int(1), int(0));
    let jkr = |c: i64| AffineRoot::new(int(c), int(1), int(-1));

    let a = 2 * n + 2 * h + 2;
    let mut y = Vec::with_capacity(a as usize);
    for i in 1..=a {
        let root = if i == 1 {
            AffineRoot::new(int(1 - 2 * h), int(2), int(0))
        } else if i == 2 {
            AffineRoot::new(int(1), int(2), int(0))
        } else if i <= h + 2 {
            jr(3 - i)
        } else if i <= 2 * h + 2 {
            jr(h - i + 3).scale(&inv_1mt)
        } else if i <= n + 2 * h + 2 {
            jkr(n + h - i + 3).scale(&inv_lt)
        } else {
            jkr(2 * n + h - i + 3).scale(&inv_t)
        };
        y.push(root);
    }

    let b = n + 2 * h + l + 3;
    let mut z = Vec::with_capacity(b as usize);
    for i in 1..=b {
        let root = if i <= l + 1 {
            AffineRoot::zero()
        } else if i == l + 2 {
            AffineRoot::new(int(1 - h), int(2), int(0))
        } else if i <= h + l + 2 {
            jr(l + 3 - i).scale(&inv_t)
        } else {
            AffineRoot::new(int(n + l - i + 4), int(2), int(-1))
        };
        z.push(root);
    }
    RootLists { y, z }
}

/// `d_coeff * d + rest(j, k)`.
#[derive(Clone, Debug)]
struct LinearFactor {
    d_coeff: Rational,
    rest: AffineRoot,
}

fn lin(d_coeff: Rational, constant: i64, j: i64, k: i64) -> LinearFactor {
    LinearFactor { d_coeff, rest: AffineRoot::new(int(constant), int(j), int(k)) }
}

fn p_factors(n: u32, h: u32, params: &LimitParams) -> Vec<LinearFactor> {
    let (n, h) = (i64::from(n), i64::from(h));
    let one = Rational::one();
    let mut f = vec![lin(one.clone(), -1, -2, 0), lin(one.clone(), 2 * h - 1, -2, 0)];
    for i in 0..h {
        f.push(lin(one.clone(), i, -1, 0));
    }
    for i in 0..h {
        f.push(lin(params.one_minus_theta(), i, -1, 0));
    }
    for i in 0..n {
        f.push(lin(params.lt(), h - n + i, -1, 1));
    }
    for i in 0..n {
        f.push(lin(params.theta().clone(), h - n + i, -1, 1));
    }
    f
}

/// Factors of `D_{n,h,l}` except the scalar `lambda * theta`.
fn d_factors(n: u32, h: u32, l: u32, params: &LimitParams) -> Vec<LinearFactor> {
    let (n, h) = (i64::from(n), i64::from(h));
    let one = Rational::one();
    let mut f: Vec<LinearFactor> = (0..=l).map(|_| lin(one.clone(), 0, 0, 0)).collect();
    f.push(lin(one.clone(), h - 1, -2, 0));
    for i in 0..h {
        f.push(lin(params.theta().clone(), i, -1, 0));
    }
    for i in 0..n + h + 1 {
        f.push(lin(one.clone(), h - n - 1 + i, -2, 1));
    }
    f
}

/// Coefficients of `scalar * prod factors`, leading coefficient first,
/// keeping at most `keep` of them.
fn expand_top(factors: &[LinearFactor], scalar: &Rational, keep: Option<usize>) -> Vec<BivarPoly> {
    let mut top = vec![BivarPoly::constant(scalar.clone())];
    for f in factors {
        let rest = f.rest.to_poly();
        let len = top.len() + 1;
        let len = keep.map_or(len, |k| len.min(k));
        let mut next = Vec::with_capacity(len);
        for i in 0..len {
            let mut c = top.get(i).map(|p| p.scale(&f.d_coeff)).unwrap_or_default();
            if i >= 1 {
                if let Some(prev) = top.get(i - 1) {
                    c = &c + &(prev * &rest);
                }
            }
            next.push(c);
        }
        top = next;
    }
    top
}

fn to_dpoly(top: Vec<BivarPoly>) -> DPoly {
    let mut coeffs = top;
    coeffs.reverse();
    DPoly::from_coeffs(coeffs)
}

/// `P_{n,h}(j, k, d)`, of `d`-degree `2n + 2h + 2`.
pub fn build_p(n: u32, h: u32, params: &LimitParams) -> DPoly {
    to_dpoly(expand_top(&p_factors(n, h, params), &Rational::one(), None))
}

/// `D_{n,h,l}(j, k, d)`, of `d`-degree `n + 2h + l + 3`.
pub fn build_d(n: u32, h: u32, l: u32, params: &LimitParams) -> DPoly {
    to_dpoly(expand_top(&d_factors(n, h, l, params), &params.lt(), None))
}

/// `a_A = theta^n (1-theta)^h (lambda theta)^n`
pub fn leading_p(n: u32, h: u32, params: &LimitParams) -> Rational {
    powi(params.theta(), n.into()) * powi(&params.one_minus_theta(), h.into()) * powi(&params.lt(), n.into())
}

/// `b_B = (lambda theta) theta^h`
pub fn leading_d(h: u32, params: &LimitParams) -> Rational {
    params.lt() * powi(params.theta(), h.into())
}

/// `q_0, ..., q_{n-1}` where `q_i` multiplies `d^(n-1-i)` in the quotient of
/// `P_{n,h}` by `D_{n,h,0}`.
///
/// The quotient only sees the top `n` coefficients of each polynomial, so
/// both are expanded with truncation and the division is carried out on
/// `sum_{i<n} a_{A-i} d^(2n-2-i)` over `sum_{i<n} b_{B-i} d^(n-1-i)`.
pub fn quotient_coeffs(n: u32, h: u32, params: &LimitParams) -> Result<Vec<BivarPoly>> {
    check_index(n, h, 0)?;
    let keep = n as usize;
    let top_p = expand_top(&p_factors(n, h, params), &Rational::one(), Some(keep));
    let top_d = expand_top(&d_factors(n, h, 0, params), &params.lt(), Some(keep));
    let mut p_coeffs = vec![BivarPoly::zero(); keep - 1];
    p_coeffs.extend(top_p.into_iter().rev());
    let (q, _) = long_divide(&DPoly::from_coeffs(p_coeffs), &to_dpoly(top_d))?;
    Ok(descending(&q, keep))
}

/// Same as [`quotient_coeffs`] but dividing the full `P_{n,h}` by the full
/// `D_{n,h,l}`; returns `q_0, ..., q_{n-l-1}`.
pub fn quotient_coeffs_full(n: u32, h: u32, l: u32, params: &LimitParams) -> Result<Vec<BivarPoly>> {
    check_index(n, h, l)?;
    let (q, _) = long_divide(&build_p(n, h, params), &build_d(n, h, l, params))?;
    Ok(descending(&q, (n - l) as usize))
}

fn descending(q: &DPoly, len: usize) -> Vec<BivarPoly> {
    (0..len).map(|i| q.coeff(len - 1 - i)).collect()
}

/// `q_0, ..., q_{n-1}` from the coefficient recurrence, with the normalized
/// coefficients of `P` and `D` taken as elementary symmetric functions of
/// the roots instead of expanded products.
pub fn q_coef_recurrence(n: u32, h: u32, params: &LimitParams) -> Result<Vec<BivarPoly>> {
    check_index(n, h, 0)?;
    let len = n as usize;
    let roots = root_lists(n, h, 0, params);
    let ratio = leading_p(n, h, params) / leading_d(h, params);
    let ey = elementary_symmetric_upto(&roots.y, len);
    let ez = elementary_symmetric_upto(&roots.z, len);
    let mut q: Vec<BivarPoly> = Vec::with_capacity(len);
    for i in 0..len {
        let mut qi = ey[i].scale(&(sign(i as i64) * &ratio));
        for (v, qv) in q.iter().enumerate() {
            let bt = ez[i - v].scale(&sign((i - v) as i64));
            qi = &qi - &(&bt * qv);
        }
        q.push(qi);
    }
    Ok(q)
}

/// The coefficient `c_{n,h,l}` inside `q_{n-l-1}`.
pub fn extract_c(q_const: &BivarPoly, n: u32, h: u32, l: u32) -> Rational {
    q_const.coeff(h - l - 1, n - h)
}

/// `c_{n,h,l}` by long division.
pub fn c_division(n: u32, h: u32, l: u32, params: &LimitParams) -> Result<Rational> {
    check_index(n, h, l)?;
    let q = quotient_coeffs(n, h, params)?;
    Ok(extract_c(&q[(n - l - 1) as usize], n, h, l))
}

/// `q_C` for `C = n - l - 1` from `sum_v (-1)^v e_{C-v}(y) h_v(z)`.
pub fn q_symmetric(n: u32, h: u32, l: u32, params: &LimitParams) -> Result<BivarPoly> {
    check_index(n, h, l)?;
    let c = (n - l - 1) as usize;
    let roots = root_lists(n, h, l, params);
    let e = elementary_symmetric_upto(&roots.y, c);
    let hz = complete_homogeneous_upto(&roots.z, c);
    let mut acc = BivarPoly::zero();
    for v in 0..=c {
        let term = &e[c - v] * &hz[v];
        acc = if v % 2 == 0 { &acc + &term } else { &acc - &term };
    }
    let pre = sign(c as i64) * leading_p(n, h, params) / leading_d(h, params);
    Ok(acc.scale(&pre))
}

/// `c_{n,h,l}` through the symmetric-function representation of `q_C`.
pub fn c_symmetric(n: u32, h: u32, l: u32, params: &LimitParams) -> Result<Rational> {
    Ok(extract_c(&q_symmetric(n, h, l, params)?, n, h, l))
}

/// `q_C` through the weakly increasing index sum over the two alphabets.
/// Exponential in `C`; small cases only.
pub fn q_goulden_greene(n: u32, h: u32, l: u32, params: &LimitParams) -> Result<BivarPoly> {
    check_index(n, h, l)?;
    let c = (n - l - 1) as usize;
    let roots = root_lists(n, h, l, params);
    let pre = sign(c as i64) * leading_p(n, h, params) / leading_d(h, params);
    Ok(crate::polyring::goulden_greene_sum(&roots.y, &roots.z, c).scale(&pre))
}

/// `alpha_i` of the `h = n` recurrence.
pub fn x_alpha(n: u32, i: u32, params: &LimitParams) -> Rational {
    let n_us = n as usize;
    let i_us = i as usize;
    let lt = params.lt();
    let omt = params.one_minus_theta();
    let mut s = Rational::zero();
    for i1 in 0..=2usize.min(i_us) {
        for i2 in 0..=n_us {
            for i3 in 0..=n_us {
                for i4 in 0..=n_us {
                    let used = i1 + i2 + i3 + i4;
                    if used > i_us || i_us - used > n_us {
                        continue;
                    }
                    let i5 = i_us - used;
                    s += choose(2, i1)
                        * choose(n_us, i2)
                        * choose(n_us, i3)
                        * choose(n_us, i4)
                        * choose(n_us, i5)
                        * powi(&int(2), i1 as i64)
                        * powi(&lt, i64::from(n) - 1 - i3 as i64)
                        * powi(&omt, i64::from(n) - i4 as i64)
                        * powi(params.theta(), -(i5 as i64));
                }
            }
        }
    }
    sign(i.into()) * s
}

/// `beta_r` of the `h = n` recurrence.
pub fn x_beta(n: u32, r: u32, params: &LimitParams) -> Rational {
    let (n_us, r_us) = (n as usize, r as usize);
    let mut s = Rational::zero();
    for i1 in 0..=1usize.min(r_us) {
        for i2 in 0..=n_us.min(r_us - i1) {
            let i3 = r_us - i1 - i2;
            s += choose(1, i1)
                * choose(n_us, i2)
                * choose(2 * n_us + 1, i3)
                * powi(&int(2), (i1 + i3) as i64)
                * powi(params.theta(), -(i2 as i64));
        }
    }
    sign(r.into()) * s
}

/// `X_0, ..., X_{n-1}`; `c_{n,n,l} = X_{n-l-1}`.
pub fn x_recurrence(n: u32, params: &LimitParams) -> Result<Vec<Rational>> {
    check_index(n, n, 0)?;
    let x0 = powi(&params.lt(), i64::from(n) - 1) * powi(&params.one_minus_theta(), n.into());
    debug_assert_eq!(x0, x_alpha(n, 0, params));
    let betas: Vec<Rational> = (0..n).map(|r| x_beta(n, r, params)).collect();
    let mut x = vec![x0];
    for i in 1..n {
        let mut xi = x_alpha(n, i, params);
        for (v, xv) in x.iter().enumerate() {
            xi -= &betas[i as usize - v] * xv;
        }
        x.push(xi);
    }
    Ok(x)
}

/// `c_{n,n,l} = sum_v alpha_v gamma_{n-l-1-v}` with Bell sums `gamma`.
pub fn c_toeplitz(n: u32, l: u32, params: &LimitParams) -> Result<Rational> {
    check_index(n, n, l)?;
    let top = n - l - 1;
    let betas: Vec<Rational> = (1..=top).map(|r| x_beta(n, r, params)).collect();
    let mut s = Rational::zero();
    for v in 0..=top {
        let len = (top - v) as usize;
        s += x_alpha(n, v, params) * bell_gamma(&betas[..len]);
    }
    Ok(s)
}

/// Closed form of `c_{n,h,h-1}`.
pub fn c_closed_l_top(n: u32, h: u32, params: &LimitParams) -> Result<Rational> {
    check_index(n, h, h - 1)?;
    let (ni, hi) = (i64::from(n), i64::from(h));
    let theta = params.theta();
    let inv_lambda = params.lambda().recip();
    let mut s = Rational::zero();
    for v in 0..=(n - h) as usize {
        let vi = v as i64;
        let f21 = hyp2f1(int(-vi), int(-ni), int(ni - vi + 1), inv_lambda.clone())?;
        s += pochhammer(&int(hi - ni), v) * pochhammer(&int(-ni), v)
            / (pochhammer(&int(-2 * ni), v) * factorial(v as u64) * powi(theta, vi))
            * f21;
    }
    Ok(powi(&params.one_minus_theta(), hi)
        * powi(&params.lt(), ni - 1)
        * powi(&-theta, ni - hi)
        * choose((2 * n) as usize, (n - h) as usize)
        * s)
}

/// `A_{a,b}` of the general double recurrence.
pub fn a_general(n: u32, h: u32, a: u32, b: u32, params: &LimitParams) -> Rational {
    let (n, h, a, b) = (n as usize, h as usize, a as usize, b as usize);
    let lt = params.lt();
    let omt = params.one_minus_theta();
    let theta = params.theta();
    let mut s = Rational::zero();
    for i in 0..=b.min(n) {
        if b - i > n {
            continue;
        }
        let mut inner = Rational::zero();
        for i1 in 0..=2usize.min(a) {
            for i2 in 0..=h.min(a - i1) {
                for i3 in 0..=h.min(a - i1 - i2) {
                    for i4 in 0..=(n - i).min(a - i1 - i2 - i3) {
                        let i5 = a - i1 - i2 - i3 - i4;
                        if i5 > n - (b - i) {
                            continue;
                        }
                        inner += choose(2, i1)
                            * choose(h, i2)
                            * choose(h, i3)
                            * choose(n - i, i4)
                            * choose(n - (b - i), i5)
                            * powi(&int(2), i1 as i64)
                            * powi(&omt, (h - i3) as i64)
                            * powi(&lt, n as i64 - 1 - i as i64 - i4 as i64)
                            * powi(theta, (n - h) as i64 - (b - i) as i64 - i5 as i64);
                    }
                }
            }
        }
        s += choose(n, i) * choose(n, b - i) * inner;
    }
    sign(a as i64) * s
}

/// `B_{a,b}` of the general double recurrence.
pub fn b_general(n: u32, h: u32, a: u32, b: u32, params: &LimitParams) -> Rational {
    let (n, h, a, b) = (n as usize, h as usize, a as usize, b as usize);
    if b > n + h + 1 {
        return Rational::zero();
    }
    let mut s = Rational::zero();
    for j1 in 0..=1usize.min(a) {
        for j2 in 0..=h.min(a - j1) {
            let j3 = a - j1 - j2;
            s += choose(1, j1)
                * choose(h, j2)
                * choose(n + h + 1 - b, j3)
                * powi(&int(2), (j1 + j3) as i64)
                * powi(params.theta(), -(j2 as i64));
        }
    }
    sign(a as i64) * choose(n + h + 1, b) * s
}

/// Solves the double recurrence for `Z_{a,b}`, `0 <= a <= h-1`,
/// `0 <= b <= n-h`, by increasing `a + b`. `c_{n,h,l} = Z_{h-l-1, n-h}`.
pub fn z_recurrence(n: u32, h: u32, params: &LimitParams) -> Result<BTreeMap<(u32, u32), Rational>> {
    check_index(n, h, 0)?;
    let b00 = b_general(n, h, 0, 0, params);
    if !b00.is_one() {
        return Err(Error::InvalidParams(format!("B_00 = {b00}, expected 1")));
    }
    let mut bcache: BTreeMap<(u32, u32), Rational> = BTreeMap::new();
    let mut z: BTreeMap<(u32, u32), Rational> = BTreeMap::new();
    let z00 = powi(&params.lt(), i64::from(n) - 1)
        * powi(params.theta(), i64::from(n - h))
        * powi(&params.one_minus_theta(), h.into());
    debug_assert_eq!(z00, a_general(n, h, 0, 0, params));
    z.insert((0, 0), z00);
    for total in 1..n {
        for a in 0..h.min(total + 1) {
            let b = total - a;
            if b > n - h {
                continue;
            }
            let mut val = a_general(n, h, a, b, params);
            for (&(u, v), zv) in &z {
                if u <= a && v <= b && u + v < a + b {
                    let bv = bcache
                        .entry((a - u, b - v))
                        .or_insert_with(|| b_general(n, h, a - u, b - v, params));
                    val -= zv * &*bv;
                }
            }
            z.insert((a, b), val);
        }
    }
    Ok(z)
}

/// `c_{n,h,l}` from the double recurrence.
pub fn c_recurrence(n: u32, h: u32, l: u32, params: &LimitParams) -> Result<Rational> {
    check_index(n, h, l)?;
    let z = z_recurrence(n, h, params)?;
    Ok(z[&(h - l - 1, n - h)].clone())
}

/// The `theta = 1/2` form of `A_{a,b}` with a Gauss function at `1 - lambda`.
pub fn a_theta_half(n: u32, h: u32, a: u32, b: u32, lambda: &Rational) -> Result<Rational> {
    let (ni, hi, ai, bi) = (i64::from(n), i64::from(h), i64::from(a), i64::from(b));
    let two = int(2);
    let one_minus = Rational::one() - lambda;
    let mut s = Rational::zero();
    for i2 in 0..=ai {
        let mut inner = Rational::zero();
        for i in 0..=bi {
            let f = hyp2f1(int(i2 - ai), int(bi - i - ni - hi - 2), int(bi - 2 * ni - hi - 2), one_minus.clone())?;
            inner += choose(n as usize, i as usize)
                * choose(n as usize, (bi - i).max(0) as usize)
                * powi(lambda, -i)
                * f;
        }
        s += powi(&(&two / lambda), ai - i2)
            * choose(h as usize, i2 as usize)
            * choose((2 * ni + hi + 2 - bi) as usize, (ai - i2) as usize)
            * inner;
    }
    Ok(sign(ai) * powi(lambda, ni - 1) * powi(&two, bi) / powi(&two, 2 * ni - 1) * s)
}

/// Both sides of the explicit `theta = 1/2` linear relation between the
/// `Z_{u,v}` and `A_{a,b}`.
pub fn theta_half_relation_sides(
    n: u32,
    h: u32,
    a: u32,
    b: u32,
    lambda: &Rational,
    z: &BTreeMap<(u32, u32), Rational>,
) -> Result<(Rational, Rational)> {
    let (ni, hi, ai, bi) = (i64::from(n), i64::from(h), i64::from(a), i64::from(b));
    let mut lhs = Rational::zero();
    for u in 0..=a {
        for v in 0..=b {
            let zuv = z.get(&(u, v)).ok_or(Error::MissingCoefficient { n, h, l: u })?;
            let (ui, vi) = (i64::from(u), i64::from(v));
            lhs += powi(&int(2), ai - ui)
                * sign(ui)
                * choose((ni + hi + 1) as usize, (bi - vi) as usize)
                * choose((ni + 2 * hi + 2 - bi + vi) as usize, (ai - ui) as usize)
                * zuv;
        }
    }
    let rhs = sign(ai) * a_theta_half(n, h, a, b, lambda)?;
    Ok((lhs, rhs))
}

/// Checks the `theta = 1/2` relation at `(a, b)` against the solution of
/// the double recurrence.
pub fn theta_half_relation_check(n: u32, h: u32, a: u32, b: u32, lambda: &Rational) -> Result<bool> {
    let params = LimitParams::new(lambda.clone(), crate::exact::half())?;
    let z = z_recurrence(n, h, &params)?;
    let (lhs, rhs) = theta_half_relation_sides(n, h, a, b, lambda, &z)?;
    Ok(lhs == rhs)
}

/// `sum_j (-1)^j C(h-1, j) j^l sum_k (-1)^(n-h-k) C(n-h, k) q(j, k)`.
///
/// Evaluated monomial by monomial with the alternating power sums.
pub fn alternating_double_sum(q: &BivarPoly, n: u32, h: u32, l: u32) -> Rational {
    let mut s = Rational::zero();
    for (&(a, b), c) in q.terms() {
        let js = alternating_power_sum(a + l, h - 1);
        if js.is_zero() {
            continue;
        }
        let ks = sign(i64::from(n - h)) * alternating_power_sum(b, n - h);
        s += c * js * ks;
    }
    s
}

/// Value the alternating double sum must take on `q_{n-l-1-i}`: zero unless
/// `i = 0` and `l <= h - 1`, where only `c_{n,h,l} j^(h-l-1) k^(n-h)`
/// survives.
pub fn surviving_value(n: u32, h: u32, l: u32, i: u32, c: &Rational) -> Rational {
    if i == 0 && l < h {
        sign(i64::from(h) - 1) * factorial(u64::from(h - 1)) * factorial(u64::from(n - h)) * c
    } else {
        Rational::zero()
    }
}

/// One violation of the degree bounds or of the cancellation property.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CancellationFailure {
    pub n: u32,
    pub h: u32,
    pub l: u32,
    pub i: u32,
    pub expected: String,
    pub got: String,
}

/// Checks, for every `l < n` and `0 <= i <= n-l-1`, that the alternating
/// double sum of `q_{n-l-1-i}` equals [`surviving_value`]. Returns the
/// number of sums checked.
pub fn cancellation_check(n: u32, h: u32, params: &LimitParams) -> Result<core::result::Result<usize, CancellationFailure>> {
    let q = quotient_coeffs(n, h, params)?;
    let mut count = 0;
    for l in 0..n {
        let c = if l < h { extract_c(&q[(n - l - 1) as usize], n, h, l) } else { Rational::zero() };
        for i in 0..n - l {
            let got = alternating_double_sum(&q[(n - l - 1 - i) as usize], n, h, l);
            let expected = surviving_value(n, h, l, i, &c);
            count += 1;
            if got != expected {
                return Ok(Err(CancellationFailure {
                    n,
                    h,
                    l,
                    i,
                    expected: expected.to_string(),
                    got: got.to_string(),
                }));
            }
        }
    }
    Ok(Ok(count))
}

/// Degree bounds on `q_i`: at most `i` in each of `j` and `k`, and the
/// coefficient of `j^s` has `k`-degree at most `i - s`.
pub fn degree_bounds_hold(q: &[BivarPoly]) -> bool {
    q.iter().enumerate().all(|(i, qi)| {
        let i = i as u32;
        qi.terms().all(|(&(a, b), _)| a <= i && b <= i && a + b <= i)
    })
}

/// `c_{n,h,l}` along the given route.
pub fn c_by_route(route: Route, n: u32, h: u32, l: u32, params: &LimitParams) -> Result<Rational> {
    if !route.applies(n, h, l) {
        return Err(Error::InvalidParams(format!("route {route} does not cover (n,h,l) = ({n},{h},{l})")));
    }
    match route {
        Route::Division => c_division(n, h, l, params),
        Route::Symmetric => c_symmetric(n, h, l, params),
        Route::Recurrence => c_recurrence(n, h, l, params),
        Route::Diagonal => Ok(x_recurrence(n, params)?[(n - l - 1) as usize].clone()),
        Route::Toeplitz => c_toeplitz(n, l, params),
        Route::ClosedForm => c_closed_l_top(n, h, params),
    }
}

/// All `c_{n,h,l}` with `l < h` for one `(n, h)` along a route, sharing the
/// per-`(n, h)` work where the route allows it. Indices the route does not
/// cover are skipped.
pub fn coefficients_for(route: Route, n: u32, h: u32, params: &LimitParams) -> Result<Vec<(u32, Rational)>> {
    check_index(n, h, 0)?;
    let ls = (0..h).filter(|&l| route.applies(n, h, l));
    match route {
        Route::Division => {
            let q = quotient_coeffs(n, h, params)?;
            Ok(ls.map(|l| (l, extract_c(&q[(n - l - 1) as usize], n, h, l))).collect())
        }
        Route::Recurrence => {
            let z = z_recurrence(n, h, params)?;
            Ok(ls.map(|l| (l, z[&(h - l - 1, n - h)].clone())).collect())
        }
        Route::Diagonal => {
            let x = x_recurrence(n, params)?;
            Ok(ls.map(|l| (l, x[(n - l - 1) as usize].clone())).collect())
        }
        _ => ls.map(|l| Ok((l, c_by_route(route, n, h, l, params)?))).collect(),
    }
}

/// Table of every `c_{n,h,l}` with `n <= n_max` along a route.
pub fn build_table(n_max: u32, params: &LimitParams, route: Route) -> Result<CoeffTable> {
    let mut table = CoeffTable::new(params.clone());
    for n in 1..=n_max {
        for h in 1..=n {
            for (l, c) in coefficients_for(route, n, h, params)? {
                table.insert(n, h, l, c, route)?;
            }
        }
    }
    Ok(table)
}

/// `(-1)^(h-l-1) C(h, h-l-1) C(2n, n-h) / 2^(2n-1)`, the value at
/// `lambda = 1, theta = 1/2`.
pub fn arcsine_coefficient(n: u32, h: u32, l: u32) -> Rational {
    let (n, h, l) = (n as usize, h as usize, l as usize);
    sign((h - l - 1) as i64) * choose(h, h - l - 1) * choose(2 * n, n - h) / powi(&int(2), 2 * n as i64 - 1)
}

/// `(1-theta)^n theta^(n-1) C(2n, n-h)`, the value of `c_{n,h,h-1}` at
/// `lambda = 1`.
pub fn lambda_one_top_coefficient(n: u32, h: u32, theta: &Rational) -> Rational {
    powi(&(Rational::one() - theta), n.into())
        * powi(theta, i64::from(n) - 1)
        * choose((2 * n) as usize, (n - h) as usize)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{half, rat};

    fn params(l: (i64, i64), t: (i64, i64)) -> LimitParams {
        LimitParams::new(rat(l.0, l.1), rat(t.0, t.1)).unwrap()
    }

    #[test]
    fn params_validation() {
        assert!(LimitParams::new(int(0), half()).is_err());
        assert!(LimitParams::new(int(2), half()).is_err());
        assert!(LimitParams::new(int(1), int(1)).is_err());
        assert!(LimitParams::new(rat(1, 3), rat(2, 3)).is_ok());
    }

    #[test]
    fn build_examples() {
        let p = LimitParams::arcsine();
        let big_p = build_p(1, 1, &p);
        assert_eq!(big_p.degree(), Some(6));
        assert_eq!(big_p.leading().unwrap().as_constant(), Some(leading_p(1, 1, &p)));
        let big_d = build_d(1, 1, 0, &p);
        // n + 2h + l + 3 = 6
        assert_eq!(big_d.degree(), Some(6));
        assert_eq!(big_d.leading().unwrap().as_constant(), Some(leading_d(1, &p)));
        let q = params((1, 2), (1, 3));
        assert_eq!(build_p(3, 2, &q).leading().unwrap().as_constant(), Some(leading_p(3, 2, &q)));
        assert_eq!(build_d(3, 2, 1, &q).degree(), Some(3 + 4 + 1 + 3));
    }

    #[test]
    fn division_round_trip() {
        let p = LimitParams::arcsine();
        let big_p = build_p(2, 1, &p);
        let big_d = build_d(2, 1, 0, &p);
        let (q, r) = long_divide(&big_p, &big_d).unwrap();
        assert!(r.degree().is_none_or(|dr| dr < big_d.degree().unwrap()));
        assert_eq!(&(&big_d * &q) + &r, big_p);
    }

    #[test]
    fn truncated_division_matches_full() {
        let p = params((2, 3), (3, 4));
        for n in 1..=3 {
            for h in 1..=n {
                assert_eq!(quotient_coeffs(n, h, &p).unwrap(), quotient_coeffs_full(n, h, 0, &p).unwrap());
            }
        }
    }

    #[test]
    fn q0_is_scalar() {
        let p = params((1, 2), (1, 3));
        for (n, h) in [(1, 1), (3, 2), (4, 1)] {
            let q = quotient_coeffs(n, h, &p).unwrap();
            let expected = powi(&p.lt(), i64::from(n) - 1)
                * powi(p.theta(), i64::from(n - h))
                * powi(&p.one_minus_theta(), h.into());
            assert_eq!(q[0].as_constant(), Some(expected));
            assert!(degree_bounds_hold(&q));
        }
    }

    #[test]
    fn c_division_examples() {
        let t = rat(2, 7);
        let p = LimitParams::new(int(1), t.clone()).unwrap();
        assert_eq!(c_division(1, 1, 0, &p).unwrap(), int(1) - t);
        let a = LimitParams::arcsine();
        assert_eq!(c_division(2, 1, 0, &a).unwrap(), half());
        assert_eq!(c_division(3, 3, 1, &a).unwrap(), rat(-3, 32));
    }

    #[test]
    fn root_list_examples() {
        let p = params((1, 2), (1, 3));
        let r = root_lists(3, 2, 1, &p);
        assert_eq!(r.y.len(), 2 * 3 + 2 * 2 + 2);
        assert_eq!(r.z.len(), 3 + 2 * 2 + 1 + 3);
        assert_eq!(r.y[0], crate::polyring::affine(-3, 2, 0));
        assert!(r.z[..2].iter().all(|z| *z == AffineRoot::zero()));
    }

    #[test]
    fn products_of_roots_rebuild_p_and_d() {
        let p = params((1, 2), (1, 3));
        let (n, h, l) = (2, 2, 1);
        let r = root_lists(n, h, l, &p);
        let prod = |roots: &[AffineRoot], lead: Rational| {
            roots.iter().fold(DPoly::constant(BivarPoly::constant(lead)), |acc, y| {
                &acc * &DPoly::linear(int(1), -&y.to_poly())
            })
        };
        assert_eq!(prod(&r.y, leading_p(n, h, &p)), build_p(n, h, &p));
        assert_eq!(prod(&r.z, leading_d(h, &p)), build_d(n, h, l, &p));
    }

    #[test]
    fn table_merge_detects_disagreement() {
        let p = LimitParams::arcsine();
        let mut t = CoeffTable::new(p.clone());
        t.insert(1, 1, 0, half(), Route::Division).unwrap();
        t.insert(1, 1, 0, half(), Route::Symmetric).unwrap();
        assert_eq!(t.entry(1, 1, 0).unwrap().route, Route::Division);
        let err = t.insert(1, 1, 0, int(1), Route::Recurrence).unwrap_err();
        assert!(matches!(err, Error::RouteDisagreement { n: 1, h: 1, l: 0, .. }));
        let mut other = CoeffTable::new(params((1, 2), (1, 2)));
        other.insert(2, 1, 0, half(), Route::Division).unwrap();
        assert!(t.merge(&other).is_err());
    }

    #[test]
    fn route_parsing() {
        for r in Route::ALL {
            assert_eq!(r.as_str().parse::<Route>().unwrap(), r);
        }
        assert!("nope".parse::<Route>().is_err());
        assert!(!Route::Diagonal.applies(3, 2, 0));
        assert!(Route::ClosedForm.applies(3, 2, 1));
        assert!(!Route::ClosedForm.applies(3, 2, 0));
    }

    #[test]
    fn closed_form_diagonal_case() {
        let p = params((2, 5), (3, 7));
        let expected = powi(&p.one_minus_theta(), 4) * powi(&p.lt(), 3);
        assert_eq!(c_closed_l_top(4, 4, &p).unwrap(), expected);
    }

    #[test]
    fn x0_and_toeplitz_base() {
        let p = params((1, 3), (2, 3));
        let x = x_recurrence(1, &p).unwrap();
        assert_eq!(x, vec![rat(1, 3)]);
        assert_eq!(c_toeplitz(1, 0, &p).unwrap(), rat(1, 3));
        let x4 = x_recurrence(4, &p).unwrap();
        assert_eq!(c_toeplitz(4, 3, &p).unwrap(), x4[0]);
    }

    #[test]
    fn z_recurrence_base() {
        let p = params((3, 4), (1, 5));
        let z = z_recurrence(3, 2, &p).unwrap();
        assert_eq!(z[&(0, 0)], powi(&p.lt(), 2) * p.theta() * powi(&p.one_minus_theta(), 2));
        assert!(b_general(3, 2, 0, 0, &p).is_one());
    }

    #[test]
    fn a_theta_half_examples() {
        let a = LimitParams::arcsine();
        assert_eq!(a_theta_half(3, 2, 0, 0, &int(1)).unwrap(), a_general(3, 2, 0, 0, &a));
        let p = LimitParams::new(rat(1, 2), half()).unwrap();
        assert_eq!(a_theta_half(4, 2, 1, 1, &rat(1, 2)).unwrap(), a_general(4, 2, 1, 1, &p));
        assert!(theta_half_relation_check(3, 2, 0, 0, &rat(2, 3)).unwrap());
    }

    #[test]
    fn cancellation_small() {
        let p = params((2, 3), (1, 4));
        for (n, h) in [(1, 1), (3, 1), (3, 2), (3, 3)] {
            assert!(cancellation_check(n, h, &p).unwrap().is_ok());
        }
    }

    #[test]
    fn goulden_greene_route_small() {
        let p = params((1, 2), (1, 3));
        for (n, h, l) in [(2, 1, 0), (3, 2, 0), (3, 3, 1)] {
            assert_eq!(q_goulden_greene(n, h, l, &p).unwrap(), q_symmetric(n, h, l, &p).unwrap());
        }
    }
}
