//! Polynomials in the formal variables `(j, k)` over the rationals, and
//! polynomials in `d` over that ring.
//!
//! [`BivarPoly`] is sparse: after the cancellations the `(j, k)` support is
//! thin. [`DPoly`] is dense in `d` since its degree stays small. Elementary
//! and complete homogeneous symmetric polynomials are evaluated on lists of
//! [`AffineRoot`]s, which are affine-linear in `(j, k)`.

use alloc::collections::btree_map::{BTreeMap, Entry};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use crate::exact::{int, Rational};
use crate::{Error, Result};

/// Sparse polynomial in `(j, k)`: `(deg_j, deg_k) -> coefficient`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BivarPoly {
    terms: BTreeMap<(u32, u32), Rational>,
}

impl BivarPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        Self::monomial(c, 0, 0)
    }

    pub fn monomial(c: Rational, j_deg: u32, k_deg: u32) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert((j_deg, k_deg), c);
        }
        Self { terms }
    }

    pub fn j() -> Self {
        Self::monomial(Rational::one(), 1, 0)
    }

    pub fn k() -> Self {
        Self::monomial(Rational::one(), 0, 1)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The scalar value when the polynomial has no `j` or `k` dependence.
    pub fn as_constant(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => self.terms.get(&(0, 0)).cloned(),
            _ => None,
        }
    }

    pub fn coeff(&self, j_deg: u32, k_deg: u32) -> Rational {
        self.terms.get(&(j_deg, k_deg)).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(u32, u32), &Rational)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn deg_j(&self) -> Option<u32> {
        self.terms.keys().map(|&(a, _)| a).max()
    }

    pub fn deg_k(&self) -> Option<u32> {
        self.terms.keys().map(|&(_, b)| b).max()
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|&(a, b)| a + b).max()
    }

    /// Highest power of `k` multiplying `j^s`.
    pub fn k_degree_of_j_power(&self, s: u32) -> Option<u32> {
        self.terms.keys().filter(|&&(a, _)| a == s).map(|&(_, b)| b).max()
    }

    pub fn add_term(&mut self, j_deg: u32, k_deg: u32, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry((j_deg, k_deg)) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self {
            terms: self.terms.iter().map(|(&key, v)| (key, v * c)).collect(),
        }
    }

    fn add_scaled(&mut self, other: &Self, c: &Rational) {
        for (&(a, b), v) in &other.terms {
            self.add_term(a, b, v * c);
        }
    }

    pub fn eval(&self, j: &Rational, k: &Rational) -> Rational {
        self.terms
            .iter()
            .map(|(&(a, b), c)| c * crate::exact::powi(j, a.into()) * crate::exact::powi(k, b.into()))
            .sum()
    }
}

impl From<Rational> for BivarPoly {
    fn from(c: Rational) -> Self {
        Self::constant(c)
    }
}

impl<'a> Add<&'a BivarPoly> for &'a BivarPoly {
    type Output = BivarPoly;

    fn add(self, rhs: &BivarPoly) -> BivarPoly {
        let mut out = self.clone();
        out.add_scaled(rhs, &Rational::one());
        out
    }
}

impl<'a> Sub<&'a BivarPoly> for &'a BivarPoly {
    type Output = BivarPoly;

    fn sub(self, rhs: &BivarPoly) -> BivarPoly {
        let mut out = self.clone();
        out.add_scaled(rhs, &-Rational::one());
        out
    }
}

impl<'a> Mul<&'a BivarPoly> for &'a BivarPoly {
    type Output = BivarPoly;

    fn mul(self, rhs: &BivarPoly) -> BivarPoly {
        let mut out = BivarPoly::zero();
        for (&(a1, b1), c1) in &self.terms {
            for (&(a2, b2), c2) in &rhs.terms {
                out.add_term(a1 + a2, b1 + b2, c1 * c2);
            }
        }
        out
    }
}

impl Neg for &BivarPoly {
    type Output = BivarPoly;

    fn neg(self) -> BivarPoly {
        self.scale(&-Rational::one())
    }
}

impl fmt::Display for BivarPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (&(a, b), c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({c})")?;
            if a > 0 {
                write!(f, "*j^{a}")?;
            }
            if b > 0 {
                write!(f, "*k^{b}")?;
            }
        }
        Ok(())
    }
}

/// `constant + j_coeff * j + k_coeff * k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AffineRoot {
    pub constant: Rational,
    pub j_coeff: Rational,
    pub k_coeff: Rational,
}

impl AffineRoot {
    pub fn new(constant: Rational, j_coeff: Rational, k_coeff: Rational) -> Self {
        Self { constant, j_coeff, k_coeff }
    }

    pub fn constant(c: Rational) -> Self {
        Self::new(c, Rational::zero(), Rational::zero())
    }

    pub fn zero() -> Self {
        Self::constant(Rational::zero())
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Self::new(&self.constant * c, &self.j_coeff * c, &self.k_coeff * c)
    }

    pub fn to_poly(&self) -> BivarPoly {
        let mut p = BivarPoly::zero();
        p.add_term(0, 0, self.constant.clone());
        p.add_term(1, 0, self.j_coeff.clone());
        p.add_term(0, 1, self.k_coeff.clone());
        p
    }
}

/// Dense polynomial in `d`; entry `i` is the coefficient of `d^i`.
/// The zero polynomial has no entries and the last entry is never zero.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DPoly {
    coeffs: Vec<BivarPoly>,
}

impl DPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(BivarPoly::one())
    }

    pub fn constant(c: BivarPoly) -> Self {
        Self::from_coeffs(vec![c])
    }

    /// `d^power`
    pub fn d_power(power: usize) -> Self {
        let mut coeffs = vec![BivarPoly::zero(); power];
        coeffs.push(BivarPoly::one());
        Self { coeffs }
    }

    /// Builds from ascending coefficients, trimming zero leading terms.
    pub fn from_coeffs(mut coeffs: Vec<BivarPoly>) -> Self {
        while coeffs.last().is_some_and(BivarPoly::is_zero) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    /// `d_coeff * d + rest`
    pub fn linear(d_coeff: Rational, rest: BivarPoly) -> Self {
        Self::from_coeffs(vec![rest, BivarPoly::constant(d_coeff)])
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&BivarPoly> {
        self.coeffs.last()
    }

    pub fn coeff(&self, i: usize) -> BivarPoly {
        self.coeffs.get(i).cloned().unwrap_or_default()
    }

    pub fn coeffs(&self) -> &[BivarPoly] {
        &self.coeffs
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Self::from_coeffs(self.coeffs.iter().map(|p| p.scale(c)).collect())
    }

    pub fn scale_poly(&self, c: &BivarPoly) -> Self {
        Self::from_coeffs(self.coeffs.iter().map(|p| p * c).collect())
    }

    /// Multiplies by `d^power`.
    pub fn shift(&self, power: usize) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut coeffs = vec![BivarPoly::zero(); power];
        coeffs.extend(self.coeffs.iter().cloned());
        Self { coeffs }
    }

    /// Drops the coefficients of `d^0 .. d^(power-1)` and divides by `d^power`.
    pub fn truncate_low(&self, power: usize) -> Self {
        Self::from_coeffs(self.coeffs.iter().skip(power).cloned().collect())
    }

    fn combine(&self, rhs: &Self, c: &Rational) -> Self {
        let len = self.coeffs.len().max(rhs.coeffs.len());
        let coeffs = (0..len)
            .map(|i| {
                let mut p = self.coeff(i);
                if let Some(r) = rhs.coeffs.get(i) {
                    p.add_scaled(r, c);
                }
                p
            })
            .collect();
        Self::from_coeffs(coeffs)
    }
}

impl<'a> Add<&'a DPoly> for &'a DPoly {
    type Output = DPoly;

    fn add(self, rhs: &DPoly) -> DPoly {
        self.combine(rhs, &Rational::one())
    }
}

impl<'a> Sub<&'a DPoly> for &'a DPoly {
    type Output = DPoly;

    fn sub(self, rhs: &DPoly) -> DPoly {
        self.combine(rhs, &-Rational::one())
    }
}

impl<'a> Mul<&'a DPoly> for &'a DPoly {
    type Output = DPoly;

    fn mul(self, rhs: &DPoly) -> DPoly {
        if self.is_zero() || rhs.is_zero() {
            return DPoly::zero();
        }
        let mut coeffs = vec![BivarPoly::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (k, b) in rhs.coeffs.iter().enumerate() {
                let prod = a * b;
                coeffs[i + k].add_scaled(&prod, &Rational::one());
            }
        }
        DPoly::from_coeffs(coeffs)
    }
}

/// Long division in `d`: returns `(Q, R)` with `P = D Q + R` and
/// `deg R < deg D`.
///
/// The divisor must have a scalar leading coefficient so that every step
/// stays inside the polynomial ring in `(j, k)`.
pub fn long_divide(dividend: &DPoly, divisor: &DPoly) -> Result<(DPoly, DPoly)> {
    let lead = divisor
        .leading()
        .and_then(BivarPoly::as_constant)
        .filter(|c| !c.is_zero())
        .ok_or(Error::NonScalarLeadingCoefficient)?;
    let dd = divisor.degree().unwrap_or(0);
    let pd = dividend.degree().ok_or(Error::DegreeError { dividend: 0, divisor: dd })?;
    if pd < dd {
        return Err(Error::DegreeError { dividend: pd, divisor: dd });
    }
    let inv_lead = lead.recip();
    let mut rem = dividend.coeffs.clone();
    let mut quot = vec![BivarPoly::zero(); pd - dd + 1];
    for qi in (0..=pd - dd).rev() {
        let top = rem[qi + dd].scale(&inv_lead);
        if top.is_zero() {
            continue;
        }
        for (i, b) in divisor.coeffs.iter().enumerate() {
            if b.is_zero() {
                continue;
            }
            let prod = &top * b;
            rem[qi + i].add_scaled(&prod, &-Rational::one());
        }
        debug_assert!(rem[qi + dd].is_zero());
        quot[qi] = top;
    }
    rem.truncate(dd);
    Ok((DPoly::from_coeffs(quot), DPoly::from_coeffs(rem)))
}

/// `e_0, ..., e_max` of the roots (entries past the number of roots are 0).
pub fn elementary_symmetric_upto(roots: &[AffineRoot], max: usize) -> Vec<BivarPoly> {
    let mut e = vec![BivarPoly::zero(); max + 1];
    e[0] = BivarPoly::one();
    for (count, root) in roots.iter().enumerate() {
        let x = root.to_poly();
        for i in (1..=max.min(count + 1)).rev() {
            let add = &e[i - 1] * &x;
            e[i].add_scaled(&add, &Rational::one());
        }
    }
    e
}

pub fn elementary_symmetric(roots: &[AffineRoot], i: usize) -> Result<BivarPoly> {
    if i > roots.len() {
        return Err(Error::IndexError { index: i, len: roots.len() });
    }
    Ok(elementary_symmetric_upto(roots, i).pop().unwrap_or_default())
}

/// `h_0, ..., h_max` via `h_v = sum_{i=1}^{v} (-1)^(i-1) e_i h_(v-i)`.
pub fn complete_homogeneous_upto(roots: &[AffineRoot], max: usize) -> Vec<BivarPoly> {
    let e = elementary_symmetric_upto(roots, max);
    let mut h: Vec<BivarPoly> = Vec::with_capacity(max + 1);
    h.push(BivarPoly::one());
    for v in 1..=max {
        let mut acc = BivarPoly::zero();
        for i in 1..=v {
            if e[i].is_zero() {
                continue;
            }
            let sign = if i % 2 == 1 { Rational::one() } else { -Rational::one() };
            acc.add_scaled(&(&e[i] * &h[v - i]), &sign);
        }
        h.push(acc);
    }
    h
}

pub fn complete_homogeneous(roots: &[AffineRoot], v: usize) -> BivarPoly {
    complete_homogeneous_upto(roots, v).pop().unwrap_or_default()
}

/// `sum_{1 <= tau_1 <= ... <= tau_C <= A} prod_i (y_{tau_i + i - 1} - z_{tau_i})`
/// with `A = y.len()` and both lists padded with zero roots.
///
/// Has `C(A + C - 1, C)` terms; meant as an oracle for small `C`.
pub fn goulden_greene_sum(y: &[AffineRoot], z: &[AffineRoot], c: usize) -> BivarPoly {
    let a = y.len();
    let zero = AffineRoot::zero();
    let get = |list: &'_ [AffineRoot], i: usize| -> BivarPoly {
        list.get(i - 1).unwrap_or(&zero).to_poly()
    };
    // diff[(tau, i)] = y_{tau+i-1} - z_tau, for 1-based tau and i
    let mut total = BivarPoly::zero();
    let mut stack: Vec<(usize, usize, BivarPoly)> = vec![(1, 1, BivarPoly::one())];
    if c == 0 {
        return BivarPoly::one();
    }
    while let Some((i, min_tau, acc)) = stack.pop() {
        for tau in min_tau..=a {
            let factor = &get(y, tau + i - 1) - &get(z, tau);
            let next = &acc * &factor;
            if i == c {
                total.add_scaled(&next, &Rational::one());
            } else {
                stack.push((i + 1, tau, next));
            }
        }
    }
    total
}

/// Shorthand used by tests and the root-list builders.
pub fn affine(constant: i64, j_coeff: i64, k_coeff: i64) -> AffineRoot {
    AffineRoot::new(int(constant), int(j_coeff), int(k_coeff))
}
