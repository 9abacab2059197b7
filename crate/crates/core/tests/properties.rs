//! Randomized invariants of the exact kernels, the polynomial ring and the
//! hypergeometric evaluator.

use jacobi_core::exact::*;
use jacobi_core::hypergeo::{chu_reduction_pair, gauss_2f1_unity, HypSeries};
use jacobi_core::polyring::*;
use jacobi_core::{Error, Rational};
use num_traits::{One, Zero};
use proptest::prelude::*;

fn small_rat() -> impl Strategy<Value = Rational> {
    (-40i64..=40, 1i64..=6).prop_map(|(a, b)| rat(a, b))
}

fn root() -> impl Strategy<Value = AffineRoot> {
    (small_rat(), -3i64..=3, -3i64..=3).prop_map(|(c, j, k)| AffineRoot::new(c, int(j), int(k)))
}

fn const_root() -> impl Strategy<Value = AffineRoot> {
    small_rat().prop_map(AffineRoot::constant)
}

fn bivar() -> impl Strategy<Value = BivarPoly> {
    prop::collection::vec((0u32..3, 0u32..3, small_rat()), 0..5).prop_map(|terms| {
        let mut p = BivarPoly::zero();
        for (a, b, c) in terms {
            p.add_term(a, b, c);
        }
        p
    })
}

fn dpoly(max_len: usize) -> impl Strategy<Value = DPoly> {
    prop::collection::vec(bivar(), 1..max_len).prop_map(DPoly::from_coeffs)
}

proptest! {
    #[test]
    fn pochhammer_splits(a in small_rat(), m in 0usize..6, n in 0usize..6) {
        prop_assert_eq!(pochhammer(&a, m + n), pochhammer(&a, m) * pochhammer(&(&a + int(m as i64)), n));
    }

    #[test]
    fn gamma_ratio_chains(a in small_rat(), u in -5i64..6, v in -5i64..6) {
        let whole = gamma_ratio(&a, u + v);
        let first = gamma_ratio(&a, u);
        let second = gamma_ratio(&(&a + int(u)), v);
        if let (Ok(w), Ok(f), Ok(s)) = (whole, first, second) {
            prop_assert_eq!(w, f * s);
        }
    }

    #[test]
    fn bell_inverts_toeplitz(betas in prop::collection::vec(small_rat(), 0..7)) {
        let a = betas.len();
        let mut full = vec![int(1)];
        full.extend(betas.iter().cloned());
        let mut s = Rational::zero();
        for v in 0..=a {
            s += &full[a - v] * bell_gamma(&betas[..v]);
        }
        prop_assert_eq!(s, if a == 0 { int(1) } else { int(0) });
    }

    #[test]
    fn division_round_trip(p in dpoly(7), mut d in dpoly(4), lead in small_rat()) {
        prop_assume!(!lead.is_zero());
        let deg = d.degree().unwrap_or(0);
        let mut coeffs = d.coeffs().to_vec();
        coeffs.resize(deg + 1, BivarPoly::zero());
        coeffs[deg] = BivarPoly::constant(lead);
        d = DPoly::from_coeffs(coeffs);
        match long_divide(&p, &d) {
            Ok((q, r)) => {
                prop_assert_eq!(&(&d * &q) + &r, p.clone());
                prop_assert!(r.degree().is_none_or(|dr| dr < d.degree().unwrap()));
            }
            Err(Error::DegreeError { .. }) => prop_assert!(p.degree().is_none_or(|dp| dp < d.degree().unwrap())),
            Err(e) => prop_assert!(false, "unexpected {:?}", e),
        }
    }

    #[test]
    fn generating_series_identity(roots in prop::collection::vec(const_root(), 0..8), big_v in 1usize..8) {
        let e = elementary_symmetric_upto(&roots, big_v);
        let h = complete_homogeneous_upto(&roots, big_v);
        let mut s = BivarPoly::zero();
        for v in 0..=big_v {
            let term = &e[v] * &h[big_v - v];
            s = if v % 2 == 0 { &s + &term } else { &s - &term };
        }
        prop_assert!(s.is_zero());
    }

    #[test]
    fn symmetric_functions_on_affine_roots(roots in prop::collection::vec(root(), 0..5), jv in small_rat(), kv in small_rat()) {
        // evaluating before or after expansion agrees
        let vals: Vec<AffineRoot> = roots
            .iter()
            .map(|r| AffineRoot::constant(r.to_poly().eval(&jv, &kv)))
            .collect();
        for i in 0..=roots.len() {
            let sym = elementary_symmetric(&roots, i).unwrap().eval(&jv, &kv);
            prop_assert_eq!(sym, elementary_symmetric(&vals, i).unwrap().as_constant().unwrap());
        }
        for v in 0..4 {
            let sym = complete_homogeneous(&roots, v).eval(&jv, &kv);
            prop_assert_eq!(sym, complete_homogeneous(&vals, v).as_constant().unwrap());
        }
    }

    #[test]
    fn homogeneity(roots in prop::collection::vec(const_root(), 0..6), alpha in small_rat(), i in 0usize..6) {
        let scaled: Vec<AffineRoot> = roots.iter().map(|r| r.scale(&alpha)).collect();
        let factor = BivarPoly::constant(powi(&alpha, i as i64));
        if i <= roots.len() {
            prop_assert_eq!(
                elementary_symmetric(&scaled, i).unwrap(),
                &elementary_symmetric(&roots, i).unwrap() * &factor
            );
        }
        prop_assert_eq!(complete_homogeneous(&scaled, i), &complete_homogeneous(&roots, i) * &factor);
    }

    #[test]
    fn goulden_greene_expansion(
        y in prop::collection::vec(const_root(), 1..7),
        zlen in 0usize..7,
        zs in prop::collection::vec(const_root(), 6),
        c in 0usize..5,
    ) {
        let z: Vec<AffineRoot> = zs.into_iter().take(zlen.min(y.len())).collect();
        let neg: Vec<AffineRoot> = z.iter().map(|r| r.scale(&-Rational::one())).collect();
        let e = elementary_symmetric_upto(&y, c);
        let h = complete_homogeneous_upto(&neg, c);
        let mut expected = BivarPoly::zero();
        for v in 0..=c {
            expected = &expected + &(&h[v] * &e[c - v]);
        }
        prop_assert_eq!(goulden_greene_sum(&y, &z, c), expected);
    }

    #[test]
    fn gauss_matches_series(n in 0usize..9, b in small_rat(), c in small_rat()) {
        let s = HypSeries::new(vec![int(-(n as i64)), b.clone()], vec![c.clone()], int(1));
        if let (Ok(closed), Ok(series)) = (gauss_2f1_unity(n, &b, &c), s.evaluate()) {
            prop_assert_eq!(closed, series);
        }
    }

    #[test]
    fn chu_reduction_holds(n in 0usize..7, a in small_rat(), c in small_rat(), e in small_rat()) {
        if let Ok(pair) = chu_reduction_pair(n, &a, &c, &e) {
            prop_assert!(pair.holds(), "{} != {}", pair.lhs, pair.rhs);
        }
    }
}

#[test]
fn alternating_power_sum_brute_force() {
    for a in 0..=12u32 {
        for b in 0..=12u32 {
            let mut s = Rational::zero();
            for j in 0..=b {
                let term = choose(b as usize, j as usize) * powi(&int(j.into()), a.into());
                s += sign(j.into()) * term;
            }
            assert_eq!(alternating_power_sum(a, b), s);
            if a < b {
                assert!(s.is_zero());
            }
            if a == b {
                assert_eq!(s, sign(a.into()) * factorial(a.into()));
            }
        }
    }
}

#[test]
fn laguerre_three_term_recurrence() {
    // (k+1) L_{k+1} = (2k + 2 - x) L_k - (k + 1) L_{k-1} at index one
    let poly = |k: usize| laguerre_1_coeffs(k);
    for k in 1..10usize {
        let (prev, cur, next) = (poly(k - 1), poly(k), poly(k + 1));
        for (i, next_i) in next.iter().enumerate() {
            let get = |v: &Vec<Rational>, i: usize| v.get(i).cloned().unwrap_or_else(Rational::zero);
            let shifted = if i == 0 { Rational::zero() } else { get(&cur, i - 1) };
            let rhs = int(2 * k as i64 + 2) * get(&cur, i) - shifted - int(k as i64 + 1) * get(&prev, i);
            assert_eq!(int(k as i64 + 1) * next_i, rhs, "k={k} i={i}");
        }
    }
}
