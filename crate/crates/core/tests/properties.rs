mod common;

use std::collections::BTreeMap;

use common::{JordanCell, Steplike};
use dirac_gbdt::canned::Example;
use dirac_gbdt::gbdt;
use dirac_gbdt::matlin::{c64, mat_exp, principal_sqrt, solve_sylvester, CMatrix};
use dirac_gbdt::weyl::lft_realize;
use proptest::prelude::*;

fn cmatrix(n: usize, m: usize, scale: f64) -> impl Strategy<Value = CMatrix> {
    prop::collection::vec((-scale..scale, -scale..scale), n * m)
        .prop_map(move |v| CMatrix::from_fn(n, m, |i, k| c64(v[i * m + k].0, v[i * m + k].1)))
}

fn square(scale: f64) -> impl Strategy<Value = CMatrix> {
    (1usize..=4).prop_flat_map(move |n| cmatrix(n, n, scale))
}

fn params(overrides: &[(&str, f64)]) -> BTreeMap<String, f64> {
    overrides.iter().map(|(k, v)| (k.to_string(), *v)).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn exp_of_negation_is_inverse(m in square(2.0)) {
        let n = m.nrows();
        let p = mat_exp(&m).unwrap() * mat_exp(&(-&m)).unwrap();
        let scale = mat_exp(&m).unwrap().norm() * mat_exp(&(-&m)).unwrap().norm();
        prop_assert!((p - CMatrix::identity(n, n)).norm() <= 1e-12 * scale.max(1.0));
    }

    #[test]
    fn sqrt_squares_back(b in square(1.0)) {
        // eigenvalues of 4I + B stay in the open right half plane
        let n = b.nrows();
        let m = CMatrix::identity(n, n) * c64(4.0 * n as f64, 0.0) + b;
        let r = principal_sqrt(&m).unwrap();
        prop_assert!((&r * &r - &m).norm() <= 1e-11 * m.norm());
        for l in r.clone().schur().eigenvalues().unwrap().iter() {
            prop_assert!(l.re > 0.0);
        }
    }

    #[test]
    fn sylvester_residual_is_small(
        (a, b, c) in (1usize..=4, 1usize..=4).prop_flat_map(|(n, m)| {
            (cmatrix(n, n, 1.0), cmatrix(m, m, 1.0), cmatrix(n, m, 1.0))
        })
    ) {
        let n = a.nrows();
        let m = b.nrows();
        // shifts keep the two spectra at least 2 apart
        let a = a + CMatrix::identity(n, n) * c64(4.0 * n as f64, 0.0);
        let b = b - CMatrix::identity(m, m) * c64(4.0 * m as f64, 0.0);
        let x = solve_sylvester(&a, &b, &c).unwrap();
        let res = (&a * &x - &x * &b - &c).norm();
        prop_assert!(res <= 1e-12 * ((a.norm() + b.norm()) * x.norm() + c.norm()));
    }

    #[test]
    fn lft_quotient_matches_realization(
        (d, c1, c2, b, a) in (1usize..=2, 1usize..=3).prop_flat_map(|(p, n)| {
            (cmatrix(p, p, 1.0), cmatrix(p, n, 1.0), cmatrix(p, n, 1.0), cmatrix(n, p, 1.0), cmatrix(n, n, 1.0))
        }),
        zr in -3.0..3.0f64,
        zi in 20.0..30.0f64,
    ) {
        // |z| far beyond every eigenvalue of A and A - B C1
        let l = lft_realize(d, c1, c2, b, a).unwrap();
        let z = c64(zr, zi);
        let q = l.quotient(z).unwrap().unwrap();
        let r = l.realized(z).unwrap();
        prop_assert!((&q - &r).norm() <= 1e-11 * q.norm().max(1.0));
    }

    #[test]
    fn steplike_matches_closed_form(
        r in 0.3..2.0f64,
        gap in 0.2..2.0f64,
        d in prop_oneof![-2.0..-0.2f64, 0.2..2.0f64],
        mu_sign in prop_oneof![Just(1.0), Just(-1.0)],
        x in -1.5..1.5f64,
    ) {
        let lambda = r + gap;
        let ov = params(&[("r", r), ("lambda", lambda), ("d", d), ("mu_sign", mu_sign)]);
        let t = Example::EeDw0.scenario(&ov).unwrap().triple().unwrap();
        let cf = Steplike::new(r, lambda, d, mu_sign);
        let (l1, l2) = gbdt::eval_pi(&t, x).unwrap();
        prop_assert!((l1[(0, 0)] - cf.lambda1(x)).norm() <= 1e-11 * cf.lambda1(x).abs().max(1.0));
        prop_assert!((l2[(0, 0)] - c64(0.0, cf.lambda2_over_i(x))).norm()
            <= 1e-11 * cf.lambda2_over_i(x).abs().max(1.0));
        let s = gbdt::eval_s(&t, x, gbdt::default_s_method(&t)).unwrap()[(0, 0)];
        prop_assert!((s - cf.s(x)).norm() <= 1e-10 * cf.s(x).abs());
        let w = gbdt::eval_omega(&t, x).unwrap();
        prop_assert!((w - cf.omega(x)).abs() <= 1e-9 * (1.0 + cf.omega(x).abs()));
    }

    #[test]
    fn jordan_cell_matches_closed_form(
        r in 0.5..1.5f64,
        gap in 0.5..1.5f64,
        b in 0.5..1.5f64,
        d in 0.5..1.5f64,
        x in -1.0..1.0f64,
    ) {
        let lambda = r + gap;
        let ov = params(&[("r", r), ("lambda", lambda), ("b", b), ("d", d)]);
        let s = Example::EeDw1.scenario(&ov).unwrap();
        let t = s.triple().unwrap();
        let cf = JordanCell::new(r, lambda, b, d, 1.0);
        let l1 = gbdt::eval_pi(&t, x).unwrap().0;
        for (i, want) in cf.lambda1(x).into_iter().enumerate() {
            prop_assert!((l1[(i, 0)] - want).norm() <= 1e-11 * want.abs().max(1.0));
        }
        let sm = gbdt::eval_s(&t, x, gbdt::default_s_method(&t)).unwrap();
        prop_assert!((sm[(1, 1)] - cf.s22(x)).norm() <= 1e-10 * cf.s22(x).abs());
        prop_assert!((sm[(0, 1)] - cf.s12(x)).norm() <= 1e-10 * (cf.s11(x) * cf.s22(x)).sqrt());
        prop_assert!((sm[(0, 0)] - cf.s11(x)).norm() <= 1e-10 * cf.s11(x).abs());
    }
}
