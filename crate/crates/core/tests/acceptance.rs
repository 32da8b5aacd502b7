//! Acceptance criteria, one verdict line each.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod common;

use std::collections::BTreeMap;

use common::{dirac_matrix, full, rel, rk4, signature, verdict, JordanCell, Steplike, I};
use dirac_gbdt::canned::{Example, CANNED_Z};
use dirac_gbdt::cli;
use dirac_gbdt::csvfmt::linspace;
use dirac_gbdt::gbdt::{self, SMethod};
use dirac_gbdt::matlin::{c64, mat_exp, CMatrix};
use dirac_gbdt::seed::{GbdtTriple, SystemKind};
use dirac_gbdt::solutions::{self, ZetaBranch};
use dirac_gbdt::weyl::{self, MembershipIntegrand};
use num_complex::Complex64;

type Outcome = Result<(bool, String), String>;

fn triple(e: Example) -> GbdtTriple {
    e.scenario(&BTreeMap::new()).unwrap().triple().unwrap()
}

fn min_eig(m: &CMatrix) -> f64 {
    let h = (m + m.adjoint()) * c64(0.5, 0.0);
    h.symmetric_eigen().eigenvalues.min()
}

fn e<E: std::fmt::Display>(err: E) -> String {
    err.to_string()
}

fn criterion_1() -> Outcome {
    let mut worst = 0.0f64;
    let mut at = String::new();
    for ex in Example::ALL {
        let t = triple(ex);
        let xs = match t.kind() {
            SystemKind::SelfAdjoint => linspace(0.0, 2.0, 101),
            SystemKind::SkewSelfAdjoint => linspace(-2.0, 2.0, 101),
        };
        let jk = match t.kind() {
            SystemKind::SelfAdjoint => signature(t.p()),
            SystemKind::SkewSelfAdjoint => CMatrix::identity(2 * t.p(), 2 * t.p()),
        };
        for x in xs {
            let pi = gbdt::eval_pi_matrix(&t, x).map_err(e)?;
            let s = gbdt::eval_s(&t, x, SMethod::Quadrature).map_err(e)?;
            let lhs = t.a() * &s - &s * t.a().adjoint();
            let rhs = &pi * &jk * pi.adjoint() * I;
            let r = (lhs - rhs).norm() / (1.0 + s.norm());
            if r > worst {
                worst = r;
                at = format!("{ex} x={x}");
            }
        }
    }
    Ok((
        worst <= 1e-9,
        format!("worst scaled residual {worst:.3e} (tol 1e-9) at {at}"),
    ))
}

fn criterion_2() -> Outcome {
    let mut min_s = f64::INFINITY;
    let mut worst_mon = f64::NEG_INFINITY;
    for ex in Example::ALL {
        let t = triple(ex);
        if !t.s0_positive() {
            continue;
        }
        let xs = match t.kind() {
            SystemKind::SelfAdjoint => linspace(0.0, 3.0, 61),
            SystemKind::SkewSelfAdjoint => linspace(-3.0, 3.0, 121),
        };
        for &x in &xs {
            let s = gbdt::eval_s(&t, x, gbdt::default_s_method(&t)).map_err(e)?;
            min_s = min_s.min(min_eig(&s) / s.norm());
        }
        if t.kind() == SystemKind::SkewSelfAdjoint {
            let mut prev: Option<CMatrix> = None;
            for x in linspace(0.0, 3.0, 61) {
                let ex_a = mat_exp(&(t.a() * c64(0.0, -x))).map_err(e)?;
                let s = gbdt::eval_s(&t, x, gbdt::default_s_method(&t)).map_err(e)?;
                let r = &ex_a * s * ex_a.adjoint();
                if let Some(p) = &prev {
                    let m = min_eig(&(&r - p));
                    worst_mon = worst_mon.max(-m / (1.0 + r.norm()));
                }
                prev = Some(r);
            }
        }
    }
    Ok((
        min_s > 0.0 && worst_mon <= 1e-9,
        format!(
            "min scaled eig of S {min_s:.3e} (> 0); worst monitor decrease {worst_mon:.3e} (tol 1e-9)"
        ),
    ))
}

fn criterion_3() -> Outcome {
    let zs: Vec<Complex64> = CANNED_Z.iter().map(|z| c64(z[0], z[1])).collect();
    let mut worst_u = 0.0f64;
    let mut worst_w = 0.0f64;
    let mut kinds = Vec::new();
    for ex in [Example::SaScalar, Example::EeDw0, Example::EeDw1] {
        let t = triple(ex);
        kinds.push(t.kind());
        let m = 2 * t.p();
        for &z in &zs {
            let coef =
                |x: f64| dirac_matrix(t.kind(), z, &full(&gbdt::eval_potential(&t, x).unwrap()));
            let u0 =
                solutions::transformed_fundamental(&t, 0.0, z, ZetaBranch::Upper).map_err(e)?;
            let mut y0 = CMatrix::zeros(m, 2 * m);
            y0.view_mut((0, 0), (m, m)).copy_from(&u0);
            y0.view_mut((0, m), (m, m))
                .copy_from(&CMatrix::identity(m, m));
            let xs = [0.0, 0.5, 1.0, 2.0];
            let traj = rk4(coef, &y0, &xs, 1e-3);
            for (k, &x) in xs.iter().enumerate().skip(1) {
                let u =
                    solutions::transformed_fundamental(&t, x, z, ZetaBranch::Upper).map_err(e)?;
                let w =
                    solutions::normalized_fundamental(&t, x, z, ZetaBranch::Upper).map_err(e)?;
                let nu = traj[k].columns(0, m).into_owned();
                let nw = traj[k].columns(m, m).into_owned();
                worst_u = worst_u.max((&u - nu).norm() / u.norm());
                worst_w = worst_w.max((&w - nw).norm() / w.norm());
            }
        }
    }
    let both =
        kinds.contains(&SystemKind::SelfAdjoint) && kinds.contains(&SystemKind::SkewSelfAdjoint);
    Ok((
        both && worst_u <= 1e-6 && worst_w <= 1e-6,
        format!("worst relative gap u {worst_u:.3e}, W {worst_w:.3e} (tol 1e-6), both kinds"),
    ))
}

fn criterion_4() -> Outcome {
    let t = triple(Example::EeDw1);
    let cf = JordanCell::new(1.0, 2.0, 1.0, 1.0, 1.0);
    let mut worst = 0.0f64;
    let mut at = String::new();
    for x in linspace(-1.0, 1.0, 21) {
        let s = gbdt::eval_s(&t, x, gbdt::default_s_method(&t)).map_err(e)?;
        let det = s[(0, 0)] * s[(1, 1)] - s[(0, 1)] * s[(1, 0)];
        let gaps = [
            ("s11", (s[(0, 0)] - cf.s11(x)).norm() / cf.s11(x).abs()),
            ("s12", (s[(0, 1)] - cf.s12(x)).norm() / cf.s12(x).abs()),
            ("s21", (s[(1, 0)] - cf.s12(x)).norm() / cf.s12(x).abs()),
            ("s22", (s[(1, 1)] - cf.s22(x)).norm() / cf.s22(x).abs()),
            ("det", (det - cf.det(x)).norm() / cf.det(x).abs()),
        ];
        for (name, g) in gaps {
            if !(g <= worst) {
                worst = g;
                at = format!("{name} x={x}");
            }
        }
    }
    Ok((
        worst <= 1e-8,
        format!("worst relative gap {worst:.3e} (tol 1e-8) at {at}"),
    ))
}

fn criterion_5() -> Outcome {
    let t = triple(Example::EeDw0);
    let cf = Steplike::new(1.0, 2.0, 1.0, 1.0);
    let s0 = gbdt::eval_s(&t, 0.0, gbdt::default_s_method(&t)).map_err(e)?[(0, 0)];
    let w0 = gbdt::eval_omega(&t, 0.0).map_err(e)?;
    let gap_s = (s0 - 5.0).norm();
    let gap_w = (w0 + 2.2).abs();
    // μ > 0: e^{2μx} dominates at +∞
    let wp = gbdt::eval_omega(&t, 8.0).map_err(e)?;
    let wm = gbdt::eval_omega(&t, -8.0).map_err(e)?;
    let gp = (wp - cf.limit_growing_side()).abs();
    let gm = (wm - cf.limit_decaying_side()).abs();
    Ok((
        gap_s <= 1e-12 && gap_w <= 1e-12 && gp <= 1e-4 && gm <= 1e-4,
        format!(
            "|S(0)-5| {gap_s:.1e}, |ω(0)+11/5| {gap_w:.1e} (tol 1e-12); \
             |ω(8)-L+| {gp:.1e}, |ω(-8)-L-| {gm:.1e} (tol 1e-4), L+ = {:.6}, L- = {:.6}",
            cf.limit_growing_side(),
            cf.limit_decaying_side()
        ),
    ))
}

fn criterion_6() -> Outcome {
    let t = triple(Example::EeDw1);
    let cf = JordanCell::new(1.0, 2.0, 1.0, 1.0, 1.0);
    let xs = linspace(10.0, 25.0, 16);
    let mut lx = Vec::new();
    let mut lw = Vec::new();
    let mut oracle_gap = 0.0f64;
    let mut w25 = f64::NAN;
    for &x in &xs {
        let w = gbdt::eval_omega(&t, x).map_err(e)?;
        oracle_gap = oracle_gap.max((w - cf.omega(x)).abs());
        lx.push(x.ln());
        lw.push(w.ln());
        w25 = w;
    }
    let n = xs.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = lw.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&lw).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    let slope = sxy / sxx;
    let ratio = w25 / 625.0;
    let c = cf.growth_constant();
    let pass = (slope - 2.0).abs() <= 0.1 && rel(ratio, c) <= 0.05;
    Ok((
        pass,
        format!(
            "log-log slope {slope:.4} (want 2 ± 0.1); ω(25)/625 = {ratio:.4e} vs C = {c:.4} \
             (want within 5%); ω(25) = {w25:.12}; engine vs closed-form ω max gap {oracle_gap:.1e}"
        ),
    ))
}

fn criterion_7() -> Outcome {
    let h = 1e-4;
    let mut worst = 0.0f64;
    let mut worst_dw = 0.0f64;
    let mut worst_im = 0.0f64;
    let sigma2 = CMatrix::from_row_slice(2, 2, &[c64(0.0, 0.0), -I, I, c64(0.0, 0.0)]);
    for ex in Example::ALL {
        let t = triple(ex);
        let j = signature(t.p());
        let xs = match t.kind() {
            SystemKind::SelfAdjoint => linspace(0.0, 2.0, 20),
            SystemKind::SkewSelfAdjoint => linspace(-1.0, 1.0, 20),
        };
        let dw = t.dirac_weyl_hypotheses().is_ok();
        let psi = |x: f64, xi: f64| solutions::dynamical_solution(&t, x, xi).unwrap();
        for &x in &xs {
            let vt = full(&gbdt::eval_potential(&t, x).map_err(e)?);
            for xi in linspace(-1.0, 1.0, 20) {
                let p = psi(x, xi);
                let px = (psi(x + h, xi) - psi(x - h, xi)) / c64(2.0 * h, 0.0);
                let pxi = (psi(x, xi + h) - psi(x, xi - h)) / c64(2.0 * h, 0.0);
                let inner = match t.kind() {
                    SystemKind::SelfAdjoint => &pxi + &vt * &p,
                    SystemKind::SkewSelfAdjoint => &pxi + &vt * &p * I,
                };
                worst = worst.max((&px + &j * inner * I).norm());
                if dw {
                    let w = gbdt::eval_omega(&t, x).map_err(e)?;
                    let rhs = &j * (-&pxi + &sigma2 * &p * c64(0.0, w)) * I;
                    worst_dw = worst_dw.max((&px - rhs).norm());
                }
            }
        }
        if dw {
            for x in linspace(-2.0, 2.0, 101) {
                // ω = -i ṽ, so Im ω = -Re ṽ
                let v = gbdt::eval_potential(&t, x).map_err(e)?[(0, 0)];
                worst_im = worst_im.max(v.re.abs());
            }
        }
    }
    Ok((
        worst <= 1e-5 && worst_dw <= 1e-5 && worst_im <= 1e-11,
        format!(
            "dynamical residual {worst:.3e}, Dirac-Weyl residual {worst_dw:.3e} (tol 1e-5); \
             max |Im ω| {worst_im:.1e} (tol 1e-11)"
        ),
    ))
}

/// Composite Simpson partial integrals of `density` at `X = 1, ..., 20`.
fn partials(density: impl Fn(f64) -> f64) -> Vec<f64> {
    let per_unit = 200;
    let h = 1.0 / per_unit as f64;
    let mut acc = 0.0;
    let mut out = Vec::new();
    for k in 0..20 {
        let a = k as f64;
        let mut s = density(a) + density(a + 1.0);
        for i in 1..per_unit {
            s += density(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
        }
        acc += s * h / 3.0;
        out.push(acc);
    }
    out
}

fn criterion_8() -> Outcome {
    let mut worst_route = 0.0f64;
    let mut worst_herg = f64::INFINITY;
    let mut worst_tail = 0.0f64;
    let mut worst_drop = 0.0f64;
    let mut min_inflation = f64::INFINITY;
    let mut per_kind = [0usize; 2];
    for ex in [
        Example::SaScalar,
        Example::TrivialSa,
        Example::EeDw0,
        Example::EeDw1,
    ] {
        let t = triple(ex);
        let zs = weyl::z_grid(weyl::half_plane_m(&t));
        per_kind[(t.kind() == SystemKind::SkewSelfAdjoint) as usize] = zs.len();
        for &z in &zs {
            let a = weyl::weyl_via_y(&t, z).map_err(e)?.phi;
            let b = weyl::weyl_realization(&t, z).map_err(e)?.phi;
            worst_route = worst_route.max((&a - &b).norm() / a.norm());
            if t.kind() == SystemKind::SelfAdjoint {
                let im = (&a - a.adjoint()) * c64(0.0, -0.5);
                worst_herg = worst_herg.min(im.symmetric_eigen().eigenvalues.min());
            }
        }
        let z = zs[0];
        let phi = weyl::weyl_via_y(&t, z).map_err(e)?.phi;
        let m = MembershipIntegrand::new(&t, z, &phi).map_err(e)?;
        let base = partials(|x| m.density(x).unwrap());
        let total = base[19];
        let drop = base.windows(2).map(|w| w[0] - w[1]).fold(0.0, f64::max);
        worst_drop = worst_drop.max(drop / total);
        worst_tail = worst_tail.max((base[19] - base[18]) / total);
        let p = t.p();
        let bumped = &phi + CMatrix::from_element(p, p, c64(1e-3, 0.0));
        let mb = MembershipIntegrand::new(&t, z, &bumped).map_err(e)?;
        let grown = partials(|x| mb.density(x).unwrap());
        min_inflation = min_inflation.min(grown[19] / total);
    }
    let pass = worst_route <= 1e-9
        && worst_herg >= -1e-10
        && worst_drop <= 0.0
        && worst_tail <= 1e-8
        && min_inflation >= 10.0
        && per_kind == [10, 10];
    Ok((
        pass,
        format!(
            "route gap {worst_route:.2e} (tol 1e-9, {} + {} z-points); Herglotz min eig {worst_herg:.2e} \
             (>= -1e-10); partial integrals: worst drop {worst_drop:.1e}, last-unit share {worst_tail:.1e} \
             (tol 1e-8); perturbed/base at X=20 >= {min_inflation:.2e} (want >= 10)",
            per_kind[0], per_kind[1]
        ),
    ))
}

fn criterion_9() -> Outcome {
    let dir = tempfile::tempdir().map_err(e)?;
    let mut files = 0;
    for ex in Example::ALL {
        let a = dir.path().join(format!("{ex}-a"));
        let b = dir.path().join(format!("{ex}-b"));
        let ra = cli::cmd_example(ex, &BTreeMap::new(), &a).map_err(e)?;
        cli::cmd_example(ex, &BTreeMap::new(), &b).map_err(e)?;
        for f in &ra.files {
            let name = f.file_name().unwrap();
            let x = std::fs::read(f).map_err(e)?;
            let y = std::fs::read(b.join(name)).map_err(e)?;
            if x != y {
                return Ok((
                    false,
                    format!("{ex}: {} differs between runs", name.to_string_lossy()),
                ));
            }
            files += 1;
        }
    }
    Ok((
        true,
        format!("{files} artifacts byte-identical across two runs"),
    ))
}

/// Criteria whose stated claim does not hold for the configured triple. They
/// are still evaluated and reported as FAIL; an unexpected PASS is an error
/// too, since it would mean the engine changed.
const KNOWN_FAILURES: [&str; 1] = ["criterion 6 power growth"];

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 9] = [
        ("criterion 1 identity suite", criterion_1),
        ("criterion 2 positivity suite", criterion_2),
        ("criterion 3 oracle equivalence", criterion_3),
        (
            "criterion 4 closed-form S for the Jordan-cell example",
            criterion_4,
        ),
        ("criterion 5 steplike scalar checks", criterion_5),
        ("criterion 6 power growth", criterion_6),
        ("criterion 7 PDE residual suite", criterion_7),
        ("criterion 8 Weyl suite", criterion_8),
        ("criterion 9 determinism", criterion_9),
    ];
    let mut failed = Vec::new();
    let mut surprises = Vec::new();
    for (id, f) in criteria {
        let ok = match f() {
            Ok((pass, detail)) => verdict(id, pass, detail),
            Err(msg) => verdict(id, false, format!("error: {msg}")),
        };
        if !ok {
            failed.push(id);
        }
        if ok == KNOWN_FAILURES.contains(&id) {
            surprises.push(id);
        }
    }
    println!(
        "{} of {} criteria pass",
        criteria.len() - failed.len(),
        criteria.len()
    );
    for id in &failed {
        if KNOWN_FAILURES.contains(id) {
            println!("known failure: {id} (analysis in the decisions ledger)");
        }
    }
    if !surprises.is_empty() {
        println!("unexpected outcome: {}", surprises.join("; "));
        std::process::exit(1);
    }
}
