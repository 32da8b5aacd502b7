//! Independent oracles and the invariant-checking battery.
//!
//! Every check is deterministic for a given triple and grid and reports its
//! worst normalized residual against a fixed threshold.

use std::fmt;

use num_complex::Complex64;

use crate::csvfmt::{linspace, num};
use crate::error::{Error, Result};
use crate::gbdt::{self, full_potential, GbdtState, SMethod, X_Q_CAP};
use crate::matlin::{self, c64, hermitian_eigenvalues, spectral_norm, CMatrix, I};
use crate::quad::{self, QuadTol};
use crate::seed::{signature, GbdtTriple, SystemKind};
use crate::solutions::{self, dirac_coefficient, ZetaBranch};
use crate::weyl::{self, MembershipIntegrand};

pub const IDENTITY_TOL: f64 = 1e-9;
pub const DUAL_ODE_TOL: f64 = 1e-6;
pub const PI_S_TOL: f64 = 1e-5;
pub const PDE_TOL: f64 = 1e-5;
pub const MONITOR_TOL: f64 = 1e-9;
pub const S_METHOD_TOL: f64 = 1e-8;
pub const ORACLE_TOL: f64 = 1e-6;
pub const ROUTE_TOL: f64 = 1e-9;
pub const HERGLOTZ_TOL: f64 = 1e-10;
/// Ratio of the last unit-length increment to the whole partial integral.
pub const MEMBERSHIP_TAIL_TOL: f64 = 1e-8;

/// Central-difference step for the ODE checks.
pub const ODE_STEP: f64 = 1e-5;
/// Central-difference step for the PDE checks.
pub const PDE_STEP: f64 = 1e-4;
/// Largest accepted RK4 step.
pub const RK4_MAX_STEP: f64 = 1e-3;
/// Step between monitor samples.
pub const MONITOR_STEP: f64 = 0.05;

/// One check outcome.
#[derive(Debug, Clone, PartialEq)]
pub struct VerifyReport {
    pub check_id: String,
    pub grid: String,
    pub worst_residual: f64,
    pub threshold: f64,
    pub pass: bool,
    pub location: String,
}

impl VerifyReport {
    pub const CSV_HEADER: &'static str = "check_id,grid,worst_residual,threshold,pass,location";

    /// `pass` is derived: a NaN residual fails.
    pub fn new(
        check_id: impl Into<String>,
        grid: impl Into<String>,
        worst_residual: f64,
        threshold: f64,
        location: impl Into<String>,
    ) -> Self {
        VerifyReport {
            check_id: check_id.into(),
            grid: grid.into(),
            worst_residual,
            threshold,
            pass: worst_residual <= threshold,
            location: location.into(),
        }
    }

    /// A check that could not run at all.
    pub fn failed(check_id: impl Into<String>, grid: impl Into<String>, err: &Error) -> Self {
        let mut r = VerifyReport::new(
            check_id,
            grid,
            f64::INFINITY,
            0.0,
            sanitize(&err.to_string()),
        );
        r.pass = false;
        r
    }

    pub fn to_csv_line(&self) -> String {
        format!(
            "{},{},{},{},{},{}",
            sanitize(&self.check_id),
            sanitize(&self.grid),
            num(self.worst_residual),
            num(self.threshold),
            self.pass,
            sanitize(&self.location)
        )
    }

    pub fn parse_csv_line(line: &str) -> Result<Self> {
        let parts: Vec<&str> = line.split(',').collect();
        let bad = |msg: &str| Error::Scenario {
            field: "verify report".into(),
            msg: format!("{msg}: `{line}`"),
        };
        if parts.len() != 6 {
            return Err(bad("expected 6 fields"));
        }
        let f = |s: &str| match s {
            "inf" => Ok(f64::INFINITY),
            "-inf" => Ok(f64::NEG_INFINITY),
            "NaN" => Ok(f64::NAN),
            _ => s.parse::<f64>().map_err(|_| bad("bad number")),
        };
        Ok(VerifyReport {
            check_id: parts[0].into(),
            grid: parts[1].into(),
            worst_residual: f(parts[2])?,
            threshold: f(parts[3])?,
            pass: parts[4].parse().map_err(|_| bad("bad pass flag"))?,
            location: parts[5].into(),
        })
    }
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {} [{}]: worst {:.3e} vs {:.3e} at {}",
            if self.pass { "PASS" } else { "FAIL" },
            self.check_id,
            self.grid,
            self.worst_residual,
            self.threshold,
            self.location
        )
    }
}

fn sanitize(s: &str) -> String {
    s.replace([',', '\n', '\r'], ";")
}

/// Running maximum that treats NaN as the worst possible value.
#[derive(Debug, Clone)]
struct Worst {
    value: f64,
    location: String,
}

impl Worst {
    fn new() -> Self {
        Worst {
            value: f64::NEG_INFINITY,
            location: "none".into(),
        }
    }

    fn update(&mut self, v: f64, loc: impl FnOnce() -> String) {
        let v = if v.is_nan() { f64::INFINITY } else { v };
        if v > self.value {
            self.value = v;
            self.location = loc();
        }
    }

    fn report(self, id: &str, grid: String, threshold: f64) -> VerifyReport {
        let value = if self.value == f64::NEG_INFINITY {
            0.0
        } else {
            self.value
        };
        VerifyReport::new(id, grid, value, threshold, self.location)
    }
}

fn grid_label(xs: &[f64]) -> String {
    match (xs.first(), xs.last()) {
        (Some(a), Some(b)) => format!("x in [{}; {}] ({} pts)", num(*a), num(*b), xs.len()),
        _ => "empty".into(),
    }
}

// ---------------------------------------------------------------------------
// RK4 oracle

/// Linear Dirac system `y' = H(x) y` with the kind's coefficient and a full
/// potential evaluator.
pub struct DiracSystem<'a> {
    pub kind: SystemKind,
    pub z: Complex64,
    pub potential: Box<dyn Fn(f64) -> Result<CMatrix> + 'a>,
}

impl<'a> DiracSystem<'a> {
    /// The seed system.
    pub fn seed(triple: &'a GbdtTriple, z: Complex64) -> Self {
        let seed = *triple.seed();
        DiracSystem {
            kind: triple.kind(),
            z,
            potential: Box::new(move |x| Ok(seed.eval_full(x))),
        }
    }

    /// The transformed system.
    pub fn transformed(triple: &'a GbdtTriple, z: Complex64) -> Self {
        DiracSystem {
            kind: triple.kind(),
            z,
            potential: Box::new(move |x| {
                Ok(full_potential(&GbdtState::at(triple, x)?.potential(triple)))
            }),
        }
    }

    fn rhs(&self, x: f64, y: &CMatrix) -> Result<CMatrix> {
        Ok(dirac_coefficient(self.kind, self.z, &(self.potential)(x)?) * y)
    }
}

/// Classical fixed-step RK4 from `x_grid[0]` through each grid point; each
/// interval is split into equal steps no longer than `max_step`.
pub fn rk4_integrate(
    system: &DiracSystem<'_>,
    y0: &CMatrix,
    x_grid: &[f64],
    max_step: f64,
) -> Result<Vec<CMatrix>> {
    if !(max_step > 0.0 && max_step <= RK4_MAX_STEP) {
        return Err(Error::Step(format!(
            "RK4 step {max_step} must lie in (0, {RK4_MAX_STEP}]"
        )));
    }
    let Some(&x_start) = x_grid.first() else {
        return Ok(Vec::new());
    };
    let mut out = Vec::with_capacity(x_grid.len());
    let mut y = y0.clone();
    let mut x = x_start;
    out.push(y.clone());
    for &target in &x_grid[1..] {
        let span = target - x;
        let steps = (span.abs() / max_step).ceil().max(1.0) as usize;
        let h = span / steps as f64;
        for k in 0..steps {
            let x0 = x + h * k as f64;
            let hc = c64(h, 0.0);
            let k1 = system.rhs(x0, &y)?;
            let k2 = system.rhs(x0 + 0.5 * h, &(&y + &k1 * (hc * 0.5)))?;
            let k3 = system.rhs(x0 + 0.5 * h, &(&y + &k2 * (hc * 0.5)))?;
            let k4 = system.rhs(x0 + h, &(&y + &k3 * hc))?;
            y += (k1 + (k2 + k3) * c64(2.0, 0.0) + k4) * (hc / 6.0);
        }
        x = target;
        out.push(y.clone());
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Checks

/// Identity `A S - S A^* = iΠ j^κ Π^*` with `S(x)` from quadrature.
pub fn check_identity(triple: &GbdtTriple, xs: &[f64]) -> VerifyReport {
    let mut worst = Worst::new();
    for &x in xs {
        let r = (|| -> Result<f64> {
            let pi = gbdt::eval_pi_matrix(triple, x)?;
            let s = gbdt::eval_s(triple, x, SMethod::Quadrature)?;
            Ok(gbdt::identity_residual(triple, &pi, &s) / (1.0 + spectral_norm(&s)))
        })();
        match r {
            Ok(v) => worst.update(v, || format!("x={}", num(x))),
            Err(e) => return VerifyReport::failed("identity", grid_label(xs), &e),
        }
    }
    worst.report("identity", grid_label(xs), IDENTITY_TOL)
}

/// Sylvester and quadrature `S(x)` agree.
pub fn check_s_methods(triple: &GbdtTriple, xs: &[f64]) -> Option<VerifyReport> {
    triple.sylvester()?;
    let mut worst = Worst::new();
    for &x in xs {
        let r = (|| -> Result<f64> {
            let a = gbdt::eval_s(triple, x, SMethod::Sylvester)?;
            let b = gbdt::eval_s(triple, x, SMethod::Quadrature)?;
            Ok(spectral_norm(&(&a - &b)) / spectral_norm(&a).max(f64::MIN_POSITIVE))
        })();
        match r {
            Ok(v) => worst.update(v, || format!("x={}", num(x))),
            Err(e) => return Some(VerifyReport::failed("s_methods", grid_label(xs), &e)),
        }
    }
    Some(worst.report("s_methods", grid_label(xs), S_METHOD_TOL))
}

/// Positivity of `S(x)` on the kind's domain and, for the skew kind, the
/// monotonicity of the monitor matrices.
pub fn check_positivity(triple: &GbdtTriple, xs: &[f64]) -> Vec<VerifyReport> {
    let domain: Vec<f64> = match triple.kind() {
        SystemKind::SelfAdjoint => xs.iter().copied().filter(|&x| x >= 0.0).collect(),
        SystemKind::SkewSelfAdjoint => xs.to_vec(),
    };
    let mut out = Vec::new();
    let mut worst = Worst::new();
    let mut failure = None;
    for &x in &domain {
        match gbdt::eval_s(triple, x, gbdt::default_s_method(triple)) {
            Ok(s) => {
                let min = hermitian_eigenvalues(&s).first().copied().unwrap_or(0.0);
                worst.update(-min / spectral_norm(&s).max(f64::MIN_POSITIVE), || {
                    format!("x={} min_eig={}", num(x), num(min))
                });
            }
            Err(e) => {
                failure = Some(e);
                break;
            }
        }
    }
    out.push(match failure {
        Some(e) => VerifyReport::failed("positivity", grid_label(&domain), &e),
        None => worst.report("positivity", grid_label(&domain), 0.0),
    });
    if triple.kind() == SystemKind::SkewSelfAdjoint {
        let reach = xs
            .iter()
            .fold(0.0f64, |m, x| m.max(x.abs()))
            .max(MONITOR_STEP);
        let count = (reach / MONITOR_STEP).round() as usize + 1;
        let fwd = linspace(0.0, reach, count);
        let back = linspace(0.0, -reach, count);
        out.push(monitor_report(triple, &fwd, "monitor_r"));
        out.push(monitor_report(triple, &back, "monitor_q"));
    }
    out
}

/// `R(x) = e^{-ixA} S(x) e^{ixA^*}` for `sign = 1`; the companion
/// `e^{ixA} S(x) e^{-ixA^*}` for `sign = -1`.
pub fn monitor(triple: &GbdtTriple, x: f64, sign: f64) -> Result<CMatrix> {
    let e = matlin::mat_exp(&(triple.a() * c64(0.0, -sign * x)))?;
    let s = gbdt::eval_s(triple, x, gbdt::default_s_method(triple))?;
    Ok(matlin::hermitian_part(&(&e * s * e.adjoint())))
}

fn monitor_report(triple: &GbdtTriple, xs: &[f64], id: &str) -> VerifyReport {
    // forward grid: R non-decreasing; backward grid (x decreasing from 0):
    // the companion is non-increasing in x, so it grows along the grid too
    let sign = if id == "monitor_r" { 1.0 } else { -1.0 };
    let mut worst = Worst::new();
    let mut prev: Option<CMatrix> = None;
    for &x in xs {
        let m = match monitor(triple, x, sign) {
            Ok(m) => m,
            Err(e) => return VerifyReport::failed(id, grid_label(xs), &e),
        };
        if let Some(p) = &prev {
            let diff = matlin::hermitian_part(&(&m - p));
            let min = hermitian_eigenvalues(&diff).first().copied().unwrap_or(0.0);
            worst.update(-min / (1.0 + spectral_norm(&m)), || format!("x={}", num(x)));
        }
        prev = Some(m);
    }
    worst.report(id, grid_label(xs), MONITOR_TOL)
}

/// Seed potential and `j` evaluated together.
fn dual_rhs(triple: &GbdtTriple, x: f64, pi: &CMatrix) -> CMatrix {
    let j = signature(triple.p());
    let v = triple.seed().eval_full(x);
    let a_term = triple.a() * pi * &j * (-I);
    match triple.kind() {
        SystemKind::SelfAdjoint => a_term - pi * &j * v * I,
        SystemKind::SkewSelfAdjoint => a_term - pi * &j * v,
    }
}

/// `Π' = -iAΠj - iΠjV` (self-adjoint) or `-iAΠj - ΠjV` (skew) by central
/// differences.
pub fn check_dual_ode(triple: &GbdtTriple, xs: &[f64]) -> VerifyReport {
    let mut worst = Worst::new();
    let h = ODE_STEP;
    for &x in xs {
        let r = (|| -> Result<f64> {
            let fd = (gbdt::eval_pi_matrix(triple, x + h)? - gbdt::eval_pi_matrix(triple, x - h)?)
                / c64(2.0 * h, 0.0);
            let rhs = dual_rhs(triple, x, &gbdt::eval_pi_matrix(triple, x)?);
            Ok(spectral_norm(&(fd - &rhs)) / (1.0 + spectral_norm(&rhs)))
        })();
        match r {
            Ok(v) => worst.update(v, || format!("x={}", num(x))),
            Err(e) => return VerifyReport::failed("dual_ode", grid_label(xs), &e),
        }
    }
    worst.report("dual_ode", grid_label(xs), DUAL_ODE_TOL)
}

/// `(Π^* S^{-1})'` against the kind's right side.
pub fn check_pispluss(triple: &GbdtTriple, xs: &[f64]) -> VerifyReport {
    let mut worst = Worst::new();
    let h = ODE_STEP;
    let j = signature(triple.p());
    for &x in xs {
        let r = (|| -> Result<f64> {
            let plus = GbdtState::at(triple, x + h)?.pi_star_s_inv();
            let minus = GbdtState::at(triple, x - h)?.pi_star_s_inv();
            let fd = (plus - minus) / c64(2.0 * h, 0.0);
            let st = GbdtState::at(triple, x)?;
            let m = st.pi_star_s_inv();
            let vt = full_potential(&st.potential(triple));
            let rhs = match triple.kind() {
                SystemKind::SelfAdjoint => (&j * &m * triple.a() + &vt * &j * &m) * I,
                SystemKind::SkewSelfAdjoint => &j * &m * triple.a() * I + &j * &vt * &m,
            };
            Ok(spectral_norm(&(fd - &rhs)) / (1.0 + spectral_norm(&rhs)))
        })();
        match r {
            Ok(v) => worst.update(v, || format!("x={}", num(x))),
            Err(e) => return VerifyReport::failed("pi_s_derivative", grid_label(xs), &e),
        }
    }
    worst.report("pi_s_derivative", grid_label(xs), PI_S_TOL)
}

/// Dynamical system residual on the product grid; with the Dirac–Weyl
/// hypotheses also the Pauli-matrix form with the real `ω`.
pub fn check_pde(triple: &GbdtTriple, xs: &[f64], xis: &[f64]) -> Vec<VerifyReport> {
    let label = format!("{} x {} (x; xi) grid", xs.len(), xis.len());
    let dw = triple.dirac_weyl_hypotheses().is_ok();
    let h = PDE_STEP;
    let j = signature(triple.p());
    let sigma2 = CMatrix::from_row_slice(2, 2, &[matlin::ZERO, -I, I, matlin::ZERO]);
    let mut worst = Worst::new();
    let mut worst_dw = Worst::new();
    for &x in xs {
        let r = (|| -> Result<()> {
            let st = GbdtState::at(triple, x)?;
            let sp = GbdtState::at(triple, x + h)?;
            let sm = GbdtState::at(triple, x - h)?;
            let vt = full_potential(&st.potential(triple));
            let omega = if dw {
                Some(gbdt::omega_from_state(triple, &st)?)
            } else {
                None
            };
            for &xi in xis {
                let psi = solutions::dynamical_from_state(triple, &st, xi)?;
                let psi_x = (solutions::dynamical_from_state(triple, &sp, xi)?
                    - solutions::dynamical_from_state(triple, &sm, xi)?)
                    / c64(2.0 * h, 0.0);
                let psi_xi = (solutions::dynamical_from_state(triple, &st, xi + h)?
                    - solutions::dynamical_from_state(triple, &st, xi - h)?)
                    / c64(2.0 * h, 0.0);
                let inner = match triple.kind() {
                    SystemKind::SelfAdjoint => &psi_xi + &vt * &psi,
                    SystemKind::SkewSelfAdjoint => &psi_xi + &vt * &psi * I,
                };
                let res = &psi_x + &j * inner * I;
                worst.update(spectral_norm(&res), || {
                    format!("x={} xi={}", num(x), num(xi))
                });
                if let Some(w) = omega {
                    // ψ_x = iσ3(-ψ_ξ + iωσ2ψ)
                    let rhs = &j * (-&psi_xi + &sigma2 * &psi * c64(0.0, w)) * I;
                    worst_dw.update(spectral_norm(&(&psi_x - rhs)), || {
                        format!("x={} xi={}", num(x), num(xi))
                    });
                }
            }
            Ok(())
        })();
        if let Err(e) = r {
            let mut out = vec![VerifyReport::failed("pde", label.clone(), &e)];
            if dw {
                out.push(VerifyReport::failed("pde_dirac_weyl", label, &e));
            }
            return out;
        }
    }
    let mut out = vec![worst.report("pde", label.clone(), PDE_TOL)];
    if dw {
        out.push(worst_dw.report("pde_dirac_weyl", label, PDE_TOL));
    }
    out
}

/// `|Im ω(x)|` before it is discarded, under the Dirac–Weyl hypotheses.
pub fn check_omega_realness(triple: &GbdtTriple, xs: &[f64]) -> Option<VerifyReport> {
    triple.dirac_weyl_hypotheses().ok()?;
    let mut worst = Worst::new();
    for &x in xs {
        match GbdtState::at(triple, x) {
            Ok(st) => {
                let w = st.potential(triple)[(0, 0)] * (-I);
                worst.update(w.im.abs(), || format!("x={}", num(x)));
            }
            Err(e) => return Some(VerifyReport::failed("omega_real", grid_label(xs), &e)),
        }
    }
    Some(worst.report("omega_real", grid_label(xs), gbdt::OMEGA_IMAG_TOL))
}

/// Largest `X` for which the integrand can be evaluated without hitting the
/// overflow cap.
pub fn membership_reach(triple: &GbdtTriple, x_max: f64) -> f64 {
    let cap = if triple.q_norm() > 0.0 {
        0.95 * X_Q_CAP / triple.q_norm()
    } else {
        f64::INFINITY
    };
    x_max.min(cap.floor())
}

/// Partial integrals `∫_0^X |integrand|^2` at each `X` in `xs` (ascending,
/// non-negative).
pub fn membership_partial_integrals(
    triple: &GbdtTriple,
    z: Complex64,
    phi: &CMatrix,
    xs: &[f64],
) -> Result<Vec<f64>> {
    let m = MembershipIntegrand::new(triple, z, phi)?;
    let tol = QuadTol {
        abs: 1e-14,
        rel: 1e-10,
    };
    let mut acc = 0.0;
    let mut prev = 0.0;
    let mut out = Vec::with_capacity(xs.len());
    for &x in xs {
        if x < prev {
            return Err(Error::Step(
                "membership grid must be ascending from 0".into(),
            ));
        }
        if x > prev {
            let seg = quad::integrate(
                |t| Ok(CMatrix::from_element(1, 1, c64(m.density(t)?, 0.0))),
                prev,
                x,
                1,
                tol,
            )?;
            acc += seg[(0, 0)].re;
        }
        prev = x;
        out.push(acc);
    }
    Ok(out)
}

/// Unit-spaced partial integrals up to `x_max` (truncated at the cap), the
/// monotone/bounded verdict and, for the skew kind, the GW sup bounds.
pub fn check_weyl_membership(triple: &GbdtTriple, z: Complex64, x_max: f64) -> Vec<VerifyReport> {
    let reach = membership_reach(triple, x_max);
    let count = reach.floor().max(1.0) as usize;
    let xs: Vec<f64> = (1..=count).map(|k| k as f64).collect();
    let label = format!("z={}{:+}i X<={}", num(z.re), z.im, num(reach));
    let mut out = Vec::new();
    let phi = match weyl::weyl_via_y(triple, z) {
        Ok(v) => v.phi,
        Err(e) => return vec![VerifyReport::failed("membership", label, &e)],
    };
    match membership_partial_integrals(triple, z, &phi, &xs) {
        Ok(parts) => {
            let total = parts.last().copied().unwrap_or(0.0);
            let mut monotone_violation: f64 = 0.0;
            let mut prev = 0.0;
            for &p in &parts {
                monotone_violation = monotone_violation.max(prev - p);
                prev = p;
            }
            let last_inc = if parts.len() >= 2 {
                parts[parts.len() - 1] - parts[parts.len() - 2]
            } else {
                total
            };
            let tail = if total > 0.0 {
                last_inc.abs() / total
            } else {
                0.0
            };
            let worst = if total.is_finite() {
                tail.max(monotone_violation / total.max(f64::MIN_POSITIVE))
            } else {
                f64::INFINITY
            };
            out.push(VerifyReport::new(
                "membership",
                label.clone(),
                worst,
                MEMBERSHIP_TAIL_TOL,
                format!("integral={}", num(total)),
            ));
        }
        Err(e) => out.push(VerifyReport::failed("membership", label.clone(), &e)),
    }
    if triple.kind() == SystemKind::SkewSelfAdjoint {
        for ell in [1.0f64, 5.0, 10.0] {
            out.push(gw_sup_report(triple, z, &phi, ell.min(reach)));
        }
    }
    out
}

/// `sup_{0 ≤ x ≤ ℓ} ‖e^{-izx} W(x, z) [I; φ]‖` sampled on 200 points.
pub fn gw_sup(triple: &GbdtTriple, z: Complex64, phi: &CMatrix, ell: f64) -> Result<(f64, f64)> {
    let m = MembershipIntegrand::new(triple, z, phi)?;
    let mut best = (0.0, 0.0);
    for x in linspace(0.0, ell, 201) {
        let v = spectral_norm(&m.vector(x)?) * (-I * z * x).exp().norm();
        if !(v <= best.0) {
            best = (v, x);
        }
    }
    Ok(best)
}

fn gw_sup_report(triple: &GbdtTriple, z: Complex64, phi: &CMatrix, ell: f64) -> VerifyReport {
    let label = format!("z={}{:+}i l={}", num(z.re), z.im, num(ell));
    match gw_sup(triple, z, phi, ell) {
        Ok((v, x)) => VerifyReport::new("gw_sup", label, v, f64::MAX, format!("x={}", num(x))),
        Err(e) => VerifyReport::failed("gw_sup", label, &e),
    }
}

/// Quotient vs realization and (self-adjoint) the Herglotz property on `zs`.
pub fn check_weyl_routes(triple: &GbdtTriple, zs: &[Complex64]) -> Vec<VerifyReport> {
    let label = format!("{} z points", zs.len());
    let mut route = Worst::new();
    let mut herg = Worst::new();
    for &z in zs {
        let r = (|| -> Result<(f64, f64)> {
            let y = weyl::weyl_via_y(triple, z)?;
            let r = weyl::realization_data(triple, z)?;
            let phi_r = r.lft.eval(z)? * r.prefactor;
            Ok((
                weyl::route_discrepancy(&y.phi, &phi_r),
                -weyl::herglotz_min_eig(&y.phi),
            ))
        })();
        match r {
            Ok((d, h)) => {
                route.update(d, || format!("z={}{:+}i", num(z.re), z.im));
                herg.update(h, || format!("z={}{:+}i", num(z.re), z.im));
            }
            Err(e) => return vec![VerifyReport::failed("weyl_routes", label, &e)],
        }
    }
    let mut out = vec![route.report("weyl_routes", label.clone(), ROUTE_TOL)];
    if triple.kind() == SystemKind::SelfAdjoint {
        out.push(herg.report("herglotz", label, HERGLOTZ_TOL));
    }
    out
}

/// RK4 integration of the transformed system against `ũ` (from `ũ(0, z)`)
/// and against `W` (from `I`).
pub fn check_oracle(triple: &GbdtTriple, zs: &[Complex64], xs: &[f64]) -> Vec<VerifyReport> {
    let label = format!("{} z points; x in {:?}", zs.len(), xs);
    let mut grid = vec![0.0];
    grid.extend(xs.iter().copied().filter(|&x| x != 0.0));
    let mut wu = Worst::new();
    let mut ww = Worst::new();
    for &z in zs {
        let r = (|| -> Result<()> {
            let sys = DiracSystem::transformed(triple, z);
            let u0 = solutions::transformed_fundamental(triple, 0.0, z, ZetaBranch::Upper)?;
            let m = 2 * triple.p();
            // both initial values share one trajectory: y0 = [ũ(0) | I]
            let y0 = gbdt::join_columns(&u0, &matlin::identity(m));
            let traj = rk4_integrate(&sys, &y0, &grid, RK4_MAX_STEP)?;
            for (k, &x) in grid.iter().enumerate().skip(1) {
                let u = solutions::transformed_fundamental(triple, x, z, ZetaBranch::Upper)?;
                let num_u = traj[k].columns(0, m).into_owned();
                wu.update(spectral_norm(&(&u - num_u)) / spectral_norm(&u), || {
                    format!("x={} z={}{:+}i", num(x), num(z.re), z.im)
                });
                let w = solutions::normalized_fundamental(triple, x, z, ZetaBranch::Upper)?;
                let num_w = traj[k].columns(m, m).into_owned();
                ww.update(spectral_norm(&(&w - num_w)) / spectral_norm(&w), || {
                    format!("x={} z={}{:+}i", num(x), num(z.re), z.im)
                });
            }
            Ok(())
        })();
        if let Err(e) = r {
            return vec![
                VerifyReport::failed("oracle_u", label.clone(), &e),
                VerifyReport::failed("oracle_w", label, &e),
            ];
        }
    }
    vec![
        wu.report("oracle_u", label.clone(), ORACLE_TOL),
        ww.report("oracle_w", label, ORACLE_TOL),
    ]
}
