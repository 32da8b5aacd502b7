//! Evaluation of `Π(x)`, `S(x)`, the Darboux matrix `w_A(x, z)`, the
//! transformed potential `ṽ(x)` and the Dirac–Weyl potential `ω(x)`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matlin::{self, c64, spectral_norm, CMatrix, HermitianInverse, I, ZERO};
use crate::quad::{self, QuadTol};
use crate::seed::{off_diagonal, GbdtTriple, SystemKind};

/// Largest admissible `|x|·‖Q‖`.
pub const X_Q_CAP: f64 = 300.0;

/// Absolute tolerance on the discarded imaginary part of `ω(x)`.
pub const OMEGA_IMAG_TOL: f64 = 1e-11;

/// How `S(x)` is obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SMethod {
    /// Solve `A S - S A^* = iΠ j^κ Π^*` at `x`.
    Sylvester,
    /// `S(0) + ∫_0^x Π j^{κ+1} Π^* dr`.
    Quadrature,
}

/// Sylvester when the spectra of `A` and `A^*` are disjoint.
pub fn default_s_method(triple: &GbdtTriple) -> SMethod {
    if triple.sylvester().is_some() {
        SMethod::Sylvester
    } else {
        SMethod::Quadrature
    }
}

fn check_cap(triple: &GbdtTriple, x: f64) -> Result<()> {
    if !x.is_finite() {
        return Err(Error::NonFinite { op: "eval_pi" });
    }
    let v = x.abs() * triple.q_norm();
    if v > X_Q_CAP {
        return Err(Error::Range {
            op: "eval_pi",
            value: v,
            cap: X_Q_CAP,
        });
    }
    Ok(())
}

/// `(Λ1(x), Λ2(x))` in closed form.
pub fn eval_pi(triple: &GbdtTriple, x: f64) -> Result<(CMatrix, CMatrix)> {
    check_cap(triple, x)?;
    let r = triple.realization();
    let c = triple.seed().c();
    let ixq = &r.q * c64(0.0, x);
    let ep = matlin::mat_exp(&ixq)?;
    let em = matlin::mat_exp(&(-ixq))?;
    let l1 = (&ep * &r.f1 + &em * &r.f2) * c64(0.0, -c * x).exp();
    let l2 = (&ep * &r.f3 + &em * &r.f4) * c64(0.0, c * x).exp();
    Ok((l1, l2))
}

/// `Π(x) = [Λ1(x) Λ2(x)]`.
pub fn eval_pi_matrix(triple: &GbdtTriple, x: f64) -> Result<CMatrix> {
    let (l1, l2) = eval_pi(triple, x)?;
    Ok(join_columns(&l1, &l2))
}

pub(crate) fn join_columns(l: &CMatrix, r: &CMatrix) -> CMatrix {
    let (n, p) = l.shape();
    let mut out = matlin::zeros(n, p + r.ncols());
    out.view_mut((0, 0), (n, p)).copy_from(l);
    out.view_mut((0, p), (n, r.ncols())).copy_from(r);
    out
}

/// Hermitian `S(x)`.
pub fn eval_s(triple: &GbdtTriple, x: f64, method: SMethod) -> Result<CMatrix> {
    if x == 0.0 {
        return Ok(triple.s0().clone());
    }
    match method {
        SMethod::Sylvester => {
            let solver = triple.sylvester().ok_or_else(|| {
                Error::Hypothesis("the Sylvester route needs σ(A) ∩ σ(A*) = ∅".into())
            })?;
            let pi = eval_pi_matrix(triple, x)?;
            let rhs = crate::seed::identity_rhs(&pi, triple.kind(), triple.p());
            Ok(matlin::hermitian_part(&solver.solve(&rhs)?))
        }
        SMethod::Quadrature => {
            check_cap(triple, x)?;
            // Π(0) = 0 forces Π ≡ 0
            if triple.pi0().iter().all(|v| *v == ZERO) {
                return Ok(triple.s0().clone());
            }
            let jn = triple.kind().j_kappa_next(triple.p());
            let integrand = |r: f64| {
                let pi = eval_pi_matrix(triple, r)?;
                Ok(&pi * &jn * pi.adjoint())
            };
            let spread = 1.0 + triple.q_norm() + triple.seed().c().abs();
            let panels = (x.abs() * spread).ceil().max(1.0) as usize;
            let integral = quad::integrate(integrand, 0.0, x, panels, QuadTol::default())?;
            Ok(matlin::hermitian_part(&(triple.s0() + integral)))
        }
    }
}

/// Everything at a fixed `x` that downstream evaluations share.
#[derive(Debug, Clone)]
pub struct GbdtState {
    pub x: f64,
    pub lambda1: CMatrix,
    pub lambda2: CMatrix,
    pub s: CMatrix,
    pub s_inv: HermitianInverse,
}

impl GbdtState {
    pub fn at(triple: &GbdtTriple, x: f64) -> Result<Self> {
        Self::at_with(triple, x, default_s_method(triple))
    }

    pub fn at_with(triple: &GbdtTriple, x: f64, method: SMethod) -> Result<Self> {
        let (lambda1, lambda2) = eval_pi(triple, x)?;
        let s = eval_s(triple, x, method)?;
        let s_inv = HermitianInverse::new(&s, x)?;
        Ok(GbdtState {
            x,
            lambda1,
            lambda2,
            s,
            s_inv,
        })
    }

    pub fn pi(&self) -> CMatrix {
        join_columns(&self.lambda1, &self.lambda2)
    }

    /// `Π(x)^* S(x)^{-1}`.
    pub fn pi_star_s_inv(&self) -> CMatrix {
        self.pi().adjoint() * &self.s_inv.inverse
    }

    /// `ṽ(x)`.
    pub fn potential(&self, triple: &GbdtTriple) -> CMatrix {
        let core = self.lambda1.adjoint() * &self.s_inv.inverse * &self.lambda2;
        let v = triple.seed().eval(self.x);
        match triple.kind() {
            SystemKind::SelfAdjoint => v - core * c64(0.0, 2.0),
            SystemKind::SkewSelfAdjoint => v + core * c64(2.0, 0.0),
        }
    }

    /// `w_A(x, z)`.
    pub fn transfer(&self, triple: &GbdtTriple, z: Complex64) -> Result<CMatrix> {
        check_not_pole(triple, z)?;
        let n = triple.n();
        let pi = self.pi();
        let shifted = triple.a() - matlin::identity(n) * z;
        let resolvent_pi = matlin::solve(&shifted, &pi, "A - zI")?;
        let jk = triple.kind().j_kappa(triple.p());
        let corr = jk * pi.adjoint() * &self.s_inv.inverse * resolvent_pi;
        Ok(matlin::identity(2 * triple.p()) - corr * I)
    }
}

fn check_not_pole(triple: &GbdtTriple, z: Complex64) -> Result<()> {
    let tol = 1e-12 * (1.0 + z.norm());
    if triple
        .a_eigenvalues()
        .iter()
        .any(|&l| (l - z).norm() <= tol)
    {
        return Err(Error::Pole {
            z,
            what: "z is an eigenvalue of A",
        });
    }
    Ok(())
}

/// `w_A(x, z) = I - i j^κ Π^* S^{-1} (A - zI)^{-1} Π`.
pub fn eval_transfer(triple: &GbdtTriple, x: f64, z: Complex64) -> Result<CMatrix> {
    check_not_pole(triple, z)?;
    GbdtState::at(triple, x)?.transfer(triple, z)
}

/// The `p×p` block `ṽ(x)`.
pub fn eval_potential(triple: &GbdtTriple, x: f64) -> Result<CMatrix> {
    Ok(GbdtState::at(triple, x)?.potential(triple))
}

/// `Ṽ = [[0, ṽ], [ṽ^*, 0]]`.
pub fn full_potential(v: &CMatrix) -> CMatrix {
    off_diagonal(v)
}

/// `Ṽ` from the projector formula rather than the block formula; used as a
/// cross-check of the block assembly.
pub fn full_potential_projector(triple: &GbdtTriple, state: &GbdtState) -> CMatrix {
    let p = triple.p();
    let j = crate::seed::signature(p);
    let pi = state.pi();
    let m = pi.adjoint() * &state.s_inv.inverse * &pi;
    let v = triple.seed().eval_full(state.x);
    match triple.kind() {
        SystemKind::SelfAdjoint => v + (&m * &j - &j * &m) * I,
        SystemKind::SkewSelfAdjoint => v + &m - &j * &m * &j,
    }
}

/// `ω(x) = -i(a + 2Λ1^* S^{-1} Λ2)`, real under the Dirac–Weyl hypotheses.
pub fn eval_omega(triple: &GbdtTriple, x: f64) -> Result<f64> {
    triple.dirac_weyl_hypotheses().map_err(Error::Hypothesis)?;
    omega_from_state(triple, &GbdtState::at(triple, x)?)
}

pub(crate) fn omega_from_state(triple: &GbdtTriple, state: &GbdtState) -> Result<f64> {
    let w = state.potential(triple)[(0, 0)] * (-I);
    if !(w.im.abs() <= OMEGA_IMAG_TOL) {
        return Err(Error::Consistency {
            what: "imaginary part of ω",
            discrepancy: w.im.abs(),
            tolerance: OMEGA_IMAG_TOL,
        });
    }
    Ok(w.re)
}

/// `‖A S - S A^* - iΠ j^κ Π^*‖` at a state.
pub fn identity_residual(triple: &GbdtTriple, pi: &CMatrix, s: &CMatrix) -> f64 {
    let a = triple.a();
    let rhs = crate::seed::identity_rhs(pi, triple.kind(), triple.p());
    spectral_norm(&(a * s - s * a.adjoint() - rhs))
}
