//! Explicit fundamental solutions of the seed and transformed Dirac systems.
//!
//! The seed solution is `u(x, z) = e^{icxj} Z(z) e^{ixζj}`; the transformed
//! one is `w_A(x, z) u(x, z)`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::gbdt::GbdtState;
use crate::matlin::{self, c64, csqrt, CMatrix, I};
use crate::seed::{signature, GbdtTriple, SeedPotential, SystemKind};

/// Which root of `ζ^2` is taken.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ZetaBranch {
    /// `Im ζ > 0` for `z ∈ C₊`, extended to the real axis by continuity.
    #[default]
    Upper,
    /// The negative of [`ZetaBranch::Upper`].
    Lower,
}

/// `ζ(z)^2 = (z - c)^2 ∓ |a|^2`.
pub fn zeta_squared(z: Complex64, seed: &SeedPotential, kind: SystemKind) -> Complex64 {
    let w = z - seed.c();
    w * w + kind.root_sign() * seed.a().norm_sqr()
}

/// `ζ(z)` on the requested branch.
pub fn zeta(
    z: Complex64,
    seed: &SeedPotential,
    kind: SystemKind,
    branch: ZetaBranch,
) -> Result<Complex64> {
    let sq = zeta_squared(z, seed, kind);
    let scale = 1.0 + (z - seed.c()).norm_sqr() + seed.a().norm_sqr();
    if sq.norm() <= 1e-14 * scale {
        return Err(Error::BranchPoint { z });
    }
    let mut r = csqrt(sq);
    // on the real axis the upper branch continues from Im z > 0
    if r.im < 0.0 || (r.im == 0.0 && z.im == 0.0 && z.re < seed.c()) {
        r = -r;
    }
    Ok(match branch {
        ZetaBranch::Upper => r,
        ZetaBranch::Lower => -r,
    })
}

/// Coefficients `[[α, β], [γ, δ]]` of `Z(z)`; each acts as a multiple of `I_p`.
fn z_coefficients(
    z: Complex64,
    zeta: Complex64,
    seed: &SeedPotential,
    kind: SystemKind,
) -> [Complex64; 4] {
    let a = seed.a();
    let w = z - seed.c();
    match kind {
        SystemKind::SelfAdjoint => [a, a, zeta - w, -zeta - w],
        SystemKind::SkewSelfAdjoint => [I * a, I * a, w - zeta, w + zeta],
    }
}

fn block2(p: usize, k: [Complex64; 4]) -> CMatrix {
    let mut m = matlin::zeros(2 * p, 2 * p);
    for i in 0..p {
        m[(i, i)] = k[0];
        m[(i, p + i)] = k[1];
        m[(p + i, i)] = k[2];
        m[(p + i, p + i)] = k[3];
    }
    m
}

/// `Z(z)` together with the resolved `ζ(z)`.
#[derive(Debug, Clone)]
pub struct SeedFundamental {
    pub z: Complex64,
    pub zeta: Complex64,
    pub z_mat: CMatrix,
    coeff: [Complex64; 4],
    kind: SystemKind,
    seed: SeedPotential,
}

impl SeedFundamental {
    pub fn new(
        seed: &SeedPotential,
        kind: SystemKind,
        z: Complex64,
        branch: ZetaBranch,
    ) -> Result<Self> {
        let zeta = zeta(z, seed, kind, branch)?;
        let coeff = z_coefficients(z, zeta, seed, kind);
        Ok(SeedFundamental {
            z,
            zeta,
            z_mat: block2(seed.p(), coeff),
            coeff,
            kind,
            seed: *seed,
        })
    }

    /// `Z(z)^{-1}` in closed form.
    pub fn z_inverse(&self) -> CMatrix {
        let [al, be, ga, de] = self.coeff;
        let det = al * de - be * ga;
        block2(self.seed.p(), [de / det, -be / det, -ga / det, al / det])
    }

    /// `u(x, z)`.
    pub fn at(&self, x: f64) -> Result<CMatrix> {
        let p = self.seed.p();
        let c = self.seed.c();
        let mut u = self.z_mat.clone();
        let row = [c64(0.0, c * x).exp(), c64(0.0, -c * x).exp()];
        let col = [(I * self.zeta * x).exp(), (-I * self.zeta * x).exp()];
        for i in 0..2 * p {
            for k in 0..2 * p {
                u[(i, k)] *= row[i / p] * col[k / p];
            }
        }
        if matlin::is_finite(&u) {
            Ok(u)
        } else {
            Err(Error::NonFinite {
                op: "seed_fundamental",
            })
        }
    }

    /// `u(x, z) [I_p; 0] = e^{icxj} Z [I_p; 0] e^{ixζ}`, without the
    /// exponentially growing second column block.
    pub fn decaying_columns(&self, x: f64) -> CMatrix {
        let p = self.seed.p();
        let c = self.seed.c();
        let e = (I * self.zeta * x).exp();
        let mut out = matlin::zeros(2 * p, p);
        for i in 0..p {
            out[(i, i)] = self.coeff[0] * c64(0.0, c * x).exp() * e;
            out[(p + i, i)] = self.coeff[2] * c64(0.0, -c * x).exp() * e;
        }
        out
    }

    pub fn kind(&self) -> SystemKind {
        self.kind
    }
}

/// `u(x, z) = e^{icxj} Z(z) e^{ixζj}`.
pub fn seed_fundamental(
    seed: &SeedPotential,
    kind: SystemKind,
    x: f64,
    z: Complex64,
    branch: ZetaBranch,
) -> Result<CMatrix> {
    SeedFundamental::new(seed, kind, z, branch)?.at(x)
}

/// Coefficient matrix `H` of the Dirac system `y' = H y` with full
/// potential `V`.
pub fn dirac_coefficient(kind: SystemKind, z: Complex64, v_full: &CMatrix) -> CMatrix {
    let p = v_full.nrows() / 2;
    let j = signature(p);
    match kind {
        SystemKind::SelfAdjoint => (&j * z + &j * v_full) * I,
        SystemKind::SkewSelfAdjoint => &j * (I * z) + &j * v_full,
    }
}

/// `ũ(x, z) = w_A(x, z) u(x, z)`.
pub fn transformed_fundamental(
    triple: &GbdtTriple,
    x: f64,
    z: Complex64,
    branch: ZetaBranch,
) -> Result<CMatrix> {
    let sf = SeedFundamental::new(triple.seed(), triple.kind(), z, branch)?;
    let w = GbdtState::at(triple, x)?.transfer(triple, z)?;
    Ok(w * sf.at(x)?)
}

/// `W(x, z) = w_A(x, z) u(x, z) Z(z)^{-1} w_A(0, z)^{-1}`, so `W(0, z) = I`.
pub fn normalized_fundamental(
    triple: &GbdtTriple,
    x: f64,
    z: Complex64,
    branch: ZetaBranch,
) -> Result<CMatrix> {
    let sf = SeedFundamental::new(triple.seed(), triple.kind(), z, branch)?;
    let w0 = GbdtState::at(triple, 0.0)?.transfer(triple, z)?;
    let w0_inv = matlin::inverse(&w0, "w_A(0, z)")?;
    if x == 0.0 {
        return Ok(matlin::identity(2 * triple.p()));
    }
    let wx = GbdtState::at(triple, x)?.transfer(triple, z)?;
    Ok(wx * sf.at(x)? * sf.z_inverse() * w0_inv)
}

/// `ψ(x, ξ) = Π(x)^* S(x)^{-1} e^{-ξA}`, a `2p×n` matrix whose columns each
/// solve the dynamical system.
pub fn dynamical_solution(triple: &GbdtTriple, x: f64, xi: f64) -> Result<CMatrix> {
    let st = GbdtState::at(triple, x)?;
    dynamical_from_state(triple, &st, xi)
}

pub(crate) fn dynamical_from_state(
    triple: &GbdtTriple,
    state: &GbdtState,
    xi: f64,
) -> Result<CMatrix> {
    let e = matlin::mat_exp(&(triple.a() * c64(-xi, 0.0)))?;
    Ok(state.pi_star_s_inv() * e)
}

/// `ψ(x, ξ) g` for a constant vector `g`.
pub fn dynamical_column(triple: &GbdtTriple, x: f64, xi: f64, g: &CMatrix) -> Result<CMatrix> {
    let psi = dynamical_solution(triple, x, xi)?;
    if g.nrows() != psi.ncols() || g.ncols() != 1 {
        return Err(Error::Shape {
            op: "dynamical_column",
            detail: format!("g is {:?}, expected {}x1", g.shape(), psi.ncols()),
        });
    }
    Ok(psi * g)
}
