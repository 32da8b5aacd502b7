//! Weyl–Titchmarsh functions of the transformed systems, computed as a
//! quotient of the blocks of `Y(z)` and, independently, through a
//! linear-fractional realization.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::gbdt::GbdtState;
use crate::matlin::{self, c64, hermitian_eigenvalues, spectral_norm, CMatrix, I, ONE};
use crate::seed::{GbdtTriple, SeedPotential, SystemKind};
use crate::solutions::{self, SeedFundamental, ZetaBranch};

/// Largest accepted condition number of `Y1(z)`.
pub const MAX_Y1_CONDITION: f64 = 1e12;
/// Both sides of the realization identity must agree to this relative level.
pub const LFT_CROSS_CHECK: f64 = 1e-9;
/// Quotient and realization routes must agree to this relative level.
pub const ROUTE_AGREEMENT: f64 = 1e-8;

/// `ζ(z)` on the branch used for Weyl theory.
pub fn zeta_branch(z: Complex64, seed: &SeedPotential, kind: SystemKind) -> Result<Complex64> {
    solutions::zeta(z, seed, kind, ZetaBranch::Upper)
}

/// `D + (D C1 - C2)(A× - zI)^{-1} B` with `A× = A - B C1`.
#[derive(Debug, Clone)]
pub struct Lft {
    pub d: CMatrix,
    pub c1: CMatrix,
    pub c2: CMatrix,
    pub b: CMatrix,
    pub a: CMatrix,
    pub across: CMatrix,
}

/// Prepares the realization of
/// `(D - C2 (A - zI)^{-1} B)(I - C1 (A - zI)^{-1} B)^{-1}`.
pub fn lft_realize(d: CMatrix, c1: CMatrix, c2: CMatrix, b: CMatrix, a: CMatrix) -> Result<Lft> {
    let p = d.nrows();
    let n = a.nrows();
    let ok = matlin::is_square(&d)
        && matlin::is_square(&a)
        && c1.shape() == (p, n)
        && c2.shape() == (p, n)
        && b.shape() == (n, p);
    if !ok {
        return Err(Error::Shape {
            op: "lft_realize",
            detail: format!(
                "D {:?}, C1 {:?}, C2 {:?}, B {:?}, A {:?}",
                d.shape(),
                c1.shape(),
                c2.shape(),
                b.shape(),
                a.shape()
            ),
        });
    }
    let across = &a - &b * &c1;
    Ok(Lft {
        d,
        c1,
        c2,
        b,
        a,
        across,
    })
}

fn near_spectrum(m: &CMatrix, z: Complex64) -> Result<bool> {
    let tol = 1e-12 * (1.0 + z.norm() + spectral_norm(m));
    Ok(matlin::eigenvalues(m)?
        .iter()
        .any(|&l| (l - z).norm() <= tol))
}

impl Lft {
    /// The realization side.
    pub fn realized(&self, z: Complex64) -> Result<CMatrix> {
        let n = self.a.nrows();
        if n == 0 {
            return Ok(self.d.clone());
        }
        if near_spectrum(&self.across, z)? {
            return Err(Error::Pole {
                z,
                what: "z is an eigenvalue of A×",
            });
        }
        let shifted = &self.across - matlin::identity(n) * z;
        let rb = matlin::solve(&shifted, &self.b, "A× - zI")?;
        Ok(&self.d + (&self.d * &self.c1 - &self.c2) * rb)
    }

    /// The quotient side; `None` when `z` is an eigenvalue of `A`.
    pub fn quotient(&self, z: Complex64) -> Result<Option<CMatrix>> {
        let n = self.a.nrows();
        let p = self.d.nrows();
        if n == 0 {
            return Ok(Some(self.d.clone()));
        }
        if near_spectrum(&self.a, z)? {
            return Ok(None);
        }
        let shifted = &self.a - matlin::identity(n) * z;
        let rb = matlin::solve(&shifted, &self.b, "A - zI")?;
        let num = &self.d - &self.c2 * &rb;
        let den = matlin::identity(p) - &self.c1 * &rb;
        let den_inv = matlin::inverse(&den, "I - C1 (A - zI)^{-1} B").map_err(|_| Error::Pole {
            z,
            what: "I - C1 (A - zI)^{-1} B is singular",
        })?;
        Ok(Some(num * den_inv))
    }

    /// Realization side, cross-checked against the quotient side when the
    /// latter is defined. Returns the value and the relative discrepancy.
    pub fn eval_checked(&self, z: Complex64) -> Result<(CMatrix, Option<f64>)> {
        let right = self.realized(z)?;
        let disc = match self.quotient(z)? {
            None => None,
            Some(left) => {
                let scale = spectral_norm(&right).max(spectral_norm(&left));
                let d = spectral_norm(&(&left - &right));
                let rel = if scale > 0.0 { d / scale } else { 0.0 };
                if !(rel <= LFT_CROSS_CHECK) {
                    return Err(Error::Consistency {
                        what: "linear-fractional realization",
                        discrepancy: rel,
                        tolerance: LFT_CROSS_CHECK,
                    });
                }
                Some(rel)
            }
        };
        Ok((right, disc))
    }

    pub fn eval(&self, z: Complex64) -> Result<CMatrix> {
        self.eval_checked(z).map(|(v, _)| v)
    }
}

/// Route by which a Weyl value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WeylMethod {
    YQuotient,
    Realization,
}

#[derive(Debug, Clone)]
pub struct WeylValue {
    pub z: Complex64,
    pub phi: CMatrix,
    pub kind: SystemKind,
    pub method: WeylMethod,
}

/// Realization data at one `z`.
#[derive(Debug, Clone)]
pub struct WeylRealization {
    pub z: Complex64,
    pub h: Complex64,
    /// Scalar in front of the realization.
    pub prefactor: Complex64,
    pub lft: Lft,
}

fn require_weyl_domain(triple: &GbdtTriple, z: Complex64) -> Result<()> {
    if !triple.s0_positive() {
        return Err(Error::NotPositive {
            min_eig: triple.s0_min_eig(),
        });
    }
    if !(z.im > 0.0) {
        return Err(Error::Hypothesis(format!(
            "Weyl functions are evaluated in the open upper half-plane, got z = {z}"
        )));
    }
    Ok(())
}

/// `Θ = (1/√2)[[I, -I], [I, I]]`.
pub fn theta(p: usize) -> CMatrix {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    CMatrix::from_fn(2 * p, 2 * p, |i, k| {
        if i % p != k % p {
            matlin::ZERO
        } else if i < p && k >= p {
            c64(-s, 0.0)
        } else {
            c64(s, 0.0)
        }
    })
}

/// `Y(z)` and the seed data it was built from.
#[derive(Debug, Clone)]
pub struct YData {
    pub y: CMatrix,
    pub y1_inv: CMatrix,
    pub seed_fundamental: SeedFundamental,
}

/// `Y(z) = Θ w_A(0, z) Z(z) [I; 0]` (self-adjoint) or
/// `w_A(0, z) Z(z) [I; 0]` (skew).
pub fn y_data(triple: &GbdtTriple, z: Complex64) -> Result<YData> {
    require_weyl_domain(triple, z)?;
    let p = triple.p();
    let sf = SeedFundamental::new(triple.seed(), triple.kind(), z, ZetaBranch::Upper)?;
    let w0 = GbdtState::at(triple, 0.0)?.transfer(triple, z)?;
    let mut y = w0 * sf.z_mat.columns(0, p);
    if triple.kind() == SystemKind::SelfAdjoint {
        y = theta(p) * y;
    }
    let y1 = y.rows(0, p).into_owned();
    let sv = y1.clone().svd(false, false).singular_values;
    let smax = sv.max();
    let smin = sv.min();
    let condition = if smin > 0.0 {
        smax / smin
    } else {
        f64::INFINITY
    };
    if !(condition <= MAX_Y1_CONDITION) {
        return Err(Error::SingularY { z, condition });
    }
    let y1_inv = matlin::inverse(&y1, "Y1(z)")?;
    Ok(YData {
        y,
        y1_inv,
        seed_fundamental: sf,
    })
}

/// `φ(z)` from the blocks of `Y(z)`.
pub fn weyl_via_y(triple: &GbdtTriple, z: Complex64) -> Result<WeylValue> {
    let yd = y_data(triple, z)?;
    let p = triple.p();
    let q = yd.y.rows(p, p) * &yd.y1_inv;
    let phi = match triple.kind() {
        SystemKind::SelfAdjoint => q * I,
        SystemKind::SkewSelfAdjoint => q,
    };
    Ok(WeylValue {
        z,
        phi,
        kind: triple.kind(),
        method: WeylMethod::YQuotient,
    })
}

/// Builds the realization data at `z`.
pub fn realization_data(triple: &GbdtTriple, z: Complex64) -> Result<WeylRealization> {
    require_weyl_domain(triple, z)?;
    let p = triple.p();
    let seed = triple.seed();
    let a = seed.a();
    let c = seed.c();
    let zeta = zeta_branch(z, seed, triple.kind())?;
    let pi0 = triple.pi0();
    let l1 = pi0.columns(0, p).into_owned();
    let l2 = pi0.columns(p, p).into_owned();
    let s0_inv = matlin::inverse(triple.s0(), "S(0)")?;
    let eye = matlin::identity(p);
    let (h, prefactor, d, c1, c2, b) = match triple.kind() {
        SystemKind::SelfAdjoint => {
            let h = zeta - z + c;
            let r2 = std::f64::consts::SQRT_2;
            let d = &eye * ((a + h) / r2);
            let c1 = (l1.adjoint() + l2.adjoint()) * &s0_inv * (I / (a - h));
            let c2 = (l1.adjoint() - l2.adjoint()) * &s0_inv * (I / r2);
            let b = &l1 * a + &l2 * h;
            (h, I * r2 / (a - h), d, c1, c2, b)
        }
        SystemKind::SkewSelfAdjoint => {
            let h = z - c - zeta;
            let d = &eye * h;
            let c1 = l1.adjoint() * &s0_inv * (ONE / a);
            let c2 = l2.adjoint() * &s0_inv * I;
            let b = &l1 * (I * a) + &l2 * h;
            (h, ONE / (I * a), d, c1, c2, b)
        }
    };
    let lft = lft_realize(d, c1, c2, b, triple.a().clone())?;
    Ok(WeylRealization {
        z,
        h,
        prefactor,
        lft,
    })
}

/// `φ(z)` from the linear-fractional realization, checked against the
/// quotient route wherever that route is defined.
pub fn weyl_realization(triple: &GbdtTriple, z: Complex64) -> Result<WeylValue> {
    let r = realization_data(triple, z)?;
    let phi = r.lft.eval(z)? * r.prefactor;
    match weyl_via_y(triple, z) {
        Ok(y) => {
            let rel = route_discrepancy(&phi, &y.phi);
            if !(rel <= ROUTE_AGREEMENT) {
                return Err(Error::Consistency {
                    what: "Weyl function routes",
                    discrepancy: rel,
                    tolerance: ROUTE_AGREEMENT,
                });
            }
        }
        Err(Error::SingularY { .. }) => {}
        Err(e) => return Err(e),
    }
    Ok(WeylValue {
        z,
        phi,
        kind: triple.kind(),
        method: WeylMethod::Realization,
    })
}

/// `‖a - b‖ / max(‖a‖, ‖b‖)`, zero when both vanish.
pub fn route_discrepancy(a: &CMatrix, b: &CMatrix) -> f64 {
    let scale = spectral_norm(a).max(spectral_norm(b));
    let d = spectral_norm(&(a - b));
    if scale > 0.0 {
        d / scale
    } else {
        d
    }
}

/// Smallest eigenvalue of `Im φ = (φ - φ^*)/(2i)`.
pub fn herglotz_min_eig(phi: &CMatrix) -> f64 {
    let im = (phi - phi.adjoint()) * c64(0.0, -0.5);
    hermitian_eigenvalues(&matlin::hermitian_part(&im))
        .first()
        .copied()
        .unwrap_or(0.0)
}

/// Half-plane level `M`: start from `‖Q‖ + ‖A‖ + 1` and halve while `Y1`
/// stays invertible on the probe segment, never going below `‖Q‖`.
pub fn half_plane_m(triple: &GbdtTriple) -> f64 {
    let floor = triple.q_norm();
    let mut m = triple.q_norm() + triple.a_norm() + 1.0;
    for _ in 0..8 {
        let cand = 0.5 * m;
        if cand < floor {
            break;
        }
        let ok = z_grid(cand).into_iter().all(|z| y_data(triple, z).is_ok());
        if !ok {
            break;
        }
        m = cand;
    }
    m
}

/// Ten points on `Im z = M + 1`, `Re z ∈ [-5, 5]`.
pub fn z_grid(m: f64) -> Vec<Complex64> {
    (0..10)
        .map(|k| c64(-5.0 + 10.0 * k as f64 / 9.0, m + 1.0))
        .collect()
}

/// Direct form of the membership integrand: `W(x,z) Θ^* [I; -iφ]`
/// (self-adjoint) or `W(x,z) [I; φ]` (skew).
pub fn membership_direct(
    triple: &GbdtTriple,
    z: Complex64,
    phi: &CMatrix,
    x: f64,
) -> Result<CMatrix> {
    let p = triple.p();
    let w = solutions::normalized_fundamental(triple, x, z, ZetaBranch::Upper)?;
    Ok(w * boundary_vector(triple.kind(), phi, p))
}

fn boundary_vector(kind: SystemKind, phi: &CMatrix, p: usize) -> CMatrix {
    let mut v = matlin::zeros(2 * p, p);
    v.view_mut((0, 0), (p, p)).copy_from(&matlin::identity(p));
    match kind {
        SystemKind::SelfAdjoint => {
            v.view_mut((p, 0), (p, p)).copy_from(&(phi * (-I)));
            theta(p).adjoint() * v
        }
        SystemKind::SkewSelfAdjoint => {
            v.view_mut((p, 0), (p, p)).copy_from(phi);
            v
        }
    }
}

/// Membership integrand evaluated without cancellation for the exact Weyl
/// function: the `φ` part goes through `w_A(x) u(x) [I; 0] Y1^{-1}` and only
/// the deviation `phi - φ` is propagated through `W(x, z)`.
#[derive(Debug, Clone)]
pub struct MembershipIntegrand<'a> {
    triple: &'a GbdtTriple,
    z: Complex64,
    y: YData,
    deviation: Option<CMatrix>,
}

impl<'a> MembershipIntegrand<'a> {
    pub fn new(triple: &'a GbdtTriple, z: Complex64, phi: &CMatrix) -> Result<Self> {
        let y = y_data(triple, z)?;
        let exact = weyl_via_y(triple, z)?.phi;
        let dev = phi - &exact;
        let deviation = if dev.iter().all(|v| *v == matlin::ZERO) {
            None
        } else {
            let p = triple.p();
            let mut v = matlin::zeros(2 * p, p);
            match triple.kind() {
                SystemKind::SelfAdjoint => {
                    v.view_mut((p, 0), (p, p)).copy_from(&(dev * (-I)));
                    v = theta(p).adjoint() * v;
                }
                SystemKind::SkewSelfAdjoint => v.view_mut((p, 0), (p, p)).copy_from(&dev),
            }
            Some(v)
        };
        Ok(MembershipIntegrand {
            triple,
            z,
            y,
            deviation,
        })
    }

    /// The `2p×p` matrix whose squared Frobenius norm is integrated.
    pub fn vector(&self, x: f64) -> Result<CMatrix> {
        let w = GbdtState::at(self.triple, x)?.transfer(self.triple, self.z)?;
        let mut out = w * self.y.seed_fundamental.decaying_columns(x) * &self.y.y1_inv;
        if let Some(dev) = &self.deviation {
            let wx = solutions::normalized_fundamental(self.triple, x, self.z, ZetaBranch::Upper)?;
            out += wx * dev;
        }
        Ok(out)
    }

    /// `trace(v^* v)` at `x`.
    pub fn density(&self, x: f64) -> Result<f64> {
        Ok(self.vector(x)?.iter().map(|v| v.norm_sqr()).sum())
    }
}
