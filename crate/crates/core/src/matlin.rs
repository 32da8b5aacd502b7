//! Dense complex matrix kernel.
//!
//! Everything downstream works with [`CMatrix`] (a dynamically sized
//! `nalgebra` matrix of `Complex64`). Norms are spectral (operator 2-) norms
//! unless a function name says otherwise.
//!
//! The three nontrivial primitives are the matrix exponential (Padé 13 with
//! scaling and squaring), the principal square root (Schur method) and the
//! Sylvester solver (Bartels–Stewart). The latter two sit on a complex Schur
//! decomposition implemented here: Householder reduction to Hessenberg form
//! followed by single-shift complex QR sweeps.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;

pub const I: Complex64 = Complex64::new(0.0, 1.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Largest spectral norm accepted by [`mat_exp`]; `e^700` is close to the
/// top of the double range.
pub const MAT_EXP_NORM_CAP: f64 = 700.0;

/// Relative eigenvalue gap below which a Sylvester equation is treated as
/// singular (relative to the larger of the two coefficient norms).
pub const SYLVESTER_GAP: f64 = 1e-8;

/// Condition number above which a Hermitian matrix is refused for inversion.
pub const MAX_HERMITIAN_CONDITION: f64 = 1e12;

#[inline]
pub fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

pub fn zeros(r: usize, c: usize) -> CMatrix {
    CMatrix::zeros(r, c)
}

pub fn from_real_rows(rows: &[&[f64]]) -> CMatrix {
    let r = rows.len();
    let c = rows.first().map_or(0, |row| row.len());
    CMatrix::from_fn(r, c, |i, j| c64(rows[i][j], 0.0))
}

pub fn diag(entries: &[Complex64]) -> CMatrix {
    let n = entries.len();
    CMatrix::from_fn(n, n, |i, j| if i == j { entries[i] } else { ZERO })
}

/// Principal scalar square root with the cut approached from above: a
/// negative real argument (with either sign of zero imaginary part) maps to
/// the positive imaginary axis.
pub fn csqrt(z: Complex64) -> Complex64 {
    if z.im == 0.0 {
        if z.re >= 0.0 {
            c64(z.re.sqrt(), 0.0)
        } else {
            c64(0.0, (-z.re).sqrt())
        }
    } else {
        z.sqrt()
    }
}

pub fn is_square(m: &CMatrix) -> bool {
    m.nrows() == m.ncols()
}

fn require_square(op: &'static str, m: &CMatrix) -> Result<()> {
    if is_square(m) {
        Ok(())
    } else {
        Err(Error::Shape {
            op,
            detail: format!("expected a square matrix, got {}x{}", m.nrows(), m.ncols()),
        })
    }
}

pub fn is_finite(m: &CMatrix) -> bool {
    m.iter().all(|v| v.re.is_finite() && v.im.is_finite())
}

pub fn one_norm(m: &CMatrix) -> f64 {
    (0..m.ncols())
        .map(|j| m.column(j).iter().map(|v| v.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

pub fn inf_norm(m: &CMatrix) -> f64 {
    (0..m.nrows())
        .map(|i| m.row(i).iter().map(|v| v.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|v| v.norm()).fold(0.0, f64::max)
}

/// Spectral norm (largest singular value).
pub fn spectral_norm(m: &CMatrix) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    if m.nrows() == 1 || m.ncols() == 1 {
        return m.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
    }
    m.clone()
        .svd(false, false)
        .singular_values
        .iter()
        .copied()
        .fold(0.0, f64::max)
}

pub fn hermitian_part(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()) * c64(0.5, 0.0)
}

/// Eigenvalues of the Hermitian part of `m`, ascending.
pub fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    if m.is_empty() {
        return Vec::new();
    }
    let mut ev: Vec<f64> = SymmetricEigen::new(hermitian_part(m))
        .eigenvalues
        .iter()
        .copied()
        .collect();
    ev.sort_by(f64::total_cmp);
    ev
}

pub fn inverse(m: &CMatrix, what: &'static str) -> Result<CMatrix> {
    require_square("inverse", m)?;
    let inv = m
        .clone()
        .lu()
        .try_inverse()
        .ok_or(Error::Singular { what })?;
    if is_finite(&inv) {
        Ok(inv)
    } else {
        Err(Error::Singular { what })
    }
}

pub fn solve(m: &CMatrix, rhs: &CMatrix, what: &'static str) -> Result<CMatrix> {
    require_square("solve", m)?;
    if m.nrows() != rhs.nrows() {
        return Err(Error::Shape {
            op: "solve",
            detail: format!("{}x{} against {} rows", m.nrows(), m.ncols(), rhs.nrows()),
        });
    }
    let x = m.clone().lu().solve(rhs).ok_or(Error::Singular { what })?;
    if is_finite(&x) {
        Ok(x)
    } else {
        Err(Error::Singular { what })
    }
}

/// Inverse of a Hermitian matrix together with its spectral data.
#[derive(Debug, Clone)]
pub struct HermitianInverse {
    pub inverse: CMatrix,
    pub min_eig: f64,
    pub max_eig: f64,
    pub condition: f64,
}

impl HermitianInverse {
    /// Factorizes `s` (assumed Hermitian) and refuses when the condition
    /// number exceeds [`MAX_HERMITIAN_CONDITION`]. `x` only labels errors.
    pub fn new(s: &CMatrix, x: f64) -> Result<Self> {
        require_square("hermitian inverse", s)?;
        let ev = hermitian_eigenvalues(s);
        let min_eig = ev.first().copied().unwrap_or(0.0);
        let max_eig = ev.last().copied().unwrap_or(0.0);
        let min_abs = ev.iter().map(|v| v.abs()).fold(f64::INFINITY, f64::min);
        let max_abs = ev.iter().map(|v| v.abs()).fold(0.0, f64::max);
        let condition = if min_abs > 0.0 {
            max_abs / min_abs
        } else {
            f64::INFINITY
        };
        if !(condition <= MAX_HERMITIAN_CONDITION) {
            return Err(Error::SingularS {
                x,
                min_abs_eig: min_abs,
                condition,
            });
        }
        let inv = inverse(s, "S(x)")?;
        Ok(HermitianInverse {
            inverse: hermitian_part(&inv),
            min_eig,
            max_eig,
            condition,
        })
    }
}

// ---------------------------------------------------------------------------
// Complex Schur decomposition

/// `m = q * t * q^*` with `q` unitary and `t` upper triangular.
#[derive(Debug, Clone)]
pub struct ComplexSchur {
    pub q: CMatrix,
    pub t: CMatrix,
}

impl ComplexSchur {
    pub fn eigenvalues(&self) -> Vec<Complex64> {
        (0..self.t.nrows()).map(|i| self.t[(i, i)]).collect()
    }
}

fn hessenberg(m: &CMatrix) -> (CMatrix, CMatrix) {
    let n = m.nrows();
    let mut h = m.clone();
    let mut q = identity(n);
    for k in 0..n.saturating_sub(2) {
        let norm_x: f64 = (k + 1..n).map(|i| h[(i, k)].norm_sqr()).sum::<f64>().sqrt();
        if norm_x == 0.0 {
            continue;
        }
        let x0 = h[(k + 1, k)];
        let phase = if x0.norm() > 0.0 { x0 / x0.norm() } else { ONE };
        let alpha = -phase * norm_x;
        let mut v: Vec<Complex64> = (k + 1..n).map(|i| h[(i, k)]).collect();
        v[0] -= alpha;
        let vn: f64 = v.iter().map(|e| e.norm_sqr()).sum::<f64>().sqrt();
        if vn == 0.0 {
            continue;
        }
        for e in v.iter_mut() {
            *e /= vn;
        }
        // h <- (I - 2 v v^*) h
        for j in 0..n {
            let dot: Complex64 = v
                .iter()
                .enumerate()
                .map(|(r, vr)| vr.conj() * h[(k + 1 + r, j)])
                .sum();
            for (r, vr) in v.iter().enumerate() {
                h[(k + 1 + r, j)] -= 2.0 * vr * dot;
            }
        }
        // h <- h (I - 2 v v^*), q <- q (I - 2 v v^*)
        for mat in [&mut h, &mut q] {
            for i in 0..n {
                let dot: Complex64 = v
                    .iter()
                    .enumerate()
                    .map(|(r, vr)| mat[(i, k + 1 + r)] * vr)
                    .sum();
                for (r, vr) in v.iter().enumerate() {
                    mat[(i, k + 1 + r)] -= 2.0 * dot * vr.conj();
                }
            }
        }
        for i in k + 2..n {
            h[(i, k)] = ZERO;
        }
    }
    (h, q)
}

fn givens(x: Complex64, y: Complex64) -> (f64, Complex64) {
    if y == ZERO {
        return (1.0, ZERO);
    }
    if x == ZERO {
        return (0.0, ONE);
    }
    let ax = x.norm();
    let r = ax.hypot(y.norm());
    (ax / r, (x / ax) * y.conj() / r)
}

pub fn schur(m: &CMatrix) -> Result<ComplexSchur> {
    require_square("schur", m)?;
    let n = m.nrows();
    if !is_finite(m) {
        return Err(Error::NonFinite { op: "schur" });
    }
    let (mut h, mut q) = hessenberg(m);
    let eps = f64::EPSILON;
    let tiny = f64::MIN_POSITIVE / eps;
    let scale = max_abs(m).max(tiny);
    let mut hi = n.saturating_sub(1);
    let mut iter = 0usize;
    let mut total = 0usize;
    while hi > 0 {
        // locate the start of the active unreduced block
        let mut lo = hi;
        while lo > 0 {
            let sub = h[(lo, lo - 1)].norm();
            let diag = h[(lo, lo)].norm() + h[(lo - 1, lo - 1)].norm();
            if sub <= eps * diag || sub <= eps * 1e-3 * scale {
                h[(lo, lo - 1)] = ZERO;
                break;
            }
            lo -= 1;
        }
        if lo == hi {
            hi -= 1;
            iter = 0;
            continue;
        }
        iter += 1;
        total += 1;
        if total > 100 * n.max(1) {
            return Err(Error::NoConvergence {
                op: "schur",
                detail: format!("QR sweeps exceeded {}", 100 * n),
            });
        }
        let a = h[(hi - 1, hi - 1)];
        let b = h[(hi - 1, hi)];
        let c = h[(hi, hi - 1)];
        let d = h[(hi, hi)];
        let shift = if iter % 11 == 10 {
            // exceptional shift
            d + c.norm() * c64(0.75, 0.4)
        } else {
            let half = (a - d) * 0.5;
            let disc = (half * half + b * c).sqrt();
            let m1 = (a + d) * 0.5 + disc;
            let m2 = (a + d) * 0.5 - disc;
            if (m1 - d).norm() <= (m2 - d).norm() {
                m1
            } else {
                m2
            }
        };
        let mut x = h[(lo, lo)] - shift;
        let mut y = h[(lo + 1, lo)];
        for k in lo..hi {
            let (cs, sn) = givens(x, y);
            let col0 = if k > lo { k - 1 } else { k };
            for j in col0..n {
                let t1 = h[(k, j)];
                let t2 = h[(k + 1, j)];
                h[(k, j)] = cs * t1 + sn * t2;
                h[(k + 1, j)] = -sn.conj() * t1 + cs * t2;
            }
            let row1 = (k + 2).min(hi);
            for i in 0..=row1 {
                let t1 = h[(i, k)];
                let t2 = h[(i, k + 1)];
                h[(i, k)] = t1 * cs + t2 * sn.conj();
                h[(i, k + 1)] = -t1 * sn + t2 * cs;
            }
            for i in 0..n {
                let t1 = q[(i, k)];
                let t2 = q[(i, k + 1)];
                q[(i, k)] = t1 * cs + t2 * sn.conj();
                q[(i, k + 1)] = -t1 * sn + t2 * cs;
            }
            if k > lo {
                h[(k + 1, k - 1)] = ZERO;
            }
            if k + 1 < hi {
                x = h[(k + 1, k)];
                y = h[(k + 2, k)];
            }
        }
    }
    for j in 0..n {
        for i in j + 1..n {
            h[(i, j)] = ZERO;
        }
    }
    Ok(ComplexSchur { q, t: h })
}

pub fn eigenvalues(m: &CMatrix) -> Result<Vec<Complex64>> {
    Ok(schur(m)?.eigenvalues())
}

// ---------------------------------------------------------------------------
// Matrix exponential

const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];
const THETA13: f64 = 5.371920351148152;

fn scaled(m: &CMatrix, s: f64) -> CMatrix {
    m * c64(s, 0.0)
}

/// `exp(m)` by scaling and squaring with a degree-13 Padé approximant.
pub fn mat_exp(m: &CMatrix) -> Result<CMatrix> {
    require_square("mat_exp", m)?;
    let n = m.nrows();
    if n == 0 {
        return Ok(m.clone());
    }
    if !is_finite(m) {
        return Err(Error::NonFinite { op: "mat_exp" });
    }
    let n1 = one_norm(m);
    let bound = (n1 * inf_norm(m)).sqrt();
    if bound > MAT_EXP_NORM_CAP {
        let norm = spectral_norm(m);
        if norm > MAT_EXP_NORM_CAP {
            return Err(Error::Range {
                op: "mat_exp",
                value: norm,
                cap: MAT_EXP_NORM_CAP,
            });
        }
    }
    let squarings = if n1 > THETA13 {
        (n1 / THETA13).log2().ceil().max(0.0) as i32
    } else {
        0
    };
    let a = scaled(m, 0.5f64.powi(squarings));
    let b = &PADE13;
    let id = identity(n);
    let a2 = &a * &a;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;
    let inner_u = &a6 * (scaled(&a6, b[13]) + scaled(&a4, b[11]) + scaled(&a2, b[9]));
    let u = &a
        * (inner_u + scaled(&a6, b[7]) + scaled(&a4, b[5]) + scaled(&a2, b[3]) + scaled(&id, b[1]));
    let inner_v = &a6 * (scaled(&a6, b[12]) + scaled(&a4, b[10]) + scaled(&a2, b[8]));
    let v = inner_v + scaled(&a6, b[6]) + scaled(&a4, b[4]) + scaled(&a2, b[2]) + scaled(&id, b[0]);
    let mut r = solve(&(&v - &u), &(&v + &u), "Padé denominator")?;
    for _ in 0..squarings {
        r = &r * &r;
    }
    if is_finite(&r) {
        Ok(r)
    } else {
        Err(Error::NonFinite { op: "mat_exp" })
    }
}

// ---------------------------------------------------------------------------
// Principal square root

/// Principal square root by the Schur method.
///
/// Refuses matrices with an eigenvalue on the closed negative real axis.
pub fn principal_sqrt(m: &CMatrix) -> Result<CMatrix> {
    require_square("principal_sqrt", m)?;
    let n = m.nrows();
    if n == 0 {
        return Ok(m.clone());
    }
    let ComplexSchur { q, t } = schur(m)?;
    let scale = spectral_norm(m);
    for i in 0..n {
        let l = t[(i, i)];
        let on_cut = l.re <= 0.0 && l.im.abs() <= 1e-12 * l.norm();
        if l.norm() <= 1e-14 * scale || on_cut {
            return Err(Error::BranchCut { eigenvalue: l });
        }
    }
    let mut r = zeros(n, n);
    for j in 0..n {
        r[(j, j)] = csqrt(t[(j, j)]);
        for i in (0..j).rev() {
            let mut s = t[(i, j)];
            for k in i + 1..j {
                s -= r[(i, k)] * r[(k, j)];
            }
            r[(i, j)] = s / (r[(i, i)] + r[(j, j)]);
        }
    }
    let x = &q * r * q.adjoint();
    let residual = spectral_norm(&(&x * &x - m));
    let tolerance = 1e-10 * (1.0 + scale);
    if !(residual <= tolerance) {
        return Err(Error::Residual {
            what: "principal_sqrt",
            residual,
            tolerance,
        });
    }
    Ok(x)
}

// ---------------------------------------------------------------------------
// Sylvester equation

/// Bartels–Stewart solver for `A X - X B = C` with the Schur forms of `A`
/// and `B` computed once and reused across right-hand sides.
#[derive(Debug, Clone)]
pub struct SylvesterSolver {
    a: ComplexSchur,
    b: ComplexSchur,
}

impl SylvesterSolver {
    pub fn new(a: &CMatrix, b: &CMatrix) -> Result<Self> {
        require_square("solve_sylvester", a)?;
        require_square("solve_sylvester", b)?;
        let sa = schur(a)?;
        let sb = schur(b)?;
        let gap = SYLVESTER_GAP * spectral_norm(a).max(spectral_norm(b));
        for alpha in sa.eigenvalues() {
            for beta in sb.eigenvalues() {
                if (alpha - beta).norm() <= gap {
                    return Err(Error::SylvesterSingular {
                        left: alpha,
                        right: beta,
                    });
                }
            }
        }
        Ok(SylvesterSolver { a: sa, b: sb })
    }

    pub fn solve(&self, c: &CMatrix) -> Result<CMatrix> {
        let n = self.a.t.nrows();
        let m = self.b.t.nrows();
        if c.nrows() != n || c.ncols() != m {
            return Err(Error::Shape {
                op: "solve_sylvester",
                detail: format!("C is {}x{}, expected {}x{}", c.nrows(), c.ncols(), n, m),
            });
        }
        let ta = &self.a.t;
        let tb = &self.b.t;
        let f = self.a.q.adjoint() * c * &self.b.q;
        let mut y = zeros(n, m);
        for k in 0..m {
            let mut rhs: Vec<Complex64> = (0..n).map(|i| f[(i, k)]).collect();
            for l in 0..k {
                let t = tb[(l, k)];
                for (i, r) in rhs.iter_mut().enumerate() {
                    *r += y[(i, l)] * t;
                }
            }
            let beta = tb[(k, k)];
            for i in (0..n).rev() {
                let mut s = rhs[i];
                for j in i + 1..n {
                    s -= ta[(i, j)] * y[(j, k)];
                }
                y[(i, k)] = s / (ta[(i, i)] - beta);
            }
        }
        let x = &self.a.q * y * self.b.q.adjoint();
        if is_finite(&x) {
            Ok(x)
        } else {
            Err(Error::NonFinite {
                op: "solve_sylvester",
            })
        }
    }
}

/// Unique `X` with `A X - X B = C`.
pub fn solve_sylvester(a: &CMatrix, b: &CMatrix, c: &CMatrix) -> Result<CMatrix> {
    SylvesterSolver::new(a, b)?.solve(c)
}
