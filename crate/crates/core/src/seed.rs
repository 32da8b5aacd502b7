//! Seed potentials, commuting roots and GBDT triples.
//!
//! The seed potential is `v(x) = a e^{2icx} I_p`. Given the generalized
//! eigenvalue matrix `A`, a root `Q` with `AQ = QA` and
//! `Q^2 = (A - cI)^2 ∓ |a|^2 I` turns the dual system into closed form, and the
//! blocks `f1, f2` (free) and `f3, f4` (derived) fix `Π(0)`.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matlin::{
    self, c64, csqrt, hermitian_eigenvalues, identity, spectral_norm, CMatrix, SylvesterSolver, I,
    ONE, ZERO,
};

/// Which family of Dirac systems is transformed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SystemKind {
    /// `y' = i(zj + jV)y`, κ = 1.
    SelfAdjoint,
    /// `y' = (izj + jV)y`, κ = 0.
    SkewSelfAdjoint,
}

impl SystemKind {
    pub fn kappa(self) -> u8 {
        match self {
            SystemKind::SelfAdjoint => 1,
            SystemKind::SkewSelfAdjoint => 0,
        }
    }

    /// `j = diag(I_p, -I_p)`.
    pub fn signature(self, p: usize) -> CMatrix {
        signature(p)
    }

    /// `j^κ`.
    pub fn j_kappa(self, p: usize) -> CMatrix {
        match self {
            SystemKind::SelfAdjoint => signature(p),
            SystemKind::SkewSelfAdjoint => identity(2 * p),
        }
    }

    /// `j^{κ+1}`.
    pub fn j_kappa_next(self, p: usize) -> CMatrix {
        match self {
            SystemKind::SelfAdjoint => identity(2 * p),
            SystemKind::SkewSelfAdjoint => signature(p),
        }
    }

    /// Sign in front of `|a|^2` in the root equation.
    pub fn root_sign(self) -> f64 {
        match self {
            SystemKind::SelfAdjoint => -1.0,
            SystemKind::SkewSelfAdjoint => 1.0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            SystemKind::SelfAdjoint => "self-adjoint",
            SystemKind::SkewSelfAdjoint => "skew-self-adjoint",
        }
    }
}

impl fmt::Display for SystemKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

pub fn signature(p: usize) -> CMatrix {
    CMatrix::from_fn(2 * p, 2 * p, |i, k| {
        if i != k {
            ZERO
        } else if i < p {
            ONE
        } else {
            -ONE
        }
    })
}

/// `v(x) = a e^{2icx} I_p`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeedPotential {
    a: Complex64,
    c: f64,
    p: usize,
}

impl SeedPotential {
    pub fn new(a: Complex64, c: f64, p: usize) -> Result<Self> {
        if a == ZERO || !a.re.is_finite() || !a.im.is_finite() {
            return Err(Error::Hypothesis(format!(
                "seed amplitude a must be finite and nonzero, got {a}"
            )));
        }
        if !c.is_finite() {
            return Err(Error::Hypothesis("seed frequency c must be finite".into()));
        }
        if p == 0 {
            return Err(Error::Hypothesis("block size p must be positive".into()));
        }
        Ok(SeedPotential { a, c, p })
    }

    pub fn a(&self) -> Complex64 {
        self.a
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn p(&self) -> usize {
        self.p
    }

    /// Scalar factor `a e^{2icx}`.
    pub fn amplitude(&self, x: f64) -> Complex64 {
        self.a * c64(0.0, 2.0 * self.c * x).exp()
    }

    pub fn eval(&self, x: f64) -> CMatrix {
        identity(self.p) * self.amplitude(x)
    }

    /// Full seed potential `V = [[0, v], [v^*, 0]]`.
    pub fn eval_full(&self, x: f64) -> CMatrix {
        off_diagonal(&self.eval(x))
    }
}

/// `[[0, v], [v^*, 0]]` for a square block `v`.
pub fn off_diagonal(v: &CMatrix) -> CMatrix {
    let p = v.nrows();
    let mut out = matlin::zeros(2 * p, 2 * p);
    out.view_mut((0, p), (p, p)).copy_from(v);
    out.view_mut((p, 0), (p, p)).copy_from(&v.adjoint());
    out
}

/// Choice of square-root value for one Jordan block.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Branch {
    #[default]
    Plus,
    Minus,
}

impl Branch {
    pub fn apply(self, z: Complex64) -> Complex64 {
        match self {
            Branch::Plus => z,
            Branch::Minus => -z,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct JordanBlock {
    pub eigenvalue: Complex64,
    pub size: usize,
    pub branch: Branch,
}

/// `A = E J E^{-1}` with `J` block diagonal of Jordan cells.
#[derive(Debug, Clone, PartialEq)]
pub struct JordanSpec {
    pub blocks: Vec<JordanBlock>,
    pub similarity: Option<CMatrix>,
}

impl JordanSpec {
    pub fn n(&self) -> usize {
        self.blocks.iter().map(|b| b.size).sum()
    }

    fn validate(&self) -> Result<()> {
        if self.blocks.is_empty() || self.blocks.iter().any(|b| b.size == 0) {
            return Err(Error::Shape {
                op: "jordan spec",
                detail: "blocks must be nonempty with positive sizes".into(),
            });
        }
        if let Some(e) = &self.similarity {
            let n = self.n();
            if e.nrows() != n || e.ncols() != n {
                return Err(Error::Shape {
                    op: "jordan spec",
                    detail: format!(
                        "similarity is {}x{}, blocks sum to {n}",
                        e.nrows(),
                        e.ncols()
                    ),
                });
            }
        }
        Ok(())
    }

    pub fn jordan_matrix(&self) -> CMatrix {
        let n = self.n();
        let mut j = matlin::zeros(n, n);
        let mut off = 0;
        for b in &self.blocks {
            for k in 0..b.size {
                j[(off + k, off + k)] = b.eigenvalue;
                if k + 1 < b.size {
                    j[(off + k, off + k + 1)] = ONE;
                }
            }
            off += b.size;
        }
        j
    }

    /// The matrix `A` this specification describes.
    pub fn matrix(&self) -> Result<CMatrix> {
        self.validate()?;
        let j = self.jordan_matrix();
        match &self.similarity {
            None => Ok(j),
            Some(e) => Ok(e * j * matlin::inverse(e, "Jordan similarity")?),
        }
    }
}

fn root_target(lambda_shift: Complex64, seed: &SeedPotential, kind: SystemKind) -> Complex64 {
    lambda_shift * lambda_shift + kind.root_sign() * seed.a.norm_sqr()
}

/// Root `Q` for a Jordan-form `A`, one upper triangular Toeplitz block per
/// Jordan cell.
///
/// In each block `q0 = ±sqrt((λ-c)^2 ∓ |a|^2)` and the remaining
/// coefficients follow from matching powers of the shift matrix.
pub fn build_q_jordan(
    spec: &JordanSpec,
    seed: &SeedPotential,
    kind: SystemKind,
) -> Result<CMatrix> {
    spec.validate()?;
    let n = spec.n();
    let mut q = matlin::zeros(n, n);
    let mut off = 0;
    for block in &spec.blocks {
        let shift = block.eigenvalue - seed.c;
        let t0 = root_target(shift, seed, kind);
        let scale = 1.0f64.max(shift.norm_sqr()).max(seed.a.norm_sqr());
        if t0.norm() <= 1e-12 * scale {
            return Err(Error::DegenerateSpectrum {
                eigenvalue: block.eigenvalue,
                detail: format!(
                    "(λ - c)^2 {} |a|^2 vanishes, so no root exists",
                    if kind.root_sign() < 0.0 { "-" } else { "+" }
                ),
            });
        }
        // (A - cI)^2 ∓ |a|^2 I = t0 I + 2(λ - c) S_1 + S_2
        let target = |k: usize| match k {
            0 => t0,
            1 => shift * 2.0,
            2 => ONE,
            _ => ZERO,
        };
        let mut coeff = vec![ZERO; block.size];
        coeff[0] = block.branch.apply(csqrt(t0));
        for k in 1..block.size {
            let cross: Complex64 = (1..k).map(|i| coeff[i] * coeff[k - i]).sum();
            coeff[k] = (target(k) - cross) / (coeff[0] * 2.0);
        }
        for r in 0..block.size {
            for k in 0..block.size - r {
                q[(off + r, off + r + k)] = coeff[k];
            }
        }
        off += block.size;
    }
    match &spec.similarity {
        None => Ok(q),
        Some(e) => Ok(e * q * matlin::inverse(e, "Jordan similarity")?),
    }
}

fn root_rhs(a: &CMatrix, seed: &SeedPotential, kind: SystemKind) -> CMatrix {
    let n = a.nrows();
    let shifted = a - identity(n) * c64(seed.c, 0.0);
    &shifted * &shifted + identity(n) * c64(kind.root_sign() * seed.a.norm_sqr(), 0.0)
}

/// Root `Q` for a dense `A` through a primary square root of
/// `(A - cI)^2 ∓ |a|^2 I`.
///
/// When that target has eigenvalues on the negative real axis but none on the
/// positive one, `i·sqrt(-M)` is used instead; it is still a function of `M`
/// and therefore commutes with `A`.
pub fn build_q_generic(a: &CMatrix, seed: &SeedPotential, kind: SystemKind) -> Result<CMatrix> {
    if !matlin::is_square(a) {
        return Err(Error::Shape {
            op: "build_q_generic",
            detail: format!("A is {}x{}", a.nrows(), a.ncols()),
        });
    }
    let m = root_rhs(a, seed, kind);
    let m_norm = spectral_norm(&m);
    for mu in matlin::eigenvalues(&m)? {
        if mu.norm() <= 1e-12 * (1.0 + m_norm) {
            let lambda = matlin::eigenvalues(a)?
                .into_iter()
                .min_by(|x, y| {
                    let fx = root_target(*x - seed.c, seed, kind).norm();
                    let fy = root_target(*y - seed.c, seed, kind).norm();
                    fx.total_cmp(&fy)
                })
                .unwrap_or(ZERO);
            return Err(Error::DegenerateSpectrum {
                eigenvalue: lambda,
                detail: "(A - cI)^2 ∓ |a|^2 I is singular".into(),
            });
        }
    }
    let q = match matlin::principal_sqrt(&m) {
        Ok(q) => q,
        Err(Error::BranchCut { eigenvalue }) => match matlin::principal_sqrt(&(-&m)) {
            Ok(r) => r * I,
            Err(_) => return Err(Error::BranchCut { eigenvalue }),
        },
        Err(e) => return Err(e),
    };
    let comm = spectral_norm(&(a * &q - &q * a));
    let tol = 1e-9 * (1.0 + spectral_norm(a) * spectral_norm(&q));
    if !(comm <= tol) {
        return Err(Error::Residual {
            what: "commutation AQ = QA",
            residual: comm,
            tolerance: tol,
        });
    }
    Ok(q)
}

/// `f3, f4` from `f1, f2`.
pub fn derive_f34(
    q: &CMatrix,
    a: &CMatrix,
    f1: &CMatrix,
    f2: &CMatrix,
    seed: &SeedPotential,
    kind: SystemKind,
) -> Result<(CMatrix, CMatrix)> {
    let n = a.nrows();
    let p = seed.p;
    let shapes_ok =
        matlin::is_square(a) && q.shape() == (n, n) && f1.shape() == (n, p) && f2.shape() == (n, p);
    if !shapes_ok {
        return Err(Error::Shape {
            op: "derive_f34",
            detail: format!(
                "A {:?}, Q {:?}, f1 {:?}, f2 {:?}, p = {p}",
                a.shape(),
                q.shape(),
                f1.shape(),
                f2.shape()
            ),
        });
    }
    let prefactor = match kind {
        SystemKind::SelfAdjoint => ONE / seed.a.conj(),
        SystemKind::SkewSelfAdjoint => I / seed.a.conj(),
    };
    let ci = identity(n) * c64(seed.c, 0.0);
    let f3 = (q + a - &ci) * f1 * prefactor;
    let f4 = (q - a + &ci) * f2 * (-prefactor);
    Ok((f3, f4))
}

/// The root `Q` together with the four blocks generating `Π(x)`.
#[derive(Debug, Clone)]
pub struct SeedRealization {
    pub q: CMatrix,
    pub f1: CMatrix,
    pub f2: CMatrix,
    pub f3: CMatrix,
    pub f4: CMatrix,
    pub kind: SystemKind,
    pub seed: SeedPotential,
}

/// How `A` (and with it `Q`) is specified.
#[derive(Debug, Clone)]
pub enum MatrixSpec {
    Dense(CMatrix),
    Jordan(JordanSpec),
}

/// The triple `{A, S(0), Π(0)}` with its seed realization.
///
/// Construction validates the matrix identity; the value is immutable and
/// cheap to share.
#[derive(Debug, Clone)]
pub struct GbdtTriple {
    a: CMatrix,
    s0: CMatrix,
    pi0: CMatrix,
    realization: SeedRealization,
    a_eigenvalues: Vec<Complex64>,
    a_norm: f64,
    q_norm: f64,
    s0_min_eig: f64,
    s_solver: Option<Arc<SylvesterSolver>>,
    diagnostics: Vec<String>,
}

/// Tolerance on `‖A S0 - S0 A^* - i Π(0) j^κ Π(0)^*‖ / (1 + ‖S0‖)`.
pub const TRIPLE_IDENTITY_TOL: f64 = 1e-10;
/// Relative discrepancy between a supplied and a computed `S0` that raises a
/// diagnostic.
pub const S0_CROSS_CHECK_WARN: f64 = 1e-8;

pub fn identity_rhs(pi: &CMatrix, kind: SystemKind, p: usize) -> CMatrix {
    pi * kind.j_kappa(p) * pi.adjoint() * I
}

/// Assembles and validates a triple from `A`, a root `Q` and `f1, f2`.
///
/// `S0` is computed from the matrix identity when omitted; that requires the
/// spectra of `A` and `A^*` to be disjoint.
pub fn assemble_triple(
    a: CMatrix,
    q: CMatrix,
    f1: CMatrix,
    f2: CMatrix,
    seed: SeedPotential,
    kind: SystemKind,
    s0: Option<CMatrix>,
) -> Result<GbdtTriple> {
    let n = a.nrows();
    let p = seed.p;
    let (f3, f4) = derive_f34(&q, &a, &f1, &f2, &seed, kind)?;

    let a_norm = spectral_norm(&a);
    let q_norm = spectral_norm(&q);
    let comm = spectral_norm(&(&a * &q - &q * &a));
    let comm_tol = 1e-9 * (1.0 + a_norm * q_norm);
    if !(comm <= comm_tol) {
        return Err(Error::Residual {
            what: "commutation AQ = QA",
            residual: comm,
            tolerance: comm_tol,
        });
    }
    let target = root_rhs(&a, &seed, kind);
    let root_res = spectral_norm(&(&q * &q - &target));
    let root_tol = 1e-9 * (1.0 + spectral_norm(&target));
    if !(root_res <= root_tol) {
        return Err(Error::Residual {
            what: "root equation for Q",
            residual: root_res,
            tolerance: root_tol,
        });
    }

    let mut pi0 = matlin::zeros(n, 2 * p);
    pi0.view_mut((0, 0), (n, p)).copy_from(&(&f1 + &f2));
    pi0.view_mut((0, p), (n, p)).copy_from(&(&f3 + &f4));
    let rhs = identity_rhs(&pi0, kind, p);

    let a_eigenvalues = matlin::eigenvalues(&a)?;
    let (s_solver, collision) = match SylvesterSolver::new(&a, &a.adjoint()) {
        Ok(s) => (Some(Arc::new(s)), None),
        Err(Error::SylvesterSingular { left, .. }) => (None, Some(left)),
        Err(e) => return Err(e),
    };
    let computed = match &s_solver {
        Some(solver) => {
            let s = solver.solve(&rhs)?;
            let asym = spectral_norm(&(&s - s.adjoint()));
            let tol = 1e-10 * (1.0 + spectral_norm(&s));
            if !(asym <= tol) {
                return Err(Error::Residual {
                    what: "Hermitian symmetry of computed S0",
                    residual: asym,
                    tolerance: tol,
                });
            }
            Some(matlin::hermitian_part(&s))
        }
        None => None,
    };

    let mut diagnostics = Vec::new();
    let s0 = match (s0, computed) {
        (Some(user), computed) => {
            if user.shape() != (n, n) {
                return Err(Error::Shape {
                    op: "assemble_triple",
                    detail: format!("S0 is {:?}, expected {n}x{n}", user.shape()),
                });
            }
            let norm = spectral_norm(&user);
            let asym = spectral_norm(&(&user - user.adjoint()));
            if !(asym <= 1e-12 * (1.0 + norm)) {
                return Err(Error::Residual {
                    what: "Hermitian symmetry of S0",
                    residual: asym,
                    tolerance: 1e-12 * (1.0 + norm),
                });
            }
            let res = spectral_norm(&(&a * &user - &user * a.adjoint() - &rhs));
            let tol = TRIPLE_IDENTITY_TOL * (1.0 + norm);
            if !(res <= tol) {
                return Err(Error::Residual {
                    what: "matrix identity for the supplied S0",
                    residual: res,
                    tolerance: tol,
                });
            }
            if let Some(c) = computed {
                let diff = spectral_norm(&(&c - &user)) / (1.0 + norm);
                if diff > S0_CROSS_CHECK_WARN {
                    diagnostics.push(format!(
                        "supplied S0 differs from the identity solution by {diff:.3e} (relative)"
                    ));
                }
            }
            matlin::hermitian_part(&user)
        }
        (None, Some(c)) => c,
        (None, None) => {
            return Err(Error::SupplyS0 {
                eigenvalue: collision.unwrap_or(ZERO),
            })
        }
    };
    let s0_min_eig = hermitian_eigenvalues(&s0).first().copied().unwrap_or(0.0);
    if s0_min_eig <= 0.0 {
        diagnostics.push(format!(
            "S0 is not positive definite (min eigenvalue {s0_min_eig:.6e}); \
             Weyl functions and invertibility guarantees do not apply"
        ));
    }

    Ok(GbdtTriple {
        a,
        s0,
        pi0,
        realization: SeedRealization {
            q,
            f1,
            f2,
            f3,
            f4,
            kind,
            seed,
        },
        a_eigenvalues,
        a_norm,
        q_norm,
        s0_min_eig,
        s_solver,
        diagnostics,
    })
}

/// Builds `A` and `Q` from `spec` and assembles the triple.
pub fn assemble_from_spec(
    spec: &MatrixSpec,
    f1: CMatrix,
    f2: CMatrix,
    seed: SeedPotential,
    kind: SystemKind,
    s0: Option<CMatrix>,
) -> Result<GbdtTriple> {
    let (a, q) = match spec {
        MatrixSpec::Dense(a) => (a.clone(), build_q_generic(a, &seed, kind)?),
        MatrixSpec::Jordan(js) => (js.matrix()?, build_q_jordan(js, &seed, kind)?),
    };
    assemble_triple(a, q, f1, f2, seed, kind, s0)
}

impl GbdtTriple {
    pub fn a(&self) -> &CMatrix {
        &self.a
    }

    pub fn s0(&self) -> &CMatrix {
        &self.s0
    }

    pub fn pi0(&self) -> &CMatrix {
        &self.pi0
    }

    pub fn realization(&self) -> &SeedRealization {
        &self.realization
    }

    pub fn q(&self) -> &CMatrix {
        &self.realization.q
    }

    pub fn kind(&self) -> SystemKind {
        self.realization.kind
    }

    pub fn seed(&self) -> &SeedPotential {
        &self.realization.seed
    }

    pub fn n(&self) -> usize {
        self.a.nrows()
    }

    pub fn p(&self) -> usize {
        self.realization.seed.p
    }

    pub fn a_eigenvalues(&self) -> &[Complex64] {
        &self.a_eigenvalues
    }

    pub fn a_norm(&self) -> f64 {
        self.a_norm
    }

    pub fn q_norm(&self) -> f64 {
        self.q_norm
    }

    pub fn s0_min_eig(&self) -> f64 {
        self.s0_min_eig
    }

    pub fn s0_positive(&self) -> bool {
        self.s0_min_eig > 0.0
    }

    /// Solver for `A S - S A^* = C`, present when the spectra are disjoint.
    pub fn sylvester(&self) -> Option<&SylvesterSolver> {
        self.s_solver.as_deref()
    }

    pub fn diagnostics(&self) -> &[String] {
        &self.diagnostics
    }

    /// Copy with `S0` replaced and no validation. Intended for negative
    /// controls in verification.
    pub fn with_s0_unchecked(&self, s0: CMatrix) -> GbdtTriple {
        let s0_min_eig = hermitian_eigenvalues(&s0).first().copied().unwrap_or(0.0);
        GbdtTriple {
            s0,
            s0_min_eig,
            ..self.clone()
        }
    }

    /// Checks the realness hypotheses under which `-i ṽ` is a real
    /// Dirac–Weyl potential. Returns the first failed condition.
    pub fn dirac_weyl_hypotheses(&self) -> std::result::Result<(), String> {
        const TOL: f64 = 1e-12;
        let seed = self.seed();
        if self.p() != 1 {
            return Err(format!("p must be 1, got {}", self.p()));
        }
        if self.kind() != SystemKind::SkewSelfAdjoint {
            return Err("the system must be skew-self-adjoint".into());
        }
        if seed.c != 0.0 {
            return Err(format!("c must be 0, got {}", seed.c));
        }
        if seed.a.re.abs() > TOL * seed.a.norm() {
            return Err(format!("i·a must be real, got a = {}", seed.a));
        }
        let imag_part = |m: &CMatrix| m.iter().map(|v| v.im.abs()).fold(0.0, f64::max);
        let real_part = |m: &CMatrix| m.iter().map(|v| v.re.abs()).fold(0.0, f64::max);
        let scale = |m: &CMatrix| 1.0 + matlin::max_abs(m);
        if real_part(&self.a) > TOL * scale(&self.a) {
            return Err("i·A must be a real matrix".into());
        }
        let q = self.q();
        if real_part(q) > TOL * scale(q) {
            return Err("i·Q must be a real matrix".into());
        }
        if imag_part(&self.s0) > TOL * scale(&self.s0) {
            return Err("S(0) must be a real matrix".into());
        }
        let r = &self.realization;
        if imag_part(&r.f1) > TOL * scale(&r.f1) {
            return Err("f1 must be real".into());
        }
        if imag_part(&r.f2) > TOL * scale(&r.f2) {
            return Err("f2 must be real".into());
        }
        Ok(())
    }
}
