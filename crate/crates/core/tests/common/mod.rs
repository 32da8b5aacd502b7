//! Oracles shared by the integration tests. Nothing here calls back into the
//! engine code under test except for plain matrix helpers.
#![allow(dead_code)]

use dirac_gbdt::matlin::{c64, CMatrix};
use dirac_gbdt::seed::SystemKind;
use num_complex::Complex64;

pub const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Closed forms for the steplike scalar example.
#[derive(Debug, Clone, Copy)]
pub struct Steplike {
    pub r: f64,
    pub lambda: f64,
    pub d: f64,
    pub mu: f64,
}

impl Steplike {
    pub fn new(r: f64, lambda: f64, d: f64, mu_sign: f64) -> Self {
        Steplike {
            r,
            lambda,
            d,
            mu: mu_sign * (lambda * lambda - r * r).sqrt(),
        }
    }

    pub fn lambda1(&self, x: f64) -> f64 {
        (self.mu * x).exp() + self.d * (-self.mu * x).exp()
    }

    /// `Λ2 / i`, which is real.
    pub fn lambda2_over_i(&self, x: f64) -> f64 {
        let (r, l, m, d) = (self.r, self.lambda, self.mu, self.d);
        ((m - l) * (m * x).exp() - d * (l + m) * (-m * x).exp()) / r
    }

    pub fn s(&self, x: f64) -> f64 {
        let (r, l, m, d) = (self.r, self.lambda, self.mu, self.d);
        ((1.0 + (l - m).powi(2) / (r * r)) * (2.0 * m * x).exp()
            + 4.0 * d
            + d * d * (1.0 + (l + m).powi(2) / (r * r)) * (-2.0 * m * x).exp())
            / (2.0 * l)
    }

    pub fn omega(&self, x: f64) -> f64 {
        let (r, l, m, d) = (self.r, self.lambda, self.mu, self.d);
        r + (2.0 / r)
            * ((m - l) * (2.0 * m * x).exp() - 2.0 * d * l - d * d * (l + m) * (-2.0 * m * x).exp())
            / self.s(x)
    }

    /// Limit where `e^{2μx}` dominates.
    pub fn limit_growing_side(&self) -> f64 {
        let (r, l, m) = (self.r, self.lambda, self.mu);
        r + 4.0 * r * l * (m - l) / (r * r + (m - l).powi(2))
    }

    /// Limit where `e^{-2μx}` dominates.
    pub fn limit_decaying_side(&self) -> f64 {
        let (r, l, m) = (self.r, self.lambda, self.mu);
        r - 4.0 * r * l * (m + l) / (r * r + (m + l).powi(2))
    }
}

/// Closed forms for the example with a single 2x2 Jordan cell.
#[derive(Debug, Clone, Copy)]
pub struct JordanCell {
    pub r: f64,
    pub lambda: f64,
    pub b: f64,
    pub d: f64,
    pub mu: f64,
}

impl JordanCell {
    pub fn new(r: f64, lambda: f64, b: f64, d: f64, mu_sign: f64) -> Self {
        JordanCell {
            r,
            lambda,
            b,
            d,
            mu: mu_sign * (lambda * lambda - r * r).sqrt(),
        }
    }

    fn t2(&self) -> f64 {
        ((self.mu - self.lambda) / self.r).powi(2)
    }

    pub fn lambda1(&self, x: f64) -> [f64; 2] {
        let (l, m, b, d) = (self.lambda, self.mu, self.b, self.d);
        let e = (m * x).exp();
        [b * l / m * x * e + d * (-m * x).exp(), e]
    }

    /// `Λ2 / i`, which is real.
    pub fn lambda2_over_i(&self, x: f64) -> [f64; 2] {
        let (r, l, m, b, d) = (self.r, self.lambda, self.mu, self.b, self.d);
        let e = (m * x).exp();
        [
            ((m - l) * b / m * (l * x - 1.0) * e - d * (l + m) * (-m * x).exp()) / r,
            (m - l) * e / r,
        ]
    }

    pub fn s22(&self, x: f64) -> f64 {
        (1.0 + self.t2()) * (2.0 * self.mu * x).exp() / (2.0 * self.lambda)
    }

    pub fn s12(&self, x: f64) -> f64 {
        let (l, m, b, d) = (self.lambda, self.mu, self.b, self.d);
        let t2 = self.t2();
        let e = (2.0 * m * x).exp();
        (b * l / m * (1.0 + t2) * x * e
            - b * (t2 * (1.0 / m + 1.0 / (2.0 * l)) + 1.0 / (2.0 * l)) * e
            + 2.0 * d)
            / (2.0 * l)
    }

    pub fn s11(&self, x: f64) -> f64 {
        let (l, m, b, d) = (self.lambda, self.mu, self.b, self.d);
        let t2 = self.t2();
        let r2 = self.r * self.r;
        let e = (2.0 * m * x).exp();
        ((b * l / m).powi(2) * (1.0 + t2) * x * x * e
            - b * b / m * ((2.0 * l / m + 1.0) * t2 + 1.0) * x * e
            + b * b
                * (t2 * (1.0 / (m * m) + 1.0 / (l * m) + 1.0 / (2.0 * l * l))
                    + 1.0 / (2.0 * l * l))
                * e
            + 4.0 * b * d * l / m * x
            - 2.0 * b * d * (1.0 / m + 1.0 / l)
            + d * d * (1.0 + (m + l).powi(2) / r2) * (-2.0 * m * x).exp())
            / (2.0 * l)
    }

    pub fn det(&self, x: f64) -> f64 {
        let (l, m, b, d) = (self.lambda, self.mu, self.b, self.d);
        let t2 = self.t2();
        let r2 = self.r * self.r;
        (b * b
            * ((t2 * t2 + 1.0) / (4.0 * l * l) + t2 * (1.0 / (m * m) + 1.0 / (2.0 * l * l)))
            * (4.0 * m * x).exp()
            + 2.0 * b * d / m * (t2 - 1.0) * (2.0 * m * x).exp()
            + 4.0 * d * d * m * m / r2)
            / (4.0 * l * l)
    }

    /// `ω = r + 2 Λ1^T S^{-1} (Λ2 / i)` from the closed forms.
    pub fn omega(&self, x: f64) -> f64 {
        let (s11, s12, s22) = (self.s11(x), self.s12(x), self.s22(x));
        let det = s11 * s22 - s12 * s12;
        let l1 = self.lambda1(x);
        let l2 = self.lambda2_over_i(x);
        let inv = [[s22 / det, -s12 / det], [-s12 / det, s11 / det]];
        let mut q = 0.0;
        for i in 0..2 {
            for k in 0..2 {
                q += l1[i] * inv[i][k] * l2[k];
            }
        }
        self.r + 2.0 * q
    }

    /// The constant of the stated `ω(x) ≈ C x^2` law.
    pub fn growth_constant(&self) -> f64 {
        let (r, l, m) = (self.r, self.lambda, self.mu);
        let t = l - m;
        16.0 * r * t * l.powi(5) * (r * r + t * t)
            / (m * m * (t.powi(4) + r.powi(4)) + 2.0 * t * t * r * r * (2.0 * l * l + m * m))
    }
}

pub fn signature(p: usize) -> CMatrix {
    CMatrix::from_fn(2 * p, 2 * p, |i, k| {
        if i != k {
            c64(0.0, 0.0)
        } else if i < p {
            c64(1.0, 0.0)
        } else {
            c64(-1.0, 0.0)
        }
    })
}

/// Right-hand side matrix of the Dirac system for a given full potential.
pub fn dirac_matrix(kind: SystemKind, z: Complex64, v_full: &CMatrix) -> CMatrix {
    let j = signature(v_full.nrows() / 2);
    match kind {
        SystemKind::SelfAdjoint => (&j * z + &j * v_full) * I,
        SystemKind::SkewSelfAdjoint => &j * (z * I) + &j * v_full,
    }
}

/// `[[0, v], [v^*, 0]]`.
pub fn full(v: &CMatrix) -> CMatrix {
    let p = v.nrows();
    let mut m = CMatrix::zeros(2 * p, 2 * p);
    m.view_mut((0, p), (p, p)).copy_from(v);
    m.view_mut((p, 0), (p, p)).copy_from(&v.adjoint());
    m
}

/// Plain RK4 for `y' = f(x) y`, returning `y` at every point of `xs` (which
/// must start at the initial point).
pub fn rk4<F>(coef: F, y0: &CMatrix, xs: &[f64], h_max: f64) -> Vec<CMatrix>
where
    F: Fn(f64) -> CMatrix,
{
    let mut out = vec![y0.clone()];
    let mut y = y0.clone();
    for w in xs.windows(2) {
        let steps = ((w[1] - w[0]).abs() / h_max).ceil().max(1.0) as usize;
        let h = (w[1] - w[0]) / steps as f64;
        for s in 0..steps {
            let x = w[0] + h * s as f64;
            let k1 = coef(x) * &y;
            let k2 = coef(x + h / 2.0) * (&y + &k1 * c64(h / 2.0, 0.0));
            let k3 = coef(x + h / 2.0) * (&y + &k2 * c64(h / 2.0, 0.0));
            let k4 = coef(x + h) * (&y + &k3 * c64(h, 0.0));
            y += (k1 + k2 * c64(2.0, 0.0) + k3 * c64(2.0, 0.0) + k4) * c64(h / 6.0, 0.0);
        }
        out.push(y.clone());
    }
    out
}

pub fn norm(m: &CMatrix) -> f64 {
    m.norm()
}

pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

/// Prints one verdict line and returns whether it passed.
pub fn verdict(id: &str, pass: bool, detail: impl std::fmt::Display) -> bool {
    println!("{} {id}: {detail}", if pass { "PASS" } else { "FAIL" });
    pass
}
