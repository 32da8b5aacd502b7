//! Adaptive Gauss–Legendre quadrature for matrix-valued integrands.

use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::matlin::{c64, spectral_norm, CMatrix};

const ORDER: usize = 10;
const MAX_DEPTH: usize = 48;

/// Acceptance rule for a panel: the whole-panel and two-half estimates must
/// agree to `max(abs · len / total_len, rel · ‖estimate‖)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadTol {
    pub abs: f64,
    pub rel: f64,
}

impl Default for QuadTol {
    fn default() -> Self {
        QuadTol {
            abs: 1e-10,
            rel: 1e-13,
        }
    }
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// Nodes and weights on `[-1, 1]`.
fn rule() -> &'static [(f64, f64)] {
    static RULE: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    RULE.get_or_init(|| {
        (0..ORDER)
            .map(|i| {
                let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (ORDER as f64 + 0.5)).cos();
                for _ in 0..100 {
                    let (p, dp) = legendre(ORDER, x);
                    let dx = p / dp;
                    x -= dx;
                    if dx.abs() < 1e-16 {
                        break;
                    }
                }
                let (_, dp) = legendre(ORDER, x);
                (x, 2.0 / ((1.0 - x * x) * dp * dp))
            })
            .collect()
    })
}

fn panel<F>(f: &F, a: f64, b: f64) -> Result<CMatrix>
where
    F: Fn(f64) -> Result<CMatrix>,
{
    let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
    let mut acc: Option<CMatrix> = None;
    for &(t, w) in rule() {
        let v = f(mid + half * t)? * c64(w * half, 0.0);
        acc = Some(match acc {
            None => v,
            Some(s) => s + v,
        });
    }
    Ok(acc.expect("rule is nonempty"))
}

struct Ctx<'a, F> {
    f: &'a F,
    tol: QuadTol,
    total: f64,
}

fn adapt<F>(ctx: &Ctx<'_, F>, a: f64, b: f64, whole: CMatrix, depth: usize) -> Result<CMatrix>
where
    F: Fn(f64) -> Result<CMatrix>,
{
    let m = 0.5 * (a + b);
    let left = panel(ctx.f, a, m)?;
    let right = panel(ctx.f, m, b)?;
    let halves = &left + &right;
    let err = spectral_norm(&(&halves - &whole));
    let allowed =
        (ctx.tol.abs * (b - a).abs() / ctx.total).max(ctx.tol.rel * spectral_norm(&halves));
    if err <= allowed {
        return Ok(halves);
    }
    if depth >= MAX_DEPTH || !err.is_finite() {
        return Err(Error::Quadrature { a, b, depth });
    }
    Ok(adapt(ctx, a, m, left, depth + 1)? + adapt(ctx, m, b, right, depth + 1)?)
}

/// `∫_a^b f(t) dt`, starting from `panels` equal panels (at least one).
pub fn integrate<F>(f: F, a: f64, b: f64, panels: usize, tol: QuadTol) -> Result<CMatrix>
where
    F: Fn(f64) -> Result<CMatrix>,
{
    let panels = panels.max(1);
    let total = (b - a).abs().max(f64::MIN_POSITIVE);
    let ctx = Ctx { f: &f, tol, total };
    let h = (b - a) / panels as f64;
    let mut acc: Option<CMatrix> = None;
    for k in 0..panels {
        let lo = a + h * k as f64;
        let hi = if k + 1 == panels { b } else { lo + h };
        let whole = panel(&f, lo, hi)?;
        let v = adapt(&ctx, lo, hi, whole, 0)?;
        acc = Some(match acc {
            None => v,
            Some(s) => s + v,
        });
    }
    Ok(acc.expect("at least one panel"))
}
