//! Built-in example scenarios and the asymptotic constants printed next to
//! them.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::scenario::{
    BlockSection, ExampleMeta, GridSpec, Grids, MatrixSection, Output, Scenario,
};
use crate::seed::{Branch, SystemKind};

/// Spectral points used by every canned scenario: all with `Im z ≥ 5`.
pub const CANNED_Z: [[f64; 2]; 5] = [[0.0, 5.0], [1.0, 5.0], [-2.0, 6.0], [3.0, 7.0], [-4.0, 5.5]];

/// Imaginary-axis points for the trivial self-adjoint example: with real `a`
/// and `c = 0` its Weyl function has modulus one exactly there.
pub const IMAGINARY_Z: [[f64; 2]; 5] = [[0.0, 5.0], [0.0, 5.5], [0.0, 6.0], [0.0, 7.0], [0.0, 8.0]];

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Example {
    EeDw0,
    EeDw1,
    TrivialSa,
    TrivialSsa,
    SaScalar,
}

impl Example {
    pub const ALL: [Example; 5] = [
        Example::EeDw0,
        Example::EeDw1,
        Example::TrivialSa,
        Example::TrivialSsa,
        Example::SaScalar,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Example::EeDw0 => "ee-dw0",
            Example::EeDw1 => "ee-dw1",
            Example::TrivialSa => "trivial-sa",
            Example::TrivialSsa => "trivial-ssa",
            Example::SaScalar => "sa-scalar",
        }
    }

    pub fn describe(self) -> &'static str {
        match self {
            Example::EeDw0 => "steplike Dirac-Weyl potential, n = 1",
            Example::EeDw1 => "Dirac-Weyl potential from a non-diagonalizable A, n = 2",
            Example::TrivialSa => "self-adjoint, Pi(0) = 0: the seed is returned unchanged",
            Example::TrivialSsa => "skew-self-adjoint, Pi(0) = 0: the seed is returned unchanged",
            Example::SaScalar => "self-adjoint scalar transformation with S(0) > 0",
        }
    }

    pub fn default_params(self) -> BTreeMap<String, f64> {
        let kv: &[(&str, f64)] = match self {
            Example::EeDw0 => &[("r", 1.0), ("lambda", 2.0), ("d", 1.0), ("mu_sign", 1.0)],
            Example::EeDw1 => &[
                ("r", 1.0),
                ("lambda", 2.0),
                ("b", 1.0),
                ("d", 1.0),
                ("mu_sign", 1.0),
            ],
            Example::TrivialSa => &[("a", 1.0), ("lambda", 3.0)],
            Example::TrivialSsa => &[("a", 1.0), ("lambda", 2.0)],
            Example::SaScalar => &[("a", 1.0), ("lambda", 1.0)],
        };
        kv.iter().map(|(k, v)| (k.to_string(), *v)).collect()
    }

    /// Defaults with `overrides` applied; unknown keys are rejected.
    pub fn params(self, overrides: &BTreeMap<String, f64>) -> Result<BTreeMap<String, f64>> {
        let mut p = self.default_params();
        for (k, v) in overrides {
            match p.get_mut(k) {
                Some(slot) => *slot = *v,
                None => {
                    return Err(Error::Scenario {
                        field: format!("example.params.{k}"),
                        msg: format!(
                            "`{}` has no parameter `{k}` (known: {})",
                            self.name(),
                            p.keys().cloned().collect::<Vec<_>>().join(" ")
                        ),
                    })
                }
            }
            if !v.is_finite() {
                return Err(Error::Scenario {
                    field: format!("example.params.{k}"),
                    msg: "must be finite".into(),
                });
            }
        }
        Ok(p)
    }

    pub fn scenario(self, overrides: &BTreeMap<String, f64>) -> Result<Scenario> {
        let params = self.params(overrides)?;
        let g = |k: &str| params[k];
        let zero = [0.0, 0.0];
        let re = |v: f64| [v, 0.0];
        let mut outputs = vec![
            Output::Potential,
            Output::Weyl,
            Output::Dynamical,
            Output::Verify,
        ];
        let (kind, a, matrix, f1, f2, s0, x) = match self {
            Example::EeDw0 => {
                let p = Dw0Params::from_map(&params)?;
                outputs.push(Output::Asymptotics);
                (
                    SystemKind::SkewSelfAdjoint,
                    [0.0, p.r],
                    jordan(vec![block([0.0, p.lambda], 1, p.branch())], None),
                    vec![vec![re(p.d)]],
                    vec![vec![re(1.0)]],
                    None,
                    (-2.0, 2.0),
                )
            }
            Example::EeDw1 => {
                let p = Dw1Params::from_map(&params)?;
                outputs.push(Output::Asymptotics);
                (
                    SystemKind::SkewSelfAdjoint,
                    [0.0, p.r],
                    jordan(
                        vec![block([0.0, p.lambda], 2, p.branch())],
                        Some(vec![vec![[0.0, p.b], zero], vec![zero, re(1.0)]]),
                    ),
                    vec![vec![re(p.d), zero]],
                    vec![vec![zero, re(1.0)]],
                    None,
                    (-1.0, 1.0),
                )
            }
            Example::TrivialSa | Example::TrivialSsa => {
                let (kind, a) = if self == Example::TrivialSa {
                    (SystemKind::SelfAdjoint, re(g("a")))
                } else {
                    (SystemKind::SkewSelfAdjoint, [0.0, g("a")])
                };
                (
                    kind,
                    a,
                    MatrixSection {
                        dense: Some(vec![vec![re(g("lambda"))]]),
                        ..MatrixSection::default()
                    },
                    vec![vec![zero]],
                    vec![vec![zero]],
                    Some(vec![vec![re(1.0)]]),
                    (
                        if kind == SystemKind::SelfAdjoint {
                            0.0
                        } else {
                            -2.0
                        },
                        2.0,
                    ),
                )
            }
            Example::SaScalar => (
                SystemKind::SelfAdjoint,
                re(g("a")),
                jordan(vec![block([0.0, g("lambda")], 1, Branch::Minus)], None),
                vec![vec![re(1.0)]],
                vec![vec![zero]],
                None,
                (0.0, 2.0),
            ),
        };
        Ok(Scenario {
            kind,
            a,
            c: 0.0,
            f1,
            f2,
            s0,
            z: if self == Example::TrivialSa {
                IMAGINARY_Z.to_vec()
            } else {
                CANNED_Z.to_vec()
            },
            outputs,
            matrix,
            grids: Grids {
                x: GridSpec {
                    start: x.0,
                    stop: x.1,
                    count: if self == Example::EeDw1 { 21 } else { 101 },
                },
                xi: GridSpec {
                    start: -1.0,
                    stop: 1.0,
                    count: 20,
                },
            },
            example: Some(ExampleMeta {
                name: self.name().into(),
                params,
            }),
        })
    }
}

fn block(eigenvalue: [f64; 2], size: usize, branch: Branch) -> BlockSection {
    BlockSection {
        eigenvalue,
        size,
        branch,
    }
}

fn jordan(blocks: Vec<BlockSection>, similarity: Option<Vec<Vec<[f64; 2]>>>) -> MatrixSection {
    MatrixSection {
        dense: None,
        blocks,
        similarity,
    }
}

impl fmt::Display for Example {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Example {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Example::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| Error::Scenario {
                field: "example".into(),
                msg: format!(
                    "unknown example `{s}` (known: {})",
                    Example::ALL.map(|e| e.name()).join(" ")
                ),
            })
    }
}

fn param_err(k: &str, msg: &str) -> Error {
    Error::Scenario {
        field: format!("example.params.{k}"),
        msg: msg.into(),
    }
}

fn sign_of(v: f64) -> Result<f64> {
    if v == 1.0 || v == -1.0 {
        Ok(v)
    } else {
        Err(param_err("mu_sign", "must be 1 or -1"))
    }
}

/// Parameters of the steplike example: `A = iλ`, `a = ir`, `f1 = d`, `f2 = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dw0Params {
    pub r: f64,
    pub lambda: f64,
    pub d: f64,
    pub mu_sign: f64,
}

impl Dw0Params {
    pub fn from_map(m: &BTreeMap<String, f64>) -> Result<Self> {
        let p = Dw0Params {
            r: m["r"],
            lambda: m["lambda"],
            d: m["d"],
            mu_sign: sign_of(m["mu_sign"])?,
        };
        if p.r == 0.0 {
            return Err(param_err("r", "must be nonzero"));
        }
        if p.d == 0.0 {
            return Err(param_err("d", "must be nonzero"));
        }
        if !(p.lambda > p.r.abs()) {
            return Err(param_err("lambda", "must exceed |r|"));
        }
        Ok(p)
    }

    /// `μ = ±sqrt(λ^2 - r^2)`, so that `Q = iμ`.
    pub fn mu(&self) -> f64 {
        self.mu_sign * (self.lambda * self.lambda - self.r * self.r).sqrt()
    }

    fn branch(&self) -> Branch {
        if self.mu_sign > 0.0 {
            Branch::Plus
        } else {
            Branch::Minus
        }
    }

    /// Limit of `ω` on the side where `e^{2μx}` dominates.
    pub fn plateau_growing(&self) -> f64 {
        let (r, l, m) = (self.r, self.lambda, self.mu());
        r + 4.0 * r * l * (m - l) / (r * r + (m - l) * (m - l))
    }

    /// Limit of `ω` on the side where `e^{-2μx}` dominates.
    pub fn plateau_decaying(&self) -> f64 {
        let (r, l, m) = (self.r, self.lambda, self.mu());
        r - 4.0 * r * l * (m + l) / (r * r + (m + l) * (m + l))
    }

    /// Plateaus at `(-∞, +∞)`.
    pub fn plateaus(&self) -> (f64, f64) {
        if self.mu() > 0.0 {
            (self.plateau_decaying(), self.plateau_growing())
        } else {
            (self.plateau_growing(), self.plateau_decaying())
        }
    }
}

/// Parameters of the example with `A = i[[λ, b], [0, λ]]`, `a = ir`,
/// `f1 = (d, 0)`, `f2 = (0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dw1Params {
    pub r: f64,
    pub lambda: f64,
    pub b: f64,
    pub d: f64,
    pub mu_sign: f64,
}

impl Dw1Params {
    pub fn from_map(m: &BTreeMap<String, f64>) -> Result<Self> {
        let p = Dw1Params {
            r: m["r"],
            lambda: m["lambda"],
            b: m["b"],
            d: m["d"],
            mu_sign: sign_of(m["mu_sign"])?,
        };
        if p.r == 0.0 {
            return Err(param_err("r", "must be nonzero"));
        }
        if p.b == 0.0 {
            return Err(param_err("b", "must be nonzero"));
        }
        if p.d == 0.0 {
            return Err(param_err("d", "must be nonzero"));
        }
        if !(p.lambda > p.r.abs()) {
            return Err(param_err("lambda", "must exceed |r|"));
        }
        Ok(p)
    }

    pub fn mu(&self) -> f64 {
        self.mu_sign * (self.lambda * self.lambda - self.r * self.r).sqrt()
    }

    fn branch(&self) -> Branch {
        if self.mu_sign > 0.0 {
            Branch::Plus
        } else {
            Branch::Minus
        }
    }

    /// The constant `C` of the stated large-`|x|` law `ω(x) ≈ C x^2`.
    pub fn growth_constant(&self) -> f64 {
        let (r, l, m) = (self.r, self.lambda, self.mu());
        let t = l - m;
        16.0 * r * t * l.powi(5) * (r * r + t * t)
            / (m * m * (t.powi(4) + r.powi(4)) + 2.0 * t * t * r * r * (2.0 * l * l + m * m))
    }
}
