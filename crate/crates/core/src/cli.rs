//! Scenario execution, CSV artifacts and the command-line front end.
//!
//! Every artifact starts with `#` comment lines carrying the scenario
//! parameters, then one header row, then data rows. Numbers use the shortest
//! round-trip form, so identical scenarios give byte-identical files.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use num_complex::Complex64;

use crate::canned::{Dw0Params, Dw1Params, Example};
use crate::csvfmt::{linspace, num};
use crate::error::{Error, Result};
use crate::gbdt::{self, GbdtState};
use crate::matlin::c64;
use crate::scenario::{Output, Scenario};
use crate::seed::{GbdtTriple, SystemKind};
use crate::solutions;
use crate::verify::{self, VerifyReport};
use crate::weyl;

/// Upper end of the membership partial integral in the Weyl table.
pub const MEMBERSHIP_X: f64 = 20.0;
/// Points at which the oracle comparison runs.
pub const ORACLE_X: [f64; 3] = [0.5, 1.0, 2.0];
/// Grid points per axis of the PDE residual check.
pub const PDE_GRID: usize = 20;

/// What a run produced.
#[derive(Debug, Clone, Default)]
pub struct RunOutcome {
    pub files: Vec<PathBuf>,
    pub reports: Vec<VerifyReport>,
}

impl RunOutcome {
    pub fn all_pass(&self) -> bool {
        self.reports.iter().all(|r| r.pass)
    }
}

/// Rendered artifacts keyed by file name, before anything touches disk.
pub type Artifacts = BTreeMap<&'static str, String>;

fn header(s: &Scenario, t: &GbdtTriple, artifact: &str) -> String {
    let mut h = String::new();
    let _ = writeln!(h, "# dirac-gbdt {} {artifact}", env!("CARGO_PKG_VERSION"));
    if let Some(ex) = &s.example {
        let _ = writeln!(h, "# example = {}", ex.name);
        for (k, v) in &ex.params {
            let _ = writeln!(h, "# param {k} = {}", num(*v));
        }
    }
    let _ = writeln!(h, "# kind = {}", s.kind.name());
    let _ = writeln!(h, "# a = {} {:+}i", num(s.a[0]), s.a[1]);
    let _ = writeln!(h, "# c = {}", num(s.c));
    let _ = writeln!(h, "# n = {} p = {}", t.n(), t.p());
    let s0 = t.s0();
    let diag: Vec<String> = (0..t.n()).map(|i| num(s0[(i, i)].re)).collect();
    let _ = writeln!(h, "# S0 diagonal = {}", diag.join(" "));
    let _ = writeln!(h, "# S0 min eigenvalue = {}", num(t.s0_min_eig()));
    for d in t.diagnostics() {
        let _ = writeln!(h, "# note: {}", d.replace('\n', " "));
    }
    h
}

fn push_row(out: &mut String, cells: &[String]) {
    out.push_str(&cells.join(","));
    out.push('\n');
}

fn entry_names(prefix: &str, rows: usize, cols: usize) -> Vec<String> {
    let mut v = Vec::new();
    for part in ["re", "im"] {
        for i in 0..rows {
            for k in 0..cols {
                v.push(format!("{part}_{prefix}_{}_{}", i + 1, k + 1));
            }
        }
    }
    v
}

fn entries(m: &crate::matlin::CMatrix) -> Vec<String> {
    let mut v = Vec::new();
    for part in 0..2 {
        for i in 0..m.nrows() {
            for k in 0..m.ncols() {
                let z = m[(i, k)];
                v.push(num(if part == 0 { z.re } else { z.im }));
            }
        }
    }
    v
}

/// Rows of the x-indexed artifacts; evaluation failures name `grids.x`.
fn domain(s: &Scenario) -> Vec<f64> {
    s.grids.x.points()
}

fn dw(t: &GbdtTriple) -> bool {
    t.dirac_weyl_hypotheses().is_ok()
}

/// Columns: `x`, Re/Im of every `ṽ` entry, `omega` (Dirac–Weyl case only),
/// `min_eig_s`, Re/Im of the upper triangle of `S`.
pub fn potential_csv(s: &Scenario, t: &GbdtTriple) -> Result<String> {
    let p = t.p();
    let n = t.n();
    let mut out = header(s, t, "potential");
    let mut cols = vec!["x".to_string()];
    cols.extend(entry_names("v", p, p));
    if dw(t) {
        cols.push("omega".into());
    }
    cols.push("min_eig_s".into());
    let upper: Vec<(usize, usize)> = (0..n).flat_map(|i| (i..n).map(move |k| (i, k))).collect();
    for part in ["re", "im"] {
        for (i, k) in &upper {
            cols.push(format!("{part}_s_{}_{}", i + 1, k + 1));
        }
    }
    push_row(&mut out, &cols);
    for x in domain(s) {
        let st = GbdtState::at(t, x).map_err(|e| e.in_field("grids.x"))?;
        let mut row = vec![num(x)];
        row.extend(entries(&st.potential(t)));
        if dw(t) {
            row.push(num(
                gbdt::omega_from_state(t, &st).map_err(|e| e.in_field("grids.x"))?
            ));
        }
        row.push(num(st.s_inv.min_eig));
        for part in 0..2 {
            for &(i, k) in &upper {
                let z = st.s[(i, k)];
                row.push(num(if part == 0 { z.re } else { z.im }));
            }
        }
        push_row(&mut out, &row);
    }
    Ok(out)
}

/// Columns: `re_z`, `im_z`, Re/Im of every `φ` entry, `norm_phi` (spectral
/// norm), `membership` (partial integral up to `X` from the header).
pub fn weyl_csv(s: &Scenario, t: &GbdtTriple, zs: &[Complex64]) -> Result<String> {
    let p = t.p();
    let reach = verify::membership_reach(t, MEMBERSHIP_X);
    let mut out = header(s, t, "weyl");
    let _ = writeln!(out, "# membership X = {}", num(reach));
    let mut cols = vec!["re_z".to_string(), "im_z".into()];
    cols.extend(entry_names("phi", p, p));
    cols.push("norm_phi".into());
    cols.push("membership".into());
    push_row(&mut out, &cols);
    for (i, &z) in zs.iter().enumerate() {
        let field = format!("z[{i}]");
        let w = weyl::weyl_via_y(t, z).map_err(|e| e.in_field(&field))?;
        let m = verify::membership_partial_integrals(t, z, &w.phi, &[reach])
            .map_err(|e| e.in_field(&field))?;
        let mut row = vec![num(z.re), num(z.im)];
        row.extend(entries(&w.phi));
        row.push(num(crate::matlin::spectral_norm(&w.phi)));
        row.push(num(m[0]));
        push_row(&mut out, &row);
    }
    Ok(out)
}

/// Columns: `x`, `xi`, `abs_psi_i_k` for every entry of `ψ(x, ξ)`.
pub fn dynamical_csv(s: &Scenario, t: &GbdtTriple) -> Result<String> {
    let (rows, cols_n) = (2 * t.p(), t.n());
    let mut out = header(s, t, "dynamical");
    let mut cols = vec!["x".to_string(), "xi".into()];
    for i in 0..rows {
        for k in 0..cols_n {
            cols.push(format!("abs_psi_{}_{}", i + 1, k + 1));
        }
    }
    push_row(&mut out, &cols);
    let xis = s.grids.xi.points();
    for x in domain(s) {
        let st = GbdtState::at(t, x).map_err(|e| e.in_field("grids.x"))?;
        for &xi in &xis {
            let psi =
                solutions::dynamical_from_state(t, &st, xi).map_err(|e| e.in_field("grids.xi"))?;
            let mut row = vec![num(x), num(xi)];
            row.extend(abs_entries(&psi));
            push_row(&mut out, &row);
        }
    }
    Ok(out)
}

fn abs_entries(m: &crate::matlin::CMatrix) -> Vec<String> {
    (0..m.nrows())
        .flat_map(|i| (0..m.ncols()).map(move |k| (i, k)))
        .map(|(i, k)| num(m[(i, k)].norm()))
        .collect()
}

/// Plateau table for the steplike example, growth table for the
/// non-diagonalizable one.
///
/// Steplike columns: `x`, `omega`, `limit`, `abs_diff`. Growth columns: `x`,
/// `omega`, `omega_over_x2`, `growth_constant`, `ratio`.
pub fn asymptotics_csv(s: &Scenario, t: &GbdtTriple) -> Result<String> {
    let ex = s.example.as_ref().ok_or_else(|| Error::Scenario {
        field: "outputs".into(),
        msg: "the asymptotics artifact needs an [example] section".into(),
    })?;
    let example: Example = ex.name.parse()?;
    let omega = |x: f64| gbdt::eval_omega(t, x).map_err(|e| e.in_field("example"));
    let mut out = header(s, t, "asymptotics");
    match example {
        Example::EeDw0 => {
            let p = Dw0Params::from_map(&example.params(&ex.params)?)?;
            let (minus, plus) = p.plateaus();
            push_row(
                &mut out,
                &["x", "omega", "limit", "abs_diff"].map(String::from),
            );
            for x in [-8.0, -6.0, -4.0, 4.0, 6.0, 8.0] {
                let w = omega(x)?;
                let lim = if x < 0.0 { minus } else { plus };
                push_row(&mut out, &[num(x), num(w), num(lim), num((w - lim).abs())]);
            }
        }
        Example::EeDw1 => {
            let p = Dw1Params::from_map(&example.params(&ex.params)?)?;
            let cst = p.growth_constant();
            let _ = writeln!(
                out,
                "# growth side = {}",
                if p.mu() > 0.0 { "+inf" } else { "-inf" }
            );
            push_row(
                &mut out,
                &["x", "omega", "omega_over_x2", "growth_constant", "ratio"].map(String::from),
            );
            let sign = p.mu().signum();
            for x in linspace(10.0, 25.0, 16).into_iter().map(|x| sign * x) {
                let w = omega(x)?;
                let q = w / (x * x);
                push_row(&mut out, &[num(x), num(w), num(q), num(cst), num(q / cst)]);
            }
        }
        other => {
            return Err(Error::Scenario {
                field: "outputs".into(),
                msg: format!("no asymptotic table for `{other}`"),
            })
        }
    }
    Ok(out)
}

/// The full battery on the scenario's grids.
pub fn verify_reports(s: &Scenario, t: &GbdtTriple) -> Vec<VerifyReport> {
    let xs = s.grids.x.points();
    let on_domain: Vec<f64> = match t.kind() {
        SystemKind::SelfAdjoint => xs.iter().copied().filter(|&x| x >= 0.0).collect(),
        SystemKind::SkewSelfAdjoint => xs.clone(),
    };
    let (lo, hi) = (
        on_domain.first().copied().unwrap_or(0.0),
        on_domain.last().copied().unwrap_or(0.0),
    );
    let pde_x = linspace(lo, hi, PDE_GRID);
    let pde_xi = linspace(s.grids.xi.start, s.grids.xi.stop, PDE_GRID);
    let mut out = vec![verify::check_identity(t, &on_domain)];
    out.extend(verify::check_s_methods(t, &on_domain));
    out.extend(verify::check_positivity(t, &xs));
    out.push(verify::check_dual_ode(t, &on_domain));
    out.push(verify::check_pispluss(t, &on_domain));
    out.extend(verify::check_pde(t, &pde_x, &pde_xi));
    out.extend(verify::check_omega_realness(t, &on_domain));
    let zs = s.z_values();
    if !zs.is_empty() && t.s0_positive() {
        out.extend(verify::check_weyl_routes(t, &zs));
        for &z in &zs {
            out.extend(verify::check_weyl_membership(t, z, MEMBERSHIP_X));
        }
        out.extend(verify::check_oracle(t, &zs, &ORACLE_X));
    }
    out
}

pub fn verify_csv(s: &Scenario, t: &GbdtTriple, reports: &[VerifyReport]) -> String {
    let mut out = header(s, t, "verify");
    out.push_str(VerifyReport::CSV_HEADER);
    out.push('\n');
    for r in reports {
        out.push_str(&r.to_csv_line());
        out.push('\n');
    }
    out
}

/// Renders every requested artifact in memory.
pub fn render(s: &Scenario) -> Result<(Artifacts, Vec<VerifyReport>)> {
    let t = s.triple()?;
    render_with(s, &t)
}

fn render_with(s: &Scenario, t: &GbdtTriple) -> Result<(Artifacts, Vec<VerifyReport>)> {
    let mut art = Artifacts::new();
    let mut reports = Vec::new();
    for &o in &s.outputs {
        let text = match o {
            Output::Potential => potential_csv(s, t)?,
            Output::Weyl => weyl_csv(s, t, &s.z_values())?,
            Output::Dynamical => dynamical_csv(s, t)?,
            Output::Asymptotics => asymptotics_csv(s, t)?,
            Output::Verify => {
                reports = verify_reports(s, t);
                verify_csv(s, t, &reports)
            }
        };
        art.insert(o.file_name(), text);
    }
    Ok((art, reports))
}

fn write_artifacts(out_dir: &Path, art: &Artifacts) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(out_dir)
        .map_err(|e| Error::Io(format!("{}: {e}", out_dir.display())))?;
    let mut files = Vec::new();
    for (name, text) in art {
        let path = out_dir.join(name);
        std::fs::write(&path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        files.push(path);
    }
    Ok(files)
}

/// Renders the requested artifacts and writes them into `out_dir`.
pub fn run_scenario(s: &Scenario, out_dir: &Path) -> Result<RunOutcome> {
    let (art, reports) = render(s)?;
    Ok(RunOutcome {
        files: write_artifacts(out_dir, &art)?,
        reports,
    })
}

/// Materializes a canned example and runs it; the non-diagonalizable example
/// refuses to run without `S(0) > 0`.
pub fn cmd_example(
    example: Example,
    overrides: &BTreeMap<String, f64>,
    out_dir: &Path,
) -> Result<RunOutcome> {
    let s = example.scenario(overrides)?;
    let t = s.triple()?;
    if example == Example::EeDw1 {
        require_positive(&t)?;
    }
    let (art, reports) = render_with(&s, &t)?;
    let mut files = write_artifacts(out_dir, &art)?;
    let path = out_dir.join("scenario.toml");
    std::fs::write(&path, s.to_toml()?)
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    files.push(path);
    Ok(RunOutcome { files, reports })
}

/// Refuses a triple whose `S(0)` is not positive definite, reporting the
/// smallest eigenvalue.
pub fn require_positive(t: &GbdtTriple) -> Result<()> {
    if t.s0_positive() {
        Ok(())
    } else {
        Err(Error::NotPositive {
            min_eig: t.s0_min_eig(),
        })
    }
}

// ---------------------------------------------------------------------------
// command line

#[derive(Debug, Parser)]
#[command(
    name = "dirac-gbdt",
    version,
    about = "Explicit Darboux-transformed Dirac systems"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Produce every artifact listed in the scenario's `outputs`.
    Run {
        scenario: PathBuf,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Run a built-in example (ee-dw0, ee-dw1, trivial-sa, trivial-ssa, sa-scalar).
    Example {
        name: String,
        /// Parameter override, e.g. `--set lambda=3`.
        #[arg(long = "set", value_name = "KEY=VALUE")]
        set: Vec<String>,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        /// Print the scenario document instead of running it.
        #[arg(long)]
        print_scenario: bool,
    },
    /// Run the verification battery only.
    Verify {
        scenario: PathBuf,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Weyl table at the given spectral points.
    Weyl {
        scenario: PathBuf,
        /// Spectral point `re,im`; repeatable.
        #[arg(
            long = "z",
            value_name = "RE,IM",
            required = true,
            allow_hyphen_values = true
        )]
        z: Vec<String>,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
}

pub fn parse_z(text: &str) -> Result<Complex64> {
    let bad = || Error::Scenario {
        field: "--z".into(),
        msg: format!("expected `re,im`, got `{text}`"),
    };
    let (re, im) = text.split_once(',').ok_or_else(bad)?;
    let re: f64 = re.trim().parse().map_err(|_| bad())?;
    let im: f64 = im.trim().parse().map_err(|_| bad())?;
    Ok(c64(re, im))
}

pub fn parse_overrides(items: &[String]) -> Result<BTreeMap<String, f64>> {
    items
        .iter()
        .map(|it| {
            let bad = || Error::Scenario {
                field: "--set".into(),
                msg: format!("expected `key=value`, got `{it}`"),
            };
            let (k, v) = it.split_once('=').ok_or_else(bad)?;
            Ok((k.trim().to_string(), v.trim().parse().map_err(|_| bad())?))
        })
        .collect()
}

fn report(outcome: &RunOutcome) -> i32 {
    for f in &outcome.files {
        println!("wrote {}", f.display());
    }
    for r in &outcome.reports {
        println!("{r}");
    }
    if outcome.all_pass() {
        0
    } else {
        eprintln!("verification failed");
        1
    }
}

fn execute(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Run { scenario, out } => {
            let s = Scenario::load(&scenario)?;
            Ok(report(&run_scenario(&s, &out)?))
        }
        Command::Example {
            name,
            set,
            out,
            print_scenario,
        } => {
            let ex: Example = name.parse()?;
            let overrides = parse_overrides(&set)?;
            if print_scenario {
                print!("{}", ex.scenario(&overrides)?.to_toml()?);
                return Ok(0);
            }
            Ok(report(&cmd_example(ex, &overrides, &out)?))
        }
        Command::Verify { scenario, out } => {
            let mut s = Scenario::load(&scenario)?;
            s.outputs = vec![Output::Verify];
            Ok(report(&run_scenario(&s, &out)?))
        }
        Command::Weyl { scenario, z, out } => {
            let mut s = Scenario::load(&scenario)?;
            s.z = z
                .iter()
                .map(|t| parse_z(t).map(crate::scenario::to_cplx))
                .collect::<Result<_>>()?;
            s.outputs = vec![Output::Weyl];
            Ok(report(&run_scenario(&s, &out)?))
        }
    }
}

/// Exit status: 0 on success, 1 if a verification failed, 2 on any error.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_spectral_points() {
        assert_eq!(parse_z("-2,6").unwrap(), c64(-2.0, 6.0));
        assert_eq!(parse_z(" 1.5 , -0.5").unwrap(), c64(1.5, -0.5));
        assert!(parse_z("3").is_err());
    }

    #[test]
    fn parses_overrides() {
        let o = parse_overrides(&["lambda=3".into(), "d = -1".into()]).unwrap();
        assert_eq!(o["lambda"], 3.0);
        assert_eq!(o["d"], -1.0);
        assert!(parse_overrides(&["lambda".into()]).is_err());
    }

    #[test]
    fn cli_shapes() {
        let c = Cli::try_parse_from(["dirac-gbdt", "weyl", "s.toml", "--z", "-1,5", "--z", "0,6"])
            .unwrap();
        match c.command {
            Command::Weyl { z, .. } => assert_eq!(z, vec!["-1,5", "0,6"]),
            other => panic!("{other:?}"),
        }
        assert!(Cli::try_parse_from(["dirac-gbdt", "weyl", "s.toml"]).is_err());
    }

    #[test]
    fn refuses_indefinite_s0() {
        let t = Example::EeDw1
            .scenario(&BTreeMap::new())
            .unwrap()
            .triple()
            .unwrap();
        assert!(require_positive(&t).is_ok());
        let bad = t.with_s0_unchecked(-t.s0());
        match require_positive(&bad) {
            Err(Error::NotPositive { min_eig }) => assert!(min_eig < 0.0),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn trivial_potential_is_the_seed() {
        let mut s = Example::TrivialSsa.scenario(&BTreeMap::new()).unwrap();
        s.grids.x.count = 5;
        let t = s.triple().unwrap();
        let csv = potential_csv(&s, &t).unwrap();
        let mut lines = csv.lines().filter(|l| !l.starts_with('#'));
        assert_eq!(
            lines.next().unwrap(),
            "x,re_v_1_1,im_v_1_1,min_eig_s,re_s_1_1,im_s_1_1"
        );
        for l in lines {
            let f: Vec<f64> = l.split(',').map(|v| v.parse().unwrap()).collect();
            assert_eq!((f[1], f[2]), (0.0, 1.0));
        }
    }
}
