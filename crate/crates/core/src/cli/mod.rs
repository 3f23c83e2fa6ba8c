//! The `reilly` command line: catalog selection, scenario files, command
//! dispatch and report output.
//!
//! Exit codes: 0 when every audit passes, 1 when any audit fails, 2 on an
//! input error, a failed step or an unmet hypothesis.

pub mod commands;
pub mod expr;
pub mod report;
pub mod scenario;

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

pub use commands::execute;
pub use report::{Report, StepReport};
pub use scenario::{MValue, Scenario, UserChart};

use crate::error::Result;

#[derive(Parser, Debug)]
#[command(name = "reilly", version, about = "Audit weighted Reilly-type identities, integral inequalities and eigenvalue bounds")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Refinement study of the weighted Reilly identity for a function f.
    VerifyReilly(Flags),
    /// First nonzero eigenvalue of a weighted eigenproblem.
    Eig {
        problem: EigProblem,
        #[command(flatten)]
        flags: Flags,
    },
    /// Audit an inequality of the theory.
    Audit {
        kind: AuditKind,
        #[command(flatten)]
        flags: Flags,
    },
    /// Observed convergence order of a quantity under grid refinement.
    Converge(Flags),
    /// List catalog geometries and hypersurfaces.
    Catalog(Flags),
    /// Run the steps of a scenario file.
    Run {
        scenario: PathBuf,
        #[command(flatten)]
        flags: Flags,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum EigProblem {
    Closed,
    Boundary,
    Steklov,
    Wentzell,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum AuditKind {
    HeintzeKarcher,
    Minkowski,
    EigenBounds,
    Schur,
}

/// Flags mirror scenario keys and override them.
#[derive(Args, Debug, Default)]
struct Flags {
    /// Catalog geometry or hypersurface id (see `catalog`).
    #[arg(long)]
    geometry: Option<String>,
    /// Refinement level of single-grid commands.
    #[arg(long)]
    level: Option<usize>,
    /// Number of levels of a refinement study.
    #[arg(long)]
    levels: Option<usize>,
    /// Coarsest level of a refinement study.
    #[arg(long)]
    base_level: Option<usize>,
    /// Finite-difference accuracy order: 2, 4, 6 or 8.
    #[arg(long)]
    stencil_order: Option<usize>,
    /// Points per axis at level 0.
    #[arg(long, value_delimiter = ',')]
    resolution: Option<Vec<usize>>,
    /// Scale of catalog geometries; geodesic radius of hypersurface spheres.
    #[arg(long)]
    radius: Option<f64>,
    /// Ellipsoid semi-axes a,b,c.
    #[arg(long, value_delimiter = ',')]
    axes: Option<Vec<f64>>,
    /// Torus radius of the core circle.
    #[arg(long)]
    major: Option<f64>,
    /// Torus tube radius.
    #[arg(long)]
    minor: Option<f64>,
    /// Weight φ of the measure e^{-φ} dv (expression).
    #[arg(long, allow_hyphen_values = true)]
    phi: Option<String>,
    /// Positive potential V (expression).
    #[arg(long, allow_hyphen_values = true)]
    v: Option<String>,
    /// Test function f (expression).
    #[arg(long, allow_hyphen_values = true)]
    f: Option<String>,
    /// Dimension parameter m: a number or "inf".
    #[arg(long, allow_hyphen_values = true)]
    m: Option<String>,
    /// Wentzell parameter β.
    #[arg(long)]
    beta: Option<f64>,
    /// Several Wentzell parameters.
    #[arg(long, value_delimiter = ',')]
    betas: Option<Vec<f64>>,
    /// Curvature lower bound constant K of the eigenvalue bounds.
    #[arg(long = "K")]
    curvature_k: Option<f64>,
    /// Curvature lower bound constant K1 of the almost-Schur audit.
    #[arg(long = "K1")]
    k1: Option<f64>,
    /// Index r of S_r.
    #[arg(long)]
    r: Option<usize>,
    /// Index k of σ_k.
    #[arg(long)]
    k: Option<usize>,
    /// Almost-Schur target: h, s, r, sigma (or s2, sigma2, ...).
    #[arg(long)]
    target: Option<String>,
    /// Quantity of `converge`: reilly, closed, boundary, steklov, wentzell, volume, ricci.
    #[arg(long)]
    quantity: Option<String>,
    /// Exact value for error measurement.
    #[arg(long, allow_negative_numbers = true)]
    exact: Option<f64>,
    /// Richardson-extrapolate eigenvalues from the next coarser level.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    extrapolate: Option<bool>,
    /// Assert local conformal flatness of a user chart.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    conformally_flat: Option<bool>,
    /// JSON report path (stdout when absent).
    #[arg(long)]
    json: Option<String>,
    /// CSV audit table path.
    #[arg(long)]
    csv: Option<String>,
    /// Two-column (h, residual) plot-data path.
    #[arg(long)]
    plot: Option<String>,
}

impl Flags {
    fn into_scenario(self) -> Scenario {
        Scenario {
            geometry: self.geometry,
            level: self.level,
            levels: self.levels,
            base_level: self.base_level,
            stencil_order: self.stencil_order,
            resolution: self.resolution,
            radius: self.radius,
            axes: self.axes,
            major: self.major,
            minor: self.minor,
            phi: self.phi,
            v: self.v,
            f: self.f,
            m: self.m.as_deref().map(MValue::parse),
            beta: self.beta,
            betas: self.betas,
            curvature_k: self.curvature_k,
            k1: self.k1,
            r: self.r,
            k: self.k,
            target: self.target,
            quantity: self.quantity,
            exact: self.exact,
            extrapolate: self.extrapolate,
            conformally_flat: self.conformally_flat,
            json: self.json,
            csv: self.csv,
            plot: self.plot,
            ..Default::default()
        }
    }
}

fn value_name<T: ValueEnum>(v: T) -> String {
    v.to_possible_value().map(|p| p.get_name().to_string()).unwrap_or_default()
}

/// Run the steps in order; a step that cannot run is recorded with its error.
pub fn run_steps(steps: &[Scenario]) -> Report {
    let steps = steps
        .iter()
        .map(|s| {
            execute(s).unwrap_or_else(|e| StepReport {
                command: s.command.clone().unwrap_or_default(),
                geometry: s.geometry.clone(),
                parameters: s.parameters(),
                error: Some(e.to_string()),
                ..Default::default()
            })
        })
        .collect();
    Report { steps, ..Default::default() }
}

/// Run a scenario file, writing the outputs it declares.
pub fn run_scenario(path: &Path) -> i32 {
    finish(Scenario::load(path).map(|sc| (sc, Scenario::default())))
}

fn finish(input: Result<(Scenario, Scenario)>) -> i32 {
    let result = input.and_then(|(base, flags)| {
        let outputs = base.overlay(&flags);
        let report = run_steps(&base.expand(&flags));
        eprint!("{}", report.summary());
        let path = |p: &Option<String>| p.as_ref().map(PathBuf::from);
        report.emit(path(&outputs.json).as_deref(), path(&outputs.csv).as_deref(), path(&outputs.plot).as_deref())?;
        Ok(report.exit_code())
    });
    result.unwrap_or_else(|e| {
        eprintln!("error: {e}");
        2
    })
}

/// Parse arguments (including the program name) and run; returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let command = |name: &str, sub: Option<String>| Scenario {
        command: Some(name.to_string()),
        problem: sub,
        ..Default::default()
    };
    let input = match cli.command {
        Command::VerifyReilly(flags) => Ok((command("verify-reilly", None), flags.into_scenario())),
        Command::Eig { problem, flags } => Ok((command("eig", Some(value_name(problem))), flags.into_scenario())),
        Command::Audit { kind, flags } => Ok((command("audit", Some(value_name(kind))), flags.into_scenario())),
        Command::Converge(flags) => Ok((command("converge", None), flags.into_scenario())),
        Command::Catalog(flags) => Ok((command("catalog", None), flags.into_scenario())),
        Command::Run { scenario, flags } => Scenario::load(&scenario).map(|sc| (sc, flags.into_scenario())),
    };
    finish(input)
}
