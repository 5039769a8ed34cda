//! Argument parsing and command dispatch.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use rikit::corpus::rearranged_corpus;
use rikit::homogeneity::{
    admissibility, delta_norm, homogeneity_report, renorm_sup, HomogeneityOptions,
};
use rikit::norm::fundamental_function;
use rikit::orlicz::{ell_grid, embedding_ratio_profile};
use rikit::repro::{
    g_epsilon, g_family, g_scenario, oscillating_scenario, y_scenario, ScenarioReport,
};
use rikit::{Execution, QuadratureSpec};

use crate::emit::{csv_bytes, json_bytes};
use crate::error::{CliError, CliResult};
use crate::spec::{parse_json, FunctionSpec, NormSpec, YoungSpec};

pub const RELTOL_ENV: &str = "RIKIT_QUAD_RELTOL";

pub const EXIT_OK: u8 = 0;
pub const EXIT_USAGE: u8 = 1;
pub const EXIT_SCENARIO_FAILED: u8 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "rikit",
    version,
    about = "Rearrangement-invariant norm experiments"
)]
pub struct Cli {
    /// Directory for report.json and, where produced, grid.csv.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Seed for random corpora.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Evaluate corpora on one thread.
    #[arg(long, global = true)]
    pub sequential: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate a norm of one function.
    Norm {
        #[arg(long)]
        norm: String,
        #[arg(long = "fn")]
        function: String,
    },
    /// Fundamental function on a log grid, or at a single t.
    Fundamental {
        #[arg(long)]
        norm: String,
        #[arg(long)]
        t: Option<f64>,
        #[arg(long, default_value_t = 1e-2)]
        tmin: f64,
        #[arg(long, default_value_t = 1e2)]
        tmax: f64,
        #[arg(long, default_value_t = 9)]
        points: usize,
    },
    /// Dilation ratios over an r grid; uses a seeded corpus unless --fn is given.
    Homogeneity {
        #[arg(long)]
        norm: String,
        #[arg(long = "fn")]
        functions: Vec<String>,
        #[arg(long, default_value_t = 20)]
        corpus: usize,
        #[arg(long, default_value_t = 1e-3)]
        rmin: f64,
        #[arg(long, default_value_t = 1e3)]
        rmax: f64,
        #[arg(long, default_value_t = 13)]
        points: usize,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
    },
    /// sup over s of s^{1/p} N(D_s f).
    Renorm {
        #[arg(long)]
        norm: String,
        #[arg(long = "fn")]
        function: String,
        /// Defaults to the norm's own exponent.
        #[arg(long)]
        p: Option<f64>,
        #[arg(long, default_value_t = 1e-3)]
        smin: f64,
        #[arg(long, default_value_t = 1e3)]
        smax: f64,
        #[arg(long, default_value_t = 25)]
        points: usize,
    },
    /// Build the extrapolation family for the slowly decaying example.
    Delta {
        #[arg(long, default_value_t = 2.0)]
        p: f64,
        #[arg(long = "Q", default_value_t = 3.0)]
        q_big: f64,
        #[arg(long = "N", default_value_t = 20)]
        n: usize,
        #[arg(long = "fn")]
        function: Option<String>,
    },
    /// Compare two Young functions along x -> 0.
    EmbedCheck {
        #[arg(long)]
        phi: String,
        #[arg(long)]
        psi: String,
        #[arg(long, default_value_t = 40.0)]
        lmax: f64,
        #[arg(long, default_value_t = 4001)]
        points: usize,
    },
    /// Reproduce a closed-form scenario.
    Scenario {
        #[command(subcommand)]
        which: Scenario,
    },
}

#[derive(Debug, Subcommand)]
pub enum Scenario {
    /// Dilation ratio of the Y-space counterexample as r -> 0
    Y {
        #[arg(long, default_value_t = 2.0)]
        p: f64,
        #[arg(long, default_value_t = 1e-12)]
        rmin: f64,
        #[arg(long, default_value_t = 1e-2)]
        rmax: f64,
        #[arg(long, default_value_t = 1)]
        per_decade: usize,
    },
    /// Extrapolation norm of the slowly decaying function g
    G {
        #[arg(long, default_value_t = 2.0)]
        p: f64,
        #[arg(long = "Q", default_value_t = 3.0)]
        q_big: f64,
        #[arg(long = "N", default_value_t = 20)]
        n: usize,
        #[arg(long, default_value_t = 100)]
        corpus: usize,
    },
    /// Power Young functions against the oscillating one near 0
    Oscillating {
        #[arg(long, value_delimiter = ',', default_value = "3.5,4,4.5,5")]
        q: Vec<f64>,
        #[arg(long, default_value_t = 40.0)]
        lmax: f64,
    },
}

/// Result of one command: a JSON report, an optional grid and a pass flag.
pub struct Outcome {
    pub report: Value,
    pub grid: Option<(Vec<String>, Vec<Vec<f64>>)>,
    pub pass: bool,
}

impl Outcome {
    fn ok(report: Value) -> Self {
        Self {
            report,
            grid: None,
            pass: true,
        }
    }

    fn with_grid(mut self, columns: &[&str], rows: Vec<Vec<f64>>) -> Self {
        self.grid = Some((columns.iter().map(|c| c.to_string()).collect(), rows));
        self
    }
}

pub fn quadrature_from_env() -> CliResult<QuadratureSpec> {
    let quad = QuadratureSpec::default();
    match std::env::var(RELTOL_ENV) {
        Ok(text) => {
            let tol: f64 = text.trim().parse().map_err(|_| {
                CliError::Usage(format!("{RELTOL_ENV} must be a number, got {text:?}"))
            })?;
            let quad = quad.with_rel_tol(tol);
            quad.validate()?;
            Ok(quad)
        }
        Err(_) => Ok(quad),
    }
}

fn log_grid(lo: f64, hi: f64, points: usize) -> CliResult<Vec<f64>> {
    if !(lo > 0.0) || !(hi >= lo) || !hi.is_finite() || points == 0 {
        return Err(CliError::Usage(format!(
            "grid needs 0 < min <= max and at least one point, got [{lo}, {hi}] x {points}"
        )));
    }
    if points == 1 {
        return Ok(vec![lo]);
    }
    let (a, b) = (lo.ln(), hi.ln());
    let last = points - 1;
    // endpoints exactly as given
    Ok((0..points)
        .map(|i| match i {
            0 => lo,
            i if i == last => hi,
            i => (a + (b - a) * i as f64 / last as f64).exp(),
        })
        .collect())
}

fn scenario_outcome(rep: ScenarioReport) -> CliResult<Outcome> {
    let pass = rep.pass;
    let columns = rep.grid.columns.clone();
    let rows = rep.grid.rows.clone();
    Ok(Outcome {
        report: serde_json::to_value(&rep)?,
        grid: Some((columns, rows)),
        pass,
    })
}

pub fn run(cli: &Cli) -> CliResult<Outcome> {
    let quad = quadrature_from_env()?;
    let exec = if cli.sequential {
        Execution::Sequential
    } else {
        Execution::Parallel
    };
    match &cli.command {
        Command::Norm { norm, function } => {
            let norm_spec: NormSpec = parse_json(norm, "norm spec")?;
            let fn_spec: FunctionSpec = parse_json(function, "function spec")?;
            let value = norm_spec.build(&quad)?.eval(&fn_spec.build()?)?;
            Ok(Outcome::ok(json!({
                "command": "norm",
                "norm": norm_spec,
                "function": fn_spec,
                "value": value,
                "diverged": value == f64::INFINITY,
            })))
        }
        Command::Fundamental {
            norm,
            t,
            tmin,
            tmax,
            points,
        } => {
            let norm_spec: NormSpec = parse_json(norm, "norm spec")?;
            let n = norm_spec.build(&quad)?;
            let ts = match t {
                Some(t) => vec![*t],
                None => log_grid(*tmin, *tmax, *points)?,
            };
            let values = ts
                .iter()
                .map(|t| Ok(fundamental_function(&n, *t)?))
                .collect::<CliResult<Vec<f64>>>()?;
            let rows: Vec<Vec<f64>> = ts.iter().zip(&values).map(|(t, v)| vec![*t, *v]).collect();
            let mut report =
                json!({ "command": "fundamental", "norm": norm_spec, "t": ts, "phi": values });
            if let Some(t) = t {
                report["value"] = json!(values[0]);
                report["t"] = json!(t);
            }
            Ok(Outcome::ok(report).with_grid(&["t", "phi"], rows))
        }
        Command::Homogeneity {
            norm,
            functions,
            corpus,
            rmin,
            rmax,
            points,
            tol,
        } => {
            let norm_spec: NormSpec = parse_json(norm, "norm spec")?;
            let n = norm_spec.build(&quad)?;
            let specs = functions
                .iter()
                .map(|f| parse_json::<FunctionSpec>(f, "function spec"))
                .collect::<CliResult<Vec<_>>>()?;
            let testset = if specs.is_empty() {
                rearranged_corpus(cli.seed, *corpus)
            } else {
                specs.iter().map(|s| s.build()).collect::<CliResult<_>>()?
            };
            let opts = HomogeneityOptions {
                tolerance: *tol,
                execution: exec,
                ..Default::default()
            };
            let rep = homogeneity_report(&n, &testset, &log_grid(*rmin, *rmax, *points)?, opts)?;
            let rows = rep
                .stats
                .iter()
                .map(|s| vec![s.r, s.min, s.median, s.max])
                .collect();
            let report = json!({
                "command": "homogeneity",
                "norm": norm_spec,
                "functions": if specs.is_empty() { json!({ "corpus": corpus, "seed": cli.seed }) } else { json!(specs) },
                "report": rep,
            });
            Ok(Outcome::ok(report)
                .with_grid(&["r", "ratio_min", "ratio_median", "ratio_max"], rows))
        }
        Command::Renorm {
            norm,
            function,
            p,
            smin,
            smax,
            points,
        } => {
            let norm_spec: NormSpec = parse_json(norm, "norm spec")?;
            let fn_spec: FunctionSpec = parse_json(function, "function spec")?;
            let n = norm_spec.build(&quad)?;
            let p = p.or(n.nominal_p()).ok_or_else(|| {
                CliError::Usage("this norm has no built-in exponent; pass --p".into())
            })?;
            let rep = renorm_sup(
                &n,
                p,
                &fn_spec.build()?,
                &log_grid(*smin, *smax, *points)?,
                exec,
            )?;
            let rows = rep
                .s
                .iter()
                .zip(&rep.values)
                .map(|(s, v)| vec![*s, *v])
                .collect();
            let report = json!({ "command": "renorm", "norm": norm_spec, "function": fn_spec, "p": p, "report": rep });
            Ok(Outcome::ok(report).with_grid(&["s", "value"], rows))
        }
        Command::Delta {
            p,
            q_big,
            n,
            function,
        } => {
            let family = g_family(*p, *q_big, *n, &quad)?;
            let rows: Vec<Vec<f64>> = family
                .members
                .iter()
                .map(|m| vec![m.index, m.coef])
                .collect();
            let mut report = json!({
                "command": "delta",
                "p": p,
                "Q": q_big,
                "N": n,
                "epsilon": g_epsilon(*p, *q_big, *n),
                "admissibility": admissibility(&family)?,
                "members": rows.iter().map(|r| json!({ "index": r[0], "coef": r[1] })).collect::<Vec<_>>(),
            });
            if let Some(text) = function {
                let fn_spec: FunctionSpec = parse_json(text, "function spec")?;
                report["function"] = json!(fn_spec);
                report["value"] = json!(delta_norm(&family, &fn_spec.build()?)?);
            }
            Ok(Outcome::ok(report).with_grid(&["index", "coef"], rows))
        }
        Command::EmbedCheck {
            phi,
            psi,
            lmax,
            points,
        } => {
            let (phi_spec, psi_spec) = (YoungSpec::parse(phi)?, YoungSpec::parse(psi)?);
            let (phi_f, psi_f) = (phi_spec.build()?, psi_spec.build()?);
            if !(*lmax > 0.0) || *points < 2 {
                return Err(CliError::Usage(
                    "embed-check needs --lmax > 0 and --points >= 2".into(),
                ));
            }
            let ells = ell_grid(*lmax, *points);
            let forward = embedding_ratio_profile(&phi_f, &psi_f, &ells);
            let backward = embedding_ratio_profile(&psi_f, &phi_f, &ells);
            let rows = (0..ells.len())
                .map(|k| vec![ells[k], forward.log_ratio[k], backward.log_ratio[k]])
                .collect();
            let report = json!({
                "command": "embed-check",
                "phi": phi_spec,
                "psi": psi_spec,
                "psi_over_phi_unbounded": forward.unbounded,
                "phi_over_psi_unbounded": backward.unbounded,
                "psi_over_phi": forward,
                "phi_over_psi": backward,
            });
            Ok(Outcome::ok(report)
                .with_grid(&["ell", "log_psi_over_phi", "log_phi_over_psi"], rows))
        }
        Command::Scenario { which } => match which {
            Scenario::Y {
                p,
                rmin,
                rmax,
                per_decade,
            } => {
                let decades = (rmax / rmin).log10();
                let points = (decades * *per_decade as f64).round() as usize + 1;
                scenario_outcome(y_scenario(*p, &log_grid(*rmin, *rmax, points)?, &quad)?)
            }
            Scenario::G {
                p,
                q_big,
                n,
                corpus,
            } => scenario_outcome(g_scenario(*p, *q_big, *n, *corpus, cli.seed, &quad)?),
            Scenario::Oscillating { q, lmax } => {
                scenario_outcome(oscillating_scenario(q, *lmax, &quad)?)
            }
        },
    }
}

fn write_outputs(
    dir: &Path,
    json: &[u8],
    grid: Option<&(Vec<String>, Vec<Vec<f64>>)>,
) -> CliResult<()> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join("report.json"), json)?;
    if let Some((columns, rows)) = grid {
        fs::write(dir.join("grid.csv"), csv_bytes(columns, rows))?;
    }
    Ok(())
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn main_with<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(stderr, "{e}");
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let result = run(&cli).and_then(|outcome| {
        let json = json_bytes(&outcome.report)?;
        if let Some(dir) = &cli.out {
            write_outputs(dir, &json, outcome.grid.as_ref())?;
        }
        stdout.write_all(&json)?;
        Ok(outcome.pass)
    });
    match result {
        Ok(true) => EXIT_OK,
        Ok(false) => {
            let _ = writeln!(stderr, "scenario assertions failed");
            EXIT_SCENARIO_FAILED
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            EXIT_USAGE
        }
    }
}
