//! Command-line front end.
//!
//! Settings are resolved in three layers: per-command defaults (the `fig1`
//! and `fig2` presets), then a JSON file given with `--config`, then flags.
//! The resolved [`RunConfig`] is validated before anything is computed.

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::entanglement::correlators_log_negativity;
use crate::equilibrium::eq_correlators;
use crate::error::{Error, Result};
use crate::model::{Beta, ModelParams, QuadratureSpec};
use crate::output::{observable_cells, scan_table, write_atomic, Cell, Format, Table};
use crate::quench::quench_correlators;
use crate::scan::{ergodicity_report, temperature_sweep, time_series, uniform_grid, Axis, ScanResult};
use crate::thermo::{match_beta, DEFAULT_SOLVER_TOL};

/// Environment variable overriding the worker-thread count.
pub const WORKERS_ENV: &str = "XYQUENCH_WORKERS";

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_NUMERICAL: i32 = 2;
pub const EXIT_PARTIAL: i32 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Subcommand)]
#[serde(rename_all = "kebab-case")]
pub enum CommandKind {
    /// Thermal-state observables at (--beta, --h-field, --gamma).
    Equilibrium,
    /// Evolved-state observables at one time --t.
    QuenchPoint,
    /// Inverse temperature of the energy-matched equilibrium state.
    MatchBeta,
    /// Time series preset: gamma=0.5, alpha=200, a=0.5, b=0, t in [0, 10].
    Fig1,
    /// Temperature sweep preset: gamma=0.5, a=10, b=0, t=1, beta in [0.05, 2].
    Fig2,
    /// General scan along --axis time|beta over --from/--to/--step.
    Sweep,
    /// Long-time averages over [--from, --to] against equilibrium values.
    Average,
}

impl CommandKind {
    pub fn name(self) -> &'static str {
        match self {
            CommandKind::Equilibrium => "equilibrium",
            CommandKind::QuenchPoint => "quench-point",
            CommandKind::MatchBeta => "match-beta",
            CommandKind::Fig1 => "fig1",
            CommandKind::Fig2 => "fig2",
            CommandKind::Sweep => "sweep",
            CommandKind::Average => "average",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum AxisArg {
    Time,
    Beta,
}

/// Flags. Every setting is optional here; missing values come from the
/// config file or the command's defaults.
#[derive(Debug, Clone, Default, Parser)]
#[command(name = "xyquench", version, about = "Quench dynamics, magnetization and entanglement of the infinite XY chain")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Option<CommandKind>,

    /// JSON configuration file; flags override its values.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub config: Option<PathBuf>,
    /// Output file (written atomically); stdout when absent.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum, global = true)]
    pub format: Option<Format>,
    /// Worker threads for scans.
    #[arg(long, env = WORKERS_ENV, global = true)]
    pub workers: Option<usize>,

    /// Anisotropy gamma.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub gamma: Option<f64>,
    /// Initial inverse temperature (number or `inf`).
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub alpha: Option<String>,
    /// Field before the switch.
    #[arg(long = "a-field", global = true, allow_hyphen_values = true)]
    pub field_a: Option<f64>,
    /// Field after the switch.
    #[arg(long = "b-field", global = true, allow_hyphen_values = true)]
    pub field_b: Option<f64>,
    /// Inverse temperature for `equilibrium` (number or `inf`).
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub beta: Option<String>,
    /// Field for `equilibrium`.
    #[arg(long = "h-field", global = true, allow_hyphen_values = true)]
    pub h_field: Option<f64>,
    /// Time for `quench-point` and for beta-axis sweeps.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub t: Option<f64>,
    /// Scan axis for `sweep`.
    #[arg(long, value_enum, global = true)]
    pub axis: Option<AxisArg>,
    /// Grid start.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub from: Option<f64>,
    /// Grid end (inclusive).
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub to: Option<f64>,
    /// Grid step.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub step: Option<f64>,

    #[arg(long, global = true, allow_hyphen_values = true)]
    pub abs_tol: Option<f64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub rel_tol: Option<f64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub max_subdivisions: Option<usize>,
    /// Energy residual tolerance of the beta solver.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub solver_tol: Option<f64>,
}

/// Contents of a `--config` file. Field names mirror the flags.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "snake_case")]
pub struct FileConfig {
    pub command: Option<CommandKind>,
    pub output: Option<PathBuf>,
    pub format: Option<Format>,
    pub workers: Option<usize>,
    pub gamma: Option<f64>,
    pub alpha: Option<Beta>,
    pub field_a: Option<f64>,
    pub field_b: Option<f64>,
    pub beta: Option<Beta>,
    pub h_field: Option<f64>,
    pub t: Option<f64>,
    pub axis: Option<AxisArg>,
    pub from: Option<f64>,
    pub to: Option<f64>,
    pub step: Option<f64>,
    pub abs_tol: Option<f64>,
    pub rel_tol: Option<f64>,
    pub max_subdivisions: Option<usize>,
    pub solver_tol: Option<f64>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Io(format!("cannot read config `{}`: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| Error::InvalidParameter {
            field: "config",
            reason: format!("{}: {e}", path.display()),
        })
    }
}

/// Inclusive uniform grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

/// Fully resolved and validated invocation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: CommandKind,
    pub gamma: f64,
    pub field_a: Option<f64>,
    pub field_b: Option<f64>,
    pub alpha: Option<Beta>,
    pub beta: Option<Beta>,
    pub h_field: Option<f64>,
    pub t: Option<f64>,
    pub axis: Option<Axis>,
    pub grid: Option<GridSpec>,
    pub quadrature: QuadratureSpec,
    pub solver_tol: f64,
    pub output: Option<PathBuf>,
    pub format: Format,
    pub workers: Option<usize>,
}

fn missing(field: &'static str, command: CommandKind) -> Error {
    Error::InvalidParameter {
        field,
        reason: format!("required by `{}`", command.name()),
    }
}

fn parse_beta(field: &'static str, s: &str) -> Result<Beta> {
    s.parse::<Beta>().map_err(|e| match e {
        Error::InvalidParameter { reason, .. } => Error::InvalidParameter { field, reason },
        other => other,
    })
}

impl RunConfig {
    /// Merges defaults, the optional config file, and flags, then validates.
    pub fn resolve(cli: &Cli) -> Result<Self> {
        let file = match &cli.config {
            Some(p) => FileConfig::load(p)?,
            None => FileConfig::default(),
        };
        let command = cli.command.or(file.command).ok_or_else(|| Error::InvalidParameter {
            field: "command",
            reason: "no subcommand given on the command line or in the config file".into(),
        })?;

        let alpha = match &cli.alpha {
            Some(s) => Some(parse_beta("alpha", s)?),
            None => file.alpha,
        };
        let beta = match &cli.beta {
            Some(s) => Some(parse_beta("beta", s)?),
            None => file.beta,
        };

        // Presets.
        let (def_gamma, def_a, def_b, def_alpha, def_t, def_grid) = match command {
            CommandKind::Fig1 => {
                let (s, e, d) = crate::scan::DEFAULT_TIME_GRID;
                (Some(0.5), Some(0.5), Some(0.0), Some(Beta::Finite(200.0)), None, Some((s, e, d)))
            }
            CommandKind::Fig2 => {
                let (s, e, d) = crate::scan::DEFAULT_BETA_GRID;
                (Some(0.5), Some(10.0), Some(0.0), None, Some(1.0), Some((s, e, d)))
            }
            CommandKind::Average => (None, None, None, None, None, Some(crate::scan::DEFAULT_AVERAGING)),
            _ => (None, None, None, None, None, None),
        };

        let pick = |flag: Option<f64>, file: Option<f64>, def: Option<f64>| flag.or(file).or(def);
        let gamma = pick(cli.gamma, file.gamma, def_gamma).ok_or_else(|| missing("gamma", command))?;
        let field_a = pick(cli.field_a, file.field_a, def_a);
        let field_b = pick(cli.field_b, file.field_b, def_b);
        let alpha = alpha.or(def_alpha);
        let t = pick(cli.t, file.t, def_t);
        let h_field = cli.h_field.or(file.h_field);

        let axis = match command {
            CommandKind::Fig1 => Some(Axis::Time),
            CommandKind::Fig2 => Some(Axis::Beta),
            CommandKind::Sweep => Some(match cli.axis.or(file.axis).unwrap_or(AxisArg::Time) {
                AxisArg::Time => Axis::Time,
                AxisArg::Beta => Axis::Beta,
            }),
            _ => None,
        };

        let grid = match command {
            CommandKind::Fig1 | CommandKind::Fig2 | CommandKind::Sweep | CommandKind::Average => {
                let (ds, de, dd) = def_grid.map_or((None, None, None), |(s, e, d)| (Some(s), Some(e), Some(d)));
                Some(GridSpec {
                    start: pick(cli.from, file.from, ds).ok_or_else(|| missing("from", command))?,
                    stop: pick(cli.to, file.to, de).ok_or_else(|| missing("to", command))?,
                    step: pick(cli.step, file.step, dd).ok_or_else(|| missing("step", command))?,
                })
            }
            _ => None,
        };

        let defaults = QuadratureSpec::default();
        let quadrature = QuadratureSpec {
            abs_tol: pick(cli.abs_tol, file.abs_tol, Some(defaults.abs_tol)).unwrap_or(defaults.abs_tol),
            rel_tol: pick(cli.rel_tol, file.rel_tol, Some(defaults.rel_tol)).unwrap_or(defaults.rel_tol),
            max_subdivisions: cli
                .max_subdivisions
                .or(file.max_subdivisions)
                .unwrap_or(defaults.max_subdivisions),
            freq_hint: 0.0,
        };

        let config = RunConfig {
            command,
            gamma,
            field_a,
            field_b,
            alpha,
            beta,
            h_field,
            t,
            axis,
            grid,
            quadrature,
            solver_tol: pick(cli.solver_tol, file.solver_tol, Some(DEFAULT_SOLVER_TOL)).unwrap_or(DEFAULT_SOLVER_TOL),
            output: cli.output.clone().or(file.output),
            format: cli.format.or(file.format).unwrap_or(Format::Csv),
            workers: cli.workers.or(file.workers),
        };
        config.validate()?;
        Ok(config)
    }

    /// Checks that every input the command needs is present and in range.
    pub fn validate(&self) -> Result<()> {
        let c = self.command;
        crate::model::check_gamma(self.gamma)?;
        self.quadrature.validate()?;
        if !(self.solver_tol > 0.0) {
            return Err(Error::InvalidParameter {
                field: "solver_tol",
                reason: format!("must be > 0, got {}", self.solver_tol),
            });
        }
        if self.workers == Some(0) {
            return Err(Error::InvalidParameter {
                field: "workers",
                reason: "must be positive".into(),
            });
        }
        match c {
            CommandKind::Equilibrium => {
                self.beta.ok_or_else(|| missing("beta", c))?;
                let h = self.h_field.ok_or_else(|| missing("h_field", c))?;
                crate::model::check_finite("h_field", h)?;
            }
            CommandKind::QuenchPoint => {
                self.model()?;
                let t = self.t.ok_or_else(|| missing("t", c))?;
                if !(t >= 0.0) || !t.is_finite() {
                    return Err(Error::InvalidParameter {
                        field: "t",
                        reason: format!("must be finite and >= 0, got {t}"),
                    });
                }
            }
            CommandKind::MatchBeta | CommandKind::Fig1 => {
                self.model()?;
            }
            CommandKind::Average => {
                self.model()?;
                let g = self.grid.expect("grid resolved");
                if !(g.start < g.stop) || g.start < 0.0 {
                    return Err(Error::InvalidParameter {
                        field: "from",
                        reason: format!("averaging window needs 0 <= from < to, got [{}, {}]", g.start, g.stop),
                    });
                }
            }
            CommandKind::Fig2 | CommandKind::Sweep => match self.axis {
                Some(Axis::Beta) => {
                    self.field_a.ok_or_else(|| missing("field_a", c))?;
                    self.field_b.ok_or_else(|| missing("field_b", c))?;
                    self.t.ok_or_else(|| missing("t", c))?;
                    let g = self.grid.expect("grid resolved");
                    if !(g.start > 0.0) {
                        return Err(Error::InvalidParameter {
                            field: "from",
                            reason: "inverse temperatures must be > 0".into(),
                        });
                    }
                }
                _ => {
                    self.model()?;
                }
            },
        }
        if let Some(g) = self.grid {
            uniform_grid(g.start, g.stop, g.step)?;
            if matches!(self.axis, Some(Axis::Time)) && g.start < 0.0 {
                return Err(Error::InvalidParameter {
                    field: "from",
                    reason: "times must be >= 0".into(),
                });
            }
        }
        Ok(())
    }

    pub fn model(&self) -> Result<ModelParams> {
        let c = self.command;
        ModelParams::new(
            self.gamma,
            self.field_a.ok_or_else(|| missing("field_a", c))?,
            self.field_b.ok_or_else(|| missing("field_b", c))?,
            self.alpha.ok_or_else(|| missing("alpha", c))?,
        )
    }

    fn grid_values(&self) -> Result<Vec<f64>> {
        let g = self.grid.ok_or_else(|| missing("from", self.command))?;
        uniform_grid(g.start, g.stop, g.step)
    }

    /// Provenance shared by every output.
    fn provenance(&self) -> Result<Value> {
        let mut v = serde_json::json!({
            "tool": env!("CARGO_PKG_NAME"),
            "version": env!("CARGO_PKG_VERSION"),
            "command": self.command.name(),
        });
        let cfg = serde_json::to_value(self)?;
        if let (Value::Object(dst), Value::Object(src)) = (&mut v, cfg) {
            for (k, val) in src {
                if !matches!(k.as_str(), "output" | "workers" | "format" | "command") {
                    dst.insert(k, val);
                }
            }
        }
        Ok(v)
    }
}

/// What a run produced.
#[derive(Debug)]
pub struct Outcome {
    pub table: Table,
    pub failed_rows: usize,
}

fn scan_outcome(config: &RunConfig, mut scan: ScanResult) -> Result<Outcome> {
    scan.metadata.command = config.command.name().to_string();
    let failed_rows = scan.failed_rows();
    let mut table = scan_table(&scan)?;
    if let (Value::Object(dst), Value::Object(src)) = (&mut table.metadata, config.provenance()?) {
        for (k, v) in src {
            dst.entry(k).or_insert(v);
        }
    }
    Ok(Outcome { table, failed_rows })
}

fn beta_cell(b: Beta) -> Cell {
    match b {
        Beta::Finite(v) => Cell::Number(v),
        Beta::Infinite => Cell::Text("inf".into()),
    }
}

fn observable_columns(first: &str) -> Vec<String> {
    std::iter::once(first.to_string())
        .chain(crate::output::OBSERVABLE_COLUMNS.iter().map(|s| s.to_string()))
        .collect()
}

/// Runs a validated configuration.
pub fn execute(config: &RunConfig) -> Result<Outcome> {
    let spec = config.quadrature;
    let metadata = config.provenance()?;
    let single = |columns: Vec<String>, row: Vec<Cell>| Outcome {
        table: Table {
            metadata: metadata.clone(),
            columns,
            rows: vec![row],
        },
        failed_rows: 0,
    };
    match config.command {
        CommandKind::Equilibrium => {
            let beta = config.beta.expect("validated");
            let h = config.h_field.expect("validated");
            let c = eq_correlators(beta, h, config.gamma, &spec)?;
            let e_n = correlators_log_negativity(&c)?;
            let mut row = vec![beta_cell(beta)];
            row.extend(observable_cells(Some(&c), Some(e_n), Some(c.energy(config.gamma, h))));
            Ok(single(observable_columns("beta"), row))
        }
        CommandKind::QuenchPoint => {
            let p = config.model()?;
            let t = config.t.expect("validated");
            let c = quench_correlators(&p, t, &spec)?;
            let e_n = correlators_log_negativity(&c)?;
            let mut row = vec![Cell::Number(t)];
            row.extend(observable_cells(Some(&c), Some(e_n), Some(c.energy(p.gamma, p.field_at(t)))));
            Ok(single(observable_columns("t"), row))
        }
        CommandKind::MatchBeta => {
            let p = config.model()?;
            let m = match_beta(&p, &spec, config.solver_tol)?;
            let columns = ["beta", "quench_energy", "eq_energy_at_beta", "residual", "bracket_lo", "bracket_hi", "iterations"];
            let row = vec![
                beta_cell(m.beta),
                m.quench_energy.into(),
                m.eq_energy_at_beta.into(),
                m.residual.into(),
                m.bracket.0.into(),
                m.bracket.1.into(),
                (m.iterations as f64).into(),
            ];
            Ok(single(columns.iter().map(|s| s.to_string()).collect(), row))
        }
        CommandKind::Fig1 | CommandKind::Fig2 | CommandKind::Sweep => {
            let grid = config.grid_values()?;
            let scan = match config.axis.expect("validated") {
                Axis::Time => time_series(&config.model()?, &grid, &spec)?,
                Axis::Beta => temperature_sweep(
                    config.gamma,
                    config.field_a.expect("validated"),
                    config.field_b.expect("validated"),
                    config.t.expect("validated"),
                    &grid,
                    &spec,
                )?,
            };
            scan_outcome(config, scan)
        }
        CommandKind::Average => {
            let p = config.model()?;
            let g = config.grid.expect("validated");
            let r = ergodicity_report(&p, (g.start, g.stop), g.step, &spec)?;
            let columns = [
                "t_min",
                "t_max",
                "step",
                "samples",
                "mean_M_z",
                "mean_E_N",
                "stationary_M_z",
                "stationary_E_N",
                "beta_eq",
                "M_z_eq",
                "E_N_eq",
            ];
            let row = vec![
                r.average.t_min.into(),
                r.average.t_max.into(),
                r.average.step.into(),
                (r.average.samples as f64).into(),
                r.average.mean_m_z.into(),
                r.average.mean_e_n.into(),
                r.stationary_m_z.into(),
                r.stationary_e_n.into(),
                beta_cell(r.matched.beta),
                r.m_z_equilibrium.into(),
                r.e_n_equilibrium.into(),
            ];
            Ok(single(columns.iter().map(|s| s.to_string()).collect(), row))
        }
    }
}

/// Exit status for an error.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::NonConvergence { .. } | Error::NoBracket { .. } | Error::NonPhysical { .. } => EXIT_NUMERICAL,
        Error::Domain(_) | Error::InvalidParameter { .. } | Error::Io(_) | Error::Format(_) => EXIT_INVALID,
    }
}

/// Resolves, runs and writes; returns the process exit status.
pub fn run(cli: &Cli) -> i32 {
    let config = match RunConfig::resolve(cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("xyquench: {e}");
            return EXIT_INVALID;
        }
    };
    for w in config.model().map(|p| p.warnings()).unwrap_or_default() {
        eprintln!("xyquench: warning: {w}");
    }
    let outcome = match config.workers {
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(|| execute(&config)),
            Err(e) => Err(Error::InvalidParameter {
                field: "workers",
                reason: e.to_string(),
            }),
        },
        None => execute(&config),
    };
    let outcome = match outcome {
        Ok(o) => o,
        Err(e) => {
            eprintln!("xyquench: {e}");
            return exit_code(&e);
        }
    };
    let text = match outcome.table.render(config.format) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("xyquench: {e}");
            return EXIT_INVALID;
        }
    };
    match &config.output {
        Some(path) => {
            if let Err(e) = write_atomic(path, &text) {
                eprintln!("xyquench: {e}");
                return EXIT_INVALID;
            }
        }
        None => {
            use std::io::Write;
            let mut out = std::io::stdout().lock();
            if let Err(e) = out.write_all(text.as_bytes()).and_then(|()| out.flush()) {
                if e.kind() != std::io::ErrorKind::BrokenPipe {
                    eprintln!("xyquench: {e}");
                    return EXIT_INVALID;
                }
            }
        }
    }
    if outcome.failed_rows > 0 {
        eprintln!("xyquench: {} row(s) failed; see the status column", outcome.failed_rows);
        EXIT_PARTIAL
    } else {
        EXIT_OK
    }
}
