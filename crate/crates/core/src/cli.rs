//! The solver command line: MaxSAT Evaluation anytime output around [`run`].

use std::fs::File;
use std::io::{self, BufReader, Write};
use std::path::PathBuf;
use std::time::Duration;

use clap::{Parser, ValueEnum};
use serde::Serialize;

use crate::decimation::DecimationMethod;
use crate::formula::{Cost, InstanceKind};
use crate::search::{run, RunResult, SearchParams};
use crate::wcnf::parse_wcnf;
use crate::weighting::{WeightParams, WeightVariant};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KindArg {
    Auto,
    Pms,
    Wpms,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum VariantArg {
    Standard,
    Alt1,
    Alt2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DecimationArg {
    Auto,
    Unh,
    Up,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputMode {
    Mse,
    Json,
}

/// Anytime local-search solver for (weighted) partial MaxSAT.
#[derive(Debug, Clone, Parser)]
#[command(name = "wpms-sls", version)]
pub struct CliConfig {
    /// WCNF instance (either dialect).
    pub instance: PathBuf,
    /// Wall-clock cutoff in seconds.
    #[arg(long, default_value_t = 60.0, value_parser = positive_seconds)]
    pub cutoff: f64,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Override the PMS/WPMS classification.
    #[arg(long, value_enum, default_value_t = KindArg::Auto)]
    pub kind: KindArg,
    /// Hard clause weight increment.
    #[arg(long)]
    pub h_inc: Option<f64>,
    /// Soft clause weight growth factor (> 1).
    #[arg(long)]
    pub delta: Option<f64>,
    /// BMS sample count.
    #[arg(long)]
    pub bms_k: Option<usize>,
    #[arg(long, value_enum, default_value_t = VariantArg::Standard)]
    pub weight_variant: VariantArg,
    #[arg(long, value_enum, default_value_t = DecimationArg::Auto)]
    pub decimation: DecimationArg,
    #[arg(long, value_enum, default_value_t = OutputMode::Mse)]
    pub output: OutputMode,
    /// Stop after this many flips (makes runs replayable).
    #[arg(long)]
    pub max_flips: Option<u64>,
}

fn positive_seconds(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v.is_finite() && v > 0.0 => Ok(v),
        _ => Err(format!(
            "cutoff must be a positive number of seconds, got `{s}`"
        )),
    }
}

impl CliConfig {
    /// Solver parameters for an instance of the given (possibly forced) kind.
    pub fn params(&self, kind: InstanceKind) -> Result<(SearchParams, WeightParams), String> {
        let mut wp = WeightParams::defaults_for(kind);
        wp.h_inc = self.h_inc.unwrap_or(wp.h_inc);
        wp.delta = self.delta.unwrap_or(wp.delta);
        wp.variant = match self.weight_variant {
            VariantArg::Standard => WeightVariant::Standard,
            VariantArg::Alt1 => WeightVariant::Alt1,
            VariantArg::Alt2 => WeightVariant::Alt2,
        };
        wp.validate()?;
        let mut sp = SearchParams::defaults_for(kind);
        sp.bms_k = self.bms_k.unwrap_or(sp.bms_k);
        if sp.bms_k == 0 {
            return Err("bms-k must be positive".to_owned());
        }
        sp.cutoff = Duration::from_secs_f64(self.cutoff);
        sp.seed = self.seed;
        sp.max_flips = self.max_flips;
        sp.decimation = match self.decimation {
            DecimationArg::Auto => DecimationMethod::Auto,
            DecimationArg::Unh => DecimationMethod::Unh,
            DecimationArg::Up => DecimationMethod::Up,
        };
        Ok((sp, wp))
    }
}

#[derive(Serialize)]
struct JsonReport<'a> {
    instance: String,
    kind: InstanceKind,
    num_vars: usize,
    num_clauses: usize,
    #[serde(flatten)]
    result: &'a RunResult,
}

/// Runs the solver as configured, writing results to `out` and diagnostics
/// to `err`. Returns the process exit status.
pub fn solve_main(cfg: &CliConfig, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    match solve(cfg, out, err) {
        Ok(()) => 0,
        Err(msg) => {
            let _ = writeln!(err, "error: {msg}");
            1
        }
    }
}

fn solve(cfg: &CliConfig, out: &mut dyn Write, _err: &mut dyn Write) -> Result<(), String> {
    let file = File::open(&cfg.instance).map_err(|e| format!("{}: {e}", cfg.instance.display()))?;
    let parsed =
        parse_wcnf(BufReader::new(file)).map_err(|e| format!("{}: {e}", cfg.instance.display()))?;
    let mut formula = parsed.formula;
    match cfg.kind {
        KindArg::Auto => {}
        KindArg::Pms => formula = formula.with_kind(InstanceKind::Pms),
        KindArg::Wpms => formula = formula.with_kind(InstanceKind::Wpms),
    }
    let (sp, wp) = cfg.params(formula.kind())?;
    let io_err = |e: io::Error| e.to_string();

    match cfg.output {
        OutputMode::Mse => {
            writeln!(
                out,
                "c {} instance: {} variables, {} clauses",
                formula.kind(),
                formula.num_vars(),
                formula.num_clauses()
            )
            .map_err(io_err)?;
            let mut write_failed = None;
            let result = run(&formula, &sp, &wp, &mut |imp| {
                if write_failed.is_none() {
                    if let Err(e) = writeln!(out, "o {}", imp.cost).and_then(|_| out.flush()) {
                        write_failed = Some(e);
                    }
                }
            });
            if let Some(e) = write_failed {
                return Err(e.to_string());
            }
            writeln!(
                out,
                "c flips {} time-to-best {:.3}",
                result.total_flips, result.time_to_best
            )
            .map_err(io_err)?;
            match (&result.best_assignment, result.best_cost) {
                (Some(a), Cost::Finite(_)) => {
                    let status = if result.optimum_proven {
                        "OPTIMUM FOUND"
                    } else {
                        "SATISFIABLE"
                    };
                    writeln!(out, "s {status}").map_err(io_err)?;
                    writeln!(out, "v {}", a.to_bitstring()).map_err(io_err)?;
                }
                _ => writeln!(out, "s UNKNOWN").map_err(io_err)?,
            }
        }
        OutputMode::Json => {
            let result = run(&formula, &sp, &wp, &mut |_| {});
            let report = JsonReport {
                instance: cfg.instance.display().to_string(),
                kind: formula.kind(),
                num_vars: formula.num_vars(),
                num_clauses: formula.num_clauses(),
                result: &result,
            };
            serde_json::to_writer_pretty(&mut *out, &report).map_err(|e| e.to_string())?;
            writeln!(out).map_err(io_err)?;
        }
    }
    out.flush().map_err(io_err)
}
