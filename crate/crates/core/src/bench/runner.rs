//! Runs solver binaries on a set of instances and collects their anytime
//! output. Solvers are treated as black boxes speaking the MaxSAT
//! Evaluation output protocol (`o`, `s`, `v` lines), so third-party
//! solvers can be scored alongside this one.

use std::fs;
use std::io::{BufRead, BufReader};
use std::path::{Path, PathBuf};
use std::process::{Child, Command, Stdio};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::mpsc;
use std::sync::Mutex;
use std::thread;
use std::time::{Duration, Instant};

use serde::Deserialize;

use super::metrics::InstanceRecord;
use crate::formula::{Assignment, Cost};
use crate::wcnf::parse_wcnf;

/// Benchmark description, read from TOML:
///
/// ```toml
/// cutoff = 10.0
/// seed = 1
/// jobs = 2
/// instances = ["a.wcnf", "b.wcnf"]
///
/// [[solver]]
/// name = "standard"
/// command = "wpms-sls --cutoff {cutoff} --seed {seed} {instance}"
/// ```
///
/// Relative instance paths are resolved against the manifest's directory.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    pub cutoff: f64,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_jobs")]
    pub jobs: usize,
    /// Extra seconds granted after the cutoff before a solver is killed.
    #[serde(default = "default_grace")]
    pub grace: f64,
    pub instances: Vec<PathBuf>,
    #[serde(rename = "solver")]
    pub solvers: Vec<SolverSpec>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSpec {
    pub name: String,
    /// Whitespace-separated command with `{instance}`, `{cutoff}` and
    /// `{seed}` placeholders.
    pub command: String,
}

fn default_seed() -> u64 {
    1
}

fn default_jobs() -> usize {
    thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1)
}

fn default_grace() -> f64 {
    5.0
}

#[derive(Debug, thiserror::Error)]
pub enum ManifestError {
    #[error("cannot read manifest {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("invalid manifest: {0}")]
    Toml(#[from] toml::de::Error),
    #[error("invalid manifest: {0}")]
    Invalid(String),
}

impl Manifest {
    pub fn from_toml(text: &str, base: &Path) -> Result<Manifest, ManifestError> {
        let mut m: Manifest = toml::from_str(text)?;
        if !(m.cutoff.is_finite() && m.cutoff > 0.0) {
            return Err(ManifestError::Invalid("cutoff must be positive".into()));
        }
        if m.solvers.is_empty() || m.instances.is_empty() {
            return Err(ManifestError::Invalid(
                "need at least one solver and one instance".into(),
            ));
        }
        if m.solvers
            .iter()
            .any(|s| s.command.split_whitespace().next().is_none())
        {
            return Err(ManifestError::Invalid("empty solver command".into()));
        }
        m.jobs = m.jobs.max(1);
        for p in &mut m.instances {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        Ok(m)
    }

    pub fn load(path: &Path) -> Result<Manifest, ManifestError> {
        let text = fs::read_to_string(path).map_err(|source| ManifestError::Io {
            path: path.to_owned(),
            source,
        })?;
        Manifest::from_toml(&text, path.parent().unwrap_or(Path::new(".")))
    }
}

/// What a solver printed, parsed from its output.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SolverOutput {
    /// Every `o` value with the time it was read.
    pub costs: Vec<(f64, u64)>,
    pub status: Option<String>,
    pub model: Option<Assignment>,
}

impl SolverOutput {
    pub fn parse_line(&mut self, line: &str, elapsed: f64) {
        let line = line.trim_end();
        if let Some(rest) = line.strip_prefix("o ") {
            if let Ok(c) = rest.trim().parse() {
                self.costs.push((elapsed, c));
            }
        } else if let Some(rest) = line.strip_prefix("s ") {
            self.status = Some(rest.trim().to_owned());
        } else if let Some(rest) = line.strip_prefix("v ") {
            self.model = Assignment::from_bitstring(rest.trim());
        }
    }

    pub fn last_cost(&self) -> Option<(f64, u64)> {
        self.costs.last().copied()
    }
}

/// Outcome of one solver run after checking its model against the instance.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckedRun {
    pub cost: Cost,
    pub time_to_best: Option<f64>,
    /// Present when the reported model's cost differs from the last `o` line
    /// or the model has the wrong length.
    pub warning: Option<String>,
}

/// Turns raw output into a cost. A model (`v` line) is re-evaluated and its
/// cost is authoritative; otherwise the last `o` value is used.
pub fn check_output(out: &SolverOutput, instance: Option<&crate::formula::Formula>) -> CheckedRun {
    let claimed = out.last_cost();
    let time_to_best = claimed.map(|(t, _)| t);
    let (Some(model), Some(f)) = (&out.model, instance) else {
        return CheckedRun {
            cost: claimed.map_or(Cost::Infinite, |(_, c)| Cost::Finite(c)),
            time_to_best,
            warning: None,
        };
    };
    if model.len() != f.num_vars() {
        return CheckedRun {
            cost: Cost::Infinite,
            time_to_best,
            warning: Some(format!(
                "model has {} values for {} variables",
                model.len(),
                f.num_vars()
            )),
        };
    }
    let actual = f.cost(model);
    let warning = match claimed {
        Some((_, c)) if Cost::Finite(c) != actual => {
            Some(format!("last o line says {c}, model costs {actual}"))
        }
        None if actual.is_finite() => Some("model given without o line".to_owned()),
        _ => None,
    };
    CheckedRun {
        cost: actual,
        time_to_best,
        warning,
    }
}

fn expand(template: &str, instance: &Path, cutoff: f64, seed: u64) -> Vec<String> {
    template
        .split_whitespace()
        .map(|tok| {
            tok.replace("{instance}", &instance.display().to_string())
                .replace("{cutoff}", &cutoff.to_string())
                .replace("{seed}", &seed.to_string())
        })
        .collect()
}

/// Runs one command, killing it after `deadline`.
pub fn run_solver(argv: &[String], deadline: Duration) -> std::io::Result<SolverOutput> {
    let mut child: Child = Command::new(&argv[0])
        .args(&argv[1..])
        .stdin(Stdio::null())
        .stdout(Stdio::piped())
        .stderr(Stdio::null())
        .spawn()?;
    let start = Instant::now();
    let stdout = child.stdout.take().expect("piped stdout");
    let (tx, rx) = mpsc::channel();
    let reader = thread::spawn(move || {
        for line in BufReader::new(stdout).lines() {
            let Ok(line) = line else { break };
            if tx.send((start.elapsed().as_secs_f64(), line)).is_err() {
                break;
            }
        }
    });
    let mut out = SolverOutput::default();
    loop {
        let left = deadline.saturating_sub(start.elapsed());
        match rx.recv_timeout(left) {
            Ok((t, line)) => out.parse_line(&line, t),
            Err(mpsc::RecvTimeoutError::Timeout) => {
                let _ = child.kill();
                // drain whatever was already printed
                while let Ok((t, line)) = rx.recv_timeout(Duration::from_millis(200)) {
                    out.parse_line(&line, t);
                }
                break;
            }
            Err(mpsc::RecvTimeoutError::Disconnected) => break,
        }
    }
    let _ = child.wait();
    let _ = reader.join();
    Ok(out)
}

/// Runs every solver on every instance with `manifest.jobs` workers.
/// Warnings (crashes, inconsistent models) go to `log`.
pub fn run_manifest(manifest: &Manifest, log: &(dyn Fn(&str) + Sync)) -> Vec<InstanceRecord> {
    let jobs: Vec<(usize, usize)> = (0..manifest.instances.len())
        .flat_map(|i| (0..manifest.solvers.len()).map(move |s| (i, s)))
        .collect();
    let results: Mutex<Vec<Option<CheckedRun>>> = Mutex::new(vec![None; jobs.len()]);
    let next = AtomicUsize::new(0);
    let deadline = Duration::from_secs_f64(manifest.cutoff + manifest.grace);

    thread::scope(|scope| {
        for _ in 0..manifest.jobs.min(jobs.len()) {
            scope.spawn(|| loop {
                let j = next.fetch_add(1, Ordering::Relaxed);
                let Some(&(i, s)) = jobs.get(j) else { break };
                let path = &manifest.instances[i];
                let solver = &manifest.solvers[s];
                let argv = expand(&solver.command, path, manifest.cutoff, manifest.seed);
                let formula = fs::File::open(path)
                    .ok()
                    .and_then(|file| parse_wcnf(BufReader::new(file)).ok())
                    .map(|p| p.formula);
                if formula.is_none() {
                    log(&format!(
                        "{}: cannot parse instance; costs are taken from o lines",
                        path.display()
                    ));
                }
                let checked = match run_solver(&argv, deadline) {
                    Ok(out) => check_output(&out, formula.as_ref()),
                    Err(e) => {
                        log(&format!("{} on {}: {e}", solver.name, path.display()));
                        CheckedRun {
                            cost: Cost::Infinite,
                            time_to_best: None,
                            warning: None,
                        }
                    }
                };
                if let Some(w) = &checked.warning {
                    log(&format!("{} on {}: {w}", solver.name, path.display()));
                }
                results.lock().expect("no poisoned workers")[j] = Some(checked);
            });
        }
    });

    let results = results.into_inner().expect("no poisoned workers");
    let mut records: Vec<InstanceRecord> = manifest
        .instances
        .iter()
        .map(|p| InstanceRecord::new(p.display().to_string()))
        .collect();
    for (&(i, s), r) in jobs.iter().zip(results) {
        let r = r.expect("every job ran");
        records[i] = std::mem::replace(&mut records[i], InstanceRecord::new("")).with(
            &manifest.solvers[s].name,
            r.cost,
            r.time_to_best,
        );
    }
    records
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{Clause, Formula};

    #[test]
    fn manifest_parsing() {
        let text = r#"
            cutoff = 2.5
            instances = ["a.wcnf", "/abs/b.wcnf"]
            [[solver]]
            name = "x"
            command = "solver --t {cutoff} {instance}"
        "#;
        let m = Manifest::from_toml(text, Path::new("/base")).unwrap();
        assert_eq!(
            m.instances,
            vec![PathBuf::from("/base/a.wcnf"), PathBuf::from("/abs/b.wcnf")]
        );
        assert_eq!(m.seed, 1);
        assert!(m.jobs >= 1);
        assert_eq!(
            expand(&m.solvers[0].command, &m.instances[0], m.cutoff, 3),
            vec!["solver", "--t", "2.5", "/base/a.wcnf"]
        );
        assert!(
            Manifest::from_toml("cutoff = 0\ninstances = []\nsolver = []", Path::new(".")).is_err()
        );
        assert!(Manifest::from_toml(
            "cutoff = 1\nbogus = 1\ninstances = []\nsolver = []",
            Path::new(".")
        )
        .is_err());
    }

    #[test]
    fn output_parsing_and_checking() {
        let f = Formula::from_clauses(vec![
            Clause::hard_dimacs(&[1]),
            Clause::soft_dimacs(&[2], 3),
        ])
        .unwrap();
        let mut out = SolverOutput::default();
        for (t, l) in [
            (0.1, "c hi"),
            (0.2, "o 3"),
            (0.5, "o 0"),
            (0.6, "s SATISFIABLE"),
            (0.6, "v 11"),
        ] {
            out.parse_line(l, t);
        }
        assert_eq!(out.costs, vec![(0.2, 3), (0.5, 0)]);
        let c = check_output(&out, Some(&f));
        assert_eq!(
            c,
            CheckedRun {
                cost: Cost::Finite(0),
                time_to_best: Some(0.5),
                warning: None
            }
        );

        out.model = Assignment::from_bitstring("10");
        let c = check_output(&out, Some(&f));
        assert_eq!(c.cost, Cost::Finite(3));
        assert!(c.warning.is_some());

        let unknown = SolverOutput {
            status: Some("UNKNOWN".into()),
            ..Default::default()
        };
        assert_eq!(check_output(&unknown, Some(&f)).cost, Cost::Infinite);
    }
}
