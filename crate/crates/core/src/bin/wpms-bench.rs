//! Benchmark driver: runs solver commands from a manifest and prints the
//! `#inst.`/`#win.`/`#score` table, computes exact optima of small
//! instances, and writes random instances.

use std::fs::{self, File};
use std::io::{self, BufReader, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use rand::rngs::SmallRng;
use rand::SeedableRng;
use wpms_sls::bench::gen::{horn_chain, planted, uniform, RandomSpec};
use wpms_sls::bench::runner::Manifest;
use wpms_sls::bench::{brute_force_optimum, runner, tally};
use wpms_sls::wcnf::{parse_wcnf, write_wcnf, WcnfDialect};

#[derive(Parser)]
#[command(name = "wpms-bench", version)]
struct Args {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run every solver in a manifest on every instance.
    Run {
        manifest: PathBuf,
        /// Also write per-run results as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Override the manifest's worker count.
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Print the exact optimum of a small instance.
    Oracle { instance: PathBuf },
    /// Write random instances into a directory.
    Gen {
        out_dir: PathBuf,
        #[arg(long, value_enum, default_value_t = Family::Planted)]
        family: Family,
        #[arg(long, default_value_t = 10)]
        count: usize,
        #[arg(long, default_value_t = 50)]
        vars: usize,
        #[arg(long, default_value_t = 200)]
        clauses: usize,
        #[arg(long, default_value_t = 0.4)]
        hard_fraction: f64,
        #[arg(long, default_value_t = 1)]
        max_weight: u64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    Planted,
    Uniform,
    Horn,
}

fn main() -> ExitCode {
    match real_main(Args::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn real_main(args: Args) -> Result<(), Box<dyn std::error::Error>> {
    match args.cmd {
        Cmd::Run {
            manifest,
            csv,
            jobs,
        } => {
            let mut m = Manifest::load(&manifest)?;
            if let Some(j) = jobs {
                m.jobs = j.max(1);
            }
            let records = runner::run_manifest(&m, &|msg| eprintln!("warning: {msg}"));
            let report = tally(&records);
            print!("{}", report.to_table());
            if let Some(path) = csv {
                fs::write(path, report.to_csv(&records))?;
            }
        }
        Cmd::Oracle { instance } => {
            let parsed = parse_wcnf(BufReader::new(File::open(&instance)?))?;
            println!("{}", brute_force_optimum(&parsed.formula)?);
        }
        Cmd::Gen {
            out_dir,
            family,
            count,
            vars,
            clauses,
            hard_fraction,
            max_weight,
            seed,
        } => {
            if !(0.0..=1.0).contains(&hard_fraction) || vars == 0 || max_weight == 0 {
                return Err("need vars > 0, max-weight > 0 and hard-fraction in [0, 1]".into());
            }
            fs::create_dir_all(&out_dir)?;
            let mut rng = SmallRng::seed_from_u64(seed);
            let spec = RandomSpec {
                num_vars: vars,
                num_clauses: clauses,
                hard_fraction,
                min_len: 1,
                max_len: 3,
                max_weight,
            };
            for i in 0..count {
                let f = match family {
                    Family::Planted => planted(&mut rng, &spec),
                    Family::Uniform => uniform(&mut rng, &spec),
                    Family::Horn => horn_chain(&mut rng, vars, clauses),
                };
                let path = out_dir.join(format!("inst{i:04}.wcnf"));
                let mut w = io::BufWriter::new(File::create(&path)?);
                write_wcnf(&f, WcnfDialect::New2022, &mut w)?;
                w.flush()?;
            }
        }
    }
    Ok(())
}
