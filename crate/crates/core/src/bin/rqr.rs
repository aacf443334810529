use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgGroup, Parser, Subcommand, ValueEnum};
use serde_json::json;

use rqr::harness::{
    backward_error, detail_row, measure, run_bench, BenchConfig, Family, WallClock,
};
use rqr::matio::{reduce_to_hessenberg, parse_matrix_market, write_csv};
use rqr::solver::{Algorithm, SolveOptions};

#[derive(Parser)]
#[command(name = "rqr", version, about = "Rational QR and Francis QR eigensolvers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum AlgoArg {
    Rqr,
    Qr,
}

impl From<AlgoArg> for Algorithm {
    fn from(a: AlgoArg) -> Self {
        match a {
            AlgoArg::Rqr => Algorithm::Rqr,
            AlgoArg::Qr => Algorithm::Qr,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyArg {
    Random,
    Iplusj,
}

impl From<FamilyArg> for Family {
    fn from(f: FamilyArg) -> Self {
        match f {
            FamilyArg::Random => Family::Random,
            FamilyArg::Iplusj => Family::IPlusJ,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Compute the eigenvalues of one matrix
    #[command(group(ArgGroup::new("source").required(true).args(["input", "gen"])))]
    Solve {
        /// Matrix Market file (reduced to Hessenberg form before solving)
        #[arg(long)]
        input: Option<PathBuf>,
        /// Generated test matrix
        #[arg(long, value_enum, requires = "n")]
        gen: Option<FamilyArg>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value = "rqr")]
        algo: AlgoArg,
        /// Also report the backward error
        #[arg(long)]
        bwe: bool,
        #[arg(long, conflicts_with = "csv")]
        json: bool,
        #[arg(long)]
        csv: bool,
    },
    /// Time both solvers over a family of generated matrices
    Bench {
        #[arg(long, value_delimiter = ',', required = true)]
        sizes: Vec<usize>,
        #[arg(long, default_value_t = 10)]
        trials: usize,
        #[arg(long, value_enum, default_value = "random")]
        family: FamilyArg,
        #[arg(long, value_enum, value_delimiter = ',', default_value = "rqr,qr")]
        algos: Vec<AlgoArg>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli.command) {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

fn run(command: Command) -> Result<ExitCode, String> {
    match command {
        Command::Solve { input, gen, n, seed, algo, bwe, json, csv } => {
            let (name, a) = match (input, gen) {
                (Some(path), _) => {
                    let m = parse_matrix_market(&path).map_err(|e| format!("{}: {e}", path.display()))?;
                    if m.nrows() != m.ncols() {
                        return Err(format!("{}: matrix is not square", path.display()));
                    }
                    let name = path.file_stem().map_or("input".into(), |s| s.to_string_lossy().into_owned());
                    (name, reduce_to_hessenberg(m))
                }
                (None, Some(family)) => {
                    let n = n.filter(|&n| n >= 1).ok_or("--n must be at least 1")?;
                    let family = Family::from(family);
                    (family.as_str().to_string(), family.generate(n, seed))
                }
                (None, None) => return Err("one of --input or --gen is required".into()),
            };
            let algo = Algorithm::from(algo);
            let measured = measure(&a, algo, &SolveOptions::default(), &mut WallClock::default())
                .map_err(|e| e.to_string())?;
            let report = &measured.report;
            let stdout = io::stdout();
            let mut out = stdout.lock();
            if csv {
                write_csv(&[detail_row(&name, &measured)], &mut out).map_err(|e| e.to_string())?;
            } else if json {
                let eigenvalues: Vec<_> = report
                    .values()
                    .iter()
                    .map(|v| v.map_or(serde_json::Value::Null, |z| json!([z.re, z.im])))
                    .collect();
                let mut obj = json!({
                    "eigenvalues": eigenvalues,
                    "iterations": report.iterations,
                    "swaps": report.swaps,
                    "status": report.status.as_str(),
                });
                if bwe {
                    obj["bwe"] = json!(backward_error(&a, report).map_err(|e| e.to_string())?);
                }
                writeln!(out, "{obj}").map_err(|e| e.to_string())?;
            } else {
                for v in &report.eigenvalues {
                    writeln!(out, "{v}").map_err(|e| e.to_string())?;
                }
                if bwe {
                    writeln!(out, "bwe {:e}", measured.bwe.bwe).map_err(|e| e.to_string())?;
                }
                eprintln!("{} iterations, {} swaps, {}", report.iterations, report.swaps, report.status.as_str());
            }
            Ok(if report.converged() { ExitCode::SUCCESS } else { ExitCode::from(2) })
        }
        Command::Bench { sizes, trials, family, algos, seed, out } => {
            if sizes.iter().any(|&n| n < 2) {
                return Err("--sizes entries must be at least 2".into());
            }
            let config = BenchConfig {
                sizes,
                trials,
                family: family.into(),
                algos: algos.into_iter().map(Algorithm::from).collect(),
                seed,
                options: SolveOptions::default(),
            };
            let result = run_bench(&config, &mut WallClock::default()).map_err(|e| e.to_string())?;
            let file = File::create(&out).map_err(|e| format!("{}: {e}", out.display()))?;
            write_csv(&result.rows, BufWriter::new(file)).map_err(|e| e.to_string())?;
            println!("{:>6} {:>4} {:>6} {:>12} {:>12} {:>10} {:>8}", "n", "algo", "trials", "median_s", "mean_bwe", "It/n", "failed");
            for s in &result.summaries {
                println!(
                    "{:>6} {:>4} {:>6} {:>12.6} {:>12.3e} {:>10.3} {:>8}",
                    s.n, s.algo, s.trials, s.median_time_s, s.mean_bwe, s.mean_iters_per_n, s.failures
                );
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}
