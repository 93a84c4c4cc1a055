//! Benchmark sweep driver with deterministic CSV output.

use std::fs::File;
use std::io::Write;
use std::path::PathBuf;

use clap::Args;
use solidshell::benchmarks::{
    curved_beam, pinched_cylinder, pinched_hemisphere, run, scordelis_lo, straight_beam,
    BenchmarkCase, RunResult,
};
use solidshell::elements::Formulation;

pub const CSV_HEADER: &str = "benchmark,formulation,degree,n_elems,slenderness,distortion_deg,\
raw_deflection,normalized_deflection,wall_time_s";

#[derive(Args)]
pub struct RunArgs {
    /// Benchmark: straight, curved, scordelis, hemisphere, cylinder.
    #[arg(long)]
    pub benchmark: String,

    /// Comma-separated formulations: std, curv, ss_ans, ss.
    #[arg(long, value_delimiter = ',', required = true)]
    pub formulations: Vec<String>,

    /// Polynomial degree of the discretization.
    #[arg(long, default_value_t = 2)]
    pub degree: usize,

    /// Comma-separated element counts (per side for the shell problems,
    /// along the length for the beams).
    #[arg(long, value_delimiter = ',')]
    pub elems: Option<Vec<usize>>,

    /// Comma-separated slenderness values (beams only).
    #[arg(long, value_delimiter = ',')]
    pub slenderness: Option<Vec<f64>>,

    /// In-plane mesh distortion angle in degrees (straight beam only).
    #[arg(long, default_value_t = 0.0)]
    pub distortion: f64,

    /// Output path; defaults to stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,

    /// Worker threads for the sweep (env IGA_SS_JOBS overrides).
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
}

fn parse_formulations(names: &[String]) -> Result<Vec<Formulation>, String> {
    if names.is_empty() {
        return Err("at least one formulation is required".into());
    }
    names
        .iter()
        .map(|n| {
            Formulation::parse(n).ok_or_else(|| {
                format!("unknown formulation `{n}` (expected std, curv, ss_ans, or ss)")
            })
        })
        .collect()
}

/// Builds the case list for one benchmark in deterministic order.
fn build_cases(args: &RunArgs) -> Result<Vec<BenchmarkCase>, String> {
    let is_beam = matches!(args.benchmark.as_str(), "straight" | "curved");
    if args.distortion != 0.0 && args.benchmark != "straight" {
        return Err("--distortion only applies to the straight beam".into());
    }
    if args.slenderness.is_some() && !is_beam {
        return Err("--slenderness only applies to the beam benchmarks".into());
    }

    let mut cases = Vec::new();
    match args.benchmark.as_str() {
        "straight" => {
            let elems = args.elems.clone().unwrap_or_else(|| vec![8]);
            let slenderness = args
                .slenderness
                .clone()
                .unwrap_or_else(|| vec![1e1, 1e2, 1e3, 1e4]);
            for &n in &elems {
                for &s in &slenderness {
                    cases.push(straight_beam(n, s, args.distortion).map_err(|e| e.to_string())?);
                }
            }
        }
        "curved" => {
            let elems = args.elems.clone().unwrap_or_else(|| vec![10]);
            let slenderness = args
                .slenderness
                .clone()
                .unwrap_or_else(|| vec![1e1, 1e2, 1e3, 1e4]);
            for &n in &elems {
                for &s in &slenderness {
                    cases.push(curved_beam(n, s).map_err(|e| e.to_string())?);
                }
            }
        }
        "scordelis" | "hemisphere" | "cylinder" => {
            let elems = args.elems.clone().unwrap_or_else(|| vec![4, 8, 16]);
            for &n in &elems {
                let case = match args.benchmark.as_str() {
                    "scordelis" => scordelis_lo(n),
                    "hemisphere" => pinched_hemisphere(n),
                    _ => pinched_cylinder(n),
                };
                cases.push(case.map_err(|e| e.to_string())?);
            }
        }
        other => {
            return Err(format!(
                "unknown benchmark `{other}` (expected straight, curved, scordelis, \
                 hemisphere, or cylinder)"
            ))
        }
    }
    Ok(cases)
}

/// Round-trip exact float formatting: 17 significant digits.
fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn csv_row(r: &RunResult) -> String {
    format!(
        "{},{},{},{},{},{},{},{},{}",
        r.benchmark,
        r.formulation.label(),
        r.degree,
        r.n_elems,
        fmt_f64(r.slenderness),
        fmt_f64(r.distortion_deg),
        fmt_f64(r.raw_deflection),
        fmt_f64(r.normalized_deflection),
        fmt_f64(r.wall_time.as_secs_f64()),
    )
}

/// Runs the sweep; rows come back in case-major, formulation-minor order
/// regardless of the worker count.
pub fn sweep(
    cases: &[BenchmarkCase],
    formulations: &[Formulation],
    degree: usize,
    jobs: usize,
) -> Result<Vec<RunResult>, String> {
    let tasks: Vec<(usize, &BenchmarkCase, Formulation)> = cases
        .iter()
        .flat_map(|case| formulations.iter().map(move |&f| (case, f)))
        .enumerate()
        .map(|(i, (case, f))| (i, case, f))
        .collect();

    let execute = |(i, case, f): &(usize, &BenchmarkCase, Formulation)| {
        run(case, *f, degree)
            .map(|r| (*i, r))
            .map_err(|e| format!("{} {}: {e}", case.name, f.label()))
    };

    let mut indexed: Vec<(usize, RunResult)> = if jobs > 1 {
        use rayon::prelude::*;
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .map_err(|e| e.to_string())?;
        pool.install(|| tasks.par_iter().map(execute).collect::<Result<Vec<_>, _>>())?
    } else {
        tasks.iter().map(execute).collect::<Result<Vec<_>, _>>()?
    };
    indexed.sort_by_key(|(i, _)| *i);
    Ok(indexed.into_iter().map(|(_, r)| r).collect())
}

pub fn command(args: RunArgs) -> i32 {
    let formulations = match parse_formulations(&args.formulations) {
        Ok(f) => f,
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    let cases = match build_cases(&args) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    let jobs = std::env::var("IGA_SS_JOBS")
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(args.jobs)
        .max(1);

    let results = match sweep(&cases, &formulations, args.degree, jobs) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return 1;
        }
    };

    let mut output = String::with_capacity(128 * (results.len() + 1));
    output.push_str(CSV_HEADER);
    output.push('\n');
    for r in &results {
        output.push_str(&csv_row(r));
        output.push('\n');
    }

    match &args.out {
        Some(path) => {
            let write = File::create(path).and_then(|mut f| f.write_all(output.as_bytes()));
            if let Err(e) = write {
                eprintln!("error: cannot write {}: {e}", path.display());
                return 1;
            }
        }
        None => print!("{output}"),
    }
    0
}
