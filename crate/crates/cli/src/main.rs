use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Parser, Subcommand, ValueEnum};

use symmatch::closed_form::{infer_stiffness_assignments, sweep, Family, GridKind};
use symmatch::catalog::{Coefficient, ToeplitzExample};
use symmatch::experiments::{self, ExactRow};
use symmatch::matching::MnRow;
use symmatch::{exec, Error, Execution};

const THREADS_VAR: &str = "SYMMATCH_THREADS";

#[derive(Parser)]
#[command(
    name = "symmatch",
    version,
    about = "Sorted symbol-sample matching experiments"
)]
struct Cli {
    /// Write the CSV here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Run every batch on the calling thread.
    #[arg(long, global = true)]
    sequential: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// M_n table for a scalar Toeplitz example.
    MnTable {
        #[arg(long, value_parser = parse_via::<ToeplitzExample>)]
        example: ToeplitzExample,
        #[arg(long, value_delimiter = ',', default_values_t = [8, 16, 32, 64, 128, 256, 512, 1024])]
        ns: Vec<usize>,
    },
    /// M_n table for the 2D finite-difference matrices.
    MnTable2d {
        #[arg(long, value_parser = parse_via::<Coefficient>)]
        coef: Coefficient,
        #[arg(long, value_delimiter = ',', default_values_t = [900, 1600, 2500, 3600, 4900, 6400, 8100, 10000])]
        ns: Vec<usize>,
    },
    /// Per-n maximum error of an exact eigenvalue formula.
    Exactness {
        #[arg(long, value_enum)]
        example: ExactExample,
        #[arg(long, value_delimiter = ',')]
        ns: Option<Vec<usize>>,
        /// Constant coefficient of the cosine symbol (e1 only).
        #[arg(long, default_value_t = 2.0, allow_negative_numbers = true)]
        a: f64,
        /// Cosine coefficient of the cosine symbol (e1 only).
        #[arg(long, default_value_t = -2.0, allow_negative_numbers = true)]
        b: f64,
        /// Absolute tolerance; defaults to 1e-10 (|a| + |b|) for e1 and 1e-8 otherwise.
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Indicator-function counterexample; M_n should be 1 for every n.
    Counterexample {
        #[arg(long, value_delimiter = ',', default_values_t = [10, 100, 1000])]
        ns: Vec<usize>,
    },
    /// Split the spectrum of a matrix-valued example into branches and match each.
    SplitDemo {
        #[arg(long, value_enum, default_value_t = SplitExample::E5)]
        example: SplitExample,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
    },
    /// Check the closed-form B-spline eigenvalue formulas.
    BsplineVerify {
        #[arg(long, value_parser = parse_via::<Family>)]
        family: Family,
        #[arg(long, default_value_t = 8)]
        pmax: usize,
        #[arg(long, default_value_t = 20)]
        nmax: usize,
        #[arg(long, value_delimiter = ',', default_values_t = [0, 1])]
        ks: Vec<usize>,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
    },
    /// Infer stiffness grid assignments and report whether they agree across n.
    GridInfer {
        #[arg(long, default_value_t = 5)]
        pmax: usize,
        #[arg(long, default_value_t = 20)]
        nmax: usize,
        #[arg(long, value_delimiter = ',', default_values_t = [0, 1])]
        ks: Vec<usize>,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ExactExample {
    E1,
    E4p,
    E5,
}

#[derive(Clone, Copy, ValueEnum)]
enum SplitExample {
    E5,
}

fn parse_via<T: FromStr<Err = Error>>(s: &str) -> Result<T, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// CSV body plus the rows that missed their tolerance.
struct Report {
    csv: String,
    failures: Vec<String>,
}

fn mn_csv(rows: &[MnRow]) -> String {
    let mut s = String::from("n,M_n,M_n_full\n");
    for r in rows {
        writeln!(s, "{},{:.4},{:e}", r.n, r.m_n, r.m_n).unwrap();
    }
    s
}

fn sig12(x: f64) -> String {
    format!("{x:.11e}")
}

fn exact_csv(rows: &[ExactRow], tol: f64) -> Report {
    let mut csv = String::from("n,max_error,min_eig,max_eig\n");
    let mut failures = Vec::new();
    for r in rows {
        writeln!(
            csv,
            "{},{},{},{}",
            r.n,
            sig12(r.max_error),
            sig12(r.min_eig),
            sig12(r.max_eig)
        )
        .unwrap();
        if !(r.max_error <= tol) {
            failures.push(format!("n={} max_error={:e} > {tol:e}", r.n, r.max_error));
        }
    }
    Report { csv, failures }
}

fn assignment_label(a: Option<&Vec<GridKind>>) -> String {
    match a {
        Some(a) => a.iter().map(|g| g.label()).collect::<Vec<_>>().join(";"),
        None => "none".to_string(),
    }
}

fn sorted(mut ns: Vec<usize>) -> Vec<usize> {
    ns.sort_unstable();
    ns.dedup();
    ns
}

fn run(cmd: Command, ex: Execution) -> symmatch::Result<Report> {
    let ok = |csv| Report {
        csv,
        failures: Vec::new(),
    };
    match cmd {
        Command::MnTable { example, ns } => Ok(ok(mn_csv(&experiments::toeplitz_mn_table(
            example,
            &sorted(ns),
            ex,
        )?))),
        Command::MnTable2d { coef, ns } => Ok(ok(mn_csv(&experiments::fd_mn_table(
            coef,
            &sorted(ns),
            ex,
        )?))),
        Command::Exactness {
            example,
            ns,
            a,
            b,
            tol,
        } => {
            let ns = ns.map(sorted);
            match example {
                ExactExample::E1 => {
                    let ns = ns.unwrap_or_else(|| (1..=200).collect());
                    let rows = experiments::cosine_exactness(a, b, &ns, ex)?;
                    Ok(exact_csv(&rows, tol.unwrap_or(1e-10 * (a.abs() + b.abs()))))
                }
                ExactExample::E4p => {
                    let ns = ns.unwrap_or_else(|| vec![5, 10, 20, 30]);
                    Ok(exact_csv(
                        &experiments::iga_exactness(&ns, ex)?,
                        tol.unwrap_or(1e-8),
                    ))
                }
                ExactExample::E5 => {
                    let ns = ns.unwrap_or_else(|| vec![20, 50, 100]);
                    let tol = tol.unwrap_or(1e-8);
                    let mut csv = String::from("n,max_error\n");
                    let mut failures = Vec::new();
                    for n in ns {
                        let out = experiments::e5_pipeline(n, ex)?;
                        let err = out.branch_mn.iter().copied().fold(0.0, f64::max);
                        writeln!(csv, "{n},{}", sig12(err)).unwrap();
                        if !(err <= tol) {
                            failures.push(format!("n={n} max_error={err:e} > {tol:e}"));
                        }
                    }
                    Ok(Report { csv, failures })
                }
            }
        }
        Command::Counterexample { ns } => {
            Ok(ok(mn_csv(&experiments::counterexample(&sorted(ns))?)))
        }
        Command::SplitDemo {
            example: SplitExample::E5,
            n,
            tol,
        } => {
            let out = experiments::e5_pipeline(n, ex)?;
            let mut csv = String::from("branch,cardinality,M_n\n");
            let mut failures = Vec::new();
            for (j, (&card, &m)) in out.cardinalities.iter().zip(&out.branch_mn).enumerate() {
                writeln!(csv, "{},{card},{}", j + 1, sig12(m)).unwrap();
                if !(m <= tol) {
                    failures.push(format!("branch {} M_n={m:e} > {tol:e}", j + 1));
                }
            }
            Ok(Report { csv, failures })
        }
        Command::BsplineVerify {
            family,
            pmax,
            nmax,
            ks,
            tol,
        } => {
            let ns: Vec<usize> = (2..=nmax).collect();
            let rows = sweep(family, pmax, &ks, &ns, tol, ex)?;
            let mut csv = String::from("family,p,k,n,assignment,max_error,pass\n");
            let mut failures = Vec::new();
            for r in &rows {
                let label = assignment_label(r.assignment.as_ref());
                writeln!(
                    csv,
                    "{},{},{},{},{label},{},{}",
                    r.family,
                    r.p,
                    r.k,
                    r.n,
                    sig12(r.max_error),
                    r.pass
                )
                .unwrap();
                if !r.pass {
                    failures.push(format!(
                        "{} p={} k={} n={} max_error={:e}",
                        r.family, r.p, r.k, r.n, r.max_error
                    ));
                }
            }
            Ok(Report { csv, failures })
        }
        Command::GridInfer {
            pmax,
            nmax,
            ks,
            tol,
        } => {
            let ns: Vec<usize> = (2..=nmax).collect();
            let reports = infer_stiffness_assignments(pmax, &ks, &ns, tol, ex)?;
            let mut csv = String::from("p,k,n,assignment,stable\n");
            let mut failures = Vec::new();
            for rep in &reports {
                let stable = rep.stable().is_some();
                for (n, a) in &rep.per_n {
                    writeln!(
                        csv,
                        "{},{},{n},{},{stable}",
                        rep.p,
                        rep.k,
                        assignment_label(a.as_ref())
                    )
                    .unwrap();
                }
                if !stable {
                    failures.push(format!(
                        "p={} k={} has no assignment stable across n",
                        rep.p, rep.k
                    ));
                }
            }
            Ok(Report { csv, failures })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();

    if let Ok(v) = std::env::var(THREADS_VAR) {
        match v.parse::<usize>() {
            Ok(t) if t > 0 => {
                exec::configure_threads(t);
            }
            _ => {
                eprintln!("error: {THREADS_VAR} must be a positive integer, got {v:?}");
                return ExitCode::from(2);
            }
        }
    }
    let ex = if cli.sequential {
        Execution::Sequential
    } else {
        Execution::default()
    };

    let report = match run(cli.command, ex) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            let usage = matches!(e, Error::InvalidArgument(_) | Error::UnsupportedSize { .. });
            return ExitCode::from(if usage { 2 } else { 1 });
        }
    };

    let written = match &cli.out {
        Some(path) => fs::write(path, &report.csv),
        None => io::stdout().lock().write_all(report.csv.as_bytes()),
    };
    if let Err(e) = written {
        eprintln!("error: cannot write output: {e}");
        return ExitCode::from(1);
    }

    if report.failures.is_empty() {
        ExitCode::SUCCESS
    } else {
        for f in &report.failures {
            eprintln!("FAIL {f}");
        }
        ExitCode::from(1)
    }
}
