use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use williamson_core::classify::{
    check_eigsps_membership, check_pd, check_sppsd, spsm_summary, MembershipReport,
};
use williamson_core::engine::{decompose, symplectic_spectrum, Route};
use williamson_core::error::{Error, ErrorCategory, Result};
use williamson_core::generate::{gen_eigsps, gen_pd, gen_sppsd, unit_direction, GeneratorSpec};
use williamson_core::io::{format_g17, format_matrix, read_matrix, write_matrix};
use williamson_core::perturbation::{bound_main, d_hat, sweep};
use williamson_core::{InertiaSignature, NormKind, SymMatrix, Tolerances};

#[derive(Parser)]
#[command(
    name = "williamson",
    version,
    about = "Symplectic diagonalization of real symmetric matrices"
)]
struct Cli {
    /// Relative threshold below which eigenvalues count as zero.
    #[arg(long, global = true, default_value_t = 1e-9)]
    rank_tol: f64,
    /// Symplectic defect and subspace threshold.
    #[arg(long, global = true, default_value_t = 1e-8)]
    symp_tol: f64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum Norm {
    Op,
    Fro,
    Trace,
}

impl From<Norm> for NormKind {
    fn from(n: Norm) -> Self {
        match n {
            Norm::Op => NormKind::Operator,
            Norm::Fro => NormKind::Frobenius,
            Norm::Trace => NormKind::Trace,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Class {
    Pd,
    Sppsd,
    Eigsps,
}

#[derive(Subcommand)]
enum Command {
    /// Williamson decomposition: prints D, optionally writes M.
    Decompose {
        file: PathBuf,
        /// Write the symplectic matrix M to this file.
        #[arg(long)]
        output_m: Option<PathBuf>,
    },
    /// Symplectic spectrum, ascending.
    Spectrum { file: PathBuf },
    /// Class membership report.
    Classify { file: PathBuf },
    /// The paired diagonal D̂(A), descending.
    Dhat { file: PathBuf },
    /// Perturbation bound between two matrices.
    Bound {
        file_a: PathBuf,
        file_b: PathBuf,
        #[arg(long, value_enum, default_value_t = Norm::Op)]
        norm: Norm,
    },
    /// Bound along A + εE for a list of ε (CSV).
    Sweep {
        file: PathBuf,
        /// Comma-separated ε values, e.g. 1e-1,1e-2,0.
        #[arg(long, value_delimiter = ',', num_args = 1.., required = true)]
        eps: Vec<f64>,
        /// Direction E; defaults to a seeded symmetric matrix with unit Frobenius norm.
        #[arg(long)]
        direction: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Generate a random instance and print it in the matrix file format.
    Gen {
        #[arg(long, value_enum)]
        class: Class,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Inertia ν,ξ,π (eigsps).
        #[arg(long, value_delimiter = ',')]
        signature: Option<Vec<usize>>,
        /// Prescribed symplectic eigenvalues (eigsps).
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        spectrum: Option<Vec<f64>>,
        /// Rank (sppsd), even.
        #[arg(long)]
        rank: Option<usize>,
        #[arg(long, default_value_t = 10.0)]
        conditioning: f64,
        /// Write to a file instead of standard output.
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

fn load(path: &Path) -> Result<SymMatrix> {
    let m = read_matrix(path)?;
    let a = SymMatrix::new(m)?;
    if a.asymmetry() > 0.0 {
        eprintln!(
            "warning: {} is not symmetric (max |a_ij - a_ji| = {}); using (A + A^T)/2",
            path.display(),
            format_g17(a.asymmetry())
        );
    }
    Ok(a)
}

fn joined(values: &[f64]) -> String {
    values
        .iter()
        .map(|&x| format_g17(x))
        .collect::<Vec<_>>()
        .join(" ")
}

fn indexed_csv(header: &str, values: &[f64]) -> String {
    let mut out = format!("index,{header}\n");
    for (i, &v) in values.iter().enumerate() {
        out.push_str(&format!("{i},{}\n", format_g17(v)));
    }
    out
}

fn report_csv_rows(out: &mut String, r: &MembershipReport) {
    for c in &r.conditions {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            r.class,
            c.name,
            c.condition,
            format_g17(c.residual),
            c.comparison.symbol(),
            format_g17(c.threshold),
            c.pass
        ));
    }
}

fn report_text(out: &mut String, r: &MembershipReport) {
    out.push_str(&r.summary());
    out.push('\n');
    for c in &r.conditions {
        out.push_str(&format!(
            "  [{}] {} ({}): {} {} {}\n",
            if c.pass { "pass" } else { "FAIL" },
            c.name,
            c.condition,
            format_g17(c.residual),
            c.comparison.symbol(),
            format_g17(c.threshold)
        ));
    }
}

fn run(cli: &Cli) -> Result<()> {
    let tol = Tolerances {
        rank_tol: cli.rank_tol,
        symp_tol: cli.symp_tol,
        ..Tolerances::default()
    };
    let csv = cli.format == Format::Csv;
    match &cli.command {
        Command::Decompose { file, output_m } => {
            let a = load(file)?;
            let w = decompose(&a, &tol)?;
            if csv {
                print!("{}", indexed_csv("symplectic_eigenvalue", &w.d));
            } else {
                let route = match w.route {
                    Route::PositiveDefinite => "positive definite",
                    Route::EigenspaceConstruction => "eigenspace construction",
                    Route::Certificate => "certificate",
                    Route::KernelCertificate => "kernel certificate",
                };
                println!("D: {}", joined(&w.d));
                println!("route: {route}");
            }
            eprintln!(
                "residual ‖M^T A M - D⊕D‖_F = {}; defect ‖M^T J M - J‖_F = {}; cond(M) = {}",
                format_g17(w.residual),
                format_g17(w.defect),
                format_g17(w.condition_number())
            );
            if let Some(p) = output_m {
                write_matrix(p, w.m.matrix())?;
            }
        }
        Command::Spectrum { file } => {
            let a = load(file)?;
            let s = symplectic_spectrum(&a, &tol)?;
            if csv {
                print!("{}", indexed_csv("symplectic_eigenvalue", &s.values));
            } else {
                println!("D: {}", joined(&s.values));
            }
        }
        Command::Classify { file } => {
            let a = load(file)?;
            let reports = [
                check_pd(&a, &tol)?,
                check_sppsd(&a, &tol)?,
                check_eigsps_membership(&a, &tol)?,
            ];
            let mut out = String::new();
            if csv {
                out.push_str(
                    "class,condition,existence_condition,residual,comparison,threshold,pass\n",
                );
                for r in &reports {
                    report_csv_rows(&mut out, r);
                }
            } else {
                let eig = &reports[2];
                out.push_str(&format!("inertia: {}\n", eig.inertia));
                out.push_str(&format!("margin: {}\n", format_g17(eig.margin)));
                for r in &reports {
                    report_text(&mut out, r);
                }
            }
            if !csv {
                out.push_str(spsm_summary(&reports[1], &reports[2]));
                out.push('\n');
            }
            print!("{out}");
            // A decomposition exists on either class; reject only when neither holds.
            if !reports[1].verdict {
                if let Some(e) = reports[2].rejection() {
                    return Err(e);
                }
            }
        }
        Command::Dhat { file } => {
            let a = load(file)?;
            let d = d_hat(&a, &tol)?;
            if csv {
                print!("{}", indexed_csv("value", &d.values));
            } else {
                println!("D_hat: {}", joined(&d.values));
            }
        }
        Command::Bound {
            file_a,
            file_b,
            norm,
        } => {
            let a = load(file_a)?;
            let b = load(file_b)?;
            let r = bound_main(&a, &b, (*norm).into(), &tol)?;
            if csv {
                println!("norm_kind,lhs,rhs,term_pos,term_neg,slack,pass");
                println!(
                    "{},{},{},{},{},{},{}",
                    r.kind.name(),
                    format_g17(r.lhs),
                    format_g17(r.rhs),
                    format_g17(r.term_pos),
                    format_g17(r.term_neg),
                    format_g17(r.slack),
                    r.pass
                );
            } else {
                println!(
                    "norm: {}  lhs: {}  rhs: {}  pass: {}",
                    r.kind.name(),
                    format_g17(r.lhs),
                    format_g17(r.rhs),
                    r.pass
                );
                eprintln!(
                    "term_pos = {}; term_neg = {}; slack = {}; ratio = {}",
                    format_g17(r.term_pos),
                    format_g17(r.term_neg),
                    format_g17(r.slack),
                    format_g17(r.ratio())
                );
            }
            if !r.pass {
                return Err(Error::Numerical {
                    stage: "perturbation bound",
                    residual: r.lhs - r.rhs,
                    threshold: r.slack,
                });
            }
        }
        Command::Sweep {
            file,
            eps,
            direction,
            seed,
        } => {
            let a = load(file)?;
            let e = match direction {
                Some(p) => load(p)?,
                None => SymMatrix::new(unit_direction(a.dim(), *seed))?,
            };
            let s = sweep(&a, &e, eps, &tol)?;
            print!("{}", s.to_csv());
            let bad = s.envelope_violations(1e-9 * a.scale().max(e.scale()));
            if let Some(r) = bad.first() {
                return Err(Error::Numerical {
                    stage: "sweep envelope",
                    residual: r.lhs,
                    threshold: r.envelope,
                });
            }
        }
        Command::Gen {
            class,
            n,
            seed,
            signature,
            spectrum,
            rank,
            conditioning,
            output,
        } => {
            let a = match class {
                Class::Pd => gen_pd(*n, *seed, *conditioning)?,
                Class::Sppsd => {
                    let rank = rank
                        .ok_or_else(|| Error::InvalidSpec("--rank is required for sppsd".into()))?;
                    gen_sppsd(*n, rank, *seed)?
                }
                Class::Eigsps => {
                    let signature = match signature.as_deref() {
                        None => None,
                        Some(&[nu, xi, pi]) => Some(InertiaSignature::new(nu, xi, pi)),
                        Some(other) => {
                            return Err(Error::InvalidSpec(format!(
                                "--signature takes three counts ν,ξ,π, got {}",
                                other.len()
                            )))
                        }
                    };
                    let spec = GeneratorSpec {
                        n: *n,
                        signature: if signature.is_none() && spectrum.is_none() {
                            Some(InertiaSignature::new(0, 0, 2 * n))
                        } else {
                            signature
                        },
                        spectrum: spectrum.clone(),
                        seed: *seed,
                        conditioning: *conditioning,
                    };
                    let inst = gen_eigsps(&spec)?;
                    eprintln!("truth D: {}", joined(&inst.truth.values));
                    inst.a
                }
            };
            match output {
                Some(p) => write_matrix(p, a.as_matrix())?,
                None => print!("{}", format_matrix(a.as_matrix())),
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e.category() {
                ErrorCategory::Rejection => 1,
                ErrorCategory::Input => 2,
                ErrorCategory::Numerical => 3,
            })
        }
    }
}
