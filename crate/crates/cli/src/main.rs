//! Command-line surface over the operator library: pointwise evaluation,
//! moment tables, theorem checks, and the convergence experiment runner.
//!
//! Exit codes: 0 success, 2 usage error (clap), 1 numeric failure with the
//! error name and the offending cell on stderr.

use std::fmt;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::process;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use exop::analysis::{self, format_sig17, ExperimentSpec};
use exop::functions::SmoothFunction;
use exop::kernel;
use exop::moments;
use exop::operators;
use exop::{KernelPoint, OperatorParams, QuadConfig};

#[derive(Parser)]
#[command(name = "exop", version, about = "Exponential-type operator toolkit")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

/// `--a` accepts a positive number or the literal `PW` for the a -> 0
/// member (the Post-Widder operator).
#[derive(Clone, Copy, Debug)]
enum AValue {
    PostWidder,
    Value(f64),
}

impl FromStr for AValue {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "PW" {
            return Ok(Self::PostWidder);
        }
        s.parse::<f64>()
            .map(Self::Value)
            .map_err(|_| format!("expected a number or the literal PW, got {s:?}"))
    }
}

impl fmt::Display for AValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::PostWidder => write!(f, "PW"),
            Self::Value(v) => write!(f, "{v}"),
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args)]
struct OutputArgs {
    /// Write here (atomically: same-dir temp file + rename) instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
    /// Scalar commands default to a bare number, table commands to csv
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Evaluate the operator at one point; `--a PW` uses the Post-Widder member
    Apply {
        #[arg(long, allow_negative_numbers = true)]
        lambda: f64,
        #[arg(long)]
        a: AValue,
        #[arg(long, allow_negative_numbers = true)]
        x: f64,
        /// Registry label: e0..e6, xsinx, xcospix, gauss, exptheta
        #[arg(long = "fn")]
        function: String,
        /// Tilt rate for `exptheta`
        #[arg(long, allow_negative_numbers = true, required_if_eq("function", "exptheta"))]
        theta: Option<f64>,
        #[arg(long)]
        rel_tol: Option<f64>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Raw and central moment table up to --max-p
    Moments {
        #[arg(long, allow_negative_numbers = true)]
        lambda: f64,
        #[arg(long, allow_negative_numbers = true)]
        a: f64,
        #[arg(long, allow_negative_numbers = true)]
        x: f64,
        #[arg(long, default_value_t = 6)]
        max_p: usize,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Log of the kernel density at (x, nu)
    Kernel {
        #[arg(long, allow_negative_numbers = true)]
        lambda: f64,
        #[arg(long, allow_negative_numbers = true)]
        a: f64,
        #[arg(long, allow_negative_numbers = true)]
        x: f64,
        #[arg(long, allow_negative_numbers = true)]
        nu: f64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Residual of the second-order limit lambda [Tf - f] -> (a^2+x^2)/2 f''
    Voronovskaja {
        #[arg(long, allow_negative_numbers = true)]
        lambda: f64,
        #[arg(long, allow_negative_numbers = true)]
        a: f64,
        #[arg(long, allow_negative_numbers = true)]
        x: f64,
        #[arg(long = "fn")]
        function: String,
        #[arg(long, allow_negative_numbers = true, required_if_eq("function", "exptheta"))]
        theta: Option<f64>,
        #[arg(long)]
        rel_tol: Option<f64>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Both sides of the derivative-convergence limit for order --p
    Simultaneous {
        #[arg(long, allow_negative_numbers = true)]
        lambda: f64,
        #[arg(long, allow_negative_numbers = true)]
        a: f64,
        #[arg(long, allow_negative_numbers = true)]
        x: f64,
        #[arg(long)]
        p: u32,
        #[arg(long = "fn")]
        function: String,
        #[arg(long, allow_negative_numbers = true, required_if_eq("function", "exptheta"))]
        theta: Option<f64>,
        #[arg(long)]
        rel_tol: Option<f64>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Kernel mass outside [x - delta, x + delta] under the tilt e^{rate |nu|}
    Tails {
        #[arg(long, allow_negative_numbers = true)]
        lambda: f64,
        #[arg(long, allow_negative_numbers = true)]
        a: f64,
        #[arg(long, allow_negative_numbers = true)]
        x: f64,
        #[arg(long, allow_negative_numbers = true)]
        delta: f64,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        rate: f64,
        #[arg(long)]
        rel_tol: Option<f64>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Run a convergence experiment from a JSON spec
    Converge {
        /// JSON file: {"function", "a_ladder", "lambda_ladder", "x_grid", "rel_tol"}
        #[arg(long)]
        config: PathBuf,
        #[command(flatten)]
        output: OutputArgs,
    },
}

fn numeric_fail(err: exop::Error, cell: String) -> ! {
    eprintln!("error: {} at {}: {}", err.name(), cell, err);
    process::exit(1);
}

fn io_fail(what: &str, path: &Path, err: &io::Error) -> ! {
    eprintln!("error: cannot {what} {}: {err}", path.display());
    process::exit(1);
}

fn resolve(label: &str, theta: Option<f64>, cell: &str) -> SmoothFunction {
    SmoothFunction::from_label(label, theta)
        .unwrap_or_else(|e| numeric_fail(e, cell.to_string()))
}

fn write_atomic(path: &Path, bytes: &[u8]) -> io::Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let name = path.file_name().ok_or_else(|| {
        io::Error::new(io::ErrorKind::InvalidInput, "output path has no file name")
    })?;
    let tmp = dir.join(format!(".{}.{}.tmp", name.to_string_lossy(), process::id()));
    fs::write(&tmp, bytes)?;
    fs::rename(&tmp, path).map_err(|e| {
        let _ = fs::remove_file(&tmp);
        e
    })
}

fn emit(output: &OutputArgs, text: &str) {
    match &output.out {
        Some(path) => {
            if let Err(e) = write_atomic(path, text.as_bytes()) {
                io_fail("write", path, &e);
            }
        }
        None => print!("{text}"),
    }
}

fn render_scalar(name: &str, v: f64, format: Option<Format>) -> String {
    match format {
        None => format!("{v}\n"),
        Some(Format::Csv) => format!("{name}\n{}\n", format_sig17(v)),
        Some(Format::Json) => format!("{}\n", serde_json::json!({ name: v })),
    }
}

fn main() {
    match Cli::parse().cmd {
        Cmd::Apply {
            lambda,
            a,
            x,
            function,
            theta,
            rel_tol,
            output,
        } => {
            let cell = format!("(lambda={lambda}, a={a}, x={x})");
            let cfg = rel_tol.map(QuadConfig::with_rel_tol).unwrap_or_default();
            let f = resolve(&function, theta, &cell).to_growth_bounded();
            let v = match a {
                AValue::PostWidder => operators::apply_post_widder(lambda, &f, x, &cfg),
                AValue::Value(a) => OperatorParams::new(lambda, a)
                    .and_then(|p| operators::apply(&p, &f, x, &cfg)),
            }
            .unwrap_or_else(|e| numeric_fail(e, cell));
            emit(&output, &render_scalar("value", v, output.format));
        }

        Cmd::Moments {
            lambda,
            a,
            x,
            max_p,
            output,
        } => {
            let cell = format!("(lambda={lambda}, a={a}, x={x})");
            let (raw, central) = OperatorParams::new(lambda, a)
                .and_then(|p| {
                    Ok((
                        moments::raw_moments_jet(&p, x, max_p)?,
                        moments::central_moments_jet(&p, x, max_p)?,
                    ))
                })
                .unwrap_or_else(|e| numeric_fail(e, cell));
            let text = match output.format {
                Some(Format::Json) => {
                    let rows: Vec<_> = (0..=max_p)
                        .map(|p| {
                            serde_json::json!({
                                "p": p,
                                "raw_moment": raw[p],
                                "central_moment": central[p],
                            })
                        })
                        .collect();
                    format!("{}\n", serde_json::Value::Array(rows))
                }
                _ => {
                    let mut s = String::from("p,raw_moment,central_moment\n");
                    for p in 0..=max_p {
                        s.push_str(&format!(
                            "{p},{},{}\n",
                            format_sig17(raw[p]),
                            format_sig17(central[p])
                        ));
                    }
                    s
                }
            };
            emit(&output, &text);
        }

        Cmd::Kernel {
            lambda,
            a,
            x,
            nu,
            output,
        } => {
            let cell = format!("(lambda={lambda}, a={a}, x={x}, nu={nu})");
            let v = OperatorParams::new(lambda, a)
                .and_then(|p| Ok(kernel::log_kernel(&p, KernelPoint::new(x, nu)?)))
                .unwrap_or_else(|e| numeric_fail(e, cell));
            emit(&output, &render_scalar("log_kernel", v, output.format));
        }

        Cmd::Voronovskaja {
            lambda,
            a,
            x,
            function,
            theta,
            rel_tol,
            output,
        } => {
            let cell = format!("(lambda={lambda}, a={a}, x={x})");
            let cfg = rel_tol.map(QuadConfig::with_rel_tol).unwrap_or_default();
            let f = resolve(&function, theta, &cell);
            let v = OperatorParams::new(lambda, a)
                .and_then(|p| analysis::voronovskaja_residual(&p, &f, x, &cfg))
                .unwrap_or_else(|e| numeric_fail(e, cell));
            emit(&output, &render_scalar("residual", v, output.format));
        }

        Cmd::Simultaneous {
            lambda,
            a,
            x,
            p,
            function,
            theta,
            rel_tol,
            output,
        } => {
            let cell = format!("(lambda={lambda}, a={a}, x={x})");
            let cfg = rel_tol.map(QuadConfig::with_rel_tol).unwrap_or_default();
            let f = resolve(&function, theta, &cell);
            let (lhs, rhs) = OperatorParams::new(lambda, a)
                .and_then(|params| analysis::simultaneous_check(&params, &f, x, p, &cfg))
                .unwrap_or_else(|e| numeric_fail(e, cell));
            let text = match output.format {
                Some(Format::Json) => {
                    format!("{}\n", serde_json::json!({ "lhs": lhs, "rhs": rhs }))
                }
                _ => format!("lhs,rhs\n{},{}\n", format_sig17(lhs), format_sig17(rhs)),
            };
            emit(&output, &text);
        }

        Cmd::Tails {
            lambda,
            a,
            x,
            delta,
            rate,
            rel_tol,
            output,
        } => {
            let cell = format!("(lambda={lambda}, a={a}, x={x})");
            let cfg = rel_tol.map(QuadConfig::with_rel_tol).unwrap_or_default();
            let v = OperatorParams::new(lambda, a)
                .and_then(|p| analysis::tail_mass(&p, x, delta, rate, &cfg))
                .unwrap_or_else(|e| numeric_fail(e, cell));
            emit(&output, &render_scalar("tail_mass", v, output.format));
        }

        Cmd::Converge { config, output } => {
            let text = fs::read_to_string(&config)
                .unwrap_or_else(|e| io_fail("read", &config, &e));
            let spec: ExperimentSpec = serde_json::from_str(&text).unwrap_or_else(|e| {
                eprintln!("error: invalid experiment config {}: {e}", config.display());
                process::exit(1);
            });
            let report = analysis::run_convergence_experiment(&spec)
                .unwrap_or_else(|e| numeric_fail(e, format!("config {}", config.display())));
            let rendered = match output.format {
                Some(Format::Json) => {
                    format!("{}\n", serde_json::to_string_pretty(&report).unwrap())
                }
                _ => report.to_csv(),
            };
            emit(&output, &rendered);
        }
    }
}
