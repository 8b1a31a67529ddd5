//! Command-line surface over the diagram-metric library: distances,
//! matchings, geodesic sampling, compactness diagnostics, the gallery
//! constructions, and the symmetric-product embedding. All output is JSON on
//! stdout (or `--out`), with numbers rounded to 12 significant digits and
//! `"inf"` as the literal for infinite values.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use pdiag::{
    circles_partial, diagnose_set, embed_symmetric, geodesic, infimum_gap_demo, make_space,
    symmetric_dist, wasserstein_truncated, Diagram, DiagramPath, Error as LibError, Matching,
    PNorm, Space, TruncatedDiagram,
};

#[derive(Parser)]
#[command(name = "pdiag", version, about = "Distances, matchings, geodesics, and diagnostics for persistence diagrams over metric pairs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Wasserstein distance between two diagram files.
    Dist {
        #[arg(long)]
        space: String,
        #[arg(long)]
        p: String,
        #[arg(long)]
        out: Option<PathBuf>,
        alpha: PathBuf,
        beta: PathBuf,
    },
    /// Optimal matching between two diagram files, or with `--eval` the
    /// p-cost of a stored matching against the same marginals.
    Match {
        #[arg(long)]
        space: String,
        #[arg(long)]
        p: String,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Evaluate this matching file instead of solving.
        #[arg(long)]
        eval: Option<PathBuf>,
        alpha: PathBuf,
        beta: PathBuf,
    },
    /// Sample the geodesic between two diagrams on a grid of times;
    /// one JSON line per sample.
    Geodesic {
        #[arg(long)]
        space: String,
        #[arg(long)]
        p: String,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Comma-separated times in [0, 1].
        #[arg(long = "t-grid", default_value = "0,0.25,0.5,0.75,1")]
        t_grid: String,
        alpha: PathBuf,
        beta: PathBuf,
    },
    /// Compactness diagnostics for a family of diagram files.
    Diagnose {
        #[arg(long)]
        space: String,
        #[arg(long)]
        p: String,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Comma-separated strictly decreasing scales.
        #[arg(long = "eps-schedule")]
        eps_schedule: String,
        /// Net radius as a multiple of each scale.
        #[arg(long = "net-factor", default_value_t = 1.0)]
        net_factor: f64,
        inputs: Vec<PathBuf>,
    },
    /// Gallery computations: `wedge_intervals` deletion costs or the
    /// `circles` series bracket.
    Gallery {
        #[arg(long)]
        name: String,
        #[arg(long)]
        n: u64,
        #[arg(long, default_value = "1")]
        p: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Distance through the symmetric-product embedding (pointed spaces).
    Embed {
        #[arg(long)]
        space: String,
        #[arg(long)]
        p: String,
        /// Padding size; diagram cardinalities must not exceed it.
        #[arg(long)]
        n: u64,
        #[arg(long)]
        out: Option<PathBuf>,
        alpha: PathBuf,
        beta: PathBuf,
    },
}

/// Exit codes: 2 for input validation failures, 3 for capability errors.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn input(message: impl Into<String>) -> Failure {
        Failure { code: 2, message: message.into() }
    }
}

impl From<LibError> for Failure {
    fn from(e: LibError) -> Failure {
        let code = match e {
            LibError::CapabilityMissing { .. } | LibError::InfiniteDistance(_) => 3,
            _ => 2,
        };
        Failure { code, message: e.to_string() }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::Dist { space, p, out, alpha, beta } => {
            let space = make_space(&space)?;
            let p = PNorm::parse(&p)?;
            let a = read_truncated(&space, &alpha)?;
            let b = read_truncated(&space, &beta)?;
            let result = wasserstein_truncated(&space, &a, &b, p)?;
            let payload = json!({
                "value": ext_json(result.value.value()),
                "error_bound": ext_json(result.error_bound.value()),
                "optimal": result.optimal,
            });
            emit(payload, out.as_deref())
        }
        Command::Match { space, p, out, eval, alpha, beta } => {
            let space = make_space(&space)?;
            let p = PNorm::parse(&p)?;
            let a = read_diagram(&space, &alpha)?;
            let b = read_diagram(&space, &beta)?;
            let payload = match eval {
                Some(path) => {
                    let v = read_json(&path)?;
                    let matching = Matching::from_json(&space, &v, a, b)?;
                    json!({ "value": ext_json(matching.cost(&space, p)?.value()) })
                }
                None => {
                    let result = pdiag::wasserstein(&space, &a, &b, p)?;
                    let matching = result
                        .matching
                        .as_ref()
                        .map(|m| m.to_json(&space))
                        .transpose()?;
                    json!({
                        "value": ext_json(result.value.value()),
                        "error_bound": ext_json(result.error_bound.value()),
                        "optimal": result.optimal,
                        "matching": matching,
                    })
                }
            };
            emit(payload, out.as_deref())
        }
        Command::Geodesic { space, p, out, t_grid, alpha, beta } => {
            let space = make_space(&space)?;
            let p = PNorm::parse(&p)?;
            let a = read_diagram(&space, &alpha)?;
            let b = read_diagram(&space, &beta)?;
            let grid = parse_grid(&t_grid)?;
            let path = geodesic(&space, &a, &b, p)?;
            let mut lines = String::new();
            for t in grid {
                let d = path.eval(t)?;
                let mut line = json!({ "t": t, "diagram": d.to_json(&space)? });
                round_numbers(&mut line);
                lines.push_str(&line.to_string());
                lines.push('\n');
            }
            write_output(&lines, out.as_deref())
        }
        Command::Diagnose { space, p, out, eps_schedule, net_factor, inputs } => {
            let space = make_space(&space)?;
            let p = PNorm::parse(&p)?;
            if inputs.is_empty() {
                return Err(Failure::input("diagnose needs at least one diagram file"));
            }
            let family = inputs
                .iter()
                .map(|path| read_truncated(&space, path))
                .collect::<Result<Vec<_>, _>>()?;
            let schedule = parse_grid(&eps_schedule)?;
            let report = diagnose_set(&space, &family, p, &schedule, net_factor)?;
            emit(report.to_json(&space), out.as_deref())
        }
        Command::Gallery { name, n, p, out } => {
            let p = PNorm::parse(&p)?;
            let payload = match name.as_str() {
                "wedge_intervals" => {
                    let costs = infimum_gap_demo(n)?;
                    Value::Array(costs.into_iter().map(|(k, c)| json!([k, c])).collect())
                }
                "circles" => {
                    let (partial, tail) = circles_partial(n, p)?;
                    json!({ "n": n, "partial": partial, "tail_bound": tail })
                }
                other => {
                    return Err(Failure::input(format!(
                        "unknown gallery `{other}` (expected wedge_intervals or circles)"
                    )))
                }
            };
            emit(payload, out.as_deref())
        }
        Command::Embed { space, p, n, out, alpha, beta } => {
            let space = make_space(&space)?;
            let p = PNorm::parse(&p)?;
            let a = read_diagram(&space, &alpha)?;
            let b = read_diagram(&space, &beta)?;
            let base = space.base_point().ok_or(LibError::CapabilityMissing {
                space: space.id().to_string(),
                capability: "base point (pointed space)",
            })?;
            let u = embed_symmetric(&space, &a, n, &base)?;
            let v = embed_symmetric(&space, &b, n, &base)?;
            let d = symmetric_dist(&space, &u, &v, p)?;
            emit(json!({ "value": ext_json(d.value()), "n": n }), out.as_deref())
        }
    }
}

fn read_json(path: &Path) -> Result<Value, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn read_diagram(space: &Space, path: &Path) -> Result<Diagram, Failure> {
    let v = read_json(path)?;
    Ok(Diagram::from_json(space, &v)?)
}

fn read_truncated(space: &Space, path: &Path) -> Result<TruncatedDiagram, Failure> {
    let v = read_json(path)?;
    Ok(TruncatedDiagram::from_json(space, &v)?)
}

fn parse_grid(text: &str) -> Result<Vec<f64>, Failure> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<f64>()
                .map_err(|_| Failure::input(format!("cannot parse grid value `{s}`")))
        })
        .collect()
}

fn ext_json(v: f64) -> Value {
    if v.is_infinite() {
        Value::String("inf".into())
    } else {
        json!(v)
    }
}

/// Rounds every float in the payload to 12 significant digits so output is
/// stable and readable. Integers pass through untouched.
fn round_numbers(v: &mut Value) {
    match v {
        Value::Number(n) => {
            if n.is_f64() {
                let x = n.as_f64().unwrap();
                let rounded: f64 = format!("{x:.11e}").parse().unwrap();
                *v = json!(rounded);
            }
        }
        Value::Array(items) => items.iter_mut().for_each(round_numbers),
        Value::Object(map) => map.values_mut().for_each(round_numbers),
        _ => {}
    }
}

fn emit(mut payload: Value, out: Option<&Path>) -> Result<(), Failure> {
    round_numbers(&mut payload);
    let mut text = payload.to_string();
    text.push('\n');
    write_output(&text, out)
}

fn write_output(text: &str, out: Option<&Path>) -> Result<(), Failure> {
    match out {
        None => {
            print!("{text}");
            Ok(())
        }
        Some(path) => {
            fs::write(path, text).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
        }
    }
}
