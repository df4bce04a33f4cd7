//! Command-line surface for the exact distribution-distance library.
//!
//! Exit codes: 0 success, 1 validation error, 2 usage error, 3 property
//! violation in `verify`.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use kuiper_core::generate::{random_distribution, random_map, trial_rng, DistributionOptions};
use kuiper_core::io::{
    parse_distribution, parse_map, serialize_distribution, serialize_map,
};
use kuiper_core::metrics::{ks_distance, kuiper_witness, tv_distance};
use kuiper_core::scalar::{format_rational, ExtReal, Value};
use kuiper_core::transform::{pullback, MonotoneMap};
use kuiper_core::verify::{run_all, run_suite, suite_names, SuiteReport};
use kuiper_core::{
    characterize, Distribution, Error as CoreError, Interval,
};

#[derive(Parser)]
#[command(
    name = "kuiper",
    about = "Exact Kuiper/KS/TV distances, supports, transforms and verification suites for piecewise-Möbius distributions",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Metric {
    Kuiper,
    Ks,
    Tv,
}

#[derive(Clone, Copy, ValueEnum, PartialEq)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum GenKind {
    Distribution,
    Map,
}

#[derive(Clone, Copy, ValueEnum)]
enum Complexity {
    Small,
    Medium,
    Large,
}

#[derive(Subcommand)]
enum Command {
    /// Distance between two distributions, with an optional Kuiper witness.
    Dist {
        #[arg(long, value_enum, default_value = "kuiper")]
        metric: Metric,
        /// Also print the maximizing interval (Kuiper only).
        #[arg(long)]
        witness: bool,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
        file_a: PathBuf,
        file_b: PathBuf,
    },
    /// Pull a distribution back through a monotone map.
    Transform(TransformArgs),
    /// Closed support, or the co-interval support with its gaps.
    Support {
        /// Report the co-interval support, hull and gap decomposition.
        #[arg(long)]
        co: bool,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
        file: PathBuf,
    },
    /// Unit-distance regions of one distribution, or the unit-distance
    /// decision for a pair.
    Characterize {
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
        file_a: PathBuf,
        file_b: Option<PathBuf>,
    },
    /// Replace a distribution by n quantile atoms of mass 1/n.
    Quantize {
        #[arg(short, long)]
        n: u64,
        #[arg(long)]
        output: Option<PathBuf>,
        file: PathBuf,
    },
    /// Generate a random distribution or map from a seed.
    Gen {
        #[arg(long, value_enum)]
        kind: GenKind,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, value_enum, default_value = "small")]
        complexity: Complexity,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Run verification suites; exits 3 on any property violation.
    Verify {
        /// Suite name, or `all`.
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Trial count override (default: per-suite).
        #[arg(long)]
        trials: Option<u64>,
        /// Write the report JSON here.
        #[arg(long)]
        report: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
}

#[derive(Args)]
#[group(id = "mapsrc", required = true, multiple = false)]
struct MapSource {
    /// Map JSON file.
    #[arg(long)]
    map: Option<PathBuf>,
    /// Use the inversion r_x with this pole ("inf" for the identity).
    #[arg(long)]
    r_pole: Option<String>,
}

#[derive(Args)]
struct TransformArgs {
    #[command(flatten)]
    source: MapSource,
    #[arg(long)]
    output: Option<PathBuf>,
    input: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            match err {
                CoreError::UnknownSuite(_) => ExitCode::from(2),
                _ => ExitCode::from(1),
            }
        }
    }
}

fn read_distribution(path: &PathBuf) -> Result<Distribution, CoreError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CoreError::Json(format!("{}: {e}", path.display())))?;
    parse_distribution(&text).map_err(|e| annotate(path, e))
}

fn annotate(path: &PathBuf, e: CoreError) -> CoreError {
    match e {
        CoreError::Json(msg) => CoreError::Json(format!("{}: {msg}", path.display())),
        other => other,
    }
}

fn write_output(path: &Option<PathBuf>, content: &str) -> Result<(), CoreError> {
    match path {
        Some(p) => fs::write(p, content).map_err(|e| CoreError::Json(format!("{}: {e}", p.display()))),
        None => {
            println!("{content}");
            Ok(())
        }
    }
}

fn value_json(v: &Value) -> serde_json::Value {
    serde_json::json!({
        "value": v.to_string(),
        "value_float": v.to_f64(),
        "exact": v.is_exact(),
    })
}

fn exactness(v: &Value) -> &'static str {
    if v.is_exact() {
        "exact"
    } else {
        "approx"
    }
}

fn intervals_json(ivs: &[Interval]) -> serde_json::Value {
    serde_json::Value::Array(
        ivs.iter()
            .map(|iv| serde_json::Value::String(iv.to_string()))
            .collect(),
    )
}

fn run(command: Command) -> Result<ExitCode, CoreError> {
    match command {
        Command::Dist {
            metric,
            witness,
            format,
            file_a,
            file_b,
        } => {
            let a = read_distribution(&file_a)?;
            let b = read_distribution(&file_b)?;
            let (value, wit) = match metric {
                Metric::Kuiper => {
                    let (w, d) = kuiper_witness(&a, &b);
                    (d, Some(w))
                }
                Metric::Ks => (ks_distance(&a, &b), None),
                Metric::Tv => (tv_distance(&a, &b), None),
            };
            match format {
                Format::Text => {
                    println!("{} {}", value, exactness(&value));
                    if witness {
                        match &wit {
                            Some(w) => println!(
                                "witness {} signed={}",
                                w.interval, w.signed_value
                            ),
                            None => eprintln!("witness is only defined for the kuiper metric"),
                        }
                    }
                }
                Format::Json => {
                    let mut obj = value_json(&value);
                    let name = match metric {
                        Metric::Kuiper => "kuiper",
                        Metric::Ks => "ks",
                        Metric::Tv => "tv",
                    };
                    obj["metric"] = serde_json::json!(name);
                    if witness {
                        if let Some(w) = &wit {
                            obj["witness"] = serde_json::json!({
                                "interval": w.interval.to_string(),
                                "signed": w.signed_value.to_string(),
                                "signed_float": w.signed_value.to_f64(),
                                "exact": w.exact,
                            });
                        }
                    }
                    println!("{}", serde_json::to_string_pretty(&obj).unwrap());
                }
            }
            Ok(ExitCode::SUCCESS)
        }

        Command::Transform(args) => {
            let input = read_distribution(&args.input)?;
            let map = match (&args.source.map, &args.source.r_pole) {
                (Some(path), None) => {
                    let text = fs::read_to_string(path)
                        .map_err(|e| CoreError::Json(format!("{}: {e}", path.display())))?;
                    parse_map(&text).map_err(|e| annotate(path, e))?
                }
                (None, Some(pole)) => MonotoneMap::r_map(&ExtReal::parse(pole)?),
                _ => unreachable!("clap enforces exactly one source"),
            };
            let out = pullback(&input, &map)?;
            write_output(&args.output, &serialize_distribution(&out))?;
            Ok(ExitCode::SUCCESS)
        }

        Command::Support { co, format, file } => {
            let d = read_distribution(&file)?;
            if co {
                let cs = d.co_interval_support();
                match format {
                    Format::Text => {
                        println!(
                            "co-interval support: {}",
                            cs.components
                                .iter()
                                .map(|iv| iv.to_string())
                                .collect::<Vec<_>>()
                                .join(" ∪ ")
                        );
                        println!("hull: {}", cs.hull);
                        println!(
                            "bounded gaps: {}",
                            if cs.bounded_gaps.is_empty() {
                                "none".to_string()
                            } else {
                                cs.bounded_gaps
                                    .iter()
                                    .map(|iv| iv.to_string())
                                    .collect::<Vec<_>>()
                                    .join(", ")
                            }
                        );
                    }
                    Format::Json => {
                        let obj = serde_json::json!({
                            "components": intervals_json(&cs.components),
                            "hull": cs.hull.to_string(),
                            "bounded_gaps": intervals_json(&cs.bounded_gaps),
                            "outer": intervals_json(&cs.outer),
                        });
                        println!("{}", serde_json::to_string_pretty(&obj).unwrap());
                    }
                }
            } else {
                let support = d.closed_support();
                match format {
                    Format::Text => println!(
                        "closed support: {}",
                        support
                            .iter()
                            .map(|iv| iv.to_string())
                            .collect::<Vec<_>>()
                            .join(" ∪ ")
                    ),
                    Format::Json => println!(
                        "{}",
                        serde_json::to_string_pretty(&serde_json::json!({
                            "closed_support": intervals_json(&support),
                        }))
                        .unwrap()
                    ),
                }
            }
            Ok(ExitCode::SUCCESS)
        }

        Command::Characterize {
            format,
            file_a,
            file_b,
        } => {
            let a = read_distribution(&file_a)?;
            match file_b {
                Some(path) => {
                    let b = read_distribution(&path)?;
                    let unit = characterize::is_unit_distant(&a, &b);
                    match format {
                        Format::Text => println!(
                            "unit distant: {}",
                            if unit { "yes" } else { "no" }
                        ),
                        Format::Json => println!(
                            "{}",
                            serde_json::to_string_pretty(
                                &serde_json::json!({ "unit_distant": unit })
                            )
                            .unwrap()
                        ),
                    }
                }
                None => {
                    let regions = characterize::unit_distance_regions(&a)?;
                    match format {
                        Format::Text => {
                            println!(
                                "outer: {}",
                                regions
                                    .outer
                                    .iter()
                                    .map(|iv| iv.to_string())
                                    .collect::<Vec<_>>()
                                    .join(" ∪ ")
                            );
                            println!(
                                "gaps: {}",
                                if regions.gaps.is_empty() {
                                    "none".to_string()
                                } else {
                                    regions
                                        .gaps
                                        .iter()
                                        .map(|iv| iv.to_string())
                                        .collect::<Vec<_>>()
                                        .join(", ")
                                }
                            );
                            println!(
                                "dirac excluded points: {}",
                                if regions.dirac_excluded_points.is_empty() {
                                    "none".to_string()
                                } else {
                                    regions
                                        .dirac_excluded_points
                                        .iter()
                                        .map(format_rational)
                                        .collect::<Vec<_>>()
                                        .join(", ")
                                }
                            );
                        }
                        Format::Json => {
                            let obj = serde_json::json!({
                                "outer": intervals_json(&regions.outer),
                                "gaps": intervals_json(&regions.gaps),
                                "dirac_excluded_points": regions
                                    .dirac_excluded_points
                                    .iter()
                                    .map(format_rational)
                                    .collect::<Vec<_>>(),
                            });
                            println!("{}", serde_json::to_string_pretty(&obj).unwrap());
                        }
                    }
                }
            }
            Ok(ExitCode::SUCCESS)
        }

        Command::Quantize { n, output, file } => {
            if n == 0 {
                return Err(CoreError::InvalidDistribution(
                    "quantize needs n >= 1".into(),
                ));
            }
            let d = read_distribution(&file)?;
            write_output(&output, &serialize_distribution(&d.quantize(n)))?;
            Ok(ExitCode::SUCCESS)
        }

        Command::Gen {
            kind,
            seed,
            complexity,
            output,
        } => {
            let mut rng = trial_rng(seed, 0x6e6, 0);
            let content = match kind {
                GenKind::Distribution => {
                    let opts = DistributionOptions {
                        max_components: match complexity {
                            Complexity::Small => 3,
                            Complexity::Medium => 5,
                            Complexity::Large => 8,
                        },
                        allow_atoms: true,
                        allow_tails: true,
                        ..Default::default()
                    };
                    serialize_distribution(&random_distribution(&mut rng, &opts))
                }
                GenKind::Map => {
                    let (knots, moebius) = match complexity {
                        Complexity::Small => (2, false),
                        Complexity::Medium => (4, false),
                        Complexity::Large => (4, true),
                    };
                    serialize_map(&random_map(&mut rng, knots, moebius))
                }
            };
            write_output(&output, &content)?;
            Ok(ExitCode::SUCCESS)
        }

        Command::Verify {
            suite,
            seed,
            trials,
            report,
            format,
        } => {
            let reports: Vec<SuiteReport> = if suite == "all" {
                run_all(seed, trials)
            } else {
                vec![run_suite(&suite, seed, trials).map_err(|e| match e {
                    CoreError::UnknownSuite(name) => {
                        eprintln!("known suites: all, {}", suite_names().join(", "));
                        CoreError::UnknownSuite(name)
                    }
                    other => other,
                })?]
            };
            let failed: u64 = reports.iter().map(|r| r.failure_count).sum();
            match format {
                Format::Text => {
                    for r in &reports {
                        println!(
                            "{:>9}  {}  trials={} failures={} {}  {} ms",
                            r.suite,
                            if r.passed() { "PASS" } else { "FAIL" },
                            r.trials,
                            r.failure_count,
                            r.exactness_summary(),
                            r.wall_ms
                        );
                        for f in &r.failures {
                            println!("    trial {}: {}", f.trial, f.message);
                        }
                    }
                }
                Format::Json => {
                    println!("{}", serde_json::to_string_pretty(&reports).unwrap());
                }
            }
            if let Some(path) = report {
                let json = serde_json::to_string_pretty(&reports).unwrap();
                fs::write(&path, json)
                    .map_err(|e| CoreError::Json(format!("{}: {e}", path.display())))?;
            }
            Ok(if failed == 0 {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(3)
            })
        }
    }
}
