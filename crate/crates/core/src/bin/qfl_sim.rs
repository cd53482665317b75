//! Command-line harness: run experiments from TOML configs, demo the QKD
//! and DP building blocks, and generate synthetic datasets.
//!
//! Exit codes: 0 success, 2 invalid configuration or flags, 3 runtime abort.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use qfl_sim::config::ExperimentConfig;
use qfl_sim::data::{generate_blobs, save_csv};
use qfl_sim::federated::{run_experiment, write_metrics_csv};
use qfl_sim::privacy::{add_noise, noise_scale, DpConfig, DpMechanism};
use qfl_sim::qkd::{bb84_exchange, run_test, session_dump, ChannelConfig, EveKind, EveModel};
use qfl_sim::rng;
use qfl_sim::Error;

/// Default output directory, overridable per invocation.
const OUT_DIR_ENV: &str = "QFL_SIM_OUT_DIR";

const EXIT_INVALID: u8 = 2;
const EXIT_RUNTIME: u8 = 3;

#[derive(Parser)]
#[command(name = "qfl-sim", version, about = "Quantum federated learning simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment (or a device-count sweep) from a TOML config.
    Run {
        /// Path to the experiment config.
        config: PathBuf,
    },
    /// One BB84 exchange with an optional eavesdropper: prints the sift
    /// fraction, QBER and verdict, and writes the per-qubit session dump.
    QkdDemo(QkdDemoArgs),
    /// Print the calibrated noise scale and empirical moments of a draw.
    DpDemo(DpDemoArgs),
    /// Generate a synthetic blob dataset as CSV.
    GenData(GenDataArgs),
}

#[derive(Args)]
struct QkdDemoArgs {
    /// Number of transmitted qubits.
    #[arg(long, default_value_t = 1000)]
    n: usize,
    /// Adversary: none, intercept-resend, swap, half-swap.
    #[arg(long, default_value = "none")]
    eve: String,
    /// Classical bit-flip probability on the channel.
    #[arg(long, default_value_t = 0.0)]
    flip: f64,
    /// Fraction of sifted bits sacrificed for testing.
    #[arg(long, default_value_t = 0.125)]
    test_fraction: f64,
    /// Tolerated test-bit errors.
    #[arg(long, default_value_t = 0)]
    n_allowed: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Session dump destination (defaults to qkd_session.csv in the output
    /// directory).
    #[arg(long)]
    dump: Option<PathBuf>,
}

#[derive(Args)]
struct DpDemoArgs {
    /// Privacy budget.
    #[arg(long)]
    epsilon: f64,
    #[arg(long, default_value_t = 1.0)]
    sensitivity: f64,
    /// laplace or gaussian.
    #[arg(long, default_value = "laplace")]
    mechanism: String,
    /// Gaussian exception probability.
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long, default_value_t = 100_000)]
    n_samples: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

#[derive(Args)]
struct GenDataArgs {
    #[arg(long, default_value_t = 300)]
    n_samples: usize,
    #[arg(long, default_value_t = 2)]
    n_features: usize,
    #[arg(long, default_value_t = 2)]
    n_classes: usize,
    #[arg(long, default_value_t = 4.0)]
    separation: f64,
    /// Comma-separated class proportions (default uniform).
    #[arg(long)]
    weights: Option<String>,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long)]
    output: PathBuf,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run { config } => cmd_run(&config),
        Command::QkdDemo(args) => cmd_qkd_demo(&args),
        Command::DpDemo(args) => cmd_dp_demo(&args),
        Command::GenData(args) => cmd_gen_data(&args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::InvalidConfig { .. }
                | Error::DimensionMismatch(_)
                | Error::MalformedPayload(_) => ExitCode::from(EXIT_INVALID),
                _ => ExitCode::from(EXIT_RUNTIME),
            }
        }
    }
}

/// Resolve a possibly relative output path against QFL_SIM_OUT_DIR.
fn resolve_output(path: &Path) -> PathBuf {
    if path.is_absolute() {
        return path.to_path_buf();
    }
    match std::env::var_os(OUT_DIR_ENV) {
        Some(dir) if !dir.is_empty() => PathBuf::from(dir).join(path),
        _ => path.to_path_buf(),
    }
}

/// Sweep-aware output naming: `metrics.csv` becomes `metrics_k20.csv`.
fn suffixed(path: &Path, devices: usize) -> PathBuf {
    let stem = path.file_stem().unwrap_or_default().to_string_lossy();
    let extension = path.extension().map(|e| e.to_string_lossy().to_string());
    let name = match extension {
        Some(ext) => format!("{stem}_k{devices}.{ext}"),
        None => format!("{stem}_k{devices}"),
    };
    path.with_file_name(name)
}

fn cmd_run(config_path: &Path) -> qfl_sim::Result<()> {
    let config = ExperimentConfig::load(config_path)?;
    config.validate_for_run()?;

    let counts = config.devices.counts();
    let sweep = counts.len() > 1;
    for devices in counts {
        let resolved = config.with_devices(devices);
        let output = resolve_output(&resolved.output);
        let output = if sweep {
            suffixed(&output, devices)
        } else {
            output
        };
        let metrics = run_experiment(&resolved)?;
        write_metrics_csv(&output, &metrics)?;
        write_manifest(&output, &resolved)?;
        println!(
            "devices={devices} rounds={} metrics={}",
            metrics.len(),
            output.display()
        );
        if let Some(last) = metrics.last() {
            println!(
                "  final: pred_test_acc={:.6} global_ft_test_acc={:.6} avg_local_train_acc={:.6}",
                last.pred_test_acc, last.global_ft_test_acc, last.avg_local_train_acc
            );
        }
    }
    Ok(())
}

/// The manifest re-parses to an equivalent config: resolved settings plus
/// the artifact version.
#[derive(serde::Serialize, serde::Deserialize)]
struct RunManifest {
    artifact_version: String,
    config: ExperimentConfig,
}

fn write_manifest(metrics_path: &Path, config: &ExperimentConfig) -> qfl_sim::Result<()> {
    let manifest = RunManifest {
        artifact_version: env!("CARGO_PKG_VERSION").to_string(),
        config: config.clone(),
    };
    let text = toml::to_string_pretty(&manifest)
        .map_err(|e| Error::invalid_config("manifest", e.to_string()))?;
    let path = metrics_path.with_extension("manifest.toml");
    std::fs::write(path, text)?;
    Ok(())
}

fn parse_eve(name: &str) -> qfl_sim::Result<EveKind> {
    Ok(match name {
        "none" => EveKind::None,
        "intercept" | "intercept-resend" => EveKind::InterceptResend,
        "swap" => EveKind::Swap,
        "half-swap" | "halfswap" => EveKind::HalfSwap,
        other => {
            return Err(Error::invalid_config(
                "eve",
                format!("unknown adversary {other:?}"),
            ))
        }
    })
}

fn cmd_qkd_demo(args: &QkdDemoArgs) -> qfl_sim::Result<()> {
    if args.n == 0 {
        return Err(Error::invalid_config("n", "must be >= 1"));
    }
    let channel = ChannelConfig {
        flip_probability: args.flip,
    };
    channel.validate()?;
    let eve = EveModel {
        kind: parse_eve(&args.eve)?,
        seed: rng::derive(args.seed, "eve-seed", &[]),
    };
    let mut stream = rng::stream(args.seed, "qkd-demo", &[]);
    let session = bb84_exchange(args.n, &eve, &channel, &mut stream);
    let report = run_test(&session, args.test_fraction, args.n_allowed, &mut stream)?;

    let sift_fraction = session.sifted_indices.len() as f64 / session.n as f64;
    println!("qubits {}", session.n);
    println!("sift_fraction {sift_fraction:.6}");
    println!("tested_bits {}", report.tested_indices.len());
    println!("qber {:.6}", report.qber);
    println!("passed {}", report.passed);

    let dump_path = resolve_output(
        args.dump
            .as_deref()
            .unwrap_or_else(|| Path::new("qkd_session.csv")),
    );
    if let Some(parent) = dump_path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)?;
        }
    }
    std::fs::write(&dump_path, session_dump(&session))?;
    println!("dump {}", dump_path.display());
    Ok(())
}

fn cmd_dp_demo(args: &DpDemoArgs) -> qfl_sim::Result<()> {
    let mechanism = match args.mechanism.as_str() {
        "laplace" => DpMechanism::Laplace,
        "gaussian" => DpMechanism::Gaussian,
        other => {
            return Err(Error::invalid_config(
                "mechanism",
                format!("unknown mechanism {other:?}"),
            ))
        }
    };
    let cfg = DpConfig {
        mechanism,
        epsilon: args.epsilon,
        delta: args.delta,
        sensitivity: args.sensitivity,
        clip_nonnegative: false,
        decimals: None,
    };
    let scale = noise_scale(&cfg)?;
    println!("noise_scale {scale:.6}");

    let mut stream = rng::stream(args.seed, "dp-demo", &[]);
    let zeros = vec![0.0];
    let samples: Vec<f64> = (0..args.n_samples)
        .map(|_| add_noise(&zeros, &cfg, &mut stream).map(|v| v[0]))
        .collect::<qfl_sim::Result<_>>()?;
    let n = samples.len().max(1) as f64;
    let mean = samples.iter().sum::<f64>() / n;
    let variance = samples.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
    println!("samples {}", samples.len());
    println!("empirical_mean {mean:.6}");
    println!("empirical_variance {variance:.6}");
    Ok(())
}

fn cmd_gen_data(args: &GenDataArgs) -> qfl_sim::Result<()> {
    let weights = match &args.weights {
        Some(text) => text
            .split(',')
            .map(|w| {
                w.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::invalid_config("weights", format!("bad weight {w:?}")))
            })
            .collect::<qfl_sim::Result<Vec<f64>>>()?,
        None => vec![1.0 / args.n_classes as f64; args.n_classes],
    };
    let data = generate_blobs(
        args.n_samples,
        args.n_features,
        args.n_classes,
        args.separation,
        &weights,
        args.seed,
    )?;
    let output = resolve_output(&args.output);
    if let Some(parent) = output.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)?;
        }
    }
    save_csv(&data, &output, None)?;
    println!(
        "wrote {} samples x {} features to {}",
        data.len(),
        data.num_features(),
        output.display()
    );
    Ok(())
}
