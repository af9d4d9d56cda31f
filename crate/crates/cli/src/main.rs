//! Command-line front end: config parsing, experiment dispatch, output files.

mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::{
    merge_overrides, parse_config_file, parse_correction, parse_granularity_range, parse_toa_kind,
    FileConfig,
};
use otasync::experiments::{
    run_experiment, write_outputs, ExperimentError, ExperimentId, OutputFormat, Overrides,
    RunMeta, DEFAULT_SEED,
};
use otasync::{simulate, Correction, ErrorConfig, Numerology, PdMode, RtgeGranularity, SimConfig};

const LONG_VERSION: &str = concat!(env!("CARGO_PKG_VERSION"), " (config-schema 1)");

#[derive(Parser, Debug)]
#[command(
    name = "otasync",
    version,
    long_version = LONG_VERSION,
    about = "Over-the-air time synchronization simulator for 5G/TSN boundary-clock delivery",
    after_help = "Config file: plain 'key = value' lines mirroring the long flag names \
                  (unknown keys are errors). Flags override file values; defaults fill the rest."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Config file with `key = value` lines mirroring these flags.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Output directory for result files.
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,

    /// Output files to write: csv, json or both.
    #[arg(long, global = true, value_name = "FMT")]
    format: Option<String>,

    /// RNG seed; equal seeds reproduce output bytes exactly.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Worker threads for independent experiment cells.
    #[arg(long, global = true)]
    jobs: Option<usize>,

    /// Sub-carrier spacing in kHz (15/30/60/120); repeat or comma-separate.
    #[arg(long, global = true, value_delimiter = ',')]
    scs: Vec<u32>,

    /// Gaussian ToA noise factor (sigma = U(mu) / kappa).
    #[arg(long, global = true)]
    kappa: Option<f64>,

    /// Sync period in ms.
    #[arg(long = "period-ms", global = true, value_name = "MS")]
    period_ms: Option<f64>,

    /// Simulated span in ms (simulate / fig6).
    #[arg(long = "duration-ms", global = true, value_name = "MS")]
    duration_ms: Option<f64>,

    /// Simulation tick in ms; default min(1, period/10).
    #[arg(long = "tick-ms", global = true, value_name = "MS")]
    tick_ms: Option<f64>,

    /// UE clock drift in ppm (10 ppm = 10 ns/ms).
    #[arg(long = "theta-ppm", global = true, value_name = "PPM")]
    theta_ppm: Option<f64>,

    /// Fixed reference-time granularity G_R in ns.
    #[arg(
        long = "granularity-ns",
        global = true,
        value_name = "NS",
        conflicts_with = "granularity_range"
    )]
    granularity_ns: Option<f64>,

    /// Per-event uniform granularity range `lo:hi` in ns.
    #[arg(long = "granularity-range", global = true, value_name = "LO:HI")]
    granularity_range: Option<String>,

    /// ToA error model: table (per-SCS bound) or gaussian.
    #[arg(long = "toa-model", global = true, value_name = "MODEL")]
    toa_model: Option<String>,

    /// Path-delay bias correction: none, auto (half step) or an offset in ns.
    #[arg(long, global = true, value_name = "MODE")]
    correction: Option<String>,

    /// Draws / repetitions / sync events per cell, experiment dependent.
    #[arg(long, global = true)]
    samples: Option<u64>,
}

#[derive(Subcommand, Debug, Clone, Copy, PartialEq, Eq)]
enum Command {
    /// Run one clock simulation and write the trace.
    Simulate,
    /// Path-delay residual statistics per SCS, kappa and correction.
    Table1,
    /// Empirical CDF of the absolute sync error per SCS.
    Fig4,
    /// Max cumulative error vs reference-time granularity.
    Fig5,
    /// Drift sawtooth traces at 60 and 120 ms sync periods.
    Fig6,
    /// Max cumulative error vs sync period, one curve per SCS.
    Fig7,
    /// SIB payload budget and TSN domain count.
    Capacity,
    /// Run every preset above.
    All,
}

enum CliError {
    /// Bad flag/config/parameter values: exit 2.
    Usage(String),
    /// Filesystem trouble: exit 1.
    Io(String),
}

impl From<ExperimentError> for CliError {
    fn from(err: ExperimentError) -> Self {
        match err {
            ExperimentError::Io(e) => CliError::Io(e.to_string()),
            other => CliError::Usage(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(err: std::io::Error) -> Self {
        CliError::Io(err.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Io(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

struct Effective {
    overrides: Overrides,
    out: PathBuf,
    format: OutputFormat,
    jobs: usize,
}

fn effective_settings(cli: &Cli) -> Result<Effective, CliError> {
    let file = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)?;
            parse_config_file(&text)
                .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?
        }
        None => FileConfig::default(),
    };

    let granularity = match (cli.granularity_ns, &cli.granularity_range) {
        (Some(g), _) => Some(RtgeGranularity::Fixed(g)),
        (None, Some(range)) => Some(parse_granularity_range(range).map_err(CliError::Usage)?),
        (None, None) => None,
    };
    let flag_overrides = Overrides {
        scs: if cli.scs.is_empty() {
            None
        } else {
            Some(cli.scs.clone())
        },
        kappa: cli.kappa,
        period_ms: cli.period_ms,
        duration_ms: cli.duration_ms,
        tick_ms: cli.tick_ms,
        theta_ppm: cli.theta_ppm,
        granularity,
        toa: cli
            .toa_model
            .as_deref()
            .map(|s| parse_toa_kind(s).map_err(CliError::Usage))
            .transpose()?,
        correction: cli
            .correction
            .as_deref()
            .map(|s| parse_correction(s).map_err(CliError::Usage))
            .transpose()?,
        samples: cli.samples,
        seed: cli.seed,
    };
    let overrides = merge_overrides(file.overrides, flag_overrides);
    validate_overrides(&overrides)?;

    let format_name = cli
        .format
        .clone()
        .or(file.format)
        .unwrap_or_else(|| "both".to_string());
    let format = OutputFormat::parse(&format_name).ok_or_else(|| {
        CliError::Usage(format!("format must be csv, json or both, got '{format_name}'"))
    })?;
    let out = cli
        .out
        .clone()
        .or(file.out.map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("out"));
    let jobs = cli.jobs.or(file.jobs).unwrap_or(1);
    if jobs == 0 {
        return Err(CliError::Usage("jobs must be >= 1".into()));
    }
    Ok(Effective {
        overrides,
        out,
        format,
        jobs,
    })
}

fn validate_overrides(ovr: &Overrides) -> Result<(), CliError> {
    let positive = |name: &str, v: Option<f64>| match v {
        Some(x) if x <= 0.0 => Err(CliError::Usage(format!("{name} must be > 0, got {x}"))),
        _ => Ok(()),
    };
    positive("period-ms", ovr.period_ms)?;
    positive("duration-ms", ovr.duration_ms)?;
    positive("tick-ms", ovr.tick_ms)?;
    positive("kappa", ovr.kappa)?;
    if let Some(theta) = ovr.theta_ppm {
        if theta < 0.0 {
            return Err(CliError::Usage(format!("theta-ppm must be >= 0, got {theta}")));
        }
    }
    if let Some(scs_list) = &ovr.scs {
        for &scs in scs_list {
            if Numerology::from_scs_khz(scs).is_err() {
                return Err(CliError::Usage(format!(
                    "scs must be one of 15/30/60/120 kHz, got {scs}"
                )));
            }
        }
    }
    if ovr.samples == Some(0) {
        return Err(CliError::Usage("samples must be >= 1".into()));
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), CliError> {
    let eff = effective_settings(&cli)?;
    match cli.command {
        Command::Simulate => run_simulate(&eff),
        Command::All => {
            for id in ExperimentId::all() {
                run_one(id, &eff)?;
            }
            Ok(())
        }
        Command::Table1 => run_one(ExperimentId::Table1, &eff),
        Command::Fig4 => run_one(ExperimentId::Fig4, &eff),
        Command::Fig5 => run_one(ExperimentId::Fig5, &eff),
        Command::Fig6 => run_one(ExperimentId::Fig6, &eff),
        Command::Fig7 => run_one(ExperimentId::Fig7, &eff),
        Command::Capacity => run_one(ExperimentId::Capacity, &eff),
    }
}

fn run_one(id: ExperimentId, eff: &Effective) -> Result<(), CliError> {
    let result = run_experiment(id, &eff.overrides, eff.jobs)?;
    for line in result.summary_lines() {
        println!("{line}");
    }
    let written = result.write(&eff.out, eff.format)?;
    for path in written {
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn run_simulate(eff: &Effective) -> Result<(), CliError> {
    let ovr = &eff.overrides;
    let scs = match ovr.scs.as_deref() {
        None => 15,
        Some([single]) => *single,
        Some(_) => {
            return Err(CliError::Usage(
                "simulate takes a single --scs value".into(),
            ))
        }
    };
    let numerology =
        Numerology::from_scs_khz(scs).map_err(|e| CliError::Usage(e.to_string()))?;
    let kappa = ovr.kappa.unwrap_or(2.0);
    let toa = match ovr.toa {
        Some(otasync::experiments::ToaKind::Table) => otasync::ToaModel::Table3gpp,
        _ => otasync::ToaModel::Gaussian { kappa },
    };
    let cfg = SimConfig {
        theta_ppm: ovr.theta_ppm.unwrap_or(10.0),
        sync_period_ms: ovr.period_ms.unwrap_or(60.0),
        duration_ms: ovr.duration_ms.unwrap_or(600.0),
        tick_ms: ovr.tick_ms,
        seed: ovr.seed.unwrap_or(DEFAULT_SEED),
        numerology,
        errors: ErrorConfig {
            tae_bound_ns: 65.0,
            rtge: ovr.granularity.unwrap_or(RtgeGranularity::Range {
                lo: 10.0,
                hi: 300.0,
            }),
            toa,
            correction: ovr.correction.unwrap_or(Correction::None),
            true_pd_ns: None,
            pd_mode: PdMode::TaBased,
        },
    };
    let trace = simulate(&cfg).map_err(|e| CliError::Usage(e.to_string()))?;
    println!(
        "simulate: {} kHz, period {} ms, {} samples, max |x_td| = {:.1} ns, {} saturated syncs",
        scs,
        cfg.sync_period_ms,
        trace.len(),
        trace.path_max_abs_ns(),
        trace.saturation_events,
    );
    let meta = RunMeta::new(
        "simulate",
        cfg.seed,
        None,
        serde_json::to_value(&cfg).expect("config serializes"),
    );
    let data = serde_json::to_value(&trace).expect("trace serializes");
    let written = write_outputs(&eff.out, "simulate", &meta, &trace.to_csv(), &data, eff.format)?;
    for path in written {
        println!("wrote {}", path.display());
    }
    Ok(())
}
