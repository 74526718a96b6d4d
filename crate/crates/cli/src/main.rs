mod config;

use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use photon_link::channel::{read_counts_csv, write_channel_csv, write_counts_csv};
use photon_link::link::{
    run_uncoded_on, write_bin_sweep_csv, write_coded_ber_csv, ExperimentReport, Parameters,
    SamplingSpec, SweepSpec,
};
use photon_link::{
    build_channel_matrix, joint_from_counts, max_mutual_information, mutual_information,
    run_coded_experiment, sent_photon_capacity, sweep_bin_sizes, DecoderAlgorithm, LdpcCode,
};
use serde::Serialize;

use config::{RunConfig, Setup};

#[derive(Debug, Parser)]
#[command(
    name = "photon-link",
    version,
    about = "Spatially encoded single-photon link simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Sample the symbol channel and measure mutual information.
    Simulate(SimulateArgs),
    /// Information limit, hit probability and exact MI per bin size.
    SweepBins(SweepArgs),
    /// Coded BER of the LDPC code over a binary symmetric channel.
    CodedBer(CodedArgs),
    /// Mutual information of a recorded `sent,received,count` table.
    Mi(MiArgs),
}

#[derive(Debug, Args)]
struct Common {
    /// TOML run configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads.
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long)]
    bin_size: Option<usize>,
    /// Detector size in pixels, `WIDTHxHEIGHT`.
    #[arg(long, value_parser = parse_detector)]
    detector: Option<(usize, usize)>,
    #[arg(long)]
    events: Option<u64>,
    /// Signal-to-dark count ratio.
    #[arg(long)]
    ratio: Option<f64>,
    /// Also write the model channel as `channel.csv`.
    #[arg(long)]
    export_channel: bool,
    #[arg(long)]
    export_floor: Option<f64>,
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[command(flatten)]
    common: Common,
    /// Comma-separated bin sizes.
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    bins: Option<Vec<usize>>,
    #[arg(long, value_parser = parse_detector)]
    detector: Option<(usize, usize)>,
    /// Add sampled MI at each bin size.
    #[arg(long)]
    sampled: bool,
}

#[derive(Debug, Args)]
struct CodedArgs {
    #[command(flatten)]
    common: Common,
    /// Comma-separated crossover probabilities.
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    crossovers: Option<Vec<f64>>,
    #[arg(long)]
    frames: Option<usize>,
    /// `normalized-min-sum` or `sum-product`.
    #[arg(long, value_parser = parse_algorithm)]
    algorithm: Option<DecoderAlgorithm>,
    #[arg(long)]
    max_iterations: Option<usize>,
}

#[derive(Debug, Args)]
struct MiArgs {
    #[command(flatten)]
    common: Common,
    /// Count table to replay.
    counts: PathBuf,
}

fn parse_detector(s: &str) -> Result<(usize, usize), String> {
    let (w, h) = s
        .split_once(['x', 'X'])
        .ok_or_else(|| format!("expected WIDTHxHEIGHT, got `{s}`"))?;
    let px = |v: &str| v.trim().parse::<usize>().map_err(|e| format!("`{v}`: {e}"));
    Ok((px(w)?, px(h)?))
}

fn parse_algorithm(s: &str) -> Result<DecoderAlgorithm, String> {
    match s {
        "normalized-min-sum" | "min-sum" => Ok(DecoderAlgorithm::NormalizedMinSum),
        "sum-product" => Ok(DecoderAlgorithm::SumProduct),
        _ => Err(format!("unknown algorithm `{s}`")),
    }
}

#[derive(Debug)]
enum CliError {
    Config(String),
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    Internal(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Io { .. } => 3,
            CliError::Internal(_) => 4,
        }
    }

    fn io(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
        move |source| CliError::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    fn internal(e: impl std::fmt::Display) -> CliError {
        CliError::Internal(e.to_string())
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Io { path, source } => write!(f, "{}: {source}", path.display()),
            CliError::Internal(m) => write!(f, "internal error: {m}"),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("photon-link: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn load_config(common: &Common) -> Result<RunConfig, CliError> {
    let mut cfg = match &common.config {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(CliError::io(path))?;
            RunConfig::parse(&text)
                .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?
        }
        None => RunConfig::default(),
    };
    if let Some(seed) = common.seed {
        cfg.seed = seed;
    }
    if let Some(out) = &common.out {
        cfg.out = out.clone();
    }
    if common.threads.is_some() {
        cfg.threads = common.threads;
    }
    Ok(cfg)
}

fn run(command: Command) -> Result<(), CliError> {
    let (cfg, job): (RunConfig, Job) = match command {
        Command::Simulate(a) => {
            let mut cfg = load_config(&a.common)?;
            if let Some(b) = a.bin_size {
                cfg.detector.bin_size = b;
            }
            if let Some((w, h)) = a.detector {
                cfg.detector.width = w;
                cfg.detector.height = h;
            }
            if let Some(e) = a.events {
                cfg.simulate.events_per_symbol = e;
            }
            if let Some(r) = a.ratio {
                cfg.noise.signal_to_dark_ratio = r;
            }
            if a.export_channel {
                cfg.simulate.export_channel = true;
            }
            if let Some(f) = a.export_floor {
                cfg.simulate.export_floor = f;
            }
            cfg.check_simulate().map_err(CliError::Config)?;
            (cfg, Job::Simulate)
        }
        Command::SweepBins(a) => {
            let mut cfg = load_config(&a.common)?;
            if let Some(bins) = a.bins {
                cfg.sweep.bin_sizes = bins;
            }
            if let Some((w, h)) = a.detector {
                cfg.detector.width = w;
                cfg.detector.height = h;
            }
            if a.sampled {
                cfg.sweep.sampled = true;
            }
            cfg.check_sweep().map_err(CliError::Config)?;
            (cfg, Job::Sweep)
        }
        Command::CodedBer(a) => {
            let mut cfg = load_config(&a.common)?;
            if let Some(c) = a.crossovers {
                cfg.coded.crossovers = c;
            }
            if let Some(f) = a.frames {
                cfg.coded.frames_per_point = f;
            }
            if let Some(alg) = a.algorithm {
                cfg.decoder.algorithm = alg;
            }
            if let Some(it) = a.max_iterations {
                cfg.decoder.max_iterations = it;
            }
            cfg.check_coded().map_err(CliError::Config)?;
            (cfg, Job::Coded)
        }
        Command::Mi(a) => {
            let cfg = load_config(&a.common)?;
            (cfg, Job::Mi(a.counts))
        }
    };
    let setup = cfg.setup().map_err(CliError::Config)?;

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.threads.unwrap_or(0))
        .build()
        .map_err(CliError::internal)?;
    let outputs = pool.install(|| job.run(&cfg, &setup))?;

    fs::create_dir_all(&cfg.out).map_err(CliError::io(&cfg.out))?;
    write_file(&cfg.out.join("config.toml"), cfg.to_toml().as_bytes())?;
    for (name, bytes) in outputs {
        write_file(&cfg.out.join(name), &bytes)?;
    }
    Ok(())
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let mut w = BufWriter::new(File::create(path).map_err(CliError::io(path))?);
    w.write_all(bytes)
        .and_then(|_| w.flush())
        .map_err(CliError::io(path))
}

/// Files produced by a subcommand, written only after it succeeds.
type Outputs = Vec<(&'static str, Vec<u8>)>;

enum Job {
    Simulate,
    Sweep,
    Coded,
    Mi(PathBuf),
}

#[derive(Serialize)]
struct SimulateReport {
    experiment: &'static str,
    seed: u64,
    n_symbols: usize,
    events_per_symbol: u64,
    detections: u64,
    mi_bits: f64,
    expected_mi_bits: f64,
    max_bits: f64,
    throughput: f64,
    capacity_sent_bits: f64,
    expected_capacity_sent_bits: f64,
    parameters: Parameters,
}

#[derive(Serialize)]
struct MiReport {
    experiment: &'static str,
    seed: u64,
    n_sent: usize,
    n_received: usize,
    detections: u64,
    mi_bits: f64,
    max_bits: f64,
    throughput: f64,
    capacity_sent_bits: f64,
}

fn json<T: Serialize>(value: &T) -> Vec<u8> {
    let mut s = serde_json::to_string_pretty(value).expect("report serializes");
    s.push('\n');
    s.into_bytes()
}

fn key_values(pairs: &[(&str, String)]) -> Vec<u8> {
    pairs
        .iter()
        .map(|(k, v)| format!("{k} = {v}\n"))
        .collect::<String>()
        .into_bytes()
}

impl Job {
    fn run(&self, cfg: &RunConfig, setup: &Setup) -> Result<Outputs, CliError> {
        match self {
            Job::Simulate => simulate(cfg, setup),
            Job::Sweep => sweep(cfg, setup),
            Job::Coded => coded(cfg, setup),
            Job::Mi(path) => mi(path, cfg, setup),
        }
    }
}

fn simulate(cfg: &RunConfig, setup: &Setup) -> Result<Outputs, CliError> {
    let channel =
        build_channel_matrix(&setup.grid, &setup.psf, &setup.noise).map_err(CliError::internal)?;
    let events = cfg.simulate.events_per_symbol;
    let result = run_uncoded_on(&channel, events, cfg.seed).map_err(CliError::internal)?;
    let n = setup.grid.n_symbols();
    let capacity = |mi| sent_photon_capacity(mi, &setup.losses).map_err(CliError::internal);
    let report = SimulateReport {
        experiment: "simulate",
        seed: cfg.seed,
        n_symbols: n,
        events_per_symbol: events,
        detections: result.counts.total(),
        mi_bits: result.sampled_mi,
        expected_mi_bits: result.expected_mi,
        max_bits: max_mutual_information(n).map_err(CliError::internal)?,
        throughput: setup.losses.throughput(),
        capacity_sent_bits: capacity(result.sampled_mi)?,
        expected_capacity_sent_bits: capacity(result.expected_mi)?,
        parameters: Parameters {
            grid: Some(setup.grid),
            psf: Some(setup.psf),
            signal_to_dark_ratio: Some(setup.noise.signal_to_dark_ratio),
            events_per_symbol: Some(events),
            seed: Some(cfg.seed),
            ..Default::default()
        },
    };
    let text = key_values(&[
        ("seed", report.seed.to_string()),
        ("n_symbols", report.n_symbols.to_string()),
        ("events_per_symbol", report.events_per_symbol.to_string()),
        ("detections", report.detections.to_string()),
        ("mi_bits", report.mi_bits.to_string()),
        ("expected_mi_bits", report.expected_mi_bits.to_string()),
        ("max_bits", report.max_bits.to_string()),
        ("throughput", report.throughput.to_string()),
        ("capacity_sent_bits", report.capacity_sent_bits.to_string()),
        (
            "expected_capacity_sent_bits",
            report.expected_capacity_sent_bits.to_string(),
        ),
    ]);

    let mut counts = Vec::new();
    write_counts_csv(&mut counts, &result.counts).map_err(CliError::internal)?;
    let mut outputs: Outputs = vec![
        ("joint_counts.csv", counts),
        ("report.json", json(&report)),
        ("report.txt", text),
    ];
    if cfg.simulate.export_channel {
        let mut buf = Vec::new();
        write_channel_csv(&mut buf, &channel, cfg.simulate.export_floor)
            .map_err(CliError::internal)?;
        outputs.push(("channel.csv", buf));
    }
    Ok(outputs)
}

fn sweep(cfg: &RunConfig, setup: &Setup) -> Result<Outputs, CliError> {
    let spec = SweepSpec {
        bin_sizes: cfg.sweep.bin_sizes.clone(),
        detector_width: cfg.detector.width,
        detector_height: cfg.detector.height,
        psf: setup.psf,
        ratio_low: cfg.noise.ratio_low,
        ratio_high: cfg.noise.ratio_high,
        sampling: cfg.sweep.sampled.then_some(SamplingSpec {
            signal_to_dark_ratio: setup.noise.signal_to_dark_ratio,
            events_per_symbol: cfg.simulate.events_per_symbol,
            seed: cfg.seed,
        }),
    };
    let mut report = sweep_bin_sizes(&spec).map_err(CliError::internal)?;
    report.parameters.seed = Some(cfg.seed);
    let mut csv = Vec::new();
    write_bin_sweep_csv(&mut csv, &report.sweep).map_err(CliError::internal)?;
    Ok(vec![
        ("bin_sweep.csv", csv),
        ("report.json", report_json(&report)),
    ])
}

fn coded(cfg: &RunConfig, setup: &Setup) -> Result<Outputs, CliError> {
    let code = LdpcCode::dvb_s2_rate_half()
        .with_decoder(setup.decoder)
        .map_err(CliError::internal)?;
    let report = run_coded_experiment(
        &cfg.coded.crossovers,
        cfg.coded.frames_per_point,
        &code,
        cfg.seed,
    )
    .map_err(CliError::internal)?;
    let mut csv = Vec::new();
    write_coded_ber_csv(&mut csv, &report.coded).map_err(CliError::internal)?;
    Ok(vec![
        ("coded_ber.csv", csv),
        ("report.json", report_json(&report)),
    ])
}

fn report_json(report: &ExperimentReport) -> Vec<u8> {
    report.to_json().into_bytes()
}

fn mi(path: &Path, cfg: &RunConfig, setup: &Setup) -> Result<Outputs, CliError> {
    let file = File::open(path).map_err(CliError::io(path))?;
    let counts = read_counts_csv(BufReader::new(file), None).map_err(|e| match e {
        photon_link::ChannelError::Io(source) => CliError::Io {
            path: path.to_path_buf(),
            source,
        },
        other => CliError::Config(format!("{}: {other}", path.display())),
    })?;
    let joint = joint_from_counts(&counts)
        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    let mi_bits = mutual_information(&joint);
    let report = MiReport {
        experiment: "mi",
        seed: cfg.seed,
        n_sent: counts.n_sent(),
        n_received: counts.n_received(),
        detections: counts.total(),
        mi_bits,
        max_bits: max_mutual_information(counts.n_sent().min(counts.n_received()))
            .map_err(CliError::internal)?,
        throughput: setup.losses.throughput(),
        capacity_sent_bits: sent_photon_capacity(mi_bits, &setup.losses)
            .map_err(CliError::internal)?,
    };
    let text = key_values(&[
        ("n_sent", report.n_sent.to_string()),
        ("n_received", report.n_received.to_string()),
        ("detections", report.detections.to_string()),
        ("mi_bits", report.mi_bits.to_string()),
        ("max_bits", report.max_bits.to_string()),
        ("throughput", report.throughput.to_string()),
        ("capacity_sent_bits", report.capacity_sent_bits.to_string()),
    ]);
    print!("{}", String::from_utf8_lossy(&text));
    Ok(vec![("report.json", json(&report)), ("report.txt", text)])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn detector_flag() {
        assert_eq!(parse_detector("648x648").unwrap(), (648, 648));
        assert_eq!(parse_detector("896X648").unwrap(), (896, 648));
        assert!(parse_detector("896").is_err());
        assert!(parse_detector("ax2").is_err());
    }

    #[test]
    fn algorithm_flag() {
        assert_eq!(
            parse_algorithm("sum-product").unwrap(),
            DecoderAlgorithm::SumProduct
        );
        assert!(parse_algorithm("bp").is_err());
    }
}
