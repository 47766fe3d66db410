//! `vitalcfar` command-line tool.
//!
//! Exit codes: 0 success, 1 usage or configuration error, 2 data-format
//! error, 3 CFAR backend mismatch.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use vitalcfar::bench::{self, BenchReport};
use vitalcfar::cfar::{Backend, Execution};
use vitalcfar::config_file::RunConfig;
use vitalcfar::export::{self, BenchJson};
use vitalcfar::{frame_file, pipeline, synth, Error};

#[derive(Parser)]
#[command(name = "vitalcfar", version, about = "UWB radar respiration detection with 2D CA-CFAR")]
struct Cli {
    /// Worker threads for CFAR thresholding (1 = sequential).
    #[arg(long, global = true, default_value_t = 1)]
    threads: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Render a synthetic frame file and print its ground truth.
    Synth {
        /// Output frame file.
        output: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
        /// Overrides the config's seed.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Run the detection chain on a frame file.
    Detect {
        frame: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, value_enum)]
        backend: Option<BackendArg>,
        /// Detections CSV (stdout when omitted).
        #[arg(long)]
        out_detections: Option<PathBuf>,
        /// Band power map as a binary PGM.
        #[arg(long)]
        out_heatmap: Option<PathBuf>,
        /// Also write detection cells next to the heatmap as `<heatmap>.marks.csv`.
        #[arg(long, requires = "out_heatmap")]
        marks: bool,
    },
    /// Time the CFAR backends or the pipeline stages.
    Bench {
        #[arg(long, value_enum, default_value_t = Mode::Cfar)]
        mode: Mode,
        #[arg(long)]
        config: Option<PathBuf>,
        /// Report file (stdout when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        /// Seed for the benchmark input; defaults to the config's scene seed.
        #[arg(long)]
        seed: Option<u64>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum BackendArg {
    Naive,
    Ii,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Mode {
    Cfar,
    Pipeline,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Csv,
    Json,
}

fn load_config(path: Option<&Path>) -> vitalcfar::Result<RunConfig> {
    match path {
        Some(p) => RunConfig::load(p),
        None => Ok(RunConfig::default()),
    }
}

fn output(path: Option<&Path>) -> io::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(io::stdout().lock()),
    })
}

fn marks_path(heatmap: &Path) -> PathBuf {
    let mut name = heatmap.as_os_str().to_owned();
    name.push(".marks.csv");
    PathBuf::from(name)
}

fn run(cli: Cli) -> vitalcfar::Result<()> {
    let execution = if cli.threads > 1 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cli.threads)
            .build_global()
            .map_err(|e| Error::Config(e.to_string()))?;
        Execution::Parallel
    } else {
        Execution::Sequential
    };

    match cli.command {
        Command::Synth { output, config, seed } => {
            let mut cfg = load_config(config.as_deref())?;
            if let Some(seed) = seed {
                cfg.scene.seed = seed;
            }
            let (frame, truth) = synth::generate_scene(&cfg.scene)?;
            frame_file::save_frame(&frame, &output)?;
            println!(
                "target_bin={} resp_freq_hz={} wall_bin={} target_range_m={}",
                truth.target_bin, truth.resp_freq_hz, truth.wall_bin, cfg.scene.target_range_m
            );
        }
        Command::Detect {
            frame,
            config,
            backend,
            out_detections,
            out_heatmap,
            marks,
        } => {
            let mut cfg = load_config(config.as_deref())?;
            if let Some(b) = backend {
                cfg.pipeline.backend = match b {
                    BackendArg::Naive => Backend::Naive,
                    BackendArg::Ii => Backend::IntegralImage,
                };
            }
            cfg.pipeline.execution = execution;
            let frame = frame_file::load_frame(&frame)?;
            let (band, result) = pipeline::detect(&frame, &cfg.pipeline)?;
            export::write_detections_csv(&band, &result, output(out_detections.as_deref())?)?;
            if let Some(path) = out_heatmap {
                export::write_heatmap_pgm(&band, BufWriter::new(File::create(&path)?))?;
                if marks {
                    export::write_marks_csv(&result, BufWriter::new(File::create(marks_path(&path))?))?;
                }
            }
            eprintln!(
                "{} detections on a {}x{} band map ({})",
                result.len(),
                band.power.nrows(),
                band.power.ncols(),
                cfg.pipeline.backend.label()
            );
        }
        Command::Bench {
            mode,
            config,
            out,
            format,
            seed,
        } => {
            let mut cfg = load_config(config.as_deref())?;
            cfg.bench.execution = execution;
            cfg.pipeline.execution = execution;
            let seed = seed.unwrap_or(cfg.scene.seed);
            let mut report = BenchReport {
                environment: bench::environment_note(),
                execution,
                ..BenchReport::default()
            };
            match mode {
                Mode::Cfar => report.cfar_rows = bench::bench_cfar(&cfg.bench, seed)?,
                Mode::Pipeline => {
                    cfg.scene.seed = seed;
                    let (frame, _) = synth::generate_scene(&cfg.scene)?;
                    report.steps = bench::bench_pipeline(&frame, &cfg.pipeline, cfg.bench.repetitions, cfg.bench.warmup)?;
                }
            }
            let mut out = output(out.as_deref())?;
            let mode_name = if mode == Mode::Cfar { "cfar" } else { "pipeline" };
            match (format, mode) {
                (Format::Text, _) => out.write_all(report.to_text().as_bytes())?,
                (Format::Csv, Mode::Cfar) => export::write_cfar_csv(&report.cfar_records(), &mut out)?,
                (Format::Csv, Mode::Pipeline) => export::write_steps_csv(&report.step_records(), &mut out)?,
                (Format::Json, Mode::Cfar) => export::write_json(
                    &BenchJson {
                        mode: mode_name.into(),
                        environment: report.environment.clone(),
                        rows: report.cfar_records(),
                    },
                    &mut out,
                )?,
                (Format::Json, Mode::Pipeline) => export::write_json(
                    &BenchJson {
                        mode: mode_name.into(),
                        environment: report.environment.clone(),
                        rows: report.step_records(),
                    },
                    &mut out,
                )?,
            }
            out.flush()?;
        }
    }
    Ok(())
}

fn exit_code(err: &Error) -> u8 {
    match err.root() {
        Error::Format(_) => 2,
        Error::BackendMismatch { .. } => 3,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
