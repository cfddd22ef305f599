use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use localgp::format;
use localgp::harness::pipeline::{predict_points, train_dataset, train_csv};
use localgp::harness::{benchmark, load_csv, Config, Dataset, EvalReport, Schema, TimeStats, TrainingStats};
use localgp::{Error, InformationState, InformationView, PredictOptions, PredictionResult, Result};

#[derive(Parser)]
#[command(name = "localgp", version, about = "Local Gaussian process regression with finite-support basis functions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train on a CSV file (inputs then target) and write a model file.
    Train {
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Overrides the configured worker count.
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Predict mean and variance at the points of a CSV file.
    Predict {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        points: PathBuf,
        /// Output CSV; standard output when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Supplies jitter policy and worker count.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Predict at a labelled CSV file and report SMAE, SMSE and MSLL.
    Evaluate {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        data: PathBuf,
        /// Training data, for the reference mean and variance of the metrics.
        #[arg(long)]
        train_data: Option<PathBuf>,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
    /// Time repeated training and single-point predictions.
    Benchmark {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        data: PathBuf,
        /// Test points; labelled files are also scored.
        #[arg(long)]
        points: PathBuf,
        #[arg(long, default_value_t = 10)]
        repetitions: usize,
        #[arg(long)]
        json: bool,
    },
    /// Print a model or configuration summary.
    Info {
        #[arg(long, conflicts_with = "config", required_unless_present = "config")]
        model: Option<PathBuf>,
        #[arg(long)]
        config: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn run(cmd: Command) -> Result<()> {
    match cmd {
        Command::Train { data, config, out, workers } => {
            let mut cfg = Config::load(&config)?;
            if let Some(w) = workers {
                cfg.workers = w;
                cfg.validate()?;
            }
            let st = train_csv(&data, &cfg)?;
            format::save(&out, &st)?;
            eprintln!(
                "trained on {} rows: {} basis functions, {} information entries",
                st.n_measurements(),
                st.grid().len(),
                st.imat_nnz()
            );
            Ok(())
        }
        Command::Predict { model, points, out, config, workers } => {
            let st = format::load(&model)?;
            let (opts, w) = runtime(config.as_deref(), workers)?;
            let (pts, _) = load_points(&points, st.grid().dim())?;
            let res = predict_points(&st, &pts.inputs(), &opts, w)?;
            write_predictions(out.as_deref(), &pts, &res)?;
            for warning in EvalReport::from_predictions(&res).warnings {
                eprintln!("warning: {warning}");
            }
            Ok(())
        }
        Command::Evaluate { model, data, train_data, config, out, json } => {
            let st = format::load(&model)?;
            let (opts, w) = runtime(config.as_deref(), None)?;
            let (pts, labelled) = load_points(&data, st.grid().dim())?;
            if !labelled {
                return Err(Error::Dataset(format!("{}: no target column", data.display())));
            }
            let res = predict_points(&st, &pts.inputs(), &opts, w)?;
            let mut report = EvalReport::from_predictions(&res);
            let train = reference_stats(&st, train_data.as_deref(), pts.targets(), &mut report)?;
            report.score(&res, pts.targets(), train, st.hyper().noise_variance())?;
            if out.is_some() {
                write_predictions(out.as_deref(), &pts, &res)?;
            }
            print_report(&report, json)
        }
        Command::Benchmark { config, data, points, repetitions, json } => {
            let cfg = Config::load(&config)?;
            let ds = load_csv(&data, Schema::WithTarget)?;
            let reps = repetitions.max(1);
            let mut train_times = Vec::with_capacity(reps);
            let mut st = None;
            for _ in 0..reps {
                let t0 = Instant::now();
                let trained = train_dataset(&ds, &cfg)?;
                train_times.push(t0.elapsed().as_secs_f64());
                st = Some(trained);
            }
            let st = st.expect("at least one repetition");
            let (pts, labelled) = load_points(&points, st.grid().dim())?;
            let mut report = benchmark(&st, &pts.inputs(), reps, &cfg.predict_options())?;
            report.train_time = Some(TimeStats::from_samples(&train_times));
            if labelled {
                let res = predict_points(&st, &pts.inputs(), &cfg.predict_options(), 1)?;
                let train = TrainingStats::from_targets(ds.targets())?;
                report.score(&res, pts.targets(), train, st.hyper().noise_variance())?;
            }
            print_report(&report, json)
        }
        Command::Info { model, config } => {
            if let Some(path) = config {
                let cfg = Config::load(&path)?;
                print!("{}", cfg.to_toml());
                return Ok(());
            }
            let st = format::load(model.expect("clap enforces one of model/config"))?;
            print_info(&st);
            Ok(())
        }
    }
}

fn runtime(config: Option<&Path>, workers: Option<usize>) -> Result<(PredictOptions, usize)> {
    let (opts, mut w) = match config {
        Some(p) => {
            let cfg = Config::load(p)?;
            (cfg.predict_options(), cfg.workers)
        }
        None => (PredictOptions::default(), 1),
    };
    if let Some(n) = workers {
        if n == 0 {
            return Err(Error::Config("workers must be at least 1".into()));
        }
        w = n;
    }
    Ok((opts, w))
}

/// Loads a CSV with `d` input columns and an optional target column.
fn load_points(path: &Path, d: usize) -> Result<(Dataset, bool)> {
    let raw = load_csv(path, Schema::InputsOnly)?;
    if raw.dim() == d {
        return Ok((raw, false));
    }
    if raw.dim() == d + 1 {
        return Ok((load_csv(path, Schema::WithTarget)?, true));
    }
    Err(Error::Dataset(format!(
        "{}: {} columns, model expects {d} inputs optionally followed by a target",
        path.display(),
        raw.dim()
    )))
}

fn reference_stats(
    st: &InformationState,
    train_data: Option<&Path>,
    test_targets: &[f64],
    report: &mut EvalReport,
) -> Result<TrainingStats> {
    if let Some(p) = train_data {
        let ds = load_csv(p, Schema::WithTarget)?;
        return TrainingStats::from_targets(ds.targets());
    }
    report.warnings.push("no training data given; MSLL reference variance taken from test targets about the model mean".into());
    let mean = st.y_mean();
    let variance = test_targets.iter().map(|t| (t - mean) * (t - mean)).sum::<f64>() / test_targets.len() as f64;
    Ok(TrainingStats { mean, variance })
}

fn write_predictions(out: Option<&Path>, pts: &Dataset, res: &[PredictionResult]) -> Result<()> {
    let sink: Box<dyn Write> = match out {
        Some(p) => Box::new(File::create(p)?),
        None => Box::new(io::stdout().lock()),
    };
    let mut w = BufWriter::new(sink);
    let header: Vec<String> = (1..=pts.dim()).map(|k| format!("x{k}")).collect();
    writeln!(w, "{},mean,variance", header.join(","))?;
    for (i, r) in res.iter().enumerate() {
        for v in pts.input(i) {
            write!(w, "{v:.16e},")?;
        }
        writeln!(w, "{:.16e},{:.16e}", r.mean, r.variance)?;
    }
    w.flush()?;
    Ok(())
}

fn print_report(report: &EvalReport, json: bool) -> Result<()> {
    if json {
        let text = serde_json::to_string_pretty(report).map_err(|e| Error::Format(e.to_string()))?;
        println!("{text}");
    } else {
        print!("{report}");
    }
    Ok(())
}

fn print_info(st: &InformationState) {
    let g = st.grid();
    let hp = st.hyper();
    println!("dimension: {}", g.dim());
    println!("grid lower corner: {:?}", g.lower());
    println!("grid spacing: {}", g.spacing());
    println!("grid counts: {:?} ({} basis functions)", g.counts(), g.len());
    println!("sigma_se: {}", hp.sigma_se());
    println!("lengthscales: {:?}", hp.lengthscales());
    println!("sigma_y: {}", hp.sigma_y());
    println!("r: {}", hp.r());
    println!("r_star: {}", hp.r_star());
    println!("y_mean: {}", st.y_mean());
    println!("measurements: {}", st.n_measurements());
    println!("information vector entries: {}", st.iota_nnz());
    println!("information matrix entries: {}", st.imat_nnz());
}
