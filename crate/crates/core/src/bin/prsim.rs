use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use pragmatic_rsa::harness::{
    self, evaluate_repeats, gain_report, lambda_sweep, load_policies, prepare_dataset,
    run_experiment, train_repeats, write_checkpoints, write_outputs, write_sweep, AccuracyReport,
    Disparity, ExperimentConfig, ExportFormat, ShiftReport, Slice, SpeakerKind, DEFAULT_RATIO_GRID,
};
use pragmatic_rsa::scenes::save_dataset;
use pragmatic_rsa::{load_taxonomy, Error, Mode, Taxonomy};

#[derive(Parser)]
#[command(
    name = "prsim",
    version,
    about = "Speaker/listener reference game simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a dataset and write it as dataset.jsonl.
    GenData(Common),
    /// Train the disparity layer once per repeat.
    Train(Common),
    /// Evaluate all four speakers and write accuracy reports.
    Eval(WithPolicies),
    /// Word-distribution shift of each speaker.
    Shift(WithPolicies),
    /// Sweep the lambda_l:lambda_d ratio grid.
    Sweep(Common),
    /// Full run: train, evaluate, shift and checkpoints.
    Report(Common),
}

#[derive(Args)]
struct WithPolicies {
    #[command(flatten)]
    common: Common,
    /// Directory with policy_<r>.json checkpoints; trains afresh if omitted.
    #[arg(long)]
    policies: Option<PathBuf>,
}

#[derive(Args)]
struct Common {
    /// TOML config file; flags below override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    pairs: Option<usize>,
    #[arg(long)]
    hard_fraction: Option<f64>,
    #[arg(long)]
    mode: Option<Mode>,
    #[arg(long)]
    disparity: Option<Disparity>,
    #[arg(long)]
    lambda_l: Option<f64>,
    #[arg(long)]
    lambda_d: Option<f64>,
    #[arg(long)]
    epochs: Option<usize>,
    #[arg(long)]
    batch: Option<usize>,
    #[arg(long)]
    lr: Option<f64>,
    #[arg(long)]
    lr_scale: Option<f64>,
    #[arg(long)]
    patience: Option<usize>,
    #[arg(long)]
    repeats: Option<usize>,
    /// Read pairs from this dataset file instead of generating them.
    #[arg(long)]
    dataset: Option<PathBuf>,
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

impl Common {
    fn resolve(&self) -> Result<ExperimentConfig, Error> {
        let mut c = match &self.config {
            Some(path) => ExperimentConfig::from_file(path)?,
            None => ExperimentConfig::default(),
        };
        macro_rules! set {
            ($($flag:ident => $field:ident),* $(,)?) => {
                $(if let Some(v) = self.$flag.clone() { c.$field = v.into(); })*
            };
        }
        set!(
            seed => seed, pairs => n_pairs, hard_fraction => hard_fraction, mode => mode,
            disparity => disparity, lambda_l => lambda_l, lambda_d => lambda_d,
            epochs => epochs, batch => batch_size, lr => lr, lr_scale => lr_scale,
            patience => patience, repeats => n_repeats, dataset => dataset,
        );
        Ok(c)
    }
}

fn print_accuracy(acc: &AccuracyReport) {
    println!("{:<6}{:>18}{:>18}{:>18}", "", "Hard", "Easy", "Combined");
    for kind in SpeakerKind::ALL {
        print!("{kind:<6}");
        for slice in Slice::ALL {
            let s = acc.get(kind, slice);
            print!("{:>18}", format!("{:.4} ± {:.4}", s.mean, s.std));
        }
        println!();
    }
}

fn print_shift(shift: &ShiftReport) {
    println!(
        "{:<6}{:>12}{:>12}{:>12}",
        "", "hyponym", "hypernym", "animal"
    );
    for s in &shift.speakers {
        println!(
            "{:<6}{:>12.4}{:>12.4}{:>12.4}",
            s.speaker, s.hyponym_share.mean, s.hypernym_share.mean, s.animal_token_share.mean
        );
    }
}

fn policies_for(
    config: &ExperimentConfig,
    dataset: &pragmatic_rsa::Dataset,
    dir: Option<&Path>,
    tax: &Taxonomy,
) -> Result<Vec<pragmatic_rsa::DisparityPolicy>, Error> {
    match dir {
        Some(dir) => load_policies(dir, config.n_repeats, tax),
        None => Ok(train_repeats(config, dataset, tax)?
            .into_iter()
            .map(|(p, _)| p)
            .collect()),
    }
}

fn run(cli: Cli, tax: &Taxonomy) -> Result<(), Error> {
    match cli.command {
        Command::GenData(common) => {
            let config = common.resolve()?;
            config.validate(tax)?;
            let ds = prepare_dataset(&config, tax)?;
            write_outputs(&common.out, |dir| {
                save_dataset(&ds, dir.join("dataset.jsonl"), tax)
            })?;
            println!(
                "{} pairs ({} train, {} val, {} test) -> {}",
                ds.len(),
                ds.train.len(),
                ds.val.len(),
                ds.test.len(),
                common.out.join("dataset.jsonl").display()
            );
        }
        Command::Train(common) => {
            let config = common.resolve()?;
            config.validate(tax)?;
            let ds = prepare_dataset(&config, tax)?;
            let trained = train_repeats(&config, &ds, tax)?;
            let (policies, histories): (Vec<_>, Vec<_>) = trained.into_iter().unzip();
            write_outputs(&common.out, |dir| {
                write_checkpoints(dir, &policies, &histories, tax)
            })?;
            for (r, h) in histories.iter().enumerate() {
                let best = policies[r].schedule.best_val_accuracy;
                println!("repeat {r}: best val {best:.4} at epoch {:?}", h.best_epoch);
            }
        }
        Command::Eval(WithPolicies { common, policies }) => {
            let config = common.resolve()?;
            config.validate(tax)?;
            let ds = prepare_dataset(&config, tax)?;
            let policies = policies_for(&config, &ds, policies.as_deref(), tax)?;
            let runs = evaluate_repeats(&config, &ds, &policies, tax)?;
            let acc = AccuracyReport::from_runs(&runs)?;
            let gains = gain_report(&acc);
            write_outputs(&common.out, |dir| {
                harness::export(&acc, ExportFormat::Csv, dir.join("accuracy.csv"))?;
                harness::export(&acc, ExportFormat::Json, dir.join("accuracy.json"))?;
                harness::export(&gains, ExportFormat::Csv, dir.join("gains.csv"))
            })?;
            print_accuracy(&acc);
        }
        Command::Shift(WithPolicies { common, policies }) => {
            let config = common.resolve()?;
            config.validate(tax)?;
            let ds = prepare_dataset(&config, tax)?;
            let policies = policies_for(&config, &ds, policies.as_deref(), tax)?;
            let runs = evaluate_repeats(&config, &ds, &policies, tax)?;
            let shift = ShiftReport::from_runs(&runs, tax)?;
            write_outputs(&common.out, |dir| {
                harness::export(&shift, ExportFormat::Csv, dir.join("shift.csv"))?;
                harness::export(&shift, ExportFormat::Json, dir.join("shift.json"))
            })?;
            print_shift(&shift);
        }
        Command::Sweep(common) => {
            let config = common.resolve()?;
            let report = lambda_sweep(&config, &DEFAULT_RATIO_GRID, tax)?;
            write_sweep(&common.out, &report)?;
            for p in &report.points {
                println!(
                    "{}:{}  {:.4} ± {:.4}",
                    p.lambda_l, p.lambda_d, p.mean, p.std
                );
            }
        }
        Command::Report(common) => {
            let config = common.resolve()?;
            let outcome = run_experiment(&config, tax, Some(&common.out))?;
            print_accuracy(&outcome.accuracy);
            println!();
            print_shift(&outcome.shift);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let tax = load_taxonomy();
    match run(cli, &tax) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_config() { 2 } else { 1 })
        }
    }
}
