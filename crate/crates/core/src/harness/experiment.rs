use std::path::{Path, PathBuf};

use super::config::ExperimentConfig;
use super::eval::{evaluate_speaker, Slice, SpeakerEvaluation, SpeakerKind};
use super::report::{
    export, gain_report, AccuracyReport, ExportFormat, GainReport, LambdaSweepReport, ShiftReport,
    Stat, SweepPoint,
};
use crate::error::{Error, Result};
use crate::listener::ListenerProfile;
use crate::pragmatic::{train, DisparityPolicy, TrainingHistory};
use crate::scenes::{assemble_dataset, load_dataset, Dataset};
use crate::taxonomy::Taxonomy;

/// `(lambda_l, lambda_d)` ratios swept by default, task-heavy first.
pub const DEFAULT_RATIO_GRID: [(f64, f64); 7] = [
    (8.0, 1.0),
    (4.0, 1.0),
    (2.0, 1.0),
    (1.0, 1.0),
    (1.0, 2.0),
    (1.0, 4.0),
    (1.0, 8.0),
];

pub fn prepare_dataset(config: &ExperimentConfig, tax: &Taxonomy) -> Result<Dataset> {
    match &config.dataset {
        Some(path) => load_dataset(path, tax),
        None => assemble_dataset(config.seed, config.dataset_config(), tax),
    }
}

/// Runs `job(repeat)` for every repeat on its own thread; results keep
/// repeat order.
fn per_repeat<T: Send>(n: usize, job: impl Fn(usize) -> Result<T> + Sync) -> Result<Vec<T>> {
    std::thread::scope(|s| {
        let handles: Vec<_> = (0..n)
            .map(|r| {
                let job = &job;
                s.spawn(move || job(r))
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("worker panicked"))
            .collect()
    })
}

/// Trains one policy per repeat with seeds `seed + repeat`.
pub fn train_repeats(
    config: &ExperimentConfig,
    dataset: &Dataset,
    tax: &Taxonomy,
) -> Result<Vec<(DisparityPolicy, TrainingHistory)>> {
    config.validate(tax)?;
    let listener = config.listener(tax)?;
    per_repeat(config.n_repeats, |r| {
        log::info!("training repeat {r}");
        train(dataset, &listener, &config.train_config(r), tax)
    })
}

/// All four speakers on the test split, once per policy.
pub fn evaluate_repeats(
    config: &ExperimentConfig,
    dataset: &Dataset,
    policies: &[DisparityPolicy],
    tax: &Taxonomy,
) -> Result<Vec<Vec<SpeakerEvaluation>>> {
    let listener = config.listener(tax)?;
    per_repeat(policies.len(), |r| {
        evaluate_all(
            config,
            dataset,
            &listener,
            &policies[r],
            tax,
            config.repeat_seed(r),
        )
    })
}

fn evaluate_all(
    config: &ExperimentConfig,
    dataset: &Dataset,
    listener: &ListenerProfile,
    policy: &DisparityPolicy,
    tax: &Taxonomy,
    seed: u64,
) -> Result<Vec<SpeakerEvaluation>> {
    SpeakerKind::ALL
        .into_iter()
        .map(|kind| {
            evaluate_speaker(
                kind,
                &dataset.test,
                config.mode,
                listener,
                Some(policy),
                tax,
                seed,
            )
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentOutcome {
    pub accuracy: AccuracyReport,
    pub shift: ShiftReport,
    pub gains: GainReport,
    pub policies: Vec<DisparityPolicy>,
    pub histories: Vec<TrainingHistory>,
}

/// Generates or loads the dataset, trains `n_repeats` policies, evaluates
/// every speaker per repeat and aggregates. With `out` set, the reports and
/// checkpoints are written there; nothing is left behind on failure.
pub fn run_experiment(
    config: &ExperimentConfig,
    tax: &Taxonomy,
    out: Option<&Path>,
) -> Result<ExperimentOutcome> {
    config.validate(tax)?;
    let dataset = prepare_dataset(config, tax)?;
    let trained = train_repeats(config, &dataset, tax)?;
    let (policies, histories): (Vec<_>, Vec<_>) = trained.into_iter().unzip();
    let runs = evaluate_repeats(config, &dataset, &policies, tax)?;
    let accuracy = AccuracyReport::from_runs(&runs)?;
    let outcome = ExperimentOutcome {
        shift: ShiftReport::from_runs(&runs, tax)?,
        gains: gain_report(&accuracy),
        accuracy,
        policies,
        histories,
    };
    if let Some(dir) = out {
        write_outputs(dir, |staging| {
            std::fs::write(staging.join("config.toml"), config.to_toml())
                .map_err(|e| Error::io(staging.join("config.toml"), e))?;
            write_reports(staging, &outcome.accuracy, &outcome.shift, &outcome.gains)?;
            write_checkpoints(staging, &outcome.policies, &outcome.histories, tax)
        })?;
    }
    Ok(outcome)
}

pub fn write_reports(
    dir: &Path,
    accuracy: &AccuracyReport,
    shift: &ShiftReport,
    gains: &GainReport,
) -> Result<()> {
    export(accuracy, ExportFormat::Csv, dir.join("accuracy.csv"))?;
    export(accuracy, ExportFormat::Json, dir.join("accuracy.json"))?;
    export(shift, ExportFormat::Csv, dir.join("shift.csv"))?;
    export(shift, ExportFormat::Json, dir.join("shift.json"))?;
    export(gains, ExportFormat::Csv, dir.join("gains.csv"))
}

pub fn write_checkpoints(
    dir: &Path,
    policies: &[DisparityPolicy],
    histories: &[TrainingHistory],
    tax: &Taxonomy,
) -> Result<()> {
    for (r, policy) in policies.iter().enumerate() {
        policy.save(dir.join(format!("policy_{r}.json")), tax)?;
    }
    for (r, history) in histories.iter().enumerate() {
        let path = dir.join(format!("history_{r}.json"));
        let text = serde_json::to_string_pretty(history)? + "\n";
        std::fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
    }
    Ok(())
}

/// Reads `policy_<r>.json` for every repeat from `dir`.
pub fn load_policies(dir: &Path, n_repeats: usize, tax: &Taxonomy) -> Result<Vec<DisparityPolicy>> {
    (0..n_repeats)
        .map(|r| DisparityPolicy::load(dir.join(format!("policy_{r}.json")), tax))
        .collect()
}

/// Runs `write` against a fresh staging directory inside `out`, then moves
/// every file it produced into `out`. On error the staging directory (and
/// `out`, if this call created it) is removed.
pub fn write_outputs(out: &Path, write: impl FnOnce(&Path) -> Result<()>) -> Result<()> {
    let created = !out.exists();
    std::fs::create_dir_all(out).map_err(|e| Error::io(out, e))?;
    let staging = out.join(format!(".staging-{}", std::process::id()));
    let cleanup = |staging: &Path| {
        let _ = std::fs::remove_dir_all(staging);
        if created {
            let _ = std::fs::remove_dir(out);
        }
    };
    let result = std::fs::create_dir(&staging)
        .map_err(|e| Error::io(&staging, e))
        .and_then(|()| write(&staging))
        .and_then(|()| move_contents(&staging, out));
    match result {
        Ok(()) => {
            let _ = std::fs::remove_dir(&staging);
            Ok(())
        }
        Err(e) => {
            cleanup(&staging);
            Err(e)
        }
    }
}

fn move_contents(from: &Path, to: &Path) -> Result<()> {
    let mut names: Vec<PathBuf> = std::fs::read_dir(from)
        .map_err(|e| Error::io(from, e))?
        .map(|entry| entry.map(|e| e.path()).map_err(|e| Error::io(from, e)))
        .collect::<Result<_>>()?;
    names.sort();
    for src in names {
        let dst = to.join(src.file_name().expect("directory entries have names"));
        std::fs::rename(&src, &dst).map_err(|e| Error::io(&dst, e))?;
    }
    Ok(())
}

/// Trains and evaluates S1d at every `(lambda_l, lambda_d)` in `grid`, on one
/// dataset and the same repeat seeds throughout. The reported accuracy is the
/// Combined test accuracy.
pub fn lambda_sweep(
    config: &ExperimentConfig,
    grid: &[(f64, f64)],
    tax: &Taxonomy,
) -> Result<LambdaSweepReport> {
    if grid.is_empty() {
        return Err(Error::config("lambda grid is empty"));
    }
    config.validate(tax)?;
    let dataset = prepare_dataset(config, tax)?;
    let listener = config.listener(tax)?;
    let mut points = Vec::with_capacity(grid.len());
    for &(lambda_l, lambda_d) in grid {
        let point_config = ExperimentConfig {
            lambda_l,
            lambda_d,
            ..config.clone()
        };
        point_config.validate(tax)?;
        let accs = per_repeat(config.n_repeats, |r| {
            let (policy, _) = train(&dataset, &listener, &point_config.train_config(r), tax)?;
            let e = evaluate_speaker(
                SpeakerKind::S1d,
                &dataset.test,
                config.mode,
                &listener,
                Some(&policy),
                tax,
                config.repeat_seed(r),
            )?;
            Ok(e.accuracy(Slice::Combined))
        })?;
        let stat = Stat::of(&accs);
        log::info!("sweep {lambda_l}:{lambda_d} -> {:.4}", stat.mean);
        points.push(SweepPoint {
            lambda_l,
            lambda_d,
            mean: stat.mean,
            std: stat.std,
        });
    }
    Ok(LambdaSweepReport { points })
}

/// Writes `sweep.csv` and `sweep.json` into `out`.
pub fn write_sweep(out: &Path, report: &LambdaSweepReport) -> Result<()> {
    write_outputs(out, |staging| {
        export(report, ExportFormat::Csv, staging.join("sweep.csv"))?;
        export(report, ExportFormat::Json, staging.join("sweep.json"))
    })
}
