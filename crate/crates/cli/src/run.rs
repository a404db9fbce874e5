use std::fs;
use std::path::{Path, PathBuf};

use advgraph::attacks::{AttackKind, PlanSummary};
use advgraph::eval::report::{
    histograms, write_histogram_csv, write_importance_csv, write_metrics_csv, write_samples_csv, write_sweep_csv,
    HISTOGRAM_BINS,
};
use advgraph::eval::{
    build_detection_dataset_with, evaluate_detector_with, recognize_attack_with, top_k_sweep_with, DatasetOptions,
    DetectionDataset, DetectionSample, DetectorConfig, MetricsReport, SweepRow,
};
use advgraph::io::write_id_map;
use serde::Serialize;

use crate::config::{RunConfig, Source};
use crate::CliError;

/// Which stages `run` goes through; `train` stops after the detector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stages {
    Full,
    TrainOnly,
}

#[derive(Serialize)]
struct AttackMetrics<'a> {
    dataset: &'a str,
    attack: AttackKind,
    attempted: usize,
    successful: usize,
    success_rate: f64,
    detector: &'a MetricsReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    sweep: Option<&'a [SweepRow]>,
}

pub fn write(path: &Path, bytes: impl AsRef<[u8]>) -> Result<(), CliError> {
    fs::write(path, bytes).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn csv_bytes(f: impl FnOnce(&mut Vec<u8>) -> advgraph::Result<()>) -> Result<Vec<u8>, CliError> {
    let mut buf = Vec::new();
    f(&mut buf)?;
    Ok(buf)
}

fn json<T: Serialize + ?Sized>(value: &T) -> Result<String, CliError> {
    let mut text = serde_json::to_string_pretty(value).map_err(advgraph::Error::from)?;
    text.push('\n');
    Ok(text)
}

pub fn attack_dir(out: &Path, attack: AttackKind, dataset: &str) -> PathBuf {
    out.join(format!("{attack}_{dataset}"))
}

fn plans_text(data: &DetectionDataset) -> String {
    let mut text = String::from("# attack target u v action score\n");
    for a in &data.attempts {
        text.push_str(&format!(
            "# target {} {} ({} flips)\n",
            a.plan.target,
            if a.success { "success" } else { "failure" },
            a.plan.flips.len()
        ));
        text.push_str(&a.plan.to_lines());
    }
    text
}

/// Runs every configured attack and writes its artifacts. Attacks that yield
/// no usable detector are reported after the others have been written.
pub fn run(cfg: &RunConfig, stages: Stages) -> Result<(), CliError> {
    cfg.validate()?;
    let attacks = cfg.attack_kinds()?;
    let source = cfg.load()?;
    let g = &source.loaded.graph;
    log::info!(
        "dataset {}: {} nodes, {} edges, {} classes",
        source.name,
        g.node_count(),
        g.edge_count(),
        g.class_count()
    );
    fs::create_dir_all(&cfg.output).map_err(|e| CliError::Input(format!("{}: {e}", cfg.output.display())))?;
    write(&cfg.output.join("config.json"), json(cfg)?)?;
    if source.from_files {
        write(&cfg.output.join("id_map.csv"), write_id_map(&source.loaded))?;
    }

    let mut summary_rows: Vec<(AttackKind, MetricsReport)> = Vec::new();
    let mut adversarial: Vec<DetectionSample> = Vec::new();
    let mut failures: Vec<CliError> = Vec::new();
    for attack in attacks {
        match run_attack(cfg, &source, attack, stages) {
            Ok((report, samples)) => {
                adversarial.extend(samples.into_iter().filter(DetectionSample::is_adversarial));
                summary_rows.push((attack, report));
            }
            Err(e) => {
                let e = e.context(attack.name());
                log::error!("{e}");
                failures.push(e);
            }
        }
    }

    let rows: Vec<(&str, &str, &MetricsReport)> =
        summary_rows.iter().map(|(a, r)| (source.name.as_str(), a.name(), r)).collect();
    write(&cfg.output.join("metrics.csv"), csv_bytes(|b| write_metrics_csv(b, &rows))?)?;

    if stages == Stages::Full {
        recognize(cfg, &adversarial, summary_rows.len())?;
    }
    match failures.into_iter().next() {
        Some(e) => Err(e),
        None => Ok(()),
    }
}

fn run_attack(
    cfg: &RunConfig,
    source: &Source,
    attack: AttackKind,
    stages: Stages,
) -> Result<(MetricsReport, Vec<DetectionSample>), CliError> {
    let g = &source.loaded.graph;
    let dir = attack_dir(&cfg.output, attack, &source.name);
    fs::create_dir_all(&dir).map_err(|e| CliError::Input(format!("{}: {e}", dir.display())))?;

    let opts = DatasetOptions {
        n_targets: cfg.n_targets,
        seed: cfg.seed,
        budget: cfg.budget(attack),
    };
    let data = build_detection_dataset_with(g, attack, &source.name, &opts)?;
    log::info!(
        "{attack}: {}/{} attacks succeeded ({:.1}%)",
        data.successful(),
        data.attempted(),
        100.0 * data.success_rate()
    );
    write(&dir.join("plans.txt"), plans_text(&data))?;
    let summaries: Vec<PlanSummary> = data.attempts.iter().map(|a| a.plan.summary(a.success)).collect();
    write(&dir.join("plans.json"), json(&data.attempts)?)?;
    write(&dir.join("plan_summary.json"), json(&summaries)?)?;
    if let Some(note) = &data.diagnostic {
        log::warn!("{attack}: {note}");
    }
    let samples = data.require_samples()?;
    write(&dir.join("samples.csv"), csv_bytes(|b| write_samples_csv(b, samples))?)?;

    let detector = DetectorConfig {
        k: cfg.k,
        split_seed: cfg.seed,
        forest: cfg.forest.params(cfg.seed),
    };
    let outcome = evaluate_detector_with(samples, &detector)?;
    let report = &outcome.report;
    log::info!(
        "{attack}: top-{} AUC {:.3} (all-17 {:.3}), top attributes {}",
        report.k,
        report.auc,
        report.all.auc,
        report.top_k_names.join(", ")
    );
    write(&dir.join("forest_all.json"), outcome.all_forest.to_json()? + "\n")?;
    write(&dir.join("forest_top.json"), outcome.top_forest.to_json()? + "\n")?;
    write(&dir.join("importance.csv"), csv_bytes(|b| write_importance_csv(b, report))?)?;
    let row = [(source.name.as_str(), attack.name(), report)];
    write(&dir.join("metrics.csv"), csv_bytes(|b| write_metrics_csv(b, &row))?)?;

    let sweep = if stages == Stages::Full {
        let rows = top_k_sweep_with(samples, &cfg.sweep, &detector)?;
        write(&dir.join("sweep.csv"), csv_bytes(|b| write_sweep_csv(b, &rows))?)?;
        let hist = histograms(samples, HISTOGRAM_BINS);
        write(&dir.join("histogram.csv"), csv_bytes(|b| write_histogram_csv(b, &hist))?)?;
        Some(rows)
    } else {
        None
    };
    let metrics = AttackMetrics {
        dataset: &source.name,
        attack,
        attempted: data.attempted(),
        successful: data.successful(),
        success_rate: data.success_rate(),
        detector: report,
        sweep: sweep.as_deref(),
    };
    write(&dir.join("metrics.json"), json(&metrics)?)?;
    Ok((outcome.report, samples.to_vec()))
}

fn recognize(cfg: &RunConfig, adversarial: &[DetectionSample], attacks_done: usize) -> Result<(), CliError> {
    if attacks_done < 2 {
        log::info!("attack recognition skipped: needs at least two attacks with samples");
        return Ok(());
    }
    match recognize_attack_with(adversarial, cfg.seed, &cfg.forest.params(cfg.seed)) {
        Ok(r) => {
            log::info!("attack recognition: macro AUC {:.3} ± {:.3}", r.auc_mean, r.auc_std);
            write(&cfg.output.join("recognition.json"), json(&r)?)
        }
        Err(e) => {
            log::warn!("attack recognition skipped: {e}");
            Ok(())
        }
    }
}
