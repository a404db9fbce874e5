use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use advgraph::attacks::{prediction_changed, AttackKind};
use advgraph::attributes::AttributeExtractor;
use advgraph::eval::report::write_attribute_csv;
use advgraph::io::{load_graph_files, LoadedGraph};
use advgraph::NodeId;
use serde_json::Value;

use crate::config::RunConfig;
use crate::CliError;

/// Graph from explicit files, else from the config's dataset or recipe.
pub fn load_graph(
    edges: Option<&Path>,
    labels: Option<&Path>,
    cfg: Option<&RunConfig>,
) -> Result<LoadedGraph, CliError> {
    match (edges, labels, cfg) {
        (Some(e), Some(l), _) => Ok(load_graph_files(e, l)?),
        (Some(_), None, _) | (None, Some(_), _) => {
            Err(CliError::Input("--edges and --labels must be given together".into()))
        }
        (None, None, Some(cfg)) => {
            if cfg.dataset.is_some() == cfg.synthetic.is_some() {
                return Err(CliError::Input("config needs exactly one of [dataset] or [synthetic]".into()));
            }
            Ok(cfg.load()?.loaded)
        }
        (None, None, None) => Err(CliError::Input("give --edges and --labels, or --config".into())),
    }
}

fn dense(loaded: &LoadedGraph, raw: u64) -> Result<NodeId, CliError> {
    loaded
        .dense_id(raw)
        .ok_or_else(|| CliError::Input(format!("unknown node id {raw}")))
}

pub fn attributes(loaded: &LoadedGraph, nodes: &[u64]) -> Result<(), CliError> {
    let targets: Vec<NodeId> = if nodes.is_empty() {
        (0..loaded.graph.node_count()).collect()
    } else {
        nodes.iter().map(|&raw| dense(loaded, raw)).collect::<Result<_, _>>()?
    };
    let extractor = AttributeExtractor::new(&loaded.graph);
    let mut rows = Vec::with_capacity(targets.len());
    for t in targets {
        rows.push((loaded.original_ids[t].to_string(), extractor.extract(t)?));
    }
    let stdout = std::io::stdout();
    write_attribute_csv(stdout.lock(), &rows)?;
    Ok(())
}

pub fn attack(loaded: &LoadedGraph, attack: AttackKind, target: u64, budget: Option<usize>) -> Result<(), CliError> {
    let g = &loaded.graph;
    let t = dense(loaded, target)?;
    let budget = budget.unwrap_or_else(|| attack.default_budget(g, t));
    let plan = attack.run(g, t, budget)?;
    let success = !plan.is_empty() && prediction_changed(g, &plan.apply(g)?, t)?;
    let raw = |x: NodeId| loaded.original_ids[x];
    let mut text = String::from("# attack target u v action score\n");
    for f in &plan.flips {
        writeln!(text, "{attack} {target} {} {} {} {}", raw(f.flip.u), raw(f.flip.v), f.flip.action, f.score).unwrap();
    }
    writeln!(text, "# budget {budget}, {} flips, success {success}", plan.flips.len()).unwrap();
    std::io::stdout()
        .write_all(text.as_bytes())
        .map_err(|e| CliError::Input(e.to_string()))
}

fn read_json(path: &Path) -> Result<Value, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

/// Summarizes the per-attack `metrics.json` files of a finished run.
pub fn report(out: &Path) -> Result<(), CliError> {
    let entries = fs::read_dir(out).map_err(|e| CliError::Input(format!("{}: {e}", out.display())))?;
    let mut dirs: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.join("metrics.json").is_file())
        .collect();
    dirs.sort();
    if dirs.is_empty() {
        return Err(CliError::Empty(format!("no metrics.json under {}", out.display())));
    }

    let mut text = String::new();
    writeln!(
        text,
        "{:<12} {:<24} {:>9} {:>7} {:>8} {:>8} {:>9}  top attributes",
        "attack", "dataset", "success", "k", "auc_top", "auc_all", "gain_auc%"
    )
    .unwrap();
    for dir in dirs {
        let m = read_json(&dir.join("metrics.json"))?;
        let d = &m["detector"];
        let num = |v: &Value| v.as_f64().map_or("-".to_string(), |x| format!("{x:.3}"));
        let names: Vec<&str> = d["top_k_names"]
            .as_array()
            .map(|a| a.iter().filter_map(Value::as_str).collect())
            .unwrap_or_default();
        writeln!(
            text,
            "{:<12} {:<24} {:>9} {:>7} {:>8} {:>8} {:>9}  {}",
            m["attack"].as_str().unwrap_or("?"),
            m["dataset"].as_str().unwrap_or("?"),
            format!("{}/{}", m["successful"], m["attempted"]),
            d["k"].as_u64().map_or("-".into(), |k| k.to_string()),
            num(&d["auc"]),
            num(&d["all"]["auc"]),
            num(&d["gain_auc"]),
            names.join(", ")
        )
        .unwrap();
    }
    let recognition = out.join("recognition.json");
    if recognition.is_file() {
        let r = read_json(&recognition)?;
        writeln!(
            text,
            "recognition: macro AUC {} ± {}",
            r["auc_mean"].as_f64().map_or("-".into(), |x| format!("{x:.3}")),
            r["auc_std"].as_f64().map_or("-".into(), |x| format!("{x:.3}"))
        )
        .unwrap();
    }
    std::io::stdout()
        .write_all(text.as_bytes())
        .map_err(|e| CliError::Input(e.to_string()))
}
