//! TOML run configuration. Every field has a default, so a config can be as
//! short as `[synthetic]` plus `nodes = 50`.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use advgraph::attacks::AttackKind;
use advgraph::attributes::ATTRIBUTE_COUNT;
use advgraph::forest::ForestParams;
use advgraph::io::{load_graph_files, load_linqs, LoadedGraph};
use advgraph::synth::{GraphModel, SyntheticRecipe};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Output directory; relative paths resolve against the working directory.
    pub output: PathBuf,
    /// Drives target sampling, train/test splits and forests.
    pub seed: u64,
    pub attacks: Vec<String>,
    /// Per-attack budget overrides, keyed by attack name.
    pub budgets: BTreeMap<String, usize>,
    /// Targets drawn per attack.
    pub n_targets: usize,
    /// Attributes kept by the top-k detector.
    pub k: usize,
    /// k values of the sensitivity sweep.
    pub sweep: Vec<usize>,
    pub dataset: Option<DatasetConfig>,
    pub synthetic: Option<SyntheticConfig>,
    pub forest: ForestConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            output: PathBuf::from("advgraph-out"),
            seed: 0,
            attacks: AttackKind::ALL.iter().map(|a| a.name().to_string()).collect(),
            budgets: BTreeMap::new(),
            n_targets: 100,
            k: 4,
            sweep: (1..=10).chain([ATTRIBUTE_COUNT]).collect(),
            dataset: None,
            synthetic: None,
            forest: ForestConfig::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DatasetFormat {
    /// `edges`: "u v" lines; `labels`: "node label" lines.
    #[default]
    EdgeList,
    /// `edges`: a `.cites` file; `labels`: the matching `.content` file.
    Linqs,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetConfig {
    /// Defaults to the edge file's stem.
    pub name: Option<String>,
    pub edges: PathBuf,
    pub labels: PathBuf,
    #[serde(default)]
    pub format: DatasetFormat,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SyntheticConfig {
    pub model: GraphModel,
    pub nodes: usize,
    /// Edge probability for Erdős–Rényi, edges per new node for Barabási–Albert.
    pub parameter: f64,
    pub classes: usize,
    /// Defaults to the run seed.
    pub seed: Option<u64>,
}

impl Default for SyntheticConfig {
    fn default() -> Self {
        SyntheticConfig {
            model: GraphModel::ErdosRenyi,
            nodes: 100,
            parameter: 0.05,
            classes: 3,
            seed: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ForestConfig {
    pub n_trees: usize,
    pub max_depth: Option<usize>,
    pub min_leaf: usize,
    /// Defaults to `ceil(sqrt(features))`.
    pub features_per_split: Option<usize>,
}

impl Default for ForestConfig {
    fn default() -> Self {
        let d = ForestParams::default();
        ForestConfig {
            n_trees: d.n_trees,
            max_depth: d.max_depth,
            min_leaf: d.min_leaf,
            features_per_split: d.features_per_split,
        }
    }
}

impl ForestConfig {
    pub fn params(&self, seed: u64) -> ForestParams {
        ForestParams {
            n_trees: self.n_trees,
            max_depth: self.max_depth,
            min_leaf: self.min_leaf,
            features_per_split: self.features_per_split,
            seed,
        }
    }
}

/// A loaded graph plus where it came from.
pub struct Source {
    pub name: String,
    pub loaded: LoadedGraph,
    /// Set for file datasets, whose node ids were remapped.
    pub from_files: bool,
}

impl RunConfig {
    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
        let mut cfg: RunConfig =
            toml::from_str(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
        if let Some(ds) = cfg.dataset.as_mut() {
            let base = path.parent().unwrap_or(Path::new("."));
            ds.edges = base.join(&ds.edges);
            ds.labels = base.join(&ds.labels);
        }
        Ok(cfg)
    }

    /// Checks everything that can be checked before any work starts.
    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |m: String| Err(CliError::Input(m));
        match (&self.dataset, &self.synthetic) {
            (Some(_), Some(_)) => return bad("config sets both [dataset] and [synthetic]; choose one".into()),
            (None, None) => return bad("config needs a [dataset] or a [synthetic] section".into()),
            _ => {}
        }
        if self.attacks.is_empty() {
            return bad("no attacks configured".into());
        }
        let kinds = self.attack_kinds()?;
        for (i, k) in kinds.iter().enumerate() {
            if kinds[..i].contains(k) {
                return bad(format!("attack {k} listed twice"));
            }
        }
        for (name, &b) in &self.budgets {
            parse_attack(name)?;
            if b == 0 {
                return bad(format!("budget for {name} must be at least 1"));
            }
        }
        if self.n_targets == 0 {
            return bad("n_targets must be at least 1".into());
        }
        for &k in self.sweep.iter().chain([&self.k]) {
            if !(1..=ATTRIBUTE_COUNT).contains(&k) {
                return bad(format!("k = {k} outside 1..={ATTRIBUTE_COUNT}"));
            }
        }
        if self.forest.n_trees == 0 || self.forest.min_leaf == 0 {
            return bad("forest n_trees and min_leaf must be at least 1".into());
        }
        if self.forest.features_per_split == Some(0) || self.forest.max_depth == Some(0) {
            return bad("forest features_per_split and max_depth must be at least 1".into());
        }
        if let Some(s) = &self.synthetic {
            if s.nodes < 2 || s.classes < 2 {
                return bad("synthetic graphs need at least 2 nodes and 2 classes".into());
            }
        }
        Ok(())
    }

    pub fn attack_kinds(&self) -> Result<Vec<AttackKind>, CliError> {
        self.attacks.iter().map(|a| parse_attack(a)).collect()
    }

    pub fn budget(&self, attack: AttackKind) -> Option<usize> {
        self.budgets.get(attack.name()).copied()
    }

    pub fn load(&self) -> Result<Source, CliError> {
        if let Some(ds) = &self.dataset {
            let loaded = match ds.format {
                DatasetFormat::EdgeList => load_graph_files(&ds.edges, &ds.labels)?,
                DatasetFormat::Linqs => {
                    let read = |p: &Path| {
                        std::fs::read_to_string(p).map_err(|e| CliError::Input(format!("{}: {e}", p.display())))
                    };
                    load_linqs(&read(&ds.edges)?, &read(&ds.labels)?)?
                }
            };
            let name = ds.name.clone().unwrap_or_else(|| {
                ds.edges
                    .file_stem()
                    .map_or_else(|| "dataset".into(), |s| s.to_string_lossy().into_owned())
            });
            return Ok(Source {
                name,
                loaded,
                from_files: true,
            });
        }
        let s = self.synthetic.as_ref().expect("validated");
        let graph = SyntheticRecipe {
            model: s.model,
            nodes: s.nodes,
            parameter: s.parameter,
            classes: s.classes,
            seed: s.seed.unwrap_or(self.seed),
        }
        .build()?;
        let original_ids = (0..graph.node_count() as u64).collect();
        Ok(Source {
            name: format!("{}-{}", s.model, s.nodes),
            loaded: LoadedGraph { graph, original_ids },
            from_files: false,
        })
    }
}

pub fn parse_attack(name: &str) -> Result<AttackKind, CliError> {
    name.parse().map_err(|_| {
        let known: Vec<&str> = AttackKind::ALL.iter().map(|a| a.name()).collect();
        CliError::Input(format!("unknown attack {name:?}; expected one of {}", known.join(", ")))
    })
}
