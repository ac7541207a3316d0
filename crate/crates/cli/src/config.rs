//! Run configuration: a JSON document whose fields the command-line flags override.

use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::Args;
use flagdyn_core::engine::default_word_depth;
use flagdyn_core::{GeneratorSet, GroupElement, Preset, Space};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// Which spaces to analyze.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum SpaceChoice {
    K,
    Flag,
    Proj,
    All,
}

impl FromStr for SpaceChoice {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_uppercase().as_str() {
            "K" => Ok(Self::K),
            "FLAG" => Ok(Self::Flag),
            "PROJ" => Ok(Self::Proj),
            "ALL" => Ok(Self::All),
            _ => Err(format!("unknown space {s:?}; expected K, FLAG, PROJ or ALL")),
        }
    }
}

/// Fields of a configuration file; all optional.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub n: Option<usize>,
    pub space: Option<SpaceChoice>,
    pub preset: Option<String>,
    pub generators: Option<PathBuf>,
    pub cloud_count: Option<usize>,
    pub seed: Option<u64>,
    pub epsilon: Option<f64>,
    pub word_depth: Option<usize>,
    pub output_dir: Option<PathBuf>,
    pub theorems: Option<Vec<String>>,
    pub graph_export: Option<bool>,
}

#[derive(Args, Clone, Debug, Default)]
pub struct RunArgs {
    /// JSON configuration file; flags override its fields.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Matrix size.
    #[arg(long)]
    pub n: Option<usize>,
    /// K, FLAG, PROJ or ALL.
    #[arg(long)]
    pub space: Option<SpaceChoice>,
    /// slplus2, slplus3 or full-group.
    #[arg(long, conflicts_with = "generators")]
    pub preset: Option<String>,
    /// JSON file with a list of matrices, or {"gens": [...], "description": ...}.
    #[arg(long)]
    pub generators: Option<PathBuf>,
    /// Number of samples in the cloud of the analyzed space.
    #[arg(long)]
    pub cloud_count: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Matching radius; defaults to a multiple of the cloud dispersion.
    #[arg(long)]
    pub epsilon: Option<f64>,
    #[arg(long)]
    pub word_depth: Option<usize>,
    #[arg(long)]
    pub output_dir: Option<PathBuf>,
    /// Skip writing the edge list.
    #[arg(long)]
    pub no_graph: bool,
}

/// A validated configuration.
#[derive(Clone, Debug, Serialize)]
pub struct RunConfig {
    pub n: usize,
    pub space: SpaceChoice,
    pub preset: Option<String>,
    pub generators_file: Option<PathBuf>,
    #[serde(skip)]
    pub generators: GeneratorSet,
    pub cloud_count: usize,
    pub seed: u64,
    pub epsilon: Option<f64>,
    pub word_depth: usize,
    #[serde(skip)]
    pub output_dir: PathBuf,
    pub theorems: Option<Vec<String>>,
    pub graph_export: bool,
}

/// Generator files hold either a bare list of matrices or a full generator set.
#[derive(Deserialize)]
#[serde(untagged)]
enum GeneratorFile {
    Set(GeneratorSet),
    List(Vec<GroupElement>),
}

fn read_generators(path: &Path) -> Result<GeneratorSet, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let parsed: GeneratorFile = serde_json::from_str(&text)
        .map_err(|e| CliError::Usage(format!("{}: not a valid generator list: {e}", path.display())))?;
    let set = match parsed {
        GeneratorFile::Set(s) => s,
        GeneratorFile::List(gens) => GeneratorSet::new(gens, path.display().to_string())?,
    };
    Ok(set)
}

/// Default sample count: the acceptance-scale grids in the plane, 20 000 rotations in space.
pub fn default_cloud_count(n: usize, space: SpaceChoice) -> usize {
    match (n, space) {
        (2, SpaceChoice::Flag | SpaceChoice::Proj) => 720,
        (2, _) => 1440,
        (3, _) => 20_000,
        _ => 5_000,
    }
}

impl RunConfig {
    pub fn resolve(args: &RunArgs, theorems: Option<Vec<String>>) -> Result<Self, CliError> {
        let file = match &args.config {
            Some(path) => {
                let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
                serde_json::from_str::<FileConfig>(&text)
                    .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?
            }
            None => FileConfig::default(),
        };
        // Flags win over the file; within each, a preset and a generator file exclude each other.
        let (preset_name, generators_path) = if args.generators.is_some() || args.preset.is_some() {
            (args.preset.clone(), args.generators.clone())
        } else {
            if file.preset.is_some() && file.generators.is_some() {
                return Err(CliError::Usage("give either a preset or a generator file, not both".into()));
            }
            (file.preset.clone(), file.generators.clone())
        };
        let preset = preset_name
            .as_deref()
            .map(|p| Preset::from_str(p).map_err(|_| CliError::Usage(format!("unknown preset {p:?}"))))
            .transpose()?;
        let explicit = generators_path.as_deref().map(read_generators).transpose()?;

        let n = args
            .n
            .or(file.n)
            .or_else(|| explicit.as_ref().and_then(GeneratorSet::dim))
            .or_else(|| preset.and_then(Preset::natural_dim))
            .unwrap_or(2);
        if !(2..=4).contains(&n) {
            return Err(CliError::Usage(format!("n = {n} is not supported; use 2, 3 or 4")));
        }
        let generators = match (&explicit, preset) {
            (Some(g), _) => {
                if g.dim().is_some_and(|d| d != n) {
                    return Err(CliError::Usage(format!("generators are not {n}x{n}")));
                }
                g.clone()
            }
            (None, Some(p)) => p.generators(n).map_err(|e| CliError::Usage(e.to_string()))?,
            (None, None) => {
                let p = if n == 3 { Preset::Slplus3 } else { Preset::Slplus2 };
                p.generators(n).map_err(|_| CliError::Usage(format!("no default generators for n = {n}")))?
            }
        };
        let space = args.space.or(file.space).unwrap_or(SpaceChoice::All);
        let cloud_count = args.cloud_count.or(file.cloud_count).unwrap_or_else(|| default_cloud_count(n, space));
        if cloud_count < 10 {
            return Err(CliError::Usage(format!("cloud count {cloud_count} is below 10")));
        }
        let epsilon = args.epsilon.or(file.epsilon);
        if epsilon.is_some_and(|e| !(e > 0.0 && e.is_finite())) {
            return Err(CliError::Usage("epsilon must be positive".into()));
        }
        let word_depth = args.word_depth.or(file.word_depth).unwrap_or_else(|| default_word_depth(n));
        if word_depth == 0 {
            return Err(CliError::Usage("word depth must be at least 1".into()));
        }
        Ok(Self {
            n,
            space,
            preset: preset.map(|p| p.to_string()),
            generators_file: generators_path,
            generators,
            cloud_count,
            seed: args.seed.or(file.seed).unwrap_or(0),
            epsilon,
            word_depth,
            output_dir: args.output_dir.clone().or(file.output_dir).unwrap_or_else(|| PathBuf::from(".")),
            theorems: theorems.or(file.theorems),
            graph_export: !args.no_graph && file.graph_export.unwrap_or(true),
        })
    }

    /// The spaces to analyze, flag-type space first.
    pub fn spaces(&self) -> Vec<Space> {
        let flag = if self.n == 2 { Space::Proj } else { Space::Flag };
        match self.space {
            SpaceChoice::K => vec![Space::K],
            SpaceChoice::Flag => vec![Space::Flag],
            SpaceChoice::Proj => vec![Space::Proj],
            SpaceChoice::All => vec![flag, Space::K],
        }
    }
}
