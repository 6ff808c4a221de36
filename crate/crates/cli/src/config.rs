use std::path::{Path, PathBuf};

use edrvfl::dataset::{load_csv, DatasetManifest, ManifestEntry};
use edrvfl::{GridSpec, HyperParams, LabelColumn, Protocol, Samples, Variant};
use serde::Deserialize;

use crate::error::{config_err, CliResult};

pub const CONFIG_FORMAT_VERSION: &str = "1";

/// Contents of a `--config` file. Every field is optional except the
/// version; command-line flags take precedence.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    #[serde(rename = "format_version")]
    _version: String,
    pub variant: Option<String>,
    pub variants: Option<Vec<String>>,
    pub hyperparams: Option<serde_json::Value>,
    pub grid: Option<GridSpec>,
    pub protocol: Option<Protocol>,
    pub repetitions: Option<usize>,
    pub seed: Option<u64>,
    pub manifest: Option<PathBuf>,
    pub dataset: Option<String>,
    pub data: Option<PathBuf>,
    pub label_column: Option<serde_json::Value>,
    pub has_header: Option<bool>,
    pub jobs: Option<usize>,
    #[serde(skip)]
    dir: PathBuf,
}

impl ConfigFile {
    pub fn load(path: Option<&Path>) -> CliResult<Self> {
        let Some(path) = path else {
            return Ok(ConfigFile::default());
        };
        let text = std::fs::read_to_string(path)
            .map_err(|e| config_err(format!("cannot read config {}: {e}", path.display())))?;
        let value: serde_json::Value =
            serde_json::from_str(&text).map_err(|e| config_err(format!("config {}: {e}", path.display())))?;
        match value.get("format_version").and_then(|v| v.as_str()) {
            Some(CONFIG_FORMAT_VERSION) => {}
            Some(other) => {
                return Err(config_err(format!(
                    "format_version: unsupported value {other:?} (expected \"{CONFIG_FORMAT_VERSION}\")"
                )))
            }
            None => return Err(config_err("format_version: missing or not a string")),
        }
        let mut cfg: ConfigFile =
            serde_json::from_value(value).map_err(|e| config_err(format!("config {}: {e}", path.display())))?;
        cfg.dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok(cfg)
    }

    /// Resolves a path from the file against the file's directory.
    pub fn path(&self, p: &Option<PathBuf>) -> Option<PathBuf> {
        p.as_ref().map(|p| if p.is_relative() { self.dir.join(p) } else { p.clone() })
    }

    pub fn hyperparams(&self) -> CliResult<HyperParams> {
        match &self.hyperparams {
            None => Ok(HyperParams::default()),
            Some(v) => serde_json::from_value(v.clone()).map_err(|e| config_err(format!("hyperparams: {e}"))),
        }
    }

    /// Seed from the file, either top-level or inside `hyperparams`.
    pub fn seed(&self) -> Option<u64> {
        self.seed
            .or_else(|| self.hyperparams.as_ref()?.get("seed")?.as_u64())
    }

    pub fn label_column(&self) -> CliResult<Option<LabelColumn>> {
        Ok(match &self.label_column {
            None => None,
            Some(serde_json::Value::Number(n)) => Some(LabelColumn::Index(
                n.as_u64().ok_or_else(|| config_err("label_column: expected a non-negative integer"))? as usize,
            )),
            Some(serde_json::Value::String(s)) => s.parse::<LabelColumn>().ok(),
            Some(_) => return Err(config_err("label_column: expected an integer or a string")),
        })
    }
}

pub fn parse_variant(name: &str) -> CliResult<Variant> {
    name.parse().map_err(|e: edrvfl::Error| config_err(e.to_string()))
}

/// Where the data of a single-dataset command comes from.
pub struct DataSource {
    pub data: Option<PathBuf>,
    pub label_column: LabelColumn,
    pub has_header: bool,
    pub manifest: Option<PathBuf>,
    pub dataset: Option<String>,
}

impl DataSource {
    /// Loads the dataset and returns it with its display name.
    pub fn load(&self) -> CliResult<(String, Samples)> {
        if let Some(path) = &self.data {
            if self.manifest.is_some() {
                return Err(config_err("give either a data file or a manifest, not both"));
            }
            let table = load_csv(path, &self.label_column, self.has_header)?;
            let name = path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "data".into());
            return Ok((name, Samples::from_table(&table)?));
        }
        let Some(manifest) = &self.manifest else {
            return Err(config_err("no dataset given (use --data or --manifest)"));
        };
        let manifest = DatasetManifest::load(manifest)?;
        let entry = pick_entry(&manifest, self.dataset.as_deref())?;
        Ok((entry.name.clone(), entry.load()?))
    }
}

fn pick_entry<'a>(manifest: &'a DatasetManifest, name: Option<&str>) -> CliResult<&'a ManifestEntry> {
    match name {
        Some(name) => manifest
            .entries
            .iter()
            .find(|e| e.name == name)
            .ok_or_else(|| config_err(format!("dataset: {name:?} is not in the manifest"))),
        None if manifest.entries.len() == 1 => Ok(&manifest.entries[0]),
        None => Err(config_err("dataset: the manifest lists several datasets; pick one with --dataset")),
    }
}
