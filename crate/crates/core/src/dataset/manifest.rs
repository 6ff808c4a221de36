use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{load_csv, LabelColumn, RawTable, Samples};
use crate::{Error, Result};

/// One dataset of a benchmark manifest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub name: String,
    /// Relative paths are resolved against the manifest's directory.
    pub path: PathBuf,
    /// Column index (number), header name (string) or `"last"`.
    #[serde(with = "label_column_serde")]
    pub label_column: LabelColumn,
    #[serde(default)]
    pub has_header: bool,
}

impl ManifestEntry {
    pub fn load_table(&self) -> Result<RawTable> {
        load_csv(&self.path, &self.label_column, self.has_header)
    }

    pub fn load(&self) -> Result<Samples> {
        Samples::from_table(&self.load_table()?)
    }
}

/// A manifest file holds either a single entry or a list of them.
#[derive(Debug, Clone, PartialEq)]
pub struct DatasetManifest {
    pub entries: Vec<ManifestEntry>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum ManifestFile {
    One(ManifestEntry),
    Many(Vec<ManifestEntry>),
    Wrapped { datasets: Vec<ManifestEntry> },
}

impl DatasetManifest {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::file(path, e))?;
        let base = path.parent().unwrap_or_else(|| Path::new("."));
        Self::parse(&text, base)
    }

    pub fn parse(text: &str, base: &Path) -> Result<Self> {
        let file: ManifestFile = serde_json::from_str(text)?;
        let mut entries = match file {
            ManifestFile::One(e) => vec![e],
            ManifestFile::Many(v) | ManifestFile::Wrapped { datasets: v } => v,
        };
        if entries.is_empty() {
            return Err(Error::InvalidConfig("manifest lists no datasets".into()));
        }
        for e in &mut entries {
            if e.path.is_relative() {
                e.path = base.join(&e.path);
            }
        }
        Ok(DatasetManifest { entries })
    }
}

mod label_column_serde {
    use super::LabelColumn;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Index(usize),
        Name(String),
    }

    pub fn serialize<S: Serializer>(c: &LabelColumn, s: S) -> Result<S::Ok, S::Error> {
        match c {
            LabelColumn::Index(i) => Repr::Index(*i),
            LabelColumn::Name(n) => Repr::Name(n.clone()),
            LabelColumn::Last => Repr::Name("last".into()),
        }
        .serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<LabelColumn, D::Error> {
        Ok(match Repr::deserialize(d)? {
            Repr::Index(i) => LabelColumn::Index(i),
            Repr::Name(n) if n == "last" => LabelColumn::Last,
            Repr::Name(n) => LabelColumn::Name(n),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_single_and_list_forms() {
        let one = DatasetManifest::parse(
            r#"{"name":"glass","path":"glass.csv","label_column":9,"has_header":false}"#,
            Path::new("/data"),
        )
        .unwrap();
        assert_eq!(one.entries[0].path, PathBuf::from("/data/glass.csv"));
        assert_eq!(one.entries[0].label_column, LabelColumn::Index(9));

        let many = DatasetManifest::parse(
            r#"[{"name":"a","path":"/abs/a.csv","label_column":"class","has_header":true},
                {"name":"b","path":"b.csv","label_column":0}]"#,
            Path::new("rel"),
        )
        .unwrap();
        assert_eq!(many.entries.len(), 2);
        assert_eq!(many.entries[0].path, PathBuf::from("/abs/a.csv"));
        assert_eq!(many.entries[0].label_column, LabelColumn::Name("class".into()));
        assert!(!many.entries[1].has_header);
    }

    #[test]
    fn empty_manifest_rejected() {
        assert!(DatasetManifest::parse("[]", Path::new(".")).is_err());
    }
}
