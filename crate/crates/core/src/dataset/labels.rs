use std::collections::BTreeSet;

use super::RawTable;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelEncoding {
    pub y: Vec<usize>,
    pub k: usize,
    /// `label_names[c]` is the original string of class `c`.
    pub label_names: Vec<String>,
}

impl LabelEncoding {
    pub fn decode(&self, c: usize) -> Option<&str> {
        self.label_names.get(c).map(String::as_str)
    }
}

/// Maps label strings to `0..k` in byte-lexicographic order of the strings,
/// so numeric labels sort as text (`"10" < "2"`).
pub fn encode_labels(raw: &RawTable) -> Result<LabelEncoding> {
    encode_strings(&raw.labels)
}

pub(crate) fn encode_strings(labels: &[String]) -> Result<LabelEncoding> {
    let names: Vec<String> = labels.iter().cloned().collect::<BTreeSet<_>>().into_iter().collect();
    if names.len() < 2 {
        return Err(Error::SingleClass(names.into_iter().next().unwrap_or_default()));
    }
    let y = labels
        .iter()
        .map(|l| names.binary_search(l).expect("label collected above"))
        .collect();
    Ok(LabelEncoding {
        y,
        k: names.len(),
        label_names: names,
    })
}
