use std::collections::HashSet;
use std::fmt;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Identifier that may be written as a JSON number or string.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FoldId {
    Int(i64),
    Text(String),
}

impl fmt::Display for FoldId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FoldId::Int(v) => write!(f, "{v}"),
            FoldId::Text(s) => f.write_str(s),
        }
    }
}

/// Participant-level split: `{"fold":id,"train":[ids],"val":[ids],"test":[ids]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FoldSpec {
    pub fold: FoldId,
    pub train: Vec<FoldId>,
    pub val: Vec<FoldId>,
    pub test: Vec<FoldId>,
}

impl FoldSpec {
    /// Rejects any participant listed twice, within or across splits.
    pub fn validate(&self) -> Result<()> {
        let mut seen = HashSet::new();
        for (split, ids) in [("train", &self.train), ("val", &self.val), ("test", &self.test)] {
            for id in ids {
                if !seen.insert(id.to_string()) {
                    return Err(Error::InvalidConfig(format!(
                        "fold {}: participant {id} appears more than once (again in {split})",
                        self.fold
                    )));
                }
            }
        }
        Ok(())
    }

    /// Image ids (from `image_ids`) whose participant is in the test split.
    pub fn test_images<'a>(
        &self,
        image_ids: impl IntoIterator<Item = &'a str>,
        delimiter: char,
    ) -> Vec<String> {
        let test: HashSet<String> = self.test.iter().map(ToString::to_string).collect();
        image_ids
            .into_iter()
            .filter(|id| test.contains(participant_of(id, delimiter)))
            .map(str::to_string)
            .collect()
    }
}

/// Participant of an image: the `image_id` prefix before the first `delimiter`.
pub fn participant_of(image_id: &str, delimiter: char) -> &str {
    image_id.split(delimiter).next().unwrap_or(image_id)
}

pub fn load_fold_spec(path: impl AsRef<Path>) -> Result<FoldSpec> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let spec: FoldSpec = serde_json::from_str(&text)?;
    spec.validate()?;
    Ok(spec)
}
