use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{read_json, write_json};
use crate::scene::Mode;
use crate::{Error, Result, CLASS_NAMES};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Val,
    Test,
}

impl Split {
    pub const ALL: [Split; 3] = [Split::Train, Split::Val, Split::Test];

    pub fn as_str(self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Val => "val",
            Split::Test => "test",
        }
    }

    /// Column heading used in the statistics table.
    pub fn title(self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Val => "validation",
            Split::Test => "test",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.to_ascii_lowercase().as_str() {
            "train" => Some(Split::Train),
            "val" | "validation" => Some(Split::Val),
            "test" => Some(Split::Test),
            _ => None,
        }
    }
}

impl fmt::Display for Split {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    /// Frame reference, unique within the manifest.
    pub frame: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub frame_index: Option<u64>,
    pub split: Split,
    pub mode: Mode,
    /// Grouping key for grouped splits (e.g. the recorded person).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub group: Option<String>,
    /// File role (`rgb`, `depth`, `cls`, `inst`, `annotation`, ...) to path
    /// relative to the manifest.
    #[serde(default)]
    pub files: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub name: String,
    pub entries: Vec<ManifestEntry>,
    pub classes: Vec<String>,
}

impl DatasetManifest {
    pub fn new(name: impl Into<String>) -> Self {
        DatasetManifest {
            name: name.into(),
            entries: Vec::new(),
            classes: CLASS_NAMES.iter().map(|s| s.to_string()).collect(),
        }
    }

    pub fn load(path: &Path) -> Result<Self> {
        let m: DatasetManifest = read_json(path)?;
        m.validate()?;
        Ok(m)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        self.validate()?;
        write_json(path, self)
    }

    /// Frame references and frame indices are unique, so splits are disjoint.
    pub fn validate(&self) -> Result<()> {
        let mut refs = BTreeSet::new();
        let mut indices = BTreeSet::new();
        for e in &self.entries {
            if !refs.insert(e.frame.as_str()) {
                return Err(Error::Validation(format!("frame '{}' listed twice", e.frame)));
            }
            if let Some(i) = e.frame_index {
                if !indices.insert(i) {
                    return Err(Error::Validation(format!("frame index {i} listed twice")));
                }
            }
        }
        Ok(())
    }

    /// Every referenced file exists below `base_dir`.
    pub fn check_files(&self, base_dir: &Path) -> Result<()> {
        for e in &self.entries {
            for (role, rel) in &e.files {
                if !base_dir.join(rel).is_file() {
                    return Err(Error::AssetMissing(format!("{role} file '{rel}' of frame '{}'", e.frame)));
                }
            }
        }
        Ok(())
    }

    pub fn counts(&self) -> [usize; 3] {
        let mut c = [0; 3];
        for e in &self.entries {
            c[e.split as usize] += 1;
        }
        c
    }

    pub fn entries_in(&self, split: Split) -> impl Iterator<Item = &ManifestEntry> {
        self.entries.iter().filter(move |e| e.split == split)
    }

    pub fn next_frame_index(&self) -> u64 {
        self.entries.iter().filter_map(|e| e.frame_index).max().map_or(0, |m| m + 1)
    }

    /// Append `other`'s entries; fails on any repeated frame.
    pub fn merge(&mut self, other: DatasetManifest) -> Result<()> {
        self.entries.extend(other.entries);
        self.validate()
    }
}
