use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use super::GarmentClass;
use crate::error::{read_json, write_json};
use crate::{Error, Result};

/// Garment asset references grouped by class. References are paths relative
/// to the registry's base directory.
#[derive(Debug, Clone, Default, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct GarmentRegistry {
    #[serde(flatten)]
    pub classes: BTreeMap<GarmentClass, Vec<String>>,
}

impl GarmentRegistry {
    pub fn assets(&self, class: GarmentClass) -> &[String] {
        self.classes.get(&class).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Every class must have at least one asset.
    pub fn validate(&self) -> Result<()> {
        match GarmentClass::ALL.into_iter().find(|&c| self.assets(c).is_empty()) {
            Some(c) => Err(Error::Config(format!("garment pool '{c}' is empty"))),
            None => Ok(()),
        }
    }

    pub fn load_index(path: &Path) -> Result<Self> {
        read_json(path)
    }

    pub fn save_index(&self, path: &Path) -> Result<()> {
        write_json(path, self)
    }

    /// Build a registry from every garment file in `dir` (non-recursive).
    /// Files that are not garment assets are skipped.
    pub fn scan_dir(dir: &Path) -> Result<Self> {
        let mut paths: Vec<PathBuf> = std::fs::read_dir(dir)
            .map_err(|e| Error::io(dir, e))?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x == "json"))
            .collect();
        paths.sort();
        let mut reg = GarmentRegistry::default();
        for p in paths {
            #[derive(serde::Deserialize)]
            struct Probe {
                class_label: GarmentClass,
            }
            let Ok(probe) = read_json::<Probe>(&p) else { continue };
            let name = p.file_name().unwrap().to_string_lossy().into_owned();
            reg.classes.entry(probe.class_label).or_default().push(name);
        }
        Ok(reg)
    }
}
