//! Loaded, immutable asset set shared by all frames of a run.

use std::collections::HashMap;
use std::path::Path;
use std::sync::Arc;

use image::RgbImage;

use crate::body_model::{ParametricBody, TemplateMesh};
use crate::clothing::{ClothingAsset, MeshAsset, PaletteSpec};
use crate::error::read_json;
use crate::scene::RandomizationConfig;
use crate::{Error, Result};

/// One textured mesh of a room scene.
#[derive(Debug, Clone)]
pub struct RoomPart {
    pub mesh: Arc<TemplateMesh>,
    pub texture: Arc<RgbImage>,
}

/// Body, bound garments, textures and room geometry keyed by the reference
/// strings used in frame specs.
#[derive(Debug, Clone)]
pub struct AssetStore {
    body: ParametricBody,
    palette: PaletteSpec,
    garments: HashMap<String, ClothingAsset>,
    textures: HashMap<String, Arc<RgbImage>>,
    rooms: HashMap<String, Vec<RoomPart>>,
}

pub fn load_rgb(path: &Path) -> Result<RgbImage> {
    Ok(image::open(path).map_err(|e| Error::image(path, e))?.to_rgb8())
}

impl AssetStore {
    pub fn new(body: ParametricBody, palette: PaletteSpec) -> Self {
        AssetStore {
            body,
            palette,
            garments: HashMap::new(),
            textures: HashMap::new(),
            rooms: HashMap::new(),
        }
    }

    /// Load everything the config can reference.
    pub fn load(config: &RandomizationConfig) -> Result<Self> {
        let f = &config.file;
        let body = ParametricBody::load(&config.resolve(&f.body))?;
        if body.shape_basis.num_coeffs() != f.num_shape_coeffs {
            return Err(Error::Dimension {
                what: "body shape coefficients",
                expected: f.num_shape_coeffs,
                got: body.shape_basis.num_coeffs(),
            });
        }
        let mut store = AssetStore::new(body, f.palette.clone());
        for garments in f.garments.classes.values() {
            for r in garments {
                if !store.garments.contains_key(r) {
                    let asset = ClothingAsset::load(&config.resolve(r), &store.body, &store.palette)?;
                    store.garments.insert(r.clone(), asset);
                }
            }
        }
        let texture_refs = f
            .human_textures
            .iter()
            .map(|t| &t.path)
            .chain(&f.backgrounds)
            .chain(&f.distractors.textures);
        for r in texture_refs {
            if !store.textures.contains_key(r) {
                store.textures.insert(r.clone(), Arc::new(load_rgb(&config.resolve(r))?));
            }
        }
        if let Some(room) = &config.room {
            let parts = room
                .file
                .meshes
                .iter()
                .map(|m| {
                    let mesh: MeshAsset = read_json(&room.base_dir.join(&m.mesh))?;
                    Ok(RoomPart {
                        mesh: Arc::new(mesh.to_mesh()?),
                        texture: Arc::new(load_rgb(&room.base_dir.join(&m.texture))?),
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            store.rooms.insert(room.reference.clone(), parts);
        }
        Ok(store)
    }

    pub fn body(&self) -> &ParametricBody {
        &self.body
    }

    pub fn palette(&self) -> &PaletteSpec {
        &self.palette
    }

    pub fn garment(&self, reference: &str) -> Result<&ClothingAsset> {
        self.garments
            .get(reference)
            .ok_or_else(|| Error::AssetMissing(format!("garment '{reference}'")))
    }

    pub fn texture(&self, reference: &str) -> Result<Arc<RgbImage>> {
        self.textures
            .get(reference)
            .cloned()
            .ok_or_else(|| Error::AssetMissing(format!("texture '{reference}'")))
    }

    pub fn room(&self, reference: &str) -> Result<&[RoomPart]> {
        self.rooms
            .get(reference)
            .map(Vec::as_slice)
            .ok_or_else(|| Error::AssetMissing(format!("room '{reference}'")))
    }

    pub fn insert_garment(&mut self, reference: impl Into<String>, asset: ClothingAsset) {
        self.garments.insert(reference.into(), asset);
    }

    pub fn insert_texture(&mut self, reference: impl Into<String>, texture: RgbImage) {
        self.textures.insert(reference.into(), Arc::new(texture));
    }

    pub fn insert_room(&mut self, reference: impl Into<String>, parts: Vec<RoomPart>) {
        self.rooms.insert(reference.into(), parts);
    }
}
