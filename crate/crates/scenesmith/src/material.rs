//! Material painting: pick flat, representative patches from object crops,
//! find the closest library material, and shift its albedo so the mean
//! color matches the observation.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use image::RgbImage;
use serde::{Deserialize, Serialize};

use crate::config::MaterialConfig;
use crate::error::{Error, Result};
use crate::model::{CameraFrame, MaterialAssignment, ObjectNode};
use crate::retrieval::{image_embed_bytes, load_rgb};
use crate::services::{cosine, Candidate, SelectionRequest, Services};
use scenesmith_core::color::{lab_mean, lab_to_srgb8, shift_to_target, srgb8_to_lab};
use scenesmith_core::rect::{largest_rectangle, MaskRect};

// ---------------------------------------------------------------------------
// Material library
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct MaterialRecord {
    pub id: String,
    pub family: String,
    pub albedo: String,
    #[serde(default)]
    pub roughness: String,
    #[serde(default)]
    pub metallic: String,
    #[serde(default)]
    pub normal: String,
}

pub struct MaterialDb {
    pub root: PathBuf,
    pub records: Vec<MaterialRecord>,
}

impl MaterialDb {
    pub fn load(root: &Path) -> Result<MaterialDb> {
        let manifest = root.join("manifest.json");
        let text =
            std::fs::read_to_string(&manifest).map_err(|e| Error::file(&manifest, e))?;
        let mut records: Vec<MaterialRecord> = serde_json::from_str(&text)?;
        records.sort_by(|a, b| a.id.cmp(&b.id));
        Ok(MaterialDb {
            root: root.to_path_buf(),
            records,
        })
    }
}

// ---------------------------------------------------------------------------
// Patch extraction
// ---------------------------------------------------------------------------

/// Serializable mirror of the core mask rectangle.
#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq, Eq)]
pub struct PatchRect {
    pub x: usize,
    pub y: usize,
    pub w: usize,
    pub h: usize,
}

impl From<MaskRect> for PatchRect {
    fn from(r: MaskRect) -> Self {
        PatchRect { x: r.x, y: r.y, w: r.w, h: r.h }
    }
}

impl From<PatchRect> for MaskRect {
    fn from(r: PatchRect) -> Self {
        MaskRect { x: r.x, y: r.y, w: r.w, h: r.h }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Patch {
    pub rect: PatchRect,
    pub smoothness: f64,
    pub score: f64,
}

/// Mean Sobel gradient magnitude inside the rect; low values mean a flat,
/// texture-friendly region.
pub fn patch_smoothness(img: &RgbImage, r: &PatchRect) -> f64 {
    let gray = |x: usize, y: usize| -> f64 {
        let p = img.get_pixel(x as u32, y as u32);
        0.299 * p[0] as f64 + 0.587 * p[1] as f64 + 0.114 * p[2] as f64
    };
    let (w, h) = (img.width() as usize, img.height() as usize);
    let mut total = 0.0;
    let mut count = 0usize;
    for y in r.y..r.y + r.h {
        for x in r.x..r.x + r.w {
            if x == 0 || y == 0 || x + 1 >= w || y + 1 >= h {
                continue;
            }
            let gx = gray(x + 1, y - 1) + 2.0 * gray(x + 1, y) + gray(x + 1, y + 1)
                - gray(x - 1, y - 1)
                - 2.0 * gray(x - 1, y)
                - gray(x - 1, y + 1);
            let gy = gray(x - 1, y + 1) + 2.0 * gray(x, y + 1) + gray(x + 1, y + 1)
                - gray(x - 1, y - 1)
                - 2.0 * gray(x, y - 1)
                - gray(x + 1, y - 1);
            total += (gx * gx + gy * gy).sqrt();
            count += 1;
        }
    }
    if count == 0 {
        0.0
    } else {
        total / count as f64
    }
}

/// Top-k axis-aligned patches inside the mask, largest-rectangle first,
/// scored by area over (1 + smoothness). Rectangles below `min_patch_size`
/// in either dimension are discarded.
pub fn extract_patches(
    img: &RgbImage,
    mask: &[bool],
    cfg: &MaterialConfig,
) -> Vec<Patch> {
    let (w, h) = (img.width() as usize, img.height() as usize);
    assert_eq!(mask.len(), w * h);
    let mut mask = mask.to_vec();
    let mut patches = Vec::new();
    while patches.len() < cfg.top_k_patches {
        let Some(r) = largest_rectangle(&mask, w, h) else {
            break;
        };
        let r = PatchRect::from(r);
        if r.w < cfg.min_patch_size || r.h < cfg.min_patch_size {
            break;
        }
        let smoothness = patch_smoothness(img, &r);
        patches.push(Patch {
            score: (r.w * r.h) as f64 / (1.0 + smoothness),
            rect: r,
            smoothness,
        });
        let r = patches.last().unwrap().rect;
        for y in r.y..r.y + r.h {
            for x in r.x..r.x + r.w {
                mask[y * w + x] = false;
            }
        }
    }
    patches.sort_by(|a, b| {
        b.score
            .partial_cmp(&a.score)
            .unwrap()
            .then_with(|| (a.rect.y, a.rect.x).cmp(&(b.rect.y, b.rect.x)))
    });
    patches
}

// ---------------------------------------------------------------------------
// Material search
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MaterialTrace {
    pub family_pool: Vec<String>,
    pub ranked: Vec<String>,
    pub chosen: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

/// Three stages: family filter (full library when the family is unknown),
/// embedding rank of albedos against the patch, oracle confirmation among
/// the leaders.
pub fn search_material(
    patch_img: &RgbImage,
    family: &str,
    db: &MaterialDb,
    services: &Services,
    cfg: &MaterialConfig,
) -> Result<MaterialTrace> {
    let mut note = None;
    let mut pool: Vec<&MaterialRecord> = db
        .records
        .iter()
        .filter(|r| r.family == family)
        .collect();
    if pool.is_empty() {
        pool = db.records.iter().collect();
        if !family.is_empty() {
            note = Some(format!("family '{family}' empty, searching whole library"));
        }
    }
    if pool.is_empty() {
        return Err(Error::EmptyCategory(format!("material family '{family}'")));
    }
    let query = services.embedder.embed(&image_embed_bytes(patch_img))?;
    let mut scored = Vec::new();
    for rec in &pool {
        let albedo = load_rgb(&db.root.join(&rec.albedo))?;
        let emb = services.embedder.embed(&image_embed_bytes(&albedo))?;
        scored.push((rec.id.clone(), cosine(&query, &emb), emb));
    }
    scored.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then_with(|| a.0.cmp(&b.0)));
    scored.truncate(cfg.category_top);
    let ranked: Vec<String> = scored.iter().map(|(id, _, _)| id.clone()).collect();

    let confirm: Vec<Candidate> = scored
        .iter()
        .take(cfg.confirm_top)
        .map(|(id, _, emb)| Candidate {
            id: id.clone(),
            embedding: emb.clone(),
        })
        .collect();
    let req = SelectionRequest {
        prompt: "pick the material that matches the patch".into(),
        query,
        candidates: confirm,
    };
    let chosen = match services.oracle.select(&req) {
        Ok(id) if ranked.contains(&id) => id,
        Ok(_) | Err(Error::Protocol { .. }) => {
            note.get_or_insert_with(|| "oracle unusable, kept rank 1".into());
            ranked[0].clone()
        }
        Err(e) => return Err(e),
    };
    Ok(MaterialTrace {
        family_pool: pool.iter().map(|r| r.id.clone()).collect(),
        ranked,
        chosen,
        note,
    })
}

// ---------------------------------------------------------------------------
// Albedo shifting
// ---------------------------------------------------------------------------

/// Mean LAB color of the pixels inside the rect.
pub fn observed_lab(img: &RgbImage, r: &PatchRect) -> [f64; 3] {
    let mut pixels = Vec::with_capacity(r.w * r.h);
    for y in r.y..r.y + r.h {
        for x in r.x..r.x + r.w {
            pixels.push(srgb8_to_lab(img.get_pixel(x as u32, y as u32).0));
        }
    }
    lab_mean(&pixels)
}

/// Consensus target: component-wise median of per-patch mean colors.
pub fn consensus_target(means: &[[f64; 3]]) -> [f64; 3] {
    assert!(!means.is_empty());
    let mut out = [0.0; 3];
    for c in 0..3 {
        let mut v: Vec<f64> = means.iter().map(|m| m[c]).collect();
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        out[c] = if v.len() % 2 == 1 {
            v[v.len() / 2]
        } else {
            (v[v.len() / 2 - 1] + v[v.len() / 2]) / 2.0
        };
    }
    out
}

pub struct ShiftedAlbedo {
    pub image: RgbImage,
    pub clamped_fraction: f64,
}

/// Shift the albedo so its mean LAB color lands on `target`, clamping to
/// the representable LAB box.
pub fn shift_albedo(albedo: &RgbImage, target: [f64; 3]) -> ShiftedAlbedo {
    let pixels: Vec<[f64; 3]> = albedo.pixels().map(|p| srgb8_to_lab(p.0)).collect();
    let (shifted, stats) = shift_to_target(&pixels, target);
    let mut out = RgbImage::new(albedo.width(), albedo.height());
    for (dst, lab) in out.pixels_mut().zip(&shifted) {
        dst.0 = lab_to_srgb8(*lab);
    }
    ShiftedAlbedo {
        image: out,
        clamped_fraction: stats.clamped_fraction,
    }
}

// ---------------------------------------------------------------------------
// Per-object painting
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PaintedObject {
    pub object_id: String,
    pub assignment: MaterialAssignment,
    pub trace: MaterialTrace,
    pub patches: Vec<Patch>,
}

/// Paint every object that has at least one usable crop. Objects without
/// usable patches are skipped (reported in the result).
pub fn paint_objects(
    objects: &[ObjectNode],
    frames: &[CameraFrame],
    frame_dir: &Path,
    db: &MaterialDb,
    services: &Services,
    cfg: &MaterialConfig,
    out_dir: &Path,
) -> Result<(Vec<PaintedObject>, Vec<String>)> {
    std::fs::create_dir_all(out_dir).map_err(|e| Error::file(out_dir, e))?;
    let mut painted = Vec::new();
    let mut skipped = Vec::new();
    for obj in objects {
        let Some(crop) = obj.crops.first() else {
            skipped.push(obj.id.clone());
            continue;
        };
        let Some(frame) = frames.iter().find(|f| f.id == crop.frame_id) else {
            skipped.push(obj.id.clone());
            continue;
        };
        let img = load_rgb(&frame_dir.join(&frame.image))?;
        let [x, y, w, h] = crop.bbox_px;
        if x + w > img.width() || y + h > img.height() || w == 0 || h == 0 {
            skipped.push(obj.id.clone());
            continue;
        }
        let crop_img = image::imageops::crop_imm(&img, x, y, w, h).to_image();
        let mask = vec![true; (w * h) as usize];
        let patches = extract_patches(&crop_img, &mask, cfg);
        if patches.is_empty() {
            skipped.push(obj.id.clone());
            continue;
        }
        let best = &patches[0];
        let patch_img =
            image::imageops::crop_imm(&crop_img, best.rect.x as u32, best.rect.y as u32, best.rect.w as u32, best.rect.h as u32)
                .to_image();
        let trace = search_material(&patch_img, obj.label.as_str(), db, services, cfg)?;
        let means: Vec<[f64; 3]> = patches
            .iter()
            .map(|p| observed_lab(&crop_img, &p.rect))
            .collect();
        let target = consensus_target(&means);
        let rec = db.records.iter().find(|r| r.id == trace.chosen).unwrap();
        let albedo = load_rgb(&db.root.join(&rec.albedo))?;
        let shifted = shift_albedo(&albedo, target);
        let out_name = format!("{}-albedo.png", obj.id);
        crate::synth::write_png(&out_dir.join(&out_name), &shifted.image)?;
        painted.push(PaintedObject {
            object_id: obj.id.clone(),
            assignment: MaterialAssignment {
                material_id: trace.chosen.clone(),
                target_lab: target,
                clamped_fraction: shifted.clamped_fraction,
                shifted_albedo: Some(out_name),
            },
            trace,
            patches,
        });
    }
    Ok((painted, skipped))
}

/// object id -> assignment, for serialization.
pub fn assignment_map(painted: &[PaintedObject]) -> BTreeMap<String, MaterialAssignment> {
    painted
        .iter()
        .map(|p| (p.object_id.clone(), p.assignment.clone()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{Seeds, ServiceConfig};
    use crate::services::build_services;
    use crate::synth::{self, MaterialSpec};

    fn services() -> Services {
        build_services(&ServiceConfig::default(), 32, Seeds::default().stub, None, true).unwrap()
    }

    fn mat_specs() -> Vec<MaterialSpec> {
        vec![
            MaterialSpec {
                id: "oak".into(),
                family: "table".into(),
                color: [150, 110, 60],
            },
            MaterialSpec {
                id: "walnut".into(),
                family: "table".into(),
                color: [90, 60, 35],
            },
            MaterialSpec {
                id: "steel".into(),
                family: "refrigerator".into(),
                color: [180, 185, 190],
            },
        ]
    }

    #[test]
    fn smoothness_flat_vs_noise() {
        let flat = synth::solid_image(32, 32, [120, 120, 120]);
        let noisy = synth::noise_image(32, 32, 1);
        let r = PatchRect {
            x: 4,
            y: 4,
            w: 24,
            h: 24,
        };
        assert_eq!(patch_smoothness(&flat, &r), 0.0);
        assert!(patch_smoothness(&noisy, &r) > 10.0);
    }

    #[test]
    fn extract_prefers_flat_regions() {
        // Left half flat, right half noise, separated by a masked-out seam
        // so two equal-area rectangles compete on smoothness alone.
        let mut img = synth::noise_image(65, 32, 2);
        for y in 0..32 {
            for x in 0..32 {
                img.put_pixel(x, y, image::Rgb([100, 100, 100]));
            }
        }
        let mut mask = vec![true; 65 * 32];
        for y in 0..32 {
            mask[y * 65 + 32] = false;
        }
        let cfg = MaterialConfig::default();
        let patches = extract_patches(&img, &mask, &cfg);
        assert_eq!(patches.len(), 2);
        // Flattest patch wins despite equal candidate areas.
        assert_eq!(patches[0].rect.x, 0);
        assert!(patches[0].smoothness < patches[1].smoothness);
    }

    #[test]
    fn extract_respects_min_size_and_k() {
        let img = synth::solid_image(40, 40, [50, 50, 50]);
        let cfg = MaterialConfig::default();
        let mask = vec![true; 40 * 40];
        let patches = extract_patches(&img, &mask, &cfg);
        assert!(patches.len() <= cfg.top_k_patches);
        for p in &patches {
            assert!(p.rect.w >= cfg.min_patch_size && p.rect.h >= cfg.min_patch_size);
        }
        // Tiny mask yields nothing.
        let tiny = synth::solid_image(8, 8, [50, 50, 50]);
        assert!(extract_patches(&tiny, &[true; 64], &cfg).is_empty());
    }

    #[test]
    fn search_prefers_matching_family_and_color() {
        let dir = tempfile::tempdir().unwrap();
        synth::make_material_db(dir.path(), &mat_specs()).unwrap();
        let db = MaterialDb::load(dir.path()).unwrap();
        // Patch identical to the oak albedo.
        let patch = synth::solid_image(16, 16, [150, 110, 60]);
        let trace = search_material(&patch, "table", &db, &services(), &MaterialConfig::default()).unwrap();
        assert_eq!(trace.chosen, "oak");
        assert_eq!(trace.family_pool, vec!["oak".to_string(), "walnut".to_string()]);
    }

    #[test]
    fn search_falls_back_to_full_library() {
        let dir = tempfile::tempdir().unwrap();
        synth::make_material_db(dir.path(), &mat_specs()).unwrap();
        let db = MaterialDb::load(dir.path()).unwrap();
        let patch = synth::solid_image(16, 16, [180, 185, 190]);
        let trace = search_material(&patch, "bathtub", &db, &services(), &MaterialConfig::default()).unwrap();
        assert_eq!(trace.chosen, "steel");
        assert!(trace.note.as_deref().unwrap().contains("bathtub"));
        assert_eq!(trace.family_pool.len(), 3);
    }

    #[test]
    fn consensus_is_component_median() {
        let means = [[10.0, 0.0, 5.0], [20.0, 2.0, -5.0], [90.0, 4.0, 0.0]];
        assert_eq!(consensus_target(&means), [20.0, 2.0, 0.0]);
        let two = [[10.0, 0.0, 0.0], [20.0, 4.0, 2.0]];
        assert_eq!(consensus_target(&two), [15.0, 2.0, 1.0]);
    }

    #[test]
    fn shift_moves_mean_to_target() {
        let albedo = synth::solid_image(8, 8, [100, 120, 140]);
        let target = srgb8_to_lab([60, 180, 75]);
        let shifted = shift_albedo(&albedo, target);
        let mean = observed_lab(
            &shifted.image,
            &PatchRect {
                x: 0,
                y: 0,
                w: 8,
                h: 8,
            },
        );
        // Mean lands on the target up to 8-bit quantization.
        for c in 0..3 {
            assert!((mean[c] - target[c]).abs() < 1.0, "{mean:?} vs {target:?}");
        }
        assert_eq!(shifted.clamped_fraction, 0.0);
    }

    #[test]
    fn extreme_shift_reports_clamping() {
        let albedo = synth::solid_image(8, 8, [250, 250, 250]);
        // Push lightness far beyond the representable range.
        let shifted = shift_albedo(&albedo, [150.0, 0.0, 0.0]);
        assert!(shifted.clamped_fraction > 0.99);
    }
}
