//! Hierarchical asset retrieval: semantic filter, visual ranking,
//! pose-aware re-ranking, and a final contextual selection, with
//! identical-object clustering so repeated furniture shares one asset.

use std::collections::BTreeMap;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use image::RgbImage;
use serde::{Deserialize, Serialize};

use crate::config::RetrievalConfig;
use crate::error::{Error, Result};
use crate::model::{Category, CameraFrame, ObjectNode};
use crate::services::{cosine, Candidate, SelectionRequest, Services};
use scenesmith_core::kmeans::select_k_by_silhouette;

// ---------------------------------------------------------------------------
// Asset database
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct AssetRecord {
    pub id: String,
    pub category: Category,
    #[serde(default)]
    pub subcategory: String,
    /// Mesh path relative to the database root.
    pub mesh: String,
    /// Rendered view images relative to the database root.
    pub views: Vec<String>,
    /// Physical dimensions (w, h, l) of the canonical mesh, meters.
    pub dims: [f64; 3],
    #[serde(default)]
    pub articulated: bool,
}

pub struct AssetDb {
    pub root: PathBuf,
    pub records: Vec<AssetRecord>,
}

impl AssetDb {
    pub fn load(root: &Path) -> Result<AssetDb> {
        let manifest = root.join("manifest.json");
        let text = std::fs::read_to_string(&manifest)
            .map_err(|e| Error::file(&manifest, e))?;
        let mut records: Vec<AssetRecord> = serde_json::from_str(&text)?;
        records.sort_by(|a, b| a.id.cmp(&b.id));
        Ok(AssetDb {
            root: root.to_path_buf(),
            records,
        })
    }

    pub fn get(&self, id: &str) -> Option<&AssetRecord> {
        self.records.iter().find(|r| r.id == id)
    }

    /// Per-view embeddings for an asset, read from the `.ssem` sidecar when
    /// present, otherwise computed from the view images and written back.
    pub fn view_embeddings(&self, rec: &AssetRecord, services: &Services) -> Result<Vec<Vec<f64>>> {
        let sidecar = self.root.join(format!("{}.ssem", rec.id));
        if sidecar.exists() {
            let embs = read_ssem(&sidecar)?;
            if embs.len() == rec.views.len() {
                return Ok(embs);
            }
        }
        let mut embs = Vec::new();
        for v in &rec.views {
            let img = load_rgb(&self.root.join(v))?;
            embs.push(services.embedder.embed(&image_embed_bytes(&img))?);
        }
        if write_ssem(&sidecar, &embs).is_err() {
            // Read-only databases are fine; embeddings are recomputed.
        }
        Ok(embs)
    }
}

/// Canonical byte form of an image for embedding: dims header plus raw RGB,
/// so identical pixels embed identically regardless of file encoding.
pub fn image_embed_bytes(img: &RgbImage) -> Vec<u8> {
    let mut out = Vec::with_capacity(8 + img.as_raw().len());
    out.extend_from_slice(&img.width().to_le_bytes());
    out.extend_from_slice(&img.height().to_le_bytes());
    out.extend_from_slice(img.as_raw());
    out
}

pub fn load_rgb(path: &Path) -> Result<RgbImage> {
    Ok(image::open(path)
        .map_err(|e| Error::file(path, std::io::Error::other(e.to_string())))?
        .to_rgb8())
}

// ---------------------------------------------------------------------------
// Embedding sidecar format: magic "SSEM", u32 LE count, u32 LE dim,
// then count*dim f32 LE values, row-major.
// ---------------------------------------------------------------------------

pub fn write_ssem(path: &Path, embeddings: &[Vec<f64>]) -> Result<()> {
    let dim = embeddings.first().map_or(0, Vec::len);
    let mut f = std::fs::File::create(path).map_err(|e| Error::file(path, e))?;
    f.write_all(b"SSEM").map_err(|e| Error::file(path, e))?;
    f.write_all(&(embeddings.len() as u32).to_le_bytes())
        .map_err(|e| Error::file(path, e))?;
    f.write_all(&(dim as u32).to_le_bytes())
        .map_err(|e| Error::file(path, e))?;
    for row in embeddings {
        for &v in row {
            f.write_all(&(v as f32).to_le_bytes())
                .map_err(|e| Error::file(path, e))?;
        }
    }
    Ok(())
}

pub fn read_ssem(path: &Path) -> Result<Vec<Vec<f64>>> {
    let mut f = std::fs::File::open(path).map_err(|e| Error::file(path, e))?;
    let mut header = [0u8; 12];
    f.read_exact(&mut header).map_err(|e| Error::file(path, e))?;
    if &header[..4] != b"SSEM" {
        return Err(Error::file(
            path,
            std::io::Error::other("bad magic, expected SSEM"),
        ));
    }
    let count = u32::from_le_bytes(header[4..8].try_into().unwrap()) as usize;
    let dim = u32::from_le_bytes(header[8..12].try_into().unwrap()) as usize;
    let mut body = vec![0u8; count * dim * 4];
    f.read_exact(&mut body).map_err(|e| Error::file(path, e))?;
    let mut out = Vec::with_capacity(count);
    for r in 0..count {
        let mut row = Vec::with_capacity(dim);
        for c in 0..dim {
            let off = (r * dim + c) * 4;
            row.push(f32::from_le_bytes(body[off..off + 4].try_into().unwrap()) as f64);
        }
        out.push(row);
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Stages
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StageTrace {
    pub stage: String,
    pub candidates: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RetrievalTrace {
    pub object_ids: Vec<String>,
    pub stages: Vec<StageTrace>,
    pub chosen: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RetrievalResult {
    /// object id -> asset id
    pub assignments: BTreeMap<String, String>,
    pub traces: Vec<RetrievalTrace>,
}

/// Stage 1: restrict the database by subcategory, falling back to the whole
/// category when the subcategory has no assets.
pub fn semantic_filter<'a>(
    db: &'a AssetDb,
    category: Category,
    subcategory: &str,
) -> Result<(Vec<&'a AssetRecord>, Option<String>)> {
    if !subcategory.is_empty() {
        let narrow: Vec<&AssetRecord> = db
            .records
            .iter()
            .filter(|r| r.category == category && r.subcategory == subcategory)
            .collect();
        if !narrow.is_empty() {
            return Ok((narrow, None));
        }
    }
    let broad: Vec<&AssetRecord> = db
        .records
        .iter()
        .filter(|r| r.category == category)
        .collect();
    if broad.is_empty() {
        return Err(Error::EmptyCategory(category.as_str().to_string()));
    }
    let note = if subcategory.is_empty() {
        None
    } else {
        Some(format!("subcategory '{subcategory}' empty, widened to category"))
    };
    Ok((broad, note))
}

/// Stage 2: rank candidates by mean-over-crops of max-over-views cosine
/// similarity. Ties break toward the smaller asset id.
pub fn visual_rank(
    candidates: &[&AssetRecord],
    crop_embeddings: &[Vec<f64>],
    db: &AssetDb,
    services: &Services,
) -> Result<Vec<(String, f64)>> {
    let mut scored = Vec::with_capacity(candidates.len());
    for rec in candidates {
        let views = db.view_embeddings(rec, services)?;
        let score = if crop_embeddings.is_empty() || views.is_empty() {
            0.0
        } else {
            crop_embeddings
                .iter()
                .map(|c| {
                    views
                        .iter()
                        .map(|v| cosine(c, v))
                        .fold(f64::MIN, f64::max)
                })
                .sum::<f64>()
                / crop_embeddings.len() as f64
        };
        scored.push((rec.id.clone(), score));
    }
    scored.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then_with(|| a.0.cmp(&b.0)));
    Ok(scored)
}

/// Retrieve one asset per cluster of objects, tracing every stage.
pub fn retrieve_assets(
    objects: &[ObjectNode],
    frames: &[CameraFrame],
    frame_dir: &Path,
    db: &AssetDb,
    services: &Services,
    cfg: &RetrievalConfig,
) -> Result<RetrievalResult> {
    let clusters = cluster_identical(objects, frames, frame_dir, services, cfg)?;
    let mut assignments = BTreeMap::new();
    let mut traces = Vec::new();
    for cluster in &clusters {
        let members: Vec<&ObjectNode> = cluster
            .iter()
            .map(|id| objects.iter().find(|o| &o.id == id).expect("cluster member"))
            .collect();
        let rep = members[0];
        let mut stages = Vec::new();

        // Stage 1.
        let (pool, note) = semantic_filter(db, rep.label, &rep.subcategory)?;
        stages.push(StageTrace {
            stage: "semantic".into(),
            candidates: pool.iter().map(|r| r.id.clone()).collect(),
            note,
        });

        // Stage 2: all member crops vote.
        let mut crop_embs = Vec::new();
        for m in &members {
            crop_embs.extend(crop_embeddings(m, frames, frame_dir, services)?);
        }
        let ranked = visual_rank(&pool, &crop_embs, db, services)?;
        let top2: Vec<(String, f64)> = ranked.into_iter().take(cfg.stage2_top).collect();
        stages.push(StageTrace {
            stage: "visual".into(),
            candidates: top2.iter().map(|(id, _)| id.clone()).collect(),
            note: None,
        });

        // Stage 3: no renderer available in this build; keep the visual
        // order and narrow the list.
        let top3: Vec<String> = top2
            .iter()
            .take(cfg.stage3_top)
            .map(|(id, _)| id.clone())
            .collect();
        stages.push(StageTrace {
            stage: "pose".into(),
            candidates: top3.clone(),
            note: Some("no renderer; visual order kept".into()),
        });

        // Stage 4: oracle choice among stage-3 candidates; anything invalid
        // falls back to the stage-3 leader.
        let query = mean_embedding(&crop_embs, services.embedder.dim());
        let mut cands = Vec::new();
        for id in &top3 {
            let rec = db.get(id).expect("stage3 candidate");
            let views = db.view_embeddings(rec, services)?;
            cands.push(Candidate {
                id: id.clone(),
                embedding: mean_embedding(&views, services.embedder.dim()),
            });
        }
        let req = SelectionRequest {
            prompt: format!("pick the best {} match", rep.label.as_str()),
            query,
            candidates: cands,
        };
        let (chosen, note) = match services.oracle.select(&req) {
            Ok(id) if top3.contains(&id) => (id, None),
            Ok(id) => (
                top3[0].clone(),
                Some(format!("oracle returned unknown id '{id}'")),
            ),
            Err(Error::Protocol { message, .. }) => {
                (top3[0].clone(), Some(format!("oracle protocol error: {message}")))
            }
            Err(e) => return Err(e),
        };
        stages.push(StageTrace {
            stage: "contextual".into(),
            candidates: vec![chosen.clone()],
            note,
        });

        for m in &members {
            assignments.insert(m.id.clone(), chosen.clone());
        }
        traces.push(RetrievalTrace {
            object_ids: cluster.clone(),
            stages,
            chosen,
        });
    }
    Ok(RetrievalResult {
        assignments,
        traces,
    })
}

fn mean_embedding(rows: &[Vec<f64>], dim: usize) -> Vec<f64> {
    if rows.is_empty() {
        return vec![0.0; dim];
    }
    let mut out = vec![0.0; rows[0].len()];
    for r in rows {
        for (o, v) in out.iter_mut().zip(r) {
            *o += v;
        }
    }
    for o in &mut out {
        *o /= rows.len() as f64;
    }
    out
}

/// Decode and embed every crop of an object.
pub fn crop_embeddings(
    obj: &ObjectNode,
    frames: &[CameraFrame],
    frame_dir: &Path,
    services: &Services,
) -> Result<Vec<Vec<f64>>> {
    let mut out = Vec::new();
    for crop in &obj.crops {
        let Some(frame) = frames.iter().find(|f| f.id == crop.frame_id) else {
            continue;
        };
        let img = load_rgb(&frame_dir.join(&frame.image))?;
        let [x, y, w, h] = crop.bbox_px;
        if x + w > img.width() || y + h > img.height() || w == 0 || h == 0 {
            continue;
        }
        let view = image::imageops::crop_imm(&img, x, y, w, h).to_image();
        out.push(services.embedder.embed(&image_embed_bytes(&view))?);
    }
    Ok(out)
}

/// Group same-category objects that look identical so they share one asset.
/// Cluster count is chosen by silhouette over mean crop embeddings, then
/// clusters are split by dominant color.
pub fn cluster_identical(
    objects: &[ObjectNode],
    frames: &[CameraFrame],
    frame_dir: &Path,
    services: &Services,
    cfg: &RetrievalConfig,
) -> Result<Vec<Vec<String>>> {
    let mut by_cat: BTreeMap<(String, String), Vec<usize>> = BTreeMap::new();
    for (i, o) in objects.iter().enumerate() {
        by_cat
            .entry((o.label.as_str().to_string(), o.subcategory.clone()))
            .or_default()
            .push(i);
    }
    let mut clusters = Vec::new();
    for (_, idxs) in by_cat {
        if idxs.len() == 1 {
            clusters.push(vec![objects[idxs[0]].id.clone()]);
            continue;
        }
        // Feature per object: mean crop embedding.
        let mut feats = Vec::new();
        let mut colors = Vec::new();
        let mut ok = true;
        for &i in &idxs {
            let embs = crop_embeddings(&objects[i], frames, frame_dir, services)?;
            if embs.is_empty() {
                ok = false;
                break;
            }
            feats.push(mean_embedding(&embs, services.embedder.dim()));
            colors.push(dominant_color_bin(&objects[i], frames, frame_dir)?);
        }
        if !ok {
            // Missing crops: keep everything separate.
            for &i in &idxs {
                clusters.push(vec![objects[i].id.clone()]);
            }
            continue;
        }
        let k_max = idxs.len().saturating_sub(1).min(cfg.cluster_k_max);
        let labels = if k_max < 2 {
            vec![0usize; idxs.len()]
        } else {
            select_k_by_silhouette(&feats, k_max, crate::config::Seeds::default().kmeans).labels
        };
        // Subdivide by dominant color: same embedding cluster but a
        // different color bin means a different physical object.
        let mut sub: BTreeMap<(usize, Option<usize>), Vec<String>> = BTreeMap::new();
        for (j, &i) in idxs.iter().enumerate() {
            sub.entry((labels[j], colors[j]))
                .or_default()
                .push(objects[i].id.clone());
        }
        clusters.extend(sub.into_values());
    }
    clusters.sort();
    Ok(clusters)
}

/// Dominant 4x4x4 RGB histogram bin of the object's best crop.
fn dominant_color_bin(
    obj: &ObjectNode,
    frames: &[CameraFrame],
    frame_dir: &Path,
) -> Result<Option<usize>> {
    let Some(crop) = obj.crops.first() else {
        return Ok(None);
    };
    let Some(frame) = frames.iter().find(|f| f.id == crop.frame_id) else {
        return Ok(None);
    };
    let img = load_rgb(&frame_dir.join(&frame.image))?;
    let [x, y, w, h] = crop.bbox_px;
    if x + w > img.width() || y + h > img.height() || w == 0 || h == 0 {
        return Ok(None);
    }
    let mut hist = [0usize; 64];
    for py in y..y + h {
        for px in x..x + w {
            let p = img.get_pixel(px, py);
            let bin = (p[0] as usize / 64) * 16 + (p[1] as usize / 64) * 4 + p[2] as usize / 64;
            hist[bin] += 1;
        }
    }
    Ok(Some(
        hist.iter()
            .enumerate()
            .max_by_key(|&(i, &c)| (c, usize::MAX - i))
            .map(|(i, _)| i)
            .unwrap(),
    ))
}

/// The candidate lists must form a chain: each stage's list is a subset of
/// the previous stage's.
pub fn trace_is_subset_chain(trace: &RetrievalTrace) -> bool {
    for w in trace.stages.windows(2) {
        let prev = &w[0].candidates;
        if !w[1].candidates.iter().all(|c| prev.contains(c)) {
            return false;
        }
    }
    trace
        .stages
        .last()
        .is_none_or(|s| s.candidates.contains(&trace.chosen))
}
