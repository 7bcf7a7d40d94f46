//! End-to-end pipeline driver: stage orchestration, artifact hashing, and
//! input-hash caching so unchanged stages are skipped on re-runs.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::PipelineConfig;
use crate::error::{Error, Result};
use crate::graph::{infer_relations, resolve_collisions, CollisionReport};
use crate::layout::{parse_scene, ParsedScene};
use crate::material::{assignment_map, paint_objects, MaterialDb, PaintedObject};
use crate::model::{validate_scan, ScanDocument, SceneGraph};
use crate::retrieval::{retrieve_assets, AssetDb, RetrievalResult};
use crate::services::build_services;

/// Hex-encoded SHA-256 of `bytes`.
pub fn sha256_hex(bytes: &[u8]) -> String {
    let mut h = Sha256::new();
    h.update(bytes);
    let out = h.finalize();
    let mut s = String::with_capacity(64);
    for b in out {
        use core::fmt::Write;
        let _ = write!(s, "{b:02x}");
    }
    s
}

pub fn sha256_file(path: &Path) -> Result<String> {
    let bytes = std::fs::read(path).map_err(|e| Error::file(path, e))?;
    Ok(sha256_hex(&bytes))
}

#[derive(Debug, Clone, Serialize, Deserialize, Default)]
pub struct StageRecord {
    pub input_hash: String,
    /// Artifact file name -> content hash.
    pub outputs: BTreeMap<String, String>,
    pub skipped: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize, Default)]
pub struct RunManifest {
    pub config_hash: String,
    pub stages: BTreeMap<String, StageRecord>,
    pub log: Vec<String>,
}

pub struct PipelineInput {
    pub scan_path: PathBuf,
    pub frame_dir: PathBuf,
    pub asset_db: Option<PathBuf>,
    pub material_db: Option<PathBuf>,
    pub out_dir: PathBuf,
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<String> {
    let text = serde_json::to_string_pretty(value)?;
    std::fs::write(path, &text).map_err(|e| Error::file(path, e))?;
    Ok(sha256_hex(text.as_bytes()))
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::file(path, e))?;
    Ok(serde_json::from_str(&text)?)
}

fn stage_err(stage: &str, e: Error) -> Error {
    match e {
        e @ Error::Stage { .. } => e,
        e => Error::Stage {
            stage: stage.to_string(),
            source: Box::new(e),
        },
    }
}

/// A stage can be skipped when the previous run used the same input hash
/// and all of its recorded outputs are still on disk, unchanged.
fn can_skip(prev: Option<&StageRecord>, input_hash: &str, out_dir: &Path) -> bool {
    let Some(rec) = prev else { return false };
    if rec.input_hash != input_hash {
        return false;
    }
    rec.outputs.iter().all(|(name, hash)| {
        sha256_file(&out_dir.join(name)).is_ok_and(|h| &h == hash)
    })
}

pub fn run_pipeline(input: &PipelineInput, cfg: &PipelineConfig) -> Result<RunManifest> {
    std::fs::create_dir_all(&input.out_dir).map_err(|e| Error::file(&input.out_dir, e))?;
    let config_hash = cfg.hash();
    let prev: Option<RunManifest> = read_json(&input.out_dir.join("manifest.json")).ok();
    let prev_stages = prev.as_ref().map(|m| &m.stages);
    let mut manifest = RunManifest {
        config_hash: config_hash.clone(),
        ..Default::default()
    };
    let out = &input.out_dir;

    // --- parse ------------------------------------------------------------
    let scan_hash = sha256_file(&input.scan_path).map_err(|e| stage_err("parse", e))?;
    let parse_input = format!("{scan_hash}:{config_hash}");
    let parsed: ParsedScene;
    let mut rec = StageRecord {
        input_hash: parse_input.clone(),
        ..Default::default()
    };
    if can_skip(prev_stages.and_then(|s| s.get("parse")), &parse_input, out) {
        parsed = read_json(&out.join("parsed.json")).map_err(|e| stage_err("parse", e))?;
        rec = prev_stages.unwrap()["parse"].clone();
        rec.skipped = true;
        manifest.log.push("parse: skipped (inputs unchanged)".into());
    } else {
        let doc: ScanDocument = read_json(&input.scan_path).map_err(|e| stage_err("parse", e))?;
        let scene = validate_scan(&doc).map_err(|e| stage_err("parse", e))?;
        let (p, log) = parse_scene(&scene, &cfg.snap).map_err(|e| stage_err("parse", e))?;
        manifest.log.extend(log.into_iter().map(|l| format!("parse: {l}")));
        rec.outputs.insert(
            "parsed.json".into(),
            write_json(&out.join("parsed.json"), &p).map_err(|e| stage_err("parse", e))?,
        );
        parsed = p;
    }
    manifest.stages.insert("parse".into(), rec);

    // --- graph ------------------------------------------------------------
    let parsed_hash = &manifest.stages["parse"].outputs.get("parsed.json").cloned()
        .unwrap_or_else(|| sha256_file(&out.join("parsed.json")).unwrap_or_default());
    let graph_input = format!("{parsed_hash}:{config_hash}");
    let mut rec = StageRecord {
        input_hash: graph_input.clone(),
        ..Default::default()
    };
    let graph: SceneGraph;
    let collision: CollisionReport;
    let resolved: ParsedScene;
    if can_skip(prev_stages.and_then(|s| s.get("graph")), &graph_input, out) {
        graph = read_json(&out.join("graph.json")).map_err(|e| stage_err("graph", e))?;
        collision = read_json(&out.join("collisions.json")).map_err(|e| stage_err("graph", e))?;
        resolved = read_json(&out.join("resolved.json")).map_err(|e| stage_err("graph", e))?;
        rec = prev_stages.unwrap()["graph"].clone();
        rec.skipped = true;
        manifest.log.push("graph: skipped (inputs unchanged)".into());
    } else {
        let g = infer_relations(&parsed, &cfg.graph);
        g.validate().map_err(|e| stage_err("graph", e))?;
        let (objects, rep) = resolve_collisions(&parsed.objects, &g, &parsed.walls, &cfg.snap);
        let r = ParsedScene {
            objects,
            ..parsed.clone()
        };
        rec.outputs.insert(
            "graph.json".into(),
            write_json(&out.join("graph.json"), &g).map_err(|e| stage_err("graph", e))?,
        );
        rec.outputs.insert(
            "collisions.json".into(),
            write_json(&out.join("collisions.json"), &rep).map_err(|e| stage_err("graph", e))?,
        );
        rec.outputs.insert(
            "resolved.json".into(),
            write_json(&out.join("resolved.json"), &r).map_err(|e| stage_err("graph", e))?,
        );
        manifest.log.push(format!(
            "graph: {} edges, collisions resolved={} in {} iterations",
            g.edges.len(),
            rep.resolved,
            rep.iterations_used
        ));
        graph = g;
        collision = rep;
        resolved = r;
    }
    let _ = &collision;
    manifest.stages.insert("graph".into(), rec);

    // --- retrieve ---------------------------------------------------------
    let services = build_services(
        &cfg.services,
        cfg.retrieval.embed_dim,
        cfg.seeds.stub,
        cfg.cache_dir.as_deref().map(Path::new),
        cfg.offline,
    )
    .map_err(|e| stage_err("retrieve", e))?;
    let resolved_hash = manifest.stages["graph"].outputs.get("resolved.json").cloned()
        .unwrap_or_else(|| sha256_file(&out.join("resolved.json")).unwrap_or_default());
    let retrieval: Option<RetrievalResult> = match &input.asset_db {
        None => {
            manifest.log.push("retrieve: no asset database, all placeholders".into());
            None
        }
        Some(db_path) => {
            let retrieve_input = format!("{resolved_hash}:{config_hash}");
            let mut rec = StageRecord {
                input_hash: retrieve_input.clone(),
                ..Default::default()
            };
            let result;
            if can_skip(prev_stages.and_then(|s| s.get("retrieve")), &retrieve_input, out) {
                result = read_json(&out.join("retrieval.json")).map_err(|e| stage_err("retrieve", e))?;
                rec = prev_stages.unwrap()["retrieve"].clone();
                rec.skipped = true;
                manifest.log.push("retrieve: skipped (inputs unchanged)".into());
            } else {
                let db = AssetDb::load(db_path).map_err(|e| stage_err("retrieve", e))?;
                let r = retrieve_assets(
                    &resolved.objects,
                    &resolved.frames,
                    &input.frame_dir,
                    &db,
                    &services,
                    &cfg.retrieval,
                )
                .map_err(|e| stage_err("retrieve", e))?;
                rec.outputs.insert(
                    "retrieval.json".into(),
                    write_json(&out.join("retrieval.json"), &r).map_err(|e| stage_err("retrieve", e))?,
                );
                manifest
                    .log
                    .push(format!("retrieve: {} clusters", r.traces.len()));
                result = r;
            }
            manifest.stages.insert("retrieve".into(), rec);
            Some(result)
        }
    };

    // --- paint ------------------------------------------------------------
    let painted: Vec<PaintedObject> = match &input.material_db {
        None => {
            manifest.log.push("paint: no material library, unpainted".into());
            Vec::new()
        }
        Some(db_path) => {
            let paint_input = format!("{resolved_hash}:{config_hash}");
            let mut rec = StageRecord {
                input_hash: paint_input.clone(),
                ..Default::default()
            };
            let result;
            if can_skip(prev_stages.and_then(|s| s.get("paint")), &paint_input, out) {
                result = read_json(&out.join("paint.json")).map_err(|e| stage_err("paint", e))?;
                rec = prev_stages.unwrap()["paint"].clone();
                rec.skipped = true;
                manifest.log.push("paint: skipped (inputs unchanged)".into());
            } else {
                let db = MaterialDb::load(db_path).map_err(|e| stage_err("paint", e))?;
                let (p, skipped) = paint_objects(
                    &resolved.objects,
                    &resolved.frames,
                    &input.frame_dir,
                    &db,
                    &services,
                    &cfg.material,
                    &out.join("albedo"),
                )
                .map_err(|e| stage_err("paint", e))?;
                for s in &skipped {
                    manifest.log.push(format!("paint: '{s}' skipped (no usable crop)"));
                }
                rec.outputs.insert(
                    "paint.json".into(),
                    write_json(&out.join("paint.json"), &p).map_err(|e| stage_err("paint", e))?,
                );
                for po in &p {
                    if let Some(name) = &po.assignment.shifted_albedo {
                        let path = out.join("albedo").join(name);
                        rec.outputs.insert(
                            format!("albedo/{name}"),
                            sha256_file(&path).map_err(|e| stage_err("paint", e))?,
                        );
                    }
                }
                result = p;
            }
            manifest.stages.insert("paint".into(), rec);
            result
        }
    };

    // --- assemble ---------------------------------------------------------
    let assemble_input = format!(
        "{resolved_hash}:{}:{config_hash}",
        manifest
            .stages
            .values()
            .flat_map(|s| s.outputs.values())
            .cloned()
            .collect::<Vec<_>>()
            .join(",")
    );
    let mut rec = StageRecord {
        input_hash: sha256_hex(assemble_input.as_bytes()),
        ..Default::default()
    };
    if can_skip(prev_stages.and_then(|s| s.get("assemble")), &rec.input_hash, out) {
        rec = prev_stages.unwrap()["assemble"].clone();
        rec.skipped = true;
        manifest.log.push("assemble: skipped (inputs unchanged)".into());
        manifest.stages.insert("assemble".into(), rec);
    } else {
        let empty = BTreeMap::new();
        let assignments = retrieval.as_ref().map(|r| &r.assignments).unwrap_or(&empty);
        let materials = assignment_map(&painted);
        let db = match &input.asset_db {
            Some(p) => Some(AssetDb::load(p).map_err(|e| stage_err("assemble", e))?),
            None => None,
        };
        let (scene, log) = crate::assemble::assemble_scene(
            &crate::assemble::AssembleInput {
                room: &resolved.room,
                segments: &resolved.walls,
                objects: &resolved.objects,
                graph: &graph,
                assignments,
                materials: &materials,
                db: db.as_ref(),
            },
            &cfg.assemble,
            &config_hash,
            &cfg.seeds,
        )
        .map_err(|e| stage_err("assemble", e))?;
        manifest.log.extend(log.into_iter().map(|l| format!("assemble: {l}")));
        rec.outputs.insert(
            "scene.json".into(),
            write_json(&out.join("scene.json"), &scene).map_err(|e| stage_err("assemble", e))?,
        );
        manifest.stages.insert("assemble".into(), rec);
    }

    write_json(&out.join("manifest.json"), &manifest)?;
    Ok(manifest)
}
