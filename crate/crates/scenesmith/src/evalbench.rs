//! Similarity benchmark: geometric distance between detected and retrieved
//! meshes after unit-cube normalization, and image-space fidelity from
//! representative camera views.

use std::collections::BTreeMap;
use std::path::Path;

use image::RgbImage;
use serde::{Deserialize, Serialize};

use crate::config::BenchConfig;
use crate::error::{Error, Result};
use crate::model::{CameraFrame, ObjectNode};
use scenesmith_core::mesh::{normalize_mesh, MeshError, TriMesh};
use scenesmith_core::metrics::{chamfer_l1, rmse, ssim};
use scenesmith_core::sampling::sample_surface;

// ---------------------------------------------------------------------------
// OBJ subset loader: `v x y z` and `f i j k ...` (fan-triangulated),
// slash-qualified indices accepted, everything else ignored.
// ---------------------------------------------------------------------------

pub fn load_obj(path: &Path) -> Result<TriMesh> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::file(path, e))?;
    parse_obj(&text).map_err(|msg| Error::file(path, std::io::Error::other(msg)))
}

pub fn parse_obj(text: &str) -> std::result::Result<TriMesh, String> {
    let mut vertices: Vec<[f64; 3]> = Vec::new();
    let mut triangles: Vec<[u32; 3]> = Vec::new();
    for (ln, line) in text.lines().enumerate() {
        let mut it = line.split_whitespace();
        match it.next() {
            Some("v") => {
                let mut v = [0.0; 3];
                for c in &mut v {
                    *c = it
                        .next()
                        .ok_or_else(|| format!("line {}: short vertex", ln + 1))?
                        .parse::<f64>()
                        .map_err(|e| format!("line {}: {e}", ln + 1))?;
                }
                vertices.push(v);
            }
            Some("f") => {
                let idx: Vec<usize> = it
                    .map(|tok| {
                        let first = tok.split('/').next().unwrap_or(tok);
                        let i: i64 = first
                            .parse()
                            .map_err(|e| format!("line {}: {e}", ln + 1))?;
                        let i = if i < 0 {
                            vertices.len() as i64 + i
                        } else {
                            i - 1
                        };
                        if i < 0 || i as usize >= vertices.len() {
                            return Err(format!("line {}: index {} out of range", ln + 1, first));
                        }
                        Ok(i as usize)
                    })
                    .collect::<std::result::Result<_, String>>()?;
                if idx.len() < 3 {
                    return Err(format!("line {}: face with {} vertices", ln + 1, idx.len()));
                }
                for k in 1..idx.len() - 1 {
                    triangles.push([idx[0] as u32, idx[k] as u32, idx[k + 1] as u32]);
                }
            }
            _ => {}
        }
    }
    Ok(TriMesh {
        vertices,
        triangles,
    })
}

// ---------------------------------------------------------------------------
// Mesh similarity
// ---------------------------------------------------------------------------

fn mesh_err(e: MeshError) -> Error {
    Error::Geometry(format!("mesh normalization failed: {e:?}"))
}

/// Bidirectional L1 Chamfer distance between two meshes after unit-cube
/// normalization, from `n` surface samples each.
pub fn mesh_chamfer(a: &TriMesh, b: &TriMesh, n: usize, seed: u64) -> Result<f64> {
    let na = normalize_mesh(a).map_err(mesh_err)?;
    let nb = normalize_mesh(b).map_err(mesh_err)?;
    // Same seed on both sides: identical normalized meshes sample
    // identically, making self-distance exactly zero.
    let pa = sample_surface(&na, n, seed);
    let pb = sample_surface(&nb, n, seed);
    Ok(chamfer_l1(&pa, &pb))
}

// ---------------------------------------------------------------------------
// Representative views
// ---------------------------------------------------------------------------

/// Frames ranked by how many of the object's corners they see; the best
/// `count` frames are returned. An object no frame sees is an error.
pub fn select_representative_views<'a>(
    obj: &ObjectNode,
    frames: &'a [CameraFrame],
    count: usize,
) -> Result<Vec<&'a CameraFrame>> {
    let corners = obj.obb.corners();
    let mut scored: Vec<(usize, &CameraFrame)> = frames
        .iter()
        .map(|f| {
            let visible = corners.iter().filter(|c| f.sees(c.to_array())).count();
            (visible, f)
        })
        .filter(|(v, _)| *v > 0)
        .collect();
    if scored.is_empty() {
        return Err(Error::Geometry(format!(
            "object '{}' is unobserved by every frame",
            obj.id
        )));
    }
    scored.sort_by(|a, b| b.0.cmp(&a.0).then_with(|| a.1.id.cmp(&b.1.id)));
    Ok(scored.into_iter().take(count).map(|(_, f)| f).collect())
}

// ---------------------------------------------------------------------------
// Image metrics
// ---------------------------------------------------------------------------

fn luminance(img: &RgbImage) -> Vec<f64> {
    img.pixels()
        .map(|p| (0.299 * p[0] as f64 + 0.587 * p[1] as f64 + 0.114 * p[2] as f64) / 255.0)
        .collect()
}

pub fn image_rmse(a: &RgbImage, b: &RgbImage) -> Result<f64> {
    check_dims(a, b)?;
    Ok(rmse(&luminance(a), &luminance(b)))
}

pub fn image_ssim(a: &RgbImage, b: &RgbImage) -> Result<f64> {
    check_dims(a, b)?;
    Ok(ssim(
        &luminance(a),
        &luminance(b),
        a.width() as usize,
        a.height() as usize,
    ))
}

fn check_dims(a: &RgbImage, b: &RgbImage) -> Result<()> {
    if a.dimensions() != b.dimensions() {
        return Err(Error::Geometry(format!(
            "image size mismatch: {:?} vs {:?}",
            a.dimensions(),
            b.dimensions()
        )));
    }
    Ok(())
}

/// Run the configured external metric command on two image files.
pub fn external_metric(cmd: &str, a: &Path, b: &Path) -> Result<f64> {
    let out = std::process::Command::new(cmd)
        .arg(a)
        .arg(b)
        .output()
        .map_err(|e| Error::Bench(format!("external metric '{cmd}': {e}")))?;
    if !out.status.success() {
        return Err(Error::Bench(format!(
            "external metric '{cmd}' exited with {}",
            out.status
        )));
    }
    String::from_utf8_lossy(&out.stdout)
        .trim()
        .parse()
        .map_err(|e| Error::Bench(format!("external metric '{cmd}' output: {e}")))
}

// ---------------------------------------------------------------------------
// Benchmark aggregation
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InstanceRow {
    pub object_id: String,
    pub category: String,
    pub asset_id: String,
    pub chamfer: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rmse: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ssim: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub external: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ClassRow {
    pub category: String,
    pub count: usize,
    pub chamfer: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rmse: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ssim: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MetricReport {
    pub instances: Vec<InstanceRow>,
    pub classes: Vec<ClassRow>,
    pub overall_chamfer: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub overall_rmse: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub overall_ssim: Option<f64>,
}

fn mean(v: impl Iterator<Item = f64>) -> Option<f64> {
    let v: Vec<f64> = v.collect();
    if v.is_empty() {
        None
    } else {
        Some(v.iter().sum::<f64>() / v.len() as f64)
    }
}

/// Aggregate instance rows into per-class means and overall means. The
/// overall mean equals the count-weighted mean of the class means.
pub fn aggregate(mut instances: Vec<InstanceRow>) -> MetricReport {
    instances.sort_by(|a, b| a.object_id.cmp(&b.object_id));
    let mut by_class: BTreeMap<&str, Vec<&InstanceRow>> = BTreeMap::new();
    for row in &instances {
        by_class.entry(&row.category).or_default().push(row);
    }
    let classes: Vec<ClassRow> = by_class
        .iter()
        .map(|(cat, rows)| ClassRow {
            category: cat.to_string(),
            count: rows.len(),
            chamfer: mean(rows.iter().map(|r| r.chamfer)).unwrap(),
            rmse: mean(rows.iter().filter_map(|r| r.rmse)),
            ssim: mean(rows.iter().filter_map(|r| r.ssim)),
        })
        .collect();
    let overall_chamfer = mean(instances.iter().map(|r| r.chamfer)).unwrap_or(0.0);
    let overall_rmse = mean(instances.iter().filter_map(|r| r.rmse));
    let overall_ssim = mean(instances.iter().filter_map(|r| r.ssim));
    MetricReport {
        instances,
        classes,
        overall_chamfer,
        overall_rmse,
        overall_ssim,
    }
}

pub fn report_markdown(report: &MetricReport) -> String {
    let mut out = String::new();
    out.push_str("| category | count | chamfer | rmse | ssim |\n");
    out.push_str("|---|---|---|---|---|\n");
    let fmt = |v: Option<f64>| v.map_or("-".to_string(), |x| format!("{x:.4}"));
    for c in &report.classes {
        out.push_str(&format!(
            "| {} | {} | {:.4} | {} | {} |\n",
            c.category,
            c.count,
            c.chamfer,
            fmt(c.rmse),
            fmt(c.ssim)
        ));
    }
    out.push_str(&format!(
        "| **all** | {} | {:.4} | {} | {} |\n",
        report.instances.len(),
        report.overall_chamfer,
        fmt(report.overall_rmse),
        fmt(report.overall_ssim)
    ));
    out
}

// ---------------------------------------------------------------------------
// CSV-driven benchmark: `mesh_a,mesh_b[,image_a,image_b]` per line, paths
// relative to the CSV file, `#` comments and a header line allowed.
// ---------------------------------------------------------------------------

pub struct BenchPair {
    pub object_id: String,
    pub category: String,
    pub mesh_a: String,
    pub mesh_b: String,
    pub image_a: Option<String>,
    pub image_b: Option<String>,
}

pub fn read_pairs_csv(path: &Path) -> Result<Vec<BenchPair>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::file(path, e))?;
    let mut out = Vec::new();
    for (ln, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let cols: Vec<&str> = line.split(',').map(str::trim).collect();
        if ln == 0 && cols.first() == Some(&"object_id") {
            continue;
        }
        if cols.len() != 4 && cols.len() != 6 {
            return Err(Error::Bench(format!(
                "{}:{}: expected 4 or 6 columns, found {}",
                path.display(),
                ln + 1,
                cols.len()
            )));
        }
        out.push(BenchPair {
            object_id: cols[0].to_string(),
            category: cols[1].to_string(),
            mesh_a: cols[2].to_string(),
            mesh_b: cols[3].to_string(),
            image_a: cols.get(4).map(|s| s.to_string()),
            image_b: cols.get(5).map(|s| s.to_string()),
        });
    }
    Ok(out)
}

pub fn run_benchmark(pairs: &[BenchPair], base: &Path, cfg: &BenchConfig, seed: u64) -> Result<MetricReport> {
    let mut rows = Vec::new();
    for p in pairs {
        let a = load_obj(&base.join(&p.mesh_a))?;
        let b = load_obj(&base.join(&p.mesh_b))?;
        let chamfer = mesh_chamfer(&a, &b, cfg.sample_count, seed)?;
        let (mut rm, mut ss, mut ext) = (None, None, None);
        if let (Some(ia), Some(ib)) = (&p.image_a, &p.image_b) {
            let ia_path = base.join(ia);
            let ib_path = base.join(ib);
            let img_a = crate::retrieval::load_rgb(&ia_path)?;
            let img_b = crate::retrieval::load_rgb(&ib_path)?;
            rm = Some(image_rmse(&img_a, &img_b)?);
            ss = Some(image_ssim(&img_a, &img_b)?);
            if let Some(cmd) = &cfg.external_metric {
                ext = Some(external_metric(cmd, &ia_path, &ib_path)?);
            }
        }
        rows.push(InstanceRow {
            object_id: p.object_id.clone(),
            category: p.category.clone(),
            asset_id: p.mesh_b.clone(),
            chamfer,
            rmse: rm,
            ssim: ss,
            external: ext,
        });
    }
    Ok(aggregate(rows))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Intrinsics, OrientedBox};
    use crate::synth;
    use scenesmith_core::mesh::box_mesh;

    #[test]
    fn obj_round_trip() {
        let mesh = box_mesh([0.5, -1.0, 2.0], [1.0, 2.0, 3.0]);
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("m.obj");
        synth::write_obj(&p, &mesh).unwrap();
        let back = load_obj(&p).unwrap();
        assert_eq!(back.vertices, mesh.vertices);
        assert_eq!(back.triangles, mesh.triangles);
    }

    #[test]
    fn obj_parses_quads_and_slashes() {
        let text = "v 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\nvn 0 0 1\nf 1/1/1 2/2/1 3/3/1 4/4/1\n";
        let mesh = parse_obj(text).unwrap();
        assert_eq!(mesh.vertices.len(), 4);
        assert_eq!(mesh.triangles, vec![[0, 1, 2], [0, 2, 3]]);
    }

    #[test]
    fn obj_negative_indices() {
        let text = "v 0 0 0\nv 1 0 0\nv 0 1 0\nf -3 -2 -1\n";
        assert_eq!(parse_obj(text).unwrap().triangles, vec![[0, 1, 2]]);
    }

    #[test]
    fn obj_bad_face_is_error() {
        assert!(parse_obj("v 0 0 0\nf 1 2 3\n").is_err());
        assert!(parse_obj("v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2\n").is_err());
    }

    #[test]
    fn chamfer_self_is_zero_after_normalization() {
        // Same shape at different scales and offsets normalizes identically.
        let a = box_mesh([0.0, 0.0, 0.0], [1.0, 2.0, 0.5]);
        let b = box_mesh([10.0, -4.0, 2.0], [2.0, 4.0, 1.0]);
        let d = mesh_chamfer(&a, &b, 2000, 7).unwrap();
        assert!(d < 1e-12, "chamfer {d}");
    }

    #[test]
    fn chamfer_differs_for_different_shapes() {
        let a = box_mesh([0.0; 3], [1.0, 1.0, 1.0]);
        let b = box_mesh([0.0; 3], [1.0, 1.0, 0.1]);
        let d = mesh_chamfer(&a, &b, 2000, 7).unwrap();
        assert!(d > 0.05, "chamfer {d}");
    }

    fn looking_frame(id: &str) -> CameraFrame {
        // Camera at origin looking along +Z (world == camera).
        CameraFrame {
            id: id.into(),
            pose: [
                [1.0, 0.0, 0.0, 0.0],
                [0.0, 1.0, 0.0, 0.0],
                [0.0, 0.0, 1.0, 0.0],
                [0.0, 0.0, 0.0, 1.0],
            ],
            intrinsics: Intrinsics {
                fx: 100.0,
                fy: 100.0,
                cx: 64.0,
                cy: 64.0,
                width: 128,
                height: 128,
            },
            image: format!("{id}.png"),
        }
    }

    fn away_frame(id: &str) -> CameraFrame {
        // Looking along -Z: the test object sits behind it.
        let mut f = looking_frame(id);
        f.pose[0][0] = -1.0;
        f.pose[2][2] = -1.0;
        f
    }

    #[test]
    fn views_ranked_and_unobserved_errors() {
        let obj = ObjectNode {
            id: "o".into(),
            obb: OrientedBox {
                center: [0.0, 0.0, 3.0],
                dims: [0.4, 0.4, 0.4],
                yaw: 0.0,
                pitch: 0.0,
                roll: 0.0,
            },
            label: crate::model::Category::Table,
            subcategory: String::new(),
            crops: vec![],
            wall_attachment: None,
            articulated: false,
            movable: true,
        };
        let frames = vec![away_frame("f-away"), looking_frame("f-see")];
        let views = select_representative_views(&obj, &frames, 4).unwrap();
        assert_eq!(views.len(), 1);
        assert_eq!(views[0].id, "f-see");
        let blind = vec![away_frame("f-away")];
        assert!(select_representative_views(&obj, &blind, 4).is_err());
    }

    #[test]
    fn image_metrics_self_identity() {
        let img = synth::noise_image(32, 32, 3);
        assert_eq!(image_rmse(&img, &img).unwrap(), 0.0);
        assert!((image_ssim(&img, &img).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn image_metrics_reject_size_mismatch() {
        let a = synth::noise_image(32, 32, 3);
        let b = synth::noise_image(16, 16, 3);
        assert!(image_rmse(&a, &b).is_err());
    }

    #[test]
    fn aggregation_weighted_mean_identity() {
        let rows = vec![
            InstanceRow {
                object_id: "a".into(),
                category: "chair".into(),
                asset_id: "x".into(),
                chamfer: 0.1,
                rmse: Some(0.2),
                ssim: Some(0.9),
                external: None,
            },
            InstanceRow {
                object_id: "b".into(),
                category: "chair".into(),
                asset_id: "x".into(),
                chamfer: 0.3,
                rmse: Some(0.4),
                ssim: Some(0.7),
                external: None,
            },
            InstanceRow {
                object_id: "c".into(),
                category: "table".into(),
                asset_id: "y".into(),
                chamfer: 0.5,
                rmse: None,
                ssim: None,
                external: None,
            },
        ];
        let rep = aggregate(rows);
        assert_eq!(rep.classes.len(), 2);
        let weighted: f64 = rep
            .classes
            .iter()
            .map(|c| c.chamfer * c.count as f64)
            .sum::<f64>()
            / rep.instances.len() as f64;
        assert!((weighted - rep.overall_chamfer).abs() < 1e-12);
        assert!((rep.overall_chamfer - 0.3).abs() < 1e-12);
        assert!((rep.overall_rmse.unwrap() - 0.3).abs() < 1e-12);
        let md = report_markdown(&rep);
        assert!(md.contains("| chair | 2 |"));
        assert!(md.contains("**all**"));
    }

    #[test]
    fn pairs_csv_parses() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("pairs.csv");
        std::fs::write(
            &p,
            "object_id,category,mesh_a,mesh_b\n# comment\no1,chair,a.obj,b.obj\no2,table,c.obj,d.obj,ia.png,ib.png\n",
        )
        .unwrap();
        let pairs = read_pairs_csv(&p).unwrap();
        assert_eq!(pairs.len(), 2);
        assert_eq!(pairs[0].object_id, "o1");
        assert!(pairs[0].image_a.is_none());
        assert_eq!(pairs[1].image_b.as_deref(), Some("ib.png"));
        std::fs::write(&p, "o1,chair,a.obj\n").unwrap();
        assert!(read_pairs_csv(&p).is_err());
    }
}
