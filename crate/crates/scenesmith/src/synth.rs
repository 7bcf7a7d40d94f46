//! Deterministic generators for asset databases, camera frames, and
//! material libraries. Used by tests and by `scenesmith synth`-style
//! fixture preparation; every output is a pure function of its inputs.

use std::path::Path;

use image::{Rgb, RgbImage};
use scenesmith_core::mesh::TriMesh;
use scenesmith_core::Xoshiro256StarStar;

use crate::error::{Error, Result};
use crate::model::Category;
use crate::retrieval::AssetRecord;

pub fn solid_image(w: u32, h: u32, rgb: [u8; 3]) -> RgbImage {
    RgbImage::from_pixel(w, h, Rgb(rgb))
}

/// Seeded per-pixel noise; distinct seeds give visually distinct textures.
pub fn noise_image(w: u32, h: u32, seed: u64) -> RgbImage {
    let mut rng = Xoshiro256StarStar::seed_from_u64(seed);
    let mut img = RgbImage::new(w, h);
    for p in img.pixels_mut() {
        *p = Rgb([
            rng.usize_below(256) as u8,
            rng.usize_below(256) as u8,
            rng.usize_below(256) as u8,
        ]);
    }
    img
}

pub fn write_png(path: &Path, img: &RgbImage) -> Result<()> {
    img.save(path)
        .map_err(|e| Error::file(path, std::io::Error::other(e.to_string())))
}

/// Paste `patch` into `base` at (x, y).
pub fn plant(base: &mut RgbImage, patch: &RgbImage, x: u32, y: u32) {
    for py in 0..patch.height() {
        for px in 0..patch.width() {
            base.put_pixel(x + px, y + py, *patch.get_pixel(px, py));
        }
    }
}

pub fn write_obj(path: &Path, mesh: &TriMesh) -> Result<()> {
    let mut out = String::new();
    for v in &mesh.vertices {
        out.push_str(&format!("v {} {} {}\n", v[0], v[1], v[2]));
    }
    for t in &mesh.triangles {
        out.push_str(&format!("f {} {} {}\n", t[0] + 1, t[1] + 1, t[2] + 1));
    }
    std::fs::write(path, out).map_err(|e| Error::file(path, e))
}

pub struct AssetSpec {
    pub id: String,
    pub category: Category,
    pub subcategory: String,
    pub color: [u8; 3],
    pub dims: [f64; 3],
}

/// Build a small asset database: a box mesh, two rendered views (a solid
/// color card and a noise-speckled variant), and a manifest.
pub fn make_asset_db(dir: &Path, specs: &[AssetSpec]) -> Result<Vec<AssetRecord>> {
    std::fs::create_dir_all(dir).map_err(|e| Error::file(dir, e))?;
    let mut records = Vec::new();
    for spec in specs {
        let mesh_name = format!("{}.obj", spec.id);
        let mesh = scenesmith_core::mesh::box_mesh([0.0; 3], spec.dims);
        write_obj(&dir.join(&mesh_name), &mesh)?;
        let mut views = Vec::new();
        for (vi, img) in [
            solid_image(24, 24, spec.color),
            speckled_view(24, 24, spec.color, &spec.id),
        ]
        .iter()
        .enumerate()
        {
            let name = format!("{}-view{}.png", spec.id, vi);
            write_png(&dir.join(&name), img)?;
            views.push(name);
        }
        records.push(AssetRecord {
            id: spec.id.clone(),
            category: spec.category,
            subcategory: spec.subcategory.clone(),
            mesh: mesh_name,
            views,
            dims: spec.dims,
            articulated: false,
        });
    }
    records.sort_by(|a, b| a.id.cmp(&b.id));
    let manifest = serde_json::to_string_pretty(&records)?;
    std::fs::write(dir.join("manifest.json"), manifest)
        .map_err(|e| Error::file(dir, e))?;
    Ok(records)
}

fn speckled_view(w: u32, h: u32, color: [u8; 3], id: &str) -> RgbImage {
    let seed = crate::pipeline::sha256_hex(id.as_bytes())
        .as_bytes()
        .iter()
        .fold(0u64, |a, &b| a.wrapping_mul(31).wrapping_add(b as u64));
    let mut rng = Xoshiro256StarStar::seed_from_u64(seed);
    let mut img = solid_image(w, h, color);
    for _ in 0..((w * h) / 8) {
        let x = rng.usize_below(w as usize) as u32;
        let y = rng.usize_below(h as usize) as u32;
        img.put_pixel(x, y, Rgb([rng.usize_below(256) as u8; 3]));
    }
    img
}

pub struct MaterialSpec {
    pub id: String,
    pub family: String,
    pub color: [u8; 3],
}

/// Material library: per material an albedo PNG (solid color) and a flat
/// roughness map, plus a manifest.
pub fn make_material_db(dir: &Path, specs: &[MaterialSpec]) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::file(dir, e))?;
    let mut entries = Vec::new();
    for spec in specs {
        let albedo = format!("{}-albedo.png", spec.id);
        let rough = format!("{}-rough.png", spec.id);
        write_png(&dir.join(&albedo), &solid_image(16, 16, spec.color))?;
        write_png(&dir.join(&rough), &solid_image(16, 16, [128, 128, 128]))?;
        entries.push(serde_json::json!({
            "id": spec.id,
            "family": spec.family,
            "albedo": albedo,
            "roughness": rough,
        }));
    }
    let manifest = serde_json::to_string_pretty(&entries)?;
    std::fs::write(dir.join("manifest.json"), manifest)
        .map_err(|e| Error::file(dir, e))?;
    Ok(())
}

/// A full end-to-end fixture: a slightly noisy rectangular room with a door
/// and a window, four furniture objects with image crops, two camera frames,
/// and matching asset/material databases. Returns the scan path and the
/// frame directory.
pub fn make_scan_fixture(dir: &Path) -> Result<(std::path::PathBuf, std::path::PathBuf)> {
    use crate::model::{
        CropRef, Intrinsics, OpeningKind, ScanDocument, ScanFrame, ScanObject, ScanOpening,
        ScanWall,
    };

    std::fs::create_dir_all(dir).map_err(|e| Error::file(dir, e))?;
    let frame_dir = dir.join("frames");
    std::fs::create_dir_all(&frame_dir).map_err(|e| Error::file(&frame_dir, e))?;

    let wall = |id: &str, p0: [f64; 2], p1: [f64; 2], openings: Vec<ScanOpening>| ScanWall {
        id: id.into(),
        p0,
        p1,
        height: 2.6,
        openings,
    };
    let walls = vec![
        wall("w-west", [0.012, 0.0], [0.0, 3.985], vec![]),
        wall("w-north", [0.018, 4.01], [6.0, 4.0], vec![]),
        wall(
            "w-east",
            [5.99, 3.99], [6.01, 0.02],
            vec![ScanOpening {
                kind: OpeningKind::Window,
                start: 1.2,
                end: 2.4,
                bottom: 0.9,
                top: 2.1,
            }],
        ),
        wall(
            "w-south",
            [6.0, 0.0], [0.03, 0.01],
            vec![ScanOpening {
                kind: OpeningKind::Door,
                start: 2.5,
                end: 3.4,
                bottom: 0.0,
                top: 2.05,
            }],
        ),
    ];

    // Two frames with planted crop patches at known pixel rectangles.
    let colors = [
        ("table-1", [139u8, 94, 60]),
        ("chair-1", [40, 40, 46]),
        ("cab-1", [200, 196, 188]),
        ("tv-1", [12, 12, 14]),
    ];
    let mut img0 = noise_image(96, 64, 11);
    let mut img1 = noise_image(96, 64, 12);
    let boxes = [[4u32, 4, 24, 24], [36, 4, 16, 16], [60, 4, 20, 20], [8, 36, 16, 16]];
    for (i, (_, rgb)) in colors.iter().enumerate() {
        let [x, y, w, h] = boxes[i];
        plant(&mut img0, &solid_image(w, h, *rgb), x, y);
        let mut speck = speckled_view(w, h, *rgb, colors[i].0);
        plant(&mut speck, &solid_image(w / 2, h / 2, *rgb), w / 4, h / 4);
        plant(&mut img1, &speck, x, y);
    }
    write_png(&frame_dir.join("frame-0.png"), &img0)?;
    write_png(&frame_dir.join("frame-1.png"), &img1)?;

    let intr = Intrinsics {
        fx: 80.0,
        fy: 80.0,
        cx: 48.0,
        cy: 32.0,
        width: 96,
        height: 64,
    };
    // Camera outside the south wall looking along +y (camera +z forward).
    let pose = [
        [1.0, 0.0, 0.0, -3.0],
        [0.0, 0.0, -1.0, 1.4],
        [0.0, 1.0, 0.0, 5.0],
        [0.0, 0.0, 0.0, 1.0],
    ];
    let frames = vec![
        ScanFrame {
            id: "frame-0".into(),
            pose,
            intrinsics: intr.clone(),
            image: "frame-0.png".into(),
        },
        ScanFrame {
            id: "frame-1".into(),
            pose,
            intrinsics: intr,
            image: "frame-1.png".into(),
        },
    ];

    let crops = |frame: &str, b: [u32; 4]| {
        vec![CropRef {
            frame_id: frame.into(),
            bbox_px: b,
            visibility: 0.9,
        }]
    };
    let object = |id: &str, label: &str, center: [f64; 3], dims: [f64; 3], yaw: f64, b: [u32; 4]| {
        ScanObject {
            id: id.into(),
            label: label.into(),
            subcategory: String::new(),
            center,
            dims,
            yaw_deg: yaw,
            pitch_deg: 0.3,
            roll_deg: -0.2,
            crops: crops("frame-0", b),
            articulated: false,
            movable: true,
        }
    };
    let objects = vec![
        object("table-1", "table", [3.0, 2.0, 0.38], [1.2, 0.76, 0.8], 1.5, boxes[0]),
        // Slight footprint overlap with the table exercises the solver.
        object("chair-1", "chair", [3.0, 1.42, 0.45], [0.45, 0.9, 0.45], 181.0, boxes[1]),
        object("cab-1", "storage", [0.33, 2.0, 1.0], [0.8, 2.0, 0.4], -90.0, boxes[2]),
        object("tv-1", "television", [0.33, 2.0, 2.26], [0.6, 0.5, 0.1], -90.0, boxes[3]),
    ];

    let doc = ScanDocument {
        walls,
        objects,
        frames,
    };
    let scan_path = dir.join("scan.json");
    let text = serde_json::to_string_pretty(&doc)?;
    std::fs::write(&scan_path, text).map_err(|e| Error::file(&scan_path, e))?;
    Ok((scan_path, frame_dir))
}

/// Asset and material databases that cover every category used by
/// [`make_scan_fixture`].
pub fn make_fixture_dbs(dir: &Path) -> Result<(std::path::PathBuf, std::path::PathBuf)> {
    let asset_dir = dir.join("assets");
    let spec = |id: &str, cat: Category, color: [u8; 3], dims: [f64; 3]| AssetSpec {
        id: id.into(),
        category: cat,
        subcategory: String::new(),
        color,
        dims,
    };
    make_asset_db(
        &asset_dir,
        &[
            spec("asset-table-oak", Category::Table, [139, 94, 60], [1.2, 0.75, 0.8]),
            spec("asset-table-white", Category::Table, [230, 228, 224], [1.4, 0.74, 0.7]),
            spec("asset-chair-dark", Category::Chair, [40, 40, 46], [0.44, 0.92, 0.46]),
            spec("asset-chair-red", Category::Chair, [170, 40, 36], [0.5, 0.88, 0.5]),
            spec("asset-cab-light", Category::Storage, [200, 196, 188], [0.8, 2.0, 0.4]),
            spec("asset-tv-flat", Category::Television, [12, 12, 14], [0.62, 0.48, 0.08]),
        ],
    )?;
    let material_dir = dir.join("materials");
    let mspec = |id: &str, family: &str, color: [u8; 3]| MaterialSpec {
        id: id.into(),
        family: family.into(),
        color,
    };
    make_material_db(
        &material_dir,
        &[
            mspec("mat-oak", "wood", [150, 100, 62]),
            mspec("mat-walnut", "wood", [92, 60, 40]),
            mspec("mat-plastic-black", "plastic", [30, 30, 34]),
            mspec("mat-laminate", "laminate", [205, 200, 190]),
            mspec("mat-steel", "metal", [120, 124, 130]),
        ],
    )?;
    Ok((asset_dir, material_dir))
}

/// The checked-in end-to-end fixture: an L-shaped room of eight wall
/// segments with a door and a window, eight objects, two camera frames,
/// and asset/material databases. Regenerate with
/// `cargo run -p scenesmith --example gen_fixtures`.
pub fn make_shipped_fixture(dir: &Path) -> Result<()> {
    use crate::model::{
        CropRef, Intrinsics, OpeningKind, ScanDocument, ScanFrame, ScanObject, ScanOpening,
        ScanWall,
    };

    std::fs::create_dir_all(dir).map_err(|e| Error::file(dir, e))?;
    let frame_dir = dir.join("frames");
    std::fs::create_dir_all(&frame_dir).map_err(|e| Error::file(&frame_dir, e))?;

    let wall = |id: &str, p0: [f64; 2], p1: [f64; 2], openings: Vec<ScanOpening>| ScanWall {
        id: id.into(),
        p0,
        p1,
        height: 2.7,
        openings,
    };
    let walls = vec![
        wall(
            "w-s1",
            [0.01, 0.0], [4.5, 0.02],
            vec![ScanOpening {
                kind: OpeningKind::Door,
                start: 1.8,
                end: 2.7,
                bottom: 0.0,
                top: 2.05,
            }],
        ),
        wall("w-s2", [4.52, 0.01], [9.0, 0.0], vec![]),
        wall(
            "w-e",
            [9.01, 0.02], [8.99, 4.0],
            vec![ScanOpening {
                kind: OpeningKind::Window,
                start: 1.0,
                end: 2.6,
                bottom: 0.9,
                top: 2.2,
            }],
        ),
        wall("w-n1", [8.98, 4.01], [5.0, 3.99], vec![]),
        wall("w-mid", [5.01, 4.0], [5.0, 7.01], vec![]),
        wall("w-n2", [4.99, 7.0], [0.02, 6.99], vec![]),
        wall("w-w1", [0.0, 7.02], [0.01, 3.5], vec![]),
        wall("w-w2", [0.02, 3.49], [0.0, 0.01], vec![]),
    ];

    let colors: [(&str, [u8; 3]); 8] = [
        ("table-1", [139, 94, 60]),
        ("chair-1", [40, 40, 46]),
        ("chair-2", [46, 40, 40]),
        ("sofa-1", [70, 84, 110]),
        ("cab-1", [200, 196, 188]),
        ("tv-1", [12, 12, 14]),
        ("shelf-1", [160, 130, 96]),
        ("table-2", [120, 80, 52]),
    ];
    let boxes: [[u32; 4]; 8] = [
        [4, 4, 24, 24],
        [36, 4, 16, 16],
        [60, 4, 16, 16],
        [84, 4, 32, 20],
        [4, 36, 20, 24],
        [32, 40, 16, 12],
        [56, 36, 18, 24],
        [84, 36, 20, 16],
    ];
    let mut img0 = noise_image(128, 96, 21);
    let mut img1 = noise_image(128, 96, 22);
    for (i, (id, rgb)) in colors.iter().enumerate() {
        let [x, y, w, h] = boxes[i];
        plant(&mut img0, &solid_image(w, h, *rgb), x, y);
        let mut speck = speckled_view(w, h, *rgb, id);
        plant(&mut speck, &solid_image(w / 2, h / 2, *rgb), w / 4, h / 4);
        plant(&mut img1, &speck, x, y);
    }
    write_png(&frame_dir.join("frame-0.png"), &img0)?;
    write_png(&frame_dir.join("frame-1.png"), &img1)?;

    let intr = Intrinsics {
        fx: 110.0,
        fy: 110.0,
        cx: 64.0,
        cy: 48.0,
        width: 128,
        height: 96,
    };
    let pose = [
        [1.0, 0.0, 0.0, -4.5],
        [0.0, 0.0, -1.0, 1.5],
        [0.0, 1.0, 0.0, 6.0],
        [0.0, 0.0, 0.0, 1.0],
    ];
    let frames = vec![
        ScanFrame {
            id: "frame-0".into(),
            pose,
            intrinsics: intr.clone(),
            image: "frame-0.png".into(),
        },
        ScanFrame {
            id: "frame-1".into(),
            pose,
            intrinsics: intr,
            image: "frame-1.png".into(),
        },
    ];

    let object = |i: usize, label: &str, center: [f64; 3], dims: [f64; 3], yaw: f64| ScanObject {
        id: colors[i].0.into(),
        label: label.into(),
        subcategory: String::new(),
        center,
        dims,
        yaw_deg: yaw,
        pitch_deg: 0.4,
        roll_deg: -0.3,
        crops: vec![
            CropRef {
                frame_id: "frame-0".into(),
                bbox_px: boxes[i],
                visibility: 0.9,
            },
            CropRef {
                frame_id: "frame-1".into(),
                bbox_px: boxes[i],
                visibility: 0.8,
            },
        ],
        articulated: false,
        movable: true,
    };
    let objects = vec![
        object(0, "table", [6.8, 2.0, 0.38], [1.4, 0.76, 0.9], 0.8),
        // The chairs start overlapping the table footprint.
        object(1, "chair", [6.8, 1.45, 0.45], [0.46, 0.9, 0.46], 0.6),
        object(2, "chair", [6.8, 2.55, 0.45], [0.46, 0.9, 0.46], 179.1),
        object(3, "sofa", [2.2, 5.9, 0.42], [2.1, 0.84, 0.95], 179.2),
        object(4, "storage", [0.35, 1.8, 1.0], [0.9, 2.0, 0.42], -90.0),
        object(5, "television", [0.35, 1.8, 2.28], [0.7, 0.46, 0.09], -90.0),
        object(6, "storage", [4.6, 6.6, 0.9], [1.2, 1.8, 0.35], 179.5),
        object(7, "table", [2.2, 4.6, 0.22], [1.0, 0.44, 0.6], 0.4),
    ];

    let doc = ScanDocument {
        walls,
        objects,
        frames,
    };
    let scan_path = dir.join("scan.json");
    let text = serde_json::to_string_pretty(&doc)?;
    std::fs::write(&scan_path, text).map_err(|e| Error::file(&scan_path, e))?;

    let spec = |id: &str, cat: Category, color: [u8; 3], dims: [f64; 3]| AssetSpec {
        id: id.into(),
        category: cat,
        subcategory: String::new(),
        color,
        dims,
    };
    make_asset_db(
        &dir.join("assets"),
        &[
            spec("asset-table-oak", Category::Table, [139, 94, 60], [1.3, 0.75, 0.85]),
            spec("asset-table-low", Category::Table, [120, 80, 52], [1.0, 0.42, 0.6]),
            spec("asset-chair-dark", Category::Chair, [40, 40, 46], [0.45, 0.9, 0.45]),
            spec("asset-chair-red", Category::Chair, [170, 40, 36], [0.5, 0.88, 0.5]),
            spec("asset-sofa-blue", Category::Sofa, [70, 84, 110], [2.0, 0.82, 0.92]),
            spec("asset-cab-light", Category::Storage, [200, 196, 188], [0.9, 2.0, 0.42]),
            spec("asset-shelf-oak", Category::Storage, [160, 130, 96], [1.2, 1.8, 0.35]),
            spec("asset-tv-flat", Category::Television, [12, 12, 14], [0.7, 0.45, 0.08]),
        ],
    )?;
    let mspec = |id: &str, family: &str, color: [u8; 3]| MaterialSpec {
        id: id.into(),
        family: family.into(),
        color,
    };
    make_material_db(
        &dir.join("materials"),
        &[
            mspec("mat-oak", "wood", [150, 100, 62]),
            mspec("mat-walnut", "wood", [92, 60, 40]),
            mspec("mat-plastic-black", "plastic", [30, 30, 34]),
            mspec("mat-fabric-blue", "fabric", [76, 88, 112]),
            mspec("mat-laminate", "laminate", [205, 200, 190]),
            mspec("mat-steel", "metal", [120, 124, 130]),
        ],
    )?;

    let config_path = dir.join("config.json");
    let cfg = crate::config::PipelineConfig::default();
    let text = serde_json::to_string_pretty(&cfg)?;
    std::fs::write(&config_path, text).map_err(|e| Error::file(&config_path, e))?;
    Ok(())
}
