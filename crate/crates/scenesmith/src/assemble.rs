//! Procedural assembly: wall prisms with openings cut out, object
//! placements scaled to detected dimensions, physics assignment, and the
//! final deterministic scene description.

use std::collections::BTreeMap;

use scenesmith_core::polygon::line_intersection;
use scenesmith_core::Vec2;

use crate::config::{AssembleConfig, Seeds};
use crate::error::{Error, Result};
use crate::model::{
    CollisionSource, EdgeKind, ObjectNode, OpeningKind, Placement, PlacementKind, PhysicsSpec,
    Provenance, RigidBodyKind, RoomPolygon, RoomSpec, SceneDescription, SceneGraph, WallPrism,
    WallSegment,
};
use crate::retrieval::AssetDb;

// ---------------------------------------------------------------------------
// Walls
// ---------------------------------------------------------------------------

/// Wall prisms: the room polygon offset outward by the wall thickness, one
/// mitred quad per edge. Corners meet at the intersection of the two
/// adjacent offset lines.
pub fn build_walls(
    room: &RoomPolygon,
    segments: &[WallSegment],
    cfg: &AssembleConfig,
) -> Result<Vec<WallPrism>> {
    let poly = room.polygon();
    let n = poly.len();
    if n < 3 {
        return Err(Error::Geometry("room polygon has fewer than 3 vertices".into()));
    }
    // Outward is to the right of each CCW edge.
    let offset_line = |i: usize| -> (Vec2, Vec2) {
        let (a, b) = poly.edge(i);
        let out = -(b - a).normalized().perp() * cfg.wall_thickness;
        (a + out, b + out)
    };
    let mut outer = Vec::with_capacity(n);
    for i in 0..n {
        let prev = offset_line((i + n - 1) % n);
        let cur = offset_line(i);
        let p = line_intersection(prev.0, prev.1, cur.0, cur.1)
            .unwrap_or(cur.0);
        outer.push(p);
    }
    let mut prisms = Vec::with_capacity(n);
    for i in 0..n {
        let (a, b) = poly.edge(i);
        let seg_id = &room.source_segment_ids[i];
        let height = segments
            .iter()
            .find(|s| &s.id == seg_id)
            .map_or(2.5, |s| s.height);
        prisms.push(WallPrism {
            id: format!("wall-{seg_id}"),
            footprint: vec![
                [a.x, a.y],
                [b.x, b.y],
                [outer[(i + 1) % n].x, outer[(i + 1) % n].y],
                [outer[i].x, outer[i].y],
            ],
            base_z: 0.0,
            top_z: height,
        });
    }
    Ok(prisms)
}

/// A wall prism split around its openings: piers on both sides, a lintel
/// above, and a sill below windows. Returns the replacement prisms plus
/// door/window placements, flagging openings clamped to the wall bounds.
pub fn cut_openings(
    prism: &WallPrism,
    seg: &WallSegment,
) -> (Vec<WallPrism>, Vec<Placement>, Vec<String>) {
    if seg.openings.is_empty() {
        return (vec![prism.clone()], vec![], vec![]);
    }
    let mut flags = Vec::new();
    let len = seg.length();
    // Openings sorted and clamped into [0, len] x [0, height].
    let mut spans: Vec<(f64, f64, f64, f64, OpeningKind, usize)> = Vec::new();
    for (oi, o) in seg.openings.iter().enumerate() {
        let (mut s, mut e) = (o.start, o.end);
        let (mut bot, mut top) = (o.bottom, o.top);
        if s < 0.0 || e > len || bot < 0.0 || top > seg.height {
            flags.push(format!("opening {} on '{}' clamped to wall bounds", oi, seg.id));
        }
        s = s.clamp(0.0, len);
        e = e.clamp(0.0, len);
        bot = bot.clamp(0.0, seg.height);
        top = top.clamp(0.0, seg.height);
        if e - s <= 0.0 || top - bot <= 0.0 {
            flags.push(format!("opening {} on '{}' degenerate after clamping, dropped", oi, seg.id));
            continue;
        }
        spans.push((s, e, bot, top, o.kind, oi));
    }
    spans.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());

    // The prism footprint is [a, b, outer_b, outer_a]; intermediate pieces
    // interpolate along both the inner and outer edges.
    let fp = &prism.footprint;
    let inner_a = Vec2::new(fp[0][0], fp[0][1]);
    let inner_b = Vec2::new(fp[1][0], fp[1][1]);
    let outer_b = Vec2::new(fp[2][0], fp[2][1]);
    let outer_a = Vec2::new(fp[3][0], fp[3][1]);
    let sub_fp = |t0: f64, t1: f64| -> Vec<[f64; 2]> {
        let (u0, u1) = (t0 / len, t1 / len);
        let lerp = |p: Vec2, q: Vec2, u: f64| -> [f64; 2] {
            let v = p + (q - p) * u;
            [v.x, v.y]
        };
        vec![
            lerp(inner_a, inner_b, u0),
            lerp(inner_a, inner_b, u1),
            lerp(outer_a, outer_b, u1),
            lerp(outer_a, outer_b, u0),
        ]
    };

    let mut prisms = Vec::new();
    let mut placements = Vec::new();
    let mut cursor = 0.0;
    for (s, e, bot, top, kind, oi) in &spans {
        if *s > cursor {
            prisms.push(WallPrism {
                id: format!("{}-pier{}", prism.id, prisms.len()),
                footprint: sub_fp(cursor, *s),
                base_z: prism.base_z,
                top_z: prism.top_z,
            });
        }
        if *bot > 0.0 {
            prisms.push(WallPrism {
                id: format!("{}-sill{}", prism.id, oi),
                footprint: sub_fp(*s, *e),
                base_z: prism.base_z,
                top_z: prism.base_z + bot,
            });
        }
        if *top < prism.top_z {
            prisms.push(WallPrism {
                id: format!("{}-lintel{}", prism.id, oi),
                footprint: sub_fp(*s, *e),
                base_z: prism.base_z + top,
                top_z: prism.top_z,
            });
        }
        // Parametric opening asset centered in the span, flush with the
        // inner face.
        let mid = (s + e) / 2.0;
        let dir = seg.direction();
        let pos = seg.a() + dir * mid;
        let kind = match kind {
            OpeningKind::Door => PlacementKind::DoorAsset,
            OpeningKind::Window => PlacementKind::WindowAsset,
        };
        placements.push(Placement {
            id: format!("{}-opening{}", seg.id, oi),
            asset_id: None,
            kind,
            position: [pos.x, pos.y, *bot],
            rotation: [0.0, 0.0, dir.angle()],
            scale: [e - s, top - bot, 0.05],
            physics: PhysicsSpec {
                mass_kg: 0.0,
                body: RigidBodyKind::Passive,
                collision_source: CollisionSource::Box,
            },
            materials: BTreeMap::new(),
            articulation: None,
            flags: vec![],
        });
        cursor = cursor.max(*e);
    }
    if cursor < len {
        prisms.push(WallPrism {
            id: format!("{}-pier{}", prism.id, prisms.len()),
            footprint: sub_fp(cursor, len),
            base_z: prism.base_z,
            top_z: prism.top_z,
        });
    }
    (prisms, placements, flags)
}

// ---------------------------------------------------------------------------
// Object placement
// ---------------------------------------------------------------------------

/// Place every object: retrieved assets scaled per axis to the detected
/// dimensions, placeholders when retrieval produced nothing. Objects
/// supported by another (on-top relation) are re-seated on the scaled top
/// surface of their support.
pub fn place_objects(
    objects: &[ObjectNode],
    assignments: &BTreeMap<String, String>,
    db: Option<&AssetDb>,
    graph: &SceneGraph,
    cfg: &AssembleConfig,
) -> (Vec<Placement>, Vec<String>) {
    let mut log = Vec::new();
    let mut placements = Vec::new();
    // Supports first: id -> top z after placement.
    let mut top_z: BTreeMap<&str, f64> = BTreeMap::new();
    let order = support_order(objects, graph);
    for &i in &order {
        let obj = &objects[i];
        let dims = obj.obb.dims;
        let (kind, asset_id, scale, flags) = match assignments
            .get(&obj.id)
            .and_then(|aid| db.and_then(|d| d.get(aid)))
        {
            Some(rec) => {
                let scale = [
                    dims[0] / rec.dims[0],
                    dims[1] / rec.dims[1],
                    dims[2] / rec.dims[2],
                ];
                let mean = (scale[0] + scale[1] + scale[2]) / 3.0;
                let mut flags = Vec::new();
                if scale
                    .iter()
                    .any(|s| (s / mean - 1.0).abs() > cfg.distortion_warn_ratio)
                {
                    flags.push("nonuniform_scale".to_string());
                    log.push(format!(
                        "'{}': asset '{}' scaled non-uniformly ({:.2},{:.2},{:.2})",
                        obj.id, rec.id, scale[0], scale[1], scale[2]
                    ));
                }
                (PlacementKind::Asset, Some(rec.id.clone()), scale, flags)
            }
            None => {
                log.push(format!("'{}': no asset, placeholder box", obj.id));
                (
                    PlacementKind::PlaceholderBox,
                    None,
                    [dims[0], dims[1], dims[2]],
                    vec!["placeholder".to_string()],
                )
            }
        };
        // Re-seat on the support's top when an on-top edge exists.
        let mut bottom = obj.obb.bottom();
        if let Some(support) = graph
            .edges_of_kind(EdgeKind::OnTop)
            .find(|e| e.src == obj.id)
            .map(|e| e.dst.clone())
        {
            if let Some(&z) = top_z.get(support.as_str()) {
                bottom = z;
            }
        }
        top_z.insert(obj.id.as_str(), bottom + dims[1]);
        placements.push(Placement {
            id: obj.id.clone(),
            asset_id,
            kind,
            position: [obj.obb.center[0], obj.obb.center[1], bottom + dims[1] / 2.0],
            rotation: [0.0, 0.0, obj.obb.yaw],
            scale,
            physics: physics_for(obj, kind, cfg),
            materials: BTreeMap::new(),
            articulation: if obj.articulated {
                Some(serde_json::json!({ "type": "revolute", "source": "detection" }))
            } else {
                None
            },
            flags,
        });
    }
    placements.sort_by(|a, b| a.id.cmp(&b.id));
    (placements, log)
}

/// Objects ordered so supports are placed before the things on them.
fn support_order(objects: &[ObjectNode], graph: &SceneGraph) -> Vec<usize> {
    let idx: BTreeMap<&str, usize> = objects
        .iter()
        .enumerate()
        .map(|(i, o)| (o.id.as_str(), i))
        .collect();
    let mut depth = vec![0usize; objects.len()];
    // On-top chains are short; a few relaxation passes settle depths.
    for _ in 0..objects.len() {
        for e in graph.edges_of_kind(EdgeKind::OnTop) {
            if let (Some(&a), Some(&b)) = (idx.get(e.src.as_str()), idx.get(e.dst.as_str())) {
                depth[a] = depth[a].max(depth[b] + 1);
            }
        }
    }
    let mut order: Vec<usize> = (0..objects.len()).collect();
    order.sort_by_key(|&i| (depth[i], objects[i].id.clone()));
    order
}

fn physics_for(obj: &ObjectNode, kind: PlacementKind, cfg: &AssembleConfig) -> PhysicsSpec {
    let volume = obj.obb.dims[0] * obj.obb.dims[1] * obj.obb.dims[2];
    let density = cfg
        .density_overrides
        .get(obj.label.as_str())
        .copied()
        .unwrap_or(cfg.default_density);
    let body = if !obj.movable || obj.wall_attachment.is_some() {
        RigidBodyKind::Passive
    } else {
        RigidBodyKind::Active
    };
    PhysicsSpec {
        mass_kg: density * volume,
        body,
        collision_source: if kind == PlacementKind::Asset {
            CollisionSource::Mesh
        } else {
            CollisionSource::Box
        },
    }
}

// ---------------------------------------------------------------------------
// Export
// ---------------------------------------------------------------------------

pub struct AssembleInput<'a> {
    pub room: &'a RoomPolygon,
    pub segments: &'a [WallSegment],
    pub objects: &'a [ObjectNode],
    pub graph: &'a SceneGraph,
    pub assignments: &'a BTreeMap<String, String>,
    pub materials: &'a BTreeMap<String, crate::model::MaterialAssignment>,
    pub db: Option<&'a AssetDb>,
}

pub fn assemble_scene(
    input: &AssembleInput,
    cfg: &AssembleConfig,
    config_hash: &str,
    seeds: &Seeds,
) -> Result<(SceneDescription, Vec<String>)> {
    let mut log = Vec::new();
    let prisms = build_walls(input.room, input.segments, cfg)?;
    let mut walls = Vec::new();
    let mut placements = Vec::new();
    for prism in &prisms {
        let seg_id = prism.id.trim_start_matches("wall-");
        let seg = input.segments.iter().find(|s| s.id == seg_id);
        match seg {
            Some(seg) => {
                let (pieces, openers, flags) = cut_openings(prism, seg);
                walls.extend(pieces);
                placements.extend(openers);
                log.extend(flags);
            }
            None => walls.push(prism.clone()),
        }
    }
    let (mut object_placements, place_log) = place_objects(
        input.objects,
        input.assignments,
        input.db,
        input.graph,
        cfg,
    );
    log.extend(place_log);
    for p in &mut object_placements {
        if let Some(m) = input.materials.get(&p.id) {
            p.materials.insert("albedo".to_string(), m.clone());
        }
    }
    placements.extend(object_placements);
    placements.sort_by(|a, b| a.id.cmp(&b.id));

    let wall_height = input
        .segments
        .iter()
        .map(|s| s.height)
        .fold(0.0, f64::max)
        .max(2.5);
    let mut stage_versions = BTreeMap::new();
    for (k, v) in [
        ("parse", "1"),
        ("graph", "1"),
        ("retrieve", "1"),
        ("paint", "1"),
        ("assemble", "1"),
    ] {
        stage_versions.insert(k.to_string(), v.to_string());
    }
    let desc = SceneDescription {
        schema: "scenesmith/1".to_string(),
        provenance: Provenance {
            config_hash: config_hash.to_string(),
            seeds: *seeds,
            stage_versions,
        },
        rooms: vec![RoomSpec {
            polygon: input.room.vertices.clone(),
            wall_height,
            wall_thickness: cfg.wall_thickness,
            walls,
            floor: input.room.vertices.clone(),
        }],
        placements,
    };
    Ok((desc, log))
}
