//! Relation inference over parsed objects and constrained collision
//! resolution via minimum-translation vectors.

use std::collections::BTreeMap;

use scenesmith_core::{Rect2, Vec2};

use crate::config::GraphConfig;
use crate::config::SnapConfig;
use crate::layout::ParsedScene;
use crate::model::{
    Category, Edge, EdgeKind, GraphNode, NodeKind, ObjectNode, SceneGraph, WallSegment,
};

/// Area of the intersection of two convex footprints (Sutherland-Hodgman).
pub fn footprint_overlap_area(a: &Rect2, b: &Rect2) -> f64 {
    let mut poly: Vec<Vec2> = a.corners().to_vec();
    let clip = b.corners();
    for i in 0..4 {
        let (p, q) = (clip[i], clip[(i + 1) % 4]);
        let edge = q - p;
        let inside = |v: Vec2| edge.cross(v - p) >= -1e-12;
        let input = core::mem::take(&mut poly);
        for j in 0..input.len() {
            let (cur, next) = (input[j], input[(j + 1) % input.len()]);
            let (ci, ni) = (inside(cur), inside(next));
            if ci {
                poly.push(cur);
            }
            if ci != ni {
                let d = next - cur;
                let denom = edge.cross(d);
                if denom.abs() > 1e-15 {
                    let t = edge.cross(p - cur) / denom;
                    poly.push(cur + d * t);
                }
            }
        }
        if poly.is_empty() {
            return 0.0;
        }
    }
    let mut area = 0.0;
    for i in 0..poly.len() {
        let (u, v) = (poly[i], poly[(i + 1) % poly.len()]);
        area += u.cross(v);
    }
    area.abs() / 2.0
}

/// Minimum distance between two convex footprints; zero when overlapping.
pub fn footprint_gap(a: &Rect2, b: &Rect2) -> f64 {
    if a.overlap(b, 0.0).is_some() {
        return 0.0;
    }
    let (ca, cb) = (a.corners(), b.corners());
    let mut best = f64::INFINITY;
    for i in 0..4 {
        for j in 0..4 {
            let d1 = scenesmith_core::polygon::point_segment_distance(
                ca[i],
                cb[j],
                cb[(j + 1) % 4],
            );
            let d2 = scenesmith_core::polygon::point_segment_distance(
                cb[i],
                ca[j],
                ca[(j + 1) % 4],
            );
            best = best.min(d1).min(d2);
        }
    }
    best
}

fn is_chair(c: Category) -> bool {
    matches!(c, Category::Chair)
}

fn is_table(c: Category) -> bool {
    matches!(c, Category::Table)
}

/// Infer support, alignment, and pairing relations between objects.
pub fn infer_relations(parsed: &ParsedScene, cfg: &GraphConfig) -> SceneGraph {
    let mut graph = SceneGraph::default();
    for w in &parsed.walls {
        graph.nodes.push(GraphNode {
            id: w.id.clone(),
            kind: NodeKind::Wall,
        });
    }
    for o in &parsed.objects {
        graph.nodes.push(GraphNode {
            id: o.id.clone(),
            kind: NodeKind::Object,
        });
    }

    for o in &parsed.objects {
        if let Some(wall) = &o.wall_attachment {
            graph.edges.push(Edge {
                kind: EdgeKind::AttachedToWall,
                src: o.id.clone(),
                dst: wall.clone(),
            });
        }
    }

    let objs = &parsed.objects;
    for a in objs {
        let fa = a.obb.footprint();
        let area_a = a.obb.dims[0] * a.obb.dims[2];
        for b in objs {
            if a.id == b.id {
                continue;
            }
            let fb = b.obb.footprint();
            let area_b = b.obb.dims[0] * b.obb.dims[2];

            // a rests on b: footprints overlap mostly (relative to the
            // smaller one) and a's bottom is near b's top.
            let inter = footprint_overlap_area(&fa, &fb);
            let smaller = area_a.min(area_b);
            if smaller > 0.0
                && inter / smaller >= cfg.on_top_overlap
                && area_a <= area_b
                && (a.obb.bottom() - b.obb.top()).abs() <= cfg.on_top_vertical_gap
            {
                graph.edges.push(Edge {
                    kind: EdgeKind::OnTop,
                    src: a.id.clone(),
                    dst: b.id.clone(),
                });
            }

            // Side-by-side same-category run (e.g. kitchen cabinets).
            if a.id < b.id
                && a.label == b.label
                && angle_delta(a.obb.yaw, b.obb.yaw) <= cfg.connecting_yaw_tol
                && footprint_gap(&fa, &fb) <= 0.1
            {
                graph.edges.push(Edge {
                    kind: EdgeKind::ConnectingTo,
                    src: a.id.clone(),
                    dst: b.id.clone(),
                });
            }

            // Chair facing a nearby table.
            if is_chair(a.label) && is_table(b.label) {
                let center = Vec2::new(a.obb.center[0], a.obb.center[1]);
                let facing = a.obb.facing();
                if ray_hits_rect(center, facing, &fb, cfg.table_chair_range) {
                    graph.edges.push(Edge {
                        kind: EdgeKind::TableChairPair,
                        src: a.id.clone(),
                        dst: b.id.clone(),
                    });
                }
            }
        }
    }
    graph
}

fn angle_delta(a: f64, b: f64) -> f64 {
    let mut d = (a - b).abs() % (2.0 * std::f64::consts::PI);
    if d > std::f64::consts::PI {
        d = 2.0 * std::f64::consts::PI - d;
    }
    d
}

/// Does the ray `origin + t*dir` (t in [0, range]) hit the rectangle?
fn ray_hits_rect(origin: Vec2, dir: Vec2, rect: &Rect2, range: f64) -> bool {
    if rect.contains(origin) {
        return true;
    }
    let corners = rect.corners();
    for i in 0..4 {
        let (p, q) = (corners[i], corners[(i + 1) % 4]);
        // Ray/segment intersection.
        let v = q - p;
        let denom = dir.cross(v);
        if denom.abs() < 1e-15 {
            continue;
        }
        let t = (p - origin).cross(v) / denom;
        let s = (p - origin).cross(dir) / denom;
        if t >= 0.0 && t <= range && (-1e-12..=1.0 + 1e-12).contains(&s) {
            return true;
        }
    }
    false
}

/// Extra clearance left between separated footprints, meters. Without it a
/// squeezed chain of contacts only decays geometrically and can exhaust the
/// iteration budget on sub-millimeter residuals.
const SEPARATION_MARGIN: f64 = 1e-3;

#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct CollisionReport {
    pub iterations_used: usize,
    pub resolved: bool,
    pub remaining_overlaps: Vec<(String, String, f64)>,
    pub displacement_log: Vec<String>,
}

struct Group {
    members: Vec<usize>,
    area: f64,
    /// Tangent direction of the wall the group is pinned to, if any.
    wall_tangent: Option<Vec2>,
}

/// Resolve residual object-object overlaps by translating rigid groups
/// along minimum-translation vectors, inversely weighted by footprint area.
pub fn resolve_collisions(
    objects: &[ObjectNode],
    graph: &SceneGraph,
    walls: &[WallSegment],
    cfg: &SnapConfig,
) -> (Vec<ObjectNode>, CollisionReport) {
    let mut objects: Vec<ObjectNode> = objects.to_vec();
    let idx: BTreeMap<&str, usize> = objects
        .iter()
        .enumerate()
        .map(|(i, o)| (o.id.as_str(), i))
        .collect();

    // Rigid groups: objects joined by OnTop / ConnectingTo / TableChairPair.
    let mut dsu = crate::layout::Dsu::new(objects.len());
    for e in &graph.edges {
        if matches!(
            e.kind,
            EdgeKind::OnTop | EdgeKind::ConnectingTo | EdgeKind::TableChairPair
        ) {
            if let (Some(&a), Some(&b)) = (idx.get(e.src.as_str()), idx.get(e.dst.as_str())) {
                dsu.union(a, b);
            }
        }
    }
    let mut groups: Vec<Group> = Vec::new();
    let mut group_of = vec![usize::MAX; objects.len()];
    for i in 0..objects.len() {
        let root = dsu.find(i);
        let gi = match (0..i).find(|&j| dsu.find(j) == root) {
            Some(j) => group_of[j],
            None => {
                groups.push(Group {
                    members: Vec::new(),
                    area: 0.0,
                    wall_tangent: None,
                });
                groups.len() - 1
            }
        };
        group_of[i] = gi;
        groups[gi].members.push(i);
        groups[gi].area += objects[i].obb.dims[0] * objects[i].obb.dims[2];
        if let Some(wid) = &objects[i].wall_attachment {
            if let Some(w) = walls.iter().find(|w| &w.id == wid) {
                groups[gi].wall_tangent = Some(w.direction());
            }
        }
        if !objects[i].movable {
            groups[gi].wall_tangent = Some(Vec2::ZERO); // fully pinned
        }
    }

    let mut log = Vec::new();
    let mut iterations_used = 0;
    let mut resolved = false;
    for iter in 0..cfg.max_collision_iters {
        let overlaps = find_overlaps(&objects, &group_of);
        if overlaps.is_empty() {
            resolved = true;
            iterations_used = iter;
            break;
        }
        iterations_used = iter + 1;
        // Relax to a fixpoint: repeatedly separate the deepest remaining
        // pair (ties broken by object ids for determinism), so overlaps
        // created by a push are handled in the same iteration. A budget
        // bounds pathological squeeze cycles.
        let mut budget = 20 * objects.len().max(1);
        let mut pending = overlaps;
        while budget > 0 {
            if pending.is_empty() {
                break;
            }
            budget -= 1;
            pending.sort_by(|x, y| {
                y.2.depth
                    .partial_cmp(&x.2.depth)
                    .unwrap()
                    .then_with(|| objects[x.0].id.cmp(&objects[y.0].id))
                    .then_with(|| objects[x.1].id.cmp(&objects[y.1].id))
            });
            let (i, j, mtv) = pending.swap_remove(0);
            let _ = &mtv;
            // Recompute: earlier moves this iteration may have fixed it.
            let Some(mtv) = objects[i]
                .obb
                .footprint()
                .overlap(&objects[j].obb.footprint(), 1e-12)
            else {
                pending = find_overlaps(&objects, &group_of);
                continue;
            };
            if !vertical_overlap(&objects[i], &objects[j]) {
                pending = find_overlaps(&objects, &group_of);
                continue;
            }
            let (gi, gj) = (group_of[i], group_of[j]);
            // The MTV pushes group i along +axis and group j along -axis,
            // split inversely by group footprint area (small things move
            // more). A constrained partner loses part of its axis component,
            // so rescale to achieve full separation whenever either side can
            // still move along the axis.
            let (wa, wb) = split_weights(&groups[gi], &groups[gj]);
            let depth = mtv.depth + SEPARATION_MARGIN;
            let push = mtv.axis * depth;
            let mut di = constrain(push * wa, groups[gi].wall_tangent);
            let mut dj = constrain(-push * wb, groups[gj].wall_tangent);
            let achieved = (di - dj).dot(mtv.axis);
            if achieved < depth && achieved > 1e-12 {
                let s = depth / achieved;
                di = di * s;
                dj = dj * s;
            }
            move_group(&mut objects, &groups[gi], di);
            move_group(&mut objects, &groups[gj], dj);
            if di.norm() > 0.0 || dj.norm() > 0.0 {
                log.push(format!(
                    "iter {}: {} moved ({:.5},{:.5}), {} moved ({:.5},{:.5})",
                    iter, objects[i].id, di.x, di.y, objects[j].id, dj.x, dj.y
                ));
            }
            pending = find_overlaps(&objects, &group_of);
        }
    }
    if !resolved && find_overlaps(&objects, &group_of).is_empty() {
        resolved = true;
    }
    let remaining = find_overlaps(&objects, &group_of)
        .into_iter()
        .map(|(i, j, m)| (objects[i].id.clone(), objects[j].id.clone(), m.depth))
        .collect();
    (
        objects,
        CollisionReport {
            iterations_used,
            resolved,
            remaining_overlaps: remaining,
            displacement_log: log,
        },
    )
}

fn vertical_overlap(a: &ObjectNode, b: &ObjectNode) -> bool {
    a.obb.bottom() < b.obb.top() - 1e-9 && b.obb.bottom() < a.obb.top() - 1e-9
}

fn find_overlaps(
    objects: &[ObjectNode],
    group_of: &[usize],
) -> Vec<(usize, usize, scenesmith_core::obb::Mtv)> {
    let mut out = Vec::new();
    for i in 0..objects.len() {
        for j in (i + 1)..objects.len() {
            if group_of[i] == group_of[j] {
                continue;
            }
            if !vertical_overlap(&objects[i], &objects[j]) {
                continue;
            }
            if let Some(m) = objects[i]
                .obb
                .footprint()
                .overlap(&objects[j].obb.footprint(), 1e-12)
            {
                out.push((i, j, m));
            }
        }
    }
    out
}

/// Inverse-area split; a fully pinned partner pushes its share onto the
/// other side.
fn split_weights(a: &Group, b: &Group) -> (f64, f64) {
    let pinned_a = a.wall_tangent == Some(Vec2::ZERO);
    let pinned_b = b.wall_tangent == Some(Vec2::ZERO);
    match (pinned_a, pinned_b) {
        (true, true) => (0.0, 0.0),
        (true, false) => (0.0, 1.0),
        (false, true) => (1.0, 0.0),
        (false, false) => {
            let (aa, ab) = (a.area.max(1e-9), b.area.max(1e-9));
            (ab / (aa + ab), aa / (aa + ab))
        }
    }
}

fn constrain(d: Vec2, tangent: Option<Vec2>) -> Vec2 {
    match tangent {
        None => d,
        Some(t) if t == Vec2::ZERO => Vec2::ZERO,
        Some(t) => t * d.dot(t),
    }
}

fn move_group(objects: &mut [ObjectNode], g: &Group, d: Vec2) {
    if d.norm() == 0.0 {
        return;
    }
    for &i in &g.members {
        objects[i].obb.center[0] += d.x;
        objects[i].obb.center[1] += d.y;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::OrientedBox;
    use scenesmith_core::Xoshiro256StarStar;

    fn obj(id: &str, label: Category, center: [f64; 3], dims: [f64; 3], yaw: f64) -> ObjectNode {
        ObjectNode {
            id: id.into(),
            obb: OrientedBox {
                center,
                dims,
                yaw,
                pitch: 0.0,
                roll: 0.0,
            },
            label,
            subcategory: String::new(),
            crops: vec![],
            wall_attachment: None,
            articulated: false,
            movable: true,
        }
    }

    fn parsed(objects: Vec<ObjectNode>) -> ParsedScene {
        ParsedScene {
            room: crate::model::RoomPolygon {
                vertices: vec![[0.0, 0.0], [6.0, 0.0], [6.0, 5.0], [0.0, 5.0]],
                source_segment_ids: vec!["s".into(), "e".into(), "n".into(), "w".into()],
            },
            walls: vec![],
            objects,
            frames: vec![],
        }
    }

    #[test]
    fn overlap_area_identical_rects() {
        let r = Rect2::new(Vec2::new(1.0, 2.0), Vec2::new(0.5, 0.7), 0.3);
        assert!((footprint_overlap_area(&r, &r) - 1.0 * 1.4).abs() < 1e-12);
    }

    #[test]
    fn overlap_area_half_shift() {
        // Unit squares shifted by half a side: intersection 0.5.
        let a = Rect2::new(Vec2::ZERO, Vec2::new(0.5, 0.5), 0.0);
        let b = Rect2::new(Vec2::new(0.5, 0.0), Vec2::new(0.5, 0.5), 0.0);
        assert!((footprint_overlap_area(&a, &b) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn overlap_area_disjoint_zero() {
        let a = Rect2::new(Vec2::ZERO, Vec2::new(0.5, 0.5), 0.0);
        let b = Rect2::new(Vec2::new(3.0, 0.0), Vec2::new(0.5, 0.5), 0.4);
        assert_eq!(footprint_overlap_area(&a, &b), 0.0);
    }

    #[test]
    fn overlap_area_rotated_oracle() {
        // Monte Carlo oracle on random pairs.
        let mut rng = Xoshiro256StarStar::seed_from_u64(11);
        for _ in 0..20 {
            let a = Rect2::new(
                Vec2::new(rng.f64_in(-0.5, 0.5), rng.f64_in(-0.5, 0.5)),
                Vec2::new(rng.f64_in(0.3, 1.0), rng.f64_in(0.3, 1.0)),
                rng.f64_in(-3.0, 3.0),
            );
            let b = Rect2::new(
                Vec2::new(rng.f64_in(-0.5, 0.5), rng.f64_in(-0.5, 0.5)),
                Vec2::new(rng.f64_in(0.3, 1.0), rng.f64_in(0.3, 1.0)),
                rng.f64_in(-3.0, 3.0),
            );
            let exact = footprint_overlap_area(&a, &b);
            let mut hits = 0usize;
            let n = 200_000;
            for _ in 0..n {
                let p = Vec2::new(rng.f64_in(-3.0, 3.0), rng.f64_in(-3.0, 3.0));
                if a.contains(p) && b.contains(p) {
                    hits += 1;
                }
            }
            let est = hits as f64 / n as f64 * 36.0;
            assert!((exact - est).abs() < 0.05, "exact {exact} est {est}");
        }
    }

    #[test]
    fn vase_on_table_detected() {
        let table = obj("table", Category::Table, [2.0, 2.0, 0.375], [1.2, 0.75, 0.8], 0.0);
        let vase = obj("vase", Category::Storage, [2.1, 2.1, 0.9], [0.2, 0.3, 0.2], 0.5);
        let g = infer_relations(&parsed(vec![table, vase]), &GraphConfig::default());
        let on_top: Vec<_> = g.edges_of_kind(EdgeKind::OnTop).collect();
        assert_eq!(on_top.len(), 1);
        assert_eq!(on_top[0].src, "vase");
        assert_eq!(on_top[0].dst, "table");
    }

    #[test]
    fn floating_object_not_on_top() {
        let table = obj("table", Category::Table, [2.0, 2.0, 0.375], [1.2, 0.75, 0.8], 0.0);
        // 20 cm above the tabletop.
        let vase = obj("vase", Category::Storage, [2.1, 2.1, 1.1], [0.2, 0.3, 0.2], 0.5);
        let g = infer_relations(&parsed(vec![table, vase]), &GraphConfig::default());
        assert_eq!(g.edges_of_kind(EdgeKind::OnTop).count(), 0);
    }

    #[test]
    fn cabinet_run_connects() {
        let a = obj("cab-a", Category::Storage, [1.0, 0.3, 0.45], [0.6, 0.9, 0.6], 0.0);
        let b = obj("cab-b", Category::Storage, [1.65, 0.3, 0.45], [0.6, 0.9, 0.6], 0.02);
        let far = obj("cab-c", Category::Storage, [4.0, 0.3, 0.45], [0.6, 0.9, 0.6], 0.0);
        let g = infer_relations(&parsed(vec![a, b, far]), &GraphConfig::default());
        let conn: Vec<_> = g.edges_of_kind(EdgeKind::ConnectingTo).collect();
        assert_eq!(conn.len(), 1);
        assert_eq!((conn[0].src.as_str(), conn[0].dst.as_str()), ("cab-a", "cab-b"));
    }

    #[test]
    fn chair_pairs_with_faced_table() {
        // Chair at (2, 1) facing +Y; table centered (2, 2).
        let chair = obj("chair", Category::Chair, [2.0, 1.0, 0.45], [0.5, 0.9, 0.5], 0.0);
        let table = obj("table", Category::Table, [2.0, 2.0, 0.375], [1.2, 0.75, 0.8], 0.0);
        // Second chair faces away.
        let back = obj("chair-b", Category::Chair, [2.0, 3.2, 0.45], [0.5, 0.9, 0.5], 0.0);
        let g = infer_relations(&parsed(vec![chair, table, back]), &GraphConfig::default());
        let pairs: Vec<_> = g.edges_of_kind(EdgeKind::TableChairPair).collect();
        assert_eq!(pairs.len(), 1);
        assert_eq!(pairs[0].src, "chair");
    }

    #[test]
    fn chair_out_of_range_unpaired() {
        let chair = obj("chair", Category::Chair, [2.0, 0.2, 0.45], [0.5, 0.9, 0.5], 0.0);
        let table = obj("table", Category::Table, [2.0, 2.5, 0.375], [1.2, 0.75, 0.8], 0.0);
        let g = infer_relations(&parsed(vec![chair, table]), &GraphConfig::default());
        assert_eq!(g.edges_of_kind(EdgeKind::TableChairPair).count(), 0);
    }

    fn walls() -> Vec<WallSegment> {
        vec![WallSegment {
            id: "south".into(),
            p0: [0.0, 0.0],
            p1: [6.0, 0.0],
            height: 2.5,
            openings: vec![],
        }]
    }

    #[test]
    fn two_boxes_separate() {
        let a = obj("a", Category::Table, [2.0, 2.0, 0.4], [1.0, 0.8, 1.0], 0.0);
        let b = obj("b", Category::Sofa, [2.6, 2.0, 0.4], [1.0, 0.8, 1.0], 0.0);
        let scene = parsed(vec![a, b]);
        let g = infer_relations(&scene, &GraphConfig::default());
        let (out, rep) = resolve_collisions(&scene.objects, &g, &walls(), &SnapConfig::default());
        assert!(rep.resolved, "{:?}", rep.remaining_overlaps);
        assert!(out[0]
            .obb
            .footprint()
            .overlap(&out[1].obb.footprint(), 1e-12)
            .is_none());
        // Equal areas: symmetric split.
        assert!((out[0].obb.center[0] - (2.0 - 0.2)).abs() < 2e-3);
        assert!((out[1].obb.center[0] - (2.6 + 0.2)).abs() < 2e-3);
    }

    #[test]
    fn small_object_moves_more() {
        let big = obj("big", Category::Table, [2.0, 2.0, 0.4], [2.0, 0.8, 2.0], 0.0);
        let small = obj("small", Category::Storage, [3.1, 2.0, 0.4], [0.5, 0.8, 0.5], 0.0);
        let scene = parsed(vec![big, small]);
        let g = infer_relations(&scene, &GraphConfig::default());
        let (out, rep) = resolve_collisions(&scene.objects, &g, &walls(), &SnapConfig::default());
        assert!(rep.resolved);
        let d_big = (out[0].obb.center[0] - 2.0).abs();
        let d_small = (out[1].obb.center[0] - 3.1).abs();
        assert!(d_small > d_big * 10.0, "big {d_big} small {d_small}");
    }

    #[test]
    fn wall_attached_slides_along_wall() {
        let mut cab = obj("cab", Category::Storage, [2.0, 0.31, 0.45], [0.6, 0.9, 0.6], 0.0);
        cab.wall_attachment = Some("south".into());
        let sofa = obj("sofa", Category::Sofa, [2.3, 0.6, 0.4], [1.4, 0.8, 0.9], 0.0);
        let scene = parsed(vec![cab, sofa]);
        let g = infer_relations(&scene, &GraphConfig::default());
        let (out, rep) = resolve_collisions(&scene.objects, &g, &walls(), &SnapConfig::default());
        assert!(rep.resolved, "{:?}", rep.remaining_overlaps);
        // Cabinet keeps its distance to the wall line (y) exactly.
        assert!((out[0].obb.center[1] - 0.31).abs() < 1e-9);
    }

    #[test]
    fn on_top_group_moves_rigidly() {
        let table = obj("table", Category::Table, [2.0, 2.0, 0.375], [1.2, 0.75, 0.8], 0.0);
        let vase = obj("vase", Category::Storage, [2.1, 2.1, 0.9], [0.2, 0.3, 0.2], 0.5);
        let sofa = obj("sofa", Category::Sofa, [3.0, 2.0, 0.4], [1.4, 0.8, 0.9], 0.0);
        let scene = parsed(vec![table, vase, sofa]);
        let g = infer_relations(&scene, &GraphConfig::default());
        let before = [
            scene.objects[1].obb.center[0] - scene.objects[0].obb.center[0],
            scene.objects[1].obb.center[1] - scene.objects[0].obb.center[1],
        ];
        let (out, rep) = resolve_collisions(&scene.objects, &g, &walls(), &SnapConfig::default());
        assert!(rep.resolved);
        let after = [
            out[1].obb.center[0] - out[0].obb.center[0],
            out[1].obb.center[1] - out[0].obb.center[1],
        ];
        assert!((before[0] - after[0]).abs() < 1e-12);
        assert!((before[1] - after[1]).abs() < 1e-12);
    }

    #[test]
    fn fuzz_scenes_mostly_resolve() {
        let mut rng = Xoshiro256StarStar::seed_from_u64(99);
        let mut ok = 0;
        let trials = 60;
        for _ in 0..trials {
            let n = 3 + rng.usize_below(4);
            let objects: Vec<ObjectNode> = (0..n)
                .map(|i| {
                    obj(
                        &format!("o{i}"),
                        Category::Table,
                        [rng.f64_in(1.0, 5.0), rng.f64_in(1.0, 4.0), 0.4],
                        [rng.f64_in(0.4, 1.2), 0.8, rng.f64_in(0.4, 1.2)],
                        rng.f64_in(-3.0, 3.0),
                    )
                })
                .collect();
            let g = SceneGraph {
                nodes: objects
                    .iter()
                    .map(|o| GraphNode {
                        id: o.id.clone(),
                        kind: NodeKind::Object,
                    })
                    .collect(),
                edges: vec![],
            };
            let (_, rep) = resolve_collisions(&objects, &g, &walls(), &SnapConfig::default());
            if rep.resolved {
                ok += 1;
            }
        }
        assert!(ok * 100 >= trials * 95, "{ok}/{trials} resolved");
    }
}
