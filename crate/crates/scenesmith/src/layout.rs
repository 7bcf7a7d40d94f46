//! Layout parsing: closes noisy wall segments into a room polygon, snaps it
//! to a grid, aligns furniture to walls, and pulls stray objects inside.

use scenesmith_core::polygon::project_onto_segment;
use scenesmith_core::{Polygon, Vec2};

use crate::config::SnapConfig;
use crate::error::{Error, Result};
use crate::model::{normalize_angle, ObjectNode, RoomPolygon, WallSegment};

#[derive(Debug, Clone)]
pub struct ClosedWalls {
    pub room: RoomPolygon,
    pub segments: Vec<WallSegment>,
    pub log: Vec<String>,
}

fn angle_diff(a: f64, b: f64) -> f64 {
    normalize_angle(a - b).abs()
}

// -- union-find over endpoint indices --------------------------------------

pub(crate) struct Dsu {
    parent: Vec<usize>,
}

impl Dsu {
    pub(crate) fn new(n: usize) -> Self {
        Dsu {
            parent: (0..n).collect(),
        }
    }
    pub(crate) fn find(&mut self, i: usize) -> usize {
        if self.parent[i] != i {
            let r = self.find(self.parent[i]);
            self.parent[i] = r;
            r
        } else {
            i
        }
    }
    pub(crate) fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra] = rb;
        }
    }
}

/// Snap nearly matching endpoints together, build the endpoint/segment graph,
/// and extract the room-boundary loop. When the graph has no cycle the two
/// closest loose ends are joined and closure is retried.
pub fn close_walls(segments: &[WallSegment], cfg: &SnapConfig) -> Result<ClosedWalls> {
    let usable: Vec<&WallSegment> = segments.iter().filter(|s| s.length() > 0.0).collect();
    if usable.len() < 3 {
        return Err(Error::Geometry(format!(
            "closure impossible: {} usable segments, need at least 3",
            usable.len()
        )));
    }
    let mut log = Vec::new();

    // Endpoint clustering: indices 2i (p0) and 2i+1 (p1).
    let pts: Vec<Vec2> = usable
        .iter()
        .flat_map(|s| [s.a(), s.b()])
        .collect();
    let mut dsu = Dsu::new(pts.len());
    for i in 0..pts.len() {
        for j in (i + 1)..pts.len() {
            if pts[i].dist(pts[j]) <= cfg.endpoint_snap_radius {
                dsu.union(i, j);
            }
        }
    }
    // Cluster centroids become graph nodes.
    let mut node_of = vec![usize::MAX; pts.len()];
    let mut nodes: Vec<Vec2> = Vec::new();
    let mut members: Vec<Vec<usize>> = Vec::new();
    for i in 0..pts.len() {
        let root = dsu.find(i);
        let existing = (0..i).find(|&j| dsu.find(j) == root);
        match existing {
            Some(j) => node_of[i] = node_of[j],
            None => {
                node_of[i] = nodes.len();
                nodes.push(Vec2::ZERO);
                members.push(Vec::new());
            }
        }
        members[node_of[i]].push(i);
    }
    for (n, mem) in members.iter().enumerate() {
        let mut c = Vec2::ZERO;
        for &i in mem {
            c += pts[i];
        }
        nodes[n] = c * (1.0 / mem.len() as f64);
        if mem.len() > 1 {
            log.push(format!(
                "merged {} endpoints to ({:.4}, {:.4})",
                mem.len(),
                nodes[n].x,
                nodes[n].y
            ));
        }
    }

    // Edges: (node a, node b, label). Drop segments collapsed by snapping.
    let mut edges: Vec<(usize, usize, String)> = Vec::new();
    for (i, s) in usable.iter().enumerate() {
        let (a, b) = (node_of[2 * i], node_of[2 * i + 1]);
        if a == b {
            log.push(format!("segment '{}' collapsed by endpoint snapping", s.id));
            continue;
        }
        edges.push((a, b, s.id.clone()));
    }

    // Join loose ends until a cycle exists.
    let mut synth = 0usize;
    let cycle = loop {
        if let Some(c) = extract_best_cycle(nodes.len(), &edges, &nodes, &mut log) {
            break c;
        }
        let mut degree = vec![0usize; nodes.len()];
        for (a, b, _) in &edges {
            degree[*a] += 1;
            degree[*b] += 1;
        }
        let loose: Vec<usize> = (0..nodes.len()).filter(|&n| degree[n] == 1).collect();
        if loose.len() < 2 {
            return Err(Error::Geometry(
                "closure impossible: no cycle and no loose ends to join".to_string(),
            ));
        }
        let mut best = (f64::INFINITY, 0, 0);
        for i in 0..loose.len() {
            for j in (i + 1)..loose.len() {
                let d = nodes[loose[i]].dist(nodes[loose[j]]);
                if d < best.0 {
                    best = (d, loose[i], loose[j]);
                }
            }
        }
        let id = format!("synth-{synth}");
        synth += 1;
        log.push(format!(
            "joined loose ends ({:.3},{:.3})-({:.3},{:.3}) as '{id}'",
            nodes[best.1].x, nodes[best.1].y, nodes[best.2].x, nodes[best.2].y
        ));
        edges.push((best.1, best.2, id));
    };

    // Orient CCW and materialize the polygon.
    let mut verts: Vec<Vec2> = cycle.iter().map(|&(n, _)| nodes[n]).collect();
    let mut ids: Vec<String> = cycle.iter().map(|(_, id)| id.clone()).collect();
    let poly = Polygon::new(verts.clone());
    if !poly.is_simple() {
        return Err(Error::Geometry(
            "closure impossible: joined loop is not a simple polygon".to_string(),
        ));
    }
    if !poly.is_ccw() {
        // ids[i] labels the edge v[i] -> v[i+1]; keep that pairing after
        // reversing the vertex order.
        let n = verts.len();
        verts.reverse();
        ids = (0..n).map(|j| ids[(2 * n - 2 - j) % n].clone()).collect();
    }

    let room = RoomPolygon {
        vertices: verts.iter().map(|v| [v.x, v.y]).collect(),
        source_segment_ids: ids,
    };
    let adjusted = rebuild_segments(&room, segments);
    Ok(ClosedWalls {
        room,
        segments: adjusted,
        log,
    })
}

/// One wall segment per polygon edge, endpoints on the polygon, height and
/// openings carried over from the source segment by id (synthesized edges
/// inherit the tallest segment height).
pub fn rebuild_segments(room: &RoomPolygon, originals: &[WallSegment]) -> Vec<WallSegment> {
    let n = room.vertices.len();
    let max_height = originals
        .iter()
        .map(|s| s.height)
        .fold(0.0f64, f64::max)
        .max(2.5);
    (0..n)
        .map(|i| {
            let id = room.source_segment_ids[i].clone();
            let src = originals.iter().find(|s| s.id == id);
            WallSegment {
                id,
                p0: room.vertices[i],
                p1: room.vertices[(i + 1) % n],
                height: src.map_or(max_height, |s| s.height),
                openings: src.map_or_else(Vec::new, |s| s.openings.clone()),
            }
        })
        .collect()
}

/// Find one simple cycle per connected component and keep the one with the
/// largest enclosed area. Returns edge-annotated vertices in order.
fn extract_best_cycle(
    node_count: usize,
    edges: &[(usize, usize, String)],
    nodes: &[Vec2],
    log: &mut Vec<String>,
) -> Option<Vec<(usize, String)>> {
    let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); node_count]; // (neighbor, edge idx)
    for (i, (a, b, _)) in edges.iter().enumerate() {
        adj[*a].push((*b, i));
        adj[*b].push((*a, i));
    }
    let mut best: Option<(f64, Vec<(usize, String)>)> = None;
    let mut cycles_found = 0usize;
    let mut visited = vec![false; node_count];
    for start in 0..node_count {
        if visited[start] || adj[start].is_empty() {
            continue;
        }
        // Iterative DFS recording the tree path; a back edge closes a cycle.
        let mut parent_edge: Vec<Option<(usize, usize)>> = vec![None; node_count]; // (parent, edge)
        let mut stack = vec![start];
        let mut in_comp = Vec::new();
        let mut closing: Vec<usize> = Vec::new(); // non-tree edge indices, once each
        let mut seen = vec![false; node_count];
        seen[start] = true;
        while let Some(u) = stack.pop() {
            in_comp.push(u);
            for &(v, ei) in &adj[u] {
                if !seen[v] {
                    seen[v] = true;
                    parent_edge[v] = Some((u, ei));
                    stack.push(v);
                } else if parent_edge[u].map(|(_, e)| e) != Some(ei)
                    && parent_edge[v] != Some((u, ei))
                    && !closing.contains(&ei)
                {
                    closing.push(ei);
                }
            }
        }
        for &n in &in_comp {
            visited[n] = true;
        }
        // Each non-tree edge (u, v) closes a loop through the two tree paths
        // up to the lowest common ancestor of u and v.
        let chain = |mut n: usize| -> Vec<(usize, Option<usize>)> {
            let mut c = vec![(n, parent_edge[n].map(|(_, e)| e))];
            while let Some((p, _)) = parent_edge[n] {
                c.push((p, parent_edge[p].map(|(_, e)| e)));
                n = p;
            }
            c
        };
        for ei in closing {
            let (u, v) = (edges[ei].0, edges[ei].1);
            let (cu, cv) = (chain(u), chain(v));
            let Some(lca) = cu
                .iter()
                .map(|&(n, _)| n)
                .find(|n| cv.iter().any(|&(m, _)| m == *n))
            else {
                continue;
            };
            // Walk u -> lca, then lca -> v, then close with edge ei.
            let mut path: Vec<(usize, String)> = Vec::new();
            for &(n, pe) in cu.iter().take_while(|&&(n, _)| n != lca) {
                path.push((n, edges[pe.expect("non-root")].2.clone()));
            }
            let down: Vec<(usize, Option<usize>)> = cv
                .iter()
                .take_while(|&&(n, _)| n != lca)
                .cloned()
                .collect();
            path.push((lca, down.last().map_or_else(
                || edges[ei].2.clone(),
                |&(_, pe)| edges[pe.expect("non-root")].2.clone(),
            )));
            for (i, &(n, _)) in down.iter().enumerate().rev() {
                let label = if i == 0 {
                    edges[ei].2.clone()
                } else {
                    edges[down[i - 1].1.expect("non-root")].2.clone()
                };
                path.push((n, label));
            }
            if path.len() < 3 {
                continue;
            }
            cycles_found += 1;
            let poly = Polygon::new(path.iter().map(|&(n, _)| nodes[n]).collect());
            let area = poly.area();
            if best.as_ref().is_none_or(|(ba, _)| area > *ba) {
                best = Some((area, path));
            }
        }
    }
    if cycles_found > 1 {
        log.push(format!(
            "{} loops found; keeping the largest-area loop",
            cycles_found
        ));
    }
    best.filter(|(_, c)| c.len() >= 3).map(|(_, c)| c)
}

/// Quantize vertices to the grid and axis-align near-axis edges, reverting
/// any individual edit that breaks simplicity.
pub fn snap_to_grid(room: &RoomPolygon, cfg: &SnapConfig) -> RoomPolygon {
    let mut poly = room.polygon();
    let n = poly.len();

    // Axis alignment first: rotate near-axis edges about their midpoints so
    // the subsequent quantization cannot tilt them again.
    for i in 0..n {
        let (a, b) = poly.edge(i);
        let dir = b - a;
        let ang = dir.angle();
        // Nearest multiple of 90 degrees.
        let target = (ang / std::f64::consts::FRAC_PI_2).round() * std::f64::consts::FRAC_PI_2;
        let dev = normalize_angle(target - ang);
        if dev.abs() < 1e-12 || dev.abs() > cfg.angle_snap {
            continue;
        }
        let mid = (a + b) * 0.5;
        let mut cand = poly.clone();
        cand.vertices[i] = mid + (a - mid).rotated(dev);
        cand.vertices[(i + 1) % n] = mid + (b - mid).rotated(dev);
        if cand.is_simple() {
            poly = cand;
        }
    }

    // Grid quantization, per vertex with reversion.
    let pitch = cfg.grid_pitch;
    for i in 0..n {
        let v = poly.vertices[i];
        let snapped = Vec2::new((v.x / pitch).round() * pitch, (v.y / pitch).round() * pitch);
        let mut cand = poly.clone();
        cand.vertices[i] = snapped;
        if cand.is_simple() {
            poly = cand;
        }
    }

    RoomPolygon::from_polygon(&poly, room.source_segment_ids.clone())
}

/// Appendix step 2: objects close to and facing a wall are snapped flush
/// against it. The anchor point is the midpoint of the back face.
pub fn align_objects_to_walls(
    objects: &[ObjectNode],
    segments: &[WallSegment],
    cfg: &SnapConfig,
    log: &mut Vec<String>,
) -> Vec<ObjectNode> {
    objects
        .iter()
        .map(|obj| {
            let mut obj = obj.clone();
            let facing = obj.obb.facing();
            let center = Vec2::new(obj.obb.center[0], obj.obb.center[1]);
            let anchor = center - facing * (obj.obb.dims[2] / 2.0);

            // Closest wall by anchor distance.
            let mut best: Option<(f64, &WallSegment)> = None;
            for seg in segments {
                let d = anchor.dist(project_onto_segment(anchor, seg.a(), seg.b()));
                if best.is_none_or(|(bd, _)| d < bd) {
                    best = Some((d, seg));
                }
            }
            let Some((dist, seg)) = best else { return obj };
            if dist > cfg.wall_align_max_dist {
                return obj;
            }
            // Wall normal on the object's side.
            let dir = seg.direction();
            let mut normal = dir.perp();
            let proj = project_onto_segment(anchor, seg.a(), seg.b());
            if (center - proj).dot(normal) < 0.0 {
                normal = -normal;
            }
            // Facing must agree with the wall normal within the angle gate.
            if angle_diff(facing.angle(), normal.angle()) > cfg.wall_align_max_angle {
                return obj;
            }
            let new_yaw = normalize_angle(normal.angle() - std::f64::consts::FRAC_PI_2);
            // Rotate about the center, then push along the normal so the
            // back face sits at the clearance distance. The tangential
            // coordinate of the center is preserved.
            let t = (center - seg.a()).dot(dir);
            let new_center =
                seg.a() + dir * t + normal * (cfg.wall_clearance + obj.obb.dims[2] / 2.0);
            log.push(format!(
                "aligned '{}' to wall '{}': center ({:.4},{:.4})->({:.4},{:.4}), yaw {:.4}->{:.4}",
                obj.id, seg.id, center.x, center.y, new_center.x, new_center.y, obj.obb.yaw, new_yaw
            ));
            obj.obb.center[0] = new_center.x;
            obj.obb.center[1] = new_center.y;
            obj.obb.yaw = new_yaw;
            obj.wall_attachment = Some(seg.id.clone());
            obj
        })
        .collect()
}

#[derive(Debug, Clone)]
pub struct PullResult {
    pub room: RoomPolygon,
    pub segments: Vec<WallSegment>,
    pub converged: bool,
    pub remaining_penetration: f64,
}

/// Appendix step 3: expand walls outward until every object footprint corner
/// is inside the room polygon.
pub fn pull_objects_inside(
    objects: &[ObjectNode],
    room: &RoomPolygon,
    originals: &[WallSegment],
    cfg: &SnapConfig,
    log: &mut Vec<String>,
) -> Result<PullResult> {
    let mut poly = room.polygon();
    let ids = room.source_segment_ids.clone();

    for _pass in 0..cfg.max_expand_passes {
        // Max penetration per edge over all exterior corners.
        let mut per_edge: Vec<f64> = vec![0.0; poly.len()];
        let mut any = false;
        for obj in objects {
            for corner in obj.obb.footprint().corners() {
                if poly.contains(corner) {
                    continue;
                }
                any = true;
                let e = poly.nearest_edge(corner);
                let (a, b) = poly.edge(e);
                let pen = corner.dist(project_onto_segment(corner, a, b));
                per_edge[e] = per_edge[e].max(pen);
            }
        }
        if !any {
            let room = RoomPolygon::from_polygon(&poly, ids.clone());
            let segments = rebuild_segments(&room, originals);
            return Ok(PullResult {
                room,
                segments,
                converged: true,
                remaining_penetration: 0.0,
            });
        }
        // Translate every offending edge outward along its normal.
        for (edge, pen) in per_edge.iter().enumerate() {
            if *pen <= 0.0 {
                continue;
            }
            let (a, b) = poly.edge(edge);
            // CCW polygon: outward normal is the clockwise perpendicular.
            let outward = -((b - a).normalized().perp());
            let shift = outward * (pen + cfg.wall_clearance);
            let cand = poly.translate_edge(edge, shift);
            if cand.is_simple() && cand.area() >= poly.area() {
                log.push(format!(
                    "expanded wall '{}' outward by {:.4} m",
                    ids[edge],
                    pen + cfg.wall_clearance
                ));
                poly = cand;
            } else {
                // Mitre intersection degenerated; translate endpoints only.
                let mut fallback = poly.clone();
                fallback.vertices[edge] = a + shift;
                fallback.vertices[(edge + 1) % poly.len()] = b + shift;
                if fallback.is_simple() && fallback.area() >= poly.area() {
                    poly = fallback;
                }
            }
        }
    }

    // Non-convergence: report remaining penetration.
    let mut remaining = 0.0f64;
    for obj in objects {
        for corner in obj.obb.footprint().corners() {
            if !poly.contains(corner) {
                remaining = remaining.max(poly.boundary_distance(corner));
            }
        }
    }
    Err(Error::Geometry(format!(
        "pull_objects_inside did not converge after {} passes; remaining penetration {:.4} m",
        cfg.max_expand_passes, remaining,
    )))
}

/// Output of the `parse` stage.
#[derive(Debug, Clone, serde::Serialize, serde::Deserialize, PartialEq)]
pub struct ParsedScene {
    pub room: RoomPolygon,
    pub walls: Vec<WallSegment>,
    pub objects: Vec<ObjectNode>,
    pub frames: Vec<crate::model::CameraFrame>,
}

/// Steps 1-3: wall closure, grid snapping, wall alignment, in-room pull.
pub fn parse_scene(
    scene: &crate::model::Scene,
    cfg: &SnapConfig,
) -> Result<(ParsedScene, Vec<String>)> {
    let closed = close_walls(&scene.walls, cfg)?;
    let mut log = closed.log;
    let room = snap_to_grid(&closed.room, cfg);
    let segments = rebuild_segments(&room, &scene.walls);
    let objects = align_objects_to_walls(&scene.objects, &segments, cfg, &mut log);
    let pulled = pull_objects_inside(&objects, &room, &scene.walls, cfg, &mut log)?;
    Ok((
        ParsedScene {
            room: pulled.room,
            walls: pulled.segments,
            objects,
            frames: scene.frames.clone(),
        },
        log,
    ))
}
