//! Shared domain types: the scan input schema, validated scene types, the
//! scene graph, and the exported scene description.

use std::collections::BTreeSet;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use scenesmith_core::obb::box_corners;
use scenesmith_core::{Rect2, Vec2, Vec3};

use crate::error::{Error, Result};

// ---------------------------------------------------------------------------
// Scan input schema (JSON boundary; lengths in meters, angles in degrees)
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ScanDocument {
    pub walls: Vec<ScanWall>,
    pub objects: Vec<ScanObject>,
    #[serde(default)]
    pub frames: Vec<ScanFrame>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ScanWall {
    pub id: String,
    pub p0: [f64; 2],
    pub p1: [f64; 2],
    pub height: f64,
    #[serde(default)]
    pub openings: Vec<ScanOpening>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ScanOpening {
    pub kind: OpeningKind,
    /// Interval along the segment, meters from p0.
    pub start: f64,
    pub end: f64,
    pub bottom: f64,
    pub top: f64,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum OpeningKind {
    Door,
    Window,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ScanObject {
    pub id: String,
    pub label: String,
    #[serde(default)]
    pub subcategory: String,
    pub center: [f64; 3],
    /// (w, h, l): w lateral, h vertical, l along the facing direction.
    pub dims: [f64; 3],
    pub yaw_deg: f64,
    #[serde(default)]
    pub pitch_deg: f64,
    #[serde(default)]
    pub roll_deg: f64,
    #[serde(default)]
    pub crops: Vec<CropRef>,
    #[serde(default)]
    pub articulated: bool,
    #[serde(default = "default_true")]
    pub movable: bool,
}

fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct CropRef {
    pub frame_id: String,
    /// (x, y, w, h) in pixels.
    pub bbox_px: [u32; 4],
    pub visibility: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ScanFrame {
    pub id: String,
    /// World-to-camera rigid transform, 4x4 row-major.
    pub pose: [[f64; 4]; 4],
    pub intrinsics: Intrinsics,
    pub image: String,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct Intrinsics {
    pub fx: f64,
    pub fy: f64,
    pub cx: f64,
    pub cy: f64,
    pub width: u32,
    pub height: u32,
}

// ---------------------------------------------------------------------------
// Closed category set (RoomPlan's 17 classes)
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[serde(rename_all = "snake_case")]
pub enum Category {
    Bathtub,
    Bed,
    Chair,
    Dishwasher,
    Fireplace,
    Oven,
    Refrigerator,
    Screen,
    Sink,
    Sofa,
    Stairs,
    Storage,
    Stove,
    Table,
    Television,
    Toilet,
    WasherDryer,
}

impl Category {
    pub fn parse(s: &str) -> Option<Category> {
        serde_json::from_value(serde_json::Value::String(s.to_string())).ok()
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Category::Bathtub => "bathtub",
            Category::Bed => "bed",
            Category::Chair => "chair",
            Category::Dishwasher => "dishwasher",
            Category::Fireplace => "fireplace",
            Category::Oven => "oven",
            Category::Refrigerator => "refrigerator",
            Category::Screen => "screen",
            Category::Sink => "sink",
            Category::Sofa => "sofa",
            Category::Stairs => "stairs",
            Category::Storage => "storage",
            Category::Stove => "stove",
            Category::Table => "table",
            Category::Television => "television",
            Category::Toilet => "toilet",
            Category::WasherDryer => "washer_dryer",
        }
    }
}

// ---------------------------------------------------------------------------
// Validated scene types (meters, radians)
// ---------------------------------------------------------------------------

/// Yaw-dominant oriented box. Pitch/roll are carried through untouched and do
/// not participate in any layout math.
#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
pub struct OrientedBox {
    pub center: [f64; 3],
    pub dims: [f64; 3],
    pub yaw: f64,
    #[serde(default)]
    pub pitch: f64,
    #[serde(default)]
    pub roll: f64,
}

/// Normalize an angle to [-pi, pi).
pub fn normalize_angle(a: f64) -> f64 {
    let mut a = a % (2.0 * PI);
    if a < -PI {
        a += 2.0 * PI;
    } else if a >= PI {
        a -= 2.0 * PI;
    }
    a
}

impl OrientedBox {
    pub fn center_v(&self) -> Vec3 {
        Vec3::from_array(self.center)
    }

    pub fn corners(&self) -> [Vec3; 8] {
        box_corners(self.center_v(), Vec3::from_array(self.dims), self.yaw)
    }

    /// Plan-view footprint: half.x = w/2, half.y = l/2, facing = local +Y.
    pub fn footprint(&self) -> Rect2 {
        Rect2::new(
            Vec2::new(self.center[0], self.center[1]),
            Vec2::new(self.dims[0] / 2.0, self.dims[2] / 2.0),
            self.yaw,
        )
    }

    /// Unit facing direction in the plan view.
    pub fn facing(&self) -> Vec2 {
        self.footprint().axis_y()
    }

    pub fn bottom(&self) -> f64 {
        self.center[2] - self.dims[1] / 2.0
    }

    pub fn top(&self) -> f64 {
        self.center[2] + self.dims[1] / 2.0
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ObjectNode {
    pub id: String,
    #[serde(rename = "box")]
    pub obb: OrientedBox,
    pub label: Category,
    pub subcategory: String,
    /// Ordered by visibility, non-increasing.
    pub crops: Vec<CropRef>,
    pub wall_attachment: Option<String>,
    pub articulated: bool,
    pub movable: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct WallSegment {
    pub id: String,
    pub p0: [f64; 2],
    pub p1: [f64; 2],
    pub height: f64,
    pub openings: Vec<ScanOpening>,
}

impl WallSegment {
    pub fn a(&self) -> Vec2 {
        Vec2::new(self.p0[0], self.p0[1])
    }

    pub fn b(&self) -> Vec2 {
        Vec2::new(self.p1[0], self.p1[1])
    }

    pub fn length(&self) -> f64 {
        (self.b() - self.a()).norm()
    }

    pub fn direction(&self) -> Vec2 {
        (self.b() - self.a()).normalized()
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct RoomPolygon {
    /// CCW, simple, closed (last vertex implicitly connects to the first).
    pub vertices: Vec<[f64; 2]>,
    pub source_segment_ids: Vec<String>,
}

impl RoomPolygon {
    pub fn polygon(&self) -> scenesmith_core::Polygon {
        scenesmith_core::Polygon::new(
            self.vertices.iter().map(|v| Vec2::new(v[0], v[1])).collect(),
        )
    }

    pub fn from_polygon(p: &scenesmith_core::Polygon, ids: Vec<String>) -> Self {
        RoomPolygon {
            vertices: p.vertices.iter().map(|v| [v.x, v.y]).collect(),
            source_segment_ids: ids,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct CameraFrame {
    pub id: String,
    pub pose: [[f64; 4]; 4],
    pub intrinsics: Intrinsics,
    pub image: String,
}

impl CameraFrame {
    /// World point to pixel coordinates; `None` when behind the camera.
    pub fn project(&self, p: [f64; 3]) -> Option<(f64, f64)> {
        let m = &self.pose;
        let x = m[0][0] * p[0] + m[0][1] * p[1] + m[0][2] * p[2] + m[0][3];
        let y = m[1][0] * p[0] + m[1][1] * p[1] + m[1][2] * p[2] + m[1][3];
        let z = m[2][0] * p[0] + m[2][1] * p[1] + m[2][2] * p[2] + m[2][3];
        if z <= 0.0 {
            return None;
        }
        Some((
            self.intrinsics.fx * x / z + self.intrinsics.cx,
            self.intrinsics.fy * y / z + self.intrinsics.cy,
        ))
    }

    pub fn sees(&self, p: [f64; 3]) -> bool {
        match self.project(p) {
            Some((u, v)) => {
                u >= 0.0
                    && v >= 0.0
                    && u < self.intrinsics.width as f64
                    && v < self.intrinsics.height as f64
            }
            None => false,
        }
    }
}

/// A validated scan: every invariant checked, degrees converted to radians.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct Scene {
    pub walls: Vec<WallSegment>,
    pub objects: Vec<ObjectNode>,
    pub frames: Vec<CameraFrame>,
}

// ---------------------------------------------------------------------------
// Scene graph
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq, Eq, PartialOrd, Ord)]
#[serde(rename_all = "snake_case")]
pub enum EdgeKind {
    AttachedToWall,
    OnTop,
    TableChairPair,
    ConnectingTo,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq, PartialOrd, Ord)]
pub struct Edge {
    pub kind: EdgeKind,
    pub src: String,
    pub dst: String,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum NodeKind {
    Wall,
    Door,
    Window,
    Object,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct GraphNode {
    pub id: String,
    pub kind: NodeKind,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Default)]
pub struct SceneGraph {
    pub nodes: Vec<GraphNode>,
    pub edges: Vec<Edge>,
}

impl SceneGraph {
    pub fn edges_of_kind(&self, kind: EdgeKind) -> impl Iterator<Item = &Edge> {
        self.edges.iter().filter(move |e| e.kind == kind)
    }

    pub fn has_node(&self, id: &str) -> bool {
        self.nodes.iter().any(|n| n.id == id)
    }

    /// Structural invariants: edges reference nodes, OnTop is acyclic,
    /// AttachedToWall points object -> wall.
    pub fn validate(&self) -> Result<()> {
        let mut report = Vec::new();
        for e in &self.edges {
            if !self.has_node(&e.src) || !self.has_node(&e.dst) {
                report.push(format!("edge {:?} {}->{} references missing node", e.kind, e.src, e.dst));
            }
        }
        for e in self.edges_of_kind(EdgeKind::AttachedToWall) {
            let src_kind = self.nodes.iter().find(|n| n.id == e.src).map(|n| n.kind);
            let dst_kind = self.nodes.iter().find(|n| n.id == e.dst).map(|n| n.kind);
            if src_kind != Some(NodeKind::Object) || dst_kind != Some(NodeKind::Wall) {
                report.push(format!("attached_to_wall {}->{} must be object->wall", e.src, e.dst));
            }
        }
        if self.on_top_has_cycle() {
            report.push("on_top edges form a cycle".to_string());
        }
        if report.is_empty() {
            Ok(())
        } else {
            Err(Error::Validation { report })
        }
    }

    pub fn on_top_has_cycle(&self) -> bool {
        // DFS over OnTop edges only.
        let edges: Vec<&Edge> = self.edges_of_kind(EdgeKind::OnTop).collect();
        let mut visiting = BTreeSet::new();
        let mut done = BTreeSet::new();
        fn dfs<'a>(
            node: &'a str,
            edges: &[&'a Edge],
            visiting: &mut BTreeSet<&'a str>,
            done: &mut BTreeSet<&'a str>,
        ) -> bool {
            if done.contains(node) {
                return false;
            }
            if !visiting.insert(node) {
                return true;
            }
            for e in edges.iter().filter(|e| e.src == node) {
                if dfs(&e.dst, edges, visiting, done) {
                    return true;
                }
            }
            visiting.remove(node);
            done.insert(node);
            false
        }
        let starts: Vec<&str> = edges.iter().map(|e| e.src.as_str()).collect();
        for s in starts {
            if dfs(s, &edges, &mut visiting, &mut done) {
                return true;
            }
        }
        false
    }
}

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

/// Check every type invariant on a raw scan document and convert it to the
/// validated internal representation (degrees -> radians).
pub fn validate_scan(doc: &ScanDocument) -> Result<Scene> {
    let mut report = Vec::new();

    let mut walls = Vec::new();
    for w in &doc.walls {
        let len = Vec2::new(w.p1[0] - w.p0[0], w.p1[1] - w.p0[1]).norm();
        if len <= 0.0 {
            report.push(format!("degenerate geometry: zero-length wall '{}'", w.id));
            continue;
        }
        if w.height <= 0.0 {
            report.push(format!("degenerate geometry: wall '{}' height must be > 0", w.id));
            continue;
        }
        let mut ok = true;
        let mut sorted = w.openings.clone();
        sorted.sort_by(|a, b| a.start.partial_cmp(&b.start).unwrap());
        for (i, o) in sorted.iter().enumerate() {
            if o.start < 0.0 || o.end > len || o.start >= o.end {
                report.push(format!(
                    "wall '{}': opening interval [{}, {}] outside [0, {len}]",
                    w.id, o.start, o.end
                ));
                ok = false;
            }
            if i > 0 && o.start < sorted[i - 1].end {
                report.push(format!("wall '{}': overlapping openings", w.id));
                ok = false;
            }
        }
        if ok {
            walls.push(WallSegment {
                id: w.id.clone(),
                p0: w.p0,
                p1: w.p1,
                height: w.height,
                openings: sorted,
            });
        }
    }

    let mut objects = Vec::new();
    for o in &doc.objects {
        if o.dims.iter().any(|d| *d <= 0.0) {
            report.push(format!(
                "degenerate geometry: dims must be > 0 (object '{}')",
                o.id
            ));
            continue;
        }
        let label = match Category::parse(&o.label) {
            Some(c) => c,
            None => {
                report.push(format!("object '{}': unknown category '{}'", o.id, o.label));
                continue;
            }
        };
        let mut crops = o.crops.clone();
        crops.sort_by(|a, b| b.visibility.partial_cmp(&a.visibility).unwrap());
        objects.push(ObjectNode {
            id: o.id.clone(),
            obb: OrientedBox {
                center: o.center,
                dims: o.dims,
                yaw: normalize_angle(o.yaw_deg.to_radians()),
                pitch: o.pitch_deg.to_radians(),
                roll: o.roll_deg.to_radians(),
            },
            label,
            subcategory: o.subcategory.clone(),
            crops,
            wall_attachment: None,
            articulated: o.articulated,
            movable: o.movable,
        });
    }

    let mut frames = Vec::new();
    for f in &doc.frames {
        if !rotation_orthonormal(&f.pose) {
            report.push(format!("frame '{}': rotation not orthonormal", f.id));
            continue;
        }
        frames.push(CameraFrame {
            id: f.id.clone(),
            pose: f.pose,
            intrinsics: f.intrinsics.clone(),
            image: f.image.clone(),
        });
    }

    if report.is_empty() {
        Ok(Scene {
            walls,
            objects,
            frames,
        })
    } else {
        Err(Error::Validation { report })
    }
}

fn rotation_orthonormal(pose: &[[f64; 4]; 4]) -> bool {
    let r = |i: usize| Vec3::new(pose[i][0], pose[i][1], pose[i][2]);
    let (a, b, c) = (r(0), r(1), r(2));
    let tol = 1e-6;
    (a.norm() - 1.0).abs() < tol
        && (b.norm() - 1.0).abs() < tol
        && (c.norm() - 1.0).abs() < tol
        && a.dot(b).abs() < tol
        && a.dot(c).abs() < tol
        && b.dot(c).abs() < tol
        && (a.cross(b).dot(c) - 1.0).abs() < tol
}

// ---------------------------------------------------------------------------
// Scene description (export schema; see assemble module for construction)
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct SceneDescription {
    pub schema: String,
    pub provenance: Provenance,
    pub rooms: Vec<RoomSpec>,
    pub placements: Vec<Placement>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct Provenance {
    pub config_hash: String,
    pub seeds: crate::config::Seeds,
    pub stage_versions: std::collections::BTreeMap<String, String>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct RoomSpec {
    pub polygon: Vec<[f64; 2]>,
    pub wall_height: f64,
    pub wall_thickness: f64,
    pub walls: Vec<WallPrism>,
    pub floor: Vec<[f64; 2]>,
}

/// One wall piece: a convex quad footprint extruded from base_z to top_z.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct WallPrism {
    pub id: String,
    pub footprint: Vec<[f64; 2]>,
    pub base_z: f64,
    pub top_z: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct Placement {
    pub id: String,
    pub asset_id: Option<String>,
    pub kind: PlacementKind,
    pub position: [f64; 3],
    pub rotation: [f64; 3],
    pub scale: [f64; 3],
    pub physics: PhysicsSpec,
    pub materials: std::collections::BTreeMap<String, MaterialAssignment>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub articulation: Option<serde_json::Value>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub flags: Vec<String>,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum PlacementKind {
    Asset,
    PlaceholderBox,
    Structural,
    DoorAsset,
    WindowAsset,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct PhysicsSpec {
    pub mass_kg: f64,
    pub body: RigidBodyKind,
    pub collision_source: CollisionSource,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum RigidBodyKind {
    Active,
    Passive,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum CollisionSource {
    Mesh,
    Box,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct MaterialAssignment {
    pub material_id: String,
    pub target_lab: [f64; 3],
    pub clamped_fraction: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub shifted_albedo: Option<String>,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_doc() -> ScanDocument {
        ScanDocument {
            walls: vec![
                ScanWall {
                    id: "w0".into(),
                    p0: [0.0, 0.0],
                    p1: [4.0, 0.0],
                    height: 2.5,
                    openings: vec![],
                },
                ScanWall {
                    id: "w1".into(),
                    p0: [4.0, 0.0],
                    p1: [4.0, 3.0],
                    height: 2.5,
                    openings: vec![],
                },
            ],
            objects: vec![ScanObject {
                id: "o0".into(),
                label: "chair".into(),
                subcategory: "bar_chair".into(),
                center: [1.0, 1.0, 0.45],
                dims: [0.5, 0.9, 0.5],
                yaw_deg: 90.0,
                pitch_deg: 0.0,
                roll_deg: 0.0,
                crops: vec![],
                articulated: false,
                movable: true,
            }],
            frames: vec![],
        }
    }

    #[test]
    fn well_formed_scan_validates() {
        let scene = validate_scan(&sample_doc()).unwrap();
        assert_eq!(scene.walls.len(), 2);
        assert_eq!(scene.objects.len(), 1);
        assert!((scene.objects[0].obb.yaw - std::f64::consts::FRAC_PI_2).abs() < 1e-12);
    }

    #[test]
    fn zero_dims_rejected() {
        let mut doc = sample_doc();
        doc.objects[0].dims = [0.0, 1.0, 1.0];
        let err = validate_scan(&doc).unwrap_err();
        assert!(err.to_string().contains("dims must be > 0"));
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn zero_length_wall_rejected() {
        let mut doc = sample_doc();
        doc.walls[0].p1 = doc.walls[0].p0;
        let err = validate_scan(&doc).unwrap_err();
        assert!(err.to_string().contains("zero-length wall"));
    }

    #[test]
    fn overlapping_openings_rejected() {
        let mut doc = sample_doc();
        doc.walls[0].openings = vec![
            ScanOpening {
                kind: OpeningKind::Door,
                start: 0.5,
                end: 1.5,
                bottom: 0.0,
                top: 2.0,
            },
            ScanOpening {
                kind: OpeningKind::Window,
                start: 1.0,
                end: 2.0,
                bottom: 0.9,
                top: 1.8,
            },
        ];
        assert!(validate_scan(&doc).is_err());
    }

    #[test]
    fn yaw_normalized() {
        assert!((normalize_angle(3.0 * PI) - (-PI)).abs() < 1e-12);
        assert!((normalize_angle(PI) - (-PI)).abs() < 1e-12);
        assert_eq!(normalize_angle(0.5), 0.5);
    }

    #[test]
    fn corners_mean_is_center() {
        let b = OrientedBox {
            center: [1.0, 2.0, 0.5],
            dims: [0.8, 1.0, 0.6],
            yaw: 0.7,
            pitch: 0.0,
            roll: 0.0,
        };
        let mut mean = Vec3::ZERO;
        for c in b.corners() {
            mean = mean + c;
        }
        mean = mean * (1.0 / 8.0);
        assert!((mean - b.center_v()).norm() < 1e-9);
    }

    #[test]
    fn corner_equivariance() {
        let b = OrientedBox {
            center: [0.0, 0.0, 0.0],
            dims: [1.0, 2.0, 3.0],
            yaw: 0.3,
            pitch: 0.0,
            roll: 0.0,
        };
        // Translation equivariance.
        let mut t = b;
        t.center = [1.5, -0.5, 2.0];
        let shift = Vec3::new(1.5, -0.5, 2.0);
        for (c0, c1) in b.corners().iter().zip(t.corners().iter()) {
            assert!(((*c0 + shift) - *c1).norm() < 1e-9);
        }
        // Yaw equivariance: rotating yaw by phi rotates corners about center.
        let phi = 0.9;
        let mut r = b;
        r.yaw += phi;
        for (c0, c1) in b.corners().iter().zip(r.corners().iter()) {
            let rotated = c0.xy().rotated(phi);
            assert!((rotated - c1.xy()).norm() < 1e-9);
            assert!((c0.z - c1.z).abs() < 1e-12);
        }
    }

    #[test]
    fn on_top_cycle_detected() {
        let g = SceneGraph {
            nodes: vec![
                GraphNode { id: "a".into(), kind: NodeKind::Object },
                GraphNode { id: "b".into(), kind: NodeKind::Object },
            ],
            edges: vec![
                Edge { kind: EdgeKind::OnTop, src: "a".into(), dst: "b".into() },
                Edge { kind: EdgeKind::OnTop, src: "b".into(), dst: "a".into() },
            ],
        };
        assert!(g.on_top_has_cycle());
        assert!(g.validate().is_err());
    }

    #[test]
    fn scan_round_trip_byte_identical() {
        let doc = sample_doc();
        let s = serde_json::to_string_pretty(&doc).unwrap();
        let back: ScanDocument = serde_json::from_str(&s).unwrap();
        assert_eq!(serde_json::to_string_pretty(&back).unwrap(), s);
    }

    #[test]
    fn camera_projection_center() {
        let f = CameraFrame {
            id: "f".into(),
            pose: [
                [1.0, 0.0, 0.0, 0.0],
                [0.0, 1.0, 0.0, 0.0],
                [0.0, 0.0, 1.0, 0.0],
                [0.0, 0.0, 0.0, 1.0],
            ],
            intrinsics: Intrinsics {
                fx: 100.0,
                fy: 100.0,
                cx: 32.0,
                cy: 32.0,
                width: 64,
                height: 64,
            },
            image: String::new(),
        };
        assert_eq!(f.project([0.0, 0.0, 1.0]), Some((32.0, 32.0)));
        assert!(f.sees([0.0, 0.0, 1.0]));
        assert!(!f.sees([0.0, 0.0, -1.0])); // behind camera
    }
}
