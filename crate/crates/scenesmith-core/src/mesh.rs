//! Indexed triangle meshes: bounds, unit-cube normalization.

use alloc::vec::Vec;

use crate::vec::Vec3;

#[derive(Debug, Clone, PartialEq)]
pub struct TriMesh {
    pub vertices: Vec<[f64; 3]>,
    pub triangles: Vec<[u32; 3]>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MeshError {
    Empty,
    Degenerate,
    NonFinite,
}

impl TriMesh {
    pub fn bounds(&self) -> ([f64; 3], [f64; 3]) {
        let mut lo = [f64::INFINITY; 3];
        let mut hi = [f64::NEG_INFINITY; 3];
        for v in &self.vertices {
            for k in 0..3 {
                lo[k] = lo[k].min(v[k]);
                hi[k] = hi[k].max(v[k]);
            }
        }
        (lo, hi)
    }

    pub fn triangle(&self, i: usize) -> [Vec3; 3] {
        let t = self.triangles[i];
        [
            Vec3::from_array(self.vertices[t[0] as usize]),
            Vec3::from_array(self.vertices[t[1] as usize]),
            Vec3::from_array(self.vertices[t[2] as usize]),
        ]
    }

    pub fn triangle_area(&self, i: usize) -> f64 {
        let [a, b, c] = self.triangle(i);
        (b - a).cross(c - a).norm() / 2.0
    }

    pub fn surface_area(&self) -> f64 {
        (0..self.triangles.len()).map(|i| self.triangle_area(i)).sum()
    }
}

/// Center the bounding box at the origin and scale uniformly so the largest
/// axis extent is 1 (tight unit-cube fit). Iterates to a floating-point
/// fixpoint so the operation is exactly idempotent.
pub fn normalize_mesh(mesh: &TriMesh) -> Result<TriMesh, MeshError> {
    if mesh.vertices.is_empty() || mesh.triangles.is_empty() {
        return Err(MeshError::Empty);
    }
    if mesh
        .vertices
        .iter()
        .any(|v| v.iter().any(|c| !c.is_finite()))
    {
        return Err(MeshError::NonFinite);
    }
    let mut out = mesh.clone();
    for _ in 0..8 {
        let (lo, hi) = out.bounds();
        let extent = (0..3).map(|k| hi[k] - lo[k]).fold(0.0f64, f64::max);
        if extent <= 0.0 {
            return Err(MeshError::Degenerate);
        }
        let center = [
            (lo[0] + hi[0]) / 2.0,
            (lo[1] + hi[1]) / 2.0,
            (lo[2] + hi[2]) / 2.0,
        ];
        if center == [0.0, 0.0, 0.0] && extent == 1.0 {
            break;
        }
        for v in &mut out.vertices {
            for k in 0..3 {
                v[k] = (v[k] - center[k]) / extent;
            }
        }
    }
    Ok(out)
}

/// Axis-aligned box mesh, 12 triangles. Used for placeholders and fixtures.
pub fn box_mesh(center: [f64; 3], dims: [f64; 3]) -> TriMesh {
    let h = [dims[0] / 2.0, dims[1] / 2.0, dims[2] / 2.0];
    let mut vertices = Vec::with_capacity(8);
    for &sx in &[-1.0, 1.0] {
        for &sy in &[-1.0, 1.0] {
            for &sz in &[-1.0, 1.0] {
                vertices.push([
                    center[0] + sx * h[0],
                    center[1] + sy * h[1],
                    center[2] + sz * h[2],
                ]);
            }
        }
    }
    // Vertex index: (sx, sy, sz) -> 4*(sx>0) + 2*(sy>0) + (sz>0)
    let quads = [
        [0u32, 1, 3, 2], // -x
        [4, 6, 7, 5],    // +x
        [0, 4, 5, 1],    // -y
        [2, 3, 7, 6],    // +y
        [0, 2, 6, 4],    // -z
        [1, 5, 7, 3],    // +z
    ];
    let mut triangles = Vec::with_capacity(12);
    for q in quads {
        triangles.push([q[0], q[1], q[2]]);
        triangles.push([q[0], q[2], q[3]]);
    }
    TriMesh {
        vertices,
        triangles,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalize_cube() {
        let m = box_mesh([5.0, 5.0, 5.0], [2.0, 2.0, 2.0]);
        let n = normalize_mesh(&m).unwrap();
        let (lo, hi) = n.bounds();
        for k in 0..3 {
            assert!((lo[k] + 0.5).abs() < 1e-12);
            assert!((hi[k] - 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn normalize_aspect_preserved() {
        let m = box_mesh([1.0, -2.0, 3.0], [4.0, 1.0, 2.0]);
        let n = normalize_mesh(&m).unwrap();
        let (lo, hi) = n.bounds();
        let ext: Vec<f64> = (0..3).map(|k| hi[k] - lo[k]).collect();
        assert!((ext[0] - 1.0).abs() < 1e-12);
        assert!((ext[1] - 0.25).abs() < 1e-12);
        assert!((ext[2] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn normalize_idempotent_bit_exact() {
        let m = box_mesh([0.3, 0.7, -0.1], [1.3, 0.9, 2.1]);
        let once = normalize_mesh(&m).unwrap();
        let twice = normalize_mesh(&once).unwrap();
        assert_eq!(once, twice);
    }

    #[test]
    fn degenerate_rejected() {
        let m = TriMesh {
            vertices: alloc::vec![[1.0, 1.0, 1.0]; 3],
            triangles: alloc::vec![[0, 1, 2]],
        };
        assert_eq!(normalize_mesh(&m), Err(MeshError::Degenerate));
    }
}
