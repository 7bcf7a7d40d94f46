//! Area-proportional uniform surface sampling of triangle meshes.

use alloc::vec::Vec;

use crate::math;
use crate::mesh::TriMesh;
use crate::rng::Xoshiro256StarStar;

/// Sample `n` points uniformly over the surface: triangles chosen by
/// cumulative-area inversion, positions by the square-root barycentric map.
/// Fully determined by `seed`.
pub fn sample_surface(mesh: &TriMesh, n: usize, seed: u64) -> Vec<[f64; 3]> {
    let tri_count = mesh.triangles.len();
    assert!(tri_count > 0);
    let mut cum = Vec::with_capacity(tri_count);
    let mut total = 0.0;
    for i in 0..tri_count {
        total += mesh.triangle_area(i);
        cum.push(total);
    }
    assert!(total > 0.0, "mesh has zero surface area");
    let mut rng = Xoshiro256StarStar::seed_from_u64(seed);
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        let u = rng.next_f64() * total;
        let ti = match cum.binary_search_by(|c| c.partial_cmp(&u).unwrap()) {
            Ok(i) => (i + 1).min(tri_count - 1),
            Err(i) => i.min(tri_count - 1),
        };
        let [a, b, c] = mesh.triangle(ti);
        let r1 = math::sqrt(rng.next_f64());
        let r2 = rng.next_f64();
        let p = a * (1.0 - r1) + b * (r1 * (1.0 - r2)) + c * (r1 * r2);
        out.push(p.to_array());
    }
    out
}

/// Index of the triangle each sampled point would come from, for count
/// statistics. Same draw sequence as `sample_surface`.
pub fn sample_triangle_indices(mesh: &TriMesh, n: usize, seed: u64) -> Vec<usize> {
    let tri_count = mesh.triangles.len();
    let mut cum = Vec::with_capacity(tri_count);
    let mut total = 0.0;
    for i in 0..tri_count {
        total += mesh.triangle_area(i);
        cum.push(total);
    }
    let mut rng = Xoshiro256StarStar::seed_from_u64(seed);
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        let u = rng.next_f64() * total;
        let ti = match cum.binary_search_by(|c| c.partial_cmp(&u).unwrap()) {
            Ok(i) => (i + 1).min(tri_count - 1),
            Err(i) => i.min(tri_count - 1),
        };
        out.push(ti);
        rng.next_f64();
        rng.next_f64();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vec::Vec3;
    use alloc::vec;

    fn single_triangle() -> TriMesh {
        TriMesh {
            vertices: vec![[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]],
            triangles: vec![[0, 1, 2]],
        }
    }

    #[test]
    fn points_inside_triangle() {
        let m = single_triangle();
        let pts = sample_surface(&m, 1000, 42);
        for p in pts {
            // Barycentric check for the right triangle (0,0)-(1,0)-(0,1).
            assert!(p[0] >= -1e-12 && p[1] >= -1e-12 && p[0] + p[1] <= 1.0 + 1e-12);
            assert_eq!(p[2], 0.0);
        }
    }

    #[test]
    fn deterministic() {
        let m = single_triangle();
        assert_eq!(sample_surface(&m, 500, 7), sample_surface(&m, 500, 7));
        assert_ne!(sample_surface(&m, 500, 7), sample_surface(&m, 500, 8));
    }

    #[test]
    fn area_proportional_counts() {
        // Two triangles with 3:1 area ratio.
        let m = TriMesh {
            vertices: vec![
                [0.0, 0.0, 0.0],
                [3.0, 0.0, 0.0],
                [0.0, 2.0, 0.0],
                [10.0, 0.0, 0.0],
                [11.0, 0.0, 0.0],
                [10.0, 2.0, 0.0],
            ],
            triangles: vec![[0, 1, 2], [3, 4, 5]],
        };
        assert!((m.triangle_area(0) - 3.0).abs() < 1e-12);
        assert!((m.triangle_area(1) - 1.0).abs() < 1e-12);
        let idx = sample_triangle_indices(&m, 10_000, 123);
        let big = idx.iter().filter(|&&i| i == 0).count();
        // Binomial(10000, 0.75): 99.9% interval is roughly +/- 3.29 sigma.
        let sigma = (10_000.0f64 * 0.75 * 0.25).sqrt();
        assert!((big as f64 - 7500.0).abs() < 3.29 * sigma, "count {big}");
    }

    #[test]
    fn indices_agree_with_points() {
        let m = TriMesh {
            vertices: vec![
                [0.0, 0.0, 0.0],
                [1.0, 0.0, 0.0],
                [0.0, 1.0, 0.0],
                [0.0, 0.0, 5.0],
                [1.0, 0.0, 5.0],
                [0.0, 1.0, 5.0],
            ],
            triangles: vec![[0, 1, 2], [3, 4, 5]],
        };
        let pts = sample_surface(&m, 200, 9);
        let idx = sample_triangle_indices(&m, 200, 9);
        for (p, i) in pts.iter().zip(idx.iter()) {
            let z = Vec3::from_array(*p).z;
            assert_eq!(*i == 1, z > 2.5);
        }
    }
}
