//! Oriented rectangles in the plan view: corner generation, separating-axis
//! overlap tests, and minimal translation vectors for collision resolution.

use crate::math;
use crate::vec::{Vec2, Vec3};

/// 2D oriented rectangle. `half.x` spans the local X (width) axis, `half.y`
/// the local Y axis; local +Y rotated by `yaw` is the facing direction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect2 {
    pub center: Vec2,
    pub half: Vec2,
    pub yaw: f64,
}

/// Minimal translation vector: moving the first rectangle by `axis * depth`
/// separates the pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mtv {
    pub axis: Vec2,
    pub depth: f64,
}

impl Mtv {
    pub fn vector(&self) -> Vec2 {
        self.axis * self.depth
    }
}

impl Rect2 {
    pub fn new(center: Vec2, half: Vec2, yaw: f64) -> Self {
        Rect2 { center, half, yaw }
    }

    /// Local X axis in world coordinates.
    pub fn axis_x(&self) -> Vec2 {
        Vec2::new(math::cos(self.yaw), math::sin(self.yaw))
    }

    /// Local Y axis (facing direction) in world coordinates.
    pub fn axis_y(&self) -> Vec2 {
        Vec2::new(-math::sin(self.yaw), math::cos(self.yaw))
    }

    /// Corners in CCW order starting at local (+x, +y).
    pub fn corners(&self) -> [Vec2; 4] {
        let ax = self.axis_x() * self.half.x;
        let ay = self.axis_y() * self.half.y;
        [
            self.center + ax + ay,
            self.center + (-ax) + ay,
            self.center + (-ax) + (-ay),
            self.center + ax + (-ay),
        ]
    }

    pub fn area(&self) -> f64 {
        4.0 * self.half.x * self.half.y
    }

    pub fn contains(&self, p: Vec2) -> bool {
        let d = p - self.center;
        math::abs(d.dot(self.axis_x())) <= self.half.x + 1e-12
            && math::abs(d.dot(self.axis_y())) <= self.half.y + 1e-12
    }

    fn project(&self, axis: Vec2) -> (f64, f64) {
        let c = self.center.dot(axis);
        let r = self.half.x * math::abs(self.axis_x().dot(axis))
            + self.half.y * math::abs(self.axis_y().dot(axis));
        (c - r, c + r)
    }

    /// SAT overlap test. Returns the MTV that pushes `self` away from
    /// `other`, or `None` when a separating axis exists. Touching rectangles
    /// (overlap below `eps`) count as separated.
    pub fn overlap(&self, other: &Rect2, eps: f64) -> Option<Mtv> {
        let axes = [
            self.axis_x(),
            self.axis_y(),
            other.axis_x(),
            other.axis_y(),
        ];
        let mut best: Option<Mtv> = None;
        for axis in axes {
            let (amin, amax) = self.project(axis);
            let (bmin, bmax) = other.project(axis);
            // Distance to separate by pushing self toward +axis / -axis.
            // Handles interval containment, unlike the plain interval overlap.
            let push_pos = bmax - amin;
            let push_neg = amax - bmin;
            let depth = push_pos.min(push_neg);
            if depth <= eps {
                return None;
            }
            if best.is_none_or(|m| depth < m.depth) {
                let dir = if push_pos <= push_neg { axis } else { -axis };
                best = Some(Mtv { axis: dir, depth });
            }
        }
        best
    }

    pub fn translated(&self, d: Vec2) -> Rect2 {
        Rect2::new(self.center + d, self.half, self.yaw)
    }

    /// Axis-aligned bounds of the rectangle.
    pub fn aabb(&self) -> (Vec2, Vec2) {
        let cs = self.corners();
        let mut lo = cs[0];
        let mut hi = cs[0];
        for c in &cs[1..] {
            lo.x = lo.x.min(c.x);
            lo.y = lo.y.min(c.y);
            hi.x = hi.x.max(c.x);
            hi.y = hi.y.max(c.y);
        }
        (lo, hi)
    }
}

/// Eight corners of a 3D yaw-oriented box with dims (w, h, l): w along local
/// X, l along local Y (facing), h along Z. Mean of the corners is the center.
pub fn box_corners(center: Vec3, dims: Vec3, yaw: f64) -> [Vec3; 8] {
    let (hw, hh, hl) = (dims.x / 2.0, dims.y / 2.0, dims.z / 2.0);
    let ax = Vec2::new(math::cos(yaw), math::sin(yaw));
    let ay = Vec2::new(-math::sin(yaw), math::cos(yaw));
    let mut out = [Vec3::ZERO; 8];
    let mut i = 0;
    for &sx in &[1.0, -1.0] {
        for &sy in &[1.0, -1.0] {
            for &sz in &[1.0, -1.0] {
                let xy = ax * (sx * hw) + ay * (sy * hl);
                out[i] = Vec3::new(center.x + xy.x, center.y + xy.y, center.z + sz * hh);
                i += 1;
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Xoshiro256StarStar;

    fn approx(a: f64, b: f64, tol: f64) -> bool {
        math::abs(a - b) <= tol
    }

    #[test]
    fn unit_box_corners_axis_aligned() {
        let cs = box_corners(Vec3::ZERO, Vec3::new(1.0, 1.0, 1.0), 0.0);
        for c in cs {
            assert!(approx(math::abs(c.x), 0.5, 1e-12));
            assert!(approx(math::abs(c.y), 0.5, 1e-12));
            assert!(approx(math::abs(c.z), 0.5, 1e-12));
        }
    }

    #[test]
    fn corners_mean_is_center() {
        let c = Vec3::new(1.0, 0.0, 0.0);
        let cs = box_corners(c, Vec3::new(2.0, 1.0, 4.0), core::f64::consts::FRAC_PI_4);
        let mut mean = Vec3::ZERO;
        for p in cs {
            mean = mean + p;
        }
        mean = mean * (1.0 / 8.0);
        assert!((mean - c).norm() < 1e-9);
    }

    #[test]
    fn yaw_quarter_turn_square_symmetry() {
        let a = box_corners(Vec3::ZERO, Vec3::new(1.0, 1.0, 1.0), 0.0);
        let b = box_corners(
            Vec3::ZERO,
            Vec3::new(1.0, 1.0, 1.0),
            core::f64::consts::FRAC_PI_2,
        );
        // Same corner set, possibly reordered.
        for p in b {
            assert!(a
                .iter()
                .any(|q| (*q - p).norm() < 1e-9));
        }
    }

    #[test]
    fn rotated_box_corner_distances() {
        // dims (2,1,4), yaw pi/4 at (1,0,0): pairwise distances must match the
        // axis-aligned box (rotation is an isometry).
        let a = box_corners(Vec3::new(1.0, 0.0, 0.0), Vec3::new(2.0, 1.0, 4.0), 0.0);
        let b = box_corners(
            Vec3::new(1.0, 0.0, 0.0),
            Vec3::new(2.0, 1.0, 4.0),
            core::f64::consts::FRAC_PI_4,
        );
        let mut da: alloc::vec::Vec<f64> = alloc::vec::Vec::new();
        let mut db: alloc::vec::Vec<f64> = alloc::vec::Vec::new();
        for i in 0..8 {
            for j in (i + 1)..8 {
                da.push((a[i] - a[j]).norm());
                db.push((b[i] - b[j]).norm());
            }
        }
        da.sort_by(|x, y| x.partial_cmp(y).unwrap());
        db.sort_by(|x, y| x.partial_cmp(y).unwrap());
        for (x, y) in da.iter().zip(db.iter()) {
            assert!(approx(*x, *y, 1e-9));
        }
    }

    #[test]
    fn sat_axis_aligned_overlap() {
        let a = Rect2::new(Vec2::ZERO, Vec2::new(0.5, 0.5), 0.0);
        let b = Rect2::new(Vec2::new(0.8, 0.0), Vec2::new(0.5, 0.5), 0.0);
        let mtv = a.overlap(&b, 0.0).unwrap();
        assert!(approx(mtv.depth, 0.2, 1e-12));
        assert!(approx(mtv.axis.x, -1.0, 1e-12));
        // Moving by the MTV separates.
        assert!(a.translated(mtv.vector()).overlap(&b, 1e-9).is_none());
    }

    #[test]
    fn sat_separated() {
        let a = Rect2::new(Vec2::ZERO, Vec2::new(0.5, 0.5), 0.3);
        let b = Rect2::new(Vec2::new(3.0, 0.0), Vec2::new(0.5, 0.5), 1.1);
        assert!(a.overlap(&b, 0.0).is_none());
    }

    /// Brute-force oracle: rasterize the joint AABB and check whether any
    /// sample point lies inside both rectangles.
    fn raster_overlap(a: &Rect2, b: &Rect2, step: f64) -> bool {
        let (alo, ahi) = a.aabb();
        let (blo, bhi) = b.aabb();
        let lo = Vec2::new(alo.x.max(blo.x), alo.y.max(blo.y));
        let hi = Vec2::new(ahi.x.min(bhi.x), ahi.y.min(bhi.y));
        if lo.x > hi.x || lo.y > hi.y {
            return false;
        }
        let mut y = lo.y + step / 2.0;
        while y < hi.y {
            let mut x = lo.x + step / 2.0;
            while x < hi.x {
                let p = Vec2::new(x, y);
                if a.contains(p) && b.contains(p) {
                    return true;
                }
                x += step;
            }
            y += step;
        }
        false
    }

    #[test]
    fn sat_matches_raster_oracle() {
        let mut rng = Xoshiro256StarStar::seed_from_u64(99);
        let mut checked = 0;
        while checked < 500 {
            let a = Rect2::new(
                Vec2::new(rng.f64_in(-0.3, 0.3), rng.f64_in(-0.3, 0.3)),
                Vec2::new(rng.f64_in(0.05, 0.2), rng.f64_in(0.05, 0.2)),
                rng.f64_in(-3.0, 3.0),
            );
            let b = Rect2::new(
                Vec2::new(rng.f64_in(-0.3, 0.3), rng.f64_in(-0.3, 0.3)),
                Vec2::new(rng.f64_in(0.05, 0.2), rng.f64_in(0.05, 0.2)),
                rng.f64_in(-3.0, 3.0),
            );
            // Skip contact depths below the raster resolution.
            if let Some(m) = a.overlap(&b, 0.0) {
                if m.depth < 0.004 {
                    continue;
                }
            }
            let sat = a.overlap(&b, 0.0).is_some();
            assert_eq!(sat, raster_overlap(&a, &b, 0.001));
            checked += 1;
        }
    }

    #[test]
    fn mtv_is_minimal() {
        let mut rng = Xoshiro256StarStar::seed_from_u64(17);
        let mut found = 0;
        while found < 200 {
            let a = Rect2::new(
                Vec2::new(rng.f64_in(-0.5, 0.5), rng.f64_in(-0.5, 0.5)),
                Vec2::new(rng.f64_in(0.1, 0.5), rng.f64_in(0.1, 0.5)),
                rng.f64_in(-3.0, 3.0),
            );
            let b = Rect2::new(
                Vec2::new(rng.f64_in(-0.5, 0.5), rng.f64_in(-0.5, 0.5)),
                Vec2::new(rng.f64_in(0.1, 0.5), rng.f64_in(0.1, 0.5)),
                rng.f64_in(-3.0, 3.0),
            );
            if let Some(m) = a.overlap(&b, 1e-6) {
                assert!(a.translated(m.vector()).overlap(&b, 1e-9).is_none());
                let short = m.vector() * (1.0 - 1e-3);
                assert!(a.translated(short).overlap(&b, 0.0).is_some());
                found += 1;
            }
        }
    }
}
