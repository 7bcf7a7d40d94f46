//! Simple planar polygons: area, orientation, simplicity, inclusive
//! point-in-polygon, and edge translation with loop re-closure.

use alloc::vec::Vec;

use crate::math;
use crate::vec::Vec2;

#[derive(Debug, Clone, PartialEq)]
pub struct Polygon {
    pub vertices: Vec<Vec2>,
}

impl Polygon {
    pub fn new(vertices: Vec<Vec2>) -> Self {
        Polygon { vertices }
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn edge(&self, i: usize) -> (Vec2, Vec2) {
        let n = self.vertices.len();
        (self.vertices[i], self.vertices[(i + 1) % n])
    }

    /// Shoelace signed area; positive for CCW.
    pub fn signed_area(&self) -> f64 {
        let n = self.vertices.len();
        let mut acc = 0.0;
        for i in 0..n {
            let (a, b) = self.edge(i);
            acc += a.cross(b);
        }
        acc / 2.0
    }

    pub fn area(&self) -> f64 {
        math::abs(self.signed_area())
    }

    pub fn is_ccw(&self) -> bool {
        self.signed_area() > 0.0
    }

    pub fn reversed(&self) -> Polygon {
        let mut v = self.vertices.clone();
        v.reverse();
        Polygon::new(v)
    }

    /// No two non-adjacent edges intersect and no vertex repeats.
    pub fn is_simple(&self) -> bool {
        let n = self.vertices.len();
        if n < 3 {
            return false;
        }
        for i in 0..n {
            for j in 0..n {
                if (self.vertices[i] - self.vertices[j]).norm() < 1e-12 && i != j {
                    return false;
                }
            }
        }
        for i in 0..n {
            for j in (i + 1)..n {
                // Adjacent edges share a vertex; skip them.
                if j == i || (j + 1) % n == i || (i + 1) % n == j {
                    continue;
                }
                let (a, b) = self.edge(i);
                let (c, d) = self.edge(j);
                if segments_intersect(a, b, c, d) {
                    return false;
                }
            }
        }
        true
    }

    /// Inclusive point-in-polygon: boundary points count as inside.
    pub fn contains(&self, p: Vec2) -> bool {
        let n = self.vertices.len();
        for i in 0..n {
            let (a, b) = self.edge(i);
            if point_on_segment(p, a, b, 1e-9) {
                return true;
            }
        }
        // Crossing-number test.
        let mut inside = false;
        for i in 0..n {
            let (a, b) = self.edge(i);
            if (a.y > p.y) != (b.y > p.y) {
                let x = a.x + (p.y - a.y) / (b.y - a.y) * (b.x - a.x);
                if p.x < x {
                    inside = !inside;
                }
            }
        }
        inside
    }

    /// Signed distance of a point to the polygon boundary (nearest edge).
    pub fn boundary_distance(&self, p: Vec2) -> f64 {
        let mut best = f64::INFINITY;
        for i in 0..self.vertices.len() {
            let (a, b) = self.edge(i);
            best = best.min(point_segment_distance(p, a, b));
        }
        best
    }

    /// Index of the edge nearest to the point.
    pub fn nearest_edge(&self, p: Vec2) -> usize {
        let mut best = 0;
        let mut best_d = f64::INFINITY;
        for i in 0..self.vertices.len() {
            let (a, b) = self.edge(i);
            let d = point_segment_distance(p, a, b);
            if d < best_d {
                best_d = d;
                best = i;
            }
        }
        best
    }

    /// Translate edge `i` by `offset` and re-close the loop by intersecting
    /// the shifted edge line with its neighbor edge lines. Falls back to
    /// translating the edge endpoints directly when a neighbor is parallel.
    pub fn translate_edge(&self, i: usize, offset: Vec2) -> Polygon {
        let n = self.vertices.len();
        let (a, b) = self.edge(i);
        let (a2, b2) = (a + offset, b + offset);
        let prev = self.vertices[(i + n - 1) % n];
        let next = self.vertices[(i + 2) % n];
        let new_a = line_intersection(prev, a, a2, b2).unwrap_or(a2);
        let new_b = line_intersection(a2, b2, b, next).unwrap_or(b2);
        let mut v = self.vertices.clone();
        v[i] = new_a;
        v[(i + 1) % n] = new_b;
        Polygon::new(v)
    }
}

/// Proper or touching intersection of two closed segments.
pub fn segments_intersect(a: Vec2, b: Vec2, c: Vec2, d: Vec2) -> bool {
    let d1 = (b - a).cross(c - a);
    let d2 = (b - a).cross(d - a);
    let d3 = (d - c).cross(a - c);
    let d4 = (d - c).cross(b - c);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
    {
        return true;
    }
    let eps = 1e-12;
    (math::abs(d1) < eps && on_box(c, a, b))
        || (math::abs(d2) < eps && on_box(d, a, b))
        || (math::abs(d3) < eps && on_box(a, c, d))
        || (math::abs(d4) < eps && on_box(b, c, d))
}

fn on_box(p: Vec2, a: Vec2, b: Vec2) -> bool {
    p.x >= a.x.min(b.x) - 1e-12
        && p.x <= a.x.max(b.x) + 1e-12
        && p.y >= a.y.min(b.y) - 1e-12
        && p.y <= a.y.max(b.y) + 1e-12
}

pub fn point_on_segment(p: Vec2, a: Vec2, b: Vec2, tol: f64) -> bool {
    point_segment_distance(p, a, b) <= tol
}

pub fn point_segment_distance(p: Vec2, a: Vec2, b: Vec2) -> f64 {
    let ab = b - a;
    let len2 = ab.dot(ab);
    if len2 == 0.0 {
        return (p - a).norm();
    }
    let t = ((p - a).dot(ab) / len2).clamp(0.0, 1.0);
    (p - (a + ab * t)).norm()
}

/// Closest point on segment [a, b] to p.
pub fn project_onto_segment(p: Vec2, a: Vec2, b: Vec2) -> Vec2 {
    let ab = b - a;
    let len2 = ab.dot(ab);
    if len2 == 0.0 {
        return a;
    }
    let t = ((p - a).dot(ab) / len2).clamp(0.0, 1.0);
    a + ab * t
}

/// Intersection of the infinite lines through (a,b) and (c,d).
pub fn line_intersection(a: Vec2, b: Vec2, c: Vec2, d: Vec2) -> Option<Vec2> {
    let r = b - a;
    let s = d - c;
    let denom = r.cross(s);
    if math::abs(denom) < 1e-12 {
        return None;
    }
    let t = (c - a).cross(s) / denom;
    Some(a + r * t)
}
