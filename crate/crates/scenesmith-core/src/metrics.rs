//! Point-cloud and image metrics: bidirectional L1 Chamfer distance (with a
//! uniform-grid nearest-neighbor index for large clouds), RMSE, and SSIM with
//! an 8x8 uniform window.

use alloc::vec;
use alloc::vec::Vec;

use crate::math;
use crate::vec::Vec3;

fn l1(a: [f64; 3], b: [f64; 3]) -> f64 {
    math::abs(a[0] - b[0]) + math::abs(a[1] - b[1]) + math::abs(a[2] - b[2])
}

/// O(n^2) reference path. The correctness gate for the indexed version.
pub fn chamfer_l1_brute(a: &[[f64; 3]], b: &[[f64; 3]]) -> f64 {
    assert!(!a.is_empty() && !b.is_empty());
    let dir = |from: &[[f64; 3]], to: &[[f64; 3]]| {
        let mut acc = 0.0;
        for p in from {
            let mut best = f64::INFINITY;
            for q in to {
                best = best.min(l1(*p, *q));
            }
            acc += best;
        }
        acc / from.len() as f64
    };
    dir(a, b) + dir(b, a)
}

struct GridIndex<'a> {
    points: &'a [[f64; 3]],
    cells: Vec<Vec<u32>>,
    origin: Vec3,
    cell: f64,
    dims: [usize; 3],
}

impl<'a> GridIndex<'a> {
    fn build(points: &'a [[f64; 3]]) -> Self {
        let mut lo = Vec3::new(f64::INFINITY, f64::INFINITY, f64::INFINITY);
        let mut hi = Vec3::new(f64::NEG_INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY);
        for p in points {
            lo.x = lo.x.min(p[0]);
            lo.y = lo.y.min(p[1]);
            lo.z = lo.z.min(p[2]);
            hi.x = hi.x.max(p[0]);
            hi.y = hi.y.max(p[1]);
            hi.z = hi.z.max(p[2]);
        }
        let extent = (hi.x - lo.x).max(hi.y - lo.y).max(hi.z - lo.z).max(1e-12);
        // Aim for a few points per cell.
        let target = math::cbrt(points.len() as f64 / 2.0).max(1.0) as usize;
        let cell = extent / target as f64;
        let dim = |l: f64, h: f64| ((h - l) / cell) as usize + 1;
        let dims = [dim(lo.x, hi.x), dim(lo.y, hi.y), dim(lo.z, hi.z)];
        let mut cells = vec![Vec::new(); dims[0] * dims[1] * dims[2]];
        for (i, p) in points.iter().enumerate() {
            let c = Self::cell_of_raw(*p, lo, cell, dims);
            cells[c].push(i as u32);
        }
        GridIndex {
            points,
            cells,
            origin: lo,
            cell,
            dims,
        }
    }

    fn cell_of_raw(p: [f64; 3], origin: Vec3, cell: f64, dims: [usize; 3]) -> usize {
        let ix = (((p[0] - origin.x) / cell) as usize).min(dims[0] - 1);
        let iy = (((p[1] - origin.y) / cell) as usize).min(dims[1] - 1);
        let iz = (((p[2] - origin.z) / cell) as usize).min(dims[2] - 1);
        (ix * dims[1] + iy) * dims[2] + iz
    }

    fn coords_of(&self, p: [f64; 3]) -> [i64; 3] {
        [
            (((p[0] - self.origin.x) / self.cell) as i64).clamp(0, self.dims[0] as i64 - 1),
            (((p[1] - self.origin.y) / self.cell) as i64).clamp(0, self.dims[1] as i64 - 1),
            (((p[2] - self.origin.z) / self.cell) as i64).clamp(0, self.dims[2] as i64 - 1),
        ]
    }

    /// Minimal L1 distance from `p` to the box of cell (ix, iy, iz).
    fn cell_min_l1(&self, p: [f64; 3], c: [i64; 3]) -> f64 {
        let mut d = 0.0;
        for k in 0..3 {
            let o = match k {
                0 => self.origin.x,
                1 => self.origin.y,
                _ => self.origin.z,
            };
            let lo = o + c[k] as f64 * self.cell;
            let hi = lo + self.cell;
            if p[k] < lo {
                d += lo - p[k];
            } else if p[k] > hi {
                d += p[k] - hi;
            }
        }
        d
    }

    fn nearest_l1(&self, p: [f64; 3]) -> f64 {
        let home = self.coords_of(p);
        let mut best = f64::INFINITY;
        let max_ring = *self.dims.iter().max().unwrap() as i64;
        for r in 0..=max_ring {
            // Once every cell in this ring is farther than the best hit, stop.
            if best.is_finite() && (r - 1) as f64 * self.cell > best {
                break;
            }
            for dx in -r..=r {
                for dy in -r..=r {
                    for dz in -r..=r {
                        if dx.abs().max(dy.abs()).max(dz.abs()) != r {
                            continue;
                        }
                        let c = [home[0] + dx, home[1] + dy, home[2] + dz];
                        if c[0] < 0
                            || c[1] < 0
                            || c[2] < 0
                            || c[0] >= self.dims[0] as i64
                            || c[1] >= self.dims[1] as i64
                            || c[2] >= self.dims[2] as i64
                        {
                            continue;
                        }
                        if self.cell_min_l1(p, c) > best {
                            continue;
                        }
                        let idx = (c[0] as usize * self.dims[1] + c[1] as usize) * self.dims[2]
                            + c[2] as usize;
                        for &pi in &self.cells[idx] {
                            best = best.min(l1(p, self.points[pi as usize]));
                        }
                    }
                }
            }
        }
        best
    }
}

/// Bidirectional L1 Chamfer distance:
/// mean over A of the nearest L1 distance into B, plus the reverse term.
pub fn chamfer_l1(a: &[[f64; 3]], b: &[[f64; 3]]) -> f64 {
    assert!(!a.is_empty() && !b.is_empty());
    if a.len() * b.len() <= 64 * 64 {
        return chamfer_l1_brute(a, b);
    }
    let ib = GridIndex::build(b);
    let ia = GridIndex::build(a);
    let mut acc_a = 0.0;
    for p in a {
        acc_a += ib.nearest_l1(*p);
    }
    let mut acc_b = 0.0;
    for q in b {
        acc_b += ia.nearest_l1(*q);
    }
    acc_a / a.len() as f64 + acc_b / b.len() as f64
}

/// Per-pixel RMSE over [0, 1]-normalized samples.
pub fn rmse(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    assert!(!a.is_empty());
    let mut acc = 0.0;
    for (x, y) in a.iter().zip(b.iter()) {
        let d = x - y;
        acc += d * d;
    }
    math::sqrt(acc / a.len() as f64)
}

pub const SSIM_WINDOW: usize = 8;
const SSIM_C1: f64 = 0.01 * 0.01; // (0.01 L)^2, L = 1
const SSIM_C2: f64 = 0.03 * 0.03;

/// Mean SSIM over all 8x8 windows at stride 1. Inputs are [0, 1] grayscale,
/// row-major. Images smaller than the window use a single full-image window.
pub fn ssim(a: &[f64], b: &[f64], w: usize, h: usize) -> f64 {
    assert_eq!(a.len(), w * h);
    assert_eq!(b.len(), w * h);
    let ww = SSIM_WINDOW.min(w);
    let wh = SSIM_WINDOW.min(h);
    let mut acc = 0.0;
    let mut count = 0usize;
    for y0 in 0..=(h - wh) {
        for x0 in 0..=(w - ww) {
            acc += ssim_window(a, b, w, x0, y0, ww, wh);
            count += 1;
        }
    }
    acc / count as f64
}

fn ssim_window(a: &[f64], b: &[f64], stride: usize, x0: usize, y0: usize, ww: usize, wh: usize) -> f64 {
    let n = (ww * wh) as f64;
    let (mut ma, mut mb) = (0.0, 0.0);
    for y in y0..y0 + wh {
        for x in x0..x0 + ww {
            ma += a[y * stride + x];
            mb += b[y * stride + x];
        }
    }
    ma /= n;
    mb /= n;
    let (mut va, mut vb, mut cov) = (0.0, 0.0, 0.0);
    for y in y0..y0 + wh {
        for x in x0..x0 + ww {
            let da = a[y * stride + x] - ma;
            let db = b[y * stride + x] - mb;
            va += da * da;
            vb += db * db;
            cov += da * db;
        }
    }
    va /= n;
    vb /= n;
    cov /= n;
    ((2.0 * ma * mb + SSIM_C1) * (2.0 * cov + SSIM_C2))
        / ((ma * ma + mb * mb + SSIM_C1) * (va + vb + SSIM_C2))
}
