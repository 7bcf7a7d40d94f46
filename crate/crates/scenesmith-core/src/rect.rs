//! Largest axis-aligned all-true rectangle in a binary mask, via the
//! row-histogram stack method.

use alloc::vec;
use alloc::vec::Vec;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MaskRect {
    pub x: usize,
    pub y: usize,
    pub w: usize,
    pub h: usize,
}

impl MaskRect {
    pub fn area(&self) -> usize {
        self.w * self.h
    }
}

/// `mask` is row-major, `w * h` entries. Returns `None` for an all-false mask.
pub fn largest_rectangle(mask: &[bool], w: usize, h: usize) -> Option<MaskRect> {
    assert_eq!(mask.len(), w * h);
    if w == 0 || h == 0 {
        return None;
    }
    let mut heights = vec![0usize; w];
    let mut best: Option<MaskRect> = None;
    for row in 0..h {
        for col in 0..w {
            heights[col] = if mask[row * w + col] {
                heights[col] + 1
            } else {
                0
            };
        }
        // Largest rectangle in histogram. Sentinel column of height 0 flushes
        // the stack at the end.
        let mut stack: Vec<(usize, usize)> = Vec::new(); // (start col, height)
        #[allow(clippy::needless_range_loop)] // sentinel col == w has no entry
        for col in 0..=w {
            let hcur = if col < w { heights[col] } else { 0 };
            let mut start = col;
            while let Some(&(s, ht)) = stack.last() {
                if ht <= hcur {
                    break;
                }
                stack.pop();
                let cand = MaskRect {
                    x: s,
                    y: row + 1 - ht,
                    w: col - s,
                    h: ht,
                };
                if cand.area() > 0 && best.is_none_or(|b| cand.area() > b.area()) {
                    best = Some(cand);
                }
                start = s;
            }
            if hcur > 0 && stack.last().is_none_or(|&(_, ht)| ht < hcur) {
                stack.push((start, hcur));
            }
        }
    }
    best.filter(|b| b.area() > 0)
}

/// Exhaustive oracle: tries every (x, y, w, h); O(w^2 h^2 · wh). Test-sized
/// masks only.
pub fn largest_rectangle_brute(mask: &[bool], w: usize, h: usize) -> usize {
    let mut best = 0;
    for y in 0..h {
        for x in 0..w {
            'grow: for hh in 1..=(h - y) {
                for ww in 1..=(w - x) {
                    let mut all = true;
                    for yy in y..y + hh {
                        for xx in x..x + ww {
                            if !mask[yy * w + xx] {
                                all = false;
                                break;
                            }
                        }
                        if !all {
                            break;
                        }
                    }
                    if all {
                        best = best.max(ww * hh);
                    } else if ww == 1 {
                        break 'grow;
                    } else {
                        break;
                    }
                }
            }
        }
    }
    best
}
