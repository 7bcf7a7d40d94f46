//! sRGB <-> CIE LAB conversion (D65 illuminant, 2 degree observer) and the
//! mean-shift recoloring that moves an albedo's mean LAB color onto a target
//! while keeping per-pixel detail.

use alloc::vec::Vec;

use crate::math;

const XN: f64 = 0.95047;
const YN: f64 = 1.0;
const ZN: f64 = 1.08883;

pub const LAB_L_RANGE: (f64, f64) = (0.0, 100.0);
pub const LAB_AB_RANGE: (f64, f64) = (-128.0, 127.0);

fn srgb_to_linear(c: f64) -> f64 {
    if c <= 0.04045 {
        c / 12.92
    } else {
        math::powf((c + 0.055) / 1.055, 2.4)
    }
}

fn linear_to_srgb(c: f64) -> f64 {
    if c <= 0.0031308 {
        12.92 * c
    } else {
        1.055 * math::powf(c, 1.0 / 2.4) - 0.055
    }
}

fn lab_f(t: f64) -> f64 {
    const DELTA3: f64 = 216.0 / 24389.0; // (6/29)^3
    if t > DELTA3 {
        math::cbrt(t)
    } else {
        t * (841.0 / 108.0) + 4.0 / 29.0 // t / (3 (6/29)^2) + 4/29
    }
}

fn lab_f_inv(t: f64) -> f64 {
    const DELTA: f64 = 6.0 / 29.0;
    if t > DELTA {
        t * t * t
    } else {
        (t - 4.0 / 29.0) * (108.0 / 841.0)
    }
}

/// sRGB in [0, 1] per channel to LAB.
pub fn srgb_to_lab(rgb: [f64; 3]) -> [f64; 3] {
    let r = srgb_to_linear(rgb[0]);
    let g = srgb_to_linear(rgb[1]);
    let b = srgb_to_linear(rgb[2]);
    let x = 0.4124564 * r + 0.3575761 * g + 0.1804375 * b;
    let y = 0.2126729 * r + 0.7151522 * g + 0.0721750 * b;
    let z = 0.0193339 * r + 0.1191920 * g + 0.9503041 * b;
    let fx = lab_f(x / XN);
    let fy = lab_f(y / YN);
    let fz = lab_f(z / ZN);
    [116.0 * fy - 16.0, 500.0 * (fx - fy), 200.0 * (fy - fz)]
}

pub fn lab_to_srgb(lab: [f64; 3]) -> [f64; 3] {
    let fy = (lab[0] + 16.0) / 116.0;
    let fx = fy + lab[1] / 500.0;
    let fz = fy - lab[2] / 200.0;
    let x = XN * lab_f_inv(fx);
    let y = YN * lab_f_inv(fy);
    let z = ZN * lab_f_inv(fz);
    let r = 3.2404542 * x - 1.5371385 * y - 0.4985314 * z;
    let g = -0.9692660 * x + 1.8760108 * y + 0.0415560 * z;
    let b = 0.0556434 * x - 0.2040259 * y + 1.0572252 * z;
    [
        linear_to_srgb(r).clamp(0.0, 1.0),
        linear_to_srgb(g).clamp(0.0, 1.0),
        linear_to_srgb(b).clamp(0.0, 1.0),
    ]
}

pub fn srgb8_to_lab(rgb: [u8; 3]) -> [f64; 3] {
    srgb_to_lab([
        rgb[0] as f64 / 255.0,
        rgb[1] as f64 / 255.0,
        rgb[2] as f64 / 255.0,
    ])
}

pub fn lab_to_srgb8(lab: [f64; 3]) -> [u8; 3] {
    let rgb = lab_to_srgb(lab);
    [
        math::round(rgb[0] * 255.0) as u8,
        math::round(rgb[1] * 255.0) as u8,
        math::round(rgb[2] * 255.0) as u8,
    ]
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShiftStats {
    pub mean_before: [f64; 3],
    pub delta: [f64; 3],
    pub clamped_fraction: f64,
}

pub fn lab_mean(pixels: &[[f64; 3]]) -> [f64; 3] {
    let n = pixels.len() as f64;
    let mut m = [0.0; 3];
    for p in pixels {
        for c in 0..3 {
            m[c] += p[c];
        }
    }
    for c in &mut m {
        *c /= n;
    }
    m
}

/// Shift every pixel by (target - mean), then clamp to LAB bounds. The
/// unclamped result has mean exactly `target`; the returned stats report how
/// many pixels the clamp touched.
pub fn shift_to_target(pixels: &[[f64; 3]], target: [f64; 3]) -> (Vec<[f64; 3]>, ShiftStats) {
    assert!(!pixels.is_empty());
    let mean = lab_mean(pixels);
    let delta = [target[0] - mean[0], target[1] - mean[1], target[2] - mean[2]];
    let mut clamped = 0usize;
    let out: Vec<[f64; 3]> = pixels
        .iter()
        .map(|p| {
            let raw = [p[0] + delta[0], p[1] + delta[1], p[2] + delta[2]];
            let clamped_px = [
                raw[0].clamp(LAB_L_RANGE.0, LAB_L_RANGE.1),
                raw[1].clamp(LAB_AB_RANGE.0, LAB_AB_RANGE.1),
                raw[2].clamp(LAB_AB_RANGE.0, LAB_AB_RANGE.1),
            ];
            if clamped_px != raw {
                clamped += 1;
            }
            clamped_px
        })
        .collect();
    let stats = ShiftStats {
        mean_before: mean,
        delta,
        clamped_fraction: clamped as f64 / pixels.len() as f64,
    };
    (out, stats)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Xoshiro256StarStar;
    use alloc::vec;

    #[test]
    fn red_reference_value() {
        let lab = srgb8_to_lab([255, 0, 0]);
        assert!((lab[0] - 53.24).abs() < 0.01, "{lab:?}");
        assert!((lab[1] - 80.09).abs() < 0.01);
        assert!((lab[2] - 67.20).abs() < 0.01);
    }

    #[test]
    fn white_and_black() {
        let w = srgb8_to_lab([255, 255, 255]);
        assert!((w[0] - 100.0).abs() < 1e-3);
        assert!(w[1].abs() < 1e-2 && w[2].abs() < 1e-2);
        let b = srgb8_to_lab([0, 0, 0]);
        assert!(b[0].abs() < 1e-9);
    }

    #[test]
    fn round_trip_8bit() {
        let mut rng = Xoshiro256StarStar::seed_from_u64(11);
        for _ in 0..10_000 {
            let rgb = [
                (rng.next_u64() % 256) as u8,
                (rng.next_u64() % 256) as u8,
                (rng.next_u64() % 256) as u8,
            ];
            let back = lab_to_srgb8(srgb8_to_lab(rgb));
            for c in 0..3 {
                assert!(
                    (rgb[c] as i32 - back[c] as i32).abs() <= 1,
                    "{rgb:?} -> {back:?}"
                );
            }
        }
    }

    #[test]
    fn shift_zero_is_identity() {
        let px = vec![[40.0, 0.0, 0.0], [60.0, 0.0, 0.0]];
        let (out, stats) = shift_to_target(&px, [50.0, 0.0, 0.0]);
        assert_eq!(out, px);
        assert_eq!(stats.clamped_fraction, 0.0);
    }

    #[test]
    fn shift_hand_arithmetic() {
        let px = vec![
            [40.0, 0.0, 0.0],
            [60.0, 0.0, 0.0],
            [50.0, 10.0, 0.0],
            [50.0, -10.0, 0.0],
        ];
        let (out, _) = shift_to_target(&px, [55.0, 2.0, 3.0]);
        let expect = [[45.0, 2.0, 3.0],
            [65.0, 2.0, 3.0],
            [55.0, 12.0, 3.0],
            [55.0, -8.0, 3.0]];
        for (a, b) in out.iter().zip(expect.iter()) {
            for c in 0..3 {
                assert!((a[c] - b[c]).abs() < 1e-12);
            }
        }
        let m = lab_mean(&out);
        assert!((m[0] - 55.0).abs() < 1e-9 && (m[1] - 2.0).abs() < 1e-9 && (m[2] - 3.0).abs() < 1e-9);
    }

    #[test]
    fn uniform_field_becomes_target() {
        let px = vec![[50.0, 0.0, 0.0]; 9];
        let (out, _) = shift_to_target(&px, [60.0, 5.0, -5.0]);
        for p in out {
            assert!((p[0] - 60.0).abs() < 1e-12);
            assert!((p[1] - 5.0).abs() < 1e-12);
            assert!((p[2] + 5.0).abs() < 1e-12);
        }
    }

    #[test]
    fn detail_preserved_where_unclamped() {
        let px = vec![[30.0, 4.0, -2.0], [70.0, -6.0, 9.0], [55.0, 0.0, 1.0]];
        let (out, stats) = shift_to_target(&px, [52.0, 1.0, 2.0]);
        assert_eq!(stats.clamped_fraction, 0.0);
        for i in 0..px.len() {
            for j in 0..px.len() {
                for c in 0..3 {
                    let want = px[i][c] - px[j][c];
                    let got = out[i][c] - out[j][c];
                    assert!((want - got).abs() < 1e-12);
                }
            }
        }
    }
}
