//! Seeded k-means with k-means++ initialization plus mean silhouette scoring
//! for model selection.

use alloc::vec;
use alloc::vec::Vec;

use crate::math;
use crate::rng::Xoshiro256StarStar;

pub const KMEANS_RESTARTS: usize = 10;
pub const KMEANS_MAX_ITERS: usize = 100;
pub const KMEANS_TOL: f64 = 1e-8;

#[derive(Debug, Clone)]
pub struct KMeansResult {
    pub labels: Vec<usize>,
    pub centroids: Vec<Vec<f64>>,
    pub inertia: f64,
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn assign(data: &[Vec<f64>], centroids: &[Vec<f64>]) -> (Vec<usize>, f64) {
    let mut labels = Vec::with_capacity(data.len());
    let mut inertia = 0.0;
    for p in data {
        let mut best = 0;
        let mut best_d = f64::INFINITY;
        for (i, c) in centroids.iter().enumerate() {
            let d = sq_dist(p, c);
            if d < best_d {
                best_d = d;
                best = i;
            }
        }
        labels.push(best);
        inertia += best_d;
    }
    (labels, inertia)
}

fn kmeans_once(data: &[Vec<f64>], k: usize, rng: &mut Xoshiro256StarStar) -> KMeansResult {
    let dim = data[0].len();
    // k-means++ seeding.
    let mut centroids: Vec<Vec<f64>> = Vec::with_capacity(k);
    centroids.push(data[rng.usize_below(data.len())].clone());
    while centroids.len() < k {
        let weights: Vec<f64> = data
            .iter()
            .map(|p| {
                centroids
                    .iter()
                    .map(|c| sq_dist(p, c))
                    .fold(f64::INFINITY, f64::min)
            })
            .collect();
        let total: f64 = weights.iter().sum();
        let pick = if total <= 0.0 {
            rng.usize_below(data.len())
        } else {
            let mut u = rng.next_f64() * total;
            let mut chosen = data.len() - 1;
            for (i, w) in weights.iter().enumerate() {
                if u < *w {
                    chosen = i;
                    break;
                }
                u -= w;
            }
            chosen
        };
        centroids.push(data[pick].clone());
    }
    for _ in 0..KMEANS_MAX_ITERS {
        let (labels, _) = assign(data, &centroids);
        let mut sums = vec![vec![0.0; dim]; k];
        let mut counts = vec![0usize; k];
        for (p, &lab) in data.iter().zip(labels.iter()) {
            counts[lab] += 1;
            for (s, v) in sums[lab].iter_mut().zip(p.iter()) {
                *s += v;
            }
        }
        let mut shift = 0.0;
        for i in 0..k {
            if counts[i] == 0 {
                continue; // empty cluster keeps its centroid
            }
            let new: Vec<f64> = sums[i].iter().map(|s| s / counts[i] as f64).collect();
            shift += sq_dist(&centroids[i], &new);
            centroids[i] = new;
        }
        if shift < KMEANS_TOL {
            break;
        }
    }
    let (labels, inertia) = assign(data, &centroids);
    KMeansResult {
        labels,
        centroids,
        inertia,
    }
}

/// Best of `KMEANS_RESTARTS` seeded runs by inertia.
pub fn kmeans(data: &[Vec<f64>], k: usize, seed: u64) -> KMeansResult {
    assert!(k >= 1 && k <= data.len());
    let mut rng = Xoshiro256StarStar::seed_from_u64(seed);
    let mut best: Option<KMeansResult> = None;
    for _ in 0..KMEANS_RESTARTS {
        let r = kmeans_once(data, k, &mut rng);
        if best.as_ref().is_none_or(|b| r.inertia < b.inertia) {
            best = Some(r);
        }
    }
    best.unwrap()
}

/// Mean silhouette over all points, O(n^2) pairwise Euclidean distances.
/// Points in singleton clusters score 0 by convention.
pub fn silhouette(data: &[Vec<f64>], labels: &[usize]) -> f64 {
    let n = data.len();
    assert_eq!(labels.len(), n);
    let k = labels.iter().max().map_or(0, |m| m + 1);
    let mut counts = vec![0usize; k];
    for &l in labels {
        counts[l] += 1;
    }
    let mut total = 0.0;
    for i in 0..n {
        let li = labels[i];
        if counts[li] <= 1 {
            continue; // s(i) = 0
        }
        let mut dist_to = vec![0.0f64; k];
        for j in 0..n {
            if i == j {
                continue;
            }
            dist_to[labels[j]] += math::sqrt(sq_dist(&data[i], &data[j]));
        }
        let a = dist_to[li] / (counts[li] - 1) as f64;
        let mut b = f64::INFINITY;
        for c in 0..k {
            if c != li && counts[c] > 0 {
                b = b.min(dist_to[c] / counts[c] as f64);
            }
        }
        if b.is_finite() {
            let denom = a.max(b);
            if denom > 0.0 {
                total += (b - a) / denom;
            }
        }
    }
    total / n as f64
}

/// Run k-means for k in [2, min(n-1, k_max)] and keep the k with the highest
/// mean silhouette (ties broken toward smaller k).
pub fn select_k_by_silhouette(data: &[Vec<f64>], k_max: usize, seed: u64) -> KMeansResult {
    let n = data.len();
    assert!(n >= 2);
    let upper = k_max.min(n - 1).max(2).min(n);
    let mut best: Option<(f64, KMeansResult)> = None;
    for k in 2..=upper {
        let r = kmeans(data, k, seed.wrapping_add(k as u64));
        let s = silhouette(data, &r.labels);
        if best.as_ref().is_none_or(|(bs, _)| s > *bs) {
            best = Some((s, r));
        }
    }
    best.unwrap().1
}
