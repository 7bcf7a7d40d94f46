//! Pipeline configuration. Every tunable threshold and every seed lives here;
//! nothing draws from platform entropy.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(default)]
pub struct SnapConfig {
    /// Endpoint merge radius for wall closure, meters.
    pub endpoint_snap_radius: f64,
    pub grid_pitch: f64,
    /// Edge directions within this of an axis get snapped to it, radians.
    pub angle_snap: f64,
    pub wall_align_max_dist: f64,
    pub wall_align_max_angle: f64,
    pub wall_clearance: f64,
    pub next_to_max_gap: f64,
    pub max_collision_iters: usize,
    pub max_expand_passes: usize,
}

impl Default for SnapConfig {
    fn default() -> Self {
        SnapConfig {
            endpoint_snap_radius: 0.05,
            grid_pitch: 0.01,
            angle_snap: 15f64.to_radians(),
            wall_align_max_dist: 0.2,
            wall_align_max_angle: 10f64.to_radians(),
            wall_clearance: 0.01,
            next_to_max_gap: 0.1,
            max_collision_iters: 10,
            max_expand_passes: 20,
        }
    }
}

impl SnapConfig {
    pub fn validate(&self) -> Result<(), String> {
        let positive = [
            ("endpoint_snap_radius", self.endpoint_snap_radius),
            ("grid_pitch", self.grid_pitch),
            ("angle_snap", self.angle_snap),
            ("wall_align_max_dist", self.wall_align_max_dist),
            ("wall_align_max_angle", self.wall_align_max_angle),
            ("wall_clearance", self.wall_clearance),
            ("next_to_max_gap", self.next_to_max_gap),
        ];
        for (name, v) in positive {
            if v <= 0.0 {
                return Err(format!("{name} must be strictly positive"));
            }
        }
        if self.wall_align_max_angle >= std::f64::consts::FRAC_PI_2 {
            return Err("wall_align_max_angle must be < pi/2".to_string());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(default)]
pub struct GraphConfig {
    /// OnTop: intersection-over-smaller-footprint threshold.
    pub on_top_overlap: f64,
    /// OnTop: max gap between a's bottom and b's top, meters.
    pub on_top_vertical_gap: f64,
    /// ConnectingTo: max yaw difference, radians.
    pub connecting_yaw_tol: f64,
    /// TableChairPair: chair front ray range, meters.
    pub table_chair_range: f64,
}

impl Default for GraphConfig {
    fn default() -> Self {
        GraphConfig {
            on_top_overlap: 0.5,
            on_top_vertical_gap: 0.05,
            connecting_yaw_tol: 5f64.to_radians(),
            table_chair_range: 1.0,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(default)]
pub struct RetrievalConfig {
    /// Embedding dimensionality the stub provider emits.
    pub embed_dim: usize,
    pub stage2_top: usize,
    pub stage3_top: usize,
    pub cluster_k_max: usize,
}

impl Default for RetrievalConfig {
    fn default() -> Self {
        RetrievalConfig {
            embed_dim: 32,
            stage2_top: 10,
            stage3_top: 4,
            cluster_k_max: 10,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(default)]
pub struct MaterialConfig {
    /// Patches kept per object.
    pub top_k_patches: usize,
    pub min_patch_size: usize,
    pub category_top: usize,
    pub confirm_top: usize,
}

impl Default for MaterialConfig {
    fn default() -> Self {
        MaterialConfig {
            top_k_patches: 4,
            min_patch_size: 16,
            category_top: 10,
            confirm_top: 3,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(default)]
pub struct AssembleConfig {
    pub wall_thickness: f64,
    /// kg/m^3 fallback when a category has no override.
    pub default_density: f64,
    pub density_overrides: BTreeMap<String, f64>,
    /// Axis scale ratios past this (relative to uniform) get logged.
    pub distortion_warn_ratio: f64,
}

impl Default for AssembleConfig {
    fn default() -> Self {
        let mut density_overrides = BTreeMap::new();
        density_overrides.insert("sofa".to_string(), 60.0);
        density_overrides.insert("bed".to_string(), 80.0);
        density_overrides.insert("chair".to_string(), 100.0);
        density_overrides.insert("table".to_string(), 120.0);
        AssembleConfig {
            wall_thickness: 0.1,
            default_density: 150.0,
            density_overrides,
            distortion_warn_ratio: 0.25,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(default)]
pub struct BenchConfig {
    pub sample_count: usize,
    /// Scale by max axis extent (unit-cube fit). Flag kept for comparison
    /// studies against diagonal normalization.
    pub normalize_by_diagonal: bool,
    /// External perceptual-metric command: invoked as `cmd imgA imgB`,
    /// must print one float. Absent by default.
    pub external_metric: Option<String>,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            sample_count: 10_000,
            normalize_by_diagonal: false,
            external_metric: None,
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq, Eq)]
#[serde(default)]
pub struct Seeds {
    pub sampling: u64,
    pub kmeans: u64,
    pub stub: u64,
}

impl Default for Seeds {
    fn default() -> Self {
        Seeds {
            sampling: 1,
            kmeans: 2,
            stub: 3,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(default)]
pub struct ServiceConfig {
    /// "stub" or an http(s) URL.
    pub provider: String,
    pub oracle: String,
    pub retry_attempts: u32,
    pub retry_base_secs: f64,
    pub timeout_secs: f64,
    pub max_in_flight: usize,
}

impl Default for ServiceConfig {
    fn default() -> Self {
        ServiceConfig {
            provider: "stub".to_string(),
            oracle: "stub".to_string(),
            retry_attempts: 3,
            retry_base_secs: 0.5,
            timeout_secs: 30.0,
            max_in_flight: 4,
        }
    }
}

impl ServiceConfig {
    pub fn validate(&self) -> Result<(), String> {
        for (name, ep) in [("provider", &self.provider), ("oracle", &self.oracle)] {
            if ep != "stub" && !ep.starts_with("http://") && !ep.starts_with("https://") {
                return Err(format!("{name} endpoint must be 'stub' or an http(s) URL"));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Default)]
#[serde(default)]
pub struct PipelineConfig {
    pub snap: SnapConfig,
    pub graph: GraphConfig,
    pub retrieval: RetrievalConfig,
    pub material: MaterialConfig,
    pub assemble: AssembleConfig,
    pub bench: BenchConfig,
    pub services: ServiceConfig,
    pub seeds: Seeds,
    pub cache_dir: Option<String>,
    pub offline: bool,
}

impl PipelineConfig {
    pub fn validate(&self) -> crate::error::Result<()> {
        let mut report = Vec::new();
        if let Err(e) = self.snap.validate() {
            report.push(e);
        }
        if let Err(e) = self.services.validate() {
            report.push(e);
        }
        if report.is_empty() {
            Ok(())
        } else {
            Err(crate::error::Error::Validation { report })
        }
    }

    pub fn load(path: &std::path::Path) -> crate::error::Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| crate::error::Error::file(path, e))?;
        let cfg: PipelineConfig = serde_json::from_str(&text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Stable content hash of the configuration. Runtime environment
    /// (cache location, offline switch) does not change results and is
    /// excluded so warm-cache and offline re-runs stay byte-identical.
    pub fn hash(&self) -> String {
        let mut semantic = self.clone();
        semantic.cache_dir = None;
        semantic.offline = false;
        crate::pipeline::sha256_hex(serde_json::to_string(&semantic).unwrap().as_bytes())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        PipelineConfig::default().validate().unwrap();
    }

    #[test]
    fn default_thresholds() {
        let s = SnapConfig::default();
        assert_eq!(s.wall_align_max_dist, 0.2);
        assert!((s.wall_align_max_angle - 10f64.to_radians()).abs() < 1e-12);
        assert_eq!(s.next_to_max_gap, 0.1);
        assert_eq!(s.max_collision_iters, 10);
    }

    #[test]
    fn bad_endpoint_rejected() {
        let mut cfg = PipelineConfig::default();
        cfg.services.oracle = "gopher://x".to_string();
        assert!(cfg.validate().is_err());
    }
}
