//! Per-mode light-cone classification of relative space-time points.
//!
//! For a mode of frequency Ω the cone opens at the phase velocity c/n(Ω):
//! a pair is causal iff `|Δr| <= c|Δt| / n(Ω)`. The light-like boundary
//! belongs to the causal side.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::dispersion::DispersionModel;
use crate::error::Result;
use crate::probe::Vec3;
use crate::units::C;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Region {
    Causal,
    Noncausal,
}

/// Region over which a correlator integral is restricted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SplitRegion {
    Total,
    Causal,
    Noncausal,
}

impl SplitRegion {
    pub const ALL: [SplitRegion; 3] = [SplitRegion::Total, SplitRegion::Causal, SplitRegion::Noncausal];
}

/// Classification with a known index, no dispersion lookup.
pub fn classify_with_index(distance: f64, dt: f64, n: f64) -> Region {
    if distance * n <= C * dt.abs() {
        Region::Causal
    } else {
        Region::Noncausal
    }
}

#[derive(Debug, Clone)]
pub struct ConeClassifier {
    pub dispersion: Arc<DispersionModel>,
}

impl ConeClassifier {
    pub fn new(dispersion: Arc<DispersionModel>) -> Self {
        Self { dispersion }
    }

    /// Cone radius c|Δt|/n(Ω).
    pub fn cone_radius(&self, dt: f64, omega: f64) -> Result<f64> {
        Ok(self.dispersion.cone_speed(omega)? * dt.abs())
    }

    pub fn classify(&self, dr: Vec3, dt: f64, omega: f64) -> Result<Region> {
        let n = self.dispersion.refractive_index(omega)?;
        let distance = (dr[0] * dr[0] + dr[1] * dr[1] + dr[2] * dr[2]).sqrt();
        Ok(classify_with_index(distance, dt, n))
    }

    /// Indicator of `region` at the point, 0 or 1.
    pub fn cone_indicator_weight(&self, region: Region, dr: Vec3, dt: f64, omega: f64) -> Result<f64> {
        Ok(if self.classify(dr, dt, omega)? == region { 1.0 } else { 0.0 })
    }
}
