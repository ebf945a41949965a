//! Bandwidth collections of the form {1/k}.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernels::Kernel;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum GridMode {
    /// `h ≤ h_max` and `n h > max(‖K‖₂²/‖K‖∞², 1) log n`.
    Theory,
    /// `1 ≤ k ≤ n / log n`.
    #[default]
    Simulation,
}

impl std::str::FromStr for GridMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "theory" => Ok(GridMode::Theory),
            "simulation" => Ok(GridMode::Simulation),
            other => Err(Error::InvalidInput(format!(
                "unknown grid mode `{other}` (expected `theory` or `simulation`)"
            ))),
        }
    }
}

/// Decreasing bandwidths `1/k`.
#[derive(Debug, Clone, PartialEq)]
pub struct BandwidthGrid {
    ks: Vec<u32>,
    values: Vec<f64>,
    mode: GridMode,
}

impl BandwidthGrid {
    /// Grid from explicit inverse bandwidths; sorted and deduplicated.
    pub fn from_ks(mut ks: Vec<u32>, mode: GridMode) -> Result<Self> {
        if ks.contains(&0) {
            return Err(Error::domain("bandwidth index k must be at least 1"));
        }
        ks.sort_unstable();
        ks.dedup();
        if ks.is_empty() {
            return Err(Error::EmptyGrid("no bandwidths given".into()));
        }
        let values = ks.iter().map(|&k| 1.0 / k as f64).collect();
        Ok(Self { ks, values, mode })
    }

    pub fn singleton(k: u32) -> Result<Self> {
        Self::from_ks(vec![k], GridMode::Simulation)
    }

    /// Bandwidths in decreasing order.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Matching inverse bandwidths, increasing.
    pub fn ks(&self) -> &[u32] {
        &self.ks
    }

    pub fn mode(&self) -> GridMode {
        self.mode
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn contains(&self, h: f64) -> bool {
        self.values.contains(&h)
    }

    pub fn largest(&self) -> f64 {
        self.values[0]
    }

    pub fn smallest(&self) -> f64 {
        self.values[self.values.len() - 1]
    }
}

/// Threshold `max(‖K‖₂²/‖K‖∞², 1) log n` that `n h` must exceed in theory mode.
pub fn theory_threshold(n: usize, kernel: &Kernel) -> f64 {
    let norms = kernel.norms();
    (norms.l2_sq / (norms.sup * norms.sup)).max(1.0) * (n as f64).ln()
}

/// Largest bandwidth keeping `[v - A h, v + A h]` strictly inside (0, 1).
pub fn default_h_max(v: f64, kernel: &Kernel) -> f64 {
    v.min(1.0 - v) / kernel.support_radius() - 1e-9
}

pub fn build_grid(n: usize, kernel: &Kernel, mode: GridMode, h_max: Option<f64>) -> Result<BandwidthGrid> {
    if n < 2 {
        return Err(Error::domain(format!("grid construction needs n >= 2, got {n}")));
    }
    let log_n = (n as f64).ln();
    let ks: Vec<u32> = match mode {
        GridMode::Simulation => {
            let k_max = (n as f64 / log_n).floor() as u32;
            (1..=k_max).collect()
        }
        GridMode::Theory => {
            let h_max = h_max.ok_or_else(|| Error::domain("theory grid requires h_max"))?;
            let threshold = theory_threshold(n, kernel);
            let mut ks = Vec::new();
            // n h > threshold bounds k above by n / threshold
            let k_limit = (n as f64 / threshold).ceil() as u32;
            for k in 1..=k_limit {
                let h = 1.0 / k as f64;
                if h <= h_max && n as f64 * h > threshold {
                    ks.push(k);
                }
            }
            ks
        }
    };
    if ks.is_empty() {
        return Err(Error::EmptyGrid(format!(
            "no admissible bandwidth for n = {n}, mode = {mode:?}, h_max = {h_max:?}"
        )));
    }
    BandwidthGrid::from_ks(ks, mode)
}
