//! Goldenshluger–Lepski bandwidth selection for the warped component estimators.
//!
//! For a grid `H` and component `j`, the selected bandwidth minimizes
//!
//! ```text
//! A_j(h, v) + √Ṽ_j(n, h),
//! A_j(h, v) = max_{h' ∈ H} [ |ĝ_{j,h,h'}(v) - ĝ_{j,h'}(v)| - √Ṽ_j(n, h') ]₊,
//! Ṽ_j(n, h) = c_{0,j} log(n) ‖K‖₂² / (n h).
//! ```
//!
//! The data only enter through `ĝ_{j,h'}(v)` and `ĝ_{j,h,h'}(v)`, so
//! [`GlStatistics`] computes those once per dataset and evaluation point;
//! selection for any `c0` is then cheap.

use serde::{Deserialize, Serialize};

use crate::circular::Angle;
use crate::error::{Error, Result};
use crate::estimator::{combine, WarpedSample};
use crate::grid::{build_grid, default_h_max, BandwidthGrid, GridMode};
use crate::kernels::Kernel;
use crate::warp::ComponentId;

/// c0 used throughout the simulation study.
pub const DEFAULT_C0: f64 = 0.04;

/// Variance majorant `c0 log(n) ‖K‖₂² / (n h)`.
pub fn v_tilde(n: usize, h: f64, c0: f64, kernel: &Kernel) -> Result<f64> {
    if n < 2 {
        return Err(Error::domain(format!("v_tilde needs n >= 2, got {n}")));
    }
    if !(h.is_finite() && h > 0.0) {
        return Err(Error::domain(format!("v_tilde needs h > 0, got {h}")));
    }
    if !(c0.is_finite() && c0 > 0.0) {
        return Err(Error::domain(format!("v_tilde needs c0 > 0, got {c0}")));
    }
    Ok(c0 * (n as f64).ln() * kernel.norms().l2_sq / (n as f64 * h))
}

/// Where the bandwidth grid comes from.
#[derive(Debug, Clone, PartialEq)]
pub enum GridPolicy {
    /// `{1/k : 1 ≤ k ≤ n / log n}`.
    Simulation,
    /// Admissibility constraints with `h_max`; defaults per evaluation point.
    Theory {
        h_max: Option<f64>,
    },
    Fixed(BandwidthGrid),
}

impl GridPolicy {
    pub fn from_mode(mode: GridMode) -> Self {
        match mode {
            GridMode::Simulation => GridPolicy::Simulation,
            GridMode::Theory => GridPolicy::Theory { h_max: None },
        }
    }

    pub fn resolve(&self, n: usize, kernel: &Kernel, v: f64) -> Result<BandwidthGrid> {
        match self {
            GridPolicy::Simulation => build_grid(n, kernel, GridMode::Simulation, None),
            GridPolicy::Theory { h_max } => {
                let h_max = h_max.unwrap_or_else(|| default_h_max(v, kernel));
                build_grid(n, kernel, GridMode::Theory, Some(h_max))
            }
            GridPolicy::Fixed(grid) => Ok(grid.clone()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GlConfig {
    pub kernel: Kernel,
    pub c0_sine: f64,
    pub c0_cosine: f64,
    pub grid: GridPolicy,
    /// Enforce the theoretical floor on c0 (with q = 1).
    pub strict_theory: bool,
}

impl Default for GlConfig {
    fn default() -> Self {
        Self {
            kernel: Kernel::EPANECHNIKOV,
            c0_sine: DEFAULT_C0,
            c0_cosine: DEFAULT_C0,
            grid: GridPolicy::Simulation,
            strict_theory: false,
        }
    }
}

impl GlConfig {
    pub fn new(kernel: Kernel, c0: f64) -> Self {
        Self {
            kernel,
            c0_sine: c0,
            c0_cosine: c0,
            ..Self::default()
        }
    }

    pub fn with_grid(mut self, grid: GridPolicy) -> Self {
        self.grid = grid;
        self
    }

    pub fn c0(&self, component: ComponentId) -> f64 {
        match component {
            ComponentId::Sine => self.c0_sine,
            ComponentId::Cosine => self.c0_cosine,
        }
    }

    /// Smallest c0 admitted by the oracle inequality: 16 (2 + q)² (1 + ‖K‖₁)².
    pub fn theory_c0_floor(kernel: &Kernel, q: f64) -> f64 {
        16.0 * (2.0 + q).powi(2) * (1.0 + kernel.norms().l1).powi(2)
    }

    pub fn validate(&self) -> Result<()> {
        for c in ComponentId::BOTH {
            let c0 = self.c0(c);
            if !(c0.is_finite() && c0 > 0.0) {
                return Err(Error::domain(format!("c0 for {c:?} must be positive, got {c0}")));
            }
            if self.strict_theory {
                let floor = Self::theory_c0_floor(&self.kernel, 1.0);
                if c0 < floor {
                    return Err(Error::domain(format!(
                        "c0 for {c:?} is {c0}, below the theoretical floor {floor}"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// One grid row of the selection criterion.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub h: f64,
    #[serde(rename = "A")]
    pub a: f64,
    #[serde(rename = "sqrtV")]
    pub sqrt_v: f64,
    pub criterion: f64,
}

/// Criterion values over the grid (decreasing h) and the chosen bandwidth.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionTrace {
    pub records: Vec<TraceRecord>,
    pub chosen: f64,
}

/// `ĝ_{j,h}(v)` and `ĝ_{j,h,h'}(v)` for every grid pair, both components.
#[derive(Debug, Clone)]
pub struct GlStatistics {
    grid: BandwidthGrid,
    kernel: Kernel,
    n: usize,
    v: f64,
    // [component][k]
    single: [Vec<f64>; 2],
    // [component][k * len + k'], symmetric
    aux: [Vec<f64>; 2],
}

impl GlStatistics {
    pub fn compute(data: &WarpedSample, kernel: &Kernel, grid: &BandwidthGrid, v: f64) -> Self {
        let hs = grid.values();
        let len = hs.len();
        let mut single = [vec![0.0; len], vec![0.0; len]];
        let mut aux = [vec![0.0; len * len], vec![0.0; len * len]];
        for (k, &h) in hs.iter().enumerate() {
            let (s, c) = data.components(kernel, h, v);
            single[0][k] = s;
            single[1][k] = c;
            for (kp, &hp) in hs.iter().enumerate().skip(k) {
                let (s, c) = data.aux_components(kernel, h, hp, v);
                for (j, val) in [s, c].into_iter().enumerate() {
                    aux[j][k * len + kp] = val;
                    aux[j][kp * len + k] = val;
                }
            }
        }
        Self {
            grid: grid.clone(),
            kernel: *kernel,
            n: data.len(),
            v,
            single,
            aux,
        }
    }

    pub fn grid(&self) -> &BandwidthGrid {
        &self.grid
    }

    pub fn v(&self) -> f64 {
        self.v
    }

    fn index_of(&self, h: f64) -> Result<usize> {
        self.grid
            .values()
            .iter()
            .position(|&g| g == h)
            .ok_or_else(|| Error::domain(format!("bandwidth {h} is not in the grid")))
    }

    /// `ĝ_{j,h}(v)` for a grid bandwidth.
    pub fn g_hat(&self, component: ComponentId, h: f64) -> Result<f64> {
        Ok(self.single[component.index()][self.index_of(h)?])
    }

    fn sqrt_v_all(&self, c0: f64) -> Result<Vec<f64>> {
        self.grid
            .values()
            .iter()
            .map(|&h| v_tilde(self.n, h, c0, &self.kernel).map(f64::sqrt))
            .collect()
    }

    fn a_at(&self, j: usize, k: usize, sqrt_v: &[f64]) -> f64 {
        let len = self.grid.len();
        let single = &self.single[j];
        let aux = &self.aux[j][k * len..(k + 1) * len];
        // fixed left-to-right reduction order
        aux.iter()
            .zip(single)
            .zip(sqrt_v)
            .map(|((a, g), s)| ((a - g).abs() - s).max(0.0))
            .fold(0.0, f64::max)
    }

    /// `A_j(h, v)` with the sup over the whole grid (h' = h included).
    pub fn a_term(&self, component: ComponentId, c0: f64, h: f64) -> Result<f64> {
        let k = self.index_of(h)?;
        let sqrt_v = self.sqrt_v_all(c0)?;
        Ok(self.a_at(component.index(), k, &sqrt_v))
    }

    /// Grid minimizer of `A_j(h, v) + √Ṽ_j(n, h)`; ties go to the smaller h.
    pub fn select(&self, component: ComponentId, c0: f64) -> Result<(f64, SelectionTrace)> {
        let sqrt_v = self.sqrt_v_all(c0)?;
        let j = component.index();
        let hs = self.grid.values();
        let records: Vec<TraceRecord> = (0..hs.len())
            .map(|k| {
                let a = self.a_at(j, k, &sqrt_v);
                TraceRecord {
                    h: hs[k],
                    a,
                    sqrt_v: sqrt_v[k],
                    criterion: a + sqrt_v[k],
                }
            })
            .collect();
        // grid is decreasing: walking from the end visits smaller h first,
        // so a strict comparison keeps the smallest h among ties
        let best = records
            .iter()
            .rev()
            .fold(None::<&TraceRecord>, |best, r| match best {
                Some(b) if b.criterion <= r.criterion => Some(b),
                _ => Some(r),
            })
            .ok_or_else(|| Error::EmptyGrid("selection over an empty grid".into()))?;
        let chosen = best.h;
        Ok((chosen, SelectionTrace { records, chosen }))
    }

    /// Selects both bandwidths and combines the components into an angle.
    pub fn estimate(&self, c0_sine: f64, c0_cosine: f64, x: f64) -> Result<GlEstimate> {
        let (h1, trace_sine) = self.select(ComponentId::Sine, c0_sine)?;
        let (h2, trace_cosine) = self.select(ComponentId::Cosine, c0_cosine)?;
        let g1 = self.g_hat(ComponentId::Sine, h1)?;
        let g2 = self.g_hat(ComponentId::Cosine, h2)?;
        let angle = combine(g1, g2, x);
        Ok(GlEstimate {
            angle,
            h1,
            h2,
            trace_sine,
            trace_cosine,
        })
    }
}

/// Output of the adaptive pipeline at one point.
///
/// `angle` is an error when both selected components vanish; the selected
/// bandwidths and traces are still reported in that case.
#[derive(Debug)]
pub struct GlEstimate {
    pub angle: Result<Angle>,
    pub h1: f64,
    pub h2: f64,
    pub trace_sine: SelectionTrace,
    pub trace_cosine: SelectionTrace,
}

fn statistics(data: &WarpedSample, config: &GlConfig, v: f64) -> Result<GlStatistics> {
    config.validate()?;
    let grid = config.grid.resolve(data.len(), &config.kernel, v)?;
    Ok(GlStatistics::compute(data, &config.kernel, &grid, v))
}

/// `A_j(h, v)` for one component.
pub fn a_term(component: ComponentId, data: &WarpedSample, config: &GlConfig, h: f64, v: f64) -> Result<f64> {
    statistics(data, config, v)?.a_term(component, config.c0(component), h)
}

/// Data-driven bandwidth for one component at warped point `v`.
pub fn select_bandwidth(
    component: ComponentId,
    data: &WarpedSample,
    config: &GlConfig,
    v: f64,
) -> Result<(f64, SelectionTrace)> {
    statistics(data, config, v)?.select(component, config.c0(component))
}

/// The adaptive estimate `m̂_ĥ(x)` with both selection traces.
pub fn gl_estimate(data: &WarpedSample, config: &GlConfig, x: f64) -> Result<GlEstimate> {
    if data.len() < 2 {
        return Err(Error::domain("adaptive estimation needs n >= 2"));
    }
    let v = data.eval_point(x);
    statistics(data, config, v)?.estimate(config.c0_sine, config.c0_cosine, x)
}
