//! Time-domain amplitude dynamics.
//!
//! Amplitudes are stored in the slowly varying frame in which
//!
//! ```text
//! i da0/dt = Omega a1
//! i da1/dt = Omega a0 - (delta + i gamma/2) a1 - i int_0^t K(t - t') a1(t') dt'
//! ```
//!
//! i.e. the fast `exp(-i delta t)` carried by |1> in the state expansion is
//! already factored out. [`solve_volterra`] integrates these equations with
//! product integration of the weakly singular kernel; [`a1_inverse_laplace`]
//! inverts the perturbative transform A1(s) on a Talbot contour and serves as
//! an independent oracle.

mod laplace;
mod volterra;

pub use laplace::{a1_inverse_laplace, markov_closed_form};
pub use volterra::solve_volterra;

use crate::error::{Error, Result};
use crate::model::{ReservoirModel, SystemParams};
use crate::spectra::a1_steady;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// a0 held at 1 (weak probe).
    Perturbative,
    /// a0 and a1 integrated together.
    Coupled,
}

/// Interpolation order of a1 inside the memory integral.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ProductOrder {
    /// Piecewise constant a1, implicit Euler in time.
    First,
    /// Piecewise linear a1, trapezoidal rule in time.
    Second,
}

impl ProductOrder {
    pub fn nominal_factor(self) -> f64 {
        match self {
            ProductOrder::First => 2.0,
            ProductOrder::Second => 4.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TalbotConfig {
    /// Number of contour nodes M; the trapezoid sum uses 2M - 1 points.
    pub nodes: usize,
    /// Multiplier on the standard contour radius 2M/(5t).
    pub scale: f64,
    /// Centre the contour on the branch point (or decay pole) instead of s = 0.
    pub auto_shift: bool,
}

impl Default for TalbotConfig {
    fn default() -> Self {
        Self {
            nodes: 32,
            scale: 1.0,
            auto_shift: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub step: f64,
    pub horizon: f64,
    pub order: ProductOrder,
    pub talbot: TalbotConfig,
    /// Upper bound on `step * rate` accepted by the solver.
    pub stability_limit: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            step: 0.01,
            horizon: 50.0,
            order: ProductOrder::Second,
            talbot: TalbotConfig::default(),
            stability_limit: 1.0,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.step > 0.0) || !self.step.is_finite() {
            return Err(Error::invalid("step", format!("must be finite and > 0, got {}", self.step)));
        }
        if !(self.horizon >= self.step) || !self.horizon.is_finite() {
            return Err(Error::invalid(
                "horizon",
                format!("need horizon >= step, got T = {}, h = {}", self.horizon, self.step),
            ));
        }
        if self.talbot.nodes < 16 {
            return Err(Error::invalid(
                "talbot.nodes",
                format!("need M >= 16, got {}", self.talbot.nodes),
            ));
        }
        if !(self.talbot.scale > 0.0) || !self.talbot.scale.is_finite() {
            return Err(Error::invalid("talbot.scale", "must be finite and > 0"));
        }
        Ok(())
    }

    /// Number of steps covering the horizon.
    pub fn steps(&self) -> usize {
        (self.horizon / self.step - 1e-9).ceil() as usize
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub a0: Vec<Complex64>,
    pub a1: Vec<Complex64>,
    pub mode: Mode,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// |a0|^2 + |a1|^2 at each sample.
    pub fn norms(&self) -> Vec<f64> {
        self.a0
            .iter()
            .zip(&self.a1)
            .map(|(x, y)| x.norm_sqr() + y.norm_sqr())
            .collect()
    }

    pub fn final_a1(&self) -> Complex64 {
        *self.a1.last().expect("trajectory has at least the initial sample")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CrossValidation {
    /// max_t |a1_volterra(t) - a1_laplace(t)| over the shared grid (t > 0).
    pub max_pointwise_error: f64,
    /// |a1(T) - a1_steady| for both routes; `None` when the final-value
    /// theorem does not apply (gamma = 0).
    pub steady_state_error: Option<f64>,
    pub steady_state_error_laplace: Option<f64>,
    /// Max distance of either route from the analytic solution (Markovian only).
    pub closed_form_error: Option<f64>,
    /// max |a1| - min |a1| over the last quarter of the horizon.
    pub late_time_modulation: f64,
}

/// Runs both solvers on the Volterra grid and compares them.
pub fn cross_validate(
    model: &ReservoirModel,
    params: &SystemParams,
    config: &SolverConfig,
) -> Result<CrossValidation> {
    let traj = solve_volterra(model, params, config, Mode::Perturbative)?;
    let times = &traj.times[1..];
    let inverted = a1_inverse_laplace(model, params, config, times)?;
    let max_pointwise_error = traj.a1[1..]
        .iter()
        .zip(&inverted)
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);

    let (steady_state_error, steady_state_error_laplace) = match a1_steady(model, params) {
        Ok(ss) => (
            Some((traj.final_a1() - ss).norm()),
            Some((inverted.last().copied().unwrap_or_default() - ss).norm()),
        ),
        Err(Error::GammaZeroSteadyStateUndefined) => (None, None),
        Err(e) => return Err(e),
    };

    let closed_form_error = match *model {
        ReservoirModel::Markovian { gamma1 } => Some(
            times
                .iter()
                .zip(traj.a1[1..].iter().zip(&inverted))
                .map(|(&t, (a, b))| {
                    let exact = markov_closed_form(params, gamma1, t);
                    (a - exact).norm().max((b - exact).norm())
                })
                .fold(0.0, f64::max),
        ),
        _ => None,
    };

    let tail_start = traj.len() * 3 / 4;
    let (lo, hi) = traj.a1[tail_start..]
        .iter()
        .map(|a| a.norm())
        .fold((f64::INFINITY, 0.0f64), |(lo, hi), v| (lo.min(v), hi.max(v)));
    if steady_state_error.is_none() {
        log::info!("gamma = 0: no steady state; late-time |a1| modulation {:.3e}", hi - lo);
    }

    Ok(CrossValidation {
        max_pointwise_error,
        steady_state_error,
        steady_state_error_laplace,
        closed_form_error,
        late_time_modulation: hi - lo,
    })
}

/// Max Volterra-vs-inverse-Laplace error for steps `h0, h0/2, ...`
/// (`levels` entries), measured on the coarse grid `t = k h0`.
pub fn refinement_errors(
    model: &ReservoirModel,
    params: &SystemParams,
    order: ProductOrder,
    h0: f64,
    horizon: f64,
    levels: usize,
) -> Result<Vec<f64>> {
    let base = SolverConfig {
        step: h0,
        horizon,
        order,
        ..SolverConfig::default()
    };
    base.validate()?;
    let coarse: Vec<f64> = (1..=base.steps()).map(|k| k as f64 * h0).collect();
    let reference = a1_inverse_laplace(model, params, &base, &coarse)?;
    (0..levels)
        .map(|level| {
            let stride = 1usize << level;
            let config = SolverConfig {
                step: h0 / stride as f64,
                ..base
            };
            let traj = solve_volterra(model, params, &config, Mode::Perturbative)?;
            Ok(reference
                .iter()
                .enumerate()
                .map(|(k, r)| (traj.a1[(k + 1) * stride] - r).norm())
                .fold(0.0, f64::max))
        })
        .collect()
}
