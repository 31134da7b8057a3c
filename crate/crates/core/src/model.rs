//! Physical parameters, reservoir models, memory kernels and their Laplace
//! transforms.
//!
//! Everything is expressed in units of the isotropic coupling `beta`
//! (frequencies) and `1/beta` (times). The reservoir constants (`gamma1`,
//! `beta`, `beta_a`, `delta_g`) are carried by [`ReservoirModel`]; operations
//! read the probe detuning, background decay and Rabi frequency from
//! [`SystemParams`]. [`ReservoirModel::from_params`] keeps the two consistent.

use crate::error::{Error, Result};
use gauss_quad::legendre::GaussLegendre;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_4, PI};

/// Ratio Omega/min(beta, gamma) above which the weak-probe warning fires.
pub const DEFAULT_WEAK_PROBE_THRESHOLD: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemParams {
    /// Rabi frequency of the probe on |0> - |1>.
    pub omega_rabi: f64,
    /// Background (Markovian) decay rate of |1>.
    pub gamma: f64,
    /// Isotropic band-edge coupling; the frequency unit.
    pub beta: f64,
    /// Anisotropic band-edge coupling.
    pub beta_a: f64,
    /// Band-edge detuning omega_g - omega_12.
    pub delta_g: f64,
    /// Probe detuning omega - omega_10.
    pub delta: f64,
    /// Decay rate into |2> for the Markovian control reservoir.
    pub gamma1: f64,
}

impl Default for SystemParams {
    fn default() -> Self {
        Self {
            omega_rabi: 0.01,
            gamma: 1.0,
            beta: 1.0,
            beta_a: 1.0,
            delta_g: 0.0,
            delta: 0.0,
            gamma1: 1.0,
        }
    }
}

impl SystemParams {
    pub fn validate(&self) -> Result<()> {
        let finite = [
            ("omega_rabi", self.omega_rabi),
            ("gamma", self.gamma),
            ("beta", self.beta),
            ("beta_a", self.beta_a),
            ("delta_g", self.delta_g),
            ("delta", self.delta),
            ("gamma1", self.gamma1),
        ];
        for (name, v) in finite {
            if !v.is_finite() {
                return Err(Error::invalid(name, format!("must be finite, got {v}")));
            }
        }
        for (name, v) in [
            ("omega_rabi", self.omega_rabi),
            ("gamma", self.gamma),
            ("gamma1", self.gamma1),
        ] {
            if v < 0.0 {
                return Err(Error::invalid(name, format!("rate must be >= 0, got {v}")));
            }
        }
        if self.beta <= 0.0 {
            return Err(Error::invalid("beta", format!("must be > 0, got {}", self.beta)));
        }
        if self.beta_a <= 0.0 {
            return Err(Error::invalid(
                "beta_a",
                format!("must be > 0, got {}", self.beta_a),
            ));
        }
        Ok(())
    }

    /// delta_g - delta, the offset of the probe from the band edge as seen by
    /// the reservoir transition.
    pub fn band_offset(&self) -> f64 {
        self.delta_g - self.delta
    }

    pub fn with_delta(mut self, delta: f64) -> Self {
        self.delta = delta;
        self
    }

    pub fn weak_probe_ratio(&self) -> f64 {
        let scale = self.beta.min(self.gamma);
        if self.omega_rabi == 0.0 {
            0.0
        } else if scale <= 0.0 {
            f64::INFINITY
        } else {
            self.omega_rabi / scale
        }
    }

    /// Logs a warning and returns `false` when the probe is too strong for
    /// the perturbative treatment.
    pub fn check_weak_probe(&self, threshold: f64) -> bool {
        let ratio = self.weak_probe_ratio();
        if ratio > threshold {
            log::warn!(
                "weak-probe condition violated: Omega/min(beta, gamma) = {ratio:.3} > {threshold}"
            );
            false
        } else {
            true
        }
    }
}

/// Branch convention for complex square roots: `arg sqrt(z)` lies in
/// `(-pi/2, pi/2]`, cut along the negative real axis (both signs of zero on
/// the cut map to the upper half-plane).
#[derive(Debug, Clone, Copy, Default)]
pub struct ComplexBranch;

impl ComplexBranch {
    pub fn sqrt(z: Complex64) -> Complex64 {
        if z.im == 0.0 {
            if z.re >= 0.0 {
                Complex64::new(z.re.sqrt(), 0.0)
            } else {
                Complex64::new(0.0, (-z.re).sqrt())
            }
        } else {
            z.sqrt()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReservoirKind {
    Markov,
    Iso,
    Aniso,
}

impl ReservoirKind {
    pub fn name(self) -> &'static str {
        match self {
            ReservoirKind::Markov => "Markovian",
            ReservoirKind::Iso => "isotropic PBG",
            ReservoirKind::Aniso => "anisotropic PBG",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ReservoirModel {
    Markovian {
        gamma1: f64,
    },
    IsotropicPbg {
        beta: f64,
        delta_g: f64,
    },
    AnisotropicPbg {
        beta_a: f64,
        delta_g: f64,
        /// Prefactor c_a of K~_a(s) = c_a sqrt(s + i(delta_g - delta)).
        transform_constant: Complex64,
    },
}

/// Passive-sign finite-part constant `2 sqrt(beta_a) e^{i pi/4}`.
///
/// With this sign the anisotropic reservoir adds decay above the band edge
/// (`delta > delta_g`) and a pure level shift inside the gap.
pub fn default_anisotropic_constant(beta_a: f64) -> Complex64 {
    Complex64::from_polar(2.0 * beta_a.sqrt(), FRAC_PI_4)
}

impl ReservoirModel {
    pub fn markovian(gamma1: f64) -> Result<Self> {
        if !(gamma1 >= 0.0) || !gamma1.is_finite() {
            return Err(Error::invalid("gamma1", format!("must be finite and >= 0, got {gamma1}")));
        }
        Ok(Self::Markovian { gamma1 })
    }

    pub fn isotropic(beta: f64, delta_g: f64) -> Result<Self> {
        if !(beta > 0.0) || !beta.is_finite() {
            return Err(Error::invalid("beta", format!("must be finite and > 0, got {beta}")));
        }
        if !delta_g.is_finite() {
            return Err(Error::invalid("delta_g", "must be finite"));
        }
        Ok(Self::IsotropicPbg { beta, delta_g })
    }

    pub fn anisotropic(beta_a: f64, delta_g: f64) -> Result<Self> {
        if !(beta_a > 0.0) || !beta_a.is_finite() {
            return Err(Error::invalid("beta_a", format!("must be finite and > 0, got {beta_a}")));
        }
        if !delta_g.is_finite() {
            return Err(Error::invalid("delta_g", "must be finite"));
        }
        Ok(Self::AnisotropicPbg {
            beta_a,
            delta_g,
            transform_constant: default_anisotropic_constant(beta_a),
        })
    }

    /// Overrides c_a. No-op for the other reservoirs.
    pub fn with_transform_constant(self, c_a: Complex64) -> Self {
        match self {
            Self::AnisotropicPbg { beta_a, delta_g, .. } => Self::AnisotropicPbg {
                beta_a,
                delta_g,
                transform_constant: c_a,
            },
            other => other,
        }
    }

    pub fn from_params(kind: ReservoirKind, params: &SystemParams) -> Result<Self> {
        params.validate()?;
        match kind {
            ReservoirKind::Markov => Self::markovian(params.gamma1),
            ReservoirKind::Iso => Self::isotropic(params.beta, params.delta_g),
            ReservoirKind::Aniso => Self::anisotropic(params.beta_a, params.delta_g),
        }
    }

    pub fn kind(&self) -> ReservoirKind {
        match self {
            Self::Markovian { .. } => ReservoirKind::Markov,
            Self::IsotropicPbg { .. } => ReservoirKind::Iso,
            Self::AnisotropicPbg { .. } => ReservoirKind::Aniso,
        }
    }

    pub fn name(&self) -> &'static str {
        self.kind().name()
    }

    /// Band-edge detuning, if the reservoir has a band edge.
    pub fn delta_g(&self) -> Option<f64> {
        match *self {
            Self::Markovian { .. } => None,
            Self::IsotropicPbg { delta_g, .. } | Self::AnisotropicPbg { delta_g, .. } => {
                Some(delta_g)
            }
        }
    }

    /// delta_g - delta; zero for the Markovian reservoir.
    pub(crate) fn band_offset(&self, delta: f64) -> f64 {
        self.delta_g().map_or(0.0, |g| g - delta)
    }

    /// K~ as a function of the shifted variable p = s + i(delta_g - delta).
    pub(crate) fn ktilde_at_offset(&self, p: Complex64) -> Result<Complex64> {
        match *self {
            Self::Markovian { gamma1 } => Ok(Complex64::new(0.5 * gamma1, 0.0)),
            Self::IsotropicPbg { beta, .. } => {
                if p == Complex64::new(0.0, 0.0) {
                    return Err(Error::BranchPointSingularity {
                        re: p.re,
                        im: p.im,
                    });
                }
                let coupling = Complex64::from_polar(beta.powf(1.5), -FRAC_PI_4);
                Ok(coupling / ComplexBranch::sqrt(p))
            }
            Self::AnisotropicPbg {
                transform_constant, ..
            } => Ok(transform_constant * ComplexBranch::sqrt(p)),
        }
    }
}

/// Time-domain memory kernel K(tau).
pub fn kernel(model: &ReservoirModel, params: &SystemParams, tau: f64) -> Result<Complex64> {
    if !(tau > 0.0) {
        return Err(Error::NonPositiveTau(tau));
    }
    let offset = model.band_offset(params.delta);
    match *model {
        ReservoirModel::Markovian { .. } => Err(Error::MarkovianKernelNotPointwise),
        ReservoirModel::IsotropicPbg { beta, .. } => Ok(Complex64::from_polar(
            beta.powf(1.5) / (PI * tau).sqrt(),
            -(FRAC_PI_4 + offset * tau),
        )),
        ReservoirModel::AnisotropicPbg { beta_a, .. } => Ok(Complex64::from_polar(
            beta_a.sqrt() / (PI.sqrt() * tau.powf(1.5)),
            FRAC_PI_4 - offset * tau,
        )),
    }
}

/// Laplace transform K~(s) of the kernel, Re s >= 0.
pub fn ktilde(model: &ReservoirModel, params: &SystemParams, s: Complex64) -> Result<Complex64> {
    if s.re < 0.0 || !s.re.is_finite() || !s.im.is_finite() {
        return Err(Error::invalid("s", format!("need finite s with Re s >= 0, got {s}")));
    }
    let p = s + Complex64::new(0.0, model.band_offset(params.delta));
    match model.ktilde_at_offset(p) {
        Err(Error::BranchPointSingularity { .. }) => {
            Err(Error::BranchPointSingularity { re: s.re, im: s.im })
        }
        other => other,
    }
}

/// The limit K~(0+) approached from Re s > 0.
pub fn ktilde_at_zero(model: &ReservoirModel, params: &SystemParams) -> Result<Complex64> {
    ktilde(model, params, Complex64::new(0.0, 0.0))
}

/// Composite Gauss-Legendre settings for [`validate_laplace_pair`].
#[derive(Debug, Clone, Copy)]
pub struct QuadratureOptions {
    pub degree: usize,
    pub initial_panels: usize,
    pub max_panels: usize,
    pub tolerance: f64,
}

impl Default for QuadratureOptions {
    fn default() -> Self {
        Self {
            degree: 16,
            initial_panels: 8,
            max_panels: 1 << 14,
            tolerance: 1e-14,
        }
    }
}

// Substituting tau = u^2 turns the tau^(-1/2) endpoint singularity into a
// smooth integrand 2u K(u^2) e^{-s u^2}.
fn laplace_by_panels(
    model: &ReservoirModel,
    params: &SystemParams,
    s: Complex64,
    rule: &GaussLegendre,
    panels: usize,
) -> Result<Complex64> {
    let umax = (39.0 / s.re).sqrt();
    let width = umax / panels as f64;
    let mut acc = Complex64::new(0.0, 0.0);
    for p in 0..panels {
        let lo = p as f64 * width;
        for &(node, weight) in rule.as_node_weight_pairs() {
            let u = lo + 0.5 * width * (node + 1.0);
            let tau = u * u;
            let k = kernel(model, params, tau)?;
            acc += k * (-s * tau).exp() * (2.0 * u * weight * 0.5 * width);
        }
    }
    Ok(acc)
}

fn check_pair_inputs(model: &ReservoirModel, s_grid: &[Complex64]) -> Result<bool> {
    match model {
        ReservoirModel::Markovian { .. } => return Ok(false),
        ReservoirModel::AnisotropicPbg { .. } => {
            return Err(Error::UnsupportedModel {
                operation: "validate_laplace_pair",
                model: model.name(),
            })
        }
        ReservoirModel::IsotropicPbg { .. } => {}
    }
    if let Some(bad) = s_grid.iter().find(|s| !(s.re > 0.0)) {
        return Err(Error::invalid("s_grid", format!("need Re s > 0, got {bad}")));
    }
    Ok(true)
}

/// Max |quadrature - closed form| over `s_grid` at a fixed panel count.
pub fn laplace_pair_error_at(
    model: &ReservoirModel,
    params: &SystemParams,
    s_grid: &[Complex64],
    degree: usize,
    panels: usize,
) -> Result<f64> {
    if !check_pair_inputs(model, s_grid)? {
        return Ok(0.0);
    }
    let rule = gauss_rule(degree)?;
    let mut worst = 0.0f64;
    for &s in s_grid {
        let numeric = laplace_by_panels(model, params, s, &rule, panels.max(1))?;
        worst = worst.max((numeric - ktilde(model, params, s)?).norm());
    }
    Ok(worst)
}

/// Numerically transforms the pointwise kernel and compares with [`ktilde`].
///
/// Panels double until successive estimates agree to `tolerance`; returns the
/// largest modulus error over the grid. The Markovian reservoir returns 0
/// (its kernel exists only in the transform domain).
pub fn validate_laplace_pair(
    model: &ReservoirModel,
    params: &SystemParams,
    s_grid: &[Complex64],
    options: QuadratureOptions,
) -> Result<f64> {
    if !check_pair_inputs(model, s_grid)? {
        return Ok(0.0);
    }
    let rule = gauss_rule(options.degree)?;
    let mut worst = 0.0f64;
    for &s in s_grid {
        let mut panels = options.initial_panels.max(1);
        let mut prev = laplace_by_panels(model, params, s, &rule, panels)?;
        let value = loop {
            panels *= 2;
            let next = laplace_by_panels(model, params, s, &rule, panels)?;
            let change = (next - prev).norm();
            if change <= options.tolerance * (1.0 + next.norm()) {
                break next;
            }
            if panels >= options.max_panels {
                return Err(Error::QuadratureNonConvergence {
                    change,
                    tolerance: options.tolerance,
                });
            }
            prev = next;
        };
        worst = worst.max((value - ktilde(model, params, s)?).norm());
    }
    Ok(worst)
}

fn gauss_rule(degree: usize) -> Result<GaussLegendre> {
    let degree = std::num::NonZeroUsize::new(degree)
        .ok_or_else(|| Error::invalid("degree", "quadrature degree must be >= 1"))?;
    Ok(GaussLegendre::new(degree))
}
