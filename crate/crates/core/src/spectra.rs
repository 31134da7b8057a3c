//! Steady-state probe response: amplitudes, linear susceptibility, spectra,
//! density of modes and group velocity.

use crate::error::{Error, Result};
use crate::model::{
    ktilde_at_zero, ComplexBranch, ReservoirKind, ReservoirModel, SystemParams,
    DEFAULT_WEAK_PROBE_THRESHOLD,
};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::FRAC_PI_4;

/// Tolerance below which a negative absorption is treated as roundoff.
pub const ABSORPTION_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalingParams {
    /// Stands for 4 pi N |mu_01|^2.
    pub chi_prefactor: f64,
    /// Stands for omega/c in the group velocity and the propagation phase.
    pub omega_over_c: f64,
}

impl Default for ScalingParams {
    fn default() -> Self {
        Self {
            chi_prefactor: 1.0,
            omega_over_c: 1.0,
        }
    }
}

impl ScalingParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.chi_prefactor > 0.0) || !self.chi_prefactor.is_finite() {
            return Err(Error::invalid(
                "chi_prefactor",
                format!("must be finite and > 0, got {}", self.chi_prefactor),
            ));
        }
        if !(self.omega_over_c > 0.0) || !self.omega_over_c.is_finite() {
            return Err(Error::invalid(
                "omega_over_c",
                format!("must be finite and > 0, got {}", self.omega_over_c),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SusceptibilitySample {
    pub delta: f64,
    pub chi: Complex64,
    /// -Im chi
    pub absorption: f64,
    /// Re chi
    pub dispersion: f64,
}

impl SusceptibilitySample {
    pub fn new(delta: f64, chi: Complex64) -> Self {
        Self {
            delta,
            chi,
            absorption: -chi.im,
            dispersion: chi.re,
        }
    }

    pub fn is_passive(&self) -> bool {
        self.absorption >= -ABSORPTION_TOLERANCE
    }
}

/// Uniform detuning grid `min, min + step, ...` up to `max` (inclusive when
/// `max - min` is a whole number of steps).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetuningGrid {
    pub min: f64,
    pub max: f64,
    pub step: f64,
}

impl DetuningGrid {
    pub fn new(min: f64, max: f64, step: f64) -> Result<Self> {
        let grid = Self { min, max, step };
        grid.validate()?;
        Ok(grid)
    }

    /// Grid of the figure presets: [-10, 10] in steps of 0.005.
    pub fn figure_default() -> Self {
        Self {
            min: -10.0,
            max: 10.0,
            step: 0.005,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.min.is_finite() || !self.max.is_finite() {
            return Err(Error::invalid("delta_min/delta_max", "grid bounds must be finite"));
        }
        if !(self.step > 0.0) || !self.step.is_finite() {
            return Err(Error::invalid(
                "delta_step",
                format!("step must be finite and > 0, got {}", self.step),
            ));
        }
        if !(self.max > self.min) {
            return Err(Error::invalid(
                "delta_min/delta_max",
                format!("empty grid: need delta_max > delta_min, got [{}, {}]", self.min, self.max),
            ));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        ((self.max - self.min) / self.step * (1.0 + 1e-12)).floor() as usize + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn point(&self, index: usize) -> f64 {
        self.min + index as f64 * self.step
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.len()).map(|i| self.point(i)).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumTable {
    pub grid: DetuningGrid,
    pub samples: Vec<SusceptibilitySample>,
}

impl SpectrumTable {
    /// Index of the sample with the smallest absorption.
    pub fn argmin_absorption(&self) -> Option<usize> {
        self.samples
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.absorption.total_cmp(&b.1.absorption))
            .map(|(i, _)| i)
    }
}

fn require_damping(model: &ReservoirModel, params: &SystemParams) -> Result<()> {
    let damping = match model {
        ReservoirModel::Markovian { gamma1 } => params.gamma + gamma1,
        _ => params.gamma,
    };
    if damping > 0.0 {
        Ok(())
    } else {
        Err(Error::GammaZeroSteadyStateUndefined)
    }
}

/// Linear response `a1(inf)/Omega = 1/(delta + i gamma/2 + i K~(0+))`.
///
/// Exactly zero at the isotropic band edge, where |K~(0+)| is infinite.
pub fn steady_response(model: &ReservoirModel, params: &SystemParams) -> Result<Complex64> {
    require_damping(model, params)?;
    if let ReservoirModel::IsotropicPbg { delta_g, .. } = *model {
        if params.delta == delta_g {
            return Ok(Complex64::new(0.0, 0.0));
        }
    }
    let k0 = ktilde_at_zero(model, params)?;
    let i = Complex64::i();
    let denom = params.delta + i * (0.5 * params.gamma) + i * k0;
    Ok(denom.inv())
}

/// Steady-state amplitude a1(t -> inf) from the final-value theorem.
pub fn a1_steady(model: &ReservoirModel, params: &SystemParams) -> Result<Complex64> {
    Ok(params.omega_rabi * steady_response(model, params)?)
}

/// Normalized susceptibility `chi = -chi_prefactor * conj(a1(inf)) / Omega`.
pub fn susceptibility(
    model: &ReservoirModel,
    params: &SystemParams,
    scaling: &ScalingParams,
) -> Result<SusceptibilitySample> {
    scaling.validate()?;
    params.check_weak_probe(DEFAULT_WEAK_PROBE_THRESHOLD);
    let chi = chi_value(model, params, scaling)?;
    let sample = SusceptibilitySample::new(params.delta, chi);
    if !sample.is_passive() {
        log::warn!(
            "negative absorption {:e} at delta = {} ({} reservoir)",
            sample.absorption,
            params.delta,
            model.name()
        );
    }
    Ok(sample)
}

pub(crate) fn chi_value(model: &ReservoirModel, params: &SystemParams, scaling: &ScalingParams) -> Result<Complex64> {
    Ok(-scaling.chi_prefactor * steady_response(model, params)?.conj())
}

/// Susceptibility over a detuning grid; rows come back in grid order.
pub fn spectrum(
    model: &ReservoirModel,
    params: &SystemParams,
    scaling: &ScalingParams,
    grid: &DetuningGrid,
) -> Result<SpectrumTable> {
    grid.validate()?;
    scaling.validate()?;
    params.check_weak_probe(DEFAULT_WEAK_PROBE_THRESHOLD);
    let samples = (0..grid.len())
        .into_par_iter()
        .map(|i| {
            let delta = grid.point(i);
            let chi = chi_value(model, &params.with_delta(delta), scaling)?;
            Ok(SusceptibilitySample::new(delta, chi))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SpectrumTable {
        grid: *grid,
        samples,
    })
}

/// Unnormalized density of modes at `x = omega - omega_g`.
///
/// The isotropic edge returns `f64::INFINITY` at `x = 0`.
pub fn density_of_modes(kind: ReservoirKind, x: f64) -> f64 {
    match kind {
        ReservoirKind::Markov => 1.0,
        ReservoirKind::Iso => {
            if x < 0.0 {
                0.0
            } else if x == 0.0 {
                f64::INFINITY
            } else {
                1.0 / x.sqrt()
            }
        }
        ReservoirKind::Aniso => {
            if x <= 0.0 {
                0.0
            } else {
                x.sqrt()
            }
        }
    }
}

/// d K~(0+) / d delta.
fn ktilde_zero_slope(model: &ReservoirModel, params: &SystemParams) -> Result<Complex64> {
    let offset = model.band_offset(params.delta);
    let i = Complex64::i();
    match *model {
        ReservoirModel::Markovian { .. } => Ok(Complex64::new(0.0, 0.0)),
        ReservoirModel::IsotropicPbg { beta, delta_g } => {
            if offset == 0.0 {
                return Err(Error::ThresholdDivergence(delta_g));
            }
            let p = Complex64::new(0.0, offset);
            let coupling = Complex64::from_polar(beta.powf(1.5), -FRAC_PI_4);
            Ok(0.5 * i * coupling / (p * ComplexBranch::sqrt(p)))
        }
        ReservoirModel::AnisotropicPbg {
            delta_g,
            transform_constant,
            ..
        } => {
            if offset == 0.0 {
                return Err(Error::ThresholdDivergence(delta_g));
            }
            let p = Complex64::new(0.0, offset);
            Ok(-0.5 * i * transform_constant / ComplexBranch::sqrt(p))
        }
    }
}

/// Analytic d Re(chi) / d delta at `params.delta`.
pub fn dre_chi_ddelta(
    model: &ReservoirModel,
    params: &SystemParams,
    scaling: &ScalingParams,
) -> Result<f64> {
    scaling.validate()?;
    require_damping(model, params)?;
    let slope = ktilde_zero_slope(model, params)?;
    let k0 = ktilde_at_zero(model, params)?;
    let i = Complex64::i();
    let denom = params.delta + i * (0.5 * params.gamma) + i * k0;
    let ddenom = 1.0 + i * slope;
    // Re chi = -P Re(1/D)  =>  d/d delta = P Re(D'/D^2)
    Ok(scaling.chi_prefactor * (ddenom / (denom * denom)).re)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GroupVelocity {
    /// v_g / c
    pub ratio_to_c: f64,
    /// d Re(chi) / d delta; infinite at the threshold.
    pub dre_chi_ddelta: f64,
    /// Set when evaluated exactly at the band edge, where v_g -> 0.
    pub threshold_divergence: bool,
}

/// `v_g / c = 1 / (1 + (omega/2c) d Re(chi)/d delta)` with c = 1.
pub fn group_velocity(
    model: &ReservoirModel,
    params: &SystemParams,
    scaling: &ScalingParams,
) -> Result<GroupVelocity> {
    match dre_chi_ddelta(model, params, scaling) {
        Ok(d) => Ok(GroupVelocity {
            ratio_to_c: 1.0 / (1.0 + 0.5 * scaling.omega_over_c * d),
            dre_chi_ddelta: d,
            threshold_divergence: false,
        }),
        Err(Error::ThresholdDivergence(_)) => Ok(GroupVelocity {
            ratio_to_c: 0.0,
            dre_chi_ddelta: f64::INFINITY,
            threshold_divergence: true,
        }),
        Err(e) => Err(e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ReservoirModel;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn setup(delta_g: f64, delta: f64) -> (ReservoirModel, SystemParams) {
        let params = SystemParams {
            delta_g,
            delta,
            ..SystemParams::default()
        };
        (ReservoirModel::isotropic(1.0, delta_g).unwrap(), params)
    }

    // Both branches written out as closed forms, independent of the K~ route.
    fn chi_branches(delta: f64, delta_g: f64, gamma: f64, beta: f64) -> Complex64 {
        let b32 = beta.powf(1.5);
        let shifted = Complex64::new(delta, -0.5 * gamma);
        if delta <= delta_g {
            let r = (delta_g - delta).sqrt();
            -r / (shifted * r + b32)
        } else {
            let r = (delta - delta_g).sqrt();
            -r / (shifted * r - Complex64::i() * b32)
        }
    }

    #[test]
    fn a1_steady_examples() {
        let (m, mut p) = setup(0.7, 0.7);
        p.omega_rabi = 0.01;
        assert_eq!(a1_steady(&m, &p).unwrap(), Complex64::new(0.0, 0.0));

        let markov = ReservoirModel::markovian(1.0).unwrap();
        let p = SystemParams {
            delta: 0.0,
            gamma: 1.0,
            omega_rabi: 0.01,
            ..SystemParams::default()
        };
        let a = a1_steady(&markov, &p).unwrap();
        assert_abs_diff_eq!((a - Complex64::new(0.0, -0.01)).norm(), 0.0, epsilon = 1e-16);

        let p = SystemParams {
            omega_rabi: 0.0,
            delta: 0.3,
            ..SystemParams::default()
        };
        assert_eq!(a1_steady(&m, &p).unwrap(), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn gamma_zero_has_no_steady_state() {
        let (m, mut p) = setup(1.0, 0.0);
        p.gamma = 0.0;
        assert!(matches!(a1_steady(&m, &p), Err(Error::GammaZeroSteadyStateUndefined)));
        assert!(matches!(
            susceptibility(&m, &p, &ScalingParams::default()),
            Err(Error::GammaZeroSteadyStateUndefined)
        ));
    }

    #[test]
    fn closed_form_spot_checks() {
        let s = ScalingParams::default();
        let (m, p) = setup(1.0, 0.0);
        let chi = susceptibility(&m, &p, &s).unwrap();
        assert_abs_diff_eq!((chi.chi - Complex64::new(-0.8, -0.4)).norm(), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(chi.absorption, 0.4, epsilon = 1e-12);
        assert_abs_diff_eq!(chi.dispersion, -0.8, epsilon = 1e-12);

        let (m, p) = setup(0.0, 1.0);
        let chi = susceptibility(&m, &p, &s).unwrap().chi;
        let expected = -Complex64::new(1.0, -1.5).inv();
        assert_abs_diff_eq!((chi - expected).norm(), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(chi.re, -0.307_692_307_692_307_7, epsilon = 1e-12);
        assert_abs_diff_eq!(chi.im, -0.461_538_461_538_461_5, epsilon = 1e-12);

        let (m, p) = setup(-2.5, -2.5);
        assert_eq!(susceptibility(&m, &p, &s).unwrap().chi, Complex64::new(0.0, 0.0));
    }

    #[test]
    fn markov_line_centre() {
        let markov = ReservoirModel::markovian(1.0).unwrap();
        let p = SystemParams::default();
        let chi = susceptibility(&markov, &p, &ScalingParams::default()).unwrap();
        assert_abs_diff_eq!((chi.chi - Complex64::new(0.0, -1.0)).norm(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(chi.absorption, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn prefactor_scales_linearly() {
        let (m, p) = setup(1.0, 0.3);
        let base = susceptibility(&m, &p, &ScalingParams::default()).unwrap().chi;
        let s = ScalingParams {
            chi_prefactor: 3.5,
            ..ScalingParams::default()
        };
        let scaled = susceptibility(&m, &p, &s).unwrap().chi;
        assert_abs_diff_eq!((scaled - 3.5 * base).norm(), 0.0, epsilon = 1e-14);
    }

    #[test]
    fn spectrum_zero_at_band_edge() {
        for delta_g in [0.0, 1.0, -1.0] {
            let (m, p) = setup(delta_g, 0.0);
            let grid = DetuningGrid::figure_default();
            let table = spectrum(&m, &p, &ScalingParams::default(), &grid).unwrap();
            assert_eq!(table.samples.len(), 4001);
            let i = table.argmin_absorption().unwrap();
            assert!((table.samples[i].delta - delta_g).abs() <= grid.step);
            assert!(table.samples[i].absorption < 1e-6);
        }
    }

    #[test]
    fn spectrum_fig2a_is_asymmetric() {
        let (m, p) = setup(0.0, 0.0);
        let grid = DetuningGrid::figure_default();
        let t = spectrum(&m, &p, &ScalingParams::default(), &grid).unwrap();
        let left = t.samples.iter().filter(|s| s.delta < 0.0).map(|s| s.absorption).fold(0.0, f64::max);
        let right = t.samples.iter().filter(|s| s.delta > 0.0).map(|s| s.absorption).fold(0.0, f64::max);
        assert!((left - right).abs() > 1e-3, "left {left} right {right}");
    }

    #[test]
    fn markov_spectrum_is_symmetric_lorentzian() {
        let markov = ReservoirModel::markovian(1.0).unwrap();
        let p = SystemParams::default();
        let grid = DetuningGrid::new(-10.0, 10.0, 0.01).unwrap();
        let t = spectrum(&markov, &p, &ScalingParams::default(), &grid).unwrap();
        let imax = t
            .samples
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.absorption.total_cmp(&b.1.absorption))
            .unwrap()
            .0;
        assert!(t.samples[imax].delta.abs() < 1e-9);
        let n = t.samples.len();
        for k in 0..n / 2 {
            assert_abs_diff_eq!(t.samples[k].absorption, t.samples[n - 1 - k].absorption, epsilon = 1e-12);
        }
        for s in &t.samples {
            let lorentz = -Complex64::new(s.delta, -1.0).inv();
            assert!((s.chi - lorentz).norm() < 1e-12);
        }
    }

    #[test]
    fn empty_grid_rejected() {
        assert!(DetuningGrid::new(1.0, 1.0, 0.1).is_err());
        assert!(DetuningGrid::new(1.0, -1.0, 0.1).is_err());
        assert!(DetuningGrid::new(-1.0, 1.0, 0.0).is_err());
        assert!(DetuningGrid::new(-1.0, f64::NAN, 0.1).is_err());
    }

    #[test]
    fn density_of_modes_examples() {
        assert_eq!(density_of_modes(ReservoirKind::Iso, -1.0), 0.0);
        assert_eq!(density_of_modes(ReservoirKind::Iso, 4.0), 0.5);
        assert_eq!(density_of_modes(ReservoirKind::Iso, 0.0), f64::INFINITY);
        assert_eq!(density_of_modes(ReservoirKind::Aniso, 4.0), 2.0);
        assert_eq!(density_of_modes(ReservoirKind::Aniso, -4.0), 0.0);
        assert_eq!(density_of_modes(ReservoirKind::Markov, -3.0), 1.0);
    }

    #[test]
    fn markov_derivative_at_line_centre() {
        let markov = ReservoirModel::markovian(1.0).unwrap();
        let p = SystemParams::default();
        let d = dre_chi_ddelta(&markov, &p, &ScalingParams::default()).unwrap();
        // Re chi = -delta/(delta^2 + Gamma^2/4), Gamma = 2
        assert_abs_diff_eq!(d, -4.0 / 4.0, epsilon = 1e-14);
        let s = ScalingParams {
            chi_prefactor: 2.0,
            ..ScalingParams::default()
        };
        let p = SystemParams {
            gamma: 0.5,
            gamma1: 0.25,
            ..SystemParams::default()
        };
        let markov = ReservoirModel::markovian(0.25).unwrap();
        let d = dre_chi_ddelta(&markov, &p, &s).unwrap();
        assert_abs_diff_eq!(d, -2.0 * 4.0 / 0.75f64.powi(2), epsilon = 1e-12);
    }

    #[test]
    fn threshold_divergence_reported() {
        let (m, p) = setup(0.5, 0.5);
        assert!(matches!(
            dre_chi_ddelta(&m, &p, &ScalingParams::default()),
            Err(Error::ThresholdDivergence(_))
        ));
        let v = group_velocity(&m, &p, &ScalingParams::default()).unwrap();
        assert!(v.threshold_divergence);
        assert_eq!(v.ratio_to_c, 0.0);
    }

    #[test]
    fn group_velocity_vacuum_limit() {
        let (m, p) = setup(1.0, 0.2);
        let s = ScalingParams {
            chi_prefactor: 1e-14,
            ..ScalingParams::default()
        };
        let v = group_velocity(&m, &p, &s).unwrap();
        assert_abs_diff_eq!(v.ratio_to_c, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn group_velocity_slows_towards_edge_from_below() {
        let s = ScalingParams::default();
        let mut last = f64::INFINITY;
        for offset in [1e-1, 1e-2, 1e-3, 1e-4] {
            let (m, p) = setup(0.0, -offset);
            let v = group_velocity(&m, &p, &s).unwrap().ratio_to_c;
            assert!(v > 0.0 && v < last, "offset {offset}: {v}");
            last = v;
        }
        assert!(last < 0.05);
    }

    #[test]
    fn anisotropic_default_constant_is_passive() {
        let m = ReservoirModel::anisotropic(1.0, 0.0).unwrap();
        let p = SystemParams::default();
        let t = spectrum(&m, &p, &ScalingParams::default(), &DetuningGrid::figure_default()).unwrap();
        assert!(t.samples.iter().all(|s| s.is_passive()));
        let min = t.samples.iter().map(|s| s.chi.norm()).fold(f64::INFINITY, f64::min);
        assert!(min > 0.01);
    }

    fn finite_difference(m: &ReservoirModel, p: &SystemParams, h: f64) -> f64 {
        let s = ScalingParams::default();
        let re = |d: f64| chi_value(m, &p.with_delta(d), &s).unwrap().re;
        (re(p.delta + h) - re(p.delta - h)) / (2.0 * h)
    }

    proptest! {
        #[test]
        fn matches_both_closed_form_branches(
            delta in -10.0f64..10.0, delta_g in -5.0f64..5.0, gamma in 0.05f64..4.0, beta in 0.3f64..3.0
        ) {
            let m = ReservoirModel::isotropic(beta, delta_g).unwrap();
            let p = SystemParams { delta, delta_g, gamma, beta, ..SystemParams::default() };
            let chi = susceptibility(&m, &p, &ScalingParams::default()).unwrap().chi;
            let oracle = chi_branches(delta, delta_g, gamma, beta);
            prop_assert!((chi - oracle).norm() < 1e-12 * (1.0 + oracle.norm()));
        }

        #[test]
        fn transparency_at_edge(delta_g in -5.0f64..5.0, gamma in 0.01f64..5.0, beta in 0.1f64..5.0) {
            let m = ReservoirModel::isotropic(beta, delta_g).unwrap();
            let p = SystemParams { delta: delta_g, delta_g, gamma, beta, ..SystemParams::default() };
            let chi = susceptibility(&m, &p, &ScalingParams::default()).unwrap().chi;
            prop_assert!(chi.norm() < 1e-12);
        }

        #[test]
        fn absorption_is_nonnegative(
            delta in -10.0f64..10.0, delta_g in -5.0f64..5.0, gamma in 0.0f64..4.0, gamma1 in 0.0f64..3.0
        ) {
            let p = SystemParams { delta, delta_g, gamma: gamma + 1e-3, gamma1, ..SystemParams::default() };
            for kind in [ReservoirKind::Iso, ReservoirKind::Aniso, ReservoirKind::Markov] {
                let m = ReservoirModel::from_params(kind, &p).unwrap();
                let s = susceptibility(&m, &p, &ScalingParams::default()).unwrap();
                prop_assert!(s.absorption >= -ABSORPTION_TOLERANCE, "{kind:?} {s:?}");
            }
        }

        #[test]
        fn anisotropic_edge_value_independent_of_constant(delta_g in -5.0f64..5.0, gamma in 0.1f64..3.0, scale in 0.1f64..10.0) {
            let p = SystemParams { delta: delta_g, delta_g, gamma, ..SystemParams::default() };
            let base = ReservoirModel::anisotropic(1.0, delta_g).unwrap();
            let ReservoirModel::AnisotropicPbg { transform_constant, .. } = base else { unreachable!() };
            let scaled = base.with_transform_constant(transform_constant * scale);
            let a = susceptibility(&base, &p, &ScalingParams::default()).unwrap().chi;
            let b = susceptibility(&scaled, &p, &ScalingParams::default()).unwrap().chi;
            prop_assert_eq!(a, b);
            prop_assert!((a.norm() - 1.0 / Complex64::new(delta_g, -0.5 * gamma).norm()).abs() < 1e-12);
        }

        #[test]
        fn analytic_derivative_matches_finite_differences(
            offset in prop_oneof![-5.0f64..-0.2, 0.2f64..5.0], gamma in 0.2f64..3.0
        ) {
            let p = SystemParams { delta: -offset, delta_g: 0.0, gamma, ..SystemParams::default() };
            for kind in [ReservoirKind::Iso, ReservoirKind::Aniso, ReservoirKind::Markov] {
                let m = ReservoirModel::from_params(kind, &p).unwrap();
                let analytic = dre_chi_ddelta(&m, &p, &ScalingParams::default()).unwrap();
                let fd = finite_difference(&m, &p, 1e-5);
                prop_assert!((analytic - fd).abs() <= 1e-6 * analytic.abs().max(1e-3), "{kind:?}: {analytic} vs {fd}");
            }
        }
    }
}
