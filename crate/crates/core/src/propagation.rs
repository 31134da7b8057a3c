//! Linear propagation of a probe envelope through a slab of atoms.
//!
//! The envelope is decomposed as `E(t) = sum_k E^_k exp(+i Delta_k t)` with
//! `Delta_k = 2 pi k / (N dt)`, so the component `k` sits at probe detuning
//! `delta_c + Delta_k`. Each component is multiplied by the exact transfer
//! function `exp(-i (omega/2c) L chi(delta_c + Delta_k))`; times are in the
//! retarded frame, so a reported delay is relative to vacuum propagation.

use crate::error::{Error, Result};
use crate::model::{ReservoirModel, SystemParams};
use crate::spectra::{chi_value, ScalingParams};
use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;
use std::f64::consts::PI;

/// Output/input energy ratio below which a delay is not measured.
pub const ABSORBED_ENERGY_FLOOR: f64 = 1e-6;

/// Spectral energy fraction allowed outside a slab's detuning window.
pub const WINDOW_LEAKAGE_TOLERANCE: f64 = 1e-12;

/// Complex envelope on a uniform time grid of power-of-two length.
#[derive(Debug, Clone, PartialEq)]
pub struct PulseField {
    t0: f64,
    dt: f64,
    carrier: f64,
    envelope: Vec<Complex64>,
}

impl PulseField {
    pub fn new(t0: f64, dt: f64, carrier: f64, envelope: Vec<Complex64>) -> Result<Self> {
        if !(dt > 0.0) || !dt.is_finite() {
            return Err(Error::invalid("dt", format!("must be finite and > 0, got {dt}")));
        }
        if !t0.is_finite() || !carrier.is_finite() {
            return Err(Error::invalid("t0", "grid origin and carrier must be finite"));
        }
        if envelope.len() < 2 || !envelope.len().is_power_of_two() {
            return Err(Error::invalid(
                "envelope",
                format!("length must be a power of two >= 2, got {}", envelope.len()),
            ));
        }
        if envelope.iter().any(|e| !e.re.is_finite() || !e.im.is_finite()) {
            return Err(Error::invalid("envelope", "samples must be finite"));
        }
        Ok(Self {
            t0,
            dt,
            carrier,
            envelope,
        })
    }

    /// `exp(-sigma^2 (t - centre)^2)` on `t = -len/2 dt .. (len/2 - 1) dt`,
    /// whose |E^|^2 has standard deviation `sigma`.
    pub fn gaussian(len: usize, dt: f64, carrier: f64, sigma: f64, centre: f64) -> Result<Self> {
        if !(sigma > 0.0) || !sigma.is_finite() {
            return Err(Error::invalid("bandwidth", format!("must be finite and > 0, got {sigma}")));
        }
        let t0 = -((len / 2) as f64) * dt;
        let envelope = (0..len)
            .map(|n| {
                let t = t0 + n as f64 * dt - centre;
                Complex64::new((-sigma * sigma * t * t).exp(), 0.0)
            })
            .collect();
        Self::new(t0, dt, carrier, envelope)
    }

    pub fn len(&self) -> usize {
        self.envelope.len()
    }

    pub fn is_empty(&self) -> bool {
        self.envelope.is_empty()
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// Carrier detuning delta_c.
    pub fn carrier(&self) -> f64 {
        self.carrier
    }

    pub fn envelope(&self) -> &[Complex64] {
        &self.envelope
    }

    pub fn time(&self, n: usize) -> f64 {
        self.t0 + n as f64 * self.dt
    }

    /// `sum |E|^2 dt`.
    pub fn energy(&self) -> f64 {
        self.envelope.iter().map(|e| e.norm_sqr()).sum::<f64>() * self.dt
    }

    /// Energy-weighted mean time.
    pub fn centroid(&self) -> f64 {
        let (num, den) = self
            .envelope
            .iter()
            .enumerate()
            .fold((0.0, 0.0), |(num, den), (n, e)| {
                let w = e.norm_sqr();
                (num + w * self.time(n), den + w)
            });
        num / den
    }

    /// Angular detuning of spectral bin `k` relative to the carrier.
    pub fn bin_detuning(&self, k: usize) -> f64 {
        let n = self.len();
        let signed = if k < n / 2 { k as f64 } else { k as f64 - n as f64 };
        2.0 * PI * signed / (n as f64 * self.dt)
    }

    fn spectrum(&self) -> Vec<Complex64> {
        let mut buf = self.envelope.clone();
        FftPlanner::new().plan_fft_forward(buf.len()).process(&mut buf);
        buf
    }

    /// Standard deviation of |E^|^2 over the spectral detuning.
    pub fn bandwidth(&self) -> f64 {
        let power: Vec<f64> = self.spectrum().iter().map(|e| e.norm_sqr()).collect();
        let total: f64 = power.iter().sum();
        let mean = power
            .iter()
            .enumerate()
            .map(|(k, p)| p * self.bin_detuning(k))
            .sum::<f64>()
            / total;
        let var = power
            .iter()
            .enumerate()
            .map(|(k, p)| p * (self.bin_detuning(k) - mean).powi(2))
            .sum::<f64>()
            / total;
        var.sqrt()
    }

    pub fn same_grid(&self, other: &Self) -> bool {
        self.len() == other.len() && self.t0 == other.t0 && self.dt == other.dt
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MediumSlab {
    /// Slab length; the phase is `(omega_over_c / 2) * length * chi`.
    pub length: f64,
    pub model: ReservoirModel,
    /// Atom parameters; `delta` is replaced per spectral component.
    pub params: SystemParams,
    pub scaling: ScalingParams,
    /// Detuning range where chi is trusted; `None` accepts the whole grid.
    pub detuning_window: Option<(f64, f64)>,
}

impl MediumSlab {
    pub fn new(length: f64, model: ReservoirModel, params: SystemParams, scaling: ScalingParams) -> Self {
        Self {
            length,
            model,
            params,
            scaling,
            detuning_window: None,
        }
    }

    pub fn with_length(self, length: f64) -> Self {
        Self { length, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.length >= 0.0) || !self.length.is_finite() {
            return Err(Error::invalid("length", format!("must be finite and >= 0, got {}", self.length)));
        }
        if let Some((lo, hi)) = self.detuning_window {
            if !(lo < hi) {
                return Err(Error::invalid("detuning_window", format!("need lo < hi, got ({lo}, {hi})")));
            }
        }
        self.params.validate()?;
        self.scaling.validate()
    }

    /// Transfer function at absolute probe detuning `delta`.
    pub fn transfer(&self, delta: f64) -> Result<Complex64> {
        let chi = chi_value(&self.model, &self.params.with_delta(delta), &self.scaling)?;
        let phase = -Complex64::i() * (0.5 * self.scaling.omega_over_c * self.length) * chi;
        Ok(phase.exp())
    }
}

/// Passes `pulse` through `slab` in one exact frequency-domain step.
pub fn propagate(pulse: &PulseField, slab: &MediumSlab) -> Result<PulseField> {
    slab.validate()?;
    slab.params.check_weak_probe(crate::model::DEFAULT_WEAK_PROBE_THRESHOLD);
    if slab.length == 0.0 {
        return Ok(pulse.clone());
    }
    let mut bins = pulse.spectrum();
    if let Some((lo, hi)) = slab.detuning_window {
        let total: f64 = bins.iter().map(|e| e.norm_sqr()).sum();
        let outside: f64 = bins
            .iter()
            .enumerate()
            .filter(|(k, _)| {
                let d = pulse.carrier + pulse.bin_detuning(*k);
                d < lo || d > hi
            })
            .map(|(_, e)| e.norm_sqr())
            .sum();
        let fraction = outside / total;
        if fraction > WINDOW_LEAKAGE_TOLERANCE {
            return Err(Error::BandwidthTooWide { fraction, lo, hi });
        }
    }
    bins.par_iter_mut()
        .enumerate()
        .try_for_each(|(k, e)| -> Result<()> {
            *e *= slab.transfer(pulse.carrier + pulse.bin_detuning(k))?;
            Ok(())
        })?;
    FftPlanner::new().plan_fft_inverse(bins.len()).process(&mut bins);
    let norm = 1.0 / bins.len() as f64;
    bins.iter_mut().for_each(|e| *e *= norm);
    PulseField::new(pulse.t0, pulse.dt, pulse.carrier, bins)
}

/// Centroid shift `centroid(out) - centroid(in)`.
pub fn group_delay(pulse_in: &PulseField, pulse_out: &PulseField) -> Result<f64> {
    if !pulse_in.same_grid(pulse_out) {
        return Err(Error::GridMismatch(format!(
            "input grid (N = {}, t0 = {}, dt = {}) vs output grid (N = {}, t0 = {}, dt = {})",
            pulse_in.len(),
            pulse_in.t0,
            pulse_in.dt,
            pulse_out.len(),
            pulse_out.t0,
            pulse_out.dt
        )));
    }
    let e_in = pulse_in.energy();
    let e_out = pulse_out.energy();
    let floor = ABSORBED_ENERGY_FLOOR * e_in;
    if !(e_out >= floor) {
        return Err(Error::PulseAbsorbed { output: e_out, floor });
    }
    Ok(pulse_out.centroid() - pulse_in.centroid())
}

/// Settings of the transparency-window experiment: a Gaussian of spectral
/// width `bandwidth` centred on the band edge through a slab with
/// `(omega_over_c / 2) * length = phase_length`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WindowExperiment {
    pub bandwidth: f64,
    pub phase_length: f64,
    pub samples: usize,
    pub dt: f64,
}

impl Default for WindowExperiment {
    fn default() -> Self {
        Self {
            bandwidth: 0.01,
            phase_length: 10.0,
            samples: 16384,
            dt: 0.5,
        }
    }
}

/// Output/input energy ratio of the window experiment for one medium.
/// `params.delta_g` sets the carrier, also for the Markovian medium.
pub fn window_retention(
    experiment: &WindowExperiment,
    model: ReservoirModel,
    params: SystemParams,
    scaling: ScalingParams,
) -> Result<f64> {
    let pulse = PulseField::gaussian(
        experiment.samples,
        experiment.dt,
        params.delta_g,
        experiment.bandwidth * params.beta,
        0.0,
    )?;
    let length = 2.0 * experiment.phase_length / scaling.omega_over_c;
    let out = propagate(&pulse, &MediumSlab::new(length, model, params, scaling))?;
    Ok(out.energy() / pulse.energy())
}
