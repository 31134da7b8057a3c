//! Product integration of the amplitude equations.
//!
//! The memory term `I(t_n) = int_0^{t_n} K(tau) a1(t_n - tau) dtau` is split
//! over the intervals `[k h, (k+1) h]` of the lag `tau`. On each interval a1
//! is replaced by its constant (first order) or linear (second order)
//! interpolant and the remaining integrals of `tau^(-1/2) e^{-i Delta tau}`
//! and `tau^(1/2) e^{-i Delta tau}` are done exactly, so the singularity at
//! `tau = 0` costs no accuracy. Since a1(0) = 0, the memory sum reduces to a
//! discrete convolution `I_n = sum_{k=0}^{n-1} w_k a1_{n-k}`.

use super::{Mode, ProductOrder, SolverConfig, Trajectory};
use crate::error::{Error, Result};
use crate::model::{ReservoirModel, SystemParams};
use crate::special::oscillatory_moments;
use num_complex::Complex64;
use std::f64::consts::{FRAC_PI_4, PI};

/// Convolution weights w_0 .. w_{n-1} for the isotropic kernel.
fn memory_weights(beta: f64, offset: f64, h: f64, n: usize, order: ProductOrder) -> Vec<Complex64> {
    let coupling = Complex64::from_polar(beta.powf(1.5) / PI.sqrt(), -FRAC_PI_4);
    let moments: Vec<(Complex64, Complex64)> = (0..=n)
        .map(|k| oscillatory_moments(offset, k as f64 * h))
        .collect();
    // A_k = int_{kh}^{(k+1)h} K,  B_k = int_{kh}^{(k+1)h} K (tau - kh)/h
    let a: Vec<Complex64> = moments
        .windows(2)
        .map(|m| coupling * (m[1].0 - m[0].0))
        .collect();
    match order {
        ProductOrder::First => a,
        ProductOrder::Second => {
            let b: Vec<Complex64> = moments
                .windows(2)
                .zip(&a)
                .enumerate()
                .map(|(k, (m, &ak))| coupling * (m[1].1 - m[0].1) / h - k as f64 * ak)
                .collect();
            (0..n)
                .map(|k| {
                    let carry = if k > 0 { b[k - 1] } else { Complex64::new(0.0, 0.0) };
                    a[k] - b[k] + carry
                })
                .collect()
        }
    }
}

fn characteristic_rate(model: &ReservoirModel, params: &SystemParams) -> f64 {
    let reservoir = match *model {
        ReservoirModel::Markovian { gamma1 } => 0.5 * gamma1,
        ReservoirModel::IsotropicPbg { beta, delta_g } => beta + (delta_g - params.delta).abs(),
        ReservoirModel::AnisotropicPbg { .. } => 0.0,
    };
    params.delta.abs() + 0.5 * params.gamma + params.omega_rabi + reservoir
}

/// Integrates the amplitude equations from a0 = 1, a1 = 0 on `t = k h`.
pub fn solve_volterra(
    model: &ReservoirModel,
    params: &SystemParams,
    config: &SolverConfig,
    mode: Mode,
) -> Result<Trajectory> {
    params.validate()?;
    config.validate()?;
    if let ReservoirModel::AnisotropicPbg { .. } = model {
        return Err(Error::UnsupportedModel {
            operation: "solve_volterra",
            model: model.name(),
        });
    }
    let h = config.step;
    let product = h * characteristic_rate(model, params);
    if product > config.stability_limit {
        return Err(Error::StepTooLarge {
            step: h,
            product,
            limit: config.stability_limit,
        });
    }

    let n_steps = config.steps();
    let i = Complex64::i();
    let mut lambda = Complex64::new(-0.5 * params.gamma, params.delta);
    let weights = match *model {
        ReservoirModel::IsotropicPbg { beta, delta_g } => {
            memory_weights(beta, delta_g - params.delta, h, n_steps, config.order)
        }
        ReservoirModel::Markovian { gamma1 } => {
            lambda -= 0.5 * gamma1;
            Vec::new()
        }
        ReservoirModel::AnisotropicPbg { .. } => unreachable!(),
    };
    let w0 = weights.first().copied().unwrap_or_default();
    let drive = i * params.omega_rabi;

    let mut a0 = Vec::with_capacity(n_steps + 1);
    let mut a1 = Vec::with_capacity(n_steps + 1);
    a0.push(Complex64::new(1.0, 0.0));
    a1.push(Complex64::new(0.0, 0.0));
    let mut memory = Complex64::new(0.0, 0.0);

    for n in 0..n_steps {
        // history part of I_{n+1}: sum_{k=1}^{n} w_k a1_{n+1-k}
        let history: Complex64 = weights
            .get(1..=n)
            .unwrap_or(&[])
            .iter()
            .zip(a1[1..=n].iter().rev())
            .map(|(w, a)| w * a)
            .sum();
        let (x, y) = (a0[n], a1[n]);
        let (c, rhs0, rhs1, diag) = match config.order {
            ProductOrder::Second => {
                let f1 = -drive * x + lambda * y - memory;
                let c = 0.5 * h * drive;
                (
                    c,
                    x - c * y,
                    y + 0.5 * h * f1 - 0.5 * h * history,
                    1.0 - 0.5 * h * (lambda - w0),
                )
            }
            ProductOrder::First => {
                let c = h * drive;
                (c, x, y - h * history, 1.0 - h * (lambda - w0))
            }
        };
        // Unknowns (x', y'): x' + c y' = rhs0 ;  c x' + diag y' = rhs1
        let (next0, next1) = match mode {
            Mode::Perturbative => (Complex64::new(1.0, 0.0), (rhs1 - c) / diag),
            Mode::Coupled => {
                let det = diag - c * c;
                let y_next = (rhs1 - c * rhs0) / det;
                (rhs0 - c * y_next, y_next)
            }
        };
        memory = w0 * next1 + history;
        a0.push(next0);
        a1.push(next1);
    }

    Ok(Trajectory {
        times: (0..=n_steps).map(|k| k as f64 * h).collect(),
        a0,
        a1,
        mode,
    })
}
