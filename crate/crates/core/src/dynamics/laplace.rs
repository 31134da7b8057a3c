//! Numerical inversion of the perturbative transform
//!
//! ```text
//! A1(s) = Omega / (s (delta + i gamma/2 + i K~(s) + i s))
//! ```
//!
//! on a fixed Talbot contour. The s = 0 pole (the steady state) is removed
//! analytically, and for the isotropic kernel so are the poles on the
//! principal sheet, so the contour only has to enclose the branch cut of K~.
//! By default the contour is centred on the branch point `s = -i Delta`
//! (isotropic) or on the decay pole frequency (Markovian), which keeps the cut
//! inside the contour at any t.

use super::SolverConfig;
use crate::error::{Error, Result};
use crate::model::{ReservoirModel, SystemParams};
use num_complex::Complex64;
use std::f64::consts::{FRAC_PI_4, PI};

/// Fraction of the zero-crossing height `r pi / 2` that an unshifted contour
/// may reach before the branch cut counts as crossed.
const BRANCH_MARGIN: f64 = 0.9;

/// Analytic a1(t) for the Markovian reservoir, `-i Omega (e^{lambda t} - 1)/lambda`.
pub fn markov_closed_form(params: &SystemParams, gamma1: f64, t: f64) -> Complex64 {
    let lambda = Complex64::new(-0.5 * (params.gamma + gamma1), params.delta);
    let i = Complex64::i();
    let z = lambda * t;
    let growth = if lambda == Complex64::new(0.0, 0.0) {
        Complex64::new(t, 0.0)
    } else if z.norm() < 1e-4 {
        t * (1.0 + z / 2.0 + z * z / 6.0 + z * z * z / 24.0)
    } else {
        (z.exp() - 1.0) / lambda
    };
    -i * params.omega_rabi * growth
}

struct Transform<'a> {
    model: &'a ReservoirModel,
    params: &'a SystemParams,
    /// Offset of the branch point from s = 0 along the imaginary axis.
    band_offset: f64,
    /// Residue of A1 at s = 0.
    residue: Complex64,
    /// Other poles of A1 on the principal sheet with their residues.
    poles: Vec<(Complex64, Complex64)>,
}

/// Roots of `u^3 + p u + q = 0` (Cardano, then Newton polish).
fn depressed_cubic_roots(p: Complex64, q: Complex64) -> [Complex64; 3] {
    let disc = (q * q / 4.0 + p * p * p / 27.0).sqrt();
    let mut a3 = -q / 2.0 + disc;
    if a3.norm() < (-q / 2.0 - disc).norm() {
        a3 = -q / 2.0 - disc;
    }
    let a = a3.cbrt();
    let omega = Complex64::from_polar(1.0, 2.0 * PI / 3.0);
    let mut roots = [Complex64::new(0.0, 0.0); 3];
    for (k, root) in roots.iter_mut().enumerate() {
        let ak = a * omega.powu(k as u32);
        let mut u = if ak == Complex64::new(0.0, 0.0) {
            ak
        } else {
            ak - p / (3.0 * ak)
        };
        for _ in 0..3 {
            let f = u * u * u + p * u + q;
            let df = 3.0 * u * u + p;
            if df == Complex64::new(0.0, 0.0) {
                break;
            }
            u -= f / df;
        }
        *root = u;
    }
    roots
}

/// Poles of A1 away from s = 0 for the isotropic kernel. With
/// `u = sqrt(s + i Delta)` the denominator becomes the cubic
/// `u^3 + (gamma/2 - i delta_g) u + C = 0`; roots with Re u > 0 lie on the
/// principal sheet.
fn isotropic_poles(beta: f64, band_offset: f64, params: &SystemParams) -> Vec<(Complex64, Complex64)> {
    let i = Complex64::i();
    let coupling = Complex64::from_polar(beta.powf(1.5), -FRAC_PI_4);
    let edge = params.delta + band_offset;
    let p = Complex64::new(0.5 * params.gamma, -edge);
    depressed_cubic_roots(p, coupling)
        .into_iter()
        .filter(|u| u.re > 0.0)
        .filter_map(|u| {
            let s = u * u - i * band_offset;
            let dd = i - 0.5 * i * coupling / (u * u * u);
            let residue = params.omega_rabi / (s * dd);
            (residue.re.is_finite() && residue.im.is_finite()).then_some((s, residue))
        })
        .collect()
}

impl<'a> Transform<'a> {
    fn new(model: &'a ReservoirModel, params: &'a SystemParams) -> Result<Self> {
        let band_offset = model.band_offset(params.delta);
        let i = Complex64::i();
        let residue = match model.ktilde_at_offset(Complex64::new(0.0, band_offset)) {
            Ok(k0) => {
                let d0 = params.delta + i * (0.5 * params.gamma) + i * k0;
                if d0 == Complex64::new(0.0, 0.0) {
                    // double pole at s = 0; the contour encloses it instead
                    Complex64::new(0.0, 0.0)
                } else {
                    params.omega_rabi / d0
                }
            }
            Err(Error::BranchPointSingularity { .. }) => Complex64::new(0.0, 0.0),
            Err(e) => return Err(e),
        };
        let poles = match *model {
            ReservoirModel::IsotropicPbg { beta, .. } => isotropic_poles(beta, band_offset, params),
            _ => Vec::new(),
        };
        Ok(Self {
            model,
            params,
            band_offset,
            residue,
            poles,
        })
    }

    /// A1(s) minus its pole parts, with `s = i centre + p`.
    fn regular_part(&self, centre: f64, p: Complex64, t: f64) -> Result<Complex64> {
        let i = Complex64::i();
        let s = i * centre + p;
        let k = self
            .model
            .ktilde_at_offset(p + i * (centre + self.band_offset))
            .map_err(|e| Error::ContourFailure {
                t,
                reason: format!("K~ at s = {s}: {e}"),
            })?;
        let d = self.params.delta + i * (0.5 * self.params.gamma) + i * k + i * s;
        if d == Complex64::new(0.0, 0.0) || s == Complex64::new(0.0, 0.0) {
            return Err(Error::ContourFailure {
                t,
                reason: format!("contour node s = {s} hits a pole"),
            });
        }
        let poles: Complex64 = self.poles.iter().map(|(sj, rj)| rj / (s - sj)).sum();
        Ok((self.params.omega_rabi / d - self.residue) / s - poles)
    }

    fn pole_terms(&self, t: f64) -> Complex64 {
        self.poles.iter().map(|(sj, rj)| rj * (sj * t).exp()).sum()
    }
}

/// a1(t) from the inverse Laplace transform at each `t` in `t_grid` (t > 0).
pub fn a1_inverse_laplace(
    model: &ReservoirModel,
    params: &SystemParams,
    config: &SolverConfig,
    t_grid: &[f64],
) -> Result<Vec<Complex64>> {
    params.validate()?;
    config.validate()?;
    if let ReservoirModel::AnisotropicPbg { .. } = model {
        return Err(Error::UnsupportedModel {
            operation: "a1_inverse_laplace",
            model: model.name(),
        });
    }
    let transform = Transform::new(model, params)?;
    let talbot = config.talbot;
    let centre = match (talbot.auto_shift, model) {
        (false, _) => 0.0,
        (true, ReservoirModel::Markovian { .. }) => params.delta,
        (true, _) => -transform.band_offset,
    };
    let m = talbot.nodes;
    let i = Complex64::i();

    t_grid
        .iter()
        .map(|&t| {
            if !(t > 0.0) || !t.is_finite() {
                return Err(Error::invalid("t", format!("inversion needs finite t > 0, got {t}")));
            }
            let r = talbot.scale * 2.0 * m as f64 / (5.0 * t);
            if let ReservoirModel::IsotropicPbg { .. } = model {
                let branch_im = -(centre + transform.band_offset);
                if branch_im.abs() >= BRANCH_MARGIN * r * PI / 2.0 {
                    return Err(Error::BranchCrossing { t, branch_im });
                }
            }
            let mut sum = Complex64::new(0.0, 0.0);
            for k in -(m as i64 - 1)..=(m as i64 - 1) {
                let (p, weight) = if k == 0 {
                    (Complex64::new(r, 0.0), Complex64::new(1.0, 0.0))
                } else {
                    let theta = k as f64 * PI / m as f64;
                    let cot = 1.0 / theta.tan();
                    let sigma = theta + (theta * cot - 1.0) * cot;
                    (r * theta * Complex64::new(cot, 1.0), Complex64::new(1.0, sigma))
                };
                sum += (p * t).exp() * transform.regular_part(centre, p, t)? * weight;
            }
            let value = transform.residue
                + transform.pole_terms(t)
                + (i * centre * t).exp() * sum * (r / (2.0 * m as f64));
            if !value.re.is_finite() || !value.im.is_finite() {
                return Err(Error::ContourFailure {
                    t,
                    reason: "non-finite contour sum".into(),
                });
            }
            Ok(value)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::TalbotConfig;
    use crate::spectra::a1_steady;

    fn iso(delta_g: f64, delta: f64, gamma: f64) -> (ReservoirModel, SystemParams) {
        let params = SystemParams {
            delta_g,
            delta,
            gamma,
            ..SystemParams::default()
        };
        (ReservoirModel::isotropic(1.0, delta_g).unwrap(), params)
    }

    #[test]
    fn markov_inversion_matches_closed_form() {
        for &(delta, gamma, gamma1) in &[(0.0, 1.0, 1.0), (2.0, 0.3, 0.0), (-1.5, 0.0, 0.4), (0.0, 0.0, 0.0)] {
            let params = SystemParams {
                delta,
                gamma,
                gamma1,
                ..SystemParams::default()
            };
            let model = ReservoirModel::markovian(gamma1).unwrap();
            let times: Vec<f64> = (1..=60).map(|k| 0.05 * (k * k) as f64).collect();
            let got = a1_inverse_laplace(&model, &params, &SolverConfig::default(), &times).unwrap();
            for (t, a) in times.iter().zip(&got) {
                let exact = markov_closed_form(&params, gamma1, *t);
                assert!(
                    (a - exact).norm() < 1e-8,
                    "delta {delta} gamma {gamma} gamma1 {gamma1} t {t}: {a} vs {exact}"
                );
            }
        }
    }

    #[test]
    fn closed_form_limits() {
        let params = SystemParams {
            delta: 0.0,
            gamma: 0.0,
            ..SystemParams::default()
        };
        let a = markov_closed_form(&params, 0.0, 3.0);
        assert_eq!(a, Complex64::new(0.0, -0.03));
        let params = SystemParams::default();
        // series and direct branches agree near the switch
        let lo = markov_closed_form(&params, 1.0, 0.99e-4);
        let hi = markov_closed_form(&params, 1.0, 1.01e-4);
        assert!(((hi - lo) / 0.02e-4 - Complex64::new(0.0, -0.01)).norm() < 1e-6);
    }

    #[test]
    fn short_time_growth_is_linear() {
        let (m, p) = iso(0.0, 1.0, 1.0);
        for &t in &[1e-6, 1e-4, 1e-2] {
            let a = a1_inverse_laplace(&m, &p, &SolverConfig::default(), &[t]).unwrap()[0];
            let lead = Complex64::new(0.0, -p.omega_rabi * t);
            assert!((a - lead).norm() < 2.0 * p.omega_rabi * t.powf(1.5), "t {t}: {a}");
        }
    }

    #[test]
    fn long_time_limit_is_steady_state() {
        for &(delta_g, delta, gamma) in &[(0.0, 1.0, 1.0), (0.0, -1.0, 0.5), (1.0, -1.0, 2.0)] {
            let (m, p) = iso(delta_g, delta, gamma);
            let a = a1_inverse_laplace(&m, &p, &SolverConfig::default(), &[2000.0]).unwrap()[0];
            let ss = a1_steady(&m, &p).unwrap();
            assert!((a - ss).norm() < 1e-6, "{delta_g} {delta} {gamma}: {a} vs {ss}");
        }
    }

    #[test]
    fn shifted_and_unshifted_contours_agree() {
        let (m, p) = iso(0.5, 0.0, 1.0);
        let shifted = SolverConfig::default();
        let unshifted = SolverConfig {
            talbot: TalbotConfig {
                auto_shift: false,
                ..TalbotConfig::default()
            },
            ..shifted
        };
        let times = [0.1, 0.5, 1.0, 3.0];
        let a = a1_inverse_laplace(&m, &p, &shifted, &times).unwrap();
        let b = a1_inverse_laplace(&m, &p, &unshifted, &times).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).norm() < 1e-10, "{x} vs {y}");
        }
    }

    #[test]
    fn unshifted_contour_reports_branch_crossing() {
        let (m, p) = iso(0.0, 2.0, 1.0);
        let config = SolverConfig {
            talbot: TalbotConfig {
                auto_shift: false,
                ..TalbotConfig::default()
            },
            ..SolverConfig::default()
        };
        assert!(matches!(
            a1_inverse_laplace(&m, &p, &config, &[50.0]),
            Err(Error::BranchCrossing { .. })
        ));
        assert!(a1_inverse_laplace(&m, &p, &SolverConfig::default(), &[50.0]).is_ok());
    }

    #[test]
    fn cubic_roots_solve_the_cubic() {
        let p = Complex64::new(0.5, -3.0);
        let q = Complex64::from_polar(1.0, -FRAC_PI_4);
        for u in depressed_cubic_roots(p, q) {
            assert!((u * u * u + p * u + q).norm() < 1e-13);
        }
        let roots = depressed_cubic_roots(Complex64::new(0.0, 0.0), Complex64::new(-8.0, 0.0));
        assert!(roots.iter().any(|u| (u - 2.0).norm() < 1e-14));
    }

    #[test]
    fn principal_poles_are_zeros_of_the_denominator() {
        let (m, p) = iso(3.0, 0.0, 1.0);
        let poles = isotropic_poles(1.0, 3.0, &p);
        assert!(!poles.is_empty());
        for (s, _) in poles {
            let k = m.ktilde_at_offset(s + Complex64::new(0.0, 3.0)).unwrap();
            let i = Complex64::i();
            let d = p.delta + i * (0.5 * p.gamma) + i * k + i * s;
            assert!(d.norm() < 1e-12, "s = {s}: D = {d}");
        }
    }

    #[test]
    fn undamped_bound_state_keeps_oscillating() {
        // gamma = 0 below the edge: a pole on the imaginary axis survives,
        // so the late-time amplitude does not settle.
        let (m, p) = iso(0.0, 1.0, 0.0);
        let times: Vec<f64> = (0..200).map(|k| 400.0 + 0.25 * k as f64).collect();
        let a = a1_inverse_laplace(&m, &p, &SolverConfig::default(), &times).unwrap();
        let (lo, hi) = a.iter().map(|z| z.norm()).fold((f64::MAX, 0.0f64), |(l, h), v| (l.min(v), h.max(v)));
        assert!(hi - lo > 1e-4, "modulation {}", hi - lo);
    }

    #[test]
    fn rejects_bad_inputs() {
        let (m, p) = iso(0.0, 1.0, 1.0);
        let c = SolverConfig::default();
        assert!(a1_inverse_laplace(&m, &p, &c, &[0.0]).is_err());
        assert!(a1_inverse_laplace(&m, &p, &c, &[-1.0]).is_err());
        let aniso = ReservoirModel::anisotropic(1.0, 0.0).unwrap();
        assert!(matches!(
            a1_inverse_laplace(&aniso, &p, &c, &[1.0]),
            Err(Error::UnsupportedModel { .. })
        ));
    }
}
