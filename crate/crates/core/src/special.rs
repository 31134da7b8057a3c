//! Complex error function and the truncated oscillatory power integrals
//! used by the product-integration weights.
//!
//! `erf` is summed from its Maclaurin series for |z| < 2. For larger |z|
//! the complement is evaluated from the Laplace continued fraction
//!
//! ```text
//! erfc(z) = exp(-z^2)/sqrt(pi) * 1/(z + (1/2)/(z + 1/(z + (3/2)/(z + ...))))
//! ```
//!
//! with modified Lentz iteration, valid for Re z > 0 and mapped to the left
//! half-plane by erfc(-z) = 2 - erfc(z). The fraction converges quickly near
//! the real axis and slows as arg z approaches +-pi/2; the kernel moments only
//! need the rays arg z = +-pi/4.

use num_complex::Complex64;
use std::f64::consts::{FRAC_PI_4, PI};

const SERIES_RADIUS: f64 = 2.0;
const CF_MAX_ITER: usize = 20_000;

fn two_over_sqrt_pi() -> f64 {
    2.0 / PI.sqrt()
}

fn erf_series(z: Complex64) -> Complex64 {
    let z2 = -z * z;
    let mut term = z;
    let mut sum = z;
    for n in 1..200 {
        term *= z2 / n as f64;
        let contrib = term / (2 * n + 1) as f64;
        sum += contrib;
        if contrib.norm() <= 1e-17 * sum.norm() {
            break;
        }
    }
    sum * two_over_sqrt_pi()
}

/// Continued fraction for erfc, Re z > 0.
fn erfc_cf(z: Complex64) -> Complex64 {
    let tiny = 1e-300;
    let mut f = z;
    let mut c = f;
    let mut d = Complex64::new(0.0, 0.0);
    for j in 1..CF_MAX_ITER {
        let a = j as f64 * 0.5;
        d = z + a * d;
        if d.norm() < tiny {
            d = Complex64::new(tiny, 0.0);
        }
        c = z + a / c;
        if c.norm() < tiny {
            c = Complex64::new(tiny, 0.0);
        }
        d = d.inv();
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).norm() < 1e-16 {
            break;
        }
    }
    (-z * z).exp() / (PI.sqrt() * f)
}

pub fn erf(z: Complex64) -> Complex64 {
    if z.norm() < SERIES_RADIUS {
        erf_series(z)
    } else {
        1.0 - erfc(z)
    }
}

pub fn erfc(z: Complex64) -> Complex64 {
    if z.norm() < SERIES_RADIUS {
        1.0 - erf_series(z)
    } else if z.re >= 0.0 {
        erfc_cf(z)
    } else {
        2.0 - erfc_cf(-z)
    }
}

/// `P0(x) = int_0^x tau^(-1/2) exp(-i a tau) dtau` and
/// `P1(x) = int_0^x tau^(1/2) exp(-i a tau) dtau`, for x >= 0.
///
/// Returned as `(P0, P1)`. Small |a| x uses the power series in `a`; larger
/// arguments go through the Fresnel form of P0 and integrate P1 by parts.
pub fn oscillatory_moments(a: f64, x: f64) -> (Complex64, Complex64) {
    debug_assert!(x >= 0.0);
    if x == 0.0 {
        return (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
    }
    let phase = a.abs() * x;
    if phase <= 2.0 {
        return moments_series(a, x);
    }
    let p0 = half_power_fresnel(a, x);
    let sx = x.sqrt();
    let osc = Complex64::from_polar(1.0, -a * x);
    let i = Complex64::i();
    let p1 = i / a * sx * osc - i / (2.0 * a) * p0;
    (p0, p1)
}

fn moments_series(a: f64, x: f64) -> (Complex64, Complex64) {
    // exp(-i a tau) = sum (-i a tau)^n / n!
    let step = Complex64::new(0.0, -a * x);
    let mut coeff = Complex64::new(1.0, 0.0);
    let mut p0 = Complex64::new(0.0, 0.0);
    let mut p1 = Complex64::new(0.0, 0.0);
    for n in 0..80 {
        let nf = n as f64;
        if n > 0 {
            coeff *= step / nf;
        }
        let d0 = coeff / (nf + 0.5);
        let d1 = coeff / (nf + 1.5);
        p0 += d0;
        p1 += d1;
        if d0.norm() < 1e-18 * p0.norm() && n > 2 {
            break;
        }
    }
    let sx = x.sqrt();
    (p0 * sx, p1 * sx * x)
}

/// P0 for |a| x > 0 via int_0^U exp(-i v^2) dv = sqrt(pi)/2 e^{-i pi/4} erf(e^{i pi/4} U).
fn half_power_fresnel(a: f64, x: f64) -> Complex64 {
    let q = a.abs().sqrt();
    let u = q * x.sqrt();
    let rot = Complex64::from_polar(1.0, FRAC_PI_4);
    let half_sqrt_pi = 0.5 * PI.sqrt();
    // F(U) = F(inf) - tail, tail = sqrt(pi)/2 e^{-i pi/4} erfc(e^{i pi/4} U)
    let fresnel = half_sqrt_pi * rot.conj() * (1.0 - erfc(rot * u));
    let f = if a > 0.0 { fresnel } else { fresnel.conj() };
    2.0 / q * f
}

#[cfg(test)]
#[allow(clippy::excessive_precision)]
mod tests {
    use super::*;
    use gauss_quad::legendre::GaussLegendre;

    // (Re z, Im z, Re erf, Im erf, Re erfc, Im erfc) from 30-digit mpmath.
    const ERF_TABLE: &[(f64, f64, f64, f64, f64, f64)] = &[
        (0.5, 0.0, 0.52049987781304654, 0.0, 0.47950012218695346, 0.0),
        (1.0, 1.0, 1.3161512816979476, 0.19045346923783469, -0.31615128169794764, -0.19045346923783469),
        (2.1213203435596426, 2.1213203435596426, 1.1780175780881445, -0.056409615960234748, -0.17801757808814448, 0.056409615960234748),
        (1.0606601717798213, 1.0606601717798213, 1.3383896401162392, 0.096501782737190713, -0.33838964011623923, -0.096501782737190713),
        (0.3, -0.7, 0.52116100486014969, -0.83091097636835162, 0.47883899513985031, 0.83091097636835162),
        (2.5, 0.5, 1.0004602414355216, 0.00023181971990980711, -0.00046024143552160713, -0.00023181971990980711),
        (3.5355339059327376, 3.5355339059327376, 0.9090969403746259, 0.066662844328953782, 0.090903059625374103, -0.066662844328953782),
        (7.0710678118654752, -7.0710678118654752, 0.94533050371617701, -0.013926504428655615, 0.054669496283822993, 0.013926504428655615),
        (-1.0, 2.0, 0.53664356577856503, -5.0491437034470347, 0.46335643422143497, 5.0491437034470347),
    ];

    fn close(a: Complex64, b: Complex64, rel: f64) -> bool {
        (a - b).norm() <= rel * b.norm().max(1e-300)
    }

    #[test]
    fn erf_matches_reference_table() {
        for &(x, y, er, ei, cr, ci) in ERF_TABLE {
            let z = Complex64::new(x, y);
            let e = erf(z);
            let c = erfc(z);
            assert!(close(e, Complex64::new(er, ei), 1e-13), "erf({z}) = {e}");
            assert!(close(c, Complex64::new(cr, ci), 1e-12), "erfc({z}) = {c}");
        }
    }

    #[test]
    fn erf_is_continuous_across_series_radius() {
        // |arg z| <= pi/4 keeps |erf'| = O(1) so the 2e-12 radial gap is negligible.
        for k in 0..=16 {
            let ang = -FRAC_PI_4 + FRAC_PI_4 * k as f64 / 8.0;
            let inner = erf(Complex64::from_polar(SERIES_RADIUS - 1e-12, ang));
            let outer = erf(Complex64::from_polar(SERIES_RADIUS + 1e-12, ang));
            assert!((inner - outer).norm() < 1e-11, "angle {ang}: {inner} vs {outer}");
        }
    }

    // Independent route: substitute tau = u^2 and integrate the smooth
    // integrand with composite Gauss-Legendre.
    fn moments_by_quadrature(a: f64, x: f64) -> (Complex64, Complex64) {
        let rule = GaussLegendre::new(20.try_into().unwrap());
        let panels = 400;
        let umax = x.sqrt();
        let w = umax / panels as f64;
        let mut p0 = Complex64::new(0.0, 0.0);
        let mut p1 = Complex64::new(0.0, 0.0);
        for p in 0..panels {
            let lo = p as f64 * w;
            for &(node, weight) in rule.as_node_weight_pairs() {
                let u = lo + 0.5 * w * (node + 1.0);
                let e = Complex64::from_polar(1.0, -a * u * u) * (weight * 0.5 * w * 2.0);
                p0 += e;
                p1 += e * u * u;
            }
        }
        (p0, p1)
    }

    #[test]
    fn moments_match_reference_values() {
        // (a, x, Re P0, Im P0, Re P1, Im P1) from adaptive mpmath quadrature.
        let table = [
            (1.0, 0.5, 1.3792650758684296, -0.23152662614970718, 0.22324173634619128, -0.069087957370469238),
            (1.0, 3.0, 1.406269419259388, -1.7839297977928093, -0.64753787497218516, -2.4178520128536246),
            (-2.0, 10.0, 1.0287126684531981, 0.81824583841662042, 1.2389317260622433, -0.38805622668067104),
            (0.3, 100.0, 1.9583026200880272, -2.2423199529717742, -36.67158739138169, 1.877877296106053),
            (5.0, 100.0, 0.55116139031899985, -0.57818540937510567, -0.99336215158246282, -1.8228146858948559),
        ];
        for (a, x, r0, i0, r1, i1) in table {
            let (p0, p1) = oscillatory_moments(a, x);
            assert!((p0 - Complex64::new(r0, i0)).norm() < 1e-12, "P0({a},{x}) = {p0}");
            assert!((p1 - Complex64::new(r1, i1)).norm() < 1e-11, "P1({a},{x}) = {p1}");
        }
    }

    #[test]
    fn moments_agree_with_quadrature_across_regimes() {
        for &a in &[0.0, 1e-6, 0.01, -0.7, 1.0, 2.0, -5.0] {
            for &x in &[1e-4, 0.01, 0.37, 1.9, 4.0, 25.0] {
                let (p0, p1) = oscillatory_moments(a, x);
                let (q0, q1) = moments_by_quadrature(a, x);
                let scale = x.sqrt().max(1.0);
                assert!((p0 - q0).norm() < 1e-12 * scale, "P0 a={a} x={x}: {p0} vs {q0}");
                assert!((p1 - q1).norm() < 1e-12 * scale * x.max(1.0), "P1 a={a} x={x}: {p1} vs {q1}");
            }
        }
    }

    #[test]
    fn zero_frequency_moments_are_powers() {
        let (p0, p1) = oscillatory_moments(0.0, 4.0);
        assert!((p0 - Complex64::new(4.0, 0.0)).norm() < 1e-14);
        assert!((p1 - Complex64::new(16.0 / 3.0, 0.0)).norm() < 1e-14);
    }
}
