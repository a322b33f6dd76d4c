//! The amplitude-constrained case `sigma = 0`.
//!
//! The feasible set is the cube `[-A, A]^n`, so Steiner's formula gives the
//! volume of its parallel body exactly:
//! `Vol([-A, A]^n + B(r)) = sum_j C(n, j) (2A)^{n-j} eps_j r^j`. With
//! `r = sqrt(n nu)`, the normalised logarithm converges to
//! `ell(nu) = max_theta f(theta)` where
//! `f(theta) = H(theta) + (1 - theta) ln 2A + (theta / 2) ln(2 pi e nu / theta)`.
//! The maximiser solves `(1 - theta)^2 / theta^3 = 2 A^2 / (pi nu)`.
//!
//! The module also covers the two-point (BPSK) capacity in the high-noise
//! regime and a numerical `h(X + Z)` for checking `h(X + Z) <= ell(nu)`.

use core::f64::consts::{LN_2, PI, SQRT_2};

#[allow(unused_imports)] // float math comes from std when it is linked
use num_traits::Float;

use crate::numerics::{
    adaptive_quadrature, binary_entropy, bisection_root, log_binomial, log_sum_exp_iter,
    log_unit_ball_volume, xlogx, ToleranceConfig,
};
use crate::{Error, Result};

fn check_amplitude(a: f64) -> Result<()> {
    if !(a > 0.0) || !a.is_finite() {
        return Err(Error::invalid("amplitude", "must be finite and > 0"));
    }
    Ok(())
}

fn check_noise(nu: f64, allow_zero: bool) -> Result<()> {
    let ok = if allow_zero { nu >= 0.0 } else { nu > 0.0 };
    if !ok || !nu.is_finite() {
        return Err(Error::invalid(
            "nu",
            if allow_zero {
                "must be finite and >= 0"
            } else {
                "must be finite and > 0"
            },
        ));
    }
    Ok(())
}

/// Exponent of the `j`-th Steiner term,
/// `(1/n) ln[C(n, j) (2A)^{n-j} eps_j (n nu)^{j/2}]`.
pub fn f_nu_n(a: f64, nu: f64, n: usize, j: usize) -> Result<f64> {
    check_amplitude(a)?;
    check_noise(nu, false)?;
    if n == 0 {
        return Err(Error::invalid("n", "must be at least 1"));
    }
    if j > n {
        return Err(Error::invalid("j", "must not exceed n"));
    }
    Ok(steiner_exponent((2.0 * a).ln(), nu.ln(), n, j))
}

fn steiner_exponent(ln_2a: f64, ln_nu: f64, n: usize, j: usize) -> f64 {
    let nf = n as f64;
    let jf = j as f64;
    let rest = if j == 0 {
        0.0
    } else {
        log_binomial(n, j) + log_unit_ball_volume(j) + 0.5 * jf * (nf.ln() + ln_nu)
    };
    ((n - j) as f64 / nf) * ln_2a + rest / nf
}

/// `(1/n) ln Vol([-A, A]^n + B(sqrt(n nu)))`, exact up to rounding.
///
/// The sum is formed as `f_max + ln(sum_j exp(n (f_j - f_max))) / n`, so the
/// result lies between the largest term exponent and that plus
/// `ln(n + 1) / n`.
pub fn log_parallel_volume_cube(a: f64, nu: f64, n: usize) -> Result<f64> {
    check_amplitude(a)?;
    check_noise(nu, true)?;
    if n == 0 {
        return Err(Error::invalid("n", "must be at least 1"));
    }
    let ln_2a = (2.0 * a).ln();
    if nu == 0.0 {
        return Ok(ln_2a);
    }
    let ln_nu = nu.ln();
    let nf = n as f64;
    let exps: alloc::vec::Vec<f64> = (0..=n)
        .map(|j| steiner_exponent(ln_2a, ln_nu, n, j))
        .collect();
    let f_max = exps.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let scaled = log_sum_exp_iter(exps.iter().map(|&f| nf * (f - f_max)));
    Ok(f_max + scaled / nf)
}

/// The limit function `f(theta)`, continuous on `[0, 1]`.
pub fn f_nu(a: f64, nu: f64, theta: f64) -> Result<f64> {
    check_amplitude(a)?;
    check_noise(nu, false)?;
    if !(0.0..=1.0).contains(&theta) {
        return Err(Error::Domain {
            what: "theta",
            value: theta,
        });
    }
    Ok(limit_function((2.0 * a).ln(), nu, theta))
}

fn limit_function(ln_2a: f64, nu: f64, theta: f64) -> f64 {
    let ln_2pien = (2.0 * PI * core::f64::consts::E * nu).ln();
    binary_entropy(theta) + (1.0 - theta) * ln_2a + 0.5 * theta * ln_2pien - 0.5 * xlogx(theta)
}

/// Bracket used for the cubic.
pub const THETA_BRACKET: (f64, f64) = (1e-15, 1.0 - 1e-15);

/// Largest residual accepted for the cubic, in log form. It also bounds the
/// final bracket width, which matters for the small roots at low noise.
pub const THETA_RESIDUAL: f64 = 1e-14;

/// `2 ln(1 - theta) - 3 ln(theta) - ln(2 A^2 / (pi nu))`: the cubic in log
/// form, strictly decreasing on `(0, 1)`.
pub fn cubic_log_residual(a: f64, nu: f64, theta: f64) -> f64 {
    2.0 * (-theta).ln_1p() - 3.0 * theta.ln() - (2.0 * a * a / (PI * nu)).ln()
}

/// Root of `(1 - theta)^2 / theta^3 = 2 A^2 / (pi nu)` in `(0, 1)`.
///
/// Solved by bisection on the log form, whose residual is scale-free; the
/// plain ratio reaches `1e9` for small `nu`.
pub fn theta_star(a: f64, nu: f64, tol: ToleranceConfig) -> Result<f64> {
    check_amplitude(a)?;
    check_noise(nu, false)?;
    let tol = tol.with_abs_tol(tol.abs_tol.min(THETA_RESIDUAL));
    let tol = ToleranceConfig {
        max_iterations: tol.max_iterations.max(200),
        ..tol
    };
    bisection_root(
        |t| cubic_log_residual(a, nu, t),
        THETA_BRACKET.0,
        THETA_BRACKET.1,
        tol,
    )
}

/// `theta*` and `ell(nu)` for the cube of half-width `A`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CubeEllResult {
    pub amplitude: f64,
    pub noise_power: f64,
    pub theta_star: f64,
    pub ell: f64,
}

pub fn ell_cube(a: f64, nu: f64, tol: ToleranceConfig) -> Result<CubeEllResult> {
    check_amplitude(a)?;
    check_noise(nu, true)?;
    let ln_2a = (2.0 * a).ln();
    if nu == 0.0 {
        return Ok(CubeEllResult {
            amplitude: a,
            noise_power: nu,
            theta_star: 0.0,
            ell: ln_2a,
        });
    }
    let theta = theta_star(a, nu, tol)?;
    Ok(CubeEllResult {
        amplitude: a,
        noise_power: nu,
        theta_star: theta,
        ell: limit_function(ln_2a, nu, theta).max(ln_2a),
    })
}

/// `c = (pi / (2 A^2))^{1/3}`.
pub fn low_noise_coefficient(a: f64) -> f64 {
    (PI / (2.0 * a * a)).cbrt()
}

/// `ln 2A - ln(2 pi e nu) / 2 + (3c / 2) nu^{1/3}`.
pub fn low_noise_expansion(a: f64, nu: f64) -> Result<f64> {
    check_amplitude(a)?;
    check_noise(nu, false)?;
    let ln_2pien = (2.0 * PI * core::f64::consts::E * nu).ln();
    Ok((2.0 * a).ln() - 0.5 * ln_2pien + 1.5 * low_noise_coefficient(a) * nu.cbrt())
}

/// `alpha^2/2 - alpha^4/4 + alpha^6/6 - 5 alpha^8/24`.
pub fn high_noise_series(alpha: f64) -> f64 {
    let a2 = alpha * alpha;
    a2 * (0.5 + a2 * (-0.25 + a2 * (1.0 / 6.0 - a2 * 5.0 / 24.0)))
}

/// `ln cosh y` without overflow or cancellation.
pub fn ln_cosh(y: f64) -> f64 {
    let y = y.abs();
    if y < 1.0 {
        let s = (0.5 * y).sinh();
        (2.0 * s * s).ln_1p()
    } else {
        y - LN_2 + (-2.0 * y).exp().ln_1p()
    }
}

/// Upper limit used for the BPSK integral.
pub fn bpsk_truncation(alpha: f64) -> f64 {
    (12.0 * alpha * alpha + 40.0).max(40.0)
}

/// Capacity of equiprobable `+-A` inputs in Gaussian noise of power `nu`:
/// `alpha^2 - (2 / (sqrt(2 pi) alpha)) e^{-alpha^2/2}
///  int_0^inf e^{-y^2 / (2 alpha^2)} cosh(y) ln cosh(y) dy`, `alpha = A / sqrt(nu)`.
///
/// The integral is cut at [`bpsk_truncation`]. The prefactor is folded into
/// the integrand as `exp(-(y -+ alpha^2)^2 / (2 alpha^2))`, which never
/// overflows.
pub fn bpsk_high_noise_capacity(a: f64, nu: f64, tol: ToleranceConfig) -> Result<f64> {
    check_amplitude(a)?;
    check_noise(nu, false)?;
    let alpha = a / nu.sqrt();
    let two_a2 = 2.0 * alpha * alpha;
    let norm = 1.0 / ((2.0 * PI).sqrt() * alpha);
    let integrand = |y: f64| {
        let up = (-(y - alpha * alpha).powi(2) / two_a2).exp();
        let down = (-(y + alpha * alpha).powi(2) / two_a2).exp();
        norm * (up + down) * ln_cosh(y)
    };
    let tight = ToleranceConfig {
        abs_tol: tol.abs_tol.min(1e-15),
        rel_tol: tol.rel_tol.min(1e-13),
        max_iterations: tol.max_iterations.max(2000),
    };
    let ymax = bpsk_truncation(alpha);
    // Split at the peak so the adaptive rule sees it early.
    let peak = (alpha * alpha).clamp(0.0, ymax);
    let mut integral = 0.0;
    for (lo, hi) in [(0.0, peak), (peak, ymax)] {
        if hi > lo {
            integral += adaptive_quadrature(integrand, lo, hi, tight)?;
        }
    }
    Ok(alpha * alpha - integral)
}

/// Input and noise laws for [`entropy_of_sum`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DensitySpec {
    Uniform { half_width: f64 },
    TwoPoint { amplitude: f64 },
    Gaussian { variance: f64 },
}

/// `h(X + Z)` with the amplitude and noise power it should be compared at.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntropyResult {
    /// Nats.
    pub entropy: f64,
    pub amplitude: f64,
    pub noise_power: f64,
}

/// Truncation of the output support, in noise standard deviations.
pub const SUPPORT_SIGMAS: f64 = 8.0;

/// `Phi(u) - Phi(v)` for `u >= v`, accurate in both tails.
fn normal_mass(u: f64, v: f64) -> f64 {
    if v > 0.0 {
        0.5 * (libm::erfc(v / SQRT_2) - libm::erfc(u / SQRT_2))
    } else if u < 0.0 {
        0.5 * (libm::erfc(-u / SQRT_2) - libm::erfc(-v / SQRT_2))
    } else {
        0.5 * (libm::erf(u / SQRT_2) - libm::erf(v / SQRT_2))
    }
}

/// Differential entropy of `X + Z` for bounded `X` and Gaussian `Z`.
///
/// The output density is the exact convolution (an `erfc` difference for a
/// uniform input, a two-component mixture for a two-point input). `-p ln p`
/// is then integrated adaptively over `[-(A + 8 sqrt(nu)), A + 8 sqrt(nu)]`,
/// split at `+-A`. At `nu = 0` the entropy of `X` itself is returned.
pub fn entropy_of_sum(
    x_spec: DensitySpec,
    z_spec: DensitySpec,
    tol: ToleranceConfig,
) -> Result<EntropyResult> {
    let nu = match z_spec {
        DensitySpec::Gaussian { variance } => variance,
        _ => return Err(Error::UnsupportedKind("noise must be Gaussian")),
    };
    check_noise(nu, true)?;
    let (amplitude, uniform) = match x_spec {
        DensitySpec::Uniform { half_width } => (half_width, true),
        DensitySpec::TwoPoint { amplitude } => (amplitude, false),
        DensitySpec::Gaussian { .. } => {
            return Err(Error::UnsupportedKind("input must be amplitude-bounded"))
        }
    };
    if !(amplitude >= 0.0) || !amplitude.is_finite() {
        return Err(Error::invalid("amplitude", "must be finite and >= 0"));
    }
    let result = |entropy| EntropyResult {
        entropy,
        amplitude,
        noise_power: nu,
    };
    if nu == 0.0 {
        let h = if uniform && amplitude > 0.0 {
            (2.0 * amplitude).ln()
        } else {
            f64::NEG_INFINITY
        };
        return Ok(result(h));
    }
    let s = nu.sqrt();
    let a = amplitude;
    let ln_norm = -0.5 * (2.0 * PI * nu).ln();
    // A zero-width uniform is a point mass, the same as a two-point law at 0.
    let uniform = uniform && a > 0.0;
    let neg_p_ln_p = |y: f64| {
        let ln_p = if uniform {
            let mass = normal_mass((y + a) / s, (y - a) / s);
            if mass <= 0.0 {
                return 0.0;
            }
            mass.ln() - (2.0 * a).ln()
        } else {
            let l1 = ln_norm - (y - a).powi(2) / (2.0 * nu);
            let l2 = ln_norm - (y + a).powi(2) / (2.0 * nu);
            let hi = l1.max(l2);
            hi + (-(l1 - l2).abs()).exp().ln_1p() - LN_2
        };
        let p = ln_p.exp();
        -p * ln_p
    };
    let q = ToleranceConfig {
        abs_tol: tol.abs_tol.min(1e-11),
        rel_tol: tol.rel_tol.min(1e-11),
        max_iterations: tol.max_iterations.max(5000),
    };
    let edge = a + SUPPORT_SIGMAS * s;
    // The density is even, so integrate y >= 0 and double.
    let mut half = 0.0;
    for (lo, hi) in [(0.0, a), (a, edge)] {
        if hi > lo {
            half += adaptive_quadrature(neg_p_ln_p, lo, hi, q)?;
        }
    }
    Ok(result(2.0 * half))
}
