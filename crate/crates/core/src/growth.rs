//! Volume growth rate `v(sigma, rho)` of the feasible set.
//!
//! With `rho = 1` the normalised log-volume `(1/n) ln Vol S_n(sigma, 1)`
//! converges to `v1(sigma)`, the log of the spectral radius of an integral
//! operator on `[0, L]`, `L = sigma + 1 - gamma`, with kernel
//!
//! ```text
//! A(x, t) = 1 / sqrt(x + 1 - t)       0 <= x < sigma,      t <= x + 1 - gamma
//! A(x, t) = 1 / sqrt(sigma + 1 - t)   sigma <= x <= L,     t <= L
//! A(x, t) = 0                          otherwise
//! ```
//!
//! Here `gamma >= 0` shaves a strip off the singular line `t = x + 1`. The
//! truncated rate `v1_gamma` satisfies
//! `v1(sigma / (1 - eta)) + ln(1 - eta) / 2 <= v1_gamma(sigma) <= v1(sigma)`
//! with `eta = gamma + 2 sqrt(sigma + 1) sqrt(gamma)`.
//!
//! Two discretisations are offered. [`NystromRule::LeftEndpoint`] is the plain
//! rule `h A(x_i, t_j)`. It converges very slowly when `gamma` is small
//! because of the `h / sqrt(gamma)` entries next to the singular line.
//! [`NystromRule::ProductIntegration`] is the default. It represents the
//! eigenfunction as piecewise linear on `[0, sigma]` plus its total mass on
//! `[sigma, L]`, where the kernel does not depend on `x`. It integrates the
//! inverse square root exactly, so it works even at `gamma = 0`.

use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)] // float math comes from std when it is linked
use num_traits::Float;
use rand::Rng;

use crate::geometry::{is_feasible, Codeword, SigmaRhoParams};
use crate::numerics::{power_iteration, SquareMatrix, ToleranceConfig};
use crate::rng::count_sharded;
use crate::{Error, Result};

/// Default truncation parameter.
pub const DEFAULT_GAMMA: f64 = 1e-6;

/// `v1(0) = ln 2`: with no battery the feasible set is the cube `[-1, 1]^n`.
pub const V1_AT_ZERO: f64 = core::f64::consts::LN_2;

/// Truncated kernel parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelSpec {
    sigma: f64,
    gamma: f64,
}

impl KernelSpec {
    pub fn new(sigma: f64, gamma: f64) -> Result<Self> {
        if !(sigma >= 0.0) || !sigma.is_finite() {
            return Err(Error::invalid("sigma", "must be finite and >= 0"));
        }
        if !(0.0..1.0).contains(&gamma) {
            return Err(Error::invalid("gamma", "must lie in [0, 1)"));
        }
        Ok(Self { sigma, gamma })
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// Right end `sigma + 1 - gamma` of the domain.
    pub fn domain_end(&self) -> f64 {
        self.sigma + 1.0 - self.gamma
    }

    /// `eta = gamma + 2 sqrt(sigma + 1) sqrt(gamma)`.
    pub fn eta(&self) -> f64 {
        truncation_eta(self.sigma, self.gamma)
    }
}

pub fn truncation_eta(sigma: f64, gamma: f64) -> f64 {
    gamma + 2.0 * (sigma + 1.0).sqrt() * gamma.sqrt()
}

/// Kernel value `A(x, t)`.
///
/// Returns `+inf` only on the singular line, which is reachable only when
/// `gamma = 0`.
pub fn kernel_eval(spec: KernelSpec, x: f64, t: f64) -> Result<f64> {
    let end = spec.domain_end();
    let slop = 1e-12 * end;
    for (what, v) in [("kernel x", x), ("kernel t", t)] {
        if !(v >= -slop && v <= end + slop) {
            return Err(Error::Domain { what, value: v });
        }
    }
    let value = if x < spec.sigma {
        if t <= x + 1.0 - spec.gamma {
            1.0 / (x + 1.0 - t).sqrt()
        } else {
            0.0
        }
    } else {
        1.0 / (spec.sigma + 1.0 - t).sqrt()
    };
    Ok(value)
}

/// Discretisation scheme for the integral operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NystromRule {
    /// `M[i][j] = h A(ih, jh)` on `n + 1` equispaced points of `[0, L]`.
    LeftEndpoint,
    /// Piecewise-linear collocation on `[0, sigma]` with exact weights, plus
    /// one unknown for the mass on `[sigma, L]`. The matrix is `(n+2)^2`
    /// (or `1 x 1` at `sigma = 0`).
    #[default]
    ProductIntegration,
}

/// A discretised operator: non-negative, finite entries.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscretizedOperator {
    pub grid_step: f64,
    pub size: usize,
    pub matrix: SquareMatrix,
    pub rule: NystromRule,
}

/// `h A(ih, jh)` for `0 <= i, j <= n`, `h = L / n`.
///
/// Needs `gamma > 0`. At `gamma = 0` the last column hits the singular line
/// and the entry is infinite.
pub fn discretize_operator(spec: KernelSpec, grid_n: usize) -> Result<DiscretizedOperator> {
    if grid_n < 8 {
        return Err(Error::invalid("grid_n", "must be at least 8"));
    }
    if spec.gamma == 0.0 {
        return Err(Error::invalid(
            "gamma",
            "the left-endpoint rule needs gamma > 0 (kernel is unbounded)",
        ));
    }
    let h = spec.domain_end() / grid_n as f64;
    let size = grid_n + 1;
    let mut matrix = SquareMatrix::zeros(size);
    for i in 0..size {
        for j in 0..size {
            matrix.set(i, j, h * kernel_eval(spec, i as f64 * h, j as f64 * h)?);
        }
    }
    Ok(DiscretizedOperator {
        grid_step: h,
        size,
        matrix,
        rule: NystromRule::LeftEndpoint,
    })
}

const GL3_NODES: [f64; 3] = [-0.774_596_669_241_483_4, 0.0, 0.774_596_669_241_483_4];
const GL3_WEIGHTS: [f64; 3] = [5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0];

/// Integrals of `(x - c)^p phi(x)` over `[a, b]` for the two hat functions
/// on the cell `[xa, xb]`, `p = -1/2` (`half = false`) or `p = 1/2`.
///
/// With `x = c + s^2` both integrands are polynomials of degree at most four
/// in `s`, so three Gauss points are exact.
fn cell_moments(a: f64, b: f64, c: f64, half: bool, xa: f64, xb: f64) -> (f64, f64) {
    let (sa, sb) = ((a - c).max(0.0).sqrt(), (b - c).sqrt());
    let (mid, rad) = (0.5 * (sa + sb), 0.5 * (sb - sa));
    let (mut left, mut right) = (0.0, 0.0);
    for (g, w) in GL3_NODES.iter().zip(GL3_WEIGHTS) {
        let s = mid + rad * g;
        let x = c + s * s;
        let jac = if half { 2.0 * s * s } else { 2.0 };
        let phi_right = (x - xa) / (xb - xa);
        left += w * rad * jac * (1.0 - phi_right);
        right += w * rad * jac * phi_right;
    }
    (left, right)
}

fn product_integration(spec: KernelSpec, grid_n: usize) -> Result<DiscretizedOperator> {
    let KernelSpec { sigma, gamma } = spec;
    let mass_self = 2.0 * (1.0 - gamma.sqrt());
    if sigma == 0.0 {
        let mut matrix = SquareMatrix::zeros(1);
        matrix.set(0, 0, mass_self);
        return Ok(DiscretizedOperator {
            grid_step: 0.0,
            size: 1,
            matrix,
            rule: NystromRule::ProductIntegration,
        });
    }
    if grid_n < 8 {
        return Err(Error::invalid("grid_n", "must be at least 8"));
    }
    let n = grid_n;
    let h = sigma / n as f64;
    let node = |k: usize| if k == n { sigma } else { k as f64 * h };
    let size = n + 2;
    let m = n + 1;
    let mut matrix = SquareMatrix::zeros(size);
    for i in 0..=n {
        let t = node(i);
        let c = t - 1.0;
        let lo = c + gamma;
        for k in 0..n {
            let (xa, xb) = (node(k), node(k + 1));
            let a = xa.max(lo);
            if a >= xb {
                continue;
            }
            let (wl, wr) = cell_moments(a, xb, c, false, xa, xb);
            matrix.add(i, k, wl);
            matrix.add(i, k + 1, wr);
        }
        matrix.set(i, m, 1.0 / (sigma + 1.0 - t).sqrt());
    }
    // Mass row: integrate the image over [sigma, L].
    let c = sigma - 1.0;
    let lo = c + gamma;
    let two_sqrt_gamma = 2.0 * gamma.sqrt();
    for k in 0..n {
        let (xa, xb) = (node(k), node(k + 1));
        let a = xa.max(lo);
        if a >= xb {
            continue;
        }
        let (wl, wr) = cell_moments(a, xb, c, true, xa, xb);
        // Integral of the hat functions themselves over [a, xb].
        let frac_a = (a - xa) / (xb - xa);
        let len = xb - a;
        let hat_right = len * 0.5 * (frac_a + 1.0);
        let hat_left = len - hat_right;
        matrix.add(m, k, (2.0 * wl - two_sqrt_gamma * hat_left).max(0.0));
        matrix.add(m, k + 1, (2.0 * wr - two_sqrt_gamma * hat_right).max(0.0));
    }
    matrix.set(m, m, mass_self);
    Ok(DiscretizedOperator {
        grid_step: h,
        size,
        matrix,
        rule: NystromRule::ProductIntegration,
    })
}

/// Build the discretised operator with the chosen rule.
pub fn discretize_with(
    spec: KernelSpec,
    grid_n: usize,
    rule: NystromRule,
) -> Result<DiscretizedOperator> {
    match rule {
        NystromRule::LeftEndpoint => discretize_operator(spec, grid_n),
        NystromRule::ProductIntegration => product_integration(spec, grid_n),
    }
}

/// Dominant eigenvalue and unit eigenvector of a discretised operator.
pub fn dominant_mode(op: &DiscretizedOperator, tol: ToleranceConfig) -> Result<(f64, Vec<f64>)> {
    power_iteration(&op.matrix, tol, 0)
}

/// Eigenvalue tolerance used inside [`spectral_growth_rate`].
pub const EIGEN_TOLERANCE: f64 = 1e-13;

/// `ln` of the dominant eigenvalue with the default rule.
///
/// `tol` bounds the power iteration; its `abs_tol` is capped at
/// [`EIGEN_TOLERANCE`] relative to the eigenvalue so that grid ladders see
/// discretisation error rather than solver error.
pub fn spectral_growth_rate(spec: KernelSpec, grid_n: usize, tol: ToleranceConfig) -> Result<f64> {
    spectral_growth_rate_with(spec, grid_n, NystromRule::default(), tol)
}

pub fn spectral_growth_rate_with(
    spec: KernelSpec,
    grid_n: usize,
    rule: NystromRule,
    tol: ToleranceConfig,
) -> Result<f64> {
    let op = discretize_with(spec, grid_n, rule)?;
    let eigen_tol = tol.with_abs_tol(tol.abs_tol.min(EIGEN_TOLERANCE));
    let (lambda, _) = dominant_mode(&op, eigen_tol)?;
    Ok(lambda.ln())
}

/// Grid ladder and rule used by [`v1`].
#[derive(Debug, Clone, PartialEq)]
pub struct GrowthConfig {
    pub ladder: Vec<usize>,
    pub rule: NystromRule,
}

impl Default for GrowthConfig {
    fn default() -> Self {
        Self {
            ladder: vec![128, 256, 512, 1024],
            rule: NystromRule::ProductIntegration,
        }
    }
}

/// Default ladder tolerance on successive `ln lambda` values.
pub const DEFAULT_LADDER_TOL: f64 = 1e-4;

/// A growth-rate estimate with its provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct GrowthRateResult {
    /// Nats per symbol.
    pub value: f64,
    pub grid_sizes_used: Vec<usize>,
    pub per_grid_values: Vec<f64>,
    pub gamma: f64,
    /// Interval for the untruncated rate implied by the truncation sandwich:
    /// `[value, value - ln(1 - eta) / 2]`. Discretisation error is not
    /// included.
    pub bracket: (f64, f64),
}

impl GrowthRateResult {
    fn shifted(mut self, delta: f64) -> Self {
        self.value += delta;
        self.per_grid_values.iter_mut().for_each(|v| *v += delta);
        self.bracket = (self.bracket.0 + delta, self.bracket.1 + delta);
        self
    }
}

/// `v1(sigma)`: growth rate at unit harvest.
pub fn v1(sigma: f64, gamma: f64, tol: ToleranceConfig) -> Result<GrowthRateResult> {
    v1_with(sigma, gamma, tol, &GrowthConfig::default())
}

/// As [`v1`], with an explicit ladder and rule. The ladder stops at the
/// first grid whose value is within `tol.abs_tol` of the previous one.
pub fn v1_with(
    sigma: f64,
    gamma: f64,
    tol: ToleranceConfig,
    config: &GrowthConfig,
) -> Result<GrowthRateResult> {
    let spec = KernelSpec::new(sigma, gamma)?;
    if sigma == 0.0 {
        return Ok(GrowthRateResult {
            value: V1_AT_ZERO,
            grid_sizes_used: Vec::new(),
            per_grid_values: Vec::new(),
            gamma,
            bracket: (V1_AT_ZERO, V1_AT_ZERO),
        });
    }
    let eta = spec.eta();
    let widen = if eta < 1.0 {
        -0.5 * (1.0 - eta).ln()
    } else {
        f64::INFINITY
    };
    if config.ladder.is_empty() {
        return Err(Error::EmptyInput("grid ladder"));
    }
    let mut sizes = Vec::new();
    let mut values: Vec<f64> = Vec::new();
    for &n in &config.ladder {
        let value = spectral_growth_rate_with(spec, n, config.rule, tol)?;
        let done = values
            .last()
            .is_some_and(|&prev| (value - prev).abs() <= tol.abs_tol);
        sizes.push(n);
        values.push(value);
        if done {
            return Ok(GrowthRateResult {
                value,
                grid_sizes_used: sizes,
                per_grid_values: values,
                gamma,
                bracket: (value, value + widen),
            });
        }
    }
    Err(Error::NoConvergence {
        routine: "v1 grid ladder",
        iterations: config.ladder.len(),
    })
}

/// `v(sigma, rho) = ln(rho) / 2 + v1(sigma / rho)`.
pub fn v(params: SigmaRhoParams, gamma: f64, tol: ToleranceConfig) -> Result<GrowthRateResult> {
    v_with(params, gamma, tol, &GrowthConfig::default())
}

pub fn v_with(
    params: SigmaRhoParams,
    gamma: f64,
    tol: ToleranceConfig,
    config: &GrowthConfig,
) -> Result<GrowthRateResult> {
    let base = v1_with(params.sigma() / params.rho(), gamma, tol, config)?;
    Ok(base.shifted(0.5 * params.rho().ln()))
}

/// Default tolerance for the growth ladder.
pub fn default_ladder_tolerance() -> ToleranceConfig {
    ToleranceConfig {
        abs_tol: DEFAULT_LADDER_TOL,
        rel_tol: 0.0,
        max_iterations: 100_000,
    }
}

/// Rejection-sampling estimate of `(1/n) ln Vol S_n(sigma, rho)`.
///
/// Points are uniform on the box `[-b, b]^n`, `b = sqrt(sigma + rho)`, which
/// contains the feasible set. Returns the estimate and its delta-method
/// standard error `sqrt((1 - p) / (N p)) / n`.
pub fn mc_log_volume(
    params: SigmaRhoParams,
    n: usize,
    samples: usize,
    seed: u64,
) -> Result<(f64, f64)> {
    if n == 0 {
        return Err(Error::invalid("n", "must be at least 1"));
    }
    if samples == 0 {
        return Err(Error::invalid("samples", "must be at least 1"));
    }
    let b = (params.sigma() + params.rho()).sqrt();
    let mut point = vec![0.0; n];
    let hits = count_sharded(samples, seed, |rng, count| {
        let mut hits = 0;
        for _ in 0..count {
            for x in point.iter_mut() {
                *x = b * (2.0 * rng.random::<f64>() - 1.0);
            }
            // The buffer is finite and non-empty, so this cannot fail.
            let cw = Codeword::new(point.clone()).expect("finite sample");
            if is_feasible(params, &cw) {
                hits += 1;
            }
        }
        hits
    });
    if hits == 0 {
        return Err(Error::ZeroHits { samples });
    }
    let p = hits as f64 / samples as f64;
    let nf = n as f64;
    let estimate = (p.ln() + nf * (2.0 * b).ln()) / nf;
    let std_error = ((1.0 - p) / (samples as f64 * p)).sqrt() / nf;
    Ok((estimate, std_error))
}

/// The truncation sandwich `(v1(sigma / (1 - eta)) + ln(1 - eta) / 2, v1(sigma))`
/// evaluated through `v1_fn`.
pub fn gamma_sandwich<F>(sigma: f64, gamma: f64, mut v1_fn: F) -> Result<(f64, f64)>
where
    F: FnMut(f64) -> Result<f64>,
{
    KernelSpec::new(sigma, gamma)?;
    let eta = truncation_eta(sigma, gamma);
    if eta >= 1.0 {
        return Err(Error::EtaTooLarge { eta });
    }
    let upper = v1_fn(sigma)?;
    let lower = if eta == 0.0 {
        upper
    } else {
        v1_fn(sigma / (1.0 - eta))? + 0.5 * (1.0 - eta).ln()
    };
    Ok((lower, upper))
}
