//! Sub-convolutive intrinsic-volume sequences and their rate function.
//!
//! A family `mu_n(0..=n)`, `n = 1..=N`, is sub-convolutive when
//! `mu_m * mu_n >= mu_{m+n}` pointwise. Then `g_n(t) = (1/n) ln sum_j mu_n(j) e^{jt}`
//! decreases to a convex limit `Lambda(t)` with
//! `max(beta, t + alpha) <= Lambda(t) <= g_1(t)`, where
//! `alpha = inf (1/n) ln mu_n(n)` and `beta = inf (1/n) ln mu_n(0)`. The
//! conjugate `Lambda*` lives on `[0, 1]` and determines
//! `ell(nu) = sup_theta [-Lambda*(1 - theta) + (theta / 2) ln(2 pi e nu / theta)]`.
//!
//! All sequences are stored as logarithms. `-inf` stands for a zero entry.

use alloc::vec::Vec;

#[allow(unused_imports)] // float math comes from std when it is linked
use num_traits::Float;

use crate::numerics::{golden_section_max, log_binomial, log_sum_exp_iter, xlogx, ToleranceConfig};
use crate::{Error, Result};

/// `log mu_n(j)` for `n = 1..=n_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct IntrinsicVolumeSequence {
    log_mu: Vec<Vec<f64>>,
}

impl IntrinsicVolumeSequence {
    /// Row `k` (0-based) must have length `k + 2`. Entries may be `-inf` but
    /// not NaN or `+inf`, and the first and last entry of every row must be
    /// finite.
    pub fn new(log_mu: Vec<Vec<f64>>) -> Result<Self> {
        if log_mu.is_empty() {
            return Err(Error::EmptyInput("intrinsic volume sequence"));
        }
        for (k, row) in log_mu.iter().enumerate() {
            let n = k + 1;
            if row.len() != n + 1 {
                return Err(Error::invalid(
                    "log_mu",
                    alloc::format!(
                        "row for n = {n} has length {}, expected {}",
                        row.len(),
                        n + 1
                    ),
                ));
            }
            if let Some(&bad) = row.iter().find(|v| v.is_nan() || **v == f64::INFINITY) {
                return Err(Error::Domain {
                    what: "log_mu entry",
                    value: bad,
                });
            }
            if !row[0].is_finite() || !row[n].is_finite() {
                return Err(Error::invalid(
                    "log_mu",
                    alloc::format!("mu_{n}(0) and mu_{n}({n}) must be positive"),
                ));
            }
        }
        Ok(Self { log_mu })
    }

    pub fn n_max(&self) -> usize {
        self.log_mu.len()
    }

    /// `log mu_n(0..=n)`.
    pub fn row(&self, n: usize) -> Result<&[f64]> {
        if n == 0 || n > self.n_max() {
            return Err(Error::invalid("n", "must lie in 1..=n_max"));
        }
        Ok(&self.log_mu[n - 1])
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.log_mu
    }

    /// `((1/N) ln mu_N(N), (1/N) ln mu_N(0))` at `N = n_max`: the surrogates
    /// for `alpha` and `beta` used throughout.
    pub fn alpha_beta_hat(&self) -> (f64, f64) {
        row_alpha_beta(&self.log_mu[self.n_max() - 1])
    }
}

fn row_alpha_beta(row: &[f64]) -> (f64, f64) {
    let n = row.len() - 1;
    let nf = n as f64;
    (row[n] / nf, row[0] / nf)
}

/// Intrinsic volumes of the cube `[-A, A]^n`: `mu_n(j) = C(n, j) (2A)^j`.
pub fn cube_intrinsic_sequence(a: f64, n_max: usize) -> Result<IntrinsicVolumeSequence> {
    if !(a > 0.0) || !a.is_finite() {
        return Err(Error::invalid("amplitude", "must be finite and > 0"));
    }
    if n_max == 0 {
        return Err(Error::invalid("n_max", "must be at least 1"));
    }
    let ln_2a = (2.0 * a).ln();
    let rows = (1..=n_max)
        .map(|n| {
            (0..=n)
                .map(|j| log_binomial(n, j) + j as f64 * ln_2a)
                .collect()
        })
        .collect();
    IntrinsicVolumeSequence::new(rows)
}

/// `mu_n(j) = 1` for `j` in `{0, n}` and `0` otherwise, whose limit is
/// `Lambda(t) = max(0, t)`.
pub fn degenerate_sequence(n_max: usize) -> Result<IntrinsicVolumeSequence> {
    if n_max == 0 {
        return Err(Error::invalid("n_max", "must be at least 1"));
    }
    let rows = (1..=n_max)
        .map(|n| {
            let mut row = alloc::vec![f64::NEG_INFINITY; n + 1];
            row[0] = 0.0;
            row[n] = 0.0;
            row
        })
        .collect();
    IntrinsicVolumeSequence::new(rows)
}

/// Relative slack for the convolution inequality.
pub const SUBCONV_SLACK: f64 = 1e-10;

/// `(mu_m * mu_n)(i) >= mu_{m+n}(i) (1 - 1e-10)` for every `i`.
pub fn check_subconvolutive(seq: &IntrinsicVolumeSequence, m: usize, n: usize) -> Result<bool> {
    if m == 0 || n == 0 || m + n > seq.n_max() {
        return Err(Error::invalid(
            "(m, n)",
            "need m, n >= 1 and m + n <= n_max",
        ));
    }
    let (rm, rn, target) = (seq.row(m)?, seq.row(n)?, seq.row(m + n)?);
    let slack = (-SUBCONV_SLACK).ln_1p();
    for (i, &want) in target.iter().enumerate() {
        if want == f64::NEG_INFINITY {
            continue;
        }
        let lo = i.saturating_sub(n);
        let hi = i.min(m);
        let conv = log_sum_exp_iter((lo..=hi).map(|k| rm[k] + rn[i - k]));
        if conv < want + slack {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Log-domain tolerance for the Alexandrov-Fenchel check.
pub const AF_SLACK: f64 = 1e-10;

/// `mu_n(j)^2 >= ((j + 1) / j) mu_n(j - 1) mu_n(j + 1)` for `1 <= j < n`.
pub fn check_alexandrov_fenchel(seq: &IntrinsicVolumeSequence, n: usize) -> Result<bool> {
    if n < 2 {
        return Err(Error::invalid("n", "must be at least 2"));
    }
    let row = seq.row(n)?;
    for j in 1..n {
        let rhs = ((j + 1) as f64 / j as f64).ln() + row[j - 1] + row[j + 1];
        if rhs == f64::NEG_INFINITY {
            continue;
        }
        if 2.0 * row[j] < rhs - AF_SLACK {
            return Ok(false);
        }
    }
    Ok(true)
}

fn g_row(row: &[f64], t: f64) -> f64 {
    let n = row.len() - 1;
    log_sum_exp_iter(row.iter().enumerate().map(|(j, &l)| l + j as f64 * t)) / n as f64
}

/// `g_n(t) = (1/n) ln sum_j mu_n(j) e^{jt}`.
pub fn g_n_eval(seq: &IntrinsicVolumeSequence, n: usize, t: f64) -> Result<f64> {
    if t.is_nan() {
        return Err(Error::Domain {
            what: "t",
            value: t,
        });
    }
    Ok(g_row(seq.row(n)?, t))
}

/// Search interval `[(beta - g1_0) / x, (g1_0 - alpha) / (1 - x)]` for the
/// maximiser of `x t - g(t)`.
pub fn conjugate_search_interval(x: f64, alpha: f64, beta: f64, g1_at_0: f64) -> (f64, f64) {
    ((beta - g1_at_0) / x, (g1_at_0 - alpha) / (1.0 - x))
}

/// `g*(x) = sup_t [x t - g(t)]` for a convex `g` with
/// `max(beta, t + alpha) <= g(t)` and `g(0) <= g1_at_0`.
///
/// At `x = 0` and `x = 1` the supremum is approached as `t -> -inf` and
/// `t -> +inf`; the limits `-beta` and `-alpha` are returned directly.
pub fn conjugate_on_interval<G>(
    mut g: G,
    x: f64,
    alpha: f64,
    beta: f64,
    g1_at_0: f64,
    tol: ToleranceConfig,
) -> Result<f64>
where
    G: FnMut(f64) -> f64,
{
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::Domain {
            what: "conjugate argument",
            value: x,
        });
    }
    if x == 0.0 {
        return Ok(-beta);
    }
    if x == 1.0 {
        return Ok(-alpha);
    }
    let (lo, hi) = conjugate_search_interval(x, alpha, beta, g1_at_0);
    if !(lo <= hi) {
        return Err(Error::DegenerateInterval { lo, hi });
    }
    let (_, value) = golden_section_max(|t| x * t - g(t), lo, hi, tol)?;
    Ok(value)
}

/// Where a [`ConjugateFunction`] came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    /// `g_n*` for the stated `n`.
    FiniteConjugate {
        n: usize,
    },
    /// `g_N*` at `N = n_max`, standing in for `Lambda*`; `alpha` and `beta`
    /// are the values at `n_max`, not the infimum over `n`.
    LambdaStarEstimate {
        n_max: usize,
    },
    ClosedForm,
}

/// A convex function on `[0, 1]`, sampled on a grid and interpolated
/// linearly.
#[derive(Debug, Clone, PartialEq)]
pub struct ConjugateFunction {
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
    pub provenance: Provenance,
    /// Bound on `interpolant - function`: twice the largest gap between the
    /// chord and the function at a cell midpoint.
    pub interp_error: f64,
    /// Search interval used at each interior grid point (`None` at the ends).
    pub search_intervals: Vec<Option<(f64, f64)>>,
}

/// Smallest grid accepted by the conjugate estimators.
pub const MIN_GRID_POINTS: usize = 16;

fn uniform_grid(points: usize) -> Vec<f64> {
    let last = (points - 1) as f64;
    (0..points).map(|i| i as f64 / last).collect()
}

fn midpoint_error(grid: &[f64], values: &[f64], mids: &[f64]) -> f64 {
    let worst = grid
        .windows(2)
        .zip(values.windows(2))
        .zip(mids)
        .map(|((_, v), &m)| 0.5 * (v[0] + v[1]) - m)
        .fold(0.0f64, f64::max);
    2.0 * worst
}

impl ConjugateFunction {
    /// Sample `f` on a uniform grid of `points` nodes.
    pub fn from_fn<F>(points: usize, provenance: Provenance, mut f: F) -> Result<Self>
    where
        F: FnMut(f64) -> f64,
    {
        if points < 2 {
            return Err(Error::invalid("grid points", "need at least 2"));
        }
        let grid = uniform_grid(points);
        let values: Vec<f64> = grid.iter().map(|&x| f(x)).collect();
        let mids: Vec<f64> = grid.windows(2).map(|w| f(0.5 * (w[0] + w[1]))).collect();
        let interp_error = midpoint_error(&grid, &values, &mids);
        Ok(Self {
            search_intervals: alloc::vec![None; grid.len()],
            grid,
            values,
            provenance,
            interp_error,
        })
    }

    /// Linear interpolation; `+inf` outside `[0, 1]`.
    pub fn eval(&self, x: f64) -> f64 {
        let (first, last) = (self.grid[0], self.grid[self.grid.len() - 1]);
        if !(x >= first && x <= last) {
            return f64::INFINITY;
        }
        let k = self
            .grid
            .partition_point(|&g| g <= x)
            .clamp(1, self.grid.len() - 1);
        let (x0, x1) = (self.grid[k - 1], self.grid[k]);
        let (v0, v1) = (self.values[k - 1], self.values[k]);
        if x1 == x0 {
            return v0;
        }
        let w = (x - x0) / (x1 - x0);
        v0 + w * (v1 - v0)
    }

    /// Divided second differences all `>= -tol`.
    pub fn is_convex(&self, tol: f64) -> bool {
        let slopes: Vec<f64> = self
            .grid
            .windows(2)
            .zip(self.values.windows(2))
            .map(|(g, v)| (v[1] - v[0]) / (g[1] - g[0]))
            .collect();
        slopes.windows(2).all(|s| s[1] - s[0] >= -tol)
    }

    /// Minimum of the interpolant over `[a, b]`.
    pub fn min_on(&self, a: f64, b: f64) -> f64 {
        let mut best = self.eval(a).min(self.eval(b));
        for (&x, &v) in self.grid.iter().zip(&self.values) {
            if x > a && x < b {
                best = best.min(v);
            }
        }
        best
    }

    /// `sup_x [t x - f(x)]` of the interpolant: attained at a grid node.
    pub fn conjugate_at(&self, t: f64) -> f64 {
        self.grid
            .iter()
            .zip(&self.values)
            .map(|(&x, &v)| t * x - v)
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// `Lambda*` of the cube in closed form,
/// `x ln x + (1 - x) ln(1 - x) - x ln 2A`.
pub fn cube_lambda_star(a: f64, points: usize) -> Result<ConjugateFunction> {
    if !(a > 0.0) || !a.is_finite() {
        return Err(Error::invalid("amplitude", "must be finite and > 0"));
    }
    let ln_2a = (2.0 * a).ln();
    ConjugateFunction::from_fn(points, Provenance::ClosedForm, |x| {
        xlogx(x) + xlogx(1.0 - x) - x * ln_2a
    })
}

/// `g_n*` on a uniform grid of `grid_points` nodes.
pub fn finite_conjugate(
    seq: &IntrinsicVolumeSequence,
    n: usize,
    grid_points: usize,
    tol: ToleranceConfig,
) -> Result<ConjugateFunction> {
    if grid_points < MIN_GRID_POINTS {
        return Err(Error::invalid("grid_points", "must be at least 16"));
    }
    let row = seq.row(n)?;
    let (alpha, beta) = row_alpha_beta(row);
    // The bracket needs an upper bound on g_n(0). Sub-additivity gives
    // g_1(0); taking the max keeps the bracket valid for any input.
    let g1_at_0 = g_row(seq.row(1)?, 0.0).max(g_row(row, 0.0));
    let conj = |x: f64| conjugate_on_interval(|t| g_row(row, t), x, alpha, beta, g1_at_0, tol);
    let grid = uniform_grid(grid_points);
    let mut values = Vec::with_capacity(grid_points);
    let mut search_intervals = Vec::with_capacity(grid_points);
    for &x in &grid {
        values.push(conj(x)?);
        search_intervals.push(if x > 0.0 && x < 1.0 {
            Some(conjugate_search_interval(x, alpha, beta, g1_at_0))
        } else {
            None
        });
    }
    let mut mids = Vec::with_capacity(grid_points - 1);
    for w in grid.windows(2) {
        mids.push(conj(0.5 * (w[0] + w[1]))?);
    }
    let interp_error = midpoint_error(&grid, &values, &mids);
    Ok(ConjugateFunction {
        grid,
        values,
        provenance: Provenance::FiniteConjugate { n },
        interp_error,
        search_intervals,
    })
}

/// `g_N*` at `N = n_max`, used as the estimate of `Lambda*`.
pub fn lambda_star_estimate(
    seq: &IntrinsicVolumeSequence,
    grid_points: usize,
    tol: ToleranceConfig,
) -> Result<ConjugateFunction> {
    let n_max = seq.n_max();
    let mut f = finite_conjugate(seq, n_max, grid_points, tol)?;
    f.provenance = Provenance::LambdaStarEstimate { n_max };
    Ok(f)
}

/// Slack for the sandwich check.
pub const SANDWICH_SLACK: f64 = 1e-9;

/// `max(beta, t + alpha) <= g_N(t) <= g_1(t)` on `t_grid`, up to `1e-9`, with
/// `alpha`, `beta` taken at `N = n_max`.
pub fn lambda_sandwich_check(seq: &IntrinsicVolumeSequence, t_grid: &[f64]) -> Result<bool> {
    if seq.n_max() < 2 {
        return Err(Error::invalid("n_max", "must be at least 2"));
    }
    let (alpha, beta) = seq.alpha_beta_hat();
    let top = seq.row(seq.n_max())?;
    let first = seq.row(1)?;
    for &t in t_grid {
        let g_top = g_row(top, t);
        let lower = beta.max(t + alpha);
        if lower - SANDWICH_SLACK > g_top || g_top > g_row(first, t) + SANDWICH_SLACK {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Outcome of [`ldp_upper_check`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LdpCheck {
    /// `(1/n) ln sum { mu_n(j) : j/n in [a, b] }`.
    pub lhs: f64,
    /// `-min over [a, b]` of the interpolated rate function.
    pub rhs: f64,
    /// `ln(n + 1) / n` plus the interpolation error bound.
    pub slack: f64,
    pub ok: bool,
}

/// Large-deviation upper bound on `[a, b]` at dimension `n`.
pub fn ldp_upper_check(
    seq: &IntrinsicVolumeSequence,
    interval: (f64, f64),
    n: usize,
    lambda_star: &ConjugateFunction,
) -> Result<LdpCheck> {
    let (a, b) = interval;
    if !(a <= b) || a < 0.0 || b > 1.0 {
        return Err(Error::DegenerateInterval { lo: a, hi: b });
    }
    let row = seq.row(n)?;
    let nf = n as f64;
    // A hair of slack so that j/n sitting exactly on an end is included.
    let eps = 1e-12 * nf;
    let lhs = log_sum_exp_iter(
        row.iter()
            .enumerate()
            .filter(|(j, _)| {
                let j = *j as f64;
                j >= a * nf - eps && j <= b * nf + eps
            })
            .map(|(_, &l)| l),
    ) / nf;
    let rhs = -lambda_star.min_on(a, b);
    let slack = (nf + 1.0).ln() / nf + lambda_star.interp_error;
    Ok(LdpCheck {
        lhs,
        rhs,
        slack,
        ok: lhs <= rhs + slack,
    })
}

/// `ell(nu)` and its maximiser from a rate function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EllGeneral {
    pub ell: f64,
    pub theta_star: f64,
}

/// `sup_theta [-Lambda*(1 - theta) + (theta / 2) ln(2 pi e nu / theta)]`.
pub fn ell_general(
    lambda_star: &ConjugateFunction,
    nu: f64,
    tol: ToleranceConfig,
) -> Result<EllGeneral> {
    if !(nu > 0.0) || !nu.is_finite() {
        return Err(Error::invalid("nu", "must be finite and > 0"));
    }
    let ln_2pien = (2.0 * core::f64::consts::PI * core::f64::consts::E * nu).ln();
    let objective =
        |theta: f64| -lambda_star.eval(1.0 - theta) + 0.5 * theta * ln_2pien - 0.5 * xlogx(theta);
    let (theta_star, ell) = golden_section_max(objective, 0.0, 1.0, tol)?;
    Ok(EllGeneral { ell, theta_star })
}
