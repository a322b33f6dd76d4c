//! Special functions and small numerical kernels shared by the other modules.
//!
//! Everything here works in natural logarithms. `f64::NEG_INFINITY` is a
//! regular value meaning `log 0`; it flows through [`log_sum_exp`] and the
//! conjugation code without special casing at the call sites.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

#[allow(unused_imports)] // float math comes from std when it is linked
use num_traits::Float;
use rand::{Rng, SeedableRng};

use crate::{Error, Result};

/// Stopping rule shared by the iterative routines.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ToleranceConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_iterations: usize,
}

impl ToleranceConfig {
    pub fn new(abs_tol: f64, rel_tol: f64, max_iterations: usize) -> Result<Self> {
        if !(abs_tol > 0.0) || !abs_tol.is_finite() {
            return Err(Error::invalid("abs_tol", "must be positive and finite"));
        }
        if !(rel_tol >= 0.0) || !rel_tol.is_finite() {
            return Err(Error::invalid("rel_tol", "must be non-negative and finite"));
        }
        if max_iterations == 0 {
            return Err(Error::invalid("max_iterations", "must be at least 1"));
        }
        Ok(Self {
            abs_tol,
            rel_tol,
            max_iterations,
        })
    }

    /// Same iteration budget, different absolute tolerance.
    pub fn with_abs_tol(self, abs_tol: f64) -> Self {
        Self { abs_tol, ..self }
    }
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        Self {
            abs_tol: 1e-10,
            rel_tol: 1e-10,
            max_iterations: 10_000,
        }
    }
}

const HALF_LN_2PI: f64 = 0.918_938_533_204_672_8;

/// `ln Gamma(x)` for `x > 0`.
///
/// Arguments below 15 are shifted up with the recurrence
/// `Gamma(x) = Gamma(x + k) / (x (x+1) ... (x+k-1))`, after which the Stirling
/// series with five correction terms is accurate to a few ulps.
pub fn log_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain {
            what: "log_gamma",
            value: x,
        });
    }
    if x == 1.0 || x == 2.0 {
        return Ok(0.0);
    }
    let mut z = x;
    let mut shift = 1.0;
    while z < 15.0 {
        shift *= z;
        z += 1.0;
    }
    let inv = 1.0 / z;
    let inv2 = inv * inv;
    let series = inv
        * (1.0 / 12.0
            - inv2
                * (1.0 / 360.0
                    - inv2 * (1.0 / 1260.0 - inv2 * (1.0 / 1680.0 - inv2 * (1.0 / 1188.0)))));
    Ok((z - 0.5) * z.ln() - z + HALF_LN_2PI + series - shift.ln())
}

pub(crate) fn ln_gamma_unchecked(x: f64) -> f64 {
    log_gamma(x).unwrap_or(f64::NAN)
}

/// `ln C(n, k)` through log-gamma.
pub fn log_binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return f64::NEG_INFINITY;
    }
    ln_gamma_unchecked(n as f64 + 1.0)
        - ln_gamma_unchecked(k as f64 + 1.0)
        - ln_gamma_unchecked((n - k) as f64 + 1.0)
}

/// Log-volume of the unit ball in `j` dimensions, `ln(pi^{j/2} / Gamma(j/2 + 1))`.
pub fn log_unit_ball_volume(j: usize) -> f64 {
    let half = j as f64 / 2.0;
    half * PI.ln() - ln_gamma_unchecked(half + 1.0)
}

/// `ln sum exp(v_i)`, shifted by the maximum.
pub fn log_sum_exp(values: &[f64]) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::EmptyInput("log_sum_exp input"));
    }
    Ok(log_sum_exp_unchecked(values))
}

pub(crate) fn log_sum_exp_unchecked(values: &[f64]) -> f64 {
    let m = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !m.is_finite() {
        return m;
    }
    let s: f64 = values.iter().map(|&v| (v - m).exp()).sum();
    m + s.ln()
}

/// Single-pass log-sum-exp over an iterator; returns `-inf` when empty.
pub fn log_sum_exp_iter<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut m = f64::NEG_INFINITY;
    let mut s = 0.0;
    for v in values {
        if v == f64::NEG_INFINITY {
            continue;
        }
        if v > m {
            s = s * (m - v).exp() + 1.0;
            m = v;
        } else {
            s += (v - m).exp();
        }
    }
    if m == f64::NEG_INFINITY {
        m
    } else {
        m + s.ln()
    }
}

/// `ln(1 + e^z)` without overflow.
pub fn softplus(z: f64) -> f64 {
    if z > 0.0 {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    }
}

/// Binary entropy in nats, continuously extended to the endpoints.
pub fn binary_entropy(p: f64) -> f64 {
    -xlogx(p) - xlogx(1.0 - p)
}

/// `x ln x` with the limit value 0 at `x = 0`.
pub fn xlogx(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x * x.ln()
    }
}

/// Root of a continuous monotone function by bisection.
///
/// Stops when `|f(mid)| <= abs_tol` or the bracket is narrower than
/// `abs_tol`.
pub fn bisection_root<F>(mut f: F, lo: f64, hi: f64, tol: ToleranceConfig) -> Result<f64>
where
    F: FnMut(f64) -> f64,
{
    let (mut lo, mut hi) = if lo <= hi { (lo, hi) } else { (hi, lo) };
    let mut f_lo = f(lo);
    let f_hi = f(hi);
    if f_lo == 0.0 {
        return Ok(lo);
    }
    if f_hi == 0.0 {
        return Ok(hi);
    }
    if f_lo.is_nan() || f_hi.is_nan() || f_lo.signum() == f_hi.signum() {
        return Err(Error::NoSignChange { lo, hi });
    }
    for _ in 0..tol.max_iterations {
        let mid = lo + 0.5 * (hi - lo);
        let f_mid = f(mid);
        if f_mid.abs() <= tol.abs_tol || hi - lo <= tol.abs_tol || mid <= lo || mid >= hi {
            return Ok(mid);
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    Err(Error::NoConvergence {
        routine: "bisection_root",
        iterations: tol.max_iterations,
    })
}

fn nan_low(v: f64) -> f64 {
    if v.is_nan() {
        f64::NEG_INFINITY
    } else {
        v
    }
}

/// Maximise a unimodal function on `[lo, hi]` by golden-section search.
///
/// The endpoints are evaluated too, so a maximum sitting on the boundary is
/// returned exactly. NaN values are treated as `-inf`.
pub fn golden_section_max<F>(mut f: F, lo: f64, hi: f64, tol: ToleranceConfig) -> Result<(f64, f64)>
where
    F: FnMut(f64) -> f64,
{
    if !(lo <= hi) {
        return Err(Error::DegenerateInterval { lo, hi });
    }
    let inv_phi = (5.0_f64.sqrt() - 1.0) / 2.0;
    let mut best = (lo, nan_low(f(lo)));
    let f_hi = nan_low(f(hi));
    if f_hi > best.1 {
        best = (hi, f_hi);
    }
    if hi - lo <= tol.abs_tol {
        return Ok(best);
    }
    let (mut a, mut b) = (lo, hi);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = nan_low(f(c));
    let mut fd = nan_low(f(d));
    let mut converged = false;
    for _ in 0..tol.max_iterations {
        if b - a <= tol.abs_tol + tol.rel_tol * c.abs() {
            converged = true;
            break;
        }
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = nan_low(f(c));
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = nan_low(f(d));
        }
    }
    if !converged {
        return Err(Error::NoConvergence {
            routine: "golden_section_max",
            iterations: tol.max_iterations,
        });
    }
    for cand in [(c, fc), (d, fd)] {
        if cand.1 > best.1 {
            best = cand;
        }
    }
    Ok(best)
}

// Gauss-Kronrod 7/15 abscissae and weights on [-1, 1].
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gauss_kronrod<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64) {
    let centre = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(centre);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for k in 0..7 {
        let dx = half * XGK[k];
        let pair = f(centre - dx) + f(centre + dx);
        kronrod += WGK[k] * pair;
        if k % 2 == 1 {
            gauss += WG[k / 2] * pair;
        }
    }
    (kronrod * half, ((kronrod - gauss) * half).abs())
}

struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

/// Globally adaptive Gauss-Kronrod (7/15) quadrature on `[a, b]`.
///
/// The segment with the largest error estimate is bisected until the summed
/// estimate drops below `max(abs_tol, rel_tol * |integral|)`. Each bisection
/// counts as one iteration.
pub fn adaptive_quadrature<F>(mut f: F, a: f64, b: f64, tol: ToleranceConfig) -> Result<f64>
where
    F: FnMut(f64) -> f64,
{
    if !(a < b) || !a.is_finite() || !b.is_finite() {
        if a == b {
            return Ok(0.0);
        }
        return Err(Error::invalid("quadrature limits", "need finite a < b"));
    }
    let (value, error) = gauss_kronrod(&mut f, a, b);
    let mut segments = vec![Segment { a, b, value, error }];
    for _ in 0..tol.max_iterations {
        let total: f64 = segments.iter().map(|s| s.value).sum();
        let err: f64 = segments.iter().map(|s| s.error).sum();
        if !total.is_finite() {
            return Err(Error::Domain {
                what: "adaptive_quadrature integrand",
                value: total,
            });
        }
        if err <= tol.abs_tol.max(tol.rel_tol * total.abs()) {
            return Ok(total);
        }
        let (worst, _) = segments
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |acc, (i, s)| {
                if s.error > acc.1 {
                    (i, s.error)
                } else {
                    acc
                }
            });
        let seg = segments.swap_remove(worst);
        let mid = 0.5 * (seg.a + seg.b);
        if mid <= seg.a || mid >= seg.b {
            // Cannot split further; accept the estimate as is.
            segments.push(Segment { error: 0.0, ..seg });
            continue;
        }
        let (v1, e1) = gauss_kronrod(&mut f, seg.a, mid);
        let (v2, e2) = gauss_kronrod(&mut f, mid, seg.b);
        segments.push(Segment {
            a: seg.a,
            b: mid,
            value: v1,
            error: e1,
        });
        segments.push(Segment {
            a: mid,
            b: seg.b,
            value: v2,
            error: e2,
        });
    }
    Err(Error::NoConvergence {
        routine: "adaptive_quadrature",
        iterations: tol.max_iterations,
    })
}

/// Integral over `[a, inf)`.
///
/// The upper limit is pushed out (doubling the length) until `|f|` falls
/// below `abs_tol * 1e-3` of the largest value seen, then the integral over
/// the doubled range is compared with the truncated one as a check.
pub fn integrate_to_infinity<F>(mut f: F, a: f64, tol: ToleranceConfig) -> Result<f64>
where
    F: FnMut(f64) -> f64,
{
    let mut len = 1.0;
    let mut peak = f(a).abs();
    let mut found = false;
    for _ in 0..1100 {
        let v = f(a + len).abs();
        peak = peak.max(v);
        if v <= tol.abs_tol * 1e-3 * peak.max(f64::MIN_POSITIVE) {
            found = true;
            break;
        }
        len *= 2.0;
    }
    if !found {
        return Err(Error::NoConvergence {
            routine: "integrate_to_infinity",
            iterations: 1100,
        });
    }
    let head = adaptive_quadrature(&mut f, a, a + len, tol)?;
    let tail = adaptive_quadrature(&mut f, a + len, a + 2.0 * len, tol)?;
    let total = head + tail;
    if tail.abs() > tol.abs_tol.max(tol.rel_tol * total.abs()) {
        return Err(Error::NoConvergence {
            routine: "integrate_to_infinity",
            iterations: 1,
        });
    }
    Ok(total)
}

/// Dense row-major square matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SquareMatrix {
    n: usize,
    data: Vec<f64>,
}

impl SquareMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn from_rows(rows: &[&[f64]]) -> Result<Self> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for row in rows {
            if row.len() != n {
                return Err(Error::invalid("matrix", "rows must all have length n"));
            }
            data.extend_from_slice(row);
        }
        Ok(Self { n, data })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
    }

    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] += v;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn entries(&self) -> &[f64] {
        &self.data
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    pub fn mul_vec(&self, v: &[f64], out: &mut [f64]) {
        for (i, o) in out.iter_mut().enumerate() {
            *o = self.row(i).iter().zip(v).map(|(a, b)| a * b).sum();
        }
    }
}

fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Dominant eigenpair of an entrywise non-negative matrix.
///
/// Starts from the all-ones vector; if that lands in the null space the
/// iteration restarts once from a positive vector drawn from `seed`.
/// Convergence is declared when successive Rayleigh quotients differ by at
/// most `abs_tol`. The returned eigenvector has unit Euclidean norm.
pub fn power_iteration(
    matrix: &SquareMatrix,
    tol: ToleranceConfig,
    seed: u64,
) -> Result<(f64, Vec<f64>)> {
    let n = matrix.dim();
    if n == 0 {
        return Err(Error::EmptyInput("matrix"));
    }
    if matrix
        .entries()
        .iter()
        .any(|&x| !(x >= 0.0) || !x.is_finite())
    {
        return Err(Error::invalid(
            "matrix",
            "entries must be finite and non-negative",
        ));
    }
    let ones = vec![1.0 / (n as f64).sqrt(); n];
    match iterate(matrix, ones, tol)? {
        Some(pair) => Ok(pair),
        None => {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let mut start: Vec<f64> = (0..n).map(|_| 0.5 + rng.random::<f64>()).collect();
            let s = norm2(&start);
            start.iter_mut().for_each(|x| *x /= s);
            iterate(matrix, start, tol)?
                .ok_or(Error::invalid("matrix", "spectral radius must be positive"))
        }
    }
}

fn iterate(
    matrix: &SquareMatrix,
    mut v: Vec<f64>,
    tol: ToleranceConfig,
) -> Result<Option<(f64, Vec<f64>)>> {
    let mut w = vec![0.0; v.len()];
    let mut previous = f64::NAN;
    for _ in 0..tol.max_iterations {
        matrix.mul_vec(&v, &mut w);
        let rayleigh: f64 = v.iter().zip(&w).map(|(a, b)| a * b).sum();
        let norm = norm2(&w);
        if norm == 0.0 {
            return Ok(None);
        }
        for (vi, wi) in v.iter_mut().zip(&w) {
            *vi = wi / norm;
        }
        if (rayleigh - previous).abs() <= tol.abs_tol {
            return Ok(Some((rayleigh, v)));
        }
        previous = rayleigh;
    }
    Err(Error::NoConvergence {
        routine: "power_iteration",
        iterations: tol.max_iterations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::{LN_2, SQRT_2};

    fn tol(abs: f64) -> ToleranceConfig {
        ToleranceConfig::new(abs, 0.0, 10_000).unwrap()
    }

    #[test]
    fn log_gamma_known_values() {
        assert!(log_gamma(1.0).unwrap().abs() < 1e-14);
        assert!(log_gamma(2.0).unwrap().abs() < 1e-14);
        assert!((log_gamma(0.5).unwrap() - 0.5 * PI.ln()).abs() < 1e-13);
        assert!((log_gamma(11.0).unwrap() - 3_628_800.0_f64.ln()).abs() < 1e-12);
        // ln Gamma(1e6) against Stirling evaluated independently to 1e-6 relative.
        let x = 1e6_f64;
        let stirling = (x - 0.5) * x.ln() - x + HALF_LN_2PI + 1.0 / (12.0 * x);
        assert!((log_gamma(x).unwrap() - stirling).abs() < 1e-12 * stirling);
    }

    #[test]
    fn log_gamma_rejects_non_positive() {
        assert!(matches!(log_gamma(0.0), Err(Error::Domain { .. })));
        assert!(matches!(log_gamma(-1.5), Err(Error::Domain { .. })));
        assert!(log_gamma(f64::NAN).is_err());
    }

    #[test]
    fn log_gamma_matches_factorials() {
        let mut log_fact = 0.0;
        for k in 1..60 {
            log_fact += (k as f64).ln();
            let got = log_gamma(k as f64 + 1.0).unwrap();
            assert!((got - log_fact).abs() < 1e-12 * log_fact.max(1.0), "k={k}");
        }
    }

    #[test]
    fn unit_ball_volumes() {
        assert_eq!(log_unit_ball_volume(0), 0.0);
        assert!((log_unit_ball_volume(1) - LN_2).abs() < 1e-14);
        assert!((log_unit_ball_volume(2) - PI.ln()).abs() < 1e-14);
        assert!((log_unit_ball_volume(3) - (4.0 * PI / 3.0).ln()).abs() < 1e-13);
    }

    #[test]
    fn unit_ball_recurrence() {
        // eps_j = eps_{j-1} * sqrt(pi) * Gamma((j+1)/2) / Gamma(j/2 + 1)
        for j in 1..=200 {
            let lhs = log_unit_ball_volume(j);
            let rhs = log_unit_ball_volume(j - 1)
                + 0.5 * PI.ln()
                + log_gamma((j as f64 + 1.0) / 2.0).unwrap()
                - log_gamma(j as f64 / 2.0 + 1.0).unwrap();
            assert!((lhs - rhs).abs() < 1e-10, "j={j}");
        }
    }

    #[test]
    fn log_sum_exp_examples() {
        assert!((log_sum_exp(&[0.0, 0.0]).unwrap() - LN_2).abs() < 1e-15);
        assert_eq!(log_sum_exp(&[f64::NEG_INFINITY, 5.0]).unwrap(), 5.0);
        assert!((log_sum_exp(&[1000.0, 1000.0]).unwrap() - (1000.0 + LN_2)).abs() < 1e-12);
        assert_eq!(log_sum_exp(&[0.0, -800.0]).unwrap(), 0.0);
        assert_eq!(
            log_sum_exp(&[f64::NEG_INFINITY, f64::NEG_INFINITY]).unwrap(),
            f64::NEG_INFINITY
        );
        assert!(matches!(log_sum_exp(&[]), Err(Error::EmptyInput(_))));
    }

    #[test]
    fn streaming_log_sum_exp_agrees() {
        let v = [3.0, -1.0, f64::NEG_INFINITY, 7.5, 7.5, -300.0];
        let a = log_sum_exp(&v).unwrap();
        let b = log_sum_exp_iter(v.iter().copied());
        assert!((a - b).abs() < 1e-14);
        assert_eq!(log_sum_exp_iter(core::iter::empty()), f64::NEG_INFINITY);
    }

    #[test]
    fn bisection_examples() {
        let r = bisection_root(|x| x - 1.0, 0.0, 2.0, tol(1e-12)).unwrap();
        assert!((r - 1.0).abs() < 1e-12);
        let r = bisection_root(|x| x * x - 2.0, 0.0, 2.0, tol(1e-12)).unwrap();
        assert!((r - SQRT_2).abs() < 1e-11);
        let r = bisection_root(
            |t| (1.0 - t) * (1.0 - t) / (t * t * t) - 2.0,
            1e-9,
            1.0 - 1e-9,
            tol(1e-13),
        )
        .unwrap();
        assert!((r - 0.5).abs() < 1e-12);
    }

    #[test]
    fn bisection_errors() {
        assert!(matches!(
            bisection_root(|x| x * x + 1.0, -1.0, 1.0, tol(1e-12)),
            Err(Error::NoSignChange { .. })
        ));
        let tight = ToleranceConfig::new(1e-300, 0.0, 5).unwrap();
        assert!(matches!(
            bisection_root(|x| x - 0.3, 0.0, 1.0, tight),
            Err(Error::NoConvergence { .. })
        ));
    }

    #[test]
    fn golden_section_examples() {
        let (x, v) = golden_section_max(|x| -(x - 0.3) * (x - 0.3), 0.0, 1.0, tol(1e-10)).unwrap();
        assert!((x - 0.3).abs() < 1e-9);
        assert!(v.abs() < 1e-18);
        // The top of H is flat to rounding within ~1e-8 of the maximiser.
        let (x, v) = golden_section_max(binary_entropy, 0.0, 1.0, tol(1e-10)).unwrap();
        assert!((x - 0.5).abs() < 1e-7);
        assert!((v - LN_2).abs() < 1e-15);
        // Boundary maximum.
        let (x, v) = golden_section_max(|x| x, 0.0, 1.0, tol(1e-10)).unwrap();
        assert_eq!((x, v), (1.0, 1.0));
    }

    #[test]
    fn golden_section_budget() {
        let t = ToleranceConfig::new(1e-12, 0.0, 3).unwrap();
        assert!(matches!(
            golden_section_max(|x| -x * x, -1.0, 1.0, t),
            Err(Error::NoConvergence { .. })
        ));
    }

    #[test]
    fn quadrature_examples() {
        let t = ToleranceConfig::new(1e-13, 1e-13, 1000).unwrap();
        assert!((adaptive_quadrature(|x| x, 0.0, 1.0, t).unwrap() - 0.5).abs() < 1e-14);
        assert!((adaptive_quadrature(libm::sin, 0.0, PI, t).unwrap() - 2.0).abs() < 1e-12);
        assert!(
            (adaptive_quadrature(|x| 1.0 / x.sqrt(), 0.0, 1.0, t.with_abs_tol(1e-9)).unwrap()
                - 2.0)
                .abs()
                < 1e-8
        );
    }

    #[test]
    fn quadrature_exact_on_cubics() {
        let t = ToleranceConfig::new(1e-14, 0.0, 10).unwrap();
        let p = |x: f64| 3.0 - 2.0 * x + 0.5 * x * x - 1.25 * x * x * x;
        let antideriv = |x: f64| 3.0 * x - x * x + x * x * x / 6.0 - 1.25 * x.powi(4) / 4.0;
        let (a, b) = (-1.3, 2.7);
        let got = adaptive_quadrature(p, a, b, t).unwrap();
        assert!((got - (antideriv(b) - antideriv(a))).abs() < 1e-12);
    }

    #[test]
    fn quadrature_budget() {
        let t = ToleranceConfig::new(1e-15, 0.0, 2).unwrap();
        assert!(matches!(
            adaptive_quadrature(|x| (50.0 * x).sin().abs(), 0.0, 10.0, t),
            Err(Error::NoConvergence { .. })
        ));
    }

    #[test]
    fn half_line_integral() {
        let t = ToleranceConfig::new(1e-12, 1e-12, 1000).unwrap();
        let v = integrate_to_infinity(|x| (-x).exp(), 0.0, t).unwrap();
        assert!((v - 1.0).abs() < 1e-11);
    }

    #[test]
    fn power_iteration_examples() {
        let t = tol(1e-13);
        let id = SquareMatrix::from_rows(&[&[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0], &[0.0, 0.0, 1.0]])
            .unwrap();
        let (l, _) = power_iteration(&id, t, 0).unwrap();
        assert!((l - 1.0).abs() < 1e-12);

        let d = SquareMatrix::from_rows(&[&[2.0, 0.0], &[0.0, 1.0]]).unwrap();
        let (l, v) = power_iteration(&d, t, 0).unwrap();
        assert!((l - 2.0).abs() < 1e-10);
        assert!((v[0] - 1.0).abs() < 1e-6 && v[1].abs() < 1e-6);

        let r = SquareMatrix::from_rows(&[&[1.0, 1.0], &[1.0, 1.0]]).unwrap();
        let (l, v) = power_iteration(&r, t, 0).unwrap();
        assert!((l - 2.0).abs() < 1e-12);
        assert!((v[0] - 1.0 / SQRT_2).abs() < 1e-12 && (v[1] - 1.0 / SQRT_2).abs() < 1e-12);
    }

    #[test]
    fn power_iteration_restarts_off_null_space() {
        // A * ones = 0 but the spectral radius is 1.
        let m = SquareMatrix::from_rows(&[&[0.0, 0.0], &[0.0, 0.0]]).unwrap();
        assert!(power_iteration(&m, tol(1e-12), 3).is_err());
        let m = SquareMatrix::from_rows(&[&[1.0, 0.0], &[0.0, 0.0]]).unwrap();
        let (l, v) = power_iteration(&m, tol(1e-12), 3).unwrap();
        assert!((l - 1.0).abs() < 1e-12);
        assert!(v.iter().all(|&x| x >= 0.0));
    }

    #[test]
    fn power_iteration_rejects_negative_entries() {
        let m = SquareMatrix::from_rows(&[&[1.0, -1.0], &[0.0, 1.0]]).unwrap();
        assert!(matches!(
            power_iteration(&m, tol(1e-12), 0),
            Err(Error::InvalidParameter { .. })
        ));
    }

    #[test]
    fn tolerance_validation() {
        assert!(ToleranceConfig::new(0.0, 0.0, 1).is_err());
        assert!(ToleranceConfig::new(1e-3, -1.0, 1).is_err());
        assert!(ToleranceConfig::new(1e-3, 0.0, 0).is_err());
        assert!(ToleranceConfig::new(1e-3, 0.0, 1).is_ok());
    }
}
