//! Feasibility geometry of the `(sigma, rho)` constraint set.
//!
//! A codeword `x_1..x_n` is feasible when the battery recursion
//! `s_0 = sigma`, `s_{i+1} = min(sigma, s_i + rho - x_{i+1}^2)` never goes
//! negative. Equivalently every window satisfies
//! `sum_{k<j<=l} x_j^2 <= sigma + (l - k) rho`. Both tests are provided.
//!
//! The sets are closed, but a symbol like `sqrt(2)` is not representable and
//! its nearest `f64` squares to slightly more than 2. The feasibility tests
//! therefore compare against the budget inflated by [`BUDGET_SLACK`] (a few
//! ulps, relative). Inflating the budget is the same as running the exact
//! test with `(sigma, rho)` scaled by `1 + BUDGET_SLACK`, so the recursion
//! and the window test still describe one and the same set.

use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)] // float math comes from std when it is linked
use num_traits::Float;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::rng::count_sharded;
use crate::{Error, Result};

/// Battery capacity `sigma` and per-slot harvest `rho`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SigmaRhoParams {
    sigma: f64,
    rho: f64,
}

impl SigmaRhoParams {
    pub fn new(sigma: f64, rho: f64) -> Result<Self> {
        if !(sigma >= 0.0) || !sigma.is_finite() {
            return Err(Error::invalid("sigma", "must be finite and >= 0"));
        }
        if !(rho > 0.0) || !rho.is_finite() {
            return Err(Error::invalid("rho", "must be finite and > 0"));
        }
        Ok(Self { sigma, rho })
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    /// Number of zero symbols needed to refill an empty battery.
    pub fn refill_slots(&self) -> usize {
        (self.sigma / self.rho).ceil() as usize
    }
}

/// A non-empty finite sequence of channel inputs.
#[derive(Debug, Clone, PartialEq)]
pub struct Codeword(Vec<f64>);

impl Codeword {
    pub fn new(symbols: Vec<f64>) -> Result<Self> {
        if symbols.is_empty() {
            return Err(Error::EmptyInput("codeword"));
        }
        if let Some(&bad) = symbols.iter().find(|x| !x.is_finite()) {
            return Err(Error::Domain {
                what: "codeword symbol",
                value: bad,
            });
        }
        Ok(Self(symbols))
    }

    pub fn symbols(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

/// Battery states `s_0..s_n`. States may be negative.
#[derive(Debug, Clone, PartialEq)]
pub struct StateTrace {
    pub states: Vec<f64>,
}

impl StateTrace {
    pub fn min_state(&self) -> f64 {
        self.states.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

/// Unevaluated sum `hi + lo` with `|lo| <= ulp(hi) / 2`.
///
/// Feasibility sits on a closed boundary, and inputs such as `x = sqrt(2)`
/// round `x * x` above 2. Carrying the recursion and the window sums in
/// double-double keeps the sign of every comparison faithful to the exact
/// value of the `f64` inputs.
#[derive(Debug, Clone, Copy)]
struct Dd {
    hi: f64,
    lo: f64,
}

impl Dd {
    const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };

    fn from(x: f64) -> Self {
        Dd { hi: x, lo: 0.0 }
    }

    fn square(x: f64) -> Self {
        let p = x * x;
        Dd {
            hi: p,
            lo: libm::fma(x, x, -p),
        }
    }

    fn product(a: f64, b: f64) -> Self {
        let p = a * b;
        Dd {
            hi: p,
            lo: libm::fma(a, b, -p),
        }
    }

    fn add(self, other: Dd) -> Dd {
        let s = self.hi + other.hi;
        let bb = s - self.hi;
        let e = (self.hi - (s - bb)) + (other.hi - bb);
        let lo = e + self.lo + other.lo;
        let hi = s + lo;
        Dd {
            hi,
            lo: lo - (hi - s),
        }
    }

    fn neg(self) -> Dd {
        Dd {
            hi: -self.hi,
            lo: -self.lo,
        }
    }

    fn sub(self, other: Dd) -> Dd {
        self.add(other.neg())
    }

    fn is_negative(self) -> bool {
        self.hi < 0.0 || (self.hi == 0.0 && self.lo < 0.0)
    }

    fn value(self) -> f64 {
        self.hi + self.lo
    }
}

/// Relative slack on the energy budget used by the feasibility tests.
pub const BUDGET_SLACK: f64 = 4.0 * f64::EPSILON;

fn inflated(params: SigmaRhoParams) -> (Dd, Dd) {
    let scale = 1.0 + BUDGET_SLACK;
    (
        Dd::product(params.sigma, scale),
        Dd::product(params.rho, scale),
    )
}

fn battery_step(cap: Dd, rho: Dd, s: Dd, x: f64) -> Dd {
    let next = s.add(rho).sub(Dd::square(x));
    if next.sub(cap).is_negative() {
        next
    } else {
        cap
    }
}

/// Battery states under the recursion with the nominal `(sigma, rho)`.
pub fn state_trace(params: SigmaRhoParams, cw: &Codeword) -> StateTrace {
    let mut states = Vec::with_capacity(cw.len() + 1);
    let (cap, rho) = (Dd::from(params.sigma), Dd::from(params.rho));
    let mut s = cap;
    states.push(params.sigma);
    for &x in cw.symbols() {
        s = battery_step(cap, rho, s, x);
        states.push(s.value());
    }
    StateTrace { states }
}

/// True iff the battery never goes negative (up to [`BUDGET_SLACK`]).
pub fn is_feasible(params: SigmaRhoParams, cw: &Codeword) -> bool {
    let (cap, rho) = inflated(params);
    let mut s = cap;
    for &x in cw.symbols() {
        s = battery_step(cap, rho, s, x);
        if s.is_negative() {
            return false;
        }
    }
    true
}

/// Direct check of every window `0 <= k < l <= n`, in `O(n^2)`, using
/// compensated prefix sums of `x_j^2`.
pub fn window_check(params: SigmaRhoParams, cw: &Codeword) -> bool {
    let mut prefix = Vec::with_capacity(cw.len() + 1);
    let mut acc = Dd::ZERO;
    prefix.push(acc);
    for &x in cw.symbols() {
        acc = acc.add(Dd::square(x));
        prefix.push(acc);
    }
    let (sigma, rho) = inflated(params);
    for l in 1..prefix.len() {
        for k in 0..l {
            let len = (l - k) as f64;
            let budget = sigma
                .add(Dd::product(len, rho.hi))
                .add(Dd::from(len * rho.lo));
            if budget.sub(prefix[l].sub(prefix[k])).is_negative() {
                return false;
            }
        }
    }
    true
}

/// Largest window excess `sum x_j^2 - (l - k)` (unit harvest rate).
///
/// Linear time: the best window ending at `l` starts at the running minimum
/// of the partial sums of `x_j^2 - 1`. An all-zero codeword gives `-1`.
pub fn burstiness(cw: &Codeword) -> f64 {
    max_window_excess(cw.symbols().iter().map(|x| x * x))
}

fn max_window_excess<I: Iterator<Item = f64>>(energies: I) -> f64 {
    let mut partial = 0.0;
    let mut min_prefix = 0.0f64;
    let mut best = f64::NEG_INFINITY;
    for e in energies {
        partial += e - 1.0;
        best = best.max(partial - min_prefix);
        min_prefix = min_prefix.min(partial);
    }
    best
}

/// Concatenate blocks, following each with `ceil(sigma / rho)` zeros.
///
/// The zeros let the battery recharge fully, so the result is feasible
/// whenever every block is.
pub fn pad_and_concat(params: SigmaRhoParams, blocks: &[Codeword]) -> Result<Codeword> {
    if blocks.is_empty() {
        return Err(Error::EmptyInput("block list"));
    }
    let k = params.refill_slots();
    let total: usize = blocks.iter().map(|b| b.len() + k).sum();
    let mut out = Vec::with_capacity(total);
    for (index, block) in blocks.iter().enumerate() {
        if !is_feasible(params, block) {
            return Err(Error::InfeasibleBlock { index });
        }
        out.extend_from_slice(block.symbols());
        out.extend(core::iter::repeat_n(0.0, k));
    }
    Codeword::new(out)
}

/// Monte-Carlo estimate of `P(burstiness <= alpha sqrt(n) and sum X_i^2 <= n)`
/// for i.i.d. standard normal `X_i`.
pub fn burstiness_walk_probability(n: usize, alpha: f64, samples: usize, seed: u64) -> Result<f64> {
    if n == 0 {
        return Err(Error::invalid("n", "must be at least 1"));
    }
    if samples == 0 {
        return Err(Error::invalid("samples", "must be at least 1"));
    }
    if alpha.is_nan() {
        return Err(Error::Domain {
            what: "alpha",
            value: alpha,
        });
    }
    let threshold = alpha * (n as f64).sqrt();
    let mut buf = vec![0.0; n];
    let hits = count_sharded(samples, seed, |rng, count| {
        let mut hits = 0;
        for _ in 0..count {
            let mut energy = 0.0;
            for e in buf.iter_mut() {
                let z: f64 = rng.sample(StandardNormal);
                *e = z * z;
                energy += *e;
            }
            if energy <= n as f64 && max_window_excess(buf.iter().copied()) <= threshold {
                hits += 1;
            }
        }
        hits
    });
    Ok(hits as f64 / samples as f64)
}
