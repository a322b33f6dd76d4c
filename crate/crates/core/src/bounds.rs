//! Capacity bounds assembled from the growth rate and the parallel-body
//! exponent.
//!
//! For noise power `nu` the capacity `C` satisfies
//! `(1/2) ln(1 + e^{2v} / (2 pi e nu)) <= C`, and is at most both
//! `(1/2) ln(1 + rho / nu)` and `ell(nu) - (1/2) ln(2 pi e nu)`.

use alloc::vec::Vec;
use core::f64::consts::{E, LN_2, PI};

#[allow(unused_imports)] // float math comes from std when it is linked
use num_traits::Float;

use crate::geometry::SigmaRhoParams;
use crate::growth::v as growth_rate;
use crate::numerics::{softplus, ToleranceConfig};
use crate::steiner::ell_cube;
use crate::subconv::{ell_general, ConjugateFunction};
use crate::{Error, Result};

fn check_nu(nu: f64) -> Result<()> {
    if !(nu > 0.0) || !nu.is_finite() {
        return Err(Error::invalid("nu", "must be finite and > 0"));
    }
    Ok(())
}

fn half_ln_2pie(nu: f64) -> f64 {
    0.5 * (2.0 * PI * E * nu).ln()
}

/// `(1/2) ln(1 + e^{2v} / (2 pi e nu))`, in nats.
pub fn epi_lower_bound(v: f64, nu: f64) -> Result<f64> {
    check_nu(nu)?;
    if !v.is_finite() {
        return Err(Error::Domain {
            what: "growth rate",
            value: v,
        });
    }
    Ok(0.5 * softplus(2.0 * v - 2.0 * half_ln_2pie(nu)))
}

/// `(1/2) ln(1 + rho / nu)`.
pub fn awgn_upper_bound(rho: f64, nu: f64) -> Result<f64> {
    check_nu(nu)?;
    if !(rho > 0.0) || !rho.is_finite() {
        return Err(Error::invalid("rho", "must be finite and > 0"));
    }
    Ok(0.5 * (rho / nu).ln_1p())
}

/// `ell - (1/2) ln(2 pi e nu)`.
pub fn minkowski_upper_bound(ell: f64, nu: f64) -> Result<f64> {
    check_nu(nu)?;
    Ok(ell - half_ln_2pie(nu))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Units {
    Nats,
    #[default]
    Bits,
}

impl Units {
    pub fn convert(self, nats: f64) -> f64 {
        match self {
            Units::Nats => nats,
            Units::Bits => nats / LN_2,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Units::Nats => "nats",
            Units::Bits => "bits",
        }
    }
}

/// Which upper bound is the smaller one.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ActiveUpper {
    Awgn,
    Minkowski,
}

impl ActiveUpper {
    pub fn as_str(self) -> &'static str {
        match self {
            ActiveUpper::Awgn => "awgn",
            ActiveUpper::Minkowski => "minkowski",
        }
    }
}

/// One row of a bounds table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundsRow {
    pub sigma: f64,
    pub rho: f64,
    pub nu: f64,
    pub epi_lower: f64,
    pub awgn_upper: f64,
    pub minkowski_upper: Option<f64>,
    pub active_upper: ActiveUpper,
    pub units: Units,
}

impl BoundsRow {
    fn new(sigma: f64, rho: f64, nu: f64, lower: f64, awgn: f64, mink: Option<f64>) -> Self {
        let active_upper = match mink {
            Some(m) if m < awgn => ActiveUpper::Minkowski,
            _ => ActiveUpper::Awgn,
        };
        Self {
            sigma,
            rho,
            nu,
            epi_lower: lower,
            awgn_upper: awgn,
            minkowski_upper: mink,
            active_upper,
            units: Units::Nats,
        }
    }

    /// Smallest available upper bound.
    pub fn best_upper(&self) -> f64 {
        self.minkowski_upper
            .map_or(self.awgn_upper, |m| m.min(self.awgn_upper))
    }

    /// The same row with the three rate columns expressed in `units`.
    /// Rows are built in nats.
    pub fn in_units(self, units: Units) -> Self {
        let back = match self.units {
            Units::Nats => 1.0,
            Units::Bits => LN_2,
        };
        let conv = |x: f64| units.convert(x * back);
        Self {
            epi_lower: conv(self.epi_lower),
            awgn_upper: conv(self.awgn_upper),
            minkowski_upper: self.minkowski_upper.map(conv),
            units,
            ..self
        }
    }
}

/// Bounds for the amplitude constraint `|x| <= A` (that is `sigma = 0`,
/// `rho = A^2`).
pub fn cube_capacity_bounds(a: f64, nu: f64, tol: ToleranceConfig) -> Result<BoundsRow> {
    check_nu(nu)?;
    let ell = ell_cube(a, nu, tol)?;
    let rho = a * a;
    Ok(BoundsRow::new(
        0.0,
        rho,
        nu,
        epi_lower_bound((2.0 * a).ln(), nu)?,
        awgn_upper_bound(rho, nu)?,
        Some(minkowski_upper_bound(ell.ell, nu)?),
    ))
}

/// `steps` values from `min` to `max`, equally spaced or geometric.
pub fn nu_grid(min: f64, max: f64, steps: usize, log_spaced: bool) -> Result<Vec<f64>> {
    if !(min > 0.0) || !min.is_finite() || !(max >= min) || !max.is_finite() {
        return Err(Error::invalid(
            "nu range",
            "need 0 < nu_min <= nu_max, finite",
        ));
    }
    if steps == 0 {
        return Err(Error::invalid("nu steps", "must be at least 1"));
    }
    if steps == 1 {
        return Ok(alloc::vec![min]);
    }
    let last = (steps - 1) as f64;
    Ok((0..steps)
        .map(|i| {
            let w = i as f64 / last;
            if i == 0 {
                min
            } else if i + 1 == steps {
                max
            } else if log_spaced {
                (min.ln() + w * (max.ln() - min.ln())).exp()
            } else {
                min + w * (max - min)
            }
        })
        .collect())
}

/// One row per `nu`, in nats.
///
/// `v(sigma, rho)` is computed once with the growth-ladder tolerance `tol`.
/// The Minkowski column is filled for `sigma = 0`, where the cube formula
/// applies, or when a rate-function estimate for the set is supplied.
pub fn bounds_sweep(
    params: SigmaRhoParams,
    nu_grid: &[f64],
    gamma: f64,
    tol: ToleranceConfig,
    lambda_star: Option<&ConjugateFunction>,
) -> Result<Vec<BoundsRow>> {
    if nu_grid.is_empty() {
        return Ok(Vec::new());
    }
    for &nu in nu_grid {
        check_nu(nu)?;
    }
    let v = growth_rate(params, gamma, tol)?.value;
    let solver = ToleranceConfig::default();
    let (sigma, rho) = (params.sigma(), params.rho());
    nu_grid
        .iter()
        .map(|&nu| {
            let ell = if sigma == 0.0 {
                Some(ell_cube(rho.sqrt(), nu, solver)?.ell)
            } else if let Some(ls) = lambda_star {
                Some(ell_general(ls, nu, solver)?.ell)
            } else {
                None
            };
            let mink = ell.map(|e| minkowski_upper_bound(e, nu)).transpose()?;
            Ok(BoundsRow::new(
                sigma,
                rho,
                nu,
                epi_lower_bound(v, nu)?,
                awgn_upper_bound(rho, nu)?,
                mink,
            ))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::growth::{default_ladder_tolerance, DEFAULT_GAMMA};

    #[test]
    fn epi_examples() {
        let nu = 0.37;
        let v = 0.5 * (2.0 * PI * E * nu).ln();
        assert!((epi_lower_bound(v, nu).unwrap() - 0.5 * LN_2).abs() < 1e-15);
        assert!(epi_lower_bound(LN_2, 1e12).unwrap() < 1e-12);
        let expect = 0.5 * (1.0 + 4.0 / (2.0 * PI * E * 0.1)).ln();
        assert!((epi_lower_bound(LN_2, 0.1).unwrap() - expect).abs() < 1e-15);
        assert!(epi_lower_bound(LN_2, 0.0).is_err());
    }

    #[test]
    fn awgn_examples() {
        assert!((awgn_upper_bound(2.0, 2.0).unwrap() - 0.5 * LN_2).abs() < 1e-16);
        assert!((awgn_upper_bound(E * E - 1.0, 1.0).unwrap() - 1.0).abs() < 1e-15);
        let small = awgn_upper_bound(1e-9, 1.0).unwrap();
        assert!((small - 0.5e-9).abs() < 1e-18);
    }

    #[test]
    fn minkowski_examples() {
        let nu = 3.0;
        assert_eq!(minkowski_upper_bound(half_ln_2pie(nu), nu).unwrap(), 0.0);
        let t = ToleranceConfig::default();
        let ell = ell_cube(1.0, 1.0, t).unwrap().ell;
        let row = cube_capacity_bounds(1.0, 1.0, t).unwrap();
        assert!((row.minkowski_upper.unwrap() - (ell - half_ln_2pie(1.0))).abs() < 1e-15);
        assert!(row.epi_lower <= row.best_upper());
    }

    #[test]
    fn active_upper_switches() {
        let t = ToleranceConfig::default();
        assert_eq!(
            cube_capacity_bounds(1.0, 100.0, t).unwrap().active_upper,
            ActiveUpper::Awgn
        );
        assert_eq!(
            cube_capacity_bounds(1.0, 1e-3, t).unwrap().active_upper,
            ActiveUpper::Minkowski
        );
    }

    #[test]
    fn unit_conversion() {
        let row = cube_capacity_bounds(1.0, 0.5, ToleranceConfig::default()).unwrap();
        let bits = row.in_units(Units::Bits);
        assert_eq!(bits.epi_lower, row.epi_lower / LN_2);
        assert_eq!(bits.awgn_upper, row.awgn_upper / LN_2);
        assert_eq!(
            bits.minkowski_upper.unwrap(),
            row.minkowski_upper.unwrap() / LN_2
        );
        assert_eq!(bits.units, Units::Bits);
        let back = bits.in_units(Units::Nats);
        assert!((back.epi_lower - row.epi_lower).abs() < 1e-15);
    }

    #[test]
    fn grids() {
        assert_eq!(
            nu_grid(1.0, 3.0, 3, false).unwrap(),
            alloc::vec![1.0, 2.0, 3.0]
        );
        let g = nu_grid(1e-3, 10.0, 5, true).unwrap();
        assert!((g[1] - 1e-2).abs() < 1e-15 && g[0] == 1e-3 && g[4] == 10.0);
        assert_eq!(nu_grid(2.0, 2.0, 1, true).unwrap(), alloc::vec![2.0]);
        assert!(nu_grid(0.0, 1.0, 3, true).is_err());
        assert!(nu_grid(2.0, 1.0, 3, true).is_err());
        assert!(nu_grid(1.0, 2.0, 0, true).is_err());
    }

    #[test]
    fn sweep_shapes() {
        let t = default_ladder_tolerance();
        let p = SigmaRhoParams::new(0.0, 1.0).unwrap();
        assert!(bounds_sweep(p, &[], DEFAULT_GAMMA, t, None)
            .unwrap()
            .is_empty());
        let rows = bounds_sweep(p, &[0.01, 1.0], DEFAULT_GAMMA, t, None).unwrap();
        assert_eq!(rows.len(), 2);
        assert!(rows.iter().all(|r| r.minkowski_upper.is_some()));
        let q = SigmaRhoParams::new(1.0, 1.0).unwrap();
        let rows = bounds_sweep(q, &[0.01, 1.0], DEFAULT_GAMMA, t, None).unwrap();
        assert!(rows.iter().all(|r| r.minkowski_upper.is_none()));
        assert!(rows.iter().all(|r| r.epi_lower <= r.awgn_upper));
        assert!(bounds_sweep(q, &[-1.0], DEFAULT_GAMMA, t, None).is_err());
    }
}
