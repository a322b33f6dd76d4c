//! Argument definitions and the subcommand drivers.
//!
//! Every driver writes to a caller-supplied sink. Scalar results are printed
//! as `key=value` pairs, rates in nats unless stated otherwise.

use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use ehcap_core::bounds::{
    awgn_upper_bound, bounds_sweep, cube_capacity_bounds, epi_lower_bound, nu_grid, Units,
};
use ehcap_core::geometry::SigmaRhoParams;
use ehcap_core::growth::{
    default_ladder_tolerance, mc_log_volume, v, v1, GrowthRateResult, DEFAULT_GAMMA,
};
use ehcap_core::numerics::ToleranceConfig;
use ehcap_core::steiner::{bpsk_high_noise_capacity, ell_cube, high_noise_series};
use ehcap_core::subconv::{
    check_alexandrov_fenchel, check_subconvolutive, ell_general, lambda_star_estimate,
    IntrinsicVolumeSequence,
};

use crate::error::CliResult;
use crate::seqfile::read_sequence;

#[derive(Debug, Parser)]
#[command(
    name = "ehcap",
    version,
    about = "Capacity bounds for the battery-constrained Gaussian channel"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum UnitsArg {
    Bits,
    Nats,
}

impl From<UnitsArg> for Units {
    fn from(u: UnitsArg) -> Self {
        match u {
            UnitsArg::Bits => Units::Bits,
            UnitsArg::Nats => Units::Nats,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CheckKind {
    All,
    Af,
    Subc,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Growth rate v1(sigma) at unit harvest rate.
    V1 {
        #[arg(long)]
        sigma: f64,
        #[arg(long, default_value_t = DEFAULT_GAMMA)]
        gamma: f64,
        /// Stop the grid ladder once successive values differ by this much.
        #[arg(long, default_value_t = ehcap_core::growth::DEFAULT_LADDER_TOL)]
        tol: f64,
    },
    /// Growth rate v(sigma, rho).
    Growth {
        #[arg(long)]
        sigma: f64,
        #[arg(long)]
        rho: f64,
        #[arg(long, default_value_t = DEFAULT_GAMMA)]
        gamma: f64,
    },
    /// CSV table of capacity bounds over a noise grid.
    Bounds {
        #[arg(long)]
        sigma: f64,
        #[arg(long)]
        rho: f64,
        #[arg(long)]
        nu_min: f64,
        #[arg(long)]
        nu_max: f64,
        #[arg(long)]
        nu_steps: usize,
        /// Space the grid geometrically instead of evenly.
        #[arg(long)]
        log_grid: bool,
        #[arg(long, value_enum, default_value = "bits")]
        units: UnitsArg,
    },
    /// Parallel-body exponent and bounds for the amplitude constraint |x| <= A.
    CubeEll {
        #[arg(long)]
        amplitude: f64,
        #[arg(long)]
        nu: f64,
    },
    /// Monte-Carlo estimate of (1/n) ln Vol S_n(sigma, rho).
    McVolume {
        #[arg(long)]
        sigma: f64,
        #[arg(long)]
        rho: f64,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Checks on an intrinsic-volume sequence and the exponent it implies.
    Subconv {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum)]
        check: CheckKind,
        #[arg(long)]
        ell_nu: f64,
    },
    /// Two-point input capacity by quadrature and by its series.
    Bpsk {
        #[arg(long)]
        amplitude: f64,
        #[arg(long)]
        nu: f64,
    },
}

fn ladder_tol(abs_tol: f64) -> CliResult<ToleranceConfig> {
    let base = default_ladder_tolerance();
    Ok(ToleranceConfig::new(
        abs_tol,
        base.rel_tol,
        base.max_iterations,
    )?)
}

fn join<T: ToString>(items: &[T]) -> String {
    items.iter().map(T::to_string).collect::<Vec<_>>().join(",")
}

fn growth_line(r: &GrowthRateResult) -> String {
    format!(
        "value={} grids={} per_grid={} bracket_lo={} bracket_hi={}",
        r.value,
        join(&r.grid_sizes_used),
        join(&r.per_grid_values),
        r.bracket.0,
        r.bracket.1
    )
}

/// Pairs `(m, n)` checked for sub-convolutivity.
///
/// Every pair with `m + n <= n_max` when `n_max <= 128`; beyond that the
/// pairs with `m + n <= 64`, plus `(1, n)` and `(n, n)` wherever they fit.
pub fn subconv_pairs(n_max: usize) -> Vec<(usize, usize)> {
    let limit = if n_max <= 128 { n_max } else { 64 };
    let mut pairs: Vec<(usize, usize)> = (1..limit)
        .flat_map(|m| (1..=limit - m).map(move |n| (m, n)))
        .collect();
    if n_max > 128 {
        pairs.extend((limit..n_max).map(|n| (1, n)));
        pairs.extend((limit / 2 + 1..=n_max / 2).map(|n| (n, n)));
    }
    pairs
}

fn subconv_report(
    seq: &IntrinsicVolumeSequence,
    check: CheckKind,
    ell_nu: f64,
    out: &mut dyn Write,
) -> CliResult<()> {
    let n_max = seq.n_max();
    if matches!(check, CheckKind::All | CheckKind::Subc) {
        let pairs = subconv_pairs(n_max);
        let mut failed = Vec::new();
        for &(m, n) in &pairs {
            if !check_subconvolutive(seq, m, n)? {
                failed.push((m, n));
            }
        }
        let first = failed
            .first()
            .map_or("none".to_owned(), |(m, n)| format!("{m}+{n}"));
        writeln!(
            out,
            "subconvolutive={} pairs_checked={} failures={} first_failure={first}",
            if failed.is_empty() { "pass" } else { "fail" },
            pairs.len(),
            failed.len()
        )?;
    }
    if matches!(check, CheckKind::All | CheckKind::Af) {
        let mut failed = Vec::new();
        for n in 2..=n_max {
            if !check_alexandrov_fenchel(seq, n)? {
                failed.push(n);
            }
        }
        let first = failed
            .first()
            .map_or("none".to_owned(), ToString::to_string);
        writeln!(
            out,
            "alexandrov_fenchel={} rows_checked={} failures={} first_failure={first}",
            if failed.is_empty() { "pass" } else { "fail" },
            n_max.saturating_sub(1),
            failed.len()
        )?;
    }
    let tol = ToleranceConfig::new(1e-10, 0.0, 1000)?;
    let lambda_star = lambda_star_estimate(seq, 129, tol)?;
    let ell = ell_general(&lambda_star, ell_nu, ToleranceConfig::default())?;
    writeln!(
        out,
        "lambda_star_n_max={n_max} interp_error={} nu={ell_nu} ell={} theta_star={} minkowski_upper={}",
        lambda_star.interp_error,
        ell.ell,
        ell.theta_star,
        ehcap_core::bounds::minkowski_upper_bound(ell.ell, ell_nu)?
    )?;
    Ok(())
}

/// Execute one parsed command.
pub fn run(command: &Command, out: &mut dyn Write) -> CliResult<()> {
    match *command {
        Command::V1 { sigma, gamma, tol } => {
            let r = v1(sigma, gamma, ladder_tol(tol)?)?;
            writeln!(out, "sigma={sigma} gamma={gamma} {}", growth_line(&r))?;
        }
        Command::Growth { sigma, rho, gamma } => {
            let p = SigmaRhoParams::new(sigma, rho)?;
            let r = v(p, gamma, default_ladder_tolerance())?;
            writeln!(
                out,
                "sigma={sigma} rho={rho} gamma={gamma} {}",
                growth_line(&r)
            )?;
        }
        Command::Bounds {
            sigma,
            rho,
            nu_min,
            nu_max,
            nu_steps,
            log_grid,
            units,
        } => {
            let p = SigmaRhoParams::new(sigma, rho)?;
            let grid = nu_grid(nu_min, nu_max, nu_steps, log_grid)?;
            let rows = bounds_sweep(p, &grid, DEFAULT_GAMMA, default_ladder_tolerance(), None)?;
            write_bounds_csv(&rows, units.into(), out)?;
        }
        Command::CubeEll { amplitude, nu } => {
            let tol = ToleranceConfig::default();
            let e = ell_cube(amplitude, nu, tol)?;
            let row = cube_capacity_bounds(amplitude, nu, tol)?;
            writeln!(
                out,
                "amplitude={amplitude} nu={nu} theta_star={} ell={} minkowski_upper={} awgn_upper={} epi_lower={} active_upper={}",
                e.theta_star,
                e.ell,
                row.minkowski_upper.unwrap_or(f64::NAN),
                row.awgn_upper,
                row.epi_lower,
                row.active_upper.as_str()
            )?;
        }
        Command::McVolume {
            sigma,
            rho,
            n,
            samples,
            seed,
        } => {
            let p = SigmaRhoParams::new(sigma, rho)?;
            let (est, se) = mc_log_volume(p, n, samples, seed)?;
            writeln!(
                out,
                "n={n} samples={samples} seed={seed} estimate={est} std_error={se}"
            )?;
        }
        Command::Subconv {
            ref input,
            check,
            ell_nu,
        } => {
            let seq = read_sequence(input)?;
            subconv_report(&seq, check, ell_nu, out)?;
        }
        Command::Bpsk { amplitude, nu } => {
            let tol = ToleranceConfig::default();
            let c = bpsk_high_noise_capacity(amplitude, nu, tol)?;
            let alpha = amplitude / nu.sqrt();
            writeln!(
                out,
                "amplitude={amplitude} nu={nu} alpha={alpha} capacity={c} series={} awgn_upper={} epi_lower={}",
                high_noise_series(alpha),
                awgn_upper_bound(amplitude * amplitude, nu)?,
                epi_lower_bound((2.0 * amplitude).ln(), nu)?
            )?;
        }
    }
    Ok(())
}

/// Column order of the bounds table.
pub const BOUNDS_HEADER: [&str; 8] = [
    "sigma",
    "rho",
    "nu",
    "epi_lower",
    "awgn_upper",
    "minkowski_upper",
    "active_upper",
    "units",
];

pub fn write_bounds_csv(
    rows: &[ehcap_core::bounds::BoundsRow],
    units: Units,
    out: &mut dyn Write,
) -> CliResult<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(BOUNDS_HEADER)?;
    for row in rows {
        let r = row.in_units(units);
        w.write_record([
            r.sigma.to_string(),
            r.rho.to_string(),
            r.nu.to_string(),
            r.epi_lower.to_string(),
            r.awgn_upper.to_string(),
            r.minkowski_upper.map_or(String::new(), |m| m.to_string()),
            r.active_upper.as_str().to_owned(),
            units.as_str().to_owned(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
