//! Diametric blockage in rings of `N = 4k` sites at half-flux.
//!
//! At `f = 1/2` and `d = N/2` the two Bessel series carry identical orders
//! (`d' = d`) with opposite coefficients, so they cancel term by term and the
//! amplitude vanishes for all times.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::amplitude::{bessel_order_cutoff, xi};
use crate::ring::RingConfig;
use crate::{Error, Result};

pub const BLOCKAGE_ZERO: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BlockageReport {
    pub n: usize,
    pub d: usize,
    pub f: f64,
    pub max_xi_over_samples: f64,
    /// Bessel-series coefficients cancelled pairwise for every order reached.
    pub analytic_zero: bool,
}

impl BlockageReport {
    pub fn holds(&self) -> bool {
        self.analytic_zero && self.max_xi_over_samples <= BLOCKAGE_ZERO
    }
}

fn i_pow(k: usize) -> Complex64 {
    [
        Complex64::new(1.0, 0.0),
        Complex64::new(0.0, 1.0),
        Complex64::new(-1.0, 0.0),
        Complex64::new(0.0, -1.0),
    ][k % 4]
}

fn turns(t: f64) -> Complex64 {
    Complex64::from_polar(1.0, 2.0 * PI * t.rem_euclid(1.0))
}

/// Whether the two Bessel series cancel term by term up to order `max_order`:
/// they must share orders (`d = N - d`) and have opposite coefficients.
pub fn bessel_terms_cancel(n: usize, d: usize, f: f64, max_order: f64) -> bool {
    if d != n - d {
        return false;
    }
    let mut k = 0usize;
    while (d + k * n) as f64 <= max_order + n as f64 {
        let forward = i_pow(d) * i_pow(k * n) * turns(-f * k as f64);
        let backward = i_pow(n - d) * turns(f) * i_pow(k * n) * turns(f * k as f64);
        if (forward + backward).norm() > 1e-14 {
            return false;
        }
        k += 1;
    }
    true
}

/// Blockage report for an arbitrary `(N, d, f)`; the theorem covers only
/// `N = 4k`, `d = 2k`, `f = 1/2`.
pub fn blockage_report(n: usize, d: usize, f: f64, beta_samples: &[f64]) -> Result<BlockageReport> {
    let config = RingConfig::new(n, f)?;
    if let Some(b) = beta_samples.iter().find(|b| !b.is_finite() || **b < 0.0) {
        return Err(Error::InvalidArgument(format!("invalid beta sample {b}")));
    }
    let max_xi = beta_samples
        .iter()
        .map(|&b| xi(&config, d as i64, b))
        .fold(0.0, f64::max);
    let max_beta = beta_samples.iter().copied().fold(0.0, f64::max);
    Ok(BlockageReport {
        n,
        d,
        f,
        max_xi_over_samples: max_xi,
        analytic_zero: bessel_terms_cancel(n, d, f, bessel_order_cutoff(max_beta)),
    })
}

/// Checks the blockage for `N = 4 nn`, `d = 2 nn`, `f = 1/2`.
pub fn verify_blockage(nn: usize, beta_samples: &[f64]) -> Result<BlockageReport> {
    if nn == 0 {
        return Err(Error::InvalidArgument("ring multiple must be at least 1".into()));
    }
    blockage_report(4 * nn, 2 * nn, 0.5, beta_samples)
}

/// `(xi at f = 0, xi at f = 1/2)` to the diametric site.
pub fn switch_contrast(nn: usize, beta: f64) -> Result<(f64, f64)> {
    if nn == 0 {
        return Err(Error::InvalidArgument("ring multiple must be at least 1".into()));
    }
    if !beta.is_finite() || beta < 0.0 {
        return Err(Error::InvalidArgument(format!("invalid beta {beta}")));
    }
    let n = 4 * nn;
    let d = 2 * nn as i64;
    let open = xi(&RingConfig::new(n, 0.0)?, d, beta);
    let closed = xi(&RingConfig::new(n, 0.5)?, d, beta);
    Ok((open, closed))
}

/// Magnitudes of the summed contributions of each degenerate mode pair to
/// the diametric amplitude at half-flux.
pub fn energy_pair_residuals(nn: usize, beta: f64) -> Result<Vec<f64>> {
    let n = 4 * nn;
    let config = RingConfig::new(n, 0.5)?;
    let d = (2 * nn) as f64;
    let t = config.time(beta);
    let term = |m: usize| {
        let dynamic = Complex64::from_polar(1.0, -config.mode_energy(m) * t);
        dynamic * turns(d * (m as f64 + 0.5) / n as f64) / n as f64
    };
    let mut modes: Vec<usize> = (1..=n).collect();
    modes.sort_by(|&a, &b| config.mode_energy(a).total_cmp(&config.mode_energy(b)));
    let mut residuals = Vec::with_capacity(n / 2);
    for pair in modes.chunks(2) {
        let (a, b) = (pair[0], pair[1]);
        if (config.mode_energy(a) - config.mode_energy(b)).abs() > 1e-12 {
            return Err(Error::InvalidArgument(format!("modes {a} and {b} are not degenerate")));
        }
        residuals.push((term(a) + term(b)).norm());
    }
    Ok(residuals)
}
