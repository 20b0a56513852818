//! Site-to-site transition amplitudes `f_{r,s}(beta)`.
//!
//! Three independent routes are provided:
//! * spectral: the inverse DFT of the mode phases, `O(N)` per evaluation;
//! * Bessel: the Jacobi–Anger rewrite as two Bessel series in orders `d + kN`
//!   and `N - d + kN`;
//! * oracle: dense matrix propagation of a localized excitation.
//!
//! All three report the amplitude in the twisted-boundary frame, so their
//! complex values (not only magnitudes) coincide.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bessel::bessel_j_sequence;
use crate::ring::{propagate_oracle, Gauge, RingConfig, SiteVector};
use crate::{Error, Result};

/// Rounding slack allowed above |f| = 1 before it counts as unphysical.
pub const XI_CLIP_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Spectral,
    Bessel,
    Oracle,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Spectral => "spectral",
            Method::Bessel => "bessel",
            Method::Oracle => "oracle",
        }
    }
}

/// Receiver `r`, sender `s` (both 1-based) and scaled time on a ring.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AmplitudeQuery {
    pub config: RingConfig,
    receiver: usize,
    sender: usize,
    beta: f64,
}

impl AmplitudeQuery {
    pub fn new(config: RingConfig, receiver: usize, sender: usize, beta: f64) -> Result<Self> {
        let n = config.n();
        for (name, site) in [("receiver", receiver), ("sender", sender)] {
            if site == 0 || site > n {
                return Err(Error::InvalidArgument(format!("{name} site {site} outside 1..={n}")));
            }
        }
        if !beta.is_finite() || beta < 0.0 {
            return Err(Error::InvalidArgument(format!(
                "scaled time must be finite and non-negative, got {beta}"
            )));
        }
        Ok(Self {
            config,
            receiver,
            sender,
            beta,
        })
    }

    /// Query for offset `d` (any integer, reduced modulo N) from site 1.
    pub fn from_offset(config: RingConfig, d: i64, beta: f64) -> Result<Self> {
        let d = reduce_offset(d, config.n());
        Self::new(config, d + 1, 1, beta)
    }

    pub fn receiver(&self) -> usize {
        self.receiver
    }

    pub fn sender(&self) -> usize {
        self.sender
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// `d = (r - s) mod N`, in `0..N`.
    pub fn offset(&self) -> usize {
        reduce_offset(self.receiver as i64 - self.sender as i64, self.config.n())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AmplitudeResult {
    pub value: Complex64,
    pub xi: f64,
    pub method: Method,
}

pub fn reduce_offset(d: i64, n: usize) -> usize {
    d.rem_euclid(n as i64) as usize
}

/// `|value|`, with values just above 1 clipped and larger excess rejected.
pub fn clip_xi(magnitude: f64) -> Result<f64> {
    if magnitude > 1.0 + XI_CLIP_SLACK || !magnitude.is_finite() {
        return Err(Error::Unphysical(magnitude));
    }
    Ok(magnitude.min(1.0))
}

fn result(value: Complex64, method: Method) -> Result<AmplitudeResult> {
    Ok(AmplitudeResult {
        value,
        xi: clip_xi(value.norm())?,
        method,
    })
}

/// `e^{i 2 pi t}` with the argument reduced to its fractional part first.
fn unit_turns(turns: f64) -> Complex64 {
    Complex64::from_polar(1.0, 2.0 * PI * turns.rem_euclid(1.0))
}

fn i_pow(k: usize) -> Complex64 {
    match k % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

/// Global phase `e^{-i (onsite energy) t}` shared by every amplitude.
fn onsite_phase(config: &RingConfig, beta: f64) -> Complex64 {
    Complex64::from_polar(1.0, -config.onsite_energy() * config.time(beta))
}

/// Spectral amplitude for offset `d` in `0..N`.
pub(crate) fn spectral_value(config: &RingConfig, d: usize, beta: f64) -> Complex64 {
    let n = config.n();
    let sum: Complex64 = (1..=n)
        .map(|m| {
            let turns = (d as f64 * (m as f64 + config.twist()) / n as f64).rem_euclid(1.0);
            Complex64::from_polar(1.0, beta * config.mode_cos(m)) * Complex64::from_polar(1.0, 2.0 * PI * turns)
        })
        .sum();
    onsite_phase(config, beta) * sum / n as f64
}

pub fn amplitude_spectral(q: &AmplitudeQuery) -> Result<AmplitudeResult> {
    result(spectral_value(&q.config, q.offset(), q.beta), Method::Spectral)
}

/// Highest Bessel order that can contribute at scaled time `beta`.
pub fn bessel_order_cutoff(beta: f64) -> f64 {
    beta + 40.0 * beta.cbrt().max(2.0)
}

/// Bessel-series amplitude.
///
/// Each k-sum stops once its order exceeds [`bessel_order_cutoff`] and three
/// consecutive terms have magnitude below `min(tol, 1e-18)`.
pub fn amplitude_bessel(q: &AmplitudeQuery, tol: f64) -> Result<AmplitudeResult> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::InvalidArgument(format!("tolerance must be positive, got {tol}")));
    }
    let config = &q.config;
    let n = config.n();
    let f = config.twist();
    let d = q.offset();
    let d_rev = n - d;
    let beta = q.beta;
    let cutoff = bessel_order_cutoff(beta);
    let term_floor = tol.min(1e-18);
    let max_order = cutoff.ceil() as usize + 4 * n;
    let jn = bessel_j_sequence(max_order, beta)?;

    let mut forward = Complex64::new(0.0, 0.0);
    let mut backward = Complex64::new(0.0, 0.0);
    let mut quiet = 0;
    let mut k = 0usize;
    loop {
        let lo = d + k * n;
        let hi = d_rev + k * n;
        if lo.max(hi) > max_order {
            return Err(Error::Truncation { beta, max_order });
        }
        let kn = k * n;
        let a = jn[lo];
        let b = jn[hi];
        forward += i_pow(kn) * unit_turns(-f * k as f64) * a;
        backward += i_pow(kn) * unit_turns(f * k as f64) * b;
        if a.abs() < term_floor && b.abs() < term_floor {
            quiet += 1;
        } else {
            quiet = 0;
        }
        if lo.min(hi) as f64 > cutoff && quiet >= 3 {
            break;
        }
        k += 1;
    }
    let value = onsite_phase(config, beta) * (i_pow(d) * forward + i_pow(d_rev) * unit_turns(f) * backward);
    result(value, Method::Bessel)
}

/// Dense-matrix amplitude, converted from the uniform gauge to the
/// twisted-boundary frame.
pub fn amplitude_oracle(q: &AmplitudeQuery) -> Result<AmplitudeResult> {
    let config = &q.config;
    let n = config.n();
    let start = SiteVector::localized(n, q.sender)?;
    let evolved = propagate_oracle(config, &start, q.beta, Gauge::Uniform)?;
    let frame = unit_turns(q.offset() as f64 * config.twist() / n as f64);
    result(evolved.site(q.receiver) * frame, Method::Oracle)
}

pub fn amplitude(q: &AmplitudeQuery, method: Method) -> Result<AmplitudeResult> {
    match method {
        Method::Spectral => amplitude_spectral(q),
        Method::Bessel => amplitude_bessel(q, 1e-12),
        Method::Oracle => amplitude_oracle(q),
    }
}

/// Transfer quality `xi = |f_{r,s}|` for offset `d = r - s` (reduced mod N).
pub fn xi(config: &RingConfig, d: i64, beta: f64) -> f64 {
    let d = reduce_offset(d, config.n());
    spectral_value(config, d, beta).norm().min(1.0)
}

/// Evolve an arbitrary one-magnon state with the closed-form propagator
/// (uniform gauge).
pub fn propagate_spectral(config: &RingConfig, psi0: &SiteVector, beta: f64) -> Result<SiteVector> {
    if !beta.is_finite() || beta < 0.0 {
        return Err(Error::InvalidArgument(format!(
            "scaled time must be finite and non-negative, got {beta}"
        )));
    }
    psi0.check_state(config.n())?;
    if beta == 0.0 {
        return Ok(psi0.clone());
    }
    let n = config.n();
    let kernel: Vec<Complex64> = (0..n)
        .map(|d| spectral_value(config, d, beta) * unit_turns(-(d as f64) * config.twist() / n as f64))
        .collect();
    let amps = psi0.as_slice();
    let out = (0..n)
        .map(|r| (0..n).map(|s| kernel[(r + n - s) % n] * amps[s]).sum())
        .collect();
    Ok(SiteVector::from_amplitudes(out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bessel::bessel_j;

    fn query(n: usize, f: f64, d: i64, beta: f64) -> AmplitudeQuery {
        AmplitudeQuery::from_offset(RingConfig::new(n, f).unwrap(), d, beta).unwrap()
    }

    #[test]
    fn zero_time_is_kronecker_delta() {
        for n in [3, 4, 7] {
            for d in 0..n as i64 {
                let res = amplitude_spectral(&query(n, 0.37, d, 0.0)).unwrap();
                let want = if d == 0 { 1.0 } else { 0.0 };
                assert!((res.value - want).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn table_points() {
        let cases = [
            (5, -0.25, 1, 1214.3, 0.9998),
            (7, 0.25, 2, 1942.6, 0.9994),
            (5, 0.25, 3, 162.51, 0.9999),
        ];
        for (n, f, d, beta, want) in cases {
            let res = amplitude_spectral(&query(n, f, d, beta)).unwrap();
            assert!((res.xi - want).abs() < 2e-3, "N={n} d={d}: {}", res.xi);
        }
    }

    #[test]
    fn square_ring_transfer() {
        assert!((xi(&RingConfig::new(4, 0.0).unwrap(), 2, PI) - 1.0).abs() < 1e-12);
        assert_eq!(xi(&RingConfig::new(3, 0.0).unwrap(), 0, 0.0), 1.0);
    }

    #[test]
    fn bessel_blockage() {
        for beta in [1.0, 10.0, 100.0, 1000.0] {
            let res = amplitude_bessel(&query(4, 0.5, 2, beta), 1e-12).unwrap();
            assert!(res.xi < 1e-12, "beta={beta}: {}", res.xi);
        }
    }

    #[test]
    fn large_ring_reduces_to_single_bessel() {
        let res = amplitude_bessel(&query(200, 0.3, 3, 10.0), 1e-12).unwrap();
        assert!((res.xi - bessel_j(3, 10.0).unwrap().abs()).abs() < 1e-6);
    }

    #[test]
    fn methods_agree_including_phase() {
        let cases = [
            (5, -0.25, 2, 162.51),
            (4, 0.0, 1, 3.0),
            (9, 0.41, 7, 777.7),
            (13, -0.12, 0, 4321.0),
        ];
        for (n, f, d, beta) in cases {
            let q = query(n, f, d, beta);
            let s = amplitude_spectral(&q).unwrap();
            let b = amplitude_bessel(&q, 1e-12).unwrap();
            let o = amplitude_oracle(&q).unwrap();
            assert!((s.value - b.value).norm() < 1e-9, "bessel N={n} d={d}");
            assert!((s.value - o.value).norm() < 1e-9, "oracle N={n} d={d}");
        }
    }

    #[test]
    fn offset_reduction() {
        let cfg = RingConfig::new(5, 0.1).unwrap();
        assert_eq!(xi(&cfg, -1, 17.0), xi(&cfg, 4, 17.0));
        assert_eq!(xi(&cfg, 6, 17.0), xi(&cfg, 1, 17.0));
        let q = AmplitudeQuery::new(cfg, 2, 5, 1.0).unwrap();
        assert_eq!(q.offset(), 2);
    }

    #[test]
    fn invalid_queries() {
        let cfg = RingConfig::new(5, 0.0).unwrap();
        assert!(AmplitudeQuery::new(cfg, 0, 1, 1.0).is_err());
        assert!(AmplitudeQuery::new(cfg, 1, 6, 1.0).is_err());
        assert!(AmplitudeQuery::new(cfg, 1, 1, -1.0).is_err());
        assert!(amplitude_bessel(&AmplitudeQuery::new(cfg, 1, 1, 1.0).unwrap(), 0.0).is_err());
    }

    #[test]
    fn clipping() {
        assert_eq!(clip_xi(1.0 + 5e-13).unwrap(), 1.0);
        assert!(clip_xi(1.0 + 1e-9).is_err());
        assert_eq!(clip_xi(0.5).unwrap(), 0.5);
    }

    #[test]
    fn spectral_propagation_matches_matrix() {
        let cfg = RingConfig::with_params(6, 1.0, 0.5, 0.27).unwrap();
        let amps = (0..6)
            .map(|j| Complex64::new(1.0 + j as f64, -(j as f64) * 0.5))
            .collect::<Vec<_>>();
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        let psi = SiteVector::from_amplitudes(amps.iter().map(|a| a / norm).collect());
        let a = propagate_spectral(&cfg, &psi, 31.4).unwrap();
        let b = propagate_oracle(&cfg, &psi, 31.4, Gauge::Uniform).unwrap();
        for (x, y) in a.as_slice().iter().zip(b.as_slice()) {
            assert!((x - y).norm() < 1e-11);
        }
    }
}
