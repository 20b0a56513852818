//! Flux qubit entangled with a ring excitation through the boundary twist.
//!
//! The flux qubit is a two-level label selecting the ring twist: `|f=0>` or
//! `|f=1/2>`. Starting from an equal superposition times a ring state, each
//! branch evolves under its own twisted Hamiltonian; the flux/ring
//! entanglement is the entropy of the reduced flux qubit.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::amplitude::propagate_spectral;
use crate::ring::{RingConfig, SiteVector};
use crate::{Error, Result};

pub const OPEN_TWIST: f64 = 0.0;
pub const HALF_TWIST: f64 = 0.5;

/// Reference time `8.5 pi` for the four-site protocol.
pub const REFERENCE_BETA: f64 = 8.5 * PI;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JointFluxRingState {
    pub beta: f64,
    /// Ring amplitudes conditioned on `|f=0>`.
    pub branch_f0: SiteVector,
    /// Ring amplitudes conditioned on `|f=1/2>`.
    pub branch_f1: SiteVector,
    pub branch_weights: [Complex64; 2],
}

impl JointFluxRingState {
    pub fn norm_sqr(&self) -> f64 {
        self.branch_weights[0].norm_sqr() * self.branch_f0.norm_sqr()
            + self.branch_weights[1].norm_sqr() * self.branch_f1.norm_sqr()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EntanglementReading {
    pub beta: f64,
    pub entropy_ebits: f64,
    /// `|<psi_f0|psi_f1>|`.
    pub branch_overlap: f64,
}

/// Evolve `(|f=0> + |f=1/2>)/sqrt(2) (x) ring_initial` for scaled time `beta`
/// (`J = 1`, `B = 0`).
pub fn evolve_joint(ring_initial: &SiteVector, beta: f64) -> Result<JointFluxRingState> {
    let n = ring_initial.len();
    let open = RingConfig::new(n, OPEN_TWIST)?;
    let half = RingConfig::new(n, HALF_TWIST)?;
    let w = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    Ok(JointFluxRingState {
        beta,
        branch_f0: propagate_spectral(&open, ring_initial, beta)?,
        branch_f1: propagate_spectral(&half, ring_initial, beta)?,
        branch_weights: [w, w],
    })
}

/// Schmidt weights of the 2 x N amplitude matrix, largest first.
///
/// They are the eigenvalues of the 2 x 2 Gram matrix of the weighted
/// branches, i.e. of the reduced flux density matrix.
pub fn schmidt_weights(state: &JointFluxRingState) -> [f64; 2] {
    let [w0, w1] = state.branch_weights;
    let g00 = w0.norm_sqr() * state.branch_f0.norm_sqr();
    let g11 = w1.norm_sqr() * state.branch_f1.norm_sqr();
    let g01 = (w0 * w1.conj() * state.branch_f1.inner(&state.branch_f0)).norm_sqr();
    let trace = g00 + g11;
    let gap = ((g00 - g11).powi(2) + 4.0 * g01).sqrt();
    let upper = 0.5 * (trace + gap);
    // small root via det / upper avoids cancellation
    let det = (g00 * g11 - g01).max(0.0);
    let lower = if upper > 0.0 { det / upper } else { 0.0 };
    [upper, lower]
}

pub fn binary_entropy(p: f64) -> f64 {
    let h = |x: f64| if x <= 0.0 { 0.0 } else { -x * x.log2() };
    (h(p) + h(1.0 - p)).clamp(0.0, 1.0)
}

pub fn flux_ring_entanglement(state: &JointFluxRingState) -> EntanglementReading {
    let [upper, lower] = schmidt_weights(state);
    let total = upper + lower;
    let overlap = state.branch_f0.inner(&state.branch_f1).norm() / (state.branch_f0.norm() * state.branch_f1.norm());
    EntanglementReading {
        beta: state.beta,
        entropy_ebits: binary_entropy(lower / total),
        branch_overlap: overlap.min(1.0),
    }
}

/// Overlap of the state with the ideal target in which the `f=0` branch sits
/// on `site_open` and the `f=1/2` branch on `site_half`, maximized over the
/// local phases of each branch.
pub fn target_overlap(state: &JointFluxRingState, site_open: usize, site_half: usize) -> f64 {
    let [w0, w1] = state.branch_weights;
    (w0.norm() * state.branch_f0.site(site_open).norm() + w1.norm() * state.branch_f1.site(site_half).norm())
        * std::f64::consts::FRAC_1_SQRT_2
}

pub fn entropy_at(ring_initial: &SiteVector, beta: f64) -> Result<EntanglementReading> {
    Ok(flux_ring_entanglement(&evolve_joint(ring_initial, beta)?))
}

pub fn entropy_curve(ring_initial: &SiteVector, betas: &[f64]) -> Result<Vec<EntanglementReading>> {
    betas.par_iter().map(|&b| entropy_at(ring_initial, b)).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EntanglingSearch {
    /// Highest-entropy time on the scan, refined; ties go to the smaller beta.
    pub best: EntanglementReading,
    /// Reading at [`REFERENCE_BETA`], reported whether or not it is in range.
    pub reference: EntanglementReading,
}

fn better(a: &EntanglementReading, b: &EntanglementReading) -> bool {
    a.entropy_ebits > b.entropy_ebits + 1e-12 || ((a.entropy_ebits - b.entropy_ebits).abs() <= 1e-12 && a.beta < b.beta)
}

/// Grid peaks this close to the grid maximum are all refined.
const PEAK_WINDOW: f64 = 1e-3;

fn golden_refine(
    ring_initial: &SiteVector,
    seed: EntanglementReading,
    lo: f64,
    hi: f64,
) -> Result<EntanglementReading> {
    let inv_golden = 0.618_033_988_749_894_8;
    let (mut lo, mut hi) = (lo, hi);
    let mut best = seed;
    let mut x1 = hi - inv_golden * (hi - lo);
    let mut x2 = lo + inv_golden * (hi - lo);
    let mut r1 = entropy_at(ring_initial, x1)?;
    let mut r2 = entropy_at(ring_initial, x2)?;
    while hi - lo > 1e-9 {
        for r in [r1, r2] {
            if better(&r, &best) {
                best = r;
            }
        }
        if r1.entropy_ebits >= r2.entropy_ebits {
            hi = x2;
            x2 = x1;
            r2 = r1;
            x1 = hi - inv_golden * (hi - lo);
            r1 = entropy_at(ring_initial, x1)?;
        } else {
            lo = x1;
            x1 = x2;
            r1 = r2;
            x2 = lo + inv_golden * (hi - lo);
            r2 = entropy_at(ring_initial, x2)?;
        }
    }
    Ok(best)
}

/// Scan entropy on `0, step, 2 step, ... <= beta_max`, then refine every grid
/// peak near the maximum by golden-section search within one step.
/// Ties within `1e-12` ebits go to the earlier time.
pub fn find_entangling_time(ring_initial: &SiteVector, beta_max: f64, step: f64) -> Result<EntanglingSearch> {
    if !(beta_max.is_finite() && beta_max > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "beta_max must be positive, got {beta_max}"
        )));
    }
    if !(step.is_finite() && step > 0.0) {
        return Err(Error::InvalidArgument(format!("step must be positive, got {step}")));
    }
    let count = (beta_max / step + 1e-9).floor() as usize + 1;
    let betas: Vec<f64> = (0..count).map(|k| k as f64 * step).collect();
    let curve = entropy_curve(ring_initial, &betas)?;
    let top = curve.iter().map(|r| r.entropy_ebits).fold(f64::NEG_INFINITY, f64::max);

    let mut best = curve[0];
    for (k, r) in curve.iter().enumerate() {
        let left = k == 0 || curve[k - 1].entropy_ebits <= r.entropy_ebits;
        let right = k + 1 == curve.len() || curve[k + 1].entropy_ebits <= r.entropy_ebits;
        if !(left && right) || r.entropy_ebits < top - PEAK_WINDOW {
            continue;
        }
        let lo = (r.beta - step).max(0.0);
        let hi = (r.beta + step).min(beta_max);
        let refined = golden_refine(ring_initial, *r, lo, hi)?;
        if better(&refined, &best) {
            best = refined;
        }
    }

    let reference = entropy_at(ring_initial, REFERENCE_BETA)?;
    Ok(EntanglingSearch { best, reference })
}
