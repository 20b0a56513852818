use nalgebra::{DVector, SymmetricEigen};
use num_complex::Complex64;

use super::{build_hamiltonian_in, Gauge, RingConfig, SiteVector};
use crate::{Error, Result};

pub(crate) fn check_beta(beta: f64) -> Result<()> {
    if !beta.is_finite() || beta < 0.0 {
        return Err(Error::InvalidArgument(format!(
            "scaled time must be finite and non-negative, got {beta}"
        )));
    }
    Ok(())
}

/// `exp(-i H t) psi0` with `t = beta / 4J`, from a dense eigendecomposition of
/// the explicit Hamiltonian in the given gauge.
///
/// Degenerate eigenspaces are fine: any orthonormal eigenbasis reproduces the
/// same propagator.
pub fn propagate_oracle(config: &RingConfig, psi0: &SiteVector, beta: f64, gauge: Gauge) -> Result<SiteVector> {
    check_beta(beta)?;
    psi0.check_state(config.n())?;
    if beta == 0.0 {
        return Ok(psi0.clone());
    }
    let t = config.time(beta);
    let eig = SymmetricEigen::new(build_hamiltonian_in(config, gauge));
    let v = &eig.eigenvectors;
    let psi = DVector::from_column_slice(psi0.as_slice());
    let mut coeffs = v.adjoint() * psi;
    for (c, &e) in coeffs.iter_mut().zip(eig.eigenvalues.iter()) {
        *c *= Complex64::from_polar(1.0, -e * t);
    }
    let out = v * coeffs;
    Ok(SiteVector::from_amplitudes(out.iter().copied().collect()))
}
