//! Single-excitation dynamics on a Heisenberg XXX spin ring threaded by a
//! flux (twisted boundary conditions).
//!
//! The crate covers the ring Hamiltonian and its plane-wave spectrum, three
//! independent routes to the site-to-site transition amplitude (closed-form
//! spectral sum, Bessel series, dense matrix propagation), a search over twist
//! and time that maximizes transfer quality, the diametric blockage of
//! `N = 4k` rings at half-flux, and a flux-qubit/ring entangling protocol.
//!
//! Time is always the scaled time `beta = 4 J t`.

pub mod amplitude;
pub mod bessel;
pub mod blockage;
pub mod cli;
pub mod entangler;
mod error;
pub mod optimizer;
pub mod output;
pub mod ring;

pub use amplitude::{amplitude_bessel, amplitude_spectral, xi, AmplitudeQuery, AmplitudeResult, Method};
pub use bessel::{bessel_j, bessel_j_sequence};
pub use error::{Error, Result};
pub use ring::{RingConfig, SiteVector};
