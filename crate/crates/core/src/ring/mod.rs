//! Ring configuration, the one-magnon Hamiltonian and its plane-wave modes.
//!
//! Sites are labelled `1..=N` in the public API and stored zero-based. The
//! basis state `|j>` is a single flipped spin at site `j` over the aligned
//! ferromagnetic background.

mod full_space;
mod oracle;

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub use full_space::{full_space_evolution, full_space_oracle, FullSpaceEvolution, FULL_SPACE_MAX_SITES};
pub use oracle::propagate_oracle;

/// Ring size, exchange coupling `J`, field `B` and twist fraction `f = Phi / 2 pi`.
///
/// Construction validates every field, so all downstream operations may
/// assume a physical configuration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawConfig")]
pub struct RingConfig {
    n: usize,
    coupling: f64,
    field: f64,
    twist: f64,
}

#[derive(Deserialize)]
struct RawConfig {
    n: usize,
    #[serde(default = "default_coupling")]
    coupling: f64,
    #[serde(default)]
    field: f64,
    #[serde(default)]
    twist: f64,
}

fn default_coupling() -> f64 {
    1.0
}

impl TryFrom<RawConfig> for RingConfig {
    type Error = Error;

    fn try_from(raw: RawConfig) -> Result<Self> {
        RingConfig::with_params(raw.n, raw.coupling, raw.field, raw.twist)
    }
}

impl RingConfig {
    /// Ring with `J = 1`, `B = 0`.
    pub fn new(n: usize, twist: f64) -> Result<Self> {
        Self::with_params(n, 1.0, 0.0, twist)
    }

    pub fn with_params(n: usize, coupling: f64, field: f64, twist: f64) -> Result<Self> {
        if n < 3 {
            return Err(Error::InvalidConfig(format!("ring needs at least 3 sites, got {n}")));
        }
        if !coupling.is_finite() || coupling <= 0.0 {
            return Err(Error::InvalidConfig(format!(
                "coupling J must be finite and positive, got {coupling}"
            )));
        }
        if !field.is_finite() {
            return Err(Error::InvalidConfig(format!("field B must be finite, got {field}")));
        }
        if !twist.is_finite() {
            return Err(Error::InvalidConfig(format!("twist f must be finite, got {twist}")));
        }
        Ok(Self {
            n,
            coupling,
            field,
            twist,
        })
    }

    pub fn with_twist(&self, twist: f64) -> Result<Self> {
        Self::with_params(self.n, self.coupling, self.field, twist)
    }

    pub fn with_field(&self, field: f64) -> Result<Self> {
        Self::with_params(self.n, self.coupling, field, self.twist)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn coupling(&self) -> f64 {
        self.coupling
    }

    pub fn field(&self) -> f64 {
        self.field
    }

    pub fn twist(&self) -> f64 {
        self.twist
    }

    /// Diagonal energy of every one-magnon basis state, `-J (N - 4) - B (N - 2)`.
    pub fn onsite_energy(&self) -> f64 {
        let n = self.n as f64;
        -self.coupling * (n - 4.0) - self.field * (n - 2.0)
    }

    /// Physical time for a scaled time `beta = 4 J t`.
    pub fn time(&self, beta: f64) -> f64 {
        beta / (4.0 * self.coupling)
    }

    /// Momentum `2 pi (m + f) / N` of mode `m` (1-based).
    pub fn mode_momentum(&self, m: usize) -> f64 {
        2.0 * PI * (m as f64 + self.twist) / self.n as f64
    }

    /// `cos(2 pi (m + f) / N)`, evaluated on the angle folded into `[0, pi]` so
    /// that degenerate modes get bit-identical values.
    pub fn mode_cos(&self, m: usize) -> f64 {
        let n = self.n as f64;
        let x = (m as f64 + self.twist).rem_euclid(n);
        (2.0 * PI * x.min(n - x) / n).cos()
    }

    pub fn mode_energy(&self, m: usize) -> f64 {
        -4.0 * self.coupling * self.mode_cos(m) + self.onsite_energy()
    }
}

/// Placement of the twist phase on the ring bonds.
///
/// Both gauges are related by a diagonal unitary, so site-amplitude
/// magnitudes agree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Gauge {
    /// Phase `2 pi f / N` on every bond; eigenvectors are pure plane waves.
    #[default]
    Uniform,
    /// Whole phase `2 pi f` on the bond closing the ring (`N -> 1`).
    SingleBond,
}

impl Gauge {
    /// Phase multiplying the amplitude for a magnon hopping forward across
    /// bond `bond -> bond + 1` (zero-based, wrapping).
    pub fn forward_hop_phase(self, config: &RingConfig, bond: usize) -> Complex64 {
        let n = config.n();
        let angle = match self {
            Gauge::Uniform => 2.0 * PI * config.twist() / n as f64,
            Gauge::SingleBond if bond == n - 1 => 2.0 * PI * config.twist(),
            Gauge::SingleBond => 0.0,
        };
        Complex64::from_polar(1.0, -angle)
    }
}

/// Normalized amplitudes over ring sites.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SiteVector(Vec<Complex64>);

impl SiteVector {
    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Self {
        Self(amplitudes)
    }

    /// Basis state `|site>` (1-based).
    pub fn localized(n: usize, site: usize) -> Result<Self> {
        if site == 0 || site > n {
            return Err(Error::InvalidArgument(format!("site {site} outside 1..={n}")));
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); n];
        amps[site - 1] = Complex64::new(1.0, 0.0);
        Ok(Self(amps))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Amplitude at a 1-based site.
    pub fn site(&self, site: usize) -> Complex64 {
        self.0[site - 1]
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<Complex64> {
        self.0
    }

    pub fn norm_sqr(&self) -> f64 {
        self.0.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &SiteVector) -> Complex64 {
        self.0.iter().zip(&other.0).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn scaled(&self, factor: Complex64) -> SiteVector {
        SiteVector(self.0.iter().map(|a| a * factor).collect())
    }

    pub(crate) fn check_state(&self, n: usize) -> Result<()> {
        if self.len() != n {
            return Err(Error::InvalidArgument(format!(
                "state has {} sites, ring has {n}",
                self.len()
            )));
        }
        if self.0.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(Error::InvalidArgument("state has non-finite amplitudes".into()));
        }
        let norm = self.norm();
        if (norm - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidArgument(format!("state is not normalized (norm {norm})")));
        }
        Ok(())
    }
}

/// One plane-wave mode of the ring.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Mode {
    /// Mode index, `1..=N`.
    pub index: usize,
    pub energy: f64,
    pub vector: SiteVector,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModeSpectrum {
    pub modes: Vec<Mode>,
}

impl ModeSpectrum {
    pub fn energies(&self) -> Vec<f64> {
        self.modes.iter().map(|m| m.energy).collect()
    }
}

/// One-magnon Hamiltonian in the uniform gauge.
pub fn build_hamiltonian(config: &RingConfig) -> DMatrix<Complex64> {
    build_hamiltonian_in(config, Gauge::Uniform)
}

pub fn build_hamiltonian_in(config: &RingConfig, gauge: Gauge) -> DMatrix<Complex64> {
    let n = config.n();
    let hop = -2.0 * config.coupling();
    let mut h = DMatrix::from_element(n, n, Complex64::new(0.0, 0.0));
    for j in 0..n {
        h[(j, j)] = Complex64::new(config.onsite_energy(), 0.0);
    }
    for bond in 0..n {
        let next = (bond + 1) % n;
        let amp = gauge.forward_hop_phase(config, bond) * hop;
        h[(next, bond)] = amp;
        h[(bond, next)] = amp.conj();
    }
    h
}

/// Closed-form spectrum with uniform-gauge plane waves `e^{i 2 pi m j / N} / sqrt(N)`.
pub fn mode_spectrum(config: &RingConfig) -> ModeSpectrum {
    let n = config.n();
    let scale = 1.0 / (n as f64).sqrt();
    let modes = (1..=n)
        .map(|m| {
            let amps = (1..=n)
                .map(|j| Complex64::from_polar(scale, 2.0 * PI * ((m * j) % n) as f64 / n as f64))
                .collect();
            Mode {
                index: m,
                energy: config.mode_energy(m),
                vector: SiteVector(amps),
            }
        })
        .collect();
    ModeSpectrum { modes }
}
