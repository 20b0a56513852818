use proptest::prelude::*;
use spinring::amplitude::{amplitude, propagate_spectral, AmplitudeQuery, Method};
use spinring::ring::full_space_oracle;
use spinring::{bessel_j, RingConfig, SiteVector};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn all_methods_agree(n in 3usize..=30, f in -0.5f64..0.5, beta in 0.0f64..5000.0, d in 0i64..30) {
        let q = AmplitudeQuery::from_offset(RingConfig::new(n, f).unwrap(), d, beta).unwrap();
        let s = amplitude(&q, Method::Spectral).unwrap();
        let b = amplitude(&q, Method::Bessel).unwrap();
        let o = amplitude(&q, Method::Oracle).unwrap();
        prop_assert!((s.xi - b.xi).abs() < 1e-8);
        prop_assert!((s.xi - o.xi).abs() < 1e-8);
        prop_assert!((b.xi - o.xi).abs() < 1e-8);
        prop_assert!((s.value - o.value).norm() < 1e-8);
    }

    #[test]
    fn many_spin_evolution_stays_in_sector(n in 4usize..=8, f in -0.5f64..0.5, beta in 0.0f64..50.0, site in 1usize..=8) {
        let config = RingConfig::new(n, f).unwrap();
        let start = SiteVector::localized(n, (site - 1) % n + 1).unwrap();
        let full = full_space_oracle(&config, &start, beta).unwrap();
        let sector = propagate_spectral(&config, &start, beta).unwrap();
        for (a, b) in full.as_slice().iter().zip(sector.as_slice()) {
            prop_assert!((a - b).norm() < 1e-10);
        }
    }
}

#[test]
fn long_ring_reduces_to_bessel_magnitude() {
    for f in [0.0, 0.13, -0.37, 0.5] {
        let config = RingConfig::new(200, f).unwrap();
        for d in 0..=5i64 {
            for k in 0..=200 {
                let beta = 0.1 * k as f64;
                let exact = bessel_j(d, beta).unwrap().abs();
                let q = AmplitudeQuery::from_offset(config, d, beta).unwrap();
                let got = amplitude(&q, Method::Spectral).unwrap().xi;
                assert!((got - exact).abs() <= 1e-6, "f={f} d={d} beta={beta}");
            }
        }
    }
}
