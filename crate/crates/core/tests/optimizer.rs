use spinring::optimizer::{multiparty_plan, optimize_transfer, search_transfer, SearchSpec, TABLE_ONE};
use spinring::{xi, RingConfig};

fn quarter(beta_max: f64) -> SearchSpec {
    SearchSpec::with_twists(vec![-0.25, 0.25]).with_window(0.0, beta_max)
}

#[test]
fn records_recompute_exactly() {
    let spec = SearchSpec::default().with_window(0.0, 300.0);
    for (n, d) in [(5, 1), (5, 2), (6, 2), (7, 3)] {
        let search = search_transfer(n, d, &spec).unwrap();
        for rec in std::iter::once(&search.best).chain(&search.candidates) {
            let again = xi(&RingConfig::new(rec.n, rec.f).unwrap(), rec.d as i64, rec.beta);
            assert!((again - rec.xi).abs() < 1e-10, "{rec:?}");
        }
    }
}

#[test]
fn mirrored_offsets_share_optimum() {
    for (n, d) in [(5, 1), (5, 2), (7, 2), (7, 3)] {
        let a = optimize_transfer(n, d, &quarter(2500.0)).unwrap();
        let b = optimize_transfer(n, n - d, &quarter(2500.0)).unwrap();
        assert!((a.xi - b.xi).abs() < 1e-10);
        assert!((a.beta - b.beta).abs() < 1e-3);
        assert_eq!(a.f, -b.f);
    }
}

#[test]
fn halving_the_grid_keeps_the_optimum() {
    for r in TABLE_ONE {
        let coarse = optimize_transfer(r.n, r.d, &quarter(5000.0)).unwrap();
        let fine = optimize_transfer(r.n, r.d, &quarter(5000.0).with_step(0.01)).unwrap();
        assert!((coarse.xi - fine.xi).abs() < 1e-4, "n={} d={}", r.n, r.d);
    }
}

#[test]
fn longer_window_never_worse() {
    let mut last = 0.0;
    for beta_max in [50.0, 200.0, 800.0, 2000.0] {
        let rec = optimize_transfer(6, 1, &SearchSpec::default().with_window(0.0, beta_max)).unwrap();
        assert!(rec.xi >= last - 1e-12, "beta_max={beta_max}");
        last = rec.xi;
    }
}

#[test]
fn plan_reuses_equal_offsets() {
    let plans = multiparty_plan(9, &[1, 4, 7], &quarter(1000.0)).unwrap();
    assert_eq!(plans.len(), 3);
    assert_eq!((plans[0].sender, plans[0].receiver), (1, 4));
    assert_eq!(plans[0].record.d, 3);
    assert_eq!(plans[2].record.d, 3);
    assert_eq!(plans[0].record.xi, plans[2].record.xi);
    assert_eq!(plans[1].record.d, 6);
}
