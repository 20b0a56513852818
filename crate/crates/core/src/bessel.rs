//! Integer-order Bessel functions of the first kind for large orders and
//! arguments.
//!
//! All orders `0..=n_max` are produced together by Miller's downward
//! recurrence, started well beyond the turning point `n ~ x` where `J_n`
//! decays super-exponentially. The unnormalized sequence is scaled with
//! `J_0^2 + 2 sum J_k^2 = 1`, which has no cancellation; the overall sign
//! comes from `J_0 + 2 sum J_{2k} = 1`.

use crate::{Error, Result};

const RESCALE_ABOVE: f64 = 1e140;
const RESCALE_BY: f64 = 1e-140;

/// Start order for the downward recurrence.
fn start_order(n_max: usize, x: f64) -> usize {
    let turning = x.ceil() as usize;
    let margin = (30.0 * x.cbrt().max(2.0)).ceil() as usize + 20;
    let m = n_max.max(turning) + margin;
    m + (m & 1)
}

/// `J_0(x), ..., J_{n_max}(x)` for finite `x`.
pub fn bessel_j_sequence(n_max: usize, x: f64) -> Result<Vec<f64>> {
    if !x.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "Bessel argument must be finite, got {x}"
        )));
    }
    let mut out = vec![0.0; n_max + 1];
    if x < 0.0 {
        let mut seq = bessel_j_sequence(n_max, -x)?;
        for (k, v) in seq.iter_mut().enumerate() {
            if k % 2 == 1 {
                *v = -*v;
            }
        }
        return Ok(seq);
    }
    if x == 0.0 {
        out[0] = 1.0;
        return Ok(out);
    }
    if x < 1e-5 {
        // two leading terms of the ascending series; error below x^4 (x/2)^n / n!
        let half = 0.5 * x;
        let mut lead = 1.0;
        for (k, v) in out.iter_mut().enumerate() {
            if k > 0 {
                lead *= half / k as f64;
            }
            if lead == 0.0 {
                break;
            }
            *v = lead * (1.0 - half * half / (k as f64 + 1.0));
        }
        return Ok(out);
    }

    let m = start_order(n_max, x);
    let two_over_x = 2.0 / x;
    let mut upper = 0.0; // J_{k+1}
    let mut current = 1.0; // J_k, for k = m
    let mut squares = 0.0;
    let mut even_sum = 0.0;
    for k in (0..=m).rev() {
        if k <= n_max {
            out[k] = current;
        }
        if k == 0 {
            squares += current * current;
            even_sum += current;
        } else {
            squares += 2.0 * current * current;
            if k % 2 == 0 {
                even_sum += 2.0 * current;
            }
            let lower = k as f64 * two_over_x * current - upper;
            upper = current;
            current = lower;
            if current.abs() > RESCALE_ABOVE {
                current *= RESCALE_BY;
                upper *= RESCALE_BY;
                squares *= RESCALE_BY * RESCALE_BY;
                even_sum *= RESCALE_BY;
                let stored_from = k.min(n_max + 1);
                for v in &mut out[stored_from..] {
                    *v *= RESCALE_BY;
                }
            }
        }
    }
    let scale = even_sum.signum() / squares.sqrt();
    for v in &mut out {
        *v *= scale;
    }
    Ok(out)
}

/// `J_n(x)` for a single non-negative order.
///
/// Negative orders are rejected; use `J_{-n} = (-1)^n J_n`.
pub fn bessel_j(n: i64, x: f64) -> Result<f64> {
    if n < 0 {
        return Err(Error::InvalidArgument(format!(
            "Bessel order must be non-negative, got {n}"
        )));
    }
    let n = n as usize;
    Ok(bessel_j_sequence(n, x)?[n])
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Ascending power series, convergent and accurate for small x.
    fn series_oracle(n: usize, x: f64, terms: usize) -> f64 {
        let half = 0.5 * x;
        let mut lead = 1.0;
        for k in 1..=n {
            lead *= half / k as f64;
        }
        let mut sum = 0.0;
        let mut term = lead;
        for k in 0..terms {
            sum += term;
            term *= -half * half / ((k + 1) as f64 * (n + k + 1) as f64);
        }
        sum
    }

    // Frozen with mpmath.besselj at 40 significant digits.
    #[allow(clippy::excessive_precision)]
    const REFERENCE: &[(usize, f64, f64)] = &[
        (0, 1.0, 0.7651976865579665514497),
        (5, 1.0, 0.0002497577302112344313751),
        (1, 10.0, 0.04347274616886143666975),
        (3, 10.0, 0.05837937930518681234294),
        (40, 10.0, 6.030895312346906631743e-21),
        (0, 162.51, -0.004264583720827336843867),
        (7, 1214.3, -0.01764639215541473540144),
        (1200, 1214.3, 0.04651841369212968294278),
        (1300, 1214.3, 9.474465309021619348378e-12),
        (3, 4999.0, -0.0006590574522485474436169),
        (5000, 4999.0, 0.02475620214489574481324),
        (0, 12000.0, -0.0007166354917612569873341),
        (11000, 12000.0, -0.008116075124119160747042),
        (12050, 12000.0, 0.0005636211769325545500342),
        (12500, 12000.0, 1.333651934822750068893e-44),
    ];

    #[test]
    fn origin() {
        assert_eq!(bessel_j(0, 0.0).unwrap(), 1.0);
        assert_eq!(bessel_j(3, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn negative_order_rejected() {
        assert!(bessel_j(-1, 2.0).is_err());
        assert!(bessel_j(1, f64::NAN).is_err());
    }

    #[test]
    fn agrees_with_power_series() {
        assert!((bessel_j(5, 1.0).unwrap() - series_oracle(5, 1.0, 30)).abs() < 1e-13);
        for n in 0..12 {
            for x in [1e-6, 1e-3, 0.3, 1.0, 2.5, 4.0] {
                let want = series_oracle(n, x, 40);
                assert!((bessel_j(n as i64, x).unwrap() - want).abs() < 1e-14, "n={n} x={x}");
            }
        }
    }

    #[test]
    fn agrees_with_high_precision_reference() {
        for &(n, x, want) in REFERENCE {
            let got = bessel_j(n as i64, x).unwrap();
            assert!((got - want).abs() < 1e-12, "J_{n}({x}) = {got}, want {want}");
        }
    }

    #[test]
    fn recurrence_residual() {
        for x in [0.7f64, 12.0, 333.3, 4321.0, 11999.0] {
            let n_max = (x + 50.0 * x.cbrt() + 100.0) as usize;
            let seq = bessel_j_sequence(n_max, x).unwrap();
            let scale = seq.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            for n in 1..n_max {
                let r = seq[n - 1] + seq[n + 1] - 2.0 * n as f64 / x * seq[n];
                assert!(r.abs() <= 1e-10 * scale.max(1.0), "x={x} n={n} r={r}");
            }
        }
    }

    #[test]
    fn sum_rules() {
        for x in [0.5f64, 50.0, 5000.0] {
            let seq = bessel_j_sequence((x as usize) + 400, x).unwrap();
            let squares: f64 = seq[0] * seq[0] + 2.0 * seq[1..].iter().map(|v| v * v).sum::<f64>();
            let even: f64 = seq[0] + 2.0 * seq.iter().skip(2).step_by(2).sum::<f64>();
            assert!((squares - 1.0).abs() < 1e-13);
            assert!((even - 1.0).abs() < 1e-11);
        }
    }

    #[test]
    fn parity_for_negative_argument() {
        let pos = bessel_j_sequence(6, 3.7).unwrap();
        let neg = bessel_j_sequence(6, -3.7).unwrap();
        for k in 0..=6 {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            assert_eq!(neg[k], sign * pos[k]);
        }
    }
}
