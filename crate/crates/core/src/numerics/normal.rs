use std::f64::consts::{FRAC_1_SQRT_2, PI};

use crate::error::{Error, Result};

const SQRT_2PI: f64 = 2.506_628_274_631_000_7;

/// Above this argument erfc switches from the power series to the
/// continued fraction.
const ERFC_SERIES_LIMIT: f64 = 3.0;

pub fn normal_pdf(z: f64) -> f64 {
    (-0.5 * z * z).exp() / SQRT_2PI
}

/// Standard normal CDF, absolute error below 1e-15 on the whole line.
pub fn normal_cdf(z: f64) -> Result<f64> {
    if !z.is_finite() {
        return Err(Error::Domain(format!(
            "normal_cdf argument {z} is not finite"
        )));
    }
    let x = z.abs() * FRAC_1_SQRT_2;
    let tail = 0.5 * erfc_nonneg(x);
    Ok(if z < 0.0 { tail } else { 1.0 - tail })
}

/// Lower-tail probability without the domain check; `z` must be finite.
fn lower_tail(z: f64) -> f64 {
    let tail = 0.5 * erfc_nonneg(z.abs() * FRAC_1_SQRT_2);
    if z < 0.0 {
        tail
    } else {
        1.0 - tail
    }
}

/// erfc(x) for x >= 0.
fn erfc_nonneg(x: f64) -> f64 {
    debug_assert!(x >= 0.0);
    if x < ERFC_SERIES_LIMIT {
        1.0 - erf_series(x)
    } else {
        erfc_continued_fraction(x)
    }
}

/// erf(x) = 2/sqrt(pi) * exp(-x^2) * sum_n (2x^2)^n x / (1*3*...*(2n+1)).
/// All terms are positive, so there is no cancellation.
fn erf_series(x: f64) -> f64 {
    let two_x2 = 2.0 * x * x;
    let mut term = x;
    let mut sum = x;
    let mut n = 0.0;
    loop {
        n += 1.0;
        term *= two_x2 / (2.0 * n + 1.0);
        sum += term;
        if term <= sum * 1e-17 {
            break;
        }
    }
    std::f64::consts::FRAC_2_SQRT_PI * (-x * x).exp() * sum
}

/// Laplace continued fraction for erfc, evaluated with the modified Lentz
/// method: erfc(x) = exp(-x^2)/sqrt(pi) / (x + (1/2)/(x + 1/(x + (3/2)/(x + ...)))).
fn erfc_continued_fraction(x: f64) -> f64 {
    const TINY: f64 = 1e-300;
    let mut f = x;
    let mut c = x;
    let mut d = 0.0;
    for n in 1..500 {
        let a = 0.5 * n as f64;
        d = x + a * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = x + a / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).abs() < 1e-16 {
            break;
        }
    }
    (-x * x).exp() / (PI.sqrt() * f)
}

/// Standard normal quantile.
///
/// Acklam's rational approximation (relative error ~1e-9) followed by one
/// Halley step against [`normal_cdf`], which brings the result to near
/// machine precision.
pub fn normal_quantile(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::Domain(format!(
            "normal_quantile probability {p} is outside (0, 1)"
        )));
    }
    // Work in the lower half; 1 - p is exact for p >= 0.5.
    if p > 0.5 {
        return Ok(-lower_quantile(1.0 - p));
    }
    Ok(lower_quantile(p))
}

fn lower_quantile(p: f64) -> f64 {
    const A: [f64; 6] = [
        -3.969_683_028_665_376e1,
        2.209_460_984_245_205e2,
        -2.759_285_104_469_687e2,
        1.383_577_518_672_69e2,
        -3.066_479_806_614_716e1,
        2.506_628_277_459_239,
    ];
    const B: [f64; 5] = [
        -5.447_609_879_822_406e1,
        1.615_858_368_580_409e2,
        -1.556_989_798_598_866e2,
        6.680_131_188_771_972e1,
        -1.328_068_155_288_572e1,
    ];
    const C: [f64; 6] = [
        -7.784_894_002_430_293e-3,
        -3.223_964_580_411_365e-1,
        -2.400_758_277_161_838,
        -2.549_732_539_343_734,
        4.374_664_141_464_968,
        2.938_163_982_698_783,
    ];
    const D: [f64; 4] = [
        7.784_695_709_041_462e-3,
        3.224_671_290_700_398e-1,
        2.445_134_137_142_996,
        3.754_408_661_907_416,
    ];
    const P_LOW: f64 = 0.02425;

    let z = if p < P_LOW {
        let q = (-2.0 * p.ln()).sqrt();
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    } else {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    };

    let e = lower_tail(z) - p;
    let u = e * SQRT_2PI * (0.5 * z * z).exp();
    z - u / (1.0 + 0.5 * z * u)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cdf_at_zero_is_one_half() {
        assert_eq!(normal_cdf(0.0).unwrap(), 0.5);
    }

    #[test]
    fn cdf_reflection() {
        let z = 0.35;
        let lhs = normal_cdf(-z).unwrap();
        let rhs = 1.0 - normal_cdf(z).unwrap();
        assert!((lhs - rhs).abs() <= 1e-15);
    }

    #[test]
    fn cdf_rejects_non_finite() {
        assert!(normal_cdf(f64::NAN).is_err());
        assert!(normal_cdf(f64::INFINITY).is_err());
    }

    #[test]
    fn series_and_fraction_agree_at_the_switch() {
        let a = 1.0 - erf_series(ERFC_SERIES_LIMIT);
        let b = erfc_continued_fraction(ERFC_SERIES_LIMIT);
        assert!((a - b).abs() < 1e-15, "{a} vs {b}");
    }

    #[test]
    fn quantile_median_and_domain() {
        assert_eq!(normal_quantile(0.5).unwrap(), 0.0);
        assert!(normal_quantile(0.0).is_err());
        assert!(normal_quantile(1.0).is_err());
        assert!(normal_quantile(-0.1).is_err());
        assert!(normal_quantile(f64::NAN).is_err());
    }

    #[test]
    fn quantile_known_values() {
        assert!((normal_quantile(0.95).unwrap() - 1.644_853_6).abs() < 1e-6);
        assert!((normal_quantile(0.975).unwrap() - 1.959_964_0).abs() < 1e-6);
        assert!((normal_quantile(0.05).unwrap() + 1.644_853_6).abs() < 1e-6);
    }

    #[test]
    fn quantile_inverts_cdf() {
        for i in 1..1000 {
            let p = i as f64 / 1000.0;
            let z = normal_quantile(p).unwrap();
            assert!((normal_cdf(z).unwrap() - p).abs() < 1e-13, "p = {p}");
        }
    }
}
