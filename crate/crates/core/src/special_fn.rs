//! Scalar special functions: trigamma, log-gamma and the chi-squared
//! distribution function via the regularized incomplete gamma function.

use crate::error::{GofError, Result};

/// Arguments below this are shifted upward by the recurrence before the
/// asymptotic expansion is applied.
const TRIGAMMA_SHIFT: f64 = 10.0;

/// B_{2k} for k = 1..=6.
const BERNOULLI: [f64; 6] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
];

const LANCZOS_G: f64 = 7.0;
#[allow(clippy::excessive_precision)]
const LANCZOS_COEF: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

const GAMMA_EPS: f64 = 1e-16;
const GAMMA_MAX_ITER: usize = 10_000;
const TINY: f64 = 1e-300;

/// Trigamma function, the second derivative of `ln Γ(x)`, for `x > 0`.
pub fn trigamma(x: f64) -> Result<f64> {
    if !x.is_finite() || x <= 0.0 {
        return Err(GofError::Domain(format!("trigamma requires x > 0, got {x}")));
    }
    let mut z = x;
    let mut acc = 0.0;
    while z < TRIGAMMA_SHIFT {
        acc += 1.0 / (z * z);
        z += 1.0;
    }
    let inv = 1.0 / z;
    let inv2 = inv * inv;
    // Σ B_{2k} / z^{2k+1}
    let mut tail = 0.0;
    let mut pow = inv * inv2;
    for b in BERNOULLI {
        tail += b * pow;
        pow *= inv2;
    }
    Ok(acc + inv + 0.5 * inv2 + tail)
}

/// Natural log of the gamma function for `x > 0` (Lanczos approximation).
pub fn ln_gamma(x: f64) -> Result<f64> {
    if !x.is_finite() || x <= 0.0 {
        return Err(GofError::Domain(format!("ln_gamma requires x > 0, got {x}")));
    }
    Ok(ln_gamma_unchecked(x))
}

fn ln_gamma_unchecked(x: f64) -> f64 {
    if x < 0.5 {
        // Reflection: Γ(x)Γ(1-x) = π / sin(πx)
        let pi = std::f64::consts::PI;
        return (pi / (pi * x).sin()).ln() - ln_gamma_unchecked(1.0 - x);
    }
    let x = x - 1.0;
    let mut a = LANCZOS_COEF[0];
    let t = x + LANCZOS_G + 0.5;
    for (i, c) in LANCZOS_COEF.iter().enumerate().skip(1) {
        a += c / (x + i as f64);
    }
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + a.ln()
}

/// Regularized lower incomplete gamma function `P(a, x)`.
pub fn regularized_gamma_p(a: f64, x: f64) -> Result<f64> {
    check_gamma_args(a, x)?;
    if x == 0.0 {
        return Ok(0.0);
    }
    if x.is_infinite() {
        return Ok(1.0);
    }
    if x < a + 1.0 {
        Ok(gamma_series(a, x))
    } else {
        Ok(1.0 - gamma_continued_fraction(a, x))
    }
}

/// Regularized upper incomplete gamma function `Q(a, x) = 1 - P(a, x)`.
pub fn regularized_gamma_q(a: f64, x: f64) -> Result<f64> {
    check_gamma_args(a, x)?;
    if x == 0.0 {
        return Ok(1.0);
    }
    if x.is_infinite() {
        return Ok(0.0);
    }
    if x < a + 1.0 {
        Ok(1.0 - gamma_series(a, x))
    } else {
        Ok(gamma_continued_fraction(a, x))
    }
}

fn check_gamma_args(a: f64, x: f64) -> Result<()> {
    if !a.is_finite() || a <= 0.0 {
        return Err(GofError::Domain(format!("incomplete gamma requires a > 0, got {a}")));
    }
    if x.is_nan() || x < 0.0 {
        return Err(GofError::Domain(format!("incomplete gamma requires x >= 0, got {x}")));
    }
    Ok(())
}

fn gamma_prefactor(a: f64, x: f64) -> f64 {
    (-x + a * x.ln() - ln_gamma_unchecked(a)).exp()
}

fn gamma_series(a: f64, x: f64) -> f64 {
    let mut ap = a;
    let mut term = 1.0 / a;
    let mut sum = term;
    for _ in 0..GAMMA_MAX_ITER {
        ap += 1.0;
        term *= x / ap;
        sum += term;
        if term.abs() < sum.abs() * GAMMA_EPS {
            break;
        }
    }
    (sum * gamma_prefactor(a, x)).min(1.0)
}

// Modified Lentz evaluation of the continued fraction for Q(a, x).
fn gamma_continued_fraction(a: f64, x: f64) -> f64 {
    let mut b = x + 1.0 - a;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..=GAMMA_MAX_ITER {
        let an = -(i as f64) * (i as f64 - a);
        b += 2.0;
        d = an * d + b;
        if d.abs() < TINY {
            d = TINY;
        }
        c = b + an / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let delta = d * c;
        h *= delta;
        if (delta - 1.0).abs() < GAMMA_EPS {
            break;
        }
    }
    (gamma_prefactor(a, x) * h).clamp(0.0, 1.0)
}

/// `P(χ²_df ≤ x)`.
pub fn chi_squared_cdf(x: f64, df: f64) -> Result<f64> {
    check_chi_args(x, df)?;
    regularized_gamma_p(0.5 * df, 0.5 * x)
}

/// Upper tail `P(χ²_df > x)`, computed directly rather than as `1 - cdf`.
pub fn chi_squared_sf(x: f64, df: f64) -> Result<f64> {
    check_chi_args(x, df)?;
    regularized_gamma_q(0.5 * df, 0.5 * x)
}

fn check_chi_args(x: f64, df: f64) -> Result<()> {
    if x.is_nan() || x < 0.0 {
        return Err(GofError::Domain(format!("chi-squared cdf requires x >= 0, got {x}")));
    }
    if !df.is_finite() || df <= 0.0 {
        return Err(GofError::Domain(format!("chi-squared cdf requires df > 0, got {df}")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    /// Brute-force Σ_{k≥0} 1/(x+k)² with an integral tail correction.
    fn trigamma_series(x: f64) -> f64 {
        let terms = 2_000_000u64;
        let mut sum = 0.0;
        for k in (0..terms).rev() {
            let t = x + k as f64;
            sum += 1.0 / (t * t);
        }
        // Euler-Maclaurin tail: ∫ + half-term + derivative correction
        let m = x + terms as f64;
        sum + 1.0 / m + 0.5 / (m * m) + 1.0 / (6.0 * m * m * m)
    }

    #[test]
    fn trigamma_matches_series_oracle() {
        for &x in &[0.5, 1.0, 1.7, 3.3, 9.99, 10.0, 48.5, 250.0] {
            let got = trigamma(x).unwrap();
            let want = trigamma_series(x);
            assert!(((got - want) / want).abs() < 1e-10, "x={x}: {got} vs {want}");
        }
    }

    #[test]
    fn trigamma_closed_forms() {
        assert!((trigamma(1.0).unwrap() - PI * PI / 6.0).abs() < 1e-10);
        assert!((trigamma(0.5).unwrap() - PI * PI / 2.0).abs() < 1e-10);
    }

    #[test]
    fn trigamma_recurrence() {
        for &x in &[0.3, 1.7, 9.2, 0.05, 25.0] {
            let lhs = trigamma(x + 1.0).unwrap();
            let rhs = trigamma(x).unwrap() - 1.0 / (x * x);
            assert!((lhs - rhs).abs() <= 1e-12 * rhs.abs().max(1.0), "x={x}");
        }
    }

    #[test]
    fn trigamma_decreasing_and_positive() {
        let grid: Vec<f64> = (1..400).map(|i| i as f64 * 0.05).collect();
        for w in grid.windows(2) {
            let (a, b) = (trigamma(w[0]).unwrap(), trigamma(w[1]).unwrap());
            assert!(a > b && b > 0.0);
        }
    }

    #[test]
    fn trigamma_domain_errors() {
        for &x in &[0.0, -1.0, f64::NAN, f64::INFINITY] {
            assert!(matches!(trigamma(x), Err(GofError::Domain(_))));
        }
    }

    #[test]
    fn ln_gamma_known_values() {
        assert!(ln_gamma(1.0).unwrap().abs() < 1e-14);
        assert!(ln_gamma(2.0).unwrap().abs() < 1e-14);
        assert!((ln_gamma(0.5).unwrap() - PI.sqrt().ln()).abs() < 1e-14);
        // ln(9!) = ln 362880
        assert!((ln_gamma(10.0).unwrap() - 362_880f64.ln()).abs() < 1e-12);
    }

    // Adaptive Simpson quadrature of the χ²₁ density after x = t², which
    // removes the singularity at zero: ∫₀^√x 2φ(t) dt.
    fn chi2_1_cdf_quadrature(x: f64) -> f64 {
        fn f(t: f64) -> f64 {
            2.0 * (-0.5 * t * t).exp() / (2.0 * PI).sqrt()
        }
        fn simpson(a: f64, b: f64) -> f64 {
            (b - a) / 6.0 * (f(a) + 4.0 * f(0.5 * (a + b)) + f(b))
        }
        fn adapt(a: f64, b: f64, whole: f64, tol: f64, depth: u32) -> f64 {
            let m = 0.5 * (a + b);
            let (l, r) = (simpson(a, m), simpson(m, b));
            if depth == 0 || (l + r - whole).abs() < 15.0 * tol {
                return l + r + (l + r - whole) / 15.0;
            }
            adapt(a, m, l, tol / 2.0, depth - 1) + adapt(m, b, r, tol / 2.0, depth - 1)
        }
        let b = x.sqrt();
        adapt(0.0, b, simpson(0.0, b), 1e-13, 50)
    }

    #[test]
    fn chi_squared_cdf_examples() {
        assert_eq!(chi_squared_cdf(0.0, 3.0).unwrap(), 0.0);
        assert_eq!(chi_squared_cdf(0.0, 0.5).unwrap(), 0.0);
        assert!((chi_squared_cdf(1.386_294_4, 2.0).unwrap() - 0.5).abs() < 1e-7);
        let oracle = chi2_1_cdf_quadrature(3.841_458_8);
        assert!((oracle - 0.95).abs() < 1e-4);
        assert!((chi_squared_cdf(3.841_458_8, 1.0).unwrap() - oracle).abs() < 1e-10);
    }

    #[test]
    fn chi_squared_df2_is_exponential() {
        for &x in &[0.01, 0.5, 2.0, 3.0, 7.5, 30.0] {
            let want = 1.0 - (-x / 2.0f64).exp();
            assert!((chi_squared_cdf(x, 2.0).unwrap() - want).abs() < 1e-10);
            assert!((chi_squared_sf(x, 2.0).unwrap() - (1.0 - want)).abs() < 1e-10);
        }
    }

    #[test]
    fn chi_squared_cdf_df1_against_quadrature_grid() {
        for &x in &[0.01, 0.3, 1.0, 2.0, 2.5, 6.0, 12.0] {
            let got = chi_squared_cdf(x, 1.0).unwrap();
            assert!((got - chi2_1_cdf_quadrature(x)).abs() < 1e-10, "x={x}");
        }
    }

    #[test]
    fn chi_squared_cdf_monotone_and_saturates() {
        for &df in &[1.0f64, 2.0, 5.0, 14.0, 100.0] {
            let mut prev = 0.0;
            for i in 0..500 {
                let x = i as f64 * 0.1 * df.sqrt();
                let p = chi_squared_cdf(x, df).unwrap();
                assert!(p >= prev - 1e-15, "df={df} x={x}");
                prev = p;
            }
            let far = df + 40.0 * (2.0 * df).sqrt();
            assert!(chi_squared_cdf(far, df).unwrap() >= 1.0 - 1e-9);
        }
    }

    #[test]
    fn chi_squared_domain_errors() {
        assert!(chi_squared_cdf(-0.1, 2.0).is_err());
        assert!(chi_squared_cdf(1.0, 0.0).is_err());
        assert!(chi_squared_cdf(1.0, -3.0).is_err());
        assert!(chi_squared_sf(f64::NAN, 3.0).is_err());
    }
}
