//! Paired two-sided t-test with a self-contained Student-t tail.

use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TTestResult {
    /// `NaN` when the test is degenerate.
    pub t_statistic: f64,
    pub degrees_of_freedom: usize,
    pub p_value: f64,
    pub significant: bool,
    /// Every paired difference was identical, so `t` is undefined.
    pub degenerate: bool,
}

/// Lanczos approximation (g = 7, n = 9).
pub fn ln_gamma<T: Real>(x: T) -> T {
    const G: f64 = 7.0;
    const COEF: [f64; 9] = [
        0.999_999_999_999_809_9,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_1,
        -176.615_029_162_140_6,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_572e-6,
        1.505_632_735_149_311_6e-7,
    ];
    let pi = T::of(std::f64::consts::PI);
    if x < T::of(0.5) {
        // reflection
        return (pi / (pi * x).sin()).ln() - ln_gamma(T::one() - x);
    }
    let x = x - T::one();
    let mut a = T::of(COEF[0]);
    let t = x + T::of(G + 0.5);
    for (i, &c) in COEF.iter().enumerate().skip(1) {
        a = a + T::of(c) / (x + T::of_usize(i));
    }
    T::of(0.5 * (2.0 * std::f64::consts::PI).ln()) + (x + T::of(0.5)) * t.ln() - t + a.ln()
}

/// Continued fraction for the incomplete beta (modified Lentz).
fn beta_cf<T: Real>(a: T, b: T, x: T) -> T {
    let tiny = T::of(1e-300).max(T::min_positive_value());
    let eps = T::epsilon();
    let one = T::one();
    let qab = a + b;
    let qap = a + one;
    let qam = a - one;
    let mut c = one;
    let mut d = one - qab * x / qap;
    if d.abs() < tiny {
        d = tiny;
    }
    d = one / d;
    let mut h = d;
    for m in 1..=300 {
        let m = T::of_usize(m);
        let m2 = m + m;
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = one + aa * d;
        if d.abs() < tiny {
            d = tiny;
        }
        c = one + aa / c;
        if c.abs() < tiny {
            c = tiny;
        }
        d = one / d;
        h = h * d * c;
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = one + aa * d;
        if d.abs() < tiny {
            d = tiny;
        }
        c = one + aa / c;
        if c.abs() < tiny {
            c = tiny;
        }
        d = one / d;
        let del = d * c;
        h = h * del;
        if (del - one).abs() < eps {
            break;
        }
    }
    h
}

/// Regularized incomplete beta `I_x(a, b)`.
pub fn regularized_incomplete_beta<T: Real>(a: T, b: T, x: T) -> Result<T> {
    if !(a > T::zero() && b > T::zero()) {
        return Err(Error::invalid("beta parameters must be positive"));
    }
    if !(x >= T::zero() && x <= T::one()) {
        return Err(Error::invalid("x must lie in [0, 1]"));
    }
    if x == T::zero() || x == T::one() {
        return Ok(x);
    }
    let one = T::one();
    let ln_front = ln_gamma(a + b) - ln_gamma(a) - ln_gamma(b) + a * x.ln() + b * (one - x).ln();
    let front = ln_front.exp();
    let v = if x < (a + one) / (a + b + T::of(2.0)) {
        front * beta_cf(a, b, x) / a
    } else {
        one - front * beta_cf(b, a, one - x) / b
    };
    Ok(v.max(T::zero()).min(one))
}

/// `P(|T| >= |t|)` for Student's t with `df` degrees of freedom.
pub fn student_t_two_sided<T: Real>(t: T, df: usize) -> Result<T> {
    if df == 0 {
        return Err(Error::invalid("degrees of freedom must be >= 1"));
    }
    let nu = T::of_usize(df);
    let x = nu / (nu + t * t);
    regularized_incomplete_beta(nu / T::of(2.0), T::of(0.5), x)
}

/// Paired two-sided t-test on per-query scores.
pub fn paired_t_test<T: Real>(a: &[T], b: &[T], alpha: f64) -> Result<TTestResult> {
    if a.len() != b.len() {
        return Err(Error::invalid(format!(
            "paired samples differ in length ({} vs {})",
            a.len(),
            b.len()
        )));
    }
    if a.len() < 2 {
        return Err(Error::invalid("paired t-test needs at least two pairs"));
    }
    let n = T::of_usize(a.len());
    let d: Vec<T> = a.iter().zip(b).map(|(&x, &y)| x - y).collect();
    let mean = d.iter().copied().sum::<T>() / n;
    let var = d.iter().map(|&x| (x - mean) * (x - mean)).sum::<T>() / (n - T::one());
    let df = a.len() - 1;
    let all_equal = d.iter().all(|&x| x == d[0]);
    if all_equal || var == T::zero() {
        return Ok(TTestResult {
            t_statistic: f64::NAN,
            degrees_of_freedom: df,
            p_value: 1.0,
            significant: false,
            degenerate: true,
        });
    }
    let t = mean / (var.sqrt() / n.sqrt());
    let p = student_t_two_sided(t, df)?.to_f64_lossy();
    Ok(TTestResult {
        t_statistic: t.to_f64_lossy(),
        degrees_of_freedom: df,
        p_value: p,
        significant: p < alpha,
        degenerate: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ln_gamma_integers() {
        let mut fact = 1.0f64;
        for n in 1..15 {
            assert!((ln_gamma(n as f64) - fact.ln()).abs() < 1e-12, "n={n}");
            fact *= n as f64;
        }
        assert!((ln_gamma(0.5f64) - std::f64::consts::PI.sqrt().ln()).abs() < 1e-12);
    }

    #[test]
    fn t_test_example() {
        let r = paired_t_test(&[1.0, 2.0, 3.0], &[1.0, 1.0, 1.0], 0.05).unwrap();
        assert!((r.t_statistic - 3f64.sqrt()).abs() < 1e-12);
        assert_eq!(r.degrees_of_freedom, 2);
        // df = 2 closed form: p = 1 - |t| / sqrt(2 + t^2)
        let closed = 1.0 - 3f64.sqrt() / 5f64.sqrt();
        assert!((r.p_value - closed).abs() < 1e-12);
        assert!((r.p_value - 0.2254).abs() < 1e-4);
        assert!(!r.significant);
    }

    #[test]
    fn degenerate_cases() {
        let a = [0.3, 0.7, 0.1];
        let r = paired_t_test(&a, &a, 0.05).unwrap();
        assert!(r.degenerate && !r.significant && r.t_statistic.is_nan());
        let b: Vec<f64> = a.iter().map(|x| x + 0.5).collect();
        assert!(paired_t_test(&b, &a, 0.05).unwrap().degenerate);
        assert!(paired_t_test(&a, &a[..2], 0.05).is_err());
    }

    #[test]
    fn antisymmetric() {
        let a = [0.1, 0.5, 0.9, 0.4];
        let b = [0.2, 0.1, 0.3, 0.35];
        let ab = paired_t_test(&a, &b, 0.05).unwrap();
        let ba = paired_t_test(&b, &a, 0.05).unwrap();
        assert_eq!(ab.t_statistic, -ba.t_statistic);
        assert_eq!(ab.p_value, ba.p_value);
    }

    #[test]
    fn beta_edges() {
        assert_eq!(regularized_incomplete_beta(2.0, 3.0, 0.0).unwrap(), 0.0);
        assert_eq!(regularized_incomplete_beta(2.0, 3.0, 1.0).unwrap(), 1.0);
        // I_x(1, 1) = x
        assert!((regularized_incomplete_beta(1.0, 1.0, 0.3f64).unwrap() - 0.3).abs() < 1e-14);
        assert!(regularized_incomplete_beta(0.0, 1.0, 0.3f64).is_err());
    }
}
