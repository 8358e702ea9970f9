//! Special functions backing the study statistics: log-gamma, the
//! regularized incomplete beta function, and the F-distribution survival
//! function. Implemented here so the statistics carry no external
//! dependency and can be checked against hand-computed values.

/// Natural log of the gamma function for `z > 0` (Lanczos approximation).
pub fn ln_gamma(z: f64) -> f64 {
    // Lanczos coefficients, g = 5, n = 6 (Numerical Recipes).
    const COEF: [f64; 6] = [
        76.18009172947146,
        -86.50532032941677,
        24.01409824083091,
        -1.231739572450155,
        0.1208650973866179e-2,
        -0.5395239384953e-5,
    ];
    debug_assert!(z > 0.0, "ln_gamma requires z > 0");
    let mut series = 1.000000000190015;
    for (i, &c) in COEF.iter().enumerate() {
        series += c / (z + i as f64 + 1.0);
    }
    let tmp = z + 5.5;
    (z + 0.5) * tmp.ln() - tmp + (2.5066282746310005 * series / z).ln()
}

/// Regularized incomplete beta function I_x(a, b) for `a, b > 0` and
/// `x` in [0, 1], evaluated by Lentz's continued fraction.
pub fn regularized_incomplete_beta(x: f64, a: f64, b: f64) -> f64 {
    assert!(a > 0.0 && b > 0.0, "shape parameters must be positive");
    assert!((0.0..=1.0).contains(&x), "x must lie in [0, 1]");
    if x == 0.0 {
        return 0.0;
    }
    if x == 1.0 {
        return 1.0;
    }
    // The continued fraction converges fastest for x below the
    // distribution mean; mirror through the symmetry relation otherwise.
    if x > (a + 1.0) / (a + b + 2.0) {
        return 1.0 - regularized_incomplete_beta(1.0 - x, b, a);
    }

    let ln_front = a * x.ln() + b * (1.0 - x).ln() - ln_beta(a, b);
    let front = ln_front.exp();

    const MAX_ITER: usize = 400;
    const EPS: f64 = 1e-15;
    const TINY: f64 = 1e-30;

    let mut c = 1.0;
    let mut d = 0.0;
    let mut f = 1.0;
    for m in 0..MAX_ITER {
        let m_f = m as f64;
        // Odd continued-fraction coefficient.
        let num = -(a + m_f) * (a + b + m_f) * x / ((a + 2.0 * m_f) * (a + 2.0 * m_f + 1.0));
        let delta = lentz_step(num, &mut c, &mut d, TINY);
        f *= delta;
        if (delta - 1.0).abs() < EPS {
            break;
        }
        // Even continued-fraction coefficient.
        let num = (m_f + 1.0) * (b - m_f - 1.0) * x / ((a + 2.0 * m_f + 1.0) * (a + 2.0 * m_f + 2.0));
        let delta = lentz_step(num, &mut c, &mut d, TINY);
        f *= delta;
        if (delta - 1.0).abs() < EPS {
            break;
        }
    }
    front / (a * f)
}

fn lentz_step(num: f64, c: &mut f64, d: &mut f64, tiny: f64) -> f64 {
    *d = 1.0 + num * *d;
    if d.abs() < tiny {
        *d = tiny;
    }
    *d = 1.0 / *d;
    *c = 1.0 + num / *c;
    if c.abs() < tiny {
        *c = tiny;
    }
    *c * *d
}

fn ln_beta(a: f64, b: f64) -> f64 {
    ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b)
}

/// Survival function of the Fisher F distribution: `P(F > f)` for
/// `d1`, `d2` degrees of freedom.
pub fn f_distribution_sf(f: f64, d1: f64, d2: f64) -> f64 {
    assert!(d1 > 0.0 && d2 > 0.0, "degrees of freedom must be positive");
    if f <= 0.0 {
        return 1.0;
    }
    if f.is_infinite() {
        return 0.0;
    }
    // P(F > f) = I_{d2/(d2 + d1 f)}(d2/2, d1/2)
    let x = d2 / (d2 + d1 * f);
    regularized_incomplete_beta(x, 0.5 * d2, 0.5 * d1)
}
