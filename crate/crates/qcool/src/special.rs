//! Special functions needed by the analytic distribution functions.

use num_complex::Complex64;
use std::f64::consts::FRAC_PI_2;

/// Sine integral `Si(x) = ∫_0^x sin(t)/t dt`.
///
/// Power series for `|x| ≤ 2`, continued fraction for the exponential
/// integral `E1(ix)` beyond.
pub fn sine_integral(x: f64) -> f64 {
    let t = x.abs();
    if t == 0.0 {
        return 0.0;
    }
    let si = if t > 2.0 {
        let tiny = 1e-300;
        let mut b = Complex64::new(1.0, t);
        let mut c = Complex64::new(1.0 / tiny, 0.0);
        let mut d = Complex64::new(1.0, 0.0) / b;
        let mut h = d;
        for i in 2..1000 {
            let a = -(((i - 1) * (i - 1)) as f64);
            b += 2.0;
            d = Complex64::new(1.0, 0.0) / (d * a + b);
            c = b + Complex64::new(a, 0.0) / c;
            let del = c * d;
            h *= del;
            if (del.re - 1.0).abs() + del.im.abs() < 1e-16 {
                break;
            }
        }
        h *= Complex64::new(t.cos(), -t.sin());
        FRAC_PI_2 + h.im
    } else {
        let mut sum = 0.0;
        let mut term = t;
        let mut k = 0u32;
        loop {
            let odd = (2 * k + 1) as f64;
            let contrib = term / odd;
            sum += contrib;
            if contrib.abs() < 1e-17 * sum.abs() {
                break;
            }
            k += 1;
            term *= -t * t / ((2 * k) as f64 * (2 * k + 1) as f64);
        }
        sum
    };
    si.copysign(x)
}

/// Complementary error function.
pub fn erfc(x: f64) -> f64 {
    libm::erfc(x)
}

/// `2 sin(x/2) / x`, the Fourier transform of the unit box, with its limit 1 at 0.
pub fn sinc_half(x: f64) -> f64 {
    if x.abs() < 1e-3 {
        1.0 - x * x / 24.0 + x.powi(4) / 1920.0
    } else {
        2.0 * (0.5 * x).sin() / x
    }
}
