//! Adaptive Gauss-Kronrod (7, 15) quadrature on finite intervals.

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Result of an adaptive integration.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct Quadrature {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
}

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = half * XGK[j];
        let pair = f(center - dx) + f(center + dx);
        kronrod += WGK[j] * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    (kronrod * half, ((kronrod - gauss) * half).abs())
}

/// Integrates `f` over `[a, b]` until the summed error estimate is below
/// `max(abs_tol, rel_tol·|value|)` or 20000 subintervals have been used.
pub fn integrate<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
) -> Quadrature {
    if a == b {
        return Quadrature {
            value: 0.0,
            error: 0.0,
            evaluations: 0,
        };
    }
    let (v, e) = gk15(&f, a, b);
    let mut intervals = vec![(a, b, v, e)];
    let mut total = v;
    let mut err = e;
    let mut evaluations = 15;
    while err > abs_tol.max(rel_tol * total.abs()) && intervals.len() < 20_000 {
        let (worst, _) = intervals
            .iter()
            .enumerate()
            .fold(
                (0, -1.0),
                |acc, (i, iv)| if iv.3 > acc.1 { (i, iv.3) } else { acc },
            );
        let (lo, hi, v0, e0) = intervals.swap_remove(worst);
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            intervals.push((lo, hi, v0, 0.0));
            err -= e0;
            continue;
        }
        let (v1, e1) = gk15(&f, lo, mid);
        let (v2, e2) = gk15(&f, mid, hi);
        evaluations += 30;
        total += v1 + v2 - v0;
        err += e1 + e2 - e0;
        intervals.push((lo, mid, v1, e1));
        intervals.push((mid, hi, v2, e2));
    }
    let value: f64 = intervals.iter().map(|iv| iv.2).sum();
    let error: f64 = intervals.iter().map(|iv| iv.3).sum();
    Quadrature {
        value,
        error,
        evaluations,
    }
}

/// Splits `[a, b]` into panels no wider than `width` and integrates each
/// adaptively. Suited to long oscillatory ranges.
pub fn integrate_panels<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    width: f64,
    abs_tol: f64,
) -> Quadrature {
    let panels = (((b - a) / width).ceil() as usize).max(1);
    let step = (b - a) / panels as f64;
    let per_panel = abs_tol / panels as f64;
    let mut out = Quadrature {
        value: 0.0,
        error: 0.0,
        evaluations: 0,
    };
    for k in 0..panels {
        let lo = a + k as f64 * step;
        let hi = if k + 1 == panels { b } else { lo + step };
        let q = integrate(&f, lo, hi, per_panel, 1e-15);
        out.value += q.value;
        out.error += q.error;
        out.evaluations += q.evaluations;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomials_are_exact() {
        let q = integrate(|x| 3.0 * x * x - 2.0 * x + 1.0, -1.0, 2.0, 1e-14, 0.0);
        assert!((q.value - 9.0).abs() < 1e-13);
        assert_eq!(q.evaluations, 15);
    }

    #[test]
    fn smooth_transcendental() {
        let q = integrate(f64::exp, 0.0, 1.0, 1e-14, 0.0);
        assert!((q.value - (std::f64::consts::E - 1.0)).abs() < 1e-14);
        let g = integrate(|x| (-x * x).exp(), -12.0, 12.0, 1e-14, 0.0);
        assert!((g.value - std::f64::consts::PI.sqrt()).abs() < 1e-13);
    }

    #[test]
    fn endpoint_singularity_converges() {
        let q = integrate(f64::sqrt, 0.0, 1.0, 1e-12, 0.0);
        assert!((q.value - 2.0 / 3.0).abs() < 1e-11);
    }

    #[test]
    fn oscillatory_panels() {
        let q = integrate_panels(|x| (5.0 * x).cos(), 0.0, 200.0, 1.0, 1e-12);
        assert!((q.value - (1000.0f64).sin() / 5.0).abs() < 1e-11);
    }
}
