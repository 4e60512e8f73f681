//! Adaptive Gauss–Kronrod (7/15) quadrature on finite intervals.

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
    0.209_482_141_084_728,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Integral {
    pub value: f64,
    /// Sum of the per-panel Kronrod/Gauss differences.
    pub error_estimate: f64,
    pub panels: usize,
}

fn kronrod<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let centre = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(centre);
    let mut k = WGK[7] * fc;
    let mut g = WG[3] * fc;
    for j in 0..7 {
        let dx = half * XGK[j];
        let s = f(centre - dx) + f(centre + dx);
        k += WGK[j] * s;
        if j % 2 == 1 {
            g += WG[j / 2] * s;
        }
    }
    (k * half, ((k - g) * half).abs())
}

/// Integrates `f` over `[a, b]`, bisecting panels until each panel's error
/// estimate is below its share of `tol`, or `max_panels` is reached.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64, max_panels: usize) -> Integral {
    if a == b {
        return Integral {
            value: 0.0,
            error_estimate: 0.0,
            panels: 0,
        };
    }
    let width = b - a;
    let mut stack = vec![(a, b)];
    let mut value = 0.0;
    let mut error = 0.0;
    let mut panels = 0;
    while let Some((lo, hi)) = stack.pop() {
        let (v, e) = kronrod(&f, lo, hi);
        let share = tol * ((hi - lo) / width).abs();
        if e <= share.max(f64::EPSILON * v.abs()) || panels + stack.len() >= max_panels {
            value += v;
            error += e;
            panels += 1;
        } else {
            let mid = 0.5 * (lo + hi);
            stack.push((mid, hi));
            stack.push((lo, mid));
        }
    }
    Integral {
        value,
        error_estimate: error,
        panels,
    }
}

/// [`integrate`] over the equal panels `[a + kw, a + (k+1)w]`; useful for
/// oscillatory integrands where a single panel would undersample.
pub fn integrate_panels<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    pieces: usize,
    tol: f64,
) -> Integral {
    let pieces = pieces.max(1);
    let w = (b - a) / pieces as f64;
    let mut out = Integral {
        value: 0.0,
        error_estimate: 0.0,
        panels: 0,
    };
    for k in 0..pieces {
        let lo = a + k as f64 * w;
        let hi = if k + 1 == pieces { b } else { lo + w };
        let r = integrate(&f, lo, hi, tol / pieces as f64, 64);
        out.value += r.value;
        out.error_estimate += r.error_estimate;
        out.panels += r.panels;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomials_are_exact() {
        let r = integrate(|x| x.powi(10) - 3.0 * x, -1.0, 2.0, 1e-13, 100);
        let exact = (2f64.powi(11) + 1.0) / 11.0 - 4.5;
        assert!((r.value - exact).abs() < 1e-12);
    }

    #[test]
    fn arctan_and_oscillation() {
        let r = integrate(|x| 1.0 / (1.0 + x * x), -1e3, 1e3, 1e-12, 10_000);
        assert!((r.value - 2.0 * 1e3f64.atan()).abs() < 1e-10);
        let r = integrate_panels(|x| (7.0 * x).cos(), 0.0, 50.0, 64, 1e-12);
        assert!((r.value - (350f64).sin() / 7.0).abs() < 1e-11);
    }
}
