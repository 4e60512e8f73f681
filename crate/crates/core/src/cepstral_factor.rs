//! The outer-function route for `f ≥ m > 0`: `g = ½ log f`, `v` its conjugate
//! function, `h = e^{g+iv}` and `s = χ_{−b(f)/4}·h`.
//!
//! The conjugate function is computed exactly for the `2L`-periodization of
//! the window (multiply the DFT by `−i·sgn k`). For spectra that fit the
//! window this is exact; otherwise the error concentrates at the window
//! edges, so residuals are measured on the interior 80%.

use std::collections::BTreeSet;
use std::io::Write;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::ap_core::{auto_grid_step, certify_lower_bound, ExactFrequency, TrigPoly};
use crate::verify::{self, Factor, FactorizationReport, Method, Source};
use crate::{Error, Result};

/// CSV output is refused beyond this many rows unless explicitly allowed.
pub const CSV_ROW_CAP: usize = 1 << 20;
/// Coefficients below this modulus are dropped by [`bohr_project`].
pub const PROJECTION_CUTOFF: f64 = 1e-4;
/// Default depth of the candidate half-lattice.
pub const DEFAULT_DEPTH: usize = 3;

/// Symmetric sampling window `[−L, L]` with uniform step.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Window {
    pub halfwidth: f64,
    pub step: f64,
}

impl Window {
    pub fn new(halfwidth: f64, step: f64) -> Result<Self> {
        if !(halfwidth > 0.0 && step > 0.0 && halfwidth.is_finite() && step.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "window needs positive half-width and step, got L = {halfwidth}, step = {step}"
            )));
        }
        if step > halfwidth {
            return Err(Error::WindowTooSmall);
        }
        Ok(Self { halfwidth, step })
    }

    /// Number of intervals; the step is adjusted so that `2L/step` is integral.
    fn intervals(&self) -> usize {
        (2.0 * self.halfwidth / self.step).round().max(1.0) as usize
    }

    pub fn xs(&self) -> Vec<f64> {
        let n = self.intervals();
        let h = 2.0 * self.halfwidth / n as f64;
        (0..=n).map(|i| -self.halfwidth + i as f64 * h).collect()
    }
}

/// Uniform samples on `[−L, L]`; `values.len() = 2L/step + 1`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampledFunction {
    pub window_halfwidth: f64,
    pub step: f64,
    pub values: Vec<Complex64>,
}

#[derive(Serialize)]
struct CsvRow {
    x: f64,
    re: f64,
    im: f64,
}

impl SampledFunction {
    pub fn from_values(window: Window, values: Vec<Complex64>) -> Result<Self> {
        let n = window.intervals();
        if values.len() != n + 1 {
            return Err(Error::InvalidArgument(format!(
                "expected {} samples, got {}",
                n + 1,
                values.len()
            )));
        }
        Ok(Self {
            window_halfwidth: window.halfwidth,
            step: 2.0 * window.halfwidth / n as f64,
            values,
        })
    }

    pub fn tabulate(window: Window, f: impl Fn(f64) -> Complex64 + Sync) -> Self {
        let xs = window.xs();
        let values = xs.par_iter().map(|&x| f(x)).collect();
        Self::from_values(window, values).expect("length matches the window")
    }

    pub fn window(&self) -> Window {
        Window {
            halfwidth: self.window_halfwidth,
            step: self.step,
        }
    }

    pub fn x(&self, i: usize) -> f64 {
        -self.window_halfwidth + i as f64 * self.step
    }

    pub fn points(&self) -> impl Iterator<Item = (f64, Complex64)> + '_ {
        self.values.iter().enumerate().map(|(i, v)| (self.x(i), *v))
    }

    pub fn map(&self, f: impl Fn(f64, Complex64) -> Complex64 + Sync) -> Self {
        let values = self
            .values
            .par_iter()
            .enumerate()
            .map(|(i, v)| f(self.x(i), *v))
            .collect();
        Self {
            window_halfwidth: self.window_halfwidth,
            step: self.step,
            values,
        }
    }

    /// Writes `x,re,im` rows.
    pub fn write_csv<W: Write>(&self, out: W, allow_large: bool) -> Result<()> {
        if self.values.len() > CSV_ROW_CAP && !allow_large {
            return Err(Error::InvalidArgument(format!(
                "{} rows exceed the CSV cap of {CSV_ROW_CAP}; pass --allow-large",
                self.values.len()
            )));
        }
        let mut w = csv::Writer::from_writer(out);
        for (x, v) in self.points() {
            w.serialize(CsvRow { x, re: v.re, im: v.im })
                .map_err(|e| Error::Parse(e.to_string()))?;
        }
        w.flush().map_err(|e| Error::Parse(e.to_string()))
    }
}

/// `½ log f` on the window, after certifying `f ≥ m > 0` on all of ℝ.
pub fn half_log(f: &TrigPoly, m: f64, window: Window) -> Result<SampledFunction> {
    if !f.is_real_valued() {
        return Err(Error::NotRealValued);
    }
    if !(m > 0.0) || !certify_lower_bound(f, m, auto_grid_step(f, 1 << 22)) {
        return Err(Error::NotBoundedBelow(format!(
            "f ≥ {m} could not be certified"
        )));
    }
    let xs = window.xs();
    let values = f
        .sample(&xs)
        .into_iter()
        .map(|v| Complex64::new(0.5 * v.re.ln(), 0.0))
        .collect();
    SampledFunction::from_values(window, values)
}

/// Conjugate function of the `2L`-periodization, normalized to mean zero.
pub fn conjugate_boundary(g: &SampledFunction) -> SampledFunction {
    let n = g.values.len() - 1;
    if n == 0 {
        return g.map(|_, _| Complex64::new(0.0, 0.0));
    }
    let mut buf: Vec<Complex64> = g.values[..n]
        .iter()
        .map(|v| Complex64::new(v.re, 0.0))
        .collect();
    let mut planner = FftPlanner::new();
    planner.plan_fft_forward(n).process(&mut buf);
    for (k, b) in buf.iter_mut().enumerate() {
        let sgn = if k == 0 || 2 * k == n {
            0.0
        } else if 2 * k < n {
            1.0
        } else {
            -1.0
        };
        *b *= Complex64::new(0.0, -sgn);
    }
    planner.plan_fft_inverse(n).process(&mut buf);
    let scale = 1.0 / n as f64;
    let mut values: Vec<Complex64> = buf.iter().map(|v| Complex64::new(v.re * scale, 0.0)).collect();
    values.push(values[0]);
    SampledFunction {
        window_halfwidth: g.window_halfwidth,
        step: g.step,
        values,
    }
}

/// The sampled outer factor `h = e^{g+iv}`.
pub fn outer_factor(f: &TrigPoly, m: f64, window: Window) -> Result<SampledFunction> {
    let g = half_log(f, m, window)?;
    let v = conjugate_boundary(&g);
    let values = g
        .values
        .iter()
        .zip(&v.values)
        .map(|(a, b)| Complex64::new(a.re, b.re).exp())
        .collect();
    Ok(SampledFunction {
        window_halfwidth: g.window_halfwidth,
        step: g.step,
        values,
    })
}

/// Sampled spectral factor `s = χ_{−b(f)/4}·h` with its report.
pub fn cepstral_factorize(f: &TrigPoly, m: f64, window: Window) -> Result<FactorizationReport> {
    let h = outer_factor(f, m, window)?;
    let quarter = f.bandwidth().map(|b| b.value()).unwrap_or(0.0) / 4.0;
    let s = h.map(|x, v| v * Complex64::from_polar(1.0, -quarter * x));
    verify::poly_report(Method::Cepstral, Source::Poly(f.clone()), Factor::Sampled(s))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ArgDecomposition {
    pub c: f64,
    pub theta: SampledFunction,
    pub fit_residual: f64,
}

/// `v(x) = c·x + θ(x)` with `c` the least-squares slope and `θ` mean-centred.
pub fn arg_decompose(v: &SampledFunction) -> ArgDecomposition {
    let n = v.values.len() as f64;
    let (mut sx, mut sv) = (0.0, 0.0);
    for (x, y) in v.points() {
        sx += x;
        sv += y.re;
    }
    let (mx, mv) = (sx / n, sv / n);
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (x, y) in v.points() {
        sxy += (x - mx) * (y.re - mv);
        sxx += (x - mx) * (x - mx);
    }
    let c = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let raw: Vec<f64> = v.points().map(|(x, y)| y.re - c * x).collect();
    let mean = raw.iter().sum::<f64>() / n;
    let values: Vec<Complex64> = raw.iter().map(|t| Complex64::new(t - mean, 0.0)).collect();
    let fit_residual = (values.iter().map(|t| t.re * t.re).sum::<f64>() / n).sqrt();
    ArgDecomposition {
        c,
        theta: SampledFunction {
            window_halfwidth: v.window_halfwidth,
            step: v.step,
            values,
        },
        fit_residual,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlmostPeriodReport {
    pub epsilon_periods: Vec<f64>,
    pub relative_density_gap: f64,
    pub verdict: bool,
    /// Always true: a finite window can only give evidence.
    pub heuristic: bool,
}

/// Most translates examined; longer windows are scanned with a coarser stride.
const MAX_TRANSLATES: usize = 8192;

/// Scans translates `τ ∈ (0, L]` for `sup |θ(x+τ) − θ(x)| ≤ ε` over the overlap.
///
/// The verdict (largest gap between accepted translates, with `0` and `L` as
/// endpoints, at most `L/8`) stands in for relative density.
pub fn almost_period_test(theta: &SampledFunction, epsilon: f64) -> Result<AlmostPeriodReport> {
    if !(epsilon > 0.0) {
        return Err(Error::InvalidArgument(format!("ε must be positive, got {epsilon}")));
    }
    let n = theta.values.len();
    let l = theta.window_halfwidth;
    let max_shift = ((l / theta.step).floor() as usize).min(n.saturating_sub(1));
    if max_shift < 2 {
        return Err(Error::WindowTooSmall);
    }
    let stride = max_shift.div_ceil(MAX_TRANSLATES);
    let shifts: Vec<usize> = (1..=max_shift).step_by(stride).collect();
    let vals: Vec<f64> = theta.values.iter().map(|v| v.re).collect();
    let accepted: Vec<f64> = shifts
        .par_iter()
        .filter(|&&k| {
            vals[k..]
                .iter()
                .zip(&vals[..n - k])
                .all(|(a, b)| (a - b).abs() <= epsilon)
        })
        .map(|&k| k as f64 * theta.step)
        .collect();
    let mut gap = 0.0f64;
    let mut prev = 0.0;
    for &t in accepted.iter().chain(std::iter::once(&l)) {
        gap = gap.max(t - prev);
        prev = t;
    }
    Ok(AlmostPeriodReport {
        verdict: gap <= l / 8.0,
        epsilon_periods: accepted,
        relative_density_gap: gap,
        heuristic: true,
    })
}

/// Half-sums `(ω₁ + … + ω_k)/2`, `k ≤ depth`, of `Ω(f)` inside
/// `[inf Ω(f)/2, sup Ω(f)/2]`, sorted and without duplicates.
pub fn default_candidates(f: &TrigPoly, depth: usize) -> Vec<ExactFrequency> {
    let Some(spec) = f.spectrum() else {
        return Vec::new();
    };
    let lo = spec.inf_freq.half();
    let hi = spec.sup_freq.half();
    let omega: Vec<ExactFrequency> = f.frequencies().cloned().collect();
    let mut sums: BTreeSet<ExactFrequency> = omega.iter().cloned().collect();
    let mut level: BTreeSet<ExactFrequency> = sums.clone();
    for _ in 1..depth.max(1) {
        let mut next = BTreeSet::new();
        for a in &level {
            for w in &omega {
                next.insert(a + w);
            }
        }
        sums.extend(next.iter().cloned());
        level = next;
    }
    sums.into_iter()
        .map(|s| s.half())
        .filter(|s| *s >= lo && *s <= hi)
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect()
}

/// Smallest gap between consecutive candidates.
pub fn lattice_step(candidates: &[ExactFrequency]) -> Option<f64> {
    candidates
        .windows(2)
        .map(|w| (&w[1] - &w[0]).value())
        .min_by(f64::total_cmp)
}

/// Hann-weighted windowed means `Σ w(x)s(x)e^{−iωx}/Σ w(x)` at each candidate.
///
/// The taper pushes the leakage from other frequencies down from `O(1/L)`
/// to `O(1/L³)`.
pub fn bohr_project(s: &SampledFunction, candidates: &[ExactFrequency]) -> TrigPoly {
    let l = s.window_halfwidth;
    let weights: Vec<f64> = s
        .points()
        .map(|(x, _)| {
            let c = (std::f64::consts::PI * x / (2.0 * l)).cos();
            c * c
        })
        .collect();
    let total: f64 = weights.iter().sum();
    let coeffs: Vec<(ExactFrequency, Complex64)> = candidates
        .par_iter()
        .map(|w| {
            let wv = w.value();
            let acc: Complex64 = s
                .points()
                .zip(&weights)
                .map(|((x, v), wt)| v * Complex64::from_polar(*wt, -wv * x))
                .sum();
            (w.clone(), acc / total)
        })
        .collect();
    TrigPoly::from_terms(
        coeffs
            .into_iter()
            .filter(|(_, c)| c.norm() >= PROJECTION_CUTOFF),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ap_core::{freq, integer_poly};
    use crate::periodic_factor::spectral_factor;
    use std::f64::consts::PI;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn half_log_examples() {
        let w = Window::new(10.0, 0.1).unwrap();
        let g = half_log(&TrigPoly::constant(4.0), 1.0, w).unwrap();
        assert!(g.values.iter().all(|v| (v.re - 2f64.ln()).abs() < 1e-15));
        let e2 = TrigPoly::constant((2.0f64).exp());
        let g = half_log(&e2, 1.0, w).unwrap();
        assert!(g.values.iter().all(|v| (v.re - 1.0).abs() < 1e-15));
        let f = integer_poly(&[(-1, c(0.5)), (0, c(2.0)), (1, c(0.5))]);
        let g = half_log(&f, 0.9, w).unwrap();
        for (x, v) in g.points() {
            assert!((v.re - 0.5 * (2.0 + x.cos()).ln()).abs() < 1e-14);
        }
        assert_eq!(g.values.len(), 201);
    }

    #[test]
    fn uncertified_input_is_rejected() {
        let w = Window::new(10.0, 0.1).unwrap();
        let f = integer_poly(&[(-1, c(1.0)), (0, c(2.0)), (1, c(1.0))]);
        assert!(matches!(half_log(&f, 0.1, w), Err(Error::NotBoundedBelow(_))));
        assert!(matches!(cepstral_factorize(&f, 0.1, w), Err(Error::NotBoundedBelow(_))));
    }

    #[test]
    fn conjugate_examples() {
        let w = Window::new(5.0, 0.01).unwrap();
        let zero = conjugate_boundary(&SampledFunction::tabulate(w, |_| c(3.0)));
        assert!(zero.values.iter().all(|v| v.norm() < 1e-14));
        let g = SampledFunction::tabulate(w, |x| c((PI * x / 5.0).cos()));
        let v = conjugate_boundary(&g);
        for (x, y) in v.points() {
            assert!((y.re - (PI * x / 5.0).sin()).abs() < 1e-12);
        }
    }

    #[test]
    fn conjugate_is_anti_self_adjoint() {
        let w = Window::new(7.0, 0.05).unwrap();
        let g1 = SampledFunction::tabulate(w, |x| c((0.9 * x).sin() + 0.3 * (2.2 * x).cos()));
        let g2 = SampledFunction::tabulate(w, |x| c((1.7 * x).cos() * (0.4 * x).sin()));
        let center = |g: &SampledFunction| {
            let n = g.values.len() - 1;
            let m = g.values[..n].iter().map(|v| v.re).sum::<f64>() / n as f64;
            g.map(|_, v| v - m)
        };
        let (g1, g2) = (center(&g1), center(&g2));
        let dot = |a: &SampledFunction, b: &SampledFunction| -> f64 {
            let n = a.values.len() - 1;
            (0..n).map(|i| a.values[i].re * b.values[i].re).sum()
        };
        let lhs = dot(&conjugate_boundary(&g1), &g2);
        let rhs = -dot(&g1, &conjugate_boundary(&g2));
        assert!((lhs - rhs).abs() <= 1e-8 * lhs.abs().max(1.0));
    }

    #[test]
    fn constant_factor_is_root_of_m() {
        let w = Window::new(20.0, 0.1).unwrap();
        let r = cepstral_factorize(&TrigPoly::constant(2.0), 1.0, w).unwrap();
        let Factor::Sampled(s) = &r.factor else { panic!() };
        assert!(s.values.iter().all(|v| (v - c(2f64.sqrt())).norm() < 1e-14));
    }

    #[test]
    fn residual_and_roots_agreement() {
        let f = integer_poly(&[(-1, c(1.0)), (0, c(2.5)), (1, c(1.0))]);
        let w = Window::new(256.0 * PI, 0.05).unwrap();
        let r = cepstral_factorize(&f, 0.4, w).unwrap();
        assert!(r.residual_sup <= 1e-3 * f.wiener_norm());
        let Factor::Sampled(s) = &r.factor else { panic!() };
        let root = spectral_factor(&f).unwrap();
        let proj = bohr_project(s, &default_candidates(&f, DEFAULT_DEPTH));
        let half = ExactFrequency::from_ratio(1, 2);
        for w in [-&half, half.clone()] {
            let a = proj.coefficient(&w);
            let b = root.coefficient(&w);
            assert!((a - b).norm() < 1e-2, "{w}: {a} vs {b}");
        }
        // arg difference constant
        let xs: Vec<f64> = (0..200).map(|k| -400.0 + 4.0 * k as f64).collect();
        let rs = root.sample(&xs);
        let mut diffs = Vec::new();
        for (x, rv) in xs.iter().zip(rs) {
            let i = ((x + s.window_halfwidth) / s.step).round() as usize;
            diffs.push((s.values[i] / rv).arg());
        }
        let spread = diffs.iter().cloned().fold(f64::MIN, f64::max)
            - diffs.iter().cloned().fold(f64::MAX, f64::min);
        assert!(spread < 1e-2, "{spread}");
    }

    #[test]
    fn incommensurable_factor() {
        let r2 = ExactFrequency::sqrt_of(2);
        let s0 = TrigPoly::from_terms([(freq(0), c(1.0)), (r2, c(0.5))]);
        let f = s0.modulus_squared();
        let w = Window::new(256.0 * PI, 0.05).unwrap();
        let r = cepstral_factorize(&f, 0.2, w).unwrap();
        assert!(r.residual_sup <= 1e-2 * f.wiener_norm());
    }

    #[test]
    fn arg_decompose_examples() {
        let w = Window::new(50.0, 0.05).unwrap();
        let d = arg_decompose(&SampledFunction::tabulate(w, |x| c(3.0 * x)));
        assert!((d.c - 3.0).abs() < 1e-12 && d.fit_residual < 1e-10);
        let v = SampledFunction::tabulate(w, |x| c(0.5 * x + 0.1 * (2f64.sqrt() * x).sin()));
        let d = arg_decompose(&v);
        assert!((d.c - 0.5).abs() < 1e-3);
        for (x, t) in d.theta.points() {
            assert!((t.re - 0.1 * (2f64.sqrt() * x).sin()).abs() < 1e-3 + 1e-3 * x.abs());
        }
        let shifted = arg_decompose(&v.map(|_, y| y + 7.0));
        assert!((shifted.c - d.c).abs() < 1e-12);
        let mean = d.theta.values.iter().map(|t| t.re).sum::<f64>() / d.theta.values.len() as f64;
        assert!(mean.abs() < 1e-12);
    }

    #[test]
    fn almost_period_examples() {
        let w = Window::new(40.0 * PI, 0.01).unwrap();
        let zero = almost_period_test(&SampledFunction::tabulate(w, |_| c(0.0)), 0.1).unwrap();
        assert!(zero.verdict);
        let sin = almost_period_test(&SampledFunction::tabulate(w, |x| c(x.sin())), 0.1).unwrap();
        assert!(sin.verdict);
        assert!((sin.relative_density_gap - 2.0 * PI).abs() < 0.3);
        let drift =
            almost_period_test(&SampledFunction::tabulate(w, |x| c(0.2 * x)), 0.1).unwrap();
        assert!(!drift.verdict);
        assert!(drift.epsilon_periods.iter().all(|&t| t <= 1.0));
    }

    #[test]
    fn candidate_lattice() {
        let f = integer_poly(&[(-1, c(1.0)), (0, c(2.5)), (1, c(1.0))]);
        let cands = default_candidates(&f, 3);
        let expected: Vec<ExactFrequency> = [-1, 0, 1]
            .iter()
            .map(|k| ExactFrequency::from_ratio(*k, 2))
            .collect();
        assert_eq!(cands, expected);
        assert_eq!(lattice_step(&cands), Some(0.5));
    }

    #[test]
    fn csv_output() {
        let w = Window::new(1.0, 0.5).unwrap();
        let s = SampledFunction::tabulate(w, |x| Complex64::new(x, -x));
        let mut buf = Vec::new();
        s.write_csv(&mut buf, false).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().next(), Some("x,re,im"));
        assert_eq!(text.lines().count(), 6);
    }
}
