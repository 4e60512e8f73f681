//! Numeric identity checks shared by every factorization route: residuals,
//! Bernstein's inequality, Poisson integrals and their asymptotics.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::ap_core::{auto_grid_step, sup_norm_certified, ExactFrequency, TrigPoly};
use crate::cepstral_factor::{
    bohr_project, default_candidates, lattice_step, SampledFunction, DEFAULT_DEPTH,
};
use crate::entire_products::{product_eval, ZeroSet};
use crate::quadrature;
use crate::{Error, Result};

/// Grid points allowed for the automatic certificates inside reports.
const REPORT_GRID_BUDGET: usize = 1 << 21;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Roots,
    Cepstral,
    Zeros,
    Construction,
}

/// What was factored.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Source {
    Poly(TrigPoly),
    Zeros(ZeroSet),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Factor {
    Poly(TrigPoly),
    Sampled(SampledFunction),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub value: f64,
}

impl Check {
    pub fn new(name: &str, pass: bool, value: f64) -> Self {
        Self {
            name: name.to_string(),
            pass,
            value,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FactorizationReport {
    pub method: Method,
    pub source: Source,
    pub factor: Factor,
    pub residual_sup: f64,
    /// `b(s)/b(f)`; for zero sets the ratio of zero counts. `0.5` when both vanish.
    pub bandwidth_ratio: f64,
    pub checks: Vec<Check>,
}

impl FactorizationReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BernsteinCheck {
    /// Certified lower bound for `‖f′‖`.
    pub lhs: f64,
    /// `τ` times a certified upper bound for `‖f‖`.
    pub rhs: f64,
    pub pass: bool,
}

/// `‖f′‖ ≤ τ‖f‖` with `τ = max(|inf Ω|, |sup Ω|)`.
pub fn bernstein_check(f: &TrigPoly) -> Result<BernsteinCheck> {
    let tau = f.exponential_type();
    if tau == 0.0 {
        return Ok(BernsteinCheck {
            lhs: 0.0,
            rhs: 0.0,
            pass: true,
        });
    }
    let step = auto_grid_step(f, REPORT_GRID_BUDGET);
    let (_, f_upper) = sup_norm_certified(f, step)?;
    let (d_lower, _) = sup_norm_certified(&f.derivative(), step)?;
    let rhs = tau * f_upper;
    Ok(BernsteinCheck {
        lhs: d_lower,
        rhs,
        pass: d_lower <= rhs * (1.0 + 1e-6),
    })
}

/// Real grid points of a sampled function restricted to its interior 80%.
fn interior(s: &SampledFunction) -> impl Iterator<Item = (f64, Complex64)> + '_ {
    let cut = 0.8 * s.window_halfwidth;
    s.points().filter(move |(x, _)| x.abs() <= cut)
}

/// `sup |f − |s|²|`: certified over ℝ for polynomial factors, over the
/// interior 80% of the window for sampled ones.
pub fn factorization_residual(f: &TrigPoly, s: &Factor) -> Result<f64> {
    match s {
        Factor::Poly(s) => {
            let d = f.sub(&s.modulus_squared());
            if d.is_empty() {
                return Ok(0.0);
            }
            let step = auto_grid_step(&d, REPORT_GRID_BUDGET);
            Ok(sup_norm_certified(&d, step)?.1)
        }
        Factor::Sampled(s) => {
            let pts: Vec<(f64, Complex64)> = interior(s).collect();
            let xs: Vec<f64> = pts.iter().map(|(x, _)| *x).collect();
            let fx = f.sample(&xs);
            Ok(pts
                .iter()
                .zip(fx)
                .map(|((_, v), fv)| (fv.re - v.norm_sqr()).abs())
                .fold(0.0, f64::max))
        }
    }
}

fn zero_residual(z: &ZeroSet, s: &SampledFunction) -> (f64, f64) {
    let mut abs = 0.0f64;
    let mut rel = 0.0f64;
    for (x, v) in s.points() {
        let fx = product_eval(z, Complex64::new(x, 0.0)).re;
        let d = (fx - v.norm_sqr()).abs();
        abs = abs.max(d);
        if fx.abs() > 0.0 {
            rel = rel.max(d / fx.abs());
        }
    }
    (abs, rel)
}

/// Smallest `|S(z)|/‖s‖_A` over a grid in `{Im z ∈ [0.1, 10], |Re z| ≤ 10}`.
fn min_modulus_upper_half_plane(s: &TrigPoly) -> f64 {
    let norm = s.wiener_norm().max(f64::MIN_POSITIVE);
    // Scale out the dominant exponential so deep points stay comparable.
    let lowest = s.spectrum().map(|sp| sp.inf_freq.value()).unwrap_or(0.0);
    let mut min = f64::INFINITY;
    for i in 0..=40 {
        for j in 0..=20 {
            let z = Complex64::new(-10.0 + 0.5 * i as f64, 0.1 + 9.9 * j as f64 / 20.0);
            let v = s.evaluate(z) * (lowest * z.im).exp();
            min = min.min(v.norm() / norm);
        }
    }
    min
}

/// Builds the report for a polynomial or sampled factor of a [`TrigPoly`],
/// or a sampled factor of a zero set.
pub fn poly_report(method: Method, source: Source, factor: Factor) -> Result<FactorizationReport> {
    let mut checks = Vec::new();
    let (residual_sup, bandwidth_ratio) = match (&source, &factor) {
        (Source::Poly(f), _) => {
            let residual = factorization_residual(f, &factor)?;
            let scale = f.wiener_norm().max(f64::MIN_POSITIVE);
            let limit = match method {
                Method::Cepstral => 1e-2,
                _ => 1e-8,
            };
            checks.push(Check::new(
                "relative_residual",
                residual <= limit * scale,
                residual / scale,
            ));
            let bf = f.bandwidth().map(|b| b.value()).unwrap_or(0.0);
            let ratio = if let Factor::Poly(s) = &factor {
                let exact = match (f.bandwidth(), s.bandwidth()) {
                    (Some(bf), Some(bs)) => bs.scale_int(2) == bf,
                    (None, None) => true,
                    (Some(bf), None) => bf.is_zero(),
                    (None, Some(_)) => false,
                };
                let bs = s.bandwidth().map(|b| b.value()).unwrap_or(0.0);
                checks.push(Check::new("bandwidth_halved_exactly", exact, bs - bf / 2.0));
                let b = bernstein_check(s)?;
                checks.push(Check::new("bernstein_factor", b.pass, b.lhs - b.rhs));
                let m = min_modulus_upper_half_plane(s);
                checks.push(Check::new("zero_free_upper_half_plane", m > 0.0, m));
                if bf > 0.0 {
                    bs / bf
                } else {
                    0.5
                }
            } else if let Factor::Sampled(s) = &factor {
                let cands = default_candidates(f, DEFAULT_DEPTH);
                let proj = bohr_project(s, &cands);
                let bs = proj.bandwidth().map(|b| b.value()).unwrap_or(0.0);
                let step = lattice_step(&cands).unwrap_or(0.0);
                let gap = (bs - bf / 2.0).abs();
                checks.push(Check::new(
                    "bandwidth_halved_within_lattice_step",
                    gap <= step + 1e-12,
                    gap,
                ));
                if bf > 0.0 {
                    bs / bf
                } else {
                    0.5
                }
            } else {
                0.5
            };
            let b = bernstein_check(f)?;
            checks.push(Check::new("bernstein_input", b.pass, b.lhs - b.rhs));
            (residual, ratio)
        }
        (Source::Zeros(z), Factor::Sampled(s)) => {
            let (abs, rel) = zero_residual(z, s);
            checks.push(Check::new("relative_residual", rel <= 1e-3, rel));
            let split = crate::entire_products::ahiezer_split(z)?;
            let ratio =
                split.factor_multiplicity() as f64 / z.total_multiplicity().max(1) as f64;
            let halved = 2 * split.factor_multiplicity() == z.total_multiplicity();
            checks.push(Check::new("zero_count_halved", halved, ratio));
            (abs, if z.total_multiplicity() == 0 { 0.5 } else { ratio })
        }
        (Source::Zeros(_), Factor::Poly(_)) => {
            return Err(Error::InvalidArgument(
                "zero-set reports carry sampled factors".into(),
            ))
        }
    };
    Ok(FactorizationReport {
        method,
        source,
        factor,
        residual_sup,
        bandwidth_ratio,
        checks,
    })
}

/// Recomputes every check of a stored report from its source and factor.
pub fn rerun_checks(report: &FactorizationReport) -> Result<FactorizationReport> {
    poly_report(report.method, report.source.clone(), report.factor.clone())
}

fn require_upper(z: Complex64) -> Result<()> {
    if z.im > 0.0 && z.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "Poisson integral needs Im z > 0, got {z}"
        )))
    }
}

/// `P[f](z)` in closed form: `e^{iωz}` for `ω ≥ 0`, `e^{iω z̄}` for `ω < 0`.
pub fn poisson_eval(f: &TrigPoly, z: Complex64) -> Result<Complex64> {
    require_upper(z)?;
    Ok(f.terms()
        .map(|(w, c)| {
            let w = w.value();
            c * Complex64::from_polar((-w.abs() * z.im).exp(), w * z.re)
        })
        .sum())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PoissonQuadrature {
    pub value: Complex64,
    /// Bound for the truncated tails `|t − x| > R`.
    pub tail_bound: f64,
    /// Kronrod error estimate on `[x − R, x + R]`.
    pub error_estimate: f64,
    pub radius: f64,
}

fn poisson_kernel(y: f64, t: f64) -> f64 {
    y / (std::f64::consts::PI * (t * t + y * y))
}

/// `∫ P_y(x − t) f(t) dt` by adaptive quadrature on `[x − R, x + R]`.
///
/// The constant term integrates to itself. For `χ_ω`, `ω ≠ 0`, integrating
/// by parts bounds each tail by `2P_y(R)/|ω|`; `R` is chosen so the summed
/// tails stay below `tol/10` (capped at `10⁶`).
pub fn poisson_quadrature(f: &TrigPoly, z: Complex64, tol: f64) -> Result<PoissonQuadrature> {
    require_upper(z)?;
    let (x, y) = (z.re, z.im);
    let zero = ExactFrequency::zero();
    let constant = f.coefficient(&zero);
    let terms: Vec<(f64, Complex64)> = f
        .terms()
        .filter(|(w, _)| !w.is_zero())
        .map(|(w, c)| (w.value(), *c))
        .collect();
    if terms.is_empty() {
        return Ok(PoissonQuadrature {
            value: constant,
            tail_bound: 0.0,
            error_estimate: 0.0,
            radius: 0.0,
        });
    }
    let weight: f64 = terms.iter().map(|(w, c)| c.norm() / w.abs()).sum();
    // 4·y/(π R²)·weight ≤ tol/10
    let radius = (40.0 * y * weight / (std::f64::consts::PI * tol))
        .sqrt()
        .clamp(10.0 * y, 1e6);
    let tail_bound = 4.0 * poisson_kernel(y, radius) * weight;
    let wmax = terms.iter().map(|(w, _)| w.abs()).fold(0.0, f64::max);
    // panels about a quarter of the shortest period, and no wider than y
    let panel = (0.25 * 2.0 * std::f64::consts::PI / wmax).min(y);
    let pieces = ((2.0 * radius) / panel).ceil() as usize;
    let eval = |t: f64| -> Complex64 {
        terms
            .iter()
            .map(|(w, c)| c * Complex64::from_polar(1.0, w * t))
            .sum()
    };
    let re = quadrature::integrate_panels(
        |t| poisson_kernel(y, x - t) * eval(t).re,
        x - radius,
        x + radius,
        pieces,
        tol / 10.0,
    );
    let im = quadrature::integrate_panels(
        |t| poisson_kernel(y, x - t) * eval(t).im,
        x - radius,
        x + radius,
        pieces,
        tol / 10.0,
    );
    Ok(PoissonQuadrature {
        value: constant + Complex64::new(re.value, im.value),
        tail_bound,
        error_estimate: re.error_estimate + im.error_estimate,
        radius,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayRow {
    pub y: f64,
    /// `sup_x |e^{iΔz} H(z) − ĥ(−Δ)|` over the x-grid.
    pub error: f64,
    /// `Σ_{ω ≠ −Δ} |c_ω| e^{−(ω+Δ)y}`, an upper bound for `error`.
    pub bound: f64,
}

/// Decay of `e^{iΔz}H(z) − ĥ(−Δ)` as `y → ∞`, where `H` is the holomorphic
/// extension of `h` and `inf Ω(h) = −Δ`.
///
/// Returns the table and the gap `(second lowest frequency) + Δ`.
pub fn asym_decay_check(
    h: &TrigPoly,
    delta: &ExactFrequency,
    ys: &[f64],
) -> Result<(Vec<DecayRow>, Option<f64>)> {
    let spec = h
        .spectrum()
        .ok_or_else(|| Error::InvalidArgument("zero function".into()))?;
    if spec.inf_freq != -delta {
        return Err(Error::InvalidArgument(format!(
            "inf Ω(h) = {} but −Δ = {}",
            spec.inf_freq, -delta
        )));
    }
    let shifted: Vec<(f64, Complex64)> = h
        .terms()
        .skip(1)
        .map(|(w, c)| ((w + delta).value(), *c))
        .collect();
    let gap = shifted.first().map(|(g, _)| *g);
    let span = gap.map(|g| 2.0 * std::f64::consts::PI / g).unwrap_or(1.0);
    let xs: Vec<f64> = (0..512).map(|j| span * j as f64 / 512.0).collect();
    let rows = ys
        .iter()
        .map(|&y| {
            let error = xs
                .iter()
                .map(|&x| {
                    let z = Complex64::new(x, y);
                    shifted
                        .iter()
                        .map(|(w, c)| c * (Complex64::i() * w * z).exp())
                        .sum::<Complex64>()
                        .norm()
                })
                .fold(0.0, f64::max);
            let bound = shifted.iter().map(|(w, c)| c.norm() * (-w * y).exp()).sum();
            DecayRow { y, error, bound }
        })
        .collect();
    Ok((rows, gap))
}

/// `1/h ≈ (1/c) Σ_{k≤depth} (−h₁/c)^k` with `c = ĥ(0)`, `h₁ = h − c`.
///
/// Fails when the certified boundary error `sup |h·r − 1|` exceeds `10⁻⁴`.
pub fn reciprocal_neumann(h: &TrigPoly, depth: usize) -> Result<TrigPoly> {
    let zero = ExactFrequency::zero();
    let c = h.coefficient(&zero);
    if c.norm() == 0.0 {
        return Err(Error::ReciprocalApproximationFailed(1.0));
    }
    let inv_c = Complex64::new(1.0, 0.0) / c;
    let q = h.sub(&TrigPoly::constant(c)).scale(-inv_c);
    let mut term = TrigPoly::constant(inv_c);
    let mut r = term.clone();
    for _ in 0..depth {
        term = term.multiply(&q).prune(1e-18);
        r = r.add(&term);
    }
    let defect = h.multiply(&r).sub(&TrigPoly::constant(1.0)).prune(1e-17);
    let err = if defect.is_empty() {
        0.0
    } else {
        sup_norm_certified(&defect, auto_grid_step(&defect, REPORT_GRID_BUDGET))?.1
    };
    if err > 1e-4 {
        return Err(Error::ReciprocalApproximationFailed(err));
    }
    Ok(r)
}

/// `max |P[h](z)·P[r](z) − 1|` over `points`, with `r ≈ 1/h` from
/// [`reciprocal_neumann`].
pub fn inverse_poisson_identity(h: &TrigPoly, points: &[Complex64], depth: usize) -> Result<f64> {
    let r = reciprocal_neumann(h, depth)?;
    let mut worst = 0.0f64;
    for &z in points {
        let v = poisson_eval(h, z)? * poisson_eval(&r, z)?;
        worst = worst.max((v - 1.0).norm());
    }
    Ok(worst)
}
