//! Certified bounds for `sup |f|` and `inf f` over the whole real line.
//!
//! The spectrum is split into commensurability classes. Each class is
//! periodic, so a grid over one period covers all of ℝ; the values between
//! grid points are controlled by Bernstein's inequality `‖f″‖ ≤ τ²‖f‖`: at an
//! extremum `f′ = 0`, and the nearest grid point is within `h/2`, so the grid
//! misses the extremum by at most `h²τ²‖f‖/8`. Class bounds add up to bounds
//! for the sum.

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;

use super::exact::qlin_independent;
use super::trig_poly::grid_angle;
use super::{ExactFrequency, TrigPoly};
use crate::{Error, Result};

/// Largest periodic grid we are willing to allocate.
const MAX_GRID: usize = 1 << 26;
/// Points used by the direct scan that supplies lower bounds when the class
/// structure gives none.
const SCAN_POINTS: usize = 1 << 14;

/// Samples of one commensurable class on a full period.
#[derive(Clone, Debug)]
pub struct PeriodicSamples {
    pub period: f64,
    pub step: f64,
    pub values: Vec<Complex64>,
}

/// Brackets for the infimum and supremum of a real-valued function on ℝ.
///
/// `inf_lower ≤ inf f ≤ inf_upper` and `sup_lower ≤ sup f ≤ sup_upper`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RealRange {
    pub inf_lower: f64,
    pub inf_upper: f64,
    pub sup_lower: f64,
    pub sup_upper: f64,
}

fn smooth_size(n: usize) -> usize {
    let mut m = n.max(1);
    loop {
        let mut r = m;
        for p in [2, 3, 5, 7] {
            while r.is_multiple_of(p) {
                r /= p;
            }
        }
        if r == 1 {
            return m;
        }
        m += 1;
    }
}

/// Samples a commensurable `f` on one period with step at most `max_step`,
/// using a single FFT.
pub fn periodic_samples(f: &TrigPoly, max_step: f64) -> Result<PeriodicSamples> {
    if !(max_step > 0.0) || !max_step.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "grid step must be positive, got {max_step}"
        )));
    }
    let cb = f.common_base()?;
    let period = 2.0 * std::f64::consts::PI / cb.base.value();
    let kmin = cb.exponents.iter().copied().min().unwrap_or(0);
    let kmax = cb.exponents.iter().copied().max().unwrap_or(0);
    let wanted = (period / max_step).ceil() as usize;
    let range = (kmax - kmin) as usize + 1;
    let m = smooth_size(wanted.max(range).max(2));
    if m > MAX_GRID {
        return Err(Error::InvalidArgument(format!(
            "periodic grid of {m} points exceeds the limit {MAX_GRID}"
        )));
    }
    let mut buf = vec![Complex64::new(0.0, 0.0); m];
    for ((_, c), k) in f.terms().zip(&cb.exponents) {
        buf[(k - kmin) as usize % m] += c;
    }
    FftPlanner::new().plan_fft_inverse(m).process(&mut buf);
    if kmin != 0 {
        buf.par_iter_mut().enumerate().for_each(|(j, v)| {
            *v *= Complex64::from_polar(1.0, grid_angle(j, kmin, m));
        });
    }
    Ok(PeriodicSamples {
        period,
        step: period / m as f64,
        values: buf,
    })
}

struct ClassBounds {
    observed_min: f64,
    observed_max: f64,
    min_lower: f64,
    max_upper: f64,
    abs_observed: f64,
    abs_upper: f64,
}

fn check_grid(f: &TrigPoly, grid_step: f64) -> Result<()> {
    if !(grid_step > 0.0) || !grid_step.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "grid step must be positive, got {grid_step}"
        )));
    }
    let t = grid_step * f.exponential_type();
    if t >= 1.0 {
        return Err(Error::GridTooCoarse(t));
    }
    Ok(())
}

/// Bounds for one commensurable class (or a constant).
fn class_bounds(class: &TrigPoly, grid_step: f64, real: bool) -> Result<ClassBounds> {
    if let Some(spec) = class.spectrum() {
        if spec.term_count == 1 && spec.inf_freq.is_zero() {
            let c = class.coefficient(&ExactFrequency::zero());
            return Ok(ClassBounds {
                observed_min: c.re,
                observed_max: c.re,
                min_lower: c.re,
                max_upper: c.re,
                abs_observed: c.norm(),
                abs_upper: c.norm(),
            });
        }
    } else {
        return Ok(ClassBounds {
            observed_min: 0.0,
            observed_max: 0.0,
            min_lower: 0.0,
            max_upper: 0.0,
            abs_observed: 0.0,
            abs_upper: 0.0,
        });
    }
    let samples = periodic_samples(class, grid_step)?;
    let h = samples.step;
    let tau = class.exponential_type();
    if real {
        // f″ = (f − a₀)″, so the slack scales with the oscillating part only.
        let a0 = class.coefficient(&ExactFrequency::zero()).re;
        let (mut lo, mut hi, mut osc) = (f64::INFINITY, f64::NEG_INFINITY, 0.0f64);
        for v in &samples.values {
            lo = lo.min(v.re);
            hi = hi.max(v.re);
            osc = osc.max((v.re - a0).abs());
        }
        let q = h * h * tau * tau / 8.0;
        let osc_upper = osc / (1.0 - q);
        let slack = q * osc_upper;
        let abs_observed = lo.abs().max(hi.abs());
        Ok(ClassBounds {
            observed_min: lo,
            observed_max: hi,
            min_lower: lo - slack,
            max_upper: hi + slack,
            abs_observed,
            abs_upper: abs_observed + slack,
        })
    } else {
        // |f|² = |χ_{−centre} f|² has spectrum in [−b, b].
        let b = class.bandwidth().map(|b| b.value()).unwrap_or(0.0);
        let q = h * h * b * b / 8.0;
        let abs_observed = samples.values.iter().map(|v| v.norm()).fold(0.0, f64::max);
        Ok(ClassBounds {
            observed_min: f64::NAN,
            observed_max: f64::NAN,
            min_lower: f64::NAN,
            max_upper: f64::NAN,
            abs_observed,
            abs_upper: abs_observed / (1.0 - q).sqrt(),
        })
    }
}

/// Are the class directions independent over ℚ? Then (Kronecker) the classes
/// move independently and sums of class extrema are attained in the limit.
fn independent_classes(classes: &[TrigPoly]) -> bool {
    let dirs: Vec<ExactFrequency> = classes
        .iter()
        .filter_map(|c| c.frequencies().find(|w| !w.is_zero()).and_then(|w| w.direction()))
        .collect();
    qlin_independent(&dirs)
}

fn direct_scan(f: &TrigPoly, grid_step: f64) -> Vec<Complex64> {
    let xs: Vec<f64> = (0..SCAN_POINTS).map(|j| j as f64 * grid_step).collect();
    f.sample(&xs)
}

/// `(lower, upper)` with `lower ≤ sup_x |f(x)| ≤ upper`.
pub fn sup_norm_certified(f: &TrigPoly, grid_step: f64) -> Result<(f64, f64)> {
    check_grid(f, grid_step)?;
    let real = f.is_real_valued();
    let classes = f.commensurable_classes();
    let bounds: Vec<ClassBounds> = classes
        .iter()
        .map(|c| class_bounds(c, grid_step, real))
        .collect::<Result<_>>()?;
    if bounds.len() <= 1 {
        return Ok(bounds
            .first()
            .map(|b| (b.abs_observed, b.abs_upper))
            .unwrap_or((0.0, 0.0)));
    }
    let upper: f64 = bounds.iter().map(|b| b.abs_upper).sum();
    let scan = direct_scan(f, grid_step)
        .iter()
        .map(|v| v.norm())
        .fold(0.0, f64::max);
    let mut lower = scan;
    if real && independent_classes(&classes) {
        let top: f64 = bounds.iter().map(|b| b.observed_max).sum();
        let bottom: f64 = bounds.iter().map(|b| b.observed_min).sum();
        lower = lower.max(top).max(-bottom);
    }
    Ok((lower.min(upper), upper))
}

/// Certified brackets for `inf f` and `sup f` of a real-valued `f`.
pub fn certified_range(f: &TrigPoly, grid_step: f64) -> Result<RealRange> {
    if !f.is_real_valued() {
        return Err(Error::NotRealValued);
    }
    check_grid(f, grid_step)?;
    let classes = f.commensurable_classes();
    let bounds: Vec<ClassBounds> = classes
        .iter()
        .map(|c| class_bounds(c, grid_step, true))
        .collect::<Result<_>>()?;
    let inf_lower: f64 = bounds.iter().map(|b| b.min_lower).sum();
    let sup_upper: f64 = bounds.iter().map(|b| b.max_upper).sum();
    let (inf_upper, sup_lower) = if bounds.len() <= 1 || independent_classes(&classes) {
        (
            bounds.iter().map(|b| b.observed_min).sum(),
            bounds.iter().map(|b| b.observed_max).sum(),
        )
    } else {
        let scan = direct_scan(f, grid_step);
        (
            scan.iter().map(|v| v.re).fold(f64::INFINITY, f64::min),
            scan.iter().map(|v| v.re).fold(f64::NEG_INFINITY, f64::max),
        )
    };
    Ok(RealRange {
        inf_lower,
        inf_upper: inf_upper.max(inf_lower),
        sup_lower: sup_lower.min(sup_upper),
        sup_upper,
    })
}

/// Grid step for the certificates: `1e-3/τ` (Bernstein slack ≈ 1.3·10⁻⁷
/// relative), coarsened until the class grids hold at most `budget` points,
/// and never coarser than `0.5/τ`.
pub fn auto_grid_step(f: &TrigPoly, budget: usize) -> f64 {
    let tau = f.exponential_type();
    if tau == 0.0 {
        return 1.0;
    }
    let total_period: f64 = f
        .commensurable_classes()
        .iter()
        .filter(|c| c.len() > 1 || c.frequencies().any(|w| !w.is_zero()))
        .filter_map(|c| c.common_base().ok())
        .map(|cb| 2.0 * std::f64::consts::PI / cb.base.value())
        .sum();
    let fine = 1e-3 / tau;
    let needed = total_period / budget.max(1) as f64;
    fine.max(needed).min(0.5 / tau)
}

/// A certified lower bound for `inf_x f(x)`.
pub fn certified_infimum(f: &TrigPoly, grid_step: f64) -> Result<f64> {
    certified_range(f, grid_step).map(|r| r.inf_lower)
}

/// `true` only when `f ≥ m` on all of ℝ is certified on the given grid.
pub fn certify_lower_bound(f: &TrigPoly, m: f64, grid_step: f64) -> bool {
    matches!(certified_infimum(f, grid_step), Ok(lb) if lb >= m)
}
