//! Canonical products over finite zero sets and the spectral factor obtained
//! by keeping one zero from each conjugate pair.
//!
//! A zero set describes `F(z) = z^{2m} e^{2az+2b} Π E(z/z_n, p)^{mult}`; the
//! factor is `S(z) = z^m e^{az+b+iγz} Π_{selected} E(z/z_n, p)^{mult}` where the
//! selected zeros lie in the closed lower half-plane and
//! `γ = −Σ_{selected} Im(1/z_n)`.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ap_core::TrigPoly;
use crate::cepstral_factor::{SampledFunction, Window};
use crate::quadrature;
use crate::verify::{self, Factor, FactorizationReport, Method, Source};
use crate::{Error, Result};

/// `|Im z| ≤ REAL_BAND·max(1, |z|)` counts as a real zero.
const REAL_BAND: f64 = 1e-12;
/// Below this `|u|`, `log E(u, 1)` is summed from its series.
const SERIES_CUTOFF: f64 = 1e-2;
const PARALLEL_MIN: usize = 4096;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Zero {
    pub re: f64,
    pub im: f64,
    pub mult: u32,
}

impl Zero {
    pub fn new(z: Complex64, mult: u32) -> Self {
        Self {
            re: z.re,
            im: z.im,
            mult,
        }
    }

    pub fn z(&self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }

    fn is_real(&self) -> bool {
        self.im.abs() <= REAL_BAND * self.z().norm().max(1.0)
    }
}

#[derive(Deserialize)]
struct ZeroSetRepr {
    m: u32,
    a: f64,
    b: f64,
    p: u8,
    zeros: Vec<Zero>,
}

/// Finite zero set with the Hadamard data of `F`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ZeroSetRepr")]
pub struct ZeroSet {
    /// `F` vanishes to order `2m` at the origin.
    pub m: u32,
    pub a: f64,
    pub b: f64,
    /// Genus of the primary factors, 0 or 1.
    pub p: u8,
    pub zeros: Vec<Zero>,
}

impl TryFrom<ZeroSetRepr> for ZeroSet {
    type Error = Error;

    fn try_from(r: ZeroSetRepr) -> Result<Self> {
        ZeroSet::new(r.m, r.a, r.b, r.p, r.zeros)
    }
}

impl ZeroSet {
    pub fn new(m: u32, a: f64, b: f64, p: u8, zeros: Vec<Zero>) -> Result<Self> {
        if p > 1 {
            return Err(Error::InvalidArgument(format!("genus must be 0 or 1, got {p}")));
        }
        if !a.is_finite() || !b.is_finite() {
            return Err(Error::InvalidArgument("exponential parameters must be finite".into()));
        }
        for z in &zeros {
            if z.mult == 0 || !z.z().is_finite() {
                return Err(Error::InvalidArgument(format!("bad zero {z:?}")));
            }
            if z.z().norm() == 0.0 {
                return Err(Error::InvalidArgument(
                    "zeros at the origin belong in m".into(),
                ));
            }
        }
        Ok(Self { m, a, b, p, zeros })
    }

    /// Number of zeros of `F`, with multiplicity, including the origin.
    pub fn total_multiplicity(&self) -> u64 {
        2 * self.m as u64 + self.zeros.iter().map(|z| z.mult as u64).sum::<u64>()
    }

    /// Zeros of `sin z` in `0 < |z| ≤ Kπ` (simple, at `kπ`); the origin is a
    /// single zero and cannot be expressed by `m`, so it is left out.
    pub fn sine_zeros(k_max: u32) -> Self {
        let zeros = (1..=k_max)
            .flat_map(|k| {
                let x = k as f64 * std::f64::consts::PI;
                [Zero::new(Complex64::new(x, 0.0), 1), Zero::new(Complex64::new(-x, 0.0), 1)]
            })
            .collect();
        Self::new(0, 0.0, 0.0, 1, zeros).expect("valid")
    }

    /// Truncation of `2 + 2cos z = 4cos²(z/2)`: double zeros at `±(2j−1)π`,
    /// `j ≤ K`, genus 1, `e^{2b} = 4`.
    pub fn two_plus_two_cos(k_max: u32) -> Self {
        let zeros = (1..=k_max)
            .flat_map(|j| {
                let x = (2 * j - 1) as f64 * std::f64::consts::PI;
                [Zero::new(Complex64::new(x, 0.0), 2), Zero::new(Complex64::new(-x, 0.0), 2)]
            })
            .collect();
        Self::new(0, 0.0, std::f64::consts::LN_2, 1, zeros).expect("valid")
    }
}

/// `E(z, 0) = 1 − z`, `E(z, 1) = (1 − z)e^z`.
pub fn weierstrass_factor(z: Complex64, p: u8) -> Result<Complex64> {
    match p {
        0 => Ok(1.0 - z),
        1 => Ok((1.0 - z) * z.exp()),
        _ => Err(Error::InvalidArgument(format!("genus must be 0 or 1, got {p}"))),
    }
}

/// `log E(u, p)`; `None` at the zero `u = 1`.
fn log_primary(u: Complex64, p: u8) -> Option<Complex64> {
    if u == Complex64::new(1.0, 0.0) {
        return None;
    }
    if p == 1 && u.norm() < SERIES_CUTOFF {
        // log(1 − u) + u = −Σ_{k≥2} u^k/k
        let mut sum = Complex64::new(0.0, 0.0);
        let mut pow = u;
        for k in 2..40 {
            pow *= u;
            let t = pow / k as f64;
            sum -= t;
            if t.norm() < 1e-18 * sum.norm().max(1e-300) {
                break;
            }
        }
        return Some(sum);
    }
    let base = (1.0 - u).ln();
    Some(if p == 1 { base + u } else { base })
}

/// `Σ mult·log E(z/z_n, p)`, or `None` if `z` is a zero.
fn log_product(zeros: &[Zero], p: u8, z: Complex64) -> Option<Complex64> {
    let term = |zr: &Zero| log_primary(z / zr.z(), p).map(|l| l * zr.mult as f64);
    if zeros.len() >= PARALLEL_MIN {
        zeros.par_iter().map(term).sum()
    } else {
        zeros.iter().map(term).sum()
    }
}

fn assemble(origin: u32, exponent: Complex64, log: Option<Complex64>, z: Complex64) -> Complex64 {
    let Some(log) = log else {
        return Complex64::new(0.0, 0.0);
    };
    let zero_power = if origin == 0 {
        Complex64::new(1.0, 0.0)
    } else {
        z.powu(origin)
    };
    zero_power * (exponent + log).exp()
}

/// `F(z) = z^{2m} e^{2az+2b} Π E(z/z_n, p)^{mult}`, accumulated in log space.
pub fn product_eval(zs: &ZeroSet, z: Complex64) -> Complex64 {
    let exponent = 2.0 * zs.a * z + 2.0 * zs.b;
    assemble(2 * zs.m, exponent, log_product(&zs.zeros, zs.p, z), z)
}

/// The selected half of a conjugation-symmetric zero set.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AhiezerSplit {
    /// Selected zeros (closed lower half-plane); `m`, `a`, `b`, `p` as in the source.
    pub zeros: ZeroSet,
    pub gamma: f64,
}

impl AhiezerSplit {
    /// Zeros of `S`, with multiplicity, including the origin.
    pub fn factor_multiplicity(&self) -> u64 {
        self.zeros.m as u64 + self.zeros.zeros.iter().map(|z| z.mult as u64).sum::<u64>()
    }
}

/// Keeps one zero from each conjugate pair (the one with `Im ≤ 0`) and half
/// of every real zero.
pub fn ahiezer_split(zs: &ZeroSet) -> Result<AhiezerSplit> {
    let mut real: Vec<(f64, u32)> = Vec::new();
    let mut lower: Vec<Zero> = Vec::new();
    let mut upper: Vec<Zero> = Vec::new();
    for z in &zs.zeros {
        if z.is_real() {
            match real.iter_mut().find(|(x, _)| *x == z.re) {
                Some((_, m)) => *m += z.mult,
                None => real.push((z.re, z.mult)),
            }
        } else if z.im < 0.0 {
            lower.push(*z);
        } else {
            upper.push(*z);
        }
    }
    // Conjugate pairing with equal total multiplicity.
    let total = |list: &[Zero], re: f64, im: f64| -> u32 {
        list.iter()
            .filter(|z| z.re == re && z.im == im)
            .map(|z| z.mult)
            .sum()
    };
    for z in &lower {
        if total(&upper, z.re, -z.im) != total(&lower, z.re, z.im) {
            return Err(Error::NotConjugateSymmetric);
        }
    }
    for z in &upper {
        if total(&lower, z.re, -z.im) != total(&upper, z.re, z.im) {
            return Err(Error::NotConjugateSymmetric);
        }
    }
    let mut selected = Vec::with_capacity(lower.len() + real.len());
    for (x, m) in &real {
        if m % 2 == 1 {
            return Err(Error::OddRealMultiplicity(*x));
        }
        selected.push(Zero::new(Complex64::new(*x, 0.0), m / 2));
    }
    selected.extend(lower);
    let gamma = -selected
        .iter()
        .filter(|z| z.im != 0.0)
        .map(|z| z.mult as f64 * (1.0 / z.z()).im)
        .sum::<f64>();
    Ok(AhiezerSplit {
        zeros: ZeroSet::new(zs.m, zs.a, zs.b, zs.p, selected)?,
        gamma,
    })
}

/// Evaluator for `S(z) = z^m e^{az+b+iγz} Π E(z/z_n, p)^{mult}`.
///
/// The `e^{iγz}` term only appears for genus 1, where it balances the growth
/// of the convergence factors `e^{z/z_n}` off the real axis; for genus 0 it
/// would change the type (and for `F = 1 + z²` give `e^{−iz}(1 − iz)`).
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralFactorFn {
    pub split: AhiezerSplit,
}

impl SpectralFactorFn {
    pub fn eval(&self, z: Complex64) -> Complex64 {
        let zs = &self.split.zeros;
        let gamma = if zs.p == 1 { self.split.gamma } else { 0.0 };
        let exponent = zs.a * z + zs.b + Complex64::i() * gamma * z;
        assemble(zs.m, exponent, log_product(&zs.zeros, zs.p, z), z)
    }

    pub fn sample(&self, xs: &[f64]) -> Vec<Complex64> {
        xs.par_iter()
            .map(|&x| self.eval(Complex64::new(x, 0.0)))
            .collect()
    }
}

pub fn factor_from_zeros(zs: &ZeroSet) -> Result<SpectralFactorFn> {
    Ok(SpectralFactorFn {
        split: ahiezer_split(zs)?,
    })
}

/// Samples `S` on the window and builds the zero-set report.
pub fn factorize_zeros(zs: &ZeroSet, window: Window) -> Result<FactorizationReport> {
    let s = factor_from_zeros(zs)?;
    let values = s.sample(&window.xs());
    let sampled = SampledFunction::from_values(window, values)?;
    verify::poly_report(Method::Zeros, Source::Zeros(zs.clone()), Factor::Sampled(sampled))
}

/// First-order estimate of the relative error at `z` from zeros beyond the
/// truncation radius `R`, assuming their density continues as `n(R)/R`:
/// `Σ_{|z_n|>R} |z/z_n|²/2 ≈ |z|²·(n(R)/R)/(2R)`.
pub fn truncation_estimate(zs: &ZeroSet, z: Complex64) -> f64 {
    let r = zs.zeros.iter().map(|w| w.z().norm()).fold(0.0, f64::max);
    if r == 0.0 {
        return 0.0;
    }
    let n = zs.zeros.iter().map(|w| w.mult as f64).sum::<f64>();
    z.norm_sqr() * (n / r) / (2.0 * r)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LindelofRow {
    pub r: f64,
    /// `|Σ_{0<|z_n|≤r} z_n^{−ρ}|`
    pub partial_sum: f64,
    /// `n(r)/r^ρ`
    pub density: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LindelofReport {
    pub rows: Vec<LindelofRow>,
    pub max_partial_sum: f64,
    pub max_density: f64,
    /// Slope of the partial sums against `ln r` over the upper half of the grid.
    pub log_slope: f64,
    /// `false` when the partial sums keep growing (`log_slope > 0.1`).
    pub partial_sums_bounded: bool,
    /// `false` when `n(r)/r^ρ` is still growing at the end of the grid.
    pub density_bounded: bool,
}

/// Finite-truncation diagnostics for the Lindelöf conditions of order `ρ`.
pub fn lindelof_check(zs: &ZeroSet, rho: u32, r_grid: &[f64]) -> Result<LindelofReport> {
    if rho == 0 {
        return Err(Error::InvalidArgument("order must be positive".into()));
    }
    let mut sorted: Vec<(f64, Complex64, u32)> = zs
        .zeros
        .iter()
        .map(|z| (z.z().norm(), z.z(), z.mult))
        .collect();
    sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut grid = r_grid.to_vec();
    grid.sort_by(f64::total_cmp);
    let mut rows = Vec::with_capacity(grid.len());
    let (mut idx, mut sum, mut count) = (0usize, Complex64::new(0.0, 0.0), 0u64);
    for &r in &grid {
        while idx < sorted.len() && sorted[idx].0 <= r {
            let (_, z, m) = sorted[idx];
            sum += z.powi(-(rho as i32)) * m as f64;
            count += m as u64;
            idx += 1;
        }
        rows.push(LindelofRow {
            r,
            partial_sum: sum.norm(),
            density: count as f64 / r.powi(rho as i32),
        });
    }
    let max_partial_sum = rows.iter().map(|r| r.partial_sum).fold(0.0, f64::max);
    let max_density = rows.iter().map(|r| r.density).fold(0.0, f64::max);
    let tail = &rows[rows.len() / 2..];
    let log_slope = slope(
        &tail.iter().map(|r| r.r.ln()).collect::<Vec<_>>(),
        &tail.iter().map(|r| r.partial_sum).collect::<Vec<_>>(),
    );
    let density_slope = slope(
        &tail.iter().map(|r| r.r.ln()).collect::<Vec<_>>(),
        &tail.iter().map(|r| r.density).collect::<Vec<_>>(),
    );
    Ok(LindelofReport {
        rows,
        max_partial_sum,
        max_density,
        log_slope,
        partial_sums_bounded: log_slope <= 0.1,
        density_bounded: density_slope <= 0.1 * max_density.max(1e-300),
    })
}

fn slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    if x.len() < 2 {
        return 0.0;
    }
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    if sxx == 0.0 {
        0.0
    } else {
        sxy / sxx
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogIntegral {
    /// `∫_{−R}^{R} max(0, log|f|)/(1+x²) dx`
    pub integral: f64,
    /// `max(0, log‖f‖_A)·(π − 2 arctan R)` bounds the rest of the line.
    pub tail_bound: f64,
}

/// `∫ max(0, log|f(x)|)/(1 + x²) dx`, truncated to `[−R, R]` plus a tail bound.
pub fn log_integrability(f: &TrigPoly, cutoff: f64) -> Result<LogIntegral> {
    if !(cutoff > 0.0) || !cutoff.is_finite() {
        return Err(Error::InvalidArgument(format!("cutoff must be positive, got {cutoff}")));
    }
    let terms = f.numeric_terms();
    let tau = f.exponential_type();
    let integrand = |x: f64| -> f64 {
        let v: Complex64 = terms
            .iter()
            .map(|(w, c)| c * Complex64::from_polar(1.0, w * x))
            .sum();
        let l = v.norm().ln();
        if l > 0.0 {
            l / (1.0 + x * x)
        } else {
            0.0
        }
    };
    let panel = if tau > 0.0 {
        (std::f64::consts::PI / (2.0 * tau)).min(1.0)
    } else {
        1.0
    };
    let pieces = ((2.0 * cutoff) / panel).ceil() as usize;
    let integral = quadrature::integrate_panels(integrand, -cutoff, cutoff, pieces, 1e-10).value;
    let tail_bound =
        f.wiener_norm().ln().max(0.0) * (std::f64::consts::PI - 2.0 * cutoff.atan());
    Ok(LogIntegral {
        integral,
        tail_bound,
    })
}
