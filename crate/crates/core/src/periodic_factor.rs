//! Fejér–Riesz factorization for commensurable spectra.
//!
//! With base frequency `ρ` and `w = e^{iρz}`, a real `f = Σ_{|k|≤N} a_k χ_{kρ}`
//! equals `w^{−N} P(w)` on the real line, where `P(w) = Σ a_k w^{k+N}` has
//! degree `2N`. The upper half-plane maps into the punctured unit disk, so the
//! factor without zeros in the half-plane keeps the roots of `P` with `|r| ≥ 1`:
//! one root from each pair `(r, 1/r̄)` and half of every root on the circle.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::ap_core::{ExactFrequency, TrigPoly};
use crate::verify::{self, Factor, FactorizationReport, Method, Source};
use crate::{Error, Result};

/// Relative tolerance for merging eigenvalues into one multiple root.
const CLUSTER_TOL: f64 = 1e-7;
const ABERTH_MAX_ITER: usize = 500;
/// Wider radius within which two eigenvalues are merged when their centroid
/// is numerically a multiple root (perturbed double roots split by `√ε`).
const MULTIPLE_ROOT_RADIUS: f64 = 1e-4;
/// `|log|r|| ≤ UNIT_BAND` classifies a root as lying on the unit circle.
const UNIT_BAND: f64 = 1e-7;
/// `|r·conj(r′) − 1| ≤ PAIR_TOL·(1 + |r|²)` pairs `r` with `1/conj(r′)`.
const PAIR_TOL: f64 = 1e-6;
/// Newton polishing of the factor coefficients runs up to this degree.
const POLISH_MAX_DEGREE: usize = 512;
const POLISH_STEPS: usize = 6;

/// `f = Σ_{k=lowest}^{lowest+len−1} coeffs[k−lowest]·χ_{kρ}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LaurentForm {
    pub base: ExactFrequency,
    pub lowest: i64,
    pub coeffs: Vec<Complex64>,
}

impl LaurentForm {
    pub fn highest(&self) -> i64 {
        self.lowest + self.coeffs.len() as i64 - 1
    }

    pub fn to_trig_poly(&self) -> TrigPoly {
        TrigPoly::from_terms(self.coeffs.iter().enumerate().map(|(j, c)| {
            (self.base.scale_int(self.lowest + j as i64), *c)
        }))
    }
}

/// Writes `f` over its largest common base frequency.
pub fn commensurable_base(f: &TrigPoly) -> Result<LaurentForm> {
    if f.is_empty() {
        return Ok(LaurentForm {
            base: ExactFrequency::from_integer(1),
            lowest: 0,
            coeffs: Vec::new(),
        });
    }
    let cb = f.common_base()?;
    let lowest = *cb.exponents.iter().min().unwrap();
    let highest = *cb.exponents.iter().max().unwrap();
    let mut coeffs = vec![Complex64::new(0.0, 0.0); (highest - lowest + 1) as usize];
    for ((_, c), k) in f.terms().zip(&cb.exponents) {
        coeffs[(k - lowest) as usize] = *c;
    }
    Ok(LaurentForm {
        base: cb.base,
        lowest,
        coeffs,
    })
}

fn horner(coeffs: &[Complex64], w: Complex64) -> Complex64 {
    coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, c| acc * w + c)
}

fn derivative(coeffs: &[Complex64]) -> Vec<Complex64> {
    coeffs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, c)| c * k as f64)
        .collect()
}

/// `Σ |a_k||w|^k`, the natural scale for residuals of `p(w)`.
fn magnitude_at(coeffs: &[Complex64], w: Complex64) -> f64 {
    let r = w.norm();
    coeffs.iter().rev().fold(0.0, |acc, c| acc * r + c.norm())
}

/// Simultaneous Aberth–Ehrlich refinement of all root estimates.
fn aberth(coeffs: &[Complex64], mut z: Vec<Complex64>) -> Vec<Complex64> {
    let d = derivative(coeffs);
    let mut done = vec![false; z.len()];
    for _ in 0..ABERTH_MAX_ITER {
        let mut moved = false;
        for k in 0..z.len() {
            if done[k] {
                continue;
            }
            let p = horner(coeffs, z[k]);
            if p.norm() <= 4.0 * f64::EPSILON * magnitude_at(coeffs, z[k]) {
                done[k] = true;
                continue;
            }
            let ratio = p / horner(&d, z[k]);
            let repulsion: Complex64 = z
                .iter()
                .enumerate()
                .filter(|&(j, zj)| j != k && *zj != z[k])
                .map(|(_, zj)| 1.0 / (z[k] - zj))
                .sum();
            let step = ratio / (1.0 - ratio * repulsion);
            if !step.is_finite() {
                done[k] = true;
                continue;
            }
            z[k] -= step;
            if step.norm() <= f64::EPSILON * z[k].norm() {
                done[k] = true;
            } else {
                moved = true;
            }
        }
        if !moved {
            break;
        }
    }
    z
}

fn newton(coeffs: &[Complex64], mut w: Complex64, steps: usize) -> Complex64 {
    let d = derivative(coeffs);
    for _ in 0..steps {
        let p = horner(coeffs, w);
        let dp = horner(&d, w);
        if dp == Complex64::new(0.0, 0.0) {
            break;
        }
        let next = w - p / dp;
        if !next.is_finite() || horner(coeffs, next).norm() > p.norm() {
            break;
        }
        w = next;
    }
    w
}

fn is_multiple_root(coeffs: &[Complex64], c: Complex64) -> bool {
    let d = derivative(coeffs);
    horner(&d, c).norm() <= 1e-6 * magnitude_at(&d, c).max(f64::MIN_POSITIVE)
}

/// Schur iterations allowed before retrying on a shifted polynomial.
const SCHUR_MAX_ITER: usize = 10_000;
/// Origins tried for the companion matrix, in units of the root radius. The
/// unshifted Francis iteration can stall on spectra symmetric under `r ↦ −r`.
const ROOT_SHIFTS: [(f64, f64); 3] = [(0.0, 0.0), (0.1180339887, 0.0730830793), (-0.0618033989, 0.1414213562)];

fn companion_eigenvalues(coeffs: &[Complex64]) -> Option<Vec<Complex64>> {
    let n = coeffs.len() - 1;
    let lead = coeffs[n];
    let mut m = DMatrix::<Complex64>::zeros(n, n);
    for i in 1..n {
        m[(i, i - 1)] = Complex64::new(1.0, 0.0);
    }
    for i in 0..n {
        m[(i, n - 1)] = -coeffs[i] / lead;
    }
    let eig = m.try_schur(f64::EPSILON, SCHUR_MAX_ITER)?.eigenvalues()?;
    Some(eig.iter().copied().collect())
}

/// Coefficients of `p(u + σ)`.
fn taylor_shift(coeffs: &[Complex64], sigma: Complex64) -> Vec<Complex64> {
    let mut c = coeffs.to_vec();
    if sigma == Complex64::new(0.0, 0.0) {
        return c;
    }
    let n = c.len();
    for i in 0..n {
        for k in (i..n - 1).rev() {
            let next = c[k + 1];
            c[k] += sigma * next;
        }
    }
    c
}

/// Cauchy bound `1 + max |a_k/a_n|` on the root moduli.
fn root_radius(coeffs: &[Complex64]) -> f64 {
    let n = coeffs.len() - 1;
    1.0 + coeffs[..n]
        .iter()
        .map(|c| (c / coeffs[n]).norm())
        .fold(0.0, f64::max)
}

/// Roots of `Σ a_k w^k` (ascending coefficients) with multiplicities.
///
/// Eigenvalues of the companion matrix (of a shifted copy when the Schur
/// iteration stalls), refined together by Aberth–Ehrlich steps, clustered into multiple roots and
/// polished by Newton steps (on the `(k−1)`-th derivative for a `k`-fold root).
pub fn polynomial_roots(coeffs: &[Complex64]) -> Result<Vec<(Complex64, usize)>> {
    let n = coeffs.len().saturating_sub(1);
    if n == 0 {
        return Err(Error::InvalidArgument("polynomial degree must be ≥ 1".into()));
    }
    let lead = coeffs[n];
    if lead.norm() == 0.0 {
        return Err(Error::InvalidArgument("leading coefficient is zero".into()));
    }
    let mut raw = None;
    for shift in ROOT_SHIFTS {
        let sigma = Complex64::new(shift.0, shift.1) * root_radius(coeffs);
        if let Some(eig) = companion_eigenvalues(&taylor_shift(coeffs, sigma)) {
            raw = Some(eig.into_iter().map(|r| r + sigma).collect::<Vec<_>>());
            break;
        }
    }
    let raw = raw
        .ok_or_else(|| Error::RootNonConvergence("Schur iteration did not converge".into()))?;
    if raw.iter().any(|r| !r.is_finite()) {
        return Err(Error::RootNonConvergence("non-finite eigenvalue".into()));
    }
    let mut raw = aberth(coeffs, raw);
    raw.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));

    // Single-linkage clustering.
    let mut clusters: Vec<Vec<Complex64>> = Vec::new();
    for r in raw {
        let scale = r.norm().max(1.0);
        let near = clusters.iter().position(|c| {
            c.iter().any(|q| (q - r).norm() <= CLUSTER_TOL * scale)
        });
        match near {
            Some(i) => clusters[i].push(r),
            None => clusters.push(vec![r]),
        }
    }
    // Merge nearby clusters whose centroid behaves like a multiple root.
    loop {
        let mut merged = false;
        'outer: for i in 0..clusters.len() {
            for j in i + 1..clusters.len() {
                let ci = centroid(&clusters[i]);
                let cj = centroid(&clusters[j]);
                let scale = ci.norm().max(1.0);
                if (ci - cj).norm() <= MULTIPLE_ROOT_RADIUS * scale {
                    let mut all = clusters[i].clone();
                    all.extend_from_slice(&clusters[j]);
                    if is_multiple_root(coeffs, centroid(&all)) {
                        clusters[i] = all;
                        clusters.remove(j);
                        merged = true;
                        break 'outer;
                    }
                }
            }
        }
        if !merged {
            break;
        }
    }

    let mut out = Vec::with_capacity(clusters.len());
    for cluster in clusters {
        let k = cluster.len();
        let mut c = centroid(&cluster);
        if k == 1 {
            c = newton(coeffs, c, 2);
        } else {
            let mut d = coeffs.to_vec();
            for _ in 0..k - 1 {
                d = derivative(&d);
            }
            c = newton(&d, c, 2);
        }
        let residual = horner(coeffs, c).norm();
        let scale = magnitude_at(coeffs, c);
        if residual > 1e-6 * scale {
            return Err(Error::RootNonConvergence(format!(
                "residual {residual:.3e} at root {c}"
            )));
        }
        out.push((c, k));
    }
    out.sort_by(|a, b| a.0.re.total_cmp(&b.0.re).then(a.0.im.total_cmp(&b.0.im)));
    Ok(out)
}

fn centroid(v: &[Complex64]) -> Complex64 {
    v.iter().sum::<Complex64>() / v.len() as f64
}

/// Ascending coefficients of `Π (w − r)^mult`.
pub fn poly_from_roots(roots: &[(Complex64, usize)]) -> Vec<Complex64> {
    let mut p = vec![Complex64::new(1.0, 0.0)];
    for (r, mult) in roots {
        for _ in 0..*mult {
            let mut next = vec![Complex64::new(0.0, 0.0); p.len() + 1];
            for (k, c) in p.iter().enumerate() {
                next[k + 1] += c;
                next[k] -= c * r;
            }
            p = next;
        }
    }
    p
}

/// The spectral factor of a nonnegative commensurable `f`, before reporting.
pub fn spectral_factor(f: &TrigPoly) -> Result<TrigPoly> {
    let scale = f.wiener_norm();
    if f.hermitian_defect() > 1e-14 * scale.max(f64::MIN_POSITIVE) {
        return Err(Error::NotRealValued);
    }
    if f.is_empty() {
        return Ok(TrigPoly::zero());
    }
    let form = commensurable_base(f)?;
    let n = form.highest();
    debug_assert_eq!(form.lowest, -n);
    if n == 0 {
        let a0 = form.coeffs[0].re;
        if a0 < 0.0 {
            return Err(Error::NotNonnegative(format!("constant {a0} is negative")));
        }
        return Ok(TrigPoly::constant(a0.sqrt()));
    }
    let roots = polynomial_roots(&form.coeffs)?;
    let mut selected: Vec<(Complex64, usize)> = Vec::new();
    let mut inside: Vec<(Complex64, usize)> = Vec::new();
    let mut outside: Vec<(Complex64, usize)> = Vec::new();
    for (r, mult) in &roots {
        let lr = r.norm().ln();
        if lr.abs() <= UNIT_BAND {
            if mult % 2 == 1 {
                return Err(Error::NotNonnegative(format!(
                    "root {r} on the unit circle has odd multiplicity {mult}"
                )));
            }
            selected.push((*r, mult / 2));
        } else if lr > 0.0 {
            outside.push((*r, *mult));
        } else {
            inside.push((*r, *mult));
        }
    }
    // Every inside root must mirror an outside root.
    let mut used = vec![false; outside.len()];
    for (q, mult) in &inside {
        let partner = outside.iter().enumerate().position(|(i, (r, m))| {
            !used[i] && m == mult && (r * q.conj() - 1.0).norm() <= PAIR_TOL * (1.0 + r.norm_sqr())
        });
        match partner {
            Some(i) => used[i] = true,
            None => {
                return Err(Error::NotNonnegative(format!(
                    "root {q} has no reflected partner"
                )))
            }
        }
    }
    if used.iter().any(|u| !u) {
        return Err(Error::NotNonnegative("unpaired root outside the unit circle".into()));
    }
    selected.extend(outside);
    let degree: usize = selected.iter().map(|(_, m)| m).sum();
    if degree as i64 != n {
        return Err(Error::NotNonnegative(format!(
            "selected {degree} roots, expected {n}"
        )));
    }
    // f = |a_N|·Π|w − r|²/Π|r| on |w| = 1.
    let lead = form.coeffs.last().unwrap().norm();
    let prod: f64 = selected
        .iter()
        .map(|(r, m)| r.norm().powi(*m as i32))
        .product();
    let k = (lead / prod).sqrt();
    let mut q: Vec<Complex64> = poly_from_roots(&selected).into_iter().map(|c| c * k).collect();
    // Roots of a clustered high-degree P carry errors far above ε; Newton on
    // the coefficient map recovers them when the factor is strictly outer.
    let outer = selected.iter().all(|(r, _)| r.norm().ln() > UNIT_BAND);
    if outer && q.len() <= POLISH_MAX_DEGREE + 1 {
        q = polish_factor(&form.coeffs, q);
    }
    let half_shift = form.base.scale_int(n).half();
    let s = TrigPoly::from_terms(
        q.iter()
            .enumerate()
            .map(|(j, c)| (&form.base.scale_int(j as i64) - &half_shift, *c)),
    );
    Ok(normalize_phase(&s))
}

/// `c_k − Σ_l a_{l+k}·conj(a_l)` for `k = 0..=n`, where `f = coeffs[n+k]`.
fn autocorrelation_defect(f: &[Complex64], a: &[Complex64]) -> Vec<Complex64> {
    let n = a.len() - 1;
    (0..=n)
        .map(|k| f[n + k] - (0..=n - k).map(|l| a[l + k] * a[l].conj()).sum::<Complex64>())
        .collect()
}

fn max_norm(v: &[Complex64]) -> f64 {
    v.iter().map(|c| c.norm()).fold(0.0, f64::max)
}

/// Wilson's Newton iteration for `Σ_l a_{l+k}·conj(a_l) = c_k`, with the phase
/// of `a_0` held fixed. The Jacobian is invertible when `a` has no roots on
/// the unit circle; a step is kept only if it lowers the defect.
fn polish_factor(f: &[Complex64], mut a: Vec<Complex64>) -> Vec<Complex64> {
    let n = a.len() - 1;
    let dim = 2 * n + 2;
    let mut defect = autocorrelation_defect(f, &a);
    let floor = 4.0 * f64::EPSILON * max_norm(f) * (n + 1) as f64;
    for _ in 0..POLISH_STEPS {
        if max_norm(&defect) <= floor {
            break;
        }
        let mut jac = DMatrix::<f64>::zeros(dim, dim);
        let mut rhs = nalgebra::DVector::<f64>::zeros(dim);
        // Row 0: Re of k = 0; rows 2k−1, 2k: Re and Im of k ≥ 1; last row: gauge.
        for k in 0..=n {
            for j in 0..=n {
                let mut du = Complex64::new(0.0, 0.0);
                let mut dv = Complex64::new(0.0, 0.0);
                if j >= k {
                    du += a[j - k].conj();
                    dv += Complex64::i() * a[j - k].conj();
                }
                if j + k <= n {
                    du += a[j + k];
                    dv -= Complex64::i() * a[j + k];
                }
                if k == 0 {
                    jac[(0, j)] = du.re;
                    jac[(0, n + 1 + j)] = dv.re;
                } else {
                    jac[(2 * k - 1, j)] = du.re;
                    jac[(2 * k - 1, n + 1 + j)] = dv.re;
                    jac[(2 * k, j)] = du.im;
                    jac[(2 * k, n + 1 + j)] = dv.im;
                }
            }
            if k == 0 {
                rhs[0] = defect[0].re;
            } else {
                rhs[2 * k - 1] = defect[k].re;
                rhs[2 * k] = defect[k].im;
            }
        }
        jac[(dim - 1, 0)] = -a[0].im;
        jac[(dim - 1, n + 1)] = a[0].re;
        let Some(step) = jac.lu().solve(&rhs) else { break };
        let next: Vec<Complex64> = (0..=n)
            .map(|j| a[j] + Complex64::new(step[j], step[n + 1 + j]))
            .collect();
        if next.iter().any(|c| !c.is_finite()) {
            break;
        }
        let next_defect = autocorrelation_defect(f, &next);
        if max_norm(&next_defect) >= max_norm(&defect) {
            break;
        }
        a = next;
        defect = next_defect;
    }
    a
}

/// Rotates `s` so its lowest-frequency coefficient is real and positive.
pub fn normalize_phase(s: &TrigPoly) -> TrigPoly {
    match s.terms().next() {
        Some((_, c)) if c.norm() > 0.0 => s.scale(c.conj() / c.norm()),
        _ => s.clone(),
    }
}

/// Fejér–Riesz factorization with its verification report.
pub fn fejer_riesz(f: &TrigPoly) -> Result<FactorizationReport> {
    let s = spectral_factor(f)?;
    verify::poly_report(Method::Roots, Source::Poly(f.clone()), Factor::Poly(s))
}

/// Zeros of the entire extension `F(z) = Σ a_k e^{ikρz}` in `|z| ≤ radius`,
/// from the roots of the `w`-polynomial (`z = (arg r + 2πj − i·ln|r|)/ρ`).
pub fn entire_zeros(f: &TrigPoly, radius: f64) -> Result<Vec<(Complex64, usize)>> {
    let form = commensurable_base(f)?;
    if form.coeffs.len() < 2 {
        return Ok(Vec::new());
    }
    let rho = form.base.value();
    let roots = polynomial_roots(&form.coeffs)?;
    let mut out = Vec::new();
    for (r, mult) in roots {
        if r.norm() == 0.0 {
            continue;
        }
        let y = -r.norm().ln() / rho;
        let x0 = r.arg() / rho;
        let period = 2.0 * std::f64::consts::PI / rho;
        let jmax = ((radius + x0.abs()) / period).ceil() as i64 + 1;
        for j in -jmax..=jmax {
            let z = Complex64::new(x0 + j as f64 * period, y);
            if z.norm() <= radius {
                out.push((z, mult));
            }
        }
    }
    Ok(out)
}

/// Limit of `n_F(r)/r` for the extension of a commensurable `f`: `b(f)/π`.
pub fn zero_density_limit(f: &TrigPoly) -> f64 {
    f.bandwidth().map(|b| b.value()).unwrap_or(0.0) / std::f64::consts::PI
}
