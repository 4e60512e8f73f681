use std::collections::{BTreeMap, HashMap};
use std::f64::consts::PI;

use num_complex::Complex64;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::exact::{rational_gcd, ExactFrequency};
use super::lattice::{add_coords, Coords, Lattice};
use crate::{Error, Result};

/// Finite almost periodic trigonometric sum `Σ c_ω χ_ω`, `χ_ω(x) = e^{iωx}`.
///
/// Keys are exact, so the spectrum, its endpoints and the bandwidth are exact;
/// no zero coefficient is ever stored.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct TrigPoly {
    terms: BTreeMap<ExactFrequency, Complex64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumInfo {
    pub inf_freq: ExactFrequency,
    pub sup_freq: ExactFrequency,
    pub bandwidth: ExactFrequency,
    pub term_count: usize,
}

impl SpectrumInfo {
    /// `max(|inf Ω|, |sup Ω|)`, the exponential type of the entire extension.
    pub fn exponential_type(&self) -> ExactFrequency {
        let a = self.inf_freq.abs();
        let b = self.sup_freq.abs();
        if a > b {
            a
        } else {
            b
        }
    }
}

/// Result of splitting frequencies over a common base: `ω = k·base`.
#[derive(Clone, Debug, PartialEq)]
pub struct CommonBase {
    pub base: ExactFrequency,
    pub exponents: Vec<i64>,
}

/// Finds the largest `base > 0` with every frequency an integer multiple of it.
/// A spectrum containing only `0` gets base `1`.
pub fn common_base(freqs: &[ExactFrequency]) -> Result<CommonBase> {
    let Some(reference) = freqs.iter().find(|f| !f.is_zero()) else {
        return Ok(CommonBase {
            base: ExactFrequency::from_integer(1),
            exponents: vec![0; freqs.len()],
        });
    };
    let mut ratios = Vec::with_capacity(freqs.len());
    for f in freqs {
        ratios.push(
            f.rational_ratio(reference)
                .ok_or(Error::IncommensurableSpectrum)?,
        );
    }
    let g = rational_gcd(&ratios).expect("reference ratio is nonzero");
    let mut base = reference.scale(&g);
    let mut sign = 1i64;
    if !base.is_positive() {
        base = -base;
        sign = -1;
    }
    let exponents = ratios
        .iter()
        .map(|r| {
            let k = r / &g;
            debug_assert!(k.is_integer());
            sign * k.to_integer().to_i64().expect("exponent fits i64")
        })
        .collect();
    Ok(CommonBase { base, exponents })
}

impl TrigPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: impl Into<Complex64>) -> Self {
        Self::from_terms([(ExactFrequency::zero(), c.into())])
    }

    /// The character `χ_ω`.
    pub fn character(freq: ExactFrequency) -> Self {
        Self::from_terms([(freq, Complex64::new(1.0, 0.0))])
    }

    /// Sums duplicate frequencies and drops exact zeros.
    pub fn from_terms(terms: impl IntoIterator<Item = (ExactFrequency, Complex64)>) -> Self {
        let mut map: BTreeMap<ExactFrequency, Complex64> = BTreeMap::new();
        for (f, c) in terms {
            *map.entry(f).or_insert(Complex64::zero()) += c;
        }
        map.retain(|_, c| !c.is_zero());
        Self { terms: map }
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&ExactFrequency, &Complex64)> {
        self.terms.iter()
    }

    pub fn frequencies(&self) -> impl Iterator<Item = &ExactFrequency> {
        self.terms.keys()
    }

    /// `(ω as f64, c_ω)` pairs for fast numeric evaluation.
    pub fn numeric_terms(&self) -> Vec<(f64, Complex64)> {
        self.terms.iter().map(|(f, c)| (f.value(), *c)).collect()
    }

    /// Bohr coefficient `f̂(ω) = M(f·χ_{−ω})`: exact lookup.
    pub fn coefficient(&self, freq: &ExactFrequency) -> Complex64 {
        self.terms.get(freq).copied().unwrap_or_default()
    }

    /// `Σ c_ω e^{iωz}`, the entire extension evaluated at complex `z`.
    pub fn evaluate(&self, z: Complex64) -> Complex64 {
        self.terms
            .iter()
            .map(|(f, c)| c * (Complex64::i() * f.value() * z).exp())
            .sum()
    }

    pub fn evaluate_real(&self, x: f64) -> Complex64 {
        self.terms
            .iter()
            .map(|(f, c)| c * Complex64::from_polar(1.0, f.value() * x))
            .sum()
    }

    /// Evaluates at many real points (parallel for large jobs).
    pub fn sample(&self, xs: &[f64]) -> Vec<Complex64> {
        let terms = self.numeric_terms();
        let eval = |x: &f64| -> Complex64 {
            terms
                .iter()
                .map(|(w, c)| c * Complex64::from_polar(1.0, w * x))
                .sum()
        };
        if xs.len() * terms.len().max(1) > 1 << 14 {
            xs.par_iter().map(eval).collect()
        } else {
            xs.iter().map(eval).collect()
        }
    }

    pub fn spectrum(&self) -> Option<SpectrumInfo> {
        let (inf, _) = self.terms.first_key_value()?;
        let (sup, _) = self.terms.last_key_value()?;
        Some(SpectrumInfo {
            inf_freq: inf.clone(),
            sup_freq: sup.clone(),
            bandwidth: sup - inf,
            term_count: self.terms.len(),
        })
    }

    /// Exponential type `τ = max(|inf Ω|, |sup Ω|)` as a float (0 for the zero function).
    pub fn exponential_type(&self) -> f64 {
        self.spectrum()
            .map(|s| s.exponential_type().value())
            .unwrap_or(0.0)
    }

    pub fn bandwidth(&self) -> Option<ExactFrequency> {
        self.spectrum().map(|s| s.bandwidth)
    }

    /// `‖f‖_A = Σ |c_ω|`.
    pub fn wiener_norm(&self) -> f64 {
        self.terms.values().map(|c| c.norm()).sum()
    }

    /// Exact Hermitian symmetry `c_{−ω} = conj(c_ω)`.
    pub fn is_real_valued(&self) -> bool {
        self.terms
            .iter()
            .all(|(f, c)| self.coefficient(&-f) == c.conj())
    }

    /// Largest `|c_{−ω} − conj(c_ω)|`, a tolerance-friendly version of
    /// [`is_real_valued`](Self::is_real_valued).
    pub fn hermitian_defect(&self) -> f64 {
        self.terms
            .iter()
            .map(|(f, c)| (self.coefficient(&-f) - c.conj()).norm())
            .fold(0.0, f64::max)
    }

    pub fn conj(&self) -> Self {
        Self {
            terms: self.terms.iter().map(|(f, c)| (-f, c.conj())).collect(),
        }
    }

    /// `(f + conj f)/2`; spectrum symmetric, values real.
    pub fn real_part(&self) -> Self {
        self.add(&self.conj()).scale(Complex64::new(0.5, 0.0))
    }

    pub fn scale(&self, k: Complex64) -> Self {
        Self::from_terms(self.terms.iter().map(|(f, c)| (f.clone(), c * k)))
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut terms = self.terms.clone();
        for (f, c) in &other.terms {
            *terms.entry(f.clone()).or_insert(Complex64::zero()) += c;
        }
        terms.retain(|_, c| !c.is_zero());
        Self { terms }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    /// `χ_ω · f`: every frequency moves by `ω`, coefficients untouched.
    pub fn shift(&self, freq: &ExactFrequency) -> Self {
        Self {
            terms: self.terms.iter().map(|(f, c)| (f + freq, *c)).collect(),
        }
    }

    /// Dilation `(𝔇_ρ f)(x) = f(ρx)`: frequencies scale by `ρ`, coefficients untouched.
    pub fn dilate(&self, rho: &ExactFrequency) -> Result<Self> {
        if !rho.is_positive() {
            return Err(Error::InvalidArgument(format!(
                "dilation factor must be positive, got {rho}"
            )));
        }
        Ok(Self {
            terms: self.terms.iter().map(|(f, c)| (f * rho, *c)).collect(),
        })
    }

    /// Termwise derivative `Σ iω c_ω χ_ω`.
    pub fn derivative(&self) -> Self {
        Self::from_terms(
            self.terms
                .iter()
                .map(|(f, c)| (f.clone(), c * Complex64::new(0.0, f.value()))),
        )
    }

    /// Exact-frequency product; coefficient at `ω` is `Σ_{ω1+ω2=ω} c_{ω1} d_{ω2}`.
    pub fn multiply(&self, other: &Self) -> Self {
        if self.is_empty() || other.is_empty() {
            return Self::zero();
        }
        if let Some(lat) = Lattice::spanning(self.frequencies().chain(other.frequencies())) {
            let enc = |p: &Self| -> Vec<(Coords, Complex64)> {
                p.terms
                    .iter()
                    .map(|(f, c)| (lat.encode(f).expect("spanned"), *c))
                    .collect()
            };
            let (a, b) = (enc(self), enc(other));
            let mut acc: HashMap<Coords, Complex64> = HashMap::new();
            for (fa, ca) in &a {
                for (fb, cb) in &b {
                    *acc.entry(add_coords(fa, fb)).or_insert(Complex64::zero()) += ca * cb;
                }
            }
            return Self::from_terms(acc.into_iter().map(|(k, c)| (lat.decode(&k), c)));
        }
        let mut acc: BTreeMap<ExactFrequency, Complex64> = BTreeMap::new();
        for (fa, ca) in &self.terms {
            for (fb, cb) in &other.terms {
                *acc.entry(fa + fb).or_insert(Complex64::zero()) += ca * cb;
            }
        }
        Self::from_terms(acc)
    }

    /// `|s|² = s · conj(s)`, real-valued by construction.
    pub fn modulus_squared(&self) -> Self {
        let sq = self.multiply(&self.conj());
        // Pair sums for ω and −ω are accumulated in different orders; restore
        // exact Hermitian symmetry.
        let mut terms = BTreeMap::new();
        for (f, c) in &sq.terms {
            if f.is_zero() {
                terms.insert(f.clone(), Complex64::new(c.re, 0.0));
            } else if f.is_positive() {
                let partner = sq.coefficient(&-f);
                let avg = (c + partner.conj()) * 0.5;
                terms.insert(f.clone(), avg);
                terms.insert(-f, avg.conj());
            }
        }
        terms.retain(|_, c: &mut Complex64| !c.is_zero());
        Self { terms }
    }

    /// Drops coefficients with `|c| ≤ rel_tol · max |c|`.
    pub fn prune(&self, rel_tol: f64) -> Self {
        let max = self.terms.values().map(|c| c.norm()).fold(0.0, f64::max);
        let cut = rel_tol * max;
        Self {
            terms: self
                .terms
                .iter()
                .filter(|(_, c)| c.norm() > cut)
                .map(|(f, c)| (f.clone(), *c))
                .collect(),
        }
    }

    /// Splits the spectrum into commensurability classes. The constant term,
    /// when present, forms its own class.
    pub fn commensurable_classes(&self) -> Vec<TrigPoly> {
        let mut classes: BTreeMap<ExactFrequency, Vec<(ExactFrequency, Complex64)>> =
            BTreeMap::new();
        let mut constant = None;
        for (f, c) in &self.terms {
            match f.direction() {
                None => constant = Some(*c),
                Some(dir) => classes.entry(dir).or_default().push((f.clone(), *c)),
            }
        }
        let mut out: Vec<TrigPoly> = Vec::with_capacity(classes.len() + 1);
        if let Some(c) = constant {
            out.push(TrigPoly::constant(c));
        }
        out.extend(classes.into_values().map(TrigPoly::from_terms));
        out
    }

    /// Base and integer exponents when the spectrum is commensurable.
    pub fn common_base(&self) -> Result<CommonBase> {
        let freqs: Vec<ExactFrequency> = self.terms.keys().cloned().collect();
        common_base(&freqs)
    }
}

/// `(1/2L)∫_{−L}^{L} f(x) e^{−iωx} dx`, in closed form per term.
///
/// Converges to [`TrigPoly::coefficient`] with error at most
/// `Σ_{ω'≠ω} |c_ω'| / (|ω' − ω| L)`.
pub fn mean_value_numeric(f: &TrigPoly, freq: &ExactFrequency, half_width: f64) -> Result<Complex64> {
    if !(half_width > 0.0) || !half_width.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "window half-width must be positive, got {half_width}"
        )));
    }
    Ok(f.terms()
        .map(|(w, c)| {
            let d = (w - freq).value();
            let arg = d * half_width;
            let sinc = if d == 0.0 {
                1.0
            } else if arg.abs() < 1e-8 {
                1.0 - arg * arg / 6.0
            } else {
                arg.sin() / arg
            };
            c * sinc
        })
        .sum())
}

/// The constant `C = Σ_{ω'≠ω} 2|c_ω'|/|ω'−ω|` of the `C/L` convergence bound.
pub fn mean_value_error_constant(f: &TrigPoly, freq: &ExactFrequency) -> f64 {
    f.terms()
        .filter(|(w, _)| *w != freq)
        .map(|(w, c)| 2.0 * c.norm() / (w - freq).value().abs())
        .sum()
}

/// Angle helper shared by the samplers: maps integer exponent `k` at grid
/// index `j` of `m` to `2πjk/m` without losing precision for large `j·k`.
pub(crate) fn grid_angle(j: usize, k: i64, m: usize) -> f64 {
    let r = ((j as i128 * k as i128).rem_euclid(m as i128)) as f64;
    2.0 * PI * r / m as f64
}

#[derive(Serialize, Deserialize)]
struct TermRepr {
    freq: ExactFrequency,
    re: f64,
    im: f64,
}

#[derive(Serialize, Deserialize)]
struct PolyRepr {
    terms: Vec<TermRepr>,
}

impl Serialize for TrigPoly {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        PolyRepr {
            terms: self
                .terms
                .iter()
                .map(|(f, c)| TermRepr {
                    freq: f.clone(),
                    re: c.re,
                    im: c.im,
                })
                .collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for TrigPoly {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let repr = PolyRepr::deserialize(deserializer)?;
        Ok(TrigPoly::from_terms(
            repr.terms
                .into_iter()
                .map(|t| (t.freq, Complex64::new(t.re, t.im))),
        ))
    }
}

/// Convenience: integer frequency.
pub fn freq(n: i64) -> ExactFrequency {
    ExactFrequency::from_integer(n)
}

/// Convenience: `Σ c_k χ_k` with integer frequencies.
pub fn integer_poly(terms: &[(i64, Complex64)]) -> TrigPoly {
    TrigPoly::from_terms(terms.iter().map(|(k, c)| (freq(*k), *c)))
}
