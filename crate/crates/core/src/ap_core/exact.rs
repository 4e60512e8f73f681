//! Exact real frequencies of the form `q0 + q1·√d1 + … + qk·√dk` with rational
//! `qi` and distinct squarefree radicands `di > 1`.
//!
//! The square roots of distinct squarefree integers are linearly independent
//! over ℚ, so the canonical form below is unique: two values are equal iff
//! their term lists are equal. Ordering is exact (a float fast path decides
//! when the gap is well outside rounding error, otherwise the sign of the
//! difference is resolved by repeated conjugation).

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::Error as ApError;

/// Canonical term list: sorted by radicand, radicand 1 carries the rational
/// part, no zero coefficients.
type Surd = Vec<(u64, BigRational)>;

#[derive(Clone)]
pub struct ExactFrequency {
    terms: Surd,
    approx: f64,
    magnitude: f64,
}

/// Splits `n = s² · d` with `d` squarefree; returns `(s, d)`.
pub fn squarefree_split(n: u64) -> (u64, u64) {
    assert!(n > 0, "radicand must be positive");
    let mut s = 1u64;
    let mut d = 1u64;
    let mut rest = n;
    let mut p = 2u64;
    while p.saturating_mul(p) <= rest {
        let mut e = 0;
        while rest.is_multiple_of(p) {
            rest /= p;
            e += 1;
        }
        for _ in 0..e / 2 {
            s *= p;
        }
        if e % 2 == 1 {
            d *= p;
        }
        p += if p == 2 { 1 } else { 2 };
    }
    d *= rest;
    (s, d)
}

fn largest_prime_factor(n: u64) -> u64 {
    let mut rest = n;
    let mut largest = 1;
    let mut p = 2u64;
    while p.saturating_mul(p) <= rest {
        while rest.is_multiple_of(p) {
            rest /= p;
            largest = p;
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if rest > 1 {
        largest = largest.max(rest);
    }
    largest
}

pub fn is_prime(n: u64) -> bool {
    n >= 2 && largest_prime_factor(n) == n
}

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

fn canonicalize(raw: impl IntoIterator<Item = (u64, BigRational)>) -> Surd {
    let mut out: Surd = Vec::new();
    for (radicand, coeff) in raw {
        if coeff.is_zero() {
            continue;
        }
        let (s, d) = squarefree_split(radicand);
        let coeff = coeff * rat(s as i64);
        out.push((d, coeff));
    }
    out.sort_by_key(|(d, _)| *d);
    let mut merged: Surd = Vec::with_capacity(out.len());
    for (d, c) in out {
        match merged.last_mut() {
            Some((ld, lc)) if *ld == d => *lc += c,
            _ => merged.push((d, c)),
        }
    }
    merged.retain(|(_, c)| !c.is_zero());
    merged
}

fn surd_add(a: &[(u64, BigRational)], b: &[(u64, BigRational)], negate_b: bool) -> Surd {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let take_a = j >= b.len() || (i < a.len() && a[i].0 < b[j].0);
        let take_b = i >= a.len() || (j < b.len() && b[j].0 < a[i].0);
        if take_a {
            out.push(a[i].clone());
            i += 1;
        } else if take_b {
            let c = if negate_b { -b[j].1.clone() } else { b[j].1.clone() };
            out.push((b[j].0, c));
            j += 1;
        } else {
            let c = if negate_b { &a[i].1 - &b[j].1 } else { &a[i].1 + &b[j].1 };
            if !c.is_zero() {
                out.push((a[i].0, c));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

fn surd_mul(a: &[(u64, BigRational)], b: &[(u64, BigRational)]) -> Surd {
    let mut raw = Vec::with_capacity(a.len() * b.len());
    for (da, ca) in a {
        for (db, cb) in b {
            let g = da.gcd(db);
            let d = (da / g) as u128 * (db / g) as u128;
            let d = u64::try_from(d).expect("radicand overflow in frequency product");
            raw.push((d, ca * cb * rat(g as i64)));
        }
    }
    canonicalize(raw)
}

fn surd_scale(a: &[(u64, BigRational)], k: &BigRational) -> Surd {
    if k.is_zero() {
        return Vec::new();
    }
    a.iter().map(|(d, c)| (*d, c * k)).collect()
}

/// Splits `x = A + B·√p` where no radicand of `A` or `B` is divisible by `p`.
fn split_on_prime(x: &[(u64, BigRational)], p: u64) -> (Surd, Surd) {
    let mut a = Vec::new();
    let mut b = Vec::new();
    for (d, c) in x {
        if d % p == 0 {
            b.push((d / p, c.clone()));
        } else {
            a.push((*d, c.clone()));
        }
    }
    (a, b)
}

fn max_prime(x: &[(u64, BigRational)]) -> u64 {
    x.iter().map(|(d, _)| largest_prime_factor(*d)).max().unwrap_or(1)
}

fn surd_sign(x: &[(u64, BigRational)]) -> Ordering {
    if x.is_empty() {
        return Ordering::Equal;
    }
    let p = max_prime(x);
    if p == 1 {
        return x[0].1.cmp(&BigRational::zero());
    }
    let (a, b) = split_on_prime(x, p);
    let sa = surd_sign(&a);
    let sb = surd_sign(&b);
    if sb == Ordering::Equal || sa == sb {
        return sa;
    }
    if sa == Ordering::Equal {
        return sb;
    }
    // Opposite signs: compare A² against p·B².
    let a2 = surd_mul(&a, &a);
    let b2 = surd_scale(&surd_mul(&b, &b), &rat(p as i64));
    let diff = surd_add(&a2, &b2, true);
    match sa {
        Ordering::Greater => surd_sign(&diff),
        _ => surd_sign(&diff).reverse(),
    }
}

fn surd_recip(x: &[(u64, BigRational)]) -> Option<Surd> {
    if x.is_empty() {
        return None;
    }
    let p = max_prime(x);
    if p == 1 {
        return Some(vec![(1, x[0].1.recip())]);
    }
    // 1/(A + B√p) = (A − B√p) / (A² − p·B²)
    let (a, b) = split_on_prime(x, p);
    let a2 = surd_mul(&a, &a);
    let b2 = surd_scale(&surd_mul(&b, &b), &rat(p as i64));
    let norm = surd_add(&a2, &b2, true);
    let inv_norm = surd_recip(&norm)?;
    let sqrt_p = vec![(p, BigRational::one())];
    let conj = surd_add(&a, &surd_mul(&b, &sqrt_p), true);
    Some(surd_mul(&conj, &inv_norm))
}

impl ExactFrequency {
    fn from_surd(terms: Surd) -> Self {
        let mut approx = 0.0;
        let mut magnitude = 0.0;
        for (d, c) in &terms {
            let v = c.to_f64().unwrap_or(f64::NAN) * (*d as f64).sqrt();
            approx += v;
            magnitude += v.abs();
        }
        Self {
            terms,
            approx,
            magnitude,
        }
    }

    pub fn zero() -> Self {
        Self::from_surd(Vec::new())
    }

    pub fn from_integer(n: i64) -> Self {
        Self::from_surd(canonicalize([(1, rat(n))]))
    }

    pub fn from_rational(q: BigRational) -> Self {
        Self::from_surd(canonicalize([(1, q)]))
    }

    pub fn from_ratio(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        Self::from_rational(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    /// `√n` in canonical form (`√8` becomes `2√2`).
    pub fn sqrt_of(n: u64) -> Self {
        Self::from_surd(canonicalize([(n, BigRational::one())]))
    }

    /// Builds `rational + Σ coeff·√radicand`; radicands need not be squarefree.
    pub fn new(
        rational: BigRational,
        radicals: impl IntoIterator<Item = (u64, BigRational)>,
    ) -> Result<Self, ApError> {
        let mut raw = vec![(1u64, rational)];
        for (d, c) in radicals {
            if d == 0 {
                return Err(ApError::Parse("radicand must be positive".into()));
            }
            raw.push((d, c));
        }
        Ok(Self::from_surd(canonicalize(raw)))
    }

    pub fn rational_part(&self) -> BigRational {
        match self.terms.first() {
            Some((1, c)) => c.clone(),
            _ => BigRational::zero(),
        }
    }

    /// Radical terms `(squarefree radicand > 1, coefficient)` in ascending radicand order.
    pub fn radical_terms(&self) -> impl Iterator<Item = (u64, &BigRational)> {
        self.terms.iter().filter(|(d, _)| *d != 1).map(|(d, c)| (*d, c))
    }

    /// All coordinates over the basis `{1, √d, …}`, rational part first when present.
    pub fn coordinates(&self) -> &[(u64, BigRational)] {
        &self.terms
    }

    pub fn value(&self) -> f64 {
        self.approx
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_rational(&self) -> bool {
        self.terms.iter().all(|(d, _)| *d == 1)
    }

    pub fn signum(&self) -> Ordering {
        if self.magnitude.is_finite() && self.approx.abs() > self.float_slack() {
            return self.approx.partial_cmp(&0.0).unwrap();
        }
        surd_sign(&self.terms)
    }

    pub fn is_positive(&self) -> bool {
        self.signum() == Ordering::Greater
    }

    pub fn abs(&self) -> Self {
        if self.signum() == Ordering::Less {
            -self
        } else {
            self.clone()
        }
    }

    fn float_slack(&self) -> f64 {
        self.magnitude * 1e-13 * (self.terms.len() as f64 + 1.0)
    }

    pub fn scale(&self, k: &BigRational) -> Self {
        Self::from_surd(surd_scale(&self.terms, k))
    }

    pub fn scale_int(&self, k: i64) -> Self {
        self.scale(&rat(k))
    }

    pub fn half(&self) -> Self {
        self.scale(&BigRational::new(BigInt::one(), BigInt::from(2)))
    }

    pub fn recip(&self) -> Option<Self> {
        surd_recip(&self.terms).map(Self::from_surd)
    }

    pub fn checked_div(&self, other: &Self) -> Option<Self> {
        other.recip().map(|r| self * &r)
    }

    /// Returns `q` with `self = q·other` when such a rational exists.
    pub fn rational_ratio(&self, other: &Self) -> Option<BigRational> {
        if other.is_zero() {
            return None;
        }
        if self.is_zero() {
            return Some(BigRational::zero());
        }
        if self.terms.len() != other.terms.len() {
            return None;
        }
        let q = &self.terms[0].1 / &other.terms[0].1;
        for ((da, ca), (db, cb)) in self.terms.iter().zip(&other.terms) {
            if da != db || *ca != &q * cb {
                return None;
            }
        }
        Some(q)
    }

    /// Direction representative: `self` divided by its leading coordinate.
    /// Two nonzero values are commensurable iff their directions agree.
    pub fn direction(&self) -> Option<Self> {
        let lead = self.terms.first()?.1.clone();
        Some(self.scale(&lead.recip()))
    }

    /// Smallest integer `k` with `k ≥ self` (exact).
    pub fn ceil(&self) -> BigInt {
        let guess = BigInt::from(self.approx.ceil() as i64);
        let mut k = guess;
        loop {
            let kf = Self::from_rational(BigRational::from_integer(k.clone()));
            if kf < *self {
                k += 1;
                continue;
            }
            let below = Self::from_rational(BigRational::from_integer(&k - 1));
            if below >= *self {
                k -= 1;
                continue;
            }
            return k;
        }
    }
}

/// Smallest integer `k` with `k² ≥ n`.
pub fn ceil_sqrt(n: &BigInt) -> BigInt {
    let s = n.sqrt();
    if &s * &s < *n {
        s + 1
    } else {
        s
    }
}

impl PartialEq for ExactFrequency {
    fn eq(&self, other: &Self) -> bool {
        self.terms == other.terms
    }
}

impl Eq for ExactFrequency {}

impl Hash for ExactFrequency {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.terms.hash(state);
    }
}

impl Ord for ExactFrequency {
    fn cmp(&self, other: &Self) -> Ordering {
        if self.terms == other.terms {
            return Ordering::Equal;
        }
        let gap = self.approx - other.approx;
        let slack = self.float_slack() + other.float_slack();
        if gap.is_finite() && slack.is_finite() && gap.abs() > slack {
            return gap.partial_cmp(&0.0).unwrap();
        }
        surd_sign(&surd_add(&self.terms, &other.terms, true))
    }
}

impl PartialOrd for ExactFrequency {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Add for &ExactFrequency {
    type Output = ExactFrequency;
    fn add(self, rhs: &ExactFrequency) -> ExactFrequency {
        ExactFrequency::from_surd(surd_add(&self.terms, &rhs.terms, false))
    }
}

impl Sub for &ExactFrequency {
    type Output = ExactFrequency;
    fn sub(self, rhs: &ExactFrequency) -> ExactFrequency {
        ExactFrequency::from_surd(surd_add(&self.terms, &rhs.terms, true))
    }
}

impl Mul for &ExactFrequency {
    type Output = ExactFrequency;
    fn mul(self, rhs: &ExactFrequency) -> ExactFrequency {
        ExactFrequency::from_surd(surd_mul(&self.terms, &rhs.terms))
    }
}

impl Neg for &ExactFrequency {
    type Output = ExactFrequency;
    fn neg(self) -> ExactFrequency {
        ExactFrequency::from_surd(self.terms.iter().map(|(d, c)| (*d, -c)).collect())
    }
}

impl Neg for ExactFrequency {
    type Output = ExactFrequency;
    fn neg(self) -> ExactFrequency {
        -&self
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for ExactFrequency {
            type Output = ExactFrequency;
            fn $m(self, rhs: ExactFrequency) -> ExactFrequency {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl From<i64> for ExactFrequency {
    fn from(n: i64) -> Self {
        Self::from_integer(n)
    }
}

/// Parses `"p/q"`, `"p"` or a plain decimal such as `"-1.4142"` or `"2.5e-3"`
/// into an exact rational.
pub fn parse_rational(s: &str) -> Result<BigRational, ApError> {
    let s = s.trim();
    let bad = || ApError::Parse(format!("not an exact rational: {s:?}"));
    if s.is_empty() {
        return Err(bad());
    }
    if s.contains('/') {
        let r = BigRational::from_str(s).map_err(|_| bad())?;
        return Ok(r);
    }
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let (neg, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = match digits.split_once('.') {
        Some((i, f)) => (i, f),
        None => (digits, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let all: String = format!("{int_part}{frac_part}");
    let num = BigInt::from_str(if all.is_empty() { "0" } else { &all }).map_err(|_| bad())?;
    let scale = exponent - frac_part.len() as i32;
    let ten = BigInt::from(10);
    let mut r = if scale >= 0 {
        BigRational::from_integer(num * num_traits::pow(ten, scale as usize))
    } else {
        BigRational::new(num, num_traits::pow(ten, (-scale) as usize))
    };
    if neg {
        r = -r;
    }
    Ok(r)
}

pub fn format_rational(q: &BigRational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

impl fmt::Display for ExactFrequency {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (d, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            if i > 0 {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            } else if neg {
                write!(f, "-")?;
            }
            let a = c.abs();
            match (*d, a.is_one()) {
                (1, _) => write!(f, "{}", format_rational(&a))?,
                (d, true) => write!(f, "√{d}")?,
                (d, false) => write!(f, "{}·√{d}", format_rational(&a))?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for ExactFrequency {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ExactFrequency({self} ≈ {})", self.approx)
    }
}

#[derive(Serialize, Deserialize)]
struct FreqRepr {
    rat: String,
    #[serde(default)]
    rad: Vec<(String, String)>,
}

impl Serialize for ExactFrequency {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        FreqRepr {
            rat: format_rational(&self.rational_part()),
            rad: self
                .radical_terms()
                .map(|(d, c)| (d.to_string(), format_rational(c)))
                .collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ExactFrequency {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let repr = FreqRepr::deserialize(deserializer)?;
        let rational = parse_rational(&repr.rat).map_err(D::Error::custom)?;
        let mut radicals = Vec::with_capacity(repr.rad.len());
        for (d, c) in &repr.rad {
            let d: u64 = d
                .trim()
                .parse()
                .map_err(|_| D::Error::custom(format!("bad radicand {d:?}")))?;
            radicals.push((d, parse_rational(c).map_err(D::Error::custom)?));
        }
        ExactFrequency::new(rational, radicals).map_err(D::Error::custom)
    }
}

/// Exact test of linear independence over ℚ, by Gaussian elimination on the
/// coordinate vectors over `{1, √d1, √d2, …}`.
#[allow(clippy::needless_range_loop)]
pub fn qlin_independent(freqs: &[ExactFrequency]) -> bool {
    let mut basis: Vec<u64> = freqs
        .iter()
        .flat_map(|f| f.terms.iter().map(|(d, _)| *d))
        .collect();
    basis.sort_unstable();
    basis.dedup();
    if freqs.len() > basis.len() {
        return false;
    }
    let mut rows: Vec<Vec<BigRational>> = freqs
        .iter()
        .map(|f| {
            let mut row = vec![BigRational::zero(); basis.len()];
            for (d, c) in &f.terms {
                let idx = basis.binary_search(d).unwrap();
                row[idx] = c.clone();
            }
            row
        })
        .collect();
    let mut rank = 0;
    for col in 0..basis.len() {
        let Some(pivot) = (rank..rows.len()).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(rank, pivot);
        let pivot_row = rows[rank].clone();
        for r in 0..rows.len() {
            if r != rank && !rows[r][col].is_zero() {
                let factor = &rows[r][col] / &pivot_row[col];
                for c in col..basis.len() {
                    let delta = &factor * &pivot_row[c];
                    rows[r][c] -= delta;
                }
            }
        }
        rank += 1;
    }
    rank == freqs.len()
}

/// Greatest common divisor of rationals: `gcd(a/b, c/d) = gcd(a, c) / lcm(b, d)`.
pub fn rational_gcd(values: &[BigRational]) -> Option<BigRational> {
    let mut it = values.iter().filter(|v| !v.is_zero());
    let first = it.next()?.abs();
    Some(it.fold(first, |acc, v| {
        let num = acc.numer().gcd(v.numer());
        let den = acc.denom().lcm(v.denom());
        BigRational::new(num, den)
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn squarefree_canonical_form() {
        assert_eq!(ExactFrequency::sqrt_of(8), ExactFrequency::sqrt_of(2).scale_int(2));
        assert_eq!(ExactFrequency::sqrt_of(9), ExactFrequency::from_integer(3));
        assert_eq!(squarefree_split(72), (6, 2));
    }

    #[test]
    fn radical_products_are_exact() {
        let r2 = ExactFrequency::sqrt_of(2);
        let r3 = ExactFrequency::sqrt_of(3);
        assert_eq!(&r2 * &r2, ExactFrequency::from_integer(2));
        assert_eq!(&r2 * &r3, ExactFrequency::sqrt_of(6));
        let r6 = ExactFrequency::sqrt_of(6);
        assert_eq!(&r6 * &r3, ExactFrequency::sqrt_of(2).scale_int(3));
    }

    #[test]
    fn reciprocal_rationalizes() {
        let x = &ExactFrequency::from_integer(3) + &ExactFrequency::sqrt_of(2);
        let inv = x.recip().unwrap();
        // 1/(3+√2) = (3−√2)/7
        let expected = ExactFrequency::new(q(3, 7), [(2, q(-1, 7))]).unwrap();
        assert_eq!(inv, expected);
        let y = &(&ExactFrequency::sqrt_of(2) + &ExactFrequency::sqrt_of(3)) + &ExactFrequency::sqrt_of(5);
        assert_eq!(&y * &y.recip().unwrap(), ExactFrequency::from_integer(1));
        assert!(ExactFrequency::zero().recip().is_none());
    }

    #[test]
    fn exact_ordering_of_near_values() {
        // 1.4142 < √2 < 1.41422
        let r2 = ExactFrequency::sqrt_of(2);
        let a = ExactFrequency::from_rational(parse_rational("1.4142").unwrap());
        let b = ExactFrequency::from_rational(parse_rational("1.41422").unwrap());
        assert!(a < r2 && r2 < b);
        assert_ne!(a, r2);
        // 3√2 − √3 − √5 − 1 vs exact sign through conjugation
        let big = BigRational::from_integer(BigInt::from(10).pow(30));
        let tiny = ExactFrequency::new(BigRational::zero(), [(2, big.clone())]).unwrap()
            - ExactFrequency::new(BigRational::zero(), [(2, big - BigRational::one())]).unwrap();
        assert!(tiny.is_positive());
        assert_eq!(tiny, ExactFrequency::sqrt_of(2));
    }

    #[test]
    fn exact_sign_when_floats_cannot_tell() {
        // x = (1+√2)² − (3+2√2) = 0 exactly, and ± a tiny rational
        let one_plus = &ExactFrequency::from_integer(1) + &ExactFrequency::sqrt_of(2);
        let sq = &one_plus * &one_plus;
        let other = ExactFrequency::new(q(3, 1), [(2, q(2, 1))]).unwrap();
        assert_eq!(sq, other);
        let eps = ExactFrequency::from_ratio(1, 1_000_000_000_000_000_000);
        assert!(&sq + &eps > other);
        assert!(&sq - &eps < other);
        // √2 + √3 vs √(5 + 2√6) ≈ same, check √2+√3 > 3.146
        let s = &ExactFrequency::sqrt_of(2) + &ExactFrequency::sqrt_of(3);
        assert!(s > ExactFrequency::from_ratio(3146, 1000));
        assert!(s < ExactFrequency::from_ratio(3147, 1000));
    }

    #[test]
    fn ceil_is_exact() {
        // √2·5 ≈ 7.07 → 8
        let x = ExactFrequency::sqrt_of(2).scale_int(5);
        assert_eq!(x.ceil(), BigInt::from(8));
        assert_eq!(ExactFrequency::from_integer(7).ceil(), BigInt::from(7));
        assert_eq!(ExactFrequency::from_ratio(-3, 2).ceil(), BigInt::from(-1));
        assert_eq!(ceil_sqrt(&BigInt::from(50)), BigInt::from(8));
        assert_eq!(ceil_sqrt(&BigInt::from(49)), BigInt::from(7));
    }

    #[test]
    fn qlin_independence_examples() {
        let one = ExactFrequency::from_integer(1);
        let r2 = ExactFrequency::sqrt_of(2);
        let r8 = ExactFrequency::sqrt_of(8);
        assert!(qlin_independent(&[one.clone(), r2.clone()]));
        assert!(!qlin_independent(&[r2.clone(), r8]));
        assert!(!qlin_independent(&[ExactFrequency::zero()]));
        assert!(!qlin_independent(&[one.clone(), ExactFrequency::from_ratio(1, 3)]));
    }

    #[test]
    fn rationalized_reciprocals_are_independent() {
        // 1/(n+√2) and 1/(n'+√3) with independent oracle: expand by hand.
        // 1/(2+√2) = (2−√2)/2 = 1 − √2/2 ;  1/(1+√3) = (√3−1)/2
        let a = (&ExactFrequency::from_integer(2) + &ExactFrequency::sqrt_of(2)).recip().unwrap();
        let b = (&ExactFrequency::from_integer(1) + &ExactFrequency::sqrt_of(3)).recip().unwrap();
        assert_eq!(a, ExactFrequency::new(q(1, 1), [(2, q(-1, 2))]).unwrap());
        assert_eq!(b, ExactFrequency::new(q(-1, 2), [(3, q(1, 2))]).unwrap());
        assert!(qlin_independent(&[a.clone(), b]));
        // but together with 1 and √2 they are dependent
        assert!(!qlin_independent(&[a, one_(), ExactFrequency::sqrt_of(2)]));
    }

    fn one_() -> ExactFrequency {
        ExactFrequency::from_integer(1)
    }

    #[test]
    fn parse_decimal_and_fraction() {
        assert_eq!(parse_rational("3/4").unwrap(), q(3, 4));
        assert_eq!(parse_rational("-1.25").unwrap(), q(-5, 4));
        assert_eq!(parse_rational("2.5e-3").unwrap(), q(1, 400));
        assert_eq!(parse_rational("7").unwrap(), q(7, 1));
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational("").is_err());
    }

    #[test]
    fn serde_round_trip() {
        let f = ExactFrequency::new(q(-3, 7), [(2, q(1, 8)), (12, q(5, 1))]).unwrap();
        let s = serde_json::to_string(&f).unwrap();
        assert_eq!(s, r#"{"rat":"-3/7","rad":[["2","1/8"],["3","10"]]}"#);
        let back: ExactFrequency = serde_json::from_str(&s).unwrap();
        assert_eq!(back, f);
    }

    #[test]
    fn commensurability_direction() {
        let a = ExactFrequency::sqrt_of(2).scale_int(-3);
        let b = ExactFrequency::sqrt_of(8);
        assert_eq!(a.direction(), b.direction());
        assert_eq!(a.rational_ratio(&b), Some(q(-3, 2)));
        let c = &ExactFrequency::sqrt_of(2) + &one_();
        assert_ne!(a.direction(), c.direction());
        assert_eq!(rational_gcd(&[q(1, 1), q(-1, 2)]), Some(q(1, 2)));
        assert_eq!(rational_gcd(&[q(4, 3), q(2, 9)]), Some(q(2, 9)));
    }
}
