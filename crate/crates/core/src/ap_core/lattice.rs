//! Integer coordinates for a finite set of exact frequencies.
//!
//! Every frequency in a finite set lies in `(1/D)·(ℤ + ℤ√d1 + … + ℤ√dk)` for a
//! common denominator `D`, so sums and differences of frequencies reduce to
//! integer vector arithmetic. Used to expand large products without building
//! a big rational per term pair.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use smallvec::SmallVec;

use super::ExactFrequency;

pub type Coords = SmallVec<[i64; 4]>;

/// Encoded coordinates stay below this so that a sum or difference of two of
/// them cannot overflow.
const COORD_LIMIT: i64 = 1 << 60;

#[derive(Clone, Debug)]
pub struct Lattice {
    basis: Vec<u64>,
    denom: BigInt,
}

impl Lattice {
    /// `None` when the integer coordinates would not fit comfortably in `i64`.
    pub fn spanning<'a>(freqs: impl IntoIterator<Item = &'a ExactFrequency>) -> Option<Self> {
        let mut basis = Vec::new();
        let mut denom = BigInt::one();
        let freqs: Vec<&ExactFrequency> = freqs.into_iter().collect();
        for f in &freqs {
            for (d, c) in f.coordinates() {
                basis.push(*d);
                denom = denom.lcm(c.denom());
            }
        }
        basis.sort_unstable();
        basis.dedup();
        let lattice = Lattice { basis, denom };
        for f in &freqs {
            lattice.encode(f)?;
        }
        Some(lattice)
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[u64] {
        &self.basis
    }

    pub fn encode(&self, f: &ExactFrequency) -> Option<Coords> {
        let mut out: Coords = SmallVec::from_elem(0, self.basis.len());
        for (d, c) in f.coordinates() {
            let idx = self.basis.binary_search(d).ok()?;
            let scaled = c * BigRational::from_integer(self.denom.clone());
            if !scaled.is_integer() {
                return None;
            }
            let v = scaled.to_integer().to_i64()?;
            if v.abs() >= COORD_LIMIT / 4 {
                return None;
            }
            out[idx] = v;
        }
        Some(out)
    }

    pub fn decode(&self, coords: &[i64]) -> ExactFrequency {
        let mut rational = BigRational::from_integer(BigInt::from(0));
        let mut radicals = Vec::new();
        for (d, &v) in self.basis.iter().zip(coords) {
            if v == 0 {
                continue;
            }
            let q = BigRational::new(BigInt::from(v), self.denom.clone());
            if *d == 1 {
                rational = q;
            } else {
                radicals.push((*d, q));
            }
        }
        ExactFrequency::new(rational, radicals).expect("lattice basis radicands are positive")
    }
}

pub fn add_coords(a: &[i64], b: &[i64]) -> Coords {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn sub_coords(a: &[i64], b: &[i64]) -> Coords {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}
