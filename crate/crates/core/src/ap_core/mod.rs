//! Almost periodic trigonometric polynomials with exact frequencies: algebra,
//! spectra, norms, Bohr coefficients and certified sup/inf bounds.

mod certify;
mod exact;
mod lattice;
mod trig_poly;

pub use certify::{
    auto_grid_step, certified_infimum, certified_range, certify_lower_bound, periodic_samples, sup_norm_certified,
    PeriodicSamples, RealRange,
};
pub use exact::{
    ceil_sqrt, format_rational, is_prime, parse_rational, qlin_independent, rational_gcd,
    squarefree_split, ExactFrequency,
};
pub use lattice::{add_coords, sub_coords, Coords, Lattice};
pub use trig_poly::{
    common_base, freq, integer_poly, mean_value_error_constant, mean_value_numeric, CommonBase,
    SpectrumInfo, TrigPoly,
};
