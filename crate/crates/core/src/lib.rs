//! Exact descent and peak polynomials of permutations.
//!
//! `d(S,n)` counts the permutations of `[n]` with descent set `S`; `p(I,n)`
//! counts those with peak set `I`, scaled by `2^{|I|+1-n}`. Both are
//! polynomials in `n`, and this crate computes them in the binomial basis
//! `C(n-m, k)` with coefficients realised as explicit permutation counts,
//! together with the flip involutions that relate the two families and a
//! brute-force verification harness.
//!
//! Polynomial arithmetic is generic over [`Scalar`]; the aliases below fix
//! the common choices.

pub mod count;
pub mod enumeration;
pub mod error;
pub mod flips;
pub mod limits;
pub mod perm;
pub mod polynomials;
pub mod scalar;
pub mod set;
pub mod stats;
pub mod verify;

pub use count::ExactCount;
pub use enumeration::{
    count_descent_class, descent_count, enumerate_descent_class, enumerate_peak_class,
    parallel_count, peak_poly_value, serial_count, ClassQuery, DescentClassQuery, PeakClassQuery,
};
pub use error::{Error, Result};
pub use flips::{admits_flip, canonical_descent_set, fl, psi, psi_set, FlipAdmission, FlipProfile};
pub use limits::{Limits, DEFAULT_CAP};
pub use perm::{Permutation, SignedPermutation};
pub use polynomials::{
    coefficient_classes, descent_coeffs, descent_poly_via_peaks, evaluate, moebius_expansion,
    peak_coeffs, peak_poly_via_moebius, recenter, spike_expansion, BinomialPolynomial,
    MoebiusExpansion, SpikeExpansion,
};
pub use scalar::{binomial, Scalar};
pub use set::PositionSet;
pub use stats::{
    descent_set, initial_set, is_admissible, markings, peak_set, peaks_of, spike_set, spikes_of,
    valley_set, valleys_of, Descents,
};

/// Exact integer coefficients; what the counting operations return.
pub type ExactPolynomial = BinomialPolynomial<num_bigint::BigInt>;
/// Exact rational coefficients.
pub type RationalPolynomial = BinomialPolynomial<num_rational::BigRational>;
/// Machine-word coefficients, for small centers.
pub type SmallPolynomial = BinomialPolynomial<i64>;
/// Floating-point coefficients, for approximate evaluation only.
pub type FloatPolynomial = BinomialPolynomial<f64>;
