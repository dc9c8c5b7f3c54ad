//! Rigorous numerics for simultaneous linearization arithmetic.
//!
//! The crate computes the multidimensional Gauss map and its orbits,
//! multivariable Brjuno-type sums with exact minimization over words,
//! simultaneous Diophantine class scans with transference exponents,
//! and a truncated power-series engine for commuting germs, including
//! the small-divisor linearization recursion and empirical
//! Siegel-radius estimates against the arithmetic bound.
//!
//! Numbers live in two tiers. Exact quadratic (and multiquadratic)
//! surds back every input where possible, so nearest-integer and sign
//! decisions are certified rather than guessed; adaptive outward-rounded
//! enclosures cover everything else and report indecision explicitly.

pub mod brjuno;
pub mod dioph;
pub mod dyadic;
pub mod error;
pub mod gauss;
pub mod germs;
pub mod interval;
pub mod parse;
pub mod scalar;
pub mod series;
pub mod surd;

pub use brjuno::{
    brjuno_minimize, brjuno_partial, height_bound, siegel_radius_bound, BrjunoSum, BrjunoTerm,
    BrjunoVariant, HeightRegime, WordSearchResult,
};
pub use dioph::{
    dc_check, dc_estimate, dual_form_check, prop53_envelope_check, select_word_appendix,
    transference, AppendixWordTrace, DcCheckResult, DcEstimate, DiophParams, DualCheckResult,
    EnvelopeReport, SelectorMode, TransferDirection,
};
pub use error::{Error, Result};
pub use gauss::{gauss_orbit, gauss_step, GaussStep, RotationVector};
pub use germs::{
    commutator_residual, lambda_of, linearize, radius_estimate_vs_bound, simultaneous_check,
    synth_commuting_family, LinearizationResult, PowerSeriesGerm, RadiusEstimate, RadiusReport,
    SimultaneousCheck,
};
pub use interval::Interval;
pub use parse::{parse_exact_real, parse_exact_real_list, parse_rational};
pub use scalar::{
    ConstantsConfig, RealScalar, DEFAULT_MAX_PRECISION_BITS, DEFAULT_PRECISION_BITS,
};
pub use series::{compose, series_invert, Series};
pub use surd::ExactReal;
