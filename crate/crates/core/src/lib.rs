//! Hilbert–Kunz multiplicities of standard graded two-dimensional rings over
//! prime fields, computed from exact colengths of Frobenius powers, together
//! with an exact Harder–Narasimhan slope calculus for rank-2 syzygy bundles
//! on plane curves.

pub mod colength;
pub mod estimator;
pub mod field;
pub mod hn;
pub mod monomial;
pub mod parse;
pub mod poly;
pub mod rational;
pub mod sweep;

pub use hn::{
    hkm_char0_semistable, hkm_syzygy, invert_plane_curve, syzygy_hn_from_ls, HnData, HnError, Inversion,
};
pub use field::{field_inverse, rank_mod_p, FieldError, MatrixModP, PrimeModulus};
pub use monomial::Monomial;
pub use parse::{parse_poly, parse_vars, ParseError};
pub use poly::{normal_form, reduce_coeffs_mod_p, std_monomials, IntPoly, ModPoly, PolyError};
pub use colength::{
    brute_colength_oracle, colength_frobenius, graded_piece_dim, hilbert_function,
    is_smooth_plane_curve, ColengthError, FrobeniusPowerIdeal, GradedQuotient,
};
pub use estimator::{
    compare_char0_limit, fit_points, fit_quadratic_constant, fit_two_points, hk_estimates,
    ConvergenceReport, EstimatorError, FitResult, LengthEntry, LengthSequence,
};
pub use rational::ExactRational;
pub use sweep::{classify_residues, emit, run_sweep, SweepConfig, SweepError, SweepRecord};
