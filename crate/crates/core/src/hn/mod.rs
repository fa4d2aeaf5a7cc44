//! Exact Harder–Narasimhan slope calculus.
//!
//! Slopes are normalized: a quotient's degree is divided by its rank, by
//! `deg O_X(1) = d`, and, at Frobenius level `s`, by `p^s`. With this
//! convention the semistable syzygy bundle of `t` generators of degrees
//! `d_i` has slope `-(sum d_i)/(t - 1)`.

mod bounds;
mod plane_curve;
mod polygon;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rational::ExactRational;

pub use bounds::{
    drift_bound_check, exceeds_frobenius_threshold, frobenius_threshold, min_gap_check_l0,
    moment_drift_check, CurveContext,
};
pub use plane_curve::{
    genus_plane_curve, hkm_char0_semistable, hkm_syzygy, invert_plane_curve, is_valid_destabilization,
    syzygy_hn_from_ls, Inversion,
};
pub use polygon::{
    polygon_area, polygon_contains, polygon_from_hn, polygon_retains_vertices, ConvexPolygon,
    PolygonError,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HnError {
    #[error("invalid HN data: {0}")]
    Invalid(#[from] HnViolation),
    #[error("gap check needs raw integer-degree slopes")]
    NeedsRawDegrees,
    #[error("quotient {index} has non-integral degree rank*slope = {degree}")]
    NonIntegralDegree { index: usize, degree: ExactRational },
    #[error("total rank {actual} does not match {expected}")]
    RankMismatch { expected: u64, actual: u64 },
    #[error("total normalized degree {actual} does not match {expected}")]
    DegreeMismatch {
        expected: Box<ExactRational>,
        actual: Box<ExactRational>,
    },
    #[error("descent map entry {index} -> {target} is out of range")]
    MapOutOfRange { index: usize, target: usize },
    #[error("descent map has {actual} entries for {expected} quotients")]
    MapLength { expected: usize, actual: usize },
    #[error("need at least two generators, got {0}")]
    TooFewGenerators(usize),
    #[error("invalid curve context: {0}")]
    Context(&'static str),
    #[error("multiplicity {hkm} is below the characteristic-0 value {lower}")]
    BelowLowerBound {
        hkm: Box<ExactRational>,
        lower: Box<ExactRational>,
    },
    #[error("no valid (l, s) reproduces {0}")]
    NoValidPair(ExactRational),
    #[error("(l, s) = ({l}, {s}) violates 0 <= l <= d(d-3) = {max}, s >= 1")]
    InvalidPair { l: u64, s: u32, max: u64 },
    #[error("plane-curve formulas need d >= 3, got {0}")]
    DegreeTooSmall(u32),
    #[error(transparent)]
    Polygon(#[from] PolygonError),
}

/// Why HN data failed validation; indices point at the offending quotient.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HnViolation {
    #[error("no quotients")]
    Empty,
    #[error("quotient {index} has rank 0")]
    ZeroRank { index: usize },
    #[error("slopes of quotients {index} and {} are not strictly decreasing", index + 1)]
    NotDecreasing { index: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HnQuotient {
    pub rank: u64,
    pub slope: ExactRational,
}

/// Ranks and normalized slopes of the HN quotients of a bundle pulled back
/// by the `s`-th Frobenius.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HnData {
    pub s: u32,
    pub quotients: Vec<HnQuotient>,
}

impl HnData {
    pub fn new(s: u32, quotients: impl IntoIterator<Item = (u64, ExactRational)>) -> Self {
        Self {
            s,
            quotients: quotients
                .into_iter()
                .map(|(rank, slope)| HnQuotient { rank, slope })
                .collect(),
        }
    }

    /// Single-quotient data.
    pub fn semistable(s: u32, rank: u64, slope: ExactRational) -> Self {
        Self::new(s, [(rank, slope)])
    }

    pub fn total_rank(&self) -> u64 {
        self.quotients.iter().map(|q| q.rank).sum()
    }

    pub fn total_degree(&self) -> ExactRational {
        moment_sum(self, 1)
    }

    pub fn slopes(&self) -> Vec<ExactRational> {
        self.quotients.iter().map(|q| q.slope.clone()).collect()
    }

    pub fn is_semistable(&self) -> bool {
        self.quotients.len() == 1
    }
}

pub fn validate_hn(data: &HnData) -> Result<(), HnViolation> {
    if data.quotients.is_empty() {
        return Err(HnViolation::Empty);
    }
    if let Some(index) = data.quotients.iter().position(|q| q.rank == 0) {
        return Err(HnViolation::ZeroRank { index });
    }
    match data
        .quotients
        .windows(2)
        .position(|w| w[0].slope <= w[1].slope)
    {
        Some(index) => Err(HnViolation::NotDecreasing { index }),
        None => Ok(()),
    }
}

/// Slopes `mu(E_i)` of the filtration pieces themselves.
pub fn cumulative_slopes(data: &HnData) -> Result<Vec<ExactRational>, HnViolation> {
    validate_hn(data)?;
    let mut rank = 0u64;
    let mut degree = ExactRational::zero();
    Ok(data
        .quotients
        .iter()
        .map(|q| {
            rank += q.rank;
            degree = &degree + &(ExactRational::integer(q.rank) * &q.slope);
            &degree / &ExactRational::integer(rank)
        })
        .collect())
}

/// `sum_i rank_i * slope_i^m`.
pub fn moment_sum(data: &HnData, m: u32) -> ExactRational {
    data.quotients
        .iter()
        .map(|q| ExactRational::integer(q.rank) * q.slope.pow(m))
        .sum()
}

/// `sum_i rank_i * slope_i^2` of valid HN data.
pub fn mu_hk(data: &HnData) -> Result<ExactRational, HnViolation> {
    validate_hn(data)?;
    Ok(moment_sum(data, 2))
}
