//! Exact HK estimates from colength sequences and the two-point fit
//! `l(q) = alpha q^2 + beta`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::field::PrimeModulus;
use crate::rational::ExactRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EstimatorError {
    #[error("need at least {needed} entries, got {got}")]
    TooFewEntries { needed: usize, got: usize },
    #[error("exponents must increase strictly (entry {0})")]
    NotIncreasing(usize),
    #[error("entry {index}: q = {q} is not {p}^{e}")]
    WrongPower { index: usize, p: u64, e: u32, q: u64 },
    #[error("entry {0}: colength must be at least 1")]
    ZeroColength(usize),
    #[error("duplicate q = {0}")]
    DuplicateQ(u64),
    #[error("no primes to compare")]
    NoPrimes,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LengthEntry {
    pub e: u32,
    pub q: u64,
    pub colength: u64,
}

/// Colengths `l(R/I^[p^e])` for increasing `e`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LengthSequence {
    p: PrimeModulus,
    entries: Vec<LengthEntry>,
}

impl LengthSequence {
    pub fn new(p: PrimeModulus, entries: Vec<LengthEntry>) -> Result<Self, EstimatorError> {
        for (index, entry) in entries.iter().enumerate() {
            if index > 0 && entry.e <= entries[index - 1].e {
                return Err(EstimatorError::NotIncreasing(index));
            }
            if p.get().checked_pow(entry.e) != Some(entry.q) {
                return Err(EstimatorError::WrongPower {
                    index,
                    p: p.get(),
                    e: entry.e,
                    q: entry.q,
                });
            }
            if entry.colength == 0 {
                return Err(EstimatorError::ZeroColength(index));
            }
        }
        Ok(Self { p, entries })
    }

    /// Builds entries from `(e, colength)` pairs.
    pub fn from_colengths(
        p: PrimeModulus,
        colengths: impl IntoIterator<Item = (u32, u64)>,
    ) -> Result<Self, EstimatorError> {
        let entries = colengths
            .into_iter()
            .map(|(e, colength)| LengthEntry {
                e,
                q: p.get().saturating_pow(e),
                colength,
            })
            .collect();
        Self::new(p, entries)
    }

    pub fn p(&self) -> PrimeModulus {
        self.p
    }

    pub fn entries(&self) -> &[LengthEntry] {
        &self.entries
    }

    pub fn points(&self) -> Vec<(u64, u64)> {
        self.entries.iter().map(|e| (e.q, e.colength)).collect()
    }
}

/// `(q, l/q^2)` for every entry.
pub fn hk_estimates(seq: &LengthSequence) -> Vec<(u64, ExactRational)> {
    seq.entries
        .iter()
        .map(|e| (e.q, ExactRational::new(e.colength, u128::from(e.q).pow(2))))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub q: u64,
    pub colength: u64,
    pub satisfied: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FitResult {
    pub alpha: ExactRational,
    pub beta: ExactRational,
    /// The third-largest `q` satisfies the fit. False when there is none.
    pub consistent: bool,
    /// The two `q` the fit was taken from.
    pub fitted: (u64, u64),
    /// Every other entry, largest `q` first.
    pub witnesses: Vec<Witness>,
}

impl FitResult {
    pub fn predict(&self, q: u64) -> ExactRational {
        &self.alpha * &ExactRational::integer(u128::from(q).pow(2)) + &self.beta
    }

    pub fn all_witnesses_satisfied(&self) -> bool {
        self.witnesses.iter().all(|w| w.satisfied)
    }
}

/// Exact `(alpha, beta)` through two points with distinct `q`.
pub fn fit_two_points(
    (q1, l1): (u64, u64),
    (q2, l2): (u64, u64),
) -> Result<(ExactRational, ExactRational), EstimatorError> {
    if q1 == q2 {
        return Err(EstimatorError::DuplicateQ(q1));
    }
    let sq = |q: u64| ExactRational::integer(u128::from(q).pow(2));
    let alpha = (ExactRational::integer(l2) - ExactRational::integer(l1)) / (sq(q2) - sq(q1));
    let beta = ExactRational::integer(l2) - &alpha * &sq(q2);
    Ok((alpha, beta))
}

/// Fits `(q, l)` points from the two largest `q`; the next one down is the
/// consistency witness.
pub fn fit_points(points: &[(u64, u64)]) -> Result<FitResult, EstimatorError> {
    if points.len() < 2 {
        return Err(EstimatorError::TooFewEntries {
            needed: 2,
            got: points.len(),
        });
    }
    let mut sorted = points.to_vec();
    sorted.sort_unstable_by(|a, b| b.0.cmp(&a.0));
    if let Some(w) = sorted.windows(2).find(|w| w[0].0 == w[1].0) {
        return Err(EstimatorError::DuplicateQ(w[0].0));
    }
    let (alpha, beta) = fit_two_points(sorted[1], sorted[0])?;
    let mut fit = FitResult {
        alpha,
        beta,
        consistent: false,
        fitted: (sorted[1].0, sorted[0].0),
        witnesses: Vec::new(),
    };
    fit.witnesses = sorted[2..]
        .iter()
        .map(|&(q, colength)| Witness {
            q,
            colength,
            satisfied: fit.predict(q) == ExactRational::integer(colength),
        })
        .collect();
    fit.consistent = fit.witnesses.first().is_some_and(|w| w.satisfied);
    Ok(fit)
}

pub fn fit_quadratic_constant(seq: &LengthSequence) -> Result<FitResult, EstimatorError> {
    fit_points(&seq.points())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimeGap {
    pub p: u64,
    pub alpha: ExactRational,
    pub gap: ExactRational,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub char0: ExactRational,
    /// Sorted by `p`.
    pub gaps: Vec<PrimeGap>,
    pub max_gap: ExactRational,
    /// Primes whose estimate falls below the characteristic-0 value.
    pub violations: Vec<u64>,
    /// Gaps are non-increasing in `p`.
    pub monotone: bool,
    /// The largest gap among the upper half of the primes is below the
    /// largest among the lower half (or every gap is zero).
    pub converging: bool,
}

pub fn compare_char0_limit(
    per_prime: &[(u64, ExactRational)],
    char0: &ExactRational,
) -> Result<ConvergenceReport, EstimatorError> {
    if per_prime.is_empty() {
        return Err(EstimatorError::NoPrimes);
    }
    let mut gaps: Vec<PrimeGap> = per_prime
        .iter()
        .map(|(p, alpha)| PrimeGap {
            p: *p,
            alpha: alpha.clone(),
            gap: alpha - char0,
        })
        .collect();
    gaps.sort_by_key(|g| g.p);
    let max_of = |gs: &[PrimeGap]| {
        gs.iter()
            .map(|g| g.gap.clone())
            .reduce(ExactRational::max)
            .unwrap_or_else(ExactRational::zero)
    };
    let max_gap = max_of(&gaps);
    let violations = gaps.iter().filter(|g| g.gap.is_negative()).map(|g| g.p).collect();
    let monotone = gaps.windows(2).all(|w| w[1].gap <= w[0].gap);
    let (head, tail) = gaps.split_at(gaps.len() / 2);
    let converging = if gaps.iter().all(|g| g.gap.is_zero()) {
        true
    } else {
        !head.is_empty() && max_of(tail) < max_of(head)
    };
    Ok(ConvergenceReport {
        char0: char0.clone(),
        gaps,
        max_gap,
        violations,
        monotone,
        converging,
    })
}
