//! Slope-gap and Frobenius-drift bounds for HN data.

use super::{validate_hn, HnData, HnError};
use crate::rational::ExactRational;

/// Degree of the curve, its genus and the degrees of the ideal generators.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CurveContext {
    pub d: u32,
    pub genus: u64,
    pub generator_degrees: Vec<u32>,
}

impl CurveContext {
    pub fn new(d: u32, genus: u64, generator_degrees: Vec<u32>) -> Result<Self, HnError> {
        if d == 0 {
            return Err(HnError::Context("curve degree must be positive"));
        }
        if generator_degrees.contains(&0) {
            return Err(HnError::Context("generator degrees must be positive"));
        }
        Ok(Self {
            d,
            genus,
            generator_degrees,
        })
    }

    /// Smooth plane curve of degree `d`, genus from the degree formula.
    pub fn plane_curve(d: u32, generator_degrees: Vec<u32>) -> Result<Self, HnError> {
        Self::new(d, super::genus_plane_curve(d), generator_degrees)
    }
}

/// Checks `r^3 > (r - 1)/(mu_i - mu_{i+1})` for consecutive quotients.
///
/// Only meaningful for raw slopes `degree/rank` with integer degrees; pass
/// `unit_degrees = true` to assert that, and the degrees are verified.
pub fn min_gap_check_l0(data: &HnData, unit_degrees: bool) -> Result<bool, HnError> {
    validate_hn(data)?;
    if !unit_degrees {
        return Err(HnError::NeedsRawDegrees);
    }
    for (index, q) in data.quotients.iter().enumerate() {
        let degree = ExactRational::integer(q.rank) * &q.slope;
        if !degree.is_integer() {
            return Err(HnError::NonIntegralDegree { index, degree });
        }
    }
    let r = ExactRational::integer(data.total_rank());
    let cube = r.pow(3);
    let r_minus_one = &r - &ExactRational::one();
    Ok(data.quotients.windows(2).all(|w| {
        let gap = &w[0].slope - &w[1].slope;
        &cube * &gap > r_minus_one
    }))
}

/// `4(g - 1) r^3`; primes above it keep the HN filtration under Frobenius pullback.
pub fn frobenius_threshold(genus: u64, rank: u64) -> i128 {
    4 * (genus as i128 - 1) * (rank as i128).pow(3)
}

pub fn exceeds_frobenius_threshold(p: u64, genus: u64, rank: u64) -> bool {
    i128::from(p) > frobenius_threshold(genus, rank)
}

fn check_map(observed: &HnData, char0: &[ExactRational], map: &[usize]) -> Result<(), HnError> {
    if map.len() != observed.quotients.len() {
        return Err(HnError::MapLength {
            expected: observed.quotients.len(),
            actual: map.len(),
        });
    }
    match map.iter().enumerate().find(|(_, &t)| t >= char0.len()) {
        Some((index, &target)) => Err(HnError::MapOutOfRange { index, target }),
        None => Ok(()),
    }
}

/// Each observed slope stays within `4(g-1)(r-1)/(p d)` of the
/// characteristic-0 slope it descends to (`descent_map[j]` is that index).
pub fn drift_bound_check(
    char0_slopes: &[ExactRational],
    observed: &HnData,
    descent_map: &[usize],
    ctx: &CurveContext,
    p: u64,
) -> Result<bool, HnError> {
    check_map(observed, char0_slopes, descent_map)?;
    let r = observed.total_rank() as i128;
    let numer = 4 * (ctx.genus as i128 - 1) * (r - 1);
    let bound = ExactRational::new(numer, i128::from(p) * i128::from(ctx.d));
    Ok(observed
        .quotients
        .iter()
        .zip(descent_map)
        .all(|(q, &i)| (&q.slope - &char0_slopes[i]).abs() <= bound))
}

/// `|a_j^m - mu_i^m| <= 8 g r max(2|mu_1|, .., 2|mu_l|, 2)^(m-1) / (p d^m)`,
/// the raw-degree bound rescaled to normalized slopes.
pub fn moment_drift_check(
    char0_slopes: &[ExactRational],
    observed: &HnData,
    descent_map: &[usize],
    ctx: &CurveContext,
    p: u64,
    m: u32,
) -> Result<bool, HnError> {
    check_map(observed, char0_slopes, descent_map)?;
    let d = ExactRational::integer(ctx.d);
    let two = ExactRational::integer(2);
    let spread = char0_slopes
        .iter()
        .map(|mu| &two * &(&d * mu).abs())
        .fold(two.clone(), ExactRational::max);
    let r = observed.total_rank();
    let constant = ExactRational::integer(8 * ctx.genus * r) * spread.pow(m.saturating_sub(1));
    let bound = constant / (ExactRational::integer(p) * d.pow(m));
    Ok(observed
        .quotients
        .iter()
        .zip(descent_map)
        .all(|(q, &i)| (q.slope.pow(m) - char0_slopes[i].pow(m)).abs() <= bound))
}

#[cfg(test)]
mod tests {
    use super::super::tests::{hn, q};
    use super::super::{syzygy_hn_from_ls, HnViolation};
    use super::*;

    #[test]
    fn gap_check_examples() {
        assert!(min_gap_check_l0(&hn(0, &[(1, "1"), (1, "0")]), true).unwrap());
        assert!(min_gap_check_l0(&hn(0, &[(1, "0"), (1, "-1")]), true).unwrap());
        assert!(min_gap_check_l0(&hn(0, &[(3, "2/3")]), true).unwrap());
        assert_eq!(
            min_gap_check_l0(&hn(0, &[(1, "1"), (1, "0")]), false),
            Err(HnError::NeedsRawDegrees)
        );
        assert!(matches!(
            min_gap_check_l0(&hn(0, &[(1, "1/2"), (1, "0")]), true),
            Err(HnError::NonIntegralDegree { index: 0, .. })
        ));
        assert_eq!(
            min_gap_check_l0(&hn(0, &[(1, "0"), (1, "1")]), true),
            Err(HnError::Invalid(HnViolation::NotDecreasing { index: 0 }))
        );
    }

    /// Every composition of `r` into ordered ranks.
    fn compositions(r: u64) -> Vec<Vec<u64>> {
        if r == 0 {
            return vec![vec![]];
        }
        (1..=r)
            .flat_map(|first| {
                compositions(r - first).into_iter().map(move |mut rest| {
                    rest.insert(0, first);
                    rest
                })
            })
            .collect()
    }

    #[test]
    fn gap_lemma_holds_exhaustively() {
        let mut checked = 0;
        for r in 1..=4 {
            for ranks in compositions(r) {
                let k = ranks.len() as u32;
                let total = 21i64.pow(k);
                for code in 0..total {
                    let degrees: Vec<i64> = (0..k).map(|i| (code / 21i64.pow(i)) % 21 - 10).collect();
                    let data = HnData::new(
                        0,
                        ranks
                            .iter()
                            .zip(&degrees)
                            .map(|(&rk, &deg)| (rk, ExactRational::new(deg, rk as i64))),
                    );
                    if validate_hn(&data).is_err() {
                        continue;
                    }
                    assert!(min_gap_check_l0(&data, true).unwrap(), "{data:?}");
                    checked += 1;
                }
            }
        }
        assert!(checked > 10_000);
    }

    #[test]
    fn thresholds() {
        assert_eq!(frobenius_threshold(3, 2), 64);
        assert_eq!(frobenius_threshold(1, 5), 0);
        assert_eq!(frobenius_threshold(2, 1), 4);
        assert_eq!(frobenius_threshold(0, 2), -32);
        assert!(exceeds_frobenius_threshold(67, 3, 2));
        assert!(!exceeds_frobenius_threshold(7, 3, 2));
        assert!(!exceeds_frobenius_threshold(64, 3, 2));
    }

    fn monsky_ctx() -> CurveContext {
        CurveContext::plane_curve(4, vec![1, 1, 1]).unwrap()
    }

    #[test]
    fn drift_examples() {
        let ctx = monsky_ctx();
        let char0 = [q("-3/2")];
        // drift 1/268 against a bound of 2/67
        let observed = syzygy_hn_from_ls(4, 67, 2, 1).unwrap();
        assert_eq!(&observed.quotients[0].slope - &char0[0], q("1/268"));
        assert!(drift_bound_check(&char0, &observed, &[0, 0], &ctx, 67).unwrap());

        let zero = hn(1, &[(2, "-3/2")]);
        assert!(drift_bound_check(&char0, &zero, &[0], &ctx, 67).unwrap());

        let far = hn(1, &[(1, "-1/2"), (1, "-5/2")]);
        assert!(!drift_bound_check(&char0, &far, &[0, 0], &ctx, 67).unwrap());

        assert_eq!(
            drift_bound_check(&char0, &observed, &[0, 1], &ctx, 67),
            Err(HnError::MapOutOfRange { index: 1, target: 1 })
        );
        assert!(matches!(
            drift_bound_check(&char0, &observed, &[0], &ctx, 67),
            Err(HnError::MapLength { .. })
        ));
    }

    #[test]
    fn moment_drift_examples() {
        let ctx = monsky_ctx();
        let char0 = [q("-3/2")];
        let observed = syzygy_hn_from_ls(4, 67, 2, 1).unwrap();
        // m = 1: same comparison with the looser constant 8gr/(pd) = 48/268
        assert!(moment_drift_check(&char0, &observed, &[0, 0], &ctx, 67, 1).unwrap());
        assert!(drift_bound_check(&char0, &observed, &[0, 0], &ctx, 67).unwrap());
        let zero = hn(1, &[(2, "-3/2")]);
        assert!(moment_drift_check(&char0, &zero, &[0], &ctx, 67, 2).unwrap());
        assert!(moment_drift_check(&char0, &observed, &[0, 0], &ctx, 67, 2).unwrap());

        // a drift of 1/10 passes the m = 1 moment bound (48/268) but not Lemma-style 2/67
        let mid = hn(1, &[(1, "-14/10"), (1, "-16/10")]);
        assert!(!drift_bound_check(&char0, &mid, &[0, 0], &ctx, 67).unwrap());
        assert!(moment_drift_check(&char0, &mid, &[0, 0], &ctx, 67, 1).unwrap());
    }
}
