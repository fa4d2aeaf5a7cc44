//! Multiplicity formulas for syzygy bundles on plane curves.

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use super::{moment_sum, validate_hn, CurveContext, HnData, HnError};
use crate::rational::ExactRational;

pub fn genus_plane_curve(d: u32) -> u64 {
    let d = u64::from(d);
    if d < 3 {
        return 0;
    }
    (d - 1) * (d - 2) / 2
}

/// `(d/2) (sum_i r_i a_i^2 - sum_i d_i^2)` for the syzygy bundle of the
/// generators, whose HN data must have total rank `k - 1` and total
/// normalized degree `-sum d_i`.
pub fn hkm_syzygy(ctx: &CurveContext, data: &HnData) -> Result<ExactRational, HnError> {
    validate_hn(data)?;
    let k = ctx.generator_degrees.len() as u64;
    if k < 2 {
        return Err(HnError::TooFewGenerators(k as usize));
    }
    if data.total_rank() != k - 1 {
        return Err(HnError::RankMismatch {
            expected: k - 1,
            actual: data.total_rank(),
        });
    }
    let degree_sum: u64 = ctx.generator_degrees.iter().map(|&d| u64::from(d)).sum();
    let expected = -ExactRational::integer(degree_sum);
    if data.total_degree() != expected {
        return Err(HnError::DegreeMismatch {
            expected: Box::new(expected),
            actual: Box::new(data.total_degree()),
        });
    }
    let squares: u64 = ctx.generator_degrees.iter().map(|&d| u64::from(d).pow(2)).sum();
    let half_d = ExactRational::new(ctx.d, 2);
    Ok(half_d * (moment_sum(data, 2) - ExactRational::integer(squares)))
}

/// `(d/2) ((sum d_i)^2/(t - 1) - sum d_i^2)`: the value when the syzygy
/// bundle is strongly semistable, and the characteristic-0 limit.
pub fn hkm_char0_semistable(ctx: &CurveContext) -> Result<ExactRational, HnError> {
    let t = ctx.generator_degrees.len();
    if t < 2 {
        return Err(HnError::TooFewGenerators(t));
    }
    let sum: u64 = ctx.generator_degrees.iter().map(|&d| u64::from(d)).sum();
    let squares: u64 = ctx.generator_degrees.iter().map(|&d| u64::from(d).pow(2)).sum();
    let first = ExactRational::new(sum * sum, t as u64 - 1);
    Ok(ExactRational::new(ctx.d, 2) * (first - ExactRational::integer(squares)))
}

/// Frobenius destabilization data compatible with a multiplicity value.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Inversion {
    /// Every Frobenius pullback stays semistable (`s = inf`, `l = 0`).
    SemistableForever,
    /// All `(l, s)` pairs, smallest `s` first.
    Destabilized { pairs: Vec<(u64, u32)> },
}

impl Inversion {
    /// Pair with the smallest `s`, or `None` for the semistable case.
    pub fn canonical(&self) -> Option<(u64, u32)> {
        match self {
            Self::SemistableForever => None,
            Self::Destabilized { pairs } => pairs.first().copied(),
        }
    }
}

fn max_l(d: u32) -> u64 {
    u64::from(d) * u64::from(d.saturating_sub(3))
}

/// `0 < l <= d(d-3)`, `l = pd (mod 2)` and `s >= 1`.
pub fn is_valid_destabilization(d: u32, p: u64, l: u64, s: u32) -> bool {
    d >= 3 && s >= 1 && l > 0 && l <= max_l(d) && l % 2 == (p * u64::from(d)) % 2
}

/// Solves `hkm = 3d/4 + l^2/(4 d p^(2s))` for the admissible `(l, s)`.
///
/// `(l, s)` and `(p l, s + 1)` give the same value whenever both are in
/// range, so every admissible pair is returned.
pub fn invert_plane_curve(d: u32, p: u64, hkm: &ExactRational) -> Result<Inversion, HnError> {
    if d < 3 {
        return Err(HnError::DegreeTooSmall(d));
    }
    let lower = ExactRational::new(3 * d, 4);
    let excess = hkm - &lower;
    if excess.is_negative() {
        return Err(HnError::BelowLowerBound {
            hkm: Box::new(hkm.clone()),
            lower: Box::new(lower),
        });
    }
    if excess.is_zero() {
        return Ok(Inversion::SemistableForever);
    }
    let cap = BigInt::from(max_l(d)).pow(2);
    let base = ExactRational::integer(4 * d) * excess;
    let mut pairs = Vec::new();
    let mut s = 1u32;
    loop {
        let l_squared = &base * &ExactRational::integer(BigInt::from(p).pow(2 * s));
        if l_squared > ExactRational::integer(cap.clone()) {
            break;
        }
        if let Some(l) = l_squared.integer_sqrt().and_then(|l| l.to_u64()) {
            if is_valid_destabilization(d, p, l, s) {
                pairs.push((l, s));
            }
        }
        s += 1;
    }
    if pairs.is_empty() {
        return Err(HnError::NoValidPair(hkm.clone()));
    }
    Ok(Inversion::Destabilized { pairs })
}

/// HN data of the rank-2 syzygy bundle of `(x, y, z)` after it first
/// destabilizes at level `s`: slopes `-3/2 +- l/(2 d p^s)`. `l = 0` gives
/// the semistable bundle at level 0.
///
/// The parity condition on `l` is not enforced here; without it the
/// quotient degrees are not integral.
pub fn syzygy_hn_from_ls(d: u32, p: u64, l: u64, s: u32) -> Result<HnData, HnError> {
    let centre = ExactRational::new(-3, 2);
    if l == 0 {
        return Ok(HnData::semistable(0, 2, centre));
    }
    if d < 3 {
        return Err(HnError::DegreeTooSmall(d));
    }
    if s == 0 || l > max_l(d) {
        return Err(HnError::InvalidPair { l, s, max: max_l(d) });
    }
    let offset = ExactRational::new(
        BigInt::from(l),
        BigInt::from(2 * u64::from(d)) * BigInt::from(p).pow(s),
    );
    Ok(HnData::new(
        s,
        [(1, &centre + &offset), (1, &centre - &offset)],
    ))
}

#[cfg(test)]
mod tests {
    use super::super::tests::{hn, q};
    use super::*;

    fn ctx(d: u32, degrees: &[u32]) -> CurveContext {
        CurveContext::plane_curve(d, degrees.to_vec()).unwrap()
    }

    #[test]
    fn genus() {
        assert_eq!(genus_plane_curve(4), 3);
        assert_eq!(genus_plane_curve(3), 1);
        assert_eq!(genus_plane_curve(1), 0);
        assert_eq!(genus_plane_curve(2), 0);
    }

    #[test]
    fn syzygy_formula_examples() {
        let quartic = ctx(4, &[1, 1, 1]);
        assert_eq!(hkm_syzygy(&quartic, &hn(0, &[(2, "-3/2")])).unwrap(), q("3"));
        // p = 5: 3 + 1/(4 p^2)
        assert_eq!(
            hkm_syzygy(&quartic, &hn(1, &[(1, "-29/20"), (1, "-31/20")])).unwrap(),
            q("301/100")
        );
        assert_eq!(hkm_syzygy(&ctx(3, &[1, 1, 1]), &hn(0, &[(2, "-3/2")])).unwrap(), q("9/4"));
        assert!(matches!(
            hkm_syzygy(&quartic, &hn(0, &[(3, "-1")])),
            Err(HnError::RankMismatch { expected: 2, actual: 3 })
        ));
        assert!(matches!(
            hkm_syzygy(&quartic, &hn(0, &[(2, "-1")])),
            Err(HnError::DegreeMismatch { .. })
        ));
    }

    #[test]
    fn semistable_formula_examples() {
        assert_eq!(hkm_char0_semistable(&ctx(4, &[1, 1, 1])).unwrap(), q("3"));
        assert_eq!(hkm_char0_semistable(&ctx(3, &[1, 1, 1])).unwrap(), q("9/4"));
        assert_eq!(hkm_char0_semistable(&ctx(2, &[1, 1])).unwrap(), q("2"));
        assert_eq!(hkm_char0_semistable(&ctx(4, &[1])), Err(HnError::TooFewGenerators(1)));
    }

    #[test]
    fn semistable_formulas_agree() {
        for d in 3..=6 {
            for t in [3usize, 4] {
                let c = ctx(d, &vec![1; t]);
                let slope = ExactRational::new(-(t as i64), t as i64 - 1);
                let data = HnData::semistable(0, t as u64 - 1, slope);
                assert_eq!(hkm_syzygy(&c, &data).unwrap(), hkm_char0_semistable(&c).unwrap());
            }
        }
    }

    #[test]
    fn inversion_examples() {
        let inv = invert_plane_curve(4, 7, &(&q("3") + &q("1/9604"))).unwrap();
        assert_eq!(inv.canonical(), Some((2, 2)));
        assert_eq!(invert_plane_curve(4, 19, &q("3")).unwrap(), Inversion::SemistableForever);
        assert_eq!(invert_plane_curve(3, 5, &q("9/4")).unwrap(), Inversion::SemistableForever);
        assert!(matches!(
            invert_plane_curve(3, 5, &(&q("9/4") + &q("1/100"))),
            Err(HnError::NoValidPair(_))
        ));
        assert!(matches!(
            invert_plane_curve(4, 5, &q("2")),
            Err(HnError::BelowLowerBound { .. })
        ));
        assert_eq!(invert_plane_curve(2, 5, &q("2")), Err(HnError::DegreeTooSmall(2)));
        // p = 2, d = 6: (2, 2), (4, 3), .. all give the same value
        let hkm = q("9/2") + q("4") / (q("24") * q("16"));
        let inv = invert_plane_curve(6, 2, &hkm).unwrap();
        assert_eq!(
            inv,
            Inversion::Destabilized {
                pairs: vec![(1, 1), (2, 2), (4, 3), (8, 4), (16, 5)]
                    .into_iter()
                    .filter(|&(l, s)| is_valid_destabilization(6, 2, l, s))
                    .collect()
            }
        );
        assert_eq!(inv.canonical(), Some((2, 2)));
    }

    #[test]
    fn reconstruction_examples() {
        assert_eq!(
            syzygy_hn_from_ls(4, 5, 2, 1).unwrap(),
            hn(1, &[(1, "-29/20"), (1, "-31/20")])
        );
        let p2 = syzygy_hn_from_ls(4, 2, 2, 2).unwrap();
        assert_eq!(p2, hn(2, &[(1, "-23/16"), (1, "-25/16")]));
        assert_eq!(hkm_syzygy(&ctx(4, &[1, 1, 1]), &p2).unwrap(), q("193/64"));
        assert_eq!(syzygy_hn_from_ls(4, 5, 0, 3).unwrap(), hn(0, &[(2, "-3/2")]));
        assert!(matches!(
            syzygy_hn_from_ls(4, 5, 5, 1),
            Err(HnError::InvalidPair { .. })
        ));
        assert!(matches!(
            syzygy_hn_from_ls(4, 5, 2, 0),
            Err(HnError::InvalidPair { .. })
        ));
    }

    #[test]
    fn round_trip_and_integrality() {
        for d in 3..=6u32 {
            for p in [5u64, 7, 11] {
                for s in 1..=3u32 {
                    for l in 1..=max_l(d) {
                        let data = syzygy_hn_from_ls(d, p, l, s).unwrap();
                        validate_hn(&data).unwrap();
                        let hkm = hkm_syzygy(&ctx(d, &[1, 1, 1]), &data).unwrap();
                        let expected = ExactRational::new(3 * d, 4)
                            + ExactRational::new(
                                BigInt::from(l * l),
                                BigInt::from(4 * d) * BigInt::from(p).pow(2 * s),
                            );
                        assert_eq!(hkm, expected);
                        let scale = ExactRational::integer(BigInt::from(d) * BigInt::from(p).pow(s));
                        let integral = data.quotients.iter().all(|qq| (&qq.slope * &scale).is_integer());
                        if is_valid_destabilization(d, p, l, s) {
                            assert!(integral, "d={d} p={p} l={l} s={s}");
                            match invert_plane_curve(d, p, &hkm).unwrap() {
                                Inversion::Destabilized { pairs } => assert!(pairs.contains(&(l, s))),
                                other => panic!("unexpected {other:?}"),
                            }
                        } else {
                            assert!(!integral);
                        }
                    }
                }
            }
        }
    }
}
