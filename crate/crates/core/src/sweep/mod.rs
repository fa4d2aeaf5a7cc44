//! Per-prime sweeps of an integer curve: reduction, smoothness, colengths,
//! fits, inversion and residue-class summaries.

mod cache;
mod config;
mod emit;
mod residues;

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::colength::{colength_frobenius, is_smooth_plane_curve, ColengthError, FrobeniusPowerIdeal, GradedQuotient};
use crate::estimator::{fit_points, EstimatorError, LengthEntry};
use crate::field::PrimeModulus;
use crate::hn::{hkm_char0_semistable, invert_plane_curve, CurveContext, HnError, Inversion};
use crate::parse::{parse_poly, parse_vars, ParseError};
use crate::poly::{reduce_coeffs_mod_p, IntPoly, ModPoly};
use crate::rational::ExactRational;

pub use cache::{CacheError, CacheKey, ColengthCache};
pub use config::{EMax, OutputFormat, PrimeSet, SweepConfig, BUDGET_E_CEILING, DEFAULT_ROW_BUDGET};
pub use emit::{emit, emit_to_path, read_jsonl, CSV_HEADER};
pub use residues::{classify_residues, ResidueEntry, ResidueGroup};

#[derive(Debug, Error)]
pub enum SweepError {
    #[error("invalid config: {0}")]
    Config(String),
    #[error("cannot parse {what}: {source}")]
    Parse {
        what: String,
        #[source]
        source: ParseError,
    },
    #[error(transparent)]
    Cache(#[from] CacheError),
    #[error("p = {p}, q = {q}: {source}")]
    Colength {
        p: u64,
        q: u64,
        #[source]
        source: ColengthError,
    },
    #[error(transparent)]
    Estimator(#[from] EstimatorError),
    #[error(transparent)]
    Hn(#[from] HnError),
    #[error("{0}")]
    Io(#[from] std::io::Error),
    #[error("{0}")]
    Csv(#[from] csv::Error),
    #[error("{0}")]
    Json(#[from] serde_json::Error),
}

/// Destabilization data: `"semistable"` or every admissible `(l, s)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Destabilization {
    Semistable(SemistableTag),
    Pairs(Vec<(u64, u32)>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SemistableTag {
    Semistable,
}

impl Destabilization {
    pub fn canonical(&self) -> Option<(u64, u32)> {
        match self {
            Self::Semistable(_) => None,
            Self::Pairs(pairs) => pairs.first().copied(),
        }
    }
}

impl From<Inversion> for Destabilization {
    fn from(inv: Inversion) -> Self {
        match inv {
            Inversion::SemistableForever => Self::Semistable(SemistableTag::Semistable),
            Inversion::Destabilized { pairs } => Self::Pairs(pairs),
        }
    }
}

/// Flag for an estimate below the characteristic-0 value.
pub const FLAG_BELOW_CHAR0: &str = "below_char0";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub p: u64,
    pub residue: u64,
    pub colengths: Vec<LengthEntry>,
    pub alpha: Option<ExactRational>,
    pub beta: Option<ExactRational>,
    pub consistent: bool,
    pub smooth: bool,
    pub ls: Option<Destabilization>,
    pub gap: Option<ExactRational>,
    /// Why the prime was skipped; no colengths are computed then.
    pub skipped: Option<String>,
    pub flags: Vec<String>,
}

impl SweepRecord {
    fn new(p: u64, residue: u64) -> Self {
        Self {
            p,
            residue,
            colengths: Vec::new(),
            alpha: None,
            beta: None,
            consistent: false,
            smooth: false,
            ls: None,
            gap: None,
            skipped: None,
            flags: Vec::new(),
        }
    }

    /// Estimate below the characteristic-0 value.
    pub fn violates_lower_bound(&self) -> bool {
        self.flags.iter().any(|f| f == FLAG_BELOW_CHAR0)
    }
}

/// Curve, variables and ideal parsed once over the integers.
struct Input {
    vars: Vec<String>,
    curve: IntPoly,
    curve_text: String,
    ideal: Vec<IntPoly>,
    ideal_text: String,
    maximal: bool,
}

impl Input {
    fn parse(cfg: &SweepConfig) -> Result<Self, SweepError> {
        let vars = parse_vars(&cfg.vars);
        let valid_name = |v: &String| {
            v.starts_with(|c: char| c.is_ascii_alphabetic()) && v.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
        };
        let mut unique = vars.clone();
        unique.sort();
        unique.dedup();
        if vars.is_empty() || unique.len() != vars.len() || !vars.iter().all(valid_name) {
            return Err(SweepError::Config(format!("bad variable list {:?}", cfg.vars)));
        }
        let curve = parse_poly(&cfg.curve, &vars).map_err(|source| SweepError::Parse {
            what: "curve".into(),
            source,
        })?;
        if curve.is_zero() || !curve.is_homogeneous() {
            return Err(SweepError::Config("curve must be a nonzero homogeneous polynomial".into()));
        }
        let ideal = match &cfg.ideal {
            Some(gens) => gens
                .iter()
                .map(|g| {
                    parse_poly(g, &vars).map_err(|source| SweepError::Parse {
                        what: format!("ideal generator {g:?}"),
                        source,
                    })
                })
                .collect::<Result<Vec<_>, _>>()?,
            None => vars
                .iter()
                .map(|v| parse_poly(v, &vars).expect("variable parses"))
                .collect(),
        };
        if ideal.iter().any(|g| g.is_zero() || !g.is_homogeneous()) {
            return Err(SweepError::Config("ideal generators must be nonzero homogeneous".into()));
        }
        let maximal = {
            let mut texts: Vec<String> = ideal.iter().map(|g| g.to_string()).collect();
            texts.sort();
            let mut v = vars.clone();
            v.sort();
            texts == v
        };
        Ok(Self {
            curve_text: curve.to_string(),
            ideal_text: ideal.iter().map(|g| g.to_string()).collect::<Vec<_>>().join(","),
            vars,
            curve,
            ideal,
            maximal,
        })
    }

    fn degree(&self) -> u32 {
        self.curve.total_degree().expect("nonzero curve")
    }

    fn generator_degrees(&self) -> Vec<u32> {
        self.ideal.iter().map(|g| g.total_degree().expect("nonzero")).collect()
    }

    fn key(&self, p: u64, q: u64) -> CacheKey {
        CacheKey::new(&self.curve_text, &self.vars, p, &self.ideal_text, q)
    }
}

/// Rough row count of the largest degree-scan matrix: the quotient has
/// dimension about `d n` in degree `n`, and the scan runs to degree about
/// `q * sum d_j + d`.
pub fn estimated_rows(curve_degree: u32, generator_degrees: &[u32], q: u64) -> u64 {
    let total: u64 = generator_degrees.iter().map(|&d| u64::from(d)).sum();
    u64::from(curve_degree).saturating_mul(q.saturating_mul(total).saturating_add(u64::from(curve_degree)))
}

/// Per-prime state between planning and computing colengths.
struct Plan {
    record: SweepRecord,
    ring: Option<(GradedQuotient, Vec<ModPoly>)>,
    exponents: Vec<(u32, u64)>,
}

fn plan_prime(input: &Input, cfg: &SweepConfig, p: u64) -> Result<Plan, SweepError> {
    let modulus = PrimeModulus::new(p).map_err(|e| SweepError::Config(e.to_string()))?;
    let mut record = SweepRecord::new(p, p % cfg.residue_modulus);
    let skip = |mut record: SweepRecord, reason: &str| {
        record.skipped = Some(reason.to_string());
        Ok(Plan {
            record,
            ring: None,
            exponents: Vec::new(),
        })
    };
    let reduction = reduce_coeffs_mod_p(&input.curve, modulus);
    if reduction.poly.is_zero() {
        return skip(record, "curve vanishes mod p");
    }
    if reduction.degree_dropped {
        return skip(record, "curve degree drops mod p");
    }
    if reduction.terms_dropped > 0 {
        record.flags.push(format!("terms_dropped={}", reduction.terms_dropped));
    }
    let gens: Vec<ModPoly> = input.ideal.iter().map(|g| g.reduce_mod_p(modulus)).collect();
    if gens.iter().any(|g| g.is_zero()) {
        return skip(record, "ideal generator vanishes mod p");
    }
    if input.vars.len() == 3 {
        record.smooth = is_smooth_plane_curve(&input.curve, modulus)
            .map_err(|source| SweepError::Colength { p, q: 1, source })?;
        if !record.smooth {
            record.flags.push("singular".into());
        }
    } else {
        record.flags.push("not_plane_curve".into());
    }
    let ring = GradedQuotient::new(&reduction.poly).map_err(|source| SweepError::Colength { p, q: 1, source })?;
    let degrees = input.generator_degrees();
    let mut exponents = Vec::new();
    for e in 1..=cfg.exponent_ceiling() {
        let Some(q) = p.checked_pow(e) else { break };
        let over = cfg
            .row_budget
            .is_some_and(|budget| estimated_rows(input.degree(), &degrees, q) > budget);
        if over {
            if cfg.e_max != EMax::Budget {
                record.flags.push(format!("budget_truncated_at_e={e}"));
            }
            break;
        }
        exponents.push((e, q));
    }
    Ok(Plan {
        record,
        ring: Some((ring, gens)),
        exponents,
    })
}

/// Colengths for every job missing from the cache, computed in parallel.
fn compute_missing(
    plans: &[Plan],
    input: &Input,
    cache: &ColengthCache,
) -> Result<BTreeMap<(u64, u64), u64>, SweepError> {
    let jobs: Vec<(usize, u64)> = plans
        .iter()
        .enumerate()
        .flat_map(|(i, plan)| plan.exponents.iter().map(move |&(_, q)| (i, q)))
        .filter(|&(i, q)| cache.get(&input.key(plans[i].record.p, q)).is_none())
        .collect();
    jobs.par_iter()
        .map(|&(i, q)| {
            let (ring, gens) = plans[i].ring.as_ref().expect("planned primes have a ring");
            let p = plans[i].record.p;
            let wrap = |source| SweepError::Colength { p, q, source };
            let ideal = FrobeniusPowerIdeal::new(gens.clone(), q).map_err(wrap)?;
            let colength = colength_frobenius(ring, &ideal).map_err(wrap)?;
            Ok(((p, q), colength))
        })
        .collect()
}

fn char0_value(input: &Input, cfg: &SweepConfig) -> Option<ExactRational> {
    if let Some(v) = &cfg.char0 {
        return Some(v.clone());
    }
    if input.vars.len() != 3 {
        return None;
    }
    let ctx = CurveContext::plane_curve(input.degree(), input.generator_degrees()).ok()?;
    hkm_char0_semistable(&ctx).ok()
}

fn finish_record(plan: Plan, input: &Input, char0: Option<&ExactRational>) -> SweepRecord {
    let mut record = plan.record;
    let points: Vec<(u64, u64)> = record.colengths.iter().map(|e| (e.q, e.colength)).collect();
    let fit = match fit_points(&points) {
        Ok(fit) => fit,
        Err(_) => {
            record.flags.push("too_few_exponents".into());
            return record;
        }
    };
    record.consistent = fit.consistent;
    if !fit.consistent {
        record.flags.push("not_stabilized".into());
    }
    if let Some(c) = char0 {
        let gap = &fit.alpha - c;
        if gap.is_negative() {
            record.flags.push(FLAG_BELOW_CHAR0.into());
        }
        record.gap = Some(gap);
    }
    let d = input.degree();
    if record.smooth && record.consistent && input.maximal && d >= 3 {
        match invert_plane_curve(d, record.p, &fit.alpha) {
            Ok(inv) => record.ls = Some(inv.into()),
            Err(HnError::BelowLowerBound { .. }) => {
                if !record.violates_lower_bound() {
                    record.flags.push(FLAG_BELOW_CHAR0.into());
                }
            }
            Err(_) => record.flags.push("no_valid_pair".into()),
        }
    }
    record.alpha = Some(fit.alpha);
    record.beta = Some(fit.beta);
    record
}

/// Runs the sweep against an explicit cache; new colengths are appended to
/// it in `(p, q)` order after all computation is done.
pub fn run_sweep_with_cache(cfg: &SweepConfig, cache: &mut ColengthCache) -> Result<Vec<SweepRecord>, SweepError> {
    cfg.validate()?;
    let input = Input::parse(cfg)?;
    let primes = cfg.primes.resolve()?;
    let mut plans = primes
        .iter()
        .map(|&p| plan_prime(&input, cfg, p))
        .collect::<Result<Vec<_>, _>>()?;
    let computed = compute_missing(&plans, &input, cache)?;
    for (&(p, q), &colength) in &computed {
        cache.insert(input.key(p, q), colength)?;
    }
    for plan in &mut plans {
        let p = plan.record.p;
        plan.record.colengths = plan
            .exponents
            .iter()
            .map(|&(e, q)| LengthEntry {
                e,
                q,
                colength: cache.get(&input.key(p, q)).expect("filled above"),
            })
            .collect();
    }
    let char0 = char0_value(&input, cfg);
    let mut records: Vec<SweepRecord> = plans
        .into_iter()
        .map(|plan| finish_record(plan, &input, char0.as_ref()))
        .collect();
    records.sort_by_key(|r| r.p);
    Ok(records)
}

/// Runs the sweep with the cache named in the config, if any.
pub fn run_sweep(cfg: &SweepConfig) -> Result<Vec<SweepRecord>, SweepError> {
    let mut cache = match &cfg.cache_path {
        Some(path) => ColengthCache::open(path)?,
        None => ColengthCache::in_memory(),
    };
    run_sweep_with_cache(cfg, &mut cache)
}
