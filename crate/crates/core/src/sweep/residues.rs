use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{SweepError, SweepRecord};
use crate::rational::ExactRational;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResidueEntry {
    pub p: u64,
    pub gap: Option<ExactRational>,
    /// `4 gap p^2`
    pub scaled_p2: Option<ExactRational>,
    /// `4 gap p^4`
    pub scaled_p4: Option<ExactRational>,
}

/// Primes whose residue is `r` or `-r` modulo `m`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResidueGroup {
    /// `{r, m - r}`, smallest first; a single value when they coincide.
    pub residues: Vec<u64>,
    pub entries: Vec<ResidueEntry>,
}

impl ResidueGroup {
    /// The common value of `4 gap p^k` when every entry has one and they agree.
    pub fn stable_value(&self, k: u32) -> Option<ExactRational> {
        let mut values = self.entries.iter().map(|e| scaled_gap(e.gap.as_ref(), e.p, k));
        let first = values.next()??;
        values.all(|v| v.as_ref() == Some(&first)).then_some(first)
    }
}

fn scaled_gap(gap: Option<&ExactRational>, p: u64, k: u32) -> Option<ExactRational> {
    gap.map(|g| g * &ExactRational::integer(4u64) * ExactRational::integer(p).pow(k))
}

/// Groups records by `+-p mod m`, ordered by the smaller residue.
pub fn classify_residues(records: &[SweepRecord], m: u64) -> Result<Vec<ResidueGroup>, SweepError> {
    if m < 2 {
        return Err(SweepError::Config(format!("residue modulus must be at least 2, got {m}")));
    }
    if records.is_empty() {
        return Err(SweepError::Config("no records to classify".into()));
    }
    let mut groups: BTreeMap<u64, Vec<ResidueEntry>> = BTreeMap::new();
    for record in records {
        let r = record.p % m;
        let scaled = |k| scaled_gap(record.gap.as_ref(), record.p, k);
        groups.entry(r.min(m - r)).or_default().push(ResidueEntry {
            p: record.p,
            gap: record.gap.clone(),
            scaled_p2: scaled(2),
            scaled_p4: scaled(4),
        });
    }
    Ok(groups
        .into_iter()
        .map(|(r, mut entries)| {
            entries.sort_by_key(|e| e.p);
            let mut residues = vec![r];
            if m - r != r && r != 0 {
                residues.push(m - r);
            }
            ResidueGroup { residues, entries }
        })
        .collect())
}
