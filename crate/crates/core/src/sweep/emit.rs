use std::fs::File;
use std::io::{BufRead, BufWriter, Write};
use std::path::Path;

use super::{OutputFormat, SweepError, SweepRecord};

pub const CSV_HEADER: [&str; 14] = [
    "p", "residue", "e", "q", "colength", "alpha_num", "alpha_den", "consistent", "smooth", "l", "s",
    "gap_num", "gap_den", "flags",
];

fn fraction(value: Option<&crate::rational::ExactRational>) -> (String, String) {
    value.map_or_else(Default::default, |v| (v.numer().to_string(), v.denom().to_string()))
}

/// `l, s` columns: the canonical pair, `0, inf` for the semistable case.
fn ls_columns(record: &SweepRecord) -> (String, String) {
    match &record.ls {
        None => Default::default(),
        Some(ls) => match ls.canonical() {
            Some((l, s)) => (l.to_string(), s.to_string()),
            None => ("0".into(), "inf".into()),
        },
    }
}

fn flags_column(record: &SweepRecord) -> String {
    let mut flags = Vec::new();
    if let Some(reason) = &record.skipped {
        flags.push(format!("skipped: {reason}"));
    }
    flags.extend(record.flags.iter().cloned());
    flags.join(";")
}

fn write_csv<W: Write>(records: &[SweepRecord], out: W) -> Result<(), SweepError> {
    let mut writer = csv::Writer::from_writer(out);
    writer.write_record(CSV_HEADER)?;
    for record in records {
        let (alpha_num, alpha_den) = fraction(record.alpha.as_ref());
        let (gap_num, gap_den) = fraction(record.gap.as_ref());
        let (l, s) = ls_columns(record);
        let flags = flags_column(record);
        let shared = |e: String, q: String, colength: String| {
            [
                record.p.to_string(),
                record.residue.to_string(),
                e,
                q,
                colength,
                alpha_num.clone(),
                alpha_den.clone(),
                record.consistent.to_string(),
                record.smooth.to_string(),
                l.clone(),
                s.clone(),
                gap_num.clone(),
                gap_den.clone(),
                flags.clone(),
            ]
        };
        if record.colengths.is_empty() {
            writer.write_record(shared(String::new(), String::new(), String::new()))?;
        }
        for entry in &record.colengths {
            writer.write_record(shared(
                entry.e.to_string(),
                entry.q.to_string(),
                entry.colength.to_string(),
            ))?;
        }
    }
    writer.flush()?;
    Ok(())
}

fn write_jsonl<W: Write>(records: &[SweepRecord], mut out: W) -> Result<(), SweepError> {
    for record in records {
        serde_json::to_writer(&mut out, record)?;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(())
}

/// Writes CSV (one row per `(p, e)`, fit columns repeated) or JSONL (one
/// record per line).
pub fn emit<W: Write>(records: &[SweepRecord], format: OutputFormat, out: W) -> Result<(), SweepError> {
    match format {
        OutputFormat::Csv => write_csv(records, out),
        OutputFormat::Jsonl => write_jsonl(records, out),
    }
}

pub fn emit_to_path(records: &[SweepRecord], format: OutputFormat, path: &Path) -> Result<(), SweepError> {
    let file = File::create(path)?;
    emit(records, format, BufWriter::new(file))
}

pub fn read_jsonl<R: BufRead>(input: R) -> Result<Vec<SweepRecord>, SweepError> {
    let mut records = Vec::new();
    for line in input.lines() {
        let line = line?;
        if !line.trim().is_empty() {
            records.push(serde_json::from_str(&line)?);
        }
    }
    Ok(records)
}

#[cfg(test)]
mod tests {
    use super::super::{Destabilization, SemistableTag};
    use super::*;
    use crate::estimator::LengthEntry;

    fn record() -> SweepRecord {
        SweepRecord {
            p: 5,
            residue: 5,
            colengths: vec![
                LengthEntry { e: 1, q: 5, colength: 72 },
                LengthEntry { e: 2, q: 25, colength: 1879 },
            ],
            alpha: Some("301/100".parse().unwrap()),
            beta: Some("-9/4".parse().unwrap()),
            consistent: true,
            smooth: true,
            ls: Some(Destabilization::Pairs(vec![(2, 1)])),
            gap: Some("1/100".parse().unwrap()),
            skipped: None,
            flags: vec!["a".into(), "b".into()],
        }
    }

    fn csv_text(records: &[SweepRecord]) -> String {
        let mut out = Vec::new();
        emit(records, OutputFormat::Csv, &mut out).unwrap();
        String::from_utf8(out).unwrap()
    }

    #[test]
    fn empty_csv_is_header_only() {
        assert_eq!(
            csv_text(&[]),
            "p,residue,e,q,colength,alpha_num,alpha_den,consistent,smooth,l,s,gap_num,gap_den,flags\n"
        );
    }

    #[test]
    fn csv_rows_repeat_fit_columns() {
        let text = csv_text(&[record()]);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[1], "5,5,1,5,72,301,100,true,true,2,1,1,100,a;b");
        assert_eq!(lines[2], "5,5,2,25,1879,301,100,true,true,2,1,1,100,a;b");

        let mut semistable = record();
        semistable.ls = Some(Destabilization::Semistable(SemistableTag::Semistable));
        semistable.colengths.clear();
        semistable.skipped = Some("curve vanishes mod p".into());
        semistable.flags.clear();
        let text = csv_text(&[semistable]);
        assert_eq!(
            text.lines().nth(1).unwrap(),
            "5,5,,,,301,100,true,true,0,inf,1,100,skipped: curve vanishes mod p"
        );
    }

    #[test]
    fn jsonl_round_trip() {
        let mut semistable = record();
        semistable.p = 17;
        semistable.ls = Some(Destabilization::Semistable(SemistableTag::Semistable));
        semistable.alpha = None;
        let records = vec![record(), semistable];
        let mut out = Vec::new();
        emit(&records, OutputFormat::Jsonl, &mut out).unwrap();
        let text = String::from_utf8(out.clone()).unwrap();
        assert_eq!(text.lines().count(), 2);
        assert!(text.contains(r#""alpha":"301/100""#));
        assert!(text.contains(r#""ls":"semistable""#));
        assert!(text.contains(r#""ls":[[2,1]]"#));
        assert_eq!(read_jsonl(out.as_slice()).unwrap(), records);
    }

    #[test]
    fn unwritable_path_errors() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("missing").join("out.csv");
        assert!(matches!(
            emit_to_path(&[record()], OutputFormat::Csv, &path),
            Err(SweepError::Io(_))
        ));
    }
}
