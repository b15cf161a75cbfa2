//! Score tables: the artifact a detector run produces and the input
//! every downstream command consumes. One `revision_id<TAB>score` row
//! per revision, sorted by id, scores printed with the shortest decimal
//! form that parses back to the identical double.

use std::collections::BTreeMap;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use wdvdb_core::corpus::RevisionId;

use crate::error::CliError;

pub fn write_scores<W: Write>(
    scores: &BTreeMap<RevisionId, f64>,
    out: &mut W,
) -> Result<(), CliError> {
    for (id, score) in scores {
        // Display on f64 is the shortest round-trip form
        writeln!(out, "{id}\t{score}")?;
    }
    Ok(())
}

pub fn save_scores(scores: &BTreeMap<RevisionId, f64>, path: &Path) -> Result<(), CliError> {
    let mut file = BufWriter::new(std::fs::File::create(path).map_err(|e| {
        CliError::Data(format!("score table {}: {e}", path.display()))
    })?);
    write_scores(scores, &mut file)?;
    file.flush()?;
    Ok(())
}

pub fn read_scores<R: Read>(mut input: R) -> Result<BTreeMap<RevisionId, f64>, CliError> {
    let mut text = String::new();
    input.read_to_string(&mut text)?;
    let mut scores = BTreeMap::new();
    for (line_no, line) in text.lines().enumerate() {
        let n = line_no + 1;
        let (id, score) = line
            .split_once('\t')
            .ok_or_else(|| CliError::Data(format!("score table line {n}: expected two fields")))?;
        let id: RevisionId = id
            .parse()
            .map_err(|e| CliError::Data(format!("score table line {n}: bad revision id: {e}")))?;
        let score: f64 = score
            .parse()
            .map_err(|e| CliError::Data(format!("score table line {n}: bad score: {e}")))?;
        if !(0.0..=1.0).contains(&score) || score.is_nan() {
            return Err(CliError::Data(format!(
                "score table line {n}: score {score} outside [0, 1]"
            )));
        }
        if scores.insert(id, score).is_some() {
            return Err(CliError::Data(format!(
                "score table line {n}: revision {id} listed twice"
            )));
        }
    }
    Ok(scores)
}

pub fn load_scores(path: &Path) -> Result<BTreeMap<RevisionId, f64>, CliError> {
    let file = std::fs::File::open(path)
        .map_err(|e| CliError::Data(format!("score table {}: {e}", path.display())))?;
    read_scores(file)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table(entries: &[(RevisionId, f64)]) -> BTreeMap<RevisionId, f64> {
        entries.iter().copied().collect()
    }

    #[test]
    fn round_trip_is_bitwise() {
        let scores = table(&[(1, 0.1), (2, 1.0 / 3.0), (7, 0.0), (9, 1.0)]);
        let mut buf = Vec::new();
        write_scores(&scores, &mut buf).unwrap();
        let back = read_scores(buf.as_slice()).unwrap();
        assert_eq!(back.len(), scores.len());
        for (id, score) in &scores {
            assert_eq!(back[id].to_bits(), score.to_bits());
        }
    }

    #[test]
    fn rows_come_out_sorted_by_id() {
        let scores = table(&[(30, 0.5), (2, 0.25), (19, 0.75)]);
        let mut buf = Vec::new();
        write_scores(&scores, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text, "2\t0.25\n19\t0.75\n30\t0.5\n");
    }

    #[test]
    fn malformed_rows_are_rejected() {
        assert!(read_scores("1\t0.5\textra\n".as_bytes()).is_err());
        assert!(read_scores("one\t0.5\n".as_bytes()).is_err());
        assert!(read_scores("1\tmiddling\n".as_bytes()).is_err());
        assert!(read_scores("1\t1.5\n".as_bytes()).is_err());
        assert!(read_scores("1\tNaN\n".as_bytes()).is_err());
        assert!(read_scores("1\t0.5\n1\t0.6\n".as_bytes()).is_err());
    }

    #[test]
    fn empty_table_is_fine() {
        assert!(read_scores("".as_bytes()).unwrap().is_empty());
    }
}
