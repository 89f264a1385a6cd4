//! CSV ingestion and export.
//!
//! Files are plain numeric with an optional header row and comma delimiter.
//! Ground-truth and P/U-indicator columns are named explicitly, which
//! requires a header.

use std::path::Path;

use super::{FeatureMatrix, PuDataset};
use crate::error::{Error, Result};

struct RawTable {
    header: Option<Vec<String>>,
    /// Physical 1-based file row number per record (header excluded).
    row_numbers: Vec<usize>,
    records: Vec<csv::StringRecord>,
    cols: usize,
}

fn read_table(path: &Path) -> Result<RawTable> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| match e.kind() {
            csv::ErrorKind::Io(_) => Error::Io {
                path: path.to_path_buf(),
                source: std::io::Error::other(e.to_string()),
            },
            _ => Error::Schema(e.to_string()),
        })?;

    let mut rows: Vec<csv::StringRecord> = Vec::new();
    for rec in reader.records() {
        let rec = rec.map_err(|e| Error::Schema(format!("{}: {e}", path.display())))?;
        if rec.len() == 1 && rec[0].is_empty() {
            continue; // blank line
        }
        rows.push(rec);
    }
    if rows.is_empty() {
        return Err(Error::Schema(format!("{}: empty dataset", path.display())));
    }

    // A header is any first row with at least one non-numeric cell.
    let first_is_header = rows[0].iter().any(|cell| cell.parse::<f64>().is_err());
    let (header, body_start) = if first_is_header {
        (Some(rows[0].iter().map(str::to_owned).collect::<Vec<_>>()), 1)
    } else {
        (None, 0)
    };
    if rows.len() == body_start {
        return Err(Error::Schema(format!("{}: empty dataset", path.display())));
    }

    let cols = rows[body_start].len();
    let mut row_numbers = Vec::with_capacity(rows.len() - body_start);
    let mut records = Vec::with_capacity(rows.len() - body_start);
    for (i, rec) in rows.into_iter().enumerate().skip(body_start) {
        if rec.len() != cols {
            return Err(Error::Schema(format!(
                "{}: row {} has {} columns, expected {cols}",
                path.display(),
                i + 1,
                rec.len()
            )));
        }
        row_numbers.push(i + 1);
        records.push(rec);
    }
    Ok(RawTable { header, row_numbers, records, cols })
}

impl RawTable {
    fn column_index(&self, path: &Path, name: &str) -> Result<usize> {
        let header = self.header.as_ref().ok_or_else(|| {
            Error::Schema(format!(
                "{}: column '{name}' requested but the file has no header",
                path.display()
            ))
        })?;
        header.iter().position(|h| h == name).ok_or_else(|| {
            Error::Schema(format!("{}: no column named '{name}'", path.display()))
        })
    }

    fn parse_cell(&self, rec_idx: usize, col: usize) -> Result<f64> {
        let cell = &self.records[rec_idx][col];
        cell.parse::<f64>().map_err(|_| Error::Parse {
            row: self.row_numbers[rec_idx],
            col: col + 1,
            message: format!("'{cell}' is not a number"),
        })
    }

    /// Parses all cells except the listed columns into a feature matrix.
    fn features(&self, path: &Path, skip: &[usize]) -> Result<FeatureMatrix> {
        let keep: Vec<usize> = (0..self.cols).filter(|j| !skip.contains(j)).collect();
        if keep.is_empty() {
            return Err(Error::Schema(format!("{}: no feature columns left", path.display())));
        }
        let mut data = Vec::with_capacity(self.records.len() * keep.len());
        for i in 0..self.records.len() {
            for &j in &keep {
                data.push(self.parse_cell(i, j)?);
            }
        }
        FeatureMatrix::new(self.records.len(), keep.len(), data)
    }

    fn binary_column(&self, path: &Path, col: usize) -> Result<Vec<u8>> {
        let mut out = Vec::with_capacity(self.records.len());
        for i in 0..self.records.len() {
            let v = self.parse_cell(i, col)?;
            if v != 0.0 && v != 1.0 {
                return Err(Error::Parse {
                    row: self.row_numbers[i],
                    col: col + 1,
                    message: format!("expected 0 or 1, got {v}"),
                });
            }
            out.push(v as u8);
        }
        let _ = path;
        Ok(out)
    }
}

/// Loads a dataset from separate positive and unlabeled files.
///
/// `truth_column`, when given, names a 0/1 ground-truth column in the
/// unlabeled file (1 = positive component).
pub fn load_csv_pair(
    positives: &Path,
    unlabeled: &Path,
    truth_column: Option<&str>,
) -> Result<PuDataset> {
    let p = read_table(positives)?;
    let u = read_table(unlabeled)?;

    let p_mat = p.features(positives, &[])?;
    let (u_mat, truth) = match truth_column {
        Some(name) => {
            let col = u.column_index(unlabeled, name)?;
            (u.features(unlabeled, &[col])?, Some(u.binary_column(unlabeled, col)?))
        }
        None => (u.features(unlabeled, &[])?, None),
    };
    PuDataset::new(p_mat, u_mat, truth)
}

/// Loads a dataset from one file with a 0/1 P-vs-U indicator column
/// (1 = positive row). Ground truth, when named, is read from unlabeled
/// rows only.
pub fn load_csv_single(
    path: &Path,
    indicator_column: &str,
    truth_column: Option<&str>,
) -> Result<PuDataset> {
    let table = read_table(path)?;
    let ind = table.column_index(path, indicator_column)?;
    let indicator = table.binary_column(path, ind)?;

    let mut skip = vec![ind];
    let truth_col = match truth_column {
        Some(name) => {
            let c = table.column_index(path, name)?;
            skip.push(c);
            Some(c)
        }
        None => None,
    };
    let all = table.features(path, &skip)?;

    let pos_rows: Vec<usize> = indicator
        .iter()
        .enumerate()
        .filter_map(|(i, &v)| (v == 1).then_some(i))
        .collect();
    let unl_rows: Vec<usize> = indicator
        .iter()
        .enumerate()
        .filter_map(|(i, &v)| (v == 0).then_some(i))
        .collect();
    if pos_rows.is_empty() || unl_rows.is_empty() {
        return Err(Error::Schema(format!(
            "{}: indicator column must mark at least one positive and one unlabeled row",
            path.display()
        )));
    }

    let truth = match truth_col {
        Some(c) => {
            let full = table.binary_column(path, c)?;
            Some(unl_rows.iter().map(|&i| full[i]).collect())
        }
        None => None,
    };
    PuDataset::new(all.select_rows(&pos_rows)?, all.select_rows(&unl_rows)?, truth)
}

/// Writes a dataset as a pair of headered CSV files; the unlabeled file
/// carries a `truth` column when ground truth is present and `with_truth`
/// is set.
pub fn write_dataset_csv(
    data: &PuDataset,
    positives: &Path,
    unlabeled: &Path,
    with_truth: bool,
) -> Result<()> {
    let feature_names: Vec<String> = (1..=data.positives().cols()).map(|j| format!("f{j}")).collect();

    let io_err = |path: &Path| {
        let path = path.to_path_buf();
        move |e: csv::Error| Error::Io { path, source: std::io::Error::other(e.to_string()) }
    };

    let mut w = csv::Writer::from_path(positives).map_err(io_err(positives))?;
    w.write_record(&feature_names).map_err(io_err(positives))?;
    for i in 0..data.m() {
        let row: Vec<String> = data.positives().row(i).iter().map(|v| format!("{v}")).collect();
        w.write_record(&row).map_err(io_err(positives))?;
    }
    w.flush().map_err(|e| Error::Io { path: positives.to_path_buf(), source: e })?;

    let truth = data.truth().filter(|_| with_truth);
    let mut names = feature_names;
    if truth.is_some() {
        names.push("truth".into());
    }
    let mut w = csv::Writer::from_path(unlabeled).map_err(io_err(unlabeled))?;
    w.write_record(&names).map_err(io_err(unlabeled))?;
    for i in 0..data.n() {
        let mut row: Vec<String> = data.unlabeled().row(i).iter().map(|v| format!("{v}")).collect();
        if let Some(t) = truth {
            row.push(format!("{}", t[i]));
        }
        w.write_record(&row).map_err(io_err(unlabeled))?;
    }
    w.flush().map_err(|e| Error::Io { path: unlabeled.to_path_buf(), source: e })?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::simulate_gaussian;
    use std::io::Write;

    fn write_file(dir: &tempfile::TempDir, name: &str, content: &str) -> std::path::PathBuf {
        let path = dir.path().join(name);
        let mut f = std::fs::File::create(&path).unwrap();
        f.write_all(content.as_bytes()).unwrap();
        path
    }

    #[test]
    fn pair_load_computes_pi() {
        let dir = tempfile::tempdir().unwrap();
        let p = write_file(&dir, "p.csv", "1.0,2.0\n3.0,4.0\n5.0,6.0\n");
        let u = write_file(&dir, "u.csv", "0.1,0.2\n0.3,0.4\n0.5,0.6\n0.7,0.8\n0.9,1.0\n");
        let ds = load_csv_pair(&p, &u, None).unwrap();
        assert_eq!(ds.m(), 3);
        assert_eq!(ds.n(), 5);
        assert_eq!(ds.pi(), 0.375);
        assert!(ds.truth().is_none());
    }

    #[test]
    fn header_only_file_is_empty_dataset() {
        let dir = tempfile::tempdir().unwrap();
        let p = write_file(&dir, "p.csv", "a,b\n");
        let u = write_file(&dir, "u.csv", "0.1,0.2\n");
        let err = load_csv_pair(&p, &u, None).unwrap_err();
        assert!(err.to_string().contains("empty dataset"), "{err}");
    }

    #[test]
    fn bad_cell_names_row() {
        let dir = tempfile::tempdir().unwrap();
        let p = write_file(&dir, "p.csv", "1.0,2.0\n3.0,abc\n");
        let u = write_file(&dir, "u.csv", "0.1,0.2\n");
        let err = load_csv_pair(&p, &u, None).unwrap_err();
        match err {
            Error::Parse { row, col, .. } => {
                assert_eq!(row, 2);
                assert_eq!(col, 2);
            }
            other => panic!("expected parse error, got {other}"),
        }
    }

    #[test]
    fn ragged_rows_are_schema_errors() {
        let dir = tempfile::tempdir().unwrap();
        let p = write_file(&dir, "p.csv", "1.0,2.0\n3.0\n");
        let u = write_file(&dir, "u.csv", "0.1,0.2\n");
        assert!(matches!(load_csv_pair(&p, &u, None), Err(Error::Schema(_))));
    }

    #[test]
    fn truth_column_only_on_unlabeled() {
        let dir = tempfile::tempdir().unwrap();
        let p = write_file(&dir, "p.csv", "x,y\n1.0,2.0\n");
        let u = write_file(&dir, "u.csv", "x,y,truth\n0.1,0.2,1\n0.3,0.4,0\n");
        let ds = load_csv_pair(&p, &u, Some("truth")).unwrap();
        assert_eq!(ds.truth(), Some(&[1u8, 0u8][..]));
        assert_eq!(ds.unlabeled().cols(), 2);
    }

    #[test]
    fn single_file_indicator_split() {
        let dir = tempfile::tempdir().unwrap();
        let f = write_file(
            &dir,
            "all.csv",
            "x,y,is_pos\n1.0,2.0,1\n0.1,0.2,0\n0.3,0.4,0\n5.0,6.0,1\n",
        );
        let ds = load_csv_single(&f, "is_pos", None).unwrap();
        assert_eq!(ds.m(), 2);
        assert_eq!(ds.n(), 2);
        assert_eq!(ds.positives().row(0), &[1.0, 2.0]);
        assert_eq!(ds.unlabeled().row(1), &[0.3, 0.4]);
    }

    #[test]
    fn missing_file_is_io_error() {
        let err = load_csv_pair(Path::new("/nonexistent/p.csv"), Path::new("/nonexistent/u.csv"), None)
            .unwrap_err();
        assert!(matches!(err, Error::Io { .. }), "{err}");
        assert!(err.to_string().contains("/nonexistent/p.csv"));
    }

    #[test]
    fn round_trip_through_csv() {
        let dir = tempfile::tempdir().unwrap();
        let ds = simulate_gaussian(0.5, 4, 6, 3, 2.0, 5).unwrap();
        let p = dir.path().join("p.csv");
        let u = dir.path().join("u.csv");
        write_dataset_csv(&ds, &p, &u, true).unwrap();
        let back = load_csv_pair(&p, &u, Some("truth")).unwrap();
        assert_eq!(back.m(), 4);
        assert_eq!(back.n(), 6);
        assert_eq!(back.truth(), ds.truth());
        for i in 0..ds.m() {
            for j in 0..3 {
                assert_eq!(back.positives().get(i, j), ds.positives().get(i, j));
            }
        }
    }
}
