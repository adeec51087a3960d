//! Dataset and label files: comma-separated, header row, optional trailing
//! `label` column, floats written with 17 significant digits.

use std::path::Path;

use ndarray::Array2;

use crate::data::DataMatrix;
use crate::error::{Error, Result};

pub const LABEL_COLUMN: &str = "label";

fn reader(path: &Path) -> Result<csv::Reader<std::fs::File>> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    Ok(csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(file))
}

fn parse_label(path: &Path, row: usize, s: &str) -> Result<usize> {
    s.parse()
        .map_err(|_| Error::parse(path, format!("row {row}: label {s:?} is not a non-negative integer")))
}

/// Reads a dataset. A last column named `label` becomes the label vector.
pub fn read_dataset(path: &Path, zscore: bool) -> Result<DataMatrix> {
    let mut rdr = reader(path)?;
    let headers = rdr.headers().map_err(|e| Error::parse(path, e))?.clone();
    let has_labels = headers.iter().next_back() == Some(LABEL_COLUMN);
    let d = headers.len() - usize::from(has_labels);
    if d == 0 {
        return Err(Error::parse(path, "no feature columns"));
    }
    let mut values = Vec::new();
    let mut labels = Vec::new();
    for (i, record) in rdr.records().enumerate() {
        let row = i + 2;
        let record = record.map_err(|e| Error::parse(path, e))?;
        if record.len() != headers.len() {
            return Err(Error::parse(
                path,
                format!("row {row}: {} fields, header has {}", record.len(), headers.len()),
            ));
        }
        for (k, field) in record.iter().take(d).enumerate() {
            let v: f64 = field
                .parse()
                .map_err(|_| Error::parse(path, format!("row {row}, column {}: {field:?} is not a number", k + 1)))?;
            values.push(v);
        }
        if has_labels {
            labels.push(parse_label(path, row, &record[d])?);
        }
    }
    if values.is_empty() {
        return Err(Error::parse(path, "no data rows"));
    }
    let n = values.len() / d;
    let samples = Array2::from_shape_vec((n, d), values).expect("row lengths checked");
    let x = DataMatrix::new(samples, has_labels.then_some(labels)).map_err(|e| Error::parse(path, e))?;
    Ok(if zscore { x.zscored() } else { x })
}

pub fn write_dataset(path: &Path, x: &DataMatrix) -> Result<()> {
    let mut wtr = csv::Writer::from_path(path).map_err(|e| Error::parse(path, e))?;
    let mut header: Vec<String> = (1..=x.feature_count()).map(|k| format!("f{k}")).collect();
    if x.labels().is_some() {
        header.push(LABEL_COLUMN.to_string());
    }
    wtr.write_record(&header).map_err(|e| Error::parse(path, e))?;
    for j in 0..x.sample_count() {
        let mut rec: Vec<String> = x.sample(j).iter().map(|v| format!("{v:.16e}")).collect();
        if let Some(l) = x.labels() {
            rec.push(l[j].to_string());
        }
        wtr.write_record(&rec).map_err(|e| Error::parse(path, e))?;
    }
    wtr.flush().map_err(|e| Error::io(path, e))
}

/// Reads labels from the `label` column, or from the only column.
pub fn read_labels(path: &Path) -> Result<Vec<usize>> {
    let mut rdr = reader(path)?;
    let headers = rdr.headers().map_err(|e| Error::parse(path, e))?.clone();
    let col = match headers.iter().position(|h| h == LABEL_COLUMN) {
        Some(c) => c,
        None if headers.len() == 1 => 0,
        None => return Err(Error::parse(path, "no `label` column")),
    };
    let mut labels = Vec::new();
    for (i, record) in rdr.records().enumerate() {
        let record = record.map_err(|e| Error::parse(path, e))?;
        let field = record
            .get(col)
            .ok_or_else(|| Error::parse(path, format!("row {}: missing label", i + 2)))?;
        labels.push(parse_label(path, i + 2, field)?);
    }
    Ok(labels)
}

pub fn write_labels(path: &Path, labels: &[usize]) -> Result<()> {
    let mut out = String::from(LABEL_COLUMN);
    out.push('\n');
    for l in labels {
        out.push_str(&l.to_string());
        out.push('\n');
    }
    std::fs::write(path, out).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dataset_round_trip_is_exact() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("x.csv");
        let x = DataMatrix::from_rows(&[vec![0.1, -1e-300], vec![1.0 / 3.0, 12345.678901234567]])
            .unwrap()
            .with_labels(vec![1, 0])
            .unwrap();
        write_dataset(&path, &x).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("f1,f2,label\n"));
        assert_eq!(read_dataset(&path, false).unwrap(), x);
    }

    #[test]
    fn unlabeled_and_malformed() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("x.csv");
        std::fs::write(&path, "a,b\n1,2\n3,4\n").unwrap();
        let x = read_dataset(&path, false).unwrap();
        assert!(x.labels().is_none());
        assert_eq!(x.feature_count(), 2);

        std::fs::write(&path, "a,b\n1,2\n3,oops\n").unwrap();
        let msg = read_dataset(&path, false).unwrap_err().to_string();
        assert!(msg.contains("row 3, column 2"), "{msg}");

        std::fs::write(&path, "a,label\n1,-1\n").unwrap();
        assert!(read_dataset(&path, false).is_err());
    }

    #[test]
    fn labels_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("l.csv");
        write_labels(&path, &[2, 0, 1]).unwrap();
        assert_eq!(read_labels(&path).unwrap(), vec![2, 0, 1]);
        std::fs::write(&path, "f1,label\n0.5,4\n").unwrap();
        assert_eq!(read_labels(&path).unwrap(), vec![4]);
    }
}
