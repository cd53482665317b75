//! CSV ingestion and emission. Format: header row, feature columns as
//! decimal text, final column `label`, UTF-8, comma separated.

use std::path::Path;

use super::LabeledDataset;
use crate::error::{Error, Result};

/// Map raw label strings to `0..C-1` in first-appearance order.
pub fn label_encode(raw: &[String]) -> (Vec<usize>, Vec<String>) {
    let mut names: Vec<String> = Vec::new();
    let labels = raw
        .iter()
        .map(|value| {
            if let Some(pos) = names.iter().position(|n| n == value) {
                pos
            } else {
                names.push(value.clone());
                names.len() - 1
            }
        })
        .collect();
    (labels, names)
}

/// Load a dataset. Integer labels are used as class ids directly; anything
/// else goes through [`label_encode`]. Returns the dataset together with the
/// class-id-to-name mapping.
pub fn load_csv(path: impl AsRef<Path>) -> Result<(LabeledDataset, Vec<String>)> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(path.as_ref())?;
    let width = reader.headers()?.len();
    if width < 2 {
        return Err(Error::MalformedPayload(format!(
            "csv needs at least one feature column plus a label column, found {width}"
        )));
    }
    let mut features = Vec::new();
    let mut raw_labels = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record?;
        if record.len() != width {
            return Err(Error::MalformedPayload(format!(
                "row {} has {} field(s), expected {width}",
                line + 2,
                record.len()
            )));
        }
        let mut row = Vec::with_capacity(width - 1);
        for field in record.iter().take(width - 1) {
            let value: f64 = field.trim().parse().map_err(|_| {
                Error::MalformedPayload(format!(
                    "row {}: cannot parse feature {field:?} as a number",
                    line + 2
                ))
            })?;
            row.push(value);
        }
        features.push(row);
        raw_labels.push(record[width - 1].trim().to_string());
    }
    if features.is_empty() {
        return Err(Error::EmptyDataset);
    }

    let as_ints: Option<Vec<usize>> = raw_labels
        .iter()
        .map(|l| l.parse::<usize>().ok())
        .collect();
    let (labels, names) = match as_ints {
        Some(ints) => {
            let max = ints.iter().max().copied().unwrap_or(0);
            (ints, (0..=max).map(|i| i.to_string()).collect())
        }
        None => label_encode(&raw_labels),
    };
    Ok((LabeledDataset::new(features, labels)?, names))
}

/// Write a dataset in the same format `load_csv` reads. `label_names` maps
/// class ids back to text; without it the numeric ids are written.
pub fn save_csv(
    data: &LabeledDataset,
    path: impl AsRef<Path>,
    label_names: Option<&[String]>,
) -> Result<()> {
    let mut writer = csv::Writer::from_path(path.as_ref())?;
    let mut header: Vec<String> = (0..data.num_features())
        .map(|j| format!("f{j}"))
        .collect();
    header.push("label".to_string());
    writer.write_record(&header)?;
    for (row, label) in data.rows() {
        let mut record: Vec<String> = row.iter().map(|x| format!("{x:.12}")).collect();
        record.push(match label_names {
            Some(names) => names[label].clone(),
            None => label.to_string(),
        });
        writer.write_record(&record)?;
    }
    writer.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::generate_blobs;

    #[test]
    fn label_encode_first_appearance() {
        let raw: Vec<String> = ["car", "truck", "car"].iter().map(|s| s.to_string()).collect();
        let (labels, names) = label_encode(&raw);
        assert_eq!(labels, vec![0, 1, 0]);
        assert_eq!(names, vec!["car", "truck"]);
    }

    #[test]
    fn round_trip_generated_dataset() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("blobs.csv");
        let data = generate_blobs(40, 3, 2, 2.5, &[0.5, 0.5], 11).unwrap();
        save_csv(&data, &path, None).unwrap();
        let (loaded, names) = load_csv(&path).unwrap();
        assert_eq!(loaded.labels(), data.labels());
        assert_eq!(names, vec!["0", "1"]);
        for (a, b) in data
            .features()
            .iter()
            .flatten()
            .zip(loaded.features().iter().flatten())
        {
            assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn text_labels_get_encoded() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("text.csv");
        std::fs::write(&path, "f0,f1,label\n1.0,2.0,van\n3.0,4.0,car\n5.0,6.0,van\n").unwrap();
        let (data, names) = load_csv(&path).unwrap();
        assert_eq!(data.labels(), &[0, 1, 0]);
        assert_eq!(names, vec!["van", "car"]);
    }

    #[test]
    fn malformed_rows_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.csv");
        std::fs::write(&path, "f0,label\nnot-a-number,1\n").unwrap();
        assert!(load_csv(&path).is_err());

        let empty = dir.path().join("empty.csv");
        std::fs::write(&empty, "f0,label\n").unwrap();
        assert!(matches!(load_csv(&empty), Err(Error::EmptyDataset)));
    }
}
