use std::fs::File;
use std::path::Path;

use crate::data::record::{EmbeddingDataset, EmbeddingRecord};
use crate::error::{Error, Result};
use crate::label::ExpressionClass;

/// Writes a dataset as CSV with header
/// `sample_id,video_id,frame_index,label,v0..v{dim-1}`.
pub fn save_embeddings_csv(path: &Path, ds: &EmbeddingDataset) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = csv::Writer::from_writer(file);
    let mut header = vec![
        "sample_id".to_string(),
        "video_id".to_string(),
        "frame_index".to_string(),
        "label".to_string(),
    ];
    header.extend((0..ds.dim()).map(|i| format!("v{i}")));
    let wrap = |e: csv::Error| Error::Format {
        path: path.display().to_string(),
        msg: e.to_string(),
    };
    w.write_record(&header).map_err(wrap)?;
    for rec in ds.records() {
        let mut row = vec![
            rec.sample_id.clone(),
            rec.video_id.clone(),
            rec.frame_index.to_string(),
            rec.label.index().to_string(),
        ];
        row.extend(rec.vector.iter().map(|v| v.to_string()));
        w.write_record(&row).map_err(wrap)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Reads the CSV embedding format written by [`save_embeddings_csv`].
///
/// The header is required; the vector dimension is taken from the `v*`
/// column count and enforced on every row.
pub fn load_embeddings_csv(path: &Path) -> Result<EmbeddingDataset> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut r = csv::ReaderBuilder::new().has_headers(true).from_reader(file);
    let parse_err = |line: usize, msg: String| Error::Parse {
        path: path.display().to_string(),
        line,
        msg,
    };
    let headers = r
        .headers()
        .map_err(|e| parse_err(1, e.to_string()))?
        .clone();
    let expected_prefix = ["sample_id", "video_id", "frame_index", "label"];
    if headers.len() < 5 || headers.iter().take(4).ne(expected_prefix) {
        return Err(parse_err(
            1,
            format!("expected header sample_id,video_id,frame_index,label,v0..., got {headers:?}"),
        ));
    }
    let dim = headers.len() - 4;

    let mut records = Vec::new();
    for (idx, row) in r.records().enumerate() {
        let line = idx + 2;
        let row = row.map_err(|e| parse_err(line, e.to_string()))?;
        if row.len() != dim + 4 {
            return Err(parse_err(line, format!("expected {} fields, got {}", dim + 4, row.len())));
        }
        let frame_index: u32 = row[2]
            .parse()
            .map_err(|e| parse_err(line, format!("bad frame_index {:?}: {e}", &row[2])))?;
        let label_raw: u8 = row[3]
            .parse()
            .map_err(|e| parse_err(line, format!("bad label {:?}: {e}", &row[3])))?;
        let label = ExpressionClass::from_index(label_raw)?;
        let mut vector = Vec::with_capacity(dim);
        for field in row.iter().skip(4) {
            let v: f32 = field
                .parse()
                .map_err(|e| parse_err(line, format!("bad value {field:?}: {e}")))?;
            vector.push(v);
        }
        records.push(EmbeddingRecord {
            sample_id: row[0].to_string(),
            video_id: row[1].to_string(),
            frame_index,
            label,
            vector,
        });
    }
    EmbeddingDataset::new(dim, records)
}
