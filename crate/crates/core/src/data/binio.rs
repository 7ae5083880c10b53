use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use byteorder::{LittleEndian, ReadBytesExt, WriteBytesExt};

use crate::data::record::{EmbeddingDataset, EmbeddingRecord};
use crate::error::{Error, Result};
use crate::label::ExpressionClass;

pub const EMBEDDING_MAGIC: &[u8; 4] = b"FEMB";
pub const EMBEDDING_VERSION: u32 = 1;

fn format_err(path: &Path, msg: impl Into<String>) -> Error {
    Error::Format {
        path: path.display().to_string(),
        msg: msg.into(),
    }
}

fn write_str<W: Write>(w: &mut W, s: &str, path: &Path) -> Result<()> {
    let bytes = s.as_bytes();
    if bytes.len() > u16::MAX as usize {
        return Err(format_err(path, format!("string too long: {} bytes", bytes.len())));
    }
    w.write_u16::<LittleEndian>(bytes.len() as u16)
        .and_then(|_| w.write_all(bytes))
        .map_err(|e| Error::io(path, e))
}

fn read_str<R: Read>(r: &mut R, path: &Path) -> Result<String> {
    let len = r.read_u16::<LittleEndian>().map_err(|e| Error::io(path, e))? as usize;
    let mut buf = vec![0u8; len];
    r.read_exact(&mut buf).map_err(|e| Error::io(path, e))?;
    String::from_utf8(buf).map_err(|e| format_err(path, format!("invalid utf-8 string: {e}")))
}

/// Writes a dataset in the binary embedding format.
///
/// Layout: magic `FEMB`, version u32, dim u32, count u64, then per record a
/// length-prefixed sample id and video id, frame u32, label u8, and `dim`
/// f32 values. All integers and floats are little-endian.
pub fn save_embeddings_binary(path: &Path, ds: &EmbeddingDataset) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    let io = |e| Error::io(path, e);
    w.write_all(EMBEDDING_MAGIC).map_err(io)?;
    w.write_u32::<LittleEndian>(EMBEDDING_VERSION).map_err(io)?;
    w.write_u32::<LittleEndian>(ds.dim() as u32).map_err(io)?;
    w.write_u64::<LittleEndian>(ds.len() as u64).map_err(io)?;
    for rec in ds.records() {
        write_str(&mut w, &rec.sample_id, path)?;
        write_str(&mut w, &rec.video_id, path)?;
        w.write_u32::<LittleEndian>(rec.frame_index).map_err(io)?;
        w.write_u8(rec.label.index() as u8).map_err(io)?;
        for &v in &rec.vector {
            w.write_f32::<LittleEndian>(v).map_err(io)?;
        }
    }
    w.flush().map_err(io)
}

/// Reads a binary embedding file written by [`save_embeddings_binary`].
pub fn load_embeddings_binary(path: &Path) -> Result<EmbeddingDataset> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut r = BufReader::new(file);
    let io = |e| Error::io(path, e);
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic).map_err(io)?;
    if &magic != EMBEDDING_MAGIC {
        return Err(format_err(path, "not an embedding file (bad magic)"));
    }
    let version = r.read_u32::<LittleEndian>().map_err(io)?;
    if version != EMBEDDING_VERSION {
        return Err(format_err(path, format!("unsupported version {version}")));
    }
    let dim = r.read_u32::<LittleEndian>().map_err(io)? as usize;
    let count = r.read_u64::<LittleEndian>().map_err(io)? as usize;
    let mut records = Vec::with_capacity(count);
    for _ in 0..count {
        let sample_id = read_str(&mut r, path)?;
        let video_id = read_str(&mut r, path)?;
        let frame_index = r.read_u32::<LittleEndian>().map_err(io)?;
        let label_raw = r.read_u8().map_err(io)?;
        let label = ExpressionClass::from_index(label_raw)?;
        let mut vector = vec![0f32; dim];
        r.read_f32_into::<LittleEndian>(&mut vector).map_err(io)?;
        records.push(EmbeddingRecord {
            sample_id,
            video_id,
            frame_index,
            label,
            vector,
        });
    }
    EmbeddingDataset::new(dim, records)
}

/// Loads embeddings from either format, sniffing the binary magic first and
/// falling back to CSV.
pub fn load_embeddings(path: &Path) -> Result<EmbeddingDataset> {
    let mut file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut magic = [0u8; 4];
    let n = file.read(&mut magic).map_err(|e| Error::io(path, e))?;
    drop(file);
    if n == 4 && &magic == EMBEDDING_MAGIC {
        load_embeddings_binary(path)
    } else {
        crate::data::csvio::load_embeddings_csv(path)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_dataset() -> EmbeddingDataset {
        let records = (0..6)
            .map(|i| EmbeddingRecord {
                sample_id: format!("s{i}"),
                video_id: format!("vid{}", i % 2),
                frame_index: i as u32,
                label: ExpressionClass::from_index((i % 8) as u8).unwrap(),
                vector: (0..3).map(|j| (i * 3 + j) as f32 * 0.25 - 1.0).collect(),
            })
            .collect();
        EmbeddingDataset::new(3, records).unwrap()
    }

    #[test]
    fn binary_round_trip_is_exact() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("emb.bin");
        let ds = sample_dataset();
        save_embeddings_binary(&path, &ds).unwrap();
        let back = load_embeddings_binary(&path).unwrap();
        assert_eq!(back, ds);
    }

    #[test]
    fn sniffer_routes_binary_files() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("emb.dat");
        let ds = sample_dataset();
        save_embeddings_binary(&path, &ds).unwrap();
        assert_eq!(load_embeddings(&path).unwrap(), ds);
    }

    #[test]
    fn bad_magic_is_reported() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("junk.bin");
        std::fs::write(&path, b"XXXXrest").unwrap();
        let err = load_embeddings_binary(&path).unwrap_err();
        assert!(matches!(err, Error::Format { .. }));
    }

    #[test]
    fn truncated_file_is_an_io_error() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("trunc.bin");
        let ds = sample_dataset();
        save_embeddings_binary(&path, &ds).unwrap();
        let bytes = std::fs::read(&path).unwrap();
        std::fs::write(&path, &bytes[..bytes.len() - 5]).unwrap();
        assert!(load_embeddings_binary(&path).is_err());
    }
}
