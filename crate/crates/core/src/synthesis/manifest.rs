use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::synthesis::keypoints::{KeypointSet, NUM_KEYPOINTS};

/// One line of a keypoint manifest: an image path plus its 68-point detection.
///
/// `present` may be omitted, in which case every point counts as detected.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct KeypointRecord {
    pub image: String,
    pub points: Vec<(f64, f64)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub present: Option<Vec<bool>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<u8>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub video: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub frame: Option<u32>,
}

impl KeypointRecord {
    pub fn keypoints(&self) -> Result<KeypointSet> {
        let present = self
            .present
            .clone()
            .unwrap_or_else(|| vec![true; NUM_KEYPOINTS]);
        KeypointSet::new(self.points.clone(), present)
    }
}

/// One line of a synthesis output manifest: the main view, its generated
/// auxiliary view, and the shared label.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SynthesisRecord {
    pub sample_id: String,
    pub main: String,
    pub aux: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<u8>,
}

/// Outcome counts of a synthesis run.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SynthesisStats {
    pub total: usize,
    pub synthesized: usize,
    pub skipped_keypoints: usize,
    pub failed: usize,
}

impl std::fmt::Display for SynthesisStats {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{} synthesized, {} skipped (insufficient keypoints), {} failed of {} total",
            self.synthesized, self.skipped_keypoints, self.failed, self.total
        )
    }
}

fn read_jsonl<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<Vec<T>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut out = Vec::new();
    for (idx, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let record = serde_json::from_str(&line).map_err(|e| Error::Parse {
            path: path.display().to_string(),
            line: idx + 1,
            msg: e.to_string(),
        })?;
        out.push(record);
    }
    Ok(out)
}

fn write_jsonl<T: Serialize>(path: &Path, records: &[T]) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    for record in records {
        let line = serde_json::to_string(record).map_err(|e| Error::Format {
            path: path.display().to_string(),
            msg: e.to_string(),
        })?;
        writeln!(w, "{line}").map_err(|e| Error::io(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Reads a JSON-lines keypoint manifest; blank lines are skipped.
pub fn read_keypoint_manifest(path: &Path) -> Result<Vec<KeypointRecord>> {
    read_jsonl(path)
}

/// Reads a JSON-lines synthesis manifest; blank lines are skipped.
pub fn read_synthesis_manifest(path: &Path) -> Result<Vec<SynthesisRecord>> {
    read_jsonl(path)
}

/// Writes a synthesis manifest, one JSON object per line.
pub fn write_synthesis_manifest(path: &Path, records: &[SynthesisRecord]) -> Result<()> {
    write_jsonl(path, records)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn keypoint_manifest_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("kps.jsonl");
        let rec = KeypointRecord {
            image: "frames/f0001.png".to_string(),
            points: (0..NUM_KEYPOINTS).map(|i| (i as f64, i as f64 * 2.0)).collect(),
            present: None,
            label: Some(4),
            video: Some("vid1".to_string()),
            frame: Some(1),
        };
        let line = serde_json::to_string(&rec).unwrap();
        std::fs::write(&path, format!("{line}\n\n{line}\n")).unwrap();
        let back = read_keypoint_manifest(&path).unwrap();
        assert_eq!(back.len(), 2);
        assert_eq!(back[0].image, rec.image);
        assert!(back[0].keypoints().unwrap().is_present(67));
    }

    #[test]
    fn parse_error_names_line() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.jsonl");
        std::fs::write(&path, "{\"image\": \"a.png\", \"points\": []}\nnot json\n").unwrap();
        let err = read_keypoint_manifest(&path).unwrap_err();
        match err {
            Error::Parse { line, .. } => assert_eq!(line, 2),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn synthesis_manifest_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("synth.jsonl");
        let records = vec![
            SynthesisRecord {
                sample_id: "s0".to_string(),
                main: "m0.png".to_string(),
                aux: "a0.png".to_string(),
                label: Some(0),
            },
            SynthesisRecord {
                sample_id: "s1".to_string(),
                main: "m1.png".to_string(),
                aux: "a1.png".to_string(),
                label: None,
            },
        ];
        write_synthesis_manifest(&path, &records).unwrap();
        let back = read_synthesis_manifest(&path).unwrap();
        assert_eq!(back.len(), 2);
        assert_eq!(back[1].sample_id, "s1");
        assert_eq!(back[1].label, None);
    }
}
