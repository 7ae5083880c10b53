use crate::error::{Error, Result};

/// Number of landmarks in the standard 68-point face annotation.
pub const NUM_KEYPOINTS: usize = 68;

/// Landmark groups in the 68-point layout, by index range.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KeypointGroup {
    Jaw,
    Eyebrows,
    Nose,
    Eyes,
    Mouth,
}

impl KeypointGroup {
    pub const ALL: [KeypointGroup; 5] = [
        KeypointGroup::Jaw,
        KeypointGroup::Eyebrows,
        KeypointGroup::Nose,
        KeypointGroup::Eyes,
        KeypointGroup::Mouth,
    ];

    /// Index range of this group within the 68-point layout.
    pub fn range(&self) -> std::ops::Range<usize> {
        match self {
            KeypointGroup::Jaw => 0..17,
            KeypointGroup::Eyebrows => 17..27,
            KeypointGroup::Nose => 27..36,
            KeypointGroup::Eyes => 36..48,
            KeypointGroup::Mouth => 48..68,
        }
    }
}

/// 68-point landmark annotation with a per-point presence mask.
#[derive(Debug, Clone, PartialEq)]
pub struct KeypointSet {
    points: Vec<(f64, f64)>,
    present: Vec<bool>,
}

impl KeypointSet {
    pub fn new(points: Vec<(f64, f64)>, present: Vec<bool>) -> Result<Self> {
        if points.len() != NUM_KEYPOINTS {
            return Err(Error::InvalidKeypoints(format!(
                "expected {NUM_KEYPOINTS} points, got {}",
                points.len()
            )));
        }
        if present.len() != NUM_KEYPOINTS {
            return Err(Error::InvalidKeypoints(format!(
                "expected {NUM_KEYPOINTS} presence flags, got {}",
                present.len()
            )));
        }
        Ok(KeypointSet { points, present })
    }

    /// All points marked present.
    pub fn fully_present(points: Vec<(f64, f64)>) -> Result<Self> {
        let present = vec![true; points.len()];
        Self::new(points, present)
    }

    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    pub fn is_present(&self, idx: usize) -> bool {
        self.present[idx]
    }

    /// True when every point of the group is present and inside the image.
    pub fn group_complete(&self, group: KeypointGroup, width: usize, height: usize) -> bool {
        group.range().all(|i| {
            let (x, y) = self.points[i];
            self.present[i] && x >= 0.0 && y >= 0.0 && x < width as f64 && y < height as f64
        })
    }
}

/// Whether a detection is usable for crop synthesis.
///
/// The eyebrow, nose, eye, and mouth groups must each be fully present and
/// in-bounds. Jaw points are not required: the fractional crops never touch
/// the face outline.
pub fn has_sufficient_keypoints(kps: &KeypointSet, width: usize, height: usize) -> bool {
    [
        KeypointGroup::Eyebrows,
        KeypointGroup::Nose,
        KeypointGroup::Eyes,
        KeypointGroup::Mouth,
    ]
    .iter()
    .all(|g| kps.group_complete(*g, width, height))
}
