//! Auxiliary-view synthesis: fractional region crops of a face image stacked
//! into a second, part-focused view of the same expression.

pub mod image;
pub mod io;
pub mod keypoints;
pub mod manifest;
pub mod region;

pub use image::{resize_bilinear, ImageBuffer};
pub use io::{load_image, save_png};
pub use keypoints::{has_sufficient_keypoints, KeypointGroup, KeypointSet, NUM_KEYPOINTS};
pub use manifest::{
    read_keypoint_manifest, read_synthesis_manifest, write_synthesis_manifest, KeypointRecord,
    SynthesisRecord, SynthesisStats,
};
pub use region::{compose_views, crop_region, RegionName, RegionSpec, ViewComposition};

use crate::error::Result;

/// Builds the auxiliary view for one face image.
///
/// When keypoints are supplied the image is first screened with
/// [`has_sufficient_keypoints`]; `Ok(None)` means the frame was skipped.
/// Without keypoints the crop always runs.
pub fn synthesize_aux_view(
    img: &ImageBuffer,
    kps: Option<&KeypointSet>,
    comp: &ViewComposition,
) -> Result<Option<ImageBuffer>> {
    if let Some(kps) = kps {
        if !has_sufficient_keypoints(kps, img.width(), img.height()) {
            return Ok(None);
        }
    }
    compose_views(img, comp).map(Some)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn skips_when_keypoints_insufficient() {
        let img = ImageBuffer::filled(224, 224, 1, 0).unwrap();
        let mut present = vec![true; NUM_KEYPOINTS];
        present[50] = false;
        let points = vec![(10.0, 10.0); NUM_KEYPOINTS];
        let kps = KeypointSet::new(points, present).unwrap();
        let out = synthesize_aux_view(&img, Some(&kps), &ViewComposition::eye_mouth()).unwrap();
        assert!(out.is_none());
    }

    #[test]
    fn synthesizes_without_keypoints() {
        let img = ImageBuffer::filled(224, 224, 1, 7).unwrap();
        let out = synthesize_aux_view(&img, None, &ViewComposition::eye_mouth_nose())
            .unwrap()
            .unwrap();
        assert_eq!((out.height(), out.width()), (224, 224));
    }
}
