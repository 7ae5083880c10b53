use std::path::Path;

use crate::error::{Error, Result};
use crate::synthesis::image::ImageBuffer;

/// Decodes a PNG or JPEG file into an [`ImageBuffer`].
///
/// Grayscale sources stay single-channel; everything else is converted to RGB.
pub fn load_image(path: &Path) -> Result<ImageBuffer> {
    let decoded = image::open(path).map_err(|e| Error::ImageDecode {
        path: path.display().to_string(),
        msg: e.to_string(),
    })?;
    let (h, w) = (decoded.height() as usize, decoded.width() as usize);
    match decoded {
        image::DynamicImage::ImageLuma8(img) => ImageBuffer::new(h, w, 1, img.into_raw()),
        other => {
            let rgb = other.into_rgb8();
            ImageBuffer::new(h, w, 3, rgb.into_raw())
        }
    }
}

/// Writes an [`ImageBuffer`] as a PNG file.
pub fn save_png(img: &ImageBuffer, path: &Path) -> Result<()> {
    let (h, w) = (img.height() as u32, img.width() as u32);
    let color = match img.channels() {
        1 => image::ExtendedColorType::L8,
        _ => image::ExtendedColorType::Rgb8,
    };
    image::save_buffer(path, img.data(), w, h, color).map_err(|e| Error::Format {
        path: path.display().to_string(),
        msg: e.to_string(),
    })
}
