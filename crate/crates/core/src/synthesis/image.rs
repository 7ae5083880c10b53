use crate::error::{Error, Result};

/// 8-bit image with 1 (grayscale) or 3 (RGB) channels, row-major storage.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ImageBuffer {
    height: usize,
    width: usize,
    channels: usize,
    data: Vec<u8>,
}

impl ImageBuffer {
    pub fn new(height: usize, width: usize, channels: usize, data: Vec<u8>) -> Result<Self> {
        if height == 0 || width == 0 {
            return Err(Error::InvalidImage(format!(
                "zero dimension: {height}x{width}"
            )));
        }
        if channels != 1 && channels != 3 {
            return Err(Error::InvalidImage(format!(
                "unsupported channel count {channels}"
            )));
        }
        let expected = height * width * channels;
        if data.len() != expected {
            return Err(Error::InvalidImage(format!(
                "data length {} does not match {height}x{width}x{channels}",
                data.len()
            )));
        }
        Ok(ImageBuffer {
            height,
            width,
            channels,
            data,
        })
    }

    /// Constant-valued image.
    pub fn filled(height: usize, width: usize, channels: usize, value: u8) -> Result<Self> {
        Self::new(height, width, channels, vec![value; height * width * channels])
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn data(&self) -> &[u8] {
        &self.data
    }

    pub fn pixel(&self, y: usize, x: usize, channel: usize) -> u8 {
        self.data[(y * self.width + x) * self.channels + channel]
    }
}

/// Bilinear resampling with corner-aligned pixel centers.
///
/// Output pixel `i` samples the source at `i * (in - 1) / (out - 1)`, so the
/// first and last pixels of each axis map exactly onto the source corners and
/// resizing to the same size reproduces the input byte for byte. Interpolated
/// values are rounded half away from zero. A single-pixel output axis samples
/// the source midpoint.
pub fn resize_bilinear(img: &ImageBuffer, out_h: usize, out_w: usize) -> Result<ImageBuffer> {
    if out_h == 0 || out_w == 0 {
        return Err(Error::InvalidImage(format!(
            "zero resize target: {out_h}x{out_w}"
        )));
    }
    let (h, w, c) = (img.height, img.width, img.channels);
    let src = |i: usize, in_len: usize, out_len: usize| -> f64 {
        if out_len == 1 {
            (in_len - 1) as f64 / 2.0
        } else {
            i as f64 * (in_len - 1) as f64 / (out_len - 1) as f64
        }
    };

    let mut data = Vec::with_capacity(out_h * out_w * c);
    for oy in 0..out_h {
        let sy = src(oy, h, out_h);
        let y0 = sy.floor() as usize;
        let y1 = (y0 + 1).min(h - 1);
        let fy = sy - y0 as f64;
        for ox in 0..out_w {
            let sx = src(ox, w, out_w);
            let x0 = sx.floor() as usize;
            let x1 = (x0 + 1).min(w - 1);
            let fx = sx - x0 as f64;
            for ch in 0..c {
                let p00 = img.pixel(y0, x0, ch) as f64;
                let p01 = img.pixel(y0, x1, ch) as f64;
                let p10 = img.pixel(y1, x0, ch) as f64;
                let p11 = img.pixel(y1, x1, ch) as f64;
                let top = p00 + (p01 - p00) * fx;
                let bottom = p10 + (p11 - p10) * fx;
                let value = top + (bottom - top) * fy;
                data.push(value.round().clamp(0.0, 255.0) as u8);
            }
        }
    }
    ImageBuffer::new(out_h, out_w, c, data)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_image_stays_constant() {
        let img = ImageBuffer::filled(2, 2, 1, 100).unwrap();
        for (oh, ow) in [(1, 1), (3, 3), (7, 5), (224, 224)] {
            let out = resize_bilinear(&img, oh, ow).unwrap();
            assert!(out.data().iter().all(|&p| p == 100), "{oh}x{ow}");
        }
    }

    #[test]
    fn identity_resize_is_byte_identical() {
        let data: Vec<u8> = (0..5 * 4 * 3).map(|i| (i * 7 % 256) as u8).collect();
        let img = ImageBuffer::new(5, 4, 3, data).unwrap();
        let out = resize_bilinear(&img, 5, 4).unwrap();
        assert_eq!(out, img);
    }

    #[test]
    fn upsamples_midpoint() {
        // 2x1 column [0, 255] -> 3x1 samples at source rows 0, 0.5, 1.
        let img = ImageBuffer::new(2, 1, 1, vec![0, 255]).unwrap();
        let out = resize_bilinear(&img, 3, 1).unwrap();
        assert_eq!(out.data(), &[0, 128, 255]);
    }

    #[test]
    fn rejects_bad_buffers() {
        assert!(ImageBuffer::new(0, 4, 1, vec![]).is_err());
        assert!(ImageBuffer::new(2, 2, 2, vec![0; 8]).is_err());
        assert!(ImageBuffer::new(2, 2, 1, vec![0; 3]).is_err());
    }
}
