use crate::error::{Error, Result};
use crate::synthesis::image::{resize_bilinear, ImageBuffer};

/// Facial region a fractional crop targets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RegionName {
    Eye,
    Mouth,
    Nose,
}

impl RegionName {
    pub fn as_str(&self) -> &'static str {
        match self {
            RegionName::Eye => "eye",
            RegionName::Mouth => "mouth",
            RegionName::Nose => "nose",
        }
    }
}

impl std::fmt::Display for RegionName {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Fractional crop window over a face image.
///
/// `w_lo..w_hi` and `h_lo..h_hi` are fractions of the image width and height.
/// Pixel bounds are `floor(frac * dim)` with an end-exclusive upper edge.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegionSpec {
    pub name: RegionName,
    pub w_lo: f64,
    pub w_hi: f64,
    pub h_lo: f64,
    pub h_hi: f64,
}

impl RegionSpec {
    pub fn new(name: RegionName, w_lo: f64, w_hi: f64, h_lo: f64, h_hi: f64) -> Result<Self> {
        let ok = |lo: f64, hi: f64| lo.is_finite() && hi.is_finite() && (0.0..hi).contains(&lo) && hi <= 1.0;
        if !ok(w_lo, w_hi) || !ok(h_lo, h_hi) {
            return Err(Error::InvalidRegion {
                name: name.as_str().to_string(),
            });
        }
        Ok(RegionSpec {
            name,
            w_lo,
            w_hi,
            h_lo,
            h_hi,
        })
    }

    /// Both-eyes band: middle 60% of the width, 35% to 55% of the height.
    pub fn eye() -> Self {
        RegionSpec {
            name: RegionName::Eye,
            w_lo: 0.2,
            w_hi: 0.8,
            h_lo: 0.35,
            h_hi: 0.55,
        }
    }

    /// Mouth band: middle 60% of the width, 70% to 90% of the height.
    pub fn mouth() -> Self {
        RegionSpec {
            name: RegionName::Mouth,
            w_lo: 0.2,
            w_hi: 0.8,
            h_lo: 0.7,
            h_hi: 0.9,
        }
    }

    /// Nose band: middle 20% of the width, 20% to 80% of the height.
    pub fn nose() -> Self {
        RegionSpec {
            name: RegionName::Nose,
            w_lo: 0.4,
            w_hi: 0.6,
            h_lo: 0.2,
            h_hi: 0.8,
        }
    }

    /// Pixel row range `[start, end)` for an image of the given height.
    pub fn row_bounds(&self, height: usize) -> (usize, usize) {
        let start = (self.h_lo * height as f64).floor() as usize;
        let end = (self.h_hi * height as f64).floor() as usize;
        (start, end)
    }

    /// Pixel column range `[start, end)` for an image of the given width.
    pub fn col_bounds(&self, width: usize) -> (usize, usize) {
        let start = (self.w_lo * width as f64).floor() as usize;
        let end = (self.w_hi * width as f64).floor() as usize;
        (start, end)
    }
}

/// Extracts the pixel window a region spec selects.
///
/// Fails with [`Error::EmptyCrop`] when the floored bounds collapse to zero
/// rows or columns, which happens for very small source images.
pub fn crop_region(img: &ImageBuffer, spec: &RegionSpec) -> Result<ImageBuffer> {
    let (r0, r1) = spec.row_bounds(img.height());
    let (c0, c1) = spec.col_bounds(img.width());
    if r1 <= r0 || c1 <= c0 {
        return Err(Error::EmptyCrop {
            region: spec.name.as_str().to_string(),
            height: img.height(),
            width: img.width(),
        });
    }
    let (h, w, c) = (r1 - r0, c1 - c0, img.channels());
    let mut data = Vec::with_capacity(h * w * c);
    for y in r0..r1 {
        for x in c0..c1 {
            for ch in 0..c {
                data.push(img.pixel(y, x, ch));
            }
        }
    }
    ImageBuffer::new(h, w, c, data)
}

/// Ordered list of regions stacked top-to-bottom into one auxiliary view.
#[derive(Debug, Clone, PartialEq)]
pub struct ViewComposition {
    regions: Vec<RegionSpec>,
    pub out_height: usize,
    pub out_width: usize,
}

impl ViewComposition {
    pub fn new(regions: Vec<RegionSpec>, out_height: usize, out_width: usize) -> Result<Self> {
        if regions.is_empty() {
            return Err(Error::InvalidComposition("no regions".to_string()));
        }
        if out_height == 0 || out_width == 0 {
            return Err(Error::InvalidComposition(format!(
                "zero output size: {out_height}x{out_width}"
            )));
        }
        Ok(ViewComposition {
            regions,
            out_height,
            out_width,
        })
    }

    /// Eye strip over mouth strip, resized to 224x224.
    pub fn eye_mouth() -> Self {
        ViewComposition {
            regions: vec![RegionSpec::eye(), RegionSpec::mouth()],
            out_height: 224,
            out_width: 224,
        }
    }

    /// Eye, mouth, and nose strips, resized to 224x224.
    pub fn eye_mouth_nose() -> Self {
        ViewComposition {
            regions: vec![RegionSpec::eye(), RegionSpec::mouth(), RegionSpec::nose()],
            out_height: 224,
            out_width: 224,
        }
    }

    pub fn regions(&self) -> &[RegionSpec] {
        &self.regions
    }
}

/// Crops every region, stacks the strips vertically, and resizes the stack to
/// the composition's output size.
///
/// Each strip is first resized to the output width, with its height scaled by
/// the same factor (rounded, at least one row) so region proportions survive
/// the stacking.
pub fn compose_views(img: &ImageBuffer, comp: &ViewComposition) -> Result<ImageBuffer> {
    let channels = img.channels();
    let mut strips = Vec::with_capacity(comp.regions.len());
    for spec in &comp.regions {
        let crop = crop_region(img, spec)?;
        let scaled_h = ((crop.height() as f64 * comp.out_width as f64 / crop.width() as f64)
            .round() as usize)
            .max(1);
        strips.push(resize_bilinear(&crop, scaled_h, comp.out_width)?);
    }
    let stack_h: usize = strips.iter().map(|s| s.height()).sum();
    let mut data = Vec::with_capacity(stack_h * comp.out_width * channels);
    for strip in &strips {
        data.extend_from_slice(strip.data());
    }
    let stacked = ImageBuffer::new(stack_h, comp.out_width, channels, data)?;
    resize_bilinear(&stacked, comp.out_height, comp.out_width)
}
