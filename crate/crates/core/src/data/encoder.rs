use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::data::record::EmbeddingRecord;
use crate::error::Result;
use crate::label::ExpressionClass;
use crate::synthesis::image::{resize_bilinear, ImageBuffer};

/// Grid the encoder downsamples to before projecting.
const GRID: usize = 16;

/// Fixed random projection standing in for a learned backbone.
///
/// Images are resized to a 16x16 grayscale grid, scaled to [0, 1], and mapped
/// through one seeded linear layer. The same seed always produces the same
/// embedding for the same pixels, which is all the rest of the pipeline needs.
#[derive(Debug, Clone)]
pub struct ToyEncoder {
    dim: usize,
    weights: Vec<f64>,
    bias: Vec<f64>,
}

impl ToyEncoder {
    pub fn seeded(dim: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let fan_in = GRID * GRID;
        let bound = 1.0 / (fan_in as f64).sqrt();
        let weights = (0..dim * fan_in)
            .map(|_| rng.random_range(-bound..bound))
            .collect();
        let bias = (0..dim).map(|_| rng.random_range(-bound..bound)).collect();
        ToyEncoder { dim, weights, bias }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Embeds one image.
    pub fn encode(&self, img: &ImageBuffer) -> Result<Vec<f32>> {
        let small = resize_bilinear(img, GRID, GRID)?;
        let c = small.channels();
        let mut x = [0f64; GRID * GRID];
        for (i, px) in x.iter_mut().enumerate() {
            let base = i * c;
            let sum: u32 = small.data()[base..base + c].iter().map(|&v| v as u32).sum();
            *px = sum as f64 / (c as f64 * 255.0);
        }
        let fan_in = GRID * GRID;
        let out = (0..self.dim)
            .map(|j| {
                let row = &self.weights[j * fan_in..(j + 1) * fan_in];
                let dot: f64 = row.iter().zip(&x).map(|(w, v)| w * v).sum();
                (dot + self.bias[j]) as f32
            })
            .collect();
        Ok(out)
    }

    /// Embeds one image and wraps it with its identity fields.
    pub fn encode_record(
        &self,
        img: &ImageBuffer,
        sample_id: &str,
        video_id: &str,
        frame_index: u32,
        label: ExpressionClass,
    ) -> Result<EmbeddingRecord> {
        Ok(EmbeddingRecord {
            sample_id: sample_id.to_string(),
            video_id: video_id.to_string(),
            frame_index,
            label,
            vector: self.encode(img)?,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_embedding() {
        let img = ImageBuffer::new(8, 8, 1, (0..64).map(|i| (i * 4) as u8).collect()).unwrap();
        let a = ToyEncoder::seeded(8, 3).encode(&img).unwrap();
        let b = ToyEncoder::seeded(8, 3).encode(&img).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 8);
    }

    #[test]
    fn different_pixels_embed_differently() {
        let enc = ToyEncoder::seeded(8, 3);
        let dark = ImageBuffer::filled(8, 8, 1, 10).unwrap();
        let bright = ImageBuffer::filled(8, 8, 1, 240).unwrap();
        assert_ne!(enc.encode(&dark).unwrap(), enc.encode(&bright).unwrap());
    }

    #[test]
    fn handles_rgb_and_any_size() {
        let enc = ToyEncoder::seeded(4, 0);
        let img = ImageBuffer::filled(480, 640, 3, 128).unwrap();
        assert_eq!(enc.encode(&img).unwrap().len(), 4);
    }
}
