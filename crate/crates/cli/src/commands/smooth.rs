use std::path::PathBuf;

use anyhow::Context;
use viewfuse::eval::{
    read_predictions_csv, sliding_window_smooth, smooth_logits_mean, write_predictions_csv,
};

use crate::config::{resolve, FileConfig, CONFIG_KEYS_HELP};

#[derive(Debug, clap::Args)]
#[command(after_help = CONFIG_KEYS_HELP)]
pub struct Args {
    /// Prediction CSV to smooth
    #[arg(long, value_name = "PATH")]
    input: PathBuf,

    /// Where to write the smoothed predictions
    #[arg(long, value_name = "PATH")]
    output: PathBuf,

    /// Sliding window size (frames)
    #[arg(long, value_name = "K")]
    window: Option<usize>,

    /// Average window logits instead of taking the label majority
    /// (input must carry logit columns)
    #[arg(long)]
    logits_mean: bool,
}

pub fn run(args: Args, file_cfg: &FileConfig) -> anyhow::Result<()> {
    let window = resolve(args.window, file_cfg.smooth.window, 50);
    let logits_mean = args.logits_mean || file_cfg.smooth.logits_mean.unwrap_or(false);

    let frames = read_predictions_csv(&args.input)
        .with_context(|| format!("reading predictions {}", args.input.display()))?;
    let smoothed = if logits_mean {
        smooth_logits_mean(&frames, window)?
    } else {
        sliding_window_smooth(&frames, window)?
    };
    let changed = frames
        .iter()
        .zip(&smoothed)
        .filter(|(a, b)| a.label != b.label)
        .count();

    crate::config::write_atomic(&args.output, |tmp| {
        write_predictions_csv(tmp, &smoothed)?;
        Ok(())
    })
    .with_context(|| format!("writing predictions {}", args.output.display()))?;
    println!(
        "smoothed {} frames (window {window}, {}): {changed} labels changed",
        frames.len(),
        if logits_mean { "logit mean" } else { "label majority" }
    );
    Ok(())
}
