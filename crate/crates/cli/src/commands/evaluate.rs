use std::path::PathBuf;

use anyhow::Context;
use viewfuse::data::PairedDataset;
use viewfuse::eval::{evaluate_frames, write_predictions_csv, EvalReport, FramePrediction};
use viewfuse::nn::{load_checkpoint, predict};

use crate::config::CONFIG_KEYS_HELP;

/// Forward batches are capped at this many pairs to bound memory.
const EVAL_BATCH: usize = 512;

#[derive(Debug, clap::Args)]
#[command(after_help = CONFIG_KEYS_HELP)]
pub struct Args {
    /// Trained checkpoint to evaluate
    #[arg(long, value_name = "PATH")]
    checkpoint: PathBuf,

    /// Main-view embedding file
    #[arg(long, value_name = "PATH")]
    main: PathBuf,

    /// Auxiliary-view embedding file (joined on sample_id)
    #[arg(long, value_name = "PATH")]
    aux: PathBuf,

    /// Where to write the prediction CSV
    #[arg(long, value_name = "PATH")]
    output: PathBuf,

    /// Optional CSV copy of the metric row printed to stdout
    #[arg(long, value_name = "PATH")]
    report: Option<PathBuf>,

    /// Include the eight raw logits per frame
    #[arg(long)]
    with_logits: bool,
}

pub fn run(args: Args) -> anyhow::Result<()> {
    let model = load_checkpoint(&args.checkpoint)
        .with_context(|| format!("loading checkpoint {}", args.checkpoint.display()))?;
    let main_ds = super::load_dataset(&args.main)?;
    let aux_ds = super::load_dataset(&args.aux)?;
    let (paired, report) = PairedDataset::join(main_ds, aux_ds)?;
    println!("{report}");
    if paired.main().dim() != model.dim() {
        anyhow::bail!(
            "checkpoint dim {} does not match embedding dim {}",
            model.dim(),
            paired.main().dim()
        );
    }

    let mut frames = Vec::with_capacity(paired.len());
    let all: Vec<usize> = (0..paired.len()).collect();
    for chunk in all.chunks(EVAL_BATCH) {
        let f_main = super::batch_tensor(paired.main(), chunk);
        let f_aux = super::batch_tensor(paired.aux(), chunk);
        let logits = model.logits(&f_main, &f_aux);
        let preds = predict(&logits);
        for (row, &idx) in chunk.iter().enumerate() {
            let (rec, _) = paired.pair(idx);
            frames.push(FramePrediction {
                video_id: rec.video_id.clone(),
                frame_index: rec.frame_index,
                label: preds[row],
                ground_truth: Some(rec.label.index()),
                logits: args.with_logits.then(|| logits.row(row).to_vec()),
            });
        }
    }

    crate::config::write_atomic(&args.output, |tmp| {
        write_predictions_csv(tmp, &frames)?;
        Ok(())
    })
    .with_context(|| format!("writing predictions {}", args.output.display()))?;
    println!("wrote {} predictions to {}", frames.len(), args.output.display());

    let metrics = EvalReport::from_confusion(&evaluate_frames(&frames)?);
    println!("{metrics}");
    if let Some(path) = &args.report {
        crate::config::write_atomic(path, |tmp| {
            metrics.write_csv(tmp)?;
            Ok(())
        })
        .with_context(|| format!("writing report {}", path.display()))?;
        println!("wrote report to {}", path.display());
    }
    Ok(())
}
