use std::path::PathBuf;

use anyhow::Context;
use viewfuse::eval::{evaluate_frames, read_predictions_csv, EvalReport};

use crate::config::CONFIG_KEYS_HELP;

#[derive(Debug, clap::Args)]
#[command(after_help = CONFIG_KEYS_HELP)]
pub struct Args {
    /// Prediction CSV with a ground-truth column
    #[arg(long, value_name = "PATH")]
    input: PathBuf,

    /// Optional CSV copy of the metric row
    #[arg(long, value_name = "PATH")]
    output: Option<PathBuf>,
}

pub fn run(args: Args) -> anyhow::Result<()> {
    let frames = read_predictions_csv(&args.input)
        .with_context(|| format!("reading predictions {}", args.input.display()))?;
    let cm = evaluate_frames(&frames)?;
    let report = EvalReport::from_confusion(&cm);
    println!("{report}");
    if let Some(path) = &args.output {
        crate::config::write_atomic(path, |tmp| {
            report.write_csv(tmp)?;
            Ok(())
        })
        .with_context(|| format!("writing report {}", path.display()))?;
        println!("report: {}", path.display());
    }
    Ok(())
}
