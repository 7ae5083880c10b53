use std::path::PathBuf;

use viewfuse::data::{subset, uniform_class_sample};

use crate::config::{resolve, FileConfig, CONFIG_KEYS_HELP};

#[derive(Debug, clap::Args)]
#[command(after_help = CONFIG_KEYS_HELP)]
pub struct Args {
    /// Embedding file to sample from (binary or CSV)
    #[arg(long, value_name = "PATH")]
    input: PathBuf,

    /// Where to write the balanced subset (.csv for CSV, else binary)
    #[arg(long, value_name = "PATH")]
    output: PathBuf,

    /// Records to draw from every class
    #[arg(long, value_name = "N")]
    per_class: Option<usize>,

    /// PRNG seed
    #[arg(long, value_name = "SEED")]
    seed: Option<u64>,
}

pub fn run(args: Args, file_cfg: &FileConfig) -> anyhow::Result<()> {
    let per_class = resolve(args.per_class, file_cfg.sample.per_class, 100);
    let seed = resolve(args.seed, file_cfg.seed, 0);
    let ds = super::load_dataset(&args.input)?;
    let indices = uniform_class_sample(&ds, per_class, seed)?;
    let sub = subset(&ds, &indices)?;
    super::save_dataset(&args.output, &sub)?;
    println!(
        "sampled {} records ({per_class} per class, seed {seed}) from {} into {}",
        sub.len(),
        args.input.display(),
        args.output.display()
    );
    Ok(())
}
