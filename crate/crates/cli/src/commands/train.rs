use std::path::{Path, PathBuf};

use anyhow::Context;
use clap::ValueEnum;
use viewfuse::data::PairedDataset;
use viewfuse::nn::{
    save_checkpoint, train_fusion, AdamConfig, FusionConfig, KeyGenStrategy, TrainConfig,
};

use crate::config::{resolve, FileConfig, CONFIG_KEYS_HELP};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StrategyArg {
    Mean,
    Concat,
    UpdownMean,
    UpdownConcat,
}

impl StrategyArg {
    pub fn to_core(self) -> KeyGenStrategy {
        match self {
            StrategyArg::Mean => KeyGenStrategy::Mean,
            StrategyArg::Concat => KeyGenStrategy::Concat,
            StrategyArg::UpdownMean => KeyGenStrategy::UpDownMean,
            StrategyArg::UpdownConcat => KeyGenStrategy::UpDownConcat,
        }
    }
}

#[derive(Debug, clap::Args)]
#[command(after_help = CONFIG_KEYS_HELP)]
pub struct Args {
    /// Main-view embedding file
    #[arg(long, value_name = "PATH")]
    main: PathBuf,

    /// Auxiliary-view embedding file (joined on sample_id)
    #[arg(long, value_name = "PATH")]
    aux: PathBuf,

    /// Where to write the trained checkpoint
    #[arg(long, value_name = "PATH")]
    checkpoint: PathBuf,

    /// Optional per-iteration loss curve (CSV: iter,loss)
    #[arg(long, value_name = "PATH")]
    loss_csv: Option<PathBuf>,

    /// Key-generator strategy
    #[arg(long, value_enum)]
    strategy: Option<StrategyArg>,

    /// Attention heads (must divide the embedding dimension)
    #[arg(long, value_name = "N")]
    heads: Option<usize>,

    /// Training iterations
    #[arg(long, value_name = "N")]
    iters: Option<usize>,

    /// Mini-batch size
    #[arg(long, value_name = "N")]
    batch: Option<usize>,

    /// Adam learning rate
    #[arg(long, value_name = "LR")]
    lr: Option<f64>,

    /// PRNG seed (init and shuffling)
    #[arg(long, value_name = "SEED")]
    seed: Option<u64>,
}

pub fn write_loss_csv(path: &Path, losses: &[f64]) -> anyhow::Result<()> {
    crate::config::write_atomic(path, |tmp| {
        let mut body = String::from("iter,loss\n");
        for (i, loss) in losses.iter().enumerate() {
            body.push_str(&format!("{},{loss}\n", i + 1));
        }
        std::fs::write(tmp, body)?;
        Ok(())
    })
    .with_context(|| format!("writing loss curve {}", path.display()))
}

pub fn run(args: Args, file_cfg: &FileConfig) -> anyhow::Result<()> {
    let strategy = match args.strategy {
        Some(s) => s.to_core(),
        None => match &file_cfg.train.strategy {
            Some(name) => KeyGenStrategy::parse(name)?,
            None => KeyGenStrategy::Concat,
        },
    };
    let heads = resolve(args.heads, file_cfg.train.heads, 2);
    let iters = resolve(args.iters, file_cfg.train.iters, 100);
    let batch = resolve(args.batch, file_cfg.train.batch, 512);
    let lr = resolve(args.lr, file_cfg.train.lr, 1e-4);
    let seed = resolve(args.seed, file_cfg.seed, 0);

    let main_ds = super::load_dataset(&args.main)?;
    let aux_ds = super::load_dataset(&args.aux)?;
    let dim = main_ds.dim();
    let (paired, report) = PairedDataset::join(main_ds, aux_ds)?;
    println!("{report}");

    let model_cfg = FusionConfig {
        dim,
        n_heads: heads,
        strategy,
    };
    let train_cfg = TrainConfig {
        iters,
        batch,
        adam: AdamConfig::with_lr(lr),
        seed,
    };
    let result = train_fusion(&paired, &model_cfg, &train_cfg)?;

    crate::config::write_atomic(&args.checkpoint, |tmp| {
        save_checkpoint(tmp, &result.model)?;
        Ok(())
    })
    .with_context(|| format!("writing checkpoint {}", args.checkpoint.display()))?;
    if let Some(path) = &args.loss_csv {
        write_loss_csv(path, &result.losses)?;
    }

    let first = result.losses.first().copied().unwrap_or(f64::NAN);
    let last = result.losses.last().copied().unwrap_or(f64::NAN);
    println!(
        "trained {strategy} (dim {dim}, {heads} heads) for {iters} iters: \
         loss {first:.4} -> {last:.4}"
    );
    println!("checkpoint: {}", args.checkpoint.display());
    Ok(())
}
