use std::path::{Path, PathBuf};
use std::sync::Mutex;

use anyhow::Context;
use clap::ValueEnum;
use rayon::prelude::*;
use viewfuse::synthesis::{
    load_image, read_keypoint_manifest, save_png, synthesize_aux_view, write_synthesis_manifest,
    KeypointRecord, SynthesisRecord, SynthesisStats, ViewComposition,
};

use crate::config::{FileConfig, CONFIG_KEYS_HELP};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CompositionArg {
    /// Eye strip over mouth strip
    EyeMouth,
    /// Eye, mouth, and nose strips
    EyeMouthNose,
}

impl CompositionArg {
    fn to_composition(self) -> ViewComposition {
        match self {
            CompositionArg::EyeMouth => ViewComposition::eye_mouth(),
            CompositionArg::EyeMouthNose => ViewComposition::eye_mouth_nose(),
        }
    }

    fn parse_name(name: &str) -> anyhow::Result<Self> {
        Self::from_str(name, true).map_err(|e| anyhow::anyhow!("composition {name:?}: {e}"))
    }
}

#[derive(Debug, clap::Args)]
#[command(after_help = CONFIG_KEYS_HELP)]
pub struct Args {
    /// Keypoint manifest (JSON lines: image, points, optional present/label)
    #[arg(long, value_name = "PATH")]
    manifest: PathBuf,

    /// Directory image paths in the manifest are relative to
    /// (default: the manifest's directory)
    #[arg(long, value_name = "DIR")]
    image_root: Option<PathBuf>,

    /// Directory for the synthesized auxiliary view images
    #[arg(long, value_name = "DIR")]
    out_dir: PathBuf,

    /// Output manifest path (default: <out-dir>/synthesis.jsonl)
    #[arg(long, value_name = "PATH")]
    out_manifest: Option<PathBuf>,

    /// Region stack for the auxiliary view
    #[arg(long, value_enum)]
    composition: Option<CompositionArg>,

    /// Skip the keypoint screening and crop every image
    #[arg(long)]
    no_screening: bool,
}

enum Outcome {
    Synthesized(SynthesisRecord),
    Skipped,
    Failed(String),
}

fn process_record(
    rec: &KeypointRecord,
    image_root: &Path,
    out_dir: &Path,
    comp: &ViewComposition,
    screen: bool,
) -> Outcome {
    let image_path = image_root.join(&rec.image);
    let run = || -> anyhow::Result<Option<SynthesisRecord>> {
        let img = load_image(&image_path)?;
        let kps = if screen { Some(rec.keypoints()?) } else { None };
        let Some(aux) = synthesize_aux_view(&img, kps.as_ref(), comp)? else {
            return Ok(None);
        };
        let stem = image_path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "frame".to_string());
        let aux_path = out_dir.join(format!("{stem}_aux.png"));
        save_png(&aux, &aux_path)?;
        Ok(Some(SynthesisRecord {
            sample_id: stem,
            main: image_path.display().to_string(),
            aux: aux_path.display().to_string(),
            label: rec.label,
        }))
    };
    match run() {
        Ok(Some(record)) => Outcome::Synthesized(record),
        Ok(None) => Outcome::Skipped,
        Err(e) => Outcome::Failed(format!("{}: {e:#}", rec.image)),
    }
}

pub fn run(args: Args, file_cfg: &FileConfig, threads: Option<usize>) -> anyhow::Result<()> {
    let comp = match args.composition {
        Some(c) => c,
        None => match &file_cfg.synthesize.composition {
            Some(name) => CompositionArg::parse_name(name)?,
            None => CompositionArg::EyeMouthNose,
        },
    }
    .to_composition();

    let records = read_keypoint_manifest(&args.manifest)
        .with_context(|| format!("reading manifest {}", args.manifest.display()))?;
    let image_root = args
        .image_root
        .clone()
        .or_else(|| args.manifest.parent().map(Path::to_path_buf))
        .unwrap_or_else(|| PathBuf::from("."));
    std::fs::create_dir_all(&args.out_dir)
        .with_context(|| format!("creating {}", args.out_dir.display()))?;
    let out_manifest = args
        .out_manifest
        .clone()
        .unwrap_or_else(|| args.out_dir.join("synthesis.jsonl"));

    let failures: Mutex<Vec<String>> = Mutex::new(Vec::new());
    let screen = !args.no_screening;
    let work = |rec: &KeypointRecord| process_record(rec, &image_root, &args.out_dir, &comp, screen);
    let outcomes: Vec<Outcome> = match threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .context("building thread pool")?
            .install(|| records.par_iter().map(work).collect()),
        None => records.par_iter().map(work).collect(),
    };

    let mut stats = SynthesisStats {
        total: records.len(),
        ..Default::default()
    };
    let mut out_records = Vec::new();
    for outcome in outcomes {
        match outcome {
            Outcome::Synthesized(rec) => {
                stats.synthesized += 1;
                out_records.push(rec);
            }
            Outcome::Skipped => stats.skipped_keypoints += 1,
            Outcome::Failed(msg) => {
                stats.failed += 1;
                failures.lock().unwrap().push(msg);
            }
        }
    }

    crate::config::write_atomic(&out_manifest, |tmp| {
        write_synthesis_manifest(tmp, &out_records)?;
        Ok(())
    })
    .with_context(|| format!("writing manifest {}", out_manifest.display()))?;

    for msg in failures.lock().unwrap().iter() {
        eprintln!("failed: {msg}");
    }
    println!("{stats}");
    println!("manifest: {}", out_manifest.display());
    Ok(())
}
