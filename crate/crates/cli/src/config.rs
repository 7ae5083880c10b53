use std::path::{Path, PathBuf};

use anyhow::Context;
use serde::Deserialize;

/// Help appendix describing every key the TOML config file understands.
/// Command-line flags always override config values.
pub const CONFIG_KEYS_HELP: &str = "\
Config file keys (TOML; flags override config, config overrides defaults):
  seed                 integer   PRNG seed shared by all seeded commands
  threads              integer   worker threads for synthesize

  [synthesize]
  composition          string    \"eye-mouth\" or \"eye-mouth-nose\"

  [sample]
  per_class            integer   records drawn per class

  [train]
  strategy             string    mean | concat | updown-mean | updown-concat
  heads                integer   attention heads (must divide the data dim)
  iters                integer   training iterations
  batch                integer   mini-batch size
  lr                   float     Adam learning rate

  [smooth]
  window               integer   smoothing window size
  logits_mean          boolean   average logits instead of label majority";

/// On-disk configuration; every field optional so flags and defaults fill in.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub seed: Option<u64>,
    pub threads: Option<usize>,
    #[serde(default)]
    pub synthesize: SynthesizeSection,
    #[serde(default)]
    pub sample: SampleSection,
    #[serde(default)]
    pub train: TrainSection,
    #[serde(default)]
    pub smooth: SmoothSection,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SynthesizeSection {
    pub composition: Option<String>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SampleSection {
    pub per_class: Option<usize>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrainSection {
    pub strategy: Option<String>,
    pub heads: Option<usize>,
    pub iters: Option<usize>,
    pub batch: Option<usize>,
    pub lr: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SmoothSection {
    pub window: Option<usize>,
    pub logits_mean: Option<bool>,
}

impl FileConfig {
    pub fn load(path: Option<&PathBuf>) -> anyhow::Result<Self> {
        let Some(path) = path else {
            return Ok(FileConfig::default());
        };
        let body = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        toml::from_str(&body).with_context(|| format!("parsing config {}", path.display()))
    }
}

/// Flag beats config beats built-in default.
pub fn resolve<T: Copy>(flag: Option<T>, config: Option<T>, default: T) -> T {
    flag.or(config).unwrap_or(default)
}

/// Writes `bytes` to `path` atomically: a temp file in the same directory is
/// filled first and renamed over the target, so readers never see a partial
/// file.
pub fn write_atomic(path: &Path, write: impl FnOnce(&Path) -> anyhow::Result<()>) -> anyhow::Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let tmp = tempfile::NamedTempFile::new_in(dir)
        .with_context(|| format!("creating temp file beside {}", path.display()))?;
    write(tmp.path())?;
    tmp.persist(path)
        .with_context(|| format!("replacing {}", path.display()))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn missing_config_is_default() {
        let cfg = FileConfig::load(None).unwrap();
        assert!(cfg.seed.is_none());
        assert!(cfg.train.strategy.is_none());
    }

    #[test]
    fn parses_sections() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("viewfuse.toml");
        std::fs::write(
            &path,
            "seed = 7\n[train]\nstrategy = \"updown-mean\"\nlr = 0.05\n[smooth]\nwindow = 9\n",
        )
        .unwrap();
        let cfg = FileConfig::load(Some(&path)).unwrap();
        assert_eq!(cfg.seed, Some(7));
        assert_eq!(cfg.train.strategy.as_deref(), Some("updown-mean"));
        assert_eq!(cfg.train.lr, Some(0.05));
        assert_eq!(cfg.smooth.window, Some(9));
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.toml");
        std::fs::write(&path, "sede = 7\n").unwrap();
        assert!(FileConfig::load(Some(&path)).is_err());
    }

    #[test]
    fn precedence_is_flag_config_default() {
        assert_eq!(resolve(Some(1), Some(2), 3), 1);
        assert_eq!(resolve(None::<u64>, Some(2), 3), 2);
        assert_eq!(resolve(None::<u64>, None, 3), 3);
    }

    #[test]
    fn atomic_write_replaces_whole_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("out.txt");
        std::fs::write(&path, "old").unwrap();
        write_atomic(&path, |tmp| {
            std::fs::write(tmp, "new contents")?;
            Ok(())
        })
        .unwrap();
        assert_eq!(std::fs::read_to_string(&path).unwrap(), "new contents");
    }
}
