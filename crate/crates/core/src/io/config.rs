use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::heatmap::{DecodeConfig, Dims};
use crate::metrics::ScaleConfig;
use crate::ssr::SsrConfig;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PathsConfig {
    pub heatmaps: Vec<PathBuf>,
    pub reference: Option<PathBuf>,
    pub output: Option<PathBuf>,
}

/// Everything a `refine` run needs, loadable from one JSON file.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub decode: DecodeConfig,
    pub scale: ScaleConfig,
    pub ssr: SsrConfig,
    pub image: Option<Dims>,
    pub paths: PathsConfig,
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        self.decode.validate()?;
        self.scale.validate()?;
        self.ssr.validate()?;
        if let Some(d) = self.image {
            if d.width < 2 || d.height < 2 {
                return Err(Error::InvalidConfig(format!(
                    "image dims must be >= 2, got {}x{}",
                    d.width, d.height
                )));
            }
        }
        Ok(())
    }

    /// Input paths must exist; output paths need not.
    pub fn check_paths(&self) -> Result<()> {
        let inputs = self.paths.heatmaps.iter().chain(self.paths.reference.iter());
        for p in inputs {
            if !p.exists() {
                return Err(Error::io(
                    p,
                    std::io::Error::new(std::io::ErrorKind::NotFound, "no such file"),
                ));
            }
        }
        Ok(())
    }
}

pub fn load_run_config(path: impl AsRef<Path>) -> Result<RunConfig> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let cfg: RunConfig = serde_json::from_str(&text)?;
    cfg.validate()?;
    Ok(cfg)
}
