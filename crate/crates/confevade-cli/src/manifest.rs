//! Run manifests: every output file gets a sibling `<name>.manifest.json`
//! recording the command, its full argument vector, the resolved seed and
//! digests of all inputs. `confevade rerun <manifest>` replays the recorded
//! arguments and reproduces the outputs byte for byte.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use confevade::Result;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InputDigest {
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub argv: Vec<String>,
    pub seed: u64,
    pub inputs: Vec<InputDigest>,
    pub outputs: Vec<String>,
}

fn sha256_file(path: &Path) -> Result<String> {
    let bytes = std::fs::read(path)?;
    let digest = Sha256::digest(&bytes);
    Ok(hex::encode(digest))
}

/// Writes one manifest next to every output file of a command run.
pub fn emit(
    command: &str,
    argv: &[String],
    seed: u64,
    inputs: &[PathBuf],
    outputs: &[PathBuf],
) -> Result<()> {
    let digests = inputs
        .iter()
        .map(|path| {
            Ok(InputDigest {
                path: path.display().to_string(),
                sha256: sha256_file(path)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let manifest = RunManifest {
        tool: "confevade".to_string(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        command: command.to_string(),
        argv: argv.to_vec(),
        seed,
        inputs: digests,
        outputs: outputs.iter().map(|p| p.display().to_string()).collect(),
    };
    let mut text = serde_json::to_string_pretty(&manifest).map_err(confevade::Error::from)?;
    text.push('\n');
    for output in outputs {
        let mut path = output.clone().into_os_string();
        path.push(".manifest.json");
        std::fs::write(path, &text)?;
    }
    Ok(())
}

pub fn load(path: &Path) -> Result<RunManifest> {
    let text = std::fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(confevade::Error::from)
}
