//! Output-directory handling: artifact writing, the run manifest, and the
//! end-of-run self-check that re-validates every emitted JSONL line.

use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::config::Settings;

pub struct OutDir {
    root: PathBuf,
    files: Vec<String>,
}

impl OutDir {
    pub fn create(settings: &Settings) -> Result<Self> {
        std::fs::create_dir_all(&settings.out_dir)
            .with_context(|| format!("creating output directory {}", settings.out_dir.display()))?;
        Ok(OutDir { root: settings.out_dir.clone(), files: Vec::new() })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.root.join(name)
    }

    pub fn write_text(&mut self, name: &str, content: &str) -> Result<()> {
        std::fs::write(self.path(name), content)
            .with_context(|| format!("writing {name}"))?;
        self.files.push(name.to_string());
        Ok(())
    }

    pub fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        let mut body = serde_json::to_string_pretty(value)?;
        body.push('\n');
        self.write_text(name, &body)
    }

    /// Writes JSONL and immediately re-reads it against the same schema,
    /// so a malformed line can never leave the run silently.
    pub fn write_jsonl_checked<T: Serialize + DeserializeOwned>(
        &mut self,
        name: &str,
        items: &[T],
    ) -> Result<()> {
        let path = self.path(name);
        cliff_core::corpus::write_jsonl(&path, items)
            .with_context(|| format!("writing {name}"))?;
        let reread: Vec<T> = cliff_core::corpus::read_jsonl(&path)
            .with_context(|| format!("self-check failed re-reading {name}"))?;
        if reread.len() != items.len() {
            anyhow::bail!(
                "self-check failed for {name}: wrote {} records, re-read {}",
                items.len(),
                reread.len()
            );
        }
        self.files.push(name.to_string());
        Ok(())
    }

    /// Writes `manifest.json` recording the command, resolved-config hash,
    /// seed, tool version, and artifact list. Contains nothing volatile, so
    /// reruns with the same inputs are byte-identical.
    pub fn finish(mut self, command: &str, settings: &Settings) -> Result<()> {
        #[derive(Serialize)]
        struct Manifest<'a> {
            tool: &'a str,
            version: &'a str,
            command: &'a str,
            seed: u64,
            config_hash: String,
            files: &'a [String],
        }
        let mut files = std::mem::take(&mut self.files);
        files.sort();
        let manifest = Manifest {
            tool: "cliff",
            version: env!("CARGO_PKG_VERSION"),
            command,
            seed: settings.seed,
            config_hash: settings.config_hash(),
            files: &files,
        };
        let mut body = serde_json::to_string_pretty(&manifest)?;
        body.push('\n');
        std::fs::write(self.path("manifest.json"), body).context("writing manifest.json")?;
        Ok(())
    }
}
