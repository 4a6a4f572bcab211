//! Corpus directories: a `manifest` plus category files.
//!
//! ```text
//! corpus default
//! categories categories.cat      # relative to the directory, repeatable
//! base 1 2 I D2 P BZ2 G2         # functors among these make up the corpus
//! fault broken-cleavage          # optional
//! ```

use std::path::{Path, PathBuf};
use std::sync::Arc;

use anyhow::{anyhow, bail, Context, Result};
use folkengine_core::corpus::{default_corpus, Corpus};
use folkengine_core::fincat::FinCat;

use crate::text::{Item, Workspace};

pub const ENV_VAR: &str = "FOLKENGINE_CORPUS";

/// Categories and manifest data, before the functors are enumerated.
#[derive(Clone, Debug)]
pub struct CorpusSource {
    pub name: String,
    pub categories: Vec<Arc<FinCat>>,
    pub base: Vec<Arc<FinCat>>,
    pub broken_cleavage: bool,
    /// `None` for the built-in corpus
    pub dir: Option<PathBuf>,
}

impl CorpusSource {
    pub fn builtin() -> CorpusSource {
        let c = default_corpus();
        CorpusSource { name: c.name, categories: c.categories, base: c.functor_base, broken_cleavage: false, dir: None }
    }

    pub fn build(&self) -> Corpus {
        let mut c = Corpus::new(self.name.clone(), self.categories.clone(), self.base.clone());
        c.broken_cleavage = self.broken_cleavage;
        c
    }

    pub fn workspace(&self) -> Workspace {
        Workspace::with_categories(&self.categories)
    }
}

pub fn load_dir(dir: &Path) -> Result<CorpusSource> {
    let manifest = dir.join("manifest");
    let text = std::fs::read_to_string(&manifest).with_context(|| format!("reading {}", manifest.display()))?;
    let mut name = None;
    let mut ws = Workspace::new();
    let mut categories: Vec<Arc<FinCat>> = Vec::new();
    let mut base_names: Vec<(String, usize)> = Vec::new();
    let mut broken_cleavage = false;
    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let toks: Vec<&str> = raw.split('#').next().unwrap_or("").split_whitespace().collect();
        let at = || format!("{}:{line}", manifest.display());
        match toks.as_slice() {
            [] => {}
            ["corpus", n] => name = Some(n.to_string()),
            ["categories", file] => {
                let path = dir.join(file);
                let body = std::fs::read_to_string(&path).with_context(|| format!("{}: reading {}", at(), path.display()))?;
                let doc = ws.load(&body).map_err(|d| anyhow!("{}:{d}", path.display()))?;
                for item in doc.items {
                    if let Item::Category(c) = item {
                        if categories.iter().any(|e| e.name() == c.name()) {
                            bail!("{}: category {} listed twice", at(), c.name());
                        }
                        categories.push(c);
                    }
                }
            }
            ["base", names @ ..] => base_names.extend(names.iter().map(|n| (n.to_string(), line))),
            ["fault", "broken-cleavage"] => broken_cleavage = true,
            ["fault", other] => bail!("{}: unknown fault {other}", at()),
            _ => bail!("{}: expected corpus, categories, base or fault", at()),
        }
    }
    let base = base_names
        .iter()
        .map(|(n, line)| {
            categories
                .iter()
                .find(|c| c.name() == n)
                .cloned()
                .ok_or_else(|| anyhow!("{}:{line}: base category {n} is not in the corpus", manifest.display()))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CorpusSource {
        name: name.ok_or_else(|| anyhow!("{}: no corpus line", manifest.display()))?,
        categories,
        base,
        broken_cleavage,
        dir: Some(dir.to_path_buf()),
    })
}

/// The directory named by the environment, else the checked-in default
/// corpus, else the built-in one.
pub fn load_default() -> Result<CorpusSource> {
    if let Some(dir) = std::env::var_os(ENV_VAR) {
        return load_dir(Path::new(&dir)).with_context(|| format!("loading the corpus named by {ENV_VAR}"));
    }
    let shipped = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus/default");
    if shipped.join("manifest").is_file() {
        return load_dir(&shipped);
    }
    Ok(CorpusSource::builtin())
}
