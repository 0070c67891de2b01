//! The bundled derivation corpus and its manifest.
//!
//! The manifest lists one module per line, `path<TAB>title`, optionally
//! followed by a third tab-separated column naming definitions whose type is
//! an equation proved by `β`. Lines starting with `#` are comments. Entries
//! are ordered so that every module comes after its imports.

use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use cdle_core::conversion::Converter;
use cdle_core::erasure::erase;
use cdle_core::modsys::{def_key, Elaborator, Error};
use cdle_core::reduction::beta_eta_equal;
use cdle_core::syntax::ast::{open, Expr, Name};
use cdle_core::typecheck::Config;
use thiserror::Error as ThisError;

use crate::loader::FsLoader;

pub const CORPUS_DIR: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/corpus");
pub const MANIFEST: &str = "MANIFEST";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Entry {
    pub path: String,
    pub title: String,
    /// Definitions proved by `β` alone, re-checked on their erasures.
    pub beta: Vec<String>,
}

#[derive(Debug, ThisError)]
pub enum ManifestError {
    #[error("cannot read manifest: {0}")]
    Io(#[from] std::io::Error),
    #[error("manifest line {line}: expected `path<TAB>title`")]
    Malformed { line: usize },
    #[error("manifest line {line}: `{path}` has no source file")]
    Missing { line: usize, path: String },
}

pub fn parse_manifest(text: &str) -> Result<Vec<Entry>, ManifestError> {
    let mut out = Vec::new();
    for (i, l) in text.lines().enumerate() {
        let l = l.trim_end();
        if l.is_empty() || l.starts_with('#') {
            continue;
        }
        let mut cols = l.split('\t');
        let (Some(path), Some(title)) = (cols.next(), cols.next()) else {
            return Err(ManifestError::Malformed { line: i + 1 });
        };
        if path.is_empty() || title.is_empty() {
            return Err(ManifestError::Malformed { line: i + 1 });
        }
        let beta = cols
            .next()
            .map(|c| c.split_whitespace().map(str::to_string).collect())
            .unwrap_or_default();
        out.push(Entry {
            path: path.to_string(),
            title: title.to_string(),
            beta,
        });
    }
    Ok(out)
}

/// Read `<dir>/MANIFEST` and confirm each entry has a source file.
pub fn load_manifest(dir: &Path) -> Result<Vec<Entry>, ManifestError> {
    let text = std::fs::read_to_string(dir.join(MANIFEST))?;
    let entries = parse_manifest(&text)?;
    for (i, e) in entries.iter().enumerate() {
        let mut f = dir.to_path_buf();
        f.extend(e.path.split('/'));
        f.set_extension("ced");
        if !f.is_file() {
            return Err(ManifestError::Missing {
                line: i + 1,
                path: e.path.clone(),
            });
        }
    }
    Ok(entries)
}

#[derive(Debug)]
pub struct FileVerdict {
    pub path: String,
    pub title: String,
    pub ok: bool,
    pub errors: Vec<Error>,
    pub elapsed: Duration,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BetaVerdict {
    pub key: String,
    pub ok: bool,
    pub detail: Option<String>,
}

#[derive(Debug)]
pub struct Report {
    pub files: Vec<FileVerdict>,
    pub beta: Vec<BetaVerdict>,
    pub elapsed: Duration,
    pub loader: FsLoader,
}

impl Report {
    pub fn ok(&self) -> bool {
        self.files.iter().all(|f| f.ok) && self.beta.iter().all(|b| b.ok)
    }
}

/// Check every manifest entry in order, then re-check each listed `β`
/// equation directly on the erasures, bypassing the type checker.
pub fn verify_corpus(entries: &[Entry], roots: Vec<PathBuf>, cfg: Config) -> Report {
    let start = Instant::now();
    let mut loader = FsLoader::new(roots);
    let mut files = Vec::new();
    let mut beta = Vec::new();
    {
        let mut el = Elaborator::new(&mut loader, cfg);
        for e in entries {
            let t = Instant::now();
            let ok = el.load(&e.path);
            files.push(FileVerdict {
                path: e.path.clone(),
                title: e.title.clone(),
                ok,
                errors: el.take_errors(),
                elapsed: t.elapsed(),
            });
        }
        for e in entries {
            for name in &e.beta {
                beta.push(check_beta(&el, &e.path, name, cfg.fuel));
            }
        }
    }
    Report {
        files,
        beta,
        elapsed: start.elapsed(),
        loader,
    }
}

/// Whether the equation stated by `path::name` holds by βη on erasures.
pub fn check_beta(el: &Elaborator<'_>, path: &str, name: &str, fuel: u64) -> BetaVerdict {
    let key = def_key(path, name);
    let fail = |d: &str| BetaVerdict {
        key: key.to_string(),
        ok: false,
        detail: Some(d.to_string()),
    };
    let env = &el.menv.env;
    let Some(def) = env.get(&key) else {
        return fail("no such definition");
    };
    // Open lifted module parameters and any quantifiers of the statement.
    let conv = Converter { env, fuel };
    let mut class = def.class.clone();
    loop {
        class = match conv.type_whnf(&class) {
            Ok(c) => c,
            Err(e) => return fail(&e.to_string()),
        };
        match &*class {
            Expr::All(b) | Expr::Pi(b) => class = open(&b.body, &Name::fresh(&b.name)),
            _ => break,
        }
    }
    let Expr::Eq(l, r) = &*class else {
        return fail("type is not an equation");
    };
    match beta_eta_equal(&erase(l), &erase(r), env, fuel) {
        Ok(true) => BetaVerdict {
            key: key.to_string(),
            ok: true,
            detail: None,
        },
        Ok(false) => fail("sides differ"),
        Err(e) => fail(&e.to_string()),
    }
}
