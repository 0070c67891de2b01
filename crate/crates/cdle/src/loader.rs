use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use cdle_core::modsys::{Loader, Source};

/// Loads module `a/b` from `<root>/a/b.ced`, trying roots in order.
#[derive(Debug, Default, Clone)]
pub struct FsLoader {
    pub roots: Vec<PathBuf>,
    /// Sources registered directly, e.g. files named on the command line.
    overrides: BTreeMap<String, Source>,
    /// Every text handed out, by file name, for line/column reporting.
    texts: BTreeMap<String, String>,
}

impl FsLoader {
    pub fn new(roots: Vec<PathBuf>) -> Self {
        FsLoader {
            roots,
            ..Default::default()
        }
    }

    /// Roots from `--path` flags followed by the entries of `CDLE_PATH`;
    /// the current directory when both are empty.
    pub fn from_flags(paths: &[PathBuf]) -> Self {
        let mut roots = paths.to_vec();
        if let Some(env) = std::env::var_os("CDLE_PATH") {
            roots.extend(std::env::split_paths(&env).filter(|p| !p.as_os_str().is_empty()));
        }
        if roots.is_empty() {
            roots.push(PathBuf::from("."));
        }
        Self::new(roots)
    }

    /// Serve `path` from the given text instead of searching the roots.
    pub fn register(&mut self, path: &str, src: Source) {
        self.overrides.insert(path.to_string(), src);
    }

    pub fn text(&self, file: &str) -> Option<&str> {
        self.texts.get(file).map(String::as_str)
    }

    /// 1-based line and column of a byte offset in a loaded file.
    pub fn line_col(&self, file: &str, offset: usize) -> Option<(usize, usize)> {
        let text = self.text(file)?;
        let upto = &text[..offset.min(text.len())];
        let line = upto.matches('\n').count() + 1;
        let col = upto.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
        Some((line, col))
    }
}

impl Loader for FsLoader {
    fn load(&mut self, path: &str) -> Option<Source> {
        let src = match self.overrides.get(path) {
            Some(s) => s.clone(),
            None => self.roots.iter().find_map(|r| read(r, path))?,
        };
        self.texts.insert(src.file.clone(), src.text.clone());
        Some(src)
    }
}

fn read(root: &Path, path: &str) -> Option<Source> {
    let mut file = root.to_path_buf();
    file.extend(path.split('/'));
    file.set_extension("ced");
    let text = std::fs::read_to_string(&file).ok()?;
    Some(Source {
        file: file.display().to_string(),
        text,
    })
}

/// The module path a file must declare: its path relative to the first
/// root containing it, without the `.ced` extension.
pub fn module_path_of(roots: &[PathBuf], file: &Path) -> Option<String> {
    let abs = file.canonicalize().ok()?;
    roots.iter().find_map(|r| {
        let rel = abs.strip_prefix(r.canonicalize().ok()?).ok()?;
        let s = rel.with_extension("");
        let parts: Vec<_> = s.components().map(|c| c.as_os_str().to_string_lossy().into_owned()).collect();
        Some(parts.join("/"))
    })
}
