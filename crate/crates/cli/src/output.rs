use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};

/// Shortest representation that round-trips the value rounded to 12
/// significant digits. Non-finite values are an error.
pub fn fmt_num(v: f64) -> Result<String> {
    if !v.is_finite() {
        bail!("refusing to write non-finite value {v}");
    }
    if v == 0.0 {
        return Ok("0".into());
    }
    let rounded: f64 = format!("{v:.11e}").parse()?;
    let exp = rounded.abs().log10().floor();
    Ok(if (-5.0..15.0).contains(&exp) {
        format!("{rounded}")
    } else {
        format!("{rounded:e}")
    })
}

/// CSV text with LF line endings.
pub struct Csv {
    text: String,
}

impl Csv {
    pub fn new(header: &[&str]) -> Self {
        let mut text = header.join(",");
        text.push('\n');
        Csv { text }
    }

    pub fn row(&mut self, fields: &[String]) {
        self.text.push_str(&fields.join(","));
        self.text.push('\n');
    }

    pub fn into_string(self) -> String {
        self.text
    }
}

/// Files produced by one command, written together or not at all.
#[derive(Debug, Default)]
pub struct OutputSet {
    files: Vec<(String, String)>,
}

impl OutputSet {
    pub fn add(&mut self, name: impl Into<String>, contents: String) {
        self.files.push((name.into(), contents));
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.files.iter().map(|(n, _)| n.as_str())
    }

    /// Writes every file to a temporary name in `dir`, then renames them all
    /// into place; on failure the temporaries are removed.
    pub fn commit(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        let mut temps = Vec::new();
        let staged = (|| -> Result<()> {
            for (name, contents) in &self.files {
                let tmp = dir.join(format!(".{name}.tmp{}", std::process::id()));
                temps.push(tmp.clone());
                let mut f = fs::File::create(&tmp).with_context(|| format!("creating {}", tmp.display()))?;
                f.write_all(contents.as_bytes())?;
                f.sync_all()?;
            }
            Ok(())
        })();
        if let Err(e) = staged {
            for t in &temps {
                let _ = fs::remove_file(t);
            }
            return Err(e);
        }
        let mut written = Vec::new();
        for ((name, _), tmp) in self.files.iter().zip(&temps) {
            let dest = dir.join(name);
            fs::rename(tmp, &dest).with_context(|| format!("renaming into {}", dest.display()))?;
            written.push(dest);
        }
        Ok(written)
    }
}
