//! Line-oriented text format for models.
//!
//! ```text
//! format_version = 1
//! kind = narx
//! n_y = 1
//! n_u = 2
//! tau_d = 1
//! tau_s = 0
//! sample_time = 0.001
//! term y[k-1] = 1
//! term phi1[k-1] = 0.7624
//! ```
//!
//! Parameters are written with the shortest decimal that parses back to the
//! same value, so a write/read cycle is exact. Blank lines and lines starting
//! with `#` are ignored.

use std::fmt::Write as _;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::narx::model::{ModelMeta, NarxModel};
use crate::narx::term::Term;
use crate::scalar::Scalar;

pub const MODEL_FORMAT_VERSION: u32 = 1;

/// One `key rest = value` line with its 1-based line number.
#[derive(Debug, Clone)]
pub(crate) struct Entry<'a> {
    pub line: usize,
    pub key: &'a str,
    pub arg: &'a str,
    pub value: &'a str,
}

impl Entry<'_> {
    pub fn parse<V: FromStr>(&self) -> Result<V> {
        self.value.parse().map_err(|_| Error::Parse {
            line: self.line,
            message: format!("cannot parse value `{}` for `{}`", self.value, self.key),
        })
    }

    pub fn error(&self, message: impl Into<String>) -> Error {
        Error::Parse {
            line: self.line,
            message: message.into(),
        }
    }
}

pub(crate) fn entries(text: &str) -> Result<Vec<Entry<'_>>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (lhs, value) = line.rsplit_once('=').ok_or_else(|| Error::Parse {
            line: i + 1,
            message: format!("expected `key = value`, found `{line}`"),
        })?;
        let lhs = lhs.trim();
        let (key, arg) = match lhs.split_once(char::is_whitespace) {
            Some((k, a)) => (k, a.trim()),
            None => (lhs, ""),
        };
        out.push(Entry {
            line: i + 1,
            key,
            arg,
            value: value.trim(),
        });
    }
    Ok(out)
}

/// Checks the `format_version` and `kind` header lines.
pub(crate) fn check_header(entries: &[Entry<'_>], kind: &str) -> Result<()> {
    let version = entries
        .iter()
        .find(|e| e.key == "format_version")
        .ok_or(Error::Parse {
            line: 0,
            message: "missing format_version".into(),
        })?;
    let v: u32 = version.parse()?;
    if v != MODEL_FORMAT_VERSION {
        return Err(version.error(format!("unsupported format_version {v}")));
    }
    match entries.iter().find(|e| e.key == "kind") {
        Some(e) if e.value == kind => Ok(()),
        Some(e) => Err(e.error(format!("expected kind `{kind}`, found `{}`", e.value))),
        None => Err(Error::Parse {
            line: 0,
            message: "missing kind".into(),
        }),
    }
}

pub fn write_model<T: Scalar>(model: &NarxModel<T>) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "format_version = {MODEL_FORMAT_VERSION}");
    let _ = writeln!(s, "kind = narx");
    let _ = writeln!(s, "n_y = {}", model.n_y());
    let _ = writeln!(s, "n_u = {}", model.n_u());
    let _ = writeln!(s, "tau_d = {}", model.tau_d());
    let _ = writeln!(s, "tau_s = {}", model.tau_s());
    let _ = writeln!(s, "sample_time = {}", model.sample_time());
    for (term, th) in model.iter() {
        let _ = writeln!(s, "term {term} = {th}");
    }
    s
}

pub fn read_model<T: Scalar>(text: &str) -> Result<NarxModel<T>> {
    let entries = entries(text)?;
    check_header(&entries, "narx")?;
    let mut meta = ModelMeta {
        n_y: 0,
        n_u: 0,
        tau_d: 0,
        tau_s: 0,
        sample_time: 0.0,
    };
    let mut seen = [false; 5];
    let mut terms = Vec::new();
    let mut theta = Vec::new();
    for e in &entries {
        match e.key {
            "format_version" | "kind" => {}
            "n_y" => (meta.n_y, seen[0]) = (e.parse()?, true),
            "n_u" => (meta.n_u, seen[1]) = (e.parse()?, true),
            "tau_d" => (meta.tau_d, seen[2]) = (e.parse()?, true),
            "tau_s" => (meta.tau_s, seen[3]) = (e.parse()?, true),
            "sample_time" => (meta.sample_time, seen[4]) = (e.parse()?, true),
            "term" => {
                let term: Term = e.arg.parse().map_err(|err| match err {
                    Error::Parse { message, .. } => e.error(message),
                    other => e.error(other.to_string()),
                })?;
                terms.push(term);
                theta.push(e.parse::<T>()?);
            }
            other => return Err(e.error(format!("unknown key `{other}`"))),
        }
    }
    let names = ["n_y", "n_u", "tau_d", "tau_s", "sample_time"];
    if let Some(i) = seen.iter().position(|s| !s) {
        return Err(Error::Parse {
            line: 0,
            message: format!("missing `{}`", names[i]),
        });
    }
    NarxModel::new(terms, theta, meta)
}
