//! Input-output records as `time_s,u,y` text with a TOML sidecar.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::narx::Signal;
use crate::plant::BoucWenParams;
use crate::scalar::Scalar;

pub const DATASET_FORMAT_VERSION: u32 = 1;
/// Allowed relative deviation of each time step from the sample time.
pub const TIME_JITTER: f64 = 1e-9;

/// Sidecar describing how a dataset was produced.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetMeta {
    pub format_version: u32,
    pub sample_time: f64,
    pub n_samples: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generator: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub excitation: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub plant: Option<BoucWenParams>,
}

impl DatasetMeta {
    pub fn new(sample_time: f64, n_samples: usize) -> Self {
        DatasetMeta {
            format_version: DATASET_FORMAT_VERSION,
            sample_time,
            n_samples,
            dt: None,
            seed: None,
            generator: None,
            excitation: None,
            plant: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Dataset<T> {
    pub u: Signal<T>,
    pub y: Signal<T>,
    pub meta: DatasetMeta,
}

/// `data.csv` has its metadata in `data.meta.toml`.
pub fn sidecar_path(path: &Path) -> PathBuf {
    path.with_extension("meta.toml")
}

pub fn dataset_to_csv<T: Scalar>(u: &Signal<T>, y: &Signal<T>) -> Result<String> {
    if u.len() != y.len() {
        return Err(Error::InvalidArgument(format!(
            "input has {} samples but output has {}",
            u.len(),
            y.len()
        )));
    }
    let ts = u.sample_time();
    let mut s = String::with_capacity(48 * u.len() + 16);
    s.push_str("time_s,u,y\n");
    for (k, (a, b)) in u.samples().iter().zip(y.samples()).enumerate() {
        let _ = writeln!(s, "{},{a},{b}", k as f64 * ts);
    }
    Ok(s)
}

/// Parses the CSV body. Returns the time column and both channels.
pub fn parse_dataset_csv<T: Scalar>(text: &str) -> Result<(Vec<f64>, Vec<T>, Vec<T>)> {
    let (t, mut cols) = parse_columns::<T>(text, &["u", "y"])?;
    let y = cols.pop().unwrap_or_default();
    let u = cols.pop().unwrap_or_default();
    Ok((t, u, y))
}

/// Parses a `time_s,<names...>` CSV into the time column and one vector per
/// named channel.
fn parse_columns<T: Scalar>(text: &str, names: &[&str]) -> Result<(Vec<f64>, Vec<Vec<T>>)> {
    let header = std::iter::once("time_s")
        .chain(names.iter().copied())
        .collect::<Vec<_>>()
        .join(",");
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.trim() == header => {}
        Some((_, h)) => {
            return Err(Error::Parse {
                line: 1,
                message: format!("expected header `{header}`, found `{}`", h.trim()),
            })
        }
        None => {
            return Err(Error::Parse {
                line: 1,
                message: "empty dataset".into(),
            })
        }
    }
    let mut t = Vec::new();
    let mut chans: Vec<Vec<T>> = vec![Vec::new(); names.len()];
    for (i, raw) in lines {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        let bad = |message: String| Error::Parse {
            line: i + 1,
            message,
        };
        let cols: Vec<&str> = line.split(',').map(str::trim).collect();
        if cols.len() != names.len() + 1 {
            return Err(bad(format!(
                "expected {} columns, found {}",
                names.len() + 1,
                cols.len()
            )));
        }
        let tk: f64 = cols[0]
            .parse()
            .map_err(|_| bad(format!("bad time value `{}`", cols[0])))?;
        if !tk.is_finite() {
            return Err(bad("non-finite value".into()));
        }
        t.push(tk);
        for ((name, col), chan) in names.iter().zip(&cols[1..]).zip(&mut chans) {
            let v: T = col
                .parse()
                .map_err(|_| bad(format!("bad {name} value `{col}`")))?;
            if !v.is_finite() {
                return Err(bad("non-finite value".into()));
            }
            chan.push(v);
        }
    }
    Ok((t, chans))
}

/// Checks that consecutive times differ by `sample_time` to within
/// [`TIME_JITTER`] relative.
pub fn check_uniform(time: &[f64], sample_time: f64) -> Result<()> {
    for (k, w) in time.windows(2).enumerate() {
        let step = w[1] - w[0];
        if ((step - sample_time) / sample_time).abs() > TIME_JITTER {
            return Err(Error::Parse {
                line: k + 3,
                message: format!(
                    "non-uniform time base: step {step} s differs from sample time {sample_time} s"
                ),
            });
        }
    }
    Ok(())
}

/// Writes the CSV and its sidecar. The sidecar's sample time and length are
/// taken from the signals.
pub fn write_dataset<T: Scalar>(
    path: &Path,
    u: &Signal<T>,
    y: &Signal<T>,
    meta: &DatasetMeta,
) -> Result<()> {
    let csv = dataset_to_csv(u, y)?;
    let meta = DatasetMeta {
        format_version: DATASET_FORMAT_VERSION,
        sample_time: u.sample_time(),
        n_samples: u.len(),
        ..meta.clone()
    };
    let side = toml::to_string(&meta).map_err(|e| Error::InvalidArgument(e.to_string()))?;
    fs::write(path, csv)?;
    fs::write(sidecar_path(path), side)?;
    Ok(())
}

/// Reads a dataset. Without a sidecar the sample time is taken from the
/// first time step.
pub fn read_dataset<T: Scalar>(path: &Path) -> Result<Dataset<T>> {
    let text = fs::read_to_string(path)?;
    let (t, u, y) = parse_dataset_csv::<T>(&text)?;
    let meta = read_meta(path, &t)?;
    Ok(Dataset {
        u: Signal::new(u, meta.sample_time)?,
        y: Signal::new(y, meta.sample_time)?,
        meta,
    })
}

/// Writes an input-only record as `time_s,u` with its sidecar.
pub fn write_input<T: Scalar>(path: &Path, u: &Signal<T>, meta: &DatasetMeta) -> Result<()> {
    let ts = u.sample_time();
    let mut csv = String::with_capacity(32 * u.len() + 16);
    csv.push_str("time_s,u\n");
    for (k, a) in u.samples().iter().enumerate() {
        let _ = writeln!(csv, "{},{a}", k as f64 * ts);
    }
    let meta = DatasetMeta {
        format_version: DATASET_FORMAT_VERSION,
        sample_time: ts,
        n_samples: u.len(),
        ..meta.clone()
    };
    let side = toml::to_string(&meta).map_err(|e| Error::InvalidArgument(e.to_string()))?;
    fs::write(path, csv)?;
    fs::write(sidecar_path(path), side)?;
    Ok(())
}

/// Reads a record written by [`write_input`].
pub fn read_input<T: Scalar>(path: &Path) -> Result<(Signal<T>, DatasetMeta)> {
    let text = fs::read_to_string(path)?;
    let (t, mut cols) = parse_columns::<T>(&text, &["u"])?;
    let meta = read_meta(path, &t)?;
    Ok((
        Signal::new(cols.pop().unwrap_or_default(), meta.sample_time)?,
        meta,
    ))
}

fn read_meta(path: &Path, t: &[f64]) -> Result<DatasetMeta> {
    if t.len() < 2 {
        return Err(Error::InsufficientData {
            needed: 2,
            got: t.len(),
        });
    }
    let side = sidecar_path(path);
    let meta = if side.exists() {
        let s = fs::read_to_string(&side)?;
        let meta: DatasetMeta = toml::from_str(&s)
            .map_err(|e| Error::config(side.display().to_string(), e.message().to_string()))?;
        if meta.format_version != DATASET_FORMAT_VERSION {
            return Err(Error::config(
                "format_version",
                format!("unsupported dataset format_version {}", meta.format_version),
            ));
        }
        if meta.n_samples != t.len() {
            return Err(Error::config(
                "n_samples",
                format!(
                    "sidecar declares {} samples, file has {}",
                    meta.n_samples,
                    t.len()
                ),
            ));
        }
        meta
    } else {
        DatasetMeta::new(t[1] - t[0], t.len())
    };
    if !(meta.sample_time > 0.0) {
        return Err(Error::config("sample_time", "sample time must be positive"));
    }
    check_uniform(t, meta.sample_time)?;
    Ok(meta)
}
