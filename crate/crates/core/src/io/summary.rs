//! Metrics summaries in the `key = value` text format shared with models.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::metrics::MetricsSummary;
use crate::narx::format::{check_header, entries};

/// Writes one summary under a label such as `direct`, `inverse` or
/// `baseline`.
pub fn write_metrics(label: &str, m: &MetricsSummary) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "format_version = {}", crate::narx::MODEL_FORMAT_VERSION);
    let _ = writeln!(s, "kind = metrics");
    let _ = writeln!(s, "label = {label}");
    let _ = writeln!(s, "mape = {}", m.mape);
    let _ = writeln!(s, "nsavi = {}", m.nsavi);
    let _ = writeln!(s, "n_samples = {}", m.n_samples);
    let _ = writeln!(s, "transient_skip = {}", m.transient_skip);
    s
}

pub fn read_metrics(text: &str) -> Result<(String, MetricsSummary)> {
    let entries = entries(text)?;
    check_header(&entries, "metrics")?;
    let mut label = None;
    let (mut mape, mut nsavi, mut n, mut skip) = (None, None, None, None);
    for e in &entries {
        match e.key {
            "format_version" | "kind" => {}
            "label" => label = Some(e.value.to_string()),
            "mape" => mape = Some(e.parse::<f64>()?),
            "nsavi" => nsavi = Some(e.parse::<f64>()?),
            "n_samples" => n = Some(e.parse::<usize>()?),
            "transient_skip" => skip = Some(e.parse::<usize>()?),
            other => return Err(e.error(format!("unknown key `{other}`"))),
        }
    }
    let missing = |k: &str| Error::Parse {
        line: 0,
        message: format!("missing `{k}`"),
    };
    Ok((
        label.ok_or_else(|| missing("label"))?,
        MetricsSummary {
            mape: mape.ok_or_else(|| missing("mape"))?,
            nsavi: nsavi.ok_or_else(|| missing("nsavi"))?,
            n_samples: n.ok_or_else(|| missing("n_samples"))?,
            transient_skip: skip.ok_or_else(|| missing("transient_skip"))?,
        },
    ))
}
