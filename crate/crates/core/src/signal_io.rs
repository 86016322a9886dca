//! Plain-text signal file format, version 1.
//!
//! Layout:
//! ```text
//! #barscan-signal v1 m=<samples> r=<oversampling>
//! #sigma=0.45            (optional provenance lines, one #key=value each)
//! #alpha=1
//! <sample 0>
//! ...
//! <sample m-1>
//! ```
//! Samples are written with 17 fractional digits in scientific notation so
//! every f64 round-trips exactly.

use crate::error::{Error, Result};
use crate::forward::{Provenance, ScanSignal};
use crate::symbology::DigitString;
use std::fmt::Write as _;
use std::path::Path;

const MAGIC: &str = "#barscan-signal v1";

/// Serializes a signal to the version-1 text format.
pub fn format_signal(signal: &ScanSignal) -> String {
    let mut out = String::new();
    writeln!(out, "{MAGIC} m={} r={}", signal.len(), signal.r).unwrap();
    let p = &signal.provenance;
    if let Some(d) = &p.digits {
        writeln!(out, "#digits={d}").unwrap();
    }
    if let Some(v) = p.sigma {
        writeln!(out, "#sigma={v:.17e}").unwrap();
    }
    if let Some(v) = p.alpha {
        writeln!(out, "#alpha={v:.17e}").unwrap();
    }
    if let Some(v) = p.nu {
        writeln!(out, "#nu={v:.17e}").unwrap();
    }
    if let Some(v) = p.xi {
        writeln!(out, "#xi={v:.17e}").unwrap();
    }
    if let Some(v) = p.seed {
        writeln!(out, "#seed={v}").unwrap();
    }
    for v in &signal.samples {
        writeln!(out, "{v:.17e}").unwrap();
    }
    out
}

/// Writes a signal file.
pub fn write_signal(path: &Path, signal: &ScanSignal) -> Result<()> {
    std::fs::write(path, format_signal(signal)).map_err(|e| Error::io(path.display().to_string(), e))
}

fn bad(path: &Path, reason: impl Into<String>) -> Error {
    Error::BadSignalFile {
        path: path.display().to_string(),
        reason: reason.into(),
    }
}

/// Parses the version-1 text format.
pub fn parse_signal(path: &Path, text: &str) -> Result<ScanSignal> {
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| bad(path, "empty file"))?;
    let rest = header
        .strip_prefix(MAGIC)
        .ok_or_else(|| bad(path, format!("missing header {MAGIC:?}")))?;
    let mut m: Option<usize> = None;
    let mut r: Option<usize> = None;
    for field in rest.split_whitespace() {
        if let Some(v) = field.strip_prefix("m=") {
            m = Some(v.parse().map_err(|_| bad(path, "unparseable m="))?);
        } else if let Some(v) = field.strip_prefix("r=") {
            r = Some(v.parse().map_err(|_| bad(path, "unparseable r="))?);
        } else {
            return Err(bad(path, format!("unknown header field {field:?}")));
        }
    }
    let m = m.ok_or_else(|| bad(path, "header lacks m="))?;
    let r = r.ok_or_else(|| bad(path, "header lacks r="))?;

    let mut provenance = Provenance::default();
    let mut samples = Vec::with_capacity(m);
    for line in lines {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(comment) = line.strip_prefix('#') {
            let (key, value) = comment
                .split_once('=')
                .ok_or_else(|| bad(path, format!("malformed provenance line {line:?}")))?;
            let fval = || {
                value
                    .parse::<f64>()
                    .map_err(|_| bad(path, format!("unparseable value for {key}")))
            };
            match key {
                "digits" => provenance.digits = Some(DigitString::parse(value)?),
                "sigma" => provenance.sigma = Some(fval()?),
                "alpha" => provenance.alpha = Some(fval()?),
                "nu" => provenance.nu = Some(fval()?),
                "xi" => provenance.xi = Some(fval()?),
                "seed" => {
                    provenance.seed = Some(
                        value
                            .parse()
                            .map_err(|_| bad(path, "unparseable value for seed"))?,
                    )
                }
                _ => {} // unknown provenance keys are preserved-by-ignoring
            }
            continue;
        }
        samples.push(
            line.parse::<f64>()
                .map_err(|_| bad(path, format!("unparseable sample {line:?}")))?,
        );
    }
    if samples.len() != m {
        return Err(bad(
            path,
            format!("header promises {m} samples, found {}", samples.len()),
        ));
    }
    let mut signal = ScanSignal::new(samples, r).map_err(|_| {
        bad(path, format!("m={m} is not 95 x r for r={r}"))
    })?;
    signal.provenance = provenance;
    Ok(signal)
}

/// Reads a signal file.
pub fn read_signal(path: &Path) -> Result<ScanSignal> {
    let text =
        std::fs::read_to_string(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    parse_signal(path, &text)
}
