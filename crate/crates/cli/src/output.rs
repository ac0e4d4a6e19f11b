//! Output plumbing: every artifact embeds the tool version, the seed, and
//! the full subcommand configuration, so a run can be reproduced from the
//! file alone. JSON gets a wrapper object; CSV and TSV get `#` comment
//! lines, which the engine's own readers skip.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use anyhow::{Context, Result};
use serde::Serialize;
use serde_json::{json, Value};

pub const TOOL: &str = "anxlex";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Opens a writer; `-` means standard output.
pub fn open_out(path: &Path) -> Result<Box<dyn Write>> {
    if path == Path::new("-") {
        Ok(Box::new(io::stdout().lock()))
    } else {
        if let Some(parent) = path.parent() {
            if !parent.as_os_str().is_empty() {
                std::fs::create_dir_all(parent)
                    .with_context(|| format!("creating directory {}", parent.display()))?;
            }
        }
        let file =
            File::create(path).with_context(|| format!("creating {}", path.display()))?;
        Ok(Box::new(BufWriter::new(file)))
    }
}

/// One-line JSON of a subcommand's configuration.
pub fn config_line(config: &impl Serialize) -> Result<String> {
    Ok(serde_json::to_string(config)?)
}

/// `#` comment lines carrying provenance for text outputs.
pub fn provenance_comments(seed: u64, config: &impl Serialize) -> Result<Vec<String>> {
    Ok(vec![
        format!("{TOOL} {VERSION}"),
        format!("seed: {seed}"),
        format!("config: {}", config_line(config)?),
    ])
}

pub fn write_comment_header(
    writer: &mut impl Write,
    seed: u64,
    config: &impl Serialize,
) -> Result<()> {
    for line in provenance_comments(seed, config)? {
        writeln!(writer, "# {line}")?;
    }
    Ok(())
}

/// Wraps a payload in the provenance envelope and writes pretty JSON.
/// serde_json sorts object keys, so the bytes are deterministic.
pub fn write_json(
    writer: &mut impl Write,
    seed: u64,
    config: &impl Serialize,
    payload_key: &str,
    payload: Value,
) -> Result<()> {
    let doc = json!({
        "tool": TOOL,
        "version": VERSION,
        "seed": seed,
        "config": serde_json::to_value(config)?,
        payload_key: payload,
    });
    serde_json::to_writer_pretty(&mut *writer, &doc)?;
    writer.write_all(b"\n")?;
    Ok(())
}
