//! Run manifests: one JSON file per command run, written next to the
//! primary output, carrying the fully resolved configuration.

use std::path::{Path, PathBuf};

use serde::Serialize;

#[derive(Serialize)]
struct RunManifest<'a, T: Serialize> {
    tool: &'static str,
    version: &'static str,
    command: &'a str,
    config: &'a T,
}

/// Manifest path for a file output: the output path with `.manifest.json`
/// appended, so it never collides with sibling artifacts.
pub fn sibling(out: &Path) -> PathBuf {
    let mut name = out.file_name().map(|n| n.to_os_string()).unwrap_or_default();
    name.push(".manifest.json");
    out.with_file_name(name)
}

/// Manifest path for a directory output.
pub fn in_dir(dir: &Path) -> PathBuf {
    dir.join("manifest.json")
}

pub fn write(path: &Path, command: &str, config: &impl Serialize) -> sabrcal::Result<()> {
    let m = RunManifest {
        tool: "sabrcal",
        version: env!("CARGO_PKG_VERSION"),
        command,
        config,
    };
    std::fs::write(path, serde_json::to_string_pretty(&m)? + "\n")?;
    Ok(())
}
