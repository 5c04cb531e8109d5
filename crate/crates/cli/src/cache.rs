//! Content-hash caching for derived artifacts.
//!
//! Every cached artifact `<out>` gets a sidecar `<out>.inputs.sha256`.
//! Line 1 is a hex SHA-256 over all labeled inputs and parameters that
//! influence the artifact; the remaining lines are a short summary that
//! commands may reprint on a cache hit. An artifact is reused only when
//! both files exist and the recorded digest matches the recomputed one.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

/// Accumulates labeled, length-prefixed inputs into one digest.
///
/// Each entry hashes `label \n len(bytes) \n bytes`, which keeps
/// adjacent entries from aliasing one another.
pub struct InputHasher {
    hasher: Sha256,
}

impl InputHasher {
    pub fn new(kind: &str) -> Self {
        let mut h = InputHasher {
            hasher: Sha256::new(),
        };
        h.text("artifact-kind", kind);
        h
    }

    pub fn text(&mut self, label: &str, value: &str) {
        self.bytes(label, value.as_bytes());
    }

    pub fn bytes(&mut self, label: &str, data: &[u8]) {
        self.hasher.update(label.as_bytes());
        self.hasher.update(b"\n");
        self.hasher.update(data.len().to_string().as_bytes());
        self.hasher.update(b"\n");
        self.hasher.update(data);
    }

    /// Hashes a file's contents under the given label.
    pub fn file(&mut self, label: &str, path: &Path) -> io::Result<()> {
        let data = fs::read(path).map_err(|e| {
            io::Error::new(e.kind(), format!("cannot read {}: {e}", path.display()))
        })?;
        self.bytes(label, &data);
        Ok(())
    }

    pub fn finish(self) -> String {
        let digest = self.hasher.finalize();
        let mut out = String::with_capacity(64);
        for byte in digest {
            let _ = write!(out, "{byte:02x}");
        }
        out
    }
}

fn sidecar_path(out: &Path) -> PathBuf {
    let mut name = out
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_default();
    name.push_str(".inputs.sha256");
    out.with_file_name(name)
}

/// Returns the recorded summary lines when `out` is up to date for
/// `digest`, or `None` when it must be rebuilt.
pub fn cache_hit(out: &Path, digest: &str) -> Option<String> {
    if !out.exists() {
        return None;
    }
    let recorded = fs::read_to_string(sidecar_path(out)).ok()?;
    let mut lines = recorded.lines();
    if lines.next()? != digest {
        return None;
    }
    Some(lines.collect::<Vec<_>>().join("\n"))
}

/// Records the digest and summary for a freshly written artifact.
pub fn record(out: &Path, digest: &str, summary: &str) -> io::Result<()> {
    let mut body = String::with_capacity(digest.len() + summary.len() + 2);
    body.push_str(digest);
    body.push('\n');
    if !summary.is_empty() {
        body.push_str(summary);
        if !summary.ends_with('\n') {
            body.push('\n');
        }
    }
    fs::write(sidecar_path(out), body)
}

/// Creates the parent directory of `path` when it has one.
pub fn ensure_parent(path: &Path) -> io::Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent)?;
        }
    }
    Ok(())
}
