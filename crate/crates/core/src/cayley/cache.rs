use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::Ball;
use crate::error::{Error, Result};
use crate::group::Element;

const CACHE_MAGIC: &str = "dcx-ball";
pub const CACHE_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct BallFile {
    magic: String,
    version: u32,
    fingerprint: String,
    radius: usize,
    complete: bool,
    sphere_starts: Vec<usize>,
    parents: Option<Vec<(u32, u16)>>,
    elements: Vec<Element>,
}

/// `<dir>/ball-<sha256(fingerprint)[..16]>-r<n>.cbor`
pub fn ball_cache_path(dir: &Path, fingerprint: &str, n: usize) -> PathBuf {
    let digest = Sha256::digest(fingerprint.as_bytes());
    let hex: String = digest.iter().take(8).map(|b| format!("{b:02x}")).collect();
    dir.join(format!("ball-{hex}-r{n}.cbor"))
}

pub fn save_ball(ball: &Ball, path: &Path) -> Result<()> {
    let file = BallFile {
        magic: CACHE_MAGIC.into(),
        version: CACHE_VERSION,
        fingerprint: ball.fingerprint.clone(),
        radius: ball.radius(),
        complete: ball.complete,
        sphere_starts: ball.sphere_starts.clone(),
        parents: ball.parents.clone(),
        elements: ball.iter().cloned().collect(),
    };
    let mut w = BufWriter::new(File::create(path)?);
    ciborium::into_writer(&file, &mut w).map_err(|e| Error::Cache(e.to_string()))?;
    w.flush()?;
    Ok(())
}

/// Loads a cached ball. `Ok(None)` when the file is missing or was written
/// for a different model or radius; an error when it is corrupt or from
/// another cache version.
pub fn load_ball(path: &Path, fingerprint: &str, n: usize) -> Result<Option<Ball>> {
    if !path.exists() {
        return Ok(None);
    }
    let r = BufReader::new(File::open(path)?);
    let file: BallFile = ciborium::from_reader(r).map_err(|e| Error::Cache(e.to_string()))?;
    if file.magic != CACHE_MAGIC || file.version != CACHE_VERSION {
        return Err(Error::Cache(format!("{} has version {} (expected {CACHE_VERSION})", path.display(), file.version)));
    }
    if file.fingerprint != fingerprint || file.radius != n {
        return Ok(None);
    }
    let ball = Ball::from_parts(file.elements, file.sphere_starts, file.parents, file.fingerprint, file.complete)?;
    Ok(Some(ball))
}

/// `n,size,cumulative` per sphere.
pub fn write_sphere_csv<W: Write>(ball: &Ball, mut out: W) -> Result<()> {
    writeln!(out, "n,size,cumulative")?;
    for (r, size) in ball.sphere_sizes().into_iter().enumerate() {
        writeln!(out, "{r},{size},{}", ball.size_at(r))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cayley::enumerate_ball;
    use crate::group::presets;

    #[test]
    fn cache_round_trip() {
        let dir = std::env::temp_dir().join(format!("dcx-cache-test-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let h = presets::heisenberg();
        let ball = enumerate_ball(&h, 5, &Default::default()).unwrap();
        let path = ball_cache_path(&dir, &h.fingerprint(), 5);
        save_ball(&ball, &path).unwrap();
        let loaded = load_ball(&path, &h.fingerprint(), 5).unwrap().unwrap();
        assert!(loaded.iter().eq(ball.iter()));
        assert_eq!(loaded.sphere_sizes(), ball.sphere_sizes());
        assert_eq!(loaded.parents(), ball.parents());
        assert!(load_ball(&path, &h.fingerprint(), 6).unwrap().is_none());
        std::fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn sphere_csv() {
        let ball = enumerate_ball(&presets::integers(), 2, &Default::default()).unwrap();
        let mut buf = Vec::new();
        write_sphere_csv(&ball, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "n,size,cumulative\n0,1,1\n1,2,3\n2,2,5\n");
    }
}
