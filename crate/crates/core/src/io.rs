//! Output writers. Every file is written atomically (temp file in the
//! target directory, then rename), so consumers never observe partial
//! data. Floats are serialized with Rust's shortest round-trip
//! formatting.

use std::io::Write;
use std::path::Path;

use crate::exponent::ExponentTable;
use crate::group::GroupId;
use crate::simulate::{OccupationStats, PathRecord};
use crate::spherical::{plancherel_density, RadialFunction, SpectralVector, TransformPlan};
use crate::{Error, GroupElement, Result};

/// Write `bytes` to `path` via a temp file plus rename.
pub fn atomic_write(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    std::fs::create_dir_all(dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.flush()?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}

fn csv_bytes(header: &[&str], rows: impl Iterator<Item = Vec<String>>) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).map_err(io_err)?;
    for row in rows {
        w.write_record(&row).map_err(io_err)?;
    }
    w.into_inner().map_err(|e| Error::InvalidArgument(format!("csv flush: {e}")))
}

fn io_err(e: csv::Error) -> Error {
    Error::InvalidArgument(format!("csv write: {e}"))
}

/// `lambda,re_eta,im_eta,beta,jump`
pub fn write_exponent_csv(path: &Path, table: &ExponentTable) -> Result<()> {
    let rows = (0..table.lambdas.len()).map(|j| {
        vec![
            table.lambdas[j].to_string(),
            table.eta[j].re.to_string(),
            table.eta[j].im.to_string(),
            table.beta[j].to_string(),
            table.jump[j].to_string(),
        ]
    });
    atomic_write(path, &csv_bytes(&["lambda", "re_eta", "im_eta", "beta", "jump"], rows)?)
}

/// `t,value`
pub fn write_radial_csv(path: &Path, f: &RadialFunction) -> Result<()> {
    let rows = f
        .grid
        .nodes
        .iter()
        .zip(f.samples.iter())
        .map(|(t, v)| vec![t.to_string(), v.to_string()]);
    atomic_write(path, &csv_bytes(&["t", "value"], rows)?)
}

/// `lambda,re,im`
pub fn write_spectral_csv(path: &Path, plan: &TransformPlan, fhat: &SpectralVector) -> Result<()> {
    if fhat.values.len() != plan.grid.nodes.len() {
        return Err(Error::InvalidArgument("spectral grid mismatch".into()));
    }
    let rows = plan
        .grid
        .nodes
        .iter()
        .zip(fhat.values.iter())
        .map(|(l, v)| vec![l.to_string(), v.re.to_string(), v.im.to_string()]);
    atomic_write(path, &csv_bytes(&["lambda", "re", "im"], rows)?)
}

/// `horizon,mean,std_err`
pub fn write_occupation_csv(path: &Path, stats: &OccupationStats) -> Result<()> {
    let rows = (0..3).map(|k| {
        vec![
            stats.horizons[k].to_string(),
            stats.mean[k].to_string(),
            stats.std_err[k].to_string(),
        ]
    });
    atomic_write(path, &csv_bytes(&["horizon", "mean", "std_err"], rows)?)
}

/// `lambda,integrand` for the harmonic transience integral on `[0, Λ₀]`.
pub fn write_harmonic_csv(
    path: &Path,
    plan: &TransformPlan,
    table: &ExponentTable,
    lambda0: f64,
) -> Result<()> {
    let rows = plan
        .grid
        .nodes
        .iter()
        .zip(table.eta.iter())
        .take_while(|(l, _)| **l <= lambda0)
        .map(|(l, e)| {
            let dens = plan.grid.kappa * plancherel_density(*l);
            let integrand = if e.re > 0.0 { dens / e.re } else { f64::INFINITY };
            vec![l.to_string(), integrand.to_string()]
        });
    atomic_write(path, &csv_bytes(&["lambda", "integrand"], rows)?)
}

/// Pretty-printed JSON for any serializable report object.
pub fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut bytes = serde_json::to_vec_pretty(value)
        .map_err(|e| Error::InvalidArgument(format!("json: {e}")))?;
    bytes.push(b'\n');
    atomic_write(path, &bytes)
}

const PATHS_MAGIC: &[u8; 8] = b"LSYMPATH";
const PATHS_VERSION: u32 = 1;

/// Columnar binary spill of simulated paths, little-endian:
/// magic, version, group tag, path count, then per path the stream id,
/// the `(time, 4 state entries)` samples and the jump times.
pub fn write_paths_bin(path: &Path, group: GroupId, paths: &[PathRecord]) -> Result<()> {
    let mut buf = Vec::with_capacity(64 + paths.iter().map(|p| p.times.len() * 40).sum::<usize>());
    buf.extend_from_slice(PATHS_MAGIC);
    buf.extend_from_slice(&PATHS_VERSION.to_le_bytes());
    buf.extend_from_slice(&(match group {
        GroupId::Sl2r => 0u32,
        GroupId::Su2 => 1u32,
    })
    .to_le_bytes());
    buf.extend_from_slice(&(paths.len() as u64).to_le_bytes());
    for p in paths {
        buf.extend_from_slice(&p.stream.to_le_bytes());
        buf.extend_from_slice(&(p.times.len() as u64).to_le_bytes());
        for (t, s) in p.times.iter().zip(p.states.iter()) {
            buf.extend_from_slice(&t.to_le_bytes());
            for e in &s.entries {
                buf.extend_from_slice(&e.to_le_bytes());
            }
        }
        buf.extend_from_slice(&(p.jump_times.len() as u64).to_le_bytes());
        for t in &p.jump_times {
            buf.extend_from_slice(&t.to_le_bytes());
        }
    }
    atomic_write(path, &buf)
}

/// Read back a paths spill; inverse of [`write_paths_bin`].
pub fn read_paths_bin(path: &Path) -> Result<(GroupId, Vec<PathRecord>)> {
    let bytes = std::fs::read(path)?;
    let mut pos = 0usize;
    let take = |pos: &mut usize, n: usize| -> Result<&[u8]> {
        if *pos + n > bytes.len() {
            return Err(Error::InvalidArgument("truncated paths file".into()));
        }
        let s = &bytes[*pos..*pos + n];
        *pos += n;
        Ok(s)
    };
    let f64_at = |s: &[u8]| f64::from_le_bytes(s.try_into().unwrap());
    if take(&mut pos, 8)? != PATHS_MAGIC {
        return Err(Error::InvalidArgument("not a paths file".into()));
    }
    let version = u32::from_le_bytes(take(&mut pos, 4)?.try_into().unwrap());
    if version != PATHS_VERSION {
        return Err(Error::InvalidArgument(format!("unsupported paths version {version}")));
    }
    let group = match u32::from_le_bytes(take(&mut pos, 4)?.try_into().unwrap()) {
        0 => GroupId::Sl2r,
        1 => GroupId::Su2,
        g => return Err(Error::InvalidArgument(format!("unknown group tag {g}"))),
    };
    let n_paths = u64::from_le_bytes(take(&mut pos, 8)?.try_into().unwrap()) as usize;
    let mut paths = Vec::with_capacity(n_paths);
    for _ in 0..n_paths {
        let stream = u64::from_le_bytes(take(&mut pos, 8)?.try_into().unwrap());
        let n = u64::from_le_bytes(take(&mut pos, 8)?.try_into().unwrap()) as usize;
        let mut times = Vec::with_capacity(n);
        let mut states = Vec::with_capacity(n);
        for _ in 0..n {
            times.push(f64_at(take(&mut pos, 8)?));
            let mut entries = [0.0f64; 4];
            for e in &mut entries {
                *e = f64_at(take(&mut pos, 8)?);
            }
            states.push(GroupElement { group, entries });
        }
        let nj = u64::from_le_bytes(take(&mut pos, 8)?.try_into().unwrap()) as usize;
        let mut jump_times = Vec::with_capacity(nj);
        for _ in 0..nj {
            jump_times.push(f64_at(take(&mut pos, 8)?));
        }
        paths.push(PathRecord { stream, times, states, jump_times });
    }
    if pos != bytes.len() {
        return Err(Error::InvalidArgument("trailing bytes in paths file".into()));
    }
    Ok((group, paths))
}
