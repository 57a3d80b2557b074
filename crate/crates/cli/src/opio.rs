//! Operator persistence: a text header plus a matrix payload, content-hashed
//! and written atomically.
//!
//! An operator saved under base path `p` occupies two files:
//!
//! * `p.mat` — `dim²` lines `row,col,re,im` in row-major order, floats in
//!   scientific notation with 17 significant digits (enough to reparse to
//!   the identical bits);
//! * `p.hdr` — `key=value` lines: a format tag, `dim`, `hermitian_hint`,
//!   `normalization`, sorted `param.*` creation parameters, and
//!   `content_hash`, the SHA-256 of the matrix file's bytes.
//!
//! Loading recomputes the hash and refuses corrupted payloads. Both files
//! are written to a temporary sibling and renamed into place, so readers
//! never observe a half-written operator.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use nalgebra::DMatrix;
use sha2::{Digest, Sha256};

use regionops::{C64, FockOperator64, TruncationConfig64};

use crate::errors::CliError;

const FORMAT_TAG: &str = "regionops-operator-v1";

/// Descriptive metadata stored alongside the matrix.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct OperatorMeta {
    /// Normalization convention the operator was built under.
    pub normalization: String,
    /// Creation parameters (expression, dimensions, quadrature order, ...).
    pub params: BTreeMap<String, String>,
}

/// Paths and content hash of a saved operator.
#[derive(Clone, Debug)]
pub struct SavedOperator {
    pub header: PathBuf,
    pub matrix: PathBuf,
    pub hash: String,
}

fn header_path(base: &Path) -> PathBuf {
    base.with_extension("hdr")
}

fn matrix_path(base: &Path) -> PathBuf {
    base.with_extension("mat")
}

/// Renders the row-major `row,col,re,im` payload.
pub fn matrix_payload(op: &FockOperator64) -> String {
    let d = op.dim();
    let mut out = String::with_capacity(d * d * 56);
    for r in 0..d {
        for c in 0..d {
            let z = op.entries()[(r, c)];
            out.push_str(&format!("{r},{c},{:.16e},{:.16e}\n", z.re, z.im));
        }
    }
    out
}

/// `sha256:<hex>` of the given bytes.
pub fn content_hash(payload: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(payload);
    format!("sha256:{:x}", hasher.finalize())
}

/// Atomically writes `bytes` to `path`: the payload lands in a temporary
/// sibling first and is renamed into place.
pub fn write_bytes_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let dir = path.parent().unwrap_or_else(|| Path::new("."));
    fs::create_dir_all(dir)?;
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(format!(".tmp-{}", std::process::id()));
    let tmp = PathBuf::from(tmp);
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

/// Saves the operator under `base` (extensions are appended), atomically.
pub fn save_operator(
    op: &FockOperator64,
    meta: &OperatorMeta,
    base: &Path,
) -> Result<SavedOperator, CliError> {
    let payload = matrix_payload(op);
    let hash = content_hash(payload.as_bytes());
    let mut header = String::new();
    header.push_str(&format!("format={FORMAT_TAG}\n"));
    header.push_str(&format!("dim={}\n", op.dim()));
    header.push_str(&format!("hermitian_hint={}\n", op.hermitian_hint()));
    header.push_str(&format!("normalization={}\n", meta.normalization));
    for (k, v) in &meta.params {
        header.push_str(&format!("param.{k}={v}\n"));
    }
    header.push_str(&format!("content_hash={hash}\n"));
    let matrix = matrix_path(base);
    let hdr = header_path(base);
    write_bytes_atomic(&matrix, payload.as_bytes())?;
    write_bytes_atomic(&hdr, header.as_bytes())?;
    Ok(SavedOperator {
        header: hdr,
        matrix,
        hash,
    })
}

fn corrupt(base: &Path, what: impl std::fmt::Display) -> CliError {
    CliError::Numeric(format!("operator {}: {what}", base.display()))
}

/// Loads an operator saved under `base`, verifying the content hash.
pub fn load_operator(base: &Path) -> Result<(FockOperator64, OperatorMeta, String), CliError> {
    let hdr_text = fs::read_to_string(header_path(base))?;
    let mut fields = BTreeMap::new();
    let mut params = BTreeMap::new();
    for (n, line) in hdr_text.lines().enumerate() {
        let Some((key, value)) = line.split_once('=') else {
            return Err(corrupt(base, format!("header line {} lacks `=`", n + 1)));
        };
        if let Some(pkey) = key.strip_prefix("param.") {
            params.insert(pkey.to_string(), value.to_string());
        } else {
            fields.insert(key.to_string(), value.to_string());
        }
    }
    let get = |key: &str| {
        fields
            .get(key)
            .cloned()
            .ok_or_else(|| corrupt(base, format!("header is missing `{key}`")))
    };
    if get("format")? != FORMAT_TAG {
        return Err(corrupt(base, "unknown format tag"));
    }
    let dim: usize = get("dim")?
        .parse()
        .map_err(|_| corrupt(base, "`dim` is not an integer"))?;
    let expected_hash = get("content_hash")?;
    let payload = fs::read(matrix_path(base))?;
    let actual = content_hash(&payload);
    if actual != expected_hash {
        return Err(corrupt(
            base,
            format!("content hash mismatch (header {expected_hash}, payload {actual}); the file is corrupt"),
        ));
    }
    let text = std::str::from_utf8(&payload)
        .map_err(|_| corrupt(base, "matrix payload is not UTF-8"))?;
    let mut entries = DMatrix::from_element(dim, dim, C64::new(0.0, 0.0));
    let mut count = 0usize;
    for (n, line) in text.lines().enumerate() {
        let mut parts = line.split(',');
        let (Some(r), Some(c), Some(re), Some(im), None) = (
            parts.next(),
            parts.next(),
            parts.next(),
            parts.next(),
            parts.next(),
        ) else {
            return Err(corrupt(base, format!("matrix line {} is malformed", n + 1)));
        };
        let bad = |what: &str| corrupt(base, format!("matrix line {}: bad {what}", n + 1));
        let r: usize = r.parse().map_err(|_| bad("row"))?;
        let c: usize = c.parse().map_err(|_| bad("column"))?;
        if n != r * dim + c {
            return Err(corrupt(
                base,
                format!("matrix line {} is out of row-major order", n + 1),
            ));
        }
        let re: f64 = re.parse().map_err(|_| bad("real part"))?;
        let im: f64 = im.parse().map_err(|_| bad("imaginary part"))?;
        entries[(r, c)] = C64::new(re, im);
        count += 1;
    }
    if count != dim * dim {
        return Err(corrupt(
            base,
            format!("matrix has {count} lines, expected {}", dim * dim),
        ));
    }
    let cfg = TruncationConfig64::new(dim).map_err(|e| corrupt(base, e))?;
    let op = FockOperator64::from_matrix(entries, &cfg).map_err(|e| corrupt(base, e))?;
    // the stored hint is advisory metadata; the reload re-derives it from
    // the entries, which is what downstream consumers act on
    let _hint: bool = get("hermitian_hint")?
        .parse()
        .map_err(|_| corrupt(base, "`hermitian_hint` is not a boolean"))?;
    let meta = OperatorMeta {
        normalization: get("normalization")?,
        params,
    };
    Ok((op, meta, expected_hash))
}
