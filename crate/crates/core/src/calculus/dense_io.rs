//! Dense binary matrix files: an 8-byte magic `LWDENSE1`, then little-endian `u64`
//! rows, cols and component count (1 real, 2 complex), then row-major little-endian
//! `f64` values (complex entries as `re, im`).

use std::io::{Read, Write};

use num_complex::Complex64;

use crate::linalg::CMat;
use crate::{Error, Result};

const MAGIC: &[u8; 8] = b"LWDENSE1";
const MAX_ENTRIES: u64 = 1 << 28;

pub fn write_dense(m: &CMat, mut w: impl Write) -> std::io::Result<()> {
    w.write_all(MAGIC)?;
    for v in [m.nrows() as u64, m.ncols() as u64, 2u64] {
        w.write_all(&v.to_le_bytes())?;
    }
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            w.write_all(&m[(i, j)].re.to_le_bytes())?;
            w.write_all(&m[(i, j)].im.to_le_bytes())?;
        }
    }
    Ok(())
}

pub fn read_dense(mut r: impl Read) -> Result<CMat> {
    let mut bytes = Vec::new();
    r.read_to_end(&mut bytes)
        .map_err(|e| Error::Format(format!("read failed: {e}")))?;
    if bytes.len() < 32 || &bytes[..8] != MAGIC {
        return Err(Error::Format("missing dense-matrix header".into()));
    }
    let word = |k: usize| u64::from_le_bytes(bytes[8 + 8 * k..16 + 8 * k].try_into().unwrap());
    let (rows, cols, comps) = (word(0), word(1), word(2));
    if comps != 1 && comps != 2 {
        return Err(Error::Format(format!("component count {comps}")));
    }
    if rows.saturating_mul(cols) > MAX_ENTRIES {
        return Err(Error::Format(format!(
            "implausible dimensions {rows}x{cols}"
        )));
    }
    let need = 32 + (rows * cols * comps * 8) as usize;
    if bytes.len() != need {
        return Err(Error::Format(format!(
            "expected {need} bytes, found {}",
            bytes.len()
        )));
    }
    let f = |k: usize| f64::from_le_bytes(bytes[32 + 8 * k..40 + 8 * k].try_into().unwrap());
    let (rows, cols, comps) = (rows as usize, cols as usize, comps as usize);
    let m = CMat::from_fn(rows, cols, |i, j| {
        let k = (i * cols + j) * comps;
        Complex64::new(f(k), if comps == 2 { f(k + 1) } else { 0.0 })
    });
    if m.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
        return Err(Error::Format("non-finite entry".into()));
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let m = CMat::from_fn(3, 2, |i, j| {
            Complex64::new(i as f64 - 0.5, j as f64 * 1e-300)
        });
        let mut buf = Vec::new();
        write_dense(&m, &mut buf).unwrap();
        assert_eq!(buf.len(), 32 + 6 * 16);
        assert_eq!(read_dense(&buf[..]).unwrap(), m);
    }

    #[test]
    fn truncated_file_rejected() {
        let m = CMat::identity(2, 2);
        let mut buf = Vec::new();
        write_dense(&m, &mut buf).unwrap();
        buf.pop();
        assert!(matches!(read_dense(&buf[..]), Err(Error::Format(_))));
        assert!(matches!(read_dense(&b"garbage"[..]), Err(Error::Format(_))));
    }
}
