use std::io::{Read, Write};
use std::path::Path;

use num_complex::Complex64;

use super::field::SpectralField;
use super::grid::Grid;
use crate::error::{Error, Result};

const MAGIC: &[u8; 4] = b"MPSF";
const VERSION: u32 = 1;

/// Writes a field in the `MPSF` binary layout.
///
/// Layout, all little-endian: magic `MPSF`, `u32` version, `u32` dim,
/// `u32` points per axis, `u32` components, `f64` box length, then for each
/// component in order and each mode in row-major index order the real and
/// imaginary parts as two `f64`.
pub fn write_field(field: &SpectralField, mut out: impl Write) -> std::io::Result<()> {
    let g = field.grid();
    out.write_all(MAGIC)?;
    for v in [
        VERSION,
        g.dim() as u32,
        g.points_per_axis() as u32,
        field.components() as u32,
    ] {
        out.write_all(&v.to_le_bytes())?;
    }
    out.write_all(&g.box_length().to_le_bytes())?;
    for c in field.coeffs() {
        out.write_all(&c.re.to_le_bytes())?;
        out.write_all(&c.im.to_le_bytes())?;
    }
    Ok(())
}

/// Reads a field written by [`write_field`].
pub fn read_field(mut input: impl Read) -> Result<SpectralField> {
    let bad = |e: std::io::Error| Error::structural(format!("truncated field data: {e}"));
    let mut magic = [0u8; 4];
    input.read_exact(&mut magic).map_err(bad)?;
    if &magic != MAGIC {
        return Err(Error::structural("not an MPSF field file"));
    }
    let mut word = [0u8; 4];
    let mut header = [0u32; 4];
    for h in header.iter_mut() {
        input.read_exact(&mut word).map_err(bad)?;
        *h = u32::from_le_bytes(word);
    }
    if header[0] != VERSION {
        return Err(Error::structural(format!("unsupported MPSF version {}", header[0])));
    }
    let mut dword = [0u8; 8];
    input.read_exact(&mut dword).map_err(bad)?;
    let grid = Grid::new(header[1] as usize, header[2] as usize, f64::from_le_bytes(dword))?;
    let components = header[3] as usize;
    let count = components
        .checked_mul(grid.len())
        .ok_or_else(|| Error::structural("field too large"))?;
    let mut coeffs = Vec::with_capacity(count);
    for _ in 0..count {
        input.read_exact(&mut dword).map_err(bad)?;
        let re = f64::from_le_bytes(dword);
        input.read_exact(&mut dword).map_err(bad)?;
        coeffs.push(Complex64::new(re, f64::from_le_bytes(dword)));
    }
    SpectralField::from_coeffs(grid, components, coeffs)
}

pub fn save_field(field: &SpectralField, path: &Path) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = std::io::BufWriter::new(file);
    write_field(field, &mut w)
        .and_then(|_| w.flush())
        .map_err(|e| Error::io(path, e))
}

pub fn load_field(path: &Path) -> Result<SpectralField> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_field(std::io::BufReader::new(file))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_bytes() {
        let g = Grid::new(2, 8, 3.5).unwrap();
        let f = SpectralField::from_fn(g, 2, |x| [x[0].sin(), (x[1] * 2.0).cos(), 0.0]);
        let mut buf = Vec::new();
        write_field(&f, &mut buf).unwrap();
        assert_eq!(buf.len(), 4 + 16 + 8 + 2 * 64 * 16);
        let back = read_field(buf.as_slice()).unwrap();
        assert_eq!(back, f);
    }

    #[test]
    fn rejects_garbage() {
        assert!(read_field(&b"NOPE"[..]).is_err());
        assert!(read_field(&b"MPSF\x01\0\0\0"[..]).is_err());
    }
}
