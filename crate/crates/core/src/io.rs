//! File formats: the RTEN tensor container and binary PGM/PPM images.
//!
//! RTEN layout, little-endian throughout:
//!
//! ```text
//! magic   4 bytes  "RTEN"
//! version u32      1
//! dtype   u8       0 (f32)
//! ndim    u8       1..=4
//! dims    ndim x u64
//! payload product(dims) x f32
//! ```

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::tensor::{Tensor, MAX_RANK};

pub const RTEN_MAGIC: [u8; 4] = *b"RTEN";
pub const RTEN_VERSION: u32 = 1;
pub const DTYPE_F32: u8 = 0;

/// Size in bytes of a header carrying `ndim` dims.
pub const fn header_len(ndim: usize) -> usize {
    4 + 4 + 1 + 1 + 8 * ndim
}

pub fn encode_tensor(t: &Tensor) -> Vec<u8> {
    let mut out = Vec::with_capacity(header_len(t.rank()) + 4 * t.len());
    out.extend_from_slice(&RTEN_MAGIC);
    out.extend_from_slice(&RTEN_VERSION.to_le_bytes());
    out.push(DTYPE_F32);
    out.push(t.rank() as u8);
    for &d in t.dims() {
        out.extend_from_slice(&(d as u64).to_le_bytes());
    }
    for v in t.data() {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

pub fn decode_tensor(bytes: &[u8]) -> Result<Tensor> {
    if bytes.len() < header_len(0) {
        return Err(Error::MalformedHeader(format!(
            "{} bytes is shorter than the fixed header",
            bytes.len()
        )));
    }
    if bytes[0..4] != RTEN_MAGIC {
        return Err(Error::MalformedHeader(format!(
            "bad magic {:?}",
            String::from_utf8_lossy(&bytes[0..4])
        )));
    }
    let version = u32::from_le_bytes(bytes[4..8].try_into().unwrap());
    if version != RTEN_VERSION {
        return Err(Error::MalformedHeader(format!(
            "unsupported version {version}"
        )));
    }
    if bytes[8] != DTYPE_F32 {
        return Err(Error::MalformedHeader(format!(
            "unsupported dtype {}",
            bytes[8]
        )));
    }
    let ndim = bytes[9] as usize;
    if ndim == 0 || ndim > MAX_RANK {
        return Err(Error::MalformedHeader(format!(
            "ndim {ndim} outside 1..={MAX_RANK}"
        )));
    }
    let header = header_len(ndim);
    if bytes.len() < header {
        return Err(Error::MalformedHeader(format!(
            "header needs {header} bytes, file has {}",
            bytes.len()
        )));
    }
    let mut dims = Vec::with_capacity(ndim);
    for chunk in bytes[10..header].chunks_exact(8) {
        let d = u64::from_le_bytes(chunk.try_into().unwrap());
        let d = usize::try_from(d)
            .ok()
            .filter(|&d| d > 0)
            .ok_or_else(|| Error::MalformedHeader(format!("invalid extent {d}")))?;
        dims.push(d);
    }
    let expected = dims
        .iter()
        .try_fold(4usize, |acc, &d| acc.checked_mul(d))
        .ok_or_else(|| Error::MalformedHeader(format!("dims {dims:?} overflow")))?;
    let payload = &bytes[header..];
    if payload.len() != expected {
        return Err(Error::TruncatedPayload {
            expected,
            found: payload.len(),
        });
    }
    let data: Vec<f32> = payload
        .chunks_exact(4)
        .map(|c| f32::from_le_bytes(c.try_into().unwrap()))
        .collect();
    if let Some(index) = data.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFiniteValue { index });
    }
    Tensor::new(dims, data)
}

pub fn read_tensor(path: impl AsRef<Path>) -> Result<Tensor> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_tensor(&bytes)
}

pub fn write_tensor(t: &Tensor, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, encode_tensor(t)).map_err(|e| Error::io(path, e))
}

/// Reads a binary PGM (P5) or PPM (P6) with maxval 255 into an `H x W x C`
/// tensor scaled to `[0, 1]`.
pub fn read_image(path: impl AsRef<Path>) -> Result<Tensor> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_pnm(&bytes)
}

pub fn decode_pnm(bytes: &[u8]) -> Result<Tensor> {
    let mut cur = PnmCursor { bytes, pos: 0 };
    let magic = cur.token()?;
    let channels = match magic.as_str() {
        "P5" => 1,
        "P6" => 3,
        m if m.starts_with('P') => {
            return Err(Error::UnsupportedFormat(format!("netpbm variant {m}")))
        }
        m => return Err(Error::UnsupportedFormat(format!("magic {m:?}"))),
    };
    let width = cur.number("width")?;
    let height = cur.number("height")?;
    let maxval = cur.number("maxval")?;
    if maxval != 255 {
        return Err(Error::UnsupportedFormat(format!(
            "maxval {maxval}, only 255 is supported"
        )));
    }
    if width == 0 || height == 0 {
        return Err(Error::MalformedImage(format!(
            "empty image {width}x{height}"
        )));
    }
    // exactly one whitespace byte separates the header from the raster
    match bytes.get(cur.pos) {
        Some(b) if b.is_ascii_whitespace() => cur.pos += 1,
        _ => return Err(Error::MalformedImage("missing raster separator".into())),
    }
    let expected = width * height * channels;
    let raster = &bytes[cur.pos..];
    if raster.len() < expected {
        return Err(Error::MalformedImage(format!(
            "raster has {} bytes, expected {expected}",
            raster.len()
        )));
    }
    let data = raster[..expected]
        .iter()
        .map(|&v| f32::from(v) / 255.0)
        .collect();
    Tensor::new(vec![height, width, channels], data)
}

/// Writes an `H x W x 1` or `H x W x 3` tensor as P5/P6, clamping to `[0, 1]`.
pub fn write_image(t: &Tensor, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let (h, w, c) = match *t.dims() {
        [h, w, c] if c == 1 || c == 3 => (h, w, c),
        [h, w] => (h, w, 1),
        _ => {
            return Err(Error::ShapeMismatch(format!(
                "image must be HxWx1 or HxWx3, got {:?}",
                t.dims()
            )))
        }
    };
    let magic = if c == 1 { "P5" } else { "P6" };
    let mut out = format!("{magic}\n{w} {h}\n255\n").into_bytes();
    out.extend(
        t.data()
            .iter()
            .map(|v| (v.clamp(0.0, 1.0) * 255.0).round() as u8),
    );
    fs::write(path, out).map_err(|e| Error::io(path, e))
}

struct PnmCursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl PnmCursor<'_> {
    fn skip_space_and_comments(&mut self) {
        while let Some(&b) = self.bytes.get(self.pos) {
            if b == b'#' {
                while let Some(&b) = self.bytes.get(self.pos) {
                    self.pos += 1;
                    if b == b'\n' || b == b'\r' {
                        break;
                    }
                }
            } else if b.is_ascii_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    fn token(&mut self) -> Result<String> {
        self.skip_space_and_comments();
        let start = self.pos;
        while let Some(&b) = self.bytes.get(self.pos) {
            if b.is_ascii_whitespace() || b == b'#' {
                break;
            }
            self.pos += 1;
        }
        if start == self.pos {
            return Err(Error::MalformedImage("unexpected end of header".into()));
        }
        Ok(String::from_utf8_lossy(&self.bytes[start..self.pos]).into_owned())
    }

    fn number(&mut self, what: &str) -> Result<usize> {
        let tok = self.token()?;
        tok.parse()
            .map_err(|_| Error::MalformedImage(format!("bad {what} {tok:?}")))
    }
}
