//! Reader and writer for the `.npy` array container, restricted to 2-d
//! little-endian `<f4` / `<f8` arrays in C order.
//!
//! Layout: `\x93NUMPY`, major/minor version bytes, header length (u16 LE for
//! version 1.x, u32 LE for 2.x/3.x), an ASCII dict literal padded with spaces
//! and a trailing newline so the payload starts on a 64-byte boundary, then
//! the row-major payload.

use std::fs;
use std::path::{Path, PathBuf};

use nalgebra::DMatrix;

use crate::error::{DiversityError, Result};

const MAGIC: &[u8] = b"\x93NUMPY";
const ALIGN: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dtype {
    Float32,
    Float64,
}

impl Dtype {
    pub fn descr(self) -> &'static str {
        match self {
            Dtype::Float32 => "<f4",
            Dtype::Float64 => "<f8",
        }
    }

    pub fn size(self) -> usize {
        match self {
            Dtype::Float32 => 4,
            Dtype::Float64 => 8,
        }
    }

    fn from_descr(descr: &str) -> Option<Self> {
        match descr {
            "<f4" => Some(Dtype::Float32),
            "<f8" => Some(Dtype::Float64),
            _ => None,
        }
    }
}

/// Metadata of an array file on disk.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArrayFile {
    pub path: PathBuf,
    pub dtype: Dtype,
    /// `(N, D)`.
    pub shape: (usize, usize),
}

/// Contents of an array file, widened to `f64`.
#[derive(Debug, Clone, PartialEq)]
pub struct ArrayPayload {
    pub file: ArrayFile,
    pub matrix: DMatrix<f64>,
}

pub fn read_array(path: impl AsRef<Path>) -> Result<ArrayPayload> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| DiversityError::io(path, e))?;
    parse(path, &bytes)
}

/// Writes `matrix` with a canonical version 1.0 header.
///
/// `Float32` output rounds every value to the nearest `f32`.
pub fn write_array(
    matrix: &DMatrix<f64>,
    path: impl AsRef<Path>,
    dtype: Dtype,
) -> Result<ArrayFile> {
    let path = path.as_ref();
    let (n, d) = matrix.shape();
    let bytes = encode(matrix, dtype);
    fs::write(path, bytes).map_err(|e| DiversityError::io(path, e))?;
    Ok(ArrayFile {
        path: path.to_path_buf(),
        dtype,
        shape: (n, d),
    })
}

fn header_text(dtype: Dtype, n: usize, d: usize) -> String {
    let dict = format!(
        "{{'descr': '{}', 'fortran_order': False, 'shape': ({n}, {d}), }}",
        dtype.descr()
    );
    // magic(6) + version(2) + length(2) + dict + padding + '\n'
    let unpadded = MAGIC.len() + 4 + dict.len() + 1;
    let pad = (ALIGN - unpadded % ALIGN) % ALIGN;
    format!("{dict}{}\n", " ".repeat(pad))
}

fn encode(matrix: &DMatrix<f64>, dtype: Dtype) -> Vec<u8> {
    let (n, d) = matrix.shape();
    let header = header_text(dtype, n, d);
    let mut out = Vec::with_capacity(MAGIC.len() + 4 + header.len() + n * d * dtype.size());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&[1, 0]);
    out.extend_from_slice(&(header.len() as u16).to_le_bytes());
    out.extend_from_slice(header.as_bytes());
    for i in 0..n {
        for j in 0..d {
            let v = matrix[(i, j)];
            match dtype {
                Dtype::Float32 => out.extend_from_slice(&(v as f32).to_le_bytes()),
                Dtype::Float64 => out.extend_from_slice(&v.to_le_bytes()),
            }
        }
    }
    out
}

fn parse(path: &Path, bytes: &[u8]) -> Result<ArrayPayload> {
    let unsupported = |reason: String| DiversityError::UnsupportedFormat {
        path: path.to_path_buf(),
        reason,
    };
    let corrupt = |reason: String| DiversityError::CorruptFile {
        path: path.to_path_buf(),
        reason,
    };

    if bytes.len() < MAGIC.len() + 2 || &bytes[..MAGIC.len()] != MAGIC {
        return Err(unsupported("missing \\x93NUMPY magic".into()));
    }
    let major = bytes[MAGIC.len()];
    let (len_bytes, header_start) = match major {
        1 => (2, MAGIC.len() + 4),
        2 | 3 => (4, MAGIC.len() + 6),
        v => return Err(unsupported(format!("format version {v}.x"))),
    };
    if bytes.len() < header_start {
        return Err(corrupt("file ends inside the preamble".into()));
    }
    let len_field = &bytes[MAGIC.len() + 2..header_start];
    let header_len = if len_bytes == 2 {
        u16::from_le_bytes([len_field[0], len_field[1]]) as usize
    } else {
        u32::from_le_bytes([len_field[0], len_field[1], len_field[2], len_field[3]]) as usize
    };
    let payload_start = header_start + header_len;
    if bytes.len() < payload_start {
        return Err(corrupt("file ends inside the header".into()));
    }
    let header = std::str::from_utf8(&bytes[header_start..payload_start])
        .map_err(|_| corrupt("header is not valid text".into()))?;
    let fields = HeaderFields::parse(header).map_err(corrupt)?;

    if fields.fortran_order {
        return Err(unsupported(
            "fortran_order=True arrays are not accepted".into(),
        ));
    }
    let dtype = Dtype::from_descr(&fields.descr).ok_or_else(|| {
        unsupported(format!(
            "dtype '{}' (expected '<f4' or '<f8')",
            fields.descr
        ))
    })?;
    let (n, d) = match fields.shape.as_slice() {
        &[n, d] if n > 0 && d > 0 => (n, d),
        _ => {
            return Err(DiversityError::BadShape {
                path: path.to_path_buf(),
                shape: fields.shape,
            })
        }
    };

    let payload = &bytes[payload_start..];
    let expected = n
        .checked_mul(d)
        .and_then(|c| c.checked_mul(dtype.size()))
        .ok_or_else(|| corrupt(format!("shape ({n}, {d}) overflows")))?;
    if payload.len() != expected {
        return Err(corrupt(format!(
            "header declares ({n}, {d}) {} = {expected} bytes, payload holds {}",
            dtype.descr(),
            payload.len()
        )));
    }

    let values: Vec<f64> = match dtype {
        Dtype::Float32 => payload
            .chunks_exact(4)
            .map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]]) as f64)
            .collect(),
        Dtype::Float64 => payload
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes([c[0], c[1], c[2], c[3], c[4], c[5], c[6], c[7]]))
            .collect(),
    };
    Ok(ArrayPayload {
        file: ArrayFile {
            path: path.to_path_buf(),
            dtype,
            shape: (n, d),
        },
        matrix: DMatrix::from_row_slice(n, d, &values),
    })
}

#[derive(Debug, PartialEq)]
struct HeaderFields {
    descr: String,
    fortran_order: bool,
    shape: Vec<usize>,
}

impl HeaderFields {
    /// Parses the Python dict literal with keys `descr`, `fortran_order` and
    /// `shape`, in any order.
    fn parse(header: &str) -> std::result::Result<Self, String> {
        let body = header
            .trim_end()
            .strip_prefix('{')
            .and_then(|h| h.strip_suffix('}'))
            .ok_or_else(|| "header is not a dict literal".to_string())?;

        let mut cursor = Cursor { rest: body };
        let (mut descr, mut fortran, mut shape) = (None, None, None);
        loop {
            cursor.skip_ws();
            if cursor.rest.is_empty() {
                break;
            }
            let key = cursor.quoted()?;
            cursor.skip_ws();
            cursor.expect(':')?;
            cursor.skip_ws();
            match key.as_str() {
                "descr" => descr = Some(cursor.quoted()?),
                "fortran_order" => fortran = Some(cursor.boolean()?),
                "shape" => shape = Some(cursor.tuple()?),
                other => return Err(format!("unexpected header key '{other}'")),
            }
            cursor.skip_ws();
            if !cursor.eat(',') {
                cursor.skip_ws();
                if !cursor.rest.is_empty() {
                    return Err("expected ',' between header entries".into());
                }
            }
        }
        Ok(HeaderFields {
            descr: descr.ok_or("header lacks 'descr'")?,
            fortran_order: fortran.ok_or("header lacks 'fortran_order'")?,
            shape: shape.ok_or("header lacks 'shape'")?,
        })
    }
}

struct Cursor<'a> {
    rest: &'a str,
}

impl Cursor<'_> {
    fn skip_ws(&mut self) {
        self.rest = self.rest.trim_start();
    }

    fn eat(&mut self, c: char) -> bool {
        match self.rest.strip_prefix(c) {
            Some(r) => {
                self.rest = r;
                true
            }
            None => false,
        }
    }

    fn expect(&mut self, c: char) -> std::result::Result<(), String> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(format!("expected '{c}' in header"))
        }
    }

    fn quoted(&mut self) -> std::result::Result<String, String> {
        let quote = self
            .rest
            .chars()
            .next()
            .filter(|&c| c == '\'' || c == '"')
            .ok_or("expected a quoted string in header")?;
        let body = &self.rest[1..];
        let end = body.find(quote).ok_or("unterminated string in header")?;
        let s = body[..end].to_string();
        self.rest = &body[end + 1..];
        Ok(s)
    }

    fn boolean(&mut self) -> std::result::Result<bool, String> {
        for (lit, v) in [("True", true), ("False", false)] {
            if let Some(r) = self.rest.strip_prefix(lit) {
                self.rest = r;
                return Ok(v);
            }
        }
        Err("expected True or False in header".into())
    }

    fn tuple(&mut self) -> std::result::Result<Vec<usize>, String> {
        self.expect('(')?;
        let end = self.rest.find(')').ok_or("unterminated shape tuple")?;
        let inner = &self.rest[..end];
        self.rest = &self.rest[end + 1..];
        inner
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(|s| {
                s.trim_end_matches('L')
                    .parse::<usize>()
                    .map_err(|_| format!("bad shape entry '{s}'"))
            })
            .collect()
    }
}
