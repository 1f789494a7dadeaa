//! Binary container for matrices, vectors and (in the scheme layer) key and
//! ciphertext files.
//!
//! Every record starts with the magic `"SCETv1\0"`, a kind byte, then
//! `q`, `rows`, `cols` as 8-byte little-endian words, then the entries as
//! 8-byte little-endian words. Residues are stored as-is; signed integer
//! records store two's-complement bit patterns. The format favours bit-exact
//! test vectors over compactness.

use crate::error::{Error, Result};
use crate::zq::{IntMatrix, IntVector, ZqMatrix, ZqVector};

/// Leading magic bytes of every record ("SCETv1" plus a NUL).
pub const MAGIC: &[u8; 7] = b"SCETv1\0";

/// Record kind bytes.
pub mod kind {
    pub const MATRIX: u8 = 1;
    pub const VECTOR: u8 = 2;
    pub const INT_MATRIX: u8 = 3;
    pub const INT_VECTOR: u8 = 4;
    pub const PUBLIC_PARAMS: u8 = 16;
    pub const RECEIVER_PK: u8 = 17;
    pub const RECEIVER_SK: u8 = 18;
    pub const SENDER_PK: u8 = 19;
    pub const SENDER_SK: u8 = 20;
    pub const CIPHERTEXT: u8 = 21;
    pub const TAG_KEY: u8 = 22;
}

/// Incremental writer for container records.
#[derive(Default)]
pub struct Writer {
    buf: Vec<u8>,
}

impl Writer {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn into_bytes(self) -> Vec<u8> {
        self.buf
    }

    pub fn put_u64(&mut self, v: u64) {
        self.buf.extend_from_slice(&v.to_le_bytes());
    }

    pub fn put_bytes(&mut self, b: &[u8]) {
        self.buf.extend_from_slice(b);
    }

    pub fn put_header(&mut self, kind: u8) {
        self.buf.extend_from_slice(MAGIC);
        self.buf.push(kind);
    }

    pub fn put_matrix(&mut self, m: &ZqMatrix) {
        self.put_header(kind::MATRIX);
        self.put_u64(m.modulus());
        self.put_u64(m.rows() as u64);
        self.put_u64(m.cols() as u64);
        for &e in m.entries() {
            self.put_u64(e);
        }
    }

    pub fn put_vector(&mut self, v: &ZqVector) {
        self.put_header(kind::VECTOR);
        self.put_u64(v.modulus());
        self.put_u64(v.len() as u64);
        self.put_u64(1);
        for &e in v.entries() {
            self.put_u64(e);
        }
    }

    pub fn put_int_matrix(&mut self, m: &IntMatrix) {
        self.put_header(kind::INT_MATRIX);
        self.put_u64(0);
        self.put_u64(m.rows() as u64);
        self.put_u64(m.cols() as u64);
        for &e in m.entries() {
            self.put_u64(e as u64);
        }
    }

    pub fn put_int_vector(&mut self, v: &IntVector) {
        self.put_header(kind::INT_VECTOR);
        self.put_u64(0);
        self.put_u64(v.len() as u64);
        self.put_u64(1);
        for &e in v.entries() {
            self.put_u64(e as u64);
        }
    }
}

/// Cursor-based reader for container records.
pub struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    pub fn new(buf: &'a [u8]) -> Self {
        Self { buf, pos: 0 }
    }

    pub fn remaining(&self) -> usize {
        self.buf.len() - self.pos
    }

    pub fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        if self.remaining() < n {
            return Err(Error::Truncated);
        }
        let out = &self.buf[self.pos..self.pos + n];
        self.pos += n;
        Ok(out)
    }

    pub fn get_u64(&mut self) -> Result<u64> {
        let b = self.take(8)?;
        Ok(u64::from_le_bytes(b.try_into().expect("8 bytes")))
    }

    /// Read and verify the magic, returning the kind byte.
    pub fn get_header(&mut self) -> Result<u8> {
        let m = self.take(MAGIC.len())?;
        if m != MAGIC {
            return Err(Error::BadMagic);
        }
        let k = self.take(1)?[0];
        Ok(k)
    }

    pub fn expect_header(&mut self, expected: u8) -> Result<()> {
        let got = self.get_header()?;
        if got != expected {
            return Err(Error::UnexpectedKind { got, expected });
        }
        Ok(())
    }

    fn get_dims(&mut self) -> Result<(u64, usize, usize)> {
        let q = self.get_u64()?;
        let rows = self.get_u64()? as usize;
        let cols = self.get_u64()? as usize;
        // Bound before allocating; each declared entry needs 8 bytes.
        if rows.checked_mul(cols).map_or(true, |n| n > self.remaining() / 8) {
            return Err(Error::Truncated);
        }
        Ok((q, rows, cols))
    }

    pub fn get_matrix(&mut self) -> Result<ZqMatrix> {
        self.expect_header(kind::MATRIX)?;
        let (q, rows, cols) = self.get_dims()?;
        let mut entries = Vec::with_capacity(rows * cols);
        for _ in 0..rows * cols {
            let e = self.get_u64()?;
            if e >= q {
                return Err(Error::Malformed(format!("entry {e} >= modulus {q}")));
            }
            entries.push(e);
        }
        ZqMatrix::from_entries(rows, cols, q, &entries)
            .map_err(|e| Error::Malformed(e.to_string()))
    }

    pub fn get_vector(&mut self) -> Result<ZqVector> {
        self.expect_header(kind::VECTOR)?;
        let (q, rows, cols) = self.get_dims()?;
        if cols != 1 {
            return Err(Error::Malformed("vector record with cols != 1".into()));
        }
        let mut entries = Vec::with_capacity(rows);
        for _ in 0..rows {
            let e = self.get_u64()?;
            if e >= q {
                return Err(Error::Malformed(format!("entry {e} >= modulus {q}")));
            }
            entries.push(e);
        }
        ZqVector::from_entries(q, &entries).map_err(|e| Error::Malformed(e.to_string()))
    }

    pub fn get_int_matrix(&mut self) -> Result<IntMatrix> {
        self.expect_header(kind::INT_MATRIX)?;
        let (_, rows, cols) = self.get_dims()?;
        let mut entries = Vec::with_capacity(rows * cols);
        for _ in 0..rows * cols {
            entries.push(self.get_u64()? as i64);
        }
        IntMatrix::from_entries(rows, cols, entries).map_err(|e| Error::Malformed(e.to_string()))
    }

    pub fn get_int_vector(&mut self) -> Result<IntVector> {
        self.expect_header(kind::INT_VECTOR)?;
        let (_, rows, cols) = self.get_dims()?;
        if cols != 1 {
            return Err(Error::Malformed("int vector record with cols != 1".into()));
        }
        let mut entries = Vec::with_capacity(rows);
        for _ in 0..rows {
            entries.push(self.get_u64()? as i64);
        }
        Ok(IntVector::new(entries))
    }

    /// Fail unless the whole buffer was consumed.
    pub fn finish(&self) -> Result<()> {
        if self.remaining() != 0 {
            return Err(Error::Malformed(format!(
                "{} trailing bytes",
                self.remaining()
            )));
        }
        Ok(())
    }
}

/// Serialize a single matrix as a standalone record.
pub fn matrix_to_bytes(m: &ZqMatrix) -> Vec<u8> {
    let mut w = Writer::new();
    w.put_matrix(m);
    w.into_bytes()
}

/// Parse a standalone matrix record.
pub fn matrix_from_bytes(b: &[u8]) -> Result<ZqMatrix> {
    let mut r = Reader::new(b);
    let m = r.get_matrix()?;
    r.finish()?;
    Ok(m)
}

/// Serialize a single vector as a standalone record.
pub fn vector_to_bytes(v: &ZqVector) -> Vec<u8> {
    let mut w = Writer::new();
    w.put_vector(v);
    w.into_bytes()
}

/// Parse a standalone vector record.
pub fn vector_from_bytes(b: &[u8]) -> Result<ZqVector> {
    let mut r = Reader::new(b);
    let v = r.get_vector()?;
    r.finish()?;
    Ok(v)
}
