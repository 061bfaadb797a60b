//! Bit-exact binary format shared by every scheme artifact.
//!
//! Layout: magic `RVLC`, version u32 LE, params block
//! (n, m, q as u64; sigma, alpha, beta as IEEE-754 f64; p, ell, N, L as u64),
//! followed by tagged records. Each record is a 4-byte ASCII tag and a
//! payload of u64 LE words; matrices are `rows, cols` then row-major
//! entries, vectors are stored as 1 x len matrices, floats as f64 bits.

use crate::error::{Error, Result};
use crate::params::SchemeParams;
use crate::zq::{ZqMatrix, ZqVector};
use std::io::{Read, Write};

pub const MAGIC: &[u8; 4] = b"RVLC";
pub const VERSION: u32 = 1;

pub struct Writer<W: Write> {
    inner: W,
}

impl<W: Write> Writer<W> {
    /// Start a file: magic, version, params block.
    pub fn new(mut inner: W, params: &SchemeParams) -> Result<Self> {
        inner.write_all(MAGIC)?;
        inner.write_all(&VERSION.to_le_bytes())?;
        for v in [params.n as u64, params.m as u64, params.q] {
            inner.write_all(&v.to_le_bytes())?;
        }
        for f in [params.sigma, params.alpha, params.beta] {
            inner.write_all(&f.to_bits().to_le_bytes())?;
        }
        for v in [
            params.p,
            params.ell as u64,
            params.n_gadget as u64,
            params.big_l as u64,
        ] {
            inner.write_all(&v.to_le_bytes())?;
        }
        Ok(Writer { inner })
    }

    pub fn record_tag(&mut self, tag: &[u8; 4]) -> Result<()> {
        self.inner.write_all(tag)?;
        Ok(())
    }

    pub fn u64(&mut self, v: u64) -> Result<()> {
        self.inner.write_all(&v.to_le_bytes())?;
        Ok(())
    }

    pub fn f64(&mut self, v: f64) -> Result<()> {
        self.u64(v.to_bits())
    }

    pub fn matrix(&mut self, m: &ZqMatrix) -> Result<()> {
        self.u64(m.rows as u64)?;
        self.u64(m.cols as u64)?;
        for &e in m.entries() {
            self.u64(e)?;
        }
        Ok(())
    }

    pub fn vector(&mut self, v: &ZqVector) -> Result<()> {
        self.u64(1)?;
        self.u64(v.len() as u64)?;
        for &e in v.entries() {
            self.u64(e)?;
        }
        Ok(())
    }
}

pub struct Reader<R: Read> {
    inner: R,
    pub params: SchemeParams,
}

impl<R: Read> Reader<R> {
    /// Open a file, validating magic, version and the params block.
    pub fn new(mut inner: R, strict_mode: bool) -> Result<Self> {
        let mut magic = [0u8; 4];
        inner.read_exact(&mut magic)?;
        if &magic != MAGIC {
            return Err(Error::Serialization(format!(
                "bad magic {:?}, expected {:?}",
                magic, MAGIC
            )));
        }
        let mut vbuf = [0u8; 4];
        inner.read_exact(&mut vbuf)?;
        let version = u32::from_le_bytes(vbuf);
        if version != VERSION {
            return Err(Error::Serialization(format!(
                "unsupported version {version}, expected {VERSION}"
            )));
        }
        let mut r = ReaderRaw { inner };
        let n = r.u64()? as usize;
        let m = r.u64()? as usize;
        let q = r.u64()?;
        let sigma = f64::from_bits(r.u64()?);
        let alpha = f64::from_bits(r.u64()?);
        let beta = f64::from_bits(r.u64()?);
        let p = r.u64()?;
        let ell = r.u64()? as usize;
        let n_gadget = r.u64()? as usize;
        let big_l = r.u64()? as usize;
        let params = SchemeParams {
            n,
            m,
            q,
            sigma,
            alpha,
            beta,
            p,
            ell,
            n_gadget,
            big_l,
            strict_mode,
        };
        params
            .validate()
            .map_err(|e| Error::Serialization(format!("params block invalid: {e}")))?;
        Ok(Reader { inner: r.inner, params })
    }

    pub fn record_tag(&mut self) -> Result<[u8; 4]> {
        let mut tag = [0u8; 4];
        self.inner.read_exact(&mut tag)?;
        Ok(tag)
    }

    pub fn expect_tag(&mut self, tag: &[u8; 4]) -> Result<()> {
        let got = self.record_tag()?;
        if &got != tag {
            return Err(Error::Serialization(format!(
                "expected record tag {:?}, got {:?}",
                String::from_utf8_lossy(tag),
                String::from_utf8_lossy(&got)
            )));
        }
        Ok(())
    }

    pub fn u64(&mut self) -> Result<u64> {
        let mut buf = [0u8; 8];
        self.inner.read_exact(&mut buf)?;
        Ok(u64::from_le_bytes(buf))
    }

    pub fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_bits(self.u64()?))
    }

    pub fn matrix(&mut self, q: u64) -> Result<ZqMatrix> {
        let rows = self.u64()? as usize;
        let cols = self.u64()? as usize;
        if rows.checked_mul(cols).map_or(true, |n| n > 1 << 28) {
            return Err(Error::Serialization("matrix too large".into()));
        }
        let mut entries = Vec::with_capacity(rows * cols);
        for _ in 0..rows * cols {
            let e = self.u64()?;
            if e >= q {
                return Err(Error::Serialization(format!("entry {e} >= q = {q}")));
            }
            entries.push(e);
        }
        Ok(ZqMatrix::from_entries(rows, cols, entries, q))
    }

    pub fn vector(&mut self, q: u64) -> Result<ZqVector> {
        let m = self.matrix(q)?;
        if m.rows != 1 {
            return Err(Error::Serialization(format!(
                "expected a 1-row vector record, got {} rows",
                m.rows
            )));
        }
        Ok(m.row(0))
    }
}

struct ReaderRaw<R: Read> {
    inner: R,
}

impl<R: Read> ReaderRaw<R> {
    fn u64(&mut self) -> Result<u64> {
        let mut buf = [0u8; 8];
        self.inner.read_exact(&mut buf)?;
        Ok(u64::from_le_bytes(buf))
    }
}
