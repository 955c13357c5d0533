//! The `T4F1` binary tensor format.
//!
//! Header: magic `T4F1`, then `n1`, `n2`, `m`, `flags` as little-endian
//! `u64`. Flag bit 0 announces a table of `n1·n2` structure bytes
//! (0 dense, 1 lower triangular, 2 zero) in slice order. The body holds every
//! entry as interleaved little-endian `f64` pairs `(re, im)`: slices in
//! column-of-blocks order, each slice row-major.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use num_complex::Complex64 as C64;

use super::block::{Block, BlockStructure};
use super::matm::MatM;
use super::tensor4::Tensor4;
use crate::{Error, Result};

const MAGIC: &[u8; 4] = b"T4F1";
const FLAG_STRUCTURE: u64 = 1;

pub fn write_t4f<W: Write>(mut w: W, a: &Tensor4) -> Result<()> {
    let (n1, n2, m) = a.dims();
    w.write_all(MAGIC)?;
    for x in [n1 as u64, n2 as u64, m as u64, FLAG_STRUCTURE] {
        w.write_all(&x.to_le_bytes())?;
    }
    let table: Vec<u8> = a.blocks().iter().map(|b| b.structure().code()).collect();
    w.write_all(&table)?;
    let zero = vec![0u8; 16 * m * m];
    for b in a.blocks() {
        match b.mat() {
            None => w.write_all(&zero)?,
            Some(s) => {
                for z in s.data() {
                    w.write_all(&z.re.to_le_bytes())?;
                    w.write_all(&z.im.to_le_bytes())?;
                }
            }
        }
    }
    w.flush()?;
    Ok(())
}

fn read_u64<R: Read>(r: &mut R) -> Result<u64> {
    let mut buf = [0u8; 8];
    r.read_exact(&mut buf)?;
    Ok(u64::from_le_bytes(buf))
}

pub fn read_t4f<R: Read>(mut r: R) -> Result<Tensor4> {
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(Error::Format(format!("bad magic {magic:?}")));
    }
    let dim = |x: u64| usize::try_from(x).map_err(|_| Error::Format(format!("dimension {x} too large")));
    let n1 = dim(read_u64(&mut r)?)?;
    let n2 = dim(read_u64(&mut r)?)?;
    let m = dim(read_u64(&mut r)?)?;
    let flags = read_u64(&mut r)?;
    if flags & !FLAG_STRUCTURE != 0 {
        return Err(Error::Format(format!("unknown flags {flags:#x}")));
    }
    n1.checked_mul(n2)
        .and_then(|x| x.checked_mul(m))
        .and_then(|x| x.checked_mul(m))
        .ok_or_else(|| Error::Format("tensor size overflows".into()))?;
    let table = if flags & FLAG_STRUCTURE != 0 {
        let mut t = vec![0u8; n1 * n2];
        r.read_exact(&mut t)?;
        let parsed: Option<Vec<BlockStructure>> = t.into_iter().map(BlockStructure::from_code).collect();
        Some(parsed.ok_or_else(|| Error::Format("bad structure code".into()))?)
    } else {
        None
    };
    let mut blocks = Vec::with_capacity(n1 * n2);
    let mut buf = vec![0u8; 16 * m * m];
    for k in 0..n1 * n2 {
        r.read_exact(&mut buf)?;
        let data = buf
            .chunks_exact(16)
            .map(|c| {
                C64::new(f64::from_le_bytes(c[..8].try_into().unwrap()), f64::from_le_bytes(c[8..].try_into().unwrap()))
            })
            .collect();
        let mat = MatM::new(m, data)?;
        let block = match &table {
            None => Block::classify(mat),
            Some(t) => Block::with_structure(mat, t[k])
                .ok_or_else(|| Error::Format(format!("slice {k} violates its structure tag {:?}", t[k])))?,
        };
        blocks.push(block);
    }
    let mut rest = [0u8; 1];
    if r.read(&mut rest)? != 0 {
        return Err(Error::Format("trailing bytes".into()));
    }
    Tensor4::from_blocks(n1, n2, m, blocks)
}

pub fn save_t4f(path: &Path, a: &Tensor4) -> Result<()> {
    write_t4f(BufWriter::new(File::create(path)?), a)
}

pub fn load_t4f(path: &Path) -> Result<Tensor4> {
    read_t4f(BufReader::new(File::open(path)?))
}
