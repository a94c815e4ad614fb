//! Versioned little-endian binary format for [`Mlp`] parameters.
//!
//! ```text
//! "SPZN" | version u32 | layer count u32 |
//!   per layer: in u32 | out u32 | activation tag u8 | block count u32 |
//!              block sizes u32... | weights f64... (row-major out x in) | biases f64...
//! ```

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use super::{Activation, DenseLayer, Matrix, Mlp};
use crate::error::{Error, Result};

pub const MAGIC: &[u8; 4] = b"SPZN";
pub const FORMAT_VERSION: u32 = 1;

pub fn write_mlp_to<W: Write>(mlp: &Mlp, mut w: W) -> std::io::Result<()> {
    w.write_all(MAGIC)?;
    w.write_all(&FORMAT_VERSION.to_le_bytes())?;
    w.write_all(&(mlp.layers().len() as u32).to_le_bytes())?;
    for layer in mlp.layers() {
        w.write_all(&(layer.input_dim() as u32).to_le_bytes())?;
        w.write_all(&(layer.output_dim() as u32).to_le_bytes())?;
        w.write_all(&[layer.activation.tag()])?;
        let blocks = layer.activation.blocks();
        w.write_all(&(blocks.len() as u32).to_le_bytes())?;
        for &b in blocks {
            w.write_all(&(b as u32).to_le_bytes())?;
        }
        for &v in layer.weights.as_slice() {
            w.write_all(&v.to_le_bytes())?;
        }
        for &v in &layer.bias {
            w.write_all(&v.to_le_bytes())?;
        }
    }
    w.flush()
}

pub fn write_mlp(mlp: &Mlp, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    write_mlp_to(mlp, BufWriter::new(file)).map_err(|e| Error::io(path, e))
}

fn u32_from<R: Read>(r: &mut R) -> Result<u32> {
    let mut buf = [0u8; 4];
    r.read_exact(&mut buf)
        .map_err(|e| Error::Format(format!("truncated file: {e}")))?;
    Ok(u32::from_le_bytes(buf))
}

fn f64s_from<R: Read>(r: &mut R, n: usize) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(n);
    let mut buf = [0u8; 8];
    for _ in 0..n {
        r.read_exact(&mut buf)
            .map_err(|e| Error::Format(format!("truncated file: {e}")))?;
        out.push(f64::from_le_bytes(buf));
    }
    Ok(out)
}

pub fn read_mlp_from<R: Read>(mut r: R) -> Result<Mlp> {
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)
        .map_err(|e| Error::Format(format!("truncated file: {e}")))?;
    if &magic != MAGIC {
        return Err(Error::Format(format!("bad magic {magic:?}")));
    }
    let version = u32_from(&mut r)?;
    if version != FORMAT_VERSION {
        return Err(Error::Format(format!("unsupported version {version}")));
    }
    let count = u32_from(&mut r)? as usize;
    let mut layers = Vec::with_capacity(count);
    for _ in 0..count {
        let input = u32_from(&mut r)? as usize;
        let output = u32_from(&mut r)? as usize;
        let mut tag = [0u8; 1];
        r.read_exact(&mut tag)
            .map_err(|e| Error::Format(format!("truncated file: {e}")))?;
        let n_blocks = u32_from(&mut r)? as usize;
        let blocks = (0..n_blocks)
            .map(|_| u32_from(&mut r).map(|b| b as usize))
            .collect::<Result<Vec<_>>>()?;
        let activation = Activation::from_tag(tag[0], blocks)?;
        let weights = Matrix::from_vec(output, input, f64s_from(&mut r, input * output)?)?;
        let bias = f64s_from(&mut r, output)?;
        layers.push(DenseLayer::new(weights, bias, activation)?);
    }
    Mlp::new(layers)
}

pub fn read_mlp(path: impl AsRef<Path>) -> Result<Mlp> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_mlp_from(BufReader::new(file))
}
