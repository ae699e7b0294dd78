//! Binary field checkpoints.
//!
//! Layout (little endian): magic `MLIM`, format version `u32`, `n u32`,
//! field count `u32`, time `f64`, epsilon `f64`, then every field as `n³`
//! `f64` values with x₁ fastest.

use std::io::{Read, Write};
use std::sync::Arc;

use super::{Grid, SpectralField};
use crate::error::{Error, Result};

pub const MAGIC: &[u8; 4] = b"MLIM";
pub const FORMAT_VERSION: u32 = 1;

#[derive(Clone, Debug)]
pub struct Checkpoint {
    pub time: f64,
    pub epsilon: f64,
    pub fields: Vec<SpectralField>,
}

impl Checkpoint {
    pub fn grid(&self) -> Option<&Arc<Grid>> {
        self.fields.first().map(|f| f.grid())
    }

    pub fn write_to(&self, mut w: impl Write) -> Result<()> {
        let grid = self
            .grid()
            .ok_or_else(|| Error::Format("checkpoint without fields".into()))?;
        for f in &self.fields[1..] {
            self.fields[0].check_grid(f)?;
        }
        w.write_all(MAGIC)?;
        w.write_all(&FORMAT_VERSION.to_le_bytes())?;
        w.write_all(&(grid.n() as u32).to_le_bytes())?;
        w.write_all(&(self.fields.len() as u32).to_le_bytes())?;
        w.write_all(&self.time.to_le_bytes())?;
        w.write_all(&self.epsilon.to_le_bytes())?;
        let mut buf = Vec::with_capacity(grid.len() * 8);
        for f in &self.fields {
            buf.clear();
            for v in f.values() {
                buf.extend_from_slice(&v.to_le_bytes());
            }
            w.write_all(&buf)?;
        }
        Ok(())
    }

    pub fn read_from(mut r: impl Read) -> Result<Self> {
        let mut magic = [0u8; 4];
        r.read_exact(&mut magic)?;
        if &magic != MAGIC {
            return Err(Error::Format(format!("bad magic {magic:?}")));
        }
        let version = read_u32(&mut r)?;
        if version != FORMAT_VERSION {
            return Err(Error::Format(format!(
                "unsupported format version {version}"
            )));
        }
        let n = read_u32(&mut r)? as usize;
        let count = read_u32(&mut r)? as usize;
        let time = read_f64(&mut r)?;
        let epsilon = read_f64(&mut r)?;
        let grid = Grid::new(n)?;
        let mut bytes = vec![0u8; grid.len() * 8];
        let mut fields = Vec::with_capacity(count);
        for _ in 0..count {
            r.read_exact(&mut bytes)?;
            let values = bytes
                .chunks_exact(8)
                .map(|b| f64::from_le_bytes(b.try_into().expect("chunk of 8")))
                .collect();
            fields.push(SpectralField::from_values(&grid, values));
        }
        Ok(Self {
            time,
            epsilon,
            fields,
        })
    }

    pub fn save(&self, path: impl AsRef<std::path::Path>) -> Result<()> {
        let file = std::fs::File::create(path)?;
        let mut w = std::io::BufWriter::new(file);
        self.write_to(&mut w)?;
        w.flush()?;
        Ok(())
    }

    pub fn load(path: impl AsRef<std::path::Path>) -> Result<Self> {
        let file = std::fs::File::open(path)?;
        Self::read_from(std::io::BufReader::new(file))
    }
}

fn read_u32(r: &mut impl Read) -> Result<u32> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b))
}

fn read_f64(r: &mut impl Read) -> Result<f64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(f64::from_le_bytes(b))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_layout_and_round_trip() {
        let g = Grid::new(8).unwrap();
        let f = SpectralField::from_fn(&g, |x| x[0].sin() * x[2].cos());
        let cp = Checkpoint {
            time: 0.25,
            epsilon: 0.125,
            fields: vec![f.clone()],
        };
        let mut bytes = Vec::new();
        cp.write_to(&mut bytes).unwrap();
        assert_eq!(bytes.len(), 4 + 4 * 3 + 8 * 2 + 8 * 512);
        assert_eq!(&bytes[..4], b"MLIM");
        assert_eq!(u32::from_le_bytes(bytes[8..12].try_into().unwrap()), 8);
        // first sample is f at the origin (x1 fastest)
        let first = f64::from_le_bytes(bytes[32..40].try_into().unwrap());
        assert_eq!(first, f.values()[0]);
        let back = Checkpoint::read_from(bytes.as_slice()).unwrap();
        assert_eq!(back.time, 0.25);
        assert_eq!(back.epsilon, 0.125);
        assert_eq!(back.fields[0].values(), f.values());
    }

    #[test]
    fn rejects_bad_magic() {
        let bytes = b"NOPE\x01\x00\x00\x00".to_vec();
        assert!(matches!(
            Checkpoint::read_from(bytes.as_slice()),
            Err(Error::Format(_))
        ));
    }
}
