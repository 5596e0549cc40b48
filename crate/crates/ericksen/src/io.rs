//! Ledger CSV, basis manifests and binary checkpoints.

use std::io::{self, Read, Write};

use thiserror::Error;

use crate::basis::{DirectorBasis, VelocityBasis};
use crate::diagnostics::{format_g17, EnergyRecord};
use crate::simulator::SpectralState;

pub fn write_ledger<W: Write>(mut w: W, records: &[EnergyRecord]) -> io::Result<()> {
    writeln!(w, "{}", EnergyRecord::CSV_HEADER)?;
    for r in records {
        writeln!(w, "{}", r.csv_row())?;
    }
    Ok(())
}

pub fn ledger_string(records: &[EnergyRecord]) -> String {
    let mut buf = Vec::new();
    write_ledger(&mut buf, records).expect("write to memory");
    String::from_utf8(buf).expect("ascii")
}

/// One line per mode: `index,kind,k1,k2,k3,sigma,p1,p2,p3,parity`.
pub fn basis_manifest(velocity: &VelocityBasis, director: &DirectorBasis) -> String {
    let mut out = String::from("index,kind,k1,k2,k3,sigma,p1,p2,p3,parity\n");
    for (i, m) in velocity.modes().iter().enumerate() {
        let p = m.polarization.0;
        let s = m.k.iter().map(|x| x * x).sum::<i32>() as f64;
        out.push_str(&format!(
            "{i},velocity,{},{},{},{},{},{},{},{}\n",
            m.k[0],
            m.k[1],
            m.k[2],
            format_g17(s),
            format_g17(p[0]),
            format_g17(p[1]),
            format_g17(p[2]),
            m.parity.as_str()
        ));
    }
    for (i, m) in director.modes().iter().enumerate() {
        let p = m.vector.0;
        out.push_str(&format!(
            "{i},director,{},{},{},{},{},{},{},{}\n",
            m.k[0],
            m.k[1],
            m.k[2],
            format_g17(m.sigma),
            format_g17(p[0]),
            format_g17(p[1]),
            format_g17(p[2]),
            m.parity.as_str()
        ));
    }
    out
}

const MAGIC: &[u8; 8] = b"ELSTATE\0";
const VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum CheckpointError {
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("not a checkpoint file")]
    Magic,
    #[error("unsupported checkpoint version {0}")]
    Version(u32),
    #[error("checkpoint belongs to a different configuration")]
    Hash,
    #[error("mode counts {got:?} do not match {want:?}")]
    Shape { got: (usize, usize), want: (usize, usize) },
}

/// Header (magic, version, config hash, `t`, mode counts) followed by the
/// coefficients as little-endian `f64`.
pub fn write_checkpoint<W: Write>(mut w: W, hash: &[u8; 32], state: &SpectralState) -> io::Result<()> {
    w.write_all(MAGIC)?;
    w.write_all(&VERSION.to_le_bytes())?;
    w.write_all(hash)?;
    w.write_all(&state.t.to_le_bytes())?;
    w.write_all(&(state.v.len() as u64).to_le_bytes())?;
    w.write_all(&(state.d.len() as u64).to_le_bytes())?;
    for x in state.v.iter().chain(&state.d) {
        w.write_all(&x.to_le_bytes())?;
    }
    Ok(())
}

fn read_array<const N: usize, R: Read>(r: &mut R) -> io::Result<[u8; N]> {
    let mut b = [0u8; N];
    r.read_exact(&mut b)?;
    Ok(b)
}

/// Reads a checkpoint; with `expect` set, the hash and mode counts must match.
pub fn read_checkpoint<R: Read>(
    mut r: R,
    expect: Option<(&[u8; 32], usize, usize)>,
) -> Result<([u8; 32], SpectralState), CheckpointError> {
    if &read_array::<8, _>(&mut r)? != MAGIC {
        return Err(CheckpointError::Magic);
    }
    let version = u32::from_le_bytes(read_array(&mut r)?);
    if version != VERSION {
        return Err(CheckpointError::Version(version));
    }
    let hash: [u8; 32] = read_array(&mut r)?;
    let t = f64::from_le_bytes(read_array(&mut r)?);
    let nv = u64::from_le_bytes(read_array(&mut r)?) as usize;
    let nd = u64::from_le_bytes(read_array(&mut r)?) as usize;
    if let Some((h, ev, ed)) = expect {
        if h != &hash {
            return Err(CheckpointError::Hash);
        }
        if (nv, nd) != (ev, ed) {
            return Err(CheckpointError::Shape {
                got: (nv, nd),
                want: (ev, ed),
            });
        }
    }
    let mut read_vec = |n: usize| -> io::Result<Vec<f64>> {
        (0..n).map(|_| Ok(f64::from_le_bytes(read_array(&mut r)?))).collect()
    };
    let v = read_vec(nv)?;
    let d = read_vec(nd)?;
    Ok((hash, SpectralState { t, v, d }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn checkpoint_round_trip_is_bit_exact() {
        let s = SpectralState {
            t: 0.1 + 0.2,
            v: vec![1e-300, -0.0, f64::MIN_POSITIVE],
            d: vec![std::f64::consts::PI, 2.5],
        };
        let hash = [7u8; 32];
        let mut buf = Vec::new();
        write_checkpoint(&mut buf, &hash, &s).unwrap();
        let (h, back) = read_checkpoint(buf.as_slice(), Some((&hash, 3, 2))).unwrap();
        assert_eq!(h, hash);
        assert_eq!(back.t.to_bits(), s.t.to_bits());
        for (a, b) in back.v.iter().chain(&back.d).zip(s.v.iter().chain(&s.d)) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
        assert!(matches!(
            read_checkpoint(buf.as_slice(), Some((&[0u8; 32], 3, 2))),
            Err(CheckpointError::Hash)
        ));
        assert!(matches!(
            read_checkpoint(buf.as_slice(), Some((&hash, 4, 2))),
            Err(CheckpointError::Shape { .. })
        ));
        assert!(matches!(read_checkpoint(&b"garbage!"[..], None), Err(CheckpointError::Magic)));
    }
}
