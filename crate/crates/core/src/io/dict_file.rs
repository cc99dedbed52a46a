//! The CPDLv1 dictionary container: a checksummed little-endian binary
//! format holding the per-block matrices plus a JSON provenance trailer.
//! Round trips are bit-identical.

use crate::dictlearn::{CoupledDictionary, DictLayout, Provenance};
use crate::error::{Error, Result};
use ndarray::Array2;
use std::fs;
use std::path::Path;

const MAGIC: &[u8; 6] = b"CPDLv1";

pub fn save_dictionary(path: impl AsRef<Path>, dict: &CoupledDictionary) -> Result<()> {
    let path = path.as_ref();
    let mut buf = Vec::new();
    buf.extend_from_slice(MAGIC);
    buf.push(match dict.layout() {
        DictLayout::Denoise => 0,
        DictLayout::SuperRes => 1,
    });
    buf.push(0); // reserved
    buf.extend_from_slice(&(dict.patch_side() as u32).to_le_bytes());
    buf.extend_from_slice(&(dict.n() as u32).to_le_bytes());
    buf.extend_from_slice(&(dict.atoms_per_group() as u32).to_le_bytes());
    for block in dict.blocks() {
        // column-major: atoms are contiguous
        for col in block.columns() {
            for v in col {
                buf.extend_from_slice(&v.to_le_bytes());
            }
        }
    }
    let trailer = serde_json::to_vec(dict.provenance())
        .map_err(|e| Error::format(path, format!("provenance encoding failed: {e}")))?;
    buf.extend_from_slice(&(trailer.len() as u32).to_le_bytes());
    buf.extend_from_slice(&trailer);
    let crc = crc32fast::hash(&buf);
    buf.extend_from_slice(&crc.to_le_bytes());
    fs::write(path, buf).map_err(|e| Error::io(path, e))
}

pub fn load_dictionary(path: impl AsRef<Path>) -> Result<CoupledDictionary> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    if bytes.len() < MAGIC.len() + 4 || &bytes[..MAGIC.len()] != MAGIC {
        return Err(Error::format(path, "not a CPDLv1 dictionary (bad magic)"));
    }
    let payload_len = bytes.len() - 4;
    let stored = u32::from_le_bytes(bytes[payload_len..].try_into().unwrap());
    let actual = crc32fast::hash(&bytes[..payload_len]);
    if stored != actual {
        return Err(Error::format(
            path,
            format!("checksum mismatch ({stored:08x} recorded, {actual:08x} computed)"),
        ));
    }

    let mut pos = MAGIC.len();
    let take = |pos: &mut usize, count: usize| -> Result<&[u8]> {
        if *pos + count > payload_len {
            return Err(Error::format(path, "truncated dictionary payload"));
        }
        let out = &bytes[*pos..*pos + count];
        *pos += count;
        Ok(out)
    };

    let layout = match take(&mut pos, 1)?[0] {
        0 => DictLayout::Denoise,
        1 => DictLayout::SuperRes,
        other => return Err(Error::format(path, format!("unknown layout tag {other}"))),
    };
    take(&mut pos, 1)?; // reserved
    let read_u32 = |pos: &mut usize| -> Result<usize> {
        Ok(u32::from_le_bytes(take(pos, 4)?.try_into().unwrap()) as usize)
    };
    let patch_side = read_u32(&mut pos)?;
    let n = read_u32(&mut pos)?;
    let k = read_u32(&mut pos)?;
    if n != patch_side * patch_side {
        return Err(Error::format(
            path,
            format!("n {n} inconsistent with patch side {patch_side}"),
        ));
    }

    let block_count = match layout {
        DictLayout::Denoise => 4,
        DictLayout::SuperRes => 6,
    };
    let mut blocks = Vec::with_capacity(block_count);
    for _ in 0..block_count {
        let raw = take(&mut pos, n * k * 8)?;
        let mut m = Array2::zeros((n, k));
        for (i, chunk) in raw.chunks_exact(8).enumerate() {
            // column-major order
            m[(i % n, i / n)] = f64::from_le_bytes(chunk.try_into().unwrap());
        }
        blocks.push(m);
    }

    let trailer_len = read_u32(&mut pos)?;
    let trailer = take(&mut pos, trailer_len)?;
    let provenance: Provenance = serde_json::from_slice(trailer)
        .map_err(|e| Error::format(path, format!("bad provenance trailer: {e}")))?;
    if pos != payload_len {
        return Err(Error::format(path, "trailing bytes after dictionary payload"));
    }

    // Reassemble the stacked matrix exactly as stored.
    let rows = layout.stacked_rows(n);
    let mut stacked = Array2::zeros((rows, 3 * k));
    let slots: Vec<(std::ops::Range<usize>, std::ops::Range<usize>)> = match layout {
        DictLayout::Denoise => vec![
            (0..n, 0..k),
            (0..n, k..2 * k),
            (n..2 * n, 0..k),
            (n..2 * n, 2 * k..3 * k),
        ],
        DictLayout::SuperRes => vec![
            (0..n, 0..k),
            (0..n, k..2 * k),
            (n..2 * n, 0..k),
            (n..2 * n, k..2 * k),
            (2 * n..3 * n, 0..k),
            (2 * n..3 * n, 2 * k..3 * k),
        ],
    };
    for (block, (rr, cc)) in blocks.into_iter().zip(slots) {
        stacked.slice_mut(ndarray::s![rr, cc]).assign(&block);
    }
    CoupledDictionary::from_stacked(layout, patch_side, k, stacked, provenance)
        .map_err(|e| Error::format(path, format!("invalid dictionary: {e}")))
}
