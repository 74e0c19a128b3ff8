//! Compact binary instance format.
//!
//! Layout (all integers LEB128 varints unless noted):
//!
//! ```text
//! magic    4 bytes  "XSAT"
//! version  1 byte   currently 1
//! tag      1 byte   0 unconstrained, 1 constrained, 2 relaxed chip model
//! k n m
//! seed     1 byte flag, then master and stream as u64 little-endian if set
//! rows     m * k variable indices
//! rhs      ceil(m / 8) bytes, bit i of byte j is equation 8j + i
//! ```

use super::{Instance, ModelTag};
use crate::error::{Error, Result};
use crate::rng::Seed;

pub const BINARY_MAGIC: &[u8; 4] = b"XSAT";
pub const BINARY_VERSION: u8 = 1;

fn put_varint(out: &mut Vec<u8>, mut v: u64) {
    loop {
        let byte = (v & 0x7f) as u8;
        v >>= 7;
        if v == 0 {
            out.push(byte);
            return;
        }
        out.push(byte | 0x80);
    }
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl Reader<'_> {
    fn byte(&mut self) -> Result<u8> {
        let b = *self
            .bytes
            .get(self.pos)
            .ok_or_else(|| Error::Malformed("unexpected end of binary instance".into()))?;
        self.pos += 1;
        Ok(b)
    }

    fn take(&mut self, len: usize) -> Result<&[u8]> {
        let end = self.pos.checked_add(len).filter(|&e| e <= self.bytes.len());
        let end = end.ok_or_else(|| Error::Malformed("unexpected end of binary instance".into()))?;
        let slice = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(slice)
    }

    fn varint(&mut self) -> Result<u64> {
        let mut v = 0u64;
        for shift in (0..64).step_by(7) {
            let b = self.byte()?;
            v |= u64::from(b & 0x7f) << shift;
            if b & 0x80 == 0 {
                return Ok(v);
            }
        }
        Err(Error::Malformed("varint longer than 64 bits".into()))
    }

    fn usize(&mut self) -> Result<usize> {
        usize::try_from(self.varint()?).map_err(|_| Error::Malformed("value exceeds usize".into()))
    }

    fn u64_le(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().expect("8 bytes")))
    }
}

pub fn encode_binary(inst: &Instance) -> Vec<u8> {
    let mut out = Vec::with_capacity(16 + inst.m * inst.k * 2 + inst.m / 8);
    out.extend_from_slice(BINARY_MAGIC);
    out.push(BINARY_VERSION);
    out.push(inst.model_tag.code());
    for v in [inst.k, inst.n, inst.m] {
        put_varint(&mut out, v as u64);
    }
    match inst.seed {
        None => out.push(0),
        Some(seed) => {
            out.push(1);
            out.extend_from_slice(&seed.master.to_le_bytes());
            out.extend_from_slice(&seed.stream.to_le_bytes());
        }
    }
    for row in &inst.rows {
        for &v in row {
            put_varint(&mut out, v as u64);
        }
    }
    let mut packed = vec![0u8; inst.m.div_ceil(8)];
    for (i, &b) in inst.rhs.iter().enumerate() {
        if b {
            packed[i / 8] |= 1 << (i % 8);
        }
    }
    out.extend_from_slice(&packed);
    out
}

pub fn decode_binary(bytes: &[u8]) -> Result<Instance> {
    let mut r = Reader { bytes, pos: 0 };
    if r.take(4)? != BINARY_MAGIC {
        return Err(Error::Malformed("missing XSAT magic".into()));
    }
    let version = r.byte()?;
    if version != BINARY_VERSION {
        return Err(Error::Malformed(format!("unsupported binary version {version}")));
    }
    let model_tag = ModelTag::from_code(r.byte()?)?;
    let (k, n, m) = (r.usize()?, r.usize()?, r.usize()?);
    let seed = match r.byte()? {
        0 => None,
        1 => Some(Seed::new(r.u64_le()?, r.u64_le()?)),
        other => return Err(Error::Malformed(format!("bad seed flag {other}"))),
    };
    let cells = m
        .checked_mul(k)
        .filter(|&c| c <= bytes.len())
        .ok_or_else(|| Error::Malformed("row data larger than input".into()))?;
    let mut rows = Vec::with_capacity(m);
    let mut flat = Vec::with_capacity(cells);
    for _ in 0..cells {
        flat.push(r.usize()?);
    }
    for chunk in flat.chunks(k.max(1)).take(m) {
        rows.push(chunk.to_vec());
    }
    if k == 0 {
        rows = vec![Vec::new(); m];
    }
    let packed = r.take(m.div_ceil(8))?;
    let rhs = (0..m).map(|i| packed[i / 8] >> (i % 8) & 1 == 1).collect();
    if r.pos != bytes.len() {
        return Err(Error::Malformed("trailing bytes after binary instance".into()));
    }
    let inst = Instance {
        k,
        n,
        m,
        rows,
        rhs,
        model_tag,
        seed,
    };
    inst.validate()?;
    Ok(inst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn varint_edges() {
        for v in [0u64, 1, 127, 128, 300, u64::MAX] {
            let mut out = Vec::new();
            put_varint(&mut out, v);
            let mut r = Reader { bytes: &out, pos: 0 };
            assert_eq!(r.varint().unwrap(), v);
            assert_eq!(r.pos, out.len());
        }
    }

    #[test]
    fn rejects_garbage() {
        assert!(decode_binary(b"NOPE").is_err());
        assert!(decode_binary(b"XSAT\x02").is_err());
        let inst = Instance::new(2, 3, vec![vec![0, 2]], vec![true], ModelTag::Unconstrained).unwrap();
        let mut bytes = encode_binary(&inst);
        bytes.push(0);
        assert!(decode_binary(&bytes).is_err());
        bytes.truncate(bytes.len() - 2);
        assert!(decode_binary(&bytes).is_err());
    }

    proptest! {
        #[test]
        fn round_trip(
            k in 1usize..5,
            n in 5usize..400,
            m in 0usize..40,
            seed in proptest::option::of((any::<u64>(), any::<u64>())),
            raw in proptest::collection::vec(any::<u64>(), 0..200),
        ) {
            let mut rows = Vec::new();
            let mut rhs = Vec::new();
            for i in 0..m {
                let mut row: Vec<usize> = (0..k).map(|j| (raw.get(i * k + j).copied().unwrap_or(7 * i as u64 + j as u64) as usize) % n).collect();
                row.sort_unstable();
                row.dedup();
                while row.len() < k {
                    let next = (0..n).find(|v| !row.contains(v)).unwrap();
                    row.push(next);
                    row.sort_unstable();
                }
                rows.push(row);
                rhs.push(raw.get(i).is_some_and(|x| x & 1 == 1));
            }
            let mut inst = Instance::new(k, n, rows, rhs, ModelTag::Unconstrained).unwrap();
            inst.seed = seed.map(|(a, b)| Seed::new(a, b));
            let bytes = encode_binary(&inst);
            prop_assert_eq!(decode_binary(&bytes).unwrap(), inst.clone());
            let json = inst.to_json().unwrap();
            prop_assert_eq!(Instance::from_json(&json).unwrap(), inst);
        }
    }
}
