//! `.hmt` heatmap container: one UTF-8 JSON header line
//! `{"w":W,"h":H,"c":C,"dtype":"f32le","layout":"chw"}` followed by exactly
//! `W·H·C` little-endian f32 values, channel-major and row-major within a channel.

use std::fs;
use std::io::{Read, Write};
use std::path::Path;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::heatmap::HeatmapStack;

pub const HMT_EXTENSION: &str = "hmt";

#[derive(Deserialize)]
struct Header {
    w: usize,
    h: usize,
    c: usize,
    dtype: String,
    layout: String,
}

pub fn encode_hmt(h: &HeatmapStack) -> Vec<u8> {
    let header = format!(
        "{{\"w\":{},\"h\":{},\"c\":{},\"dtype\":\"f32le\",\"layout\":\"chw\"}}\n",
        h.width(),
        h.height(),
        h.channels()
    );
    let mut out = Vec::with_capacity(header.len() + 4 * h.data().len());
    out.extend_from_slice(header.as_bytes());
    for v in h.data() {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

pub fn decode_hmt(bytes: &[u8]) -> Result<HeatmapStack> {
    let nl = bytes
        .iter()
        .position(|&b| b == b'\n')
        .ok_or_else(|| Error::BadHeader("missing header line".into()))?;
    let text = std::str::from_utf8(&bytes[..nl])
        .map_err(|_| Error::BadHeader("header is not UTF-8".into()))?;
    let header: Header =
        serde_json::from_str(text).map_err(|e| Error::BadHeader(e.to_string()))?;
    if header.dtype != "f32le" {
        return Err(Error::UnsupportedDtype(header.dtype));
    }
    if header.layout != "chw" {
        return Err(Error::BadHeader(format!("unsupported layout {:?}", header.layout)));
    }
    let expected = header
        .w
        .checked_mul(header.h)
        .and_then(|n| n.checked_mul(header.c))
        .and_then(|n| n.checked_mul(4))
        .ok_or_else(|| Error::BadHeader("dimensions overflow".into()))?;
    let payload = &bytes[nl + 1..];
    if payload.len() != expected {
        return Err(Error::LengthMismatch {
            expected,
            actual: payload.len(),
        });
    }
    let data: Vec<f32> = payload
        .chunks_exact(4)
        .map(|b| f32::from_le_bytes([b[0], b[1], b[2], b[3]]))
        .collect();
    if let Some(i) = data.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite(format!("heatmap value #{i}")));
    }
    HeatmapStack::new(header.w, header.h, header.c, data)
}

pub fn write_hmt<W: Write>(mut w: W, h: &HeatmapStack) -> std::io::Result<()> {
    w.write_all(&encode_hmt(h))
}

pub fn read_hmt<R: Read>(mut r: R) -> Result<HeatmapStack> {
    let mut bytes = Vec::new();
    r.read_to_end(&mut bytes)
        .map_err(|e| Error::io("<reader>", e))?;
    decode_hmt(&bytes)
}

pub fn load_heatmaps(path: impl AsRef<Path>) -> Result<HeatmapStack> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_hmt(&bytes)
}

pub fn save_heatmaps(path: impl AsRef<Path>, h: &HeatmapStack) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, encode_hmt(h)).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn stack() -> HeatmapStack {
        let data = (0..3 * 4 * 2).map(|i| i as f32 * 0.25 - 1.0).collect();
        HeatmapStack::new(3, 4, 2, data).unwrap()
    }

    #[test]
    fn header_is_exact() {
        let bytes = encode_hmt(&stack());
        let nl = bytes.iter().position(|&b| b == b'\n').unwrap();
        assert_eq!(
            &bytes[..nl],
            br#"{"w":3,"h":4,"c":2,"dtype":"f32le","layout":"chw"}"#
        );
        assert_eq!(bytes.len() - nl - 1, 4 * 24);
        // channel 0, row 0, col 1
        assert_eq!(&bytes[nl + 5..nl + 9], &(-0.75f32).to_le_bytes());
    }

    #[test]
    fn round_trip() {
        let s = stack();
        assert_eq!(decode_hmt(&encode_hmt(&s)).unwrap(), s);
    }

    #[test]
    fn error_kinds() {
        let mut bytes = encode_hmt(&stack());
        bytes.pop();
        assert!(matches!(decode_hmt(&bytes), Err(Error::LengthMismatch { .. })));

        let f64_header = br#"{"w":3,"h":3,"c":1,"dtype":"f64le","layout":"chw"}
"#;
        assert!(matches!(decode_hmt(f64_header), Err(Error::UnsupportedDtype(d)) if d == "f64le"));

        assert!(matches!(decode_hmt(b"HMT1 garbage\n"), Err(Error::BadHeader(_))));
        assert!(matches!(decode_hmt(b"no newline"), Err(Error::BadHeader(_))));

        let mut bytes = encode_hmt(&HeatmapStack::zeros(3, 3, 1).unwrap());
        let n = bytes.len();
        bytes[n - 4..].copy_from_slice(&f32::INFINITY.to_le_bytes());
        assert!(matches!(decode_hmt(&bytes), Err(Error::NonFinite(_))));
    }
}
