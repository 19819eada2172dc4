//! Raw BGR dump: `CSRW` magic, width and height as little-endian u32, then
//! the BGR payload verbatim. Used to keep decode cost out of bench baselines.

use thiserror::Error;

use super::{buffer_len, RasterError, RasterImage};

pub const RAW_MAGIC: &[u8; 4] = b"CSRW";
const HEADER_LEN: usize = 12;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RawError {
    #[error("missing CSRW magic")]
    BadMagic,
    #[error("raw header shorter than {HEADER_LEN} bytes")]
    ShortHeader,
    #[error("truncated pixel data: expected {expected} bytes, found {actual}")]
    Truncated { expected: usize, actual: usize },
    #[error(transparent)]
    Raster(#[from] RasterError),
}

pub fn save_raw_bgr(img: &RasterImage) -> Vec<u8> {
    let mut out = Vec::with_capacity(HEADER_LEN + img.as_bgr().len());
    out.extend_from_slice(RAW_MAGIC);
    out.extend_from_slice(&img.width().to_le_bytes());
    out.extend_from_slice(&img.height().to_le_bytes());
    out.extend_from_slice(img.as_bgr());
    out
}

pub fn load_raw_bgr(bytes: &[u8]) -> Result<RasterImage, RawError> {
    if bytes.len() < 4 || &bytes[..4] != RAW_MAGIC {
        return Err(RawError::BadMagic);
    }
    if bytes.len() < HEADER_LEN {
        return Err(RawError::ShortHeader);
    }
    let width = u32::from_le_bytes(bytes[4..8].try_into().unwrap());
    let height = u32::from_le_bytes(bytes[8..12].try_into().unwrap());
    let expected = buffer_len(width, height)?;
    let payload = &bytes[HEADER_LEN..];
    if payload.len() < expected {
        return Err(RawError::Truncated {
            expected,
            actual: payload.len(),
        });
    }
    Ok(RasterImage::from_bgr(
        width,
        height,
        payload[..expected].to_vec(),
    )?)
}
