//! Binary PPM (P6, maxval 255) reader and canonical writer.

use thiserror::Error;

use super::{buffer_len, RasterError, RasterImage};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PpmError {
    #[error("unsupported magic {0:?}, expected \"P6\"")]
    UnsupportedMagic(String),
    #[error("malformed PPM header: {0}")]
    MalformedHeader(&'static str),
    #[error("unsupported maxval {0}, only 255 is accepted")]
    UnsupportedMaxval(u32),
    #[error("truncated pixel data: expected {expected} bytes, found {actual}")]
    Truncated { expected: usize, actual: usize },
    #[error(transparent)]
    Raster(#[from] RasterError),
}

struct HeaderReader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> HeaderReader<'a> {
    fn skip_whitespace_and_comments(&mut self) {
        while let Some(&c) = self.bytes.get(self.pos) {
            if c == b'#' {
                while let Some(&c) = self.bytes.get(self.pos) {
                    self.pos += 1;
                    if c == b'\n' || c == b'\r' {
                        break;
                    }
                }
            } else if c.is_ascii_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    fn read_uint(&mut self, what: &'static str) -> Result<u32, PpmError> {
        self.skip_whitespace_and_comments();
        let start = self.pos;
        while self.bytes.get(self.pos).is_some_and(u8::is_ascii_digit) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(PpmError::MalformedHeader(what));
        }
        // digits only, so utf8 is guaranteed
        std::str::from_utf8(&self.bytes[start..self.pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or(PpmError::MalformedHeader(what))
    }
}

/// Decodes a P6 file into BGR storage.
///
/// Trailing bytes after the pixel payload are ignored.
pub fn load_ppm(bytes: &[u8]) -> Result<RasterImage, PpmError> {
    if bytes.len() < 2 {
        return Err(PpmError::MalformedHeader("missing magic number"));
    }
    if &bytes[..2] != b"P6" {
        return Err(PpmError::UnsupportedMagic(
            String::from_utf8_lossy(&bytes[..2]).into_owned(),
        ));
    }
    let mut reader = HeaderReader { bytes, pos: 2 };
    if !reader.bytes.get(2).is_some_and(|c| c.is_ascii_whitespace() || *c == b'#') {
        return Err(PpmError::MalformedHeader("no separator after magic"));
    }
    let width = reader.read_uint("missing or invalid width")?;
    let height = reader.read_uint("missing or invalid height")?;
    let maxval = reader.read_uint("missing or invalid maxval")?;
    if maxval != 255 {
        return Err(PpmError::UnsupportedMaxval(maxval));
    }
    // exactly one whitespace byte separates maxval from the raster
    match bytes.get(reader.pos) {
        Some(c) if c.is_ascii_whitespace() => reader.pos += 1,
        _ => return Err(PpmError::MalformedHeader("no separator after maxval")),
    }

    let expected = buffer_len(width, height)?;
    let payload = &bytes[reader.pos..];
    if payload.len() < expected {
        return Err(PpmError::Truncated {
            expected,
            actual: payload.len(),
        });
    }
    let mut data = payload[..expected].to_vec();
    for px in data.chunks_exact_mut(3) {
        px.swap(0, 2);
    }
    Ok(RasterImage::from_bgr(width, height, data)?)
}

/// Canonical P6 encoding: `P6\n<w> <h>\n255\n` then RGB samples.
pub fn save_ppm(img: &RasterImage) -> Vec<u8> {
    let header = format!("P6\n{} {}\n255\n", img.width(), img.height());
    let mut out = Vec::with_capacity(header.len() + img.as_bgr().len());
    out.extend_from_slice(header.as_bytes());
    for px in img.as_bgr().chunks_exact(3) {
        out.extend_from_slice(&[px[2], px[1], px[0]]);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::raster::PixelRgb;

    #[test]
    fn decodes_two_pixel_file() {
        let mut f = b"P6\n2 1\n255\n".to_vec();
        f.extend_from_slice(&[255, 0, 0, 0, 0, 255]);
        let img = load_ppm(&f).unwrap();
        assert_eq!(img.get_pixel(0, 0).unwrap(), PixelRgb::new(255, 0, 0));
        assert_eq!(img.get_pixel(1, 0).unwrap(), PixelRgb::new(0, 0, 255));
        // storage is blue-first
        assert_eq!(&img.as_bgr()[..3], &[0, 0, 255]);
    }

    #[test]
    fn rejects_p5() {
        let f = b"P5\n1 1\n255\n\0";
        assert_eq!(load_ppm(f), Err(PpmError::UnsupportedMagic("P5".into())));
    }

    #[test]
    fn rejects_other_maxval() {
        let f = b"P6\n1 1\n65535\n\0\0\0\0\0\0";
        assert_eq!(load_ppm(f), Err(PpmError::UnsupportedMaxval(65535)));
    }

    #[test]
    fn reports_truncation() {
        let f = b"P6\n2 2\n255\n\0\0\0";
        assert_eq!(
            load_ppm(f),
            Err(PpmError::Truncated {
                expected: 12,
                actual: 3
            })
        );
    }

    #[test]
    fn reports_malformed_header() {
        assert!(matches!(
            load_ppm(b"P6\nx 1\n255\n"),
            Err(PpmError::MalformedHeader(_))
        ));
        assert!(matches!(load_ppm(b"P"), Err(PpmError::MalformedHeader(_))));
        assert!(matches!(
            load_ppm(b"P6\n0 1\n255\n"),
            Err(PpmError::Raster(RasterError::EmptyDimensions { .. }))
        ));
    }

    #[test]
    fn header_comments_are_skipped() {
        let mut f = b"P6 # made by hand\n1 # w\n1\n255\n".to_vec();
        f.extend_from_slice(&[1, 2, 3]);
        let img = load_ppm(&f).unwrap();
        assert_eq!(img.get_pixel(0, 0).unwrap(), PixelRgb::new(1, 2, 3));
    }

    #[test]
    fn canonicalizes_on_save() {
        let mut f = b"P6  1\t1 255\n".to_vec();
        f.extend_from_slice(&[9, 8, 7, 42]);
        let out = save_ppm(&load_ppm(&f).unwrap());
        assert_eq!(out, b"P6\n1 1\n255\n\x09\x08\x07");
    }

    #[test]
    fn black_and_white_single_pixel() {
        let black = RasterImage::filled(1, 1, PixelRgb::BLACK).unwrap();
        assert_eq!(save_ppm(&black), b"P6\n1 1\n255\n\0\0\0");
        let white = RasterImage::filled(1, 1, PixelRgb::WHITE).unwrap();
        assert_eq!(save_ppm(&white), b"P6\n1 1\n255\n\xff\xff\xff");
    }
}
