//! Raster storage, file formats and the histogram-equalization pre-filter.
//!
//! Images are stored row-major with three bytes per pixel in blue-green-red
//! order. Accessors always hand out [`PixelRgb`] in red-green-blue order so
//! callers never touch the storage layout directly.

mod equalize;
mod ppm;
mod raw;

pub use equalize::equalize_histogram;
pub use ppm::{load_ppm, save_ppm, PpmError};
pub use raw::{load_raw_bgr, save_raw_bgr, RawError, RAW_MAGIC};

use thiserror::Error;

/// One pixel in presentation (red, green, blue) order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct PixelRgb {
    pub r: u8,
    pub g: u8,
    pub b: u8,
}

impl PixelRgb {
    pub const BLACK: PixelRgb = PixelRgb::new(0, 0, 0);
    pub const WHITE: PixelRgb = PixelRgb::new(255, 255, 255);

    pub const fn new(r: u8, g: u8, b: u8) -> Self {
        Self { r, g, b }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RasterError {
    #[error("image dimensions must be at least 1x1, got {width}x{height}")]
    EmptyDimensions { width: u32, height: u32 },
    #[error("image dimensions {width}x{height} overflow addressable memory")]
    TooLarge { width: u32, height: u32 },
    #[error("pixel buffer holds {actual} bytes, expected {expected}")]
    BufferLength { expected: usize, actual: usize },
    #[error("pixel ({x}, {y}) is outside the {width}x{height} frame")]
    OutOfBounds {
        x: u32,
        y: u32,
        width: u32,
        height: u32,
    },
}

/// An 8-bit three-channel raster, BGR byte order, row-major.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RasterImage {
    width: u32,
    height: u32,
    data: Vec<u8>,
}

pub(crate) fn buffer_len(width: u32, height: u32) -> Result<usize, RasterError> {
    if width == 0 || height == 0 {
        return Err(RasterError::EmptyDimensions { width, height });
    }
    (width as usize)
        .checked_mul(height as usize)
        .and_then(|n| n.checked_mul(3))
        .ok_or(RasterError::TooLarge { width, height })
}

impl RasterImage {
    /// A frame filled with a single color.
    pub fn filled(width: u32, height: u32, color: PixelRgb) -> Result<Self, RasterError> {
        let len = buffer_len(width, height)?;
        let mut data = Vec::with_capacity(len);
        for _ in 0..len / 3 {
            data.extend_from_slice(&[color.b, color.g, color.r]);
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }

    /// Wraps an existing BGR buffer.
    pub fn from_bgr(width: u32, height: u32, data: Vec<u8>) -> Result<Self, RasterError> {
        let expected = buffer_len(width, height)?;
        if data.len() != expected {
            return Err(RasterError::BufferLength {
                expected,
                actual: data.len(),
            });
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }

    #[inline]
    pub fn width(&self) -> u32 {
        self.width
    }

    #[inline]
    pub fn height(&self) -> u32 {
        self.height
    }

    /// Raw BGR bytes.
    #[inline]
    pub fn as_bgr(&self) -> &[u8] {
        &self.data
    }

    /// One row of BGR bytes.
    #[inline]
    pub fn row(&self, y: u32) -> &[u8] {
        let stride = self.width as usize * 3;
        let start = y as usize * stride;
        &self.data[start..start + stride]
    }

    #[inline]
    fn offset(&self, x: u32, y: u32) -> Result<usize, RasterError> {
        if x >= self.width || y >= self.height {
            return Err(RasterError::OutOfBounds {
                x,
                y,
                width: self.width,
                height: self.height,
            });
        }
        Ok((y as usize * self.width as usize + x as usize) * 3)
    }

    pub fn get_pixel(&self, x: u32, y: u32) -> Result<PixelRgb, RasterError> {
        let i = self.offset(x, y)?;
        Ok(PixelRgb::new(self.data[i + 2], self.data[i + 1], self.data[i]))
    }

    pub fn set_pixel(&mut self, x: u32, y: u32, p: PixelRgb) -> Result<(), RasterError> {
        let i = self.offset(x, y)?;
        self.data[i] = p.b;
        self.data[i + 1] = p.g;
        self.data[i + 2] = p.r;
        Ok(())
    }

    /// Iterates `(x, y, pixel)` in raster order.
    pub fn pixels(&self) -> impl Iterator<Item = (u32, u32, PixelRgb)> + '_ {
        let w = self.width as usize;
        self.data.chunks_exact(3).enumerate().map(move |(i, c)| {
            (
                (i % w) as u32,
                (i / w) as u32,
                PixelRgb::new(c[2], c[1], c[0]),
            )
        })
    }

    pub(crate) fn bgr_mut(&mut self) -> &mut [u8] {
        &mut self.data
    }
}
