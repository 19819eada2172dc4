//! Dominant-channel pixel classification.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::raster::{PixelRgb, RasterImage};
use crate::Parallelism;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ColorClass {
    Red,
    Green,
    Blue,
    Black,
    Background,
    Unclassified,
}

impl ColorClass {
    /// Classes that form objects.
    pub const OBJECT_CLASSES: [ColorClass; 4] = [
        ColorClass::Red,
        ColorClass::Green,
        ColorClass::Blue,
        ColorClass::Black,
    ];

    #[inline]
    pub fn is_object(self) -> bool {
        matches!(
            self,
            ColorClass::Red | ColorClass::Green | ColorClass::Blue | ColorClass::Black
        )
    }

    /// The saturated rendering of an object class.
    pub fn saturated(self) -> Option<PixelRgb> {
        match self {
            ColorClass::Red => Some(PixelRgb::new(255, 0, 0)),
            ColorClass::Green => Some(PixelRgb::new(0, 255, 0)),
            ColorClass::Blue => Some(PixelRgb::new(0, 0, 255)),
            ColorClass::Black => Some(PixelRgb::BLACK),
            ColorClass::Background | ColorClass::Unclassified => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ColorClass::Red => "red",
            ColorClass::Green => "green",
            ColorClass::Blue => "blue",
            ColorClass::Black => "black",
            ColorClass::Background => "background",
            ColorClass::Unclassified => "unclassified",
        }
    }
}

impl std::fmt::Display for ColorClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for ColorClass {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "red" => Ok(ColorClass::Red),
            "green" => Ok(ColorClass::Green),
            "blue" => Ok(ColorClass::Blue),
            "black" => Ok(ColorClass::Black),
            "background" => Ok(ColorClass::Background),
            "unclassified" => Ok(ColorClass::Unclassified),
            other => Err(format!("unknown color class {other:?}")),
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ClassifierConfigError {
    #[error("black_max ({black_max}) must be below white_min ({white_min})")]
    BlackAboveWhite { black_max: u8, white_min: u8 },
    #[error("min_dominant ({min_dominant}) must exceed black_max ({black_max})")]
    DominantBelowBlack { min_dominant: u8, black_max: u8 },
}

/// Thresholds for [`classify_pixel`]. All intensities are 0..=255.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ClassifierConfig {
    pub min_dominant: u8,
    pub dominance_margin: u8,
    pub black_max: u8,
    pub white_min: u8,
}

impl Default for ClassifierConfig {
    fn default() -> Self {
        Self {
            min_dominant: 100,
            dominance_margin: 50,
            black_max: 60,
            white_min: 180,
        }
    }
}

impl ClassifierConfig {
    pub fn validate(&self) -> Result<(), ClassifierConfigError> {
        if self.black_max >= self.white_min {
            return Err(ClassifierConfigError::BlackAboveWhite {
                black_max: self.black_max,
                white_min: self.white_min,
            });
        }
        if self.min_dominant <= self.black_max {
            return Err(ClassifierConfigError::DominantBelowBlack {
                min_dominant: self.min_dominant,
                black_max: self.black_max,
            });
        }
        Ok(())
    }
}

/// Classifies one pixel.
///
/// Rules apply in order: every channel at or below `black_max` is Black,
/// every channel at or above `white_min` is Background, then a strictly
/// largest channel that reaches `min_dominant` and leads the other two by at
/// least `dominance_margin` names the class. Anything else is Unclassified,
/// including ties for the largest channel.
pub fn classify_pixel(p: PixelRgb, cfg: &ClassifierConfig) -> ColorClass {
    let PixelRgb { r, g, b } = p;
    if r <= cfg.black_max && g <= cfg.black_max && b <= cfg.black_max {
        return ColorClass::Black;
    }
    if r >= cfg.white_min && g >= cfg.white_min && b >= cfg.white_min {
        return ColorClass::Background;
    }
    let (dominant, other, class) = if r > g && r > b {
        (r, g.max(b), ColorClass::Red)
    } else if g > r && g > b {
        (g, r.max(b), ColorClass::Green)
    } else if b > r && b > g {
        (b, r.max(g), ColorClass::Blue)
    } else {
        return ColorClass::Unclassified;
    };
    if dominant >= cfg.min_dominant && dominant - other >= cfg.dominance_margin {
        class
    } else {
        ColorClass::Unclassified
    }
}

/// Per-pixel classification grid, row-major, same dimensions as its source.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ClassMask {
    width: u32,
    height: u32,
    classes: Vec<ColorClass>,
}

impl ClassMask {
    /// Builds a mask directly; panics if `classes.len() != width * height`.
    pub fn new(width: u32, height: u32, classes: Vec<ColorClass>) -> Self {
        assert_eq!(
            classes.len(),
            width as usize * height as usize,
            "mask size does not match dimensions"
        );
        Self {
            width,
            height,
            classes,
        }
    }

    pub fn filled(width: u32, height: u32, class: ColorClass) -> Self {
        Self::new(width, height, vec![class; width as usize * height as usize])
    }

    #[inline]
    pub fn width(&self) -> u32 {
        self.width
    }

    #[inline]
    pub fn height(&self) -> u32 {
        self.height
    }

    #[inline]
    pub fn get(&self, x: u32, y: u32) -> ColorClass {
        self.classes[y as usize * self.width as usize + x as usize]
    }

    #[inline]
    pub fn set(&mut self, x: u32, y: u32, class: ColorClass) {
        self.classes[y as usize * self.width as usize + x as usize] = class;
    }

    #[inline]
    pub fn row(&self, y: u32) -> &[ColorClass] {
        let w = self.width as usize;
        &self.classes[y as usize * w..(y as usize + 1) * w]
    }

    pub fn as_slice(&self) -> &[ColorClass] {
        &self.classes
    }

    pub fn count(&self, class: ColorClass) -> usize {
        self.classes.iter().filter(|&&c| c == class).count()
    }
}

fn classify_row(row: &[u8], out: &mut [ColorClass], cfg: &ClassifierConfig) {
    for (px, slot) in row.chunks_exact(3).zip(out.iter_mut()) {
        *slot = classify_pixel(PixelRgb::new(px[2], px[1], px[0]), cfg);
    }
}

/// Classifies every pixel of `img`. Both parallelism modes yield identical masks.
pub fn classify_image(
    img: &RasterImage,
    cfg: &ClassifierConfig,
    parallelism: Parallelism,
) -> ClassMask {
    let w = img.width() as usize;
    let mut classes = vec![ColorClass::Unclassified; w * img.height() as usize];
    let rows = img.as_bgr().chunks_exact(w * 3);
    match parallelism {
        Parallelism::Sequential => {
            for (row, out) in rows.zip(classes.chunks_exact_mut(w)) {
                classify_row(row, out, cfg);
            }
        }
        Parallelism::Parallel => {
            img.as_bgr()
                .par_chunks_exact(w * 3)
                .zip(classes.par_chunks_exact_mut(w))
                .for_each(|(row, out)| classify_row(row, out, cfg));
        }
    }
    ClassMask::new(img.width(), img.height(), classes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn classify(r: u8, g: u8, b: u8) -> ColorClass {
        classify_pixel(PixelRgb::new(r, g, b), &ClassifierConfig::default())
    }

    #[test]
    fn primaries_and_extremes() {
        assert_eq!(classify(255, 0, 0), ColorClass::Red);
        assert_eq!(classify(0, 255, 0), ColorClass::Green);
        assert_eq!(classify(0, 0, 255), ColorClass::Blue);
        assert_eq!(classify(255, 255, 255), ColorClass::Background);
        assert_eq!(classify(0, 0, 0), ColorClass::Black);
    }

    #[test]
    fn mixed_hues_are_rejected() {
        // purple: d = 128, o = 128, margin 0 < 50
        assert_eq!(classify(128, 0, 128), ColorClass::Unclassified);
        // orange: d = 255, o = 165, margin 90 passes; still red-dominant
        assert_eq!(classify(255, 165, 0), ColorClass::Red);
        // dark orange-ish with a close second channel
        assert_eq!(classify(200, 170, 0), ColorClass::Unclassified);
        // yellow
        assert_eq!(classify(255, 255, 0), ColorClass::Unclassified);
    }

    #[test]
    fn rule_boundaries() {
        assert_eq!(classify(60, 60, 60), ColorClass::Black);
        assert_eq!(classify(61, 0, 0), ColorClass::Unclassified);
        assert_eq!(classify(180, 180, 180), ColorClass::Background);
        assert_eq!(classify(179, 180, 180), ColorClass::Unclassified);
        assert_eq!(classify(100, 50, 50), ColorClass::Red);
        assert_eq!(classify(99, 0, 0), ColorClass::Unclassified);
        assert_eq!(classify(100, 51, 0), ColorClass::Unclassified);
    }

    #[test]
    fn zero_margin_tie_is_unclassified() {
        let cfg = ClassifierConfig {
            dominance_margin: 0,
            ..ClassifierConfig::default()
        };
        assert_eq!(
            classify_pixel(PixelRgb::new(200, 200, 0), &cfg),
            ColorClass::Unclassified
        );
        assert_eq!(
            classify_pixel(PixelRgb::new(200, 199, 0), &cfg),
            ColorClass::Red
        );
    }

    #[test]
    fn config_validation() {
        assert!(ClassifierConfig::default().validate().is_ok());
        let bad = ClassifierConfig {
            black_max: 200,
            white_min: 180,
            ..ClassifierConfig::default()
        };
        assert!(matches!(
            bad.validate(),
            Err(ClassifierConfigError::BlackAboveWhite { .. })
        ));
        let bad = ClassifierConfig {
            min_dominant: 60,
            ..ClassifierConfig::default()
        };
        assert!(matches!(
            bad.validate(),
            Err(ClassifierConfigError::DominantBelowBlack { .. })
        ));
    }

    #[test]
    fn white_image_is_all_background() {
        let img = RasterImage::filled(4, 4, PixelRgb::WHITE).unwrap();
        let mask = classify_image(&img, &ClassifierConfig::default(), Parallelism::Sequential);
        assert_eq!(mask.count(ColorClass::Background), 16);
    }

    #[test]
    fn single_red_pixel_on_white() {
        let mut img = RasterImage::filled(5, 4, PixelRgb::WHITE).unwrap();
        img.set_pixel(3, 2, PixelRgb::new(255, 0, 0)).unwrap();
        let mask = classify_image(&img, &ClassifierConfig::default(), Parallelism::Parallel);
        assert_eq!(mask.count(ColorClass::Red), 1);
        assert_eq!(mask.get(3, 2), ColorClass::Red);
    }

    fn arb_config() -> impl Strategy<Value = ClassifierConfig> {
        (0u8..=120, 0u8..=120, 1u8..=120, 1u8..=120).prop_map(|(black_max, margin, dom_gap, white_gap)| {
            ClassifierConfig {
                black_max,
                min_dominant: black_max.saturating_add(dom_gap),
                dominance_margin: margin,
                white_min: black_max.saturating_add(white_gap).max(black_max + 1),
            }
        })
    }

    proptest! {
        #[test]
        fn permuting_channels_permutes_class(r: u8, g: u8, b: u8, cfg in arb_config()) {
            prop_assume!(cfg.validate().is_ok());
            let base = classify_pixel(PixelRgb::new(r, g, b), &cfg);
            // rotate r -> g -> b -> r
            let rotated = classify_pixel(PixelRgb::new(b, r, g), &cfg);
            let expected = match base {
                ColorClass::Red => ColorClass::Green,
                ColorClass::Green => ColorClass::Blue,
                ColorClass::Blue => ColorClass::Red,
                other => other,
            };
            prop_assert_eq!(rotated, expected);
            // swap g and b
            let swapped = classify_pixel(PixelRgb::new(r, b, g), &cfg);
            let expected = match base {
                ColorClass::Green => ColorClass::Blue,
                ColorClass::Blue => ColorClass::Green,
                other => other,
            };
            prop_assert_eq!(swapped, expected);
        }

        #[test]
        fn saturated_red_is_red(v: u8, cfg in arb_config()) {
            prop_assume!(cfg.validate().is_ok());
            prop_assume!(v >= cfg.min_dominant.max(cfg.dominance_margin));
            prop_assume!(v > cfg.black_max);
            prop_assert_eq!(classify_pixel(PixelRgb::new(v, 0, 0), &cfg), ColorClass::Red);
        }

        #[test]
        fn image_matches_pointwise(w in 1u32..24, h in 1u32..24, seed: u64) {
            use rand::{RngCore, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let mut data = vec![0u8; (w * h * 3) as usize];
            rng.fill_bytes(&mut data);
            let img = RasterImage::from_bgr(w, h, data).unwrap();
            let cfg = ClassifierConfig::default();
            let mask = classify_image(&img, &cfg, Parallelism::Parallel);
            for (x, y, p) in img.pixels() {
                prop_assert_eq!(mask.get(x, y), classify_pixel(p, &cfg));
            }
        }
    }
}
