#![allow(dead_code)]

use chromaseg::classify::{ClassMask, ColorClass};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const CLASSES: [ColorClass; 6] = [
    ColorClass::Red,
    ColorClass::Green,
    ColorClass::Blue,
    ColorClass::Black,
    ColorClass::Background,
    ColorClass::Unclassified,
];

/// Random mask up to `max_side` square: either speckle noise of random density
/// or a handful of random rectangles over noise, so both sparse and clumpy
/// layouts show up.
pub fn random_mask(seed: u64, max_side: u32) -> ClassMask {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let w = rng.random_range(1..=max_side);
    let h = rng.random_range(1..=max_side);
    let density: f64 = rng.random_range(0.0..0.12);
    let palette = rng.random_range(1..=4usize);
    let mut mask = ClassMask::filled(w, h, ColorClass::Background);
    for y in 0..h {
        for x in 0..w {
            if rng.random_bool(density) {
                mask.set(x, y, CLASSES[rng.random_range(0..palette)]);
            } else if rng.random_bool(0.02) {
                mask.set(x, y, ColorClass::Unclassified);
            }
        }
    }
    let rects = rng.random_range(0..6);
    for _ in 0..rects {
        let class = CLASSES[rng.random_range(0..palette)];
        let rw = rng.random_range(1..=w.min(20));
        let rh = rng.random_range(1..=h.min(20));
        let x0 = rng.random_range(0..=w - rw);
        let y0 = rng.random_range(0..=h - rh);
        for y in y0..y0 + rh {
            for x in x0..x0 + rw {
                mask.set(x, y, class);
            }
        }
    }
    mask
}

pub fn square(mask: &mut ClassMask, x0: u32, y0: u32, side: u32, class: ColorClass) {
    for y in y0..y0 + side {
        for x in x0..x0 + side {
            mask.set(x, y, class);
        }
    }
}

/// Two 40x40 squares of `class` whose facing edges are `edge_gap` columns apart
/// (difference between the last column of the first and first column of the second).
pub fn two_squares(edge_gap: u32, class: ColorClass) -> ClassMask {
    let mut mask = ClassMask::filled(4 + 40 + edge_gap + 40 + 4, 48, ColorClass::Background);
    square(&mut mask, 4, 4, 40, class);
    square(&mut mask, 4 + 39 + edge_gap, 4, 40, class);
    mask
}
