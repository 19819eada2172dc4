use super::RasterImage;

/// Per-channel histogram equalization.
///
/// Each channel is remapped independently with
/// `v' = round((cdf(v) - cdf_min) / (N - cdf_min) * 255)`, rounding half up.
/// A channel holding a single intensity is returned unchanged.
pub fn equalize_histogram(img: &RasterImage) -> RasterImage {
    let mut out = img.clone();
    let n = (img.width() as u64) * (img.height() as u64);
    for channel in 0..3 {
        let mut hist = [0u64; 256];
        for px in img.as_bgr().chunks_exact(3) {
            hist[px[channel] as usize] += 1;
        }
        let Some(lut) = equalization_lut(&hist, n) else {
            continue;
        };
        for px in out.bgr_mut().chunks_exact_mut(3) {
            px[channel] = lut[px[channel] as usize];
        }
    }
    out
}

/// `None` when the histogram has a single occupied bin.
fn equalization_lut(hist: &[u64; 256], n: u64) -> Option<[u8; 256]> {
    let cdf_min = hist.iter().copied().find(|&c| c > 0)?;
    let den = n - cdf_min;
    if den == 0 {
        return None;
    }
    let mut lut = [0u8; 256];
    let mut cdf = 0u64;
    for (v, &count) in hist.iter().enumerate() {
        cdf += count;
        if cdf < cdf_min {
            // below the first occupied bin; never looked up
            continue;
        }
        let num = (cdf - cdf_min) * 255;
        lut[v] = ((2 * num + den) / (2 * den)) as u8;
    }
    Some(lut)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn gray(width: u32, height: u32, values: &[u8]) -> RasterImage {
        let data = values.iter().flat_map(|&v| [v, v, v]).collect();
        RasterImage::from_bgr(width, height, data).unwrap()
    }

    fn channel(img: &RasterImage, c: usize) -> Vec<u8> {
        img.as_bgr().chunks_exact(3).map(|p| p[c]).collect()
    }

    #[test]
    fn two_level_channel_is_unchanged() {
        // cdf(0) = N/2 = cdf_min -> 0; cdf(255) = N -> 255
        let img = gray(4, 1, &[0, 255, 255, 0]);
        assert_eq!(equalize_histogram(&img), img);
    }

    #[test]
    fn single_intensity_channel_is_unchanged() {
        let img = gray(3, 3, &[77; 9]);
        assert_eq!(equalize_histogram(&img), img);
    }

    #[test]
    fn stretches_narrow_range() {
        // values 10,11,12,13, one each: cdf 1..4, cdf_min 1, N 4
        // -> round(0/3*255)=0, round(1/3*255)=85, round(2/3*255)=170, 255
        let img = gray(4, 1, &[10, 11, 12, 13]);
        assert_eq!(channel(&equalize_histogram(&img), 1), vec![0, 85, 170, 255]);
    }

    #[test]
    fn channels_are_independent() {
        let data = vec![0, 50, 9, 255, 50, 9];
        let img = RasterImage::from_bgr(2, 1, data).unwrap();
        let out = equalize_histogram(&img);
        assert_eq!(channel(&out, 0), vec![0, 255]);
        assert_eq!(channel(&out, 1), vec![50, 50]);
        assert_eq!(channel(&out, 2), vec![9, 9]);
    }

    fn occupied_ratio(values: &[u8]) -> f64 {
        let mut hist = [0u64; 256];
        for &v in values {
            hist[v as usize] += 1;
        }
        let occupied: Vec<u64> = hist.into_iter().filter(|&c| c > 0).collect();
        let max = *occupied.iter().max().unwrap() as f64;
        let min = *occupied.iter().min().unwrap() as f64;
        max / min
    }

    #[test]
    fn output_histogram_is_flatter_on_skewed_channels() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let values: Vec<u8> = (0..64 * 64)
                .map(|_| {
                    // squared uniform gives a strongly skewed histogram
                    let u: f64 = rng.random();
                    (u * u * 255.0) as u8
                })
                .collect();
            let img = gray(64, 64, &values);
            let out = channel(&equalize_histogram(&img), 0);
            assert!(occupied_ratio(&out) <= occupied_ratio(&values));
        }
    }

    proptest! {
        #[test]
        fn preserves_ordering(values in prop::collection::vec(any::<u8>(), 1..200)) {
            let img = gray(values.len() as u32, 1, &values);
            let out = channel(&equalize_histogram(&img), 2);
            for i in 0..values.len() {
                for j in 0..values.len() {
                    if values[i] <= values[j] {
                        prop_assert!(out[i] <= out[j]);
                    }
                }
            }
        }

        #[test]
        fn idempotent_within_one(data in prop::collection::vec(any::<u8>(), 3..600)) {
            let n = data.len() / 3;
            let img = RasterImage::from_bgr(n as u32, 1, data[..n * 3].to_vec()).unwrap();
            let once = equalize_histogram(&img);
            let twice = equalize_histogram(&once);
            for (a, b) in once.as_bgr().iter().zip(twice.as_bgr()) {
                prop_assert!(a.abs_diff(*b) <= 1);
            }
        }
    }
}
