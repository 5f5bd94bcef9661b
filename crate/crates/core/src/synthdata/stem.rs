//! Fixed (non-trainable) 3×3 convolution stem: 8 output channels, stride 2,
//! zero padding 1, ReLU. Turns `H×W×C` images into `⌈H/2⌉×⌈W/2⌉×8` vectors.

use super::dataset::{DomainDataset, PayloadKind};
use crate::error::{Error, Result};

pub const STEM_CHANNELS: usize = 8;

// Channels 0..3 low-pass one colour channel each; 3..8 act on the grey image.
const BOX: [f64; 9] = [1. / 9.; 9];
const SOBEL_X: [f64; 9] = [-1., 0., 1., -2., 0., 2., -1., 0., 1.];
const SOBEL_Y: [f64; 9] = [-1., -2., -1., 0., 0., 0., 1., 2., 1.];
const SOBEL_X_NEG: [f64; 9] = [1., 0., -1., 2., 0., -2., 1., 0., -1.];
const SOBEL_Y_NEG: [f64; 9] = [1., 2., 1., 0., 0., 0., -1., -2., -1.];
const LAPLACE: [f64; 9] = [0., -1., 0., -1., 4., -1., 0., -1., 0.];

pub fn stem_output_dims(height: usize, width: usize) -> (usize, usize) {
    (height.div_ceil(2), width.div_ceil(2))
}

pub fn conv_stem(image: &[f64], height: usize, width: usize, channels: usize) -> Result<Vec<f64>> {
    if image.len() != height * width * channels || channels == 0 {
        return Err(Error::dim(
            "conv_stem",
            format!("{} values for {height}x{width}x{channels}", image.len()),
        ));
    }
    let gray: Vec<f64> = (0..height * width)
        .map(|p| image[p * channels..(p + 1) * channels].iter().sum::<f64>() / channels as f64)
        .collect();
    let plane = |c: usize| -> Vec<f64> {
        (0..height * width)
            .map(|p| image[p * channels + c % channels])
            .collect()
    };
    let planes = [plane(0), plane(1), plane(2)];
    let kernels: [(&[f64], &[f64; 9]); STEM_CHANNELS] = [
        (&planes[0], &BOX),
        (&planes[1], &BOX),
        (&planes[2], &BOX),
        (&gray, &SOBEL_X),
        (&gray, &SOBEL_Y),
        (&gray, &SOBEL_X_NEG),
        (&gray, &SOBEL_Y_NEG),
        (&gray, &LAPLACE),
    ];
    let (oh, ow) = stem_output_dims(height, width);
    let mut out = vec![0.0; oh * ow * STEM_CHANNELS];
    for oy in 0..oh {
        for ox in 0..ow {
            let (cy, cx) = (2 * oy, 2 * ox);
            for (k, (src, kern)) in kernels.iter().enumerate() {
                let mut acc = 0.0;
                for ky in 0..3 {
                    for kx in 0..3 {
                        let y = cy as isize + ky as isize - 1;
                        let x = cx as isize + kx as isize - 1;
                        if y < 0 || x < 0 || y >= height as isize || x >= width as isize {
                            continue;
                        }
                        acc += kern[ky * 3 + kx] * src[y as usize * width + x as usize];
                    }
                }
                out[(oy * ow + ox) * STEM_CHANNELS + k] = acc.max(0.0);
            }
        }
    }
    Ok(out)
}

/// Applies the stem to every sample of an image dataset.
pub fn apply_conv_stem(d: &DomainDataset) -> Result<DomainDataset> {
    let PayloadKind::Image {
        height,
        width,
        channels,
    } = d.payload_kind
    else {
        return Err(Error::Kind("conv stem needs image payloads".into()));
    };
    let (oh, ow) = stem_output_dims(height, width);
    let mut out = d.clone();
    for s in &mut out.samples {
        s.payload = conv_stem(&s.payload, height, width, channels)?;
    }
    out.payload_kind = PayloadKind::Vector {
        dim: oh * ow * STEM_CHANNELS,
    };
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn output_shape_and_constant_response() {
        let img = vec![0.5; 16 * 16 * 3];
        let out = conv_stem(&img, 16, 16, 3).unwrap();
        assert_eq!(out.len(), 8 * 8 * 8);
        // Interior pixel: box filters give the colour, gradient filters zero.
        let p = (3 * 8 + 3) * STEM_CHANNELS;
        assert!((out[p] - 0.5).abs() < 1e-12);
        assert!(out[p + 3..p + 8].iter().all(|v| v.abs() < 1e-12));
    }
}
