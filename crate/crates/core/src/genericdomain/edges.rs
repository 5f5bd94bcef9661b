use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::synthdata::PayloadKind;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EdgeOperator {
    #[default]
    Sobel,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EdgeNormalization {
    /// Divide by the per-image maximum; an all-zero map stays zero.
    #[default]
    PerImageMax,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ChannelPolicy {
    /// Copy the grey edge map into every channel.
    #[default]
    Replicate,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EdgeParams {
    pub operator: EdgeOperator,
    pub normalization: EdgeNormalization,
    pub channels: ChannelPolicy,
}

/// Horizontal and vertical 3×3 Sobel responses of a grey image. Borders
/// replicate the nearest pixel, so constant regions touching the border
/// have zero gradient.
pub fn sobel_gradients(gray: &[f64], height: usize, width: usize) -> (Vec<f64>, Vec<f64>) {
    let at = |y: isize, x: isize| {
        let y = y.clamp(0, height as isize - 1) as usize;
        let x = x.clamp(0, width as isize - 1) as usize;
        gray[y * width + x]
    };
    let mut gx = vec![0.0; height * width];
    let mut gy = vec![0.0; height * width];
    for y in 0..height as isize {
        for x in 0..width as isize {
            let p = |dy, dx| at(y + dy, x + dx);
            let sx = (p(-1, 1) + 2.0 * p(0, 1) + p(1, 1)) - (p(-1, -1) + 2.0 * p(0, -1) + p(1, -1));
            let sy = (p(1, -1) + 2.0 * p(1, 0) + p(1, 1)) - (p(-1, -1) + 2.0 * p(-1, 0) + p(-1, 1));
            let i = y as usize * width + x as usize;
            gx[i] = sx;
            gy[i] = sy;
        }
    }
    (gx, gy)
}

/// Grey conversion as the channel mean.
pub fn to_gray(image: &[f64], height: usize, width: usize, channels: usize) -> Vec<f64> {
    (0..height * width)
        .map(|p| image[p * channels..(p + 1) * channels].iter().sum::<f64>() / channels as f64)
        .collect()
}

/// Sobel gradient magnitude, normalized to `[0, 1]` by the image maximum
/// and replicated across channels. Output dims equal input dims.
pub fn sobel_edges(image: &[f64], kind: PayloadKind, _params: &EdgeParams) -> Result<Vec<f64>> {
    let PayloadKind::Image {
        height,
        width,
        channels,
    } = kind
    else {
        return Err(Error::Kind("edge maps need image payloads".into()));
    };
    if channels == 0 || image.len() != kind.len() {
        return Err(Error::dim(
            "sobel_edges",
            format!("{} values for {height}x{width}x{channels}", image.len()),
        ));
    }
    let gray = to_gray(image, height, width, channels);
    let (gx, gy) = sobel_gradients(&gray, height, width);
    let mag: Vec<f64> = gx.iter().zip(&gy).map(|(a, b)| (a * a + b * b).sqrt()).collect();
    let max = mag.iter().cloned().fold(0.0, f64::max);
    let mut out = Vec::with_capacity(image.len());
    for m in mag {
        let v = if max > 0.0 { (m / max).min(1.0) } else { 0.0 };
        out.extend(std::iter::repeat_n(v, channels));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn img(h: usize, w: usize, c: usize) -> PayloadKind {
        PayloadKind::Image {
            height: h,
            width: w,
            channels: c,
        }
    }

    #[test]
    fn constant_image_has_no_edges() {
        let x = vec![0.8; 6 * 7 * 3];
        let e = sobel_edges(&x, img(6, 7, 3), &EdgeParams::default()).unwrap();
        assert!(e.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn step_edge_matches_hand_convolution() {
        // Columns 0,1 are 0 and columns 2,3,4 are 1.
        let gray: Vec<f64> = (0..25).map(|i| if i % 5 >= 2 { 1.0 } else { 0.0 }).collect();
        let (gx, gy) = sobel_gradients(&gray, 5, 5);
        for y in 1..4 {
            for x in 0..5 {
                let expect = if x == 1 || x == 2 { 4.0 } else { 0.0 };
                assert_eq!(gx[y * 5 + x].abs(), expect, "({y},{x})");
                assert_eq!(gy[y * 5 + x], 0.0);
            }
        }
    }

    #[test]
    fn flat_neighbourhoods_stay_zero_under_a_second_pass() {
        // A bright square on a flat background: large regions of E are zero.
        let (h, w) = (12, 12);
        let x: Vec<f64> = (0..h * w)
            .flat_map(|i| {
                let (y, x) = (i / w, i % w);
                let v = if (4..8).contains(&y) && (4..8).contains(&x) {
                    0.9
                } else {
                    0.2
                };
                [v; 3]
            })
            .collect();
        let kind = img(h, w, 3);
        let e = sobel_edges(&x, kind, &EdgeParams::default()).unwrap();
        let ee = sobel_edges(&e, kind, &EdgeParams::default()).unwrap();
        let at = |v: &[f64], y: isize, x: isize| {
            let (y, x) = (y.clamp(0, h as isize - 1) as usize, x.clamp(0, w as isize - 1) as usize);
            v[(y * w + x) * 3]
        };
        let mut checked = 0;
        for y in 0..h as isize {
            for x in 0..w as isize {
                let flat = (-1..=1).all(|dy| (-1..=1).all(|dx| at(&e, y + dy, x + dx) == 0.0));
                if flat {
                    checked += 1;
                    assert_eq!(at(&ee, y, x), 0.0, "({y},{x})");
                }
            }
        }
        assert!(checked > 20, "{checked}");
    }

    #[test]
    fn rejects_vectors() {
        assert!(matches!(
            sobel_edges(&[0.0; 4], PayloadKind::Vector { dim: 4 }, &EdgeParams::default()),
            Err(Error::Kind(_))
        ));
    }
}
