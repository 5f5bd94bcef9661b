//! Label-preserving sub-domain augmentations. Each one rewrites colour,
//! contrast or low-frequency content while leaving the shape untouched;
//! outputs are clamped to `[0, 1]`.

use std::f64::consts::PI;

use rand::seq::SliceRandom;
use rand::Rng;
use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::seeded_rng;
use crate::synthdata::PayloadKind;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum StyleReference {
    /// Smooth multi-sinusoid colour field generated from `seed`.
    Procedural { seed: u64 },
    /// Explicit `H×W×C` pixels matching the augmented image.
    Pixels { data: Vec<f64> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum AugmentationKind {
    Identity,
    /// Random colour-mixing matrix blended with identity by `strength`.
    PaletteRemap {
        strength: f64,
    },
    /// Fixed permutation, or a random one per sample when absent.
    ChannelPermute {
        #[serde(default)]
        permutation: Option<Vec<usize>>,
    },
    /// Replace the amplitude of DFT coefficients with wrapped frequency
    /// radius `< radius` by the reference's, keeping the phase.
    LowFreqSwap {
        #[serde(default)]
        reference: Option<StyleReference>,
        radius: f64,
    },
    /// Blend towards a smooth bright haze.
    AdditiveFog {
        strength: f64,
    },
    /// Scale deviations from the image mean by a factor in `[low, high]`.
    ContrastJitter {
        low: f64,
        high: f64,
    },
}

impl AugmentationKind {
    pub fn name(&self) -> &'static str {
        match self {
            AugmentationKind::Identity => "identity",
            AugmentationKind::PaletteRemap { .. } => "palette-remap",
            AugmentationKind::ChannelPermute { .. } => "channel-permute",
            AugmentationKind::LowFreqSwap { .. } => "low-freq-swap",
            AugmentationKind::AdditiveFog { .. } => "additive-fog",
            AugmentationKind::ContrastJitter { .. } => "contrast-jitter",
        }
    }

    /// The four default strong augmentations (five sub-domains with the
    /// original).
    pub fn default_set() -> Vec<AugmentationKind> {
        vec![
            AugmentationKind::PaletteRemap { strength: 0.8 },
            AugmentationKind::LowFreqSwap {
                reference: Some(StyleReference::Procedural { seed: 17 }),
                radius: 3.0,
            },
            AugmentationKind::AdditiveFog { strength: 0.5 },
            AugmentationKind::ChannelPermute { permutation: None },
        ]
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |reason: &str| Err(Error::config(format!("augmentation.{}", self.name()), reason));
        match self {
            AugmentationKind::PaletteRemap { strength } | AugmentationKind::AdditiveFog { strength }
                if !(0.0..=1.0).contains(strength) =>
            {
                bad("strength must lie in [0, 1]")
            }
            AugmentationKind::LowFreqSwap { reference: None, .. } => bad("low-freq-swap needs a reference image"),
            AugmentationKind::LowFreqSwap { radius, .. } if !(*radius >= 0.0) => bad("radius must be >= 0"),
            AugmentationKind::ContrastJitter { low, high } if !(*low > 0.0 && low <= high) => {
                bad("need 0 < low <= high")
            }
            _ => Ok(()),
        }
    }
}

fn image_dims(kind: PayloadKind) -> Result<(usize, usize, usize)> {
    match kind {
        PayloadKind::Image {
            height,
            width,
            channels,
        } => Ok((height, width, channels)),
        PayloadKind::Vector { .. } => Err(Error::Kind("image augmentation applied to a vector payload".into())),
    }
}

/// Procedural style image: per channel a few random low-frequency
/// sinusoids around a random base colour.
pub fn procedural_reference(seed: u64, height: usize, width: usize, channels: usize) -> Vec<f64> {
    let mut rng = seeded_rng(seed);
    let mut out = vec![0.0; height * width * channels];
    for c in 0..channels {
        let base: f64 = rng.random_range(0.2..0.8);
        let waves: Vec<(f64, f64, f64, f64)> = (0..3)
            .map(|_| {
                (
                    rng.random_range(0.0..2.0),
                    rng.random_range(0.0..2.0),
                    rng.random_range(0.0..2.0 * PI),
                    rng.random_range(0.05..0.15),
                )
            })
            .collect();
        for y in 0..height {
            for x in 0..width {
                let u = y as f64 / height as f64;
                let v = x as f64 / width as f64;
                let s: f64 = waves
                    .iter()
                    .map(|(fy, fx, ph, a)| a * (2.0 * PI * (fy * u + fx * v) + ph).sin())
                    .sum();
                out[(y * width + x) * channels + c] = (base + s).clamp(0.0, 1.0);
            }
        }
    }
    out
}

fn fft2(data: &mut [Complex64], height: usize, width: usize, inverse: bool) {
    let mut planner = FftPlanner::new();
    let (row_fft, col_fft) = if inverse {
        (planner.plan_fft_inverse(width), planner.plan_fft_inverse(height))
    } else {
        (planner.plan_fft_forward(width), planner.plan_fft_forward(height))
    };
    for row in data.chunks_mut(width) {
        row_fft.process(row);
    }
    let mut col = vec![Complex64::new(0.0, 0.0); height];
    for x in 0..width {
        for y in 0..height {
            col[y] = data[y * width + x];
        }
        col_fft.process(&mut col);
        for y in 0..height {
            data[y * width + x] = col[y];
        }
    }
}

/// Amplitude swap inside the wrapped-frequency disc `r < radius`.
pub fn low_freq_swap(
    image: &[f64],
    reference: &[f64],
    height: usize,
    width: usize,
    channels: usize,
    radius: f64,
) -> Result<Vec<f64>> {
    if reference.len() != image.len() {
        return Err(Error::dim(
            "low_freq_swap",
            format!("reference has {} values, image {}", reference.len(), image.len()),
        ));
    }
    let mut out = image.to_vec();
    let in_disc = |u: usize, v: usize| {
        let fu = u.min(height - u) as f64;
        let fv = v.min(width - v) as f64;
        (fu * fu + fv * fv).sqrt() < radius
    };
    if !(0..height).any(|u| (0..width).any(|v| in_disc(u, v))) {
        return Ok(out);
    }
    let n = (height * width) as f64;
    for c in 0..channels {
        let plane = |src: &[f64]| -> Vec<Complex64> {
            (0..height * width)
                .map(|p| Complex64::new(src[p * channels + c], 0.0))
                .collect()
        };
        let mut xs = plane(image);
        let mut rs = plane(reference);
        fft2(&mut xs, height, width, false);
        fft2(&mut rs, height, width, false);
        for u in 0..height {
            for v in 0..width {
                if in_disc(u, v) {
                    let i = u * width + v;
                    let amp = rs[i].norm();
                    let phase = xs[i].arg();
                    xs[i] = Complex64::from_polar(amp, phase);
                }
            }
        }
        fft2(&mut xs, height, width, true);
        for p in 0..height * width {
            out[p * channels + c] = (xs[p].re / n).clamp(0.0, 1.0);
        }
    }
    Ok(out)
}

fn fog_field<R: Rng>(rng: &mut R, height: usize, width: usize) -> Vec<f64> {
    const G: usize = 4;
    let grid: Vec<f64> = (0..G * G).map(|_| rng.random_range(0.5..1.0)).collect();
    let mut out = vec![0.0; height * width];
    for y in 0..height {
        for x in 0..width {
            let gy = y as f64 / (height - 1).max(1) as f64 * (G - 1) as f64;
            let gx = x as f64 / (width - 1).max(1) as f64 * (G - 1) as f64;
            let (y0, x0) = (gy.floor() as usize, gx.floor() as usize);
            let (y1, x1) = ((y0 + 1).min(G - 1), (x0 + 1).min(G - 1));
            let (ty, tx) = (gy - y0 as f64, gx - x0 as f64);
            let top = grid[y0 * G + x0] * (1.0 - tx) + grid[y0 * G + x1] * tx;
            let bot = grid[y1 * G + x0] * (1.0 - tx) + grid[y1 * G + x1] * tx;
            out[y * width + x] = top * (1.0 - ty) + bot * ty;
        }
    }
    out
}

pub fn apply_augmentation(image: &[f64], kind: PayloadKind, aug: &AugmentationKind, seed: u64) -> Result<Vec<f64>> {
    aug.validate()?;
    if let AugmentationKind::Identity = aug {
        return Ok(image.to_vec());
    }
    let (h, w, c) = image_dims(kind)?;
    if image.len() != h * w * c {
        return Err(Error::dim(
            "augmentation",
            format!("{} values for {h}x{w}x{c}", image.len()),
        ));
    }
    let mut rng = seeded_rng(seed);
    let out = match aug {
        AugmentationKind::Identity => unreachable!(),
        AugmentationKind::PaletteRemap { strength } => {
            let s = *strength;
            let mix: Vec<Vec<f64>> = (0..c)
                .map(|i| {
                    let raw: Vec<f64> = (0..c).map(|_| rng.random_range(0.0..1.0)).collect();
                    let total: f64 = raw.iter().sum::<f64>().max(1e-12);
                    (0..c)
                        .map(|j| (1.0 - s) * f64::from(u8::from(i == j)) + s * raw[j] / total)
                        .collect()
                })
                .collect();
            let offset: Vec<f64> = (0..c).map(|_| s * rng.random_range(-0.2..0.2)).collect();
            let mut out = vec![0.0; image.len()];
            for p in 0..h * w {
                let px = &image[p * c..(p + 1) * c];
                for i in 0..c {
                    let v: f64 = mix[i].iter().zip(px).map(|(m, x)| m * x).sum::<f64>() + offset[i];
                    out[p * c + i] = v.clamp(0.0, 1.0);
                }
            }
            out
        }
        AugmentationKind::ChannelPermute { permutation } => {
            let perm = match permutation {
                Some(p) => {
                    let mut sorted = p.clone();
                    sorted.sort_unstable();
                    if sorted != (0..c).collect::<Vec<_>>() {
                        return Err(Error::config(
                            "augmentation.channel-permute.permutation",
                            format!("{p:?} is not a permutation of 0..{c}"),
                        ));
                    }
                    p.clone()
                }
                None => {
                    let mut p: Vec<usize> = (0..c).collect();
                    p.shuffle(&mut rng);
                    p
                }
            };
            let mut out = vec![0.0; image.len()];
            for p in 0..h * w {
                for (i, &src) in perm.iter().enumerate() {
                    out[p * c + i] = image[p * c + src];
                }
            }
            out
        }
        AugmentationKind::LowFreqSwap { reference, radius } => {
            let r = match reference {
                Some(StyleReference::Procedural { seed }) => procedural_reference(*seed, h, w, c),
                Some(StyleReference::Pixels { data }) => data.clone(),
                None => unreachable!("validated"),
            };
            low_freq_swap(image, &r, h, w, c, *radius)?
        }
        AugmentationKind::AdditiveFog { strength } => {
            let fog = fog_field(&mut rng, h, w);
            let haze = 0.9;
            let mut out = vec![0.0; image.len()];
            for p in 0..h * w {
                let a = strength * fog[p];
                for i in 0..c {
                    out[p * c + i] = ((1.0 - a) * image[p * c + i] + a * haze).clamp(0.0, 1.0);
                }
            }
            out
        }
        AugmentationKind::ContrastJitter { low, high } => {
            let factor = if low == high {
                *low
            } else {
                rng.random_range(*low..*high)
            };
            let mean = image.iter().sum::<f64>() / image.len() as f64;
            image
                .iter()
                .map(|&v| (mean + factor * (v - mean)).clamp(0.0, 1.0))
                .collect()
        }
    };
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    const KIND: PayloadKind = PayloadKind::Image {
        height: 8,
        width: 8,
        channels: 3,
    };

    fn sample_image() -> Vec<f64> {
        procedural_reference(99, 8, 8, 3)
    }

    #[test]
    fn identity_permutation_is_noop() {
        let x = sample_image();
        let aug = AugmentationKind::ChannelPermute {
            permutation: Some(vec![0, 1, 2]),
        };
        assert_eq!(apply_augmentation(&x, KIND, &aug, 5).unwrap(), x);
    }

    #[test]
    fn radius_zero_swaps_nothing() {
        let x = sample_image();
        let aug = AugmentationKind::LowFreqSwap {
            reference: Some(StyleReference::Procedural { seed: 1 }),
            radius: 0.0,
        };
        assert_eq!(apply_augmentation(&x, KIND, &aug, 5).unwrap(), x);
    }

    #[test]
    fn self_reference_round_trips() {
        let x = sample_image();
        let aug = AugmentationKind::LowFreqSwap {
            reference: Some(StyleReference::Pixels { data: x.clone() }),
            radius: 4.0,
        };
        let y = apply_augmentation(&x, KIND, &aug, 5).unwrap();
        let err = x.iter().zip(&y).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(err < 1e-9, "{err}");
    }

    #[test]
    fn dc_swap_moves_the_mean_to_the_reference() {
        let x = vec![0.2; 8 * 8 * 3];
        let r = vec![0.7; 8 * 8 * 3];
        let y = low_freq_swap(&x, &r, 8, 8, 3, 1.0).unwrap();
        assert!(y.iter().all(|v| (v - 0.7).abs() < 1e-12));
    }

    #[test]
    fn missing_reference_is_config_error() {
        let aug = AugmentationKind::LowFreqSwap {
            reference: None,
            radius: 2.0,
        };
        assert!(matches!(
            apply_augmentation(&sample_image(), KIND, &aug, 0),
            Err(Error::Config { .. })
        ));
    }

    #[test]
    fn outputs_stay_in_unit_range() {
        let x = sample_image();
        for (i, aug) in AugmentationKind::default_set()
            .into_iter()
            .chain([AugmentationKind::ContrastJitter { low: 0.5, high: 2.5 }])
            .enumerate()
        {
            let y = apply_augmentation(&x, KIND, &aug, i as u64).unwrap();
            assert_eq!(y.len(), x.len());
            assert!(y.iter().all(|v| (0.0..=1.0).contains(v)), "{}", aug.name());
        }
    }
}
