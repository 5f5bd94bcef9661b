//! Shape/texture images: the class is the shape, while foreground colour
//! and background style vary by domain. `texture_class_corr` controls how
//! much the foreground colour also carries the class.

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::dataset::{DomainDataset, DomainRole, EvalLabels, LabeledSample, PayloadKind};
use crate::error::{Error, Result};
use crate::numerics::substream;

pub const SHAPE_CLASSES: usize = 4;
pub const SHAPE_NAMES: [&str; SHAPE_CLASSES] = ["square", "circle", "triangle", "cross"];
pub const MIN_IMAGE_SIDE: usize = 16;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum BackgroundTexture {
    Flat,
    /// Linear ramp along `angle_deg` spanning `±amplitude`.
    Gradient {
        angle_deg: f64,
        amplitude: f64,
    },
    /// Horizontal sinusoidal bands.
    Stripes {
        period: f64,
        amplitude: f64,
    },
    Checker {
        period: usize,
        amplitude: f64,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainStyle {
    /// Foreground colour per class index.
    pub palette: Vec<[f64; 3]>,
    pub background: [f64; 3],
    pub texture: BackgroundTexture,
}

impl DomainStyle {
    pub fn default_source() -> Self {
        DomainStyle {
            palette: vec![
                [0.85, 0.15, 0.15],
                [0.15, 0.65, 0.20],
                [0.15, 0.25, 0.85],
                [0.55, 0.20, 0.60],
            ],
            background: [0.85, 0.80, 0.70],
            texture: BackgroundTexture::Gradient {
                angle_deg: 0.0,
                amplitude: 0.08,
            },
        }
    }

    pub fn default_target() -> Self {
        DomainStyle {
            palette: vec![
                [0.95, 0.55, 0.10],
                [0.10, 0.55, 0.55],
                [0.45, 0.10, 0.45],
                [0.10, 0.35, 0.10],
            ],
            background: [0.70, 0.75, 0.85],
            texture: BackgroundTexture::Stripes {
                period: 6.0,
                amplitude: 0.05,
            },
        }
    }

    /// Background colour at pixel `(y, x)` before noise.
    pub fn background_at(&self, y: usize, x: usize, height: usize, width: usize) -> [f64; 3] {
        let pattern = match self.texture {
            BackgroundTexture::Flat => 0.0,
            BackgroundTexture::Gradient { angle_deg, amplitude } => {
                let (s, c) = angle_deg.to_radians().sin_cos();
                let u = (x as f64 + 0.5) / width as f64 - 0.5;
                let v = (y as f64 + 0.5) / height as f64 - 0.5;
                amplitude * 2.0 * (u * c + v * s)
            }
            BackgroundTexture::Stripes { period, amplitude } => {
                amplitude * (2.0 * std::f64::consts::PI * y as f64 / period).sin()
            }
            BackgroundTexture::Checker { period, amplitude } => {
                let p = period.max(1);
                if (y / p + x / p) % 2 == 0 {
                    amplitude
                } else {
                    -amplitude
                }
            }
        };
        self.background.map(|b| (b + pattern).clamp(0.0, 1.0))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ShapeTextureConfig {
    pub height: usize,
    pub width: usize,
    pub channels: usize,
    pub texture_class_corr: f64,
    /// Standard deviation of per-pixel Gaussian noise.
    pub noise: f64,
    pub samples_per_class: usize,
    pub seed: u64,
    pub source_style: DomainStyle,
    pub target_style: DomainStyle,
}

impl Default for ShapeTextureConfig {
    fn default() -> Self {
        ShapeTextureConfig {
            height: 32,
            width: 32,
            channels: 3,
            texture_class_corr: 0.5,
            noise: 0.12,
            samples_per_class: 100,
            seed: 0,
            source_style: DomainStyle::default_source(),
            target_style: DomainStyle::default_target(),
        }
    }
}

impl ShapeTextureConfig {
    pub fn validate(&self) -> Result<()> {
        if self.height < MIN_IMAGE_SIDE || self.width < MIN_IMAGE_SIDE {
            return Err(Error::config(
                "shape_texture.height/width",
                format!(
                    "{}x{} is smaller than {MIN_IMAGE_SIDE}x{MIN_IMAGE_SIDE}; shapes are unrenderable",
                    self.height, self.width
                ),
            ));
        }
        if self.channels == 0 {
            return Err(Error::config("shape_texture.channels", "must be >= 1"));
        }
        if !(0.0..=1.0).contains(&self.texture_class_corr) {
            return Err(Error::config("shape_texture.texture_class_corr", "must lie in [0, 1]"));
        }
        if !(self.noise >= 0.0) {
            return Err(Error::config("shape_texture.noise", "must be >= 0"));
        }
        if self.samples_per_class == 0 {
            return Err(Error::config("shape_texture.samples_per_class", "must be >= 1"));
        }
        for (name, style) in [
            ("source_style", &self.source_style),
            ("target_style", &self.target_style),
        ] {
            if style.palette.len() != SHAPE_CLASSES {
                return Err(Error::config(
                    format!("shape_texture.{name}.palette"),
                    format!("needs {SHAPE_CLASSES} colours"),
                ));
            }
            let in_range = |c: &[f64; 3]| c.iter().all(|v| (0.0..=1.0).contains(v));
            if !style.palette.iter().all(in_range) || !in_range(&style.background) {
                return Err(Error::config(
                    format!("shape_texture.{name}"),
                    "colours must lie in [0, 1]",
                ));
            }
        }
        Ok(())
    }

    pub fn payload_kind(&self) -> PayloadKind {
        PayloadKind::Image {
            height: self.height,
            width: self.width,
            channels: self.channels,
        }
    }
}

/// Binary mask of `class` centred at `(cy, cx)` with size `r`, sampled at
/// pixel centres.
pub fn shape_mask(class: usize, height: usize, width: usize, cy: f64, cx: f64, r: f64) -> Vec<bool> {
    let mut mask = vec![false; height * width];
    for y in 0..height {
        for x in 0..width {
            let dy = y as f64 + 0.5 - cy;
            let dx = x as f64 + 0.5 - cx;
            mask[y * width + x] = match class {
                0 => dx.abs() <= 0.8 * r && dy.abs() <= 0.8 * r,
                1 => dx * dx + dy * dy <= r * r,
                2 => dy >= -r && dy <= r && dx.abs() <= 0.65 * (dy + r),
                _ => {
                    let t = 0.4 * r;
                    (dx.abs() <= t && dy.abs() <= r) || (dy.abs() <= t && dx.abs() <= r)
                }
            };
        }
    }
    mask
}

fn render_domain(cfg: &ShapeTextureConfig, style: &DomainStyle, label: &str) -> (Vec<LabeledSample>, Vec<usize>) {
    let (h, w, ch) = (cfg.height, cfg.width, cfg.channels);
    let side = h.min(w) as f64;
    let mut rng = substream(cfg.seed, &format!("shape-texture/{label}"));
    let noise = Normal::new(0.0, cfg.noise.max(0.0)).unwrap();
    let bg: Vec<[f64; 3]> = (0..h * w).map(|i| style.background_at(i / w, i % w, h, w)).collect();
    let mut samples = Vec::with_capacity(cfg.samples_per_class * SHAPE_CLASSES);
    let mut labels = Vec::with_capacity(samples.capacity());
    for _ in 0..cfg.samples_per_class {
        for class in 0..SHAPE_CLASSES {
            let cy = h as f64 / 2.0 + rng.random_range(-0.1..0.1) * side;
            let cx = w as f64 / 2.0 + rng.random_range(-0.1..0.1) * side;
            let r = rng.random_range(0.22..0.30) * side;
            let colour_idx = if rng.random::<f64>() < cfg.texture_class_corr {
                class
            } else {
                rng.random_range(0..SHAPE_CLASSES)
            };
            let fg = style.palette[colour_idx];
            let mask = shape_mask(class, h, w, cy, cx, r);
            let mut payload = Vec::with_capacity(h * w * ch);
            for (p, &m) in mask.iter().enumerate() {
                let base = if m { fg } else { bg[p] };
                for c in 0..ch {
                    let v = if ch == 3 {
                        base[c]
                    } else {
                        (base[0] + base[1] + base[2]) / 3.0
                    };
                    let n = if cfg.noise > 0.0 { noise.sample(&mut rng) } else { 0.0 };
                    payload.push((v + n).clamp(0.0, 1.0));
                }
            }
            samples.push(LabeledSample {
                payload,
                label: Some(class),
            });
            labels.push(class);
        }
    }
    (samples, labels)
}

/// Source (labelled), target (unlabelled) and the quarantined target labels.
pub fn gen_shape_texture(cfg: &ShapeTextureConfig) -> Result<(DomainDataset, DomainDataset, EvalLabels)> {
    cfg.validate()?;
    let provenance = format!(
        "shape-texture {}x{}x{} corr={} noise={} spc={} seed={}",
        cfg.height, cfg.width, cfg.channels, cfg.texture_class_corr, cfg.noise, cfg.samples_per_class, cfg.seed
    );
    let (src, _) = render_domain(cfg, &cfg.source_style, "source");
    let (tgt, tgt_labels) = render_domain(cfg, &cfg.target_style, "target");
    let source = DomainDataset {
        role: DomainRole::Source,
        samples: src,
        class_count: SHAPE_CLASSES,
        payload_kind: cfg.payload_kind(),
        provenance: provenance.clone(),
    };
    let target = DomainDataset {
        role: DomainRole::Target,
        samples: tgt
            .into_iter()
            .map(|s| LabeledSample {
                payload: s.payload,
                label: None,
            })
            .collect(),
        class_count: SHAPE_CLASSES,
        payload_kind: cfg.payload_kind(),
        provenance,
    };
    Ok((source, target, EvalLabels::new(tgt_labels)))
}
