//! Inference-mode forward pass for transposed-convolution generators.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::weights::{Activation, GeneratorWeights, Layer, WeightsMetadata};
use super::LatentVector;

/// Largest `f32` strictly below one; tanh outputs are clamped to it.
const BELOW_ONE: f32 = 1.0 - f32::EPSILON / 2.0;

/// Dense `(channels, height, width)` activation volume, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct Volume {
    pub channels: usize,
    pub height: usize,
    pub width: usize,
    pub data: Vec<f32>,
}

impl Volume {
    pub fn zeros(channels: usize, height: usize, width: usize) -> Self {
        Volume {
            channels,
            height,
            width,
            data: vec![0.0; channels * height * width],
        }
    }

    pub fn at(&self, c: usize, y: usize, x: usize) -> f32 {
        self.data[(c * self.height + y) * self.width + x]
    }

    pub fn set(&mut self, c: usize, y: usize, x: usize, v: f32) {
        self.data[(c * self.height + y) * self.width + x] = v;
    }

    pub fn shape(&self) -> (usize, usize, usize) {
        (self.channels, self.height, self.width)
    }
}

/// Runs the generator on one latent vector. Deterministic for fixed weights.
pub fn forward(weights: &GeneratorWeights, z: &LatentVector) -> Volume {
    let mut x = Volume {
        channels: z.len(),
        height: 1,
        width: 1,
        data: z.values().iter().map(|&v| v as f32).collect(),
    };
    for layer in &weights.layers {
        x = match layer {
            Layer::ConvTranspose {
                in_channels,
                out_channels,
                kernel,
                stride,
                padding,
                weight,
                bias,
            } => conv_transpose(
                &x,
                *in_channels,
                *out_channels,
                *kernel,
                *stride,
                *padding,
                weight,
                bias.as_deref(),
            ),
            Layer::BatchNorm {
                eps,
                gamma,
                beta,
                running_mean,
                running_var,
                ..
            } => {
                let plane = x.height * x.width;
                for c in 0..x.channels {
                    let scale = gamma[c] / (running_var[c] + eps).sqrt();
                    let shift = beta[c] - running_mean[c] * scale;
                    for v in &mut x.data[c * plane..(c + 1) * plane] {
                        *v = *v * scale + shift;
                    }
                }
                x
            }
            Layer::Activation(act) => {
                match *act {
                    Activation::Relu => x.data.iter_mut().for_each(|v| *v = v.max(0.0)),
                    Activation::LeakyRelu { slope } => x
                        .data
                        .iter_mut()
                        .for_each(|v| *v = if *v < 0.0 { *v * slope } else { *v }),
                    Activation::Tanh => x
                        .data
                        .iter_mut()
                        .for_each(|v| *v = v.tanh().clamp(-BELOW_ONE, BELOW_ONE)),
                }
                x
            }
        };
    }
    x
}

#[allow(clippy::too_many_arguments)]
fn conv_transpose(
    input: &Volume,
    in_channels: usize,
    out_channels: usize,
    kernel: usize,
    stride: usize,
    padding: usize,
    weight: &[f32],
    bias: Option<&[f32]>,
) -> Volume {
    debug_assert_eq!(input.channels, in_channels);
    let out_h = (input.height - 1) * stride + kernel - 2 * padding;
    let out_w = (input.width - 1) * stride + kernel - 2 * padding;
    let mut out = Volume::zeros(out_channels, out_h, out_w);
    let plane = out_h * out_w;
    if let Some(b) = bias {
        for (o, &bv) in b.iter().enumerate() {
            out.data[o * plane..(o + 1) * plane].fill(bv);
        }
    }
    let k2 = kernel * kernel;
    let pad = padding as isize;
    for i in 0..in_channels {
        for o in 0..out_channels {
            let w = &weight[(i * out_channels + o) * k2..(i * out_channels + o + 1) * k2];
            let dst = &mut out.data[o * plane..(o + 1) * plane];
            for iy in 0..input.height {
                for ix in 0..input.width {
                    let v = input.at(i, iy, ix);
                    if v == 0.0 {
                        continue;
                    }
                    let base_y = (iy * stride) as isize - pad;
                    let base_x = (ix * stride) as isize - pad;
                    for ky in 0..kernel {
                        let y = base_y + ky as isize;
                        if y < 0 || y >= out_h as isize {
                            continue;
                        }
                        let row = &mut dst[y as usize * out_w..(y as usize + 1) * out_w];
                        for kx in 0..kernel {
                            let xx = base_x + kx as isize;
                            if xx < 0 || xx >= out_w as isize {
                                continue;
                            }
                            row[xx as usize] += v * w[ky * kernel + kx];
                        }
                    }
                }
            }
        }
    }
    out
}

/// Randomly initialised weights with the reference DCGAN layout:
/// `5 -> 256x4x4 -> 128x8x8 -> 64x16x16 -> 12x32x32`, batch norm and ReLU
/// between blocks and a tanh output.
pub fn reference_weights(seed: u64) -> GeneratorWeights {
    dcgan_weights(seed, [256, 128, 64])
}

/// Same layout as [`reference_weights`] with custom hidden widths.
pub fn dcgan_weights(seed: u64, widths: [usize; 3]) -> GeneratorWeights {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut layers = Vec::new();
    let mut in_ch = super::weights::LATENT_SIZE;
    let plan = [
        (widths[0], 1, 0),
        (widths[1], 2, 1),
        (widths[2], 2, 1),
        (crate::tile::Tile::CHANNELS, 2, 1),
    ];
    for (idx, &(out_ch, stride, padding)) in plan.iter().enumerate() {
        let fan = (in_ch * 16) as f32;
        let bound = (1.0 / fan).sqrt() * 2.0;
        let weight = (0..in_ch * out_ch * 16)
            .map(|_| rng.random_range(-bound..bound))
            .collect();
        layers.push(Layer::ConvTranspose {
            in_channels: in_ch,
            out_channels: out_ch,
            kernel: 4,
            stride,
            padding,
            weight,
            bias: None,
        });
        if idx + 1 < plan.len() {
            layers.push(Layer::BatchNorm {
                channels: out_ch,
                eps: 1e-5,
                gamma: (0..out_ch).map(|_| rng.random_range(0.8..1.2)).collect(),
                beta: (0..out_ch).map(|_| rng.random_range(-0.1..0.1)).collect(),
                running_mean: (0..out_ch).map(|_| rng.random_range(-0.05..0.05)).collect(),
                running_var: (0..out_ch).map(|_| rng.random_range(0.5..1.5)).collect(),
            });
            layers.push(Layer::Activation(Activation::Relu));
        }
        in_ch = out_ch;
    }
    layers.push(Layer::Activation(Activation::Tanh));
    GeneratorWeights::new(WeightsMetadata::default(), layers).expect("reference layout is valid")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn forward_is_deterministic_and_bounded() {
        let w = dcgan_weights(5, [16, 8, 8]);
        let z = LatentVector::zeros();
        let a = forward(&w, &z);
        let b = forward(&w, &z);
        assert_eq!(a, b);
        assert_eq!(a.shape(), (12, 32, 32));
        assert!(a.data.iter().all(|v| *v > -1.0 && *v < 1.0));
    }

    #[test]
    fn saturated_tanh_stays_inside_open_interval() {
        let mut w = dcgan_weights(5, [8, 8, 8]);
        for l in &mut w.layers {
            if let Layer::ConvTranspose { weight, .. } = l {
                weight.iter_mut().for_each(|v| *v *= 1000.0);
            }
        }
        let out = forward(&w, &LatentVector::new(&[1.0, -1.0, 1.0, -1.0, 1.0]).unwrap());
        assert!(out.data.iter().all(|v| v.abs() < 1.0));
    }

    /// Direct gather formulation of the transposed convolution, independent of
    /// the scatter loop above.
    fn gather_conv_transpose(
        input: &Volume,
        out_ch: usize,
        k: usize,
        s: usize,
        p: usize,
        w: &[f32],
    ) -> Volume {
        let oh = (input.height - 1) * s + k - 2 * p;
        let ow = (input.width - 1) * s + k - 2 * p;
        let mut out = Volume::zeros(out_ch, oh, ow);
        for o in 0..out_ch {
            for y in 0..oh {
                for x in 0..ow {
                    let mut acc = 0.0f64;
                    for i in 0..input.channels {
                        for ky in 0..k {
                            for kx in 0..k {
                                let ny = y as isize + p as isize - ky as isize;
                                let nx = x as isize + p as isize - kx as isize;
                                if ny < 0 || nx < 0 || ny % s as isize != 0 || nx % s as isize != 0 {
                                    continue;
                                }
                                let (iy, ix) = ((ny / s as isize) as usize, (nx / s as isize) as usize);
                                if iy >= input.height || ix >= input.width {
                                    continue;
                                }
                                acc += input.at(i, iy, ix) as f64
                                    * w[((i * out_ch + o) * k + ky) * k + kx] as f64;
                            }
                        }
                    }
                    out.set(o, y, x, acc as f32);
                }
            }
        }
        out
    }

    #[test]
    fn scatter_matches_gather() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let input = Volume {
            channels: 3,
            height: 5,
            width: 4,
            data: (0..60).map(|_| rng.random_range(-1.0..1.0)).collect(),
        };
        let w: Vec<f32> = (0..3 * 2 * 16).map(|_| rng.random_range(-1.0..1.0)).collect();
        for (s, p) in [(1, 0), (2, 1), (2, 0), (3, 2)] {
            let a = conv_transpose(&input, 3, 2, 4, s, p, &w, None);
            let b = gather_conv_transpose(&input, 2, 4, s, p, &w);
            assert_eq!(a.shape(), b.shape());
            for (x, y) in a.data.iter().zip(&b.data) {
                assert!((x - y).abs() < 1e-5, "{x} vs {y} (s={s}, p={p})");
            }
        }
    }
}
