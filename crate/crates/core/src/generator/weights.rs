//! Versioned generator weight files.
//!
//! Two encodings share one document layout:
//!
//! * **text**: a JSON document whose parameter arrays are decimal numbers.
//! * **binary**: the magic bytes [`BINARY_MAGIC`], a little-endian `u32`
//!   header length, the JSON header, then a blob of little-endian `f32`
//!   values. In the header each parameter array is replaced by
//!   `{"offset": <f32 index>, "len": <count>}` pointing into the blob.
//!
//! Convolution kernels use the `(in_channels, out_channels, k, k)` row-major
//! layout of transposed convolutions.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::segment::{SEGMENT_COLS, SEGMENT_ROWS};
use crate::tile::Tile;

pub const FORMAT_TAG: &str = "levelgan-generator-weights";
pub const FORMAT_VERSION: u32 = 1;
pub const BINARY_MAGIC: &[u8; 8] = b"LGANWGT\0";

pub const LATENT_SIZE: usize = 5;
pub const CANVAS: usize = 32;

const PARAM_KEYS: [&str; 6] = ["weight", "bias", "gamma", "beta", "running_mean", "running_var"];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Encoding {
    Text,
    Binary,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightsMetadata {
    pub latent_size: usize,
    pub channels: usize,
    pub canvas: [usize; 2],
    pub crop: [usize; 2],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub segment_type: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub producer: Option<String>,
}

impl Default for WeightsMetadata {
    fn default() -> Self {
        WeightsMetadata {
            latent_size: LATENT_SIZE,
            channels: Tile::CHANNELS,
            canvas: [CANVAS, CANVAS],
            crop: [SEGMENT_ROWS, SEGMENT_COLS],
            segment_type: None,
            producer: None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "function", rename_all = "snake_case")]
pub enum Activation {
    Relu,
    LeakyRelu { slope: f32 },
    Tanh,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Layer {
    ConvTranspose {
        in_channels: usize,
        out_channels: usize,
        kernel: usize,
        stride: usize,
        padding: usize,
        weight: Vec<f32>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        bias: Option<Vec<f32>>,
    },
    BatchNorm {
        channels: usize,
        eps: f32,
        gamma: Vec<f32>,
        beta: Vec<f32>,
        running_mean: Vec<f32>,
        running_var: Vec<f32>,
    },
    Activation(Activation),
}

impl Layer {
    pub fn kind(&self) -> &'static str {
        match self {
            Layer::ConvTranspose { .. } => "conv_transpose",
            Layer::BatchNorm { .. } => "batch_norm",
            Layer::Activation(_) => "activation",
        }
    }
}

/// Transposed-convolution output size: `(in - 1) * stride - 2 * pad + kernel`.
pub fn conv_transpose_out(input: usize, kernel: usize, stride: usize, padding: usize) -> Option<usize> {
    ((input.checked_sub(1)? * stride + kernel).checked_sub(2 * padding)).filter(|&n| n > 0)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
struct Document {
    format: String,
    version: u32,
    encoding: Encoding,
    metadata: WeightsMetadata,
    layers: Vec<Layer>,
}

/// Validated generator parameters.
#[derive(Clone, Debug, PartialEq)]
pub struct GeneratorWeights {
    pub metadata: WeightsMetadata,
    pub layers: Vec<Layer>,
    /// Hex SHA-256 of the bytes the weights were loaded from, if any.
    pub checksum: Option<String>,
}

impl GeneratorWeights {
    pub fn new(metadata: WeightsMetadata, layers: Vec<Layer>) -> Result<Self> {
        let w = GeneratorWeights {
            metadata,
            layers,
            checksum: None,
        };
        w.validate()?;
        Ok(w)
    }

    /// Checks metadata compatibility and walks the layer shapes from the
    /// latent input to the 12x32x32 output volume.
    pub fn validate(&self) -> Result<()> {
        let m = &self.metadata;
        if m.latent_size != LATENT_SIZE {
            return Err(Error::Incompatible(format!(
                "latent size {} (expected {LATENT_SIZE})",
                m.latent_size
            )));
        }
        if m.channels != Tile::CHANNELS {
            return Err(Error::Incompatible(format!(
                "{} channels (expected {})",
                m.channels,
                Tile::CHANNELS
            )));
        }
        if m.canvas != [CANVAS, CANVAS] {
            return Err(Error::Incompatible(format!(
                "canvas {}x{} (expected {CANVAS}x{CANVAS})",
                m.canvas[0], m.canvas[1]
            )));
        }
        if m.crop != [SEGMENT_ROWS, SEGMENT_COLS] {
            return Err(Error::Incompatible(format!(
                "crop {}x{} (expected {SEGMENT_ROWS}x{SEGMENT_COLS})",
                m.crop[0], m.crop[1]
            )));
        }
        let shape = self.output_shape()?;
        if shape != (Tile::CHANNELS, CANVAS, CANVAS) {
            return Err(Error::Incompatible(format!(
                "network produces {}x{}x{}, expected {}x{CANVAS}x{CANVAS}",
                shape.0,
                shape.1,
                shape.2,
                Tile::CHANNELS
            )));
        }
        match self.layers.last() {
            Some(Layer::Activation(Activation::Tanh)) => Ok(()),
            _ => Err(Error::Incompatible(
                "final layer must be a tanh activation".into(),
            )),
        }
    }

    /// Shape after every layer, starting from `(latent, 1, 1)`.
    pub fn shape_walk(&self) -> Result<Vec<(usize, usize, usize)>> {
        let mut shape = (self.metadata.latent_size, 1, 1);
        let mut walk = vec![shape];
        for (i, layer) in self.layers.iter().enumerate() {
            let fail = |reason: String| Error::WeightValidation { layer: i, reason };
            match layer {
                Layer::ConvTranspose {
                    in_channels,
                    out_channels,
                    kernel,
                    stride,
                    padding,
                    weight,
                    bias,
                } => {
                    if *in_channels != shape.0 {
                        return Err(fail(format!(
                            "conv_transpose expects {in_channels} input channels, previous layer gives {}",
                            shape.0
                        )));
                    }
                    if *stride == 0 || *kernel == 0 {
                        return Err(fail("stride and kernel must be positive".into()));
                    }
                    let expected = in_channels * out_channels * kernel * kernel;
                    if weight.len() != expected {
                        return Err(fail(format!(
                            "conv_transpose weight has {} values, expected {expected}",
                            weight.len()
                        )));
                    }
                    if let Some(b) = bias {
                        if b.len() != *out_channels {
                            return Err(fail(format!(
                                "conv_transpose bias has {} values, expected {out_channels}",
                                b.len()
                            )));
                        }
                    }
                    let h = conv_transpose_out(shape.1, *kernel, *stride, *padding)
                        .ok_or_else(|| fail("non-positive output size".into()))?;
                    let w = conv_transpose_out(shape.2, *kernel, *stride, *padding)
                        .ok_or_else(|| fail("non-positive output size".into()))?;
                    shape = (*out_channels, h, w);
                }
                Layer::BatchNorm {
                    channels,
                    gamma,
                    beta,
                    running_mean,
                    running_var,
                    eps,
                } => {
                    if *channels != shape.0 {
                        return Err(fail(format!(
                            "batch_norm over {channels} channels, previous layer gives {}",
                            shape.0
                        )));
                    }
                    for (name, v) in [
                        ("gamma", gamma),
                        ("beta", beta),
                        ("running_mean", running_mean),
                        ("running_var", running_var),
                    ] {
                        if v.len() != *channels {
                            return Err(fail(format!(
                                "batch_norm {name} has {} values, expected {channels}",
                                v.len()
                            )));
                        }
                    }
                    if running_var.iter().any(|&v| v + eps <= 0.0) {
                        return Err(fail("batch_norm variance plus eps must be positive".into()));
                    }
                }
                Layer::Activation(_) => {}
            }
            walk.push(shape);
        }
        Ok(walk)
    }

    pub fn output_shape(&self) -> Result<(usize, usize, usize)> {
        Ok(*self.shape_walk()?.last().unwrap())
    }

    pub fn parameter_count(&self) -> usize {
        self.layers
            .iter()
            .map(|l| match l {
                Layer::ConvTranspose { weight, bias, .. } => weight.len() + bias.as_ref().map_or(0, Vec::len),
                Layer::BatchNorm { channels, .. } => 4 * channels,
                Layer::Activation(_) => 0,
            })
            .sum()
    }

    fn document(&self, encoding: Encoding) -> Document {
        Document {
            format: FORMAT_TAG.into(),
            version: FORMAT_VERSION,
            encoding,
            metadata: self.metadata.clone(),
            layers: self.layers.clone(),
        }
    }

    pub fn to_text(&self) -> String {
        serde_json::to_string(&self.document(Encoding::Text)).expect("weights serialize")
    }

    pub fn to_binary(&self) -> Vec<u8> {
        let mut doc = serde_json::to_value(self.document(Encoding::Binary)).expect("weights serialize");
        let mut blob: Vec<u8> = Vec::new();
        let mut offset = 0usize;
        if let Some(layers) = doc.get_mut("layers").and_then(Value::as_array_mut) {
            for layer in layers {
                let obj = layer.as_object_mut().expect("layer object");
                for key in PARAM_KEYS {
                    let Some(Value::Array(values)) = obj.get(key) else {
                        continue;
                    };
                    let len = values.len();
                    for v in values {
                        let f = v.as_f64().expect("numeric parameter") as f32;
                        blob.extend_from_slice(&f.to_le_bytes());
                    }
                    let mut r = Map::new();
                    r.insert("offset".into(), offset.into());
                    r.insert("len".into(), len.into());
                    obj.insert(key.into(), Value::Object(r));
                    offset += len;
                }
            }
        }
        let header = serde_json::to_vec(&doc).expect("header serialize");
        let mut out = Vec::with_capacity(BINARY_MAGIC.len() + 4 + header.len() + blob.len());
        out.extend_from_slice(BINARY_MAGIC);
        out.extend_from_slice(&(header.len() as u32).to_le_bytes());
        out.extend_from_slice(&header);
        out.extend_from_slice(&blob);
        out
    }

    /// Parses either encoding, detected by the binary magic.
    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let doc: Document = if bytes.starts_with(BINARY_MAGIC) {
            parse_binary(bytes)?
        } else {
            serde_json::from_slice(bytes).map_err(|e| Error::Format(format!("weight document: {e}")))?
        };
        if doc.format != FORMAT_TAG {
            return Err(Error::Incompatible(format!(
                "unknown format tag {:?}",
                doc.format
            )));
        }
        if doc.version != FORMAT_VERSION {
            return Err(Error::Incompatible(format!(
                "unsupported format version {}",
                doc.version
            )));
        }
        let mut w = GeneratorWeights::new(doc.metadata, doc.layers)?;
        w.checksum = Some(hex::encode(Sha256::digest(bytes)));
        Ok(w)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
        GeneratorWeights::from_bytes(&bytes).map_err(|e| match e {
            Error::Format(m) => Error::Format(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn save(&self, path: &Path, encoding: Encoding) -> Result<()> {
        let bytes = match encoding {
            Encoding::Text => self.to_text().into_bytes(),
            Encoding::Binary => self.to_binary(),
        };
        fs::write(path, bytes).map_err(|e| Error::io(path, e))
    }
}

fn parse_binary(bytes: &[u8]) -> Result<Document> {
    let fmt = |m: &str| Error::Format(format!("binary weights: {m}"));
    let rest = &bytes[BINARY_MAGIC.len()..];
    if rest.len() < 4 {
        return Err(fmt("truncated header length"));
    }
    let header_len = u32::from_le_bytes(rest[..4].try_into().unwrap()) as usize;
    let rest = &rest[4..];
    if rest.len() < header_len {
        return Err(fmt("truncated header"));
    }
    let (header, blob) = rest.split_at(header_len);
    if blob.len() % 4 != 0 {
        return Err(fmt("blob length is not a multiple of 4"));
    }
    let floats: Vec<f32> = blob
        .chunks_exact(4)
        .map(|c| f32::from_le_bytes(c.try_into().unwrap()))
        .collect();
    let mut doc: Value = serde_json::from_slice(header).map_err(|e| fmt(&format!("header: {e}")))?;
    let layers = doc
        .get_mut("layers")
        .and_then(Value::as_array_mut)
        .ok_or_else(|| fmt("header has no layers"))?;
    for (i, layer) in layers.iter_mut().enumerate() {
        let obj = layer
            .as_object_mut()
            .ok_or_else(|| fmt("layer is not an object"))?;
        for key in PARAM_KEYS {
            let Some(Value::Object(r)) = obj.get(key) else {
                continue;
            };
            let offset = r.get("offset").and_then(Value::as_u64);
            let len = r.get("len").and_then(Value::as_u64);
            let (Some(offset), Some(len)) = (offset, len) else {
                return Err(Error::WeightValidation {
                    layer: i,
                    reason: format!("{key}: malformed blob reference"),
                });
            };
            let (offset, len) = (offset as usize, len as usize);
            if offset + len > floats.len() {
                return Err(Error::WeightValidation {
                    layer: i,
                    reason: format!(
                        "{key}: blob range {offset}..{} exceeds {} stored values",
                        offset + len,
                        floats.len()
                    ),
                });
            }
            let values = floats[offset..offset + len]
                .iter()
                .map(|&f| Value::from(f as f64))
                .collect();
            obj.insert(key.into(), Value::Array(values));
        }
    }
    serde_json::from_value(doc).map_err(|e| fmt(&format!("header: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generator::network::reference_weights;

    #[test]
    fn output_size_formula() {
        assert_eq!(conv_transpose_out(1, 4, 1, 0), Some(4));
        assert_eq!(conv_transpose_out(4, 4, 2, 1), Some(8));
        assert_eq!(conv_transpose_out(8, 4, 2, 1), Some(16));
        assert_eq!(conv_transpose_out(16, 4, 2, 1), Some(32));
        assert_eq!(conv_transpose_out(1, 1, 1, 1), None);
    }

    #[test]
    fn reference_architecture_shape_walk() {
        let w = reference_weights(7);
        let convs: Vec<_> = w
            .shape_walk()
            .unwrap()
            .into_iter()
            .zip(std::iter::once(None).chain(w.layers.iter().map(Some)))
            .filter(|(_, l)| l.is_none() || matches!(l, Some(Layer::ConvTranspose { .. })))
            .map(|(s, _)| s)
            .collect();
        assert_eq!(
            convs,
            vec![(5, 1, 1), (256, 4, 4), (128, 8, 8), (64, 16, 16), (12, 32, 32)]
        );
    }

    #[test]
    fn both_encodings_round_trip() {
        let w = reference_weights(3);
        let text = GeneratorWeights::from_bytes(w.to_text().as_bytes()).unwrap();
        let bin = GeneratorWeights::from_bytes(&w.to_binary()).unwrap();
        assert_eq!(text.layers, w.layers);
        assert_eq!(bin.layers, w.layers);
        assert_ne!(text.checksum, bin.checksum);
        assert_eq!(bin.checksum.as_ref().unwrap().len(), 64);
    }

    #[test]
    fn truncated_parameters_name_the_layer() {
        let mut w = reference_weights(1);
        if let Layer::ConvTranspose { weight, .. } = &mut w.layers[3] {
            weight.truncate(weight.len() - 5);
        } else {
            panic!("layer 3 should be a convolution");
        }
        let doc = w.document(Encoding::Text);
        let bytes = serde_json::to_vec(&doc).unwrap();
        match GeneratorWeights::from_bytes(&bytes) {
            Err(Error::WeightValidation { layer, reason }) => {
                assert_eq!(layer, 3);
                assert!(reason.contains("weight"), "{reason}");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn truncated_blob_is_rejected() {
        let w = reference_weights(1);
        let mut bytes = w.to_binary();
        bytes.truncate(bytes.len() - 400);
        assert!(matches!(
            GeneratorWeights::from_bytes(&bytes),
            Err(Error::WeightValidation { .. })
        ));
    }

    #[test]
    fn wrong_canvas_is_incompatible() {
        let mut w = reference_weights(1);
        w.metadata.canvas = [16, 16];
        assert!(matches!(w.validate(), Err(Error::Incompatible(_))));
        let mut w = reference_weights(1);
        w.metadata.latent_size = 6;
        assert!(matches!(w.validate(), Err(Error::Incompatible(_))));
    }

    #[test]
    fn wrong_format_tag_is_incompatible() {
        let w = reference_weights(1);
        let text = w.to_text().replace(FORMAT_TAG, "something-else");
        assert!(matches!(
            GeneratorWeights::from_bytes(text.as_bytes()),
            Err(Error::Incompatible(_))
        ));
    }
}
