//! Latent vector to segment generators and OneGAN/MultiGAN suites.

pub mod network;
pub mod stubs;
pub mod weights;

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::sync::Arc;

use crate::corpus::SuiteMode;
use crate::error::{Error, Result};
use crate::segment::{Segment, SegmentType, SEGMENT_COLS, SEGMENT_ROWS};
use crate::tile::Tile;

pub use network::{forward, Volume};
pub use weights::{Encoding, GeneratorWeights, LATENT_SIZE};

/// Generator input: five reals in `[-1, 1]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LatentVector([f64; LATENT_SIZE]);

impl LatentVector {
    pub fn new(values: &[f64]) -> Result<Self> {
        let arr: [f64; LATENT_SIZE] = values.try_into().map_err(|_| {
            Error::Contract(format!(
                "latent vector needs {LATENT_SIZE} values, got {}",
                values.len()
            ))
        })?;
        if let Some(v) = arr.iter().find(|v| !(-1.0..=1.0).contains(*v)) {
            return Err(Error::Contract(format!("latent value {v} outside [-1, 1]")));
        }
        Ok(LatentVector(arr))
    }

    pub fn zeros() -> Self {
        LatentVector([0.0; LATENT_SIZE])
    }

    pub fn values(&self) -> &[f64; LATENT_SIZE] {
        &self.0
    }

    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> usize {
        LATENT_SIZE
    }
}

/// Anything that maps a latent vector to a segment.
pub trait SegmentGenerator: Send + Sync {
    fn generate(&self, z: &LatentVector) -> Segment;

    /// Short description for logs and manifests.
    fn describe(&self) -> String;
}

/// Crops the top-left 14x16 window and takes the per-tile argmax over the
/// twelve channels (ties go to the lower code). Cannon becomes solid; orb and
/// player become air.
pub fn decode_segment(volume: &Volume) -> Result<Segment> {
    if volume.channels != Tile::CHANNELS || volume.height < SEGMENT_ROWS || volume.width < SEGMENT_COLS {
        return Err(Error::Contract(format!(
            "volume {:?} cannot be decoded",
            volume.shape()
        )));
    }
    let mut seg = Segment::filled(Tile::AIR);
    for r in 0..SEGMENT_ROWS {
        for c in 0..SEGMENT_COLS {
            let mut best = 0usize;
            let mut best_v = volume.at(0, r, c);
            for ch in 1..Tile::CHANNELS {
                let v = volume.at(ch, r, c);
                if v > best_v {
                    best = ch;
                    best_v = v;
                }
            }
            let tile = match Tile::new(best as u8).expect("channel index is a tile code") {
                Tile::CANNON => Tile::SOLID,
                Tile::ORB | Tile::PLAYER => Tile::AIR,
                t => t,
            };
            seg.set(r, c, tile);
        }
    }
    Ok(seg)
}

/// Generator backed by trained network weights.
pub struct NeuralGenerator {
    weights: GeneratorWeights,
}

impl NeuralGenerator {
    pub fn new(weights: GeneratorWeights) -> Self {
        NeuralGenerator { weights }
    }

    pub fn load(path: &Path) -> Result<Self> {
        Ok(NeuralGenerator::new(GeneratorWeights::load(path)?))
    }

    pub fn weights(&self) -> &GeneratorWeights {
        &self.weights
    }
}

impl SegmentGenerator for NeuralGenerator {
    fn generate(&self, z: &LatentVector) -> Segment {
        decode_segment(&forward(&self.weights, z)).expect("validated weights give a 12x32x32 volume")
    }

    fn describe(&self) -> String {
        format!(
            "neural(sha256={})",
            self.weights.checksum.as_deref().unwrap_or("in-memory")
        )
    }
}

/// Test double: picks a library entry from the first latent value.
#[derive(Clone, Debug)]
pub struct StubGenerator {
    name: String,
    library: Vec<Segment>,
}

impl StubGenerator {
    pub fn new(name: impl Into<String>, library: Vec<Segment>) -> Result<Self> {
        if library.is_empty() {
            return Err(Error::Config("stub generator needs a nonempty library".into()));
        }
        Ok(StubGenerator {
            name: name.into(),
            library,
        })
    }

    /// `floor((z0 + 1) / 2 * n)`, clamped to `n - 1`.
    pub fn index(&self, z: &LatentVector) -> usize {
        let n = self.library.len();
        let idx = ((z.values()[0] + 1.0) / 2.0 * n as f64).floor();
        (idx.max(0.0) as usize).min(n - 1)
    }

    pub fn library(&self) -> &[Segment] {
        &self.library
    }
}

impl SegmentGenerator for StubGenerator {
    fn generate(&self, z: &LatentVector) -> Segment {
        self.library[self.index(z)].clone()
    }

    fn describe(&self) -> String {
        format!("stub({}, {} segments)", self.name, self.library.len())
    }
}

/// One generator for every type, or one per segment type.
#[derive(Clone)]
pub enum GeneratorSuite {
    One(Arc<dyn SegmentGenerator>),
    Multi(BTreeMap<SegmentType, Arc<dyn SegmentGenerator>>),
}

impl GeneratorSuite {
    pub fn one(generator: Arc<dyn SegmentGenerator>) -> Self {
        GeneratorSuite::One(generator)
    }

    /// Requires all seven segment types.
    pub fn multi(generators: BTreeMap<SegmentType, Arc<dyn SegmentGenerator>>) -> Result<Self> {
        if let Some(missing) = SegmentType::ALL.iter().find(|t| !generators.contains_key(t)) {
            return Err(Error::Config(format!(
                "MultiGAN suite has no generator for {missing}"
            )));
        }
        Ok(GeneratorSuite::Multi(generators))
    }

    pub fn mode(&self) -> SuiteMode {
        match self {
            GeneratorSuite::One(_) => SuiteMode::OneGan,
            GeneratorSuite::Multi(_) => SuiteMode::MultiGan,
        }
    }

    pub fn generator(&self, segment_type: SegmentType) -> &dyn SegmentGenerator {
        match self {
            GeneratorSuite::One(g) => g.as_ref(),
            GeneratorSuite::Multi(map) => map[&segment_type].as_ref(),
        }
    }

    pub fn generate(&self, segment_type: SegmentType, z: &LatentVector) -> Segment {
        self.generator(segment_type).generate(z)
    }

    /// Bundled hand-authored libraries; see [`stubs`].
    pub fn stub(mode: SuiteMode) -> Self {
        match mode {
            SuiteMode::OneGan => GeneratorSuite::One(Arc::new(
                StubGenerator::new("union", stubs::union_library()).expect("nonempty"),
            )),
            SuiteMode::MultiGan => {
                let map = SegmentType::ALL
                    .into_iter()
                    .map(|t| {
                        let g: Arc<dyn SegmentGenerator> =
                            Arc::new(StubGenerator::new(t.key(), stubs::library(t)).expect("nonempty"));
                        (t, g)
                    })
                    .collect();
                GeneratorSuite::Multi(map)
            }
        }
    }

    pub fn describe(&self) -> String {
        match self {
            GeneratorSuite::One(g) => format!("onegan[{}]", g.describe()),
            GeneratorSuite::Multi(map) => {
                let parts: Vec<String> = map
                    .iter()
                    .map(|(t, g)| format!("{}={}", t.key(), g.describe()))
                    .collect();
                format!("multigan[{}]", parts.join(", "))
            }
        }
    }
}

impl fmt::Debug for GeneratorSuite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.describe())
    }
}
