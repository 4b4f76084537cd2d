//! Mega Man level generation from GAN-produced segments.
//!
//! Levels are assembled from 14x16 segments chosen by a 90-gene genome,
//! scored with a tile-level movement simulator, and evolved with NSGA-II.

pub mod analysis;
pub mod assembly;
pub mod corpus;
pub mod error;
pub mod evolve;
pub mod generator;
pub mod render;
pub mod segment;
pub mod simulator;
pub mod tile;

pub use analysis::{NoveltyReport, Removal};
pub use assembly::{build_level, Genome, Level};
pub use error::{Error, Result};
pub use evolve::{Evolution, EvolutionConfig, RunManifest};
pub use generator::{GeneratorSuite, LatentVector, SegmentGenerator};
pub use segment::{Direction, Segment, SegmentType};
pub use simulator::{connectivity, solve, MovementModel, Solution};
pub use tile::{CharMap, Tile, TileGrid};
