//! WebAssembly bindings for the browser demo: draw a random stub level with
//! its A* path, evolve levels a few generations at a time, and report novelty.

use levelgan::analysis::{level_novelty, Removal};
use levelgan::assembly::GENOME_LEN;
use levelgan::corpus::SuiteMode;
use levelgan::render::{render, Overlay};
use levelgan::simulator::{connectivity, solve};
use levelgan::{build_level, Evolution, EvolutionConfig, GeneratorSuite, Genome, Level, MovementModel};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wasm_bindgen::prelude::*;

fn suite(multigan: bool) -> GeneratorSuite {
    GeneratorSuite::stub(if multigan {
        SuiteMode::MultiGan
    } else {
        SuiteMode::OneGan
    })
}

/// A rendered level with its playability and novelty scores.
#[wasm_bindgen]
pub struct LevelView {
    width: usize,
    height: usize,
    pixels: Vec<u8>,
    path_length: i32,
    connectivity: f64,
    novelty: f64,
    segments: usize,
}

#[wasm_bindgen]
impl LevelView {
    #[wasm_bindgen(getter)]
    pub fn width(&self) -> usize {
        self.width
    }

    #[wasm_bindgen(getter)]
    pub fn height(&self) -> usize {
        self.height
    }

    /// RGBA bytes, row-major.
    pub fn pixels(&self) -> Vec<u8> {
        self.pixels.clone()
    }

    /// A* path length to the orb, or -1 when unreachable.
    #[wasm_bindgen(getter)]
    pub fn path_length(&self) -> i32 {
        self.path_length
    }

    #[wasm_bindgen(getter)]
    pub fn connectivity(&self) -> f64 {
        self.connectivity
    }

    /// Level novelty of the placed screens; NaN for a one-screen level.
    #[wasm_bindgen(getter)]
    pub fn novelty(&self) -> f64 {
        self.novelty
    }

    #[wasm_bindgen(getter)]
    pub fn segments(&self) -> usize {
        self.segments
    }
}

fn view(level: &Level, model: &MovementModel, scale: usize) -> LevelView {
    let sol = solve(model, level);
    let raster = render(
        &level.grid,
        scale,
        &Overlay {
            path: &sol.path,
            spawn: level.spawn,
        },
    );
    let segments = level.segments();
    LevelView {
        width: raster.width,
        height: raster.height,
        pixels: raster.pixels,
        path_length: sol.length,
        connectivity: connectivity(model, level),
        novelty: level_novelty(&segments, Removal::Positional).unwrap_or(f64::NAN),
        segments: segments.len(),
    }
}

/// Builds the level of a uniformly random genome.
#[wasm_bindgen]
pub fn random_level(seed: u32, multigan: bool, scale: usize) -> LevelView {
    let mut rng = ChaCha8Rng::seed_from_u64(seed as u64);
    let genes = (0..GENOME_LEN).map(|_| rng.random_range(-1.0..=1.0)).collect();
    let genome = Genome::new(genes).expect("sampled genes are in range");
    view(
        &build_level(&genome, &suite(multigan)),
        &MovementModel::default(),
        scale,
    )
}

/// An NSGA-II run advanced from the page.
#[wasm_bindgen]
pub struct Evolver {
    evo: Evolution,
}

#[wasm_bindgen]
impl Evolver {
    #[wasm_bindgen(constructor)]
    pub fn new(seed: u32, mu: usize, lambda: usize, multigan: bool) -> Result<Evolver, JsError> {
        let config = EvolutionConfig {
            mu,
            lambda,
            generations: usize::MAX,
            seed: seed as u64,
            ..Default::default()
        };
        Evolution::new(config, suite(multigan))
            .map(|evo| Evolver { evo })
            .map_err(|e| JsError::new(&e.to_string()))
    }

    /// Runs `generations` more generations; returns the champion path length.
    pub fn step(&mut self, generations: usize) -> i32 {
        for _ in 0..generations {
            self.evo.step();
        }
        self.best_path()
    }

    #[wasm_bindgen(getter)]
    pub fn generation(&self) -> usize {
        self.evo.generation()
    }

    #[wasm_bindgen(getter)]
    pub fn best_path(&self) -> i32 {
        self.evo.history().last().map_or(-1, |s| s.max_path)
    }

    /// Champion path length per generation, starting at generation 0.
    pub fn history(&self) -> Vec<i32> {
        self.evo.history().iter().map(|s| s.max_path).collect()
    }

    pub fn champion(&self, scale: usize) -> LevelView {
        view(&self.evo.champion_level(), self.evo.model(), scale)
    }
}
