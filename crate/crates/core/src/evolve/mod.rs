//! NSGA-II over level genomes, maximising solution path length and
//! connectivity.
//!
//! Variation and selection draw from one seeded ChaCha stream in a fixed
//! order. Fitness evaluation is pure, so it may run on a thread pool without
//! affecting results.

pub mod nsga;
pub mod variation;

use std::panic::{catch_unwind, AssertUnwindSafe};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::assembly::{build_level, Genome, Level, GENOME_LEN};
use crate::error::{Error, Result};
use crate::generator::GeneratorSuite;
use crate::simulator::{evaluate, FitnessVector, MovementModel, DEFAULT_JUMP_BUDGET};

pub use nsga::{crowded_cmp, crowding_distance, dominates, non_dominated_sort};
pub use variation::{make_offspring, polynomial_mutation, OffspringTrace, VariationRates};

pub const MANIFEST_FORMAT_TAG: &str = "levelgan-run";
pub const MANIFEST_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvolutionConfig {
    pub mu: usize,
    pub lambda: usize,
    pub generations: usize,
    pub crossover_rate: f64,
    pub mutation_rate: f64,
    pub eta: f64,
    pub seed: u64,
    pub jump_budget: u8,
}

impl Default for EvolutionConfig {
    fn default() -> Self {
        EvolutionConfig {
            mu: 100,
            lambda: 100,
            generations: 300,
            crossover_rate: 0.5,
            mutation_rate: 0.3,
            eta: 20.0,
            seed: 0,
            jump_budget: DEFAULT_JUMP_BUDGET,
        }
    }
}

impl EvolutionConfig {
    /// `mu >= 4` keeps every objective extreme of the front among the
    /// survivors, which makes the best path length non-decreasing.
    pub fn validate(&self) -> Result<()> {
        let fail = |m: String| Err(Error::Config(m));
        if self.mu < 4 {
            return fail(format!("mu must be at least 4, got {}", self.mu));
        }
        if self.lambda < 2 {
            return fail(format!("lambda must be at least 2, got {}", self.lambda));
        }
        for (name, v) in [
            ("crossover_rate", self.crossover_rate),
            ("mutation_rate", self.mutation_rate),
        ] {
            if !(0.0..=1.0).contains(&v) {
                return fail(format!("{name} must lie in [0, 1], got {v}"));
            }
        }
        if !(self.eta.is_finite() && self.eta >= 0.0) {
            return fail(format!("eta must be a non-negative number, got {}", self.eta));
        }
        Ok(())
    }

    pub fn rates(&self) -> VariationRates {
        VariationRates {
            crossover: self.crossover_rate,
            mutation: self.mutation_rate,
            eta: self.eta,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Individual {
    pub genome: Genome,
    pub fitness: FitnessVector,
    pub rank: usize,
    pub crowding: f64,
}

/// Best path length and best connectivity in a population.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChampionStats {
    pub generation: usize,
    pub max_path: i32,
    pub max_connectivity: f64,
}

/// Running totals of variation events, for incidence checks.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct VariationCounts {
    pub matings: u64,
    pub crossovers: u64,
    pub genes: u64,
    pub mutated_genes: u64,
}

/// Picks `mu` survivors: whole layers in rank order, then the least crowded
/// members of the first layer that does not fit. Crowding ties are broken by
/// a shuffle drawn from `rng`. Returns `(index, rank, crowding)`.
pub fn select_survivors<O: AsRef<[f64]>, R: Rng + ?Sized>(
    objectives: &[O],
    mu: usize,
    rng: &mut R,
) -> Vec<(usize, usize, f64)> {
    let mut out = Vec::with_capacity(mu);
    for (rank, layer) in non_dominated_sort(objectives).into_iter().enumerate() {
        if out.len() >= mu {
            break;
        }
        let crowd = crowding_distance(objectives, &layer);
        let mut members: Vec<(usize, usize, f64)> =
            layer.iter().zip(crowd).map(|(&i, d)| (i, rank, d)).collect();
        if out.len() + members.len() > mu {
            members.shuffle(rng);
            members.sort_by(|a, b| b.2.partial_cmp(&a.2).unwrap_or(std::cmp::Ordering::Equal));
            members.truncate(mu - out.len());
        }
        out.extend(members);
    }
    out
}

/// Binary tournament on `(rank, crowding)`; the first draw wins ties.
pub fn tournament<R: Rng + ?Sized>(keys: &[(usize, f64)], rng: &mut R) -> usize {
    let a = rng.random_range(0..keys.len());
    let b = rng.random_range(0..keys.len());
    if crowded_cmp(keys[b], keys[a]).is_lt() {
        b
    } else {
        a
    }
}

/// A seeded NSGA-II run that can be advanced one generation at a time.
pub struct Evolution {
    config: EvolutionConfig,
    suite: GeneratorSuite,
    model: MovementModel,
    rng: ChaCha8Rng,
    population: Vec<Individual>,
    generation: usize,
    history: Vec<ChampionStats>,
    counts: VariationCounts,
    #[cfg(feature = "parallel")]
    serial: bool,
    #[cfg(feature = "parallel")]
    pool: Option<rayon::ThreadPool>,
}

impl Evolution {
    /// Validates the config, samples and evaluates the initial population.
    pub fn new(config: EvolutionConfig, suite: GeneratorSuite) -> Result<Self> {
        Self::with_jobs(config, suite, None)
    }

    /// As [`Evolution::new`], evaluating on `jobs` threads. `None` uses the
    /// global pool; `Some(1)` stays on the calling thread. Without the
    /// `parallel` feature evaluation is always serial.
    pub fn with_jobs(config: EvolutionConfig, suite: GeneratorSuite, jobs: Option<usize>) -> Result<Self> {
        config.validate()?;
        #[cfg(not(feature = "parallel"))]
        let _ = jobs;
        #[cfg(feature = "parallel")]
        let pool = match jobs {
            Some(n) if n > 1 => Some(
                rayon::ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build()
                    .map_err(|e| Error::Config(format!("cannot start {n} worker threads: {e}")))?,
            ),
            _ => None,
        };
        let mut evo = Evolution {
            model: MovementModel::new(config.jump_budget),
            rng: ChaCha8Rng::seed_from_u64(config.seed),
            config,
            suite,
            population: Vec::new(),
            generation: 0,
            history: Vec::new(),
            counts: VariationCounts::default(),
            #[cfg(feature = "parallel")]
            serial: jobs == Some(1),
            #[cfg(feature = "parallel")]
            pool,
        };
        let genomes: Vec<Genome> = (0..evo.config.mu)
            .map(|_| {
                let genes = (0..GENOME_LEN)
                    .map(|_| evo.rng.random_range(-1.0..=1.0))
                    .collect();
                Genome::new(genes).expect("sampled genes are in range")
            })
            .collect();
        let fitness = evo.evaluate_all(&genomes);
        let objectives: Vec<[f64; 2]> = fitness.iter().map(FitnessVector::objectives).collect();
        let layers = non_dominated_sort(&objectives);
        let mut keys = vec![(0usize, 0.0f64); genomes.len()];
        for (rank, layer) in layers.iter().enumerate() {
            for (&i, d) in layer.iter().zip(crowding_distance(&objectives, layer)) {
                keys[i] = (rank, d);
            }
        }
        evo.population = genomes
            .into_iter()
            .zip(fitness)
            .zip(keys)
            .map(|((genome, fitness), (rank, crowding))| Individual {
                genome,
                fitness,
                rank,
                crowding,
            })
            .collect();
        evo.record();
        Ok(evo)
    }

    fn evaluate_all(&self, genomes: &[Genome]) -> Vec<FitnessVector> {
        let eval = |g: &Genome| evaluate_genome(&self.model, &self.suite, g);
        #[cfg(feature = "parallel")]
        {
            use rayon::prelude::*;
            if !self.serial {
                let run = || genomes.par_iter().map(eval).collect();
                return match &self.pool {
                    Some(pool) => pool.install(run),
                    None => run(),
                };
            }
        }
        genomes.iter().map(eval).collect()
    }

    fn record(&mut self) {
        self.history.push(ChampionStats {
            generation: self.generation,
            max_path: self
                .population
                .iter()
                .map(|i| i.fitness.path_length)
                .max()
                .unwrap_or(-1),
            max_connectivity: self
                .population
                .iter()
                .map(|i| i.fitness.connectivity)
                .fold(0.0, f64::max),
        });
    }

    pub fn is_finished(&self) -> bool {
        self.generation >= self.config.generations
    }

    /// Runs one generation and returns its champion stats.
    pub fn step(&mut self) -> ChampionStats {
        let keys: Vec<(usize, f64)> = self.population.iter().map(|i| (i.rank, i.crowding)).collect();
        let rates = self.config.rates();
        let mut offspring = Vec::with_capacity(self.config.lambda + 1);
        while offspring.len() < self.config.lambda {
            let a = tournament(&keys, &mut self.rng);
            let b = tournament(&keys, &mut self.rng);
            let (c1, c2, trace) = make_offspring(
                (&self.population[a].genome, &self.population[b].genome),
                rates,
                &mut self.rng,
            );
            self.counts.matings += 1;
            self.counts.crossovers += trace.cut.is_some() as u64;
            self.counts.genes += 2 * GENOME_LEN as u64;
            self.counts.mutated_genes += trace.mutated_genes as u64;
            offspring.push(c1);
            offspring.push(c2);
        }
        offspring.truncate(self.config.lambda);

        let fitness = self.evaluate_all(&offspring);
        let mut combined: Vec<(Genome, FitnessVector)> = self
            .population
            .drain(..)
            .map(|i| (i.genome, i.fitness))
            .chain(offspring.into_iter().zip(fitness))
            .collect();
        let objectives: Vec<[f64; 2]> = combined.iter().map(|(_, f)| f.objectives()).collect();
        let chosen = select_survivors(&objectives, self.config.mu, &mut self.rng);
        let mut slots: Vec<Option<(Genome, FitnessVector)>> = combined.drain(..).map(Some).collect();
        self.population = chosen
            .into_iter()
            .map(|(i, rank, crowding)| {
                let (genome, fitness) = slots[i].take().expect("survivor indices are distinct");
                Individual {
                    genome,
                    fitness,
                    rank,
                    crowding,
                }
            })
            .collect();
        self.generation += 1;
        self.record();
        *self.history.last().unwrap()
    }

    /// Steps until the configured generation count is reached.
    pub fn run(&mut self) {
        while !self.is_finished() {
            let stats = self.step();
            log::debug!(
                "generation {}: max path {}, max connectivity {:.4}",
                stats.generation,
                stats.max_path,
                stats.max_connectivity
            );
        }
    }

    pub fn config(&self) -> &EvolutionConfig {
        &self.config
    }

    pub fn suite(&self) -> &GeneratorSuite {
        &self.suite
    }

    pub fn model(&self) -> &MovementModel {
        &self.model
    }

    pub fn generation(&self) -> usize {
        self.generation
    }

    pub fn population(&self) -> &[Individual] {
        &self.population
    }

    pub fn history(&self) -> &[ChampionStats] {
        &self.history
    }

    pub fn variation_counts(&self) -> VariationCounts {
        self.counts
    }

    /// The member with the longest path, then highest connectivity, then
    /// earliest position.
    pub fn champion(&self) -> &Individual {
        let mut best = &self.population[0];
        for ind in &self.population[1..] {
            let (a, b) = (ind.fitness, best.fitness);
            if (a.path_length, a.connectivity) > (b.path_length, b.connectivity) {
                best = ind;
            }
        }
        best
    }

    pub fn champion_level(&self) -> Level {
        build_level(&self.champion().genome, &self.suite)
    }

    pub fn manifest(&self) -> RunManifest {
        RunManifest {
            format: MANIFEST_FORMAT_TAG.to_string(),
            version: MANIFEST_VERSION,
            seed: self.config.seed,
            config: self.config.clone(),
            suite: self.suite.describe(),
            champions: self.history.clone(),
            champion: ArchivedIndividual::from(self.champion()),
            final_population: self.population.iter().map(ArchivedIndividual::from).collect(),
        }
    }
}

/// Evaluates one genome. A panic inside generation or simulation is logged
/// and scored as a failed individual.
pub fn evaluate_genome(model: &MovementModel, suite: &GeneratorSuite, genome: &Genome) -> FitnessVector {
    match catch_unwind(AssertUnwindSafe(|| evaluate(model, &build_level(genome, suite)))) {
        Ok(f) => f,
        Err(_) => {
            log::warn!("evaluation failed; scoring individual as (-1, 0)");
            FitnessVector::FAILED
        }
    }
}

/// Convenience wrapper: a full run from a fresh population.
pub fn run_evolution(config: EvolutionConfig, suite: GeneratorSuite) -> Result<Evolution> {
    let mut evo = Evolution::new(config, suite)?;
    evo.run();
    Ok(evo)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ArchivedIndividual {
    pub genome: Genome,
    pub path_length: i32,
    pub connectivity: f64,
    pub rank: usize,
    /// `None` for boundary members with infinite crowding distance.
    pub crowding: Option<f64>,
}

impl From<&Individual> for ArchivedIndividual {
    fn from(i: &Individual) -> Self {
        ArchivedIndividual {
            genome: i.genome.clone(),
            path_length: i.fitness.path_length,
            connectivity: i.fitness.connectivity,
            rank: i.rank,
            crowding: i.crowding.is_finite().then_some(i.crowding),
        }
    }
}

/// Deterministic record of one run. Timing lives outside it so that equal
/// inputs give byte-identical manifests.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub format: String,
    pub version: u32,
    pub seed: u64,
    pub config: EvolutionConfig,
    pub suite: String,
    pub champions: Vec<ChampionStats>,
    pub champion: ArchivedIndividual,
    pub final_population: Vec<ArchivedIndividual>,
}

impl RunManifest {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("manifest serialises") + "\n"
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let m: RunManifest =
            serde_json::from_str(text).map_err(|e| Error::Format(format!("run manifest: {e}")))?;
        if m.format != MANIFEST_FORMAT_TAG || m.version != MANIFEST_VERSION {
            return Err(Error::Format(format!(
                "not a {MANIFEST_FORMAT_TAG} v{MANIFEST_VERSION} manifest"
            )));
        }
        Ok(m)
    }
}
