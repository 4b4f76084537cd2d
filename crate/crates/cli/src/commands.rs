//! Subcommand arguments and implementations. Each command returns a value
//! describing what it did; printing is left to the caller.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::Args;
use levelgan::analysis::{NoveltyReport, Removal};
use levelgan::assembly::LevelDocument;
use levelgan::corpus::{
    export_training_sets, extract_segments, load_corpus, partition_non_overlapping, SampleCounts, SuiteMode,
};
use levelgan::evolve::{ChampionStats, Evolution, RunManifest};
use levelgan::render::{render, Overlay, Raster};
use levelgan::simulator::{connectivity, solve, MovementModel};
use levelgan::{build_level, CharMap, Error, Genome, Level, Result, Segment, SegmentType, TileGrid};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::config::ExperimentConfig;
use crate::stats::{mann_whitney, MannWhitney};

pub const CORPUS_ENV: &str = "LEVELGAN_CORPUS";

fn write_file(path: &Path, contents: impl AsRef<[u8]>) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    fs::write(path, contents).map_err(|e| Error::io(path, e))
}

fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("serialisable") + "\n"
}

pub fn write_png(path: &Path, raster: &Raster) -> Result<()> {
    let img = image::RgbaImage::from_raw(raster.width as u32, raster.height as u32, raster.pixels.clone())
        .expect("raster buffer matches its dimensions");
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    img.save_with_format(path, image::ImageFormat::Png)
        .map_err(|e| Error::Format(format!("{}: {e}", path.display())))
}

/// Writes a level as a document (`.json`), character grid (`.txt`) or image
/// (`.png`), chosen by extension. A character grid gets a `.path`
/// annotation next to it, so generated levels can be read back as a corpus.
pub fn export_level(level: &Level, path: &Path, scale: usize) -> Result<()> {
    match path.extension().and_then(|e| e.to_str()) {
        Some("json") => write_file(path, to_json(&level.to_document())),
        Some("txt") => {
            write_file(path, level.to_text(&CharMap::mega_man()))?;
            write_file(&path.with_extension("path"), level.path_annotation().to_text())
        }
        Some("png") => {
            let overlay = Overlay {
                path: &[],
                spawn: level.spawn,
            };
            write_png(path, &render(&level.grid, scale, &overlay))
        }
        _ => Err(Error::Config(format!(
            "{}: output extension must be .json, .txt or .png",
            path.display()
        ))),
    }
}

pub fn load_level(path: &Path) -> Result<Level> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let doc: LevelDocument = serde_json::from_str(&text).map_err(|e| Error::Json {
        path: path.into(),
        source: e,
    })?;
    Level::from_document(doc)
}

fn corpus_dir(arg: Option<PathBuf>) -> Result<PathBuf> {
    arg.ok_or_else(|| {
        Error::Config(format!(
            "no corpus directory given (use --corpus or set {CORPUS_ENV})"
        ))
    })
}

/// Non-overlapping screens of every corpus level, by level name.
pub fn corpus_partitions(dir: &Path) -> Result<Vec<(String, Vec<Segment>)>> {
    load_corpus(dir, &CharMap::mega_man())?
        .iter()
        .map(|level| Ok((level.name.clone(), partition_non_overlapping(level)?)))
        .collect()
}

// ---------------------------------------------------------------- extract

#[derive(Args, Debug, Clone)]
pub struct ExtractArgs {
    /// Directory of `<name>.txt` levels with `<name>.path` annotations.
    #[arg(long, env = CORPUS_ENV)]
    pub corpus: Option<PathBuf>,
    /// Output directory for dataset files.
    #[arg(long)]
    pub out: PathBuf,
    /// onegan: one dataset of all directional samples; multigan: one per type.
    #[arg(long, default_value = "multigan")]
    pub mode: SuiteMode,
    /// Write the non-overlapping screen partition instead of sliding windows.
    #[arg(long)]
    pub nonoverlap: bool,
}

#[derive(Debug, Serialize)]
pub struct ExtractSummary {
    pub levels: usize,
    pub counts: Option<SampleCounts>,
    pub nonoverlap_segments: Option<usize>,
    pub files: Vec<PathBuf>,
}

impl ExtractSummary {
    pub fn render(&self) -> String {
        let mut s = format!("levels: {}\n", self.levels);
        if let Some(c) = &self.counts {
            for t in SegmentType::ALL {
                let _ = writeln!(s, "{:<12} {}", t.label(), c.get(t));
            }
            let _ = writeln!(s, "{:<12} {}", "Total", c.total);
        }
        if let Some(n) = self.nonoverlap_segments {
            let _ = writeln!(s, "non-overlapping segments: {n}");
        }
        for f in &self.files {
            let _ = writeln!(s, "wrote {}", f.display());
        }
        s
    }
}

pub fn extract(args: ExtractArgs) -> Result<ExtractSummary> {
    let dir = corpus_dir(args.corpus)?;
    if args.nonoverlap {
        let parts = corpus_partitions(&dir)?;
        let total = parts.iter().map(|(_, s)| s.len()).sum();
        let path = args.out.join("nonoverlap.json");
        let by_level: std::collections::BTreeMap<&str, &Vec<Segment>> =
            parts.iter().map(|(n, s)| (n.as_str(), s)).collect();
        write_file(&path, serde_json::to_string(&by_level).expect("serialisable"))?;
        return Ok(ExtractSummary {
            levels: parts.len(),
            counts: None,
            nonoverlap_segments: Some(total),
            files: vec![path],
        });
    }
    let levels = load_corpus(&dir, &CharMap::mega_man())?;
    let mut samples = Vec::new();
    for level in &levels {
        samples.extend(extract_segments(level)?);
    }
    let files = export_training_sets(&samples, args.mode, &args.out)?;
    Ok(ExtractSummary {
        levels: levels.len(),
        counts: Some(SampleCounts::of(&samples)),
        nonoverlap_segments: None,
        files,
    })
}

// ---------------------------------------------------------------- suites

#[derive(Args, Debug, Clone)]
pub struct SuiteArgs {
    /// Experiment config (TOML). Without it the bundled stub generators are used.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Stub suite to use when no config is given.
    #[arg(long, default_value = "multigan")]
    pub mode: SuiteMode,
}

impl SuiteArgs {
    pub fn experiment(&self) -> Result<ExperimentConfig> {
        match &self.config {
            Some(path) => ExperimentConfig::load(path),
            None => Ok(ExperimentConfig::stub(self.mode)),
        }
    }
}

// ---------------------------------------------------------------- generate

#[derive(Args, Debug, Clone)]
pub struct GenerateArgs {
    #[command(flatten)]
    pub suite: SuiteArgs,
    /// Genome file: a JSON array of 90 genes, or a run manifest (its champion).
    #[arg(long)]
    pub genome: Option<PathBuf>,
    /// Seed for a uniformly random genome when no genome file is given.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output path; `.json`, `.txt` or `.png`.
    #[arg(long)]
    pub out: PathBuf,
    /// Pixels per tile for `.png` output.
    #[arg(long, default_value_t = 8)]
    pub scale: usize,
}

#[derive(Debug, Serialize)]
pub struct GenerateSummary {
    pub segments: usize,
    pub types: Vec<SegmentType>,
    pub path_length: i32,
    pub connectivity: f64,
}

pub fn read_genome(path: &Path) -> Result<Genome> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let value: serde_json::Value = serde_json::from_str(&text).map_err(|e| Error::Json {
        path: path.into(),
        source: e,
    })?;
    if value.is_array() {
        return serde_json::from_value(value).map_err(|e| Error::Json {
            path: path.into(),
            source: e,
        });
    }
    Ok(RunManifest::from_json(&text)?.champion.genome)
}

pub fn random_genome(seed: u64) -> Genome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Genome::new(
        (0..levelgan::assembly::GENOME_LEN)
            .map(|_| rng.random_range(-1.0..=1.0))
            .collect(),
    )
    .expect("sampled genes are in range")
}

pub fn generate(args: GenerateArgs) -> Result<GenerateSummary> {
    let exp = args.suite.experiment()?;
    let suite = exp.suite()?;
    let genome = match &args.genome {
        Some(p) => read_genome(p)?,
        None => random_genome(args.seed),
    };
    let level = build_level(&genome, &suite);
    export_level(&level, &args.out, args.scale)?;
    let model = MovementModel::new(exp.evolution.jump_budget);
    Ok(GenerateSummary {
        segments: level.placements.len(),
        types: level.type_trace(),
        path_length: solve(&model, &level).length,
        connectivity: connectivity(&model, &level),
    })
}

// ---------------------------------------------------------------- evolve

#[derive(Args, Debug, Clone)]
pub struct EvolveArgs {
    #[command(flatten)]
    pub suite: SuiteArgs,
    /// Output directory (overrides the config).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Number of runs; run `i` uses seed `seed + i`.
    #[arg(long)]
    pub runs: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub generations: Option<usize>,
    #[arg(long)]
    pub mu: Option<usize>,
    #[arg(long)]
    pub lambda: Option<usize>,
    /// Evaluation threads. Results do not depend on this.
    #[arg(long)]
    pub jobs: Option<usize>,
    /// Skip the champion PNG export.
    #[arg(long)]
    pub no_png: bool,
}

#[derive(Debug, Serialize)]
pub struct RunOutput {
    pub seed: u64,
    pub manifest: PathBuf,
    pub champion: PathBuf,
    pub final_max_path: i32,
    pub seconds: f64,
}

pub fn evolve(args: EvolveArgs) -> Result<Vec<RunOutput>> {
    let mut exp = args.suite.experiment()?;
    if let Some(o) = args.out {
        exp.output_dir = o;
    }
    exp.runs = args.runs.unwrap_or(exp.runs);
    exp.jobs = args.jobs.or(exp.jobs);
    let e = &mut exp.evolution;
    e.seed = args.seed.unwrap_or(e.seed);
    e.generations = args.generations.unwrap_or(e.generations);
    e.mu = args.mu.unwrap_or(e.mu);
    e.lambda = args.lambda.unwrap_or(e.lambda);
    exp.evolution.validate()?;
    let suite = exp.suite()?;

    let mut outputs = Vec::new();
    for i in 0..exp.runs {
        let mut config = exp.evolution.clone();
        config.seed = exp.evolution.seed.wrapping_add(i as u64);
        let started = Instant::now();
        let mut evo = Evolution::with_jobs(config.clone(), suite.clone(), exp.jobs)?;
        evo.run();
        let seconds = started.elapsed().as_secs_f64();

        let stem = exp.output_dir.join(format!("run_{i:03}"));
        let manifest = stem.with_extension("json");
        write_file(&manifest, evo.manifest().to_json())?;
        write_file(
            &exp.output_dir.join(format!("run_{i:03}.timing.json")),
            to_json(&serde_json::json!({ "seed": config.seed, "wall_clock_seconds": seconds })),
        )?;
        let level = evo.champion_level();
        let champion = exp.output_dir.join(format!("run_{i:03}_champion.json"));
        export_level(&level, &champion, 8)?;
        export_level(
            &level,
            &exp.output_dir.join(format!("run_{i:03}_champion.txt")),
            8,
        )?;
        if !args.no_png {
            export_level(
                &level,
                &exp.output_dir.join(format!("run_{i:03}_champion.png")),
                8,
            )?;
        }
        log::info!("run {i} (seed {}) finished in {seconds:.2}s", config.seed);
        outputs.push(RunOutput {
            seed: config.seed,
            manifest,
            champion,
            final_max_path: evo.history().last().map_or(-1, |s| s.max_path),
            seconds,
        });
    }
    Ok(outputs)
}

// ---------------------------------------------------------------- simulate

#[derive(Args, Debug, Clone)]
pub struct SimulateArgs {
    /// Level document (`.json`).
    pub level: PathBuf,
    #[arg(long, default_value_t = levelgan::simulator::DEFAULT_JUMP_BUDGET)]
    pub jump_budget: u8,
    /// Include the solution path in the output.
    #[arg(long)]
    pub show_path: bool,
}

#[derive(Debug, Serialize)]
pub struct SimulationReport {
    pub path_length: i32,
    pub connectivity: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub path: Option<Vec<(i32, i32)>>,
}

pub fn simulate(args: SimulateArgs) -> Result<SimulationReport> {
    let level = load_level(&args.level)?;
    let model = MovementModel::new(args.jump_budget);
    let sol = solve(&model, &level);
    Ok(SimulationReport {
        path_length: sol.length,
        connectivity: connectivity(&model, &level),
        path: args.show_path.then(|| sol.path.iter().map(|s| s.pos()).collect()),
    })
}

// ---------------------------------------------------------------- analyze

#[derive(Args, Debug, Clone)]
pub struct AnalyzeArgs {
    /// Corpus directory, analysed as non-overlapping screens.
    #[arg(long, env = CORPUS_ENV)]
    pub corpus: Option<PathBuf>,
    /// Level documents, or directories containing them. Takes precedence
    /// over the corpus.
    #[arg(long, num_args = 1..)]
    pub levels: Vec<PathBuf>,
    /// Name used in the report's source column.
    #[arg(long)]
    pub source: Option<String>,
    /// How duplicates are treated in level novelty.
    #[arg(long, default_value = "positional")]
    pub removal: Removal,
    /// Directory for CSV tables and the JSON report.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn is_level_document(path: &Path) -> bool {
    fs::read_to_string(path)
        .ok()
        .and_then(|t| serde_json::from_str::<serde_json::Value>(&t).ok())
        .is_some_and(|v| v["format"] == levelgan::assembly::LEVEL_FORMAT_TAG)
}

fn json_files(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut files: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(|e| Error::io(dir, e))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|e| e == "json"))
        .collect();
    files.sort();
    Ok(files)
}

pub fn collect_levels(paths: &[PathBuf]) -> Result<Vec<(String, Level)>> {
    let mut out = Vec::new();
    for p in paths {
        let files = if p.is_dir() {
            json_files(p)?
                .into_iter()
                .filter(|f| is_level_document(f))
                .collect()
        } else {
            vec![p.clone()]
        };
        for f in files {
            let name = f
                .file_stem()
                .map_or_else(String::new, |s| s.to_string_lossy().into_owned());
            out.push((name, load_level(&f)?));
        }
    }
    if out.is_empty() {
        return Err(Error::Contract("no level documents found".into()));
    }
    Ok(out)
}

pub fn analyze(args: AnalyzeArgs) -> Result<NoveltyReport> {
    let report = if !args.levels.is_empty() {
        let levels = collect_levels(&args.levels)?;
        let named: Vec<(String, Vec<Segment>)> =
            levels.iter().map(|(n, l)| (n.clone(), l.segments())).collect();
        let plain: Vec<Level> = levels.into_iter().map(|(_, l)| l).collect();
        NoveltyReport::build(args.source.as_deref().unwrap_or("levels"), &named, args.removal)?
            .with_corners(&plain)
    } else {
        let dir = corpus_dir(args.corpus)?;
        NoveltyReport::build(
            args.source.as_deref().unwrap_or("corpus"),
            &corpus_partitions(&dir)?,
            args.removal,
        )?
    };
    if let Some(out) = &args.out {
        write_file(&out.join("levels.csv"), report.levels_csv())?;
        write_file(&out.join("summary.csv"), report.summary_csv())?;
        write_file(&out.join("distinct.csv"), report.distinct_csv())?;
        write_file(&out.join("corners.csv"), report.corners_csv())?;
        write_file(&out.join("report.json"), report.to_json())?;
    }
    Ok(report)
}

// ---------------------------------------------------------------- render

#[derive(Args, Debug, Clone)]
pub struct RenderArgs {
    /// Level document (`.json`) or character grid (`.txt`).
    pub level: PathBuf,
    /// PNG output path.
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 8)]
    pub scale: usize,
    /// Overlay the A* solution path (level documents only).
    #[arg(long)]
    pub path: bool,
    #[arg(long, default_value_t = levelgan::simulator::DEFAULT_JUMP_BUDGET)]
    pub jump_budget: u8,
}

pub fn render_cmd(args: RenderArgs) -> Result<Raster> {
    let raster = if args.level.extension().is_some_and(|e| e == "txt") {
        let text = fs::read_to_string(&args.level).map_err(|e| Error::io(&args.level, e))?;
        let grid = TileGrid::parse(&text, &CharMap::mega_man())?;
        render(&grid, args.scale, &Overlay::default())
    } else {
        let level = load_level(&args.level)?;
        let sol = args
            .path
            .then(|| solve(&MovementModel::new(args.jump_budget), &level));
        let overlay = Overlay {
            path: sol.as_ref().map_or(&[][..], |s| &s.path),
            spawn: level.spawn,
        };
        render(&level.grid, args.scale, &overlay)
    };
    write_png(&args.out, &raster)?;
    Ok(raster)
}

// ---------------------------------------------------------------- compare

#[derive(Args, Debug, Clone)]
pub struct CompareArgs {
    /// Directory of run manifests (first group).
    pub a: PathBuf,
    /// Directory of run manifests (second group).
    pub b: PathBuf,
    /// Write the per-generation table as CSV.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Serialize)]
pub struct Comparison {
    pub runs_a: usize,
    pub runs_b: usize,
    pub generations: usize,
    pub mean_a: Vec<f64>,
    pub mean_b: Vec<f64>,
    /// `mean_a - mean_b` per generation.
    pub difference: Vec<f64>,
    pub final_a: Vec<f64>,
    pub final_b: Vec<f64>,
    pub test: Option<MannWhitney>,
    pub warnings: Vec<String>,
}

impl Comparison {
    pub fn csv(&self) -> String {
        let mut s = String::from("generation,mean_a,mean_b,difference\n");
        for g in 0..self.mean_a.len() {
            let _ = writeln!(
                s,
                "{g},{:.4},{:.4},{:.4}",
                self.mean_a[g], self.mean_b[g], self.difference[g]
            );
        }
        s
    }

    pub fn summary(&self) -> String {
        let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
        let mut s = format!(
            "runs: {} vs {}\ngenerations compared: {}\nfinal champion mean: {:.2} vs {:.2}\n",
            self.runs_a,
            self.runs_b,
            self.generations,
            mean(&self.final_a),
            mean(&self.final_b)
        );
        if let Some(t) = self.test {
            let _ = writeln!(s, "Mann-Whitney U = {:.1}, p = {:.4}", t.u, t.p_value);
        }
        for w in &self.warnings {
            let _ = writeln!(s, "warning: {w}");
        }
        s
    }
}

/// Run manifests in a directory, sorted by file name.
pub fn load_manifests(dir: &Path) -> Result<Vec<RunManifest>> {
    let mut out = Vec::new();
    for f in json_files(dir)? {
        let text = fs::read_to_string(&f).map_err(|e| Error::io(&f, e))?;
        let is_manifest = serde_json::from_str::<serde_json::Value>(&text)
            .is_ok_and(|v| v["format"] == levelgan::evolve::MANIFEST_FORMAT_TAG);
        if is_manifest {
            out.push(RunManifest::from_json(&text)?);
        }
    }
    if out.is_empty() {
        return Err(Error::Contract(format!("no run manifests in {}", dir.display())));
    }
    Ok(out)
}

fn curve(runs: &[RunManifest], generations: usize) -> Vec<f64> {
    (0..generations)
        .map(|g| runs.iter().map(|m| m.champions[g].max_path as f64).sum::<f64>() / runs.len() as f64)
        .collect()
}

pub fn compare_runs(a: &[RunManifest], b: &[RunManifest]) -> Comparison {
    let lens = a.iter().chain(b).map(|m| m.champions.len());
    let (min, max) = (lens.clone().min().unwrap_or(0), lens.max().unwrap_or(0));
    let mut warnings = Vec::new();
    if min != max {
        let w = format!("generation counts differ ({min}..{max}); truncating to {min}");
        log::warn!("{w}");
        warnings.push(w);
    }
    let mean_a = curve(a, min);
    let mean_b = curve(b, min);
    let difference = mean_a.iter().zip(&mean_b).map(|(x, y)| x - y).collect();
    let last = |runs: &[RunManifest]| -> Vec<f64> {
        runs.iter()
            .map(|m| {
                m.champions[..min]
                    .last()
                    .map_or(-1.0, |s: &ChampionStats| s.max_path as f64)
            })
            .collect()
    };
    let (final_a, final_b) = (last(a), last(b));
    Comparison {
        runs_a: a.len(),
        runs_b: b.len(),
        generations: min,
        test: mann_whitney(&final_a, &final_b),
        mean_a,
        mean_b,
        difference,
        final_a,
        final_b,
        warnings,
    }
}

pub fn compare(args: CompareArgs) -> Result<Comparison> {
    let a = load_manifests(&args.a)?;
    let b = load_manifests(&args.b)?;
    let c = compare_runs(&a, &b);
    if let Some(out) = &args.out {
        write_file(out, c.csv())?;
    }
    Ok(c)
}
