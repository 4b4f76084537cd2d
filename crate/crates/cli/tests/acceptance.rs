//! Acceptance criteria. Prints one `PASS`/`FAIL` line per criterion and exits
//! non-zero if any fails.
//!
//! The corpus criteria read the enhanced VGLC Mega Man corpus with path
//! annotations from `$LEVELGAN_CORPUS`, falling back to
//! `data/vglc-megaman/` in the workspace.

use std::path::{Path, PathBuf};
use std::process::{Command, ExitCode};
use std::time::Instant;

use levelgan::analysis::{distinct_stats, level_novelty, Removal};
use levelgan::assembly::{decode_placement, route_types, Level, Placement, GENOME_LEN};
use levelgan::corpus::{extract_segments, load_corpus, partition_non_overlapping, SampleCounts, SuiteMode};
use levelgan::evolve::{
    crowding_distance, make_offspring, non_dominated_sort, run_evolution, EvolutionConfig, VariationRates,
};
use levelgan::simulator::{reachable_states, solve, MovementModel};
use levelgan::tile::{Passability, Tile};
use levelgan::{CharMap, GeneratorSuite, Genome, SegmentType};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn workspace() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn corpus_dir() -> Result<PathBuf, String> {
    let dir = std::env::var_os("LEVELGAN_CORPUS")
        .map(PathBuf::from)
        .unwrap_or_else(|| workspace().join("data/vglc-megaman"));
    if dir.is_dir() {
        Ok(dir)
    } else {
        Err(format!(
            "VGLC corpus not found at {} (set LEVELGAN_CORPUS to the annotated corpus)",
            dir.display()
        ))
    }
}

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn corpus_counts() -> Outcome {
    let dir = corpus_dir()?;
    let started = Instant::now();
    let levels = load_corpus(&dir, &CharMap::mega_man()).map_err(|e| e.to_string())?;
    let mut samples = Vec::new();
    for l in &levels {
        samples.extend(extract_segments(l).map_err(|e| e.to_string())?);
    }
    let secs = started.elapsed().as_secs_f64();
    let c = SampleCounts::of(&samples);
    let expected = [
        (SegmentType::Horizontal, 1462),
        (SegmentType::Up, 518),
        (SegmentType::Down, 364),
        (SegmentType::UpperLeft, 10),
        (SegmentType::LowerRight, 9),
        (SegmentType::UpperRight, 8),
        (SegmentType::LowerLeft, 8),
    ];
    let exact = c.total == 2344 && expected.iter().all(|&(t, n)| c.get(t) == n);
    let close = expected.iter().all(|&(t, n)| {
        let got = c.get(t) as f64;
        if t.is_corner() {
            (got - n as f64).abs() <= 2.0
        } else {
            (got - n as f64).abs() <= 0.02 * n as f64
        }
    });
    let got: Vec<String> = expected
        .iter()
        .map(|&(t, _)| format!("{}={}", t.key(), c.get(t)))
        .collect();
    check(
        (exact || close) && secs < 10.0,
        format!(
            "total={} {} ({}; {secs:.2}s)",
            c.total,
            got.join(" "),
            if exact { "exact" } else { "approximate" }
        ),
    )
}

fn corpus_partitions() -> Result<Vec<Vec<levelgan::Segment>>, String> {
    let dir = corpus_dir()?;
    let levels = load_corpus(&dir, &CharMap::mega_man()).map_err(|e| e.to_string())?;
    levels
        .iter()
        .map(|l| partition_non_overlapping(l).map_err(|e| e.to_string()))
        .collect()
}

fn nonoverlap_partition() -> Outcome {
    let parts = corpus_partitions()?;
    let pooled: Vec<_> = parts.into_iter().flatten().collect();
    let d = distinct_stats(&pooled).map_err(|e| e.to_string())?;
    check(
        d.segments.abs_diff(178) <= 5
            && (88.0..=91.0).contains(&d.distinct_pct)
            && (d.novelty_all - 0.4390).abs() <= 0.02,
        format!(
            "segments={} distinct={} ({:.1}%) novelty_all={:.4}",
            d.segments, d.distinct, d.distinct_pct, d.novelty_all
        ),
    )
}

fn vglc_level_novelty() -> Outcome {
    let parts = corpus_partitions()?;
    let ln: Vec<f64> = parts
        .iter()
        .filter(|s| s.len() >= 2)
        .map(|s| level_novelty(s, Removal::Positional).unwrap())
        .collect();
    if ln.is_empty() {
        return Err("no level has two or more screens".into());
    }
    let mean = ln.iter().sum::<f64>() / ln.len() as f64;
    let min = ln.iter().copied().fold(f64::INFINITY, f64::min);
    let max = ln.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    check(
        (mean - 0.34).abs() <= 0.03 && min <= 0.15 && max >= 0.40,
        format!("levels={} mean={mean:.4} min={min:.4} max={max:.4}", ln.len()),
    )
}

/// Layers by repeatedly removing the members no remaining member dominates.
fn peel(points: &[[f64; 2]]) -> Vec<Vec<usize>> {
    let dominated = |a: [f64; 2], b: [f64; 2]| a[0] >= b[0] && a[1] >= b[1] && (a[0] > b[0] || a[1] > b[1]);
    let mut remaining: Vec<usize> = (0..points.len()).collect();
    let mut layers = Vec::new();
    while !remaining.is_empty() {
        let front: Vec<usize> = remaining
            .iter()
            .copied()
            .filter(|&i| !remaining.iter().any(|&j| dominated(points[j], points[i])))
            .collect();
        remaining.retain(|i| !front.contains(i));
        layers.push(front);
    }
    layers
}

fn nsga_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for p in 0..200 {
        let n = rng.random_range(1..=50);
        let coarse = p % 2 == 0;
        let pts: Vec<[f64; 2]> = (0..n)
            .map(|_| {
                if coarse {
                    [rng.random_range(0..8) as f64, rng.random_range(0..8) as f64 / 7.0]
                } else {
                    [rng.random_range(-1..200) as f64, rng.random::<f64>()]
                }
            })
            .collect();
        if non_dominated_sort(&pts) != peel(&pts) {
            return Err(format!("population {p} (size {n}) layers differ from the oracle"));
        }
    }
    let inf = f64::INFINITY;
    let fixtures: [(&[[f64; 2]], &[f64]); 4] = [
        (&[[0.0, 10.0], [5.0, 5.0], [10.0, 0.0]], &[inf, 2.0, inf]),
        (&[[3.0, 1.0], [1.0, 3.0]], &[inf, inf]),
        (
            &[[0.0, 1.0], [2.0, 1.0], [3.0, 1.0], [8.0, 1.0]],
            &[inf, 0.375, 0.75, inf],
        ),
        (
            &[[1.0, 9.0], [2.0, 7.0], [5.0, 4.0], [6.0, 3.0], [9.0, 1.0]],
            &[inf, 1.125, 1.0, 0.875, inf],
        ),
    ];
    for (k, (pts, want)) in fixtures.iter().enumerate() {
        let layer: Vec<usize> = (0..pts.len()).collect();
        let got = crowding_distance(pts, &layer);
        let ok = got
            .iter()
            .zip(want.iter())
            .all(|(g, w)| (g.is_infinite() && w.is_infinite()) || (g - w).abs() <= 1e-12);
        if !ok {
            return Err(format!("crowding fixture {k}: got {got:?}, want {want:?}"));
        }
    }
    Ok("200 populations match peeling; 4 crowding fixtures within 1e-12".into())
}

const MUTATION_CODES: [u8; 8] = [0, 1, 2, 3, 4, 5, 9, 10];

fn random_small_level(rng: &mut ChaCha8Rng) -> Level {
    let genes: Vec<f64> = (0..GENOME_LEN).map(|_| rng.random_range(-1.0..=1.0)).collect();
    let genome = Genome::new(genes).unwrap();
    let mode = if rng.random_bool(0.5) {
        SuiteMode::MultiGan
    } else {
        SuiteMode::OneGan
    };
    let suite = GeneratorSuite::stub(mode);
    let plan = decode_placement(&genome);
    let types = route_types(&plan);
    let keep = rng.random_range(1..=4);
    let mut placements: Vec<Placement> = plan
        .slots
        .iter()
        .zip(&types)
        .enumerate()
        .take(keep)
        .map(|(i, (&slot, &t))| Placement {
            slot,
            segment_type: t,
            segment: suite.generate(t, &genome.latent(i)),
        })
        .collect();
    for _ in 0..rng.random_range(0..30) {
        let i = rng.random_range(0..placements.len());
        let (r, c) = (rng.random_range(0..14), rng.random_range(0..16));
        let code = MUTATION_CODES[rng.random_range(0..MUTATION_CODES.len())];
        placements[i].segment.set(r, c, Tile::new(code).unwrap());
    }
    Level::assemble(placements).unwrap()
}

fn astar_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let model = MovementModel::default();
    let mut solvable = 0;
    for i in 0..100 {
        let level = random_small_level(&mut rng);
        let sol = solve(&model, &level);
        let bfs = match (level.spawn, level.orb) {
            (Some(s), Some(o)) => {
                let goal = (o.0 as i32, o.1 as i32);
                reachable_states(&model, &level.grid, model.start(&level.grid, s))
                    .into_iter()
                    .filter(|(st, _)| st.pos() == goal)
                    .map(|(_, d)| d as i32)
                    .min()
                    .unwrap_or(-1)
            }
            _ => -1,
        };
        if sol.length != bfs {
            return Err(format!("level {i}: A* {} vs BFS {bfs}", sol.length));
        }
        if sol.length >= 0 {
            solvable += 1;
            let hazard_free = sol.path.iter().all(|s| {
                let p = level.grid.get(s.row as usize, s.col as usize).passability();
                p != Passability::Lethal && p != Passability::Void
            });
            if !model.is_valid_path(&level.grid, &sol.path) || !hazard_free {
                return Err(format!(
                    "level {i}: returned path is not step-valid and hazard-free"
                ));
            }
        }
    }
    Ok(format!("100 levels agree with BFS ({solvable} solvable)"))
}

fn variation_stats() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let rates = VariationRates {
        crossover: 0.5,
        mutation: 0.3,
        eta: 20.0,
    };
    let random_genome = |rng: &mut ChaCha8Rng| {
        Genome::new((0..GENOME_LEN).map(|_| rng.random_range(-1.0..=1.0)).collect()).unwrap()
    };
    let (mut genes, mut mutated, mut matings, mut crossovers) = (0usize, 0usize, 0usize, 0usize);
    let mut in_bounds = true;
    while matings < 10_000 {
        let (a, b) = (random_genome(&mut rng), random_genome(&mut rng));
        let (c1, c2, trace) = make_offspring((&a, &b), rates, &mut rng);
        matings += 1;
        crossovers += trace.cut.is_some() as usize;
        if genes < 10_000 {
            genes += 2 * GENOME_LEN;
            mutated += trace.mutated_genes;
        }
        in_bounds &= c1
            .genes()
            .iter()
            .chain(c2.genes())
            .all(|g| (-1.0..=1.0).contains(g));
    }
    let m = mutated as f64 / genes as f64;
    let x = crossovers as f64 / matings as f64;
    check(
        (m - 0.30).abs() <= 0.02 && (x - 0.50).abs() <= 0.03 && in_bounds,
        format!("mutation {m:.4} over {genes} genes; crossover {x:.4} over {matings} matings; bounds ok={in_bounds}"),
    )
}

fn median(v: &mut [i32]) -> f64 {
    v.sort_unstable();
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2] as f64
    } else {
        (v[n / 2 - 1] + v[n / 2]) as f64 / 2.0
    }
}

fn stub_suite_comparison() -> Outcome {
    let started = Instant::now();
    let mut finals = Vec::new();
    for mode in [SuiteMode::MultiGan, SuiteMode::OneGan] {
        let mut f = Vec::new();
        for seed in 1..=5 {
            let cfg = EvolutionConfig {
                mu: 20,
                lambda: 20,
                generations: 30,
                seed,
                ..Default::default()
            };
            let evo = run_evolution(cfg, GeneratorSuite::stub(mode)).map_err(|e| e.to_string())?;
            let h = evo.history();
            if !h.windows(2).all(|w| w[1].max_path >= w[0].max_path) {
                return Err(format!("{mode:?} seed {seed}: champion path length decreased"));
            }
            f.push(h.last().unwrap().max_path);
        }
        finals.push(f);
    }
    let secs = started.elapsed().as_secs_f64();
    let (ma, mb) = (median(&mut finals[0].clone()), median(&mut finals[1].clone()));
    check(
        ma > mb && secs < 300.0,
        format!(
            "median final champion MultiGAN {ma} {:?} vs OneGAN {mb} {:?}; monotone; {secs:.1}s",
            finals[0], finals[1]
        ),
    )
}

fn evolve_determinism() -> Outcome {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let config = tmp.path().join("exp.toml");
    std::fs::write(
        &config,
        "schema_version = 1\nmode = \"multigan\"\nmu = 20\nlambda = 20\ngenerations = 10\nseed = 42\n",
    )
    .map_err(|e| e.to_string())?;
    let mut manifests = Vec::new();
    for run in ["a", "b"] {
        let out = tmp.path().join(run);
        let status = Command::new(env!("CARGO_BIN_EXE_levelgan"))
            .args(["evolve", "--no-png", "--config"])
            .arg(&config)
            .arg("--out")
            .arg(&out)
            .output()
            .map_err(|e| e.to_string())?;
        if !status.status.success() {
            return Err(String::from_utf8_lossy(&status.stderr).into_owned());
        }
        manifests.push(std::fs::read(out.join("run_000.json")).map_err(|e| e.to_string())?);
    }
    check(
        manifests[0] == manifests[1],
        format!(
            "two evolve invocations, {} manifest bytes, identical={}",
            manifests[0].len(),
            manifests[0] == manifests[1]
        ),
    )
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("corpus-counts", corpus_counts),
        ("nonoverlap-partition", nonoverlap_partition),
        ("vglc-level-novelty", vglc_level_novelty),
        ("nsga-oracle", nsga_oracle),
        ("astar-oracle", astar_oracle),
        ("variation-statistics", variation_stats),
        ("stub-suite-comparison", stub_suite_comparison),
        ("evolve-determinism", evolve_determinism),
    ];
    let mut failed = 0;
    for (name, f) in criteria {
        match f() {
            Ok(detail) => println!("PASS {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL {name}: {detail}");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
