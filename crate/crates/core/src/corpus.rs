//! Level corpus parsing and sliding-window segment extraction.
//!
//! A corpus directory holds one character-grid file per level (`<name>.txt`)
//! and a path annotation next to it (`<name>.path`). The annotation starts
//! with a header `origin <row> <col>` giving the top-left corner of the first
//! screen, followed by one direction token (`R`, `L`, `U`, `D`) per line.
//! Blank lines and lines starting with `;` are ignored.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::segment::{corner_type, Direction, Segment, SegmentType, SEGMENT_COLS, SEGMENT_ROWS};
use crate::tile::{CharMap, Tile, TileGrid};

/// File extension of level grids.
pub const LEVEL_EXT: &str = "txt";
/// File extension of path annotations.
pub const PATH_EXT: &str = "path";

/// How the screen window walks through a level.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct PathAnnotation {
    pub origin: (usize, usize),
    pub slides: Vec<Direction>,
}

impl PathAnnotation {
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .map(str::trim)
            .enumerate()
            .filter(|(_, l)| !l.is_empty() && !l.starts_with(';'));
        let (_, header) = lines
            .next()
            .ok_or_else(|| Error::Annotation("missing origin header".into()))?;
        let parts: Vec<&str> = header.split_whitespace().collect();
        let origin = match parts.as_slice() {
            ["origin", r, c] => {
                let parse = |s: &str| {
                    s.parse::<usize>()
                        .map_err(|_| Error::Annotation(format!("bad origin coordinate {s:?}")))
                };
                (parse(r)?, parse(c)?)
            }
            _ => {
                return Err(Error::Annotation(format!(
                    "expected `origin <row> <col>`, got {header:?}"
                )))
            }
        };
        let slides = lines
            .map(|(i, l)| {
                l.parse::<Direction>()
                    .map_err(|_| Error::Annotation(format!("line {}: bad token {l:?}", i + 1)))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(PathAnnotation { origin, slides })
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("origin {} {}\n", self.origin.0, self.origin.1);
        for d in &self.slides {
            s.push(d.token());
            s.push('\n');
        }
        s
    }
}

/// A parsed level plus the annotated walk of the screen window through it.
#[derive(Clone, Debug)]
pub struct RawLevel {
    pub name: String,
    pub grid: TileGrid,
    pub path: PathAnnotation,
}

impl RawLevel {
    pub fn new(name: impl Into<String>, grid: TileGrid, path: PathAnnotation) -> Result<Self> {
        if grid.rows() < SEGMENT_ROWS || grid.cols() < SEGMENT_COLS {
            return Err(Error::Format(format!(
                "level must be at least {SEGMENT_ROWS}x{SEGMENT_COLS}, got {}x{}",
                grid.rows(),
                grid.cols()
            )));
        }
        Ok(RawLevel {
            name: name.into(),
            grid,
            path,
        })
    }

    /// Window origins visited along the path, starting with the annotated origin.
    pub fn window_positions(&self) -> Result<Vec<(usize, usize)>> {
        let max_row = (self.grid.rows() - SEGMENT_ROWS) as i64;
        let max_col = (self.grid.cols() - SEGMENT_COLS) as i64;
        let (mut r, mut c) = (self.path.origin.0 as i64, self.path.origin.1 as i64);
        let check = |r: i64, c: i64, step: usize| {
            if r < 0 || c < 0 || r > max_row || c > max_col {
                Err(Error::Extraction(format!(
                    "{}: window leaves the level at slide {step} (origin {r}, {c})",
                    self.name
                )))
            } else {
                Ok(())
            }
        };
        check(r, c, 0)?;
        let mut out = Vec::with_capacity(self.path.slides.len() + 1);
        out.push((r as usize, c as usize));
        for (i, d) in self.path.slides.iter().enumerate() {
            let (dr, dc) = d.offset();
            r += dr as i64;
            c += dc as i64;
            check(r, c, i + 1)?;
            out.push((r as usize, c as usize));
        }
        Ok(out)
    }
}

/// Parses a level grid; the player spawn becomes air.
pub fn parse_level(text: &str, map: &CharMap) -> Result<TileGrid> {
    TileGrid::parse(text, map)
}

/// Whether a sample was emitted for its slide direction or as a corner duplicate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SampleKind {
    Directional,
    Corner,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TypedSample {
    pub segment: Segment,
    pub segment_type: SegmentType,
    pub kind: SampleKind,
    pub source: String,
    pub window_origin: (usize, usize),
}

/// Replaces codes that never appear in training data: the orb and player
/// become air, located enemies collapse to the generic enemy.
pub fn sanitize_for_training(seg: &mut Segment) {
    for r in 0..SEGMENT_ROWS {
        for c in 0..SEGMENT_COLS {
            let t = seg.get(r, c);
            let repl = match t {
                Tile::ORB | Tile::PLAYER => Tile::AIR,
                Tile::WALL_ENEMY | Tile::FLYING_ENEMY => Tile::GROUND_ENEMY,
                _ => continue,
            };
            seg.set(r, c, repl);
        }
    }
}

/// Slides a 14x16 window one tile at a time along the level's annotation.
///
/// Every visited window yields one directional sample labelled by the slide
/// that entered it (the first window takes the first slide's label). Where
/// the slide direction changes axis, the window is also emitted as a corner
/// sample.
pub fn extract_segments(level: &RawLevel) -> Result<Vec<TypedSample>> {
    let slides = &level.path.slides;
    if slides.is_empty() {
        return Ok(Vec::new());
    }
    let positions = level.window_positions()?;
    let mut out = Vec::with_capacity(positions.len() + 8);
    for (k, &(r, c)) in positions.iter().enumerate() {
        let mut segment = Segment::from_window(&level.grid, r, c)?;
        sanitize_for_training(&mut segment);
        let entering = if k == 0 { slides[0] } else { slides[k - 1] };
        out.push(TypedSample {
            segment: segment.clone(),
            segment_type: entering.segment_type(),
            kind: SampleKind::Directional,
            source: level.name.clone(),
            window_origin: (r, c),
        });
        if k >= 1 && k < slides.len() && !slides[k - 1].same_axis(slides[k]) {
            out.push(TypedSample {
                segment,
                segment_type: corner_type(slides[k - 1], slides[k])?,
                kind: SampleKind::Corner,
                source: level.name.clone(),
                window_origin: (r, c),
            });
        }
    }
    Ok(out)
}

/// Screen-aligned, non-overlapping segments along the level's path.
///
/// A window is emitted at the origin and again whenever the walk has moved a
/// full screen (16 columns or 14 rows) away from the last emitted window. If
/// the path ends part-way into a screen, the final window is emitted as well,
/// overlapping its predecessor.
pub fn partition_non_overlapping(level: &RawLevel) -> Result<Vec<Segment>> {
    let positions = level.window_positions()?;
    let mut emitted = vec![positions[0]];
    for &(r, c) in &positions[1..] {
        let &(lr, lc) = emitted.last().unwrap();
        if r.abs_diff(lr) >= SEGMENT_ROWS || c.abs_diff(lc) >= SEGMENT_COLS {
            emitted.push((r, c));
        }
    }
    let last = *positions.last().unwrap();
    if *emitted.last().unwrap() != last {
        emitted.push(last);
    }
    emitted
        .into_iter()
        .map(|(r, c)| {
            let mut s = Segment::from_window(&level.grid, r, c)?;
            sanitize_for_training(&mut s);
            Ok(s)
        })
        .collect()
}

/// Loads every `<name>.txt` + `<name>.path` pair in `dir`, sorted by name.
pub fn load_corpus(dir: &Path, map: &CharMap) -> Result<Vec<RawLevel>> {
    let entries = fs::read_dir(dir).map_err(|e| Error::io(dir, e))?;
    let mut level_files: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|e| e == LEVEL_EXT))
        .collect();
    level_files.sort();
    if level_files.is_empty() {
        return Err(Error::Config(format!(
            "no .{LEVEL_EXT} level files in {}",
            dir.display()
        )));
    }
    level_files.iter().map(|p| load_level(p, map)).collect()
}

pub fn load_level(level_path: &Path, map: &CharMap) -> Result<RawLevel> {
    let name = level_path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let text = fs::read_to_string(level_path).map_err(|e| Error::io(level_path, e))?;
    let grid = parse_level(&text, map).map_err(|e| match e {
        Error::UnknownChar { .. } | Error::Format(_) => {
            Error::Format(format!("{}: {e}", level_path.display()))
        }
        other => other,
    })?;
    let ann_path = level_path.with_extension(PATH_EXT);
    if !ann_path.exists() {
        return Err(Error::Annotation(format!(
            "missing annotation for level {name} (expected {})",
            ann_path.display()
        )));
    }
    let ann_text = fs::read_to_string(&ann_path).map_err(|e| Error::io(&ann_path, e))?;
    let path = PathAnnotation::parse(&ann_text)
        .map_err(|e| Error::Annotation(format!("{}: {e}", ann_path.display())))?;
    RawLevel::new(name, grid, path)
}

/// Which training sets to write.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SuiteMode {
    OneGan,
    MultiGan,
}

impl std::str::FromStr for SuiteMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "onegan" => Ok(SuiteMode::OneGan),
            "multigan" => Ok(SuiteMode::MultiGan),
            _ => Err(Error::Config(format!("unknown mode {s:?} (onegan|multigan)"))),
        }
    }
}

/// Per-type sample counts. `total` counts directional samples only; corner
/// samples duplicate windows already counted.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SampleCounts {
    pub total: usize,
    pub by_type: BTreeMap<SegmentType, usize>,
}

impl SampleCounts {
    pub fn of(samples: &[TypedSample]) -> Self {
        let mut counts = SampleCounts::default();
        for t in SegmentType::ALL {
            counts.by_type.insert(t, 0);
        }
        for s in samples {
            *counts.by_type.entry(s.segment_type).or_default() += 1;
            if s.kind == SampleKind::Directional {
                counts.total += 1;
            }
        }
        counts
    }

    pub fn get(&self, t: SegmentType) -> usize {
        self.by_type.get(&t).copied().unwrap_or(0)
    }
}

/// Groups samples into training sets: one set of all directional samples, or
/// seven sets keyed by type.
pub fn training_sets(samples: &[TypedSample], mode: SuiteMode) -> BTreeMap<String, Vec<Segment>> {
    let mut sets = BTreeMap::new();
    match mode {
        SuiteMode::OneGan => {
            let all = samples
                .iter()
                .filter(|s| s.kind == SampleKind::Directional)
                .map(|s| s.segment.clone())
                .collect();
            sets.insert("onegan".to_string(), all);
        }
        SuiteMode::MultiGan => {
            for t in SegmentType::ALL {
                let set = samples
                    .iter()
                    .filter(|s| s.segment_type == t)
                    .map(|s| s.segment.clone())
                    .collect();
                sets.insert(format!("multigan_{}", t.key()), set);
            }
        }
    }
    sets
}

/// Writes `<key>.json` dataset files into `out_dir`, returning the paths written.
pub fn export_training_sets(
    samples: &[TypedSample],
    mode: SuiteMode,
    out_dir: &Path,
) -> Result<Vec<PathBuf>> {
    if samples.is_empty() {
        return Err(Error::Contract("no samples to export".into()));
    }
    fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let mut written = Vec::new();
    for (key, set) in training_sets(samples, mode) {
        let path = out_dir.join(format!("{key}.json"));
        write_dataset(&path, &set)?;
        written.push(path);
    }
    Ok(written)
}

pub fn write_dataset(path: &Path, segments: &[Segment]) -> Result<()> {
    let json = serde_json::to_string(segments).map_err(|e| Error::Json {
        path: path.into(),
        source: e,
    })?;
    fs::write(path, json).map_err(|e| Error::io(path, e))
}

pub fn read_dataset(path: &Path) -> Result<Vec<Segment>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::Json {
        path: path.into(),
        source: e,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use Direction::*;

    /// Level whose every cell encodes its column modulo 10 (air / solid pattern
    /// differs per column so windows are distinguishable).
    fn striped(rows: usize, cols: usize) -> TileGrid {
        let mut g = TileGrid::filled(rows, cols, Tile::AIR);
        for r in 0..rows {
            for c in 0..cols {
                if (r * 7 + c * 3) % 5 == 0 {
                    g.set(r, c, Tile::SOLID);
                }
            }
        }
        g
    }

    fn level(rows: usize, cols: usize, origin: (usize, usize), slides: Vec<Direction>) -> RawLevel {
        RawLevel::new("t", striped(rows, cols), PathAnnotation { origin, slides }).unwrap()
    }

    #[test]
    fn three_right_slides_give_four_horizontal_windows() {
        let lvl = level(14, 19, (0, 0), vec![Right, Right, Right]);
        let samples = extract_segments(&lvl).unwrap();
        assert_eq!(samples.len(), 4);
        for (i, s) in samples.iter().enumerate() {
            assert_eq!(s.segment_type, SegmentType::Horizontal);
            assert_eq!(s.window_origin, (0, i));
            assert_eq!(s.segment, Segment::from_window(&lvl.grid, 0, i).unwrap());
        }
    }

    #[test]
    fn right_then_up_emits_lower_right_corner() {
        let lvl = level(15, 17, (1, 0), vec![Right, Up]);
        let samples = extract_segments(&lvl).unwrap();
        let summary: Vec<_> = samples
            .iter()
            .map(|s| (s.segment_type, s.kind, s.window_origin))
            .collect();
        assert_eq!(
            summary,
            vec![
                (SegmentType::Horizontal, SampleKind::Directional, (1, 0)),
                (SegmentType::Horizontal, SampleKind::Directional, (1, 1)),
                (SegmentType::LowerRight, SampleKind::Corner, (1, 1)),
                (SegmentType::Up, SampleKind::Directional, (0, 1)),
            ]
        );
    }

    #[test]
    fn empty_annotation_gives_no_samples() {
        let lvl = level(14, 16, (0, 0), vec![]);
        assert!(extract_segments(&lvl).unwrap().is_empty());
    }

    #[test]
    fn out_of_bounds_walk_is_an_error() {
        let lvl = level(14, 17, (0, 0), vec![Right, Right]);
        assert!(matches!(extract_segments(&lvl), Err(Error::Extraction(_))));
        let lvl = level(14, 16, (0, 0), vec![Up]);
        assert!(extract_segments(&lvl).is_err());
    }

    #[test]
    fn partition_two_exact_screens() {
        let lvl = level(14, 32, (0, 0), vec![Right; 16]);
        assert_eq!(partition_non_overlapping(&lvl).unwrap().len(), 2);
    }

    #[test]
    fn partition_snaps_trailing_partial_screen() {
        let lvl = level(14, 40, (0, 0), vec![Right; 24]);
        let segs = partition_non_overlapping(&lvl).unwrap();
        assert_eq!(segs.len(), 3);
        assert_eq!(segs[2], Segment::from_window(&lvl.grid, 0, 24).unwrap());
    }

    #[test]
    fn partition_follows_turns() {
        // 16 right, then 14 up: three screens, an L shape.
        let mut slides = vec![Right; 16];
        slides.extend(vec![Up; 14]);
        let lvl = level(28, 32, (14, 0), slides);
        let segs = partition_non_overlapping(&lvl).unwrap();
        assert_eq!(segs.len(), 3);
        assert_eq!(segs[2], Segment::from_window(&lvl.grid, 0, 16).unwrap());
    }

    #[test]
    fn training_samples_exclude_orb_and_located_enemies() {
        let mut g = striped(14, 17);
        g.set(3, 3, Tile::ORB);
        g.set(4, 4, Tile::FLYING_ENEMY);
        let lvl = RawLevel::new(
            "t",
            g,
            PathAnnotation {
                origin: (0, 0),
                slides: vec![Right],
            },
        )
        .unwrap();
        for s in extract_segments(&lvl).unwrap() {
            assert!(s.segment.iter().all(Tile::allowed_in_training));
        }
    }

    #[test]
    fn annotation_round_trip() {
        let text = "origin 3 4\nR\nR\n; comment\n\nU\nL\nD\n";
        let ann = PathAnnotation::parse(text).unwrap();
        assert_eq!(ann.origin, (3, 4));
        assert_eq!(ann.slides, vec![Right, Right, Up, Left, Down]);
        assert_eq!(PathAnnotation::parse(&ann.to_text()).unwrap(), ann);
    }

    #[test]
    fn annotation_requires_header() {
        assert!(PathAnnotation::parse("R\nR\n").is_err());
        assert!(PathAnnotation::parse("origin 0 0\nQ\n").is_err());
    }

    #[test]
    fn multigan_sets_with_single_sample() {
        let lvl = level(14, 16, (0, 0), vec![]);
        let sample = TypedSample {
            segment: Segment::from_window(&lvl.grid, 0, 0).unwrap(),
            segment_type: SegmentType::Up,
            kind: SampleKind::Directional,
            source: "t".into(),
            window_origin: (0, 0),
        };
        let sets = training_sets(&[sample], SuiteMode::MultiGan);
        assert_eq!(sets.len(), 7);
        assert_eq!(sets.values().filter(|s| s.is_empty()).count(), 6);
        assert_eq!(sets["multigan_up"].len(), 1);
    }
}
