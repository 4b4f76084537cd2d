//! Tile-difference novelty and distinct-segment statistics.

use std::collections::{BTreeMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::assembly::Level;
use crate::error::{Error, Result};
use crate::segment::{Segment, SegmentType, SEGMENT_AREA};

/// Fraction of the 224 positions whose tiles differ.
pub fn segment_distance(x: &Segment, y: &Segment) -> f64 {
    let differing = x.iter().zip(y.iter()).filter(|(a, b)| a != b).count();
    differing as f64 / SEGMENT_AREA as f64
}

/// Mean distance from `x` to every member of `set`.
pub fn segment_novelty<'a>(x: &Segment, set: impl IntoIterator<Item = &'a Segment>) -> Result<f64> {
    let (mut sum, mut n) = (0.0, 0usize);
    for y in set {
        sum += segment_distance(x, y);
        n += 1;
    }
    if n == 0 {
        return Err(Error::Contract("novelty needs a nonempty comparison set".into()));
    }
    Ok(sum / n as f64)
}

/// How `M - {x}` treats duplicates of `x`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Removal {
    /// Remove only the occurrence being scored; other copies count at distance 0.
    #[default]
    Positional,
    /// Remove every copy of `x`. A segment with no other distinct segment
    /// scores 0.
    AllCopies,
}

impl std::str::FromStr for Removal {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "positional" => Ok(Removal::Positional),
            "all-copies" | "all_copies" => Ok(Removal::AllCopies),
            _ => Err(Error::Config(format!(
                "unknown removal {s:?} (positional|all-copies)"
            ))),
        }
    }
}

fn row_novelty(segments: &[Segment], i: usize, removal: Removal) -> f64 {
    let x = &segments[i];
    let (mut sum, mut n) = (0.0, 0usize);
    for (j, y) in segments.iter().enumerate() {
        if j == i {
            continue;
        }
        let d = segment_distance(x, y);
        if removal == Removal::AllCopies && d == 0.0 {
            continue;
        }
        sum += d;
        n += 1;
    }
    if n == 0 {
        0.0
    } else {
        sum / n as f64
    }
}

fn mean_novelty(segments: &[Segment], removal: Removal) -> f64 {
    let n = segments.len();
    #[cfg(feature = "parallel")]
    let total: f64 = {
        use rayon::prelude::*;
        let rows: Vec<f64> = (0..n)
            .into_par_iter()
            .map(|i| row_novelty(segments, i, removal))
            .collect();
        rows.iter().sum()
    };
    #[cfg(not(feature = "parallel"))]
    let total: f64 = (0..n).map(|i| row_novelty(segments, i, removal)).sum();
    total / n as f64
}

/// Level novelty: the mean over members of their novelty against the rest.
pub fn level_novelty(segments: &[Segment], removal: Removal) -> Result<f64> {
    if segments.len() < 2 {
        return Err(Error::Contract(format!(
            "level novelty needs at least 2 segments, got {}",
            segments.len()
        )));
    }
    Ok(mean_novelty(segments, removal))
}

/// Unique segments in first-seen order.
pub fn dedup(segments: &[Segment]) -> Vec<Segment> {
    let mut seen = HashSet::new();
    segments.iter().filter(|s| seen.insert(*s)).cloned().collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistinctStats {
    pub segments: usize,
    pub distinct: usize,
    pub distinct_pct: f64,
    /// Mean positional novelty over the whole collection; 0 for a single segment.
    pub novelty_all: f64,
    /// The same on the deduplicated collection; 0 when only one is distinct.
    pub novelty_set: f64,
}

pub fn distinct_stats(segments: &[Segment]) -> Result<DistinctStats> {
    if segments.is_empty() {
        return Err(Error::Contract(
            "distinct statistics need at least one segment".into(),
        ));
    }
    let unique = dedup(segments);
    let avg = |s: &[Segment]| {
        if s.len() < 2 {
            0.0
        } else {
            mean_novelty(s, Removal::Positional)
        }
    };
    Ok(DistinctStats {
        segments: segments.len(),
        distinct: unique.len(),
        distinct_pct: 100.0 * unique.len() as f64 / segments.len() as f64,
        novelty_all: avg(segments),
        novelty_set: avg(&unique),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CornerRow {
    pub segment_type: SegmentType,
    #[serde(flatten)]
    pub stats: DistinctStats,
}

/// Distinct statistics of the corner segments pooled across levels, one row
/// per corner type that occurs. Missing types are reported in the notes.
pub fn corner_breakdown(levels: &[Level]) -> (Vec<CornerRow>, Vec<String>) {
    let mut groups: BTreeMap<SegmentType, Vec<Segment>> = BTreeMap::new();
    for level in levels {
        for p in &level.placements {
            if p.segment_type.is_corner() {
                groups.entry(p.segment_type).or_default().push(p.segment.clone());
            }
        }
    }
    let mut rows = Vec::new();
    let mut notes = Vec::new();
    for t in SegmentType::CORNERS {
        match groups.get(&t) {
            Some(segs) => rows.push(CornerRow {
                segment_type: t,
                stats: distinct_stats(segs).expect("group is nonempty"),
            }),
            None if !groups.is_empty() => notes.push(format!("no {} segments; row omitted", t.label())),
            None => {}
        }
    }
    (rows, notes)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LevelNoveltyRow {
    pub name: String,
    pub segments: usize,
    pub level_novelty: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub mean: f64,
    /// Sample standard deviation; 0 for fewer than two values.
    pub stdev: f64,
    pub min: f64,
    pub max: f64,
}

impl Summary {
    pub fn of(values: &[f64]) -> Option<Summary> {
        if values.is_empty() {
            return None;
        }
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let stdev = if values.len() > 1 {
            (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
        } else {
            0.0
        };
        Some(Summary {
            mean,
            stdev,
            min: values.iter().copied().fold(f64::INFINITY, f64::min),
            max: values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        })
    }
}

/// Novelty statistics for one source of levels.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoveltyReport {
    pub source: String,
    pub removal: Removal,
    pub levels: Vec<LevelNoveltyRow>,
    pub level_novelty: Option<Summary>,
    pub distinct: DistinctStats,
    pub corners: Vec<CornerRow>,
    pub notes: Vec<String>,
}

impl NoveltyReport {
    /// `levels` pairs a name with the segment list of each level. Levels with
    /// fewer than two segments are skipped for level novelty and noted.
    pub fn build(source: &str, levels: &[(String, Vec<Segment>)], removal: Removal) -> Result<Self> {
        let mut rows = Vec::new();
        let mut notes = Vec::new();
        for (name, segs) in levels {
            if segs.len() < 2 {
                notes.push(format!("{name}: {} segment(s), no level novelty", segs.len()));
                continue;
            }
            rows.push(LevelNoveltyRow {
                name: name.clone(),
                segments: segs.len(),
                level_novelty: level_novelty(segs, removal)?,
            });
        }
        let pooled: Vec<Segment> = levels.iter().flat_map(|(_, s)| s.iter().cloned()).collect();
        let values: Vec<f64> = rows.iter().map(|r| r.level_novelty).collect();
        Ok(NoveltyReport {
            source: source.to_string(),
            removal,
            level_novelty: Summary::of(&values),
            levels: rows,
            distinct: distinct_stats(&pooled)?,
            corners: Vec::new(),
            notes,
        })
    }

    /// Adds the corner breakdown of assembled levels.
    pub fn with_corners(mut self, levels: &[Level]) -> Self {
        let (rows, notes) = corner_breakdown(levels);
        self.corners = rows;
        self.notes.extend(notes);
        self
    }

    /// Per-level novelty rows.
    pub fn levels_csv(&self) -> String {
        let mut out = String::from("source,level,segments,level_novelty\n");
        for r in &self.levels {
            out += &format!(
                "{},{},{},{:.4}\n",
                self.source, r.name, r.segments, r.level_novelty
            );
        }
        out
    }

    /// Mean, deviation and range of level novelty.
    pub fn summary_csv(&self) -> String {
        let mut out = String::from("source,levels,ln_mean,ln_stdev,ln_min,ln_max\n");
        if let Some(s) = self.level_novelty {
            out += &format!(
                "{},{},{:.4},{:.4},{:.4},{:.4}\n",
                self.source,
                self.levels.len(),
                s.mean,
                s.stdev,
                s.min,
                s.max
            );
        }
        out
    }

    /// Segment counts and pooled novelty.
    pub fn distinct_csv(&self) -> String {
        let d = &self.distinct;
        format!(
            "source,segments,distinct,distinct_pct,novelty_all,novelty_set\n{},{},{},{:.1},{:.4},{:.4}\n",
            self.source, d.segments, d.distinct, d.distinct_pct, d.novelty_all, d.novelty_set
        )
    }

    pub fn corners_csv(&self) -> String {
        let mut out = String::from("source,corner,segments,distinct,distinct_pct,novelty_all,novelty_set\n");
        for r in &self.corners {
            let d = &r.stats;
            out += &format!(
                "{},{},{},{},{:.1},{:.4},{:.4}\n",
                self.source,
                r.segment_type.key(),
                d.segments,
                d.distinct,
                d.distinct_pct,
                d.novelty_all,
                d.novelty_set
            );
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialises") + "\n"
    }
}
