//! Genome decoding and level assembly.
//!
//! A genome holds ten sections of nine genes: five latent values for the
//! section's segment and four placement genes `(up, down, left, right)`
//! choosing where the next segment goes. The last section's placement genes
//! are carried but never read.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::corpus::PathAnnotation;
use crate::error::{Error, Result};
use crate::generator::{GeneratorSuite, LatentVector, LATENT_SIZE};
use crate::segment::{corner_type, Direction, Segment, SegmentType, SEGMENT_COLS, SEGMENT_ROWS};
use crate::tile::{CharMap, Passability, Tile, TileGrid};

pub const MAX_SEGMENTS: usize = 10;
pub const PLACEMENT_GENES: usize = 4;
pub const SECTION_LEN: usize = LATENT_SIZE + PLACEMENT_GENES;
pub const GENOME_LEN: usize = SECTION_LEN * MAX_SEGMENTS;

/// Real-valued genome of length 90 with every gene in `[-1, 1]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Genome(Vec<f64>);

impl Genome {
    pub fn new(genes: Vec<f64>) -> Result<Self> {
        if genes.len() != GENOME_LEN {
            return Err(Error::Contract(format!(
                "genome needs {GENOME_LEN} genes, got {}",
                genes.len()
            )));
        }
        if let Some(g) = genes.iter().find(|g| !(-1.0..=1.0).contains(*g)) {
            return Err(Error::Contract(format!("gene {g} outside [-1, 1]")));
        }
        Ok(Genome(genes))
    }

    pub fn genes(&self) -> &[f64] {
        &self.0
    }

    pub fn latent(&self, section: usize) -> LatentVector {
        let start = section * SECTION_LEN;
        LatentVector::new(&self.0[start..start + LATENT_SIZE]).expect("genome genes are in range")
    }

    /// Placement genes of a section in `(up, down, left, right)` order.
    pub fn placement(&self, section: usize) -> [f64; PLACEMENT_GENES] {
        let start = section * SECTION_LEN + LATENT_SIZE;
        self.0[start..start + PLACEMENT_GENES].try_into().unwrap()
    }
}

impl TryFrom<Vec<f64>> for Genome {
    type Error = Error;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        Genome::new(v)
    }
}

impl From<Genome> for Vec<f64> {
    fn from(g: Genome) -> Self {
        g.0
    }
}

/// Slot coordinates `(row, col)` on the unbounded layout grid.
pub type Slot = (i32, i32);

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlacementPlan {
    pub slots: Vec<Slot>,
    pub directions: Vec<Direction>,
}

impl PlacementPlan {
    pub fn len(&self) -> usize {
        self.slots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slots.is_empty()
    }

    /// Plan from an explicit move list; fails if a move revisits a slot.
    pub fn from_directions(directions: &[Direction]) -> Result<Self> {
        let mut slots = vec![(0, 0)];
        let mut seen: HashSet<Slot> = slots.iter().copied().collect();
        for d in directions {
            let (dr, dc) = d.offset();
            let &(r, c) = slots.last().unwrap();
            let next = (r + dr, c + dc);
            if !seen.insert(next) {
                return Err(Error::Contract(format!("move {d:?} revisits slot {next:?}")));
            }
            slots.push(next);
        }
        Ok(PlacementPlan {
            slots,
            directions: directions.to_vec(),
        })
    }
}

/// Places up to ten segments: each section's placement genes rank the four
/// neighbours of the current slot, and the best unoccupied one is taken.
/// Ties keep `(up, down, left, right)` order. Generation stops early when all
/// neighbours are occupied.
pub fn decode_placement(genome: &Genome) -> PlacementPlan {
    let mut slots: Vec<Slot> = vec![(0, 0)];
    let mut occupied: HashSet<Slot> = HashSet::from([(0, 0)]);
    let mut directions = Vec::new();
    for section in 0..MAX_SEGMENTS - 1 {
        let genes = genome.placement(section);
        let mut order: Vec<usize> = (0..PLACEMENT_GENES).collect();
        order.sort_by(|&a, &b| genes[b].total_cmp(&genes[a]));
        let &(r, c) = slots.last().unwrap();
        let choice = order.into_iter().map(|i| Direction::GENE_ORDER[i]).find(|d| {
            let (dr, dc) = d.offset();
            !occupied.contains(&(r + dr, c + dc))
        });
        let Some(d) = choice else { break };
        let (dr, dc) = d.offset();
        let next = (r + dr, c + dc);
        occupied.insert(next);
        slots.push(next);
        directions.push(d);
    }
    PlacementPlan { slots, directions }
}

/// Segment type for every slot: straight runs keep the directional type,
/// turns use the matching corner. The ends take the type of their only move.
pub fn route_types(plan: &PlacementPlan) -> Vec<SegmentType> {
    let n = plan.slots.len();
    let dirs = &plan.directions;
    if n <= 1 {
        return vec![SegmentType::Horizontal; n];
    }
    (0..n)
        .map(|i| {
            let entry = i.checked_sub(1).map(|j| dirs[j]);
            let exit = dirs.get(i).copied();
            match (entry, exit) {
                (None, Some(out)) => out.segment_type(),
                (Some(inn), None) => inn.segment_type(),
                (Some(inn), Some(out)) if inn == out => inn.segment_type(),
                (Some(inn), Some(out)) => corner_type(inn, out).expect("consecutive moves never reverse"),
                (None, None) => SegmentType::Horizontal,
            }
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Placement {
    pub slot: Slot,
    pub segment_type: SegmentType,
    pub segment: Segment,
}

/// An assembled level: placed segments fused into one grid, with unplaced
/// screens filled by void tiles.
#[derive(Clone, Debug, PartialEq)]
pub struct Level {
    pub placements: Vec<Placement>,
    pub grid: TileGrid,
    /// Slot at fused-grid screen `(0, 0)`.
    pub slot_origin: Slot,
    pub spawn: Option<(usize, usize)>,
    pub orb: Option<(usize, usize)>,
}

impl Level {
    /// Fuses placements (in order) into a level and places spawn and orb.
    pub fn assemble(placements: Vec<Placement>) -> Result<Self> {
        if placements.is_empty() {
            return Err(Error::Contract("level needs at least one placement".into()));
        }
        let min_r = placements.iter().map(|p| p.slot.0).min().unwrap();
        let max_r = placements.iter().map(|p| p.slot.0).max().unwrap();
        let min_c = placements.iter().map(|p| p.slot.1).min().unwrap();
        let max_c = placements.iter().map(|p| p.slot.1).max().unwrap();
        let screens_r = (max_r - min_r + 1) as usize;
        let screens_c = (max_c - min_c + 1) as usize;
        let mut grid = TileGrid::filled(screens_r * SEGMENT_ROWS, screens_c * SEGMENT_COLS, Tile::NULL);
        let mut seen = HashSet::new();
        for p in &placements {
            if !seen.insert(p.slot) {
                return Err(Error::Contract(format!("slot {:?} placed twice", p.slot)));
            }
            let r0 = (p.slot.0 - min_r) as usize * SEGMENT_ROWS;
            let c0 = (p.slot.1 - min_c) as usize * SEGMENT_COLS;
            for r in 0..SEGMENT_ROWS {
                for c in 0..SEGMENT_COLS {
                    grid.set(r0 + r, c0 + c, p.segment.get(r, c));
                }
            }
        }
        concretize_enemies(&mut grid);
        let mut level = Level {
            placements,
            grid,
            slot_origin: (min_r, min_c),
            spawn: None,
            orb: None,
        };
        level.spawn = level.find_spawn();
        level.orb = level.find_orb();
        if let Some((r, c)) = level.orb {
            level.grid.set(r, c, Tile::ORB);
        }
        Ok(level)
    }

    /// A level missing its spawn or orb can never be completed.
    pub fn is_degenerate(&self) -> bool {
        self.spawn.is_none() || self.orb.is_none()
    }

    pub fn type_trace(&self) -> Vec<SegmentType> {
        self.placements.iter().map(|p| p.segment_type).collect()
    }

    pub fn segments(&self) -> Vec<Segment> {
        self.placements.iter().map(|p| p.segment.clone()).collect()
    }

    /// Fused-grid top-left corner of a placement's screen.
    pub fn screen_origin(&self, index: usize) -> (usize, usize) {
        let slot = self.placements[index].slot;
        (
            (slot.0 - self.slot_origin.0) as usize * SEGMENT_ROWS,
            (slot.1 - self.slot_origin.1) as usize * SEGMENT_COLS,
        )
    }

    /// Corpus annotation that walks the screen window through the placed
    /// segments one tile at a time.
    pub fn path_annotation(&self) -> PathAnnotation {
        let mut slides = Vec::new();
        for w in self.placements.windows(2) {
            let (dr, dc) = (w[1].slot.0 - w[0].slot.0, w[1].slot.1 - w[0].slot.1);
            let (dir, steps) = match (dr, dc) {
                (-1, 0) => (Direction::Up, SEGMENT_ROWS),
                (1, 0) => (Direction::Down, SEGMENT_ROWS),
                (0, -1) => (Direction::Left, SEGMENT_COLS),
                _ => (Direction::Right, SEGMENT_COLS),
            };
            slides.extend(std::iter::repeat_n(dir, steps));
        }
        PathAnnotation {
            origin: self.screen_origin(0),
            slides,
        }
    }

    /// Whether a fused-grid cell belongs to a placed segment.
    pub fn is_placed(&self, row: usize, col: usize) -> bool {
        let slot = (
            (row / SEGMENT_ROWS) as i32 + self.slot_origin.0,
            (col / SEGMENT_COLS) as i32 + self.slot_origin.1,
        );
        self.placements.iter().any(|p| p.slot == slot)
    }

    fn standable(&self, r: usize, c: usize) -> bool {
        let t = self.grid.get(r, c);
        t.passability() == Passability::Passable
            && !t.is_enemy()
            && self
                .grid
                .try_get(r as i32 + 1, c as i32)
                .is_some_and(|b| b.passability() == Passability::Solid)
    }

    fn find_spawn(&self) -> Option<(usize, usize)> {
        let (r0, c0) = self.screen_origin(0);
        (r0..r0 + SEGMENT_ROWS)
            .flat_map(|r| (c0..c0 + SEGMENT_COLS).map(move |c| (r, c)))
            .find(|&(r, c)| self.standable(r, c))
    }

    fn find_orb(&self) -> Option<(usize, usize)> {
        let (r0, c0) = self.screen_origin(self.placements.len() - 1);
        (r0..r0 + SEGMENT_ROWS)
            .rev()
            .flat_map(|r| (c0..c0 + SEGMENT_COLS).rev().map(move |c| (r, c)))
            .find(|&(r, c)| self.standable(r, c))
    }

    pub fn to_document(&self) -> LevelDocument {
        let mut tiles = self.grid.clone();
        for r in 0..tiles.rows() {
            for c in 0..tiles.cols() {
                if tiles.get(r, c) == Tile::CANNON {
                    tiles.set(r, c, Tile::SOLID);
                }
            }
        }
        LevelDocument {
            format: LEVEL_FORMAT_TAG.into(),
            version: 1,
            tiles,
            spawn: self.spawn,
            orb: self.orb,
            placements: self.placements.clone(),
        }
    }

    pub fn from_document(doc: LevelDocument) -> Result<Self> {
        if doc.format != LEVEL_FORMAT_TAG {
            return Err(Error::Format(format!("unknown level format {:?}", doc.format)));
        }
        let mut level = Level::assemble(doc.placements)?;
        if level.grid.rows() != doc.tiles.rows() || level.grid.cols() != doc.tiles.cols() {
            return Err(Error::Format("tile grid does not match placements".into()));
        }
        level.grid = doc.tiles;
        level.spawn = doc.spawn;
        level.orb = doc.orb;
        Ok(level)
    }

    /// Character grid with the spawn marked `P`.
    pub fn to_text(&self, map: &CharMap) -> String {
        let mut grid = self.to_document().tiles;
        if let Some((r, c)) = self.spawn {
            grid.set(r, c, Tile::PLAYER);
        }
        grid.to_text(map)
    }
}

pub const LEVEL_FORMAT_TAG: &str = "levelgan-level";

/// Serializable level: fused integer grid, spawn and orb coordinates, and
/// the placed segments with their types in placement order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LevelDocument {
    pub format: String,
    pub version: u32,
    pub tiles: TileGrid,
    pub spawn: Option<(usize, usize)>,
    pub orb: Option<(usize, usize)>,
    pub placements: Vec<Placement>,
}

/// Generic enemies become ground enemies when standing on solid ground, wall
/// enemies when touching a solid side, and flying enemies otherwise.
pub fn concretize_enemies(grid: &mut TileGrid) {
    let solid = |g: &TileGrid, r: i32, c: i32| {
        g.try_get(r, c)
            .is_some_and(|t| t.passability() == Passability::Solid)
    };
    for r in 0..grid.rows() {
        for c in 0..grid.cols() {
            if grid.get(r, c) != Tile::GROUND_ENEMY {
                continue;
            }
            let (ri, ci) = (r as i32, c as i32);
            let t = if solid(grid, ri + 1, ci) {
                Tile::GROUND_ENEMY
            } else if solid(grid, ri, ci - 1) || solid(grid, ri, ci + 1) {
                Tile::WALL_ENEMY
            } else {
                Tile::FLYING_ENEMY
            };
            grid.set(r, c, t);
        }
    }
}

/// Decodes the genome, generates each segment with the suite and fuses the
/// result into a level.
pub fn build_level(genome: &Genome, suite: &GeneratorSuite) -> Level {
    let plan = decode_placement(genome);
    let types = route_types(&plan);
    let placements = plan
        .slots
        .iter()
        .zip(&types)
        .enumerate()
        .map(|(i, (&slot, &t))| Placement {
            slot,
            segment_type: t,
            segment: suite.generate(t, &genome.latent(i)),
        })
        .collect();
    Level::assemble(placements).expect("decoded plans have distinct slots")
}
