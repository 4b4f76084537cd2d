//! Tile alphabet, character mapping and rectangular tile grids.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Integer tile code as used in the JSON datasets (0..=13).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize)]
#[serde(transparent)]
pub struct Tile(u8);

impl<'de> Deserialize<'de> for Tile {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        Tile::new(u8::deserialize(d)?).map_err(serde::de::Error::custom)
    }
}

impl Tile {
    pub const AIR: Tile = Tile(0);
    pub const SOLID: Tile = Tile(1);
    pub const LADDER: Tile = Tile(2);
    pub const HAZARD: Tile = Tile(3);
    pub const BREAKABLE: Tile = Tile(4);
    pub const MOVING_PLATFORM: Tile = Tile(5);
    pub const CANNON: Tile = Tile(6);
    pub const ORB: Tile = Tile(7);
    pub const PLAYER: Tile = Tile(8);
    pub const NULL: Tile = Tile(9);
    pub const WATER: Tile = Tile(10);
    pub const GROUND_ENEMY: Tile = Tile(11);
    pub const WALL_ENEMY: Tile = Tile(12);
    pub const FLYING_ENEMY: Tile = Tile(13);

    /// Largest valid code.
    pub const MAX: u8 = 13;
    /// Number of one-hot channels a generator produces (codes 0..12).
    pub const CHANNELS: usize = 12;

    pub fn new(code: u8) -> Result<Tile> {
        if code <= Self::MAX {
            Ok(Tile(code))
        } else {
            Err(Error::InvalidTile(code))
        }
    }

    pub const fn code(self) -> u8 {
        self.0
    }

    /// Codes that never occur in training data: orb, player, wall and flying enemies.
    pub fn allowed_in_training(self) -> bool {
        !matches!(self.0, 7 | 8 | 12 | 13)
    }

    pub fn is_enemy(self) -> bool {
        matches!(self.0, 11..=13)
    }

    pub fn passability(self) -> Passability {
        match self.0 {
            1 | 4 | 5 | 6 => Passability::Solid,
            2 => Passability::Climb,
            3 => Passability::Lethal,
            9 => Passability::Void,
            _ => Passability::Passable,
        }
    }
}

impl fmt::Display for Tile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl TryFrom<u8> for Tile {
    type Error = Error;
    fn try_from(code: u8) -> Result<Self> {
        Tile::new(code)
    }
}

/// Movement class of a tile for the simulator.
///
/// Water and all enemy codes are plain [`Passability::Passable`]; moving
/// platforms, breakables and cannons are static solids.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Passability {
    Solid,
    Climb,
    Lethal,
    Void,
    Passable,
}

impl Passability {
    /// Tiles the avatar may occupy.
    pub fn is_traversable(self) -> bool {
        matches!(self, Passability::Passable | Passability::Climb)
    }
}

/// Character to tile code mapping for text level files.
#[derive(Clone, Debug)]
pub struct CharMap {
    decode: HashMap<char, Tile>,
    encode: [char; 14],
}

impl CharMap {
    /// Mega Man mapping, including the characters used by the enhanced corpus
    /// for water (`W`), generic enemies (`E`/`G`) and the level orb (`Z`).
    ///
    /// The player spawn `P` decodes to air.
    pub fn mega_man() -> Self {
        let decode = [
            ('-', Tile::AIR),
            ('#', Tile::SOLID),
            ('|', Tile::LADDER),
            ('H', Tile::HAZARD),
            ('B', Tile::BREAKABLE),
            ('M', Tile::MOVING_PLATFORM),
            ('C', Tile::CANNON),
            ('Z', Tile::ORB),
            ('P', Tile::AIR),
            ('@', Tile::NULL),
            ('W', Tile::WATER),
            ('E', Tile::GROUND_ENEMY),
            ('G', Tile::GROUND_ENEMY),
            ('X', Tile::WALL_ENEMY),
            ('F', Tile::FLYING_ENEMY),
        ]
        .into_iter()
        .collect();
        let encode = [
            '-', '#', '|', 'H', 'B', 'M', 'C', 'Z', 'P', '@', 'W', 'G', 'X', 'F',
        ];
        CharMap { decode, encode }
    }

    pub fn decode(&self, c: char) -> Option<Tile> {
        self.decode.get(&c).copied()
    }

    pub fn encode(&self, tile: Tile) -> char {
        self.encode[tile.code() as usize]
    }

    /// Adds or replaces a decode entry.
    pub fn insert(&mut self, c: char, tile: Tile) {
        self.decode.insert(c, tile);
    }
}

impl Default for CharMap {
    fn default() -> Self {
        Self::mega_man()
    }
}

/// Row-major rectangular grid of tiles. Row 0 is the top.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TileGrid {
    rows: usize,
    cols: usize,
    cells: Vec<Tile>,
}

impl TileGrid {
    pub fn filled(rows: usize, cols: usize, tile: Tile) -> Self {
        TileGrid {
            rows,
            cols,
            cells: vec![tile; rows * cols],
        }
    }

    pub fn from_rows(rows: Vec<Vec<Tile>>) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if let Some((r, row)) = rows.iter().enumerate().find(|(_, row)| row.len() != cols) {
            return Err(Error::Format(format!(
                "row {r} has {} columns, expected {cols}",
                row.len()
            )));
        }
        let n = rows.len();
        Ok(TileGrid {
            rows: n,
            cols,
            cells: rows.into_iter().flatten().collect(),
        })
    }

    /// Parses a character grid. Trailing `\r` is ignored; blank trailing lines are dropped.
    pub fn parse(text: &str, map: &CharMap) -> Result<Self> {
        let lines: Vec<&str> = text.lines().map(|l| l.trim_end_matches('\r')).collect::<Vec<_>>();
        let end = lines.iter().rposition(|l| !l.is_empty()).map_or(0, |i| i + 1);
        let lines = &lines[..end];
        if lines.is_empty() {
            return Err(Error::Format("empty level".into()));
        }
        let cols = lines[0].chars().count();
        let mut cells = Vec::with_capacity(lines.len() * cols);
        for (row, line) in lines.iter().enumerate() {
            let width = line.chars().count();
            if width != cols {
                return Err(Error::Format(format!(
                    "ragged input: row {row} has {width} characters, expected {cols}"
                )));
            }
            for (col, c) in line.chars().enumerate() {
                let tile = map.decode(c).ok_or(Error::UnknownChar { ch: c, row, col })?;
                cells.push(tile);
            }
        }
        Ok(TileGrid {
            rows: lines.len(),
            cols,
            cells,
        })
    }

    /// Inverse of [`TileGrid::parse`]; one line per row, newline terminated.
    pub fn to_text(&self, map: &CharMap) -> String {
        let mut out = String::with_capacity(self.rows * (self.cols + 1));
        for r in 0..self.rows {
            out.extend(self.row(r).iter().map(|&t| map.encode(t)));
            out.push('\n');
        }
        out
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, row: usize, col: usize) -> Tile {
        self.cells[row * self.cols + col]
    }

    /// Bounds-checked lookup with signed coordinates.
    pub fn try_get(&self, row: i32, col: i32) -> Option<Tile> {
        if row < 0 || col < 0 || row as usize >= self.rows || col as usize >= self.cols {
            None
        } else {
            Some(self.get(row as usize, col as usize))
        }
    }

    pub fn set(&mut self, row: usize, col: usize, tile: Tile) {
        self.cells[row * self.cols + col] = tile;
    }

    pub fn row(&self, row: usize) -> &[Tile] {
        &self.cells[row * self.cols..(row + 1) * self.cols]
    }

    pub fn cells(&self) -> &[Tile] {
        &self.cells
    }

    pub fn to_rows(&self) -> Vec<Vec<Tile>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }
}

impl Serialize for TileGrid {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_rows().serialize(s)
    }
}

impl<'de> Deserialize<'de> for TileGrid {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rows = Vec::<Vec<Tile>>::deserialize(d)?;
        TileGrid::from_rows(rows).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn passability_classes() {
        assert_eq!(Tile::HAZARD.passability(), Passability::Lethal);
        assert_eq!(Tile::GROUND_ENEMY.passability(), Passability::Passable);
        assert_eq!(Tile::WATER.passability(), Passability::Passable);
        assert_eq!(Tile::LADDER.passability(), Passability::Climb);
        assert_eq!(Tile::NULL.passability(), Passability::Void);
        for t in [Tile::SOLID, Tile::BREAKABLE, Tile::MOVING_PLATFORM, Tile::CANNON] {
            assert_eq!(t.passability(), Passability::Solid);
        }
    }

    #[test]
    fn out_of_range_code_rejected() {
        assert!(Tile::new(14).is_err());
        assert!(Tile::new(13).is_ok());
    }

    #[test]
    fn spawn_char_becomes_air() {
        let g = TileGrid::parse("-P#\n###\n", &CharMap::mega_man()).unwrap();
        assert_eq!(g.get(0, 1), Tile::AIR);
        assert_eq!(g.get(0, 2), Tile::SOLID);
    }

    #[test]
    fn unknown_char_reports_position() {
        let err = TileGrid::parse("--\n-?\n", &CharMap::mega_man()).unwrap_err();
        match err {
            Error::UnknownChar { ch, row, col } => assert_eq!((ch, row, col), ('?', 1, 1)),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn ragged_rows_are_format_errors() {
        let mut text = String::new();
        for r in 0..14 {
            text.push_str(&"#".repeat(if r == 5 { 16 } else { 17 }));
            text.push('\n');
        }
        assert!(matches!(
            TileGrid::parse(&text, &CharMap::mega_man()),
            Err(Error::Format(_))
        ));
    }

    #[test]
    fn charmap_encode_inverts_decode() {
        let map = CharMap::mega_man();
        for code in 0..=Tile::MAX {
            let t = Tile::new(code).unwrap();
            if t == Tile::PLAYER {
                continue;
            }
            assert_eq!(map.decode(map.encode(t)), Some(t), "code {code}");
        }
    }
}
