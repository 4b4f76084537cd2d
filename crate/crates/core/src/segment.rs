//! Screen-sized segments, segment types and slide directions.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tile::{Tile, TileGrid};

/// Segment height in tiles.
pub const SEGMENT_ROWS: usize = 14;
/// Segment width in tiles.
pub const SEGMENT_COLS: usize = 16;
/// Tiles per segment.
pub const SEGMENT_AREA: usize = SEGMENT_ROWS * SEGMENT_COLS;

/// One screen of level content, 14 rows by 16 columns.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Segment {
    tiles: [[Tile; SEGMENT_COLS]; SEGMENT_ROWS],
}

impl Segment {
    pub fn filled(tile: Tile) -> Self {
        Segment {
            tiles: [[tile; SEGMENT_COLS]; SEGMENT_ROWS],
        }
    }

    pub fn from_tiles(tiles: [[Tile; SEGMENT_COLS]; SEGMENT_ROWS]) -> Self {
        Segment { tiles }
    }

    /// Copies the 14x16 window whose top-left corner is `(row, col)`.
    pub fn from_window(grid: &TileGrid, row: usize, col: usize) -> Result<Self> {
        if row + SEGMENT_ROWS > grid.rows() || col + SEGMENT_COLS > grid.cols() {
            return Err(Error::Extraction(format!(
                "window at ({row}, {col}) exceeds {}x{} grid",
                grid.rows(),
                grid.cols()
            )));
        }
        let mut seg = Segment::filled(Tile::AIR);
        for r in 0..SEGMENT_ROWS {
            seg.tiles[r].copy_from_slice(&grid.row(row + r)[col..col + SEGMENT_COLS]);
        }
        Ok(seg)
    }

    /// Parses exactly 14 lines of 16 characters.
    pub fn parse(text: &str, map: &crate::tile::CharMap) -> Result<Self> {
        let grid = TileGrid::parse(text, map)?;
        if grid.rows() != SEGMENT_ROWS || grid.cols() != SEGMENT_COLS {
            return Err(Error::Format(format!(
                "segment must be {SEGMENT_ROWS}x{SEGMENT_COLS}, got {}x{}",
                grid.rows(),
                grid.cols()
            )));
        }
        Segment::from_window(&grid, 0, 0)
    }

    pub fn get(&self, row: usize, col: usize) -> Tile {
        self.tiles[row][col]
    }

    pub fn set(&mut self, row: usize, col: usize, tile: Tile) {
        self.tiles[row][col] = tile;
    }

    pub fn rows(&self) -> &[[Tile; SEGMENT_COLS]; SEGMENT_ROWS] {
        &self.tiles
    }

    pub fn iter(&self) -> impl Iterator<Item = Tile> + '_ {
        self.tiles.iter().flatten().copied()
    }

    pub fn contains(&self, tile: Tile) -> bool {
        self.iter().any(|t| t == tile)
    }

    pub fn to_text(&self, map: &crate::tile::CharMap) -> String {
        let mut s = String::with_capacity(SEGMENT_ROWS * (SEGMENT_COLS + 1));
        for row in &self.tiles {
            s.extend(row.iter().map(|&t| map.encode(t)));
            s.push('\n');
        }
        s
    }
}

impl fmt::Debug for Segment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Segment [")?;
        for row in &self.tiles {
            let line: String = row
                .iter()
                .map(|t| char::from_digit(t.code() as u32, 14).unwrap_or('?'))
                .collect();
            writeln!(f, "  {line}")?;
        }
        write!(f, "]")
    }
}

/// Direction a screen window slides, or a segment is placed, in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Direction {
    Up,
    Down,
    Left,
    Right,
}

impl Direction {
    /// Gene order of the placement section.
    pub const GENE_ORDER: [Direction; 4] =
        [Direction::Up, Direction::Down, Direction::Left, Direction::Right];

    /// `(d_row, d_col)` unit offset.
    pub fn offset(self) -> (i32, i32) {
        match self {
            Direction::Up => (-1, 0),
            Direction::Down => (1, 0),
            Direction::Left => (0, -1),
            Direction::Right => (0, 1),
        }
    }

    pub fn is_horizontal(self) -> bool {
        matches!(self, Direction::Left | Direction::Right)
    }

    pub fn same_axis(self, other: Direction) -> bool {
        self.is_horizontal() == other.is_horizontal()
    }

    /// Directional segment type for travel along this direction.
    pub fn segment_type(self) -> SegmentType {
        match self {
            Direction::Left | Direction::Right => SegmentType::Horizontal,
            Direction::Up => SegmentType::Up,
            Direction::Down => SegmentType::Down,
        }
    }

    pub fn token(self) -> char {
        match self {
            Direction::Up => 'U',
            Direction::Down => 'D',
            Direction::Left => 'L',
            Direction::Right => 'R',
        }
    }
}

impl FromStr for Direction {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "U" | "u" | "Up" | "up" => Ok(Direction::Up),
            "D" | "d" | "Down" | "down" => Ok(Direction::Down),
            "L" | "l" | "Left" | "left" => Ok(Direction::Left),
            "R" | "r" | "Right" | "right" => Ok(Direction::Right),
            _ => Err(Error::Annotation(format!("unknown direction token {s:?}"))),
        }
    }
}

/// Role of a segment in a snaking level.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SegmentType {
    Horizontal,
    Up,
    Down,
    UpperLeft,
    UpperRight,
    LowerLeft,
    LowerRight,
}

impl SegmentType {
    pub const ALL: [SegmentType; 7] = [
        SegmentType::Horizontal,
        SegmentType::Up,
        SegmentType::Down,
        SegmentType::UpperLeft,
        SegmentType::UpperRight,
        SegmentType::LowerLeft,
        SegmentType::LowerRight,
    ];

    pub const CORNERS: [SegmentType; 4] = [
        SegmentType::LowerLeft,
        SegmentType::LowerRight,
        SegmentType::UpperRight,
        SegmentType::UpperLeft,
    ];

    pub fn is_corner(self) -> bool {
        !matches!(
            self,
            SegmentType::Horizontal | SegmentType::Up | SegmentType::Down
        )
    }

    /// Snake-case key used in file names and config keys.
    pub fn key(self) -> &'static str {
        match self {
            SegmentType::Horizontal => "horizontal",
            SegmentType::Up => "up",
            SegmentType::Down => "down",
            SegmentType::UpperLeft => "upper_left",
            SegmentType::UpperRight => "upper_right",
            SegmentType::LowerLeft => "lower_left",
            SegmentType::LowerRight => "lower_right",
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            SegmentType::Horizontal => "Horizontal",
            SegmentType::Up => "Up",
            SegmentType::Down => "Down",
            SegmentType::UpperLeft => "Upper Left",
            SegmentType::UpperRight => "Upper Right",
            SegmentType::LowerLeft => "Lower Left",
            SegmentType::LowerRight => "Lower Right",
        }
    }

    pub fn from_key(key: &str) -> Option<SegmentType> {
        SegmentType::ALL.into_iter().find(|t| t.key() == key)
    }
}

impl fmt::Display for SegmentType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Corner type for a path that enters moving `entry` and leaves moving `exit`.
///
/// The name gives the corner's position in the turn: entering from the left
/// and leaving upwards happens in the lower-right corner of the bend. The same
/// bend traversed in reverse has the same geometry.
pub fn corner_type(entry: Direction, exit: Direction) -> Result<SegmentType> {
    use Direction::*;
    match (entry, exit) {
        (Right, Up) | (Down, Left) => Ok(SegmentType::LowerRight),
        (Right, Down) | (Up, Left) => Ok(SegmentType::UpperRight),
        (Left, Up) | (Down, Right) => Ok(SegmentType::LowerLeft),
        (Left, Down) | (Up, Right) => Ok(SegmentType::UpperLeft),
        _ => Err(Error::Contract(format!(
            "corner needs an axis change, got {entry:?} -> {exit:?}"
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tile::CharMap;

    #[test]
    fn corner_mapping() {
        use Direction::*;
        assert_eq!(corner_type(Right, Up).unwrap(), SegmentType::LowerRight);
        assert_eq!(corner_type(Down, Left).unwrap(), SegmentType::LowerRight);
        assert_eq!(corner_type(Right, Down).unwrap(), SegmentType::UpperRight);
        assert_eq!(corner_type(Up, Left).unwrap(), SegmentType::UpperRight);
        assert_eq!(corner_type(Left, Up).unwrap(), SegmentType::LowerLeft);
        assert_eq!(corner_type(Down, Right).unwrap(), SegmentType::LowerLeft);
        assert_eq!(corner_type(Left, Down).unwrap(), SegmentType::UpperLeft);
        assert_eq!(corner_type(Up, Right).unwrap(), SegmentType::UpperLeft);
        assert!(corner_type(Right, Left).is_err());
        assert!(corner_type(Up, Up).is_err());
    }

    /// Reversing a bend swaps entry/exit and negates both; geometry is unchanged.
    #[test]
    fn reversed_bend_has_same_corner() {
        use Direction::*;
        let neg = |d: Direction| match d {
            Up => Down,
            Down => Up,
            Left => Right,
            Right => Left,
        };
        for a in Direction::GENE_ORDER {
            for b in Direction::GENE_ORDER {
                if a.same_axis(b) {
                    continue;
                }
                assert_eq!(corner_type(a, b).unwrap(), corner_type(neg(b), neg(a)).unwrap());
            }
        }
    }

    #[test]
    fn uniform_block_parses_to_solid_segment() {
        let text = format!("{}\n", "#".repeat(16)).repeat(14);
        let seg = Segment::parse(&text, &CharMap::mega_man()).unwrap();
        assert_eq!(seg, Segment::filled(Tile::SOLID));
    }

    #[test]
    fn segment_json_is_nested_lists() {
        let seg = Segment::filled(Tile::LADDER);
        let v: Vec<Vec<u8>> = serde_json::from_str(&serde_json::to_string(&seg).unwrap()).unwrap();
        assert_eq!(v.len(), 14);
        assert!(v.iter().all(|r| r.len() == 16 && r.iter().all(|&c| c == 2)));
    }
}
