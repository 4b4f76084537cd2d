//! Hand-authored segment libraries for the stub generators.
//!
//! All segments share one connection convention so that type-correct
//! neighbours always join up:
//!
//! * horizontal openings are the full interior height (rows 1..=12) of the
//!   left and/or right edge, with the floor on row 13;
//! * vertical openings are columns 6..=9 of the top and/or bottom row, with a
//!   ladder in column 7 wherever the path climbs.
//!
//! Every other border tile is solid, so a segment placed with the wrong type
//! walls off the path.

use crate::segment::{Segment, SegmentType};
use crate::tile::CharMap;

const HORIZONTAL: &[[&str; 14]] = &[
    [
        "################",
        "----------------",
        "----------------",
        "----------------",
        "----------------",
        "----------------",
        "----------------",
        "----------------",
        "----------------",
        "----------------",
        "----------------",
        "----------------",
        "----------------",
        "################",
    ],
    [
        "################",
        "----------------",
        "----------------",
        "----------------",
        "----------------",
        "----------------",
        "----------------",
        "----------------",
        "----------------",
        "----------------",
        "----------------",
        "-------##-------",
        "-------##-------",
        "################",
    ],
    [
        "################",
        "----------------",
        "----------------",
        "----------------",
        "----------------",
        "----------------",
        "----------------",
        "----------------",
        "----------------",
        "----------------",
        "----------------",
        "----------------",
        "----------------",
        "######HHH#######",
    ],
    [
        "################",
        "----------------",
        "----------------",
        "----------------",
        "----------------",
        "----------------",
        "----------------",
        "----------------",
        "----------------",
        "----------------",
        "---------#######",
        "---------#######",
        "---------#######",
        "################",
    ],
    [
        "################",
        "----------------",
        "----------------",
        "----------------",
        "----------------",
        "----------E-----",
        "----------------",
        "----------------",
        "----------------",
        "----#####-------",
        "----------------",
        "----------------",
        "-----------E----",
        "################",
    ],
];

const UP: &[[&str; 14]] = &[
    [
        "######-|--######",
        "####---|----####",
        "####---|----####",
        "####---|----####",
        "####---|----####",
        "####---|----####",
        "####---|----####",
        "####---|----####",
        "####---|----####",
        "####---|----####",
        "####---|----####",
        "####---|----####",
        "####---|----####",
        "######-|--######",
    ],
    [
        "######-|--######",
        "####---|----####",
        "####---|----####",
        "####---|----####",
        "####---|---E####",
        "####---|--######",
        "####---|----####",
        "####---|----####",
        "####---|----####",
        "######-|----####",
        "####---|----####",
        "####---|----####",
        "####---|----####",
        "######-|--######",
    ],
    [
        "######-|--######",
        "####---|----####",
        "####---|----####",
        "####---|----####",
        "####---|----####",
        "####---|----####",
        "####---|---H####",
        "####---|----####",
        "####E--|----####",
        "#####--|----####",
        "####---|----####",
        "####---|----####",
        "####---|----####",
        "######-|--######",
    ],
];

const DOWN: &[[&str; 14]] = &[
    [
        "######----######",
        "####--------####",
        "####--------####",
        "####--------####",
        "####--------####",
        "####--------####",
        "####--------####",
        "####--------####",
        "####--------####",
        "####--------####",
        "####--------####",
        "####--------####",
        "####--------####",
        "######----######",
    ],
    [
        "######----######",
        "####--------####",
        "####--------####",
        "####--------####",
        "######------####",
        "####--------####",
        "####--------####",
        "####--------####",
        "####------######",
        "####--------####",
        "####--------####",
        "####--------####",
        "####--------####",
        "######----######",
    ],
    [
        "######----######",
        "####--------####",
        "####--------####",
        "####--------####",
        "####--------####",
        "####--------####",
        "####------E-####",
        "####--------####",
        "####--------####",
        "####--------####",
        "######------####",
        "####--------####",
        "####--------####",
        "######----######",
    ],
];

const UPPER_LEFT: &[[&str; 14]] = &[
    [
        "################",
        "#---------------",
        "#---------------",
        "#---------------",
        "#---------------",
        "#---------------",
        "#---------------",
        "#---------------",
        "#------|########",
        "#------|--------",
        "#------|--------",
        "#------|--------",
        "#------|--------",
        "######-|--######",
    ],
    [
        "################",
        "#---------------",
        "#---------------",
        "#---------------",
        "#-----------E---",
        "#---------------",
        "#---------------",
        "#---------------",
        "#------|########",
        "#------|--------",
        "#------|--------",
        "#------|-----#--",
        "#E-----|-----#--",
        "######-|--######",
    ],
];

const UPPER_RIGHT: &[[&str; 14]] = &[
    [
        "################",
        "---------------#",
        "---------------#",
        "---------------#",
        "---------------#",
        "---------------#",
        "---------------#",
        "---------------#",
        "#######|-------#",
        "-------|-------#",
        "-------|-------#",
        "-------|-------#",
        "-------|-------#",
        "######-|--######",
    ],
    [
        "################",
        "---------------#",
        "---------------#",
        "---------------#",
        "---E-----------#",
        "---------------#",
        "---------------#",
        "---------------#",
        "#######|-------#",
        "-------|-------#",
        "-------|-------#",
        "--#----|-------#",
        "--#----|------E#",
        "######-|--######",
    ],
];

const LOWER_LEFT: &[[&str; 14]] = &[
    [
        "######-|--######",
        "#------|--------",
        "#------|--------",
        "#------|--------",
        "#------|--------",
        "#------|--------",
        "#------|--------",
        "#------|--------",
        "#------|--------",
        "#------|--------",
        "#------|--------",
        "#------|--------",
        "#------|--------",
        "################",
    ],
    [
        "######-|--######",
        "#------|--------",
        "#------|--------",
        "#------|--------",
        "#------|--------",
        "#------|-----E--",
        "#------|--------",
        "#------|--------",
        "#------|--------",
        "#------|--------",
        "#------|--------",
        "#E-----|-----#--",
        "#------|-----#--",
        "################",
    ],
];

const LOWER_RIGHT: &[[&str; 14]] = &[
    [
        "######-|--######",
        "-------|-------#",
        "-------|-------#",
        "-------|-------#",
        "-------|-------#",
        "-------|-------#",
        "-------|-------#",
        "-------|-------#",
        "-------|-------#",
        "-------|-------#",
        "-------|-------#",
        "-------|-------#",
        "-------|-------#",
        "################",
    ],
    [
        "######-|--######",
        "-------|-------#",
        "-------|-------#",
        "-------|-------#",
        "-------|-------#",
        "--E----|-------#",
        "-------|-------#",
        "-------|-------#",
        "-------|-------#",
        "-------|-------#",
        "-------|-------#",
        "--#----|------E#",
        "--#----|-------#",
        "################",
    ],
];

fn build(rows: &[[&str; 14]]) -> Vec<Segment> {
    let map = CharMap::mega_man();
    rows.iter()
        .map(|r| Segment::parse(&r.join("\n"), &map).expect("stub segment is well formed"))
        .collect()
}

/// Type-correct library for one MultiGAN stub generator.
pub fn library(segment_type: SegmentType) -> Vec<Segment> {
    build(match segment_type {
        SegmentType::Horizontal => HORIZONTAL,
        SegmentType::Up => UP,
        SegmentType::Down => DOWN,
        SegmentType::UpperLeft => UPPER_LEFT,
        SegmentType::UpperRight => UPPER_RIGHT,
        SegmentType::LowerLeft => LOWER_LEFT,
        SegmentType::LowerRight => LOWER_RIGHT,
    })
}

/// All libraries concatenated in [`SegmentType::ALL`] order; the OneGAN stub.
pub fn union_library() -> Vec<Segment> {
    SegmentType::ALL.into_iter().flat_map(library).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tile::Tile;

    #[test]
    fn libraries_parse_and_are_training_valid() {
        for t in SegmentType::ALL {
            let lib = library(t);
            assert!(!lib.is_empty());
            for s in &lib {
                assert!(s.iter().all(Tile::allowed_in_training), "{t}: {s:?}");
            }
        }
        assert_eq!(union_library().len(), 19);
    }
}
