//! Discrete one-tile avatar movement, A* solution paths and reachability.
//!
//! The avatar occupies a single tile and every transition costs one step.
//! Grounded avatars walk left/right, start jumps, or mount ladders. A jump
//! rises up to `jump_budget` rows, moving one column sideways at most per
//! step, until it is released into a fall. Falling avatars drift at most one
//! column per row and land on solid ground. Entering a hazard, a void tile,
//! or leaving the grid is death, so such moves are never generated.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::assembly::Level;
use crate::tile::{Passability, TileGrid};

pub const DEFAULT_JUMP_BUDGET: u8 = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Mode {
    Grounded,
    /// Rising with this many upward steps left.
    Rising(u8),
    Falling,
    Climbing,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct AvatarState {
    pub row: i32,
    pub col: i32,
    pub mode: Mode,
}

impl AvatarState {
    pub fn pos(&self) -> (i32, i32) {
        (self.row, self.col)
    }
}

/// Movement rules over a tile grid.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MovementModel {
    pub jump_budget: u8,
}

impl Default for MovementModel {
    fn default() -> Self {
        MovementModel {
            jump_budget: DEFAULT_JUMP_BUDGET,
        }
    }
}

fn class(grid: &TileGrid, r: i32, c: i32) -> Passability {
    grid.try_get(r, c).map_or(Passability::Void, |t| t.passability())
}

fn enterable(grid: &TileGrid, r: i32, c: i32) -> bool {
    class(grid, r, c).is_traversable()
}

impl MovementModel {
    pub fn new(jump_budget: u8) -> Self {
        MovementModel { jump_budget }
    }

    /// Standing is possible on solid ground, on a ladder, or on top of one.
    pub fn supported(&self, grid: &TileGrid, r: i32, c: i32) -> bool {
        let below = class(grid, r + 1, c);
        below == Passability::Solid || below == Passability::Climb || class(grid, r, c) == Passability::Climb
    }

    fn settle(&self, grid: &TileGrid, r: i32, c: i32) -> AvatarState {
        let mode = if self.supported(grid, r, c) {
            Mode::Grounded
        } else {
            Mode::Falling
        };
        AvatarState { row: r, col: c, mode }
    }

    /// Initial state at a spawn position.
    pub fn start(&self, grid: &TileGrid, pos: (usize, usize)) -> AvatarState {
        self.settle(grid, pos.0 as i32, pos.1 as i32)
    }

    pub fn successors(&self, grid: &TileGrid, s: AvatarState) -> Vec<AvatarState> {
        let mut out = Vec::with_capacity(6);
        self.for_each_successor(grid, s, |n| out.push(n));
        out
    }

    fn for_each_successor(&self, grid: &TileGrid, s: AvatarState, mut emit: impl FnMut(AvatarState)) {
        let (r, c) = (s.row, s.col);
        let at = |row, col, mode| AvatarState { row, col, mode };
        match s.mode {
            Mode::Grounded => {
                for dc in [-1, 1] {
                    if enterable(grid, r, c + dc) {
                        emit(self.settle(grid, r, c + dc));
                    }
                }
                if self.jump_budget > 0 {
                    for dc in [-1, 0, 1] {
                        if enterable(grid, r - 1, c + dc) {
                            emit(at(r - 1, c + dc, Mode::Rising(self.jump_budget - 1)));
                        }
                    }
                }
                if class(grid, r, c) == Passability::Climb {
                    emit(at(r, c, Mode::Climbing));
                }
                if class(grid, r + 1, c) == Passability::Climb {
                    emit(at(r + 1, c, Mode::Climbing));
                }
            }
            Mode::Rising(budget) => {
                if budget > 0 {
                    for dc in [-1, 0, 1] {
                        if enterable(grid, r - 1, c + dc) {
                            emit(at(r - 1, c + dc, Mode::Rising(budget - 1)));
                        }
                    }
                }
                emit(at(r, c, Mode::Falling));
            }
            Mode::Falling => {
                if self.supported(grid, r, c) {
                    emit(at(r, c, Mode::Grounded));
                } else {
                    for dc in [-1, 0, 1] {
                        let t = class(grid, r + 1, c + dc);
                        if t.is_traversable() {
                            let mode = if t == Passability::Climb {
                                Mode::Climbing
                            } else {
                                Mode::Falling
                            };
                            emit(at(r + 1, c + dc, mode));
                        }
                    }
                }
            }
            Mode::Climbing => {
                for dr in [-1, 1] {
                    let t = class(grid, r + dr, c);
                    if t == Passability::Climb {
                        emit(at(r + dr, c, Mode::Climbing));
                    } else if t.is_traversable() {
                        emit(self.settle(grid, r + dr, c));
                    }
                }
                for dc in [-1, 1] {
                    if enterable(grid, r, c + dc) {
                        emit(self.settle(grid, r, c + dc));
                    }
                }
            }
        }
    }

    /// True when every consecutive pair of states is a legal move and no
    /// state sits on a lethal or void tile.
    pub fn is_valid_path(&self, grid: &TileGrid, path: &[AvatarState]) -> bool {
        path.iter().all(|s| enterable(grid, s.row, s.col))
            && path
                .windows(2)
                .all(|w| self.successors(grid, w[0]).contains(&w[1]))
    }

    fn modes(&self) -> usize {
        3 + self.jump_budget as usize
    }

    fn mode_index(mode: Mode) -> usize {
        match mode {
            Mode::Grounded => 0,
            Mode::Falling => 1,
            Mode::Climbing => 2,
            Mode::Rising(b) => 3 + b as usize,
        }
    }

    fn state_index(&self, grid: &TileGrid, s: AvatarState) -> usize {
        ((s.row as usize * grid.cols()) + s.col as usize) * self.modes() + Self::mode_index(s.mode)
    }

    fn state_count(&self, grid: &TileGrid) -> usize {
        grid.rows() * grid.cols() * self.modes()
    }
}

/// Outcome of a solution search. `length` is -1 when the goal is unreachable.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Solution {
    pub length: i32,
    pub path: Vec<AvatarState>,
}

impl Solution {
    pub fn unreachable() -> Self {
        Solution {
            length: -1,
            path: Vec::new(),
        }
    }
}

/// Admissible step-count heuristic: every move changes each coordinate by at
/// most one, so the Chebyshev distance never overestimates.
pub fn step_lower_bound(a: (i32, i32), b: (i32, i32)) -> i32 {
    (a.0 - b.0).abs().max((a.1 - b.1).abs())
}

/// A* from `start` to any state at `goal`. Ties on `f` prefer the smaller
/// heuristic, then insertion order.
pub fn astar(model: &MovementModel, grid: &TileGrid, start: AvatarState, goal: (i32, i32)) -> Solution {
    if !enterable(grid, start.row, start.col) {
        return Solution::unreachable();
    }
    let n = model.state_count(grid);
    let mut g_cost = vec![u32::MAX; n];
    let mut parent = vec![usize::MAX; n];
    let mut closed = vec![false; n];
    let mut heap = BinaryHeap::new();
    let mut seq = 0u64;

    let si = model.state_index(grid, start);
    g_cost[si] = 0;
    let h = step_lower_bound(start.pos(), goal) as u32;
    heap.push(Reverse((h, h, seq, si)));

    while let Some(Reverse((_, _, _, idx))) = heap.pop() {
        if closed[idx] {
            continue;
        }
        closed[idx] = true;
        let state = decode_state(model, grid, idx);
        if state.pos() == goal {
            let mut path = vec![state];
            let mut cur = idx;
            while parent[cur] != usize::MAX {
                cur = parent[cur];
                path.push(decode_state(model, grid, cur));
            }
            path.reverse();
            return Solution {
                length: g_cost[idx] as i32,
                path,
            };
        }
        let g = g_cost[idx];
        model.for_each_successor(grid, state, |next| {
            let ni = model.state_index(grid, next);
            if !closed[ni] && g + 1 < g_cost[ni] {
                g_cost[ni] = g + 1;
                parent[ni] = idx;
                seq += 1;
                let h = step_lower_bound(next.pos(), goal) as u32;
                heap.push(Reverse((g + 1 + h, h, seq, ni)));
            }
        });
    }
    Solution::unreachable()
}

fn decode_state(model: &MovementModel, grid: &TileGrid, idx: usize) -> AvatarState {
    let modes = model.modes();
    let m = idx % modes;
    let cell = idx / modes;
    let mode = match m {
        0 => Mode::Grounded,
        1 => Mode::Falling,
        2 => Mode::Climbing,
        b => Mode::Rising((b - 3) as u8),
    };
    AvatarState {
        row: (cell / grid.cols()) as i32,
        col: (cell % grid.cols()) as i32,
        mode,
    }
}

/// Every state reachable from `start`, in breadth-first order, with its step
/// distance.
pub fn reachable_states(
    model: &MovementModel,
    grid: &TileGrid,
    start: AvatarState,
) -> Vec<(AvatarState, u32)> {
    if !enterable(grid, start.row, start.col) {
        return Vec::new();
    }
    let n = model.state_count(grid);
    let mut seen = vec![false; n];
    let mut queue = VecDeque::new();
    let mut out = Vec::new();
    seen[model.state_index(grid, start)] = true;
    queue.push_back((start, 0u32));
    while let Some((s, d)) = queue.pop_front() {
        out.push((s, d));
        model.for_each_successor(grid, s, |next| {
            let ni = model.state_index(grid, next);
            if !seen[ni] {
                seen[ni] = true;
                queue.push_back((next, d + 1));
            }
        });
    }
    out
}

/// Shortest solution from the level's spawn to its orb.
pub fn solve(model: &MovementModel, level: &Level) -> Solution {
    let (Some(spawn), Some(orb)) = (level.spawn, level.orb) else {
        return Solution::unreachable();
    };
    let start = model.start(&level.grid, spawn);
    astar(model, &level.grid, start, (orb.0 as i32, orb.1 as i32))
}

/// Fraction of traversable tiles inside placed segments that the avatar can
/// occupy starting from the spawn. Zero when there are no traversable tiles
/// or no spawn.
pub fn connectivity(model: &MovementModel, level: &Level) -> f64 {
    let grid = &level.grid;
    let mut traversable = vec![false; grid.rows() * grid.cols()];
    let mut total = 0usize;
    for r in 0..grid.rows() {
        for c in 0..grid.cols() {
            if grid.get(r, c).passability().is_traversable() && level.is_placed(r, c) {
                traversable[r * grid.cols() + c] = true;
                total += 1;
            }
        }
    }
    if total == 0 {
        return 0.0;
    }
    let Some(spawn) = level.spawn else { return 0.0 };
    let mut reached = vec![false; traversable.len()];
    let mut count = 0usize;
    for (s, _) in reachable_states(model, grid, model.start(grid, spawn)) {
        let i = s.row as usize * grid.cols() + s.col as usize;
        if traversable[i] && !reached[i] {
            reached[i] = true;
            count += 1;
        }
    }
    count as f64 / total as f64
}

/// The two maximised objectives of a level.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitnessVector {
    /// A* solution length, or -1 when the orb is unreachable.
    pub path_length: i32,
    pub connectivity: f64,
}

impl FitnessVector {
    /// Score assigned to individuals whose evaluation failed.
    pub const FAILED: FitnessVector = FitnessVector {
        path_length: -1,
        connectivity: 0.0,
    };

    pub fn objectives(&self) -> [f64; 2] {
        [self.path_length as f64, self.connectivity]
    }
}

pub fn evaluate(model: &MovementModel, level: &Level) -> FitnessVector {
    FitnessVector {
        path_length: solve(model, level).length,
        connectivity: connectivity(model, level),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assembly::Placement;
    use crate::segment::{Segment, SegmentType};
    use crate::tile::{CharMap, Tile};

    fn grid(rows: &[&str]) -> TileGrid {
        TileGrid::parse(&rows.join("\n"), &CharMap::mega_man()).unwrap()
    }

    fn state(row: i32, col: i32, mode: Mode) -> AvatarState {
        AvatarState { row, col, mode }
    }

    #[test]
    fn grounded_steps_right_on_floor() {
        let g = grid(&["---", "---", "###"]);
        let m = MovementModel::default();
        let succ = m.successors(&g, state(1, 1, Mode::Grounded));
        assert!(succ.contains(&state(1, 2, Mode::Grounded)));
        assert!(succ.contains(&state(1, 0, Mode::Grounded)));
    }

    #[test]
    fn walking_off_a_ledge_starts_a_fall() {
        let g = grid(&["---", "---", "#--"]);
        let succ = MovementModel::default().successors(&g, state(1, 0, Mode::Grounded));
        assert!(succ.contains(&state(1, 1, Mode::Falling)));
    }

    /// Maximum rows gained by any rising chain from a grounded start.
    fn max_ascent(m: &MovementModel, g: &TileGrid, start: AvatarState) -> i32 {
        reachable_states(m, g, start)
            .into_iter()
            .filter(|(s, _)| matches!(s.mode, Mode::Rising(_)))
            .map(|(s, _)| start.row - s.row)
            .max()
            .unwrap_or(0)
    }

    #[test]
    fn jump_height_is_limited_by_ceiling_and_budget() {
        // Column 1 is enclosed; the avatar stands on row 6 with `gap` air rows above.
        for gap in 1..=6usize {
            let mut rows = vec!["###".to_string()];
            for _ in 0..gap {
                rows.push("#-#".into());
            }
            rows.push("#-#".into());
            rows.push("###".into());
            let refs: Vec<&str> = rows.iter().map(String::as_str).collect();
            let g = grid(&refs);
            let m = MovementModel::new(4);
            let start = state(gap as i32 + 1, 1, Mode::Grounded);
            assert_eq!(max_ascent(&m, &g, start), gap.min(4) as i32, "gap {gap}");
        }
    }

    #[test]
    fn falling_above_hazard_prunes_only_the_lethal_cell() {
        let g = grid(&["---", "---", "-H-", "###"]);
        let succ = MovementModel::default().successors(&g, state(1, 1, Mode::Falling));
        assert!(!succ.iter().any(|s| s.pos() == (2, 1)));
        assert!(succ.contains(&state(2, 0, Mode::Falling)));
        assert!(succ.contains(&state(2, 2, Mode::Falling)));
    }

    #[test]
    fn falling_out_of_the_grid_is_death() {
        let g = grid(&["---", "---"]);
        let succ = MovementModel::default().successors(&g, state(1, 1, Mode::Falling));
        assert!(succ.is_empty());
    }

    #[test]
    fn ladder_mount_and_climb() {
        let g = grid(&["-|-", "-|-", "-|-", "###"]);
        let m = MovementModel::default();
        let succ = m.successors(&g, state(2, 1, Mode::Grounded));
        assert!(succ.contains(&state(2, 1, Mode::Climbing)));
        let succ = m.successors(&g, state(1, 1, Mode::Climbing));
        assert!(succ.contains(&state(0, 1, Mode::Climbing)));
        assert!(succ.contains(&state(2, 1, Mode::Climbing)));
        // Climbing off the top of the ladder stands on it.
        let g = grid(&["---", "-|-", "-|-", "###"]);
        let succ = m.successors(&g, state(1, 1, Mode::Climbing));
        assert!(succ.contains(&state(0, 1, Mode::Grounded)));
    }

    fn single(segment: Segment) -> Level {
        Level::assemble(vec![Placement {
            slot: (0, 0),
            segment_type: SegmentType::Horizontal,
            segment,
        }])
        .unwrap()
    }

    fn corridor() -> Segment {
        let mut s = Segment::filled(Tile::AIR);
        for c in 0..16 {
            s.set(13, c, Tile::SOLID);
            s.set(0, c, Tile::SOLID);
        }
        s
    }

    #[test]
    fn flat_corridor_takes_fifteen_steps() {
        let level = single(corridor());
        assert_eq!(level.spawn, Some((12, 0)));
        assert_eq!(level.orb, Some((12, 15)));
        let sol = solve(&MovementModel::default(), &level);
        assert_eq!(sol.length, 15);
        assert_eq!(sol.path.len(), 16);
        assert!(MovementModel::default().is_valid_path(&level.grid, &sol.path));
        // Jumps reach four rows above the floor: rows 8..=12 of 12 interior rows.
        let c = connectivity(&MovementModel::default(), &level);
        assert!((c - 5.0 / 12.0).abs() < 1e-12, "{c}");
    }

    #[test]
    fn sealed_orb_is_unreachable() {
        let mut s = corridor();
        for r in 1..13 {
            s.set(r, 8, Tile::SOLID);
        }
        let level = single(s);
        assert_eq!(solve(&MovementModel::default(), &level).length, -1);
        // Spawn half: columns 0..8, rows 8..=12, out of 15 x 12 open tiles.
        let c = connectivity(&MovementModel::default(), &level);
        assert!((c - (8.0 * 5.0) / (15.0 * 12.0)).abs() < 1e-12, "{c}");
    }

    #[test]
    fn adding_a_wall_does_not_raise_corridor_connectivity() {
        let m = MovementModel::default();
        let open = connectivity(&m, &single(corridor()));
        let mut walled = corridor();
        for r in 1..13 {
            walled.set(r, 4, Tile::SOLID);
        }
        assert!(connectivity(&m, &single(walled)) < open);
    }

    #[test]
    fn spawn_on_orb_is_zero_steps() {
        let g = grid(&["---", "###"]);
        let m = MovementModel::default();
        let s = m.start(&g, (0, 1));
        assert_eq!(astar(&m, &g, s, (0, 1)).length, 0);
    }

    #[test]
    fn all_solid_level_has_zero_connectivity() {
        let level = single(Segment::filled(Tile::SOLID));
        assert_eq!(connectivity(&MovementModel::default(), &level), 0.0);
        assert_eq!(solve(&MovementModel::default(), &level).length, -1);
    }
}
