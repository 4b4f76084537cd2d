//! RGBA rasterisation of tile grids with an optional path overlay.

use crate::simulator::AvatarState;
use crate::tile::{Tile, TileGrid};

pub type Rgba = [u8; 4];

/// Colour of each tile code, indexed by code.
pub const PALETTE: [Rgba; 14] = [
    [24, 28, 48, 255],    // air
    [132, 112, 92, 255],  // solid
    [230, 200, 60, 255],  // ladder
    [220, 40, 40, 255],   // hazard
    [170, 130, 200, 255], // breakable
    [60, 170, 200, 255],  // moving platform
    [100, 100, 110, 255], // cannon
    [255, 255, 255, 255], // orb
    [60, 220, 90, 255],   // player
    [0, 0, 0, 255],       // void
    [40, 90, 200, 255],   // water
    [240, 120, 30, 255],  // ground enemy
    [200, 90, 160, 255],  // wall enemy
    [250, 170, 210, 255], // flying enemy
];

pub const PATH_COLOUR: Rgba = [80, 255, 255, 255];
pub const SPAWN_COLOUR: Rgba = PALETTE[Tile::PLAYER.code() as usize];

/// Row-major RGBA8 image.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Raster {
    pub width: usize,
    pub height: usize,
    pub pixels: Vec<u8>,
}

impl Raster {
    fn fill_rect(&mut self, x0: usize, y0: usize, w: usize, h: usize, colour: Rgba) {
        for y in y0..(y0 + h).min(self.height) {
            for x in x0..(x0 + w).min(self.width) {
                let i = (y * self.width + x) * 4;
                self.pixels[i..i + 4].copy_from_slice(&colour);
            }
        }
    }

    pub fn pixel(&self, x: usize, y: usize) -> Rgba {
        let i = (y * self.width + x) * 4;
        self.pixels[i..i + 4].try_into().unwrap()
    }
}

#[derive(Clone, Debug, Default)]
pub struct Overlay<'a> {
    pub path: &'a [AvatarState],
    pub spawn: Option<(usize, usize)>,
}

/// Draws each tile as a `scale`-pixel square. Path cells get a centred
/// marker half the tile size; the spawn gets a full-size marker.
pub fn render(grid: &TileGrid, scale: usize, overlay: &Overlay) -> Raster {
    let scale = scale.max(1);
    let mut img = Raster {
        width: grid.cols() * scale,
        height: grid.rows() * scale,
        pixels: vec![0; grid.rows() * grid.cols() * scale * scale * 4],
    };
    for r in 0..grid.rows() {
        for c in 0..grid.cols() {
            let colour = PALETTE[grid.get(r, c).code() as usize];
            img.fill_rect(c * scale, r * scale, scale, scale, colour);
        }
    }
    if let Some((r, c)) = overlay.spawn {
        img.fill_rect(c * scale, r * scale, scale, scale, SPAWN_COLOUR);
    }
    let inset = scale / 4;
    let size = (scale - 2 * inset).max(1);
    for s in overlay.path {
        if s.row < 0 || s.col < 0 {
            continue;
        }
        let (r, c) = (s.row as usize, s.col as usize);
        img.fill_rect(c * scale + inset, r * scale + inset, size, size, PATH_COLOUR);
    }
    img
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simulator::Mode;
    use crate::tile::CharMap;

    #[test]
    fn tiles_and_overlay_are_drawn() {
        let grid = TileGrid::parse("-H\n#Z", &CharMap::mega_man()).unwrap();
        let path = [AvatarState {
            row: 0,
            col: 0,
            mode: Mode::Grounded,
        }];
        let img = render(
            &grid,
            4,
            &Overlay {
                path: &path,
                spawn: None,
            },
        );
        assert_eq!((img.width, img.height, img.pixels.len()), (8, 8, 256));
        assert_eq!(img.pixel(0, 0), PALETTE[0]);
        assert_eq!(img.pixel(2, 2), PATH_COLOUR);
        assert_eq!(img.pixel(5, 1), PALETTE[3]);
        assert_eq!(img.pixel(1, 5), PALETTE[1]);
        assert_eq!(img.pixel(6, 6), PALETTE[7]);
    }

    #[test]
    fn palette_colours_are_distinct() {
        for (i, a) in PALETTE.iter().enumerate() {
            for b in &PALETTE[i + 1..] {
                assert_ne!(a, b);
            }
            assert_ne!(*a, PATH_COLOUR);
        }
    }
}
