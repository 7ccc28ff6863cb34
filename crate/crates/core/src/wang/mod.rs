//! Wang tiles, patches and macro-tiles.
//!
//! Coordinates follow the usual picture of a space-time diagram: `x` grows to the
//! right and `y` grows upwards, so row `0` of a [`Patch`] is its bottom row.

mod macrotile;
mod patch;
mod tileset;

pub use macrotile::{split_interior, split_into_blocks, BlockGrid, MacroColors, MacroTile};
pub use patch::{occurrences, project_letters, validate_patch, LetterGrid, Patch, Violation};
pub use tileset::{tiles_match, ColorId, Direction, Side, Tile, TileSet};
