//! Embedded 8x8 monospace bitmap font, scaled nearest-neighbor to square cells.

use font8x8::{UnicodeFonts, BASIC_FONTS, GREEK_FONTS, LATIN_FONTS};
use image::{GrayImage, Luma};
use serde::{Deserialize, Serialize};

/// Native glyph size of the embedded font, in pixels.
pub const GLYPH_SIZE: u32 = 8;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FontId {
    /// Public-domain 8x8 font covering ASCII, Latin-1 and Greek.
    #[default]
    Font8x8,
}

impl FontId {
    /// Glyph bitmap, one byte per row with bit 0 the leftmost pixel.
    /// Characters outside the font render as `?`.
    pub fn glyph(self, ch: char) -> [u8; 8] {
        match self {
            FontId::Font8x8 => BASIC_FONTS
                .get(ch)
                .or_else(|| LATIN_FONTS.get(ch))
                .or_else(|| GREEK_FONTS.get(ch))
                .unwrap_or_else(|| BASIC_FONTS.get('?').expect("'?' is in the basic set")),
        }
    }

    /// Draws `ch` into the `cell x cell` square whose top-left corner is `(row, col)`.
    pub fn draw(self, img: &mut GrayImage, ch: char, row: u32, col: u32, cell: u32, ink: u8) {
        if cell == 0 {
            return;
        }
        let bitmap = self.glyph(ch);
        for y in 0..cell {
            let bits = bitmap[(y * GLYPH_SIZE / cell) as usize];
            if bits == 0 {
                continue;
            }
            for x in 0..cell {
                if bits & (1 << (x * GLYPH_SIZE / cell)) != 0 {
                    img.put_pixel(col + x, row + y, Luma([ink]));
                }
            }
        }
    }
}
