//! The 16-colour RGBI model and its reduction to four grey shades.
//!
//! Three transforms are chained to turn a 4-bit colour into two bits of
//! reference information:
//!
//! * colour number -> return code: swap bit 0 and bit 2 (an involution),
//! * return code -> grey shade: propagate the intensity bit through a
//!   three-step left shift, leaving `0`, `7`, `8` and `15` untouched,
//! * grey shade -> 2-bit code: keep the top two bits of the shade.
//!
//! Every transform is a 16-entry lookup table. The tables were generated from
//! the bit-level procedures, which live in the unit tests as the oracle.

use std::fmt;

use crate::error::ColorError;

/// An 8-bit RGB triple.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Rgb {
    pub r: u8,
    pub g: u8,
    pub b: u8,
}

impl Rgb {
    pub const BLACK: Self = Self::new(0, 0, 0);

    pub const fn new(r: u8, g: u8, b: u8) -> Self {
        Self { r, g, b }
    }

    fn distance_sq(self, other: Rgb) -> u32 {
        let d = |a: u8, b: u8| {
            let v = a as i32 - b as i32;
            (v * v) as u32
        };
        d(self.r, other.r) + d(self.g, other.g) + d(self.b, other.b)
    }
}

impl From<(u8, u8, u8)> for Rgb {
    fn from((r, g, b): (u8, u8, u8)) -> Self {
        Self::new(r, g, b)
    }
}

/// A colour as stored in a 16-colour bitmap palette slot (`0..=15`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ColorNumber(u8);

/// A colour in IRGB bit layout: bit 3 intensity, bit 2 red, bit 1 green,
/// bit 0 blue.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ReturnCode(u8);

/// One of the four grey shades `0000`, `0111`, `1000`, `1111`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GreyShade(u8);

/// Two bits of hidden information; the top half of a [`GreyShade`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GreyCode2(u8);

macro_rules! nibble_newtype {
    ($ty:ident, $what:literal) => {
        impl $ty {
            pub const fn new(value: u8) -> Option<Self> {
                if value < 16 { Some(Self(value)) } else { None }
            }

            /// Keeps the low nibble.
            pub const fn from_low_nibble(value: u8) -> Self {
                Self(value & 0x0F)
            }

            pub const fn value(self) -> u8 {
                self.0
            }

            /// All sixteen values in ascending order.
            pub fn all() -> impl Iterator<Item = Self> {
                (0u8..16).map(Self)
            }
        }

        impl TryFrom<u8> for $ty {
            type Error = ColorError;

            fn try_from(value: u8) -> Result<Self, Self::Error> {
                Self::new(value).ok_or(ColorError::OutOfRange { what: $what, value })
            }
        }

        impl fmt::Display for $ty {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, "{} ({:04b})", self.0, self.0)
            }
        }
    };
}

nibble_newtype!(ColorNumber, "color number");
nibble_newtype!(ReturnCode, "return code");

impl GreyShade {
    pub const BLACK: Self = Self(0);
    pub const LIGHT_GREY: Self = Self(7);
    pub const DARK_GREY: Self = Self(8);
    pub const WHITE: Self = Self(15);

    pub const ALL: [Self; 4] = [Self::BLACK, Self::LIGHT_GREY, Self::DARK_GREY, Self::WHITE];

    pub const fn new(value: u8) -> Option<Self> {
        match value {
            0 | 7 | 8 | 15 => Some(Self(value)),
            _ => None,
        }
    }

    pub const fn value(self) -> u8 {
        self.0
    }
}

impl TryFrom<u8> for GreyShade {
    type Error = ColorError;

    fn try_from(value: u8) -> Result<Self, Self::Error> {
        Self::new(value).ok_or(ColorError::InvalidShade(value))
    }
}

impl fmt::Display for GreyShade {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ({:04b})", self.0, self.0)
    }
}

impl GreyCode2 {
    pub const ALL: [Self; 4] = [Self(0b00), Self(0b01), Self(0b10), Self(0b11)];

    pub const fn new(value: u8) -> Option<Self> {
        if value < 4 { Some(Self(value)) } else { None }
    }

    /// Keeps the two low bits.
    pub const fn from_low_bits(value: u8) -> Self {
        Self(value & 0b11)
    }

    pub const fn value(self) -> u8 {
        self.0
    }

    pub const fn index(self) -> usize {
        self.0 as usize
    }
}

impl TryFrom<u8> for GreyCode2 {
    type Error = ColorError;

    fn try_from(value: u8) -> Result<Self, Self::Error> {
        Self::new(value).ok_or(ColorError::OutOfRange {
            what: "grey code",
            value,
        })
    }
}

impl fmt::Display for GreyCode2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:02b}", self.0)
    }
}

// Bit 0 <-> bit 2 swap, indexed by colour number (or return code).
const SWAP_RED_BLUE: [u8; 16] = [0, 4, 2, 6, 1, 5, 3, 7, 8, 12, 10, 14, 9, 13, 11, 15];

// Indexed by return code.
const RETURN_CODE_TO_SHADE: [u8; 16] = [0, 8, 0, 8, 0, 8, 0, 7, 8, 15, 7, 15, 7, 15, 7, 15];

/// Standard CGA palette, indexed by return code (IRGB).
pub const CGA_PALETTE: [Rgb; 16] = [
    Rgb::new(0x00, 0x00, 0x00), // black
    Rgb::new(0x00, 0x00, 0xAA), // blue
    Rgb::new(0x00, 0xAA, 0x00), // green
    Rgb::new(0x00, 0xAA, 0xAA), // cyan
    Rgb::new(0xAA, 0x00, 0x00), // red
    Rgb::new(0xAA, 0x00, 0xAA), // magenta
    Rgb::new(0xAA, 0x55, 0x00), // brown
    Rgb::new(0xAA, 0xAA, 0xAA), // light grey
    Rgb::new(0x55, 0x55, 0x55), // dark grey
    Rgb::new(0x55, 0x55, 0xFF), // light blue
    Rgb::new(0x55, 0xFF, 0x55), // light green
    Rgb::new(0x55, 0xFF, 0xFF), // light cyan
    Rgb::new(0xFF, 0x55, 0x55), // light red
    Rgb::new(0xFF, 0x55, 0xFF), // light magenta
    Rgb::new(0xFF, 0xFF, 0x55), // yellow
    Rgb::new(0xFF, 0xFF, 0xFF), // white
];

pub fn color_number_to_return_code(n: ColorNumber) -> ReturnCode {
    ReturnCode(SWAP_RED_BLUE[n.0 as usize])
}

pub fn return_code_to_color_number(rc: ReturnCode) -> ColorNumber {
    ColorNumber(SWAP_RED_BLUE[rc.0 as usize])
}

pub fn return_code_to_grey_shade(rc: ReturnCode) -> GreyShade {
    GreyShade(RETURN_CODE_TO_SHADE[rc.0 as usize])
}

/// Top two bits of the shade: `0 -> 00`, `7 -> 01`, `8 -> 10`, `15 -> 11`.
pub fn grey_shade_to_code2(g: GreyShade) -> GreyCode2 {
    GreyCode2(g.0 >> 2)
}

/// Checked variant of [`grey_shade_to_code2`] for raw shade values.
pub fn shade_value_to_code2(value: u8) -> Result<GreyCode2, ColorError> {
    GreyShade::try_from(value).map(grey_shade_to_code2)
}

pub fn code2_to_grey_shade(c: GreyCode2) -> GreyShade {
    GreyShade::ALL[c.index()]
}

/// Canonical CGA colour for a palette slot.
pub fn color_number_to_rgb(n: ColorNumber) -> Rgb {
    CGA_PALETTE[color_number_to_return_code(n).0 as usize]
}

/// Nearest canonical colour by squared Euclidean distance; ties go to the
/// lowest colour number.
pub fn palette_entry_to_color_number(rgb: Rgb) -> ColorNumber {
    ColorNumber::all()
        .min_by_key(|&n| (color_number_to_rgb(n).distance_sq(rgb), n))
        .expect("sixteen candidates")
}

/// The full chain from a palette slot to two bits of information.
pub fn color_number_to_code2(n: ColorNumber) -> GreyCode2 {
    grey_shade_to_code2(return_code_to_grey_shade(color_number_to_return_code(n)))
}
