//! Uncompressed 4-bits-per-pixel indexed BMP files.
//!
//! Parsing accepts bottom-up and top-down storage and hands back a logical
//! top-down raster. Writing always produces the canonical layout: a 14-byte
//! file header, a 40-byte `BITMAPINFOHEADER`, a 16-entry palette and
//! bottom-up rows padded to four bytes.

use crate::color_grey::Rgb;
use crate::error::BmpError;

const FILE_HEADER_LEN: usize = 14;
const INFO_HEADER_LEN: usize = 40;
const PALETTE_LEN: usize = 16;
const MAX_DIMENSION: u32 = 65535;
const BI_RGB: u32 = 0;
// 72 DPI
const PIXELS_PER_METRE: u32 = 2835;

/// A 16-colour indexed image with pixels stored top-down, row-major.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Bmp4Image {
    width: u32,
    height: u32,
    palette: [Rgb; PALETTE_LEN],
    pixels: Vec<u8>,
}

impl Bmp4Image {
    pub fn new(
        width: u32,
        height: u32,
        palette: [Rgb; PALETTE_LEN],
        pixels: Vec<u8>,
    ) -> Result<Self, BmpError> {
        check_dimensions(width as i64, height as i64)?;
        let expected = width as usize * height as usize;
        if pixels.len() != expected {
            return Err(BmpError::PixelCount {
                expected,
                actual: pixels.len(),
            });
        }
        if let Some(&bad) = pixels.iter().find(|&&p| p > 15) {
            return Err(BmpError::PixelOutOfRange(bad));
        }
        Ok(Self {
            width,
            height,
            palette,
            pixels,
        })
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn palette(&self) -> &[Rgb; PALETTE_LEN] {
        &self.palette
    }

    /// Palette indices, top row first.
    pub fn pixels(&self) -> &[u8] {
        &self.pixels
    }

    pub fn pixel(&self, x: u32, y: u32) -> Option<u8> {
        if x < self.width && y < self.height {
            Some(self.pixels[y as usize * self.width as usize + x as usize])
        } else {
            None
        }
    }

    pub fn rows(&self) -> std::slice::ChunksExact<'_, u8> {
        self.pixels.chunks_exact(self.width as usize)
    }
}

fn check_dimensions(width: i64, height: i64) -> Result<(), BmpError> {
    let ok = |v: i64| (1..=MAX_DIMENSION as i64).contains(&v);
    if ok(width) && ok(height) {
        Ok(())
    } else {
        Err(BmpError::BadDimensions { width, height })
    }
}

/// Bytes per stored row: two pixels per byte, padded to a 4-byte boundary.
pub fn row_stride(width: u32) -> usize {
    (width as usize).div_ceil(8) * 4
}

fn u16_at(bytes: &[u8], at: usize) -> u16 {
    u16::from_le_bytes([bytes[at], bytes[at + 1]])
}

fn u32_at(bytes: &[u8], at: usize) -> u32 {
    u32::from_le_bytes(bytes[at..at + 4].try_into().unwrap())
}

fn i32_at(bytes: &[u8], at: usize) -> i32 {
    i32::from_le_bytes(bytes[at..at + 4].try_into().unwrap())
}

pub fn parse_bmp(bytes: &[u8]) -> Result<Bmp4Image, BmpError> {
    if bytes.len() < 2 || &bytes[..2] != b"BM" {
        return Err(BmpError::NotBmp);
    }
    if bytes.len() < FILE_HEADER_LEN + INFO_HEADER_LEN {
        return Err(BmpError::Truncated("header"));
    }

    let data_offset = u32_at(bytes, 10) as u64;
    let header_len = u32_at(bytes, 14);
    // Later header versions extend BITMAPINFOHEADER; their extra fields are ignored.
    if (header_len as usize) < INFO_HEADER_LEN {
        return Err(BmpError::UnsupportedHeader(header_len));
    }
    let width = i32_at(bytes, 18) as i64;
    let raw_height = i32_at(bytes, 22) as i64;
    let top_down = raw_height < 0;
    let height = raw_height.abs();
    check_dimensions(width, height)?;
    let (width, height) = (width as u32, height as u32);

    let depth = u16_at(bytes, 28);
    if depth != 4 {
        return Err(BmpError::UnsupportedDepth(depth));
    }
    let compression = u32_at(bytes, 30);
    if compression != BI_RGB {
        return Err(BmpError::UnsupportedCompression(compression));
    }
    let colors_used = match u32_at(bytes, 46) {
        0 => PALETTE_LEN as u32,
        n if n > PALETTE_LEN as u32 => return Err(BmpError::PaletteTooLarge(n)),
        n => n,
    };

    let palette_start = FILE_HEADER_LEN as u64 + header_len as u64;
    let palette_end = palette_start + 4 * colors_used as u64;
    if palette_end > bytes.len() as u64 {
        return Err(BmpError::Truncated("palette"));
    }
    let mut palette = [Rgb::BLACK; PALETTE_LEN];
    let palette_bytes = &bytes[palette_start as usize..palette_end as usize];
    for (slot, quad) in palette.iter_mut().zip(palette_bytes.chunks_exact(4)) {
        *slot = Rgb::new(quad[2], quad[1], quad[0]);
    }

    let stride = row_stride(width);
    let data_len = stride as u64 * height as u64;
    if data_offset.saturating_add(data_len) > bytes.len() as u64 {
        return Err(BmpError::Truncated("pixel data"));
    }
    let data = &bytes[data_offset as usize..(data_offset + data_len) as usize];

    let w = width as usize;
    let mut pixels = vec![0u8; w * height as usize];
    for (stored_row, row) in data.chunks_exact(stride).enumerate() {
        let logical_row = if top_down {
            stored_row
        } else {
            height as usize - 1 - stored_row
        };
        let out = &mut pixels[logical_row * w..(logical_row + 1) * w];
        for (x, px) in out.iter_mut().enumerate() {
            let byte = row[x / 2];
            *px = if x % 2 == 0 { byte >> 4 } else { byte & 0x0F };
        }
    }

    Ok(Bmp4Image {
        width,
        height,
        palette,
        pixels,
    })
}

pub fn write_bmp(image: &Bmp4Image) -> Vec<u8> {
    let stride = row_stride(image.width);
    let data_offset = FILE_HEADER_LEN + INFO_HEADER_LEN + 4 * PALETTE_LEN;
    let data_len = stride * image.height as usize;
    let file_len = data_offset + data_len;

    let mut out = Vec::with_capacity(file_len);
    out.extend_from_slice(b"BM");
    out.extend_from_slice(&(file_len as u32).to_le_bytes());
    out.extend_from_slice(&0u32.to_le_bytes());
    out.extend_from_slice(&(data_offset as u32).to_le_bytes());

    out.extend_from_slice(&(INFO_HEADER_LEN as u32).to_le_bytes());
    out.extend_from_slice(&(image.width as i32).to_le_bytes());
    out.extend_from_slice(&(image.height as i32).to_le_bytes());
    out.extend_from_slice(&1u16.to_le_bytes());
    out.extend_from_slice(&4u16.to_le_bytes());
    out.extend_from_slice(&BI_RGB.to_le_bytes());
    out.extend_from_slice(&(data_len as u32).to_le_bytes());
    out.extend_from_slice(&PIXELS_PER_METRE.to_le_bytes());
    out.extend_from_slice(&PIXELS_PER_METRE.to_le_bytes());
    out.extend_from_slice(&(PALETTE_LEN as u32).to_le_bytes());
    out.extend_from_slice(&0u32.to_le_bytes());

    for c in &image.palette {
        out.extend_from_slice(&[c.b, c.g, c.r, 0]);
    }

    let mut row_buf = vec![0u8; stride];
    for row in image.rows().rev() {
        row_buf.fill(0);
        for (i, pair) in row.chunks(2).enumerate() {
            let lo = pair.get(1).copied().unwrap_or(0);
            row_buf[i] = (pair[0] << 4) | lo;
        }
        out.extend_from_slice(&row_buf);
    }
    debug_assert_eq!(out.len(), file_len);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grey_palette() -> [Rgb; 16] {
        std::array::from_fn(|i| {
            let v = (i * 17) as u8;
            Rgb::new(v, v, v)
        })
    }

    /// Hand-assembled 4-bpp BMP with explicit stored rows.
    fn handmade(width: i32, height: i32, colors_used: u32, stored_rows: &[&[u8]]) -> Vec<u8> {
        let mut b = Vec::new();
        let palette_len = if colors_used == 0 { 16 } else { colors_used } as usize;
        let offset = 14 + 40 + 4 * palette_len;
        let data: Vec<u8> = stored_rows.concat();
        b.extend_from_slice(b"BM");
        b.extend_from_slice(&((offset + data.len()) as u32).to_le_bytes());
        b.extend_from_slice(&[0; 4]);
        b.extend_from_slice(&(offset as u32).to_le_bytes());
        b.extend_from_slice(&40u32.to_le_bytes());
        b.extend_from_slice(&width.to_le_bytes());
        b.extend_from_slice(&height.to_le_bytes());
        b.extend_from_slice(&1u16.to_le_bytes());
        b.extend_from_slice(&4u16.to_le_bytes());
        b.extend_from_slice(&[0; 8]);
        b.extend_from_slice(&[0; 8]);
        b.extend_from_slice(&colors_used.to_le_bytes());
        b.extend_from_slice(&[0; 4]);
        for i in 0..palette_len as u8 {
            b.extend_from_slice(&[i, i + 100, i + 200, 0]);
        }
        b.extend_from_slice(&data);
        b
    }

    #[test]
    fn bottom_up_rows_are_reordered() {
        // stored first: logical row 1 = [3, 4]; then logical row 0 = [1, 2]
        let bytes = handmade(2, 2, 0, &[&[0x34, 0, 0, 0], &[0x12, 0, 0, 0]]);
        let img = parse_bmp(&bytes).unwrap();
        assert_eq!((img.width(), img.height()), (2, 2));
        assert_eq!(img.pixels(), &[1, 2, 3, 4]);
        assert_eq!(img.pixel(0, 0), Some(1));
        assert_eq!(img.palette()[5], Rgb::new(205, 105, 5));
    }

    #[test]
    fn top_down_rows_keep_order() {
        let bytes = handmade(2, -2, 0, &[&[0x12, 0, 0, 0], &[0x34, 0, 0, 0]]);
        let img = parse_bmp(&bytes).unwrap();
        assert_eq!(img.pixels(), &[1, 2, 3, 4]);
    }

    #[test]
    fn odd_width_uses_high_nibble_first() {
        let bytes = handmade(3, 1, 0, &[&[0xAB, 0xC0, 0, 0]]);
        let img = parse_bmp(&bytes).unwrap();
        assert_eq!(img.pixels(), &[0xA, 0xB, 0xC]);
    }

    #[test]
    fn short_palette_is_padded_with_black() {
        let bytes = handmade(1, 1, 2, &[&[0x10, 0, 0, 0]]);
        let img = parse_bmp(&bytes).unwrap();
        assert_eq!(img.palette()[1], Rgb::new(201, 101, 1));
        assert!(img.palette()[2..].iter().all(|&c| c == Rgb::BLACK));
    }

    #[test]
    fn rejects_bad_magic() {
        assert_eq!(parse_bmp(b"PNG\r\n"), Err(BmpError::NotBmp));
        assert_eq!(parse_bmp(b""), Err(BmpError::NotBmp));
        assert_eq!(parse_bmp(b"BM"), Err(BmpError::Truncated("header")));
    }

    #[test]
    fn rejects_bad_dimensions() {
        let zero_w = handmade(0, 1, 0, &[]);
        assert!(matches!(
            parse_bmp(&zero_w),
            Err(BmpError::BadDimensions { .. })
        ));
        let zero_h = handmade(1, 0, 0, &[]);
        assert!(matches!(
            parse_bmp(&zero_h),
            Err(BmpError::BadDimensions { .. })
        ));
        let huge = handmade(1, 70000, 0, &[]);
        assert!(matches!(
            parse_bmp(&huge),
            Err(BmpError::BadDimensions { .. })
        ));
        let huge_top_down = handmade(1, -70000, 0, &[]);
        assert!(matches!(
            parse_bmp(&huge_top_down),
            Err(BmpError::BadDimensions { .. })
        ));
        let neg_w = handmade(-4, 1, 0, &[]);
        assert!(matches!(
            parse_bmp(&neg_w),
            Err(BmpError::BadDimensions { .. })
        ));
    }

    #[test]
    fn rejects_compression_and_oversized_palette() {
        let mut rle = handmade(1, 1, 0, &[&[0; 4]]);
        rle[30] = 2;
        assert_eq!(parse_bmp(&rle), Err(BmpError::UnsupportedCompression(2)));

        let mut big = handmade(1, 1, 0, &[&[0; 4]]);
        big[46] = 17;
        assert_eq!(parse_bmp(&big), Err(BmpError::PaletteTooLarge(17)));
    }

    #[test]
    fn rejects_truncated_pixels_and_palette() {
        let bytes = handmade(2, 2, 0, &[&[0x12, 0, 0, 0]]);
        assert_eq!(parse_bmp(&bytes), Err(BmpError::Truncated("pixel data")));
        let bytes = handmade(1, 1, 0, &[&[0; 4]]);
        assert_eq!(parse_bmp(&bytes[..60]), Err(BmpError::Truncated("palette")));
    }

    #[test]
    fn one_by_one_is_122_bytes() {
        let img = Bmp4Image::new(1, 1, [Rgb::BLACK; 16], vec![0]).unwrap();
        let bytes = write_bmp(&img);
        assert_eq!(bytes.len(), 14 + 40 + 64 + 4);
        assert_eq!(bytes.len(), 122);
        assert_eq!(u32_at(&bytes, 2), 122);
        assert_eq!(u32_at(&bytes, 10), 118);
    }

    #[test]
    fn writer_is_bottom_up_and_deterministic() {
        let img = Bmp4Image::new(3, 2, grey_palette(), vec![1, 2, 3, 4, 5, 6]).unwrap();
        let a = write_bmp(&img);
        let b = write_bmp(&img);
        assert_eq!(a, b);
        assert_eq!(&a[118..122], &[0x45, 0x60, 0, 0]);
        assert_eq!(&a[122..126], &[0x12, 0x30, 0, 0]);
        // palette entries are stored blue, green, red, reserved
        assert_eq!(&a[54 + 4 * 3..54 + 4 * 4], &[51, 51, 51, 0]);
        assert_eq!(parse_bmp(&a).unwrap(), img);
    }

    #[test]
    fn constructor_checks_invariants() {
        assert!(matches!(
            Bmp4Image::new(2, 2, grey_palette(), vec![0; 3]),
            Err(BmpError::PixelCount {
                expected: 4,
                actual: 3
            })
        ));
        assert_eq!(
            Bmp4Image::new(1, 1, grey_palette(), vec![16]),
            Err(BmpError::PixelOutOfRange(16))
        );
        assert!(matches!(
            Bmp4Image::new(0, 1, grey_palette(), vec![]),
            Err(BmpError::BadDimensions { .. })
        ));
    }
}
