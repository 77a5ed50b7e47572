#![allow(dead_code)]

use rand::Rng;
use refstego::color_grey::color_number_to_rgb;
use refstego::{Bmp4Image, ColorNumber, Rgb};

/// Canonical CGA colours in palette-slot order.
pub fn cga_palette() -> [Rgb; 16] {
    std::array::from_fn(|i| color_number_to_rgb(ColorNumber::new(i as u8).unwrap()))
}

/// Random 16-colour image over the CGA palette with at least one pixel of
/// each grey code (slots 0, 7, 8 and 15 are the four shades themselves).
pub fn random_cover<R: Rng>(rng: &mut R, width: u32, height: u32) -> Bmp4Image {
    assert!(width * height >= 4);
    let n = (width * height) as usize;
    let mut pixels: Vec<u8> = (0..n).map(|_| rng.gen_range(0..16)).collect();
    let mut slots: Vec<usize> = (0..n).collect();
    for (i, shade) in [0u8, 7, 8, 15].into_iter().enumerate() {
        let j = rng.gen_range(i..n);
        slots.swap(i, j);
        pixels[slots[i]] = shade;
    }
    Bmp4Image::new(width, height, cga_palette(), pixels).unwrap()
}

pub fn random_bytes<R: Rng>(rng: &mut R, len: usize) -> Vec<u8> {
    let mut v = vec![0u8; len];
    rng.fill(&mut v[..]);
    v
}

pub fn sha256(bytes: &[u8]) -> Vec<u8> {
    use sha2::{Digest, Sha256};
    Sha256::digest(bytes).to_vec()
}
