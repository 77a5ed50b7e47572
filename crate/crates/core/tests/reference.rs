mod common;

use proptest::prelude::*;
use rand::SeedableRng;
use rand::rngs::StdRng;
use refstego::{
    Bmp4Image, Coord, PaletteMode, Rgb, build_index, export_grey_bmp, parse_bmp,
    to_reference_image, write_bmp,
};

fn image_strategy() -> impl Strategy<Value = Bmp4Image> {
    (1u32..=24, 1u32..=24)
        .prop_flat_map(|(w, h)| {
            (
                Just(w),
                Just(h),
                prop::array::uniform16(any::<(u8, u8, u8)>()),
                prop::collection::vec(0u8..16, (w * h) as usize),
            )
        })
        .prop_map(|(w, h, pal, pixels)| Bmp4Image::new(w, h, pal.map(Rgb::from), pixels).unwrap())
}

fn modes() -> impl Strategy<Value = PaletteMode> {
    prop_oneof![Just(PaletteMode::RawIndex), Just(PaletteMode::MatchPalette)]
}

proptest! {
    #[test]
    fn conversion_is_per_pixel(img in image_strategy(), mode in modes(), corner in any::<(u32, u32, u32, u32)>()) {
        let full = to_reference_image(&img, mode);
        let (w, h) = (img.width(), img.height());
        let x0 = corner.0 % w;
        let y0 = corner.1 % h;
        let sw = 1 + corner.2 % (w - x0);
        let sh = 1 + corner.3 % (h - y0);
        let mut sub = Vec::new();
        for y in y0..y0 + sh {
            for x in x0..x0 + sw {
                sub.push(img.pixel(x, y).unwrap());
            }
        }
        let sub_img = Bmp4Image::new(sw, sh, *img.palette(), sub).unwrap();
        let sub_ref = to_reference_image(&sub_img, mode);
        for y in 0..sh {
            for x in 0..sw {
                prop_assert_eq!(
                    sub_ref.code_at(Coord::new(x as u16, y as u16)),
                    full.code_at(Coord::new((x0 + x) as u16, (y0 + y) as u16))
                );
            }
        }
    }

    #[test]
    fn index_is_a_scan_ordered_partition(img in image_strategy(), mode in modes()) {
        let reference = to_reference_image(&img, mode);
        let index = build_index(&reference);
        prop_assert_eq!(index.len(), (img.width() * img.height()) as usize);
        prop_assert!(index.is_scan_ordered());
        let mut seen = vec![false; index.len()];
        for code in refstego::GreyCode2::ALL {
            for &c in index.bucket(code) {
                prop_assert_eq!(reference.code_at(c), Some(code));
                let i = c.y as usize * img.width() as usize + c.x as usize;
                prop_assert!(!seen[i]);
                seen[i] = true;
            }
        }
        prop_assert!(seen.iter().all(|&s| s));
    }

    #[test]
    fn grey_export_is_a_fixed_point(img in image_strategy(), mode in modes()) {
        let reference = to_reference_image(&img, mode);
        let exported = parse_bmp(&write_bmp(&export_grey_bmp(&reference))).unwrap();
        prop_assert!(exported.pixels().iter().all(|p| matches!(p, 0 | 7 | 8 | 15)));
        prop_assert_eq!(&to_reference_image(&exported, PaletteMode::RawIndex), &reference);
        prop_assert_eq!(&to_reference_image(&exported, PaletteMode::MatchPalette), &reference);
    }
}

#[test]
fn canonical_palette_modes_agree() {
    let mut rng = StdRng::seed_from_u64(3);
    let img = common::random_cover(&mut rng, 16, 16);
    assert_eq!(
        to_reference_image(&img, PaletteMode::RawIndex),
        to_reference_image(&img, PaletteMode::MatchPalette)
    );
}
