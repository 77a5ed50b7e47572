//! Reference-image steganography for 4-bit indexed bitmaps.
//!
//! A 16-colour BMP is reduced to a four-shade grey reference image in which
//! every pixel carries a 2-bit code. A message is hidden by recording, for
//! each 2-bit chunk of each byte, the coordinate of some pixel carrying that
//! chunk. The image is never modified; the message can only be recovered by
//! combining it with the separately delivered coordinate payload.
//!
//! ```
//! use refstego::{build_index, hide, unhide, GreyCode2, ReferenceImage, SelectionStrategy};
//!
//! let codes = (0..4).map(|v| GreyCode2::new(v).unwrap()).collect();
//! let reference = ReferenceImage::from_codes(2, 2, codes).unwrap();
//! let records = hide(b"A", &build_index(&reference), SelectionStrategy::FirstOccurrence).unwrap();
//! assert_eq!(unhide(&records, &reference).unwrap(), b"A");
//! ```

pub mod bmp4;
pub mod cli;
pub mod codec;
pub mod color_grey;
pub mod error;
pub mod payload;
pub mod reference;
pub mod rng;
pub mod transport;

pub use bmp4::{Bmp4Image, parse_bmp, write_bmp};
pub use codec::{CoordRecord, SelectionStrategy, byte_to_chunks, chunks_to_byte, hide, unhide};
pub use color_grey::{
    ColorNumber, GreyCode2, GreyShade, ReturnCode, Rgb, code2_to_grey_shade,
    color_number_to_return_code, grey_shade_to_code2, palette_entry_to_color_number,
    return_code_to_color_number, return_code_to_grey_shade,
};
pub use error::{BmpError, CodecError, ColorError, FrameError, PayloadError, TransportError};
pub use payload::{PayloadFile, deserialize, serialize};
pub use reference::{
    Coord, OccurrenceIndex, PaletteMode, ReferenceImage, build_index, export_grey_bmp,
    to_reference_image,
};
pub use transport::{
    FrameKind, ReceiveOptions, SessionState, decode_frame, encode_frame, loopback, receive_session,
    send_session,
};
