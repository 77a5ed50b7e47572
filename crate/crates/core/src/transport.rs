//! Split-channel delivery of the reference image and the payload.
//!
//! Each channel carries one frame:
//!
//! ```text
//! kind u8 (0x01 image, 0x02 payload) | body length u32 LE | body | CRC-32(body) u32 LE
//! ```
//!
//! The receiver reads both channels concurrently and joins the two frames
//! exactly once. With only one frame it reports [`TransportError::Incomplete`]
//! and yields no message bytes at all.

use std::fmt;
use std::io::{self, Read, Write};
use std::net::{SocketAddr, TcpListener, TcpStream, ToSocketAddrs};
use std::sync::mpsc;
use std::thread;
use std::time::{Duration, Instant};

use crate::bmp4::parse_bmp;
use crate::codec::unhide;
use crate::error::{FrameError, TransportError};
use crate::payload::deserialize;
use crate::reference::{PaletteMode, to_reference_image};

pub const FRAME_OVERHEAD: usize = 1 + 4 + 4;
pub const DEFAULT_TIMEOUT: Duration = Duration::from_secs(30);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[repr(u8)]
pub enum FrameKind {
    Image = 0x01,
    Payload = 0x02,
}

impl FrameKind {
    pub fn from_tag(tag: u8) -> Result<Self, FrameError> {
        match tag {
            0x01 => Ok(Self::Image),
            0x02 => Ok(Self::Payload),
            other => Err(FrameError::BadKind(other)),
        }
    }
}

impl fmt::Display for FrameKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Image => "IMAGE",
            Self::Payload => "PAYLOAD",
        })
    }
}

/// Which of the two independent channels something arrived on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Channel {
    A,
    B,
}

impl fmt::Display for Channel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::A => "A",
            Self::B => "B",
        })
    }
}

fn crc32(body: &[u8]) -> u32 {
    crc32fast::hash(body)
}

pub fn encode_frame(kind: FrameKind, body: &[u8]) -> Result<Vec<u8>, FrameError> {
    let len = u32::try_from(body.len()).map_err(|_| FrameError::TooLong(body.len()))?;
    let mut out = Vec::with_capacity(body.len() + FRAME_OVERHEAD);
    out.push(kind as u8);
    out.extend_from_slice(&len.to_le_bytes());
    out.extend_from_slice(body);
    out.extend_from_slice(&crc32(body).to_le_bytes());
    Ok(out)
}

/// Decodes exactly one frame occupying all of `bytes`.
pub fn decode_frame(bytes: &[u8]) -> Result<(FrameKind, Vec<u8>), FrameError> {
    let (&tag, rest) = bytes.split_first().ok_or(FrameError::Truncated)?;
    let kind = FrameKind::from_tag(tag)?;
    if rest.len() < 4 {
        return Err(FrameError::Truncated);
    }
    let len = u32::from_le_bytes(rest[..4].try_into().unwrap()) as usize;
    let rest = &rest[4..];
    if rest.len() < len.saturating_add(4) {
        return Err(FrameError::Truncated);
    }
    let (body, rest) = rest.split_at(len);
    let stored = u32::from_le_bytes(rest[..4].try_into().unwrap());
    if rest.len() > 4 {
        return Err(FrameError::TrailingBytes(rest.len() - 4));
    }
    verify(stored, body)?;
    Ok((kind, body.to_vec()))
}

fn verify(stored: u32, body: &[u8]) -> Result<(), FrameError> {
    let computed = crc32(body);
    if stored == computed {
        Ok(())
    } else {
        Err(FrameError::ChecksumMismatch { stored, computed })
    }
}

#[derive(Debug)]
pub enum ReadFrameError {
    Io(io::Error),
    Frame(FrameError),
}

impl ReadFrameError {
    fn on(self, channel: Channel) -> TransportError {
        match self {
            Self::Io(source) => TransportError::Io { channel, source },
            Self::Frame(source) => TransportError::Frame { channel, source },
        }
    }
}

fn read_exact_or_truncated<R: Read>(r: &mut R, buf: &mut [u8]) -> Result<(), ReadFrameError> {
    r.read_exact(buf).map_err(|e| match e.kind() {
        io::ErrorKind::UnexpectedEof => ReadFrameError::Frame(FrameError::Truncated),
        _ => ReadFrameError::Io(e),
    })
}

/// Reads one frame from a stream. `Ok(None)` means the stream ended cleanly
/// before any byte of a frame arrived.
pub fn read_frame<R: Read>(r: &mut R) -> Result<Option<(FrameKind, Vec<u8>)>, ReadFrameError> {
    let mut tag = [0u8; 1];
    loop {
        match r.read(&mut tag) {
            Ok(0) => return Ok(None),
            Ok(_) => break,
            Err(e) if e.kind() == io::ErrorKind::Interrupted => continue,
            Err(e) => return Err(ReadFrameError::Io(e)),
        }
    }
    let kind = FrameKind::from_tag(tag[0]).map_err(ReadFrameError::Frame)?;
    let mut len = [0u8; 4];
    read_exact_or_truncated(r, &mut len)?;
    let len = u32::from_le_bytes(len) as u64;

    // Grow with the data actually received rather than the declared length.
    let mut body = Vec::new();
    r.by_ref()
        .take(len)
        .read_to_end(&mut body)
        .map_err(ReadFrameError::Io)?;
    if (body.len() as u64) < len {
        return Err(ReadFrameError::Frame(FrameError::Truncated));
    }
    let mut crc = [0u8; 4];
    read_exact_or_truncated(r, &mut crc)?;
    verify(u32::from_le_bytes(crc), &body).map_err(ReadFrameError::Frame)?;
    Ok(Some((kind, body)))
}

pub fn write_frame<W: Write>(w: &mut W, kind: FrameKind, body: &[u8]) -> io::Result<()> {
    let frame =
        encode_frame(kind, body).map_err(|e| io::Error::new(io::ErrorKind::InvalidInput, e))?;
    w.write_all(&frame)?;
    w.flush()
}

/// Writes the image frame to `channel_a` and the payload frame to
/// `channel_b` in parallel. Both channels are closed (dropped) afterwards.
pub fn send_session<A, B>(
    image: &[u8],
    payload: &[u8],
    mut channel_a: A,
    mut channel_b: B,
) -> Result<(), SendError>
where
    A: Write + Send,
    B: Write + Send,
{
    let (a, b) = thread::scope(|s| {
        let a = s.spawn(move || write_frame(&mut channel_a, FrameKind::Image, image));
        let b = s.spawn(move || write_frame(&mut channel_b, FrameKind::Payload, payload));
        (a.join(), b.join())
    });
    let flatten = |r: thread::Result<io::Result<()>>| match r {
        Ok(res) => res.err(),
        Err(_) => Some(io::Error::other("writer thread panicked")),
    };
    let err = SendError {
        a: flatten(a),
        b: flatten(b),
    };
    if err.a.is_none() && err.b.is_none() {
        Ok(())
    } else {
        Err(err)
    }
}

/// Per-channel write failures from [`send_session`].
#[derive(Debug)]
pub struct SendError {
    pub a: Option<io::Error>,
    pub b: Option<io::Error>,
}

impl fmt::Display for SendError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut sep = "";
        for (ch, e) in [(Channel::A, &self.a), (Channel::B, &self.b)] {
            if let Some(e) = e {
                write!(f, "{sep}channel {ch}: {e}")?;
                sep = "; ";
            }
        }
        Ok(())
    }
}

impl std::error::Error for SendError {}

/// The two frame slots of a receiving session, each filled at most once.
#[derive(Debug, Default)]
pub struct SessionState {
    image: Option<(Channel, Vec<u8>)>,
    payload: Option<(Channel, Vec<u8>)>,
}

impl SessionState {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn accept(
        &mut self,
        channel: Channel,
        kind: FrameKind,
        body: Vec<u8>,
    ) -> Result<(), TransportError> {
        let slot = match kind {
            FrameKind::Image => &mut self.image,
            FrameKind::Payload => &mut self.payload,
        };
        if slot.is_some() {
            return Err(TransportError::DuplicateFrame { channel, kind });
        }
        *slot = Some((channel, body));
        Ok(())
    }

    pub fn has_image(&self) -> bool {
        self.image.is_some()
    }

    pub fn has_payload(&self) -> bool {
        self.payload.is_some()
    }

    pub fn is_complete(&self) -> bool {
        self.has_image() && self.has_payload()
    }

    /// Joins the two frames. The image is read in raw-index mode since the
    /// sender transmits the exported grey bitmap.
    pub fn finish(self) -> Result<Vec<u8>, TransportError> {
        let (image_ch, image, payload_ch, payload) = match (self.image, self.payload) {
            (Some((ic, i)), Some((pc, p))) => (ic, i, pc, p),
            (image, payload) => {
                return Err(TransportError::Incomplete {
                    image: image.is_some(),
                    payload: payload.is_some(),
                });
            }
        };
        let bmp = parse_bmp(&image).map_err(|source| TransportError::Image {
            channel: image_ch,
            source,
        })?;
        let reference = to_reference_image(&bmp, PaletteMode::RawIndex);
        let payload = deserialize(&payload).map_err(|source| TransportError::Payload {
            channel: payload_ch,
            source,
        })?;
        Ok(unhide(payload.records(), &reference)?)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct ReceiveOptions {
    /// Upper bound on the wait for both frames.
    pub timeout: Duration,
}

impl Default for ReceiveOptions {
    fn default() -> Self {
        Self {
            timeout: DEFAULT_TIMEOUT,
        }
    }
}

type ChannelEvent = (
    Channel,
    Result<Option<(FrameKind, Vec<u8>)>, ReadFrameError>,
);

/// Reads one frame from each channel on its own thread and joins them.
///
/// Returns as soon as both frames are held, when both channels have ended,
/// or when the timeout elapses. A reader still blocked at that point is left
/// to finish on its own.
pub fn receive_session<A, B>(
    channel_a: A,
    channel_b: B,
    options: ReceiveOptions,
) -> Result<Vec<u8>, TransportError>
where
    A: Read + Send + 'static,
    B: Read + Send + 'static,
{
    let (tx, rx) = mpsc::channel::<ChannelEvent>();
    spawn_reader(Channel::A, channel_a, tx.clone());
    spawn_reader(Channel::B, channel_b, tx);

    let deadline = Instant::now() + options.timeout;
    let mut state = SessionState::new();
    let mut ended = 0;
    while ended < 2 && !state.is_complete() {
        let remaining = deadline.saturating_duration_since(Instant::now());
        let (channel, event) = match rx.recv_timeout(remaining) {
            Ok(ev) => ev,
            Err(_) => break,
        };
        ended += 1;
        match event {
            Ok(Some((kind, body))) => state.accept(channel, kind, body)?,
            Ok(None) => {}
            Err(e) => return Err(e.on(channel)),
        }
    }
    state.finish()
}

fn spawn_reader<R: Read + Send + 'static>(
    channel: Channel,
    mut reader: R,
    tx: mpsc::Sender<ChannelEvent>,
) {
    thread::spawn(move || {
        let event = read_frame(&mut reader);
        // The receiver may already have given up.
        let _ = tx.send((channel, event));
    });
}

/// In-memory byte pipe. Dropping the writer ends the reader's stream.
pub fn loopback() -> (LoopbackWriter, LoopbackReader) {
    let (tx, rx) = mpsc::channel();
    (
        LoopbackWriter { tx },
        LoopbackReader {
            rx,
            buf: Vec::new(),
            pos: 0,
        },
    )
}

#[derive(Debug, Clone)]
pub struct LoopbackWriter {
    tx: mpsc::Sender<Vec<u8>>,
}

impl Write for LoopbackWriter {
    fn write(&mut self, buf: &[u8]) -> io::Result<usize> {
        self.tx
            .send(buf.to_vec())
            .map_err(|_| io::Error::new(io::ErrorKind::BrokenPipe, "loopback reader dropped"))?;
        Ok(buf.len())
    }

    fn flush(&mut self) -> io::Result<()> {
        Ok(())
    }
}

#[derive(Debug)]
pub struct LoopbackReader {
    rx: mpsc::Receiver<Vec<u8>>,
    buf: Vec<u8>,
    pos: usize,
}

impl Read for LoopbackReader {
    fn read(&mut self, out: &mut [u8]) -> io::Result<usize> {
        while self.pos == self.buf.len() {
            match self.rx.recv() {
                Ok(chunk) => {
                    self.buf = chunk;
                    self.pos = 0;
                }
                Err(_) => return Ok(0),
            }
        }
        let n = out.len().min(self.buf.len() - self.pos);
        out[..n].copy_from_slice(&self.buf[self.pos..self.pos + n]);
        self.pos += n;
        Ok(n)
    }
}

/// A listening TCP channel that accepts its single peer on first read.
#[derive(Debug)]
pub struct TcpListenChannel {
    listener: TcpListener,
    stream: Option<TcpStream>,
    read_timeout: Option<Duration>,
}

impl TcpListenChannel {
    pub fn bind<A: ToSocketAddrs>(addr: A, read_timeout: Option<Duration>) -> io::Result<Self> {
        Ok(Self {
            listener: TcpListener::bind(addr)?,
            stream: None,
            read_timeout,
        })
    }

    pub fn local_addr(&self) -> io::Result<SocketAddr> {
        self.listener.local_addr()
    }
}

impl Read for TcpListenChannel {
    fn read(&mut self, buf: &mut [u8]) -> io::Result<usize> {
        if self.stream.is_none() {
            let (stream, _) = self.listener.accept()?;
            stream.set_read_timeout(self.read_timeout)?;
            self.stream = Some(stream);
        }
        self.stream.as_mut().expect("accepted above").read(buf)
    }
}

/// Connects and sends both frames, one TCP connection per channel.
pub fn send_tcp<A: ToSocketAddrs, B: ToSocketAddrs>(
    image: &[u8],
    payload: &[u8],
    addr_a: A,
    addr_b: B,
) -> Result<(), SendError> {
    let a = TcpStream::connect(addr_a);
    let b = TcpStream::connect(addr_b);
    match (a, b) {
        (Ok(a), Ok(b)) => send_session(image, payload, a, b),
        (a, b) => Err(SendError {
            a: a.err(),
            b: b.err(),
        }),
    }
}
