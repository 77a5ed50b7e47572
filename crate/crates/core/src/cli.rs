//! The `refstego` command line.

use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::{Parser, Subcommand, ValueEnum};
use thiserror::Error;

use crate::bmp4::{parse_bmp, write_bmp};
use crate::codec::{SelectionStrategy, hide, unhide};
use crate::error::{BmpError, CodecError, PayloadError, TransportError};
use crate::payload::{self, PayloadFile};
use crate::reference::{
    PaletteMode, ReferenceImage, build_index, export_grey_bmp, to_reference_image,
};
use crate::transport::{self, ReceiveOptions, SendError, TcpListenChannel};

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_PARSE: i32 = 3;
pub const EXIT_MISSING_SHADE: i32 = 4;
pub const EXIT_TRANSPORT: i32 = 5;

/// Records shown by `inspect` before eliding the rest.
const INSPECT_RECORDS: usize = 8;

#[derive(Debug, Parser)]
#[command(
    name = "refstego",
    version,
    about = "Hide messages as coordinates into a 4-bit reference image"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    /// Pixel indices are colour numbers.
    Raw,
    /// Match palette entries to the nearest CGA colour.
    Match,
}

impl From<ModeArg> for PaletteMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Raw => PaletteMode::RawIndex,
            ModeArg::Match => PaletteMode::MatchPalette,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StrategyArg {
    First,
    Random,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Convert a 4-bit BMP into the four-shade grey reference BMP.
    Convert {
        in_bmp: PathBuf,
        out_bmp: PathBuf,
        #[arg(long, value_enum, default_value = "match")]
        palette_mode: ModeArg,
    },
    /// Hide a message against a reference BMP, writing an RSTG payload.
    Hide {
        #[arg(long = "reference", short = 'r')]
        ref_bmp: PathBuf,
        /// Message file, `-` for stdin.
        #[arg(long = "message", short = 'm', default_value = "-")]
        message_in: PathBuf,
        #[arg(long = "output", short = 'o')]
        payload_out: PathBuf,
        #[arg(long, value_enum, default_value = "first")]
        strategy: StrategyArg,
        /// Required with `--strategy random`.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, value_enum, default_value = "match")]
        palette_mode: ModeArg,
    },
    /// Recover a message from a reference BMP and an RSTG payload.
    Unhide {
        #[arg(long = "reference", short = 'r')]
        ref_bmp: PathBuf,
        #[arg(long = "payload", short = 'p')]
        payload_in: PathBuf,
        /// Output file, `-` for stdout.
        #[arg(long = "output", short = 'o', default_value = "-")]
        message_out: PathBuf,
        #[arg(long, value_enum, default_value = "match")]
        palette_mode: ModeArg,
    },
    /// Describe a BMP or RSTG file.
    Inspect {
        path: PathBuf,
        #[arg(long, value_enum, default_value = "match")]
        palette_mode: ModeArg,
    },
    /// Send a reference BMP and a payload over two TCP connections.
    Send {
        #[arg(long)]
        image: PathBuf,
        #[arg(long)]
        payload: PathBuf,
        #[arg(long)]
        addr_a: String,
        #[arg(long)]
        addr_b: String,
    },
    /// Listen on two TCP addresses and recover the message.
    Recv {
        #[arg(long)]
        listen_a: String,
        #[arg(long)]
        listen_b: String,
        #[arg(long = "output", short = 'o', default_value = "-")]
        message_out: PathBuf,
        /// Seconds to wait for both frames.
        #[arg(long, default_value_t = 30)]
        timeout: u64,
    },
}

#[derive(Error, Debug)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("{}: {source}", path.display())]
    Bmp {
        path: PathBuf,
        #[source]
        source: BmpError,
    },
    #[error("{}: {source}", path.display())]
    Payload {
        path: PathBuf,
        #[source]
        source: PayloadError,
    },
    #[error("{}: unrecognised file type", .0.display())]
    UnknownFile(PathBuf),
    #[error(transparent)]
    Codec(#[from] CodecError),
    #[error(transparent)]
    Transport(#[from] TransportError),
    #[error("send failed: {0}")]
    Send(#[from] SendError),
    #[error("{addr}: {source}")]
    Listen {
        addr: String,
        #[source]
        source: io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Usage(_) => EXIT_USAGE,
            Self::Io { .. } => EXIT_IO,
            Self::Bmp { .. } | Self::Payload { .. } | Self::UnknownFile(_) => EXIT_PARSE,
            Self::Codec(CodecError::MissingShade(_)) => EXIT_MISSING_SHADE,
            Self::Codec(_) => EXIT_PARSE,
            Self::Transport(_) | Self::Send(_) | Self::Listen { .. } => EXIT_TRANSPORT,
        }
    }
}

fn is_std_stream(path: &Path) -> bool {
    path.as_os_str() == "-"
}

fn read_input(path: &Path) -> Result<Vec<u8>, CliError> {
    let io_err = |source| CliError::Io {
        path: path.to_owned(),
        source,
    };
    if is_std_stream(path) {
        let mut buf = Vec::new();
        io::stdin().lock().read_to_end(&mut buf).map_err(io_err)?;
        Ok(buf)
    } else {
        fs::read(path).map_err(io_err)
    }
}

fn write_output(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let io_err = |source| CliError::Io {
        path: path.to_owned(),
        source,
    };
    if is_std_stream(path) {
        let mut out = io::stdout().lock();
        out.write_all(bytes)
            .and_then(|_| out.flush())
            .map_err(io_err)
    } else {
        fs::write(path, bytes).map_err(io_err)
    }
}

fn load_reference(path: &Path, mode: PaletteMode) -> Result<ReferenceImage, CliError> {
    let bytes = read_input(path)?;
    let bmp = parse_bmp(&bytes).map_err(|source| CliError::Bmp {
        path: path.to_owned(),
        source,
    })?;
    Ok(to_reference_image(&bmp, mode))
}

fn load_payload(path: &Path) -> Result<PayloadFile, CliError> {
    let bytes = read_input(path)?;
    payload::deserialize(&bytes).map_err(|source| CliError::Payload {
        path: path.to_owned(),
        source,
    })
}

/// Executes one command. Human-readable reports go to `out`.
pub fn run<W: Write>(command: Command, out: &mut W) -> Result<(), CliError> {
    let report_err = |source| CliError::Io {
        path: PathBuf::from("-"),
        source,
    };
    match command {
        Command::Convert {
            in_bmp,
            out_bmp,
            palette_mode,
        } => {
            let reference = load_reference(&in_bmp, palette_mode.into())?;
            write_output(&out_bmp, &write_bmp(&export_grey_bmp(&reference)))
        }
        Command::Hide {
            ref_bmp,
            message_in,
            payload_out,
            strategy,
            seed,
            palette_mode,
        } => {
            let strategy = match (strategy, seed) {
                (StrategyArg::First, None) => SelectionStrategy::FirstOccurrence,
                (StrategyArg::Random, Some(seed)) => SelectionStrategy::Random { seed },
                (StrategyArg::First, Some(_)) => {
                    return Err(CliError::Usage(
                        "--seed is only valid with --strategy random".into(),
                    ));
                }
                (StrategyArg::Random, None) => {
                    return Err(CliError::Usage("--strategy random requires --seed".into()));
                }
            };
            if is_std_stream(&ref_bmp) && is_std_stream(&message_in) {
                return Err(CliError::Usage(
                    "reference and message cannot both come from stdin".into(),
                ));
            }
            let reference = load_reference(&ref_bmp, palette_mode.into())?;
            let message = read_input(&message_in)?;
            let records = hide(&message, &build_index(&reference), strategy)?;
            let file = PayloadFile::new(records).map_err(|source| CliError::Payload {
                path: payload_out.clone(),
                source,
            })?;
            write_output(&payload_out, &payload::serialize(&file))
        }
        Command::Unhide {
            ref_bmp,
            payload_in,
            message_out,
            palette_mode,
        } => {
            if is_std_stream(&ref_bmp) && is_std_stream(&payload_in) {
                return Err(CliError::Usage(
                    "reference and payload cannot both come from stdin".into(),
                ));
            }
            let reference = load_reference(&ref_bmp, palette_mode.into())?;
            let file = load_payload(&payload_in)?;
            let message = unhide(file.records(), &reference)?;
            write_output(&message_out, &message)
        }
        Command::Inspect { path, palette_mode } => {
            let bytes = read_input(&path)?;
            if bytes.starts_with(b"BM") {
                let bmp = parse_bmp(&bytes).map_err(|source| CliError::Bmp {
                    path: path.clone(),
                    source,
                })?;
                let reference = to_reference_image(&bmp, palette_mode.into());
                inspect_image(out, &bmp, &reference, palette_mode.into()).map_err(report_err)
            } else if bytes.starts_with(&payload::MAGIC) {
                let file = payload::deserialize(&bytes).map_err(|source| CliError::Payload {
                    path: path.clone(),
                    source,
                })?;
                inspect_payload(out, &file).map_err(report_err)
            } else {
                Err(CliError::UnknownFile(path))
            }
        }
        Command::Send {
            image,
            payload,
            addr_a,
            addr_b,
        } => {
            let image = read_input(&image)?;
            let payload = read_input(&payload)?;
            transport::send_tcp(&image, &payload, addr_a.as_str(), addr_b.as_str())?;
            Ok(())
        }
        Command::Recv {
            listen_a,
            listen_b,
            message_out,
            timeout,
        } => {
            let timeout = Duration::from_secs(timeout);
            let bind = |addr: &str| {
                TcpListenChannel::bind(addr, Some(timeout)).map_err(|source| CliError::Listen {
                    addr: addr.to_owned(),
                    source,
                })
            };
            let a = bind(&listen_a)?;
            let b = bind(&listen_b)?;
            let message = transport::receive_session(a, b, ReceiveOptions { timeout })?;
            write_output(&message_out, &message)
        }
    }
}

fn inspect_image<W: Write>(
    out: &mut W,
    bmp: &crate::Bmp4Image,
    reference: &ReferenceImage,
    mode: PaletteMode,
) -> io::Result<()> {
    writeln!(out, "type: BMP (4-bit indexed)")?;
    writeln!(out, "dimensions: {}x{}", bmp.width(), bmp.height())?;
    writeln!(out, "palette mode: {mode:?}")?;
    let hist = reference.histogram();
    writeln!(out, "shade histogram:")?;
    for (code, count) in crate::GreyCode2::ALL.iter().zip(hist) {
        writeln!(
            out,
            "  shade {:>2}: {count}",
            crate::code2_to_grey_shade(*code).value()
        )?;
    }
    let index = build_index(reference);
    writeln!(out, "bucket sizes:")?;
    for (code, size) in crate::GreyCode2::ALL.iter().zip(index.bucket_sizes()) {
        writeln!(out, "  code {code}: {size}")?;
    }
    let missing: Vec<String> = index.missing_codes().map(|c| c.to_string()).collect();
    if missing.is_empty() {
        writeln!(out, "usable for any message: yes")
    } else {
        writeln!(
            out,
            "usable for any message: no (missing codes {})",
            missing.join(", ")
        )
    }
}

fn inspect_payload<W: Write>(out: &mut W, file: &PayloadFile) -> io::Result<()> {
    writeln!(out, "type: RSTG payload")?;
    writeln!(out, "version: {}", file.version())?;
    writeln!(out, "message_length: {}", file.message_length())?;
    writeln!(out, "records: {}", file.records().len())?;
    writeln!(out, "size: {} bytes", file.encoded_len())?;
    for (i, r) in file.records().iter().take(INSPECT_RECORDS).enumerate() {
        writeln!(out, "  #{i}: x={} y={}", r.x, r.y)?;
    }
    if file.records().len() > INSPECT_RECORDS {
        writeln!(out, "  ... {} more", file.records().len() - INSPECT_RECORDS)?;
    }
    Ok(())
}
