//! Frame layout: `FE ED | id | len | opcode | payload[len] | crc16 (LE)`.
//!
//! The CRC is CRC-16/CCITT-FALSE (poly 0x1021, init 0xFFFF, no reflection,
//! no final xor) over `id ..= payload`.

use std::fmt;

use crc::{Crc, CRC_16_IBM_3740};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const SYNC: [u8; 2] = [0xFE, 0xED];
pub const BROADCAST_ID: u8 = 254;
pub const MAX_PAYLOAD: usize = 250;
/// Sync, id, len and opcode.
pub const HEADER_LEN: usize = 5;
pub const CRC_LEN: usize = 2;

const CRC16: Crc<u16> = Crc::<u16>::new(&CRC_16_IBM_3740);

pub fn crc16(bytes: &[u8]) -> u16 {
    CRC16.checksum(bytes)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[repr(u8)]
pub enum Opcode {
    SetGoalAngle = 0x01,
    SetGoalTravel = 0x02,
    ReadState = 0x03,
    StateReply = 0x81,
}

impl Opcode {
    pub fn from_u8(b: u8) -> Option<Self> {
        match b {
            0x01 => Some(Self::SetGoalAngle),
            0x02 => Some(Self::SetGoalTravel),
            0x03 => Some(Self::ReadState),
            0x81 => Some(Self::StateReply),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CodecError {
    #[error("payload of {0} bytes exceeds {MAX_PAYLOAD}")]
    PayloadTooLong(usize),
    #[error("unknown opcode 0x{0:02X}")]
    UnknownOpcode(u8),
    #[error("opcode 0x{opcode:02X} does not take a {len}-byte payload")]
    BadPayload { opcode: u8, len: usize },
    #[error("{value} does not fit the wire range")]
    ValueOutOfRange { value: f64 },
}

/// A raw frame. The payload is not checked against the opcode here; see
/// [`Message`] for the typed layer.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BusFrame {
    pub id: u8,
    pub opcode: u8,
    pub payload: Vec<u8>,
}

impl BusFrame {
    pub fn new(id: u8, opcode: Opcode, payload: Vec<u8>) -> Self {
        Self {
            id,
            opcode: opcode as u8,
            payload,
        }
    }

    pub fn encoded_len(&self) -> usize {
        HEADER_LEN + self.payload.len() + CRC_LEN
    }
}

/// Serializes one frame.
pub fn encode(frame: &BusFrame) -> Result<Vec<u8>, CodecError> {
    if frame.payload.len() > MAX_PAYLOAD {
        return Err(CodecError::PayloadTooLong(frame.payload.len()));
    }
    if Opcode::from_u8(frame.opcode).is_none() {
        return Err(CodecError::UnknownOpcode(frame.opcode));
    }
    let mut out = Vec::with_capacity(frame.encoded_len());
    out.extend_from_slice(&SYNC);
    out.push(frame.id);
    out.push(frame.payload.len() as u8);
    out.push(frame.opcode);
    out.extend_from_slice(&frame.payload);
    let crc = crc16(&out[2..]);
    out.extend_from_slice(&crc.to_le_bytes());
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DiagnosticKind {
    CrcMismatch {
        expected: u16,
        found: u16,
    },
    /// Frame runs past the end of the input; its bytes are returned as the
    /// remainder.
    TruncatedFrame {
        needed: usize,
        available: usize,
    },
    /// Length byte above [`MAX_PAYLOAD`].
    BadLength {
        len: u8,
    },
    /// CRC-valid frame with an opcode outside the protocol.
    UnknownOpcode {
        opcode: u8,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagnostic {
    /// Byte offset of the frame's sync word in the input.
    pub offset: usize,
    #[serde(flatten)]
    pub kind: DiagnosticKind,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Decoded {
    pub frames: Vec<BusFrame>,
    pub diagnostics: Vec<Diagnostic>,
    /// Unconsumed tail: a partial frame, or a lone trailing `0xFE`.
    pub remainder: Vec<u8>,
}

fn find_sync(bytes: &[u8], from: usize) -> Option<usize> {
    bytes
        .get(from..)?
        .windows(2)
        .position(|w| w == SYNC)
        .map(|i| i + from)
}

/// Extracts every valid frame from an arbitrary byte stream.
///
/// Bytes before a sync word are dropped. A frame that fails its CRC is
/// reported and scanning resumes one byte after its sync word.
pub fn decode(bytes: &[u8]) -> Decoded {
    let mut out = Decoded::default();
    let mut pos = 0;
    loop {
        let Some(i) = find_sync(bytes, pos) else {
            if bytes.len() > pos && bytes.last() == Some(&SYNC[0]) {
                out.remainder.push(SYNC[0]);
            }
            return out;
        };
        let avail = bytes.len() - i;
        if avail < HEADER_LEN {
            out.diagnostics.push(Diagnostic {
                offset: i,
                kind: DiagnosticKind::TruncatedFrame {
                    needed: HEADER_LEN,
                    available: avail,
                },
            });
            out.remainder = bytes[i..].to_vec();
            return out;
        }
        let len = bytes[i + 3];
        if len as usize > MAX_PAYLOAD {
            out.diagnostics.push(Diagnostic {
                offset: i,
                kind: DiagnosticKind::BadLength { len },
            });
            pos = i + 1;
            continue;
        }
        let total = HEADER_LEN + len as usize + CRC_LEN;
        if avail < total {
            out.diagnostics.push(Diagnostic {
                offset: i,
                kind: DiagnosticKind::TruncatedFrame {
                    needed: total,
                    available: avail,
                },
            });
            out.remainder = bytes[i..].to_vec();
            return out;
        }
        let body = &bytes[i + 2..i + total - CRC_LEN];
        let expected = crc16(body);
        let found = u16::from_le_bytes([bytes[i + total - 2], bytes[i + total - 1]]);
        if expected != found {
            out.diagnostics.push(Diagnostic {
                offset: i,
                kind: DiagnosticKind::CrcMismatch { expected, found },
            });
            pos = i + 1;
            continue;
        }
        let opcode = body[2];
        if Opcode::from_u8(opcode).is_none() {
            out.diagnostics.push(Diagnostic {
                offset: i,
                kind: DiagnosticKind::UnknownOpcode { opcode },
            });
        } else {
            out.frames.push(BusFrame {
                id: body[0],
                opcode,
                payload: body[3..].to_vec(),
            });
        }
        pos = i + total;
    }
}

/// Typed view of the four protocol messages.
///
/// Angles travel as i16 centi-degrees and travel as u16 centi-mm.
/// A state reply from the linear axis carries centi-mm in the same i16 slots.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum Message {
    SetGoalAngle { deg: f64 },
    SetGoalTravel { mm: f64 },
    ReadState,
    StateReply { position: f64, goal: f64 },
}

fn centi_i16(v: f64) -> Result<[u8; 2], CodecError> {
    let c = (v * 100.0).round();
    if !(c >= i16::MIN as f64 && c <= i16::MAX as f64) {
        return Err(CodecError::ValueOutOfRange { value: v });
    }
    Ok((c as i16).to_le_bytes())
}

fn centi_u16(v: f64) -> Result<[u8; 2], CodecError> {
    let c = (v * 100.0).round();
    if !(c >= 0.0 && c <= u16::MAX as f64) {
        return Err(CodecError::ValueOutOfRange { value: v });
    }
    Ok((c as u16).to_le_bytes())
}

impl Message {
    pub fn opcode(&self) -> Opcode {
        match self {
            Message::SetGoalAngle { .. } => Opcode::SetGoalAngle,
            Message::SetGoalTravel { .. } => Opcode::SetGoalTravel,
            Message::ReadState => Opcode::ReadState,
            Message::StateReply { .. } => Opcode::StateReply,
        }
    }

    pub fn to_frame(&self, id: u8) -> Result<BusFrame, CodecError> {
        let payload = match *self {
            Message::SetGoalAngle { deg } => centi_i16(deg)?.to_vec(),
            Message::SetGoalTravel { mm } => centi_u16(mm)?.to_vec(),
            Message::ReadState => Vec::new(),
            Message::StateReply { position, goal } => {
                let mut p = centi_i16(position)?.to_vec();
                p.extend_from_slice(&centi_i16(goal)?);
                p
            }
        };
        Ok(BusFrame::new(id, self.opcode(), payload))
    }

    pub fn from_frame(frame: &BusFrame) -> Result<Self, CodecError> {
        let op = Opcode::from_u8(frame.opcode).ok_or(CodecError::UnknownOpcode(frame.opcode))?;
        let p = &frame.payload;
        let bad = || CodecError::BadPayload {
            opcode: frame.opcode,
            len: p.len(),
        };
        let i16_at = |k: usize| i16::from_le_bytes([p[k], p[k + 1]]) as f64 / 100.0;
        Ok(match (op, p.len()) {
            (Opcode::SetGoalAngle, 2) => Message::SetGoalAngle { deg: i16_at(0) },
            (Opcode::SetGoalTravel, 2) => Message::SetGoalTravel {
                mm: u16::from_le_bytes([p[0], p[1]]) as f64 / 100.0,
            },
            (Opcode::ReadState, 0) => Message::ReadState,
            (Opcode::StateReply, 4) => Message::StateReply {
                position: i16_at(0),
                goal: i16_at(2),
            },
            _ => return Err(bad()),
        })
    }
}

/// One frame per line as space-separated upper-case hex bytes.
pub struct HexDump<'a>(pub &'a [Vec<u8>]);

impl fmt::Display for HexDump<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for frame in self.0 {
            let mut first = true;
            for b in frame {
                if !first {
                    f.write_str(" ")?;
                }
                first = false;
                write!(f, "{b:02X}")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: bad hex byte {token:?}")]
pub struct DumpParseError {
    pub line: usize,
    pub token: String,
}

/// Parses the hex dump format. Blank lines and `#` comments are skipped.
pub fn parse_hex_dump(text: &str) -> Result<Vec<Vec<u8>>, DumpParseError> {
    let mut out = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let bytes = line
            .split_whitespace()
            .map(|t| {
                (t.len() == 2)
                    .then(|| u8::from_str_radix(t, 16).ok())
                    .flatten()
                    .ok_or_else(|| DumpParseError {
                        line: n + 1,
                        token: t.to_string(),
                    })
            })
            .collect::<Result<Vec<u8>, _>>()?;
        out.push(bytes);
    }
    Ok(out)
}
