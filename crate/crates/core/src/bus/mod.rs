//! Wire protocol for the servo chain, plus a loopback simulator that stands
//! in for the hardware.

mod codec;
mod loopback;
mod servo;

pub use codec::{
    crc16, decode, encode, parse_hex_dump, BusFrame, CodecError, Decoded, Diagnostic,
    DiagnosticKind, DumpParseError, HexDump, Message, Opcode, BROADCAST_ID, CRC_LEN, HEADER_LEN,
    MAX_PAYLOAD, SYNC,
};
pub use loopback::{
    LoopbackBus, ServoKind, SimServo, DEFAULT_MESSAGE_DT, LEFT_PITCH_ID, LEFT_YAW_ID, LINEAR_ID,
    RIGHT_PITCH_ID, RIGHT_YAW_ID, SIM_DT,
};
pub use servo::{step_servo, ServoSimState, DEFAULT_DEADBAND_DEG, DEFAULT_TAU};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::kinematics::{forward_kinematics, inverse_kinematics, FkError, IkError};
use crate::mechanism::{MechanismParams, PlatformCommand, TipPose};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BusDemoOptions {
    pub tau: f64,
    pub deadband_deg: f64,
    /// Idle time between the goal writes and the state reads, s.
    pub settle_time: f64,
}

impl Default for BusDemoOptions {
    fn default() -> Self {
        Self {
            tau: DEFAULT_TAU,
            deadband_deg: DEFAULT_DEADBAND_DEG,
            settle_time: 10.0 * DEFAULT_TAU,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BusDemoError {
    #[error("invalid demo options: {0}")]
    InvalidOptions(&'static str),
    #[error(transparent)]
    Ik(#[from] IkError),
    #[error(transparent)]
    Codec(#[from] CodecError),
    #[error("servo {0} did not reply")]
    MissingReply(u8),
    #[error("settled state has no forward solution: {0}")]
    Fk(#[from] FkError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BusDemoReport {
    pub target: TipPose,
    pub command: PlatformCommand,
    /// Every frame sent, in order.
    pub requests: Vec<Vec<u8>>,
    pub replies: Vec<Vec<u8>>,
    pub settled_left: PlatformCommand,
    pub settled_right: PlatformCommand,
    pub pose_left: TipPose,
    pub pose_right: TipPose,
    /// mm
    pub error_left: f64,
    pub error_right: f64,
    /// `l_c * sin(2 * deadband)`, mm.
    pub bound: f64,
}

impl BusDemoReport {
    pub fn within_bound(&self) -> bool {
        self.error_left <= self.bound && self.error_right <= self.bound
    }
}

/// Solves IK for `target`, drives both platforms over the loopback bus,
/// lets the servos settle and maps the read-back state through FK.
///
/// Both platforms receive the same command, which is the symmetric pinch
/// for a mirrored pair.
pub fn run_bus_demo(
    params: &MechanismParams,
    target: TipPose,
    opts: &BusDemoOptions,
) -> Result<BusDemoReport, BusDemoError> {
    if !(opts.tau > 0.0) {
        return Err(BusDemoError::InvalidOptions("tau must be positive"));
    }
    if !(opts.deadband_deg >= 0.0) {
        return Err(BusDemoError::InvalidOptions(
            "deadband must be non-negative",
        ));
    }
    if !(opts.settle_time >= 0.0) || !opts.settle_time.is_finite() {
        return Err(BusDemoError::InvalidOptions(
            "settle time must be non-negative",
        ));
    }
    let command = inverse_kinematics(params, target)?.command;
    let mut bus = LoopbackBus::new(params, opts.tau, opts.deadband_deg);

    let writes = [
        (
            LEFT_PITCH_ID,
            Message::SetGoalAngle {
                deg: command.pitch_deg,
            },
        ),
        (
            LEFT_YAW_ID,
            Message::SetGoalAngle {
                deg: command.yaw_deg,
            },
        ),
        (
            RIGHT_PITCH_ID,
            Message::SetGoalAngle {
                deg: command.pitch_deg,
            },
        ),
        (
            RIGHT_YAW_ID,
            Message::SetGoalAngle {
                deg: command.yaw_deg,
            },
        ),
        (
            LINEAR_ID,
            Message::SetGoalTravel {
                mm: command.travel_mm,
            },
        ),
    ];
    let mut requests = Vec::new();
    for (id, msg) in writes {
        let bytes = encode(&msg.to_frame(id)?)?;
        bus.feed(&bytes);
        requests.push(bytes);
    }
    bus.advance(opts.settle_time);

    let ids = [
        LEFT_PITCH_ID,
        LEFT_YAW_ID,
        RIGHT_PITCH_ID,
        RIGHT_YAW_ID,
        LINEAR_ID,
    ];
    let mut replies = Vec::new();
    let mut positions = [0.0; 5];
    for (k, id) in ids.into_iter().enumerate() {
        let bytes = encode(&Message::ReadState.to_frame(id)?)?;
        let reply = bus.feed(&bytes);
        requests.push(bytes);
        let frame = decode(&reply)
            .frames
            .into_iter()
            .find(|f| f.id == id)
            .ok_or(BusDemoError::MissingReply(id))?;
        match Message::from_frame(&frame)? {
            Message::StateReply { position, .. } => positions[k] = position,
            _ => return Err(BusDemoError::MissingReply(id)),
        }
        replies.push(reply);
    }
    let settled_left = PlatformCommand::new(positions[0], positions[1], positions[4]);
    let settled_right = PlatformCommand::new(positions[2], positions[3], positions[4]);
    let pose_left = forward_kinematics(params, settled_left)?;
    let pose_right = forward_kinematics(params, settled_right)?;
    Ok(BusDemoReport {
        target,
        command,
        requests,
        replies,
        settled_left,
        settled_right,
        error_left: pose_left.distance(&target),
        error_right: pose_right.distance(&target),
        pose_left,
        pose_right,
        bound: params.chopstick_len * (2.0 * opts.deadband_deg).to_radians().sin(),
    })
}
