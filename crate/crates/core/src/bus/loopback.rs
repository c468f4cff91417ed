use serde::{Deserialize, Serialize};

use super::codec::{decode, encode, BusFrame, Diagnostic, Message, BROADCAST_ID};
use super::servo::{step_servo, ServoSimState, DEFAULT_DEADBAND_DEG, DEFAULT_TAU};
use crate::mechanism::MechanismParams;

pub const LEFT_PITCH_ID: u8 = 1;
pub const LEFT_YAW_ID: u8 = 2;
pub const RIGHT_PITCH_ID: u8 = 3;
pub const RIGHT_YAW_ID: u8 = 4;
pub const LINEAR_ID: u8 = 5;

/// Simulated time charged per handled frame, s.
pub const DEFAULT_MESSAGE_DT: f64 = 0.001;
/// Largest integration step used by [`LoopbackBus::advance`], s.
pub const SIM_DT: f64 = 0.001;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ServoKind {
    Angle,
    Travel,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimServo {
    pub id: u8,
    pub kind: ServoKind,
    pub state: ServoSimState,
}

/// Five simulated servos behind one address space: pitch and yaw for each
/// platform plus the shared leadscrew.
///
/// Frames are handled strictly in arrival order. Only `READ_STATE` to a
/// single known id produces a reply.
#[derive(Debug, Clone)]
pub struct LoopbackBus {
    servos: Vec<SimServo>,
    pending: Vec<u8>,
    diagnostics: Vec<Diagnostic>,
    time: f64,
    pub message_dt: f64,
}

impl LoopbackBus {
    pub fn new(params: &MechanismParams, tau: f64, deadband_deg: f64) -> Self {
        let angle = |id| SimServo {
            id,
            kind: ServoKind::Angle,
            state: ServoSimState::at_rest(0.0, tau, deadband_deg, params.servo_rom),
        };
        let servos = vec![
            angle(LEFT_PITCH_ID),
            angle(LEFT_YAW_ID),
            angle(RIGHT_PITCH_ID),
            angle(RIGHT_YAW_ID),
            SimServo {
                id: LINEAR_ID,
                kind: ServoKind::Travel,
                state: ServoSimState::at_rest(params.travel.min, tau, 0.0, params.travel),
            },
        ];
        Self {
            servos,
            pending: Vec::new(),
            diagnostics: Vec::new(),
            time: 0.0,
            message_dt: DEFAULT_MESSAGE_DT,
        }
    }

    pub fn with_defaults(params: &MechanismParams) -> Self {
        Self::new(params, DEFAULT_TAU, DEFAULT_DEADBAND_DEG)
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn servo(&self, id: u8) -> Option<&SimServo> {
        self.servos.iter().find(|s| s.id == id)
    }

    pub fn servos(&self) -> &[SimServo] {
        &self.servos
    }

    /// Decoder diagnostics accumulated by [`feed`](Self::feed).
    pub fn diagnostics(&self) -> &[Diagnostic] {
        &self.diagnostics
    }

    /// Steps every servo forward by `dt` seconds.
    pub fn advance(&mut self, dt: f64) {
        if !(dt > 0.0) {
            return;
        }
        let steps = (dt / SIM_DT).ceil().max(1.0) as usize;
        let h = dt / steps as f64;
        for _ in 0..steps {
            for s in &mut self.servos {
                s.state = step_servo(s.state, h);
            }
        }
        self.time += dt;
    }

    /// Handles one frame and returns the reply, if any.
    pub fn handle(&mut self, frame: &BusFrame) -> Option<BusFrame> {
        self.advance(self.message_dt);
        // malformed payloads are ignored like unknown ids
        let msg = Message::from_frame(frame).ok()?;
        let broadcast = frame.id == BROADCAST_ID;
        let targets = self
            .servos
            .iter_mut()
            .filter(|s| broadcast || s.id == frame.id);
        match msg {
            Message::SetGoalAngle { deg } => {
                for s in targets.filter(|s| s.kind == ServoKind::Angle) {
                    s.state.set_goal(deg);
                }
                None
            }
            Message::SetGoalTravel { mm } => {
                for s in targets.filter(|s| s.kind == ServoKind::Travel) {
                    s.state.set_goal(mm);
                }
                None
            }
            Message::ReadState if !broadcast => {
                let s = self.servos.iter().find(|s| s.id == frame.id)?;
                Message::StateReply {
                    position: s.state.position,
                    goal: s.state.goal,
                }
                .to_frame(frame.id)
                .ok()
            }
            Message::ReadState | Message::StateReply { .. } => None,
        }
    }

    /// Appends raw bytes to the receive buffer, handles every complete frame
    /// and returns the encoded replies.
    pub fn feed(&mut self, bytes: &[u8]) -> Vec<u8> {
        self.pending.extend_from_slice(bytes);
        let decoded = decode(&self.pending);
        self.pending = decoded.remainder;
        self.diagnostics.extend(
            decoded
                .diagnostics
                .into_iter()
                .filter(|d| !matches!(d.kind, super::codec::DiagnosticKind::TruncatedFrame { .. })),
        );
        let mut out = Vec::new();
        for f in &decoded.frames {
            if let Some(reply) = self.handle(f) {
                out.extend(encode(&reply).expect("replies are well formed"));
            }
        }
        out
    }
}
