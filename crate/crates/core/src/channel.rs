//! In-memory message channel between the roles.
//!
//! Every message is encoded to its JSON wire form, optionally handed to an
//! [`Interceptor`], recorded, and decoded (with full element validation) at
//! the receiving end.

use serde::{Deserialize, Serialize};

use crate::group::GroupParams;
use crate::protocol::{ProtocolError, ProtocolMessage, WireMessage};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Direction {
    #[serde(rename = "C->G")]
    ClientToGateway,
    #[serde(rename = "G->S")]
    GatewayToServer,
    #[serde(rename = "S->G")]
    ServerToGateway,
    #[serde(rename = "G->C")]
    GatewayToClient,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TranscriptEntry {
    pub session: u32,
    pub step: u64,
    pub direction: Direction,
    pub message: WireMessage,
}

/// Hook with full control over messages in transit: return the message to
/// deliver (possibly altered) or `None` to drop it.
pub trait Interceptor {
    fn intercept(&mut self, direction: Direction, message: WireMessage) -> Option<WireMessage>;
}

pub struct Channel<'a> {
    params: GroupParams,
    session: u32,
    next_step: u64,
    entries: Vec<TranscriptEntry>,
    interceptor: Option<&'a mut dyn Interceptor>,
}

impl<'a> Channel<'a> {
    pub fn new(params: &GroupParams) -> Self {
        Channel {
            params: params.clone(),
            session: 0,
            next_step: 0,
            entries: Vec::new(),
            interceptor: None,
        }
    }

    pub fn with_interceptor(params: &GroupParams, interceptor: &'a mut dyn Interceptor) -> Self {
        Channel {
            interceptor: Some(interceptor),
            ..Channel::new(params)
        }
    }

    /// Labels subsequent entries with `session`.
    pub fn begin_session(&mut self, session: u32) {
        self.session = session;
    }

    /// Sends `message` in `direction` and returns what the receiver decodes,
    /// or `None` if the message was dropped in transit.
    pub fn transmit(
        &mut self,
        direction: Direction,
        message: impl Into<ProtocolMessage>,
    ) -> Result<Option<ProtocolMessage>, ProtocolError> {
        let wire = message.into().to_wire();
        let delivered = match self.interceptor.as_mut() {
            Some(hook) => hook.intercept(direction, wire),
            None => Some(wire),
        };
        let step = self.next_step;
        self.next_step += 1;
        let Some(wire) = delivered else {
            return Ok(None);
        };
        let decoded = wire.decode(&self.params);
        self.entries.push(TranscriptEntry {
            session: self.session,
            step,
            direction,
            message: wire,
        });
        decoded.map(Some)
    }

    /// Like [`Channel::transmit`] but a dropped message is an error.
    pub fn deliver(
        &mut self,
        direction: Direction,
        message: impl Into<ProtocolMessage>,
    ) -> Result<ProtocolMessage, ProtocolError> {
        let message = message.into();
        let kind = message.kind();
        self.transmit(direction, message)?
            .ok_or(ProtocolError::MessageLost(kind))
    }

    pub fn entries(&self) -> &[TranscriptEntry] {
        &self.entries
    }

    pub fn into_entries(self) -> Vec<TranscriptEntry> {
        self.entries
    }
}
