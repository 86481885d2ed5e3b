//! The three protocol roles as explicit state machines.
//!
//! Messages flow client → gateway → server → gateway → client (M1..M4). In
//! the [`Variant::Patched`] protocol the client additionally returns a key
//! confirmation (M5) to the gateway, which reports a [`ConfirmVerdict`] to
//! the server so that failed sessions become countable.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::group::{GroupElement, GroupError};
use crate::hash::{auth_h2, kdf_h1, AuthTag, HashInput, SessionKey};
use crate::nizk::NizkError;

mod client;
mod gateway;
mod message;
mod server;

pub use client::{ClientOutcome, ClientPhase, ClientState};
pub use gateway::{GatewayPhase, GatewayState};
pub use message::{ConfirmVerdict, ProtocolMessage, WireMessage, M1, M2, M3, M4, M5};
pub use server::{
    Decision, ServerEvent, ServerPasswordDb, ServerPhase, ServerSession, ServerState,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    /// M1..M4, no key confirmation from the client.
    Original,
    /// M1..M5 with the client authenticator checked on the gateway and the
    /// outcome counted by the server.
    Patched,
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Variant::Original => f.write_str("original"),
            Variant::Patched => f.write_str("patched"),
        }
    }
}

impl FromStr for Variant {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "original" => Ok(Variant::Original),
            "patched" => Ok(Variant::Patched),
            other => Err(format!("unknown variant {other:?}")),
        }
    }
}

/// Party identifier (ID_C or ID_G).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Identity(String);

impl Identity {
    pub fn new(id: impl Into<String>) -> Self {
        Identity(id.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn as_bytes(&self) -> &[u8] {
        self.0.as_bytes()
    }
}

impl fmt::Display for Identity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Password(String);

impl Password {
    pub fn new(pw: impl Into<String>) -> Self {
        Password(pw.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn as_bytes(&self) -> &[u8] {
        self.0.as_bytes()
    }
}

impl fmt::Debug for Password {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("Password(..)")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SessionIds {
    pub client: Identity,
    pub gateway: Identity,
}

impl SessionIds {
    pub fn new(client: impl Into<String>, gateway: impl Into<String>) -> Self {
        SessionIds {
            client: Identity::new(client),
            gateway: Identity::new(gateway),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProofLabel {
    Pi1,
    Pi2,
}

impl fmt::Display for ProofLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProofLabel::Pi1 => f.write_str("pi1"),
            ProofLabel::Pi2 => f.write_str("pi2"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProtocolError {
    #[error("malformed message: {0}")]
    MalformedMessage(String),
    #[error("invalid group element: {0}")]
    InvalidElement(GroupError),
    #[error("unknown client {0}")]
    UnknownClient(Identity),
    #[error("proof {0} does not verify")]
    InvalidProof(ProofLabel),
    #[error("AuthG does not match the locally computed value")]
    AuthGMismatch,
    #[error("expected {expected}, got {got}")]
    UnexpectedMessage {
        expected: &'static str,
        got: &'static str,
    },
    #[error("message names {got}, expected {expected}")]
    UnexpectedIdentity { expected: Identity, got: Identity },
    #[error("step is not valid in phase {0}")]
    WrongPhase(&'static str),
    #[error("step is not part of the {0} protocol")]
    VariantMismatch(Variant),
    #[error("{0} was not delivered")]
    MessageLost(&'static str),
    #[error("degenerate secret: blinded element is the identity")]
    DegenerateSecret,
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Nizk(#[from] NizkError),
}

fn transcript_hash_input(
    first: &Identity,
    second: &Identity,
    x_star: &GroupElement,
    y_bar: &GroupElement,
    k: &GroupElement,
) -> HashInput {
    HashInput::new(b"")
        .field(first.as_bytes())
        .field(second.as_bytes())
        .field(x_star.to_bytes())
        .field(y_bar.to_bytes())
        .field(k.to_bytes())
}

/// `AuthG = h2(ID_C, ID_G, X*, Ybar, K)`.
pub fn auth_g(
    ids: &SessionIds,
    x_star: &GroupElement,
    y_bar: &GroupElement,
    k: &GroupElement,
) -> AuthTag {
    auth_h2(&transcript_hash_input(
        &ids.client,
        &ids.gateway,
        x_star,
        y_bar,
        k,
    ))
}

/// `AuthC = h2(ID_G, ID_C, X*, Ybar, K)`. The identity order is swapped
/// relative to AuthG.
pub fn auth_c(
    ids: &SessionIds,
    x_star: &GroupElement,
    y_bar: &GroupElement,
    k: &GroupElement,
) -> AuthTag {
    auth_h2(&transcript_hash_input(
        &ids.gateway,
        &ids.client,
        x_star,
        y_bar,
        k,
    ))
}

/// `sk = h1(ID_C, ID_G, X*, Ybar, K)`.
pub fn session_key(
    ids: &SessionIds,
    x_star: &GroupElement,
    y_bar: &GroupElement,
    k: &GroupElement,
) -> SessionKey {
    kdf_h1(&transcript_hash_input(
        &ids.client,
        &ids.gateway,
        x_star,
        y_bar,
        k,
    ))
}
