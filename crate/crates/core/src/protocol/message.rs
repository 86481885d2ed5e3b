use serde::{Deserialize, Serialize};

use crate::group::{GroupElement, GroupError, GroupParams};
use crate::hash::AuthTag;
use crate::nizk::SchnorrProof;

use super::{Identity, ProtocolError};

/// `{ID_C, X*}`, client to gateway.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct M1 {
    pub id_c: Identity,
    pub x_star: GroupElement,
}

/// `{ID_C, ID_G, X*}`, gateway to server.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct M2 {
    pub id_c: Identity,
    pub id_g: Identity,
    pub x_star: GroupElement,
}

/// `{Xbar, h, pi1}`, server to gateway.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct M3 {
    pub x_bar: GroupElement,
    pub h: GroupElement,
    pub pi1: SchnorrProof,
}

/// `{ID_G, h, Ybar, AuthG, pi1, pi2}`, gateway to client.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct M4 {
    pub id_g: Identity,
    pub h: GroupElement,
    pub y_bar: GroupElement,
    pub auth_g: AuthTag,
    pub pi1: SchnorrProof,
    pub pi2: SchnorrProof,
}

/// `{AuthC}`, client to gateway (patched protocol only).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct M5 {
    pub auth_c: AuthTag,
}

/// Gateway to server: whether the client's key confirmation checked out.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConfirmVerdict {
    pub accepted: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ProtocolMessage {
    M1(M1),
    M2(M2),
    M3(M3),
    M4(M4),
    M5(M5),
    ConfirmVerdict(ConfirmVerdict),
}

/// JSON wire form. Elements, scalars, proofs and tags are lowercase hex of
/// their fixed-width encodings.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type")]
pub enum WireMessage {
    M1 {
        id_c: String,
        x_star: String,
    },
    M2 {
        id_c: String,
        id_g: String,
        x_star: String,
    },
    M3 {
        x_bar: String,
        h: String,
        pi1: String,
    },
    M4 {
        id_g: String,
        h: String,
        y_bar: String,
        auth_g: String,
        pi1: String,
        pi2: String,
    },
    M5 {
        auth_c: String,
    },
    ConfirmVerdict {
        accepted: bool,
    },
}

impl WireMessage {
    pub fn kind(&self) -> &'static str {
        match self {
            WireMessage::M1 { .. } => "M1",
            WireMessage::M2 { .. } => "M2",
            WireMessage::M3 { .. } => "M3",
            WireMessage::M4 { .. } => "M4",
            WireMessage::M5 { .. } => "M5",
            WireMessage::ConfirmVerdict { .. } => "ConfirmVerdict",
        }
    }

    /// Compact JSON with sorted keys.
    pub fn to_json(&self) -> String {
        let value = serde_json::to_value(self).expect("wire messages serialize");
        value.to_string()
    }

    pub fn from_json(s: &str) -> Result<Self, ProtocolError> {
        serde_json::from_str(s).map_err(|e| ProtocolError::MalformedMessage(e.to_string()))
    }

    /// Decodes and validates every field against `params`.
    pub fn decode(&self, params: &GroupParams) -> Result<ProtocolMessage, ProtocolError> {
        Ok(match self {
            WireMessage::M1 { id_c, x_star } => ProtocolMessage::M1(M1 {
                id_c: identity(id_c)?,
                x_star: element(params, x_star)?,
            }),
            WireMessage::M2 { id_c, id_g, x_star } => ProtocolMessage::M2(M2 {
                id_c: identity(id_c)?,
                id_g: identity(id_g)?,
                x_star: element(params, x_star)?,
            }),
            WireMessage::M3 { x_bar, h, pi1 } => ProtocolMessage::M3(M3 {
                x_bar: element(params, x_bar)?,
                h: element(params, h)?,
                pi1: proof(params, pi1)?,
            }),
            WireMessage::M4 {
                id_g,
                h,
                y_bar,
                auth_g,
                pi1,
                pi2,
            } => ProtocolMessage::M4(M4 {
                id_g: identity(id_g)?,
                h: element(params, h)?,
                y_bar: element(params, y_bar)?,
                auth_g: tag(auth_g)?,
                pi1: proof(params, pi1)?,
                pi2: proof(params, pi2)?,
            }),
            WireMessage::M5 { auth_c } => ProtocolMessage::M5(M5 {
                auth_c: tag(auth_c)?,
            }),
            WireMessage::ConfirmVerdict { accepted } => {
                ProtocolMessage::ConfirmVerdict(ConfirmVerdict {
                    accepted: *accepted,
                })
            }
        })
    }
}

fn identity(s: &str) -> Result<Identity, ProtocolError> {
    if s.is_empty() {
        return Err(ProtocolError::MalformedMessage("empty identity".into()));
    }
    Ok(Identity::new(s))
}

fn hex_bytes(s: &str) -> Result<Vec<u8>, ProtocolError> {
    hex::decode(s).map_err(|e| ProtocolError::MalformedMessage(format!("bad hex: {e}")))
}

fn map_group(e: GroupError) -> ProtocolError {
    match e {
        GroupError::BadLength { .. } | GroupError::ScalarOutOfRange => {
            ProtocolError::MalformedMessage(e.to_string())
        }
        other => ProtocolError::InvalidElement(other),
    }
}

fn element(params: &GroupParams, s: &str) -> Result<GroupElement, ProtocolError> {
    params.element_from_bytes(&hex_bytes(s)?).map_err(map_group)
}

fn proof(params: &GroupParams, s: &str) -> Result<SchnorrProof, ProtocolError> {
    SchnorrProof::from_bytes(params, &hex_bytes(s)?).map_err(map_group)
}

fn tag(s: &str) -> Result<AuthTag, ProtocolError> {
    AuthTag::from_hex(s).map_err(|e| ProtocolError::MalformedMessage(format!("bad tag: {e}")))
}

macro_rules! expect_variant {
    ($fn_name:ident, $variant:ident, $ty:ty) => {
        pub fn $fn_name(self) -> Result<$ty, ProtocolError> {
            match self {
                ProtocolMessage::$variant(m) => Ok(m),
                other => Err(ProtocolError::UnexpectedMessage {
                    expected: stringify!($variant),
                    got: other.kind(),
                }),
            }
        }
    };
}

impl ProtocolMessage {
    pub fn kind(&self) -> &'static str {
        match self {
            ProtocolMessage::M1(_) => "M1",
            ProtocolMessage::M2(_) => "M2",
            ProtocolMessage::M3(_) => "M3",
            ProtocolMessage::M4(_) => "M4",
            ProtocolMessage::M5(_) => "M5",
            ProtocolMessage::ConfirmVerdict(_) => "ConfirmVerdict",
        }
    }

    pub fn to_wire(&self) -> WireMessage {
        match self {
            ProtocolMessage::M1(m) => WireMessage::M1 {
                id_c: m.id_c.as_str().to_owned(),
                x_star: hex::encode(m.x_star.to_bytes()),
            },
            ProtocolMessage::M2(m) => WireMessage::M2 {
                id_c: m.id_c.as_str().to_owned(),
                id_g: m.id_g.as_str().to_owned(),
                x_star: hex::encode(m.x_star.to_bytes()),
            },
            ProtocolMessage::M3(m) => WireMessage::M3 {
                x_bar: hex::encode(m.x_bar.to_bytes()),
                h: hex::encode(m.h.to_bytes()),
                pi1: hex::encode(m.pi1.to_bytes()),
            },
            ProtocolMessage::M4(m) => WireMessage::M4 {
                id_g: m.id_g.as_str().to_owned(),
                h: hex::encode(m.h.to_bytes()),
                y_bar: hex::encode(m.y_bar.to_bytes()),
                auth_g: m.auth_g.to_hex(),
                pi1: hex::encode(m.pi1.to_bytes()),
                pi2: hex::encode(m.pi2.to_bytes()),
            },
            ProtocolMessage::M5(m) => WireMessage::M5 {
                auth_c: m.auth_c.to_hex(),
            },
            ProtocolMessage::ConfirmVerdict(v) => WireMessage::ConfirmVerdict {
                accepted: v.accepted,
            },
        }
    }

    expect_variant!(into_m1, M1, M1);
    expect_variant!(into_m2, M2, M2);
    expect_variant!(into_m3, M3, M3);
    expect_variant!(into_m4, M4, M4);
    expect_variant!(into_m5, M5, M5);
    expect_variant!(into_verdict, ConfirmVerdict, ConfirmVerdict);
}

impl From<M1> for ProtocolMessage {
    fn from(m: M1) -> Self {
        ProtocolMessage::M1(m)
    }
}

impl From<M2> for ProtocolMessage {
    fn from(m: M2) -> Self {
        ProtocolMessage::M2(m)
    }
}

impl From<M3> for ProtocolMessage {
    fn from(m: M3) -> Self {
        ProtocolMessage::M3(m)
    }
}

impl From<M4> for ProtocolMessage {
    fn from(m: M4) -> Self {
        ProtocolMessage::M4(m)
    }
}

impl From<M5> for ProtocolMessage {
    fn from(m: M5) -> Self {
        ProtocolMessage::M5(m)
    }
}

impl From<ConfirmVerdict> for ProtocolMessage {
    fn from(v: ConfirmVerdict) -> Self {
        ProtocolMessage::ConfirmVerdict(v)
    }
}
