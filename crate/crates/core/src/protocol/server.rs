use std::collections::BTreeMap;

use rand::Rng;

use crate::group::{GroupElement, GroupParams, Scalar};
use crate::nizk::{nizk_prove, DlogStatement};

use super::client::password_element;
use super::{ConfirmVerdict, Identity, Password, ProtocolError, SessionIds, Variant, M2, M3};

/// Passwords the server shares with its clients.
#[derive(Debug, Clone, Default)]
pub struct ServerPasswordDb {
    entries: BTreeMap<Identity, Password>,
}

impl ServerPasswordDb {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, id: Identity, pw: Password) {
        self.entries.insert(id, pw);
    }

    pub fn contains(&self, id: &Identity) -> bool {
        self.entries.contains_key(id)
    }

    fn lookup(&self, id: &Identity) -> Option<&Password> {
        self.entries.get(id)
    }
}

impl FromIterator<(Identity, Password)> for ServerPasswordDb {
    fn from_iter<T: IntoIterator<Item = (Identity, Password)>>(iter: T) -> Self {
        ServerPasswordDb {
            entries: iter.into_iter().collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ServerPhase {
    AwaitingM2,
    /// Original protocol: M3 sent, nothing further is ever observed.
    Completed,
    AwaitingVerdict,
    Accepted,
    Rejected,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ServerEvent {
    M2Received,
    VerdictAccepted,
    VerdictRejected,
}

impl ServerPhase {
    pub const ALL: [ServerPhase; 5] = [
        ServerPhase::AwaitingM2,
        ServerPhase::Completed,
        ServerPhase::AwaitingVerdict,
        ServerPhase::Accepted,
        ServerPhase::Rejected,
    ];

    /// The server's complete transition table. `None` means the event is not
    /// accepted in that phase.
    pub fn next(self, variant: Variant, event: ServerEvent) -> Option<ServerPhase> {
        use ServerEvent::*;
        use ServerPhase::*;
        match (variant, self, event) {
            (Variant::Original, AwaitingM2, M2Received) => Some(Completed),
            (Variant::Patched, AwaitingM2, M2Received) => Some(AwaitingVerdict),
            (Variant::Patched, AwaitingVerdict, VerdictAccepted) => Some(Accepted),
            (Variant::Patched, AwaitingVerdict, VerdictRejected) => Some(Rejected),
            _ => None,
        }
    }
}

impl ServerEvent {
    pub const ALL: [ServerEvent; 3] = [
        ServerEvent::M2Received,
        ServerEvent::VerdictAccepted,
        ServerEvent::VerdictRejected,
    ];
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Decision {
    Accept,
    Reject,
}

/// Per-session server state. The exponent `s` never leaves this value.
#[derive(Debug, Clone)]
pub struct ServerSession {
    ids: SessionIds,
    #[allow(dead_code)]
    s: Scalar,
    x_bar: GroupElement,
    h: GroupElement,
    phase: ServerPhase,
}

impl ServerSession {
    pub fn ids(&self) -> &SessionIds {
        &self.ids
    }

    pub fn x_bar(&self) -> &GroupElement {
        &self.x_bar
    }

    pub fn h(&self) -> &GroupElement {
        &self.h
    }

    pub fn phase(&self) -> ServerPhase {
        self.phase
    }
}

/// Long-lived authentication server: password database plus the failure
/// counter that makes guessing visible.
#[derive(Debug, Clone)]
pub struct ServerState {
    params: GroupParams,
    variant: Variant,
    db: ServerPasswordDb,
    failure_count: u64,
}

impl ServerState {
    pub fn new(params: &GroupParams, variant: Variant, db: ServerPasswordDb) -> Self {
        ServerState {
            params: params.clone(),
            variant,
            db,
            failure_count: 0,
        }
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    pub fn failure_count(&self) -> u64 {
        self.failure_count
    }

    /// Answers M2 with `M3 = {Xbar, h, pi1}`. Nothing in this step can detect
    /// a wrong password.
    pub fn process<R: Rng + ?Sized>(
        &self,
        m2: &M2,
        rng: &mut R,
    ) -> Result<(ServerSession, M3), ProtocolError> {
        let s = self.params.random_scalar(rng);
        self.process_with_secret(m2, s, rng)
    }

    /// Like [`ServerState::process`] with a caller-chosen `s`; `rng` only
    /// feeds the proof nonce.
    pub fn process_with_secret<R: Rng + ?Sized>(
        &self,
        m2: &M2,
        s: Scalar,
        rng: &mut R,
    ) -> Result<(ServerSession, M3), ProtocolError> {
        if s.is_zero() {
            return Err(ProtocolError::DegenerateSecret);
        }
        let pw = self
            .db
            .lookup(&m2.id_c)
            .ok_or_else(|| ProtocolError::UnknownClient(m2.id_c.clone()))?;
        let x_star = self
            .params
            .validate_element(m2.x_star.value())
            .map_err(ProtocolError::InvalidElement)?;
        let ids = SessionIds {
            client: m2.id_c.clone(),
            gateway: m2.id_g.clone(),
        };
        let pw_elem = password_element(&self.params, &ids, pw)?;
        let x_bar = x_star.div(&pw_elem)?.pow(&s);
        let h = self.params.generator().pow(&s);
        let stmt = DlogStatement::new(self.params.generator(), h.clone(), x_star.to_bytes());
        let pi1 = nizk_prove(&stmt, &s, rng)?;
        let phase = ServerPhase::AwaitingM2
            .next(self.variant, ServerEvent::M2Received)
            .expect("M2 accepted in initial phase");
        let m3 = M3 {
            x_bar: x_bar.clone(),
            h: h.clone(),
            pi1,
        };
        Ok((
            ServerSession {
                ids,
                s,
                x_bar,
                h,
                phase,
            },
            m3,
        ))
    }

    /// Records the gateway's verdict for a patched session. A rejection
    /// increments the failure counter by exactly one.
    pub fn finalize(
        &mut self,
        session: &mut ServerSession,
        verdict: &ConfirmVerdict,
    ) -> Result<Decision, ProtocolError> {
        if self.variant != Variant::Patched {
            return Err(ProtocolError::VariantMismatch(self.variant));
        }
        let event = if verdict.accepted {
            ServerEvent::VerdictAccepted
        } else {
            ServerEvent::VerdictRejected
        };
        let next = session
            .phase
            .next(self.variant, event)
            .ok_or(ProtocolError::WrongPhase("server not awaiting a verdict"))?;
        session.phase = next;
        Ok(match next {
            ServerPhase::Rejected => {
                self.failure_count += 1;
                Decision::Reject
            }
            _ => Decision::Accept,
        })
    }
}
