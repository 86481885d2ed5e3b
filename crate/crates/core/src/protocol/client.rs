use rand::Rng;

use crate::group::{GroupElement, GroupParams, Scalar};
use crate::hash::{hash_to_group, SessionKey};
use crate::nizk::{nizk_verify, DlogStatement};

use super::{
    auth_c, auth_g, session_key, Password, ProofLabel, ProtocolError, SessionIds, Variant, M1, M4,
    M5,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClientPhase {
    Started,
    Finished,
    Aborted,
}

/// What an honest client ends a session with.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClientOutcome {
    pub session_key: SessionKey,
    /// Present only in the patched protocol.
    pub confirmation: Option<M5>,
}

#[derive(Debug, Clone)]
pub struct ClientState {
    params: GroupParams,
    variant: Variant,
    ids: SessionIds,
    x: Scalar,
    x_star: GroupElement,
    phase: ClientPhase,
}

impl ClientState {
    /// Draws `x` and emits `M1 = {ID_C, X*}` with `X* = g^x * H(ID_C, ID_G, pw)`.
    ///
    /// An `x` that would make `X*` the identity is redrawn, since gateways
    /// refuse identity elements.
    pub fn start<R: Rng + ?Sized>(
        params: &GroupParams,
        variant: Variant,
        ids: SessionIds,
        password: Password,
        rng: &mut R,
    ) -> Result<(ClientState, M1), ProtocolError> {
        let pw_elem = password_element(params, &ids, &password)?;
        loop {
            let x = params.random_scalar(rng);
            let x_star = params.generator().pow(&x).mul(&pw_elem)?;
            if !x_star.is_identity() {
                return Ok(Self::assemble(params, variant, ids, x, x_star));
            }
        }
    }

    /// Like [`ClientState::start`] with a caller-chosen `x`.
    pub fn start_with_secret(
        params: &GroupParams,
        variant: Variant,
        ids: SessionIds,
        password: Password,
        x: Scalar,
    ) -> Result<(ClientState, M1), ProtocolError> {
        let pw_elem = password_element(params, &ids, &password)?;
        let x_star = params.generator().pow(&x).mul(&pw_elem)?;
        if x.is_zero() || x_star.is_identity() {
            return Err(ProtocolError::DegenerateSecret);
        }
        Ok(Self::assemble(params, variant, ids, x, x_star))
    }

    fn assemble(
        params: &GroupParams,
        variant: Variant,
        ids: SessionIds,
        x: Scalar,
        x_star: GroupElement,
    ) -> (ClientState, M1) {
        let m1 = M1 {
            id_c: ids.client.clone(),
            x_star: x_star.clone(),
        };
        let state = ClientState {
            params: params.clone(),
            variant,
            ids,
            x,
            x_star,
            phase: ClientPhase::Started,
        };
        (state, m1)
    }

    pub fn phase(&self) -> ClientPhase {
        self.phase
    }

    pub fn x_star(&self) -> &GroupElement {
        &self.x_star
    }

    /// Processes M4. Checks run in order: AuthG, then pi1, then pi2; the
    /// first failure aborts the session before any key is derived.
    pub fn finish(&mut self, m4: &M4) -> Result<ClientOutcome, ProtocolError> {
        if self.phase != ClientPhase::Started {
            return Err(ProtocolError::WrongPhase("client not started"));
        }
        let result = self.check_m4(m4);
        self.phase = match result {
            Ok(_) => ClientPhase::Finished,
            Err(_) => ClientPhase::Aborted,
        };
        result
    }

    fn check_m4(&self, m4: &M4) -> Result<ClientOutcome, ProtocolError> {
        if m4.id_g != self.ids.gateway {
            return Err(ProtocolError::UnexpectedIdentity {
                expected: self.ids.gateway.clone(),
                got: m4.id_g.clone(),
            });
        }
        let k_c = m4.y_bar.pow(&self.x);
        if m4.auth_g != auth_g(&self.ids, &self.x_star, &m4.y_bar, &k_c) {
            return Err(ProtocolError::AuthGMismatch);
        }
        let bound = self.x_star.to_bytes();
        let pi1_stmt = DlogStatement::new(self.params.generator(), m4.h.clone(), bound.clone());
        if !nizk_verify(&pi1_stmt, &m4.pi1) {
            return Err(ProtocolError::InvalidProof(ProofLabel::Pi1));
        }
        let pi2_stmt = DlogStatement::new(m4.h.clone(), m4.y_bar.clone(), bound);
        if !nizk_verify(&pi2_stmt, &m4.pi2) {
            return Err(ProtocolError::InvalidProof(ProofLabel::Pi2));
        }
        let confirmation = match self.variant {
            Variant::Original => None,
            Variant::Patched => Some(M5 {
                auth_c: auth_c(&self.ids, &self.x_star, &m4.y_bar, &k_c),
            }),
        };
        Ok(ClientOutcome {
            session_key: session_key(&self.ids, &self.x_star, &m4.y_bar, &k_c),
            confirmation,
        })
    }
}

pub(crate) fn password_element(
    params: &GroupParams,
    ids: &SessionIds,
    password: &Password,
) -> Result<GroupElement, ProtocolError> {
    Ok(hash_to_group(
        params,
        ids.client.as_bytes(),
        ids.gateway.as_bytes(),
        password.as_bytes(),
    )?)
}
