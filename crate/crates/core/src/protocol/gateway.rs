use rand::Rng;

use crate::group::{GroupElement, GroupParams, Scalar};
use crate::hash::SessionKey;
use crate::nizk::{nizk_prove, nizk_verify, DlogStatement};

use super::{
    auth_c, auth_g, session_key, ConfirmVerdict, Identity, ProofLabel, ProtocolError, SessionIds,
    Variant, M1, M2, M3, M4, M5,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GatewayPhase {
    AwaitingM3,
    AwaitingConfirmation,
    Finished,
    Aborted,
}

#[derive(Debug, Clone)]
struct GatewayKeys {
    y_bar: GroupElement,
    k_g: GroupElement,
    sk_g: SessionKey,
}

#[derive(Debug, Clone)]
pub struct GatewayState {
    params: GroupParams,
    variant: Variant,
    ids: SessionIds,
    x_star: GroupElement,
    phase: GatewayPhase,
    keys: Option<GatewayKeys>,
}

impl GatewayState {
    /// Receives M1 and relays `M2 = {ID_C, ID_G, X*}` to the server.
    pub fn forward(
        params: &GroupParams,
        variant: Variant,
        id_g: Identity,
        m1: &M1,
    ) -> Result<(GatewayState, M2), ProtocolError> {
        if m1.x_star.params() != params {
            return Err(ProtocolError::MalformedMessage(
                "X* from a different group".into(),
            ));
        }
        let x_star = params
            .validate_element(m1.x_star.value())
            .map_err(ProtocolError::InvalidElement)?;
        let m2 = M2 {
            id_c: m1.id_c.clone(),
            id_g: id_g.clone(),
            x_star: x_star.clone(),
        };
        let state = GatewayState {
            params: params.clone(),
            variant,
            ids: SessionIds {
                client: m1.id_c.clone(),
                gateway: id_g,
            },
            x_star,
            phase: GatewayPhase::AwaitingM3,
            keys: None,
        };
        Ok((state, m2))
    }

    /// Receives M3, checks pi1 and answers the client with M4.
    pub fn respond<R: Rng + ?Sized>(&mut self, m3: &M3, rng: &mut R) -> Result<M4, ProtocolError> {
        let y = self.params.random_scalar(rng);
        self.respond_with_secret(m3, y, rng)
    }

    /// Like [`GatewayState::respond`] with a caller-chosen `y`; `rng` only
    /// feeds the proof nonce.
    pub fn respond_with_secret<R: Rng + ?Sized>(
        &mut self,
        m3: &M3,
        y: Scalar,
        rng: &mut R,
    ) -> Result<M4, ProtocolError> {
        if self.phase != GatewayPhase::AwaitingM3 {
            return Err(ProtocolError::WrongPhase("gateway not awaiting M3"));
        }
        let result = self.build_m4(m3, y, rng);
        match &result {
            Ok(_) => {
                self.phase = match self.variant {
                    Variant::Original => GatewayPhase::Finished,
                    Variant::Patched => GatewayPhase::AwaitingConfirmation,
                }
            }
            Err(_) => self.phase = GatewayPhase::Aborted,
        }
        result
    }

    fn build_m4<R: Rng + ?Sized>(
        &mut self,
        m3: &M3,
        y: Scalar,
        rng: &mut R,
    ) -> Result<M4, ProtocolError> {
        if y.is_zero() {
            return Err(ProtocolError::DegenerateSecret);
        }
        for e in [&m3.x_bar, &m3.h] {
            self.params
                .validate_element(e.value())
                .map_err(ProtocolError::InvalidElement)?;
        }
        let bound = self.x_star.to_bytes();
        let pi1_stmt = DlogStatement::new(self.params.generator(), m3.h.clone(), bound.clone());
        if !nizk_verify(&pi1_stmt, &m3.pi1) {
            return Err(ProtocolError::InvalidProof(ProofLabel::Pi1));
        }
        let y_bar = m3.h.pow(&y);
        let k_g = m3.x_bar.pow(&y);
        let tag = auth_g(&self.ids, &self.x_star, &y_bar, &k_g);
        let sk_g = session_key(&self.ids, &self.x_star, &y_bar, &k_g);
        // Proves knowledge of y = log_h(Ybar); log_g(Ybar) = s*y is unknown here.
        let pi2_stmt = DlogStatement::new(m3.h.clone(), y_bar.clone(), bound);
        let pi2 = nizk_prove(&pi2_stmt, &y, rng)?;
        self.keys = Some(GatewayKeys {
            y_bar: y_bar.clone(),
            k_g,
            sk_g,
        });
        Ok(M4 {
            id_g: self.ids.gateway.clone(),
            h: m3.h.clone(),
            y_bar,
            auth_g: tag,
            pi1: m3.pi1.clone(),
            pi2,
        })
    }

    /// Checks the client's key confirmation. `None` means no M5 arrived
    /// before the session was closed, which counts as a failure, as does a
    /// session that aborted before M4 was sent.
    pub fn confirm(&mut self, m5: Option<&M5>) -> Result<ConfirmVerdict, ProtocolError> {
        if self.variant != Variant::Patched {
            return Err(ProtocolError::VariantMismatch(self.variant));
        }
        let accepted = match self.phase {
            GatewayPhase::AwaitingConfirmation => {
                let keys = self.keys.as_ref().expect("keys set before confirmation");
                let expected = auth_c(&self.ids, &self.x_star, &keys.y_bar, &keys.k_g);
                m5.is_some_and(|m| m.auth_c == expected)
            }
            GatewayPhase::AwaitingM3 | GatewayPhase::Aborted => false,
            GatewayPhase::Finished => {
                return Err(ProtocolError::WrongPhase(
                    "gateway session already confirmed",
                ))
            }
        };
        self.phase = if accepted {
            GatewayPhase::Finished
        } else {
            GatewayPhase::Aborted
        };
        Ok(ConfirmVerdict { accepted })
    }

    pub fn phase(&self) -> GatewayPhase {
        self.phase
    }

    /// The gateway's key, once the session has finished successfully.
    pub fn session_key(&self) -> Option<SessionKey> {
        match self.phase {
            GatewayPhase::Finished => self.keys.as_ref().map(|k| k.sk_g),
            _ => None,
        }
    }

    /// Key computed in step 4, regardless of confirmation status.
    pub fn derived_key(&self) -> Option<SessionKey> {
        self.keys.as_ref().map(|k| k.sk_g)
    }
}
