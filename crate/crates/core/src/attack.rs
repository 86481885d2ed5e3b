//! On-line dictionary attack by a malicious client.
//!
//! The adversary sits on the client side of the channel. For each guess it
//! blinds `g^x'` with `H(ID_C, ID_G, guess)`, lets the honest gateway and
//! server run their steps, intercepts M4 and recomputes AuthG with
//! `K = Ybar^x'`. A match means the guess is the password. The adversary only
//! ever sees protocol messages; the server's password database is not
//! reachable through any of these functions.

use std::collections::HashSet;

use rand::{Rng, RngCore};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::channel::{Channel, Direction, TranscriptEntry};
use crate::group::{GroupElement, GroupError, GroupParams, Scalar};
use crate::hash::{hash_to_group, AuthTag};
use crate::protocol::{
    auth_c, auth_g, GatewayState, Password, ProtocolError, ServerState, SessionIds, Variant, M1,
    M4, M5,
};
use crate::rng::RoleRngs;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AttackError {
    #[error("dictionary is empty")]
    EmptyDictionary,
    #[error("dictionary contains {0:?} more than once")]
    DuplicateEntry(String),
    #[error("server variant {server} does not match attack variant {attack}")]
    VariantMismatch { server: Variant, attack: Variant },
    #[error(transparent)]
    Protocol(#[from] ProtocolError),
}

/// Ordered, duplicate-free list of candidate passwords.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dictionary {
    words: Vec<Password>,
}

impl Dictionary {
    pub fn new(words: Vec<Password>) -> Result<Self, AttackError> {
        if words.is_empty() {
            return Err(AttackError::EmptyDictionary);
        }
        let mut seen = HashSet::with_capacity(words.len());
        for w in &words {
            if !seen.insert(w.as_str()) {
                return Err(AttackError::DuplicateEntry(w.as_str().to_owned()));
            }
        }
        Ok(Dictionary { words })
    }

    pub fn words(&self) -> &[Password] {
        &self.words
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }
}

/// What the adversary does after M4 when the guess turned out wrong
/// (patched protocol only).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WrongGuessBehavior {
    /// Send no M5.
    #[default]
    Abort,
    /// Send an M5 with a random authenticator.
    SendGarbage,
}

#[derive(Debug, Clone)]
pub struct AttackSetup {
    pub params: GroupParams,
    pub ids: SessionIds,
    pub variant: Variant,
    pub on_wrong_guess: WrongGuessBehavior,
    /// Keep guessing after a hit.
    pub exhaustive: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GuessOutcome {
    pub guess: Password,
    pub correct: bool,
    pub server_observed_failure: bool,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub session_transcript: Vec<TranscriptEntry>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AttackReport {
    pub outcomes: Vec<GuessOutcome>,
    pub sessions_used: usize,
    pub found: Option<Password>,
    pub server_failure_count_delta: u64,
}

impl AttackReport {
    /// Drops per-session transcripts.
    pub fn without_transcripts(mut self) -> Self {
        for o in &mut self.outcomes {
            o.session_transcript.clear();
        }
        self
    }
}

/// True iff `AuthG = h2(ID_C, ID_G, X*, Ybar, Ybar^x')`.
pub fn check_guess(
    ids: &SessionIds,
    m4: &M4,
    x_prime: &Scalar,
    x_star: &GroupElement,
) -> Result<bool, ProtocolError> {
    if m4.id_g != ids.gateway {
        return Err(ProtocolError::MalformedMessage(format!(
            "M4 names gateway {}, expected {}",
            m4.id_g, ids.gateway
        )));
    }
    if m4.y_bar.params() != x_star.params() {
        return Err(ProtocolError::MalformedMessage(
            "M4 elements from a different group".into(),
        ));
    }
    let k = m4.y_bar.pow(x_prime);
    Ok(m4.auth_g == auth_g(ids, x_star, &m4.y_bar, &k))
}

/// Blinds a fresh `g^x'` with the guessed password element.
fn forge_m1<R: Rng + ?Sized>(
    params: &GroupParams,
    ids: &SessionIds,
    guess: &Password,
    rng: &mut R,
) -> Result<(Scalar, M1), ProtocolError> {
    let pw_elem = hash_to_group(
        params,
        ids.client.as_bytes(),
        ids.gateway.as_bytes(),
        guess.as_bytes(),
    )?;
    loop {
        let x_prime = params.random_scalar(rng);
        let x_star = params.generator().pow(&x_prime).mul(&pw_elem)?;
        if !x_star.is_identity() {
            return Ok((
                x_prime,
                M1 {
                    id_c: ids.client.clone(),
                    x_star,
                },
            ));
        }
    }
}

/// Runs one full session with `guess` through the honest gateway and
/// `server`. A wrong guess is reported in the outcome, never as an error.
pub fn attack_guess_session(
    setup: &AttackSetup,
    guess: &Password,
    server: &mut ServerState,
    channel: &mut Channel<'_>,
    rngs: &mut RoleRngs,
) -> Result<GuessOutcome, AttackError> {
    if server.variant() != setup.variant {
        return Err(AttackError::VariantMismatch {
            server: server.variant(),
            attack: setup.variant,
        });
    }
    let params = &setup.params;
    let ids = &setup.ids;
    let first_entry = channel.entries().len();
    let failures_before = server.failure_count();

    let (x_prime, m1) = forge_m1(params, ids, guess, &mut rngs.client)?;
    let x_star = m1.x_star.clone();
    let m1 = channel.deliver(Direction::ClientToGateway, m1)?.into_m1()?;
    let (mut gateway, m2) = GatewayState::forward(params, setup.variant, ids.gateway.clone(), &m1)?;
    let m2 = channel.deliver(Direction::GatewayToServer, m2)?.into_m2()?;
    let (mut session, m3) = server.process(&m2, &mut rngs.server)?;
    let m3 = match channel.deliver(Direction::ServerToGateway, m3) {
        Ok(m) => Some(m.into_m3()?),
        // Xbar = 1 means X* = H(pw), so the guess is wrong; the gateway
        // drops the session.
        Err(ProtocolError::InvalidElement(GroupError::IdentityRejected)) => None,
        Err(e) => return Err(e.into()),
    };
    let mut correct = false;
    let mut m5 = None;
    if let Some(m3) = m3 {
        let m4 = gateway.respond(&m3, &mut rngs.gateway)?;
        // The adversary is the client endpoint, so M4 arrives at it.
        let m4 = channel.deliver(Direction::GatewayToClient, m4)?.into_m4()?;
        correct = check_guess(ids, &m4, &x_prime, &x_star)?;
        m5 = if setup.variant == Variant::Original {
            None
        } else if correct {
            let k = m4.y_bar.pow(&x_prime);
            Some(M5 {
                auth_c: auth_c(ids, &x_star, &m4.y_bar, &k),
            })
        } else {
            match setup.on_wrong_guess {
                WrongGuessBehavior::Abort => None,
                WrongGuessBehavior::SendGarbage => {
                    let mut tag = [0u8; 32];
                    rngs.client.fill_bytes(&mut tag);
                    Some(M5 {
                        auth_c: AuthTag(tag),
                    })
                }
            }
        };
    }

    if setup.variant == Variant::Patched {
        let m5 = match m5 {
            Some(m5) => Some(channel.deliver(Direction::ClientToGateway, m5)?.into_m5()?),
            None => None,
        };
        let verdict = gateway.confirm(m5.as_ref())?;
        let verdict = channel
            .deliver(Direction::GatewayToServer, verdict)?
            .into_verdict()?;
        server.finalize(&mut session, &verdict)?;
    }

    Ok(GuessOutcome {
        guess: guess.clone(),
        correct,
        server_observed_failure: server.failure_count() > failures_before,
        session_transcript: channel.entries()[first_entry..].to_vec(),
    })
}

/// Tries the dictionary in order, one session per guess, stopping at the
/// first hit unless `setup.exhaustive` is set.
pub fn run_dictionary_attack(
    setup: &AttackSetup,
    dictionary: &Dictionary,
    server: &mut ServerState,
    channel: &mut Channel<'_>,
    rngs: &mut RoleRngs,
) -> Result<AttackReport, AttackError> {
    let failures_before = server.failure_count();
    let mut outcomes = Vec::new();
    let mut found = None;
    for (i, guess) in dictionary.words().iter().enumerate() {
        channel.begin_session(i as u32);
        let outcome = attack_guess_session(setup, guess, server, channel, rngs)?;
        let hit = outcome.correct;
        outcomes.push(outcome);
        if hit && found.is_none() {
            found = Some(guess.clone());
            if !setup.exhaustive {
                break;
            }
        }
    }
    Ok(AttackReport {
        sessions_used: outcomes.len(),
        outcomes,
        found,
        server_failure_count_delta: server.failure_count() - failures_before,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocol::{Identity, ServerPasswordDb};

    fn setup(params: &GroupParams, variant: Variant) -> AttackSetup {
        AttackSetup {
            params: params.clone(),
            ids: SessionIds::new("C", "G"),
            variant,
            on_wrong_guess: WrongGuessBehavior::Abort,
            exhaustive: false,
        }
    }

    fn server(params: &GroupParams, variant: Variant, pw: &str) -> ServerState {
        let db: ServerPasswordDb = [(Identity::new("C"), Password::new(pw))]
            .into_iter()
            .collect();
        ServerState::new(params, variant, db)
    }

    fn dict(words: &[&str]) -> Dictionary {
        Dictionary::new(words.iter().map(|w| Password::new(*w)).collect()).unwrap()
    }

    #[test]
    fn dictionary_rejects_empty_and_duplicates() {
        assert_eq!(Dictionary::new(vec![]), Err(AttackError::EmptyDictionary));
        assert_eq!(
            Dictionary::new(vec![Password::new("a"), Password::new("a")]),
            Err(AttackError::DuplicateEntry("a".into()))
        );
    }

    // Toy-group guesses below are chosen with distinct H values
    // (pw2 -> 18, wrong -> 2, guess1 -> 4) so a wrong guess cannot collide.

    #[test]
    fn correct_guess_is_recognised() {
        let toy = GroupParams::toy();
        for variant in [Variant::Original, Variant::Patched] {
            let mut srv = server(&toy, variant, "pw2");
            let mut ch = Channel::new(&toy);
            let mut rngs = RoleRngs::from_seed(1);
            let out = attack_guess_session(
                &setup(&toy, variant),
                &Password::new("pw2"),
                &mut srv,
                &mut ch,
                &mut rngs,
            )
            .unwrap();
            assert!(out.correct);
            assert!(!out.server_observed_failure);
            assert_eq!(srv.failure_count(), 0);
        }
    }

    #[test]
    fn wrong_guess_is_data_not_error() {
        let toy = GroupParams::toy();
        let mut srv = server(&toy, Variant::Original, "pw2");
        let mut ch = Channel::new(&toy);
        let mut rngs = RoleRngs::from_seed(2);
        let out = attack_guess_session(
            &setup(&toy, Variant::Original),
            &Password::new("wrong"),
            &mut srv,
            &mut ch,
            &mut rngs,
        )
        .unwrap();
        assert!(!out.correct);
        assert!(!out.server_observed_failure);
        let kinds: Vec<_> = out
            .session_transcript
            .iter()
            .map(|e| e.message.kind())
            .collect();
        assert_eq!(kinds, ["M1", "M2", "M3", "M4"]);
    }

    #[test]
    fn patched_server_sees_wrong_guess() {
        let toy = GroupParams::toy();
        for behavior in [WrongGuessBehavior::Abort, WrongGuessBehavior::SendGarbage] {
            let mut srv = server(&toy, Variant::Patched, "pw2");
            let mut ch = Channel::new(&toy);
            let mut rngs = RoleRngs::from_seed(3);
            let mut s = setup(&toy, Variant::Patched);
            s.on_wrong_guess = behavior;
            let out =
                attack_guess_session(&s, &Password::new("wrong"), &mut srv, &mut ch, &mut rngs)
                    .unwrap();
            assert!(!out.correct);
            assert!(out.server_observed_failure);
            assert_eq!(srv.failure_count(), 1);
            let has_m5 = out
                .session_transcript
                .iter()
                .any(|e| e.message.kind() == "M5");
            assert_eq!(has_m5, behavior == WrongGuessBehavior::SendGarbage);
        }
    }

    #[test]
    fn dictionary_run_stops_at_hit() {
        let toy = GroupParams::toy();
        let words = dict(&["wrong", "guess1", "pw2"]);
        for (variant, delta) in [(Variant::Original, 0), (Variant::Patched, 2)] {
            let mut srv = server(&toy, variant, "pw2");
            let mut ch = Channel::new(&toy);
            let mut rngs = RoleRngs::from_seed(4);
            let report =
                run_dictionary_attack(&setup(&toy, variant), &words, &mut srv, &mut ch, &mut rngs)
                    .unwrap();
            assert_eq!(report.sessions_used, 3);
            assert_eq!(report.found, Some(Password::new("pw2")));
            assert_eq!(report.server_failure_count_delta, delta);
        }
    }

    #[test]
    fn exhausted_dictionary_finds_nothing() {
        let toy = GroupParams::toy();
        let words = dict(&["wrong", "guess1"]);
        let mut srv = server(&toy, Variant::Original, "pw2");
        let mut ch = Channel::new(&toy);
        let mut rngs = RoleRngs::from_seed(5);
        let report = run_dictionary_attack(
            &setup(&toy, Variant::Original),
            &words,
            &mut srv,
            &mut ch,
            &mut rngs,
        )
        .unwrap();
        assert_eq!(report.found, None);
        assert_eq!(report.sessions_used, 2);
    }

    #[test]
    fn exhaustive_mode_keeps_going() {
        let toy = GroupParams::toy();
        let words = dict(&["pw2", "wrong", "guess1"]);
        let mut srv = server(&toy, Variant::Patched, "pw2");
        let mut ch = Channel::new(&toy);
        let mut rngs = RoleRngs::from_seed(6);
        let mut s = setup(&toy, Variant::Patched);
        s.exhaustive = true;
        let report = run_dictionary_attack(&s, &words, &mut srv, &mut ch, &mut rngs).unwrap();
        assert_eq!(report.sessions_used, 3);
        assert_eq!(report.found, Some(Password::new("pw2")));
        assert_eq!(report.server_failure_count_delta, 2);
    }

    #[test]
    fn identity_x_bar_counts_as_wrong_guess() {
        // In the toy group X*/H(pw) = 1 happens for 1 in 11 wrong-guess sessions.
        let toy = GroupParams::toy();
        let mut hits = 0;
        for seed in 0..200 {
            let mut srv = server(&toy, Variant::Patched, "pw2");
            let mut ch = Channel::new(&toy);
            let mut rngs = RoleRngs::from_seed(seed);
            let out = attack_guess_session(
                &setup(&toy, Variant::Patched),
                &Password::new("wrong"),
                &mut srv,
                &mut ch,
                &mut rngs,
            )
            .unwrap();
            assert!(!out.correct);
            assert_eq!(srv.failure_count(), 1);
            let kinds: Vec<_> = out
                .session_transcript
                .iter()
                .map(|e| e.message.kind())
                .collect();
            if kinds == ["M1", "M2", "M3", "ConfirmVerdict"] {
                hits += 1;
            }
        }
        assert!(hits > 0);
    }

    #[test]
    fn check_guess_rejects_zeroed_tag_and_foreign_gateway() {
        let toy = GroupParams::toy();
        let ids = SessionIds::new("C", "G");
        let mut rngs = RoleRngs::from_seed(7);
        let (x_prime, m1) = forge_m1(&toy, &ids, &Password::new("pw2"), &mut rngs.client).unwrap();
        let (mut gw, m2) =
            GatewayState::forward(&toy, Variant::Original, Identity::new("G"), &m1).unwrap();
        let srv = server(&toy, Variant::Original, "pw2");
        let (_, m3) = srv.process(&m2, &mut rngs.server).unwrap();
        let m4 = gw.respond(&m3, &mut rngs.gateway).unwrap();
        assert!(check_guess(&ids, &m4, &x_prime, &m1.x_star).unwrap());

        let mut zeroed = m4.clone();
        zeroed.auth_g = AuthTag([0; 32]);
        assert!(!check_guess(&ids, &zeroed, &x_prime, &m1.x_star).unwrap());

        let mut foreign = m4;
        foreign.id_g = Identity::new("elsewhere");
        assert!(check_guess(&ids, &foreign, &x_prime, &m1.x_star).is_err());
    }

    #[test]
    fn report_json_round_trip() {
        let toy = GroupParams::toy();
        let mut srv = server(&toy, Variant::Patched, "pw2");
        let mut ch = Channel::new(&toy);
        let mut rngs = RoleRngs::from_seed(8);
        let report = run_dictionary_attack(
            &setup(&toy, Variant::Patched),
            &dict(&["wrong", "pw2"]),
            &mut srv,
            &mut ch,
            &mut rngs,
        )
        .unwrap();
        let json = serde_json::to_string(&report).unwrap();
        let back: AttackReport = serde_json::from_str(&json).unwrap();
        assert_eq!(back, report);
        let slim = report.without_transcripts();
        assert!(!serde_json::to_string(&slim)
            .unwrap()
            .contains("session_transcript"));
    }
}
