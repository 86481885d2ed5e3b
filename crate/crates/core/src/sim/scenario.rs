use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::attack::{run_dictionary_attack, AttackReport, AttackSetup};
use crate::channel::{Channel, Direction, TranscriptEntry};
use crate::group::GroupParams;
use crate::hash::SessionKey;
use crate::protocol::{
    ClientState, Decision, GatewayState, ProtocolError, ServerPasswordDb, ServerState, SessionIds,
    Variant,
};
use crate::rng::RoleRngs;

use super::{load_dictionary, AdversaryKind, ScenarioConfig, SimError};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SessionKeys {
    pub client: Option<SessionKey>,
    pub gateway: Option<SessionKey>,
}

/// Record of one scenario run. Serializes to the same bytes for the same
/// configuration.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Transcript {
    pub seed: u64,
    pub variant: Variant,
    pub group: String,
    pub ids: SessionIds,
    pub entries: Vec<TranscriptEntry>,
    /// Final state per role plus a few summary values.
    pub outcome: BTreeMap<String, Value>,
    /// Present only when keys are revealed.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub session_keys: Option<SessionKeys>,
}

#[derive(Debug, Clone)]
pub struct ScenarioOutput {
    pub transcript: Transcript,
    pub report: Option<AttackReport>,
}

pub fn run_scenario(cfg: &ScenarioConfig) -> Result<ScenarioOutput, SimError> {
    cfg.validate()?;
    let params = cfg.group.load()?;
    match cfg.adversary {
        AdversaryKind::None => run_honest(cfg, &params),
        AdversaryKind::DictionaryAttacker => run_attack(cfg, &params),
    }
}

fn password_db(cfg: &ScenarioConfig) -> ServerPasswordDb {
    [(cfg.ids.client.clone(), cfg.password.clone())]
        .into_iter()
        .collect()
}

fn transcript(
    cfg: &ScenarioConfig,
    entries: Vec<TranscriptEntry>,
    outcome: BTreeMap<String, Value>,
    keys: Option<SessionKeys>,
) -> Transcript {
    Transcript {
        seed: cfg.seed,
        variant: cfg.variant,
        group: cfg.group.to_string(),
        ids: cfg.ids.clone(),
        entries,
        outcome,
        session_keys: keys.filter(|_| cfg.reveal_keys),
    }
}

#[derive(Default)]
struct HonestProgress {
    client: &'static str,
    gateway: &'static str,
    server: &'static str,
    client_key: Option<SessionKey>,
    gateway_key: Option<SessionKey>,
}

type StepError = (&'static str, ProtocolError);

fn at(step: &'static str) -> impl Fn(ProtocolError) -> StepError {
    move |e| (step, e)
}

fn honest_steps(
    cfg: &ScenarioConfig,
    params: &GroupParams,
    channel: &mut Channel<'_>,
    server: &mut ServerState,
    progress: &mut HonestProgress,
) -> Result<(), StepError> {
    let mut rngs = RoleRngs::from_seed(cfg.seed);
    let variant = cfg.variant;
    let client_pw = cfg
        .client_password
        .clone()
        .unwrap_or_else(|| cfg.password.clone());
    progress.client = "started";

    let (mut client, m1) = ClientState::start(
        params,
        variant,
        cfg.ids.clone(),
        client_pw,
        &mut rngs.client,
    )
    .map_err(at("M1"))?;
    let m1 = channel
        .deliver(Direction::ClientToGateway, m1)
        .and_then(|m| m.into_m1())
        .map_err(at("M1"))?;
    let (mut gateway, m2) =
        GatewayState::forward(params, variant, cfg.ids.gateway.clone(), &m1).map_err(at("M2"))?;
    progress.gateway = "awaiting_m3";
    let m2 = channel
        .deliver(Direction::GatewayToServer, m2)
        .and_then(|m| m.into_m2())
        .map_err(at("M2"))?;
    let (mut session, m3) = server.process(&m2, &mut rngs.server).map_err(at("M3"))?;
    progress.server = "awaiting_verdict";
    let m3 = channel
        .deliver(Direction::ServerToGateway, m3)
        .and_then(|m| m.into_m3())
        .map_err(at("M3"))?;
    let m4 = gateway.respond(&m3, &mut rngs.gateway).map_err(at("M4"))?;
    progress.gateway_key = gateway.derived_key();
    let m4 = channel
        .deliver(Direction::GatewayToClient, m4)
        .and_then(|m| m.into_m4())
        .map_err(at("M4"))?;
    let finished = client.finish(&m4);
    progress.client = if finished.is_ok() {
        "finished"
    } else {
        "aborted"
    };

    if variant == Variant::Original {
        progress.gateway = "finished";
        progress.server = "completed";
        progress.client_key = Some(finished.map_err(at("M4"))?.session_key);
        return Ok(());
    }

    let (m5, client_err) = match finished {
        Ok(out) => {
            progress.client_key = Some(out.session_key);
            (out.confirmation, None)
        }
        Err(e) => (None, Some(e)),
    };
    let m5 = match m5 {
        Some(m5) => Some(
            channel
                .deliver(Direction::ClientToGateway, m5)
                .and_then(|m| m.into_m5())
                .map_err(at("M5"))?,
        ),
        None => None,
    };
    let verdict = gateway.confirm(m5.as_ref()).map_err(at("M5"))?;
    progress.gateway = if verdict.accepted {
        "finished"
    } else {
        "aborted"
    };
    let verdict = channel
        .deliver(Direction::GatewayToServer, verdict)
        .and_then(|m| m.into_verdict())
        .map_err(at("verdict"))?;
    let decision = server
        .finalize(&mut session, &verdict)
        .map_err(at("verdict"))?;
    progress.server = match decision {
        Decision::Accept => "accepted",
        Decision::Reject => "rejected",
    };
    match client_err {
        Some(e) => Err(("M4", e)),
        None => Ok(()),
    }
}

fn run_honest(cfg: &ScenarioConfig, params: &GroupParams) -> Result<ScenarioOutput, SimError> {
    let mut channel = Channel::new(params);
    let mut server = ServerState::new(params, cfg.variant, password_db(cfg));
    let mut progress = HonestProgress {
        client: "idle",
        gateway: "idle",
        server: "awaiting_m2",
        ..Default::default()
    };
    let result = honest_steps(cfg, params, &mut channel, &mut server, &mut progress);

    let mut outcome = BTreeMap::new();
    outcome.insert("client".to_owned(), Value::from(progress.client));
    outcome.insert("gateway".to_owned(), Value::from(progress.gateway));
    outcome.insert("server".to_owned(), Value::from(progress.server));
    outcome.insert(
        "server_failures".to_owned(),
        Value::from(server.failure_count()),
    );
    if let (Some(c), Some(g)) = (progress.client_key, progress.gateway_key) {
        outcome.insert("keys_match".to_owned(), Value::from(c == g));
    }
    let keys = SessionKeys {
        client: progress.client_key,
        gateway: progress.gateway_key,
    };
    let transcript = transcript(cfg, channel.into_entries(), outcome, Some(keys));
    match result {
        Ok(()) => Ok(ScenarioOutput {
            transcript,
            report: None,
        }),
        Err((step, source)) => Err(SimError::Protocol {
            step,
            source,
            transcript: Box::new(transcript),
        }),
    }
}

fn run_attack(cfg: &ScenarioConfig, params: &GroupParams) -> Result<ScenarioOutput, SimError> {
    let path = cfg
        .dictionary_path
        .as_ref()
        .ok_or_else(|| SimError::Config("dictionary attacker needs a dictionary".into()))?;
    let dictionary = load_dictionary(path)?;
    let setup = AttackSetup {
        params: params.clone(),
        ids: cfg.ids.clone(),
        variant: cfg.variant,
        on_wrong_guess: cfg.on_wrong_guess,
        exhaustive: cfg.exhaustive,
    };
    let mut server = ServerState::new(params, cfg.variant, password_db(cfg));
    let mut channel = Channel::new(params);
    let mut rngs = RoleRngs::from_seed(cfg.seed);
    let report = run_dictionary_attack(&setup, &dictionary, &mut server, &mut channel, &mut rngs)
        .map_err(SimError::Attack)?;
    let report = if cfg.verbose {
        report
    } else {
        report.without_transcripts()
    };

    let mut outcome = BTreeMap::new();
    outcome.insert(
        "attacker".to_owned(),
        Value::from(if report.found.is_some() {
            "found"
        } else {
            "not_found"
        }),
    );
    outcome.insert(
        "sessions_used".to_owned(),
        Value::from(report.sessions_used),
    );
    outcome.insert(
        "server_failures".to_owned(),
        Value::from(server.failure_count()),
    );
    Ok(ScenarioOutput {
        transcript: transcript(cfg, channel.into_entries(), outcome, None),
        report: Some(report),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::GroupChoice;

    fn kinds(t: &Transcript) -> Vec<&'static str> {
        t.entries.iter().map(|e| e.message.kind()).collect()
    }

    #[test]
    fn honest_original_seed_42() {
        let cfg = ScenarioConfig::honest(Variant::Original, GroupChoice::Toy, 42, "pw2");
        let t = run_scenario(&cfg).unwrap().transcript;
        assert_eq!(kinds(&t), ["M1", "M2", "M3", "M4"]);
        assert_eq!(t.outcome["keys_match"], Value::Bool(true));
        assert_eq!(t.session_keys, None);
    }

    #[test]
    fn honest_patched_seed_42() {
        let mut cfg = ScenarioConfig::honest(Variant::Patched, GroupChoice::Toy, 42, "pw2");
        cfg.reveal_keys = true;
        let t = run_scenario(&cfg).unwrap().transcript;
        assert_eq!(kinds(&t), ["M1", "M2", "M3", "M4", "M5", "ConfirmVerdict"]);
        assert_eq!(t.outcome["server"], Value::from("accepted"));
        let keys = t.session_keys.unwrap();
        assert!(keys.client.is_some());
        assert_eq!(keys.client, keys.gateway);
    }

    #[test]
    fn wrong_client_password_is_annotated() {
        for variant in [Variant::Original, Variant::Patched] {
            let mut cfg = ScenarioConfig::honest(variant, GroupChoice::Toy, 7, "pw2");
            cfg.client_password = Some(crate::protocol::Password::new("wrong"));
            match run_scenario(&cfg) {
                Err(SimError::Protocol {
                    step,
                    source,
                    transcript,
                }) => {
                    assert_eq!(step, "M4");
                    assert_eq!(source, ProtocolError::AuthGMismatch);
                    assert_eq!(transcript.outcome["client"], Value::from("aborted"));
                    let failures = u64::from(variant == Variant::Patched);
                    assert_eq!(transcript.outcome["server_failures"], Value::from(failures));
                }
                other => panic!("expected protocol failure, got {other:?}"),
            }
        }
    }
}
