use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use crate::attack::WrongGuessBehavior;
use crate::group::GroupParams;
use crate::protocol::{Password, SessionIds, Variant};

use super::SimError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GroupChoice {
    Toy,
    Modp2048,
    File(PathBuf),
}

impl GroupChoice {
    pub fn load(&self) -> Result<GroupParams, SimError> {
        Ok(match self {
            GroupChoice::Toy => GroupParams::toy(),
            GroupChoice::Modp2048 => GroupParams::modp2048(),
            GroupChoice::File(path) => GroupParams::load_param_file(path)?,
        })
    }
}

impl FromStr for GroupChoice {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "toy" => GroupChoice::Toy,
            "modp2048" => GroupChoice::Modp2048,
            "" => return Err("empty group name".into()),
            path => GroupChoice::File(PathBuf::from(path)),
        })
    }
}

impl fmt::Display for GroupChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupChoice::Toy => f.write_str("toy"),
            GroupChoice::Modp2048 => f.write_str("modp2048"),
            GroupChoice::File(p) => write!(f, "{}", p.display()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AdversaryKind {
    #[default]
    None,
    DictionaryAttacker,
}

#[derive(Debug, Clone)]
pub struct ScenarioConfig {
    pub variant: Variant,
    pub group: GroupChoice,
    pub seed: u64,
    pub ids: SessionIds,
    /// The password registered with the server.
    pub password: Password,
    /// Password the honest client types; defaults to `password`.
    pub client_password: Option<Password>,
    pub dictionary_path: Option<PathBuf>,
    pub adversary: AdversaryKind,
    pub exhaustive: bool,
    pub on_wrong_guess: WrongGuessBehavior,
    pub reveal_keys: bool,
    /// Keep per-guess transcripts in attack reports.
    pub verbose: bool,
}

impl ScenarioConfig {
    /// Honest-run defaults: ids `client`/`gateway`, toy group.
    pub fn honest(variant: Variant, group: GroupChoice, seed: u64, password: &str) -> Self {
        ScenarioConfig {
            variant,
            group,
            seed,
            ids: SessionIds::new("client", "gateway"),
            password: Password::new(password),
            client_password: None,
            dictionary_path: None,
            adversary: AdversaryKind::None,
            exhaustive: false,
            on_wrong_guess: WrongGuessBehavior::Abort,
            reveal_keys: false,
            verbose: false,
        }
    }

    pub fn attack(
        variant: Variant,
        group: GroupChoice,
        seed: u64,
        password: &str,
        dictionary_path: PathBuf,
    ) -> Self {
        ScenarioConfig {
            dictionary_path: Some(dictionary_path),
            adversary: AdversaryKind::DictionaryAttacker,
            ..Self::honest(variant, group, seed, password)
        }
    }

    pub fn validate(&self) -> Result<(), SimError> {
        match (self.adversary, &self.dictionary_path) {
            (AdversaryKind::DictionaryAttacker, None) => Err(SimError::Config(
                "dictionary attacker needs a dictionary".into(),
            )),
            (AdversaryKind::None, Some(_)) => Err(SimError::Config(
                "dictionary given without an attacker".into(),
            )),
            _ if self.ids.client.as_str().is_empty() || self.ids.gateway.as_str().is_empty() => {
                Err(SimError::Config("identities must be non-empty".into()))
            }
            _ => Ok(()),
        }
    }
}
