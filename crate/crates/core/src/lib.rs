//! Gateway-oriented password-authenticated key exchange (GPAKE) lab.
//!
//! * [`group`] and [`hash`]: prime-order subgroup arithmetic and the
//!   domain-separated hashes the protocol is built from.
//! * [`nizk`]: message-bound Schnorr proofs of discrete-log knowledge.
//! * [`protocol`]: client, gateway and server state machines for the
//!   original protocol and the key-confirmation variant.
//! * [`attack`]: an on-line dictionary attacker that drives real sessions
//!   through an honest gateway and server.
//! * [`sim`]: deterministic channel, scenario runner, file formats and the
//!   built-in self test used by the `gpake` binary.

pub mod attack;
pub mod channel;
pub mod group;
pub mod hash;
pub mod nizk;
pub mod protocol;
pub mod rng;
pub mod sim;
