//! Domain-separated SHA-256 hashing: the password-to-group map, the key
//! derivation and authenticator hashes, and the Fiat-Shamir challenge.

use std::fmt;

use num_bigint::BigUint;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use sha2::{Digest, Sha256};

use crate::group::{GroupElement, GroupError, GroupParams, Scalar};

pub const TAG_HASH_TO_GROUP: &[u8] = b"gpake-H";
pub const TAG_KDF: &[u8] = b"gpake-h1";
pub const TAG_AUTH: &[u8] = b"gpake-h2";
pub const TAG_CHALLENGE: &[u8] = b"gpake-chal";

const HASH_TO_GROUP_MAX_TRIES: u8 = 255;

/// A domain tag followed by an ordered list of byte fields.
///
/// Serialized as the tag bytes, then each field as a 4-byte big-endian
/// length and the field bytes. Distinct field lists under the same tag never
/// serialize to the same stream.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HashInput {
    domain_tag: Vec<u8>,
    fields: Vec<Vec<u8>>,
}

impl HashInput {
    pub fn new(domain_tag: &[u8]) -> Self {
        HashInput {
            domain_tag: domain_tag.to_vec(),
            fields: Vec::new(),
        }
    }

    pub fn field(mut self, bytes: impl AsRef<[u8]>) -> Self {
        self.fields.push(bytes.as_ref().to_vec());
        self
    }

    pub fn with_tag(&self, domain_tag: &[u8]) -> Self {
        HashInput {
            domain_tag: domain_tag.to_vec(),
            fields: self.fields.clone(),
        }
    }

    pub fn fields(&self) -> &[Vec<u8>] {
        &self.fields
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let body: usize = self.fields.iter().map(|f| 4 + f.len()).sum();
        let mut out = Vec::with_capacity(self.domain_tag.len() + body);
        out.extend_from_slice(&self.domain_tag);
        for f in &self.fields {
            let len = u32::try_from(f.len()).expect("hash field longer than 4 GiB");
            out.extend_from_slice(&len.to_be_bytes());
            out.extend_from_slice(f);
        }
        out
    }

    fn digest(&self) -> [u8; 32] {
        Sha256::digest(self.to_bytes()).into()
    }
}

macro_rules! digest_newtype {
    ($(#[$meta:meta])* $name:ident) => {
        $(#[$meta])*
        #[derive(Clone, Copy, PartialEq, Eq, Hash)]
        pub struct $name(pub [u8; 32]);

        impl $name {
            pub fn as_bytes(&self) -> &[u8; 32] {
                &self.0
            }

            pub fn to_hex(&self) -> String {
                hex::encode(self.0)
            }

            pub fn from_hex(s: &str) -> Result<Self, hex::FromHexError> {
                let mut out = [0u8; 32];
                hex::decode_to_slice(s, &mut out)?;
                Ok($name(out))
            }
        }

        impl fmt::Debug for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, concat!(stringify!($name), "({})"), self.to_hex())
            }
        }

        impl Serialize for $name {
            fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
                s.serialize_str(&self.to_hex())
            }
        }

        impl<'de> Deserialize<'de> for $name {
            fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
                let s = String::deserialize(d)?;
                $name::from_hex(&s).map_err(serde::de::Error::custom)
            }
        }
    };
}

digest_newtype!(
    /// 32-byte session key derived with `h1`.
    SessionKey
);
digest_newtype!(
    /// 32-byte authenticator produced by `h2` (AuthG, AuthC).
    AuthTag
);

/// Maps `(ID_C, ID_G, pw)` into the order-q subgroup, never returning the
/// identity.
///
/// Each attempt hashes the serialized input followed by a one-byte counter,
/// reduces the digest mod p and raises it to the cofactor `(p - 1) / q`.
pub fn hash_to_group(
    params: &GroupParams,
    id_c: &[u8],
    id_g: &[u8],
    pw: &[u8],
) -> Result<GroupElement, GroupError> {
    let mut base = HashInput::new(TAG_HASH_TO_GROUP)
        .field(id_c)
        .field(id_g)
        .field(pw)
        .to_bytes();
    base.push(0);
    let counter_at = base.len() - 1;
    for counter in 0..HASH_TO_GROUP_MAX_TRIES {
        base[counter_at] = counter;
        let d = BigUint::from_bytes_be(&Sha256::digest(&base));
        let candidate = (d % params.p()).modpow(params.cofactor(), params.p());
        // 0 only when the digest is a multiple of p.
        if candidate > BigUint::from(1u32) {
            return Ok(GroupElement::from_trusted(candidate, params));
        }
    }
    Err(GroupError::HashToGroupExhausted)
}

/// `h1`: session key derivation. The input's own tag is replaced by the
/// `h1` tag.
pub fn kdf_h1(input: &HashInput) -> SessionKey {
    SessionKey(input.with_tag(TAG_KDF).digest())
}

/// `h2`: authenticator. The input's own tag is replaced by the `h2` tag.
pub fn auth_h2(input: &HashInput) -> AuthTag {
    AuthTag(input.with_tag(TAG_AUTH).digest())
}

/// Fiat-Shamir challenge, digest reduced mod q.
pub fn challenge_hash(params: &GroupParams, input: &HashInput) -> Scalar {
    let d = input.with_tag(TAG_CHALLENGE).digest();
    params.reduce(&BigUint::from_bytes_be(&d))
}
