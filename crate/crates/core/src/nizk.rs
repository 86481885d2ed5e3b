//! Non-interactive Schnorr proof of knowledge of a discrete logarithm, made
//! non-interactive with a Fiat-Shamir challenge that also binds an auxiliary
//! message.
//!
//! Statement: `public = base^w` for a witness `w` known to the prover.
//! Proof: commitment `t = base^k` and response `z = k + c*w mod q` where
//! `c = H(message, base, public, t) mod q`.

use rand::Rng;
use thiserror::Error;

use crate::group::{GroupElement, GroupError, GroupParams, Scalar};
use crate::hash::{challenge_hash, HashInput, TAG_CHALLENGE};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NizkError {
    #[error("witness does not match the statement")]
    WitnessMismatch,
    #[error("statement elements belong to different groups")]
    ParamsMismatch,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DlogStatement {
    pub base: GroupElement,
    pub public: GroupElement,
    pub message: Vec<u8>,
}

impl DlogStatement {
    pub fn new(base: GroupElement, public: GroupElement, message: impl Into<Vec<u8>>) -> Self {
        DlogStatement {
            base,
            public,
            message: message.into(),
        }
    }

    pub fn params(&self) -> &GroupParams {
        self.base.params()
    }

    fn challenge(&self, commitment: &GroupElement) -> Scalar {
        let input = HashInput::new(TAG_CHALLENGE)
            .field(&self.message)
            .field(self.base.to_bytes())
            .field(self.public.to_bytes())
            .field(commitment.to_bytes());
        challenge_hash(self.params(), &input)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SchnorrProof {
    commitment: GroupElement,
    response: Scalar,
}

impl SchnorrProof {
    pub fn commitment(&self) -> &GroupElement {
        &self.commitment
    }

    pub fn response(&self) -> &Scalar {
        &self.response
    }

    /// Encoded commitment followed by the encoded response.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = self.commitment.to_bytes();
        out.extend(self.commitment.params().scalar_to_bytes(&self.response));
        out
    }

    pub fn from_bytes(params: &GroupParams, bytes: &[u8]) -> Result<Self, GroupError> {
        let expected = params.element_len() + params.scalar_len();
        if bytes.len() != expected {
            return Err(GroupError::BadLength {
                expected,
                got: bytes.len(),
            });
        }
        let (t, z) = bytes.split_at(params.element_len());
        Ok(SchnorrProof {
            commitment: params.element_from_bytes(t)?,
            response: params.scalar_from_bytes(z)?,
        })
    }

    /// Assembles a proof from parts, e.g. to build forged or mutated proofs.
    pub fn from_parts(commitment: GroupElement, response: Scalar) -> Self {
        SchnorrProof {
            commitment,
            response,
        }
    }
}

pub fn nizk_prove<R: Rng + ?Sized>(
    stmt: &DlogStatement,
    witness: &Scalar,
    rng: &mut R,
) -> Result<SchnorrProof, NizkError> {
    if stmt.base.params() != stmt.public.params() {
        return Err(NizkError::ParamsMismatch);
    }
    if stmt.base.pow(witness) != stmt.public {
        return Err(NizkError::WitnessMismatch);
    }
    let params = stmt.params();
    let nonce = params.random_scalar(rng);
    let commitment = stmt.base.pow(&nonce);
    let c = stmt.challenge(&commitment);
    let response = params.scalar_add(&nonce, &params.scalar_mul(&c, witness));
    Ok(SchnorrProof {
        commitment,
        response,
    })
}

/// Total: malformed or mismatched inputs yield `false`.
pub fn nizk_verify(stmt: &DlogStatement, proof: &SchnorrProof) -> bool {
    let params = stmt.params();
    if stmt.public.params() != params || proof.commitment.params() != params {
        return false;
    }
    // Subgroup membership holds for every GroupElement; only the identity
    // needs excluding here.
    let elements = [&stmt.base, &stmt.public, &proof.commitment];
    if elements.iter().any(|e| e.is_identity()) {
        return false;
    }
    if proof.response.value() >= params.q() {
        return false;
    }
    let c = stmt.challenge(&proof.commitment);
    let lhs = stmt.base.pow(&proof.response);
    let rhs = stmt
        .public
        .pow(&c)
        .mul(&proof.commitment)
        .expect("same params checked above");
    lhs == rhs
}

/// Decodes every part of a statement and proof from bytes and verifies.
/// Any decoding failure is a rejection.
pub fn verify_encoded(
    params: &GroupParams,
    base: &[u8],
    public: &[u8],
    message: &[u8],
    proof: &[u8],
) -> bool {
    let (Ok(base), Ok(public), Ok(proof)) = (
        params.element_from_bytes(base),
        params.element_from_bytes(public),
        SchnorrProof::from_bytes(params, proof),
    ) else {
        return false;
    };
    nizk_verify(&DlogStatement::new(base, public, message), &proof)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigUint;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    fn toy_statement(msg: &[u8]) -> DlogStatement {
        let toy = GroupParams::toy();
        let h = toy.validate_element(&18u32.into()).unwrap();
        DlogStatement::new(toy.generator(), h, msg)
    }

    #[test]
    fn completeness_in_toy_group() {
        let stmt = toy_statement(b"m");
        let w = GroupParams::toy().scalar_from_u64(3).unwrap();
        let mut rng = ChaCha20Rng::seed_from_u64(1);
        let proof = nizk_prove(&stmt, &w, &mut rng).unwrap();
        assert!(nizk_verify(&stmt, &proof));
    }

    #[test]
    fn wrong_witness_is_refused() {
        // 4^5 mod 23 = 12, not 18
        assert_eq!((0..5).fold(1u32, |a, _| a * 4 % 23), 12);
        let stmt = toy_statement(b"m");
        let w = GroupParams::toy().scalar_from_u64(5).unwrap();
        let mut rng = ChaCha20Rng::seed_from_u64(1);
        assert_eq!(
            nizk_prove(&stmt, &w, &mut rng),
            Err(NizkError::WitnessMismatch)
        );
    }

    #[test]
    fn nonce_from_seeded_stream_fixes_commitment() {
        let toy = GroupParams::toy();
        let seed = (0u64..)
            .find(|&s| {
                toy.random_scalar(&mut ChaCha20Rng::seed_from_u64(s))
                    .to_u64()
                    == Some(7)
            })
            .unwrap();
        let stmt = toy_statement(b"m");
        let w = toy.scalar_from_u64(3).unwrap();
        let proof = nizk_prove(&stmt, &w, &mut ChaCha20Rng::seed_from_u64(seed)).unwrap();
        // 4^7 mod 23 = 8
        assert_eq!((0..7).fold(1u32, |a, _| a * 4 % 23), 8);
        assert_eq!(proof.commitment().value(), &BigUint::from(8u32));
    }

    #[test]
    fn bumped_response_is_rejected() {
        let toy = GroupParams::toy();
        let stmt = toy_statement(b"m");
        let w = toy.scalar_from_u64(3).unwrap();
        for seed in 0..20 {
            let proof = nizk_prove(&stmt, &w, &mut ChaCha20Rng::seed_from_u64(seed)).unwrap();
            let one = toy.scalar_from_u64(1).unwrap();
            let bumped = SchnorrProof::from_parts(
                proof.commitment().clone(),
                toy.scalar_add(proof.response(), &one),
            );
            // g^(z+1) = g^z * g != t * h^c since g != 1
            assert!(!nizk_verify(&stmt, &bumped));
        }
    }

    #[test]
    fn proof_is_bound_to_message() {
        let modp = GroupParams::modp2048();
        let mut rng = ChaCha20Rng::seed_from_u64(3);
        let w = modp.random_scalar(&mut rng);
        let public = modp.generator().pow(&w);
        let stmt = DlogStatement::new(modp.generator(), public.clone(), b"bound".to_vec());
        let proof = nizk_prove(&stmt, &w, &mut rng).unwrap();
        assert!(nizk_verify(&stmt, &proof));
        let other = DlogStatement::new(modp.generator(), public, b"other".to_vec());
        assert!(!nizk_verify(&other, &proof));
    }

    #[test]
    fn identity_statement_is_rejected() {
        let toy = GroupParams::toy();
        let stmt = DlogStatement::new(toy.generator(), toy.identity(), b"m".to_vec());
        let w = toy.scalar_from_u64(0).unwrap();
        let proof = nizk_prove(&stmt, &w, &mut ChaCha20Rng::seed_from_u64(0)).unwrap();
        assert!(!nizk_verify(&stmt, &proof));
    }

    #[test]
    fn encoding_round_trip_and_garbage() {
        let toy = GroupParams::toy();
        let stmt = toy_statement(b"m");
        let w = toy.scalar_from_u64(3).unwrap();
        let proof = nizk_prove(&stmt, &w, &mut ChaCha20Rng::seed_from_u64(5)).unwrap();
        let bytes = proof.to_bytes();
        assert_eq!(bytes.len(), 2);
        assert_eq!(SchnorrProof::from_bytes(&toy, &bytes).unwrap(), proof);
        assert!(SchnorrProof::from_bytes(&toy, &bytes[..1]).is_err());
        // response 11 is not a scalar
        assert!(SchnorrProof::from_bytes(&toy, &[bytes[0], 11]).is_err());
        assert!(verify_encoded(&toy, &[4], &[18], b"m", &bytes));
        assert!(!verify_encoded(&toy, &[4], &[7], b"m", &bytes));
    }

    #[test]
    fn proofs_differ_across_seeds() {
        let modp = GroupParams::modp2048();
        let w = modp.random_scalar(&mut ChaCha20Rng::seed_from_u64(10));
        let stmt = DlogStatement::new(modp.generator(), modp.generator().pow(&w), b"zk".to_vec());
        let a = nizk_prove(&stmt, &w, &mut ChaCha20Rng::seed_from_u64(1)).unwrap();
        let b = nizk_prove(&stmt, &w, &mut ChaCha20Rng::seed_from_u64(2)).unwrap();
        assert_ne!(a.commitment(), b.commitment());
        assert_ne!(a.response(), b.response());
    }
}
