//! Prime-order subgroups of the multiplicative group of integers modulo a
//! prime, with fixed-width big-endian encodings for elements and scalars.
//!
//! Every [`GroupElement`] carries the [`GroupParams`] it belongs to, so mixing
//! elements from different groups is caught at the operation boundary instead
//! of producing a silently wrong residue.

use std::fmt;
use std::path::Path;
use std::sync::{Arc, OnceLock};

use num_bigint::{BigUint, RandBigInt};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use thiserror::Error;

/// Number of Miller-Rabin rounds used when validating parameters.
pub const PRIMALITY_ROUNDS: usize = 64;

/// RFC 3526 group 14 (2048-bit MODP) prime.
const MODP2048_P: &str = "\
    FFFFFFFFFFFFFFFFC90FDAA22168C234C4C6628B80DC1CD129024E088A67CC74\
    020BBEA63B139B22514A08798E3404DDEF9519B3CD3A431B302B0A6DF25F1437\
    4FE1356D6D51C245E485B576625E7EC6F44C42E9A637ED6B0BFF5CB6F406B7ED\
    EE386BFB5A899FA5AE9F24117C4B1FE649286651ECE45B3DC2007CB8A163BF05\
    98DA48361C55D39A69163FA8FD24CF5F83655D23DCA3AD961C62F356208552BB\
    9ED529077096966D670C354E4ABC9804F1746C08CA18217C32905E462E36CE3B\
    E39E772C180E86039B2783A2EC07A28FB5C55DF06F4C52C9DE2BCBF695581718\
    3995497CEA956AE515D2261898FA051015728E5A8AACAA68FFFFFFFFFFFFFFFF";

const SMALL_PRIMES: [u32; 25] = [
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97,
];

/// Which parameter failed the primality test.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PrimeParam {
    P,
    Q,
}

impl fmt::Display for PrimeParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PrimeParam::P => f.write_str("p"),
            PrimeParam::Q => f.write_str("q"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroupError {
    #[error("{0} is not prime")]
    NotPrime(PrimeParam),
    #[error("subgroup order q does not divide p - 1")]
    OrderMismatch,
    #[error("g does not generate the order-q subgroup")]
    BadGenerator,
    #[error("element is outside [1, p - 1]")]
    OutOfRange,
    #[error("element is not in the order-q subgroup")]
    NotInSubgroup,
    #[error("identity element is not accepted as a protocol value")]
    IdentityRejected,
    #[error("scalar is outside [0, q - 1]")]
    ScalarOutOfRange,
    #[error("operands belong to different groups")]
    ParamsMismatch,
    #[error("encoding is {got} bytes, expected {expected}")]
    BadLength { expected: usize, got: usize },
    #[error("hash-to-group did not find a non-identity element")]
    HashToGroupExhausted,
    #[error("group parameter file: {0}")]
    ParamFile(String),
}

struct ParamsInner {
    p: BigUint,
    q: BigUint,
    g: BigUint,
    /// (p - 1) / q
    cofactor: BigUint,
    /// p = 2q + 1, which lets membership use the Legendre symbol.
    safe_prime: bool,
    element_len: usize,
    scalar_len: usize,
    /// Built on first use for large moduli.
    generator_table: OnceLock<FixedBaseTable>,
}

/// Moduli below this size use plain `modpow` for the generator too.
const FIXED_BASE_MIN_BITS: u64 = 512;
const FIXED_BASE_WINDOW: u32 = 6;

/// `rows[i][j] = g^(j * 2^(6i)) mod p`, so `g^e` costs one multiplication
/// per base-64 digit of `e` and no squarings.
struct FixedBaseTable {
    rows: Vec<Vec<BigUint>>,
}

impl FixedBaseTable {
    fn new(g: &BigUint, p: &BigUint, exp_bits: u64) -> Self {
        let width = 1usize << FIXED_BASE_WINDOW;
        let n_rows = exp_bits.div_ceil(u64::from(FIXED_BASE_WINDOW)) as usize;
        let mut rows = Vec::with_capacity(n_rows);
        let mut base = g.clone();
        for _ in 0..n_rows {
            let mut row = Vec::with_capacity(width);
            row.push(BigUint::one());
            for j in 1..width {
                row.push((&row[j - 1] * &base) % p);
            }
            base = (&row[width - 1] * &base) % p;
            rows.push(row);
        }
        FixedBaseTable { rows }
    }

    fn pow(&self, e: &BigUint, p: &BigUint) -> BigUint {
        let digits = e.to_radix_le(1 << FIXED_BASE_WINDOW);
        debug_assert!(digits.len() <= self.rows.len());
        let mut acc = BigUint::one();
        for (row, &d) in self.rows.iter().zip(&digits) {
            if d != 0 {
                acc = (acc * &row[usize::from(d)]) % p;
            }
        }
        acc
    }
}

/// Validated group description: modulus `p`, prime subgroup order `q` and a
/// generator `g` of that subgroup. Cheap to clone.
#[derive(Clone)]
pub struct GroupParams {
    inner: Arc<ParamsInner>,
}

impl PartialEq for GroupParams {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner)
            || (self.inner.p == other.inner.p
                && self.inner.q == other.inner.q
                && self.inner.g == other.inner.g)
    }
}

impl Eq for GroupParams {}

impl fmt::Debug for GroupParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GroupParams")
            .field("p_bits", &self.inner.p.bits())
            .field("q_bits", &self.inner.q.bits())
            .field("g", &self.inner.g)
            .finish()
    }
}

/// Validates `(p, q, g)` and builds the group.
pub fn make_group(p: BigUint, q: BigUint, g: BigUint) -> Result<GroupParams, GroupError> {
    if !is_probable_prime(&p, PRIMALITY_ROUNDS) {
        return Err(GroupError::NotPrime(PrimeParam::P));
    }
    if !is_probable_prime(&q, PRIMALITY_ROUNDS) {
        return Err(GroupError::NotPrime(PrimeParam::Q));
    }
    let p_minus_one = &p - 1u32;
    let (cofactor, rem) = p_minus_one.div_rem(&q);
    if !rem.is_zero() {
        return Err(GroupError::OrderMismatch);
    }
    if g <= BigUint::one() || g >= p || !g.modpow(&q, &p).is_one() {
        return Err(GroupError::BadGenerator);
    }
    let safe_prime = cofactor == BigUint::from(2u32);
    let element_len = byte_len(&p);
    let scalar_len = byte_len(&q);
    Ok(GroupParams {
        inner: Arc::new(ParamsInner {
            p,
            q,
            g,
            cofactor,
            safe_prime,
            element_len,
            scalar_len,
            generator_table: OnceLock::new(),
        }),
    })
}

impl GroupParams {
    /// p = 23, q = 11, g = 4: an 11-element subgroup small enough for
    /// exhaustive checks.
    pub fn toy() -> GroupParams {
        static TOY: OnceLock<GroupParams> = OnceLock::new();
        TOY.get_or_init(|| {
            make_group(23u32.into(), 11u32.into(), 4u32.into()).expect("toy group is valid")
        })
        .clone()
    }

    /// RFC 3526 group 14 with q = (p - 1) / 2 and g = 4.
    pub fn modp2048() -> GroupParams {
        static MODP: OnceLock<GroupParams> = OnceLock::new();
        MODP.get_or_init(|| {
            let p = BigUint::parse_bytes(MODP2048_P.as_bytes(), 16).expect("constant parses");
            let q = (&p - 1u32) >> 1;
            make_group(p, q, 4u32.into()).expect("MODP-2048 group is valid")
        })
        .clone()
    }

    /// Parses the three-line `p=<hex>` / `q=<hex>` / `g=<hex>` format and
    /// validates the result.
    pub fn from_param_text(text: &str) -> Result<GroupParams, GroupError> {
        let (mut p, mut q, mut g) = (None, None, None);
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                GroupError::ParamFile(format!("line {}: expected key=<hex>", lineno + 1))
            })?;
            let slot = match key.trim() {
                "p" => &mut p,
                "q" => &mut q,
                "g" => &mut g,
                other => {
                    return Err(GroupError::ParamFile(format!(
                        "line {}: unknown key {other:?}",
                        lineno + 1
                    )))
                }
            };
            if slot.is_some() {
                return Err(GroupError::ParamFile(format!(
                    "line {}: duplicate key {}",
                    lineno + 1,
                    key.trim()
                )));
            }
            let hex = value.trim().trim_start_matches("0x");
            let parsed = BigUint::parse_bytes(hex.as_bytes(), 16).ok_or_else(|| {
                GroupError::ParamFile(format!("line {}: invalid hex value", lineno + 1))
            })?;
            *slot = Some(parsed);
        }
        let missing = |name: &str| GroupError::ParamFile(format!("missing {name}="));
        make_group(
            p.ok_or_else(|| missing("p"))?,
            q.ok_or_else(|| missing("q"))?,
            g.ok_or_else(|| missing("g"))?,
        )
    }

    pub fn load_param_file(path: &Path) -> Result<GroupParams, GroupError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| GroupError::ParamFile(format!("{}: {e}", path.display())))?;
        Self::from_param_text(&text)
    }

    pub fn to_param_text(&self) -> String {
        format!(
            "p={}\nq={}\ng={}\n",
            self.inner.p.to_str_radix(16),
            self.inner.q.to_str_radix(16),
            self.inner.g.to_str_radix(16)
        )
    }

    pub fn p(&self) -> &BigUint {
        &self.inner.p
    }

    pub fn q(&self) -> &BigUint {
        &self.inner.q
    }

    pub fn g(&self) -> &BigUint {
        &self.inner.g
    }

    pub(crate) fn cofactor(&self) -> &BigUint {
        &self.inner.cofactor
    }

    /// Width in bytes of an encoded element.
    pub fn element_len(&self) -> usize {
        self.inner.element_len
    }

    /// Width in bytes of an encoded scalar.
    pub fn scalar_len(&self) -> usize {
        self.inner.scalar_len
    }

    pub fn generator(&self) -> GroupElement {
        GroupElement::from_trusted(self.inner.g.clone(), self)
    }

    pub fn identity(&self) -> GroupElement {
        GroupElement::from_trusted(BigUint::one(), self)
    }

    /// True iff `v` lies in `[1, p - 1]` and in the order-q subgroup.
    pub fn is_member(&self, v: &BigUint) -> bool {
        if v.is_zero() || v >= &self.inner.p {
            return false;
        }
        if self.inner.safe_prime {
            // For p = 2q + 1 the order-q subgroup is exactly the quadratic residues.
            jacobi(v, &self.inner.p) == 1
        } else {
            v.modpow(&self.inner.q, &self.inner.p).is_one()
        }
    }

    /// Checks an untrusted integer for use as a protocol element. The
    /// identity is rejected.
    pub fn validate_element(&self, v: &BigUint) -> Result<GroupElement, GroupError> {
        if v.is_zero() || v >= &self.inner.p {
            return Err(GroupError::OutOfRange);
        }
        if v.is_one() {
            return Err(GroupError::IdentityRejected);
        }
        if !self.is_member(v) {
            return Err(GroupError::NotInSubgroup);
        }
        Ok(GroupElement::from_trusted(v.clone(), self))
    }

    pub fn element_from_bytes(&self, bytes: &[u8]) -> Result<GroupElement, GroupError> {
        check_len(self.inner.element_len, bytes)?;
        self.validate_element(&BigUint::from_bytes_be(bytes))
    }

    pub fn scalar(&self, v: BigUint) -> Result<Scalar, GroupError> {
        if v >= self.inner.q {
            return Err(GroupError::ScalarOutOfRange);
        }
        Ok(Scalar(v))
    }

    pub fn scalar_from_u64(&self, v: u64) -> Result<Scalar, GroupError> {
        self.scalar(BigUint::from(v))
    }

    pub fn scalar_from_bytes(&self, bytes: &[u8]) -> Result<Scalar, GroupError> {
        check_len(self.inner.scalar_len, bytes)?;
        self.scalar(BigUint::from_bytes_be(bytes))
    }

    pub fn scalar_to_bytes(&self, s: &Scalar) -> Vec<u8> {
        to_fixed_be(&s.0, self.inner.scalar_len)
    }

    /// Reduces an arbitrary integer mod q.
    pub fn reduce(&self, v: &BigUint) -> Scalar {
        Scalar(v % &self.inner.q)
    }

    /// Uniform scalar in `[1, q - 1]`.
    pub fn random_scalar<R: Rng + ?Sized>(&self, rng: &mut R) -> Scalar {
        Scalar(rng.gen_biguint_range(&BigUint::one(), &self.inner.q))
    }

    pub fn scalar_add(&self, a: &Scalar, b: &Scalar) -> Scalar {
        Scalar((&a.0 + &b.0) % &self.inner.q)
    }

    pub fn scalar_mul(&self, a: &Scalar, b: &Scalar) -> Scalar {
        Scalar((&a.0 * &b.0) % &self.inner.q)
    }
}

/// An element of the order-q subgroup, tied to its group.
#[derive(Clone)]
pub struct GroupElement {
    value: BigUint,
    params: GroupParams,
}

impl PartialEq for GroupElement {
    fn eq(&self, other: &Self) -> bool {
        self.value == other.value && self.params == other.params
    }
}

impl Eq for GroupElement {}

impl fmt::Debug for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GroupElement(0x{})", self.value.to_str_radix(16))
    }
}

impl GroupElement {
    /// Callers guarantee subgroup membership (results of group operations on
    /// members, or values already checked).
    pub(crate) fn from_trusted(value: BigUint, params: &GroupParams) -> Self {
        GroupElement {
            value,
            params: params.clone(),
        }
    }

    pub fn value(&self) -> &BigUint {
        &self.value
    }

    pub fn params(&self) -> &GroupParams {
        &self.params
    }

    pub fn is_identity(&self) -> bool {
        self.value.is_one()
    }

    /// `self^e mod p`.
    pub fn pow(&self, e: &Scalar) -> GroupElement {
        let inner = &self.params.inner;
        let value = if inner.p.bits() >= FIXED_BASE_MIN_BITS && self.value == inner.g {
            inner
                .generator_table
                .get_or_init(|| FixedBaseTable::new(&inner.g, &inner.p, inner.q.bits()))
                .pow(&e.0, &inner.p)
        } else {
            self.value.modpow(&e.0, &inner.p)
        };
        GroupElement::from_trusted(value, &self.params)
    }

    pub fn mul(&self, other: &GroupElement) -> Result<GroupElement, GroupError> {
        self.same_group(other)?;
        Ok(GroupElement::from_trusted(
            (&self.value * &other.value) % self.params.p(),
            &self.params,
        ))
    }

    /// `self * other^-1 mod p`.
    pub fn div(&self, other: &GroupElement) -> Result<GroupElement, GroupError> {
        self.same_group(other)?;
        let inv = other
            .value
            .modinv(self.params.p())
            .expect("subgroup elements are invertible mod a prime");
        Ok(GroupElement::from_trusted(
            (&self.value * inv) % self.params.p(),
            &self.params,
        ))
    }

    /// Big-endian, zero-padded to the group's element width.
    pub fn to_bytes(&self) -> Vec<u8> {
        to_fixed_be(&self.value, self.params.element_len())
    }

    fn same_group(&self, other: &GroupElement) -> Result<(), GroupError> {
        if self.params == other.params {
            Ok(())
        } else {
            Err(GroupError::ParamsMismatch)
        }
    }
}

/// Exponent in `[0, q - 1]`. Range is enforced by the constructors on
/// [`GroupParams`].
#[derive(Clone, PartialEq, Eq)]
pub struct Scalar(BigUint);

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Scalar(0x{})", self.0.to_str_radix(16))
    }
}

impl Scalar {
    pub fn value(&self) -> &BigUint {
        &self.0
    }

    pub fn to_u64(&self) -> Option<u64> {
        self.0.to_u64()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }
}

fn byte_len(v: &BigUint) -> usize {
    (v.bits() as usize).div_ceil(8)
}

fn check_len(expected: usize, bytes: &[u8]) -> Result<(), GroupError> {
    if bytes.len() != expected {
        return Err(GroupError::BadLength {
            expected,
            got: bytes.len(),
        });
    }
    Ok(())
}

pub(crate) fn to_fixed_be(v: &BigUint, len: usize) -> Vec<u8> {
    let raw = v.to_bytes_be();
    debug_assert!(raw.len() <= len);
    let mut out = vec![0u8; len.saturating_sub(raw.len())];
    out.extend_from_slice(&raw);
    out
}

/// Miller-Rabin with `rounds` bases drawn from a fixed-seed stream, after
/// trial division by small primes. Deterministic for a given input.
pub fn is_probable_prime(n: &BigUint, rounds: usize) -> bool {
    let two = BigUint::from(2u32);
    if n < &two {
        return false;
    }
    for &sp in SMALL_PRIMES.iter() {
        let sp = BigUint::from(sp);
        if n == &sp {
            return true;
        }
        if (n % &sp).is_zero() {
            return false;
        }
    }
    let n_minus_one = n - 1u32;
    let shift = n_minus_one.trailing_zeros().unwrap_or(0);
    let d = &n_minus_one >> shift;
    let mut rng = ChaCha20Rng::from_seed([0x4d; 32]);
    'witness: for _ in 0..rounds {
        let a = rng.gen_biguint_range(&two, &n_minus_one);
        let mut x = a.modpow(&d, n);
        if x.is_one() || x == n_minus_one {
            continue;
        }
        for _ in 1..shift {
            x = x.modpow(&two, n);
            if x == n_minus_one {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Jacobi symbol `(a / n)` for odd `n`.
fn jacobi(a: &BigUint, n: &BigUint) -> i8 {
    let mut a = a % n;
    let mut n = n.clone();
    let mut sign = 1i8;
    while !a.is_zero() {
        let tz = a.trailing_zeros().unwrap_or(0);
        a >>= tz;
        let n_mod_8 = (&n % 8u32).to_u32().unwrap_or(0);
        if tz % 2 == 1 && (n_mod_8 == 3 || n_mod_8 == 5) {
            sign = -sign;
        }
        std::mem::swap(&mut a, &mut n);
        let a_mod_4 = (&a % 4u32).to_u32().unwrap_or(0);
        let n_mod_4 = (&n % 4u32).to_u32().unwrap_or(0);
        if a_mod_4 == 3 && n_mod_4 == 3 {
            sign = -sign;
        }
        a %= &n;
    }
    if n.is_one() {
        sign
    } else {
        0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Subgroup members by repeated multiplication, indexed by exponent.
    fn toy_power_table() -> Vec<u64> {
        let mut table = vec![1u64];
        for _ in 1..11 {
            let last = *table.last().unwrap();
            table.push(last * 4 % 23);
        }
        table
    }

    fn slow_pow(base: u64, e: u64) -> u64 {
        (0..e).fold(1, |acc, _| acc * base % 23)
    }

    #[test]
    fn toy_group_validates() {
        let g = make_group(23u32.into(), 11u32.into(), 4u32.into()).unwrap();
        assert_eq!(g.element_len(), 1);
        assert_eq!(g.scalar_len(), 1);
        assert_eq!(slow_pow(4, 11), 1);
    }

    #[test]
    fn make_group_rejections() {
        assert_eq!(slow_pow(5, 11), 22);
        assert_eq!(
            make_group(23u32.into(), 11u32.into(), 5u32.into()),
            Err(GroupError::BadGenerator)
        );
        assert_eq!(
            make_group(22u32.into(), 11u32.into(), 4u32.into()),
            Err(GroupError::NotPrime(PrimeParam::P))
        );
        assert_eq!(
            make_group(23u32.into(), 9u32.into(), 4u32.into()),
            Err(GroupError::NotPrime(PrimeParam::Q))
        );
        assert_eq!(
            make_group(23u32.into(), 7u32.into(), 4u32.into()),
            Err(GroupError::OrderMismatch)
        );
        assert_eq!(
            make_group(23u32.into(), 11u32.into(), 1u32.into()),
            Err(GroupError::BadGenerator)
        );
        assert_eq!(
            make_group(23u32.into(), 11u32.into(), 27u32.into()),
            Err(GroupError::BadGenerator)
        );
    }

    #[test]
    fn exp_examples() {
        let toy = GroupParams::toy();
        let g = toy.generator();
        let three = toy.scalar_from_u64(3).unwrap();
        assert_eq!(g.pow(&three).value(), &BigUint::from(18u32));
        assert!(g.pow(&toy.scalar_from_u64(0).unwrap()).is_identity());
        // q itself is not a scalar; g^11 through repeated multiplication is 1.
        assert_eq!(slow_pow(4, 11), 1);
        assert_eq!(toy.scalar_from_u64(11), Err(GroupError::ScalarOutOfRange));
    }

    #[test]
    fn exp_matches_repeated_multiplication_on_whole_subgroup() {
        let toy = GroupParams::toy();
        for base in toy_power_table() {
            let elem = GroupElement::from_trusted(base.into(), &toy);
            for e in 0..11u64 {
                let got = elem.pow(&toy.scalar_from_u64(e).unwrap());
                assert_eq!(got.value(), &BigUint::from(slow_pow(base, e)), "{base}^{e}");
            }
        }
    }

    #[test]
    fn generator_table_matches_modpow() {
        let modp = GroupParams::modp2048();
        let g = modp.generator();
        let mut rng = ChaCha20Rng::seed_from_u64(9);
        let q_minus_one = modp.q() - 1u32;
        let mut exps = vec![
            BigUint::zero(),
            BigUint::one(),
            BigUint::from(64u32),
            q_minus_one,
        ];
        exps.extend((0..8).map(|_| rng.gen_biguint_below(modp.q())));
        for e in exps {
            let want = modp.g().modpow(&e, modp.p());
            assert_eq!(g.pow(&modp.scalar(e).unwrap()).value(), &want);
        }
    }

    #[test]
    fn mul_and_div() {
        let toy = GroupParams::toy();
        let a = toy.validate_element(&16u32.into()).unwrap();
        let b = toy.validate_element(&18u32.into()).unwrap();
        assert_eq!(a.mul(&b).unwrap().value(), &BigUint::from(12u32));
        assert_eq!(toy.identity().mul(&a).unwrap(), a);
        assert_eq!(a.mul(&b).unwrap().div(&b).unwrap(), a);
    }

    #[test]
    fn mixing_groups_is_an_error() {
        let toy = GroupParams::toy();
        let other = make_group(47u32.into(), 23u32.into(), 4u32.into()).unwrap();
        let a = toy.generator();
        let b = other.generator();
        assert_eq!(a.mul(&b), Err(GroupError::ParamsMismatch));
        assert_eq!(a.div(&b), Err(GroupError::ParamsMismatch));
    }

    #[test]
    fn validate_element_cases() {
        let toy = GroupParams::toy();
        let members = toy_power_table();
        let mut sorted = members.clone();
        sorted.sort_unstable();
        assert_eq!(sorted, vec![1, 2, 3, 4, 6, 8, 9, 12, 13, 16, 18]);

        assert!(toy.validate_element(&18u32.into()).is_ok());
        assert_eq!(
            toy.validate_element(&1u32.into()),
            Err(GroupError::IdentityRejected)
        );
        assert_eq!(
            toy.validate_element(&7u32.into()),
            Err(GroupError::NotInSubgroup)
        );
        assert_eq!(
            toy.validate_element(&0u32.into()),
            Err(GroupError::OutOfRange)
        );
        assert_eq!(
            toy.validate_element(&23u32.into()),
            Err(GroupError::OutOfRange)
        );
        for v in 1..23u64 {
            assert_eq!(
                toy.is_member(&v.into()),
                members.contains(&v),
                "membership of {v}"
            );
        }
    }

    #[test]
    fn legendre_membership_agrees_with_exponent_test() {
        let p = BigUint::from(1019u32); // 2 * 509 + 1
        let group = make_group(p.clone(), 509u32.into(), 4u32.into()).unwrap();
        for v in 1..1019u32 {
            let v = BigUint::from(v);
            assert_eq!(group.is_member(&v), v.modpow(&509u32.into(), &p).is_one());
        }
    }

    #[test]
    fn random_scalar_range_and_determinism() {
        let toy = GroupParams::toy();
        let mut seen = [false; 11];
        let mut rng = ChaCha20Rng::seed_from_u64(7);
        for _ in 0..10_000 {
            let s = toy.random_scalar(&mut rng).to_u64().unwrap();
            assert!((1..=10).contains(&s));
            seen[s as usize] = true;
        }
        assert!(seen[1..].iter().all(|&b| b));

        let a = toy.random_scalar(&mut ChaCha20Rng::seed_from_u64(99));
        let b = toy.random_scalar(&mut ChaCha20Rng::seed_from_u64(99));
        assert_eq!(a, b);
    }

    #[test]
    fn encodings_are_fixed_width() {
        let modp = GroupParams::modp2048();
        assert_eq!(modp.element_len(), 256);
        assert_eq!(modp.scalar_len(), 256);
        let g = modp.generator();
        let bytes = g.to_bytes();
        assert_eq!(bytes.len(), 256);
        assert_eq!(bytes[255], 4);
        assert_eq!(modp.element_from_bytes(&bytes).unwrap(), g);
        assert_eq!(
            modp.element_from_bytes(&bytes[1..]),
            Err(GroupError::BadLength {
                expected: 256,
                got: 255
            })
        );
    }

    #[test]
    fn param_file_round_trip_and_errors() {
        let toy = GroupParams::toy();
        let text = toy.to_param_text();
        assert_eq!(text, "p=17\nq=b\ng=4\n");
        assert_eq!(GroupParams::from_param_text(&text).unwrap(), toy);
        assert!(matches!(
            GroupParams::from_param_text("p=17\nq=b\n"),
            Err(GroupError::ParamFile(_))
        ));
        assert!(matches!(
            GroupParams::from_param_text("p=17\np=17\nq=b\ng=4"),
            Err(GroupError::ParamFile(_))
        ));
        assert!(matches!(
            GroupParams::from_param_text("p=zz\nq=b\ng=4"),
            Err(GroupError::ParamFile(_))
        ));
        assert_eq!(
            GroupParams::from_param_text("p=17\nq=b\ng=5"),
            Err(GroupError::BadGenerator)
        );
    }

    #[test]
    fn primality() {
        let primes: Vec<u32> = (0..200u32)
            .filter(|&n| n >= 2 && (2..n).all(|d| n % d != 0))
            .collect();
        for n in 0..200u32 {
            assert_eq!(
                is_probable_prime(&n.into(), 16),
                primes.contains(&n),
                "n = {n}"
            );
        }
        // Carmichael number
        assert!(!is_probable_prime(&561u32.into(), 16));
        // 2^127 - 1
        let m127 = (BigUint::one() << 127u32) - 1u32;
        assert!(is_probable_prime(&m127, 16));
    }
}
