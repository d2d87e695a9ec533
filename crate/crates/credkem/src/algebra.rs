//! Bilinear-group toolkit for the CRED1 suite profile.
//!
//! The constructions in this crate are written for a symmetric pairing on
//! paper; here they run on an asymmetric (type-3) curve, BLS12-381, with a
//! fixed placement: everything a ciphertext carries lives on the cipher side
//! (G1), everything a key carries lives on the key side (G2). Elements that
//! are conceptually "one random group element" used on both sides are
//! published as dual-base pairs sharing a discrete log; the authority holds
//! the exponent and builds each side directly.
//!
//! Suite profile CRED1:
//! * curve BLS12-381, cipher side = G1 (48-byte compressed), key side = G2
//!   (96-byte compressed), target group in 288-byte torus-compressed form
//!   (identity encoded as all zeros, which no other element decodes to);
//! * `H(x)  = SHA-256("cred1/kdf" || x)`;
//! * `H'(x) = SHA-256("cred1/seed" || x)`;
//! * `PRG(seed, l) = SHAKE256(seed)` truncated to `l` bits.

use blstrs::{Compress, G1Affine, G1Projective, G2Affine, G2Projective, Gt};
use ff::Field;
use group::Group;
use rand::RngCore;
use sha2::{Digest, Sha256};
use sha3::digest::{ExtendableOutput, Update, XofReader};
use sha3::Shake256;

use crate::error::{Error, Result};

/// Exponents modulo the group order.
pub use blstrs::Scalar;

/// Numeric id of the CRED1 suite profile, embedded in every artifact.
pub const SUITE_ID: u8 = 1;

/// Domain-separation prefix of the key-derivation hash `H`.
const KDF_PREFIX: &[u8] = b"cred1/kdf";
/// Domain-separation prefix of the seed hash `H'`.
const SEED_PREFIX: &[u8] = b"cred1/seed";

/// Bytes read from the PRG stream per derived scalar: the group order has
/// 255 bits, and we oversample by 128 bits before reducing, so the bias
/// introduced by the reduction is below 2^-128.
pub const SCALAR_SAMPLE_BYTES: usize = (255usize + 128).div_ceil(8);

/// Element of the ciphertext-side source group (G1).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CipherSideElement(pub(crate) G1Projective);

/// Element of the key-side source group (G2).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct KeySideElement(pub(crate) G2Projective);

/// Element of the target group.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TargetElement(pub(crate) Gt);

impl CipherSideElement {
    pub const ENCODED_LEN: usize = 48;

    pub fn identity() -> Self {
        Self(G1Projective::identity())
    }

    pub fn is_identity(&self) -> bool {
        bool::from(self.0.is_identity())
    }

    /// Group exponentiation (the group is written multiplicatively here).
    pub fn pow(&self, e: &Scalar) -> Self {
        Self(self.0 * e)
    }

    pub fn invert(&self) -> Self {
        Self(-self.0)
    }

    /// Canonical compressed encoding per the curve's standard serialization.
    pub fn to_bytes(&self) -> [u8; Self::ENCODED_LEN] {
        G1Affine::from(self.0).to_compressed()
    }

    /// Decodes and subgroup-checks a compressed point.
    pub fn from_bytes(bytes: &[u8; Self::ENCODED_LEN]) -> Result<Self> {
        Option::from(G1Affine::from_compressed(bytes))
            .map(|p: G1Affine| Self(p.into()))
            .ok_or(Error::InvalidElement)
    }
}

impl std::ops::Mul for CipherSideElement {
    type Output = Self;
    /// The group law; this API is multiplicative over an additive backend.
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn mul(self, rhs: Self) -> Self {
        Self(self.0 + rhs.0)
    }
}

impl KeySideElement {
    pub const ENCODED_LEN: usize = 96;

    pub fn identity() -> Self {
        Self(G2Projective::identity())
    }

    pub fn is_identity(&self) -> bool {
        bool::from(self.0.is_identity())
    }

    pub fn pow(&self, e: &Scalar) -> Self {
        Self(self.0 * e)
    }

    pub fn invert(&self) -> Self {
        Self(-self.0)
    }

    pub fn to_bytes(&self) -> [u8; Self::ENCODED_LEN] {
        G2Affine::from(self.0).to_compressed()
    }

    pub fn from_bytes(bytes: &[u8; Self::ENCODED_LEN]) -> Result<Self> {
        Option::from(G2Affine::from_compressed(bytes))
            .map(|p: G2Affine| Self(p.into()))
            .ok_or(Error::InvalidElement)
    }
}

impl std::ops::Mul for KeySideElement {
    type Output = Self;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn mul(self, rhs: Self) -> Self {
        Self(self.0 + rhs.0)
    }
}

impl TargetElement {
    pub const ENCODED_LEN: usize = 288;

    pub fn identity() -> Self {
        Self(Gt::identity())
    }

    pub fn is_identity(&self) -> bool {
        bool::from(self.0.is_identity())
    }

    pub fn pow(&self, e: &Scalar) -> Self {
        Self(self.0 * e)
    }

    pub fn invert(&self) -> Self {
        Self(-self.0)
    }

    /// Canonical target-group encoding: torus compression, with the identity
    /// mapped to all zeros (the zero field element is not a valid torus
    /// representative, so the map stays injective).
    pub fn to_bytes(&self) -> [u8; Self::ENCODED_LEN] {
        let mut out = [0u8; Self::ENCODED_LEN];
        if !self.is_identity() {
            let mut buf = Vec::with_capacity(Self::ENCODED_LEN);
            self.0
                .write_compressed(&mut buf)
                .expect("writing to a Vec cannot fail");
            out.copy_from_slice(&buf);
        }
        out
    }

    pub fn from_bytes(bytes: &[u8; Self::ENCODED_LEN]) -> Result<Self> {
        if bytes.iter().all(|&b| b == 0) {
            return Ok(Self::identity());
        }
        Gt::read_compressed(&bytes[..])
            .map(Self)
            .map_err(|_| Error::InvalidElement)
    }
}

impl std::ops::Mul for TargetElement {
    type Output = Self;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn mul(self, rhs: Self) -> Self {
        Self(self.0 + rhs.0)
    }
}

impl std::ops::Div for TargetElement {
    type Output = Self;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, rhs: Self) -> Self {
        Self(self.0 - rhs.0)
    }
}

/// The fixed pairing configuration: both source-group generators plus the
/// suite id. There is exactly one profile, CRED1.
#[derive(Clone, Copy, Debug)]
pub struct PairingContext {
    pub cipher_generator: CipherSideElement,
    pub key_generator: KeySideElement,
    pub suite: u8,
}

impl PairingContext {
    pub fn cred1() -> Self {
        Self {
            cipher_generator: CipherSideElement(G1Projective::generator()),
            key_generator: KeySideElement(G2Projective::generator()),
            suite: SUITE_ID,
        }
    }

    /// Non-degeneracy: the pairing of the two generators is not the identity.
    pub fn is_non_degenerate(&self) -> bool {
        !pair(&self.cipher_generator, &self.key_generator).is_identity()
    }
}

impl Default for PairingContext {
    fn default() -> Self {
        Self::cred1()
    }
}

/// The bilinear map.
pub fn pair(a: &CipherSideElement, b: &KeySideElement) -> TargetElement {
    TargetElement(blstrs::pairing(&G1Affine::from(a.0), &G2Affine::from(b.0)))
}

/// Draws a uniform scalar from an external randomness source.
pub fn random_scalar<R: RngCore>(rng: &mut R) -> Scalar {
    Scalar::random(rng)
}

/// `PRG(seed, l)`: SHAKE256 truncated to `bit_len` bits.
///
/// The profile restricts `bit_len` to whole bytes.
pub fn prg_expand(seed: &[u8], bit_len: usize) -> Vec<u8> {
    assert!(
        bit_len.is_multiple_of(8),
        "CRED1 PRG output length must be a whole number of bytes"
    );
    let mut xof = Shake256::default();
    xof.update(seed);
    let mut out = vec![0u8; bit_len / 8];
    xof.finalize_xof().read(&mut out);
    out
}

/// Deterministically derives `count` scalars from one PRG stream.
///
/// Each scalar consumes [`SCALAR_SAMPLE_BYTES`] bytes, interpreted as a
/// big-endian integer and reduced modulo the group order.
pub fn derive_scalars(seed: &[u8], count: usize) -> Vec<Scalar> {
    let mut xof = Shake256::default();
    xof.update(seed);
    let mut reader = xof.finalize_xof();
    let mut out = Vec::with_capacity(count);
    let mut chunk = [0u8; SCALAR_SAMPLE_BYTES];
    for _ in 0..count {
        reader.read(&mut chunk);
        out.push(scalar_from_wide_be_bytes(&chunk));
    }
    out
}

/// Big-endian bytes to scalar, with exact modular reduction (Horner).
fn scalar_from_wide_be_bytes(bytes: &[u8]) -> Scalar {
    let radix = Scalar::from(256u64);
    bytes
        .iter()
        .fold(Scalar::ZERO, |acc, &b| acc * radix + Scalar::from(b as u64))
}

/// `H(x)`: the key-derivation hash of the CRED1 profile.
pub fn kdf_hash(input: &[u8]) -> [u8; 32] {
    let mut h = Sha256::new();
    Digest::update(&mut h, KDF_PREFIX);
    Digest::update(&mut h, input);
    h.finalize().into()
}

/// `H'(x)`: the seed hash of the CRED1 profile.
pub fn seed_hash(input: &[u8]) -> [u8; 32] {
    let mut h = Sha256::new();
    Digest::update(&mut h, SEED_PREFIX);
    Digest::update(&mut h, input);
    h.finalize().into()
}
