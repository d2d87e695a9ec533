//! The anonymity transform: deterministic encryption plus a full
//! re-encryption check.
//!
//! A verifier encapsulates `(K_c || r_c)` under a policy, where the session
//! nonce `r_c` was chosen by the *prover*. All randomness is derived from
//! `H'(r_c || K_c || policy)`, so the bundle is a pure function of its
//! inputs. On decryption the prover recovers the pad from the shared secret,
//! unmasks `(K_c || r_c)`, checks the nonce, then re-runs the whole
//! encryption and compares bytes with what it received. Anything a dishonest
//! verifier bent out of shape, a single byte anywhere, fails that
//! comparison.

use rand::{CryptoRng, RngCore};
use subtle::ConstantTimeEq;

use crate::algebra::{kdf_hash, prg_expand, seed_hash, SUITE_ID};
use crate::error::{Error, Result};
use crate::kem::{self, BaseCiphertext, BaseKey, BaseMpk};
use crate::keystore;
use crate::lsss::{canonical_bytes, parse_policy, Policy};
use crate::revocable::{self, RevCiphertext, RevMasterPublicKey, RevSecretKey};

/// Length of the session nonce `r_c` in bytes.
pub const NONCE_BYTES: usize = 32;
/// Length of the secret token `K_c` in bytes.
pub const TOKEN_BYTES: usize = 32;
/// PRG output length (bits) for both the XOR pad and the encryption seed.
const PAD_BITS: usize = 8 * (TOKEN_BYTES + NONCE_BYTES);

/// Per-session nonce chosen by the decrypting party (the prover).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SessionNonce(pub [u8; NONCE_BYTES]);

impl SessionNonce {
    pub fn random<R: RngCore + CryptoRng>(rng: &mut R) -> Self {
        let mut bytes = [0u8; NONCE_BYTES];
        rng.fill_bytes(&mut bytes);
        Self(bytes)
    }
}

/// Per-challenge secret token chosen by the verifier.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Token(pub [u8; TOKEN_BYTES]);

impl Token {
    pub fn random<R: RngCore + CryptoRng>(rng: &mut R) -> Self {
        let mut bytes = [0u8; TOKEN_BYTES];
        rng.fill_bytes(&mut bytes);
        Self(bytes)
    }
}

/// The policy-bound KEM ciphertext inside a bundle (base or revocable mode).
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AbkemCiphertext {
    Base(BaseCiphertext),
    Revocable(RevCiphertext),
}

/// The verifier's challenge: KEM ciphertext, masked `(K_c || r_c)`,
/// canonical policy bytes, epoch stamp and suite id.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChallengeBundle {
    pub abkem: AbkemCiphertext,
    /// `PRG(H(secret)) xor (K_c || r_c)`, token half first.
    pub c: [u8; TOKEN_BYTES + NONCE_BYTES],
    pub policy_bytes: Vec<u8>,
    /// Epoch of the revocable ciphertext; zero in base mode.
    pub epoch: u64,
    pub suite: u8,
}

impl ChallengeBundle {
    /// Canonical envelope bytes; what the re-encryption check compares.
    pub fn to_bytes(&self) -> Vec<u8> {
        keystore::encode(self)
    }
}

/// Which scheme's public parameters the transform runs over.
#[derive(Clone, Copy, Debug)]
pub enum KemPublicRef<'a> {
    Base(&'a BaseMpk),
    Revocable(&'a RevMasterPublicKey),
}

/// The matching user key.
#[derive(Clone, Copy, Debug)]
pub enum KemKeyRef<'a> {
    Base(&'a BaseKey),
    Revocable(&'a RevSecretKey),
}

/// Deterministically encapsulates `(K_c || r_c)` under `policy`.
///
/// Identical inputs produce byte-identical bundles; that determinism is what
/// the prover later verifies.
pub fn encrypt(
    pk: KemPublicRef<'_>,
    policy: &Policy,
    nonce: &SessionNonce,
    token: &Token,
) -> Result<ChallengeBundle> {
    let am = crate::lsss::compile(policy)?;
    let policy_bytes = canonical_bytes(policy);

    // seed input is r_c || K_c || AP
    let mut seed_input = Vec::with_capacity(NONCE_BYTES + TOKEN_BYTES + policy_bytes.len());
    seed_input.extend_from_slice(&nonce.0);
    seed_input.extend_from_slice(&token.0);
    seed_input.extend_from_slice(&policy_bytes);
    let u = prg_expand(&seed_hash(&seed_input), PAD_BITS);

    let (secret, abkem, epoch) = match pk {
        KemPublicRef::Base(mpk) => {
            let (secret, ct) = kem::encrypt_seeded(mpk, &am, &u)?;
            (secret, AbkemCiphertext::Base(ct), 0)
        }
        KemPublicRef::Revocable(mpk) => {
            let (secret, ct) = revocable::encrypt_seeded(mpk, &am, &u)?;
            let epoch = ct.epoch;
            (secret, AbkemCiphertext::Revocable(ct), epoch)
        }
    };

    let pad = prg_expand(&kdf_hash(&secret.to_bytes()), PAD_BITS);
    let mut c = [0u8; TOKEN_BYTES + NONCE_BYTES];
    for (i, byte) in token.0.iter().chain(nonce.0.iter()).enumerate() {
        c[i] = pad[i] ^ byte;
    }
    Ok(ChallengeBundle {
        abkem,
        c,
        policy_bytes,
        epoch,
        suite: SUITE_ID,
    })
}

/// Opens a challenge bundle: decrypts, unmasks, checks the nonce, then
/// re-encrypts the whole bundle and compares bytes.
pub fn decrypt(
    key: KemKeyRef<'_>,
    bundle: &ChallengeBundle,
    nonce: &SessionNonce,
    pk: KemPublicRef<'_>,
) -> Result<Token> {
    let policy_text = std::str::from_utf8(&bundle.policy_bytes)
        .map_err(|_| Error::MalformedEnvelope("policy bytes are not UTF-8".into()))?;
    let policy = parse_policy(policy_text)?;

    let secret = match (key, &bundle.abkem) {
        (KemKeyRef::Base(k), AbkemCiphertext::Base(ct)) => kem::decrypt(k, ct)?,
        (KemKeyRef::Revocable(k), AbkemCiphertext::Revocable(ct)) => revocable::decrypt(k, ct)?,
        _ => return Err(Error::ModeMismatch),
    };

    let pad = prg_expand(&kdf_hash(&secret.to_bytes()), PAD_BITS);
    let mut token = [0u8; TOKEN_BYTES];
    let mut echoed_nonce = [0u8; NONCE_BYTES];
    for i in 0..TOKEN_BYTES {
        token[i] = bundle.c[i] ^ pad[i];
    }
    for i in 0..NONCE_BYTES {
        echoed_nonce[i] = bundle.c[TOKEN_BYTES + i] ^ pad[TOKEN_BYTES + i];
    }
    if !bool::from(echoed_nonce.ct_eq(&nonce.0)) {
        return Err(Error::NonceMismatch);
    }

    let token = Token(token);
    let rebuilt = encrypt(pk, &policy, nonce, &token)?;
    if rebuilt.to_bytes() != bundle.to_bytes() {
        return Err(Error::ReencryptMismatch);
    }
    Ok(token)
}
