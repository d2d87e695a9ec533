//! Ciphertext-policy attribute KEM (small-universe Waters style).
//!
//! Encryption takes a compiled access matrix and yields a random target-group
//! secret plus a ciphertext; any key whose attribute set satisfies the matrix
//! recovers the same secret, no other key learns anything about it. With an
//! explicit seed the whole operation is a pure function of
//! `(mpk, matrix, seed)`, the property the anonymity transform builds on.

use std::collections::{BTreeMap, BTreeSet};

use rand::{CryptoRng, RngCore};

use crate::algebra::{
    derive_scalars, pair, random_scalar, CipherSideElement, KeySideElement, PairingContext, Scalar,
    TargetElement, SUITE_ID,
};
use crate::error::{Error, Result};
use crate::keystore;
use crate::lsss::{reconstruction_coefficients, AccessMatrix};

/// Hard cap on the attribute universe.
pub const MAX_UNIVERSE: usize = 64;

/// Public parameters of the base scheme.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BaseMpk {
    pub g: CipherSideElement,
    pub g_a: CipherSideElement,
    /// Cipher-side attribute bases `h_x`.
    pub h: BTreeMap<String, CipherSideElement>,
    pub e_gg_alpha: TargetElement,
    pub universe: Vec<String>,
    pub suite: u8,
}

/// Authority trapdoors of the base scheme. `z` holds the discrete logs of
/// the attribute bases, so the authority can mirror `h_x` onto the key side.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BaseMsk {
    pub alpha: Scalar,
    pub a: Scalar,
    pub z: BTreeMap<String, Scalar>,
}

/// A user decryption key for an attribute set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BaseKey {
    pub k: KeySideElement,
    pub l: KeySideElement,
    pub k_x: BTreeMap<String, KeySideElement>,
    pub attrs: BTreeSet<String>,
}

/// A policy-bound ciphertext; the encapsulated secret is *not* part of it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BaseCiphertext {
    pub c_prime: CipherSideElement,
    pub c_k: Vec<CipherSideElement>,
    pub am: AccessMatrix,
}

pub(crate) fn check_universe(universe: &[String]) -> Result<()> {
    if universe.is_empty() {
        return Err(Error::MalformedEnvelope("empty attribute universe".into()));
    }
    if universe.len() > MAX_UNIVERSE {
        return Err(Error::UniverseTooLarge {
            got: universe.len(),
            max: MAX_UNIVERSE,
        });
    }
    let mut seen = BTreeSet::new();
    for a in universe {
        if !seen.insert(a) {
            return Err(Error::DuplicateAttribute(a.clone()));
        }
    }
    Ok(())
}

/// Creates a fresh authority: public parameters plus master secret.
pub fn setup<R: RngCore + CryptoRng>(
    universe: &[String],
    rng: &mut R,
) -> Result<(BaseMpk, BaseMsk)> {
    check_universe(universe)?;
    let ctx = PairingContext::cred1();
    let alpha = random_scalar(rng);
    let a = random_scalar(rng);
    let mut z = BTreeMap::new();
    let mut h = BTreeMap::new();
    for attr in universe {
        let z_x = random_scalar(rng);
        h.insert(attr.clone(), ctx.cipher_generator.pow(&z_x));
        z.insert(attr.clone(), z_x);
    }
    let mpk = BaseMpk {
        g: ctx.cipher_generator,
        g_a: ctx.cipher_generator.pow(&a),
        h,
        e_gg_alpha: pair(&ctx.cipher_generator, &ctx.key_generator).pow(&alpha),
        universe: universe.to_vec(),
        suite: SUITE_ID,
    };
    Ok((mpk, BaseMsk { alpha, a, z }))
}

/// Issues a key for an attribute set: `K = g^(alpha + a t)`, `L = g^t`,
/// `K_x = g^(z_x t)` for fresh `t`.
pub fn keygen<R: RngCore + CryptoRng>(
    mpk: &BaseMpk,
    msk: &BaseMsk,
    attrs: &BTreeSet<String>,
    rng: &mut R,
) -> Result<BaseKey> {
    let ctx = PairingContext::cred1();
    let t = random_scalar(rng);
    let mut k_x = BTreeMap::new();
    for attr in attrs {
        if !mpk.h.contains_key(attr) {
            return Err(Error::UnknownAttribute(attr.clone()));
        }
        let z_x = &msk.z[attr];
        k_x.insert(attr.clone(), ctx.key_generator.pow(&(z_x * t)));
    }
    Ok(BaseKey {
        k: ctx.key_generator.pow(&(msk.alpha + msk.a * t)),
        l: ctx.key_generator.pow(&t),
        k_x,
        attrs: attrs.clone(),
    })
}

fn shares(am: &AccessMatrix, v: &[Scalar]) -> Vec<Scalar> {
    am.matrix
        .iter()
        .map(|row| row.iter().zip(v).map(|(m, y)| m * y).sum())
        .collect()
}

fn encrypt_with_vector(
    mpk: &BaseMpk,
    am: &AccessMatrix,
    v: &[Scalar],
) -> Result<(TargetElement, BaseCiphertext)> {
    let s = v[0];
    let lambda = shares(am, v);
    let neg_s = -s;
    let mut c_k = Vec::with_capacity(am.row_count());
    for (k, lambda_k) in lambda.iter().enumerate() {
        let attr = &am.rho[k];
        let h_x = mpk
            .h
            .get(attr)
            .ok_or_else(|| Error::UnknownAttribute(attr.clone()))?;
        c_k.push(mpk.g_a.pow(lambda_k) * h_x.pow(&neg_s));
    }
    let ct = BaseCiphertext {
        c_prime: mpk.g.pow(&s),
        c_k,
        am: am.clone(),
    };
    Ok((mpk.e_gg_alpha.pow(&s), ct))
}

/// Encapsulates a fresh secret under the access matrix.
pub fn encrypt<R: RngCore + CryptoRng>(
    mpk: &BaseMpk,
    am: &AccessMatrix,
    rng: &mut R,
) -> Result<(TargetElement, BaseCiphertext)> {
    let v: Vec<Scalar> = (0..am.width()).map(|_| random_scalar(rng)).collect();
    encrypt_with_vector(mpk, am, &v)
}

/// Deterministic encryption: the sharing vector `(s, y_2, ..., y_m)` is
/// derived from the seed, `s` first.
pub fn encrypt_seeded(
    mpk: &BaseMpk,
    am: &AccessMatrix,
    seed: &[u8],
) -> Result<(TargetElement, BaseCiphertext)> {
    let v = derive_scalars(seed, am.width());
    encrypt_with_vector(mpk, am, &v)
}

/// Recovers the encapsulated secret, or fails with [`Error::NotSatisfied`].
pub fn decrypt(key: &BaseKey, ct: &BaseCiphertext) -> Result<TargetElement> {
    let omega = reconstruction_coefficients(&ct.am, &key.attrs).ok_or(Error::NotSatisfied)?;
    let mut denominator = TargetElement::identity();
    for (k, w) in &omega {
        let k_x = key
            .k_x
            .get(&ct.am.rho[*k])
            .ok_or_else(|| Error::UnknownAttribute(ct.am.rho[*k].clone()))?;
        let row_factor = pair(&ct.c_k[*k], &key.l) * pair(&ct.c_prime, k_x);
        denominator = denominator * row_factor.pow(w);
    }
    Ok(pair(&ct.c_prime, &key.k) / denominator)
}

/// Canonical bytes of a base ciphertext (keystore envelope).
pub fn ciphertext_bytes(ct: &BaseCiphertext) -> Vec<u8> {
    keystore::encode(ct)
}
