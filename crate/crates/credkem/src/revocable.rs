//! The attribute KEM with accumulator-bound keys and forward revocation.
//!
//! Every issued key carries an accumulator index and a membership witness;
//! ciphertexts bind to the accumulator value of the epoch they were created
//! in. Revoking an index changes the accumulator, so ciphertexts from later
//! epochs are out of reach for the revoked key: its witness can no longer be
//! brought forward. Ciphertexts from earlier epochs stay decryptable against
//! the matching public-key snapshot (forward revocation, not erasure).
//!
//! Epoch discipline is explicit: every issuance or revocation bumps the
//! epoch, all artifacts are stamped, and decryption refuses mismatched
//! epochs instead of producing garbage.

use std::collections::{BTreeMap, BTreeSet};

use ff::Field;
use rand::{CryptoRng, RngCore};

use crate::accumulator::{self, AccParams, AccumulatorState, Change, EpochDelta, Witness};
use crate::algebra::{
    derive_scalars, pair, random_scalar, CipherSideElement, KeySideElement, PairingContext, Scalar,
    TargetElement, SUITE_ID,
};
use crate::error::{Error, Result};
use crate::kem::check_universe;
use crate::lsss::{reconstruction_coefficients, AccessMatrix};

/// Epoch-stamped public parameters.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RevMasterPublicKey {
    pub g: CipherSideElement,
    pub g_b: CipherSideElement,
    /// Cipher-side attribute bases `h_x`.
    pub h: BTreeMap<String, CipherSideElement>,
    /// Accumulator value for the current member set.
    pub acc: CipherSideElement,
    /// `acc^a`, the base the encryptor raises row shares to.
    pub acc_a: CipherSideElement,
    /// `e(acc, g)^alpha * e(g^b, g^(gamma^(n+1)))`: its `s`-th power is the
    /// shared secret.
    pub blind: TargetElement,
    /// Published accumulator power sequence.
    pub params: AccParams,
    /// Active member indices (`V`) at this epoch.
    pub members: BTreeSet<u32>,
    pub epoch: u64,
    pub universe: Vec<String>,
    pub suite: u8,
}

/// Authority trapdoors plus the live accumulator state.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RevMasterSecretKey {
    pub alpha: Scalar,
    pub a: Scalar,
    pub b: Scalar,
    pub gamma: Scalar,
    pub z: BTreeMap<String, Scalar>,
    /// Next index to hand out; indices are never reused.
    pub next_index: u32,
    pub state: AccumulatorState,
}

/// A user key bound to accumulator index `index`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RevSecretKey {
    pub index: u32,
    /// `g^(alpha + a b t + b gamma^index)`.
    pub k: KeySideElement,
    /// `g^(b t)`.
    pub l: KeySideElement,
    /// `g^(z_x t)` per attribute.
    pub k_x: BTreeMap<String, KeySideElement>,
    pub witness: Witness,
    pub attrs: BTreeSet<String>,
    pub epoch: u64,
}

/// Ciphertext of the revocable scheme, stamped with the accumulator epoch it
/// was produced against.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RevCiphertext {
    /// `g^(b s)`.
    pub c_prime: CipherSideElement,
    /// `acc^(a lambda_k) * h_(rho_k)^(-s)` per row.
    pub c_k: Vec<CipherSideElement>,
    /// `acc^s`.
    pub c_dprime: CipherSideElement,
    pub am: AccessMatrix,
    pub epoch: u64,
}

fn gamma_power(gamma: &Scalar, k: u32) -> Scalar {
    gamma.pow_vartime([k as u64])
}

/// Recomputes the published accumulator-dependent terms from the secrets.
fn publish(template: &RevMasterPublicKey, msk: &RevMasterSecretKey) -> RevMasterPublicKey {
    let ctx = PairingContext::cred1();
    let acc = msk.state.acc;
    let n = template.params.capacity();
    let blind = pair(&acc, &ctx.key_generator).pow(&msk.alpha)
        * pair(&template.g_b, &ctx.key_generator).pow(&gamma_power(&msk.gamma, n + 1));
    RevMasterPublicKey {
        acc,
        acc_a: acc.pow(&msk.a),
        blind,
        members: msk.state.members.clone(),
        epoch: msk.state.epoch,
        ..template.clone()
    }
}

/// Creates the authority: trapdoors, an empty accumulator of the given
/// capacity, and the published parameters for epoch 0.
pub fn setup<R: RngCore + CryptoRng>(
    universe: &[String],
    capacity: u32,
    rng: &mut R,
) -> Result<(RevMasterPublicKey, RevMasterSecretKey)> {
    check_universe(universe)?;
    assert!(capacity >= 1, "capacity must be at least 1");
    let ctx = PairingContext::cred1();
    let alpha = random_scalar(rng);
    let a = random_scalar(rng);
    let b = random_scalar(rng);
    let gamma = random_scalar(rng);
    let mut z = BTreeMap::new();
    let mut h = BTreeMap::new();
    for attr in universe {
        let z_x = random_scalar(rng);
        h.insert(attr.clone(), ctx.cipher_generator.pow(&z_x));
        z.insert(attr.clone(), z_x);
    }
    let (params, state) = accumulator::init(capacity, &gamma);
    let msk = RevMasterSecretKey {
        alpha,
        a,
        b,
        gamma,
        z,
        next_index: 1,
        state,
    };
    let template = RevMasterPublicKey {
        g: ctx.cipher_generator,
        g_b: ctx.cipher_generator.pow(&b),
        h,
        acc: CipherSideElement::identity(),
        acc_a: CipherSideElement::identity(),
        blind: TargetElement::identity(),
        params,
        members: BTreeSet::new(),
        epoch: 0,
        universe: universe.to_vec(),
        suite: SUITE_ID,
    };
    let mpk = publish(&template, &msk);
    Ok((mpk, msk))
}

/// Issues a key for `attrs` under the next free index and republishes the
/// public parameters. Witnesses of previously issued keys become stale.
pub fn keygen<R: RngCore + CryptoRng>(
    mpk: &RevMasterPublicKey,
    msk: &mut RevMasterSecretKey,
    attrs: &BTreeSet<String>,
    rng: &mut R,
) -> Result<(RevSecretKey, RevMasterPublicKey)> {
    for attr in attrs {
        if !mpk.h.contains_key(attr) {
            return Err(Error::UnknownAttribute(attr.clone()));
        }
    }
    let index = msk.next_index;
    if index > mpk.params.capacity() {
        return Err(Error::CapacityExceeded(mpk.params.capacity()));
    }
    let next_state = accumulator::update(&mpk.params, &msk.state, Change::Add(index), &msk.gamma)?;
    msk.state = next_state;
    msk.next_index = index + 1;
    let new_mpk = publish(mpk, msk);

    let ctx = PairingContext::cred1();
    let t = random_scalar(rng);
    let k_exp = msk.alpha + msk.a * msk.b * t + msk.b * gamma_power(&msk.gamma, index);
    let mut k_x = BTreeMap::new();
    for attr in attrs {
        k_x.insert(attr.clone(), ctx.key_generator.pow(&(msk.z[attr] * t)));
    }
    let witness =
        accumulator::compute_witness(&mpk.params, &msk.state.members, index, msk.state.epoch)?;
    let key = RevSecretKey {
        index,
        k: ctx.key_generator.pow(&k_exp),
        l: ctx.key_generator.pow(&(msk.b * t)),
        k_x,
        witness,
        attrs: attrs.clone(),
        epoch: msk.state.epoch,
    };
    Ok((key, new_mpk))
}

/// Revokes index `index` and republishes the public parameters.
pub fn remove_key(
    mpk: &RevMasterPublicKey,
    msk: &mut RevMasterSecretKey,
    index: u32,
) -> Result<RevMasterPublicKey> {
    let next_state =
        accumulator::update(&mpk.params, &msk.state, Change::Remove(index), &msk.gamma)?;
    msk.state = next_state;
    Ok(publish(mpk, msk))
}

/// Brings a key forward from the epoch of `mpk_old` to that of `mpk_new` by
/// updating its witness locally. The key components themselves are unchanged.
pub fn update_key(
    key: &RevSecretKey,
    mpk_old: &RevMasterPublicKey,
    mpk_new: &RevMasterPublicKey,
) -> Result<RevSecretKey> {
    if key.epoch != mpk_old.epoch {
        return Err(Error::EpochMismatch {
            key: key.epoch,
            expected: mpk_old.epoch,
        });
    }
    let witness = accumulator::update_witness(
        &mpk_new.params,
        &key.witness,
        &mpk_old.members,
        &mpk_new.members,
        mpk_new.epoch,
    )?;
    Ok(RevSecretKey {
        witness,
        epoch: mpk_new.epoch,
        ..key.clone()
    })
}

/// Delta-record form of [`update_key`], for clients that follow the
/// authority's published change feed instead of holding two full snapshots.
pub fn update_key_with_delta(
    key: &RevSecretKey,
    params: &AccParams,
    delta: &EpochDelta,
) -> Result<RevSecretKey> {
    if key.epoch != delta.epoch_from {
        return Err(Error::EpochMismatch {
            key: key.epoch,
            expected: delta.epoch_from,
        });
    }
    let witness = accumulator::update_witness_delta(params, &key.witness, delta)?;
    Ok(RevSecretKey {
        witness,
        epoch: delta.epoch_to,
        ..key.clone()
    })
}

/// Change record between two public-key snapshots.
pub fn delta_between(old: &RevMasterPublicKey, new: &RevMasterPublicKey) -> EpochDelta {
    EpochDelta {
        epoch_from: old.epoch,
        epoch_to: new.epoch,
        added: new.members.difference(&old.members).copied().collect(),
        removed: old.members.difference(&new.members).copied().collect(),
    }
}

fn encrypt_with_vector(
    mpk: &RevMasterPublicKey,
    am: &AccessMatrix,
    v: &[Scalar],
) -> Result<(TargetElement, RevCiphertext)> {
    if mpk.members.is_empty() {
        return Err(Error::EmptyAccumulator);
    }
    let s = v[0];
    let neg_s = -s;
    let mut c_k = Vec::with_capacity(am.row_count());
    for (k, row) in am.matrix.iter().enumerate() {
        let lambda_k: Scalar = row.iter().zip(v).map(|(m, y)| m * y).sum();
        let attr = &am.rho[k];
        let h_x = mpk
            .h
            .get(attr)
            .ok_or_else(|| Error::UnknownAttribute(attr.clone()))?;
        c_k.push(mpk.acc_a.pow(&lambda_k) * h_x.pow(&neg_s));
    }
    let ct = RevCiphertext {
        c_prime: mpk.g_b.pow(&s),
        c_k,
        c_dprime: mpk.acc.pow(&s),
        am: am.clone(),
        epoch: mpk.epoch,
    };
    Ok((mpk.blind.pow(&s), ct))
}

/// Encapsulates a fresh secret under the access matrix at the current epoch.
pub fn encrypt<R: RngCore + CryptoRng>(
    mpk: &RevMasterPublicKey,
    am: &AccessMatrix,
    rng: &mut R,
) -> Result<(TargetElement, RevCiphertext)> {
    let v: Vec<Scalar> = (0..am.width()).map(|_| random_scalar(rng)).collect();
    encrypt_with_vector(mpk, am, &v)
}

/// Deterministic encryption; the sharing vector is derived from the seed,
/// `s` first.
pub fn encrypt_seeded(
    mpk: &RevMasterPublicKey,
    am: &AccessMatrix,
    seed: &[u8],
) -> Result<(TargetElement, RevCiphertext)> {
    let v = derive_scalars(seed, am.width());
    encrypt_with_vector(mpk, am, &v)
}

/// Recovers the encapsulated secret.
///
/// Requires the key and ciphertext to be at the same epoch; callers holding
/// an older key must run [`update_key`] first. The result equals the
/// encryptor's secret exactly when the attributes satisfy the policy and the
/// key's index was a member at the ciphertext's epoch.
pub fn decrypt(key: &RevSecretKey, ct: &RevCiphertext) -> Result<TargetElement> {
    if key.epoch != ct.epoch {
        return Err(Error::EpochMismatch {
            key: key.epoch,
            expected: ct.epoch,
        });
    }
    let omega = reconstruction_coefficients(&ct.am, &key.attrs).ok_or(Error::NotSatisfied)?;
    let mut denominator = pair(&ct.c_prime, &key.witness.wit);
    for (k, w) in &omega {
        let k_x = key
            .k_x
            .get(&ct.am.rho[*k])
            .ok_or_else(|| Error::UnknownAttribute(ct.am.rho[*k].clone()))?;
        let row_factor = pair(&ct.c_k[*k], &key.l) * pair(&ct.c_prime, k_x);
        denominator = denominator * row_factor.pow(w);
    }
    Ok(pair(&ct.c_dprime, &key.k) / denominator)
}
