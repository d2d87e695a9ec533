//! Pairing-based accumulator with locally updatable membership witnesses.
//!
//! A single cipher-side element commits to the set `V` of active key indices:
//! `acc_V = prod_{j in V} g^(gamma^(n+1-j))`. Each member `i` holds a
//! key-side witness `wit_i = prod_{j in V, j != i} g^(gamma^(n+1+i-j))`,
//! maintainable from the published power sequence alone as `V` changes.
//! The sequence deliberately omits `g^(gamma^(n+1))`: that is exactly the
//! term a removed index would need to keep its witness current, which is what
//! makes revocation stick.
//!
//! The authority (holder of `gamma`) recomputes accumulator values directly
//! in the exponent; the power sequence it publishes is all clients ever need.

use std::collections::BTreeSet;

use ff::Field;

use crate::algebra::{CipherSideElement, KeySideElement, PairingContext, Scalar, SUITE_ID};
use crate::error::{Error, Result};

/// Hard cap on accumulator capacity; the published power sequence grows
/// linearly with it.
pub const MAX_CAPACITY: u32 = 1 << 16;

/// Public accumulator parameters: capacity and the key-side power sequence
/// `g^(gamma^j)` for `j in [1..2n] \ {n+1}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AccParams {
    capacity: u32,
    seq: Vec<KeySideElement>,
    pub suite: u8,
}

impl AccParams {
    pub fn capacity(&self) -> u32 {
        self.capacity
    }

    /// `g^(gamma^j)`. Panics if `j` is out of `[1..2n]` or equals `n+1`;
    /// every exponent a witness computation needs stays inside that range.
    pub fn power(&self, j: u32) -> KeySideElement {
        let n = self.capacity;
        assert!(
            j >= 1 && j <= 2 * n && j != n + 1,
            "power index {j} outside published sequence"
        );
        let idx = if j <= n { j - 1 } else { j - 2 };
        self.seq[idx as usize]
    }

    /// The raw sequence, ascending in `j`.
    pub fn sequence(&self) -> &[KeySideElement] {
        &self.seq
    }

    pub(crate) fn from_parts(capacity: u32, seq: Vec<KeySideElement>) -> Result<Self> {
        if capacity < 1 || seq.len() != (2 * capacity - 1) as usize {
            return Err(Error::MalformedEnvelope(format!(
                "power sequence of {} entries does not match capacity {capacity}",
                seq.len()
            )));
        }
        Ok(Self {
            capacity,
            seq,
            suite: SUITE_ID,
        })
    }
}

/// Authority-side accumulator state.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AccumulatorState {
    /// Active member indices (`V`).
    pub members: BTreeSet<u32>,
    /// Every index ever added (`U`); never shrinks.
    pub ever_added: BTreeSet<u32>,
    /// The accumulator value for `members`.
    pub acc: CipherSideElement,
    /// Bumps by one on every mutation.
    pub epoch: u64,
}

/// Membership witness for one index, stamped with the epoch of the member
/// set it was computed against.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Witness {
    pub index: u32,
    pub wit: KeySideElement,
    pub epoch: u64,
}

/// A single accumulator mutation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Change {
    Add(u32),
    Remove(u32),
}

/// What changed between two epochs; the record clients use to update
/// witnesses without talking to the authority.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EpochDelta {
    pub epoch_from: u64,
    pub epoch_to: u64,
    pub added: BTreeSet<u32>,
    pub removed: BTreeSet<u32>,
}

impl EpochDelta {
    pub fn apply_to_members(&self, members: &BTreeSet<u32>) -> BTreeSet<u32> {
        let mut out = members.clone();
        out.extend(self.added.iter().copied());
        for i in &self.removed {
            out.remove(i);
        }
        out
    }
}

fn gamma_power(gamma: &Scalar, k: u32) -> Scalar {
    gamma.pow_vartime([k as u64])
}

/// `sum_{j in members} gamma^(n+1-j)`: the accumulator exponent.
fn acc_exponent(capacity: u32, members: &BTreeSet<u32>, gamma: &Scalar) -> Scalar {
    members
        .iter()
        .map(|&j| gamma_power(gamma, capacity + 1 - j))
        .sum()
}

/// Recomputes the accumulator value for a member set (authority side).
pub fn accumulate(capacity: u32, members: &BTreeSet<u32>, gamma: &Scalar) -> CipherSideElement {
    PairingContext::cred1()
        .cipher_generator
        .pow(&acc_exponent(capacity, members, gamma))
}

/// Fresh empty accumulator plus the published power sequence for `gamma`.
pub fn init(capacity: u32, gamma: &Scalar) -> (AccParams, AccumulatorState) {
    assert!(
        (1..=MAX_CAPACITY).contains(&capacity),
        "accumulator capacity must be in [1, {MAX_CAPACITY}]"
    );
    let ctx = PairingContext::cred1();
    let mut seq = Vec::with_capacity(2 * capacity as usize - 1);
    let mut power = Scalar::ONE;
    for j in 1..=2 * capacity {
        power *= gamma;
        if j != capacity + 1 {
            seq.push(ctx.key_generator.pow(&power));
        }
    }
    let params = AccParams {
        capacity,
        seq,
        suite: SUITE_ID,
    };
    let state = AccumulatorState {
        members: BTreeSet::new(),
        ever_added: BTreeSet::new(),
        acc: CipherSideElement::identity(),
        epoch: 0,
    };
    (params, state)
}

/// Applies one mutation, returning the successor state (epoch + 1).
pub fn update(
    params: &AccParams,
    state: &AccumulatorState,
    change: Change,
    gamma: &Scalar,
) -> Result<AccumulatorState> {
    let mut members = state.members.clone();
    let mut ever_added = state.ever_added.clone();
    match change {
        Change::Add(i) => {
            if i < 1 || i > params.capacity() {
                return Err(Error::CapacityExceeded(params.capacity()));
            }
            if !members.insert(i) {
                return Err(Error::IndexInUse(i));
            }
            ever_added.insert(i);
        }
        Change::Remove(i) => {
            if !members.remove(&i) {
                return Err(Error::IndexNotPresent(i));
            }
        }
    }
    let acc = accumulate(params.capacity(), &members, gamma);
    Ok(AccumulatorState {
        members,
        ever_added,
        acc,
        epoch: state.epoch + 1,
    })
}

/// Builds the witness for `index` from scratch out of the power sequence.
pub fn compute_witness(
    params: &AccParams,
    members: &BTreeSet<u32>,
    index: u32,
    epoch: u64,
) -> Result<Witness> {
    if !members.contains(&index) {
        return Err(Error::NotMember(index));
    }
    let n = params.capacity();
    let mut wit = KeySideElement::identity();
    for &j in members {
        if j != index {
            wit = wit * params.power(n + 1 + index - j);
        }
    }
    Ok(Witness { index, wit, epoch })
}

/// Locally advances a witness from one member set to another.
///
/// Fails with [`Error::Revoked`] when the witness's own index has been
/// removed: the correction factor would need the unpublished `n+1` power.
pub fn update_witness(
    params: &AccParams,
    old: &Witness,
    old_members: &BTreeSet<u32>,
    new_members: &BTreeSet<u32>,
    new_epoch: u64,
) -> Result<Witness> {
    if !old_members.contains(&old.index) {
        return Err(Error::NotMember(old.index));
    }
    let added: BTreeSet<u32> = new_members.difference(old_members).copied().collect();
    let removed: BTreeSet<u32> = old_members.difference(new_members).copied().collect();
    apply_witness_delta(params, old, &added, &removed, new_epoch)
}

/// Delta form of [`update_witness`], driven by a distributed change record.
pub fn update_witness_delta(
    params: &AccParams,
    old: &Witness,
    delta: &EpochDelta,
) -> Result<Witness> {
    if old.epoch != delta.epoch_from {
        return Err(Error::DeltaEpochMismatch {
            witness: old.epoch,
            delta: delta.epoch_from,
        });
    }
    apply_witness_delta(params, old, &delta.added, &delta.removed, delta.epoch_to)
}

fn apply_witness_delta(
    params: &AccParams,
    old: &Witness,
    added: &BTreeSet<u32>,
    removed: &BTreeSet<u32>,
    new_epoch: u64,
) -> Result<Witness> {
    if removed.contains(&old.index) {
        return Err(Error::Revoked(old.index));
    }
    let n = params.capacity();
    let i = old.index;
    let mut wit = old.wit;
    for &j in added {
        if j != i {
            wit = wit * params.power(n + 1 + i - j);
        }
    }
    for &j in removed {
        wit = wit * params.power(n + 1 + i - j).invert();
    }
    Ok(Witness {
        index: i,
        wit,
        epoch: new_epoch,
    })
}

/// Authority-side membership check: does `w` prove `w.index` is in the
/// current member set?
///
/// Verifies `wit == g^(Q - gamma^(n+1))` for
/// `Q = sum_{j in V} gamma^(n+1+i-j)`, which holds exactly when the index is
/// a member and the witness is the genuine product. The `n+1` power occurs
/// only as a scalar here; the corresponding group element is never built.
pub fn verify_membership(
    params: &AccParams,
    state: &AccumulatorState,
    w: &Witness,
    gamma: &Scalar,
) -> bool {
    let n = params.capacity();
    if w.index < 1 || w.index > n {
        return false;
    }
    let q: Scalar = state
        .members
        .iter()
        .map(|&j| gamma_power(gamma, n + 1 + w.index - j))
        .sum();
    let expected = q - gamma_power(gamma, n + 1);
    w.wit == PairingContext::cred1().key_generator.pow(&expected)
}
