//! Canonical binary envelopes and file persistence for every artifact.
//!
//! One byte layout per artifact kind, no alternatives: equal artifacts
//! produce identical bytes on every platform. That is a correctness
//! requirement, not a convenience; the anonymity transform re-encrypts a
//! received bundle and compares raw bytes.
//!
//! Envelope: magic `CRD1`, suite id, artifact tag, 8-byte big-endian epoch
//! (zero where not applicable), payload. Fields inside payloads appear in
//! declaration order; variable-length fields carry a 4-byte big-endian
//! length; scalars are 32-byte big-endian; group elements use their
//! compressed encodings. Maps and sets are written in ascending key order
//! and readers reject anything else, so decoding is as canonical as
//! encoding.
//!
//! File layout: `mpk.<epoch>.crd` (history is append-only; snapshots are
//! never rewritten), `msk.crd`, `key.<index>.crd`,
//! `delta.<from>-<to>.crd`, `token.crd`.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};

use crate::accumulator::{AccParams, AccumulatorState, EpochDelta, Witness, MAX_CAPACITY};
use crate::algebra::{CipherSideElement, KeySideElement, Scalar, TargetElement, SUITE_ID};
use crate::cca::{AbkemCiphertext, ChallengeBundle, Token};
use crate::error::{Error, Result};
use crate::kem::{BaseCiphertext, BaseKey, BaseMpk, BaseMsk};
use crate::lsss::AccessMatrix;
use crate::revocable::{RevCiphertext, RevMasterPublicKey, RevMasterSecretKey, RevSecretKey};

const MAGIC: &[u8; 4] = b"CRD1";
const HIGHEST_TAG: u8 = 11;

/// An artifact kind with a fixed envelope tag and payload layout.
pub trait Persistable: Sized {
    const TAG: u8;
    /// Secrets get owner-only file permissions on store.
    const SECRET: bool = false;
    /// Epoch stamped into the envelope header; zero where not applicable.
    fn epoch_stamp(&self) -> u64 {
        0
    }
    fn write_payload(&self, w: &mut Writer);
    fn read_payload(r: &mut Reader<'_>, epoch: u64) -> Result<Self>;
}

/// Encodes an artifact into its canonical envelope.
pub fn encode<T: Persistable>(artifact: &T) -> Vec<u8> {
    let mut w = Writer::default();
    w.bytes(MAGIC);
    w.u8(SUITE_ID);
    w.u8(T::TAG);
    w.u64(artifact.epoch_stamp());
    artifact.write_payload(&mut w);
    w.buf
}

/// Decodes an envelope, checking magic, suite, tag and exact length.
pub fn decode<T: Persistable>(bytes: &[u8]) -> Result<T> {
    let mut r = Reader {
        data: bytes,
        pos: 0,
    };
    let magic = r.take(4)?;
    if magic != MAGIC {
        return Err(Error::MalformedEnvelope("bad magic".into()));
    }
    let suite = r.u8()?;
    if suite != SUITE_ID {
        return Err(Error::SuiteMismatch(suite));
    }
    let tag = r.u8()?;
    if tag == 0 || tag > HIGHEST_TAG {
        return Err(Error::UnknownTag(tag));
    }
    if tag != T::TAG {
        return Err(Error::MalformedEnvelope(format!(
            "expected artifact tag {}, found {tag}",
            T::TAG
        )));
    }
    let epoch = r.u64()?;
    let artifact = T::read_payload(&mut r, epoch)?;
    r.finish()?;
    Ok(artifact)
}

/// Writes an artifact to disk atomically (temp file, then rename).
pub fn store<T: Persistable>(path: &Path, artifact: &T) -> Result<()> {
    let bytes = encode(artifact);
    let tmp = path.with_extension("crd.tmp");
    fs::write(&tmp, &bytes)?;
    if T::SECRET {
        // Owner-only; failure to tighten permissions is non-fatal.
        #[cfg(unix)]
        {
            use std::os::unix::fs::PermissionsExt;
            let _ = fs::set_permissions(&tmp, fs::Permissions::from_mode(0o600));
        }
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

/// Reads an artifact back from disk.
pub fn load<T: Persistable>(path: &Path) -> Result<T> {
    decode(&fs::read(path)?)
}

pub fn mpk_path(dir: &Path, epoch: u64) -> PathBuf {
    dir.join(format!("mpk.{epoch}.crd"))
}

pub fn msk_path(dir: &Path) -> PathBuf {
    dir.join("msk.crd")
}

pub fn key_path(dir: &Path, index: u32) -> PathBuf {
    dir.join(format!("key.{index}.crd"))
}

pub fn delta_path(dir: &Path, from: u64, to: u64) -> PathBuf {
    dir.join(format!("delta.{from}-{to}.crd"))
}

pub fn token_path(dir: &Path) -> PathBuf {
    dir.join("token.crd")
}

/// Highest `mpk.<epoch>.crd` present in a state directory.
pub fn latest_mpk_epoch(dir: &Path) -> Result<Option<u64>> {
    let mut latest = None;
    for entry in fs::read_dir(dir)? {
        let name = entry?.file_name();
        let Some(name) = name.to_str() else { continue };
        if let Some(rest) = name
            .strip_prefix("mpk.")
            .and_then(|n| n.strip_suffix(".crd"))
        {
            if let Ok(epoch) = rest.parse::<u64>() {
                latest = Some(latest.map_or(epoch, |cur: u64| cur.max(epoch)));
            }
        }
    }
    Ok(latest)
}

/// Canonical byte writer.
#[derive(Default)]
pub struct Writer {
    buf: Vec<u8>,
}

impl Writer {
    fn u8(&mut self, v: u8) {
        self.buf.push(v);
    }

    fn u32(&mut self, v: u32) {
        self.buf.extend_from_slice(&v.to_be_bytes());
    }

    fn u64(&mut self, v: u64) {
        self.buf.extend_from_slice(&v.to_be_bytes());
    }

    fn bytes(&mut self, v: &[u8]) {
        self.buf.extend_from_slice(v);
    }

    fn var_bytes(&mut self, v: &[u8]) {
        self.u32(v.len() as u32);
        self.bytes(v);
    }

    fn string(&mut self, v: &str) {
        self.var_bytes(v.as_bytes());
    }

    fn scalar(&mut self, v: &Scalar) {
        self.bytes(&v.to_bytes_be());
    }

    fn cipher_elem(&mut self, v: &CipherSideElement) {
        self.bytes(&v.to_bytes());
    }

    fn key_elem(&mut self, v: &KeySideElement) {
        self.bytes(&v.to_bytes());
    }

    fn target_elem(&mut self, v: &TargetElement) {
        self.bytes(&v.to_bytes());
    }

    fn string_list(&mut self, v: &[String]) {
        self.u32(v.len() as u32);
        for s in v {
            self.string(s);
        }
    }

    fn index_set(&mut self, v: &BTreeSet<u32>) {
        self.u32(v.len() as u32);
        for i in v {
            self.u32(*i);
        }
    }

    fn cipher_map(&mut self, v: &BTreeMap<String, CipherSideElement>) {
        self.u32(v.len() as u32);
        for (k, e) in v {
            self.string(k);
            self.cipher_elem(e);
        }
    }

    fn key_map(&mut self, v: &BTreeMap<String, KeySideElement>) {
        self.u32(v.len() as u32);
        for (k, e) in v {
            self.string(k);
            self.key_elem(e);
        }
    }

    fn scalar_map(&mut self, v: &BTreeMap<String, Scalar>) {
        self.u32(v.len() as u32);
        for (k, s) in v {
            self.string(k);
            self.scalar(s);
        }
    }

    fn access_matrix(&mut self, am: &AccessMatrix) {
        self.u32(am.row_count() as u32);
        self.u32(am.width() as u32);
        for row in &am.matrix {
            for cell in row {
                self.scalar(cell);
            }
        }
        for attr in &am.rho {
            self.string(attr);
        }
    }

    fn cipher_list(&mut self, v: &[CipherSideElement]) {
        self.u32(v.len() as u32);
        for e in v {
            self.cipher_elem(e);
        }
    }
}

/// Strict byte reader; rejects overruns, disorder and leftovers.
pub struct Reader<'a> {
    data: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn malformed<T>(what: &str) -> Result<T> {
        Err(Error::MalformedEnvelope(what.into()))
    }

    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        if self.data.len() - self.pos < n {
            return Self::malformed("truncated input");
        }
        let out = &self.data[self.pos..self.pos + n];
        self.pos += n;
        Ok(out)
    }

    fn remaining(&self) -> usize {
        self.data.len() - self.pos
    }

    fn finish(&self) -> Result<()> {
        if self.remaining() != 0 {
            return Self::malformed("trailing bytes after payload");
        }
        Ok(())
    }

    fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_be_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_be_bytes(self.take(8)?.try_into().unwrap()))
    }

    /// Element count guard: every entry needs at least one byte.
    fn count(&mut self) -> Result<usize> {
        let n = self.u32()? as usize;
        if n > self.remaining() {
            return Self::malformed("count exceeds remaining input");
        }
        Ok(n)
    }

    fn var_bytes(&mut self) -> Result<&'a [u8]> {
        let len = self.u32()? as usize;
        self.take(len)
    }

    fn string(&mut self) -> Result<String> {
        match std::str::from_utf8(self.var_bytes()?) {
            Ok(s) => Ok(s.to_owned()),
            Err(_) => Self::malformed("invalid UTF-8 in string field"),
        }
    }

    fn scalar(&mut self) -> Result<Scalar> {
        let bytes: [u8; 32] = self.take(32)?.try_into().unwrap();
        Option::from(Scalar::from_bytes_be(&bytes))
            .ok_or_else(|| Error::MalformedEnvelope("scalar out of range".into()))
    }

    fn cipher_elem(&mut self) -> Result<CipherSideElement> {
        CipherSideElement::from_bytes(
            self.take(CipherSideElement::ENCODED_LEN)?
                .try_into()
                .unwrap(),
        )
    }

    fn key_elem(&mut self) -> Result<KeySideElement> {
        KeySideElement::from_bytes(self.take(KeySideElement::ENCODED_LEN)?.try_into().unwrap())
    }

    fn target_elem(&mut self) -> Result<TargetElement> {
        TargetElement::from_bytes(self.take(TargetElement::ENCODED_LEN)?.try_into().unwrap())
    }

    fn string_list(&mut self) -> Result<Vec<String>> {
        let n = self.count()?;
        (0..n).map(|_| self.string()).collect()
    }

    fn index_set(&mut self) -> Result<BTreeSet<u32>> {
        let n = self.count()?;
        let mut out = BTreeSet::new();
        let mut last = None;
        for _ in 0..n {
            let v = self.u32()?;
            if last.is_some_and(|prev| prev >= v) {
                return Self::malformed("index set not strictly ascending");
            }
            last = Some(v);
            out.insert(v);
        }
        Ok(out)
    }

    fn sorted_keys<T, F>(&mut self, mut read_value: F) -> Result<BTreeMap<String, T>>
    where
        F: FnMut(&mut Self) -> Result<T>,
    {
        let n = self.count()?;
        let mut out = BTreeMap::new();
        let mut last: Option<String> = None;
        for _ in 0..n {
            let key = self.string()?;
            if last.as_ref().is_some_and(|prev| prev >= &key) {
                return Self::malformed("map keys not strictly ascending");
            }
            let value = read_value(self)?;
            last = Some(key.clone());
            out.insert(key, value);
        }
        Ok(out)
    }

    fn access_matrix(&mut self) -> Result<AccessMatrix> {
        let rows = self.count()?;
        let cols = self.u32()? as usize;
        if rows == 0 || cols == 0 {
            return Self::malformed("empty access matrix");
        }
        let mut matrix = Vec::with_capacity(rows);
        for _ in 0..rows {
            matrix.push(
                (0..cols)
                    .map(|_| self.scalar())
                    .collect::<Result<Vec<_>>>()?,
            );
        }
        let mut rho = Vec::with_capacity(rows);
        for _ in 0..rows {
            rho.push(self.string()?);
        }
        Ok(AccessMatrix { matrix, rho })
    }

    fn cipher_list(&mut self) -> Result<Vec<CipherSideElement>> {
        let n = self.count()?;
        (0..n).map(|_| self.cipher_elem()).collect()
    }
}

impl Persistable for BaseMpk {
    const TAG: u8 = 1;

    fn write_payload(&self, w: &mut Writer) {
        w.cipher_elem(&self.g);
        w.cipher_elem(&self.g_a);
        w.cipher_map(&self.h);
        w.target_elem(&self.e_gg_alpha);
        w.string_list(&self.universe);
    }

    fn read_payload(r: &mut Reader<'_>, _epoch: u64) -> Result<Self> {
        let g = r.cipher_elem()?;
        let g_a = r.cipher_elem()?;
        let h = r.sorted_keys(Reader::cipher_elem)?;
        let e_gg_alpha = r.target_elem()?;
        let universe = r.string_list()?;
        check_attribute_bases(&h, &universe)?;
        Ok(Self { g, g_a, h, e_gg_alpha, universe, suite: SUITE_ID })
    }
}

/// One published base per universe attribute, no extras.
fn check_attribute_bases(
    h: &BTreeMap<String, CipherSideElement>,
    universe: &[String],
) -> Result<()> {
    if h.len() != universe.len() || !universe.iter().all(|a| h.contains_key(a)) {
        return Reader::malformed("attribute bases do not match the universe");
    }
    Ok(())
}

impl Persistable for BaseMsk {
    const TAG: u8 = 2;
    const SECRET: bool = true;

    fn write_payload(&self, w: &mut Writer) {
        w.scalar(&self.alpha);
        w.scalar(&self.a);
        w.scalar_map(&self.z);
    }

    fn read_payload(r: &mut Reader<'_>, _epoch: u64) -> Result<Self> {
        Ok(Self {
            alpha: r.scalar()?,
            a: r.scalar()?,
            z: r.sorted_keys(Reader::scalar)?,
        })
    }
}

impl Persistable for BaseKey {
    const TAG: u8 = 3;
    const SECRET: bool = true;

    fn write_payload(&self, w: &mut Writer) {
        w.key_elem(&self.k);
        w.key_elem(&self.l);
        w.key_map(&self.k_x);
        w.string_list(&self.attrs.iter().cloned().collect::<Vec<_>>());
    }

    fn read_payload(r: &mut Reader<'_>, _epoch: u64) -> Result<Self> {
        let k = r.key_elem()?;
        let l = r.key_elem()?;
        let k_x = r.sorted_keys(Reader::key_elem)?;
        let attrs: BTreeSet<String> = r.string_list()?.into_iter().collect();
        if k_x.len() != attrs.len() || !attrs.iter().all(|a| k_x.contains_key(a)) {
            return Reader::malformed("key components do not match the attribute set");
        }
        Ok(Self { k, l, k_x, attrs })
    }
}

impl Persistable for BaseCiphertext {
    const TAG: u8 = 4;

    fn write_payload(&self, w: &mut Writer) {
        w.cipher_elem(&self.c_prime);
        w.cipher_list(&self.c_k);
        w.access_matrix(&self.am);
    }

    fn read_payload(r: &mut Reader<'_>, _epoch: u64) -> Result<Self> {
        let c_prime = r.cipher_elem()?;
        let c_k = r.cipher_list()?;
        let am = r.access_matrix()?;
        if c_k.len() != am.row_count() {
            return Reader::malformed("row components do not match matrix rows");
        }
        Ok(Self { c_prime, c_k, am })
    }
}

impl Persistable for RevMasterPublicKey {
    const TAG: u8 = 5;

    fn epoch_stamp(&self) -> u64 {
        self.epoch
    }

    fn write_payload(&self, w: &mut Writer) {
        w.cipher_elem(&self.g);
        w.cipher_elem(&self.g_b);
        w.cipher_map(&self.h);
        w.cipher_elem(&self.acc);
        w.cipher_elem(&self.acc_a);
        w.target_elem(&self.blind);
        w.u32(self.params.capacity());
        for e in self.params.sequence() {
            w.key_elem(e);
        }
        w.index_set(&self.members);
        w.string_list(&self.universe);
    }

    fn read_payload(r: &mut Reader<'_>, epoch: u64) -> Result<Self> {
        let g = r.cipher_elem()?;
        let g_b = r.cipher_elem()?;
        let h = r.sorted_keys(Reader::cipher_elem)?;
        let acc = r.cipher_elem()?;
        let acc_a = r.cipher_elem()?;
        let blind = r.target_elem()?;
        let capacity = r.u32()?;
        if capacity == 0 || capacity > MAX_CAPACITY {
            return Reader::malformed("implausible accumulator capacity");
        }
        let seq = (0..2 * capacity - 1)
            .map(|_| r.key_elem())
            .collect::<Result<Vec<_>>>()?;
        let params = AccParams::from_parts(capacity, seq)?;
        let members = r.index_set()?;
        if members.last().is_some_and(|&top| top > capacity) {
            return Reader::malformed("member index beyond accumulator capacity");
        }
        let universe = r.string_list()?;
        check_attribute_bases(&h, &universe)?;
        Ok(Self { g, g_b, h, acc, acc_a, blind, params, members, epoch, universe, suite: SUITE_ID })
    }
}

impl Persistable for RevMasterSecretKey {
    const TAG: u8 = 6;
    const SECRET: bool = true;

    fn epoch_stamp(&self) -> u64 {
        self.state.epoch
    }

    fn write_payload(&self, w: &mut Writer) {
        w.scalar(&self.alpha);
        w.scalar(&self.a);
        w.scalar(&self.b);
        w.scalar(&self.gamma);
        w.scalar_map(&self.z);
        w.u32(self.next_index);
        w.index_set(&self.state.members);
        w.index_set(&self.state.ever_added);
        w.cipher_elem(&self.state.acc);
    }

    fn read_payload(r: &mut Reader<'_>, epoch: u64) -> Result<Self> {
        let alpha = r.scalar()?;
        let a = r.scalar()?;
        let b = r.scalar()?;
        let gamma = r.scalar()?;
        let z = r.sorted_keys(Reader::scalar)?;
        let next_index = r.u32()?;
        let members = r.index_set()?;
        let ever_added = r.index_set()?;
        if !members.is_subset(&ever_added) {
            return Reader::malformed("active members not contained in ever-added set");
        }
        let state = AccumulatorState {
            members,
            ever_added,
            acc: r.cipher_elem()?,
            epoch,
        };
        Ok(Self { alpha, a, b, gamma, z, next_index, state })
    }
}

impl Persistable for RevSecretKey {
    const TAG: u8 = 7;
    const SECRET: bool = true;

    fn epoch_stamp(&self) -> u64 {
        self.epoch
    }

    fn write_payload(&self, w: &mut Writer) {
        w.u32(self.index);
        w.key_elem(&self.k);
        w.key_elem(&self.l);
        w.key_map(&self.k_x);
        w.key_elem(&self.witness.wit);
        w.string_list(&self.attrs.iter().cloned().collect::<Vec<_>>());
    }

    fn read_payload(r: &mut Reader<'_>, epoch: u64) -> Result<Self> {
        let index = r.u32()?;
        let k = r.key_elem()?;
        let l = r.key_elem()?;
        let k_x = r.sorted_keys(Reader::key_elem)?;
        let witness = Witness {
            index,
            wit: r.key_elem()?,
            epoch,
        };
        let attrs: BTreeSet<String> = r.string_list()?.into_iter().collect();
        if k_x.len() != attrs.len() || !attrs.iter().all(|a| k_x.contains_key(a)) {
            return Reader::malformed("key components do not match the attribute set");
        }
        Ok(Self { index, k, l, k_x, witness, attrs, epoch })
    }
}

impl Persistable for RevCiphertext {
    const TAG: u8 = 8;

    fn epoch_stamp(&self) -> u64 {
        self.epoch
    }

    fn write_payload(&self, w: &mut Writer) {
        w.cipher_elem(&self.c_prime);
        w.cipher_list(&self.c_k);
        w.cipher_elem(&self.c_dprime);
        w.access_matrix(&self.am);
    }

    fn read_payload(r: &mut Reader<'_>, epoch: u64) -> Result<Self> {
        let c_prime = r.cipher_elem()?;
        let c_k = r.cipher_list()?;
        let c_dprime = r.cipher_elem()?;
        let am = r.access_matrix()?;
        if c_k.len() != am.row_count() {
            return Reader::malformed("row components do not match matrix rows");
        }
        Ok(Self {
            c_prime,
            c_k,
            c_dprime,
            am,
            epoch,
        })
    }
}

impl Persistable for ChallengeBundle {
    const TAG: u8 = 9;

    fn epoch_stamp(&self) -> u64 {
        self.epoch
    }

    fn write_payload(&self, w: &mut Writer) {
        match &self.abkem {
            AbkemCiphertext::Base(ct) => {
                w.u8(1);
                ct.write_payload(w);
            }
            AbkemCiphertext::Revocable(ct) => {
                w.u8(2);
                ct.write_payload(w);
            }
        }
        w.bytes(&self.c);
        w.var_bytes(&self.policy_bytes);
    }

    fn read_payload(r: &mut Reader<'_>, epoch: u64) -> Result<Self> {
        let abkem = match r.u8()? {
            1 => AbkemCiphertext::Base(BaseCiphertext::read_payload(r, epoch)?),
            2 => AbkemCiphertext::Revocable(RevCiphertext::read_payload(r, epoch)?),
            other => return Reader::malformed(&format!("unknown bundle mode {other}")),
        };
        let c: [u8; 64] = r.take(64)?.try_into().unwrap();
        let policy_bytes = r.var_bytes()?.to_vec();
        // the policy bytes must compile to the very matrix the ciphertext uses
        let text = std::str::from_utf8(&policy_bytes)
            .map_err(|_| Error::MalformedEnvelope("policy bytes are not UTF-8".into()))?;
        let compiled = crate::lsss::parse_policy(text)
            .and_then(|p| crate::lsss::compile(&p))
            .map_err(|e| {
                Error::MalformedEnvelope(format!("bundle policy does not compile: {e}"))
            })?;
        let am = match &abkem {
            AbkemCiphertext::Base(ct) => &ct.am,
            AbkemCiphertext::Revocable(ct) => &ct.am,
        };
        if &compiled != am {
            return Reader::malformed("bundle policy does not match the ciphertext matrix");
        }
        Ok(Self {
            abkem,
            c,
            policy_bytes,
            epoch,
            suite: SUITE_ID,
        })
    }
}

impl Persistable for EpochDelta {
    const TAG: u8 = 10;

    fn epoch_stamp(&self) -> u64 {
        self.epoch_to
    }

    fn write_payload(&self, w: &mut Writer) {
        w.u64(self.epoch_from);
        w.index_set(&self.added);
        w.index_set(&self.removed);
    }

    fn read_payload(r: &mut Reader<'_>, epoch: u64) -> Result<Self> {
        Ok(Self {
            epoch_from: r.u64()?,
            epoch_to: epoch,
            added: r.index_set()?,
            removed: r.index_set()?,
        })
    }
}

impl Persistable for Token {
    const TAG: u8 = 11;
    const SECRET: bool = true;

    fn write_payload(&self, w: &mut Writer) {
        w.bytes(&self.0);
    }

    fn read_payload(r: &mut Reader<'_>, _epoch: u64) -> Result<Self> {
        Ok(Self(r.take(32)?.try_into().unwrap()))
    }
}
