//! Revocable, anonymous credential verification.
//!
//! A resource owner (the verifier) challenges a credential holder (the
//! prover) to prove that their attributes satisfy a policy, without
//! learning anything else about them. Under the hood:
//!
//! * [`kem`]: a ciphertext-policy attribute KEM; the policy lives in the
//!   ciphertext, attributes live in the key.
//! * [`accumulator`]: a pairing-based accumulator whose membership
//!   witnesses holders update locally as keys come and go.
//! * [`revocable`]: the KEM with accumulator-bound keys; revocation makes
//!   every later ciphertext undecryptable for the revoked key.
//! * [`cca`]: the anonymity transform, deterministic encryption with a full
//!   re-encryption check on the prover side.
//! * [`protocol`]: the challenge-response state machines and wire framing.
//! * [`lsss`]: policy parsing and the linear secret-sharing compiler.
//! * [`keystore`]: canonical binary envelopes and file persistence.
//!
//! # Example
//!
//! ```
//! use std::collections::BTreeSet;
//! use credkem::{cca, lsss, protocol, revocable};
//! use credkem::cca::{KemKeyRef, KemPublicRef};
//!
//! let mut rng = rand::thread_rng();
//!
//! // Authority: three system attributes, room for four keys.
//! let universe: Vec<String> = ["role:doctor", "dept:er", "on-call"]
//!     .iter().map(|s| s.to_string()).collect();
//! let (mpk, mut msk) = revocable::setup(&universe, 4, &mut rng)?;
//!
//! // Issue a key for a doctor currently on call.
//! let attrs: BTreeSet<String> = ["role:doctor", "on-call"]
//!     .iter().map(|s| s.to_string()).collect();
//! let (key, mpk) = revocable::keygen(&mpk, &mut msk, &attrs, &mut rng)?;
//!
//! // One protocol session against a policy the key satisfies.
//! let policy = lsss::parse_policy("AND(role:doctor,on-call)")?;
//! let (mut prover, request) = protocol::prover_start("ward-3/chart", &mut rng);
//! let (mut verifier, challenge) =
//!     protocol::verifier_on_request(&request, &policy, KemPublicRef::Revocable(&mpk), &mut rng)?;
//! let response = protocol::prover_on_challenge(
//!     &mut prover, &challenge, KemKeyRef::Revocable(&key), KemPublicRef::Revocable(&mpk))?;
//! let decision = protocol::verifier_on_response(&mut verifier, &response);
//! assert!(matches!(decision, protocol::Message::Decision { granted: true, .. }));
//! # let _ = cca::NONCE_BYTES;
//! # Ok::<(), credkem::Error>(())
//! ```

pub mod accumulator;
pub mod algebra;
#[cfg(doctest)]
mod booktests;
pub mod cca;
pub mod error;
pub mod kem;
pub mod keystore;
pub mod lsss;
pub mod protocol;
pub mod revocable;

pub use error::{Error, Result};
