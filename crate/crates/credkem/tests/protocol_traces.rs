//! Randomized protocol traces: happy paths, soundness, replay sweeps.

use std::collections::BTreeSet;

use credkem::cca::{KemKeyRef, KemPublicRef};
use credkem::error::Error;
use credkem::lsss::Policy;
use credkem::protocol::{self, Message};
use credkem::revocable::{self, RevMasterPublicKey, RevSecretKey};

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

fn random_policy(rng: &mut StdRng, pool: &[String], max_leaves: usize) -> Policy {
    let leaves = rng.gen_range(1..=max_leaves.min(pool.len()));
    let mut chosen: Vec<String> = pool.to_vec();
    for i in (1..chosen.len()).rev() {
        chosen.swap(i, rng.gen_range(0..=i));
    }
    chosen.truncate(leaves);
    build_tree(rng, &chosen)
}

fn build_tree(rng: &mut StdRng, leaves: &[String]) -> Policy {
    if leaves.len() == 1 {
        return Policy::Leaf(leaves[0].clone());
    }
    let split = rng.gen_range(1..leaves.len());
    let left = Box::new(build_tree(rng, &leaves[..split]));
    let right = Box::new(build_tree(rng, &leaves[split..]));
    if rng.gen() {
        Policy::And(left, right)
    } else {
        Policy::Or(left, right)
    }
}

fn satisfying_set(rng: &mut StdRng, p: &Policy) -> BTreeSet<String> {
    match p {
        Policy::Leaf(a) => [a.clone()].into(),
        Policy::And(l, r) => {
            let mut out = satisfying_set(rng, l);
            out.extend(satisfying_set(rng, r));
            out
        }
        Policy::Or(l, r) => {
            if rng.gen() {
                satisfying_set(rng, l)
            } else {
                satisfying_set(rng, r)
            }
        }
    }
}

fn falsifying_set(rng: &mut StdRng, p: &Policy) -> BTreeSet<String> {
    match p {
        Policy::Leaf(_) => BTreeSet::new(),
        Policy::Or(l, r) => {
            let mut out = falsifying_set(rng, l);
            out.extend(falsifying_set(rng, r));
            out
        }
        Policy::And(l, r) => {
            let (dead, live) = if rng.gen() { (l, r) } else { (r, l) };
            let mut out = falsifying_set(rng, dead);
            if rng.gen() {
                out.extend(satisfying_set(rng, live));
            }
            out
        }
    }
}

fn world(rng: &mut StdRng, policy: &Policy, satisfy: bool) -> (RevMasterPublicKey, RevSecretKey) {
    let pool: Vec<String> = policy.attributes();
    let (mpk, mut msk) = revocable::setup(&pool, 4, rng).unwrap();
    let attrs = if satisfy {
        satisfying_set(rng, policy)
    } else {
        falsifying_set(rng, policy)
    };
    let (key, mpk) = revocable::keygen(&mpk, &mut msk, &attrs, rng).unwrap();
    (mpk, key)
}

fn run_session(
    rng: &mut StdRng,
    mpk: &RevMasterPublicKey,
    policy: &Policy,
    key: &RevSecretKey,
) -> (Result<Message, Error>, Option<Message>) {
    let (mut prover, request) = protocol::prover_start("res", rng);
    let (mut verifier, challenge) =
        protocol::verifier_on_request(&request, policy, KemPublicRef::Revocable(mpk), rng).unwrap();
    match protocol::prover_on_challenge(
        &mut prover,
        &challenge,
        KemKeyRef::Revocable(key),
        KemPublicRef::Revocable(mpk),
    ) {
        Ok(resp) => {
            let decision = protocol::verifier_on_response(&mut verifier, &resp);
            (Ok(resp), Some(decision))
        }
        Err(e) => (Err(e), None),
    }
}

#[test]
fn fifty_random_happy_traces_end_granted() {
    let mut rng = StdRng::seed_from_u64(0x9a11);
    let pool: Vec<String> = (0..6).map(|i| format!("attr{i}")).collect();
    for trial in 0..50 {
        let policy = random_policy(&mut rng, &pool, 5);
        let (mpk, key) = world(&mut rng, &policy, true);
        let (resp, decision) = run_session(&mut rng, &mpk, &policy, &key);
        assert!(resp.is_ok(), "trial {trial} aborted");
        assert!(
            matches!(decision, Some(Message::Decision { granted: true, .. })),
            "trial {trial} denied"
        );
    }
}

#[test]
fn non_satisfying_keys_always_abort() {
    let mut rng = StdRng::seed_from_u64(0x50_1d);
    let pool: Vec<String> = (0..6).map(|i| format!("attr{i}")).collect();
    for trial in 0..50 {
        let policy = random_policy(&mut rng, &pool, 5);
        let (mpk, key) = world(&mut rng, &policy, false);
        let (resp, decision) = run_session(&mut rng, &mpk, &policy, &key);
        assert!(
            matches!(resp, Err(Error::NotSatisfied)),
            "trial {trial} responded"
        );
        assert!(decision.is_none());
    }
}

#[test]
fn replays_fail_across_sessions() {
    let mut rng = StdRng::seed_from_u64(0x4e91a);
    let pool: Vec<String> = (0..4).map(|i| format!("attr{i}")).collect();
    for _ in 0..10 {
        let policy = random_policy(&mut rng, &pool, 4);
        let (mpk, key) = world(&mut rng, &policy, true);

        // session A completes and its messages are captured
        let (mut prover_a, request_a) = protocol::prover_start("res", &mut rng);
        let (mut verifier_a, challenge_a) = protocol::verifier_on_request(
            &request_a,
            &policy,
            KemPublicRef::Revocable(&mpk),
            &mut rng,
        )
        .unwrap();
        let response_a = protocol::prover_on_challenge(
            &mut prover_a,
            &challenge_a,
            KemKeyRef::Revocable(&key),
            KemPublicRef::Revocable(&mpk),
        )
        .unwrap();
        assert!(matches!(
            protocol::verifier_on_response(&mut verifier_a, &response_a),
            Message::Decision { granted: true, .. }
        ));

        // the challenge replayed at a new prover session aborts on the nonce
        let (mut prover_b, _) = protocol::prover_start("res", &mut rng);
        assert!(matches!(
            protocol::prover_on_challenge(
                &mut prover_b,
                &challenge_a,
                KemKeyRef::Revocable(&key),
                KemPublicRef::Revocable(&mpk),
            ),
            Err(Error::NonceMismatch)
        ));

        // the response replayed at a new verifier session is denied
        let (_, request_c) = protocol::prover_start("res", &mut rng);
        let (mut verifier_c, _) = protocol::verifier_on_request(
            &request_c,
            &policy,
            KemPublicRef::Revocable(&mpk),
            &mut rng,
        )
        .unwrap();
        assert!(matches!(
            protocol::verifier_on_response(&mut verifier_c, &response_a),
            Message::Decision { granted: false, .. }
        ));
    }
}
