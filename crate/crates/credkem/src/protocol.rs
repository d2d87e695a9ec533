//! The resource-access protocol: prover and verifier state machines over the
//! anonymity transform, with a binary wire framing.
//!
//! One session is one strict message alternation:
//!
//! 1. prover  -> verifier: resource request carrying a fresh session nonce
//! 2. verifier -> prover : challenge bundle encapsulating a fresh token
//! 3. prover  -> verifier: response carrying the recovered token
//! 4. verifier -> prover : decision
//!
//! Tokens and nonces are single-session; replaying either across sessions
//! fails (the new session has a different token, and a replayed challenge
//! fails the prover's nonce check). Sessions are never resumed: a denied or
//! decided session stays closed, and a verifier that wants to retry opens a
//! new one. Timeouts are a transport concern and live with the caller.
//!
//! Wire framing: a 4-byte big-endian length over everything that follows,
//! one tag byte (1 = request, 2 = challenge, 3 = response, 4 = decision),
//! then each payload field in fixed order as a 4-byte big-endian length plus
//! raw bytes. Strings are UTF-8; bundles are keystore envelopes.

use std::io::{Read, Write};

use rand::{CryptoRng, RngCore};
use subtle::ConstantTimeEq;

use crate::cca::{self, ChallengeBundle, KemKeyRef, KemPublicRef, SessionNonce, Token};
use crate::error::{Error, Result};
use crate::keystore;
use crate::lsss::Policy;

/// Decision reason strings are fixed so that identical outcomes are
/// byte-identical on the wire, whatever transport produced them.
pub const REASON_GRANTED: &str = "granted";
pub const REASON_TOKEN_MISMATCH: &str = "token-mismatch";
pub const REASON_SESSION_CLOSED: &str = "session-closed";
pub const REASON_RESOURCE_MISMATCH: &str = "resource-mismatch";
pub const REASON_UNEXPECTED_MESSAGE: &str = "unexpected-message";

const TAG_REQUEST: u8 = 1;
const TAG_CHALLENGE: u8 = 2;
const TAG_RESPONSE: u8 = 3;
const TAG_DECISION: u8 = 4;

/// Upper bound on a frame; anything larger is treated as malformed rather
/// than allocated.
const MAX_FRAME: usize = 1 << 24;

/// The four protocol messages.
#[derive(Clone, Debug, PartialEq, Eq)]
#[allow(clippy::large_enum_variant)]
pub enum Message {
    ResourceRequest {
        resource_id: String,
        nonce: SessionNonce,
    },
    Challenge {
        bundle: ChallengeBundle,
    },
    Response {
        resource_id: String,
        token: Token,
    },
    Decision {
        granted: bool,
        reason: String,
    },
}

fn put_field(out: &mut Vec<u8>, bytes: &[u8]) {
    out.extend_from_slice(&(bytes.len() as u32).to_be_bytes());
    out.extend_from_slice(bytes);
}

/// Encodes a message as one complete frame.
pub fn encode_message(msg: &Message) -> Vec<u8> {
    let mut body = Vec::new();
    match msg {
        Message::ResourceRequest { resource_id, nonce } => {
            body.push(TAG_REQUEST);
            put_field(&mut body, resource_id.as_bytes());
            put_field(&mut body, &nonce.0);
        }
        Message::Challenge { bundle } => {
            body.push(TAG_CHALLENGE);
            put_field(&mut body, &keystore::encode(bundle));
        }
        Message::Response { resource_id, token } => {
            body.push(TAG_RESPONSE);
            put_field(&mut body, resource_id.as_bytes());
            put_field(&mut body, &token.0);
        }
        Message::Decision { granted, reason } => {
            body.push(TAG_DECISION);
            put_field(&mut body, &[u8::from(*granted)]);
            put_field(&mut body, reason.as_bytes());
        }
    }
    let mut frame = Vec::with_capacity(4 + body.len());
    frame.extend_from_slice(&(body.len() as u32).to_be_bytes());
    frame.extend_from_slice(&body);
    frame
}

struct FieldReader<'a> {
    data: &'a [u8],
    pos: usize,
}

impl<'a> FieldReader<'a> {
    fn field(&mut self) -> Result<&'a [u8]> {
        if self.data.len() - self.pos < 4 {
            return Err(Error::MalformedEnvelope("truncated frame field".into()));
        }
        let len =
            u32::from_be_bytes(self.data[self.pos..self.pos + 4].try_into().unwrap()) as usize;
        self.pos += 4;
        if self.data.len() - self.pos < len {
            return Err(Error::MalformedEnvelope(
                "frame field overruns frame".into(),
            ));
        }
        let out = &self.data[self.pos..self.pos + len];
        self.pos += len;
        Ok(out)
    }

    fn string(&mut self) -> Result<String> {
        String::from_utf8(self.field()?.to_vec())
            .map_err(|_| Error::MalformedEnvelope("invalid UTF-8 in frame".into()))
    }

    fn fixed<const N: usize>(&mut self) -> Result<[u8; N]> {
        self.field()?
            .try_into()
            .map_err(|_| Error::MalformedEnvelope("frame field has wrong length".into()))
    }

    fn finish(&self) -> Result<()> {
        if self.pos != self.data.len() {
            return Err(Error::MalformedEnvelope("trailing bytes in frame".into()));
        }
        Ok(())
    }
}

/// Decodes exactly one complete frame.
pub fn decode_message(frame: &[u8]) -> Result<Message> {
    if frame.len() < 5 {
        return Err(Error::MalformedEnvelope("frame too short".into()));
    }
    let len = u32::from_be_bytes(frame[..4].try_into().unwrap()) as usize;
    if len != frame.len() - 4 {
        return Err(Error::MalformedEnvelope("frame length mismatch".into()));
    }
    decode_body(&frame[4..])
}

fn decode_body(body: &[u8]) -> Result<Message> {
    let tag = body[0];
    let mut r = FieldReader {
        data: &body[1..],
        pos: 0,
    };
    let nonempty = |s: String| {
        if s.is_empty() {
            Err(Error::MalformedEnvelope("empty resource id".into()))
        } else {
            Ok(s)
        }
    };
    let msg = match tag {
        TAG_REQUEST => Message::ResourceRequest {
            resource_id: nonempty(r.string()?)?,
            nonce: SessionNonce(r.fixed()?),
        },
        TAG_CHALLENGE => Message::Challenge {
            bundle: keystore::decode(r.field()?)?,
        },
        TAG_RESPONSE => Message::Response {
            resource_id: nonempty(r.string()?)?,
            token: Token(r.fixed()?),
        },
        TAG_DECISION => {
            let flag: [u8; 1] = r.fixed()?;
            let granted = match flag[0] {
                0 => false,
                1 => true,
                _ => return Err(Error::MalformedEnvelope("granted flag out of range".into())),
            };
            Message::Decision {
                granted,
                reason: r.string()?,
            }
        }
        other => {
            return Err(Error::MalformedEnvelope(format!(
                "unknown message tag {other}"
            )))
        }
    };
    r.finish()?;
    Ok(msg)
}

/// Writes one framed message to a stream.
pub fn write_message<W: Write>(w: &mut W, msg: &Message) -> std::io::Result<()> {
    w.write_all(&encode_message(msg))?;
    w.flush()
}

/// Reads one framed message from a stream.
pub fn read_message<R: Read>(r: &mut R) -> Result<Message> {
    let mut len_bytes = [0u8; 4];
    r.read_exact(&mut len_bytes)?;
    let len = u32::from_be_bytes(len_bytes) as usize;
    if len == 0 || len > MAX_FRAME {
        return Err(Error::MalformedEnvelope(format!(
            "implausible frame length {len}"
        )));
    }
    let mut body = vec![0u8; len];
    r.read_exact(&mut body)?;
    decode_body(&body)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VerifierState {
    AwaitingRequest,
    Challenged,
    Closed,
}

/// Verifier-side session: remembers the expected token and grants at most
/// once.
#[derive(Clone, Debug)]
pub struct VerifierSession {
    pub resource_id: String,
    pub policy: Policy,
    expected: Option<Token>,
    pub state: VerifierState,
}

impl VerifierSession {
    /// Rebuilds a challenged session from persisted state (the file-based
    /// verifier flow stores only the expected token).
    pub fn resume(resource_id: &str, policy: Policy, expected: Token) -> Self {
        Self {
            resource_id: resource_id.to_owned(),
            policy,
            expected: Some(expected),
            state: VerifierState::Challenged,
        }
    }

    pub fn expected_token(&self) -> Option<&Token> {
        self.expected.as_ref()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProverState {
    Started,
    Responded,
    Closed,
}

/// Prover-side session: owns the session nonce.
#[derive(Clone, Debug)]
pub struct ProverSession {
    pub resource_id: String,
    pub nonce: SessionNonce,
    pub state: ProverState,
}

impl ProverSession {
    /// Deterministic variant of [`prover_start`] for reproducible
    /// transcripts; the caller supplies the session nonce.
    pub fn with_nonce(resource_id: &str, nonce: SessionNonce) -> (Self, Message) {
        let session = Self {
            resource_id: resource_id.to_owned(),
            nonce,
            state: ProverState::Started,
        };
        let request = Message::ResourceRequest {
            resource_id: resource_id.to_owned(),
            nonce,
        };
        (session, request)
    }
}

/// Step 1: the prover opens a session with a fresh nonce.
pub fn prover_start<R: RngCore + CryptoRng>(
    resource_id: &str,
    rng: &mut R,
) -> (ProverSession, Message) {
    ProverSession::with_nonce(resource_id, SessionNonce::random(rng))
}

/// Steps 2–3: the verifier draws a fresh token and answers a request with a
/// challenge bundle under the resource's policy.
pub fn verifier_on_request<R: RngCore + CryptoRng>(
    request: &Message,
    policy: &Policy,
    pk: KemPublicRef<'_>,
    rng: &mut R,
) -> Result<(VerifierSession, Message)> {
    let Message::ResourceRequest { resource_id, nonce } = request else {
        return Err(Error::UnexpectedMessage(
            "verifier expected a resource request",
        ));
    };
    let token = Token::random(rng);
    let bundle = cca::encrypt(pk, policy, nonce, &token)?;
    let session = VerifierSession {
        resource_id: resource_id.clone(),
        policy: policy.clone(),
        expected: Some(token),
        state: VerifierState::Challenged,
    };
    Ok((session, Message::Challenge { bundle }))
}

/// Steps 4–5: the prover opens the challenge and, if every check passes,
/// responds with the recovered token. Any rejection aborts the session
/// without sending anything.
pub fn prover_on_challenge(
    session: &mut ProverSession,
    challenge: &Message,
    key: KemKeyRef<'_>,
    pk: KemPublicRef<'_>,
) -> Result<Message> {
    if session.state != ProverState::Started {
        return Err(Error::UnexpectedMessage(
            "prover session is not awaiting a challenge",
        ));
    }
    let Message::Challenge { bundle } = challenge else {
        return Err(Error::UnexpectedMessage("prover expected a challenge"));
    };
    match cca::decrypt(key, bundle, &session.nonce, pk) {
        Ok(token) => {
            session.state = ProverState::Responded;
            Ok(Message::Response {
                resource_id: session.resource_id.clone(),
                token,
            })
        }
        Err(e) => {
            session.state = ProverState::Closed;
            Err(e)
        }
    }
}

/// The token comparison shared by every verifier frontend: constant-pattern
/// equality, fixed reason strings.
pub fn decide(expected: &Token, presented: &Token) -> Message {
    if bool::from(expected.0.ct_eq(&presented.0)) {
        Message::Decision {
            granted: true,
            reason: REASON_GRANTED.to_owned(),
        }
    } else {
        Message::Decision {
            granted: false,
            reason: REASON_TOKEN_MISMATCH.to_owned(),
        }
    }
}

/// Step 6: the verifier grants exactly when the response carries its token.
/// Denial is a value, not an error; the session closes either way.
pub fn verifier_on_response(session: &mut VerifierSession, response: &Message) -> Message {
    if session.state != VerifierState::Challenged {
        return Message::Decision {
            granted: false,
            reason: REASON_SESSION_CLOSED.to_owned(),
        };
    }
    session.state = VerifierState::Closed;
    let Message::Response { resource_id, token } = response else {
        return Message::Decision {
            granted: false,
            reason: REASON_UNEXPECTED_MESSAGE.to_owned(),
        };
    };
    if resource_id != &session.resource_id {
        return Message::Decision {
            granted: false,
            reason: REASON_RESOURCE_MISMATCH.to_owned(),
        };
    }
    let expected = session
        .expected
        .as_ref()
        .expect("challenged session has a token");
    decide(expected, token)
}
