//! Command-line frontend: authority, prover and verifier roles over a state
//! directory, plus a TCP demo running the framed protocol end to end.
//!
//! Artifacts live in keystore envelopes; stdout carries only machine-usable
//! data (token hex), human summaries go to stderr. Exit codes: 0 success,
//! 1 crypto or protocol denial (and other runtime failures), 2 usage errors.

use std::collections::BTreeSet;
use std::fmt;
use std::io::Write as _;
use std::net::{TcpListener, TcpStream};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Duration;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};

use credkem::accumulator::EpochDelta;
use credkem::cca::{self, KemKeyRef, KemPublicRef, SessionNonce, Token};
use credkem::keystore::{self, delta_path, key_path, mpk_path, msk_path, token_path};
use credkem::lsss::{self, Policy};
use credkem::protocol::{self, Message, ProverSession};
use credkem::revocable::{self, RevMasterPublicKey, RevMasterSecretKey, RevSecretKey};

/// Session inactivity budget for the TCP demo.
const SESSION_TIMEOUT: Duration = Duration::from_secs(60);

#[derive(Parser)]
#[command(
    name = "credkem",
    version,
    about = "Revocable anonymous credential verification"
)]
struct Cli {
    /// Directory holding mpk epochs, msk, deltas and the session token.
    #[arg(short, long, global = true, default_value = "state")]
    state_dir: PathBuf,

    #[command(subcommand)]
    role: Role,
}

#[derive(Subcommand)]
enum Role {
    /// Key authority: system setup, issuance, revocation.
    #[command(subcommand)]
    Authority(AuthorityCmd),
    /// Credential holder: witness updates and challenge responses.
    #[command(subcommand)]
    Prover(ProverCmd),
    /// Resource owner: challenges and token checks.
    #[command(subcommand)]
    Verifier(VerifierCmd),
    /// Loopback/TCP demo of the full protocol.
    #[command(subcommand)]
    Demo(DemoCmd),
}

#[derive(Subcommand)]
enum AuthorityCmd {
    /// Create a fresh system: master keys and the epoch-0 public snapshot.
    Setup {
        /// Comma-separated attribute universe.
        #[arg(long, value_delimiter = ',')]
        universe: Vec<String>,
        /// Maximum number of keys ever issued.
        #[arg(long)]
        capacity: u32,
    },
    /// Issue a key for a comma-separated attribute set.
    Keygen {
        #[arg(long, value_delimiter = ',')]
        attrs: Vec<String>,
        /// Where to write the key envelope (default: key.<index>.crd in the state dir).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Revoke an issued key by accumulator index.
    Revoke {
        #[arg(long)]
        index: u32,
    },
}

#[derive(Subcommand)]
enum ProverCmd {
    /// Bring a key's witness up to the latest published epoch.
    Update {
        #[arg(long)]
        key: PathBuf,
    },
    /// Answer a challenge bundle; prints the recovered token as hex.
    Respond {
        #[arg(long)]
        key: PathBuf,
        #[arg(long)]
        bundle: PathBuf,
        /// The session nonce this prover sent, hex (32 bytes).
        #[arg(long)]
        rc: String,
    },
}

#[derive(Subcommand)]
enum VerifierCmd {
    /// Build a challenge bundle for a policy and remember the secret token.
    Challenge {
        /// Policy text, e.g. "AND(a,OR(b,c))".
        #[arg(long)]
        policy: String,
        /// Prover-chosen session nonce, hex (32 bytes). Random if omitted.
        #[arg(long)]
        rc: Option<String>,
        /// Inject the secret token, hex (32 bytes); for reproducible
        /// transcripts. Random if omitted.
        #[arg(long)]
        kc: Option<String>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Compare a presented token against the stored one.
    Check {
        /// Presented token, hex (32 bytes).
        #[arg(long)]
        token: String,
        /// Optionally write the framed decision message here.
        #[arg(long)]
        decision_out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum DemoCmd {
    /// Serve the verifier side of the protocol over TCP.
    Serve {
        #[arg(long)]
        listen: String,
        #[arg(long)]
        policy: String,
    },
    /// Run the prover side against a serving verifier.
    Request {
        #[arg(long)]
        connect: String,
        #[arg(long)]
        key: PathBuf,
        #[arg(long)]
        resource: String,
        /// Session nonce, hex (32 bytes). Random if omitted.
        #[arg(long)]
        rc: Option<String>,
        /// Optionally write the framed decision message here.
        #[arg(long)]
        decision_out: Option<PathBuf>,
    },
}

/// Argument-shaped failures exit with code 2 instead of 1.
#[derive(Debug)]
struct UsageError(String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl std::error::Error for UsageError {}

fn hex32(what: &str, s: &str) -> Result<[u8; 32]> {
    let bytes = hex::decode(s).map_err(|_| UsageError(format!("{what} is not valid hex")))?;
    bytes
        .try_into()
        .map_err(|_| UsageError(format!("{what} must be exactly 32 bytes of hex")).into())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(err) => {
            eprintln!("error: {err:#}");
            if err.downcast_ref::<UsageError>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}

fn dispatch(cli: Cli) -> Result<bool> {
    let dir = cli.state_dir.as_path();
    match cli.role {
        Role::Authority(cmd) => authority(dir, cmd).map(|()| true),
        Role::Prover(cmd) => prover(dir, cmd).map(|()| true),
        Role::Verifier(cmd) => verifier(dir, cmd),
        Role::Demo(cmd) => demo(dir, cmd),
    }
}

fn load_latest_mpk(dir: &Path) -> Result<RevMasterPublicKey> {
    let epoch = keystore::latest_mpk_epoch(dir)
        .with_context(|| format!("cannot read state directory {}", dir.display()))?
        .context("no public key snapshot found; run `authority setup` first")?;
    keystore::load(&mpk_path(dir, epoch)).context("loading latest public key snapshot")
}

/// Publishes a new epoch: mpk snapshot, delta record, updated msk.
fn publish_epoch(
    dir: &Path,
    old_mpk: &RevMasterPublicKey,
    new_mpk: &RevMasterPublicKey,
    msk: &RevMasterSecretKey,
) -> Result<()> {
    let delta = revocable::delta_between(old_mpk, new_mpk);
    keystore::store(&mpk_path(dir, new_mpk.epoch), new_mpk)?;
    keystore::store(&delta_path(dir, delta.epoch_from, delta.epoch_to), &delta)?;
    keystore::store(&msk_path(dir), msk)?;
    Ok(())
}

fn authority(dir: &Path, cmd: AuthorityCmd) -> Result<()> {
    match cmd {
        AuthorityCmd::Setup { universe, capacity } => {
            if universe.is_empty() {
                bail!(UsageError(
                    "--universe must name at least one attribute".into()
                ));
            }
            if !(1..=credkem::accumulator::MAX_CAPACITY).contains(&capacity) {
                bail!(UsageError(format!(
                    "--capacity must be between 1 and {}",
                    credkem::accumulator::MAX_CAPACITY
                )));
            }
            std::fs::create_dir_all(dir)?;
            let mut rng = rand::thread_rng();
            let (mpk, msk) = revocable::setup(&universe, capacity, &mut rng)?;
            keystore::store(&mpk_path(dir, 0), &mpk)?;
            keystore::store(&msk_path(dir), &msk)?;
            eprintln!(
                "setup: universe of {} attributes, capacity {capacity}, epoch 0 published",
                universe.len()
            );
            Ok(())
        }
        AuthorityCmd::Keygen { attrs, out } => {
            let mut msk: RevMasterSecretKey = keystore::load(&msk_path(dir))?;
            let mpk = load_latest_mpk(dir)?;
            let attrs: BTreeSet<String> = attrs.into_iter().filter(|a| !a.is_empty()).collect();
            let mut rng = rand::thread_rng();
            let (key, new_mpk) = revocable::keygen(&mpk, &mut msk, &attrs, &mut rng)?;
            publish_epoch(dir, &mpk, &new_mpk, &msk)?;
            let out = out.unwrap_or_else(|| key_path(dir, key.index));
            keystore::store(&out, &key)?;
            eprintln!(
                "issued key index {} (attrs: {:?}) at epoch {}; wrote {}",
                key.index,
                key.attrs,
                key.epoch,
                out.display()
            );
            Ok(())
        }
        AuthorityCmd::Revoke { index } => {
            let mut msk: RevMasterSecretKey = keystore::load(&msk_path(dir))?;
            let mpk = load_latest_mpk(dir)?;
            let new_mpk = revocable::remove_key(&mpk, &mut msk, index)?;
            publish_epoch(dir, &mpk, &new_mpk, &msk)?;
            eprintln!("revoked index {index}; epoch {} published", new_mpk.epoch);
            Ok(())
        }
    }
}

/// Walks the delta chain to bring a key to `target` epoch.
fn advance_key(
    dir: &Path,
    mut key: RevSecretKey,
    mpk: &RevMasterPublicKey,
    target: u64,
) -> Result<RevSecretKey> {
    if key.epoch > target {
        bail!(
            "key is at epoch {} but the challenge was built at epoch {target}; \
             old ciphertexts need the matching key snapshot",
            key.epoch
        );
    }
    while key.epoch < target {
        let from = key.epoch;
        let delta: EpochDelta = keystore::load(&delta_path(dir, from, from + 1))
            .with_context(|| format!("missing delta record {from} -> {}", from + 1))?;
        key = revocable::update_key_with_delta(&key, &mpk.params, &delta)?;
    }
    Ok(key)
}

fn prover(dir: &Path, cmd: ProverCmd) -> Result<()> {
    match cmd {
        ProverCmd::Update { key } => {
            let stored: RevSecretKey = keystore::load(&key)?;
            let mpk = load_latest_mpk(dir)?;
            let from = stored.epoch;
            let updated = advance_key(dir, stored, &mpk, mpk.epoch)?;
            keystore::store(&key, &updated)?;
            eprintln!(
                "key index {} updated: epoch {from} -> {}",
                updated.index, updated.epoch
            );
            Ok(())
        }
        ProverCmd::Respond { key, bundle, rc } => {
            let nonce = SessionNonce(hex32("--rc", &rc)?);
            let stored: RevSecretKey = keystore::load(&key)?;
            let bundle: cca::ChallengeBundle = keystore::load(&bundle)?;
            let mpk: RevMasterPublicKey = keystore::load(&mpk_path(dir, bundle.epoch))
                .with_context(|| format!("no public key snapshot for epoch {}", bundle.epoch))?;
            let current = advance_key(dir, stored, &mpk, bundle.epoch)?;
            let token = cca::decrypt(
                KemKeyRef::Revocable(&current),
                &bundle,
                &nonce,
                KemPublicRef::Revocable(&mpk),
            )?;
            println!("{}", hex::encode(token.0));
            eprintln!("challenge solved with key index {}", current.index);
            Ok(())
        }
    }
}

fn verifier(dir: &Path, cmd: VerifierCmd) -> Result<bool> {
    match cmd {
        VerifierCmd::Challenge {
            policy,
            rc,
            kc,
            out,
        } => {
            let policy = parse_policy_arg(&policy)?;
            let mpk = load_latest_mpk(dir)?;
            let mut rng = rand::thread_rng();
            let nonce = match rc {
                Some(s) => SessionNonce(hex32("--rc", &s)?),
                None => SessionNonce::random(&mut rng),
            };
            let token = match kc {
                Some(s) => Token(hex32("--kc", &s)?),
                None => Token::random(&mut rng),
            };
            let bundle = cca::encrypt(KemPublicRef::Revocable(&mpk), &policy, &nonce, &token)?;
            keystore::store(&out, &bundle)?;
            keystore::store(&token_path(dir), &token)?;
            eprintln!(
                "challenge for rc {} at epoch {}; bundle -> {}",
                hex::encode(nonce.0),
                bundle.epoch,
                out.display()
            );
            Ok(true)
        }
        VerifierCmd::Check {
            token,
            decision_out,
        } => {
            let presented = Token(hex32("--token", &token)?);
            let expected: Token = keystore::load(&token_path(dir))
                .context("no stored token; run `verifier challenge` first")?;
            let decision = protocol::decide(&expected, &presented);
            let Message::Decision {
                granted,
                ref reason,
            } = decision
            else {
                unreachable!()
            };
            if let Some(path) = decision_out {
                std::fs::write(&path, protocol::encode_message(&decision))?;
            }
            eprintln!("decision: {reason}");
            Ok(granted)
        }
    }
}

fn parse_policy_arg(text: &str) -> Result<Policy> {
    lsss::parse_policy(text).map_err(|e| UsageError(format!("invalid --policy: {e}")).into())
}

fn demo(dir: &Path, cmd: DemoCmd) -> Result<bool> {
    match cmd {
        DemoCmd::Serve { listen, policy } => {
            let policy = parse_policy_arg(&policy)?;
            let mpk = Arc::new(load_latest_mpk(dir)?);
            let policy = Arc::new(policy);
            let listener =
                TcpListener::bind(&listen).with_context(|| format!("cannot listen on {listen}"))?;
            eprintln!("serving on {listen} (epoch {})", mpk.epoch);
            for stream in listener.incoming() {
                let stream = match stream {
                    Ok(s) => s,
                    Err(e) => {
                        eprintln!("accept failed: {e}");
                        continue;
                    }
                };
                let mpk = Arc::clone(&mpk);
                let policy = Arc::clone(&policy);
                std::thread::spawn(move || {
                    if let Err(e) = serve_session(stream, &policy, &mpk) {
                        eprintln!("session ended: {e:#}");
                    }
                });
            }
            Ok(true)
        }
        DemoCmd::Request {
            connect,
            key,
            resource,
            rc,
            decision_out,
        } => {
            let stored: RevSecretKey = keystore::load(&key)?;
            let mut rng = rand::thread_rng();
            let nonce = match rc {
                Some(s) => SessionNonce(hex32("--rc", &s)?),
                None => SessionNonce::random(&mut rng),
            };
            let stream = TcpStream::connect(&connect)
                .with_context(|| format!("cannot connect to {connect}"))?;
            let granted = request_session(
                dir,
                stream,
                &resource,
                nonce,
                stored,
                decision_out.as_deref(),
            )?;
            Ok(granted)
        }
    }
}

/// One verifier session over an accepted connection.
fn serve_session(mut stream: TcpStream, policy: &Policy, mpk: &RevMasterPublicKey) -> Result<()> {
    stream.set_read_timeout(Some(SESSION_TIMEOUT))?;
    stream.set_write_timeout(Some(SESSION_TIMEOUT))?;
    let request = protocol::read_message(&mut stream)?;
    let mut rng = rand::thread_rng();
    let (mut session, challenge) =
        protocol::verifier_on_request(&request, policy, KemPublicRef::Revocable(mpk), &mut rng)?;
    protocol::write_message(&mut stream, &challenge)?;
    let response = protocol::read_message(&mut stream)?;
    let decision = protocol::verifier_on_response(&mut session, &response);
    protocol::write_message(&mut stream, &decision)?;
    if let Message::Decision { granted, reason } = &decision {
        eprintln!(
            "session for {:?}: granted={granted} ({reason})",
            session.resource_id
        );
    }
    Ok(())
}

/// One prover session over a connected stream.
fn request_session(
    dir: &Path,
    mut stream: TcpStream,
    resource: &str,
    nonce: SessionNonce,
    key: RevSecretKey,
    decision_out: Option<&Path>,
) -> Result<bool> {
    stream.set_read_timeout(Some(SESSION_TIMEOUT))?;
    stream.set_write_timeout(Some(SESSION_TIMEOUT))?;
    let (mut session, request) = ProverSession::with_nonce(resource, nonce);
    protocol::write_message(&mut stream, &request)?;
    let challenge = protocol::read_message(&mut stream)?;
    let Message::Challenge { ref bundle } = challenge else {
        bail!("verifier sent something other than a challenge");
    };
    let mpk: RevMasterPublicKey = keystore::load(&mpk_path(dir, bundle.epoch))
        .with_context(|| format!("no public key snapshot for epoch {}", bundle.epoch))?;
    let key = advance_key(dir, key, &mpk, bundle.epoch)?;
    let response = protocol::prover_on_challenge(
        &mut session,
        &challenge,
        KemKeyRef::Revocable(&key),
        KemPublicRef::Revocable(&mpk),
    )?;
    protocol::write_message(&mut stream, &response)?;
    let decision = protocol::read_message(&mut stream)?;
    let Message::Decision {
        granted,
        ref reason,
    } = decision
    else {
        bail!("verifier sent something other than a decision");
    };
    if let Some(path) = decision_out {
        std::fs::write(path, protocol::encode_message(&decision))?;
    }
    eprintln!("decision: {reason}");
    let _ = std::io::stderr().flush();
    Ok(granted)
}
