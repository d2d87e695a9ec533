use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Everything that can go wrong across the library.
///
/// Denials that are part of normal protocol operation (a key that does not
/// satisfy a policy, a revoked index, a failed re-encryption check) are
/// errors here too: callers decide whether they are fatal.
#[derive(Debug, Error)]
pub enum Error {
    #[error("policy syntax error at offset {offset}: {message}")]
    PolicySyntax { offset: usize, message: String },

    #[error("attribute `{0}` appears in more than one policy leaf")]
    DuplicateAttribute(String),

    #[error("attribute `{0}` is not in the system universe")]
    UnknownAttribute(String),

    #[error("universe of {got} attributes exceeds the maximum of {max}")]
    UniverseTooLarge { got: usize, max: usize },

    #[error("index {0} is already a member of the accumulator")]
    IndexInUse(u32),

    #[error("index {0} is not a member of the accumulator")]
    IndexNotPresent(u32),

    #[error("accumulator capacity {0} exhausted")]
    CapacityExceeded(u32),

    #[error("index {0} is not a member of the given set")]
    NotMember(u32),

    #[error("index {0} has been revoked; its witness cannot be updated")]
    Revoked(u32),

    #[error("the key's attributes do not satisfy the ciphertext policy")]
    NotSatisfied,

    #[error("key is at epoch {key} but epoch {expected} is required")]
    EpochMismatch { key: u64, expected: u64 },

    #[error("delta starts at epoch {delta} but the witness is at epoch {witness}")]
    DeltaEpochMismatch { witness: u64, delta: u64 },

    #[error("encryption requires a non-empty accumulator")]
    EmptyAccumulator,

    #[error("decrypted session nonce does not match the prover's nonce")]
    NonceMismatch,

    #[error("re-encryption check failed: rebuilt bundle differs from the received one")]
    ReencryptMismatch,

    #[error("challenge bundle mode does not match the supplied key material")]
    ModeMismatch,

    #[error("state machine received an unexpected message: {0}")]
    UnexpectedMessage(&'static str),

    #[error("malformed envelope: {0}")]
    MalformedEnvelope(String),

    #[error("unknown artifact tag {0}")]
    UnknownTag(u8),

    #[error("suite id {0} does not match this build's profile")]
    SuiteMismatch(u8),

    #[error("bytes do not decode to a valid group element")]
    InvalidElement,

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
