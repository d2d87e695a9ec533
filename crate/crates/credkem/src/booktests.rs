//! Runs every code block in the book as a doc-test, so the guide can never
//! drift from the library. Compiled only under `cfg(doctest)`.

macro_rules! chapter {
    ($name:ident, $path:literal) => {
        #[doc = include_str!($path)]
        pub struct $name;
    };
}

chapter!(Introduction, "../../../book/src/introduction.md");
chapter!(Pairings, "../../../book/src/pairings.md");
chapter!(Policies, "../../../book/src/policies.md");
chapter!(BaseKem, "../../../book/src/base-kem.md");
chapter!(Accumulator, "../../../book/src/accumulator.md");
chapter!(Revocation, "../../../book/src/revocation.md");
chapter!(Anonymity, "../../../book/src/anonymity.md");
chapter!(Protocol, "../../../book/src/protocol.md");
chapter!(StorageCli, "../../../book/src/storage-cli.md");
