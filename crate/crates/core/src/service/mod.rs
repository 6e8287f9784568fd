//! Wire protocol, prover daemon, auditing client and bounded-use pair store.

mod blocks;
mod client;
pub mod protocol;
mod server;
mod store;

pub use blocks::{encode_bytes, BlocksFile};
pub use client::{
    audit_session, remote_prover, sample_ordinals, AuditOutcome, AuditPlan, Direction, RemoteProver, Session,
    SessionFailure, Transcript, VerificationSource,
};
pub use server::{serve, Server, ServerHandle, ServerState};
pub use store::{precompute_pairs, PairStore};

pub use store::write_atomic;
