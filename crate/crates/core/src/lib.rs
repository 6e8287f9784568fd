//! Unconditionally secure proof-of-retrievability toolkit.
//!
//! A verifier encodes a message with a linear code, hands the codeword to a
//! prover, and later audits it with random challenges. Extraction is
//! nearest-neighbour decoding of the prover's full response vector in the
//! scheme's response code; the distance of that code fixes the success
//! probability above which extraction always returns the original message.
//!
//! Modules:
//!
//! * [`algebra`]: prime-field elements and vectors.
//! * [`coding`]: Reed-Solomon and generator-matrix codes, minimum-distance decoding.
//! * [`schemes`]: challenge spaces, response functions, response codes.
//! * [`keyed`]: the keyed (Shacham-Waters style) scheme with unconditional security.
//! * [`extractor`]: proving-algorithm models and black-box extractors.
//! * [`analysis`]: closed-form response-code distances and extraction thresholds.
//! * [`audit`]: hypothesis tests and confidence bounds on prover success.
//! * [`service`]: wire protocol, prover server, auditing client, pair store.

pub mod algebra;
pub mod analysis;
pub mod audit;
pub mod coding;
pub mod error;
pub mod extractor;
pub mod keyed;
pub mod schemes;
pub mod service;

pub use error::{Error, Result};
