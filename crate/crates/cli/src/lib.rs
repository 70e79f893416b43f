//! Command line and line-protocol surface of the skizze toolkit.

pub mod commands;
pub mod record;
pub mod render;
pub mod service;

use skizze_core::Error;

/// Process status for a failed command: 2 for bad input, 4 for refused caps
/// or moves, 3 for numerical failures and everything else.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Parse(_) | Error::InvalidArgument(_) => 2,
        e if e.is_refusal() => 4,
        _ => 3,
    }
}
