use thiserror::Error;

/// Errors produced anywhere in the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument outside the operation's domain.
    #[error("domain error: {0}")]
    Domain(String),
    /// Malformed structured input. `line` is 1-based; 0 means "end of input".
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    /// A computation produced a non-finite value.
    #[error("numerical error: {0}")]
    Numerical(String),
    /// A search target is not bracketed by the supplied range.
    #[error("target {target:e} not bracketed: BER {ber_lo:e} at {snr_lo_db} dB, {ber_hi:e} at {snr_hi_db} dB")]
    NotBracketed {
        target: f64,
        snr_lo_db: f64,
        ber_lo: f64,
        snr_hi_db: f64,
        ber_hi: f64,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}

pub(crate) fn parse_err<T>(line: usize, msg: impl Into<String>) -> Result<T> {
    Err(Error::Parse {
        line,
        msg: msg.into(),
    })
}
