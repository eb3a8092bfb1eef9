use thiserror::Error;

/// Errors raised by the engine.
///
/// `InternalInconsistency` and `ScanBoxTooSmall` indicate a bug in one of the
/// computation routes, never a mathematical fact about the input.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("unsupported variety: {0}")]
    UnsupportedVariety(String),
    #[error("unsupported polarisation: {0}")]
    UnsupportedPolarisation(String),
    #[error("divisor {0} is not ample")]
    NotAmple(String),
    #[error("divisor {0} is not very ample")]
    NotVeryAmple(String),
    #[error("exact answer unavailable in generic-curve mode")]
    GenericModeUnsupported,
    #[error("twist out of range: {0}")]
    BadTwist(String),
    #[error("search box too large: {volume} lattice points exceeds cap {cap} (raise ULRICH_SCAN_CAP)")]
    BoxTooLarge { volume: u128, cap: u128 },
    #[error("scan box too small: outer shell contributes to {0}")]
    ScanBoxTooSmall(String),
    #[error("presentation is not surjective: {0}")]
    NotSurjective(String),
    #[error("dimension mismatch: {0}")]
    Mismatch(String),
    #[error("internal inconsistency: {0}")]
    InternalInconsistency(String),
}

impl Error {
    /// Stable machine-readable code used in JSON error payloads.
    pub fn code(&self) -> &'static str {
        match self {
            Error::Parse(_) => "ParseError",
            Error::UnsupportedVariety(_) => "UnsupportedVariety",
            Error::UnsupportedPolarisation(_) => "UnsupportedPolarisation",
            Error::NotAmple(_) => "NotAmple",
            Error::NotVeryAmple(_) => "NotVeryAmple",
            Error::GenericModeUnsupported => "GenericModeUnsupported",
            Error::BadTwist(_) => "BadTwist",
            Error::BoxTooLarge { .. } => "BoxTooLarge",
            Error::ScanBoxTooSmall(_) => "ScanBoxTooSmall",
            Error::NotSurjective(_) => "NotSurjective",
            Error::Mismatch(_) => "Mismatch",
            Error::InternalInconsistency(_) => "InternalInconsistency",
        }
    }

    /// True for failures that signal an engine bug rather than bad input.
    pub fn is_internal(&self) -> bool {
        matches!(
            self,
            Error::InternalInconsistency(_) | Error::ScanBoxTooSmall(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
