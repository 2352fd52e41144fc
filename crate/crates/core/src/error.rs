use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("unsupported regime: {0}")]
    UnsupportedRegime(String),
    #[error("NotCritical: |gamma| = {0} != 1, the diagonal and off-diagonal growth do not balance")]
    NotCritical(f64),
    #[error("LimitCircleRegime: sigma = {0} > 3/2; the spectrum is discrete there and Jost solutions are not unique")]
    LimitCircleRegime(f64),
    #[error("UnsupportedTauZero: tau = 0 with sigma = {0} in (1, 3/2] is not covered")]
    UnsupportedTauZero(f64),
    #[error("BranchPoint: T_n vanishes at n = {n} (z at or near a threshold)")]
    BranchPoint { n: usize },
    #[error("TruncationTooShort: tail bound {bound} >= 1 at N = {n_max}")]
    TruncationTooShort { n_max: usize, bound: f64 },
    #[error("OnSpectrum: z = {0} lies in the closure of the absolutely continuous set")]
    OnSpectrum(String),
    #[error("ZeroCrossing: Jost solution vanishes near n = {0}")]
    ZeroCrossing(usize),
    #[error("WindowMismatch: {0}")]
    WindowMismatch(String),
    #[error("OutsideDomain: {0}")]
    OutsideDomain(String),
    #[error("OutsideAC: lambda = {0} is not in the absolutely continuous set")]
    OutsideAC(f64),
    #[error("ThresholdPoint: lambda = {0} is within the guard band of a threshold")]
    ThresholdPoint(f64),
    #[error("EigenvalueHit: Omega(z) vanishes at z = {0}")]
    EigenvalueHit(String),
    #[error("OverlapsAC: interval [{0}, {1}] meets the absolutely continuous set")]
    OverlapsAC(f64, f64),
    #[error("RefineGrid: cell [{lo}, {hi}] holds {expected} eigenvalues but {found} sign changes")]
    RefineGrid { lo: f64, hi: f64, expected: usize, found: usize },
    #[error("config: {0}")]
    Config(String),
}

impl Error {
    /// Regime rejections as opposed to numerical failures.
    pub fn is_regime(&self) -> bool {
        matches!(
            self,
            Error::NotCritical(_)
                | Error::LimitCircleRegime(_)
                | Error::UnsupportedTauZero(_)
                | Error::UnsupportedRegime(_)
        )
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidParameter(_) => "InvalidParameter",
            Error::UnsupportedRegime(_) => "UnsupportedRegime",
            Error::NotCritical(_) => "NotCritical",
            Error::LimitCircleRegime(_) => "LimitCircleRegime",
            Error::UnsupportedTauZero(_) => "UnsupportedTauZero",
            Error::BranchPoint { .. } => "BranchPoint",
            Error::TruncationTooShort { .. } => "TruncationTooShort",
            Error::OnSpectrum(_) => "OnSpectrum",
            Error::ZeroCrossing(_) => "ZeroCrossing",
            Error::WindowMismatch(_) => "WindowMismatch",
            Error::OutsideDomain(_) => "OutsideDomain",
            Error::OutsideAC(_) => "OutsideAC",
            Error::ThresholdPoint(_) => "ThresholdPoint",
            Error::EigenvalueHit(_) => "EigenvalueHit",
            Error::OverlapsAC(..) => "OverlapsAC",
            Error::RefineGrid { .. } => "RefineGrid",
            Error::Config(_) => "Config",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
