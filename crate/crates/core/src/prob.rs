/// How the `err` field of a [`ProbResult`] was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrKind {
    /// Grid-refinement estimate of a quadrature.
    Quadrature,
    /// Monte Carlo standard error.
    McStdErr,
    /// Analytic truncation bound.
    Bound,
}

impl ErrKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ErrKind::Quadrature => "quadrature",
            ErrKind::McStdErr => "mc-stderr",
            ErrKind::Bound => "bound",
        }
    }
}

/// A probability with an error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbResult {
    pub prob: f64,
    pub err: f64,
    pub kind: ErrKind,
    /// The raw value fell outside [0, 1] and was clamped.
    pub clamped: bool,
}

impl ProbResult {
    /// Clamps `raw` into [0, 1] and records whether that was needed.
    pub fn clamp(raw: f64, err: f64, kind: ErrKind) -> Self {
        let prob = raw.clamp(0.0, 1.0);
        Self {
            prob,
            err: err.max(0.0),
            kind,
            clamped: prob != raw,
        }
    }

    pub fn exact(prob: f64, kind: ErrKind) -> Self {
        Self {
            prob,
            err: 0.0,
            kind,
            clamped: false,
        }
    }

    pub fn with_err(self, err: f64) -> Self {
        Self {
            err: err.max(0.0),
            ..self
        }
    }
}

/// A density value, clamped at zero with a flag.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Density {
    pub value: f64,
    pub clamped: bool,
}

impl Density {
    pub fn clamp(raw: f64) -> Self {
        Self {
            value: raw.max(0.0),
            clamped: raw < 0.0,
        }
    }
}
