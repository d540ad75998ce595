//! Record (left-to-right maximum) statistics of partially shuffled permutations.
//!
//! A *p-partial permutation* starts from a fixed base permutation of `[1..n]`,
//! marks each element independently with probability `p`, and permutes the
//! marked elements uniformly at random among the marked slots. This crate
//! provides:
//!
//! * [`model`] — the sampling process, record counting, and the quadrant
//!   decomposition of a base permutation around a pivot.
//! * [`families`] — constructors for the base permutations of interest
//!   (identity, the shifted extremal family, uniform random) and the one-line
//!   text format.
//! * [`oracle`] — ground-truth expectations and event probabilities by
//!   exhaustive enumeration in exact rational arithmetic (small `n`).
//! * [`formulas`] — closed-form sums and bounds for record counts, in exact
//!   rational and log-space floating modes.
//! * [`mc`] — a reproducible, parallel Monte Carlo estimator for regimes the
//!   oracle cannot reach.
//! * [`report`] — the experiment harness behind the CLI: parameter scans,
//!   formula-vs-oracle comparison reports, bound suites, CSV/JSON emission.

pub mod families;
pub mod formulas;
pub mod mc;
pub mod model;
pub mod oracle;
pub mod report;
pub mod rng;

use num_rational::BigRational;
use num_traits::ToPrimitive;
use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// A parameter was outside its documented domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// Input text could not be parsed; the message names the offending token.
    #[error("parse error: {0}")]
    Parse(String),

    /// An exact-enumeration call exceeded its configured cap.
    #[error("resource limit: n={n} exceeds enumeration cap {cap}; use the Monte Carlo engine for large n")]
    CapExceeded { n: usize, cap: usize },

    /// A marked-slot arrangement was not a bijection of the marked values.
    #[error("invalid arrangement: {0}")]
    InvalidArrangement(String),

    /// Two Monte Carlo estimates came from incompatible configurations.
    #[error("merge error: {0}")]
    MergeMismatch(String),

    /// Bad command-line or config-file input.
    #[error("usage error: {0}")]
    Usage(String),

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

/// A probability carried in up to two representations: an exact rational
/// (required by the enumeration oracle) and a double (used by Monte Carlo and
/// the floating closed forms).
///
/// Text input chooses the representation: `"num/den"` parses to
/// [`Prob::Exact`], a decimal parses to [`Prob::Real`]. The float view of an
/// exact probability is the nearest double, so the two representations agree
/// to within one ulp by construction.
#[derive(Debug, Clone, PartialEq)]
pub enum Prob {
    Exact(BigRational),
    Real(f64),
}

impl Prob {
    pub fn exact(r: BigRational) -> Result<Self> {
        if r < BigRational::from_integer(0.into()) || r > BigRational::from_integer(1.into()) {
            return Err(Error::Domain(format!("probability {r} not in [0,1]")));
        }
        Ok(Prob::Exact(r))
    }

    pub fn real(x: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&x) {
            return Err(Error::Domain(format!("probability {x} not in [0,1]")));
        }
        Ok(Prob::Real(x))
    }

    /// Parse `"num/den"` as exact, anything else as a decimal.
    pub fn parse(text: &str) -> Result<Self> {
        let t = text.trim();
        if t.contains('/') {
            Prob::exact(parse_rational(t)?)
        } else {
            let x: f64 = t
                .parse()
                .map_err(|_| Error::Parse(format!("bad probability token \"{t}\"")))?;
            Prob::real(x)
        }
    }

    /// Double view; exact for [`Prob::Real`], nearest double for [`Prob::Exact`].
    pub fn to_f64(&self) -> f64 {
        match self {
            Prob::Exact(r) => r.to_f64().expect("rational in [0,1] converts to f64"),
            Prob::Real(x) => *x,
        }
    }

    /// The exact rational, if this probability carries one.
    pub fn rational(&self) -> Option<&BigRational> {
        match self {
            Prob::Exact(r) => Some(r),
            Prob::Real(_) => None,
        }
    }
}

impl std::fmt::Display for Prob {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Prob::Exact(r) => write!(f, "{r}"),
            Prob::Real(x) => write!(f, "{x}"),
        }
    }
}

/// Model configuration: the permutation length and the marking probability.
#[derive(Debug, Clone)]
pub struct ModelParams {
    pub n: usize,
    pub p: Prob,
}

impl ModelParams {
    pub fn new(n: usize, p: Prob) -> Result<Self> {
        if n == 0 {
            return Err(Error::Domain("n must be at least 1".into()));
        }
        Ok(ModelParams { n, p })
    }
}

/// Parse a `"num/den"` rational in [0,1].
pub fn parse_rational(text: &str) -> Result<BigRational> {
    let t = text.trim();
    let (num, den) = t
        .split_once('/')
        .ok_or_else(|| Error::Parse(format!("expected num/den, got \"{t}\"")))?;
    let num: num_bigint::BigInt = num
        .trim()
        .parse()
        .map_err(|_| Error::Parse(format!("bad numerator token \"{num}\"")))?;
    let den: num_bigint::BigInt = den
        .trim()
        .parse()
        .map_err(|_| Error::Parse(format!("bad denominator token \"{den}\"")))?;
    if den == 0.into() {
        return Err(Error::Parse("zero denominator".into()));
    }
    Ok(BigRational::new(num, den))
}
