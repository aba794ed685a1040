//! Regressor terms: products of powers of lagged signals.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Signal a factor reads from. `Phi1` is the first difference of the input
/// channel and `Phi2` its three-valued sign.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SignalKind {
    Output,
    Input,
    Phi1,
    Phi2,
}

impl SignalKind {
    pub fn symbol(self) -> &'static str {
        match self {
            SignalKind::Output => "y",
            SignalKind::Input => "u",
            SignalKind::Phi1 => "phi1",
            SignalKind::Phi2 => "phi2",
        }
    }

    /// True for every kind computed from the input channel.
    pub fn is_input_derived(self) -> bool {
        !matches!(self, SignalKind::Output)
    }

    pub fn is_phi(self) -> bool {
        matches!(self, SignalKind::Phi1 | SignalKind::Phi2)
    }

    fn from_symbol(s: &str) -> Option<Self> {
        match s {
            "y" => Some(SignalKind::Output),
            "u" => Some(SignalKind::Input),
            "phi1" => Some(SignalKind::Phi1),
            "phi2" => Some(SignalKind::Phi2),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LaggedFactor {
    pub kind: SignalKind,
    pub lag: usize,
    pub power: u32,
}

impl LaggedFactor {
    pub fn new(kind: SignalKind, lag: usize, power: u32) -> Result<Self> {
        if power == 0 {
            return Err(Error::InvalidArgument(format!(
                "factor {}[k-{lag}] has power 0",
                kind.symbol()
            )));
        }
        if lag == 0 {
            return Err(Error::InvalidArgument(format!(
                "factor {}[k] has lag 0; regressors must be strictly lagged",
                kind.symbol()
            )));
        }
        Ok(LaggedFactor { kind, lag, power })
    }

    /// Number of past samples of its source the factor needs; a difference
    /// at lag `l` reads index `k-l-1`.
    pub fn history(&self) -> usize {
        if self.kind.is_phi() {
            self.lag + 1
        } else {
            self.lag
        }
    }
}

impl fmt::Display for LaggedFactor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}[k-{}]", self.kind.symbol(), self.lag)?;
        if self.power > 1 {
            write!(f, "^{}", self.power)?;
        }
        Ok(())
    }
}

/// A monomial regressor. The empty product is the constant term.
///
/// Factors are kept sorted by `(kind, lag)` with equal pairs merged, so two
/// terms describing the same monomial compare equal.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Term {
    factors: Vec<LaggedFactor>,
}

/// Sorts factors by `(kind, lag)` and merges duplicates by adding powers.
pub fn canonicalize(mut factors: Vec<LaggedFactor>) -> Vec<LaggedFactor> {
    factors.sort_by_key(|f| (f.kind, f.lag));
    let mut out: Vec<LaggedFactor> = Vec::with_capacity(factors.len());
    for f in factors {
        match out.last_mut() {
            Some(last) if last.kind == f.kind && last.lag == f.lag => last.power += f.power,
            _ => out.push(f),
        }
    }
    out
}

impl Term {
    pub fn constant() -> Self {
        Term::default()
    }

    pub fn new(factors: impl IntoIterator<Item = LaggedFactor>) -> Result<Self> {
        let factors: Vec<LaggedFactor> = factors.into_iter().collect();
        for f in &factors {
            LaggedFactor::new(f.kind, f.lag, f.power)?;
        }
        Ok(Term {
            factors: canonicalize(factors),
        })
    }

    /// Single-factor term with power one. Panics on lag 0.
    pub fn single(kind: SignalKind, lag: usize) -> Self {
        Term::new([LaggedFactor::new(kind, lag, 1).expect("lag must be positive")])
            .expect("valid factor")
    }

    pub fn factors(&self) -> &[LaggedFactor] {
        &self.factors
    }

    pub fn is_constant(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.factors.iter().map(|f| f.power).sum()
    }

    pub fn degree_of(&self, kind: SignalKind) -> u32 {
        self.factors
            .iter()
            .filter(|f| f.kind == kind)
            .map(|f| f.power)
            .sum()
    }

    /// Degree in the input-derived kinds `u`, `phi1`, `phi2`.
    pub fn phi_degree(&self) -> u32 {
        self.degree_of(SignalKind::Phi1) + self.degree_of(SignalKind::Phi2)
    }

    /// The factor of a degree-one term.
    pub fn linear_factor(&self) -> Option<LaggedFactor> {
        match self.factors.as_slice() {
            [f] if f.power == 1 => Some(*f),
            _ => None,
        }
    }

    /// Lag of a bare `y[k-l]` term.
    pub fn linear_output_lag(&self) -> Option<usize> {
        self.linear_factor()
            .filter(|f| f.kind == SignalKind::Output)
            .map(|f| f.lag)
    }

    pub fn max_lag(&self) -> usize {
        self.factors.iter().map(|f| f.lag).max().unwrap_or(0)
    }

    pub fn history(&self) -> usize {
        self.factors.iter().map(|f| f.history()).max().unwrap_or(0)
    }

    /// Smallest lag of the raw input sample the term depends on, if any.
    pub fn newest_input_lag(&self) -> Option<usize> {
        self.factors
            .iter()
            .filter(|f| f.kind.is_input_derived())
            .map(|f| f.lag)
            .min()
    }

    /// Evaluates the monomial with `value(kind, lag)` supplying each signal.
    pub fn eval<T: Scalar>(&self, mut value: impl FnMut(SignalKind, usize) -> T) -> T {
        let mut acc = T::one();
        for f in &self.factors {
            acc *= value(f.kind, f.lag).powi(f.power as i32);
        }
        acc
    }

    pub fn mul(&self, other: &Term) -> Term {
        let mut factors = self.factors.clone();
        factors.extend_from_slice(&other.factors);
        Term {
            factors: canonicalize(factors),
        }
    }

    /// Ordering used to break selection ties: lower degree first, then the
    /// canonical factor order.
    pub fn tie_order(&self, other: &Term) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.factors.cmp(&other.factors))
    }
}

impl PartialOrd for Term {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Term {
    fn cmp(&self, other: &Self) -> Ordering {
        self.tie_order(other)
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return write!(f, "1");
        }
        for (i, factor) in self.factors.iter().enumerate() {
            if i > 0 {
                write!(f, "*")?;
            }
            write!(f, "{factor}")?;
        }
        Ok(())
    }
}

fn parse_factor(tok: &str) -> std::result::Result<LaggedFactor, String> {
    let (body, power) = match tok.split_once('^') {
        Some((b, p)) => (
            b,
            p.trim()
                .parse::<u32>()
                .map_err(|_| format!("bad power in `{tok}`"))?,
        ),
        None => (tok, 1),
    };
    let open = body
        .find('[')
        .ok_or_else(|| format!("missing `[` in `{tok}`"))?;
    if !body.ends_with(']') {
        return Err(format!("missing `]` in `{tok}`"));
    }
    let kind = SignalKind::from_symbol(body[..open].trim())
        .ok_or_else(|| format!("unknown signal in `{tok}`"))?;
    let index = body[open + 1..body.len() - 1].replace(' ', "");
    let lag = index
        .strip_prefix("k-")
        .and_then(|l| l.parse::<usize>().ok())
        .ok_or_else(|| format!("index must look like k-<lag> in `{tok}`"))?;
    LaggedFactor::new(kind, lag, power).map_err(|e| e.to_string())
}

impl FromStr for Term {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "1" || s == "const" {
            return Ok(Term::constant());
        }
        let factors = s
            .split('*')
            .map(|tok| parse_factor(tok.trim()))
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|message| Error::Parse { line: 0, message })?;
        Term::new(factors)
    }
}
