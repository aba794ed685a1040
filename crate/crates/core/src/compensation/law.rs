//! Executable compensator recurrences and their text format.

use std::fmt::{self, Write as _};
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::narx::format::{check_header, entries};
use crate::narx::signal::Signal;
use crate::scalar::Scalar;

/// Sequence a law factor reads. Differences and signs are backward:
/// `dr[i] = r[i] - r[i-1]`, `sr[i] = sign(dr[i])`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LawSignal {
    R,
    M,
    DR,
    DM,
    SR,
    SM,
}

impl LawSignal {
    pub fn symbol(self) -> &'static str {
        match self {
            LawSignal::R => "r",
            LawSignal::M => "m",
            LawSignal::DR => "dr",
            LawSignal::DM => "dm",
            LawSignal::SR => "sr",
            LawSignal::SM => "sm",
        }
    }

    fn from_symbol(s: &str) -> Option<Self> {
        Some(match s {
            "r" => LawSignal::R,
            "m" => LawSignal::M,
            "dr" => LawSignal::DR,
            "dm" => LawSignal::DM,
            "sr" => LawSignal::SR,
            "sm" => LawSignal::SM,
            _ => return None,
        })
    }

    pub fn reads_m(self) -> bool {
        matches!(self, LawSignal::M | LawSignal::DM | LawSignal::SM)
    }

    /// Differences and signs also read the preceding sample.
    pub fn is_increment(self) -> bool {
        !matches!(self, LawSignal::R | LawSignal::M)
    }
}

/// `signal[j + offset]^power`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LawFactor {
    pub signal: LawSignal,
    pub offset: i64,
    pub power: u32,
}

impl fmt::Display for LawFactor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}[j", self.signal.symbol())?;
        match self.offset {
            0 => write!(f, "]")?,
            o if o > 0 => write!(f, "+{o}]")?,
            o => write!(f, "{o}]")?,
        }
        if self.power > 1 {
            write!(f, "^{}", self.power)?;
        }
        Ok(())
    }
}

/// Product of law factors; the empty product is the constant one.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct LawTerm {
    factors: Vec<LawFactor>,
}

impl LawTerm {
    /// Sorts by `(signal, offset)` and merges repeated factors.
    pub fn new(mut factors: Vec<LawFactor>) -> Self {
        factors.sort_by_key(|f| (f.signal, std::cmp::Reverse(f.offset)));
        let mut out: Vec<LawFactor> = Vec::with_capacity(factors.len());
        for f in factors {
            match out.last_mut() {
                Some(l) if l.signal == f.signal && l.offset == f.offset => l.power += f.power,
                _ => out.push(f),
            }
        }
        LawTerm { factors: out }
    }

    pub fn single(signal: LawSignal, offset: i64) -> Self {
        LawTerm::new(vec![LawFactor {
            signal,
            offset,
            power: 1,
        }])
    }

    pub fn factors(&self) -> &[LawFactor] {
        &self.factors
    }

    /// Lowest index read relative to `j`.
    fn reach_back(&self) -> i64 {
        self.factors
            .iter()
            .map(|f| f.offset - i64::from(f.signal.is_increment()))
            .min()
            .unwrap_or(0)
    }

    fn eval<T: Scalar>(&self, j: usize, r: &[T], dr: &[T], m: &[T]) -> T {
        let mut acc = T::one();
        for f in &self.factors {
            let i = (j as i64 + f.offset) as usize;
            let v = match f.signal {
                LawSignal::R => r[i],
                LawSignal::M => m[i],
                LawSignal::DR => dr[i],
                LawSignal::SR => dr[i].sign3(),
                LawSignal::DM => m[i] - m[i - 1],
                LawSignal::SM => (m[i] - m[i - 1]).sign3(),
            };
            acc *= v.powi(f.power as i32);
        }
        acc
    }
}

impl fmt::Display for LawTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return f.write_str("1");
        }
        for (i, x) in self.factors.iter().enumerate() {
            if i > 0 {
                f.write_str("*")?;
            }
            write!(f, "{x}")?;
        }
        Ok(())
    }
}

impl FromStr for LawTerm {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let s = s.trim();
        if s == "1" {
            return Ok(LawTerm::default());
        }
        let mut factors = Vec::new();
        for tok in s.split('*').map(str::trim) {
            let (body, power) = match tok.split_once('^') {
                Some((b, p)) => (
                    b,
                    p.parse::<u32>()
                        .map_err(|_| format!("bad power in `{tok}`"))?,
                ),
                None => (tok, 1),
            };
            if power == 0 {
                return Err(format!("power 0 in `{tok}`"));
            }
            let open = body
                .find('[')
                .ok_or_else(|| format!("missing `[` in `{tok}`"))?;
            let inner = body[open + 1..]
                .strip_suffix(']')
                .ok_or_else(|| format!("missing `]` in `{tok}`"))?
                .replace(' ', "");
            let signal = LawSignal::from_symbol(&body[..open])
                .ok_or_else(|| format!("unknown sequence in `{tok}`"))?;
            let rest = inner
                .strip_prefix('j')
                .ok_or_else(|| format!("index must start with j in `{tok}`"))?;
            let offset = if rest.is_empty() {
                0
            } else {
                let v: i64 = rest
                    .trim_start_matches('+')
                    .parse()
                    .map_err(|_| format!("bad offset in `{tok}`"))?;
                if !(rest.starts_with('+') || rest.starts_with('-')) {
                    return Err(format!("bad offset in `{tok}`"));
                }
                v
            };
            factors.push(LawFactor {
                signal,
                offset,
                power,
            });
        }
        Ok(LawTerm::new(factors))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LawKind {
    /// Obtained by solving the direct model for its delayed input.
    Direct,
    /// Obtained from an identified inverse model by substitution.
    Inverse,
}

impl LawKind {
    pub fn name(self) -> &'static str {
        match self {
            LawKind::Direct => "direct",
            LawKind::Inverse => "inverse",
        }
    }
}

/// `m[j] = gain * sum_i c_i * term_i(j)`.
#[derive(Clone, Debug, PartialEq)]
pub struct CompensatorLaw<T> {
    pub kind: LawKind,
    pub gain: T,
    pub terms: Vec<(LawTerm, T)>,
    /// Number of reference samples read beyond `j`.
    pub horizon: usize,
    pub tau_d: usize,
    pub tau_s: usize,
    pub sample_time: f64,
}

impl<T: Scalar> CompensatorLaw<T> {
    /// Checks that `m` is only read strictly in the past and `r` within the
    /// declared horizon.
    pub fn validate(&self) -> Result<()> {
        for (term, _) in &self.terms {
            for f in term.factors() {
                if f.signal.reads_m() && f.offset >= 0 {
                    return Err(Error::Causality(format!(
                        "law term {term} reads m at or after the sample being computed"
                    )));
                }
                if !f.signal.reads_m() && f.offset > self.horizon as i64 {
                    return Err(Error::Causality(format!(
                        "law term {term} reads r beyond the horizon of {} samples",
                        self.horizon
                    )));
                }
            }
        }
        if !self.gain.is_finite() || self.terms.iter().any(|(_, c)| !c.is_finite()) {
            return Err(Error::InvalidArgument(
                "law coefficients must be finite".into(),
            ));
        }
        Ok(())
    }

    /// First index whose reads all fall inside the record.
    pub fn warmup(&self) -> usize {
        let back = self
            .terms
            .iter()
            .map(|(t, _)| t.reach_back())
            .min()
            .unwrap_or(0)
            .min(-1);
        (-back) as usize
    }

    /// Coefficient of `term`, if present.
    pub fn coefficient(&self, term: &LawTerm) -> Option<T> {
        self.terms.iter().find(|(t, _)| t == term).map(|(_, c)| *c)
    }
}

impl<T: Scalar> fmt::Display for CompensatorLaw<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "m[j] = {} * (", self.gain)?;
        for (i, (t, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "{c}*{t}")?;
        }
        f.write_str(")")
    }
}

/// Runs the recurrence over the reference. The first `law.warmup()` values
/// of `m` come from `m0` (its last value is held when shorter; an empty
/// `m0` means `r[0]`). The output has `len(r) - horizon` samples.
pub fn run_compensator<T: Scalar>(
    law: &CompensatorLaw<T>,
    r: &Signal<T>,
    m0: &[T],
) -> Result<Signal<T>> {
    law.validate()?;
    let start = law.warmup();
    let rs = r.samples();
    if rs.len() <= law.horizon + start {
        return Err(Error::InsufficientData {
            needed: law.horizon + start + 1,
            got: rs.len(),
        });
    }
    let n = rs.len() - law.horizon;
    let mut dr = vec![T::zero(); rs.len()];
    for i in 1..rs.len() {
        dr[i] = rs[i] - rs[i - 1];
    }
    let seed = |i: usize| match m0 {
        [] => rs[0],
        s => s[i.min(s.len() - 1)],
    };
    let mut m: Vec<T> = (0..start).map(seed).collect();
    m.reserve(n - start);
    for j in start..n {
        let mut acc = T::zero();
        for (term, c) in &law.terms {
            acc += *c * term.eval(j, rs, &dr, &m);
        }
        let v = law.gain * acc;
        if !v.is_finite() || v.abs() > T::lit(crate::narx::DIVERGENCE_LIMIT) {
            return Err(Error::Diverged {
                index: j,
                time: Some(j as f64 * r.sample_time()),
            });
        }
        m.push(v);
    }
    Signal::new(m, r.sample_time())
}

pub fn write_law<T: Scalar>(law: &CompensatorLaw<T>) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "format_version = {}", crate::narx::MODEL_FORMAT_VERSION);
    let _ = writeln!(s, "kind = compensator");
    let _ = writeln!(s, "law = {}", law.kind.name());
    let _ = writeln!(s, "gain = {}", law.gain);
    let _ = writeln!(s, "horizon = {}", law.horizon);
    let _ = writeln!(s, "tau_d = {}", law.tau_d);
    let _ = writeln!(s, "tau_s = {}", law.tau_s);
    let _ = writeln!(s, "sample_time = {}", law.sample_time);
    for (t, c) in &law.terms {
        let _ = writeln!(s, "term {t} = {c}");
    }
    s
}

pub fn read_law<T: Scalar>(text: &str) -> Result<CompensatorLaw<T>> {
    let entries = entries(text)?;
    check_header(&entries, "compensator")?;
    let mut kind = None;
    let mut gain = None;
    let mut horizon = None;
    let mut tau_d = None;
    let mut tau_s = None;
    let mut sample_time = None;
    let mut terms = Vec::new();
    for e in &entries {
        match e.key {
            "format_version" | "kind" => {}
            "law" => {
                kind = Some(match e.value {
                    "direct" => LawKind::Direct,
                    "inverse" => LawKind::Inverse,
                    other => return Err(e.error(format!("unknown law kind `{other}`"))),
                })
            }
            "gain" => gain = Some(e.parse::<T>()?),
            "horizon" => horizon = Some(e.parse::<usize>()?),
            "tau_d" => tau_d = Some(e.parse::<usize>()?),
            "tau_s" => tau_s = Some(e.parse::<usize>()?),
            "sample_time" => sample_time = Some(e.parse::<f64>()?),
            "term" => {
                let t: LawTerm = e.arg.parse().map_err(|m: String| e.error(m))?;
                terms.push((t, e.parse::<T>()?));
            }
            other => return Err(e.error(format!("unknown key `{other}`"))),
        }
    }
    let missing = |name: &str| Error::Parse {
        line: 0,
        message: format!("missing `{name}`"),
    };
    let law = CompensatorLaw {
        kind: kind.ok_or_else(|| missing("law"))?,
        gain: gain.ok_or_else(|| missing("gain"))?,
        terms,
        horizon: horizon.ok_or_else(|| missing("horizon"))?,
        tau_d: tau_d.ok_or_else(|| missing("tau_d"))?,
        tau_s: tau_s.ok_or_else(|| missing("tau_s"))?,
        sample_time: sample_time.ok_or_else(|| missing("sample_time"))?,
    };
    law.validate()?;
    Ok(law)
}
