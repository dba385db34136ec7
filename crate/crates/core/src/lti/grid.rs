use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::LtiError;

/// A nonnegative angular frequency in rad/s, or the point at infinity.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub enum Frequency {
    Finite(f64),
    Infinity,
}

impl Frequency {
    pub fn finite(self) -> Option<f64> {
        match self {
            Frequency::Finite(w) => Some(w),
            Frequency::Infinity => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Frequency::Infinity)
    }
}

impl From<f64> for Frequency {
    fn from(w: f64) -> Self {
        if w.is_infinite() {
            Frequency::Infinity
        } else {
            Frequency::Finite(w)
        }
    }
}

impl fmt::Display for Frequency {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Frequency::Finite(w) => write!(f, "{w}"),
            Frequency::Infinity => f.write_str("inf"),
        }
    }
}

impl FromStr for Frequency {
    type Err = LtiError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("inf") || s.eq_ignore_ascii_case("infinity") {
            return Ok(Frequency::Infinity);
        }
        let w: f64 = s
            .parse()
            .map_err(|_| LtiError::InvalidGrid(format!("bad frequency {s:?}")))?;
        if !(w >= 0.0) {
            return Err(LtiError::InvalidGrid(format!("negative frequency {w}")));
        }
        Ok(Frequency::from(w))
    }
}

impl Serialize for Frequency {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Frequency::Finite(w) => s.serialize_f64(*w),
            Frequency::Infinity => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Frequency {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Wire {
            Num(f64),
            Text(String),
        }
        match Wire::deserialize(d)? {
            Wire::Num(w) if w >= 0.0 => Ok(Frequency::from(w)),
            Wire::Num(w) => Err(serde::de::Error::custom(format!("negative frequency {w}"))),
            Wire::Text(t) => t.parse().map_err(serde::de::Error::custom),
        }
    }
}

/// Strictly increasing, nonempty list of analysis frequencies.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Frequency>", into = "Vec<Frequency>")]
pub struct FrequencyGrid(Vec<Frequency>);

impl FrequencyGrid {
    pub fn new(points: Vec<Frequency>) -> Result<Self, LtiError> {
        if points.is_empty() {
            return Err(LtiError::InvalidGrid("empty grid".into()));
        }
        for p in &points {
            if let Frequency::Finite(w) = p {
                if !(*w >= 0.0) || !w.is_finite() {
                    return Err(LtiError::InvalidGrid(format!("invalid frequency {w}")));
                }
            }
        }
        if points.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(LtiError::InvalidGrid(
                "frequencies must be strictly increasing".into(),
            ));
        }
        Ok(Self(points))
    }

    pub fn single(w: Frequency) -> Self {
        Self(vec![w])
    }

    /// `count` log-spaced points in `[lo, hi]`, plus `0` and `inf` at the ends.
    pub fn log_with_endpoints(lo: f64, hi: f64, count: usize) -> Result<Self, LtiError> {
        if !(lo > 0.0 && hi > lo) || count == 0 {
            return Err(LtiError::InvalidGrid(format!(
                "log grid needs 0 < lo < hi and count > 0 (got {lo}, {hi}, {count})"
            )));
        }
        let mut pts = vec![Frequency::Finite(0.0)];
        pts.extend(log_space(lo, hi, count).into_iter().map(Frequency::Finite));
        pts.push(Frequency::Infinity);
        Self::new(pts)
    }

    /// 20 log-spaced points in `[1e-2, 1e2]` plus `0` and `inf`.
    pub fn default_analysis() -> Self {
        Self::log_with_endpoints(1e-2, 1e2, 20).expect("static grid is valid")
    }

    /// Dense sweep used for H-infinity estimates.
    pub fn default_norm_sweep() -> Self {
        Self::log_with_endpoints(1e-3, 1e3, 300).expect("static grid is valid")
    }

    pub fn points(&self) -> &[Frequency] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = Frequency> + '_ {
        self.0.iter().copied()
    }
}

impl From<FrequencyGrid> for Vec<Frequency> {
    fn from(g: FrequencyGrid) -> Self {
        g.0
    }
}

impl TryFrom<Vec<Frequency>> for FrequencyGrid {
    type Error = LtiError;

    fn try_from(v: Vec<Frequency>) -> Result<Self, Self::Error> {
        FrequencyGrid::new(v)
    }
}

/// Grid specifications as accepted on the command line:
/// `log:LO:HI:COUNT` (adds 0 and inf), `single:W`, or `list:W1,W2,...`.
impl FromStr for FrequencyGrid {
    type Err = LtiError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || LtiError::InvalidGrid(format!("unrecognised grid spec {s:?}"));
        let (kind, rest) = s.split_once(':').ok_or_else(bad)?;
        match kind {
            "log" => {
                let parts: Vec<&str> = rest.split(':').collect();
                if parts.len() != 3 {
                    return Err(bad());
                }
                let lo: f64 = parts[0].parse().map_err(|_| bad())?;
                let hi: f64 = parts[1].parse().map_err(|_| bad())?;
                let n: usize = parts[2].parse().map_err(|_| bad())?;
                Self::log_with_endpoints(lo, hi, n)
            }
            "single" => Ok(Self::single(rest.parse()?)),
            "list" => Self::new(
                rest.split(',')
                    .map(str::parse)
                    .collect::<Result<Vec<Frequency>, _>>()?,
            ),
            _ => Err(bad()),
        }
    }
}

impl fmt::Display for FrequencyGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("list:")?;
        for (k, p) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{p}")?;
        }
        Ok(())
    }
}

pub(crate) fn log_space(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.log10(), hi.log10());
    (0..count)
        .map(|k| 10f64.powf(a + (b - a) * k as f64 / (count - 1) as f64))
        .collect()
}
