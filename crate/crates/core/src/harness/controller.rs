use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;

/// Which agent controller an episode runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ControllerSpec {
    /// LCB-guided policy search with the given horizon.
    LcbHorizon(usize),
    /// Uniformly random control each step.
    Random,
    /// Agent never moves.
    Static,
    /// Static agent that sees the whole plane.
    InfiniteRange,
}

impl ControllerSpec {
    pub fn myopic() -> Self {
        ControllerSpec::LcbHorizon(1)
    }

    pub fn label(&self) -> String {
        self.to_string()
    }

    /// Stable integer used to key controller-specific random streams.
    pub fn stream_tag(&self) -> u64 {
        match *self {
            ControllerSpec::LcbHorizon(t) => 100 + t as u64,
            ControllerSpec::Random => 1,
            ControllerSpec::Static => 2,
            ControllerSpec::InfiniteRange => 3,
        }
    }
}

impl fmt::Display for ControllerSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ControllerSpec::LcbHorizon(t) => write!(f, "lcb:{t}"),
            ControllerSpec::Random => f.write_str("random"),
            ControllerSpec::Static => f.write_str("static"),
            ControllerSpec::InfiniteRange => f.write_str("infinite_range"),
        }
    }
}

/// Parses `NAME[:T]`: `lcb:T`, `myopic`, `random`, `static`, `infinite_range`.
impl FromStr for ControllerSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let s = s.trim();
        let (name, arg) = match s.split_once(':') {
            Some((n, a)) => (n, Some(a)),
            None => (s, None),
        };
        let bad = || Error::Controller(s.to_string());
        let spec = match (name.to_ascii_lowercase().as_str(), arg) {
            ("lcb" | "horizon" | "lcb_horizon", Some(t)) => {
                let t: usize = t.parse().map_err(|_| bad())?;
                if t == 0 {
                    return Err(bad());
                }
                ControllerSpec::LcbHorizon(t)
            }
            ("myopic", None) => ControllerSpec::LcbHorizon(1),
            ("random", None) => ControllerSpec::Random,
            ("static", None) => ControllerSpec::Static,
            ("infinite_range" | "inf" | "inf_sr", None) => ControllerSpec::InfiniteRange,
            _ => return Err(bad()),
        };
        Ok(spec)
    }
}
