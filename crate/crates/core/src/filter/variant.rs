use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Error-state parameterization used by a filter.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FilterKind {
    /// Additive errors with e-frame attitude and ground velocity.
    #[serde(rename = "EKF")]
    Ekf,
    /// Left-invariant errors on the navigation block.
    #[serde(rename = "LQEKF")]
    Lqekf,
    /// Right-invariant navigation errors, additive body-frame biases and lever.
    #[serde(rename = "RQEKF")]
    Rqekf,
    /// Right error of the full extended Clifford state.
    #[serde(rename = "Clifford-RQEKF")]
    CliffordRqekf,
}

impl FilterKind {
    pub const ALL: [FilterKind; 4] = [
        FilterKind::Ekf,
        FilterKind::Lqekf,
        FilterKind::Rqekf,
        FilterKind::CliffordRqekf,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FilterKind::Ekf => "EKF",
            FilterKind::Lqekf => "LQEKF",
            FilterKind::Rqekf => "RQEKF",
            FilterKind::CliffordRqekf => "Clifford-RQEKF",
        }
    }
}

impl fmt::Display for FilterKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FilterKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase().replace(['_', ' '], "-");
        match key.as_str() {
            "ekf" => Ok(FilterKind::Ekf),
            "lqekf" => Ok(FilterKind::Lqekf),
            "rqekf" => Ok(FilterKind::Rqekf),
            "clifford-rqekf" | "clifford" => Ok(FilterKind::CliffordRqekf),
            _ => Err(Error::Config(format!("unknown filter kind '{s}'"))),
        }
    }
}

fn default_max_iter() -> usize {
    20
}

fn default_threshold_deg() -> f64 {
    0.01
}

#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FilterVariant {
    pub kind: FilterKind,
    #[serde(default)]
    pub iterated: bool,
    #[serde(default = "default_max_iter")]
    pub max_iter: usize,
    /// Termination threshold on the attitude increment change, deg.
    #[serde(default = "default_threshold_deg")]
    pub term_threshold_deg: f64,
}

impl FilterVariant {
    pub fn new(kind: FilterKind, iterated: bool) -> Self {
        FilterVariant {
            kind,
            iterated,
            max_iter: default_max_iter(),
            term_threshold_deg: default_threshold_deg(),
        }
    }

    pub fn iterated(kind: FilterKind) -> Self {
        Self::new(kind, true)
    }

    /// Passes allowed per update; one for a plain EKF update.
    pub fn passes(&self) -> usize {
        if self.iterated {
            self.max_iter
        } else {
            1
        }
    }

    pub fn term_threshold(&self) -> f64 {
        self.term_threshold_deg.to_radians()
    }

    pub fn label(&self) -> String {
        if self.iterated {
            format!("{}-Iter", self.kind)
        } else {
            self.kind.to_string()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_iter < 1 {
            return Err(Error::Config(format!("{}: max_iter must be at least 1", self.label())));
        }
        if !(self.term_threshold_deg > 0.0) {
            return Err(Error::Config(format!(
                "{}: termination threshold must be positive",
                self.label()
            )));
        }
        Ok(())
    }
}

impl FromStr for FilterVariant {
    type Err = Error;
    /// Parses labels such as `Clifford-RQEKF-Iter` or `ekf`.
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        let lower = t.to_ascii_lowercase();
        match lower.strip_suffix("-iter") {
            Some(base) => Ok(FilterVariant::new(base.parse()?, true)),
            None => Ok(FilterVariant::new(t.parse()?, false)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn labels_round_trip() {
        for kind in FilterKind::ALL {
            for iterated in [false, true] {
                let v = FilterVariant::new(kind, iterated);
                assert_eq!(v.label().parse::<FilterVariant>().unwrap(), v);
            }
        }
        assert!("ukf".parse::<FilterVariant>().is_err());
    }

    #[test]
    fn serde_names() {
        let v: FilterVariant =
            serde_json::from_str(r#"{"kind": "Clifford-RQEKF", "iterated": true}"#).unwrap();
        assert_eq!(v, FilterVariant::iterated(FilterKind::CliffordRqekf));
        assert!(serde_json::from_str::<FilterVariant>(r#"{"kind": "EKF", "bogus": 1}"#).is_err());
    }
}
