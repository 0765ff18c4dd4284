use std::fmt;
use std::str::FromStr;

use super::{BrdMode, InformationModel, LearningRate};
use crate::error::{Error, Result};

pub const DEFAULT_SFP_TAU: f64 = 0.1;
pub const DEFAULT_RL_STEP: f64 = 0.1;
pub const DEFAULT_JUSTE_KAPPA: f64 = 0.1;
pub const DEFAULT_JUSTE_PMIN: f64 = 0.01;

/// A learning rule and its parameters, parsed from strings such as
/// `brd:seq`, `sfp:tau=0.1`, `rl:b=0.1` or `juste:kappa=0.1,pmin=0.01`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AlgorithmSpec {
    Brd { mode: BrdMode },
    Fp,
    Sfp { tau: f64 },
    Rm,
    Rl { step: f64 },
    Juste { kappa: f64, p_min: f64, learning_rate: LearningRate },
}

impl AlgorithmSpec {
    /// Short family name: `brd`, `fp`, `sfp`, `rm`, `rl` or `juste`.
    pub fn name(&self) -> &'static str {
        match self {
            AlgorithmSpec::Brd { .. } => "brd",
            AlgorithmSpec::Fp => "fp",
            AlgorithmSpec::Sfp { .. } => "sfp",
            AlgorithmSpec::Rm => "rm",
            AlgorithmSpec::Rl { .. } => "rl",
            AlgorithmSpec::Juste { .. } => "juste",
        }
    }

    pub fn information_model(&self) -> InformationModel {
        match self {
            AlgorithmSpec::Rl { .. } | AlgorithmSpec::Juste { .. } => InformationModel::PayoffOnly,
            _ => InformationModel::FullMonitoring,
        }
    }

    pub fn is_sequential(&self) -> bool {
        matches!(self, AlgorithmSpec::Brd { mode: BrdMode::Sequential })
    }
}

fn parse_positive(key: &str, value: &str) -> Result<f64> {
    let v: f64 = value
        .parse()
        .map_err(|_| Error::Config(format!("parameter {key}: cannot parse {value:?} as a number")))?;
    if !(v > 0.0) || !v.is_finite() {
        return Err(Error::Config(format!("parameter {key} must be positive, got {v}")));
    }
    Ok(v)
}

impl FromStr for AlgorithmSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (name, params) = match s.split_once(':') {
            Some((n, p)) => (n.trim().to_ascii_lowercase(), p.trim()),
            None => (s.to_ascii_lowercase(), ""),
        };
        let pairs: Vec<(&str, &str)> = if params.is_empty() || name == "brd" {
            Vec::new()
        } else {
            params
                .split(',')
                .map(|kv| {
                    kv.split_once('=')
                        .map(|(k, v)| (k.trim(), v.trim()))
                        .ok_or_else(|| Error::Config(format!("expected key=value in {s:?}, got {kv:?}")))
                })
                .collect::<Result<_>>()?
        };
        let unknown = |key: &str| Error::Config(format!("unknown parameter {key:?} for {name}"));
        match name.as_str() {
            "brd" => {
                let mode = match params {
                    "" | "sim" => BrdMode::Simultaneous,
                    "seq" => BrdMode::Sequential,
                    other => return Err(Error::Config(format!("brd mode must be seq or sim, got {other:?}"))),
                };
                Ok(AlgorithmSpec::Brd { mode })
            }
            "fp" | "rm" if !pairs.is_empty() => Err(unknown(pairs[0].0)),
            "fp" => Ok(AlgorithmSpec::Fp),
            "rm" => Ok(AlgorithmSpec::Rm),
            "sfp" => {
                let mut tau = DEFAULT_SFP_TAU;
                for (k, v) in pairs {
                    match k {
                        "tau" => tau = parse_positive(k, v)?,
                        _ => return Err(unknown(k)),
                    }
                }
                Ok(AlgorithmSpec::Sfp { tau })
            }
            "rl" | "crl" => {
                let mut step = DEFAULT_RL_STEP;
                for (k, v) in pairs {
                    match k {
                        "b" => step = parse_positive(k, v)?,
                        _ => return Err(unknown(k)),
                    }
                }
                if step > 1.0 {
                    return Err(Error::Config(format!("rl step b must lie in (0, 1], got {step}")));
                }
                Ok(AlgorithmSpec::Rl { step })
            }
            "juste" | "juste-rl" => {
                let mut kappa = DEFAULT_JUSTE_KAPPA;
                let mut p_min = DEFAULT_JUSTE_PMIN;
                let mut learning_rate = LearningRate::InverseCount;
                for (k, v) in pairs {
                    match k {
                        "kappa" => kappa = parse_positive(k, v)?,
                        "pmin" => p_min = parse_positive(k, v)?,
                        "lambda" => {
                            let l = parse_positive(k, v)?;
                            if l > 1.0 {
                                return Err(Error::Config(format!("lambda must lie in (0, 1], got {l}")));
                            }
                            learning_rate = LearningRate::Constant(l);
                        }
                        _ => return Err(unknown(k)),
                    }
                }
                Ok(AlgorithmSpec::Juste { kappa, p_min, learning_rate })
            }
            other => Err(Error::Config(format!("unknown algorithm {other:?}"))),
        }
    }
}

impl fmt::Display for AlgorithmSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AlgorithmSpec::Brd { mode: BrdMode::Simultaneous } => write!(f, "brd:sim"),
            AlgorithmSpec::Brd { mode: BrdMode::Sequential } => write!(f, "brd:seq"),
            AlgorithmSpec::Fp => write!(f, "fp"),
            AlgorithmSpec::Sfp { tau } => write!(f, "sfp:tau={tau}"),
            AlgorithmSpec::Rm => write!(f, "rm"),
            AlgorithmSpec::Rl { step } => write!(f, "rl:b={step}"),
            AlgorithmSpec::Juste { kappa, p_min, learning_rate } => {
                write!(f, "juste:kappa={kappa},pmin={p_min}")?;
                if let LearningRate::Constant(l) = learning_rate {
                    write!(f, ",lambda={l}")?;
                }
                Ok(())
            }
        }
    }
}

impl serde::Serialize for AlgorithmSpec {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> serde::Deserialize<'de> for AlgorithmSpec {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

/// Splits a comma-separated list of specs. A `key=value` item without an
/// algorithm name continues the previous spec, so
/// `rm,juste:kappa=0.2,pmin=0.05` yields two entries.
pub fn parse_algorithm_list(list: &str) -> Result<Vec<AlgorithmSpec>> {
    let mut items: Vec<String> = Vec::new();
    for token in list.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        match items.last_mut() {
            Some(prev) if token.contains('=') && !token.contains(':') => {
                prev.push(',');
                prev.push_str(token);
            }
            _ => items.push(token.to_string()),
        }
    }
    if items.is_empty() {
        return Err(Error::Config("empty algorithm list".into()));
    }
    items.iter().map(|s| s.parse()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_documented_forms() {
        assert_eq!("brd".parse::<AlgorithmSpec>().unwrap(), AlgorithmSpec::Brd { mode: BrdMode::Simultaneous });
        assert_eq!("brd:seq".parse::<AlgorithmSpec>().unwrap(), AlgorithmSpec::Brd { mode: BrdMode::Sequential });
        assert_eq!("sfp:tau=0.5".parse::<AlgorithmSpec>().unwrap(), AlgorithmSpec::Sfp { tau: 0.5 });
        assert_eq!("rl:b=0.2".parse::<AlgorithmSpec>().unwrap(), AlgorithmSpec::Rl { step: 0.2 });
        assert_eq!(
            "juste:kappa=0.3,pmin=0.02".parse::<AlgorithmSpec>().unwrap(),
            AlgorithmSpec::Juste { kappa: 0.3, p_min: 0.02, learning_rate: LearningRate::InverseCount }
        );
        assert_eq!("juste".parse::<AlgorithmSpec>().unwrap().to_string(), "juste:kappa=0.1,pmin=0.01");
        assert_eq!("sfp".parse::<AlgorithmSpec>().unwrap().to_string(), "sfp:tau=0.1");
    }

    #[test]
    fn rejects_bad_specs() {
        for bad in ["", "xyz", "brd:fast", "sfp:tau=0", "sfp:temp=1", "rl:b=2", "fp:x=1", "juste:kappa"] {
            assert!(bad.parse::<AlgorithmSpec>().is_err(), "{bad}");
        }
    }

    #[test]
    fn display_round_trips() {
        for s in ["brd:sim", "brd:seq", "fp", "sfp:tau=0.25", "rm", "rl:b=0.1", "juste:kappa=0.1,pmin=0.01,lambda=0.5"] {
            let spec: AlgorithmSpec = s.parse().unwrap();
            assert_eq!(spec.to_string(), s);
            assert_eq!(spec.to_string().parse::<AlgorithmSpec>().unwrap(), spec);
        }
    }

    #[test]
    fn list_parsing_keeps_parameter_commas() {
        let list = parse_algorithm_list("brd,fp,sfp,rm,rl,juste:kappa=0.2,pmin=0.05").unwrap();
        assert_eq!(list.len(), 6);
        assert_eq!(list[5], AlgorithmSpec::Juste { kappa: 0.2, p_min: 0.05, learning_rate: LearningRate::InverseCount });
        assert!(parse_algorithm_list(" , ").is_err());
    }
}
