use std::str::FromStr;

use lpcrit::function_model::{Profile, TestFunction1D};
use serde::{Deserialize, Deserializer};

/// A one-dimensional test function, written `box:0:1`, `power:2@0.5`, ... on the
/// command line or as `{"kind": "box", "lo": 0, "hi": 1}` in a config file.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FnSpec {
    pub profile: Profile,
    pub scale: f64,
}

#[derive(Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum ProfileJson {
    Box {
        lo: f64,
        hi: f64,
        #[serde(default)]
        scale: Option<f64>,
    },
    Power {
        exponent: f64,
        #[serde(default)]
        scale: Option<f64>,
    },
    Reciprocal {
        #[serde(default)]
        scale: Option<f64>,
    },
    Constant {
        value: f64,
    },
}

impl FnSpec {
    pub fn build(&self) -> lpcrit::Result<TestFunction1D> {
        let f = TestFunction1D::new(self.profile)?;
        if self.scale == 1.0 {
            Ok(f)
        } else {
            f.dilate(self.scale)
        }
    }
}

fn number(tok: &str, what: &str) -> Result<f64, String> {
    tok.trim()
        .parse::<f64>()
        .map_err(|_| format!("{what}: `{tok}` is not a number"))
}

impl FromStr for FnSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (body, scale) = match s.split_once('@') {
            Some((b, sc)) => (b, number(sc, "scale")?),
            None => (s, 1.0),
        };
        let parts: Vec<&str> = body.split(':').collect();
        let profile = match parts.as_slice() {
            ["box", lo, hi] => Profile::Box {
                lo: number(lo, "box")?,
                hi: number(hi, "box")?,
            },
            ["power", q] => Profile::PowerProfile {
                exponent: number(q, "power")?,
            },
            ["reciprocal"] => Profile::TruncatedReciprocal,
            ["const", v] => Profile::Constant {
                value: number(v, "const")?,
            },
            _ => {
                return Err(format!(
                    "unknown function `{s}`; expected box:LO:HI, power:Q, reciprocal or const:V"
                ))
            }
        };
        Ok(FnSpec { profile, scale })
    }
}

impl<'de> Deserialize<'de> for FnSpec {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Either {
            Text(String),
            Object(ProfileJson),
        }
        match Either::deserialize(d)? {
            Either::Text(s) => s.parse().map_err(serde::de::Error::custom),
            Either::Object(p) => Ok(match p {
                ProfileJson::Box { lo, hi, scale } => FnSpec {
                    profile: Profile::Box { lo, hi },
                    scale: scale.unwrap_or(1.0),
                },
                ProfileJson::Power { exponent, scale } => FnSpec {
                    profile: Profile::PowerProfile { exponent },
                    scale: scale.unwrap_or(1.0),
                },
                ProfileJson::Reciprocal { scale } => FnSpec {
                    profile: Profile::TruncatedReciprocal,
                    scale: scale.unwrap_or(1.0),
                },
                ProfileJson::Constant { value } => FnSpec {
                    profile: Profile::Constant { value },
                    scale: 1.0,
                },
            }),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_text_forms() {
        let f: FnSpec = "box:-1:2".parse().unwrap();
        assert_eq!(f.profile, Profile::Box { lo: -1.0, hi: 2.0 });
        let g: FnSpec = "power:2@0.5".parse().unwrap();
        assert_eq!(g.scale, 0.5);
        assert!("box:1".parse::<FnSpec>().is_err());
        assert!("gauss:1".parse::<FnSpec>().is_err());
    }

    #[test]
    fn parses_json_forms() {
        let f: FnSpec = serde_json::from_str(r#"{"kind": "box", "lo": 0, "hi": 1}"#).unwrap();
        assert_eq!(f.profile, Profile::Box { lo: 0.0, hi: 1.0 });
        let g: FnSpec = serde_json::from_str(r#""reciprocal""#).unwrap();
        assert_eq!(g.profile, Profile::TruncatedReciprocal);
    }
}
