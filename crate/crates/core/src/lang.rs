use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::Error;

/// Languages handled by the tokenizers and language identifier.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Lang {
    En,
    Km,
    Ps,
}

impl Lang {
    pub fn code(self) -> &'static str {
        match self {
            Lang::En => "en",
            Lang::Km => "km",
            Lang::Ps => "ps",
        }
    }
}

impl fmt::Display for Lang {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

impl FromStr for Lang {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "en" => Ok(Lang::En),
            "km" => Ok(Lang::Km),
            "ps" => Ok(Lang::Ps),
            other => Err(Error::Config(format!("unsupported language `{other}`"))),
        }
    }
}

/// Supported language pairs. The non-English language is always the source
/// side; English is the target side and carries the word budget.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LangPair {
    #[serde(rename = "km-en")]
    KmEn,
    #[serde(rename = "ps-en")]
    PsEn,
}

impl LangPair {
    pub fn src(self) -> Lang {
        match self {
            LangPair::KmEn => Lang::Km,
            LangPair::PsEn => Lang::Ps,
        }
    }

    pub fn tgt(self) -> Lang {
        Lang::En
    }
}

impl fmt::Display for LangPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.src(), self.tgt())
    }
}

impl FromStr for LangPair {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "km-en" => Ok(LangPair::KmEn),
            "ps-en" => Ok(LangPair::PsEn),
            other => Err(Error::Config(format!("unsupported language pair `{other}`"))),
        }
    }
}
