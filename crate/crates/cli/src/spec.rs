//! Problem files.
//!
//! ```toml
//! [group]
//! rank = 2
//!
//! [psi]
//! a = "a"
//! b = "abA"
//!
//! [psi_inv]
//! a = "a"
//! b = "Aba"
//!
//! [subgroup]
//! words = ["b"]
//!
//! [config]
//! max_level = 10
//! power = 1
//! ```

use std::collections::BTreeMap;

use serde::Deserialize;
use triplefold::pipeline::PhiSpec;
use triplefold::words::{Automorphism, Letter, Word};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpec {
    group: RawGroup,
    psi: BTreeMap<String, String>,
    psi_inv: BTreeMap<String, String>,
    #[serde(default)]
    subgroup: RawSubgroup,
    #[serde(default)]
    config: Config,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGroup {
    rank: usize,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSubgroup {
    #[serde(default)]
    words: Vec<String>,
}

#[derive(Debug, Default, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub max_level: Option<usize>,
    pub budget: Option<usize>,
    pub power: Option<usize>,
    pub max_power: Option<usize>,
    pub phi: Option<Vec<String>>,
    pub phi_inv: Option<Vec<String>>,
}

#[derive(Debug, Clone)]
pub struct ProblemSpec {
    pub psi: Automorphism,
    pub words: Vec<Word>,
    pub config: Config,
}

fn table(rank: usize, raw: &BTreeMap<String, String>, section: &str) -> Result<Vec<Word>, String> {
    let mut out = vec![None; rank];
    for (key, value) in raw {
        let mut chars = key.chars();
        let letter = match (chars.next(), chars.next()) {
            (Some(c), None) => Letter::from_char(c).ok().filter(|l| !l.inverse && l.index() < rank),
            _ => None,
        };
        let Some(letter) = letter else {
            return Err(format!("[{section}]: `{key}` is not a generator of rank {rank}"));
        };
        let w = Word::parse_in(value, rank).map_err(|e| format!("[{section}] {key}: {e}"))?;
        out[letter.index()] = Some(w);
    }
    out.into_iter()
        .enumerate()
        .map(|(g, w)| w.ok_or_else(|| format!("[{section}]: no image for {}", Letter::positive(g))))
        .collect()
}

impl ProblemSpec {
    pub fn parse(text: &str) -> Result<ProblemSpec, String> {
        let raw: RawSpec = toml::from_str(text).map_err(|e| e.to_string())?;
        let rank = raw.group.rank;
        let psi = Automorphism::new(table(rank, &raw.psi, "psi")?, table(rank, &raw.psi_inv, "psi_inv")?)
            .map_err(|e| e.to_string())?;
        let words = raw
            .subgroup
            .words
            .iter()
            .map(|s| Word::parse_in(s, rank).map_err(|e| format!("[subgroup] {s}: {e}")))
            .collect::<Result<_, _>>()?;
        if raw.config.phi.is_some() != raw.config.phi_inv.is_some() {
            return Err("[config]: phi and phi_inv must be given together".into());
        }
        Ok(ProblemSpec { psi, words, config: raw.config })
    }

    /// The configured `φ`, or the standard one of rank `max(3, c0)`.
    pub fn phi(&self, c0: usize) -> Result<Result<PhiSpec, String>, String> {
        match (&self.config.phi, &self.config.phi_inv) {
            (Some(f), Some(b)) => {
                let f: Vec<&str> = f.iter().map(String::as_str).collect();
                let b: Vec<&str> = b.iter().map(String::as_str).collect();
                let phi = Automorphism::parse(&f, &b).map_err(|e| format!("[config] phi: {e}"))?;
                Ok(PhiSpec::new(phi).map_err(|e| e.to_string()))
            }
            _ => Ok(PhiSpec::default_for(c0).map_err(|e| e.to_string())),
        }
    }
}
