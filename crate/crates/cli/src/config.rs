//! JSON configuration and flag overrides.

use std::collections::BTreeMap;
use std::path::Path;

use serde::Deserialize;

use oscibo_core::harmonic::HarmonicPotential;
use oscibo_core::state::min_dimension;
use oscibo_core::{SymmetricPairMap, SystemSpec};

use crate::error::CliError;

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub n: Option<usize>,
    pub d: Option<usize>,
    pub masses: Option<Vec<f64>>,
    pub omega: Option<f64>,
    /// Keys `"i-j"` with 1-based labels.
    pub nu: Option<BTreeMap<String, f64>>,
    pub m: Option<f64>,
    #[serde(rename = "K1")]
    pub k1: Option<f64>,
    #[serde(rename = "K2")]
    pub k2: Option<f64>,
    /// Newton iteration cap for generic systems.
    pub max_iterations: Option<usize>,
    pub sweep: Option<SweepFile>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepFile {
    pub quantity: Option<String>,
    pub axis: Option<String>,
    pub from: Option<f64>,
    pub to: Option<f64>,
    pub points: Option<usize>,
    pub spacing: Option<String>,
    pub dims: Option<Vec<usize>>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }
}

/// Values given on the command line; each replaces the file value.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub n: Option<usize>,
    pub d: Option<usize>,
    pub masses: Option<Vec<f64>>,
    pub omega: Option<f64>,
    pub m: Option<f64>,
    pub k1: Option<f64>,
    pub k2: Option<f64>,
    pub max_iterations: Option<usize>,
}

impl FileConfig {
    pub fn apply(mut self, o: &Overrides) -> Self {
        macro_rules! take {
            ($($f:ident),*) => { $( if o.$f.is_some() { self.$f = o.$f.clone(); } )* };
        }
        take!(n, d, masses, omega, m, k1, k2, max_iterations);
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoHeavyParams {
    pub n: usize,
    pub d: usize,
    pub m: f64,
    pub k1: f64,
    pub k2: f64,
}

#[derive(Debug, Clone)]
pub enum System {
    Generic(HarmonicPotential),
    TwoHeavy(TwoHeavyParams),
}

fn default_dimension(n: usize) -> usize {
    min_dimension(n).max(3)
}

/// `"i-j"` with `1 ≤ i < j ≤ n` (either order accepted).
pub fn parse_pair_key(key: &str, n: usize) -> Result<(usize, usize), CliError> {
    let bad = || CliError::Config(format!("invalid pair key {key:?}; expected \"i-j\" with 1 <= i, j <= {n}"));
    let (a, b) = key.split_once('-').ok_or_else(bad)?;
    let i: usize = a.trim().parse().map_err(|_| bad())?;
    let j: usize = b.trim().parse().map_err(|_| bad())?;
    if i == 0 || j == 0 || i > n || j > n || i == j {
        return Err(bad());
    }
    Ok((i.min(j) - 1, i.max(j) - 1))
}

pub fn pair_key(i: usize, j: usize) -> String {
    format!("{}-{}", i + 1, j + 1)
}

impl FileConfig {
    /// Generic when a `nu` map is present, two-heavy shorthand otherwise.
    pub fn system(&self) -> Result<System, CliError> {
        if let Some(nu) = &self.nu {
            let masses = self
                .masses
                .clone()
                .ok_or_else(|| CliError::Config("a nu map requires masses".into()))?;
            let n = masses.len();
            if let Some(cn) = self.n {
                if cn != n {
                    return Err(CliError::Config(format!("n = {cn} but {n} masses given")));
                }
            }
            let d = self.d.unwrap_or_else(|| default_dimension(n));
            let spec = SystemSpec::new(d, masses, self.omega.unwrap_or(1.0)).map_err(CliError::from_core)?;
            let mut map = SymmetricPairMap::zeros(n);
            for (key, &value) in nu {
                let (i, j) = parse_pair_key(key, n)?;
                map.set(i, j, value);
            }
            let potential = HarmonicPotential::new(spec, map).map_err(CliError::from_core)?;
            return Ok(System::Generic(potential));
        }
        if self.masses.is_some() {
            return Err(CliError::Config("masses given without a nu map".into()));
        }
        let n = self.n.ok_or_else(|| CliError::Config("missing n".into()))?;
        let m = self.m.ok_or_else(|| CliError::Config("missing light mass m".into()))?;
        let k2 = self.k2.ok_or_else(|| CliError::Config("missing K2".into()))?;
        let k1 = match (self.k1, n) {
            (Some(k1), _) => k1,
            (None, 3) => 0.0,
            (None, _) => return Err(CliError::Config("missing K1".into())),
        };
        if let Some(omega) = self.omega {
            if omega != 1.0 {
                return Err(CliError::Config("the two-heavy family is defined at omega = 1".into()));
            }
        }
        Ok(System::TwoHeavy(TwoHeavyParams {
            n,
            d: self.d.unwrap_or_else(|| default_dimension(n)),
            m,
            k1,
            k2,
        }))
    }

    pub fn two_heavy(&self) -> Result<TwoHeavyParams, CliError> {
        match self.system()? {
            System::TwoHeavy(p) => Ok(p),
            System::Generic(_) => Err(CliError::Config("this command needs the two-heavy shorthand (n, m, K1, K2)".into())),
        }
    }
}
