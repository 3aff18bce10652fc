//! Flat `key = value` configuration files.
//!
//! One entry per line, `#` starts a comment, lists are comma separated.
//! Each consumer takes the keys it understands and rejects the rest.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::mechanism::{StepScale, WeightScheme};
use crate::noise::{PopulationMix, SamplingScope};
use crate::types::Params;

#[derive(Debug, Clone, Default)]
pub struct KeyValues {
    entries: BTreeMap<String, (usize, String)>,
}

impl KeyValues {
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let Some((key, value)) = content.split_once('=') else {
                return Err(Error::Config { line, message: format!("expected `key = value`, got `{content}`") });
            };
            let key = key.trim().to_string();
            if key.is_empty() {
                return Err(Error::Config { line, message: "empty key".into() });
            }
            if entries.insert(key.clone(), (line, value.trim().to_string())).is_some() {
                return Err(Error::Config { line, message: format!("duplicate key `{key}`") });
            }
        }
        Ok(KeyValues { entries })
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    /// Removes and parses `key`.
    pub fn take<T: FromStr>(&mut self, key: &str) -> Result<Option<T>> {
        match self.entries.remove(key) {
            None => Ok(None),
            Some((line, value)) => value
                .parse()
                .map(Some)
                .map_err(|_| Error::Config { line, message: format!("cannot parse `{value}` for `{key}`") }),
        }
    }

    /// Removes and parses a comma-separated list.
    pub fn take_list<T: FromStr>(&mut self, key: &str) -> Result<Option<Vec<T>>> {
        match self.entries.remove(key) {
            None => Ok(None),
            Some((line, value)) => value
                .split(',')
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .map(|item| {
                    item.parse()
                        .map_err(|_| Error::Config { line, message: format!("cannot parse `{item}` in `{key}`") })
                })
                .collect::<Result<Vec<T>>>()
                .map(Some),
        }
    }

    /// Fails on the first key nobody consumed.
    pub fn finish(self) -> Result<()> {
        match self.entries.into_iter().next() {
            None => Ok(()),
            Some((key, (line, _))) => Err(Error::Config { line, message: format!("unknown key `{key}`") }),
        }
    }
}

pub const DEFAULT_TRIALS: usize = 1000;
pub const DEFAULT_SEED: u64 = 1;
/// Quota slack used by sweeps unless configured otherwise. With `epsilon = 0`
/// the n=200, k=40, m=7 setting selects about 35 agents even from noise-free
/// reviews.
pub const DEFAULT_EPSILON: f64 = 0.1;

/// A simulation sweep: one cell per accurate-reviewer share, every scheme
/// evaluated on the same simulated instances.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub params: Params,
    pub shares: Vec<f64>,
    pub phi_accurate: f64,
    pub phi_inaccurate: f64,
    pub schemes: Vec<WeightScheme>,
    pub scope: SamplingScope,
    pub trials: usize,
    pub seed: u64,
    pub out: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            params: Params { n: 200, k: 40, m: 7, epsilon: DEFAULT_EPSILON },
            shares: (1..=9).map(|i| i as f64 / 10.0).collect(),
            phi_accurate: 0.5,
            phi_inaccurate: 1.0,
            schemes: WeightScheme::all_default(),
            scope: SamplingScope::default(),
            trials: DEFAULT_TRIALS,
            seed: DEFAULT_SEED,
            out: None,
        }
    }
}

impl ExperimentConfig {
    pub fn from_key_values(mut kv: KeyValues) -> Result<Self> {
        let mut cfg = ExperimentConfig::default();
        let p = &mut cfg.params;
        p.n = kv.take("n")?.unwrap_or(p.n);
        p.k = kv.take("k")?.unwrap_or(p.k);
        p.m = kv.take("m")?.unwrap_or(p.m);
        p.epsilon = kv.take("epsilon")?.unwrap_or(p.epsilon);
        cfg.shares = kv.take_list("share_accurate")?.unwrap_or(cfg.shares);
        cfg.phi_accurate = kv.take("phi_accurate")?.unwrap_or(cfg.phi_accurate);
        cfg.phi_inaccurate = kv.take("phi_inaccurate")?.unwrap_or(cfg.phi_inaccurate);
        cfg.schemes = kv.take_list("schemes")?.unwrap_or(cfg.schemes);

        let gamma: Option<f64> = kv.take("gamma")?;
        let delta: Option<f64> = kv.take("delta")?;
        let t1: Option<f64> = kv.take("t1")?;
        let t2: Option<f64> = kv.take("t2")?;
        let step_scale: Option<StepScale> = kv.take("step_scale")?;
        for s in &mut cfg.schemes {
            match s {
                WeightScheme::Distance { gamma: g } => *g = gamma.unwrap_or(*g),
                WeightScheme::MajorityErrors { delta: d } => *d = delta.unwrap_or(*d),
                WeightScheme::Step { t1: a, t2: b, scale } => {
                    *a = t1.unwrap_or(*a);
                    *b = t2.unwrap_or(*b);
                    *scale = step_scale.unwrap_or(*scale);
                }
                WeightScheme::Unit => {}
            }
        }

        cfg.scope = kv.take("sampling_scope")?.unwrap_or(cfg.scope);
        cfg.trials = kv.take("trials")?.unwrap_or(cfg.trials);
        cfg.seed = kv.take("seed")?.unwrap_or(cfg.seed);
        cfg.out = kv.take::<String>("out")?.map(PathBuf::from).or(cfg.out);
        kv.finish()?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        if self.trials == 0 {
            return Err(Error::InvalidParams("trials must be at least 1".into()));
        }
        if self.schemes.is_empty() {
            return Err(Error::InvalidParams("at least one weighting scheme is required".into()));
        }
        if self.shares.is_empty() {
            return Err(Error::InvalidParams("at least one accurate-reviewer share is required".into()));
        }
        for s in &self.schemes {
            s.validate()?;
        }
        for &share in &self.shares {
            PopulationMix::new(share, self.phi_accurate, self.phi_inaccurate)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_full_config() {
        let text = "\
# adversarial sweep
n = 100
k = 20
m = 5
share_accurate = 0.5, 0.75 # two cells
phi_accurate = 0.8
phi_inaccurate = 1.2
schemes = unit, distance:4, step
t1 = 0.2
sampling_scope = pool
trials = 10
seed = 99
";
        let cfg = ExperimentConfig::from_key_values(KeyValues::parse(text).unwrap()).unwrap();
        assert_eq!(cfg.params, Params { n: 100, k: 20, m: 5, epsilon: DEFAULT_EPSILON });
        assert_eq!(cfg.scope, SamplingScope::Pool);
        assert_eq!(cfg.shares, vec![0.5, 0.75]);
        assert_eq!(cfg.schemes[1], WeightScheme::Distance { gamma: 4.0 });
        assert_eq!(cfg.schemes[2], WeightScheme::Step { t1: 0.2, t2: 0.6, scale: StepScale::PopulationRatio });
        assert_eq!(cfg.trials, 10);
        assert_eq!(cfg.seed, 99);
    }

    #[test]
    fn rejects_unknown_and_duplicate_keys() {
        let err = ExperimentConfig::from_key_values(KeyValues::parse("n = 10\nfoo = 1\n").unwrap()).unwrap_err();
        assert!(matches!(err, Error::Config { line: 2, .. }), "{err}");
        assert!(KeyValues::parse("n = 1\nn = 2").is_err());
        assert!(KeyValues::parse("just words").is_err());
    }

    #[test]
    fn rejects_bad_values() {
        assert!(ExperimentConfig::from_key_values(KeyValues::parse("trials = 0").unwrap()).is_err());
        assert!(ExperimentConfig::from_key_values(KeyValues::parse("share_accurate = 1.5").unwrap()).is_err());
        assert!(ExperimentConfig::from_key_values(KeyValues::parse("n = ten").unwrap()).is_err());
        assert!(ExperimentConfig::from_key_values(KeyValues::parse("schemes = borda").unwrap()).is_err());
    }
}
