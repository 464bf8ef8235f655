//! Experiment description and its `key=value` file format.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::code::DEFAULT_DESIGN_EBN0_DB;
use crate::error::{Error, Result};
use crate::qlearn::{ActionSet, AgentParams, Rewards};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DecoderKind {
    Sc,
    Scl,
    Bp,
    Ebp,
    Qlbp,
}

impl DecoderKind {
    pub const ALL: [DecoderKind; 5] = [
        DecoderKind::Sc,
        DecoderKind::Scl,
        DecoderKind::Bp,
        DecoderKind::Ebp,
        DecoderKind::Qlbp,
    ];

    pub fn name(self) -> &'static str {
        match self {
            DecoderKind::Sc => "sc",
            DecoderKind::Scl => "scl",
            DecoderKind::Bp => "bp",
            DecoderKind::Ebp => "ebp",
            DecoderKind::Qlbp => "qlbp",
        }
    }

    pub fn is_iterative(self) -> bool {
        matches!(self, DecoderKind::Bp | DecoderKind::Ebp | DecoderKind::Qlbp)
    }
}

impl fmt::Display for DecoderKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for DecoderKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        DecoderKind::ALL
            .into_iter()
            .find(|d| d.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown decoder `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub n: usize,
    pub k: usize,
    pub decoder: DecoderKind,
    pub list_size: Option<usize>,
    pub t_max: usize,
    pub early_stop: bool,
    pub beta: Option<f64>,
    pub qtable_path: Option<PathBuf>,
    pub alpha: f64,
    pub gamma: f64,
    pub epsilon: f64,
    pub train_frames: u64,
    pub train_ebn0_db: f64,
    pub ebn0_points: Vec<f64>,
    pub max_frames: u64,
    /// Stop a point after this many frame errors; 0 disables the rule.
    pub min_frame_errors: u64,
    pub seed: u64,
    pub design_ebn0_db: f64,
    pub workers: usize,
}

impl Default for SimConfig {
    fn default() -> Self {
        let agent = AgentParams::default();
        SimConfig {
            n: 256,
            k: 128,
            decoder: DecoderKind::Bp,
            list_size: None,
            t_max: 60,
            early_stop: true,
            beta: None,
            qtable_path: None,
            alpha: agent.alpha,
            gamma: agent.gamma,
            epsilon: agent.epsilon,
            train_frames: 100_000,
            train_ebn0_db: 2.0,
            ebn0_points: vec![1.0, 1.5, 2.0, 2.5, 3.0],
            max_frames: 100_000,
            min_frame_errors: 100,
            seed: 1,
            design_ebn0_db: DEFAULT_DESIGN_EBN0_DB,
            workers: 1,
        }
    }
}

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::Config(format!("bad value `{value}` for `{key}`")))
}

fn parse_opt<T: FromStr>(key: &str, value: &str) -> Result<Option<T>> {
    if value == "none" {
        Ok(None)
    } else {
        parse(key, value).map(Some)
    }
}

fn fmt_opt<T: fmt::Display>(v: &Option<T>) -> String {
    v.as_ref().map_or_else(|| "none".to_string(), |x| x.to_string())
}

impl SimConfig {
    /// Sets one field from its textual form.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let value = value.trim();
        match key.trim() {
            "n" => self.n = parse(key, value)?,
            "k" => self.k = parse(key, value)?,
            "decoder" => self.decoder = value.parse()?,
            "list_size" => self.list_size = parse_opt(key, value)?,
            "t_max" => self.t_max = parse(key, value)?,
            "early_stop" => self.early_stop = parse(key, value)?,
            "beta" => self.beta = parse_opt(key, value)?,
            "qtable_path" => self.qtable_path = parse_opt(key, value)?,
            "alpha" => self.alpha = parse(key, value)?,
            "gamma" => self.gamma = parse(key, value)?,
            "epsilon" => self.epsilon = parse(key, value)?,
            "train_frames" => self.train_frames = parse(key, value)?,
            "train_ebn0_db" => self.train_ebn0_db = parse(key, value)?,
            "ebn0_points" => {
                self.ebn0_points = value
                    .split(',')
                    .filter(|s| !s.trim().is_empty())
                    .map(|s| parse(key, s.trim()))
                    .collect::<Result<_>>()?
            }
            "max_frames" => self.max_frames = parse(key, value)?,
            "min_frame_errors" => self.min_frame_errors = parse(key, value)?,
            "seed" => self.seed = parse(key, value)?,
            "design_ebn0_db" => self.design_ebn0_db = parse(key, value)?,
            "workers" => self.workers = parse(key, value)?,
            other => return Err(Error::Config(format!("unknown key `{other}`"))),
        }
        Ok(())
    }

    /// Defaults overridden by `key=value` lines; `#` starts a comment.
    pub fn from_kv_str(text: &str) -> Result<Self> {
        let mut config = SimConfig::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| Error::Format {
                line: i + 1,
                msg: format!("expected `key=value`, found `{line}`"),
            })?;
            config.set(key, value)?;
        }
        Ok(config)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_kv_str(&text)
    }

    /// Every field as `key=value`, in a stable order readable by
    /// [`SimConfig::from_kv_str`].
    pub fn to_kv_lines(&self) -> Vec<String> {
        let points: Vec<String> = self.ebn0_points.iter().map(|p| p.to_string()).collect();
        vec![
            format!("n={}", self.n),
            format!("k={}", self.k),
            format!("decoder={}", self.decoder),
            format!("list_size={}", fmt_opt(&self.list_size)),
            format!("t_max={}", self.t_max),
            format!("early_stop={}", self.early_stop),
            format!("beta={}", fmt_opt(&self.beta)),
            format!(
                "qtable_path={}",
                fmt_opt(&self.qtable_path.as_ref().map(|p| p.display().to_string()))
            ),
            format!("alpha={}", self.alpha),
            format!("gamma={}", self.gamma),
            format!("epsilon={}", self.epsilon),
            format!("train_frames={}", self.train_frames),
            format!("train_ebn0_db={}", self.train_ebn0_db),
            format!("ebn0_points={}", points.join(",")),
            format!("max_frames={}", self.max_frames),
            format!("min_frame_errors={}", self.min_frame_errors),
            format!("seed={}", self.seed),
            format!("design_ebn0_db={}", self.design_ebn0_db),
            format!("workers={}", self.workers),
        ]
    }

    pub fn agent_params(&self) -> AgentParams {
        AgentParams {
            alpha: self.alpha,
            gamma: self.gamma,
            epsilon: self.epsilon,
            rewards: Rewards::default(),
            actions: ActionSet::standard(),
        }
    }

    /// Checks field ranges and that decoder-specific knobs are only given to
    /// the decoder that uses them.
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if !self.n.is_power_of_two() {
            return bad(format!("n={} is not a power of two", self.n));
        }
        if self.k > self.n {
            return bad(format!("k={} exceeds n={}", self.k, self.n));
        }
        if self.max_frames == 0 {
            return bad("max_frames must be at least 1".into());
        }
        if self.ebn0_points.is_empty() {
            return bad("ebn0_points is empty".into());
        }
        if self.t_max == 0 {
            return bad("t_max must be at least 1".into());
        }
        if self.workers == 0 {
            return bad("workers must be at least 1".into());
        }
        if self.list_size.is_some() && self.decoder != DecoderKind::Scl {
            return bad(format!("list_size given to decoder {}", self.decoder));
        }
        if self.beta.is_some() && self.decoder != DecoderKind::Ebp {
            return bad(format!("beta given to decoder {}", self.decoder));
        }
        if self.qtable_path.is_some() && self.decoder != DecoderKind::Qlbp {
            return bad(format!("qtable_path given to decoder {}", self.decoder));
        }
        if let Some(b) = self.beta {
            crate::enhanced::check_beta(b)?;
        }
        if let Some(l) = self.list_size {
            if l == 0 || !l.is_power_of_two() {
                return Err(Error::ListSize(l));
            }
        }
        if let Some(p) = &self.qtable_path {
            if !p.exists() {
                return bad(format!("q-table {} does not exist", p.display()));
            }
        }
        self.agent_params().validate()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kv_roundtrip() {
        let mut c = SimConfig::default();
        c.decoder = DecoderKind::Scl;
        c.list_size = Some(8);
        c.ebn0_points = vec![1.0, 1.25, 2.0];
        let text = c.to_kv_lines().join("\n");
        assert_eq!(SimConfig::from_kv_str(&text).unwrap(), c);
    }

    #[test]
    fn comments_and_errors() {
        let c = SimConfig::from_kv_str("# header\nn=64 # short\n\nk = 32\n").unwrap();
        assert_eq!((c.n, c.k), (64, 32));
        assert!(SimConfig::from_kv_str("n").is_err());
        assert!(SimConfig::from_kv_str("bogus=1").is_err());
        assert!(SimConfig::from_kv_str("n=x").is_err());
        assert!(SimConfig::from_kv_str("decoder=ldpc").is_err());
    }

    #[test]
    fn validation() {
        assert!(SimConfig::default().validate().is_ok());
        let mut c = SimConfig::default();
        c.decoder = DecoderKind::Sc;
        c.beta = Some(0.1);
        assert!(c.validate().is_err());
        c = SimConfig::default();
        c.list_size = Some(4);
        assert!(c.validate().is_err());
        c.decoder = DecoderKind::Scl;
        assert!(c.validate().is_ok());
        c.list_size = Some(3);
        assert!(c.validate().is_err());
        c = SimConfig::default();
        c.decoder = DecoderKind::Qlbp;
        c.qtable_path = Some("/definitely/not/here".into());
        assert!(c.validate().is_err());
        c = SimConfig::default();
        c.max_frames = 0;
        assert!(c.validate().is_err());
        c = SimConfig::default();
        c.ebn0_points.clear();
        assert!(c.validate().is_err());
        c = SimConfig::default();
        c.decoder = DecoderKind::Ebp;
        c.beta = Some(0.7);
        assert!(c.validate().is_err());
    }
}
