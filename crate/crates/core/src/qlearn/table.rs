//! Action grid and the tabular Q-function, with its text file format.

use std::fmt::Write as _;
use std::path::Path;

use super::state::{StateIndex, STATE_COUNT};
use crate::error::{Error, Result};

/// Candidate correction factors.
///
/// Index 0 is always `beta = 0`, so a greedy policy over an all-zero table is
/// plain BP. The remaining values are strictly increasing.
#[derive(Debug, Clone, PartialEq)]
pub struct ActionSet {
    values: Vec<f64>,
}

impl ActionSet {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        let bad = |msg: &str| Err(Error::ActionSet(msg.to_string()));
        if values.first() != Some(&0.0) {
            return bad("first action must be 0");
        }
        if values.iter().any(|v| !(v.abs() <= 0.5)) {
            return bad("actions must lie in [-0.5, 0.5]");
        }
        let rest = &values[1..];
        if rest.contains(&0.0) || rest.windows(2).any(|w| w[0] >= w[1]) {
            return bad("actions after the first must be nonzero and strictly increasing");
        }
        Ok(ActionSet { values })
    }

    /// `0` followed by `-0.5, -0.4, ..., 0.5` without zero: 11 actions.
    pub fn standard() -> Self {
        let values = std::iter::once(0.0)
            .chain((-5i32..=5).filter(|&k| k != 0).map(|k| f64::from(k) / 10.0))
            .collect();
        ActionSet { values }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn value(&self, action: usize) -> f64 {
        self.values[action]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

impl Default for ActionSet {
    fn default() -> Self {
        Self::standard()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QTable {
    actions: ActionSet,
    q: Vec<f64>,
    visits: Vec<u64>,
}

impl QTable {
    pub fn new(actions: ActionSet) -> Self {
        let size = STATE_COUNT * actions.len();
        QTable {
            actions,
            q: vec![0.0; size],
            visits: vec![0; size],
        }
    }

    pub fn actions(&self) -> &ActionSet {
        &self.actions
    }

    pub fn num_actions(&self) -> usize {
        self.actions.len()
    }

    #[inline]
    fn at(&self, state: StateIndex, action: usize) -> usize {
        state.index() * self.actions.len() + action
    }

    pub fn q(&self, state: StateIndex, action: usize) -> f64 {
        self.q[self.at(state, action)]
    }

    pub fn set_q(&mut self, state: StateIndex, action: usize, value: f64) {
        let i = self.at(state, action);
        self.q[i] = value;
    }

    pub fn visits(&self, state: StateIndex, action: usize) -> u64 {
        self.visits[self.at(state, action)]
    }

    pub(crate) fn record_visit(&mut self, state: StateIndex, action: usize) {
        let i = self.at(state, action);
        self.visits[i] += 1;
    }

    pub fn row(&self, state: StateIndex) -> &[f64] {
        let start = state.index() * self.actions.len();
        &self.q[start..start + self.actions.len()]
    }

    pub fn max_abs_q(&self) -> f64 {
        self.q.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn total_visits(&self) -> u64 {
        self.visits.iter().sum()
    }

    /// Text serialization: a header with the action grid, then one
    /// `state action q visits` line per pair. Floats use shortest
    /// round-trip formatting.
    pub fn to_text(&self) -> String {
        let mut out = String::with_capacity(self.q.len() * 16);
        out.push_str("# qlbp q-table\n");
        let _ = writeln!(out, "states {STATE_COUNT}");
        let _ = write!(out, "actions {}", self.actions.len());
        for v in self.actions.values() {
            let _ = write!(out, " {v}");
        }
        out.push('\n');
        for s in 0..STATE_COUNT {
            for a in 0..self.actions.len() {
                let i = s * self.actions.len() + a;
                let _ = writeln!(out, "{s} {a} {} {}", self.q[i], self.visits[i]);
            }
        }
        out
    }

    /// Parses [`QTable::to_text`] output and checks it against `expected`.
    pub fn from_text(text: &str, expected: &ActionSet) -> Result<Self> {
        let err = |line: usize, msg: String| Error::TableFormat { line, msg };
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

        let (ln, states) = lines.next().ok_or_else(|| err(1, "missing `states` header".into()))?;
        match states.split_whitespace().collect::<Vec<_>>().as_slice() {
            ["states", n] if n.parse::<usize>() == Ok(STATE_COUNT) => {}
            _ => return Err(err(ln, format!("expected `states {STATE_COUNT}`"))),
        }

        let (ln, header) = lines.next().ok_or_else(|| err(ln + 1, "missing `actions` header".into()))?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        if fields.first() != Some(&"actions") || fields.len() < 2 {
            return Err(err(ln, "expected `actions <count> <values...>`".into()));
        }
        let count: usize = fields[1].parse().map_err(|_| err(ln, "bad action count".into()))?;
        if count != expected.len() {
            return Err(Error::TableShape {
                expected: expected.len(),
                found: count,
            });
        }
        let values = fields[2..]
            .iter()
            .map(|f| f.parse::<f64>().map_err(|_| err(ln, format!("bad action value `{f}`"))))
            .collect::<Result<Vec<_>>>()?;
        if values.len() != count {
            return Err(err(ln, format!("{count} actions declared, {} listed", values.len())));
        }
        if values != expected.values() {
            return Err(err(ln, "action values differ from the configured action set".into()));
        }

        let mut table = QTable::new(expected.clone());
        let mut seen = vec![false; table.q.len()];
        for (ln, line) in lines {
            let f: Vec<&str> = line.split_whitespace().collect();
            if f.len() != 4 {
                return Err(err(ln, "expected `state action q visits`".into()));
            }
            let state: usize = f[0].parse().map_err(|_| err(ln, "bad state index".into()))?;
            let action: usize = f[1].parse().map_err(|_| err(ln, "bad action index".into()))?;
            if state >= STATE_COUNT || action >= count {
                return Err(err(ln, format!("index ({state}, {action}) out of range")));
            }
            let q: f64 = f[2].parse().map_err(|_| err(ln, "bad q value".into()))?;
            if !q.is_finite() {
                return Err(err(ln, "q value not finite".into()));
            }
            let visits: u64 = f[3].parse().map_err(|_| err(ln, "bad visit count".into()))?;
            let i = state * count + action;
            if std::mem::replace(&mut seen[i], true) {
                return Err(err(ln, format!("duplicate entry ({state}, {action})")));
            }
            table.q[i] = q;
            table.visits[i] = visits;
        }
        if seen.iter().any(|s| !s) {
            return Err(err(0, "table is missing entries".into()));
        }
        Ok(table)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_text()).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>, expected: &ActionSet) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_text(&text, expected)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    #[test]
    fn standard_actions() {
        let a = ActionSet::standard();
        assert_eq!(a.len(), 11);
        assert_eq!(a.value(0), 0.0);
        assert_eq!(a.value(1), -0.5);
        assert_eq!(a.value(10), 0.5);
        assert_eq!(ActionSet::new(a.values().to_vec()).unwrap(), a);
    }

    #[test]
    fn invalid_actions() {
        assert!(ActionSet::new(vec![]).is_err());
        assert!(ActionSet::new(vec![0.1, 0.2]).is_err());
        assert!(ActionSet::new(vec![0.0, 0.6]).is_err());
        assert!(ActionSet::new(vec![0.0, 0.2, 0.1]).is_err());
        assert!(ActionSet::new(vec![0.0, -0.1, 0.0]).is_err());
    }

    #[test]
    fn roundtrip_random_table() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let mut t = QTable::new(ActionSet::standard());
        for i in 0..t.q.len() {
            t.q[i] = rng.random_range(-50.0..50.0) * rng.random::<f64>();
            t.visits[i] = rng.random_range(0..1_000_000);
        }
        let back = QTable::from_text(&t.to_text(), &ActionSet::standard()).unwrap();
        assert_eq!(back, t);
    }

    #[test]
    fn roundtrip_empty_table_through_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("q.txt");
        let t = QTable::new(ActionSet::standard());
        t.save(&path).unwrap();
        assert_eq!(QTable::load(&path, &ActionSet::standard()).unwrap(), t);
        assert!(QTable::load(dir.path().join("missing"), &ActionSet::standard()).is_err());
    }

    #[test]
    fn rejects_wrong_action_count() {
        let small = ActionSet::new(vec![0.0, -0.5, -0.25, 0.25, 0.5]).unwrap();
        let text = QTable::new(small).to_text();
        match QTable::from_text(&text, &ActionSet::standard()) {
            Err(Error::TableShape { expected: 11, found: 5 }) => {}
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn rejects_malformed_entries() {
        let good = QTable::new(ActionSet::standard()).to_text();
        let std = ActionSet::standard();
        let out_of_range = good.replacen("\n0 0 0 0\n", "\n384 0 0 0\n", 1);
        assert!(QTable::from_text(&out_of_range, &std).is_err());
        let garbage = good.replacen("\n0 0 0 0\n", "\n0 0 zero 0\n", 1);
        assert!(QTable::from_text(&garbage, &std).is_err());
        let truncated: String = good.lines().take(100).map(|l| format!("{l}\n")).collect();
        assert!(QTable::from_text(&truncated, &std).is_err());
        assert!(QTable::from_text("", &std).is_err());
    }
}
