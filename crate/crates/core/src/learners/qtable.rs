use std::io::{BufRead, Write};

use rustc_hash::FxHashMap;

use crate::env::StateKey;
use crate::error::{Error, Result};

/// Sparse action-value table.
///
/// Rows are allocated on first write, one contiguous row of `width` values per
/// visited state. Reads of absent entries return `default_value` exactly.
#[derive(Debug, Clone)]
pub struct QTable {
    width: usize,
    default_value: f64,
    index: FxHashMap<StateKey, u32>,
    values: Vec<f64>,
}

impl QTable {
    pub fn new(width: usize) -> Self {
        Self::with_default(width, 0.0)
    }

    pub fn with_default(width: usize, default_value: f64) -> Self {
        assert!(width > 0, "row width must be positive");
        QTable {
            width,
            default_value,
            index: FxHashMap::default(),
            values: Vec::new(),
        }
    }

    /// Number of actions per state row.
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn default_value(&self) -> f64 {
        self.default_value
    }

    /// Number of states with an allocated row.
    pub fn state_count(&self) -> usize {
        self.index.len()
    }

    /// Number of explicitly stored (state, action) entries.
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    #[inline]
    pub fn row(&self, state: StateKey) -> Option<&[f64]> {
        self.index.get(&state).map(|&i| {
            let start = i as usize * self.width;
            &self.values[start..start + self.width]
        })
    }

    #[inline]
    pub fn get(&self, state: StateKey, action: usize) -> f64 {
        debug_assert!(action < self.width);
        self.row(state).map_or(self.default_value, |r| r[action])
    }

    /// Mutable row for `state`, allocating a default row if needed.
    #[inline]
    pub fn row_mut(&mut self, state: StateKey) -> &mut [f64] {
        let next = (self.values.len() / self.width) as u32;
        let i = *self.index.entry(state).or_insert_with(|| {
            self.values.resize(self.values.len() + self.width, self.default_value);
            next
        }) as usize;
        &mut self.values[i * self.width..(i + 1) * self.width]
    }

    pub fn set(&mut self, state: StateKey, action: usize, value: f64) {
        self.row_mut(state)[action] = value;
    }

    /// Maximum over `actions` of `Q(state, .)`; absent rows read as the default.
    #[inline]
    pub fn max_over(&self, state: StateKey, actions: &[u32]) -> f64 {
        match self.row(state) {
            None => self.default_value,
            Some(row) => actions
                .iter()
                .map(|&a| row[a as usize])
                .fold(f64::NEG_INFINITY, f64::max),
        }
    }

    #[inline]
    pub fn max(&self, state: StateKey) -> f64 {
        match self.row(state) {
            None => self.default_value,
            Some(row) => row.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        }
    }

    /// Rows sorted by state key.
    pub fn sorted_rows(&self) -> Vec<(StateKey, &[f64])> {
        let mut keys: Vec<_> = self.index.keys().copied().collect();
        keys.sort_unstable();
        keys.into_iter()
            .map(|k| (k, self.row(k).expect("indexed row")))
            .collect()
    }

    /// Writes a text snapshot: a `#`-prefixed header followed by one
    /// `state_key_hex,action,value` record per stored entry, keys ascending.
    pub fn write_snapshot<W: Write>(&self, descriptor: &str, mut out: W) -> std::io::Result<()> {
        writeln!(out, "# gridpursuit-qtable {}", env!("CARGO_PKG_VERSION"))?;
        writeln!(out, "# condition {descriptor}")?;
        writeln!(out, "# width {}", self.width)?;
        writeln!(out, "# entries {}", self.len())?;
        for (key, row) in self.sorted_rows() {
            for (a, v) in row.iter().enumerate() {
                writeln!(out, "{:016x},{a},{v}", key.0)?;
            }
        }
        Ok(())
    }

    /// Parses a snapshot written by [`QTable::write_snapshot`]. Returns the
    /// table and the condition descriptor.
    pub fn read_snapshot<R: BufRead>(input: R) -> Result<(QTable, String)> {
        let bad = |reason: String| Error::Parse(format!("q-table snapshot: {reason}"));
        let mut descriptor = String::new();
        let mut width = None;
        let mut declared = None;
        let mut table: Option<QTable> = None;
        let mut records = 0usize;
        for line in input.lines() {
            let line = line.map_err(|e| bad(e.to_string()))?;
            if let Some(header) = line.strip_prefix("# ") {
                let (name, value) = header.split_once(' ').unwrap_or((header, ""));
                match name {
                    "condition" => descriptor = value.to_string(),
                    "width" => width = Some(value.parse::<usize>().map_err(|e| bad(e.to_string()))?),
                    "entries" => declared = Some(value.parse::<usize>().map_err(|e| bad(e.to_string()))?),
                    _ => {}
                }
                continue;
            }
            if line.is_empty() {
                continue;
            }
            let t = match table.as_mut() {
                Some(t) => t,
                None => {
                    let w = width.ok_or_else(|| bad("record before width header".into()))?;
                    if w == 0 {
                        return Err(bad("width must be positive".into()));
                    }
                    table.insert(QTable::new(w))
                }
            };
            let mut parts = line.split(',');
            let (Some(k), Some(a), Some(v), None) = (parts.next(), parts.next(), parts.next(), parts.next()) else {
                return Err(bad(format!("malformed record `{line}`")));
            };
            let key = u64::from_str_radix(k, 16).map_err(|e| bad(e.to_string()))?;
            let action: usize = a.parse().map_err(|e: std::num::ParseIntError| bad(e.to_string()))?;
            let value: f64 = v.parse().map_err(|e: std::num::ParseFloatError| bad(e.to_string()))?;
            if action >= t.width {
                return Err(bad(format!("action {action} outside row width {}", t.width)));
            }
            t.set(StateKey(key), action, value);
            records += 1;
        }
        let table = match table {
            Some(t) => t,
            None => QTable::new(width.ok_or_else(|| bad("missing width header".into()))?),
        };
        if let Some(n) = declared {
            if n != records {
                return Err(bad(format!("header declares {n} entries, found {records}")));
            }
        }
        Ok((table, descriptor))
    }
}
