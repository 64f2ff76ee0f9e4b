use std::fmt::Write as _;

use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Text,
    Json,
}

/// One checked value: what was expected, what the engine computed, and
/// where the expectation comes from.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Item {
    pub name: String,
    pub expected: String,
    pub computed: String,
    pub pass: bool,
    pub cite: String,
}

impl Item {
    pub fn new(name: impl Into<String>, expected: impl Into<String>, computed: impl Into<String>, cite: impl Into<String>) -> Self {
        let (expected, computed) = (expected.into(), computed.into());
        Item { name: name.into(), pass: expected == computed, expected, computed, cite: cite.into() }
    }

    pub fn with_pass(mut self, pass: bool) -> Self {
        self.pass = pass;
        self
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Report {
    pub command: String,
    pub version: String,
    pub items: Vec<Item>,
    /// Free-form lines that are informative but not checked.
    pub notes: Vec<String>,
    pub wall_ms: u128,
}

impl Report {
    pub fn new(command: impl Into<String>) -> Self {
        Report {
            command: command.into(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            items: Vec::new(),
            notes: Vec::new(),
            wall_ms: 0,
        }
    }

    pub fn push(&mut self, item: Item) {
        self.items.push(item);
    }

    pub fn note(&mut self, line: impl Into<String>) {
        self.notes.push(line.into());
    }

    pub fn all_pass(&self) -> bool {
        self.items.iter().all(|i| i.pass)
    }

    pub fn failures(&self) -> usize {
        self.items.iter().filter(|i| !i.pass).count()
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => serde_json::to_string_pretty(self).expect("report serializes"),
            Format::Text => self.render_text(),
        }
    }

    fn render_text(&self) -> String {
        let mut s = String::new();
        writeln!(s, "burniat {} :: {}", self.version, self.command).unwrap();
        let width = self.items.iter().map(|i| i.name.len()).max().unwrap_or(0);
        for i in &self.items {
            let mark = if i.pass { "PASS" } else { "FAIL" };
            if i.expected == i.computed {
                writeln!(s, "{mark} {:width$}  {}  [{}]", i.name, i.computed, i.cite).unwrap();
            } else {
                writeln!(s, "{mark} {:width$}  {} (expected {})  [{}]", i.name, i.computed, i.expected, i.cite).unwrap();
            }
        }
        for n in &self.notes {
            writeln!(s, "  {n}").unwrap();
        }
        writeln!(s, "{} of {} items pass; wall time {} ms", self.items.len() - self.failures(), self.items.len(), self.wall_ms).unwrap();
        s
    }
}
