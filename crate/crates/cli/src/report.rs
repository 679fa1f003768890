use std::io::Write;
use std::path::Path;
use std::time::Instant;

use serde::Serialize;
use serde_json::Value;
use toric_zeta::report::CheckItem;

#[derive(Debug, Serialize)]
pub struct Item {
    pub name: String,
    pub pass: bool,
    pub detail: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub data: Option<Value>,
}

impl Item {
    pub fn new(name: impl Into<String>, pass: bool, detail: impl Into<String>) -> Self {
        Item { name: name.into(), pass, detail: detail.into(), data: None }
    }

    pub fn with_data(mut self, data: impl Serialize) -> Self {
        self.data = Some(serde_json::to_value(data).expect("serializable"));
        self
    }
}

impl From<CheckItem> for Item {
    fn from(c: CheckItem) -> Self {
        Item::new(c.name, c.pass, c.detail)
    }
}

/// One document per invocation; `pass` is the conjunction of the item passes.
#[derive(Debug, Serialize)]
pub struct Report {
    pub command: String,
    pub params: Value,
    pub items: Vec<Item>,
    pub pass: bool,
    pub wall_time: f64,
}

impl Report {
    pub fn finish(command: &str, params: Value, items: Vec<Item>, started: Instant) -> Self {
        let pass = items.iter().all(|i| i.pass);
        Report { command: command.to_string(), params, items, pass, wall_time: started.elapsed().as_secs_f64() }
    }

    pub fn print_table(&self, out: &mut impl Write) -> std::io::Result<()> {
        writeln!(out, "{} {}", self.command, self.params)?;
        let width = self.items.iter().map(|i| i.name.chars().count()).max().unwrap_or(0);
        for item in &self.items {
            let verdict = if item.pass { "PASS" } else { "FAIL" };
            writeln!(out, "  {verdict}  {:<width$}  {}", item.name, item.detail)?;
        }
        let passed = self.items.iter().filter(|i| i.pass).count();
        writeln!(
            out,
            "{}: {passed}/{} items passed in {:.3} s",
            if self.pass { "PASS" } else { "FAIL" },
            self.items.len(),
            self.wall_time
        )
    }

    pub fn write_json(&self, path: &Path) -> std::io::Result<()> {
        let mut text = serde_json::to_string_pretty(self).expect("serializable");
        text.push('\n');
        std::fs::write(path, text)
    }
}
