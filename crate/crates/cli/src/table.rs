//! Rectangular result tables with deterministic CSV and JSON renderings.

/// One table cell. Numbers render with 9 significant digits so outputs can
/// serve as diff-able regression fixtures.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Text(String),
    Empty,
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

#[derive(Debug, Clone, Default)]
pub struct Table {
    pub columns: Vec<String>,
    /// Free-form annotations recording every preset assumption.
    pub notes: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

/// 9 significant digits, scientific notation, locale-free.
pub fn format_number(v: f64) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    format!("{v:.8e}")
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Self {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            notes: Vec::new(),
            rows: Vec::new(),
        }
    }

    pub fn note(&mut self, text: impl Into<String>) {
        self.notes.push(text.into());
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "ragged table row");
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str("# schema: ");
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for note in &self.notes {
            out.push_str("# note: ");
            out.push_str(note);
            out.push('\n');
        }
        for row in &self.rows {
            let rendered: Vec<String> = row
                .iter()
                .map(|cell| match cell {
                    Cell::Num(v) => format_number(*v),
                    Cell::Text(t) => t.clone(),
                    Cell::Empty => String::new(),
                })
                .collect();
            out.push_str(&rendered.join(","));
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> String {
        let rows: Vec<Vec<serde_json::Value>> = self
            .rows
            .iter()
            .map(|row| {
                row.iter()
                    .map(|cell| match cell {
                        // numbers go through the same fixed formatting as the
                        // CSV so both renderings are byte-stable
                        Cell::Num(v) => serde_json::Value::String(format_number(*v)),
                        Cell::Text(t) => serde_json::Value::String(t.clone()),
                        Cell::Empty => serde_json::Value::Null,
                    })
                    .collect()
            })
            .collect();
        let doc = serde_json::json!({
            "schema": self.columns,
            "notes": self.notes,
            "rows": rows,
        });
        let mut text = serde_json::to_string_pretty(&doc).expect("table serialization");
        text.push('\n');
        text
    }
}
