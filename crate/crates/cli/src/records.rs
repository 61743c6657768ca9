//! Flat data tables with a fixed per-command column schema, emitted as CSV
//! or JSON with 17-significant-digit floats. No timestamps or other
//! run metadata enter the payload, so identical configs produce
//! byte-identical files.

use crate::config::{fmt_float, OutputFormat};

#[derive(Debug, Clone)]
pub enum Cell {
    Num(f64),
    Text(String),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Num(x) => fmt_float(*x),
            Cell::Text(s) => s.clone(),
        }
    }

    fn json(&self) -> String {
        match self {
            Cell::Num(x) if x.is_finite() => fmt_float(*x),
            Cell::Num(_) => "null".into(),
            Cell::Text(s) => format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\"")),
        }
    }
}

#[derive(Debug)]
pub struct Table {
    pub columns: &'static [&'static str],
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &'static [&'static str]) -> Self {
        Table { columns, rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn render(&self, format: OutputFormat) -> String {
        match format {
            OutputFormat::Csv => self.render_csv(),
            OutputFormat::Json => self.render_json(),
        }
    }

    fn render_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            let line: Vec<String> = row.iter().map(Cell::csv).collect();
            out.push_str(&line.join(","));
            out.push('\n');
        }
        out
    }

    fn render_json(&self) -> String {
        let mut out = String::new();
        out.push_str("{\n  \"schema\": [");
        out.push_str(
            &self.columns.iter().map(|c| format!("\"{c}\"")).collect::<Vec<_>>().join(", "),
        );
        out.push_str("],\n  \"rows\": [\n");
        for (i, row) in self.rows.iter().enumerate() {
            out.push_str("    {");
            let fields: Vec<String> = self
                .columns
                .iter()
                .zip(row.iter())
                .map(|(c, cell)| format!("\"{c}\": {}", cell.json()))
                .collect();
            out.push_str(&fields.join(", "));
            out.push('}');
            if i + 1 != self.rows.len() {
                out.push(',');
            }
            out.push('\n');
        }
        out.push_str("  ]\n}\n");
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_and_json_are_deterministic() {
        let mut t = Table::new(&["a", "b"]);
        t.push(vec![Cell::Num(0.1), Cell::Text("x".into())]);
        t.push(vec![Cell::Num(f64::NAN), Cell::Text("y".into())]);
        let csv1 = t.render(OutputFormat::Csv);
        let csv2 = t.render(OutputFormat::Csv);
        assert_eq!(csv1, csv2);
        assert!(csv1.starts_with("a,b\n"));
        assert!(csv1.contains("nan"));
        let json = t.render(OutputFormat::Json);
        assert!(json.contains("\"a\": 1.0000000000000001e-1"));
        assert!(json.contains("null"));
    }
}
