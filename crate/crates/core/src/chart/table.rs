//! Data tables, inline or loaded from CSV.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::ChartError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ColumnType {
    Temporal,
    Number,
    Category,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Column {
    pub name: String,
    #[serde(rename = "type")]
    pub kind: ColumnType,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Cell {
    Number(f64),
    Text(String),
    Null,
}

impl Cell {
    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Cell::Number(v) => Some(*v),
            _ => None,
        }
    }

    pub fn label(&self) -> String {
        match self {
            Cell::Number(v) => format!("{v}"),
            Cell::Text(s) => s.clone(),
            Cell::Null => String::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DataTable {
    pub columns: Vec<Column>,
    pub rows: Vec<Vec<Cell>>,
}

impl DataTable {
    pub fn column(&self, name: &str) -> Option<(usize, ColumnType)> {
        self.columns
            .iter()
            .position(|c| c.name == name)
            .map(|i| (i, self.columns[i].kind))
    }

    pub fn validate(&self, table: &str) -> Result<(), ChartError> {
        for (r, row) in self.rows.iter().enumerate() {
            if row.len() != self.columns.len() {
                return Err(ChartError::InvalidTable {
                    table: table.to_owned(),
                    reason: format!(
                        "row {r} has {} cells, expected {}",
                        row.len(),
                        self.columns.len()
                    ),
                });
            }
            for (cell, col) in row.iter().zip(&self.columns) {
                let ok = match (col.kind, cell) {
                    (_, Cell::Null) => true,
                    (ColumnType::Temporal | ColumnType::Number, Cell::Number(v)) => v.is_finite(),
                    (ColumnType::Category, _) => true,
                    _ => false,
                };
                if !ok {
                    return Err(ChartError::InvalidTable {
                        table: table.to_owned(),
                        reason: format!("row {r} column {:?} has a mistyped cell", col.name),
                    });
                }
            }
        }
        Ok(())
    }

    /// Reads a CSV file with a header row; column types come from `types`
    /// and every header must be declared.
    pub fn from_csv(path: &Path, types: &BTreeMap<String, ColumnType>) -> Result<Self, ChartError> {
        let csv_err = |e: csv::Error| ChartError::Csv {
            path: path.to_owned(),
            reason: e.to_string(),
        };
        let mut reader = csv::Reader::from_path(path).map_err(csv_err)?;
        let headers = reader.headers().map_err(csv_err)?.clone();
        let mut columns = Vec::with_capacity(headers.len());
        for h in &headers {
            let kind = *types.get(h).ok_or_else(|| ChartError::Csv {
                path: path.to_owned(),
                reason: format!("column {h:?} has no declared type"),
            })?;
            columns.push(Column {
                name: h.to_owned(),
                kind,
            });
        }
        let mut rows = Vec::new();
        for record in reader.records() {
            let record = record.map_err(csv_err)?;
            let mut row = Vec::with_capacity(columns.len());
            for (field, col) in record.iter().zip(&columns) {
                let field = field.trim();
                let cell = if field.is_empty() {
                    Cell::Null
                } else if col.kind == ColumnType::Category {
                    Cell::Text(field.to_owned())
                } else {
                    let v: f64 = field.parse().map_err(|_| ChartError::Csv {
                        path: path.to_owned(),
                        reason: format!("{field:?} in column {:?} is not a number", col.name),
                    })?;
                    Cell::Number(v)
                };
                row.push(cell);
            }
            rows.push(row);
        }
        Ok(Self { columns, rows })
    }
}

/// A table written inline in the scene file, or a CSV reference resolved
/// relative to the scene file's directory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TableSource {
    Inline(DataTable),
    Csv {
        csv: PathBuf,
        columns: BTreeMap<String, ColumnType>,
    },
}

impl TableSource {
    pub fn load(&self, base_dir: &Path) -> Result<DataTable, ChartError> {
        match self {
            TableSource::Inline(t) => Ok(t.clone()),
            TableSource::Csv { csv, columns } => DataTable::from_csv(&base_dir.join(csv), columns),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    #[test]
    fn loads_csv_with_declared_types() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.csv");
        let mut f = std::fs::File::create(&path).unwrap();
        writeln!(f, "year,cost,gen\n2000,5,A\n2001,,B").unwrap();
        let types = BTreeMap::from([
            ("year".to_string(), ColumnType::Temporal),
            ("cost".to_string(), ColumnType::Number),
            ("gen".to_string(), ColumnType::Category),
        ]);
        let t = DataTable::from_csv(&path, &types).unwrap();
        assert_eq!(t.rows.len(), 2);
        assert_eq!(t.rows[0][0], Cell::Number(2000.0));
        assert_eq!(t.rows[1][1], Cell::Null);
        assert_eq!(t.rows[1][2], Cell::Text("B".into()));
    }

    #[test]
    fn csv_rejects_undeclared_column() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.csv");
        std::fs::write(&path, "a,b\n1,2\n").unwrap();
        let types = BTreeMap::from([("a".to_string(), ColumnType::Number)]);
        assert!(matches!(
            DataTable::from_csv(&path, &types),
            Err(ChartError::Csv { .. })
        ));
    }

    #[test]
    fn mistyped_cell_is_rejected() {
        let t: DataTable = serde_json::from_str(
            r#"{"columns":[{"name":"x","type":"number"}],"rows":[["oops"]]}"#,
        )
        .unwrap();
        assert!(t.validate("t").is_err());
    }
}
