//! Renderings of the P/A duration table: CSV with `+`/`-` cell glyphs,
//! and an aligned text form for terminals.

use std::fmt::Write;

use tm_core::behavior::PaTable;

/// CSV form: header `event,1,..,H`, one row per event in declaration
/// order, LF line endings.
pub fn table_to_csv(table: &PaTable) -> String {
    let mut out = String::from("event");
    for slot in 1..=table.horizon {
        write!(out, ",{slot}").unwrap();
    }
    out.push('\n');
    for row in &table.rows {
        out.push_str(&row.event);
        for cell in &row.cells {
            out.push(',');
            out.push(cell.glyph());
        }
        out.push('\n');
    }
    out
}

/// Aligned text form for stdout.
pub fn table_to_text(table: &PaTable) -> String {
    let key_width = table
        .rows
        .iter()
        .map(|r| r.event.len())
        .max()
        .unwrap_or(0)
        .max("event".len());
    let cell_width = table.horizon.to_string().len();
    let mut out = String::new();
    write!(out, "{:key_width$}", "event").unwrap();
    for slot in 1..=table.horizon {
        write!(out, " {slot:>cell_width$}").unwrap();
    }
    out.push('\n');
    for row in &table.rows {
        write!(out, "{:key_width$}", row.event).unwrap();
        for cell in &row.cells {
            write!(out, " {:>cell_width$}", cell.glyph()).unwrap();
        }
        out.push('\n');
    }
    out
}
