//! Text formatting shared by the subcommands.

use std::io::{self, Write};

use serde_json::{Number, Value};

/// Seventeen significant digits, enough to round-trip an `f64`.
pub fn csv_num(v: f64) -> String {
    format!("{v:.16e}")
}

/// Rounds to twelve significant digits; non-finite values become `null`.
pub fn round12(v: f64) -> Value {
    if !v.is_finite() {
        return Value::Null;
    }
    let rounded: f64 = format!("{v:.11e}").parse().expect("formatted float parses");
    Number::from_f64(rounded).map_or(Value::Null, Value::Number)
}

/// Applies [`round12`] to every float inside `v`, leaving integers alone.
pub fn round_floats(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => round12(n.as_f64().unwrap()),
        Value::Array(items) => Value::Array(items.into_iter().map(round_floats).collect()),
        Value::Object(map) => Value::Object(map.into_iter().map(|(k, v)| (k, round_floats(v))).collect()),
        other => other,
    }
}

pub fn emit_json(out: &mut impl Write, v: Value) -> io::Result<()> {
    serde_json::to_writer_pretty(&mut *out, &round_floats(v))?;
    writeln!(out)
}
