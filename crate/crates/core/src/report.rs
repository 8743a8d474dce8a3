//! Stable JSON rendering: field order follows the struct definitions and
//! every floating-point number is written with 17 significant digits.

use serde::Serialize;
use serde_json::{Number, Value};

use crate::error::{Error, Result};

fn fix_floats(value: &mut Value) {
    match value {
        Value::Number(n) => {
            if n.is_f64() {
                if let Some(x) = n.as_f64() {
                    let text = format!("{x:.16e}");
                    if let Ok(fixed) = text.parse::<Number>() {
                        *n = fixed;
                    }
                }
            }
        }
        Value::Array(items) => items.iter_mut().for_each(fix_floats),
        Value::Object(map) => map.values_mut().for_each(fix_floats),
        _ => {}
    }
}

/// Value tree with floats normalized to 17 significant digits.
pub fn to_value<T: Serialize>(item: &T) -> Result<Value> {
    let mut v = serde_json::to_value(item).map_err(|e| Error::Io(e.to_string()))?;
    fix_floats(&mut v);
    Ok(v)
}

/// Pretty JSON document.
pub fn to_json<T: Serialize>(item: &T) -> Result<String> {
    serde_json::to_string_pretty(&to_value(item)?).map_err(|e| Error::Io(e.to_string()))
}
