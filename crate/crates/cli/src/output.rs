//! Canonical JSON: sorted keys, floats printed with 17 significant digits.

use std::io;

use serde::Serialize;
use serde_json::ser::Formatter;
use serde_json::Value;

struct Canonical;

impl Formatter for Canonical {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        if value == 0.0 {
            // one spelling for ±0
            return writer.write_all(b"0.0000000000000000e0");
        }
        write!(writer, "{value:.16e}")
    }
}

/// Serializes through [`Value`], whose maps are key-ordered.
pub fn canonical_json<T: Serialize>(value: &T) -> Result<String, serde_json::Error> {
    let v: Value = serde_json::to_value(value)?;
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, Canonical);
    v.serialize(&mut ser)?;
    buf.push(b'\n');
    Ok(String::from_utf8(buf).expect("serde_json emits UTF-8"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn keys_sorted_and_floats_fixed() {
        let v = serde_json::json!({"b": 0.1, "a": [1, -0.0]});
        assert_eq!(
            canonical_json(&v).unwrap(),
            "{\"a\":[1,0.0000000000000000e0],\"b\":1.0000000000000001e-1}\n"
        );
    }
}
