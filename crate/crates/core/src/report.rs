//! Deterministic report serialization.
//!
//! JSON is emitted through an ordered writer with floats fixed at 17
//! significant digits, so identical runs produce byte-identical files.

use std::fmt::Write as _;

/// Format a float with 17 significant digits (round-trip safe for f64).
pub fn fmt_float(x: f64) -> String {
    if x.is_nan() {
        return "\"nan\"".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "\"inf\"".into() } else { "\"-inf\"".into() };
    }
    format!("{x:.16e}")
}

#[derive(Debug, Clone)]
pub enum Json {
    Null,
    Bool(bool),
    Int(i64),
    Num(f64),
    Str(String),
    Arr(Vec<Json>),
    /// Insertion-ordered object.
    Obj(Vec<(String, Json)>),
}

impl Json {
    pub fn obj() -> Json {
        Json::Obj(Vec::new())
    }

    pub fn push(&mut self, key: &str, value: Json) -> &mut Self {
        match self {
            Json::Obj(fields) => fields.push((key.to_string(), value)),
            _ => panic!("push on non-object Json"),
        }
        self
    }

    pub fn num(x: f64) -> Json {
        Json::Num(x)
    }

    pub fn str(s: impl Into<String>) -> Json {
        Json::Str(s.into())
    }

    pub fn arr_of_nums(xs: &[f64]) -> Json {
        Json::Arr(xs.iter().copied().map(Json::Num).collect())
    }

    fn write(&self, out: &mut String, indent: usize) {
        let pad = "  ".repeat(indent);
        match self {
            Json::Null => out.push_str("null"),
            Json::Bool(b) => {
                let _ = write!(out, "{b}");
            }
            Json::Int(i) => {
                let _ = write!(out, "{i}");
            }
            Json::Num(x) => out.push_str(&fmt_float(*x)),
            Json::Str(s) => {
                out.push('"');
                for c in s.chars() {
                    match c {
                        '"' => out.push_str("\\\""),
                        '\\' => out.push_str("\\\\"),
                        '\n' => out.push_str("\\n"),
                        c if (c as u32) < 0x20 => {
                            let _ = write!(out, "\\u{:04x}", c as u32);
                        }
                        c => out.push(c),
                    }
                }
                out.push('"');
            }
            Json::Arr(items) => {
                if items.is_empty() {
                    out.push_str("[]");
                    return;
                }
                out.push_str("[\n");
                for (i, item) in items.iter().enumerate() {
                    out.push_str(&pad);
                    out.push_str("  ");
                    item.write(out, indent + 1);
                    if i + 1 < items.len() {
                        out.push(',');
                    }
                    out.push('\n');
                }
                out.push_str(&pad);
                out.push(']');
            }
            Json::Obj(fields) => {
                if fields.is_empty() {
                    out.push_str("{}");
                    return;
                }
                out.push_str("{\n");
                for (i, (k, v)) in fields.iter().enumerate() {
                    out.push_str(&pad);
                    out.push_str("  ");
                    let _ = write!(out, "\"{k}\": ");
                    v.write(out, indent + 1);
                    if i + 1 < fields.len() {
                        out.push(',');
                    }
                    out.push('\n');
                }
                out.push_str(&pad);
                out.push('}');
            }
        }
    }

    pub fn to_string_pretty(&self) -> String {
        let mut s = String::new();
        self.write(&mut s, 0);
        s.push('\n');
        s
    }
}

/// Write a CSV table; `sep` is "," normally or " " for plot data.
pub fn csv_table(header: &[&str], columns: &[&[f64]], sep: &str) -> String {
    assert!(!columns.is_empty());
    let rows = columns[0].len();
    for c in columns {
        assert_eq!(c.len(), rows, "ragged CSV columns");
    }
    let mut s = String::new();
    s.push_str(&header.join(sep));
    s.push('\n');
    for i in 0..rows {
        let line: Vec<String> = columns.iter().map(|c| format!("{:.16e}", c[i])).collect();
        s.push_str(&line.join(sep));
        s.push('\n');
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_is_deterministic() {
        let mut j = Json::obj();
        j.push("b", Json::num(1.0 / 3.0));
        j.push("a", Json::Bool(true));
        j.push("list", Json::arr_of_nums(&[1.0, 2.5]));
        let s1 = j.to_string_pretty();
        let s2 = j.to_string_pretty();
        assert_eq!(s1, s2);
        assert!(s1.contains("3.3333333333333331e-1"));
        // insertion order preserved
        assert!(s1.find("\"b\"").unwrap() < s1.find("\"a\"").unwrap());
    }

    #[test]
    fn csv_has_17_significant_digits() {
        let s = csv_table(&["s", "u"], &[&[0.5], &[std::f64::consts::PI]], ",");
        assert!(s.contains("3.1415926535897931e0"));
    }
}
