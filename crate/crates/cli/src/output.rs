//! Number formatting shared by every command: twelve significant digits in
//! both the text and the JSON renderings.

use semihilbert::C64;
use serde::Serialize;
use serde_json::Value;

pub const DIGITS: usize = 12;

/// `x` rounded to [`DIGITS`] significant digits, with `-0` folded into `0`.
pub fn round(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return if x == 0.0 { 0.0 } else { x };
    }
    let r: f64 = format!("{:.*e}", DIGITS - 1, x).parse().unwrap_or(x);
    r + 0.0
}

pub fn num(x: f64) -> String {
    if x.is_nan() {
        return "NaN".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let r = round(x);
    if r != 0.0 && !(1e-4..1e15).contains(&r.abs()) {
        format!("{r:e}")
    } else {
        format!("{r}")
    }
}

pub fn complex(z: C64) -> String {
    let (re, im) = (round(z.re), round(z.im));
    match (re == 0.0, im == 0.0) {
        (_, true) => num(re),
        (true, false) => format!("{}i", num(im)),
        (false, false) if im < 0.0 => format!("{}-{}i", num(re), num(-im)),
        (false, false) => format!("{}+{}i", num(re), num(im)),
    }
}

pub fn complex_list(points: &[C64]) -> String {
    let inner: Vec<String> = points.iter().map(|&z| complex(z)).collect();
    format!("{{{}}}", inner.join(", "))
}

pub fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

/// Rounds every float in a JSON tree.
pub fn round_value(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => n
            .as_f64()
            .and_then(|x| serde_json::Number::from_f64(round(x)))
            .map_or(Value::Null, Value::Number),
        Value::Array(items) => Value::Array(items.into_iter().map(round_value).collect()),
        Value::Object(map) => Value::Object(map.into_iter().map(|(k, v)| (k, round_value(v))).collect()),
        other => other,
    }
}

pub fn to_json<T: Serialize>(value: &T) -> serde_json::Result<String> {
    let v = round_value(serde_json::to_value(value)?);
    let mut s = serde_json::to_string_pretty(&v)?;
    s.push('\n');
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use semihilbert::c;

    #[test]
    fn twelve_digits() {
        assert_eq!(num(std::f64::consts::PI), "3.14159265359");
        assert_eq!(num(2.0), "2");
        assert_eq!(num(-0.0), "0");
        assert_eq!(num(1.0 / 3.0 * 1e-20), "3.33333333333e-21");
        assert_eq!(round(0.1 + 0.2), 0.3);
    }

    #[test]
    fn complex_rendering() {
        assert_eq!(complex(c(1.5, -1.0)), "1.5-1i");
        assert_eq!(complex(c(0.0, 2.0)), "2i");
        assert_eq!(complex(c(-1e-17, 0.0)), "-1e-17");
        assert_eq!(complex_list(&[c(0.0, 0.0), c(1.0, 1.0)]), "{0, 1+1i}");
    }

    #[test]
    fn json_rounding_reaches_nested_values() {
        let v = serde_json::json!({"a": [0.1 + 0.2, {"b": 1.0000000000001}], "n": 3});
        assert_eq!(round_value(v), serde_json::json!({"a": [0.3, {"b": 1.0}], "n": 3}));
    }
}
