//! Deterministic number formatting for reports.

use serde::Serialize;
use serde_json::ser::Formatter;
use std::io;

/// Scientific notation with 17 significant digits; parses back to the same `f64`.
pub fn fmt17(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "NaN".to_string()
    } else if x > 0.0 {
        "inf".to_string()
    } else {
        "-inf".to_string()
    }
}

/// Compact JSON with every float written by [`fmt17`].
#[derive(Clone, Copy, Debug, Default)]
pub struct Sig17Formatter;

impl Formatter for Sig17Formatter {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        writer.write_all(fmt17(value).as_bytes())
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, value as f64)
    }
}

pub fn to_json_string<T: Serialize + ?Sized>(value: &T) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, Sig17Formatter);
    value
        .serialize(&mut ser)
        .expect("serialisation into memory does not fail");
    String::from_utf8(buf).expect("serde_json writes UTF-8")
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn fixed_width_mantissa() {
        assert_eq!(fmt17(0.5), "5.0000000000000000e-1");
        assert_eq!(fmt17(-2.0), "-2.0000000000000000e0");
        assert_eq!(
            to_json_string(&[1.0, f64::NAN]),
            "[1.0000000000000000e0,null]"
        );
    }

    proptest! {
        #[test]
        fn round_trips(x in proptest::num::f64::NORMAL | proptest::num::f64::SUBNORMAL | proptest::num::f64::ZERO) {
            prop_assert_eq!(fmt17(x).parse::<f64>().unwrap().to_bits(), x.to_bits());
            let back: f64 = serde_json::from_str(&to_json_string(&x)).unwrap();
            prop_assert_eq!(back.to_bits(), x.to_bits());
        }
    }
}
