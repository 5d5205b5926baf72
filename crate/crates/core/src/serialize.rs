//! Instance and report files: UTF-8 JSON with floats printed at 17
//! significant digits so every f64 round-trips to the exact same bits.

use std::io::{self, Write};
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::error::Result;

/// JSON formatter that writes floats as scientific decimals with 17
/// significant digits.
struct PreciseFormatter;

impl serde_json::ser::Formatter for PreciseFormatter {
    fn write_f64<W>(&mut self, writer: &mut W, value: f64) -> io::Result<()>
    where
        W: ?Sized + Write,
    {
        write!(writer, "{value:.16e}")
    }

    fn write_f32<W>(&mut self, writer: &mut W, value: f32) -> io::Result<()>
    where
        W: ?Sized + Write,
    {
        write!(writer, "{value:.8e}")
    }
}

/// Serialize to the toolkit's wire format.
pub fn to_json_string<T: Serialize>(value: &T) -> Result<String> {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, PreciseFormatter);
    value.serialize(&mut ser)?;
    Ok(String::from_utf8(out).expect("serde_json emits UTF-8"))
}

/// Parse from the wire format (any valid JSON numbers are accepted).
pub fn from_json_str<T: DeserializeOwned>(s: &str) -> Result<T> {
    Ok(serde_json::from_str(s)?)
}

/// Write a value as a JSON file with a trailing newline.
pub fn write_json_file<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = to_json_string(value)?;
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}

/// Read and parse a JSON file.
pub fn read_json_file<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path)?;
    from_json_str(&text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn float_format_examples() {
        assert_eq!(to_json_string(&0.5f64).unwrap(), "5.0000000000000000e-1");
        assert_eq!(to_json_string(&0.0f64).unwrap(), "0.0000000000000000e0");
        assert_eq!(to_json_string(&-2.0f64).unwrap(), "-2.0000000000000000e0");
    }

    #[test]
    fn serialization_is_deterministic() {
        let g = crate::games::generate_instance(
            crate::games::InstanceKind::NoDiagPair { delta: 0.07 },
            0,
        )
        .unwrap();
        let a = to_json_string(&g).unwrap();
        let b = to_json_string(&g).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn solver_reports_round_trip_bit_exact() {
        let cfg = crate::separation::SeparationConfig::default();
        let g = crate::games::generate_instance(
            crate::games::InstanceKind::NoDiagPair { delta: 0.12 },
            0,
        )
        .unwrap();

        let sep = crate::separation::solve_image_separation(g.q0(), g.q1(), &cfg).unwrap();
        let json = to_json_string(&sep).unwrap();
        let back: crate::separation::SeparationResult = from_json_str(&json).unwrap();
        assert_eq!(to_json_string(&back).unwrap(), json);

        let report = crate::games::game_value(&g, &cfg).unwrap();
        let json = to_json_string(&report).unwrap();
        let back: crate::games::GameValueReport = from_json_str(&json).unwrap();
        assert_eq!(to_json_string(&back).unwrap(), json);

        let rep = crate::repetition::repetition_report(
            &g,
            2,
            crate::repetition::RepetitionMode::UnanimousAccept,
            &cfg,
        )
        .unwrap();
        let json = to_json_string(&rep).unwrap();
        let back: crate::repetition::RepetitionReport = from_json_str(&json).unwrap();
        assert_eq!(to_json_string(&back).unwrap(), json);
    }

    proptest! {
        #[test]
        fn floats_round_trip_bit_exact(bits in any::<u64>()) {
            let value = f64::from_bits(bits);
            prop_assume!(value.is_finite());
            let json = to_json_string(&value).unwrap();
            let back: f64 = from_json_str(&json).unwrap();
            prop_assert_eq!(back.to_bits(), value.to_bits());
        }

        #[test]
        fn matrices_round_trip_bit_exact(seed in any::<u64>()) {
            use rand::SeedableRng;
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let m = crate::operators::sample_ginibre(3, 2, &mut rng);
            let json = to_json_string(&m).unwrap();
            let back: crate::operators::ComplexMatrix = from_json_str(&json).unwrap();
            prop_assert_eq!(back, m);
        }
    }
}
