//! Property-based checks over randomized inputs.

use barscan_core::decoder::{greedy_decode, DecodeOptions};
use barscan_core::forward::{forward_map, make_grid, synthesize_clean_with_map};
use barscan_core::signal_io::{format_signal, parse_signal};
use barscan_core::symbology::{build_dictionary, digits_to_x, encode_digits, x_to_digits};
use barscan_core::{DigitString, GaussianParams};
use proptest::prelude::*;

fn digit_strings() -> impl Strategy<Value = DigitString> {
    proptest::array::uniform12(0u8..10).prop_map(|d| DigitString::new(d).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn sparse_code_round_trips(digits in digit_strings()) {
        let x = digits_to_x(&digits);
        prop_assert_eq!(x_to_digits(&x).unwrap(), digits);
    }

    #[test]
    fn dictionary_agrees_with_direct_encoding(digits in digit_strings()) {
        let dict = build_dictionary();
        let via_dict = dict.apply(&digits_to_x(&digits));
        prop_assert_eq!(via_dict, encode_digits(&digits).as_f64());
    }

    #[test]
    fn display_parse_round_trips(digits in digit_strings()) {
        prop_assert_eq!(DigitString::parse(&digits.to_string()).unwrap(), digits);
    }

    #[test]
    fn noiseless_decode_recovers(
        digits in digit_strings(),
        sigma in 0.0f64..0.6,
        alpha in 0.2f64..2.0,
    ) {
        let dict = build_dictionary();
        let grid = make_grid(5).unwrap();
        let map = forward_map(GaussianParams::new(sigma, alpha).unwrap(), &grid, &dict).unwrap();
        let signal = synthesize_clean_with_map(&digits, &map);
        let result = greedy_decode(&signal, &map, &DecodeOptions::default()).unwrap();
        prop_assert_eq!(result.digits, digits);
    }

    #[test]
    fn signal_file_round_trips(
        digits in digit_strings(),
        sigma in 0.0f64..1.5,
        alpha in 0.1f64..3.0,
    ) {
        let dict = build_dictionary();
        let grid = make_grid(2).unwrap();
        let map = forward_map(GaussianParams::new(sigma, alpha).unwrap(), &grid, &dict).unwrap();
        let signal = synthesize_clean_with_map(&digits, &map);
        let text = format_signal(&signal);
        let back = parse_signal(std::path::Path::new("mem"), &text).unwrap();
        prop_assert_eq!(back.samples, signal.samples);
        prop_assert_eq!(back.provenance, signal.provenance);
    }
}
