//! UPC-A symbology: digit patterns, the 95-bar binary form, the 123-entry
//! sparse representation, and the 95x123 bar code dictionary.

use crate::error::{Error, Result};
use ndarray::Array2;

/// Number of unit-width bars in a UPC-A code.
pub const NUM_BARS: usize = 95;
/// Length of the sparse representation.
pub const SPARSE_LEN: usize = 123;
/// Number of encoded digits.
pub const NUM_DIGITS: usize = 12;
/// Number of column blocks in the dictionary (S, 6 left digits, M, 6 right digits, E).
pub const NUM_BLOCKS: usize = 15;

/// Left digit patterns, one 7-bar row per digit 0-9. A right pattern is the
/// bitwise complement of the left pattern for the same digit.
const LEFT_PATTERNS: [[u8; 7]; 10] = [
    [0, 0, 0, 1, 1, 0, 1],
    [0, 0, 1, 1, 0, 0, 1],
    [0, 0, 1, 0, 0, 1, 1],
    [0, 1, 1, 1, 1, 0, 1],
    [0, 1, 0, 0, 0, 1, 1],
    [0, 1, 1, 0, 0, 0, 1],
    [0, 1, 0, 1, 1, 1, 1],
    [0, 1, 1, 1, 0, 1, 1],
    [0, 1, 1, 0, 1, 1, 1],
    [0, 0, 0, 1, 0, 1, 1],
];

/// Start/end guard bars.
pub const START_GUARD: [u8; 3] = [1, 0, 1];
/// Middle guard bars.
pub const MIDDLE_GUARD: [u8; 5] = [0, 1, 0, 1, 0];

/// Returns the 7-bar left pattern for a digit.
pub fn left_pattern(digit: u8) -> Result<[u8; 7]> {
    LEFT_PATTERNS
        .get(digit as usize)
        .copied()
        .ok_or(Error::DigitOutOfRange(digit as u32))
}

/// Returns the 7-bar right pattern: the complement of the left pattern.
pub fn right_pattern(digit: u8) -> Result<[u8; 7]> {
    let mut p = left_pattern(digit)?;
    for b in &mut p {
        *b = 1 - *b;
    }
    Ok(p)
}

/// The 12 decimal digits a UPC-A code represents.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DigitString {
    digits: [u8; NUM_DIGITS],
}

impl DigitString {
    pub fn new(digits: [u8; NUM_DIGITS]) -> Result<Self> {
        for &d in &digits {
            if d > 9 {
                return Err(Error::DigitOutOfRange(d as u32));
            }
        }
        Ok(DigitString { digits })
    }

    pub fn from_slice(digits: &[u8]) -> Result<Self> {
        let arr: [u8; NUM_DIGITS] = digits
            .try_into()
            .map_err(|_| Error::BadDigitCount(digits.len()))?;
        Self::new(arr)
    }

    /// Parses a string of exactly 12 ASCII digits.
    pub fn parse(s: &str) -> Result<Self> {
        let bytes = s.as_bytes();
        if bytes.len() != NUM_DIGITS {
            return Err(Error::BadDigitCount(bytes.len()));
        }
        let mut digits = [0u8; NUM_DIGITS];
        for (i, &b) in bytes.iter().enumerate() {
            if !b.is_ascii_digit() {
                return Err(Error::DigitOutOfRange(b as u32));
            }
            digits[i] = b - b'0';
        }
        Ok(DigitString { digits })
    }

    pub fn digits(&self) -> &[u8; NUM_DIGITS] {
        &self.digits
    }
}

impl std::fmt::Display for DigitString {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for d in self.digits {
            write!(f, "{d}")?;
        }
        Ok(())
    }
}

/// The 95 unit-width bars of a UPC-A code; 0 is a white bar, 1 a black bar.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryBarcode {
    bars: [u8; NUM_BARS],
}

impl BinaryBarcode {
    pub fn new(bars: [u8; NUM_BARS]) -> Result<Self> {
        if bars[0..3] != START_GUARD || bars[45..50] != MIDDLE_GUARD || bars[92..95] != START_GUARD
        {
            return Err(Error::BadBarCount(NUM_BARS));
        }
        Ok(BinaryBarcode { bars })
    }

    pub fn bars(&self) -> &[u8; NUM_BARS] {
        &self.bars
    }

    /// Bars as reals, for use with the forward model.
    pub fn as_f64(&self) -> Vec<f64> {
        self.bars.iter().map(|&b| b as f64).collect()
    }
}

impl std::fmt::Display for BinaryBarcode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for b in self.bars {
            write!(f, "{b}")?;
        }
        Ok(())
    }
}

/// The sparse representation x: 123 binary entries with exactly 15 ones.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparseCode {
    entries: [u8; SPARSE_LEN],
}

impl SparseCode {
    pub fn entries(&self) -> &[u8; SPARSE_LEN] {
        &self.entries
    }

    /// Indices (0-based) of the nonzero entries, in increasing order.
    pub fn support(&self) -> Vec<usize> {
        self.entries
            .iter()
            .enumerate()
            .filter(|(_, &v)| v == 1)
            .map(|(i, _)| i)
            .collect()
    }
}

/// Encodes a digit string into its 95-bar binary form:
/// start guard, six left patterns, middle guard, six right patterns, end guard.
pub fn encode_digits(digits: &DigitString) -> BinaryBarcode {
    let mut bars = [0u8; NUM_BARS];
    bars[0..3].copy_from_slice(&START_GUARD);
    for (i, &d) in digits.digits()[0..6].iter().enumerate() {
        bars[3 + 7 * i..10 + 7 * i].copy_from_slice(&left_pattern(d).expect("digit validated"));
    }
    bars[45..50].copy_from_slice(&MIDDLE_GUARD);
    for (i, &d) in digits.digits()[6..12].iter().enumerate() {
        bars[50 + 7 * i..57 + 7 * i].copy_from_slice(&right_pattern(d).expect("digit validated"));
    }
    bars[92..95].copy_from_slice(&START_GUARD);
    BinaryBarcode { bars }
}

/// Builds the sparse representation of a digit string: entries 1, 62, 123
/// (1-based) are set for the guards, and each ten-entry digit block has a
/// single one at the offset selecting the digit value.
pub fn digits_to_x(digits: &DigitString) -> SparseCode {
    let mut entries = [0u8; SPARSE_LEN];
    entries[0] = 1;
    entries[61] = 1;
    entries[122] = 1;
    for (i, &d) in digits.digits()[0..6].iter().enumerate() {
        entries[1 + 10 * i + d as usize] = 1;
    }
    for (i, &d) in digits.digits()[6..12].iter().enumerate() {
        entries[62 + 10 * i + d as usize] = 1;
    }
    SparseCode { entries }
}

/// Recovers the digit string from a sparse code, validating its structure.
/// Block numbers in errors are 1-based.
pub fn x_to_digits(x: &SparseCode) -> Result<DigitString> {
    x_to_digits_raw(&x.entries)
}

/// Same as [`x_to_digits`] but accepts a raw 123-entry slice.
pub fn x_to_digits_raw(entries: &[u8]) -> Result<DigitString> {
    if entries.len() != SPARSE_LEN {
        return Err(Error::BadSparseLength(entries.len()));
    }
    for (block, idx) in [(1usize, 0usize), (8, 61), (15, 122)] {
        if entries[idx] != 1 {
            return Err(Error::MalformedSparseCode {
                block,
                reason: "guard entry is not set".into(),
            });
        }
    }
    let mut digits = [0u8; NUM_DIGITS];
    for (i, digit) in digits.iter_mut().enumerate() {
        let (block, start) = if i < 6 {
            (i + 2, 1 + 10 * i)
        } else {
            (i + 3, 62 + 10 * (i - 6))
        };
        let ones: Vec<usize> = (0..10).filter(|&k| entries[start + k] == 1).collect();
        match ones.as_slice() {
            [k] => *digit = *k as u8,
            [] => {
                return Err(Error::MalformedSparseCode {
                    block,
                    reason: "digit block has no selected entry".into(),
                })
            }
            _ => {
                return Err(Error::MalformedSparseCode {
                    block,
                    reason: format!("digit block has {} selected entries", ones.len()),
                })
            }
        }
    }
    DigitString::new(digits)
}

/// Column span (0-based, half-open) of each of the 15 dictionary blocks.
pub fn column_block_spans() -> [(usize, usize); NUM_BLOCKS] {
    let mut spans = [(0usize, 0usize); NUM_BLOCKS];
    spans[0] = (0, 1);
    for b in 0..6 {
        spans[1 + b] = (1 + 10 * b, 11 + 10 * b);
    }
    spans[7] = (61, 62);
    for b in 0..6 {
        spans[8 + b] = (62 + 10 * b, 72 + 10 * b);
    }
    spans[14] = (122, 123);
    spans
}

/// Row span (0-based, half-open, in bars) of each of the 15 dictionary blocks.
pub fn row_block_spans() -> [(usize, usize); NUM_BLOCKS] {
    let mut spans = [(0usize, 0usize); NUM_BLOCKS];
    spans[0] = (0, 3);
    for b in 0..6 {
        spans[1 + b] = (3 + 7 * b, 10 + 7 * b);
    }
    spans[7] = (45, 50);
    for b in 0..6 {
        spans[8 + b] = (50 + 7 * b, 57 + 7 * b);
    }
    spans[14] = (92, 95);
    spans
}

/// The 95x123 block-diagonal bar code dictionary.
#[derive(Debug, Clone)]
pub struct Dictionary {
    matrix: Array2<f64>,
}

impl Dictionary {
    pub fn matrix(&self) -> &Array2<f64> {
        &self.matrix
    }

    /// Multiplies the dictionary by a sparse code, yielding the 95 bars.
    pub fn apply(&self, x: &SparseCode) -> Vec<f64> {
        let mut out = vec![0.0; NUM_BARS];
        for idx in x.support() {
            for (o, v) in out.iter_mut().zip(self.matrix.column(idx)) {
                *o += v;
            }
        }
        out
    }
}

/// Builds the dictionary. Guard columns hold the bar-level patterns
/// (101 for start/end, 01010 for the middle); digit blocks hold the left
/// patterns on the left half and their complements on the right half.
pub fn build_dictionary() -> Dictionary {
    let mut m = Array2::<f64>::zeros((NUM_BARS, SPARSE_LEN));
    for (r, &v) in START_GUARD.iter().enumerate() {
        m[(r, 0)] = v as f64;
        m[(92 + r, 122)] = v as f64;
    }
    for (r, &v) in MIDDLE_GUARD.iter().enumerate() {
        m[(45 + r, 61)] = v as f64;
    }
    for k in 0..10u8 {
        let lp = left_pattern(k).unwrap();
        let rp = right_pattern(k).unwrap();
        for b in 0..6 {
            for r in 0..7 {
                m[(3 + 7 * b + r, 1 + 10 * b + k as usize)] = lp[r] as f64;
                m[(50 + 7 * b + r, 62 + 10 * b + k as usize)] = rp[r] as f64;
            }
        }
    }
    Dictionary { matrix: m }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pattern_table_spot_checks() {
        assert_eq!(left_pattern(0).unwrap(), [0, 0, 0, 1, 1, 0, 1]);
        assert_eq!(left_pattern(6).unwrap(), [0, 1, 0, 1, 1, 1, 1]);
        assert_eq!(left_pattern(9).unwrap(), [0, 0, 0, 1, 0, 1, 1]);
        assert_eq!(right_pattern(0).unwrap(), [1, 1, 1, 0, 0, 1, 0]);
        assert_eq!(right_pattern(6).unwrap(), [1, 0, 1, 0, 0, 0, 0]);
        assert!(left_pattern(10).is_err());
        assert!(right_pattern(10).is_err());
    }

    #[test]
    fn right_is_complement_of_left() {
        for d in 0..10u8 {
            let l = left_pattern(d).unwrap();
            let r = right_pattern(d).unwrap();
            for i in 0..7 {
                assert_eq!(l[i] + r[i], 1);
            }
        }
    }

    #[test]
    fn encode_all_zeros() {
        let d = DigitString::new([0; 12]).unwrap();
        let mut expected = String::from("101");
        for _ in 0..6 {
            expected.push_str("0001101");
        }
        expected.push_str("01010");
        for _ in 0..6 {
            expected.push_str("1110010");
        }
        expected.push_str("101");
        assert_eq!(encode_digits(&d).to_string(), expected);
    }

    #[test]
    fn encode_mixed_digits_matches_hand_assembly() {
        // 0 1 2 3 4 5 | 6 7 8 9 0 1, concatenating table rows by hand.
        let d = DigitString::new([0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 0, 1]).unwrap();
        let expected = concat!(
            "101",
            "0001101", "0011001", "0010011", "0111101", "0100011", "0110001",
            "01010",
            "1010000", "1000100", "1001000", "1110100", "1110010", "1100110",
            "101",
        );
        assert_eq!(encode_digits(&d).to_string(), expected);
    }

    #[test]
    fn x_support_for_all_zero_digits() {
        let d = DigitString::new([0; 12]).unwrap();
        let x = digits_to_x(&d);
        let support_1based: Vec<usize> = x.support().iter().map(|i| i + 1).collect();
        assert_eq!(
            support_1based,
            vec![1, 2, 12, 22, 32, 42, 52, 62, 63, 73, 83, 93, 103, 113, 123]
        );
    }

    #[test]
    fn x_has_fifteen_ones() {
        let d = DigitString::new([3, 1, 4, 1, 5, 9, 2, 6, 5, 3, 5, 8]).unwrap();
        assert_eq!(digits_to_x(&d).support().len(), 15);
    }

    #[test]
    fn x_to_digits_rejects_malformed() {
        let d = DigitString::new([0; 12]).unwrap();
        let mut entries = *digits_to_x(&d).entries();
        entries[3] = 1; // second one in the first digit block
        let err = x_to_digits_raw(&entries).unwrap_err();
        assert!(matches!(err, Error::MalformedSparseCode { block: 2, .. }));

        let mut entries = *digits_to_x(&d).entries();
        entries[0] = 0; // missing start marker
        let err = x_to_digits_raw(&entries).unwrap_err();
        assert!(matches!(err, Error::MalformedSparseCode { block: 1, .. }));
    }

    #[test]
    fn dictionary_reproduces_encoding_for_all_zeros() {
        let dict = build_dictionary();
        let d = DigitString::new([0; 12]).unwrap();
        let bars = dict.apply(&digits_to_x(&d));
        assert_eq!(bars, encode_digits(&d).as_f64());
    }

    #[test]
    fn left_block_min_l1_distance_is_two() {
        let mut min_dist = usize::MAX;
        for a in 0..10u8 {
            for b in (a + 1)..10 {
                let (pa, pb) = (left_pattern(a).unwrap(), left_pattern(b).unwrap());
                let dist: usize = pa
                    .iter()
                    .zip(&pb)
                    .map(|(&x, &y)| (x as i32 - y as i32).unsigned_abs() as usize)
                    .sum();
                assert!(dist >= 2);
                min_dist = min_dist.min(dist);
            }
        }
        assert_eq!(min_dist, 2);
    }
}
