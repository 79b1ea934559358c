//! Fixed-length binary vectors.
//!
//! A [`BitVector`] plays three roles in this crate: a hypothesis on an
//! indexed domain, a subset indicator (training set), and a codeword.
//! Indices are 0-based in the API; the classical 1-origin convention is
//! applied where it matters, namely in the residue arithmetic (weights run
//! 1..=m) and in textual form, where the first character is position 1.

use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};

const WORD_BITS: usize = 64;

/// A fixed-length vector of bits with value semantics.
///
/// Ordering is lexicographic over the bit string (leftmost bit most
/// significant), which is the canonical order used for hypotheses, edges and
/// every deterministic iteration downstream.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitVector {
    len: usize,
    words: Vec<u64>,
}

impl BitVector {
    /// The all-zeros vector of the given length.
    pub fn zeros(len: usize) -> Self {
        assert!(len >= 1, "BitVector length must be at least 1");
        BitVector {
            len,
            words: vec![0; len.div_ceil(WORD_BITS)],
        }
    }

    /// The indicator of a single position.
    pub fn unit(len: usize, pos: usize) -> Self {
        let mut v = BitVector::zeros(len);
        v.set(pos, true);
        v
    }

    /// Builds a vector from `0`/`1` characters, leftmost character first.
    pub fn parse(s: &str) -> Result<Self> {
        if s.is_empty() {
            return Err(Error::Input("empty bit string".into()));
        }
        let mut v = BitVector::zeros(s.len());
        for (i, c) in s.chars().enumerate() {
            match c {
                '0' => {}
                '1' => v.set(i, true),
                _ => {
                    return Err(Error::Input(format!(
                        "invalid character {c:?} at position {}; expected '0' or '1'",
                        i + 1
                    )))
                }
            }
        }
        Ok(v)
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        false // length is always >= 1
    }

    #[inline]
    pub fn get(&self, pos: usize) -> bool {
        assert!(pos < self.len, "bit index {pos} out of range {}", self.len);
        (self.words[pos / WORD_BITS] >> (pos % WORD_BITS)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, pos: usize, value: bool) {
        assert!(pos < self.len, "bit index {pos} out of range {}", self.len);
        let mask = 1u64 << (pos % WORD_BITS);
        if value {
            self.words[pos / WORD_BITS] |= mask;
        } else {
            self.words[pos / WORD_BITS] &= !mask;
        }
    }

    /// Copy with one bit set.
    pub fn with_bit(&self, pos: usize, value: bool) -> Self {
        let mut v = self.clone();
        v.set(pos, value);
        v
    }

    pub fn ones_count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Positions (0-based, ascending) carrying a 1.
    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut bits = w;
            std::iter::from_fn(move || {
                if bits == 0 {
                    None
                } else {
                    let b = bits.trailing_zeros() as usize;
                    bits &= bits - 1;
                    Some(wi * WORD_BITS + b)
                }
            })
        })
    }

    /// Positions (0-based, ascending) carrying a 0.
    pub fn iter_zeros(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len).filter(move |&p| !self.get(p))
    }

    /// Raw storage words, low positions in low bits; used for keyed mixing.
    pub fn words(&self) -> &[u64] {
        &self.words
    }

    /// Number of positions where `self` and `other` differ.
    pub fn hamming_distance(&self, other: &BitVector) -> Result<usize> {
        if self.len != other.len {
            return Err(Error::Input(format!(
                "length mismatch: {} vs {}",
                self.len, other.len
            )));
        }
        Ok(self
            .words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a ^ b).count_ones() as usize)
            .sum())
    }

    /// The unique differing position, if the Hamming distance is exactly 1.
    pub fn single_difference(&self, other: &BitVector) -> Result<Option<usize>> {
        if self.hamming_distance(other)? != 1 {
            return Ok(None);
        }
        for (wi, (a, b)) in self.words.iter().zip(&other.words).enumerate() {
            let x = a ^ b;
            if x != 0 {
                return Ok(Some(wi * WORD_BITS + x.trailing_zeros() as usize));
            }
        }
        unreachable!("distance 1 implies a differing word");
    }
}

impl Ord for BitVector {
    fn cmp(&self, other: &Self) -> Ordering {
        // Lexicographic over bit strings: the first differing position
        // decides, and there '0' < '1'. Within a word, lower bit index is
        // the earlier position, so compare at the lowest differing bit.
        match self.len.cmp(&other.len) {
            Ordering::Equal => {}
            ord => return ord,
        }
        for (a, b) in self.words.iter().zip(&other.words) {
            let x = a ^ b;
            if x != 0 {
                let bit = x.trailing_zeros();
                return if (a >> bit) & 1 == 0 {
                    Ordering::Less
                } else {
                    Ordering::Greater
                };
            }
        }
        Ordering::Equal
    }
}

impl PartialOrd for BitVector {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for pos in 0..self.len {
            f.write_str(if self.get(pos) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitVector({self})")
    }
}

/// All `2^m` vectors of length `m` in lexicographic order. Guarded for desk
/// scale; exhaustive sweeps in this crate stay at `m <= 24`.
pub fn all_vectors(m: usize) -> Result<impl Iterator<Item = BitVector>> {
    if m > 24 {
        return Err(Error::Capacity(format!(
            "exhaustive enumeration of {{0,1}}^{m} exceeds the m <= 24 limit"
        )));
    }
    // Bit i of the counter maps to position m-1-i, so counter order equals
    // lexicographic order of the emitted strings.
    Ok((0u64..(1u64 << m)).map(move |x| {
        let mut v = BitVector::zeros(m);
        for pos in 0..m {
            if (x >> (m - 1 - pos)) & 1 == 1 {
                v.set(pos, true);
            }
        }
        v
    }))
}

/// A uniform random `k`-subset of `m` positions (partial Fisher-Yates).
pub fn random_k_subset(stream: &mut crate::mix::SplitMix, m: usize, k: usize) -> BitVector {
    assert!(k <= m && m >= 1);
    let mut pool: Vec<usize> = (0..m).collect();
    let mut s = BitVector::zeros(m);
    for i in 0..k {
        let j = i + stream.uniform((m - i) as u64) as usize;
        pool.swap(i, j);
        s.set(pool[i], true);
    }
    s
}

/// All length-`m` vectors with exactly `k` ones, in lexicographic order.
pub fn k_subsets(m: usize, k: usize) -> impl Iterator<Item = BitVector> {
    assert!(k <= m, "k_subsets requires k <= m");
    // Next-combination walk over ascending position tuples. Tuple order is
    // the reverse of lexicographic order on the emitted strings, so the
    // collected vectors are sorted before returning.
    let mut positions: Vec<usize> = (0..k).collect();
    let mut done = k > m;
    let mut out: Vec<BitVector> = Vec::new();
    while !done {
        let mut v = BitVector::zeros(m.max(1));
        for &p in &positions {
            v.set(p, true);
        }
        out.push(v);
        if k == 0 {
            break;
        }
        // advance
        let mut i = k;
        loop {
            if i == 0 {
                done = true;
                break;
            }
            i -= 1;
            if positions[i] != i + m - k {
                positions[i] += 1;
                for j in i + 1..k {
                    positions[j] = positions[j - 1] + 1;
                }
                break;
            }
        }
    }
    out.sort();
    out.into_iter()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parse_and_display_round_trip() {
        let v = BitVector::parse("0101").unwrap();
        assert_eq!(v.to_string(), "0101");
        assert_eq!(v.ones_count(), 2);
        assert!(!v.get(0) && v.get(1) && !v.get(2) && v.get(3));
    }

    #[test]
    fn parse_rejects_bad_input() {
        assert!(matches!(BitVector::parse(""), Err(Error::Input(_))));
        assert!(matches!(BitVector::parse("01x1"), Err(Error::Input(_))));
    }

    #[test]
    fn hamming_examples() {
        let z4 = BitVector::zeros(4);
        assert_eq!(z4.hamming_distance(&z4).unwrap(), 0);
        // the petal at position 2 differs from the center on one point
        let f0 = BitVector::zeros(3);
        let f2 = BitVector::unit(3, 1);
        assert_eq!(f0.hamming_distance(&f2).unwrap(), 1);
        let a = BitVector::parse("1100").unwrap();
        let b = BitVector::parse("0011").unwrap();
        assert_eq!(a.hamming_distance(&b).unwrap(), 4);
    }

    #[test]
    fn hamming_rejects_length_mismatch() {
        let a = BitVector::zeros(3);
        let b = BitVector::zeros(4);
        assert!(matches!(a.hamming_distance(&b), Err(Error::Input(_))));
    }

    #[test]
    fn single_difference_finds_the_coordinate() {
        let a = BitVector::parse("0110").unwrap();
        let b = BitVector::parse("0100").unwrap();
        assert_eq!(a.single_difference(&b).unwrap(), Some(2));
        assert_eq!(a.single_difference(&a).unwrap(), None);
    }

    #[test]
    fn k_subsets_counts_and_order() {
        let subs: Vec<_> = k_subsets(4, 2).collect();
        assert_eq!(subs.len(), 6);
        let strings: Vec<_> = subs.iter().map(|v| v.to_string()).collect();
        let mut sorted = strings.clone();
        sorted.sort();
        assert_eq!(strings, sorted, "emitted in lexicographic order");
        assert!(subs.iter().all(|v| v.ones_count() == 2));
    }

    #[test]
    fn all_vectors_is_lexicographic_and_complete() {
        let vs: Vec<_> = all_vectors(3).unwrap().collect();
        assert_eq!(vs.len(), 8);
        let strings: Vec<_> = vs.iter().map(|v| v.to_string()).collect();
        assert_eq!(
            strings,
            vec!["000", "001", "010", "011", "100", "101", "110", "111"]
        );
    }

    fn same_length_pair() -> impl Strategy<Value = (String, String)> {
        (1usize..70).prop_flat_map(|len| {
            let s = proptest::collection::vec(proptest::bool::ANY, len).prop_map(|bits| {
                bits.into_iter()
                    .map(|b| if b { '1' } else { '0' })
                    .collect::<String>()
            });
            (s.clone(), s)
        })
    }

    proptest! {
        #[test]
        fn ordering_matches_string_ordering((a, b) in same_length_pair()) {
            let va = BitVector::parse(&a).unwrap();
            let vb = BitVector::parse(&b).unwrap();
            prop_assert_eq!(va.cmp(&vb), a.cmp(&b));
        }

        #[test]
        fn ones_iteration_agrees_with_get(s in "[01]{1,70}") {
            let v = BitVector::parse(&s).unwrap();
            let ones: Vec<usize> = v.iter_ones().collect();
            let expected: Vec<usize> =
                (0..v.len()).filter(|&p| v.get(p)).collect();
            prop_assert_eq!(ones, expected);
            prop_assert_eq!(v.ones_count(), v.iter_ones().count());
        }
    }
}
