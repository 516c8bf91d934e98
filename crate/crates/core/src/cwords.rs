//! Constant-weight binary words.
//!
//! A [`Word`] of length `n` and weight `w` is both a labeling of a sample
//! (position `i` carries label `1` when its bit is set) and a vertex of the
//! Johnson graph `J(n, w)`. Words are bit-packed into a `u64`, so `n <= 64`.
//!
//! Position `i` of the word (0-based) is bit `i` of the packed value and the
//! `i`-th character of the bit-string form, so `"1100"` has positions 0 and 1
//! set. With that packing, colexicographic order of the set-bit positions is
//! the numeric order of the packed values, which is what [`enumerate_words`],
//! [`Word::rank`] and [`unrank`] use.

use std::fmt;

use crate::{Error, Result};

/// Largest supported word length.
pub const MAX_LEN: usize = 64;

/// Enumerations larger than this are refused instead of materialised.
const MAX_ENUMERATION: u64 = 1 << 32;

/// `C(n, k)`, zero when `k > n`. Exact for every `n <= 64`.
pub fn binomial(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 1..=k {
        acc = acc * (n - k + i) as u128 / i as u128;
    }
    acc as u64
}

fn check_shape(n: usize, w: usize) -> Result<()> {
    if n == 0 || n > MAX_LEN {
        return Err(Error::param(format!("word length {n} outside 1..={MAX_LEN}")));
    }
    if w == 0 || w >= n {
        return Err(Error::param(format!("weight {w} must satisfy 0 < w < n = {n}")));
    }
    Ok(())
}

fn mask(n: usize) -> u64 {
    if n == 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

/// A binary word of length `n` with `w` set bits, `0 < w < n`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word {
    bits: u64,
    n: u8,
}

impl Word {
    /// Builds a word from packed bits, validating length and weight.
    pub fn new(bits: u64, n: usize) -> Result<Self> {
        if n == 0 || n > MAX_LEN {
            return Err(Error::param(format!("word length {n} outside 1..={MAX_LEN}")));
        }
        if bits & !mask(n) != 0 {
            return Err(Error::param(format!("bits set beyond length {n}")));
        }
        check_shape(n, bits.count_ones() as usize)?;
        Ok(Word { bits, n: n as u8 })
    }

    /// Word with ones exactly at `positions` (0-based).
    pub fn from_positions(n: usize, positions: &[usize]) -> Result<Self> {
        let mut bits = 0u64;
        for &p in positions {
            if p >= n {
                return Err(Error::param(format!("position {p} outside word of length {n}")));
            }
            if bits & (1 << p) != 0 {
                return Err(Error::param(format!("position {p} repeated")));
            }
            bits |= 1 << p;
        }
        Word::new(bits, n)
    }

    /// The first `w` positions set, i.e. the colex-first word of `S(n, w)`.
    pub fn first(n: usize, w: usize) -> Result<Self> {
        check_shape(n, w)?;
        Ok(Word {
            bits: mask(w),
            n: n as u8,
        })
    }

    pub(crate) fn from_raw(bits: u64, n: usize) -> Self {
        debug_assert!(bits & !mask(n) == 0);
        Word { bits, n: n as u8 }
    }

    pub fn bits(&self) -> u64 {
        self.bits
    }

    pub fn len(&self) -> usize {
        self.n as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn weight(&self) -> usize {
        self.bits.count_ones() as usize
    }

    pub fn get(&self, i: usize) -> bool {
        i < self.len() && self.bits & (1 << i) != 0
    }

    /// Positions holding a one, increasing.
    pub fn ones(&self) -> impl Iterator<Item = usize> {
        BitIter(self.bits)
    }

    /// Positions holding a zero, increasing.
    pub fn zeros(&self) -> impl Iterator<Item = usize> {
        BitIter(!self.bits & mask(self.len()))
    }

    /// Bitwise complement; maps `S(n, w)` onto `S(n, n - w)`.
    pub fn complement(&self) -> Word {
        Word {
            bits: !self.bits & mask(self.len()),
            n: self.n,
        }
    }

    /// Position of this word in colexicographic order of `S(n, w)`.
    pub fn rank(&self) -> u64 {
        self.ones().enumerate().map(|(k, pos)| binomial(pos, k + 1)).sum()
    }

    /// `(i j) . word` for `word[i] = 1` and `word[j] = 0`.
    pub fn transpose(&self, i: usize, j: usize) -> Result<Word> {
        if i >= self.len() || j >= self.len() {
            return Err(Error::param(format!(
                "transposition ({i} {j}) outside word of length {}",
                self.len()
            )));
        }
        if !self.get(i) || self.get(j) {
            return Err(Error::param(format!(
                "transposition ({i} {j}) needs a one at {i} and a zero at {j}"
            )));
        }
        Ok(self.swap_unchecked(i, j))
    }

    pub(crate) fn swap_unchecked(&self, i: usize, j: usize) -> Word {
        Word {
            bits: self.bits ^ (1 << i) ^ (1 << j),
            n: self.n,
        }
    }

    /// All words at Hamming distance 2: one per (one, zero) position pair,
    /// ordered by the one position, then the zero position.
    pub fn neighbors(&self) -> Vec<Word> {
        let mut out = Vec::with_capacity(self.weight() * (self.len() - self.weight()));
        for i in self.ones() {
            for j in self.zeros() {
                out.push(self.swap_unchecked(i, j));
            }
        }
        out
    }

    /// Parses an ASCII bit-string such as `"01101"`.
    pub fn parse(s: &str) -> Result<Word> {
        let s = s.trim();
        if s.is_empty() || s.len() > MAX_LEN {
            return Err(Error::input(format!("word '{s}' must have 1..={MAX_LEN} bits")));
        }
        let mut bits = 0u64;
        for (i, c) in s.chars().enumerate() {
            match c {
                '1' => bits |= 1 << i,
                '0' => {}
                _ => return Err(Error::input(format!("word '{s}' contains '{c}'"))),
            }
        }
        Word::new(bits, s.len()).map_err(|e| match e {
            Error::Parameter(m) => Error::Input(format!("word '{s}': {m}")),
            other => other,
        })
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len() {
            f.write_str(if self.get(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Word({self})")
    }
}

struct BitIter(u64);

impl Iterator for BitIter {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        if self.0 == 0 {
            return None;
        }
        let i = self.0.trailing_zeros() as usize;
        self.0 &= self.0 - 1;
        Some(i)
    }
}

/// Lazily walks `S(n, w)` in colexicographic order.
#[derive(Clone, Debug)]
pub struct Words {
    next: u64,
    remaining: u64,
    n: usize,
}

impl Words {
    pub fn new(n: usize, w: usize) -> Result<Self> {
        check_shape(n, w)?;
        Ok(Words {
            next: mask(w),
            remaining: binomial(n, w),
            n,
        })
    }
}

impl Iterator for Words {
    type Item = Word;

    fn next(&mut self) -> Option<Word> {
        if self.remaining == 0 {
            return None;
        }
        let current = self.next;
        self.remaining -= 1;
        if self.remaining > 0 {
            // Gosper's hack: next integer with the same popcount.
            let low = current & current.wrapping_neg();
            let ripple = current.wrapping_add(low);
            self.next = (((ripple ^ current) >> 2) / low) | ripple;
        }
        Some(Word::from_raw(current, self.n))
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let r = usize::try_from(self.remaining).unwrap_or(usize::MAX);
        (r, Some(r))
    }
}

/// All of `S(n, w)` in colexicographic order.
pub fn enumerate_words(n: usize, w: usize) -> Result<Vec<Word>> {
    check_shape(n, w)?;
    let count = binomial(n, w);
    if count > MAX_ENUMERATION {
        return Err(Error::resource(format!(
            "C({n},{w}) = {count} words is too many to list"
        )));
    }
    Ok(Words::new(n, w)?.collect())
}

/// Inverse of [`Word::rank`].
pub fn unrank(n: usize, w: usize, rank: u64) -> Result<Word> {
    check_shape(n, w)?;
    let total = binomial(n, w);
    if rank >= total {
        return Err(Error::param(format!("rank {rank} outside 0..{total} for S({n},{w})")));
    }
    let mut rest = rank;
    let mut bits = 0u64;
    let mut top = n;
    for k in (1..=w).rev() {
        // largest position p < top with C(p, k) <= rest
        let mut p = top - 1;
        while binomial(p, k) > rest {
            p -= 1;
        }
        bits |= 1 << p;
        rest -= binomial(p, k);
        top = p;
    }
    Ok(Word::from_raw(bits, n))
}

/// Number of positions where the words differ.
pub fn hamming(a: &Word, b: &Word) -> Result<usize> {
    if a.len() != b.len() {
        return Err(Error::param(format!(
            "hamming distance between lengths {} and {}",
            a.len(),
            b.len()
        )));
    }
    Ok((a.bits ^ b.bits).count_ones() as usize)
}

/// Parses the word-file format: one bit-string per line, blank lines and
/// `#` comments ignored. All words must share length and weight and be
/// distinct; an empty file is an input error.
pub fn parse_words(text: &str) -> Result<Vec<Word>> {
    let mut words: Vec<Word> = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let word = Word::parse(line).map_err(|e| Error::input(format!("line {}: {e}", lineno + 1)))?;
        if let Some(first) = words.first() {
            if first.len() != word.len() || first.weight() != word.weight() {
                return Err(Error::input(format!(
                    "line {}: word {word} does not match length {} and weight {} of the first word",
                    lineno + 1,
                    first.len(),
                    first.weight()
                )));
            }
        }
        words.push(word);
    }
    if words.is_empty() {
        return Err(Error::input("word file contains no words"));
    }
    let mut sorted = words.clone();
    sorted.sort();
    if let Some(pair) = sorted.windows(2).find(|p| p[0] == p[1]) {
        return Err(Error::input(format!("word {} listed twice", pair[0])));
    }
    Ok(words)
}

/// Inverse of [`parse_words`].
pub fn format_words(words: &[Word]) -> String {
    let mut out = String::new();
    for w in words {
        out.push_str(&w.to_string());
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn w(s: &str) -> Word {
        Word::parse(s).unwrap()
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(4, 2), 6);
        assert_eq!(binomial(5, 6), 0);
        assert_eq!(binomial(40, 20), 137_846_528_820);
        assert_eq!(binomial(64, 32), 1_832_624_140_942_590_534);
    }

    #[test]
    fn enumeration_sizes_and_order() {
        assert_eq!(enumerate_words(4, 2).unwrap().len(), 6);
        assert_eq!(enumerate_words(5, 2).unwrap().len(), 10);
        let singles: Vec<String> = enumerate_words(3, 1).unwrap().iter().map(|x| x.to_string()).collect();
        assert_eq!(singles, ["100", "010", "001"]);
        let pairs: Vec<String> = enumerate_words(4, 2).unwrap().iter().map(|x| x.to_string()).collect();
        assert_eq!(pairs, ["1100", "1010", "0110", "1001", "0101", "0011"]);
    }

    #[test]
    fn enumeration_is_complete_up_to_eight() {
        for n in 1..=8 {
            for k in 1..n {
                let all = enumerate_words(n, k).unwrap();
                assert_eq!(all.len() as u64, binomial(n, k));
                assert!(all.iter().all(|x| x.weight() == k && x.len() == n));
                assert!(all.windows(2).all(|p| p[0].bits() < p[1].bits()));
            }
        }
    }

    #[test]
    fn invalid_shapes() {
        assert!(matches!(enumerate_words(4, 0), Err(Error::Parameter(_))));
        assert!(matches!(enumerate_words(4, 4), Err(Error::Parameter(_))));
        assert!(matches!(enumerate_words(65, 3), Err(Error::Parameter(_))));
        assert!(matches!(unrank(4, 2, 6), Err(Error::Parameter(_))));
    }

    #[test]
    fn rank_examples() {
        let all = enumerate_words(4, 2).unwrap();
        assert_eq!(all[0].rank(), 0);
        assert_eq!(unrank(4, 2, 5).unwrap(), *all.last().unwrap());
        for r in 0..10 {
            assert_eq!(unrank(5, 2, r).unwrap().rank(), r);
        }
        for (r, x) in enumerate_words(7, 3).unwrap().iter().enumerate() {
            assert_eq!(x.rank(), r as u64);
        }
    }

    #[test]
    fn rank_roundtrip_to_thirty() {
        for n in 2..=30 {
            for k in 1..=4.min(n - 1) {
                let total = binomial(n, k);
                let step = (total / 500).max(1);
                let mut r = 0;
                while r < total {
                    assert_eq!(unrank(n, k, r).unwrap().rank(), r);
                    r += step;
                }
                assert_eq!(unrank(n, k, total - 1).unwrap().rank(), total - 1);
            }
        }
    }

    #[test]
    fn hamming_examples() {
        assert_eq!(hamming(&w("1100"), &w("0011")).unwrap(), 4);
        assert_eq!(hamming(&w("1100"), &w("1100")).unwrap(), 0);
        assert_eq!(hamming(&w("1100"), &w("1010")).unwrap(), 2);
        assert!(hamming(&w("1100"), &w("11000")).is_err());
    }

    #[test]
    fn transpose_examples() {
        // positions 1 and 3 in one-based terms
        assert_eq!(w("1100").transpose(0, 2).unwrap(), w("0110"));
        assert_eq!(w("10").transpose(0, 1).unwrap(), w("01"));
        let b = w("10110");
        assert_eq!(b.transpose(2, 1).unwrap().transpose(1, 2).unwrap(), b);
        assert!(b.transpose(1, 2).is_err());
        assert!(b.transpose(0, 9).is_err());
    }

    #[test]
    fn neighbor_examples() {
        let mut got: Vec<String> = w("1100").neighbors().iter().map(|x| x.to_string()).collect();
        got.sort();
        // every single transposition of 1100, enumerated by hand
        let mut expected = vec!["0110", "0101", "1010", "1001"];
        expected.sort();
        assert_eq!(got, expected);
        for x in enumerate_words(4, 2).unwrap() {
            assert_eq!(x.neighbors().len(), 4);
        }
        for x in enumerate_words(5, 2).unwrap() {
            assert_eq!(x.neighbors().len(), 6);
        }
    }

    #[test]
    fn neighbors_are_the_distance_two_words() {
        for n in 2..=7 {
            for k in 1..n {
                let all = enumerate_words(n, k).unwrap();
                for a in &all {
                    let mut nb = a.neighbors();
                    nb.sort();
                    let mut brute: Vec<Word> = all.iter().filter(|b| hamming(a, b).unwrap() == 2).copied().collect();
                    brute.sort();
                    assert_eq!(nb, brute);
                }
            }
        }
    }

    #[test]
    fn word_file_parsing() {
        let words = parse_words("# code\n1100\n\n0011  # second\n").unwrap();
        assert_eq!(words, vec![w("1100"), w("0011")]);
        assert_eq!(format_words(&words), "1100\n0011\n");
        assert!(matches!(parse_words(""), Err(Error::Input(_))));
        assert!(matches!(parse_words("# nothing\n"), Err(Error::Input(_))));
        assert!(matches!(parse_words("1100\n110\n"), Err(Error::Input(_))));
        assert!(matches!(parse_words("1100\n1110\n"), Err(Error::Input(_))));
        assert!(matches!(parse_words("1100\n1100\n"), Err(Error::Input(_))));
        assert!(matches!(parse_words("11a0\n"), Err(Error::Input(_))));
        assert!(matches!(parse_words("1111\n"), Err(Error::Input(_))));
    }

    proptest! {
        #[test]
        fn equal_weight_distances_are_even(n in 2usize..=64, seed_a: u64, seed_b: u64) {
            let k = 1 + (seed_a as usize % (n - 1));
            let total = binomial(n, k);
            let a = unrank(n, k, seed_a % total).unwrap();
            let b = unrank(n, k, seed_b % total).unwrap();
            prop_assert_eq!(hamming(&a, &b).unwrap() % 2, 0);
            prop_assert_eq!(a.complement().complement(), a);
            prop_assert_eq!(Word::parse(&a.to_string()).unwrap(), a);
        }
    }
}
