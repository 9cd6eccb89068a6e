//! Packed bit-vectors and the subset-enumeration helpers the rest of the
//! crate is built on.

use std::cmp::Ordering;
use std::fmt;

use crate::Error;

/// Bit-vector indexed by domain position. Bit `i` records membership of
/// point `i`. Ordering is lexicographic over the rendered bit string
/// ('0' < '1', position 0 first), so the all-zero vector sorts first.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Bits {
    len: usize,
    words: Vec<u64>,
}

impl Bits {
    pub fn zeros(len: usize) -> Self {
        Bits {
            len,
            words: vec![0; len.div_ceil(64)],
        }
    }

    pub fn from_bitstring(s: &str) -> Result<Self, Error> {
        let mut b = Bits::zeros(s.len());
        for (i, ch) in s.chars().enumerate() {
            match ch {
                '0' => {}
                '1' => b.set(i, true),
                other => {
                    return Err(Error::Parse(format!(
                        "invalid character {other:?} in bit string {s:?}"
                    )))
                }
            }
        }
        Ok(b)
    }

    pub fn to_bitstring(&self) -> String {
        (0..self.len)
            .map(|i| if self.get(i) { '1' } else { '0' })
            .collect()
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        (self.words[i / 64] >> (i % 64)) & 1 == 1
    }

    pub fn set(&mut self, i: usize, v: bool) {
        debug_assert!(i < self.len);
        if v {
            self.words[i / 64] |= 1u64 << (i % 64);
        } else {
            self.words[i / 64] &= !(1u64 << (i % 64));
        }
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len).filter(|&i| self.get(i))
    }

    /// Single-word view; `None` when the vector is longer than 64 bits.
    pub fn as_mask(&self) -> Option<u64> {
        if self.len <= 64 {
            Some(self.words.first().copied().unwrap_or(0))
        } else {
            None
        }
    }

    pub fn from_mask(mask: u64, len: usize) -> Self {
        assert!(len <= 64);
        debug_assert!(len == 64 || mask <= full_mask(len));
        let mut b = Bits::zeros(len);
        if !b.words.is_empty() {
            b.words[0] = mask;
        }
        b
    }

    /// The bits at `positions`, in the order given.
    pub fn gather(&self, positions: &[usize]) -> Bits {
        let mut out = Bits::zeros(positions.len());
        for (t, &p) in positions.iter().enumerate() {
            if self.get(p) {
                out.set(t, true);
            }
        }
        out
    }
}

impl Ord for Bits {
    fn cmp(&self, other: &Self) -> Ordering {
        match self.len.cmp(&other.len) {
            Ordering::Equal => {}
            ord => return ord,
        }
        for (a, b) in self.words.iter().zip(&other.words) {
            if a != b {
                let i = (a ^ b).trailing_zeros();
                // position i is the first differing bit; '0' < '1'
                return if (a >> i) & 1 == 0 {
                    Ordering::Less
                } else {
                    Ordering::Greater
                };
            }
        }
        Ordering::Equal
    }
}

impl PartialOrd for Bits {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Bits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Bits({})", self.to_bitstring())
    }
}

/// Mask with the low `n` bits set.
pub fn full_mask(n: usize) -> u64 {
    assert!(n <= 64);
    if n == 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

/// Order on point sets: lexicographic over sorted index vectors, so
/// `[0] < [0,1] < [0,1,2] < [0,2] < [1]`.
pub fn set_lex_cmp(mut a: u64, mut b: u64) -> Ordering {
    loop {
        match (a == 0, b == 0) {
            (true, true) => return Ordering::Equal,
            (true, false) => return Ordering::Less,
            (false, true) => return Ordering::Greater,
            (false, false) => {
                let la = a.trailing_zeros();
                let lb = b.trailing_zeros();
                if la != lb {
                    return la.cmp(&lb);
                }
                a &= a - 1;
                b &= b - 1;
            }
        }
    }
}

/// Order on {0,1}-functions sharing a domain mask: bit-string
/// lexicographic with '0' < '1', positions ascending.
pub fn fn_lex_cmp(a: u64, b: u64) -> Ordering {
    if a == b {
        return Ordering::Equal;
    }
    let i = (a ^ b).trailing_zeros();
    if (a >> i) & 1 == 0 {
        Ordering::Less
    } else {
        Ordering::Greater
    }
}

/// All nonempty subsets of `{0..n}` in `set_lex_cmp` order (DFS preorder
/// over extensions by a larger index).
pub fn masks_in_lex_order(n: usize) -> Vec<u64> {
    assert!(n <= 24, "subset enumeration is capped at 24 points");
    let mut out = Vec::with_capacity((1usize << n) - 1);
    fn go(start: usize, n: usize, cur: u64, out: &mut Vec<u64>) {
        for i in start..n {
            let m = cur | (1u64 << i);
            out.push(m);
            go(i + 1, n, m, out);
        }
    }
    go(0, n, 0, &mut out);
    out
}

/// Size-`k` subsets of `{0..n}` as masks, in `set_lex_cmp` order.
pub fn combination_masks(n: usize, k: usize) -> Vec<u64> {
    assert!(n <= 64);
    let mut out = Vec::new();
    if k > n {
        return out;
    }
    if k == 0 {
        out.push(0);
        return out;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        let mask = idx.iter().fold(0u64, |m, &i| m | (1u64 << i));
        out.push(mask);
        // advance to next combination in lex order
        let mut pos = k;
        loop {
            if pos == 0 {
                return out;
            }
            pos -= 1;
            if idx[pos] + 1 <= n - (k - pos) {
                idx[pos] += 1;
                for j in pos + 1..k {
                    idx[j] = idx[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// Subsets of `mask` with at most `max_size` elements, ordered by
/// (size ascending, then `set_lex_cmp`).
pub fn subsets_within(mask: u64, max_size: usize) -> Vec<u64> {
    let members: Vec<usize> = (0..64).filter(|&i| (mask >> i) & 1 == 1).collect();
    let mut out = Vec::new();
    for k in 0..=max_size.min(members.len()) {
        for sub in combination_masks(members.len(), k) {
            let mut m = 0u64;
            let mut s = sub;
            while s != 0 {
                let t = s.trailing_zeros() as usize;
                m |= 1u64 << members[t];
                s &= s - 1;
            }
            out.push(m);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bitstring_round_trip() {
        let b = Bits::from_bitstring("0101").unwrap();
        assert_eq!(b.to_bitstring(), "0101");
        assert_eq!(b.count_ones(), 2);
        assert!(!b.get(0) && b.get(1) && !b.get(2) && b.get(3));
        assert!(Bits::from_bitstring("01x1").is_err());
    }

    #[test]
    fn lexicographic_order_matches_strings() {
        let strings = ["00", "01", "10", "11"];
        let mut bits: Vec<Bits> = strings
            .iter()
            .map(|s| Bits::from_bitstring(s).unwrap())
            .collect();
        bits.sort();
        let sorted: Vec<String> = bits.iter().map(|b| b.to_bitstring()).collect();
        assert_eq!(sorted, strings);
    }

    #[test]
    fn long_vectors_cross_word_boundaries() {
        let mut b = Bits::zeros(130);
        b.set(0, true);
        b.set(64, true);
        b.set(129, true);
        assert_eq!(b.count_ones(), 3);
        assert_eq!(b.iter_ones().collect::<Vec<_>>(), vec![0, 64, 129]);
        let s = b.to_bitstring();
        let back = Bits::from_bitstring(&s).unwrap();
        assert_eq!(back, b);
        assert!(b.as_mask().is_none());
    }

    #[test]
    fn set_lex_order_over_index_vectors() {
        // [0] < [0,1] < [0,1,2] < [0,2] < [1] < [1,2] < [2]
        let expected: Vec<u64> = vec![0b001, 0b011, 0b111, 0b101, 0b010, 0b110, 0b100];
        assert_eq!(masks_in_lex_order(3), expected);
        let mut shuffled = expected.clone();
        shuffled.reverse();
        shuffled.sort_by(|a, b| set_lex_cmp(*a, *b));
        assert_eq!(shuffled, expected);
    }

    #[test]
    fn combinations_in_lex_order() {
        assert_eq!(combination_masks(4, 2), vec![0b0011, 0b0101, 0b1001, 0b0110, 0b1010, 0b1100]);
        assert_eq!(combination_masks(3, 0), vec![0]);
        assert_eq!(combination_masks(2, 3), Vec::<u64>::new());
    }

    #[test]
    fn subsets_within_size_then_lex() {
        let subs = subsets_within(0b1011, 1);
        assert_eq!(subs, vec![0, 0b0001, 0b0010, 0b1000]);
        let all = subsets_within(0b101, 2);
        assert_eq!(all, vec![0, 0b001, 0b100, 0b101]);
    }

    #[test]
    fn gather_collects_in_position_order() {
        let b = Bits::from_bitstring("0110").unwrap();
        assert_eq!(b.gather(&[0, 3]).to_bitstring(), "00");
        assert_eq!(b.gather(&[1, 2, 3]).to_bitstring(), "110");
    }
}
