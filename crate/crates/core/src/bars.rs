//! Finite binary sequences and depth-bounded bar analysis.
//!
//! A bar is a set of finite binary strings met by every path through the
//! full binary tree. All path quantifiers here are truncated at an explicit
//! depth bound `d`: "every infinite path" becomes "every string of length
//! `d`", which makes each notion decidable by enumeration. The bound is an
//! argument of every operation so callers can report it alongside results.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum BarSetError {
    #[error("line {line}: cannot parse `{text}` as a binary sequence")]
    BadSequence { line: usize, text: String },
    #[error("member `{0}` exceeds the declared depth {1}")]
    DepthExceeded(BinarySeq, u32),
}

/// A finite binary sequence of length at most 63.
///
/// The canonical textual form is a string over `{0,1}`; `e` denotes the
/// empty sequence. The derived order is shortlex: by length first, then
/// lexicographically with the first element most significant.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct BinarySeq {
    len: u8,
    // bit i holds element i
    bits: u64,
}

impl BinarySeq {
    pub const MAX_LEN: usize = 63;

    pub fn empty() -> Self {
        BinarySeq { len: 0, bits: 0 }
    }

    pub fn from_bits(bits: &[u8]) -> Self {
        assert!(bits.len() <= Self::MAX_LEN, "sequence too long");
        let mut b = 0u64;
        for (i, &bit) in bits.iter().enumerate() {
            assert!(bit <= 1, "bits must be 0 or 1");
            b |= u64::from(bit) << i;
        }
        BinarySeq { len: bits.len() as u8, bits: b }
    }

    pub fn len(&self) -> usize {
        self.len as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Element `i`, counted from the start of the sequence.
    pub fn bit(&self, i: usize) -> u8 {
        assert!(i < self.len());
        ((self.bits >> i) & 1) as u8
    }

    pub fn push(&self, bit: u8) -> Self {
        assert!(bit <= 1);
        assert!(self.len() < Self::MAX_LEN);
        BinarySeq { len: self.len + 1, bits: self.bits | (u64::from(bit) << self.len) }
    }

    /// The first `n` elements.
    pub fn prefix(&self, n: usize) -> Self {
        assert!(n <= self.len());
        let mask = if n == 0 { 0 } else { u64::MAX >> (64 - n) };
        BinarySeq { len: n as u8, bits: self.bits & mask }
    }

    pub fn concat(&self, v: &Self) -> Self {
        assert!(self.len() + v.len() <= Self::MAX_LEN);
        BinarySeq { len: self.len + v.len, bits: self.bits | (v.bits << self.len) }
    }

    /// True when `self` is an initial segment of `other` (including equality).
    pub fn is_prefix_of(&self, other: &Self) -> bool {
        self.len <= other.len && other.prefix(self.len()) == *self
    }

    pub fn is_strict_prefix_of(&self, other: &Self) -> bool {
        self.len < other.len && self.is_prefix_of(other)
    }

    pub fn parent(&self) -> Option<Self> {
        if self.len == 0 { None } else { Some(self.prefix(self.len() - 1)) }
    }

    /// The other child of this node's parent; `None` at the root.
    pub fn sibling(&self) -> Option<Self> {
        if self.len == 0 {
            None
        } else {
            Some(BinarySeq { len: self.len, bits: self.bits ^ (1 << (self.len - 1)) })
        }
    }

    pub fn last(&self) -> Option<u8> {
        if self.len == 0 { None } else { Some(self.bit(self.len() - 1)) }
    }

    /// The suffix after dropping a prefix of length `n`.
    pub fn suffix_from(&self, n: usize) -> Self {
        assert!(n <= self.len());
        BinarySeq { len: self.len - n as u8, bits: self.bits >> n }
    }

    /// All initial segments, from the empty sequence up to `self`.
    pub fn prefixes(&self) -> impl Iterator<Item = BinarySeq> + Clone + '_ {
        (0..=self.len()).map(move |n| self.prefix(n))
    }

    /// Numeric value with the first element most significant; used for
    /// lexicographic ordering within a level and for tree indexing.
    pub fn lex_value(&self) -> u64 {
        let mut v = 0u64;
        for i in 0..self.len() {
            v = (v << 1) | u64::from(self.bit(i));
        }
        v
    }

    /// Breadth-first index of the node in the full binary tree: the empty
    /// sequence is 0, level `n` occupies `2^n - 1 .. 2^(n+1) - 1` in
    /// lexicographic order.
    pub fn tree_index(&self) -> usize {
        ((1u64 << self.len()) - 1 + self.lex_value()) as usize
    }

    /// Inverse of [`tree_index`](Self::tree_index).
    pub fn from_tree_index(idx: usize) -> Self {
        let x = (idx + 1) as u64;
        let len = 63 - x.leading_zeros() as usize;
        let value = x - (1 << len);
        Self::from_level_value(len, value)
    }

    fn from_level_value(len: usize, value: u64) -> Self {
        let mut bits = 0u64;
        for i in 0..len {
            if (value >> (len - 1 - i)) & 1 == 1 {
                bits |= 1 << i;
            }
        }
        BinarySeq { len: len as u8, bits }
    }

    /// All sequences of length exactly `n`, in lexicographic order.
    pub fn level(n: usize) -> impl Iterator<Item = BinarySeq> {
        assert!(n <= Self::MAX_LEN);
        (0..(1u64 << n)).map(move |v| Self::from_level_value(n, v))
    }

    /// All sequences of length at most `d`, in shortlex order.
    pub fn up_to(d: usize) -> impl Iterator<Item = BinarySeq> {
        (0..=d).flat_map(Self::level)
    }
}

impl Ord for BinarySeq {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.len
            .cmp(&other.len)
            .then_with(|| self.lex_value().cmp(&other.lex_value()))
    }
}

impl PartialOrd for BinarySeq {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for BinarySeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return f.write_str("e");
        }
        for i in 0..self.len() {
            write!(f, "{}", self.bit(i))?;
        }
        Ok(())
    }
}

// Debug mirrors Display; sequences read better as `01` than as a struct dump.
impl fmt::Debug for BinarySeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl FromStr for BinarySeq {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "e" {
            return Ok(Self::empty());
        }
        if s.is_empty() || s.len() > Self::MAX_LEN {
            return Err(format!("bad sequence `{s}`"));
        }
        let mut out = Self::empty();
        for c in s.chars() {
            match c {
                '0' => out = out.push(0),
                '1' => out = out.push(1),
                _ => return Err(format!("bad sequence `{s}`")),
            }
        }
        Ok(out)
    }
}

/// A finite set of binary sequences together with the depth it was drawn
/// from. Membership is by lookup; all bar notions are relative to an
/// explicit depth argument.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FiniteBarSet {
    members: BTreeSet<BinarySeq>,
    depth: u32,
}

impl FiniteBarSet {
    pub fn new(members: BTreeSet<BinarySeq>, depth: u32) -> Result<Self, BarSetError> {
        if let Some(bad) = members.iter().find(|m| m.len() > depth as usize) {
            return Err(BarSetError::DepthExceeded(*bad, depth));
        }
        Ok(FiniteBarSet { members, depth })
    }

    pub fn from_members<I: IntoIterator<Item = BinarySeq>>(members: I) -> Self {
        let members: BTreeSet<_> = members.into_iter().collect();
        let depth = members.iter().map(|m| m.len() as u32).max().unwrap_or(0);
        FiniteBarSet { members, depth }
    }

    /// Parses the line-oriented format: one sequence per line (`e` for the
    /// empty sequence), `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self, BarSetError> {
        let mut members = BTreeSet::new();
        for (i, raw) in text.lines().enumerate() {
            let line = match raw.find('#') {
                Some(pos) => &raw[..pos],
                None => raw,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            let seq: BinarySeq = line
                .parse()
                .map_err(|_| BarSetError::BadSequence { line: i + 1, text: line.to_string() })?;
            members.insert(seq);
        }
        Ok(Self::from_members(members))
    }

    pub fn members(&self) -> &BTreeSet<BinarySeq> {
        &self.members
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, u: &BinarySeq) -> bool {
        self.members.contains(u)
    }

    /// True when some initial segment of `u` (including `u` itself) is a
    /// member.
    pub fn covers(&self, u: &BinarySeq) -> bool {
        u.prefixes().any(|p| self.members.contains(&p))
    }

    /// Bar-hood at depth `d`: every sequence of length `d` has an initial
    /// segment in the set.
    pub fn is_bar(&self, d: u32) -> bool {
        BinarySeq::level(d as usize).all(|alpha| self.covers(&alpha))
    }

    /// Least `n <= d` such that every sequence of length `n` has an initial
    /// segment in the set, if any. A returned witness at `n` implies
    /// [`is_bar`](Self::is_bar) at every `d >= n`.
    pub fn uniform_witness(&self, d: u32) -> Option<u32> {
        (0..=d).find(|&n| BinarySeq::level(n as usize).all(|alpha| self.covers(&alpha)))
    }

    /// Closure under extensions within depth `d`: all sequences of length
    /// at most `d` with some initial segment in the set.
    pub fn close_under_extensions(&self, d: u32) -> FiniteBarSet {
        let members = BinarySeq::up_to(d as usize).filter(|u| self.covers(u)).collect();
        FiniteBarSet { members, depth: d }
    }

    /// True when the set is closed under extensions within depth `d`.
    pub fn is_extension_closed(&self, d: u32) -> bool {
        self.members.iter().all(|u| {
            (0..=1u8).all(|b| {
                u.len() >= d as usize || self.members.contains(&u.push(b))
            })
        })
    }

    /// The half-a-level weakening of uniformity: some level `n <= d` has at
    /// least half of its sequences covered. At `n = 0` the root must be
    /// covered, i.e. the single length-0 string counts as the whole level.
    pub fn is_weakly_uniform(&self, d: u32) -> bool {
        assert!(d >= 1, "weak uniformity needs depth at least 1");
        (0..=d).any(|n| {
            if n == 0 {
                return self.covers(&BinarySeq::empty());
            }
            let covered = BinarySeq::level(n as usize).filter(|alpha| self.covers(alpha)).count();
            covered as u64 >= 1u64 << (n - 1)
        })
    }
}

impl fmt::Display for FiniteBarSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for m in &self.members {
            writeln!(f, "{m}")?;
        }
        Ok(())
    }
}

/// The set induced by "all extensions stay inside `cprime`": `u` is kept
/// iff every extension of `u` within depth `d` (including `u` itself) lies
/// in `cprime`. The result is always extension-closed within `d`.
pub fn c_set_from(cprime: &FiniteBarSet, d: u32) -> FiniteBarSet {
    let members = BinarySeq::up_to(d as usize)
        .filter(|u| {
            BinarySeq::up_to(d as usize - u.len())
                .all(|v| cprime.contains(&u.concat(&v)))
        })
        .collect();
    FiniteBarSet { members, depth: d }
}

/// The set carved out of a decidable relation on (sequence, number) pairs:
/// `u` is kept iff `(u, n)` is in `s` for every `n <= nbound`. No closure
/// is applied.
pub fn pi01_set_from(s: &BTreeSet<(BinarySeq, u32)>, nbound: u32, d: u32) -> FiniteBarSet {
    let members = BinarySeq::up_to(d as usize)
        .filter(|u| (0..=nbound).all(|n| s.contains(&(*u, n))))
        .collect();
    FiniteBarSet { members, depth: d }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand_chacha::rand_core::{RngCore, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn seq(s: &str) -> BinarySeq {
        s.parse().unwrap()
    }

    fn set(items: &[&str]) -> FiniteBarSet {
        FiniteBarSet::from_members(items.iter().map(|s| seq(s)))
    }

    fn random_set(rng: &mut ChaCha8Rng, d: usize) -> FiniteBarSet {
        FiniteBarSet::from_members(
            BinarySeq::up_to(d).filter(|_| rng.next_u64() % 2 == 0),
        )
    }

    #[test]
    fn sequence_basics() {
        let u = seq("011");
        assert_eq!(u.len(), 3);
        assert_eq!((u.bit(0), u.bit(1), u.bit(2)), (0, 1, 1));
        assert_eq!(u.prefix(2), seq("01"));
        assert_eq!(u.to_string(), "011");
        assert_eq!(seq("e"), BinarySeq::empty());
        assert_eq!(seq("01").concat(&seq("10")), seq("0110"));
        assert!(seq("01").is_prefix_of(&seq("011")));
        assert!(!seq("10").is_prefix_of(&seq("011")));
        assert_eq!(seq("01").sibling(), Some(seq("00")));
        assert_eq!(seq("011").suffix_from(1), seq("11"));
        assert_eq!(BinarySeq::empty().sibling(), None);
    }

    #[test]
    fn shortlex_order_and_tree_index() {
        let all: Vec<BinarySeq> = BinarySeq::up_to(2).collect();
        let shown: Vec<String> = all.iter().map(|u| u.to_string()).collect();
        assert_eq!(shown, ["e", "0", "1", "00", "01", "10", "11"]);
        let mut sorted = all.clone();
        sorted.sort();
        assert_eq!(sorted, all);
        for (i, u) in all.iter().enumerate() {
            assert_eq!(u.tree_index(), i);
            assert_eq!(BinarySeq::from_tree_index(i), *u);
        }
    }

    #[test]
    fn is_bar_cases() {
        assert!(set(&["0", "1"]).is_bar(3));
        assert!(!set(&[]).is_bar(1));
        // Full level 2 minus one string: the missing path escapes.
        let b = set(&["00", "01", "10"]);
        assert!(!b.is_bar(2));
    }

    #[test]
    fn uniform_witness_cases() {
        assert_eq!(set(&["0", "1"]).uniform_witness(3), Some(1));
        assert_eq!(set(&["e"]).uniform_witness(3), Some(0));
        assert_eq!(set(&[]).uniform_witness(3), None);
    }

    #[test]
    fn uniform_witness_matches_brute_force_on_random_sets() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let b = random_set(&mut rng, 6);
            let expected = (0..=6u32).find(|&n| {
                BinarySeq::level(n as usize)
                    .all(|alpha| (0..=n as usize).any(|m| b.contains(&alpha.prefix(m))))
            });
            assert_eq!(b.uniform_witness(6), expected, "set: {b:?}");
        }
    }

    #[test]
    fn close_under_extensions_cases() {
        let closed = set(&["0"]).close_under_extensions(2);
        assert_eq!(closed, set(&["0", "00", "01"]));
        // idempotence
        assert_eq!(closed.close_under_extensions(2), closed);
    }

    #[test]
    fn closure_matches_brute_force_on_random_sets() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..30 {
            let b = random_set(&mut rng, 5);
            let closed = b.close_under_extensions(5);
            let brute: BTreeSet<BinarySeq> = BinarySeq::up_to(5)
                .filter(|u| u.prefixes().any(|p| b.contains(&p)))
                .collect();
            assert_eq!(closed.members(), &brute);
            assert!(closed.is_extension_closed(5));
            // monotone: members survive closure
            assert!(b.members().iter().all(|u| closed.contains(u)));
        }
    }

    #[test]
    fn c_set_cases() {
        let everything = FiniteBarSet::from_members(BinarySeq::up_to(2));
        assert_eq!(c_set_from(&everything, 2), everything);

        let cprime = FiniteBarSet::from_members(
            BinarySeq::up_to(2).filter(|u| *u != seq("11")),
        );
        assert_eq!(c_set_from(&cprime, 2), set(&["0", "00", "01", "10"]));

        assert!(c_set_from(&set(&[]), 2).is_empty());
    }

    #[test]
    fn c_set_is_extension_closed_on_random_sets() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..40 {
            let cprime = random_set(&mut rng, 4);
            assert!(c_set_from(&cprime, 4).is_extension_closed(4));
        }
    }

    #[test]
    fn pi01_cases() {
        let nbound = 2;
        let full: BTreeSet<(BinarySeq, u32)> = BinarySeq::up_to(3)
            .flat_map(|u| (0..=nbound).map(move |n| (u, n)))
            .collect();
        assert_eq!(
            pi01_set_from(&full, nbound, 3),
            FiniteBarSet::from_members(BinarySeq::up_to(3))
        );

        assert!(pi01_set_from(&BTreeSet::new(), 2, 2).is_empty());

        // (u, n) related iff n < length(u): with nbound = 2 this keeps
        // exactly the strings of length >= 3.
        let s: BTreeSet<(BinarySeq, u32)> = BinarySeq::up_to(4)
            .flat_map(|u| (0..=4u32).filter(move |&n| (n as usize) < u.len()).map(move |n| (u, n)))
            .collect();
        let b = pi01_set_from(&s, 2, 4);
        let expected: BTreeSet<BinarySeq> =
            BinarySeq::up_to(4).filter(|u| u.len() >= 3).collect();
        assert_eq!(b.members(), &expected);
    }

    #[test]
    fn weak_uniformity_cases() {
        assert!(set(&["0"]).is_weakly_uniform(1));
        assert!(!set(&[]).is_weakly_uniform(3));
    }

    #[test]
    fn uniform_implies_weakly_uniform_on_random_sets() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..60 {
            let b = random_set(&mut rng, 4);
            if b.uniform_witness(4).is_some() {
                assert!(b.is_weakly_uniform(4), "set: {b:?}");
            }
        }
    }

    #[test]
    fn extension_closed_bar_iff_uniform_exhaustive_depth_2() {
        // All subsets of the 7-node tree, filtered to extension-closed ones.
        let nodes: Vec<BinarySeq> = BinarySeq::up_to(2).collect();
        for mask in 0u32..(1 << nodes.len()) {
            let b = FiniteBarSet::from_members(
                nodes.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, u)| *u),
            );
            if !b.is_extension_closed(2) {
                continue;
            }
            for d in 0..=2 {
                assert_eq!(
                    b.is_bar(d),
                    b.uniform_witness(d).is_some(),
                    "set: {b:?} at depth {d}"
                );
            }
        }
    }
}
