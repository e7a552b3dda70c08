//! Finite ground sets and subsets of them stored as bit vectors.

use std::fmt;

use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

use crate::error::{Error, Result};

/// Largest ground set for which `2^N` enumeration is attempted.
pub const MAX_ENUMERABLE: usize = 24;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroundSet {
    size: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    label: Option<String>,
}

impl GroundSet {
    pub fn new(size: usize) -> Result<Self> {
        if size == 0 {
            return Err(Error::InvalidArgument("ground set must be nonempty".into()));
        }
        Ok(Self { size, label: None })
    }

    pub fn labelled(size: usize, label: impl Into<String>) -> Result<Self> {
        let mut g = Self::new(size)?;
        g.label = Some(label.into());
        Ok(g)
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    /// Fails with [`Error::GroundSetTooLarge`] when `size > max`.
    pub fn require_at_most(&self, max: usize) -> Result<()> {
        if self.size > max {
            Err(Error::GroundSetTooLarge {
                size: self.size,
                max,
            })
        } else {
            Ok(())
        }
    }

    pub fn empty_set(&self) -> SubsetMask {
        SubsetMask::empty(self.size)
    }

    pub fn full_set(&self) -> SubsetMask {
        SubsetMask::full(self.size)
    }
}

/// A subset of `{0, …, len-1}`. Only the low `len` bits may be set.
///
/// The textual form is a bit-string whose `i`-th character is `1` iff element
/// `i` belongs to the set (element 0 first).
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SubsetMask {
    len: usize,
    words: SmallVec<[u64; 2]>,
}

#[inline]
fn words_for(len: usize) -> usize {
    len.div_ceil(64)
}

impl SubsetMask {
    pub fn empty(len: usize) -> Self {
        Self {
            len,
            words: SmallVec::from_elem(0, words_for(len)),
        }
    }

    pub fn full(len: usize) -> Self {
        let mut m = Self::empty(len);
        for w in m.words.iter_mut() {
            *w = u64::MAX;
        }
        m.trim();
        m
    }

    /// Builds a mask from the low `len` bits of `bits`; `len ≤ 64`.
    pub fn from_u64(len: usize, bits: u64) -> Self {
        assert!(len <= 64, "from_u64 requires len <= 64");
        let mut m = Self::empty(len);
        if len > 0 {
            m.words[0] = bits;
        }
        m.trim();
        m
    }

    pub fn from_elements<I: IntoIterator<Item = usize>>(len: usize, elems: I) -> Result<Self> {
        let mut m = Self::empty(len);
        for e in elems {
            if e >= len {
                return Err(Error::InvalidArgument(format!(
                    "element {e} outside ground set of size {len}"
                )));
            }
            m.insert(e);
        }
        Ok(m)
    }

    fn trim(&mut self) {
        let rem = self.len % 64;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    /// The value as a `u64`, if the ground set fits.
    pub fn as_u64(&self) -> Option<u64> {
        match self.len {
            0 => Some(0),
            1..=64 => Some(self.words[0]),
            _ => None,
        }
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    #[inline]
    pub fn contains(&self, i: usize) -> bool {
        i < self.len && self.words[i / 64] >> (i % 64) & 1 == 1
    }

    #[inline]
    pub fn insert(&mut self, i: usize) {
        assert!(i < self.len, "element out of range");
        self.words[i / 64] |= 1 << (i % 64);
    }

    #[inline]
    pub fn remove(&mut self, i: usize) {
        assert!(i < self.len, "element out of range");
        self.words[i / 64] &= !(1 << (i % 64));
    }

    /// Number of elements, `|S|`.
    pub fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn is_subset_of(&self, other: &SubsetMask) -> bool {
        debug_assert_eq!(self.len, other.len);
        self.words
            .iter()
            .zip(&other.words)
            .all(|(a, b)| a & !b == 0)
    }

    pub fn complement(&self) -> SubsetMask {
        let mut m = self.clone();
        for w in m.words.iter_mut() {
            *w = !*w;
        }
        m.trim();
        m
    }

    pub fn union(&self, other: &SubsetMask) -> SubsetMask {
        let mut m = self.clone();
        for (a, b) in m.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
        m
    }

    pub fn intersection(&self, other: &SubsetMask) -> SubsetMask {
        let mut m = self.clone();
        for (a, b) in m.words.iter_mut().zip(&other.words) {
            *a &= b;
        }
        m
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    None
                } else {
                    let b = w.trailing_zeros() as usize;
                    w &= w - 1;
                    Some(wi * 64 + b)
                }
            })
        })
    }

    pub fn to_bitstring(&self) -> String {
        (0..self.len)
            .map(|i| if self.contains(i) { '1' } else { '0' })
            .collect()
    }

    /// Parses the bit-string form. The string length fixes the ground set size.
    pub fn parse_bitstring(s: &str) -> Result<Self> {
        let s = s.trim();
        let mut m = Self::empty(s.len());
        for (i, c) in s.chars().enumerate() {
            match c {
                '0' => {}
                '1' => m.insert(i),
                other => {
                    return Err(Error::Malformed(format!(
                        "invalid character {other:?} in bit-string"
                    )))
                }
            }
        }
        Ok(m)
    }
}

impl fmt::Debug for SubsetMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SubsetMask({})", self.to_bitstring())
    }
}

impl fmt::Display for SubsetMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_bitstring())
    }
}

impl Serialize for SubsetMask {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_bitstring())
    }
}

impl<'de> Deserialize<'de> for SubsetMask {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        SubsetMask::parse_bitstring(&s).map_err(serde::de::Error::custom)
    }
}
