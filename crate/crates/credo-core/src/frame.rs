//! Finite frames of discernment and an exact subset algebra.
//!
//! Every calculus in this crate works over a [`Frame`]: an ordered list of
//! distinct element labels. Subsets are bit-encoded against that ordering,
//! so set operations are exact word operations, subsets make stable map
//! keys, and the powerset of a small frame can be walked exhaustively by
//! the brute-force oracles.
//!
//! Subsets remember which frame they belong to. Combining subsets of
//! unrelated frames fails loudly with [`Error::FrameMismatch`] instead of
//! silently realigning labels; frames with identical label lists are
//! interchangeable.

use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};

/// Largest frame size whose powerset the crate will enumerate by default.
///
/// 2^20 subsets is the most a brute-force walk is allowed to visit unless
/// the caller raises the cap explicitly via [`Frame::subsets_with_cap`].
pub const DEFAULT_ENUMERATION_CAP: usize = 20;

/// Bit-encoded element set, sized to the owning frame.
///
/// Frames up to 64 elements fit in a single word; larger frames spill into
/// a word vector. All operations assume both operands were encoded against
/// the same frame size.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub(crate) enum Bits {
    Word(u64),
    Words(Vec<u64>),
}

fn word_mask(size: usize) -> u64 {
    if size >= 64 {
        !0u64
    } else {
        (1u64 << size) - 1
    }
}

impl Bits {
    pub(crate) fn empty(size: usize) -> Self {
        if size <= 64 {
            Bits::Word(0)
        } else {
            Bits::Words(vec![0; size.div_ceil(64)])
        }
    }

    pub(crate) fn full(size: usize) -> Self {
        if size <= 64 {
            Bits::Word(word_mask(size))
        } else {
            let words = size.div_ceil(64);
            let mut v = vec![!0u64; words];
            let rem = size % 64;
            if rem != 0 {
                v[words - 1] = (1u64 << rem) - 1;
            }
            Bits::Words(v)
        }
    }

    /// Encode the low `size` bits of `value`; only valid for `size <= 64`.
    pub(crate) fn from_word(value: u64, size: usize) -> Self {
        debug_assert!(size <= 64);
        Bits::Word(value & word_mask(size))
    }

    pub(crate) fn insert(&mut self, i: usize) {
        match self {
            Bits::Word(w) => *w |= 1u64 << i,
            Bits::Words(v) => v[i / 64] |= 1u64 << (i % 64),
        }
    }

    pub(crate) fn contains(&self, i: usize) -> bool {
        match self {
            Bits::Word(w) => (*w >> i) & 1 == 1,
            Bits::Words(v) => (v[i / 64] >> (i % 64)) & 1 == 1,
        }
    }

    pub(crate) fn and(&self, other: &Self) -> Self {
        match (self, other) {
            (Bits::Word(a), Bits::Word(b)) => Bits::Word(a & b),
            (Bits::Words(a), Bits::Words(b)) => {
                Bits::Words(a.iter().zip(b).map(|(x, y)| x & y).collect())
            }
            _ => unreachable!("subsets of one frame share a representation"),
        }
    }

    pub(crate) fn or(&self, other: &Self) -> Self {
        match (self, other) {
            (Bits::Word(a), Bits::Word(b)) => Bits::Word(a | b),
            (Bits::Words(a), Bits::Words(b)) => {
                Bits::Words(a.iter().zip(b).map(|(x, y)| x | y).collect())
            }
            _ => unreachable!("subsets of one frame share a representation"),
        }
    }

    pub(crate) fn not(&self, size: usize) -> Self {
        match self {
            Bits::Word(w) => Bits::Word(!w & word_mask(size)),
            Bits::Words(v) => {
                let mut out: Vec<u64> = v.iter().map(|w| !w).collect();
                let rem = size % 64;
                if rem != 0 {
                    let last = out.len() - 1;
                    out[last] &= (1u64 << rem) - 1;
                }
                Bits::Words(out)
            }
        }
    }

    pub(crate) fn is_empty(&self) -> bool {
        match self {
            Bits::Word(w) => *w == 0,
            Bits::Words(v) => v.iter().all(|w| *w == 0),
        }
    }

    pub(crate) fn subset_of(&self, other: &Self) -> bool {
        match (self, other) {
            (Bits::Word(a), Bits::Word(b)) => a & !b == 0,
            (Bits::Words(a), Bits::Words(b)) => a.iter().zip(b).all(|(x, y)| x & !y == 0),
            _ => unreachable!("subsets of one frame share a representation"),
        }
    }

    pub(crate) fn count(&self) -> usize {
        match self {
            Bits::Word(w) => w.count_ones() as usize,
            Bits::Words(v) => v.iter().map(|w| w.count_ones() as usize).sum(),
        }
    }
}

#[derive(Debug)]
struct FrameInner {
    labels: Vec<String>,
}

/// A finite frame of discernment: the ordered universe an agent reasons over.
///
/// Cloning a frame is cheap (it clones a shared handle). Two frames are
/// compatible when they are the same handle or carry identical label lists;
/// every binary operation in the crate checks compatibility first.
#[derive(Clone, Debug)]
pub struct Frame {
    inner: Arc<FrameInner>,
}

impl Frame {
    /// Builds a frame from an ordered list of element labels.
    ///
    /// Labels must be non-empty and pairwise distinct, and at least one
    /// label must be given.
    pub fn new<I, S>(labels: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if labels.is_empty() {
            return Err(Error::EmptyFrame);
        }
        for (i, label) in labels.iter().enumerate() {
            if label.is_empty() {
                return Err(Error::EmptyLabel);
            }
            if labels[..i].contains(label) {
                return Err(Error::DuplicateLabel {
                    label: label.clone(),
                });
            }
        }
        Ok(Frame {
            inner: Arc::new(FrameInner { labels }),
        })
    }

    /// Number of elements in the frame.
    pub fn size(&self) -> usize {
        self.inner.labels.len()
    }

    /// The element labels in frame order.
    pub fn labels(&self) -> &[String] {
        &self.inner.labels
    }

    /// Label of the element at `index`.
    ///
    /// # Panics
    /// Panics if `index` is out of bounds.
    pub fn label(&self, index: usize) -> &str {
        &self.inner.labels[index]
    }

    /// Position of `label` in the frame, if present.
    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.inner.labels.iter().position(|l| l == label)
    }

    /// Whether two frames are interchangeable: the same handle, or equal
    /// label lists.
    pub fn compatible(&self, other: &Frame) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner) || self.inner.labels == other.inner.labels
    }

    pub(crate) fn ensure_compatible(&self, other: &Frame) -> Result<()> {
        if self.compatible(other) {
            Ok(())
        } else {
            Err(Error::FrameMismatch)
        }
    }

    /// The subset holding exactly the named elements.
    ///
    /// Duplicated names are fine (sets ignore multiplicity); unknown names
    /// fail with [`Error::UnknownElement`].
    pub fn subset<I, S>(&self, members: I) -> Result<Subset>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut bits = Bits::empty(self.size());
        for name in members {
            let name = name.as_ref();
            let idx = self.index_of(name).ok_or_else(|| Error::UnknownElement {
                label: name.to_string(),
            })?;
            bits.insert(idx);
        }
        Ok(Subset {
            frame: self.clone(),
            bits,
        })
    }

    /// The singleton `{label}`.
    pub fn singleton(&self, label: &str) -> Result<Subset> {
        self.subset([label])
    }

    /// The empty subset of this frame.
    pub fn empty(&self) -> Subset {
        Subset {
            frame: self.clone(),
            bits: Bits::empty(self.size()),
        }
    }

    /// The full frame as a subset of itself.
    pub fn full(&self) -> Subset {
        Subset {
            frame: self.clone(),
            bits: Bits::full(self.size()),
        }
    }

    pub(crate) fn subset_from_bits(&self, bits: Bits) -> Subset {
        Subset {
            frame: self.clone(),
            bits,
        }
    }

    /// Walks every subset of the frame (the empty set included), in a
    /// stable order, provided the frame is within [`DEFAULT_ENUMERATION_CAP`].
    pub fn subsets(&self) -> Result<SubsetIter> {
        self.subsets_with_cap(DEFAULT_ENUMERATION_CAP)
    }

    /// Like [`Frame::subsets`], with an explicit cap on the frame size.
    pub fn subsets_with_cap(&self, cap: usize) -> Result<SubsetIter> {
        let size = self.size();
        if size > cap || size > 63 {
            return Err(Error::FrameTooLarge {
                size,
                cap: cap.min(63),
            });
        }
        Ok(SubsetIter {
            frame: self.clone(),
            next: 0,
            total: 1u64 << size,
        })
    }
}

impl PartialEq for Frame {
    fn eq(&self, other: &Self) -> bool {
        self.compatible(other)
    }
}

impl Eq for Frame {}

impl fmt::Display for Frame {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, label) in self.inner.labels.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{label}")?;
        }
        write!(f, "}}")
    }
}

/// A subset of a specific [`Frame`], encoded as a bit set.
///
/// Set operations between subsets of incompatible frames return
/// [`Error::FrameMismatch`].
#[derive(Clone, Debug)]
pub struct Subset {
    frame: Frame,
    bits: Bits,
}

impl Subset {
    /// The frame this subset lives in.
    pub fn frame(&self) -> &Frame {
        &self.frame
    }

    pub(crate) fn bits(&self) -> &Bits {
        &self.bits
    }

    /// Number of elements in the subset.
    pub fn cardinality(&self) -> usize {
        self.bits.count()
    }

    /// Whether the subset is empty.
    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    /// Whether the subset is the whole frame.
    pub fn is_full(&self) -> bool {
        self.bits.count() == self.frame.size()
    }

    /// Whether the named element belongs to the subset.
    ///
    /// Unknown labels are simply not members.
    pub fn contains(&self, label: &str) -> bool {
        match self.frame.index_of(label) {
            Some(idx) => self.bits.contains(idx),
            None => false,
        }
    }

    /// Whether the element at `index` belongs to the subset.
    pub fn contains_index(&self, index: usize) -> bool {
        index < self.frame.size() && self.bits.contains(index)
    }

    /// Member labels in frame order.
    pub fn members(&self) -> Vec<&str> {
        self.member_indices()
            .map(|i| self.frame.label(i))
            .collect()
    }

    /// Member positions in frame order.
    pub fn member_indices(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.frame.size()).filter(move |i| self.bits.contains(*i))
    }

    /// The complement within the frame.
    pub fn complement(&self) -> Subset {
        Subset {
            frame: self.frame.clone(),
            bits: self.bits.not(self.frame.size()),
        }
    }

    /// Set intersection.
    pub fn intersect(&self, other: &Subset) -> Result<Subset> {
        self.frame.ensure_compatible(&other.frame)?;
        Ok(Subset {
            frame: self.frame.clone(),
            bits: self.bits.and(&other.bits),
        })
    }

    /// Set union.
    pub fn union(&self, other: &Subset) -> Result<Subset> {
        self.frame.ensure_compatible(&other.frame)?;
        Ok(Subset {
            frame: self.frame.clone(),
            bits: self.bits.or(&other.bits),
        })
    }

    /// Whether `self` is contained in `other`.
    pub fn is_subset_of(&self, other: &Subset) -> Result<bool> {
        self.frame.ensure_compatible(&other.frame)?;
        Ok(self.bits.subset_of(&other.bits))
    }

    /// Whether the two subsets share no element.
    pub fn is_disjoint_from(&self, other: &Subset) -> Result<bool> {
        self.frame.ensure_compatible(&other.frame)?;
        Ok(self.bits.and(&other.bits).is_empty())
    }
}

impl PartialEq for Subset {
    fn eq(&self, other: &Self) -> bool {
        self.frame.compatible(&other.frame) && self.bits == other.bits
    }
}

impl Eq for Subset {}

impl fmt::Display for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        let mut first = true;
        for i in self.member_indices() {
            if !first {
                write!(f, ", ")?;
            }
            first = false;
            write!(f, "{}", self.frame.label(i))?;
        }
        write!(f, "}}")
    }
}

/// Iterator over every subset of a frame, in stable bit-pattern order.
#[derive(Clone, Debug)]
pub struct SubsetIter {
    frame: Frame,
    next: u64,
    total: u64,
}

impl Iterator for SubsetIter {
    type Item = Subset;

    fn next(&mut self) -> Option<Subset> {
        if self.next >= self.total {
            return None;
        }
        let bits = Bits::from_word(self.next, self.frame.size());
        self.next += 1;
        Some(self.frame.subset_from_bits(bits))
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let left = (self.total - self.next) as usize;
        (left, Some(left))
    }
}

impl ExactSizeIterator for SubsetIter {}

#[cfg(test)]
mod tests {
    use super::*;

    fn abc() -> Frame {
        Frame::new(["a", "b", "c"]).unwrap()
    }

    #[test]
    fn builds_and_indexes() {
        let f = abc();
        assert_eq!(f.size(), 3);
        assert_eq!(f.label(1), "b");
        assert_eq!(f.index_of("c"), Some(2));
        assert_eq!(f.index_of("z"), None);
    }

    #[test]
    fn rejects_degenerate_frames() {
        assert_eq!(Frame::new(Vec::<String>::new()), Err(Error::EmptyFrame));
        assert_eq!(Frame::new(["a", ""]), Err(Error::EmptyLabel));
        assert_eq!(
            Frame::new(["a", "b", "a"]),
            Err(Error::DuplicateLabel {
                label: "a".to_string()
            })
        );
    }

    #[test]
    fn subset_construction_and_membership() {
        let f = abc();
        let s = f.subset(["a", "c"]).unwrap();
        assert_eq!(s.cardinality(), 2);
        assert!(s.contains("a"));
        assert!(!s.contains("b"));
        assert!(s.contains("c"));
        assert_eq!(s.members(), vec!["a", "c"]);
        assert_eq!(
            f.subset(["a", "z"]),
            Err(Error::UnknownElement {
                label: "z".to_string()
            })
        );
        // Multiplicity is ignored.
        assert_eq!(f.subset(["a", "a"]).unwrap(), f.singleton("a").unwrap());
    }

    #[test]
    fn complement_is_an_involution() {
        let f = abc();
        let s = f.subset(["b"]).unwrap();
        assert_eq!(s.complement().complement(), s);
        assert_eq!(f.empty().complement(), f.full());
        assert_eq!(f.full().complement(), f.empty());
    }

    #[test]
    fn complement_partitions_the_frame() {
        let f = abc();
        let s = f.subset(["a", "c"]).unwrap();
        let c = s.complement();
        assert!(s.intersect(&c).unwrap().is_empty());
        assert_eq!(s.union(&c).unwrap(), f.full());
    }

    #[test]
    fn set_operations() {
        let f = abc();
        let ab = f.subset(["a", "b"]).unwrap();
        let bc = f.subset(["b", "c"]).unwrap();
        assert_eq!(ab.intersect(&bc).unwrap(), f.singleton("b").unwrap());
        assert_eq!(ab.union(&bc).unwrap(), f.full());
        assert!(f.singleton("b").unwrap().is_subset_of(&ab).unwrap());
        assert!(!ab.is_subset_of(&bc).unwrap());
        assert!(f
            .singleton("a")
            .unwrap()
            .is_disjoint_from(&f.singleton("c").unwrap())
            .unwrap());
    }

    #[test]
    fn frames_with_equal_labels_are_interchangeable() {
        let f = abc();
        let g = Frame::new(["a", "b", "c"]).unwrap();
        let s = f.subset(["a"]).unwrap();
        let t = g.subset(["a"]).unwrap();
        assert_eq!(s, t);
        assert_eq!(s.union(&t).unwrap(), f.singleton("a").unwrap());
    }

    #[test]
    fn cross_frame_operations_fail_loudly() {
        let f = abc();
        let g = Frame::new(["x", "y"]).unwrap();
        let s = f.subset(["a"]).unwrap();
        let t = g.subset(["x"]).unwrap();
        assert_eq!(s.union(&t), Err(Error::FrameMismatch));
        assert_eq!(s.intersect(&t), Err(Error::FrameMismatch));
        assert_eq!(s.is_subset_of(&t), Err(Error::FrameMismatch));
    }

    #[test]
    fn enumerates_the_full_powerset() {
        let f = abc();
        let subsets: Vec<Subset> = f.subsets().unwrap().collect();
        assert_eq!(subsets.len(), 8);
        assert_eq!(subsets[0], f.empty());
        assert_eq!(subsets[7], f.full());
        // Every subset appears exactly once.
        for (i, s) in subsets.iter().enumerate() {
            for t in &subsets[i + 1..] {
                assert_ne!(s, t);
            }
        }
    }

    #[test]
    fn enumeration_respects_the_cap() {
        let labels: Vec<String> = (0..21).map(|i| alloc::format!("e{i}")).collect();
        let f = Frame::new(labels).unwrap();
        match f.subsets() {
            Err(Error::FrameTooLarge { size: 21, cap: 20 }) => {}
            other => panic!("expected FrameTooLarge, got {other:?}"),
        }
        assert!(f.subsets_with_cap(21).is_ok());
    }

    #[test]
    fn wide_frames_use_the_word_vector_path() {
        let labels: Vec<String> = (0..70).map(|i| alloc::format!("e{i}")).collect();
        let f = Frame::new(labels).unwrap();
        let s = f.subset(["e0", "e64", "e69"]).unwrap();
        assert_eq!(s.cardinality(), 3);
        assert!(s.contains("e64"));
        let c = s.complement();
        assert_eq!(c.cardinality(), 67);
        assert_eq!(c.complement(), s);
        assert!(s.intersect(&c).unwrap().is_empty());
        assert_eq!(s.union(&c).unwrap(), f.full());
        assert!(f.subsets().is_err());
    }

    #[test]
    fn display_renders_members_in_frame_order() {
        let f = abc();
        assert_eq!(alloc::format!("{}", f.subset(["c", "a"]).unwrap()), "{a, c}");
        assert_eq!(alloc::format!("{}", f.empty()), "{}");
        assert_eq!(alloc::format!("{f}"), "{a, b, c}");
    }
}
