//! Finite Heyting algebras as downset lattices of finite posets.
//!
//! Every finite Heyting algebra arises as the lattice of downward-closed
//! subsets of a finite poset, so generating algebras from posets guarantees
//! the lattice laws by construction. Residuation is still verified on every
//! triple when an algebra is built.

use std::fmt;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum PosetError {
    #[error("order is not reflexive at {0}")]
    NotReflexive(usize),
    #[error("order is not antisymmetric between {0} and {1}")]
    NotAntisymmetric(usize, usize),
    #[error("order is not transitive via {0} <= {1} <= {2}")]
    NotTransitive(usize, usize, usize),
    #[error("relation matrix has wrong size for {0} elements")]
    WrongSize(usize),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("element index {0} out of range (n = {1})")]
    OutOfRange(usize, usize),
    #[error("poset has too many elements for a downset lattice ({0} > 16)")]
    TooLarge(usize),
}

/// A finite poset over elements `0..n`, stored as an `n x n` boolean
/// relation matrix. Construction checks the order axioms.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FinitePoset {
    n: usize,
    leq: Vec<bool>,
}

impl FinitePoset {
    pub fn new(n: usize, leq: Vec<bool>) -> Result<Self, PosetError> {
        if leq.len() != n * n {
            return Err(PosetError::WrongSize(n));
        }
        let p = FinitePoset { n, leq };
        for a in 0..n {
            if !p.leq(a, a) {
                return Err(PosetError::NotReflexive(a));
            }
            for b in 0..n {
                if a != b && p.leq(a, b) && p.leq(b, a) {
                    return Err(PosetError::NotAntisymmetric(a, b));
                }
                for c in 0..n {
                    if p.leq(a, b) && p.leq(b, c) && !p.leq(a, c) {
                        return Err(PosetError::NotTransitive(a, b, c));
                    }
                }
            }
        }
        Ok(p)
    }

    /// Builds from covering pairs `(lo, hi)`; the reflexive-transitive
    /// closure is computed here.
    pub fn from_covers(n: usize, covers: &[(usize, usize)]) -> Result<Self, PosetError> {
        let mut leq = vec![false; n * n];
        for i in 0..n {
            leq[i * n + i] = true;
        }
        for &(a, b) in covers {
            for x in [a, b] {
                if x >= n {
                    return Err(PosetError::OutOfRange(x, n));
                }
            }
            leq[a * n + b] = true;
        }
        // Floyd-Warshall style closure
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    if leq[i * n + k] && leq[k * n + j] {
                        leq[i * n + j] = true;
                    }
                }
            }
        }
        Self::new(n, leq)
    }

    /// Parses the file format: first noncomment line `n`, then lines
    /// `i < j` for covering relations; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self, PosetError> {
        let mut n = None;
        let mut covers = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = match raw.find('#') {
                Some(pos) => &raw[..pos],
                None => raw,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            let err = |message: String| PosetError::Parse { line: i + 1, message };
            if n.is_none() {
                n = Some(line.parse::<usize>().map_err(|e| err(e.to_string()))?);
                continue;
            }
            let parts: Vec<&str> = line.split_whitespace().collect();
            match parts.as_slice() {
                [a, "<", b] => {
                    let a = a.parse().map_err(|e: std::num::ParseIntError| err(e.to_string()))?;
                    let b = b.parse().map_err(|e: std::num::ParseIntError| err(e.to_string()))?;
                    covers.push((a, b));
                }
                _ => return Err(err("expected `i < j`".to_string())),
            }
        }
        let n = n.ok_or(PosetError::Parse { line: 1, message: "missing element count".into() })?;
        Self::from_covers(n, &covers)
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn leq(&self, a: usize, b: usize) -> bool {
        self.leq[a * self.n + b]
    }
}

/// A downset as a bitmask over the poset's elements.
pub type DownSet = u16;

/// A finite Heyting algebra: the downsets of a finite poset with
/// intersection, union, and the residual implication.
#[derive(Clone, Debug)]
pub struct FiniteHeyting {
    poset: FinitePoset,
    elements: Vec<DownSet>, // sorted, so indices are canonical
}

impl FiniteHeyting {
    /// All downsets of the poset. Residuation `a /\ b <= c  iff  a <= b -> c`
    /// is checked on every triple before returning.
    pub fn from_poset(poset: FinitePoset) -> Result<Self, PosetError> {
        let n = poset.len();
        if n > 16 {
            return Err(PosetError::TooLarge(n));
        }
        let mut elements = Vec::new();
        'candidates: for mask in 0u32..(1 << n) {
            for hi in 0..n {
                if mask >> hi & 1 == 0 {
                    continue;
                }
                for lo in 0..n {
                    if poset.leq(lo, hi) && mask >> lo & 1 == 0 {
                        continue 'candidates;
                    }
                }
            }
            elements.push(mask as DownSet);
        }
        let h = FiniteHeyting { poset, elements };
        debug_assert!(h.residuation_holds());
        Ok(h)
    }

    pub fn poset(&self) -> &FinitePoset {
        &self.poset
    }

    pub fn elements(&self) -> &[DownSet] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn bottom(&self) -> DownSet {
        0
    }

    pub fn top(&self) -> DownSet {
        if self.poset.len() == 0 {
            0
        } else {
            ((1u32 << self.poset.len()) - 1) as DownSet
        }
    }

    pub fn meet(&self, a: DownSet, b: DownSet) -> DownSet {
        a & b
    }

    pub fn join(&self, a: DownSet, b: DownSet) -> DownSet {
        a | b
    }

    /// The largest downset whose meet with `b` stays within `c`: an element
    /// belongs iff everything below it that lands in `b` also lands in `c`.
    pub fn implies(&self, b: DownSet, c: DownSet) -> DownSet {
        let n = self.poset.len();
        let mut out: DownSet = 0;
        for p in 0..n {
            let ok = (0..n).all(|q| {
                !self.poset.leq(q, p) || (b >> q & 1 == 0) || (c >> q & 1 == 1)
            });
            if ok {
                out |= 1 << p;
            }
        }
        out
    }

    pub fn neg(&self, a: DownSet) -> DownSet {
        self.implies(a, self.bottom())
    }

    pub fn leq(&self, a: DownSet, b: DownSet) -> bool {
        a & !b == 0
    }

    /// Residuation over all triples of elements.
    pub fn residuation_holds(&self) -> bool {
        self.elements.iter().all(|&a| {
            self.elements.iter().all(|&b| {
                self.elements.iter().all(|&c| {
                    self.leq(self.meet(a, b), c) == self.leq(a, self.implies(b, c))
                })
            })
        })
    }

    /// Connectedness: a complemented pair (`a \/ b` top, `a /\ b` bottom)
    /// only exists trivially.
    pub fn is_connected(&self) -> bool {
        self.elements.iter().all(|&a| {
            self.elements.iter().all(|&b| {
                let complemented =
                    self.join(a, b) == self.top() && self.meet(a, b) == self.bottom();
                !complemented || a == self.top() || a == self.bottom()
            })
        })
    }

    /// The decidability collapse: every element `a` with `a \/ ~a` equal to
    /// top already is top or bottom.
    pub fn decidables_trivial(&self) -> bool {
        self.elements.iter().all(|&a| {
            self.join(a, self.neg(a)) != self.top() || a == self.top() || a == self.bottom()
        })
    }
}

impl fmt::Display for FiniteHeyting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "heyting algebra with {} elements over a {}-element poset",
            self.len(),
            self.poset.len()
        )
    }
}

/// Enumerates every partial order on `0..n` (as relation matrices) and
/// yields the corresponding algebra. Labeled duplicates are fine for the
/// law checks, which only care about per-algebra properties.
pub fn all_algebras_up_to(n_max: usize) -> impl Iterator<Item = FiniteHeyting> {
    (1..=n_max).flat_map(|n| {
        let pairs: Vec<(usize, usize)> = (0..n)
            .flat_map(|a| (0..n).filter(move |&b| a != b).map(move |b| (a, b)))
            .collect();
        let count = pairs.len();
        (0u32..(1 << count)).filter_map(move |mask| {
            let mut leq = vec![false; n * n];
            for i in 0..n {
                leq[i * n + i] = true;
            }
            for (bit, &(a, b)) in pairs.iter().enumerate() {
                if mask >> bit & 1 == 1 {
                    leq[a * n + b] = true;
                }
            }
            let poset = FinitePoset::new(n, leq).ok()?;
            Some(FiniteHeyting::from_poset(poset).expect("small poset"))
        })
    })
}
