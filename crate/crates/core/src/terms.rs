//! Truth-value gated terms and their interpretation at model nodes.
//!
//! A term is a finite set of entries, each pairing a gate with a subterm.
//! Gates come in two styles: a finite set of truth values (family `C`
//! literals `+b`, `'b`, `!'b`, or family `Pi` literals `(n,a)`, `!(n,a)`,
//! `(all,a)`), or a shadow condition for the labeled-tree models. At a
//! node, the entries whose gate holds contribute their subterm's
//! interpretation, hereditarily; the result is a pure extensional set.
//!
//! Ground objects enter through the canonical injection [`make_hat`]: a
//! hat term interprets to the same set at every node. Binary strings are
//! encoded as hereditarily finite sets via [`encode_seq`].

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use thiserror::Error;

use crate::bars::BinarySeq;
use crate::conditions::{Condition, FullLabeling, Label, Variant};

#[derive(Debug, Error)]
pub enum TermError {
    #[error("truth value {0} has no reading at node {1}")]
    FamilyMismatch(String, String),
    #[error("condition-gated entries are only interpreted at labeling-backed nodes (got {0})")]
    CondGateAtNode(String),
    #[error("term mixes gate styles or truth-value families")]
    MixedFamilies,
    #[error("negative restriction needs a negative literal, got {0}")]
    NotNegative(String),
    #[error("term entry does not name a string")]
    NotAStringTerm,
    #[error("parse error at offset {0}: {1}")]
    Parse(usize, String),
}

/// The two truth-value families.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Family {
    C,
    Pi,
}

/// An atomic truth token whose node-dependent truth gates term membership.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum TruthValue {
    /// `+b`: the string is in the committed bar.
    Plus(BinarySeq),
    /// `'b`: the string survives in the ambient decidable set.
    Prime(BinarySeq),
    /// `!'b`: the negation of `'b`; true only at the matching terminal.
    NegPrime(BinarySeq),
    /// `(n,a)`
    Pair(u32, BinarySeq),
    /// `!(n,a)`
    NegPair(u32, BinarySeq),
    /// `(all,a)`
    AllN(BinarySeq),
}

impl TruthValue {
    pub fn family(&self) -> Family {
        match self {
            TruthValue::Plus(_) | TruthValue::Prime(_) | TruthValue::NegPrime(_) => Family::C,
            _ => Family::Pi,
        }
    }

    pub fn is_negative(&self) -> bool {
        matches!(self, TruthValue::NegPrime(_) | TruthValue::NegPair(..))
    }
}

impl fmt::Display for TruthValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TruthValue::Plus(b) => write!(f, "+{b}"),
            TruthValue::Prime(b) => write!(f, "'{b}"),
            TruthValue::NegPrime(b) => write!(f, "!'{b}"),
            TruthValue::Pair(n, a) => write!(f, "({n},{a})"),
            TruthValue::NegPair(n, a) => write!(f, "!({n},{a})"),
            TruthValue::AllN(a) => write!(f, "(all,{a})"),
        }
    }
}

/// What guards a term entry.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Gate {
    Tvs(BTreeSet<TruthValue>),
    Cond(Condition),
}

impl Gate {
    pub fn empty_tvs() -> Gate {
        Gate::Tvs(BTreeSet::new())
    }

    pub fn empty_cond() -> Gate {
        Gate::Cond(Condition::empty(Variant::A))
    }
}

/// A rank-bounded term: finitely many gated entries, subterms of strictly
/// smaller rank.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct Term {
    entries: BTreeSet<(Gate, Term)>,
}

/// Which gate style a term uses, determined hereditarily.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum TermKind {
    /// No gates anywhere (hat terms fit every model).
    Neutral,
    Tv(Family),
    Cond,
}

impl Term {
    pub fn new<I: IntoIterator<Item = (Gate, Term)>>(entries: I) -> Self {
        Term { entries: entries.into_iter().collect() }
    }

    pub fn empty() -> Self {
        Term::default()
    }

    pub fn entries(&self) -> &BTreeSet<(Gate, Term)> {
        &self.entries
    }

    pub fn rank(&self) -> u32 {
        self.entries.iter().map(|(_, sub)| sub.rank() + 1).max().unwrap_or(0)
    }

    /// The gate style, or an error when styles or families mix.
    pub fn kind(&self) -> Result<TermKind, TermError> {
        let mut kind = TermKind::Neutral;
        let mut merge = |other: TermKind| -> Result<(), TermError> {
            kind = match (kind, other) {
                (TermKind::Neutral, k) | (k, TermKind::Neutral) => k,
                (a, b) if a == b => a,
                _ => return Err(TermError::MixedFamilies),
            };
            Ok(())
        };
        for (gate, sub) in &self.entries {
            match gate {
                Gate::Cond(_) => merge(TermKind::Cond)?,
                Gate::Tvs(tvs) => {
                    for tv in tvs {
                        merge(TermKind::Tv(tv.family()))?;
                    }
                }
            }
            merge(sub.kind()?)?;
        }
        Ok(kind)
    }

    /// Parses the bracket format: `{<gate,term>,...}` with truth-value
    /// gates `{+b,'b,!'b,(n,a),!(n,a),(all,a)}`.
    pub fn parse(text: &str) -> Result<Self, TermError> {
        let mut p = TermParser { src: text.as_bytes(), pos: 0 };
        let t = p.term()?;
        p.skip_ws();
        if p.pos != p.src.len() {
            return Err(TermError::Parse(p.pos, "trailing input".into()));
        }
        Ok(t)
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (gate, sub)) in self.entries.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            match gate {
                Gate::Tvs(tvs) => {
                    f.write_str("<{")?;
                    for (j, tv) in tvs.iter().enumerate() {
                        if j > 0 {
                            f.write_str(",")?;
                        }
                        write!(f, "{tv}")?;
                    }
                    write!(f, "}},{sub}>")?;
                }
                Gate::Cond(c) => {
                    f.write_str("<[")?;
                    for (j, (node, label)) in c.entries().iter().enumerate() {
                        if j > 0 {
                            f.write_str(",")?;
                        }
                        write!(f, "{node}:{label}")?;
                    }
                    write!(f, "],{sub}>")?;
                }
            }
        }
        f.write_str("}")
    }
}

struct TermParser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> TermParser<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn eat(&mut self, c: u8) -> Result<(), TermError> {
        self.skip_ws();
        if self.pos < self.src.len() && self.src[self.pos] == c {
            self.pos += 1;
            Ok(())
        } else {
            Err(TermError::Parse(self.pos, format!("expected `{}`", c as char)))
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn term(&mut self) -> Result<Term, TermError> {
        self.eat(b'{')?;
        let mut entries = BTreeSet::new();
        if self.peek() == Some(b'}') {
            self.pos += 1;
            return Ok(Term { entries });
        }
        loop {
            self.eat(b'<')?;
            let gate = self.tvset()?;
            self.eat(b',')?;
            let sub = self.term()?;
            self.eat(b'>')?;
            entries.insert((gate, sub));
            match self.peek() {
                Some(b',') => {
                    self.pos += 1;
                }
                Some(b'}') => {
                    self.pos += 1;
                    return Ok(Term { entries });
                }
                _ => return Err(TermError::Parse(self.pos, "expected `,` or `}`".into())),
            }
        }
    }

    fn tvset(&mut self) -> Result<Gate, TermError> {
        self.eat(b'{')?;
        let mut tvs = BTreeSet::new();
        if self.peek() == Some(b'}') {
            self.pos += 1;
            return Ok(Gate::Tvs(tvs));
        }
        loop {
            tvs.insert(self.tv()?);
            match self.peek() {
                Some(b',') => {
                    self.pos += 1;
                }
                Some(b'}') => {
                    self.pos += 1;
                    return Ok(Gate::Tvs(tvs));
                }
                _ => return Err(TermError::Parse(self.pos, "expected `,` or `}`".into())),
            }
        }
    }

    fn seq(&mut self) -> Result<BinarySeq, TermError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len()
            && matches!(self.src[self.pos], b'0' | b'1' | b'e')
        {
            self.pos += 1;
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        text.parse().map_err(|e: String| TermError::Parse(start, e))
    }

    fn number(&mut self) -> Result<u32, TermError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        std::str::from_utf8(&self.src[start..self.pos])
            .unwrap()
            .parse()
            .map_err(|_| TermError::Parse(start, "expected a number".into()))
    }

    fn tv(&mut self) -> Result<TruthValue, TermError> {
        match self.peek() {
            Some(b'+') => {
                self.pos += 1;
                Ok(TruthValue::Plus(self.seq()?))
            }
            Some(b'\'') => {
                self.pos += 1;
                Ok(TruthValue::Prime(self.seq()?))
            }
            Some(b'!') => {
                self.pos += 1;
                match self.peek() {
                    Some(b'\'') => {
                        self.pos += 1;
                        Ok(TruthValue::NegPrime(self.seq()?))
                    }
                    Some(b'(') => {
                        self.pos += 1;
                        let n = self.number()?;
                        self.eat(b',')?;
                        let a = self.seq()?;
                        self.eat(b')')?;
                        Ok(TruthValue::NegPair(n, a))
                    }
                    _ => Err(TermError::Parse(self.pos, "expected `'` or `(`".into())),
                }
            }
            Some(b'(') => {
                self.pos += 1;
                self.skip_ws();
                if self.src[self.pos..].starts_with(b"all") {
                    self.pos += 3;
                    self.eat(b',')?;
                    let a = self.seq()?;
                    self.eat(b')')?;
                    Ok(TruthValue::AllN(a))
                } else {
                    let n = self.number()?;
                    self.eat(b',')?;
                    let a = self.seq()?;
                    self.eat(b')')?;
                    Ok(TruthValue::Pair(n, a))
                }
            }
            _ => Err(TermError::Parse(self.pos, "expected a truth value".into())),
        }
    }
}

/// A pure hereditarily finite set — the value a term interprets to.
/// Equality of interpretations is extensional equality here.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct ExtVal(BTreeSet<ExtVal>);

impl ExtVal {
    pub fn empty() -> Self {
        ExtVal::default()
    }

    pub fn from_elems<I: IntoIterator<Item = ExtVal>>(elems: I) -> Self {
        ExtVal(elems.into_iter().collect())
    }

    pub fn elems(&self) -> &BTreeSet<ExtVal> {
        &self.0
    }

    pub fn contains(&self, v: &ExtVal) -> bool {
        self.0.contains(v)
    }

    pub fn insert(&mut self, v: ExtVal) {
        self.0.insert(v);
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn rank(&self) -> u32 {
        self.0.iter().map(|e| e.rank() + 1).max().unwrap_or(0)
    }
}

impl fmt::Display for ExtVal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{e}")?;
        }
        f.write_str("}")
    }
}

/// Injective encoding of strings as hereditarily finite sets: the string's
/// tree index (shifted by one so the empty string is nonzero) rendered as
/// the set of its set-rendered bit positions.
pub fn encode_seq(b: &BinarySeq) -> ExtVal {
    fn ack(n: u64) -> ExtVal {
        ExtVal::from_elems((0..64).filter(|i| n >> i & 1 == 1).map(|i| ack(i as u64)))
    }
    ack(b.tree_index() as u64 + 1)
}

/// Inverse of [`encode_seq`]; `None` when the value is not in the image.
pub fn decode_seq(v: &ExtVal) -> Option<BinarySeq> {
    fn unack(v: &ExtVal) -> Option<u64> {
        let mut n = 0u64;
        for e in v.elems() {
            let bit = unack(e)?;
            if bit >= 63 {
                return None;
            }
            n |= 1 << bit;
        }
        Some(n)
    }
    let code = unack(v)?;
    if code == 0 {
        return None;
    }
    let idx = (code - 1) as usize;
    // reject codes beyond any reasonable tree
    if idx >= (1 << 20) {
        return None;
    }
    Some(BinarySeq::from_tree_index(idx))
}

/// The gate style for canonical injections.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum TermStyle {
    TruthValues,
    Conditions,
}

/// The canonical injection of a hereditarily finite set: every entry is
/// gated trivially, so the interpretation is the same set at every node.
pub fn make_hat(x: &ExtVal, style: TermStyle) -> Term {
    let gate = match style {
        TermStyle::TruthValues => Gate::empty_tvs(),
        TermStyle::Conditions => Gate::empty_cond(),
    };
    Term::new(x.elems().iter().map(|y| (gate.clone(), make_hat(y, style))))
}

pub fn hat_of_seq(b: &BinarySeq, style: TermStyle) -> Term {
    make_hat(&encode_seq(b), style)
}

/// `{ <{+b}, b-hat> : |b| <= dmax }` — the committed-bar family.
pub fn make_c(dmax: u32) -> Term {
    Term::new(BinarySeq::up_to(dmax as usize).map(|b| {
        (
            Gate::Tvs(BTreeSet::from([TruthValue::Plus(b)])),
            hat_of_seq(&b, TermStyle::TruthValues),
        )
    }))
}

/// `{ <{'b}, b-hat> : |b| <= dmax }` — the ambient decidable family.
pub fn make_cprime(dmax: u32) -> Term {
    Term::new(BinarySeq::up_to(dmax as usize).map(|b| {
        (
            Gate::Tvs(BTreeSet::from([TruthValue::Prime(b)])),
            hat_of_seq(&b, TermStyle::TruthValues),
        )
    }))
}

/// `{ <{(n,a)}, a-hat> : |a| <= dmax }` — one indexed decidable tree.
pub fn make_tn(n: u32, dmax: u32) -> Term {
    Term::new(BinarySeq::up_to(dmax as usize).map(|a| {
        (
            Gate::Tvs(BTreeSet::from([TruthValue::Pair(n, a)])),
            hat_of_seq(&a, TermStyle::TruthValues),
        )
    }))
}

/// `{ <{(all,a)}, a-hat> : |a| <= dmax }` — the intersection of the
/// indexed trees, which need not be closed under extensions.
pub fn make_cap_c(dmax: u32) -> Term {
    Term::new(BinarySeq::up_to(dmax as usize).map(|a| {
        (
            Gate::Tvs(BTreeSet::from([TruthValue::AllN(a)])),
            hat_of_seq(&a, TermStyle::TruthValues),
        )
    }))
}

/// The condition-gated bar term: one entry per pair of a string and a
/// prefix length, gated by the minimal shadow condition that settles the
/// prefix as `IN` (proper ancestors `OUT`).
pub fn make_sigma_b(dmax: u32) -> Term {
    let mut entries = Vec::new();
    for alpha in BinarySeq::up_to(dmax as usize) {
        for n in 0..=alpha.len() {
            let mut cond = BTreeMap::new();
            for j in 0..n {
                cond.insert(alpha.prefix(j), Label::Out);
            }
            cond.insert(alpha.prefix(n), Label::In);
            entries.push((
                Gate::Cond(Condition::from_entries_unchecked(Variant::A, cond)),
                hat_of_seq(&alpha, TermStyle::Conditions),
            ));
        }
    }
    Term::new(entries)
}

/// A node of one of the finite models, carrying everything truth values
/// need: the sampled labeling and cutoff at the root, a weakened labeling
/// at weakening nodes, the designated string at a terminal, the index pair
/// at an indexed node.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum NodeContext {
    Bottom { labeling: FullLabeling, cutoff: u32 },
    Weak { summary: Condition, labeling: FullLabeling },
    Terminal { c: BinarySeq },
    TrivialTop,
    Pi { n: u32, alpha: BinarySeq },
}

impl NodeContext {
    /// The labeling interpreting condition gates here, if any.
    pub fn labeling(&self) -> Option<&FullLabeling> {
        match self {
            NodeContext::Bottom { labeling, .. } | NodeContext::Weak { labeling, .. } => {
                Some(labeling)
            }
            _ => None,
        }
    }
}

impl fmt::Display for NodeContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NodeContext::Bottom { cutoff, .. } => write!(f, "bottom cutoff={cutoff}"),
            NodeContext::Weak { summary, .. } => {
                f.write_str("weaken")?;
                for (node, label) in summary.entries() {
                    write!(f, " {node}:{label}")?;
                }
                Ok(())
            }
            NodeContext::Terminal { c } => write!(f, "terminal {c}"),
            NodeContext::TrivialTop => f.write_str("top"),
            NodeContext::Pi { n, alpha } => write!(f, "pi {n},{alpha}"),
        }
    }
}

/// Truth of a single truth value at a node.
pub fn tv_true(tv: &TruthValue, node: &NodeContext) -> Result<bool, TermError> {
    let mismatch = || TermError::FamilyMismatch(tv.to_string(), node.to_string());
    match node {
        NodeContext::Bottom { labeling, .. } | NodeContext::Weak { labeling, .. } => match tv {
            TruthValue::Plus(b) => Ok(labeling.in_covers(b)),
            TruthValue::Prime(_) => Ok(true),
            TruthValue::NegPrime(_) => Ok(false),
            TruthValue::Pair(..) => match node {
                NodeContext::Bottom { .. } => Ok(true),
                _ => Err(mismatch()),
            },
            TruthValue::NegPair(..) => match node {
                NodeContext::Bottom { .. } => Ok(false),
                _ => Err(mismatch()),
            },
            TruthValue::AllN(a) => match node {
                NodeContext::Bottom { .. } => Ok(labeling.in_covers(a)),
                _ => Err(mismatch()),
            },
        },
        NodeContext::Terminal { c } => match tv {
            TruthValue::Plus(b) => Ok(!b.is_prefix_of(c)),
            TruthValue::Prime(b) => Ok(b != c),
            TruthValue::NegPrime(b) => Ok(b == c),
            _ => Err(mismatch()),
        },
        NodeContext::TrivialTop => match tv {
            TruthValue::Plus(_) | TruthValue::Prime(_) => Ok(true),
            TruthValue::NegPrime(_) => Ok(false),
            _ => Err(mismatch()),
        },
        NodeContext::Pi { n, alpha } => match tv {
            TruthValue::Pair(m, beta) => Ok((m, beta) != (n, alpha)),
            TruthValue::NegPair(m, beta) => Ok((m, beta) == (n, alpha)),
            TruthValue::AllN(beta) => Ok(beta != alpha),
            _ => Err(mismatch()),
        },
    }
}

/// Truth of a whole gate at a node. A condition gate holds when the node's
/// labeling, seen through the shadow projection, extends the gate.
pub fn gate_true(gate: &Gate, node: &NodeContext) -> Result<bool, TermError> {
    match gate {
        Gate::Tvs(tvs) => {
            for tv in tvs {
                if !tv_true(tv, node)? {
                    return Ok(false);
                }
            }
            Ok(true)
        }
        Gate::Cond(q) => {
            let shadow_at = |x: &BinarySeq| -> Result<Label, TermError> {
                match node {
                    NodeContext::TrivialTop => Ok(Label::In),
                    _ => {
                        let g = node
                            .labeling()
                            .ok_or_else(|| TermError::CondGateAtNode(node.to_string()))?;
                        if x.len() > g.depth() as usize {
                            return Err(TermError::CondGateAtNode(format!(
                                "gate node {x} beyond labeling depth"
                            )));
                        }
                        Ok(match g.label(x) {
                            Label::In => Label::In,
                            _ => Label::Out,
                        })
                    }
                }
            };
            for (x, &want) in q.entries().iter() {
                if shadow_at(x)? != want {
                    return Ok(false);
                }
            }
            Ok(true)
        }
    }
}

/// Hereditary interpretation: keep the entries whose gate holds, recurse,
/// and collect the extensional set. Memoized per (term, node) within a
/// call.
pub fn interpret(term: &Term, node: &NodeContext) -> Result<ExtVal, TermError> {
    fn go(
        term: &Term,
        node: &NodeContext,
        memo: &mut HashMap<Term, ExtVal>,
    ) -> Result<ExtVal, TermError> {
        if let Some(hit) = memo.get(term) {
            return Ok(hit.clone());
        }
        let mut out = ExtVal::empty();
        for (gate, sub) in term.entries() {
            if gate_true(gate, node)? {
                out.insert(go(sub, node, memo)?);
            }
        }
        memo.insert(term.clone(), out.clone());
        Ok(out)
    }
    go(term, node, &mut HashMap::new())
}

/// Interprets a flat family term (entries naming strings) as a string set.
pub fn interpret_as_strings(
    term: &Term,
    node: &NodeContext,
) -> Result<BTreeSet<BinarySeq>, TermError> {
    let mut out = BTreeSet::new();
    for (gate, sub) in term.entries() {
        if gate_true(gate, node)? {
            let v = interpret(sub, node)?;
            out.insert(decode_seq(&v).ok_or(TermError::NotAStringTerm)?);
        }
    }
    Ok(out)
}

/// Whether a negative literal admits a gate: nothing in the gate may
/// contradict the literal's terminal reading, and the only negative
/// literal allowed is the literal itself.
pub fn neg_admits(neg: &TruthValue, gate: &BTreeSet<TruthValue>) -> Result<bool, TermError> {
    match neg {
        TruthValue::NegPrime(b) => Ok(gate.iter().all(|tv| match tv {
            TruthValue::Plus(c) => !c.is_prefix_of(b),
            TruthValue::Prime(c) => c != b,
            TruthValue::NegPrime(c) => c == b,
            _ => false,
        })),
        TruthValue::NegPair(n, a) => Ok(gate.iter().all(|tv| match tv {
            TruthValue::Pair(m, beta) => (m, beta) != (n, a),
            TruthValue::NegPair(m, beta) => (m, beta) == (n, a),
            TruthValue::AllN(beta) => beta != a,
            _ => false,
        })),
        other => Err(TermError::NotNegative(other.to_string())),
    }
}

/// The restriction of a term under a negative literal: keep the entries
/// the literal admits, hereditarily, and return the resulting extensional
/// set. This is what classical evaluation of restricted statements uses.
pub fn restrict_neg(term: &Term, neg: &TruthValue) -> Result<ExtVal, TermError> {
    let mut out = ExtVal::empty();
    for (gate, sub) in term.entries() {
        let admitted = match gate {
            Gate::Tvs(tvs) => neg_admits(neg, tvs)?,
            Gate::Cond(_) => return Err(TermError::CondGateAtNode("restriction".into())),
        };
        if admitted {
            out.insert(restrict_neg(sub, neg)?);
        }
    }
    Ok(out)
}
