//! Labeled-tree forcing conditions and total labelings.
//!
//! A condition is a finite partial labeling of the binary tree. Variant A
//! uses the labels `IN`, `OUT`, `INF`; variant B forbids `OUT`. The
//! structural restrictions:
//!
//! * the domain is a finite subtree (prefix-closed);
//! * a node labeled `IN` has no labeled proper descendant — once barred,
//!   everything above is barred implicitly;
//! * (variant A) every labeled descendant of an `OUT` node is `IN` or `OUT`;
//! * a node labeled `INF` with both children labeled keeps at least one
//!   `INF` child.
//!
//! The empty labeling is admitted as the weakest condition; every nonempty
//! domain contains the root by prefix closure.
//!
//! [`FullLabeling`] is the desk-scale stand-in for a generic filter: a
//! total labeling of the tree up to a depth, with `IN` upward-closed so
//! that bar membership and term semantics agree across model variants.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::bars::{BinarySeq, FiniteBarSet};

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Variant {
    A,
    B,
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Variant::A => f.write_str("A"),
            Variant::B => f.write_str("B"),
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Label {
    In,
    Out,
    Inf,
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::In => f.write_str("IN"),
            Label::Out => f.write_str("OUT"),
            Label::Inf => f.write_str("INF"),
        }
    }
}

impl std::str::FromStr for Label {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "IN" => Ok(Label::In),
            "OUT" => Ok(Label::Out),
            "INF" => Ok(Label::Inf),
            _ => Err(format!("bad label `{s}`")),
        }
    }
}

/// The structural rules a labeling can break.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Rule {
    PrefixClosed,
    InTerminal,
    OutHereditary,
    InfBranching,
    VariantLabel,
    InUpward,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Violation {
    pub node: BinarySeq,
    pub rule: Rule,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let what = match self.rule {
            Rule::PrefixClosed => "domain is not prefix-closed at",
            Rule::InTerminal => "labeled descendant of an IN node at",
            Rule::OutHereditary => "INF label beneath an OUT node at",
            Rule::InfBranching => "INF node with no INF child among two labeled children at",
            Rule::VariantLabel => "label not allowed by the variant at",
            Rule::InUpward => "IN is not upward-closed at",
        };
        write!(f, "{what} {}", self.node)
    }
}

#[derive(Debug, Error)]
pub enum ConditionError {
    #[error("variant mismatch: {0} vs {1}")]
    VariantMismatch(Variant, Variant),
    #[error("invalid condition: {}", format_violations(.0))]
    Invalid(Vec<Violation>),
    #[error("invalid labeling: {}", format_violations(.0))]
    InvalidLabeling(Vec<Violation>),
    #[error("operation requires variant {expected}, got {got}")]
    WrongVariant { expected: Variant, got: Variant },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("labeling of depth {depth} must label all of the tree up to that depth")]
    NotTotal { depth: u32 },
    #[error("flip target {0} is not labeled INF")]
    FlipNotInf(BinarySeq),
    #[error("flip label for {0} must be IN or OUT")]
    FlipToInf(BinarySeq),
    #[error("sibling of {0} is not labeled INF")]
    SiblingNotInf(BinarySeq),
    #[error("both {0} and its sibling are selected")]
    SiblingAlsoSelected(BinarySeq),
    #[error("selected nodes {0} and {1} are nested")]
    NestedSelection(BinarySeq, BinarySeq),
    #[error("no room beneath {0} for the required bar within depth {1}")]
    NoRoomForBar(BinarySeq, u32),
    #[error("labeling is not a legal weakening of the base: differs at {0} outside any selection")]
    NotLegalWeakening(BinarySeq),
    #[error("labelings have different depths ({0} vs {1})")]
    DepthMismatch(u32, u32),
    #[error("condition has no level-{0} INF nodes")]
    NoInfAtLevel(u32),
    #[error("condition labels nodes beyond level {0}")]
    DeeperThanLevel(u32),
}

fn format_violations(vs: &[Violation]) -> String {
    vs.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; ")
}

/// A finite partial labeling of the binary tree.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Condition {
    variant: Variant,
    entries: BTreeMap<BinarySeq, Label>,
}

impl Condition {
    /// Builds and validates.
    pub fn new(
        variant: Variant,
        entries: BTreeMap<BinarySeq, Label>,
    ) -> Result<Self, ConditionError> {
        let c = Condition { variant, entries };
        let violations = c.validate();
        if violations.is_empty() {
            Ok(c)
        } else {
            Err(ConditionError::Invalid(violations))
        }
    }

    /// Builds without validating; used where validity is established by
    /// construction.
    pub fn from_entries_unchecked(variant: Variant, entries: BTreeMap<BinarySeq, Label>) -> Self {
        Condition { variant, entries }
    }

    /// The weakest condition: nothing labeled.
    pub fn empty(variant: Variant) -> Self {
        Condition { variant, entries: BTreeMap::new() }
    }

    /// The condition labeling only the root.
    pub fn root(variant: Variant, label: Label) -> Self {
        let mut entries = BTreeMap::new();
        entries.insert(BinarySeq::empty(), label);
        Condition { variant, entries }
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    pub fn entries(&self) -> &BTreeMap<BinarySeq, Label> {
        &self.entries
    }

    pub fn label(&self, node: &BinarySeq) -> Option<Label> {
        self.entries.get(node).copied()
    }

    pub fn domain(&self) -> impl Iterator<Item = &BinarySeq> {
        self.entries.keys()
    }

    pub fn is_domain_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Length of the longest node in the domain; 0 for the empty condition.
    pub fn max_level(&self) -> u32 {
        self.entries.keys().map(|b| b.len() as u32).max().unwrap_or(0)
    }

    /// True when some initial segment of `b` (possibly `b` itself) is
    /// labeled `IN`.
    pub fn in_covers(&self, b: &BinarySeq) -> bool {
        b.prefixes().any(|p| self.entries.get(&p) == Some(&Label::In))
    }

    /// True when no label is `INF`; such conditions live in the shadow
    /// order. Vacuously true for the empty condition.
    pub fn is_shadow(&self) -> bool {
        self.entries.values().all(|&l| l != Label::Inf)
    }

    /// Checks every structural rule and reports each offending node.
    /// Violations are data, not errors.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        for (node, &label) in &self.entries {
            if self.variant == Variant::B && label == Label::Out {
                out.push(Violation { node: *node, rule: Rule::VariantLabel });
            }
            if let Some(parent) = node.parent() {
                if !self.entries.contains_key(&parent) {
                    out.push(Violation { node: *node, rule: Rule::PrefixClosed });
                }
            }
            let mut ancestors = node.prefixes().filter(|p| p != node);
            if ancestors.clone().any(|a| self.entries.get(&a) == Some(&Label::In)) {
                out.push(Violation { node: *node, rule: Rule::InTerminal });
            }
            if label == Label::Inf && ancestors.any(|a| self.entries.get(&a) == Some(&Label::Out))
            {
                out.push(Violation { node: *node, rule: Rule::OutHereditary });
            }
            if label == Label::Inf {
                let c0 = self.entries.get(&node.push(0));
                let c1 = self.entries.get(&node.push(1));
                if let (Some(&l0), Some(&l1)) = (c0, c1) {
                    if l0 != Label::Inf && l1 != Label::Inf {
                        out.push(Violation { node: *node, rule: Rule::InfBranching });
                    }
                }
            }
        }
        out
    }

    /// Parses the line format produced by `Display`: a `variant A|B` header,
    /// then one `<node> <label>` entry per line; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self, ConditionError> {
        let (variant, entries) = parse_labeled_lines(text)?;
        Condition::new(variant, entries)
    }

    /// Parses without enforcing validity, for tooling that reports the
    /// violations itself.
    pub fn parse_raw(text: &str) -> Result<Self, ConditionError> {
        let (variant, entries) = parse_labeled_lines(text)?;
        Ok(Condition { variant, entries })
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "variant {}", self.variant)?;
        for (node, label) in &self.entries {
            writeln!(f, "{node} {label}")?;
        }
        Ok(())
    }
}

fn parse_labeled_lines(
    text: &str,
) -> Result<(Variant, BTreeMap<BinarySeq, Label>), ConditionError> {
    let mut variant = None;
    let mut entries = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        let err = |message: String| ConditionError::Parse { line: i + 1, message };
        if let Some(v) = line.strip_prefix("variant") {
            variant = Some(match v.trim() {
                "A" => Variant::A,
                "B" => Variant::B,
                other => return Err(err(format!("unknown variant `{other}`"))),
            });
            continue;
        }
        let mut parts = line.split_whitespace();
        let (node, label) = match (parts.next(), parts.next(), parts.next()) {
            (Some(n), Some(l), None) => (n, l),
            _ => return Err(err("expected `<node> <label>`".to_string())),
        };
        let node: BinarySeq = node.parse().map_err(err)?;
        let label: Label = label.parse().map_err(err)?;
        entries.insert(node, label);
    }
    let variant = variant.ok_or(ConditionError::Parse {
        line: 1,
        message: "missing `variant A|B` header".to_string(),
    })?;
    Ok((variant, entries))
}

/// Extension order: `q` extends `p` when `q` keeps every label of `p` and
/// only adds new ones.
pub fn extends(q: &Condition, p: &Condition) -> Result<bool, ConditionError> {
    if q.variant != p.variant {
        return Err(ConditionError::VariantMismatch(q.variant, p.variant));
    }
    Ok(p.entries.iter().all(|(node, label)| q.entries.get(node) == Some(label)))
}

/// The shadow projection: every `INF` becomes `OUT`. Idempotent; the image
/// lives in the `IN`/`OUT` sub-order.
pub fn proj_q(p: &Condition) -> Result<Condition, ConditionError> {
    if p.variant != Variant::A {
        return Err(ConditionError::WrongVariant { expected: Variant::A, got: p.variant });
    }
    let entries = p
        .entries
        .iter()
        .map(|(node, &label)| (*node, if label == Label::Inf { Label::Out } else { label }))
        .collect();
    Ok(Condition { variant: Variant::A, entries })
}

/// Shadow equivalence: equal projections.
pub fn sim(p: &Condition, q: &Condition) -> Result<bool, ConditionError> {
    Ok(proj_q(p)? == proj_q(q)?)
}

/// Weakening order on variant-B conditions: `q` is a weakening of `p` when
/// every node of `p`'s domain either carries `INF` in `p` or has an initial
/// segment labeled `IN` by `q`.
pub fn weaker_leq_w(q: &Condition, p: &Condition) -> Result<bool, ConditionError> {
    for c in [q, p] {
        if c.variant != Variant::B {
            return Err(ConditionError::WrongVariant { expected: Variant::B, got: c.variant });
        }
    }
    Ok(p.entries.iter().all(|(node, &label)| label == Label::Inf || q.in_covers(node)))
}

/// The constructively generated weakening relation: besides being a
/// weakening, `q` must keep every node of `p`'s domain in view — either
/// covered by an `IN` or still labeled `INF`. Weakenings obtained by
/// flipping `INF` labels to `IN`, extending the domain, and erasing below
/// new `IN` nodes are exactly of this shape; a weakening that silently
/// drops an `INF` node from its domain is not.
pub fn proper_weakening(q: &Condition, p: &Condition) -> Result<bool, ConditionError> {
    if !weaker_leq_w(q, p)? {
        return Ok(false);
    }
    Ok(p.entries
        .keys()
        .all(|node| q.in_covers(node) || q.label(node) == Some(Label::Inf)))
}

/// The canonical common weakening of two variant-B conditions: collect the
/// `IN` commitments of both, propagate `IN` to any node whose two children
/// both became `IN`, erase everything beneath an `IN` node, and keep the
/// rest of the joint domain labeled `INF`. This is the greatest lower bound
/// for the weakening order, up to equivalence.
pub fn inpart(q: &Condition, r: &Condition) -> Result<Condition, ConditionError> {
    for c in [q, r] {
        if c.variant != Variant::B {
            return Err(ConditionError::WrongVariant { expected: Variant::B, got: c.variant });
        }
        let violations = c.validate();
        if !violations.is_empty() {
            return Err(ConditionError::Invalid(violations));
        }
    }
    let dom: BTreeSet<BinarySeq> = q.entries.keys().chain(r.entries.keys()).copied().collect();
    let mut in_set: BTreeSet<BinarySeq> = dom
        .iter()
        .filter(|b| q.label(b) == Some(Label::In) || r.label(b) == Some(Label::In))
        .copied()
        .collect();
    // upward propagation; deepest-first, so one pass reaches the fixpoint
    for b in dom.iter().rev() {
        if !in_set.contains(b) && in_set.contains(&b.push(0)) && in_set.contains(&b.push(1)) {
            in_set.insert(*b);
        }
    }
    let entries = dom
        .iter()
        .filter(|b| !b.prefixes().filter(|p| p != *b).any(|p| in_set.contains(&p)))
        .map(|b| (*b, if in_set.contains(b) { Label::In } else { Label::Inf }))
        .collect();
    Ok(Condition { variant: Variant::B, entries })
}

/// Rewrites `q` to agree with `p` on `p`'s domain while changing as little
/// as possible elsewhere: labels beneath a `p`-`IN` node are erased, an
/// `INF` beneath an `OUT` becomes `OUT`, and a label that would leave an
/// `INF` parent with two non-`INF` children is dropped together with its
/// cone. The result extends `p` on `p`'s domain.
pub fn project_below(q: &Condition, p: &Condition) -> Result<Condition, ConditionError> {
    if q.variant != p.variant {
        return Err(ConditionError::VariantMismatch(q.variant, p.variant));
    }
    let mut entries = p.entries.clone();
    for (node, &qlabel) in &q.entries {
        if entries.contains_key(node) {
            continue;
        }
        let label = match node.parent() {
            None => qlabel,
            Some(parent) => match entries.get(&parent) {
                None => continue, // cone was dropped or erased
                Some(Label::In) => continue,
                Some(Label::Out) => {
                    if qlabel == Label::Inf {
                        Label::Out
                    } else {
                        qlabel
                    }
                }
                Some(Label::Inf) => {
                    let sibling_blocks = node
                        .sibling()
                        .and_then(|s| entries.get(&s))
                        .is_some_and(|&sl| sl != Label::Inf);
                    if qlabel != Label::Inf && sibling_blocks {
                        continue;
                    }
                    qlabel
                }
            },
        };
        entries.insert(*node, label);
    }
    let result = Condition { variant: q.variant, entries };
    debug_assert!(result.validate().is_empty(), "projection produced {result}");
    Ok(result)
}

/// Membership in the dense family indexed by `n`: some `k` with
/// `n < k <= dmax` has the whole domain within depth `k` and every
/// length-`k` string either labeled `INF` or covered by an `IN` prefix.
pub fn dense_dn_member(q: &Condition, n: u32, dmax: u32) -> bool {
    ((n + 1)..=dmax).any(|k| {
        q.max_level() <= k
            && BinarySeq::level(k as usize)
                .all(|alpha| q.label(&alpha) == Some(Label::Inf) || q.in_covers(&alpha))
    })
}

/// Bounded density check: verifies that beneath every valid condition over
/// the depth-`dmax` tree some extension satisfies `pred`. Returns `None`
/// when density holds, otherwise the least counterexample (fewest labels,
/// then numerically least in the packed node order).
pub fn density_check(
    variant: Variant,
    pred: &dyn Fn(&Condition) -> bool,
    dmax: u32,
) -> Option<Condition> {
    let universe = packed::enumerate(variant, dmax);
    let index: std::collections::HashMap<u64, usize> =
        universe.iter().enumerate().map(|(i, &c)| (c, i)).collect();
    // Order by label count descending: every proper extension has strictly
    // more labels, so its satisfiability is already known when needed.
    let mut order: Vec<usize> = (0..universe.len()).collect();
    order.sort_by_key(|&i| std::cmp::Reverse(packed::label_count(universe[i])));
    let mut sat = vec![false; universe.len()];
    for &i in &order {
        let code = universe[i];
        let mut ok = pred(&packed::unpack(variant, dmax, code));
        if !ok {
            for ext in packed::one_step_extensions(variant, dmax, code) {
                if sat[index[&ext]] {
                    ok = true;
                    break;
                }
            }
        }
        sat[i] = ok;
    }
    let mut worst: Option<usize> = None;
    for i in 0..universe.len() {
        if !sat[i] {
            let key = |x: usize| (packed::label_count(universe[x]), universe[x]);
            if worst.is_none_or(|j| key(i) < key(j)) {
                worst = Some(i);
            }
        }
    }
    worst.map(|i| packed::unpack(variant, dmax, universe[i]))
}

/// All valid conditions over the tree of the given depth, in increasing
/// packed order. Includes the empty condition. Supported up to depth 3,
/// which is where the exhaustive suites run.
pub fn enumerate_valid(variant: Variant, d: u32) -> Vec<Condition> {
    packed::enumerate(variant, d)
        .into_iter()
        .map(|code| packed::unpack(variant, d, code))
        .collect()
}

/// Extends a condition whose deepest labels sit at level `n` so that its
/// level-`n` `INF` nodes get pairwise separated `INF` descendants: with `s`
/// such nodes and `k = n + s`, the `j`-th of them (lexicographically) gets
/// the unique `INF` descendant reached by appending `j-1` zeros, a one, and
/// `s-j` zeros; every other descendant of a non-`IN` labeled level-`n` node
/// down to level `k` is labeled `OUT`. Any two distinct level-`k` `INF`
/// nodes then disagree in both directions: each carries a 1 where the other
/// carries a 0.
pub fn build_separating_extension(p: &Condition, n: u32) -> Result<Condition, ConditionError> {
    if p.variant != Variant::A {
        return Err(ConditionError::WrongVariant { expected: Variant::A, got: p.variant });
    }
    let violations = p.validate();
    if !violations.is_empty() {
        return Err(ConditionError::Invalid(violations));
    }
    if p.max_level() > n {
        return Err(ConditionError::DeeperThanLevel(n));
    }
    let inf_nodes: Vec<BinarySeq> = p
        .entries
        .iter()
        .filter(|(node, &label)| node.len() == n as usize && label == Label::Inf)
        .map(|(node, _)| *node)
        .collect();
    let s = inf_nodes.len();
    if s == 0 {
        return Err(ConditionError::NoInfAtLevel(n));
    }
    let mut entries = p.entries.clone();
    for (node, &label) in &p.entries {
        if node.len() != n as usize || label == Label::In {
            continue;
        }
        // Fill the subtree beneath this node down to level n + s with OUT,
        // then carve the designated INF path if the node is INF.
        for depth in 1..=s {
            for v in BinarySeq::level(depth) {
                entries.insert(node.concat(&v), Label::Out);
            }
        }
        if label == Label::Inf {
            let j = inf_nodes.iter().position(|x| x == node).unwrap() + 1;
            let mut suffix = BinarySeq::empty();
            for pos in 1..=s {
                suffix = suffix.push(u8::from(pos == j));
                entries.insert(node.concat(&suffix), Label::Inf);
            }
        }
    }
    let result = Condition { variant: Variant::A, entries };
    debug_assert!(result.validate().is_empty());
    Ok(result)
}

/// A total labeling of the tree up to `depth`, with `IN` upward-closed.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct FullLabeling {
    variant: Variant,
    depth: u32,
    labels: Vec<Label>, // indexed by BinarySeq::tree_index
}

impl FullLabeling {
    pub fn new(variant: Variant, depth: u32, labels: Vec<Label>) -> Result<Self, ConditionError> {
        let expect = (1usize << (depth + 1)) - 1;
        if labels.len() != expect {
            return Err(ConditionError::NotTotal { depth });
        }
        let g = FullLabeling { variant, depth, labels };
        let violations = g.validate();
        if violations.is_empty() {
            Ok(g)
        } else {
            Err(ConditionError::InvalidLabeling(violations))
        }
    }

    pub fn constant(variant: Variant, depth: u32, label: Label) -> Self {
        let n = (1usize << (depth + 1)) - 1;
        FullLabeling { variant, depth, labels: vec![label; n] }
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    pub fn label(&self, node: &BinarySeq) -> Label {
        assert!(node.len() <= self.depth as usize, "node {node} beyond depth");
        self.labels[node.tree_index()]
    }

    fn set(&mut self, node: &BinarySeq, label: Label) {
        self.labels[node.tree_index()] = label;
    }

    pub fn in_covers(&self, b: &BinarySeq) -> bool {
        // IN is upward-closed, so for in-depth nodes the node itself would
        // suffice; prefixes also settle nodes beyond the depth.
        b.prefixes()
            .filter(|p| p.len() <= self.depth as usize)
            .any(|p| self.label(&p) == Label::In)
    }

    /// Local checks that, chained along paths, give the full rules: IN
    /// nodes have IN children, OUT nodes (variant A) have IN/OUT children,
    /// and an internal INF node keeps an INF child.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        for node in BinarySeq::up_to(self.depth as usize) {
            let label = self.label(&node);
            if self.variant == Variant::B && label == Label::Out {
                out.push(Violation { node, rule: Rule::VariantLabel });
            }
            if node.len() == self.depth as usize {
                continue;
            }
            let (l0, l1) = (self.label(&node.push(0)), self.label(&node.push(1)));
            match label {
                Label::In => {
                    for (bit, l) in [(0u8, l0), (1, l1)] {
                        if l != Label::In {
                            out.push(Violation { node: node.push(bit), rule: Rule::InUpward });
                        }
                    }
                }
                Label::Out => {
                    for (bit, l) in [(0u8, l0), (1, l1)] {
                        if l == Label::Inf {
                            out.push(Violation {
                                node: node.push(bit),
                                rule: Rule::OutHereditary,
                            });
                        }
                    }
                }
                Label::Inf => {
                    if l0 != Label::Inf && l1 != Label::Inf {
                        out.push(Violation { node, rule: Rule::InfBranching });
                    }
                }
            }
        }
        out
    }

    /// The condition carrying this labeling's information up to depth `k`:
    /// labels on the full subtree, reduced below `IN`.
    pub fn restrict_depth(&self, k: u32) -> Condition {
        assert!(k <= self.depth);
        let entries = BinarySeq::up_to(k as usize)
            .filter(|b| !b.prefixes().filter(|p| p != b).any(|p| self.label(&p) == Label::In))
            .map(|b| (b, self.label(&b)))
            .collect();
        Condition { variant: self.variant, entries }
    }

    /// Minimal change toward a condition: nodes in the condition's domain
    /// take its labels; below an effective `IN` everything becomes `IN`;
    /// an `INF` caught beneath an effective `OUT` becomes `OUT`.
    pub fn apply_min_change(&self, p: &Condition) -> Result<FullLabeling, ConditionError> {
        if p.variant != self.variant {
            return Err(ConditionError::VariantMismatch(p.variant, self.variant));
        }
        let mut h = self.clone();
        for node in BinarySeq::up_to(self.depth as usize) {
            let label = match p.label(&node) {
                Some(l) => l,
                None => match node.parent().map(|par| h.label(&par)) {
                    Some(Label::In) => Label::In,
                    Some(Label::Out) if self.label(&node) == Label::Inf => Label::Out,
                    _ => self.label(&node),
                },
            };
            h.set(&node, label);
        }
        let violations = h.validate();
        if violations.is_empty() {
            Ok(h)
        } else {
            Err(ConditionError::InvalidLabeling(violations))
        }
    }

    /// Parses the same line format as conditions, requiring totality.
    pub fn parse(text: &str) -> Result<Self, ConditionError> {
        let (variant, entries) = parse_labeled_lines(text)?;
        let depth = entries.keys().map(|b| b.len() as u32).max().unwrap_or(0);
        let expect = (1usize << (depth + 1)) - 1;
        if entries.len() != expect {
            return Err(ConditionError::NotTotal { depth });
        }
        // BTreeMap iterates in shortlex order, which is the index order
        let labels = entries.values().copied().collect();
        FullLabeling::new(variant, depth, labels)
    }
}

impl fmt::Display for FullLabeling {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "variant {}", self.variant)?;
        for node in BinarySeq::up_to(self.depth as usize) {
            writeln!(f, "{node} {}", self.label(&node))?;
        }
        Ok(())
    }
}

/// Variant-A weakening: flip finitely many `INF` nodes to `IN` or `OUT`.
/// A flipped node other than the root must have an `INF` sibling that is
/// not itself flipped, or the parent would lose its `INF` child. Beneath an
/// `IN` flip the subtree fills with `IN`; beneath an `OUT` flip the
/// children form the required bar of `IN` nodes and everything deeper
/// follows, so in both cases the strict subtree fills with `IN`.
pub fn legal_weaken_a(
    g: &FullLabeling,
    flips: &BTreeMap<BinarySeq, Label>,
) -> Result<FullLabeling, ConditionError> {
    if g.variant != Variant::A {
        return Err(ConditionError::WrongVariant { expected: Variant::A, got: g.variant });
    }
    check_selection_shape(g, flips.keys())?;
    for (node, &label) in flips {
        if label == Label::Inf {
            return Err(ConditionError::FlipToInf(*node));
        }
        if label == Label::Out && node.len() >= g.depth as usize {
            return Err(ConditionError::NoRoomForBar(*node, g.depth));
        }
        if let Some(sib) = node.sibling() {
            if flips.contains_key(&sib) {
                return Err(ConditionError::SiblingAlsoSelected(*node));
            }
        }
    }
    let mut h = g.clone();
    for (node, &label) in flips {
        h.set(node, label);
        fill_strict_subtree(&mut h, node, Label::In);
    }
    let violations = h.validate();
    if violations.is_empty() {
        Ok(h)
    } else {
        Err(ConditionError::InvalidLabeling(violations))
    }
}

/// Variant-B weakening: flip finitely many `INF` nodes with `INF` siblings
/// to `IN`, filling their subtrees with `IN`.
pub fn legal_weaken_b(
    g: &FullLabeling,
    picks: &BTreeSet<BinarySeq>,
) -> Result<FullLabeling, ConditionError> {
    if g.variant != Variant::B {
        return Err(ConditionError::WrongVariant { expected: Variant::B, got: g.variant });
    }
    check_selection_shape(g, picks.iter())?;
    for node in picks {
        if let Some(sib) = node.sibling() {
            if picks.contains(&sib) {
                return Err(ConditionError::SiblingAlsoSelected(*node));
            }
        }
    }
    let mut h = g.clone();
    for node in picks {
        h.set(node, Label::In);
        fill_strict_subtree(&mut h, node, Label::In);
    }
    let violations = h.validate();
    if violations.is_empty() {
        Ok(h)
    } else {
        Err(ConditionError::InvalidLabeling(violations))
    }
}

fn check_selection_shape<'a>(
    g: &FullLabeling,
    selection: impl Iterator<Item = &'a BinarySeq> + Clone,
) -> Result<(), ConditionError> {
    for node in selection.clone() {
        if node.len() > g.depth as usize || g.label(node) != Label::Inf {
            return Err(ConditionError::FlipNotInf(*node));
        }
        if let Some(sib) = node.sibling() {
            if g.label(&sib) != Label::Inf {
                return Err(ConditionError::SiblingNotInf(*node));
            }
        }
        for other in selection.clone() {
            if other != node && other.is_strict_prefix_of(node) {
                return Err(ConditionError::NestedSelection(*other, *node));
            }
        }
    }
    Ok(())
}

fn fill_strict_subtree(h: &mut FullLabeling, node: &BinarySeq, label: Label) {
    let depth = h.depth as usize;
    let mut frontier = vec![*node];
    while let Some(x) = frontier.pop() {
        if x.len() >= depth {
            continue;
        }
        for bit in 0..=1u8 {
            let child = x.push(bit);
            h.set(&child, label);
            frontier.push(child);
        }
    }
}

/// The single condition summarizing a legal weakening: the minimal changed
/// nodes with their new labels, the fresh bars all labeled `IN`, and all of
/// their ancestors labeled as in the weakened labeling. Applying
/// [`FullLabeling::apply_min_change`] with the summary reproduces the
/// weakening exactly; anything else is reported as not a legal weakening.
pub fn summarize_weakening(
    g: &FullLabeling,
    h: &FullLabeling,
) -> Result<Condition, ConditionError> {
    if g.variant != h.variant {
        return Err(ConditionError::VariantMismatch(g.variant, h.variant));
    }
    if g.depth != h.depth {
        return Err(ConditionError::DepthMismatch(g.depth, h.depth));
    }
    let mut dom: BTreeSet<BinarySeq> = BTreeSet::new();
    for node in BinarySeq::up_to(g.depth as usize) {
        if h.label(&node) == g.label(&node) {
            continue;
        }
        let below_new_in =
            node.prefixes().filter(|p| *p != node).any(|p| h.label(&p) == Label::In);
        if !below_new_in {
            dom.extend(node.prefixes());
        }
    }
    if dom.is_empty() {
        dom.insert(BinarySeq::empty());
    }
    let entries = dom.into_iter().map(|b| (b, h.label(&b))).collect();
    let summary = Condition { variant: g.variant, entries };
    let rebuilt = g.apply_min_change(&summary)?;
    if &rebuilt != h {
        let witness = BinarySeq::up_to(g.depth as usize)
            .find(|b| rebuilt.label(b) != h.label(b))
            .unwrap_or_else(BinarySeq::empty);
        return Err(ConditionError::NotLegalWeakening(witness));
    }
    Ok(summary)
}

/// The bar a labeling commits to: all strings with an `IN` initial segment,
/// truncated at `d`. Always extension-closed within the depth.
pub fn bar_from_labeling(g: &FullLabeling, d: u32) -> FiniteBarSet {
    FiniteBarSet::from_members(BinarySeq::up_to(d as usize).filter(|b| g.in_covers(b)))
}

#[derive(Debug, Error)]
pub enum SampleError {
    #[error("goal {goal} cannot be met within depth {depth}")]
    GoalOutOfRange { goal: String, depth: u32 },
    #[error("sampler failed to meet `{0}` (exhausted retries)")]
    GoalUnmet(String),
}

/// Structural goals the pseudo-generic sampler guarantees; they play the
/// role of a dense family the sampled labeling must meet.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum SamplerGoal {
    /// Some level `k > n` carries no `OUT` label, so the depth-`k`
    /// restriction lands in the dense family indexed by `n`.
    ResolvedLevelBeyond(u32),
    /// Some node deeper than the cutoff is labeled `INF` together with its
    /// sibling, so a legal weakening can pick it.
    InfSiblingPairBeyond(u32),
}

impl SamplerGoal {
    pub fn met_by(&self, g: &FullLabeling) -> bool {
        match *self {
            SamplerGoal::ResolvedLevelBeyond(n) => ((n + 1)..=g.depth())
                .any(|k| BinarySeq::level(k as usize).all(|b| g.label(&b) != Label::Out)),
            SamplerGoal::InfSiblingPairBeyond(s) => {
                BinarySeq::up_to(g.depth() as usize).any(|b| {
                    b.len() > s as usize
                        && g.label(&b) == Label::Inf
                        && b.sibling().is_some_and(|sib| g.label(&sib) == Label::Inf)
                })
            }
        }
    }
}

impl fmt::Display for SamplerGoal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SamplerGoal::ResolvedLevelBeyond(n) => write!(f, "resolved-level-beyond {n}"),
            SamplerGoal::InfSiblingPairBeyond(s) => write!(f, "inf-sibling-pair-beyond {s}"),
        }
    }
}

struct Rng(ChaCha8Rng);

impl Rng {
    fn below(&mut self, n: u64) -> u64 {
        self.0.next_u64() % n
    }

    fn chance(&mut self, percent: u64) -> bool {
        self.below(100) < percent
    }
}

/// Samples a valid total labeling with an `INF` root, deterministically in
/// the seed, meeting every listed goal. Goals are met by construction: a
/// resolved-level goal forces all `OUT` regions to close with `IN` by the
/// deepest level, and a sibling-pair goal forces one `INF` node right past
/// the cutoff to keep an `INF` sibling.
pub fn sample_pseudo_generic(
    variant: Variant,
    depth: u32,
    goals: &[SamplerGoal],
    seed: u64,
) -> Result<FullLabeling, SampleError> {
    for goal in goals {
        let fits = match *goal {
            SamplerGoal::ResolvedLevelBeyond(n) => n < depth,
            SamplerGoal::InfSiblingPairBeyond(s) => s + 1 <= depth,
        };
        if !fits {
            return Err(SampleError::GoalOutOfRange { goal: goal.to_string(), depth });
        }
    }
    let clean_level = goals
        .iter()
        .any(|g| matches!(g, SamplerGoal::ResolvedLevelBeyond(_)))
        .then_some(depth);
    let pair_parent_level = goals.iter().find_map(|g| match *g {
        SamplerGoal::InfSiblingPairBeyond(s) => Some(s as usize),
        _ => None,
    });

    for attempt in 0..16u64 {
        let mut rng = Rng(ChaCha8Rng::seed_from_u64(
            seed.wrapping_add(attempt.wrapping_mul(0x9E37_79B9_7F4A_7C15)),
        ));
        let mut g = FullLabeling::constant(variant, depth, Label::Inf);
        for level in 0..depth as usize {
            let forcing_pair = pair_parent_level == Some(level);
            let mut pair_forced = false;
            for node in BinarySeq::level(level) {
                let label = g.label(&node);
                let children_clean = clean_level == Some(level as u32 + 1);
                let (l0, l1) = match label {
                    Label::In => (Label::In, Label::In),
                    Label::Out => {
                        let pick = |rng: &mut Rng| {
                            if children_clean || rng.chance(70) {
                                Label::In
                            } else {
                                Label::Out
                            }
                        };
                        (pick(&mut rng), pick(&mut rng))
                    }
                    Label::Inf => {
                        if forcing_pair && !pair_forced {
                            pair_forced = true;
                            (Label::Inf, Label::Inf)
                        } else {
                            inf_children(&mut rng, variant, children_clean)
                        }
                    }
                };
                g.set(&node.push(0), l0);
                g.set(&node.push(1), l1);
            }
        }
        debug_assert!(g.validate().is_empty());
        if goals.iter().all(|goal| goal.met_by(&g)) {
            return Ok(g);
        }
    }
    Err(SampleError::GoalUnmet(
        goals.iter().map(|g| g.to_string()).collect::<Vec<_>>().join(", "),
    ))
}

fn inf_children(rng: &mut Rng, variant: Variant, clean: bool) -> (Label, Label) {
    let pairs_a: &[(u64, (Label, Label))] = &[
        (30, (Label::Inf, Label::Inf)),
        (20, (Label::Inf, Label::In)),
        (20, (Label::In, Label::Inf)),
        (15, (Label::Inf, Label::Out)),
        (15, (Label::Out, Label::Inf)),
    ];
    let pairs_b: &[(u64, (Label, Label))] = &[
        (40, (Label::Inf, Label::Inf)),
        (30, (Label::Inf, Label::In)),
        (30, (Label::In, Label::Inf)),
    ];
    let table: &[(u64, (Label, Label))] = match variant {
        Variant::B => pairs_b,
        Variant::A if clean => &pairs_a[..3],
        Variant::A => pairs_a,
    };
    let total: u64 = table.iter().map(|(w, _)| w).sum();
    let mut roll = rng.below(total);
    for (w, pair) in table {
        if roll < *w {
            return *pair;
        }
        roll -= w;
    }
    unreachable!()
}

/// Packed fixed-width encodings of conditions over small trees, used by the
/// exhaustive enumerations. Two bits per node in breadth-first order:
/// 0 unlabeled, 1 IN, 2 OUT, 3 INF.
mod packed {
    use super::*;

    const UNLABELED: u64 = 0;

    fn from_code(code: u64) -> Option<Label> {
        match code {
            0 => None,
            1 => Some(Label::In),
            2 => Some(Label::Out),
            3 => Some(Label::Inf),
            _ => unreachable!(),
        }
    }

    pub fn node_count(d: u32) -> usize {
        (1 << (d + 1)) - 1
    }

    fn state(packed: u64, i: usize) -> u64 {
        (packed >> (2 * i)) & 3
    }

    pub fn label_count(packed: u64) -> u32 {
        let mut n = 0;
        let mut p = packed;
        while p != 0 {
            if p & 3 != UNLABELED {
                n += 1;
            }
            p >>= 2;
        }
        n
    }

    pub fn unpack(variant: Variant, d: u32, packed: u64) -> Condition {
        let mut entries = BTreeMap::new();
        for i in 0..node_count(d) {
            if let Some(label) = from_code(state(packed, i)) {
                entries.insert(BinarySeq::from_tree_index(i), label);
            }
        }
        Condition::from_entries_unchecked(variant, entries)
    }

    /// Local validity of labeling node `i` with `code`, given the already
    /// assigned part of `packed`.
    fn placement_ok(variant: Variant, packed: u64, i: usize, code: u64) -> bool {
        if code == UNLABELED {
            return true;
        }
        if variant == Variant::B && code == 2 {
            return false;
        }
        if i > 0 {
            match state(packed, (i - 1) / 2) {
                UNLABELED => return false, // prefix closure
                1 => return false,         // nothing labeled beneath IN
                2 if code == 3 => return false,
                _ => {}
            }
        }
        true
    }

    /// The sibling rule for a parent whose children are both decided.
    fn family_ok(packed: u64, parent: usize) -> bool {
        if state(packed, parent) != 3 {
            return true;
        }
        let (c0, c1) = (state(packed, 2 * parent + 1), state(packed, 2 * parent + 2));
        !(c0 != UNLABELED && c1 != UNLABELED && c0 != 3 && c1 != 3)
    }

    pub fn enumerate(variant: Variant, d: u32) -> Vec<u64> {
        assert!(d <= 3, "exhaustive enumeration is supported up to depth 3");
        let n = node_count(d);
        let mut out = Vec::new();
        let mut stack: Vec<(usize, u64)> = vec![(0, 0)];
        while let Some((i, packed)) = stack.pop() {
            if i == n {
                out.push(packed);
                continue;
            }
            for code in [3, 2, 1, UNLABELED] {
                if !placement_ok(variant, packed, i, code) {
                    continue;
                }
                let next = packed | (code << (2 * i));
                // a right child closes out its family
                if i > 0 && i % 2 == 0 && !family_ok(next, (i - 2) / 2) {
                    continue;
                }
                stack.push((i + 1, next));
            }
        }
        out.sort_unstable();
        out
    }

    /// All valid conditions obtained by labeling exactly one more node.
    pub fn one_step_extensions(variant: Variant, d: u32, packed: u64) -> Vec<u64> {
        let n = node_count(d);
        let mut out = Vec::new();
        for i in 0..n {
            if state(packed, i) != UNLABELED {
                continue;
            }
            for code in [1, 2, 3] {
                if !placement_ok(variant, packed, i, code) {
                    continue;
                }
                let next = packed | (code << (2 * i));
                if i > 0 && !family_ok(next, (i - 1) / 2) {
                    continue;
                }
                out.push(next);
            }
        }
        out
    }

}

#[cfg(test)]
mod tests {
    use super::*;

    fn seq(s: &str) -> BinarySeq {
        s.parse().unwrap()
    }

    fn cond(variant: Variant, pairs: &[(&str, Label)]) -> Condition {
        Condition::from_entries_unchecked(
            variant,
            pairs.iter().map(|(n, l)| (seq(n), *l)).collect(),
        )
    }

    #[test]
    fn validate_cases() {
        assert!(cond(Variant::A, &[("e", Label::Inf)]).validate().is_empty());

        let v = cond(Variant::A, &[("e", Label::In), ("0", Label::In)]).validate();
        assert_eq!(v, vec![Violation { node: seq("0"), rule: Rule::InTerminal }]);

        let v = cond(Variant::A, &[("e", Label::Inf), ("0", Label::Out), ("1", Label::Out)])
            .validate();
        assert_eq!(v, vec![Violation { node: seq("e"), rule: Rule::InfBranching }]);

        let v = cond(Variant::A, &[("00", Label::In)]).validate();
        assert!(v.iter().any(|x| x.rule == Rule::PrefixClosed));

        let v = cond(Variant::B, &[("e", Label::Out)]).validate();
        assert_eq!(v, vec![Violation { node: seq("e"), rule: Rule::VariantLabel }]);

        assert!(Condition::empty(Variant::A).validate().is_empty());
    }

    #[test]
    fn extends_cases() {
        let p = cond(Variant::A, &[("e", Label::Inf)]);
        let q = cond(Variant::A, &[("e", Label::Inf), ("0", Label::Inf)]);
        assert!(extends(&p, &p).unwrap());
        assert!(extends(&q, &p).unwrap());
        assert!(!extends(&p, &q).unwrap());
        let changed = cond(Variant::A, &[("e", Label::In)]);
        assert!(!extends(&changed, &p).unwrap());
        assert!(extends(&p, &Condition::empty(Variant::A)).unwrap());
        assert!(matches!(
            extends(&p, &Condition::empty(Variant::B)),
            Err(ConditionError::VariantMismatch(..))
        ));
    }

    #[test]
    fn proj_and_sim_cases() {
        let p = cond(Variant::A, &[("e", Label::Inf)]);
        assert_eq!(proj_q(&p).unwrap(), cond(Variant::A, &[("e", Label::Out)]));
        let fixed = cond(Variant::A, &[("e", Label::Out), ("0", Label::In), ("1", Label::In)]);
        assert_eq!(proj_q(&fixed).unwrap(), fixed);

        assert!(sim(&p, &p).unwrap());
        assert!(sim(&p, &cond(Variant::A, &[("e", Label::Out)])).unwrap());
        assert!(!sim(&p, &cond(Variant::A, &[("e", Label::In)])).unwrap());
    }

    #[test]
    fn proj_idempotent_monotone_sim_equivalence_depth_2() {
        let all = enumerate_valid(Variant::A, 2);
        for p in &all {
            let once = proj_q(p).unwrap();
            assert_eq!(proj_q(&once).unwrap(), once);
            assert!(once.validate().is_empty());
        }
        for p in all.iter().step_by(3) {
            for q in all.iter().step_by(3) {
                if extends(q, p).unwrap() {
                    assert!(extends(&proj_q(q).unwrap(), &proj_q(p).unwrap()).unwrap());
                }
                assert_eq!(sim(p, q).unwrap(), sim(q, p).unwrap());
            }
        }
    }

    #[test]
    fn weakening_order_cases() {
        let p = cond(Variant::B, &[("e", Label::Inf)]);
        let q = cond(Variant::B, &[("e", Label::In)]);
        assert!(weaker_leq_w(&q, &p).unwrap());

        let p2 = cond(Variant::B, &[("e", Label::Inf), ("0", Label::In)]);
        assert!(!weaker_leq_w(&p, &p2).unwrap());

        assert!(weaker_leq_w(&q, &q).unwrap());
    }

    #[test]
    fn weakening_order_is_a_preorder_depth_2() {
        let all = enumerate_valid(Variant::B, 2);
        for p in &all {
            assert!(weaker_leq_w(p, p).unwrap(), "reflexivity at {p}");
        }
        for p in &all {
            for q in &all {
                if !weaker_leq_w(q, p).unwrap() {
                    continue;
                }
                for r in &all {
                    if weaker_leq_w(r, q).unwrap() {
                        assert!(weaker_leq_w(r, p).unwrap(), "transitivity {r} {q} {p}");
                    }
                }
            }
        }
    }

    #[test]
    fn inpart_cases() {
        let q = cond(Variant::B, &[("e", Label::Inf), ("0", Label::In), ("1", Label::Inf)]);
        let r = cond(Variant::B, &[("e", Label::Inf), ("0", Label::Inf), ("1", Label::In)]);
        assert_eq!(inpart(&q, &r).unwrap(), cond(Variant::B, &[("e", Label::In)]));

        for p in enumerate_valid(Variant::B, 2) {
            assert_eq!(inpart(&p, &p).unwrap(), p, "inpart(p,p) at {p}");
        }
    }

    #[test]
    fn project_below_cases() {
        let q = cond(Variant::A, &[("e", Label::Inf), ("0", Label::Inf)]);
        let p = cond(Variant::A, &[("e", Label::Inf), ("0", Label::Out)]);
        assert_eq!(project_below(&q, &p).unwrap(), p);

        // empty difference: q unchanged
        let root_only = cond(Variant::A, &[("e", Label::Inf)]);
        assert_eq!(project_below(&q, &root_only).unwrap(), q);

        // dom(q) inside dom(p): result is p
        let big =
            cond(Variant::A, &[("e", Label::Inf), ("0", Label::Out), ("1", Label::Inf)]);
        assert_eq!(project_below(&root_only, &big).unwrap(), big);

        // INF under a p-OUT is pushed to OUT
        let deep =
            cond(Variant::A, &[("e", Label::Inf), ("0", Label::Inf), ("00", Label::Inf)]);
        let out0 = cond(Variant::A, &[("e", Label::Inf), ("0", Label::Out)]);
        let projected = project_below(&deep, &out0).unwrap();
        assert_eq!(projected.label(&seq("00")), Some(Label::Out));
    }

    #[test]
    fn project_below_always_valid_depth_2() {
        let all = enumerate_valid(Variant::A, 2);
        for q in all.iter().step_by(7) {
            for p in all.iter().step_by(5) {
                let r = project_below(q, p).unwrap();
                assert!(r.validate().is_empty(), "q={q} p={p} r={r}");
                assert!(p.entries().iter().all(|(n, l)| r.label(n) == Some(*l)));
            }
        }
    }

    #[test]
    fn dense_membership_cases() {
        // all of level 1 labeled INF: in the family for n = 0 via k = 1
        let q = cond(Variant::A, &[("e", Label::Inf), ("0", Label::Inf), ("1", Label::Inf)]);
        assert!(dense_dn_member(&q, 0, 3));

        let small = cond(Variant::A, &[("e", Label::Inf)]);
        assert!(!dense_dn_member(&small, 0, 3));

        assert!(!dense_dn_member(&q, 3, 3));
    }

    #[test]
    fn density_check_trivial_predicates() {
        assert_eq!(density_check(Variant::A, &|_| true, 2), None);
        let cex = density_check(Variant::A, &|_| false, 2).unwrap();
        assert_eq!(cex, Condition::empty(Variant::A));
    }

    #[test]
    fn separating_extension_cases() {
        // single INF node: suffix "1"
        let p = cond(Variant::A, &[("e", Label::Inf)]);
        let ext = build_separating_extension(&p, 0).unwrap();
        assert_eq!(ext.label(&seq("1")), Some(Label::Inf));
        assert_eq!(ext.label(&seq("0")), Some(Label::Out));

        // two INF nodes at level 2: suffixes "10" and "01"
        let p2 = cond(
            Variant::A,
            &[
                ("e", Label::Inf),
                ("0", Label::Inf),
                ("1", Label::Inf),
                ("00", Label::Inf),
                ("01", Label::In),
                ("10", Label::In),
                ("11", Label::Inf),
            ],
        );
        let ext2 = build_separating_extension(&p2, 2).unwrap();
        assert_eq!(ext2.label(&seq("0010")), Some(Label::Inf));
        assert_eq!(ext2.label(&seq("1101")), Some(Label::Inf));
        let level4_inf: Vec<BinarySeq> = ext2
            .entries()
            .iter()
            .filter(|(n, &l)| n.len() == 4 && l == Label::Inf)
            .map(|(n, _)| *n)
            .collect();
        assert_eq!(level4_inf, vec![seq("0010"), seq("1101")]);
        for a in &level4_inf {
            for b in &level4_inf {
                if a != b {
                    assert!((0..4).any(|i| a.bit(i) == 1 && b.bit(i) == 0));
                }
            }
        }
        assert!(extends(&ext2, &p2).unwrap());
        assert!(ext2.validate().is_empty());
    }

    #[test]
    fn separating_extension_errors() {
        let no_inf = cond(Variant::A, &[("e", Label::Out)]);
        assert!(matches!(
            build_separating_extension(&no_inf, 0),
            Err(ConditionError::NoInfAtLevel(0))
        ));
    }

    #[test]
    fn labeling_roundtrip_and_validation() {
        let g = sample_pseudo_generic(Variant::A, 3, &[], 5).unwrap();
        assert!(g.validate().is_empty());
        let text = g.to_string();
        assert_eq!(FullLabeling::parse(&text).unwrap(), g);
        assert_eq!(g.label(&BinarySeq::empty()), Label::Inf);
    }

    #[test]
    fn sampler_is_deterministic_and_goal_meeting() {
        let goals =
            [SamplerGoal::ResolvedLevelBeyond(1), SamplerGoal::InfSiblingPairBeyond(2)];
        let a = sample_pseudo_generic(Variant::A, 4, &goals, 0).unwrap();
        let b = sample_pseudo_generic(Variant::A, 4, &goals, 0).unwrap();
        assert_eq!(a, b);
        for goal in &goals {
            assert!(goal.met_by(&a), "unmet {goal}");
        }
        let c = sample_pseudo_generic(Variant::A, 4, &goals, 1).unwrap();
        assert_ne!(a, c, "different seeds should give different labelings here");

        // a met resolved-level goal puts some restriction in the dense family
        let k = (2..=4u32)
            .find(|&k| BinarySeq::level(k as usize).all(|b| a.label(&b) != Label::Out))
            .expect("clean level");
        assert!(dense_dn_member(&a.restrict_depth(k), 1, 4));
    }

    #[test]
    fn sampler_goal_out_of_range() {
        assert!(matches!(
            sample_pseudo_generic(Variant::A, 2, &[SamplerGoal::ResolvedLevelBeyond(2)], 0),
            Err(SampleError::GoalOutOfRange { .. })
        ));
    }

    #[test]
    fn weaken_a_cases() {
        let g = sample_pseudo_generic(Variant::A, 3, &[SamplerGoal::InfSiblingPairBeyond(0)], 3)
            .unwrap();
        // no flips: unchanged
        assert_eq!(legal_weaken_a(&g, &BTreeMap::new()).unwrap(), g);

        // root to IN: constant-IN labeling
        let all_in =
            legal_weaken_a(&g, &BTreeMap::from([(BinarySeq::empty(), Label::In)])).unwrap();
        assert_eq!(all_in, FullLabeling::constant(Variant::A, 3, Label::In));

        // a flippable node with INF sibling goes to OUT and validates
        let target = BinarySeq::up_to(2)
            .find(|b| {
                !b.is_empty()
                    && g.label(b) == Label::Inf
                    && g.label(&b.sibling().unwrap()) == Label::Inf
            })
            .expect("flippable node");
        let h = legal_weaken_a(&g, &BTreeMap::from([(target, Label::Out)])).unwrap();
        assert!(h.validate().is_empty());
        assert_eq!(h.label(&target), Label::Out);
        assert_eq!(h.label(&target.push(0)), Label::In);

        // flipping a node whose sibling is not INF is rejected
        if let Some(bad) = BinarySeq::up_to(2).find(|b| {
            !b.is_empty()
                && g.label(b) == Label::Inf
                && g.label(&b.sibling().unwrap()) != Label::Inf
        }) {
            assert!(matches!(
                legal_weaken_a(&g, &BTreeMap::from([(bad, Label::In)])),
                Err(ConditionError::SiblingNotInf(_))
            ));
        }
    }

    #[test]
    fn weaken_b_cases() {
        let g = sample_pseudo_generic(Variant::B, 3, &[SamplerGoal::InfSiblingPairBeyond(0)], 7)
            .unwrap();
        assert_eq!(legal_weaken_b(&g, &BTreeSet::new()).unwrap(), g);

        let target = BinarySeq::up_to(3)
            .find(|b| {
                !b.is_empty()
                    && g.label(b) == Label::Inf
                    && g.label(&b.sibling().unwrap()) == Label::Inf
            })
            .expect("pickable node");
        let h = legal_weaken_b(&g, &BTreeSet::from([target])).unwrap();
        assert!(h.validate().is_empty());
        assert!(h.in_covers(&target));

        if let Some(bad) = BinarySeq::up_to(3).find(|b| {
            !b.is_empty()
                && g.label(b) == Label::Inf
                && g.label(&b.sibling().unwrap()) == Label::In
        }) {
            assert!(matches!(
                legal_weaken_b(&g, &BTreeSet::from([bad])),
                Err(ConditionError::SiblingNotInf(_))
            ));
        }
        assert!(matches!(
            legal_weaken_b(&g, &BTreeSet::from([target, target.sibling().unwrap()])),
            Err(ConditionError::SiblingAlsoSelected(_))
        ));
    }

    #[test]
    fn summarize_roundtrip() {
        for seed in 0..8u64 {
            let g = sample_pseudo_generic(
                Variant::A,
                3,
                &[SamplerGoal::InfSiblingPairBeyond(0)],
                seed,
            )
            .unwrap();

            // identity weakening
            let p = summarize_weakening(&g, &g).unwrap();
            assert_eq!(p, Condition::root(Variant::A, g.label(&BinarySeq::empty())));

            // root flip to IN summarizes to the single-IN condition
            let all_in =
                legal_weaken_a(&g, &BTreeMap::from([(BinarySeq::empty(), Label::In)])).unwrap();
            assert_eq!(
                summarize_weakening(&g, &all_in).unwrap(),
                Condition::root(Variant::A, Label::In)
            );

            // a real flip round-trips through apply_min_change
            if let Some(target) = BinarySeq::up_to(2).find(|b| {
                !b.is_empty()
                    && g.label(b) == Label::Inf
                    && g.label(&b.sibling().unwrap()) == Label::Inf
            }) {
                for label in [Label::In, Label::Out] {
                    let h = legal_weaken_a(&g, &BTreeMap::from([(target, label)])).unwrap();
                    let p = summarize_weakening(&g, &h).unwrap();
                    assert_eq!(g.apply_min_change(&p).unwrap(), h, "label {label}");
                }
            }
        }
    }

    #[test]
    fn bar_from_labeling_cases() {
        let all_inf = FullLabeling::constant(Variant::A, 3, Label::Inf);
        assert!(bar_from_labeling(&all_inf, 3).is_empty());

        let mut g = FullLabeling::constant(Variant::A, 3, Label::Inf);
        g.set(&seq("0"), Label::In);
        fill_strict_subtree(&mut g, &seq("0"), Label::In);
        assert!(g.validate().is_empty());
        let bar = bar_from_labeling(&g, 3);
        assert!(bar.contains(&seq("0")) && bar.contains(&seq("01")) && bar.contains(&seq("011")));
        assert!(!bar.contains(&seq("1")) && !bar.contains(&seq("e")));
        assert!(bar.is_extension_closed(3));
    }

    #[test]
    fn sampled_labelings_keep_an_inf_path() {
        for seed in 0..6u64 {
            let g = sample_pseudo_generic(Variant::A, 4, &[], seed).unwrap();
            let bar = bar_from_labeling(&g, 4);
            let mut node = BinarySeq::empty();
            for _ in 0..4 {
                assert_eq!(g.label(&node), Label::Inf);
                assert!(!bar.contains(&node));
                node = [node.push(0), node.push(1)]
                    .into_iter()
                    .find(|c| g.label(c) == Label::Inf)
                    .expect("INF child");
            }
        }
    }

    #[test]
    fn condition_parse_roundtrip() {
        let p = cond(
            Variant::A,
            &[("e", Label::Inf), ("0", Label::Out), ("1", Label::Inf), ("00", Label::In)],
        );
        assert!(p.validate().is_empty());
        let text = p.to_string();
        assert_eq!(Condition::parse(&text).unwrap(), p);
        assert!(Condition::parse("e INF").is_err()); // missing header
    }
}
