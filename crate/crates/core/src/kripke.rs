//! Finite Kripke frames and intuitionistic first-order evaluation.
//!
//! A frame is a finite reflexive partial order with a least node, a
//! monotone domain of binary strings per node, and monotone named families
//! (the atom valuation: `u in F` holds at a node iff `u` lies in `F`'s
//! extent there). Implication and the universal quantifier range over all
//! order-successors including the node itself, so truth is persistent
//! whenever the atoms are — which the constructor enforces.
//!
//! The four presets build desk-scale frames for the four bar-class models:
//! a bottom node wrapping a pseudo-generic labeling with a visibility
//! cutoff, plus weakening nodes, terminal-string nodes, indexed nodes, or
//! the trivial all-in top, with family extents derived from the term
//! semantics.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::bars::BinarySeq;
use crate::conditions::{
    self, bar_from_labeling, legal_weaken_b, sample_pseudo_generic, summarize_weakening,
    ConditionError, FullLabeling, Label, SampleError, SamplerGoal, Variant,
};
use crate::formula::{Formula, Identifier, TermExpr};
use crate::terms::{
    interpret_as_strings, make_c, make_cap_c, make_cprime, make_sigma_b, NodeContext, Term,
    TermError,
};

#[derive(Debug, Error)]
pub enum FrameError {
    #[error("frame has no least node")]
    NoLeastNode,
    #[error("order is not antisymmetric between nodes {0} and {1}")]
    NotAntisymmetric(usize, usize),
    #[error("domain shrinks from node {lo} to its successor {hi}")]
    DomainNotMonotone { lo: usize, hi: usize },
    #[error("family `{name}` shrinks from node {lo} to its successor {hi}")]
    FamilyNotMonotone { name: Identifier, lo: usize, hi: usize },
    #[error("family `{name}` misses an extent for some node")]
    FamilyWrongLength { name: Identifier },
    #[error("node index {0} out of range")]
    NodeOutOfRange(usize),
    #[error("unbound variable `{0}`")]
    UnboundVar(Identifier),
    #[error("`{0}` names neither a family nor a string")]
    UnknownName(Identifier),
    #[error("family `{0}` used in element position")]
    FamilyAsElement(Identifier),
    #[error("right side of `in` must name a family, got `{0}`")]
    NeedFamily(String),
    #[error("element {elem} is not in the domain of node {node}")]
    ElemNotVisible { elem: BinarySeq, node: usize },
    #[error("bad parameters: {0}")]
    BadParams(String),
    #[error(transparent)]
    Sample(#[from] SampleError),
    #[error(transparent)]
    Cond(#[from] ConditionError),
    #[error(transparent)]
    Term(#[from] TermError),
}

/// A frame node: either an abstract point (hand-built frames) or a model
/// node context interpreting truth values.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum FrameNode {
    Abstract(String),
    Model(NodeContext),
}

impl fmt::Display for FrameNode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FrameNode::Abstract(name) => write!(f, "abstract {name}"),
            FrameNode::Model(ctx) => write!(f, "{ctx}"),
        }
    }
}

/// Construction parameters recorded in every frame and every dump.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct FrameMeta {
    pub preset: String,
    pub variant: Option<Variant>,
    pub cutoff: u32,
    pub depth: u32,
    pub seed: u64,
    pub layers: u32,
    pub pi_count: u32,
}

pub type Env = BTreeMap<Identifier, BinarySeq>;

#[derive(Clone, Debug)]
pub struct Frame {
    pub meta: FrameMeta,
    nodes: Vec<FrameNode>,
    leq: Vec<bool>,
    domains: Vec<BTreeSet<BinarySeq>>,
    families: BTreeMap<Identifier, Vec<BTreeSet<BinarySeq>>>,
}

impl Frame {
    /// Builds a frame from covering edges; the reflexive-transitive closure
    /// is taken here. Node 0 must come out least, domains and families must
    /// be monotone along the resulting order.
    pub fn new(
        meta: FrameMeta,
        nodes: Vec<FrameNode>,
        covers: &[(usize, usize)],
        domains: Vec<BTreeSet<BinarySeq>>,
        families: BTreeMap<Identifier, Vec<BTreeSet<BinarySeq>>>,
    ) -> Result<Self, FrameError> {
        let n = nodes.len();
        assert_eq!(domains.len(), n, "one domain per node");
        let mut leq = vec![false; n * n];
        for i in 0..n {
            leq[i * n + i] = true;
        }
        for &(a, b) in covers {
            if a >= n || b >= n {
                return Err(FrameError::NodeOutOfRange(a.max(b)));
            }
            leq[a * n + b] = true;
        }
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    if leq[i * n + k] && leq[k * n + j] {
                        leq[i * n + j] = true;
                    }
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                if i != j && leq[i * n + j] && leq[j * n + i] {
                    return Err(FrameError::NotAntisymmetric(i, j));
                }
            }
            if !leq[i] {
                // leq[0 * n + i]
                return Err(FrameError::NoLeastNode);
            }
        }
        let frame = Frame { meta, nodes, leq, domains, families };
        for i in 0..n {
            for j in 0..n {
                if !frame.leq(i, j) || i == j {
                    continue;
                }
                if !frame.domains[i].is_subset(&frame.domains[j]) {
                    return Err(FrameError::DomainNotMonotone { lo: i, hi: j });
                }
                for (name, extents) in &frame.families {
                    if extents.len() != n {
                        return Err(FrameError::FamilyWrongLength { name: name.clone() });
                    }
                    if !extents[i].is_subset(&extents[j]) {
                        return Err(FrameError::FamilyNotMonotone {
                            name: name.clone(),
                            lo: i,
                            hi: j,
                        });
                    }
                }
            }
        }
        Ok(frame)
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn node(&self, i: usize) -> &FrameNode {
        &self.nodes[i]
    }

    pub fn leq(&self, i: usize, j: usize) -> bool {
        self.leq[i * self.nodes.len() + j]
    }

    pub fn successors(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.nodes.len()).filter(move |&j| self.leq(i, j))
    }

    pub fn domain(&self, i: usize) -> &BTreeSet<BinarySeq> {
        &self.domains[i]
    }

    pub fn family_names(&self) -> impl Iterator<Item = &Identifier> {
        self.families.keys()
    }

    pub fn family(&self, name: &Identifier) -> Option<&[BTreeSet<BinarySeq>]> {
        self.families.get(name).map(|v| v.as_slice())
    }

    /// The bottom node's context, when this is a preset frame.
    pub fn bottom_context(&self) -> Option<&NodeContext> {
        match &self.nodes[0] {
            FrameNode::Model(ctx) => Some(ctx),
            _ => None,
        }
    }

    fn resolve_elem(&self, t: &TermExpr, env: &Env) -> Result<BinarySeq, FrameError> {
        match t {
            TermExpr::Var(id) => {
                env.get(id).copied().ok_or_else(|| FrameError::UnboundVar(id.clone()))
            }
            TermExpr::Name(id) => {
                if self.families.contains_key(id) {
                    return Err(FrameError::FamilyAsElement(id.clone()));
                }
                id.as_str().parse().map_err(|_| FrameError::UnknownName(id.clone()))
            }
        }
    }

    fn resolve_family(&self, t: &TermExpr) -> Result<&Vec<BTreeSet<BinarySeq>>, FrameError> {
        match t {
            TermExpr::Name(id) => {
                self.families.get(id).ok_or_else(|| FrameError::NeedFamily(id.to_string()))
            }
            TermExpr::Var(id) => Err(FrameError::NeedFamily(id.to_string())),
        }
    }

    fn check_visible(&self, elem: BinarySeq, node: usize) -> Result<BinarySeq, FrameError> {
        if self.domains[node].contains(&elem) {
            Ok(elem)
        } else {
            Err(FrameError::ElemNotVisible { elem, node })
        }
    }

    /// Intuitionistic evaluation. Conjunction and disjunction are
    /// pointwise; implication and the universal quantifier range over all
    /// successors including the node itself; the existential draws
    /// witnesses from the node's own domain.
    pub fn eval(&self, node: usize, f: &Formula, env: &Env) -> Result<bool, FrameError> {
        if node >= self.nodes.len() {
            return Err(FrameError::NodeOutOfRange(node));
        }
        match f {
            Formula::Falsum => Ok(false),
            Formula::Member(lhs, rhs) => {
                let elem = self.check_visible(self.resolve_elem(lhs, env)?, node)?;
                let fam = self.resolve_family(rhs)?;
                Ok(fam[node].contains(&elem))
            }
            Formula::Equal(lhs, rhs) => {
                let a = self.check_visible(self.resolve_elem(lhs, env)?, node)?;
                let b = self.check_visible(self.resolve_elem(rhs, env)?, node)?;
                Ok(a == b)
            }
            Formula::And(a, b) => Ok(self.eval(node, a, env)? && self.eval(node, b, env)?),
            Formula::Or(a, b) => Ok(self.eval(node, a, env)? || self.eval(node, b, env)?),
            Formula::Implies(a, b) => {
                for succ in self.successors(node) {
                    if self.eval(succ, a, env)? && !self.eval(succ, b, env)? {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
            Formula::Exists(v, body) => {
                for elem in &self.domains[node] {
                    let mut env2 = env.clone();
                    env2.insert(v.clone(), *elem);
                    if self.eval(node, body, &env2)? {
                        return Ok(true);
                    }
                }
                Ok(false)
            }
            Formula::Forall(v, body) => {
                for succ in self.successors(node) {
                    for elem in &self.domains[succ] {
                        let mut env2 = env.clone();
                        env2.insert(v.clone(), *elem);
                        if !self.eval(succ, body, &env2)? {
                            return Ok(false);
                        }
                    }
                }
                Ok(true)
            }
        }
    }

    /// Checks that no closed formula in the list loses truth when moving
    /// up. Formulas mentioning elements invisible at a node are skipped
    /// there rather than reported.
    pub fn check_persistence(&self, formulas: &[Formula]) -> Result<PersistenceReport, FrameError> {
        let env = Env::new();
        let mut violations = Vec::new();
        for f in formulas {
            let mut truths: Vec<Option<bool>> = Vec::with_capacity(self.nodes.len());
            for i in 0..self.nodes.len() {
                match self.eval(i, f, &env) {
                    Ok(b) => truths.push(Some(b)),
                    Err(FrameError::ElemNotVisible { .. }) => truths.push(None),
                    Err(e) => return Err(e),
                }
            }
            for i in 0..self.nodes.len() {
                for j in 0..self.nodes.len() {
                    if i != j
                        && self.leq(i, j)
                        && truths[i] == Some(true)
                        && truths[j] == Some(false)
                    {
                        violations.push(PersistenceViolation {
                            node: i,
                            successor: j,
                            formula: f.clone(),
                        });
                    }
                }
            }
        }
        Ok(PersistenceReport { violations })
    }

    /// One membership atom per family member and visible string, for
    /// feeding [`check_persistence`].
    pub fn membership_atoms(&self) -> Vec<Formula> {
        let mut atoms = Vec::new();
        let mut universe: BTreeSet<BinarySeq> = BTreeSet::new();
        for dom in &self.domains {
            universe.extend(dom.iter().copied());
        }
        for name in self.families.keys() {
            for u in &universe {
                atoms.push(Formula::member(
                    TermExpr::Name(Identifier::new(u.to_string()).expect("string literal")),
                    TermExpr::Name(name.clone()),
                ));
            }
        }
        atoms
    }

    /// Internal decidability of a family at a node: `u in F \/ ~(u in F)`
    /// holds there for every `u` in the given universe.
    pub fn internal_decidable(
        &self,
        node: usize,
        family: &Identifier,
        universe: &BTreeSet<BinarySeq>,
    ) -> Result<bool, FrameError> {
        for u in universe {
            let atom = Formula::member(
                TermExpr::Name(Identifier::new(u.to_string()).expect("string literal")),
                TermExpr::Name(family.clone()),
            );
            let f = Formula::or(atom.clone(), Formula::negated(atom));
            if !self.eval(node, &f, &Env::new())? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Internal uniformity of a family at a node: some single level `n <=
    /// d` works at the node and all its successors — every visible
    /// length-`n` string has an initial segment in the family there.
    pub fn internal_uniform(
        &self,
        node: usize,
        family: &Identifier,
        d: u32,
    ) -> Result<UniformReport, FrameError> {
        let extents = self
            .families
            .get(family)
            .ok_or_else(|| FrameError::NeedFamily(family.to_string()))?;
        let witness = (0..=d).find(|&n| {
            self.successors(node).all(|succ| {
                self.domains[succ]
                    .iter()
                    .filter(|alpha| alpha.len() == n as usize)
                    .all(|alpha| alpha.prefixes().any(|p| extents[succ].contains(&p)))
            })
        });
        Ok(UniformReport { holds: witness.is_some(), witness })
    }

    /// The induced-set biconditional at a node: for each `u` in the
    /// universe, membership in `cfam` agrees with "all visible extensions
    /// stay in `cpfam`", both read as Kripke truth at the node. Extensions
    /// are drawn from each successor's domain, within the frame depth.
    pub fn internal_cset(
        &self,
        node: usize,
        cfam: &Identifier,
        cpfam: &Identifier,
        universe: &BTreeSet<BinarySeq>,
    ) -> Result<CsetReport, FrameError> {
        let c = self
            .families
            .get(cfam)
            .ok_or_else(|| FrameError::NeedFamily(cfam.to_string()))?;
        let cp = self
            .families
            .get(cpfam)
            .ok_or_else(|| FrameError::NeedFamily(cpfam.to_string()))?;
        let depth = self.meta.depth as usize;
        let mut failures = Vec::new();
        for u in universe {
            let lhs = c[node].contains(u);
            let mut rhs = true;
            'scan: for succ in self.successors(node) {
                for v in &self.domains[succ] {
                    if u.len() + v.len() > depth {
                        continue;
                    }
                    let uv = u.concat(v);
                    if self.domains[succ].contains(&uv) && !cp[succ].contains(&uv) {
                        rhs = false;
                        break 'scan;
                    }
                }
            }
            if lhs != rhs {
                failures.push(*u);
            }
        }
        Ok(CsetReport { holds: failures.is_empty(), failures })
    }

    /// Searches for an extension-closure failure of a family across the
    /// frame: a member at some node with an extension falling outside the
    /// family at some later node.
    pub fn extension_closure_witness(
        &self,
        family: &Identifier,
    ) -> Result<Option<ClosureWitness>, FrameError> {
        let extents = self
            .families
            .get(family)
            .ok_or_else(|| FrameError::NeedFamily(family.to_string()))?;
        for i in 0..self.nodes.len() {
            for u in &extents[i] {
                for j in self.successors(i) {
                    for w in &self.domains[j] {
                        if w.is_empty() || u.len() + w.len() > self.meta.depth as usize {
                            continue;
                        }
                        let uw = u.concat(w);
                        if self.domains[j].contains(&uw) && !extents[j].contains(&uw) {
                            return Ok(Some(ClosureWitness {
                                member_node: i,
                                member: *u,
                                extension: uw,
                                failing_node: j,
                            }));
                        }
                    }
                }
            }
        }
        Ok(None)
    }

    /// Deterministic text dump: header, nodes, order, domains, families.
    pub fn dump(&self) -> String {
        use std::fmt::Write;
        let mut out = String::new();
        let m = &self.meta;
        let variant =
            m.variant.map(|v| v.to_string()).unwrap_or_else(|| "-".to_string());
        writeln!(
            out,
            "frame {} variant={} cutoff={} depth={} seed={} layers={} pi={}",
            m.preset, variant, m.cutoff, m.depth, m.seed, m.layers, m.pi_count
        )
        .unwrap();
        writeln!(out, "nodes {}", self.nodes.len()).unwrap();
        for (i, node) in self.nodes.iter().enumerate() {
            writeln!(out, "{i} {node}").unwrap();
        }
        writeln!(out, "order").unwrap();
        for i in 0..self.nodes.len() {
            for j in 0..self.nodes.len() {
                if i != j && self.leq(i, j) {
                    writeln!(out, "{i} <= {j}").unwrap();
                }
            }
        }
        writeln!(out, "domains").unwrap();
        for (i, dom) in self.domains.iter().enumerate() {
            let items: Vec<String> = dom.iter().map(|b| b.to_string()).collect();
            writeln!(out, "{i}: {}", items.join(" ")).unwrap();
        }
        writeln!(out, "families").unwrap();
        for (name, extents) in &self.families {
            for (i, extent) in extents.iter().enumerate() {
                let items: Vec<String> = extent.iter().map(|b| b.to_string()).collect();
                writeln!(out, "{name} @{i}: {}", items.join(" ")).unwrap();
            }
        }
        out
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PersistenceViolation {
    pub node: usize,
    pub successor: usize,
    pub formula: Formula,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PersistenceReport {
    pub violations: Vec<PersistenceViolation>,
}

impl PersistenceReport {
    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct UniformReport {
    pub holds: bool,
    pub witness: Option<u32>,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CsetReport {
    pub holds: bool,
    pub failures: Vec<BinarySeq>,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct ClosureWitness {
    pub member_node: usize,
    pub member: BinarySeq,
    pub extension: BinarySeq,
    pub failing_node: usize,
}

impl fmt::Display for ClosureWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} in the family at node {}, extension {} outside it at node {}",
            self.member, self.member_node, self.extension, self.failing_node
        )
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum PresetKind {
    Fand,
    Fanc,
    Fanpi,
    Fanfull,
}

impl PresetKind {
    pub fn name(&self) -> &'static str {
        match self {
            PresetKind::Fand => "fand",
            PresetKind::Fanc => "fanc",
            PresetKind::Fanpi => "fanpi",
            PresetKind::Fanfull => "fanfull",
        }
    }
}

impl std::str::FromStr for PresetKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "fand" => Ok(PresetKind::Fand),
            "fanc" => Ok(PresetKind::Fanc),
            "fanpi" => Ok(PresetKind::Fanpi),
            "fanfull" => Ok(PresetKind::Fanfull),
            _ => Err(format!("unknown preset `{s}`")),
        }
    }
}

fn check_params(s: u32, d: u32) -> Result<(), FrameError> {
    if !(1 <= s && s < d) {
        return Err(FrameError::BadParams(format!(
            "need 1 <= cutoff < depth, got cutoff={s} depth={d}"
        )));
    }
    if d > 8 {
        return Err(FrameError::BadParams(format!("depth {d} too large for enumeration")));
    }
    Ok(())
}

fn ident(s: &str) -> Identifier {
    Identifier::new(s).expect("static identifier")
}

fn strings_up_to(d: u32) -> BTreeSet<BinarySeq> {
    BinarySeq::up_to(d as usize).collect()
}

/// Family extents from a term: interpret at each model node, intersected
/// with that node's domain.
fn family_from_term(
    term: &Term,
    nodes: &[FrameNode],
    domains: &[BTreeSet<BinarySeq>],
) -> Result<Vec<BTreeSet<BinarySeq>>, FrameError> {
    let mut extents = Vec::with_capacity(nodes.len());
    for (node, dom) in nodes.iter().zip(domains) {
        let ctx = match node {
            FrameNode::Model(ctx) => ctx,
            FrameNode::Abstract(name) => {
                return Err(FrameError::BadParams(format!(
                    "abstract node `{name}` has no term semantics"
                )))
            }
        };
        let full = interpret_as_strings(term, ctx)?;
        extents.push(full.intersection(dom).copied().collect());
    }
    Ok(extents)
}

/// Nodes a weakening can flip: beyond the cutoff, labeled `INF`, with an
/// `INF` sibling, in shortlex order.
fn flip_candidates(g: &FullLabeling, s: u32) -> Vec<BinarySeq> {
    BinarySeq::up_to(g.depth() as usize)
        .filter(|b| {
            b.len() > s as usize
                && g.label(b) == Label::Inf
                && b.sibling().is_some_and(|sib| g.label(&sib) == Label::Inf)
        })
        .collect()
}

/// The decidable-bar model: a bottom node beneath a variant-A labeling,
/// weakening successors that only touch labels past the cutoff, and the
/// trivial all-in top as the terminal analogue.
pub fn preset_fand(s: u32, d: u32, seed: u64) -> Result<Frame, FrameError> {
    check_params(s, d)?;
    let goals = [
        SamplerGoal::ResolvedLevelBeyond(s),
        SamplerGoal::InfSiblingPairBeyond(s),
    ];
    let g = sample_pseudo_generic(Variant::A, d, &goals, seed)?;

    let mut nodes =
        vec![FrameNode::Model(NodeContext::Bottom { labeling: g.clone(), cutoff: s })];
    let mut covers = Vec::new();
    let candidates = flip_candidates(&g, s);
    let mut weak_idx = Vec::new();
    let mut used: Vec<BinarySeq> = Vec::new();
    for (target_label, want_room) in [(Label::In, false), (Label::Out, true)] {
        let pick = candidates.iter().copied().find(|c| {
            (!want_room || c.len() < d as usize)
                && !used.contains(c)
                && used.iter().all(|u| Some(*u) != c.sibling())
        });
        if let Some(target) = pick {
            let h = conditions::legal_weaken_a(
                &g,
                &BTreeMap::from([(target, target_label)]),
            )?;
            let summary = summarize_weakening(&g, &h)?;
            nodes.push(FrameNode::Model(NodeContext::Weak { summary, labeling: h }));
            let idx = nodes.len() - 1;
            covers.push((0, idx));
            weak_idx.push(idx);
            used.push(target);
        }
    }
    nodes.push(FrameNode::Model(NodeContext::TrivialTop));
    let top = nodes.len() - 1;
    covers.push((0, top));
    for &w in &weak_idx {
        covers.push((w, top));
    }

    let mut domains = vec![strings_up_to(s)];
    domains.extend(std::iter::repeat_with(|| strings_up_to(d)).take(nodes.len() - 1));

    let bar_family = family_from_term(&make_sigma_b(d), &nodes, &domains)?;
    let families = BTreeMap::from([(ident("B"), bar_family)]);

    Frame::new(
        FrameMeta {
            preset: "fand".into(),
            variant: Some(Variant::A),
            cutoff: s,
            depth: d,
            seed,
            layers: 3,
            pi_count: 0,
        },
        nodes,
        &covers,
        domains,
        families,
    )
}

/// The c-set model: a variant-B labeling, weakening successors, one
/// terminal-string node over each cutoff-level `INF` cone (so every
/// standard unresolved node has a terminal extension), and the trivial top.
pub fn preset_fanc(s: u32, d: u32, seed: u64) -> Result<Frame, FrameError> {
    check_params(s, d)?;
    let goals = [SamplerGoal::InfSiblingPairBeyond(s)];
    let g = sample_pseudo_generic(Variant::B, d, &goals, seed)?;

    let mut nodes =
        vec![FrameNode::Model(NodeContext::Bottom { labeling: g.clone(), cutoff: s })];
    let mut covers = Vec::new();

    let candidates = flip_candidates(&g, s);
    let mut weak_idx = Vec::new();
    let mut used: Vec<BinarySeq> = Vec::new();
    for _ in 0..2 {
        let pick = candidates
            .iter()
            .copied()
            .find(|c| !used.contains(c) && used.iter().all(|u| Some(*u) != c.sibling()));
        if let Some(target) = pick {
            let h = legal_weaken_b(&g, &BTreeSet::from([target]))?;
            let summary = summarize_weakening(&g, &h)?;
            nodes.push(FrameNode::Model(NodeContext::Weak { summary, labeling: h }));
            let idx = nodes.len() - 1;
            covers.push((0, idx));
            weak_idx.push(idx);
            used.push(target);
        }
    }

    // one terminal per INF node at the cutoff level: its least INF child
    let mut terminal_strings = BTreeSet::new();
    for w in BinarySeq::level(s as usize) {
        if g.label(&w) != Label::Inf {
            continue;
        }
        let c = [w.push(0), w.push(1)]
            .into_iter()
            .find(|child| g.label(child) == Label::Inf)
            .expect("an INF node below the depth keeps an INF child");
        terminal_strings.insert(c);
    }
    let mut terminal_idx = Vec::new();
    for c in &terminal_strings {
        nodes.push(FrameNode::Model(NodeContext::Terminal { c: *c }));
        let idx = nodes.len() - 1;
        covers.push((0, idx));
        terminal_idx.push(idx);
    }

    nodes.push(FrameNode::Model(NodeContext::TrivialTop));
    let top = nodes.len() - 1;
    covers.push((0, top));
    for &w in &weak_idx {
        covers.push((w, top));
    }

    let mut domains = vec![strings_up_to(s)];
    domains.extend(std::iter::repeat_with(|| strings_up_to(d)).take(nodes.len() - 1));

    let families = BTreeMap::from([
        (ident("C"), family_from_term(&make_c(d), &nodes, &domains)?),
        (ident("Cprime"), family_from_term(&make_cprime(d), &nodes, &domains)?),
    ]);

    Frame::new(
        FrameMeta {
            preset: "fanc".into(),
            variant: Some(Variant::B),
            cutoff: s,
            depth: d,
            seed,
            layers: 3,
            pi_count: 0,
        },
        nodes,
        &covers,
        domains,
        families,
    )
}

/// The intersection-of-trees model: a variant-B labeling and a flat layer
/// of indexed nodes `(n, alpha)` with `n` past the cutoff and `alpha`
/// either an unresolved standard node or a string just past the cutoff.
pub fn preset_fanpi(s: u32, d: u32, m: u32, seed: u64) -> Result<Frame, FrameError> {
    check_params(s, d)?;
    if m < 1 {
        return Err(FrameError::BadParams("need at least one indexed node".into()));
    }
    let g = sample_pseudo_generic(Variant::B, d, &[], seed)?;

    // standard unresolved strings other than the root
    let std_inf: Vec<BinarySeq> = BinarySeq::up_to(s as usize)
        .filter(|b| !b.is_empty() && g.label(b) == Label::Inf)
        .collect();
    // strings just past the cutoff, extensions of barred-with-unresolved-
    // sibling nodes first: those witness the non-closure of the
    // intersection family from the bottom's point of view
    let mut nonstd: Vec<BinarySeq> = BinarySeq::level(s as usize + 1)
        .filter(|b| {
            b.prefixes().any(|p| {
                !p.is_empty()
                    && g.label(&p) == Label::In
                    && p.sibling().is_some_and(|sib| g.label(&sib) == Label::Inf)
            })
        })
        .collect();
    nonstd.extend(BinarySeq::level(s as usize + 1));

    let mut nodes =
        vec![FrameNode::Model(NodeContext::Bottom { labeling: g.clone(), cutoff: s })];
    let mut covers = Vec::new();
    let mut seen = BTreeSet::new();
    for j in 1..=m {
        let n = s + j;
        let alpha = if j % 2 == 1 && !std_inf.is_empty() {
            std_inf[((j - 1) / 2) as usize % std_inf.len()]
        } else {
            nonstd[(j / 2).max(1) as usize % nonstd.len()]
        };
        if !seen.insert((n, alpha)) {
            continue;
        }
        nodes.push(FrameNode::Model(NodeContext::Pi { n, alpha }));
        covers.push((0, nodes.len() - 1));
    }

    let mut domains = vec![strings_up_to(s)];
    domains.extend(std::iter::repeat_with(|| strings_up_to(d)).take(nodes.len() - 1));

    // The indexed trees themselves are not registered as frame families:
    // their index pairs also index nodes, so as atoms they are only
    // persistent for indices the bottom cannot see. They stay reachable
    // through term interpretation (`make_tn`) at any node context.
    let families = BTreeMap::from([(
        ident("capC"),
        family_from_term(&make_cap_c(d), &nodes, &domains)?,
    )]);

    Frame::new(
        FrameMeta {
            preset: "fanpi".into(),
            variant: Some(Variant::B),
            cutoff: s,
            depth: d,
            seed,
            layers: 2,
            pi_count: m,
        },
        nodes,
        &covers,
        domains,
        families,
    )
}

/// The unrestricted-bar model: every `INF`-labeled string indexes a
/// terminal successor; domains are not cut off, mirroring the restriction
/// that later nodes only see ground objects.
pub fn preset_fanfull(s: u32, d: u32, seed: u64) -> Result<Frame, FrameError> {
    check_params(s, d)?;
    let g = sample_pseudo_generic(Variant::B, d, &[], seed)?;

    let mut nodes =
        vec![FrameNode::Model(NodeContext::Bottom { labeling: g.clone(), cutoff: s })];
    let mut covers = Vec::new();
    for alpha in BinarySeq::up_to(d as usize) {
        if g.label(&alpha) == Label::Inf {
            nodes.push(FrameNode::Model(NodeContext::Terminal { c: alpha }));
            covers.push((0, nodes.len() - 1));
        }
    }

    let domains = vec![strings_up_to(d); nodes.len()];
    let families =
        BTreeMap::from([(ident("C"), family_from_term(&make_c(d), &nodes, &domains)?)]);

    Frame::new(
        FrameMeta {
            preset: "fanfull".into(),
            variant: Some(Variant::B),
            cutoff: s,
            depth: d,
            seed,
            layers: 2,
            pi_count: 0,
        },
        nodes,
        &covers,
        domains,
        families,
    )
}

pub fn build_preset(kind: PresetKind, s: u32, d: u32, m: u32, seed: u64) -> Result<Frame, FrameError> {
    match kind {
        PresetKind::Fand => preset_fand(s, d, seed),
        PresetKind::Fanc => preset_fanc(s, d, seed),
        PresetKind::Fanpi => preset_fanpi(s, d, m, seed),
        PresetKind::Fanfull => preset_fanfull(s, d, seed),
    }
}

#[derive(Clone, Debug)]
pub struct AuditLine {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Default)]
pub struct PresetAudit {
    pub lines: Vec<AuditLine>,
}

impl PresetAudit {
    pub fn all_pass(&self) -> bool {
        self.lines.iter().all(|l| l.pass)
    }

    fn push(&mut self, name: &str, pass: bool, detail: String) {
        self.lines.push(AuditLine { name: name.to_string(), pass, detail });
    }
}

/// The standard semantic checks for each preset, with one named line per
/// expectation.
pub fn audit_preset(frame: &Frame) -> Result<PresetAudit, FrameError> {
    let mut audit = PresetAudit::default();
    let meta = &frame.meta;
    let s = meta.cutoff;
    let d = meta.depth;
    let std_strings = strings_up_to(s);
    let bottom = frame
        .bottom_context()
        .ok_or_else(|| FrameError::BadParams("not a preset frame".into()))?;
    let g = match bottom {
        NodeContext::Bottom { labeling, .. } => labeling.clone(),
        _ => return Err(FrameError::BadParams("node 0 is not a bottom context".into())),
    };

    match meta.preset.as_str() {
        "fand" => {
            let bar = bar_from_labeling(&g, s);
            audit.push(
                "bar-extension-closed",
                bar.is_extension_closed(s),
                format!("{} members at depth {s}", bar.len()),
            );
            let u = frame.internal_uniform(0, &ident("B"), d)?;
            audit.push(
                "internal-uniform-false-at-bottom",
                !u.holds,
                format!("witness: {:?}", u.witness),
            );
            // terminal analogue: the trivial top is uniform on its own
            let mut all_terminal_uniform = true;
            for i in 1..frame.node_count() {
                if frame.successors(i).count() == 1 {
                    let t = frame.internal_uniform(i, &ident("B"), d)?;
                    all_terminal_uniform &= t.holds;
                }
            }
            audit.push(
                "terminal-analogues-uniform",
                all_terminal_uniform,
                "every maximal node carries a full bar level".into(),
            );
        }
        "fanc" => {
            let dec = frame.internal_decidable(0, &ident("Cprime"), &std_strings)?;
            audit.push("internal-decidable-cprime", dec, "over standard strings".into());
            let u = frame.internal_uniform(0, &ident("C"), d)?;
            audit.push(
                "internal-uniform-c-false",
                !u.holds,
                format!("witness: {:?}", u.witness),
            );
            let cset = frame.internal_cset(0, &ident("C"), &ident("Cprime"), &std_strings)?;
            audit.push(
                "cset-biconditional",
                cset.holds,
                format!("failures: {:?}", cset.failures),
            );
        }
        "fanpi" => {
            let cap = frame.family(&ident("capC")).expect("capC family");
            let expected: BTreeSet<BinarySeq> =
                BinarySeq::up_to(d as usize).filter(|b| g.in_covers(b)).collect();
            let expected_btm: BTreeSet<BinarySeq> =
                expected.iter().filter(|b| b.len() <= s as usize).copied().collect();
            audit.push(
                "capc-bottom-is-in-set",
                cap[0] == expected_btm,
                format!("{} members", cap[0].len()),
            );
            let mut pi_ok = true;
            for i in 1..frame.node_count() {
                if let FrameNode::Model(NodeContext::Pi { alpha, .. }) = frame.node(i) {
                    let want: BTreeSet<BinarySeq> =
                        BinarySeq::up_to(d as usize).filter(|b| b != alpha).collect();
                    pi_ok &= cap[i] == want;
                }
            }
            audit.push(
                "capc-at-indexed-nodes",
                pi_ok,
                "everything except the designated string".into(),
            );
            let witness = frame.extension_closure_witness(&ident("capC"))?;
            audit.push(
                "capc-not-extension-closed",
                witness.is_some(),
                witness.map(|w| w.to_string()).unwrap_or_else(|| "no witness".into()),
            );
        }
        "fanfull" => {
            let c = frame.family(&ident("C")).expect("C family");
            let expected_btm: BTreeSet<BinarySeq> =
                BinarySeq::up_to(d as usize).filter(|b| g.in_covers(b)).collect();
            audit.push(
                "c-bottom-is-in-set",
                c[0] == expected_btm,
                format!("{} members", c[0].len()),
            );
            let mut succ_ok = true;
            for i in 1..frame.node_count() {
                if let FrameNode::Model(NodeContext::Terminal { c: alpha }) = frame.node(i) {
                    let want: BTreeSet<BinarySeq> = BinarySeq::up_to(d as usize)
                        .filter(|b| !b.is_prefix_of(alpha))
                        .collect();
                    succ_ok &= c[i] == want;
                }
            }
            audit.push(
                "successor-c-semantics",
                succ_ok,
                "membership is non-prefixhood of the node string".into(),
            );
        }
        other => {
            return Err(FrameError::BadParams(format!("no audit for preset `{other}`")));
        }
    }
    Ok(audit)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{ident as fid, parse_formula, ParseContext};

    /// Two-node chain with one atom family `A` true only at the top.
    fn lem_countermodel() -> Frame {
        let e: BTreeSet<BinarySeq> = BTreeSet::from([BinarySeq::empty()]);
        Frame::new(
            FrameMeta { preset: "custom".into(), depth: 0, ..Default::default() },
            vec![
                FrameNode::Abstract("bottom".into()),
                FrameNode::Abstract("top".into()),
            ],
            &[(0, 1)],
            vec![e.clone(), e.clone()],
            BTreeMap::from([(fid("A"), vec![BTreeSet::new(), e])]),
        )
        .unwrap()
    }

    fn pctx() -> ParseContext {
        ParseContext::new().with_names([fid("A"), fid("e")])
    }

    #[test]
    fn excluded_middle_fails_at_bottom() {
        let frame = lem_countermodel();
        let f = parse_formula("e in A \\/ ~(e in A)", &pctx()).unwrap();
        assert!(!frame.eval(0, &f, &Env::new()).unwrap());
        assert!(frame.eval(1, &f, &Env::new()).unwrap());
    }

    #[test]
    fn double_negation_holds_at_bottom() {
        let frame = lem_countermodel();
        let f = parse_formula("~~(e in A)", &pctx()).unwrap();
        assert!(frame.eval(0, &f, &Env::new()).unwrap());
    }

    #[test]
    fn monotone_frames_are_persistent_small_enumeration() {
        // all partial orders on three nodes with least node 0, all monotone
        // single-atom valuations over a one-element domain, formulas to
        // connective depth three
        let e = BinarySeq::empty();
        let dom: BTreeSet<BinarySeq> = BTreeSet::from([e]);
        let orders: Vec<Vec<(usize, usize)>> = vec![
            vec![(0, 1), (1, 2)],
            vec![(0, 1), (0, 2)],
            vec![(0, 1)],
            vec![],
        ];
        let atom = parse_formula("e in A", &pctx()).unwrap();
        let mut formulas = vec![atom.clone(), Formula::negated(atom.clone()), Formula::Falsum];
        let base = formulas.clone();
        for _ in 0..2 {
            let mut next = formulas.clone();
            for a in &formulas {
                for b in &base {
                    next.push(Formula::and(a.clone(), b.clone()));
                    next.push(Formula::or(a.clone(), b.clone()));
                    next.push(Formula::implies(a.clone(), b.clone()));
                }
            }
            next.sort();
            next.dedup();
            next.truncate(120);
            formulas = next;
        }

        for covers in &orders {
            for mask in 0u32..8 {
                // valuation: atom true at node i iff bit i set
                let extents: Vec<BTreeSet<BinarySeq>> = (0..3)
                    .map(|i| {
                        if mask >> i & 1 == 1 {
                            BTreeSet::from([e])
                        } else {
                            BTreeSet::new()
                        }
                    })
                    .collect();
                let frame = Frame::new(
                    FrameMeta { preset: "custom".into(), ..Default::default() },
                    vec![
                        FrameNode::Abstract("n0".into()),
                        FrameNode::Abstract("n1".into()),
                        FrameNode::Abstract("n2".into()),
                    ],
                    covers,
                    vec![dom.clone(), dom.clone(), dom.clone()],
                    BTreeMap::from([(fid("A"), extents)]),
                );
                let frame = match frame {
                    Ok(f) => f,
                    // orders without a least node and non-monotone
                    // valuations are rejected at construction
                    Err(FrameError::NoLeastNode | FrameError::FamilyNotMonotone { .. }) => {
                        continue
                    }
                    Err(e) => panic!("{e}"),
                };
                let report = frame.check_persistence(&formulas).unwrap();
                assert!(report.is_empty(), "violations: {:?}", report.violations);
            }
        }
    }

    #[test]
    fn broken_valuation_is_rejected_or_reported() {
        // directly constructing a non-monotone family fails validation,
        // which is the negative control for the persistence machinery
        let e = BinarySeq::empty();
        let dom: BTreeSet<BinarySeq> = BTreeSet::from([e]);
        let res = Frame::new(
            FrameMeta::default(),
            vec![FrameNode::Abstract("a".into()), FrameNode::Abstract("b".into())],
            &[(0, 1)],
            vec![dom.clone(), dom],
            BTreeMap::from([(fid("A"), vec![BTreeSet::from([e]), BTreeSet::new()])]),
        );
        assert!(matches!(res, Err(FrameError::FamilyNotMonotone { .. })));
    }

    #[test]
    fn eval_reports_unbound_and_invisible() {
        let frame = lem_countermodel();
        let bad = Formula::member(TermExpr::Var(fid("x")), TermExpr::Name(fid("A")));
        assert!(matches!(
            frame.eval(0, &bad, &Env::new()),
            Err(FrameError::UnboundVar(_))
        ));
        let invisible = Formula::member(TermExpr::Name(fid("01")), TermExpr::Name(fid("A")));
        assert!(matches!(
            frame.eval(0, &invisible, &Env::new()),
            Err(FrameError::ElemNotVisible { .. })
        ));
    }

    #[test]
    fn internal_decidable_cases() {
        let frame = lem_countermodel();
        // the family gains `e` only at the top while the bottom never
        // settles it: not internally decidable at the bottom
        let universe = BTreeSet::from([BinarySeq::empty()]);
        assert!(!frame.internal_decidable(0, &fid("A"), &universe).unwrap());
        assert!(frame.internal_decidable(1, &fid("A"), &universe).unwrap());

        // a constant family is internally decidable everywhere
        let e = BinarySeq::empty();
        let dom = BTreeSet::from([e]);
        let frame2 = Frame::new(
            FrameMeta::default(),
            vec![FrameNode::Abstract("a".into()), FrameNode::Abstract("b".into())],
            &[(0, 1)],
            vec![dom.clone(), dom.clone()],
            BTreeMap::from([(fid("A"), vec![dom.clone(), dom])]),
        )
        .unwrap();
        assert!(frame2.internal_decidable(0, &fid("A"), &BTreeSet::from([e])).unwrap());
    }

    #[test]
    fn preset_fand_shape_and_audit() {
        for seed in [0, 1, 2] {
            let frame = preset_fand(3, 6, seed).unwrap();
            assert!(frame.node_count() >= 3, "bottom, a weakening, top");
            let audit = audit_preset(&frame).unwrap();
            assert!(
                audit.all_pass(),
                "seed {seed}: {:?}",
                audit.lines.iter().filter(|l| !l.pass).collect::<Vec<_>>()
            );
            let atoms = frame.membership_atoms();
            assert!(frame.check_persistence(&atoms).unwrap().is_empty());
        }
    }

    #[test]
    fn preset_fanc_shape_and_audit() {
        for seed in [0, 1, 2] {
            let frame = preset_fanc(3, 6, seed).unwrap();
            let has_weak = (0..frame.node_count())
                .any(|i| matches!(frame.node(i), FrameNode::Model(NodeContext::Weak { .. })));
            let has_terminal = (0..frame.node_count())
                .any(|i| matches!(frame.node(i), FrameNode::Model(NodeContext::Terminal { .. })));
            assert!(has_weak && has_terminal, "seed {seed}");
            let audit = audit_preset(&frame).unwrap();
            assert!(
                audit.all_pass(),
                "seed {seed}: {:?}",
                audit.lines.iter().filter(|l| !l.pass).collect::<Vec<_>>()
            );
            let atoms = frame.membership_atoms();
            assert!(frame.check_persistence(&atoms).unwrap().is_empty());
        }
    }

    #[test]
    fn preset_fanpi_shape_and_audit() {
        for seed in [0, 1, 2] {
            let frame = preset_fanpi(3, 6, 2, seed).unwrap();
            let audit = audit_preset(&frame).unwrap();
            assert!(
                audit.all_pass(),
                "seed {seed}: {:?}",
                audit.lines.iter().filter(|l| !l.pass).collect::<Vec<_>>()
            );
            let atoms = frame.membership_atoms();
            assert!(frame.check_persistence(&atoms).unwrap().is_empty());
        }
    }

    #[test]
    fn preset_fanfull_shape_and_audit() {
        for seed in [0, 1, 2] {
            let frame = preset_fanfull(3, 6, seed).unwrap();
            let audit = audit_preset(&frame).unwrap();
            assert!(
                audit.all_pass(),
                "seed {seed}: {:?}",
                audit.lines.iter().filter(|l| !l.pass).collect::<Vec<_>>()
            );
            let atoms = frame.membership_atoms();
            assert!(frame.check_persistence(&atoms).unwrap().is_empty());
        }
    }

    #[test]
    fn dumps_are_reproducible() {
        let a = preset_fanc(2, 4, 9).unwrap().dump();
        let b = preset_fanc(2, 4, 9).unwrap().dump();
        assert_eq!(a, b);
        assert!(a.starts_with("frame fanc variant=B cutoff=2 depth=4 seed=9"));
    }
}
