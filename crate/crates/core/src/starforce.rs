//! Bounded evaluators for the three star-forcing relations, and exhaustive
//! suites for their invariance and monotonicity laws.
//!
//! Star forcing is the internally definable companion of the model
//! semantics: a relation between conditions and formulas, defined by
//! induction on the formula with quantifiers over conditions and terms.
//! Three variants are implemented:
//!
//! * `A` — shadow-projection clauses over the three-label conditions:
//!   membership consults the projection, and the universal clauses range
//!   over the projection class of the condition and its extensions;
//! * `B` — weakening clauses over the two-label conditions plus negative
//!   side conditions: statements must also hold classically under every
//!   negative prime literal the condition has not ruled out;
//! * `C` — extension clauses over two-label conditions with indexed
//!   negative literals guarded by the condition's length.
//!
//! Everything is bounded: condition quantifiers range over the enumerated
//! universe at the context depth, term quantifiers over the finite named
//! universe, and searches for an extension are exhaustive within those
//! bounds. Absence of a witness within the budget counts as false; every
//! report carries the budget.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use thiserror::Error;

use crate::bars::BinarySeq;
use crate::conditions::{
    self, enumerate_valid, extends, proj_q, proper_weakening, weaker_leq_w, Condition,
    ConditionError, Label, Variant,
};
use crate::formula::{Formula, FormulaError, Identifier, TermExpr};
use crate::terms::{
    make_c, make_cap_c, make_cprime, make_sigma_b, make_tn, neg_admits, restrict_neg, ExtVal,
    Gate, Term, TermError, TermKind, TermStyle, TruthValue,
};
use crate::terms::{make_hat, Family};

#[derive(Debug, Error)]
pub enum ForceError {
    #[error("term rank {rank} exceeds the bound {bound}")]
    RankExhausted { rank: u32, bound: u32 },
    #[error("`{0}` is not in the term universe")]
    NameNotInUniverse(Identifier),
    #[error("unbound variable `{0}`")]
    UnboundVariable(Identifier),
    #[error("term style does not fit the forcing variant: {0}")]
    WrongTermStyle(String),
    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),
    #[error(transparent)]
    Cond(#[from] ConditionError),
    #[error(transparent)]
    Term(#[from] TermError),
    #[error(transparent)]
    Formula(#[from] FormulaError),
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum ForcingVariant {
    A,
    B,
    C,
}

impl fmt::Display for ForcingVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ForcingVariant::A => f.write_str("A"),
            ForcingVariant::B => f.write_str("B"),
            ForcingVariant::C => f.write_str("C"),
        }
    }
}

impl std::str::FromStr for ForcingVariant {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "A" => Ok(ForcingVariant::A),
            "B" => Ok(ForcingVariant::B),
            "C" => Ok(ForcingVariant::C),
            _ => Err(format!("unknown forcing variant `{s}`")),
        }
    }
}

impl ForcingVariant {
    pub fn condition_variant(&self) -> Variant {
        match self {
            ForcingVariant::A => Variant::A,
            _ => Variant::B,
        }
    }
}

/// The finite universes behind the quantifiers, plus the bounds stamped on
/// every report.
#[derive(Clone, Debug)]
pub struct ForcingContext {
    pub variant: ForcingVariant,
    pub depth: u32,
    pub terms: Vec<(Identifier, Term)>,
    pub rank_bound: u32,
    pub cutoff: u32,
    /// Bound on the numeric index of negative literals in variant `C`.
    pub nbound: u32,
}

impl ForcingContext {
    /// The default context at a given depth: the standard six-term
    /// universe of the variant and generous rank bounds.
    pub fn standard(variant: ForcingVariant, depth: u32) -> Self {
        ForcingContext {
            variant,
            depth,
            terms: default_universe(variant, depth),
            rank_bound: 10,
            cutoff: 1,
            nbound: depth + 2,
        }
    }
}

/// Deliberate clause corruptions for negative-control runs: the suites
/// must catch these.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Mutation {
    /// Variant A: membership consults the raw condition instead of its
    /// shadow projection, breaking projection invariance.
    RawMembershipGate,
    /// Variants B and C: the membership gate check is negated, breaking
    /// monotonicity.
    NegatedMembershipGate,
}

fn hat(style: TermStyle, v: &ExtVal) -> Term {
    make_hat(v, style)
}

fn ext_empty() -> ExtVal {
    ExtVal::empty()
}

fn ext_single() -> ExtVal {
    ExtVal::from_elems([ExtVal::empty()])
}

fn ident(s: &str) -> Identifier {
    Identifier::new(s).expect("static identifier")
}

/// The standard six-term universe: two hats, two canonical families, and
/// two hand-made gated terms exercising the negative clauses.
pub fn default_universe(variant: ForcingVariant, depth: u32) -> Vec<(Identifier, Term)> {
    let seq = |s: &str| -> BinarySeq { s.parse().unwrap() };
    let tvgate = |tvs: &[TruthValue]| Gate::Tvs(tvs.iter().cloned().collect());
    let mut out: Vec<(Identifier, Term)> = Vec::new();
    match variant {
        ForcingVariant::A => {
            let style = TermStyle::Conditions;
            out.push((ident("t0"), hat(style, &ext_empty())));
            out.push((ident("t1"), hat(style, &ext_single())));
            out.push((ident("t2"), make_sigma_b(depth)));
            out.push((
                ident("t3"),
                hat(style, &ExtVal::from_elems([ext_empty(), ext_single()])),
            ));
            let gate_out = Gate::Cond(Condition::root(Variant::A, Label::Out));
            let gate_deep = Gate::Cond(Condition::from_entries_unchecked(
                Variant::A,
                BTreeMap::from([(seq("e"), Label::Out), (seq("0"), Label::In)]),
            ));
            out.push((
                ident("t4"),
                Term::new([
                    (gate_out, hat(style, &ext_empty())),
                    (gate_deep, hat(style, &ext_single())),
                ]),
            ));
            let gate_root_in = Gate::Cond(Condition::root(Variant::A, Label::In));
            out.push((ident("t5"), Term::new([(gate_root_in, hat(style, &ext_empty()))])));
        }
        ForcingVariant::B => {
            let style = TermStyle::TruthValues;
            out.push((ident("t0"), hat(style, &ext_empty())));
            out.push((ident("t1"), hat(style, &ext_single())));
            out.push((ident("t2"), make_c(depth)));
            out.push((ident("t3"), make_cprime(depth)));
            out.push((
                ident("t4"),
                Term::new([
                    (tvgate(&[TruthValue::Plus(seq("0"))]), hat(style, &ext_empty())),
                    (tvgate(&[TruthValue::Prime(seq("e"))]), hat(style, &ext_single())),
                    (tvgate(&[TruthValue::NegPrime(seq("0"))]), hat(style, &ext_empty())),
                ]),
            ));
            out.push((
                ident("t5"),
                Term::new([(
                    tvgate(&[TruthValue::Plus(seq("0")), TruthValue::Plus(seq("1"))]),
                    hat(style, &ext_single()),
                )]),
            ));
        }
        ForcingVariant::C => {
            let style = TermStyle::TruthValues;
            out.push((ident("t0"), hat(style, &ext_empty())));
            out.push((ident("t1"), hat(style, &ext_single())));
            out.push((ident("t2"), make_tn(1, depth)));
            out.push((ident("t3"), make_cap_c(depth)));
            out.push((
                ident("t4"),
                Term::new([
                    (tvgate(&[TruthValue::Pair(1, seq("0"))]), hat(style, &ext_empty())),
                    (tvgate(&[TruthValue::NegPair(2, seq("1"))]), hat(style, &ext_single())),
                    (tvgate(&[TruthValue::AllN(seq("0"))]), hat(style, &ext_empty())),
                ]),
            ));
            out.push((
                ident("t5"),
                Term::new([(tvgate(&[TruthValue::Pair(2, seq("e"))]), hat(style, &ext_single()))]),
            ));
        }
    }
    out
}

/// A memoizing star-forcing evaluator over the bounded universes of a
/// context. Construction enumerates the condition universe and the
/// extension/class structure, so it is meant for the small depths the
/// suites run at.
pub struct Evaluator {
    ctx: ForcingContext,
    universe: Vec<Condition>,
    supersets: Vec<Vec<u32>>,
    class_members: Vec<Vec<u32>>, // variant A: the projection class of each condition
    weakenings: Vec<Vec<u32>>,    // variant B: all q with q weaker-or-equal p
    term_by_name: BTreeMap<Identifier, u32>,
    terms: Vec<Term>,
    term_ids: HashMap<Term, u32>,
    formula_ids: HashMap<Formula, u32>,
    mem_memo: HashMap<(u32, u32, u32), bool>,
    eq_memo: HashMap<(u32, u32, u32), bool>,
    exists_mem_memo: HashMap<(u32, u32, u32), bool>,
    force_memo: HashMap<(u32, u32), bool>,
    restricted_cache: HashMap<(TruthValue, u32), ExtVal>,
    mutation: Option<Mutation>,
    fresh_param: u32,
}

impl Evaluator {
    pub fn new(ctx: ForcingContext) -> Result<Self, ForceError> {
        Self::with_mutation(ctx, None)
    }

    pub fn with_mutation(
        ctx: ForcingContext,
        mutation: Option<Mutation>,
    ) -> Result<Self, ForceError> {
        if ctx.depth > 2 {
            return Err(ForceError::BudgetExceeded(format!(
                "star forcing enumerates the condition universe; depth {} > 2",
                ctx.depth
            )));
        }
        let cvariant = ctx.variant.condition_variant();
        let universe = enumerate_valid(cvariant, ctx.depth);
        let n = universe.len();
        let mut supersets = vec![Vec::new(); n];
        let mut weakenings = vec![Vec::new(); n];
        for (pi, p) in universe.iter().enumerate() {
            for (qi, q) in universe.iter().enumerate() {
                if extends(q, p)? {
                    supersets[pi].push(qi as u32);
                }
                if cvariant == Variant::B && weaker_leq_w(q, p)? {
                    weakenings[pi].push(qi as u32);
                }
            }
        }
        let mut class_members = vec![Vec::new(); n];
        if ctx.variant == ForcingVariant::A {
            let mut by_proj: BTreeMap<Condition, Vec<u32>> = BTreeMap::new();
            for (pi, p) in universe.iter().enumerate() {
                by_proj.entry(proj_q(p)?).or_default().push(pi as u32);
            }
            for members in by_proj.values() {
                for &pi in members {
                    class_members[pi as usize] = members.clone();
                }
            }
        }
        let mut ev = Evaluator {
            ctx,
            universe,
            supersets,
            class_members,
            weakenings,
            term_by_name: BTreeMap::new(),
            terms: Vec::new(),
            term_ids: HashMap::new(),
            formula_ids: HashMap::new(),
            mem_memo: HashMap::new(),
            eq_memo: HashMap::new(),
            exists_mem_memo: HashMap::new(),
            force_memo: HashMap::new(),
            restricted_cache: HashMap::new(),
            mutation: None,
            fresh_param: 0,
        };
        ev.mutation = mutation;
        for (name, term) in ev.ctx.terms.clone() {
            ev.check_term(&term)?;
            let id = ev.intern_term(&term);
            ev.term_by_name.insert(name, id);
        }
        Ok(ev)
    }

    pub fn context(&self) -> &ForcingContext {
        &self.ctx
    }

    pub fn universe(&self) -> &[Condition] {
        &self.universe
    }

    pub fn condition_id(&self, p: &Condition) -> Option<u32> {
        self.universe.iter().position(|q| q == p).map(|i| i as u32)
    }

    fn check_term(&self, term: &Term) -> Result<(), ForceError> {
        let rank = term.rank();
        if rank > self.ctx.rank_bound {
            return Err(ForceError::RankExhausted { rank, bound: self.ctx.rank_bound });
        }
        let kind = term.kind()?;
        let ok = match self.ctx.variant {
            ForcingVariant::A => matches!(kind, TermKind::Neutral | TermKind::Cond),
            ForcingVariant::B => matches!(kind, TermKind::Neutral | TermKind::Tv(Family::C)),
            ForcingVariant::C => matches!(kind, TermKind::Neutral | TermKind::Tv(Family::Pi)),
        };
        if !ok {
            return Err(ForceError::WrongTermStyle(format!(
                "term kind {kind:?} in variant {}",
                self.ctx.variant
            )));
        }
        Ok(())
    }

    fn intern_term(&mut self, term: &Term) -> u32 {
        if let Some(&id) = self.term_ids.get(term) {
            return id;
        }
        let id = self.terms.len() as u32;
        self.terms.push(term.clone());
        self.term_ids.insert(term.clone(), id);
        id
    }

    fn formula_id(&mut self, f: &Formula) -> u32 {
        if let Some(&id) = self.formula_ids.get(f) {
            return id;
        }
        let id = self.formula_ids.len() as u32;
        self.formula_ids.insert(f.clone(), id);
        id
    }

    /// Registers an extra term under a fresh name, for instantiating a
    /// formula on a parameter outside the named universe. The quantifier
    /// range grows, so formula-level memos are dropped.
    pub fn register_param(&mut self, term: &Term) -> Result<Identifier, ForceError> {
        self.check_term(term)?;
        let id = self.intern_term(term);
        if let Some((name, _)) = self.term_by_name.iter().find(|(_, &tid)| tid == id) {
            return Ok(name.clone());
        }
        let name = loop {
            let candidate = Identifier::new(format!("_p{}", self.fresh_param)).unwrap();
            self.fresh_param += 1;
            if !self.term_by_name.contains_key(&candidate) {
                break candidate;
            }
        };
        self.term_by_name.insert(name.clone(), id);
        self.ctx.terms.push((name.clone(), self.terms[id as usize].clone()));
        self.force_memo.clear();
        Ok(name)
    }

    fn resolve(&mut self, t: &TermExpr) -> Result<u32, ForceError> {
        match t {
            TermExpr::Name(id) => self
                .term_by_name
                .get(id)
                .copied()
                .ok_or_else(|| ForceError::NameNotInUniverse(id.clone())),
            TermExpr::Var(id) => Err(ForceError::UnboundVariable(id.clone())),
        }
    }

    /// Star forcing of a closed formula (all term positions name universe
    /// terms) at a condition from the universe.
    pub fn force(&mut self, p: &Condition, f: &Formula) -> Result<bool, ForceError> {
        let pid = self
            .condition_id(p)
            .ok_or_else(|| ForceError::BudgetExceeded(format!("condition not in universe: {p}")))?;
        self.force_id(pid, f)
    }

    fn force_id(&mut self, pid: u32, f: &Formula) -> Result<bool, ForceError> {
        let fid = self.formula_id(f);
        if let Some(&hit) = self.force_memo.get(&(fid, pid)) {
            return Ok(hit);
        }
        let value = self.force_uncached(pid, f)?;
        self.force_memo.insert((fid, pid), value);
        Ok(value)
    }

    fn force_uncached(&mut self, pid: u32, f: &Formula) -> Result<bool, ForceError> {
        match f {
            Formula::Falsum => Ok(false),
            Formula::Member(a, b) => {
                let (ta, tb) = (self.resolve(a)?, self.resolve(b)?);
                self.mem(pid, ta, tb)
            }
            Formula::Equal(a, b) => {
                let (ta, tb) = (self.resolve(a)?, self.resolve(b)?);
                self.eq(pid, ta, tb)
            }
            Formula::And(a, b) => Ok(self.force_id(pid, a)? && self.force_id(pid, b)?),
            Formula::Or(a, b) => Ok(self.force_id(pid, a)? || self.force_id(pid, b)?),
            Formula::Implies(a, b) => {
                for qid in self.base_spread(pid) {
                    if self.force_id(qid, a)? && !self.exists_force(qid, b)? {
                        return Ok(false);
                    }
                }
                if !self.neg_side_holds(pid, f)? {
                    return Ok(false);
                }
                Ok(true)
            }
            Formula::Exists(v, body) => {
                for name in self.universe_names() {
                    let inst = body.substitute(v, &TermExpr::Name(name))?;
                    if self.force_id(pid, &inst)? {
                        return Ok(true);
                    }
                }
                Ok(false)
            }
            Formula::Forall(v, body) => {
                for name in self.universe_names() {
                    let inst = body.substitute(v, &TermExpr::Name(name))?;
                    for qid in self.base_spread(pid) {
                        if !self.exists_force(qid, &inst)? {
                            return Ok(false);
                        }
                    }
                }
                if !self.neg_side_holds(pid, f)? {
                    return Ok(false);
                }
                Ok(true)
            }
        }
    }

    fn universe_names(&self) -> Vec<Identifier> {
        self.term_by_name.keys().cloned().collect()
    }

    /// The conditions a universal clause spreads over before searching for
    /// extensions: in variant `A` all extensions of all projection-class
    /// members, in `B` all weakenings, in `C` all extensions.
    fn base_spread(&self, pid: u32) -> Vec<u32> {
        match self.ctx.variant {
            ForcingVariant::A => {
                let mut out: Vec<u32> = self.class_members[pid as usize]
                    .iter()
                    .flat_map(|&cid| self.supersets[cid as usize].iter().copied())
                    .collect();
                out.sort_unstable();
                out.dedup();
                out
            }
            ForcingVariant::B => self.weakenings[pid as usize].clone(),
            ForcingVariant::C => self.supersets[pid as usize].clone(),
        }
    }

    fn exists_force(&mut self, pid: u32, f: &Formula) -> Result<bool, ForceError> {
        for rid in self.supersets[pid as usize].clone() {
            if self.force_id(rid, f)? {
                return Ok(true);
            }
        }
        Ok(false)
    }

    /// The negative side conditions attached to equality, implication and
    /// the universal quantifier in variants `B` and `C`: the statement must
    /// hold classically under every negative literal the condition leaves
    /// open.
    fn neg_side_holds(&mut self, pid: u32, f: &Formula) -> Result<bool, ForceError> {
        for neg in self.open_negatives(pid) {
            if !self.classical(&neg, f, &BTreeMap::new())? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// The negative literals a condition has not settled: in variant `B`
    /// one prime literal per string outside the domain and not covered by
    /// an `IN`; in variant `C` one indexed literal per pair whose index
    /// exceeds the condition's length and whose string is long or
    /// uncovered. Variant `A` has none.
    fn open_negatives(&self, pid: u32) -> Vec<TruthValue> {
        let p = &self.universe[pid as usize];
        let d = self.ctx.depth as usize;
        match self.ctx.variant {
            ForcingVariant::A => Vec::new(),
            ForcingVariant::B => BinarySeq::up_to(d)
                .filter(|b| p.label(b).is_none() && !p.in_covers(b))
                .map(TruthValue::NegPrime)
                .collect(),
            ForcingVariant::C => {
                let len = p.max_level();
                let mut out = Vec::new();
                for n in 0..=self.ctx.nbound {
                    if n <= len {
                        continue;
                    }
                    for alpha in BinarySeq::up_to(d) {
                        if alpha.len() as u32 > len || !p.in_covers(&alpha) {
                            out.push(TruthValue::NegPair(n, alpha));
                        }
                    }
                }
                out
            }
        }
    }

    fn restricted(&mut self, neg: &TruthValue, tid: u32) -> Result<ExtVal, ForceError> {
        if let Some(hit) = self.restricted_cache.get(&(neg.clone(), tid)) {
            return Ok(hit.clone());
        }
        let value = restrict_neg(&self.terms[tid as usize], neg)?;
        self.restricted_cache.insert((neg.clone(), tid), value.clone());
        Ok(value)
    }

    /// Classical truth of the formula with every parameter replaced by its
    /// restriction under the negative literal; quantifiers range over the
    /// restricted universe.
    fn classical(
        &mut self,
        neg: &TruthValue,
        f: &Formula,
        env: &BTreeMap<Identifier, ExtVal>,
    ) -> Result<bool, ForceError> {
        let value = |me: &mut Self, t: &TermExpr, env: &BTreeMap<Identifier, ExtVal>| {
            match t {
                TermExpr::Var(id) => env
                    .get(id)
                    .cloned()
                    .ok_or_else(|| ForceError::UnboundVariable(id.clone())),
                TermExpr::Name(id) => {
                    let tid = me
                        .term_by_name
                        .get(id)
                        .copied()
                        .ok_or_else(|| ForceError::NameNotInUniverse(id.clone()))?;
                    me.restricted(neg, tid)
                }
            }
        };
        match f {
            Formula::Falsum => Ok(false),
            Formula::Member(a, b) => {
                let (va, vb) = (value(self, a, env)?, value(self, b, env)?);
                Ok(vb.contains(&va))
            }
            Formula::Equal(a, b) => Ok(value(self, a, env)? == value(self, b, env)?),
            Formula::And(a, b) => {
                Ok(self.classical(neg, a, env)? && self.classical(neg, b, env)?)
            }
            Formula::Or(a, b) => {
                Ok(self.classical(neg, a, env)? || self.classical(neg, b, env)?)
            }
            Formula::Implies(a, b) => {
                Ok(!self.classical(neg, a, env)? || self.classical(neg, b, env)?)
            }
            Formula::Exists(v, body) => {
                for tid in 0..self.term_by_name.len() {
                    let tid = *self.term_by_name.values().nth(tid).unwrap();
                    let val = self.restricted(neg, tid)?;
                    let mut env2 = env.clone();
                    env2.insert(v.clone(), val);
                    if self.classical(neg, body, &env2)? {
                        return Ok(true);
                    }
                }
                Ok(false)
            }
            Formula::Forall(v, body) => {
                for tid in 0..self.term_by_name.len() {
                    let tid = *self.term_by_name.values().nth(tid).unwrap();
                    let val = self.restricted(neg, tid)?;
                    let mut env2 = env.clone();
                    env2.insert(v.clone(), val);
                    if !self.classical(neg, body, &env2)? {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
        }
    }

    fn mem(&mut self, pid: u32, sid: u32, tid: u32) -> Result<bool, ForceError> {
        if let Some(&hit) = self.mem_memo.get(&(pid, sid, tid)) {
            return Ok(hit);
        }
        let tau = self.terms[tid as usize].clone();
        let mut value = false;
        for (gate, sub) in tau.entries() {
            if !self.mem_gate_holds(pid, gate)? {
                continue;
            }
            let rho = self.intern_term(sub);
            if self.eq(pid, sid, rho)? {
                value = true;
                break;
            }
        }
        self.mem_memo.insert((pid, sid, tid), value);
        Ok(value)
    }

    /// The membership gate: the entry is available at `p` when the gate's
    /// commitment is already implied by `p`.
    fn mem_gate_holds(&mut self, pid: u32, gate: &Gate) -> Result<bool, ForceError> {
        let p = &self.universe[pid as usize];
        let plain = match (self.ctx.variant, gate) {
            (ForcingVariant::A, Gate::Cond(q)) => {
                if self.mutation == Some(Mutation::RawMembershipGate) {
                    extends(p, q)?
                } else {
                    extends(&proj_q(p)?, q)?
                }
            }
            (ForcingVariant::B, Gate::Tvs(tvs)) => {
                // positive gate with its committed part inside the bar of p
                tvs.iter().all(|tv| match tv {
                    TruthValue::Plus(b) => p.in_covers(b),
                    TruthValue::Prime(_) => true,
                    _ => false,
                })
            }
            (ForcingVariant::C, Gate::Tvs(tvs)) => {
                let len = p.max_level();
                tvs.iter().all(|tv| match tv {
                    TruthValue::Pair(n, alpha) => {
                        *n <= len && alpha.len() as u32 <= len
                    }
                    TruthValue::AllN(alpha) => {
                        alpha.len() as u32 <= len && p.in_covers(alpha)
                    }
                    _ => false,
                })
            }
            (v, g) => {
                return Err(ForceError::WrongTermStyle(format!(
                    "gate {g:?} in variant {v}"
                )))
            }
        };
        Ok(match (self.ctx.variant, self.mutation) {
            (ForcingVariant::B | ForcingVariant::C, Some(Mutation::NegatedMembershipGate)) => {
                !plain
            }
            _ => plain,
        })
    }

    fn exists_mem(&mut self, pid: u32, sid: u32, tid: u32) -> Result<bool, ForceError> {
        if let Some(&hit) = self.exists_mem_memo.get(&(pid, sid, tid)) {
            return Ok(hit);
        }
        let mut value = false;
        for rid in self.supersets[pid as usize].clone() {
            if self.mem(rid, sid, tid)? {
                value = true;
                break;
            }
        }
        self.exists_mem_memo.insert((pid, sid, tid), value);
        Ok(value)
    }

    fn eq(&mut self, pid: u32, sid: u32, tid: u32) -> Result<bool, ForceError> {
        if let Some(&hit) = self.eq_memo.get(&(pid, sid, tid)) {
            return Ok(hit);
        }
        let value = self.eq_uncached(pid, sid, tid)?;
        self.eq_memo.insert((pid, sid, tid), value);
        Ok(value)
    }

    fn eq_uncached(&mut self, pid: u32, sid: u32, tid: u32) -> Result<bool, ForceError> {
        let sigma = self.terms[sid as usize].clone();
        let tau = self.terms[tid as usize].clone();
        // directional clause: every entry of `from` activated at some
        // spread condition must be pushable into `to` by an extension
        let spread = self.base_spread(pid);
        for (from_id, to_id, from_term) in [(sid, tid, &sigma), (tid, sid, &tau)] {
            let _ = from_id;
            for (gate, sub) in from_term.entries() {
                let member = self.intern_term(sub);
                for &qid in &spread {
                    if !self.mem_gate_holds(qid, gate)? {
                        continue;
                    }
                    if !self.exists_mem(qid, member, to_id)? {
                        return Ok(false);
                    }
                }
            }
        }
        // negative side conditions
        for neg in self.open_negatives(pid) {
            let a = self.restricted(&neg, sid)?;
            let b = self.restricted(&neg, tid)?;
            if a != b {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// The separation-style term for a formula and a base term: entries of
    /// the base survive under gates recording which conditions force the
    /// instance, plus negative-literal entries where the instance holds
    /// classically. Interpreting the result at a model node yields the
    /// subset of the base carved out by the formula.
    pub fn separation_term(
        &mut self,
        phi: &Formula,
        var: &Identifier,
        sigma: &Term,
    ) -> Result<Term, ForceError> {
        self.check_term(sigma)?;
        let d = self.ctx.depth;
        let entries: Vec<(Gate, Term)> = sigma.entries().iter().cloned().collect();
        // register every member as a parameter up front
        let mut named: Vec<(Gate, Term, Identifier)> = Vec::new();
        for (gate, sub) in entries {
            let name = self.register_param(&sub)?;
            named.push((gate, sub, name));
        }
        let mut out: BTreeSet<(Gate, Term)> = BTreeSet::new();
        for (gate, sub, name) in named {
            let inst = phi.substitute(var, &TermExpr::Name(name))?;
            match self.ctx.variant {
                ForcingVariant::A => {
                    let base = match &gate {
                        Gate::Cond(q) => q.clone(),
                        Gate::Tvs(_) => {
                            return Err(ForceError::WrongTermStyle(
                                "separation over a truth-value term in variant A".into(),
                            ))
                        }
                    };
                    for pid in 0..self.universe.len() as u32 {
                        let p = self.universe[pid as usize].clone();
                        if !extends(&p, &base)? {
                            continue;
                        }
                        if self.force_id(pid, &inst)? {
                            out.insert((Gate::Cond(proj_q(&p)?), sub.clone()));
                        }
                    }
                }
                ForcingVariant::B => {
                    let base = match &gate {
                        Gate::Tvs(tvs) => tvs.clone(),
                        Gate::Cond(_) => {
                            return Err(ForceError::WrongTermStyle(
                                "separation over a condition term in variant B".into(),
                            ))
                        }
                    };
                    for pid in 0..self.universe.len() as u32 {
                        if !self.force_id(pid, &inst)? {
                            continue;
                        }
                        let p = &self.universe[pid as usize];
                        let bp: BTreeSet<TruthValue> = BinarySeq::up_to(d as usize)
                            .filter(|b| p.in_covers(b))
                            .map(TruthValue::Plus)
                            .collect();
                        if base.iter().all(|tv| bp.contains(tv)) {
                            out.insert((Gate::Tvs(bp), sub.clone()));
                        }
                    }
                    for b in BinarySeq::up_to(d as usize) {
                        let neg = TruthValue::NegPrime(b);
                        if self.classical(&neg, &inst, &BTreeMap::new())? {
                            let mut gate2 = base.clone();
                            gate2.insert(neg);
                            out.insert((Gate::Tvs(gate2), sub.clone()));
                        }
                    }
                }
                ForcingVariant::C => {
                    let base = match &gate {
                        Gate::Tvs(tvs) => tvs.clone(),
                        Gate::Cond(_) => {
                            return Err(ForceError::WrongTermStyle(
                                "separation over a condition term in variant C".into(),
                            ))
                        }
                    };
                    for pid in 0..self.universe.len() as u32 {
                        if !self.force_id(pid, &inst)? {
                            continue;
                        }
                        let p = &self.universe[pid as usize];
                        let len = p.max_level();
                        let mut bp: BTreeSet<TruthValue> = BTreeSet::new();
                        for n in 0..=len.min(self.ctx.nbound) {
                            for alpha in BinarySeq::up_to(len as usize) {
                                bp.insert(TruthValue::Pair(n, alpha));
                            }
                        }
                        for alpha in BinarySeq::up_to(len as usize) {
                            if p.in_covers(&alpha) {
                                bp.insert(TruthValue::AllN(alpha));
                            }
                        }
                        let mut gate2 = base.clone();
                        gate2.extend(bp);
                        out.insert((Gate::Tvs(gate2), sub.clone()));
                    }
                    for n in 0..=self.ctx.nbound {
                        for alpha in BinarySeq::up_to(d as usize) {
                            let neg = TruthValue::NegPair(n, alpha);
                            if neg_admits(&neg, &base)?
                                && self.classical(&neg, &inst, &BTreeMap::new())?
                            {
                                let mut gate2 = base.clone();
                                gate2.insert(neg);
                                out.insert((Gate::Tvs(gate2), sub.clone()));
                            }
                        }
                    }
                }
            }
        }
        Ok(Term::new(out))
    }
}

/// One-shot star forcing in the shadow-projection variant.
pub fn star_force_a(p: &Condition, f: &Formula, ctx: &ForcingContext) -> Result<bool, ForceError> {
    let mut ev = Evaluator::new(ctx.clone())?;
    ev.force(p, f)
}

/// One-shot star forcing in the weakening variant.
pub fn star_force_b(p: &Condition, f: &Formula, ctx: &ForcingContext) -> Result<bool, ForceError> {
    let mut ev = Evaluator::new(ctx.clone())?;
    ev.force(p, f)
}

/// One-shot star forcing in the indexed-literal variant.
pub fn star_force_c(p: &Condition, f: &Formula, ctx: &ForcingContext) -> Result<bool, ForceError> {
    let mut ev = Evaluator::new(ctx.clone())?;
    ev.force(p, f)
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Counterexample {
    pub lemma: String,
    pub formula: String,
    pub p: Condition,
    pub q: Condition,
    pub forced_at_p: bool,
    pub forced_at_q: bool,
}

impl fmt::Display for Counterexample {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}: `{}` forced={} at p but forced={} at q; p = [{}]; q = [{}]",
            self.lemma,
            self.formula,
            self.forced_at_p,
            self.forced_at_q,
            inline(&self.p),
            inline(&self.q),
        )
    }
}

fn inline(c: &Condition) -> String {
    c.entries()
        .iter()
        .map(|(n, l)| format!("{n}:{l}"))
        .collect::<Vec<_>>()
        .join(" ")
}

#[derive(Clone, Debug)]
pub struct LemmaReport {
    pub variant: ForcingVariant,
    pub depth: u32,
    pub conditions: usize,
    pub terms: usize,
    pub formulas: usize,
    pub pairs_checked: u64,
    pub counterexamples: Vec<Counterexample>,
}

impl LemmaReport {
    pub fn clean(&self) -> bool {
        self.counterexamples.is_empty()
    }
}

impl fmt::Display for LemmaReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "lemma suite variant={} depth={} conditions={} terms={} formulas={} pairs={}",
            self.variant,
            self.depth,
            self.conditions,
            self.terms,
            self.formulas,
            self.pairs_checked
        )?;
        if self.counterexamples.is_empty() {
            writeln!(f, "counterexamples: none")?;
        } else {
            writeln!(f, "counterexamples: {}", self.counterexamples.len())?;
            for c in &self.counterexamples {
                writeln!(f, "  {c}")?;
            }
        }
        Ok(())
    }
}

/// The closed sentences the suites spread over the universe names: every
/// connective and quantifier shape up to connective depth three, over the
/// first two or three names.
pub fn suite_formulas(names: &[Identifier]) -> Vec<Formula> {
    let n = |i: usize| TermExpr::Name(names[i % names.len()].clone());
    let v = |s: &str| TermExpr::Var(ident(s));
    let mem = Formula::member;
    let eq = Formula::equal;
    let x = ident("x");
    let y = ident("y");

    let a0 = mem(n(0), n(1));
    let a1 = mem(n(1), n(0));
    let a2 = eq(n(0), n(1));
    let a3 = eq(n(0), n(0));
    let a4 = mem(n(0), n(2));
    let a5 = mem(n(3), n(2));
    let atoms = [a0.clone(), a1.clone(), a2.clone(), a3.clone(), a4.clone(), a5.clone()];

    let mut out: Vec<Formula> = vec![Formula::Falsum];
    out.extend(atoms.iter().cloned());
    // depth 1
    for a in &atoms {
        out.push(Formula::negated(a.clone()));
    }
    for (a, b) in [(&a0, &a1), (&a0, &a2), (&a4, &a5), (&a2, &a3)] {
        out.push(Formula::and((*a).clone(), (*b).clone()));
        out.push(Formula::or((*a).clone(), (*b).clone()));
        out.push(Formula::implies((*a).clone(), (*b).clone()));
        out.push(Formula::implies((*b).clone(), (*a).clone()));
    }
    out.push(Formula::exists(x.clone(), mem(v("x"), n(2))));
    out.push(Formula::exists(x.clone(), eq(v("x"), n(0))));
    out.push(Formula::forall(x.clone(), eq(v("x"), v("x"))));
    out.push(Formula::forall(x.clone(), mem(v("x"), n(2))));
    // depth 2
    out.push(Formula::negated(Formula::negated(a0.clone())));
    out.push(Formula::negated(Formula::and(a0.clone(), a1.clone())));
    out.push(Formula::implies(
        Formula::or(a0.clone(), a1.clone()),
        Formula::and(a3.clone(), a2.clone()),
    ));
    out.push(Formula::forall(x.clone(), Formula::implies(mem(v("x"), n(2)), mem(v("x"), n(3)))));
    out.push(Formula::exists(x.clone(), Formula::and(mem(v("x"), n(2)), mem(v("x"), n(3)))));
    out.push(Formula::forall(x.clone(), Formula::or(eq(v("x"), n(0)), mem(v("x"), n(2)))));
    out.push(Formula::exists(
        x.clone(),
        Formula::exists(y.clone(), mem(v("x"), v("y"))),
    ));
    out.push(Formula::forall(
        x.clone(),
        Formula::exists(y.clone(), eq(v("x"), v("y"))),
    ));
    // depth 3
    out.push(Formula::implies(
        Formula::implies(a0.clone(), a1.clone()),
        Formula::or(a2.clone(), Formula::negated(a4.clone())),
    ));
    out.push(Formula::negated(Formula::forall(
        x.clone(),
        Formula::or(mem(v("x"), n(2)), Formula::negated(mem(v("x"), n(2)))),
    )));
    out.push(Formula::forall(
        x.clone(),
        Formula::implies(mem(v("x"), n(2)), Formula::exists(y.clone(), mem(v("y"), v("x")))),
    ));
    out.push(Formula::exists(
        x.clone(),
        Formula::and(
            mem(v("x"), n(2)),
            Formula::negated(mem(v("x"), n(3))),
        ),
    ));
    out.push(Formula::implies(
        Formula::exists(x.clone(), mem(v("x"), n(2))),
        Formula::forall(x.clone(), Formula::or(mem(v("x"), n(2)), eq(v("x"), v("x")))),
    ));
    out.sort();
    out.dedup();
    out
}

/// Runs the order-law suite for a variant at a depth: projection
/// invariance and extension monotonicity for `A`, weakening monotonicity
/// for `B` (over constructive weakenings), extension monotonicity for `C`.
/// Work is sharded over `workers` threads by formula; the report is
/// identical for any worker count.
pub fn lemma_suite(
    variant: ForcingVariant,
    depth: u32,
    workers: usize,
    mutation: Option<Mutation>,
) -> Result<LemmaReport, ForceError> {
    let ctx = ForcingContext::standard(variant, depth);
    let names: Vec<Identifier> = ctx.terms.iter().map(|(n, _)| n.clone()).collect();
    let formulas = suite_formulas(&names);
    let workers = workers.max(1).min(formulas.len().max(1));

    // the relation pairs to check, shared across formulas
    let probe = Evaluator::new(ctx.clone())?;
    let universe = probe.universe().to_vec();
    let mut pairs: Vec<(String, u32, u32)> = Vec::new();
    match variant {
        ForcingVariant::A => {
            for (pi, p) in universe.iter().enumerate() {
                for (qi, q) in universe.iter().enumerate() {
                    if pi != qi && conditions::sim(p, q)? {
                        pairs.push(("projection-invariance".into(), pi as u32, qi as u32));
                    }
                    if pi != qi && extends(q, p)? {
                        pairs.push(("extension-monotonicity".into(), pi as u32, qi as u32));
                    }
                }
            }
        }
        ForcingVariant::B => {
            for (pi, p) in universe.iter().enumerate() {
                for (qi, q) in universe.iter().enumerate() {
                    if pi != qi && proper_weakening(q, p)? {
                        pairs.push(("weakening-monotonicity".into(), pi as u32, qi as u32));
                    }
                }
            }
        }
        ForcingVariant::C => {
            for (pi, p) in universe.iter().enumerate() {
                for (qi, q) in universe.iter().enumerate() {
                    if pi != qi && extends(q, p)? {
                        pairs.push(("extension-monotonicity".into(), pi as u32, qi as u32));
                    }
                }
            }
        }
    }

    let chunks: Vec<Vec<Formula>> = (0..workers)
        .map(|w| {
            formulas
                .iter()
                .enumerate()
                .filter(|(i, _)| i % workers == w)
                .map(|(_, f)| f.clone())
                .collect()
        })
        .collect();

    let mut counterexamples: Vec<Counterexample> = Vec::new();
    let mut pairs_checked: u64 = 0;
    let results: Vec<Result<(Vec<Counterexample>, u64), ForceError>> =
        std::thread::scope(|scope| {
            let mut handles = Vec::new();
            for chunk in &chunks {
                let ctx = ctx.clone();
                let pairs = &pairs;
                let universe = &universe;
                handles.push(scope.spawn(move || {
                    let mut ev = Evaluator::with_mutation(ctx, mutation)?;
                    let mut cexs = Vec::new();
                    let mut checked = 0u64;
                    for f in chunk {
                        let mut truth = vec![false; universe.len()];
                        for (i, p) in universe.iter().enumerate() {
                            truth[i] = ev.force(p, f)?;
                        }
                        for (lemma, pi, qi) in pairs {
                            checked += 1;
                            let (tp, tq) = (truth[*pi as usize], truth[*qi as usize]);
                            let bad = if lemma == "projection-invariance" {
                                tp != tq
                            } else {
                                tp && !tq
                            };
                            if bad {
                                cexs.push(Counterexample {
                                    lemma: lemma.clone(),
                                    formula: f.to_string(),
                                    p: universe[*pi as usize].clone(),
                                    q: universe[*qi as usize].clone(),
                                    forced_at_p: tp,
                                    forced_at_q: tq,
                                });
                            }
                        }
                    }
                    Ok((cexs, checked))
                }));
            }
            handles.into_iter().map(|h| h.join().expect("suite worker panicked")).collect()
        });
    for r in results {
        let (cexs, checked) = r?;
        counterexamples.extend(cexs);
        pairs_checked += checked;
    }
    counterexamples.sort_by(|a, b| {
        (&a.formula, &a.lemma, &a.p, &a.q).cmp(&(&b.formula, &b.lemma, &b.p, &b.q))
    });

    Ok(LemmaReport {
        variant,
        depth,
        conditions: universe.len(),
        terms: ctx.terms.len(),
        formulas: formulas.len(),
        pairs_checked,
        counterexamples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{parse_formula, ParseContext};
    use crate::terms::{interpret, NodeContext};

    fn seq(s: &str) -> BinarySeq {
        s.parse().unwrap()
    }

    fn pctx(ctx: &ForcingContext) -> ParseContext {
        ParseContext::new().with_names(ctx.terms.iter().map(|(n, _)| n.clone()))
    }

    fn cond(variant: Variant, pairs: &[(&str, Label)]) -> Condition {
        Condition::from_entries_unchecked(
            variant,
            pairs.iter().map(|(n, l)| (seq(n), *l)).collect(),
        )
    }

    #[test]
    fn reflexivity_is_forced_everywhere_variant_a() {
        let ctx = ForcingContext::standard(ForcingVariant::A, 2);
        let mut ev = Evaluator::new(ctx.clone()).unwrap();
        let f = parse_formula("t0 = t0", &pctx(&ctx)).unwrap();
        for p in ev.universe().to_vec() {
            assert!(ev.force(&p, &f).unwrap(), "at {p}");
        }
    }

    #[test]
    fn falsum_is_never_forced() {
        for variant in [ForcingVariant::A, ForcingVariant::B, ForcingVariant::C] {
            let ctx = ForcingContext::standard(variant, 2);
            let mut ev = Evaluator::new(ctx).unwrap();
            for p in ev.universe().to_vec() {
                assert!(!ev.force(&p, &Formula::Falsum).unwrap());
            }
        }
    }

    #[test]
    fn bar_membership_follows_the_in_label_variant_a() {
        let ctx = ForcingContext::standard(ForcingVariant::A, 2);
        let mut ev = Evaluator::new(ctx.clone()).unwrap();
        // t2 is the bar term; a condition with an IN at `0` forces the
        // corresponding hat in
        let p = cond(Variant::A, &[("e", Label::Out), ("0", Label::In)]);
        let hat0 = ev.register_param(&crate::terms::hat_of_seq(&seq("0"), TermStyle::Conditions))
            .unwrap();
        let f = Formula::member(TermExpr::Name(hat0.clone()), TermExpr::Name(ident("t2")));
        assert!(ev.force(&p, &f).unwrap());

        let q = cond(Variant::A, &[("e", Label::Inf)]);
        assert!(!ev.force(&q, &f).unwrap());
    }

    #[test]
    fn bar_membership_follows_the_in_label_variant_b() {
        let ctx = ForcingContext::standard(ForcingVariant::B, 2);
        let mut ev = Evaluator::new(ctx.clone()).unwrap();
        let p = cond(Variant::B, &[("e", Label::Inf), ("0", Label::In)]);
        let hat0 = ev
            .register_param(&crate::terms::hat_of_seq(&seq("0"), TermStyle::TruthValues))
            .unwrap();
        let f = Formula::member(TermExpr::Name(hat0), TermExpr::Name(ident("t2")));
        assert!(ev.force(&p, &f).unwrap());
        let q = cond(Variant::B, &[("e", Label::Inf)]);
        assert!(!ev.force(&q, &f).unwrap());
    }

    #[test]
    fn indexed_membership_needs_the_length_variant_c() {
        let ctx = ForcingContext::standard(ForcingVariant::C, 2);
        let mut ev = Evaluator::new(ctx.clone()).unwrap();
        let hat0 = ev
            .register_param(&crate::terms::hat_of_seq(&seq("0"), TermStyle::TruthValues))
            .unwrap();
        // t2 is the indexed tree with n = 1: the gate (1, "0") needs |p| >= 1
        let f = Formula::member(TermExpr::Name(hat0), TermExpr::Name(ident("t2")));
        let deep = cond(Variant::B, &[("e", Label::Inf), ("0", Label::Inf)]);
        assert!(ev.force(&deep, &f).unwrap());
        let shallow = cond(Variant::B, &[("e", Label::Inf)]);
        assert!(!ev.force(&shallow, &f).unwrap());
    }

    #[test]
    fn hats_of_distinct_strings_are_not_equal() {
        let ctx = ForcingContext::standard(ForcingVariant::B, 2);
        let mut ev = Evaluator::new(ctx).unwrap();
        let h0 = ev
            .register_param(&crate::terms::hat_of_seq(&seq("0"), TermStyle::TruthValues))
            .unwrap();
        let h1 = ev
            .register_param(&crate::terms::hat_of_seq(&seq("1"), TermStyle::TruthValues))
            .unwrap();
        let same = Formula::equal(TermExpr::Name(h0.clone()), TermExpr::Name(h0.clone()));
        let diff = Formula::equal(TermExpr::Name(h0), TermExpr::Name(h1));
        for p in ev.universe().to_vec() {
            assert!(ev.force(&p, &same).unwrap());
            assert!(!ev.force(&p, &diff).unwrap());
        }
    }

    #[test]
    fn weakening_drop_violates_raw_monotonicity_variant_b() {
        // the raw weakening order admits domain-dropping weakenings, and
        // the negative side conditions then see new open literals; the
        // constructive weakening relation excludes exactly these
        let ctx = ForcingContext::standard(ForcingVariant::B, 2);
        let mut ev = Evaluator::new(ctx.clone()).unwrap();
        let sigma = Term::new([(
            Gate::Tvs(BTreeSet::from([TruthValue::Prime(seq("0"))])),
            hat(TermStyle::TruthValues, &ext_empty()),
        )]);
        let s = ev.register_param(&sigma).unwrap();
        let f = Formula::equal(TermExpr::Name(s), TermExpr::Name(ident("t1")));
        let p = cond(Variant::B, &[("e", Label::Inf), ("0", Label::Inf), ("1", Label::Inf)]);
        let q = cond(Variant::B, &[("e", Label::Inf)]);
        assert!(weaker_leq_w(&q, &p).unwrap());
        assert!(!proper_weakening(&q, &p).unwrap());
        assert!(ev.force(&p, &f).unwrap());
        assert!(!ev.force(&q, &f).unwrap());
    }

    #[test]
    fn forced_facts_hold_at_the_bottom_node() {
        // exploratory one-directional echo of the truth reading: an atomic
        // fact forced by a restriction of the labeling holds at the bottom
        let ctx = ForcingContext::standard(ForcingVariant::B, 2);
        let mut ev = Evaluator::new(ctx.clone()).unwrap();
        for seed in 0..4u64 {
            let g = conditions::sample_pseudo_generic(Variant::B, 2, &[], seed).unwrap();
            let p = g.restrict_depth(2);
            let bottom = NodeContext::Bottom { labeling: g.clone(), cutoff: 1 };
            let cterm = make_c(2);
            let cname = ev.register_param(&cterm).unwrap();
            for b in BinarySeq::up_to(1) {
                let hb = ev
                    .register_param(&crate::terms::hat_of_seq(&b, TermStyle::TruthValues))
                    .unwrap();
                let f =
                    Formula::member(TermExpr::Name(hb), TermExpr::Name(cname.clone()));
                if ev.force(&p, &f).unwrap() {
                    let interp = crate::terms::interpret_as_strings(&cterm, &bottom).unwrap();
                    assert!(interp.contains(&b), "seed {seed}, string {b}");
                }
            }
        }
    }

    #[test]
    fn separation_with_falsum_is_empty() {
        for variant in [ForcingVariant::A, ForcingVariant::B, ForcingVariant::C] {
            let ctx = ForcingContext::standard(variant, 2);
            let mut ev = Evaluator::new(ctx.clone()).unwrap();
            let style = match variant {
                ForcingVariant::A => TermStyle::Conditions,
                _ => TermStyle::TruthValues,
            };
            let sigma = hat(style, &ExtVal::from_elems([ext_empty(), ext_single()]));
            let sep =
                ev.separation_term(&Formula::Falsum, &ident("x"), &sigma).unwrap();
            // no gate of the result ever fires
            let node = NodeContext::TrivialTop;
            if style == TermStyle::TruthValues {
                assert_eq!(interpret(&sep, &node).unwrap(), ExtVal::empty());
            }
        }
    }

    #[test]
    fn separation_with_identity_preserves_interpretation() {
        let ctx = ForcingContext::standard(ForcingVariant::B, 2);
        let mut ev = Evaluator::new(ctx.clone()).unwrap();
        let sigma = hat(TermStyle::TruthValues, &ExtVal::from_elems([ext_empty(), ext_single()]));
        let x = ident("x");
        let phi = Formula::equal(TermExpr::Var(x.clone()), TermExpr::Var(x.clone()));
        let sep = ev.separation_term(&phi, &x, &sigma).unwrap();
        let g = conditions::sample_pseudo_generic(Variant::B, 2, &[], 0).unwrap();
        let nodes = [
            NodeContext::Bottom { labeling: g, cutoff: 1 },
            NodeContext::TrivialTop,
            NodeContext::Terminal { c: seq("01") },
        ];
        for node in &nodes {
            assert_eq!(
                interpret(&sep, node).unwrap(),
                interpret(&sigma, node).unwrap(),
                "at {node}"
            );
        }
    }

    #[test]
    fn separation_by_membership_selects_members() {
        let ctx = ForcingContext::standard(ForcingVariant::B, 2);
        let mut ev = Evaluator::new(ctx.clone()).unwrap();
        // sigma = hat of {0, {0}}; keep x with x in hat({0}) — exactly {0}
        let sigma =
            hat(TermStyle::TruthValues, &ExtVal::from_elems([ext_empty(), ext_single()]));
        let x = ident("x");
        let phi = Formula::member(TermExpr::Var(x.clone()), TermExpr::Name(ident("t1")));
        let sep = ev.separation_term(&phi, &x, &sigma).unwrap();
        let node = NodeContext::TrivialTop;
        assert_eq!(
            interpret(&sep, &node).unwrap(),
            ExtVal::from_elems([ext_empty()])
        );
    }

    #[test]
    fn suite_formula_family_shape() {
        let names: Vec<Identifier> = (0..6).map(|i| ident(&format!("t{i}"))).collect();
        let formulas = suite_formulas(&names);
        assert!(formulas.len() >= 40, "got {}", formulas.len());
        assert!(formulas.iter().any(|f| matches!(f, Formula::Forall(..))));
        assert!(formulas.iter().any(|f| matches!(f, Formula::Exists(..))));
    }

    #[test]
    fn suite_depth_above_two_is_rejected() {
        assert!(matches!(
            lemma_suite(ForcingVariant::A, 3, 1, None),
            Err(ForceError::BudgetExceeded(_))
        ));
    }

    #[test]
    fn mutant_clause_is_caught_variant_a() {
        let report =
            lemma_suite(ForcingVariant::A, 1, 1, Some(Mutation::RawMembershipGate)).unwrap();
        assert!(!report.clean(), "the corrupted gate must produce counterexamples");
    }

    #[test]
    fn mutant_clause_is_caught_variant_b() {
        let report =
            lemma_suite(ForcingVariant::B, 1, 1, Some(Mutation::NegatedMembershipGate)).unwrap();
        assert!(!report.clean());
    }

    #[test]
    fn suite_clean_at_depth_one_all_variants() {
        for variant in [ForcingVariant::A, ForcingVariant::B, ForcingVariant::C] {
            let report = lemma_suite(variant, 1, 2, None).unwrap();
            assert!(
                report.clean(),
                "variant {variant}: {:#?}",
                report.counterexamples.first()
            );
        }
    }
}
