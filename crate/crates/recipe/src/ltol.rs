//! LTOL: linear temporal logic where the next operator is replaced by
//! observation descriptors `<O>` (possible) and `[O]` (necessary). Formulas
//! are kept in positive normal form; `dual` implements semantic negation.
//! Includes a direct evaluator over lassos, used as the oracle against the
//! automata pipeline.

use thiserror::Error;

use crate::model::{Observation, Valuation};
use crate::semantics::GlobalState;

/// A state atom `agent.var = value`, resolved to indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StateAtom {
    pub agent: u32,
    pub var: u32,
    pub value: u8,
}

/// Formula in positive normal form: negation appears only on atoms.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    True,
    False,
    Lit { atom: StateAtom, positive: bool },
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Until(Box<Formula>, Box<Formula>),
    Release(Box<Formula>, Box<Formula>),
    Possible(Descriptor, Box<Formula>),
    Necessary(Descriptor, Box<Formula>),
}

/// Observation descriptor in positive normal form. Value atoms over common
/// variables quantify implicitly over the sender predicate: a positive atom
/// requires every admitted assignment to satisfy it, a negative one requires
/// some admitted assignment to violate it.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Descriptor {
    True,
    False,
    Cv { var: u32, value: u8, positive: bool },
    Chan { ch: u32, positive: bool },
    Sender { agent: u32, positive: bool },
    Data { var: u32, value: u8, positive: bool },
    Exists(Box<Descriptor>),
    Forall(Box<Descriptor>),
    And(Box<Descriptor>, Box<Descriptor>),
    Or(Box<Descriptor>, Box<Descriptor>),
}

impl Formula {
    /// Semantic negation within PNF: swaps and/or, until/release and literal
    /// polarity, and exchanges the two modalities. The gating descriptor is
    /// untouched; the complement lives in the modality switch itself.
    pub fn dual(&self) -> Formula {
        match self {
            Formula::True => Formula::False,
            Formula::False => Formula::True,
            Formula::Lit { atom, positive } => Formula::Lit { atom: *atom, positive: !positive },
            Formula::And(a, b) => Formula::Or(Box::new(a.dual()), Box::new(b.dual())),
            Formula::Or(a, b) => Formula::And(Box::new(a.dual()), Box::new(b.dual())),
            Formula::Until(a, b) => Formula::Release(Box::new(a.dual()), Box::new(b.dual())),
            Formula::Release(a, b) => Formula::Until(Box::new(a.dual()), Box::new(b.dual())),
            Formula::Possible(o, f) => Formula::Necessary(o.clone(), Box::new(f.dual())),
            Formula::Necessary(o, f) => Formula::Possible(o.clone(), Box::new(f.dual())),
        }
    }

    /// Number of formula nodes. The automaton's state count is bounded by
    /// the number of distinct subformulas, which is at most this size.
    pub fn size(&self) -> usize {
        match self {
            Formula::True | Formula::False | Formula::Lit { .. } => 1,
            Formula::And(a, b)
            | Formula::Or(a, b)
            | Formula::Until(a, b)
            | Formula::Release(a, b) => 1 + a.size() + b.size(),
            Formula::Possible(_, f) | Formula::Necessary(_, f) => 1 + f.size(),
        }
    }

    pub fn atoms(&self) -> Vec<StateAtom> {
        fn walk(f: &Formula, out: &mut Vec<StateAtom>) {
            match f {
                Formula::Lit { atom, .. } => out.push(*atom),
                Formula::And(a, b)
                | Formula::Or(a, b)
                | Formula::Until(a, b)
                | Formula::Release(a, b) => {
                    walk(a, out);
                    walk(b, out);
                }
                Formula::Possible(_, x) | Formula::Necessary(_, x) => walk(x, out),
                _ => {}
            }
        }
        let mut out = Vec::new();
        walk(self, &mut out);
        out.sort_unstable();
        out.dedup();
        out
    }
}

impl Descriptor {
    /// Complement in PNF: literal polarity flips, and/or and the quantifiers
    /// swap. Satisfies `desc_holds(O, m) == !desc_holds(O.dual(), m)`.
    pub fn dual(&self) -> Descriptor {
        match self {
            Descriptor::True => Descriptor::False,
            Descriptor::False => Descriptor::True,
            Descriptor::Cv { var, value, positive } => {
                Descriptor::Cv { var: *var, value: *value, positive: !positive }
            }
            Descriptor::Chan { ch, positive } => Descriptor::Chan { ch: *ch, positive: !positive },
            Descriptor::Sender { agent, positive } => {
                Descriptor::Sender { agent: *agent, positive: !positive }
            }
            Descriptor::Data { var, value, positive } => {
                Descriptor::Data { var: *var, value: *value, positive: !positive }
            }
            Descriptor::Exists(o) => Descriptor::Forall(Box::new(o.dual())),
            Descriptor::Forall(o) => Descriptor::Exists(Box::new(o.dual())),
            Descriptor::And(a, b) => Descriptor::Or(Box::new(a.dual()), Box::new(b.dual())),
            Descriptor::Or(a, b) => Descriptor::And(Box::new(a.dual()), Box::new(b.dual())),
        }
    }

    /// Removes quantifiers nested under another quantifier: inside a
    /// quantifier the predicate is a singleton, so inner quantifiers are
    /// no-ops and the outermost one cancels them.
    pub fn normalize(&self) -> Descriptor {
        fn strip(o: &Descriptor) -> Descriptor {
            match o {
                Descriptor::Exists(x) | Descriptor::Forall(x) => strip(x),
                Descriptor::And(a, b) => Descriptor::And(Box::new(strip(a)), Box::new(strip(b))),
                Descriptor::Or(a, b) => Descriptor::Or(Box::new(strip(a)), Box::new(strip(b))),
                leaf => leaf.clone(),
            }
        }
        match self {
            Descriptor::Exists(x) => Descriptor::Exists(Box::new(strip(x))),
            Descriptor::Forall(x) => Descriptor::Forall(Box::new(strip(x))),
            Descriptor::And(a, b) => {
                Descriptor::And(Box::new(a.normalize()), Box::new(b.normalize()))
            }
            Descriptor::Or(a, b) => {
                Descriptor::Or(Box::new(a.normalize()), Box::new(b.normalize()))
            }
            leaf => leaf.clone(),
        }
    }
}

/// Truth of a descriptor on an observation. This single function is also the
/// automaton's observation-evaluation step.
pub fn desc_holds(o: &Descriptor, m: &Observation) -> bool {
    holds_with_pred(o, m, &m.pred.sat)
}

fn holds_with_pred(o: &Descriptor, m: &Observation, pred: &[Valuation]) -> bool {
    match o {
        Descriptor::True => true,
        Descriptor::False => false,
        Descriptor::Cv { var, value, positive } => {
            if *positive {
                pred.iter().all(|c| c.get(*var) == *value)
            } else {
                pred.iter().any(|c| c.get(*var) != *value)
            }
        }
        Descriptor::Chan { ch, positive } => (m.ch == *ch) == *positive,
        Descriptor::Sender { agent, positive } => (m.sender == *agent) == *positive,
        Descriptor::Data { var, value, positive } => (m.data.get(*var) == *value) == *positive,
        Descriptor::Exists(x) => pred.iter().any(|c| holds_with_pred(x, m, std::slice::from_ref(c))),
        Descriptor::Forall(x) => pred.iter().all(|c| holds_with_pred(x, m, std::slice::from_ref(c))),
        Descriptor::And(a, b) => holds_with_pred(a, m, pred) && holds_with_pred(b, m, pred),
        Descriptor::Or(a, b) => holds_with_pred(a, m, pred) || holds_with_pred(b, m, pred),
    }
}

/// State component of a computation position: either a full system state or
/// a partial assignment (used by satisfiability, where only the variables a
/// formula mentions are constrained).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum StateLabel {
    Global(GlobalState),
    /// Sorted list of `(agent, var, value)` bindings.
    Partial(Vec<(u32, u32, u8)>),
}

impl StateLabel {
    /// Value of `agent.var` under this label, if bound.
    pub fn lookup(&self, agent: u32, var: u32) -> Option<u8> {
        match self {
            StateLabel::Global(g) => g.0.get(agent as usize).map(|v: &Valuation| v.get(var)),
            StateLabel::Partial(bindings) => bindings
                .iter()
                .find(|(a, v, _)| *a == agent && *v == var)
                .map(|(_, _, val)| *val),
        }
    }
}

/// One position of a lasso: the state label and the observation emitted from
/// it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LassoStep {
    pub label: StateLabel,
    pub obs: Observation,
}

/// Finite representation of an ultimately periodic computation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lasso {
    pub prefix: Vec<LassoStep>,
    pub cycle: Vec<LassoStep>,
}

impl Lasso {
    pub fn total_len(&self) -> usize {
        self.prefix.len() + self.cycle.len()
    }

    pub fn step(&self, pos: usize) -> &LassoStep {
        if pos < self.prefix.len() {
            &self.prefix[pos]
        } else {
            &self.cycle[pos - self.prefix.len()]
        }
    }

    /// Successor position in the unrolling: the last position wraps to the
    /// cycle start.
    pub fn next(&self, pos: usize) -> usize {
        if pos + 1 < self.total_len() {
            pos + 1
        } else {
            self.prefix.len()
        }
    }

    /// The lasso denoting the same infinite word with the first position
    /// dropped.
    pub fn shift(&self) -> Lasso {
        if !self.prefix.is_empty() {
            Lasso { prefix: self.prefix[1..].to_vec(), cycle: self.cycle.clone() }
        } else {
            let mut cycle = self.cycle.clone();
            cycle.rotate_left(1);
            Lasso { prefix: Vec::new(), cycle }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VocabError {
    #[error("state atom agent#{agent}.var#{var} is not bound by the computation's labels")]
    UnboundAtom { agent: u32, var: u32 },
}

/// Truth of `phi` at position 0 of the infinite unrolling of `lasso`,
/// computed directly from the trace semantics: every subformula is evaluated
/// at every position, with a fixpoint over the cycle for until and release.
pub fn holds_on_lasso(phi: &Formula, lasso: &Lasso) -> Result<bool, VocabError> {
    assert!(!lasso.cycle.is_empty(), "lasso cycle must be nonempty");
    for atom in phi.atoms() {
        for pos in 0..lasso.total_len() {
            if lasso.step(pos).label.lookup(atom.agent, atom.var).is_none() {
                return Err(VocabError::UnboundAtom { agent: atom.agent, var: atom.var });
            }
        }
    }
    Ok(eval_at(phi, lasso)[0])
}

/// Truth values of `phi` at each position of prefix + cycle.
fn eval_at(phi: &Formula, lasso: &Lasso) -> Vec<bool> {
    let n = lasso.total_len();
    let p = lasso.prefix.len();
    match phi {
        Formula::True => vec![true; n],
        Formula::False => vec![false; n],
        Formula::Lit { atom, positive } => (0..n)
            .map(|i| {
                let v = lasso.step(i).label.lookup(atom.agent, atom.var).expect("checked");
                (v == atom.value) == *positive
            })
            .collect(),
        Formula::And(a, b) => {
            let (va, vb) = (eval_at(a, lasso), eval_at(b, lasso));
            (0..n).map(|i| va[i] && vb[i]).collect()
        }
        Formula::Or(a, b) => {
            let (va, vb) = (eval_at(a, lasso), eval_at(b, lasso));
            (0..n).map(|i| va[i] || vb[i]).collect()
        }
        Formula::Possible(o, f) => {
            let vf = eval_at(f, lasso);
            (0..n).map(|i| desc_holds(o, &lasso.step(i).obs) && vf[lasso.next(i)]).collect()
        }
        Formula::Necessary(o, f) => {
            let vf = eval_at(f, lasso);
            (0..n).map(|i| !desc_holds(o, &lasso.step(i).obs) || vf[lasso.next(i)]).collect()
        }
        Formula::Until(a, b) => {
            // u[i] = b[i] || (a[i] && u[next i]), least fixpoint on the cycle.
            let va = eval_at(a, lasso);
            let vb = eval_at(b, lasso);
            let mut u = vec![false; n];
            loop {
                let mut changed = false;
                for i in (p..n).rev() {
                    let v = vb[i] || (va[i] && u[lasso.next(i)]);
                    if v != u[i] {
                        u[i] = v;
                        changed = true;
                    }
                }
                if !changed {
                    break;
                }
            }
            for i in (0..p).rev() {
                u[i] = vb[i] || (va[i] && u[i + 1]);
            }
            u
        }
        Formula::Release(a, b) => {
            // r[i] = b[i] && (a[i] || r[next i]), greatest fixpoint on the cycle.
            let va = eval_at(a, lasso);
            let vb = eval_at(b, lasso);
            let mut r = vec![true; n];
            loop {
                let mut changed = false;
                for i in (p..n).rev() {
                    let v = vb[i] && (va[i] || r[lasso.next(i)]);
                    if v != r[i] {
                        r[i] = v;
                        changed = true;
                    }
                }
                if !changed {
                    break;
                }
            }
            for i in (0..p).rev() {
                r[i] = vb[i] && (va[i] || r[i + 1]);
            }
            r
        }
    }
}
