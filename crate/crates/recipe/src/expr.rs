//! Assertions over finite-domain variables: evaluation, satisfying-assignment
//! enumeration with pruning, and the projection of send guards into canonical
//! predicates over the common variables.

use thiserror::Error;

use crate::model::{DomainTable, SystemDef, Valuation, VarDecl};

/// Default cap on the number of common-variable valuations. Descriptor
/// semantics and send-guard projection enumerate this space exhaustively, so
/// it must stay small; exceeding the cap is a hard error.
pub const CV_VALUATIONS_CAP: usize = 4096;

/// Which valuation an atom's variable refers to during evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum VarScope {
    /// Unprimed locals of the agent under consideration.
    Local,
    /// Primed locals (transition relations only).
    Primed,
    /// Common variables.
    Common,
    /// Data variables of the message.
    Data,
}

/// Reference to a declared variable within one scope.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct VarRef {
    pub scope: VarScope,
    pub idx: u32,
}

/// Assertion tree. Atoms are equality tests; well-typedness (matching
/// domains for `VarEqVar`) is the constructor's obligation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expr {
    Const(bool),
    VarEqConst(VarRef, u8),
    VarEqVar(VarRef, VarRef),
    /// The channel of the current step equals a fixed channel.
    ChanEqConst(u32),
    /// The channel equals the symbolic value of a variable. `chan_of_value`
    /// maps each value index of the variable's domain to the channel of the
    /// same name, if any.
    ChanEqVar { var: VarRef, chan_of_value: Vec<Option<u32>> },
    Not(Box<Expr>),
    And(Vec<Expr>),
    Or(Vec<Expr>),
}

impl Expr {
    pub fn and(exprs: Vec<Expr>) -> Expr {
        match exprs.len() {
            0 => Expr::Const(true),
            1 => exprs.into_iter().next().unwrap(),
            _ => Expr::And(exprs),
        }
    }

    pub fn or(exprs: Vec<Expr>) -> Expr {
        match exprs.len() {
            0 => Expr::Const(false),
            1 => exprs.into_iter().next().unwrap(),
            _ => Expr::Or(exprs),
        }
    }
}

/// Evaluation environment. Scopes an expression does not mention may stay
/// unset; referencing an unset scope is an evaluation error.
#[derive(Debug, Clone, Copy, Default)]
pub struct Env<'a> {
    pub local: Option<&'a Valuation>,
    pub primed: Option<&'a Valuation>,
    pub common: Option<&'a Valuation>,
    pub data: Option<&'a Valuation>,
    pub chan: Option<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("unbound variable: {scope:?} #{idx}")]
    Unbound { scope: VarScope, idx: u32 },
    #[error("channel is unbound in this context")]
    UnboundChannel,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExprError {
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("valuation space of {what} has {size} elements, exceeding cap {cap}")]
    Overflow { what: String, size: u128, cap: usize },
}

/// Overlay used while enumerating one scope: the scope being assigned, with
/// per-variable values filled in as the search descends.
struct Overlay<'a> {
    scope: VarScope,
    vals: &'a [Option<u8>],
}

fn resolve(env: &Env, overlay: Option<&Overlay>, r: VarRef) -> Result<Option<u8>, EvalError> {
    if let Some(o) = overlay {
        if o.scope == r.scope {
            return Ok(o.vals[r.idx as usize]);
        }
    }
    let slot = match r.scope {
        VarScope::Local => env.local,
        VarScope::Primed => env.primed,
        VarScope::Common => env.common,
        VarScope::Data => env.data,
    };
    match slot {
        Some(v) => Ok(Some(v.get(r.idx))),
        None => Err(EvalError::Unbound { scope: r.scope, idx: r.idx }),
    }
}

/// Three-valued evaluation: `None` means the partial assignment does not yet
/// decide the expression.
fn eval3(e: &Expr, env: &Env, overlay: Option<&Overlay>) -> Result<Option<bool>, EvalError> {
    Ok(match e {
        Expr::Const(b) => Some(*b),
        Expr::VarEqConst(r, val) => resolve(env, overlay, *r)?.map(|v| v == *val),
        Expr::VarEqVar(a, b) => {
            match (resolve(env, overlay, *a)?, resolve(env, overlay, *b)?) {
                (Some(x), Some(y)) => Some(x == y),
                _ => None,
            }
        }
        Expr::ChanEqConst(ch) => Some(env.chan.ok_or(EvalError::UnboundChannel)? == *ch),
        Expr::ChanEqVar { var, chan_of_value } => {
            let ch = env.chan.ok_or(EvalError::UnboundChannel)?;
            resolve(env, overlay, *var)?.map(|v| chan_of_value[v as usize] == Some(ch))
        }
        Expr::Not(x) => eval3(x, env, overlay)?.map(|b| !b),
        Expr::And(xs) => {
            let mut all_true = true;
            for x in xs {
                match eval3(x, env, overlay)? {
                    Some(false) => return Ok(Some(false)),
                    Some(true) => {}
                    None => all_true = false,
                }
            }
            if all_true {
                Some(true)
            } else {
                None
            }
        }
        Expr::Or(xs) => {
            let mut all_false = true;
            for x in xs {
                match eval3(x, env, overlay)? {
                    Some(true) => return Ok(Some(true)),
                    Some(false) => {}
                    None => all_false = false,
                }
            }
            if all_false {
                Some(false)
            } else {
                None
            }
        }
    })
}

/// Evaluates `e` under a total environment.
pub fn eval(e: &Expr, env: Env) -> Result<bool, EvalError> {
    match eval3(e, &env, None)? {
        Some(b) => Ok(b),
        // A scope was present but the expression still came out undecided;
        // only possible when a referenced scope is missing, which eval3
        // reports as Unbound before reaching here.
        None => unreachable!("eval over total environment"),
    }
}

fn product_size(vars: &[VarDecl], domains: &DomainTable) -> u128 {
    vars.iter().map(|v| domains.get(v.domain).size() as u128).product()
}

/// Enumerates, in lexicographic declaration order, the valuations of `vars`
/// (interpreted in `scope`) that satisfy `e` under `env`. The search assigns
/// variables in order and prunes branches the partial assignment already
/// decides.
pub fn enumerate_assignments(
    e: &Expr,
    scope: VarScope,
    vars: &[VarDecl],
    domains: &DomainTable,
    env: Env,
    cap: usize,
) -> Result<Vec<Valuation>, ExprError> {
    let size = product_size(vars, domains);
    if size > cap as u128 {
        return Err(ExprError::Overflow {
            what: format!("{scope:?} variables"),
            size,
            cap,
        });
    }
    let sizes: Vec<u8> = vars.iter().map(|v| domains.get(v.domain).size() as u8).collect();
    let mut vals: Vec<Option<u8>> = vec![None; vars.len()];
    let mut out = Vec::new();
    search(e, &env, scope, &sizes, &mut vals, 0, false, &mut |v| {
        out.push(Valuation(v.to_vec()));
        true
    })?;
    Ok(out)
}

/// Early-exit variant: is there any satisfying assignment at all.
pub fn sat_exists(
    e: &Expr,
    scope: VarScope,
    vars: &[VarDecl],
    domains: &DomainTable,
    env: Env,
    cap: usize,
) -> Result<bool, ExprError> {
    let size = product_size(vars, domains);
    if size > cap as u128 {
        return Err(ExprError::Overflow { what: format!("{scope:?} variables"), size, cap });
    }
    let sizes: Vec<u8> = vars.iter().map(|v| domains.get(v.domain).size() as u8).collect();
    let mut vals: Vec<Option<u8>> = vec![None; vars.len()];
    let mut found = false;
    search(e, &env, scope, &sizes, &mut vals, 0, false, &mut |_| {
        found = true;
        false
    })?;
    Ok(found)
}

/// Depth-first assignment in declaration order. `decided_true` skips
/// re-evaluation once the expression is known to hold on every extension.
/// The visitor returns `false` to stop the search.
#[allow(clippy::too_many_arguments)]
fn search(
    e: &Expr,
    env: &Env,
    scope: VarScope,
    sizes: &[u8],
    vals: &mut Vec<Option<u8>>,
    depth: usize,
    decided_true: bool,
    visit: &mut dyn FnMut(&[u8]) -> bool,
) -> Result<bool, ExprError> {
    if depth == sizes.len() {
        let keep_going = if decided_true {
            true
        } else {
            let overlay = Overlay { scope, vals };
            match eval3(e, env, Some(&overlay))? {
                Some(true) => true,
                Some(false) => return Ok(true),
                None => unreachable!("full assignment must decide the expression"),
            }
        };
        if keep_going {
            let complete: Vec<u8> = vals.iter().map(|v| v.unwrap()).collect();
            return Ok(visit(&complete));
        }
        return Ok(true);
    }
    for value in 0..sizes[depth] {
        vals[depth] = Some(value);
        let next_decided = if decided_true {
            true
        } else {
            let overlay = Overlay { scope, vals };
            match eval3(e, env, Some(&overlay))? {
                Some(false) => {
                    vals[depth] = None;
                    continue;
                }
                Some(true) => true,
                None => false,
            }
        };
        if !search(e, env, scope, sizes, vals, depth + 1, next_decided, visit)? {
            vals[depth] = None;
            return Ok(false);
        }
    }
    vals[depth] = None;
    Ok(true)
}

/// A predicate over the common variables in canonical extensional form: the
/// lexicographically sorted, duplicate-free list of satisfying valuations.
/// Two predicates are equal exactly when their sat lists are identical.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CvPredicate {
    pub sat: Vec<Valuation>,
}

impl CvPredicate {
    pub fn is_empty(&self) -> bool {
        self.sat.is_empty()
    }

    pub fn contains(&self, v: &Valuation) -> bool {
        self.sat.binary_search(v).is_ok()
    }

    pub fn from_sorted(sat: Vec<Valuation>) -> CvPredicate {
        debug_assert!(sat.windows(2).all(|w| w[0] < w[1]));
        CvPredicate { sat }
    }
}

/// The sender predicate of an observation: the common-variable valuations on
/// which the send guard holds once the sender's state, channel and data are
/// fixed.
pub fn project_send_guard(
    sys: &SystemDef,
    guard: &Expr,
    sender_state: &Valuation,
    ch: u32,
    data: &Valuation,
) -> Result<CvPredicate, ExprError> {
    let env = Env {
        local: Some(sender_state),
        data: Some(data),
        chan: Some(ch),
        ..Env::default()
    };
    let sat = enumerate_assignments(
        guard,
        VarScope::Common,
        &sys.common_vars,
        &sys.domains,
        env,
        CV_VALUATIONS_CAP,
    )?;
    Ok(CvPredicate::from_sorted(sat))
}

/// Whether a receiver's state satisfies the sender predicate: the receiver's
/// local copies of the common variables, read off through its relabelling,
/// must be a member of the predicate's sat set.
pub fn holds_for_receiver(pred: &CvPredicate, relabel: &[u32], receiver_state: &Valuation) -> bool {
    let c = Valuation(relabel.iter().map(|&l| receiver_state.get(l)).collect());
    pred.contains(&c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Domain, VarKind};

    fn bool_table() -> (DomainTable, Vec<VarDecl>) {
        let mut t = DomainTable::default();
        let b = t.insert(Domain { name: "Bool".into(), values: vec!["false".into(), "true".into()] });
        let vars = vec![
            VarDecl { name: "a".into(), domain: b, kind: VarKind::Local },
            VarDecl { name: "b".into(), domain: b, kind: VarKind::Local },
        ];
        (t, vars)
    }

    fn local(idx: u32) -> VarRef {
        VarRef { scope: VarScope::Local, idx }
    }

    #[test]
    fn eval_constants_and_tautology() {
        let (domains, vars) = bool_table();
        let v = Valuation(vec![1, 0]);
        let env = Env { local: Some(&v), ..Env::default() };
        assert!(eval(&Expr::Const(true), env).unwrap());
        let taut = Expr::Or(vec![
            Expr::Not(Box::new(Expr::VarEqConst(local(0), 1))),
            Expr::VarEqConst(local(0), 1),
        ]);
        assert!(eval(&taut, env).unwrap());
        let _ = (domains, vars);
    }

    #[test]
    fn eval_unbound_variable_is_an_error() {
        let e = Expr::VarEqConst(VarRef { scope: VarScope::Data, idx: 0 }, 1);
        let err = eval(&e, Env::default()).unwrap_err();
        assert_eq!(err, EvalError::Unbound { scope: VarScope::Data, idx: 0 });
    }

    #[test]
    fn enumerate_false_is_empty() {
        let (domains, vars) = bool_table();
        let got = enumerate_assignments(
            &Expr::Const(false),
            VarScope::Local,
            &vars,
            &domains,
            Env::default(),
            1024,
        )
        .unwrap();
        assert!(got.is_empty());
    }

    #[test]
    fn enumerate_single_literal() {
        let (domains, vars) = bool_table();
        let got = enumerate_assignments(
            &Expr::VarEqConst(local(0), 1),
            VarScope::Local,
            &vars[..1],
            &domains,
            Env::default(),
            1024,
        )
        .unwrap();
        assert_eq!(got, vec![Valuation(vec![1])]);
    }

    #[test]
    fn enumeration_is_lexicographic_and_duplicate_free() {
        let (domains, vars) = bool_table();
        let all = enumerate_assignments(
            &Expr::Const(true),
            VarScope::Local,
            &vars,
            &domains,
            Env::default(),
            1024,
        )
        .unwrap();
        assert_eq!(
            all,
            vec![
                Valuation(vec![0, 0]),
                Valuation(vec![0, 1]),
                Valuation(vec![1, 0]),
                Valuation(vec![1, 1]),
            ]
        );
    }

    #[test]
    fn overflow_is_reported() {
        let mut t = DomainTable::default();
        let big = t.insert(Domain {
            name: "Big".into(),
            values: (0..100).map(|i| i.to_string()).collect(),
        });
        let vars: Vec<VarDecl> = (0..4)
            .map(|i| VarDecl { name: format!("v{i}"), domain: big, kind: VarKind::Local })
            .collect();
        let err = enumerate_assignments(
            &Expr::Const(true),
            VarScope::Local,
            &vars,
            &t,
            Env::default(),
            1 << 20,
        )
        .unwrap_err();
        assert!(matches!(err, ExprError::Overflow { size: 100_000_000, .. }));
    }

    #[test]
    fn predicate_membership_by_relabelling() {
        // Common variables (x, y), receiver locals (ry, rx) relabelled
        // crosswise: x -> rx (local 1), y -> ry (local 0).
        let (domains, _) = bool_table();
        let pred = CvPredicate::from_sorted(vec![Valuation(vec![1, 0])]);
        let receiver = Valuation(vec![0, 1]); // ry=0, rx=1
        assert!(holds_for_receiver(&pred, &[1, 0], &receiver));
        assert!(!holds_for_receiver(&pred, &[0, 1], &receiver));
        assert!(!holds_for_receiver(&CvPredicate::default(), &[1, 0], &receiver));
        let _ = domains;
    }
}
