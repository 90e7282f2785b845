//! The transition system a ReCiPe system induces, computed twice by
//! independent routes.
//!
//! The reference engine follows the transition-system definition directly:
//! the sender's predicate is materialised as its canonical sat set, each
//! non-sender is classified into exactly one of the three receiver clauses
//! (connected participant, not connected, broadcast non-target), and clause
//! membership over the predicate is decided by set membership.
//!
//! The symbolic engine evaluates the system-level transition assertion: for
//! each candidate sender move it evaluates the receive disjunction per agent
//! directly against the send guard formula, with the common variables bound
//! through the receiver's relabelling. The predicate is materialised only
//! for the observation label.
//!
//! Both must produce identical transition sets; the equivalence is enforced
//! by randomized cross-checking in the test suite.

use indexmap::IndexSet;
use serde_json::json;
use thiserror::Error;

use crate::expr::{
    enumerate_assignments, eval, Env, Expr, ExprError, VarScope,
};
use crate::model::{
    make_observation, ModelError, Observation, SystemDef, Valuation, AGENT_STATES_CAP,
};

/// One state of the composed system: a valuation per agent, in declaration
/// order.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GlobalState(pub Vec<Valuation>);

/// A transition of the induced system.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SysTransition {
    pub from: GlobalState,
    pub obs: Observation,
    pub to: GlobalState,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Engine {
    Reference,
    #[default]
    Symbolic,
}

impl Engine {
    pub fn name(self) -> &'static str {
        match self {
            Engine::Reference => "reference",
            Engine::Symbolic => "symbolic",
        }
    }
}

#[derive(Debug, Error)]
pub enum SemanticsError {
    #[error("no state satisfies the conjunction of the initial conditions")]
    NoInitialStates,
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error(transparent)]
    Model(#[from] ModelError),
}

impl From<crate::expr::EvalError> for SemanticsError {
    fn from(e: crate::expr::EvalError) -> Self {
        SemanticsError::Expr(ExprError::Eval(e))
    }
}

/// All global states satisfying every agent's initial condition, ordered by
/// agent-major lexicographic product of the per-agent initial sets.
pub fn initial_states(sys: &SystemDef) -> Result<Vec<GlobalState>, SemanticsError> {
    let mut per_agent: Vec<Vec<Valuation>> = Vec::new();
    for agent in &sys.agents {
        let states = enumerate_assignments(
            &agent.init,
            VarScope::Local,
            &agent.locals,
            &sys.domains,
            Env::default(),
            AGENT_STATES_CAP,
        )?;
        per_agent.push(states);
    }
    if per_agent.iter().any(|s| s.is_empty()) {
        return Err(SemanticsError::NoInitialStates);
    }
    let mut out = Vec::new();
    let mut idx = vec![0usize; per_agent.len()];
    loop {
        out.push(GlobalState(
            idx.iter().zip(&per_agent).map(|(&i, states)| states[i].clone()).collect(),
        ));
        let mut pos = per_agent.len();
        loop {
            if pos == 0 {
                return Ok(out);
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < per_agent[pos].len() {
                break;
            }
            idx[pos] = 0;
        }
    }
}

/// All data valuations, in lexicographic order.
fn data_valuations(sys: &SystemDef) -> Result<Vec<Valuation>, SemanticsError> {
    Ok(enumerate_assignments(
        &Expr::Const(true),
        VarScope::Data,
        &sys.data_vars,
        &sys.domains,
        Env::default(),
        AGENT_STATES_CAP,
    )?)
}

/// The sender side shared by both engines: successor valuations of the
/// sender's locals under its send relation, for a fixed channel and data.
fn sender_moves(
    sys: &SystemDef,
    sender: u32,
    state: &Valuation,
    ch: u32,
    data: &Valuation,
) -> Result<Vec<Valuation>, SemanticsError> {
    let agent = &sys.agents[sender as usize];
    let env = Env { local: Some(state), data: Some(data), chan: Some(ch), ..Env::default() };
    Ok(enumerate_assignments(
        &agent.send_rel,
        VarScope::Primed,
        &agent.locals,
        &sys.domains,
        env,
        AGENT_STATES_CAP,
    )?)
}

/// Receive-relation successors of one agent for a fixed channel and data.
fn recv_moves(
    sys: &SystemDef,
    agent_idx: u32,
    state: &Valuation,
    ch: u32,
    data: &Valuation,
) -> Result<Vec<Valuation>, SemanticsError> {
    let agent = &sys.agents[agent_idx as usize];
    let env = Env { local: Some(state), data: Some(data), chan: Some(ch), ..Env::default() };
    Ok(enumerate_assignments(
        &agent.recv_rel,
        VarScope::Primed,
        &agent.locals,
        &sys.domains,
        env,
        AGENT_STATES_CAP,
    )?)
}

/// Exactly the transitions admitted by the doubly-labeled transition-system
/// definition, in (channel, data, sender, sender successor, receivers)
/// order.
pub fn successors_reference(
    sys: &SystemDef,
    s: &GlobalState,
) -> Result<Vec<SysTransition>, SemanticsError> {
    let data_vals = data_valuations(sys)?;
    let star = sys.star();
    let mut out = Vec::new();
    for ch in 0..sys.channels.len() as u32 {
        for data in &data_vals {
            for sender in 0..sys.agents.len() as u32 {
                let moves = sender_moves(sys, sender, &s.0[sender as usize], ch, data)?;
                if moves.is_empty() {
                    continue;
                }
                let obs = make_observation(sys, sender, &s.0[sender as usize], ch, data)?;

                // Per-receiver option sets by the three-clause case split;
                // the clauses are mutually exclusive.
                let mut options: Vec<Vec<Valuation>> = Vec::new();
                let mut blocked = false;
                for j in 0..sys.agents.len() as u32 {
                    if j == sender {
                        options.push(Vec::new());
                        continue;
                    }
                    let agent = &sys.agents[j as usize];
                    let sj = &s.0[j as usize];
                    let connected = eval(
                        &agent.recv_guard,
                        Env { local: Some(sj), chan: Some(ch), ..Env::default() },
                    )?;
                    let opts = if !connected {
                        vec![sj.clone()]
                    } else if crate::expr::holds_for_receiver(&obs.pred, &agent.relabel, sj) {
                        recv_moves(sys, j, sj, ch, data)?
                    } else if ch == star {
                        vec![sj.clone()]
                    } else {
                        Vec::new()
                    };
                    if opts.is_empty() {
                        blocked = true;
                        break;
                    }
                    options.push(opts);
                }
                if blocked {
                    continue;
                }
                emit_products(sys, s, &obs, sender, &moves, &options, &mut out);
            }
        }
    }
    Ok(out)
}

/// The transitions characterised by the system-level assertion: enumerate
/// channel, data and sender, then test the three-way receive disjunction per
/// agent by direct formula evaluation.
pub fn successors_symbolic(
    sys: &SystemDef,
    s: &GlobalState,
) -> Result<Vec<SysTransition>, SemanticsError> {
    let data_vals = data_valuations(sys)?;
    let star = sys.star();
    let mut out = Vec::new();
    for ch in 0..sys.channels.len() as u32 {
        for data in &data_vals {
            for sender in 0..sys.agents.len() as u32 {
                let sender_agent = &sys.agents[sender as usize];
                let sk = &s.0[sender as usize];
                let moves = sender_moves(sys, sender, sk, ch, data)?;
                if moves.is_empty() {
                    continue;
                }

                let mut options: Vec<Vec<Valuation>> = Vec::new();
                let mut blocked = false;
                for j in 0..sys.agents.len() as u32 {
                    if j == sender {
                        options.push(Vec::new());
                        continue;
                    }
                    let agent = &sys.agents[j as usize];
                    let sj = &s.0[j as usize];
                    // The existential over the common variables collapses to
                    // the receiver's relabelled copy.
                    let cj = agent.relabelled(sj);
                    let connected = eval(
                        &agent.recv_guard,
                        Env { local: Some(sj), chan: Some(ch), ..Env::default() },
                    )?;
                    let targeted = eval(
                        &sender_agent.send_guard,
                        Env {
                            local: Some(sk),
                            common: Some(&cj),
                            data: Some(data),
                            chan: Some(ch),
                            ..Env::default()
                        },
                    )?;
                    let mut opts: Vec<Valuation> = Vec::new();
                    if connected && targeted {
                        opts.extend(recv_moves(sys, j, sj, ch, data)?);
                    }
                    if !connected || (ch == star && !targeted) {
                        // Identity disjuncts of the assertion.
                        if !opts.contains(sj) {
                            opts.push(sj.clone());
                        }
                        opts.sort();
                    }
                    if opts.is_empty() {
                        blocked = true;
                        break;
                    }
                    options.push(opts);
                }
                if blocked {
                    continue;
                }
                let obs = make_observation(sys, sender, sk, ch, data)?;
                emit_products(sys, s, &obs, sender, &moves, &options, &mut out);
            }
        }
    }
    Ok(out)
}

/// Cross product of the sender's moves with every receiver's options, in
/// declaration order.
fn emit_products(
    sys: &SystemDef,
    s: &GlobalState,
    obs: &Observation,
    sender: u32,
    moves: &[Valuation],
    options: &[Vec<Valuation>],
    out: &mut Vec<SysTransition>,
) {
    let n = sys.agents.len();
    for mv in moves {
        let mut choice = vec![0usize; n];
        'combos: loop {
            let mut to = Vec::with_capacity(n);
            for j in 0..n {
                if j as u32 == sender {
                    to.push(mv.clone());
                } else {
                    to.push(options[j][choice[j]].clone());
                }
            }
            out.push(SysTransition { from: s.clone(), obs: obs.clone(), to: GlobalState(to) });
            // Odometer over receivers, last agent fastest.
            let mut pos = n;
            loop {
                if pos == 0 {
                    break 'combos;
                }
                pos -= 1;
                if pos as u32 == sender {
                    continue;
                }
                choice[pos] += 1;
                if choice[pos] < options[pos].len() {
                    break;
                }
                choice[pos] = 0;
            }
        }
    }
}

pub fn successors(
    sys: &SystemDef,
    s: &GlobalState,
    engine: Engine,
) -> Result<Vec<SysTransition>, SemanticsError> {
    match engine {
        Engine::Reference => successors_reference(sys, s),
        Engine::Symbolic => successors_symbolic(sys, s),
    }
}

/// Transition stored inside an explored space, with interned state indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpaceTransition {
    pub obs: Observation,
    pub to: u32,
}

/// The reachable fragment of the induced transition system.
#[derive(Debug)]
pub struct SystemSpace {
    pub states: IndexSet<GlobalState>,
    pub initials: Vec<u32>,
    /// Outgoing transitions per state index, in enumeration order.
    pub transitions: Vec<Vec<SpaceTransition>>,
    pub deadlocks: Vec<u32>,
    /// True when exploration stopped at `max_states` with frontier left.
    pub truncated: bool,
}

impl SystemSpace {
    pub fn transition_count(&self) -> usize {
        self.transitions.iter().map(|t| t.len()).sum()
    }
}

/// Breadth-first closure of the initial states under the chosen successor
/// engine. State ids are discovery order, so runs are reproducible.
pub fn explore(
    sys: &SystemDef,
    engine: Engine,
    max_states: usize,
) -> Result<SystemSpace, SemanticsError> {
    let initials = initial_states(sys)?;
    let mut states: IndexSet<GlobalState> = IndexSet::new();
    let mut init_ids = Vec::new();
    let mut truncated = false;
    for s in initials {
        if states.len() >= max_states {
            truncated = true;
            break;
        }
        let (id, _) = states.insert_full(s);
        init_ids.push(id as u32);
    }
    let mut transitions: Vec<Vec<SpaceTransition>> = Vec::new();
    let mut deadlocks = Vec::new();
    let mut next = 0usize;
    while next < states.len() {
        let state = states.get_index(next).unwrap().clone();
        let succs = successors(sys, &state, engine)?;
        if succs.is_empty() {
            deadlocks.push(next as u32);
        }
        let mut row = Vec::with_capacity(succs.len());
        for t in succs {
            let to = match states.get_index_of(&t.to) {
                Some(i) => i as u32,
                None => {
                    if states.len() >= max_states {
                        truncated = true;
                        continue;
                    }
                    states.insert_full(t.to).0 as u32
                }
            };
            row.push(SpaceTransition { obs: t.obs, to });
        }
        transitions.push(row);
        next += 1;
    }
    Ok(SystemSpace { states, initials: init_ids, transitions, deadlocks, truncated })
}

fn state_json(sys: &SystemDef, s: &GlobalState) -> serde_json::Value {
    let mut agents = serde_json::Map::new();
    for (a, v) in sys.agents.iter().zip(&s.0) {
        let mut vars = serde_json::Map::new();
        for (decl, &idx) in a.locals.iter().zip(&v.0) {
            vars.insert(
                decl.name.clone(),
                json!(sys.domains.get(decl.domain).values[idx as usize]),
            );
        }
        agents.insert(a.id.clone(), serde_json::Value::Object(vars));
    }
    serde_json::Value::Object(agents)
}

pub fn obs_json(sys: &SystemDef, obs: &Observation) -> serde_json::Value {
    let mut data = serde_json::Map::new();
    for (decl, &idx) in sys.data_vars.iter().zip(&obs.data.0) {
        data.insert(decl.name.clone(), json!(sys.domains.get(decl.domain).values[idx as usize]));
    }
    let pred: Vec<serde_json::Value> = obs
        .pred
        .sat
        .iter()
        .map(|c| {
            let mut m = serde_json::Map::new();
            for (decl, &idx) in sys.common_vars.iter().zip(&c.0) {
                m.insert(
                    decl.name.clone(),
                    json!(sys.domains.get(decl.domain).values[idx as usize]),
                );
            }
            serde_json::Value::Object(m)
        })
        .collect();
    json!({
        "ch": sys.channels[obs.ch as usize],
        "data": data,
        "sender": sys.agents[obs.sender as usize].id,
        "pred": pred,
    })
}

/// JSON export with stable integer state ids.
pub fn space_to_json(sys: &SystemDef, space: &SystemSpace) -> serde_json::Value {
    let states: Vec<serde_json::Value> = space
        .states
        .iter()
        .enumerate()
        .map(|(i, s)| json!({"id": i, "agents": state_json(sys, s)}))
        .collect();
    let mut transitions = Vec::new();
    for (from, row) in space.transitions.iter().enumerate() {
        for t in row {
            let mut o = obs_json(sys, &t.obs);
            let map = o.as_object_mut().unwrap();
            map.insert("from".into(), json!(from));
            map.insert("to".into(), json!(t.to));
            transitions.push(o);
        }
    }
    json!({
        "schema": 1,
        "states": states,
        "initials": space.initials,
        "transitions": transitions,
        "deadlocks": space.deadlocks,
        "truncated": space.truncated,
    })
}

/// DOT export: states labelled by their valuations, edges by
/// `channel | data | sender | predicate size`.
pub fn space_to_dot(sys: &SystemDef, space: &SystemSpace) -> String {
    use std::fmt::Write;
    let mut out = String::from("digraph space {\n  rankdir=LR;\n");
    for (i, s) in space.states.iter().enumerate() {
        let label: Vec<String> = sys
            .agents
            .iter()
            .zip(&s.0)
            .map(|(a, v)| format!("{}[{}]", a.id, sys.render_valuation(&a.locals, v)))
            .collect();
        let shape = if space.initials.contains(&(i as u32)) { "box" } else { "ellipse" };
        writeln!(out, "  s{} [shape={},label=\"{}\"];", i, shape, label.join("\\n")).unwrap();
    }
    for (from, row) in space.transitions.iter().enumerate() {
        for t in row {
            let data = sys.render_valuation(&sys.data_vars, &t.obs.data);
            writeln!(
                out,
                "  s{} -> s{} [label=\"{} | {} | {} | {}\"];",
                from,
                t.to,
                sys.channels[t.obs.ch as usize],
                data,
                sys.agents[t.obs.sender as usize].id,
                t.obs.pred.sat.len()
            )
            .unwrap();
        }
    }
    out.push_str("}\n");
    out
}
