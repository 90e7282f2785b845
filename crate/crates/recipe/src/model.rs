//! Static description of a ReCiPe system: finite domains, variables, agents
//! with guarded send/receive transition relations, and the well-formedness
//! checks the semantics assumes (broadcast input-enabledness, receive guards
//! that hold on the broadcast channel, satisfiable initial conditions).

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::expr::{
    self, enumerate_assignments, eval, CvPredicate, Env, Expr, ExprError, VarScope,
};

/// Surface name of the broadcast channel.
pub const STAR: &str = "star";

/// Default cap on the number of local states enumerated per agent.
pub const AGENT_STATES_CAP: usize = 1 << 20;

/// A finite, ordered domain of constant symbols. The declaration order of
/// `values` fixes the enumeration order everywhere.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Domain {
    pub name: String,
    pub values: Vec<String>,
}

impl Domain {
    pub fn size(&self) -> usize {
        self.values.len()
    }

    pub fn index_of(&self, value: &str) -> Option<u8> {
        self.values.iter().position(|v| v == value).map(|i| i as u8)
    }

    /// A domain is numeric when every value parses as an integer. Numeric
    /// domains admit comparison and offset sugar in the DSL.
    pub fn numeric_values(&self) -> Option<Vec<i64>> {
        self.values.iter().map(|v| v.parse().ok()).collect()
    }
}

/// Interned table of domains, indexed by [`DomainId`].
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DomainTable {
    domains: Vec<Domain>,
}

pub type DomainId = usize;

impl DomainTable {
    pub fn insert(&mut self, domain: Domain) -> DomainId {
        debug_assert!(self.by_name(&domain.name).is_none());
        self.domains.push(domain);
        self.domains.len() - 1
    }

    pub fn get(&self, id: DomainId) -> &Domain {
        &self.domains[id]
    }

    pub fn by_name(&self, name: &str) -> Option<DomainId> {
        self.domains.iter().position(|d| d.name == name)
    }

    pub fn iter(&self) -> impl Iterator<Item = &Domain> {
        self.domains.iter()
    }
}

/// Where a variable lives: an agent's locals, the shared common variables, or
/// the data variables carried by messages.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum VarKind {
    Local,
    Common,
    Data,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VarDecl {
    pub name: String,
    pub domain: DomainId,
    pub kind: VarKind,
}

/// A total assignment to an ordered list of variables, stored as value
/// indices into each variable's domain. `Ord` is lexicographic in the
/// declaration order, which fixes the enumeration order of states,
/// observations and traces.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Valuation(pub Vec<u8>);

impl Valuation {
    pub fn get(&self, idx: u32) -> u8 {
        self.0[idx as usize]
    }
}

/// One agent: local variables, the relabelling of common variables onto
/// locals, guards, transition relations and the initial condition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AgentDef {
    pub id: String,
    pub locals: Vec<VarDecl>,
    /// For each common variable (by index), the local variable that carries
    /// the agent's copy of it.
    pub relabel: Vec<u32>,
    pub send_guard: Expr,
    pub recv_guard: Expr,
    pub send_rel: Expr,
    pub recv_rel: Expr,
    pub init: Expr,
}

impl AgentDef {
    pub fn local_idx(&self, name: &str) -> Option<u32> {
        self.locals.iter().position(|v| v.name == name).map(|i| i as u32)
    }

    /// The common-variable valuation an agent's state induces through its
    /// relabelling: common variable `cv` takes the value of the local
    /// `relabel[cv]`.
    pub fn relabelled(&self, state: &Valuation) -> Valuation {
        Valuation(self.relabel.iter().map(|&l| state.get(l)).collect())
    }
}

/// A message: the channel it was sent on, the data it carries, the sender's
/// identity, and the canonical predicate describing the common-variable
/// assignments of its intended receivers.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Observation {
    pub ch: u32,
    pub data: Valuation,
    pub sender: u32,
    pub pred: Arc<CvPredicate>,
}

/// The full static system: shared vocabulary plus the agents.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SystemDef {
    pub name: String,
    pub domains: DomainTable,
    pub common_vars: Vec<VarDecl>,
    pub data_vars: Vec<VarDecl>,
    /// Channel names; contains [`STAR`]. Index order is the enumeration order.
    pub channels: Vec<String>,
    pub agents: Vec<AgentDef>,
}

impl SystemDef {
    pub fn star(&self) -> u32 {
        self.channels.iter().position(|c| c == STAR).expect("star channel") as u32
    }

    pub fn chan_idx(&self, name: &str) -> Option<u32> {
        self.channels.iter().position(|c| c == name).map(|i| i as u32)
    }

    pub fn agent_idx(&self, id: &str) -> Option<u32> {
        self.agents.iter().position(|a| a.id == id).map(|i| i as u32)
    }

    pub fn common_idx(&self, name: &str) -> Option<u32> {
        self.common_vars.iter().position(|v| v.name == name).map(|i| i as u32)
    }

    pub fn data_idx(&self, name: &str) -> Option<u32> {
        self.data_vars.iter().position(|v| v.name == name).map(|i| i as u32)
    }

    /// Renders a valuation over `vars` as `name=value` pairs.
    pub fn render_valuation(&self, vars: &[VarDecl], v: &Valuation) -> String {
        vars.iter()
            .zip(&v.0)
            .map(|(decl, &idx)| {
                format!("{}={}", decl.name, self.domains.get(decl.domain).values[idx as usize])
            })
            .collect::<Vec<_>>()
            .join(",")
    }
}

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("agent {agent}: local state space {size} exceeds cap {cap}")]
    StateSpaceTooLarge { agent: String, size: u128, cap: usize },
    #[error(transparent)]
    Expr(#[from] ExprError),
}

impl From<crate::expr::EvalError> for ModelError {
    fn from(e: crate::expr::EvalError) -> Self {
        ModelError::Expr(ExprError::Eval(e))
    }
}

/// Every valuation of the agent's locals, lexicographic in declaration order.
pub fn enumerate_states(
    sys: &SystemDef,
    agent: &AgentDef,
    cap: usize,
) -> Result<Vec<Valuation>, ModelError> {
    let size: u128 = agent
        .locals
        .iter()
        .map(|v| sys.domains.get(v.domain).size() as u128)
        .product();
    if size > cap as u128 {
        return Err(ModelError::StateSpaceTooLarge { agent: agent.id.clone(), size, cap });
    }
    Ok(enumerate_assignments(
        &Expr::Const(true),
        VarScope::Local,
        &agent.locals,
        &sys.domains,
        Env::default(),
        cap,
    )?)
}

/// One well-formedness violation, carrying the agent, the violated condition
/// and a witness where one exists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    /// `relabel` maps a common variable to a local of a different domain.
    RelabelDomainMismatch { agent: String, common_var: String, local_var: String },
    /// The receive guard is not identically true on the broadcast channel.
    RecvGuardFalseAtStar { agent: String, state: Valuation },
    /// Some `(state, data)` pair admits no receive successor on broadcast.
    NotInputEnabled { agent: String, state: Valuation, data: Valuation },
    /// The initial condition has no satisfying local state.
    InitUnsatisfiable { agent: String },
}

impl Violation {
    pub fn agent(&self) -> &str {
        match self {
            Violation::RelabelDomainMismatch { agent, .. }
            | Violation::RecvGuardFalseAtStar { agent, .. }
            | Violation::NotInputEnabled { agent, .. }
            | Violation::InitUnsatisfiable { agent } => agent,
        }
    }

    pub fn render(&self, sys: &SystemDef) -> String {
        match self {
            Violation::RelabelDomainMismatch { agent, common_var, local_var } => format!(
                "agent {agent}: relabel maps common variable {common_var} to local {local_var} of a different domain"
            ),
            Violation::RecvGuardFalseAtStar { agent, state } => {
                let a = &sys.agents[sys.agent_idx(agent).unwrap() as usize];
                format!(
                    "agent {agent}: receive guard is false on the broadcast channel at state [{}]",
                    sys.render_valuation(&a.locals, state)
                )
            }
            Violation::NotInputEnabled { agent, state, data } => {
                let a = &sys.agents[sys.agent_idx(agent).unwrap() as usize];
                format!(
                    "agent {agent}: not broadcast input-enabled at state [{}] with data [{}]",
                    sys.render_valuation(&a.locals, state),
                    sys.render_valuation(&sys.data_vars, data)
                )
            }
            Violation::InitUnsatisfiable { agent } => {
                format!("agent {agent}: initial condition is unsatisfiable")
            }
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::RelabelDomainMismatch { agent, common_var, local_var } => write!(
                f,
                "agent {agent}: relabel maps {common_var} to {local_var} of a different domain"
            ),
            Violation::RecvGuardFalseAtStar { agent, .. } => {
                write!(f, "agent {agent}: receive guard is false on the broadcast channel")
            }
            Violation::NotInputEnabled { agent, .. } => {
                write!(f, "agent {agent}: not broadcast input-enabled")
            }
            Violation::InitUnsatisfiable { agent } => {
                write!(f, "agent {agent}: initial condition is unsatisfiable")
            }
        }
    }
}

/// Checks every agent invariant by exhaustive enumeration. Violations are
/// data, not failures; only resource exhaustion is an error.
pub fn validate_system(sys: &SystemDef) -> Result<ValidationReport, ModelError> {
    let mut violations = Vec::new();
    let star = sys.star();
    let data_vals = enumerate_assignments(
        &Expr::Const(true),
        VarScope::Data,
        &sys.data_vars,
        &sys.domains,
        Env::default(),
        AGENT_STATES_CAP,
    )?;

    for agent in &sys.agents {
        for (cv_idx, &local) in agent.relabel.iter().enumerate() {
            let cv = &sys.common_vars[cv_idx];
            let local_decl = &agent.locals[local as usize];
            if cv.domain != local_decl.domain {
                violations.push(Violation::RelabelDomainMismatch {
                    agent: agent.id.clone(),
                    common_var: cv.name.clone(),
                    local_var: local_decl.name.clone(),
                });
            }
        }

        let states = enumerate_states(sys, agent, AGENT_STATES_CAP)?;

        let mut init_sat = false;
        for state in &states {
            let env = Env { local: Some(state), ..Env::default() };
            if eval(&agent.init, env)? {
                init_sat = true;
                break;
            }
        }
        if !init_sat {
            violations.push(Violation::InitUnsatisfiable { agent: agent.id.clone() });
        }

        'guard: for state in &states {
            let env = Env { local: Some(state), chan: Some(star), ..Env::default() };
            if !eval(&agent.recv_guard, env)? {
                violations.push(Violation::RecvGuardFalseAtStar {
                    agent: agent.id.clone(),
                    state: state.clone(),
                });
                break 'guard;
            }
        }

        'enabled: for state in &states {
            for data in &data_vals {
                let env = Env {
                    local: Some(state),
                    data: Some(data),
                    chan: Some(star),
                    ..Env::default()
                };
                if !expr::sat_exists(
                    &agent.recv_rel,
                    VarScope::Primed,
                    &agent.locals,
                    &sys.domains,
                    env,
                    AGENT_STATES_CAP,
                )? {
                    violations.push(Violation::NotInputEnabled {
                        agent: agent.id.clone(),
                        state: state.clone(),
                        data: data.clone(),
                    });
                    break 'enabled;
                }
            }
        }
    }

    Ok(ValidationReport { violations })
}

/// Builds an observation, projecting the sender's guard into the canonical
/// receiver predicate.
pub fn make_observation(
    sys: &SystemDef,
    sender: u32,
    sender_state: &Valuation,
    ch: u32,
    data: &Valuation,
) -> Result<Observation, ExprError> {
    let agent = &sys.agents[sender as usize];
    let pred = expr::project_send_guard(sys, &agent.send_guard, sender_state, ch, data)?;
    Ok(Observation { ch, data: data.clone(), sender, pred: Arc::new(pred) })
}
