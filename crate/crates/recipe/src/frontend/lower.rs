//! Name resolution and elaboration from surface trees to semantic types.
//! Formulas are compiled to positive normal form here, pushing negation to
//! literals through the dual rules, and descriptors are normalized.

use super::ast::*;
use super::lexer::line_col;
use super::Diagnostic;
use crate::expr::{Expr, VarRef, VarScope};
use crate::ltol::{Descriptor, Formula, StateAtom};
use crate::model::{
    AgentDef, Domain, DomainId, DomainTable, SystemDef, VarDecl, VarKind, STAR,
};

fn kind_name(kind: VarKind) -> &'static str {
    match kind {
        VarKind::Local => "local",
        VarKind::Common => "common",
        VarKind::Data => "data",
    }
}

/// Which variable scopes an assertion may mention, by syntactic role.
#[derive(Clone, Copy)]
struct Role {
    primed: bool,
    data: bool,
    common: bool,
    chan: bool,
    what: &'static str,
}

const ROLE_INIT: Role =
    Role { primed: false, data: false, common: false, chan: false, what: "init" };
const ROLE_SEND_GUARD: Role =
    Role { primed: false, data: true, common: true, chan: true, what: "send-guard" };
const ROLE_RECV_GUARD: Role =
    Role { primed: false, data: false, common: false, chan: true, what: "recv-guard" };
const ROLE_RELATION: Role =
    Role { primed: true, data: true, common: false, chan: true, what: "transition rule" };

pub struct Lowerer<'a> {
    text: &'a str,
    pub diagnostics: Vec<Diagnostic>,
}

impl<'a> Lowerer<'a> {
    pub fn new(text: &'a str) -> Self {
        Lowerer { text, diagnostics: Vec::new() }
    }

    fn diag(&mut self, span: Span, msg: impl Into<String>) {
        let (line, col) = line_col(self.text, span.0);
        self.diagnostics.push(Diagnostic { message: msg.into(), line, col });
    }

    pub fn lower_system(&mut self, ast: &SysAst) -> Option<SystemDef> {
        let mut domains = DomainTable::default();
        domains.insert(Domain {
            name: "Bool".into(),
            values: vec!["false".into(), "true".into()],
        });
        for d in &ast.domains {
            if d.name == "Bool" {
                self.diag(d.span, "domain Bool is built in");
                continue;
            }
            if domains.by_name(&d.name).is_some() {
                self.diag(d.span, format!("duplicate domain {}", d.name));
                continue;
            }
            if d.values.is_empty() {
                self.diag(d.span, format!("domain {} has no values", d.name));
                continue;
            }
            let mut seen = Vec::new();
            for (v, sp) in &d.values {
                if seen.contains(&v) {
                    self.diag(*sp, format!("duplicate value {v} in domain {}", d.name));
                }
                seen.push(v);
            }
            if d.values.len() > 256 {
                self.diag(d.span, format!("domain {} has more than 256 values", d.name));
                continue;
            }
            domains.insert(Domain {
                name: d.name.clone(),
                values: d.values.iter().map(|(v, _)| v.clone()).collect(),
            });
        }

        let common_vars = self.lower_decls(&ast.common, &domains, VarKind::Common);
        let data_vars = self.lower_decls(&ast.data, &domains, VarKind::Data);

        let mut channels: Vec<String> = Vec::new();
        for (c, sp) in &ast.channels {
            if channels.contains(c) {
                self.diag(*sp, format!("duplicate channel {c}"));
            } else {
                channels.push(c.clone());
            }
        }
        if !channels.iter().any(|c| c == STAR) {
            let sp = ast.channels.first().map(|(_, s)| *s).unwrap_or((0, 0));
            self.diag(sp, "channel set must contain the broadcast channel `star`");
        }

        let mut sys = SystemDef {
            name: ast.name.clone().unwrap_or_else(|| "system".into()),
            domains,
            common_vars,
            data_vars,
            channels,
            agents: Vec::new(),
        };

        for agent_ast in &ast.agents {
            if sys.agent_idx(&agent_ast.name).is_some() {
                self.diag(agent_ast.span, format!("duplicate agent {}", agent_ast.name));
                continue;
            }
            if let Some(agent) = self.lower_agent(agent_ast, &sys) {
                sys.agents.push(agent);
            }
        }
        if sys.agents.is_empty() {
            self.diag((0, 0), "system declares no agents");
        }

        if self.diagnostics.is_empty() {
            Some(sys)
        } else {
            None
        }
    }

    fn lower_decls(
        &mut self,
        decls: &[DeclAst],
        domains: &DomainTable,
        kind: VarKind,
    ) -> Vec<VarDecl> {
        let mut out: Vec<VarDecl> = Vec::new();
        for d in decls {
            if out.iter().any(|v| v.name == d.name) {
                self.diag(d.span, format!("duplicate {} variable {}", kind_name(kind), d.name));
                continue;
            }
            match domains.by_name(&d.domain) {
                Some(dom) => out.push(VarDecl { name: d.name.clone(), domain: dom, kind }),
                None => self.diag(d.span, format!("unknown domain {}", d.domain)),
            }
        }
        out
    }

    fn lower_agent(&mut self, ast: &AgentAst, sys: &SystemDef) -> Option<AgentDef> {
        let locals = self.lower_decls(&ast.locals, &sys.domains, VarKind::Local);
        let scope = ExprScope { sys, locals: &locals, agent: &ast.name };

        let mut relabel: Vec<Option<u32>> = vec![None; sys.common_vars.len()];
        for (cv, local, span) in &ast.relabel {
            let Some(cv_idx) = sys.common_idx(cv) else {
                self.diag(*span, format!("unknown common variable {cv}"));
                continue;
            };
            let Some(local_idx) = locals.iter().position(|v| &v.name == local) else {
                self.diag(*span, format!("unknown local variable {local}"));
                continue;
            };
            if relabel[cv_idx as usize].is_some() {
                self.diag(*span, format!("common variable {cv} relabelled twice"));
            }
            relabel[cv_idx as usize] = Some(local_idx as u32);
        }
        for (i, slot) in relabel.iter().enumerate() {
            if slot.is_none() {
                self.diag(
                    ast.span,
                    format!(
                        "agent {}: common variable {} is not relabelled",
                        ast.name, sys.common_vars[i].name
                    ),
                );
            }
        }

        let init = match &ast.init {
            Some(e) => self.lower_expr(e, &scope, ROLE_INIT),
            None => {
                self.diag(ast.span, format!("agent {}: missing init", ast.name));
                None
            }
        };
        let send_guard = match &ast.send_guard {
            Some(e) => self.lower_expr(e, &scope, ROLE_SEND_GUARD),
            None => {
                self.diag(ast.span, format!("agent {}: missing send-guard", ast.name));
                None
            }
        };
        let recv_guard = match &ast.recv_guard {
            Some(e) => self.lower_expr(e, &scope, ROLE_RECV_GUARD),
            None => {
                self.diag(ast.span, format!("agent {}: missing recv-guard", ast.name));
                None
            }
        };
        let send_rel = match &ast.send_rules {
            Some(rules) => self.lower_rules(rules, &scope),
            None => {
                self.diag(ast.span, format!("agent {}: missing send block", ast.name));
                None
            }
        };
        let recv_rel = match &ast.recv_rules {
            Some(rules) => self.lower_rules(rules, &scope),
            None => {
                self.diag(ast.span, format!("agent {}: missing recv block", ast.name));
                None
            }
        };

        Some(AgentDef {
            id: ast.name.clone(),
            locals,
            relabel: relabel.into_iter().map(|s| s.unwrap_or(0)).collect(),
            send_guard: send_guard?,
            recv_guard: recv_guard?,
            send_rel: send_rel?,
            recv_rel: recv_rel?,
            init: init?,
        })
    }

    fn lower_rules(&mut self, rules: &[RuleAst], scope: &ExprScope) -> Option<Expr> {
        let mut bodies = Vec::new();
        for r in rules {
            bodies.push(self.lower_expr(&r.body, scope, ROLE_RELATION)?);
        }
        Some(Expr::or(bodies))
    }

    // -------- assertions --------

    fn lower_expr(&mut self, ast: &ExprAst, scope: &ExprScope, role: Role) -> Option<Expr> {
        match ast {
            ExprAst::True(_) => Some(Expr::Const(true)),
            ExprAst::False(_) => Some(Expr::Const(false)),
            ExprAst::Not(x) => Some(Expr::Not(Box::new(self.lower_expr(x, scope, role)?))),
            ExprAst::And(xs) => {
                let parts: Option<Vec<Expr>> =
                    xs.iter().map(|x| self.lower_expr(x, scope, role)).collect();
                Some(Expr::And(parts?))
            }
            ExprAst::Or(xs) => {
                let parts: Option<Vec<Expr>> =
                    xs.iter().map(|x| self.lower_expr(x, scope, role)).collect();
                Some(Expr::Or(parts?))
            }
            ExprAst::Imp(a, b) => {
                let a = self.lower_expr(a, scope, role)?;
                let b = self.lower_expr(b, scope, role)?;
                Some(Expr::Or(vec![Expr::Not(Box::new(a)), b]))
            }
            ExprAst::Keep { vars, all, span } => {
                if !role.primed {
                    self.diag(*span, format!("keep(..) is not allowed in {}", role.what));
                    return None;
                }
                let indices: Vec<u32> = if *all {
                    (0..scope.locals.len() as u32).collect()
                } else {
                    let mut out = Vec::new();
                    for (name, sp) in vars {
                        match scope.local_idx(name) {
                            Some(i) => out.push(i),
                            None => {
                                self.diag(*sp, format!("unknown local variable {name}"));
                                return None;
                            }
                        }
                    }
                    out
                };
                Some(Expr::and(
                    indices
                        .into_iter()
                        .map(|i| {
                            Expr::VarEqVar(
                                VarRef { scope: VarScope::Primed, idx: i },
                                VarRef { scope: VarScope::Local, idx: i },
                            )
                        })
                        .collect(),
                ))
            }
            ExprAst::Bare(term) => {
                let (var, dom) = self.resolve_var_term(term, scope, role)?;
                match scope.sys.domains.get(dom).index_of("true") {
                    Some(idx) => Some(Expr::VarEqConst(var, idx)),
                    None => {
                        self.diag(
                            term.span(),
                            "bare atom requires a boolean variable; write var=value instead",
                        );
                        None
                    }
                }
            }
            ExprAst::Cmp { lhs, op, rhs, span } => self.lower_cmp(lhs, *op, rhs, *span, scope, role),
        }
    }

    fn lower_cmp(
        &mut self,
        lhs: &TermAst,
        op: CmpOp,
        rhs: &TermAst,
        span: Span,
        scope: &ExprScope,
        role: Role,
    ) -> Option<Expr> {
        if let TermAst::Chan(sp) = lhs {
            if !role.chan {
                self.diag(*sp, format!("ch is not allowed in {}", role.what));
                return None;
            }
            if !matches!(op, CmpOp::Eq | CmpOp::Ne) {
                self.diag(span, "channels support only = and !=");
                return None;
            }
            let eq = self.lower_chan_rhs(rhs, scope)?;
            return Some(if op == CmpOp::Ne { Expr::Not(Box::new(eq)) } else { eq });
        }

        let (var, dom) = self.resolve_var_term(lhs, scope, role)?;
        match op {
            CmpOp::Eq | CmpOp::Ne => {
                let eq = self.lower_eq_rhs(var, dom, rhs, scope, role)?;
                Some(if op == CmpOp::Ne { Expr::Not(Box::new(eq)) } else { eq })
            }
            _ => {
                let TermAst::IntLit(lit, sp) = rhs else {
                    self.diag(
                        rhs.span(),
                        "ordered comparisons require an integer constant on the right",
                    );
                    return None;
                };
                let bound: i64 = match lit.parse() {
                    Ok(b) => b,
                    Err(_) => {
                        self.diag(*sp, "integer literal out of range");
                        return None;
                    }
                };
                let Some(nums) = scope.sys.domains.get(dom).numeric_values() else {
                    self.diag(*sp, "ordered comparisons require a numeric domain");
                    return None;
                };
                let sat = nums.iter().enumerate().filter(|(_, &n)| match op {
                    CmpOp::Lt => n < bound,
                    CmpOp::Le => n <= bound,
                    CmpOp::Gt => n > bound,
                    CmpOp::Ge => n >= bound,
                    _ => unreachable!(),
                });
                Some(Expr::or(sat.map(|(i, _)| Expr::VarEqConst(var, i as u8)).collect()))
            }
        }
    }

    fn lower_chan_rhs(&mut self, rhs: &TermAst, scope: &ExprScope) -> Option<Expr> {
        match rhs {
            TermAst::Var { name, primed: false, span } => {
                if let Some(ch) = scope.sys.chan_idx(name) {
                    return Some(Expr::ChanEqConst(ch));
                }
                if let Some(idx) = scope.local_idx(name) {
                    let dom = scope.locals[idx as usize].domain;
                    let table: Vec<Option<u32>> = scope
                        .sys
                        .domains
                        .get(dom)
                        .values
                        .iter()
                        .map(|v| scope.sys.chan_idx(v))
                        .collect();
                    return Some(Expr::ChanEqVar {
                        var: VarRef { scope: VarScope::Local, idx },
                        chan_of_value: table,
                    });
                }
                self.diag(*span, format!("{name} is neither a channel nor a local variable"));
                None
            }
            other => {
                self.diag(other.span(), "ch compares against a channel name or a local variable");
                None
            }
        }
    }

    fn lower_eq_rhs(
        &mut self,
        lhs: VarRef,
        lhs_dom: DomainId,
        rhs: &TermAst,
        scope: &ExprScope,
        role: Role,
    ) -> Option<Expr> {
        match rhs {
            TermAst::Offset { base, delta, span } => {
                let (base_ref, base_dom) = self.resolve_var_term(base, scope, role)?;
                let (Some(lhs_nums), Some(base_nums)) = (
                    scope.sys.domains.get(lhs_dom).numeric_values(),
                    scope.sys.domains.get(base_dom).numeric_values(),
                ) else {
                    self.diag(*span, "offset terms require numeric domains");
                    return None;
                };
                let mut clauses = Vec::new();
                for (i, lv) in lhs_nums.iter().enumerate() {
                    for (j, bv) in base_nums.iter().enumerate() {
                        if *lv == *bv + *delta {
                            clauses.push(Expr::And(vec![
                                Expr::VarEqConst(lhs, i as u8),
                                Expr::VarEqConst(base_ref, j as u8),
                            ]));
                        }
                    }
                }
                Some(Expr::or(clauses))
            }
            TermAst::Var { name, primed, span } => {
                // A bare identifier is a local variable when one of that name
                // exists, otherwise a constant of the left side's domain.
                if let Some(idx) = scope.local_idx(name) {
                    if *primed && !role.primed {
                        self.diag(*span, format!("primed variables not allowed in {}", role.what));
                        return None;
                    }
                    let s = if *primed { VarScope::Primed } else { VarScope::Local };
                    let rhs_dom = scope.locals[idx as usize].domain;
                    if rhs_dom != lhs_dom {
                        self.diag(*span, "compared variables have different domains");
                        return None;
                    }
                    return Some(Expr::VarEqVar(lhs, VarRef { scope: s, idx }));
                }
                if *primed {
                    self.diag(*span, format!("unknown local variable {name}"));
                    return None;
                }
                self.const_eq(lhs, lhs_dom, name, *span, scope)
            }
            TermAst::Field { ns, name, span } => {
                let (r, rhs_dom) = self.resolve_field(*ns, name, *span, scope, role)?;
                if rhs_dom != lhs_dom {
                    self.diag(*span, "compared variables have different domains");
                    return None;
                }
                Some(Expr::VarEqVar(lhs, r))
            }
            TermAst::IntLit(s, span) => self.const_eq(lhs, lhs_dom, s, *span, scope),
            TermAst::BoolLit(b, span) => {
                self.const_eq(lhs, lhs_dom, if *b { "true" } else { "false" }, *span, scope)
            }
            TermAst::Chan(span) => {
                self.diag(*span, "ch may only appear on the left of a comparison");
                None
            }
        }
    }

    fn const_eq(
        &mut self,
        lhs: VarRef,
        dom: DomainId,
        value: &str,
        span: Span,
        scope: &ExprScope,
    ) -> Option<Expr> {
        match scope.sys.domains.get(dom).index_of(value) {
            Some(idx) => Some(Expr::VarEqConst(lhs, idx)),
            None => {
                self.diag(
                    span,
                    format!(
                        "{value} is not a value of domain {}",
                        scope.sys.domains.get(dom).name
                    ),
                );
                None
            }
        }
    }

    fn resolve_var_term(
        &mut self,
        term: &TermAst,
        scope: &ExprScope,
        role: Role,
    ) -> Option<(VarRef, DomainId)> {
        match term {
            TermAst::Var { name, primed, span } => {
                let Some(idx) = scope.local_idx(name) else {
                    self.diag(
                        *span,
                        format!("unknown local variable {name} in agent {}", scope.agent),
                    );
                    return None;
                };
                if *primed && !role.primed {
                    self.diag(*span, format!("primed variables not allowed in {}", role.what));
                    return None;
                }
                let s = if *primed { VarScope::Primed } else { VarScope::Local };
                Some((VarRef { scope: s, idx }, scope.locals[idx as usize].domain))
            }
            TermAst::Field { ns, name, span } => self.resolve_field(*ns, name, *span, scope, role),
            other => {
                self.diag(other.span(), "expected a variable");
                None
            }
        }
    }

    fn resolve_field(
        &mut self,
        ns: Ns,
        name: &str,
        span: Span,
        scope: &ExprScope,
        role: Role,
    ) -> Option<(VarRef, DomainId)> {
        match ns {
            Ns::Cv => {
                if !role.common {
                    self.diag(span, format!("common variables not allowed in {}", role.what));
                    return None;
                }
                let Some(idx) = scope.sys.common_idx(name) else {
                    self.diag(span, format!("unknown common variable {name}"));
                    return None;
                };
                Some((
                    VarRef { scope: VarScope::Common, idx },
                    scope.sys.common_vars[idx as usize].domain,
                ))
            }
            Ns::Data => {
                if !role.data {
                    self.diag(span, format!("data variables not allowed in {}", role.what));
                    return None;
                }
                let Some(idx) = scope.sys.data_idx(name) else {
                    self.diag(span, format!("unknown data variable {name}"));
                    return None;
                };
                Some((
                    VarRef { scope: VarScope::Data, idx },
                    scope.sys.data_vars[idx as usize].domain,
                ))
            }
        }
    }

    // -------- formulas --------

    pub fn lower_formula(&mut self, ast: &FormulaAst, sys: &SystemDef) -> Option<Formula> {
        self.pnf_formula(ast, true, sys)
    }

    fn pnf_formula(&mut self, ast: &FormulaAst, pos: bool, sys: &SystemDef) -> Option<Formula> {
        Some(match ast {
            FormulaAst::True(_) => {
                if pos {
                    Formula::True
                } else {
                    Formula::False
                }
            }
            FormulaAst::False(_) => {
                if pos {
                    Formula::False
                } else {
                    Formula::True
                }
            }
            FormulaAst::Atom { agent, var, value, neq, span } => {
                let atom = self.resolve_atom(agent, var, value.as_ref(), *span, sys)?;
                Formula::Lit { atom, positive: pos != *neq }
            }
            FormulaAst::Not(x) => self.pnf_formula(x, !pos, sys)?,
            FormulaAst::And(a, b) => {
                let a = self.pnf_formula(a, pos, sys)?;
                let b = self.pnf_formula(b, pos, sys)?;
                if pos {
                    Formula::And(Box::new(a), Box::new(b))
                } else {
                    Formula::Or(Box::new(a), Box::new(b))
                }
            }
            FormulaAst::Or(a, b) => {
                let a = self.pnf_formula(a, pos, sys)?;
                let b = self.pnf_formula(b, pos, sys)?;
                if pos {
                    Formula::Or(Box::new(a), Box::new(b))
                } else {
                    Formula::And(Box::new(a), Box::new(b))
                }
            }
            FormulaAst::Imp(a, b) => {
                let na = self.pnf_formula(a, !pos, sys)?;
                let b2 = self.pnf_formula(b, pos, sys)?;
                if pos {
                    Formula::Or(Box::new(na), Box::new(b2))
                } else {
                    Formula::And(Box::new(na), Box::new(b2))
                }
            }
            FormulaAst::Until(a, b) => {
                let a = self.pnf_formula(a, pos, sys)?;
                let b = self.pnf_formula(b, pos, sys)?;
                if pos {
                    Formula::Until(Box::new(a), Box::new(b))
                } else {
                    Formula::Release(Box::new(a), Box::new(b))
                }
            }
            FormulaAst::Release(a, b) => {
                let a = self.pnf_formula(a, pos, sys)?;
                let b = self.pnf_formula(b, pos, sys)?;
                if pos {
                    Formula::Release(Box::new(a), Box::new(b))
                } else {
                    Formula::Until(Box::new(a), Box::new(b))
                }
            }
            FormulaAst::WeakUntil(a, b) => {
                // a W b  is  b R (b | a).
                let a2 = self.pnf_formula(a, pos, sys)?;
                let b2 = self.pnf_formula(b, pos, sys)?;
                if pos {
                    Formula::Release(
                        Box::new(b2.clone()),
                        Box::new(Formula::Or(Box::new(b2), Box::new(a2))),
                    )
                } else {
                    Formula::Until(
                        Box::new(b2.clone()),
                        Box::new(Formula::And(Box::new(b2), Box::new(a2))),
                    )
                }
            }
            FormulaAst::Eventually(x) => {
                let x2 = self.pnf_formula(x, pos, sys)?;
                if pos {
                    Formula::Until(Box::new(Formula::True), Box::new(x2))
                } else {
                    Formula::Release(Box::new(Formula::False), Box::new(x2))
                }
            }
            FormulaAst::Globally(x) => {
                let x2 = self.pnf_formula(x, pos, sys)?;
                if pos {
                    Formula::Release(Box::new(Formula::False), Box::new(x2))
                } else {
                    Formula::Until(Box::new(Formula::True), Box::new(x2))
                }
            }
            FormulaAst::Possible(o, x) => {
                let desc = self.pnf_desc(o, true, sys)?.normalize();
                let x2 = self.pnf_formula(x, pos, sys)?;
                if pos {
                    Formula::Possible(desc, Box::new(x2))
                } else {
                    Formula::Necessary(desc, Box::new(x2))
                }
            }
            FormulaAst::Necessary(o, x) => {
                let desc = self.pnf_desc(o, true, sys)?.normalize();
                let x2 = self.pnf_formula(x, pos, sys)?;
                if pos {
                    Formula::Necessary(desc, Box::new(x2))
                } else {
                    Formula::Possible(desc, Box::new(x2))
                }
            }
        })
    }

    fn resolve_atom(
        &mut self,
        agent: &str,
        var: &str,
        value: Option<&(String, Span)>,
        span: Span,
        sys: &SystemDef,
    ) -> Option<StateAtom> {
        let Some(agent_idx) = sys.agent_idx(agent) else {
            self.diag(span, format!("unknown agent {agent}"));
            return None;
        };
        let a = &sys.agents[agent_idx as usize];
        let Some(var_idx) = a.local_idx(var) else {
            self.diag(span, format!("agent {agent} has no local variable {var}"));
            return None;
        };
        let dom = sys.domains.get(a.locals[var_idx as usize].domain);
        let value_idx = match value {
            Some((v, vsp)) => match dom.index_of(v) {
                Some(i) => i,
                None => {
                    self.diag(*vsp, format!("{v} is not a value of domain {}", dom.name));
                    return None;
                }
            },
            None => match dom.index_of("true") {
                Some(i) => i,
                None => {
                    self.diag(span, format!("{agent}.{var} is not boolean; write {var}=value"));
                    return None;
                }
            },
        };
        Some(StateAtom { agent: agent_idx, var: var_idx, value: value_idx })
    }

    fn pnf_desc(&mut self, ast: &DescAst, pos: bool, sys: &SystemDef) -> Option<Descriptor> {
        Some(match ast {
            DescAst::True(_) => {
                if pos {
                    Descriptor::True
                } else {
                    Descriptor::False
                }
            }
            DescAst::False(_) => {
                if pos {
                    Descriptor::False
                } else {
                    Descriptor::True
                }
            }
            DescAst::Chan { name, neq, span } => {
                let Some(ch) = sys.chan_idx(name) else {
                    self.diag(*span, format!("unknown channel {name}"));
                    return None;
                };
                Descriptor::Chan { ch, positive: pos != *neq }
            }
            DescAst::Sender { name, neq, span } => {
                let Some(agent) = sys.agent_idx(name) else {
                    self.diag(*span, format!("unknown agent {name}"));
                    return None;
                };
                Descriptor::Sender { agent, positive: pos != *neq }
            }
            DescAst::Cv { var, value, neq, span } => {
                let Some(idx) = sys.common_idx(var) else {
                    self.diag(*span, format!("unknown common variable {var}"));
                    return None;
                };
                let dom = sys.domains.get(sys.common_vars[idx as usize].domain);
                let value_idx = self.desc_value(dom, value.as_ref(), *span, var)?;
                Descriptor::Cv { var: idx, value: value_idx, positive: pos != *neq }
            }
            DescAst::Data { var, value, neq, span } => {
                let Some(idx) = sys.data_idx(var) else {
                    self.diag(*span, format!("unknown data variable {var}"));
                    return None;
                };
                let dom = sys.domains.get(sys.data_vars[idx as usize].domain);
                let value_idx = self.desc_value(dom, value.as_ref(), *span, var)?;
                Descriptor::Data { var: idx, value: value_idx, positive: pos != *neq }
            }
            DescAst::Not(x) => self.pnf_desc(x, !pos, sys)?,
            DescAst::And(a, b) => {
                let a = self.pnf_desc(a, pos, sys)?;
                let b = self.pnf_desc(b, pos, sys)?;
                if pos {
                    Descriptor::And(Box::new(a), Box::new(b))
                } else {
                    Descriptor::Or(Box::new(a), Box::new(b))
                }
            }
            DescAst::Or(a, b) => {
                let a = self.pnf_desc(a, pos, sys)?;
                let b = self.pnf_desc(b, pos, sys)?;
                if pos {
                    Descriptor::Or(Box::new(a), Box::new(b))
                } else {
                    Descriptor::And(Box::new(a), Box::new(b))
                }
            }
            DescAst::Imp(a, b) => {
                let na = self.pnf_desc(a, !pos, sys)?;
                let b2 = self.pnf_desc(b, pos, sys)?;
                if pos {
                    Descriptor::Or(Box::new(na), Box::new(b2))
                } else {
                    Descriptor::And(Box::new(na), Box::new(b2))
                }
            }
            DescAst::Exists(x) => {
                let inner = self.pnf_desc(x, pos, sys)?;
                if pos {
                    Descriptor::Exists(Box::new(inner))
                } else {
                    Descriptor::Forall(Box::new(inner))
                }
            }
            DescAst::Forall(x) => {
                let inner = self.pnf_desc(x, pos, sys)?;
                if pos {
                    Descriptor::Forall(Box::new(inner))
                } else {
                    Descriptor::Exists(Box::new(inner))
                }
            }
        })
    }

    fn desc_value(
        &mut self,
        dom: &Domain,
        value: Option<&(String, Span)>,
        span: Span,
        var: &str,
    ) -> Option<u8> {
        match value {
            Some((v, vsp)) => match dom.index_of(v) {
                Some(i) => Some(i),
                None => {
                    self.diag(*vsp, format!("{v} is not a value of domain {}", dom.name));
                    None
                }
            },
            None => match dom.index_of("true") {
                Some(i) => Some(i),
                None => {
                    self.diag(span, format!("{var} is not boolean; write {var}=value"));
                    None
                }
            },
        }
    }
}

struct ExprScope<'a> {
    sys: &'a SystemDef,
    locals: &'a [VarDecl],
    agent: &'a str,
}

impl ExprScope<'_> {
    fn local_idx(&self, name: &str) -> Option<u32> {
        self.locals.iter().position(|v| v.name == name).map(|i| i as u32)
    }
}
