//! Canonical printing of elaborated systems and formulas back to the surface
//! syntax. Printing then reparsing yields an identical elaborated tree, which
//! the round-trip tests rely on.

use std::fmt::Write;

use crate::expr::{Expr, VarRef, VarScope};
use crate::ltol::{Descriptor, Formula};
use crate::model::{AgentDef, SystemDef, VarDecl};

fn var_name(sys: &SystemDef, agent: &AgentDef, r: VarRef) -> String {
    match r.scope {
        VarScope::Local => agent.locals[r.idx as usize].name.clone(),
        VarScope::Primed => format!("{}'", agent.locals[r.idx as usize].name),
        VarScope::Common => format!("cv.{}", sys.common_vars[r.idx as usize].name),
        VarScope::Data => format!("data.{}", sys.data_vars[r.idx as usize].name),
    }
}

fn var_domain<'a>(sys: &'a SystemDef, agent: &AgentDef, r: VarRef) -> &'a crate::model::Domain {
    let decl = match r.scope {
        VarScope::Local | VarScope::Primed => &agent.locals[r.idx as usize],
        VarScope::Common => &sys.common_vars[r.idx as usize],
        VarScope::Data => &sys.data_vars[r.idx as usize],
    };
    sys.domains.get(decl.domain)
}

/// Precedence levels: Or = 1, And = 2, atoms and Not = 3.
fn print_expr(sys: &SystemDef, agent: &AgentDef, e: &Expr, parent: u8, out: &mut String) {
    match e {
        Expr::Const(true) => out.push_str("true"),
        Expr::Const(false) => out.push_str("false"),
        Expr::VarEqConst(r, v) => {
            let dom = var_domain(sys, agent, *r);
            write!(out, "{}={}", var_name(sys, agent, *r), dom.values[*v as usize]).unwrap();
        }
        Expr::VarEqVar(a, b) => {
            write!(out, "{}={}", var_name(sys, agent, *a), var_name(sys, agent, *b)).unwrap();
        }
        Expr::ChanEqConst(ch) => write!(out, "ch={}", sys.channels[*ch as usize]).unwrap(),
        Expr::ChanEqVar { var, .. } => {
            write!(out, "ch={}", var_name(sys, agent, *var)).unwrap();
        }
        Expr::Not(x) => {
            out.push('!');
            let needs = matches!(**x, Expr::And(_) | Expr::Or(_));
            if needs {
                out.push('(');
            }
            print_expr(sys, agent, x, 3, out);
            if needs {
                out.push(')');
            }
        }
        Expr::And(xs) => {
            let wrap = parent > 2;
            if wrap {
                out.push('(');
            }
            for (i, x) in xs.iter().enumerate() {
                if i > 0 {
                    out.push_str(" & ");
                }
                print_expr(sys, agent, x, 3, out);
            }
            if wrap {
                out.push(')');
            }
        }
        Expr::Or(xs) => {
            let wrap = parent > 1;
            if wrap {
                out.push('(');
            }
            for (i, x) in xs.iter().enumerate() {
                if i > 0 {
                    out.push_str(" | ");
                }
                print_expr(sys, agent, x, 2, out);
            }
            if wrap {
                out.push(')');
            }
        }
    }
}

pub fn expr_to_string(sys: &SystemDef, agent: &AgentDef, e: &Expr) -> String {
    let mut s = String::new();
    print_expr(sys, agent, e, 0, &mut s);
    s
}

fn print_decls(sys: &SystemDef, decls: &[VarDecl], indent: &str, out: &mut String) {
    for d in decls {
        writeln!(out, "{indent}{}: {};", d.name, sys.domains.get(d.domain).name).unwrap();
    }
}

/// Prints a system in the concrete syntax.
pub fn print_system(sys: &SystemDef) -> String {
    let mut out = String::new();
    writeln!(out, "system {} {{", sys.name).unwrap();
    for d in sys.domains.iter() {
        if d.name == "Bool" {
            continue;
        }
        writeln!(out, "  domain {} {{ {} }}", d.name, d.values.join(", ")).unwrap();
    }
    out.push_str("  common {\n");
    print_decls(sys, &sys.common_vars, "    ", &mut out);
    out.push_str("  }\n  data {\n");
    print_decls(sys, &sys.data_vars, "    ", &mut out);
    out.push_str("  }\n");
    writeln!(out, "  channels {{ {} }}", sys.channels.join(", ")).unwrap();
    for agent in &sys.agents {
        writeln!(out, "  agent {} {{", agent.id).unwrap();
        out.push_str("    locals {\n");
        print_decls(sys, &agent.locals, "      ", &mut out);
        out.push_str("    }\n    relabel {\n");
        for (cv, &local) in sys.common_vars.iter().zip(&agent.relabel) {
            writeln!(out, "      {} -> {};", cv.name, agent.locals[local as usize].name).unwrap();
        }
        out.push_str("    }\n");
        writeln!(out, "    init: {};", expr_to_string(sys, agent, &agent.init)).unwrap();
        writeln!(out, "    send-guard: {};", expr_to_string(sys, agent, &agent.send_guard))
            .unwrap();
        writeln!(out, "    recv-guard: {};", expr_to_string(sys, agent, &agent.recv_guard))
            .unwrap();
        writeln!(out, "    send {{").unwrap();
        writeln!(out, "      rule step: {};", expr_to_string(sys, agent, &agent.send_rel))
            .unwrap();
        writeln!(out, "    }}").unwrap();
        writeln!(out, "    recv {{").unwrap();
        writeln!(out, "      rule step: {};", expr_to_string(sys, agent, &agent.recv_rel))
            .unwrap();
        writeln!(out, "    }}").unwrap();
        out.push_str("  }\n");
    }
    out.push_str("}\n");
    out
}

fn print_desc(sys: &SystemDef, o: &Descriptor, out: &mut String) {
    match o {
        Descriptor::True => out.push_str("true"),
        Descriptor::False => out.push_str("false"),
        Descriptor::Cv { var, value, positive } => {
            if !positive {
                out.push('!');
            }
            let decl = &sys.common_vars[*var as usize];
            let dom = sys.domains.get(decl.domain);
            write!(out, "cv.{}={}", decl.name, dom.values[*value as usize]).unwrap();
        }
        Descriptor::Data { var, value, positive } => {
            if !positive {
                out.push('!');
            }
            let decl = &sys.data_vars[*var as usize];
            let dom = sys.domains.get(decl.domain);
            write!(out, "data.{}={}", decl.name, dom.values[*value as usize]).unwrap();
        }
        Descriptor::Chan { ch, positive } => {
            if !positive {
                out.push('!');
            }
            write!(out, "ch={}", sys.channels[*ch as usize]).unwrap();
        }
        Descriptor::Sender { agent, positive } => {
            if !positive {
                out.push('!');
            }
            write!(out, "sender={}", sys.agents[*agent as usize].id).unwrap();
        }
        Descriptor::Exists(x) => {
            out.push_str("E ");
            print_desc(sys, x, out);
        }
        Descriptor::Forall(x) => {
            out.push_str("A ");
            print_desc(sys, x, out);
        }
        Descriptor::And(a, b) => {
            out.push('(');
            print_desc(sys, a, out);
            out.push_str(" & ");
            print_desc(sys, b, out);
            out.push(')');
        }
        Descriptor::Or(a, b) => {
            out.push('(');
            print_desc(sys, a, out);
            out.push_str(" | ");
            print_desc(sys, b, out);
            out.push(')');
        }
    }
}

fn print_formula_inner(sys: &SystemDef, f: &Formula, out: &mut String) {
    match f {
        Formula::True => out.push_str("true"),
        Formula::False => out.push_str("false"),
        Formula::Lit { atom, positive } => {
            if !positive {
                out.push('!');
            }
            let agent = &sys.agents[atom.agent as usize];
            let decl = &agent.locals[atom.var as usize];
            let dom = sys.domains.get(decl.domain);
            write!(out, "{}.{}={}", agent.id, decl.name, dom.values[atom.value as usize]).unwrap();
        }
        Formula::And(a, b) => {
            out.push('(');
            print_formula_inner(sys, a, out);
            out.push_str(" & ");
            print_formula_inner(sys, b, out);
            out.push(')');
        }
        Formula::Or(a, b) => {
            out.push('(');
            print_formula_inner(sys, a, out);
            out.push_str(" | ");
            print_formula_inner(sys, b, out);
            out.push(')');
        }
        Formula::Until(a, b) => {
            out.push('(');
            print_formula_inner(sys, a, out);
            out.push_str(" U ");
            print_formula_inner(sys, b, out);
            out.push(')');
        }
        Formula::Release(a, b) => {
            out.push('(');
            print_formula_inner(sys, a, out);
            out.push_str(" R ");
            print_formula_inner(sys, b, out);
            out.push(')');
        }
        Formula::Possible(o, x) => {
            out.push('<');
            print_desc(sys, o, out);
            out.push_str("> ");
            print_formula_inner(sys, x, out);
        }
        Formula::Necessary(o, x) => {
            out.push('[');
            print_desc(sys, o, out);
            out.push_str("] ");
            print_formula_inner(sys, x, out);
        }
    }
}

/// Prints a PNF formula in the concrete syntax.
pub fn print_formula(sys: &SystemDef, f: &Formula) -> String {
    let mut s = String::new();
    print_formula_inner(sys, f, &mut s);
    s
}
