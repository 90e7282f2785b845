//! Recursive-descent parser from tokens to the surface trees in [`ast`].
//!
//! `U R W F G E A`, `ch`, `cv`, `data`, `sender` and `keep` are contextual
//! keywords: they are ordinary identifiers except in the positions where the
//! grammar gives them meaning.

use super::ast::*;
use super::lexer::{line_col, Token, TokKind};
use super::Diagnostic;

pub struct Parser<'a> {
    text: &'a str,
    toks: &'a [Token],
    pos: usize,
}

type PResult<T> = Result<T, Diagnostic>;

impl<'a> Parser<'a> {
    pub fn new(text: &'a str, toks: &'a [Token]) -> Self {
        Parser { text, toks, pos: 0 }
    }

    fn peek(&self) -> &TokKind {
        &self.toks[self.pos].kind
    }

    pub fn at_eof(&self) -> bool {
        self.peek() == &TokKind::Eof
    }

    pub fn offset(&self) -> usize {
        self.toks[self.pos].start
    }

    fn peek2(&self) -> &TokKind {
        &self.toks[(self.pos + 1).min(self.toks.len() - 1)].kind
    }

    fn span(&self) -> Span {
        let t = &self.toks[self.pos];
        (t.start, t.end)
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn err<T>(&self, msg: impl Into<String>) -> PResult<T> {
        let (line, col) = line_col(self.text, self.toks[self.pos].start);
        Err(Diagnostic { message: msg.into(), line, col })
    }

    fn expect(&mut self, kind: TokKind, what: &str) -> PResult<Token> {
        if self.peek() == &kind {
            Ok(self.bump())
        } else {
            self.err(format!("expected {what}, found {:?}", self.peek()))
        }
    }

    fn ident(&mut self, what: &str) -> PResult<(String, Span)> {
        match self.peek().clone() {
            TokKind::Ident(s) => {
                let sp = self.span();
                self.bump();
                Ok((s, sp))
            }
            other => self.err(format!("expected {what}, found {other:?}")),
        }
    }

    fn is_ident(&self, word: &str) -> bool {
        matches!(self.peek(), TokKind::Ident(s) if s == word)
    }

    fn eat_ident(&mut self, word: &str) -> bool {
        if self.is_ident(word) {
            self.bump();
            true
        } else {
            false
        }
    }

    // -------- file / system --------

    pub fn parse_file(&mut self) -> PResult<FileAst> {
        let mut system = None;
        let mut properties = Vec::new();
        loop {
            if self.eat_ident("system") {
                if system.is_some() {
                    return self.err("only one system block per file");
                }
                system = Some(self.parse_system_body()?);
            } else if self.is_ident("property") {
                properties.push(self.parse_property()?);
            } else if self.peek() == &TokKind::Eof {
                break;
            } else {
                return self.err("expected `system` or `property`");
            }
        }
        match system {
            Some(system) => Ok(FileAst { system, properties }),
            None => self.err("file contains no system block"),
        }
    }

    fn parse_system_body(&mut self) -> PResult<SysAst> {
        let name = match self.peek().clone() {
            TokKind::Ident(s) => {
                self.bump();
                Some(s)
            }
            _ => None,
        };
        self.expect(TokKind::LBrace, "`{`")?;
        let mut sys = SysAst {
            name,
            domains: Vec::new(),
            common: Vec::new(),
            data: Vec::new(),
            channels: Vec::new(),
            agents: Vec::new(),
        };
        while self.peek() != &TokKind::RBrace {
            if self.eat_ident("domain") {
                sys.domains.push(self.parse_domain()?);
            } else if self.eat_ident("common") {
                sys.common = self.parse_decl_block()?;
            } else if self.is_ident("data") && self.peek2() == &TokKind::LBrace {
                self.bump();
                sys.data = self.parse_decl_block()?;
            } else if self.eat_ident("channels") {
                self.expect(TokKind::LBrace, "`{`")?;
                loop {
                    let (n, sp) = self.ident("channel name")?;
                    sys.channels.push((n, sp));
                    if !matches!(self.peek(), TokKind::Comma) {
                        break;
                    }
                    self.bump();
                    if self.peek() == &TokKind::RBrace {
                        break;
                    }
                }
                self.expect(TokKind::RBrace, "`}`")?;
            } else if self.eat_ident("agent") {
                sys.agents.push(self.parse_agent()?);
            } else {
                return self.err("expected `domain`, `common`, `data`, `channels` or `agent`");
            }
        }
        self.expect(TokKind::RBrace, "`}`")?;
        Ok(sys)
    }

    fn parse_domain(&mut self) -> PResult<DomainAst> {
        let (name, span) = self.ident("domain name")?;
        self.expect(TokKind::LBrace, "`{`")?;
        let mut values = Vec::new();
        loop {
            let sp = self.span();
            match self.peek().clone() {
                TokKind::Ident(s) => {
                    self.bump();
                    values.push((s, sp));
                }
                TokKind::Int(s) => {
                    self.bump();
                    values.push((s, sp));
                }
                _ => return self.err("expected a domain value"),
            }
            if !matches!(self.peek(), TokKind::Comma) {
                break;
            }
            self.bump();
            if self.peek() == &TokKind::RBrace {
                break;
            }
        }
        self.expect(TokKind::RBrace, "`}`")?;
        Ok(DomainAst { name, values, span })
    }

    fn parse_decl_block(&mut self) -> PResult<Vec<DeclAst>> {
        self.expect(TokKind::LBrace, "`{`")?;
        let mut decls = Vec::new();
        while self.peek() != &TokKind::RBrace {
            let (name, span) = self.ident("variable name")?;
            self.expect(TokKind::Colon, "`:`")?;
            let (domain, _) = self.ident("domain name")?;
            self.expect(TokKind::Semi, "`;`")?;
            decls.push(DeclAst { name, domain, span });
        }
        self.expect(TokKind::RBrace, "`}`")?;
        Ok(decls)
    }

    fn parse_agent(&mut self) -> PResult<AgentAst> {
        let (name, span) = self.ident("agent name")?;
        self.expect(TokKind::LBrace, "`{`")?;
        let mut agent = AgentAst {
            name,
            locals: Vec::new(),
            relabel: Vec::new(),
            init: None,
            send_guard: None,
            recv_guard: None,
            send_rules: None,
            recv_rules: None,
            span,
        };
        while self.peek() != &TokKind::RBrace {
            if self.eat_ident("locals") {
                agent.locals = self.parse_decl_block()?;
            } else if self.eat_ident("relabel") {
                self.expect(TokKind::LBrace, "`{`")?;
                while self.peek() != &TokKind::RBrace {
                    let (cv, sp) = self.ident("common variable")?;
                    self.expect(TokKind::Arrow, "`->`")?;
                    let (local, _) = self.ident("local variable")?;
                    self.expect(TokKind::Semi, "`;`")?;
                    agent.relabel.push((cv, local, sp));
                }
                self.expect(TokKind::RBrace, "`}`")?;
            } else if self.eat_ident("init") {
                self.expect(TokKind::Colon, "`:`")?;
                agent.init = Some(self.parse_expr()?);
                self.expect(TokKind::Semi, "`;`")?;
            } else if self.is_ident("send") {
                self.bump();
                if self.peek() == &TokKind::Minus {
                    self.bump();
                    if !self.eat_ident("guard") {
                        return self.err("expected `guard` after `send-`");
                    }
                    self.expect(TokKind::Colon, "`:`")?;
                    agent.send_guard = Some(self.parse_expr()?);
                    self.expect(TokKind::Semi, "`;`")?;
                } else {
                    agent.send_rules = Some(self.parse_rules()?);
                }
            } else if self.is_ident("recv") {
                self.bump();
                if self.peek() == &TokKind::Minus {
                    self.bump();
                    if !self.eat_ident("guard") {
                        return self.err("expected `guard` after `recv-`");
                    }
                    self.expect(TokKind::Colon, "`:`")?;
                    agent.recv_guard = Some(self.parse_expr()?);
                    self.expect(TokKind::Semi, "`;`")?;
                } else {
                    agent.recv_rules = Some(self.parse_rules()?);
                }
            } else {
                return self.err(
                    "expected `locals`, `relabel`, `init`, `send-guard`, `recv-guard`, `send` or `recv`",
                );
            }
        }
        self.expect(TokKind::RBrace, "`}`")?;
        Ok(agent)
    }

    fn parse_rules(&mut self) -> PResult<Vec<RuleAst>> {
        self.expect(TokKind::LBrace, "`{`")?;
        let mut rules = Vec::new();
        while self.peek() != &TokKind::RBrace {
            if !self.eat_ident("rule") {
                return self.err("expected `rule`");
            }
            let (name, _) = self.ident("rule name")?;
            self.expect(TokKind::Colon, "`:`")?;
            let body = self.parse_expr()?;
            self.expect(TokKind::Semi, "`;`")?;
            rules.push(RuleAst { name, body });
        }
        self.expect(TokKind::RBrace, "`}`")?;
        Ok(rules)
    }

    // -------- assertions --------

    pub fn parse_expr(&mut self) -> PResult<ExprAst> {
        let lhs = self.parse_expr_or()?;
        if self.peek() == &TokKind::Arrow {
            self.bump();
            let rhs = self.parse_expr()?;
            return Ok(ExprAst::Imp(Box::new(lhs), Box::new(rhs)));
        }
        Ok(lhs)
    }

    fn parse_expr_or(&mut self) -> PResult<ExprAst> {
        let first = self.parse_expr_and()?;
        if self.peek() != &TokKind::Pipe {
            return Ok(first);
        }
        let mut parts = vec![first];
        while self.peek() == &TokKind::Pipe {
            self.bump();
            parts.push(self.parse_expr_and()?);
        }
        Ok(ExprAst::Or(parts))
    }

    fn parse_expr_and(&mut self) -> PResult<ExprAst> {
        let first = self.parse_expr_unary()?;
        if self.peek() != &TokKind::Amp {
            return Ok(first);
        }
        let mut parts = vec![first];
        while self.peek() == &TokKind::Amp {
            self.bump();
            parts.push(self.parse_expr_unary()?);
        }
        Ok(ExprAst::And(parts))
    }

    fn parse_expr_unary(&mut self) -> PResult<ExprAst> {
        match self.peek() {
            TokKind::Bang => {
                self.bump();
                Ok(ExprAst::Not(Box::new(self.parse_expr_unary()?)))
            }
            TokKind::LParen => {
                self.bump();
                let e = self.parse_expr()?;
                self.expect(TokKind::RParen, "`)`")?;
                Ok(e)
            }
            _ => self.parse_expr_atom(),
        }
    }

    fn parse_expr_atom(&mut self) -> PResult<ExprAst> {
        let span = self.span();
        if self.is_ident("keep") {
            self.bump();
            self.expect(TokKind::LParen, "`(`")?;
            if self.eat_ident("all") {
                self.expect(TokKind::RParen, "`)`")?;
                return Ok(ExprAst::Keep { vars: Vec::new(), all: true, span });
            }
            let mut vars = Vec::new();
            loop {
                let (n, sp) = self.ident("variable name")?;
                vars.push((n, sp));
                if !matches!(self.peek(), TokKind::Comma) {
                    break;
                }
                self.bump();
            }
            self.expect(TokKind::RParen, "`)`")?;
            return Ok(ExprAst::Keep { vars, all: false, span });
        }
        let lhs = self.parse_term()?;
        let op = match self.peek() {
            TokKind::Eq | TokKind::ColonEq => Some(CmpOp::Eq),
            TokKind::Ne => Some(CmpOp::Ne),
            TokKind::Lt => Some(CmpOp::Lt),
            TokKind::Le => Some(CmpOp::Le),
            TokKind::Gt => Some(CmpOp::Gt),
            TokKind::Ge => Some(CmpOp::Ge),
            _ => None,
        };
        match op {
            Some(op) => {
                self.bump();
                let rhs = self.parse_term()?;
                let span = (span.0, rhs.span().1);
                Ok(ExprAst::Cmp { lhs, op, rhs, span })
            }
            None => match lhs {
                TermAst::BoolLit(true, s) => Ok(ExprAst::True(s)),
                TermAst::BoolLit(false, s) => Ok(ExprAst::False(s)),
                t => Ok(ExprAst::Bare(t)),
            },
        }
    }

    fn parse_term(&mut self) -> PResult<TermAst> {
        let span = self.span();
        let base = match self.peek().clone() {
            TokKind::Int(s) => {
                self.bump();
                TermAst::IntLit(s, span)
            }
            TokKind::Ident(s) => {
                self.bump();
                match s.as_str() {
                    "true" => TermAst::BoolLit(true, span),
                    "false" => TermAst::BoolLit(false, span),
                    "ch" => TermAst::Chan(span),
                    "cv" | "data" if self.peek() == &TokKind::Dot => {
                        self.bump();
                        let (name, sp2) = self.ident("variable name")?;
                        let ns = if s == "cv" { Ns::Cv } else { Ns::Data };
                        TermAst::Field { ns, name, span: (span.0, sp2.1) }
                    }
                    _ => {
                        let primed = if self.peek() == &TokKind::Prime {
                            self.bump();
                            true
                        } else {
                            false
                        };
                        TermAst::Var { name: s, primed, span }
                    }
                }
            }
            other => return self.err(format!("expected a term, found {other:?}")),
        };
        match self.peek() {
            TokKind::Plus | TokKind::Minus => {
                let negative = self.peek() == &TokKind::Minus;
                self.bump();
                let (lit, sp2) = match self.peek().clone() {
                    TokKind::Int(s) => {
                        let sp = self.span();
                        self.bump();
                        (s, sp)
                    }
                    _ => return self.err("expected an integer offset"),
                };
                let delta: i64 = match lit.parse() {
                    Ok(d) => d,
                    Err(_) => return self.err("offset does not fit in an integer"),
                };
                let delta = if negative { -delta } else { delta };
                Ok(TermAst::Offset {
                    base: Box::new(base),
                    delta,
                    span: (span.0, sp2.1),
                })
            }
            _ => Ok(base),
        }
    }

    // -------- properties / formulas --------

    fn parse_property(&mut self) -> PResult<PropertyAst> {
        let span = self.span();
        self.bump(); // `property`
        let (name, _) = self.ident("property name")?;
        self.expect(TokKind::ColonEq, "`:=`")?;
        let formula = self.parse_formula()?;
        self.expect(TokKind::Semi, "`;`")?;
        Ok(PropertyAst { name, formula, span })
    }

    pub fn parse_formula(&mut self) -> PResult<FormulaAst> {
        let lhs = self.parse_formula_or()?;
        if self.peek() == &TokKind::Arrow {
            self.bump();
            let rhs = self.parse_formula()?;
            return Ok(FormulaAst::Imp(Box::new(lhs), Box::new(rhs)));
        }
        Ok(lhs)
    }

    fn parse_formula_or(&mut self) -> PResult<FormulaAst> {
        let mut lhs = self.parse_formula_and()?;
        while self.peek() == &TokKind::Pipe {
            self.bump();
            let rhs = self.parse_formula_and()?;
            lhs = FormulaAst::Or(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn parse_formula_and(&mut self) -> PResult<FormulaAst> {
        let mut lhs = self.parse_formula_until()?;
        while self.peek() == &TokKind::Amp {
            self.bump();
            let rhs = self.parse_formula_until()?;
            lhs = FormulaAst::And(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn parse_formula_until(&mut self) -> PResult<FormulaAst> {
        let lhs = self.parse_formula_unary()?;
        let op = match self.peek() {
            TokKind::Ident(s) if s == "U" || s == "R" || s == "W" => s.clone(),
            _ => return Ok(lhs),
        };
        self.bump();
        let rhs = self.parse_formula_until()?;
        Ok(match op.as_str() {
            "U" => FormulaAst::Until(Box::new(lhs), Box::new(rhs)),
            "R" => FormulaAst::Release(Box::new(lhs), Box::new(rhs)),
            _ => FormulaAst::WeakUntil(Box::new(lhs), Box::new(rhs)),
        })
    }

    fn parse_formula_unary(&mut self) -> PResult<FormulaAst> {
        match self.peek().clone() {
            TokKind::Bang => {
                self.bump();
                Ok(FormulaAst::Not(Box::new(self.parse_formula_unary()?)))
            }
            TokKind::LParen => {
                self.bump();
                let f = self.parse_formula()?;
                self.expect(TokKind::RParen, "`)`")?;
                Ok(f)
            }
            TokKind::Lt => {
                self.bump();
                let desc = self.parse_desc()?;
                self.expect(TokKind::Gt, "`>`")?;
                Ok(FormulaAst::Possible(desc, Box::new(self.parse_formula_unary()?)))
            }
            TokKind::LBracket => {
                self.bump();
                let desc = self.parse_desc()?;
                self.expect(TokKind::RBracket, "`]`")?;
                Ok(FormulaAst::Necessary(desc, Box::new(self.parse_formula_unary()?)))
            }
            TokKind::Ident(s) if s == "F" => {
                self.bump();
                Ok(FormulaAst::Eventually(Box::new(self.parse_formula_unary()?)))
            }
            TokKind::Ident(s) if s == "G" => {
                self.bump();
                Ok(FormulaAst::Globally(Box::new(self.parse_formula_unary()?)))
            }
            _ => self.parse_formula_atom(),
        }
    }

    fn parse_formula_atom(&mut self) -> PResult<FormulaAst> {
        let span = self.span();
        match self.peek().clone() {
            TokKind::Ident(s) if s == "true" => {
                self.bump();
                Ok(FormulaAst::True(span))
            }
            TokKind::Ident(s) if s == "false" => {
                self.bump();
                Ok(FormulaAst::False(span))
            }
            TokKind::Ident(agent) => {
                self.bump();
                self.expect(TokKind::Dot, "`.` (state atoms are agent.var)")?;
                let (var, _) = self.ident("variable name")?;
                let (value, neq) = self.parse_opt_value()?;
                Ok(FormulaAst::Atom { agent, var, value, neq, span })
            }
            other => self.err(format!("expected a formula, found {other:?}")),
        }
    }

    fn parse_opt_value(&mut self) -> PResult<(Option<(String, Span)>, bool)> {
        let neq = match self.peek() {
            TokKind::Eq => false,
            TokKind::Ne => true,
            _ => return Ok((None, false)),
        };
        self.bump();
        let sp = self.span();
        match self.peek().clone() {
            TokKind::Ident(s) => {
                self.bump();
                Ok((Some((s, sp)), neq))
            }
            TokKind::Int(s) => {
                self.bump();
                Ok((Some((s, sp)), neq))
            }
            other => self.err(format!("expected a value, found {other:?}")),
        }
    }

    // -------- descriptors --------

    fn parse_desc(&mut self) -> PResult<DescAst> {
        let lhs = self.parse_desc_or()?;
        if self.peek() == &TokKind::Arrow {
            self.bump();
            let rhs = self.parse_desc()?;
            return Ok(DescAst::Imp(Box::new(lhs), Box::new(rhs)));
        }
        Ok(lhs)
    }

    fn parse_desc_or(&mut self) -> PResult<DescAst> {
        let mut lhs = self.parse_desc_and()?;
        while self.peek() == &TokKind::Pipe {
            self.bump();
            let rhs = self.parse_desc_and()?;
            lhs = DescAst::Or(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn parse_desc_and(&mut self) -> PResult<DescAst> {
        let mut lhs = self.parse_desc_unary()?;
        while self.peek() == &TokKind::Amp {
            self.bump();
            let rhs = self.parse_desc_unary()?;
            lhs = DescAst::And(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn parse_desc_unary(&mut self) -> PResult<DescAst> {
        match self.peek().clone() {
            TokKind::Bang => {
                self.bump();
                Ok(DescAst::Not(Box::new(self.parse_desc_unary()?)))
            }
            TokKind::LParen => {
                self.bump();
                let d = self.parse_desc()?;
                self.expect(TokKind::RParen, "`)`")?;
                Ok(d)
            }
            TokKind::Ident(s) if s == "E" => {
                self.bump();
                Ok(DescAst::Exists(Box::new(self.parse_desc_unary()?)))
            }
            TokKind::Ident(s) if s == "A" => {
                self.bump();
                Ok(DescAst::Forall(Box::new(self.parse_desc_unary()?)))
            }
            _ => self.parse_desc_atom(),
        }
    }

    fn parse_desc_atom(&mut self) -> PResult<DescAst> {
        let span = self.span();
        match self.peek().clone() {
            TokKind::Ident(s) if s == "true" => {
                self.bump();
                Ok(DescAst::True(span))
            }
            TokKind::Ident(s) if s == "false" => {
                self.bump();
                Ok(DescAst::False(span))
            }
            TokKind::Ident(s) if s == "ch" => {
                self.bump();
                let (neq, name) = self.parse_name_cmp()?;
                Ok(DescAst::Chan { name, neq, span })
            }
            TokKind::Ident(s) if s == "sender" => {
                self.bump();
                let (neq, name) = self.parse_name_cmp()?;
                Ok(DescAst::Sender { name, neq, span })
            }
            TokKind::Ident(s) if s == "cv" || s == "data" => {
                self.bump();
                self.expect(TokKind::Dot, "`.`")?;
                let (var, _) = self.ident("variable name")?;
                let (value, neq) = self.parse_opt_value()?;
                if s == "cv" {
                    Ok(DescAst::Cv { var, value, neq, span })
                } else {
                    Ok(DescAst::Data { var, value, neq, span })
                }
            }
            other => self.err(format!("expected an observation descriptor, found {other:?}")),
        }
    }

    fn parse_name_cmp(&mut self) -> PResult<(bool, String)> {
        let neq = match self.peek() {
            TokKind::Eq => false,
            TokKind::Ne => true,
            other => return self.err(format!("expected `=` or `!=`, found {other:?}")),
        };
        self.bump();
        let (name, _) = self.ident("name")?;
        Ok((neq, name))
    }
}
