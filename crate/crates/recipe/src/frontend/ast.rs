//! Surface syntax trees, spanned for diagnostics. Lowering resolves names and
//! produces the semantic types in [`crate::model`] and [`crate::ltol`].

pub type Span = (usize, usize);

#[derive(Debug, Clone)]
pub struct SysAst {
    pub name: Option<String>,
    pub domains: Vec<DomainAst>,
    pub common: Vec<DeclAst>,
    pub data: Vec<DeclAst>,
    pub channels: Vec<(String, Span)>,
    pub agents: Vec<AgentAst>,
}

#[derive(Debug, Clone)]
pub struct DomainAst {
    pub name: String,
    pub values: Vec<(String, Span)>,
    pub span: Span,
}

#[derive(Debug, Clone)]
pub struct DeclAst {
    pub name: String,
    pub domain: String,
    pub span: Span,
}

#[derive(Debug, Clone)]
pub struct AgentAst {
    pub name: String,
    pub locals: Vec<DeclAst>,
    pub relabel: Vec<(String, String, Span)>,
    pub init: Option<ExprAst>,
    pub send_guard: Option<ExprAst>,
    pub recv_guard: Option<ExprAst>,
    pub send_rules: Option<Vec<RuleAst>>,
    pub recv_rules: Option<Vec<RuleAst>>,
    pub span: Span,
}

#[derive(Debug, Clone)]
pub struct RuleAst {
    pub name: String,
    pub body: ExprAst,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ns {
    Cv,
    Data,
}

#[derive(Debug, Clone)]
pub enum TermAst {
    Chan(Span),
    Field { ns: Ns, name: String, span: Span },
    Var { name: String, primed: bool, span: Span },
    IntLit(String, Span),
    BoolLit(bool, Span),
    Offset { base: Box<TermAst>, delta: i64, span: Span },
}

impl TermAst {
    pub fn span(&self) -> Span {
        match self {
            TermAst::Chan(s)
            | TermAst::Field { span: s, .. }
            | TermAst::Var { span: s, .. }
            | TermAst::IntLit(_, s)
            | TermAst::BoolLit(_, s)
            | TermAst::Offset { span: s, .. } => *s,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CmpOp {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

#[derive(Debug, Clone)]
pub enum ExprAst {
    True(Span),
    False(Span),
    Keep { vars: Vec<(String, Span)>, all: bool, span: Span },
    Cmp { lhs: TermAst, op: CmpOp, rhs: TermAst, span: Span },
    Bare(TermAst),
    Not(Box<ExprAst>),
    And(Vec<ExprAst>),
    Or(Vec<ExprAst>),
    Imp(Box<ExprAst>, Box<ExprAst>),
}

#[derive(Debug, Clone)]
pub enum FormulaAst {
    True(Span),
    False(Span),
    Atom { agent: String, var: String, value: Option<(String, Span)>, neq: bool, span: Span },
    Not(Box<FormulaAst>),
    And(Box<FormulaAst>, Box<FormulaAst>),
    Or(Box<FormulaAst>, Box<FormulaAst>),
    Imp(Box<FormulaAst>, Box<FormulaAst>),
    Until(Box<FormulaAst>, Box<FormulaAst>),
    Release(Box<FormulaAst>, Box<FormulaAst>),
    WeakUntil(Box<FormulaAst>, Box<FormulaAst>),
    Eventually(Box<FormulaAst>),
    Globally(Box<FormulaAst>),
    Possible(DescAst, Box<FormulaAst>),
    Necessary(DescAst, Box<FormulaAst>),
}

#[derive(Debug, Clone)]
pub enum DescAst {
    True(Span),
    False(Span),
    Chan { name: String, neq: bool, span: Span },
    Sender { name: String, neq: bool, span: Span },
    Cv { var: String, value: Option<(String, Span)>, neq: bool, span: Span },
    Data { var: String, value: Option<(String, Span)>, neq: bool, span: Span },
    Not(Box<DescAst>),
    And(Box<DescAst>, Box<DescAst>),
    Or(Box<DescAst>, Box<DescAst>),
    Imp(Box<DescAst>, Box<DescAst>),
    Exists(Box<DescAst>),
    Forall(Box<DescAst>),
}

#[derive(Debug, Clone)]
pub struct PropertyAst {
    pub name: String,
    pub formula: FormulaAst,
    pub span: Span,
}

#[derive(Debug, Clone)]
pub struct FileAst {
    pub system: SysAst,
    pub properties: Vec<PropertyAst>,
}
