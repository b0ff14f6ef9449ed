use super::Span;

/// Untyped surface expressions, shared by terms and types.
#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Name(String, Span),
    Call(String, Vec<Expr>, Span),
    BinOp(String, Box<Expr>, Box<Expr>, Span),
    /// `e :: T`, only meaningful in declaration heads.
    Ascribed(Box<Expr>, Box<Expr>, Span),
}

impl Expr {
    pub fn span(&self) -> Span {
        match self {
            Expr::Name(_, s) | Expr::Call(_, _, s) | Expr::BinOp(_, _, _, s) | Expr::Ascribed(_, _, s) => *s,
        }
    }

    /// Head symbol and arguments of an application-like expression.
    pub fn as_app(&self) -> Option<(&str, Vec<&Expr>)> {
        match self {
            Expr::Call(f, args, _) => Some((f, args.iter().collect())),
            Expr::BinOp(op, l, r, _) => Some((op, vec![l, r])),
            _ => None,
        }
    }
}

/// One group of a bracketed context: `x`, `x::T`, or `(x, y)::T`.
#[derive(Clone, Debug, PartialEq)]
pub struct CtxGroup {
    pub names: Vec<(String, Span)>,
    pub ty: Option<Expr>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Line {
    TypeCon {
        name: String,
        args: Option<Vec<Expr>>,
        ctx: Option<Vec<CtxGroup>>,
        span: Span,
    },
    TermCon {
        lhs: Expr,
        result: Expr,
        ctx: Option<Vec<CtxGroup>>,
        span: Span,
    },
    Axiom {
        name: Option<String>,
        lhs: Expr,
        rhs: Expr,
        ctx: Option<Vec<CtxGroup>>,
        span: Span,
    },
    Alias {
        symbol: String,
        target: String,
        span: Span,
    },
    Using {
        theory: String,
        renames: Vec<(String, String)>,
        span: Span,
    },
    Normalize {
        op: String,
        assoc: bool,
        unit: Option<String>,
        span: Span,
    },
    Segment {
        lines: Vec<Line>,
        span: Span,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct TheoryDecl {
    pub name: String,
    pub parent: Option<(String, Span)>,
    pub lines: Vec<Line>,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MapClause {
    pub lhs: Expr,
    pub ctx: Option<Vec<CtxGroup>>,
    pub image: Expr,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MapDecl {
    pub name: String,
    pub dom: (String, Span),
    pub codom: (String, Span),
    pub clauses: Vec<MapClause>,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Decl {
    Theory(TheoryDecl),
    Map(MapDecl),
}
