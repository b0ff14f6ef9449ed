use super::ast::{CtxGroup, Decl, Expr, Line, MapClause, MapDecl, TheoryDecl};
use super::lexer::{lex, Tok, Token};
use super::{Span, SurfaceError};

type PResult<T> = Result<T, SurfaceError>;

struct Parser {
    toks: Vec<Token>,
    pos: usize,
}

/// Parses a whole source file into declarations.
pub fn parse_file(src: &str) -> PResult<Vec<Decl>> {
    let mut p = Parser::new(src)?;
    let mut decls = Vec::new();
    loop {
        p.skip_newlines();
        if p.at(&Tok::Eof) {
            break;
        }
        let span = p.span();
        match p.peek().clone() {
            Tok::Ident(k) if k == "theory" => decls.push(Decl::Theory(p.theory()?)),
            Tok::Ident(k) if k == "map" => decls.push(Decl::Map(p.map()?)),
            other => {
                return Err(SurfaceError::syntax(
                    format!("expected `theory` or `map`, found {other}"),
                    span,
                ))
            }
        }
    }
    Ok(decls)
}

/// Parses `term [⊣ ctx]`.
pub fn parse_term_ast(src: &str) -> PResult<(Expr, Option<Vec<CtxGroup>>)> {
    let mut p = Parser::new(src)?;
    p.skip_newlines();
    let e = p.expr(false)?;
    let ctx = p.turnstile()?;
    p.skip_newlines();
    p.expect(&Tok::Eof)?;
    Ok((e, ctx))
}

/// Parses a bare context, with or without surrounding brackets.
pub(crate) fn parse_ctx_ast(src: &str) -> PResult<Vec<CtxGroup>> {
    let mut p = Parser::new(src)?;
    p.skip_newlines();
    let groups = if p.at(&Tok::LBracket) {
        p.bracket_ctx()?
    } else if p.at(&Tok::Eof) {
        Vec::new()
    } else {
        p.ctx_groups(&Tok::Eof)?
    };
    p.skip_newlines();
    p.expect(&Tok::Eof)?;
    Ok(groups)
}

impl Parser {
    fn new(src: &str) -> PResult<Parser> {
        Ok(Parser {
            toks: lex(src)?,
            pos: 0,
        })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        let i = (self.pos + k).min(self.toks.len() - 1);
        &self.toks[i].tok
    }

    fn span(&self) -> Span {
        self.toks[self.pos].span
    }

    fn at(&self, t: &Tok) -> bool {
        self.peek() == t
    }

    fn at_keyword(&self, k: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == k)
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos < self.toks.len() - 1 {
            self.pos += 1;
        }
        t
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.at(t) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, t: &Tok) -> PResult<Span> {
        if self.at(t) {
            Ok(self.bump().span)
        } else {
            Err(self.unexpected(&t.to_string()))
        }
    }

    fn unexpected(&self, wanted: &str) -> SurfaceError {
        SurfaceError::syntax(format!("expected {wanted}, found {}", self.peek()), self.span())
    }

    fn ident(&mut self) -> PResult<(String, Span)> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                let sp = self.bump().span;
                Ok((s, sp))
            }
            _ => Err(self.unexpected("a name")),
        }
    }

    /// A name or an operator symbol.
    fn symbol(&mut self) -> PResult<(String, Span)> {
        match self.peek().clone() {
            Tok::Ident(s) | Tok::Op(s) => {
                let sp = self.bump().span;
                Ok((s, sp))
            }
            _ => Err(self.unexpected("a name or operator")),
        }
    }

    fn skip_newlines(&mut self) {
        while self.eat(&Tok::Newline) {}
    }

    fn end_of_line(&mut self) -> PResult<()> {
        if self.eat(&Tok::Newline) || self.at(&Tok::RBrace) || self.at(&Tok::Eof) {
            Ok(())
        } else {
            Err(self.unexpected("end of line"))
        }
    }

    fn theory(&mut self) -> PResult<TheoryDecl> {
        let span = self.bump().span;
        let (name, _) = self.ident()?;
        let parent = if self.at_keyword("extends") {
            self.bump();
            Some(self.ident()?)
        } else {
            None
        };
        let lines = self.block()?;
        Ok(TheoryDecl {
            name,
            parent,
            lines,
            span,
        })
    }

    fn block(&mut self) -> PResult<Vec<Line>> {
        self.expect(&Tok::LBrace)?;
        let mut lines = Vec::new();
        loop {
            self.skip_newlines();
            if self.eat(&Tok::RBrace) {
                break;
            }
            if self.at(&Tok::Eof) {
                return Err(self.unexpected("`}`"));
            }
            lines.push(self.line()?);
            self.end_of_line()?;
        }
        Ok(lines)
    }

    fn line(&mut self) -> PResult<Line> {
        let span = self.span();
        let next = self.peek_at(1).clone();
        if self.at_keyword("alias") && matches!(next, Tok::Op(_) | Tok::Ident(_)) {
            self.bump();
            let (symbol, _) = self.symbol()?;
            self.expect(&Tok::Eq)?;
            let (target, _) = self.symbol()?;
            return Ok(Line::Alias {
                symbol,
                target,
                span,
            });
        }
        if self.at_keyword("using") && matches!(next, Tok::Ident(_)) {
            self.bump();
            let (theory, _) = self.ident()?;
            let mut renames = Vec::new();
            if self.eat(&Tok::Colon) {
                loop {
                    let (old, _) = self.symbol()?;
                    if !self.at_keyword("as") {
                        return Err(self.unexpected("`as`"));
                    }
                    self.bump();
                    let (new, _) = self.symbol()?;
                    renames.push((old, new));
                    if !self.eat(&Tok::Comma) {
                        break;
                    }
                }
            }
            return Ok(Line::Using {
                theory,
                renames,
                span,
            });
        }
        if self.at_keyword("normalize") && matches!(next, Tok::Op(_) | Tok::Ident(_)) {
            self.bump();
            let (op, _) = self.symbol()?;
            let mut assoc = false;
            let mut unit = None;
            if self.at_keyword("assoc") {
                self.bump();
                assoc = true;
            }
            if self.at_keyword("unit") {
                self.bump();
                unit = Some(self.symbol()?.0);
            }
            return Ok(Line::Normalize {
                op,
                assoc,
                unit,
                span,
            });
        }
        if self.at_keyword("segment") && next == Tok::LBrace {
            self.bump();
            let lines = self.block()?;
            return Ok(Line::Segment { lines, span });
        }
        if matches!(self.peek(), Tok::Ident(_)) && next == Tok::ColonEq {
            let (name, _) = self.ident()?;
            self.bump();
            let lhs = self.expr(false)?;
            self.expect(&Tok::EqEq)?;
            let rhs = self.expr(false)?;
            let ctx = self.turnstile()?;
            return Ok(Line::Axiom {
                name: Some(name),
                lhs,
                rhs,
                ctx,
                span,
            });
        }

        let lhs = self.expr(false)?;
        if self.eat(&Tok::EqEq) {
            let rhs = self.expr(false)?;
            let ctx = self.turnstile()?;
            return Ok(Line::Axiom {
                name: None,
                lhs,
                rhs,
                ctx,
                span,
            });
        }
        self.expect(&Tok::ColonColon)?;
        if self.at_keyword("TYPE") {
            self.bump();
            let (name, args) = match lhs {
                Expr::Name(n, _) => (n, None),
                Expr::Call(n, args, _) => (n, Some(args)),
                other => {
                    return Err(SurfaceError::syntax(
                        "a type constructor is declared as `Name` or `Name(args)`",
                        other.span(),
                    ))
                }
            };
            let ctx = self.turnstile()?;
            return Ok(Line::TypeCon {
                name,
                args,
                ctx,
                span,
            });
        }
        let result = self.expr(false)?;
        let ctx = self.turnstile()?;
        Ok(Line::TermCon {
            lhs,
            result,
            ctx,
            span,
        })
    }

    fn map(&mut self) -> PResult<MapDecl> {
        let span = self.bump().span;
        let (name, _) = self.ident()?;
        self.expect(&Tok::LParen)?;
        let dom = self.ident()?;
        self.expect(&Tok::Comma)?;
        let codom = self.ident()?;
        self.expect(&Tok::RParen)?;
        self.expect(&Tok::LBrace)?;
        let mut clauses = Vec::new();
        loop {
            self.skip_newlines();
            if self.eat(&Tok::RBrace) {
                break;
            }
            let cspan = self.span();
            let lhs = self.expr(false)?;
            let ctx = self.turnstile()?;
            self.expect(&Tok::FatArrow)?;
            let image = self.expr(false)?;
            clauses.push(MapClause {
                lhs,
                ctx,
                image,
                span: cspan,
            });
            self.end_of_line()?;
        }
        Ok(MapDecl {
            name,
            dom,
            codom,
            clauses,
            span,
        })
    }

    fn turnstile(&mut self) -> PResult<Option<Vec<CtxGroup>>> {
        if self.eat(&Tok::Turnstile) {
            Ok(Some(self.bracket_ctx()?))
        } else {
            Ok(None)
        }
    }

    fn bracket_ctx(&mut self) -> PResult<Vec<CtxGroup>> {
        self.expect(&Tok::LBracket)?;
        let groups = self.ctx_groups(&Tok::RBracket)?;
        self.expect(&Tok::RBracket)?;
        Ok(groups)
    }

    fn ctx_groups(&mut self, close: &Tok) -> PResult<Vec<CtxGroup>> {
        let mut groups = Vec::new();
        if self.at(close) {
            return Ok(groups);
        }
        loop {
            let names = if self.eat(&Tok::LParen) {
                let mut names = vec![self.ident()?];
                while self.eat(&Tok::Comma) {
                    names.push(self.ident()?);
                }
                self.expect(&Tok::RParen)?;
                if !self.at(&Tok::ColonColon) {
                    return Err(self.unexpected("`::` after a group of names"));
                }
                names
            } else {
                vec![self.ident()?]
            };
            let ty = if self.eat(&Tok::ColonColon) {
                Some(self.expr(false)?)
            } else {
                None
            };
            groups.push(CtxGroup { names, ty });
            if !self.eat(&Tok::Comma) {
                break;
            }
        }
        Ok(groups)
    }

    /// Binary operators chain left-associatively, all at one precedence.
    /// With `ascribe`, operands may carry a `::T` annotation (used inside
    /// parenthesized declaration heads such as `(x::ℕ + y::ℕ)`).
    fn expr(&mut self, ascribe: bool) -> PResult<Expr> {
        let mut lhs = self.operand(ascribe)?;
        while let Tok::Op(op) = self.peek().clone() {
            let span = self.bump().span;
            let rhs = self.operand(ascribe)?;
            lhs = Expr::BinOp(op, Box::new(lhs), Box::new(rhs), span);
        }
        Ok(lhs)
    }

    fn operand(&mut self, ascribe: bool) -> PResult<Expr> {
        let a = self.atom()?;
        if ascribe && self.at(&Tok::ColonColon) {
            let span = self.bump().span;
            let ty = self.atom()?;
            return Ok(Expr::Ascribed(Box::new(a), Box::new(ty), span));
        }
        Ok(a)
    }

    fn atom(&mut self) -> PResult<Expr> {
        let span = self.span();
        match self.peek().clone() {
            Tok::Ident(name) => {
                self.bump();
                if self.eat(&Tok::LParen) {
                    let mut args = Vec::new();
                    if !self.at(&Tok::RParen) {
                        loop {
                            let arg = self.expr(false)?;
                            let arg = if self.at(&Tok::ColonColon) {
                                let sp = self.bump().span;
                                let ty = self.expr(false)?;
                                Expr::Ascribed(Box::new(arg), Box::new(ty), sp)
                            } else {
                                arg
                            };
                            args.push(arg);
                            if !self.eat(&Tok::Comma) {
                                break;
                            }
                        }
                    }
                    self.expect(&Tok::RParen)?;
                    Ok(Expr::Call(name, args, span))
                } else {
                    Ok(Expr::Name(name, span))
                }
            }
            Tok::LParen => {
                self.bump();
                let e = self.expr(true)?;
                self.expect(&Tok::RParen)?;
                Ok(e)
            }
            _ => Err(self.unexpected("a term")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn name(s: &str) -> Expr {
        Expr::Name(s.into(), Span::default())
    }

    fn strip(e: &Expr) -> Expr {
        let sp = Span::default();
        match e {
            Expr::Name(n, _) => Expr::Name(n.clone(), sp),
            Expr::Call(f, a, _) => Expr::Call(f.clone(), a.iter().map(strip).collect(), sp),
            Expr::BinOp(o, l, r, _) => Expr::BinOp(o.clone(), Box::new(strip(l)), Box::new(strip(r)), sp),
            Expr::Ascribed(x, t, _) => Expr::Ascribed(Box::new(strip(x)), Box::new(strip(t)), sp),
        }
    }

    #[test]
    fn operators_are_left_associative() {
        let (e, ctx) = parse_term_ast("e()⋅x⋅e() ⊣ [x]").unwrap();
        let e0 = Expr::Call("e".into(), vec![], Span::default());
        let expected = Expr::BinOp(
            "⋅".into(),
            Box::new(Expr::BinOp("⋅".into(), Box::new(e0.clone()), Box::new(name("x")), Span::default())),
            Box::new(e0),
            Span::default(),
        );
        assert_eq!(strip(&e), expected);
        assert_eq!(ctx.unwrap().len(), 1);
    }

    #[test]
    fn category_head_lines() {
        let src = "theory T {\n  Hom(dom::Ob, codom::Ob)::TYPE\n  compose(f::(a → b), g::(b → c))::(a → c) ⊣\n    [(a,b,c)::Ob]\n  assoc := ((f⋅g)⋅h) == (f⋅(g⋅h)) ⊣ [f]\n}";
        let decls = parse_file(src).unwrap();
        let Decl::Theory(t) = &decls[0] else { panic!() };
        assert_eq!(t.lines.len(), 3);
        assert!(matches!(&t.lines[0], Line::TypeCon { name, args: Some(a), .. } if name == "Hom" && a.len() == 2));
        let Line::TermCon { ctx: Some(ctx), .. } = &t.lines[1] else { panic!() };
        assert_eq!(ctx[0].names.len(), 3);
        assert!(matches!(&t.lines[2], Line::Axiom { name: Some(n), .. } if n == "assoc"));
    }

    #[test]
    fn ascribed_operands_in_parens() {
        let decls = parse_file("theory A { (x::ℕ + y::ℕ) :: ℕ ⊣ [(x, y)::ℕ] }").unwrap();
        let Decl::Theory(t) = &decls[0] else { panic!() };
        let Line::TermCon { lhs, .. } = &t.lines[0] else { panic!() };
        let Expr::BinOp(op, l, _, _) = lhs else { panic!() };
        assert_eq!(op, "+");
        assert!(matches!(**l, Expr::Ascribed(..)));
    }

    #[test]
    fn map_clauses() {
        let src = "map PlusM(ThMonoid, ThArith) {\n default => ℕ\n x⋅y ⊣ [x, y] => x+y\n e() => Z()\n}";
        let decls = parse_file(src).unwrap();
        let Decl::Map(m) = &decls[0] else { panic!() };
        assert_eq!(m.clauses.len(), 3);
        assert!(m.clauses[1].ctx.is_some());
    }

    #[test]
    fn keywords_are_contextual() {
        let decls = parse_file("theory K { using ThSet\n alias ≤ = Leq\n normalize ⋅ assoc unit e\n segment { x::TYPE } }").unwrap();
        let Decl::Theory(t) = &decls[0] else { panic!() };
        assert!(matches!(t.lines[0], Line::Using { .. }));
        assert!(matches!(t.lines[1], Line::Alias { .. }));
        assert!(matches!(t.lines[2], Line::Normalize { assoc: true, .. }));
        assert!(matches!(t.lines[3], Line::Segment { .. }));
    }

    #[test]
    fn errors_carry_positions() {
        let err = parse_file("theory T {\n  Ob :: \n}").unwrap_err();
        assert_eq!(err.span.line, 3);
        let err = parse_file("theory T {\n  f(x :: Ob\n}").unwrap_err();
        assert!(err.span.line >= 2);
    }
}
