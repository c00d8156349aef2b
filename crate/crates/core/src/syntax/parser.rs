//! Recursive descent parser for CSX.
//!
//! ```text
//! spec      = { typedef | actiondef | devicedef | scenario } ;
//! typedef   = "type" IDENT "{" { IDENT ":" typeref | derived | constraint } "}" ;
//! actiondef = "action" IDENT "(" [ IDENT ":" IDENT { "," IDENT ":" IDENT } ] ")"
//!             "{" { "parameter" IDENT ":" prim | derived | constraint } "}" ;
//! devicedef = "device" IDENT "{" { location | component | derived | constraint } "}" ;
//! location  = "location" IDENT ":" IDENT ;
//! component = "component" IDENT "=" IDENT "(" [ IDENT { "," IDENT } ] ")"
//!             [ "{" { constraint } "}" ] ;
//! scenario  = "scenario" IDENT "for" IDENT "{" { path "=" literal | constraint
//!             | "objective" ( "minimize" | "maximize" ) expr | "expect" constraint } "}" ;
//! derived   = "derived" IDENT "=" expr ;
//! constraint= "[" expr "]" ;
//! typeref   = "int" | "bool" | IDENT ;   prim = "int" | "bool" ;
//! path      = IDENT { "." IDENT } ;      literal = [ "-" ] INT | "true" | "false" ;
//! expr      = or [ "implies" expr ] ;
//! or        = and { "or" and } ;          and = cmp { "and" cmp } ;
//! cmp       = sum [ ( "==" | "!=" | "<" | "<=" | ">" | ">=" ) sum ] ;
//! sum       = term { ( "+" | "-" ) term } ; term = unary { "*" unary } ;
//! unary     = "-" unary | "not" unary | postfix ;
//! postfix   = atom { "." IDENT } ;
//! atom      = INT | "true" | "false" | IDENT | "self" | "(" expr ")" ;
//! ```

use std::fmt;

use thiserror::Error;

use super::ast::*;
use super::lexer::{tokenize, Token, TokenKind};
use super::source::{FileId, Span};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{message}")]
pub struct ParseError {
    pub message: String,
    pub span: Span,
    /// Tokens that would have been accepted at the error position.
    pub expected: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub struct ParseErrors(pub Vec<ParseError>);

impl fmt::Display for ParseErrors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{}", e.message)?;
        }
        Ok(())
    }
}

type PResult<T> = Result<T, ParseError>;

/// Parses a whole specification file.
pub fn parse(text: &str) -> Result<Spec, ParseErrors> {
    parse_file(FileId(0), text)
}

pub fn parse_file(file: FileId, text: &str) -> Result<Spec, ParseErrors> {
    let mut p = Parser::new(file, text).map_err(|e| ParseErrors(vec![e]))?;
    p.spec().map_err(|e| ParseErrors(vec![e]))
}

/// Parses a single expression, e.g. a job constraint or a hover query.
pub fn parse_expr(text: &str) -> Result<Expr, ParseErrors> {
    let run = || -> PResult<Expr> {
        let mut p = Parser::new(FileId(0), text)?;
        let e = p.expr()?;
        p.expect(TokenKind::Eof)?;
        Ok(e)
    };
    run().map_err(|e| ParseErrors(vec![e]))
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn new(file: FileId, text: &str) -> PResult<Self> {
        let tokens = tokenize(file, text).map_err(|e| ParseError {
            message: e.message,
            span: e.span,
            expected: Vec::new(),
        })?;
        Ok(Parser { tokens, pos: 0 })
    }

    fn peek(&self) -> &TokenKind {
        &self.tokens[self.pos].kind
    }

    fn peek_at(&self, n: usize) -> &TokenKind {
        let i = (self.pos + n).min(self.tokens.len() - 1);
        &self.tokens[i].kind
    }

    fn span(&self) -> Span {
        self.tokens[self.pos].span
    }

    fn prev_span(&self) -> Span {
        self.tokens[self.pos.saturating_sub(1)].span
    }

    fn bump(&mut self) -> Token {
        let t = self.tokens[self.pos].clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn at(&self, kind: &TokenKind) -> bool {
        self.peek() == kind
    }

    fn at_kw(&self, kw: &str) -> bool {
        matches!(self.peek(), TokenKind::Keyword(k) if *k == kw)
    }

    fn eat(&mut self, kind: &TokenKind) -> bool {
        if self.at(kind) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn eat_kw(&mut self, kw: &str) -> bool {
        if self.at_kw(kw) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn error<T>(&self, expected: &[&str]) -> PResult<T> {
        let found = self.peek();
        let expected: Vec<String> = expected.iter().map(|s| s.to_string()).collect();
        let message = if expected.len() == 1 {
            format!("expected `{}`, found {}", expected[0], found)
        } else {
            format!(
                "expected one of {}, found {}",
                expected
                    .iter()
                    .map(|e| format!("`{e}`"))
                    .collect::<Vec<_>>()
                    .join(", "),
                found
            )
        };
        Err(ParseError {
            message,
            span: self.span(),
            expected,
        })
    }

    fn expect(&mut self, kind: TokenKind) -> PResult<Span> {
        if self.at(&kind) {
            Ok(self.bump().span)
        } else {
            self.error(&[&kind.describe()])
        }
    }

    fn expect_kw(&mut self, kw: &str) -> PResult<Span> {
        if self.at_kw(kw) {
            Ok(self.bump().span)
        } else {
            self.error(&[kw])
        }
    }

    fn ident(&mut self) -> PResult<(Ident, Span)> {
        match self.peek().clone() {
            TokenKind::Ident(name) => {
                let span = self.bump().span;
                let ident = Ident::new(name).map_err(|e| ParseError {
                    message: e.to_string(),
                    span,
                    expected: Vec::new(),
                })?;
                Ok((ident, span))
            }
            TokenKind::Keyword(k) => Err(ParseError {
                message: format!("`{k}` is a reserved word and cannot be used as a name"),
                span: self.span(),
                expected: vec!["identifier".into()],
            }),
            _ => self.error(&["identifier"]),
        }
    }

    fn spec(&mut self) -> PResult<Spec> {
        let mut spec = Spec::default();
        loop {
            match self.peek() {
                TokenKind::Eof => return Ok(spec),
                TokenKind::Keyword("type") => spec.types.push(self.type_def()?),
                TokenKind::Keyword("action") => spec.actions.push(self.action_def()?),
                TokenKind::Keyword("device") => spec.devices.push(self.device_def()?),
                TokenKind::Keyword("scenario") => spec.scenarios.push(self.scenario_def()?),
                _ => return self.error(&["type", "action", "device", "scenario"]),
            }
        }
    }

    fn constraint(&mut self) -> PResult<Expr> {
        self.expect(TokenKind::LBracket)?;
        let e = self.expr()?;
        self.expect(TokenKind::RBracket)?;
        Ok(e)
    }

    fn derived(&mut self) -> PResult<DerivedDef> {
        let start = self.expect_kw("derived")?;
        let (name, _) = self.ident()?;
        self.expect(TokenKind::Assign)?;
        let body = self.expr()?;
        Ok(DerivedDef {
            name,
            span: start.to(body.span),
            body,
        })
    }

    fn prim_type(&mut self) -> PResult<PrimType> {
        if self.eat_kw("int") {
            Ok(PrimType::Int)
        } else if self.eat_kw("bool") {
            Ok(PrimType::Bool)
        } else {
            self.error(&["int", "bool"])
        }
    }

    fn type_def(&mut self) -> PResult<TypeDef> {
        let start = self.expect_kw("type")?;
        let (name, _) = self.ident()?;
        self.expect(TokenKind::LBrace)?;
        let (mut props, mut derived, mut constraints) = (Vec::new(), Vec::new(), Vec::new());
        loop {
            match self.peek() {
                TokenKind::RBrace => break,
                TokenKind::Ident(_) => {
                    let (pname, pspan) = self.ident()?;
                    self.expect(TokenKind::Colon)?;
                    let ty = match self.peek() {
                        TokenKind::Keyword("int") | TokenKind::Keyword("bool") => {
                            TypeRef::Prim(self.prim_type()?)
                        }
                        TokenKind::Ident(_) => TypeRef::Named(self.ident()?.0),
                        _ => return self.error(&["int", "bool", "identifier"]),
                    };
                    props.push(PropDecl {
                        name: pname,
                        ty,
                        span: pspan.to(self.prev_span()),
                    });
                }
                TokenKind::Keyword("derived") => derived.push(self.derived()?),
                TokenKind::LBracket => constraints.push(self.constraint()?),
                _ => return self.error(&["identifier", "derived", "[", "}"]),
            }
        }
        let end = self.expect(TokenKind::RBrace)?;
        Ok(TypeDef {
            name,
            props,
            derived,
            constraints,
            span: start.to(end),
        })
    }

    fn action_def(&mut self) -> PResult<ActionDef> {
        let start = self.expect_kw("action")?;
        let (name, _) = self.ident()?;
        self.expect(TokenKind::LParen)?;
        let mut loc_params = Vec::new();
        if !self.at(&TokenKind::RParen) {
            loop {
                let (lname, lspan) = self.ident()?;
                self.expect(TokenKind::Colon)?;
                let (ty, tspan) = self.ident()?;
                loc_params.push(LocParam {
                    name: lname,
                    ty,
                    span: lspan.to(tspan),
                });
                if !self.eat(&TokenKind::Comma) {
                    break;
                }
            }
        }
        self.expect(TokenKind::RParen)?;
        self.expect(TokenKind::LBrace)?;
        let (mut params, mut derived, mut constraints) = (Vec::new(), Vec::new(), Vec::new());
        loop {
            match self.peek() {
                TokenKind::RBrace => break,
                TokenKind::Keyword("parameter") => {
                    let pstart = self.bump().span;
                    let (pname, _) = self.ident()?;
                    self.expect(TokenKind::Colon)?;
                    let ty = self.prim_type()?;
                    params.push(ParamDecl {
                        name: pname,
                        ty,
                        span: pstart.to(self.prev_span()),
                    });
                }
                TokenKind::Keyword("derived") => derived.push(self.derived()?),
                TokenKind::LBracket => constraints.push(self.constraint()?),
                _ => return self.error(&["parameter", "derived", "[", "}"]),
            }
        }
        let end = self.expect(TokenKind::RBrace)?;
        Ok(ActionDef {
            name,
            loc_params,
            params,
            derived,
            constraints,
            span: start.to(end),
        })
    }

    fn device_def(&mut self) -> PResult<DeviceDef> {
        let start = self.expect_kw("device")?;
        let (name, _) = self.ident()?;
        self.expect(TokenKind::LBrace)?;
        let mut dev = DeviceDef {
            name,
            locations: Vec::new(),
            components: Vec::new(),
            derived: Vec::new(),
            constraints: Vec::new(),
            span: start,
        };
        loop {
            match self.peek() {
                TokenKind::RBrace => break,
                TokenKind::Keyword("location") => {
                    let lstart = self.bump().span;
                    let (lname, _) = self.ident()?;
                    self.expect(TokenKind::Colon)?;
                    let (ty, tspan) = self.ident()?;
                    dev.locations.push(LocationDecl {
                        name: lname,
                        ty,
                        span: lstart.to(tspan),
                    });
                }
                TokenKind::Keyword("component") => dev.components.push(self.component()?),
                TokenKind::Keyword("derived") => dev.derived.push(self.derived()?),
                TokenKind::LBracket => dev.constraints.push(self.constraint()?),
                _ => return self.error(&["location", "component", "derived", "[", "}"]),
            }
        }
        let end = self.expect(TokenKind::RBrace)?;
        dev.span = start.to(end);
        Ok(dev)
    }

    fn component(&mut self) -> PResult<ComponentDef> {
        let start = self.expect_kw("component")?;
        let (name, _) = self.ident()?;
        self.expect(TokenKind::Assign)?;
        let (action, _) = self.ident()?;
        self.expect(TokenKind::LParen)?;
        let mut loc_args = Vec::new();
        if !self.at(&TokenKind::RParen) {
            loop {
                loc_args.push(self.ident()?.0);
                if !self.eat(&TokenKind::Comma) {
                    break;
                }
            }
        }
        let mut end = self.expect(TokenKind::RParen)?;
        let mut constraints = Vec::new();
        if self.eat(&TokenKind::LBrace) {
            while self.at(&TokenKind::LBracket) {
                constraints.push(self.constraint()?);
            }
            if !self.at(&TokenKind::RBrace) {
                return self.error(&["[", "}"]);
            }
            end = self.expect(TokenKind::RBrace)?;
        }
        Ok(ComponentDef {
            name,
            action,
            loc_args,
            constraints,
            span: start.to(end),
        })
    }

    fn literal(&mut self) -> PResult<Literal> {
        if self.eat_kw("true") {
            return Ok(Literal::Bool(true));
        }
        if self.eat_kw("false") {
            return Ok(Literal::Bool(false));
        }
        let negative = self.eat(&TokenKind::Minus);
        match *self.peek() {
            TokenKind::Int(m) => {
                let span = self.bump().span;
                int_value(m, negative, span).map(Literal::Int)
            }
            _ => self.error(&["integer", "true", "false"]),
        }
    }

    fn path(&mut self) -> PResult<(Path, Span)> {
        let (first, start) = self.ident()?;
        let mut parts = vec![first];
        let mut end = start;
        while self.eat(&TokenKind::Dot) {
            let (p, s) = self.ident()?;
            parts.push(p);
            end = s;
        }
        Ok((Path(parts), start.to(end)))
    }

    fn scenario_def(&mut self) -> PResult<ScenarioDef> {
        let start = self.expect_kw("scenario")?;
        let (name, _) = self.ident()?;
        self.expect_kw("for")?;
        let (device, _) = self.ident()?;
        self.expect(TokenKind::LBrace)?;
        let mut sc = ScenarioDef {
            name,
            device,
            bindings: Vec::new(),
            constraints: Vec::new(),
            objective: None,
            expectations: Vec::new(),
            tests: Vec::new(),
            span: start,
        };
        loop {
            match self.peek() {
                TokenKind::RBrace => break,
                TokenKind::Ident(_) => {
                    let (path, pspan) = self.path()?;
                    self.expect(TokenKind::Assign)?;
                    let value = self.literal()?;
                    sc.bindings.push(Binding {
                        path,
                        value,
                        span: pspan.to(self.prev_span()),
                    });
                }
                TokenKind::LBracket => sc.constraints.push(self.constraint()?),
                TokenKind::Keyword("expect") => {
                    self.bump();
                    sc.expectations.push(self.constraint()?);
                }
                TokenKind::Keyword("objective") => {
                    let ostart = self.bump().span;
                    if sc.objective.is_some() {
                        return Err(ParseError {
                            message: "a scenario has at most one objective".into(),
                            span: ostart,
                            expected: Vec::new(),
                        });
                    }
                    let sense = if self.eat_kw("minimize") {
                        Sense::Minimize
                    } else if self.eat_kw("maximize") {
                        Sense::Maximize
                    } else {
                        return self.error(&["minimize", "maximize"]);
                    };
                    let expr = self.expr()?;
                    sc.objective = Some(Objective {
                        sense,
                        span: ostart.to(expr.span),
                        expr,
                    });
                }
                _ => return self.error(&["identifier", "[", "expect", "objective", "}"]),
            }
        }
        let end = self.expect(TokenKind::RBrace)?;
        sc.span = start.to(end);
        Ok(sc)
    }

    fn expr(&mut self) -> PResult<Expr> {
        let lhs = self.or_expr()?;
        if self.eat_kw("implies") {
            let rhs = self.expr()?;
            let span = lhs.span.to(rhs.span);
            return Ok(Expr::new(
                ExprKind::Binary(BinaryOp::Implies, Box::new(lhs), Box::new(rhs)),
                span,
            ));
        }
        Ok(lhs)
    }

    fn left_assoc(
        &mut self,
        next: fn(&mut Self) -> PResult<Expr>,
        op_at: fn(&TokenKind) -> Option<BinaryOp>,
    ) -> PResult<Expr> {
        let mut lhs = next(self)?;
        while let Some(op) = op_at(self.peek()) {
            self.bump();
            let rhs = next(self)?;
            let span = lhs.span.to(rhs.span);
            lhs = Expr::new(ExprKind::Binary(op, Box::new(lhs), Box::new(rhs)), span);
        }
        Ok(lhs)
    }

    fn or_expr(&mut self) -> PResult<Expr> {
        self.left_assoc(Self::and_expr, |t| {
            matches!(t, TokenKind::Keyword("or")).then_some(BinaryOp::Or)
        })
    }

    fn and_expr(&mut self) -> PResult<Expr> {
        self.left_assoc(Self::cmp_expr, |t| {
            matches!(t, TokenKind::Keyword("and")).then_some(BinaryOp::And)
        })
    }

    fn cmp_expr(&mut self) -> PResult<Expr> {
        let lhs = self.sum_expr()?;
        let op = match self.peek() {
            TokenKind::EqEq => BinaryOp::Eq,
            TokenKind::NotEq => BinaryOp::Ne,
            TokenKind::Lt => BinaryOp::Lt,
            TokenKind::Le => BinaryOp::Le,
            TokenKind::Gt => BinaryOp::Gt,
            TokenKind::Ge => BinaryOp::Ge,
            _ => return Ok(lhs),
        };
        self.bump();
        let rhs = self.sum_expr()?;
        if matches!(
            self.peek(),
            TokenKind::EqEq
                | TokenKind::NotEq
                | TokenKind::Lt
                | TokenKind::Le
                | TokenKind::Gt
                | TokenKind::Ge
        ) {
            return Err(ParseError {
                message: "comparison operators cannot be chained; add parentheses".into(),
                span: self.span(),
                expected: Vec::new(),
            });
        }
        let span = lhs.span.to(rhs.span);
        Ok(Expr::new(
            ExprKind::Binary(op, Box::new(lhs), Box::new(rhs)),
            span,
        ))
    }

    fn sum_expr(&mut self) -> PResult<Expr> {
        self.left_assoc(Self::term_expr, |t| match t {
            TokenKind::Plus => Some(BinaryOp::Add),
            TokenKind::Minus => Some(BinaryOp::Sub),
            _ => None,
        })
    }

    fn term_expr(&mut self) -> PResult<Expr> {
        self.left_assoc(Self::unary_expr, |t| {
            matches!(t, TokenKind::Star).then_some(BinaryOp::Mul)
        })
    }

    fn unary_expr(&mut self) -> PResult<Expr> {
        if self.at(&TokenKind::Minus) {
            if let TokenKind::Int(m) = *self.peek_at(1) {
                // `-5` is a literal, not a negation
                let start = self.bump().span;
                let end = self.bump().span;
                let span = start.to(end);
                let atom = Expr::new(ExprKind::Int(int_value(m, true, span)?), span);
                return self.postfix(atom);
            }
            let start = self.bump().span;
            let operand = self.unary_expr()?;
            let span = start.to(operand.span);
            return Ok(Expr::new(
                ExprKind::Unary(UnaryOp::Neg, Box::new(operand)),
                span,
            ));
        }
        if self.at_kw("not") {
            let start = self.bump().span;
            let operand = self.unary_expr()?;
            let span = start.to(operand.span);
            return Ok(Expr::new(
                ExprKind::Unary(UnaryOp::Not, Box::new(operand)),
                span,
            ));
        }
        let atom = self.atom()?;
        self.postfix(atom)
    }

    fn postfix(&mut self, mut e: Expr) -> PResult<Expr> {
        while self.eat(&TokenKind::Dot) {
            let (field, fspan) = self.ident()?;
            let span = e.span.to(fspan);
            e = Expr::new(ExprKind::Proj(Box::new(e), field), span);
        }
        Ok(e)
    }

    fn atom(&mut self) -> PResult<Expr> {
        match self.peek().clone() {
            TokenKind::Int(m) => {
                let span = self.bump().span;
                Ok(Expr::new(ExprKind::Int(int_value(m, false, span)?), span))
            }
            TokenKind::Keyword("true") => Ok(Expr::new(ExprKind::Bool(true), self.bump().span)),
            TokenKind::Keyword("false") => Ok(Expr::new(ExprKind::Bool(false), self.bump().span)),
            TokenKind::Keyword("self") => Ok(Expr::new(
                ExprKind::Ref(Ident::reserved("self")),
                self.bump().span,
            )),
            TokenKind::Ident(_) => {
                let (id, span) = self.ident()?;
                Ok(Expr::new(ExprKind::Ref(id), span))
            }
            TokenKind::LParen => {
                let start = self.bump().span;
                let mut inner = self.expr()?;
                let end = self.expect(TokenKind::RParen)?;
                inner.span = start.to(end);
                Ok(inner)
            }
            _ => self.error(&["integer", "true", "false", "identifier", "(", "-", "not"]),
        }
    }
}

fn int_value(magnitude: u64, negative: bool, span: Span) -> PResult<i64> {
    let v = if negative {
        -(magnitude as i128)
    } else {
        magnitude as i128
    };
    i64::try_from(v).map_err(|_| ParseError {
        message: format!("integer literal {v} is out of range"),
        span,
        expected: Vec::new(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_uninhabited_type() {
        let spec = parse("type T { i: int [i != i] }").unwrap();
        assert_eq!(spec.types.len(), 1);
        let t = &spec.types[0];
        assert_eq!(t.name.as_str(), "T");
        assert_eq!(t.props[0].name.as_str(), "i");
        assert_eq!(t.props[0].ty, TypeRef::Prim(PrimType::Int));
        assert!(t.derived.is_empty());
        let expected = Expr::binary(BinaryOp::Ne, Expr::var("i"), Expr::var("i"));
        let mut got = t.constraints[0].clone();
        got.erase_spans();
        assert_eq!(got, expected);
    }

    #[test]
    fn empty_input_is_empty_spec() {
        assert!(parse("").unwrap().is_empty());
        assert!(parse("  // only a comment\n").unwrap().is_empty());
    }

    #[test]
    fn unclosed_brace_reports_end_of_input() {
        let text = "type T { i: int";
        let errs = parse(text).unwrap_err();
        let e = &errs.0[0];
        assert_eq!(e.span.start as usize, text.len());
        assert!(e.expected.iter().any(|x| x == "}"));
    }

    #[test]
    fn precedence_and_associativity() {
        let e = parse_expr("a + b * c == d implies x or y and z implies w").unwrap();
        let ExprKind::Binary(BinaryOp::Implies, lhs, rhs) = &e.kind else {
            panic!("expected implies at the root: {e:?}")
        };
        assert!(matches!(lhs.kind, ExprKind::Binary(BinaryOp::Eq, _, _)));
        assert!(matches!(
            rhs.kind,
            ExprKind::Binary(BinaryOp::Implies, _, _)
        ));
        let e = parse_expr("a - b - c").unwrap();
        let ExprKind::Binary(BinaryOp::Sub, lhs, _) = &e.kind else {
            panic!()
        };
        assert!(matches!(lhs.kind, ExprKind::Binary(BinaryOp::Sub, _, _)));
    }

    #[test]
    fn negative_literals_fold() {
        assert_eq!(parse_expr("-5").unwrap().kind, ExprKind::Int(-5));
        assert_eq!(
            parse_expr("-9223372036854775808").unwrap().kind,
            ExprKind::Int(i64::MIN)
        );
        assert!(parse_expr("9223372036854775808").is_err());
        assert!(matches!(
            parse_expr("-(5)").unwrap().kind,
            ExprKind::Unary(UnaryOp::Neg, _)
        ));
    }

    #[test]
    fn chained_comparison_is_rejected() {
        assert!(parse_expr("a < b < c").is_err());
    }

    #[test]
    fn parses_device_and_scenario() {
        let src = "
            device D {
              location a: Sheet
              location b: Sheet
              component c = Trim(a, b) { [t <= 5] }
              component d = Noop()
              derived total = a.w + b.w
              [a.w == b.w]
            }
            scenario S for D {
              a.w = 10
              c.t = -2
              [b.h > 0]
              objective minimize a.w
              expect [b.w == 8]
            }";
        let spec = parse(src).unwrap();
        let d = &spec.devices[0];
        assert_eq!(d.locations.len(), 2);
        assert_eq!(d.components[0].loc_args.len(), 2);
        assert_eq!(d.components[0].constraints.len(), 1);
        assert!(d.components[1].loc_args.is_empty());
        let s = &spec.scenarios[0];
        assert_eq!(s.bindings[1].value, Literal::Int(-2));
        assert_eq!(s.objective.as_ref().unwrap().sense, Sense::Minimize);
        assert_eq!(s.expectations.len(), 1);
        assert_eq!(s.constraints.len(), 1);
    }

    #[test]
    fn second_objective_is_an_error() {
        let src = "scenario S for D { objective minimize x objective maximize y }";
        assert!(parse(src).is_err());
    }

    #[test]
    fn reserved_words_cannot_name_things() {
        assert!(parse("type inhab { }").is_err());
        assert!(parse("type T { self: int }").is_err());
    }
}
