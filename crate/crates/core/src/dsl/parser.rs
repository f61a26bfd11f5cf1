use super::lexer::{tokenize, Token, TokenKind};
use super::{BinOp, Expr, ExprKind, ParseError, Span};
use crate::structure::ChartDim;

/// Maximum tree depth, and maximum nesting of parentheses/unary minus.
pub const MAX_DEPTH: usize = 256;

struct Parser<'a> {
    tokens: &'a [Token],
    pos: usize,
    src_len: usize,
    dim: ChartDim,
    nesting: usize,
}

/// Parses `src` into an expression over the variables of `dim`.
pub fn parse(src: &str, dim: ChartDim) -> Result<Expr, ParseError> {
    let tokens = tokenize(src)?;
    let mut p = Parser {
        tokens: &tokens,
        pos: 0,
        src_len: src.len(),
        dim,
        nesting: 0,
    };
    let expr = p.expr()?;
    if let Some(t) = p.peek() {
        let msg = match t.kind {
            TokenKind::Variable(_) | TokenKind::Func(_) | TokenKind::LParen
                if matches!(
                    p.tokens[p.pos - 1].kind,
                    TokenKind::Number(_) | TokenKind::Variable(_) | TokenKind::RParen
                ) =>
            {
                format!(
                    "unexpected {} (implicit multiplication is not supported)",
                    t.kind.describe()
                )
            }
            _ => format!("unexpected trailing {}", t.kind.describe()),
        };
        return Err(ParseError::new(msg, t.span).expecting(&["operator", "end of input"]));
    }
    Ok(expr)
}

impl Parser<'_> {
    fn peek(&self) -> Option<Token> {
        self.tokens.get(self.pos).copied()
    }

    fn end_span(&self) -> Span {
        Span::new(self.src_len, self.src_len)
    }

    fn bump(&mut self) -> Option<Token> {
        let t = self.peek();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn node(&self, kind: ExprKind, span: Span) -> Result<Expr, ParseError> {
        let e = Expr::new(kind, span);
        if e.depth() > MAX_DEPTH {
            return Err(ParseError::new(
                format!("expression nests deeper than {MAX_DEPTH} levels"),
                span,
            ));
        }
        Ok(e)
    }

    fn enter(&mut self, span: Span) -> Result<(), ParseError> {
        self.nesting += 1;
        if self.nesting > MAX_DEPTH {
            return Err(ParseError::new(
                format!("expression nests deeper than {MAX_DEPTH} levels"),
                span,
            ));
        }
        Ok(())
    }

    fn binary(&self, op: BinOp, lhs: Expr, rhs: Expr) -> Result<Expr, ParseError> {
        let span = lhs.span.join(rhs.span);
        self.node(ExprKind::Binary(op, Box::new(lhs), Box::new(rhs)), span)
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek().map(|t| t.kind) {
                Some(TokenKind::Plus) => BinOp::Add,
                Some(TokenKind::Minus) => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.term()?;
            lhs = self.binary(op, lhs, rhs)?;
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.factor()?;
        loop {
            let op = match self.peek().map(|t| t.kind) {
                Some(TokenKind::Star) => BinOp::Mul,
                Some(TokenKind::Slash) => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.factor()?;
            lhs = self.binary(op, lhs, rhs)?;
        }
    }

    fn factor(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        if let Some(Token {
            kind: TokenKind::Caret,
            span,
        }) = self.peek()
        {
            self.bump();
            self.enter(span)?;
            let exponent = self.factor()?;
            self.nesting -= 1;
            return self.binary(BinOp::Pow, base, exponent);
        }
        Ok(base)
    }

    fn expect_rparen(&mut self, open: Span) -> Result<Span, ParseError> {
        match self.bump() {
            Some(Token {
                kind: TokenKind::RParen,
                span,
            }) => Ok(span),
            Some(t) => Err(ParseError::new(
                format!("unexpected {}; unbalanced '(' at {}", t.kind.describe(), open.start),
                t.span,
            )
            .expecting(&["')'"])),
            None => {
                Err(ParseError::new(format!("unbalanced '(' at {}", open.start), self.end_span()).expecting(&["')'"]))
            }
        }
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        const ATOM: &[&str] = &["number", "variable", "function", "'('", "'-'"];
        let Some(tok) = self.bump() else {
            return Err(ParseError::new("unexpected end of input", self.end_span()).expecting(ATOM));
        };
        match tok.kind {
            TokenKind::Number(v) => self.node(ExprKind::Const(v), tok.span),
            TokenKind::Variable(i) => {
                if i >= self.dim.total() {
                    return Err(ParseError::new(
                        format!("variable x{i} out of range (chart has x0..x{})", self.dim.total() - 1),
                        tok.span,
                    ));
                }
                self.node(ExprKind::Var(i), tok.span)
            }
            TokenKind::Minus => {
                self.enter(tok.span)?;
                let inner = self.atom()?;
                self.nesting -= 1;
                let span = tok.span.join(inner.span);
                self.node(ExprKind::Neg(Box::new(inner)), span)
            }
            TokenKind::LParen => {
                self.enter(tok.span)?;
                let inner = self.expr()?;
                self.expect_rparen(tok.span)?;
                self.nesting -= 1;
                Ok(inner)
            }
            TokenKind::Func(func) => {
                let open = match self.bump() {
                    Some(Token {
                        kind: TokenKind::LParen,
                        span,
                    }) => span,
                    other => {
                        let span = other.map(|t| t.span).unwrap_or_else(|| self.end_span());
                        return Err(
                            ParseError::new(format!("function {} must be followed by '('", func.name()), span)
                                .expecting(&["'('"]),
                        );
                    }
                };
                self.enter(open)?;
                let arg = self.expr()?;
                let close = self.expect_rparen(open)?;
                self.nesting -= 1;
                self.node(ExprKind::Call(func, Box::new(arg)), tok.span.join(close))
            }
            TokenKind::RParen => Err(ParseError::new("unbalanced ')'", tok.span).expecting(ATOM)),
            other => Err(ParseError::new(format!("unexpected {}", other.describe()), tok.span).expecting(ATOM)),
        }
    }
}
