use std::fmt;

use super::Span;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinOp {
    fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::Pow => "^",
        }
    }

    fn precedence(self) -> u8 {
        match self {
            BinOp::Add | BinOp::Sub => 1,
            BinOp::Mul | BinOp::Div => 2,
            BinOp::Pow => 3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Exp,
    Sqrt,
    Abs,
}

impl Func {
    pub fn from_name(name: &str) -> Option<Func> {
        match name {
            "sin" => Some(Func::Sin),
            "cos" => Some(Func::Cos),
            "exp" => Some(Func::Exp),
            "sqrt" => Some(Func::Sqrt),
            "abs" => Some(Func::Abs),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
            Func::Sqrt => "sqrt",
            Func::Abs => "abs",
        }
    }
}

#[derive(Debug, Clone)]
pub enum ExprKind {
    Const(f64),
    Var(usize),
    Neg(Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
}

/// Expression tree node. `span` points back into the parsed source.
#[derive(Debug, Clone)]
pub struct Expr {
    pub kind: ExprKind,
    pub span: Span,
    depth: usize,
}

impl Expr {
    pub fn new(kind: ExprKind, span: Span) -> Self {
        let depth = 1 + match &kind {
            ExprKind::Const(_) | ExprKind::Var(_) => 0,
            ExprKind::Neg(e) | ExprKind::Call(_, e) => e.depth,
            ExprKind::Binary(_, l, r) => l.depth.max(r.depth),
        };
        Expr { kind, span, depth }
    }

    /// Number of nodes on the longest root-to-leaf path.
    pub fn depth(&self) -> usize {
        self.depth
    }

    /// Same tree shape, operators, constants and variables; spans ignored.
    pub fn same_structure(&self, other: &Expr) -> bool {
        match (&self.kind, &other.kind) {
            (ExprKind::Const(a), ExprKind::Const(b)) => a.to_bits() == b.to_bits(),
            (ExprKind::Var(a), ExprKind::Var(b)) => a == b,
            (ExprKind::Neg(a), ExprKind::Neg(b)) => a.same_structure(b),
            (ExprKind::Binary(o1, l1, r1), ExprKind::Binary(o2, l2, r2)) => {
                o1 == o2 && l1.same_structure(l2) && r1.same_structure(r2)
            }
            (ExprKind::Call(f1, a), ExprKind::Call(f2, b)) => f1 == f2 && a.same_structure(b),
            _ => false,
        }
    }

    /// True when no variable occurs in the subtree.
    pub fn is_constant(&self) -> bool {
        match &self.kind {
            ExprKind::Const(_) => true,
            ExprKind::Var(_) => false,
            ExprKind::Neg(e) | ExprKind::Call(_, e) => e.is_constant(),
            ExprKind::Binary(_, l, r) => l.is_constant() && r.is_constant(),
        }
    }

    /// Largest variable index used, if any.
    pub fn max_var(&self) -> Option<usize> {
        match &self.kind {
            ExprKind::Const(_) => None,
            ExprKind::Var(i) => Some(*i),
            ExprKind::Neg(e) | ExprKind::Call(_, e) => e.max_var(),
            ExprKind::Binary(_, l, r) => l.max_var().max(r.max_var()),
        }
    }

    /// Binding strength used by the printer; atoms bind tightest.
    fn precedence(&self) -> u8 {
        match &self.kind {
            ExprKind::Binary(op, _, _) => op.precedence(),
            _ => 4,
        }
    }
}

fn write_wrapped(f: &mut fmt::Formatter<'_>, e: &Expr, wrap: bool) -> fmt::Result {
    if wrap {
        write!(f, "({e})")
    } else {
        write!(f, "{e}")
    }
}

/// Prints with the minimum parentheses needed to reparse to the same tree.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            ExprKind::Const(v) => write!(f, "{v}"),
            ExprKind::Var(i) => write!(f, "x{i}"),
            ExprKind::Neg(e) => {
                f.write_str("-")?;
                // '-' takes an atom: anything binary needs parentheses
                write_wrapped(f, e, e.precedence() < 4)
            }
            ExprKind::Call(func, e) => write!(f, "{}({e})", func.name()),
            ExprKind::Binary(op, l, r) => {
                let p = op.precedence();
                let (wrap_l, wrap_r) = if *op == BinOp::Pow {
                    (l.precedence() <= p, r.precedence() < p)
                } else {
                    (l.precedence() < p, r.precedence() <= p)
                };
                write_wrapped(f, l, wrap_l)?;
                write!(f, " {} ", op.symbol())?;
                write_wrapped(f, r, wrap_r)
            }
        }
    }
}
