use super::lexer::{tokenize, Tok, Token};
use super::{
    Arith, BoolExpr, CompareOp, DottedPath, FragmentError, FragmentErrorKind as Kind, QualifiedCall,
    QueryPath, Span,
};
use crate::ident::Identifier;

/// Deepest nesting of parentheses and `not` accepted in one condition.
const MAX_DEPTH: usize = 128;

/// Parses an action such as `clock.tick`.
pub fn parse_call(text: &str) -> Result<QualifiedCall, FragmentError> {
    parse_path_fragment(text).map(QualifiedCall)
}

/// Parses a query such as `clock.hour`.
pub fn parse_query(text: &str) -> Result<QueryPath, FragmentError> {
    parse_path_fragment(text).map(QueryPath)
}

/// Parses a guard condition such as `clock.minute < 59`.
pub fn parse_bool_expr(text: &str) -> Result<BoolExpr, FragmentError> {
    let mut p = Parser::new(text);
    if p.tokens.is_empty() {
        return Err(p.empty_input());
    }
    let node = p.or_expr()?;
    p.expect_end()?;
    match node.value {
        Value::Bool(b) => Ok(b),
        Value::Arith(_) => Err(FragmentError::new(
            Kind::DanglingOperand,
            node.span,
            "integer expression is not a condition; a comparison is missing",
        )),
    }
}

fn parse_path_fragment(text: &str) -> Result<DottedPath, FragmentError> {
    let mut p = Parser::new(text);
    if p.tokens.is_empty() {
        return Err(p.empty_input());
    }
    let path = p.path()?;
    p.expect_end()?;
    Ok(path)
}

enum Value {
    Bool(BoolExpr),
    Arith(Arith),
}

struct Node {
    value: Value,
    span: Span,
    /// Height of the AST built so far.
    height: usize,
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    end: usize,
    depth: usize,
    open_parens: usize,
}

impl Parser {
    fn new(text: &str) -> Self {
        Parser {
            tokens: tokenize(text),
            pos: 0,
            end: text.chars().count(),
            depth: 0,
            open_parens: 0,
        }
    }

    fn empty_input(&self) -> FragmentError {
        FragmentError::new(Kind::EmptyInput, Span::new(0, self.end), "fragment is empty")
    }

    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn peek_tok(&self) -> Option<&Tok> {
        self.peek().map(|t| &t.tok)
    }

    fn bump(&mut self) -> Token {
        let t = self.tokens[self.pos].clone();
        self.pos += 1;
        t
    }

    fn eof_span(&self) -> Span {
        Span::new(self.end, 0)
    }

    fn here(&self) -> Span {
        self.peek().map(|t| t.span).unwrap_or_else(|| self.eof_span())
    }

    fn expect_end(&self) -> Result<(), FragmentError> {
        match self.peek() {
            None => Ok(()),
            Some(t) => Err(self.unexpected(t)),
        }
    }

    fn unexpected(&self, t: &Token) -> FragmentError {
        match t.tok {
            Tok::Unknown => FragmentError::new(Kind::UnknownOperator, t.span, "unknown operator"),
            Tok::BadWord => FragmentError::new(Kind::IllegalIdentifier, t.span, "malformed identifier"),
            Tok::RParen if self.open_parens == 0 => FragmentError::new(
                Kind::UnbalancedParenthesis,
                t.span,
                "closing parenthesis without a matching `(`",
            ),
            _ => FragmentError::new(
                Kind::TrailingGarbage,
                t.span,
                format!("unexpected {} after a complete fragment", t.tok.describe()),
            ),
        }
    }

    fn identifier(&mut self) -> Result<(Identifier, Span), FragmentError> {
        match self.peek() {
            Some(Token {
                tok: Tok::Ident(name),
                span,
            }) => {
                let (name, span) = (name.clone(), *span);
                self.pos += 1;
                let id = Identifier::new(name)
                    .map_err(|_| FragmentError::new(Kind::IllegalIdentifier, span, "malformed identifier"))?;
                Ok((id, span))
            }
            Some(t) => Err(FragmentError::new(
                Kind::IllegalIdentifier,
                t.span,
                format!("expected an identifier, found {}", t.tok.describe()),
            )),
            None => Err(FragmentError::new(
                Kind::IllegalIdentifier,
                self.eof_span(),
                "expected an identifier, found end of fragment",
            )),
        }
    }

    fn path(&mut self) -> Result<DottedPath, FragmentError> {
        let (root, _) = self.identifier()?;
        self.path_after_root(root)
    }

    fn path_after_root(&mut self, root: Identifier) -> Result<DottedPath, FragmentError> {
        let mut segments = Vec::new();
        while let Some(Tok::Dot) = self.peek_tok() {
            self.pos += 1;
            segments.push(self.identifier()?.0);
        }
        if segments.is_empty() {
            return Err(FragmentError::new(
                Kind::MissingDot,
                self.here(),
                format!("`{root}` needs a qualified feature, like `{root}.feature`"),
            ));
        }
        Ok(DottedPath { root, path: segments })
    }

    fn descend(&mut self, span: Span) -> Result<(), FragmentError> {
        self.depth += 1;
        if self.depth > MAX_DEPTH {
            return Err(FragmentError::new(
                Kind::NestingTooDeep,
                span,
                format!("nesting deeper than {MAX_DEPTH} levels"),
            ));
        }
        Ok(())
    }

    fn or_expr(&mut self) -> Result<Node, FragmentError> {
        let mut left = self.and_expr()?;
        while let Some(Tok::Or) = self.peek_tok() {
            self.pos += 1;
            let right = self.and_expr()?;
            let span = left.span.to(right.span);
            let height = joined_height(&left, &right)?;
            let (l, r) = (expect_bool(left, "or")?, expect_bool(right, "or")?);
            left = Node {
                value: Value::Bool(BoolExpr::or(l, r)),
                span,
                height,
            };
        }
        Ok(left)
    }

    fn and_expr(&mut self) -> Result<Node, FragmentError> {
        let mut left = self.not_expr()?;
        while let Some(Tok::And) = self.peek_tok() {
            self.pos += 1;
            let right = self.not_expr()?;
            let span = left.span.to(right.span);
            let height = joined_height(&left, &right)?;
            let (l, r) = (expect_bool(left, "and")?, expect_bool(right, "and")?);
            left = Node {
                value: Value::Bool(BoolExpr::and(l, r)),
                span,
                height,
            };
        }
        Ok(left)
    }

    fn not_expr(&mut self) -> Result<Node, FragmentError> {
        if let Some(Tok::Not) = self.peek_tok() {
            let op = self.bump().span;
            self.descend(op)?;
            let operand = grow(|| self.not_expr())?;
            self.depth -= 1;
            let span = op.to(operand.span);
            let height = operand.height + 1;
            let inner = expect_bool(operand, "not")?;
            return Ok(Node {
                value: Value::Bool(BoolExpr::not(inner)),
                span,
                height,
            });
        }
        self.comparison()
    }

    fn comparison(&mut self) -> Result<Node, FragmentError> {
        let left = self.arith()?;
        let op = match self.peek_tok() {
            Some(Tok::Lt) => CompareOp::Lt,
            Some(Tok::Le) => CompareOp::Le,
            Some(Tok::Gt) => CompareOp::Gt,
            Some(Tok::Ge) => CompareOp::Ge,
            Some(Tok::Eq) => CompareOp::Eq,
            Some(Tok::Ne) => CompareOp::Ne,
            _ => return Ok(left),
        };
        self.pos += 1;
        let right = self.arith()?;
        let span = left.span.to(right.span);
        let height = joined_height(&left, &right)?;
        let sym = op.symbol();
        let (l, r) = (expect_arith(left, sym)?, expect_arith(right, sym)?);
        Ok(Node {
            value: Value::Bool(BoolExpr::compare(l, op, r)),
            span,
            height,
        })
    }

    fn arith(&mut self) -> Result<Node, FragmentError> {
        let mut left = self.atom()?;
        loop {
            let add = match self.peek_tok() {
                Some(Tok::Plus) => true,
                Some(Tok::Minus) => false,
                _ => return Ok(left),
            };
            self.pos += 1;
            let right = self.atom()?;
            let span = left.span.to(right.span);
            let height = joined_height(&left, &right)?;
            let sym = if add { "+" } else { "-" };
            let (l, r) = (expect_arith(left, sym)?, expect_arith(right, sym)?);
            left = Node {
                value: Value::Arith(if add { Arith::add(l, r) } else { Arith::sub(l, r) }),
                span,
                height,
            };
        }
    }

    fn atom(&mut self) -> Result<Node, FragmentError> {
        let Some(token) = self.peek().cloned() else {
            return Err(FragmentError::new(
                Kind::DanglingOperand,
                self.eof_span(),
                "operand missing at end of fragment",
            ));
        };
        match token.tok {
            Tok::Int(magnitude) => {
                self.pos += 1;
                let value = int_value(magnitude, false, token.span)?;
                Ok(Node {
                    value: Value::Arith(Arith::Int(value)),
                    span: token.span,
                    height: 1,
                })
            }
            Tok::Minus => {
                self.pos += 1;
                match self.peek().cloned() {
                    Some(Token {
                        tok: Tok::Int(magnitude),
                        span,
                    }) => {
                        self.pos += 1;
                        let span = token.span.to(span);
                        let value = int_value(magnitude, true, span)?;
                        Ok(Node {
                            value: Value::Arith(Arith::Int(value)),
                            span,
                            height: 1,
                        })
                    }
                    _ => Err(FragmentError::new(
                        Kind::DanglingOperand,
                        token.span,
                        "`-` needs a left operand or an integer literal",
                    )),
                }
            }
            Tok::Ident(_) => {
                let (root, root_span) = self.identifier()?;
                let path = self.path_after_root(root)?;
                let last = self.tokens[self.pos - 1].span;
                Ok(Node {
                    value: Value::Arith(Arith::Query(QueryPath(path))),
                    span: root_span.to(last),
                    height: 1,
                })
            }
            Tok::True | Tok::False => {
                self.pos += 1;
                let b = if token.tok == Tok::True {
                    BoolExpr::True
                } else {
                    BoolExpr::False
                };
                Ok(Node {
                    value: Value::Bool(b),
                    span: token.span,
                    height: 1,
                })
            }
            Tok::LParen => {
                self.pos += 1;
                self.descend(token.span)?;
                self.open_parens += 1;
                let inner = grow(|| self.or_expr())?;
                self.open_parens -= 1;
                self.depth -= 1;
                match self.peek() {
                    Some(Token {
                        tok: Tok::RParen,
                        span,
                    }) => {
                        let span = token.span.to(*span);
                        self.pos += 1;
                        Ok(Node {
                            value: inner.value,
                            span,
                            height: inner.height,
                        })
                    }
                    None => Err(FragmentError::new(
                        Kind::UnbalancedParenthesis,
                        token.span,
                        "`(` is never closed",
                    )),
                    Some(t) => Err(self.unexpected(t)),
                }
            }
            Tok::RParen if self.open_parens == 0 => Err(FragmentError::new(
                Kind::UnbalancedParenthesis,
                token.span,
                "closing parenthesis without a matching `(`",
            )),
            Tok::Unknown => Err(FragmentError::new(
                Kind::UnknownOperator,
                token.span,
                "unknown operator",
            )),
            Tok::BadWord | Tok::Dot => Err(FragmentError::new(
                Kind::IllegalIdentifier,
                token.span,
                format!("expected an operand, found {}", token.tok.describe()),
            )),
            _ => Err(FragmentError::new(
                Kind::DanglingOperand,
                token.span,
                format!("operand missing before {}", token.tok.describe()),
            )),
        }
    }
}

/// Debug builds spend tens of kilobytes of stack per nesting level.
fn grow<R>(f: impl FnOnce() -> R) -> R {
    stacker::maybe_grow(64 * 1024, 1024 * 1024, f)
}

fn joined_height(left: &Node, right: &Node) -> Result<usize, FragmentError> {
    let height = left.height.max(right.height) + 1;
    if height > MAX_DEPTH {
        return Err(FragmentError::new(
            Kind::NestingTooDeep,
            left.span.to(right.span),
            format!("expression nests deeper than {MAX_DEPTH} levels"),
        ));
    }
    Ok(height)
}

fn int_value(magnitude: Option<u64>, negative: bool, span: Span) -> Result<i64, FragmentError> {
    let overflow = || {
        FragmentError::new(
            Kind::IntegerOverflow,
            span,
            "integer literal does not fit in 64 signed bits",
        )
    };
    let m = magnitude.ok_or_else(overflow)?;
    if negative {
        if m == 1u64 << 63 {
            Ok(i64::MIN)
        } else {
            i64::try_from(m).map(|v| -v).map_err(|_| overflow())
        }
    } else {
        i64::try_from(m).map_err(|_| overflow())
    }
}

fn expect_bool(node: Node, op: &str) -> Result<BoolExpr, FragmentError> {
    match node.value {
        Value::Bool(b) => Ok(b),
        Value::Arith(_) => Err(FragmentError::new(
            Kind::TypeMismatch,
            node.span,
            format!("operand of `{op}` must be a condition, found an integer expression"),
        )),
    }
}

fn expect_arith(node: Node, op: &str) -> Result<Arith, FragmentError> {
    match node.value {
        Value::Arith(a) => Ok(a),
        Value::Bool(_) => Err(FragmentError::new(
            Kind::TypeMismatch,
            node.span,
            format!("operand of `{op}` must be an integer expression, found a condition"),
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fragment::Fragment;

    fn id(s: &str) -> Identifier {
        Identifier::new(s).unwrap()
    }

    fn kind_at(r: Result<impl std::fmt::Debug, FragmentError>) -> (Kind, usize) {
        let e = r.unwrap_err();
        (e.kind, e.span.start)
    }

    #[test]
    fn call_from_figure() {
        let c = parse_call("clock.tick").unwrap();
        assert_eq!(c.root(), &id("clock"));
        assert_eq!(c.path(), &[id("tick")]);
    }

    #[test]
    fn deep_call() {
        let c = parse_call("a.b.c").unwrap();
        assert_eq!(c.root(), &id("a"));
        assert_eq!(c.path(), &[id("b"), id("c")]);
        assert_eq!(parse_call(" a . b .c ").unwrap(), c);
    }

    #[test]
    fn call_errors() {
        assert_eq!(kind_at(parse_call("clock")), (Kind::MissingDot, 5));
        assert_eq!(kind_at(parse_call("clock tick")), (Kind::MissingDot, 6));
        assert_eq!(kind_at(parse_call("clock.tick now")), (Kind::TrailingGarbage, 11));
        assert_eq!(kind_at(parse_call("")), (Kind::EmptyInput, 0));
        assert_eq!(kind_at(parse_call("1clock.tick")), (Kind::IllegalIdentifier, 0));
        assert_eq!(kind_at(parse_call("clock.and")), (Kind::IllegalIdentifier, 6));
    }

    #[test]
    fn queries() {
        assert_eq!(parse_query("clock.hour").unwrap().render(), "clock.hour");
        assert_eq!(parse_query("clock.minute").unwrap().feature(), &id("minute"));
        assert_eq!(kind_at(parse_query("clock..hour")), (Kind::IllegalIdentifier, 6));
        assert_eq!(kind_at(parse_query("clock.")), (Kind::IllegalIdentifier, 6));
    }

    #[test]
    fn guard_from_figure() {
        let e = parse_bool_expr("clock.minute < 59").unwrap();
        let expected = BoolExpr::compare(
            Arith::Query(parse_query("clock.minute").unwrap()),
            CompareOp::Lt,
            Arith::Int(59),
        );
        assert_eq!(e, expected);
    }

    #[test]
    fn and_binds_tighter_than_or() {
        let e = parse_bool_expr("a.x < 1 and b.y < 2 or c.z < 3").unwrap();
        let cmp = |s: &str| parse_bool_expr(s).unwrap();
        assert_eq!(
            e,
            BoolExpr::or(BoolExpr::and(cmp("a.x < 1"), cmp("b.y < 2")), cmp("c.z < 3"))
        );
    }

    #[test]
    fn not_and_parentheses() {
        let cmp = |s: &str| parse_bool_expr(s).unwrap();
        assert_eq!(cmp("not a.x < 1"), BoolExpr::not(cmp("a.x < 1")));
        assert_eq!(
            cmp("not (a.x < 1 and True)"),
            BoolExpr::not(BoolExpr::and(cmp("a.x < 1"), BoolExpr::True))
        );
        assert_eq!(cmp("(a.x + 1) < 2"), cmp("a.x + 1 < 2"));
        assert_eq!(cmp("((a.x)) < ((1))"), cmp("a.x < 1"));
    }

    #[test]
    fn arithmetic_is_left_associative() {
        let e = parse_bool_expr("a.x - 1 - 2 = 0").unwrap();
        let x = Arith::Query(parse_query("a.x").unwrap());
        let left = Arith::sub(Arith::sub(x, Arith::Int(1)), Arith::Int(2));
        assert_eq!(e, BoolExpr::compare(left, CompareOp::Eq, Arith::Int(0)));
    }

    #[test]
    fn negative_literals() {
        let e = parse_bool_expr("a.x > -5").unwrap();
        let x = Arith::Query(parse_query("a.x").unwrap());
        assert_eq!(e, BoolExpr::compare(x, CompareOp::Gt, Arith::Int(-5)));
        let min = parse_bool_expr("-9223372036854775808 < 0").unwrap();
        assert_eq!(
            min,
            BoolExpr::compare(Arith::Int(i64::MIN), CompareOp::Lt, Arith::Int(0))
        );
    }

    #[test]
    fn guard_errors() {
        assert_eq!(
            kind_at(parse_bool_expr("clock.minute <")),
            (Kind::DanglingOperand, 14)
        );
        assert_eq!(
            kind_at(parse_bool_expr("(a.x < 1")),
            (Kind::UnbalancedParenthesis, 0)
        );
        assert_eq!(
            kind_at(parse_bool_expr("a.x < 1)")),
            (Kind::UnbalancedParenthesis, 7)
        );
        assert_eq!(kind_at(parse_bool_expr("a.x # 1")), (Kind::UnknownOperator, 4));
        assert_eq!(kind_at(parse_bool_expr("a.x == 1")), (Kind::DanglingOperand, 5));
        assert_eq!(
            kind_at(parse_bool_expr("a.x < 9223372036854775808")),
            (Kind::IntegerOverflow, 6)
        );
        assert_eq!(kind_at(parse_bool_expr("a.x")), (Kind::DanglingOperand, 0));
        assert_eq!(
            kind_at(parse_bool_expr("a.x < 1 < 2")),
            (Kind::TrailingGarbage, 8)
        );
        assert_eq!(kind_at(parse_bool_expr("a.x and True")), (Kind::TypeMismatch, 0));
        assert_eq!(kind_at(parse_bool_expr("()")), (Kind::DanglingOperand, 1));
        assert_eq!(kind_at(parse_bool_expr("clock < 1")), (Kind::MissingDot, 6));
        assert_eq!(kind_at(parse_bool_expr("   ")), (Kind::EmptyInput, 0));
    }

    #[test]
    fn deep_nesting_is_rejected_not_crashed() {
        let deep = "(".repeat(10_000) + "True" + &")".repeat(10_000);
        assert_eq!(kind_at(parse_bool_expr(&deep)).0, Kind::NestingTooDeep);
        let nots = "not ".repeat(10_000) + "True";
        assert_eq!(kind_at(parse_bool_expr(&nots)).0, Kind::NestingTooDeep);
        let chain = vec!["1"; 10_000].join(" + ") + " < 0";
        assert_eq!(kind_at(parse_bool_expr(&chain)).0, Kind::NestingTooDeep);
        let fine = "(".repeat(MAX_DEPTH) + "True" + &")".repeat(MAX_DEPTH);
        assert_eq!(parse_bool_expr(&fine).unwrap(), BoolExpr::True);
    }
}
