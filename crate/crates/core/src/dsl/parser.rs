use super::lexer::{Tok, Token};
use super::{DslError, Pos};
use crate::symexpr::Rat;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Ast {
    Num(Rat),
    Ident(String),
    /// `name[i, j, ...]`: a jet or a derivative operator.
    Index(String, Vec<String>),
    Neg(Box<Node>),
    Bin(BinOp, Box<Node>, Box<Node>),
    Pow(Box<Node>, Box<Node>),
    Tuple(Vec<Node>),
    List(Vec<Node>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Node {
    pub ast: Ast,
    pub pos: Pos,
}

pub struct Parser<'a> {
    toks: &'a [Token],
    i: usize,
    end: Pos,
}

impl<'a> Parser<'a> {
    pub fn new(toks: &'a [Token], end: Pos) -> Self {
        Parser { toks, i: 0, end }
    }

    pub fn pos(&self) -> Pos {
        self.toks.get(self.i).map_or(self.end, |t| t.pos)
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.i).map(|t| &t.tok)
    }

    fn peek_sym(&self, s: &str) -> bool {
        matches!(self.peek(), Some(Tok::Sym(x)) if *x == s)
    }

    fn eat_sym(&mut self, s: &str) -> bool {
        if self.peek_sym(s) {
            self.i += 1;
            true
        } else {
            false
        }
    }

    fn expect_sym(&mut self, s: &str) -> Result<(), DslError> {
        if self.eat_sym(s) {
            Ok(())
        } else {
            Err(self.error(&format!("expected `{s}`")))
        }
    }

    pub fn error(&self, msg: &str) -> DslError {
        let found = match self.peek() {
            None => "end of input".to_string(),
            Some(Tok::Ident(s)) => format!("`{s}`"),
            Some(Tok::Num(n)) => format!("`{n}`"),
            Some(Tok::Sym(s)) => format!("`{s}`"),
        };
        DslError::Syntax { pos: self.pos(), msg: format!("{msg}, found {found}") }
    }

    pub fn at_end(&self) -> bool {
        self.i >= self.toks.len()
    }

    pub fn expr(&mut self) -> Result<Node, DslError> {
        let mut lhs = self.term()?;
        loop {
            let pos = self.pos();
            let op = if self.eat_sym("+") {
                BinOp::Add
            } else if self.eat_sym("-") {
                BinOp::Sub
            } else {
                break;
            };
            let rhs = self.term()?;
            lhs = Node { ast: Ast::Bin(op, Box::new(lhs), Box::new(rhs)), pos };
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Node, DslError> {
        let mut lhs = self.unary()?;
        loop {
            let pos = self.pos();
            let op = if self.eat_sym("*") {
                BinOp::Mul
            } else if self.eat_sym("/") {
                BinOp::Div
            } else {
                break;
            };
            let rhs = self.unary()?;
            lhs = Node { ast: Ast::Bin(op, Box::new(lhs), Box::new(rhs)), pos };
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Node, DslError> {
        let pos = self.pos();
        if self.eat_sym("-") {
            let inner = self.unary()?;
            return Ok(Node { ast: Ast::Neg(Box::new(inner)), pos });
        }
        if self.eat_sym("+") {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<Node, DslError> {
        let base = self.atom()?;
        let pos = self.pos();
        if self.eat_sym("^") {
            let exp = self.exponent()?;
            return Ok(Node { ast: Ast::Pow(Box::new(base), Box::new(exp)), pos });
        }
        Ok(base)
    }

    fn exponent(&mut self) -> Result<Node, DslError> {
        let pos = self.pos();
        if self.eat_sym("-") {
            let inner = self.exponent()?;
            return Ok(Node { ast: Ast::Neg(Box::new(inner)), pos });
        }
        if self.eat_sym("+") {
            return self.exponent();
        }
        self.atom()
    }

    fn atom(&mut self) -> Result<Node, DslError> {
        let pos = self.pos();
        match self.peek().cloned() {
            Some(Tok::Num(n)) => {
                self.i += 1;
                Ok(Node { ast: Ast::Num(n), pos })
            }
            Some(Tok::Ident(name)) => {
                self.i += 1;
                if self.eat_sym("[") {
                    let mut idx = Vec::new();
                    if !self.peek_sym("]") {
                        loop {
                            match self.peek().cloned() {
                                Some(Tok::Ident(s)) => {
                                    self.i += 1;
                                    idx.push(s);
                                }
                                _ => return Err(self.error("expected an independent variable in derivative index")),
                            }
                            if !self.eat_sym(",") {
                                break;
                            }
                        }
                    }
                    self.expect_sym("]")?;
                    return Ok(Node { ast: Ast::Index(name, idx), pos });
                }
                Ok(Node { ast: Ast::Ident(name), pos })
            }
            Some(Tok::Sym("(")) => {
                self.i += 1;
                let items = self.comma_list(")")?;
                if items.len() == 1 {
                    Ok(items.into_iter().next().unwrap())
                } else {
                    Ok(Node { ast: Ast::Tuple(items), pos })
                }
            }
            Some(Tok::Sym("[")) => {
                self.i += 1;
                let items = if self.eat_sym("]") { Vec::new() } else { self.comma_list("]")? };
                Ok(Node { ast: Ast::List(items), pos })
            }
            _ => Err(self.error("expected an expression")),
        }
    }

    fn comma_list(&mut self, close: &str) -> Result<Vec<Node>, DslError> {
        let mut items = vec![self.expr()?];
        while self.eat_sym(",") {
            items.push(self.expr()?);
        }
        self.expect_sym(close)?;
        Ok(items)
    }
}

/// Parses a complete token sequence as one expression node.
pub fn parse_node(toks: &[Token], end: Pos) -> Result<Node, DslError> {
    let mut p = Parser::new(toks, end);
    let n = p.expr()?;
    if !p.at_end() {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(n)
}
