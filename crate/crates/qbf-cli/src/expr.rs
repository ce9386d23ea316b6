//! Parser for amplitude expressions.
//!
//! Grammar (left associative, unary minus binds tighter than * and /):
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := factor (('*' | '/') factor)*
//! factor  := '-' factor | primary
//! primary := number | number 'i' | 'i' | 'p' | 's' | '(' expr ')'
//! ```
//!
//! Numbers are decimal floats; a trailing `i` makes an imaginary literal, so
//! complex constants are written like `(1+2i)`. The symbol `s` is the quoin
//! amplitude √(p/(1−p)) and `p` is the bias itself (lowered through its
//! s-expression). The canonical printer emits minimal parentheses and
//! round-trips through the parser.

use std::fmt;

use qbf_core::constructor::ExprTree;

#[derive(Clone, Debug, PartialEq)]
pub enum Ast {
    Num(f64),
    Imag(f64),
    P,
    S,
    Neg(Box<Ast>),
    Add(Box<Ast>, Box<Ast>),
    Sub(Box<Ast>, Box<Ast>),
    Mul(Box<Ast>, Box<Ast>),
    Div(Box<Ast>, Box<Ast>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParseError {
    pub position: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "at byte {}: {}", self.position, self.message)
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Token {
    Num(f64),
    Imag(f64),
    P,
    S,
    Plus,
    Minus,
    Star,
    Slash,
    LParen,
    RParen,
}

fn lex(input: &str) -> Result<Vec<(usize, Token)>, ParseError> {
    let bytes = input.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        match c {
            ' ' | '\t' | '\n' | '\r' => i += 1,
            '+' => {
                out.push((i, Token::Plus));
                i += 1;
            }
            '-' => {
                out.push((i, Token::Minus));
                i += 1;
            }
            '*' => {
                out.push((i, Token::Star));
                i += 1;
            }
            '/' => {
                out.push((i, Token::Slash));
                i += 1;
            }
            '(' => {
                out.push((i, Token::LParen));
                i += 1;
            }
            ')' => {
                out.push((i, Token::RParen));
                i += 1;
            }
            'p' => {
                out.push((i, Token::P));
                i += 1;
            }
            's' => {
                out.push((i, Token::S));
                i += 1;
            }
            'i' => {
                out.push((i, Token::Imag(1.0)));
                i += 1;
            }
            '0'..='9' | '.' => {
                let start = i;
                while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                    i += 1;
                }
                // exponent part like 1e-3
                if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                    let mut j = i + 1;
                    if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                        j += 1;
                    }
                    if j < bytes.len() && bytes[j].is_ascii_digit() {
                        i = j;
                        while i < bytes.len() && bytes[i].is_ascii_digit() {
                            i += 1;
                        }
                    }
                }
                let text = &input[start..i];
                let value: f64 = text.parse().map_err(|_| ParseError {
                    position: start,
                    message: format!("bad number literal `{text}`"),
                })?;
                if i < bytes.len() && bytes[i] == b'i' {
                    i += 1;
                    out.push((start, Token::Imag(value)));
                } else {
                    out.push((start, Token::Num(value)));
                }
            }
            other => {
                return Err(ParseError {
                    position: i,
                    message: format!("unknown symbol `{other}`"),
                })
            }
        }
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<(usize, Token)>,
    pos: usize,
    input_len: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos).map(|(_, t)| t)
    }

    fn here(&self) -> usize {
        self.tokens
            .get(self.pos)
            .map(|(i, _)| *i)
            .unwrap_or(self.input_len)
    }

    fn bump(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).map(|(_, t)| t.clone());
        self.pos += 1;
        t
    }

    fn expr(&mut self) -> Result<Ast, ParseError> {
        let mut node = self.term()?;
        loop {
            match self.peek() {
                Some(Token::Plus) => {
                    self.bump();
                    node = Ast::Add(Box::new(node), Box::new(self.term()?));
                }
                Some(Token::Minus) => {
                    self.bump();
                    node = Ast::Sub(Box::new(node), Box::new(self.term()?));
                }
                _ => return Ok(node),
            }
        }
    }

    fn term(&mut self) -> Result<Ast, ParseError> {
        let mut node = self.factor()?;
        loop {
            match self.peek() {
                Some(Token::Star) => {
                    self.bump();
                    node = Ast::Mul(Box::new(node), Box::new(self.factor()?));
                }
                Some(Token::Slash) => {
                    self.bump();
                    node = Ast::Div(Box::new(node), Box::new(self.factor()?));
                }
                _ => return Ok(node),
            }
        }
    }

    fn factor(&mut self) -> Result<Ast, ParseError> {
        if matches!(self.peek(), Some(Token::Minus)) {
            self.bump();
            return Ok(Ast::Neg(Box::new(self.factor()?)));
        }
        self.primary()
    }

    fn primary(&mut self) -> Result<Ast, ParseError> {
        let position = self.here();
        match self.bump() {
            Some(Token::Num(v)) => Ok(Ast::Num(v)),
            Some(Token::Imag(v)) => Ok(Ast::Imag(v)),
            Some(Token::P) => Ok(Ast::P),
            Some(Token::S) => Ok(Ast::S),
            Some(Token::LParen) => {
                let inner = self.expr()?;
                match self.bump() {
                    Some(Token::RParen) => Ok(inner),
                    _ => Err(ParseError {
                        position: self.here(),
                        message: "expected `)`".into(),
                    }),
                }
            }
            Some(tok) => Err(ParseError {
                position,
                message: format!("unexpected token {tok:?}"),
            }),
            None => Err(ParseError {
                position,
                message: "unexpected end of input".into(),
            }),
        }
    }
}

pub fn parse_expression(input: &str) -> Result<Ast, ParseError> {
    let tokens = lex(input)?;
    let mut parser = Parser {
        tokens,
        pos: 0,
        input_len: input.len(),
    };
    let ast = parser.expr()?;
    if parser.pos != parser.tokens.len() {
        return Err(ParseError {
            position: parser.here(),
            message: "trailing input".into(),
        });
    }
    Ok(ast)
}

/// Canonical printer with minimal parentheses.
pub fn print_expression(ast: &Ast) -> String {
    fn prec(a: &Ast) -> u8 {
        match a {
            Ast::Add(..) | Ast::Sub(..) => 1,
            Ast::Mul(..) | Ast::Div(..) => 2,
            Ast::Neg(..) => 3,
            _ => 4,
        }
    }
    fn go(a: &Ast, out: &mut String, min_prec: u8) {
        let wrap = prec(a) < min_prec;
        if wrap {
            out.push('(');
        }
        match a {
            Ast::Num(v) => out.push_str(&format!("{v}")),
            Ast::Imag(v) => {
                if *v == 1.0 {
                    out.push('i');
                } else {
                    out.push_str(&format!("{v}i"));
                }
            }
            Ast::P => out.push('p'),
            Ast::S => out.push('s'),
            Ast::Neg(x) => {
                out.push('-');
                go(x, out, 3);
            }
            Ast::Add(l, r) => {
                go(l, out, 1);
                out.push('+');
                go(r, out, 2);
            }
            Ast::Sub(l, r) => {
                go(l, out, 1);
                out.push('-');
                go(r, out, 2);
            }
            Ast::Mul(l, r) => {
                go(l, out, 2);
                out.push('*');
                go(r, out, 3);
            }
            Ast::Div(l, r) => {
                go(l, out, 2);
                out.push('/');
                go(r, out, 3);
            }
        }
        if wrap {
            out.push(')');
        }
    }
    let mut out = String::new();
    go(ast, &mut out, 0);
    out
}

/// Lowers the surface syntax onto the constructor's expression trees; `p`
/// becomes its s-expression (s·s)·inv(s·s + 1).
pub fn lower(ast: &Ast) -> ExprTree {
    match ast {
        Ast::Num(v) => ExprTree::constant(*v, 0.0),
        Ast::Imag(v) => ExprTree::constant(0.0, *v),
        Ast::P => ExprTree::p(),
        Ast::S => ExprTree::S,
        Ast::Neg(x) => ExprTree::Neg(Box::new(lower(x))),
        Ast::Add(l, r) => ExprTree::Add(Box::new(lower(l)), Box::new(lower(r))),
        Ast::Sub(l, r) => ExprTree::Sub(Box::new(lower(l)), Box::new(lower(r))),
        Ast::Mul(l, r) => ExprTree::Mul(Box::new(lower(l)), Box::new(lower(r))),
        Ast::Div(l, r) => ExprTree::Div(Box::new(lower(l)), Box::new(lower(r))),
    }
}
