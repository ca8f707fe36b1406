//! Recursive-descent parser for the ASCII formula syntax.
//!
//! Grammar, loosest first:
//!   iff   := imp ('<->' imp)?      non-associative
//!   imp   := or ('->' imp)?        right-associative
//!   or    := and ('|' and)*
//!   and   := unary ('&' unary)*
//!   unary := ('!' | '<>' | '[]') unary | ident | 'true' | 'false' | '(' iff ')'

use super::{Formula, FormulaError};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    True,
    False,
    Bang,
    Up,
    Down,
    Amp,
    Pipe,
    Arrow,
    Iff,
    LParen,
    RParen,
    Eof,
}

impl Tok {
    fn describe(&self) -> &'static str {
        match self {
            Tok::Ident(_) => "identifier",
            Tok::True => "`true`",
            Tok::False => "`false`",
            Tok::Bang => "`!`",
            Tok::Up => "`<>`",
            Tok::Down => "`[]`",
            Tok::Amp => "`&`",
            Tok::Pipe => "`|`",
            Tok::Arrow => "`->`",
            Tok::Iff => "`<->`",
            Tok::LParen => "`(`",
            Tok::RParen => "`)`",
            Tok::Eof => "end of input",
        }
    }
}

fn err(offset: usize, expected: impl Into<String>) -> FormulaError {
    FormulaError::Parse {
        offset,
        expected: expected.into(),
    }
}

fn lex(src: &str) -> Result<Vec<(Tok, usize)>, FormulaError> {
    let bytes = src.as_bytes();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < src.len() {
        let c = src[i..].chars().next().unwrap();
        if c.is_whitespace() {
            i += c.len_utf8();
            continue;
        }
        let start = i;
        let tok = match c {
            'a'..='z' => {
                let mut end = i + 1;
                while end < src.len()
                    && matches!(bytes[end], b'a'..=b'z' | b'A'..=b'Z' | b'0'..=b'9' | b'_')
                {
                    end += 1;
                }
                let word = &src[i..end];
                i = end;
                match word {
                    "true" => Tok::True,
                    "false" => Tok::False,
                    _ => Tok::Ident(word.to_string()),
                }
            }
            '!' => {
                i += 1;
                Tok::Bang
            }
            '&' => {
                i += 1;
                Tok::Amp
            }
            '|' => {
                i += 1;
                Tok::Pipe
            }
            '(' => {
                i += 1;
                Tok::LParen
            }
            ')' => {
                i += 1;
                Tok::RParen
            }
            '-' => {
                if bytes.get(i + 1) == Some(&b'>') {
                    i += 2;
                    Tok::Arrow
                } else {
                    return Err(err(start, "expected `>` after `-`"));
                }
            }
            '<' => match bytes.get(i + 1) {
                Some(&b'>') => {
                    i += 2;
                    Tok::Up
                }
                Some(&b'-') if bytes.get(i + 2) == Some(&b'>') => {
                    i += 3;
                    Tok::Iff
                }
                _ => return Err(err(start, "expected `<>` or `<->`")),
            },
            '[' => {
                if bytes.get(i + 1) == Some(&b']') {
                    i += 2;
                    Tok::Down
                } else {
                    return Err(err(start, "expected `]` after `[`"));
                }
            }
            other => return Err(err(start, format!("unexpected character {other:?}"))),
        };
        toks.push((tok, start));
    }
    toks.push((Tok::Eof, src.len()));
    Ok(toks)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn iff(&mut self) -> Result<Formula, FormulaError> {
        let left = self.imp()?;
        if *self.peek() != Tok::Iff {
            return Ok(left);
        }
        self.bump();
        let right = self.imp()?;
        if *self.peek() == Tok::Iff {
            return Err(err(
                self.offset(),
                "`<->` is non-associative; parenthesize one side",
            ));
        }
        Ok(Formula::and(
            Formula::imp(left.clone(), right.clone()),
            Formula::imp(right, left),
        ))
    }

    fn imp(&mut self) -> Result<Formula, FormulaError> {
        let left = self.or()?;
        if *self.peek() == Tok::Arrow {
            self.bump();
            let right = self.imp()?;
            Ok(Formula::imp(left, right))
        } else {
            Ok(left)
        }
    }

    fn or(&mut self) -> Result<Formula, FormulaError> {
        let mut left = self.and()?;
        while *self.peek() == Tok::Pipe {
            self.bump();
            left = Formula::or(left, self.and()?);
        }
        Ok(left)
    }

    fn and(&mut self) -> Result<Formula, FormulaError> {
        let mut left = self.unary()?;
        while *self.peek() == Tok::Amp {
            self.bump();
            left = Formula::and(left, self.unary()?);
        }
        Ok(left)
    }

    fn unary(&mut self) -> Result<Formula, FormulaError> {
        match self.peek() {
            Tok::Bang => {
                self.bump();
                Ok(Formula::not(self.unary()?))
            }
            Tok::Up => {
                self.bump();
                Ok(Formula::up(self.unary()?))
            }
            Tok::Down => {
                self.bump();
                Ok(Formula::down(self.unary()?))
            }
            Tok::Ident(_) => {
                let Tok::Ident(name) = self.bump() else {
                    unreachable!()
                };
                Ok(Formula::Var(name))
            }
            Tok::True => {
                self.bump();
                Ok(Formula::Top)
            }
            Tok::False => {
                self.bump();
                Ok(Formula::Bot)
            }
            Tok::LParen => {
                self.bump();
                let inner = self.iff()?;
                if *self.peek() != Tok::RParen {
                    return Err(err(
                        self.offset(),
                        format!("expected `)`, found {}", self.peek().describe()),
                    ));
                }
                self.bump();
                Ok(inner)
            }
            other => Err(err(
                self.offset(),
                format!(
                    "expected a formula (identifier, constant, prefix, or `(`), found {}",
                    other.describe()
                ),
            )),
        }
    }
}

pub(super) fn parse(text: &str) -> Result<Formula, FormulaError> {
    let toks = lex(text)?;
    let mut p = Parser { toks, pos: 0 };
    let f = p.iff()?;
    if *p.peek() != Tok::Eof {
        return Err(err(
            p.offset(),
            format!("expected end of input, found {}", p.peek().describe()),
        ));
    }
    Ok(f)
}
