//! Tokenizer shared by the alphabet, system and formula readers.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Punct(char),
    Arrow,
    Eof,
}

#[derive(Debug, Clone)]
pub struct Token {
    pub tok: Tok,
    pub line: usize,
    pub col: usize,
}

pub fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

pub fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '\'' || c == '.'
}

pub fn tokenize(text: &str) -> Result<Vec<Token>> {
    let mut out = Vec::new();
    let chars: Vec<char> = text.chars().collect();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    while i < chars.len() {
        let c = chars[i];
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if c == '#' {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        let (l, cc) = (line, col);
        if is_ident_start(c) {
            let start = i;
            while i < chars.len() && is_ident_char(chars[i]) {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            col += i - start;
            out.push(Token { tok: Tok::Ident(s), line: l, col: cc });
            continue;
        }
        if c == '⊥' {
            i += 1;
            col += 1;
            out.push(Token { tok: Tok::Ident("bot".into()), line: l, col: cc });
            continue;
        }
        if c == '-' && chars.get(i + 1) == Some(&'>') {
            i += 2;
            col += 2;
            out.push(Token { tok: Tok::Arrow, line: l, col: cc });
            continue;
        }
        if ";:{}()<>[]!&|,=-^".contains(c) {
            i += 1;
            col += 1;
            out.push(Token { tok: Tok::Punct(c), line: l, col: cc });
            continue;
        }
        return Err(Error::Syntax { line: l, col: cc, msg: format!("unexpected character `{c}`") });
    }
    out.push(Token { tok: Tok::Eof, line, col });
    Ok(out)
}

/// Cursor over a token vector with the small helpers every reader needs.
pub struct Cursor {
    toks: Vec<Token>,
    pos: usize,
}

impl Cursor {
    pub fn new(text: &str) -> Result<Self> {
        Ok(Cursor { toks: tokenize(text)?, pos: 0 })
    }

    pub fn from_tokens(toks: Vec<Token>) -> Self {
        Cursor { toks, pos: 0 }
    }

    pub fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    pub fn peek_at(&self, k: usize) -> &Tok {
        let i = (self.pos + k).min(self.toks.len() - 1);
        &self.toks[i].tok
    }

    pub fn here(&self) -> (usize, usize) {
        let t = &self.toks[self.pos];
        (t.line, t.col)
    }

    pub fn next(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    pub fn at_eof(&self) -> bool {
        matches!(self.peek(), Tok::Eof)
    }

    pub fn error<T>(&self, msg: impl Into<String>) -> Result<T> {
        let (line, col) = self.here();
        Err(Error::Syntax { line, col, msg: msg.into() })
    }

    pub fn eat_punct(&mut self, c: char) -> bool {
        if self.peek() == &Tok::Punct(c) {
            self.next();
            true
        } else {
            false
        }
    }

    pub fn expect_punct(&mut self, c: char) -> Result<()> {
        if self.eat_punct(c) {
            Ok(())
        } else {
            self.error(format!("expected `{c}`, found {}", describe(self.peek())))
        }
    }

    pub fn expect_arrow(&mut self) -> Result<()> {
        if self.peek() == &Tok::Arrow {
            self.next();
            Ok(())
        } else {
            self.error(format!("expected `->`, found {}", describe(self.peek())))
        }
    }

    pub fn ident(&mut self) -> Result<String> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.next();
                Ok(s)
            }
            other => self.error(format!("expected identifier, found {}", describe(&other))),
        }
    }

    pub fn eat_keyword(&mut self, kw: &str) -> bool {
        if matches!(self.peek(), Tok::Ident(s) if s == kw) {
            self.next();
            true
        } else {
            false
        }
    }

    /// Identifiers up to (not including) the next `;`, which is consumed.
    pub fn ident_list(&mut self) -> Result<Vec<String>> {
        let mut out = Vec::new();
        loop {
            if self.eat_punct(';') {
                return Ok(out);
            }
            self.eat_punct(',');
            if self.eat_punct(';') {
                return Ok(out);
            }
            out.push(self.ident()?);
        }
    }

    /// Tokens up to the next `;` at bracket depth zero; the `;` is consumed.
    pub fn take_until_semicolon(&mut self) -> Result<Vec<Token>> {
        let mut depth = 0i32;
        let mut out = Vec::new();
        loop {
            let t = self.toks[self.pos].clone();
            match &t.tok {
                Tok::Eof => return self.error("unterminated item, expected `;`"),
                Tok::Punct(';') if depth == 0 => {
                    self.next();
                    let (line, col) = (t.line, t.col);
                    out.push(Token { tok: Tok::Eof, line, col });
                    return Ok(out);
                }
                Tok::Punct('(') | Tok::Punct('[') | Tok::Punct('{') => depth += 1,
                Tok::Punct(')') | Tok::Punct(']') | Tok::Punct('}') => depth -= 1,
                _ => {}
            }
            out.push(t);
            self.next();
        }
    }

    /// Tokens of a `{ ... }` block (braces consumed, contents returned).
    pub fn take_block(&mut self) -> Result<Vec<Token>> {
        self.expect_punct('{')?;
        let mut depth = 1i32;
        let mut out = Vec::new();
        loop {
            let t = self.toks[self.pos].clone();
            match &t.tok {
                Tok::Eof => return self.error("unterminated block, expected `}`"),
                Tok::Punct('{') => depth += 1,
                Tok::Punct('}') => {
                    depth -= 1;
                    if depth == 0 {
                        self.next();
                        out.push(Token { tok: Tok::Eof, line: t.line, col: t.col });
                        return Ok(out);
                    }
                }
                _ => {}
            }
            out.push(t);
            self.next();
        }
    }

    pub fn rest(&mut self) -> Vec<Token> {
        let out = self.toks[self.pos..].to_vec();
        self.pos = self.toks.len() - 1;
        out
    }
}

pub fn describe(t: &Tok) -> String {
    match t {
        Tok::Ident(s) => format!("`{s}`"),
        Tok::Punct(c) => format!("`{c}`"),
        Tok::Arrow => "`->`".into(),
        Tok::Eof => "end of input".into(),
    }
}
