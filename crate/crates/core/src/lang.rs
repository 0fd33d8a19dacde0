//! Text form of turtle programs.
//!
//! ```text
//! setpencolor red
//! repeat 4 {
//!   forward
//!   right
//! }
//! ```
//!
//! Tokens are separated by whitespace; braces may also touch their
//! neighbours. Keywords are lowercase. Repeat counts range over 2..=5 and
//! repeats do not nest.

use crate::error::ParseError;
use crate::model::{Basic, Command, PenColor, Program, Stmt, MAX_REPEAT, MIN_REPEAT};

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok<'a> {
    Word(&'a str),
    Open,
    Close,
}

#[derive(Debug, Clone, Copy)]
struct Pos {
    line: usize,
    column: usize,
}

fn tokenize(text: &str) -> (Vec<(Tok<'_>, Pos)>, Pos) {
    let mut toks = Vec::new();
    let mut line = 1;
    let mut column = 1;
    let mut word: Option<(usize, Pos)> = None;

    for (idx, ch) in text.char_indices() {
        let here = Pos { line, column };
        let is_brace = ch == '{' || ch == '}';
        if ch.is_whitespace() || is_brace {
            if let Some((begin, pos)) = word.take() {
                toks.push((Tok::Word(&text[begin..idx]), pos));
            }
            if ch == '{' {
                toks.push((Tok::Open, here));
            } else if ch == '}' {
                toks.push((Tok::Close, here));
            }
        } else if word.is_none() {
            word = Some((idx, here));
        }
        if ch == '\n' {
            line += 1;
            column = 1;
        } else {
            column += 1;
        }
    }
    if let Some((begin, pos)) = word {
        toks.push((Tok::Word(&text[begin..]), pos));
    }
    (toks, Pos { line, column })
}

struct Parser<'a> {
    toks: Vec<(Tok<'a>, Pos)>,
    next: usize,
    end: Pos,
}

impl<'a> Parser<'a> {
    fn error(pos: Pos, message: impl Into<String>) -> ParseError {
        ParseError {
            line: pos.line,
            column: pos.column,
            message: message.into(),
        }
    }

    fn bump(&mut self) -> Option<(Tok<'a>, Pos)> {
        let tok = self.toks.get(self.next).cloned();
        self.next += 1;
        tok
    }

    fn peek(&self) -> Option<&(Tok<'a>, Pos)> {
        self.toks.get(self.next)
    }

    fn program(&mut self) -> Result<Program, ParseError> {
        let mut stmts = Vec::new();
        while let Some((tok, pos)) = self.bump() {
            match tok {
                Tok::Word("repeat") => stmts.push(self.repeat(pos)?),
                Tok::Word(word) => stmts.push(Stmt::Cmd(self.command(word, pos)?)),
                Tok::Open => return Err(Self::error(pos, "unexpected '{'")),
                Tok::Close => return Err(Self::error(pos, "unexpected '}'")),
            }
        }
        Ok(Program::new(stmts))
    }

    fn command(&mut self, word: &str, pos: Pos) -> Result<Command, ParseError> {
        if let Some(basic) = Basic::from_name(word) {
            return Ok(Command::Basic(basic));
        }
        if word != "setpencolor" {
            return Err(Self::error(pos, format!("unknown command `{word}`")));
        }
        match self.bump() {
            Some((Tok::Word(name), at)) => PenColor::from_name(name)
                .map(Command::Pen)
                .ok_or_else(|| Self::error(at, format!("unknown pen color `{name}`"))),
            Some((_, at)) => Err(Self::error(at, "expected a pen color")),
            None => Err(Self::error(self.end, "expected a pen color")),
        }
    }

    fn repeat(&mut self, pos: Pos) -> Result<Stmt, ParseError> {
        let count = match self.bump() {
            Some((Tok::Word(w), at)) => {
                let n: u32 = w
                    .parse()
                    .ok()
                    .filter(|_| w.bytes().all(|b| b.is_ascii_digit()))
                    .ok_or_else(|| {
                        Self::error(at, format!("expected a repeat count, found `{w}`"))
                    })?;
                if !(MIN_REPEAT as u32..=MAX_REPEAT as u32).contains(&n) {
                    return Err(Self::error(
                        at,
                        format!("repeat count {n} outside {MIN_REPEAT}..={MAX_REPEAT}"),
                    ));
                }
                n as u8
            }
            Some((_, at)) => return Err(Self::error(at, "expected a repeat count")),
            None => return Err(Self::error(self.end, "expected a repeat count")),
        };
        match self.bump() {
            Some((Tok::Open, _)) => {}
            Some((_, at)) => return Err(Self::error(at, "expected '{' after repeat count")),
            None => return Err(Self::error(self.end, "expected '{' after repeat count")),
        }

        let mut body = Vec::new();
        loop {
            let Some((tok, at)) = self.bump() else {
                return Err(Self::error(pos, "unclosed '{' in repeat"));
            };
            match tok {
                Tok::Close if body.is_empty() => {
                    return Err(Self::error(at, "empty repeat body"));
                }
                Tok::Close => break,
                Tok::Open => return Err(Self::error(at, "unexpected '{'")),
                Tok::Word("repeat") => return Err(Self::error(at, "nested repeat is not allowed")),
                Tok::Word(word) => body.push(self.command(word, at)?),
            }
        }
        Ok(Stmt::Repeat { count, body })
    }
}

pub fn parse(text: &str) -> Result<Program, ParseError> {
    let (toks, end) = tokenize(text);
    let mut parser = Parser { toks, next: 0, end };
    let program = parser.program()?;
    debug_assert!(parser.peek().is_none());
    Ok(program)
}

fn command_text(cmd: &Command) -> String {
    match cmd {
        Command::Basic(b) => b.name().to_string(),
        Command::Pen(c) => format!("setpencolor {c}"),
    }
}

/// Canonical text: one statement per line, repeat bodies indented by two
/// spaces, no trailing newline.
pub fn print(code: &Program) -> String {
    let mut lines = Vec::new();
    for stmt in &code.stmts {
        match stmt {
            Stmt::Cmd(cmd) => lines.push(command_text(cmd)),
            Stmt::Repeat { count, body } => {
                lines.push(format!("repeat {count} {{"));
                lines.extend(body.iter().map(|c| format!("  {}", command_text(c))));
                lines.push("}".to_string());
            }
        }
    }
    lines.join("\n")
}
