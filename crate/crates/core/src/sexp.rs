//! Minimal S-expression reader used for SMT-LIB input and solver output.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{col}: {msg}")]
pub struct SexpError {
    pub line: usize,
    pub col: usize,
    pub msg: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Sexp {
    /// A symbol, keyword or numeral. `|quoted|` symbols are stored unquoted.
    Atom(String, Pos),
    /// A string literal with `""` already collapsed; SMT-LIB `\u` escapes
    /// are left for the caller.
    Str(String, Pos),
    List(Vec<Sexp>, Pos),
}

impl Sexp {
    pub fn pos(&self) -> Pos {
        match self {
            Sexp::Atom(_, p) | Sexp::Str(_, p) | Sexp::List(_, p) => *p,
        }
    }

    pub fn as_atom(&self) -> Option<&str> {
        match self {
            Sexp::Atom(s, _) => Some(s),
            _ => None,
        }
    }

    pub fn as_list(&self) -> Option<&[Sexp]> {
        match self {
            Sexp::List(items, _) => Some(items),
            _ => None,
        }
    }

    /// The head symbol of a non-empty list.
    pub fn head(&self) -> Option<&str> {
        self.as_list().and_then(|l| l.first()).and_then(Sexp::as_atom)
    }
}

struct Reader<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    line: usize,
    col: usize,
}

impl Reader<'_> {
    fn pos(&self) -> Pos {
        Pos { line: self.line, col: self.col }
    }

    fn err(&self, msg: impl Into<String>) -> SexpError {
        SexpError { line: self.line, col: self.col, msg: msg.into() }
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn skip_ws(&mut self) {
        while let Some(&c) = self.chars.peek() {
            if c == ';' {
                while let Some(c) = self.bump() {
                    if c == '\n' {
                        break;
                    }
                }
            } else if c.is_whitespace() {
                self.bump();
            } else {
                break;
            }
        }
    }

    fn read(&mut self) -> Result<Option<Sexp>, SexpError> {
        self.skip_ws();
        let pos = self.pos();
        let Some(&c) = self.chars.peek() else {
            return Ok(None);
        };
        match c {
            '(' => {
                self.bump();
                let mut items = Vec::new();
                loop {
                    self.skip_ws();
                    match self.chars.peek() {
                        None => {
                            return Err(SexpError {
                                line: pos.line,
                                col: pos.col,
                                msg: "unclosed parenthesis".into(),
                            })
                        }
                        Some(')') => {
                            self.bump();
                            return Ok(Some(Sexp::List(items, pos)));
                        }
                        _ => items.push(self.read()?.expect("peeked a character")),
                    }
                }
            }
            ')' => Err(self.err("unexpected ')'")),
            '"' => {
                self.bump();
                let mut s = String::new();
                loop {
                    match self.bump() {
                        None => {
                            return Err(SexpError {
                                line: pos.line,
                                col: pos.col,
                                msg: "unterminated string literal".into(),
                            })
                        }
                        Some('"') => {
                            if self.chars.peek() == Some(&'"') {
                                self.bump();
                                s.push('"');
                            } else {
                                return Ok(Some(Sexp::Str(s, pos)));
                            }
                        }
                        Some(c) => s.push(c),
                    }
                }
            }
            '|' => {
                self.bump();
                let mut s = String::new();
                loop {
                    match self.bump() {
                        None => {
                            return Err(SexpError {
                                line: pos.line,
                                col: pos.col,
                                msg: "unterminated quoted symbol".into(),
                            })
                        }
                        Some('|') => return Ok(Some(Sexp::Atom(s, pos))),
                        Some(c) => s.push(c),
                    }
                }
            }
            _ => {
                let mut s = String::new();
                while let Some(&c) = self.chars.peek() {
                    if c.is_whitespace() || matches!(c, '(' | ')' | '"' | ';' | '|') {
                        break;
                    }
                    s.push(c);
                    self.bump();
                }
                Ok(Some(Sexp::Atom(s, pos)))
            }
        }
    }
}

/// Reads every top-level S-expression in `text`.
pub fn parse_all(text: &str) -> Result<Vec<Sexp>, SexpError> {
    let mut r = Reader { chars: text.chars().peekable(), line: 1, col: 1 };
    let mut out = Vec::new();
    while let Some(s) = r.read()? {
        out.push(s);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reads_nested_lists_and_strings() {
        let v = parse_all("(assert (= x \"a\"\"b\")) ; comment\n(check-sat)").unwrap();
        assert_eq!(v.len(), 2);
        assert_eq!(v[0].head(), Some("assert"));
        let inner = v[0].as_list().unwrap()[1].as_list().unwrap();
        assert!(matches!(&inner[2], Sexp::Str(s, _) if s == "a\"b"));
        assert_eq!(v[1].pos(), Pos { line: 2, col: 1 });
    }

    #[test]
    fn quoted_symbols() {
        let v = parse_all("|x y|").unwrap();
        assert_eq!(v[0].as_atom(), Some("x y"));
    }

    #[test]
    fn reports_positions() {
        let e = parse_all("(a\n  (b").unwrap_err();
        assert_eq!((e.line, e.col), (2, 3));
        assert!(parse_all(")").is_err());
        assert!(parse_all("\"abc").is_err());
    }
}
