//! Parser for the supported pattern subset.
//!
//! Grammar (byte oriented, no Unicode):
//!
//! ```text
//! alt    := concat ('|' concat)*
//! concat := repeat*
//! repeat := atom ('*' | '+' | '?' | '{' n '}' | '{' n ',' '}' | '{' n ',' m '}')*
//! atom   := literal | '\' escape | '.' | class | '(' alt ')' | '(?:' alt ')'
//! ```

use std::fmt;

use crate::{Error, Result};

const MAX_REPEAT: u32 = 1000;

/// A set of bytes as a 256-bit mask.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct ByteSet([u64; 4]);

impl ByteSet {
    pub const fn empty() -> ByteSet {
        ByteSet([0; 4])
    }

    pub const fn full() -> ByteSet {
        ByteSet([u64::MAX; 4])
    }

    pub fn single(b: u8) -> ByteSet {
        let mut s = ByteSet::empty();
        s.insert(b);
        s
    }

    pub fn range(lo: u8, hi: u8) -> ByteSet {
        let mut s = ByteSet::empty();
        for b in lo..=hi {
            s.insert(b);
        }
        s
    }

    #[inline]
    pub fn insert(&mut self, b: u8) {
        self.0[(b >> 6) as usize] |= 1 << (b & 63);
    }

    #[inline]
    pub fn contains(&self, b: u8) -> bool {
        self.0[(b >> 6) as usize] >> (b & 63) & 1 == 1
    }

    pub fn union(&self, other: &ByteSet) -> ByteSet {
        let mut out = *self;
        for (w, o) in out.0.iter_mut().zip(other.0.iter()) {
            *w |= o;
        }
        out
    }

    pub fn complement(&self) -> ByteSet {
        ByteSet(self.0.map(|w| !w))
    }

    pub fn is_empty(&self) -> bool {
        self.0.iter().all(|&w| w == 0)
    }

    pub fn iter(&self) -> impl Iterator<Item = u8> {
        let set = *self;
        (0..=255u8).filter(move |&b| set.contains(b))
    }
}

impl fmt::Debug for ByteSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Ast {
    /// Matches the empty string.
    Empty,
    Class(ByteSet),
    Concat(Vec<Ast>),
    Alt(Vec<Ast>),
    Repeat {
        inner: Box<Ast>,
        min: u32,
        max: Option<u32>,
    },
}

/// Parses one pattern. `rule` is only used to label errors.
pub fn parse_pattern(pattern: &str, rule: usize) -> Result<Ast> {
    let mut p = Parser {
        bytes: pattern.as_bytes(),
        pos: 0,
        rule,
        depth: 0,
    };
    let ast = p.alternation()?;
    if p.pos < p.bytes.len() {
        // Only an unmatched ')' can stop the top-level alternation early.
        return Err(p.error("unmatched ')'"));
    }
    Ok(ast)
}

struct Parser<'a> {
    bytes: &'a [u8],
    pos: usize,
    rule: usize,
    depth: usize,
}

impl Parser<'_> {
    fn error(&self, message: impl Into<String>) -> Error {
        Error::Syntax {
            rule: self.rule,
            offset: self.pos,
            message: message.into(),
        }
    }

    fn peek(&self) -> Option<u8> {
        self.bytes.get(self.pos).copied()
    }

    fn bump(&mut self) -> Option<u8> {
        let b = self.peek()?;
        self.pos += 1;
        Some(b)
    }

    fn eat(&mut self, b: u8) -> bool {
        if self.peek() == Some(b) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn alternation(&mut self) -> Result<Ast> {
        let mut branches = vec![self.concat()?];
        while self.eat(b'|') {
            branches.push(self.concat()?);
        }
        Ok(if branches.len() == 1 {
            branches.pop().unwrap()
        } else {
            Ast::Alt(branches)
        })
    }

    fn concat(&mut self) -> Result<Ast> {
        let mut items = Vec::new();
        while let Some(b) = self.peek() {
            if b == b'|' || b == b')' {
                break;
            }
            items.push(self.repeat()?);
        }
        Ok(match items.len() {
            0 => Ast::Empty,
            1 => items.pop().unwrap(),
            _ => Ast::Concat(items),
        })
    }

    fn repeat(&mut self) -> Result<Ast> {
        let mut ast = self.atom()?;
        loop {
            let (min, max) = match self.peek() {
                Some(b'*') => (0, None),
                Some(b'+') => (1, None),
                Some(b'?') => (0, Some(1)),
                Some(b'{') => {
                    let save = self.pos;
                    match self.counted()? {
                        Some(bounds) => {
                            ast = Ast::Repeat {
                                inner: Box::new(ast),
                                min: bounds.0,
                                max: bounds.1,
                            };
                            continue;
                        }
                        None => {
                            self.pos = save;
                            return Err(self.error("malformed counted repetition"));
                        }
                    }
                }
                _ => break,
            };
            self.pos += 1;
            if self.peek() == Some(b'?') {
                return Err(self.error("lazy quantifiers are not supported"));
            }
            ast = Ast::Repeat {
                inner: Box::new(ast),
                min,
                max,
            };
        }
        Ok(ast)
    }

    /// Parses `{n}`, `{n,}` or `{n,m}` with the cursor on `{`.
    fn counted(&mut self) -> Result<Option<(u32, Option<u32>)>> {
        self.pos += 1;
        let Some(min) = self.number()? else {
            return Ok(None);
        };
        let max = if self.eat(b',') {
            if self.peek() == Some(b'}') {
                None
            } else {
                match self.number()? {
                    Some(m) => Some(m),
                    None => return Ok(None),
                }
            }
        } else {
            Some(min)
        };
        if !self.eat(b'}') {
            return Ok(None);
        }
        if let Some(m) = max {
            if m < min {
                return Err(self.error(format!("repetition bounds {{{min},{m}}} are reversed")));
            }
        }
        Ok(Some((min, max)))
    }

    fn number(&mut self) -> Result<Option<u32>> {
        let start = self.pos;
        while matches!(self.peek(), Some(b'0'..=b'9')) {
            self.pos += 1;
        }
        if start == self.pos {
            return Ok(None);
        }
        let text = std::str::from_utf8(&self.bytes[start..self.pos]).unwrap();
        match text.parse::<u32>() {
            Ok(v) if v <= MAX_REPEAT => Ok(Some(v)),
            _ => Err(self.error(format!("repetition bound exceeds {MAX_REPEAT}"))),
        }
    }

    fn atom(&mut self) -> Result<Ast> {
        let at = self.pos;
        let b = self
            .bump()
            .ok_or_else(|| self.error("unexpected end of pattern"))?;
        match b {
            b'(' => {
                if self.bytes[self.pos..].starts_with(b"?:") {
                    self.pos += 2;
                } else if self.peek() == Some(b'?') {
                    return Err(self.error("group flags and lookaround are not supported"));
                }
                self.depth += 1;
                if self.depth > 256 {
                    return Err(self.error("groups nested too deeply"));
                }
                let inner = self.alternation()?;
                self.depth -= 1;
                if !self.eat(b')') {
                    return Err(self.error("unclosed group"));
                }
                Ok(inner)
            }
            b'[' => self.class(),
            b'.' => Ok(Ast::Class(ByteSet::full())),
            b'\\' => {
                let set = self.escape(false)?;
                Ok(Ast::Class(set))
            }
            b'*' | b'+' | b'?' | b'{' => {
                self.pos = at;
                Err(self.error("repetition operator without operand"))
            }
            b'^' | b'$' => {
                self.pos = at;
                Err(self.error("anchors are not supported"))
            }
            other => Ok(Ast::Class(ByteSet::single(other))),
        }
    }

    /// Parses an escape with the cursor just past the backslash.
    fn escape(&mut self, in_class: bool) -> Result<ByteSet> {
        let b = self.bump().ok_or_else(|| self.error("dangling escape"))?;
        let digit = ByteSet::range(b'0', b'9');
        let word = digit
            .union(&ByteSet::range(b'a', b'z'))
            .union(&ByteSet::range(b'A', b'Z'))
            .union(&ByteSet::single(b'_'));
        let mut space = ByteSet::empty();
        for s in [b' ', b'\t', b'\n', b'\r', 0x0b, 0x0c] {
            space.insert(s);
        }
        Ok(match b {
            b'n' => ByteSet::single(b'\n'),
            b'r' => ByteSet::single(b'\r'),
            b't' => ByteSet::single(b'\t'),
            b'f' => ByteSet::single(0x0c),
            b'v' => ByteSet::single(0x0b),
            b'0' => ByteSet::single(0),
            b'd' => digit,
            b'D' => digit.complement(),
            b'w' => word,
            b'W' => word.complement(),
            b's' => space,
            b'S' => space.complement(),
            b'x' => {
                let hex = |p: &mut Parser| -> Result<u8> {
                    let h = p.bump().ok_or_else(|| p.error("truncated \\x escape"))?;
                    (h as char)
                        .to_digit(16)
                        .map(|d| d as u8)
                        .ok_or_else(|| p.error("invalid hex digit in \\x escape"))
                };
                let hi = hex(self)?;
                let lo = hex(self)?;
                ByteSet::single(hi << 4 | lo)
            }
            b if b.is_ascii_alphanumeric() => {
                self.pos -= 1;
                let kind = if in_class { "class escape" } else { "escape" };
                return Err(self.error(format!("unsupported {kind} '\\{}'", b as char)));
            }
            other => ByteSet::single(other),
        })
    }

    /// Parses a bracket class with the cursor just past `[`.
    fn class(&mut self) -> Result<Ast> {
        let negated = self.eat(b'^');
        let mut set = ByteSet::empty();
        let mut first = true;
        loop {
            let b = self
                .bump()
                .ok_or_else(|| self.error("unclosed character class"))?;
            if b == b']' && !first {
                break;
            }
            first = false;
            let lo = if b == b'\\' {
                let esc = self.escape(true)?;
                if esc.iter().count() != 1 {
                    set = set.union(&esc);
                    continue;
                }
                esc.iter().next().unwrap()
            } else {
                b
            };
            if self.peek() == Some(b'-') && self.bytes.get(self.pos + 1).is_some_and(|&n| n != b']')
            {
                self.pos += 1;
                let hb = self.bump().unwrap();
                let hi = if hb == b'\\' {
                    let esc = self.escape(true)?;
                    if esc.iter().count() != 1 {
                        return Err(self.error("class shorthand cannot end a range"));
                    }
                    esc.iter().next().unwrap()
                } else {
                    hb
                };
                if hi < lo {
                    return Err(self.error("reversed class range"));
                }
                set = set.union(&ByteSet::range(lo, hi));
            } else {
                set.insert(lo);
            }
        }
        Ok(Ast::Class(if negated { set.complement() } else { set }))
    }
}
