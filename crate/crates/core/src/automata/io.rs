//! Line-oriented text formats for DFAs and rule files.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use super::Dfa;
use crate::{Error, Result, StateId};

/// Writes `dfa` in the `DFA 1` text format.
pub fn write_dfa_to<W: Write>(dfa: &Dfa, mut out: W) -> Result<()> {
    let accepting: Vec<StateId> = dfa.accepting_states().collect();
    writeln!(out, "DFA 1")?;
    writeln!(out, "states {}", dfa.state_count())?;
    writeln!(out, "alphabet {}", dfa.alphabet_size())?;
    writeln!(out, "start {}", dfa.start())?;
    write!(out, "accept {}", accepting.len())?;
    for a in &accepting {
        write!(out, " {a}")?;
    }
    writeln!(out)?;
    let mut line = String::new();
    for u in 0..dfa.state_count() as StateId {
        line.clear();
        for (i, t) in dfa.row(u).iter().enumerate() {
            if i > 0 {
                line.push(' ');
            }
            line.push_str(&t.to_string());
        }
        writeln!(out, "{line}")?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_dfa(dfa: &Dfa, path: impl AsRef<Path>) -> Result<()> {
    let file = fs::File::create(path)?;
    write_dfa_to(dfa, BufWriter::new(file))
}

pub fn read_dfa(path: impl AsRef<Path>) -> Result<Dfa> {
    parse_dfa(&fs::read_to_string(path)?)
}

/// Non-empty lines with `#` comments removed, paired with 1-based line numbers.
pub(crate) fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let line = raw.split('#').next().unwrap_or("").trim();
        (!line.is_empty()).then_some((i + 1, line))
    })
}

pub(crate) struct HeaderReader<'a, I: Iterator<Item = (usize, &'a str)>> {
    pub lines: I,
    pub last_line: usize,
}

impl<'a, I: Iterator<Item = (usize, &'a str)>> HeaderReader<'a, I> {
    pub fn format_error(&self, message: impl Into<String>) -> Error {
        Error::Format {
            line: self.last_line,
            message: message.into(),
        }
    }

    pub fn next_line(&mut self, what: &str) -> Result<&'a str> {
        match self.lines.next() {
            Some((no, line)) => {
                self.last_line = no;
                Ok(line)
            }
            None => Err(self.format_error(format!("unexpected end of file, expected {what}"))),
        }
    }

    /// Reads `<key> <values...>` and returns the values.
    pub fn keyed(&mut self, key: &str) -> Result<Vec<u64>> {
        let line = self.next_line(key)?;
        let mut fields = line.split_whitespace();
        if fields.next() != Some(key) {
            return Err(self.format_error(format!("expected '{key}' line, found '{line}'")));
        }
        fields
            .map(|f| {
                f.parse::<u64>()
                    .map_err(|_| self.format_error(format!("'{f}' is not a non-negative integer")))
            })
            .collect()
    }

    pub fn single(&mut self, key: &str) -> Result<u64> {
        let values = self.keyed(key)?;
        match values.as_slice() {
            [v] => Ok(*v),
            _ => Err(self.format_error(format!("'{key}' takes exactly one value"))),
        }
    }

    pub fn magic(&mut self, magic: &str) -> Result<()> {
        let line = self.next_line("header")?;
        let mut fields = line.split_whitespace();
        if fields.next() != Some(magic) {
            return Err(self.format_error(format!("malformed header: expected '{magic} 1'")));
        }
        match fields.next() {
            Some("1") if fields.next().is_none() => Ok(()),
            _ => Err(self.format_error(format!("unsupported {magic} format version"))),
        }
    }
}

pub(crate) fn state_id(raw: u64, n: usize) -> Result<StateId> {
    if raw >= n as u64 {
        Err(Error::StateOutOfRange { id: raw, n })
    } else {
        Ok(raw as StateId)
    }
}

/// Parses the `DFA 1` text format and validates the automaton.
pub fn parse_dfa(text: &str) -> Result<Dfa> {
    let mut r = HeaderReader {
        lines: content_lines(text),
        last_line: 0,
    };
    r.magic("DFA")?;
    let n = r.single("states")? as usize;
    let m = r.single("alphabet")? as usize;
    if n == 0 {
        return Err(r.format_error("a DFA needs at least one state"));
    }
    if m == 0 || m > super::MAX_ALPHABET {
        return Err(r.format_error(format!("alphabet size {m} not in 1..=256")));
    }
    let start = state_id(r.single("start")?, n)?;
    let accept = r.keyed("accept")?;
    let Some((&k, ids)) = accept.split_first() else {
        return Err(r.format_error("'accept' needs a count"));
    };
    if k as usize != ids.len() {
        return Err(r.format_error(format!("accept count {k} but {} ids listed", ids.len())));
    }
    let accepting = ids
        .iter()
        .map(|&a| state_id(a, n))
        .collect::<Result<Vec<_>>>()?;

    let mut table = Vec::with_capacity(n * m);
    for u in 0..n {
        let line = r
            .next_line("transition row")
            .map_err(|_| r.format_error(format!("truncated table: found {u} of {n} rows")))?;
        let before = table.len();
        for f in line.split_whitespace() {
            let raw = f
                .parse::<u64>()
                .map_err(|_| r.format_error(format!("'{f}' is not a state id")))?;
            table.push(state_id(raw, n)?);
        }
        if table.len() - before != m {
            return Err(r.format_error(format!(
                "row {u} has {} entries, expected {m}",
                table.len() - before
            )));
        }
    }
    if let Some((no, _)) = r.lines.next() {
        return Err(Error::Format {
            line: no,
            message: "trailing content after transition table".into(),
        });
    }
    Dfa::new(m, table, start, accepting)
}

/// Patterns from a rule file with their source line numbers.
#[derive(Debug, Clone, Default)]
pub struct RuleFile {
    pub patterns: Vec<String>,
    pub lines: Vec<usize>,
}

/// One pattern per line; lines starting with `#` and blank lines are skipped.
pub fn parse_rules(text: &str) -> RuleFile {
    let mut rules = RuleFile::default();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim_end_matches('\r');
        if line.trim().is_empty() || line.trim_start().starts_with('#') {
            continue;
        }
        rules.patterns.push(line.to_string());
        rules.lines.push(i + 1);
    }
    rules
}

pub fn read_rules(path: impl AsRef<Path>) -> Result<RuleFile> {
    Ok(parse_rules(&fs::read_to_string(path)?))
}
