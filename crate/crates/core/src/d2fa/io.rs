use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use super::D2fa;
use crate::automata::io::{content_lines, state_id, HeaderReader};
use crate::{Error, Result, StateId};

/// Writes the `D2FA 1` text format. Output is a pure function of the D²FA.
pub fn write_d2fa_to<W: Write>(d2fa: &D2fa, mut out: W) -> Result<()> {
    let accepting: Vec<StateId> = d2fa.accepting_states().collect();
    writeln!(out, "D2FA 1")?;
    writeln!(out, "states {}", d2fa.state_count())?;
    writeln!(out, "alphabet {}", d2fa.alphabet_size())?;
    writeln!(out, "start {}", d2fa.start())?;
    write!(out, "accept {}", accepting.len())?;
    for a in &accepting {
        write!(out, " {a}")?;
    }
    writeln!(out)?;
    let mut line = String::new();
    for u in 0..d2fa.state_count() as StateId {
        line.clear();
        line.push_str("default ");
        match d2fa.default_of(u) {
            Some(f) => line.push_str(&f.to_string()),
            None => line.push('-'),
        }
        line.push_str(" ;");
        for (c, t) in d2fa.labeled_row(u) {
            line.push(' ');
            line.push_str(&c.to_string());
            line.push(':');
            line.push_str(&t.to_string());
        }
        writeln!(out, "{line}")?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_d2fa(d2fa: &D2fa, path: impl AsRef<Path>) -> Result<()> {
    write_d2fa_to(d2fa, BufWriter::new(fs::File::create(path)?))
}

pub fn read_d2fa(path: impl AsRef<Path>) -> Result<D2fa> {
    parse_d2fa(&fs::read_to_string(path)?)
}

/// Parses the `D2FA 1` text format; the result is checked for resolvability.
pub fn parse_d2fa(text: &str) -> Result<D2fa> {
    let mut r = HeaderReader {
        lines: content_lines(text),
        last_line: 0,
    };
    r.magic("D2FA")?;
    let n = r.single("states")? as usize;
    let m = r.single("alphabet")? as usize;
    if n == 0 {
        return Err(r.format_error("a D2FA needs at least one state"));
    }
    if m == 0 || m > crate::automata::MAX_ALPHABET {
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
    let mut accepting = vec![false; n];
    for &a in ids {
        accepting[state_id(a, n)? as usize] = true;
    }

    let mut defaults = Vec::with_capacity(n);
    let mut rows = Vec::with_capacity(n);
    for u in 0..n {
        let line = r
            .next_line("state row")
            .map_err(|_| r.format_error(format!("truncated table: found {u} of {n} rows")))?;
        let (head, labeled) = line
            .split_once(';')
            .ok_or_else(|| r.format_error("state row needs 'default <id|-> ;'"))?;
        let mut head = head.split_whitespace();
        if head.next() != Some("default") {
            return Err(r.format_error("state row must start with 'default'"));
        }
        let default = match (head.next(), head.next()) {
            (Some("-"), None) => None,
            (Some(id), None) => {
                let raw = id
                    .parse::<u64>()
                    .map_err(|_| r.format_error(format!("'{id}' is not a state id")))?;
                Some(state_id(raw, n)?)
            }
            _ => return Err(r.format_error("malformed default field")),
        };
        defaults.push(default);
        let mut row = Vec::new();
        for pair in labeled.split_whitespace() {
            let parsed = pair
                .split_once(':')
                .and_then(|(c, t)| Some((c.parse::<u64>().ok()?, t.parse::<u64>().ok()?)));
            let Some((c, t)) = parsed else {
                return Err(r.format_error(format!("'{pair}' is not a <symbol>:<state> pair")));
            };
            if c as usize >= m {
                return Err(r.format_error(format!("symbol {c} outside alphabet of size {m}")));
            }
            row.push((c as u8, state_id(t, n)?));
        }
        rows.push(row);
    }
    if let Some((no, _)) = r.lines.next() {
        return Err(Error::Format {
            line: no,
            message: "trailing content after state rows".into(),
        });
    }
    D2fa::from_parts(m, start, accepting, defaults, rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automata::toy_dfa;
    use crate::d2fa::build_from_forest;
    use crate::forest::Forest;

    #[test]
    fn toy_round_trip() {
        let forest = Forest::from_parents(vec![None, Some(0), Some(0), Some(0)]).unwrap();
        let d = build_from_forest(&toy_dfa(), &forest).unwrap();
        let mut buf = Vec::new();
        write_d2fa_to(&d, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(
            text,
            "D2FA 1\nstates 4\nalphabet 2\nstart 0\naccept 1 3\n\
             default - ; 0:1 1:0\ndefault 0 ; 1:2\ndefault 0 ; 1:3\ndefault 0 ;\n"
        );
        assert_eq!(parse_d2fa(&text).unwrap(), d);
    }

    #[test]
    fn rejects_malformed_rows() {
        let head = "D2FA 1\nstates 2\nalphabet 2\nstart 0\naccept 0\n";
        let cases = [
            "default - ; 0:1 1:0\ndefault 0 1:1\n",
            "default - ; 0:1 1:0\nfallback 0 ; 1:1\n",
            "default - ; 0:1 1:0\ndefault 0 ; 2:1\n",
            "default - ; 0:1 1:0\ndefault 0 ; 1-1\n",
            "default - ; 0:1 1:0\n",
        ];
        for body in cases {
            let err = parse_d2fa(&format!("{head}{body}")).unwrap_err();
            assert!(matches!(err, Error::Format { .. }), "{body:?}: {err}");
        }
        let err = parse_d2fa(&format!("{head}default - ; 0:1 1:0\ndefault 5 ; 1:1\n")).unwrap_err();
        assert!(matches!(err, Error::StateOutOfRange { id: 5, .. }));
        let err = parse_d2fa(&format!("{head}default - ; 0:1 1:0\ndefault - ; 1:1\n")).unwrap_err();
        assert!(matches!(
            err,
            Error::Unresolvable {
                state: 1,
                symbol: 0
            }
        ));
    }
}
