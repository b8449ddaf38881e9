//! Minimal SPICE-like netlists.
//!
//! ```text
//! # comment
//! R1 a gnd 10
//! C0 a b 1p
//! L1 b c 0.1n
//! PORT b gnd
//! PARAM R1 12        # optional value override
//! ```
//!
//! Values are decimals with an optional SI suffix (`p n u m k M G`). Names and
//! nodes are case-sensitive; `gnd` is the conventional ground.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use crate::circuit::{CircuitNetwork, Element, ElementKind};

const SUFFIXES: [(char, i32); 7] = [('p', -12), ('n', -9), ('u', -6), ('m', -3), ('k', 3), ('M', 6), ('G', 9)];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    /// 1-based line number.
    pub line: usize,
    /// 1-based character column of the offending token.
    pub column: usize,
    pub token: String,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.column, self.message)?;
        if !self.token.is_empty() {
            write!(f, " (at `{}`)", self.token)?;
        }
        Ok(())
    }
}

/// All problems found in a netlist.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{} netlist error(s):\n{}", .0.len(), render(.0))]
pub struct ParseErrors(pub Vec<Diagnostic>);

fn render(d: &[Diagnostic]) -> String {
    d.iter().map(|d| format!("  {d}")).collect::<Vec<_>>().join("\n")
}

struct Token<'a> {
    text: &'a str,
    column: usize,
}

fn tokenize(line: &str) -> Vec<Token<'_>> {
    let body = line.split('#').next().unwrap_or("");
    let mut out = Vec::new();
    let mut start: Option<usize> = None;
    for (i, ch) in body.char_indices().chain(std::iter::once((body.len(), ' '))) {
        match (ch.is_whitespace(), start) {
            (true, Some(s)) => {
                out.push(Token {
                    text: &body[s..i],
                    column: body[..s].chars().count() + 1,
                });
                start = None;
            }
            (false, None) => start = Some(i),
            _ => {}
        }
    }
    out
}

/// Parses a value with optional SI suffix. Errors are messages.
pub fn parse_value(s: &str) -> Result<f64, String> {
    let last = s.chars().last().ok_or_else(|| "empty value".to_string())?;
    let (num, exp) = if last.is_alphabetic() {
        match SUFFIXES.iter().find(|(k, _)| *k == last) {
            Some(&(_, e)) => (&s[..s.len() - last.len_utf8()], e),
            // Words such as `inf` reach the finiteness check below.
            None if s.parse::<f64>().is_ok() => (s, 0),
            None => return Err(format!("unknown suffix '{last}'")),
        }
    } else {
        (s, 0)
    };
    if num.is_empty() || !num.starts_with(|c: char| c.is_ascii_digit() || matches!(c, '.' | '+' | '-')) {
        return Err("not a number".into());
    }
    let v = if exp == 0 {
        num.parse::<f64>()
    } else if num.contains(['e', 'E']) {
        num.parse::<f64>().map(|v| v * 10f64.powi(exp))
    } else {
        // Correctly rounded: let the float parser apply the exponent.
        format!("{num}e{exp}").parse::<f64>()
    }
    .map_err(|_| "not a number".to_string())?;
    if !v.is_finite() {
        return Err("value must be finite".into());
    }
    if v <= 0.0 {
        return Err("value must be positive".into());
    }
    Ok(v)
}

/// Parses a netlist, collecting every diagnostic rather than stopping at the
/// first.
pub fn parse(text: &str) -> Result<CircuitNetwork, ParseErrors> {
    let mut diags = Vec::new();
    let mut elements: Vec<Element> = Vec::new();
    let mut by_name: HashMap<String, usize> = HashMap::new();
    let mut port: Option<(String, String, usize)> = None;
    let mut port_line: Option<usize> = None;
    let mut params: Vec<(usize, usize, String, f64)> = Vec::new();
    let mut last_line = 1;

    for (ln, line) in text.lines().enumerate() {
        let ln = ln + 1;
        last_line = ln;
        let toks = tokenize(line);
        let Some(head) = toks.first() else { continue };
        let mut diag = |t: &Token, msg: String| {
            diags.push(Diagnostic {
                line: ln,
                column: t.column,
                token: t.text.to_string(),
                message: msg,
            })
        };
        match head.text {
            "PORT" => {
                if toks.len() != 3 {
                    diag(head, format!("PORT expects 2 nodes, found {}", toks.len() - 1));
                    continue;
                }
                if let Some(first) = port_line {
                    diag(head, format!("duplicate PORT directive (first on line {first})"));
                    continue;
                }
                port_line = Some(ln);
                if toks[1].text == toks[2].text {
                    diag(&toks[2], "port nodes identical".into());
                    continue;
                }
                port = Some((toks[1].text.into(), toks[2].text.into(), ln));
            }
            "PARAM" => {
                if toks.len() != 3 {
                    diag(head, format!("PARAM expects an element name and a value, found {} token(s)", toks.len() - 1));
                    continue;
                }
                match parse_value(toks[2].text) {
                    Ok(v) => params.push((ln, toks[1].column, toks[1].text.into(), v)),
                    Err(m) => diag(&toks[2], m),
                }
            }
            name => {
                let Some(kind) = name.chars().next().and_then(ElementKind::from_prefix) else {
                    diag(head, "expected an element (R, C, L), PORT or PARAM".into());
                    continue;
                };
                if toks.len() != 4 {
                    diag(head, format!("{kind} expects 2 nodes and a value, found {} token(s)", toks.len() - 1));
                    continue;
                }
                let value = match parse_value(toks[3].text) {
                    Ok(v) => v,
                    Err(m) => {
                        diag(&toks[3], m);
                        continue;
                    }
                };
                if toks[1].text == toks[2].text {
                    diag(&toks[2], format!("element {name} connects node to itself"));
                    continue;
                }
                if by_name.contains_key(name) {
                    diag(head, format!("duplicate element name {name}"));
                    continue;
                }
                by_name.insert(name.into(), elements.len());
                elements.push(Element::new(kind, name, toks[1].text, toks[2].text, value));
            }
        }
    }

    for (ln, col, name, v) in params {
        match by_name.get(&name) {
            Some(&i) => elements[i].value = v,
            None => diags.push(Diagnostic {
                line: ln,
                column: col,
                token: name.clone(),
                message: format!("PARAM refers to unknown element {name}"),
            }),
        }
    }

    let Some((pa, pb, pline)) = port else {
        if port_line.is_none() {
            diags.push(Diagnostic {
                line: last_line,
                column: 1,
                token: String::new(),
                message: "missing PORT directive".into(),
            });
        }
        return Err(ParseErrors(diags));
    };
    if elements.is_empty() && diags.is_empty() {
        diags.push(Diagnostic {
            line: last_line,
            column: 1,
            token: String::new(),
            message: "netlist has no elements".into(),
        });
    }
    if !diags.is_empty() {
        return Err(ParseErrors(diags));
    }
    CircuitNetwork::new(elements, (pa.clone(), pb)).map_err(|e| {
        ParseErrors(vec![Diagnostic {
            line: pline,
            column: 1,
            token: pa,
            message: e.to_string(),
        }])
    })
}

/// Formats a value so that [`parse_value`] returns the same bits.
pub fn format_value(v: f64) -> String {
    let e3 = ((v.log10() / 3.0).floor() as i32 * 3).clamp(-12, 9);
    if e3 != 0 {
        if let Some(&(c, _)) = SUFFIXES.iter().find(|(_, e)| *e == e3) {
            let s = format!("{}{c}", v / 10f64.powi(e3));
            if parse_value(&s) == Ok(v) {
                return s;
            }
        }
    }
    let plain = format!("{v}");
    if plain.len() <= 12 && parse_value(&plain) == Ok(v) {
        return plain;
    }
    format!("{v:e}")
}

/// Canonical text: elements sorted by name, then the PORT line.
pub fn unparse(net: &CircuitNetwork) -> String {
    let mut els: Vec<&Element> = net.elements().iter().collect();
    els.sort_by(|a, b| a.name.cmp(&b.name));
    let mut out = String::new();
    for e in els {
        let prefix = e.kind.prefix();
        let name = if e.name.starts_with(prefix) {
            e.name.clone()
        } else {
            format!("{prefix}_{}", e.name)
        };
        out.push_str(&format!("{name} {} {} {}\n", e.a, e.b, format_value(e.value)));
    }
    let (a, b) = net.port();
    out.push_str(&format!("PORT {a} {b}\n"));
    out
}
