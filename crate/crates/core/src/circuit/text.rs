//! Line-oriented text format.
//!
//! ```text
//! QCIRC v1 <num_wires>
//! REG <name> <role> <first_wire> <width>
//! NOT <t>
//! CNOT <c> <t>
//! TOFF <c1> <c2> <t>
//! ```
//!
//! `#` starts a comment. Lines of the form `#@ <depth> <start> <end> <label>`
//! are still comments to any other reader, but carry block spans so that a
//! parsed circuit keeps its trace boundaries.

use std::fmt::Write as _;

use thiserror::Error;

use super::{Circuit, CircuitError, Gate, GateKind, Register, RegisterLayout, Role, Span, Wire};

const MAGIC: &str = "QCIRC";
const VERSION: &str = "v1";
const SPAN_PREFIX: &str = "#@ ";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("missing `QCIRC v1 <num_wires>` header")]
    MissingHeader,
    #[error("malformed header: {0}")]
    BadHeader(String),
    #[error("header appears twice")]
    DuplicateHeader,
    #[error("unknown directive `{0}`")]
    UnknownDirective(String),
    #[error("`{op}` takes {expected} operands, found {found}")]
    Arity {
        op: String,
        expected: usize,
        found: usize,
    },
    #[error("fields must be separated by single spaces")]
    Spacing,
    #[error("expected a decimal integer, found `{0}`")]
    BadNumber(String),
    #[error("unknown register role `{0}`")]
    UnknownRole(String),
    #[error("malformed span annotation")]
    BadSpan,
    #[error(transparent)]
    Circuit(#[from] CircuitError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub kind: ParseErrorKind,
}

/// Renders a circuit in the text format. Registers come first, then span
/// annotations, then one gate per line.
pub fn serialize(circuit: &Circuit) -> String {
    let mut out = String::with_capacity(16 + circuit.len() * 12);
    writeln!(out, "{MAGIC} {VERSION} {}", circuit.num_wires()).unwrap();
    for reg in circuit.layout().registers() {
        writeln!(
            out,
            "REG {} {} {} {}",
            reg.name, reg.role, reg.start, reg.width
        )
        .unwrap();
    }
    for s in circuit.spans() {
        writeln!(
            out,
            "{SPAN_PREFIX}{} {} {} {}",
            s.depth, s.start, s.end, s.label
        )
        .unwrap();
    }
    for g in circuit.gates() {
        writeln!(out, "{g}").unwrap();
    }
    out
}

fn number(tok: &str) -> Result<usize, ParseErrorKind> {
    if tok.is_empty() || !tok.bytes().all(|b| b.is_ascii_digit()) {
        return Err(ParseErrorKind::BadNumber(tok.to_owned()));
    }
    tok.parse()
        .map_err(|_| ParseErrorKind::BadNumber(tok.to_owned()))
}

fn fields(line: &str) -> Result<Vec<&str>, ParseErrorKind> {
    let toks: Vec<&str> = line.split(' ').collect();
    if toks.iter().any(|t| t.is_empty()) {
        return Err(ParseErrorKind::Spacing);
    }
    Ok(toks)
}

fn parse_span(rest: &str) -> Result<Span, ParseErrorKind> {
    let mut parts = rest.splitn(4, ' ');
    let mut next_num = || -> Result<usize, ParseErrorKind> {
        parts
            .next()
            .ok_or(ParseErrorKind::BadSpan)
            .and_then(|t| number(t).map_err(|_| ParseErrorKind::BadSpan))
    };
    let depth = next_num()?;
    let start = next_num()?;
    let end = next_num()?;
    let label = parts.next().ok_or(ParseErrorKind::BadSpan)?.to_owned();
    Ok(Span {
        depth,
        start,
        end,
        label,
    })
}

struct Parser {
    num_wires: Option<usize>,
    layout: RegisterLayout,
    gates: Vec<Gate>,
    spans: Vec<Span>,
}

impl Parser {
    fn line(&mut self, raw: &str) -> Result<(), ParseErrorKind> {
        let raw = raw.strip_suffix('\r').unwrap_or(raw);
        if let Some(rest) = raw.strip_prefix(SPAN_PREFIX) {
            self.spans.push(parse_span(rest)?);
            return Ok(());
        }
        let content = match raw.find('#') {
            Some(i) => raw[..i].trim_end(),
            None => raw,
        };
        if content.trim().is_empty() {
            return Ok(());
        }
        let toks = fields(content)?;
        let (op, args) = (toks[0], &toks[1..]);

        let Some(num_wires) = self.num_wires else {
            if op != MAGIC {
                return Err(ParseErrorKind::MissingHeader);
            }
            return match args {
                [VERSION, n] => {
                    let n = number(n)?;
                    if n == 0 {
                        return Err(CircuitError::NoWires.into());
                    }
                    self.num_wires = Some(n);
                    Ok(())
                }
                [v, _] => Err(ParseErrorKind::BadHeader(format!(
                    "unsupported version `{v}`"
                ))),
                _ => Err(ParseErrorKind::BadHeader(format!(
                    "expected 2 fields after `{MAGIC}`, found {}",
                    args.len()
                ))),
            };
        };

        let kind = match op {
            MAGIC => return Err(ParseErrorKind::DuplicateHeader),
            "REG" => return self.register(args, num_wires),
            "NOT" => GateKind::Not,
            "CNOT" => GateKind::Cnot,
            "TOFF" => GateKind::Toffoli,
            other => return Err(ParseErrorKind::UnknownDirective(other.to_owned())),
        };
        if args.len() != kind.arity() {
            return Err(ParseErrorKind::Arity {
                op: op.to_owned(),
                expected: kind.arity(),
                found: args.len(),
            });
        }
        let wires = args
            .iter()
            .map(|t| number(t))
            .collect::<Result<Vec<Wire>, _>>()?;
        if let Some(&w) = wires.iter().find(|&&w| w >= num_wires) {
            return Err(CircuitError::WireOutOfRange { wire: w, num_wires }.into());
        }
        self.gates.push(Gate::from_wires(kind, &wires)?);
        Ok(())
    }

    fn register(&mut self, args: &[&str], num_wires: usize) -> Result<(), ParseErrorKind> {
        let [name, role, start, width] = args else {
            return Err(ParseErrorKind::Arity {
                op: "REG".into(),
                expected: 4,
                found: args.len(),
            });
        };
        let role =
            Role::from_name(role).ok_or_else(|| ParseErrorKind::UnknownRole(role.to_string()))?;
        let reg = Register {
            name: name.to_string(),
            role,
            start: number(start)?,
            width: number(width)?,
        };
        if reg.start + reg.width > num_wires {
            return Err(CircuitError::RegisterOutOfRange {
                name: reg.name,
                num_wires,
            }
            .into());
        }
        self.layout.push(reg)?;
        Ok(())
    }
}

/// Parses the text format. Errors carry the 1-based line number; problems
/// that only show up once the whole file is read (uncovered wires, spans
/// past the last gate) are reported against the last line.
pub fn parse(text: &str) -> Result<Circuit, ParseError> {
    let mut p = Parser {
        num_wires: None,
        layout: RegisterLayout::empty(),
        gates: Vec::new(),
        spans: Vec::new(),
    };
    let mut last = 0;
    for (i, raw) in text.lines().enumerate() {
        last = i + 1;
        p.line(raw)
            .map_err(|kind| ParseError { line: i + 1, kind })?;
    }
    let num_wires = p.num_wires.ok_or(ParseError {
        line: last.max(1),
        kind: ParseErrorKind::MissingHeader,
    })?;
    Circuit::from_parts(num_wires, p.layout, p.gates, p.spans).map_err(|e| ParseError {
        line: last,
        kind: e.into(),
    })
}

impl std::str::FromStr for Circuit {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kind_of(text: &str) -> ParseErrorKind {
        parse(text).unwrap_err().kind
    }

    #[test]
    fn toffoli_line() {
        assert_eq!(Gate::toffoli(1, 4, 9).unwrap().to_string(), "TOFF 1 4 9");
        let c = parse("QCIRC v1 10\nTOFF 1 4 9\n").unwrap();
        assert_eq!(c.gates(), &[Gate::toffoli(1, 4, 9).unwrap()]);
    }

    #[test]
    fn serialize_layout_and_gates() {
        let layout =
            RegisterLayout::stacked([("a", Role::InputA, 2), ("t", Role::OverflowT, 1)]).unwrap();
        let mut c = Circuit::with_layout(layout).unwrap();
        c.append_gate(Gate::cnot(0, 2).unwrap()).unwrap();
        c.append_gate(Gate::not(1)).unwrap();
        assert_eq!(
            serialize(&c),
            "QCIRC v1 3\nREG a input_a 0 2\nREG t overflow_t 2 1\nCNOT 0 2\nNOT 1\n"
        );
        assert_eq!(parse(&serialize(&c)).unwrap(), c);
    }

    #[test]
    fn comments_and_blank_lines() {
        let c = parse("# leading\n\nQCIRC v1 2 # two wires\nCNOT 0 1 # copy\n#NOT 0\n").unwrap();
        assert_eq!(c.len(), 1);
    }

    #[test]
    fn arity_error_reports_line() {
        let err = parse("QCIRC v1 4\nCNOT 3\n").unwrap_err();
        assert_eq!(err.line, 2);
        assert_eq!(
            err.kind,
            ParseErrorKind::Arity {
                op: "CNOT".into(),
                expected: 2,
                found: 1
            }
        );
    }

    #[test]
    fn malformed_inputs() {
        assert_eq!(kind_of("CNOT 0 1\n"), ParseErrorKind::MissingHeader);
        assert_eq!(kind_of(""), ParseErrorKind::MissingHeader);
        assert!(matches!(
            kind_of("QCIRC v2 3\n"),
            ParseErrorKind::BadHeader(_)
        ));
        assert!(matches!(
            kind_of("QCIRC v1\n"),
            ParseErrorKind::BadHeader(_)
        ));
        assert_eq!(kind_of("QCIRC v1 3\nCNOT  0 1\n"), ParseErrorKind::Spacing);
        assert_eq!(
            kind_of("QCIRC v1 3\nCNOT 0 x\n"),
            ParseErrorKind::BadNumber("x".into())
        );
        assert_eq!(
            kind_of("QCIRC v1 3\nCNOT 0 -1\n"),
            ParseErrorKind::BadNumber("-1".into())
        );
        assert_eq!(
            kind_of("QCIRC v1 3\nSWAP 0 1\n"),
            ParseErrorKind::UnknownDirective("SWAP".into())
        );
        assert_eq!(
            kind_of("QCIRC v1 3\nQCIRC v1 3\n"),
            ParseErrorKind::DuplicateHeader
        );
        assert!(matches!(
            kind_of("QCIRC v1 3\nCNOT 1 1\n"),
            ParseErrorKind::Circuit(CircuitError::DuplicateWire { .. })
        ));
        assert!(matches!(
            kind_of("QCIRC v1 3\nNOT 3\n"),
            ParseErrorKind::Circuit(CircuitError::WireOutOfRange { .. })
        ));
        assert_eq!(
            kind_of("QCIRC v1 3\nREG a bogus 0 3\n"),
            ParseErrorKind::UnknownRole("bogus".into())
        );
        assert!(matches!(
            kind_of("QCIRC v1 3\nREG a input_a 0 2\n"),
            ParseErrorKind::Circuit(CircuitError::UncoveredWire(2))
        ));
        assert!(matches!(
            kind_of("QCIRC v1 3\n#@ 0 0 5 block\nNOT 0\n"),
            ParseErrorKind::Circuit(CircuitError::SpanOutOfRange { .. })
        ));
        assert_eq!(kind_of("QCIRC v1 3\n#@ 0 x 1 b\n"), ParseErrorKind::BadSpan);
    }

    #[test]
    fn spans_survive_round_trip() {
        let text = "QCIRC v1 2\n#@ 0 0 2 carry 3\n#@ 1 1 2 inner\nNOT 0\nNOT 1\n";
        let c = parse(text).unwrap();
        assert_eq!(c.spans().len(), 2);
        assert_eq!(c.spans()[0].label, "carry 3");
        assert_eq!(serialize(&c), text);
    }
}
