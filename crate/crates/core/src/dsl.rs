//! A small line-oriented circuit description language.
//!
//! One declaration or element per line; `#` starts a comment. Example:
//!
//! ```text
//! register arm L R
//! register mode 1 2 3 4
//! bs_sym 2 4 on arm=R
//! sigma1234 on arm=R
//! bs3
//! wave_router pi/2 pi/2
//! ```
//!
//! Angles are radians; the named constants `pi`, `pi/2` and `pi/4` are
//! accepted wherever a number is. The optional clause `on <register>=<label>`
//! makes an element act only when that register carries the label.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::hilbert::{CompositeSpace, HilbertError, LinearOperator, Register, StateVector};
use crate::optics;

/// Machine-matchable parse failure categories.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParseErrorKind {
    UnknownElement,
    UnknownLabel,
    ArityMismatch,
    BadNumber,
    Syntax,
}

/// A parse failure pointing at the offending token.
#[derive(Debug, Clone, PartialEq)]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub kind: ParseErrorKind,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}:{}: {:?}: {}",
            self.line, self.column, self.kind, self.message
        )
    }
}

impl core::error::Error for ParseError {}

/// A compile failure: the parsed circuit does not fit the declared
/// registers.
#[derive(Debug, Clone, PartialEq)]
pub struct CompileError {
    pub line: usize,
    pub message: String,
}

impl fmt::Display for CompileError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}", self.line, self.message)
    }
}

impl core::error::Error for CompileError {}

/// Register declaration: a name plus its ordered basis labels.
#[derive(Debug, Clone, PartialEq)]
pub struct RegisterDecl {
    pub name: String,
    pub labels: Vec<String>,
}

/// The element vocabulary of the language.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ElementName {
    Pbs,
    Hwp,
    BsSym,
    Phase,
    Sigma1234,
    Bs3,
    WaveRouter,
}

impl ElementName {
    fn from_keyword(kw: &str) -> Option<Self> {
        match kw {
            "pbs" => Some(ElementName::Pbs),
            "hwp" => Some(ElementName::Hwp),
            "bs_sym" => Some(ElementName::BsSym),
            "phase" => Some(ElementName::Phase),
            "sigma1234" => Some(ElementName::Sigma1234),
            "bs3" => Some(ElementName::Bs3),
            "wave_router" => Some(ElementName::WaveRouter),
            _ => None,
        }
    }

    pub fn keyword(&self) -> &'static str {
        match self {
            ElementName::Pbs => "pbs",
            ElementName::Hwp => "hwp",
            ElementName::BsSym => "bs_sym",
            ElementName::Phase => "phase",
            ElementName::Sigma1234 => "sigma1234",
            ElementName::Bs3 => "bs3",
            ElementName::WaveRouter => "wave_router",
        }
    }

    /// (port arguments, numeric parameters)
    fn arity(&self) -> (usize, usize) {
        match self {
            ElementName::Pbs | ElementName::Hwp | ElementName::Sigma1234 | ElementName::Bs3 => {
                (0, 0)
            }
            ElementName::BsSym => (2, 0),
            ElementName::Phase => (1, 1),
            ElementName::WaveRouter => (0, 2),
        }
    }
}

/// One element line: ports, parameters and the optional control clause.
#[derive(Debug, Clone, PartialEq)]
pub struct ElementStmt {
    pub name: ElementName,
    pub ports: Vec<String>,
    pub params: Vec<f64>,
    /// `on <register>=<label>`
    pub control: Option<(String, String)>,
    pub line: usize,
}

/// Optional pre/post-selection directives.
#[derive(Debug, Clone, PartialEq)]
pub enum Selection {
    /// `pre <alpha> <phi1> <phi2>`
    Pre { alpha: f64, phi1: f64, phi2: f64 },
    /// `post <phi1> <phi2>`
    Post { phi1: f64, phi2: f64 },
}

/// Parsed AST of a circuit description file.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct CircuitSpec {
    pub registers: Vec<RegisterDecl>,
    pub elements: Vec<ElementStmt>,
    pub selections: Vec<Selection>,
}

struct Token<'a> {
    text: &'a str,
    column: usize,
}

fn tokenize(line: &str) -> Vec<Token<'_>> {
    let mut tokens = Vec::new();
    let mut start = None;
    let mut start_col = 1usize;
    for (column, (i, c)) in (1usize..).zip(line.char_indices()) {
        if c == '#' {
            break;
        }
        if c.is_whitespace() {
            if let Some(s) = start.take() {
                tokens.push(Token {
                    text: &line[s..i],
                    column: start_col,
                });
            }
        } else if start.is_none() {
            start = Some(i);
            start_col = column;
        }
    }
    if let Some(s) = start {
        let end = line.find('#').unwrap_or(line.len());
        tokens.push(Token {
            text: &line[s..end],
            column: start_col,
        });
    }
    tokens
}

fn parse_number(tok: &Token<'_>, line: usize) -> Result<f64, ParseError> {
    let v = match tok.text {
        "pi" => core::f64::consts::PI,
        "pi/2" => core::f64::consts::FRAC_PI_2,
        "pi/4" => core::f64::consts::FRAC_PI_4,
        other => other.parse::<f64>().map_err(|_| ParseError {
            line,
            column: tok.column,
            kind: ParseErrorKind::BadNumber,
            message: format!("expected a number or pi constant, got {other:?}"),
        })?,
    };
    if !v.is_finite() {
        return Err(ParseError {
            line,
            column: tok.column,
            kind: ParseErrorKind::BadNumber,
            message: format!("parameter must be finite, got {v}"),
        });
    }
    Ok(v)
}

/// Parses circuit text. Deterministic; the first error wins. Accepts LF or
/// CRLF line endings.
pub fn parse(text: &str) -> Result<CircuitSpec, ParseError> {
    let mut spec = CircuitSpec::default();
    for (line_idx, raw_line) in text.split('\n').enumerate() {
        let line_no = line_idx + 1;
        let line = raw_line.strip_suffix('\r').unwrap_or(raw_line);
        let tokens = tokenize(line);
        let Some(head) = tokens.first() else {
            continue;
        };
        match head.text {
            "register" => parse_register(&tokens, line_no, &mut spec)?,
            "pre" | "post" => parse_selection(&tokens, line_no, &mut spec)?,
            keyword => {
                let Some(name) = ElementName::from_keyword(keyword) else {
                    return Err(ParseError {
                        line: line_no,
                        column: head.column,
                        kind: ParseErrorKind::UnknownElement,
                        message: format!("unknown element {keyword:?}"),
                    });
                };
                parse_element(name, &tokens, line_no, &mut spec)?;
            }
        }
    }
    Ok(spec)
}

fn parse_register(
    tokens: &[Token<'_>],
    line: usize,
    spec: &mut CircuitSpec,
) -> Result<(), ParseError> {
    if tokens.len() < 3 {
        return Err(ParseError {
            line,
            column: tokens[0].column,
            kind: ParseErrorKind::ArityMismatch,
            message: "register needs a name and at least one label".to_string(),
        });
    }
    let name = tokens[1].text.to_string();
    if spec.registers.iter().any(|r| r.name == name) {
        return Err(ParseError {
            line,
            column: tokens[1].column,
            kind: ParseErrorKind::Syntax,
            message: format!("register {name:?} already declared"),
        });
    }
    let mut labels = Vec::new();
    for tok in &tokens[2..] {
        if labels.iter().any(|l| l == tok.text) {
            return Err(ParseError {
                line,
                column: tok.column,
                kind: ParseErrorKind::Syntax,
                message: format!("duplicate label {:?}", tok.text),
            });
        }
        labels.push(tok.text.to_string());
    }
    spec.registers.push(RegisterDecl { name, labels });
    Ok(())
}

fn parse_selection(
    tokens: &[Token<'_>],
    line: usize,
    spec: &mut CircuitSpec,
) -> Result<(), ParseError> {
    let is_pre = tokens[0].text == "pre";
    let want = if is_pre { 3 } else { 2 };
    if tokens.len() != want + 1 {
        return Err(ParseError {
            line,
            column: tokens[0].column,
            kind: ParseErrorKind::ArityMismatch,
            message: format!("{} expects {want} numeric arguments", tokens[0].text),
        });
    }
    let mut nums = Vec::with_capacity(want);
    for tok in &tokens[1..] {
        nums.push(parse_number(tok, line)?);
    }
    spec.selections.push(if is_pre {
        Selection::Pre {
            alpha: nums[0],
            phi1: nums[1],
            phi2: nums[2],
        }
    } else {
        Selection::Post {
            phi1: nums[0],
            phi2: nums[1],
        }
    });
    Ok(())
}

fn parse_element(
    name: ElementName,
    tokens: &[Token<'_>],
    line: usize,
    spec: &mut CircuitSpec,
) -> Result<(), ParseError> {
    // split off the optional "on reg=label" clause
    let mut args_end = tokens.len();
    let mut control = None;
    if let Some(pos) = tokens.iter().position(|t| t.text == "on") {
        if pos + 2 != tokens.len() {
            return Err(ParseError {
                line,
                column: tokens[pos].column,
                kind: ParseErrorKind::Syntax,
                message: "control clause must be `on <register>=<label>` at end of line"
                    .to_string(),
            });
        }
        let clause = &tokens[pos + 1];
        let Some((reg, label)) = clause.text.split_once('=') else {
            return Err(ParseError {
                line,
                column: clause.column,
                kind: ParseErrorKind::Syntax,
                message: format!("expected <register>=<label>, got {:?}", clause.text),
            });
        };
        if reg.is_empty() || label.is_empty() {
            return Err(ParseError {
                line,
                column: clause.column,
                kind: ParseErrorKind::Syntax,
                message: "empty register or label in control clause".to_string(),
            });
        }
        let Some(decl) = spec.registers.iter().find(|r| r.name == reg) else {
            return Err(ParseError {
                line,
                column: clause.column,
                kind: ParseErrorKind::UnknownLabel,
                message: format!("control register {reg:?} is not declared"),
            });
        };
        if !decl.labels.iter().any(|l| l == label) {
            return Err(ParseError {
                line,
                column: clause.column,
                kind: ParseErrorKind::UnknownLabel,
                message: format!("label {label:?} not in register {reg:?}"),
            });
        }
        control = Some((reg.to_string(), label.to_string()));
        args_end = pos;
    }
    let args = &tokens[1..args_end];
    let (n_ports, n_params) = name.arity();
    if args.len() != n_ports + n_params {
        return Err(ParseError {
            line,
            column: tokens[0].column,
            kind: ParseErrorKind::ArityMismatch,
            message: format!(
                "{} expects {} port(s) and {} parameter(s), got {} argument(s)",
                name.keyword(),
                n_ports,
                n_params,
                args.len()
            ),
        });
    }
    let mut ports = Vec::with_capacity(n_ports);
    for tok in &args[..n_ports] {
        let known = spec
            .registers
            .iter()
            .any(|r| r.labels.iter().any(|l| l == tok.text));
        if !known {
            return Err(ParseError {
                line,
                column: tok.column,
                kind: ParseErrorKind::UnknownLabel,
                message: format!("port {:?} is not a declared basis label", tok.text),
            });
        }
        ports.push(tok.text.to_string());
    }
    let mut params = Vec::with_capacity(n_params);
    for tok in &args[n_ports..] {
        params.push(parse_number(tok, line)?);
    }
    spec.elements.push(ElementStmt {
        name,
        ports,
        params,
        control,
        line,
    });
    Ok(())
}

fn find_register_with_labels<'a>(
    registers: &'a [Register],
    labels: &[&str],
) -> Option<&'a Register> {
    registers.iter().find(|r| {
        labels
            .iter()
            .all(|l| r.labels().iter().any(|have| have == l))
    })
}

fn compile_err(line: usize, message: impl fmt::Display) -> CompileError {
    CompileError {
        line,
        message: message.to_string(),
    }
}

impl From<HilbertError> for CompileError {
    fn from(e: HilbertError) -> Self {
        CompileError {
            line: 0,
            message: e.to_string(),
        }
    }
}

/// The composite space declared by a circuit.
pub fn declared_space(spec: &CircuitSpec) -> Result<CompositeSpace, CompileError> {
    let mut regs = Vec::with_capacity(spec.registers.len());
    for decl in &spec.registers {
        let labels: Vec<&str> = decl.labels.iter().map(String::as_str).collect();
        regs.push(Register::new(&decl.name, &labels)?);
    }
    Ok(CompositeSpace::new(regs)?)
}

/// Compiles a circuit to its operator pipeline in file order (the first
/// line is applied first).
pub fn compile(spec: &CircuitSpec) -> Result<Vec<LinearOperator>, CompileError> {
    let space = declared_space(spec)?;
    let registers = space.registers().to_vec();
    let mut ops = Vec::with_capacity(spec.elements.len());
    for stmt in &spec.elements {
        let (element, target_names): (optics::Element, Vec<String>) = match stmt.name {
            ElementName::Pbs | ElementName::Hwp => {
                let pol = registers
                    .iter()
                    .find(|r| r.labels() == ["H", "V"])
                    .ok_or_else(|| {
                        compile_err(stmt.line, "pbs/hwp need a polarization register (H V)")
                    })?;
                let path = registers
                    .iter()
                    .find(|r| r.labels() == ["a", "1", "2", "3", "4"])
                    .ok_or_else(|| {
                        compile_err(stmt.line, "pbs/hwp need a path register (a 1 2 3 4)")
                    })?;
                let el = if stmt.name == ElementName::Pbs {
                    optics::pbs()
                } else {
                    optics::hwp_path1()
                };
                (el, alloc::vec![pol.name().to_string(), path.name().to_string()])
            }
            ElementName::BsSym => {
                let m = stmt.ports[0].as_str();
                let n = stmt.ports[1].as_str();
                let reg = find_register_with_labels(&registers, &[m, n]).ok_or_else(|| {
                    compile_err(
                        stmt.line,
                        format!("no single register holds both ports {m:?} and {n:?}"),
                    )
                })?;
                (
                    optics::bs_sym(reg, m, n).map_err(|e| compile_err(stmt.line, e))?,
                    alloc::vec![reg.name().to_string()],
                )
            }
            ElementName::Phase => {
                let l = stmt.ports[0].as_str();
                let reg = find_register_with_labels(&registers, &[l]).ok_or_else(|| {
                    compile_err(stmt.line, format!("no register holds port {l:?}"))
                })?;
                (
                    optics::phase_shifter(reg, l, stmt.params[0])
                        .map_err(|e| compile_err(stmt.line, e))?,
                    alloc::vec![reg.name().to_string()],
                )
            }
            ElementName::Sigma1234 | ElementName::WaveRouter => {
                let reg = registers
                    .iter()
                    .find(|r| r.labels() == ["1", "2", "3", "4"])
                    .ok_or_else(|| {
                        compile_err(
                            stmt.line,
                            format!("{} needs a four-mode register (1 2 3 4)", stmt.name.keyword()),
                        )
                    })?;
                let el = if stmt.name == ElementName::Sigma1234 {
                    optics::sigma1234()
                } else {
                    optics::wave_router(stmt.params[0], stmt.params[1])
                };
                (el, alloc::vec![reg.name().to_string()])
            }
            ElementName::Bs3 => {
                let reg = registers
                    .iter()
                    .find(|r| r.labels() == ["L", "R"])
                    .ok_or_else(|| {
                        compile_err(stmt.line, "bs3 needs an arm register (L R)")
                    })?;
                (optics::bs3(), alloc::vec![reg.name().to_string()])
            }
        };
        let target_refs: Vec<&str> = target_names.iter().map(String::as_str).collect();
        let op = match &stmt.control {
            None => element
                .operator()
                .embed(&target_refs, &space)
                .map_err(|e| compile_err(stmt.line, e))?,
            Some((reg, label)) => element
                .operator()
                .controlled_embed(reg, label, &target_refs, &space)
                .map_err(|e| compile_err(stmt.line, e))?,
        };
        ops.push(op);
    }
    Ok(ops)
}

/// Applies a compiled pipeline to a state, first line first.
pub fn run_pipeline(
    ops: &[LinearOperator],
    state: &StateVector,
) -> Result<StateVector, HilbertError> {
    let mut s = state.clone();
    for op in ops {
        s = op.apply(&s)?;
    }
    Ok(s)
}

fn format_param(v: f64) -> String {
    // 17 significant digits: always enough to round-trip an f64
    format!("{v:.16e}")
}

/// Pretty-prints a circuit to canonical text (LF, normalized whitespace,
/// value-preserving numbers). `parse(roundtrip(s))` structurally equals `s`.
pub fn roundtrip(spec: &CircuitSpec) -> String {
    let mut out = String::new();
    for decl in &spec.registers {
        out.push_str("register ");
        out.push_str(&decl.name);
        for l in &decl.labels {
            out.push(' ');
            out.push_str(l);
        }
        out.push('\n');
    }
    for stmt in &spec.elements {
        out.push_str(stmt.name.keyword());
        for p in &stmt.ports {
            out.push(' ');
            out.push_str(p);
        }
        for v in &stmt.params {
            out.push(' ');
            out.push_str(&format_param(*v));
        }
        if let Some((reg, label)) = &stmt.control {
            out.push_str(" on ");
            out.push_str(reg);
            out.push('=');
            out.push_str(label);
        }
        out.push('\n');
    }
    for sel in &spec.selections {
        match sel {
            Selection::Pre { alpha, phi1, phi2 } => {
                out.push_str("pre ");
                out.push_str(&format_param(*alpha));
                out.push(' ');
                out.push_str(&format_param(*phi1));
                out.push(' ');
                out.push_str(&format_param(*phi2));
                out.push('\n');
            }
            Selection::Post { phi1, phi2 } => {
                out.push_str("post ");
                out.push_str(&format_param(*phi1));
                out.push(' ');
                out.push_str(&format_param(*phi2));
                out.push('\n');
            }
        }
    }
    out
}
