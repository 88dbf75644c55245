use std::collections::HashMap;
use std::f64::consts::PI;

use super::lexer::{lex_line, Token, TokenKind};
use super::{Anchor, BenchDocument, Diagnostic, DiagnosticKind, ParseFailure};
use crate::elements::{ElementPipeline, OpticalElement};
use crate::error::ArmLabel;
use crate::field::{BenchParams, GridSpec, HBAR};

const LENGTH_UNITS: &[&str] = &["nm", "um", "mm", "cm", "m"];
const KEYS: &[&str] = &["lambda", "f", "l", "hbar", "input", "phase", "grid.n", "grid.half_extent"];
const ELEMENTS: &[&str] = &["xbench", "pbench", "phase", "atten", "aperture", "lens", "flip"];

type Step<T> = Result<T, Diagnostic>;

fn diag(kind: DiagnosticKind, line: usize, column: usize, message: impl Into<String>) -> Diagnostic {
    Diagnostic {
        kind,
        line,
        column,
        message: message.into(),
        expected: Vec::new(),
    }
}

fn expecting(mut d: Diagnostic, expected: &[&str]) -> Diagnostic {
    d.expected = expected.iter().map(|s| s.to_string()).collect();
    d
}

/// Converts a decimal literal times `10^exp10` without double rounding.
fn scaled_decimal(text: &str, exp10: i32) -> Option<f64> {
    let (mantissa, exp) = match text.find(['e', 'E']) {
        Some(pos) => (&text[..pos], text[pos + 1..].parse::<i32>().ok()?),
        None => (text, 0),
    };
    if mantissa.is_empty() || mantissa.chars().filter(|&c| c == '.').count() > 1 {
        return None;
    }
    let value: f64 = format!("{mantissa}e{}", exp.checked_add(exp10)?).parse().ok()?;
    value.is_finite().then_some(value)
}

fn length_exponent(unit: &str) -> Option<i32> {
    match unit {
        "nm" => Some(-9),
        "um" | "µm" => Some(-6),
        "mm" => Some(-3),
        "cm" => Some(-2),
        "m" => Some(0),
        _ => None,
    }
}

/// Cursor over the tokens of one line.
struct Cursor<'a> {
    tokens: &'a [Token],
    pos: usize,
    line: usize,
    /// Column just past the last token, for end-of-line diagnostics.
    end_column: usize,
}

impl<'a> Cursor<'a> {
    fn new(tokens: &'a [Token], line: usize, end_column: usize) -> Self {
        Cursor {
            tokens,
            pos: 0,
            line,
            end_column,
        }
    }

    fn peek(&self) -> Option<&'a Token> {
        self.tokens.get(self.pos)
    }

    fn next(&mut self) -> Option<&'a Token> {
        let t = self.tokens.get(self.pos);
        self.pos += 1;
        t
    }

    fn here(&self) -> (usize, usize) {
        match self.peek() {
            Some(t) => (t.line, t.column),
            None => (self.line, self.end_column),
        }
    }

    fn unexpected(&self, expected: &[&str]) -> Diagnostic {
        let (line, column) = self.here();
        let found = self.peek().map_or("end of line".to_string(), Token::describe);
        expecting(
            diag(DiagnosticKind::Syntax, line, column, format!("unexpected {found}")),
            expected,
        )
    }

    fn expect_sym(&mut self, c: char) -> Step<()> {
        if self.peek().is_some_and(|t| t.is_sym(c)) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.unexpected(&[&format!("`{c}`")]))
        }
    }

    fn eat_sym(&mut self, c: char) -> bool {
        if self.peek().is_some_and(|t| t.is_sym(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect_end(&self) -> Step<()> {
        if self.peek().is_none() {
            Ok(())
        } else {
            Err(self.unexpected(&["end of line"]))
        }
    }

    fn sign(&mut self) -> f64 {
        if self.eat_sym('-') {
            -1.0
        } else {
            self.eat_sym('+');
            1.0
        }
    }

    fn number_token(&mut self, what: &str) -> Step<(&'a Token, &'a str, Option<&'a str>)> {
        match self.peek() {
            Some(t @ Token { kind: TokenKind::Number { text, unit }, .. }) => {
                self.pos += 1;
                Ok((t, text.as_str(), unit.as_deref()))
            }
            _ => Err(self.unexpected(&[what])),
        }
    }

    /// `[sign] NUMBER unit` in meters.
    fn length(&mut self) -> Step<f64> {
        let sign = self.sign();
        let (tok, text, unit) = self.number_token("a length such as `1.5mm`")?;
        let Some(unit) = unit else {
            return Err(expecting(
                diag(DiagnosticKind::Unit, tok.line, tok.column, format!("length `{text}` has no unit")),
                LENGTH_UNITS,
            ));
        };
        let Some(exp) = length_exponent(unit) else {
            return Err(expecting(
                diag(DiagnosticKind::Unit, tok.line, tok.column, format!("unknown length unit `{unit}`")),
                LENGTH_UNITS,
            ));
        };
        let value = scaled_decimal(text, exp).ok_or_else(|| {
            diag(DiagnosticKind::Syntax, tok.line, tok.column, format!("malformed number `{text}`"))
        })?;
        Ok(sign * value)
    }

    fn positive_length(&mut self) -> Step<f64> {
        let (line, column) = self.here();
        let v = self.length()?;
        if v > 0.0 {
            Ok(v)
        } else {
            Err(diag(DiagnosticKind::Semantic, line, column, "length must be positive"))
        }
    }

    /// Angle in radians: `[sign] (NUMBER rad | NUMBER deg | [NUMBER [*]] pi [/ NUMBER])`.
    fn angle(&mut self) -> Step<f64> {
        const ANGLE_FORMS: &[&str] = &["`pi`", "`pi/2`", "`<number>rad`", "`<number>deg`"];
        let sign = self.sign();
        let (line, column) = self.here();
        let malformed = |text: &str| diag(DiagnosticKind::Syntax, line, column, format!("malformed number `{text}`"));
        let multiple = match self.peek().map(|t| &t.kind) {
            Some(TokenKind::Ident(name)) if name == "pi" => {
                self.pos += 1;
                PI
            }
            Some(TokenKind::Number { text, unit }) => {
                self.pos += 1;
                let value = scaled_decimal(text, 0).ok_or_else(|| malformed(text))?;
                match unit.as_deref() {
                    Some("rad") => return Ok(sign * value),
                    Some("deg") => return Ok(sign * value.to_radians()),
                    Some("pi") => value * PI,
                    None => {
                        if self.eat_sym('*') {
                            match self.peek() {
                                Some(Token { kind: TokenKind::Ident(p), .. }) if p == "pi" => {
                                    self.pos += 1;
                                    value * PI
                                }
                                _ => return Err(self.unexpected(&["`pi`"])),
                            }
                        } else {
                            return Err(expecting(
                                diag(DiagnosticKind::Unit, line, column, format!("angle `{text}` has no unit")),
                                ANGLE_FORMS,
                            ));
                        }
                    }
                    Some(other) => {
                        return Err(expecting(
                            diag(DiagnosticKind::Unit, line, column, format!("unknown angle unit `{other}`")),
                            ANGLE_FORMS,
                        ))
                    }
                }
            }
            _ => return Err(self.unexpected(ANGLE_FORMS)),
        };
        if self.eat_sym('/') {
            let (tok, text, unit) = self.number_token("a divisor")?;
            if unit.is_some() {
                return Err(diag(DiagnosticKind::Syntax, tok.line, tok.column, "divisor must be a plain number"));
            }
            let d = scaled_decimal(text, 0).ok_or_else(|| malformed(text))?;
            if d == 0.0 {
                return Err(diag(DiagnosticKind::Semantic, tok.line, tok.column, "division by zero"));
            }
            return Ok(sign * multiple / d);
        }
        Ok(sign * multiple)
    }

    fn integer(&mut self) -> Step<usize> {
        let (tok, text, unit) = self.number_token("an integer")?;
        if let Some(unit) = unit {
            return Err(diag(
                DiagnosticKind::Unit,
                tok.line,
                tok.column,
                format!("point count takes no unit, found `{unit}`"),
            ));
        }
        text.parse::<usize>()
            .map_err(|_| diag(DiagnosticKind::Syntax, tok.line, tok.column, format!("`{text}` is not an integer")))
    }

    /// `hbar` in J s.
    fn action(&mut self) -> Step<f64> {
        let (line, column) = self.here();
        let (tok, text, unit) = self.number_token("an action such as `1.054571817e-34Js`")?;
        match unit {
            Some("Js") => {}
            Some(other) => {
                return Err(expecting(
                    diag(DiagnosticKind::Unit, tok.line, tok.column, format!("unknown action unit `{other}`")),
                    &["Js"],
                ))
            }
            None => {
                return Err(expecting(
                    diag(DiagnosticKind::Unit, tok.line, tok.column, format!("action `{text}` has no unit")),
                    &["Js"],
                ))
            }
        }
        let v = scaled_decimal(text, 0)
            .ok_or_else(|| diag(DiagnosticKind::Syntax, line, column, format!("malformed number `{text}`")))?;
        if v > 0.0 {
            Ok(v)
        } else {
            Err(diag(DiagnosticKind::Semantic, line, column, "hbar must be positive"))
        }
    }

    fn ident(&mut self, what: &[&str]) -> Step<&'a Token> {
        match self.peek() {
            Some(t @ Token { kind: TokenKind::Ident(_), .. }) => {
                self.pos += 1;
                Ok(t)
            }
            _ => Err(self.unexpected(what)),
        }
    }
}

fn ident_text(t: &Token) -> &str {
    match &t.kind {
        TokenKind::Ident(s) => s,
        _ => "",
    }
}

#[derive(Debug, Clone, PartialEq)]
enum ArgValue {
    Length(f64),
    Angle(f64),
    Region(f64, f64),
}

/// Parses `( name = value, ... )` where each argument's value type is
/// decided by `kind_of`.
fn call_args(
    cur: &mut Cursor<'_>,
    call: &str,
    allowed: &[&str],
) -> Step<HashMap<String, (ArgValue, usize, usize)>> {
    cur.expect_sym('(')?;
    let mut args = HashMap::new();
    if cur.eat_sym(')') {
        return Ok(args);
    }
    loop {
        let name_tok = cur.ident(allowed)?;
        let name = ident_text(name_tok);
        if !allowed.contains(&name) {
            return Err(expecting(
                diag(
                    DiagnosticKind::Semantic,
                    name_tok.line,
                    name_tok.column,
                    format!("`{call}` has no argument `{name}`"),
                ),
                allowed,
            ));
        }
        if args.contains_key(name) {
            return Err(diag(
                DiagnosticKind::Semantic,
                name_tok.line,
                name_tok.column,
                format!("argument `{name}` given twice"),
            ));
        }
        cur.expect_sym('=')?;
        let value = match name {
            "shift" => ArgValue::Angle(cur.angle()?),
            "region" => {
                cur.expect_sym('[')?;
                let lo = cur.length()?;
                cur.expect_sym(',')?;
                let hi = cur.length()?;
                cur.expect_sym(']')?;
                ArgValue::Region(lo, hi)
            }
            _ => ArgValue::Length(cur.positive_length()?),
        };
        args.insert(name.to_string(), (value, name_tok.line, name_tok.column));
        if cur.eat_sym(')') {
            return Ok(args);
        }
        cur.expect_sym(',')?;
    }
}

struct Args {
    map: HashMap<String, (ArgValue, usize, usize)>,
    call: String,
    line: usize,
    column: usize,
}

impl Args {
    fn take(&mut self, name: &str) -> Step<ArgValue> {
        self.map.remove(name).map(|(v, _, _)| v).ok_or_else(|| {
            diag(
                DiagnosticKind::Semantic,
                self.line,
                self.column,
                format!("`{}` requires argument `{name}`", self.call),
            )
        })
    }

    fn length(&mut self, name: &str) -> Step<f64> {
        match self.take(name)? {
            ArgValue::Length(v) => Ok(v),
            _ => unreachable!("argument kinds are fixed by name"),
        }
    }

    fn optional_length(&mut self, name: &str) -> Option<f64> {
        match self.map.remove(name) {
            Some((ArgValue::Length(v), _, _)) => Some(v),
            _ => None,
        }
    }
}

fn element(cur: &mut Cursor<'_>, name_tok: &Token, lambda: Option<f64>) -> Step<(OpticalElement, bool)> {
    let name = ident_text(name_tok);
    let allowed: &[&str] = match name {
        "xbench" | "atten" | "aperture" => &["l"],
        "pbench" => &["f", "l", "lambda"],
        "lens" => &["f", "lambda"],
        "phase" => &["region", "shift"],
        "flip" => &[],
        _ => {
            return Err(expecting(
                diag(
                    DiagnosticKind::Syntax,
                    name_tok.line,
                    name_tok.column,
                    format!("unknown element `{name}`"),
                ),
                ELEMENTS,
            ))
        }
    };
    let map = call_args(cur, name, allowed)?;
    cur.expect_end()?;
    let mut args = Args {
        map,
        call: name.to_string(),
        line: name_tok.line,
        column: name_tok.column,
    };
    // `needs_lambda` marks elements whose wavelength falls back to the
    // document's `lambda`, which may be declared later in the file
    let (element, needs_lambda) = match name {
        "xbench" => (OpticalElement::PositionBench { l: args.length("l")? }, false),
        "atten" => (OpticalElement::LinearAttenuator { l: args.length("l")? }, false),
        "aperture" => (OpticalElement::HardAperture { l: args.length("l")? }, false),
        "flip" => (OpticalElement::AxisFlip, false),
        "pbench" => {
            let f = args.length("f")?;
            let l = args.length("l")?;
            let own = args.optional_length("lambda");
            (
                OpticalElement::MomentumBench {
                    lambda: own.or(lambda).unwrap_or(f64::NAN),
                    f,
                    l,
                },
                own.is_none(),
            )
        }
        "lens" => {
            let f = args.length("f")?;
            let own = args.optional_length("lambda");
            (
                OpticalElement::LensFt {
                    lambda: own.or(lambda).unwrap_or(f64::NAN),
                    f,
                },
                own.is_none(),
            )
        }
        "phase" => {
            let ArgValue::Region(lo, hi) = args.take("region")? else {
                unreachable!()
            };
            let ArgValue::Angle(shift) = args.take("shift")? else {
                unreachable!()
            };
            if lo > hi {
                return Err(diag(
                    DiagnosticKind::Semantic,
                    name_tok.line,
                    name_tok.column,
                    "phase region must satisfy lo <= hi",
                ));
            }
            (OpticalElement::phase_shifter(lo, hi, shift), false)
        }
        _ => unreachable!("filtered above"),
    };
    Ok((element, needs_lambda))
}

#[derive(Default)]
struct Collected {
    lambda: Option<f64>,
    f: Option<f64>,
    l: Option<f64>,
    hbar: Option<f64>,
    w: Option<f64>,
    phase: Option<f64>,
    grid_n: Option<usize>,
    grid_half_extent: Option<f64>,
    key_pos: HashMap<&'static str, (usize, usize)>,
    /// Keys seen on some line, even if their value failed to parse.
    attempted: Vec<&'static str>,
    arms: Vec<ArmBlock>,
}

struct ArmBlock {
    label: Option<ArmLabel>,
    line: usize,
    column: usize,
    elements: Vec<(OpticalElement, bool, usize, usize)>,
}

fn assignment(cur: &mut Cursor<'_>, key_tok: &Token, doc: &mut Collected) -> Step<()> {
    let key = ident_text(key_tok);
    let Some(&key) = KEYS.iter().find(|k| **k == key) else {
        return Err(expecting(
            diag(
                DiagnosticKind::Semantic,
                key_tok.line,
                key_tok.column,
                format!("unknown key `{key}`"),
            ),
            KEYS,
        ));
    };
    if doc.attempted.contains(&key) {
        return Err(diag(
            DiagnosticKind::Semantic,
            key_tok.line,
            key_tok.column,
            format!("key `{key}` assigned twice"),
        ));
    }
    doc.attempted.push(key);
    cur.expect_sym('=')?;
    match key {
        "lambda" => doc.lambda = Some(cur.positive_length()?),
        "f" => doc.f = Some(cur.positive_length()?),
        "l" => doc.l = Some(cur.positive_length()?),
        "hbar" => doc.hbar = Some(cur.action()?),
        "phase" => doc.phase = Some(cur.angle()?),
        "grid.n" => doc.grid_n = Some(cur.integer()?),
        "grid.half_extent" => doc.grid_half_extent = Some(cur.positive_length()?),
        "input" => {
            let kind = cur.ident(&["`gaussian`"])?;
            if ident_text(kind) != "gaussian" {
                return Err(expecting(
                    diag(
                        DiagnosticKind::Semantic,
                        kind.line,
                        kind.column,
                        format!("unknown input kind `{}`", ident_text(kind)),
                    ),
                    &["gaussian"],
                ));
            }
            let map = call_args(cur, "gaussian", &["w"])?;
            let mut args = Args {
                map,
                call: "gaussian".into(),
                line: kind.line,
                column: kind.column,
            };
            doc.w = Some(args.length("w")?);
        }
        _ => unreachable!("keys filtered above"),
    }
    cur.expect_end()?;
    doc.key_pos.insert(key, (key_tok.line, key_tok.column));
    Ok(())
}

fn arm_header(cur: &mut Cursor<'_>, arm_tok: &Token, doc: &mut Collected) -> Step<()> {
    let name_tok = cur.ident(&["`upper`", "`lower`"])?;
    cur.expect_sym(':')?;
    cur.expect_end()?;
    let label = match ident_text(name_tok) {
        "upper" => ArmLabel::Upper,
        "lower" => ArmLabel::Lower,
        other => {
            // keep collecting the block so its lines do not cascade
            doc.arms.push(ArmBlock {
                label: None,
                line: arm_tok.line,
                column: arm_tok.column,
                elements: Vec::new(),
            });
            return Err(expecting(
                diag(
                    DiagnosticKind::Semantic,
                    name_tok.line,
                    name_tok.column,
                    format!("unknown arm `{other}`"),
                ),
                &["upper", "lower"],
            ));
        }
    };
    if doc.arms.iter().any(|a| a.label == Some(label)) {
        doc.arms.push(ArmBlock {
            label: None,
            line: arm_tok.line,
            column: arm_tok.column,
            elements: Vec::new(),
        });
        return Err(diag(
            DiagnosticKind::Semantic,
            name_tok.line,
            name_tok.column,
            format!("arm `{label}` declared twice"),
        ));
    }
    doc.arms.push(ArmBlock {
        label: Some(label),
        line: arm_tok.line,
        column: arm_tok.column,
        elements: Vec::new(),
    });
    Ok(())
}

/// Parses a single positive length such as `6mm` (used for command-line
/// overrides).
pub fn parse_length(text: &str) -> Result<f64, Diagnostic> {
    let tokens = lex_line(text, 1).map_err(|e| {
        diag(DiagnosticKind::Syntax, e.line, e.column, format!("unexpected character {:?}", e.found))
    })?;
    let mut cur = Cursor::new(&tokens, 1, text.chars().count() + 1);
    let v = cur.positive_length()?;
    cur.expect_end()?;
    Ok(v)
}

/// Parses a bench description. Never panics; every problem found is
/// reported with its line and column.
pub fn parse_bench(text: &str) -> Result<BenchDocument, ParseFailure> {
    let mut diagnostics = Vec::new();
    let mut doc = Collected::default();
    let mut in_arm = false;

    for (index, raw) in text.lines().enumerate() {
        let line = index + 1;
        let tokens = match lex_line(raw, line) {
            Ok(t) => t,
            Err(e) => {
                diagnostics.push(diag(
                    DiagnosticKind::Syntax,
                    e.line,
                    e.column,
                    format!("unexpected character {:?}", e.found),
                ));
                continue;
            }
        };
        if tokens.is_empty() {
            continue;
        }
        let end_column = raw.chars().count() + 1;
        let mut cur = Cursor::new(&tokens, line, end_column);
        let first = cur.next().expect("non-empty");
        let result = match (&first.kind, cur.peek().map(|t| &t.kind)) {
            (TokenKind::Ident(word), Some(TokenKind::Ident(_))) if word == "arm" => {
                in_arm = true;
                let before = doc.arms.len();
                let result = arm_header(&mut cur, first, &mut doc);
                if doc.arms.len() == before {
                    // malformed header: collect its elements into a dead block
                    doc.arms.push(ArmBlock {
                        label: None,
                        line: first.line,
                        column: first.column,
                        elements: Vec::new(),
                    });
                }
                result
            }
            (TokenKind::Ident(_), Some(TokenKind::Sym('='))) => {
                in_arm = false;
                assignment(&mut cur, first, &mut doc)
            }
            (TokenKind::Ident(_), Some(TokenKind::Sym('('))) => {
                if in_arm {
                    element(&mut cur, first, doc.lambda).map(|(e, needs_lambda)| {
                        doc.arms
                            .last_mut()
                            .expect("in_arm implies a block")
                            .elements
                            .push((e, needs_lambda, first.line, first.column));
                    })
                } else {
                    Err(diag(
                        DiagnosticKind::Syntax,
                        first.line,
                        first.column,
                        "element call outside an `arm <name>:` block",
                    ))
                }
            }
            _ => Err(expecting(
                diag(
                    DiagnosticKind::Syntax,
                    first.line,
                    first.column,
                    format!("unexpected {}", first.describe()),
                ),
                &["`key = value`", "`arm <name>:`", "an element call"],
            )),
        };
        if let Err(d) = result {
            diagnostics.push(d);
        }
    }

    let last_line = text.lines().count().max(1);
    let missing = |key: &str| {
        diag(
            DiagnosticKind::Semantic,
            last_line,
            1,
            format!("missing required key `{key}`"),
        )
    };
    for (key, present) in [
        ("lambda", doc.lambda.is_some()),
        ("f", doc.f.is_some()),
        ("l", doc.l.is_some()),
        ("input", doc.w.is_some()),
        ("phase", doc.phase.is_some()),
    ] {
        // a key that failed to parse already has its own diagnostic
        if !present && !doc.attempted.contains(&key) {
            diagnostics.push(missing(key));
        }
    }

    let labels: Vec<ArmLabel> = doc.arms.iter().filter_map(|a| a.label).collect();
    if doc.arms.is_empty() {
        diagnostics.push(diag(
            DiagnosticKind::Semantic,
            last_line,
            1,
            "interferometer requires two arms",
        ));
    } else {
        for needed in [ArmLabel::Upper, ArmLabel::Lower] {
            if !labels.contains(&needed) && doc.arms.iter().all(|a| a.label.is_some()) {
                diagnostics.push(diag(
                    DiagnosticKind::Semantic,
                    last_line,
                    1,
                    format!("interferometer requires two arms: `{needed}` is missing"),
                ));
            }
        }
    }

    let grid = match GridSpec::new(
        doc.grid_n.unwrap_or(GridSpec::desk_default().n_points()),
        doc.grid_half_extent.unwrap_or(GridSpec::desk_default().half_extent()),
    ) {
        Ok(g) => Some(g),
        Err(e) => {
            let (line, column) = doc
                .key_pos
                .get("grid.n")
                .or_else(|| doc.key_pos.get("grid.half_extent"))
                .copied()
                .unwrap_or((last_line, 1));
            diagnostics.push(diag(DiagnosticKind::Semantic, line, column, e.to_string()));
            None
        }
    };

    if !diagnostics.is_empty() {
        return Err(ParseFailure { diagnostics });
    }

    let (Some(lambda), Some(f), Some(l), Some(w), Some(phase), Some(grid)) =
        (doc.lambda, doc.f, doc.l, doc.w, doc.phase, grid)
    else {
        unreachable!("missing values were diagnosed");
    };
    let params = BenchParams {
        lambda,
        f,
        l,
        w,
        hbar: doc.hbar.unwrap_or(HBAR),
    };

    let mut upper = ElementPipeline::default();
    let mut lower = ElementPipeline::default();
    let mut element_pos: HashMap<(ArmLabel, usize), (usize, usize)> = HashMap::new();
    let mut arm_pos: HashMap<ArmLabel, (usize, usize)> = HashMap::new();
    for block in doc.arms {
        let Some(label) = block.label else { continue };
        arm_pos.insert(label, (block.line, block.column));
        let target = match label {
            ArmLabel::Upper => &mut upper,
            ArmLabel::Lower => &mut lower,
        };
        for (i, (mut element, needs_lambda, line, column)) in block.elements.into_iter().enumerate() {
            if needs_lambda {
                match &mut element {
                    OpticalElement::MomentumBench { lambda: lam, .. } | OpticalElement::LensFt { lambda: lam, .. } => {
                        *lam = lambda
                    }
                    _ => {}
                }
            }
            element_pos.insert((label, i), (line, column));
            target.elements.push(element);
        }
    }

    let document = BenchDocument {
        params,
        phase,
        grid,
        upper,
        lower,
    };
    let issues = document.check();
    if issues.is_empty() {
        return Ok(document);
    }
    let diagnostics = issues
        .into_iter()
        .map(|issue| {
            let (line, column) = match issue.anchor {
                Anchor::Key(k) => doc.key_pos.get(k).copied(),
                Anchor::Arm(a) => arm_pos.get(&a).copied(),
                Anchor::Element(a, i) => element_pos.get(&(a, i)).copied(),
                Anchor::Document => None,
            }
            .unwrap_or((0, 0));
            diag(DiagnosticKind::Semantic, line, column, issue.message)
        })
        .collect();
    Err(ParseFailure { diagnostics })
}
