//! Line-level tokenizer for `.bench` files.

#[derive(Debug, Clone, PartialEq)]
pub enum TokenKind {
    Ident(String),
    /// A decimal literal with an optional unit suffix written directly after
    /// it (`800nm`, `4096`, `2pi`).
    Number { text: String, unit: Option<String> },
    Sym(char),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Token {
    pub kind: TokenKind,
    pub line: usize,
    pub column: usize,
}

impl Token {
    pub fn describe(&self) -> String {
        match &self.kind {
            TokenKind::Ident(s) => format!("`{s}`"),
            TokenKind::Number { text, unit } => {
                format!("`{}{}`", text, unit.as_deref().unwrap_or(""))
            }
            TokenKind::Sym(c) => format!("`{c}`"),
        }
    }

    pub fn is_sym(&self, c: char) -> bool {
        self.kind == TokenKind::Sym(c)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LexError {
    pub line: usize,
    pub column: usize,
    pub found: char,
}

const SYMBOLS: &[char] = &['=', ':', ',', '(', ')', '[', ']', '/', '*', '-', '+'];

/// Tokenizes one line (1-based `line`). Everything after `#` is a comment.
pub fn lex_line(text: &str, line: usize) -> Result<Vec<Token>, LexError> {
    let chars: Vec<char> = text.chars().collect();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let column = i + 1;
        if c == '#' {
            break;
        }
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len()
                && (chars[i].is_ascii_alphanumeric() || chars[i] == '_' || chars[i] == '.')
            {
                i += 1;
            }
            tokens.push(Token {
                kind: TokenKind::Ident(chars[start..i].iter().collect()),
                line,
                column,
            });
            continue;
        }
        let starts_number = c.is_ascii_digit()
            || (c == '.' && chars.get(i + 1).is_some_and(|d| d.is_ascii_digit()));
        if starts_number {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            // exponent only when digits follow, so `2e` is not swallowed
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                let mut j = i + 1;
                if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                    j += 1;
                }
                if j < chars.len() && chars[j].is_ascii_digit() {
                    while j < chars.len() && chars[j].is_ascii_digit() {
                        j += 1;
                    }
                    i = j;
                }
            }
            let text: String = chars[start..i].iter().collect();
            let unit_start = i;
            while i < chars.len() && (chars[i].is_alphabetic() || chars[i] == '_') {
                i += 1;
            }
            let unit = (i > unit_start).then(|| chars[unit_start..i].iter().collect());
            tokens.push(Token {
                kind: TokenKind::Number { text, unit },
                line,
                column,
            });
            continue;
        }
        if SYMBOLS.contains(&c) {
            tokens.push(Token {
                kind: TokenKind::Sym(c),
                line,
                column,
            });
            i += 1;
            continue;
        }
        return Err(LexError {
            line,
            column,
            found: c,
        });
    }
    Ok(tokens)
}
