//! JUEL (`${...}`) to FEEL (`=...`) translation.
//!
//! Only a small, mechanical subset is translated: identifiers, literals,
//! property access with `.`, parentheses, and the comparison and logical
//! operators below. Anything else is returned untouched with
//! `confident == false` so the caller can raise a manual task.
//!
//! | JUEL                      | FEEL          |
//! |---------------------------|---------------|
//! | `==`, `eq`                | `=`           |
//! | `!=`, `ne`                | `!=`          |
//! | `&&`, `and`               | `and`         |
//! | `\|\|`, `or`              | `or`          |
//! | `!x`, `not x`             | `not(x)`      |
//! | `gt` `lt` `ge` `le`       | `>` `<` `>=` `<=` |
//! | `'text'`                  | `"text"`      |

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExpressionRewrite {
    pub original: String,
    pub rewritten: String,
    /// True when the translation is mechanical and known to be safe.
    pub confident: bool,
    pub notes: Vec<String>,
}

impl ExpressionRewrite {
    fn unchanged(original: &str) -> Self {
        Self {
            original: original.to_string(),
            rewritten: original.to_string(),
            confident: true,
            notes: Vec::new(),
        }
    }

    fn untranslatable(original: &str, note: impl Into<String>) -> Self {
        Self {
            original: original.to_string(),
            rewritten: original.to_string(),
            confident: false,
            notes: vec![note.into()],
        }
    }

    /// True when the rewrite actually changed the text.
    pub fn changed(&self) -> bool {
        self.rewritten != self.original
    }
}

/// Translates a Camunda 7 expression into FEEL.
pub fn juel_to_feel(expr: &str) -> ExpressionRewrite {
    if !expr.contains("${") {
        return ExpressionRewrite::unchanged(expr);
    }
    let trimmed = expr.trim();
    let body = match wrapper_body(trimmed) {
        Ok(body) => body,
        Err(reason) => return ExpressionRewrite::untranslatable(expr, reason.note()),
    };
    match translate(body) {
        Ok(feel) => ExpressionRewrite {
            original: expr.to_string(),
            rewritten: format!("={feel}"),
            confident: true,
            notes: Vec::new(),
        },
        Err(note) => ExpressionRewrite::untranslatable(expr, note),
    }
}

/// Strips a single `${...}` wrapper: `${collection}` becomes `collection`.
/// Anything that is not exactly one wrapper is returned trimmed.
pub fn unwrap_interpolation(expr: &str) -> String {
    let trimmed = expr.trim();
    match wrapper_body(trimmed) {
        Ok(body) => body.trim().to_string(),
        Err(_) => trimmed.to_string(),
    }
}

/// True when `expr` (trimmed) is exactly one `${...}` interpolation.
pub fn is_interpolation(expr: &str) -> bool {
    wrapper_body(expr.trim()).is_ok()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum WrapperError {
    NotWrapped,
    Mixed,
    Nested,
    Unbalanced,
}

impl WrapperError {
    fn note(self) -> &'static str {
        match self {
            WrapperError::NotWrapped | WrapperError::Mixed => "mixed literal/interpolation",
            WrapperError::Nested => "nested interpolation",
            WrapperError::Unbalanced => "unbalanced braces",
        }
    }
}

/// Body of a `${...}` wrapper spanning all of `s`, braces balanced outside
/// string literals, and no interpolation nested inside the body.
fn wrapper_body(s: &str) -> Result<&str, WrapperError> {
    if !s.starts_with("${") {
        return Err(if s.contains("${") {
            WrapperError::Mixed
        } else {
            WrapperError::NotWrapped
        });
    }
    let bytes = s.as_bytes();
    let mut depth = 0usize;
    let mut quote: Option<u8> = None;
    let mut i = 1;
    while i < bytes.len() {
        let b = bytes[i];
        match quote {
            Some(q) => {
                if b == b'\\' {
                    i += 1;
                } else if b == q {
                    quote = None;
                }
            }
            None => match b {
                b'\'' | b'"' => quote = Some(b),
                b'{' => depth += 1,
                b'}' => {
                    depth -= 1;
                    if depth == 0 {
                        if i + 1 != bytes.len() {
                            return Err(WrapperError::Mixed);
                        }
                        let body = &s[2..i];
                        if body.contains("${") || body.contains("#{") {
                            return Err(WrapperError::Nested);
                        }
                        return Ok(body);
                    }
                }
                _ => {}
            },
        }
        i += 1;
    }
    Err(WrapperError::Unbalanced)
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Token {
    /// Identifier with optional `.name` segments.
    Path(String),
    Number(String),
    Str(String),
    /// Already-translated operator or keyword literal.
    Op(&'static str),
    Not,
    Open,
    Close,
}

fn tokenize(body: &str) -> Result<Vec<Token>, String> {
    let chars: Vec<char> = body.chars().collect();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        if c.is_alphabetic() || c == '_' || c == '$' {
            let start = i;
            while i < chars.len() && is_ident_char(chars[i]) {
                i += 1;
            }
            let mut path: String = chars[start..i].iter().collect();
            while i < chars.len() && chars[i] == '.' {
                let seg_start = i + 1;
                let mut j = seg_start;
                while j < chars.len() && is_ident_char(chars[j]) {
                    j += 1;
                }
                if j == seg_start || chars[seg_start].is_ascii_digit() {
                    return Err(format!("invalid property access in {path}"));
                }
                path.push('.');
                path.extend(&chars[seg_start..j]);
                i = j;
            }
            let next = chars[i..].iter().find(|c| !c.is_whitespace());
            if next == Some(&'(') && !is_word_operator(&path) {
                return Err(format!("method call {path}(...)"));
            }
            tokens.push(match path.as_str() {
                "and" => Token::Op("and"),
                "or" => Token::Op("or"),
                "not" => Token::Not,
                "eq" => Token::Op("="),
                "ne" => Token::Op("!="),
                "gt" => Token::Op(">"),
                "lt" => Token::Op("<"),
                "ge" => Token::Op(">="),
                "le" => Token::Op("<="),
                "true" => Token::Op("true"),
                "false" => Token::Op("false"),
                "null" => Token::Op("null"),
                "empty" => return Err("empty operator".into()),
                "div" | "mod" | "instanceof" => return Err(format!("operator {path}")),
                _ => Token::Path(path),
            });
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            if i < chars.len() && (chars[i].is_alphabetic() || chars[i] == '_') {
                return Err("numeric literal with suffix".into());
            }
            let number: String = chars[start..i].iter().collect();
            if number.matches('.').count() > 1 || number.ends_with('.') {
                return Err(format!("invalid number {number}"));
            }
            tokens.push(Token::Number(number));
            continue;
        }
        if c == '\'' || c == '"' {
            let mut value = String::new();
            i += 1;
            loop {
                match chars.get(i) {
                    None => return Err("unterminated string literal".into()),
                    Some('\\') => {
                        match chars.get(i + 1) {
                            Some(escaped) => value.push(*escaped),
                            None => return Err("unterminated string literal".into()),
                        }
                        i += 2;
                    }
                    Some(q) if *q == c => {
                        i += 1;
                        break;
                    }
                    Some(other) => {
                        value.push(*other);
                        i += 1;
                    }
                }
            }
            tokens.push(Token::Str(value));
            continue;
        }
        let two: String = chars[i..(i + 2).min(chars.len())].iter().collect();
        let (token, width) = match two.as_str() {
            "==" => (Token::Op("="), 2),
            "!=" => (Token::Op("!="), 2),
            "&&" => (Token::Op("and"), 2),
            "||" => (Token::Op("or"), 2),
            ">=" => (Token::Op(">="), 2),
            "<=" => (Token::Op("<="), 2),
            _ => match c {
                '>' => (Token::Op(">"), 1),
                '<' => (Token::Op("<"), 1),
                '!' => (Token::Not, 1),
                '(' => (Token::Open, 1),
                ')' => (Token::Close, 1),
                '+' => return Err("string concatenation or arithmetic (+)".into()),
                '?' | ':' => return Err("ternary operator".into()),
                '[' | ']' => return Err("bean navigation with []".into()),
                other => return Err(format!("unsupported construct '{other}'")),
            },
        };
        tokens.push(token);
        i += width;
    }
    Ok(tokens)
}

fn is_ident_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '$'
}

fn is_word_operator(word: &str) -> bool {
    matches!(word, "and" | "or" | "not" | "eq" | "ne" | "gt" | "lt" | "ge" | "le")
}

fn is_binary(token: &Token) -> bool {
    matches!(token, Token::Op(op) if !matches!(*op, "true" | "false" | "null"))
}

/// Renders tokens as FEEL. Operands and binary operators must alternate,
/// which rejects dangling operators without a full precedence parser.
fn render(tokens: &[Token]) -> Result<String, String> {
    let mut out = String::new();
    let mut pos = 0;
    let mut expect_operand = true;
    while pos < tokens.len() {
        if expect_operand {
            let (text, next) = operand(tokens, pos)?;
            push_spaced(&mut out, &text);
            pos = next;
            expect_operand = false;
        } else {
            match &tokens[pos] {
                Token::Op(op) if is_binary(&tokens[pos]) => {
                    push_spaced(&mut out, op);
                    pos += 1;
                    expect_operand = true;
                }
                _ => return Err("operands without an operator between them".into()),
            }
        }
    }
    if expect_operand {
        return Err(if tokens.is_empty() {
            "empty expression".into()
        } else {
            "dangling operator".into()
        });
    }
    Ok(out)
}

fn push_spaced(out: &mut String, piece: &str) {
    if !out.is_empty() {
        out.push(' ');
    }
    out.push_str(piece);
}

/// One operand starting at `pos`; returns its FEEL text and the next index.
fn operand(tokens: &[Token], pos: usize) -> Result<(String, usize), String> {
    match tokens.get(pos) {
        None => Err("dangling operator".into()),
        Some(Token::Path(p)) => Ok((p.clone(), pos + 1)),
        Some(Token::Number(n)) => Ok((n.clone(), pos + 1)),
        Some(Token::Str(s)) => Ok((feel_string(s), pos + 1)),
        Some(Token::Op(lit @ ("true" | "false" | "null"))) => Ok((lit.to_string(), pos + 1)),
        Some(Token::Not) => {
            let (inner, next) = operand(tokens, pos + 1)?;
            let inner = inner
                .strip_prefix('(')
                .and_then(|s| s.strip_suffix(')'))
                .filter(|s| balanced(s))
                .map(str::to_string)
                .unwrap_or(inner);
            Ok((format!("not({inner})"), next))
        }
        Some(Token::Open) => {
            let close = matching_close(tokens, pos)?;
            let inner = render(&tokens[pos + 1..close])?;
            Ok((format!("({inner})"), close + 1))
        }
        Some(Token::Close) => Err("unbalanced parentheses".into()),
        Some(Token::Op(op)) => Err(format!("operator {op} without left operand")),
    }
}

fn matching_close(tokens: &[Token], open: usize) -> Result<usize, String> {
    let mut depth = 0;
    for (i, t) in tokens.iter().enumerate().skip(open) {
        match t {
            Token::Open => depth += 1,
            Token::Close => {
                depth -= 1;
                if depth == 0 {
                    return Ok(i);
                }
            }
            _ => {}
        }
    }
    Err("unbalanced parentheses".into())
}

fn balanced(s: &str) -> bool {
    let mut depth = 0i32;
    for c in s.chars() {
        match c {
            '(' => depth += 1,
            ')' => {
                depth -= 1;
                if depth < 0 {
                    return false;
                }
            }
            _ => {}
        }
    }
    depth == 0
}

fn feel_string(value: &str) -> String {
    let mut out = String::with_capacity(value.len() + 2);
    out.push('"');
    for c in value.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

fn translate(body: &str) -> Result<String, String> {
    let tokens = tokenize(body)?;
    render(&tokens)
}
