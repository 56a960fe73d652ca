use super::Span;

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Tok {
    Ident(String),
    /// Decimal literal; `None` when it does not fit in 64 bits.
    Int(Option<u64>),
    /// A word that is neither an identifier nor a number, like `1clock` or `_x`.
    BadWord,
    Dot,
    Lt,
    Le,
    Gt,
    Ge,
    Eq,
    Ne,
    Plus,
    Minus,
    LParen,
    RParen,
    And,
    Or,
    Not,
    True,
    False,
    Unknown,
}

impl Tok {
    pub(crate) fn describe(&self) -> &'static str {
        match self {
            Tok::Ident(_) => "identifier",
            Tok::Int(_) => "integer literal",
            Tok::BadWord => "malformed word",
            Tok::Dot => "`.`",
            Tok::Lt => "`<`",
            Tok::Le => "`<=`",
            Tok::Gt => "`>`",
            Tok::Ge => "`>=`",
            Tok::Eq => "`=`",
            Tok::Ne => "`/=`",
            Tok::Plus => "`+`",
            Tok::Minus => "`-`",
            Tok::LParen => "`(`",
            Tok::RParen => "`)`",
            Tok::And => "`and`",
            Tok::Or => "`or`",
            Tok::Not => "`not`",
            Tok::True => "`True`",
            Tok::False => "`False`",
            Tok::Unknown => "unknown character",
        }
    }
}

#[derive(Debug, Clone)]
pub(crate) struct Token {
    pub tok: Tok,
    pub span: Span,
}

/// Splits a fragment into tokens. Never fails: characters outside the
/// fragment alphabet become `Tok::Unknown` and are reported by the parser.
pub(crate) fn tokenize(text: &str) -> Vec<Token> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let tok = if c.is_ascii_alphanumeric() || c == '_' {
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            let word: String = chars[start..i].iter().collect();
            classify_word(word)
        } else {
            let next = chars.get(i + 1).copied();
            let (tok, width) = match (c, next) {
                ('<', Some('=')) => (Tok::Le, 2),
                ('>', Some('=')) => (Tok::Ge, 2),
                ('/', Some('=')) => (Tok::Ne, 2),
                ('<', _) => (Tok::Lt, 1),
                ('>', _) => (Tok::Gt, 1),
                ('=', _) => (Tok::Eq, 1),
                ('.', _) => (Tok::Dot, 1),
                ('+', _) => (Tok::Plus, 1),
                ('-', _) => (Tok::Minus, 1),
                ('(', _) => (Tok::LParen, 1),
                (')', _) => (Tok::RParen, 1),
                _ => (Tok::Unknown, 1),
            };
            i += width;
            tok
        };
        out.push(Token {
            tok,
            span: Span::new(start, i - start),
        });
    }
    out
}

fn classify_word(word: String) -> Tok {
    let first = word.chars().next().expect("nonempty word");
    if first.is_ascii_digit() {
        if word.chars().all(|c| c.is_ascii_digit()) {
            return Tok::Int(word.parse::<u64>().ok());
        }
        return Tok::BadWord;
    }
    if first == '_' {
        return Tok::BadWord;
    }
    match word.as_str() {
        "and" => Tok::And,
        "or" => Tok::Or,
        "not" => Tok::Not,
        "True" => Tok::True,
        "False" => Tok::False,
        _ => Tok::Ident(word),
    }
}
