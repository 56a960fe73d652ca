//! Brute-force recogniser for guard expressions, written against the
//! ambiguous typed grammar rather than the precedence-climbing parser:
//!
//! ```text
//! B ::= B or B | B and B | not B | A cmp A | ( B ) | True | False
//! A ::= A + A | A - A | - INT | INT | QUERY | ( A )
//! ```
//!
//! Chained comparisons are impossible because `A cmp A` yields `B`, which
//! is never an `A`, so precedence only selects among parses and does not
//! change the accepted language.

use std::collections::HashMap;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Nt {
    B,
    A,
}

const CMP: [&str; 6] = ["<", "<=", ">", ">=", "=", "/="];

fn is_int(t: &str) -> bool {
    !t.is_empty() && t.bytes().all(|b| b.is_ascii_digit())
}

fn is_query(t: &str) -> bool {
    let mut parts = t.split('.');
    let ident = |s: &str| {
        let mut c = s.chars();
        matches!(c.next(), Some(f) if f.is_ascii_alphabetic())
            && c.all(|c| c.is_ascii_alphanumeric() || c == '_')
            && !matches!(s, "and" | "or" | "not" | "True" | "False")
    };
    let root = parts.next().is_some_and(ident);
    let rest: Vec<&str> = parts.collect();
    root && !rest.is_empty() && rest.iter().all(|s| ident(s))
}

struct Recognizer<'t> {
    toks: &'t [&'t str],
    memo: HashMap<(Nt, usize, usize), bool>,
}

impl Recognizer<'_> {
    /// Does `toks[i..j]` derive `nt`? Every production consumes a terminal,
    /// so recursion is always on a strictly shorter span.
    #[allow(clippy::needless_range_loop)]
    fn derives(&mut self, nt: Nt, i: usize, j: usize) -> bool {
        if i >= j {
            return false;
        }
        if let Some(&b) = self.memo.get(&(nt, i, j)) {
            return b;
        }
        let t = self.toks;
        let n = j - i;
        let mut ok = false;
        if n >= 3 && t[i] == "(" && t[j - 1] == ")" {
            ok = self.derives(nt, i + 1, j - 1);
        }
        match nt {
            Nt::B => {
                ok = ok || (n == 1 && (t[i] == "True" || t[i] == "False"));
                ok = ok || (t[i] == "not" && self.derives(Nt::B, i + 1, j));
                for k in i + 1..j - 1 {
                    if ok {
                        break;
                    }
                    ok = match t[k] {
                        "and" | "or" => self.derives(Nt::B, i, k) && self.derives(Nt::B, k + 1, j),
                        op if CMP.contains(&op) => self.derives(Nt::A, i, k) && self.derives(Nt::A, k + 1, j),
                        _ => false,
                    };
                }
            }
            Nt::A => {
                ok = ok || (n == 1 && (is_int(t[i]) || is_query(t[i])));
                ok = ok || (n == 2 && t[i] == "-" && is_int(t[i + 1]));
                for k in i + 1..j - 1 {
                    if ok {
                        break;
                    }
                    if t[k] == "+" || t[k] == "-" {
                        ok = self.derives(Nt::A, i, k) && self.derives(Nt::A, k + 1, j);
                    }
                }
            }
        }
        self.memo.insert((nt, i, j), ok);
        ok
    }
}

/// Whether the token sequence is a well-typed boolean expression.
pub fn accepts(tokens: &[&str]) -> bool {
    let mut r = Recognizer {
        toks: tokens,
        memo: HashMap::new(),
    };
    r.derives(Nt::B, 0, tokens.len())
}

pub const CORPUS_ALPHABET: [&str; 10] = ["a.x", "0", "1", "<", "=", "and", "or", "not", "(", ")"];

/// Every space-separated string of 1..=max_len tokens over the alphabet.
pub fn corpus(max_len: usize) -> impl Iterator<Item = Vec<&'static str>> {
    let k = CORPUS_ALPHABET.len();
    (1..=max_len).flat_map(move |len| {
        (0..k.pow(len as u32)).map(move |mut code| {
            let mut toks = Vec::with_capacity(len);
            for _ in 0..len {
                toks.push(CORPUS_ALPHABET[code % k]);
                code /= k;
            }
            toks
        })
    })
}
