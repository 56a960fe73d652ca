//! Identifiers and type names.
//!
//! Both follow the same lexical rule: an ASCII letter followed by any
//! number of ASCII letters, digits or underscores.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

/// Why a piece of text is not a well-formed identifier.
///
/// Positions are zero-based character offsets into the rejected text.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum IdentError {
    #[error("identifier is empty")]
    EmptyInput,
    #[error("identifier must start with an ASCII letter")]
    IllegalFirstCharacter,
    #[error("illegal character at position {0}")]
    IllegalCharacterAt(usize),
}

impl IdentError {
    /// Zero-based character offset of the offending character.
    pub fn position(&self) -> usize {
        match self {
            IdentError::EmptyInput | IdentError::IllegalFirstCharacter => 0,
            IdentError::IllegalCharacterAt(pos) => *pos,
        }
    }
}

pub(crate) fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic()
}

pub(crate) fn is_ident_continue(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

fn check_lexical(text: &str) -> Result<(), IdentError> {
    let mut chars = text.chars();
    match chars.next() {
        None => return Err(IdentError::EmptyInput),
        Some(c) if !is_ident_start(c) => return Err(IdentError::IllegalFirstCharacter),
        Some(_) => {}
    }
    for (pos, c) in chars.enumerate() {
        if !is_ident_continue(c) {
            return Err(IdentError::IllegalCharacterAt(pos + 1));
        }
    }
    Ok(())
}

/// Checks `text` against the identifier rule.
pub fn validate_identifier(text: &str) -> Result<Identifier, IdentError> {
    check_lexical(text)?;
    Ok(Identifier(text.to_owned()))
}

macro_rules! lexical_name {
    ($(#[$meta:meta])* $name:ident) => {
        $(#[$meta])*
        #[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
        pub struct $name(String);

        impl $name {
            pub fn new(text: impl Into<String>) -> Result<Self, IdentError> {
                let text = text.into();
                check_lexical(&text)?;
                Ok(Self(text))
            }

            pub fn as_str(&self) -> &str {
                &self.0
            }
        }

        impl FromStr for $name {
            type Err = IdentError;

            fn from_str(s: &str) -> Result<Self, Self::Err> {
                Self::new(s)
            }
        }

        impl TryFrom<&str> for $name {
            type Error = IdentError;

            fn try_from(s: &str) -> Result<Self, Self::Error> {
                Self::new(s)
            }
        }

        impl AsRef<str> for $name {
            fn as_ref(&self) -> &str {
                &self.0
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0)
            }
        }
    };
}

lexical_name! {
    /// A well-formed identifier: labels, variables, feature names.
    Identifier
}

lexical_name! {
    /// The name of a class, e.g. `CLOCK`.
    TypeName
}

#[cfg(test)]
mod tests {
    use super::*;

    // Reference matcher for `[A-Za-z][A-Za-z0-9_]*`, written as a tiny DFA.
    fn reference_accepts(s: &str) -> bool {
        let mut state = 0;
        for c in s.chars() {
            state = match (state, c) {
                (0, 'a'..='z' | 'A'..='Z') => 1,
                (1, 'a'..='z' | 'A'..='Z' | '0'..='9' | '_') => 1,
                _ => return false,
            };
        }
        state == 1
    }

    #[test]
    fn accepts_underscored_label() {
        assert_eq!(
            validate_identifier("requirement_1").unwrap().as_str(),
            "requirement_1"
        );
    }

    #[test]
    fn rejects_space_with_position() {
        assert_eq!(
            validate_identifier("requirement 1"),
            Err(IdentError::IllegalCharacterAt(11))
        );
    }

    #[test]
    fn minimal_and_digit_first() {
        assert!(validate_identifier("a").is_ok());
        assert_eq!(
            validate_identifier("1clock"),
            Err(IdentError::IllegalFirstCharacter)
        );
        assert_eq!(validate_identifier(""), Err(IdentError::EmptyInput));
    }

    #[test]
    fn non_ascii_letters_rejected() {
        assert_eq!(validate_identifier("é"), Err(IdentError::IllegalFirstCharacter));
        assert_eq!(validate_identifier("aé"), Err(IdentError::IllegalCharacterAt(1)));
    }

    #[test]
    fn exhaustive_against_reference_matcher() {
        let alphabet = ['a', 'Z', '0', '_', ' ', '.'];
        let mut frontier = vec![String::new()];
        let mut checked = 0;
        for _ in 0..=4 {
            let mut next = Vec::new();
            for s in &frontier {
                assert_eq!(validate_identifier(s).is_ok(), reference_accepts(s), "{s:?}");
                assert_eq!(TypeName::new(s.as_str()).is_ok(), reference_accepts(s), "{s:?}");
                checked += 1;
                for c in alphabet {
                    let mut t = s.clone();
                    t.push(c);
                    next.push(t);
                }
            }
            frontier = next;
        }
        // 1 + 6 + 36 + 216 + 1296
        assert_eq!(checked, 1555);
    }
}
