//! Tokenizer for `.dlog` text.

use crate::error::{Error, Pos};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TokKind {
    /// Letters and digits, starting with a letter.
    Ident,
    /// An identifier immediately followed by `[`; the text includes the bracket.
    Bracketed,
    /// A maximal run of operator characters, or one mathematical symbol.
    /// Aliases are already replaced by their symbols.
    Op,
    Punct,
    Str,
    Num,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Token {
    pub kind: TokKind,
    pub text: String,
    pub pos: Pos,
}

impl Token {
    pub fn is(&self, kind: TokKind, text: &str) -> bool {
        self.kind == kind && self.text == text
    }

    pub fn is_punct(&self, text: &str) -> bool {
        self.is(TokKind::Punct, text)
    }
}

pub const OP_CHARS: &[char] = &['+', '-', '*', '/', '\\', '&', '#', '=', '^', '!', '<', '>'];

/// Word and operator spellings that stand for a symbol.
const ALIASES: &[(&str, &str)] = &[
    ("in", "∈"),
    ("notin", "∉"),
    ("sub", "⊆"),
    ("or", "∨"),
    ("==", "≡"),
    ("->", "→"),
    ("!=", "≠"),
    ("\\/", "∨"),
    ("\\cup", "∪"),
    ("\\cap", "∩"),
    ("\\times", "×"),
    ("¬", "~"),
];

fn alias(s: &str) -> Option<&'static str> {
    ALIASES.iter().find(|(a, _)| *a == s).map(|(_, t)| *t)
}

fn is_ident_start(c: char) -> bool {
    c.is_alphabetic()
}

fn is_ident_char(c: char) -> bool {
    c.is_alphanumeric()
}

/// A single-character symbol: anything non-ASCII that is neither a letter
/// nor whitespace.
fn is_math_symbol(c: char) -> bool {
    !c.is_ascii() && !c.is_alphanumeric() && !c.is_whitespace()
}

pub fn tokenize(text: &str) -> Result<Vec<Token>, Error> {
    let chars: Vec<char> = text.chars().collect();
    let mut toks = Vec::new();
    let mut i = 0;
    let mut line = 1;
    let mut col = 1;
    macro_rules! advance {
        ($n:expr) => {
            for _ in 0..$n {
                if chars[i] == '\n' {
                    line += 1;
                    col = 1;
                } else {
                    col += 1;
                }
                i += 1;
            }
        };
    }
    while i < chars.len() {
        let c = chars[i];
        let pos = Pos { line, col };
        if c.is_whitespace() {
            advance!(1);
            continue;
        }
        if c == '/' && chars.get(i + 1) == Some(&'/') {
            while i < chars.len() && chars[i] != '\n' {
                advance!(1);
            }
            continue;
        }
        let push = |toks: &mut Vec<Token>, kind: TokKind, text: String| {
            toks.push(Token { kind, text, pos })
        };
        if is_ident_start(c) {
            let mut j = i;
            while j < chars.len() && is_ident_char(chars[j]) {
                j += 1;
            }
            let word: String = chars[i..j].iter().collect();
            if chars.get(j) == Some(&'[') {
                push(&mut toks, TokKind::Bracketed, format!("{word}["));
                advance!(j - i + 1);
            } else if let Some(sym) = alias(&word) {
                push(&mut toks, TokKind::Op, sym.to_string());
                advance!(j - i);
            } else {
                push(&mut toks, TokKind::Ident, word);
                advance!(j - i);
            }
            continue;
        }
        if c == '|' && chars.get(i + 1) == Some(&'-') {
            push(&mut toks, TokKind::Op, "⊢".into());
            advance!(2);
            continue;
        }
        if c.is_ascii_digit() {
            let mut j = i;
            while j < chars.len() && chars[j].is_ascii_digit() {
                j += 1;
            }
            push(&mut toks, TokKind::Num, chars[i..j].iter().collect());
            advance!(j - i);
            continue;
        }
        if c == '"' {
            let mut j = i + 1;
            while j < chars.len() && chars[j] != '"' && chars[j] != '\n' {
                j += 1;
            }
            if chars.get(j) != Some(&'"') {
                return Err(Error::Lex {
                    pos,
                    msg: "unterminated string".into(),
                });
            }
            push(&mut toks, TokKind::Str, chars[i + 1..j].iter().collect());
            advance!(j - i + 1);
            continue;
        }
        if c == '\\' && chars.get(i + 1).is_some_and(|d| d.is_ascii_alphabetic()) {
            let mut j = i + 1;
            while j < chars.len() && chars[j].is_ascii_alphabetic() {
                j += 1;
            }
            let word: String = chars[i..j].iter().collect();
            if let Some(sym) = alias(&word) {
                push(&mut toks, TokKind::Op, sym.to_string());
                advance!(j - i);
                continue;
            }
        }
        if OP_CHARS.contains(&c) {
            let mut j = i;
            while j < chars.len() && OP_CHARS.contains(&chars[j]) {
                if chars[j] == '/' && chars.get(j + 1) == Some(&'/') {
                    break;
                }
                j += 1;
            }
            let run: String = chars[i..j].iter().collect();
            let text = alias(&run).map(str::to_string).unwrap_or(run);
            push(&mut toks, TokKind::Op, text);
            advance!(j - i);
            continue;
        }
        if c == '~' {
            push(&mut toks, TokKind::Op, "~".into());
            advance!(1);
            continue;
        }
        if c == '{' && chars.get(i + 1) == Some(&'}') {
            push(&mut toks, TokKind::Op, "{}".into());
            advance!(2);
            continue;
        }
        if c == ':' && chars.get(i + 1) == Some(&'=') {
            push(&mut toks, TokKind::Punct, ":=".into());
            advance!(2);
            continue;
        }
        if "()[]{},;|:.".contains(c) {
            push(&mut toks, TokKind::Punct, c.to_string());
            advance!(1);
            continue;
        }
        if is_math_symbol(c) {
            let s = c.to_string();
            let text = alias(&s).map(str::to_string).unwrap_or(s);
            push(&mut toks, TokKind::Op, text);
            advance!(1);
            continue;
        }
        return Err(Error::Lex {
            pos,
            msg: format!("illegal character {c:?}"),
        });
    }
    Ok(toks)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn texts(s: &str) -> Vec<String> {
        tokenize(s).unwrap().into_iter().map(|t| t.text).collect()
    }

    #[test]
    fn subset_declaration() {
        let t = tokenize("def[⊆: \"TTF\" ; a ⊆ b == A[x:a, x in b] ]").unwrap();
        assert_eq!(t[0].kind, TokKind::Bracketed);
        assert_eq!(t[0].text, "def[");
        assert!(t[1].is(TokKind::Op, "⊆"));
        assert!(t[2].is_punct(":"));
        assert!(t[3].is(TokKind::Str, "TTF"));
        assert!(t.iter().any(|x| x.is(TokKind::Op, "≡")));
        assert!(t.iter().any(|x| x.is(TokKind::Op, "∈")));
    }

    #[test]
    fn empty_and_comment() {
        assert!(tokenize("").unwrap().is_empty());
        assert_eq!(texts("x1y // c"), vec!["x1y"]);
    }

    #[test]
    fn operators_munch_maximally() {
        assert_eq!(texts("a->b"), vec!["a", "→", "b"]);
        assert_eq!(texts("x <= y"), vec!["x", "<=", "y"]);
        assert_eq!(texts("~~P"), vec!["~", "~", "P"]);
        assert_eq!(texts("A \\cup B \\/ C"), vec!["A", "∪", "B", "∨", "C"]);
        assert_eq!(texts("G \\ L"), vec!["G", "\\", "L"]);
        assert_eq!(texts("{} {x}"), vec!["{}", "{", "x", "}"]);
        assert_eq!(texts("N := B"), vec!["N", ":=", "B"]);
    }

    #[test]
    fn positions_and_errors() {
        let t = tokenize("a\n  b").unwrap();
        assert_eq!(t[1].pos, Pos { line: 2, col: 3 });
        match tokenize("a\n $") {
            Err(Error::Lex { pos, .. }) => assert_eq!(pos, Pos { line: 2, col: 2 }),
            other => panic!("{other:?}"),
        }
    }
}
