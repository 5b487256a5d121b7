//! Minimal S-expression reader shared by the program and expression
//! text formats. Atoms are symbols or signed decimal integers; `;`
//! starts a line comment.

use num_bigint::BigInt;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Sexpr {
    Sym(String),
    Int(BigInt),
    List(Vec<Sexpr>),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SexprError {
    #[error("unexpected `)` at byte {0}")]
    UnexpectedClose(usize),
    #[error("unclosed `(`")]
    UnclosedList,
    #[error("trailing input after form at byte {0}")]
    Trailing(usize),
}

impl Sexpr {
    pub fn as_sym(&self) -> Option<&str> {
        match self {
            Sexpr::Sym(s) => Some(s),
            _ => None,
        }
    }

    pub fn as_int(&self) -> Option<&BigInt> {
        match self {
            Sexpr::Int(i) => Some(i),
            _ => None,
        }
    }

    pub fn as_list(&self) -> Option<&[Sexpr]> {
        match self {
            Sexpr::List(items) => Some(items),
            _ => None,
        }
    }
}

fn tokenize(input: &str) -> Vec<(usize, String)> {
    let mut tokens = Vec::new();
    let mut chars = input.char_indices().peekable();
    while let Some(&(pos, c)) = chars.peek() {
        match c {
            ';' => {
                while let Some(&(_, c)) = chars.peek() {
                    if c == '\n' {
                        break;
                    }
                    chars.next();
                }
            }
            c if c.is_whitespace() => {
                chars.next();
            }
            '(' | ')' => {
                chars.next();
                tokens.push((pos, c.to_string()));
            }
            _ => {
                let mut atom = String::new();
                while let Some(&(_, c)) = chars.peek() {
                    if c.is_whitespace() || c == '(' || c == ')' || c == ';' {
                        break;
                    }
                    atom.push(c);
                    chars.next();
                }
                tokens.push((pos, atom));
            }
        }
    }
    tokens
}

fn atom(tok: &str) -> Sexpr {
    if let Ok(i) = tok.parse::<BigInt>() {
        // reject bare "-" or "+" which BigInt's parser also rejects
        Sexpr::Int(i)
    } else {
        Sexpr::Sym(tok.to_string())
    }
}

/// Parse every top-level form in `input`.
pub fn parse_all(input: &str) -> Result<Vec<Sexpr>, SexprError> {
    let tokens = tokenize(input);
    let mut stack: Vec<Vec<Sexpr>> = Vec::new();
    let mut top: Vec<Sexpr> = Vec::new();
    for (pos, tok) in tokens {
        match tok.as_str() {
            "(" => stack.push(Vec::new()),
            ")" => {
                let items = stack.pop().ok_or(SexprError::UnexpectedClose(pos))?;
                let list = Sexpr::List(items);
                match stack.last_mut() {
                    Some(parent) => parent.push(list),
                    None => top.push(list),
                }
            }
            _ => {
                let a = atom(&tok);
                match stack.last_mut() {
                    Some(parent) => parent.push(a),
                    None => top.push(a),
                }
            }
        }
    }
    if !stack.is_empty() {
        return Err(SexprError::UnclosedList);
    }
    Ok(top)
}

/// Parse exactly one form.
pub fn parse_one(input: &str) -> Result<Sexpr, SexprError> {
    let forms = parse_all(input)?;
    match forms.len() {
        1 => Ok(forms.into_iter().next().unwrap()),
        0 => Err(SexprError::UnclosedList),
        _ => Err(SexprError::Trailing(0)),
    }
}

impl std::fmt::Display for Sexpr {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Sexpr::Sym(s) => write!(f, "{s}"),
            Sexpr::Int(i) => write!(f, "{i}"),
            Sexpr::List(items) => {
                write!(f, "(")?;
                for (idx, item) in items.iter().enumerate() {
                    if idx > 0 {
                        write!(f, " ")?;
                    }
                    write!(f, "{item}")?;
                }
                write!(f, ")")
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trips_nested_forms() {
        let src = "(sub f (mul 2 (mul k f))) ; comment\n(def g)";
        let forms = parse_all(src).unwrap();
        assert_eq!(forms.len(), 2);
        assert_eq!(forms[0].to_string(), "(sub f (mul 2 (mul k f)))");
    }

    #[test]
    fn negative_integers_are_atoms() {
        assert_eq!(parse_one("-7").unwrap(), Sexpr::Int(BigInt::from(-7)));
        assert_eq!(parse_one("h0").unwrap(), Sexpr::Sym("h0".into()));
    }

    #[test]
    fn unbalanced_input_errors() {
        assert!(parse_all("(a (b)").is_err());
        assert!(parse_all("a) ").is_err());
    }
}
