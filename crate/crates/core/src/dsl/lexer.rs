use num_bigint::BigInt;
use num_traits::Zero;

use super::{DslError, Pos};
use crate::symexpr::Rat;

#[derive(Clone, Debug, PartialEq)]
pub enum Tok {
    Ident(String),
    Num(Rat),
    Sym(&'static str),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Token {
    pub tok: Tok,
    pub pos: Pos,
}

const SYMBOLS: [&str; 17] = ["->", "!=", "+", "-", "*", "/", "^", "(", ")", "[", "]", ",", "=", ":", "@", "{", "}"];

/// Splits one logical line into tokens. `line` and `col0` locate it in the file.
pub fn tokenize(text: &str, line: usize, col0: usize) -> Result<Vec<Token>, DslError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let pos = Pos { line, col: col0 + i };
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_' || chars[i] == '\'') {
                i += 1;
            }
            out.push(Token { tok: Tok::Ident(chars[start..i].iter().collect()), pos });
            continue;
        }
        if c.is_ascii_digit() || (c == '.' && chars.get(i + 1).map_or(false, |d| d.is_ascii_digit())) {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let int_part: String = chars[start..i].iter().collect();
            let mut value = if int_part.is_empty() { Rat::zero() } else { Rat::from_integer(int_part.parse::<BigInt>().unwrap()) };
            if i < chars.len() && chars[i] == '.' {
                i += 1;
                let fs = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let frac: String = chars[fs..i].iter().collect();
                if !frac.is_empty() {
                    let num: BigInt = frac.parse().unwrap();
                    let den = num_traits::pow::Pow::pow(BigInt::from(10), frac.len());
                    value += Rat::new(num, den);
                }
            }
            out.push(Token { tok: Tok::Num(value), pos });
            continue;
        }
        let rest: String = chars[i..chars.len().min(i + 2)].iter().collect();
        match SYMBOLS.iter().find(|s| rest.starts_with(**s)) {
            Some(s) => {
                out.push(Token { tok: Tok::Sym(s), pos });
                i += s.len();
            }
            None => return Err(DslError::Syntax { pos, msg: format!("unexpected character `{c}`") }),
        }
    }
    Ok(out)
}
