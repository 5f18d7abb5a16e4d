//! Polynomial descriptors.
//!
//! ```text
//! poly := pair* ["*q"]        at least one factor in total
//! pair := "(" int "," int ")" the factor a·n + b
//! int  := ["-"|"+"] digit+
//! ```
//!
//! Whitespace is ignored anywhere. `*q` appends the factor `n² + 1`.

use rootwave::roots::{FactoredPoly, PolyError};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GrammarError {
    #[error("unexpected {found} at position {pos}, expected {expected}")]
    Unexpected {
        pos: usize,
        found: String,
        expected: &'static str,
    },
    #[error("integer at position {0} does not fit in 64 bits")]
    Overflow(usize),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

struct Cursor {
    chars: Vec<(usize, char)>,
    at: usize,
}

impl Cursor {
    fn peek(&self) -> Option<char> {
        self.chars.get(self.at).map(|&(_, c)| c)
    }

    fn pos(&self) -> usize {
        self.chars
            .get(self.at)
            .map_or_else(|| self.chars.last().map_or(0, |&(i, _)| i + 1), |&(i, _)| i)
    }

    fn fail<T>(&self, expected: &'static str) -> Result<T, GrammarError> {
        let found = self
            .peek()
            .map_or("end of input".to_string(), |c| format!("'{c}'"));
        Err(GrammarError::Unexpected {
            pos: self.pos(),
            found,
            expected,
        })
    }

    fn expect(&mut self, c: char, expected: &'static str) -> Result<(), GrammarError> {
        if self.peek() == Some(c) {
            self.at += 1;
            Ok(())
        } else {
            self.fail(expected)
        }
    }

    fn int(&mut self) -> Result<i64, GrammarError> {
        let start = self.pos();
        let mut text = String::new();
        if let Some(sign @ ('-' | '+')) = self.peek() {
            text.push(sign);
            self.at += 1;
        }
        while let Some(d) = self.peek().filter(char::is_ascii_digit) {
            text.push(d);
            self.at += 1;
        }
        if !text.ends_with(|c: char| c.is_ascii_digit()) {
            return self.fail("an integer");
        }
        text.parse().map_err(|_| GrammarError::Overflow(start))
    }
}

pub fn parse_poly(src: &str) -> Result<FactoredPoly, GrammarError> {
    let mut cur = Cursor {
        chars: src
            .char_indices()
            .filter(|(_, c)| !c.is_whitespace())
            .collect(),
        at: 0,
    };
    let mut linear = Vec::new();
    while cur.peek() == Some('(') {
        cur.at += 1;
        let a = cur.int()?;
        cur.expect(',', "','")?;
        let b = cur.int()?;
        cur.expect(')', "')'")?;
        linear.push((a, b));
    }
    let mut quadratic = false;
    if cur.peek() == Some('*') {
        cur.at += 1;
        cur.expect('q', "'q' after '*'")?;
        quadratic = true;
    }
    if cur.peek().is_some() {
        return cur.fail(if quadratic {
            "end of input"
        } else {
            "'(' or '*q'"
        });
    }
    Ok(FactoredPoly::new(linear, quadratic)?)
}
