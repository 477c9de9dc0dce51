//! Line cursor with positioned errors.

use super::IoError;

pub(crate) struct Lines<'a> {
    lines: std::str::Split<'a, char>,
    line: usize,
    remaining: usize,
}

impl<'a> Lines<'a> {
    pub fn new(text: &'a str) -> Result<Self, IoError> {
        let Some(body) = text.strip_suffix('\n') else {
            let line = text.lines().count().max(1);
            return Err(IoError::Format { line, message: "file must end with a newline".into() });
        };
        Ok(Lines { lines: body.split('\n'), line: 0, remaining: body.split('\n').count() })
    }

    pub fn line(&self) -> usize {
        self.line
    }

    pub fn err<T>(&self, message: impl Into<String>) -> Result<T, IoError> {
        Err(IoError::Format { line: self.line, message: message.into() })
    }

    /// Next line split on whitespace; an error at end of input.
    pub fn tokens(&mut self, what: &str) -> Result<Vec<&'a str>, IoError> {
        match self.lines.next() {
            Some(l) => {
                self.line += 1;
                self.remaining -= 1;
                Ok(l.split_whitespace().collect())
            }
            None => Err(IoError::Format { line: self.line + 1, message: format!("unexpected end of file, expected {what}") }),
        }
    }

    pub fn finish(mut self) -> Result<(), IoError> {
        if self.remaining > 0 {
            self.line += 1;
            return self.err("unexpected content after the last record");
        }
        Ok(())
    }

    /// Value of `key=value` token `tok`.
    pub fn field(&self, tok: Option<&&'a str>, key: &str) -> Result<&'a str, IoError> {
        match tok.and_then(|t| t.strip_prefix(key)).and_then(|t| t.strip_prefix('=')) {
            Some(v) => Ok(v),
            None => self.err(format!("expected {key}=<value>")),
        }
    }

    pub fn parse<T: std::str::FromStr>(&self, s: &str, what: &str) -> Result<T, IoError> {
        s.parse().or_else(|_| self.err(format!("invalid {what}: {s:?}")))
    }

    pub fn real(&self, s: &str, what: &str) -> Result<f64, IoError> {
        let v: f64 = self.parse(s, what)?;
        if !v.is_finite() {
            return self.err(format!("{what} must be finite"));
        }
        Ok(v)
    }

    pub fn sign(&self, s: &str) -> Result<i8, IoError> {
        match s {
            "+1" => Ok(1),
            "-1" => Ok(-1),
            _ => self.err(format!("spin must be +1 or -1, got {s:?}")),
        }
    }
}

pub(crate) fn fmt_sign(s: i8) -> &'static str {
    if s > 0 {
        "+1"
    } else {
        "-1"
    }
}
