use std::fmt;

/// A problem found at a specific line of a text document (line 0 means the
/// document as a whole).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LineError {
    pub line: usize,
    pub message: String,
}

impl fmt::Display for LineError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.line == 0 {
            write!(f, "{}", self.message)
        } else {
            write!(f, "line {}: {}", self.line, self.message)
        }
    }
}

/// Every problem found while parsing a document.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{}", .0.iter().map(|e| e.to_string()).collect::<Vec<_>>().join("\n"))]
pub struct ParseErrors(pub Vec<LineError>);

impl ParseErrors {
    pub fn single(line: usize, message: impl Into<String>) -> ParseErrors {
        ParseErrors(vec![LineError {
            line,
            message: message.into(),
        }])
    }
}
