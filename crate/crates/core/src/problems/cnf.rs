use std::fmt::Write as _;

use super::EncodingError;
use crate::verifier::log_width;

/// A 3-CNF formula over variables `1..=num_vars`. Literals are non-zero
/// signed variable indices, DIMACS style.
#[derive(Debug, Clone, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub struct CnfFormula {
    pub num_vars: usize,
    pub clauses: Vec<[i32; 3]>,
}

impl CnfFormula {
    /// Checks that every clause has three literals over distinct variables
    /// in range.
    pub fn new(num_vars: usize, clauses: Vec<[i32; 3]>) -> Result<CnfFormula, EncodingError> {
        for (i, c) in clauses.iter().enumerate() {
            for &lit in c {
                if lit == 0 || lit.unsigned_abs() as usize > num_vars {
                    return Err(EncodingError::new(format!(
                        "clause {i}: literal {lit} out of range 1..={num_vars}"
                    )));
                }
            }
            let v = c.map(|l| l.unsigned_abs());
            if v[0] == v[1] || v[0] == v[2] || v[1] == v[2] {
                return Err(EncodingError::new(format!("clause {i}: repeated variable")));
            }
        }
        Ok(CnfFormula { num_vars, clauses })
    }

    pub fn ratio(&self) -> f64 {
        if self.num_vars == 0 {
            0.0
        } else {
            self.clauses.len() as f64 / self.num_vars as f64
        }
    }

    /// Evaluates the formula; `assignment[i]` is the value of variable `i+1`.
    pub fn satisfied_by(&self, assignment: &[bool]) -> bool {
        self.clauses.iter().all(|c| {
            c.iter()
                .any(|&l| assignment[l.unsigned_abs() as usize - 1] == (l > 0))
        })
    }

    pub fn to_dimacs(&self) -> String {
        let mut out = format!("p cnf {} {}\n", self.num_vars, self.clauses.len());
        for c in &self.clauses {
            let _ = writeln!(out, "{} {} {} 0", c[0], c[1], c[2]);
        }
        out
    }

    /// Reads `p cnf n m` followed by zero-terminated clauses. Comment lines
    /// start with `c`.
    pub fn from_dimacs(text: &str) -> Result<CnfFormula, EncodingError> {
        let mut header = None;
        let mut lits = Vec::new();
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('c') || line.starts_with('%') {
                continue;
            }
            if let Some(rest) = line.strip_prefix('p') {
                let f: Vec<&str> = rest.split_whitespace().collect();
                if f.len() != 3 || f[0] != "cnf" {
                    return Err(EncodingError::new(format!("bad header {line:?}")));
                }
                let n = f[1]
                    .parse::<usize>()
                    .map_err(|_| EncodingError::new("bad variable count"))?;
                let m = f[2]
                    .parse::<usize>()
                    .map_err(|_| EncodingError::new("bad clause count"))?;
                header = Some((n, m));
                continue;
            }
            for tok in line.split_whitespace() {
                lits.push(
                    tok.parse::<i32>()
                        .map_err(|_| EncodingError::new(format!("bad literal {tok:?}")))?,
                );
            }
        }
        let (n, m) = header.ok_or_else(|| EncodingError::new("missing `p cnf` header"))?;
        let mut clauses = Vec::new();
        for chunk in lits.split(|&l| l == 0) {
            if chunk.is_empty() {
                continue;
            }
            let c: [i32; 3] = chunk
                .try_into()
                .map_err(|_| EncodingError::new(format!("clause {chunk:?} does not have 3 literals")))?;
            clauses.push(c);
        }
        if lits.last().is_some_and(|&l| l != 0) {
            return Err(EncodingError::new("last clause is not zero-terminated"));
        }
        if clauses.len() != m {
            return Err(EncodingError::new(format!(
                "header announces {m} clauses, found {}",
                clauses.len()
            )));
        }
        CnfFormula::new(n, clauses)
    }

    /// Input-tape text: clauses separated by `|`; each literal is `+` or `-`
    /// followed by the 0-based variable index in `max(1, ⌈log₂ n⌉)` binary
    /// digits.
    pub fn encode(&self) -> String {
        let w = log_width(self.num_vars) as usize;
        let mut out = String::new();
        for (i, c) in self.clauses.iter().enumerate() {
            if i > 0 {
                out.push('|');
            }
            for &l in c {
                out.push(if l > 0 { '+' } else { '-' });
                let _ = write!(out, "{:0w$b}", l.unsigned_abs() - 1);
            }
        }
        out
    }

    pub fn decode(num_vars: usize, text: &str) -> Result<CnfFormula, EncodingError> {
        let w = log_width(num_vars) as usize;
        let mut clauses = Vec::new();
        if text.is_empty() {
            return CnfFormula::new(num_vars, clauses);
        }
        for part in text.split('|') {
            let bytes = part.as_bytes();
            if bytes.len() != 3 * (w + 1) {
                return Err(EncodingError::new(format!(
                    "clause {part:?} has the wrong length"
                )));
            }
            let mut c = [0i32; 3];
            for (k, lit) in bytes.chunks(w + 1).enumerate() {
                let sign = match lit[0] {
                    b'+' => 1,
                    b'-' => -1,
                    _ => return Err(EncodingError::new(format!("bad sign in {part:?}"))),
                };
                let digits = std::str::from_utf8(&lit[1..]).expect("ascii");
                let idx = u32::from_str_radix(digits, 2)
                    .map_err(|_| EncodingError::new(format!("bad index in {part:?}")))?;
                c[k] = sign * (idx as i32 + 1);
            }
            clauses.push(c);
        }
        CnfFormula::new(num_vars, clauses)
    }
}
