//! `lo..hi`, `lo..hi:step`, `lo..hi:x2` or a single value. Both ends are
//! inclusive.

use anyhow::{bail, Context, Result};

pub fn parse_range(text: &str) -> Result<Vec<u64>> {
    let text = text.trim();
    let Some((lo, rest)) = text.split_once("..") else {
        let v = parse_num(text)?;
        return Ok(vec![v]);
    };
    let (hi, step) = match rest.split_once(':') {
        Some((hi, step)) => (hi, Some(step)),
        None => (rest, None),
    };
    let (lo, hi) = (parse_num(lo)?, parse_num(hi)?);
    if lo > hi {
        bail!("range {text:?} is empty");
    }
    let mut out = Vec::new();
    match step {
        Some(s) if s.starts_with('x') => {
            let k = parse_num(&s[1..])?;
            if k < 2 || lo == 0 {
                bail!("geometric range {text:?} needs a factor of at least 2 and a non-zero start");
            }
            let mut v = lo;
            while v <= hi {
                out.push(v);
                v = match v.checked_mul(k) {
                    Some(v) => v,
                    None => break,
                };
            }
        }
        _ => {
            let k = step.map(parse_num).transpose()?.unwrap_or(1);
            if k == 0 {
                bail!("range {text:?} has a zero step");
            }
            let mut v = lo;
            while v <= hi {
                out.push(v);
                v = match v.checked_add(k) {
                    Some(v) => v,
                    None => break,
                };
            }
        }
    }
    Ok(out)
}

fn parse_num(s: &str) -> Result<u64> {
    s.trim()
        .parse()
        .with_context(|| format!("malformed number {s:?} in range"))
}

pub fn parse_sizes(text: &str) -> Result<Vec<usize>, String> {
    parse_range(text)
        .map(|v| v.into_iter().map(|x| x as usize).collect())
        .map_err(|e| format!("{e:#}"))
}

pub fn parse_bits_range(text: &str) -> Result<Vec<u32>, String> {
    let v = parse_range(text).map_err(|e| format!("{e:#}"))?;
    v.into_iter()
        .map(|x| u32::try_from(x).map_err(|_| format!("{x} is too large")))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn forms() {
        assert_eq!(parse_range("7").unwrap(), [7]);
        assert_eq!(parse_range("1..4").unwrap(), [1, 2, 3, 4]);
        assert_eq!(parse_range("12..20:2").unwrap(), [12, 14, 16, 18, 20]);
        assert_eq!(parse_range("256..4096:x2").unwrap(), [256, 512, 1024, 2048, 4096]);
        assert_eq!(parse_range("3..30:x3").unwrap(), [3, 9, 27]);
        assert_eq!(parse_range("5..5").unwrap(), [5]);
    }

    #[test]
    fn malformed() {
        for bad in [
            "", "a..b", "4..1", "1..4:0", "0..8:x2", "1..8:x1", "1..8:y", "1...3",
        ] {
            assert!(parse_range(bad).is_err(), "{bad}");
        }
    }
}
