//! Plain-text step-function files.
//!
//! ```text
//! domain unit            # or: domain halfline 16
//! 0.25 3                 # breakpoint, value on the piece ending there
//! 1 0.5
//! ```

use std::fmt::Write as _;

use ces_interp::funcore::{Domain, StepFunction};

use crate::CliError;

pub fn parse(text: &str) -> Result<StepFunction, CliError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());
    let (n, header) = lines
        .next()
        .ok_or_else(|| CliError::Usage("empty function file".into()))?;
    let words: Vec<&str> = header.split_whitespace().collect();
    let domain = match words.as_slice() {
        ["domain", "unit"] => Domain::UnitInterval,
        ["domain", "halfline", t] => Domain::half_line(number(t, n)?)?,
        _ => {
            return Err(CliError::Usage(format!(
                "line {n}: expected `domain unit` or `domain halfline T`"
            )))
        }
    };
    let mut breaks = vec![0.0];
    let mut vals = Vec::new();
    for (n, line) in lines {
        let w: Vec<&str> = line.split_whitespace().collect();
        let [x, v] = w.as_slice() else {
            return Err(CliError::Usage(format!("line {n}: expected `x v`")));
        };
        breaks.push(number(x, n)?);
        vals.push(number(v, n)?);
    }
    Ok(StepFunction::new(domain, breaks, vals)?)
}

fn number(s: &str, line: usize) -> Result<f64, CliError> {
    s.parse()
        .map_err(|_| CliError::Usage(format!("line {line}: `{s}` is not a number")))
}

/// Writes `f` with 17 significant digits, so that [`parse`] reproduces it exactly.
pub fn write(f: &StepFunction) -> String {
    let mut s = match f.domain() {
        Domain::UnitInterval => "domain unit\n".to_string(),
        Domain::HalfLine { truncation } => format!("domain halfline {}\n", sig17(truncation)),
    };
    for (x, v) in f.breaks()[1..].iter().zip(f.vals()) {
        writeln!(s, "{} {}", sig17(*x), sig17(*v)).expect("writing to a String");
    }
    s
}

/// 17 significant digits.
pub fn sig17(x: f64) -> String {
    format!("{x:.16e}")
}

/// A function from comma-separated breakpoints (right ends) and values.
pub fn inline(domain: Domain, breaks: &[f64], values: &[f64]) -> Result<StepFunction, CliError> {
    let mut b = vec![0.0];
    b.extend_from_slice(breaks);
    Ok(StepFunction::new(domain, b, values.to_vec())?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let f = StepFunction::new(
            Domain::half_line(16.0).unwrap(),
            vec![0.0, 0.1, 1.0 / 3.0, 16.0],
            vec![2.5, 1e-3 / 7.0, 0.0],
        )
        .unwrap();
        assert_eq!(parse(&write(&f)).unwrap(), f);
    }

    #[test]
    fn comments_and_errors() {
        let f = parse("# a comment\ndomain unit\n\n0.5 1  # first\n1 2\n").unwrap();
        assert_eq!(f.vals(), &[1.0, 2.0]);
        assert!(parse("domain disk\n1 1\n").is_err());
        assert!(parse("domain unit\n0.5 1\n").is_err());
        assert!(parse("domain unit\n1 x\n").is_err());
    }
}
