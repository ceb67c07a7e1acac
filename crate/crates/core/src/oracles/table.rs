use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Truth table of `f: {0,1}^n → {0,1}^m`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassicalFunctionTable {
    n_in: usize,
    m_out: usize,
    table: Vec<u64>,
}

impl ClassicalFunctionTable {
    pub fn new(n_in: usize, m_out: usize, table: Vec<u64>) -> Result<Self> {
        if n_in > 24 || m_out > 63 {
            return Err(Error::InvalidParameter(format!(
                "table widths n={n_in}, m={m_out} exceed limits"
            )));
        }
        if table.len() != 1usize << n_in {
            return Err(Error::MalformedTable(format!(
                "expected {} entries, found {}",
                1usize << n_in,
                table.len()
            )));
        }
        if let Some((k, v)) = table.iter().enumerate().find(|(_, v)| **v >> m_out != 0) {
            return Err(Error::MalformedTable(format!(
                "entry {k} = {v:#x} wider than {m_out} bits"
            )));
        }
        Ok(ClassicalFunctionTable { n_in, m_out, table })
    }

    pub fn from_fn<F: Fn(usize) -> u64>(n_in: usize, m_out: usize, f: F) -> Result<Self> {
        let table = (0..1usize << n_in).map(f).collect();
        ClassicalFunctionTable::new(n_in, m_out, table)
    }

    pub fn n_in(&self) -> usize {
        self.n_in
    }

    pub fn m_out(&self) -> usize {
        self.m_out
    }

    pub fn eval(&self, x: usize) -> u64 {
        self.table[x]
    }

    pub fn entries(&self) -> &[u64] {
        &self.table
    }

    /// Parses one hex value per line; line `k` is `f(k)`. Blank lines and lines
    /// starting with `#` are skipped. The line count fixes `n`.
    pub fn from_hex(text: &str, m_out: usize) -> Result<Self> {
        let mut table = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let digits = line
                .strip_prefix("0x")
                .or_else(|| line.strip_prefix("0X"))
                .unwrap_or(line);
            let v = u64::from_str_radix(digits, 16).map_err(|e| {
                Error::MalformedTable(format!("line {}: `{line}`: {e}", lineno + 1))
            })?;
            table.push(v);
        }
        if !table.len().is_power_of_two() {
            return Err(Error::MalformedTable(format!(
                "{} entries is not a power of two",
                table.len()
            )));
        }
        let n_in = table.len().trailing_zeros() as usize;
        ClassicalFunctionTable::new(n_in, m_out, table)
    }

    /// Lowercase hex, zero-padded to `⌈m/4⌉` digits, one entry per line.
    pub fn to_hex(&self) -> String {
        let width = self.m_out.div_ceil(4).max(1);
        let mut out = String::with_capacity(self.table.len() * (width + 1));
        for v in &self.table {
            let _ = writeln!(out, "{v:0width$x}");
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hex_roundtrip() {
        let t = ClassicalFunctionTable::from_fn(3, 8, |x| (x as u64 * 37) & 0xff).unwrap();
        let text = t.to_hex();
        assert_eq!(text.lines().next(), Some("00"));
        assert_eq!(ClassicalFunctionTable::from_hex(&text, 8).unwrap(), t);
    }

    #[test]
    fn hex_comments_and_prefix() {
        let t = ClassicalFunctionTable::from_hex("# f\n0x1\n2\n\n3\n0\n", 2).unwrap();
        assert_eq!(t.entries(), &[1, 2, 3, 0]);
        assert_eq!(t.n_in(), 2);
    }

    #[test]
    fn malformed_tables() {
        assert!(ClassicalFunctionTable::from_hex("1\n2\n3\n", 2).is_err());
        assert!(ClassicalFunctionTable::from_hex("1\nzz\n", 2).is_err());
        assert!(ClassicalFunctionTable::from_hex("1\n4\n", 2).is_err());
        assert!(ClassicalFunctionTable::new(2, 2, vec![0; 3]).is_err());
    }
}
