use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Hard cap on the total register width of any dense object.
pub const MAX_QUBITS: usize = 14;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Register {
    pub name: String,
    pub qubits: usize,
}

/// Ordered named sub-registers. The first register holds the most significant
/// bits of a basis index (big-endian).
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Layout {
    registers: Vec<Register>,
}

impl Layout {
    pub fn new<I, S>(registers: I) -> Self
    where
        I: IntoIterator<Item = (S, usize)>,
        S: Into<String>,
    {
        let mut layout = Layout::default();
        for (name, qubits) in registers {
            layout.push(name.into(), qubits);
        }
        layout
    }

    pub fn single(name: &str, qubits: usize) -> Self {
        Layout::new([(name, qubits)])
    }

    // Names stay unique: a colliding name gets a `#k` suffix.
    fn push(&mut self, name: String, qubits: usize) {
        let mut candidate = name.clone();
        let mut k = 1;
        while self.registers.iter().any(|r| r.name == candidate) {
            candidate = format!("{name}#{k}");
            k += 1;
        }
        self.registers.push(Register { name: candidate, qubits });
    }

    pub fn registers(&self) -> &[Register] {
        &self.registers
    }

    pub fn num_qubits(&self) -> usize {
        self.registers.iter().map(|r| r.qubits).sum()
    }

    pub fn dim(&self) -> usize {
        1usize << self.num_qubits()
    }

    pub fn contains(&self, name: &str) -> bool {
        self.registers.iter().any(|r| r.name == name)
    }

    pub fn position(&self, name: &str) -> Result<usize> {
        self.registers
            .iter()
            .position(|r| r.name == name)
            .ok_or_else(|| Error::UnknownRegister(name.to_string()))
    }

    pub fn width(&self, name: &str) -> Result<usize> {
        Ok(self.registers[self.position(name)?].qubits)
    }

    /// Bit position of a register inside a basis index.
    pub fn field(&self, name: &str) -> Result<BitField> {
        let pos = self.position(name)?;
        let shift = self.registers[pos + 1..].iter().map(|r| r.qubits).sum();
        Ok(BitField {
            shift,
            width: self.registers[pos].qubits,
        })
    }

    /// Composite field over several registers; the first name is most significant.
    pub fn fields(&self, names: &[&str]) -> Result<MultiField> {
        let fields = names
            .iter()
            .map(|n| self.field(n))
            .collect::<Result<Vec<_>>>()?;
        Ok(MultiField::new(fields))
    }

    pub fn concat(&self, other: &Layout) -> Layout {
        let mut out = self.clone();
        for r in &other.registers {
            out.push(r.name.clone(), r.qubits);
        }
        out
    }

    /// Layout with the named registers removed (order of the rest preserved).
    pub fn without(&self, names: &[&str]) -> Layout {
        Layout {
            registers: self
                .registers
                .iter()
                .filter(|r| !names.contains(&r.name.as_str()))
                .cloned()
                .collect(),
        }
    }

    /// Layout restricted to the named registers, in the order given.
    pub fn select(&self, names: &[&str]) -> Result<Layout> {
        let mut out = Layout::default();
        for n in names {
            out.push(n.to_string(), self.width(n)?);
        }
        Ok(out)
    }

    /// Replace one register by consecutive parts whose widths sum to its width.
    pub fn split(&self, name: &str, parts: &[(&str, usize)]) -> Result<Layout> {
        let pos = self.position(name)?;
        let total: usize = parts.iter().map(|p| p.1).sum();
        if total != self.registers[pos].qubits {
            return Err(Error::WidthMismatch(format!(
                "split of `{name}` into {total} qubits, register has {}",
                self.registers[pos].qubits
            )));
        }
        let mut regs = self.registers[..pos].to_vec();
        regs.extend(parts.iter().map(|(n, q)| Register {
            name: n.to_string(),
            qubits: *q,
        }));
        regs.extend_from_slice(&self.registers[pos + 1..]);
        Layout::checked(regs)
    }

    /// Merge adjacent registers into one named register.
    pub fn merge(&self, names: &[&str], into: &str) -> Result<Layout> {
        let first = self.position(names[0])?;
        for (k, n) in names.iter().enumerate() {
            if self.position(n)? != first + k {
                return Err(Error::InvalidParameter(format!(
                    "registers {names:?} are not adjacent"
                )));
            }
        }
        let width = names.iter().map(|n| self.width(n)).sum::<Result<usize>>()?;
        let mut regs = self.registers[..first].to_vec();
        regs.push(Register {
            name: into.to_string(),
            qubits: width,
        });
        regs.extend_from_slice(&self.registers[first + names.len()..]);
        Layout::checked(regs)
    }

    /// Rename a register.
    pub fn rename(&self, from: &str, to: &str) -> Result<Layout> {
        let pos = self.position(from)?;
        let mut regs = self.registers.clone();
        regs[pos].name = to.to_string();
        Layout::checked(regs)
    }

    fn checked(regs: Vec<Register>) -> Result<Layout> {
        for (i, r) in regs.iter().enumerate() {
            if regs[..i].iter().any(|o| o.name == r.name) {
                return Err(Error::InvalidParameter(format!(
                    "duplicate register name `{}`",
                    r.name
                )));
            }
        }
        Ok(Layout { registers: regs })
    }
}

/// Contiguous bit range `[shift, shift + width)` of a basis index.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BitField {
    pub shift: usize,
    pub width: usize,
}

impl BitField {
    pub fn mask(&self) -> usize {
        ((1usize << self.width) - 1) << self.shift
    }

    pub fn get(&self, index: usize) -> usize {
        (index >> self.shift) & ((1usize << self.width) - 1)
    }

    pub fn set(&self, index: usize, value: usize) -> usize {
        (index & !self.mask()) | (value << self.shift)
    }
}

/// Several bit fields read as one integer, first field most significant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiField {
    fields: Vec<BitField>,
    width: usize,
    mask: usize,
}

impl MultiField {
    pub fn new(fields: Vec<BitField>) -> Self {
        let width = fields.iter().map(|f| f.width).sum();
        let mask = fields.iter().fold(0, |m, f| m | f.mask());
        MultiField {
            fields,
            width,
            mask,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn dim(&self) -> usize {
        1usize << self.width
    }

    pub fn mask(&self) -> usize {
        self.mask
    }

    pub fn get(&self, index: usize) -> usize {
        self.fields
            .iter()
            .fold(0, |acc, f| (acc << f.width) | f.get(index))
    }

    /// Scatter a composite value into an index whose field bits are zero.
    pub fn deposit(&self, mut value: usize) -> usize {
        let mut out = 0;
        for f in self.fields.iter().rev() {
            out |= (value & ((1usize << f.width) - 1)) << f.shift;
            value >>= f.width;
        }
        out
    }

    /// Offsets of every composite value, indexed by that value.
    pub fn offsets(&self) -> Vec<usize> {
        (0..self.dim()).map(|v| self.deposit(v)).collect()
    }

    /// All indices in `0..dim` whose field bits are zero ("fiber bases").
    pub fn bases(&self, dim: usize) -> impl Iterator<Item = usize> + '_ {
        (0..dim).filter(move |i| i & self.mask == 0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn big_endian_fields() {
        let l = Layout::new([("a", 2), ("b", 3)]);
        assert_eq!(l.field("a").unwrap(), BitField { shift: 3, width: 2 });
        assert_eq!(l.field("b").unwrap(), BitField { shift: 0, width: 3 });
        assert_eq!(l.dim(), 32);
        let idx = 0b10_011;
        assert_eq!(l.field("a").unwrap().get(idx), 0b10);
        assert_eq!(l.field("b").unwrap().get(idx), 0b011);
    }

    #[test]
    fn multifield_roundtrip() {
        let l = Layout::new([("a", 1), ("x", 2), ("b", 2)]);
        let mf = l.fields(&["b", "a"]).unwrap();
        for v in 0..mf.dim() {
            assert_eq!(mf.get(mf.deposit(v)), v);
        }
        assert_eq!(mf.bases(l.dim()).count(), 4);
    }

    #[test]
    fn duplicate_names_get_suffixed() {
        let l = Layout::single("q", 1).concat(&Layout::single("q", 2));
        assert_eq!(l.registers()[1].name, "q#1");
    }

    #[test]
    fn split_and_merge() {
        let l = Layout::new([("msg", 3), ("a", 1)]);
        let s = l.split("msg", &[("c0", 1), ("rest", 2)]).unwrap();
        assert_eq!(s.field("c0").unwrap().shift, 3);
        assert_eq!(s.merge(&["c0", "rest"], "msg").unwrap(), l);
        assert!(l.split("msg", &[("c0", 1)]).is_err());
        assert!(s.merge(&["c0", "a"], "z").is_err());
    }
}
