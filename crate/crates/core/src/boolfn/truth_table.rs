use std::fmt;

use crate::error::{Error, Result};

/// Hard cap on truth-table arity (2^20 bits).
pub const MAX_ARITY: usize = 20;

/// Encodes a bit vector as a table index: variable 1 is the least-significant bit.
pub fn encode(x: &[bool]) -> u64 {
    x.iter()
        .enumerate()
        .fold(0u64, |acc, (i, &b)| acc | ((b as u64) << i))
}

pub fn decode(index: u64, n: usize) -> Vec<bool> {
    (0..n).map(|i| (index >> i) & 1 == 1).collect()
}

/// The named function families used throughout the crate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum NamedFunction {
    And,
    Or,
    Parity,
    Majority,
    InnerProduct,
}

impl NamedFunction {
    pub fn name(self) -> &'static str {
        match self {
            NamedFunction::And => "AND",
            NamedFunction::Or => "OR",
            NamedFunction::Parity => "PARITY",
            NamedFunction::Majority => "MAJORITY",
            NamedFunction::InnerProduct => "IP",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name.to_ascii_uppercase().as_str() {
            "AND" => Some(NamedFunction::And),
            "OR" => Some(NamedFunction::Or),
            "PARITY" | "XOR" => Some(NamedFunction::Parity),
            "MAJORITY" | "MAJ" => Some(NamedFunction::Majority),
            "IP" | "INNER_PRODUCT" => Some(NamedFunction::InnerProduct),
            _ => None,
        }
    }

    pub fn check_arity(self, arity: usize) -> Result<()> {
        if self == NamedFunction::InnerProduct && !arity.is_multiple_of(2) {
            return Err(Error::OddInnerProductArity(arity));
        }
        Ok(())
    }

    /// Majority is strict: more than half of the inputs must be 1.
    pub fn eval(self, x: &[bool]) -> bool {
        match self {
            NamedFunction::And => x.iter().all(|&b| b),
            NamedFunction::Or => x.iter().any(|&b| b),
            NamedFunction::Parity => x.iter().filter(|&&b| b).count() % 2 == 1,
            NamedFunction::Majority => 2 * x.iter().filter(|&&b| b).count() > x.len(),
            NamedFunction::InnerProduct => {
                let half = x.len() / 2;
                (0..half).filter(|&i| x[i] && x[half + i]).count() % 2 == 1
            }
        }
    }
}

impl fmt::Display for NamedFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Complete value table of a Boolean function on at most [`MAX_ARITY`] variables.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct TruthTable {
    arity: usize,
    words: Vec<u64>,
}

impl fmt::Debug for TruthTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TruthTable(arity={}, hex={})", self.arity, self.to_hex())
    }
}

impl TruthTable {
    fn check_arity(arity: usize) -> Result<()> {
        if arity > MAX_ARITY {
            return Err(Error::ArityOverflow {
                arity,
                cap: MAX_ARITY,
            });
        }
        Ok(())
    }

    pub fn constant(arity: usize, value: bool) -> Result<Self> {
        Self::from_fn(arity, |_| value)
    }

    pub fn from_fn(arity: usize, mut f: impl FnMut(u64) -> bool) -> Result<Self> {
        Self::check_arity(arity)?;
        let len = 1u64 << arity;
        let mut words = vec![0u64; len.div_ceil(64) as usize];
        for index in 0..len {
            if f(index) {
                words[(index / 64) as usize] |= 1 << (index % 64);
            }
        }
        Ok(TruthTable { arity, words })
    }

    pub fn from_bits(arity: usize, bits: &[bool]) -> Result<Self> {
        Self::check_arity(arity)?;
        if bits.len() != 1 << arity {
            return Err(Error::LengthMismatch {
                expected: 1 << arity,
                got: bits.len(),
            });
        }
        Self::from_fn(arity, |i| bits[i as usize])
    }

    pub fn named(kind: NamedFunction, arity: usize) -> Result<Self> {
        Self::check_arity(arity)?;
        kind.check_arity(arity)?;
        Self::from_fn(arity, |i| kind.eval(&decode(i, arity)))
    }

    /// Identity on one variable: `f(x1) = x1`.
    pub fn identity() -> Self {
        Self::from_fn(1, |i| i == 1).expect("arity 1")
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn len(&self) -> u64 {
        1 << self.arity
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn get(&self, index: u64) -> bool {
        (self.words[(index / 64) as usize] >> (index % 64)) & 1 == 1
    }

    pub fn eval(&self, x: &[bool]) -> Result<bool> {
        if x.len() != self.arity {
            return Err(Error::LengthMismatch {
                expected: self.arity,
                got: x.len(),
            });
        }
        Ok(self.get(encode(x)))
    }

    pub fn bits(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len()).map(|i| self.get(i))
    }

    pub fn count_ones(&self) -> u64 {
        self.words.iter().map(|w| w.count_ones() as u64).sum()
    }

    pub fn complement(&self) -> Self {
        Self::from_fn(self.arity, |i| !self.get(i)).expect("same arity")
    }

    /// Little-endian hex: byte `k` holds bits `8k..8k+7`, least-significant
    /// bit first, each byte printed as two lowercase hex digits.
    pub fn to_hex(&self) -> String {
        let nbytes = (self.len() as usize).div_ceil(8);
        (0..nbytes)
            .map(|k| {
                let byte = (self.words[k / 8] >> ((k % 8) * 8)) & 0xff;
                format!("{byte:02x}")
            })
            .collect()
    }

    pub fn from_hex(arity: usize, hex: &str) -> Result<Self> {
        Self::check_arity(arity)?;
        let nbytes = (1usize << arity).div_ceil(8);
        let hex = hex.trim();
        if hex.len() != 2 * nbytes {
            return Err(Error::parse(
                "hex",
                format!("expected {} hex digits for arity {arity}, got {}", 2 * nbytes, hex.len()),
            ));
        }
        let mut bytes = Vec::with_capacity(nbytes);
        for k in 0..nbytes {
            let byte = u8::from_str_radix(&hex[2 * k..2 * k + 2], 16)
                .map_err(|_| Error::parse("hex", format!("bad hex byte at {k}")))?;
            bytes.push(byte);
        }
        let len = 1u64 << arity;
        if len < 8 && bytes[0] >> len != 0 {
            return Err(Error::parse("hex", "bits set beyond the table length"));
        }
        Self::from_fn(arity, |i| (bytes[(i / 8) as usize] >> (i % 8)) & 1 == 1)
    }

    /// Restricts the table by fixing some variables; `fixed[i] = None` keeps
    /// variable `i` free. Free variables keep their relative order.
    pub fn restrict(&self, fixed: &[Option<bool>]) -> Result<Self> {
        if fixed.len() != self.arity {
            return Err(Error::LengthMismatch {
                expected: self.arity,
                got: fixed.len(),
            });
        }
        let free: Vec<usize> = (0..self.arity).filter(|&i| fixed[i].is_none()).collect();
        let base: u64 = fixed
            .iter()
            .enumerate()
            .map(|(i, v)| (matches!(v, Some(true)) as u64) << i)
            .sum();
        Self::from_fn(free.len(), |j| {
            let index = free
                .iter()
                .enumerate()
                .fold(base, |acc, (k, &var)| acc | (((j >> k) & 1) << var));
            self.get(index)
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bits_of(t: &TruthTable) -> Vec<u8> {
        t.bits().map(|b| b as u8).collect()
    }

    #[test]
    fn named_tables() {
        assert_eq!(bits_of(&TruthTable::named(NamedFunction::And, 2).unwrap()), [0, 0, 0, 1]);
        assert_eq!(bits_of(&TruthTable::named(NamedFunction::Parity, 2).unwrap()), [0, 1, 1, 0]);
        let ip = TruthTable::named(NamedFunction::InnerProduct, 4).unwrap();
        assert!(!ip.eval(&[true, true, true, true]).unwrap());
        assert!(ip.eval(&[true, false, true, false]).unwrap());
        assert!(matches!(
            TruthTable::named(NamedFunction::InnerProduct, 3),
            Err(Error::OddInnerProductArity(3))
        ));
        assert!(matches!(
            TruthTable::named(NamedFunction::And, 21),
            Err(Error::ArityOverflow { .. })
        ));
    }

    #[test]
    fn hex_round_trip_and_length_check() {
        let maj = TruthTable::named(NamedFunction::Majority, 5).unwrap();
        let hex = maj.to_hex();
        assert_eq!(hex.len(), 8);
        assert_eq!(TruthTable::from_hex(5, &hex).unwrap(), maj);
        let and2 = TruthTable::named(NamedFunction::And, 2).unwrap();
        assert_eq!(and2.to_hex(), "08");
        assert!(TruthTable::from_hex(2, "18").is_err());
        assert!(TruthTable::from_hex(3, "0").is_err());
    }

    #[test]
    fn restriction_fixes_variables() {
        let parity = TruthTable::named(NamedFunction::Parity, 3).unwrap();
        let r = parity.restrict(&[Some(true), None, None]).unwrap();
        assert_eq!(r, TruthTable::named(NamedFunction::Parity, 2).unwrap().complement());
    }

    #[test]
    fn index_convention_is_bijective() {
        for i in 0..1u64 << 10 {
            assert_eq!(encode(&decode(i, 10)), i);
        }
    }
}
