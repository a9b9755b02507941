//! Policies of the Nudge family: tables `n(s)` over the types of the last M arrivals.
//!
//! A type string `s = s_1 ... s_M` lists the most recent arrival first. Internally
//! a string is a bit mask where bit `k-1` is set when `s_k` is a type-2 arrival.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest window for which a full table is built.
pub const TABLE_CAP: usize = 12;

/// Number of type-2 arrivals in a string.
pub fn twos(s: &[u8]) -> usize {
    s.iter().filter(|&&x| x == 2).count()
}

/// A function `n: {1,2}^M -> {0..M}` obeying `n(s) <= t(s)` and
/// `n(s_0 s_1 .. s_{M-1}) <= n(s) + 1(s_0 = 2)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PolicyFn {
    m: usize,
    table: Vec<u8>,
}

impl PolicyFn {
    pub fn new(m: usize, table: Vec<u8>) -> Result<Self> {
        if m > TABLE_CAP {
            return Err(Error::Complexity { what: "policy window", value: m, cap: TABLE_CAP });
        }
        if table.len() != 1 << m {
            return Err(Error::Input(format!("policy table of window {m} needs {} entries", 1usize << m)));
        }
        let pol = Self { m, table };
        pol.validate()?;
        Ok(pol)
    }

    /// Builds the table from a function of the type string (newest first, entries 1 or 2).
    pub fn from_fn(m: usize, f: impl Fn(&[u8]) -> usize) -> Result<Self> {
        if m > TABLE_CAP {
            return Err(Error::Complexity { what: "policy window", value: m, cap: TABLE_CAP });
        }
        let mut table = Vec::with_capacity(1 << m);
        let mut buf = vec![1u8; m];
        for idx in 0..(1usize << m) {
            decode(idx, &mut buf);
            let n = f(&buf);
            if n > m {
                return Err(Error::Input(format!("n({}) = {n} exceeds the window", Self::word(idx, m))));
            }
            table.push(n as u8);
        }
        Self::new(m, table)
    }

    fn validate(&self) -> Result<()> {
        let m = self.m;
        let mask = (1usize << m) - 1;
        for idx in 0..(1usize << m) {
            let n = self.table[idx] as usize;
            if n > idx.count_ones() as usize {
                return Err(Error::Input(format!(
                    "n({}) = {n} exceeds the number of twos",
                    Self::word(idx, m)
                )));
            }
            if m == 0 {
                continue;
            }
            for newest in [0usize, 1] {
                let shifted = ((idx << 1) | newest) & mask;
                if self.table[shifted] as usize > n + newest {
                    return Err(Error::Input(format!(
                        "n({}) = {} violates the shift condition against n({}) = {n}",
                        Self::word(shifted, m),
                        self.table[shifted],
                        Self::word(idx, m)
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn window(&self) -> usize {
        self.m
    }

    /// `n` at the string encoded by `idx`.
    pub fn n_index(&self, idx: usize) -> usize {
        self.table[idx] as usize
    }

    /// `n` at a type string listed newest first.
    pub fn n(&self, s: &[u8]) -> usize {
        self.table[encode(s)] as usize
    }

    pub fn table_slice(&self) -> &[u8] {
        &self.table
    }

    /// The type word of `idx`, newest arrival first, e.g. `2112`.
    pub fn word(idx: usize, m: usize) -> String {
        (0..m).map(|k| if idx & (1 << k) != 0 { '2' } else { '1' }).collect()
    }

    /// Every valid table of window `m`.
    pub fn enumerate(m: usize) -> Vec<PolicyFn> {
        let size = 1usize << m;
        let limits: Vec<u8> = (0..size).map(|i| i.count_ones() as u8).collect();
        let mut table = vec![0u8; size];
        let mut out = Vec::new();
        loop {
            let pol = PolicyFn { m, table: table.clone() };
            if pol.validate().is_ok() {
                out.push(pol);
            }
            let mut pos = 0;
            loop {
                if pos == size {
                    return out;
                }
                if table[pos] < limits[pos] {
                    table[pos] += 1;
                    break;
                }
                table[pos] = 0;
                pos += 1;
            }
        }
    }

    /// Parses the text format: one line per word with its value, e.g. `2112 1`.
    /// Blank lines and lines starting with `#` are skipped.
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut parts = line.split_whitespace();
            let (Some(word), Some(value), None) = (parts.next(), parts.next(), parts.next()) else {
                return Err(Error::Input(format!("policy line {}: expected `<word> <n>`", lineno + 1)));
            };
            let word = if word == "-" { "" } else { word };
            let mut s = Vec::with_capacity(word.len());
            for c in word.chars() {
                match c {
                    '1' => s.push(1u8),
                    '2' => s.push(2u8),
                    _ => return Err(Error::Input(format!("policy line {}: bad type `{c}`", lineno + 1))),
                }
            }
            let n: usize = value
                .parse()
                .map_err(|_| Error::Input(format!("policy line {}: bad value `{value}`", lineno + 1)))?;
            entries.push((s, n));
        }
        let m = entries.first().map(|(s, _)| s.len()).ok_or_else(|| Error::Input("empty policy file".into()))?;
        if m > TABLE_CAP {
            return Err(Error::Complexity { what: "policy window", value: m, cap: TABLE_CAP });
        }
        let mut table = vec![None; 1 << m];
        for (s, n) in entries {
            if s.len() != m {
                return Err(Error::Input("policy words have different lengths".into()));
            }
            if n > m {
                return Err(Error::Input(format!("value {n} exceeds the window {m}")));
            }
            let idx = encode(&s);
            if table[idx].replace(n as u8).is_some() {
                return Err(Error::Input(format!("word {} listed twice", Self::word(idx, m))));
            }
        }
        let table = table
            .into_iter()
            .enumerate()
            .map(|(i, v)| v.ok_or_else(|| Error::Input(format!("word {} missing", Self::word(i, m)))))
            .collect::<Result<Vec<_>>>()?;
        Self::new(m, table)
    }

    /// Inverse of [`PolicyFn::parse`].
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for idx in 0..self.table.len() {
            let w = Self::word(idx, self.m);
            out.push_str(if w.is_empty() { "-" } else { &w });
            out.push(' ');
            out.push_str(&self.table[idx].to_string());
            out.push('\n');
        }
        out
    }
}

impl fmt::Display for PolicyFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for idx in 0..self.table.len() {
            if idx > 0 {
                write!(f, " ")?;
            }
            write!(f, "{}:{}", Self::word(idx, self.m), self.table[idx])?;
        }
        write!(f, "}}")
    }
}

fn encode(s: &[u8]) -> usize {
    s.iter().enumerate().fold(0, |acc, (k, &x)| if x == 2 { acc | (1 << k) } else { acc })
}

fn decode(idx: usize, buf: &mut [u8]) {
    for (k, b) in buf.iter_mut().enumerate() {
        *b = if idx & (1 << k) != 0 { 2 } else { 1 };
    }
}

/// The named members of the family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum NamedPolicy {
    Fcfs,
    /// Pass every waiting type-2 job among the last `m` arrivals.
    NudgeM { m: usize },
    /// Pass the run of leading type-2 arrivals, at most `k`.
    NudgeK { k: usize },
    /// Pass the most recent type-2 arrival among the last `l`.
    NudgeL { l: usize },
    /// Nudge-M passing at most `k` jobs.
    NudgeKM { k: usize, m: usize },
    /// Nudge-M where a type-2 job is passed at most `l` times.
    NudgeML { m: usize, l: usize },
    /// At most `k` passes per type-1 job and `l` per type-2 job; window `k + l - 1`.
    NudgeKL { k: usize, l: usize },
}

impl NamedPolicy {
    pub fn window(&self) -> usize {
        match *self {
            NamedPolicy::Fcfs => 0,
            NamedPolicy::NudgeM { m } => m,
            NamedPolicy::NudgeK { k } => k,
            NamedPolicy::NudgeL { l } => l,
            NamedPolicy::NudgeKM { m, .. } => m,
            NamedPolicy::NudgeML { m, .. } => m,
            NamedPolicy::NudgeKL { k, l } => (k + l).saturating_sub(1),
        }
    }

    pub fn check(&self) -> Result<()> {
        let bad = match *self {
            NamedPolicy::NudgeKM { k, m } => k > m,
            NamedPolicy::NudgeML { m, l } => l > m,
            NamedPolicy::NudgeKL { k, l } => k == 0 || l == 0,
            _ => false,
        };
        if bad {
            return Err(Error::Input(format!("invalid parameters for {self}")));
        }
        Ok(())
    }

    /// `n(s)` for a type string of length [`NamedPolicy::window`], newest first.
    pub fn n(&self, s: &[u8]) -> usize {
        match *self {
            NamedPolicy::Fcfs => 0,
            NamedPolicy::NudgeM { .. } => twos(s),
            NamedPolicy::NudgeK { .. } => s.iter().take_while(|&&x| x == 2).count(),
            NamedPolicy::NudgeL { .. } => twos(s).min(1),
            NamedPolicy::NudgeKM { k, .. } => twos(s).min(k),
            NamedPolicy::NudgeML { l, .. } => {
                let mut ones = 0;
                let mut count = 0;
                for &x in s {
                    if x == 1 {
                        ones += 1;
                        if ones == l {
                            break;
                        }
                    } else {
                        count += 1;
                    }
                }
                count
            }
            NamedPolicy::NudgeKL { k, l } => {
                let (mut ones, mut count) = (0, 0);
                for &x in s {
                    if x == 1 {
                        ones += 1;
                    } else {
                        count += 1;
                    }
                    if count == k || ones == l {
                        break;
                    }
                }
                count
            }
        }
    }

    pub fn table(&self) -> Result<PolicyFn> {
        self.check()?;
        PolicyFn::from_fn(self.window(), |s| self.n(s))
    }

    /// Parses `fcfs`, `nudge-m`, `nudge-k`, `nudge-l`, `nudge-km`, `nudge-ml`, `nudge-kl`
    /// with the parameters taken from `m`, `k`, `l`.
    pub fn from_name(name: &str, m: Option<usize>, k: Option<usize>, l: Option<usize>) -> Result<Self> {
        let need = |v: Option<usize>, what: &str| {
            v.ok_or_else(|| Error::Input(format!("policy {name} needs --{what}")))
        };
        let pol = match name.to_ascii_lowercase().replace([',', '_'], "-").as_str() {
            "fcfs" => NamedPolicy::Fcfs,
            "nudge-m" => NamedPolicy::NudgeM { m: need(m, "m")? },
            "nudge-k" => NamedPolicy::NudgeK { k: need(k, "k")? },
            "nudge-l" => NamedPolicy::NudgeL { l: need(l, "l")? },
            "nudge-km" | "nudge-k-m" => NamedPolicy::NudgeKM { k: need(k, "k")?, m: need(m, "m")? },
            "nudge-ml" | "nudge-m-l" => NamedPolicy::NudgeML { m: need(m, "m")?, l: need(l, "l")? },
            "nudge-kl" | "nudge-k-l" => NamedPolicy::NudgeKL { k: need(k, "k")?, l: need(l, "l")? },
            other => return Err(Error::Input(format!("unknown policy `{other}`"))),
        };
        pol.check()?;
        Ok(pol)
    }
}

impl fmt::Display for NamedPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            NamedPolicy::Fcfs => write!(f, "FCFS"),
            NamedPolicy::NudgeM { m } => write!(f, "Nudge-M(M={m})"),
            NamedPolicy::NudgeK { k } => write!(f, "Nudge-K(K={k})"),
            NamedPolicy::NudgeL { l } => write!(f, "Nudge-L(L={l})"),
            NamedPolicy::NudgeKM { k, m } => write!(f, "Nudge-K,M(K={k},M={m})"),
            NamedPolicy::NudgeML { m, l } => write!(f, "Nudge-M,L(M={m},L={l})"),
            NamedPolicy::NudgeKL { k, l } => write!(f, "Nudge-K,L(K={k},L={l})"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(word: &str) -> Vec<u8> {
        word.bytes().map(|b| b - b'0').collect()
    }

    #[test]
    fn kl_examples() {
        let pol = NamedPolicy::NudgeKL { k: 3, l: 2 };
        assert_eq!(pol.n(&s("2112")), 1);
        assert_eq!(pol.n(&s("2222")), 3);
        assert_eq!(pol.n(&s("1122")), 0);
    }

    #[test]
    fn k_leading_twos() {
        assert_eq!(NamedPolicy::NudgeK { k: 5 }.n(&s("22212")), 3);
    }

    #[test]
    fn named_tables_are_valid() {
        for w in 1..=6 {
            for a in 1..=w {
                NamedPolicy::NudgeKM { k: a, m: w }.table().unwrap();
                NamedPolicy::NudgeML { m: w, l: a }.table().unwrap();
            }
            NamedPolicy::NudgeM { m: w }.table().unwrap();
            NamedPolicy::NudgeK { k: w }.table().unwrap();
            NamedPolicy::NudgeL { l: w }.table().unwrap();
        }
        for k in 1..=4 {
            for l in 1..=4 {
                NamedPolicy::NudgeKL { k, l }.table().unwrap();
            }
        }
    }

    #[test]
    fn extreme_parameters_coincide() {
        for m in 1..=5 {
            let nm = NamedPolicy::NudgeM { m }.table().unwrap();
            assert_eq!(NamedPolicy::NudgeKM { k: m, m }.table().unwrap(), nm);
            assert_eq!(NamedPolicy::NudgeML { m, l: m }.table().unwrap(), nm);
            assert_eq!(NamedPolicy::NudgeKM { k: 1, m }.table().unwrap(), NamedPolicy::NudgeL { l: m }.table().unwrap());
            assert_eq!(NamedPolicy::NudgeML { m, l: 1 }.table().unwrap(), NamedPolicy::NudgeK { k: m }.table().unwrap());
        }
    }

    #[test]
    fn conditions_enforced() {
        // n(2) = 1 but n(1) must then satisfy n(1) <= n(2) + 0.
        assert!(PolicyFn::new(1, vec![0, 1]).is_ok());
        assert!(PolicyFn::new(1, vec![1, 1]).is_err());
        // Window 2: n(12) = 1 requires n(21)... shift of "12" with newest 2 gives "21"; n(21) <= n(12) + 1.
        assert!(PolicyFn::from_fn(2, |s| if s == [1, 2] { 1 } else { 0 }).is_err());
    }

    #[test]
    fn enumeration_counts() {
        assert_eq!(PolicyFn::enumerate(1).len(), 2);
        for m in 1..=3 {
            let all = PolicyFn::enumerate(m);
            assert!(all.contains(&NamedPolicy::NudgeM { m }.table().unwrap()));
            assert!(all.contains(&PolicyFn::from_fn(m, |_| 0).unwrap()));
        }
    }

    #[test]
    fn text_round_trip() {
        let pol = NamedPolicy::NudgeKL { k: 2, l: 2 }.table().unwrap();
        assert_eq!(PolicyFn::parse(&pol.to_text()).unwrap(), pol);
        assert!(PolicyFn::parse("12 0\n").is_err());
        assert!(PolicyFn::parse("1 0\n2 1\n1 0\n").is_err());
    }
}
