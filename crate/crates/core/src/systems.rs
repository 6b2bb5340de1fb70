//! The dynamical systems under study and their single-step evolution.
//!
//! Stepping a configuration never invents symbols: a radius-`r` automaton
//! maps a configuration known on `W_R` to one known on `W_{R-r}`.

use crate::error::{invalid, Error, Result};
use crate::space::{Alphabet, CirclePoint, Configuration, Indexing, Word};

/// A cellular automaton given by its full local rule table.
///
/// The neighbourhood of cell `i` is `x_i..x_{i+r}` (one-sided) or
/// `x_{i-r}..x_{i+r}` (two-sided); the table is indexed by that word read
/// as a base-`|A|` number, leftmost cell most significant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CaRule {
    alphabet: Alphabet,
    indexing: Indexing,
    radius: usize,
    table: Vec<u8>,
}

impl CaRule {
    pub fn new(alphabet: Alphabet, indexing: Indexing, radius: usize, table: Vec<u8>) -> Result<Self> {
        let cells = indexing.window_len(radius) as u32;
        let expected = (alphabet.size() as u128)
            .checked_pow(cells)
            .filter(|&n| n <= 1 << 24)
            .ok_or_else(|| Error::InvalidParameter("rule table too large".into()))?;
        if table.len() as u128 != expected {
            return invalid(format!("rule table has {} entries, expected {expected}", table.len()));
        }
        if table.iter().any(|&s| s as usize >= alphabet.size()) {
            return invalid("rule table maps outside the alphabet");
        }
        Ok(CaRule {
            alphabet,
            indexing,
            radius,
            table,
        })
    }

    pub fn from_fn(alphabet: Alphabet, indexing: Indexing, radius: usize, f: impl Fn(&[u8]) -> u8) -> Result<Self> {
        let cells = indexing.window_len(radius);
        let count = (alphabet.size() as u128)
            .checked_pow(cells as u32)
            .filter(|&n| n <= 1 << 24);
        let Some(count) = count else {
            return invalid("rule table too large");
        };
        let mut nbhd = vec![0u8; cells];
        let table = (0..count as usize)
            .map(|idx| {
                let mut rest = idx;
                for c in nbhd.iter_mut().rev() {
                    *c = (rest % alphabet.size()) as u8;
                    rest /= alphabet.size();
                }
                f(&nbhd)
            })
            .collect();
        Self::new(alphabet, indexing, radius, table)
    }

    /// Elementary (binary, radius 1, two-sided) rule in Wolfram numbering.
    pub fn elementary(rule: u8) -> Self {
        let table = (0..8).map(|i| (rule >> i) & 1).collect();
        Self::new(Alphabet::BINARY, Indexing::TwoSided, 1, table).expect("elementary table is total")
    }

    /// The rule that copies the centre cell.
    pub fn identity(alphabet: Alphabet, indexing: Indexing, radius: usize) -> Result<Self> {
        let centre = match indexing {
            Indexing::OneSided => 0,
            Indexing::TwoSided => radius,
        };
        Self::from_fn(alphabet, indexing, radius, |n| n[centre])
    }

    /// `(T x)_i = x_{i+1}` on the one-sided full shift.
    pub fn shift(alphabet: Alphabet) -> Self {
        Self::from_fn(alphabet, Indexing::OneSided, 1, |n| n[1]).expect("shift table is small")
    }

    pub fn wolfram_number(&self) -> Option<u8> {
        if self.alphabet != Alphabet::BINARY || self.indexing != Indexing::TwoSided || self.radius != 1 {
            return None;
        }
        Some(self.table.iter().enumerate().fold(0u8, |acc, (i, &b)| acc | (b << i)))
    }

    pub fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    pub fn indexing(&self) -> Indexing {
        self.indexing
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn table(&self) -> &[u8] {
        &self.table
    }

    pub fn apply(&self, neighbourhood: &[u8]) -> u8 {
        let a = self.alphabet.size();
        let idx = neighbourhood.iter().fold(0usize, |acc, &s| acc * a + s as usize);
        self.table[idx]
    }

    pub fn step(&self, x: &Configuration) -> Result<Configuration> {
        if x.alphabet() != self.alphabet || x.indexing() != self.indexing {
            return Err(Error::IncompatibleConfigurations);
        }
        if x.radius() < self.radius {
            return Err(Error::InsufficientRadius {
                needed: self.radius,
                available: x.radius(),
            });
        }
        let cells = self.indexing.window_len(self.radius);
        let next = x.symbols().windows(cells).map(|n| self.apply(n)).collect();
        Configuration::new(self.alphabet, self.indexing, next)
    }
}

/// The `+1` with carry map on `prod Z_{s_i}`. The last listed size repeats.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Odometer {
    sizes: Vec<usize>,
}

impl Odometer {
    pub fn new(sizes: Vec<usize>) -> Result<Self> {
        if sizes.is_empty() || sizes.iter().any(|&s| !(2..=256).contains(&s)) {
            return invalid("odometer factor sizes must be non-empty and within 2..=256");
        }
        Ok(Odometer { sizes })
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn size_at(&self, i: usize) -> usize {
        self.sizes[i.min(self.sizes.len() - 1)]
    }

    pub fn alphabet(&self) -> Alphabet {
        Alphabet::new(*self.sizes.iter().max().unwrap()).expect("sizes validated")
    }

    /// `prod_{i <= m} s_i`, the number of digit prefixes on `W_m`.
    pub fn cycle_length(&self, m: usize) -> u64 {
        (0..=m).map(|i| self.size_at(i) as u64).product()
    }

    fn check(&self, x: &Configuration) -> Result<()> {
        if x.alphabet() != self.alphabet() || x.indexing() != Indexing::OneSided {
            return Err(Error::IncompatibleConfigurations);
        }
        match x
            .symbols()
            .iter()
            .enumerate()
            .find(|(i, &d)| d as usize >= self.size_at(*i))
        {
            Some((i, d)) => invalid(format!("digit {d} at index {i} exceeds its factor size")),
            None => Ok(()),
        }
    }

    /// Carries past the valid radius fall on unseen digits and are dropped.
    pub fn step(&self, x: &Configuration) -> Result<Configuration> {
        self.check(x)?;
        let mut digits = x.symbols().to_vec();
        for (i, d) in digits.iter_mut().enumerate() {
            if (*d as usize) + 1 < self.size_at(i) {
                *d += 1;
                break;
            }
            *d = 0;
        }
        Configuration::new(x.alphabet(), Indexing::OneSided, digits)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rotation {
    alpha: f64,
    turns: u64,
}

impl Rotation {
    pub fn new(alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return invalid(format!("rotation angle {alpha} outside (0, 1)"));
        }
        Ok(Rotation {
            alpha,
            turns: crate::space::to_turns(alpha),
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn step(&self, x: CirclePoint) -> CirclePoint {
        x.rotate_turns(self.turns)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum System {
    Ca(CaRule),
    /// The one-sided left shift, stepped by dropping index 0.
    Shift(Alphabet),
    Odometer(Odometer),
    Rotation(Rotation),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Point {
    Symbolic(Configuration),
    Circle(CirclePoint),
}

impl System {
    pub fn name(&self) -> &'static str {
        match self {
            System::Ca(_) => "cellular automaton",
            System::Shift(_) => "shift",
            System::Odometer(_) => "odometer",
            System::Rotation(_) => "rotation",
        }
    }

    pub fn is_symbolic(&self) -> bool {
        !matches!(self, System::Rotation(_))
    }

    pub fn alphabet(&self) -> Option<Alphabet> {
        match self {
            System::Ca(r) => Some(r.alphabet),
            System::Shift(a) => Some(*a),
            System::Odometer(o) => Some(o.alphabet()),
            System::Rotation(_) => None,
        }
    }

    pub fn indexing(&self) -> Option<Indexing> {
        match self {
            System::Ca(r) => Some(r.indexing),
            System::Shift(_) | System::Odometer(_) => Some(Indexing::OneSided),
            System::Rotation(_) => None,
        }
    }

    /// Radius lost per step; also how far the dependence window grows.
    pub fn spread(&self) -> usize {
        match self {
            System::Ca(r) => r.radius,
            System::Shift(_) => 1,
            System::Odometer(_) | System::Rotation(_) => 0,
        }
    }

    /// Window `W_rho` that determines the resolution-`m` trace to horizon `t`.
    pub fn dependence_radius(&self, m: usize, horizon: usize) -> usize {
        m + self.spread() * horizon
    }

    /// Number of admissible symbols at index `i`.
    pub fn symbols_at(&self, i: i64) -> usize {
        match self {
            System::Odometer(o) => o.size_at(i.max(0) as usize),
            _ => self.alphabet().map_or(0, Alphabet::size),
        }
    }

    pub fn check_point(&self, x: &Configuration) -> Result<()> {
        match self {
            System::Odometer(o) => o.check(x),
            System::Rotation(_) => Err(Error::UnsupportedSystem("rotation")),
            _ => {
                if Some(x.alphabet()) != self.alphabet() || Some(x.indexing()) != self.indexing() {
                    Err(Error::IncompatibleConfigurations)
                } else {
                    Ok(())
                }
            }
        }
    }

    pub fn step_config(&self, x: &Configuration) -> Result<Configuration> {
        match self {
            System::Ca(r) => r.step(x),
            System::Shift(_) => {
                self.check_point(x)?;
                if x.radius() == 0 {
                    return Err(Error::InsufficientRadius {
                        needed: 1,
                        available: 0,
                    });
                }
                Configuration::new(x.alphabet(), Indexing::OneSided, x.symbols()[1..].to_vec())
            }
            System::Odometer(o) => o.step(x),
            System::Rotation(_) => Err(Error::UnsupportedSystem("rotation")),
        }
    }

    pub fn step(&self, x: &Point) -> Result<Point> {
        match (self, x) {
            (System::Rotation(r), Point::Circle(c)) => Ok(Point::Circle(r.step(*c))),
            (System::Rotation(_), Point::Symbolic(_)) | (_, Point::Circle(_)) => {
                Err(Error::UnsupportedSystem("mixing circle points and configurations"))
            }
            (_, Point::Symbolic(c)) => self.step_config(c).map(Point::Symbolic),
        }
    }

    /// `T^k x`.
    pub fn iterate(&self, x: &Configuration, k: usize) -> Result<Configuration> {
        let mut cur = x.clone();
        for _ in 0..k {
            cur = self.step_config(&cur)?;
        }
        Ok(cur)
    }

    /// `(T^i x)_{W_m}` for `0 <= i <= horizon`.
    pub fn column_trace(&self, x: &Configuration, m: usize, horizon: usize) -> Result<Vec<Word>> {
        if !self.is_symbolic() {
            return Err(Error::UnsupportedSystem("rotation"));
        }
        self.check_point(x)?;
        let rho = self.dependence_radius(m, horizon);
        if x.radius() < rho {
            return Err(Error::InsufficientRadius {
                needed: rho,
                available: x.radius(),
            });
        }
        let mut cur = x.truncate(rho)?;
        let mut trace = Vec::with_capacity(horizon + 1);
        trace.push(cur.restrict(m)?);
        for _ in 0..horizon {
            cur = self.step_config(&cur)?;
            trace.push(cur.restrict(m)?);
        }
        Ok(trace)
    }
}
