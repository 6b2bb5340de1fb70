//! Configurations over finite alphabets, windows, the Cantor metric and
//! cylinder sets, plus the circle carrier used by rotations.
//!
//! A configuration is always a finite truncation: it knows the symbols on
//! its window `W_R` and nothing else. Operations that would need a symbol
//! outside that window return [`Error::InsufficientRadius`] instead of
//! guessing.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Symbols are `0..size`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Alphabet(u16);

impl Alphabet {
    pub const BINARY: Alphabet = Alphabet(2);

    pub fn new(size: usize) -> Result<Self> {
        if !(2..=256).contains(&size) {
            return invalid(format!("alphabet size {size} outside 2..=256"));
        }
        Ok(Alphabet(size as u16))
    }

    pub fn size(self) -> usize {
        self.0 as usize
    }

    fn check(self, word: &[u8]) -> Result<()> {
        match word.iter().find(|&&s| s as usize >= self.size()) {
            Some(&s) => invalid(format!("symbol {s} outside alphabet of size {}", self.size())),
            None => Ok(()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Indexing {
    /// `Z_+`, windows `{0..n}`.
    OneSided,
    /// `Z`, windows `{-n..n}`.
    TwoSided,
}

impl Indexing {
    /// Number of cells in `W_n`.
    pub fn window_len(self, n: usize) -> usize {
        match self {
            Indexing::OneSided => n + 1,
            Indexing::TwoSided => 2 * n + 1,
        }
    }

    /// Lowest index of `W_n`.
    pub fn window_start(self, n: usize) -> i64 {
        match self {
            Indexing::OneSided => 0,
            Indexing::TwoSided => -(n as i64),
        }
    }

    /// Inverse of [`Indexing::window_len`].
    pub fn radius_for_len(self, len: usize) -> Option<usize> {
        match self {
            Indexing::OneSided if len >= 1 => Some(len - 1),
            Indexing::TwoSided if len % 2 == 1 => Some(len / 2),
            _ => None,
        }
    }
}

/// A finite word, listed in ascending index order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Word(pub Vec<u8>);

impl Word {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn symbols(&self) -> &[u8] {
        &self.0
    }

    /// Digit string for alphabets of at most ten symbols, comma-separated
    /// integers otherwise.
    pub fn render(&self, alphabet: Alphabet) -> String {
        if alphabet.size() <= 10 {
            self.0.iter().map(|&s| char::from(b'0' + s)).collect()
        } else {
            self.0.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(",")
        }
    }

    pub fn parse(text: &str, alphabet: Alphabet) -> Result<Word> {
        let text = text.trim();
        let symbols: Vec<u8> = if alphabet.size() <= 10 {
            text.chars()
                .map(|c| match c.to_digit(10) {
                    Some(d) => Ok(d as u8),
                    None => invalid(format!("'{c}' is not a symbol digit")),
                })
                .collect::<Result<_>>()?
        } else if text.is_empty() {
            Vec::new()
        } else {
            text.split(',')
                .map(|t| {
                    t.trim()
                        .parse::<u8>()
                        .or_else(|_| invalid(format!("'{t}' is not a symbol")))
                })
                .collect::<Result<_>>()?
        };
        alphabet.check(&symbols)?;
        Ok(Word(symbols))
    }
}

impl From<Vec<u8>> for Word {
    fn from(v: Vec<u8>) -> Self {
        Word(v)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sep = self.0.iter().any(|&s| s > 9);
        for (i, s) in self.0.iter().enumerate() {
            if sep && i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{s}")?;
        }
        Ok(())
    }
}

/// A point of `A^{Z_+}` or `A^Z` known on the window `W_R`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Configuration {
    alphabet: Alphabet,
    indexing: Indexing,
    radius: usize,
    symbols: Vec<u8>,
}

impl Configuration {
    /// The valid radius is inferred from the word length.
    pub fn new(alphabet: Alphabet, indexing: Indexing, symbols: Vec<u8>) -> Result<Self> {
        let radius = indexing.radius_for_len(symbols.len()).ok_or_else(|| {
            Error::InvalidParameter(format!("{} symbols do not fill a {indexing:?} window", symbols.len()))
        })?;
        alphabet.check(&symbols)?;
        Ok(Configuration {
            alphabet,
            indexing,
            radius,
            symbols,
        })
    }

    pub fn from_fn(
        alphabet: Alphabet,
        indexing: Indexing,
        radius: usize,
        mut f: impl FnMut(i64) -> u8,
    ) -> Result<Self> {
        let start = indexing.window_start(radius);
        let symbols = (0..indexing.window_len(radius)).map(|p| f(start + p as i64)).collect();
        Self::new(alphabet, indexing, symbols)
    }

    pub fn parse(text: &str, alphabet: Alphabet, indexing: Indexing) -> Result<Self> {
        Self::new(alphabet, indexing, Word::parse(text, alphabet)?.0)
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

    /// The whole known word on `W_R`.
    pub fn symbols(&self) -> &[u8] {
        &self.symbols
    }

    /// Symbol at index `i`, if `i` lies in the valid window.
    pub fn get(&self, i: i64) -> Option<u8> {
        let pos = i - self.indexing.window_start(self.radius);
        if pos < 0 {
            return None;
        }
        self.symbols.get(pos as usize).copied()
    }

    fn require(&self, n: usize) -> Result<()> {
        if n > self.radius {
            Err(Error::InsufficientRadius {
                needed: n,
                available: self.radius,
            })
        } else {
            Ok(())
        }
    }

    fn window_slice(&self, n: usize) -> &[u8] {
        let from = (self.indexing.window_start(n) - self.indexing.window_start(self.radius)) as usize;
        &self.symbols[from..from + self.indexing.window_len(n)]
    }

    /// `x_{W_n}`.
    pub fn restrict(&self, n: usize) -> Result<Word> {
        self.require(n)?;
        Ok(Word(self.window_slice(n).to_vec()))
    }

    /// The same point forgetting everything outside `W_n`.
    pub fn truncate(&self, n: usize) -> Result<Configuration> {
        self.require(n)?;
        Ok(Configuration {
            alphabet: self.alphabet,
            indexing: self.indexing,
            radius: n,
            symbols: self.window_slice(n).to_vec(),
        })
    }

    /// `B_n(x)`, which on a Cantor space is the cylinder of `x_{W_n}`.
    pub fn ball_cylinder(&self, n: usize) -> Result<Cylinder> {
        if n == 0 {
            return invalid("ball radius must be at least 1");
        }
        Ok(Cylinder {
            alphabet: self.alphabet,
            indexing: self.indexing,
            word: self.restrict(n)?,
        })
    }

    /// The cylinder of `x_{W_n}`, for any `n` including 0.
    pub fn window_cylinder(&self, n: usize) -> Result<Cylinder> {
        Ok(Cylinder {
            alphabet: self.alphabet,
            indexing: self.indexing,
            word: self.restrict(n)?,
        })
    }

    /// Whether `x_{W_n} = y_{W_n}`.
    pub fn agrees_on(&self, other: &Configuration, n: usize) -> Result<bool> {
        self.compatible(other)?;
        self.require(n)?;
        other.require(n)?;
        Ok(self.window_slice(n) == other.window_slice(n))
    }

    fn compatible(&self, other: &Configuration) -> Result<()> {
        if self.alphabet != other.alphabet || self.indexing != other.indexing {
            Err(Error::IncompatibleConfigurations)
        } else {
            Ok(())
        }
    }

    pub fn render(&self) -> String {
        Word(self.symbols.clone()).render(self.alphabet)
    }
}

/// How far two configurations agree around the origin.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Agreement {
    DiffersAtOrigin,
    /// Agree on `W_m`, differ on `W_{m+1}`.
    Upto(usize),
    /// Agree on every cell both of them know, up to `W_R`.
    Through(usize),
}

pub fn agreement(x: &Configuration, y: &Configuration) -> Result<Agreement> {
    x.compatible(y)?;
    let common = x.radius.min(y.radius);
    for n in 0..=common {
        let (a, b) = match x.indexing {
            Indexing::OneSided => ((x.get(n as i64), None), (y.get(n as i64), None)),
            Indexing::TwoSided => (
                (x.get(n as i64), x.get(-(n as i64))),
                (y.get(n as i64), y.get(-(n as i64))),
            ),
        };
        if a != b {
            return Ok(if n == 0 {
                Agreement::DiffersAtOrigin
            } else {
                Agreement::Upto(n - 1)
            });
        }
    }
    Ok(Agreement::Through(common))
}

/// Values of the Cantor metric.
///
/// Agreement on `W_m` for the largest `m >= 1` gives `1/m`. Points that
/// disagree at the origin are at distance 2, and points that agree on `W_0`
/// only are at distance 3/2, so that `d <= 1/n` iff `x_{W_n} = y_{W_n}`
/// holds for every `n >= 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CantorDistance {
    Zero,
    Reciprocal(usize),
    OriginOnly,
    DiffersAtOrigin,
}

impl CantorDistance {
    pub fn value(self) -> f64 {
        match self {
            CantorDistance::Zero => 0.0,
            CantorDistance::Reciprocal(m) => 1.0 / m as f64,
            CantorDistance::OriginOnly => 1.5,
            CantorDistance::DiffersAtOrigin => 2.0,
        }
    }

    // larger agreement level means smaller distance
    fn level(self) -> u64 {
        match self {
            CantorDistance::Zero => u64::MAX,
            CantorDistance::Reciprocal(m) => m as u64 + 1,
            CantorDistance::OriginOnly => 1,
            CantorDistance::DiffersAtOrigin => 0,
        }
    }

    /// `d >= eps`.
    pub fn at_least(self, eps: f64) -> bool {
        self.value() >= eps
    }
}

impl PartialOrd for CantorDistance {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for CantorDistance {
    fn cmp(&self, other: &Self) -> Ordering {
        other.level().cmp(&self.level())
    }
}

/// Cantor distance of two configurations.
///
/// Configurations of equal valid radius that agree everywhere are treated
/// as identical. If the radii differ and the shorter window shows no
/// disagreement, the distance cannot be decided.
pub fn cantor_distance(x: &Configuration, y: &Configuration) -> Result<CantorDistance> {
    Ok(match agreement(x, y)? {
        Agreement::DiffersAtOrigin => CantorDistance::DiffersAtOrigin,
        Agreement::Upto(0) => CantorDistance::OriginOnly,
        Agreement::Upto(m) => CantorDistance::Reciprocal(m),
        Agreement::Through(_) if x.radius == y.radius => CantorDistance::Zero,
        Agreement::Through(r) => {
            return Err(Error::InsufficientRadius {
                needed: r + 1,
                available: r,
            })
        }
    })
}

/// Smallest `n` such that `d(x, y) >= eps` iff `x_{W_n} != y_{W_n}`.
///
/// `None` when no pair of points is `eps` apart (`eps > 2`).
pub fn separation_radius(eps: f64) -> Result<Option<usize>> {
    if !eps.is_finite() || eps <= 0.0 {
        return invalid(format!("separation threshold {eps} must be positive"));
    }
    Ok(if eps > 2.0 {
        None
    } else if eps > 1.5 {
        Some(0)
    } else if eps > 1.0 {
        Some(1)
    } else {
        // d >= eps fails first at 1/n < eps
        let mut n = (1.0 / eps).floor() as usize;
        while 1.0 / (n as f64) >= eps {
            n += 1;
        }
        Some(n)
    })
}

/// `{x : x_{W_n} = w}`; the empty word denotes the whole space.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Cylinder {
    alphabet: Alphabet,
    indexing: Indexing,
    word: Word,
}

impl Cylinder {
    pub fn new(alphabet: Alphabet, indexing: Indexing, word: Word) -> Result<Self> {
        if !word.is_empty() && indexing.radius_for_len(word.len()).is_none() {
            return invalid(format!("{} symbols do not fill a {indexing:?} window", word.len()));
        }
        alphabet.check(&word.0)?;
        Ok(Cylinder {
            alphabet,
            indexing,
            word,
        })
    }

    pub fn whole(alphabet: Alphabet, indexing: Indexing) -> Self {
        Cylinder {
            alphabet,
            indexing,
            word: Word::default(),
        }
    }

    pub fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    pub fn indexing(&self) -> Indexing {
        self.indexing
    }

    pub fn word(&self) -> &Word {
        &self.word
    }

    /// Window radius, `None` for the whole space.
    pub fn radius(&self) -> Option<usize> {
        if self.word.is_empty() {
            None
        } else {
            self.indexing.radius_for_len(self.word.len())
        }
    }

    /// Lowest index covered by the word.
    pub fn start(&self) -> i64 {
        self.radius().map_or(0, |n| self.indexing.window_start(n))
    }

    pub fn contains(&self, x: &Configuration) -> Result<bool> {
        if x.alphabet != self.alphabet || x.indexing != self.indexing {
            return Err(Error::IncompatibleConfigurations);
        }
        match self.radius() {
            None => Ok(true),
            Some(n) => Ok(x.restrict(n)?.0 == self.word.0),
        }
    }

    /// `other ⊆ self`.
    pub fn includes(&self, other: &Cylinder) -> bool {
        match (self.radius(), other.radius()) {
            (None, _) => true,
            (Some(_), None) => false,
            (Some(a), Some(b)) => {
                if b < a {
                    return false;
                }
                let off = (self.indexing.window_start(a) - self.indexing.window_start(b)) as usize;
                other.word.0[off..off + self.word.len()] == self.word.0[..]
            }
        }
    }

    pub fn is_disjoint(&self, other: &Cylinder) -> bool {
        !self.includes(other) && !other.includes(self)
    }

    /// The cylinders one radius finer that partition this one.
    pub fn children(&self) -> Vec<Cylinder> {
        let a = self.alphabet.size();
        let make = |word: Vec<u8>| Cylinder {
            alphabet: self.alphabet,
            indexing: self.indexing,
            word: Word(word),
        };
        match (self.radius(), self.indexing) {
            (None, _) => (0..a).map(|s| make(vec![s as u8])).collect(),
            (Some(_), Indexing::OneSided) => (0..a)
                .map(|s| {
                    let mut w = self.word.0.clone();
                    w.push(s as u8);
                    make(w)
                })
                .collect(),
            (Some(_), Indexing::TwoSided) => {
                let mut out = Vec::with_capacity(a * a);
                for l in 0..a {
                    for r in 0..a {
                        let mut w = Vec::with_capacity(self.word.len() + 2);
                        w.push(l as u8);
                        w.extend_from_slice(&self.word.0);
                        w.push(r as u8);
                        out.push(make(w));
                    }
                }
                out
            }
        }
    }

    /// Partition into cylinders of radius `max(n, radius)`.
    pub fn refine_to(&self, n: usize) -> Vec<Cylinder> {
        let mut level = vec![self.clone()];
        while level[0].radius().is_none_or(|r| r < n) {
            level = level.iter().flat_map(Cylinder::children).collect();
        }
        level
    }

    /// The word viewed as a configuration; `None` for the whole space.
    pub fn center(&self) -> Option<Configuration> {
        self.radius().map(|radius| Configuration {
            alphabet: self.alphabet,
            indexing: self.indexing,
            radius,
            symbols: self.word.0.clone(),
        })
    }
}

/// A finite union of cylinders.
///
/// Two cylinders are either nested or disjoint, so dropping every cylinder
/// contained in another leaves a disjoint family with the same union.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CylinderSet {
    alphabet: Alphabet,
    indexing: Indexing,
    parts: Vec<Cylinder>,
}

impl CylinderSet {
    pub fn new(alphabet: Alphabet, indexing: Indexing, cylinders: Vec<Cylinder>) -> Result<Self> {
        if cylinders
            .iter()
            .any(|c| c.alphabet != alphabet || c.indexing != indexing)
        {
            return Err(Error::IncompatibleConfigurations);
        }
        let mut parts: Vec<Cylinder> = Vec::with_capacity(cylinders.len());
        let mut sorted = cylinders;
        // coarse first, so nested cylinders meet their cover before themselves
        sorted.sort_by_key(|c| c.radius().map_or(0, |r| r + 1));
        for c in sorted {
            if !parts.iter().any(|p| p.includes(&c)) {
                parts.push(c);
            }
        }
        Ok(CylinderSet {
            alphabet,
            indexing,
            parts,
        })
    }

    pub fn empty(alphabet: Alphabet, indexing: Indexing) -> Self {
        CylinderSet {
            alphabet,
            indexing,
            parts: Vec::new(),
        }
    }

    pub fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    pub fn indexing(&self) -> Indexing {
        self.indexing
    }

    /// Pairwise disjoint cylinders whose union is the set.
    pub fn parts(&self) -> &[Cylinder] {
        &self.parts
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn contains(&self, x: &Configuration) -> Result<bool> {
        for c in &self.parts {
            if c.contains(x)? {
                return Ok(true);
            }
        }
        Ok(false)
    }

    /// Exact set difference, as another disjoint family.
    pub fn difference(&self, other: &CylinderSet) -> CylinderSet {
        let mut pending = self.parts.clone();
        let mut out = Vec::new();
        while let Some(c) = pending.pop() {
            if other.parts.iter().any(|b| b.includes(&c)) {
                continue;
            }
            if other.parts.iter().any(|b| c.includes(b)) {
                pending.extend(c.children());
            } else {
                out.push(c);
            }
        }
        CylinderSet {
            alphabet: self.alphabet,
            indexing: self.indexing,
            parts: out,
        }
    }
}

/// A point of the unit circle `R/Z`, stored as a 64-bit fixed-point
/// fraction of a turn so that rotations are exact isometries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CirclePoint(u64);

const TURN: f64 = 18_446_744_073_709_551_616.0; // 2^64

impl CirclePoint {
    /// Reduces the angle into `[0, 1)`.
    pub fn new(angle: f64) -> Result<Self> {
        if !angle.is_finite() {
            return invalid("circle angle must be finite");
        }
        Ok(CirclePoint(to_turns(angle)))
    }

    pub fn from_turns(turns: u64) -> Self {
        CirclePoint(turns)
    }

    pub fn turns(self) -> u64 {
        self.0
    }

    pub fn angle(self) -> f64 {
        self.0 as f64 / TURN
    }

    pub fn distance(self, other: CirclePoint) -> f64 {
        let d = self.0.wrapping_sub(other.0);
        d.min(d.wrapping_neg()) as f64 / TURN
    }

    pub fn rotate(self, alpha: f64) -> CirclePoint {
        self.rotate_turns(to_turns(alpha))
    }

    pub fn rotate_turns(self, turns: u64) -> CirclePoint {
        CirclePoint(self.0.wrapping_add(turns))
    }
}

/// Fixed-point fraction of a turn, reduced mod 1.
pub(crate) fn to_turns(angle: f64) -> u64 {
    let frac = angle.rem_euclid(1.0);
    // frac * 2^64 saturates at u64::MAX only when frac rounds to 1
    let t = frac * TURN;
    if t >= TURN {
        0
    } else {
        t as u64
    }
}
