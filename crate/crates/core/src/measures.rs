//! Borel probability measures on Cantor spaces with exact cylinder
//! probabilities, exact and conditional sampling, density ratios and
//! Vitali covers.

use nalgebra::{DMatrix, DVector};
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;

use crate::error::{invalid, Error, Result};
use crate::rng::SampleRng;
use crate::space::{Alphabet, Configuration, Cylinder, CylinderSet, Indexing};

const ROW_TOL: f64 = 1e-12;
const STATIONARY_TOL: f64 = 1e-10;
/// Products with more factors than this are accumulated in log space.
const LINEAR_FACTORS: usize = 64;

#[derive(Debug, Clone)]
pub struct BernoulliMeasure {
    weights: Vec<f64>,
    sampler: WeightedIndex<f64>,
}

impl BernoulliMeasure {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        Alphabet::new(weights.len())?;
        check_distribution(&weights, "bernoulli weights")?;
        let sampler = WeightedIndex::new(&weights).map_err(|e| Error::InvalidParameter(e.to_string()))?;
        Ok(BernoulliMeasure { weights, sampler })
    }

    pub fn uniform(size: usize) -> Result<Self> {
        Self::new(vec![1.0 / size as f64; size])
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }
}

/// A stationary Markov measure; the stationary vector anchors cylinders at
/// any position.
#[derive(Debug, Clone)]
pub struct MarkovMeasure {
    transition: Vec<Vec<f64>>,
    stationary: Vec<f64>,
    initial: WeightedIndex<f64>,
    forward: Vec<WeightedIndex<f64>>,
    backward: Vec<WeightedIndex<f64>>,
}

impl MarkovMeasure {
    /// The stationary vector is solved for when not supplied.
    pub fn new(transition: Vec<Vec<f64>>, stationary: Option<Vec<f64>>) -> Result<Self> {
        let k = transition.len();
        Alphabet::new(k)?;
        if transition.iter().any(|row| row.len() != k) {
            return invalid("transition matrix must be square");
        }
        for row in &transition {
            check_distribution(row, "transition row")?;
        }
        let stationary = match stationary {
            Some(pi) => {
                if pi.len() != k {
                    return invalid("stationary vector length differs from alphabet");
                }
                pi
            }
            None => solve_stationary(&transition)?,
        };
        if stationary.iter().any(|&p| p.is_nan() || p <= 0.0) {
            return invalid("stationary vector must be strictly positive");
        }
        if ((stationary.iter().sum::<f64>()) - 1.0).abs() > STATIONARY_TOL {
            return invalid("stationary vector must sum to 1");
        }
        for b in 0..k {
            let flow: f64 = (0..k).map(|a| stationary[a] * transition[a][b]).sum();
            if (flow - stationary[b]).abs() > STATIONARY_TOL {
                return invalid("stationary vector is not invariant under the transition matrix");
            }
        }
        let weighted = |w: &[f64]| WeightedIndex::new(w).map_err(|e| Error::InvalidParameter(e.to_string()));
        let initial = weighted(&stationary)?;
        let forward = transition.iter().map(|r| weighted(r)).collect::<Result<_>>()?;
        let backward = (0..k)
            .map(|a| {
                let row: Vec<f64> = (0..k)
                    .map(|b| stationary[b] * transition[b][a] / stationary[a])
                    .collect();
                weighted(&row)
            })
            .collect::<Result<_>>()?;
        Ok(MarkovMeasure {
            transition,
            stationary,
            initial,
            forward,
            backward,
        })
    }

    pub fn transition(&self) -> &[Vec<f64>] {
        &self.transition
    }

    pub fn stationary(&self) -> &[f64] {
        &self.stationary
    }

    /// Time-reversed chain `P~_{ab} = pi_b P_{ba} / pi_a`.
    pub fn reversed(&self, a: usize, b: usize) -> f64 {
        self.stationary[b] * self.transition[b][a] / self.stationary[a]
    }
}

fn solve_stationary(p: &[Vec<f64>]) -> Result<Vec<f64>> {
    let k = p.len();
    // rows of (P^T - I), last one replaced by the normalisation sum(pi) = 1
    let mut a = DMatrix::<f64>::from_fn(k, k, |i, j| p[j][i] - if i == j { 1.0 } else { 0.0 });
    for j in 0..k {
        a[(k - 1, j)] = 1.0;
    }
    let mut rhs = DVector::<f64>::zeros(k);
    rhs[k - 1] = 1.0;
    let pi = a
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::InvalidParameter("transition matrix is not irreducible".into()))?;
    Ok(pi.iter().copied().collect())
}

/// Product of uniform measures on `prod Z_{s_i}`; the Haar measure of the
/// odometer. The last listed size repeats forever.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProductMeasure {
    sizes: Vec<usize>,
}

impl ProductMeasure {
    pub fn new(sizes: Vec<usize>) -> Result<Self> {
        if sizes.is_empty() {
            return invalid("product measure needs at least one factor size");
        }
        if sizes.iter().any(|&s| !(2..=256).contains(&s)) {
            return invalid("factor sizes must lie in 2..=256");
        }
        Ok(ProductMeasure { sizes })
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn size_at(&self, i: usize) -> usize {
        self.sizes[i.min(self.sizes.len() - 1)]
    }
}

#[derive(Debug, Clone)]
pub enum Measure {
    Bernoulli(BernoulliMeasure),
    Markov(MarkovMeasure),
    Haar(ProductMeasure),
    /// Normalised arc length on the circle. Only the rotation analyses use
    /// it, analytically.
    Lebesgue,
}

impl Measure {
    pub fn alphabet(&self) -> Option<Alphabet> {
        match self {
            Measure::Bernoulli(b) => Alphabet::new(b.weights.len()).ok(),
            Measure::Markov(m) => Alphabet::new(m.transition.len()).ok(),
            Measure::Haar(h) => Alphabet::new(*h.sizes.iter().max().unwrap()).ok(),
            Measure::Lebesgue => None,
        }
    }

    fn check_space(&self, alphabet: Alphabet, indexing: Indexing) -> Result<()> {
        match self.alphabet() {
            None => Err(Error::InvalidParameter("lebesgue measure has no cylinders".into())),
            Some(own) if own != alphabet => Err(Error::AlphabetMismatch {
                expected: own.size(),
                found: alphabet.size(),
            }),
            Some(_) => {
                if matches!(self, Measure::Haar(_)) && indexing == Indexing::TwoSided {
                    invalid("haar measure lives on a one-sided product")
                } else {
                    Ok(())
                }
            }
        }
    }

    /// Probability of the block `word` placed at indices `start..`.
    fn block_probability(&self, start: i64, word: &[u8]) -> f64 {
        if word.is_empty() {
            return 1.0;
        }
        let mut acc = FactorProduct::default();
        match self {
            Measure::Bernoulli(b) => {
                for &s in word {
                    acc.push(b.weights[s as usize]);
                }
            }
            Measure::Markov(m) => {
                acc.push(m.stationary[word[0] as usize]);
                for w in word.windows(2) {
                    acc.push(m.transition[w[0] as usize][w[1] as usize]);
                }
            }
            Measure::Haar(h) => {
                for (i, &s) in word.iter().enumerate() {
                    let size = h.size_at((start + i as i64) as usize);
                    acc.push(if (s as usize) < size { 1.0 / size as f64 } else { 0.0 });
                }
            }
            Measure::Lebesgue => unreachable!("checked by callers"),
        }
        acc.value()
    }

    pub fn cylinder_probability(&self, c: &Cylinder) -> Result<f64> {
        self.check_space(c.alphabet(), c.indexing())?;
        Ok(self.block_probability(c.start(), c.word().symbols()))
    }

    pub fn set_probability(&self, set: &CylinderSet) -> Result<f64> {
        set.parts()
            .iter()
            .try_fold(0.0, |acc, c| Ok(acc + self.cylinder_probability(c)?))
    }

    /// A configuration on `W_radius` distributed as the restriction of the
    /// measure.
    pub fn sample_config(&self, indexing: Indexing, radius: usize, rng: &mut SampleRng) -> Result<Configuration> {
        let alphabet = self
            .alphabet()
            .ok_or(Error::UnsupportedSystem("lebesgue configurations"))?;
        self.conditional_sample(&Cylinder::whole(alphabet, indexing), radius, rng)
    }

    /// A sample conditioned on the cylinder `c`, known on `W_radius`.
    pub fn conditional_sample(&self, c: &Cylinder, radius: usize, rng: &mut SampleRng) -> Result<Configuration> {
        if self.cylinder_probability(c)? <= 0.0 {
            return Err(Error::NullCylinder);
        }
        let indexing = c.indexing();
        let n = c.radius();
        if n.is_some_and(|n| n > radius) {
            return Err(Error::InsufficientRadius {
                needed: n.unwrap(),
                available: radius,
            });
        }
        let len = indexing.window_len(radius);
        let start = indexing.window_start(radius);
        let mut symbols = vec![0u8; len];
        // positions [lo, hi) are fixed by the cylinder
        let (lo, hi) = match n {
            Some(n) => {
                let lo = (indexing.window_start(n) - start) as usize;
                symbols[lo..lo + c.word().len()].copy_from_slice(c.word().symbols());
                (lo, lo + c.word().len())
            }
            None => {
                let origin = (-start) as usize;
                symbols[origin] = self.draw_free(origin as i64 + start, rng);
                (origin, origin + 1)
            }
        };
        match self {
            Measure::Markov(m) => {
                for p in hi..len {
                    symbols[p] = m.forward[symbols[p - 1] as usize].sample(rng) as u8;
                }
                for p in (0..lo).rev() {
                    symbols[p] = m.backward[symbols[p + 1] as usize].sample(rng) as u8;
                }
            }
            _ => {
                for p in (hi..len).chain(0..lo) {
                    symbols[p] = self.draw_free(start + p as i64, rng);
                }
            }
        }
        Configuration::new(c.alphabet(), indexing, symbols)
    }

    // a symbol at index `i` with no neighbours fixed
    fn draw_free(&self, i: i64, rng: &mut SampleRng) -> u8 {
        match self {
            Measure::Bernoulli(b) => b.sampler.sample(rng) as u8,
            Measure::Markov(m) => m.initial.sample(rng) as u8,
            Measure::Haar(h) => rng.random_range(0..h.size_at(i as usize)) as u8,
            Measure::Lebesgue => unreachable!("checked by callers"),
        }
    }
}

#[derive(Default)]
struct FactorProduct {
    linear: f64,
    log: f64,
    count: usize,
    zero: bool,
}

impl FactorProduct {
    fn push(&mut self, f: f64) {
        if self.count == 0 {
            self.linear = 1.0;
        }
        self.count += 1;
        if f <= 0.0 {
            self.zero = true;
            return;
        }
        self.linear *= f;
        self.log += f.ln();
    }

    fn value(&self) -> f64 {
        if self.zero {
            0.0
        } else if self.count <= LINEAR_FACTORS {
            self.linear
        } else {
            self.log.exp()
        }
    }
}

fn check_distribution(w: &[f64], what: &str) -> Result<()> {
    if w.iter().any(|&p| !p.is_finite() || p < 0.0) {
        return invalid(format!("{what} must be non-negative"));
    }
    if (w.iter().sum::<f64>() - 1.0).abs() > ROW_TOL {
        return invalid(format!("{what} must sum to 1"));
    }
    Ok(())
}

/// `mu(A ∩ B_n(x)) / mu(B_n(x))`, computed on the disjoint parts of `A`.
pub fn lebesgue_density_ratio(mu: &Measure, set: &CylinderSet, x: &Configuration, n: usize) -> Result<f64> {
    let ball = x.ball_cylinder(n)?;
    let denom = mu.cylinder_probability(&ball)?;
    if denom <= 0.0 {
        return Err(Error::NullBall);
    }
    let mut num = 0.0;
    for part in set.parts() {
        if part.includes(&ball) {
            num += denom;
        } else if ball.includes(part) {
            num += mu.cylinder_probability(part)?;
        }
    }
    Ok((num / denom).min(1.0))
}

/// A closed ball `B_radius(center)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ball {
    pub center: Configuration,
    pub radius: usize,
}

impl Ball {
    pub fn cylinder(&self) -> Result<Cylinder> {
        self.center.ball_cylinder(self.radius)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BallFamily {
    pub balls: Vec<Ball>,
}

impl BallFamily {
    /// Compares each pair of centers on the smaller of their two radii.
    pub fn is_pairwise_disjoint(&self) -> Result<bool> {
        for (i, a) in self.balls.iter().enumerate() {
            for b in &self.balls[i + 1..] {
                if a.center.agrees_on(&b.center, a.radius.min(b.radius))? {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    pub fn as_set(&self, alphabet: Alphabet, indexing: Indexing) -> Result<CylinderSet> {
        let cyls = self.balls.iter().map(Ball::cylinder).collect::<Result<Vec<_>>>()?;
        CylinderSet::new(alphabet, indexing, cyls)
    }

    pub fn mass(&self, mu: &Measure) -> Result<f64> {
        self.balls
            .iter()
            .try_fold(0.0, |acc, b| Ok(acc + mu.cylinder_probability(&b.cylinder()?)?))
    }
}

/// Disjoint balls of radius at least `min_radius`, centred in `set`, that
/// cover `set` up to a null set.
///
/// Every part of `set` coarser than `min_radius` is split into its
/// sub-cylinders of that radius; finer parts are kept. Null balls are
/// dropped. The uncovered mass is therefore zero, below any `eps`.
pub fn vitali_cover(mu: &Measure, set: &CylinderSet, min_radius: usize, eps: f64) -> Result<BallFamily> {
    if min_radius == 0 {
        return invalid("minimum ball radius must be at least 1");
    }
    if eps.is_nan() || eps < 0.0 {
        return invalid("vitali tolerance must be non-negative");
    }
    mu.check_space(set.alphabet(), set.indexing())?;
    let mut balls = Vec::new();
    for part in set.parts() {
        for c in part.refine_to(min_radius) {
            if mu.cylinder_probability(&c)? > 0.0 {
                let radius = c.radius().expect("refined cylinders have a window");
                balls.push(Ball {
                    center: c.center().expect("refined cylinders have a window"),
                    radius,
                });
            }
        }
    }
    Ok(BallFamily { balls })
}

/// `mu(A \ ∪ balls)`, by exact cylinder difference.
pub fn uncovered_mass(mu: &Measure, set: &CylinderSet, family: &BallFamily) -> Result<f64> {
    let covered = family.as_set(set.alphabet(), set.indexing())?;
    mu.set_probability(&set.difference(&covered))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SeedStream;
    use crate::space::Word;

    fn cyl(indexing: Indexing, w: &str) -> Cylinder {
        Cylinder::new(Alphabet::BINARY, indexing, Word::parse(w, Alphabet::BINARY).unwrap()).unwrap()
    }

    fn markov() -> Measure {
        Measure::Markov(MarkovMeasure::new(vec![vec![0.9, 0.1], vec![0.2, 0.8]], None).unwrap())
    }

    #[test]
    fn bernoulli_cylinder() {
        let mu = Measure::Bernoulli(BernoulliMeasure::uniform(2).unwrap());
        assert_eq!(mu.cylinder_probability(&cyl(Indexing::TwoSided, "010")).unwrap(), 0.125);
        assert_eq!(
            mu.cylinder_probability(&Cylinder::whole(Alphabet::BINARY, Indexing::OneSided))
                .unwrap(),
            1.0
        );
    }

    #[test]
    fn markov_stationary_and_cylinder() {
        // pi solves 0.1 pi_0 = 0.2 pi_1 by hand: (2/3, 1/3)
        let mu = markov();
        let Measure::Markov(m) = &mu else { unreachable!() };
        assert!((m.stationary()[0] - 2.0 / 3.0).abs() < 1e-12);
        assert!((m.stationary()[1] - 1.0 / 3.0).abs() < 1e-12);
        let p = mu.cylinder_probability(&cyl(Indexing::OneSided, "00")).unwrap();
        assert!((p - 0.6).abs() < 1e-12);
        // reversed chain of a two-state chain is itself
        assert!((m.reversed(0, 1) - 0.1).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_measures() {
        assert!(BernoulliMeasure::new(vec![0.5, 0.6]).is_err());
        assert!(BernoulliMeasure::new(vec![1.0]).is_err());
        assert!(MarkovMeasure::new(vec![vec![0.9, 0.1], vec![0.2, 0.8]], Some(vec![0.5, 0.5])).is_err());
        assert!(MarkovMeasure::new(vec![vec![1.0, 0.0], vec![0.0, 1.0]], None).is_err());
        assert!(ProductMeasure::new(vec![1]).is_err());
    }

    #[test]
    fn alphabet_mismatch() {
        let mu = Measure::Bernoulli(BernoulliMeasure::uniform(3).unwrap());
        assert_eq!(
            mu.cylinder_probability(&cyl(Indexing::OneSided, "0")),
            Err(Error::AlphabetMismatch { expected: 3, found: 2 })
        );
    }

    #[test]
    fn degenerate_bernoulli_samples_zeros() {
        let mu = Measure::Bernoulli(BernoulliMeasure::new(vec![1.0, 0.0]).unwrap());
        let x = mu
            .sample_config(Indexing::TwoSided, 5, &mut SeedStream::new(1).rng(0))
            .unwrap();
        assert!(x.symbols().iter().all(|&s| s == 0));
        assert_eq!(x.radius(), 5);
    }

    #[test]
    fn haar_respects_factor_sizes() {
        let mu = Measure::Haar(ProductMeasure::new(vec![2, 3]).unwrap());
        let s = SeedStream::new(2);
        for i in 0..200 {
            let x = mu.sample_config(Indexing::OneSided, 3, &mut s.rng(i)).unwrap();
            assert!(x.symbols()[0] < 2);
            assert!(x.symbols()[1..].iter().all(|&d| d < 3));
        }
        let alpha = Alphabet::new(3).unwrap();
        let bad = Cylinder::new(alpha, Indexing::OneSided, Word(vec![2])).unwrap();
        assert_eq!(mu.cylinder_probability(&bad).unwrap(), 0.0);
        assert_eq!(mu.conditional_sample(&bad, 2, &mut s.rng(0)), Err(Error::NullCylinder));
    }

    #[test]
    fn conditional_sample_keeps_word() {
        let mu = markov();
        let c = cyl(Indexing::TwoSided, "101");
        let s = SeedStream::new(3);
        for i in 0..100 {
            let x = mu.conditional_sample(&c, 4, &mut s.rng(i)).unwrap();
            assert_eq!(x.restrict(1).unwrap(), *c.word());
        }
    }

    #[test]
    fn density_ratio_examples() {
        let mu = Measure::Bernoulli(BernoulliMeasure::uniform(2).unwrap());
        let a = CylinderSet::new(
            Alphabet::BINARY,
            Indexing::OneSided,
            vec![cyl(Indexing::OneSided, "010")],
        )
        .unwrap();
        let inside = Configuration::parse("0101", Alphabet::BINARY, Indexing::OneSided).unwrap();
        let outside = Configuration::parse("0111", Alphabet::BINARY, Indexing::OneSided).unwrap();
        assert_eq!(lebesgue_density_ratio(&mu, &a, &inside, 3).unwrap(), 1.0);
        assert_eq!(lebesgue_density_ratio(&mu, &a, &outside, 2).unwrap(), 0.0);
        // two radius-2 cylinders inside B_1(x): each carries 1/2 of the ball
        let two = CylinderSet::new(
            Alphabet::BINARY,
            Indexing::OneSided,
            vec![cyl(Indexing::OneSided, "010"), cyl(Indexing::OneSided, "011")],
        )
        .unwrap();
        assert_eq!(lebesgue_density_ratio(&mu, &two, &inside, 1).unwrap(), 1.0);
        let one_only = CylinderSet::new(
            Alphabet::BINARY,
            Indexing::OneSided,
            vec![cyl(Indexing::OneSided, "011")],
        )
        .unwrap();
        assert_eq!(lebesgue_density_ratio(&mu, &one_only, &inside, 1).unwrap(), 0.5);
        let null = Measure::Bernoulli(BernoulliMeasure::new(vec![0.0, 1.0]).unwrap());
        assert_eq!(lebesgue_density_ratio(&null, &a, &inside, 1), Err(Error::NullBall));
    }

    #[test]
    fn vitali_examples() {
        let mu = Measure::Bernoulli(BernoulliMeasure::uniform(2).unwrap());
        let a = CylinderSet::new(
            Alphabet::BINARY,
            Indexing::OneSided,
            vec![cyl(Indexing::OneSided, "01")],
        )
        .unwrap();
        let fam = vitali_cover(&mu, &a, 2, 0.0).unwrap();
        assert_eq!(fam.balls.len(), 2);
        assert!(fam.is_pairwise_disjoint().unwrap());
        assert_eq!(uncovered_mass(&mu, &a, &fam).unwrap(), 0.0);

        let whole = CylinderSet::new(
            Alphabet::BINARY,
            Indexing::TwoSided,
            vec![Cylinder::whole(Alphabet::BINARY, Indexing::TwoSided)],
        )
        .unwrap();
        let fam = vitali_cover(&mu, &whole, 1, 0.0).unwrap();
        assert_eq!(fam.balls.len(), 8);
        assert_eq!(fam.mass(&mu).unwrap(), 1.0);
        assert_eq!(uncovered_mass(&mu, &whole, &fam).unwrap(), 0.0);
    }
}
