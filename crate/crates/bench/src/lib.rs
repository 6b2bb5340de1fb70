//! Fixtures shared by the benchmarks under `benches/`.

use equidyn_core::measures::BernoulliMeasure;
use equidyn_core::{Alphabet, Configuration, Indexing, Measure, Point, SeedStream, System};

pub fn fair_coin() -> Measure {
    Measure::Bernoulli(BernoulliMeasure::uniform(2).expect("two symbols"))
}

/// A configuration of radius `radius` drawn from the fair coin.
pub fn random_config(indexing: Indexing, radius: usize, seed: u64) -> Configuration {
    let mut rng = SeedStream::new(seed).rng(0);
    fair_coin()
        .sample_config(indexing, radius, &mut rng)
        .expect("binary sample")
}

pub fn random_point(sys: &System, radius: usize, seed: u64) -> Point {
    Point::Symbolic(random_config(sys.indexing().expect("symbolic system"), radius, seed))
}

pub fn binary() -> Alphabet {
    Alphabet::new(2).expect("two symbols")
}
