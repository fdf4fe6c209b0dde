//! Seeded synthetic datasets.

use clap::ValueEnum;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Bernoulli, Distribution, Normal, StandardNormal};
use serde::Serialize;

use crate::dataset::Dataset;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Generator {
    /// x ~ Uniform[0, 1)
    Uniform,
    /// x ~ N(0, 1)
    Gaussian,
    /// x, y independent Bernoulli(1/2)
    Bernoulli,
    /// x = 1 with probability 1/2, otherwise Uniform[0, 1)
    MixedAtom,
    /// x ~ N(0, 1), y = x + N(0, 0.01²), z ~ N(0, 1)
    Duplicated,
}

pub fn generate(generator: Generator, n: usize, seed: u64) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (names, columns): (Vec<&str>, Vec<Vec<f64>>) = match generator {
        Generator::Uniform => (vec!["x"], vec![(0..n).map(|_| rng.random::<f64>()).collect()]),
        Generator::Gaussian => (vec!["x"], vec![(0..n).map(|_| rng.sample(StandardNormal)).collect()]),
        Generator::Bernoulli => {
            let b = Bernoulli::new(0.5).expect("valid probability");
            let mut draw = || (0..n).map(|_| f64::from(u8::from(b.sample(&mut rng)))).collect::<Vec<_>>();
            let x = draw();
            let y = draw();
            (vec!["x", "y"], vec![x, y])
        }
        Generator::MixedAtom => {
            let x = (0..n).map(|_| if rng.random_bool(0.5) { 1.0 } else { rng.random::<f64>() }).collect();
            (vec!["x"], vec![x])
        }
        Generator::Duplicated => {
            let noise = Normal::new(0.0, 0.01).expect("valid deviation");
            let mut x = Vec::with_capacity(n);
            let mut y = Vec::with_capacity(n);
            let mut z = Vec::with_capacity(n);
            for _ in 0..n {
                let v: f64 = rng.sample(StandardNormal);
                x.push(v);
                y.push(v + noise.sample(&mut rng));
                z.push(rng.sample(StandardNormal));
            }
            (vec!["x", "y", "z"], vec![x, y, z])
        }
    };
    Dataset::new(names.into_iter().map(String::from).collect(), columns)
}
