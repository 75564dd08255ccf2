//! Deterministic low-discrepancy points in a ball.

use rand::Rng;

use crate::sampling::rng_for;

fn primes(count: usize) -> Vec<u64> {
    let mut out = Vec::with_capacity(count);
    let mut n = 2u64;
    while out.len() < count {
        if out.iter().take_while(|&&p| p * p <= n).all(|&p| !n.is_multiple_of(p)) {
            out.push(n);
        }
        n += 1;
    }
    out
}

fn radical_inverse(mut i: u64, base: u64) -> f64 {
    let inv = 1.0 / base as f64;
    let mut f = inv;
    let mut x = 0.0;
    while i > 0 {
        x += (i % base) as f64 * f;
        i /= base;
        f *= inv;
    }
    x
}

/// Halton sequence with a Cranley-Patterson rotation drawn from the seed.
#[derive(Clone, Debug)]
pub struct Halton {
    bases: Vec<u64>,
    shift: Vec<f64>,
    index: u64,
}

impl Halton {
    pub fn new(dim: usize, seed: u64) -> Self {
        let mut rng = rng_for(seed, &[dim as u64]);
        Self { bases: primes(dim), shift: (0..dim).map(|_| rng.random::<f64>()).collect(), index: 1 }
    }

    pub fn dim(&self) -> usize {
        self.bases.len()
    }

    /// Next point of `[0, 1)^dim`.
    pub fn next_unit(&mut self) -> Vec<f64> {
        let i = self.index;
        self.index += 1;
        self.bases
            .iter()
            .zip(&self.shift)
            .map(|(&b, &s)| (radical_inverse(i, b) + s).fract())
            .collect()
    }

    /// Next point of the ball of radius `radius`, by stretching the cube
    /// `[-1, 1]^dim` radially onto the unit ball.
    pub fn next_in_ball(&mut self, radius: f64) -> Vec<f64> {
        let c: Vec<f64> = self.next_unit().iter().map(|x| 2.0 * x - 1.0).collect();
        let two = c.iter().map(|x| x * x).sum::<f64>().sqrt();
        if two == 0.0 {
            return c;
        }
        let inf = c.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        c.iter().map(|x| radius * x * inf / two).collect()
    }
}
