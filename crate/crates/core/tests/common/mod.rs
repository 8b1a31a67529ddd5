//! Shared test support: a deterministic RNG and samplers for the built-in
//! spaces. Each test binary uses its own subset.
#![allow(dead_code)]

use pdiag::{Diagram, Point, Space};

/// SplitMix64; deterministic and seedable, good enough for test sweeps.
pub struct Rng(u64);

impl Rng {
    pub fn new(seed: u64) -> Rng {
        Rng(seed)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    }

    /// Uniform in [0, 1).
    pub fn unit(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }

    pub fn range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.unit()
    }

    pub fn int(&mut self, n: u64) -> u64 {
        self.next_u64() % n
    }
}

/// A random point of the given built-in space, off the subset.
pub fn sample_point(space: &Space, rng: &mut Rng) -> Point {
    let id = space.id();
    let pt = if id.starts_with("halfplane") {
        let b = rng.range(-5.0, 5.0);
        let gap = rng.range(0.05, 6.0);
        Point::coords([b, b + gap])
    } else if id.starts_with("pointed_euclidean") {
        let dim: usize = id.split(':').nth(1).unwrap().parse().unwrap();
        Point::coords((0..dim).map(|_| rng.range(-5.0, 5.0)).collect::<Vec<_>>())
    } else if id == "ray" {
        Point::coords([rng.range(0.05, 8.0)])
    } else if id == "wedge_circles" {
        Point::arc(1 + rng.int(4), rng.range(0.05, 6.2))
    } else if id == "wedge_intervals" {
        let arc = 1 + rng.int(4);
        Point::arc(arc, rng.range(0.05, 1.0 + 1.0 / arc as f64 - 0.05))
    } else {
        panic!("no sampler for {id}");
    };
    assert!(!space.in_subset(&pt).unwrap());
    pt
}

/// A random diagram with at most `max_points` dots (with multiplicity).
pub fn sample_diagram(space: &Space, rng: &mut Rng, max_points: u64) -> Diagram {
    let n = rng.int(max_points + 1);
    let mut points = Vec::new();
    let mut used = 0;
    while used < n {
        let mult = 1 + rng.int(2).min(n - used - 1);
        points.push((sample_point(space, rng), mult));
        used += mult;
    }
    Diagram::new(space, points).unwrap()
}

/// |a - b| within `tol` relative to max(1, |a|, |b|).
pub fn close(a: f64, b: f64, tol: f64) -> bool {
    if a.is_infinite() || b.is_infinite() {
        return a == b;
    }
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}
