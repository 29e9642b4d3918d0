//! Planar positions and the distance-power cost of a link.

use std::f64::consts::PI;

use rand::Rng;

/// A point in the closed unit square.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Position {
    pub x: f64,
    pub y: f64,
}

impl Position {
    /// Returns `None` unless both coordinates lie in `[0, 1]`.
    pub fn new(x: f64, y: f64) -> Option<Self> {
        let inside = |v: f64| (0.0..=1.0).contains(&v);
        (inside(x) && inside(y)).then_some(Self { x, y })
    }

    /// Uniform draw over the unit square. Consumes exactly two `f64` draws, x first.
    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let x = rng.gen::<f64>();
        let y = rng.gen::<f64>();
        Self { x, y }
    }

    pub fn dist_sq(&self, other: &Position) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        dx * dx + dy * dy
    }
}

/// Power needed to maintain a link between `a` and `b`: `|a - b|^delta`.
///
/// Symmetric bit-for-bit: the squared distance is computed from absolute
/// coordinate differences, so argument order cannot change rounding.
pub fn pair_power(a: Position, b: Position, delta: f64) -> f64 {
    let dx = (a.x - b.x).abs();
    let dy = (a.y - b.y).abs();
    power_from_dist_sq(dx * dx + dy * dy, delta)
}

/// `d^delta` given `d^2`. The common `delta = 2` case avoids `powf`.
pub fn power_from_dist_sq(d2: f64, delta: f64) -> f64 {
    if delta == 2.0 {
        d2
    } else if delta == 4.0 {
        d2 * d2
    } else {
        d2.powf(delta / 2.0)
    }
}

/// Mean-field degree estimate when every agent links to its closest
/// available neighbours: the number of uniformly spread agents whose
/// cumulative link power stays within `p_min`,
/// `pi N ((2 + delta) p_min / (2 pi N))^(2 / (2 + delta))`.
pub fn analytic_degree_q0(n_agents: f64, delta: f64, p_min: f64) -> f64 {
    let radius_term = (2.0 + delta) * p_min / (2.0 * PI * n_agents);
    PI * n_agents * radius_term.powf(2.0 / (2.0 + delta))
}
