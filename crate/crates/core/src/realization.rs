//! Circle actions realizing a circular order on a ball, and numerical
//! rotation numbers of the resulting piecewise-linear maps.

use std::collections::HashMap;
use std::fmt::Display;
use std::io::Write;

use num_rational::Rational64;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::group::Group;
use crate::orders::{sort_sign, CircularOrderOracle};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RealizeError {
    #[error("EmptyBall: the ball must contain the identity")]
    EmptyBall,
    #[error("NotOrderPreserving: interpolation data is not cyclically increasing")]
    NotOrderPreserving,
}

/// Degree-one circle map given by a lift through sorted data points
/// `(x_i, y_i)` with `x_i ∈ [0, 1)` and `y_0 < y_1 < … < y_0 + 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PLCircleMap {
    xs: Vec<Rational64>,
    ys: Vec<Rational64>,
}

fn frac(x: Rational64) -> Rational64 {
    x - x.floor()
}

impl PLCircleMap {
    /// From unsorted pairs `x ↦ y` of points in `[0, 1)`.
    #[allow(clippy::int_plus_one)] // rational, not integer
    pub fn from_pairs(mut pairs: Vec<(Rational64, Rational64)>) -> Result<Self, RealizeError> {
        if pairs.is_empty() {
            return Ok(PLCircleMap { xs: vec![Rational64::zero()], ys: vec![Rational64::zero()] });
        }
        pairs.sort();
        pairs.dedup();
        let mut xs = Vec::with_capacity(pairs.len());
        let mut ys: Vec<Rational64> = Vec::with_capacity(pairs.len());
        for (x, y) in pairs {
            let mut y = frac(y);
            if let Some(&prev) = ys.last() {
                while y <= prev {
                    y += 1;
                }
            }
            xs.push(frac(x));
            ys.push(y);
        }
        if ys[ys.len() - 1] >= ys[0] + 1 {
            return Err(RealizeError::NotOrderPreserving);
        }
        Ok(PLCircleMap { xs, ys })
    }

    pub fn rotation(theta: Rational64) -> Self {
        PLCircleMap { xs: vec![Rational64::zero()], ys: vec![frac(theta)] }
    }

    fn segment(&self, fx: Rational64) -> ((Rational64, Rational64), (Rational64, Rational64)) {
        let m = self.xs.len();
        let one = Rational64::from_integer(1);
        let i = self.xs.partition_point(|&x| x <= fx);
        let left = if i == 0 { (self.xs[m - 1] - one, self.ys[m - 1] - one) } else { (self.xs[i - 1], self.ys[i - 1]) };
        let right = if i == m { (self.xs[0] + one, self.ys[0] + one) } else { (self.xs[i], self.ys[i]) };
        (left, right)
    }

    /// The lift `F` at an exact point.
    pub fn lift(&self, x: Rational64) -> Rational64 {
        let fl = x.floor();
        let fx = x - fl;
        let ((x0, y0), (x1, y1)) = self.segment(fx);
        fl + y0 + (y1 - y0) * (fx - x0) / (x1 - x0)
    }

    pub fn apply(&self, x: Rational64) -> Rational64 {
        frac(self.lift(x))
    }

    pub fn lift_f64(&self, x: f64) -> f64 {
        let fl = x.floor();
        let fx = x - fl;
        let m = self.xs.len();
        let xf = |r: Rational64| r.to_f64().unwrap();
        let i = self.xs.partition_point(|&x| xf(x) <= fx);
        let (x0, y0) = if i == 0 {
            (xf(self.xs[m - 1]) - 1.0, xf(self.ys[m - 1]) - 1.0)
        } else {
            (xf(self.xs[i - 1]), xf(self.ys[i - 1]))
        };
        let (x1, y1) =
            if i == m { (xf(self.xs[0]) + 1.0, xf(self.ys[0]) + 1.0) } else { (xf(self.xs[i]), xf(self.ys[i])) };
        fl + y0 + (y1 - y0) * (fx - x0) / (x1 - x0)
    }

    /// Breakpoints and their lifted images.
    pub fn data(&self) -> impl Iterator<Item = (Rational64, Rational64)> + '_ {
        self.xs.iter().copied().zip(self.ys.iter().copied())
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct RotEstimate {
    pub value: f64,
    pub bound: f64,
}

/// `(F^N(x_0) − x_0)/N mod 1`, within `1/N` of the rotation number.
pub fn rot_estimate(f: &PLCircleMap, iterations: usize, x0: f64) -> RotEstimate {
    assert!(iterations >= 1);
    let mut x = x0;
    for _ in 0..iterations {
        x = f.lift_f64(x);
    }
    RotEstimate { value: ((x - x0) / iterations as f64).rem_euclid(1.0), bound: 1.0 / iterations as f64 }
}

/// Distance from `x` to `0` in `R/Z`.
pub fn circle_dist(x: f64) -> f64 {
    let r = x.rem_euclid(1.0);
    r.min(1.0 - r)
}

/// Equally spaced placement of a ball, cyclically sorted by `c` from the identity.
pub struct Realization<E> {
    pub elements: Vec<E>,
    pub positions: HashMap<E, Rational64>,
    pub generator_maps: Vec<(E, PLCircleMap)>,
}

pub fn realize<G: Group>(
    group: &G,
    c: &CircularOrderOracle<G::Elem>,
    ball: &[G::Elem],
) -> Result<Realization<G::Elem>, RealizeError> {
    let id = group.identity();
    if !ball.contains(&id) {
        return Err(RealizeError::EmptyBall);
    }
    let mut rest: Vec<G::Elem> = ball.iter().filter(|g| **g != id).cloned().collect();
    rest.sort_by(|g, h| {
        if g == h {
            std::cmp::Ordering::Equal
        } else if c.eval(&id, g, h) == 1 {
            std::cmp::Ordering::Less
        } else {
            std::cmp::Ordering::Greater
        }
    });
    let mut elements = vec![id];
    elements.extend(rest);
    let n = elements.len() as i64;
    let positions: HashMap<G::Elem, Rational64> =
        elements.iter().enumerate().map(|(i, g)| (g.clone(), Rational64::new(i as i64, n))).collect();
    let mut r = Realization { elements, positions, generator_maps: Vec::new() };
    for s in group.generators() {
        let f = r.map_for(group, &s)?;
        r.generator_maps.push((s, f));
    }
    Ok(r)
}

impl<E: Clone + Eq + std::hash::Hash> Realization<E> {
    /// Interpolate `pos(g) ↦ pos(σ g)` over `g` with both in the ball.
    pub fn map_for<G: Group<Elem = E>>(&self, group: &G, sigma: &E) -> Result<PLCircleMap, RealizeError> {
        let pairs = self
            .elements
            .iter()
            .filter_map(|g| self.positions.get(&group.mul(sigma, g)).map(|y| (self.positions[g], *y)))
            .collect();
        PLCircleMap::from_pairs(pairs)
    }

    /// `ord` of the assigned points.
    pub fn ord(&self, a: &E, b: &E, c: &E) -> i8 {
        let (pa, pb, pc) = (self.positions[a], self.positions[b], self.positions[c]);
        sort_sign(&pa, &pb, &pc, |x, y| x < y)
    }

    pub fn write_points<W: Write>(&self, mut w: W) -> std::io::Result<()>
    where
        E: Display,
    {
        for g in &self.elements {
            let p = self.positions[g];
            writeln!(w, "{g}\t{}/{}", p.numer(), p.denom())?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RotReport {
    pub iterations: usize,
    pub tolerance: f64,
    /// Per generator: label, estimate, nearest multiple of `1/grid`.
    pub generators: Vec<(String, f64, f64)>,
    pub pairs_checked: usize,
    pub max_defect: f64,
    pub identity_rot: f64,
}

impl RotReport {
    pub fn homomorphism_ok(&self) -> bool {
        self.max_defect < self.tolerance && self.identity_rot == 0.0
    }

    pub fn generators_on_grid(&self) -> bool {
        self.generators.iter().all(|(_, r, near)| circle_dist(r - near) < self.tolerance)
    }
}

/// Rotation numbers of the realized maps: additivity on sampled pairs, and
/// per-generator distance to the nearest multiple of `1/grid`.
pub fn rot_homomorphism_check<G: Group>(
    group: &G,
    real: &Realization<G::Elem>,
    pairs: &[(G::Elem, G::Elem)],
    grid: u32,
    iterations: usize,
    tolerance: f64,
) -> Result<RotReport, RealizeError>
where
    G::Elem: Display,
{
    let rot = |g: &G::Elem| -> Result<f64, RealizeError> {
        Ok(rot_estimate(&real.map_for(group, g)?, iterations, 0.0).value)
    };
    let mut max_defect: f64 = 0.0;
    for (g, h) in pairs {
        let d = rot(&group.mul(g, h))? - rot(g)? - rot(h)?;
        max_defect = max_defect.max(circle_dist(d));
    }
    let generators = real
        .generator_maps
        .iter()
        .map(|(s, f)| {
            let r = rot_estimate(f, iterations, 0.0).value;
            let near = ((r * grid as f64).round() / grid as f64).rem_euclid(1.0);
            (s.to_string(), r, near)
        })
        .collect();
    Ok(RotReport {
        iterations,
        tolerance,
        generators,
        pairs_checked: pairs.len(),
        max_defect,
        identity_rot: rot(&group.identity())?,
    })
}
