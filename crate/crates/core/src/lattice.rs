//! Finite boxes of Z³, real fields on them, and the discrete operators.
//!
//! A box of radius `n` holds the sites `x` with `max_i |x_i| <= n`, stored
//! row-major in `(x1, x2, x3)` with linear offset
//! `((x1+n)(2n+1) + (x2+n))(2n+1) + (x3+n)`.
//!
//! Every site has six neighbours. In [`BoundaryMode::Dirichlet`] a neighbour
//! outside the box is a site of value zero; in [`BoundaryMode::Periodic`]
//! indices wrap modulo `2n+1`.
//!
//! All reductions run sequentially in linear site order, so results are
//! bit-reproducible for a given input.

use std::fmt;
use std::ops::{Add, Neg, Sub};

use crate::energy::PotentialSpec;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BoundaryMode {
    Dirichlet,
    Periodic,
}

impl BoundaryMode {
    pub fn as_str(self) -> &'static str {
        match self {
            BoundaryMode::Dirichlet => "dirichlet",
            BoundaryMode::Periodic => "periodic",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.trim() {
            "dirichlet" | "dirichlet_zero" => Some(BoundaryMode::Dirichlet),
            "periodic" => Some(BoundaryMode::Periodic),
            _ => None,
        }
    }
}

impl fmt::Display for BoundaryMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A lattice site `(x1, x2, x3)` of Z³.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Index3(pub [i64; 3]);

impl Index3 {
    pub const ORIGIN: Index3 = Index3([0, 0, 0]);

    pub fn new(x1: i64, x2: i64, x3: i64) -> Self {
        Index3([x1, x2, x3])
    }

    pub fn axis(axis: usize, len: i64) -> Self {
        let mut c = [0; 3];
        c[axis] = len;
        Index3(c)
    }

    /// Graph distance on Z³ (the l¹ norm).
    pub fn l1(&self) -> i64 {
        self.0.iter().map(|c| c.abs()).sum()
    }

    pub fn max_abs(&self) -> i64 {
        self.0.iter().map(|c| c.abs()).max().unwrap_or(0)
    }

    pub fn euclid(&self) -> f64 {
        self.0.iter().map(|&c| (c * c) as f64).sum::<f64>().sqrt()
    }

    /// Sorted absolute coordinates, the representative of the octahedral orbit.
    pub fn canonical(&self) -> Index3 {
        let mut c = self.0.map(i64::abs);
        c.sort_unstable_by(|a, b| b.cmp(a));
        Index3(c)
    }
}

impl Add for Index3 {
    type Output = Index3;
    fn add(self, o: Index3) -> Index3 {
        Index3([self.0[0] + o.0[0], self.0[1] + o.0[1], self.0[2] + o.0[2]])
    }
}

impl Sub for Index3 {
    type Output = Index3;
    fn sub(self, o: Index3) -> Index3 {
        Index3([self.0[0] - o.0[0], self.0[1] - o.0[1], self.0[2] - o.0[2]])
    }
}

impl Neg for Index3 {
    type Output = Index3;
    fn neg(self) -> Index3 {
        Index3(self.0.map(|c| -c))
    }
}

impl fmt::Display for Index3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.0[0], self.0[1], self.0[2])
    }
}

/// The 48 signed permutations of three coordinates.
pub fn octahedral_images(z: Index3) -> impl Iterator<Item = Index3> {
    const PERMS: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
    PERMS.into_iter().flat_map(move |p| {
        (0..8).map(move |signs: u8| {
            let mut c = [0i64; 3];
            for (k, &pk) in p.iter().enumerate() {
                let s = if signs & (1 << k) != 0 { -1 } else { 1 };
                c[k] = s * z.0[pk];
            }
            Index3(c)
        })
    })
}

/// Truncation of Z³ to `max_i |x_i| <= radius`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct LatticeBox {
    radius: usize,
    mode: BoundaryMode,
}

impl LatticeBox {
    pub fn new(radius: usize, mode: BoundaryMode) -> Self {
        LatticeBox { radius, mode }
    }

    pub fn dirichlet(radius: usize) -> Self {
        Self::new(radius, BoundaryMode::Dirichlet)
    }

    pub fn periodic(radius: usize) -> Self {
        Self::new(radius, BoundaryMode::Periodic)
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn mode(&self) -> BoundaryMode {
        self.mode
    }

    /// Sites per axis, `2n+1`.
    pub fn side(&self) -> usize {
        2 * self.radius + 1
    }

    pub fn site_count(&self) -> usize {
        self.side().pow(3)
    }

    pub fn contains(&self, x: Index3) -> bool {
        x.max_abs() <= self.radius as i64
    }

    /// Linear offset of an in-box site.
    pub fn offset(&self, x: Index3) -> Option<usize> {
        if !self.contains(x) {
            return None;
        }
        let n = self.radius as i64;
        let s = self.side() as i64;
        Some((((x.0[0] + n) * s + (x.0[1] + n)) * s + (x.0[2] + n)) as usize)
    }

    pub fn site(&self, offset: usize) -> Index3 {
        let s = self.side();
        let n = self.radius as i64;
        let i3 = offset % s;
        let i2 = (offset / s) % s;
        let i1 = offset / (s * s);
        Index3([i1 as i64 - n, i2 as i64 - n, i3 as i64 - n])
    }

    pub fn sites(&self) -> impl Iterator<Item = Index3> + '_ {
        (0..self.site_count()).map(move |k| self.site(k))
    }

    /// Wraps a site into the box (periodic) or returns `None` if it lies
    /// outside (Dirichlet).
    pub fn resolve(&self, x: Index3) -> Option<usize> {
        match self.mode {
            BoundaryMode::Dirichlet => self.offset(x),
            BoundaryMode::Periodic => {
                let n = self.radius as i64;
                let s = self.side() as i64;
                let w = x.0.map(|c| (c + n).rem_euclid(s) - n);
                self.offset(Index3(w))
            }
        }
    }

    fn ensure_same(&self, other: &LatticeBox) -> Result<()> {
        if self != other {
            return Err(Error::BoxMismatch {
                expected: self.radius,
                found: other.radius,
            });
        }
        Ok(())
    }

    /// Calls `f(site, forward_neighbour)` once per undirected lattice edge that
    /// touches the box. Edges to outside sites (Dirichlet) pass `None`.
    fn for_each_edge(&self, mut f: impl FnMut(usize, Option<usize>)) {
        let s = self.side();
        let strides = [s * s, s, 1];
        let periodic = self.mode == BoundaryMode::Periodic;
        for i1 in 0..s {
            for i2 in 0..s {
                for i3 in 0..s {
                    let idx = [i1, i2, i3];
                    let k = (i1 * s + i2) * s + i3;
                    for axis in 0..3 {
                        if idx[axis] + 1 < s {
                            f(k, Some(k + strides[axis]));
                        } else if periodic {
                            f(k, Some(k - (s - 1) * strides[axis]));
                        } else {
                            f(k, None);
                        }
                        if !periodic && idx[axis] == 0 {
                            // edge to the outside site on the negative side
                            f(k, None);
                        }
                    }
                }
            }
        }
    }
}

/// A real function on a [`LatticeBox`], zero outside it in Dirichlet mode.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    lattice: LatticeBox,
    values: Vec<f64>,
}

impl Field {
    pub fn zeros(lattice: LatticeBox) -> Self {
        Field {
            lattice,
            values: vec![0.0; lattice.site_count()],
        }
    }

    pub fn constant(lattice: LatticeBox, value: f64) -> Self {
        Field {
            lattice,
            values: vec![value; lattice.site_count()],
        }
    }

    pub fn from_fn(lattice: LatticeBox, mut f: impl FnMut(Index3) -> f64) -> Self {
        let values = (0..lattice.site_count()).map(|k| f(lattice.site(k))).collect();
        Field { lattice, values }
    }

    /// Wraps raw values; rejects the wrong length and non-finite entries.
    pub fn from_values(lattice: LatticeBox, values: Vec<f64>) -> Result<Self> {
        if values.len() != lattice.site_count() {
            return Err(Error::InvalidParameter(format!(
                "expected {} values for radius {}, got {}",
                lattice.site_count(),
                lattice.radius(),
                values.len()
            )));
        }
        if let Some(k) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "non-finite value at site {}",
                lattice.site(k)
            )));
        }
        Ok(Field { lattice, values })
    }

    /// `height` at `x`, zero elsewhere.
    pub fn delta(lattice: LatticeBox, x: Index3, height: f64) -> Self {
        let mut f = Field::zeros(lattice);
        if let Some(k) = lattice.offset(x) {
            f.values[k] = height;
        }
        f
    }

    pub fn lattice(&self) -> &LatticeBox {
        &self.lattice
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// Value at any site of Z³ (wrapped or zero outside the box).
    pub fn get(&self, x: Index3) -> f64 {
        self.lattice.resolve(x).map_or(0.0, |k| self.values[k])
    }

    pub fn set(&mut self, x: Index3, value: f64) {
        if let Some(k) = self.lattice.offset(x) {
            self.values[k] = value;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0)
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Field {
        Field {
            lattice: self.lattice,
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn scaled(&self, s: f64) -> Field {
        self.map(|v| s * v)
    }

    /// `self + s * other`.
    pub fn add_scaled(&self, s: f64, other: &Field) -> Field {
        debug_assert_eq!(self.lattice, other.lattice);
        Field {
            lattice: self.lattice,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a + s * b)
                .collect(),
        }
    }

    pub fn axpy(&mut self, s: f64, other: &Field) {
        debug_assert_eq!(self.lattice, other.lattice);
        for (a, b) in self.values.iter_mut().zip(&other.values) {
            *a += s * b;
        }
    }

    /// Plain ℓ² pairing `Σ u(x) v(x)`.
    pub fn dot(&self, other: &Field) -> f64 {
        debug_assert_eq!(self.lattice, other.lattice);
        self.values.iter().zip(&other.values).map(|(a, b)| a * b).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Site of largest `|u|` (first in linear order on ties).
    pub fn argmax_abs(&self) -> Index3 {
        let mut best = 0;
        for (k, v) in self.values.iter().enumerate() {
            if v.abs() > self.values[best].abs() {
                best = k;
            }
        }
        self.lattice.site(best)
    }

    /// `x ↦ u(x - shift)`: wraps in periodic mode, fills with zero in
    /// Dirichlet mode (mass shifted past the boundary is lost).
    pub fn translate(&self, shift: Index3) -> Field {
        Field::from_fn(self.lattice, |x| self.get(x - shift))
    }

    /// `x ↦ u(map(x))`.
    pub fn transform(&self, map: impl Fn(Index3) -> Index3) -> Field {
        Field::from_fn(self.lattice, |x| self.get(map(x)))
    }
}

/// `Δu(x) = Σ_{y∼x} (u(y) − u(x))`.
pub fn laplacian(u: &Field) -> Field {
    let mut out = Field::zeros(u.lattice);
    laplacian_into(u.values(), &u.lattice, out.values_mut());
    out
}

pub(crate) fn laplacian_into(u: &[f64], lattice: &LatticeBox, out: &mut [f64]) {
    let s = lattice.side();
    let periodic = lattice.mode() == BoundaryMode::Periodic;
    let strides = [s * s, s, 1];
    for i1 in 0..s {
        for i2 in 0..s {
            for i3 in 0..s {
                let idx = [i1, i2, i3];
                let k = (i1 * s + i2) * s + i3;
                let mut acc = 0.0;
                for axis in 0..3 {
                    let st = strides[axis];
                    let i = idx[axis];
                    if i + 1 < s {
                        acc += u[k + st];
                    } else if periodic {
                        acc += u[k - (s - 1) * st];
                    }
                    if i > 0 {
                        acc += u[k - st];
                    } else if periodic {
                        acc += u[k + (s - 1) * st];
                    }
                }
                out[k] = acc - 6.0 * u[k];
            }
        }
    }
}

/// `Σ_x Γ(u, v)(x) = ½ Σ_x Σ_{y∼x} (u(y)−u(x))(v(y)−v(x))`, summed over
/// undirected edges, each counted once.
pub fn gradient_form_sum(u: &Field, v: &Field) -> Result<f64> {
    u.lattice.ensure_same(&v.lattice)?;
    let (uu, vv) = (u.values(), v.values());
    let mut acc = 0.0;
    u.lattice.for_each_edge(|k, nb| {
        let (du, dv) = match nb {
            Some(j) => (uu[j] - uu[k], vv[j] - vv[k]),
            None => (-uu[k], -vv[k]),
        };
        acc += du * dv;
    });
    Ok(acc)
}

/// `∫|∇u|² dμ`, the sum of squared differences over undirected edges.
pub fn gradient_energy(u: &Field) -> f64 {
    let uu = u.values();
    let mut acc = 0.0;
    u.lattice.for_each_edge(|k, nb| {
        let d = match nb {
            Some(j) => uu[j] - uu[k],
            None => uu[k],
        };
        acc += d * d;
    });
    acc
}

/// Exponent of an ℓᵖ norm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LpExponent {
    Finite(f64),
    Infinity,
}

/// `‖u‖_p`; `p < 1` is rejected.
pub fn lp_norm(u: &Field, p: LpExponent) -> Result<f64> {
    match p {
        LpExponent::Infinity => Ok(u.max_abs()),
        LpExponent::Finite(p) if p.is_nan() || p < 1.0 => {
            Err(Error::InvalidParameter(format!("lp norm needs p >= 1, got {p}")))
        }
        LpExponent::Finite(p) if p.is_infinite() => Ok(u.max_abs()),
        LpExponent::Finite(p) => {
            // scale by the max to avoid overflow for large p
            let m = u.max_abs();
            if m == 0.0 {
                return Ok(0.0);
            }
            let s: f64 = u.values().iter().map(|v| (v.abs() / m).powf(p)).sum();
            Ok(m * s.powf(1.0 / p))
        }
    }
}

/// The H inner product `(u, v) = ∫ (a ∇u∇v + V u v) dμ`.
pub fn h_inner(u: &Field, v: &Field, a: f64, potential: &PotentialSpec) -> Result<f64> {
    u.lattice.ensure_same(&v.lattice)?;
    let pot = potential.field(u.lattice());
    h_inner_with(u, v, a, &pot)
}

/// [`h_inner`] with the potential already tabulated on the box.
pub fn h_inner_with(u: &Field, v: &Field, a: f64, potential: &Field) -> Result<f64> {
    u.lattice.ensure_same(&v.lattice)?;
    u.lattice.ensure_same(&potential.lattice)?;
    let grad = gradient_form_sum(u, v)?;
    let mass: f64 = u
        .values()
        .iter()
        .zip(v.values())
        .zip(potential.values())
        .map(|((a, b), w)| a * b * w)
        .sum();
    Ok(a * grad + mass)
}

/// Applies `(−aΔ + V)`, the Riesz map of the H inner product.
pub(crate) fn apply_h_operator(u: &[f64], lattice: &LatticeBox, a: f64, potential: &[f64], out: &mut [f64]) {
    laplacian_into(u, lattice, out);
    for ((o, &x), &w) in out.iter_mut().zip(u).zip(potential) {
        *o = -a * *o + w * x;
    }
}
