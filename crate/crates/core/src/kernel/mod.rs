//! The Green's function `R_α` of the discrete fractional Laplacian on Z³,
//!
//! ```text
//! R_α(z) = K_α (2π)^{-3} ∫_{T³} e^{i z·k} μ(k)^{-α/2} dk,
//! K_α    =     (2π)^{-3} ∫_{T³} μ(k)^{α/2} dk,
//! μ(k)   = 6 − 2 Σ_j cos k_j,
//! ```
//!
//! tabulated over a cube of displacements, and convolution against it.

pub mod bessel;
mod convolve;
pub mod heat;
pub mod quadrature;
pub mod torus;

use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use sha2::{Digest, Sha256};
use statrs::function::gamma::gamma;

pub use convolve::{convolve, ConvolutionMethod, Convolver};

use crate::error::{Error, Result};
use crate::lattice::{octahedral_images, BoundaryMode, Field, Index3, LatticeBox};
use heat::{HeatKernelRule, HEAT_TOLERANCE};
use torus::GradedTorusRule;

pub const KERNEL_MAGIC: &[u8; 8] = b"LCKERN01";
/// Default Gauss panels for the heat-kernel integral.
pub const DEFAULT_HEAT_PANELS: usize = 48;
/// Default angular resolution for graded torus quadrature.
pub const DEFAULT_TORUS_RESOLUTION: usize = 32;
const K_ALPHA_RESOLUTION: usize = 48;
const TORUS_TOLERANCE: f64 = 1e-8;

/// A point `k` of the torus `[0, 2π]³`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymbolPoint([f64; 3]);

impl SymbolPoint {
    pub fn new(k: [f64; 3]) -> Result<Self> {
        if k.iter().all(|c| (0.0..=2.0 * PI).contains(c)) {
            Ok(SymbolPoint(k))
        } else {
            Err(Error::InvalidParameter(format!("symbol point {k:?} outside [0, 2π]³")))
        }
    }

    pub fn coords(&self) -> [f64; 3] {
        self.0
    }
}

/// `μ(k) = 6 − 2 Σ cos k_j`, computed as `4 Σ sin²(k_j/2)` to keep the
/// small-`k` behaviour accurate.
pub fn mu_symbol(k: SymbolPoint) -> f64 {
    k.0.iter().map(|&c| 4.0 * (0.5 * c).sin().powi(2)).sum()
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 3.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("alpha must lie in (0, 3), got {alpha}")))
    }
}

/// `K_α` by the product trapezoid rule with `resolution` points per axis,
/// on the grid offset by half a step so no node sits on the cusp at `k = 0`.
/// Exact for `α = 2`; only algebraically convergent otherwise.
pub fn k_alpha_trapezoid(alpha: f64, resolution: usize) -> Result<f64> {
    check_alpha(alpha)?;
    if resolution < 16 {
        return Err(Error::InvalidParameter(format!("resolution must be >= 16, got {resolution}")));
    }
    let h = 2.0 * PI / resolution as f64;
    let axis: Vec<f64> = (0..resolution)
        .map(|j| 4.0 * (0.5 * h * (j as f64 + 0.5)).sin().powi(2))
        .collect();
    let half = 0.5 * alpha;
    let total: f64 = axis
        .par_iter()
        .map(|&a| {
            let mut s = 0.0;
            for &b in &axis {
                for &c in &axis {
                    s += (a + b + c).powf(half);
                }
            }
            s
        })
        .collect::<Vec<_>>()
        .iter()
        .sum();
    Ok(total / (resolution as f64).powi(3))
}

/// `K_α` by graded quadrature (spectrally convergent for every `α`).
pub fn compute_k_alpha(alpha: f64, resolution: usize) -> Result<f64> {
    check_alpha(alpha)?;
    if resolution < 16 {
        return Err(Error::InvalidParameter(format!("resolution must be >= 16, got {resolution}")));
    }
    Ok(GradedTorusRule::new(0.5 * alpha, resolution).integrate(|_| 1.0))
}

/// How kernel values are computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum KernelMethod {
    TorusQuadrature,
    HeatKernel,
}

impl KernelMethod {
    pub fn tag(self) -> u32 {
        match self {
            KernelMethod::TorusQuadrature => 0,
            KernelMethod::HeatKernel => 1,
        }
    }

    pub fn from_tag(tag: u32) -> Option<Self> {
        match tag {
            0 => Some(KernelMethod::TorusQuadrature),
            1 => Some(KernelMethod::HeatKernel),
            _ => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            KernelMethod::TorusQuadrature => "torus_quadrature",
            KernelMethod::HeatKernel => "heat_kernel",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.trim() {
            "torus_quadrature" | "torus" => Some(KernelMethod::TorusQuadrature),
            "heat_kernel" | "heat" => Some(KernelMethod::HeatKernel),
            _ => None,
        }
    }

    pub fn default_resolution(self) -> usize {
        match self {
            KernelMethod::TorusQuadrature => DEFAULT_TORUS_RESOLUTION,
            KernelMethod::HeatKernel => DEFAULT_HEAT_PANELS,
        }
    }
}

/// Evaluates many displacements for one `α`, sharing quadrature nodes.
pub struct KernelEvaluator {
    alpha: f64,
    k_alpha: f64,
    inner: EvaluatorKind,
}

enum EvaluatorKind {
    Heat(HeatKernelRule),
    Torus { fine: GradedTorusRule, coarse: GradedTorusRule },
}

impl KernelEvaluator {
    /// Nodes valid for every `z` with `max |z_i| <= reach`.
    pub fn new(alpha: f64, reach: usize, method: KernelMethod, resolution: usize) -> Result<Self> {
        check_alpha(alpha)?;
        let k_alpha = compute_k_alpha(alpha, K_ALPHA_RESOLUTION)?;
        let inner = match method {
            KernelMethod::HeatKernel => EvaluatorKind::Heat(HeatKernelRule::new(alpha, reach, resolution.max(2))),
            KernelMethod::TorusQuadrature => {
                let res = resolution.max(8);
                EvaluatorKind::Torus {
                    fine: GradedTorusRule::new(-0.5 * alpha, res + res / 2),
                    coarse: GradedTorusRule::new(-0.5 * alpha, res),
                }
            }
        };
        Ok(KernelEvaluator { alpha, k_alpha, inner })
    }

    pub fn k_alpha(&self) -> f64 {
        self.k_alpha
    }

    pub fn value(&self, z: Index3) -> Result<f64> {
        let (value, err, tol, what) = match &self.inner {
            EvaluatorKind::Heat(rule) => {
                let (v, e) = rule.integral(z)?;
                let scale = self.k_alpha / gamma(0.5 * self.alpha);
                (scale * v, scale * e, HEAT_TOLERANCE, "heat-kernel integral")
            }
            EvaluatorKind::Torus { fine, coarse } => {
                let v = fine.cosine_transform(z.0);
                let c = coarse.cosine_transform(z.0);
                (self.k_alpha * v, self.k_alpha * (v - c).abs(), TORUS_TOLERANCE, "graded torus quadrature")
            }
        };
        if !value.is_finite() || err > tol * value.abs() {
            return Err(Error::QuadratureNotConverged {
                what: format!("{what} at z = {z}, alpha = {}", self.alpha),
                estimate: err / value.abs(),
                tolerance: tol,
            });
        }
        Ok(value)
    }
}

/// A single kernel value `R_α(z)`.
pub fn green_value(alpha: f64, z: Index3, method: KernelMethod) -> Result<f64> {
    let reach = z.max_abs() as usize;
    KernelEvaluator::new(alpha, reach, method, method.default_resolution())?.value(z)
}

/// `R_α` tabulated on `max |z_i| <= table_radius`, in the field layout.
#[derive(Debug, Clone, PartialEq)]
pub struct GreenKernel {
    alpha: f64,
    k_alpha: f64,
    table_radius: usize,
    method: KernelMethod,
    resolution: usize,
    table: Vec<f64>,
}

impl GreenKernel {
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn k_alpha(&self) -> f64 {
        self.k_alpha
    }

    pub fn table_radius(&self) -> usize {
        self.table_radius
    }

    pub fn method(&self) -> KernelMethod {
        self.method
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    pub fn table(&self) -> &[f64] {
        &self.table
    }

    fn table_box(&self) -> LatticeBox {
        LatticeBox::dirichlet(self.table_radius)
    }

    /// `R_α(z)`, or `None` outside the table.
    pub fn value(&self, z: Index3) -> Option<f64> {
        self.table_box().offset(z).map(|k| self.table[k])
    }

    /// The table as a field on a box of the table radius.
    pub fn as_field(&self) -> Field {
        Field::from_values(self.table_box(), self.table.clone()).expect("kernel table is finite")
    }

    /// Replaces one entry. Only for fault-injection tests of the integrity
    /// checks; a real kernel never needs this.
    #[doc(hidden)]
    pub fn corrupt_entry(&mut self, z: Index3, value: f64) {
        if let Some(k) = self.table_box().offset(z) {
            self.table[k] = value;
        }
    }

    /// Finiteness, positivity and exact octahedral symmetry of the table.
    pub fn check_integrity(&self) -> std::result::Result<(), String> {
        let b = self.table_box();
        for (k, &v) in self.table.iter().enumerate() {
            let z = b.site(k);
            if !v.is_finite() {
                return Err(format!("non-finite value at {z}"));
            }
            if v <= 0.0 {
                return Err(format!("non-positive value {v} at {z}"));
            }
            let rep = self.table[b.offset(z.canonical()).unwrap()];
            if v.to_bits() != rep.to_bits() {
                return Err(format!("symmetry broken at {z}: {v} vs {rep} at {}", z.canonical()));
            }
        }
        Ok(())
    }

    /// Least-squares slope of `ln R(r e₁)` against `ln r` for `r` in `[lo, hi]`,
    /// and the fitted prefactor.
    pub fn fit_axis_decay(&self, lo: usize, hi: usize) -> Option<(f64, f64)> {
        let hi = hi.min(self.table_radius);
        if lo == 0 || hi <= lo {
            return None;
        }
        let pts: Vec<(f64, f64)> = (lo..=hi)
            .map(|r| ((r as f64).ln(), self.value(Index3::axis(0, r as i64)).unwrap().ln()))
            .collect();
        let n = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
        let slope = sxy / sxx;
        Some((slope, (my - slope * mx).exp()))
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut buf = Vec::with_capacity(32 + 8 * self.table.len());
        buf.extend_from_slice(KERNEL_MAGIC);
        buf.extend_from_slice(&self.alpha.to_le_bytes());
        buf.extend_from_slice(&(self.table_radius as u32).to_le_bytes());
        buf.extend_from_slice(&self.method.tag().to_le_bytes());
        buf.extend_from_slice(&self.k_alpha.to_le_bytes());
        for v in &self.table {
            buf.extend_from_slice(&v.to_le_bytes());
        }
        buf
    }

    /// Parses the cache layout. The file does not carry the resolution, so
    /// the caller supplies it.
    pub fn from_bytes(bytes: &[u8], resolution: usize) -> Result<Self> {
        if bytes.len() < 32 || &bytes[..8] != KERNEL_MAGIC {
            return Err(Error::Format("bad kernel magic".into()));
        }
        let f64_at = |o: usize| f64::from_le_bytes(bytes[o..o + 8].try_into().unwrap());
        let u32_at = |o: usize| u32::from_le_bytes(bytes[o..o + 4].try_into().unwrap());
        let alpha = f64_at(8);
        let table_radius = u32_at(16) as usize;
        let method = KernelMethod::from_tag(u32_at(20))
            .ok_or_else(|| Error::Format(format!("unknown kernel method tag {}", u32_at(20))))?;
        let k_alpha = f64_at(24);
        let count = (2 * table_radius + 1).pow(3);
        if bytes.len() != 32 + 8 * count {
            return Err(Error::Format(format!(
                "kernel payload holds {} bytes, expected {}",
                bytes.len() - 32,
                8 * count
            )));
        }
        let table = bytes[32..]
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
            .collect();
        Ok(GreenKernel {
            alpha,
            k_alpha,
            table_radius,
            method,
            resolution,
            table,
        })
    }
}

/// Heat-kernel table with the default resolution.
pub fn build_kernel(alpha: f64, table_radius: usize) -> Result<GreenKernel> {
    build_kernel_with(alpha, table_radius, KernelMethod::HeatKernel, DEFAULT_HEAT_PANELS)
}

/// Computes the fundamental octant `z1 >= z2 >= z3 >= 0` in parallel and fills
/// the rest of the table by reflection.
pub fn build_kernel_with(
    alpha: f64,
    table_radius: usize,
    method: KernelMethod,
    resolution: usize,
) -> Result<GreenKernel> {
    let eval = KernelEvaluator::new(alpha, table_radius, method, resolution)?;
    let reps = fundamental_octant(table_radius);
    let values: Vec<f64> = reps
        .par_iter()
        .map(|&z| eval.value(z))
        .collect::<Result<_>>()?;
    let b = LatticeBox::dirichlet(table_radius);
    let mut table = vec![f64::NAN; b.site_count()];
    for (z, v) in reps.iter().zip(&values) {
        for img in octahedral_images(*z) {
            table[b.offset(img).unwrap()] = *v;
        }
    }
    debug_assert!(table.iter().all(|v| v.is_finite()));
    Ok(GreenKernel {
        alpha,
        k_alpha: eval.k_alpha(),
        table_radius,
        method,
        resolution,
        table,
    })
}

/// Displacements `m >= z1 >= z2 >= z3 >= 0`.
pub fn fundamental_octant(m: usize) -> Vec<Index3> {
    let m = m as i64;
    let mut out = Vec::new();
    for a in 0..=m {
        for b in 0..=a {
            for c in 0..=b {
                out.push(Index3::new(a, b, c));
            }
        }
    }
    out
}

/// Minimal kernel table radius for a box.
pub fn required_table_radius(lattice: &LatticeBox) -> usize {
    match lattice.mode() {
        BoundaryMode::Dirichlet => 2 * lattice.radius(),
        BoundaryMode::Periodic => lattice.radius(),
    }
}

/// Where a kernel came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CacheStatus {
    Cached,
    Built,
}

/// Kernels persisted on disk, keyed by `(α, table_radius, method, resolution)`.
///
/// Each entry is `<key>.lckern` plus `<key>.sha256` holding the hash of the
/// file contents; a mismatch is treated as a miss.
#[derive(Debug, Clone)]
pub struct KernelCache {
    dir: PathBuf,
}

impl KernelCache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        KernelCache { dir: dir.into() }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn key(alpha: f64, table_radius: usize, method: KernelMethod, resolution: usize) -> String {
        let desc = format!(
            "alpha={:016x};m={table_radius};method={};res={resolution}",
            alpha.to_bits(),
            method.as_str()
        );
        let digest = Sha256::digest(desc.as_bytes());
        format!("kernel-{}", &hex::encode(digest)[..16])
    }

    pub fn path_for(&self, alpha: f64, table_radius: usize, method: KernelMethod, resolution: usize) -> PathBuf {
        self.dir
            .join(format!("{}.lckern", Self::key(alpha, table_radius, method, resolution)))
    }

    pub fn load(&self, alpha: f64, table_radius: usize, method: KernelMethod, resolution: usize) -> Option<GreenKernel> {
        let path = self.path_for(alpha, table_radius, method, resolution);
        let bytes = fs::read(&path).ok()?;
        let stored = fs::read_to_string(path.with_extension("sha256")).ok()?;
        if stored.trim() != hex::encode(Sha256::digest(&bytes)) {
            return None;
        }
        let k = GreenKernel::from_bytes(&bytes, resolution).ok()?;
        (k.alpha.to_bits() == alpha.to_bits() && k.table_radius == table_radius && k.method == method)
            .then_some(k)
    }

    pub fn store(&self, kernel: &GreenKernel) -> Result<PathBuf> {
        fs::create_dir_all(&self.dir)?;
        let path = self.path_for(kernel.alpha, kernel.table_radius, kernel.method, kernel.resolution);
        let bytes = kernel.to_bytes();
        fs::write(&path, &bytes)?;
        fs::write(path.with_extension("sha256"), hex::encode(Sha256::digest(&bytes)))?;
        Ok(path)
    }

    pub fn load_or_build(
        &self,
        alpha: f64,
        table_radius: usize,
        method: KernelMethod,
        resolution: usize,
    ) -> Result<(GreenKernel, CacheStatus)> {
        if let Some(k) = self.load(alpha, table_radius, method, resolution) {
            return Ok((k, CacheStatus::Cached));
        }
        let k = build_kernel_with(alpha, table_radius, method, resolution)?;
        self.store(&k)?;
        Ok((k, CacheStatus::Built))
    }
}
