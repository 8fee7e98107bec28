//! `(R_α ∗ w)(x) = Σ_y R_α(x − y) w(y)` on a box.
//!
//! Dirichlet boxes use the linear convolution (displacements up to `2n`),
//! evaluated either directly or by a zero-padded FFT of size at least
//! `(2n+1) + (4n+1) − 1` per axis, so nothing wraps. Periodic boxes use the
//! circular convolution at the box period with the minimum-image kernel
//! `R_α(d)`, `d ∈ [−n, n]³`.

use std::sync::Arc;

use rayon::prelude::*;
use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::{required_table_radius, GreenKernel};
use crate::error::{Error, Result};
use crate::lattice::{BoundaryMode, Field, Index3, LatticeBox};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConvolutionMethod {
    Direct,
    Fft,
}

/// A kernel prepared for repeated convolutions on one box.
pub struct Convolver {
    lattice: LatticeBox,
    method: ConvolutionMethod,
    /// Kernel on the displacement cube `[-reach, reach]³`.
    block: Vec<f64>,
    reach: usize,
    fft: Option<FftState>,
}

struct FftState {
    len: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    spectrum: Vec<Complex64>,
}

impl Convolver {
    pub fn new(kernel: &GreenKernel, lattice: LatticeBox, method: ConvolutionMethod) -> Result<Self> {
        let reach = required_table_radius(&lattice);
        if kernel.table_radius() < reach {
            return Err(Error::KernelTooSmall {
                have: kernel.table_radius(),
                need: reach,
            });
        }
        let rb = LatticeBox::dirichlet(reach);
        let block: Vec<f64> = rb.sites().map(|z| kernel.value(z).unwrap()).collect();
        let fft = match method {
            ConvolutionMethod::Direct => None,
            ConvolutionMethod::Fft => Some(FftState::new(&lattice, &block, reach)),
        };
        Ok(Convolver {
            lattice,
            method,
            block,
            reach,
            fft,
        })
    }

    pub fn lattice(&self) -> &LatticeBox {
        &self.lattice
    }

    pub fn method(&self) -> ConvolutionMethod {
        self.method
    }

    pub fn apply(&self, w: &Field) -> Result<Field> {
        if w.lattice() != &self.lattice {
            return Err(Error::BoxMismatch {
                expected: self.lattice.radius(),
                found: w.lattice().radius(),
            });
        }
        let values = match &self.fft {
            Some(state) => state.apply(&self.lattice, w.values()),
            None => self.direct(w.values()),
        };
        Field::from_values(self.lattice, values)
    }

    /// `(R ∗ u, R ∗ v)`; the FFT path carries both in one complex transform.
    pub fn apply_pair(&self, u: &Field, v: &Field) -> Result<(Field, Field)> {
        for w in [u, v] {
            if w.lattice() != &self.lattice {
                return Err(Error::BoxMismatch {
                    expected: self.lattice.radius(),
                    found: w.lattice().radius(),
                });
            }
        }
        match &self.fft {
            Some(state) => {
                let (a, b) = state.apply_pair(&self.lattice, u.values(), v.values());
                Ok((Field::from_values(self.lattice, a)?, Field::from_values(self.lattice, b)?))
            }
            None => Ok((self.apply(u)?, self.apply(v)?)),
        }
    }

    fn kernel_at(&self, d: [i64; 3]) -> f64 {
        let r = self.reach as i64;
        let s = 2 * r + 1;
        self.block[(((d[0] + r) * s + (d[1] + r)) * s + (d[2] + r)) as usize]
    }

    fn direct(&self, w: &[f64]) -> Vec<f64> {
        let lattice = self.lattice;
        let n = lattice.radius() as i64;
        let side = lattice.side() as i64;
        let periodic = lattice.mode() == BoundaryMode::Periodic;
        let wrap = |c: i64| if periodic { (c + n).rem_euclid(side) - n } else { c };
        let support: Vec<(Index3, f64)> = w
            .iter()
            .enumerate()
            .filter(|(_, v)| **v != 0.0)
            .map(|(k, v)| (lattice.site(k), *v))
            .collect();
        (0..lattice.site_count())
            .into_par_iter()
            .map(|k| {
                let x = lattice.site(k);
                let mut acc = 0.0;
                for (y, wy) in &support {
                    let d = (x - *y).0.map(wrap);
                    acc += self.kernel_at(d) * wy;
                }
                acc
            })
            .collect()
    }
}

impl FftState {
    fn new(lattice: &LatticeBox, block: &[f64], reach: usize) -> Self {
        let side = lattice.side();
        let len = match lattice.mode() {
            BoundaryMode::Periodic => side,
            BoundaryMode::Dirichlet => smooth_size(side + 2 * reach),
        };
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(len);
        let inverse = planner.plan_fft_inverse(len);
        let mut spectrum = vec![Complex64::new(0.0, 0.0); len * len * len];
        let r = reach as i64;
        let bs = 2 * r + 1;
        let l = len as i64;
        for a in -r..=r {
            for b in -r..=r {
                for c in -r..=r {
                    let v = block[(((a + r) * bs + (b + r)) * bs + (c + r)) as usize];
                    let idx = ((a.rem_euclid(l) * l + b.rem_euclid(l)) * l + c.rem_euclid(l)) as usize;
                    spectrum[idx] = Complex64::new(v, 0.0);
                }
            }
        }
        let mut state = FftState {
            len,
            forward,
            inverse,
            spectrum: Vec::new(),
        };
        state.transform(&mut spectrum, true);
        state.spectrum = spectrum;
        state
    }

    fn apply(&self, lattice: &LatticeBox, w: &[f64]) -> Vec<f64> {
        self.run(lattice, w, None).0
    }

    fn apply_pair(&self, lattice: &LatticeBox, u: &[f64], v: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let (a, b) = self.run(lattice, u, Some(v));
        (a, b.unwrap())
    }

    /// The kernel is real, so `u + i v` convolves to `R ∗ u + i R ∗ v`.
    fn run(&self, lattice: &LatticeBox, u: &[f64], v: Option<&[f64]>) -> (Vec<f64>, Option<Vec<f64>>) {
        let side = lattice.side();
        let len = self.len;
        let mut buf = vec![Complex64::new(0.0, 0.0); len * len * len];
        for i in 0..side {
            for j in 0..side {
                for k in 0..side {
                    let src = (i * side + j) * side + k;
                    let im = v.map_or(0.0, |v| v[src]);
                    buf[(i * len + j) * len + k] = Complex64::new(u[src], im);
                }
            }
        }
        self.transform(&mut buf, true);
        for (b, s) in buf.iter_mut().zip(&self.spectrum) {
            *b *= s;
        }
        self.transform(&mut buf, false);
        let norm = 1.0 / (len * len * len) as f64;
        let mut re = vec![0.0; side * side * side];
        let mut im = v.map(|_| vec![0.0; side * side * side]);
        for i in 0..side {
            for j in 0..side {
                for k in 0..side {
                    let c = buf[(i * len + j) * len + k] * norm;
                    let dst = (i * side + j) * side + k;
                    re[dst] = c.re;
                    if let Some(im) = im.as_mut() {
                        im[dst] = c.im;
                    }
                }
            }
        }
        (re, im)
    }

    /// 3-D transform as three passes of 1-D transforms.
    fn transform(&self, data: &mut [Complex64], forward: bool) {
        let fft = if forward { &self.forward } else { &self.inverse };
        let len = self.len;
        // contiguous last axis
        data.par_chunks_mut(len).for_each(|row| fft.process(row));
        // middle axis: each plane is independent
        data.par_chunks_mut(len * len).for_each(|plane| {
            let mut line = vec![Complex64::new(0.0, 0.0); len];
            for k in 0..len {
                for j in 0..len {
                    line[j] = plane[j * len + k];
                }
                fft.process(&mut line);
                for j in 0..len {
                    plane[j * len + k] = line[j];
                }
            }
        });
        // first axis
        let stride = len * len;
        let lines: Vec<Vec<Complex64>> = (0..stride)
            .into_par_iter()
            .map(|jk| {
                let mut line: Vec<Complex64> = (0..len).map(|i| data[i * stride + jk]).collect();
                fft.process(&mut line);
                line
            })
            .collect();
        for (jk, line) in lines.into_iter().enumerate() {
            for (i, v) in line.into_iter().enumerate() {
                data[i * stride + jk] = v;
            }
        }
    }
}

/// Smallest integer `>= n` with no prime factor above 5.
fn smooth_size(n: usize) -> usize {
    let mut m = n.max(1);
    loop {
        let mut r = m;
        for p in [2, 3, 5] {
            while r % p == 0 {
                r /= p;
            }
        }
        if r == 1 {
            return m;
        }
        m += 1;
    }
}

/// One-shot convolution; prefer [`Convolver`] when convolving repeatedly.
pub fn convolve(kernel: &GreenKernel, w: &Field, method: ConvolutionMethod) -> Result<Field> {
    Convolver::new(kernel, *w.lattice(), method)?.apply(w)
}
