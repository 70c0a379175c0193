//! Evaluation of γ and γ_T on a rectangular (ξ, η) grid.
//!
//! Each η row is a cosine series in ξ. On a uniform ξ grid with at least as
//! many intervals as modes the row is a type-I DCT, computed with one complex
//! FFT that carries γ in the real part and γ_T in the imaginary part.

use std::f64::consts::PI;
use std::io::{self, Write};
use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::gas_phase::ParticularProfile;
use crate::model::FieldSolution;
use crate::temperature_field::temperature_from;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldGrid {
    pub xi: Vec<f64>,
    pub eta: Vec<f64>,
}

impl FieldGrid {
    pub fn new(xi: Vec<f64>, eta: Vec<f64>) -> Result<Self> {
        if xi.len() < 2 || eta.len() < 2 {
            return Err(invalid("grid", "need at least 2 points per axis"));
        }
        if xi.windows(2).any(|w| !(w[1] > w[0])) || xi[0] < 0.0 || xi[xi.len() - 1] > 1.0 {
            return Err(invalid("xi_points", "must be strictly increasing within [0, 1]"));
        }
        if eta.windows(2).any(|w| !(w[1] > w[0])) || eta[0] != 0.0 {
            return Err(invalid("eta_points", "must be strictly increasing from 0"));
        }
        Ok(Self { xi, eta })
    }

    /// `n_xi` points on `[0, 1]` and `n_eta` points on `[0, eta_top]`.
    pub fn uniform(n_xi: usize, n_eta: usize, eta_top: f64) -> Result<Self> {
        if n_xi < 2 || n_eta < 2 {
            return Err(invalid("grid", "need at least 2 points per axis"));
        }
        if !(eta_top > 0.0) {
            return Err(invalid("eta_top", "must be positive"));
        }
        let lx = (n_xi - 1) as f64;
        let le = (n_eta - 1) as f64;
        Self::new(
            (0..n_xi).map(|k| k as f64 / lx).collect(),
            (0..n_eta).map(|j| eta_top * j as f64 / le).collect(),
        )
    }

    fn is_uniform_unit_xi(&self) -> bool {
        let l = (self.xi.len() - 1) as f64;
        self.xi.iter().enumerate().all(|(k, &x)| (x - k as f64 / l).abs() <= 1e-12)
    }
}

/// γ and γ_T on a grid, stored by η row (ξ varies fastest).
#[derive(Debug, Clone, PartialEq)]
pub struct FieldValues {
    pub xi: Vec<f64>,
    pub eta: Vec<f64>,
    gamma: Vec<f64>,
    gamma_t: Vec<f64>,
}

impl FieldValues {
    pub fn zeros(grid: &FieldGrid) -> Self {
        let n = grid.xi.len() * grid.eta.len();
        Self {
            xi: grid.xi.clone(),
            eta: grid.eta.clone(),
            gamma: vec![0.0; n],
            gamma_t: vec![0.0; n],
        }
    }

    pub fn set(&mut self, j: usize, k: usize, gamma: f64, gamma_t: f64) {
        let i = j * self.xi.len() + k;
        self.gamma[i] = gamma;
        self.gamma_t[i] = gamma_t;
    }

    pub fn gamma_at(&self, j: usize, k: usize) -> f64 {
        self.gamma[j * self.xi.len() + k]
    }

    pub fn gamma_t_at(&self, j: usize, k: usize) -> f64 {
        self.gamma_t[j * self.xi.len() + k]
    }

    pub fn temperature_at(&self, j: usize, k: usize) -> f64 {
        temperature_from(self.gamma_at(j, k), self.gamma_t_at(j, k))
    }

    pub fn gamma_row(&self, j: usize) -> &[f64] {
        &self.gamma[j * self.xi.len()..(j + 1) * self.xi.len()]
    }

    /// CSV dump with header `xi,eta,gamma,gamma_T,T`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "xi,eta,gamma,gamma_T,T")?;
        for j in 0..self.eta.len() {
            for k in 0..self.xi.len() {
                writeln!(
                    out,
                    "{},{},{},{},{}",
                    self.xi[k],
                    self.eta[j],
                    self.gamma_at(j, k),
                    self.gamma_t_at(j, k),
                    self.temperature_at(j, k)
                )?;
            }
        }
        Ok(())
    }
}

/// Reusable grid evaluator; holds the FFT plan for the grid.
pub struct GridEvaluator {
    grid: FieldGrid,
    fft: Option<Arc<dyn Fft<f64>>>,
}

impl std::fmt::Debug for GridEvaluator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("GridEvaluator")
            .field("n_xi", &self.grid.xi.len())
            .field("n_eta", &self.grid.eta.len())
            .field("fft", &self.fft.is_some())
            .finish()
    }
}

/// Row amplitudes: constants and per-mode amplitudes of γ and γ_T.
struct RowAmplitudes {
    a: f64,
    a_t: f64,
    b: Vec<f64>,
    b_t: Vec<f64>,
    decay: Vec<f64>,
}

impl RowAmplitudes {
    fn new(n_sections: usize, n_modes: usize) -> Self {
        Self {
            a: 0.0,
            a_t: 0.0,
            b: vec![0.0; n_modes],
            b_t: vec![0.0; n_modes],
            decay: vec![0.0; n_sections],
        }
    }

    /// `exact` sections enter through the profile table; the rest add their
    /// truncated particular modes here.
    fn fill(&mut self, sol: &FieldSolution, table: &ProfileTable, eta: f64) {
        let delta = sol.spray.delta_coeff();
        let (gas, temp) = (&sol.gas, &sol.temp);
        self.a = gas.c20;
        self.a_t = temp.c20p;
        for &i in table.exact.iter().chain(&table.truncated) {
            self.decay[i] = (-delta[i] * eta).exp();
        }
        for &i in &table.truncated {
            self.a += 0.5 * gas.b0[i] * self.decay[i];
            self.a_t += 0.5 * temp.b0p[i] * self.decay[i];
        }
        for m in 0..self.b.len() {
            let eq = (gas.q[m] * eta).exp();
            self.b[m] = gas.c2n[m] * eq;
            self.b_t[m] = temp.c2np[m] * eq;
        }
        for &i in &table.truncated {
            let e = self.decay[i];
            for ((dst, dst_t), (bn, bnp)) in self
                .b
                .iter_mut()
                .zip(self.b_t.iter_mut())
                .zip(gas.bn.row(i).iter().zip(temp.bnp.row(i)))
            {
                *dst += bn * e;
                *dst_t += bnp * e;
            }
        }
    }
}

/// Closed-form particular profiles tabulated on the ξ grid, and the sections
/// that keep the truncated series instead.
struct ProfileTable {
    exact: Vec<usize>,
    truncated: Vec<usize>,
    gas: Vec<Vec<f64>>,
    temp: Vec<Vec<f64>>,
}

impl ProfileTable {
    fn new(sol: &FieldSolution, xi: &[f64]) -> Self {
        let active = (0..sol.spray.n_sections()).filter(|&i| sol.gas.b0[i] != 0.0 || sol.gas.bn.row(i).iter().any(|&v| v != 0.0));
        let (exact, truncated): (Vec<usize>, Vec<usize>) = active.partition(|&i| sol.gas.profiles[i].is_some());
        let tab = |p: &Option<ParticularProfile>| xi.iter().map(|&x| p.map_or(0.0, |p| p.eval(x))).collect::<Vec<f64>>();
        Self {
            gas: exact.iter().map(|&i| tab(&sol.gas.profiles[i])).collect(),
            temp: exact.iter().map(|&i| tab(&sol.temp.profiles[i])).collect(),
            exact,
            truncated,
        }
    }

    fn add(&self, row: &RowAmplitudes, g: &mut [f64], gt: &mut [f64]) {
        for (s, &i) in self.exact.iter().enumerate() {
            let e = row.decay[i];
            for ((dst, dst_t), (p, pt)) in g.iter_mut().zip(gt.iter_mut()).zip(self.gas[s].iter().zip(&self.temp[s])) {
                *dst += p * e;
                *dst_t += pt * e;
            }
        }
    }
}

impl GridEvaluator {
    pub fn new(grid: FieldGrid) -> Self {
        let fft = if grid.is_uniform_unit_xi() {
            let len = 2 * (grid.xi.len() - 1);
            Some(FftPlanner::new().plan_fft_forward(len))
        } else {
            None
        };
        Self { grid, fft }
    }

    pub fn grid(&self) -> &FieldGrid {
        &self.grid
    }

    /// Whether solutions with `n_modes` modes take the FFT path.
    pub fn uses_fft(&self, n_modes: usize) -> bool {
        self.fft.is_some() && self.grid.xi.len() - 1 >= n_modes
    }

    pub fn evaluate(&self, sol: &FieldSolution) -> FieldValues {
        match &self.fft {
            Some(fft) if self.uses_fft(sol.n_modes()) => self.evaluate_fft(sol, fft.as_ref()),
            _ => self.evaluate_direct(sol),
        }
    }

    /// Plain cosine sums; reference path for any grid.
    pub fn evaluate_direct(&self, sol: &FieldSolution) -> FieldValues {
        let m = sol.n_modes();
        let nx = self.grid.xi.len();
        let mut cos_table = vec![0.0; m * nx];
        for n in 0..m {
            let w = (n + 1) as f64 * PI;
            for (k, &x) in self.grid.xi.iter().enumerate() {
                cos_table[n * nx + k] = (w * x).cos();
            }
        }
        let table = ProfileTable::new(sol, &self.grid.xi);
        let mut row = RowAmplitudes::new(sol.spray.n_sections(), m);
        let mut values = FieldValues::zeros(&self.grid);
        let mut g = vec![0.0; nx];
        let mut gt = vec![0.0; nx];
        for (j, &eta) in self.grid.eta.iter().enumerate() {
            row.fill(sol, &table, eta);
            g.fill(row.a);
            gt.fill(row.a_t);
            for n in 0..m {
                let (b, bt) = (row.b[n], row.b_t[n]);
                let cos = &cos_table[n * nx..(n + 1) * nx];
                for k in 0..nx {
                    g[k] += b * cos[k];
                    gt[k] += bt * cos[k];
                }
            }
            table.add(&row, &mut g, &mut gt);
            for k in 0..nx {
                values.set(j, k, g[k], gt[k]);
            }
        }
        values
    }

    fn evaluate_fft(&self, sol: &FieldSolution, fft: &dyn Fft<f64>) -> FieldValues {
        let m = sol.n_modes();
        let nx = self.grid.xi.len();
        let l = nx - 1;
        let table = ProfileTable::new(sol, &self.grid.xi);
        let mut row = RowAmplitudes::new(sol.spray.n_sections(), m);
        let mut values = FieldValues::zeros(&self.grid);
        let mut g = vec![0.0; nx];
        let mut gt = vec![0.0; nx];
        let mut buf = vec![Complex64::new(0.0, 0.0); 2 * l];
        let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
        for (j, &eta) in self.grid.eta.iter().enumerate() {
            row.fill(sol, &table, eta);
            buf.fill(Complex64::new(0.0, 0.0));
            let x0 = Complex64::new(row.a, row.a_t);
            buf[0] = x0;
            for n in 1..=m {
                let v = Complex64::new(row.b[n - 1], row.b_t[n - 1]);
                buf[n] = v;
                if n < l {
                    buf[2 * l - n] = v;
                }
            }
            let xl = buf[l];
            fft.process_with_scratch(&mut buf, &mut scratch);
            for k in 0..nx {
                let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                let v = (buf[k] + x0 + xl * sign) * 0.5;
                g[k] = v.re;
                gt[k] = v.im;
            }
            table.add(&row, &mut g, &mut gt);
            for k in 0..nx {
                values.set(j, k, g[k], gt[k]);
            }
        }
        values
    }
}
