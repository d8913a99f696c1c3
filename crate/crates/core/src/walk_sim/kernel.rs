use crate::env_model::EnvSpec;
use crate::error::{Error, Result};

/// Hard cap on the length of a kernel row.
pub const KERNEL_J_CAP: usize = 10_000_000;

/// `K^ν(i, j) = C(i+j, j) ∫ a^{i+1} (1-a)^j ν(da)` for `j = 0..probs.len()`.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelRow {
    pub i: u64,
    pub probs: Vec<f64>,
    /// Mass beyond the last computed `j`.
    pub tail_mass: f64,
}

impl KernelRow {
    pub fn j_max(&self) -> usize {
        self.probs.len() - 1
    }

    /// `Σ_j f(j) K(i, j)` over the computed part of the row.
    pub fn expect<F: Fn(u64) -> f64>(&self, f: F) -> f64 {
        let mut acc = Neumaier::default();
        for (j, &p) in self.probs.iter().enumerate() {
            if p > 0.0 {
                acc.add(f(j as u64) * p);
            }
        }
        acc.total()
    }
}

#[derive(Default)]
struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn total(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Row `i` of the annealed kernel, extended in `j` until the remaining mass
/// drops below `tail_tol`.
///
/// Terms are produced by the ratio recursion in `j` of the negative binomial
/// law: in closed form for Beta laws, node by node for atomic and uniform
/// laws.
pub fn kernel_row(spec: &EnvSpec, i: u64, tail_tol: f64) -> Result<KernelRow> {
    let fi = i as f64;
    let mut probs = Vec::new();
    let mut acc = Neumaier::default();
    match spec.mixing_nodes() {
        None => {
            let EnvSpec::Beta { a, b } = spec else { unreachable!() };
            // K(i, 0) = m^{i+1, 0}
            let mut term: f64 = (0..=i).map(|t| (a + t as f64) / (a + b + t as f64)).product();
            let mut j = 0usize;
            loop {
                probs.push(term);
                acc.add(term);
                if 1.0 - acc.total() < tail_tol {
                    break;
                }
                if j >= KERNEL_J_CAP {
                    return Err(Error::TailNotConverged { i, j_max: j });
                }
                let fj = j as f64;
                term *= (fi + fj + 1.0) / (fj + 1.0) * (b + fj) / (a + b + fi + 1.0 + fj);
                j += 1;
            }
        }
        Some(nodes) => {
            let mut pmf: Vec<f64> = nodes.iter().map(|&(_, a)| a.powf(fi + 1.0)).collect();
            let mut j = 0usize;
            loop {
                let term: f64 = nodes.iter().zip(&pmf).map(|(&(w, _), p)| w * p).sum();
                probs.push(term);
                acc.add(term);
                if 1.0 - acc.total() < tail_tol {
                    break;
                }
                if j >= KERNEL_J_CAP {
                    return Err(Error::TailNotConverged { i, j_max: j });
                }
                let fj = j as f64;
                let ratio = (fi + fj + 1.0) / (fj + 1.0);
                for (p, &(_, a)) in pmf.iter_mut().zip(&nodes) {
                    *p *= ratio * (1.0 - a);
                }
                j += 1;
            }
        }
    }
    let tail_mass = (1.0 - acc.total()).max(0.0);
    Ok(KernelRow { i, probs, tail_mass })
}
