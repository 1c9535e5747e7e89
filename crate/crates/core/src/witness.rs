//! Search for product projector pairs `P₁P₂` whose coincidence probability
//! differs between a pure state and its decohered mixture over the beable
//! branches.
//!
//! Candidates are rank-one projectors `|a⟩⟨a| ⊗ |b⟩⟨b|`, with `b` on the
//! beable's subsystems and `a` on the remaining ones (or a chosen subset).
//! For such a pair, with unnormalized branches `φ_i = (Q_i ⊗ 1)|Ψ⟩` and
//! `c_i = (⟨a| ⊗ ⟨b| ⊗ 1) φ_i`,
//!
//! ```text
//! interference = ‖Σ_i c_i‖² − Σ_i ‖c_i‖²
//! ```

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::linalg::{self, CVector, C64, ZERO};
use crate::qstate::{branch_decompose, project};
use crate::rng::{domain, StreamKey};
use crate::{BeableObservable, Error, Ket, Projector, Result};

pub const NO_COHERENCE_NOTE: &str = "no coherence to witness: fewer than two branches above the branch threshold";

/// Default search effort.
pub const DEFAULT_RESTARTS: usize = 8;
pub const DEFAULT_STEPS: usize = 200;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WitnessResult {
    pub p1: Projector,
    pub p2: Projector,
    /// `|interference_term(ψ, beable, p1, p2)|`.
    pub gap: f64,
    /// Sign-carrying interference value at the returned pair.
    pub interference: f64,
    pub iterations: usize,
    pub restart: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

/// Precomputed branch vectors and offset tables for fast evaluation.
struct Objective {
    /// Offsets of the joint `(S₁, S₂)` index, `S₁` most significant.
    joint: Vec<usize>,
    rest: Vec<usize>,
    branches: Vec<CVector>,
    d1: usize,
    d2: usize,
}

impl Objective {
    fn new(psi: &Ket, beable: &BeableObservable, s1: &[String]) -> Result<Self> {
        let layout = psi.layout();
        let s2 = beable.support();
        let joint_support: Vec<String> = s1.iter().chain(s2).cloned().collect();
        let joint = layout.offsets(&joint_support)?;
        let rest = layout.offsets(&layout.complement(&joint_support))?;
        let branches = beable.projectors().iter().map(|q| project(psi, q)).collect::<Result<Vec<_>>>()?;
        Ok(Objective { joint, rest, branches, d1: layout.dim_of_set(s1)?, d2: layout.dim_of_set(s2)? })
    }

    /// `c_i` for every branch.
    fn contractions(&self, a: &[C64], b: &[C64]) -> Vec<Vec<C64>> {
        self.branches
            .iter()
            .map(|phi| {
                self.rest
                    .iter()
                    .map(|&r| {
                        let mut acc = ZERO;
                        for (x, ax) in a.iter().enumerate() {
                            let mut inner = ZERO;
                            for (y, by) in b.iter().enumerate() {
                                inner += by.conj() * phi[self.joint[x * self.d2 + y] + r];
                            }
                            acc += ax.conj() * inner;
                        }
                        acc
                    })
                    .collect()
            })
            .collect()
    }

    /// `‖Σ c_i‖² − Σ ‖c_i‖²` for unit `a`, `b`.
    fn value(&self, a: &[C64], b: &[C64]) -> f64 {
        let cs = self.contractions(a, b);
        let mut total = 0.0;
        let mut diag = 0.0;
        for k in 0..self.rest.len() {
            let s: C64 = cs.iter().map(|c| c[k]).sum();
            total += s.norm_sqr();
            diag += cs.iter().map(|c| c[k].norm_sqr()).sum::<f64>();
        }
        total - diag
    }

    /// `2 Σ_{i<j} Re(c̄_i c_j)`, the cross terms written out pairwise.
    fn cross_terms(&self, a: &[C64], b: &[C64]) -> f64 {
        let cs = self.contractions(a, b);
        let mut acc = 0.0;
        for i in 0..cs.len() {
            for j in i + 1..cs.len() {
                acc += 2.0 * cs[i].iter().zip(&cs[j]).map(|(x, y)| (x.conj() * y).re).sum::<f64>();
            }
        }
        acc
    }
}

/// Real parameter vector → pair of unit complex vectors.
fn unpack(x: &[f64], d1: usize, d2: usize) -> (Vec<C64>, Vec<C64>) {
    let to_unit = |p: &[f64]| {
        let v: Vec<C64> = p.chunks(2).map(|c| C64::new(c[0], c[1])).collect();
        let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        v.into_iter().map(|z| z / n).collect::<Vec<_>>()
    };
    (to_unit(&x[..2 * d1]), to_unit(&x[2 * d1..2 * (d1 + d2)]))
}

fn renormalize(x: &mut [f64], d1: usize) {
    let (a, b) = x.split_at_mut(2 * d1);
    for part in [a, b] {
        let n = part.iter().map(|v| v * v).sum::<f64>().sqrt();
        if n > 0.0 {
            part.iter_mut().for_each(|v| *v /= n);
        }
    }
}

struct Climb {
    x: Vec<f64>,
    value: f64,
    iterations: usize,
}

const FD_STEP: f64 = 1e-6;
const INITIAL_STEP: f64 = 0.5;
const STEP_DECAY: f64 = 0.97;
const MIN_STEP: f64 = 1e-10;

/// Finite-difference ascent on `|value|` from a random start.
fn climb(obj: &Objective, steps: usize, key: StreamKey, restart: usize) -> Climb {
    let (d1, d2) = (obj.d1, obj.d2);
    let n = 2 * (d1 + d2);
    let f = |x: &[f64]| {
        let (a, b) = unpack(x, d1, d2);
        obj.value(&a, &b).abs()
    };
    let mut rng = key.rng(restart as u64);
    let mut x: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
    renormalize(&mut x, d1);
    let mut fx = f(&x);
    let mut eta = INITIAL_STEP;
    let mut iterations = 0;
    for _ in 0..steps {
        if eta < MIN_STEP {
            break;
        }
        iterations += 1;
        let mut grad = vec![0.0; n];
        let mut probe = x.clone();
        for k in 0..n {
            probe[k] = x[k] + FD_STEP;
            let up = f(&probe);
            probe[k] = x[k] - FD_STEP;
            let down = f(&probe);
            probe[k] = x[k];
            grad[k] = (up - down) / (2.0 * FD_STEP);
        }
        let gnorm = grad.iter().map(|g| g * g).sum::<f64>().sqrt();
        if gnorm < 1e-14 {
            break;
        }
        let mut candidate: Vec<f64> = x.iter().zip(&grad).map(|(xi, gi)| xi + eta * gi / gnorm).collect();
        renormalize(&mut candidate, d1);
        let fc = f(&candidate);
        if fc > fx {
            x = candidate;
            fx = fc;
        } else {
            eta *= 0.5;
        }
        eta *= STEP_DECAY;
    }
    Climb { x, value: fx, iterations }
}

fn default_p1_support(psi: &Ket, beable: &BeableObservable) -> Vec<String> {
    psi.layout().complement(beable.support())
}

fn check_p1_support(psi: &Ket, beable: &BeableObservable, s1: &[String]) -> Result<()> {
    psi.layout().check_labels(s1)?;
    if s1.is_empty() {
        return Err(Error::InvalidArgument("witness needs at least one subsystem outside the beable".into()));
    }
    if s1.iter().any(|l| beable.support().contains(l)) {
        return Err(Error::InvalidArgument("P1 support overlaps the beable support".into()));
    }
    Ok(())
}

fn basis_projector(support: Vec<String>, dim: usize) -> Result<Projector> {
    Projector::basis(support, dim, &[0])
}

/// Random-restart hill climbing over rank-one pairs with `P₂` on the
/// beable's subsystems and `P₁` on all the others.
pub fn optimize_witness(psi: &Ket, beable: &BeableObservable, restarts: usize, steps: usize, seed: u64) -> Result<WitnessResult> {
    let s1 = default_p1_support(psi, beable);
    optimize_witness_on(psi, beable, &s1, restarts, steps, seed)
}

/// [`optimize_witness`] with `P₁` restricted to the labels `s1`.
pub fn optimize_witness_on(
    psi: &Ket,
    beable: &BeableObservable,
    s1: &[String],
    restarts: usize,
    steps: usize,
    seed: u64,
) -> Result<WitnessResult> {
    beable.check_in(psi.layout())?;
    check_p1_support(psi, beable, s1)?;
    if restarts == 0 {
        return Err(Error::InvalidArgument("at least one restart is required".into()));
    }
    let layout = psi.layout();
    let (d1, d2) = (layout.dim_of_set(s1)?, beable.dim());
    let branches = branch_decompose(psi, beable)?;
    if branches.len() < 2 {
        return Ok(WitnessResult {
            p1: basis_projector(s1.to_vec(), d1)?,
            p2: basis_projector(beable.support().to_vec(), d2)?,
            gap: 0.0,
            interference: 0.0,
            iterations: 0,
            restart: 0,
            certificate: None,
            note: Some(NO_COHERENCE_NOTE.to_string()),
        });
    }
    let obj = Objective::new(psi, beable, s1)?;
    let key = StreamKey::new(seed, domain::WITNESS);
    let climbs: Vec<Climb> = (0..restarts).into_par_iter().map(|r| climb(&obj, steps, key, r)).collect();
    let mut best = 0;
    for (r, c) in climbs.iter().enumerate() {
        if c.value > climbs[best].value {
            best = r;
        }
    }
    let winner = &climbs[best];
    let (a, b) = unpack(&winner.x, d1, d2);
    let interference = obj.value(&a, &b);
    let to_vec = |v: &[C64]| CVector::from_column_slice(v);
    Ok(WitnessResult {
        p1: Projector::rank_one(s1.to_vec(), &to_vec(&a))?,
        p2: Projector::rank_one(beable.support().to_vec(), &to_vec(&b))?,
        gap: interference.abs(),
        interference,
        iterations: climbs.iter().map(|c| c.iterations).sum(),
        restart: best,
        certificate: None,
        note: None,
    })
}

/// Largest supported factor dimension for the exhaustive grid.
pub const GRID_MAX_DIM: usize = 4;
const GRID_MAX_EVALUATIONS: u128 = 1 << 32;

/// Unit vectors up to global phase on a hyperspherical grid: `d − 1`
/// magnitude angles in `[0, π/2]` (endpoints included) and `d − 1` phases
/// in `[0, 2π)`, `resolution` points per angle.
fn grid_vectors(d: usize, resolution: usize) -> Vec<Vec<C64>> {
    let mags: Vec<f64> = (0..resolution)
        .map(|t| std::f64::consts::FRAC_PI_2 * t as f64 / (resolution - 1) as f64)
        .collect();
    let phases: Vec<f64> = (0..resolution).map(|t| std::f64::consts::TAU * t as f64 / resolution as f64).collect();
    let mut out = Vec::new();
    let n_angles = 2 * (d - 1);
    let total = resolution.pow(n_angles as u32);
    let mut digits = vec![0usize; n_angles];
    for idx in 0..total {
        let mut rem = idx;
        for dg in digits.iter_mut() {
            *dg = rem % resolution;
            rem /= resolution;
        }
        let mut v = Vec::with_capacity(d);
        let mut sin_prod = 1.0;
        for k in 0..d {
            let magnitude = if k + 1 < d {
                let alpha = mags[digits[k]];
                let m = sin_prod * alpha.cos();
                sin_prod *= alpha.sin();
                m
            } else {
                sin_prod
            };
            let phase = if k == 0 { 0.0 } else { phases[digits[d - 1 + k - 1]] };
            v.push(C64::from_polar(magnitude, phase));
        }
        out.push(v);
    }
    out
}

/// Exhaustive lower bound on the best `|interference|` over a deterministic
/// grid of rank-one pairs, `P₂` on the beable's subsystems and `P₁` on all
/// others. Both joint dimensions must be at most [`GRID_MAX_DIM`].
pub fn grid_certificate(psi: &Ket, beable: &BeableObservable, resolution: usize) -> Result<f64> {
    let s1 = default_p1_support(psi, beable);
    grid_certificate_on(psi, beable, &s1, resolution)
}

/// [`grid_certificate`] with `P₁` restricted to the labels `s1`.
pub fn grid_certificate_on(psi: &Ket, beable: &BeableObservable, s1: &[String], resolution: usize) -> Result<f64> {
    beable.check_in(psi.layout())?;
    check_p1_support(psi, beable, s1)?;
    let (d1, d2) = (psi.layout().dim_of_set(s1)?, beable.dim());
    if d1 > GRID_MAX_DIM || d2 > GRID_MAX_DIM {
        return Err(Error::InvalidArgument(format!(
            "grid certificate is exhaustive only up to dimension {GRID_MAX_DIM} per side (got {d1} and {d2})"
        )));
    }
    if resolution < 2 {
        return Err(Error::InvalidArgument("grid resolution must be at least 2".into()));
    }
    let points = |d: usize| (resolution as u128).pow(2 * (d as u32 - 1));
    if points(d1) * points(d2) > GRID_MAX_EVALUATIONS {
        return Err(Error::InvalidArgument(format!("grid at resolution {resolution} is too large to enumerate")));
    }
    let obj = Objective::new(psi, beable, s1)?;
    let grid1 = grid_vectors(d1, resolution);
    let grid2 = grid_vectors(d2, resolution);
    let best = grid1
        .par_iter()
        .map(|a| grid2.iter().map(|b| obj.cross_terms(a, b).abs()).fold(0.0, f64::max))
        .reduce(|| 0.0, f64::max);
    Ok(best)
}

/// `|interference|` for explicit unit vectors, via the pairwise cross terms.
pub fn cross_term_value(psi: &Ket, beable: &BeableObservable, a: &CVector, b: &CVector) -> Result<f64> {
    let s1 = default_p1_support(psi, beable);
    let obj = Objective::new(psi, beable, &s1)?;
    let na = linalg::norm_sqr(a).sqrt();
    let nb = linalg::norm_sqr(b).sqrt();
    let a: Vec<C64> = a.iter().map(|z| z / na).collect();
    let b: Vec<C64> = b.iter().map(|z| z / nb).collect();
    Ok(obj.cross_terms(&a, &b))
}
