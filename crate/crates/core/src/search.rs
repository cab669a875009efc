//! Randomized hill climbing of the deviation target over the Grassmannian,
//! and accumulation of the extremal subspaces it finds up to signed
//! coordinate permutations.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numeric::{largest_angle, orthonormalize, target, FMatrix, Subspace, Target};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SearchConfig {
    /// Restarts without a new class before the accumulation stops.
    pub attempts: usize,
    /// Cosine-scale extremality tolerance.
    pub eps: f64,
    pub m_init: f64,
    pub decay: f64,
    pub max_steps: usize,
    pub min_magnitude: f64,
    pub seed: u64,
    /// Largest principal angle under which two subspaces are the same class.
    pub equiv_tol: f64,
    /// Restarts run concurrently per batch. Does not affect results.
    pub batch: usize,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            attempts: 200,
            eps: 1e-4,
            m_init: 0.5,
            decay: 0.995,
            max_steps: 100_000,
            min_magnitude: 1e-9,
            seed: 0,
            equiv_tol: 1e-3,
            batch: 32,
        }
    }
}

impl SearchConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidArgument(m.into()));
        if self.attempts == 0 {
            return bad("attempts must be at least 1");
        }
        if !(self.eps > 0.0 && self.eps < 1.0) {
            return bad("eps must lie in (0, 1)");
        }
        if !(self.m_init > 0.0) {
            return bad("initial magnitude must be positive");
        }
        if !(self.decay > 0.0 && self.decay < 1.0) {
            return bad("decay must lie in (0, 1)");
        }
        if !(self.min_magnitude >= 0.0) {
            return bad("min magnitude must be non-negative");
        }
        if !(self.equiv_tol > 0.0) {
            return bad("equivalence tolerance must be positive");
        }
        if self.batch == 0 {
            return bad("batch must be at least 1");
        }
        Ok(())
    }
}

fn check_shape(n: usize, k: usize) -> Result<()> {
    if k == 0 || k >= n {
        return Err(Error::InvalidArgument(format!("need n > k > 0, got n={n} k={k}")));
    }
    Ok(())
}

fn gaussian(rows: usize, cols: usize, rng: &mut impl Rng) -> FMatrix {
    FMatrix::from_fn(rows, cols, |_, _| rng.sample::<f64, _>(StandardNormal))
}

/// Uniformly distributed point of the Grassmannian: the column space of an
/// n×k standard normal matrix.
pub fn sample_uniform(n: usize, k: usize, rng: &mut impl Rng) -> Result<Subspace> {
    check_shape(n, k)?;
    loop {
        if let Ok(s) = orthonormalize(&gaussian(n, k, rng)) {
            return Ok(s);
        }
    }
}

/// `orthonormalize(A + M·G)` with fresh standard normal `G`.
pub fn perturb(a: &Subspace, magnitude: f64, rng: &mut impl Rng) -> Subspace {
    let b = a.basis();
    loop {
        let g = gaussian(b.rows(), b.cols(), rng);
        if let Ok(s) = orthonormalize(&b.add(&g.scale(magnitude))) {
            return s;
        }
    }
}

/// Result of one hill climb.
#[derive(Clone, Debug)]
pub struct Optimized {
    pub subspace: Subspace,
    pub target: Target,
    pub steps: usize,
}

/// Hill climbing: a proposal is accepted only when it strictly increases the
/// target angle, otherwise the magnitude decays.
pub fn optimize(a: &Subspace, cfg: &SearchConfig, rng: &mut impl Rng) -> Result<Optimized> {
    let mut current = a.clone();
    let mut best = target(&current)?;
    let mut magnitude = cfg.m_init;
    let mut steps = 0;
    while magnitude >= cfg.min_magnitude && steps < cfg.max_steps {
        steps += 1;
        let candidate = perturb(&current, magnitude, rng);
        let t = target(&candidate)?;
        if t.angle > best.angle {
            current = candidate;
            best = t;
        } else {
            magnitude *= cfg.decay;
        }
    }
    Ok(Optimized {
        subspace: current,
        target: best,
        steps,
    })
}

/// RNG of one restart: the run seed on stream `index`.
pub fn restart_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// One restart: sample then optimize, on the restart's own RNG.
pub fn restart(n: usize, k: usize, cfg: &SearchConfig, index: u64) -> Result<Optimized> {
    let mut rng = restart_rng(cfg.seed, index);
    let start = sample_uniform(n, k, &mut rng)?;
    optimize(&start, cfg, &mut rng)
}

/// Whether some signed coordinate permutation maps `col(a)` to within
/// largest principal angle `tol` of `col(b)`.
pub fn symmetry_equivalent(a: &Subspace, b: &Subspace, tol: f64) -> bool {
    find_signed_permutation(a, b, tol).is_some()
}

/// A signed permutation `(perm, signs)` as in [`Subspace::signed_permuted`]
/// carrying `a` onto `b` within `tol`.
pub fn find_signed_permutation(
    a: &Subspace,
    b: &Subspace,
    tol: f64,
) -> Option<(Vec<usize>, Vec<f64>)> {
    if a.ambient() != b.ambient() || a.dim() != b.dim() {
        return None;
    }
    let pa = a.projector();
    let pb = b.projector();
    // entrywise bound on the projector difference at largest angle `tol`
    let delta = tol.min(std::f64::consts::FRAC_PI_2).sin() + 1e-9;
    let mut matcher = Matcher {
        n: a.ambient(),
        pa,
        pb,
        delta,
        profiles_a: Vec::new(),
        profiles_b: Vec::new(),
        a,
        b,
        tol,
    };
    matcher.profiles_a = profiles(&matcher.pa);
    matcher.profiles_b = profiles(&matcher.pb);
    let mut perm = Vec::with_capacity(matcher.n);
    let mut used = vec![false; matcher.n];
    matcher.extend(&mut perm, &mut used)
}

/// Sorted absolute row entries, the diagonal first.
fn profiles(p: &FMatrix) -> Vec<Vec<f64>> {
    (0..p.rows())
        .map(|i| {
            let mut off: Vec<f64> = (0..p.cols()).filter(|&j| j != i).map(|j| p[(i, j)].abs()).collect();
            off.sort_by(f64::total_cmp);
            let mut row = vec![p[(i, i)]];
            row.extend(off);
            row
        })
        .collect()
}

struct Matcher<'a> {
    n: usize,
    pa: FMatrix,
    pb: FMatrix,
    delta: f64,
    profiles_a: Vec<Vec<f64>>,
    profiles_b: Vec<Vec<f64>>,
    a: &'a Subspace,
    b: &'a Subspace,
    tol: f64,
}

impl Matcher<'_> {
    fn close(&self, x: f64, y: f64) -> bool {
        (x - y).abs() <= self.delta
    }

    fn compatible(&self, perm: &[usize], i: usize, j: usize) -> bool {
        let (pa, pb) = (&self.pa, &self.pb);
        self.profiles_a[i]
            .iter()
            .zip(&self.profiles_b[j])
            .all(|(x, y)| self.close(*x, *y))
            && perm
                .iter()
                .enumerate()
                .all(|(u, &v)| self.close(pa[(i, u)].abs(), pb[(j, v)].abs()))
    }

    fn extend(&self, perm: &mut Vec<usize>, used: &mut [bool]) -> Option<(Vec<usize>, Vec<f64>)> {
        let i = perm.len();
        if i == self.n {
            return self.with_signs(perm);
        }
        for j in 0..self.n {
            if used[j] || !self.compatible(perm, i, j) {
                continue;
            }
            used[j] = true;
            perm.push(j);
            let found = self.extend(perm, used);
            perm.pop();
            used[j] = false;
            if found.is_some() {
                return found;
            }
        }
        None
    }

    /// Signs propagated along the largest entries, then the exact angle test.
    fn with_signs(&self, perm: &[usize]) -> Option<(Vec<usize>, Vec<f64>)> {
        let n = self.n;
        let mut signs = vec![0.0; n];
        for start in 0..n {
            if signs[start] != 0.0 {
                continue;
            }
            signs[start] = 1.0;
            let mut stack = vec![start];
            while let Some(i) = stack.pop() {
                for j in 0..n {
                    let a = self.pa[(i, j)];
                    if signs[j] == 0.0 && a.abs() > self.delta {
                        let b = self.pb[(perm[i], perm[j])];
                        signs[j] = if a * b * signs[i] >= 0.0 { 1.0 } else { -1.0 };
                        stack.push(j);
                    }
                }
            }
        }
        let moved = self.a.signed_permuted(perm, &signs);
        match largest_angle(&moved, self.b) {
            Ok(angle) if angle <= self.tol => Some((perm.to_vec(), signs)),
            _ => None,
        }
    }
}

/// An accepted extremal subspace.
#[derive(Clone, Debug, Serialize)]
pub struct Member {
    pub restart: u64,
    pub target_cos: f64,
    pub basis: FMatrix,
    #[serde(skip)]
    pub subspace: Subspace,
}

/// Subspaces with `cos(target)` within `eps` of `1/√n`, pairwise
/// inequivalent under signed coordinate permutations.
#[derive(Clone, Debug, Default, Serialize)]
pub struct ExtremalSet {
    pub members: Vec<Member>,
    pub restarts: u64,
}

impl ExtremalSet {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains_equivalent(&self, s: &Subspace, tol: f64) -> bool {
        self.members.iter().any(|m| symmetry_equivalent(&m.subspace, s, tol))
    }
}

/// A subspace whose every coordinate subspace is farther than the
/// hypothesized bound.
#[derive(Clone, Debug, Serialize)]
pub struct HypothesisViolation {
    pub restart: u64,
    pub target_cos: f64,
    pub bound_cos: f64,
    pub basis: FMatrix,
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum SearchOutcome {
    Extremal(ExtremalSet),
    Violation(HypothesisViolation),
}

/// Repeats restarts until `attempts` consecutive restarts add no new
/// class. Restarts run in parallel batches and are merged in index order,
/// so the outcome depends only on the configuration.
pub fn accumulate(n: usize, k: usize, cfg: &SearchConfig) -> Result<SearchOutcome> {
    check_shape(n, k)?;
    cfg.validate()?;
    let bound = 1.0 / (n as f64).sqrt();
    let mut set = ExtremalSet::default();
    let mut remaining = cfg.attempts;
    let mut next: u64 = 0;
    while remaining > 0 {
        let width = cfg.batch.min(remaining) as u64;
        let results: Vec<Result<Optimized>> = (next..next + width)
            .into_par_iter()
            .map(|i| restart(n, k, cfg, i))
            .collect();
        for (offset, result) in results.into_iter().enumerate() {
            let index = next + offset as u64;
            let opt = result?;
            set.restarts = index + 1;
            let t = opt.target.cos;
            if t < bound - cfg.eps {
                return Ok(SearchOutcome::Violation(HypothesisViolation {
                    restart: index,
                    target_cos: t,
                    bound_cos: bound,
                    basis: opt.subspace.basis().clone(),
                }));
            }
            if (t - bound).abs() <= cfg.eps && !set.contains_equivalent(&opt.subspace, cfg.equiv_tol) {
                set.members.push(Member {
                    restart: index,
                    target_cos: t,
                    basis: opt.subspace.basis().clone(),
                    subspace: opt.subspace,
                });
                remaining = cfg.attempts;
            } else {
                remaining -= 1;
            }
            if remaining == 0 {
                break;
            }
        }
        next += width;
    }
    Ok(SearchOutcome::Extremal(set))
}
