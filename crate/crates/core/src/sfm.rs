//! Submodular function minimization.
//!
//! Two backends: exhaustive enumeration for small ground sets, and the
//! Fujishige–Wolfe minimum-norm-point method over the base polytope. Both
//! work on integer-valued functions, so the min-norm iterate certifies
//! optimality once the duality gap drops below one half.

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

/// Largest ground set the exhaustive backend accepts.
pub const EXHAUSTIVE_LIMIT: usize = 22;

/// Ground sets up to this size use enumeration under [`Backend::Auto`].
pub const AUTO_EXHAUSTIVE_MAX: usize = 10;

/// An integer-valued set function on `{0, ..., ground_size - 1}`.
pub trait SetFunction {
    fn ground_size(&self) -> usize;

    fn eval(&self, members: &[bool]) -> i128;

    /// Values of every prefix of `order`, starting with the empty prefix.
    fn chain(&self, order: &[usize]) -> Vec<i128> {
        let mut members = vec![false; self.ground_size()];
        let mut values = Vec::with_capacity(order.len() + 1);
        values.push(self.eval(&members));
        for &e in order {
            members[e] = true;
            values.push(self.eval(&members));
        }
        values
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Backend {
    Exhaustive,
    MinNormPoint,
    #[default]
    Auto,
}

impl Backend {
    fn resolve(self, ground: usize) -> Backend {
        match self {
            Backend::Auto if ground <= AUTO_EXHAUSTIVE_MAX => Backend::Exhaustive,
            Backend::Auto => Backend::MinNormPoint,
            other => other,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SfmError {
    #[error("ground set of size {0} is too large for exhaustive minimization")]
    TooLarge(usize),
    #[error("minimum-norm-point iteration stalled with duality gap {gap}")]
    NotConverged { gap: f64 },
}

/// A minimizer and the minimum value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Minimum {
    pub members: Vec<bool>,
    pub value: i128,
}

impl Minimum {
    pub fn elements(&self) -> impl Iterator<Item = usize> + '_ {
        self.members
            .iter()
            .enumerate()
            .filter(|(_, &m)| m)
            .map(|(i, _)| i)
    }
}

/// Some minimizer of `f`.
pub fn minimize<F: SetFunction + ?Sized>(f: &F, backend: Backend) -> Result<Minimum, SfmError> {
    match backend.resolve(f.ground_size()) {
        Backend::Exhaustive => Ok(exhaustive(f)?.smallest),
        _ => Ok(min_norm_point(f)?.best),
    }
}

/// The inclusion-wise smallest minimizer (the intersection of all minimizers).
pub fn minimal_minimizer<F: SetFunction + ?Sized>(
    f: &F,
    backend: Backend,
) -> Result<Minimum, SfmError> {
    match backend.resolve(f.ground_size()) {
        Backend::Exhaustive => Ok(exhaustive(f)?.smallest),
        _ => {
            let run = min_norm_point(f)?;
            let (forced_in, ambiguous) = run.classify();
            let mut current = run.best;
            for e in ambiguous {
                if !current.members[e] {
                    continue;
                }
                // Is there a minimizer inside current \ {e}?
                let fixed: Vec<usize> = (0..f.ground_size()).filter(|&i| forced_in[i]).collect();
                let free: Vec<usize> = current
                    .elements()
                    .filter(|&i| i != e && !forced_in[i])
                    .collect();
                let view = View::new(f, fixed, free);
                let probe = minimize(&view, Backend::Auto)?;
                if probe.value == current.value {
                    current = Minimum {
                        members: view.lift(&probe.members),
                        value: probe.value,
                    };
                }
            }
            Ok(current)
        }
    }
}

/// The inclusion-wise largest minimizer (the union of all minimizers).
pub fn maximal_minimizer<F: SetFunction + ?Sized>(
    f: &F,
    backend: Backend,
) -> Result<Minimum, SfmError> {
    match backend.resolve(f.ground_size()) {
        Backend::Exhaustive => Ok(exhaustive(f)?.largest),
        _ => {
            let run = min_norm_point(f)?;
            let (_, ambiguous) = run.classify();
            let forced_out = run.forced_out();
            let mut current = run.best;
            for e in ambiguous {
                if current.members[e] {
                    continue;
                }
                // Is there a minimizer containing current ∪ {e}?
                let fixed: Vec<usize> = current.elements().chain([e]).collect();
                let free: Vec<usize> = (0..f.ground_size())
                    .filter(|&i| !current.members[i] && i != e && !forced_out[i])
                    .collect();
                let view = View::new(f, fixed, free);
                let probe = minimize(&view, Backend::Auto)?;
                if probe.value == current.value {
                    current = Minimum {
                        members: view.lift(&probe.members),
                        value: probe.value,
                    };
                }
            }
            Ok(current)
        }
    }
}

struct Enumerated {
    smallest: Minimum,
    largest: Minimum,
}

fn exhaustive<F: SetFunction + ?Sized>(f: &F) -> Result<Enumerated, SfmError> {
    let k = f.ground_size();
    if k > EXHAUSTIVE_LIMIT {
        return Err(SfmError::TooLarge(k));
    }
    let mut best = i128::MAX;
    let mut meet = 0u32;
    let mut join = 0u32;
    let mut members = vec![false; k];
    for mask in 0u32..(1u32 << k) {
        for (i, m) in members.iter_mut().enumerate() {
            *m = mask >> i & 1 == 1;
        }
        let value = f.eval(&members);
        if value < best {
            best = value;
            meet = mask;
            join = mask;
        } else if value == best {
            meet &= mask;
            join |= mask;
        }
    }
    let to_members = |mask: u32| (0..k).map(|i| mask >> i & 1 == 1).collect::<Vec<_>>();
    Ok(Enumerated {
        smallest: Minimum {
            members: to_members(meet),
            value: best,
        },
        largest: Minimum {
            members: to_members(join),
            value: best,
        },
    })
}

/// Restriction of `inner` to the `free` elements, with `fixed` always present.
struct View<'a, F: ?Sized> {
    inner: &'a F,
    fixed: Vec<usize>,
    free: Vec<usize>,
}

impl<'a, F: SetFunction + ?Sized> View<'a, F> {
    fn new(inner: &'a F, fixed: Vec<usize>, free: Vec<usize>) -> Self {
        Self { inner, fixed, free }
    }

    fn lift(&self, members: &[bool]) -> Vec<bool> {
        let mut out = vec![false; self.inner.ground_size()];
        for &i in &self.fixed {
            out[i] = true;
        }
        for (j, &m) in members.iter().enumerate() {
            if m {
                out[self.free[j]] = true;
            }
        }
        out
    }
}

impl<F: SetFunction + ?Sized> SetFunction for View<'_, F> {
    fn ground_size(&self) -> usize {
        self.free.len()
    }

    fn eval(&self, members: &[bool]) -> i128 {
        self.inner.eval(&self.lift(members))
    }

    fn chain(&self, order: &[usize]) -> Vec<i128> {
        let full: Vec<usize> = self
            .fixed
            .iter()
            .copied()
            .chain(order.iter().map(|&j| self.free[j]))
            .collect();
        self.inner.chain(&full)[self.fixed.len()..].to_vec()
    }
}

struct MinNormRun {
    best: Minimum,
    x: Vec<f64>,
    /// `best.value - F(∅) - x⁻(V)`; below one half.
    gap: f64,
}

impl MinNormRun {
    /// Elements in every minimizer, and the undecided ones.
    fn classify(&self) -> (Vec<bool>, Vec<usize>) {
        let slack = self.gap + 1e-9;
        let forced_in = self.x.iter().map(|&v| v < -slack).collect();
        let ambiguous = self
            .x
            .iter()
            .enumerate()
            .filter(|(_, &v)| v.abs() <= slack)
            .map(|(i, _)| i)
            .collect();
        (forced_in, ambiguous)
    }

    /// Elements in no minimizer.
    fn forced_out(&self) -> Vec<bool> {
        let slack = self.gap + 1e-9;
        self.x.iter().map(|&v| v > slack).collect()
    }
}

/// Greedy vertex of the base polytope of `f - f(∅)` for the ordering by
/// increasing `x`, and the best prefix of that ordering.
fn greedy<F: SetFunction + ?Sized>(f: &F, x: &[f64]) -> (Vec<f64>, Vec<i128>, Vec<usize>) {
    let mut order: Vec<usize> = (0..x.len()).collect();
    order.sort_by(|&a, &b| x[a].total_cmp(&x[b]).then(a.cmp(&b)));
    let chain = f.chain(&order);
    let mut vertex = vec![0.0; x.len()];
    for (j, &e) in order.iter().enumerate() {
        vertex[e] = (chain[j + 1] - chain[j]) as f64;
    }
    (vertex, chain, order)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Affine minimizer of the points: coefficients summing to one that minimize the norm.
fn affine_minimizer(points: &[Vec<f64>]) -> Option<Vec<f64>> {
    let s = points.len();
    let mut system = DMatrix::<f64>::zeros(s + 1, s + 1);
    for i in 0..s {
        for j in i..s {
            let g = dot(&points[i], &points[j]);
            system[(i, j)] = g;
            system[(j, i)] = g;
        }
        system[(i, s)] = 1.0;
        system[(s, i)] = 1.0;
    }
    let mut rhs = DVector::<f64>::zeros(s + 1);
    rhs[s] = 1.0;
    let solution = system.lu().solve(&rhs)?;
    let alpha: Vec<f64> = solution.iter().take(s).copied().collect();
    alpha.iter().all(|a| a.is_finite()).then_some(alpha)
}

fn combine(points: &[Vec<f64>], weights: &[f64], k: usize) -> Vec<f64> {
    let mut x = vec![0.0; k];
    for (p, &w) in points.iter().zip(weights) {
        for (xi, pi) in x.iter_mut().zip(p) {
            *xi += w * pi;
        }
    }
    x
}

fn min_norm_point<F: SetFunction + ?Sized>(f: &F) -> Result<MinNormRun, SfmError> {
    let k = f.ground_size();
    let empty_value = f.eval(&vec![false; k]);
    if k == 0 {
        return Ok(MinNormRun {
            best: Minimum {
                members: vec![],
                value: empty_value,
            },
            x: vec![],
            gap: 0.0,
        });
    }

    let mut best = Minimum {
        members: vec![false; k],
        value: empty_value,
    };
    let consider = |chain: &[i128], order: &[usize], best: &mut Minimum| {
        let (j, &value) = chain
            .iter()
            .enumerate()
            .min_by_key(|(j, &v)| (v, *j))
            .expect("chain is nonempty");
        if value < best.value {
            let mut members = vec![false; k];
            for &e in &order[..j] {
                members[e] = true;
            }
            *best = Minimum { members, value };
        }
    };

    let (first, chain, order) = greedy(f, &vec![0.0; k]);
    consider(&chain, &order, &mut best);
    let mut points = vec![first];
    let mut weights: Vec<f64> = vec![1.0];
    let mut x = points[0].clone();
    let max_major = 50 * k * k + 1000;
    let mut gap = f64::INFINITY;

    for _ in 0..max_major {
        let (q, chain, order) = greedy(f, &x);
        consider(&chain, &order, &mut best);

        let lower: f64 = x.iter().map(|&v| v.min(0.0)).sum();
        gap = (best.value - empty_value) as f64 - lower;
        if gap < 0.5 {
            return Ok(MinNormRun { best, x, gap });
        }

        let norm = dot(&x, &x);
        let scale = points.iter().map(|p| dot(p, p)).fold(dot(&q, &q), f64::max);
        if norm - dot(&x, &q) <= 1e-12 * scale.max(1.0) {
            // x is the min-norm point up to rounding, yet the gap is not closed.
            break;
        }
        points.push(q);
        weights.push(0.0);

        // Minor cycles.
        loop {
            let Some(alpha) = affine_minimizer(&points) else {
                // Affinely dependent support: drop the lightest point and retry.
                let (drop, _) = weights
                    .iter()
                    .enumerate()
                    .take(points.len() - 1)
                    .min_by(|a, b| a.1.total_cmp(b.1))
                    .expect("support is nonempty");
                points.remove(drop);
                weights.remove(drop);
                let total: f64 = weights.iter().sum();
                for w in &mut weights {
                    *w /= total.max(f64::MIN_POSITIVE);
                }
                continue;
            };
            if alpha.iter().all(|&a| a > 1e-12) {
                weights = alpha;
                break;
            }
            let mut theta = 1.0f64;
            for (&w, &a) in weights.iter().zip(&alpha) {
                if a <= 1e-12 && w - a > 0.0 {
                    theta = theta.min(w / (w - a));
                }
            }
            for (w, a) in weights.iter_mut().zip(&alpha) {
                *w = (1.0 - theta) * *w + theta * a;
            }
            let mut i = 0;
            while i < points.len() {
                if weights[i] <= 1e-12 {
                    points.remove(i);
                    weights.remove(i);
                } else {
                    i += 1;
                }
            }
            if points.is_empty() {
                return Err(SfmError::NotConverged { gap });
            }
            let total: f64 = weights.iter().sum();
            for w in &mut weights {
                *w /= total;
            }
            if points.len() == 1 {
                break;
            }
        }
        x = combine(&points, &weights, k);
    }
    Err(SfmError::NotConverged { gap })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Weighted graph cut plus a modular term: submodular.
    struct CutPlusModular {
        n: usize,
        edges: Vec<(usize, usize, i128)>,
        modular: Vec<i128>,
        constant: i128,
    }

    impl SetFunction for CutPlusModular {
        fn ground_size(&self) -> usize {
            self.n
        }

        fn eval(&self, members: &[bool]) -> i128 {
            let cut: i128 = self
                .edges
                .iter()
                .filter(|(u, v, _)| members[*u] != members[*v])
                .map(|(_, _, w)| w)
                .sum();
            let modular: i128 = self
                .modular
                .iter()
                .zip(members)
                .filter(|(_, &m)| m)
                .map(|(w, _)| w)
                .sum();
            cut + modular + self.constant
        }
    }

    fn random_function(rng: &mut ChaCha8Rng, n: usize) -> CutPlusModular {
        let mut edges = Vec::new();
        for _ in 0..2 * n {
            let u = rng.gen_range(0..n);
            let v = rng.gen_range(0..n);
            if u != v {
                edges.push((u, v, rng.gen_range(0..6)));
            }
        }
        CutPlusModular {
            n,
            edges,
            modular: (0..n).map(|_| rng.gen_range(-8..=5)).collect(),
            constant: rng.gen_range(-3..=3),
        }
    }

    #[test]
    fn min_norm_matches_enumeration() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let n = rng.gen_range(1..=9);
            let f = random_function(&mut rng, n);
            let exact = minimize(&f, Backend::Exhaustive).unwrap();
            let mnp = minimize(&f, Backend::MinNormPoint).unwrap();
            assert_eq!(mnp.value, exact.value);
            assert_eq!(f.eval(&mnp.members), mnp.value);
        }
    }

    #[test]
    fn extreme_minimizers_agree_across_backends() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let n = rng.gen_range(1..=8);
            let mut f = random_function(&mut rng, n);
            // Zero out the modular part often so that ties are common.
            if rng.gen_bool(0.5) {
                f.modular.iter_mut().for_each(|w| *w = 0);
            }
            let lo = minimal_minimizer(&f, Backend::Exhaustive).unwrap();
            let hi = maximal_minimizer(&f, Backend::Exhaustive).unwrap();
            assert_eq!(minimal_minimizer(&f, Backend::MinNormPoint).unwrap(), lo);
            assert_eq!(maximal_minimizer(&f, Backend::MinNormPoint).unwrap(), hi);
        }
    }

    #[test]
    fn constant_function_extremes() {
        let f = CutPlusModular {
            n: 4,
            edges: vec![],
            modular: vec![0; 4],
            constant: 5,
        };
        for backend in [Backend::Exhaustive, Backend::MinNormPoint] {
            assert_eq!(minimal_minimizer(&f, backend).unwrap().members, vec![false; 4]);
            assert_eq!(maximal_minimizer(&f, backend).unwrap().members, vec![true; 4]);
        }
    }

    #[test]
    fn exhaustive_refuses_large_ground_sets() {
        let f = CutPlusModular {
            n: EXHAUSTIVE_LIMIT + 1,
            edges: vec![],
            modular: vec![0; EXHAUSTIVE_LIMIT + 1],
            constant: 0,
        };
        assert_eq!(
            minimize(&f, Backend::Exhaustive),
            Err(SfmError::TooLarge(EXHAUSTIVE_LIMIT + 1))
        );
    }

    #[test]
    fn min_norm_handles_larger_ground_sets() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let f = random_function(&mut rng, 30);
        let m = minimize(&f, Backend::MinNormPoint).unwrap();
        assert_eq!(f.eval(&m.members), m.value);
        // No single-element flip improves a true minimizer.
        for i in 0..30 {
            let mut flipped = m.members.clone();
            flipped[i] = !flipped[i];
            assert!(f.eval(&flipped) >= m.value);
        }
    }
}
