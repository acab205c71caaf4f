use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1};

use super::OptConfig;
use crate::game::JointActions;

/// Grid resolution used when no gradient is available.
const GRID_RESOLUTION: usize = 50;
/// Largest grid evaluated exhaustively on a single simplex.
const GRID_CAP: usize = 200_000;
/// Product-of-simplices vertex sets up to this size are enumerated.
const VERTEX_CAP: usize = 27;
const MAX_HALVINGS: usize = 40;

#[derive(Debug, Clone, PartialEq)]
pub struct SimplexMax {
    pub point: Vec<f64>,
    pub value: f64,
}

/// Euclidean projection of `x` onto the probability simplex.
pub fn project_to_simplex(x: &[f64]) -> Vec<f64> {
    let mut out = x.to_vec();
    project_in_place(&mut out, &mut Vec::new());
    out
}

fn project_in_place(x: &mut [f64], sorted: &mut Vec<f64>) {
    sorted.clear();
    sorted.extend_from_slice(x);
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut cumsum = 0.0;
    let mut theta = 0.0;
    for (j, &v) in sorted.iter().enumerate() {
        cumsum += v;
        let t = (cumsum - 1.0) / (j + 1) as f64;
        if v - t > 0.0 {
            theta = t;
        }
    }
    for v in x.iter_mut() {
        *v = (*v - theta).clamp(0.0, 1.0);
    }
}

fn project_blocks(x: &mut [f64], dims: &[usize], sorted: &mut Vec<f64>) {
    let mut start = 0;
    for &k in dims {
        project_in_place(&mut x[start..start + k], sorted);
        start += k;
    }
}

fn random_interior(rng: &mut ChaCha8Rng, dims: &[usize]) -> Vec<f64> {
    let mut x = Vec::with_capacity(dims.iter().sum());
    for &k in dims {
        let draws: Vec<f64> = (0..k).map(|_| Exp1.sample(rng)).collect();
        let total: f64 = draws.iter().sum();
        x.extend(draws.iter().map(|d| d / total));
    }
    x
}

fn vertex(dims: &[usize], choice: &[usize]) -> Vec<f64> {
    let mut x = vec![0.0; dims.iter().sum()];
    let mut start = 0;
    for (&k, &c) in dims.iter().zip(choice) {
        x[start + c] = 1.0;
        start += k;
    }
    x
}

/// Lattice points `{c / resolution}` of the simplex with `k` vertices, in
/// lexicographic order of the numerators.
pub(crate) fn simplex_grid(k: usize, resolution: usize) -> Vec<Vec<f64>> {
    fn rec(k: usize, left: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if k == 1 {
            prefix.push(left);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for c in 0..=left {
            prefix.push(c);
            rec(k - 1, left - c, prefix, out);
            prefix.pop();
        }
    }
    let mut counts = Vec::new();
    rec(k, resolution, &mut Vec::new(), &mut counts);
    counts
        .into_iter()
        .map(|c| c.into_iter().map(|n| n as f64 / resolution as f64).collect())
        .collect()
}

/// Number of lattice points on the simplex with `k` vertices.
pub(crate) fn simplex_grid_size(k: usize, resolution: usize) -> u128 {
    // C(resolution + k - 1, k - 1)
    let mut acc: u128 = 1;
    for j in 1..k as u128 {
        acc = acc * (resolution as u128 + j) / j;
    }
    acc
}

struct Best {
    point: Vec<f64>,
    value: f64,
}

impl Best {
    fn offer(&mut self, point: &[f64], value: f64) {
        if value > self.value {
            self.value = value;
            self.point.clear();
            self.point.extend_from_slice(point);
        }
    }
}

type Grad<'a> = &'a dyn Fn(&[f64], &mut [f64]);

fn ascend(
    f: &dyn Fn(&[f64]) -> f64,
    grad: Grad<'_>,
    dims: &[usize],
    start: Vec<f64>,
    cfg: &OptConfig,
) -> (Vec<f64>, f64) {
    let n = start.len();
    let mut x = start;
    let mut fx = f(&x);
    let mut g = vec![0.0; n];
    let mut y = vec![0.0; n];
    let mut step = cfg.step_init;
    let mut sorted = Vec::with_capacity(n);
    for _ in 0..cfg.max_iters {
        grad(&x, &mut g);
        let mut accepted = None;
        let mut s = step;
        for _ in 0..=MAX_HALVINGS {
            for ((yi, xi), gi) in y.iter_mut().zip(&x).zip(&g) {
                *yi = xi + s * gi;
            }
            project_blocks(&mut y, dims, &mut sorted);
            let fy = f(&y);
            if fy > fx {
                accepted = Some(fy);
                break;
            }
            s *= 0.5;
        }
        let Some(fy) = accepted else { break };
        let gain = fy - fx;
        std::mem::swap(&mut x, &mut y);
        fx = fy;
        step = 2.0 * s;
        if gain <= cfg.eps_opt {
            break;
        }
    }
    (x, fx)
}

/// Maximises `f` over the probability simplex with `k` vertices.
///
/// The barycentre and every vertex are evaluated, then `cfg.num_starts`
/// projected-gradient ascents run from seeded random interior points.
/// Without a gradient the ascents are replaced by a pass over the lattice of
/// step 1/50. The best point found is returned; earlier candidates win ties,
/// so a constant objective yields the barycentre.
pub fn maximize_over_simplex(
    f: &dyn Fn(&[f64]) -> f64,
    grad: Option<Grad<'_>>,
    k: usize,
    cfg: &OptConfig,
) -> SimplexMax {
    maximize_over_simplices(f, grad, &[k], cfg)
}

/// Maximises `f` over a product of simplices; the point is the
/// concatenation of one distribution per block of `dims`.
pub fn maximize_over_simplices(
    f: &dyn Fn(&[f64]) -> f64,
    grad: Option<Grad<'_>>,
    dims: &[usize],
    cfg: &OptConfig,
) -> SimplexMax {
    assert!(!dims.is_empty() && dims.iter().all(|&k| k > 0), "empty simplex");
    let mut best = Best {
        point: Vec::new(),
        value: f64::NEG_INFINITY,
    };
    let centre: Vec<f64> = dims.iter().flat_map(|&k| std::iter::repeat(1.0 / k as f64).take(k)).collect();
    let fc = f(&centre);
    best.offer(&centre, fc);
    let num_vertices: usize = dims.iter().product();
    if dims.len() == 1 || num_vertices <= VERTEX_CAP {
        for choice in JointActions::new(dims) {
            let v = vertex(dims, &choice);
            let fv = f(&v);
            best.offer(&v, fv);
        }
    }
    let total: usize = dims.iter().sum();
    if total == dims.len() {
        // every block is a single point
        return SimplexMax {
            point: best.point,
            value: best.value,
        };
    }

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    match grad {
        Some(grad) => {
            for _ in 0..cfg.num_starts {
                let start = random_interior(&mut rng, dims);
                let (x, fx) = ascend(f, grad, dims, start, cfg);
                best.offer(&x, fx);
            }
        }
        None if dims.len() == 1 && simplex_grid_size(dims[0], GRID_RESOLUTION) <= GRID_CAP as u128 => {
            for p in simplex_grid(dims[0], GRID_RESOLUTION) {
                let fp = f(&p);
                best.offer(&p, fp);
            }
        }
        None => {
            for _ in 0..cfg.num_starts * 64 {
                let p = random_interior(&mut rng, dims);
                let fp = f(&p);
                best.offer(&p, fp);
            }
        }
    }
    SimplexMax {
        point: best.point,
        value: best.value,
    }
}
