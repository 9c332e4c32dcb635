//! Independent oracles and fixtures shared by the integration tests.
#![allow(dead_code, clippy::excessive_precision)]

use fracwave::grid_fem::{FieldP1, FractionalOrder, Grid1D, OperatorSet, SymmetricMatrix};
use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub use rand::SeedableRng;
pub type TestRng = ChaCha8Rng;

pub fn rng(seed: u64) -> TestRng {
    ChaCha8Rng::seed_from_u64(seed)
}

// Gauss–Kronrod 7/15 nodes and weights on [-1, 1].
const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

fn gk15(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let hw = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for i in 0..7 {
        let dx = hw * XGK[i];
        let s = f(c - dx) + f(c + dx);
        kron += WGK[i] * s;
        if i % 2 == 1 {
            gauss += WG[i / 2] * s;
        }
    }
    (kron * hw, (kron - gauss).abs() * hw)
}

/// Adaptive Gauss–Kronrod quadrature.
pub fn integrate(f: &dyn Fn(f64) -> f64, a: f64, b: f64, abs_tol: f64, rel_tol: f64) -> f64 {
    fn rec(f: &dyn Fn(f64) -> f64, a: f64, b: f64, abs_tol: f64, rel_tol: f64, depth: u32) -> f64 {
        let (k, err) = gk15(f, a, b);
        if err <= abs_tol.max(rel_tol * k.abs()) || depth > 60 {
            return k;
        }
        let m = 0.5 * (a + b);
        rec(f, a, m, 0.5 * abs_tol, rel_tol, depth + 1)
            + rec(f, m, b, 0.5 * abs_tol, rel_tol, depth + 1)
    }
    rec(f, a, b, abs_tol, rel_tol, 0)
}

/// Hat function of node `j` on a grid with spacing `h` and origin 0, extended by zero.
fn hat(x: f64, j: i64, h: f64) -> f64 {
    (1.0 - (x - j as f64 * h).abs() / h).max(0.0)
}

/// Exact integral of a piecewise quadratic with the given breakpoints (3-point Gauss).
fn piecewise_exact(f: &dyn Fn(f64) -> f64, mut breaks: Vec<f64>) -> f64 {
    const X3: [f64; 3] = [
        -0.774596669241483377035853079956,
        0.0,
        0.774596669241483377035853079956,
    ];
    const W3: [f64; 3] = [5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0];
    breaks.sort_by(|a, b| a.partial_cmp(b).unwrap());
    breaks.dedup();
    let mut sum = 0.0;
    for w in breaks.windows(2) {
        let (c, hw) = (0.5 * (w[0] + w[1]), 0.5 * (w[1] - w[0]));
        for q in 0..3 {
            sum += W3[q] * hw * f(c + hw * X3[q]);
        }
    }
    sum
}

/// Brute-force Gagliardo entry
/// `∫∫ (φ_j(x) − φ_j(y))(φ_k(x) − φ_k(y)) |x − y|^(−1−2s) dx dy`
/// over the real line, for hats of nodes `j`, `k` with spacing `h`.
///
/// Substituting `x = y + r` gives `2 ∫_0^∞ G(r) r^(−1−2s) dr` with
/// `G(r) = ∫ Δ_rφ_j Δ_rφ_k dy`, evaluated exactly per `r`. `G` is a cubic
/// `c2 r² + c3 r³` on `[0, h]`; the piece `[0, h/2]` is integrated
/// analytically from a fit, `[h/2, R]` adaptively, and the constant tail
/// `G = 2 M_jk` beyond the joint support analytically.
pub fn gagliardo_entry_oracle(h: f64, s: f64, j: i64, k: i64) -> f64 {
    let nodes: Vec<f64> = [j - 1, j, j + 1, k - 1, k, k + 1]
        .iter()
        .map(|&m| m as f64 * h)
        .collect();
    let g_of_r = |r: f64| -> f64 {
        let mut breaks = nodes.clone();
        breaks.extend(nodes.iter().map(|x| x - r));
        let f = |y: f64| (hat(y + r, j, h) - hat(y, j, h)) * (hat(y + r, k, h) - hat(y, k, h));
        piecewise_exact(&f, breaks)
    };
    let mass = piecewise_exact(&|y| hat(y, j, h) * hat(y, k, h), nodes.clone());
    let span = ((j.max(k) + 1) - (j.min(k) - 1)) as f64 * h;

    // Near-diagonal piece: fit G = c2 r² + c3 r³ from two samples, verify on a third.
    let (r1, r2) = (h / 8.0, h / 4.0);
    let (g1, g2) = (g_of_r(r1), g_of_r(r2));
    let c3 = (g2 / (r2 * r2) - g1 / (r1 * r1)) / (r2 - r1);
    let c2 = g1 / (r1 * r1) - c3 * r1;
    let delta = h / 2.0;
    let check = c2 * delta * delta + c3 * delta.powi(3);
    assert!(
        (check - g_of_r(delta)).abs() <= 1e-12 * check.abs().max(1e-300),
        "G is not cubic near the diagonal"
    );
    let near = c2 * delta.powf(2.0 - 2.0 * s) / (2.0 - 2.0 * s)
        + c3 * delta.powf(3.0 - 2.0 * s) / (3.0 - 2.0 * s);

    let integrand = |r: f64| g_of_r(r) * r.powf(-1.0 - 2.0 * s);
    let mut middle = 0.0;
    let mut left = delta;
    let mut m = 1.0;
    while left < span {
        let right = (m * h).min(span);
        if right > left {
            middle += integrate(&integrand, left, right, 1e-15, 1e-13);
        }
        left = right.max(left);
        m += 1.0;
    }
    let tail = mass * span.powf(-2.0 * s) / s;
    2.0 * (near + middle) + 2.0 * tail
}

/// Solves `a x = b` by dense LU.
pub fn dense_solve(a: &DMatrix<f64>, b: &[f64]) -> Vec<f64> {
    a.clone()
        .lu()
        .solve(&DVector::from_column_slice(b))
        .expect("nonsingular")
        .as_slice()
        .to_vec()
}

pub fn inf_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .fold(0.0_f64, |m, (x, y)| m.max((x - y).abs()))
}

pub fn random_vec(rng: &mut TestRng, n: usize, lo: f64, hi: f64) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(lo..hi)).collect()
}

pub fn random_field(rng: &mut TestRng, grid: Grid1D, lo: f64, hi: f64, bc: f64) -> FieldP1 {
    FieldP1::new(grid, random_vec(rng, grid.n_interior(), lo, hi), bc, bc).unwrap()
}

pub fn ops(a: f64, b: f64, n_cells: usize, s: f64) -> OperatorSet {
    OperatorSet::new(
        Grid1D::new(a, b, n_cells).unwrap(),
        FractionalOrder::new(s).unwrap(),
    )
    .unwrap()
}

/// Dense step Hessian `M/τ² + A`.
pub fn dense_hessian(ops: &OperatorSet, tau: f64) -> DMatrix<f64> {
    ops.mass().to_dense() / (tau * tau) + ops.stiffness().to_dense()
}

/// Random lower-obstacle step problem data with `u_prev >= g`.
pub struct ObstacleFixture {
    pub ops: OperatorSet,
    pub tau: f64,
    pub u_prev: FieldP1,
    pub u_prev2: FieldP1,
    pub lower: FieldP1,
}

pub fn obstacle_fixture(rng: &mut TestRng, n_cells: usize, s: f64) -> ObstacleFixture {
    let ops = ops(0.0, 1.0, n_cells, s);
    let grid = *ops.grid();
    let tau = rng.gen_range(0.02..0.3);
    let bc = if s < 1.0 {
        0.0
    } else {
        rng.gen_range(-0.5..0.5)
    };
    let lower_vals = random_vec(rng, grid.n_interior(), -0.3, 0.1);
    let lower = FieldP1::new(grid, lower_vals.clone(), bc - 1.0, bc - 1.0).unwrap();
    // Previous state on or above the obstacle, some nodes touching it.
    let prev: Vec<f64> = lower_vals
        .iter()
        .map(|g| {
            if rng.gen_bool(0.3) {
                *g
            } else {
                g + rng.gen_range(0.0..0.4)
            }
        })
        .collect();
    let u_prev = FieldP1::new(grid, prev.clone(), bc, bc).unwrap();
    // Moving downward on average so that contact happens.
    let prev2: Vec<f64> = prev
        .iter()
        .map(|u| u + rng.gen_range(-0.05..0.25))
        .collect();
    let u_prev2 = FieldP1::new(grid, prev2, bc, bc).unwrap();
    ObstacleFixture {
        ops,
        tau,
        u_prev,
        u_prev2,
        lower,
    }
}
