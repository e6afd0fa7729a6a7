//! Uniformly sampled coefficient tables with local cubic interpolation.
//!
//! Each segment stores `N` channels on an equispaced grid. Evaluation uses
//! the four nearest nodes (cubic Lagrange), which is fourth-order accurate
//! in the value and third-order in the derivative.

use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TableSegment<const N: usize> {
    pub start: f64,
    pub end: f64,
    #[serde(skip)]
    nodes: Vec<[f64; N]>,
}

impl<const N: usize> TableSegment<N> {
    /// Needs at least four nodes; `nodes[k]` belongs to `start + k * step`.
    pub fn new(start: f64, end: f64, nodes: Vec<[f64; N]>) -> Option<Self> {
        (nodes.len() >= 4 && start < end).then_some(Self { start, end, nodes })
    }

    pub fn nodes(&self) -> &[[f64; N]] {
        &self.nodes
    }

    pub fn step(&self) -> f64 {
        (self.end - self.start) / (self.nodes.len() - 1) as f64
    }

    pub fn contains(&self, s: f64) -> bool {
        s >= self.start && s <= self.end
    }

    pub fn node_params(&self) -> Vec<f64> {
        crate::frenet::uniform_samples((self.start, self.end), self.nodes.len())
    }

    /// Interpolated values and first derivatives of every channel.
    pub fn eval(&self, s: f64) -> ([f64; N], [f64; N]) {
        let h = self.step();
        let n = self.nodes.len();
        let x = (s - self.start) / h;
        // stencil i-1 .. i+2 around the interval containing s
        let i = (x.floor() as isize).clamp(1, n as isize - 3) as usize;
        let u = x - (i - 1) as f64;
        let (u1, u2, u3) = (u - 1.0, u - 2.0, u - 3.0);
        let w = [
            -u1 * u2 * u3 / 6.0,
            u * u2 * u3 / 2.0,
            -u * u1 * u3 / 2.0,
            u * u1 * u2 / 6.0,
        ];
        let dw = [
            -(u2 * u3 + u1 * u3 + u1 * u2) / 6.0,
            (u2 * u3 + u * u3 + u * u2) / 2.0,
            -(u1 * u3 + u * u3 + u * u1) / 2.0,
            (u1 * u2 + u * u2 + u * u1) / 6.0,
        ];
        let mut value = [0.0; N];
        let mut slope = [0.0; N];
        for (k, node) in self.nodes[i - 1..i + 3].iter().enumerate() {
            for c in 0..N {
                value[c] += w[k] * node[c];
                slope[c] += dw[k] * node[c] / h;
            }
        }
        (value, slope)
    }
}

/// Sample `f` on `[start, end]`, doubling the resolution until the
/// interpolant reproduces `f` at every interval midpoint within
/// `tol * (1 + |f|)`. Returns `None` if `f` fails at any node of the
/// initial grid; a failure during refinement keeps the last good table.
pub fn build_segment<const N: usize, F>(
    start: f64,
    end: f64,
    initial_nodes: usize,
    max_nodes: usize,
    tol: f64,
    f: F,
) -> Option<TableSegment<N>>
where
    F: Fn(f64) -> Option<[f64; N]> + Sync,
{
    use rayon::prelude::*;

    let sample = |count: usize| -> Option<Vec<[f64; N]>> {
        crate::frenet::uniform_samples((start, end), count)
            .into_par_iter()
            .map(&f)
            .collect()
    };
    let mut count = initial_nodes.max(4);
    let mut seg = TableSegment::new(start, end, sample(count)?)?;
    loop {
        let h = seg.step();
        let midpoints: Vec<f64> = (0..count - 1).map(|k| start + h * (k as f64 + 0.5)).collect();
        let exact: Option<Vec<[f64; N]>> = midpoints.par_iter().map(|&s| f(s)).collect();
        let Some(exact) = exact else {
            log::warn!("table refinement on [{start}, {end}] hit an undefined midpoint");
            return Some(seg);
        };
        let worst = midpoints
            .iter()
            .zip(&exact)
            .map(|(&s, want)| {
                let (got, _) = seg.eval(s);
                (0..N)
                    .map(|c| (got[c] - want[c]).abs() / (1.0 + want[c].abs()))
                    .fold(0.0, f64::max)
            })
            .fold(0.0, f64::max);
        if worst <= tol || 2 * count - 1 > max_nodes {
            if worst > tol {
                log::warn!("table on [{start}, {end}] stopped at {count} nodes, error {worst:e}");
            }
            return Some(seg);
        }
        // interleave the midpoints to double the resolution
        let mut nodes = Vec::with_capacity(2 * count - 1);
        for (k, node) in seg.nodes.iter().enumerate() {
            nodes.push(*node);
            if k + 1 < count {
                nodes.push(exact[k]);
            }
        }
        count = nodes.len();
        seg = TableSegment::new(start, end, nodes)?;
    }
}
