use serde::Serialize;

use super::{inverse_x, upper_bound};
use crate::asymptotics::approx_second;
use crate::error::{Error, Result};
use crate::params::LambertParams;

pub const DEFAULT_GRID_SIZE: usize = 10_000;

/// Nodes `(x_beta(k/m), k/m)` for `k = 1..m-1`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchmarkGrid {
    pub params: LambertParams,
    pub m: usize,
    pub nodes: Vec<(f64, f64)>,
}

pub fn build_benchmark_grid(params: &LambertParams, m: usize) -> Result<BenchmarkGrid> {
    if m < 2 {
        return Err(Error::domain(format!(
            "benchmark grid needs m >= 2, got {m}"
        )));
    }
    let nodes = (1..m)
        .map(|k| {
            let y = k as f64 / m as f64;
            inverse_x(y, params).map(|x| (x, y))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(BenchmarkGrid {
        params: *params,
        m,
        nodes,
    })
}

/// Piecewise-linear interpolation through the grid nodes.
///
/// Below the first node the second-order small-x approximation is used,
/// above the last one the upper bound.
pub fn benchmark_eval(grid: &BenchmarkGrid, x: f64) -> Result<f64> {
    super::check_x(x)?;
    let nodes = &grid.nodes;
    let (x_first, y_first) = nodes[0];
    let (x_last, _) = nodes[nodes.len() - 1];
    if x < x_first {
        return Ok(approx_second(x, &grid.params).value);
    }
    if x > x_last {
        return upper_bound(x, &grid.params);
    }
    if x == x_first {
        return Ok(y_first);
    }
    let i = nodes.partition_point(|&(xk, _)| xk < x);
    let (x1, y1) = nodes[i];
    if x1 == x {
        return Ok(y1);
    }
    let (x0, y0) = nodes[i - 1];
    Ok(y0 + (y1 - y0) * (x - x0) / (x1 - x0))
}
