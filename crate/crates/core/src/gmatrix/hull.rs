//! Interior-point test for the origin against the convex hull of the
//! columns of a nullspace array, by linear programming.

use minilp::{ComparisonOp, OptimizationDirection, Problem};

/// Largest `ε` such that `0 = Σ λ_i u_i` with `Σ λ_i = 1` and every
/// `λ_i ≥ ε`. Positive iff the origin is interior to the hull of the
/// columns (for a full-rank array). `rows` is the `d × n` array.
pub fn origin_margin(rows: &[Vec<f64>]) -> Result<f64, minilp::Error> {
    let n = rows.first().map_or(0, Vec::len);
    let mut lp = Problem::new(OptimizationDirection::Maximize);
    let eps = lp.add_var(1.0, (-1.0, 1.0));
    let lambda: Vec<_> = (0..n).map(|_| lp.add_var(0.0, (0.0, 1.0))).collect();
    for &l in &lambda {
        lp.add_constraint([(l, 1.0), (eps, -1.0)], ComparisonOp::Ge, 0.0);
    }
    let ones: Vec<_> = lambda.iter().map(|&l| (l, 1.0)).collect();
    lp.add_constraint(ones.as_slice(), ComparisonOp::Eq, 1.0);
    for row in rows {
        let expr: Vec<_> = lambda.iter().zip(row).map(|(&l, &c)| (l, c)).collect();
        lp.add_constraint(expr.as_slice(), ComparisonOp::Eq, 0.0);
    }
    let sol = lp.solve()?;
    Ok(sol[eps])
}
