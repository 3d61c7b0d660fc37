//! Method of fundamental solutions for the sound-soft scattering problem.
//!
//! The scattered field is `u(p) = sum_m c_m G(p, y_m)` with charges `y_m`
//! inside the obstacle. Each term satisfies the Helmholtz equation, the wall
//! conditions and the radiation condition, so only the Dirichlet condition
//! `u = -G(., source)` on the boundary has to be fitted. The collocation
//! matrix does not depend on the source: its truncated pseudoinverse is
//! computed once and reused for every array element.

use alloc::boxed::Box;
use alloc::vec::Vec;

use crate::array::ArrayGeometry;
use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::green::{greens_function, greens_function_near};
use crate::modes::ModeSet;
use crate::obstacle::ObstacleBoundary;
use crate::par::map_indexed;
use crate::response::ResponseMatrix;
use crate::{CMatrix, Complex64};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    /// Singular values below this fraction of the largest are discarded.
    pub sv_cutoff: f64,
    /// Bound on the boundary misfit relative to the incident field.
    pub residual_tol: f64,
    /// Bound on the condition number of the retained spectrum.
    pub max_condition: f64,
    /// Discarded fraction of the spectrum above which
    /// [`MfsSolver::resonance_warning`] is raised.
    pub resonance_fraction: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions { sv_cutoff: 1e-12, residual_tol: 1e-6, max_condition: 1e14, resonance_fraction: 0.2 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScatteringSolution {
    pub source: Point,
    /// Charge strengths, one per obstacle source node.
    pub coefficients: Vec<Complex64>,
    /// Largest boundary misfit on the check nodes, relative to the largest
    /// incident field there.
    pub residual: f64,
}

/// Accuracy certificate of a batch of solves.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveReport {
    pub max_residual: f64,
    pub condition: f64,
    pub retained: usize,
    pub singular_values: usize,
    pub resonance_warning: bool,
}

pub struct MfsSolver<'a> {
    obstacle: &'a ObstacleBoundary,
    modes: &'a ModeSet,
    options: SolverOptions,
    /// Truncated pseudoinverse of the collocation matrix.
    pinv: CMatrix,
    /// Charges-to-check-nodes matrix.
    check: CMatrix,
    condition: f64,
    retained: usize,
    singular_values: usize,
}

fn green_matrix(rows: &[Point], cols: &[Point], modes: &ModeSet) -> Result<CMatrix> {
    let entries = map_indexed(rows.len(), |i| {
        cols.iter().map(|&y| greens_function_near(rows[i], y, modes)).collect::<Result<Vec<_>>>()
    });
    let mut m = CMatrix::zeros(rows.len(), cols.len());
    for (i, row) in entries.into_iter().enumerate() {
        for (j, v) in row?.into_iter().enumerate() {
            m[(i, j)] = v;
        }
    }
    Ok(m)
}

impl<'a> MfsSolver<'a> {
    pub fn new(obstacle: &'a ObstacleBoundary, modes: &'a ModeSet, options: SolverOptions) -> Result<Self> {
        let nodes = obstacle.boundary_nodes();
        let charges = obstacle.source_nodes();
        if obstacle.is_empty() {
            return Ok(MfsSolver {
                obstacle,
                modes,
                options,
                pinv: CMatrix::zeros(0, 0),
                check: CMatrix::zeros(0, 0),
                condition: 1.0,
                retained: 0,
                singular_values: 0,
            });
        }
        let a = green_matrix(nodes, charges, modes)?;
        let check = green_matrix(obstacle.check_nodes(), charges, modes)?;

        let svd = a.svd(true, true);
        let (u, v_t) = match (svd.u, svd.v_t) {
            (Some(u), Some(v_t)) => (u, v_t),
            _ => return Err(Error::DecompositionFailure("collocation SVD")),
        };
        let s = &svd.singular_values;
        let s_max = s.max();
        if !(s_max > 0.0) {
            return Err(Error::IllConditioned(f64::INFINITY));
        }
        let mut pinv = CMatrix::zeros(charges.len(), nodes.len());
        let mut retained = 0;
        let mut s_min = s_max;
        for (i, &si) in s.iter().enumerate() {
            if si > options.sv_cutoff * s_max {
                retained += 1;
                s_min = s_min.min(si);
                // v_i s_i^-1 u_i^H
                pinv += v_t.row(i).adjoint() * (u.column(i).adjoint() / Complex64::from(si));
            }
        }
        let condition = s_max / s_min;
        if condition > options.max_condition {
            return Err(Error::IllConditioned(condition));
        }
        Ok(MfsSolver { obstacle, modes, options, pinv, check, condition, retained, singular_values: s.len() })
    }

    pub fn obstacle(&self) -> &ObstacleBoundary {
        self.obstacle
    }

    /// Condition number of the retained part of the collocation spectrum.
    pub fn condition(&self) -> f64 {
        self.condition
    }

    /// Fraction of singular values discarded by the truncation.
    pub fn discarded_fraction(&self) -> f64 {
        if self.singular_values == 0 {
            0.0
        } else {
            1.0 - self.retained as f64 / self.singular_values as f64
        }
    }

    /// Heuristic proxy for a nearby interior resonance of the obstacle.
    pub fn resonance_warning(&self) -> bool {
        self.discarded_fraction() > self.options.resonance_fraction
    }

    /// Charges for the point source at `source`, with the boundary residual
    /// certified on the check nodes.
    pub fn solve(&self, source: Point) -> Result<ScatteringSolution> {
        if self.obstacle.is_empty() {
            return Ok(ScatteringSolution { source, coefficients: Vec::new(), residual: 0.0 });
        }
        let incident = |pts: &[Point]| -> Result<CMatrix> {
            let v = pts.iter().map(|&p| greens_function_near(p, source, self.modes)).collect::<Result<Vec<_>>>()?;
            Ok(CMatrix::from_vec(v.len(), 1, v))
        };
        let rhs = -incident(self.obstacle.boundary_nodes())?;
        let c = &self.pinv * rhs;
        let g_check = incident(self.obstacle.check_nodes())?;
        let misfit = &self.check * &c + &g_check;
        let scale = g_check.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let worst = misfit.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let residual = if scale > 0.0 { worst / scale } else { worst };
        if !(residual <= self.options.residual_tol) {
            return Err(Error::ResidualTooLarge { residual, limit: self.options.residual_tol });
        }
        Ok(ScatteringSolution { source, coefficients: c.iter().copied().collect(), residual })
    }

    /// Response matrix over `array`, one solve per source.
    pub fn response_matrix(&self, array: &ArrayGeometry) -> Result<(ResponseMatrix, SolveReport)> {
        if let Some((x_min, _)) = self.obstacle.range_extent() {
            if !(array.x_a() < x_min) {
                return Err(Error::Geometry("the array must lie strictly left of the obstacle".into()));
            }
        }
        let sensors = array.sensors();
        let n = sensors.len();
        let mut report = SolveReport {
            max_residual: 0.0,
            condition: self.condition,
            retained: self.retained,
            singular_values: self.singular_values,
            resonance_warning: self.resonance_warning(),
        };
        let charges = self.obstacle.source_nodes();
        if charges.is_empty() {
            return Ok((ResponseMatrix::zeros(array.clone(), self.modes.k()), report));
        }
        let mut receive = CMatrix::zeros(n, charges.len());
        for (r, &p) in sensors.iter().enumerate() {
            for (m, &y) in charges.iter().enumerate() {
                receive[(r, m)] = greens_function(p, y, self.modes)?;
            }
        }
        let solutions = map_indexed(n, |s| {
            self.solve(sensors[s]).map_err(|e| Error::SourceFailed { index: s, cause: Box::new(e) })
        });
        let mut entries = CMatrix::zeros(n, n);
        for (s, sol) in solutions.into_iter().enumerate() {
            let sol = sol?;
            report.max_residual = report.max_residual.max(sol.residual);
            let c = CMatrix::from_column_slice(charges.len(), 1, &sol.coefficients);
            entries.set_column(s, &(&receive * c).column(0));
        }
        Ok((ResponseMatrix::new(entries, array.clone(), self.modes.k())?, report))
    }
}

/// Single solve with default options.
pub fn solve_scattered(obstacle: &ObstacleBoundary, source: Point, modes: &ModeSet) -> Result<ScatteringSolution> {
    MfsSolver::new(obstacle, modes, SolverOptions::default())?.solve(source)
}

/// Scattered field of `sol` at `p`. Uses the truncated modal series, so `p`
/// must be at least `modes.min_sep()` away in range from every charge.
pub fn evaluate_scattered(sol: &ScatteringSolution, obstacle: &ObstacleBoundary, p: Point, modes: &ModeSet) -> Result<Complex64> {
    if sol.coefficients.len() != obstacle.source_nodes().len() {
        return Err(Error::DimensionMismatch { expected: obstacle.source_nodes().len(), found: sol.coefficients.len() });
    }
    let mut u = Complex64::new(0.0, 0.0);
    for (c, &y) in sol.coefficients.iter().zip(obstacle.source_nodes()) {
        u += c * greens_function(p, y, modes)?;
    }
    Ok(u)
}

/// Response matrix with default solver options.
pub fn assemble_response_matrix(obstacle: &ObstacleBoundary, array: &ArrayGeometry, modes: &ModeSet) -> Result<ResponseMatrix> {
    let solver = MfsSolver::new(obstacle, modes, SolverOptions::default())?;
    Ok(solver.response_matrix(array)?.0)
}
