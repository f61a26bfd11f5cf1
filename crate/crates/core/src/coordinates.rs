//! Block-by-block coordinate expansions of the structure-dependent formulas.
//!
//! Every table below is written out term by term in the four-block notation
//! (block `k`, offset `i` is coordinate `k·n + i`) and never consults the
//! [`StructureOperator`](crate::structure::StructureOperator). Assemblers
//! here are the independent route that the compact matrix formulas in
//! [`forms`](crate::forms) and [`mechanics`](crate::mechanics) are checked
//! against.

use nalgebra::{DMatrix, DVector};

use crate::structure::{ChartDim, StructureKind};

/// `(d_J L)_{block·n+i} = sign · ∂L/∂x_{partial·n+i}`
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VerticalTerm {
    pub block: usize,
    pub sign: i8,
    pub partial: usize,
}

/// `V_J ∋ sign · X^{velocity·n+i} ∂/∂x_{direction·n+i}`
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LiouvilleTerm {
    pub velocity: usize,
    pub sign: i8,
    pub direction: usize,
}

/// `sign · ∂²L/∂x_{left·n+j}∂x_{partial·n+i} · dx_{left·n+j} ∧ dx_{right·n+i}`,
/// summed over `i, j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WedgeTerm {
    pub left: usize,
    pub sign: i8,
    pub partial: usize,
    pub right: usize,
}

/// Row `dx_{row·n+j}` of the bracketed dynamics system:
/// `sign · [Σ_b X^b ∂²L/∂x_b∂x_{partial·n+j}] + ∂L/∂x_{row·n+j} = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BracketRow {
    pub row: usize,
    pub sign: i8,
    pub partial: usize,
}

/// `∂/∂t(∂L/∂x_{time·n+i}) + sign · ∂L/∂x_{gradient·n+i} = 0`
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ElEquation {
    pub time: usize,
    pub sign: i8,
    pub gradient: usize,
}

const fn v(block: usize, sign: i8, partial: usize) -> VerticalTerm {
    VerticalTerm { block, sign, partial }
}

const fn lv(velocity: usize, sign: i8, direction: usize) -> LiouvilleTerm {
    LiouvilleTerm {
        velocity,
        sign,
        direction,
    }
}

const fn w(left: usize, sign: i8, partial: usize, right: usize) -> WedgeTerm {
    WedgeTerm {
        left,
        sign,
        partial,
        right,
    }
}

const fn br(row: usize, sign: i8, partial: usize) -> BracketRow {
    BracketRow { row, sign, partial }
}

const fn el(time: usize, sign: i8, gradient: usize) -> ElEquation {
    ElEquation { time, sign, gradient }
}

pub fn vertical_pattern(kind: StructureKind) -> [VerticalTerm; 4] {
    match kind {
        // ∂_{n+i} dx_i − ∂_i dx_{n+i} + ∂_{3n+i} dx_{2n+i} − ∂_{2n+i} dx_{3n+i}
        StructureKind::F => [v(0, 1, 1), v(1, -1, 0), v(2, 1, 3), v(3, -1, 2)],
        // ∂_{2n+i} dx_i − ∂_{3n+i} dx_{n+i} − ∂_i dx_{2n+i} + ∂_{n+i} dx_{3n+i}
        StructureKind::G => [v(0, 1, 2), v(1, -1, 3), v(2, -1, 0), v(3, 1, 1)],
        // ∂_{3n+i} dx_i + ∂_{2n+i} dx_{n+i} − ∂_{n+i} dx_{2n+i} − ∂_i dx_{3n+i}
        StructureKind::H => [v(0, 1, 3), v(1, 1, 2), v(2, -1, 1), v(3, -1, 0)],
    }
}

pub fn liouville_pattern(kind: StructureKind) -> [LiouvilleTerm; 4] {
    match kind {
        // X^i ∂_{n+i} − X^{n+i} ∂_i + X^{2n+i} ∂_{3n+i} − X^{3n+i} ∂_{2n+i}
        StructureKind::F => [lv(0, 1, 1), lv(1, -1, 0), lv(2, 1, 3), lv(3, -1, 2)],
        // X^i ∂_{2n+i} − X^{n+i} ∂_{3n+i} − X^{2n+i} ∂_i + X^{3n+i} ∂_{n+i}
        StructureKind::G => [lv(0, 1, 2), lv(1, -1, 3), lv(2, -1, 0), lv(3, 1, 1)],
        // X^i ∂_{3n+i} + X^{n+i} ∂_{2n+i} − X^{2n+i} ∂_{n+i} − X^{3n+i} ∂_i
        StructureKind::H => [lv(0, 1, 3), lv(1, 1, 2), lv(2, -1, 1), lv(3, -1, 0)],
    }
}

/// The sixteen wedge terms of `Φ_L^J = -d d_J L`.
#[rustfmt::skip]
pub fn wedge_terms(kind: StructureKind) -> [WedgeTerm; 16] {
    match kind {
        StructureKind::F => [
            w(0, -1, 1, 0), w(0, 1, 0, 1), w(0, -1, 3, 2), w(0, 1, 2, 3),
            w(1, -1, 1, 0), w(1, 1, 0, 1), w(1, -1, 3, 2), w(1, 1, 2, 3),
            w(2, -1, 1, 0), w(2, 1, 0, 1), w(2, -1, 3, 2), w(2, 1, 2, 3),
            w(3, -1, 1, 0), w(3, 1, 0, 1), w(3, -1, 3, 2), w(3, 1, 2, 3),
        ],
        StructureKind::G => [
            w(0, -1, 2, 0), w(0, 1, 3, 1), w(0, 1, 0, 2), w(0, -1, 1, 3),
            w(1, -1, 2, 0), w(1, 1, 3, 1), w(1, 1, 0, 2), w(1, -1, 1, 3),
            w(2, -1, 2, 0), w(2, 1, 3, 1), w(2, 1, 0, 2), w(2, -1, 1, 3),
            w(3, -1, 2, 0), w(3, 1, 3, 1), w(3, 1, 0, 2), w(3, -1, 1, 3),
        ],
        StructureKind::H => [
            w(0, -1, 3, 0), w(0, -1, 2, 1), w(0, 1, 1, 2), w(0, 1, 0, 3),
            w(1, -1, 3, 0), w(1, -1, 2, 1), w(1, 1, 1, 2), w(1, 1, 0, 3),
            w(2, -1, 3, 0), w(2, -1, 2, 1), w(2, 1, 1, 2), w(2, 1, 0, 3),
            w(3, -1, 3, 0), w(3, -1, 2, 1), w(3, 1, 1, 2), w(3, 1, 0, 3),
        ],
    }
}

pub fn bracket_rows(kind: StructureKind) -> [BracketRow; 4] {
    match kind {
        StructureKind::F => [br(0, -1, 1), br(1, 1, 0), br(2, -1, 3), br(3, 1, 2)],
        StructureKind::G => [br(0, -1, 2), br(1, 1, 3), br(2, 1, 0), br(3, -1, 1)],
        StructureKind::H => [br(0, -1, 3), br(1, -1, 2), br(2, 1, 1), br(3, 1, 0)],
    }
}

pub fn el_equations(kind: StructureKind) -> [ElEquation; 4] {
    match kind {
        StructureKind::F => [el(0, 1, 1), el(1, -1, 0), el(2, 1, 3), el(3, -1, 2)],
        StructureKind::G => [el(0, 1, 2), el(1, -1, 3), el(2, -1, 0), el(3, 1, 1)],
        StructureKind::H => [el(0, 1, 3), el(1, 1, 2), el(2, -1, 1), el(3, -1, 0)],
    }
}

fn s(sign: i8) -> f64 {
    f64::from(sign)
}

/// `d_J L` assembled from the vertical pattern.
pub fn vertical_differential(kind: StructureKind, dim: ChartDim, gradient: &DVector<f64>) -> DVector<f64> {
    let mut out = DVector::zeros(dim.total());
    for t in vertical_pattern(kind) {
        for i in 0..dim.n() {
            out[dim.index(t.block, i)] = s(t.sign) * gradient[dim.index(t.partial, i)];
        }
    }
    out
}

/// `V_J = J(ξ)` assembled from the Liouville pattern.
pub fn liouville_field(kind: StructureKind, dim: ChartDim, velocity: &DVector<f64>) -> DVector<f64> {
    let mut out = DVector::zeros(dim.total());
    for t in liouville_pattern(kind) {
        for i in 0..dim.n() {
            out[dim.index(t.direction, i)] += s(t.sign) * velocity[dim.index(t.velocity, i)];
        }
    }
    out
}

/// `E_L^J = V_J(L) − L` as the displayed coordinate sum.
pub fn energy(kind: StructureKind, dim: ChartDim, value: f64, gradient: &DVector<f64>, velocity: &DVector<f64>) -> f64 {
    let mut e = 0.0;
    for t in liouville_pattern(kind) {
        for i in 0..dim.n() {
            e += s(t.sign) * velocity[dim.index(t.velocity, i)] * gradient[dim.index(t.direction, i)];
        }
    }
    e - value
}

/// `dE_L^J` row by row with the velocities held fixed:
/// `(dE)_b = Σ sign · X^{velocity·n+i} ∂²L/∂x_b∂x_{direction·n+i} − ∂L/∂x_b`.
pub fn energy_differential(
    kind: StructureKind,
    dim: ChartDim,
    gradient: &DVector<f64>,
    hessian: &DMatrix<f64>,
    velocity: &DVector<f64>,
) -> DVector<f64> {
    let total = dim.total();
    let mut out = -gradient.clone();
    for b in 0..total {
        for t in liouville_pattern(kind) {
            for i in 0..dim.n() {
                out[b] += s(t.sign) * velocity[dim.index(t.velocity, i)] * hessian[(b, dim.index(t.direction, i))];
            }
        }
    }
    out
}

/// Matrix of `Φ_L^J` from the sixteen wedge terms, with
/// `(dx_a ∧ dx_b)(X, Y) = X_a Y_b − X_b Y_a`.
pub fn wedge_matrix(kind: StructureKind, dim: ChartDim, hessian: &DMatrix<f64>) -> DMatrix<f64> {
    let total = dim.total();
    let mut m = DMatrix::zeros(total, total);
    for t in wedge_terms(kind) {
        for j in 0..dim.n() {
            for i in 0..dim.n() {
                let a = dim.index(t.left, j);
                let b = dim.index(t.right, i);
                let c = s(t.sign) * hessian[(a, dim.index(t.partial, i))];
                m[(a, b)] += c;
                m[(b, a)] -= c;
            }
        }
    }
    m
}

/// The bracketed dynamics system `coefficients · ξ + constants = 0`, one row
/// per `dx_a`.
#[derive(Debug, Clone, PartialEq)]
pub struct LiteralSystem {
    pub coefficients: DMatrix<f64>,
    pub constants: DVector<f64>,
    /// For each row, the Hessian row its bracket sums over and the bracket
    /// sign.
    pub bracket: Vec<(usize, i8)>,
}

impl LiteralSystem {
    pub fn assemble(kind: StructureKind, dim: ChartDim, gradient: &DVector<f64>, hessian: &DMatrix<f64>) -> Self {
        let total = dim.total();
        let mut coefficients = DMatrix::zeros(total, total);
        let mut constants = DVector::zeros(total);
        let mut bracket = vec![(0, 1); total];
        for r in bracket_rows(kind) {
            for j in 0..dim.n() {
                let row = dim.index(r.row, j);
                let partial = dim.index(r.partial, j);
                for b in 0..total {
                    coefficients[(row, b)] = s(r.sign) * hessian[(b, partial)];
                }
                constants[row] = gradient[row];
                bracket[row] = (partial, r.sign);
            }
        }
        LiteralSystem {
            coefficients,
            constants,
            bracket,
        }
    }

    /// Largest coefficient mismatch against the compact system
    /// `hessian · ξ = rhs`: row `a` must equal `σ·(hessian row r)` with
    /// constant `−σ·rhs_r`, where `(r, σ)` is the row's bracket.
    pub fn deviation_from_compact(&self, hessian: &DMatrix<f64>, rhs: &DVector<f64>) -> f64 {
        let mut worst: f64 = 0.0;
        for (a, &(r, sign)) in self.bracket.iter().enumerate() {
            let sign = s(sign);
            for b in 0..hessian.ncols() {
                worst = worst.max((self.coefficients[(a, b)] - sign * hessian[(r, b)]).abs());
            }
            worst = worst.max((self.constants[a] + sign * rhs[r]).abs());
        }
        worst
    }

    /// `coefficients · ξ + constants`
    pub fn residual(&self, velocity: &DVector<f64>) -> DVector<f64> {
        &self.coefficients * velocity + &self.constants
    }
}

/// Euler–Lagrange residuals with `∂/∂t(∂L/∂x_a)` expanded as `Σ_b H_ab v_b`,
/// indexed by the coordinate whose partial is differentiated in time.
pub fn el_residual(
    kind: StructureKind,
    dim: ChartDim,
    gradient: &DVector<f64>,
    hessian: &DMatrix<f64>,
    velocity: &DVector<f64>,
) -> DVector<f64> {
    let rate = hessian * velocity;
    let mut out = DVector::zeros(dim.total());
    for eq in el_equations(kind) {
        for i in 0..dim.n() {
            let a = dim.index(eq.time, i);
            out[a] = rate[a] + s(eq.sign) * gradient[dim.index(eq.gradient, i)];
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structure::StructureOperator;

    fn dim(n: usize) -> ChartDim {
        ChartDim::new(n).unwrap()
    }

    #[test]
    fn every_table_covers_each_block_once() {
        for kind in StructureKind::ALL {
            let mut seen = [0; 4];
            for t in vertical_pattern(kind) {
                seen[t.block] += 1;
            }
            assert_eq!(seen, [1; 4]);
            let mut seen = [[0; 4]; 4];
            for t in wedge_terms(kind) {
                seen[t.left][t.right] += 1;
            }
            assert_eq!(seen, [[1; 4]; 4]);
            let mut rows = [0; 4];
            for r in bracket_rows(kind) {
                rows[r.row] += 1;
            }
            assert_eq!(rows, [1; 4]);
        }
    }

    #[test]
    fn free_quadratic_wedge_for_f() {
        // Hess = I gives 2(dx0∧dx1 + dx2∧dx3)
        let m = wedge_matrix(StructureKind::F, dim(1), &DMatrix::identity(4, 4));
        let mut expected = DMatrix::zeros(4, 4);
        expected[(0, 1)] = 2.0;
        expected[(1, 0)] = -2.0;
        expected[(2, 3)] = 2.0;
        expected[(3, 2)] = -2.0;
        assert_eq!(m, expected);
    }

    #[test]
    fn liouville_matches_operator() {
        let d = dim(2);
        let x = DVector::from_fn(8, |i, _| (i as f64) * 0.5 - 1.7);
        for kind in StructureKind::ALL {
            let op = StructureOperator::build(kind, d);
            assert_eq!(liouville_field(kind, d, &x), op.apply(&x).unwrap());
        }
    }

    #[test]
    fn literal_system_tracks_compact_rows() {
        let d = dim(1);
        let h = DMatrix::from_fn(4, 4, |i, j| 1.0 / (1.0 + i as f64 + j as f64));
        let g = DVector::from_vec(vec![0.3, -0.1, 0.7, 1.1]);
        for kind in StructureKind::ALL {
            let rhs = StructureOperator::build(kind, d).apply(&g).unwrap();
            let sys = LiteralSystem::assemble(kind, d, &g, &h);
            assert!(sys.deviation_from_compact(&h, &rhs) < 1e-15);
        }
    }
}
