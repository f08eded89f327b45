//! Nyström solution of the lowest-Landau-level eigenvalue equation
//!
//! ```text
//! (sqrt(p^2+m^2) - m) φ(p)
//!   - γ/sqrt(2π) ∫ dk V̂0(p-k) [A(p)A(k) + B(p)B(k)] φ(k) = E φ(p)
//! ```
//!
//! with `A = sqrt((E+m)/2E)` and `B = A k/(E+m)`. The kernel is
//! logarithmically singular on the diagonal, which is handled by singularity
//! subtraction: with `g(k) = [A(p)A(k) + B(p)B(k)] φ(k)`,
//!
//! ```text
//! ∫ V̂0(p-k) g(k) dk ≈ Σ_{j≠i} V̂0(p-k_j) [g(k_j) - g(p)] w_j + g(p) c_I
//! ```
//!
//! where `c_I = ∫ V̂0`. Because `A^2 + B^2 = 1` the diagonal correction is
//! `c_I - Σ_{j≠i} V̂0(k_i-k_j) w_j`. The system is symmetrised by the
//! similarity `u = sqrt(w) φ`.

use alloc::format;
use alloc::vec::Vec;

use crate::eigen::{dot, lowest_eigenpair, SymMatrix};
use crate::error::{Error, Result};
use crate::kinematics::{dirac_weight, kinetic, spin_weight};
use crate::potential::{FieldConfig, PotentialEvaluator};
use crate::specfun::gauss_legendre;
use crate::INV_SQRT_2PI;

/// Symmetric quadrature grid on the whole momentum line.
///
/// Each half-line carries an `n/2`-point Gauss–Legendre rule mapped by
/// `k = s t / (1 - t)`, mirrored to negative `k`. Nodes cluster at the origin,
/// where the massless kernel is discontinuous across `k = 0` and where small
/// masses introduce structure on the scale `|k| ~ m`.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentumGrid {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    map_scale: f64,
}

impl MomentumGrid {
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn map_scale(&self) -> f64 {
        self.map_scale
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Index of the node at `-k_i`.
    #[inline]
    pub fn mirror(&self, i: usize) -> usize {
        self.nodes.len() - 1 - i
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&k, &w)| w * f(k))
            .sum()
    }

    /// Nodes beyond `9 s`, i.e. the outer tenth of each half-line map.
    fn is_edge(&self, i: usize) -> bool {
        libm::fabs(self.nodes[i]) > 9.0 * self.map_scale
    }
}

/// Even `n >= 8` nodes symmetric about the origin, none at zero.
pub fn build_grid(n: usize, map_scale: f64) -> Result<MomentumGrid> {
    if n < 8 || n % 2 != 0 {
        return Err(Error::InvalidArgument(format!(
            "momentum grid needs an even node count >= 8, got {n}"
        )));
    }
    if !(map_scale.is_finite() && map_scale > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "map scale must be positive, got {map_scale}"
        )));
    }
    let half = n / 2;
    let (x, w) = gauss_legendre(half);
    let mut pos = Vec::with_capacity(half);
    for (&s, &v) in x.iter().zip(&w) {
        let t = 0.5 * (1.0 + s);
        let one_minus = 0.5 * (1.0 - s);
        pos.push((map_scale * t / one_minus, 0.5 * v * map_scale / (one_minus * one_minus)));
    }
    let mut nodes = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    for &(k, wk) in pos.iter().rev() {
        nodes.push(-k);
        weights.push(wk);
    }
    for &(k, wk) in &pos {
        nodes.push(k);
        weights.push(wk);
    }
    Ok(MomentumGrid {
        nodes,
        weights,
        map_scale,
    })
}

/// Default compactification scale `2 max(1, gamma sqrt(eB0))`.
pub fn default_map_scale(cfg: &FieldConfig) -> f64 {
    2.0 * (cfg.gamma() * libm::sqrt(cfg.eb0())).max(1.0)
}

/// Symmetrised Nyström matrix together with its kinetic diagonal.
#[derive(Debug, Clone)]
pub struct Hamiltonian {
    pub matrix: SymMatrix,
    /// `sqrt(k_i^2 + m^2) - m`.
    pub kinetic: Vec<f64>,
}

impl Hamiltonian {
    /// The potential part, `matrix - diag(kinetic)`.
    pub fn potential_part(&self) -> SymMatrix {
        let mut p = self.matrix.clone();
        for (i, t) in self.kinetic.iter().enumerate() {
            p.set(i, i, p.get(i, i) - t);
        }
        p
    }
}

/// Assembles `H_ij` on `grid`. `ev` must have been built for `cfg.eb0()`.
pub fn assemble_hamiltonian(
    grid: &MomentumGrid,
    cfg: &FieldConfig,
    ev: &PotentialEvaluator,
) -> Result<Hamiltonian> {
    if ev.eb0() != cfg.eb0() {
        return Err(Error::InvalidArgument(format!(
            "potential evaluator built for eB0 = {} but config has eB0 = {}",
            ev.eb0(),
            cfg.eb0()
        )));
    }
    let k = grid.nodes();
    let w = grid.weights();
    let n = k.len();
    if k.windows(2).any(|p| p[1] <= p[0]) {
        return Err(Error::Assembly("grid nodes must be distinct and increasing".into()));
    }
    let m = cfg.mass();
    let kin: Vec<f64> = k.iter().map(|&ki| kinetic(ki, m)).collect();

    let mut matrix = SymMatrix::zeros(n);
    if cfg.gamma() == 0.0 {
        for (i, t) in kin.iter().enumerate() {
            matrix.set(i, i, *t);
        }
        return Ok(Hamiltonian {
            matrix,
            kinetic: kin,
        });
    }

    let c_i = ev.vhat0_integral()?;
    let g = cfg.gamma() * INV_SQRT_2PI;
    let sw: Vec<f64> = w.iter().map(|&x| libm::sqrt(x)).collect();
    let a: Vec<f64> = k.iter().map(|&ki| dirac_weight(ki, m)).collect();
    let b: Vec<f64> = k.iter().map(|&ki| spin_weight(ki, m)).collect();

    let rows: Vec<Vec<f64>> = crate::par::map_range(n, |i| {
        let mut row = alloc::vec![0.0; n];
        let mut subtracted = 0.0;
        for j in 0..n {
            if j == i {
                continue;
            }
            let v = ev.eval_abs(libm::fabs(k[i] - k[j]));
            subtracted += v * w[j];
            let f = a[i] * a[j] + b[i] * b[j];
            row[j] = -g * (sw[i] * sw[j]) * v * f;
        }
        row[i] = kin[i] - g * (c_i - subtracted);
        row
    });
    for (i, row) in rows.iter().enumerate() {
        for j in i..n {
            matrix.set_sym(i, j, row[j]);
        }
    }
    Ok(Hamiltonian {
        matrix,
        kinetic: kin,
    })
}

/// Lowest eigenpair of the discretised operator.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralResult {
    /// Lowest eigenvalue, rest mass subtracted.
    pub energy: f64,
    /// `φ(k_i)`, normalised so that `Σ w_i φ(k_i)^2 = 1`.
    pub eigenvector: Vec<f64>,
    /// `|H u - E u|` for the symmetrised vector `u = sqrt(w) φ`.
    pub residual: f64,
    pub grid_size: usize,
    pub converged: bool,
    pub kinetic_expectation: f64,
    pub potential_expectation: f64,
    pub grid: MomentumGrid,
}

impl SpectralResult {
    /// `Σ w_i φ_i^2`.
    pub fn norm(&self) -> f64 {
        self.grid
            .weights()
            .iter()
            .zip(&self.eigenvector)
            .map(|(w, p)| w * p * p)
            .sum()
    }

    /// Residual threshold that counts as an accurate eigenpair.
    pub fn residual_limit(&self) -> f64 {
        1e-8 * self.energy.abs().max(1.0)
    }

    /// Quadrature weight of `φ^2` on the outer tenth of the map.
    pub fn edge_mass(&self) -> f64 {
        (0..self.grid.len())
            .filter(|&i| self.grid.is_edge(i))
            .map(|i| self.grid.weights()[i] * self.eigenvector[i] * self.eigenvector[i])
            .sum()
    }
}

/// Smallest eigenvalue of `h` and its eigenvector.
///
/// The operator commutes with `k -> -k`, so when the matrix respects the
/// grid's mirror symmetry the problem splits into even and odd blocks of half
/// the size; the lower of the two block minima is returned. At `m = 0` the
/// blocks coincide and the even (sign-symmetric) vector is reported.
pub fn ground_state(h: &Hamiltonian, grid: &MomentumGrid) -> Result<SpectralResult> {
    let n = grid.len();
    let mat = &h.matrix;
    if mat.dim() != n || h.kinetic.len() != n {
        return Err(Error::InvalidArgument(format!(
            "matrix of order {} does not match a grid of {n} nodes",
            mat.dim()
        )));
    }
    if mat.as_slice().iter().any(|v| !v.is_finite()) {
        return Err(Error::Eigensolver("matrix has non-finite entries".into()));
    }

    let u = if mirror_symmetric(mat, grid) {
        let half = n / 2;
        let mut even = SymMatrix::zeros(half);
        let mut odd = SymMatrix::zeros(half);
        for a in 0..half {
            let pa = half + a;
            for b in a..half {
                let pb = half + b;
                let direct = mat.get(pa, pb);
                let crossed = mat.get(pa, grid.mirror(pb));
                even.set_sym(a, b, direct + crossed);
                odd.set_sym(a, b, direct - crossed);
            }
        }
        let (le, ve) = lowest_eigenpair(&even)?;
        let (lo, vo) = lowest_eigenpair(&odd)?;
        let (sign, v) = if le <= lo { (1.0, ve) } else { (-1.0, vo) };
        let s = core::f64::consts::FRAC_1_SQRT_2;
        let mut u = alloc::vec![0.0; n];
        for (a, va) in v.iter().enumerate() {
            u[half + a] = s * va;
            u[grid.mirror(half + a)] = sign * s * va;
        }
        u
    } else {
        lowest_eigenpair(mat)?.1
    };
    finish(h, grid, u)
}

fn mirror_symmetric(mat: &SymMatrix, grid: &MomentumGrid) -> bool {
    let n = grid.len();
    if n % 2 != 0 {
        return false;
    }
    let scale = mat
        .as_slice()
        .iter()
        .fold(0.0f64, |m, v| m.max(libm::fabs(*v)))
        .max(f64::MIN_POSITIVE);
    for i in 0..n {
        for j in 0..n {
            let d = mat.get(i, j) - mat.get(grid.mirror(i), grid.mirror(j));
            if libm::fabs(d) > 1e-13 * scale {
                return false;
            }
        }
    }
    true
}

fn finish(h: &Hamiltonian, grid: &MomentumGrid, mut u: Vec<f64>) -> Result<SpectralResult> {
    let n = grid.len();
    let norm = libm::sqrt(dot(&u, &u));
    if !(norm > 0.0 && norm.is_finite()) {
        return Err(Error::Eigensolver("zero eigenvector".into()));
    }
    // Fix the overall sign so the largest component is positive.
    let big = u
        .iter()
        .copied()
        .fold(0.0f64, |m, v| if libm::fabs(v) > libm::fabs(m) { v } else { m });
    let flip = if big < 0.0 { -1.0 } else { 1.0 };
    for v in &mut u {
        *v *= flip / norm;
    }
    let hu = h.matrix.mul_vec(&u);
    let energy = dot(&hu, &u);
    let residual = libm::sqrt(
        hu.iter()
            .zip(&u)
            .map(|(a, b)| (a - energy * b) * (a - energy * b))
            .sum(),
    );
    let kinetic_expectation: f64 = h.kinetic.iter().zip(&u).map(|(t, x)| t * x * x).sum();
    let eigenvector: Vec<f64> = u
        .iter()
        .zip(grid.weights())
        .map(|(x, w)| x / libm::sqrt(*w))
        .collect();
    if !energy.is_finite() {
        return Err(Error::Eigensolver("non-finite eigenvalue".into()));
    }
    let mut res = SpectralResult {
        energy,
        eigenvector,
        residual,
        grid_size: n,
        converged: false,
        kinetic_expectation,
        potential_expectation: energy - kinetic_expectation,
        grid: grid.clone(),
    };
    res.converged = res.residual <= res.residual_limit();
    Ok(res)
}

/// Grid-refinement controls for [`solve_converged`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    /// Stop once `|E(2n) - E(n)| < tol * max(1, |E|)`.
    pub tol: f64,
    /// First grid size (rounded up to an even number, at least 32).
    pub n0: usize,
    /// Largest grid tried.
    pub n_max: usize,
    /// Compactification scale; `None` picks [`default_map_scale`].
    pub map_scale: Option<f64>,
    /// Edge weight of `φ^2` above which the map scale is doubled.
    pub edge_mass_limit: f64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            tol: 1e-6,
            n0: 64,
            n_max: 4096,
            map_scale: None,
            edge_mass_limit: 1e-6,
        }
    }
}

impl SolveOptions {
    pub fn with_tol(tol: f64, n0: usize) -> Self {
        Self {
            tol,
            n0,
            ..Self::default()
        }
    }
}

/// Solves on one grid, widening the map while the eigenvector leaks onto the
/// outer nodes.
pub fn solve_on_grid(
    n: usize,
    map_scale: f64,
    cfg: &FieldConfig,
    ev: &PotentialEvaluator,
    edge_mass_limit: f64,
) -> Result<SpectralResult> {
    let mut scale = map_scale;
    let mut attempt = 0;
    loop {
        let grid = build_grid(n, scale)?;
        let h = assemble_hamiltonian(&grid, cfg, ev)?;
        let res = ground_state(&h, &grid)?;
        attempt += 1;
        if res.edge_mass() <= edge_mass_limit || attempt >= 6 {
            return Ok(res);
        }
        scale *= 2.0;
    }
}

/// Doubles the grid from `n0` until the energy is stable to `tol`.
///
/// Non-convergence within `n_max` is reported through
/// [`SpectralResult::converged`], not as an error.
pub fn solve_converged(
    cfg: &FieldConfig,
    ev: &PotentialEvaluator,
    opts: &SolveOptions,
) -> Result<SpectralResult> {
    if !(opts.tol > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "tolerance must be positive, got {}",
            opts.tol
        )));
    }
    let mut n = opts.n0.max(32);
    n += n % 2;
    let scale = opts.map_scale.unwrap_or_else(|| default_map_scale(cfg));
    let mut prev = solve_on_grid(n, scale, cfg, ev, opts.edge_mass_limit)?;
    loop {
        if 2 * n > opts.n_max {
            prev.converged = false;
            return Ok(prev);
        }
        n *= 2;
        let next = solve_on_grid(n, prev.grid.map_scale(), cfg, ev, opts.edge_mass_limit)?;
        if next.grid.map_scale() != prev.grid.map_scale() {
            // The map widened at this size; restart the comparison from here.
            prev = next;
            continue;
        }
        let change = libm::fabs(next.energy - prev.energy);
        if change < opts.tol * next.energy.abs().max(1.0) {
            let mut done = next;
            done.converged = done.residual <= done.residual_limit();
            return Ok(done);
        }
        prev = next;
    }
}

/// Diagnostics of the computed ground-state function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenfunctionReport {
    /// `max_i |φ(k_i)|`.
    pub max_abs: f64,
    /// `max |k φ(k)|` over the outer third of the nodes, the fitted `c` of
    /// `|φ| <= c/|k|`.
    pub tail_coefficient: f64,
    /// The product `|k φ(k)|` does not grow into the outermost sixth of the
    /// nodes.
    pub tail_bounded: bool,
    /// `Σ w φ^2`.
    pub norm: f64,
}

pub fn eigenfunction_checks(res: &SpectralResult, grid: &MomentumGrid) -> EigenfunctionReport {
    let n = grid.len();
    let phi = &res.eigenvector;
    let max_abs = phi.iter().fold(0.0f64, |m, v| m.max(libm::fabs(*v)));

    // Nodes ordered by |k|: the positive half ascending, mirrored.
    let half = n / 2;
    let third = (half / 3).max(1);
    let sixth = (half / 6).max(1);
    let product = |a: usize| {
        let i = half + a;
        let j = grid.mirror(i);
        libm::fabs(grid.nodes()[i] * phi[i]).max(libm::fabs(grid.nodes()[j] * phi[j]))
    };
    let tail_coefficient = (half - third..half).map(product).fold(0.0, f64::max);
    let inner = (half - third..half - sixth).map(product).fold(0.0, f64::max);
    let outer = (half - sixth..half).map(product).fold(0.0, f64::max);
    let norm = grid
        .weights()
        .iter()
        .zip(phi)
        .map(|(w, p)| w * p * p)
        .sum();
    EigenfunctionReport {
        max_abs,
        tail_coefficient,
        tail_bounded: tail_coefficient.is_finite() && outer <= inner * (1.0 + 1e-9),
        norm,
    }
}

/// Relative form bound
/// `|<V>| <= (γπ/2) <E_A> + γ (π/2) sqrt(eB0)` with `<E_A> = <T> + m`.
pub fn form_bound_check(res: &SpectralResult, cfg: &FieldConfig) -> bool {
    let half_pi = core::f64::consts::FRAC_PI_2;
    let g = cfg.gamma();
    let lhs = libm::fabs(res.potential_expectation);
    let rhs = g * half_pi * (res.kinetic_expectation + cfg.mass()) + g * half_pi * libm::sqrt(cfg.eb0());
    lhs <= rhs
}
