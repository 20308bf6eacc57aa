//! Trace functionals `Tr h(Φ(f(A))^{1/2} Ψ(g(B)) Φ(f(A))^{1/2})` and the
//! variational formula `Tr h(A) = inf_B Tr(AB - hˇ(B))`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matcore::{func_calc_with, HermitianMatrix, PdMatrix, EIGEN_FLOOR};
use crate::posmap::PositiveMap;
use crate::scalarfun::{
    self, breve, check, check_func_eq1, is_nondecreasing_on_grid, is_positive_operator_monotone,
    is_positive_operator_monotone_decreasing, legendre_numeric, tilde, RealFunction,
    ScalarFunction, TransformedFunction, LEGENDRE_TOL,
};

/// Samples used when checking condition (1) during validation.
const VALIDATION_SAMPLES: usize = 400;
const VALIDATION_SEED: u64 = 0x5eed;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Convex,
    Concave,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Convex => "convex",
            Mode::Concave => "concave",
        })
    }
}

/// The tuple `(h, f, g, Φ, Ψ)` plus the expected curvature.
#[derive(Clone, Debug)]
pub struct FunctionalSpec {
    pub h: ScalarFunction,
    pub f: ScalarFunction,
    pub g: ScalarFunction,
    pub phi: PositiveMap,
    pub psi: PositiveMap,
    pub mode: Mode,
    /// Use `Tr / k` instead of `Tr`.
    pub normalized: bool,
}

impl FunctionalSpec {
    pub fn new(
        h: ScalarFunction,
        f: ScalarFunction,
        g: ScalarFunction,
        phi: PositiveMap,
        psi: PositiveMap,
        mode: Mode,
    ) -> Result<Self> {
        if phi.out_dim() != psi.out_dim() {
            return Err(Error::DimensionMismatch {
                expected: phi.out_dim(),
                found: psi.out_dim(),
            });
        }
        Ok(Self {
            h,
            f,
            g,
            phi,
            psi,
            mode,
            normalized: false,
        })
    }

    pub fn with_normalized_trace(mut self, normalized: bool) -> Self {
        self.normalized = normalized;
        self
    }

    /// Output dimension `k` shared by `Φ` and `Ψ`.
    pub fn out_dim(&self) -> usize {
        self.phi.out_dim()
    }

    /// Checks the hypotheses under which the functional is jointly convex (resp. concave).
    ///
    /// Convex mode needs `h` nondecreasing, `h~` concave, `x h(x) -> 0` at 0,
    /// `h˘` satisfying condition (1), and `f`, `g` positive operator monotone
    /// decreasing. Concave mode needs `h` concave nondecreasing and sublinear,
    /// `hˇ` satisfying condition (1), and `f`, `g` positive operator monotone.
    pub fn validate(&self) -> Result<()> {
        let fail = |what: String| Err(Error::Precondition(what));
        if !is_nondecreasing_on_grid(&self.h)? {
            return fail(format!(
                "h = {} is not nondecreasing; nonincreasing h is unsupported",
                self.h
            ));
        }
        match self.mode {
            Mode::Convex => {
                let hb = breve(&self.h)?;
                if !check_func_eq1(&hb, VALIDATION_SAMPLES, VALIDATION_SEED)?.passed {
                    return fail(format!("breve of {} violates condition (1)", self.h));
                }
                for (name, fun) in [("f", &self.f), ("g", &self.g)] {
                    if !is_positive_operator_monotone_decreasing(fun)? {
                        return fail(format!(
                            "{name} = {fun} is not positive operator monotone decreasing"
                        ));
                    }
                }
            }
            Mode::Concave => {
                let hc = check(&self.h)?;
                if !check_func_eq1(&hc, VALIDATION_SAMPLES, VALIDATION_SEED)?.passed {
                    return fail(format!("check of {} violates condition (1)", self.h));
                }
                for (name, fun) in [("f", &self.f), ("g", &self.g)] {
                    if !is_positive_operator_monotone(fun)? {
                        return fail(format!("{name} = {fun} is not positive operator monotone"));
                    }
                }
            }
        }
        Ok(())
    }

    /// `(A', B') = (Φ(f(A)), Ψ(g(B)))`.
    pub fn transformed_pair(&self, a: &PdMatrix, b: &PdMatrix) -> Result<(PdMatrix, PdMatrix)> {
        let fa = apply_fn(a, &self.f)?.to_pd()?;
        let gb = apply_fn(b, &self.g)?.to_pd()?;
        Ok((self.phi.apply_pd(&fa)?, self.psi.apply_pd(&gb)?))
    }

    fn finish_trace(&self, value: f64) -> f64 {
        if self.normalized {
            value / self.out_dim() as f64
        } else {
            value
        }
    }
}

/// `f(A)` by functional calculus.
pub fn apply_fn(a: &PdMatrix, f: &dyn RealFunction) -> Result<HermitianMatrix> {
    func_calc_with(a, |x| f.eval(x))
}

/// `Tr f(A)` straight from the spectrum.
pub fn trace_of(a: &HermitianMatrix, f: &dyn RealFunction) -> Result<f64> {
    let mut total = 0.0;
    for (index, &value) in a.eigenvalues()?.iter().enumerate() {
        if value <= EIGEN_FLOOR {
            return Err(Error::Domain {
                index,
                value,
                floor: EIGEN_FLOOR,
            });
        }
        total += f.eval(value)?;
    }
    Ok(total)
}

/// `Tr h(A'^{1/2} B' A'^{1/2})`.
pub fn core_functional(spec: &FunctionalSpec, a: &PdMatrix, b: &PdMatrix) -> Result<f64> {
    let (ap, bp) = spec.transformed_pair(a, b)?;
    let inner = bp.as_hermitian().sandwich(ap.sqrt()?.as_hermitian())?;
    Ok(spec.finish_trace(trace_of(&inner, &spec.h)?))
}

/// `-Tr h~(A'^{-1/2} B'^{-1} A'^{-1/2})`, equal to [`core_functional`].
pub fn inverse_form(spec: &FunctionalSpec, a: &PdMatrix, b: &PdMatrix) -> Result<f64> {
    if spec.mode != Mode::Convex {
        return Err(Error::Precondition(
            "inverse form is defined for convex-mode specs".into(),
        ));
    }
    let (ap, bp) = spec.transformed_pair(a, b)?;
    let inner = bp
        .inverse()?
        .as_hermitian()
        .sandwich(ap.inv_sqrt()?.as_hermitian())?;
    Ok(-spec.finish_trace(trace_of(&inner, &tilde(&spec.h))?))
}

/// `Tr h(A)` through scalar duality: `Σ_i inf_b (λ_i b - hˇ(b))`.
pub fn trace_h_variational_oracle(h: &ScalarFunction, a: &PdMatrix) -> Result<f64> {
    let hc = check(h)?;
    let mut total = 0.0;
    for &lambda in a.eigenvalues() {
        let c = legendre_numeric(&hc, lambda, LEGENDRE_TOL)?;
        if c.at_boundary {
            return Err(Error::BoundaryInfimum(lambda));
        }
        total += c.value;
    }
    Ok(total)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PgdInit {
    /// Start from the commuting stationary point.
    Stationary,
    Identity,
}

#[derive(Clone, Copy, Debug)]
pub struct SolverOptions {
    pub max_iter: usize,
    /// Stop once `f_old - f_new < rel_improvement * (1 + |f_new|)`.
    pub rel_improvement: f64,
    /// Eigenvalue floor of the projection onto the PD cone.
    pub clamp: f64,
    pub armijo: f64,
    /// Relative oracle gap accepted at the iteration cap.
    pub tol: f64,
    pub init: PgdInit,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            max_iter: 500,
            rel_improvement: 1e-10,
            clamp: 1e-8,
            armijo: 1e-4,
            tol: 1e-6,
            init: PgdInit::Stationary,
        }
    }
}

#[derive(Clone, Debug)]
pub struct VariationalResult {
    pub value: f64,
    pub minimizer: PdMatrix,
    pub iterations: usize,
    pub oracle_value: f64,
    pub gap_vs_oracle: f64,
    pub grad_norm: f64,
    /// The eigenvalue clamp was active at the returned point.
    pub boundary_active: bool,
}

struct Descent {
    point: PdMatrix,
    value: f64,
    iterations: usize,
    grad_norm: f64,
    clamp_active: bool,
}

fn project(y: &HermitianMatrix, floor: f64) -> Result<(PdMatrix, bool)> {
    let clamped = y.eigenvalues()?.iter().any(|&l| l < floor);
    let p = if clamped {
        y.map_spectrum(|l| l.max(floor))?
    } else {
        y.clone()
    };
    Ok((p.to_pd()?, clamped))
}

/// Consecutive small improvements that end a descent.
const STALL_RUN: usize = 5;

/// Gradient descent over Hermitian matrices with projection onto
/// `{X : X >= clamp}`, Barzilai-Borwein trial steps and Armijo backtracking.
fn projected_gradient_descent(
    objective: impl Fn(&PdMatrix) -> Result<f64>,
    gradient: impl Fn(&PdMatrix) -> Result<HermitianMatrix>,
    init: PdMatrix,
    opts: &SolverOptions,
) -> Result<Descent> {
    let (mut x, mut clamp_active) = project(init.as_hermitian(), opts.clamp)?;
    let mut fx = objective(&x)?;
    let mut gx = gradient(&x)?;
    let mut step = x.as_hermitian().frobenius_norm() / gx.frobenius_norm().max(1e-300) * 1e-2;
    let mut iterations = 0;
    let mut stalled = 0;
    while iterations < opts.max_iter {
        iterations += 1;
        let gnorm = gx.frobenius_norm();
        if gnorm <= 1e-14 * (1.0 + x.as_hermitian().frobenius_norm()) {
            break;
        }
        let mut alpha = step;
        let mut accepted = None;
        for _ in 0..80 {
            let trial = x.as_hermitian().sub(&gx.scale(alpha))?;
            let (candidate, clamped) = project(&trial, opts.clamp)?;
            let decrease = gx.inner(&x.as_hermitian().sub(candidate.as_hermitian())?)?;
            match objective(&candidate) {
                Ok(fc) if fc.is_finite() && fc <= fx - opts.armijo * decrease => {
                    accepted = Some((candidate, fc, clamped));
                    break;
                }
                Ok(_) | Err(Error::Domain { .. }) | Err(Error::NonFinite(_)) => alpha *= 0.5,
                Err(e) => return Err(e),
            }
        }
        let Some((next, fnext, clamped)) = accepted else {
            break;
        };
        let gnext = gradient(&next)?;
        let s = next.as_hermitian().sub(x.as_hermitian())?;
        let y = gnext.sub(&gx)?;
        let sy = s.inner(&y)?;
        step = if sy > 0.0 {
            s.inner(&s)? / sy
        } else {
            alpha * 2.0
        };
        let improvement = fx - fnext;
        x = next;
        fx = fnext;
        gx = gnext;
        clamp_active = clamped;
        // a single short BB step is not convergence; require a run of them
        if improvement < opts.rel_improvement * (1.0 + fx.abs()) {
            stalled += 1;
            if stalled >= STALL_RUN {
                break;
            }
        } else {
            stalled = 0;
        }
    }
    Ok(Descent {
        point: x,
        value: fx,
        iterations,
        grad_norm: gx.frobenius_norm(),
        clamp_active,
    })
}

/// Spectral gradient `φ'(B)` of `B ↦ Tr φ(B)`, with `φ'` by central
/// differences of step `1e-6 λ`.
pub fn trace_gradient(phi: &dyn RealFunction, b: &PdMatrix) -> Result<HermitianMatrix> {
    func_calc_with(b, |l| {
        let h = 1e-6 * l;
        Ok((phi.eval(l + h)? - phi.eval(l - h)?) / (2.0 * h))
    })
}

fn finish(descent: Descent, oracle_value: f64, opts: &SolverOptions) -> Result<VariationalResult> {
    let gap = (descent.value - oracle_value).abs();
    if descent.iterations >= opts.max_iter && gap > opts.tol * (1.0 + descent.value.abs()) {
        return Err(Error::SolverNonConvergence {
            iterations: descent.iterations,
            gap,
            grad_norm: descent.grad_norm,
        });
    }
    Ok(VariationalResult {
        value: descent.value,
        minimizer: descent.point,
        iterations: descent.iterations,
        oracle_value,
        gap_vs_oracle: gap,
        grad_norm: descent.grad_norm,
        boundary_active: descent.clamp_active,
    })
}

/// Commuting stationary point: `λ ↦ argmin_b (λ b - φ(b))` applied to `m`.
fn stationary_point(phi: &dyn RealFunction, m: &PdMatrix) -> Result<PdMatrix> {
    func_calc_with(m, |l| {
        let c = legendre_numeric(phi, l, LEGENDRE_TOL)?;
        if c.at_boundary {
            Err(Error::BoundaryInfimum(l))
        } else {
            Ok(c.argmin)
        }
    })?
    .to_pd()
}

/// Minimizes `G(B) = Tr(AB - hˇ(B))` over the PD cone.
pub fn trace_h_variational_pgd(
    h: &ScalarFunction,
    a: &PdMatrix,
    opts: &SolverOptions,
) -> Result<VariationalResult> {
    let hc = check(h)?;
    let oracle = trace_h_variational_oracle(h, a)?;
    let a_h = a.as_hermitian();
    let objective = |b: &PdMatrix| -> Result<f64> {
        Ok(a_h.inner(b.as_hermitian())? - trace_of(b.as_hermitian(), &hc)?)
    };
    let gradient = |b: &PdMatrix| -> Result<HermitianMatrix> { a_h.sub(&trace_gradient(&hc, b)?) };
    let init = match opts.init {
        PgdInit::Stationary => stationary_point(&hc, a)?,
        PgdInit::Identity => PdMatrix::identity(a.dim()),
    };
    let descent = projected_gradient_descent(objective, gradient, init, opts)?;
    finish(descent, oracle, opts)
}

fn require_convex(spec: &FunctionalSpec, what: &str) -> Result<()> {
    if spec.mode != Mode::Convex {
        return Err(Error::Precondition(format!(
            "{what} requires a convex-mode spec"
        )));
    }
    Ok(())
}

/// `J(Z) = Tr(Z^{1/2} B'^{-1} Z^{1/2} - h˘(Z^{1/2} A' Z^{1/2}))`.
pub fn variational_objective_z(
    spec: &FunctionalSpec,
    a: &PdMatrix,
    b: &PdMatrix,
    z: &PdMatrix,
) -> Result<f64> {
    require_convex(spec, "the rewritten objective")?;
    let hb = breve(&spec.h)?;
    let (ap, bp) = spec.transformed_pair(a, b)?;
    if z.dim() != ap.dim() {
        return Err(Error::DimensionMismatch {
            expected: ap.dim(),
            found: z.dim(),
        });
    }
    let zs = z.sqrt()?;
    let first = bp
        .inverse()?
        .as_hermitian()
        .sandwich(zs.as_hermitian())?
        .trace(false);
    let second = trace_of(&ap.as_hermitian().sandwich(zs.as_hermitian())?, &hb)?;
    Ok(spec.finish_trace(first - second))
}

/// Minimizes `J` over `Z` and compares against `Tr h~(A'^{-1/2} B'^{-1} A'^{-1/2})`.
pub fn minimize_objective_z(
    spec: &FunctionalSpec,
    a: &PdMatrix,
    b: &PdMatrix,
    opts: &SolverOptions,
) -> Result<VariationalResult> {
    require_convex(spec, "the rewritten objective")?;
    let hb = breve(&spec.h)?;
    let (ap, bp) = spec.transformed_pair(a, b)?;
    let bp_inv = bp.inverse()?;
    let ap_sqrt = ap.sqrt()?;
    let ap_inv_sqrt = ap.inv_sqrt()?;
    let m = bp_inv.sandwich(&ap_inv_sqrt)?;
    let oracle = spec.finish_trace(trace_of(m.as_hermitian(), &tilde(&spec.h))?);

    // Tr h˘(Z^{1/2} A' Z^{1/2}) = Tr h˘(A'^{1/2} Z A'^{1/2})
    let objective = |z: &PdMatrix| -> Result<f64> {
        let first = bp_inv.as_hermitian().inner(z.as_hermitian())?;
        let y = z.as_hermitian().sandwich(ap_sqrt.as_hermitian())?;
        Ok(spec.finish_trace(first - trace_of(&y, &hb)?))
    };
    let gradient = |z: &PdMatrix| -> Result<HermitianMatrix> {
        let y = z.sandwich(&ap_sqrt)?;
        let inner = trace_gradient(&hb, &y)?.sandwich(ap_sqrt.as_hermitian())?;
        let g = bp_inv.as_hermitian().sub(&inner)?;
        Ok(if spec.normalized {
            g.scale((spec.out_dim() as f64).recip())
        } else {
            g
        })
    };
    let init = match opts.init {
        PgdInit::Stationary => stationary_point(&hb, &m)?.sandwich(&ap_inv_sqrt)?,
        PgdInit::Identity => PdMatrix::identity(ap.dim()),
    };
    let descent = projected_gradient_descent(objective, gradient, init, opts)?;
    finish(descent, oracle, opts)
}

/// `Tr h(A)` by direct functional calculus.
pub fn trace_h(h: &ScalarFunction, a: &PdMatrix) -> Result<f64> {
    Ok(func_calc_with(a, |x| h.eval(x))?.trace(false))
}

/// Convenience wrapper: the transformed function `hˇ` for the variational formula.
pub fn conjugate(h: &ScalarFunction) -> Result<TransformedFunction> {
    scalarfun::check(h)
}

/// `g(Φ(f(A)))` as a Hermitian matrix.
pub fn composite_operator(
    g: &dyn RealFunction,
    map: &PositiveMap,
    f: &dyn RealFunction,
    a: &PdMatrix,
) -> Result<HermitianMatrix> {
    let inner = map.apply_pd(&apply_fn(a, f)?.to_pd()?)?;
    func_calc_with(&inner, |x| g.eval(x))
}
