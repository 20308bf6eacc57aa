//! Randomized midpoint suites for the convexity/concavity statements and the
//! counterexample search at the exponent boundary.
//!
//! Every suite is a [`Suite`]: it samples named input matrices from a per-trial
//! RNG stream and maps inputs to a gap. Trials run in parallel; reports are
//! reduced in trial order, so they do not depend on scheduling.

use std::collections::BTreeMap;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matcore::{complex_gaussian, random_pd_with, HermitianMatrix, PdMatrix};
use crate::posmap::PositiveMap;
use crate::report::{TrialGap, TrialReport, Witness};
use crate::scalarfun::{
    is_concave_on_grid, is_nondecreasing_on_grid, is_operator_monotone,
    is_positive_operator_monotone_decreasing, ScalarFunction, TransformedFunction,
};
use crate::tracefun::{
    apply_fn, composite_operator, core_functional, inverse_form, trace_of, FunctionalSpec, Mode,
};

/// Relative escape hatch: gaps are compared against `max(tol, REL_TOL * |scale|)`.
pub const REL_TOL: f64 = 1e-7;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialConfig {
    pub trials: usize,
    pub seed: u64,
    pub tol: f64,
    pub eig_range: (f64, f64),
    /// Matrix size for suites whose dimension is not fixed by a map.
    pub dim: usize,
    /// Replace `Tr` with `Tr / k`.
    pub normalized: bool,
    /// Check the convexity hypotheses before sampling. Disabling this is the
    /// exploration mode for hypothesis-violating inputs.
    pub validate: bool,
}

impl Default for TrialConfig {
    fn default() -> Self {
        Self {
            trials: 1000,
            seed: 42,
            tol: 1e-9,
            eig_range: (0.1, 10.0),
            dim: 3,
            normalized: false,
            validate: true,
        }
    }
}

impl TrialConfig {
    pub fn check(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::Precondition("trials must be >= 1".into()));
        }
        if !(self.tol > 0.0) {
            return Err(Error::Precondition(format!(
                "tol must be > 0, got {}",
                self.tol
            )));
        }
        if self.dim == 0 {
            return Err(Error::Precondition("dim must be >= 1".into()));
        }
        Ok(())
    }
}

/// Independent stream seed for trial `index` of a suite seeded with `seed`.
pub fn trial_seed(seed: u64, index: usize) -> u64 {
    fn mix(mut z: u64) -> u64 {
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }
    mix(mix(seed).wrapping_add((index as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15)))
}

/// Outcome of evaluating one trial.
#[derive(Clone, Debug, Default)]
pub struct Evaluation {
    pub gap: f64,
    /// Typical magnitude of the compared quantities (for the relative tolerance).
    pub scale: f64,
    /// Named sub-gaps, reduced by minimum.
    pub extras: Vec<(&'static str, f64)>,
}

impl Evaluation {
    pub fn new(gap: f64, scale: f64) -> Self {
        Self {
            gap,
            scale,
            extras: Vec::new(),
        }
    }
}

pub type Inputs = Vec<(&'static str, HermitianMatrix)>;

pub trait Suite: Sync {
    fn name(&self) -> String;

    /// Checks hypotheses; called only when `cfg.validate` is set.
    fn validate(&self, _cfg: &TrialConfig) -> Result<()> {
        Ok(())
    }

    fn sample(&self, trial: usize, rng: &mut ChaCha8Rng, cfg: &TrialConfig) -> Result<Inputs>;

    fn evaluate(&self, inputs: &[HermitianMatrix], cfg: &TrialConfig) -> Result<Evaluation>;

    /// Threshold below which a gap counts as a violation.
    fn threshold(&self, cfg: &TrialConfig, eval: &Evaluation) -> f64 {
        -cfg.tol.max(REL_TOL * eval.scale.abs())
    }

    fn passed(&self, violations: usize) -> bool {
        violations == 0
    }
}

pub fn run_suite<S: Suite + ?Sized>(suite: &S, cfg: &TrialConfig) -> Result<TrialReport> {
    cfg.check()?;
    if cfg.validate {
        suite.validate(cfg)?;
    }
    let start = Instant::now();
    let outcomes: Vec<(u64, Inputs, Evaluation)> = (0..cfg.trials)
        .into_par_iter()
        .map(|trial| {
            let seed = trial_seed(cfg.seed, trial);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let inputs = suite.sample(trial, &mut rng, cfg)?;
            let mats: Vec<HermitianMatrix> = inputs.iter().map(|(_, m)| m.clone()).collect();
            let eval = suite.evaluate(&mats, cfg)?;
            Ok((seed, inputs, eval))
        })
        .collect::<Result<_>>()?;

    let mut violations = 0;
    let mut worst: Option<usize> = None;
    let mut extras: BTreeMap<String, f64> = BTreeMap::new();
    let mut gaps = Vec::with_capacity(outcomes.len());
    for (trial, (seed, _, eval)) in outcomes.iter().enumerate() {
        if eval.gap < suite.threshold(cfg, eval) {
            violations += 1;
        }
        if worst.is_none_or(|w| eval.gap < outcomes[w].2.gap) {
            worst = Some(trial);
        }
        for &(name, v) in &eval.extras {
            let e = extras.entry(name.to_string()).or_insert(f64::INFINITY);
            *e = e.min(v);
        }
        gaps.push(TrialGap {
            trial,
            gap: eval.gap,
            seed: *seed,
        });
    }
    let w = worst.expect("at least one trial");
    let (seed, inputs, eval) = &outcomes[w];
    let named: Vec<(&str, &HermitianMatrix)> = inputs.iter().map(|(n, m)| (*n, m)).collect();
    Ok(TrialReport {
        suite: suite.name(),
        trials: cfg.trials,
        violations,
        min_gap: eval.gap,
        worst_witness: Some(Witness::new(w, *seed, eval.gap, &named)),
        runtime_ms: start.elapsed().as_millis() as u64,
        seed: cfg.seed,
        passed: suite.passed(violations),
        extras,
        gaps,
    })
}

/// Recomputes the gap stored in a witness.
pub fn replay<S: Suite + ?Sized>(suite: &S, witness: &Witness, cfg: &TrialConfig) -> Result<f64> {
    Ok(suite.evaluate(&witness.decode_inputs()?, cfg)?.gap)
}

fn pd(h: &HermitianMatrix) -> Result<PdMatrix> {
    h.to_pd()
}

fn expect_inputs(inputs: &[HermitianMatrix], n: usize) -> Result<()> {
    if inputs.len() != n {
        return Err(Error::Witness(format!(
            "expected {n} input matrices, found {}",
            inputs.len()
        )));
    }
    Ok(())
}

fn sample_pd(rng: &mut ChaCha8Rng, n: usize, cfg: &TrialConfig) -> Result<HermitianMatrix> {
    Ok(random_pd_with(rng, n, cfg.eig_range)?.into_hermitian())
}

fn pair_midpoint(x: &HermitianMatrix, y: &HermitianMatrix) -> Result<PdMatrix> {
    x.midpoint(y)?.to_pd()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Route {
    /// `Tr h(A'^{1/2} B' A'^{1/2})`.
    Direct,
    /// `-Tr h~(A'^{-1/2} B'^{-1} A'^{-1/2})`.
    InverseForm,
}

/// Joint convexity (or concavity) of the trace functional at midpoints.
pub struct JointSuite {
    pub spec: FunctionalSpec,
    pub route: Route,
}

impl JointSuite {
    pub fn new(spec: FunctionalSpec) -> Self {
        Self {
            spec,
            route: Route::Direct,
        }
    }

    pub fn with_route(mut self, route: Route) -> Self {
        self.route = route;
        self
    }

    fn functional(&self, cfg: &TrialConfig, a: &PdMatrix, b: &PdMatrix) -> Result<f64> {
        let spec = self.spec.clone().with_normalized_trace(cfg.normalized);
        match self.route {
            Route::Direct => core_functional(&spec, a, b),
            Route::InverseForm => inverse_form(&spec, a, b),
        }
    }
}

impl Suite for JointSuite {
    fn name(&self) -> String {
        let kind = match self.spec.mode {
            Mode::Convex => "joint_convexity",
            Mode::Concave => "joint_concavity",
        };
        let route = match self.route {
            Route::Direct => "",
            Route::InverseForm => ",inverse_form",
        };
        format!(
            "{kind}[h={},f={},g={}{route}]",
            self.spec.h, self.spec.f, self.spec.g
        )
    }

    fn validate(&self, _cfg: &TrialConfig) -> Result<()> {
        self.spec.validate()
    }

    fn sample(&self, _trial: usize, rng: &mut ChaCha8Rng, cfg: &TrialConfig) -> Result<Inputs> {
        let (m, n) = (self.spec.phi.in_dim(), self.spec.psi.in_dim());
        Ok(vec![
            ("A1", sample_pd(rng, m, cfg)?),
            ("A2", sample_pd(rng, m, cfg)?),
            ("B1", sample_pd(rng, n, cfg)?),
            ("B2", sample_pd(rng, n, cfg)?),
        ])
    }

    fn evaluate(&self, inputs: &[HermitianMatrix], cfg: &TrialConfig) -> Result<Evaluation> {
        expect_inputs(inputs, 4)?;
        let (a1, a2, b1, b2) = (
            pd(&inputs[0])?,
            pd(&inputs[1])?,
            pd(&inputs[2])?,
            pd(&inputs[3])?,
        );
        let v1 = self.functional(cfg, &a1, &b1)?;
        let v2 = self.functional(cfg, &a2, &b2)?;
        let mid = self.functional(
            cfg,
            &pair_midpoint(&inputs[0], &inputs[1])?,
            &pair_midpoint(&inputs[2], &inputs[3])?,
        )?;
        let mean = 0.5 * (v1 + v2);
        let gap = match self.spec.mode {
            Mode::Convex => mean - mid,
            Mode::Concave => mid - mean,
        };
        Ok(Evaluation::new(gap, mean))
    }
}

pub fn joint_convexity_suite(spec: &FunctionalSpec, cfg: &TrialConfig) -> Result<TrialReport> {
    joint_convexity_suite_via(spec, Route::Direct, cfg)
}

pub fn joint_convexity_suite_via(
    spec: &FunctionalSpec,
    route: Route,
    cfg: &TrialConfig,
) -> Result<TrialReport> {
    if spec.mode != Mode::Convex {
        return Err(Error::Precondition(
            "joint convexity needs a convex-mode spec".into(),
        ));
    }
    run_suite(&JointSuite::new(spec.clone()).with_route(route), cfg)
}

pub fn joint_concavity_suite(spec: &FunctionalSpec, cfg: &TrialConfig) -> Result<TrialReport> {
    if spec.mode != Mode::Concave {
        return Err(Error::Precondition(
            "joint concavity needs a concave-mode spec".into(),
        ));
    }
    run_suite(&JointSuite::new(spec.clone()), cfg)
}

/// Matrix midpoint convexity of `A ↦ g(Φ(f(A)))`, measured by the smallest
/// eigenvalue of `mean - value at midpoint`.
pub struct OperatorConvexitySuite {
    pub g: ScalarFunction,
    pub f: ScalarFunction,
    pub map: PositiveMap,
}

impl Suite for OperatorConvexitySuite {
    fn name(&self) -> String {
        format!("operator_convexity[g={},f={}]", self.g, self.f)
    }

    fn validate(&self, _cfg: &TrialConfig) -> Result<()> {
        if !is_operator_monotone(&self.g)? {
            return Err(Error::Precondition(format!(
                "g = {} is not operator monotone",
                self.g
            )));
        }
        if !is_positive_operator_monotone_decreasing(&self.f)? {
            return Err(Error::Precondition(format!(
                "f = {} is not positive operator monotone decreasing",
                self.f
            )));
        }
        Ok(())
    }

    fn sample(&self, _trial: usize, rng: &mut ChaCha8Rng, cfg: &TrialConfig) -> Result<Inputs> {
        let m = self.map.in_dim();
        Ok(vec![
            ("A1", sample_pd(rng, m, cfg)?),
            ("A2", sample_pd(rng, m, cfg)?),
        ])
    }

    fn evaluate(&self, inputs: &[HermitianMatrix], _cfg: &TrialConfig) -> Result<Evaluation> {
        expect_inputs(inputs, 2)?;
        let value = |a: &PdMatrix| composite_operator(&self.g, &self.map, &self.f, a);
        let y1 = value(&pd(&inputs[0])?)?;
        let y2 = value(&pd(&inputs[1])?)?;
        let ym = value(&pair_midpoint(&inputs[0], &inputs[1])?)?;
        let mean = y1.midpoint(&y2)?;
        let gap = mean.sub(&ym)?.min_eigenvalue()?;
        Ok(Evaluation::new(gap, mean.spectral_norm()?))
    }
}

pub fn operator_convexity_suite(
    g: &ScalarFunction,
    f: &ScalarFunction,
    map: &PositiveMap,
    cfg: &TrialConfig,
) -> Result<TrialReport> {
    run_suite(
        &OperatorConvexitySuite {
            g: g.clone(),
            f: f.clone(),
            map: map.clone(),
        },
        cfg,
    )
}

/// Trace Jensen inequality `Tr f(Σ C_i* A_i C_i) <= Tr Σ C_i* f(A_i) C_i` for a
/// unital Kraus family, one `A_i` per Kraus operator.
pub struct JensenTraceSuite {
    pub f: ScalarFunction,
    pub family: PositiveMap,
}

impl JensenTraceSuite {
    fn combine(&self, parts: &[HermitianMatrix]) -> Result<HermitianMatrix> {
        let mut acc = HermitianMatrix::zeros(self.family.out_dim());
        for (c, x) in self.family.kraus().iter().zip(parts) {
            acc = acc.add(&x.congruence(c)?)?;
        }
        Ok(acc)
    }
}

impl Suite for JensenTraceSuite {
    fn name(&self) -> String {
        format!("jensen_trace[f={}]", self.f)
    }

    fn validate(&self, _cfg: &TrialConfig) -> Result<()> {
        if !is_concave_on_grid(&ScalarFunction::negated(self.f.clone()))? {
            return Err(Error::Precondition(format!("f = {} is not convex", self.f)));
        }
        Ok(())
    }

    fn sample(&self, _trial: usize, rng: &mut ChaCha8Rng, cfg: &TrialConfig) -> Result<Inputs> {
        const NAMES: [&str; 8] = ["A1", "A2", "A3", "A4", "A5", "A6", "A7", "A8"];
        let m = self.family.in_dim();
        (0..self.family.kraus().len())
            .map(|i| Ok((*NAMES.get(i).unwrap_or(&"A"), sample_pd(rng, m, cfg)?)))
            .collect()
    }

    fn evaluate(&self, inputs: &[HermitianMatrix], cfg: &TrialConfig) -> Result<Evaluation> {
        expect_inputs(inputs, self.family.kraus().len())?;
        let images: Vec<HermitianMatrix> = inputs
            .iter()
            .map(|a| apply_fn(&pd(a)?, &self.f))
            .collect::<Result<_>>()?;
        let rhs = self.combine(&images)?.trace(cfg.normalized);
        let lhs = apply_fn(&self.combine(inputs)?.to_pd()?, &self.f)?.trace(cfg.normalized);
        Ok(Evaluation::new(rhs - lhs, rhs))
    }
}

pub fn jensen_trace_suite(
    f: &ScalarFunction,
    family: &PositiveMap,
    cfg: &TrialConfig,
) -> Result<TrialReport> {
    let defect = family.unitality_defect()?;
    if defect > 1e-10 {
        return Err(Error::InvalidMap(format!(
            "Kraus family is not unital (defect {defect:e}); normalize it first"
        )));
    }
    run_suite(
        &JensenTraceSuite {
            f: f.clone(),
            family: family.clone(),
        },
        cfg,
    )
}

/// `Tr f(A) <= Tr f(B)` for `A <= B = A + G*G`, together with the ordered
/// eigenvalue comparison `λ_i(A) <= λ_i(B)`.
pub struct TraceMonotonicitySuite {
    pub f: ScalarFunction,
}

impl Suite for TraceMonotonicitySuite {
    fn name(&self) -> String {
        format!("trace_monotonicity[f={}]", self.f)
    }

    fn validate(&self, _cfg: &TrialConfig) -> Result<()> {
        if !is_nondecreasing_on_grid(&self.f)? {
            return Err(Error::Precondition(format!(
                "f = {} is not nondecreasing",
                self.f
            )));
        }
        Ok(())
    }

    fn sample(&self, _trial: usize, rng: &mut ChaCha8Rng, cfg: &TrialConfig) -> Result<Inputs> {
        let a = sample_pd(rng, cfg.dim, cfg)?;
        let g = complex_gaussian(rng, cfg.dim, cfg.dim);
        let b = a.add(&HermitianMatrix::new(g.adjoint() * &g)?)?;
        Ok(vec![("A", a), ("B", b)])
    }

    fn evaluate(&self, inputs: &[HermitianMatrix], cfg: &TrialConfig) -> Result<Evaluation> {
        expect_inputs(inputs, 2)?;
        let (a, b) = (&inputs[0], &inputs[1]);
        let ordering = a
            .eigenvalues()?
            .iter()
            .zip(b.eigenvalues()?)
            .map(|(x, y)| y - x)
            .fold(f64::INFINITY, f64::min);
        let norm = if cfg.normalized { a.dim() as f64 } else { 1.0 };
        let ta = trace_of(a, &self.f)? / norm;
        let tb = trace_of(b, &self.f)? / norm;
        let trace_gap = tb - ta;
        Ok(Evaluation {
            gap: ordering.min(trace_gap),
            scale: ta,
            extras: vec![("ordering_min_gap", ordering), ("trace_min_gap", trace_gap)],
        })
    }
}

pub fn trace_monotonicity_suite(f: &ScalarFunction, cfg: &TrialConfig) -> Result<TrialReport> {
    run_suite(&TraceMonotonicitySuite { f: f.clone() }, cfg)
}

/// Search for joint-convexity violations of `Tr h(A'^{1/2} B' A'^{1/2})` with
/// `h = -x^{-r}`, `f = g = x^{-1}`, identity maps and `A = B`, where the
/// functional reduces to `-Tr A^{2r}`.
///
/// Trials below [`SharpnessSearch::sweep_len`] walk a deterministic grid of
/// scalar pairs; the rest are random `dim x dim` pairs. A gap below `-10 tol`
/// counts as a witness. The run passes iff a witness is found exactly when
/// `r > 1/2`.
pub struct SharpnessSearch {
    pub r: f64,
    spec: FunctionalSpec,
    grid: Vec<f64>,
}

const SWEEP_POINTS: usize = 21;

impl SharpnessSearch {
    pub fn new(r: f64, cfg: &TrialConfig) -> Result<Self> {
        let h = ScalarFunction::neg_power(r)?;
        let inv = ScalarFunction::inv_power(1.0)?;
        let spec = FunctionalSpec::new(
            h,
            inv.clone(),
            inv,
            PositiveMap::identity(1),
            PositiveMap::identity(1),
            Mode::Convex,
        )?;
        let (lo, hi) = (cfg.eig_range.0.ln(), cfg.eig_range.1.ln());
        let mut grid: Vec<f64> = (0..SWEEP_POINTS)
            .map(|i| (lo + (hi - lo) * i as f64 / (SWEEP_POINTS - 1) as f64).exp())
            .collect();
        // the canonical scalar pair (1, 4)
        grid.extend([1.0, 4.0]);
        Ok(Self { r, spec, grid })
    }

    /// Number of deterministic scalar trials at the start of the run.
    pub fn sweep_len(&self) -> usize {
        let n = self.grid.len();
        n * (n - 1) / 2
    }

    fn sweep_pair(&self, index: usize) -> (f64, f64) {
        // the canonical pair first, then all grid pairs i < j
        let n = self.grid.len();
        let mut k = (index + self.sweep_len() - 1) % self.sweep_len();
        for i in 0..n {
            let row = n - 1 - i;
            if k < row {
                return (self.grid[i], self.grid[i + 1 + k]);
            }
            k -= row;
        }
        unreachable!("sweep index in range")
    }

    fn functional(&self, a: &HermitianMatrix, cfg: &TrialConfig) -> Result<f64> {
        let n = a.dim();
        let mut spec = self.spec.clone().with_normalized_trace(cfg.normalized);
        spec.phi = PositiveMap::identity(n);
        spec.psi = PositiveMap::identity(n);
        let a = pd(a)?;
        core_functional(&spec, &a, &a)
    }
}

impl Suite for SharpnessSearch {
    fn name(&self) -> String {
        format!("sharpness_search[r={}]", self.r)
    }

    fn sample(&self, trial: usize, rng: &mut ChaCha8Rng, cfg: &TrialConfig) -> Result<Inputs> {
        if trial < self.sweep_len() {
            let (x, y) = self.sweep_pair(trial);
            return Ok(vec![
                ("A1", HermitianMatrix::from_diagonal(&[x])?),
                ("A2", HermitianMatrix::from_diagonal(&[y])?),
            ]);
        }
        Ok(vec![
            ("A1", sample_pd(rng, cfg.dim, cfg)?),
            ("A2", sample_pd(rng, cfg.dim, cfg)?),
        ])
    }

    fn evaluate(&self, inputs: &[HermitianMatrix], cfg: &TrialConfig) -> Result<Evaluation> {
        expect_inputs(inputs, 2)?;
        let v1 = self.functional(&inputs[0], cfg)?;
        let v2 = self.functional(&inputs[1], cfg)?;
        let mid = self.functional(&inputs[0].midpoint(&inputs[1])?, cfg)?;
        let mean = 0.5 * (v1 + v2);
        Ok(Evaluation::new(mean - mid, mean))
    }

    fn threshold(&self, cfg: &TrialConfig, eval: &Evaluation) -> f64 {
        -(10.0 * cfg.tol).max(REL_TOL * eval.scale.abs())
    }

    fn passed(&self, violations: usize) -> bool {
        (violations > 0) == (self.r > 0.5)
    }
}

/// `cfg.trials` random trials on top of the scalar sweep.
pub fn sharpness_search(r: f64, cfg: &TrialConfig) -> Result<TrialReport> {
    let suite = SharpnessSearch::new(r, cfg)?;
    let total = TrialConfig {
        trials: cfg.trials + suite.sweep_len(),
        ..cfg.clone()
    };
    let mut report = run_suite(&suite, &total)?;
    report.extras.insert(
        "witness_found".into(),
        if report.violations > 0 { 1.0 } else { 0.0 },
    );
    Ok(report)
}

/// Matrix midpoint concavity of `A ↦ -h˘(Z0^{1/2} Φ(f(A)) Z0^{1/2})`, with a
/// fresh `Z0` per trial.
pub struct OperatorConcaveCheck {
    pub h_breve: TransformedFunction,
    pub f: ScalarFunction,
    pub map: PositiveMap,
}

impl Suite for OperatorConcaveCheck {
    fn name(&self) -> String {
        format!(
            "remark_operator_concave[h={},f={}]",
            self.h_breve.base, self.f
        )
    }

    fn sample(&self, _trial: usize, rng: &mut ChaCha8Rng, cfg: &TrialConfig) -> Result<Inputs> {
        let m = self.map.in_dim();
        Ok(vec![
            ("A1", sample_pd(rng, m, cfg)?),
            ("A2", sample_pd(rng, m, cfg)?),
            ("Z0", sample_pd(rng, self.map.out_dim(), cfg)?),
        ])
    }

    fn evaluate(&self, inputs: &[HermitianMatrix], _cfg: &TrialConfig) -> Result<Evaluation> {
        expect_inputs(inputs, 3)?;
        let z_sqrt = pd(&inputs[2])?.sqrt()?;
        let value = |a: &PdMatrix| -> Result<HermitianMatrix> {
            let inner = self
                .map
                .apply_pd(&apply_fn(a, &self.f)?.to_pd()?)?
                .sandwich(&z_sqrt)?;
            Ok(apply_fn(&inner, &self.h_breve)?.scale(-1.0))
        };
        let y1 = value(&pd(&inputs[0])?)?;
        let y2 = value(&pd(&inputs[1])?)?;
        let ym = value(&pair_midpoint(&inputs[0], &inputs[1])?)?;
        let mean = y1.midpoint(&y2)?;
        let gap = ym.sub(&mean)?.min_eigenvalue()?;
        Ok(Evaluation::new(gap, mean.spectral_norm()?))
    }
}

pub fn remark_operator_concave_check(
    h_breve: &TransformedFunction,
    f: &ScalarFunction,
    map: &PositiveMap,
    cfg: &TrialConfig,
) -> Result<TrialReport> {
    run_suite(
        &OperatorConcaveCheck {
            h_breve: h_breve.clone(),
            f: f.clone(),
            map: map.clone(),
        },
        cfg,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalarfun::breve;

    fn sf(tag: &str) -> ScalarFunction {
        tag.parse().unwrap()
    }

    fn cfg(trials: usize) -> TrialConfig {
        TrialConfig {
            trials,
            ..TrialConfig::default()
        }
    }

    fn convex_spec(h: &str, seed: u64) -> FunctionalSpec {
        FunctionalSpec::new(
            sf(h),
            sf("invpower:1"),
            sf("invpower:1"),
            PositiveMap::random(3, 3, 2, seed).unwrap(),
            PositiveMap::random(3, 3, 2, seed + 1).unwrap(),
            Mode::Convex,
        )
        .unwrap()
    }

    #[test]
    fn trial_seeds_are_distinct_and_stable() {
        let seeds: std::collections::HashSet<u64> = (0..10_000).map(|i| trial_seed(7, i)).collect();
        assert_eq!(seeds.len(), 10_000);
        assert_eq!(trial_seed(7, 3), trial_seed(7, 3));
        assert_ne!(trial_seed(7, 3), trial_seed(8, 3));
    }

    #[test]
    fn equal_endpoints_give_zero_gap() {
        let suite = JointSuite::new(convex_spec("log", 1));
        let a = random_pd_with(&mut ChaCha8Rng::seed_from_u64(1), 3, (0.1, 10.0))
            .unwrap()
            .into_hermitian();
        let b = random_pd_with(&mut ChaCha8Rng::seed_from_u64(2), 3, (0.1, 10.0))
            .unwrap()
            .into_hermitian();
        let e = suite
            .evaluate(&[a.clone(), a.clone(), b.clone(), b], &cfg(1))
            .unwrap();
        assert!(e.gap.abs() < 1e-12);
        let op = OperatorConvexitySuite {
            g: sf("neg:invpower:1"),
            f: sf("invpower:1"),
            map: PositiveMap::random(3, 3, 2, 5).unwrap(),
        };
        assert!(op.evaluate(&[a.clone(), a], &cfg(1)).unwrap().gap.abs() < 1e-12);
    }

    #[test]
    fn joint_convexity_log() {
        let r = joint_convexity_suite(&convex_spec("log", 3), &cfg(200)).unwrap();
        assert_eq!(r.violations, 0, "min gap {}", r.min_gap);
        assert!(r.passed);
    }

    #[test]
    fn joint_concavity_power() {
        let spec = FunctionalSpec::new(
            sf("power:0.5"),
            sf("power:1"),
            sf("power:1"),
            PositiveMap::random(2, 3, 2, 1).unwrap(),
            PositiveMap::random(3, 3, 2, 2).unwrap(),
            Mode::Concave,
        )
        .unwrap();
        let r = joint_concavity_suite(&spec, &cfg(200)).unwrap();
        assert_eq!(r.violations, 0, "min gap {}", r.min_gap);
    }

    #[test]
    fn mode_mismatch_is_rejected() {
        let spec = convex_spec("log", 1);
        assert!(joint_concavity_suite(&spec, &cfg(1)).is_err());
        let bad = convex_spec("negpower:0.75", 1);
        assert!(matches!(
            joint_convexity_suite(&bad, &cfg(1)),
            Err(Error::Precondition(_))
        ));
        let explore = TrialConfig {
            validate: false,
            ..cfg(10)
        };
        assert!(joint_convexity_suite(&bad, &explore).is_ok());
    }

    #[test]
    fn reports_are_deterministic_and_replayable() {
        let spec = convex_spec("negpower:0.5", 9);
        let c = cfg(64);
        let r1 = joint_convexity_suite(&spec, &c).unwrap();
        let r2 = joint_convexity_suite(&spec, &c).unwrap();
        assert_eq!(r1.min_gap.to_bits(), r2.min_gap.to_bits());
        assert_eq!(r1.worst_witness, r2.worst_witness);
        let w = r1.worst_witness.unwrap();
        let replayed = replay(&JointSuite::new(spec), &w, &c).unwrap();
        assert!((replayed - r1.min_gap).abs() <= 1e-14);
        assert_eq!(w.recorded_gap().unwrap().to_bits(), r1.min_gap.to_bits());
    }

    #[test]
    fn sweep_enumerates_all_pairs_canonical_first() {
        let s = SharpnessSearch::new(0.75, &cfg(1)).unwrap();
        assert_eq!(s.sweep_pair(0), (1.0, 4.0));
        let pairs: std::collections::HashSet<(u64, u64)> = (0..s.sweep_len())
            .map(|i| {
                let (x, y) = s.sweep_pair(i);
                (x.to_bits(), y.to_bits())
            })
            .collect();
        assert_eq!(pairs.len(), s.sweep_len());
    }

    #[test]
    fn sharpness_scalar_witness() {
        let s = SharpnessSearch::new(0.75, &cfg(1)).unwrap();
        let inputs = [
            HermitianMatrix::from_diagonal(&[1.0]).unwrap(),
            HermitianMatrix::from_diagonal(&[4.0]).unwrap(),
        ];
        let gap = s.evaluate(&inputs, &cfg(1)).unwrap().gap;
        // -(1 + 8)/2 + 2.5^1.5
        let expected = -4.5 + 2.5f64.powf(1.5);
        assert!((gap - expected).abs() < 1e-12);
        assert!((gap + 0.5472).abs() < 1e-4);
    }

    #[test]
    fn sharpness_dichotomy_small() {
        for r in [0.6, 0.75, 1.0] {
            let rep = sharpness_search(r, &cfg(50)).unwrap();
            assert!(rep.violations > 0 && rep.passed, "r={r}");
        }
        for r in [0.25, 0.4, 0.5] {
            let rep = sharpness_search(r, &cfg(200)).unwrap();
            assert!(rep.violations == 0 && rep.passed, "r={r}: {}", rep.min_gap);
        }
    }

    #[test]
    fn operator_convexity_key_instance() {
        let map = PositiveMap::random(3, 3, 2, 11).unwrap();
        let r = operator_convexity_suite(&sf("neg:invpower:1"), &sf("invpower:1"), &map, &cfg(200))
            .unwrap();
        assert_eq!(r.violations, 0, "{}", r.min_gap);
        let r = operator_convexity_suite(&sf("log"), &sf("invpower:0.5"), &map, &cfg(200)).unwrap();
        assert_eq!(r.violations, 0, "{}", r.min_gap);
        assert!(
            operator_convexity_suite(&sf("power:2"), &sf("invpower:1"), &map, &cfg(1)).is_err()
        );
    }

    #[test]
    fn jensen_examples() {
        let single = PositiveMap::identity(3);
        let r = jensen_trace_suite(&sf("power:2"), &single, &cfg(20)).unwrap();
        assert!(r.min_gap.abs() < 1e-9);
        let family = PositiveMap::random(3, 3, 2, 4)
            .unwrap()
            .normalize_unital()
            .unwrap();
        let r = jensen_trace_suite(&sf("power:2"), &family, &cfg(200)).unwrap();
        assert_eq!(r.violations, 0);
        let r = jensen_trace_suite(&sf("neg:log"), &family, &cfg(200)).unwrap();
        assert_eq!(r.violations, 0);
        let raw = PositiveMap::random(3, 3, 2, 4).unwrap();
        assert!(matches!(
            jensen_trace_suite(&sf("power:2"), &raw, &cfg(1)),
            Err(Error::InvalidMap(_))
        ));
    }

    #[test]
    fn trace_monotonicity_examples() {
        let c = TrialConfig { dim: 4, ..cfg(200) };
        for tag in ["log", "power:3"] {
            let r = trace_monotonicity_suite(&sf(tag), &c).unwrap();
            assert_eq!(r.violations, 0, "{tag}");
            assert!(r.extras["ordering_min_gap"] >= -1e-9);
        }
        let a = HermitianMatrix::from_diagonal(&[1.0, 2.0]).unwrap();
        let s = TraceMonotonicitySuite { f: sf("log") };
        let e = s.evaluate(&[a.clone(), a], &cfg(1)).unwrap();
        assert_eq!(e.gap, 0.0);
    }

    #[test]
    fn remark_check_examples() {
        let map = PositiveMap::random(3, 2, 2, 3).unwrap();
        for h in ["log", "power:1"] {
            let hb = breve(&sf(h)).unwrap();
            let r = remark_operator_concave_check(&hb, &sf("invpower:1"), &map, &cfg(200)).unwrap();
            assert_eq!(r.violations, 0, "{h}: {}", r.min_gap);
        }
    }
}
