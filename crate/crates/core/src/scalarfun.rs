//! Scalar function catalog and its transform algebra.
//!
//! Catalog members are evaluated exactly on `(0, inf)`. The three transforms
//! used throughout the crate are
//!
//! * tilde: `h~(x) = -h(1/x)`,
//! * check (concave Legendre conjugate): `hˇ(t) = inf_{x>0} t x - h(x)`,
//! * breve: `h˘ = (h~)ˇ`, i.e. `h˘(t) = inf_{x>0} t x + h(1/x)`.
//!
//! Conjugates of catalog members carry closed forms; everything else falls
//! back to [`legendre_numeric`].

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::matcore::HermitianMatrix;
use crate::report::{TrialGap, TrialReport, Witness};

/// Default relative tolerance for the golden-section refinement.
pub const LEGENDRE_TOL: f64 = 1e-10;
pub const LEGENDRE_MAX_ITER: usize = 200;
/// Search domain of the numeric conjugate.
pub const LEGENDRE_DOMAIN: (f64, f64) = (1e-8, 1e8);
const LEGENDRE_POINTS_PER_DECADE: usize = 16;

/// Threshold below which a condition-(1) gap counts as a violation.
pub const FUNC_EQ1_TOL: f64 = 1e-10;
pub const FUNC_EQ1_RANGE: (f64, f64) = (1e-3, 1e3);

/// The 21-point grid `10^{-1 + k/10}`, `k = 0..=20`.
pub fn log_grid() -> Vec<f64> {
    (0..=20)
        .map(|k| 10f64.powf(-1.0 + k as f64 / 10.0))
        .collect()
}

/// Anything that can be evaluated on `(0, inf)`.
pub trait RealFunction: Send + Sync {
    fn eval(&self, x: f64) -> Result<f64>;

    fn label(&self) -> String;
}

impl<T: RealFunction + ?Sized> RealFunction for &T {
    fn eval(&self, x: f64) -> Result<f64> {
        (**self).eval(x)
    }

    fn label(&self) -> String {
        (**self).label()
    }
}

#[derive(Clone)]
pub struct NumericFn {
    pub name: String,
    func: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
}

impl NumericFn {
    pub fn new(name: impl Into<String>, func: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self {
            name: name.into(),
            func: Arc::new(func),
        }
    }

    pub fn call(&self, x: f64) -> f64 {
        (self.func)(x)
    }
}

impl fmt::Debug for NumericFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "NumericFn({:?})", self.name)
    }
}

impl PartialEq for NumericFn {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.func, &other.func)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LoewnerAtom {
    pub location: f64,
    pub weight: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub enum ScalarFunction {
    /// `ln x`.
    Log,
    /// `x^r`, `r > 0`.
    Power(f64),
    /// `-x^{-r}`, `r > 0`.
    NegPower(f64),
    /// `x^{-p}`, `p > 0`. The decreasing-catalog entry.
    InvPower(f64),
    /// `c0 + c1 x`, `c1 >= 0`.
    Affine {
        c0: f64,
        c1: f64,
    },
    /// `c0 + c1 x + Σ w (xλ - 1)/(x + λ)` with an atomic measure.
    LoewnerRep {
        c0: f64,
        c1: f64,
        atoms: Vec<LoewnerAtom>,
    },
    /// `-f(x)`.
    Negated(Box<ScalarFunction>),
    NumericOnly(NumericFn),
}

fn positive_exponent(kind: &str, r: f64) -> Result<f64> {
    if r > 0.0 && r.is_finite() {
        Ok(r)
    } else {
        Err(Error::InvalidTag {
            tag: format!("{kind}:{r}"),
            reason: "exponent must be > 0".into(),
        })
    }
}

impl ScalarFunction {
    pub fn power(r: f64) -> Result<Self> {
        Ok(Self::Power(positive_exponent("power", r)?))
    }

    pub fn neg_power(r: f64) -> Result<Self> {
        Ok(Self::NegPower(positive_exponent("negpower", r)?))
    }

    pub fn inv_power(p: f64) -> Result<Self> {
        Ok(Self::InvPower(positive_exponent("invpower", p)?))
    }

    pub fn affine(c0: f64, c1: f64) -> Result<Self> {
        let f = Self::Affine { c0, c1 };
        f.validate()?;
        Ok(f)
    }

    pub fn loewner(c0: f64, c1: f64, atoms: Vec<(f64, f64)>) -> Result<Self> {
        let f = Self::LoewnerRep {
            c0,
            c1,
            atoms: atoms
                .into_iter()
                .map(|(location, weight)| LoewnerAtom { location, weight })
                .collect(),
        };
        f.validate()?;
        Ok(f)
    }

    pub fn negated(inner: ScalarFunction) -> Self {
        match inner {
            Self::Negated(f) => *f,
            other => Self::Negated(Box::new(other)),
        }
    }

    pub fn numeric(
        name: impl Into<String>,
        f: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self::NumericOnly(NumericFn::new(name, f))
    }

    /// Checks the variant invariants.
    pub fn validate(&self) -> Result<()> {
        let invalid = |reason: &str| Error::InvalidTag {
            tag: self.to_string(),
            reason: reason.into(),
        };
        match self {
            Self::Log | Self::NumericOnly(_) => Ok(()),
            Self::Power(r) | Self::NegPower(r) | Self::InvPower(r) => {
                if *r > 0.0 && r.is_finite() {
                    Ok(())
                } else {
                    Err(invalid("exponent must be > 0"))
                }
            }
            Self::Affine { c0, c1 } => {
                if !c0.is_finite() || !c1.is_finite() {
                    Err(invalid("coefficients must be finite"))
                } else if *c1 < 0.0 {
                    Err(invalid("c1 must be >= 0"))
                } else {
                    Ok(())
                }
            }
            Self::LoewnerRep { c0, c1, atoms } => {
                if !c0.is_finite() || !c1.is_finite() {
                    return Err(invalid("coefficients must be finite"));
                }
                if *c1 < 0.0 {
                    return Err(invalid("c1 must be >= 0"));
                }
                for a in atoms {
                    if !(a.location >= 0.0 && a.location.is_finite()) {
                        return Err(invalid("atom locations must be finite and >= 0"));
                    }
                    if !(a.weight > 0.0 && a.weight.is_finite()) {
                        return Err(invalid("atom weights must be finite and > 0"));
                    }
                }
                Ok(())
            }
            Self::Negated(inner) => inner.validate(),
        }
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        if !(x > 0.0) || !x.is_finite() {
            return Err(Error::NonPositiveArgument(x));
        }
        let y = self.eval_unchecked(x);
        if y.is_finite() {
            Ok(y)
        } else {
            Err(Error::NonFinite(x))
        }
    }

    fn eval_unchecked(&self, x: f64) -> f64 {
        match self {
            Self::Log => x.ln(),
            Self::Power(r) => x.powf(*r),
            Self::NegPower(r) => -x.powf(-r),
            Self::InvPower(p) => x.powf(-p),
            Self::Affine { c0, c1 } => c0 + c1 * x,
            Self::LoewnerRep { c0, c1, atoms } => {
                c0 + c1 * x
                    + atoms
                        .iter()
                        .map(|a| a.weight * (x * a.location - 1.0) / (x + a.location))
                        .sum::<f64>()
            }
            Self::Negated(inner) => -inner.eval_unchecked(x),
            Self::NumericOnly(f) => f.call(x),
        }
    }

    /// Whether `x h(x) -> 0` as `x -> 0`.
    pub fn vanishes_times_x_at_zero(&self) -> bool {
        match self {
            Self::Log | Self::Power(_) | Self::Affine { .. } => true,
            Self::NegPower(r) | Self::InvPower(r) => *r < 1.0,
            Self::LoewnerRep { atoms, .. } => atoms.iter().all(|a| a.location > 0.0),
            Self::Negated(inner) => inner.vanishes_times_x_at_zero(),
            Self::NumericOnly(f) => [1e-10, 1e-12, 1e-14]
                .iter()
                .all(|&x| (x * f.call(x)).abs() < 1e-4),
        }
    }

    /// Whether `h(x) / x -> 0` as `x -> inf`.
    pub fn sublinear_at_infinity(&self) -> bool {
        match self {
            Self::Log | Self::NegPower(_) | Self::InvPower(_) => true,
            Self::Power(r) => *r < 1.0,
            Self::Affine { c1, .. } | Self::LoewnerRep { c1, .. } => *c1 == 0.0,
            Self::Negated(inner) => inner.sublinear_at_infinity(),
            Self::NumericOnly(f) => [1e10, 1e12, 1e14]
                .iter()
                .all(|&x| (f.call(x) / x).abs() < 1e-4),
        }
    }
}

impl RealFunction for ScalarFunction {
    fn eval(&self, x: f64) -> Result<f64> {
        ScalarFunction::eval(self, x)
    }

    fn label(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for ScalarFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Log => write!(f, "log"),
            Self::Power(r) => write!(f, "power:{r}"),
            Self::NegPower(r) => write!(f, "negpower:{r}"),
            Self::InvPower(p) => write!(f, "invpower:{p}"),
            Self::Affine { c0, c1 } => write!(f, "affine:{c0},{c1}"),
            Self::LoewnerRep { c0, c1, atoms } => {
                write!(f, "loewner:{c0},{c1},[")?;
                for (i, a) in atoms.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "({},{})", a.location, a.weight)?;
                }
                write!(f, "]")
            }
            Self::Negated(inner) => write!(f, "neg:{inner}"),
            Self::NumericOnly(n) => write!(f, "numeric:{}", n.name),
        }
    }
}

impl FromStr for ScalarFunction {
    type Err = Error;

    /// Parses `log`, `power:r`, `negpower:r`, `invpower:p`, `affine:c0,c1`,
    /// `loewner:c0,c1,[(l,w),...]` and `neg:<tag>`.
    fn from_str(s: &str) -> Result<Self> {
        let tag = s.trim();
        let bad = |reason: &str| Error::InvalidTag {
            tag: tag.to_string(),
            reason: reason.to_string(),
        };
        let num = |v: &str| -> Result<f64> {
            v.trim()
                .parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| bad(&format!("{:?} is not a finite number", v.trim())))
        };
        if tag == "log" {
            return Ok(Self::Log);
        }
        let (kind, args) = tag
            .split_once(':')
            .ok_or_else(|| bad("unknown function name"))?;
        let f = match kind {
            "power" => Self::Power(num(args)?),
            "negpower" => Self::NegPower(num(args)?),
            "invpower" => Self::InvPower(num(args)?),
            "affine" => {
                let (c0, c1) = args.split_once(',').ok_or_else(|| bad("expected c0,c1"))?;
                Self::Affine {
                    c0: num(c0)?,
                    c1: num(c1)?,
                }
            }
            "loewner" => {
                let mut parts = args.splitn(3, ',');
                let c0 = num(parts.next().ok_or_else(|| bad("expected c0"))?)?;
                let c1 = num(parts.next().ok_or_else(|| bad("expected c1"))?)?;
                let list = parts
                    .next()
                    .ok_or_else(|| bad("expected atom list"))?
                    .trim();
                let inner = list
                    .strip_prefix('[')
                    .and_then(|l| l.strip_suffix(']'))
                    .ok_or_else(|| bad("atom list must be enclosed in [ ]"))?
                    .trim();
                let mut atoms = Vec::new();
                let mut rest = inner;
                while !rest.is_empty() {
                    let open = rest
                        .strip_prefix('(')
                        .ok_or_else(|| bad("atoms must look like (location,weight)"))?;
                    let (pair, tail) = open
                        .split_once(')')
                        .ok_or_else(|| bad("unterminated atom"))?;
                    let (l, w) = pair
                        .split_once(',')
                        .ok_or_else(|| bad("atoms must look like (location,weight)"))?;
                    atoms.push(LoewnerAtom {
                        location: num(l)?,
                        weight: num(w)?,
                    });
                    rest = tail.trim_start();
                    if let Some(t) = rest.strip_prefix(',') {
                        rest = t.trim_start();
                        if rest.is_empty() {
                            return Err(bad("trailing comma in atom list"));
                        }
                    } else if !rest.is_empty() {
                        return Err(bad("atoms must be separated by commas"));
                    }
                }
                Self::LoewnerRep { c0, c1, atoms }
            }
            "neg" => Self::negated(args.parse()?),
            _ => return Err(bad("unknown function name")),
        };
        f.validate().map_err(|e| match e {
            Error::InvalidTag { reason, .. } => bad(&reason),
            other => other,
        })?;
        Ok(f)
    }
}

/// `h~(x) = -h(1/x)`.
///
/// The catalog is closed under this map; in particular Löwner
/// representations map to Löwner representations (atom `λ` goes to `1/λ`,
/// the linear term and an atom at 0 trade places).
pub fn tilde(f: &ScalarFunction) -> ScalarFunction {
    use ScalarFunction::*;
    match f {
        Log => Log,
        Power(r) => NegPower(*r),
        NegPower(r) => Power(*r),
        InvPower(p) => ScalarFunction::negated(Power(*p)),
        Affine { c0, c1 } => {
            if *c1 == 0.0 {
                Affine { c0: -c0, c1: 0.0 }
            } else {
                LoewnerRep {
                    c0: -c0,
                    c1: 0.0,
                    atoms: vec![LoewnerAtom {
                        location: 0.0,
                        weight: *c1,
                    }],
                }
            }
        }
        LoewnerRep { c0, c1, atoms } => {
            let mut new_c1 = 0.0;
            let mut new_atoms = Vec::with_capacity(atoms.len() + 1);
            for a in atoms {
                if a.location == 0.0 {
                    new_c1 += a.weight;
                } else {
                    new_atoms.push(LoewnerAtom {
                        location: a.location.recip(),
                        weight: a.weight,
                    });
                }
            }
            if *c1 > 0.0 {
                new_atoms.push(LoewnerAtom {
                    location: 0.0,
                    weight: *c1,
                });
            }
            if new_atoms.is_empty() {
                Affine {
                    c0: -c0,
                    c1: new_c1,
                }
            } else {
                LoewnerRep {
                    c0: -c0,
                    c1: new_c1,
                    atoms: new_atoms,
                }
            }
        }
        Negated(inner) => ScalarFunction::negated(tilde(inner)),
        NumericOnly(n) => {
            let n = n.clone();
            ScalarFunction::NumericOnly(NumericFn::new(format!("tilde({})", n.name), move |x| {
                -n.call(x.recip())
            }))
        }
    }
}

/// Result of a numeric conjugate evaluation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Conjugate {
    pub value: f64,
    pub argmin: f64,
    /// The infimum over the truncated domain sits on its boundary.
    pub at_boundary: bool,
}

/// `inf_{x in [1e-8, 1e8]} t x - f(x)`.
///
/// The objective is convex in `x` for concave `f`, so the minimizer is
/// bracketed on a log grid and refined by golden-section search in `ln x`.
pub fn legendre_numeric(f: &dyn RealFunction, t: f64, tol: f64) -> Result<Conjugate> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::NonPositiveArgument(t));
    }
    let objective = |u: f64| -> Result<f64> {
        let x = u.exp();
        match f.eval(x) {
            Ok(y) => Ok(t * x - y),
            Err(Error::NonFinite(_)) => Ok(f64::INFINITY),
            Err(e) => Err(e),
        }
    };

    let (lo, hi) = (LEGENDRE_DOMAIN.0.ln(), LEGENDRE_DOMAIN.1.ln());
    let decades = (LEGENDRE_DOMAIN.1 / LEGENDRE_DOMAIN.0).log10().round() as usize;
    let count = decades * LEGENDRE_POINTS_PER_DECADE + 1;
    let grid: Vec<f64> = (0..count)
        .map(|i| lo + (hi - lo) * i as f64 / (count - 1) as f64)
        .collect();
    let mut best = (0, f64::INFINITY);
    for (i, &u) in grid.iter().enumerate() {
        let v = objective(u)?;
        if v < best.1 {
            best = (i, v);
        }
    }
    let (idx, grid_min) = best;
    if !grid_min.is_finite() {
        return Err(Error::NonFinite(t));
    }
    if idx == 0 || idx == count - 1 {
        return Ok(Conjugate {
            value: grid_min,
            argmin: grid[idx].exp(),
            at_boundary: true,
        });
    }

    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (grid[idx - 1], grid[idx + 1]);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = objective(c)?;
    let mut fd = objective(d)?;
    let mut best_u = grid[idx];
    let mut best_v = grid_min;
    for _ in 0..LEGENDRE_MAX_ITER {
        if b - a <= tol {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = objective(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = objective(d)?;
        }
        for (u, v) in [(c, fc), (d, fd)] {
            if v < best_v {
                best_u = u;
                best_v = v;
            }
        }
    }
    Ok(Conjugate {
        value: best_v,
        argmin: best_u.exp(),
        at_boundary: false,
    })
}

/// Closed forms of transformed catalog members.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ClosedForm {
    /// `coef * t^exponent`
    Power { coef: f64, exponent: f64 },
    /// `offset + ln t`
    LogOffset { offset: f64 },
}

impl ClosedForm {
    pub fn eval(&self, t: f64) -> Result<f64> {
        if !(t > 0.0) || !t.is_finite() {
            return Err(Error::NonPositiveArgument(t));
        }
        Ok(match self {
            Self::Power { coef, exponent } => coef * t.powf(*exponent),
            Self::LogOffset { offset } => offset + t.ln(),
        })
    }

    fn of_scalar(f: &ScalarFunction) -> Option<Self> {
        match f {
            ScalarFunction::Log => Some(Self::LogOffset { offset: 0.0 }),
            ScalarFunction::Power(r) => Some(Self::Power {
                coef: 1.0,
                exponent: *r,
            }),
            ScalarFunction::NegPower(r) => Some(Self::Power {
                coef: -1.0,
                exponent: -r,
            }),
            ScalarFunction::InvPower(p) => Some(Self::Power {
                coef: 1.0,
                exponent: -p,
            }),
            _ => None,
        }
    }

    /// Closed-form concave conjugate, when the catalog has one.
    pub fn conjugate_of(f: &ScalarFunction) -> Option<Self> {
        match f {
            ScalarFunction::Log => Some(Self::LogOffset { offset: 1.0 }),
            ScalarFunction::Power(r) if *r < 1.0 => {
                let r = *r;
                Some(Self::Power {
                    coef: r.powf(r / (1.0 - r)) * (r - 1.0),
                    exponent: r / (r - 1.0),
                })
            }
            ScalarFunction::NegPower(r) => {
                let r = *r;
                Some(Self::Power {
                    coef: r.powf(1.0 / (r + 1.0)) * (1.0 + r.recip()),
                    exponent: r / (r + 1.0),
                })
            }
            _ => None,
        }
    }
}

impl fmt::Display for ClosedForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Power { coef, exponent } => write!(f, "{coef:.6} * t^{exponent:.6}"),
            Self::LogOffset { offset } => write!(f, "{offset} + log t"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TransformKind {
    Tilde,
    Check,
    Breve,
}

impl fmt::Display for TransformKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Tilde => "tilde",
            Self::Check => "check",
            Self::Breve => "breve",
        })
    }
}

#[derive(Clone, Debug)]
pub struct TransformedFunction {
    pub base: ScalarFunction,
    pub kind: TransformKind,
    pub closed_form: Option<ClosedForm>,
    /// `base` for `Check`, `tilde(base)` otherwise.
    conjugand: ScalarFunction,
}

impl TransformedFunction {
    pub fn tilde(base: &ScalarFunction) -> Self {
        let t = tilde(base);
        Self {
            base: base.clone(),
            kind: TransformKind::Tilde,
            closed_form: ClosedForm::of_scalar(&t),
            conjugand: t,
        }
    }

    /// Concave Legendre conjugate `hˇ`. Requires `h` concave,
    /// nondecreasing, and `h(x)/x -> 0` at infinity.
    pub fn check(base: &ScalarFunction) -> Result<Self> {
        if !base.sublinear_at_infinity() {
            return Err(Error::Precondition(format!(
                "{base}: h(x)/x does not vanish at infinity"
            )));
        }
        if !is_concave_on_grid(base)? {
            return Err(Error::Precondition(format!("{base} is not concave")));
        }
        if !is_nondecreasing_on_grid(base)? {
            return Err(Error::Precondition(format!("{base} is not nondecreasing")));
        }
        Ok(Self::check_unchecked(base))
    }

    fn check_unchecked(base: &ScalarFunction) -> Self {
        Self {
            base: base.clone(),
            kind: TransformKind::Check,
            closed_form: ClosedForm::conjugate_of(base),
            conjugand: base.clone(),
        }
    }

    /// `h˘ = (h~)ˇ`. Requires `h~` concave and `x h(x) -> 0` at zero.
    pub fn breve(base: &ScalarFunction) -> Result<Self> {
        if !base.vanishes_times_x_at_zero() {
            return Err(Error::Precondition(format!(
                "{base}: x h(x) does not vanish at zero"
            )));
        }
        let t = tilde(base);
        if !is_concave_on_grid(&t)? {
            return Err(Error::Precondition(format!(
                "tilde of {base} is not concave"
            )));
        }
        Ok(Self {
            base: base.clone(),
            kind: TransformKind::Breve,
            closed_form: ClosedForm::conjugate_of(&t),
            conjugand: t,
        })
    }

    /// Evaluation through the numeric definition, ignoring any closed form.
    pub fn eval_numeric(&self, t: f64) -> Result<f64> {
        match self.kind {
            TransformKind::Tilde => self.conjugand.eval(t),
            TransformKind::Check | TransformKind::Breve => {
                let c = legendre_numeric(&self.conjugand, t, LEGENDRE_TOL)?;
                if c.at_boundary {
                    Err(Error::BoundaryInfimum(t))
                } else {
                    Ok(c.value)
                }
            }
        }
    }

    /// Maximum relative disagreement `|closed - numeric| / (1 + |closed|)`
    /// over `points`, or `None` without a closed form.
    pub fn closed_form_error(&self, points: &[f64]) -> Result<Option<f64>> {
        let Some(cf) = self.closed_form else {
            return Ok(None);
        };
        let mut worst: f64 = 0.0;
        for &t in points {
            let exact = cf.eval(t)?;
            let numeric = self.eval_numeric(t)?;
            worst = worst.max((exact - numeric).abs() / (1.0 + exact.abs()));
        }
        Ok(Some(worst))
    }
}

impl RealFunction for TransformedFunction {
    fn eval(&self, t: f64) -> Result<f64> {
        match &self.closed_form {
            Some(cf) => cf.eval(t),
            None => self.eval_numeric(t),
        }
    }

    fn label(&self) -> String {
        format!("{}({})", self.kind, self.base)
    }
}

pub fn breve(f: &ScalarFunction) -> Result<TransformedFunction> {
    TransformedFunction::breve(f)
}

pub fn check(f: &ScalarFunction) -> Result<TransformedFunction> {
    TransformedFunction::check(f)
}

fn shape_grid() -> Vec<f64> {
    (0..=24)
        .map(|k| 10f64.powf(-3.0 + k as f64 / 4.0))
        .collect()
}

/// Midpoint concavity on all pairs of a fixed log grid over `[1e-3, 1e3]`.
pub fn is_concave_on_grid(f: &dyn RealFunction) -> Result<bool> {
    let grid = shape_grid();
    let values: Vec<f64> = grid.iter().map(|&x| f.eval(x)).collect::<Result<_>>()?;
    for i in 0..grid.len() {
        for j in i + 1..grid.len() {
            let mid = f.eval(0.5 * (grid[i] + grid[j]))?;
            let avg = 0.5 * (values[i] + values[j]);
            if mid < avg - 1e-10 * (1.0 + avg.abs()) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

pub fn is_nondecreasing_on_grid(f: &dyn RealFunction) -> Result<bool> {
    let grid = shape_grid();
    let values: Vec<f64> = grid.iter().map(|&x| f.eval(x)).collect::<Result<_>>()?;
    Ok(values
        .windows(2)
        .all(|w| w[1] >= w[0] - 1e-12 * (1.0 + w[0].abs())))
}

pub fn is_positive_on_grid(f: &dyn RealFunction) -> Result<bool> {
    for x in shape_grid() {
        if !(f.eval(x)? > 0.0) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Samples condition (1), `h(x ▽ y) >= h(x) ▽ h(y) >= h(x ! y)`, on
/// log-uniform pairs in `[1e-3, 1e3]`.
pub fn check_func_eq1(f: &dyn RealFunction, samples: usize, seed: u64) -> Result<TrialReport> {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (lo, hi) = (FUNC_EQ1_RANGE.0.ln(), FUNC_EQ1_RANGE.1.ln());
    let mut gaps = Vec::with_capacity(samples);
    let mut violations = 0;
    let mut worst: Option<(usize, f64, f64, f64)> = None;
    let mut concavity_min = f64::INFINITY;
    let mut harmonic_min = f64::INFINITY;
    for trial in 0..samples {
        let x = (lo + (hi - lo) * rng.random::<f64>()).exp();
        let y = (lo + (hi - lo) * rng.random::<f64>()).exp();
        let arith = 0.5 * (x + y);
        let harm = 2.0 / (x.recip() + y.recip());
        let mean_of_values = 0.5 * (f.eval(x)? + f.eval(y)?);
        let first = f.eval(arith)? - mean_of_values;
        let second = mean_of_values - f.eval(harm)?;
        concavity_min = concavity_min.min(first);
        harmonic_min = harmonic_min.min(second);
        let gap = first.min(second);
        if gap < -FUNC_EQ1_TOL {
            violations += 1;
        }
        if worst.is_none_or(|w| gap < w.1) {
            worst = Some((trial, gap, x, y));
        }
        gaps.push(TrialGap { trial, gap, seed });
    }
    let (min_gap, worst_witness) = match worst {
        Some((trial, gap, x, y)) => {
            let xm = HermitianMatrix::from_diagonal(&[x])?;
            let ym = HermitianMatrix::from_diagonal(&[y])?;
            (
                gap,
                Some(Witness::new(trial, seed, gap, &[("x", &xm), ("y", &ym)])),
            )
        }
        None => (f64::INFINITY, None),
    };
    let mut extras = BTreeMap::new();
    if samples > 0 {
        extras.insert("concavity_min_gap".to_string(), concavity_min);
        extras.insert("harmonic_min_gap".to_string(), harmonic_min);
    }
    Ok(TrialReport {
        suite: format!("func_eq1[{}]", f.label()),
        trials: samples,
        violations,
        min_gap,
        worst_witness,
        runtime_ms: start.elapsed().as_millis() as u64,
        seed,
        passed: violations == 0,
        extras,
        gaps,
    })
}

/// Löwner criterion on finitely many points: the divided-difference matrix
/// `[(f(x_i) - f(x_j)) / (x_i - x_j)]` (central-difference derivative on the
/// diagonal) is positive semidefinite up to `tol`.
pub fn loewner_monotonicity_oracle(f: &dyn RealFunction, points: &[f64], tol: f64) -> Result<bool> {
    if points.is_empty() || points.len() > 12 {
        return Err(Error::Precondition(format!(
            "oracle needs between 1 and 12 points, got {}",
            points.len()
        )));
    }
    for &p in points {
        if !(p > 0.0) || !p.is_finite() {
            return Err(Error::NonPositiveArgument(p));
        }
    }
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            let (a, b) = (points[i], points[j]);
            if (a - b).abs() <= 1e-12 * a.max(b) {
                return Err(Error::CoincidentPoints(a, b));
            }
        }
    }
    let values: Vec<f64> = points.iter().map(|&x| f.eval(x)).collect::<Result<_>>()?;
    let n = points.len();
    let mut m = crate::matcore::CMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let v = if i == j {
                let x = points[i];
                let h = 1e-6 * x;
                (f.eval(x + h)? - f.eval(x - h)?) / (2.0 * h)
            } else {
                (values[i] - values[j]) / (points[i] - points[j])
            };
            m[(i, j)] = v.into();
        }
    }
    Ok(HermitianMatrix::new(m)?.min_eigenvalue()? >= -tol)
}

/// Point sets used when certifying operator monotonicity.
pub const ORACLE_POINT_SETS: [&[f64]; 3] = [
    &[0.1, 0.5, 1.0, 2.0, 5.0, 10.0],
    &[0.01, 0.03, 0.2, 0.7, 3.0, 40.0, 100.0],
    &[0.25, 0.3, 0.9, 1.5, 6.0, 20.0, 400.0, 1000.0],
];
pub const ORACLE_TOL: f64 = 1e-8;

/// Operator monotonicity certified on all [`ORACLE_POINT_SETS`].
pub fn is_operator_monotone(f: &dyn RealFunction) -> Result<bool> {
    for pts in ORACLE_POINT_SETS {
        if !loewner_monotonicity_oracle(f, pts, ORACLE_TOL)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Positive-valued with `-f` operator monotone.
pub fn is_positive_operator_monotone_decreasing(f: &ScalarFunction) -> Result<bool> {
    Ok(is_positive_on_grid(f)? && is_operator_monotone(&ScalarFunction::negated(f.clone()))?)
}

/// Positive-valued and operator monotone.
pub fn is_positive_operator_monotone(f: &ScalarFunction) -> Result<bool> {
    Ok(is_positive_on_grid(f)? && is_operator_monotone(f)?)
}
