//! Standard operator monotone functions `f` (normalized `f(1) = 1`,
//! symmetric `f(x) = x f(1/x)`), their matrix means `m_f(x, y) = y f(x/y)`,
//! and the companion transform `f̃`.
//!
//! Functions are selected by name: `"sld"`, `"wy"`, `"wyd:<alpha>"`.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::linops::{CMat, HermitianOperator, C64};

/// Exponents of the sampling grid `x = 2^k`, `k = -20..=20`.
pub const GRID_EXPONENTS: std::ops::RangeInclusive<i32> = -20..=20;

/// `|x - 1|` below which the Wigner-Yanase-Dyson function is evaluated by
/// its Taylor expansion around 1.
const WYD_SERIES_RADIUS: f64 = 1e-4;

pub fn sampling_grid() -> impl Iterator<Item = f64> {
    GRID_EXPONENTS.map(|k| 2f64.powi(k))
}

#[derive(Clone)]
enum Kind {
    Sld,
    Wy,
    Wyd { alpha: f64 },
    Tabulated { xs: Arc<Vec<f64>>, ys: Arc<Vec<f64>> },
    Tilde(Box<MonotoneFunction>),
}

/// A named scalar function `f: [0, ∞) → [0, ∞)` with its value at zero
/// stored exactly.
#[derive(Clone)]
pub struct MonotoneFunction {
    name: String,
    kind: Kind,
    f0: f64,
}

impl fmt::Debug for MonotoneFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MonotoneFunction").field("name", &self.name).field("f0", &self.f0).finish()
    }
}

impl MonotoneFunction {
    /// `(1 + x)/2`, the largest standard monotone function.
    pub fn sld() -> Self {
        Self { name: "sld".into(), kind: Kind::Sld, f0: 0.5 }
    }

    /// `((√x + 1)/2)²`.
    pub fn wy() -> Self {
        Self { name: "wy".into(), kind: Kind::Wy, f0: 0.25 }
    }

    /// `α(1-α)(x-1)² / ((x^α - 1)(x^{1-α} - 1))`, `0 < α < 1`.
    pub fn wyd(alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::NotStandard {
                name: format!("wyd:{alpha}"),
                reason: "alpha must lie in (0, 1)".into(),
            });
        }
        Ok(Self { name: format!("wyd:{alpha}"), kind: Kind::Wyd { alpha }, f0: alpha * (1.0 - alpha) })
    }

    /// User function given by samples `(xs[i], ys[i])` with `xs` strictly
    /// increasing and positive. Values between samples are interpolated
    /// linearly in `(ln x, ln f)`; below the first sample linearly towards
    /// `(0, f0)`; above the last one through `x f(1/x)`.
    ///
    /// The function must pass [`MonotoneFunction::validate`].
    pub fn tabulated(name: &str, xs: Vec<f64>, ys: Vec<f64>, f0: f64) -> Result<Self> {
        let bad = |reason: &str| Error::NotStandard { name: name.into(), reason: reason.into() };
        if xs.len() != ys.len() || xs.len() < 2 {
            return Err(bad("need at least two samples with matching lengths"));
        }
        if xs[0] <= 0.0 || xs.windows(2).any(|w| w[1] <= w[0]) {
            return Err(bad("sample points must be positive and strictly increasing"));
        }
        if ys.iter().any(|&y| y.is_nan() || y <= 0.0) {
            return Err(bad("sample values must be positive"));
        }
        let f = Self { name: name.into(), kind: Kind::Tabulated { xs: Arc::new(xs), ys: Arc::new(ys) }, f0 };
        f.validate()?;
        Ok(f)
    }

    /// Tabulates `g` on `x = 2^{k/8}`, `|k| ≤ 240`, and validates the result.
    pub fn custom(name: &str, f0: f64, g: impl Fn(f64) -> f64) -> Result<Self> {
        let xs: Vec<f64> = (-240..=240).map(|k| 2f64.powf(k as f64 / 8.0)).collect();
        let ys = xs.iter().map(|&x| g(x)).collect();
        Self::tabulated(name, xs, ys, f0)
    }

    /// Parses `"sld"`, `"wy"` or `"wyd:<alpha>"`.
    pub fn by_name(name: &str) -> Result<Self> {
        let name = name.trim();
        match name {
            "sld" => Ok(Self::sld()),
            "wy" => Ok(Self::wy()),
            _ => match name.strip_prefix("wyd:") {
                Some(a) => {
                    let alpha: f64 = a.parse().map_err(|_| Error::UnknownFunction(name.into()))?;
                    Self::wyd(alpha)
                }
                None => Err(Error::UnknownFunction(name.into())),
            },
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// `f(0)`, stored analytically.
    pub fn f0(&self) -> f64 {
        self.f0
    }

    /// `f(x)` for `x ≥ 0`.
    pub fn eval(&self, x: f64) -> f64 {
        if x == 0.0 {
            return self.f0;
        }
        match &self.kind {
            Kind::Sld => 0.5 * (1.0 + x),
            Kind::Wy => {
                let h = 0.5 * (x.sqrt() + 1.0);
                h * h
            }
            Kind::Wyd { alpha } => wyd_eval(*alpha, x),
            Kind::Tabulated { xs, ys } => tabulated_eval(xs, ys, self.f0, x),
            Kind::Tilde(f) => {
                let d = x - 1.0;
                0.5 * (x + 1.0) - 0.5 * d * d * f.f0 / f.eval(x)
            }
        }
    }

    /// `m_f(x, y) = y f(x/y)`, with `m_f(x, 0) = x f(0)` and `m_f(0, 0) = 0`.
    pub fn mean(&self, x: f64, y: f64) -> Result<f64> {
        if x < 0.0 || y < 0.0 {
            return Err(Error::NegativeArgument { x, y });
        }
        Ok(self.mean_unchecked(x, y))
    }

    /// [`Self::mean`] for arguments already known to be nonnegative.
    ///
    /// Evaluated as `M f(m/M)` with `M = max(x, y)`, which equals `y f(x/y)`
    /// by symmetry and is exactly symmetric in its arguments.
    pub(crate) fn mean_unchecked(&self, x: f64, y: f64) -> f64 {
        let (hi, lo) = if x >= y { (x, y) } else { (y, x) };
        if hi == 0.0 {
            return 0.0;
        }
        hi * self.eval(lo / hi)
    }

    /// Checks normalization, symmetry on the sampling grid, sampled
    /// monotonicity, `f(0) > 0` and that `f(x) → f(0)` as `x → 0`.
    pub fn validate(&self) -> Result<()> {
        let fail = |reason: String| Err(Error::NotStandard { name: self.name.clone(), reason });
        let one = self.eval(1.0);
        if (one - 1.0).abs() > 1e-12 {
            return fail(format!("f(1) = {one}, expected 1"));
        }
        if self.f0.is_nan() || self.f0 <= 0.0 {
            return fail(format!("f(0) = {} must be positive", self.f0));
        }
        let mut prev = f64::NEG_INFINITY;
        for x in sampling_grid() {
            let fx = self.eval(x);
            let mirrored = x * self.eval(1.0 / x);
            if (fx - mirrored).abs() > 1e-10 * fx.max(1.0) {
                return fail(format!("f({x}) = {fx} but x f(1/x) = {mirrored}"));
            }
            if fx < prev - 1e-12 * prev.abs().max(1.0) {
                return fail(format!("decreasing at x = {x}"));
            }
            prev = fx;
        }
        // Built-in entries carry f(0) analytically; a tabulated f(0) is
        // supplied by the user and must match the trend of the samples.
        let limit = self.extrapolated_f0();
        if matches!(self.kind, Kind::Tabulated { .. }) && (limit - self.f0).abs() > 1e-6 + 0.25 * self.f0 {
            return fail(format!("stated f(0) = {} but f(x) tends to {limit:.6} as x -> 0", self.f0));
        }
        Ok(())
    }
}

impl MonotoneFunction {
    /// Limit of `f(x)` as `x → 0`, extrapolated from `x = 2^-10, 2^-20, 2^-30`
    /// assuming `f(x) ≈ f(0) + C x^p`. `f` may approach `f(0)` like a
    /// fractional power of `x` (`f_WY(x) - 1/4 ≈ √x/2`), so a single small-x
    /// sample is not a usable estimate.
    fn extrapolated_f0(&self) -> f64 {
        let [f1, f2, f3] = [-10, -20, -30].map(|k| self.eval(2f64.powi(k)));
        let (d1, d2) = (f1 - f2, f2 - f3);
        if d1 == 0.0 {
            return f3;
        }
        let q = d2 / d1;
        if !(0.0..1.0).contains(&q) {
            return f3;
        }
        f3 - d2 * q / (1.0 - q)
    }
}

/// The standard functions shipped with the crate.
pub fn registry() -> Vec<MonotoneFunction> {
    vec![MonotoneFunction::sld(), MonotoneFunction::wy(), MonotoneFunction::wyd(0.5).expect("alpha in range")]
}

/// Parses a comma-separated list of function names.
pub fn parse_list(names: &str) -> Result<Vec<MonotoneFunction>> {
    names.split(',').filter(|s| !s.trim().is_empty()).map(MonotoneFunction::by_name).collect()
}

/// `f̃(x) = (x+1)/2 - (x-1)²/2 · f(0)/f(x)`; `f̃(0) = 0`.
pub fn f_tilde(f: &MonotoneFunction) -> MonotoneFunction {
    MonotoneFunction { name: format!("tilde({})", f.name), kind: Kind::Tilde(Box::new(f.clone())), f0: 0.0 }
}

/// Whether `(x+1)/2 + f̃(x) ≥ 2 f(x)` on the sampling grid, with tolerance
/// `1e-10 · max(1, 2 f(x))`.
pub fn check_cond_y(f: &MonotoneFunction) -> bool {
    let ft = f_tilde(f);
    sampling_grid().chain([0.0, 1.0]).all(|x| {
        let rhs = 2.0 * f.eval(x);
        0.5 * (x + 1.0) + ft.eval(x) >= rhs - 1e-10 * rhs.max(1.0)
    })
}

/// `f(A)` by eigenvalue functional calculus for a positive semidefinite
/// `A`; eigenvalues down to `-1e-12` are treated as zero.
pub fn apply_to_operator(f: &MonotoneFunction, a: &HermitianOperator) -> Result<CMat> {
    let e = a.eigh();
    if let Some(&min) = e.values.first() {
        if min < -1e-12 {
            return Err(Error::InvalidInput(format!("operator has negative eigenvalue {min:.3e}")));
        }
    }
    Ok(e.map(|x| C64::new(f.eval(x.max(0.0)), 0.0)))
}

fn wyd_eval(alpha: f64, x: f64) -> f64 {
    let t = x - 1.0;
    if t.abs() < WYD_SERIES_RADIUS {
        return wyd_series(alpha, t);
    }
    let lx = t.ln_1p();
    let pa = (alpha * lx).exp_m1();
    let pb = ((1.0 - alpha) * lx).exp_m1();
    alpha * (1.0 - alpha) * t * t / (pa * pb)
}

/// Four-term Taylor expansion of the WYD function at `x = 1 + t`.
///
/// With `g_a(t) = ((1+t)^a - 1)/(a t) = Σ_k C(a, k+1)/a · t^k`, the function
/// is `1/(g_α(t) g_{1-α}(t))`.
fn wyd_series(alpha: f64, t: f64) -> f64 {
    let g = |a: f64| -> [f64; 4] {
        let mut c = [1.0; 4];
        for k in 1..4 {
            c[k] = c[k - 1] * (a - k as f64) / (k as f64 + 1.0);
        }
        c
    };
    let (ga, gb) = (g(alpha), g(1.0 - alpha));
    let mut p = [0.0; 4];
    for i in 0..4 {
        for j in 0..4 - i {
            p[i + j] += ga[i] * gb[j];
        }
    }
    let mut r = [0.0; 4];
    r[0] = 1.0 / p[0];
    for n in 1..4 {
        r[n] = -(1..=n).map(|k| p[k] * r[n - k]).sum::<f64>() / p[0];
    }
    r[0] + t * (r[1] + t * (r[2] + t * r[3]))
}

fn tabulated_eval(xs: &[f64], ys: &[f64], f0: f64, x: f64) -> f64 {
    let last = xs.len() - 1;
    if x > xs[last] {
        return x * tabulated_eval(xs, ys, f0, 1.0 / x);
    }
    if x < xs[0] {
        return f0 + (ys[0] - f0) * x / xs[0];
    }
    let i = xs.partition_point(|&p| p <= x).min(last).max(1);
    let (x0, x1) = (xs[i - 1].ln(), xs[i].ln());
    let (y0, y1) = (ys[i - 1].ln(), ys[i].ln());
    let w = (x.ln() - x0) / (x1 - x0);
    (y0 + w * (y1 - y0)).exp()
}
