//! Seeded invariant suites over random ensembles. Each suite counts checks
//! and violations; a violation of a theorem is a bug, not a finding.
//!
//! Instance seeds are derived from the base seed and an instance key, so any
//! single instance can be replayed on its own.

use serde::{Deserialize, Serialize};

use crate::construct::{
    discretize, error_bound, exact_error_matrix, exact_worst_error, qubit_spec, random_lattice_spec,
    series_tail_bound, xi_for_epsilon, GridSpec,
};
use crate::costs::{asymptotic_table, cost_upper_sqrt};
use crate::error::{Error, Result};
use crate::infogeo::{
    f_variance, fisher_information, fisher_inner, l_operator, skew_information, u_quantity, u_quantity_via_tilde, variance,
};
use crate::linops::random::{self, derive_seed, SeededRng};
use crate::linops::{commutator, hermitian, pauli_x, pauli_y, tensor, CMat, DensityMatrix, HermitianOperator, UnitaryOperator, C64};
use crate::measure::{random_conserving_set, random_nonconserving_set};
use crate::monotone::{apply_to_operator, check_cond_y, registry, MonotoneFunction};
use crate::uncertainty::{all_relations, lemma1, tightness_chain, ChainOutcome};

/// Outcome of one suite.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteResult {
    pub name: String,
    pub checks: usize,
    pub violations: usize,
    /// Smallest observed slack, where a suite records one.
    pub min_slack: Option<f64>,
    /// The first few violations, for diagnosis.
    pub failures: Vec<String>,
}

impl SuiteResult {
    pub fn passed(&self) -> bool {
        self.violations == 0 && self.checks > 0
    }
}

struct Tally {
    result: SuiteResult,
}

impl Tally {
    fn new(name: &str) -> Self {
        Self { result: SuiteResult { name: name.into(), checks: 0, violations: 0, min_slack: None, failures: vec![] } }
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.result.checks += 1;
        if !ok {
            self.result.violations += 1;
            if self.result.failures.len() < 5 {
                self.result.failures.push(what());
            }
        }
    }

    fn slack(&mut self, s: f64) {
        self.result.min_slack = Some(self.result.min_slack.map_or(s, |m| m.min(s)));
    }

    /// `lhs ≥ rhs` with tolerance `tol · max(1, |lhs|, |rhs|)`.
    fn geq(&mut self, lhs: f64, rhs: f64, tol: f64, what: impl FnOnce() -> String) {
        self.slack(lhs - rhs);
        let scale = 1f64.max(lhs.abs()).max(rhs.abs());
        self.check(lhs >= rhs - tol * scale, || format!("{}: {lhs} < {rhs}", what()));
    }

    fn close(&mut self, got: f64, want: f64, tol: f64, what: impl FnOnce() -> String) {
        self.check((got - want).abs() <= tol, || format!("{}: {got} vs {want}", what()));
    }

    fn error(&mut self, e: Error, what: &str) {
        self.check(false, || format!("{what}: {e}"));
    }

    fn finish(self) -> SuiteResult {
        self.result
    }
}

/// Sizes of the seeded ensembles.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteSizes {
    /// Instances per dimension in the relation suite.
    pub relation_trials: usize,
    /// Instances in the information-geometry suites.
    pub ensemble_trials: usize,
    /// Implementations per dimension pair in the measurement suite.
    pub way_trials: usize,
    /// Random specs in the construction bound chain.
    pub spec_trials: usize,
}

impl Default for SuiteSizes {
    fn default() -> Self {
        Self { relation_trials: 1000, ensemble_trials: 500, way_trials: 300, spec_trials: 100 }
    }
}

/// Functions exercised by the ensemble suites.
pub fn suite_functions() -> Vec<MonotoneFunction> {
    registry()
}

/// One row of the relation CSV.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RelationRow {
    pub relation: String,
    pub f_name: String,
    pub dim: usize,
    pub seed: u64,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub holds: bool,
}

/// Instance seed for trial `trial` at dimension `dim`.
pub fn relation_seed(base: u64, dim: usize, trial: usize) -> u64 {
    derive_seed(base, ((dim as u64) << 32) | trial as u64)
}

/// Full-rank state and two observables of unit scale.
pub fn random_triple(dim: usize, rng: &mut SeededRng) -> (DensityMatrix, HermitianOperator, HermitianOperator) {
    let rho = random::random_density_with(dim, rng);
    let a = random::random_hermitian_with(dim, 1.0, rng);
    let b = random::random_hermitian_with(dim, 1.0, rng);
    (rho, a, b)
}

/// All relation verdicts for one seeded instance.
pub fn relation_instance(dim: usize, seed: u64, fs: &[MonotoneFunction]) -> Result<Vec<RelationRow>> {
    let (rho, a, b) = random_triple(dim, &mut random::rng(seed));
    let mut rows = Vec::new();
    for f in fs {
        for v in all_relations(&rho, &a, &b, f)? {
            if v.relation == "robertson" && f.name() != fs[0].name() {
                continue;
            }
            let f_name = if v.relation == "robertson" { "-".to_string() } else { f.name().to_string() };
            rows.push(RelationRow { relation: v.relation, f_name, dim, seed, lhs: v.lhs, rhs: v.rhs, slack: v.slack, holds: v.holds });
        }
    }
    Ok(rows)
}

pub fn relations_suite(seed: u64, dims: &[usize], trials: usize) -> SuiteResult {
    let fs = suite_functions();
    let mut t = Tally::new("relations");
    for &dim in dims {
        for trial in 0..trials {
            let s = relation_seed(seed, dim, trial);
            match relation_instance(dim, s, &fs) {
                Ok(rows) => {
                    for r in rows {
                        t.slack(r.slack);
                        t.check(r.holds, || format!("{} {} dim {dim} seed {s}: slack {}", r.relation, r.f_name, r.slack));
                    }
                }
                Err(e) => t.error(e, "relation instance"),
            }
            let (rho, a, b) = random_triple(dim, &mut random::rng(s));
            match tightness_chain(&rho, &a, &b, &MonotoneFunction::sld()) {
                Ok(ChainOutcome::Chain(c)) => t.check(c.ordered, || format!("tightness chain dim {dim} seed {s}")),
                Ok(ChainOutcome::NotApplicable { .. }) => t.check(false, || "sld chain not applicable".into()),
                Err(e) => t.error(e, "tightness chain"),
            }
        }
    }
    t.finish()
}

pub fn saturation_suite() -> SuiteResult {
    let mut t = Tally::new("saturation");
    let rho = DensityMatrix::from_real_diagonal(&[0.75, 0.25]).expect("valid");
    match lemma1(&rho, &hermitian(pauli_x()), &hermitian(pauli_y()), &MonotoneFunction::sld()) {
        Ok(v) => {
            t.close(v.lhs, 0.25, 1e-10, || "lemma1 lhs".into());
            t.close(v.rhs, 0.25, 1e-10, || "lemma1 rhs".into());
        }
        Err(e) => t.error(e, "lemma1"),
    }
    t.finish()
}

fn ensemble_dim(rng: &mut SeededRng, lo: usize, hi: usize) -> usize {
    use rand::Rng;
    rng.random_range(lo..=hi)
}

/// Skew–Fisher identity, the dual-path `U^f`, the derivative of `⟨B⟩` along
/// the unitary family and the Cauchy–Schwarz step behind Lemma 1.
pub fn fisher_suite(seed: u64, trials: usize) -> SuiteResult {
    let mut t = Tally::new("skew-fisher and U^f");
    let fs = suite_functions();
    for trial in 0..trials {
        let s = derive_seed(seed, 0xF15 << 32 | trial as u64);
        let mut r = random::rng(s);
        let dim = ensemble_dim(&mut r, 2, 6);
        let (rho, a, b) = random_triple(dim, &mut r);
        for f in &fs {
            let run = || -> Result<()> {
                let i = skew_information(&rho, &a, f)?;
                let fi = fisher_information(&rho, &a, f)?;
                t_close_rel(i, 0.5 * f.f0() * fi, 1e-9)
                    .map_err(|d| Error::Numerical(format!("skew-fisher {} seed {s}: rel {d:.3e}", f.name())))?;
                let (u1, u2) = (u_quantity(&rho, &a, f)?, u_quantity_via_tilde(&rho, &a, f)?);
                t_close_rel(u1, u2, 1e-8).map_err(|d| Error::Numerical(format!("U dual path {} seed {s}: rel {d:.3e}", f.name())))?;
                Ok(())
            };
            match run() {
                Ok(()) => t.check(true, String::new),
                Err(e) => t.error(e, "fisher"),
            }
            if let Err(e) = derivative_checks(&mut t, &rho, &a, &b, f, s) {
                t.error(e, "derivative");
            }
        }
    }
    t.finish()
}

fn t_close_rel(x: f64, y: f64, tol: f64) -> std::result::Result<(), f64> {
    let d = (x - y).abs() / x.abs().max(y.abs()).max(f64::MIN_POSITIVE);
    if d <= tol || (x - y).abs() <= 1e-15 {
        Ok(())
    } else {
        Err(d)
    }
}

/// `ρ_t = e^{-iAt} ρ e^{iAt}`.
pub fn evolve(rho: &DensityMatrix, a: &HermitianOperator, t: f64) -> CMat {
    let u = UnitaryOperator::exp_i(&a.scale(t));
    u.matrix() * rho.matrix() * u.matrix().adjoint()
}

fn derivative_checks(
    t: &mut Tally,
    rho: &DensityMatrix,
    a: &HermitianOperator,
    b: &HermitianOperator,
    f: &MonotoneFunction,
    seed: u64,
) -> Result<()> {
    let h = 1e-5;
    let ev = |m: &CMat| (m * b.matrix()).trace().re;
    let fd = (ev(&evolve(rho, a, h)) - ev(&evolve(rho, a, -h))) / (2.0 * h);
    let b0 = crate::infogeo::centered(rho, b)?;
    let l = l_operator(rho, a, f)?;
    let inner = fisher_inner(rho, &b0, &l, f)?;
    t.close(fd, inner.re, 1e-6, || format!("d<B>/dt {} seed {seed}", f.name()));
    let bb = fisher_inner(rho, &b0, &b0, f)?.re;
    let ll = fisher_inner(rho, &l, &l, f)?.re;
    t.geq(bb * ll, inner.norm_sqr(), 1e-9, || format!("Cauchy-Schwarz {} seed {seed}", f.name()));
    Ok(())
}

/// P1–P4, additivity on products and `V^f ≤ V`.
pub fn properties_suite(seed: u64, trials: usize) -> SuiteResult {
    let mut t = Tally::new("P1-P4 and additivity");
    let fs = suite_functions();
    let p1_trials = 2 * trials;
    for trial in 0..p1_trials {
        let s = derive_seed(seed, 0x9_1 << 32 | trial as u64);
        let mut r = random::rng(s);
        let dim = ensemble_dim(&mut r, 2, 8);
        let (rho, a, _) = random_triple(dim, &mut r);
        for f in &fs {
            let res = (|| -> Result<()> {
                let (i, v, vf) = (skew_information(&rho, &a, f)?, variance(&rho, &a)?, f_variance(&rho, &a, f)?);
                t.geq(i, 0.0, 1e-10, || format!("P1 I >= 0 {} seed {s}", f.name()));
                t.geq(v, i, 1e-10, || format!("P1 I <= V {} seed {s}", f.name()));
                t.geq(v, vf, 1e-10, || format!("V^f <= V {} seed {s}", f.name()));
                Ok(())
            })();
            if let Err(e) = res {
                t.error(e, "P1");
            }
        }
    }
    for trial in 0..trials {
        let s = derive_seed(seed, 0x9_4 << 32 | trial as u64);
        let mut r = random::rng(s);
        let dim = ensemble_dim(&mut r, 2, 5);
        let a = random::random_hermitian_with(dim, 1.0, &mut r);
        let parts: Vec<DensityMatrix> = (0..3).map(|_| random::random_density_with(dim, &mut r)).collect();
        let w: Vec<f64> = {
            use rand::Rng;
            let raw: Vec<f64> = (0..3).map(|_| r.random::<f64>() + 1e-3).collect();
            let total: f64 = raw.iter().sum();
            raw.iter().map(|x| x / total).collect()
        };
        let mix = parts.iter().zip(&w).fold(CMat::zeros(dim, dim), |acc, (p, q)| acc + p.matrix().scale(*q));
        let mix = DensityMatrix::new(mix).expect("convex combination");
        // P3 and P2 on the same draw
        let pure = random::random_pure_with(dim, &mut r);
        let e = a.eigh();
        let diag: Vec<f64> = {
            use rand::Rng;
            let raw: Vec<f64> = (0..dim).map(|_| r.random::<f64>() + 1e-3).collect();
            let total: f64 = raw.iter().sum();
            raw.iter().map(|x| x / total).collect()
        };
        let commuting = DensityMatrix::new(
            &e.vectors * HermitianOperator::from_real_diagonal(&diag).matrix() * e.vectors.adjoint(),
        )
        .expect("valid");
        let (r1, r2) = (random::random_density_with(2, &mut r), random::random_density_with(dim, &mut r));
        let (a1, a2) = (random::random_hermitian_with(2, 1.0, &mut r), random::random_hermitian_with(dim, 1.0, &mut r));
        for f in &fs {
            let res = (|| -> Result<()> {
                let whole = skew_information(&mix, &a, f)?;
                let sum: f64 = parts.iter().zip(&w).map(|(p, q)| skew_information(p, &a, f).map(|i| q * i)).sum::<Result<f64>>()?;
                t.geq(sum, whole, 1e-9, || format!("P4 convexity {} seed {s}", f.name()));
                t.close(skew_information(&pure, &a, f)?, variance(&pure, &a)?, 1e-10, || format!("P3 {} seed {s}", f.name()));
                t.close(skew_information(&commuting, &a, f)?, 0.0, 1e-10, || format!("P2 {} seed {s}", f.name()));
                let joint = r1.tensor(&r2)?;
                let total = hermitian(tensor(a1.matrix(), &CMat::identity(dim, dim)) + tensor(&CMat::identity(2, 2), a2.matrix()));
                let lhs = skew_information(&joint, &total, f)?;
                let rhs = skew_information(&r1, &a1, f)? + skew_information(&r2, &a2, f)?;
                t.close(lhs, rhs, 1e-9, || format!("additivity {} seed {s}", f.name()));
                Ok(())
            })();
            if let Err(e) = res {
                t.error(e, "P2-P4");
            }
        }
    }
    t.finish()
}

/// Registry validation, the condition for Type 2 and a 2×2 operator
/// monotonicity spot-check.
pub fn monotone_suite(seed: u64) -> SuiteResult {
    let mut t = Tally::new("monotone registry");
    for f in suite_functions() {
        t.check(f.validate().is_ok(), || format!("{} fails validation", f.name()));
        t.close(f.eval(1e-16), f.f0(), 1e-6, || format!("{} f(0) consistency", f.name()));
    }
    t.check(!check_cond_y(&MonotoneFunction::sld()), || "sld unexpectedly satisfies the Type 2 condition".into());
    t.check(check_cond_y(&MonotoneFunction::wy()), || "wy fails the Type 2 condition".into());
    let mut r = random::rng(derive_seed(seed, 0x0A));
    for _ in 0..200 {
        let g = random::ginibre_with(2, 2, &mut r);
        let h = random::ginibre_with(2, 2, &mut r);
        let a = hermitian(&g * g.adjoint());
        let b = hermitian(a.matrix() + &h * h.adjoint());
        for f in suite_functions() {
            match (apply_to_operator(&f, &b), apply_to_operator(&f, &a)) {
                (Ok(fb), Ok(fa)) => {
                    let min = hermitian(fb - fa).eigh().values[0];
                    t.geq(min, 0.0, 1e-9, || format!("operator monotone {}", f.name()));
                }
                (Err(e), _) | (_, Err(e)) => t.error(e, "functional calculus"),
            }
        }
    }
    t.finish()
}

/// Measurement ensembles at `2⊗4` and `3⊗3`.
pub fn way_suite(seed: u64, trials: usize) -> SuiteResult {
    let mut t = Tally::new("WAY-Ozawa");
    let fs = suite_functions();
    for (ds, de) in [(2usize, 4usize), (3, 3)] {
        for trial in 0..trials {
            let s = derive_seed(seed, ((ds * 10 + de) as u64) << 32 | trial as u64);
            let mut r = random::rng(s);
            let set = random_conserving_set(ds, de, &mut r);
            let b = random::random_hermitian_with(ds, 1.0, &mut r);
            let rho = random::random_density_with(ds, &mut r);
            let res = (|| -> Result<()> {
                let e2 = set.error_sq(&b, &rho)?;
                for f in &fs {
                    let bound = set.way_ozawa_bound(&b, &rho, f)?;
                    t.geq(e2, bound, 1e-9, || format!("eps^2 >= bound {} {ds}x{de} seed {s}", f.name()));
                }
                let tr = set.commutator_transfer_check(&b, &rho)?;
                t.check(tr.holds, || format!("transfer identity {ds}x{de} seed {s}: residual {}", tr.residual));
                let c = set.korzekwa_comparison(&b, &rho)?;
                t.check(c.ordered, || format!("bound ordering {ds}x{de} seed {s}: {c:?}"));
                let worst = set.worst_error(&b)?;
                t.geq(worst, e2.max(0.0).sqrt(), 1e-12, || format!("worst error dominance seed {s}"));
                let k = set.conditional_error(&b)?;
                t.geq(k.eigh().values[0], 0.0, 1e-10, || format!("K PSD seed {s}"));
                let (eps2, v, vf) = set.noise_chain(&b, &rho, &MonotoneFunction::sld())?;
                t.geq(eps2, v, 1e-10, || format!("eps^2 >= V(N) seed {s}"));
                t.geq(v, vf, 1e-10, || format!("V(N) >= V^f(N) seed {s}"));
                Ok(())
            })();
            if let Err(e) = res {
                t.error(e, &format!("{ds}x{de} seed {s}"));
            }
        }
    }
    t.finish()
}

/// Closed form on the qubit instance and its grid realization.
pub fn construction_suite() -> SuiteResult {
    let mut t = Tally::new("construction oracle");
    for xi in [1.0, 2.0, 6.0] {
        let spec = qubit_spec(xi).expect("valid");
        let w = exact_error_matrix(&spec);
        let want = 2.0 * (1.0 - (-1.0 / (8.0 * xi * xi)).exp());
        let dev = (w.matrix() - CMat::identity(2, 2).scale(want)).norm();
        t.close(dev, 0.0, 1e-12, || format!("closed form at xi {xi}"));
    }
    let spec = qubit_spec(1.0).expect("valid");
    let w = exact_error_matrix(&spec);
    match discretize(&spec, GridSpec { subdivision: 50, half_extent: 12.0 }) {
        Ok(set) => {
            let mut r = random::rng(0x6_12D);
            for _ in 0..20 {
                let rho = random::random_density_with(2, &mut r);
                match set.error_sq(spec.b(), &rho) {
                    Ok(e2) => t.close(e2, rho.expect(w.matrix()).re, 1e-6, || "grid vs closed form".into()),
                    Err(e) => t.error(e, "grid error"),
                }
            }
            match set.env_skew(&MonotoneFunction::sld()) {
                Ok(c) => t.close(c, 1.0, 1e-6, || "pointer coherence".into()),
                Err(e) => t.error(e, "pointer coherence"),
            }
        }
        Err(e) => t.error(e, "discretize"),
    }
    t.finish()
}

/// `exact_worst_error² ≤ series ≤ error_bound` on random specs, and the
/// end-to-end guarantee at `ξ_ε`.
pub fn bound_chain_suite(seed: u64, trials: usize) -> SuiteResult {
    use rand::Rng;
    let mut t = Tally::new("bound chain");
    for trial in 0..trials {
        let s = derive_seed(seed, 0xB0 << 32 | trial as u64);
        let mut r = random::rng(s);
        let dim = r.random_range(2..=5);
        let xi = r.random_range(1.0..=50.0);
        let spec = random_lattice_spec(dim, 4, xi, &mut r);
        let exact = exact_worst_error(&spec).powi(2);
        let bound = error_bound(&spec);
        match series_tail_bound(&spec, 10) {
            Ok(series) => {
                t.geq(series, exact, 1e-12, || format!("series >= exact seed {s}"));
                t.geq(bound, series, 1e-12, || format!("bound >= series seed {s}"));
            }
            Err(e) => t.error(e, "series"),
        }
        t.geq(bound, exact, 1e-12, || format!("bound >= exact seed {s}"));
    }
    for eps in [0.1, 0.05, 0.01] {
        let res = xi_for_epsilon(1.0, 1.0, eps).and_then(qubit_spec);
        match res {
            Ok(spec) => {
                let w = exact_worst_error(&spec);
                let want = (2.0 * (1.0 - (-1.0 / (8.0 * spec.xi().powi(2))).exp())).sqrt();
                t.close(w, want, 1e-6, || format!("closed form at eps {eps}"));
                t.geq(eps, w, 0.0, || format!("worst error <= eps at eps {eps}"));
            }
            Err(e) => t.error(e, "xi_eps"),
        }
    }
    t.finish()
}

pub fn cost_suite() -> SuiteResult {
    let mut t = Tally::new("cost sandwich");
    match asymptotic_table(1.0, 1.0, &[0.1, 0.05, 0.01], &MonotoneFunction::sld()) {
        Ok(table) => {
            for (row, (lo, up)) in table.rows.iter().zip([(4.5, 6.0), (9.5, 11.0), (49.5, 51.0)]) {
                t.close(row.lower_sqrt, lo, 1e-10, || format!("lower at {}", row.eps));
                t.close(row.upper_sqrt.unwrap_or(f64::NAN), up, 1e-10, || format!("upper at {}", row.eps));
                t.check(row.sandwiched(), || format!("sandwich at {}", row.eps));
                let gap = row.eps_times_upper().unwrap_or(f64::NAN) - row.eps_times_lower();
                t.close(gap, 1.5 * row.eps, 1e-12, || format!("gap at {}", row.eps));
            }
            let ups: Vec<f64> = table.rows.iter().filter_map(|r| r.eps_times_upper()).collect();
            let los: Vec<f64> = table.rows.iter().map(|r| r.eps_times_lower()).collect();
            t.check(ups.windows(2).all(|w| w[1] < w[0]) && los.windows(2).all(|w| w[1] > w[0]), || {
                "products not monotone".into()
            });
            t.check(table.within_order_a && table.equality_claimed, || "asymptotic claims".into());
        }
        Err(e) => t.error(e, "table"),
    }
    t.finish()
}

pub fn negative_controls_suite(seed: u64) -> SuiteResult {
    let mut t = Tally::new("negative controls");
    let mut r = random::rng(derive_seed(seed, 0xBAD));
    let set = random_nonconserving_set(2, 3, &mut r);
    t.check(matches!(set.validate(), Err(Error::InvariantViolation { .. })), || "non-conserving U validated".into());
    let b = random::random_hermitian_with(2, 1.0, &mut r);
    let rho = random::random_density_with(2, &mut r);
    t.check(
        matches!(set.commutator_transfer_check(&b, &rho), Err(Error::InvariantViolation { .. })),
        || "transfer check did not report the invariant violation".into(),
    );
    t.check(matches!(cost_upper_sqrt(1.0, 1.0, 0.2), Err(Error::OutOfRegime { .. })), || "eps 0.2 accepted".into());
    let bad = MonotoneFunction::custom("twice-sld", 1.0, |x| 1.0 + x);
    t.check(matches!(bad, Err(Error::NotStandard { .. })), || "f(1) = 2 accepted".into());
    t.check(MonotoneFunction::by_name("wyd:1.5").is_err(), || "wyd:1.5 accepted".into());
    let comm = commutator(&pauli_x(), &pauli_y()).expect("2x2");
    t.check((comm[(0, 0)] - C64::new(0.0, 2.0)).norm() < 1e-15, || "Pauli algebra".into());
    t.finish()
}

/// Every suite, in a fixed order.
pub fn selftest(seed: u64, sizes: SuiteSizes) -> Vec<SuiteResult> {
    selftest_tasks(seed, sizes).into_iter().map(|task| task()).collect()
}

/// The selftest as independent closures, for callers that run them in
/// parallel.
pub fn selftest_tasks(seed: u64, sizes: SuiteSizes) -> Vec<Box<dyn Fn() -> SuiteResult + Send + Sync>> {
    vec![
        Box::new(move || monotone_suite(seed)),
        Box::new(move || relations_suite(seed, &[2, 3, 4, 8], sizes.relation_trials)),
        Box::new(saturation_suite),
        Box::new(move || fisher_suite(seed, sizes.ensemble_trials)),
        Box::new(move || properties_suite(seed, sizes.ensemble_trials)),
        Box::new(move || way_suite(seed, sizes.way_trials)),
        Box::new(construction_suite),
        Box::new(move || bound_chain_suite(seed, sizes.spec_trials)),
        Box::new(cost_suite),
        Box::new(move || negative_controls_suite(seed)),
    ]
}
