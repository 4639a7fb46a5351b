//! End-to-end acceptance checks, one PASS/FAIL line each. Runs as a plain
//! binary so the report prints in order.

use std::process::ExitCode;
use std::time::Instant;

use rand::Rng;

use coherence_core::construct::{self, qubit_spec, random_lattice_spec, GridSpec};
use coherence_core::costs;
use coherence_core::error::Error;
use coherence_core::infogeo::{fisher_information, f_variance, skew_information, u_quantity, u_quantity_via_tilde, variance};
use coherence_core::linops::random::{self, derive_seed};
use coherence_core::linops::{hermitian, pauli_x, pauli_y, tensor, CMat, DensityMatrix, HermitianOperator};
use coherence_core::measure::{random_conserving_set, random_nonconserving_set};
use coherence_core::monotone::{check_cond_y, registry, MonotoneFunction};
use coherence_core::uncertainty::{lemma1, robertson, type1, type2, type3, RelationVerdict};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn scale_tol(lhs: f64, rhs: f64) -> f64 {
    1e-9 * lhs.abs().max(rhs.abs()).max(1.0)
}

fn weights(n: usize, r: &mut impl Rng) -> Vec<f64> {
    let raw: Vec<f64> = (0..n).map(|_| r.random::<f64>() + 1e-3).collect();
    let total: f64 = raw.iter().sum();
    raw.iter().map(|x| x / total).collect()
}

fn fail_on(bad: usize, total: usize, worst: &str) -> Outcome {
    if bad == 0 {
        Ok(format!("{total} checks"))
    } else {
        Err(format!("{bad}/{total} failed; first: {worst}"))
    }
}

fn criterion_relations() -> Outcome {
    let fs = vec![MonotoneFunction::sld(), MonotoneFunction::wy(), MonotoneFunction::wyd(0.5).map_err(|e| e.to_string())?];
    let (mut checks, mut bad, mut first, mut min_slack) = (0usize, 0usize, String::new(), f64::INFINITY);
    let mut record = |v: &RelationVerdict, tag: &str| {
        checks += 1;
        let tol = scale_tol(v.lhs, v.rhs);
        min_slack = min_slack.min(v.slack / v.lhs.abs().max(v.rhs.abs()).max(1.0));
        if v.slack < -tol {
            if bad == 0 {
                first = format!("{} {tag}: lhs {} rhs {}", v.relation, v.lhs, v.rhs);
            }
            bad += 1;
        }
    };
    for dim in [2usize, 3, 4, 8] {
        for trial in 0..1000u64 {
            let seed = derive_seed(0xACC1, (dim as u64) << 32 | trial);
            let mut r = random::rng(seed);
            let rho = random::random_density_with(dim, &mut r);
            let a = random::random_hermitian_with(dim, 1.0, &mut r);
            let b = random::random_hermitian_with(dim, 1.0, &mut r);
            let tag = format!("dim {dim} seed {seed}");
            record(&robertson(&rho, &a, &b).map_err(|e| format!("{tag}: {e}"))?, &tag);
            for f in &fs {
                let tag = format!("{} {tag}", f.name());
                let run = |g: fn(&DensityMatrix, &HermitianOperator, &HermitianOperator, &MonotoneFunction) -> coherence_core::error::Result<RelationVerdict>| {
                    g(&rho, &a, &b, f).map_err(|e| format!("{tag}: {e}"))
                };
                record(&run(lemma1)?, &tag);
                record(&run(type1)?, &tag);
                record(&run(type3)?, &tag);
                if check_cond_y(f) {
                    record(&run(type2)?, &tag);
                }
            }
        }
    }
    fail_on(bad, checks, &first).map(|s| format!("{s}, min relative slack {min_slack:.2e}"))
}

fn criterion_saturation() -> Outcome {
    let rho = DensityMatrix::from_real_diagonal(&[0.75, 0.25]).map_err(|e| e.to_string())?;
    let (a, b) = (hermitian(pauli_x()), hermitian(pauli_y()));
    let v = lemma1(&rho, &a, &b, &MonotoneFunction::sld()).map_err(|e| e.to_string())?;
    if (v.lhs - 0.25).abs() <= 1e-10 && (v.rhs - 0.25).abs() <= 1e-10 {
        Ok(format!("lhs {:.12} rhs {:.12}", v.lhs, v.rhs))
    } else {
        Err(format!("lhs {} rhs {}", v.lhs, v.rhs))
    }
}

/// Full-rank ensemble shared by the Fisher and dual-path criteria.
fn full_rank_ensemble() -> Vec<(DensityMatrix, HermitianOperator)> {
    (0..500u64)
        .map(|trial| {
            let mut r = random::rng(derive_seed(0xACC3, trial));
            let dim = r.random_range(2..=6);
            (random::random_density_with(dim, &mut r), random::random_hermitian_with(dim, 1.0, &mut r))
        })
        .collect()
}

fn criterion_fisher() -> Outcome {
    let (mut checks, mut bad, mut first, mut worst) = (0, 0, String::new(), 0.0f64);
    for (k, (rho, a)) in full_rank_ensemble().iter().enumerate() {
        if rho.eigenvalues().iter().any(|&p| p <= 0.0) {
            return Err(format!("instance {k} is not full rank"));
        }
        for f in registry() {
            let i = skew_information(rho, a, &f).map_err(|e| e.to_string())?;
            let fi = fisher_information(rho, a, &f).map_err(|e| e.to_string())?;
            let dev = (i - 0.5 * f.f0() * fi).abs();
            checks += 1;
            worst = worst.max(dev / i.max(f64::MIN_POSITIVE));
            if dev > 1e-9 * i {
                if bad == 0 {
                    first = format!("{} instance {k}: I {i} vs {}", f.name(), 0.5 * f.f0() * fi);
                }
                bad += 1;
            }
        }
    }
    fail_on(bad, checks, &first).map(|s| format!("{s}, max relative deviation {worst:.2e}"))
}

fn criterion_dual_path() -> Outcome {
    let (mut checks, mut bad, mut first, mut worst) = (0, 0, String::new(), 0.0f64);
    for (k, (rho, a)) in full_rank_ensemble().iter().enumerate() {
        for f in registry() {
            let u1 = u_quantity(rho, a, &f).map_err(|e| e.to_string())?;
            let u2 = u_quantity_via_tilde(rho, a, &f).map_err(|e| e.to_string())?;
            let rel = (u1 - u2).abs() / u1.abs().max(u2.abs()).max(f64::MIN_POSITIVE);
            checks += 1;
            worst = worst.max(rel);
            if rel > 1e-8 {
                if bad == 0 {
                    first = format!("{} instance {k}: {u1} vs {u2}", f.name());
                }
                bad += 1;
            }
        }
    }
    fail_on(bad, checks, &first).map(|s| format!("{s}, max relative deviation {worst:.2e}"))
}

fn criterion_properties() -> Outcome {
    let (mut checks, mut bad, mut first) = (0, 0, String::new());
    let mut check = |ok: bool, what: String| {
        checks += 1;
        if !ok {
            if bad == 0 {
                first = what;
            }
            bad += 1;
        }
    };
    let err = |e: Error| e.to_string();
    // P1 and V^f <= V
    for trial in 0..1000u64 {
        let mut r = random::rng(derive_seed(0xACC5, trial));
        let dim = r.random_range(2..=8);
        let rho = random::random_density_with(dim, &mut r);
        let a = random::random_hermitian_with(dim, 1.0, &mut r);
        for f in registry() {
            let (i, v, vf) = (skew_information(&rho, &a, &f).map_err(err)?, variance(&rho, &a).map_err(err)?, f_variance(&rho, &a, &f).map_err(err)?);
            check(i >= -1e-10 && i <= v + 1e-10 && vf <= v + 1e-10, format!("P1 {} trial {trial}: I {i} V {v} V^f {vf}", f.name()));
        }
    }
    for trial in 0..500u64 {
        let mut r = random::rng(derive_seed(0xACC6, trial));
        let dim = r.random_range(2..=5);
        let a = random::random_hermitian_with(dim, 1.0, &mut r);
        let parts: Vec<DensityMatrix> = (0..3).map(|_| random::random_density_with(dim, &mut r)).collect();
        let q = weights(3, &mut r);
        let mix = parts.iter().zip(&q).fold(CMat::zeros(dim, dim), |acc, (p, w)| acc + p.matrix().scale(*w));
        let mix = DensityMatrix::new(mix).map_err(err)?;
        let pure = random::random_pure_with(dim, &mut r);
        let eig = a.eigh();
        let commuting = DensityMatrix::new(
            &eig.vectors * HermitianOperator::from_real_diagonal(&weights(dim, &mut r)).matrix() * eig.vectors.adjoint(),
        )
        .map_err(err)?;
        let (r1, r2) = (random::random_density_with(2, &mut r), random::random_density_with(dim, &mut r));
        let (a1, a2) = (random::random_hermitian_with(2, 1.0, &mut r), random::random_hermitian_with(dim, 1.0, &mut r));
        let joint = r1.tensor(&r2).map_err(err)?;
        let total = hermitian(tensor(a1.matrix(), &CMat::identity(dim, dim)) + tensor(&CMat::identity(2, 2), a2.matrix()));
        for f in registry() {
            let n = f.name().to_string();
            let whole = skew_information(&mix, &a, &f).map_err(err)?;
            let mut sum = 0.0;
            for (p, w) in parts.iter().zip(&q) {
                sum += w * skew_information(p, &a, &f).map_err(err)?;
            }
            check(whole <= sum + 1e-9, format!("P4 {n} trial {trial}: {whole} > {sum}"));
            let (ip, vp) = (skew_information(&pure, &a, &f).map_err(err)?, variance(&pure, &a).map_err(err)?);
            check((ip - vp).abs() <= 1e-10, format!("P3 {n} trial {trial}: {ip} vs {vp}"));
            let ic = skew_information(&commuting, &a, &f).map_err(err)?;
            check(ic.abs() <= 1e-10, format!("P2 {n} trial {trial}: {ic}"));
            let lhs = skew_information(&joint, &total, &f).map_err(err)?;
            let rhs = skew_information(&r1, &a1, &f).map_err(err)? + skew_information(&r2, &a2, &f).map_err(err)?;
            check((lhs - rhs).abs() <= 1e-9, format!("additivity {n} trial {trial}: {lhs} vs {rhs}"));
        }
    }
    fail_on(bad, checks, &first)
}

fn criterion_way() -> Outcome {
    let (mut checks, mut bad, mut first) = (0, 0, String::new());
    let mut check = |ok: bool, what: String| {
        checks += 1;
        if !ok {
            if bad == 0 {
                first = what;
            }
            bad += 1;
        }
    };
    let fs = registry();
    for (ds, de) in [(2usize, 4usize), (3, 3)] {
        for trial in 0..300u64 {
            let seed = derive_seed(0xACC7, (ds as u64) << 40 | (de as u64) << 32 | trial);
            let mut r = random::rng(seed);
            let set = random_conserving_set(ds, de, &mut r);
            let rho = random::random_density_with(ds, &mut r);
            let b = random::random_hermitian_with(ds, 1.0, &mut r);
            let tag = format!("{ds}x{de} seed {seed}");
            set.validate().map_err(|e| format!("{tag}: {e}"))?;
            let e2 = set.error_sq(&b, &rho).map_err(|e| e.to_string())?;
            for f in &fs {
                let bound = set.way_ozawa_bound(&b, &rho, f).map_err(|e| e.to_string())?;
                check(e2 >= bound - scale_tol(e2, bound), format!("{} {tag}: eps^2 {e2} < bound {bound}", f.name()));
            }
            let tr = set.commutator_transfer_check(&b, &rho).map_err(|e| e.to_string())?;
            check(tr.residual <= 1e-9, format!("transfer {tag}: residual {:.3e}", tr.residual));
            let cmp = set.korzekwa_comparison(&b, &rho).map_err(|e| e.to_string())?;
            let ordered = cmp.bound_sld >= cmp.bound_korzekwa - scale_tol(cmp.bound_sld, cmp.bound_korzekwa)
                && cmp.bound_sld >= cmp.bound_original - scale_tol(cmp.bound_sld, cmp.bound_original);
            check(ordered, format!("ordering {tag}: {cmp:?}"));
        }
    }
    fail_on(bad, checks, &first)
}

fn qubit_eps_sq(xi: f64) -> f64 {
    2.0 * (1.0 - (-1.0 / (8.0 * xi * xi)).exp())
}

fn criterion_construction() -> Outcome {
    let start = Instant::now();
    for xi in [1.0, 2.0, 6.0] {
        let spec = qubit_spec(xi).map_err(|e| e.to_string())?;
        let w = construct::exact_error_matrix(&spec);
        let want = qubit_eps_sq(xi);
        // σ_x has no preferred state, so every diagonal entry carries the error
        for k in 0..2 {
            let got = w.matrix()[(k, k)].re;
            if (got - want).abs() > 1e-12 {
                return Err(format!("xi {xi}: W[{k},{k}] = {got}, closed form {want}"));
            }
        }
    }
    let spec = qubit_spec(1.0).map_err(|e| e.to_string())?;
    let set = construct::discretize(&spec, GridSpec { subdivision: 50, half_extent: 12.0 }).map_err(|e| e.to_string())?;
    let grid = set.worst_error(spec.b()).map_err(|e| e.to_string())?;
    let want = qubit_eps_sq(1.0).sqrt();
    let elapsed = start.elapsed().as_secs_f64();
    if (grid - want).abs() > 1e-6 {
        return Err(format!("grid worst error {grid} vs {want}"));
    }
    if elapsed > 30.0 {
        return Err(format!("took {elapsed:.1} s"));
    }
    Ok(format!("grid {grid:.9} vs closed form {want:.9} (deviation {:.1e})", (grid - want).abs()))
}

fn criterion_bound_chain() -> Outcome {
    for trial in 0..100u64 {
        let mut r = random::rng(derive_seed(0xACC8, trial));
        let dim = r.random_range(2..=5);
        let xi = r.random_range(1.0..=50.0);
        let spec = random_lattice_spec(dim, 4, xi, &mut r);
        let (worst, bound) = (construct::exact_worst_error(&spec), construct::error_bound(&spec));
        if worst * worst > bound * (1.0 + 1e-12) {
            return Err(format!("trial {trial}: worst^2 {} > bound {bound}", worst * worst));
        }
    }
    let spec = qubit_spec(1.0).map_err(|e| e.to_string())?;
    let mut achieved = Vec::new();
    for eps in [0.1, 0.05, 0.01] {
        let (xi, worst) = costs::certify_achievability(&spec, eps).map_err(|e| e.to_string())?;
        let closed = qubit_eps_sq(xi).sqrt();
        if worst > eps || (worst - closed).abs() > 1e-6 {
            return Err(format!("eps {eps}: xi {xi} worst {worst} closed form {closed}"));
        }
        achieved.push(format!("{worst:.6} (xi={xi})"));
    }
    Ok(format!("100 specs; achieved {}", achieved.join(", ")))
}

fn criterion_cost_sandwich() -> Outcome {
    let eps = [0.1, 0.05, 0.01];
    let table = costs::asymptotic_table(1.0, 1.0, &eps, &MonotoneFunction::sld()).map_err(|e| e.to_string())?;
    let (lower, upper) = ([4.5, 9.5, 49.5], [6.0, 11.0, 51.0]);
    let mut prev: Option<(f64, f64)> = None;
    for (k, row) in table.rows.iter().enumerate() {
        let u = row.upper_sqrt.ok_or_else(|| format!("eps {} out of window", row.eps))?;
        if (row.lower_sqrt - lower[k]).abs() > 1e-12 || (u - upper[k]).abs() > 1e-12 {
            return Err(format!("eps {}: lower {} upper {u}", row.eps, row.lower_sqrt));
        }
        if !row.sandwiched() {
            return Err(format!("eps {}: achieved outside [lower, upper]", row.eps));
        }
        let (el, eu) = (row.eps_times_lower(), row.eps_times_upper().expect("in window"));
        if ((eu - el) - 1.5 * row.eps).abs() > 1e-12 {
            return Err(format!("eps {}: eps*upper - eps*lower = {}", row.eps, eu - el));
        }
        if let Some((pl, pu)) = prev {
            // lower climbs to 1/2, upper falls to 1/2
            if !(el > pl && el < 0.5 && eu < pu && eu > 0.5) {
                return Err(format!("eps {}: not monotone toward 0.5", row.eps));
            }
        }
        prev = Some((el, eu));
    }
    if !(table.equality_claimed && (table.limit_lower - 0.5).abs() < 1e-15 && (table.limit_upper - 0.5).abs() < 1e-15) {
        return Err(format!("limits {} and {}", table.limit_lower, table.limit_upper));
    }
    Ok("lower {4.5, 9.5, 49.5}, upper {6, 11, 51}".into())
}

fn criterion_negative_controls() -> Outcome {
    let mut r = random::rng(0xACCA);
    match random_nonconserving_set(2, 3, &mut r).validate() {
        Err(Error::InvariantViolation { invariant, .. }) if invariant.contains("A_S + A_E") => {}
        other => return Err(format!("non-conserving U: {other:?}")),
    }
    match costs::cost_upper_sqrt(1.0, 1.0, 0.2) {
        Err(Error::OutOfRegime { .. }) => {}
        other => return Err(format!("eps outside window: {other:?}")),
    }
    match MonotoneFunction::custom("twice", 1.0, |x| 2.0 * (1.0 + x) / 2.0) {
        Err(Error::NotStandard { .. }) => {}
        other => return Err(format!("f(1) = 2 accepted: {:?}", other.map(|f| f.name().to_string()))),
    }
    Ok("all three rejected".into())
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("1 relation suite", criterion_relations),
        ("2 saturation witness", criterion_saturation),
        ("3 skew-Fisher identity", criterion_fisher),
        ("4 U^f dual path", criterion_dual_path),
        ("5 P1-P4 and additivity", criterion_properties),
        ("6 WAY-Ozawa", criterion_way),
        ("7 construction oracle", criterion_construction),
        ("8 bound chain", criterion_bound_chain),
        ("9 cost sandwich", criterion_cost_sandwich),
        ("10 negative controls", criterion_negative_controls),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {name}: {detail} [{secs:.2} s]"),
            Err(detail) => {
                failed += 1;
                println!("FAIL {name}: {detail} [{secs:.2} s]");
            }
        }
    }
    println!("{} of 10 criteria passed", 10 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
