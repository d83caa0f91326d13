//! Acceptance suite: one test per release criterion, each printing a
//! PASS/FAIL line (run with `--nocapture` to see them).

use std::time::Instant;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use chaosdeg_core::circlemap::convergent_decay;
use chaosdeg_core::dynamics::{builtin_map, DomainBox, InitialEnsemble, MapSystem};
use chaosdeg_core::infodyn::{
    axiom_suite, ecd_from_model, ecd_of_system, mutual_entropy, shannon_entropy, ObservationSpec,
    ProbVector,
};
use chaosdeg_core::lyapunov::{ecd_lyapunov_agreement, lyapunov_1d, lyapunov_md};
use chaosdeg_core::partition::{channel_from, EmpiricalModel};
use chaosdeg_core::quantum::{
    quantum_ecd, DensityMatrix, QuantumChannel,
};
use chaosdeg_core::report::{sweep_csv, LogBase};
use chaosdeg_core::sweep::{run_sweep, SweepConfig};

const GOLDEN: f64 = 0.618033988749894_9; // (sqrt(5) - 1) / 2

fn report(n: u32, name: &str, pass: bool, details: &str) {
    println!(
        "[acceptance] criterion {n} ({name}): {} — {details}",
        if pass { "PASS" } else { "FAIL" }
    );
}

fn random_model(rng: &mut ChaCha8Rng, max_cells: usize) -> EmpiricalModel {
    let n = rng.random_range(2..=max_cells);
    let entries = rng.random_range(1..=3 * n);
    let joint: Vec<(u32, u32, f64)> = (0..entries)
        .map(|_| {
            (
                rng.random_range(0..n as u32),
                rng.random_range(0..n as u32),
                rng.random_range(0.01..1.0),
            )
        })
        .collect();
    EmpiricalModel::from_joint_mass(joint, n).unwrap()
}

#[test]
fn criterion_01_form_equivalence() {
    let t0 = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let mut max_delta = 0.0f64;
    for _ in 0..200 {
        let model = random_model(&mut rng, 100);
        let r = ecd_from_model(&model).unwrap();
        // conditional-entropy form vs S(out) - I, recomputed here
        let alt = r.s_out - r.mutual;
        max_delta = max_delta.max((r.value - alt).abs());
    }
    let elapsed = t0.elapsed();
    let pass = max_delta <= 1e-10 && elapsed.as_secs_f64() < 1.0;
    report(
        1,
        "form equivalence",
        pass,
        &format!("max |delta| = {max_delta:.2e} over 200 models, {elapsed:?}"),
    );
    assert!(pass, "max_delta={max_delta}, elapsed={elapsed:?}");
}

#[test]
fn criterion_02_circle_rational_collapse() {
    let t0 = Instant::now();
    let mut worst = 0.0f64;
    for (num, den) in [(1u64, 4u64), (3, 7), (5, 12)] {
        let v = num as f64 / den as f64;
        let sys = builtin_map("circle", &[v]).unwrap();
        let r = ecd_of_system(
            &sys,
            &InitialEnsemble::point(&[0.5]),
            &ObservationSpec::partition(vec![den as usize]),
            100,
            10_000,
        )
        .unwrap();
        assert!(r.value >= 0.0 && r.value <= r.s_out + 1e-12);
        worst = worst.max(r.value.abs());
    }
    let elapsed = t0.elapsed();
    let pass = worst <= 1e-12 && elapsed.as_secs_f64() < 1.0;
    report(
        2,
        "circle rational collapse",
        pass,
        &format!("max D = {worst:.2e} for v in {{1/4, 3/7, 5/12}}, {elapsed:?}"),
    );
    assert!(pass, "worst={worst}, elapsed={elapsed:?}");
}

#[test]
fn criterion_03_circle_irrational_positivity() {
    let t0 = Instant::now();
    let sys = builtin_map("circle", &[GOLDEN]).unwrap();
    let mut min_d = f64::INFINITY;
    for l in [10usize, 100] {
        let r = ecd_of_system(
            &sys,
            &InitialEnsemble::point(&[0.5]),
            &ObservationSpec::partition(vec![l]),
            1000,
            1_000_000,
        )
        .unwrap();
        assert!(r.value >= 0.0 && r.value <= r.s_out + 1e-12);
        min_d = min_d.min(r.value);
    }
    let elapsed = t0.elapsed();
    let pass = min_d > 0.01 && elapsed.as_secs_f64() < 10.0;
    report(
        3,
        "circle irrational positivity",
        pass,
        &format!("min D = {min_d:.4} nats at L in {{10,100}}, {elapsed:?}"),
    );
    assert!(pass, "min_d={min_d}, elapsed={elapsed:?}");
}

#[test]
fn criterion_04_empirical_matches_binary_entropy() {
    let sys = builtin_map("circle", &[GOLDEN]).unwrap();
    let r = ecd_of_system(
        &sys,
        &InitialEnsemble::point(&[0.5]),
        &ObservationSpec::partition(vec![10]),
        1000,
        1_000_000,
    )
    .unwrap();
    // h(10 v - floor(10 v)) at 60-digit precision
    let expect = 0.4719084832180384_f64;
    let delta = (r.value - expect).abs();
    let pass = delta <= 5e-3;
    report(
        4,
        "empirical = theoretical binary entropy",
        pass,
        &format!("D_emp = {:.6}, h(s) = {expect:.6}, |delta| = {delta:.2e}", r.value),
    );
    assert!(pass, "delta={delta}");
}

#[test]
fn criterion_05_convergent_decay() {
    let t0 = Instant::now();
    let table = convergent_decay(GOLDEN, 9, 0.5, 1000, 1_000_000).unwrap();
    let rows: Vec<_> = table
        .rows
        .iter()
        .filter(|r| [5u64, 8, 13, 21, 34, 55, 89].contains(&r.denominator))
        .collect();
    assert_eq!(rows.len(), 7, "expected the seven target denominators");
    let mut in_band = true;
    for r in &rows {
        let ratio = r.d_theoretical / r.bound;
        in_band &= (0.5..=2.0).contains(&ratio);
        // the empirical pipeline must track the closed form as well
        assert!(
            (r.d_empirical - r.d_theoretical).abs() < 5e-3,
            "c={}: emp {} vs theo {}",
            r.denominator,
            r.d_empirical,
            r.d_theoretical
        );
    }
    let d_first = rows.first().unwrap().d_theoretical;
    let d_last = rows.last().unwrap().d_theoretical;
    let min_d = rows.iter().map(|r| r.d_theoretical).fold(f64::INFINITY, f64::min);
    let elapsed = t0.elapsed();
    let pass = in_band && d_last < d_first && min_d < 0.06 && elapsed.as_secs_f64() < 60.0;
    report(
        5,
        "convergent decay",
        pass,
        &format!(
            "band ok = {in_band}, D(89) = {d_last:.4} < D(5) = {d_first:.4}, min = {min_d:.4}, {elapsed:?}"
        ),
    );
    assert!(pass, "in_band={in_band}, d_first={d_first}, d_last={d_last}, min={min_d}");
}

#[test]
fn criterion_06_logistic_chaotic_stable_split() {
    let t0 = Instant::now();
    let obs = ObservationSpec::partition(vec![100]);
    let chaotic = builtin_map("logistic", &[3.71]).unwrap();
    let d_chaotic = ecd_of_system(&chaotic, &InitialEnsemble::point(&[0.3]), &obs, 1000, 100_000)
        .unwrap();
    let l_chaotic = lyapunov_1d(&chaotic, 0.3, 1000, 1_000_000).unwrap();

    let stable = builtin_map("logistic", &[2.8]).unwrap();
    let d_stable = ecd_of_system(&stable, &InitialEnsemble::point(&[0.3]), &obs, 1000, 100_000)
        .unwrap();
    let l_stable = lyapunov_1d(&stable, 0.3, 1000, 1_000_000).unwrap();

    for r in [&d_chaotic, &d_stable] {
        assert!(r.value >= 0.0 && r.value <= r.s_out + 1e-12);
    }
    let elapsed = t0.elapsed();
    let pass = d_chaotic.value > 0.1
        && l_chaotic.top_exponent > 0.3
        && d_stable.value <= 1e-6
        && l_stable.top_exponent < 0.0
        && elapsed.as_secs_f64() < 20.0;
    report(
        6,
        "logistic chaotic/stable split",
        pass,
        &format!(
            "a=3.71: D = {:.3}, lambda = {:.3}; a=2.8: D = {:.1e}, lambda = {:.3}; {elapsed:?}",
            d_chaotic.value, l_chaotic.top_exponent, d_stable.value, l_stable.top_exponent
        ),
    );
    assert!(pass);
}

fn criterion7_config() -> SweepConfig {
    SweepConfig {
        map: "logistic".into(),
        base_params: vec![4.0],
        param_index: 0,
        start: 3.4,
        end: 4.0,
        step: 0.005,
        cells: vec![100],
        skip: 10_000,
        length: 100_000,
        x0: None,
    }
}

#[test]
fn criterion_07_ecd_lyapunov_correspondence() {
    let t0 = Instant::now();
    let rows = run_sweep(&criterion7_config()).unwrap();
    assert_eq!(rows.len(), 121);
    for r in &rows {
        assert!(r.warning.is_none(), "a={}: {:?}", r.param, r.warning);
        assert!(r.d >= 0.0, "a={}: D={}", r.param, r.d);
    }
    let pairs: Vec<(f64, f64)> = rows.iter().map(|r| (r.d, r.lambda)).collect();
    let agreement = ecd_lyapunov_agreement(&pairs, 1e-3).unwrap();
    let window_hit = rows
        .iter()
        .any(|r| (3.828..=3.842).contains(&r.param) && r.d < 1e-3 && r.lambda < 0.0);
    let elapsed = t0.elapsed();
    let pass = agreement.fraction >= 0.9 && window_hit && elapsed.as_secs_f64() < 300.0;
    report(
        7,
        "ECD-Lyapunov correspondence",
        pass,
        &format!(
            "sign agreement = {:.3} over 121 points, period-3 window hit = {window_hit}, {elapsed:?}",
            agreement.fraction
        ),
    );
    assert!(pass, "agreement={}, window={window_hit}", agreement.fraction);
}

#[test]
fn criterion_08_ecd_positivity_always() {
    // representative evaluations across criteria 2..7, plus a superstable
    // configuration where the Lyapunov exponent is -inf
    let mut all_ok = true;
    let mut count = 0;
    let mut check = |sys: &MapSystem, x0: &[f64], cells: usize, skip: usize, n: usize| {
        let r = ecd_of_system(
            sys,
            &InitialEnsemble::point(x0),
            &ObservationSpec::partition(vec![cells]),
            skip,
            n,
        )
        .unwrap();
        let ok =
            r.value >= 0.0 && r.value <= r.s_out + 1e-12 && r.s_out <= (cells as f64).ln() + 1e-12;
        all_ok &= ok;
        count += 1;
    };
    for (num, den) in [(1u64, 4u64), (3, 7), (5, 12)] {
        let sys = builtin_map("circle", &[num as f64 / den as f64]).unwrap();
        check(&sys, &[0.5], den as usize, 100, 10_000);
    }
    let golden_sys = builtin_map("circle", &[GOLDEN]).unwrap();
    check(&golden_sys, &[0.5], 10, 1000, 100_000);
    check(&golden_sys, &[0.5], 100, 1000, 100_000);
    for a in [2.0, 2.8, 3.2, 3.57, 3.71, 3.83, 4.0] {
        let sys = builtin_map("logistic", &[a]).unwrap();
        check(&sys, &[0.3], 100, 1000, 50_000);
    }
    // superstable: derivative hits zero; lambda = -inf, ECD still fine
    let sys = builtin_map("logistic", &[2.0]).unwrap();
    let lam = lyapunov_1d(&sys, 0.5, 0, 1000).unwrap();
    let ecd = ecd_of_system(
        &sys,
        &InitialEnsemble::point(&[0.5]),
        &ObservationSpec::partition(vec![100]),
        0,
        1000,
    )
    .unwrap();
    let superstable_ok = lam.top_exponent == f64::NEG_INFINITY && ecd.value == 0.0;
    let pass = all_ok && superstable_ok;
    report(
        8,
        "ECD positivity always",
        pass,
        &format!("{count} evaluations in [0, S_out], -inf Lyapunov handled = {superstable_ok}"),
    );
    assert!(pass);
}

#[test]
fn criterion_09_lyapunov_oracle() {
    let sys = builtin_map("logistic", &[4.0]).unwrap();
    let r = lyapunov_1d(&sys, 0.3, 1000, 1_000_000).unwrap();
    let delta_logistic = (r.top_exponent - 2f64.ln()).abs();

    let linear = MapSystem::new(
        "linear-diag",
        DomainBox::new(vec![-1.0, -1.0], vec![1.0, 1.0]).unwrap(),
        vec![2.0, 0.5],
        |x, out| {
            out[0] = 2.0 * x[0];
            out[1] = 0.5 * x[1];
        },
        Some(std::sync::Arc::new(|_: &[f64]| {
            DMatrix::from_row_slice(2, 2, &[2.0, 0.0, 0.0, 0.5])
        })),
        vec![None, None],
        vec![0.0, 0.0],
    )
    .unwrap();
    let spec = lyapunov_md(&linear, &[0.0, 0.0], 0, 100, 1)
        .unwrap()
        .spectrum
        .unwrap();
    let delta_spec = (spec[0] - 2f64.ln()).abs().max((spec[1] + 2f64.ln()).abs());

    let pass = delta_logistic <= 1e-3 && delta_spec <= 1e-9;
    report(
        9,
        "Lyapunov oracle",
        pass,
        &format!(
            "logistic a=4: |lambda - ln 2| = {delta_logistic:.2e}; diag(2,1/2): spectrum delta = {delta_spec:.2e}"
        ),
    );
    assert!(pass, "delta_logistic={delta_logistic}, delta_spec={delta_spec}");
}

#[test]
fn criterion_10_id_axioms() {
    let mut rng = ChaCha8Rng::seed_from_u64(1010);
    let mut worst_identity = 0.0f64;
    let mut worst_additivity = 0.0f64;
    let mut worst_perm = 0.0f64;
    for trial in 0..100u64 {
        let model = random_model(&mut rng, 30);
        let n = model.n_cells();
        let p = ProbVector::new(model.marginal().to_vec()).unwrap();
        let channel = channel_from(&model).unwrap();

        let s_in = shannon_entropy(p.as_slice());
        let s_out = shannon_entropy(model.out_marginal());
        let i = mutual_entropy(model.joint(), p.as_slice(), model.out_marginal()).unwrap();
        assert!(s_in >= 0.0);
        assert!(i >= -1e-12 && i <= s_in.min(s_out) + 1e-10, "I = {i}");

        // identity channel transmits the full entropy
        let ident: Vec<(u32, u32, f64)> = p
            .support()
            .map(|k| (k as u32, k as u32, p.as_slice()[k]))
            .collect();
        let i_id = mutual_entropy(&ident, p.as_slice(), p.as_slice()).unwrap();
        worst_identity = worst_identity.max((i_id - s_in).abs());

        // additivity on a product
        let q: Vec<f64> = {
            let raw: Vec<f64> = (0..4).map(|_| rng.random_range(0.1..1.0)).collect();
            let t: f64 = raw.iter().sum();
            raw.into_iter().map(|x| x / t).collect()
        };
        let mut prod = Vec::with_capacity(n * q.len());
        for &a in p.as_slice() {
            for &b in &q {
                prod.push(a * b);
            }
        }
        worst_additivity = worst_additivity
            .max((shannon_entropy(&prod) - (s_in + shannon_entropy(&q))).abs());

        // relabeling invariance of S, I, D
        use rand::seq::SliceRandom;
        let mut perm: Vec<u32> = (0..n as u32).collect();
        perm.shuffle(&mut rng);
        let relabeled: Vec<(u32, u32, f64)> = model
            .joint()
            .iter()
            .map(|&(a, b, w)| (perm[a as usize], perm[b as usize], w))
            .collect();
        let pm = EmpiricalModel::from_joint_mass(relabeled, n).unwrap();
        let i_perm = mutual_entropy(pm.joint(), pm.marginal(), pm.out_marginal()).unwrap();
        let d = s_out - i;
        let d_perm = shannon_entropy(pm.out_marginal()) - i_perm;
        worst_perm = worst_perm
            .max((shannon_entropy(pm.marginal()) - s_in).abs())
            .max((i_perm - i).abs())
            .max((d_perm - d).abs());

        // the packaged suite agrees
        let suite = axiom_suite(&p, &channel, trial).unwrap();
        assert!(suite.all_pass(), "trial {trial}: {suite:?}");
    }
    let pass = worst_identity <= 1e-10 && worst_additivity <= 1e-10 && worst_perm <= 1e-12;
    report(
        10,
        "ID axioms",
        pass,
        &format!(
            "identity slack = {worst_identity:.2e}, additivity slack = {worst_additivity:.2e}, relabeling slack = {worst_perm:.2e} over 100 pairs"
        ),
    );
    assert!(pass);
}

fn random_state(dim: usize, rng: &mut ChaCha8Rng) -> DensityMatrix {
    let mut g = DMatrix::<Complex64>::zeros(dim, dim);
    for i in 0..dim {
        for j in 0..dim {
            g[(i, j)] = Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5);
        }
    }
    let m = &g * g.adjoint();
    let tr: f64 = (0..dim).map(|i| m[(i, i)].re).sum();
    DensityMatrix::new(m / Complex64::new(tr, 0.0)).unwrap()
}

fn random_unitary(dim: usize, rng: &mut ChaCha8Rng) -> DMatrix<Complex64> {
    let mut g = DMatrix::<Complex64>::zeros(dim, dim);
    for i in 0..dim {
        for j in 0..dim {
            g[(i, j)] = Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5);
        }
    }
    let qr = g.qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..dim {
        let rjj = r[(j, j)];
        if rjj.norm() > 0.0 {
            let phase = rjj / rjj.norm();
            let col = q.column(j) * phase.conj();
            q.set_column(j, &col);
        }
    }
    q
}

#[test]
fn criterion_11_quantum_ecd() {
    let mut rng = ChaCha8Rng::seed_from_u64(1111);

    // identity channel: D = 0 for 50 random states, d <= 8
    let mut worst_identity = 0.0f64;
    for _ in 0..50 {
        let dim = rng.random_range(2..=8);
        let rho = random_state(dim, &mut rng);
        let ch = QuantumChannel::identity(dim).unwrap();
        worst_identity = worst_identity.max(quantum_ecd(&rho, &ch, 16).unwrap().abs());
    }

    // fully depolarizing qubit: D = log 2
    let full = QuantumChannel::depolarizing_qubit(1.0).unwrap();
    let mut worst_depol = 0.0f64;
    for _ in 0..5 {
        let rho = random_state(2, &mut rng);
        let d = quantum_ecd(&rho, &full, 16).unwrap();
        worst_depol = worst_depol.max((d - 2f64.ln()).abs());
    }

    // unitary channels: D = 0
    let mut worst_unitary = 0.0f64;
    for _ in 0..10 {
        let dim = rng.random_range(2..=4);
        let u = random_unitary(dim, &mut rng);
        let ch = QuantumChannel::unitary(u).unwrap();
        let rho = random_state(dim, &mut rng);
        worst_unitary = worst_unitary.max(quantum_ecd(&rho, &ch, 16).unwrap().abs());
    }

    // depolarizing family on a pure qubit vs the diagonalization oracle,
    // S(-(1-p/2), (p/2)) evaluated at 60 digits
    let oracle = [
        (0.1, 0.19851524334587256),
        (0.2, 0.32508297339144826),
        (0.3, 0.42270908780599087),
        (0.4, 0.5004024235381879),
        (0.5, 0.5623351446188084),
        (0.6, 0.6108643020548935),
        (0.7, 0.6474466390346325),
        (0.8, 0.6730116670092564),
        (0.9, 0.6881388137135884),
    ];
    let pure = DensityMatrix::pure(&[Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)]).unwrap();
    let mut worst_family = 0.0f64;
    for (p, expect) in oracle {
        let ch = QuantumChannel::depolarizing_qubit(p).unwrap();
        let d = quantum_ecd(&pure, &ch, 16).unwrap();
        worst_family = worst_family.max((d - expect).abs());
    }

    let pass = worst_identity <= 1e-10
        && worst_depol <= 1e-10
        && worst_unitary <= 1e-10
        && worst_family <= 1e-9;
    report(
        11,
        "quantum ECD",
        pass,
        &format!(
            "identity slack = {worst_identity:.2e}, depolarizing slack = {worst_depol:.2e}, unitary slack = {worst_unitary:.2e}, family slack = {worst_family:.2e}"
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_12_reproducibility() {
    let config = criterion7_config();
    let a = sweep_csv(&run_sweep(&config).unwrap(), LogBase::E);
    let b = sweep_csv(&run_sweep(&config).unwrap(), LogBase::E);
    let pass = a == b && !a.is_empty();
    report(
        12,
        "reproducibility",
        pass,
        &format!("two sweep runs, {} bytes each, byte-identical = {}", a.len(), a == b),
    );
    assert!(pass);
}
