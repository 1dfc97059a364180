use cvstab::oracles::FockState;
use cvstab::rsb::*;
use cvstab::Error;
use num_complex::Complex64;
use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn r(n: i64, d: i64) -> Ratio<i64> {
    Ratio::new(n, d)
}

fn codeword(d: u64, m: u64, j: u64, alpha: f64, n_max: usize) -> Vec<Complex64> {
    rsb_codeword_fock(&RsbCodewordSpec { d, m, j, primitive: Primitive::Coherent(alpha) }, n_max).unwrap()
}

fn overlap(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

#[test]
fn even_cat_codeword() {
    let alpha: f64 = 2.0;
    let n_max = default_n_max(alpha);
    let v = codeword(2, 1, 0, alpha, n_max);
    // (|alpha> + |-alpha>) normalized, built from the coherent amplitudes directly
    let c = coherent_amplitudes(alpha, n_max).unwrap();
    let mut cat: Vec<Complex64> = c
        .iter()
        .enumerate()
        .map(|(n, x)| Complex64::new(x * (1.0 + (-1f64).powi(n as i32)), 0.0))
        .collect();
    let norm = cat.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    cat.iter_mut().for_each(|a| *a /= norm);
    assert!((overlap(&v, &cat).norm() - 1.0).abs() < 1e-10);
    assert!(v.iter().skip(1).step_by(2).all(|a| a.norm() == 0.0));
}

#[test]
fn truncation_is_reported() {
    assert!(matches!(coherent_amplitudes(4.0, 20), Err(Error::Truncation(_))));
    assert!(coherent_amplitudes(4.0, default_n_max(4.0)).is_ok());
}

#[test]
fn method_one_identity() {
    let alpha = 4.0;
    let n_max = default_n_max(alpha);
    for j in 0..2 {
        let c = method1_identity_check(2, 4, 2, j, Primitive::Coherent(alpha), n_max).unwrap();
        assert!(c.fidelity >= 1.0 - 1e-6, "j={} {:?}", j, c);
        assert!(c.fidelity_individual <= c.fidelity);
    }
    let c = method1_identity_check(2, 4, 2, 1, Primitive::Coherent(2.0), default_n_max(2.0)).unwrap();
    assert!(c.fidelity >= 1.0 - 1e-9);
    assert!(1.0 - c.fidelity_individual <= c.defect);
    for (d1, n, j) in [(2, 3, 1), (3, 2, 2)] {
        let c = method1_identity_check(d1, n, 1, j, Primitive::Coherent(3.0), default_n_max(3.0)).unwrap();
        assert!((c.fidelity - 1.0).abs() < 1e-12 && (c.fidelity_individual - 1.0).abs() < 1e-12);
    }
    assert!(method1_identity_check(2, 3, 2, 0, Primitive::Coherent(2.0), 40).is_err());
}

#[test]
fn method_two_input_identity() {
    let alpha = 3.0;
    let n_max = default_n_max(alpha);
    let zero = codeword(2, 1, 0, alpha, n_max);
    let plus = xbasis_codeword(5, 2, Primitive::Coherent(alpha)).fock(n_max).unwrap();
    assert!((overlap(&zero, &plus).norm_sqr() - 1.0).abs() < 1e-8);
    // qubit |+> codeword equals (|0> + |1>)/sqrt 2 with M = 2N
    let n = 2;
    let plus = xbasis_codeword(2, n, Primitive::Coherent(alpha)).fock(n_max).unwrap();
    let sum: Vec<Complex64> =
        codeword(2, n, 0, alpha, n_max).iter().zip(codeword(2, n, 1, alpha, n_max)).map(|(a, b)| a + b).collect();
    let f = overlap(&plus, &sum).norm_sqr() / overlap(&sum, &sum).re;
    let eps = orthogonality_defect(Primitive::Coherent(alpha), 2, n, n_max).unwrap();
    assert!(1.0 - f <= 10.0 * eps, "{} {}", f, eps);
}

#[test]
fn eigenvalue_relations() {
    let alpha = 5.0;
    let n_max = default_n_max(alpha);
    for (d, m) in [(2u64, 1u64), (3, 1), (2, 2), (5, 1)] {
        let beta = (d % 2) as i64;
        let eps = orthogonality_defect(Primitive::Coherent(alpha), d, m, n_max).unwrap();
        for j in 0..d {
            let v = codeword(d, m, j, alpha, n_max);
            let mut z = FockState::single(v.clone());
            z.rotation(0, r(1, (d * m) as i64)).unwrap();
            let want = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * j as f64 / d as f64);
            assert!((overlap(&v, &z.amplitudes) - want).norm() <= 10.0 * eps + 1e-12);
            let mut s = FockState::single(v.clone());
            let (dm, mm) = ((d * m) as i64, m as i64);
            s.kerr(0, r(1, 2 * dm * mm), r(-beta, 2 * dm)).unwrap();
            let jj = j as f64;
            let want = Complex64::from_polar(1.0, std::f64::consts::PI * (jj * jj - beta as f64 * jj) / d as f64);
            assert!((overlap(&v, &s.amplitudes) - want).norm() <= 10.0 * eps + 1e-12);
        }
    }
    // qubit self-Kerr on |1_2; N=1, alpha=3> gives phase i
    let v = codeword(2, 1, 1, 3.0, default_n_max(3.0));
    let mut s = FockState::single(v.clone());
    s.kerr(0, r(1, 4), r(0, 1)).unwrap();
    assert!((overlap(&v, &s.amplitudes) - Complex64::i()).norm() < 1e-10);
}

#[test]
fn full_turn_is_identity() {
    let v = codeword(3, 2, 1, 2.5, default_n_max(2.5));
    let mut s = FockState::single(v.clone());
    s.rotation(0, r(1, 1)).unwrap();
    assert_eq!(s.amplitudes, v);
}

#[test]
fn cross_kerr_logical_action() {
    let alpha = 4.0;
    let n_max = default_n_max(alpha);
    for d in [2u64, 3] {
        let (n1, n2) = (1u64, 2u64);
        for j in 0..d {
            for l in 0..d {
                let a = codeword(d, n1, j, alpha, n_max);
                let b = codeword(d, n2, l, alpha, n_max);
                let s0 = FockState::product(&a, &b).unwrap();
                let mut s = s0.clone();
                s.cross_kerr(r(1, (d * n1 * n2) as i64)).unwrap();
                let want = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * (j * l) as f64 / d as f64);
                assert!((s0.inner(&s) - want).norm() < 1e-12);
            }
        }
    }
}

fn random_logical(d: u64, rng: &mut ChaCha8Rng) -> Vec<Complex64> {
    let mut c: Vec<Complex64> = (0..d).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
    let n = c.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    c.iter_mut().for_each(|x| *x /= n);
    c
}

fn encode(coeffs: &[Complex64], m: u64, alpha: f64, n_max: usize) -> Vec<Complex64> {
    let d = coeffs.len() as u64;
    let mut v = vec![Complex64::new(0.0, 0.0); n_max + 1];
    for (j, c) in coeffs.iter().enumerate() {
        for (acc, x) in v.iter_mut().zip(codeword(d, m, j as u64, alpha, n_max)) {
            *acc += c * x;
        }
    }
    v
}

#[test]
fn teleported_fourier_gadget() {
    let alpha = 4.0;
    let n_max = default_n_max(alpha);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for d in [2u64, 3, 5] {
        let m = 1;
        let eps = orthogonality_defect(Primitive::Coherent(alpha), d, m, n_max).unwrap();
        let ancilla = xbasis_codeword(d, m, Primitive::Coherent(alpha)).fock(n_max).unwrap();
        for _ in 0..5 {
            let c = random_logical(d, &mut rng);
            let input = FockState::single(encode(&c, m, alpha, n_max));
            let (out, p) = input.fourier_gadget(&ancilla, d, m).unwrap();
            let dft: Vec<Complex64> = (0..d)
                .map(|l| {
                    (0..d)
                        .map(|j| c[j as usize] * Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * (j * l) as f64 / d as f64))
                        .sum::<Complex64>()
                        / (d as f64).sqrt()
                })
                .collect();
            let want = FockState::single(encode(&dft, m, alpha, n_max));
            let f = out.fidelity(&want);
            assert!(1.0 - f <= 1e-4 && 1.0 - f <= 10.0 * eps, "d={} infidelity {:e} eps {:e}", d, 1.0 - f, eps);
            assert!((p - 1.0 / d as f64).abs() <= 1e-4, "d={} p={}", d, p);
            let mut inplace = input.clone();
            let q = inplace.apply_fourier_gadget(0, &ancilla, d, m).unwrap();
            assert!((q - p).abs() < 1e-12 && (inplace.fidelity(&out) - 1.0).abs() < 1e-12);
        }
    }
}

#[test]
fn compile_examples() {
    let plan = RsbEmbeddingPlan { method: Method::One, d1: 2, n: 3, a: 1, d2: 2, m2: 3 };
    let p = compile_gate_rsb(&plan, &RsbGate::new(RsbGateKind::SelfKerr { u: r(1, 36), v: r(0, 1) }, &[0])).unwrap();
    assert_eq!(p.instrs, vec![cvstab::program::Instr::Phase { qudit: 0 }]);
    let plan = RsbEmbeddingPlan { method: Method::Two, d1: 2, n: 1, a: 1, d2: 5, m2: 2 };
    let p = compile_gate_rsb(&plan, &RsbGate::new(RsbGateKind::TeleportedFourier, &[0])).unwrap();
    assert!(p.instrs.contains(&cvstab::program::Instr::Postselect { label: "tfourier 0".into(), numer: 1, denom: 5 }));
    let p = compile_gate_rsb(&plan, &RsbGate::new(RsbGateKind::Rotation(r(1, 5)), &[0])).unwrap();
    assert_eq!(p.instrs, vec![cvstab::program::Instr::Pauli { qudit: 0, x: 0, z: 2 }]);
    assert!(matches!(
        compile_gate_rsb(&plan, &RsbGate::new(RsbGateKind::Rotation(r(1, 7)), &[0])),
        Err(Error::NotAdmitted(_))
    ));
    // method one Kerr and cross-Kerr from the logical code
    let g = [
        RsbGate::new(RsbGateKind::SelfKerr { u: r(1, 2 * 2 * 16), v: r(0, 1) }, &[0]),
        RsbGate::new(RsbGateKind::CrossKerr(r(1, 2 * 16)), &[0, 1]),
        RsbGate::new(RsbGateKind::Rotation(r(1, 16)), &[1]),
    ];
    let plan = resolve_embedding_rsb(2, 4, &g, &[0, 1], None).unwrap();
    assert_eq!((plan.method, plan.a, plan.d2, plan.m2), (Method::One, 2, 8, 2));
    let quartic = RsbGate::new(RsbGateKind::NonClifford { label: "tgate".into(), reason: "quartic Kerr".into() }, &[0]);
    assert!(matches!(resolve_embedding_rsb(2, 1, &[quartic], &[0], None), Err(Error::NonCliffordGate { .. })));
    // gates that only method one admits combined with gates that only method two admits
    let mixed = [
        RsbGate::new(RsbGateKind::Rotation(r(1, 16)), &[0]),
        RsbGate::new(RsbGateKind::Rotation(r(1, 24)), &[0]),
    ];
    assert!(resolve_embedding_rsb(2, 4, &mixed[..1], &[0], Some(Method::One)).is_ok());
    assert!(resolve_embedding_rsb(2, 4, &mixed[1..], &[0], Some(Method::One)).is_err());
    assert!(resolve_embedding_rsb(2, 4, &mixed[1..], &[0], Some(Method::Two)).is_ok());
}

fn tableau_distribution(plan: &RsbEmbeddingPlan, gates: &[RsbGate], inputs: &[u64]) -> Vec<f64> {
    let prog = compile_circuit_rsb(plan, gates).unwrap();
    let branches = prog.enumerate(plan.initial_state(inputs).unwrap(), 1 << 16).unwrap();
    let d = plan.d2 as usize;
    let k = branches[0].outcomes.len();
    let mut dist = vec![0.0; d.pow(k as u32)];
    for b in branches {
        let idx = b.outcomes.iter().fold(0, |acc, &o| acc * d + o as usize);
        dist[idx] += *b.probability.numer() as f64 / *b.probability.denom() as f64;
    }
    dist
}

#[test]
fn compiled_circuits_match_fock_oracle() {
    let alpha = 6.0;
    let prim = Primitive::Coherent(alpha);
    let cases: Vec<(u64, u64, Vec<u64>, Vec<RsbGate>)> = vec![
        (2, 1, vec![0], vec![
            RsbGate::new(RsbGateKind::Rotation(r(1, 10)), &[0]),
            RsbGate::new(RsbGateKind::TeleportedFourier, &[0]),
            RsbGate::new(RsbGateKind::PhaseMeasure, &[0]),
        ]),
        (2, 1, vec![1], vec![
            RsbGate::new(RsbGateKind::TeleportedFourier, &[0]),
            RsbGate::new(RsbGateKind::SelfKerr { u: r(1, 4), v: r(0, 1) }, &[0]),
            RsbGate::new(RsbGateKind::TeleportedFourier, &[0]),
            RsbGate::new(RsbGateKind::PhaseMeasure, &[0]),
        ]),
        (2, 2, vec![0, 1], vec![
            RsbGate::new(RsbGateKind::TeleportedFourier, &[0]),
            RsbGate::new(RsbGateKind::CrossKerr(r(1, 8)), &[0, 1]),
            RsbGate::new(RsbGateKind::TeleportedFourier, &[1]),
            RsbGate::new(RsbGateKind::PhaseMeasure, &[0]),
            RsbGate::new(RsbGateKind::PhaseMeasure, &[1]),
        ]),
        (3, 1, vec![0], vec![
            RsbGate::new(RsbGateKind::Rotation(r(1, 21)), &[0]),
            RsbGate::new(RsbGateKind::TeleportedFourier, &[0]),
            RsbGate::new(RsbGateKind::PhaseMeasure, &[0]),
        ]),
    ];
    for (d1, n, inputs, gates) in cases {
        let plan = resolve_embedding_rsb(d1, n, &gates, &inputs, None).unwrap();
        let want = tableau_distribution(&plan, &gates, &inputs);
        let run = fock_simulate(&plan, &gates, &inputs, prim, None).unwrap();
        let tol = (10.0 * run.defect).max(1e-6);
        let dev = want.iter().zip(&run.distribution).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(dev <= tol, "{:?}: deviation {:e} > {:e}", plan, dev, tol);
        for p in run.gadget_probabilities {
            assert!((p - 1.0 / plan.d2 as f64).abs() <= tol);
        }
    }
}
