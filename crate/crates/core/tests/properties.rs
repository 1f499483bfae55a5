use bft_core::bounds::{
    cnot_failure_bound, effective_noise_n, flagged_bounds, injection_bound, CodeParams, ExternalConstants,
};
use bft_core::gadgets::{parse_ops, schedule_stats, to_text, GadgetSpec};
use bft_core::noise::{FaultSampler, NoiseParams};
use bft_core::pauli::{cphase_conjugate, PauliOp, TwoQubitPauli};
use bft_core::sim::{
    estimate_failure, judge_failure, propagate, wilson_interval, CompiledGadget, InputErrors, CONFIDENCE,
};
use proptest::prelude::*;

fn odd(max: usize) -> impl Strategy<Value = usize> {
    (0..=(max - 1) / 2).prop_map(|k| 2 * k + 1)
}

fn gadget() -> impl Strategy<Value = GadgetSpec> {
    prop_oneof![
        (odd(7), odd(7)).prop_map(|(n, r)| GadgetSpec::MeasZl { n, r }),
        (odd(7), odd(7)).prop_map(|(n, r)| GadgetSpec::ErrorCorrect { n, r }),
        (odd(5), odd(5), odd(5)).prop_map(|(n, r1, r2)| GadgetSpec::Cnot { n, r1, r2, r: r1.max(r2) }),
        (odd(7), odd(7)).prop_map(|(n, t)| GadgetSpec::BellPrep { n, t }),
        (odd(5), odd(5), odd(5)).prop_map(|(n, r1, r2)| GadgetSpec::BellMeas { n, r1, r2 }),
    ]
}

fn pauli2() -> impl Strategy<Value = TwoQubitPauli> {
    (0usize..16).prop_map(TwoQubitPauli::from_index)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn cphase_is_an_involution(p in pauli2()) {
        prop_assert_eq!(cphase_conjugate(cphase_conjugate(p)), p);
    }

    #[test]
    fn cphase_fixes_dephasing_and_composes(a in pauli2(), b in pauli2()) {
        if a.is_dephasing() {
            prop_assert_eq!(cphase_conjugate(a), a);
        }
        prop_assert_eq!(cphase_conjugate(a.compose(b)), cphase_conjugate(a).compose(cphase_conjugate(b)));
    }

    #[test]
    fn cnot_cphase_count(n in odd(21), r1 in odd(21), r2 in odd(21)) {
        let c = GadgetSpec::Cnot { n, r1, r2, r: r1.max(r2) }.build().unwrap();
        prop_assert_eq!(schedule_stats(&c).cphase_count, (2 * r1 + 3 * r2) * n);
    }

    #[test]
    fn uniform_cnot_is_pipelined(n in odd(15)) {
        let s = schedule_stats(&GadgetSpec::Cnot { n, r1: n, r2: n, r: n }.build().unwrap());
        prop_assert_eq!(s.idle_data_steps, 0);
        prop_assert_eq!(s.output_ready_step.unwrap() + 1, s.input_first_step.unwrap());
    }

    #[test]
    fn text_round_trip(spec in gadget()) {
        let c = spec.build().unwrap();
        prop_assert_eq!(parse_ops(&to_text(&c)).unwrap(), c.ops);
    }

    /// Outcome flips are an XOR of per-fault contributions, so the compiled
    /// table must agree with step-by-step propagation on any fault path.
    #[test]
    fn propagation_is_linear(spec in gadget(), seed in any::<u64>(), trial in 0u64..1000) {
        let c = spec.build().unwrap();
        let cg = CompiledGadget::new(&c).unwrap();
        let sampler = FaultSampler::new(&c, NoiseParams::new(0.05, 0.02).unwrap()).unwrap();
        let fp = sampler.sample(seed, trial);
        let t = propagate(&c, &fp, &[]).unwrap();
        let sig = cg.path_signature(&fp, &[]);
        for (i, flip) in t.outcome_flips.iter().enumerate() {
            prop_assert_eq!((sig[i / 64] >> (i % 64)) & 1 == 1, *flip);
        }
        prop_assert_eq!(cg.evaluate(&sig).failed, judge_failure(&t));
    }

    #[test]
    fn bounds_monotone(n in odd(15), r1 in odd(15), r2 in odd(15), e in 1e-5f64..5e-3, de in 0.0f64..1e-3,
                       bias in 1.0f64..1e5, dbias in 0.0f64..1.0) {
        let cp = CodeParams::new(n, r1, r2, r1.max(r2)).unwrap();
        let a = cnot_failure_bound(&cp, &NoiseParams::from_bias(e, bias).unwrap()).unwrap();
        let b = cnot_failure_bound(&cp, &NoiseParams::from_bias(e + de, bias).unwrap()).unwrap();
        let c = cnot_failure_bound(&cp, &NoiseParams::new(e, e / bias * (1.0 - dbias)).unwrap()).unwrap();
        prop_assert!(b.eps_total >= a.eps_total && b.eps_d >= a.eps_d && b.eps_nd >= a.eps_nd);
        prop_assert!(c.eps_total <= a.eps_total);
        for x in [a.eps_nd, a.eps_mzz, a.eps_mzzz, a.eps_mx1, a.eps_mx2] {
            prop_assert!(x >= 0.0);
        }
        let ext = ExternalConstants::default();
        let ia = injection_bound(&cp, &NoiseParams::from_bias(e, bias).unwrap(), &ext).unwrap();
        let ib = injection_bound(&cp, &NoiseParams::from_bias(e + de, bias).unwrap(), &ext).unwrap();
        prop_assert!(ib.eps_bm >= ia.eps_bm);
    }

    #[test]
    fn specialization_identity(n in odd(21), e in 0.0f64..1e-2, bias in 1.0f64..1e6) {
        let p = NoiseParams::from_bias(e, bias).unwrap();
        let a = effective_noise_n(n, &p).unwrap();
        let b = cnot_failure_bound(&CodeParams::uniform(n).unwrap(), &p).unwrap().eps_total;
        prop_assert!((a - b).abs() <= 1e-14 * b.max(1e-300));
    }

    #[test]
    fn flag_ordering(n in odd(15), r1 in odd(15).prop_filter("r1 >= 3", |r| *r >= 3), e in 0.0f64..1e-2) {
        let f = flagged_bounds(n, r1, 5, &NoiseParams::from_bias(e, 1e4).unwrap());
        // flag mass can swamp acceptance at the large-n corner
        let Ok(f) = f else { return Ok(()) };
        prop_assert!(f.eps_noflag <= f.eps_flag);
    }

    #[test]
    fn wilson_brackets(k in 0u64..1000, extra in 0u64..100_000) {
        let n = k + extra.max(1);
        let (lo, hi) = wilson_interval(k, n, CONFIDENCE);
        let phat = k as f64 / n as f64;
        prop_assert!(0.0 <= lo && lo <= phat && phat <= hi && hi <= 1.0);
    }
}

#[test]
fn monte_carlo_independent_of_thread_count() {
    let spec = GadgetSpec::Cnot { n: 3, r1: 3, r2: 3, r: 3 };
    let p = NoiseParams::from_bias(1e-2, 1e2).unwrap();
    let run = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| estimate_failure(&spec, &p, 50_000, 99, &InputErrors::PrecedingCnot { r: 3 }).unwrap())
    };
    assert_eq!(run(1), run(4));
}

#[test]
fn dephasing_only_paulis_are_diagonal() {
    for p in TwoQubitPauli::all() {
        assert_eq!(p.is_dephasing(), !p.0.x && !p.1.x);
    }
    assert!(PauliOp::Z.is_dephasing() && !PauliOp::Y.is_dephasing());
}
