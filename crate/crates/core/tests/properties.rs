use proptest::prelude::*;

use relay_secrecy::closed_form::{esr, sop, Method};
use relay_secrecy::fading_model::{CsiMode, LinkRates, Scheme, SystemParams};
use relay_secrecy::Params;

fn rate() -> impl Strategy<Value = f64> {
    (0.05f64.ln()..20f64.ln()).prop_map(f64::exp)
}

prop_compose! {
    fn params()(a in rate(), b in rate(), s in rate(), q in rate(), r in rate(), g in 0.0..6.0, rs in 0.1..2.0) -> Params {
        SystemParams::new(LinkRates { alpha_se: a, alpha_re: b, beta_sd: s, beta_sr: q, beta_rd: r }, g, rs).unwrap()
    }
}

fn sop_of(p: &Params, s: Scheme, c: CsiMode) -> f64 {
    sop(p, s, c).unwrap().value
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn values_are_in_range(p in params()) {
        for s in Scheme::ALL {
            for c in CsiMode::ALL {
                let v = sop_of(&p, s, c);
                prop_assert!((0.0..=1.0).contains(&v));
                prop_assert!(esr(&p, s, c).unwrap().value.is_finite());
            }
            prop_assert!(esr(&p, s, CsiMode::Csi).unwrap().value >= 0.0);
        }
    }

    #[test]
    fn nocsi_combiner_order(p in params()) {
        let v = |s| sop_of(&p, s, CsiMode::NoCsi);
        let slack = 1e-12;
        prop_assert!(v(Scheme::MrcSc) <= v(Scheme::MrcMrc) + slack);
        prop_assert!(v(Scheme::MrcMrc) <= v(Scheme::ScMrc) + slack);
        prop_assert!(v(Scheme::MrcSc) <= v(Scheme::ScSc) + slack);
        prop_assert!(v(Scheme::ScSc) <= v(Scheme::ScMrc) + slack);
    }

    #[test]
    fn csi_never_hurts(p in params()) {
        for s in Scheme::ALL {
            prop_assert!(sop_of(&p, s, CsiMode::Csi) <= sop_of(&p, s, CsiMode::NoCsi) + 1e-12);
            let no = esr(&p, s, CsiMode::NoCsi).unwrap().value;
            prop_assert!(esr(&p, s, CsiMode::Csi).unwrap().value + 1e-12 >= no.max(0.0));
        }
    }

    #[test]
    fn sop_grows_with_target_rate(p in params(), extra in 0.01..1.0) {
        let higher = p.with_rate_rs(p.rate_rs() + extra).unwrap();
        for s in Scheme::ALL {
            for c in CsiMode::ALL {
                prop_assert!(sop_of(&p, s, c) <= sop_of(&higher, s, c) + 1e-12);
            }
        }
    }

    #[test]
    fn nocsi_sop_falls_with_direct_link_snr(p in params(), shrink in 0.1..0.99) {
        let better = p.with_rates(LinkRates { beta_sd: p.beta_sd() * shrink, ..p.rates() }).unwrap();
        for s in Scheme::ALL {
            prop_assert!(sop_of(&better, s, CsiMode::NoCsi) <= sop_of(&p, s, CsiMode::NoCsi) + 1e-12);
        }
    }

    #[test]
    fn continuous_across_degeneracy(p in params()) {
        let exact = p.with_rates(LinkRates { beta_rd: p.beta_sd(), ..p.rates() }).unwrap();
        let near = p.with_rates(LinkRates { beta_rd: p.beta_sd() * (1.0 + 1e-6), ..p.rates() }).unwrap();
        for s in [Scheme::MrcSc, Scheme::MrcMrc] {
            for c in CsiMode::ALL {
                let at = sop(&exact, s, c).unwrap();
                prop_assert_eq!(at.method, Method::LimitForm);
                prop_assert!((at.value - sop_of(&near, s, c)).abs() <= 1e-5);
            }
        }
    }

    #[test]
    fn zero_threshold_keeps_only_relay_on_term(p in params()) {
        let zero = p.with_gamma_th(0.0).unwrap();
        let other = zero.with_rates(LinkRates { beta_sr: p.beta_sr() * 3.0, ..p.rates() }).unwrap();
        for s in Scheme::ALL {
            for c in CsiMode::ALL {
                prop_assert_eq!(sop_of(&zero, s, c), sop_of(&other, s, c));
            }
        }
    }
}
