use lrtrace::asymptotics::{d_n_limit, dq_partial_limits, PartialLimit};
use lrtrace::edge_weights::{default_theta, lift_logarithms, solve_periodic, Sign};
use lrtrace::skein_trace::{
    dq_direct, dq_rearranged, qdl_discrete_log, sigma_sum_scaled, trace_double_sum, trace_params,
    QdlParams,
};
use lrtrace::special_functions::{big_qdl, dilog, lobachevsky, strip_bounds, Hbar};
use num_complex::Complex64;
use proptest::prelude::*;
use std::f64::consts::PI;

fn i() -> Complex64 {
    Complex64::new(0.0, 1.0)
}

fn b0_strategy() -> impl Strategy<Value = Complex64> {
    (0.3f64..3.0, -PI..PI)
        .prop_map(|(r, phi)| Complex64::from_polar(r, phi))
        .prop_filter("away from -1", |b| (b + 1.0).norm() > 0.1)
}

fn sign_strategy() -> impl Strategy<Value = Sign> {
    prop_oneof![Just(Sign::Plus), Just(Sign::Minus)]
}

fn u_strategy() -> impl Strategy<Value = Complex64> {
    (-1.5f64..1.5, -2.0f64..2.0).prop_map(|(re, im)| Complex64::new(re, im))
}

fn odd_level(max: u64) -> impl Strategy<Value = u64> {
    (1..=max / 2).prop_map(|k| 2 * k + 1)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn lobachevsky_is_odd_and_periodic(theta in -10.0f64..10.0) {
        let l = lobachevsky(theta);
        prop_assert!((l + lobachevsky(-theta)).abs() < 1e-13);
        prop_assert!((l - lobachevsky(theta + PI)).abs() < 1e-12);
    }

    #[test]
    fn dilog_on_unit_circle(theta in 0.01f64..(PI - 0.01)) {
        let z = Complex64::from_polar(1.0, 2.0 * theta);
        let expected = Complex64::new(PI * PI / 6.0 - theta * (PI - theta), 2.0 * lobachevsky(theta));
        prop_assert!((dilog(z).unwrap() - expected).norm() < 1e-10);
    }

    #[test]
    fn dilog_reflection(re in -3.0f64..3.0, im in 0.05f64..3.0) {
        let z = Complex64::new(re, im);
        let lhs = dilog(z).unwrap() + dilog(1.0 - z).unwrap();
        let rhs = PI * PI / 6.0 - z.ln() * (1.0 - z).ln();
        prop_assert!((lhs - rhs).norm() < 1e-10 * rhs.norm().max(1.0));
    }

    #[test]
    fn periodic_system_closes(b0 in b0_strategy(), sign in sign_strategy()) {
        if let Ok(sys) = solve_periodic(b0, sign) {
            prop_assert!(sys.residual().unwrap() < 1e-8);
        }
    }

    #[test]
    fn lift_invariants(
        b0 in b0_strategy(),
        sign in sign_strategy(),
        ka in -3i64..=3,
        kb in -3i64..=3,
        kc in -1i64..=1,
    ) {
        let Ok(sys) = solve_periodic(b0, sign) else { return Ok(()) };
        let Ok(lift) = lift_logarithms(&sys, default_theta(&sys.triples[0]), [ka, kb, kc]) else {
            return Ok(());
        };
        prop_assert!(lift.exp_residual(&sys) < 1e-8);
        prop_assert_eq!(lift.l_hat + lift.m_hat + lift.n_hat, 0);
        prop_assert!((lift.a[0] + lift.b[0] + lift.c[0] - lift.theta_v).norm() < 1e-9);
    }

    #[test]
    fn discrete_qdl_is_periodic(u in u_strategy(), n in odd_level(61), j in 0i64..200) {
        let p = QdlParams::from_u(u, n).unwrap();
        let a = qdl_discrete_log(&p, j).exp();
        let b = qdl_discrete_log(&p, j + n as i64).exp();
        prop_assert!((a - b).norm() < 1e-9 * a.norm().max(1.0));
    }

    #[test]
    fn dq_forms_agree(re in -1.0f64..1.0, im in -3.0f64..3.0, n in odd_level(401)) {
        let a = Complex64::new(re, im);
        let p = QdlParams::from_u(Complex64::new(0.0, 2.0 * PI) - a, n).unwrap();
        let direct = dq_direct(&p).unwrap();
        let pieces = dq_rearranged(a, n).unwrap();
        prop_assert!((direct - pieces).abs() < 1e-9 * direct.abs().max(1.0));
    }

    #[test]
    fn partial_limits_add_up_and_converge(re in -1.0f64..1.0, im in -3.0f64..3.0) {
        let a = Complex64::new(re, im);
        for class in [1u64, 3] {
            let groups = PartialLimit::ALL.iter().filter(|w| w.class() == class);
            let total: f64 = groups.clone().map(|w| w.limit(a).unwrap()).sum();
            prop_assert!((total - d_n_limit(a, class).unwrap().ln()).abs() < 1e-12);
            for w in groups {
                let (coarse, limit) = dq_partial_limits(a, *w, 25).unwrap();
                let (fine, _) = dq_partial_limits(a, *w, 400).unwrap();
                prop_assert!((fine - limit).abs() <= (coarse - limit).abs() + 1e-12);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn double_sum_factorizes(b0 in b0_strategy(), sign in sign_strategy(), n in odd_level(13)) {
        let Ok(sys) = solve_periodic(b0, sign) else { return Ok(()) };
        let Ok(lift) = lift_logarithms(&sys, default_theta(&sys.triples[0]), [0, 0, 0]) else {
            return Ok(());
        };
        let [p1, p2] = trace_params(&lift, n).unwrap();
        let product = sigma_sum_scaled(&p1, lift.l_hat).mul(&sigma_sum_scaled(&p2, lift.m_hat));
        let double = trace_double_sum(&lift, n).unwrap();
        let diff = (double.log_scale - product.log_scale).exp() * double.mantissa - product.mantissa;
        prop_assert!(diff.norm() < 1e-8 * product.mantissa.norm());
    }

    #[test]
    fn quantum_dilog_functional_equations(
        t in 0.05f64..0.95,
        im in -0.2f64..0.2,
        h in prop_oneof![Just(0.5f64), Just(0.1), Just(0.02)],
    ) {
        let hbar = Hbar::new(h).unwrap();
        let (lo, hi) = strip_bounds(hbar);
        let z = Complex64::new(lo + t * (hi - lo), im);
        let f = big_qdl(z, hbar).unwrap();
        let f_h = big_qdl(z + PI * h, hbar).unwrap();
        let f_pi = big_qdl(z + PI, hbar).unwrap();
        let lhs_h = f_h * (1.0 - (2.0 * i() * z + i() * PI * h).exp());
        prop_assert!((lhs_h - f).norm() < 1e-8 * f.norm().max(1e-300), "hbar step at {}", z);
        let lhs_pi = f_pi * (1.0 + (2.0 * i() * z / h).exp());
        prop_assert!((lhs_pi - f).norm() < 1e-8 * f.norm().max(1e-300), "pi step at {}", z);
    }
}
