use oxide_fv_cli::config::{parse_config, render, resolve, RawConfig};
use proptest::prelude::*;

fn positive() -> impl Strategy<Value = f64> {
    prop_oneof![0.01f64..10.0, 1e-6f64..1e-2, 1.0f64..1e4]
}

prop_compose! {
    fn raw_config()(
        kin in prop::array::uniform8(positive()),
        c1 in 0.0f64..5.0,
        c2 in -3.0f64..3.0,
        c3 in 0.0f64..5.0,
        tabulated in any::<bool>(),
        samples in prop::collection::vec(0.0f64..4.0, 2..6),
        cells in 1usize..500,
        steps in 1usize..1000,
        dt in 1e-4f64..1.0,
        sample_mode in any::<bool>(),
        newton_tol in 1e-14f64..1e-6,
        iters in 1usize..100,
        hom in 1usize..64,
        extra in 0usize..64,
        floor in 1e-12f64..1e-3,
        phi in prop::option::of(prop::sample::select(vec!["quadratic", "quartic", "excess", "entropy"])),
        levels in 0usize..4,
        ref_gap in 1usize..3,
    ) -> RawConfig {
        let l0 = kin[7];
        let n = samples.len();
        RawConfig {
            a: Some(kin[0]),
            b: Some(kin[1]),
            alpha0: Some(kin[2]),
            beta0: Some(kin[3]),
            alpha1: Some(kin[4]),
            beta1: Some(kin[5]),
            r: Some(kin[6]),
            l0: Some(l0),
            u_init_coeffs: (!tabulated).then_some([c1, c2, c3]),
            u_init_x: tabulated.then(|| (0..n).map(|k| l0 * k as f64 / (n - 1) as f64).collect()),
            u_init_u: tabulated.then(|| samples.clone()),
            cells: Some(cells),
            dt: Some(dt),
            t_final: Some(dt * steps as f64),
            initial_mode: Some(if sample_mode { "sample" } else { "average" }.into()),
            newton_tol: Some(newton_tol),
            max_newton_iters: Some(iters),
            homotopy_steps: Some(hom),
            max_homotopy_steps: Some(hom + extra),
            width_floor: Some(floor),
            out: Some(format!("runs/r{cells}").into()),
            phi: phi.map(String::from),
            levels: Some(levels),
            ref_level: Some(levels + ref_gap),
            ..RawConfig::default()
        }
    }
}

proptest! {
    #[test]
    fn render_then_parse_is_identity(raw in raw_config()) {
        let cfg = resolve(&raw, "").unwrap();
        let text = render(&cfg);
        let back = parse_config(&text).unwrap();
        prop_assert_eq!(&back, &cfg);
        prop_assert_eq!(render(&back), text);
    }

    #[test]
    fn presets_round_trip(k in 0usize..3, cells in 1usize..1000) {
        let name = ["testcase1", "testcase2", "testcase3"][k];
        let cfg = parse_config(&format!(r#"{{"preset": "{name}", "cells": {cells}}}"#)).unwrap();
        prop_assert_eq!(parse_config(&render(&cfg)).unwrap(), cfg);
    }
}
