use std::sync::Arc;

use hecke_rpf_core::mellin::{
    functional_equation_check, r_closed, remainder_expr, strip_grid, verify_second_relation,
};
use hecke_rpf_core::{enumerate_simple_cycle, LambdaRing, QuadraticForm, RpfSpec, RpfTerm, C64};

fn spec(p: u32, k: u32, seed: [&[i64]; 3], c0: f64, nu: f64, eta: f64) -> RpfSpec {
    let ring: Arc<LambdaRing> = LambdaRing::new(p).unwrap();
    let form = QuadraticForm::from_i64(&ring, seed[0], seed[1], seed[2]).unwrap();
    let cycle = enumerate_simple_cycle(&form, 4 * p as usize).unwrap();
    RpfSpec::new(&ring, k, vec![RpfTerm { cycle, d: 1.0 }], c0, nu, eta).unwrap()
}

// Seed form to functional equation, with no shortcuts between stages.
#[test]
fn cycle_to_functional_equation() {
    for (p, k, seed) in [
        (3, 1, [&[1][..], &[1], &[-1]]),
        (5, 3, [&[2, 5][..], &[-7, -11], &[-2, -5]]),
    ] {
        let eta = if k == 1 { 0.25 } else { 0.0 };
        let s = spec(p, k, seed, 1.0, 0.5, eta);
        let grid = strip_grid(k, 6);
        let fe = functional_equation_check(None, &s, &grid, 1e-8).unwrap();
        assert!(fe.pass, "p={p} k={k}: {}", fe.max_residual);
        let rel = verify_second_relation(&s, &grid, 1e-8).unwrap();
        assert!(rel.pass && rel.symbolic_empty, "{:?}", rel.trace);
        let r = remainder_expr(&s).unwrap();
        let z = C64::new(0.7, 0.3);
        let direct = r_closed(z, &s).unwrap();
        assert!((r.eval(z).unwrap() - direct).norm() < 1e-9 * (1.0 + direct.norm()));
    }
}
