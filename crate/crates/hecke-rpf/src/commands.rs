//! The `group`, `cycle` and `verify` commands.
//!
//! Checks scale the base tolerance `τ` of the [`RunConfig`]:
//!
//! | check | tolerance |
//! |---|---|
//! | `rpf1`, `rpf2` | `τ`, or `100τ` for `k >= 3` in binary64 |
//! | `r1` closed vs quadrature (relative) | `10τ` |
//! | `r1` symmetry, `r2`, `fe`, `fe split` | `τ` |
//! | `lemma1` (relative) | `100τ` |
//! | `fe` Dirichlet side (relative) | `100τ` |
//! | `invmellin` | `10⁴τ` |

use std::f64::consts::PI;

use hecke_rpf_core::hecke_group::Endpoint;
use hecke_rpf_core::mellin::{
    atom_closed, atom_quadrature, cusp_functional_equation_check, functional_equation_check,
    inverse_mellin_check, phi_eval, phi_partial, r_closed, r_quadrature, remainder_expr,
    verify_second_relation, vertical_profile,
};
use hecke_rpf_core::quadratic_forms::default_max_depth;
use hecke_rpf_core::rpf::{verify_relation1, verify_relation2, Precision, RelationReport};
use hecke_rpf_core::{
    enumerate_simple_cycle, GroupElem, IntervalDecomposition, LambdaRing, RpfSpec, C64,
};
use serde_json::{json, Value};

use crate::input::{build_form, CoeffInput, FormSpec};
use crate::report::num;
use crate::{Check, CliError, Report, Row, RunConfig};

/// Split point of the cusp-form functional-equation check.
const CUSP_SPLIT: f64 = 1.25;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Which {
    Rpf1,
    Rpf2,
    R1,
    R2,
    Lemma1,
    Fe,
    Invmellin,
    All,
}

impl Which {
    fn includes(self, other: Which) -> bool {
        self == Which::All || self == other
    }
}

fn config_value(cfg: &RunConfig) -> Value {
    serde_json::to_value(cfg).expect("plain struct")
}

/// Exact sign of `x - y` for two finite endpoints.
fn endpoint_order(x: &Endpoint, y: &Endpoint) -> i32 {
    let diff = &(x.num() * y.den()) - &(y.num() * x.den());
    diff.sign() * (x.den() * y.den()).sign()
}

pub fn cmd_group(p: u32, cfg: &RunConfig) -> Result<Report, CliError> {
    let ring = LambdaRing::new(p)?;
    let s = GroupElem::s(&ring);
    let t = GroupElem::t(&ring);
    let u = GroupElem::u(&ring);
    let st = s.compose(&t)?;
    let mut checks = vec![
        Check::boolean("T^2 = I", t.power(2).is_identity(), json!({})),
        Check::boolean(
            "(ST)^p = I",
            st.power(p as i64).is_identity() && st == u,
            json!({ "p": p }),
        ),
    ];
    let dec = IntervalDecomposition::new(&ring);
    let eps = dec.endpoints();
    let finite: Vec<&Endpoint> = eps.iter().copied().filter(|e| !e.is_infinite()).collect();
    let increasing = eps.last().is_some_and(|e| e.is_infinite())
        && finite.len() + 1 == eps.len()
        && finite.windows(2).all(|w| endpoint_order(w[1], w[0]) > 0);
    let values: Vec<Value> = eps.iter().map(|e| num(e.to_f64())).collect();
    checks.push(Check::boolean(
        "interval endpoints increase",
        increasing,
        json!({ "endpoints": values }),
    ));
    // U maps the left end of I_j to the left end of I_{j-1}, and that of I_2 to ∞.
    let mut shift = true;
    for j in 2..=p {
        let l = dec.left(j).expect("finite left end");
        let (x, y) = u.apply_projective(l.num(), l.den());
        shift &= if j == 2 {
            y.is_zero()
        } else {
            let target = dec.left(j - 1).expect("finite left end");
            (&(&x * target.den()) - &(&y * target.num())).is_zero()
        };
    }
    checks.push(Check::boolean("U shifts the intervals", shift, json!({})));
    let mut config = config_value(cfg);
    config["p"] = json!(p);
    config["lambda"] = num(ring.lambda_f64());
    config["minimal_polynomial"] = json!(ring.minimal_polynomial());
    Ok(Report::new("group", config, checks))
}

pub fn cmd_cycle(p: u32, form: &FormSpec, cfg: &RunConfig) -> Result<Report, CliError> {
    let ring = LambdaRing::new(p)?;
    let seed = build_form(&ring, form)?;
    let depth = cfg.max_depth.unwrap_or_else(|| default_max_depth(p));
    let cycle = enumerate_simple_cycle(&seed, depth)?;
    let members: Vec<Value> = cycle
        .members()
        .iter()
        .zip(cycle.indices())
        .map(|(m, j)| {
            let f = m.distinguished_form();
            json!({
                "value": num(m.to_f64()),
                "conjugate": num(m.hecke_conjugate().to_f64()),
                "interval": j,
                "form": [f.a().to_string(), f.b().to_string(), f.c().to_string()],
            })
        })
        .collect();
    let mut checks: Vec<Check> = cycle
        .certificates()
        .iter()
        .map(|c| {
            let details = match &c.witness {
                Some(w) => json!({ "j": c.j, "witness": num(w.to_f64()) }),
                None => json!({ "j": c.j }),
            };
            Check::boolean(&format!("mapping certificate j={}", c.j), c.holds, details)
        })
        .collect();
    let mut seen = vec![false; cycle.members().len()];
    for &s in cycle.successor() {
        seen[s] = true;
    }
    checks.push(Check::boolean(
        "successor is a permutation",
        seen.iter().all(|&b| b),
        json!({ "successor": cycle.successor(), "orbits": cycle.orbit_count() }),
    ));
    let mut config = config_value(cfg);
    config["p"] = json!(p);
    config["members"] = Value::Array(members);
    config["depth_used"] = json!(cycle.depth_used());
    config["forms_visited"] = json!(cycle.forms_visited());
    Ok(Report::new("cycle", config, checks))
}

fn relation_check(name: &str, rep: RelationReport, samples: &[C64]) -> Check {
    let rows = samples
        .iter()
        .zip(&rep.residuals)
        .map(|(z, r)| Row::at(*z, *r))
        .collect();
    let worst = rep.worst_point.map(|z| json!([num(z.re), num(z.im)]));
    let mut c = Check::from_rows(name, rows, rep.tolerance, json!({ "worst_point": worst }));
    c.pass &= rep.pass;
    c
}

fn rel(a: C64, b: C64) -> f64 {
    (a - b).norm() / b.norm().max(f64::MIN_POSITIVE)
}

/// Turns an evaluation error at one grid point into an infinite residual.
fn residual(r: Result<f64, hecke_rpf_core::Error>) -> f64 {
    r.unwrap_or(f64::INFINITY)
}

pub fn cmd_verify(
    spec: &RpfSpec,
    coeffs: Option<&CoeffInput>,
    which: Which,
    cfg: &RunConfig,
) -> Result<Report, CliError> {
    cfg.validate()?;
    let tau = cfg.tolerance;
    let k = spec.k();
    let precision = cfg.precision()?;
    let mut checks = Vec::new();

    if which.includes(Which::Rpf1) || which.includes(Which::Rpf2) {
        let samples = cfg.half_plane_samples();
        let tol = if k >= 3 && precision == Precision::Binary64 {
            100.0 * tau
        } else {
            tau
        };
        if which.includes(Which::Rpf1) {
            let rep = verify_relation1(spec, &samples, tol, precision)?;
            checks.push(relation_check("rpf1", rep, &samples));
        }
        if which.includes(Which::Rpf2) {
            let rep = verify_relation2(spec, &samples, tol, precision)?;
            checks.push(relation_check("rpf2", rep, &samples));
        }
    }

    let grid = cfg.strip_samples(k);
    let two_k = C64::new(spec.two_k() as f64, 0.0);

    if which.includes(Which::R1) {
        let rows = grid
            .iter()
            .map(|&s| {
                Row::at(
                    s,
                    residual(r_closed(s, spec).and_then(|a| Ok(rel(a, r_quadrature(s, spec)?)))),
                )
            })
            .collect();
        checks.push(Check::from_rows(
            "r1 closed vs quadrature",
            rows,
            10.0 * tau,
            json!({}),
        ));
        let rows = grid
            .iter()
            .map(|&s| {
                Row::at(
                    s,
                    residual(
                        r_closed(s, spec).and_then(|a| Ok((r_closed(two_k - s, spec)? - a).norm())),
                    ),
                )
            })
            .collect();
        checks.push(Check::from_rows("r1 R(2k-s) = R(s)", rows, tau, json!({})));
    }

    if which.includes(Which::R2) {
        let rep = verify_second_relation(spec, &grid, tau)?;
        let rows = rep
            .numeric_residuals
            .iter()
            .map(|(s, r)| Row::at(*s, *r))
            .collect();
        let witness: Vec<Value> = rep
            .witness
            .iter()
            .map(|a| json!({ "a": num(a.a.to_f64()), "b": num(a.b.to_f64()), "multiplicity": a.multiplicity }))
            .collect();
        let mut c = Check::from_rows(
            "r2",
            rows,
            tau,
            json!({
                "atoms_before_merge": rep.atoms_before_merge,
                "atoms_after_merge": rep.atoms_after_merge,
                "symbolic_empty": rep.symbolic_empty,
                "rho_order_p": rep.rho_order_p,
                "witness": witness,
                "trace": rep.trace,
            }),
        );
        c.pass &= rep.pass;
        checks.push(c);
    }

    if which.includes(Which::Lemma1) {
        let mut pairs: Vec<(f64, f64)> = vec![(-1.0, 2.0), (1.5, -0.7), (2.0, 0.5), (-3.0, -1.0)];
        for atom in remainder_expr(spec)?.atoms() {
            pairs.push((atom.a.to_f64(), atom.b.to_f64()));
        }
        let mut rows = Vec::new();
        for &(a, b) in &pairs {
            for &s in &grid {
                let r =
                    atom_closed(s, a, b, k).and_then(|x| Ok(rel(x, atom_quadrature(s, a, b, k)?)));
                rows.push(Row::at(s, residual(r)));
            }
        }
        let anchor =
            residual(atom_closed(C64::new(1.0, 0.0), 1.0, -1.0, 1).map(|v| (v + PI).norm()));
        let mut c = Check::from_rows(
            "lemma1",
            rows,
            100.0 * tau,
            json!({ "pairs": pairs.len(), "anchor_error": num(anchor) }),
        );
        c.pass &= anchor <= 1e-10;
        checks.push(c);
    }

    if which.includes(Which::Fe) {
        let series = coeffs.map(|c| &c.series);
        let rep = functional_equation_check(series, spec, &grid, tau)?;
        let rows = rep.residuals.iter().map(|(s, r)| Row::at(*s, *r)).collect();
        // Recorded only: boundedness on vertical lines is a smoke test, not a pass criterion.
        let ts = [10.0, 20.0, 40.0, 80.0];
        let profile: Vec<Value> = match vertical_profile(series, spec, k as f64, &ts) {
            Ok(v) => v.into_iter().map(num).collect(),
            Err(e) => vec![Value::from(e.to_string())],
        };
        checks.push(Check::from_rows(
            "fe",
            rows,
            tau,
            json!({ "with_coefficients": series.is_some(), "vertical_profile": { "t": ts, "abs_phi": profile } }),
        ));
        if let Some(ci) = coeffs {
            if spec.terms().is_empty() && spec.c0() == 0.0 {
                let rep = cusp_functional_equation_check(&ci.series, &grid, CUSP_SPLIT, tau)?;
                let rows = rep.residuals.iter().map(|(s, r)| Row::at(*s, *r)).collect();
                checks.push(Check::from_rows(
                    "fe split",
                    rows,
                    tau,
                    json!({ "split": CUSP_SPLIT }),
                ));
            }
            if let Some(g) = ci.growth {
                let s0 = C64::new(g.exponent + 3.0, 0.0);
                let long = ci.dirichlet.as_ref().unwrap_or(&ci.series);
                let r = phi_partial(s0, long, &g, 100.0 * tau)
                    .and_then(|d| Ok(rel(phi_eval(s0, Some(&ci.series), spec)?, d.value)));
                checks.push(Check::from_rows(
                    "fe dirichlet series",
                    vec![Row::at(s0, residual(r))],
                    100.0 * tau,
                    json!({ "terms": long.len() }),
                ));
            }
        }
    }

    if which.includes(Which::Invmellin) {
        let mut rows = Vec::new();
        let mut errs = Vec::new();
        for t_max in [60.0, 120.0, 240.0] {
            let r = inverse_mellin_check(1.0, -1.0, 1, 1.0, 1.0, t_max).map(|r| r.abs_error);
            let e = residual(r);
            errs.push(e);
            rows.push(Row::at(C64::new(1.0, t_max), e));
        }
        // Past the quadrature noise floor further doubling cannot help.
        let monotone = errs.windows(2).all(|w| w[1] <= w[0] + 1e-13);
        let mut c = Check::from_rows(
            "invmellin",
            rows[..1].to_vec(),
            1e4 * tau,
            json!({ "errors": errs, "monotone": monotone }),
        );
        c.rows = rows;
        c.pass &= monotone;
        checks.push(c);
    }

    let mut config = config_value(cfg);
    config["p"] = json!(spec.p());
    config["k"] = json!(k);
    Ok(Report::new("verify", config, checks))
}
