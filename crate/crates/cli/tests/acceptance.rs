//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use gkz_cli::{cmd_build, cmd_check, cmd_dualize, load_instance, parse_beta, Instance, RunOptions};
use gkz_core::cohomology::{build_ring, CohomRing};
use gkz_core::constants::ConstElem;
use gkz_core::frobenius::{FrobeniusContext, SolutionBasis};
use gkz_core::gkz::{build_cayley_gkz, GkzSystem};
use gkz_core::nef::dual_nef_partition;
use gkz_core::oracles::{binomial_period, independent_volume, sections_from};
use gkz_core::Rat;
use serde_json::{json, Value};

/// The Cayley matrix printed for the eight-planes example, columns in (i, j) order.
const P3_A: [[i64; 16]; 7] = [
    [1, 1, 1, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0],
    [0, 0, 0, 0, 1, 1, 1, 1, 0, 0, 0, 0, 0, 0, 0, 0],
    [0, 0, 0, 0, 0, 0, 0, 0, 1, 1, 1, 1, 0, 0, 0, 0],
    [0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1, 1, 1, 1],
    [0, 1, 0, 0, 0, -1, -1, -1, 0, 0, 1, 0, 0, 0, 1, 0],
    [0, 0, 1, 0, 0, 0, 1, 0, 0, -1, -1, -1, 0, 0, 0, 1],
    [0, 0, 0, 1, 0, 0, 0, 1, 0, 0, 0, 1, 0, -1, -1, -1],
];
const P3_BETA: [&str; 7] = ["-1/2", "-1/2", "-1/2", "-1/2", "0", "0", "0"];

const BUILTINS: [(&str, u64, u32); 2] = [("p1-elliptic", 2, 4), ("p3-8planes", 20, 2)];

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

/// Everything the series criteria need for one instance.
struct Pipeline {
    name: &'static str,
    inst: Instance,
    g: GkzSystem,
    ring: CohomRing,
    order: u32,
    rank: u64,
}

impl Pipeline {
    fn new(name: &'static str, rank: u64, order: u32) -> Result<Self, String> {
        let inst = load_instance(name).map_err(err)?;
        let g = build_cayley_gkz(&inst.npd).map_err(err)?;
        let ring = build_ring(inst.npd.fan()).map_err(err)?;
        Ok(Pipeline {
            name,
            inst,
            g,
            ring,
            order,
            rank,
        })
    }

    fn ctx(&self) -> FrobeniusContext<'_> {
        FrobeniusContext::new(&self.ring, &self.inst.npd, &self.g)
    }

    fn solutions(&self) -> Result<SolutionBasis, String> {
        let ctx = self.ctx();
        let b = ctx.assemble_b(self.order, self.order).map_err(err)?;
        Ok(ctx.extract_solutions(&b))
    }
}

fn c1_matrix() -> Outcome {
    let inst = load_instance("p3-8planes").map_err(err)?;
    let r = cmd_build(&inst, &RunOptions::default()).map_err(err)?;
    let expected: Vec<Vec<i64>> = P3_A.iter().map(|r| r.to_vec()).collect();
    ensure(r.value["matrix"] == json!(expected), || {
        format!("matrix differs: {}", r.value["matrix"])
    })?;
    ensure(r.value["beta"] == json!(P3_BETA), || {
        format!("beta differs: {}", r.value["beta"])
    })?;
    Ok("7x16 matrix and beta equal, identity column permutation".into())
}

fn c2_non_resonance() -> Outcome {
    let mut facets = Vec::new();
    for (name, _, _) in BUILTINS {
        let inst = load_instance(name).map_err(err)?;
        let r = cmd_check(&inst, &RunOptions::default()).map_err(err)?;
        ensure(r.value["facet_form_error"].is_null(), || {
            format!("{name}: {}", r.value["facet_form_error"])
        })?;
        ensure(r.value["non_resonant"] == json!(true), || {
            format!("{name}: resonant")
        })?;
        let pairings = r.value["pairings"].as_array().cloned().unwrap_or_default();
        ensure(!pairings.is_empty(), || format!("{name}: no facets"))?;
        for p in &pairings {
            ensure(p["value"] == json!("-1/2"), || {
                format!("{name}: pairing {p}")
            })?;
        }
        // Independent look at the form (e_j, m): first r entries are one unit vector.
        let npd = &inst.npd;
        let g = build_cayley_gkz(npd).map_err(err)?;
        for f in g.facet_normals_ra().map_err(err)? {
            let head = &f.normal[..npd.r()];
            ensure(
                head.iter().filter(|&&x| x == 1).count() == 1
                    && head.iter().all(|&x| x == 0 || x == 1),
                || format!("{name}: normal {:?}", f.normal),
            )?;
        }
        facets.push(format!("{name}: {} facets", pairings.len()));
    }
    Ok(facets.join(", "))
}

fn c3_rank() -> Outcome {
    let mut out = Vec::new();
    for (name, rank, _) in BUILTINS {
        let p = Pipeline::new(name, rank, 0)?;
        let report = p.g.holonomic_rank(&p.inst.npd).map_err(err)?;
        ensure(report.volume == rank, || {
            format!("{name}: volume {} != {rank}", report.volume)
        })?;
        ensure(report.max_cones as u64 == rank, || {
            format!("{name}: {} cones", report.max_cones)
        })?;
        let poly = p.g.column_polytope().map_err(err)?;
        for seed in 0..3 {
            let v = independent_volume(&poly, seed).map_err(err)?;
            ensure(v == rank.into(), || {
                format!("{name}: independent volume {v} (seed {seed})")
            })?;
        }
        ensure(p.ring.dimension() as u64 == rank, || {
            format!("{name}: cohomology dim {}", p.ring.dimension())
        })?;
        out.push(format!("{name}={rank}"));
    }
    let betti = {
        let p = Pipeline::new("p3-8planes", 20, 0)?;
        (0..=3)
            .map(|k| {
                (0..p.ring.dimension())
                    .filter(|&b| p.ring.degree_of(b) == k)
                    .count()
            })
            .collect::<Vec<_>>()
    };
    ensure(betti == [1, 9, 9, 1], || format!("Betti numbers {betti:?}"))?;
    Ok(format!("{} (Betti 1,9,9,1)", out.join(", ")))
}

fn c4_union_cones() -> Outcome {
    let mut out = Vec::new();
    for (name, rank, _) in BUILTINS {
        let p = Pipeline::new(name, rank, 0)?;
        let u = p.g.verify_union_cones(&p.inst.npd).map_err(err)?;
        let total: u64 = u.piece_volumes.iter().sum();
        let vol =
            p.g.column_polytope()
                .map_err(err)?
                .normalized_volume()
                .map_err(err)?;
        ensure(total == u.total_volume && vol == total.into(), || {
            format!("{name}: {total} vs {vol}")
        })?;
        out.push(format!(
            "{name}: {} pieces sum to {total}",
            u.piece_volumes.len()
        ));
    }
    Ok(out.join(", "))
}

fn c5_oracle(pipes: &[Pipeline], sols: &[SolutionBasis]) -> Outcome {
    let mut out = Vec::new();
    for (p, s) in pipes.iter().zip(sols) {
        let oracle = binomial_period(
            &sections_from(&p.inst.npd, &p.g),
            p.g.num_columns(),
            p.order,
        )
        .map_err(err)?;
        let series = s.power_series();
        ensure(series.len() == oracle.len(), || {
            format!("{}: {} vs {} terms", p.name, series.len(), oracle.len())
        })?;
        for (l, c) in &oracle {
            let got = series.get(l).cloned().unwrap_or_else(ConstElem::zero);
            ensure(got == ConstElem::rational(c.clone()), || {
                format!("{}: at {l:?} got {got}, oracle {c}", p.name)
            })?;
        }
        out.push(format!("{} {} terms", p.name, oracle.len()));
    }
    let p1 = &sols[0].power_series();
    let want = [(0, "1"), (1, "3/4"), (2, "105/64")];
    for (k, v) in want {
        let l = vec![-2 * k, k, k];
        let v: Rat = v.parse().map_err(err)?;
        ensure(p1.get(&l) == Some(&ConstElem::rational(v.clone())), || {
            format!("p1 coefficient {k} != {v}")
        })?;
    }
    Ok(format!("{}; p1 values 1, 3/4, 105/64", out.join(", ")))
}

fn c6_annihilation(pipes: &[Pipeline], sols: &[SolutionBasis]) -> Outcome {
    let mut out = Vec::new();
    for (p, s) in pipes.iter().zip(sols) {
        let r = p.ctx().verify_annihilation(s, p.order);
        ensure(r.euler_operators == p.g.r() + p.g.n(), || {
            format!("{}: {} Euler operators", p.name, r.euler_operators)
        })?;
        ensure(r.box_operators > 0 && r.windows_checked > 0, || {
            format!("{}: nothing checked", p.name)
        })?;
        ensure(r.passed(), || {
            format!(
                "{}: {} residuals, first {:?}",
                p.name,
                r.failures.len(),
                r.failures.first()
            )
        })?;
        out.push(format!(
            "{}: {} Euler + {} box operators, {} windows",
            p.name, r.euler_operators, r.box_operators, r.windows_checked
        ));
    }
    Ok(out.join("; "))
}

fn c7_count(pipes: &[Pipeline], sols: &[SolutionBasis]) -> Outcome {
    let mut out = Vec::new();
    for (p, s) in pipes.iter().zip(sols) {
        ensure(s.solutions.len() as u64 == p.rank, || {
            format!("{}: {} solutions", p.name, s.solutions.len())
        })?;
        let cert = p.ctx().independence_certificate(s).map_err(err)?;
        let distinct: BTreeSet<_> = cert.signatures.iter().collect();
        ensure(distinct.len() as u64 == p.rank, || {
            format!("{}: {} distinct signatures", p.name, distinct.len())
        })?;
        out.push(format!("{}={}", p.name, s.solutions.len()));
    }
    Ok(out.join(", "))
}

fn c8_gamma(pipes: &[Pipeline], sols: &[SolutionBasis]) -> Outcome {
    for (p, s) in pipes.iter().zip(sols) {
        let worst = s
            .solutions
            .iter()
            .map(|x| x.max_gamma_degree())
            .max()
            .unwrap_or(0);
        ensure(worst == 0, || {
            format!("{}: gamma degree {worst} in output", p.name)
        })?;
        let ctx = p.ctx();
        ensure(ctx.factor_gamma_degree() > 0, || {
            format!("{}: no gamma in the factors", p.name)
        })?;
        // Treat the zero columns as independent classes.
        let mut classes = ctx.classes().to_vec();
        for (c, ray) in p.g.column_rays().iter().enumerate() {
            if ray.is_none() {
                classes[c] = p.ring.zero();
            }
        }
        let broken = FrobeniusContext::new_with_classes(&p.ring, &p.inst.npd, &p.g, classes);
        let b = broken.assemble_b(1, 1).map_err(err)?;
        ensure(b.max_gamma_degree() > 0, || {
            format!("{}: mutation left no gamma", p.name)
        })?;
    }
    Ok("outputs gamma-free, mutation exposes gamma on both".into())
}

fn c9_duality() -> Outcome {
    let mut points = 0;
    for (name, _, _) in BUILTINS {
        let inst = load_instance(name).map_err(err)?;
        let r = cmd_dualize(&inst).map_err(err)?;
        ensure(r.passed, || format!("{name}: {}", r.value))?;
        let back = dual_nef_partition(&dual_nef_partition(&inst.npd).map_err(err)?).map_err(err)?;
        ensure(back.delta_parts() == inst.npd.delta_parts(), || {
            format!("{name}: parts differ")
        })?;
        if name == "p3-8planes" {
            points = r.value["lattice_cover"]["points"].as_u64().unwrap_or(0);
        }
    }
    ensure(points == 13, || {
        format!("p3 lattice cover has {points} points")
    })?;
    Ok("both round trips recover the decomposition; p3 cover 13 points".into())
}

fn c10_resonance() -> Outcome {
    for (name, _, _) in BUILTINS {
        let inst = load_instance(name).map_err(err)?;
        let cols = build_cayley_gkz(&inst.npd).map_err(err)?.rows().len();
        let zero = vec!["0"; cols].join(",");
        let run = RunOptions {
            beta: Some(parse_beta(&zero).map_err(err)?),
            ..RunOptions::default()
        };
        let r = cmd_check(&inst, &run).map_err(err)?;
        ensure(r.value["non_resonant"] == json!(false), || {
            format!("{name}: still non-resonant")
        })?;
        ensure(!r.passed, || format!("{name}: check passed with beta = 0"))?;
        let pairings: &Vec<Value> = r.value["pairings"].as_array().ok_or("no pairings")?;
        ensure(pairings.iter().all(|p| p["value"] == json!("0")), || {
            format!("{name}: nonzero pairing")
        })?;
    }
    Ok("beta = 0 is resonant on both".into())
}

fn report(
    results: &mut Vec<bool>,
    id: usize,
    title: &str,
    limit: Duration,
    f: impl FnOnce() -> Outcome,
) {
    let t = Instant::now();
    let outcome = f();
    let dt = t.elapsed();
    let (ok, detail) = match outcome {
        Ok(d) if dt <= limit => (true, d),
        Ok(d) => (false, format!("{d}; exceeded {limit:?}")),
        Err(e) => (false, e),
    };
    println!(
        "{} criterion {id:>2} {title}: {detail} [{:.2}s]",
        if ok { "PASS" } else { "FAIL" },
        dt.as_secs_f64()
    );
    results.push(ok);
}

fn main() -> ExitCode {
    let mut results = Vec::new();
    let s = Duration::from_secs;
    report(&mut results, 1, "matrix reproduction", s(1), c1_matrix);
    report(
        &mut results,
        2,
        "non-resonance certificate",
        s(10),
        c2_non_resonance,
    );
    report(&mut results, 3, "rank two ways", s(30), c3_rank);
    report(&mut results, 4, "union of cones", s(60), c4_union_cones);

    let setup = Instant::now();
    let pipes: Result<Vec<Pipeline>, String> = BUILTINS
        .iter()
        .map(|&(n, r, o)| Pipeline::new(n, r, o))
        .collect();
    let sols: Result<Vec<SolutionBasis>, String> = pipes
        .as_ref()
        .map_err(Clone::clone)
        .and_then(|ps| ps.iter().map(Pipeline::solutions).collect());
    let setup = setup.elapsed();
    let series = |f: fn(&[Pipeline], &[SolutionBasis]) -> Outcome| -> Outcome {
        match (&pipes, &sols) {
            (Ok(p), Ok(s)) => f(p, s),
            (Err(e), _) | (_, Err(e)) => Err(format!("series construction failed: {e}")),
        }
    };
    // Series construction time counts toward the oracle criterion.
    let limit = s(300).saturating_sub(setup);
    report(&mut results, 5, "oracle equality", limit, || {
        series(c5_oracle)
    });
    report(&mut results, 6, "annihilation", s(300), || {
        series(c6_annihilation)
    });
    report(&mut results, 7, "solution count", s(300), || {
        series(c7_count)
    });
    report(&mut results, 8, "gamma cancellation", s(300), || {
        series(c8_gamma)
    });
    report(&mut results, 9, "duality round trips", s(10), c9_duality);
    report(&mut results, 10, "resonance control", s(10), c10_resonance);

    let passed = results.iter().filter(|&&b| b).count();
    println!(
        "acceptance: {passed}/{} criteria passed (series setup {:.2}s)",
        results.len(),
        setup.as_secs_f64()
    );
    if passed == results.len() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
