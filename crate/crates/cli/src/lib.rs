//! Instance loading and the report-producing commands behind the `gkz` binary.

use std::path::Path;

use gkz_core::cohomology::build_ring;
use gkz_core::constants::rat_string;
use gkz_core::fan::{Fan, FanJson, InsertionOrder};
use gkz_core::frobenius::FrobeniusContext;
use gkz_core::gkz::{build_cayley_gkz, GkzSystem};
use gkz_core::instances::{builtin_nablas, nef_partition_from_nablas, NablaParts, BUILTINS};
use gkz_core::nef::{
    check_lattice_cover, dual_nef_partition, validate_nef_partition, NefPartition,
};
use gkz_core::oracles::{binomial_period, independent_volume, sections_from};
use gkz_core::{Error as CoreError, Rat};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid instance JSON at `{path}`: {message}")]
    Schema { path: String, message: String },
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("instance must give either `nabla` or both `fan` and `parts`")]
    MissingInput,
    #[error("cannot parse beta override {0:?}; expected comma-separated p/q values")]
    BadBeta(String),
    #[error(transparent)]
    Core(#[from] CoreError),
}

fn core<E: Into<CoreError>>(e: E) -> CliError {
    CliError::Core(e.into())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum MpcpOrder {
    #[default]
    Lex,
    ReverseLex,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct InstanceOptions {
    #[serde(default, alias = "degmax")]
    pub order: Option<u32>,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub mpcp_order: Option<MpcpOrder>,
}

/// `{"name": ..., "nabla": {"dim": n, "parts": [[[...]]]}}` or
/// `{"name": ..., "fan": {...}, "parts": [[...]]}`, plus optional `options`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceSpec {
    pub name: String,
    #[serde(default)]
    pub nabla: Option<NablaParts>,
    #[serde(default)]
    pub fan: Option<FanJson>,
    #[serde(default)]
    pub parts: Option<Vec<Vec<usize>>>,
    #[serde(default)]
    pub options: InstanceOptions,
}

pub struct Instance {
    pub name: String,
    pub npd: NefPartition,
    pub options: InstanceOptions,
}

/// Command-line overrides.
#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub order: Option<u32>,
    pub seed: Option<u64>,
    pub beta: Option<Vec<Rat>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub value: Value,
    pub passed: bool,
}

pub fn parse_instance_json(text: &str) -> Result<InstanceSpec, CliError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| CliError::Schema {
        path: e.path().to_string(),
        message: e.inner().to_string(),
    })
}

pub fn instance_from_spec(spec: InstanceSpec) -> Result<Instance, CliError> {
    let order = match spec.options.mpcp_order.unwrap_or_default() {
        MpcpOrder::Lex => InsertionOrder::Lex,
        MpcpOrder::ReverseLex => InsertionOrder::ReverseLex,
    };
    let npd = match (&spec.nabla, &spec.fan, &spec.parts) {
        (Some(nabla), _, _) => nef_partition_from_nablas(nabla, order).map_err(core)?,
        (None, Some(fan), Some(parts)) => {
            let fan = Fan::from_json(fan).map_err(core)?;
            validate_nef_partition(&fan, parts).map_err(core)?
        }
        _ => return Err(CliError::MissingInput),
    };
    Ok(Instance {
        name: spec.name,
        npd,
        options: spec.options,
    })
}

/// A built-in name, or a path to an instance JSON file.
pub fn load_instance(arg: &str) -> Result<Instance, CliError> {
    if BUILTINS.contains(&arg) {
        let spec = InstanceSpec {
            name: arg.to_string(),
            nabla: Some(builtin_nablas(arg).map_err(core)?),
            fan: None,
            parts: None,
            options: InstanceOptions::default(),
        };
        return instance_from_spec(spec);
    }
    let text = std::fs::read_to_string(Path::new(arg)).map_err(|source| CliError::Io {
        path: arg.to_string(),
        source,
    })?;
    instance_from_spec(parse_instance_json(&text)?)
}

pub fn parse_beta(s: &str) -> Result<Vec<Rat>, CliError> {
    s.split(',')
        .map(|x| {
            x.trim()
                .parse::<Rat>()
                .map_err(|_| CliError::BadBeta(s.to_string()))
        })
        .collect()
}

fn rats(v: &[Rat]) -> Vec<String> {
    v.iter().map(rat_string).collect()
}

impl Instance {
    pub fn order(&self, run: &RunOptions) -> u32 {
        run.order
            .or(self.options.order)
            .unwrap_or(if self.npd.dim() <= 2 { 4 } else { 2 })
    }

    pub fn seed(&self, run: &RunOptions) -> u64 {
        run.seed.or(self.options.seed).unwrap_or(0)
    }

    pub fn gkz(&self, run: &RunOptions) -> Result<GkzSystem, CliError> {
        let g = build_cayley_gkz(&self.npd).map_err(core)?;
        match &run.beta {
            Some(b) => g.with_beta(b.clone()).map_err(core),
            None => Ok(g),
        }
    }
}

fn vertex_lists(ps: &[gkz_core::polytope::LatticePolytope]) -> Vec<Vec<Vec<i64>>> {
    ps.iter().map(|p| p.vertices().to_vec()).collect()
}

pub fn cmd_dualize(inst: &Instance) -> Result<Report, CliError> {
    let npd = &inst.npd;
    let mut nabla = npd.nabla_parts()[0].clone();
    for p in &npd.nabla_parts()[1..] {
        nabla = nabla.minkowski_sum(p).map_err(core)?;
    }
    let nabla_reflexive = nabla.origin_is_interior() && nabla.is_reflexive().map_err(core)?;
    let delta_reflexive =
        npd.delta().origin_is_interior() && npd.delta().is_reflexive().map_err(core)?;
    let dual = dual_nef_partition(npd).map_err(core)?;
    let back = dual_nef_partition(&dual).map_err(core)?;
    let round_trip = back.delta_parts() == npd.delta_parts();
    let cover = check_lattice_cover(npd);
    let value = json!({
        "name": inst.name,
        "r": npd.r(),
        "n": npd.dim(),
        "nabla": vertex_lists(npd.nabla_parts()),
        "delta": vertex_lists(npd.delta_parts()),
        "delta_reflexive": delta_reflexive,
        "nabla_sum_reflexive": nabla_reflexive,
        "dual_rays": dual.fan().rays(),
        "dual_parts": dual.parts(),
        "double_dual_round_trip": round_trip,
        "lattice_cover": {"covered": cover.covered, "points": cover.points, "uncovered": cover.uncovered},
    });
    Ok(Report {
        passed: nabla_reflexive && delta_reflexive && round_trip && cover.covered,
        value,
    })
}

pub fn cmd_build(inst: &Instance, run: &RunOptions) -> Result<Report, CliError> {
    let g = inst.gkz(run)?;
    let value = json!({
        "name": inst.name,
        "regime": inst.npd.regime(),
        "labels": g.labels().iter().map(|&(i, j)| [i, j]).collect::<Vec<_>>(),
        "matrix": g.rows(),
        "beta": rats(g.beta()),
    });
    Ok(Report {
        value,
        passed: true,
    })
}

pub fn cmd_check(inst: &Instance, run: &RunOptions) -> Result<Report, CliError> {
    let g = inst.gkz(run)?;
    let (facets, facet_error) = match g.facet_normals_ra() {
        Ok(f) => (f, None),
        Err(e) => (Vec::new(), Some(e.to_string())),
    };
    let cert = g.non_resonance_check().map_err(core)?;
    let rank = g.holonomic_rank(&inst.npd).map_err(core)?;
    let seed = inst.seed(run);
    let indep = independent_volume(&g.column_polytope().map_err(core)?, seed).map_err(core)?;
    let indep_ok = indep == gkz_core::Int::from(rank.volume);
    let union = g.verify_union_cones(&inst.npd);
    let value = json!({
        "name": inst.name,
        "beta": rats(g.beta()),
        "facets": facets,
        "facet_form_error": facet_error,
        "pairings": cert.pairings.iter().map(|(h, v)| json!({"normal": h, "value": rat_string(v)})).collect::<Vec<_>>(),
        "non_resonant": cert.non_resonant,
        "rank": rank,
        "independent_volume": {"seed": seed, "volume": indep.to_string()},
        "union_cones": match &union {
            Ok(u) => json!({"ok": true, "total_volume": u.total_volume, "piece_volumes": u.piece_volumes}),
            Err(e) => json!({"ok": false, "error": e.to_string()}),
        },
    });
    Ok(Report {
        passed: facet_error.is_none() && cert.non_resonant && indep_ok && union.is_ok(),
        value,
    })
}

pub fn cmd_solve(inst: &Instance, run: &RunOptions) -> Result<Report, CliError> {
    let g = inst.gkz(run)?;
    let ring = build_ring(inst.npd.fan()).map_err(core)?;
    let ctx = FrobeniusContext::new(&ring, &inst.npd, &g);
    let order = inst.order(run);
    let b = ctx.assemble_b(order, order).map_err(core)?;
    let sols = ctx.extract_solutions(&b);
    let mut value = serde_json::to_value(sols.to_json()).expect("serializable");
    value["name"] = json!(inst.name);
    value["order"] = json!(order);
    value["support_size"] = json!(b.support.len());
    Ok(Report {
        passed: sols.solutions.len() == ring.dimension(),
        value,
    })
}

pub fn cmd_verify(inst: &Instance, run: &RunOptions) -> Result<Report, CliError> {
    let g = inst.gkz(run)?;
    let ring = build_ring(inst.npd.fan()).map_err(core)?;
    let ctx = FrobeniusContext::new(&ring, &inst.npd, &g);
    let order = inst.order(run);
    let b = ctx.assemble_b(order, order).map_err(core)?;
    let sols = ctx.extract_solutions(&b);
    let report = ctx.verify_annihilation(&sols, order);
    let oracle =
        binomial_period(&sections_from(&inst.npd, &g), g.num_columns(), order).map_err(core)?;
    let series = sols.power_series();
    let oracle_equal = series.len() == oracle.len()
        && oracle.iter().all(|(l, c)| {
            series
                .get(l)
                .is_some_and(|s| s.is_rational() && s.rational_part() == *c)
        });
    let cert = ctx.independence_certificate(&sols);
    let gamma_free = sols.solutions.iter().all(|s| s.max_gamma_degree() == 0);
    let rank = g.holonomic_rank(&inst.npd).map_err(core)?;
    let count_ok = sols.solutions.len() as u64 == rank.volume;
    let value = json!({
        "name": inst.name,
        "order": order,
        "warning": if order == 0 { Some("order 0: only constant terms, operator checks are vacuous") } else { None },
        "solutions": sols.solutions.len(),
        "rank": rank.volume,
        "annihilation": report,
        "oracle": {"equal": oracle_equal, "terms": oracle.len()},
        "independence": match &cert {
            Ok(c) => json!({"ok": true, "log_degrees": c.log_degrees}),
            Err(e) => json!({"ok": false, "error": e.to_string()}),
        },
        "gamma_free": gamma_free,
    });
    Ok(Report {
        passed: report.passed() && oracle_equal && cert.is_ok() && gamma_free && count_ok,
        value,
    })
}

pub fn cmd_oracle(inst: &Instance, run: &RunOptions) -> Result<Report, CliError> {
    let g = inst.gkz(run)?;
    let order = inst.order(run);
    let period =
        binomial_period(&sections_from(&inst.npd, &g), g.num_columns(), order).map_err(core)?;
    let poly = g.column_polytope().map_err(core)?;
    let volume = poly.normalized_volume().map_err(core)?;
    let base = inst.seed(run);
    let seeds: Vec<u64> = (base..base + 5).collect();
    let mut vols = Vec::new();
    for &s in &seeds {
        vols.push(independent_volume(&poly, s).map_err(core)?);
    }
    let value = json!({
        "name": inst.name,
        "order": order,
        "binomial_period": period.iter().map(|(l, c)| json!({"l": l, "coeff": rat_string(c)})).collect::<Vec<_>>(),
        "normalized_volume": volume.to_string(),
        "independent_volume": seeds.iter().zip(&vols).map(|(s, v)| json!({"seed": s, "volume": v.to_string()})).collect::<Vec<_>>(),
    });
    Ok(Report {
        passed: vols.iter().all(|v| *v == volume),
        value,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn schema_error_reports_path() {
        let err = parse_instance_json(r#"{"name": "x", "nabla": {"dim": "three", "parts": []}}"#)
            .unwrap_err();
        match err {
            CliError::Schema { path, .. } => assert_eq!(path, "nabla.dim"),
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn missing_input_rejected() {
        let spec = parse_instance_json(r#"{"name": "x"}"#).unwrap();
        assert!(matches!(
            instance_from_spec(spec),
            Err(CliError::MissingInput)
        ));
    }

    #[test]
    fn fan_input_matches_builtin() {
        let text = r#"{"name": "p1", "fan": {"dim": 1, "rays": [[1], [-1]], "max_cones": [[0], [1]]}, "parts": [[0, 1]]}"#;
        let inst = instance_from_spec(parse_instance_json(text).unwrap()).unwrap();
        let built = cmd_build(&inst, &RunOptions::default()).unwrap();
        let b2 = cmd_build(
            &load_instance("p1-elliptic").unwrap(),
            &RunOptions::default(),
        )
        .unwrap();
        assert_eq!(built.value["matrix"], b2.value["matrix"]);
    }

    #[test]
    fn beta_parsing() {
        assert_eq!(parse_beta("0, -1/2").unwrap().len(), 2);
        assert!(parse_beta("x").is_err());
    }

    #[test]
    fn p1_reports() {
        let inst = load_instance("p1-elliptic").unwrap();
        let run = RunOptions::default();
        let d = cmd_dualize(&inst).unwrap();
        assert!(d.passed);
        assert_eq!(d.value["nabla"], json!([[[-1], [1]]]));
        let c = cmd_check(&inst, &run).unwrap();
        assert!(c.passed);
        assert_eq!(c.value["rank"]["volume"], json!(2));
        let v = cmd_verify(&inst, &run).unwrap();
        assert!(v.passed, "{}", v.value);
        let s = cmd_solve(&inst, &run).unwrap();
        assert_eq!(s.value["solutions"].as_array().unwrap().len(), 2);
        let zero = RunOptions {
            beta: Some(parse_beta("0,0").unwrap()),
            ..RunOptions::default()
        };
        let r = cmd_check(&inst, &zero).unwrap();
        assert!(!r.passed);
        assert_eq!(r.value["non_resonant"], json!(false));
    }

    #[test]
    fn order_zero_is_vacuous() {
        let inst = load_instance("p1-elliptic").unwrap();
        let run = RunOptions {
            order: Some(0),
            ..RunOptions::default()
        };
        let v = cmd_verify(&inst, &run).unwrap();
        assert!(v.passed);
        assert!(v.value["warning"].is_string());
    }
}
