//! Experiment orchestration: one runner per subcommand, each returning a
//! report whose `passed` flag decides the exit status, plus deterministic
//! JSON and CSV rendering stamped with the config hash and toolkit version.

mod config;

use serde::Serialize;
use serde_json::{json, Value};

pub use config::{CoronaConfig, ExperimentConfig, HoroballConfig, RipsConfig, Truncation, Window};

use crate::augmented::{build_augmented, delta_scan, AugGraph, DeltaRow, DeltaScanParams};
use crate::corona::{action_check, corona_betti, roundtrip_check};
use crate::error::{Error, Result};
use crate::group::{coset_order, GroupKind};
use crate::horoball::{
    depth_shift_scan, gromov_product_profile, normal_form_audit, FiniteMetricSpace, HoroVertex, HoroballGraph,
};
use crate::limits::Limits;
use crate::rips::{
    depth_window, homology, reduced_cohomology, reduced_homology, rips_on_augmented, SimplicialComplex,
};

pub const TOOLKIT_VERSION: &str = env!("CARGO_PKG_VERSION");
pub const SCHEMA_VERSION: u32 = 1;

pub const EXIT_PASS: u8 = 0;
pub const EXIT_PROPERTY_FAILED: u8 = 1;
pub const EXIT_CONFIG: u8 = 2;
pub const EXIT_BUDGET: u8 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Command {
    HoroballCheck,
    DeltaScan,
    Betti,
    Roundtrip,
    ActionCheck,
    CoronaBetti,
}

impl Command {
    pub const ALL: [Command; 6] = [
        Command::HoroballCheck,
        Command::DeltaScan,
        Command::Betti,
        Command::Roundtrip,
        Command::ActionCheck,
        Command::CoronaBetti,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::HoroballCheck => "horoball-check",
            Command::DeltaScan => "delta-scan",
            Command::Betti => "betti",
            Command::Roundtrip => "roundtrip",
            Command::ActionCheck => "action-check",
            Command::CoronaBetti => "corona-betti",
        }
    }
}

/// Exit status for a failed run.
pub fn exit_code(e: &Error) -> u8 {
    match e {
        Error::BudgetExceeded { .. } => EXIT_BUDGET,
        Error::InvalidConfig { .. } | Error::Precondition(_) | Error::Unsupported(_) | Error::ModelMismatch => {
            EXIT_CONFIG
        }
        _ => EXIT_PROPERTY_FAILED,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub command: Command,
    pub passed: bool,
    pub body: Value,
    /// Scan rows, rendered as CSV; only `delta-scan` has them.
    pub table: Option<Vec<DeltaRow>>,
    /// The first failing instance, when `passed` is false.
    pub witness: Option<Value>,
}

impl Report {
    fn new(command: Command, passed: bool, body: impl Serialize, witness: Option<Value>) -> Result<Self> {
        let body = serde_json::to_value(body).map_err(|e| Error::Internal(e.to_string()))?;
        Ok(Report {
            command,
            passed,
            body,
            table: None,
            witness: if passed { None } else { witness },
        })
    }

    pub fn exit_code(&self) -> u8 {
        if self.passed {
            EXIT_PASS
        } else {
            EXIT_PROPERTY_FAILED
        }
    }

    pub fn witness_json(&self) -> Option<String> {
        let w = self.witness.as_ref()?;
        Some(serde_json::to_string_pretty(&json!({ "command": self.command.name(), "witness": w })).expect("json values serialize"))
    }

    /// The JSON artifact: the report body under a versioned header.
    pub fn to_json(&self, cfg: &ExperimentConfig) -> String {
        let doc = json!({
            "schema": format!("relhyp.{}/v{SCHEMA_VERSION}", self.command.name()),
            "toolkit_version": TOOLKIT_VERSION,
            "config_hash": cfg.hash(),
            "seed": cfg.seed,
            "command": self.command.name(),
            "passed": self.passed,
            "witness": self.witness,
            "report": self.body,
        });
        let mut text = serde_json::to_string_pretty(&doc).expect("json values serialize");
        text.push('\n');
        text
    }

    /// The CSV artifact, led by `#` comment lines carrying the header
    /// fields of the JSON form.
    pub fn to_csv(&self, cfg: &ExperimentConfig) -> Result<Option<String>> {
        let Some(rows) = &self.table else {
            return Ok(None);
        };
        let mut out = format!(
            "# schema=relhyp.{}/v{SCHEMA_VERSION} toolkit_version={TOOLKIT_VERSION} config_hash={} seed={}\n",
            self.command.name(),
            cfg.hash(),
            cfg.seed
        );
        let mut w = csv::Writer::from_writer(Vec::new());
        for row in rows {
            w.serialize(row).map_err(|e| Error::Internal(e.to_string()))?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Internal(e.to_string()))?;
        out.push_str(std::str::from_utf8(&bytes).expect("csv output is utf-8"));
        Ok(Some(out))
    }

    /// The primary artifact: CSV for scans, JSON otherwise.
    pub fn render(&self, cfg: &ExperimentConfig) -> Result<String> {
        Ok(match self.to_csv(cfg)? {
            Some(csv) => csv,
            None => self.to_json(cfg),
        })
    }
}

pub fn run(cmd: Command, cfg: &ExperimentConfig, limits: &Limits) -> Result<Report> {
    cfg.validate(cmd)?;
    match cmd {
        Command::HoroballCheck => horoball_check(cfg, limits),
        Command::DeltaScan => run_delta_scan(cfg, limits),
        Command::Betti => run_betti(cfg, limits),
        Command::Roundtrip => {
            let r = roundtrip_check(&cfg.pair_for(cmd)?, cfg.truncation.stage, limits)?;
            let witness = r.witness.clone().map(Value::from);
            Report::new(cmd, r.passed, r, witness)
        }
        Command::ActionCheck => {
            let t = &cfg.truncation;
            let r = action_check(&cfg.pair_for(cmd)?, cfg.action_radius, t.stage, t.cutoff, limits)?;
            let witness = r.witnesses.first().cloned().map(Value::from);
            Report::new(cmd, r.passed, r, witness)
        }
        Command::CoronaBetti => {
            let c = &cfg.corona;
            let r = corona_betti(c.n, c.m, c.stage, limits)?;
            let witness = json!({ "top_rank": r.top_rank, "zero_rank": r.zero_rank, "components": r.components });
            Report::new(cmd, r.passed, r, Some(witness))
        }
    }
}

fn horoball_check(cfg: &ExperimentConfig, limits: &Limits) -> Result<Report> {
    let h = &cfg.horoball;
    let top = i64::from(h.base_len);
    let small = HoroballGraph::build(FiniteMetricSpace::integer_segment(0, top), h.depth, limits)?;
    // truncation-stability certificate: base widened by 2, depth by 2
    let large = HoroballGraph::build(FiniteMetricSpace::integer_segment(-2, top + 2), h.depth + 2, limits)?;
    let audit = normal_form_audit(&small, &large)?;
    let gromov = gromov_product_profile(&small, HoroVertex::new(0, 0), 1..=h.depth)?;
    let shift_space = FiniteMetricSpace::integer_segment(0, i64::from(h.shift_base_len));
    let shifted = HoroballGraph::build(shift_space, h.shift_depth, limits)?;
    let shift = depth_shift_scan(&shifted, h.max_shift)?;

    let passed = audit.passed() && gromov.nondecreasing && shift.passed();
    let witness = if !audit.passed() {
        audit.witness.clone().map(Value::from)
    } else if !gromov.nondecreasing {
        Some(json!({ "gromov_minima": gromov.minima }))
    } else {
        shift.violations.first().map(|v| serde_json::to_value(v).expect("serializable"))
    };
    let body = json!({
        "normal_form": {
            "base": format!("0..={}", h.base_len),
            "depth": h.depth,
            "certified_against": format!("-2..={} at depth {}", h.base_len + 2, h.depth + 2),
            "passed": audit.passed(),
            "audit": audit,
        },
        "gromov_product": {
            "passed": gromov.nondecreasing,
            "profile": gromov,
        },
        "depth_shift": {
            "base": format!("0..={}", h.shift_base_len),
            "depth": h.shift_depth,
            "passed": shift.passed(),
            "scan": shift,
        },
    });
    Report::new(Command::HoroballCheck, passed, body, witness)
}

fn run_delta_scan(cfg: &ExperimentConfig, limits: &Limits) -> Result<Report> {
    let pair = cfg.pair_for(Command::DeltaScan)?;
    let params = DeltaScanParams {
        radii: cfg.radii.clone(),
        depth: cfg.truncation.depth,
        seed: cfg.seed,
        sample: cfg.sample,
    };
    let rows = delta_scan(&pair, &params, limits)?;
    // the only asserted property: with no peripherals nothing is glued, so
    // both metrics coincide, and a free group's Cayley graph is a tree
    let tree = matches!(pair.model.kind(), GroupKind::FreeGroup(_));
    let bad = rows.iter().find(|row| {
        pair.peripherals.k() == 0
            && (row.delta_cayley != row.delta_augmented || (tree && row.delta_cayley != crate::HalfInt::ZERO))
    });
    let passed = bad.is_none();
    let witness = bad.map(|row| serde_json::to_value(row).expect("serializable"));
    let mut report = Report::new(Command::DeltaScan, passed, &rows, witness)?;
    report.table = Some(rows);
    Ok(report)
}

/// The augmented graph described by the truncation parameters.
pub fn augmented_graph(cmd: Command, cfg: &ExperimentConfig, limits: &Limits) -> Result<AugGraph> {
    let pair = cfg.pair_for(cmd)?;
    let t = &cfg.truncation;
    let order = coset_order(&pair, t.cutoff, limits)?;
    build_augmented(&order, t.cayley_radius, t.depth, limits)
}

fn run_betti(cfg: &ExperimentConfig, limits: &Limits) -> Result<Report> {
    let pair = cfg.pair_for(Command::Betti)?;
    let aug = augmented_graph(Command::Betti, cfg, limits)?;
    let (vertices, source) = match cfg.rips.window {
        Some(w) => (
            depth_window(&aug, w.lower, w.upper, cfg.rips.scale)?.window,
            format!("depth window [{}, {}]", w.lower, w.upper),
        ),
        None => ((0..aug.n_cayley() as u32).collect(), format!("Cayley ball of radius {}", aug.cayley_radius())),
    };
    let complex = rips_on_augmented(&aug, &vertices, cfg.rips.scale, cfg.rips.dim_cap, limits)?;
    let tree_ball = cfg.rips.window.is_none()
        && pair.peripherals.k() == 0
        && matches!(pair.model.kind(), GroupKind::FreeGroup(_))
        && (1..=2).contains(&cfg.rips.scale);
    let mut report = betti_report(&complex, tree_ball)?;
    if let Value::Object(map) = &mut report.body {
        map.insert("vertex_set".into(), Value::from(source));
        map.insert("scale".into(), Value::from(cfg.rips.scale));
    }
    Ok(report)
}

/// Homology of `complex` with the engine's self-checks: `∂∘∂ = 0` in every
/// degree and equal ranks of reduced homology and reduced cohomology.
/// With `expect_contractible`, reduced homology must also vanish.
pub fn betti_report(complex: &SimplicialComplex, expect_contractible: bool) -> Result<Report> {
    let h = homology(complex);
    let rh = reduced_homology(complex);
    let rc = reduced_cohomology(complex);
    let boundary_ok = complex.boundary_squared_is_zero();
    let ranks_agree = rh.bettis() == rc.bettis();
    let contractible = rh.is_trivial();
    let passed = boundary_ok && ranks_agree && (!expect_contractible || contractible);
    let counts: Vec<usize> = (0..=complex.dim().unwrap_or(0)).map(|k| complex.count(k)).collect();
    let body = json!({
        "n_vertices": complex.n_vertices(),
        "simplex_counts": counts,
        "capped": complex.is_capped(),
        "homology": h,
        "reduced_homology": rh,
        "reduced_cohomology": rc,
        "boundary_squared_zero": boundary_ok,
        "ranks_agree": ranks_agree,
        "expect_contractible": expect_contractible,
        "reduced_homology_vanishes": contractible,
    });
    let witness = json!({
        "boundary_squared_zero": boundary_ok,
        "reduced_homology": rh.bettis(),
        "reduced_cohomology": rc.bettis(),
    });
    Report::new(Command::Betti, passed, body, Some(witness))
}
