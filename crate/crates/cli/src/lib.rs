//! Command implementations behind the `stpa-rv` binary.
//!
//! Every command returns the text it would print and the process exit code,
//! so the commands can be driven from tests without spawning a process.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use stpa_rv::blocks::parse_blocks;
use stpa_rv::inject::{parse_campaign, Campaign, FaultSpec};
use stpa_rv::monitor::{coverage_matrix, CoverageMatrix, RunReport, RunSetup};
use stpa_rv::sim::parse_scenario;
use stpa_rv::stpa::{generate_monitor_stubs, load, render_bindings, render_templates, validate, Severity, StpaModel, TraceGraph};

/// Exit code for unreadable or inconsistent inputs.
pub const EXIT_LOAD_ERROR: i32 = 2;
/// Exit code of `validate` when the model has error findings.
pub const EXIT_FINDINGS: i32 = 1;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub stdout: String,
    pub code: i32,
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn write(path: &Path, body: &str) -> Result<()> {
    std::fs::write(path, body).with_context(|| format!("writing {}", path.display()))
}

pub fn load_model(path: &Path) -> Result<StpaModel> {
    load(&read(path)?).with_context(|| format!("loading model {}", path.display()))
}

/// A run manifest: which model, scenario, properties, monitors and campaigns
/// make up one run. Paths are relative to the manifest file.
///
/// ```text
/// run scenario1c {
///     model = ../models/aeb.stpa
///     scenario = ../scenarios/nominal.scn
///     properties = ../properties/aeb.props
///     monitors = ../monitors/aeb.mon
///     campaigns = [../campaigns/scenario1c.cmp]
///     seed = 3
/// }
/// ```
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Manifest {
    pub name: String,
    pub model: Option<PathBuf>,
    pub scenario: PathBuf,
    pub properties: PathBuf,
    pub monitors: PathBuf,
    pub campaigns: Vec<PathBuf>,
    pub seed: Option<u64>,
}

impl Manifest {
    pub fn load(path: &Path) -> Result<Manifest> {
        let text = read(path)?;
        let blocks = parse_blocks(&text).with_context(|| format!("parsing {}", path.display()))?;
        let [b] = blocks.as_slice() else { bail!("{}: expected exactly one `run` block", path.display()) };
        if b.kind != "run" {
            bail!("{}: expected a `run` block, found `{}`", path.display(), b.kind);
        }
        b.expect_keys(&["model", "scenario", "properties", "monitors", "campaigns", "seed"], &[])?;
        let base = path.parent().unwrap_or(Path::new("."));
        let rel = |p: &str| base.join(p);
        Ok(Manifest {
            name: b.label()?.to_string(),
            model: b.opt_str("model")?.map(rel),
            scenario: rel(b.str("scenario")?),
            properties: rel(b.str("properties")?),
            monitors: rel(b.str("monitors")?),
            campaigns: b.list("campaigns")?.into_iter().map(rel).collect(),
            seed: b.opt_u64("seed")?,
        })
    }

    /// Scenario, properties and monitors ready to run. When the manifest
    /// names a model, every property must refer to one of its constraints.
    pub fn setup(&self) -> Result<RunSetup> {
        let mut scenario =
            parse_scenario(&read(&self.scenario)?).with_context(|| format!("loading scenario {}", self.scenario.display()))?;
        if let Some(seed) = self.seed {
            scenario.seed = seed;
        }
        let setup = RunSetup::new(scenario, &read(&self.properties)?, &read(&self.monitors)?)?;
        if let Some(model_path) = &self.model {
            let model = load_model(model_path)?;
            for p in &setup.properties {
                if model.constraint(&p.constraint_ref).is_none() {
                    bail!("property {} refers to unknown constraint `{}`", p.id, p.constraint_ref);
                }
            }
        }
        Ok(setup)
    }

    pub fn campaigns(&self, setup: &RunSetup) -> Result<Vec<Campaign>> {
        self.campaigns
            .iter()
            .map(|path| {
                let c = parse_campaign(&read(path)?).with_context(|| format!("loading campaign {}", path.display()))?;
                c.validate(&setup.scenario).with_context(|| format!("campaign {}", path.display()))?;
                Ok(c)
            })
            .collect()
    }
}

/// Lists every finding; fails when any of them is an error.
pub fn cmd_validate(model: &Path) -> Result<Outcome> {
    let m = load_model(model)?;
    let findings = validate(&m);
    let mut out = String::new();
    for f in &findings {
        let _ = writeln!(out, "{f}");
    }
    let errors = findings.iter().filter(|f| f.severity() == Severity::Error).count();
    let _ = writeln!(out, "{} finding(s), {} error(s)", findings.len(), errors);
    Ok(Outcome { stdout: out, code: if errors > 0 { EXIT_FINDINGS } else { 0 } })
}

/// Generates monitor stubs, printing them or writing `monitors.mon` and
/// `properties.tmpl` into `out`.
pub fn cmd_stubs(model: &Path, out: Option<&Path>) -> Result<Outcome> {
    let m = load_model(model)?;
    let stubs = match generate_monitor_stubs(&m) {
        Ok(s) => s,
        Err(e) => {
            let mut text = format!("{e}\n");
            for f in &e.0 {
                let _ = writeln!(text, "{f}");
            }
            return Ok(Outcome { stdout: text, code: EXIT_FINDINGS });
        }
    };
    let bindings = render_bindings(&stubs);
    let templates = render_templates(&stubs);
    let stdout = match out {
        Some(dir) => {
            std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
            write(&dir.join("monitors.mon"), &bindings)?;
            write(&dir.join("properties.tmpl"), &templates)?;
            format!("{} stub(s) written to {}\n", stubs.len(), dir.display())
        }
        None => format!("{bindings}\n{templates}"),
    };
    Ok(Outcome { stdout, code: 0 })
}

/// Prints the loss-to-monitor chain through `id`.
pub fn cmd_chain(manifest: &Path, id: &str) -> Result<Outcome> {
    let man = Manifest::load(manifest)?;
    let model_path = man.model.as_ref().ok_or_else(|| anyhow!("manifest {} names no model", manifest.display()))?;
    let model = load_model(model_path)?;
    let setup = man.setup()?;
    let stubs = generate_monitor_stubs(&model).unwrap_or_default();
    let monitor_edges: Vec<(&str, &str)> =
        setup.bindings.iter().flat_map(|b| b.properties.iter().map(move |p| (b.id.as_str(), p.as_str()))).collect();
    let graph = TraceGraph::from_model(&model)
        .with_stubs(&stubs)
        .with_properties(setup.properties.iter().map(|p| (p.id.as_str(), p.constraint_ref.as_str())))
        .with_monitors(monitor_edges);
    let chain = graph.trace_chain(id)?;
    Ok(Outcome { stdout: chain.to_string(), code: 0 })
}

fn faults_of(campaigns: &[Campaign]) -> Vec<FaultSpec> {
    campaigns.iter().flat_map(|c| c.specs().cloned()).collect()
}

/// Simulates the manifest with all campaign faults active, monitors the
/// trace, and writes the report files into `out`.
pub fn cmd_run(manifest: &Path, seed: Option<u64>, out: &Path, online: bool) -> Result<(Outcome, RunReport)> {
    let mut man = Manifest::load(manifest)?;
    if seed.is_some() {
        man.seed = seed;
    }
    let setup = man.setup()?;
    let faults = faults_of(&man.campaigns(&setup)?);
    let outcome = if online { setup.run_online(&faults)? } else { setup.run(&faults)? };
    outcome.report.write_outputs(&outcome.sim.trace, out)?;
    let mut stdout = outcome.report.summary();
    let _ = writeln!(stdout, "outputs in {}", out.display());
    Ok((Outcome { stdout, code: outcome.report.exit_code() }, outcome.report))
}

/// Runs the fault-free scenario and each campaign fault on its own, then
/// tabulates which monitor detected what and when.
pub fn cmd_matrix(manifest: &Path, out: Option<&Path>) -> Result<(Outcome, CoverageMatrix)> {
    let man = Manifest::load(manifest)?;
    let setup = man.setup()?;
    let mut reports = vec![("no-fault".to_string(), setup.run(&[])?.report)];
    for c in man.campaigns(&setup)? {
        for f in c.specs() {
            reports.push((f.id.clone(), setup.run(std::slice::from_ref(f))?.report));
        }
    }
    let rows: Vec<(String, &RunReport)> = reports.iter().map(|(l, r)| (l.clone(), r)).collect();
    let matrix = coverage_matrix(&rows)?;
    let mut stdout = matrix.to_string();
    if let Some(dir) = out {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        let path = dir.join("coverage.csv");
        write(&path, &matrix.to_csv()?)?;
        let _ = writeln!(stdout, "written to {}", path.display());
    }
    Ok((Outcome { stdout, code: 0 }, matrix))
}
