//! Command-line front door: preset catalog, validation, transforms,
//! exports, holonomy evaluation and the experiment suites, all emitting
//! deterministic JSON reports.
//!
//! Exit codes: 0 on success, 1 on usage or validation errors, 2 when a
//! numeric residual exceeds the tolerance.

use crate::curves::{decode, encode, schreier_export, CodedCurve, CurveJson, OpCurve};
use crate::homotopy::{annulus_homotopy, connect_homotopy, contract_disk, rectify, verify_rectify, Side};
use crate::hopf::{drinfeld_double, hopf_preset, validate_hopf, HopfData, HopfJson};
use crate::model::Model;
use crate::presentation::{
    build_complex, genus, preset, ArrowPresentation, ComplexJson, SurfaceComplex,
    ValidationReport,
};
use crate::scenarios;
use crate::states::{
    all_cells, experiment_charge, experiment_invariance, flat_field_count, multiplet_residual,
    vacuum_basis, verify_prop91,
};
use crate::transform::{double, dual, dual_alt, dual_of_double, mirror};
use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::json;
use std::io::Write;

#[derive(Parser)]
#[command(
    name = "kitaev",
    version,
    about = "Arrow-presentation surface complexes and the Hopf-algebraic Kitaev model"
)]
struct Cli {
    /// Random seed used by every stochastic step.
    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,
    /// Numeric tolerance for pass/fail decisions.
    #[arg(long, global = true, default_value_t = 1e-8)]
    tol: f64,
    /// Maximal number of state amplitudes.
    #[arg(long, global = true, default_value_t = 1 << 24)]
    mem_cap: usize,
    /// Worker threads (accepted for interface stability; evaluation is
    /// single-threaded).
    #[arg(long, global = true, default_value_t = 1)]
    threads: usize,
    /// Output format: `json` or `text`.
    #[arg(long, global = true, default_value = "json")]
    format: String,
    /// Write the report to a file instead of stdout.
    #[arg(long, global = true)]
    out: Option<String>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct ComplexArg {
    /// Preset name (`minimal-sphere`, `cube`, `torus-NxM`) or a JSON file.
    #[arg(long)]
    complex: String,
}

#[derive(Args)]
struct HopfArg {
    /// Hopf preset (`z2`, `z3`, `z4`, `s3`) or a JSON file.
    #[arg(long)]
    hopf: String,
}

#[derive(Subcommand)]
enum Cmd {
    /// Validate a complex against the presentation and complex axioms.
    Validate {
        #[command(flatten)]
        complex: ComplexArg,
    },
    /// Apply a presentation transform.
    Transform {
        #[command(flatten)]
        complex: ComplexArg,
        /// One of dual | dual-alt | mirror | double | dual-double.
        #[arg(long)]
        op: String,
        /// Also write the transformed complex to this file.
        #[arg(long = "to")]
        to: Option<String>,
    },
    /// Export the Schreier coset graph.
    Schreier {
        #[command(flatten)]
        complex: ComplexArg,
        /// `dot` or `graphml`.
        #[arg(long, default_value = "dot")]
        graph_format: String,
    },
    /// Curve codec and classification.
    Curve {
        #[command(subcommand)]
        cmd: CurveCmd,
    },
    /// Ribbon-homotopy planners.
    Homotopy {
        #[command(subcommand)]
        cmd: HomotopyCmd,
    },
    /// Hopf-algebra utilities.
    Hopf {
        #[command(subcommand)]
        cmd: HopfCmd,
    },
    /// Evaluate an opholonomy on probe states.
    Holonomy {
        #[command(flatten)]
        complex: ComplexArg,
        #[command(flatten)]
        hopf: HopfArg,
        #[arg(long)]
        curve: String,
        /// Element of the dual double, `{"coords": [[re, im], ...]}`.
        #[arg(long)]
        element: Option<String>,
        #[arg(long)]
        probe_report: Option<String>,
    },
    /// Dimension of the protected space.
    VacuumDim {
        #[command(flatten)]
        complex: ComplexArg,
        #[command(flatten)]
        hopf: HopfArg,
    },
    /// Run an identity suite.
    Verify {
        #[command(flatten)]
        complex: ComplexArg,
        #[command(flatten)]
        hopf: HopfArg,
        /// One of relations | gauge | loops | ribbon.
        #[arg(long)]
        suite: String,
    },
    /// State-level experiments.
    Experiment {
        #[command(subcommand)]
        cmd: ExperimentCmd,
    },
}

#[derive(Subcommand)]
enum CurveCmd {
    /// Decode a coded curve to its arrow sequence.
    Decode {
        #[command(flatten)]
        complex: ComplexArg,
        #[arg(long)]
        curve: String,
    },
    /// Encode an arrow sequence back into base + word form.
    Encode {
        #[command(flatten)]
        complex: ComplexArg,
        /// JSON file `{"source": int, "arrows": [int]}` with packed arrows.
        #[arg(long)]
        arrows: String,
    },
    /// Ribbon classification of a coded curve.
    Classify {
        #[command(flatten)]
        complex: ComplexArg,
        #[arg(long)]
        curve: String,
    },
}

#[derive(Subcommand)]
enum HomotopyCmd {
    Contract {
        #[command(flatten)]
        complex: ComplexArg,
        #[arg(long)]
        curve: String,
        /// `left` or `right`.
        #[arg(long, default_value = "left")]
        side: String,
    },
    Connect {
        #[command(flatten)]
        complex: ComplexArg,
        #[arg(long)]
        curve: String,
        #[arg(long)]
        curve2: String,
    },
    Annulus {
        #[command(flatten)]
        complex: ComplexArg,
        #[arg(long)]
        curve: String,
        #[arg(long)]
        curve2: String,
    },
    Rectify {
        #[command(flatten)]
        complex: ComplexArg,
        #[arg(long)]
        curve: String,
    },
}

#[derive(Subcommand)]
enum HopfCmd {
    Validate {
        #[command(flatten)]
        hopf: HopfArg,
    },
    /// Emit the Drinfeld double as structure constants.
    Double {
        #[command(flatten)]
        hopf: HopfArg,
    },
}

#[derive(Subcommand)]
enum ExperimentCmd {
    Invariance {
        #[command(flatten)]
        complex: ComplexArg,
        #[command(flatten)]
        hopf: HopfArg,
        /// Scenario: `connect`, `contract` or `annulus`.
        #[arg(long, default_value = "connect")]
        scenario: String,
    },
    Charge {
        #[command(flatten)]
        complex: ComplexArg,
        #[command(flatten)]
        hopf: HopfArg,
    },
    Multiplet {
        #[command(flatten)]
        complex: ComplexArg,
        #[command(flatten)]
        hopf: HopfArg,
        #[arg(long, default_value_t = 0)]
        charge: usize,
    },
    Prop91 {
        #[command(flatten)]
        complex: ComplexArg,
        #[command(flatten)]
        hopf: HopfArg,
    },
}

fn load_complex(spec: &str) -> Result<ArrowPresentation> {
    if let Ok(p) = preset(spec) {
        return Ok(p);
    }
    let text =
        std::fs::read_to_string(spec).with_context(|| format!("cannot read complex `{spec}`"))?;
    let j: ComplexJson = serde_json::from_str(&text)?;
    ArrowPresentation::from_json(&j).map_err(|e| anyhow!("{e}"))
}

fn load_complex_raw(spec: &str) -> Result<ComplexJson> {
    if let Ok(p) = preset(spec) {
        return Ok(p.to_json());
    }
    let text = std::fs::read_to_string(spec)?;
    Ok(serde_json::from_str(&text)?)
}

fn load_hopf(spec: &str) -> Result<HopfData> {
    if let Ok(h) = hopf_preset(spec) {
        return Ok(h);
    }
    let text =
        std::fs::read_to_string(spec).with_context(|| format!("cannot read hopf `{spec}`"))?;
    let j: HopfJson = serde_json::from_str(&text)?;
    HopfData::from_json(&j, spec).map_err(|e| anyhow!("{e}"))
}

fn load_curve(p: &ArrowPresentation, path: &str) -> Result<OpCurve> {
    let text = std::fs::read_to_string(path)?;
    let j: CurveJson = serde_json::from_str(&text)?;
    let coded = CodedCurve::from_json(&j).ok_or_else(|| anyhow!("bad word tokens"))?;
    if coded.base_arrow >= p.n_arrows() {
        bail!("base arrow out of range");
    }
    Ok(decode(p, &coded))
}

fn build(p: &ArrowPresentation) -> Result<SurfaceComplex> {
    build_complex(p).map_err(|e| anyhow!("{e}"))
}

struct Output {
    format: String,
    out: Option<String>,
}

impl Output {
    fn emit<T: Serialize>(&self, report: &T) -> Result<()> {
        let body = if self.format == "text" {
            let v = serde_json::to_value(report)?;
            render_text(&v, 0)
        } else {
            let mut s = serde_json::to_string_pretty(report)?;
            s.push('\n');
            s
        };
        match &self.out {
            Some(path) => std::fs::write(path, body)?,
            None => {
                std::io::stdout().write_all(body.as_bytes())?;
            }
        }
        Ok(())
    }
}

fn render_text(v: &serde_json::Value, indent: usize) -> String {
    let pad = "  ".repeat(indent);
    match v {
        serde_json::Value::Object(map) => map
            .iter()
            .map(|(k, val)| match val {
                serde_json::Value::Object(_) | serde_json::Value::Array(_) => {
                    format!("{pad}{k}:\n{}", render_text(val, indent + 1))
                }
                _ => format!("{pad}{k}: {val}\n"),
            })
            .collect(),
        serde_json::Value::Array(items) => items
            .iter()
            .map(|val| match val {
                serde_json::Value::Object(_) | serde_json::Value::Array(_) => {
                    render_text(val, indent)
                }
                _ => format!("{pad}- {val}\n"),
            })
            .collect(),
        other => format!("{pad}{other}\n"),
    }
}

/// Entry point used by the `kitaev` binary; returns the process exit code.
pub fn run(args: Vec<String>) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match dispatch(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            1
        }
    }
}

fn dispatch(cli: &Cli) -> Result<i32> {
    let output = Output {
        format: cli.format.clone(),
        out: cli.out.clone(),
    };
    match &cli.cmd {
        Cmd::Validate { complex } => {
            let raw = load_complex_raw(&complex.complex)?;
            let mut violations = ArrowPresentation::validate_raw(raw.n_arrows, &raw.t0, &raw.t2);
            if violations.is_empty() {
                let p = ArrowPresentation::from_json(&raw).map_err(|e| anyhow!("{e}"))?;
                let cx = build(&p)?;
                violations.extend(crate::presentation::validate_csc(&cx));
                let report = json!({
                    "valid": violations.is_empty(),
                    "violations": violations,
                    "counts": {
                        "vertices": cx.n_vertices(),
                        "edges": cx.n_edges(),
                        "faces": cx.n_faces(),
                    },
                    "euler_characteristic": cx.euler_characteristic(),
                    "connected": p.is_connected(),
                    "genus": if p.is_connected() { Some(genus(&p).unwrap()) } else { None },
                });
                output.emit(&report)?;
                return Ok(if violations.is_empty() { 0 } else { 1 });
            }
            let report = ValidationReport {
                valid: false,
                violations,
            };
            output.emit(&report)?;
            Ok(1)
        }
        Cmd::Transform { complex, op, to } => {
            let p = load_complex(&complex.complex)?;
            let q = match op.as_str() {
                "dual" => dual(&p),
                "dual-alt" => dual_alt(&p),
                "mirror" => mirror(&p),
                "double" => double(&p),
                "dual-double" => dual_of_double(&p),
                other => bail!("unknown transform `{other}`"),
            };
            let j = q.to_json();
            if let Some(path) = to {
                std::fs::write(path, serde_json::to_string_pretty(&j)? + "\n")?;
            }
            output.emit(&j)?;
            Ok(0)
        }
        Cmd::Schreier {
            complex,
            graph_format,
        } => {
            let p = load_complex(&complex.complex)?;
            let doc = schreier_export(&p, graph_format).map_err(|e| anyhow!("{e}"))?;
            match &cli.out {
                Some(path) => std::fs::write(path, doc)?,
                None => print!("{doc}"),
            }
            Ok(0)
        }
        Cmd::Curve { cmd } => match cmd {
            CurveCmd::Decode { complex, curve } => {
                let p = load_complex(&complex.complex)?;
                let c = load_curve(&p, curve)?;
                let report = json!({
                    "source_site": c.source,
                    "target_site": c.target(&p),
                    "closed": c.is_closed(&p),
                    "arrows": c.arrows.iter().map(|d| d.pack()).collect::<Vec<_>>(),
                });
                output.emit(&report)?;
                Ok(0)
            }
            CurveCmd::Encode { complex, arrows } => {
                let p = load_complex(&complex.complex)?;
                let text = std::fs::read_to_string(arrows)?;
                let v: serde_json::Value = serde_json::from_str(&text)?;
                let source = v["source"].as_u64().ok_or_else(|| anyhow!("no source"))? as usize;
                let packed = v["arrows"]
                    .as_array()
                    .ok_or_else(|| anyhow!("no arrows"))?;
                let c = OpCurve {
                    source,
                    arrows: packed
                        .iter()
                        .map(|x| {
                            crate::transform::DoubleArrow::unpack(x.as_u64().unwrap_or(0) as usize)
                        })
                        .collect(),
                };
                let coded = encode(&p, &c).map_err(|e| anyhow!("{e}"))?;
                output.emit(&coded.to_json())?;
                Ok(0)
            }
            CurveCmd::Classify { complex, curve } => {
                let p = load_complex(&complex.complex)?;
                let c = load_curve(&p, curve)?;
                let cls = crate::curves::classify_ribbon(&p, &c);
                output.emit(&cls)?;
                Ok(0)
            }
        },
        Cmd::Homotopy { cmd } => match cmd {
            HomotopyCmd::Contract {
                complex,
                curve,
                side,
            } => {
                let p = load_complex(&complex.complex)?;
                let cx = build(&p)?;
                let c = load_curve(&p, curve)?;
                let side = match side.as_str() {
                    "left" => Side::Left,
                    "right" => Side::Right,
                    other => bail!("unknown side `{other}`"),
                };
                let plan = contract_disk(&p, &cx, &c, side).map_err(|e| anyhow!("{e}"))?;
                output.emit(&plan.to_json())?;
                Ok(0)
            }
            HomotopyCmd::Connect {
                complex,
                curve,
                curve2,
            } => {
                let p = load_complex(&complex.complex)?;
                let cx = build(&p)?;
                let c1 = load_curve(&p, curve)?;
                let c2 = load_curve(&p, curve2)?;
                let plan = connect_homotopy(&p, &cx, &c1, &c2).map_err(|e| anyhow!("{e}"))?;
                output.emit(&plan.to_json())?;
                Ok(0)
            }
            HomotopyCmd::Annulus {
                complex,
                curve,
                curve2,
            } => {
                let p = load_complex(&complex.complex)?;
                let cx = build(&p)?;
                let c1 = load_curve(&p, curve)?;
                let c2 = load_curve(&p, curve2)?;
                let plan = annulus_homotopy(&p, &cx, &c1, &c2).map_err(|e| anyhow!("{e}"))?;
                output.emit(&plan.to_json())?;
                Ok(0)
            }
            HomotopyCmd::Rectify { complex, curve } => {
                let p = load_complex(&complex.complex)?;
                let c = load_curve(&p, curve)?;
                let (ribbon, lassos) = rectify(&p, &c);
                let ok = verify_rectify(&p, &c, &ribbon, &lassos);
                let coded = encode(&p, &ribbon).map_err(|e| anyhow!("{e}"))?;
                let report = json!({
                    "ribbon": coded.to_json(),
                    "n_lassos": lassos.len(),
                    "certified": ok,
                });
                output.emit(&report)?;
                Ok(if ok { 0 } else { 2 })
            }
        },
        Cmd::Hopf { cmd } => match cmd {
            HopfCmd::Validate { hopf } => {
                let h = load_hopf(&hopf.hopf)?;
                let rep = validate_hopf(&h);
                let passes = rep.passes(cli.tol.max(1e-10));
                let report = json!({
                    "label": h.label,
                    "dim": h.dim,
                    "checks": rep.checks,
                    "max_residual": rep.max_residual,
                    "passes": passes,
                });
                output.emit(&report)?;
                Ok(if passes { 0 } else { 2 })
            }
            HopfCmd::Double { hopf } => {
                let h = load_hopf(&hopf.hopf)?;
                let qt = drinfeld_double(&h);
                output.emit(&qt.hopf.to_json())?;
                Ok(0)
            }
        },
        Cmd::Holonomy {
            complex,
            hopf,
            curve,
            element,
            probe_report,
        } => {
            let p = load_complex(&complex.complex)?;
            let cx = build(&p)?;
            let h = load_hopf(&hopf.hopf)?;
            let model = Model::new(p.clone(), cx, h);
            let c = load_curve(&p, curve)?;
            let n2 = model.double_dual.dim;
            let phi: Vec<num_complex::Complex64> = match element {
                Some(path) => {
                    let text = std::fs::read_to_string(path)?;
                    let v: serde_json::Value = serde_json::from_str(&text)?;
                    let coords = v["coords"].as_array().ok_or_else(|| anyhow!("no coords"))?;
                    if coords.len() != n2 {
                        bail!("element needs {n2} coordinates");
                    }
                    coords
                        .iter()
                        .map(|pair| {
                            num_complex::Complex64::new(
                                pair[0].as_f64().unwrap_or(0.0),
                                pair[1].as_f64().unwrap_or(0.0),
                            )
                        })
                        .collect()
                }
                // default: the Haar integral of the dual double
                None => model.double_dual.haar.clone(),
            };
            let op = model.ophol(&c, &phi).map_err(|e| anyhow!("{e}"))?;
            let support: Vec<usize> = op.support(&model).into_iter().collect();
            let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(cli.seed);
            let mut probes = Vec::new();
            for _ in 0..8 {
                let psi = crate::states::StateVector::random(model.dim_h(), &support, &mut rng);
                let out_state = model.apply(&op, &psi).map_err(|e| anyhow!("{e}"))?;
                probes.push(json!({
                    "norm_in": psi.norm(),
                    "norm_out": out_state.norm(),
                }));
            }
            let report = json!({
                "curve_len": c.arrows.len(),
                "support_edges": support,
                "probes": probes,
                "seed": cli.seed,
            });
            if let Some(path) = probe_report {
                std::fs::write(path, serde_json::to_string_pretty(&report)? + "\n")?;
            }
            output.emit(&report)?;
            Ok(0)
        }
        Cmd::VacuumDim { complex, hopf } => {
            let p = load_complex(&complex.complex)?;
            let cx = build(&p)?;
            let h = load_hopf(&hopf.hopf)?;
            let model = Model::new(p.clone(), cx, h);
            let vb = vacuum_basis(&model, &all_cells(&model), None, cli.seed, cli.mem_cap)
                .map_err(|e| anyhow!("{e}"))?;
            let g = genus(&p).map_err(|e| anyhow!("{e}"))?;
            let oracle = flat_field_count(&model.hopf, g as usize);
            let consistent = oracle.map(|o| o == vb.vectors.len());
            let report = json!({
                "dim": vb.vectors.len(),
                "probes_used": vb.probes_used,
                "genus": g,
                "flat_field_oracle": oracle,
                "oracle_consistent": consistent,
                "seed": cli.seed,
            });
            output.emit(&report)?;
            Ok(match consistent {
                Some(false) => 2,
                _ => 0,
            })
        }
        Cmd::Verify {
            complex,
            hopf,
            suite,
        } => {
            let p = load_complex(&complex.complex)?;
            let cx = build(&p)?;
            let h = load_hopf(&hopf.hopf)?;
            let model = Model::new(p, cx, h);
            let res = match suite.as_str() {
                "relations" => crate::verify::suite_relations(&model, cli.seed),
                "gauge" => crate::verify::suite_gauge(&model, cli.seed),
                "loops" => crate::verify::suite_loops(&model, cli.seed),
                "ribbon" => crate::verify::suite_ribbon(&model, cli.seed),
                other => bail!("unknown suite `{other}`"),
            }
            .map_err(|e| anyhow!("{e}"))?;
            let max = res.iter().map(|r| r.1).fold(0.0, f64::max);
            let report = json!({
                "suite": suite,
                "checks": res,
                "max_residual": max,
                "tol": cli.tol,
                "seed": cli.seed,
            });
            output.emit(&report)?;
            Ok(if max < cli.tol { 0 } else { 2 })
        }
        Cmd::Experiment { cmd } => experiment(cli, &output, cmd),
    }
}

fn experiment(cli: &Cli, output: &Output, cmd: &ExperimentCmd) -> Result<i32> {
    match cmd {
        ExperimentCmd::Prop91 { complex, hopf } => {
            let p = load_complex(&complex.complex)?;
            let cx = build(&p)?;
            let h = load_hopf(&hopf.hopf)?;
            let model = Model::new(p.clone(), cx, h);
            let n = p.n_arrows();
            let sample = vec![0, n / 3, 2 * n / 3];
            let res = verify_prop91(&model, &sample, cli.seed).map_err(|e| anyhow!("{e}"))?;
            let report = json!({
                "residual": res,
                "arrows": sample,
                "tol": cli.tol,
                "seed": cli.seed,
            });
            output.emit(&report)?;
            Ok(if res < cli.tol { 0 } else { 2 })
        }
        ExperimentCmd::Invariance {
            complex,
            hopf,
            scenario,
        } => {
            let p = load_complex(&complex.complex)?;
            let cx = build(&p)?;
            let h = load_hopf(&hopf.hopf)?;
            let model = Model::new(p.clone(), cx, h);
            let (rho1, rho2, plan) =
                scenarios::invariance_scenario(&model.p, &model.cx, scenario)
                    .ok_or_else(|| anyhow!("no `{scenario}` configuration found"))?;
            let res = experiment_invariance(&model, &rho1, &rho2, &plan, cli.seed)
                .map_err(|e| anyhow!("{e}"))?;
            let report = json!({
                "residual": res,
                "scenario": scenario,
                "plan_moves": plan.moves.len(),
                "support_cells": plan.support.len(),
                "free": plan.free,
                "tol": cli.tol,
                "seed": cli.seed,
            });
            output.emit(&report)?;
            Ok(if res < cli.tol { 0 } else { 2 })
        }
        ExperimentCmd::Charge { complex, hopf } => {
            let p = load_complex(&complex.complex)?;
            let cx = build(&p)?;
            let h = load_hopf(&hopf.hopf)?;
            let model = Model::new(p.clone(), cx, h);
            let (gamma_loop, rho, disk) = scenarios::charge_scenario(&model.p, &model.cx)
                .ok_or_else(|| anyhow!("no charge configuration found"))?;
            let rep = experiment_charge(&model, &gamma_loop, &rho, &disk, cli.seed)
                .map_err(|e| anyhow!("{e}"))?;
            let overlaps: Vec<Vec<[f64; 2]>> = rep
                .overlaps
                .iter()
                .map(|row| row.iter().map(|z| [z.re, z.im]).collect())
                .collect();
            let report = json!({
                "residual": rep.residual,
                "n_charges": rep.n_charges,
                "overlaps": overlaps,
                "tol": cli.tol,
                "seed": cli.seed,
            });
            output.emit(&report)?;
            Ok(if rep.residual < cli.tol { 0 } else { 2 })
        }
        ExperimentCmd::Multiplet {
            complex,
            hopf,
            charge,
        } => {
            let p = load_complex(&complex.complex)?;
            let cx = build(&p)?;
            let h = load_hopf(&hopf.hopf)?;
            let model = Model::new(p.clone(), cx, h);
            let rho = crate::verify::find_open_ribbon_disjoint_sites(&model)
                .ok_or_else(|| anyhow!("no open ribbon with disjoint endpoints found"))?;
            let res = multiplet_residual(&model, &rho, *charge, cli.seed, cli.mem_cap)
                .map_err(|e| anyhow!("{e}"))?;
            let report = json!({
                "residual": res,
                "charge": charge,
                "tol": cli.tol,
                "seed": cli.seed,
            });
            output.emit(&report)?;
            Ok(if res < cli.tol { 0 } else { 2 })
        }
    }
}

/// Run the CLI with extra `--out` capture; used by tests and the
/// acceptance suite.
pub fn run_to_string(args: &[&str]) -> (i32, String) {
    let tmp = std::env::temp_dir().join(format!(
        "kitaev-cli-{}-{}.json",
        std::process::id(),
        std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .unwrap()
            .as_nanos()
    ));
    let mut full: Vec<String> = vec!["kitaev".into()];
    full.extend(args.iter().map(|s| s.to_string()));
    full.push("--out".into());
    full.push(tmp.to_string_lossy().to_string());
    let code = run(full);
    let body = std::fs::read_to_string(&tmp).unwrap_or_default();
    let _ = std::fs::remove_file(&tmp);
    (code, body)
}
