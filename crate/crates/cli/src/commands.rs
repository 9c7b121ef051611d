use serde_json::{json, Map, Value};

use netwit::catalog::{build, named_state, BuildParams, Family, Instance};
use netwit::eigen::min_eigenvalue;
use netwit::graph::{
    cl4_label_set, graph_measurement_circuit, graph_network, graph_state_circuit, graph_witness,
    Graph, GraphLabel, MAX_PROTOCOL_VERTICES,
};
use netwit::network::{ppt_report, reconstruct_witness, NetworkState};
use netwit::protocol::{detect_exact, detect_shots, Verdict};
use netwit::report::Report;
use netwit::seesaw::SeesawConfig;
use netwit::tolerance;
use netwit::witness::{cyclic_inequality_check, LambdaVec, DEFAULT_CYCLIC_TRIALS};
use netwit::zoo::find_choi_detected_ppt;
use netwit::{DensityOperator, Error, Result};

use crate::{
    Cmd, FamilyArgs, GraphCmd, NetworkCmd, OutputArgs, ProtocolCmd, ScanCmd, VerifyCmd, WitnessCmd,
};

fn to_value<T: serde::Serialize>(x: &T) -> Result<Value> {
    serde_json::to_value(x).map_err(|e| Error::Io(e.to_string()))
}

fn params(fam: &FamilyArgs) -> Result<BuildParams> {
    let lambda = fam
        .lambda
        .as_ref()
        .map(|l| LambdaVec::new(l.values()))
        .transpose()?;
    Ok(BuildParams {
        d: fam.d,
        lambda,
        seed: fam.seed,
    })
}

fn instance(fam: &FamilyArgs) -> Result<(Instance, Map<String, Value>)> {
    let inst = build(fam.family, &params(fam)?)?;
    let mut inputs = Map::new();
    inputs.insert("family".into(), json!(fam.family.name()));
    inputs.insert("d".into(), json!(inst.witness.dims()[0]));
    inputs.insert("layer_dims".into(), json!(inst.network.layer_dims()));
    inputs.insert("seed".into(), json!(fam.seed));
    if let Some(l) = &fam.lambda {
        inputs.insert("lambda".into(), json!(l.texts()));
        inputs.insert("lambda_values".into(), json!(l.values()));
    }
    Ok((inst, inputs))
}

/// Largest entrywise gap between the contraction and `c · targetᵀ`.
fn reconstruction_error(net: &NetworkState, eta: f64) -> Result<f64> {
    let got = reconstruct_witness(net, eta)?;
    let want = net.target().transpose().scale(net.recon_constant());
    Ok(got.max_abs_diff(&want))
}

pub fn dispatch(cmd: Cmd) -> Result<(Report, OutputArgs)> {
    match cmd {
        Cmd::Witness(WitnessCmd::Build { fam, restarts, out }) => {
            Ok((witness_build(&fam, restarts)?, out))
        }
        Cmd::Network(NetworkCmd::Build {
            fam,
            no_matrix,
            out,
        }) => Ok((network_build(&fam, no_matrix)?, out)),
        Cmd::Verify(VerifyCmd::Reconstruction { fam, eta, out }) => {
            let (inst, mut inputs) = instance(&fam)?;
            let eta_value = match &eta {
                Some(r) => {
                    inputs.insert("eta".into(), json!(r.text));
                    r.value
                }
                None => inst.network.eta(),
            };
            inputs.insert("eta_value".into(), json!(eta_value));
            let err = reconstruction_error(&inst.network, eta_value)?;
            let ok = err <= tolerance::RECONSTRUCTION;
            let outputs = json!({
                "network_eta": inst.network.eta(),
                "recon_constant": inst.network.recon_constant(),
                "max_abs_error": err,
                "tolerance": tolerance::RECONSTRUCTION,
                "pass": ok,
            });
            Ok((
                Report::new("verify reconstruction", Value::Object(inputs), outputs, ok),
                out,
            ))
        }
        Cmd::Verify(VerifyCmd::Ppt {
            fam,
            require_ppt,
            require_npt,
            out,
        }) => Ok((verify_ppt(&fam, &require_ppt, &require_npt)?, out)),
        Cmd::Protocol(ProtocolCmd::Run { fam, state, out }) => {
            let (inst, mut inputs) = instance(&fam)?;
            let rho = named_state(&state.state, inst.network.layer_dims(), fam.seed)?;
            inputs.insert("state".into(), json!(state.state));
            let report = detect_exact(&rho, &inst.network, &inst.witness)?;
            Ok((
                Report::new(
                    "protocol run",
                    Value::Object(inputs),
                    to_value(&report)?,
                    true,
                ),
                out,
            ))
        }
        Cmd::Protocol(ProtocolCmd::Shots {
            fam,
            state,
            shots,
            out,
        }) => {
            let (inst, mut inputs) = instance(&fam)?;
            let rho = named_state(&state.state, inst.network.layer_dims(), fam.seed)?;
            inputs.insert("state".into(), json!(state.state));
            inputs.insert("shots".into(), json!(shots));
            let report = detect_shots(&rho, &inst.network, &inst.witness, shots, fam.seed)?;
            Ok((
                Report::new(
                    "protocol shots",
                    Value::Object(inputs),
                    to_value(&report)?,
                    true,
                ),
                out,
            ))
        }
        Cmd::Scan(ScanCmd::ChoiBoundEntangled {
            resolution,
            seed,
            out,
        }) => Ok((scan_choi(resolution as usize, seed)?, out)),
        Cmd::Graph(GraphCmd::Demo { graph, labels, out }) => {
            Ok((graph_demo(graph.as_deref(), labels.as_deref())?, out))
        }
    }
}

fn witness_build(fam: &FamilyArgs, restarts: usize) -> Result<Report> {
    let (inst, mut inputs) = instance(fam)?;
    inputs.insert("restarts".into(), json!(restarts));
    let w = &inst.witness;
    let mut outputs = Map::new();
    outputs.insert("witness".into(), to_value(&w.descriptor())?);
    outputs.insert("trace".into(), json!(w.matrix().trace().re));
    outputs.insert("min_eigenvalue".into(), json!(min_eigenvalue(w.matrix())?));
    let mut ok = true;
    if restarts > 0 {
        let cfg = SeesawConfig {
            restarts,
            seed: fam.seed,
            ..SeesawConfig::default()
        };
        let floor = w.sep_floor(cfg)?;
        let pass = floor.value >= tolerance::SEP_FLOOR;
        ok &= pass;
        outputs.insert(
            "sep_floor".into(),
            json!({"value": floor.value, "best_restart": floor.restart, "bound": tolerance::SEP_FLOOR, "pass": pass}),
        );
    }
    if let Some(lv) = w.lambda() {
        let check = cyclic_inequality_check(lv, DEFAULT_CYCLIC_TRIALS, fam.seed)?;
        ok &= check.pass;
        outputs.insert("cyclic".into(), to_value(&check)?);
    }
    Ok(Report::new(
        "witness build",
        Value::Object(inputs),
        Value::Object(outputs),
        ok,
    ))
}

fn network_build(fam: &FamilyArgs, no_matrix: bool) -> Result<Report> {
    let (inst, inputs) = instance(fam)?;
    let net = &inst.network;
    let err = reconstruction_error(net, net.eta())?;
    let ok = err <= tolerance::RECONSTRUCTION;
    let mut outputs = Map::new();
    let mut desc = to_value(&net.descriptor())?;
    if no_matrix {
        if let Value::Object(m) = &mut desc {
            m.remove("state");
        }
    }
    outputs.insert("network".into(), desc);
    outputs.insert("layer_dims".into(), json!(net.layer_dims()));
    outputs.insert("trace".into(), json!(net.state().as_matrix().trace().re));
    outputs.insert(
        "min_eigenvalue".into(),
        json!(min_eigenvalue(net.state().as_matrix())?),
    );
    outputs.insert("reconstruction_error".into(), json!(err));
    Ok(Report::new(
        "network build",
        Value::Object(inputs),
        Value::Object(outputs),
        ok,
    ))
}

fn verify_ppt(fam: &FamilyArgs, want_ppt: &[String], want_npt: &[String]) -> Result<Report> {
    let (inst, mut inputs) = instance(fam)?;
    inputs.insert("require_ppt".into(), json!(want_ppt));
    inputs.insert("require_npt".into(), json!(want_npt));
    let cuts = ppt_report(inst.network.state())?;
    let pick = |label: &str| -> Result<Vec<usize>> {
        if label == "all" {
            return Ok((0..cuts.len()).collect());
        }
        cuts.iter()
            .position(|c| c.label == label)
            .map(|i| vec![i])
            .ok_or_else(|| {
                let known: Vec<&str> = cuts.iter().map(|c| c.label.as_str()).collect();
                Error::InvalidArgument(format!(
                    "unknown cut '{label}' (known: {})",
                    known.join(", ")
                ))
            })
    };
    let mut checks = Vec::new();
    for (labels, expect_ppt) in [(want_ppt, true), (want_npt, false)] {
        for label in labels {
            for i in pick(label)? {
                let c = &cuts[i];
                let pass = c.is_ppt() == expect_ppt;
                checks.push(json!({
                    "label": c.label,
                    "expect": if expect_ppt { "ppt" } else { "npt" },
                    "pass": pass,
                }));
            }
        }
    }
    let ok = checks.iter().all(|c| c["pass"] == true);
    let rows: Vec<Value> = cuts
        .iter()
        .map(|c| json!({"label": c.label, "side": c.side, "min_eig": c.min_eig, "ppt": c.is_ppt()}))
        .collect();
    let outputs = json!({
        "cuts": rows,
        "all_ppt": cuts.iter().all(|c| c.is_ppt()),
        "ppt_floor": tolerance::PPT_FLOOR,
        "checks": checks,
    });
    Ok(Report::new(
        "verify ppt",
        Value::Object(inputs),
        outputs,
        ok,
    ))
}

fn scan_choi(resolution: usize, seed: u64) -> Result<Report> {
    let inputs = json!({"resolution": resolution, "seed": seed});
    let scan = find_choi_detected_ppt(resolution, seed)?;
    let mut outputs = Map::new();
    outputs.insert("scan".into(), to_value(&scan)?);
    let mut ok = scan.found;
    if let Some(best) = &scan.best {
        let inst = build(Family::Choi, &BuildParams::default())?;
        let report = detect_exact(&best.rho, &inst.network, &inst.witness)?;
        ok &= report.verdict == Verdict::Detected && report.singlet_fraction > 2.0 / 3.0;
        outputs.insert("protocol".into(), to_value(&report)?);
    }
    Ok(Report::new(
        "scan choi-bound-entangled",
        inputs,
        Value::Object(outputs),
        ok,
    ))
}

fn graph_demo(path: Option<&std::path::Path>, labels: Option<&str>) -> Result<Report> {
    let g = match path {
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .map_err(|e| Error::InvalidArgument(format!("{}: {e}", p.display())))?;
            serde_json::from_str::<Graph>(&text).map_err(|e| Error::InvalidGraph(e.to_string()))?
        }
        None => Graph::cl4(),
    };
    let s: Vec<GraphLabel> = match labels {
        Some(l) => l
            .split(',')
            .map(|x| x.trim().parse())
            .collect::<Result<_>>()?,
        None if path.is_none() => cl4_label_set(),
        None => {
            return Err(Error::InvalidArgument(
                "--labels is required with --graph".into(),
            ))
        }
    };
    let inputs = json!({"graph": g, "labels": s});
    let w = graph_witness(&g, &s)?;
    let sigma = DensityOperator::pure(&graph_state_circuit(&g), &[2; 1].repeat(g.n()))?;
    let expectation = w.expectation(&sigma)?;
    let mut outputs = Map::new();
    outputs.insert("witness_expectation".into(), json!(expectation));
    outputs.insert(
        "readout_p0".into(),
        json!(graph_measurement_circuit(&g, &sigma)?),
    );
    outputs.insert("label_count".into(), json!(s.len()));
    let mut ok = expectation < 0.0;
    if g.n() <= MAX_PROTOCOL_VERTICES {
        let net = graph_network(&g, &s)?;
        outputs.insert(
            "reconstruction_error".into(),
            json!(reconstruction_error(&net, net.eta())?),
        );
        let report = detect_exact(&sigma, &net, &w)?;
        ok &= report.verdict == Verdict::Detected;
        outputs.insert("protocol".into(), to_value(&report)?);
    }
    Ok(Report::new(
        "graph demo",
        inputs,
        Value::Object(outputs),
        ok,
    ))
}
