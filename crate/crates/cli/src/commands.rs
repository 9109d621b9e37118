use std::path::Path;
use std::process::ExitCode;

use serde::Serialize;
use serde_json::{json, Value};

use rncplus::automata::{equivalent, net_equivalent, Automaton, Equivalence, SweepConfig};
use rncplus::dynamics::GroundedNet;
use rncplus::extraction::{extract, verify_extraction, ExtractionReport, Verdict};
use rncplus::fixtures::{brute_membership, catalog, fixture, FixtureKind};
use rncplus::io::{from_json_str, load_json, save_json, to_stable_json, write_text};
use rncplus::tanh_analysis::{classify, fixpoints, pivots, stationary_points, NeuronShape};

use crate::error::CliError;
use crate::{Cli, Command, SweepArgs};

type Outcome = Result<ExitCode, CliError>;

fn holds(ok: bool) -> ExitCode {
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

/// Prints `value` as JSON, or `text` in human mode.
fn emit<T: Serialize>(cli: &Cli, value: &T, text: impl FnOnce() -> String) -> Result<(), CliError> {
    if cli.json {
        print!("{}", to_stable_json(value)?);
    } else {
        println!("{}", text());
    }
    Ok(())
}

fn load_net(path: &Path) -> Result<GroundedNet, CliError> {
    load_json(path).map_err(CliError::from)
}

/// Loads an automaton, or the flat automaton of an extraction report.
fn load_automaton(path: &Path) -> Result<Automaton, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    match from_json_str::<Automaton>(&text, path) {
        Ok(a) => Ok(a),
        Err(first) => match from_json_str::<ExtractionReport>(&text, path) {
            Ok(r) => Ok(r.flat),
            Err(_) => Err(first.into()),
        },
    }
}

fn sweep_config(s: &SweepArgs) -> SweepConfig {
    SweepConfig {
        max_len: s.max_len,
        random_trials: s.trials,
        seed: s.seed,
        jobs: s.jobs,
    }
}

fn word_text(word: &[String]) -> String {
    if word.is_empty() {
        "(empty word)".to_string()
    } else {
        word.join(" ")
    }
}

fn report_equivalence(cli: &Cli, eq: &Equivalence) -> Outcome {
    emit(cli, eq, || match eq {
        Equivalence::Equal => "equal".to_string(),
        Equivalence::Counterexample(c) => format!(
            "counterexample: {}\n  left outputs {}, right outputs {}",
            word_text(&c.word),
            c.left,
            c.right
        ),
    })?;
    Ok(holds(eq.is_equal()))
}

pub fn run(cli: &Cli) -> Outcome {
    match &cli.command {
        Command::Simulate { net, word } => {
            let g = load_net(net).map_err(|e| e.context("--net"))?;
            let letters = word.letters();
            let out = g.run(&letters).map_err(|e| CliError::from(e).context("--word"))?;
            let outputs = out
                .trajectory
                .iter()
                .map(|x| g.output_letter(x).map(str::to_string))
                .collect::<Result<Vec<_>, _>>()?;
            let value = json!({
                "word": letters,
                "trajectory": out.trajectory,
                "outputs": outputs,
                "output": out.output,
            });
            emit(cli, &value, || {
                let mut s = String::new();
                for (t, (x, o)) in out.trajectory.iter().zip(&outputs).enumerate() {
                    let letter = if t == 0 { "" } else { letters[t - 1] };
                    s.push_str(&format!("{t:>4} {letter:>8} {x:?} -> {o}\n"));
                }
                s.push_str(&format!("output: {}", out.output));
                s
            })?;
            Ok(ExitCode::SUCCESS)
        }

        Command::Settle {
            net,
            state,
            word,
            numeric,
        } => {
            let g = load_net(net).map_err(|e| e.context("--net"))?;
            let x = match state {
                Some(s) => s
                    .split_whitespace()
                    .map(|t| t.parse::<f64>())
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(|e| CliError::Usage(format!("--state: {e}")))?,
                None => g
                    .run(&word.letters())
                    .map_err(|e| CliError::from(e).context("--word"))?
                    .trajectory
                    .pop()
                    .expect("trajectory holds the initial state"),
            };
            let settled = g.settle(&x, numeric.tol, numeric.max_iter)?;
            let output = g.output_letter(&settled.limit)?.to_string();
            let value = json!({
                "state": x,
                "limit": settled.limit,
                "steps": settled.steps,
                "output": output,
                "tol": numeric.tol,
            });
            emit(cli, &value, || {
                format!("limit {:?} after {} steps, output {output}", settled.limit, settled.steps)
            })?;
            Ok(ExitCode::SUCCESS)
        }

        Command::AnalyzeNeuron {
            weight,
            offset,
            tol,
            margin,
        } => {
            let shape = NeuronShape::new(*weight)?;
            let pv = pivots(*weight).ok();
            let mut value = json!({
                "weight": weight,
                "regime": format!("{:?}", shape.regime()),
                "pivots": pv,
            });
            let mut text = format!("w = {weight}: {:?}", shape.regime());
            if let Some(p) = &pv {
                text.push_str(&format!(
                    "\npivots p- = {}, p+ = {}\noffsets v- = {}, v+ = {}",
                    p.p_minus, p.p_plus, p.v_minus, p.v_plus
                ));
            }
            if let Some(v) = offset {
                let fp = fixpoints(*weight, *v, *tol);
                let (s1, s2) = stationary_points(*weight, *v).map_or((None, None), |(a, b)| (Some(a), Some(b)));
                let classes: Vec<Value> = fp
                    .points
                    .iter()
                    .map(|&x| match &pv {
                        Some(p) => json!(classify(x, p, *margin).digit().map(|d| d.value())),
                        None => Value::Null,
                    })
                    .collect();
                value["offset"] = json!(v);
                value["fixpoints"] = json!(fp.points);
                value["digits"] = json!(classes);
                value["stationary_points"] = json!(s1.zip(s2).map(|(a, b)| [a, b]));
                value["tol"] = json!(tol);
                text.push_str(&format!("\nfixpoints at v = {v}: {:?}", fp.points));
                if let (Some(a), Some(b)) = (s1, s2) {
                    text.push_str(&format!("\nstationary points {a}, {b}"));
                }
            }
            emit(cli, &value, || text)?;
            Ok(ExitCode::SUCCESS)
        }

        Command::Extract {
            net,
            out,
            dot,
            extraction,
        } => {
            let g = load_net(net).map_err(|e| e.context("--net"))?;
            let report = extract(&g, &extraction.config())?;
            if let Some(path) = out {
                save_json(path, &report).map_err(|e| CliError::from(e).context("--out"))?;
            }
            if let Some(path) = dot {
                write_text(path, &report.flat.to_dot()).map_err(|e| CliError::from(e).context("--dot"))?;
            }
            emit(cli, &report, || {
                let tuples: Vec<String> = report.representatives.iter().map(|r| r.tuple.to_string()).collect();
                format!(
                    "{} reached tuples (bound {}): {}\nminimal automaton: {} states\ndiagnostics: {}{}",
                    report.state_count,
                    report.state_bound(),
                    tuples.join(" "),
                    report.flat.minimize().num_states(),
                    report.diagnostics.len(),
                    if report.is_sound() { "" } else { " (UNSOUND)" }
                )
            })?;
            Ok(ExitCode::SUCCESS)
        }

        Command::Verify {
            net,
            report,
            extraction,
            sweep,
        } => {
            let g = load_net(net).map_err(|e| e.context("--net"))?;
            let report: ExtractionReport = match report {
                Some(path) => load_json(path).map_err(|e| CliError::from(e).context("--report"))?,
                None => extract(&g, &extraction.config())?,
            };
            let summary = verify_extraction(&g, &report, &sweep_config(sweep));
            emit(cli, &summary, || {
                let mut s = format!("{:?}", summary.verdict).to_uppercase();
                for c in &summary.checks {
                    s.push_str(&format!(
                        "\n  {} {}: {}",
                        if c.passed { "ok  " } else { "FAIL" },
                        c.name,
                        c.detail
                    ));
                    if let Some(cx) = &c.counterexample {
                        s.push_str(&format!("\n       on {}", word_text(&cx.word)));
                    }
                }
                s
            })?;
            Ok(holds(summary.verdict == Verdict::Pass))
        }

        Command::Minimize { automaton, out } => {
            let a = load_automaton(automaton).map_err(|e| e.context("--automaton"))?;
            let m = a.minimize();
            if let Some(path) = out {
                save_json(path, &m).map_err(|e| CliError::from(e).context("--out"))?;
                emit(cli, &json!({"states": a.num_states(), "minimal_states": m.num_states()}), || {
                    format!("{} states -> {} states", a.num_states(), m.num_states())
                })?;
            } else {
                print!("{}", to_stable_json(&m)?);
            }
            Ok(ExitCode::SUCCESS)
        }

        Command::CheckIdentity { automaton, letter } => {
            let a = load_automaton(automaton).map_err(|e| e.context("--automaton"))?;
            if let Some(l) = letter {
                if !a.alphabet().contains(l) {
                    return Err(CliError::Usage(format!("--letter: {l:?} is not in the alphabet")));
                }
            }
            let ids = a.identity_letters();
            let ok = match letter {
                Some(l) => ids.contains(l),
                None => !ids.is_empty(),
            };
            emit(cli, &json!({"identity_letters": ids, "holds": ok}), || {
                if ids.is_empty() {
                    "no identity letter".to_string()
                } else {
                    format!("identity letters: {}", ids.join(" "))
                }
            })?;
            Ok(holds(ok))
        }

        Command::CheckAperiodic { automaton, cap } => {
            let a = load_automaton(automaton).map_err(|e| e.context("--automaton"))?;
            let r = a.aperiodicity(*cap)?;
            emit(cli, &r, || match &r.witness {
                None => format!(
                    "aperiodic ({} minimal states, monoid of {} elements)",
                    r.minimal_states, r.monoid_size
                ),
                Some(w) => format!(
                    "not aperiodic: {} induces {:?}, whose powers cycle with period {}",
                    word_text(&w.word),
                    w.transformation.0,
                    w.period
                ),
            })?;
            Ok(holds(r.aperiodic))
        }

        Command::Equiv {
            automaton,
            other,
            net,
            sweep,
        } => {
            let a = load_automaton(automaton).map_err(|e| e.context("--automaton"))?;
            let eq = match (other, net) {
                (Some(path), _) => {
                    let b = load_automaton(path).map_err(|e| e.context("--other"))?;
                    equivalent(&a, &b)?
                }
                (None, Some(path)) => {
                    let g = load_net(path).map_err(|e| e.context("--net"))?;
                    net_equivalent(&g, &a, &sweep_config(sweep))?
                }
                (None, None) => return Err(CliError::Usage("equiv needs --other or --net".into())),
            };
            report_equivalence(cli, &eq)
        }

        Command::Fixtures { name, out, word } => {
            let Some(name) = name else {
                let entries: Vec<Value> = catalog()
                    .iter()
                    .map(|e| {
                        json!({
                            "name": e.name,
                            "kind": if e.net().is_some() { "net" } else { "automaton" },
                            "description": e.description,
                            "oracle": e.oracle,
                        })
                    })
                    .collect();
                emit(cli, &entries, || {
                    catalog()
                        .iter()
                        .map(|e| {
                            let kind = if e.net().is_some() { "net" } else { "automaton" };
                            format!("{:<20} {:<10} {}", e.name, kind, e.description)
                        })
                        .collect::<Vec<_>>()
                        .join("\n")
                })?;
                return Ok(ExitCode::SUCCESS);
            };
            let entry = fixture(name).map_err(|e| CliError::from(e).context("--name"))?;
            if let Some(path) = out {
                match &entry.kind {
                    FixtureKind::Dfa(a) => save_json(path, a),
                    FixtureKind::Net { net, .. } => save_json(path, net),
                }
                .map_err(|e| CliError::from(e).context("--out"))?;
            }
            if let Some(w) = word {
                let letters: Vec<&str> = w.split_whitespace().collect();
                let output = brute_membership(entry.oracle, &letters).map_err(|e| CliError::from(e).context("--word"))?;
                emit(cli, &json!({"name": name, "word": letters, "output": output}), || output.clone())?;
            } else if out.is_none() {
                match &entry.kind {
                    FixtureKind::Dfa(a) => print!("{}", to_stable_json(a)?),
                    FixtureKind::Net { net, .. } => print!("{}", to_stable_json(net)?),
                }
            }
            Ok(ExitCode::SUCCESS)
        }

        Command::ExportDot { automaton, dot } => {
            let a = load_automaton(automaton).map_err(|e| e.context("--automaton"))?;
            let text = a.to_dot();
            match dot {
                Some(path) => write_text(path, &text).map_err(|e| CliError::from(e).context("--dot"))?,
                None => print!("{text}"),
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}
