//! `rk`: curves, Richelot steps, invariants, Jacobian classes, towers, the
//! top simulator and the numeric verification suites, all as JSON.

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use rk_core::genus2::richelot_transform;
use rk_core::igusa::igusa_clebsch;
use rk_core::jacobian::{cantor_add, two_torsion_from_factor, MumfordClass};
use rk_core::kowtop::{curve_c1, curve_c2, integrate_top, invariants_of, TopState};
use rk_core::numverify::{
    dubrovin_check, flow_transport_check, kernel_check, mult2_check, top_to_curve_check, trace_check, DoubleDouble,
    FlowState,
};
use rk_core::tower::choose_splitting;
use rk_core::{build_tower, tower_report, Error, Poly, Rational, Report, Strategy, TowerMode, TowerOptions};

const SCHEMA: &str = "rk-1";

#[derive(Parser)]
#[command(name = "rk", version, about = "Richelot isogenies and the Kowalewski top")]
struct Cli {
    /// Write the JSON output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// The curves C1, C2 and the canonical splitting of C2.
    Curves(Params),
    /// One Richelot step on C1 or C2.
    Richelot {
        #[command(flatten)]
        p: Params,
        #[arg(long, value_enum, default_value = "c2")]
        curve: CurveId,
        #[arg(long, value_enum)]
        splitting: Option<SplitChoice>,
    },
    /// Igusa-Clebsch invariants, weighted and absolute.
    Igusa {
        #[command(flatten)]
        p: Params,
        #[arg(long, value_enum, default_value = "c2")]
        curve: CurveId,
    },
    /// Two-torsion classes of the canonical splitting on C2, or a given
    /// Mumford class and its double.
    Jacobian {
        #[command(flatten)]
        p: Params,
        /// Coefficients of u, constant term first, comma separated.
        #[arg(long, requires = "v", value_parser = parse_coeffs, allow_hyphen_values = true)]
        u: Option<Coeffs>,
        #[arg(long, requires = "u", value_parser = parse_coeffs, allow_hyphen_values = true)]
        v: Option<Coeffs>,
    },
    /// A chain of (2,2)-isogenies ending with Jac(C2) -> Jac(C1).
    Tower {
        #[command(flatten)]
        p: Params,
        #[arg(long, default_value_t = 5)]
        depth: usize,
        #[arg(long, default_value = "real-numeric", value_parser = parse_mode)]
        mode: TowerMode,
        #[arg(long, default_value = "paired-real-roots", value_parser = parse_strategy)]
        strategy: Strategy,
        /// Random classes per edge for the doubling check.
        #[arg(long, default_value_t = 5)]
        samples: usize,
        #[command(flatten)]
        num: Numeric,
    },
    /// The rigid-body simulator.
    Top {
        #[command(subcommand)]
        cmd: TopCmd,
    },
    /// Numeric verification suites.
    Verify {
        #[command(subcommand)]
        cmd: VerifyCmd,
    },
}

#[derive(Subcommand)]
enum TopCmd {
    /// RK4 trajectory as JSON lines, followed by a summary line.
    Simulate {
        #[command(flatten)]
        s: TopArgs,
        #[arg(long, default_value_t = 10.0)]
        t_end: f64,
        #[arg(long, default_value_t = 1e-3)]
        dt: f64,
        /// Keep every n-th step.
        #[arg(long, default_value_t = 100)]
        every: usize,
        #[arg(long, value_enum, default_value = "json")]
        report: ReportFormat,
    },
}

#[derive(Subcommand)]
enum VerifyCmd {
    /// Z followed by its dual against Cantor doubling on Jac(C1).
    Mult2 {
        #[command(flatten)]
        p: Params,
        #[arg(long, default_value_t = 20)]
        samples: usize,
        #[command(flatten)]
        num: Numeric,
    },
    /// Trace of S(x)dx/y against its pullback for S in {1, X, X²}.
    Trace {
        #[command(flatten)]
        p: Params,
        #[arg(long, default_value_t = 20)]
        samples: usize,
        #[command(flatten)]
        num: Numeric,
    },
    /// The kernel classes [G1], [G2], [G3] die under Z.
    Kernel {
        #[command(flatten)]
        p: Params,
        #[command(flatten)]
        num: Numeric,
    },
    /// Abel sums of the Dubrovin flow on C2.
    Dubrovin {
        #[command(flatten)]
        p: Params,
        #[command(flatten)]
        f: FlowArgs,
        #[command(flatten)]
        num: Numeric,
    },
    /// Abel sums of the Dubrovin flow pushed to C1.
    Flow {
        #[command(flatten)]
        p: Params,
        #[command(flatten)]
        f: FlowArgs,
        #[command(flatten)]
        num: Numeric,
    },
    /// Physical flow of the top read through the xi chart on C1.
    Top {
        #[command(flatten)]
        s: TopArgs,
        /// Expected H of the state, checked when given.
        #[arg(long = "H", value_parser = parse_rational, allow_hyphen_values = true)]
        h: Option<Rational>,
        /// Expected I2 of the state, checked when given.
        #[arg(long = "I2", value_parser = parse_rational, allow_hyphen_values = true)]
        i2: Option<Rational>,
        #[arg(long, default_value_t = 2.0)]
        t_end: f64,
        #[arg(long, default_value_t = 1e-3)]
        dt: f64,
        /// Samples with |l2| below this are skipped.
        #[arg(long, default_value_t = 1e-2)]
        mask: f64,
        #[command(flatten)]
        num: Numeric,
    },
}

#[derive(Args, Clone)]
struct Params {
    #[arg(long = "H", value_parser = parse_rational, allow_hyphen_values = true)]
    h: Rational,
    #[arg(long = "I2", value_parser = parse_rational, allow_hyphen_values = true)]
    i2: Rational,
}

#[derive(Args, Clone)]
struct Numeric {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Mantissa bits: up to 53 runs in hardware doubles, up to 106 in
    /// double-double.
    #[arg(long, env = "RK_PRECISION_BITS", default_value_t = 53, value_parser = clap::value_parser!(u32).range(1..=106))]
    precision: u32,
    #[arg(long, value_enum, default_value = "json")]
    report: ReportFormat,
}

#[derive(Args, Clone)]
struct FlowArgs {
    #[arg(long, default_value_t = -0.3, allow_negative_numbers = true)]
    x1: f64,
    #[arg(long, default_value_t = -2.7, allow_negative_numbers = true)]
    x2: f64,
    #[arg(long, default_value_t = 0.5)]
    t_end: f64,
    #[arg(long, default_value_t = 1e-4)]
    dt: f64,
}

#[derive(Args, Clone)]
struct TopArgs {
    #[arg(long, default_value = "1,0,1", value_parser = parse_vec3, allow_hyphen_values = true)]
    l: [f64; 3],
    #[arg(long, default_value = "0,1,0", value_parser = parse_vec3, allow_hyphen_values = true)]
    g: [f64; 3],
}

#[derive(Clone, Copy, ValueEnum)]
enum CurveId {
    C1,
    C2,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum SplitChoice {
    Canonical,
    Auto,
}

#[derive(Clone, Copy, ValueEnum)]
enum ReportFormat {
    Json,
}

fn parse_rational(s: &str) -> Result<Rational, String> {
    if s.contains(['.', 'e', 'E']) {
        return Err(format!("{s:?} is a float; give an exact rational p/q"));
    }
    s.parse::<Rational>().map_err(|e| e.to_string())
}

#[derive(Clone)]
struct Coeffs(Vec<Rational>);

fn parse_coeffs(s: &str) -> Result<Coeffs, String> {
    s.split(',').map(parse_rational).collect::<Result<_, _>>().map(Coeffs)
}

fn parse_vec3(s: &str) -> Result<[f64; 3], String> {
    let v: Vec<f64> = s.split(',').map(|t| t.trim().parse::<f64>().map_err(|e| format!("{t:?}: {e}"))).collect::<Result<_, _>>()?;
    v.try_into().map_err(|_| format!("expected three comma-separated numbers, got {s:?}"))
}

fn parse_mode(s: &str) -> Result<TowerMode, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_strategy(s: &str) -> Result<Strategy, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// Run `$body` with `T` bound to the float type for `$bits`.
macro_rules! at_precision {
    ($bits:expr, $body:expr) => {
        if $bits <= 53 {
            #[allow(dead_code)]
            type T = f64;
            $body
        } else {
            #[allow(dead_code)]
            type T = DoubleDouble;
            $body
        }
    };
}

fn params_json(p: &Params) -> Value {
    json!({ "H": p.h, "I2": p.i2 })
}

fn with_schema(v: Value) -> Value {
    let mut m = Map::new();
    m.insert("schema".into(), SCHEMA.into());
    match v {
        Value::Object(o) => m.extend(o),
        other => {
            m.insert("result".into(), other);
        }
    }
    Value::Object(m)
}

fn report(r: Report) -> Result<Value, Error> {
    Ok(serde_json::to_value(r).expect("reports serialize"))
}

fn top_state(a: &TopArgs) -> TopState<f64> {
    TopState::new(a.l, a.g)
}

fn run(cmd: Cmd) -> Result<Value, Error> {
    match cmd {
        Cmd::Curves(p) => {
            let c1 = curve_c1(&p.h, &p.i2)?;
            let (c2, s) = curve_c2(&p.h, &p.i2)?;
            Ok(json!({ "params": params_json(&p), "c1": c1, "c2": c2, "splitting": s }))
        }
        Cmd::Richelot { p, curve, splitting } => {
            let (c, s) = match curve {
                CurveId::C2 => {
                    let (c, canon) = curve_c2(&p.h, &p.i2)?;
                    let s = match splitting {
                        Some(SplitChoice::Auto) => choose_splitting(c.f(), Strategy::LexicographicExact)?,
                        _ => canon,
                    };
                    (c, s)
                }
                CurveId::C1 => {
                    if splitting == Some(SplitChoice::Canonical) {
                        return Err(Error::NoSplitting("the canonical splitting is defined on C2; use --splitting auto".into()));
                    }
                    let c = curve_c1(&p.h, &p.i2)?;
                    let s = choose_splitting(c.f(), Strategy::LexicographicExact)?;
                    (c, s)
                }
            };
            let out = richelot_transform(&c, &s)?;
            let mut v = json!({ "params": params_json(&p), "curve": c, "splitting": s, "richelot": out });
            if matches!(curve, CurveId::C2) {
                if let Some((a, twist)) = out.image.affine_twist_to(&curve_c1(&p.h, &p.i2)?) {
                    v["image_to_c1"] = json!({ "shift": a, "twist": twist });
                }
            }
            Ok(v)
        }
        Cmd::Igusa { p, curve } => {
            let f = match curve {
                CurveId::C1 => curve_c1(&p.h, &p.i2)?.f().clone(),
                CurveId::C2 => curve_c2(&p.h, &p.i2)?.0.f().clone(),
            };
            let inv = igusa_clebsch(&f)?;
            Ok(json!({ "params": params_json(&p), "weighted": inv.weighted, "absolute": inv.absolute() }))
        }
        Cmd::Jacobian { p, u, v } => {
            let (c, s) = curve_c2(&p.h, &p.i2)?;
            match (u, v) {
                (Some(u), Some(v)) => {
                    let a = MumfordClass::make(Poly::new(u.0), Poly::new(v.0), &c)?;
                    let d = a.double(&c)?;
                    Ok(json!({
                        "params": params_json(&p),
                        "curve_id": "c2",
                        "class": a,
                        "double": d,
                        "order_divides_2": d.is_identity(),
                    }))
                }
                _ => {
                    let t: Vec<_> = s.factors().iter().map(|g| two_torsion_from_factor(g, &c)).collect::<Result<_, _>>()?;
                    let sum12 = cantor_add(&t[0].class, &t[1].class, &c)?;
                    let doubles: Vec<bool> =
                        t.iter().map(|x| x.class.double(&c).map(|d| d.is_identity())).collect::<Result<_, _>>()?;
                    Ok(json!({
                        "params": params_json(&p),
                        "curve_id": "c2",
                        "torsion": t,
                        "doubles_to_identity": doubles,
                        "g1_plus_g2": sum12,
                        "g1_plus_g2_is_g3": sum12 == t[2].class,
                    }))
                }
            }
        }
        Cmd::Tower { p, depth, mode, strategy, samples, num } => {
            let opts = TowerOptions { mode, strategy, mult2_samples: samples, seed: num.seed, ..Default::default() };
            at_precision!(num.precision, {
                let t = build_tower::<T>(&p.h, &p.i2, depth, &opts)?;
                Ok(serde_json::to_value(tower_report(&t)).expect("tower reports serialize"))
            })
        }
        Cmd::Top { .. } => unreachable!("handled by run_top"),
        Cmd::Verify { cmd } => verify(cmd),
    }
}

fn verify(cmd: VerifyCmd) -> Result<Value, Error> {
    match cmd {
        VerifyCmd::Mult2 { p, samples, num } => {
            at_precision!(num.precision, report(mult2_check::<T>(&p.h, &p.i2, samples, num.seed)?))
        }
        VerifyCmd::Trace { p, samples, num } => {
            at_precision!(num.precision, report(trace_check::<T>(&p.h, &p.i2, samples, num.seed)?))
        }
        VerifyCmd::Kernel { p, num } => at_precision!(num.precision, report(kernel_check::<T>(&p.h, &p.i2)?)),
        VerifyCmd::Dubrovin { p, f, num } => at_precision!(num.precision, {
            let init = FlowState::<T>::on_c2(&p.h, &p.i2, f.x1, f.x2)?;
            report(dubrovin_check::<T>(&p.h, &p.i2, init, f.t_end, f.dt)?)
        }),
        VerifyCmd::Flow { p, f, num } => at_precision!(num.precision, {
            let init = FlowState::<T>::on_c2(&p.h, &p.i2, f.x1, f.x2)?;
            report(flow_transport_check::<T>(&p.h, &p.i2, init, f.t_end, f.dt)?)
        }),
        VerifyCmd::Top { s, h, i2, t_end, dt, mask, num } => {
            if num.precision > 53 {
                return Err(Error::Numeric("the top integrator runs in hardware doubles only".into()));
            }
            let s0 = top_state(&s);
            let inv = invariants_of(&s0);
            for (name, want, got) in [("H", &h, inv.h), ("I2", &i2, inv.i2)] {
                if let Some(w) = want {
                    if (w.to_f64() - got).abs() > 1e-9 * (1.0 + got.abs()) {
                        return Err(Error::Constraint(format!("the state has {name} = {got}, not {w:?}")));
                    }
                }
            }
            report(top_to_curve_check(&s0, t_end, dt, mask)?)
        }
    }
}

/// JSON lines: one per kept sample, then the summary.
fn run_top(cmd: TopCmd) -> Result<String, Error> {
    let TopCmd::Simulate { s, t_end, dt, every, report: _ } = cmd;
    let s0 = top_state(&s);
    let traj = integrate_top(&s0, t_end, dt, every)?;
    let mut out = String::new();
    for x in &traj.samples {
        out.push_str(&serde_json::to_string(x).expect("samples serialize"));
        out.push('\n');
    }
    let summary = with_schema(json!({
        "summary": {
            "l0": s.l,
            "g0": s.g,
            "t_end": t_end,
            "dt": dt,
            "samples": traj.samples.len(),
            "drift": traj.drift,
            "max_drift": traj.drift.max(),
            "precision_bits": 53,
        }
    }));
    out.push_str(&serde_json::to_string(&summary).expect("json"));
    out.push('\n');
    Ok(out)
}

fn emit(out: &Option<PathBuf>, text: &str) -> std::io::Result<()> {
    match out {
        Some(path) => fs::write(path, text),
        None => std::io::stdout().lock().write_all(text.as_bytes()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    let text = match cli.cmd {
        Cmd::Top { cmd } => run_top(cmd),
        cmd => run(cmd).map(|v| serde_json::to_string_pretty(&with_schema(v)).expect("json") + "\n"),
    };
    match text {
        Ok(t) => match emit(&cli.out, &t) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(1)
            }
        },
        Err(e) => {
            let msg = serde_json::to_string(&json!({ "schema": SCHEMA, "error": e.to_string() })).expect("json");
            eprintln!("{msg}");
            ExitCode::from(1)
        }
    }
}
