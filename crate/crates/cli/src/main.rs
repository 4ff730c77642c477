//! Command-line front end: runs named experiments and emits CSV or JSON.
//!
//! Data goes to --out (or stdout) and is byte-deterministic for a given
//! configuration; a human summary including wall time goes to stderr. The
//! environment variable STGRAPH_TOL overrides the default Newton tolerance.

use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::json;
use std::io::Write;
use std::time::Instant;
use stgraph::dynamics::{self, TrajectoryState};
use stgraph::export::{
    csv_float, opzeros_csv, spectrum_csv, spinor_to_reals, to_json_pretty, SphereGridRecord,
    TrajectoryRow, TrajectoryTable,
};
use stgraph::field::PotentialField;
use stgraph::minkowski::MinkowskiVector;
use stgraph::newton::{default_tolerance, NewtonOptions};
use stgraph::orthopoly::{self, OdeSpec};
use stgraph::solvers::{self, AtomParams};
use stgraph::sphere;

#[derive(Parser)]
#[command(name = "stgraph", version, about = "Discrete space-time graph mechanics experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Output format for the data file.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    format: Format,

    /// Write data to this path instead of stdout.
    #[arg(long, global = true)]
    out: Option<std::path::PathBuf>,
}

#[derive(Clone, Copy, ValueEnum, PartialEq)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Exact two-node ground state: energy, radius, height and residuals.
    HydrogenGround {
        #[arg(long, default_value_t = solvers::FINE_STRUCTURE)]
        alpha: f64,
        #[arg(long, default_value_t = 1.0)]
        mass: f64,
    },
    /// Level table from the coupled radial system, cross-checked against the
    /// closed form.
    HydrogenSpectrum {
        #[arg(long, default_value_t = solvers::FINE_STRUCTURE)]
        alpha: f64,
        #[arg(long, default_value_t = 1.0)]
        mass: f64,
        #[arg(long, default_value_t = 3)]
        kappa_max: i32,
        #[arg(long, default_value_t = 2)]
        nr_max: usize,
    },
    /// Harmonic-oscillator stationary point on n nodes.
    Oscillator {
        #[arg(long)]
        n: usize,
    },
    /// Free-particle jumps from a resting or boosted spinor.
    FreeParticle {
        #[arg(long, default_value_t = 1.0)]
        mass: f64,
        #[arg(long, default_value_t = 100)]
        steps: usize,
        /// Boost rapidity along z applied to the rest spinor.
        #[arg(long, default_value_t = 0.0)]
        rapidity: f64,
    },
    /// Implicit trajectory under an electromagnetic potential.
    LorentzTrajectory {
        #[arg(long, default_value_t = 1.0)]
        mass: f64,
        #[arg(long, default_value_t = 50)]
        steps: usize,
        /// Field description, e.g. {"type":"uniform_e","e0":1e-3}.
        #[arg(long)]
        field: String,
        /// Emit the full spinor history instead of the plot table (json only).
        #[arg(long, default_value_t = false)]
        spinors: bool,
    },
    /// Latitude/longitude sphere grid with stationarity report.
    SphereGrid {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        h: usize,
    },
    /// Orthogonal-polynomial zeros and weighting constants.
    Opzeros {
        #[arg(long, value_enum)]
        family: FamilyArg,
        #[arg(long)]
        n: usize,
        /// Weight exponent gamma for the laguerre family.
        #[arg(long, default_value_t = 1.0)]
        gamma: f64,
        /// Decay rate lambda for the laguerre family.
        #[arg(long, default_value_t = 1.0)]
        lambda: f64,
        /// Order of the legendre-like family.
        #[arg(long, default_value_t = 1)]
        order: u32,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyArg {
    Hermite,
    Laguerre,
    Legendre,
}

#[derive(Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
enum FieldSpec {
    None,
    UniformE {
        e0: f64,
        #[serde(default = "default_charge")]
        charge: f64,
    },
    Coulomb { alpha: f64 },
    Constant {
        a: [f64; 4],
        #[serde(default = "default_charge")]
        charge: f64,
    },
}

fn default_charge() -> f64 {
    1.0
}

impl FieldSpec {
    fn build(&self) -> PotentialField {
        match self {
            FieldSpec::None => PotentialField::zero(),
            FieldSpec::UniformE { e0, charge } => PotentialField::uniform_electric_z(*charge, *e0),
            FieldSpec::Coulomb { alpha } => PotentialField::coulomb(*alpha),
            FieldSpec::Constant { a, charge } => {
                let mut f = PotentialField::constant(MinkowskiVector::new(a[0], a[1], a[2], a[3]));
                f.charge = *charge;
                f
            }
        }
    }
}

#[derive(Serialize)]
struct Provenance {
    version: &'static str,
    newton_tolerance: f64,
}

fn provenance() -> Provenance {
    Provenance {
        version: env!("CARGO_PKG_VERSION"),
        newton_tolerance: default_tolerance(),
    }
}

fn emit(cli: &Cli, data: &str) -> std::io::Result<()> {
    match &cli.out {
        Some(path) => std::fs::write(path, data),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(data.as_bytes())
        }
    }
}

fn main() {
    let cli = Cli::parse();
    let start = Instant::now();
    match run(&cli) {
        Ok(summary) => {
            eprintln!("{summary} ({:.1} ms)", start.elapsed().as_secs_f64() * 1e3);
        }
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(1);
        }
    }
}

fn run(cli: &Cli) -> Result<String, stgraph::Error> {
    let opts = NewtonOptions::default();
    match &cli.command {
        Command::HydrogenGround { alpha, mass } => {
            let gs = solvers::ground_state_dirac(*mass, *alpha)?;
            let graph = solvers::ground_state_graph(*mass, *alpha)?;
            let field_res = graph
                .field_residuals()?
                .iter()
                .fold(0.0f64, |a, r| a.max(r.norm_max()));
            let lagr = graph.lagrangian()?;
            let data = match cli.format {
                Format::Json => to_json_pretty(&json!({
                    "command": "hydrogen-ground",
                    "params": {"alpha": alpha, "mass": mass},
                    "epsilon": gs.epsilon,
                    "radius": gs.radius,
                    "height": gs.height,
                    "residuals": {
                        "field_residual": field_res,
                        "lagrangian": lagr,
                    },
                    "provenance": provenance(),
                }))?,
                Format::Csv => format!(
                    "alpha,mass,epsilon,radius,height,field_residual\n{},{},{},{},{},{}\n",
                    csv_float(*alpha),
                    csv_float(*mass),
                    csv_float(gs.epsilon),
                    csv_float(gs.radius),
                    csv_float(gs.height),
                    csv_float(field_res),
                ),
            };
            emit(cli, &data).map_err(io_err)?;
            Ok(format!("ground state epsilon = {:.12}", gs.epsilon))
        }
        Command::HydrogenSpectrum { alpha, mass, kappa_max, nr_max } => {
            if *kappa_max < 1 {
                return Err(stgraph::Error::InvalidParameter("kappa-max must be >= 1".into()));
            }
            let mut rows = Vec::new();
            let mut max_dev = 0.0f64;
            for nr in 0..=*nr_max {
                for kappa in 1..=*kappa_max {
                    let params = AtomParams::new(*mass, *alpha, kappa, nr + 1)?;
                    let st = solvers::radial_solve_opts(&params, &opts)?;
                    max_dev = max_dev.max((st.epsilon - solvers::sommerfeld_energy(&params)).abs());
                    rows.push((nr, kappa, st.epsilon));
                }
            }
            let data = match cli.format {
                Format::Json => to_json_pretty(&json!({
                    "command": "hydrogen-spectrum",
                    "params": {"alpha": alpha, "mass": mass, "kappa_max": kappa_max, "nr_max": nr_max},
                    "levels": rows.iter().map(|(nr, k, e)| json!({"n_r": nr, "kappa": k, "epsilon": e})).collect::<Vec<_>>(),
                    "max_closed_form_deviation": max_dev,
                    "provenance": provenance(),
                }))?,
                Format::Csv => spectrum_csv(&rows),
            };
            emit(cli, &data).map_err(io_err)?;
            Ok(format!(
                "{} levels, max closed-form deviation {:.3e}",
                rows.len(),
                max_dev
            ))
        }
        Command::Oscillator { n } => {
            let st = solvers::oscillator_solve(*n)?;
            let data = match cli.format {
                Format::Json => to_json_pretty(&json!({
                    "command": "oscillator",
                    "params": {"n": n},
                    "energy": st.energy,
                    "zeros": st.xs,
                    "psi": st.psi,
                    "nonstandard": st.nonstandard,
                    "residuals": {"field": st.field_residual, "node": st.node_residual},
                    "provenance": provenance(),
                }))?,
                Format::Csv => {
                    let mut header = String::from("n,energy");
                    let mut row = format!("{},{}", st.n, csv_float(st.energy));
                    for (i, x) in st.xs.iter().enumerate() {
                        header.push_str(&format!(",x{}", i + 1));
                        row.push(',');
                        row.push_str(&csv_float(*x));
                    }
                    format!("{header}\n{row}\n")
                }
            };
            emit(cli, &data).map_err(io_err)?;
            Ok(format!("oscillator n = {n}: E = {}", st.energy))
        }
        Command::FreeParticle { mass, steps, rapidity } => {
            let p0 = if *rapidity == 0.0 {
                stgraph::SpinorMatrix::identity()
            } else {
                stgraph::lorentz::LorentzTransform::boost([0.0, 0.0, 1.0], *rapidity)?
                    .apply_spinor(&stgraph::SpinorMatrix::identity())
            };
            let tr = dynamics::free_propagate(*mass, &MinkowskiVector::zero(), &p0, *steps)?;
            let field = PotentialField::zero();
            let rows: Vec<TrajectoryRow> = tr
                .nodes
                .iter()
                .enumerate()
                .map(|(k, n)| {
                    let residual = if k == 0 {
                        0.0
                    } else {
                        let st = TrajectoryState {
                            x_prev: tr.nodes[k - 1],
                            x_curr: *n,
                            p_prev: tr.spinor,
                            k,
                        };
                        dynamics::conservation_check(&field, &st, *mass).unwrap_or(f64::NAN)
                    };
                    TrajectoryRow {
                        k,
                        t: n.t,
                        x: n.x,
                        y: n.y,
                        z: n.z,
                        det_v: tr.velocity.interval(),
                        conservation_residual: residual,
                    }
                })
                .collect();
            let table = TrajectoryTable { rows };
            let data = match cli.format {
                Format::Json => to_json_pretty(&json!({
                    "command": "free-particle",
                    "params": {"mass": mass, "steps": steps, "rapidity": rapidity},
                    "velocity": [tr.velocity.t, tr.velocity.x, tr.velocity.y, tr.velocity.z],
                    "spinor": spinor_to_reals(&tr.spinor),
                    "trajectory": table.rows,
                    "provenance": provenance(),
                }))?,
                Format::Csv => table.to_csv(),
            };
            emit(cli, &data).map_err(io_err)?;
            Ok(format!(
                "free particle: {} nodes, |jump|^2 = {:.12e}",
                *steps + 1,
                1.0 / (mass * mass)
            ))
        }
        Command::LorentzTrajectory { mass, steps, field, spinors } => {
            let spec: FieldSpec = serde_json::from_str(field)
                .map_err(|e| stgraph::Error::InvalidParameter(format!("bad field spec: {e}")))?;
            let potential = spec.build();
            let init = dynamics::initial_edge(
                &potential,
                &MinkowskiVector::zero(),
                &MinkowskiVector::time_unit(),
                *mass,
            )?;
            let outcomes = dynamics::discrete_propagate(&potential, init, *mass, *steps, &opts)?;
            let mut warned = false;
            let mut rows = vec![TrajectoryRow {
                k: 0,
                t: init.x_curr.t,
                x: init.x_curr.x,
                y: init.x_curr.y,
                z: init.x_curr.z,
                det_v: (init.x_curr - init.x_prev).interval().recip(),
                conservation_residual: dynamics::conservation_check(&potential, &init, *mass)?,
            }];
            let mut history = Vec::new();
            for o in &outcomes {
                if o.field_ratio > dynamics::WEAK_FIELD_RATIO && !warned {
                    eprintln!(
                        "warning: field ratio {:.3} exceeds the weak-field bound {}",
                        o.field_ratio,
                        dynamics::WEAK_FIELD_RATIO
                    );
                    warned = true;
                }
                let n = o.state.x_curr;
                rows.push(TrajectoryRow {
                    k: o.state.k,
                    t: n.t,
                    x: n.x,
                    y: n.y,
                    z: n.z,
                    det_v: (o.state.x_curr - o.state.x_prev).interval().recip(),
                    conservation_residual: o.conservation_residual,
                });
                history.push(spinor_to_reals(&o.state.p_prev));
            }
            let table = TrajectoryTable { rows };
            let data = match cli.format {
                Format::Json => to_json_pretty(&json!({
                    "command": "lorentz-trajectory",
                    "params": {"mass": mass, "steps": steps, "field": field},
                    "trajectory": table.rows,
                    "spinor_history": if *spinors { Some(history) } else { None },
                    "provenance": provenance(),
                }))?,
                Format::Csv => table.to_csv(),
            };
            emit(cli, &data).map_err(io_err)?;
            let max_res = outcomes
                .iter()
                .fold(0.0f64, |a, o| a.max(o.conservation_residual));
            Ok(format!("{steps} steps, max conservation residual {max_res:.3e}"))
        }
        Command::SphereGrid { m, h } => {
            let grid = sphere::build_grid(*m, *h)?;
            let (kp, rp) = sphere::angular_stationarity(&grid, sphere::Branch::Plus)?;
            let (km, _) = sphere::angular_stationarity(&grid, sphere::Branch::Minus)?;
            let record = SphereGridRecord::from_grid(&grid);
            let data = match cli.format {
                Format::Json => to_json_pretty(&json!({
                    "command": "sphere-grid",
                    "params": {"m": m, "h": h},
                    "grid": record,
                    "angular_residual": rp,
                    "provenance": provenance(),
                }))?,
                Format::Csv => record.plot_csv(),
            };
            emit(cli, &data).map_err(io_err)?;
            Ok(format!("grid {m}x{h}: kappa = {kp}/{km}, residual {rp:.3e}"))
        }
        Command::Opzeros { family, n, gamma, lambda, order } => {
            let spec = match family {
                FamilyArg::Hermite => OdeSpec::hermite(),
                FamilyArg::Laguerre => OdeSpec::laguerre(*gamma, *lambda)?,
                FamilyArg::Legendre => OdeSpec::legendre_like(*order)?,
            };
            let zeros = orthopoly::solve_zeros(&spec, *n)?;
            let master = spec.master_integral(*n)?;
            let weights = orthopoly::weight_constants(&spec, &zeros, master)?;
            let node_weights = orthopoly::gauss_node_weights(&zeros, &weights);
            let data = match cli.format {
                Format::Json => to_json_pretty(&json!({
                    "command": "opzeros",
                    "params": {"n": n, "gamma": gamma, "lambda": lambda, "order": order},
                    "zeros": zeros.xs,
                    "rhos": weights.rhos,
                    "k_const": weights.k_const,
                    "node_weights": node_weights,
                    "master_integral": master,
                    "provenance": provenance(),
                }))?,
                Format::Csv => opzeros_csv(&zeros.xs, Some(&weights.rhos), Some(&node_weights)),
            };
            emit(cli, &data).map_err(io_err)?;
            Ok(format!("{n} zeros, k = {:.12e}", weights.k_const))
        }
    }
}

fn io_err(e: std::io::Error) -> stgraph::Error {
    stgraph::Error::InvalidParameter(format!("io error: {e}"))
}
