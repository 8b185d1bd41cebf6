use std::fs;
use std::io::Write;

use calogero::dynamics::{
    conservation_report, integrate, Frame, InitialState, IntegrationConfig, Integrator, Trajectory,
};
use calogero::geometry::{cuboctahedron, orthogonal_frame, root_system, RootEntry, Vertex};
use calogero::linalg::Vec3;
use calogero::par::Execution;
use calogero::verify::{self, SuiteOptions};
use calogero::{Error, ModelParams, PairLabel, PhaseState, ReducedPhaseState};
use serde::{Deserialize, Serialize};

use crate::args::{
    FrameArg, GeometryArgs, GeometryFormat, IntegratorArg, RootsArgs, RootsFormat, SimulateArgs,
    Solid, TrajectoryFormat, VerifyArgs,
};
use crate::output::{csv_row, num, sink, write_json};
use crate::Failure;

#[derive(Serialize)]
struct RootsOut<'a> {
    n_particles: usize,
    dimension: usize,
    roots: &'a [RootEntry],
    /// Rows and columns follow the order of `roots`.
    cosine_matrix: Vec<Vec<f64>>,
}

pub fn roots(a: &RootsArgs) -> Result<(), Failure> {
    let rs = root_system(a.n)?;
    let cos = rs.cosine_matrix();
    match a.format {
        RootsFormat::Json => write_json(
            a.out.as_deref(),
            &RootsOut {
                n_particles: rs.n_particles(),
                dimension: rs.dim(),
                roots: rs.entries(),
                cosine_matrix: cos,
            },
        )?,
        RootsFormat::Csv => {
            // One row per root: its label, components, then its cosine row.
            let mut w = sink(a.out.as_deref())?;
            let mut header = vec!["i".to_owned(), "j".to_owned()];
            header.extend((1..=rs.dim()).map(|k| format!("b{k}")));
            header.extend(rs.iter().map(|e| format!("cos_{}_{}", e.pair.0, e.pair.1)));
            writeln!(w, "{}", csv_row(header))?;
            for (e, row) in rs.iter().zip(&cos) {
                let mut fields = vec![e.pair.0.to_string(), e.pair.1.to_string()];
                fields.extend(e.vector.iter().map(|&x| num(x)));
                fields.extend(row.iter().map(|&x| num(x)));
                writeln!(w, "{}", csv_row(fields))?;
            }
            w.flush()?;
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct FaceOut {
    kind: &'static str,
    /// Counter-clockwise seen from outside.
    vertices: Vec<usize>,
    /// Signed root of each vertex.
    pairs: Vec<(i8, PairLabel)>,
}

#[derive(Serialize)]
struct GeometryOut {
    solid: &'static str,
    /// Coordinates are Jacobi components `(y_1, y_2, y_3)`.
    basis: &'static str,
    vertices: Vec<Vertex>,
    edges: Vec<(usize, usize)>,
    faces: Vec<FaceOut>,
    /// The square-face normals `a_1, a_2, a_3`.
    frame_axes: [Vec3; 3],
}

pub fn geometry(a: &GeometryArgs) -> Result<(), Failure> {
    let Solid::Cuboctahedron = a.solid;
    let solid = cuboctahedron();
    let axes = orthogonal_frame(&root_system(4)?)?.axes;
    let face = |kind, idx: &[usize]| FaceOut {
        kind,
        vertices: idx.to_vec(),
        pairs: idx
            .iter()
            .map(|&i| (solid.vertices[i].sign, solid.vertices[i].pair))
            .collect(),
    };
    match a.format {
        GeometryFormat::Json => {
            let mut faces: Vec<FaceOut> = solid
                .triangles
                .iter()
                .map(|t| face("triangle", t))
                .collect();
            faces.extend(solid.squares.iter().map(|s| face("square", s)));
            write_json(
                a.out.as_deref(),
                &GeometryOut {
                    solid: "cuboctahedron",
                    basis: "jacobi",
                    vertices: solid.vertices.clone(),
                    edges: solid.edges.clone(),
                    faces,
                    frame_axes: axes,
                },
            )?;
        }
        GeometryFormat::Obj => {
            let mut w = sink(a.out.as_deref())?;
            writeln!(
                w,
                "# cuboctahedron of the four-particle roots, Jacobi coordinates"
            )?;
            writeln!(w, "# 12 vertices, 24 edges, 8 triangles, 6 squares")?;
            for (k, v) in solid.vertices.iter().enumerate() {
                let sign = if v.sign > 0 { '+' } else { '-' };
                writeln!(w, "# v{} = {sign}b{}{}", k + 1, v.pair.0, v.pair.1)?;
            }
            for v in &solid.vertices {
                let [x, y, z] = v.position;
                writeln!(w, "v {} {} {}", num(x), num(y), num(z))?;
            }
            for &(i, j) in &solid.edges {
                writeln!(w, "l {} {}", i + 1, j + 1)?;
            }
            for t in &solid.triangles {
                writeln!(w, "f {} {} {}", t[0] + 1, t[1] + 1, t[2] + 1)?;
            }
            for s in &solid.squares {
                writeln!(w, "f {} {} {} {}", s[0] + 1, s[1] + 1, s[2] + 1, s[3] + 1)?;
            }
            w.flush()?;
        }
    }
    Ok(())
}

pub fn verify(a: &VerifyArgs) -> Result<(), Failure> {
    let suite: verify::Suite = a.suite.into();
    let opts = SuiteOptions {
        n: a.n,
        samples: a.samples,
        seed: a.seed,
        tol: a.tol,
        execution: if a.sequential {
            Execution::Sequential
        } else {
            Execution::Parallel
        },
    };
    let report = verify::run(suite, &opts)?;
    write_json(a.out.as_deref(), &report)?;
    if report.passed {
        Ok(())
    } else {
        let failed: Vec<&str> = report
            .checks
            .iter()
            .filter(|c| c.gating && !c.passed)
            .map(|c| c.name.as_str())
            .collect();
        Err(Failure::Run(format!(
            "suite {suite} failed: {}",
            failed.join(", ")
        )))
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct InitFile {
    q: Vec<f64>,
    p: Vec<f64>,
}

fn initial_state(a: &SimulateArgs) -> Result<InitialState, Failure> {
    let (q, p) = match (&a.q, &a.p, &a.init) {
        (Some(q), Some(p), None) => (q.clone(), p.clone()),
        (None, None, Some(path)) => {
            let text = fs::read_to_string(path)
                .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
            let f: InitFile = serde_json::from_str(&text).map_err(|e| {
                Failure::Usage(format!("malformed init file {}: {e}", path.display()))
            })?;
            (f.q, f.p)
        }
        _ => return Err(Failure::Usage("give either --q and --p, or --init".into())),
    };
    Ok(match a.frame {
        FrameArg::Lab => InitialState::Lab(PhaseState::new(q, p)?),
        FrameArg::Reduced => InitialState::Reduced(ReducedPhaseState::new(q, p)?),
    })
}

fn header(traj: &Trajectory) -> Vec<String> {
    let d = traj.samples.first().map_or(0, |s| s.q.len());
    let (qn, pn) = match traj.frame {
        Frame::Lab => ("x", "p"),
        Frame::Reduced => ("y", "py"),
    };
    let mut h = vec!["t".to_owned()];
    h.extend((1..=d).map(|k| format!("{qn}{k}")));
    h.extend((1..=d).map(|k| format!("{pn}{k}")));
    h.extend(traj.monitors.iter().map(|o| o.name().to_owned()));
    h
}

fn write_samples(w: &mut dyn Write, traj: &Trajectory) -> std::io::Result<()> {
    writeln!(w, "{}", csv_row(header(traj)))?;
    for s in &traj.samples {
        let mut row = vec![num(s.t)];
        row.extend(s.q.iter().chain(&s.p).map(|&x| num(x)));
        row.extend(traj.monitors.iter().map(|o| num(s.observables[o])));
        writeln!(w, "{}", csv_row(row))?;
    }
    Ok(())
}

pub fn simulate(a: &SimulateArgs) -> Result<(), Failure> {
    let TrajectoryFormat::Csv = a.format;
    let params = ModelParams::new(a.n, a.g)?;
    let init = initial_state(a)?;
    let cfg =
        IntegrationConfig::leapfrog(a.dt, a.steps, a.stride).with_integrator(match a.integrator {
            IntegratorArg::Leapfrog => Integrator::Leapfrog,
            IntegratorArg::Rk4 => Integrator::Rk4Reference,
        });
    match integrate(init, &params, &cfg) {
        Ok(traj) => {
            let mut w = sink(a.out.as_deref())?;
            write_samples(&mut *w, &traj)?;
            w.flush()?;
            let report = conservation_report(&traj)?;
            eprintln!(
                "{}",
                serde_json::to_string(&report).map_err(|e| Failure::Run(e.to_string()))?
            );
            Ok(())
        }
        Err(Error::IntegrationAborted {
            time,
            pair,
            partial,
            ..
        }) => {
            let mut w = sink(a.out.as_deref())?;
            write_samples(&mut *w, &partial)?;
            writeln!(
                w,
                "# aborted after t = {}: particles {} and {} within the collision guard",
                num(time),
                pair.0,
                pair.1
            )?;
            w.flush()?;
            Err(Failure::Run(format!(
                "integration aborted after t = {time}: pair ({}, {})",
                pair.0, pair.1
            )))
        }
        Err(e) => Err(e.into()),
    }
}
