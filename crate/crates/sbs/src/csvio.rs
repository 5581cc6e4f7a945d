//! CSV writers for every artifact the toolkit emits, plus a small reader for
//! trajectory files. All floats are printed with 17 significant decimal
//! digits so values round-trip exactly; comment lines start with `#`.

use std::io::{self, Write};

use crate::analysis::{JumpChainStats, LearnabilityEstimate};
use crate::coupling::CouplingReport;
use crate::dynamics::{AbsorptionReport, AbsorptionStatus, SimOutput};
use crate::error::{Error, Result};
use crate::meanfield::OdeTrajectory;

/// 17-significant-digit decimal rendering of an `f64`.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn status_name(status: AbsorptionStatus) -> &'static str {
    match status {
        AbsorptionStatus::AbsorbedSuccess => "AbsorbedSuccess",
        AbsorptionStatus::AbsorbedOther => "AbsorbedOther",
        AbsorptionStatus::Frozen => "Frozen",
        AbsorptionStatus::TimedOut => "TimedOut",
    }
}

fn write_absorption_comment<W: Write>(w: &mut W, report: &AbsorptionReport) -> io::Result<()> {
    let time = match report.absorption_time {
        Some(t) => fmt_f64(t),
        None => "none".to_string(),
    };
    writeln!(w, "# status={} time={}", status_name(report.status), time)
}

/// Simulated trajectory: header `t,Y0,...,YK`, one row per grid time with
/// occupancy fractions, absorption summary appended as comment lines.
pub fn write_sim_trajectory<W: Write>(w: &mut W, out: &SimOutput) -> io::Result<()> {
    let n = out.final_state.num_agents() as f64;
    let k = out.final_state.occupancy().len() - 1;
    write!(w, "t")?;
    for i in 0..=k {
        write!(w, ",Y{i}")?;
    }
    writeln!(w)?;
    for (t, z) in &out.trajectory {
        write!(w, "{}", fmt_f64(*t))?;
        for &count in z {
            write!(w, ",{}", fmt_f64(count as f64 / n))?;
        }
        writeln!(w)?;
    }
    write_absorption_comment(w, &out.absorption)
}

/// Jump chain: header `t,direction` with direction in `{+1,-1}`, absorption
/// summary appended as comment lines.
pub fn write_jump_chain<W: Write>(w: &mut W, out: &SimOutput) -> io::Result<()> {
    writeln!(w, "t,direction")?;
    for &(t, dir) in &out.jump_chain {
        writeln!(w, "{},{}", fmt_f64(t), if dir > 0 { "+1" } else { "-1" })?;
    }
    write_absorption_comment(w, &out.absorption)
}

/// Integrated trajectory in the same layout as the simulator file:
/// `t,y0,...,yK`.
pub fn write_ode_trajectory<W: Write>(w: &mut W, traj: &OdeTrajectory) -> io::Result<()> {
    let k = traj.terminal().len() - 1;
    write!(w, "t")?;
    for i in 0..=k {
        write!(w, ",y{i}")?;
    }
    writeln!(w)?;
    for (t, y) in traj.grid() {
        write!(w, "{}", fmt_f64(t))?;
        for &v in y {
            write!(w, ",{}", fmt_f64(v))?;
        }
        writeln!(w)?;
    }
    Ok(())
}

/// Side-by-side trajectories: `t,Y0..YK,y0..yK,d0..dK` with `d_k` the
/// absolute gap per component.
pub fn write_compare<W: Write>(
    w: &mut W,
    num_agents: usize,
    rows: &[(f64, Vec<u64>, Vec<f64>)],
) -> io::Result<()> {
    let k = match rows.first() {
        Some((_, z, _)) => z.len() - 1,
        None => return Ok(()),
    };
    write!(w, "t")?;
    for i in 0..=k {
        write!(w, ",Y{i}")?;
    }
    for i in 0..=k {
        write!(w, ",y{i}")?;
    }
    for i in 0..=k {
        write!(w, ",d{i}")?;
    }
    writeln!(w)?;
    let n = num_agents as f64;
    for (t, z, y) in rows {
        write!(w, "{}", fmt_f64(*t))?;
        for &count in z {
            write!(w, ",{}", fmt_f64(count as f64 / n))?;
        }
        for &v in y {
            write!(w, ",{}", fmt_f64(v))?;
        }
        for (&count, &v) in z.iter().zip(y) {
            write!(w, ",{}", fmt_f64((count as f64 / n - v).abs()))?;
        }
        writeln!(w)?;
    }
    Ok(())
}

/// Per-agent coupling errors with a summary trailer.
pub fn write_coupling<W: Write>(w: &mut W, report: &CouplingReport) -> io::Result<()> {
    writeln!(w, "agent,empirical_error")?;
    for (agent, err) in report.per_agent_error.iter().enumerate() {
        writeln!(w, "{agent},{}", fmt_f64(*err))?;
    }
    writeln!(
        w,
        "# max_error={} bound={} vacuous={}",
        fmt_f64(report.max_error),
        fmt_f64(report.theoretical_bound),
        report.vacuous
    )
}

/// Generic `metric,value` summary.
pub fn write_summary<W: Write>(w: &mut W, rows: &[(&str, String)]) -> io::Result<()> {
    writeln!(w, "metric,value")?;
    for (metric, value) in rows {
        writeln!(w, "{metric},{value}")?;
    }
    Ok(())
}

/// Standard summary rows for a learnability estimate.
pub fn learnability_summary_rows(est: &LearnabilityEstimate) -> Vec<(&'static str, String)> {
    vec![
        ("estimate", fmt_f64(est.point_estimate)),
        ("ci_lo", fmt_f64(est.wilson_ci_95.lo)),
        ("ci_hi", fmt_f64(est.wilson_ci_95.hi)),
        (
            "theory_bound",
            est.theoretical_lower_bound
                .map(fmt_f64)
                .unwrap_or_else(|| "none".to_string()),
        ),
        ("replications", est.replications.to_string()),
        ("timeouts", est.timeouts.to_string()),
    ]
}

/// Standard summary rows for pooled jump-chain statistics.
pub fn jump_summary_rows(stats: &JumpChainStats) -> Vec<(&'static str, String)> {
    vec![
        ("up_fraction", fmt_f64(stats.up_fraction)),
        ("ci_lo", fmt_f64(stats.wilson_ci_95.lo)),
        ("ci_hi", fmt_f64(stats.wilson_ci_95.hi)),
        (
            "theory_bound",
            stats
                .up_probability_bound
                .map(fmt_f64)
                .unwrap_or_else(|| "none".to_string()),
        ),
        ("num_jumps", stats.num_jumps.to_string()),
    ]
}

/// Parses a trajectory-style CSV (any file whose first column is `t` and
/// remaining columns are floats). Skips `#` comments and the header row.
pub fn parse_trajectory(text: &str) -> Result<Vec<(f64, Vec<f64>)>> {
    let mut rows = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') || line.starts_with('t') {
            continue;
        }
        let mut fields = line.split(',').map(|tok| {
            tok.parse::<f64>().map_err(|_| Error::EdgeListParse {
                line: lineno + 1,
                msg: format!("expected a float, got `{tok}`"),
            })
        });
        let t = fields.next().ok_or_else(|| Error::EdgeListParse {
            line: lineno + 1,
            msg: "empty row".into(),
        })??;
        let values = fields.collect::<Result<Vec<f64>>>()?;
        rows.push((t, values));
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{simulate, Backend, InitialCondition, ModelParams, RunConfig};
    use crate::graph::GraphTopology;

    #[test]
    fn float_format_round_trips() {
        for x in [
            0.0,
            0.1,
            1.0 / 3.0,
            std::f64::consts::LN_2 / 0.12,
            1e-300,
            -2.5e17,
        ] {
            let s = fmt_f64(x);
            assert_eq!(s.parse::<f64>().unwrap(), x, "{s}");
        }
    }

    #[test]
    fn trajectory_csv_round_trips_through_parser() {
        let g = GraphTopology::build_complete(5).unwrap();
        let params = ModelParams::new(vec![0.8, 0.4], 0.2, 1.0).unwrap();
        let out = simulate(
            &g,
            &params,
            &InitialCondition::Counts(vec![5, 0, 0]),
            &RunConfig {
                t_max: 2.0,
                seed: 3,
                backend: Backend::Behavioral,
                record_grid: 0.25,
                record_jumps: true,
                stop_on_absorption: false,
            },
        )
        .unwrap();
        let mut buf = Vec::new();
        write_sim_trajectory(&mut buf, &out).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let rows = parse_trajectory(&text).unwrap();
        assert_eq!(rows.len(), out.trajectory.len());
        for ((t, values), (t0, z)) in rows.iter().zip(&out.trajectory) {
            assert_eq!(t, t0);
            for (v, &count) in values.iter().zip(z) {
                assert_eq!(*v, count as f64 / 5.0);
            }
        }

        let mut buf = Vec::new();
        write_jump_chain(&mut buf, &out).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let rows = parse_trajectory(&text).unwrap();
        assert_eq!(rows.len(), out.jump_chain.len());
        assert!(text.lines().last().unwrap().starts_with("# status="));
    }
}
