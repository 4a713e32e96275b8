//! Plot-ready CSV tables with a header row and a fixed column order.
//! Variances appear both linear and in dB; frequencies are in MHz.

use cvqt_core::metrics::db;
use cvqt_core::{Engine, TeleportReport, TeleportTrace};

use crate::error::CliResult;
use crate::report::{CalibratePayload, OpoPayload, SequentialPayload, SweepPayload};

fn db_or_nan(v: f64) -> f64 {
    db(v).unwrap_or(f64::NAN)
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn finish(w: csv::Writer<Vec<u8>>) -> CliResult<String> {
    let bytes = w
        .into_inner()
        .map_err(|e| csv::Error::from(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

pub fn teleport_table(report: &TeleportReport) -> CliResult<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "engine",
        "sigma_x",
        "sigma_x_db",
        "sigma_x_se",
        "sigma_p",
        "sigma_p_db",
        "sigma_p_se",
        "fidelity",
        "fidelity_se",
        "n_s",
        "r_eff",
        "mean_x",
        "mean_p",
    ])?;
    let engine = match report.engine {
        Engine::Heisenberg => "heisenberg",
        Engine::MonteCarlo(_) => "monte_carlo",
    };
    w.write_record([
        engine.to_string(),
        report.sigma_x.linear.to_string(),
        report.sigma_x.db.to_string(),
        opt(report.sigma_x.std_error),
        report.sigma_p.linear.to_string(),
        report.sigma_p.db.to_string(),
        opt(report.sigma_p.std_error),
        report.fidelity.to_string(),
        opt(report.fidelity_std_error),
        report.n_s.to_string(),
        report.r_eff.to_string(),
        report.mean_out[0].to_string(),
        report.mean_out[1].to_string(),
    ])?;
    finish(w)
}

pub fn gain_table(sweep: &SweepPayload) -> CliResult<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "g",
        "sigma_x",
        "sigma_x_db",
        "sigma_p",
        "sigma_p_db",
        "fidelity",
        "n_s",
    ])?;
    for r in &sweep.rows {
        w.write_record([
            r.gain.to_string(),
            r.sigma_x.to_string(),
            r.sigma_x_db().to_string(),
            r.sigma_p.to_string(),
            r.sigma_p_db().to_string(),
            r.fidelity.to_string(),
            r.n_s.to_string(),
        ])?;
    }
    finish(w)
}

pub fn sequential_table(seq: &SequentialPayload) -> CliResult<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "n",
        "fidelity",
        "sigma_x",
        "sigma_x_db",
        "sigma_p",
        "sigma_p_db",
        "first_below_classical",
    ])?;
    for r in &seq.rows {
        let flag = seq.first_below_classical == Some(r.n);
        w.write_record([
            r.n.to_string(),
            r.fidelity.to_string(),
            r.sigma_x.to_string(),
            db_or_nan(r.sigma_x).to_string(),
            r.sigma_p.to_string(),
            db_or_nan(r.sigma_p).to_string(),
            flag.to_string(),
        ])?;
    }
    finish(w)
}

pub fn opo_table(opo: &OpoPayload) -> CliResult<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "sideband_mhz",
        "s_minus",
        "s_minus_db",
        "s_plus",
        "s_plus_db",
    ])?;
    for r in &opo.rows {
        w.write_record([
            r.sideband_mhz.to_string(),
            r.squeezed.to_string(),
            r.squeezed_db.to_string(),
            r.antisqueezed.to_string(),
            r.antisqueezed_db.to_string(),
        ])?;
    }
    finish(w)
}

pub fn calibrate_table(cal: &CalibratePayload) -> CliResult<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["source", "gain", "suppression_db", "gain_bound", "at_floor"])?;
    for c in &cal.cancellations {
        w.write_record([
            "cancellation".to_string(),
            c.gain.to_string(),
            c.result.suppression_db.to_string(),
            c.result.gain_bound.to_string(),
            c.result.at_floor.to_string(),
        ])?;
    }
    for b in &cal.bounds {
        w.write_record([
            "suppression".to_string(),
            String::new(),
            b.suppression_db.to_string(),
            b.gain_bound.to_string(),
            String::new(),
        ])?;
    }
    finish(w)
}

pub fn trace_table(trace: &TeleportTrace) -> CliResult<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["shot", "x_u", "p_v", "dx", "dp", "victor_x", "victor_p"])?;
    for (i, r) in trace.records.iter().enumerate() {
        w.write_record([
            i.to_string(),
            r.x_u.to_string(),
            r.p_v.to_string(),
            r.dx.to_string(),
            r.dp.to_string(),
            r.victor_x.to_string(),
            r.victor_p.to_string(),
        ])?;
    }
    finish(w)
}
