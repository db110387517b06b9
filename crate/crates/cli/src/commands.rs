use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::Serialize;

use tsolr::association::{association_profile, Measure};
use tsolr::baselines::{fit_markov, fit_mtd, fit_par};
use tsolr::forecast::forecast_window;
use tsolr::ingest::{read_series_csv, write_matrix_csv};
use tsolr::polr::PolrParams;
use tsolr::series::{frequency_distribution, month_category_intensity, rate_evolution, transition_matrix};
use tsolr::simgen::{
    accuracy, consistency_experiment, forecasting_experiment, weighted_f1, write_consistency_table,
    write_forecasting_table,
};
use tsolr::{AnyModel, OrdinalSeries, PolrModel};

use crate::config::{ExperimentKind, ModelKind, RunConfig};

const MONTHS: [&str; 12] = ["Jan", "Feb", "Mar", "Apr", "May", "Jun", "Jul", "Aug", "Sep", "Oct", "Nov", "Dec"];

fn prepare(cfg: &RunConfig, out: &Path) -> Result<()> {
    cfg.validate()?;
    fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    write_json(&out.join("config.json"), cfg)
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    let f = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    Ok(BufWriter::new(f))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut w = create(path)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

fn load_series(cfg: &RunConfig) -> Result<OrdinalSeries> {
    let path = cfg.require_series()?;
    let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    let series = if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json")) {
        serde_json::from_reader(std::io::BufReader::new(file))
            .with_context(|| format!("parsing series {}", path.display()))?
    } else {
        read_series_csv(file, &cfg.scheme()).with_context(|| format!("reading {}", path.display()))?
    };
    Ok(series)
}

fn labels(series: &OrdinalSeries) -> Vec<String> {
    series.scheme().labels().to_vec()
}

#[derive(Serialize)]
struct Summary {
    observations: usize,
    first_date: String,
    last_date: String,
    counts: Vec<(String, usize)>,
    gap_count: usize,
    gaps: Vec<(String, String)>,
}

pub fn ingest(cfg: &RunConfig, out: &Path) -> Result<()> {
    prepare(cfg, out)?;
    let series = load_series(cfg)?;
    write_json(&out.join("series.json"), &series)?;
    let freq = frequency_distribution(&series);
    let gaps = series.gaps();
    let summary = Summary {
        observations: series.len(),
        first_date: series.first_date().to_string(),
        last_date: series.last_date().to_string(),
        counts: labels(&series).into_iter().zip(freq.counts).collect(),
        gap_count: gaps.len(),
        gaps: gaps.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect(),
    };
    write_json(&out.join("summary.json"), &summary)?;

    println!("{} observations, {} to {}", summary.observations, summary.first_date, summary.last_date);
    for (label, c) in &summary.counts {
        println!("  {label:<14}{c:>7}");
    }
    if summary.gap_count > 0 {
        println!("{} gap(s) in the dates:", summary.gap_count);
        for (a, b) in &summary.gaps {
            println!("  missing between {a} and {b}");
        }
    }
    Ok(())
}

pub fn describe(cfg: &RunConfig, lags: usize, out: &Path) -> Result<()> {
    prepare(cfg, out)?;
    let series = load_series(cfg)?;
    let names = labels(&series);

    let freq = frequency_distribution(&series);
    let mut w = csv::Writer::from_writer(create(&out.join("frequencies.csv"))?);
    w.write_record(["category", "count", "proportion"])?;
    for (i, label) in names.iter().enumerate() {
        w.write_record([label.clone(), freq.counts[i].to_string(), freq.proportions[i].to_string()])?;
    }
    w.flush()?;

    for h in 1..=lags {
        let tm = transition_matrix(&series, h)?;
        write_matrix_csv(create(&out.join(format!("transition_lag{h}.csv")))?, "from", &names, &names, &tm.probs)?;
        write_matrix_csv(
            create(&out.join(format!("transition_counts_lag{h}.csv")))?,
            "from",
            &names,
            &names,
            &tm.counts,
        )?;
        if h == 1 {
            let diag: Vec<String> = tm.diagonal().iter().map(|d| format!("{d:.2}")).collect();
            println!("lag-1 persistence: {}", diag.join(" "));
        }
    }

    let months: Vec<String> = MONTHS.iter().map(|m| m.to_string()).collect();
    let intensity = month_category_intensity(&series, true);
    write_matrix_csv(create(&out.join("month_intensity.csv"))?, "month", &months, &names, &intensity)?;

    let paths = rate_evolution(&series);
    let mut w = csv::Writer::from_writer(create(&out.join("rate_evolution.csv"))?);
    let mut header = vec!["date".to_string()];
    header.extend(names.iter().cloned());
    w.write_record(&header)?;
    for (t, d) in series.dates().iter().enumerate() {
        let mut rec = vec![d.to_string()];
        rec.extend(paths.iter().map(|p| p[t].to_string()));
        w.write_record(&rec)?;
    }
    w.flush()?;
    println!("wrote descriptive tables for {} observations to {}", series.len(), out.display());
    Ok(())
}

fn training_window(cfg: &RunConfig, series: &OrdinalSeries) -> Result<OrdinalSeries> {
    let start = cfg.train_start.unwrap_or(series.first_date());
    let end = cfg.train_end.unwrap_or(series.last_date());
    series
        .between(start, end)
        .with_context(|| format!("training window {start}..{end}"))
}

fn fit_model(cfg: &RunConfig, train: &OrdinalSeries) -> Result<AnyModel> {
    let kind = cfg.require_model()?;
    let order = cfg.order.unwrap_or(1);
    Ok(match kind {
        ModelKind::Tsolr | ModelKind::Isolr => {
            let spec = cfg.covariates_for(kind)?;
            AnyModel::Polr(PolrModel::fit(train, &spec, &cfg.fit)?)
        }
        ModelKind::Markov => AnyModel::Markov(fit_markov(train, order)?),
        ModelKind::Mtd => AnyModel::Mtd(fit_mtd(train, order)?),
        ModelKind::Par => AnyModel::Par(fit_par(train, order)?),
    })
}

fn report_model(model: &AnyModel, out: &Path) -> Result<()> {
    match model {
        AnyModel::Polr(m) => {
            let r = &m.fit;
            let mut w = csv::Writer::from_writer(create(&out.join("estimates.csv"))?);
            w.write_record(["parameter", "estimate", "std_error"])?;
            println!("{:<16}{:>12}{:>12}", "parameter", "estimate", "std.err");
            for (i, (name, est)) in r.parameter_names.iter().zip(r.estimates()).enumerate() {
                let se = r.std_errors.as_ref().map(|s| s[i]);
                let se_text = se.map(|s| s.to_string()).unwrap_or_default();
                w.write_record([name.clone(), est.to_string(), se_text])?;
                let shown = se.map(|s| format!("{s:>12.4}")).unwrap_or_else(|| format!("{:>12}", "-"));
                println!("{name:<16}{est:>12.4}{shown}");
            }
            w.flush()?;
            println!(
                "log-likelihood {:.4} on {} observations; converged: {} after {} iterations",
                r.log_likelihood, r.n_obs, r.converged, r.iterations
            );
            for d in &r.diagnostics {
                println!("warning: {d}");
            }
        }
        AnyModel::Markov(m) => println!(
            "Markov({}) with {} observed states, {} free parameters",
            m.order,
            m.rows.len(),
            m.free_parameters()
        ),
        AnyModel::Mtd(m) => println!(
            "MTD({}) lambdas {:?}, log-likelihood {:.4}, converged: {}",
            m.order, m.lambdas, m.log_likelihood, m.converged
        ),
        AnyModel::Par(m) => println!(
            "PAR({}) phi {:?}, log-likelihood {:.4}{}",
            m.order,
            m.phi,
            m.log_likelihood,
            if m.boundary.iter().any(|b| *b) { " (at a boundary)" } else { "" }
        ),
    }
    Ok(())
}

pub fn fit(cfg: &RunConfig, out: &Path) -> Result<()> {
    prepare(cfg, out)?;
    let series = load_series(cfg)?;
    let train = training_window(cfg, &series)?;
    let model = fit_model(cfg, &train)?;
    write_json(&out.join("model.json"), &model)?;
    report_model(&model, out)
}

#[derive(Serialize)]
struct Metrics {
    start: String,
    end: String,
    forecasts: usize,
    accuracy: f64,
    weighted_f1: f64,
}

pub fn forecast(cfg: &RunConfig, out: &Path) -> Result<()> {
    prepare(cfg, out)?;
    let series = load_series(cfg)?;
    let model: AnyModel = match &cfg.model_file {
        Some(path) => {
            let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
            serde_json::from_reader(std::io::BufReader::new(file))
                .with_context(|| format!("parsing model {}", path.display()))?
        }
        None => {
            if cfg.train_end.is_none() && cfg.test_start.is_none() {
                bail!("give --train-end or --test-start to separate training and test data");
            }
            let mut c = cfg.clone();
            if c.train_end.is_none() {
                c.train_end = cfg.test_start.map(|d| d.pred_opt().expect("valid date"));
            }
            let model = fit_model(&c, &training_window(&c, &series)?)?;
            write_json(&out.join("model.json"), &model)?;
            model
        }
    };
    let start = match (cfg.test_start, cfg.train_end) {
        (Some(d), _) => d,
        (None, Some(d)) => d.succ_opt().expect("valid date"),
        (None, None) => bail!("no test window; pass --test-start"),
    };
    let end = cfg.test_end.unwrap_or(series.last_date());
    let preds = forecast_window(&model, &series, start, end, cfg.lag_mode)?;

    let names = labels(&series);
    let mut w = csv::Writer::from_writer(create(&out.join("predictions.csv"))?);
    let mut header = vec!["date".to_string(), "observed".to_string(), "predicted".to_string()];
    header.extend(names.iter().map(|l| format!("p_{l}")));
    w.write_record(&header)?;
    for p in &preds {
        let mut rec = vec![
            p.date.to_string(),
            p.observed.map(|c| names[c].clone()).unwrap_or_default(),
            names[p.predicted].clone(),
        ];
        rec.extend(p.probs.iter().map(|q| q.to_string()));
        w.write_record(&rec)?;
    }
    w.flush()?;

    let truth: Vec<usize> = preds.iter().filter_map(|p| p.observed).collect();
    let guess: Vec<usize> = preds.iter().map(|p| p.predicted).collect();
    let metrics = Metrics {
        start: start.to_string(),
        end: end.to_string(),
        forecasts: preds.len(),
        accuracy: accuracy(&truth, &guess)?,
        weighted_f1: weighted_f1(&truth, &guess)?,
    };
    write_json(&out.join("metrics.json"), &metrics)?;
    println!(
        "{} forecasts {}..{}: accuracy {:.2}%, weighted F1 {:.2}%",
        metrics.forecasts,
        metrics.start,
        metrics.end,
        100.0 * metrics.accuracy,
        100.0 * metrics.weighted_f1
    );
    Ok(())
}

pub fn assoc(cfg: &RunConfig, out: &Path) -> Result<()> {
    prepare(cfg, out)?;
    let series = load_series(cfg)?;
    let max_lag = cfg.max_lag.unwrap_or(20);
    let profile = association_profile(&series, max_lag, &Measure::ALL)?;
    profile.write_csv(create(&out.join("association.csv"))?)?;
    write_json(&out.join("association.json"), &profile)?;
    let kappa = profile.series_for(Measure::Kappa).expect("kappa requested");
    for (lag, k) in profile.lags.iter().zip(kappa) {
        match k {
            Some(v) => println!("lag {lag:>3}  kappa {v:.4}"),
            None => println!("lag {lag:>3}  kappa undefined"),
        }
    }
    Ok(())
}

pub fn experiment(cfg: &RunConfig, out: &Path) -> Result<()> {
    prepare(cfg, out)?;
    let exp = cfg.experiment.as_ref().expect("experiment section is filled in by main");
    let seed = cfg.seed.unwrap_or(1);
    let configs = exp
        .sizes
        .iter()
        .map(|&n| {
            let mut c = exp.preset.config(n, exp.replicates, seed);
            if let Some(flat) = &exp.truth {
                c.truth = PolrParams::from_flat(flat, c.truth.n_categories())?;
            }
            Ok(c)
        })
        .collect::<Result<Vec<_>>>()?;

    let mut table = Vec::new();
    match exp.kind {
        ExperimentKind::Consistency => {
            let results = configs.iter().map(consistency_experiment).collect::<Result<Vec<_>, _>>()?;
            write_consistency_table(&results, &mut table)?;
            write_json(&out.join("results.json"), &results)?;
            for r in results.iter().filter(|r| r.failed > 0) {
                println!("n={}: {} of {} fits did not converge and were excluded", r.n, r.failed, r.replicates);
            }
        }
        ExperimentKind::Forecasting => {
            let results = configs.iter().map(forecasting_experiment).collect::<Result<Vec<_>, _>>()?;
            write_forecasting_table(&results, &mut table)?;
            write_json(&out.join("results.json"), &results)?;
            for r in results.iter().filter(|r| r.failed > 0) {
                println!("n={}: {} of {} replicates failed and were excluded", r.n, r.failed, r.replicates);
            }
        }
    }
    fs::write(out.join("table.csv"), &table)?;
    print!("{}", String::from_utf8(table)?);
    Ok(())
}
