//! Operation-count benchmark over a list of groups.

use std::io::Write;
use std::sync::Arc;
use std::time::Instant;

use gdft::dft::naive_dft;
use gdft::planner::{execute_plan_traced, Planner, Strategy, TraceEvent};
use gdft::{FiniteGroup, GroupAlgebraElement, OpCounter, Result};
use serde::Serialize;

/// One CSV row. Counts are empty when the run failed; `residual` is empty
/// when verification is off.
#[derive(Debug, Clone, Serialize)]
pub struct BenchRecord {
    pub group: String,
    pub label: String,
    pub order: Option<usize>,
    pub strategy: String,
    pub cmul: Option<u64>,
    pub cadd: Option<u64>,
    pub ms: Option<f64>,
    pub residual: Option<f64>,
    pub error: Option<String>,
}

pub const HEADER: [&str; 9] = ["group", "label", "order", "strategy", "cmul", "cadd", "ms", "residual", "error"];

#[derive(Serialize)]
struct TraceLine<'a> {
    group: &'a str,
    strategy: Strategy,
    events: &'a [TraceEvent],
}

pub struct BenchOptions<'a> {
    pub strategies: &'a [Strategy],
    pub seed: u64,
    pub verify: bool,
    pub trace: Option<&'a mut dyn Write>,
}

/// Milliseconds since `start`, to the microsecond.
fn elapsed_ms(start: Instant) -> f64 {
    start.elapsed().as_micros() as f64 / 1e3
}

impl BenchRecord {
    fn failed(name: &str, label: &str, order: Option<usize>, strategy: &str, error: String) -> Self {
        BenchRecord {
            group: name.into(),
            label: label.into(),
            order,
            strategy: strategy.into(),
            cmul: None,
            cadd: None,
            ms: None,
            residual: None,
            error: Some(error),
        }
    }
}

/// Rows for one group: the naive baseline, then one per requested strategy.
pub fn bench_group(
    planner: &Planner,
    name: &str,
    group: Result<Arc<FiniteGroup>>,
    opts: &mut BenchOptions,
) -> Vec<BenchRecord> {
    let g = match group {
        Ok(g) => g,
        Err(e) => return vec![BenchRecord::failed(name, "", None, Strategy::Naive.name(), e.to_string())],
    };
    let irreps = match planner.irreps(&g) {
        Ok(i) => i,
        Err(e) => return vec![BenchRecord::failed(name, g.label(), Some(g.order()), Strategy::Naive.name(), e.to_string())],
    };
    let alpha = GroupAlgebraElement::random(&g, opts.seed);

    let ops = OpCounter::new();
    let start = Instant::now();
    let oracle = match naive_dft(&alpha, &irreps, &ops) {
        Ok(o) => o,
        Err(e) => return vec![BenchRecord::failed(name, g.label(), Some(g.order()), Strategy::Naive.name(), e.to_string())],
    };
    let naive_ms = elapsed_ms(start);
    let mut rows = vec![BenchRecord {
        group: name.into(),
        label: g.label().into(),
        order: Some(g.order()),
        strategy: Strategy::Naive.name().into(),
        cmul: Some(ops.mults()),
        cadd: Some(ops.adds()),
        ms: Some(naive_ms),
        residual: opts.verify.then_some(0.0),
        error: None,
    }];

    for &strategy in opts.strategies {
        if strategy == Strategy::Naive {
            continue;
        }
        let run = || -> Result<(BenchRecord, Vec<TraceEvent>)> {
            let plan = planner.with_strategy(strategy).plan_for(&irreps)?;
            let ops = OpCounter::new();
            let start = Instant::now();
            let (out, events) = execute_plan_traced(&plan, &alpha, &ops)?;
            let ms = elapsed_ms(start);
            let record = BenchRecord {
                group: name.into(),
                label: g.label().into(),
                order: Some(g.order()),
                strategy: strategy.name().into(),
                cmul: Some(ops.mults()),
                cadd: Some(ops.adds()),
                ms: Some(ms),
                residual: opts.verify.then(|| out.max_block_residual(&oracle)),
                error: None,
            };
            Ok((record, events))
        };
        match run() {
            Ok((record, events)) => {
                if let Some(w) = opts.trace.as_deref_mut() {
                    let line = TraceLine {
                        group: name,
                        strategy,
                        events: &events,
                    };
                    if let Err(e) = serde_json::to_writer(&mut *w, &line).map_err(std::io::Error::from).and_then(|_| writeln!(w)) {
                        log::warn!("trace write failed: {e}");
                    }
                }
                rows.push(record);
            }
            Err(e) => rows.push(BenchRecord::failed(name, g.label(), Some(g.order()), strategy.name(), e.to_string())),
        }
    }
    rows
}
