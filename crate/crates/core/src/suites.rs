//! The five verification suites, each producing a certificate and tables.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::hyperbolic::{dist_to_geodesic, UpperHalfPoint};
use crate::orbit::{
    busemann_limit, busemann_limit_extended, detect_time, fibonacci_times, fineness_scan,
    ft_minimizer, ft_value, generator_family, pair_family, pcl_bound_neg, pcl_bound_pos,
    pcl_distance_neg, pcl_distance_pos, pcl_distance_pos_closed, SecondIndex, TimeDetection,
    TimeSearch,
};
use crate::precision::Precision;
use crate::report::{Certificate, CheckRecord, Table};
use crate::schottky::{
    circle_system, index_sequence, make_generator, pingpong_precision, verify_disjointness,
    verify_pingpong_with, IndexSequence, IsometryCircle, IsometryCircleSystem, Side, SurfaceParameter,
};
use crate::tolerances::{self, Tolerances};
use crate::words::{classify_infinity, Verdict, WordBudget};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Disjoint,
    Pingpong,
    Irregular,
    Fineness,
    Times,
}

impl Suite {
    pub const ALL: [Suite; 5] = [
        Suite::Disjoint,
        Suite::Pingpong,
        Suite::Irregular,
        Suite::Fineness,
        Suite::Times,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Suite::Disjoint => "disjoint",
            Suite::Pingpong => "pingpong",
            Suite::Irregular => "irregular",
            Suite::Fineness => "fineness",
            Suite::Times => "times",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown suite {s:?}")))
    }
}

/// Parameters shared by the suites.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteConfig {
    pub delta: SurfaceParameter,
    /// Sequence indices used by the disjointness and fineness suites.
    pub generator_count: usize,
    /// Generators and word length for the irregularity scan.
    pub word_alphabet: usize,
    pub word_max_length: usize,
    /// Generators and word length for the injectivity estimates.
    pub fineness_alphabet: usize,
    pub fineness_max_length: usize,
    pub t_grid: Vec<f64>,
    pub pingpong_count: usize,
    pub pingpong_samples: usize,
    /// Generators scanned by the return-time search.
    pub time_depth: usize,
    pub fibonacci_count: usize,
    pub tolerances: Tolerances,
    /// Mantissa bits of the extended-precision cross-checks.
    pub precision_bits: Option<usize>,
    pub budget: WordBudget,
}

impl SuiteConfig {
    pub fn new(delta: SurfaceParameter) -> Self {
        Self {
            delta,
            generator_count: 20,
            word_alphabet: 4,
            word_max_length: 6,
            fineness_alphabet: 3,
            fineness_max_length: 4,
            t_grid: (0..=10).map(f64::from).collect(),
            pingpong_count: 10,
            pingpong_samples: 100,
            time_depth: 20,
            fibonacci_count: 31,
            tolerances: Tolerances::default(),
            precision_bits: None,
            budget: WordBudget::default(),
        }
    }

    fn tol(&self, name: &str) -> f64 {
        self.tolerances.get(name)
    }

    fn extended_bits(&self) -> usize {
        self.precision_bits.unwrap_or(192)
    }
}

/// Certificate and CSV tables of one suite run.
#[derive(Debug, Clone)]
pub struct SuiteReport {
    pub certificate: Certificate,
    pub tables: Vec<Table>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.certificate.passed()
    }
}

pub fn run_suite(suite: Suite, config: &SuiteConfig) -> Result<SuiteReport> {
    let start = Instant::now();
    let mut report = match suite {
        Suite::Disjoint => disjoint_suite(config),
        Suite::Pingpong => pingpong_suite(config),
        Suite::Irregular => irregular_suite(config),
        Suite::Fineness => fineness_suite(config),
        Suite::Times => times_suite(config),
    }?;
    report.certificate.timing_ms = start.elapsed().as_secs_f64() * 1e3;
    Ok(report)
}

/// Runs `f` on a single thread unless `parallel` is set.
pub fn with_parallelism<T: Send>(parallel: bool, f: impl FnOnce() -> T + Send) -> T {
    if parallel {
        return f();
    }
    match rayon::ThreadPoolBuilder::new().num_threads(1).build() {
        Ok(pool) => pool.install(f),
        Err(_) => f(),
    }
}

/// Sequence prefix reaching at least [`tolerances::LIMIT_MIN_INDEX`] and at
/// least `count` entries.
pub fn limit_sequence(delta: &SurfaceParameter, count: usize) -> Result<IndexSequence> {
    let mut n = count.max(1);
    loop {
        let s = index_sequence(delta, n)?;
        if s.last() >= tolerances::LIMIT_MIN_INDEX {
            return Ok(s);
        }
        n += 1;
    }
}

/// One row per generator: index, coefficients and circle data.
pub fn construction_table(sequence: &IndexSequence) -> Table {
    let mut t = Table::new(
        "construction",
        &["n", "p", "a", "b", "c", "d", "trace", "center_pos", "center_neg", "radius"],
    );
    for (k, &p) in sequence.entries().iter().enumerate() {
        let g = make_generator(p, sequence.delta()).expect("index ≥ 1");
        let c = IsometryCircle::new(p, sequence.delta()).expect("index ≥ 1");
        t.push(vec![
            (k + 1).into(),
            p.into(),
            g.a.into(),
            g.b.into(),
            g.c.into(),
            g.d.into(),
            g.trace().into(),
            c.center_pos.into(),
            c.center_neg.into(),
            c.radius.into(),
        ]);
    }
    t
}

/// `(center, radius, side)` for both circles of each generator.
pub fn circles_table(sys: &IsometryCircleSystem) -> Table {
    let mut t = Table::new("circles", &["index", "center", "radius", "side"]);
    for c in sys.circles() {
        for side in [Side::Positive, Side::Negative] {
            t.push(vec![c.index.into(), c.center(side).into(), c.radius.into(), side.to_string().into()]);
        }
    }
    t
}

fn disjoint_suite(config: &SuiteConfig) -> Result<SuiteReport> {
    let delta = &config.delta;
    let sequence = index_sequence(delta, config.generator_count)?;
    let sys = circle_system(&sequence);
    let mut cert = verify_disjointness(&sys);

    // (δ−1)p_{k+1} > (δ+1)p_k and p_{k+1} − p_k ≥ 2
    for w in sequence.entries().windows(2) {
        let (p, q) = (w[0], w[1]);
        cert.push(
            CheckRecord::exceeds("recurrence-inequality", (delta.value() - 1.0) * q as f64, (delta.value() + 1.0) * p as f64)
                .with_margin(delta.recurrence_gap(p, q), true)
                .with_pair(p, q),
        );
        cert.push(CheckRecord::at_least("index-gap", (q - p) as f64, 2.0).with_pair(p, q));
    }

    // consecutive raw integers must overlap on the positive side
    let n = 20u64.max(delta.value().ceil() as u64 + 1);
    let raw = IsometryCircleSystem::from_indices(delta, &[n, n + 1])?;
    let raw_cert = verify_disjointness(&raw);
    let overlap = raw_cert.failures().any(|c| c.name == "positive-consecutive");
    let margin = raw_cert.min_margin("positive-consecutive").unwrap_or(f64::NAN);
    cert.push(CheckRecord::raw("raw-consecutive-overlap", margin, 0.0, -margin, overlap).with_pair(n, n + 1));

    let mut margins = Table::new("disjoint_margins", &["check", "p", "q", "margin", "pass"]);
    for c in &cert.checks {
        if let Some([p, q]) = c.index_pair {
            margins.push(vec![c.name.as_str().into(), p.into(), q.into(), c.margin.into(), c.pass.to_string().into()]);
        }
    }
    Ok(SuiteReport {
        certificate: cert,
        tables: vec![construction_table(&sequence), margins, circles_table(&sys)],
    })
}

fn pingpong_suite(config: &SuiteConfig) -> Result<SuiteReport> {
    let sequence = index_sequence(&config.delta, config.pingpong_count)?;
    let mut cert = Certificate::new("pingpong", config.delta.value());
    let mut table = Table::new("pingpong", &["p", "max_deviation", "mantissa_bits", "pairing"]);
    let tol = config.tol("pingpong_on_circle");
    let forced = config.precision_bits.map(|bits| Precision::Extended { bits });
    for &p in sequence.entries() {
        let precision = forced.unwrap_or_else(|| pingpong_precision(p, &config.delta, tol));
        let c = verify_pingpong_with(p, &config.delta, config.pingpong_samples, precision, tol)?;
        let worst = c
            .checks
            .iter()
            .find(|r| r.name == "circle-onto-circle max deviation")
            .map_or(f64::NAN, |r| r.lhs);
        let pairing = c.notes.first().cloned().unwrap_or_default();
        table.push(vec![p.into(), worst.into(), precision.mantissa_bits().into(), pairing.into()]);
        cert.merge(c);
    }
    cert.truncate_at("indices", config.pingpong_count as u64);
    cert.truncate_at("samples", config.pingpong_samples as u64);
    Ok(SuiteReport {
        certificate: cert,
        tables: vec![table],
    })
}

fn irregular_suite(config: &SuiteConfig) -> Result<SuiteReport> {
    let delta = &config.delta;
    let heights_seq = limit_sequence(delta, 2)?;
    let class = classify_infinity(
        delta,
        config.word_alphabet,
        config.word_max_length,
        heights_seq.len(),
        &config.budget,
    )?;
    let mut cert = Certificate::new("irregular", delta.value());
    cert.truncate_at("alphabet", config.word_alphabet as u64);
    cert.truncate_at("max_length", config.word_max_length as u64);
    cert.truncate_at("words", class.word_count);
    cert.truncate_at("height_indices", heights_seq.len() as u64);

    cert.push(CheckRecord::at_most(
        "max-height",
        class.max_height,
        1.0 + config.tol("height_slack"),
    ));
    if let Some(w) = &class.max_height_word {
        cert.note(format!("max height attained by {w}"));
    }
    let h = &class.generator_heights;
    cert.push(CheckRecord::holds("heights-non-constant", h.windows(2).any(|w| w[0] != w[1])));
    let last_p = heights_seq.last();
    let target = 1.0 / (delta.value() * delta.value());
    cert.push(
        CheckRecord::within("height-limit", *h.last().expect("≥ 2 heights"), target, config.tol("height_limit"))
            .with_pair(last_p, last_p),
    );
    cert.push(CheckRecord::at_least(
        "height-limit-index",
        last_p as f64,
        tolerances::LIMIT_MIN_INDEX as f64,
    ));
    cert.push(CheckRecord::exceeds(
        "no-parabolic-word",
        class.min_parabolic_defect,
        config.tol("parabolic_trace"),
    ));
    if let Some(w) = &class.min_parabolic_word {
        cert.note(format!("trace closest to 2 at {w}"));
    }
    cert.note("absence of parabolic words is evidence at the recorded truncation only");
    cert.push(CheckRecord::holds("verdict-irregular", class.verdict == Verdict::Irregular));
    cert.note(format!("verdict: {}", class.verdict));

    let mut table = Table::new("generator_heights", &["n", "p", "height", "target"]);
    for (k, (&p, &v)) in heights_seq.entries().iter().zip(h).enumerate() {
        table.push(vec![(k + 1).into(), p.into(), v.into(), target.into()]);
    }
    Ok(SuiteReport {
        certificate: cert,
        tables: vec![table],
    })
}

fn fineness_suite(config: &SuiteConfig) -> Result<SuiteReport> {
    let delta = &config.delta;
    let sequence = index_sequence(delta, config.generator_count)?;
    let agree = config.tol("closed_form_agreement");
    let mut cert = Certificate::new("fineness", delta.value());
    cert.truncate_at("indices", config.generator_count as u64);
    cert.truncate_at("alphabet", config.fineness_alphabet as u64);
    cert.truncate_at("max_length", config.fineness_max_length as u64);

    let mut pcl = Table::new(
        "pcl_distances",
        &["t", "p", "dist_neg", "bound_neg", "dist_pos", "bound_pos"],
    );
    for &t in &config.t_grid {
        let z = UpperHalfPoint::on_imaginary_axis(t.exp())?;
        for &p in sequence.entries() {
            let circle = IsometryCircle::new(p, delta)?;
            let neg = pcl_distance_neg(t, p);
            let pos = pcl_distance_pos(t, p, delta)?;
            let pos_direct = dist_to_geodesic(z, &circle.geodesic(Side::Positive));
            let neg_direct = dist_to_geodesic(z, &circle.geodesic(Side::Negative));
            cert.push(CheckRecord::at_least(format!("neg-bound t={t}"), neg, pcl_bound_neg(t)).with_pair(p, p));
            cert.push(CheckRecord::at_least(format!("pos-bound t={t}"), pos, pcl_bound_pos(t)).with_pair(p, p));
            cert.push(CheckRecord::within(format!("neg-closed-vs-geodesic t={t}"), neg, neg_direct, agree).with_pair(p, p));
            cert.push(CheckRecord::within(format!("pos-pullback-vs-geodesic t={t}"), pos, pos_direct, agree).with_pair(p, p));
            cert.push(
                CheckRecord::within(
                    format!("pos-closed-vs-geodesic t={t}"),
                    pcl_distance_pos_closed(t, p, delta)?,
                    pos_direct,
                    agree,
                )
                .with_pair(p, p),
            );
            pcl.push(vec![t.into(), p.into(), neg.into(), pcl_bound_neg(t).into(), pos.into(), pcl_bound_pos(t).into()]);
        }

        let m = ft_minimizer(t);
        let e2 = (2.0 * t).exp();
        cert.push(CheckRecord::at_most(format!("minimizer-residual t={t}"), m.residual.abs(), 1e-10 * e2.max(1.0)));
        cert.push(CheckRecord::at_most(format!("minimizer-below-sqrt t={t}"), m.x_t, (0.5 * t).exp()));
        cert.push(CheckRecord::at_least(format!("minimum-above-bound t={t}"), m.f_min, m.bound));
        cert.push(CheckRecord::at_least(format!("critical-value-above-bound t={t}"), m.f_at_x_t, m.bound));
        let hi = 10.0 * (0.5 * t).exp();
        let grid_min = (0..=100_000)
            .map(|k| ft_value(t, 1.0 + (hi - 1.0) * k as f64 / 100_000.0))
            .fold(f64::INFINITY, f64::min);
        cert.push(CheckRecord::at_least(format!("minimum-grid-scan t={t}"), grid_min, m.f_min - 1e-8));
    }
    cert.note(
        "pos-bound compares d(ie^t, S_p) with asinh(e^t); the exact distance satisfies \
         sinh d = e^t/(2p) + p(a_p^2 - 1)/(2e^t), which falls below e^t once e^t exceeds \
         roughly sqrt(p(a_p^2 - 1)), so failures there are expected",
    );

    let estimates = fineness_scan(
        &config.t_grid,
        delta,
        config.fineness_alphabet,
        config.fineness_max_length,
        &config.budget,
    )?;
    let slack = config.tol("fineness_slack");
    let mut fine = Table::new("fineness", &["t", "lower_bound", "empirical", "witness"]);
    for e in &estimates {
        cert.push(CheckRecord::at_least(format!("empirical-above-bound t={}", e.t), e.empirical, e.lower_bound - slack));
        fine.push(vec![e.t.into(), e.lower_bound.into(), e.empirical.into(), e.witness.as_str().into()]);
    }
    for w in estimates.windows(2) {
        if w[1].t > w[0].t {
            cert.push(CheckRecord::exceeds(
                format!("bound-increasing t={}", w[1].t),
                w[1].lower_bound,
                w[0].lower_bound,
            ));
        }
    }
    Ok(SuiteReport {
        certificate: cert,
        tables: vec![fine, pcl],
    })
}

/// `(n, p, value, target, error)` along the generator family.
pub fn busemann_table(sequence: &IndexSequence) -> Result<Table> {
    let fam: Vec<_> = generator_family(sequence).into_iter().map(|m| m.map).collect();
    let lim = busemann_limit(&fam)?;
    let target = 2.0 * sequence.delta().value().ln();
    let mut t = Table::new("busemann", &["n", "p", "value", "target", "error"]);
    for (k, (&p, &v)) in sequence.entries().iter().zip(&lim.values).enumerate() {
        t.push(vec![(k + 1).into(), p.into(), v.into(), target.into(), (v - target).into()]);
    }
    Ok(t)
}

fn times_suite(config: &SuiteConfig) -> Result<SuiteReport> {
    let delta = &config.delta;
    let d = delta.value();
    let sequence = limit_sequence(delta, 2)?;
    let bits = config.extended_bits();
    let mut cert = Certificate::new("times", d);
    cert.truncate_at("limit_indices", sequence.len() as u64);
    cert.truncate_at("time_depth", config.time_depth as u64);
    cert.truncate_at("fibonacci_count", config.fibonacci_count as u64);
    cert.truncate_at("extended_bits", bits as u64);

    // generator family
    let t0 = 2.0 * d.ln();
    let gens = generator_family(&sequence);
    let maps: Vec<_> = gens.iter().map(|m| m.map).collect();
    let lim = busemann_limit(&maps)?;
    let last_p = sequence.last();
    cert.push(
        CheckRecord::within("generator-limit", lim.limit, t0, config.tol("busemann_generator_limit"))
            .with_pair(last_p, last_p),
    );
    cert.push(CheckRecord::holds(
        "generator-values-decreasing",
        lim.values.windows(2).all(|w| w[1] < w[0]),
    ));
    for (&p, &v) in sequence.entries().iter().zip(&lim.values) {
        if p >= 10 {
            cert.push(CheckRecord::at_most("generator-error-model", (v - t0).abs(), 5.0 / (d * p as f64)).with_pair(p, p));
        }
    }
    cert.push(CheckRecord::holds(
        "generator-endpoints-diverge",
        lim.endpoints.windows(2).all(|w| w[1] > w[0]),
    ));
    let ext: Vec<_> = gens.iter().map(|m| m.extended(d, bits)).collect::<Result<_>>()?;
    let lim_ext = busemann_limit_extended(&ext)?;
    cert.push(CheckRecord::within("generator-limit-extended", lim_ext.limit, lim.limit, 1e-9));

    // two-letter family
    let t1 = 2.0 * (d * (d + 1.0)).ln();
    let pairs = pair_family(&sequence, SecondIndex::RawSquare)?;
    let pair_maps: Vec<_> = pairs.iter().map(|m| m.map).collect();
    let pair_lim = busemann_limit(&pair_maps)?;
    let last = pairs.last().expect("non-empty family");
    cert.push(
        CheckRecord::within("pair-limit", pair_lim.limit, t1, config.tol("busemann_pair_limit"))
            .with_pair(last.first, last.second.unwrap_or(0)),
    );
    let pair_ext: Vec<_> = pairs.iter().map(|m| m.extended(d, bits)).collect::<Result<_>>()?;
    let pair_lim_ext = busemann_limit_extended(&pair_ext)?;
    cert.push(CheckRecord::within("pair-limit-extended", pair_lim_ext.limit, pair_lim.limit, 1e-9));
    cert.note(format!(
        "two-letter family uses h_q with q = p^2 outside the index sequence; membership is in <h_m : m >= 1> ({:?})",
        last.family
    ));
    if let Ok(sq) = pair_family(&sequence, SecondIndex::SequenceSquare) {
        let m: Vec<_> = sq.iter().map(|m| m.map).collect();
        if let Ok(l) = busemann_limit(&m) {
            cert.note(format!(
                "sequence-square reading h_(p_(n^2)): {} members, last value {:.6} (4 ln delta = {:.6})",
                sq.len(),
                l.limit,
                4.0 * d.ln()
            ));
        }
    }

    // detection
    let search = TimeSearch {
        depth: config.time_depth,
        endpoint_threshold: config.tol("endpoint_threshold"),
        budget: config.budget,
        ..TimeSearch::default()
    };
    let tol = config.tol("detect_time");
    let mut detected = Table::new(
        "detected_times",
        &["target", "found", "witness", "family", "busemann_value", "error", "endpoint"],
    );
    for (name, t) in [("detect-t0", t0), ("detect-t1", t1)] {
        let found = detect_time(t, delta, &search, tol)?;
        let err = found.entry().map_or(f64::INFINITY, |e| e.busemann_error);
        cert.push(CheckRecord::raw(name, err, tol, tol - err, found.is_found()));
        if let Some(e) = found.entry() {
            cert.push(CheckRecord::exceeds(
                format!("{name}-endpoint"),
                e.endpoint_size,
                search.endpoint_threshold,
            ));
            detected.push(vec![
                t.into(),
                found.is_found().to_string().into(),
                e.witness.as_str().into(),
                format!("{:?}", e.family).into(),
                e.busemann_value.into(),
                e.busemann_error.into(),
                e.endpoint_size.into(),
            ]);
        }
        if let TimeDetection::NotFound { .. } = found {
            cert.note(format!("{name}: no witness within {tol}"));
        }
    }

    // Fibonacci times
    let fib = fibonacci_times(delta, config.fibonacci_count)?;
    let rel = config.tol("fibonacci_relative");
    let mut fib_table = Table::new("fibonacci", &["n", "t_n", "closed_form", "residual"]);
    let worst = (0..fib.entries.len()).map(|n| fib.relative_residual(n)).fold(0.0, f64::max);
    cert.push(CheckRecord::at_most("fibonacci-closed-form", worst, rel));
    for (n, &t) in fib.entries.iter().enumerate() {
        fib_table.push(vec![n.into(), t.into(), fib.closed_form(n).into(), (t - fib.closed_form(n)).into()]);
    }
    cert.push(CheckRecord::within(
        "alpha-beta-discrepancy",
        fib.discrepancy_at_one(),
        d.ln(),
        config.tol("fibonacci_discrepancy"),
    ));
    cert.note(format!(
        "alpha, beta give {:.9} at n = 1 against t_1 = {:.9}; fitted A = {:.9}, B = {:.9} are used",
        fib.alpha_beta_closed_form(1),
        fib.t1,
        fib.fitted_a,
        fib.fitted_b
    ));

    let mut pair_table = Table::new("pair_busemann", &["n", "p", "q", "value", "target"]);
    for (m, &v) in pairs.iter().zip(&pair_lim.values) {
        pair_table.push(vec![m.n.into(), m.first.into(), m.second.unwrap_or(0).into(), v.into(), t1.into()]);
    }
    Ok(SuiteReport {
        certificate: cert,
        tables: vec![busemann_table(&sequence)?, pair_table, detected, fib_table],
    })
}
