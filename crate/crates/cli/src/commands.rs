use std::fs::File;
use std::io::{BufReader, BufWriter};
use std::path::Path;

use anyhow::{bail, Context, Result};
use mlc_core::channel::{from_db, to_db};
use mlc_core::config::{parse_m_list, parse_snr_grid};
use mlc_core::format::g9;
use mlc_core::ldpc::{construct, write_alist, CheckRule, DecoderConfig};
use mlc_core::mi::{self, Backend, CurveLevel, MiCurve, QuadratureSpec};
use mlc_core::rate::{ar_points, crossover, line_from_mi, RateLine};
use mlc_core::sim::{SimConfig, SimMode, Simulator};
use mlc_core::table::{self, MiCurveRow};

use crate::args::*;

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::MiCurve(a) => mi_curve(a),
        Command::Convexity(a) => convexity(a),
        Command::ArLine(a) => ar_line(a),
        Command::BerSweep(a) => ber_sweep(a),
        Command::SnrSearch(a) => snr_search(a),
        Command::GenCode(a) => gen_code(a),
    }
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    let f = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    Ok(BufWriter::new(f))
}

fn read_rows(path: &Path) -> Result<Vec<MiCurveRow>> {
    let f = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    table::read_mi_curve(BufReader::new(f)).with_context(|| format!("reading {}", path.display()))
}

fn mi_curve(a: MiCurveArgs) -> Result<()> {
    let gammas = mi::linear_grid(a.gamma_min, a.gamma_max, a.step)?;
    if gammas[0] < 0.0 {
        bail!("SNR grid must start at or above 0");
    }
    let backend = match a.backend {
        BackendArg::Quad => Backend::Quadrature(QuadratureSpec {
            nodes: a.nodes,
            ..QuadratureSpec::default()
        }),
        BackendArg::Mc => Backend::MonteCarlo {
            samples: a.samples,
            seed: a.seed,
        },
    };
    let rows: Vec<MiCurveRow> = mi::mi_table(&gammas, &backend)?
        .iter()
        .map(MiCurveRow::from)
        .collect();
    table::write_mi_curve(create(&a.out)?, &rows)?;
    println!("wrote {} points to {}", rows.len(), a.out.display());
    Ok(())
}

fn level(l: LevelArg) -> CurveLevel {
    match l {
        LevelArg::Low => CurveLevel::Low,
        LevelArg::High => CurveLevel::High,
        LevelArg::Total => CurveLevel::Total,
    }
}

fn convexity(a: ConvexityArgs) -> Result<()> {
    let curve = table::curve_from_rows(&read_rows(&a.input)?, level(a.level))?;
    let r = mi::is_convex_on(&curve, a.a, a.b)?;
    println!("interval {} {}", g9(r.gamma_a), g9(r.gamma_b));
    println!("interior_samples {}", r.interior_samples);
    println!("max_chord_violation {}", g9(r.max_chord_violation));
    println!("convex {}", r.is_convex);
    Ok(())
}

/// Low-level curve on `[0, 2·gamma1]` with `gamma1` itself as a node.
fn computed_low_curve(gamma1: f64, step: f64) -> Result<MiCurve> {
    let mut gammas = mi::linear_grid(0.0, 2.0 * gamma1, step)?;
    if !gammas.iter().any(|&g| (g - gamma1).abs() <= 1e-12 * gamma1) {
        gammas.push(gamma1);
        gammas.sort_by(f64::total_cmp);
        gammas.dedup_by(|x, y| (*x - *y).abs() <= 1e-12 * gamma1);
    }
    Ok(MiCurve::compute(
        CurveLevel::Low,
        &gammas,
        &Backend::Quadrature(QuadratureSpec::default()),
    )?)
}

fn ar_line(a: ArLineArgs) -> Result<()> {
    let ms = parse_m_list(&a.m)?;
    let curve = match &a.input {
        Some(p) => table::curve_from_rows(&read_rows(p)?, CurveLevel::Low)?,
        None => computed_low_curve(a.gamma1, a.step)?,
    };
    let line = match a.rate1 {
        Some(r) => RateLine::new(a.gamma1, r)?,
        None => line_from_mi(a.gamma1, &curve)?,
    };
    let points = ar_points(&line, &curve, &ms)?;
    table::write_ar_points(create(&a.out)?, &points)?;
    println!("anchor {} {}", g9(line.gamma1()), g9(line.rate1()));
    println!("slope {}", g9(line.slope()));
    println!("M snr_linear ar_bits mi_bits gain_db");
    for p in &points {
        println!(
            "{} {} {} {} {}",
            p.m,
            g9(p.gamma_m),
            g9(p.ar),
            g9(p.mi_at_gamma_m),
            p.gain_db.map_or_else(|| "-".to_string(), g9)
        );
    }
    for (lo, hi) in crossover(&line, &curve, a.tolerance) {
        println!("line_above_curve {} {}", g9(lo), g9(hi));
    }
    println!("wrote {} points to {}", points.len(), a.out.display());
    Ok(())
}

fn sim_config(s: &SimArgs) -> Result<SimConfig> {
    let rule = match s.rule {
        RuleArg::SumProduct => CheckRule::SumProduct,
        RuleArg::MinSum => CheckRule::MinSum {
            scale: s.min_sum_scale,
        },
    };
    let mut cfg = SimConfig::new(&s.code);
    cfg.m = s.m;
    cfg.mode = match s.mode {
        ModeArg::Rep => SimMode::SymbolRepetition,
        ModeArg::Lowrate => SimMode::LowRateCode,
    };
    cfg.snr_db = parse_snr_grid(&s.snr_db)?;
    cfg.seed = s.seed;
    cfg.workers = s.workers;
    cfg.max_frames = s.max_frames;
    cfg.min_frames = s.min_frames;
    cfg.min_bit_errors = s.min_errors;
    cfg.batch = s.batch;
    cfg.decoder = DecoderConfig {
        max_iters: s.max_iters,
        rule,
    };
    // results depend on the worker count, not on the thread count
    let _ = rayon::ThreadPoolBuilder::new()
        .num_threads(s.workers)
        .build_global();
    Ok(cfg)
}

fn describe(sim: &Simulator) {
    let code = sim.code();
    let cfg = sim.config();
    eprintln!(
        "code n={} k={} rate={} mode={} M={} throughput={} bit/use",
        code.n(),
        code.k(),
        g9(code.rate()),
        cfg.mode.as_str(),
        cfg.m,
        g9(sim.throughput())
    );
}

fn ber_sweep(a: BerSweepArgs) -> Result<()> {
    let sim = Simulator::from_config(sim_config(&a.sim)?)?;
    describe(&sim);
    let mut records = Vec::new();
    for &db in &sim.config().snr_db {
        let r = sim.run_point(from_db(db))?;
        eprintln!(
            "snr_db={} frames={} errors={} ber={} stderr={}{}",
            g9(r.snr_db),
            r.frames,
            r.bit_errors,
            g9(r.ber),
            g9(r.stderr),
            if r.low_confidence { " low-confidence" } else { "" }
        );
        records.push(r);
    }
    let cfg = sim.config();
    table::write_ber(create(&a.out)?, cfg.m, cfg.mode.as_str(), &records)?;
    println!("wrote {} points to {}", records.len(), a.out.display());
    Ok(())
}

fn snr_search(a: SnrSearchArgs) -> Result<()> {
    let mut cfg = sim_config(&a.sim)?;
    let mut target = a.target_ber;
    if a.full_scale {
        target = 1e-6;
    }
    if a.full_scale {
        let k = mlc_core::ldpc::LdpcCode::load_alist(&cfg.code_path)?.k() as f64;
        let frames = (2.0 * cfg.min_bit_errors.max(1) as f64 / (target * k)).ceil() as u64;
        cfg.max_frames = cfg.max_frames.max(frames);
    }
    let sim = Simulator::from_config(cfg)?;
    describe(&sim);
    if a.full_scale {
        let grid = &sim.config().snr_db;
        let span = grid.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
            - grid.iter().cloned().fold(f64::INFINITY, f64::min);
        let steps = (span / mlc_core::sim::SEARCH_RESOLUTION_DB).log2().ceil().max(0.0) + 2.0;
        let hi = from_db(grid.iter().cloned().fold(f64::NEG_INFINITY, f64::max));
        let per_point = sim.estimate_runtime(hi, sim.config().max_frames)?;
        println!(
            "full-scale estimate: {} points of up to {} frames, about {} hours",
            steps,
            sim.config().max_frames,
            g9(per_point.as_secs_f64() * steps / 3600.0)
        );
    }
    let r = sim.snr_search(target)?;
    for e in &r.evaluations {
        eprintln!("snr_db={} frames={} ber={}", g9(e.snr_db), e.frames, g9(e.ber));
    }
    println!("target_ber {}", g9(target));
    println!("snr_linear {}", g9(r.gamma_hat));
    println!("snr_db {}", g9(to_db(r.gamma_hat)));
    println!("bracket_db {} {}", g9(r.bracket_db.0), g9(r.bracket_db.1));
    println!("ber {}", g9(r.record.ber));
    println!("stderr {}", g9(r.record.stderr));
    println!("frames {}", r.record.frames);
    if let Some(out) = &a.out {
        let cfg = sim.config();
        let mut evals = r.evaluations.clone();
        evals.sort_by(|x, y| x.snr_db.total_cmp(&y.snr_db));
        table::write_ber(create(out)?, cfg.m, cfg.mode.as_str(), &evals)?;
    }
    Ok(())
}

fn gen_code(a: GenCodeArgs) -> Result<()> {
    if !(a.rate > 0.0 && a.rate < 1.0) {
        bail!("rate must lie in (0, 1)");
    }
    let code = match a.kind {
        CodeKind::Peg => {
            let checks = (a.n as f64 * (1.0 - a.rate)).round() as usize;
            construct::peg(a.n, checks, a.col_weight, a.seed)?
        }
        CodeKind::Ira => {
            let k = (a.n as f64 * a.rate).round() as usize;
            construct::ira(a.n, k, a.col_weight, a.seed)?
        }
    };
    std::fs::write(&a.out, write_alist(&code))
        .with_context(|| format!("writing {}", a.out.display()))?;
    println!(
        "n {} k {} rate {} edges {}",
        code.n(),
        code.k(),
        g9(code.rate()),
        code.edges()
    );
    Ok(())
}
