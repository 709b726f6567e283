use crate::config::{parse_ints, parse_time, Cli, CliError, CliResult, Command, KernelMode, RunConfig};
use crate::render::{emit, Artifact, Renderer, Table};
use aztec::boundary_inverse::{partition_chain, propagate_full_inverse, recurrence_frames, w_inverse_recurrence};
use aztec::dynamics::{equivalence_report, orbit_json, orbit_period, shuffle_step, ShuffleState};
use aztec::factorization::{g_operator, lu_decompose, ul_decompose, LimitKernel};
use aztec::graphs::{aztec_black, aztec_white, build_aztec, build_tower, enumerate_tilings, lgv_matrix, DimerGraph, DrGraph, Flavor};
use aztec::kasteleyn::{
    inverse_kasteleyn_via_blocks, kasteleyn_matrix, schur_blocks, stated_aztec_sign, stated_tower_sign, KasteleynMatrix,
};
use aztec::numerics::{ExactMatrix, GaussianRational, Rational};
use aztec::periodic::{contour_kernel, default_epsilon, transition_symbols, wiener_hopf_from_dynamics, Mode};
use aztec::transitions::{default_window, em_kernel_finite, extract_w, finite_kernel, product_v, TransitionFamily, WindowedOperator};
use aztec::weights::{check_assumption, faces_from_weights, WeightField};
use aztec::Error;
use num_traits::One;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

/// Largest Kasteleyn dimension inverted exactly.
const MAX_EXACT_DIM: usize = 240;
/// Guard on the number of tilings enumerated by `verify`.
const ENUMERATION_GUARD: u64 = 50_000;
/// Longest orbit searched for a period.
const MAX_PERIOD: usize = 64;
/// Corridor used as the finite reference for the limiting kernel.
const REFERENCE_CORRIDOR: usize = 20;

pub fn run(cli: &Cli) -> CliResult<()> {
    let cfg = RunConfig::validate(cli)?;
    let r = Renderer::new(&cfg);
    let art = match &cfg.command {
        Command::Kasteleyn => kasteleyn(&cfg, r)?,
        Command::Lgv => lgv(&cfg, r)?,
        Command::KernelFinite { queries } => kernel_finite(&cfg, r, queries)?,
        Command::KernelLimit { queries } => kernel_limit(&cfg, r, queries)?,
        Command::Shuffle { steps, face } => shuffle(&cfg, r, *steps, face.as_deref())?,
        Command::Verify => return verify(&cfg),
        Command::Toeplitz { queries, mode } => toeplitz(&cfg, r, queries, *mode)?,
        Command::Winv { full } => winv(&cfg, r, *full)?,
    };
    emit(&cfg, &art)
}

fn graph(cfg: &RunConfig, w: &WeightField) -> CliResult<DimerGraph> {
    let n = cfg.common.n;
    let g = match cfg.common.p {
        Some(p) => build_tower(n, p, w)?,
        None => build_aztec(n, w)?,
    };
    if g.size() > MAX_EXACT_DIM {
        return Err(CliError::Capacity(format!("{} vertices per colour exceed the exact limit {MAX_EXACT_DIM}", g.size())));
    }
    Ok(g)
}

fn flavor_json(f: Flavor) -> Value {
    match f {
        Flavor::Aztec { n } => json!({ "kind": "aztec", "n": n }),
        Flavor::Tower { n, p } => json!({ "kind": "tower", "n": n, "p": p }),
    }
}

fn stated_sign(f: Flavor) -> GaussianRational {
    match f {
        Flavor::Aztec { n } => stated_aztec_sign(n),
        Flavor::Tower { n, p } => stated_tower_sign(n, p),
    }
}

fn kasteleyn(cfg: &RunConfig, r: Renderer) -> CliResult<Artifact> {
    let w = cfg.weights()?;
    let g = graph(cfg, &w)?;
    let k = kasteleyn_matrix(&g);
    let det = k.det()?;
    let inv = k.inverse()?;
    let g_r = |x: &GaussianRational| r.gaussian(x);
    let result = json!({
        "graph": flavor_json(g.flavor),
        "det": r.gaussian(&det),
        "sign": r.gaussian(&k.det_sign()?),
        "stated_sign": r.gaussian(&stated_sign(g.flavor)),
        "partition_function": r.rational(&k.partition_function()?),
        "matrix": r.labeled(&k.matrix, &k.blacks, &k.whites, g_r),
        "inverse": r.labeled(&inv, &k.whites, &k.blacks, g_r),
    });
    Ok(Artifact { result, table: r.labeled_table(&inv, &k.whites, &k.blacks, g_r) })
}

fn lgv(cfg: &RunConfig, r: Renderer) -> CliResult<Artifact> {
    let w = cfg.weights()?;
    let g = graph(cfg, &w)?;
    let wm = lgv_matrix(&g);
    let unit = DimerGraph::new(g.flavor, g.whites.clone(), g.blacks.clone(), |_, _| Rational::one())?;
    let counts = lgv_matrix(&unit);
    let (starts, ends) = DrGraph::endpoints(g.flavor);
    let q_r = |x: &Rational| r.rational(x);
    let result = json!({
        "graph": flavor_json(g.flavor),
        "w": r.labeled(&wm, &starts, &ends, q_r),
        "det": r.rational(&wm.det()?),
        "dr_counts": r.labeled(&counts, &starts, &ends, q_r),
        "partition_function": r.rational(&kasteleyn_matrix(&g).partition_function()?),
    });
    Ok(Artifact { result, table: r.labeled_table(&wm, &starts, &ends, q_r) })
}

fn queries4(queries: &[String]) -> CliResult<Vec<(usize, i64, usize, i64)>> {
    queries
        .iter()
        .map(|q| {
            let v = parse_ints(q, 4, "--query")?;
            Ok((parse_time(v[0], "--query")?, v[1], parse_time(v[2], "--query")?, v[3]))
        })
        .collect()
}

fn kernel_table(rows: &[(usize, i64, usize, i64)], values: &[Value], r: Renderer) -> Table {
    let mut t = Table::new(&["m1", "x1", "m2", "x2", "value"]);
    for (q, v) in rows.iter().zip(values) {
        t.push(vec![q.0.to_string(), q.1.to_string(), q.2.to_string(), q.3.to_string(), r.cell(v)]);
    }
    t
}

fn kernel_finite(cfg: &RunConfig, r: Renderer, queries: &[String]) -> CliResult<Artifact> {
    let p = cfg.common.p.ok_or_else(|| CliError::Config("kernel-finite needs --p".into()))?;
    let qs = queries4(queries)?;
    let f = TransitionFamily::new(cfg.common.n, cfg.weights()?)?;
    let k = finite_kernel(&f, p, None)?;
    let values = qs.iter().map(|&(m1, x1, m2, x2)| Ok(r.rational(&k.kernel(m1, x1, m2, x2)?))).collect::<CliResult<Vec<_>>>()?;
    let result = json!({
        "n": f.n,
        "p": p,
        "kernel": qs.iter().zip(&values).map(|(q, v)| json!({ "m1": q.0, "x1": q.1, "m2": q.2, "x2": q.3, "value": v })).collect::<Vec<_>>(),
    });
    Ok(Artifact { result, table: kernel_table(&qs, &values, r) })
}

fn kernel_limit(cfg: &RunConfig, r: Renderer, queries: &[String]) -> CliResult<Artifact> {
    let qs = queries4(queries)?;
    let f = TransitionFamily::new(cfg.common.n, cfg.weights()?)?;
    let lk = LimitKernel::new(&f, cfg.common.tol)?;
    let values = qs.iter().map(|&(m1, x1, m2, x2)| Ok(r.float(lk.kernel(m1, x1, m2, x2)?))).collect::<CliResult<Vec<_>>>()?;
    let result = json!({
        "n": f.n,
        "tol": cfg.common.tol,
        "depth": lk.depth,
        "assumption": lk.assumption,
        "kernel": qs.iter().zip(&values).map(|(q, v)| json!({ "m1": q.0, "x1": q.1, "m2": q.2, "x2": q.3, "value": v })).collect::<Vec<_>>(),
    });
    Ok(Artifact { result, table: kernel_table(&qs, &values, r) })
}

fn shuffle(cfg: &RunConfig, r: Renderer, steps: usize, face: Option<&str>) -> CliResult<Artifact> {
    let face = face.map(|s| parse_ints(s, 2, "--face").map(|v| (v[0], v[1]))).transpose()?;
    let faces = faces_from_weights(&cfg.weights()?);
    let mut orbit = vec![ShuffleState::new(faces.clone())];
    for _ in 0..steps {
        let next = shuffle_step(orbit.last().unwrap())?;
        orbit.push(next);
    }
    let period = match faces.periodic_dims() {
        Some(_) => orbit_period(&faces, MAX_PERIOD)?,
        None => None,
    };
    let mut table = Table::new(&["generation", "k", "j", "value"]);
    for (t, s) in orbit.iter().enumerate() {
        for (c, v) in s.faces.values() {
            if face.is_none_or(|f| f == *c) {
                table.push(vec![t.to_string(), c.0.to_string(), c.1.to_string(), r.cell(&r.rational(v))]);
            }
        }
    }
    let result = json!({ "steps": steps, "period": period, "max_period": MAX_PERIOD, "orbit": orbit_json(&orbit, face) });
    Ok(Artifact { result, table })
}

fn winv(cfg: &RunConfig, r: Renderer, full: bool) -> CliResult<Artifact> {
    if cfg.common.p.is_some() {
        return Err(CliError::Config("winv works on the Aztec diamond; drop --p".into()));
    }
    let n = cfg.common.n;
    let w = cfg.weights()?;
    let frames = recurrence_frames(&w, n)?;
    let chain = partition_chain(&w, n)?;
    let inv = &frames[0].w_inverse;
    let whites: Vec<_> = (1..=n).map(|i| aztec_white(n, i)).collect();
    let blacks: Vec<_> = (1..=n).map(|i| aztec_black(n, i)).collect();
    let g_r = |x: &GaussianRational| r.gaussian(x);
    let mut result = json!({
        "n": n,
        "w_inverse": r.labeled(inv, &whites, &blacks, g_r),
        "levels": frames.iter().map(|f| json!({ "size": f.size, "faces": f.faces.len() })).collect::<Vec<_>>(),
        "partition_chain": chain.iter().map(|z| r.rational(z)).collect::<Vec<_>>(),
    });
    let table = if full {
        let g = graph(cfg, &w)?;
        let kinv = propagate_full_inverse(&w, n, inv)?;
        result["k_inverse"] = r.labeled(&kinv, &g.whites, &g.blacks, g_r);
        r.labeled_table(&kinv, &g.whites, &g.blacks, g_r)
    } else {
        r.labeled_table(inv, &whites, &blacks, g_r)
    };
    Ok(Artifact { result, table })
}

fn toeplitz(cfg: &RunConfig, r: Renderer, queries: &[String], mode: KernelMode) -> CliResult<Artifact> {
    let w = cfg.weights()?;
    if !w.is_periodic() {
        return Err(CliError::Config("toeplitz needs periodic weights (--periodic or a periodic file)".into()));
    }
    let f = TransitionFamily::new(cfg.common.n, w)?;
    let symbols = transition_symbols(&f)?;
    let pair = wiener_hopf_from_dynamics(&f)?;
    let epsilon = match cfg.common.epsilon {
        Some(e) => e,
        None => default_epsilon(&f)?,
    };
    let mode_k = match mode {
        KernelMode::Top => Mode::Top,
        KernelMode::Bottom => Mode::Bottom,
    };
    let mut table = Table::new(&["m1", "y1", "m2", "y2", "r", "s", "re", "im"]);
    let mut kernels = Vec::new();
    for q in queries {
        let v = parse_ints(q, 4, "--query")?;
        let (m1, m2) = (parse_time(v[0], "--query")?, parse_time(v[2], "--query")?);
        let block = contour_kernel(&symbols, &pair, (m1, v[1]), (m2, v[3]), mode_k, epsilon, cfg.common.nodes)?;
        for i in 0..block.matrix.nrows() {
            for j in 0..block.matrix.ncols() {
                let z = block.matrix[(i, j)];
                let cells = [r.float(z.re), r.float(z.im)];
                table.push(vec![
                    v[0].to_string(),
                    v[1].to_string(),
                    v[2].to_string(),
                    v[3].to_string(),
                    i.to_string(),
                    j.to_string(),
                    r.cell(&cells[0]),
                    r.cell(&cells[1]),
                ]);
            }
        }
        kernels.push(json!({ "m1": m1, "y1": v[1], "m2": m2, "y2": v[3], "block": block.to_json() }));
    }
    let result = json!({
        "n": f.n,
        "mode": mode,
        "epsilon": epsilon,
        "nodes": cfg.common.nodes,
        "symbols": symbols.iter().map(|s| s.to_json()).collect::<Vec<_>>(),
        "wiener_hopf": pair.to_json(),
        "kernels": kernels,
    });
    Ok(Artifact { result, table })
}

struct Check {
    name: &'static str,
    status: &'static str,
    detail: String,
}

fn check(name: &'static str, f: impl FnOnce() -> aztec::Result<(bool, String)>) -> Check {
    match f() {
        Ok((true, d)) => Check { name, status: "pass", detail: d },
        Ok((false, d)) => Check { name, status: "fail", detail: d },
        Err(Error::Capacity(m)) => Check { name, status: "skipped", detail: m },
        Err(Error::Assumption(m)) => Check { name, status: "skipped", detail: format!("assumption: {m}") },
        Err(e) => Check { name, status: "fail", detail: e.to_string() },
    }
}

fn agree_on_certified(lhs: &WindowedOperator, rhs: &WindowedOperator) -> aztec::Result<(bool, usize)> {
    let (lo, hi) = lhs.window();
    let mut count = 0;
    for j in lo..=hi {
        for k in lo..=hi {
            if lhs.is_exact(j, k) && rhs.is_exact(j, k) {
                if lhs.entry(j, k)? != rhs.entry(j, k)? {
                    return Ok((false, count));
                }
                count += 1;
            }
        }
    }
    Ok((count > 0, count))
}

fn tiling_sum(g: &DimerGraph) -> aztec::Result<Rational> {
    Ok(enumerate_tilings(g, ENUMERATION_GUARD)?.into_iter().map(|x| x.1).sum())
}

fn signed_w(k: &KasteleynMatrix, n: usize) -> aztec::Result<ExactMatrix> {
    let s = schur_blocks(k)?;
    Ok(ExactMatrix::from_fn(n, n, |i, j| &GaussianRational::i_pow(-((i + j + 1) as i64)) * s.tilde_w.get(i, j)))
}

fn verify_weights(cfg: &RunConfig, rng: &mut ChaCha8Rng) -> CliResult<(WeightField, WeightField)> {
    let window = cfg.weights()?;
    if window.is_periodic() {
        return Ok((window.clone(), window));
    }
    // redraw until the limit-kernel check has a decaying field
    let mut periodic = WeightField::random_periodic(rng, 2, 2);
    for _ in 0..64 {
        if check_assumption(&periodic, 0..2).report().is_ok_and(|r| r.rho <= 0.8) {
            break;
        }
        periodic = WeightField::random_periodic(rng, 2, 2);
    }
    Ok((window, periodic))
}

fn verify(cfg: &RunConfig) -> CliResult<()> {
    let n = cfg.common.n;
    let p = cfg.common.p.unwrap_or(1);
    let mut rng = cfg.rng();
    let (w, wp) = verify_weights(cfg, &mut rng)?;
    let mut checks = Vec::new();

    let g = build_aztec(n, &w)?;
    let k = kasteleyn_matrix(&g);
    if g.size() > MAX_EXACT_DIM {
        return Err(CliError::Capacity(format!("{} vertices per colour exceed the exact limit {MAX_EXACT_DIM}", g.size())));
    }
    checks.push(check("schur_inverse", || {
        let via = inverse_kasteleyn_via_blocks(&schur_blocks(&k)?)?;
        Ok((via == k.inverse()?, "block assembly against the direct inverse".into()))
    }));
    checks.push(check("aztec_lgv_determinant", || {
        let (d, z) = (lgv_matrix(&g).det()?, k.partition_function()?);
        Ok((d == z, format!("det W = {d}, |det K| = {z}")))
    }));
    checks.push(check("aztec_enumeration", || {
        let (s, z) = (tiling_sum(&g)?, k.partition_function()?);
        Ok((s == z, format!("sum over tilings = {s}, |det K| = {z}")))
    }));
    checks.push(check("boundary_recurrence", || {
        let direct = signed_w(&k, n)?.inverse()?;
        Ok((w_inverse_recurrence(&w, n)? == direct, "recurrence against the inverse of the signed Schur complement".into()))
    }));
    checks.push(check("full_inverse_propagation", || {
        let full = propagate_full_inverse(&w, n, &w_inverse_recurrence(&w, n)?)?;
        Ok((full == k.inverse()?, "Schur propagation against the direct inverse".into()))
    }));
    checks.push(check("partition_chain", || {
        let (c, z) = (partition_chain(&w, n)?, k.partition_function()?);
        let last = c.last().cloned().unwrap_or_else(Rational::one);
        Ok((last == z, format!("chain gives {last}, |det K| = {z}")))
    }));
    checks.push(check("tower_transfer_determinant", || {
        let f = TransitionFamily::new(n, w.clone())?;
        let (lo, hi) = default_window(n, p);
        let d = extract_w(&product_v(&f, lo, hi)?, n, p)?.det()?;
        let gt = build_tower(n, p, &w)?;
        if gt.size() > MAX_EXACT_DIM {
            return Err(Error::Capacity(format!("tower of size {} is too large", gt.size())));
        }
        let z = kasteleyn_matrix(&gt).partition_function()?;
        let dl = lgv_matrix(&gt).det()?;
        Ok((d == z && dl == z, format!("det W (transfer) = {d}, det W (paths) = {dl}, |det K| = {z}")))
    }));
    checks.push(check("finite_kernel_routes", || {
        let f = TransitionFamily::new(n, w.clone())?;
        let pk = finite_kernel(&f, p, None)?;
        let (x1, x2) = (n as i64 - 1, -1);
        let a = pk.kernel(0, x1, 1, x2)?;
        let b = em_kernel_finite(&f, p, (0, x1, 1, x2))?;
        Ok((a == b, format!("K(0,{x1};1,{x2}) = {a}")))
    }));
    checks.push(check("shuffle_hat_equivalence", || {
        let rep = equivalence_report(&wp, 3)?;
        Ok((rep.all_equal(), format!("{} generations compared", rep.generations.len())))
    }));
    checks.push(check("lu_ul_reproduce_g", || {
        let fp = TransitionFamily::new(n, wp.clone())?;
        let (lo, hi) = (-8, 4);
        let gop = g_operator(&fp, lo, hi)?;
        let (a, ca) = agree_on_certified(&lu_decompose(&fp, lo, hi)?.product(true)?, &gop)?;
        let (b, cb) = agree_on_certified(&ul_decompose(&fp, lo, hi)?.product(false)?, &gop)?;
        Ok((a && b, format!("{ca} and {cb} certified entries agree")))
    }));
    checks.push(check("limit_kernel_vs_long_corridor", || {
        let fp = TransitionFamily::new(n, wp.clone())?;
        let lk = LimitKernel::new(&fp, 1e-13)?;
        let mut worst: f64 = 0.0;
        for q in [(0, 0, 0, 0), (1, 0, 2, -1), (2, -1, 1, 0)] {
            let fin = aztec::numerics::to_f64(&em_kernel_finite(&fp, REFERENCE_CORRIDOR, q)?);
            worst = worst.max((lk.kernel(q.0, q.1, q.2, q.3)? - fin).abs());
        }
        Ok((worst < 1e-8, format!("largest difference {worst:e}")))
    }));

    let failed = checks.iter().filter(|c| c.status == "fail").count();
    let mut table = Table::new(&["check", "status", "detail"]);
    for c in &checks {
        table.push(vec![c.name.into(), c.status.into(), c.detail.clone()]);
    }
    let result = json!({
        "n": n,
        "p": p,
        "passed": failed == 0,
        "checks": checks.iter().map(|c| json!({ "name": c.name, "status": c.status, "detail": c.detail })).collect::<Vec<_>>(),
    });
    emit(cfg, &Artifact { result, table })?;
    if failed > 0 {
        return Err(CliError::Math(Error::Consistency(format!("{failed} verification checks failed"))));
    }
    Ok(())
}
