//! Acceptance criteria, one PASS/FAIL line each. Runs without the libtest
//! harness so the lines are always printed.

use std::collections::BTreeMap;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use bishape_core::diagram::Diagram;
use bishape_core::enumerate::{enumerate_matchings, enumerate_shapes, enumerate_shapes_with, EnumSpec, ShapeEnumOptions};
use bishape_core::fatgraph::{boundary_components, genus_of};
use bishape_core::sample::{chi_square, BishapeSampler, SamplerConfig, ShapeTable};
use bishape_core::series::{
    fiber_gf, growth_ratio, kappa, shape_poly_1bb, shape_poly_2bb, w_gf, IntPolynomial, PowerSeries,
};
use bishape_core::shape::{project_shape, shape_class, Shape, ShapeClass};
use bishape_core::{eta, eta_inv, theta, theta_inv};
use num_bigint::BigInt;
use num_traits::ToPrimitive;

type Check = std::result::Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> std::result::Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn poly(c: &[(usize, i64)]) -> IntPolynomial {
    let top = c.iter().map(|&(d, _)| d).max().unwrap_or(0);
    let mut coeffs = vec![BigInt::from(0); top + 1];
    for &(d, v) in c {
        coeffs[d] = BigInt::from(v);
    }
    IntPolynomial::new(coeffs)
}

fn profile(shapes: &[Shape]) -> IntPolynomial {
    let mut counts: BTreeMap<usize, i64> = BTreeMap::new();
    for s in shapes {
        *counts.entry(s.arc_count()).or_insert(0) += 1;
    }
    poly(&counts.into_iter().collect::<Vec<_>>())
}

struct Tables {
    s1: Vec<Shape>,
    s2: Vec<Shape>,
    q0: Vec<Shape>,
    q1: Vec<Shape>,
    q0_all: Vec<Shape>,
    q1_all: Vec<Shape>,
}

fn tables() -> Result<Tables, String> {
    let all = ShapeEnumOptions {
        include_disconnected: true,
        ..ShapeEnumOptions::default()
    };
    let e = |r: bishape_core::Result<Vec<Shape>>| r.map_err(|e| e.to_string());
    Ok(Tables {
        s1: e(enumerate_shapes(1, 1))?,
        s2: e(enumerate_shapes(1, 2))?,
        q0: e(enumerate_shapes(2, 0))?,
        q1: e(enumerate_shapes(2, 1))?,
        q0_all: e(enumerate_shapes_with(2, 0, &all))?,
        q1_all: e(enumerate_shapes_with(2, 1, &all))?,
    })
}

fn kappa_table() -> Check {
    let table: [&[i64]; 5] = [
        &[1],
        &[21, 105],
        &[1485, 18018, 50050],
        &[225225, 4660227, 29099070, 56581525],
        &[59520825, 1804142340, 18472089636, 78082504500, 117123756750],
    ];
    for (g, row) in table.iter().enumerate() {
        for (offset, &v) in row.iter().enumerate() {
            // entry k of each row is t = k + 1
            let got = kappa(g + 1, offset + 1).map_err(|e| e.to_string())?;
            ensure(got == BigInt::from(v), || format!("kappa({}, {}) = {got}, expected {v}", g + 1, offset + 1))?;
        }
    }
    Ok("15 entries".into())
}

fn one_backbone_polys() -> Check {
    let expected = [
        poly(&[(3, 1), (4, 2), (5, 1)]),
        poly(&[(5, 21), (6, 189), (7, 651), (8, 1134), (9, 1071), (10, 525), (11, 105)]),
        poly(&[
            (7, 1485),
            (8, 26928),
            (9, 198451),
            (10, 808478),
            (11, 2054305),
            (12, 3442340),
            (13, 3883363),
            (14, 2928926),
            (15, 1419418),
            (16, 400400),
            (17, 50050),
        ]),
    ];
    for (g, want) in expected.iter().enumerate() {
        let got = shape_poly_1bb(g + 1).map_err(|e| e.to_string())?;
        ensure(&got == want, || format!("S_{} = {got}", g + 1))?;
    }
    Ok("S_1, S_2, S_3".into())
}

fn two_backbone_polys() -> Check {
    let expected = [
        poly(&[(3, 1), (4, 1)]),
        poly(&[(5, 21), (6, 167), (7, 479), (8, 645), (9, 416), (10, 104)]),
        poly(&[
            (7, 1485),
            (8, 25401),
            (9, 172546),
            (10, 633370),
            (11, 1413585),
            (12, 2015525),
            (13, 1852256),
            (14, 1064616),
            (15, 348880),
            (16, 49840),
        ]),
    ];
    for (g, want) in expected.iter().enumerate() {
        let got = shape_poly_2bb(g).map_err(|e| e.to_string())?;
        ensure(&got == want, || format!("Q_{g} = {got}"))?;
    }
    for g in 1..=6 {
        let s = shape_poly_1bb(g).map_err(|e| e.to_string())?;
        let (_, r) = s.div_rem_one_plus_z();
        ensure(r == BigInt::from(0), || format!("S_{g} leaves remainder {r}"))?;
    }
    Ok("Q_0, Q_1, Q_2; remainders zero up to S_6".into())
}

fn enumeration_vs_formulas(t: &Tables) -> Check {
    let s1 = profile(&t.s1);
    ensure(t.s1.len() == 4 && s1 == poly(&[(3, 1), (4, 2), (5, 1)]), || format!("1bb g=1 profile {s1}"))?;
    let s2 = profile(&t.s2);
    ensure(t.s2.len() == 3696, || format!("1bb g=2 has {} shapes", t.s2.len()))?;
    ensure(s2 == shape_poly_1bb(2).unwrap(), || format!("1bb g=2 profile {s2}"))?;
    ensure(t.q0.len() == 2, || format!("2bb g=0 has {} shapes", t.q0.len()))?;
    let q1 = profile(&t.q1);
    ensure(t.q1.len() == 1832, || format!("2bb g=1 has {} shapes", t.q1.len()))?;
    ensure(q1 == shape_poly_2bb(1).unwrap(), || format!("2bb g=1 profile {q1}"))?;
    Ok("4, 3696, 2, 1832 shapes; profiles match".into())
}

fn bijections(t: &Tables) -> Check {
    let mut checked = 0;
    for (g, table) in [(1usize, &t.s1), (2, &t.s2)] {
        let mut a_count: BTreeMap<usize, i64> = BTreeMap::new();
        let mut b_count: BTreeMap<usize, i64> = BTreeMap::new();
        for s in table.iter() {
            let class = shape_class(s).map_err(|e| e.to_string())?;
            match class {
                ShapeClass::A => {
                    *a_count.entry(s.arc_count()).or_insert(0) += 1;
                    let b = theta(s).map_err(|e| e.to_string())?;
                    ensure(b.arc_count() + 1 == s.arc_count() && b.genus() == s.genus(), || {
                        format!("theta bookkeeping fails on {}", s.canonical_code())
                    })?;
                    ensure(&theta_inv(&b).map_err(|e| e.to_string())? == s, || {
                        format!("theta_inv(theta(s)) != s for {}", s.canonical_code())
                    })?;
                    let q = eta_inv(s).map_err(|e| e.to_string())?;
                    ensure(q.arc_count() + 1 == s.arc_count() && genus_of(&q) + 1 == s.genus(), || {
                        format!("eta_inv bookkeeping fails on {}", s.canonical_code())
                    })?;
                    ensure(&eta(&q).map_err(|e| e.to_string())? == s, || {
                        format!("eta(eta_inv(s)) != s for {}", s.canonical_code())
                    })?;
                }
                ShapeClass::B => {
                    *b_count.entry(s.arc_count()).or_insert(0) += 1;
                    let a = theta_inv(s).map_err(|e| e.to_string())?;
                    ensure(a.arc_count() == s.arc_count() + 1 && a.genus() == s.genus(), || {
                        format!("theta_inv bookkeeping fails on {}", s.canonical_code())
                    })?;
                    ensure(&theta(&a).map_err(|e| e.to_string())? == s, || {
                        format!("theta(theta_inv(s)) != s for {}", s.canonical_code())
                    })?;
                }
            }
            checked += 1;
        }
        for (&n, &a) in &a_count {
            let b = b_count.get(&(n - 1)).copied().unwrap_or(0);
            ensure(a == b, || format!("genus {g}: {a} A-shapes with {n} arcs, {b} B-shapes with {} arcs", n - 1))?;
        }
        ensure(a_count.values().sum::<i64>() == b_count.values().sum::<i64>(), || format!("genus {g}: |A| != |B|"))?;
    }
    for (g, table) in [(0i64, &t.q0_all), (1, &t.q1_all)] {
        for q in table.iter() {
            let a = eta(q).map_err(|e| e.to_string())?;
            ensure(a.arc_count() == q.arc_count() + 1 && a.genus() == g + 1, || {
                format!("eta bookkeeping fails on {}", q.canonical_code())
            })?;
            ensure(shape_class(&a).map_err(|e| e.to_string())? == ShapeClass::A, || "eta left the A-shapes".into())?;
            ensure(&eta_inv(&a).map_err(|e| e.to_string())? == q, || {
                format!("eta_inv(eta(q)) != q for {}", q.canonical_code())
            })?;
            checked += 1;
        }
    }
    Ok(format!("{checked} shapes round-tripped"))
}

fn closed_form(numerator: &[i64], low: usize, power: u32, order: usize) -> PowerSeries {
    let num = PowerSeries::from_coeffs(numerator.iter().map(|&c| BigInt::from(c)).collect(), order).shift(low);
    let base = PowerSeries::from_coeffs(vec![BigInt::from(1), BigInt::from(-4)], order).pow(power);
    &num * &base.inverse().unwrap()
}

fn fiber_series() -> Check {
    let order = 30;
    let w: Vec<PowerSeries> = (0..=2).map(|g| w_gf(g, order).map_err(|e| e.to_string())).collect::<Result<_, _>>()?;
    let closed = [
        closed_form(&[1], 3, 2, order),
        closed_form(&[21, 20], 5, 5, order),
        closed_form(&[1485, 6096, 1696], 7, 8, order),
    ];
    for g in 0..=2 {
        ensure(w[g] == closed[g], || format!("W_{g} differs from its closed form"))?;
    }
    for (g, ms) in [(0usize, 3..=9), (1, 5..=9)] {
        for m in ms {
            let spec = EnumSpec::matchings(2, m - 2).with_genus(g as i64).connected();
            let brute = enumerate_matchings(&spec, |_| {}).map_err(|e| e.to_string())?;
            let coeff = w[g].coeff(m);
            ensure(*coeff == BigInt::from(brute), || format!("[z^{m}]W_{g} = {coeff}, brute force {brute}"))?;
        }
    }
    let first: Vec<String> = (3..=5).map(|m| w[0].coeff(m).to_string()).collect();
    ensure(first == ["1", "8", "48"], || format!("W_0 starts {first:?}"))?;
    Ok("W_0..W_2 to order 30; brute force m<=9".into())
}

fn growth() -> Check {
    let n = 400;
    let mut worst = 0.0f64;
    for l in 1..=4 {
        let f = fiber_gf(l, n + 1).map_err(|e| e.to_string())?;
        let ratio = growth_ratio(&f, n).map_err(|e| e.to_string())?.to_f64().unwrap();
        let dev = (ratio / 4.0 - 1.0).abs();
        worst = worst.max(dev);
        ensure(dev < 0.02, || format!("l={l}: ratio {ratio}"))?;
    }
    Ok(format!("max deviation {:.4}", worst))
}

fn sampler_uniformity(t: &Tables) -> Check {
    let n = 500_000;
    let table = ShapeTable::from_shapes(1, 2, t.s2.clone()).map_err(|e| e.to_string())?;
    let target = ShapeTable::from_shapes(2, 1, t.q1.clone()).map_err(|e| e.to_string())?;
    let cfg = SamplerConfig {
        seed: 20240601,
        genus: 1,
        arcs: None,
        count: n,
    };
    let mut rng = cfg.rng(0);
    let mut sampler = BishapeSampler::new(&table, None).map_err(|e| e.to_string())?;
    let mut hits = vec![0u64; target.len()];
    let mut arcs: BTreeMap<usize, u64> = BTreeMap::new();
    for _ in 0..n {
        let s = sampler.sample(&mut rng).map_err(|e| e.to_string())?;
        let i = target.index_of(&s).ok_or_else(|| format!("sampled {} is not in the table", s.canonical_code()))?;
        hits[i] += 1;
        *arcs.entry(s.arc_count()).or_insert(0) += 1;
    }
    let chi = chi_square(&hits, &vec![1.0 / target.len() as f64; target.len()]).map_err(|e| e.to_string())?;
    ensure((0.001..=0.999).contains(&chi.p_value), || format!("chi-square p = {}", chi.p_value))?;

    let q1 = shape_poly_2bb(1).unwrap();
    for (m, c) in q1.terms() {
        let p = c.to_f64().unwrap() / 1832.0;
        let seen = arcs.get(&m).copied().unwrap_or(0) as f64;
        let sigma = (n as f64 * p * (1.0 - p)).sqrt();
        ensure((seen - n as f64 * p).abs() <= 3.0 * sigma, || format!("{m} arcs: {seen} draws, expected {}", n as f64 * p))?;
    }

    let p = 3664.0 / 3696.0;
    let attempts = sampler.attempts() as f64;
    let frac = sampler.accepted() as f64 / attempts;
    let sigma = (p * (1.0 - p) / attempts).sqrt();
    ensure((frac - p).abs() <= 3.0 * sigma, || format!("acceptance {frac}, expected {p}"))?;
    Ok(format!("p = {:.3}, acceptance {:.5}", chi.p_value, frac))
}

/// Every partial matching on `lengths`, by partner table.
fn all_diagrams(lengths: &[usize], max_arcs: usize, visit: &mut dyn FnMut(&Diagram)) {
    fn go(
        v: usize,
        arcs: &mut Vec<(usize, usize)>,
        used: &mut Vec<bool>,
        lengths: &[usize],
        max_arcs: usize,
        visit: &mut dyn FnMut(&Diagram),
    ) {
        let n = used.len();
        if v > n {
            visit(&Diagram::new(lengths.to_vec(), arcs).unwrap());
            return;
        }
        if used[v - 1] {
            return go(v + 1, arcs, used, lengths, max_arcs, visit);
        }
        go(v + 1, arcs, used, lengths, max_arcs, visit);
        if arcs.len() == max_arcs {
            return;
        }
        for w in v + 1..=n {
            if !used[w - 1] {
                used[v - 1] = true;
                used[w - 1] = true;
                arcs.push((v, w));
                go(v + 1, arcs, used, lengths, max_arcs, visit);
                arcs.pop();
                used[v - 1] = false;
                used[w - 1] = false;
            }
        }
    }
    let n: usize = lengths.iter().sum();
    go(1, &mut Vec::new(), &mut vec![false; n], lengths, max_arcs, visit);
}

fn compositions(total: usize, parts: usize) -> Vec<Vec<usize>> {
    if parts == 1 {
        return if total > 0 { vec![vec![total]] } else { Vec::new() };
    }
    (1..total)
        .flat_map(|first| {
            compositions(total - first, parts - 1).into_iter().map(move |mut rest| {
                rest.insert(0, first);
                rest
            })
        })
        .collect()
}

fn invariants() -> Check {
    let mut violations = Vec::new();
    let mut seen = 0u64;
    for n in 1..=10 {
        for b in 1..=3 {
            for lengths in compositions(n, b) {
                all_diagrams(&lengths, 5, &mut |d| {
                    seen += 1;
                    let g = genus_of(d);
                    let bd = boundary_components(d);
                    if bd.cycles.iter().map(Vec::len).sum::<usize>() != 2 * d.arc_count() {
                        violations.push(format!("boundary lengths of {}", d.canonical_code()));
                    }
                    let projected = project_shape(d).diagram;
                    if genus_of(&projected) != g {
                        violations.push(format!("projection changes the genus of {}", d.canonical_code()));
                    }
                    let comps = d.components();
                    let sum: i64 = comps.iter().map(genus_of).sum();
                    if g != sum - (comps.len() as i64 - 1) {
                        violations.push(format!("additivity fails on {}", d.canonical_code()));
                    }
                    if genus_of(&d.plant().unwrap()) != g {
                        violations.push(format!("planting changes the genus of {}", d.canonical_code()));
                    }
                    if d.arc_count() < 4 {
                        let free: Vec<usize> = (1..=d.vertex_count()).filter(|&v| d.partner(v).is_none()).collect();
                        for (x, &i) in free.iter().enumerate() {
                            for &j in &free[x + 1..] {
                                let mut arcs = d.arcs();
                                arcs.push((i, j));
                                let bigger = Diagram::new(d.backbone_lengths().to_vec(), &arcs).unwrap();
                                if genus_of(&bigger) < g {
                                    violations.push(format!("adding ({i},{j}) lowers the genus of {}", d.canonical_code()));
                                }
                            }
                        }
                    }
                });
            }
        }
    }
    if violations.is_empty() {
        Ok(format!("{seen} diagrams, zero violations"))
    } else {
        Err(format!("{} violations, first: {}", violations.len(), violations[0]))
    }
}

fn main() -> ExitCode {
    let mut failed = 0;
    let mut report = |id: usize, name: &str, limit: Duration, run: &mut dyn FnMut() -> Check| {
        let start = Instant::now();
        let outcome = run();
        let took = start.elapsed();
        let outcome = match outcome {
            Ok(note) if took > limit => Err(format!("{note}; took {took:.1?}, limit {limit:?}")),
            other => other,
        };
        match outcome {
            Ok(note) => println!("criterion {id} {name}: PASS ({note}; {took:.1?})"),
            Err(why) => {
                failed += 1;
                println!("criterion {id} {name}: FAIL ({why}; {took:.1?})");
            }
        }
    };
    let secs = Duration::from_secs;
    report(1, "kappa table", secs(1), &mut kappa_table);
    report(2, "one-backbone shape polynomials", secs(1), &mut one_backbone_polys);
    report(3, "two-backbone shape polynomials", secs(1), &mut two_backbone_polys);
    let start = Instant::now();
    let tables = tables();
    let table_time = start.elapsed();
    match &tables {
        Ok(t) => {
            report(4, "enumeration against formulas", secs(600), &mut || {
                enumeration_vs_formulas(t).map(|note| format!("{note}; enumeration {table_time:.1?}"))
            });
            report(5, "bijection round trips", secs(60), &mut || bijections(t));
        }
        Err(e) => {
            report(4, "enumeration against formulas", secs(600), &mut || Err(e.clone()));
            report(5, "bijection round trips", secs(60), &mut || Err(e.clone()));
        }
    }
    report(6, "fiber series against brute force", secs(300), &mut fiber_series);
    report(7, "fiber growth rate", secs(5), &mut growth);
    match &tables {
        Ok(t) => report(8, "sampler uniformity", secs(120), &mut || sampler_uniformity(t)),
        Err(e) => report(8, "sampler uniformity", secs(120), &mut || Err(e.clone())),
    }
    report(9, "invariant suite", secs(600), &mut invariants);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
