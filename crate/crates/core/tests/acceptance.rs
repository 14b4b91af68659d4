//! End-to-end acceptance checks. Each test prints one `criterion N: PASS|FAIL`
//! line with the measured values and the pinned tolerance.

mod common;

use std::collections::BTreeMap;
use std::sync::Mutex;

use common::*;
use dmodc_core::analysis::{analyze_a2a, analyze_rp, analyze_sp, Pattern, SpOrder};
use dmodc_core::harness::{bench_route, run_sweep, sample_amount, scaling_preset, ExperimentRecord, SweepConfig, ThrowSpec};
use dmodc_core::preprocess::{PortTarget, Preprocessed, UNREACHABLE};
use dmodc_core::router::Algorithm;
use dmodc_core::topology::{EquipmentKind, PgftParams, Topology, Uuid, UuidMode};

// Criteria run one at a time so the runtime measurement is not disturbed.
static SERIAL: Mutex<()> = Mutex::new(());

fn verdict(n: u32, pass: bool, detail: String) {
    println!("criterion {n}: {} — {detail}", if pass { "PASS" } else { "FAIL" });
    assert!(pass, "criterion {n} failed: {detail}");
}

fn small() -> Topology {
    PgftParams::new(vec![2, 2, 3], vec![1, 2, 2], vec![1, 2, 1])
        .build(UuidMode::Sequential)
        .unwrap()
}

fn corpus() -> Vec<Topology> {
    (0..50).map(|seed| random_instance(1000 + seed, 500, 400, 20).1).collect()
}

#[test]
fn criterion_1_costs_match_updown_bfs() {
    let _g = SERIAL.lock().unwrap_or_else(|e| e.into_inner());
    let (mut pairs, mut mismatches) = (0usize, Vec::new());
    for (i, topo) in corpus().iter().enumerate() {
        let pre = Preprocessed::run(topo);
        let oracle = oracle_costs(topo);
        let leaves = oracle_leaves(topo);
        assert_eq!(pre.costs.width(), leaves.len());
        for s in 0..pre.fabric.switch_count() as u32 {
            let su = pre.fabric.switch_uuid(s);
            for (col, &l) in pre.costs.leaves().iter().enumerate() {
                let lu = pre.fabric.switch_uuid(l);
                let want = oracle.get(&(su, lu)).copied().unwrap_or(UNREACHABLE);
                let got = pre.costs.row(s)[col];
                pairs += 1;
                if want != got {
                    mismatches.push((i, su, lu, want, got));
                }
            }
        }
    }
    verdict(
        1,
        mismatches.is_empty(),
        format!(
            "{pairs} (switch, leaf) pairs over 50 instances, {} mismatches (tolerance 0) {:?}",
            mismatches.len(),
            mismatches.first()
        ),
    );
}

/// Every hop moves one rank; no climb after the first descent.
fn is_up_then_down(ranks: &[u32]) -> bool {
    let mut descending = false;
    for w in ranks.windows(2) {
        if w[1] + 1 == w[0] {
            descending = true;
        } else if w[1] != w[0] + 1 || descending {
            return false;
        }
    }
    true
}

#[test]
fn criterion_2_routes_are_legal_and_minimal() {
    let _g = SERIAL.lock().unwrap_or_else(|e| e.into_inner());
    let (mut routed, mut unreachable, mut bad) = (0usize, 0usize, Vec::new());
    for (i, topo) in corpus().iter().enumerate() {
        let pre = Preprocessed::run(topo);
        let lft = Algorithm::Dmodc.route(&pre).unwrap();
        let rank = oracle_ranks(topo);
        let cost = oracle_costs(topo);
        let nodes: Vec<_> = topo.nodes().map(|n| (n.uuid, n.leaf.uuid)).collect();
        for &(src, ls) in &nodes {
            for &(dst, ld) in &nodes {
                match (cost.get(&(ls, ld)), oracle_walk(topo, &pre, &lft, src, dst)) {
                    (Some(&c), Walk::Delivered(ports)) => {
                        routed += 1;
                        let switches: Vec<Uuid> = ports[1..].iter().map(|p| p.0).collect();
                        let ranks: Vec<u32> = switches.iter().map(|u| rank[u]).collect();
                        let up_down = is_up_then_down(&ranks);
                        if !up_down || switches.len() as u32 - 1 != c {
                            bad.push((i, src, dst, ranks, c));
                        }
                    }
                    (None, Walk::Failed) => unreachable += 1,
                    (c, _) => bad.push((i, src, dst, vec![], c.copied().unwrap_or(UNREACHABLE))),
                }
            }
        }
    }
    verdict(
        2,
        bad.is_empty(),
        format!(
            "{routed} routes traced, {unreachable} pairs correctly unroutable, {} violations (tolerance 0) {:?}",
            bad.len(),
            bad.first()
        ),
    );
}

#[test]
fn criterion_3_shift_patterns() {
    let _g = SERIAL.lock().unwrap_or_else(|e| e.into_inner());
    let nonblocking = [
        PgftParams::new(vec![4, 4], vec![1, 4], vec![1, 1]),
        PgftParams::new(vec![8, 4], vec![1, 8], vec![1, 1]),
        PgftParams::new(vec![6, 3], vec![1, 6], vec![1, 1]),
        PgftParams::new(vec![4, 4], vec![1, 2], vec![1, 2]),
    ];
    let mut details = Vec::new();
    let mut pass = true;
    for params in &nonblocking {
        let pre = Preprocessed::run(&params.build(UuidMode::Shuffled(5)).unwrap());
        let lft = Algorithm::Dmodc.route(&pre).unwrap();
        let r = analyze_sp(&pre, &lft, SpOrder::Nid);
        let all_one = r.sample_maxima.iter().all(|&m| m == 1);
        pass &= all_one && r.aggregate == 1;
        details.push(format!("{params}: max {} over {} shifts", r.aggregate, r.samples));
    }
    let topo = small();
    let pre = Preprocessed::run(&topo);
    let lft = Algorithm::Dmodc.route(&pre).unwrap();
    let got = analyze_sp(&pre, &lft, SpOrder::Nid).aggregate;
    let want = naive_sp(&topo, &pre, &lft, false);
    pass &= got == want;
    details.push(format!("12-node PGFT: {got} vs oracle {want} (tolerance 0)"));
    verdict(3, pass, details.join("; "));
}

#[test]
fn criterion_4_up_port_balance() {
    let _g = SERIAL.lock().unwrap_or_else(|e| e.into_inner());
    // arities dividing evenly at every level
    let fabrics = [
        PgftParams::new(vec![4, 4, 4], vec![1, 4, 4], vec![1, 1, 1]),
        PgftParams::new(vec![8, 4, 4], vec![1, 2, 4], vec![1, 2, 1]),
        PgftParams::new(vec![2, 2, 3], vec![1, 2, 2], vec![1, 2, 1]),
        PgftParams::new(vec![16, 8, 8], vec![1, 4, 8], vec![1, 1, 1]),
        PgftParams::new(vec![4, 4, 2, 2], vec![1, 2, 2, 2], vec![1, 2, 1, 1]),
    ];
    let mut worst = 0;
    let mut where_ = String::new();
    for params in &fabrics {
        let pre = Preprocessed::run(&params.build(UuidMode::Shuffled(11)).unwrap());
        let lft = Algorithm::Dmodc.route(&pre).unwrap();
        for s in 0..pre.fabric.switch_count() as u32 {
            let rank = pre.ranks.rank(s).unwrap();
            let mut load: BTreeMap<u16, usize> = BTreeMap::new();
            for (p, t) in pre.fabric.ports(s).iter().enumerate() {
                if let PortTarget::Switch { switch, .. } = *t {
                    if pre.ranks.rank(switch) == Some(rank + 1) {
                        load.insert(p as u16, 0);
                    }
                }
            }
            for nid in 0..pre.nids.len() as u32 {
                if let Some(c) = lft.port(s, nid).and_then(|p| load.get_mut(&p)) {
                    *c += 1;
                }
            }
            if let (Some(max), Some(min)) = (load.values().max(), load.values().min()) {
                if max - min > worst {
                    worst = max - min;
                    where_ = format!("{params} switch {}", pre.fabric.switch_uuid(s));
                }
            }
        }
    }
    verdict(
        4,
        worst <= 1,
        format!(
            "largest up-port spread {worst} destinations (tolerance 1) over {} fabrics {where_}",
            fabrics.len()
        ),
    );
}

fn mean(xs: &[u32]) -> f64 {
    xs.iter().map(|&x| x as f64).sum::<f64>() / xs.len().max(1) as f64
}

#[test]
fn criterion_5_degradation_trend() {
    let _g = SERIAL.lock().unwrap_or_else(|e| e.into_inner());
    // 1024 nodes, 4:1 blocking at the leaves
    let params = PgftParams::new(vec![16, 8, 8], vec![1, 4, 8], vec![1, 1, 1]);
    let base = params.build(UuidMode::Sequential).unwrap();
    let config = SweepConfig {
        patterns: vec![Pattern::AllToAll, Pattern::RandomPermutation],
        rp_samples: 100,
        ..SweepConfig::default()
    };
    let spec = ThrowSpec {
        max_exponent: 8,
        throws: 200,
        kind: EquipmentKind::Links,
        seed: 2017,
        amount: None,
    };
    let records = run_sweep(&base, &spec, &config).unwrap();
    let by = |algo: Algorithm| -> BTreeMap<usize, &ExperimentRecord> {
        records
            .iter()
            .filter(|r| r.algorithm == algo && r.valid)
            .map(|r| (r.throw, r))
            .collect()
    };
    let (dmodc, updn) = (by(Algorithm::Dmodc), by(Algorithm::Updn));
    let mut valid: Vec<(usize, usize)> = dmodc
        .keys()
        .filter(|t| updn.contains_key(t))
        .map(|&t| (dmodc[&t].amount, t))
        .collect();
    valid.sort();
    let decile = &valid[valid.len() - valid.len().div_ceil(10)..];
    let mut pass = valid.len() >= 100;
    let mut details = vec![format!(
        "{} of 200 throws valid, heaviest decile = {} throws with {}..={} links removed",
        valid.len(),
        decile.len(),
        decile[0].0,
        decile[decile.len() - 1].0
    )];
    for pattern in [Pattern::AllToAll, Pattern::RandomPermutation] {
        let d: Vec<u32> = decile.iter().map(|&(_, t)| dmodc[&t].aggregate(pattern).unwrap()).collect();
        let u: Vec<u32> = decile.iter().map(|&(_, t)| updn[&t].aggregate(pattern).unwrap()).collect();
        let ok = mean(&d) <= 2.0 * mean(&u);
        pass &= ok;
        details.push(format!(
            "{pattern} decile mean dmodc {:.2} vs updn {:.2} (limit 2x)",
            mean(&d),
            mean(&u)
        ));
    }

    let zero = ThrowSpec {
        throws: 1,
        amount: Some(0),
        ..spec
    };
    let intact = run_sweep(&base, &zero, &config).unwrap();
    for pattern in [Pattern::AllToAll, Pattern::RandomPermutation] {
        let d = intact[0].aggregate(pattern).unwrap();
        let u = intact[1].aggregate(pattern).unwrap();
        pass &= d <= u;
        details.push(format!("{pattern} intact dmodc {d} vs updn {u} (limit <=)"));
    }
    verdict(5, pass, details.join("; "));
}

#[test]
fn criterion_6_determinism_and_recovery() {
    let _g = SERIAL.lock().unwrap_or_else(|e| e.into_inner());
    let params = PgftParams::new(vec![8, 4, 4], vec![1, 4, 4], vec![1, 1, 2]);
    let original = params.build(UuidMode::Shuffled(23)).unwrap();
    let mut pass = true;
    let mut details = Vec::new();
    for algo in Algorithm::ALL {
        let reference = algo.route(&Preprocessed::run(&original)).unwrap().dump();
        for (kind, amount, seed) in [(EquipmentKind::Links, 30, 1), (EquipmentKind::Switches, 6, 2)] {
            let mut t = original.degrade(kind, amount, seed).unwrap();
            let degraded = algo.route(&Preprocessed::run(&t)).unwrap().dump();
            t.restore();
            let restored = algo.route(&Preprocessed::run(&t)).unwrap().dump();
            pass &= restored == reference && degraded != reference;
            details.push(format!("{algo} {amount} {kind} restored identical: {}", restored == reference));
        }
        let pre = Preprocessed::run(&original.degrade(EquipmentKind::Links, 20, 9).unwrap());
        let dumps: Vec<String> = [1, 2, 4, 8]
            .iter()
            .map(|&k| {
                let pool = rayon::ThreadPoolBuilder::new().num_threads(k).build().unwrap();
                pool.install(|| algo.route(&pre).unwrap().dump())
            })
            .collect();
        let same = dumps.windows(2).all(|w| w[0] == w[1]);
        pass &= same;
        details.push(format!("{algo} 1/2/4/8 workers identical: {same}"));
    }
    verdict(6, pass, details.join("; "));
}

#[test]
fn criterion_7_runtime_scaling() {
    let _g = SERIAL.lock().unwrap_or_else(|e| e.into_inner());
    let params: Vec<PgftParams> = [4, 8, 16, 32, 64].map(scaling_preset).to_vec();
    let threads = rayon::current_num_threads();
    let records = bench_route(&params, &[threads], 3).unwrap();
    let xs: Vec<f64> = records.iter().map(|r| (r.nodes as f64).ln()).collect();
    let ys: Vec<f64> = records.iter().map(|r| r.median_ms.max(1e-3).ln()).collect();
    let (mx, my) = (xs.iter().sum::<f64>() / 5.0, ys.iter().sum::<f64>() / 5.0);
    let slope = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum::<f64>() / xs.iter().map(|x| (x - mx).powi(2)).sum::<f64>();
    let largest = records.last().unwrap();
    let timings: Vec<String> = records.iter().map(|r| format!("{}:{:.0}ms", r.nodes, r.median_ms)).collect();
    verdict(
        7,
        largest.nodes >= 10_000 && largest.median_ms <= 10_000.0 && slope <= 2.0,
        format!(
            "{} nodes in {:.0} ms (limit 10000 ms), log-log slope {slope:.2} (limit 2.0), {threads} worker(s): {}",
            largest.nodes,
            largest.median_ms,
            timings.join(" ")
        ),
    );
}

#[test]
fn criterion_8_metrics_match_naive_recount() {
    let _g = SERIAL.lock().unwrap_or_else(|e| e.into_inner());
    let mut checked = 0;
    let mut bad = Vec::new();
    let mut instances: Vec<Topology> = (0..16).map(|s| random_instance(500 + s, 200, 200, 12).1).collect();
    instances.push(small());
    for (i, topo) in instances.iter().enumerate() {
        let pre = Preprocessed::run(topo);
        if pre.nids.len() < 2 {
            continue;
        }
        for algo in Algorithm::ALL {
            let lft = algo.route(&pre).unwrap();
            let pairs = [
                ("a2a", analyze_a2a(&pre, &lft).aggregate, naive_a2a(topo, &pre, &lft)),
                ("rp", analyze_rp(&pre, &lft, 25, 77).aggregate, naive_rp(topo, &pre, &lft, 25, 77)),
                (
                    "sp-nid",
                    analyze_sp(&pre, &lft, SpOrder::Nid).aggregate,
                    naive_sp(topo, &pre, &lft, false),
                ),
                (
                    "sp-uuid",
                    analyze_sp(&pre, &lft, SpOrder::Uuid).aggregate,
                    naive_sp(topo, &pre, &lft, true),
                ),
            ];
            for (name, got, want) in pairs {
                checked += 1;
                if got != want {
                    bad.push((i, algo, name, got, want));
                }
            }
        }
    }
    verdict(
        8,
        bad.is_empty(),
        format!(
            "{checked} aggregates compared, {} mismatches (tolerance 0) {:?}",
            bad.len(),
            bad.first()
        ),
    );
}

/// Kolmogorov distribution tail `P(K > λ)`.
fn kolmogorov_q(lambda: f64) -> f64 {
    if lambda < 1e-3 {
        return 1.0;
    }
    let sum: f64 = (1..=100)
        .map(|j| {
            let j = j as f64;
            2.0 * (-1f64).powf(j - 1.0) * (-2.0 * j * j * lambda * lambda).exp()
        })
        .sum();
    sum.clamp(0.0, 1.0)
}

#[test]
fn criterion_9_amounts_are_log_uniform() {
    let _g = SERIAL.lock().unwrap_or_else(|e| e.into_inner());
    let m = 8;
    let n = 10_000;
    let spec = ThrowSpec {
        max_exponent: m,
        throws: n,
        kind: EquipmentKind::Links,
        seed: 31337,
        amount: None,
    };
    let mut counts = vec![0usize; 1 << m];
    for i in 0..n {
        counts[spec.draw(i).amount] += 1;
    }
    // amount <= a  <=>  2^(m·u) < a + 2  <=>  u < log2(a + 2) / m
    let cdf = |a: usize| ((a as f64 + 2.0).log2() / m as f64).min(1.0);
    let mut seen = 0;
    let mut d: f64 = 0.0;
    for (a, &c) in counts.iter().enumerate() {
        let below = seen as f64 / n as f64;
        let before = if a == 0 { 0.0 } else { cdf(a - 1) };
        seen += c;
        d = d.max((seen as f64 / n as f64 - cdf(a)).abs()).max((below - before).abs());
    }
    let sq = (n as f64).sqrt();
    let p = kolmogorov_q((sq + 0.12 + 0.11 / sq) * d);
    let formula = sample_amount(8, 0.0) == 0 && sample_amount(8, 1.0) == 255 && sample_amount(8, 0.5) == 15;
    verdict(
        9,
        p > 0.01 && formula,
        format!("KS D = {d:.4} against the exact CDF of the floored amount, p = {p:.3} (threshold 0.01), {n} draws, m = {m}"),
    );
}
