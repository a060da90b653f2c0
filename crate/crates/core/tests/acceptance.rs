//! Acceptance checks, one line per criterion. Run with
//! `cargo test -p chirotope --test acceptance`.

mod common;

use std::collections::{BTreeMap, BTreeSet};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use chirotope::bowtie::{antipodal_elements, bowtie_sign_function, is_module, is_quasi_module, DEFAULT_MODULE_CAP};
use chirotope::chain::{chain_count, chain_tree};
use chirotope::counting::{count_bowtie, count_tree, merge_degree_polynomial, CountOptions};
use chirotope::io::{parse_tree, DbSettings};
use chirotope::poly::{binomial, BiPoly, UniPoly};
use chirotope::random::{random_point_tree, RandomTreeSpec};
use chirotope::realization::{realize_tree, RealizeOptions};
use chirotope::rewrite::{canonical_tree, canonicalize_traced, is_canonical, Strategy};
use chirotope::triangulation::{enumerate_triangulations, DEFAULT_ENUMERATION_CAP};
use chirotope::{bowtie, ChirotopeTree, Error, Label};

use common::*;

enum Outcome {
    Pass(String),
    Fail(String),
    Skip(String),
}

use Outcome::*;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Pass(detail)
    } else {
        Fail(detail)
    }
}

fn chain_table() -> Outcome {
    let start = Instant::now();
    let spots: Vec<BigInt> = (1..=3).map(|k| chain_count(k).unwrap()).collect();
    if spots != [1, 6, 53].map(BigInt::from) {
        return Fail(format!("closed form gives {spots:?} for k = 1, 2, 3"));
    }
    let mut checked = 0;
    for k in 1..=6usize {
        let formula = chain_count(k).unwrap();
        for word in 0u32..1 << k {
            let sigma: Vec<bool> = (0..k).map(|i| word >> i & 1 == 1).collect();
            let counted = count_tree(&chain_tree(&sigma).unwrap(), &CountOptions::default()).unwrap();
            if counted != formula {
                return Fail(format!("sigma {sigma:?}: counted {counted}, formula {formula}"));
            }
            checked += 1;
        }
    }
    let elapsed = start.elapsed();
    check(elapsed < Duration::from_secs(5), format!("{checked} words, k <= 6, {elapsed:.2?} (limit 5s)"))
}

fn worked_example() -> Outcome {
    let p = UniPoly::from_i64(&[0, 0, 0, 1, 1]);
    let q_in = BiPoly::from_terms([((4, 4), 1.into())]);
    let q_out = BiPoly::from_terms([((2, 3), 1.into()), ((3, 3), 1.into())]);
    let q = q_in.forget_u().add(&q_out.forget_u());
    let total = count_bowtie(&p, &q);
    let merged = merge_degree_polynomial(&p, &q_in, &q_out);
    let expected = UniPoly::from_i64(&[0, 0, 0, 23, 16, 9, 4, 1]);
    let tri = UniPoly::from_i64(&[0, 0, 1]);
    let two = count_bowtie(&tri, &tri);
    check(
        total == BigInt::from(53) && merged == expected && merged.at_one() == BigInt::from(53) && two == BigInt::from(2),
        format!("count {total}, merged {}, two triangles {two}", merged.display_in("u")),
    )
}

fn oracle_equivalence() -> Outcome {
    let start = Instant::now();
    let mut trees = 0;
    let mut triangulations = 0usize;
    for seed in 0..240u64 {
        let t = small_tree(seed, 4, 5, DEFAULT_ENUMERATION_CAP).tree;
        let full = t.expand();
        let all = enumerate_triangulations(&full, DEFAULT_ENUMERATION_CAP).unwrap();
        let (n, h) = (full.len(), full.extreme_count());
        if let Some(bad) = all.iter().find(|tr| tr.len() != 3 * n - h - 3) {
            return Fail(format!("seed {seed}: triangulation with {} edges, expected {}", bad.len(), 3 * n - h - 3));
        }
        let fast = count_tree(&t, &CountOptions::default()).unwrap();
        if fast != BigInt::from(all.len()) {
            return Fail(format!("seed {seed}: count_tree {fast}, enumeration {}", all.len()));
        }
        trees += 1;
        triangulations += all.len();
    }
    let elapsed = start.elapsed();
    check(
        elapsed < Duration::from_secs(120),
        format!("{trees} trees, {triangulations} triangulations, all with 3n-h-3 edges, {elapsed:.2?} (limit 120s)"),
    )
}

/// Criteria 4 and 5 share their rewriting runs.
fn canonical_runs() -> (Outcome, Outcome) {
    let mut trees = 0;
    let mut canonical_inputs = 0;
    let mut steps = 0usize;
    let mut invariance_failures = Vec::new();
    let mut mismatches = Vec::new();
    for seed in 0..120u64 {
        let r = small_tree(seed, 5, 5, 16);
        // Half of the inputs are canonicalized first so that the
        // canonical-input clause is exercised often.
        let t0 = if seed % 2 == 0 {
            r.tree
        } else {
            canonicalize_traced(&r.tree, &mut Strategy::seeded(seed), DEFAULT_MODULE_CAP, |_, _, _| {}).unwrap()
        };
        let full = t0.expand();
        let reference = canonical_tree(&full, DEFAULT_MODULE_CAP).unwrap().fingerprint();
        for s in 0..10u64 {
            let start = if s % 2 == 0 { t0.clone() } else { ChirotopeTree::single(full.clone()) };
            let out = canonicalize_traced(&start, &mut Strategy::seeded(seed * 31 + s), DEFAULT_MODULE_CAP, |before, step, after| {
                steps += 1;
                if before.expand() != after.expand() {
                    invariance_failures.push(format!("seed {seed}: {step:?}"));
                }
            })
            .unwrap();
            if out.fingerprint() != reference {
                mismatches.push(format!("seed {seed}, strategy {s}"));
            }
        }
        if is_canonical(&t0, DEFAULT_MODULE_CAP).unwrap() {
            canonical_inputs += 1;
            if t0.fingerprint() != reference {
                mismatches.push(format!("seed {seed}: canonical input differs from its canonical tree"));
            }
        }
        trees += 1;
    }
    let c4 = check(
        mismatches.is_empty(),
        format!("{trees} trees x 10 strategies, {canonical_inputs} canonical inputs, {} mismatches{}", mismatches.len(), first(&mismatches)),
    );
    let c5 = check(
        invariance_failures.is_empty(),
        format!("{steps} rewrite steps, {} changed the expansion{}", invariance_failures.len(), first(&invariance_failures)),
    );
    (c4, c5)
}

fn bowtie_axioms() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut good = 0;
    let mut bad = 0;
    for case in 0..600 {
        let (n, m) = (rng.gen_range(3..8), rng.gen_range(3..8));
        let chi = random_chirotope(&mut rng, "a", n);
        let xi = random_chirotope(&mut rng, "b", m);
        let x = pick(&mut rng, &chi.extremes()).clone();
        let y = pick(&mut rng, &xi.extremes()).clone();
        let k = match bowtie(&chi, &x, &xi, &y) {
            Ok(k) => k,
            Err(e) => return Fail(format!("case {case}: {e}")),
        };
        let expected: BTreeSet<Label> =
            chi.extremes().into_iter().filter(|e| *e != x).chain(xi.extremes().into_iter().filter(|e| *e != y)).collect();
        if k.validate_axioms().is_err() || k.extremes().into_iter().collect::<BTreeSet<_>>() != expected {
            return Fail(format!("case {case}: bowtie output is wrong"));
        }
        good += 1;
        // The same factors glued at an interior proxy, when there is one.
        if let Some(inner) = chi.labels().iter().find(|l| !chi.is_extreme(l).unwrap()) {
            let raw = bowtie_sign_function(&chi, inner, &xi, &y).unwrap();
            if raw.validate_axioms().is_ok() {
                return Fail(format!("case {case}: interior proxy `{inner}` passed validation"));
            }
            if !matches!(bowtie(&chi, inner, &xi, &y), Err(Error::NotExtreme(_))) {
                return Fail(format!("case {case}: interior proxy accepted"));
            }
            bad += 1;
        }
    }
    check(good >= 500, format!("{good} products valid with the expected extremes, {bad} interior-proxy products rejected"))
}

fn lemma_binomials() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut cases = 0;
    let mut constraints = 0;
    for a in 1..=6usize {
        for b in 1..=6usize {
            // Glue two random factors, then draw sides of the requested sizes.
            let chi = random_chirotope(&mut rng, "x", 7);
            let xi = random_chirotope(&mut rng, "y", 7);
            let xs = pick(&mut rng, &chi.extremes()).clone();
            let ys = pick(&mut rng, &xi.extremes()).clone();
            let kappa = bowtie(&chi, &xs, &xi, &ys).unwrap();
            let mut side_x: Vec<Label> = chi.labels().iter().filter(|l| **l != xs).cloned().collect();
            let mut side_y: Vec<Label> = xi.labels().iter().filter(|l| **l != ys).cloned().collect();
            shuffle(&mut rng, &mut side_x);
            shuffle(&mut rng, &mut side_y);
            side_x.truncate(a);
            side_y.truncate(b);
            let sets = maximal_noncrossing_between(&kappa, &side_x, &side_y);
            let expected = binomial((a + b) as i64 - 2, b as i64 - 1);
            if BigInt::from(sets.len()) != expected {
                return Fail(format!("a={a} b={b}: {} maximal sets, expected {expected}", sets.len()));
            }
            // Fixed degrees on the first k elements of the second side.
            let degs: Vec<Vec<u32>> = sets
                .iter()
                .map(|s| {
                    let d = degrees(s);
                    side_y.iter().map(|y| d.get(y).copied().unwrap_or(0)).collect()
                })
                .collect();
            for k in 0..b {
                let mut tally: BTreeMap<Vec<u32>, usize> = BTreeMap::new();
                for d in &degs {
                    *tally.entry(d[..k].to_vec()).or_insert(0) += 1;
                }
                constraints += a.pow(k as u32);
                if let Err(e) = verify_tuples(k, a as u32, &tally, a, b) {
                    return Fail(e);
                }
            }
            cases += 1;
        }
    }
    Pass(format!("{cases} side-size pairs, {constraints} fixed-degree constraints"))
}

fn shuffle(rng: &mut ChaCha8Rng, v: &mut [Label]) {
    for i in (1..v.len()).rev() {
        v.swap(i, rng.gen_range(0..=i));
    }
}

/// Visits every tuple of `k` entries in `1..=max`; stops at the first one
/// for which `f` returns false.
fn for_each_tuple(k: usize, max: u32, f: &mut dyn FnMut(&Vec<u32>) -> bool) -> Result<(), Vec<u32>> {
    let mut t = vec![1u32; k];
    loop {
        if !f(&t) {
            return Err(t);
        }
        let mut i = 0;
        loop {
            if i == k {
                return Ok(());
            }
            if t[i] < max {
                t[i] += 1;
                break;
            }
            t[i] = 1;
            i += 1;
        }
    }
}

fn verify_tuples(k: usize, max: u32, tally: &BTreeMap<Vec<u32>, usize>, a: usize, b: usize) -> Result<(), String> {
    for_each_tuple(k, max, &mut |fixed| {
        let sum: i64 = fixed.iter().map(|&i| i as i64).sum();
        let want = binomial((a + b) as i64 - sum - 2, b as i64 - (k as i64 + 1));
        BigInt::from(tally.get(fixed).copied().unwrap_or(0)) == want
    })
    .map_err(|fixed| format!("a={a} b={b}: degrees {fixed:?} on the first {k} elements disagree with the binomial"))
}

fn module_examples() -> Outcome {
    let l = |s: &[&str]| s.iter().map(|x| Label::new(x)).collect::<Vec<_>>();
    let six = six_points();
    let modules_ok = is_module(&six, &l(&["a", "b", "x", "y"])).unwrap()
        && is_module(&six, &l(&["c", "d", "x", "y"])).unwrap()
        && !is_module(&six, &l(&["x", "y"])).unwrap();
    let q = quasi_example();
    let w = l(&["a", "b", "c", "d"]);
    let quasi_ok = is_quasi_module(&q, &w).unwrap() && !is_module(&q, &w).unwrap();
    // Brute force over ordered pairs for the antipodal condition.
    let outside: Vec<Label> = q.labels().iter().filter(|x| !w.contains(x)).cloned().collect();
    let mut pairs = BTreeSet::new();
    for p in &w {
        for r in &w {
            if p == r {
                continue;
            }
            let rest: Vec<&Label> = w.iter().filter(|v| *v != p && *v != r).collect();
            let ok = outside.iter().all(|o| {
                let s0 = q.sign(o, p, rest[0]).unwrap();
                rest.iter().all(|v| q.sign(o, p, v).unwrap() == s0 && q.sign(o, v, r).unwrap() == s0)
            });
            if ok {
                pairs.insert(BTreeSet::from([p.clone(), r.clone()]));
            }
        }
    }
    let (w1, w2) = antipodal_elements(&q, &w).unwrap();
    let antipodal_ok = pairs.len() == 1 && pairs.contains(&BTreeSet::from([w1.clone(), w2.clone()]));
    let extremes_ok = (0..60u64).all(|seed| {
        let nodes = 1 + (seed % 8) as usize;
        let spec = RandomTreeSpec { nodes, min_size: 3, max_size: 5, max_degree: 3, grid: 48 };
        random_point_tree(&spec, seed).unwrap().tree.expand().extreme_count() >= nodes + 2
    });
    check(
        modules_ok && quasi_ok && antipodal_ok && extremes_ok,
        format!(
            "overlapping modules {modules_ok}, quasi-module {quasi_ok}, antipodal pair {{{w1}, {w2}}} unique {antipodal_ok}, \
             k-node trees have >= k+2 extremes {extremes_ok}"
        ),
    )
}

fn realization() -> Outcome {
    let opts = RealizeOptions::default();
    let (mut ok, mut not_found, mut tries) = (0, 0, 0);
    let mut max_bits = 0;
    for seed in 0..60u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let nodes = rng.gen_range(2..=7);
        let spec = RandomTreeSpec { nodes, min_size: 3, max_size: 6, max_degree: 3, grid: 48 };
        let r = random_point_tree(&spec, seed).unwrap();
        if r.tree.total_element_count() > 30 {
            continue;
        }
        tries += 1;
        match realize_tree(&r.tree, &r.points, &opts) {
            Ok(pc) => {
                if pc.chirotope().ok().as_ref() != Some(&r.tree.expand()) {
                    return Fail(format!("seed {seed}: returned points have the wrong chirotope"));
                }
                max_bits = max_bits.max(pc.bit_length());
                ok += 1;
            }
            Err(Error::RealizationNotFound { .. }) => not_found += 1,
            Err(e) => return Fail(format!("seed {seed}: {e}")),
        }
    }
    check(
        tries >= 50,
        format!("{tries} trees: {ok} realized and verified, {not_found} reported not found, success rate {:.0}%, largest coordinate {max_bits} bits", 100.0 * ok as f64 / tries as f64),
    )
}

fn headline() -> Outcome {
    let (Ok(dir), Ok(tree)) = (std::env::var("CHIROTOPE_DB_DIR"), std::env::var("CHIROTOPE_HEADLINE_TREE")) else {
        return Skip("set CHIROTOPE_DB_DIR and CHIROTOPE_HEADLINE_TREE to run".into());
    };
    let text = match std::fs::read_to_string(&tree) {
        Ok(t) => t,
        Err(e) => return Fail(format!("{tree}: {e}")),
    };
    let start = Instant::now();
    let src = match parse_tree(&text, Some(DbSettings { dir: std::path::Path::new(&dir), big_endian: false })) {
        Ok(s) => s,
        Err(e) => return Fail(format!("{tree}: {e}")),
    };
    let count = match count_tree(&src.tree, &CountOptions::default()) {
        Ok(c) => c.to_string(),
        Err(e) => return Fail(e.to_string()),
    };
    let elapsed = start.elapsed();
    check(
        count.len() == 181 && count.starts_with("592966751293974711"),
        format!("{} elements, {} digits, {}..., {elapsed:.2?} (target 60s)", src.tree.labels().len(), count.len(), &count[..count.len().min(18)]),
    )
}

fn report(failed: &mut usize, n: u32, name: &str, outcome: Outcome, elapsed: Duration) {
    let (tag, detail) = match outcome {
        Pass(d) => ("PASS", d),
        Fail(d) => {
            *failed += 1;
            ("FAIL", d)
        }
        Skip(d) => ("SKIP", d),
    };
    println!("{tag} {n:>2} {name}: {detail} [{elapsed:.1?}]");
}

fn main() -> ExitCode {
    let mut failed = 0;
    let criteria: [(u32, &str, fn() -> Outcome); 4] = [
        (1, "chain table", chain_table),
        (2, "worked example", worked_example),
        (3, "tree count equals enumeration", oracle_equivalence),
        (6, "bowtie axioms and extremes", bowtie_axioms),
    ];
    for (n, name, f) in criteria {
        let start = Instant::now();
        report(&mut failed, n, name, f(), start.elapsed());
    }
    let start = Instant::now();
    let (c4, c5) = canonical_runs();
    report(&mut failed, 4, "canonical tree is unique", c4, start.elapsed());
    report(&mut failed, 5, "rewriting preserves the chirotope", c5, start.elapsed());
    let criteria: [(u32, &str, fn() -> Outcome); 4] = [
        (7, "non-crossing set binomials", lemma_binomials),
        (8, "module examples", module_examples),
        (9, "realization", realization),
        (10, "large tree count", headline),
    ];
    for (n, name, f) in criteria {
        let start = Instant::now();
        report(&mut failed, n, name, f(), start.elapsed());
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

fn first(items: &[String]) -> String {
    items.first().map(|m| format!(", first: {m}")).unwrap_or_default()
}
