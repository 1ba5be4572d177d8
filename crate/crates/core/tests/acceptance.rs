//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion
//! and exits non-zero if any fails.

mod common;

use std::collections::HashSet;
use std::time::{Duration, Instant};

use common::{random_automorphism, random_nonempty_word, random_word};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use triplefold::certify::{certify_minimal, complements, minimize, presentation, theta_n_injective, Complements, Presentation};
use triplefold::graphs::{bouquet, membership, subgroup_graph, subgroup_rank, FoldOrder, SubgroupGraph};
use triplefold::pipeline::{embed_with_retry, extract_certificate, DecompositionCertificate, PhiSpec};
use triplefold::tightening::{tighten_xy, tighten_z_capped};
use triplefold::triples::initial_triple;
use triplefold::words::{w, Automorphism, Word};

type Verdict = Result<String, String>;
type Criterion = (&'static str, fn() -> Verdict);

fn psi1() -> Automorphism {
    Automorphism::parse(&["a", "abA"], &["a", "Aba"]).unwrap()
}

fn psi3() -> Automorphism {
    Automorphism::parse(&["b", "ab"], &["bA", "a"]).unwrap()
}

fn within(start: Instant, limit: Duration, detail: String) -> Verdict {
    let took = start.elapsed();
    if took <= limit {
        Ok(format!("{detail}; {:.2}s", took.as_secs_f64()))
    } else {
        Err(format!("{detail}; took {:.2}s, limit {}s", took.as_secs_f64(), limit.as_secs()))
    }
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn fold_confluence() -> Verdict {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for case in 0..200 {
        let rank = rng.gen_range(1..=4);
        let count = rng.gen_range(1..=5);
        let words: Vec<Word> = (0..count).map(|_| random_word(&mut rng, rank, 12)).collect();
        let g = bouquet(rank, &words).map_err(|e| e.to_string())?;
        let reference = SubgroupGraph::from_graph(&g).map_err(|e| e.to_string())?;
        for _ in 0..10 {
            let mut order = FoldOrder::random(rng.gen());
            let (folded, _) = g.fold_to_immersion_with(&mut order);
            let s = SubgroupGraph::from_immersed(&folded).map_err(|e| e.to_string())?;
            ensure(s.canonical() == reference.canonical(), || format!("case {case}: {words:?} folds differently"))?;
        }
    }
    within(start, Duration::from_secs(10), "200 specs x 10 orders agree".into())
}

/// Every reduced product of at most `depth` factors from `L ∪ L⁻¹`.
fn products(l: &[Word], depth: usize) -> HashSet<Word> {
    let factors: Vec<Word> = l.iter().flat_map(|x| [x.clone(), x.inverse()]).collect();
    let mut all: HashSet<Word> = HashSet::from([Word::identity()]);
    let mut frontier = vec![Word::identity()];
    for _ in 0..depth {
        let mut next = Vec::new();
        for p in &frontier {
            for f in &factors {
                let q = p.concat(f);
                if all.insert(q.clone()) {
                    next.push(q);
                }
            }
        }
        frontier = next;
    }
    all
}

/// Nielsen reduction by length-decreasing moves `u ↦ u·v^±1`. The result
/// generates the same subgroup.
fn nielsen_reduce(l: &[Word]) -> Vec<Word> {
    let mut u: Vec<Word> = l.iter().filter(|x| !x.is_empty()).cloned().collect();
    loop {
        let mut changed = false;
        'scan: for i in 0..u.len() {
            for j in 0..u.len() {
                if i == j {
                    continue;
                }
                for a in [u[i].clone(), u[i].inverse()] {
                    for b in [u[j].clone(), u[j].inverse()] {
                        let p = a.concat(&b);
                        if p.len() < a.len() {
                            u[i] = p;
                            changed = true;
                            break 'scan;
                        }
                    }
                }
            }
        }
        u.retain(|x| !x.is_empty());
        if !changed {
            return u;
        }
    }
}

/// Conditions N1 and N2, under which every reduced product of `k` basis
/// letters has length at least `k` and keeps a letter of each factor.
fn is_nielsen_reduced(u: &[Word]) -> bool {
    let pm: Vec<Word> = u.iter().flat_map(|x| [x.clone(), x.inverse()]).collect();
    for a in &pm {
        for b in &pm {
            if *a == b.inverse() {
                continue;
            }
            let ab = a.concat(b);
            if ab.len() < a.len() || ab.len() < b.len() {
                return false;
            }
            for c in &pm {
                if *b == c.inverse() {
                    continue;
                }
                if ab.concat(c).len() + b.len() <= a.len() + c.len() {
                    return false;
                }
            }
        }
    }
    true
}

/// Exact membership for a Nielsen-reduced basis: depth-first search over
/// reduced products, pruned by the surviving-letter bound.
fn nielsen_member(basis: &[Word], w: &Word) -> bool {
    let pm: Vec<Word> = basis.iter().flat_map(|x| [x.clone(), x.inverse()]).collect();
    let slack = pm.iter().map(Word::len).max().unwrap_or(0);
    fn go(pm: &[Word], w: &Word, slack: usize, prefix: &Word, last: Option<usize>, depth: usize) -> bool {
        if prefix == w {
            return true;
        }
        if depth == 0 {
            return false;
        }
        for (k, x) in pm.iter().enumerate() {
            if last.is_some_and(|l| l ^ 1 == k) {
                continue;
            }
            let p = prefix.concat(x);
            let agree = p.letters().iter().zip(w.letters()).take_while(|(a, b)| a == b).count();
            if p.len() > w.len() + slack || agree + slack < p.len() {
                continue;
            }
            if go(pm, w, slack, &p, Some(k), depth - 1) {
                return true;
            }
        }
        false
    }
    go(&pm, w, slack, &Word::identity(), None, w.len())
}

fn membership_oracle() -> Verdict {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let (mut members, mut probes, mut probe_members, mut cases, mut redraws) = (0usize, 0usize, 0usize, 0usize, 0usize);
    while cases < 100 {
        let rank = rng.gen_range(1..=3);
        let count = rng.gen_range(1..=3);
        let l: Vec<Word> = (0..count).map(|_| random_nonempty_word(&mut rng, rank, 4)).collect();
        let basis = nielsen_reduce(&l);
        if !is_nielsen_reduced(&basis) {
            redraws += 1;
            continue;
        }
        cases += 1;
        let g = subgroup_graph(rank, &l).map_err(|e| e.to_string())?;
        let oracle = products(&l, 6);
        for p in &oracle {
            ensure(membership(&g, p), || format!("{p} is a product of L = {l:?} but rejected"))?;
        }
        members += oracle.len();
        for _ in 0..100 {
            let x = random_nonempty_word(&mut rng, rank, 8);
            let verdict = nielsen_member(&basis, &x);
            ensure(membership(&g, &x) == verdict, || {
                format!("L = {l:?}, {x}: graph says {}, oracle says {verdict}", !verdict)
            })?;
            probes += 1;
            probe_members += verdict as usize;
        }
    }
    within(
        start,
        Duration::from_secs(30),
        format!(
            "{members} oracle products accepted, {probes} probes agree ({probe_members} members, {redraws} redraws)"
        ),
    )
}

fn certified_run(psi: &Automorphism, l: &[&str], level: usize) -> Result<triplefold::certify::Minimized, String> {
    let l: Vec<Word> = l.iter().map(|s| w(s)).collect();
    let t = initial_triple(&l, psi).map_err(|e| e.to_string())?;
    minimize(&t, psi, level, None, 2).map_err(|e| e.to_string())
}

fn psi1_example() -> Verdict {
    let start = Instant::now();
    let m = certified_run(&psi1(), &["b"], 10)?;
    let r = &m.report;
    ensure(r.certified() && r.checked_levels == 10, || format!("not certified to 10:\n{r}"))?;
    ensure(r.rr == (1, 1), || format!("rr = {:?}", r.rr))?;
    ensure(r.chi == Some(-1), || format!("chi = {:?}", r.chi))?;
    let c = complements(&m.triple).map_err(|e| e.to_string())?;
    ensure(c.c_basis.len() == 1 && c.d_basis.len() == 1 && c.e_basis.len() == 1, || format!("{c:?}"))?;
    // H = ⟨b, t⟩ is free of rank 2; its fibre is the normal closure of b.
    let fibre = SubgroupGraph::generated_by(2, &[w("b"), w("abA"), w("Aba")]).unwrap();
    let z = m.triple.image_subgroup(triplefold::triples::Which::Z).map_err(|e| e.to_string())?;
    ensure(z.same_subgroup(&fibre), || "Z# is not ⟨b, aba⁻¹, a⁻¹ba⟩".into())?;
    within(start, Duration::from_secs(1), "rr=(1,1), |C|=|D|=|E|=1, chi=-1".into())
}

fn psi3_example() -> Verdict {
    let start = Instant::now();
    let m = certified_run(&psi3(), &["a"], 10)?;
    let r = &m.report;
    ensure(r.certified(), || format!("not certified:\n{r}"))?;
    ensure(r.rr == (0, 0) && r.chi == Some(0), || format!("rr = {:?}, chi = {:?}", r.rr, r.chi))?;
    let z = m.triple.z();
    ensure(z.vertex_count() == 1 && z.edge_count() == 2, || format!("Z is not the rose:\n{}", m.triple))?;
    within(start, Duration::from_secs(1), "rr=(0,0), chi=0, Z is the rank-2 rose".into())
}

fn monotonicity() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    let (mut events, mut strict) = (0usize, 0usize);
    for case in 0..200 {
        let rank = rng.gen_range(1..=3);
        let moves = rng.gen_range(1..=4);
        let psi = random_automorphism(&mut rng, rank, moves);
        let count = rng.gen_range(1..=3);
        let l: Vec<Word> = (0..count).map(|_| random_word(&mut rng, rank, 8)).collect();
        let label = || format!("case {case}: psi = {psi}, L = {l:?}");
        let t = initial_triple(&l, &psi).map_err(|e| format!("{}: {e}", label()))?;
        ensure(t.is_bi_invariant(&psi).unwrap_or(false), || format!("{}: initial triple not bi-invariant", label()))?;
        let xy = tighten_xy(&t, &psi, None).map_err(|e| format!("{}: {e}", label()))?;
        let z = tighten_z_capped(&xy.triple, &psi, None).map_err(|e| format!("{}: {e}", label()))?;
        ensure(z.completed, || format!("{}: Z tightening budget tripped", label()))?;
        for e in xy.events.iter().chain(&z.events) {
            ensure(e.rr_after.0 <= e.rr_before.0 && e.rr_after.1 <= e.rr_before.1, || {
                format!("{}: relative rank increased at {e}", label())
            })?;
            if e.expects_strict_decrease() {
                ensure(e.rr_sum_decreased(), || format!("{}: no strict decrease at {e}", label()))?;
                strict += 1;
            }
            events += 1;
        }
        let out = z.triple;
        ensure(out.is_bi_invariant(&psi).unwrap_or(false), || format!("{}: result not bi-invariant", label()))?;
        ensure(out.z().is_immersed(), || format!("{}: Z not immersed", label()))?;
    }
    Ok(format!("{events} events, {strict} strict decreases, no budget trips"))
}

fn theta_additivity() -> Verdict {
    let cert = DecompositionCertificate::new(vec![], vec![w("b")], psi1(), 8);
    for n in 1..=8usize {
        let words: Vec<Word> =
            (-(n as i64)..=n as i64).map(|i| w("a").pow(i).concat(&w("b")).concat(&w("a").pow(-i))).collect();
        let rank = subgroup_rank(2, &words).map_err(|e| e.to_string())?;
        ensure(rank == 2 * n + 1, || format!("N = {n}: rank {rank}"))?;
        ensure(cert.free_product_at(n).unwrap(), || format!("certificate check fails at N = {n}"))?;
    }
    let duplicated = Complements { c_basis: vec![w("a")], d_basis: vec![], e_basis: vec![w("a")] };
    let id = Automorphism::identity(2);
    ensure(!theta_n_injective(&duplicated, &id, 0).unwrap(), || "duplicated generator passes at n = 0".into())?;
    Ok("ranks 2N+1 for N = 1..8; duplicate fails at n = 0".into())
}

fn embedding() -> Verdict {
    let start = Instant::now();
    let m = certified_run(&psi1(), &["b"], 5)?;
    let ex = extract_certificate(&m.triple, &psi1(), &m.report, 5).map_err(|e| e.to_string())?;
    let cert = ex.certificate.clone().ok_or_else(|| format!("no certificate:\n{ex}"))?;
    let phi = PhiSpec::standard(3).map_err(|e| e.to_string())?;
    let run = embed_with_retry(&cert, &phi, 1, 4, 5).map_err(|e| e.to_string())?;
    ensure(run.passed(), || format!("failed up to power 4:\n{}", run.report))?;
    ensure(run.attempts.iter().all(|r| r.intertwining.passed), || "intertwining failed at some power".into())?;
    within(start, Duration::from_secs(5), format!("all checks pass at power {} to level 5", run.embedding.power))
}

fn presentations() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(18);
    let mut checked = 0;
    let mut cases: Vec<(Automorphism, Vec<Word>)> = vec![
        (psi1(), vec![w("b")]),
        (psi3(), vec![w("a")]),
        (psi1(), vec![w("b"), w("aaaaabAAAAA")]),
    ];
    for _ in 0..30 {
        let rank = rng.gen_range(1..=3);
        let moves = rng.gen_range(1..=3);
        let psi = random_automorphism(&mut rng, rank, moves);
        let l = (0..rng.gen_range(1..=2)).map(|_| random_word(&mut rng, rank, 5)).collect();
        cases.push((psi, l));
    }
    for (psi, l) in &cases {
        let t = initial_triple(l, psi).map_err(|e| e.to_string())?;
        let Ok(m) = minimize(&t, psi, 6, None, 1) else { continue };
        if !m.report.certified() {
            continue;
        }
        let p = presentation(&m.triple, psi, &m.report).map_err(|e| e.to_string())?;
        let text = p.to_string();
        let back = Presentation::parse(&text).map_err(|e| e.to_string())?;
        ensure(back == p, || format!("re-parse differs:\n{text}"))?;
        for (x, y) in p.x_basis.iter().zip(&p.phi_images) {
            ensure(psi.apply(x, 1).unwrap() == *y, || format!("relation for {x} is not psi({x})"))?;
        }
        checked += 1;
    }
    ensure(checked >= 3, || format!("only {checked} certified cases"))?;
    let m = certified_run(&psi3(), &["a"], 10)?;
    let p = presentation(&m.triple, &psi3(), &m.report).map_err(|e| e.to_string())?;
    let defining = Presentation::defining(&psi3()).to_string();
    ensure(p.to_string() == defining, || format!("full group gives\n{p}expected\n{defining}"))?;
    // Certification of the rose also holds for the unrelated identity map.
    let r = certify_minimal(&m.triple, &Automorphism::identity(2), 3, 1).map_err(|e| e.to_string())?;
    ensure(r.certified(), || "rose not certified for identity".into())?;
    Ok(format!("{checked} presentations round-trip; full group matches M(psi) verbatim"))
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("fold confluence", fold_confluence),
        ("membership oracle", membership_oracle),
        ("psi1 minimal triple", psi1_example),
        ("psi3 full fibre", psi3_example),
        ("tightening monotonicity", monotonicity),
        ("theta rank additivity", theta_additivity),
        ("embedding checks", embedding),
        ("presentation round-trip", presentations),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("criterion {} {name}: PASS ({detail})", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {} {name}: FAIL ({detail})", i + 1);
            }
        }
    }
    if failed > 0 {
        eprintln!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
