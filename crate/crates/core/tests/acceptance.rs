//! Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any
//! criterion fails.

mod common;

use std::collections::BTreeSet;
use std::time::Instant;

use num_rational::Ratio;
use powcirc::diffop::{kernel_basis, solve_annihilator, wronskian, DiffOperator};
use powcirc::factor::factor_univariate;
use powcirc::field::next_prime;
use powcirc::hitting::{min_field_prime, nonzero_count, pit_test, HittingSet, Verdict};
use powcirc::ks_gen::{psi_apply, robust_decode, robust_min_prime, PointTag, RobustSet};
use powcirc::reconstruct::{
    brute_force_recover, dfs_recover_with_stats, reconstruct_multivariate, reconstruct_univariate, PowCircuitMulti,
    PowCircuitUni, Profile,
};
use powcirc::{PrimeField, UniPoly};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(failures: &[String], detail: String) -> Outcome {
    let mut detail = detail;
    if let Some(first) = failures.first() {
        detail = format!("{detail}; {} failures, first: {first}", failures.len());
    }
    Outcome { pass: failures.is_empty(), detail }
}

/// Rank of a row set mod `p`, by plain Gaussian elimination on `u64`s.
fn rank_mod_p(mut rows: Vec<Vec<u64>>, p: u64) -> usize {
    let inv = |a: u64| {
        let (mut base, mut e, mut acc) = (a % p, p - 2, 1u64);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base % p;
            }
            base = base * base % p;
            e >>= 1;
        }
        acc
    };
    let cols = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(piv) = (rank..rows.len()).find(|&i| rows[i][c] != 0) else {
            continue;
        };
        rows.swap(rank, piv);
        let scale = inv(rows[rank][c]);
        for v in rows[rank].iter_mut() {
            *v = *v * scale % p;
        }
        for i in 0..rows.len() {
            if i != rank && rows[i][c] != 0 {
                let m = rows[i][c];
                for j in 0..cols {
                    rows[i][j] = (rows[i][j] + p * p - m * rows[rank][j]) % p;
                }
            }
        }
        rank += 1;
    }
    rank
}

fn coeff_row(g: &UniPoly, len: usize) -> Vec<u64> {
    (0..len).map(|i| g.coeff(i).value()).collect()
}

fn random_uni(field: PrimeField, max_deg: usize, rng: &mut ChaCha8Rng) -> UniPoly {
    let deg = rng.gen_range(0..=max_deg);
    let coeffs: Vec<u64> = (0..=deg).map(|_| rng.gen_range(0..field.modulus())).collect();
    UniPoly::from_u64s(field, &coeffs)
}

fn wronskian_criterion() -> Outcome {
    let f = PrimeField::new(101).unwrap();
    let u = |c: &[i64]| UniPoly::from_i64s(f, c);
    let pool = vec![
        u(&[]),
        u(&[1]),
        u(&[0, 1]),
        u(&[0, 0, 1]),
        u(&[0, 0, 0, 1]),
        u(&[0, 0, 0, 0, 0, 0, 1]),
        u(&[1, 1]),
        u(&[2, 2]),
        u(&[1, 2, 1]),
        u(&[0, 1, 1]),
        u(&[5, 0, 0, 3, 0, 0, 1]),
        u(&[0, 0, 0, 0, -1, 1]),
    ];
    let mut families: Vec<Vec<UniPoly>> = Vec::new();
    let m = pool.len();
    for mask in 1u32..(1 << m) {
        if mask.count_ones() <= 4 {
            families.push((0..m).filter(|i| mask >> i & 1 == 1).map(|i| pool[i].clone()).collect());
        }
    }
    let exhaustive = families.len();
    let mut rng = common::rng(1);
    for _ in 0..500 {
        let size = rng.gen_range(1..=4);
        let mut fam: Vec<UniPoly> = (0..size).map(|_| random_uni(f, 6, &mut rng)).collect();
        if size > 1 && rng.gen_bool(0.4) {
            let combo = fam[..size - 1].iter().fold(UniPoly::zero(f), |acc, g| {
                &acc + &g.scale(f.elem(rng.gen_range(0..101)))
            });
            fam[size - 1] = combo;
        }
        families.push(fam);
    }
    let mut failures = Vec::new();
    let mut dependent = 0;
    for (i, fam) in families.iter().enumerate() {
        let w = wronskian(fam).expect("wronskian");
        let rank = rank_mod_p(fam.iter().map(|g| coeff_row(g, 7)).collect(), 101);
        let singular = rank < fam.len();
        dependent += singular as usize;
        if w.is_zero() != singular {
            failures.push(format!("family {i}: wronskian zero = {}, rank {rank} of {}", w.is_zero(), fam.len()));
        }
    }
    outcome(
        &failures,
        format!("{} families ({exhaustive} from the structured pool, 500 random), {dependent} dependent", families.len()),
    )
}

fn abc_nonvanishing() -> Outcome {
    let mut rng = common::rng(2);
    let mut failures = Vec::new();
    for i in 0..200 {
        let r = rng.gen_range(2..=4);
        let delta = rng.gen_range(1..=2);
        let d = (r - 1) * (r - 1);
        let p = next_prime((r * d * delta) as u64 + 1).unwrap();
        let f = PrimeField::new(p).unwrap();
        let mut bases: Vec<UniPoly> = Vec::new();
        while bases.len() < r {
            let deg = rng.gen_range(0..=delta);
            let mut coeffs: Vec<u64> = (0..deg).map(|_| rng.gen_range(0..p)).collect();
            coeffs.push(1);
            let g = UniPoly::from_u64s(f, &coeffs);
            if !bases.contains(&g) {
                bases.push(g);
            }
        }
        let sum = bases.iter().fold(UniPoly::zero(f), |acc, g| &acc + &g.pow(d as u64));
        if sum.is_zero() {
            failures.push(format!("family {i} (r={r}, delta={delta}, p={p}) sums to zero"));
        }
    }
    outcome(&failures, "200 families, r in 2..=4, d = (r-1)^2".into())
}

struct PitInstance {
    circuit: PowCircuitMulti,
    r: usize,
    s: usize,
    hs: HittingSet,
}

fn pit_corpus() -> Vec<PitInstance> {
    let mut rng = common::rng(3);
    let eps = Ratio::new(1, 2);
    let mut out = Vec::new();
    while out.len() < 100 {
        let n = rng.gen_range(1..=3);
        let r: usize = rng.gen_range(1..=3);
        let s = rng.gen_range(1..=2);
        let delta = rng.gen_range(1..=2);
        let d = ((r - 1) * (r - 1)).saturating_sub(1).max(1) + rng.gen_range(0..=1);
        let p = min_field_prime(n, r, s, d, delta, eps).unwrap();
        let field = PrimeField::new(p).unwrap();
        let Some(circuit) = common::random_circuit(field, n, r, s, delta, d, &mut rng) else {
            continue;
        };
        if circuit.expand().is_zero() {
            continue;
        }
        let hs = HittingSet::build(field, n, r, s, d, delta, eps).unwrap();
        out.push(PitInstance { circuit, r, s, hs });
    }
    out
}

fn hitting_completeness(corpus: &[PitInstance]) -> Outcome {
    let mut failures = Vec::new();
    let mut worst = 1.0f64;
    for (i, inst) in corpus.iter().enumerate() {
        let oracle = |pt: &[powcirc::FpElem]| inst.circuit.eval(pt);
        if !matches!(pit_test(&inst.hs, oracle), Ok(Verdict::NonZero { .. })) {
            failures.push(format!("instance {i}: pit_test did not report NonZero"));
            continue;
        }
        let hits = nonzero_count(&inst.hs, oracle).unwrap();
        let frac = Ratio::new(hits as u64, inst.hs.len() as u64);
        worst = worst.min(hits as f64 / inst.hs.len() as f64);
        if frac < Ratio::from_integer(1) - inst.hs.eps() {
            failures.push(format!("instance {i}: nonzero fraction {hits}/{} below 1 - eps", inst.hs.len()));
        }
    }
    outcome(&failures, format!("{} circuits, eps = 1/2, worst nonzero fraction {worst:.4}", corpus.len()))
}

fn bad_k_bound(corpus: &[PitInstance]) -> Outcome {
    let mut failures = Vec::new();
    let mut most = 0;
    for (i, inst) in corpus.iter().enumerate() {
        let f = inst.circuit.expand();
        let n = inst.circuit.n();
        let (q, t) = (inst.hs.q(), inst.hs.t());
        let bad = (1..=t).filter(|&k| psi_apply(&f, k, q).is_zero()).count();
        most = most.max(bad);
        let bound = inst.r * inst.r * inst.s * inst.s * n;
        if bad > bound {
            failures.push(format!("instance {i}: {bad} bad k exceeds r^2 s^2 n = {bound}"));
        }
    }
    outcome(&failures, format!("{} circuits, at most {most} bad k", corpus.len()))
}

/// Bijections from set positions onto `0..N`. A point is erased when its
/// rank is below the erasure budget.
fn erasure_rank(pattern: usize, set: &RobustSet, tag: &PointTag, mult: u64, add: u64) -> u64 {
    let nk = set.q() - 1;
    let nb = set.n() as u64 + 1;
    let na = set.a_size() as u64;
    let total = nk * nb * na;
    let k = tag.k() - 1;
    let b = match *tag {
        PointTag::Plain { .. } => 0,
        PointTag::Scaled { j, .. } => j as u64,
    };
    let a = tag.alpha() - 1;
    let canon = (k * nb + b) * na + a;
    match pattern {
        0 => canon,
        1 => total - 1 - canon,
        2 => (b * nk + k) * na + a,
        3 => ((nb - 1 - b) * nk + k) * na + a,
        4 => (a * nk + k) * nb + b,
        5 => ((na - 1 - a) * nk + k) * nb + b,
        6 => (a * nb + b) * nk + k,
        _ => ((mult as u128 * canon as u128 + add as u128) % total as u128) as u64,
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn robust_decoding() -> Outcome {
    let mut rng = common::rng(5);
    let mut failures = Vec::new();
    let mut largest = 0;
    for i in 0..50 {
        let n = rng.gen_range(1..=2);
        let s = rng.gen_range(1..=2);
        let delta = rng.gen_range(1..=2);
        let eps = if n == 1 { Ratio::new(1, 3) } else { Ratio::new(1, 4) };
        let (q, a_size) = powcirc::ks_gen::robust_params(n, s, delta, eps).unwrap();
        let field = PrimeField::new(robust_min_prime(delta, q, a_size)).unwrap();
        let set = RobustSet::build(field, n, s, delta, eps).unwrap();
        let g = common::random_sparse(field, n, s, delta, 0, &mut rng);
        let total = set.len() as u64;
        largest = largest.max(total);
        let budget = (eps * Ratio::from_integer(total)).floor().to_integer();
        for pattern in 0..10 {
            let mut mult = rng.gen_range(2..total);
            while gcd(mult, total) != 1 {
                mult = rng.gen_range(2..total);
            }
            let add = rng.gen_range(0..total);
            let erased = |tag: &PointTag| erasure_rank(pattern, &set, tag, mult, add) < budget;
            if total <= 100_000 {
                let count = set.tags().filter(|t| erased(t)).count() as u64;
                if count != budget {
                    failures.push(format!("poly {i} pattern {pattern}: erased {count}, wanted {budget}"));
                }
            }
            let source = |tag: &PointTag| {
                if erased(tag) {
                    None
                } else {
                    Some(g.eval(&set.point_of(tag)).unwrap())
                }
            };
            match robust_decode(&set, &source) {
                Ok(h) if h == g => {}
                Ok(_) => failures.push(format!("poly {i} pattern {pattern}: wrong polynomial")),
                Err(e) => failures.push(format!("poly {i} pattern {pattern}: {e}")),
            }
        }
    }
    outcome(
        &failures,
        format!("50 polynomials x 10 patterns, floor(eps |S|) erasures, |S| up to {largest}"),
    )
}

fn univariate_corpus() -> Vec<(usize, PowCircuitUni)> {
    let mut rng = common::rng(6);
    (0..100)
        .map(|_| {
            let r = rng.gen_range(1..=3);
            (r, common::univariate_instance(r, &mut rng))
        })
        .collect()
}

fn operator_pipeline(corpus: &[(usize, PowCircuitUni)]) -> Outcome {
    let mut failures = Vec::new();
    for (i, (r, c)) in corpus.iter().enumerate() {
        let f = c.expand();
        let (order, l) = match solve_annihilator(&f, *r, 1) {
            Ok(v) => v,
            Err(e) => {
                failures.push(format!("instance {i}: {e}"));
                continue;
            }
        };
        if order != *r {
            failures.push(format!("instance {i}: order {order}, planted r = {r}"));
            continue;
        }
        for t in c.terms() {
            let fac = factor_univariate(&t.base).unwrap();
            if fac.factors.iter().any(|(phi, _)| !phi.divides(l.leading())) {
                failures.push(format!("instance {i}: a factor of a base does not divide the leading coefficient"));
            }
        }
        let kb = kernel_basis(&l, c.d()).unwrap();
        if kb.dim() != order {
            failures.push(format!("instance {i}: kernel dimension {} != {order}", kb.dim()));
        }
        if c.terms().iter().any(|t| !kb.contains(&t.base.pow(c.d() as u64))) {
            failures.push(format!("instance {i}: a planted power lies outside the kernel"));
        }
    }
    outcome(&failures, format!("{} instances, r in 1..=3, d in {{17, 82, 257}}", corpus.len()))
}

fn dfs_vs_brute(corpus: &[(usize, PowCircuitUni)]) -> Outcome {
    let mut failures = Vec::new();
    let mut checked = 0;
    let mut most = 0;
    for (i, (r, c)) in corpus.iter().enumerate() {
        let f = c.expand();
        let (_, l) = solve_annihilator(&f, *r, 1).unwrap();
        let factors: Vec<UniPoly> = factor_univariate(l.leading())
            .unwrap()
            .factors
            .into_iter()
            .map(|(phi, _)| phi)
            .filter(|phi| phi.degree() == Some(1))
            .collect();
        if factors.len() > 5 {
            continue;
        }
        checked += 1;
        let kb = kernel_basis(&l, c.d()).unwrap();
        let run = match dfs_recover_with_stats(&kb, &factors, c.d(), 1) {
            Ok(run) => run,
            Err(e) => {
                failures.push(format!("instance {i}: {e}"));
                continue;
            }
        };
        let dfs: BTreeSet<Vec<u64>> = run.powers.iter().map(|g| coeff_row(g, c.d() + 1)).collect();
        let brute: BTreeSet<Vec<u64>> = brute_force_recover(&kb, &factors, c.d(), 1)
            .iter()
            .map(|g| coeff_row(&g.pow(c.d() as u64), c.d() + 1))
            .collect();
        if dfs != brute {
            failures.push(format!("instance {i}: DFS found {} powers, brute force {}", dfs.len(), brute.len()));
        }
        most = most.max(run.descents);
        if run.descents > *r {
            failures.push(format!("instance {i}: {} descents exceed r delta = {r}", run.descents));
        }
    }
    outcome(&failures, format!("{checked} instances with <= 5 factors, at most {most} descents"))
}

fn univariate_round_trip(corpus: &[(usize, PowCircuitUni)]) -> Outcome {
    let mut failures = Vec::new();
    for (i, (r, c)) in corpus.iter().enumerate() {
        match reconstruct_univariate(&c.expand(), *r, c.d(), 1) {
            Ok(got) if &got == c => {}
            Ok(got) => failures.push(format!("instance {i}: recovered {} terms, not the planted circuit", got.len())),
            Err(e) => failures.push(format!("instance {i}: {e}")),
        }
    }
    outcome(&failures, format!("{} instances", corpus.len()))
}

fn multivariate_round_trip() -> Outcome {
    let (n, r, s, delta, d) = (2, 2, 2, 1, 82);
    let p = next_prime((r * d * delta * (s * s * n + delta)) as u64).unwrap();
    let field = PrimeField::new(p).unwrap();
    let mut rng = common::rng(9);
    let mut failures = Vec::new();
    for i in 0..20 {
        let planted = common::random_circuit(field, n, r, s, delta, d, &mut rng).expect("enough bases");
        let oracle = |pt: &[powcirc::FpElem]| planted.eval(pt);
        match reconstruct_multivariate(field, &oracle, n, r, s, delta, d, Profile::Fast) {
            Ok(got) if got == planted && got.expand() == planted.expand() => {}
            Ok(got) => failures.push(format!("instance {i}: recovered {} terms, not the planted circuit", got.len())),
            Err(e) => failures.push(format!("instance {i}: {e}")),
        }
    }
    outcome(
        &failures,
        format!("20 instances, p = {p}, fast profile (set sizes below the theorem's constants)"),
    )
}

fn random_coeffs(field: PrimeField, order: usize, rng: &mut ChaCha8Rng) -> Vec<UniPoly> {
    let mut coeffs: Vec<UniPoly> = (0..=order).map(|_| random_uni(field, 4, rng)).collect();
    while coeffs[order].is_zero() {
        coeffs[order] = random_uni(field, 4, rng);
    }
    coeffs
}

/// `Q(x) d^order`, whose kernel is every polynomial of degree below `order`.
fn top_only(field: PrimeField, order: usize, rng: &mut ChaCha8Rng) -> Vec<UniPoly> {
    let mut coeffs = vec![UniPoly::zero(field); order + 1];
    coeffs[order] = random_coeffs(field, 0, rng).remove(0);
    coeffs
}

/// `G(x) sum c_i x^i d^i`, with the indicial polynomial vanishing at
/// `order` distinct exponents `<= bound`, so `x^m` for those `m` is in the
/// kernel.
fn euler(field: PrimeField, order: usize, bound: usize, rng: &mut ChaCha8Rng) -> Vec<UniPoly> {
    let mut roots: Vec<u64> = Vec::new();
    while roots.len() < order.min(bound + 1) {
        let m = rng.gen_range(0..=bound as u64);
        if !roots.contains(&m) {
            roots.push(m);
        }
    }
    let indicial = |m: u64| roots.iter().fold(field.one(), |acc, &z| acc * (field.elem(m) - field.elem(z)));
    let falling = |m: u64, i: u64| (0..i).fold(field.one(), |acc, j| acc * field.elem(m + field.modulus() - j));
    let mut c = Vec::new();
    for m in 0..=order as u64 {
        let known = (0..m).fold(field.zero(), |acc, i| acc + c[i as usize] * falling(m, i));
        c.push((indicial(m) - known) * falling(m, m).inverse().unwrap());
    }
    let g = random_coeffs(field, 0, rng).remove(0);
    c.iter()
        .enumerate()
        .map(|(i, &ci)| &g * &UniPoly::monomial(ci, i))
        .collect()
}

fn kernel_dimension_bound() -> Outcome {
    let mut rng = common::rng(10);
    let primes = [31u64, 37, 41, 101, 1009];
    let mut failures = Vec::new();
    let mut largest = 0;
    let mut tight = 0;
    for i in 0..500 {
        let order = rng.gen_range(0..=4);
        let bound = rng.gen_range(1..=30);
        let field = PrimeField::new(primes[rng.gen_range(0..primes.len())]).unwrap();
        let coeffs = match i % 3 {
            0 => random_coeffs(field, order, &mut rng),
            1 => top_only(field, order, &mut rng),
            _ => euler(field, order, bound, &mut rng),
        };
        let l = DiffOperator::new(coeffs).unwrap();
        let order = l.order();
        let dim = kernel_basis(&l, bound).unwrap().dim();
        largest = largest.max(dim);
        tight += (dim == order && order > 0) as usize;
        if dim > order {
            failures.push(format!("operator {i}: kernel dimension {dim} exceeds order {order}"));
        }
    }
    outcome(
        &failures,
        format!("500 operators (random, Q d^o and planted Euler kernels), largest kernel dimension {largest}, {tight} at equality"),
    )
}

fn cli_contract() -> Outcome {
    let cases = common::cli_cases();
    let failures: Vec<String> =
        cases.iter().filter_map(|(name, r)| r.as_ref().err().map(|why| format!("{name}: {why}"))).collect();
    outcome(&failures, format!("{} golden cases", cases.len()))
}

fn report(id: usize, name: &str, run: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let out = run();
    let verdict = if out.pass { "PASS" } else { "FAIL" };
    println!("{verdict} C{id:<2} {name}: {} [{:.1}s]", out.detail, start.elapsed().as_secs_f64());
    out.pass
}

fn main() {
    let mut ok = true;
    ok &= report(1, "wronskian criterion", wronskian_criterion);
    ok &= report(2, "ABC nonvanishing", abc_nonvanishing);
    let pit = pit_corpus();
    ok &= report(3, "hitting-set completeness", || hitting_completeness(&pit));
    ok &= report(4, "bad-k bound", || bad_k_bound(&pit));
    ok &= report(5, "robust decoding", robust_decoding);
    let uni = univariate_corpus();
    ok &= report(6, "operator pipeline", || operator_pipeline(&uni));
    ok &= report(7, "DFS vs brute force", || dfs_vs_brute(&uni));
    ok &= report(8, "univariate round-trip", || univariate_round_trip(&uni));
    ok &= report(9, "multivariate round-trip", multivariate_round_trip);
    ok &= report(10, "kernel dimension bound", kernel_dimension_bound);
    ok &= report(11, "CLI contract", cli_contract);
    if !ok {
        std::process::exit(1);
    }
}
