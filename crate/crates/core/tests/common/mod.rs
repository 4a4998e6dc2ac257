#![allow(dead_code)]

use std::path::PathBuf;
use std::process::Command;

use powcirc::field::next_prime;
use powcirc::reconstruct::{PowCircuitMulti, PowCircuitUni, PowerTermMulti, PowerTermUni};
use powcirc::{ExponentVector, FpElem, PrimeField, SparsePoly, UniPoly};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn nonzero(field: PrimeField, rng: &mut ChaCha8Rng) -> FpElem {
    field.elem(rng.gen_range(1..field.modulus()))
}

/// All exponent vectors in `n` variables of total degree at most `delta`.
pub fn monomials(n: usize, delta: usize) -> Vec<ExponentVector> {
    let mut out = vec![vec![0u32; n]];
    for i in 0..n {
        let mut next = Vec::new();
        for e in &out {
            let used: u32 = e.iter().sum();
            for k in 0..=(delta as u32 - used) {
                let mut f = e.clone();
                f[i] = k;
                next.push(f);
            }
        }
        out = next;
    }
    out.into_iter().map(ExponentVector::new).collect()
}

/// A polynomial with between 1 and `s` monomials of degree at most
/// `delta`, at least one of degree at least `min_degree`.
pub fn random_sparse(
    field: PrimeField,
    n: usize,
    s: usize,
    delta: usize,
    min_degree: usize,
    rng: &mut ChaCha8Rng,
) -> SparsePoly {
    let all = monomials(n, delta);
    loop {
        let count = rng.gen_range(1..=s.min(all.len()));
        let chosen: Vec<ExponentVector> = all.choose_multiple(rng, count).cloned().collect();
        let g = SparsePoly::from_terms(field, n, chosen.into_iter().map(|e| (e, nonzero(field, rng))));
        if g.degree().unwrap_or(0) >= min_degree {
            return g;
        }
    }
}

/// `r` terms with pairwise non-associate bases of degree at least 1, or
/// `None` if no such bases turned up (the parameters may admit too few).
pub fn random_circuit(
    field: PrimeField,
    n: usize,
    r: usize,
    s: usize,
    delta: usize,
    d: usize,
    rng: &mut ChaCha8Rng,
) -> Option<PowCircuitMulti> {
    let mut bases: Vec<SparsePoly> = Vec::new();
    for _ in 0..1000 {
        if bases.len() == r {
            break;
        }
        let g = random_sparse(field, n, s, delta, 1, rng);
        if !bases.iter().any(|b| b.is_associate(&g)) {
            bases.push(g);
        }
    }
    if bases.len() < r {
        return None;
    }
    let terms = bases
        .into_iter()
        .map(|base| PowerTermMulti { lambda: nonzero(field, rng), base })
        .collect();
    Some(PowCircuitMulti::new(field, n, d, terms).expect("non-associate bases"))
}

/// Univariate instance with `r` distinct monic linear bases, `d = (r+1)^4 + 1`
/// and the smallest prime `p > 2 r d`.
pub fn univariate_instance(r: usize, rng: &mut ChaCha8Rng) -> PowCircuitUni {
    let d = (r + 1).pow(4) + 1;
    let p = next_prime(2 * (r * d) as u64 + 1).unwrap();
    let field = PrimeField::new(p).unwrap();
    let mut shifts: Vec<u64> = (0..p).collect();
    shifts.shuffle(rng);
    let terms = shifts[..r]
        .iter()
        .map(|&c| PowerTermUni::new(nonzero(field, rng), UniPoly::linear(field, c)).unwrap())
        .collect();
    PowCircuitUni::new(field, d, terms).unwrap()
}

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

pub struct Run {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

pub fn run_cli(args: &[&str]) -> Run {
    let out = Command::new(env!("CARGO_BIN_EXE_powcirc"))
        .args(args)
        .env_remove("POWCIRC_JOBS")
        .output()
        .expect("spawn powcirc");
    Run {
        code: out.status.code().unwrap_or(-1),
        stdout: String::from_utf8_lossy(&out.stdout).into_owned(),
        stderr: String::from_utf8_lossy(&out.stderr).into_owned(),
    }
}

fn expect(cond: bool, what: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(what.into())
    }
}

fn golden(name: &str) -> String {
    std::fs::read_to_string(fixture(name)).expect("golden file")
}

fn path(name: &str) -> String {
    fixture(name).to_string_lossy().into_owned()
}

/// Golden checks of the command line, by name.
pub fn cli_cases() -> Vec<(&'static str, Result<(), String>)> {
    let mut cases = Vec::new();

    let run = run_cli(&["pit", &path("zero.circ")]);
    cases.push((
        "pit zero",
        expect(run.code == 0 && run.stdout == golden("zero.pit.out"), format!("exit {} stdout {:?}", run.code, run.stdout)),
    ));

    let run = run_cli(&["pit", &path("nonzero.circ")]);
    cases.push((
        "pit nonzero",
        expect(
            run.code == 0 && run.stdout == golden("nonzero.pit.out"),
            format!("exit {} stdout {:?}", run.code, run.stdout),
        ),
    ));

    let first = run_cli(&["reconstruct", &path("two_term_331.circ"), "--verify", "expand"]);
    let second = run_cli(&["reconstruct", &path("two_term_331.circ"), "--verify", "expand", "--jobs", "2"]);
    cases.push((
        "reconstruct two-term golden",
        expect(
            first.code == 0 && first.stdout == golden("two_term_331.reconstruct.out"),
            format!("exit {} stdout {:?} stderr {:?}", first.code, first.stdout, first.stderr),
        ),
    ));
    cases.push((
        "reconstruct byte-stable across job counts",
        expect(second.code == 0 && second.stdout == first.stdout, "outputs differ"),
    ));

    let dir = tempfile::tempdir().expect("tempdir");
    let out_file = dir.path().join("rec.circ");
    let run = run_cli(&[
        "reconstruct",
        &path("two_term_331.circ"),
        "--out",
        &out_file.to_string_lossy(),
        "--verify",
        "sample:20",
        "--cheat-verify",
    ]);
    let reparsed = std::fs::read_to_string(&out_file)
        .ok()
        .and_then(|t| powcirc::circuit_io::parse_circuit(&t).ok());
    let planted = powcirc::circuit_io::parse_circuit(&golden("two_term_331.circ")).unwrap();
    cases.push((
        "reconstruct --out re-parses to the planted circuit",
        expect(
            run.code == 0
                && run.stdout.starts_with("OK terms=2 ")
                && reparsed.is_some_and(|d| d.to_circuit() == planted.to_circuit()),
            format!("exit {} stdout {:?} stderr {:?}", run.code, run.stdout, run.stderr),
        ),
    ));

    let run = run_cli(&["hitting-set", "--n", "1", "--r", "1", "--s", "1", "--d", "1", "--delta", "1"]);
    cases.push((
        "hitting-set golden",
        expect(run.code == 0 && run.stdout == golden("hitting_small.out"), format!("exit {}", run.code)),
    ));

    let run = run_cli(&["hitting-set", "--n", "2", "--r", "4", "--s", "1", "--d", "7", "--delta", "1"]);
    cases.push((
        "hitting-set hypothesis gate exits 3",
        expect(
            run.code == 3 && run.stderr.contains("(r-1)^2 <= d+1") && run.stdout.is_empty(),
            format!("exit {} stderr {:?}", run.code, run.stderr),
        ),
    ));

    let run = run_cli(&["pit", &path("associate.circ")]);
    cases.push((
        "invalid file exits 4",
        expect(run.code == 4 && run.stderr.contains("[E09]"), format!("exit {} stderr {:?}", run.code, run.stderr)),
    ));

    let run = run_cli(&["pit", &path("does_not_exist.circ")]);
    cases.push(("missing file exits 1", expect(run.code == 1, format!("exit {}", run.code))));

    let run = run_cli(&["pit"]);
    cases.push(("usage error exits 2", expect(run.code == 2 && run.stdout.is_empty(), format!("exit {}", run.code))));

    let run = run_cli(&["pit", &path("zero.circ"), "--eps", "1/0"]);
    cases.push(("bad eps exits 2", expect(run.code == 2, format!("exit {}", run.code))));

    let run = run_cli(&["reconstruct", &path("two_term_331.circ"), "--profile", "theorem"]);
    cases.push((
        "theorem profile at small p exits 3",
        expect(run.code == 3, format!("exit {} stderr {:?}", run.code, run.stderr)),
    ));

    let run = run_cli(&["selftest"]);
    cases.push((
        "selftest",
        expect(run.code == 0 && run.stdout.ends_with("selftest passed\n"), format!("exit {}", run.code)),
    ));
    cases
}
