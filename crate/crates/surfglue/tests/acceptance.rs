//! End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any criterion fails.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use surfglue::braidcheck::{is_trivial, BraidWord};
use surfglue::catalog::Catalog;
use surfglue::cli;
use surfglue::coexistence::can_coexist;
use surfglue::gluer::{Bounds, Gluer, Status, SurfaceClass};

const ENUMERATION_LIMIT: Duration = Duration::from_secs(1);
const BRAID_SWEEP_LIMIT: Duration = Duration::from_secs(30);

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn sg(args: &[&str]) -> cli::Output {
    cli::run(std::iter::once("surfglue").chain(args.iter().copied()))
}

fn enumerate_json(genus: u32, punctures: u32) -> (cli::Output, Duration) {
    let (g, p) = (genus.to_string(), punctures.to_string());
    let start = Instant::now();
    let out = sg(&["enumerate", "--genus", &g, "--punctures", &p, "--format", "json"]);
    (out, start.elapsed())
}

/// (side_a, side_b, label) triples, sides joined with commas.
fn result_set(out: &cli::Output) -> BTreeSet<(String, String, String)> {
    let v: serde_json::Value = serde_json::from_str(&out.stdout).expect("enumerate emits JSON");
    v["results"]
        .as_array()
        .expect("results array")
        .iter()
        .map(|r| {
            let side = |k: &str| {
                let mut names: Vec<&str> =
                    r[k].as_array().unwrap().iter().map(|x| x.as_str().unwrap()).collect();
                names.sort_unstable();
                names.join(",")
            };
            let (a, b) = (side("side_a"), side("side_b"));
            let (a, b) = if a <= b { (a, b) } else { (b, a) };
            (a, b, r["label"].as_str().unwrap().to_string())
        })
        .collect()
}

fn expected(rows: &[(&str, &str, &str)]) -> BTreeSet<(String, String, String)> {
    rows.iter()
        .map(|&(a, b, l)| {
            let norm = |s: &str| {
                let mut v: Vec<&str> = s.split(',').collect();
                v.sort_unstable();
                v.join(",")
            };
            let (a, b) = (norm(a), norm(b));
            let (a, b) = if a <= b { (a, b) } else { (b, a) };
            (a, b, l.to_string())
        })
        .collect()
}

fn classification(genus: u32, punctures: u32, rows: &[(&str, &str, &str)]) -> Outcome {
    let (out, took) = enumerate_json(genus, punctures);
    if out.code != 0 {
        return Err(format!("exit status {}: {}", out.code, out.stderr));
    }
    let got = result_set(&out);
    let want = expected(rows);
    if got != want {
        let extra: Vec<_> = got.difference(&want).collect();
        let missing: Vec<_> = want.difference(&got).collect();
        return Err(format!("extra {extra:?}, missing {missing:?}"));
    }
    if took >= ENUMERATION_LIMIT {
        return Err(format!("took {took:?}, limit {ENUMERATION_LIMIT:?}"));
    }
    Ok(format!("{} shapes in {:.0?}", got.len(), took))
}

fn criterion_1() -> Outcome {
    classification(
        2,
        0,
        &[
            ("T_0", "T_0", "I-a"),
            ("U_02", "A_0", "I-a"),
            ("P_0", "P_0", "I-b"),
            ("U_03", "A_0", "I-b"),
            ("T_0,A_0", "T_0,A_0", "I-c"),
            ("T_0,P_0", "A_0,A_0", "I-c"),
        ],
    )
}

fn criterion_2() -> Outcome {
    classification(
        1,
        2,
        &[
            ("D_1", "T_1", "II-a"),
            ("D_2", "T_0", "II-a"),
            ("A_23", "A_0", "II-a"),
            ("A_1", "A_1", "II-b"),
            ("A_21", "A_0", "II-b"),
            ("D_2,T_0", "A_0", "II-c"),
            ("D_2,A_0", "P_0", "II-c"),
        ],
    )
}

fn criterion_3() -> Outcome {
    classification(
        0,
        4,
        &[
            ("D_1", "D_3", "III-a"),
            ("D_2", "D_2", "III-a"),
            ("D_1,D_1", "A_22", "III-b"),
            ("D_1,D_2", "A_1", "III-b"),
            ("D_2,D_2", "A_0", "III-b"),
        ],
    )
}

fn criterion_4() -> Outcome {
    let vectors: &[(&str, &str, (u32, u32), &str)] = &[
        ("Q_01", "A_0,A_0", (2, 0), "boundary_mismatch"),
        ("Q_02", "A_0,A_0", (2, 0), "boundary_mismatch"),
        ("T_0,A_0", "P_0,A_0", (2, 0), "boundary_mismatch"),
        ("D_1,D_1", "U_02", (1, 2), "boundary_mismatch"),
        ("D_1,D_1", "U_03", (1, 2), "boundary_mismatch"),
        ("A_22", "A_0", (1, 2), "boundary_mismatch"),
        ("A_1,A_1", "A_0,A_0", (1, 2), "boundary_mismatch"),
        ("D_2,P_0", "A_0,A_0", (1, 2), "boundary_mismatch"),
        ("D_1,D_1", "A_21", (0, 4), "boundary_mismatch"),
        ("D_1,D_1", "A_23", (0, 4), "boundary_mismatch"),
        ("D_1,D_1,D_1", "P_11", (0, 4), "boundary_mismatch"),
        ("D_1,D_1,D_1", "P_12", (0, 4), "boundary_mismatch"),
        ("D_1,D_1,D_1,D_1", "Q_01", (0, 4), "boundary_mismatch"),
        ("D_1,D_1,D_1,D_1", "Q_02", (0, 4), "boundary_mismatch"),
        ("D_1,D_1,D_2", "P_0", (0, 4), "boundary_mismatch"),
        ("T_0,A_0,A_0", "T_0,A_0,A_0", (2, 0), "disconnected"),
        ("P_0,A_0", "P_0,A_0", (2, 0), "excluded_compressible"),
    ];
    let mut wrong = Vec::new();
    for &(a, b, (g, p), reason) in vectors {
        let (g, p) = (g.to_string(), p.to_string());
        let out = sg(&["check", "--side1", a, "--side2", b, "--genus", &g, "--punctures", &p, "--format", "json"]);
        let v: serde_json::Value = serde_json::from_str(&out.stdout).unwrap_or_default();
        if out.code != 1 || v["status"] != "rejected" || v["reason"] != reason {
            wrong.push(format!("{{{a}}}|{{{b}}} gave {} ({})", v["reason"], out.code));
        }
        // side order must not matter
        let swapped = sg(&["check", "--side1", b, "--side2", a, "--genus", &g, "--punctures", &p, "--format", "json"]);
        let w: serde_json::Value = serde_json::from_str(&swapped.stdout).unwrap_or_default();
        if w["reason"] != v["reason"] {
            wrong.push(format!("{{{b}}}|{{{a}}} disagrees with its swap"));
        }
    }
    if wrong.is_empty() {
        Ok(format!("{} verdict vectors", vectors.len()))
    } else {
        Err(wrong.join("; "))
    }
}

fn criterion_5() -> Outcome {
    // reference list, typed independently of the catalog file
    const LISTED: [(&str, &str); 39] = [
        ("D_0", "D_1"), ("D_0", "D_2"), ("D_0", "A_0"), ("D_1", "D_2"), ("D_2", "D_3"),
        ("D_2", "A_0"), ("D_2", "A_1"), ("D_2", "A_21"), ("D_2", "A_22"), ("D_2", "A_23"),
        ("D_2", "P_0"), ("D_2", "Q_01"), ("D_2", "Q_02"), ("D_2", "P_11"), ("D_2", "P_12"),
        ("D_2", "T_0"), ("D_2", "U_03"), ("D_3", "A_1"), ("D_3", "A_22"), ("D_3", "T_0"),
        ("A_0", "A_1"), ("A_0", "A_22"), ("A_0", "P_0"), ("A_0", "T_0"), ("A_1", "A_21"),
        ("A_1", "A_22"), ("A_21", "A_22"), ("P_0", "T_0"), ("P_0", "Q_01"), ("P_0", "Q_02"),
        ("P_0", "P_11"), ("P_0", "P_12"), ("P_0", "U_03"), ("Q_01", "U_03"), ("Q_02", "U_03"),
        ("P_11", "T_0"), ("P_12", "T_0"), ("T_0", "T_1"), ("T_0", "U_02"),
    ];
    let cat = Catalog::builtin();
    let listed: BTreeSet<(&str, &str)> = LISTED.iter().map(|&(x, y)| (x.min(y), x.max(y))).collect();
    let names: Vec<&str> = cat.kinds().iter().map(|k| k.name.as_str()).collect();
    let mut count = 0;
    let mut problems = Vec::new();
    for (i, &x) in names.iter().enumerate() {
        for &y in &names[i + 1..] {
            let xy = can_coexist(&cat, x, y).unwrap();
            if xy != can_coexist(&cat, y, x).unwrap() {
                problems.push(format!("{x}/{y} asymmetric"));
            }
            if xy != listed.contains(&(x.min(y), x.max(y))) {
                problems.push(format!("{x}/{y} is {xy}"));
            }
            count += xy as usize;
        }
    }
    if count != 39 {
        problems.push(format!("{count} distinct pairs"));
    }
    for (x, y) in [("A_0", "U_02"), ("Q_01", "A_0")] {
        if can_coexist(&cat, x, y).unwrap() {
            problems.push(format!("{x}/{y} should not coexist"));
        }
    }
    if problems.is_empty() {
        Ok("39 pairs, symmetric, matches the list".into())
    } else {
        Err(problems.join("; "))
    }
}

fn criterion_6() -> Outcome {
    let cat = Catalog::builtin();
    let mut problems = Vec::new();
    for k in cat.kinds() {
        let chi = 2 - 2 * k.genus as i64 - k.boundary_count as i64;
        if k.euler_char() != chi {
            problems.push(format!("{}: euler {} vs {chi}", k.name, k.euler_char()));
        }
    }
    let gluer = Gluer::new(&cat);
    let mut checked = 0;
    for (genus, punctures) in [(2, 0), (1, 2), (0, 4), (0, 0)] {
        let target = SurfaceClass { genus, punctures };
        let e = gluer.enumerate(target, Bounds::default()).unwrap();
        for a in &e.accepted {
            let chi = gluer.total_euler(&a.witness).unwrap();
            let m = gluer.total_punctures(&a.witness).unwrap();
            if chi != 2 - 2 * genus as i64 || m != punctures {
                problems.push(format!("{}: euler {chi}, punctures {m}", a.shape.display(&cat)));
            }
            if gluer.closed_genus(&a.witness).ok() != Some(genus) {
                problems.push(format!("{}: closed genus off", a.shape.display(&cat)));
            }
            checked += 1;
        }
    }
    if problems.is_empty() {
        Ok(format!("18 kinds, {checked} accepted configurations"))
    } else {
        Err(problems.join("; "))
    }
}

// ---- braid oracle ------------------------------------------------------------
//
// The Artin representation: B_n acts faithfully on the free group F_n by
//   σ_i:      x_i ↦ x_i x_{i+1} x_i⁻¹,   x_{i+1} ↦ x_i
//   σ_i⁻¹:    x_i ↦ x_{i+1},             x_{i+1} ↦ x_{i+1}⁻¹ x_i x_{i+1}
// so a braid is trivial exactly when every generator is sent to itself.
// Free group words are reduced vectors of signed generator indices.

fn free_push(w: &mut Vec<i32>, g: i32) {
    if w.last() == Some(&-g) {
        w.pop();
    } else {
        w.push(g);
    }
}

fn artin_letter_image(letter: i32, x: i32) -> Vec<i32> {
    let i = letter.abs();
    match (letter > 0, x) {
        (true, x) if x == i => vec![i, i + 1, -i],
        (true, x) if x == i + 1 => vec![i],
        (false, x) if x == i => vec![i + 1],
        (false, x) if x == i + 1 => vec![-(i + 1), i, i + 1],
        (_, x) => vec![x],
    }
}

fn oracle_trivial(strands: u32, letters: &[i32]) -> bool {
    let n = strands as i32;
    let mut images: Vec<Vec<i32>> = (1..=n).map(|x| vec![x]).collect();
    for &l in letters {
        // images ← images ∘ φ_l
        let next: Vec<Vec<i32>> = (1..=n)
            .map(|x| {
                let mut w = Vec::new();
                for g in artin_letter_image(l, x) {
                    let img = &images[(g.abs() - 1) as usize];
                    if g > 0 {
                        img.iter().for_each(|&h| free_push(&mut w, h));
                    } else {
                        img.iter().rev().for_each(|&h| free_push(&mut w, -h));
                    }
                }
                w
            })
            .collect();
        images = next;
    }
    images.iter().enumerate().all(|(k, w)| w.as_slice() == [k as i32 + 1])
}

fn all_words(strands: u32, max_len: usize, mut visit: impl FnMut(&[i32])) {
    let alphabet: Vec<i32> = (1..strands as i32).flat_map(|i| [i, -i]).collect();
    let mut word: Vec<i32> = Vec::new();
    fn rec(alphabet: &[i32], max_len: usize, word: &mut Vec<i32>, visit: &mut dyn FnMut(&[i32])) {
        visit(word);
        if word.len() == max_len {
            return;
        }
        for &l in alphabet {
            word.push(l);
            rec(alphabet, max_len, word, visit);
            word.pop();
        }
    }
    rec(&alphabet, max_len, &mut word, &mut visit);
}

fn criterion_7() -> Outcome {
    let start = Instant::now();
    let mut problems = Vec::new();
    let mut swept = 0u64;
    let mut trivial = 0u64;
    for (strands, max_len) in [(4, 6), (3, 8)] {
        all_words(strands, max_len, |letters| {
            let w = BraidWord::new(strands, letters.to_vec()).unwrap();
            let ours = is_trivial(&w);
            if ours != oracle_trivial(strands, letters) && problems.len() < 5 {
                problems.push(format!("{w:?}: handle reduction says {ours}"));
            }
            swept += 1;
            trivial += ours as u64;
        });
    }
    let relation = BraidWord::new(3, vec![1, 2, 1, -2, -1, -2]).unwrap();
    if !is_trivial(&relation) {
        problems.push("braid relation word is not trivial".into());
    }
    // w·w⁻¹ with total length at most 10
    let mut inverses = 0u64;
    all_words(4, 5, |letters| {
        let w = BraidWord::new(4, letters.to_vec()).unwrap();
        if !is_trivial(&w.concat(&w.inverse())) && problems.len() < 5 {
            problems.push(format!("{w:?} times its inverse is not trivial"));
        }
        inverses += 1;
    });
    let took = start.elapsed();
    if took >= BRAID_SWEEP_LIMIT {
        problems.push(format!("sweep took {took:?}, limit {BRAID_SWEEP_LIMIT:?}"));
    }
    if problems.is_empty() {
        Ok(format!("{swept} words ({trivial} trivial) and {inverses} w·w⁻¹ words agree, {took:.1?}"))
    } else {
        Err(problems.join("; "))
    }
}

fn criterion_8() -> Outcome {
    for (g, p) in [(2, 0), (1, 2), (0, 4)] {
        let first = enumerate_json(g, p).0.stdout;
        for _ in 0..3 {
            if enumerate_json(g, p).0.stdout != first {
                return Err(format!("target ({g},{p}) output changed between runs"));
            }
        }
        let reparsed: serde_json::Value = serde_json::from_str(&first).map_err(|e| e.to_string())?;
        if serde_json::to_string_pretty(&reparsed).unwrap() + "\n" != first {
            return Err(format!("target ({g},{p}) JSON does not round-trip"));
        }
    }
    Ok("4 runs per target, byte-identical".into())
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("genus 2 closed surfaces", criterion_1),
        ("genus 1 with 2 punctures", criterion_2),
        ("genus 0 with 4 punctures", criterion_3),
        ("verdict vectors", criterion_4),
        ("coexistence table", criterion_5),
        ("arithmetic invariants", criterion_6),
        ("braid word problem", criterion_7),
        ("determinism", criterion_8),
    ];
    let mut failed = 0;
    for (n, (name, f)) in criteria.iter().enumerate() {
        match f() {
            Ok(detail) => println!("PASS criterion {}: {name}: {detail}", n + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL criterion {}: {name}: {detail}", n + 1);
            }
        }
    }
    // sanity: the library and CLI agree on one accepted verdict
    let cat = Catalog::builtin();
    let v = Gluer::new(&cat)
        .check_names(&["P_0"], &["P_0"], SurfaceClass { genus: 2, punctures: 0 })
        .unwrap();
    assert_eq!(v.status, Status::Accepted);
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
    println!("all 8 criteria passed");
}
