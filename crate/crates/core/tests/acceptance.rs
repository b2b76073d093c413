//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each,
//! and exits non-zero if any failed.
//!
//! Expected values are hard-coded from the rule files and catalog tables,
//! or recomputed here by oracles that share no code with the library
//! (a hand-written language predicate, a local derivation enumerator and
//! a direct model tally).

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::panic::{self, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use bcg::derive::{derive_all, derive_deterministic, derive_plan, derive_random, to_building_plan, DerivationLimits};
use bcg::emit::render_svg;
use bcg::enumerate::{bundled_ruleset_dir, count_closed_form, enumerate_levels, Rule, RuleSet};
use bcg::grammar::{format_grammar, parse_grammar, recognize, Grammar, Symbol};
use bcg::layout::{check_support, layout, GeometryConfig, Provenance};
use bcg::rng::Rng;
use bcg::style::{assign_styles, validate_kinds, ModelCatalog, ModelRef, StyleAssignment, StyleMode, StyleTag};
use bcg::Element::{self, *};

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn data(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data").join(rel)
}

fn read(rel: &str) -> String {
    std::fs::read_to_string(data(rel)).unwrap()
}

fn canonical() -> Grammar {
    parse_grammar(&read("grammars/canonical.bcg")).unwrap()
}

fn bcg_bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_bcg"));
    c.env_remove("BCG_CATALOG");
    c
}

// ---------------------------------------------------------------------------
// Independent language oracle for the canonical grammar.
//
//   base     = wall floor | wall | floor
//   main     = beam M beam, M nonempty over {window, door, beam}, first and
//              last not beam, no two adjacent beams
//   roofs    = roof^k | toproof | roof^k toproof   (k >= 1)

fn is_mainlist(s: &[Element]) -> bool {
    !s.is_empty()
        && s.iter().all(|e| matches!(e, Window | Door | Beam))
        && s[0] != Beam
        && s[s.len() - 1] != Beam
        && !s.windows(2).any(|w| w[0] == Beam && w[1] == Beam)
}

fn is_roofs(s: &[Element]) -> bool {
    match s {
        [Toproof] => true,
        [init @ .., Toproof] => !init.is_empty() && init.iter().all(|&e| e == Roof),
        _ => !s.is_empty() && s.iter().all(|&e| e == Roof),
    }
}

fn in_language(s: &[Element]) -> bool {
    let bases: [&[Element]; 3] = [&[Wall, Floor], &[Wall], &[Floor]];
    bases.iter().any(|b| {
        let Some(rest) = s.strip_prefix(*b) else { return false };
        // rest = beam M beam roofs; try every split point for the closing beam
        if rest.first() != Some(&Beam) {
            return false;
        }
        (2..rest.len()).any(|j| rest[j] == Beam && is_mainlist(&rest[1..j]) && is_roofs(&rest[j + 1..]))
    })
}

/// Every sentence of length <= max_len, by expanding sentential forms
/// leftmost-first over the grammar's public productions. No production in
/// the grammar derives the empty sequence, so form length bounds yield.
fn brute_force_language(g: &Grammar, max_len: usize) -> BTreeSet<Vec<Element>> {
    let mut out = BTreeSet::new();
    let mut seen: HashSet<Vec<Symbol>> = HashSet::new();
    let mut stack = vec![vec![Symbol::nt(g.start())]];
    while let Some(form) = stack.pop() {
        if form.len() > max_len || !seen.insert(form.clone()) {
            continue;
        }
        match form.iter().position(|s| !s.is_terminal()) {
            None => {
                out.insert(
                    form.iter()
                        .map(|s| match s {
                            Symbol::Terminal(e) => *e,
                            Symbol::NonTerminal(_) => unreachable!(),
                        })
                        .collect(),
                );
            }
            Some(i) => {
                let Symbol::NonTerminal(name) = &form[i] else { unreachable!() };
                for alt in &g.production(name).unwrap().alternatives {
                    let mut next = form[..i].to_vec();
                    next.extend(alt.iter().cloned());
                    next.extend_from_slice(&form[i + 1..]);
                    stack.push(next);
                }
            }
        }
    }
    out
}

fn all_sequences(max_len: usize) -> Vec<Vec<Element>> {
    let mut out: Vec<Vec<Element>> = vec![vec![]];
    let mut layer: Vec<Vec<Element>> = vec![vec![]];
    for _ in 0..max_len {
        layer = layer
            .iter()
            .flat_map(|s| {
                Element::ALL.iter().map(move |&e| {
                    let mut n = s.clone();
                    n.push(e);
                    n
                })
            })
            .collect();
        out.extend(layer.iter().cloned());
    }
    out
}

// ---------------------------------------------------------------------------
// Independent style admissibility.

fn admitted(mode: StyleMode, e: Element, m: &ModelRef) -> bool {
    if m.element != e {
        return false;
    }
    let styled = matches!(e, Window | Door | Roof | Toproof);
    match mode {
        StyleMode::PureChinese => matches!(m.style, StyleTag::Chinese | StyleTag::Common),
        StyleMode::PureJapanese => matches!(m.style, StyleTag::Japanese | StyleTag::Common),
        StyleMode::Composite if styled => matches!(m.style, StyleTag::Chinese | StyleTag::Japanese),
        StyleMode::Composite => m.style == StyleTag::Common,
    }
}

fn check_assignment(kinds: &BTreeSet<Element>, a: &StyleAssignment, mode: StyleMode) -> Result<(), String> {
    let assigned: BTreeSet<Element> = a.iter().map(|(e, _)| e).collect();
    ensure!(&assigned == kinds, "kinds {kinds:?} but assigned {assigned:?}");
    for (e, m) in a.iter() {
        ensure!(admitted(mode, e, m), "{e} -> {} not admitted under {}", m.id, mode.as_str());
    }
    Ok(())
}

fn oracle_count(rs: &RuleSet, c: &ModelCatalog) -> u64 {
    rs.rules
        .iter()
        .map(|r| {
            let kinds: BTreeSet<Element> = derive_deterministic(&r.grammar).unwrap().into_iter().collect();
            kinds
                .iter()
                .map(|&e| c.models().iter().filter(|m| admitted(rs.mode, e, m)).count() as u64)
                .product::<u64>()
        })
        .sum()
}

// ---------------------------------------------------------------------------

fn ac1_canonical_fidelity() -> Outcome {
    let g = canonical();
    let shape: Vec<(&str, usize)> = g
        .productions()
        .iter()
        .map(|p| (p.lhs.as_str(), p.alternatives.len()))
        .collect();
    let want = [("building", 1), ("base", 3), ("main", 1), ("mainlist", 4), ("roofs", 3), ("rooflist", 2)];
    ensure!(shape == want, "shape {shape:?}");
    let again = parse_grammar(&format_grammar(&g)).map_err(|e| e.to_string())?;
    ensure!(again == g, "format/parse round trip changed the grammar");
    Ok("6 productions, alternatives (1,3,1,4,3,2), round trip identical".into())
}

fn ac2_worked_example() -> Outcome {
    let rule = parse_grammar(&read("grammars/example.bcg")).map_err(|e| e.to_string())?;
    let seq = derive_deterministic(&rule).map_err(|e| e.to_string())?;
    let want = [
        Wall, Floor, Beam, Window, Window, Beam, Window, Door, Window, Beam, Window, Window, Beam, Roof, Roof, Toproof,
    ];
    ensure!(seq == want, "sequence {seq:?}");
    let tree = recognize(&canonical(), &seq).ok_or("canonical grammar rejects the sequence")?;
    ensure!(tree.frontier() == seq, "witness tree frontier differs");

    let plan = to_building_plan(&tree).map_err(|e| e.to_string())?;
    let catalog = ModelCatalog::bundled();
    let a = assign_styles(&plan, &catalog, StyleMode::PureChinese, 7).map_err(|e| e.to_string())?;
    let geo = GeometryConfig::default();
    let prov = Provenance {
        source: "example.bcg".into(),
        seed: 7,
        mode: StyleMode::PureChinese,
        catalog: catalog.name.clone(),
    };
    let level = layout(&plan, &a, &geo, prov).map_err(|e| e.to_string())?;
    let svg = String::from_utf8(render_svg(&level, &catalog).map_err(|e| e.to_string())?).unwrap();
    let rects = svg.matches("<rect ").count();
    ensure!(rects == 16, "{rects} rects");
    let report = check_support(&level, &geo);
    ensure!(report.stable, "{report}");
    Ok("16-element sequence, recognized, 16 rects, stable".into())
}

fn ac3_duality() -> Outcome {
    let g = canonical();
    let limits = DerivationLimits::default();
    let mut longest = 0;
    for seed in 0..1000u64 {
        let seq = derive_random(&g, seed, &limits).map_err(|e| format!("seed {seed}: {e}"))?;
        ensure!(in_language(&seq), "seed {seed}: {seq:?} outside the language");
        let tree = recognize(&g, &seq).ok_or_else(|| format!("seed {seed}: rejected {seq:?}"))?;
        ensure!(tree.frontier() == seq && tree.conforms_to(&g), "seed {seed}: bad witness");
        longest = longest.max(seq.len());
    }
    Ok(format!("1000/1000 accepted, longest {longest}"))
}

fn ac4_completeness() -> Outcome {
    let g = canonical();
    let got = derive_all(&g, 8).map_err(|e| e.to_string())?;
    let oracle = brute_force_language(&g, 8);
    ensure!(got == oracle, "derive_all has {} sentences, oracle {}", got.len(), oracle.len());
    for s in &oracle {
        ensure!(in_language(s), "{s:?} fails the language predicate");
        ensure!(recognize(&g, s).is_some(), "{s:?} not recognized");
    }
    // The recognizer agrees with the predicate on every sequence up to 5.
    let mut members = 0;
    for s in all_sequences(5) {
        let p = in_language(&s);
        ensure!(recognize(&g, &s).is_some() == p, "recognize disagrees on {s:?}");
        members += p as usize;
    }
    let short = oracle.iter().filter(|s| s.len() <= 5).count();
    ensure!(members == short, "predicate count {members} vs enumerated {short}");
    Ok(format!("{} sentences up to length 8, exact set equality", got.len()))
}

fn random_rule(rng: &mut Rng) -> String {
    let base = ["wall floor", "wall", "floor"][rng.below(3)];
    let mut main = vec!["beam"];
    let n = 1 + rng.below(5);
    for i in 0..n {
        if i > 0 && rng.below(3) == 0 {
            main.push("beam");
        }
        main.push(["window", "door"][rng.below(2)]);
    }
    main.push("beam");
    let k = rng.below(3);
    let mut roofs = vec!["roof"; k];
    if k == 0 || rng.below(2) == 0 {
        roofs.push("toproof");
    }
    format!(
        "<building> ::= <base> <main> <roofs>\n<base> ::= {base}\n<main> ::= {}\n<roofs> ::= {}\n",
        main.join(" "),
        roofs.join(" ")
    )
}

/// Drops random models, keeping at least one per (element, style) group.
fn random_catalog(rng: &mut Rng) -> ModelCatalog {
    let full = ModelCatalog::bundled();
    let mut keep: BTreeMap<(Element, String), Vec<String>> = BTreeMap::new();
    for m in full.models() {
        keep.entry((m.element, m.style.as_str().to_string())).or_default().push(m.id.clone());
    }
    let mut dropped = HashSet::new();
    for ids in keep.values() {
        for id in &ids[1..] {
            if rng.below(3) == 0 {
                dropped.insert(id.clone());
            }
        }
    }
    full.without(|m| dropped.contains(&m.id))
}

fn check_counts(rs: &RuleSet, c: &ModelCatalog) -> Result<u64, String> {
    let closed = count_closed_form(rs, c).map_err(|e| e.to_string())?;
    let oracle = oracle_count(rs, c);
    ensure!(closed.total == oracle, "{}: closed form {} vs oracle {oracle}", rs.name, closed.total);
    let mut seen = HashSet::new();
    let mut per_rule: BTreeMap<String, u64> = BTreeMap::new();
    for item in enumerate_levels(rs, c, usize::MAX) {
        let (rule, a) = item.map_err(|e| e.to_string())?;
        let g = &rs.rules.iter().find(|r| r.id == rule).unwrap().grammar;
        let kinds: BTreeSet<Element> = derive_deterministic(g).unwrap().into_iter().collect();
        check_assignment(&kinds, &a, rs.mode)?;
        ensure!(validate_kinds(&kinds, &a, rs.mode).is_empty(), "library validator disagrees");
        ensure!(seen.insert((rule.clone(), a.summary())), "duplicate {rule} {}", a.summary());
        *per_rule.entry(rule).or_default() += 1;
    }
    ensure!(seen.len() as u64 == closed.total, "{}: stream {} vs closed form {}", rs.name, seen.len(), closed.total);
    for (id, n) in &closed.per_rule {
        ensure!(per_rule.get(id).copied().unwrap_or(0) == *n, "rule {id}: stream/closed form mismatch");
    }
    Ok(closed.total)
}

fn ac5_count_equivalence() -> Outcome {
    let catalog = ModelCatalog::bundled();
    let mut totals = Vec::new();
    for name in ["chinese", "japanese", "composite"] {
        let rs = RuleSet::load_dir(&bundled_ruleset_dir(name)).map_err(|e| e.to_string())?;
        totals.push(check_counts(&rs, &catalog)?);
    }
    let mut rng = Rng::new(0xB0C6);
    for i in 0..50 {
        let mode = StyleMode::ALL[rng.below(3)];
        let rules = (0..1 + rng.below(3))
            .map(|j| Rule {
                id: format!("r{j}"),
                grammar: parse_grammar(&random_rule(&mut rng)).unwrap(),
                file: None,
            })
            .collect();
        let rs = RuleSet::new(format!("random{i}"), mode, rules, None).map_err(|e| e.to_string())?;
        let c = random_catalog(&mut rng);
        check_counts(&rs, &c)?;
    }
    Ok(format!("bundled totals {totals:?} and 50 random sets: stream = closed form = oracle"))
}

fn ac6_reference_reporting() -> Outcome {
    let mut shown = Vec::new();
    for (name, reference) in [("chinese", 567), ("japanese", 540), ("composite", 10125)] {
        let out = bcg_bin()
            .args(["count", bundled_ruleset_dir(name).to_str().unwrap()])
            .output()
            .map_err(|e| e.to_string())?;
        ensure!(out.status.code() == Some(0), "{name}: exit {:?}", out.status.code());
        let text = String::from_utf8(out.stdout).unwrap();
        ensure!(text.contains(&format!("reference total: {reference}\n")), "{name}: reference missing:\n{text}");
        ensure!(text.contains("computed total: "), "{name}: computed total missing");
        ensure!(text.contains("DIVERGES") || text.contains("MATCHES"), "{name}: no marker");
        let marker = text.lines().find(|l| l.starts_with("DIVERGES") || l.starts_with("MATCHES")).unwrap();
        shown.push(marker.to_string());
    }
    Ok(shown.join("; "))
}

fn ac7_catalog_conformance() -> Outcome {
    let c = ModelCatalog::bundled();
    let mut tally: BTreeMap<(Element, StyleTag), usize> = BTreeMap::new();
    for m in c.models() {
        *tally.entry((m.element, m.style)).or_default() += 1;
    }
    let mut want = BTreeMap::new();
    for style in [StyleTag::Chinese, StyleTag::Japanese] {
        for (e, n) in [(Window, 3), (Door, 3), (Roof, 3), (Toproof, 2)] {
            want.insert((e, style), n);
        }
    }
    want.insert((Wall, StyleTag::Common), 3);
    want.insert((Floor, StyleTag::Common), 2);
    want.insert((Beam, StyleTag::Common), 1);
    ensure!(tally == want, "tally {tally:?}");
    Ok(format!("{} models, per-(element, style) counts exact", c.models().len()))
}

fn ac8_style_consistency() -> Outcome {
    let catalog = ModelCatalog::bundled();
    let g = canonical();
    let limits = DerivationLimits::default();
    let mut rng = Rng::new(8);
    for i in 0..2000 {
        let plan_seed = rng.next_u64();
        let style_seed = rng.next_u64();
        let mode = StyleMode::ALL[rng.below(3)];
        let plan = derive_plan(&g, plan_seed, &limits).map_err(|e| e.to_string())?;
        let a = assign_styles(&plan, &catalog, mode, style_seed).map_err(|e| e.to_string())?;
        check_assignment(&plan.kinds(), &a, mode).map_err(|e| format!("triple {i}: {e}"))?;
        for e in plan.elements() {
            ensure!(a.get(e).is_some(), "triple {i}: {e} unassigned");
        }
    }
    Ok("2000 triples, 0 violations".into())
}

fn ac9_stability() -> Outcome {
    let catalog = ModelCatalog::bundled();
    let geo = GeometryConfig::default();
    let limits = DerivationLimits::default();
    let mut levels = 0;
    for name in ["chinese", "japanese", "composite"] {
        let rs = RuleSet::load_dir(&bundled_ruleset_dir(name)).map_err(|e| e.to_string())?;
        for rule in &rs.rules {
            for seed in 0..1000u64 {
                let plan = derive_plan(&rule.grammar, seed, &limits).map_err(|e| e.to_string())?;
                let a = assign_styles(&plan, &catalog, rs.mode, seed).map_err(|e| e.to_string())?;
                let prov = Provenance {
                    source: rule.id.clone(),
                    seed,
                    mode: rs.mode,
                    catalog: catalog.name.clone(),
                };
                let level = layout(&plan, &a, &geo, prov).map_err(|e| e.to_string())?;
                let report = check_support(&level, &geo);
                ensure!(report.stable, "{name}/{} seed {seed}: {report}", rule.id);
                levels += 1;
            }
        }
    }
    Ok(format!("{levels} levels, 0 unstable"))
}

fn dir_bytes(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().to_string_lossy().into_owned(), std::fs::read(e.path()).unwrap())
        })
        .collect()
}

fn ac10_determinism() -> Outcome {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let grammar = data("grammars/canonical.bcg");
    let mut runs = Vec::new();
    for run in ["a", "b"] {
        let dir = tmp.path().join(run);
        for (style, seed) in [("chinese", "7"), ("japanese", "11"), ("composite", "12345")] {
            let status = bcg_bin()
                .args(["generate", grammar.to_str().unwrap(), "--style", style, "--seed", seed])
                .args(["--format", "json", "--format", "xml", "--format", "svg", "--out"])
                .arg(dir.join(format!("{style}_{seed}")))
                .output()
                .map_err(|e| e.to_string())?;
            ensure!(status.status.success(), "generate failed: {}", String::from_utf8_lossy(&status.stderr));
        }
        runs.push(dir_bytes(&dir));
    }
    ensure!(runs[0].len() == 9, "expected 9 files, got {}", runs[0].len());
    ensure!(runs[0] == runs[1], "generate output differs between runs");

    let mut batches = Vec::new();
    for jobs in ["1", "4", "4"] {
        let dir = tmp.path().join(format!("batch{}", batches.len()));
        let out = bcg_bin()
            .args(["batch", bundled_ruleset_dir("composite").to_str().unwrap()])
            .args(["--n", "40", "--seed", "100", "--jobs", jobs, "--format", "json", "--format", "svg", "--out"])
            .arg(&dir)
            .output()
            .map_err(|e| e.to_string())?;
        ensure!(out.status.success(), "batch failed: {}", String::from_utf8_lossy(&out.stderr));
        batches.push(dir_bytes(&dir));
    }
    ensure!(batches[0].len() == 81, "expected 81 batch files, got {}", batches[0].len());
    ensure!(batches[0] == batches[1] && batches[1] == batches[2], "parallel batch differs from serial");
    Ok("generate x2 identical (9 files), batch serial = parallel (81 files)".into())
}

struct Criterion {
    id: u32,
    name: &'static str,
    limit: Option<Duration>,
    run: fn() -> Outcome,
}

fn main() -> ExitCode {
    let criteria = [
        Criterion { id: 1, name: "canonical grammar fidelity", limit: Some(Duration::from_secs(1)), run: ac1_canonical_fidelity },
        Criterion { id: 2, name: "worked example reproduction", limit: Some(Duration::from_secs(1)), run: ac2_worked_example },
        Criterion { id: 3, name: "generator/recognizer duality", limit: Some(Duration::from_secs(30)), run: ac3_duality },
        Criterion { id: 4, name: "small-scale completeness", limit: Some(Duration::from_secs(60)), run: ac4_completeness },
        Criterion { id: 5, name: "count equivalence", limit: Some(Duration::from_secs(60)), run: ac5_count_equivalence },
        Criterion { id: 6, name: "reference count reporting", limit: None, run: ac6_reference_reporting },
        Criterion { id: 7, name: "catalog conformance", limit: None, run: ac7_catalog_conformance },
        Criterion { id: 8, name: "style consistency", limit: None, run: ac8_style_consistency },
        Criterion { id: 9, name: "stability", limit: Some(Duration::from_secs(60)), run: ac9_stability },
        Criterion { id: 10, name: "determinism", limit: None, run: ac10_determinism },
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for c in &criteria {
        let t = Instant::now();
        let outcome = panic::catch_unwind(AssertUnwindSafe(c.run))
            .unwrap_or_else(|p| {
                let msg = p
                    .downcast_ref::<String>()
                    .cloned()
                    .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                    .unwrap_or_default();
                Err(format!("panicked: {msg}"))
            })
            .and_then(|detail| match c.limit {
                Some(l) if t.elapsed() > l => Err(format!("took {:?}, limit {l:?}", t.elapsed())),
                _ => Ok(detail),
            });
        let ms = t.elapsed().as_millis();
        match outcome {
            Ok(detail) => println!("AC{:<2} PASS  {} ({ms} ms): {detail}", c.id, c.name),
            Err(why) => {
                failed += 1;
                println!("AC{:<2} FAIL  {} ({ms} ms): {why}", c.id, c.name);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
