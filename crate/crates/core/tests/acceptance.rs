//! Acceptance criteria. Each criterion prints one PASS/FAIL line; the
//! process exits nonzero if any fails.

use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;
use std::sync::Arc;
use std::time::Instant;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use dlogic::cli;
use dlogic::defops::{
    and, apply_def_to_formula, apply_def_to_term, eliminate_composite, iff, logical_app, not,
    rep_ax_def, rep_subst, subst_constants, typed_set_def, unfold_model,
};
use dlogic::kernel::{
    expand_script, instantiate_schema, is_primitive, is_tautology, replay_rule, Options, Status,
    Theory, Verdict,
};
use dlogic::parser::{
    parse_construct, parse_declarations, render, render_declaration, Alphabet, Context, DeclKind,
    Declaration, Just, ProofScript,
};
use dlogic::stdlib::{builtin_source, load_builtin, Manifest};
use dlogic::syntax::{alpha_eq, free_vars, logical, Binder, Construct, Mode, Node, SimpleDef};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 8] = [
        ("1 stdlib integrity", stdlib_integrity),
        ("2 derived rule replay and mutations", rule_replay),
        ("3 kernel theorems and expansions", kernel_theorems),
        ("4 tautology oracle", tautology_oracle),
        ("5 definition algebra", definition_algebra),
        ("6 substitution safety", substitution_safety),
        ("7 round trip", round_trip),
        ("8 schema instantiation", schema_instantiation),
    ];
    let mut failed = 0;
    for (name, f) in criteria {
        let t = Instant::now();
        let r = std::panic::catch_unwind(f).unwrap_or_else(|_| Err("panicked".into()));
        let ms = t.elapsed().as_millis();
        match r {
            Ok(msg) => println!("PASS criterion {name}: {msg} ({ms} ms)"),
            Err(msg) => {
                failed += 1;
                println!("FAIL criterion {name}: {msg} ({ms} ms)");
            }
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn stdlib_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../stdlib")
}

fn builtin() -> Theory {
    load_builtin(&Theory::new(Options::default())).expect("bundled theories load")
}

/// The theory of the bundled files before `file`.
fn before(file: &str) -> Theory {
    let m = Manifest::builtin().prefix_before(&[file]);
    dlogic::stdlib::load_stdlib(&Theory::new(Options::default()), &m, |p| {
        Ok(builtin_source(p).expect("bundled").to_string())
    })
    .expect("prefix loads")
    .0
}

fn f(th: &Theory, s: &str) -> Construct {
    parse_construct(s, th.context(), Some(Mode::F)).unwrap_or_else(|e| panic!("{s}: {e}"))
}

// 1

fn stdlib_integrity() -> Outcome {
    let dir = stdlib_dir();
    let files: Vec<String> = ["zfc.dlog", "relfun.dlog", "rel_oo.dlog", "groups.dlog"]
        .iter()
        .map(|n| dir.join(n).display().to_string())
        .collect();
    let mut args = vec![
        "dlogic".to_string(),
        "--allow-asserted".into(),
        "check".into(),
    ];
    args.extend(files);
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let t = Instant::now();
    let code = cli::run(args, &mut out, &mut err);
    let secs = t.elapsed().as_secs_f64();
    let out = String::from_utf8_lossy(&out);
    ensure(code == 0, || {
        format!("exit {code}: {}", String::from_utf8_lossy(&err))
    })?;
    ensure(secs < 2.0, || format!("took {secs:.2} s"))?;
    let th = builtin();
    let axioms: BTreeSet<&str> = th.nonlogical_axioms().keys().map(|k| &**k).collect();
    let want: BTreeSet<&str> = [
        "Extensionality",
        "Pairing",
        "Union",
        "PowerSet",
        "Separation",
        "Infinity",
        "Replacement",
        "Choice",
        "Foundation",
    ]
    .into_iter()
    .collect();
    ensure(axioms == want, || format!("axioms {axioms:?}"))?;
    let summary = out.lines().last().unwrap_or("");
    ensure(summary.starts_with("9 axioms"), || {
        format!("summary {summary:?}")
    })?;
    Ok(format!("exit 0 in {secs:.2} s; {summary}"))
}

// 2

fn with_ref(j: &Just, slot: usize, to: usize) -> Option<Just> {
    let mut k = 0;
    let mut hit = |i: usize| {
        let r = if k == slot { to } else { i };
        k += 1;
        r
    };
    let out = match j {
        Just::Taut(refs, extra) => {
            Just::Taut(refs.iter().map(|i| hit(*i)).collect(), extra.clone())
        }
        Just::Mp(a, b) => {
            let a = hit(*a);
            Just::Mp(a, hit(*b))
        }
        Just::Subst(a, b) => {
            let a = hit(*a);
            Just::Subst(a, hit(*b))
        }
        Just::Alpha(i) => Just::Alpha(hit(*i)),
        Just::Beta(i) => Just::Beta(hit(*i)),
        Just::GammaP(i) => Just::GammaP(hit(*i)),
        Just::Gamma(i, d) => Just::Gamma(hit(*i), d.clone()),
        Just::Inst(i, b) => Just::Inst(hit(*i), b.clone()),
        Just::Unfold(i) => Just::Unfold(hit(*i)),
        _ => return None,
    };
    (slot < k).then_some(out)
}

fn rule_replay() -> Outcome {
    let th = before("zfc.dlog");
    let rec = &th.theorems()["SubstRule"];
    let Status::Rule { premises } = &rec.status else {
        return Err(format!("status {:?}", rec.status));
    };
    let script = rec.script.clone().ok_or("no script")?;
    ensure(script.steps.len() == 9, || {
        format!("{} steps", script.steps.len())
    })?;
    let r = replay_rule(&th, premises, &rec.statement, &script);
    ensure(r.outcome.is_ok(), || format!("replay: {:?}", r.outcome))?;

    let reject = |s: &ProofScript, at: usize, what: &str| -> Result<(), String> {
        match replay_rule(&th, premises, &rec.statement, s).outcome {
            Ok(()) => Err(format!("{what} was accepted")),
            Err(e) if e.to_string().contains(&format!("step {at}:")) => Ok(()),
            Err(e) => Err(format!("{what}: error does not name step {at}: {e}")),
        }
    };
    let n = script.steps.len();
    let mut mutations = 0;
    let mut escaped = Vec::new();
    for i in 0..n {
        let idx = script.steps[i].index;
        let mut s = script.clone();
        s.steps[i].formula = not(s.steps[i].formula.clone());
        reject(&s, idx, &format!("negated formula at step {idx}"))?;
        mutations += 1;
        for slot in 0.. {
            let Some(_) = with_ref(&script.steps[i].just, slot, 0) else {
                break;
            };
            for to in 1..=n + 1 {
                let m = with_ref(&script.steps[i].just, slot, to).expect("slot exists");
                if m.refs() == script.steps[i].just.refs() {
                    continue;
                }
                let mut s = script.clone();
                s.steps[i].just = m;
                match reject(&s, idx, &format!("step {idx} citing {to} in slot {slot}")) {
                    Ok(()) => mutations += 1,
                    Err(e) => escaped.push(e),
                }
            }
        }
        for label in (0..=n + 1).filter(|l| *l != idx) {
            let mut s = script.clone();
            s.steps[i].index = label;
            reject(&s, label, &format!("step {idx} relabelled {label}"))?;
            mutations += 1;
        }
    }
    ensure(escaped.is_empty(), || {
        format!(
            "{mutations} mutations rejected, {} not: {}",
            escaped.len(),
            escaped.join("; ")
        )
    })?;
    Ok(format!(
        "9 steps replay; {mutations} single mutations rejected at the mutated step"
    ))
}

// 3

const PROVED: [&str; 18] = [
    "AllInst",
    "ExIntro",
    "AllEx",
    "NotAll",
    "NotEx",
    "ModelImp",
    "ModelAnd",
    "ModelOr",
    "ModelNot",
    "BoundedAllEx",
    "BoundedAllInst",
    "AllFalse",
    "AllOrShift",
    "AllImpShift",
    "AlphaRule",
    "BetaRule",
    "GammaPrimeRule",
    "GammaRule",
];

const ASSERTED: [&str; 18] = [
    "NotAllBounded",
    "NotExBounded",
    "AllImpLeft",
    "AllOrLeft",
    "AllAndLeft",
    "AllAnd",
    "ExOrLeft",
    "ExOr",
    "ExAndLeft",
    "AllImpMono",
    "AllImpExMono",
    "AllSwap",
    "AllAllAnd",
    "AllImpExLeft",
    "ExImpAllLeft",
    "AllIffMono",
    "ExAllSwap",
    "Intersection2",
];

fn kernel_theorems() -> Outcome {
    let th = builtin();
    let mut expanded_steps = 0;
    for name in PROVED
        .iter()
        .chain(&["SubstRule", "Pair", "TrmUnion", "EmptySet", "Intersection"])
    {
        let rec = th
            .theorems()
            .get(*name)
            .ok_or_else(|| format!("{name} missing"))?;
        let premises = match &rec.status {
            Status::Proved => vec![],
            Status::Rule { premises } => premises.clone(),
            Status::Asserted => return Err(format!("{name} is asserted")),
        };
        let script = rec
            .script
            .as_ref()
            .ok_or_else(|| format!("{name} has no script"))?;
        let r = replay_rule(&th, &premises, &rec.statement, script);
        ensure(r.outcome.is_ok(), || format!("{name}: {:?}", r.outcome))?;
        let e = expand_script(&th, script).map_err(|e| format!("{name}: expansion: {e}"))?;
        ensure(is_primitive(&e), || {
            format!("{name}: expansion is not primitive")
        })?;
        let r = replay_rule(&th, &premises, &rec.statement, &e);
        ensure(r.outcome.is_ok(), || {
            format!("{name}: expansion replay: {:?}", r.outcome)
        })?;
        expanded_steps += e.steps.len();
    }
    for name in ASSERTED.iter().chain(&["ReplacementTrm"]) {
        let rec = th
            .theorems()
            .get(*name)
            .ok_or_else(|| format!("{name} missing"))?;
        ensure(rec.status == Status::Asserted, || {
            format!("{name}: {:?}", rec.status)
        })?;
    }
    Ok(format!(
        "{} scripts replay, their expansions are primitive and replay ({expanded_steps} steps); {} asserted items load",
        PROVED.len() + 5,
        ASSERTED.len() + 1
    ))
}

// 4

#[derive(Clone, Debug)]
enum Prop {
    Atom(usize),
    Const(bool),
    Not(Box<Prop>),
    Bin(u8, Box<Prop>, Box<Prop>),
}

const OPS: [&str; 4] = [logical::AND, logical::OR, logical::IMP, logical::IFF];

impl Prop {
    fn eval(&self, v: u32) -> bool {
        match self {
            Prop::Atom(i) => v >> i & 1 == 1,
            Prop::Const(b) => *b,
            Prop::Not(p) => !p.eval(v),
            Prop::Bin(op, p, q) => {
                let (a, b) = (p.eval(v), q.eval(v));
                match op {
                    0 => a && b,
                    1 => a || b,
                    2 => !a || b,
                    _ => a == b,
                }
            }
        }
    }

    fn construct(&self) -> Construct {
        match self {
            Prop::Atom(i) => Construct::var(&format!("p{i}"), Mode::F),
            Prop::Const(true) => logical_app(logical::TRUE, vec![]).unwrap(),
            Prop::Const(false) => logical_app(logical::FALSE, vec![]).unwrap(),
            Prop::Not(p) => logical_app(logical::NOT, vec![p.construct()]).unwrap(),
            Prop::Bin(op, p, q) => {
                logical_app(OPS[*op as usize], vec![p.construct(), q.construct()]).unwrap()
            }
        }
    }
}

fn truth_table(p: &Prop, atoms: usize) -> bool {
    (0..1u32 << atoms).all(|v| p.eval(v))
}

fn random_prop(rng: &mut StdRng, atoms: usize, depth: usize) -> Prop {
    if depth == 0 || rng.gen_ratio(1, 5) {
        return if rng.gen_ratio(1, 10) {
            Prop::Const(rng.gen())
        } else {
            Prop::Atom(rng.gen_range(0..atoms))
        };
    }
    if rng.gen_ratio(1, 5) {
        Prop::Not(Box::new(random_prop(rng, atoms, depth - 1)))
    } else {
        Prop::Bin(
            rng.gen_range(0..4),
            Box::new(random_prop(rng, atoms, depth - 1)),
            Box::new(random_prop(rng, atoms, depth - 1)),
        )
    }
}

fn tautology_oracle() -> Outcome {
    let t = Instant::now();
    let mut disagree = Vec::new();
    let mut check = |p: &Prop, atoms: usize| {
        let got = is_tautology(&p.construct(), 16);
        if !matches!(got, Ok(b) if b == truth_table(p, atoms)) && disagree.len() < 5 {
            disagree.push(format!("{p:?}: {got:?}"));
        }
    };
    // every formula over p0, p1, p2 with at most four connectives
    let mut by_size: Vec<Vec<Prop>> = vec![(0..3).map(Prop::Atom).collect()];
    for n in 1..=3 {
        let mut v: Vec<Prop> = by_size[n - 1]
            .iter()
            .map(|p| Prop::Not(Box::new(p.clone())))
            .collect();
        for i in 0..n {
            for a in &by_size[i] {
                for b in &by_size[n - 1 - i] {
                    for op in 0..4 {
                        v.push(Prop::Bin(op, Box::new(a.clone()), Box::new(b.clone())));
                    }
                }
            }
        }
        by_size.push(v);
    }
    let mut exhaustive = 0;
    for ps in &by_size {
        for p in ps {
            check(p, 3);
            exhaustive += 1;
        }
    }
    for p in &by_size[3] {
        check(&Prop::Not(Box::new(p.clone())), 3);
        exhaustive += 1;
    }
    for i in 0..4 {
        for a in &by_size[i] {
            for b in &by_size[3 - i] {
                for op in 0..4 {
                    check(&Prop::Bin(op, Box::new(a.clone()), Box::new(b.clone())), 3);
                    exhaustive += 1;
                }
            }
        }
    }
    let mut rng = StdRng::seed_from_u64(4);
    for _ in 0..10_000 {
        let atoms = rng.gen_range(1..=4);
        check(&random_prop(&mut rng, atoms, 5), atoms);
    }
    let secs = t.elapsed().as_secs_f64();
    ensure(disagree.is_empty(), || {
        format!("disagreements: {disagree:?}")
    })?;
    ensure(secs < 10.0, || format!("took {secs:.2} s"))?;
    Ok(format!(
        "{exhaustive} enumerated and 10000 random formulas agree"
    ))
}

// 5

fn tvar(n: &str) -> Construct {
    Construct::var(n, Mode::T)
}

fn eq(s: Construct, t: Construct) -> Construct {
    logical_app(logical::EQ, vec![s, t]).unwrap()
}

fn sdef(names: &[&str], body: Construct) -> Construct {
    Construct::simple_def(SimpleDef {
        kind: dlogic::syntax::DefKind::Variables,
        binders: names.iter().map(|n| Binder::plain(n)).collect(),
        body,
    })
    .unwrap()
}

/// A random formula over the terms `vars`, the free formula `q` and one
/// quantifier.
fn random_formula(rng: &mut StdRng, vars: &[&str], depth: usize) -> Construct {
    let v = |rng: &mut StdRng| tvar(vars[rng.gen_range(0..vars.len())]);
    if depth == 0 || rng.gen_ratio(1, 4) {
        return match rng.gen_range(0..6) {
            0 => Construct::var("q", Mode::F),
            1 => logical_app(logical::TRUE, vec![]).unwrap(),
            _ => eq(v(rng), v(rng)),
        };
    }
    match rng.gen_range(0..6) {
        0 => not(random_formula(rng, vars, depth - 1)),
        1 => {
            let body = eq(tvar("u"), v(rng));
            let q = if rng.gen() { logical::ALL } else { logical::EX };
            logical_app(q, vec![sdef(&["u"], body)]).unwrap()
        }
        k => logical_app(
            OPS[(k - 2) as usize],
            vec![
                random_formula(rng, vars, depth - 1),
                random_formula(rng, vars, depth - 1),
            ],
        )
        .unwrap(),
    }
}

fn random_def(rng: &mut StdRng, names: &[&str]) -> Construct {
    let k = rng.gen_range(1..=names.len());
    let mut vars: Vec<&str> = names[..k].to_vec();
    vars.extend(["a", "c"]);
    sdef(&names[..k], random_formula(rng, &vars, 3))
}

fn random_model(rng: &mut StdRng, k: usize) -> Construct {
    let comps: Vec<Construct> = (0..k)
        .map(|_| match rng.gen_range(0..4) {
            0 => tvar("a"),
            1 => tvar("b"),
            2 => tvar("x1"),
            _ => logical_app(logical::EPS, vec![sdef(&["u"], eq(tvar("u"), tvar("a")))]).unwrap(),
        })
        .collect();
    if k == 1 {
        comps[0].clone()
    } else {
        Construct::tuple(comps).unwrap()
    }
}

fn binders(d: &Construct) -> usize {
    d.as_def().map_or(0, |sd| sd.binders.len())
}

fn has_definition_symbol(c: &Construct) -> bool {
    let here = match c.node() {
        Node::App { head, .. } => head.arity.result() == Mode::D,
        _ => false,
    };
    here || c.children().into_iter().any(has_definition_symbol)
}

fn definition_algebra() -> Outcome {
    let mut rng = StdRng::seed_from_u64(5);
    let xs = ["x1", "x2", "x3"];
    let ys = ["y1", "y2", "y3"];
    let equivalent = |l: &Construct, r: &Construct| {
        matches!(is_tautology(&iff(l.clone(), r.clone()), 16), Ok(true))
    };
    for case in 0..1000 {
        let d = random_def(&mut rng, &xs);
        let k = binders(&d);
        let z = random_model(&mut rng, k);
        let p = random_formula(&mut rng, &["x1", "x2", "x3", "a"], 2);
        let dz = unfold_model(&d, &z).map_err(|e| format!("case {case}: {e}"))?;
        let dpz = apply_def_to_formula(&d, &z, &p).map_err(|e| format!("case {case}: {e}"))?;
        let lifted = |op: &str, r: Option<&Construct>| {
            let args = match r {
                None => vec![d.clone()],
                Some(r) => vec![d.clone(), r.clone()],
            };
            unfold_model(&logical_app(op, args).unwrap(), &z)
        };
        let laws = [
            ("~", lifted(logical::DNOT, None), not(dz.clone())),
            (
                "&",
                lifted(logical::DAND, Some(&p)),
                and(dz.clone(), dpz.clone()),
            ),
            (
                "or",
                lifted(logical::DOR, Some(&p)),
                logical_app(logical::OR, vec![dz.clone(), dpz.clone()]).unwrap(),
            ),
            (
                "->",
                lifted(logical::DIMP, Some(&p)),
                logical_app(logical::IMP, vec![dz.clone(), dpz.clone()]).unwrap(),
            ),
        ];
        for (op, l, r) in laws {
            let l = l.map_err(|e| format!("case {case} {op}: {e}"))?;
            ensure(equivalent(&l, &r), || {
                format!("case {case} {op}: {l} vs {r}")
            })?;
        }

        let d2 = random_def(&mut rng, &ys);
        let m = binders(&d2);
        let cat = eliminate_composite(
            &logical_app(logical::CONCAT, vec![d.clone(), d2.clone()]).unwrap(),
        )
        .map_err(|e| format!("case {case} !: {e}"))?;
        ensure(binders(&cat) == k + m, || {
            format!("case {case}: {cat} has {} names", binders(&cat))
        })?;
        let h = eliminate_composite(
            &logical_app(logical::HCONCAT, vec![d.clone(), d2.clone()]).unwrap(),
        )
        .map_err(|e| format!("case {case} \\: {e}"))?;
        ensure(binders(&h) == k + m - 1, || {
            format!("case {case}: {h} has {} names", binders(&h))
        })?;

        let composite = match rng.gen_range(0..4) {
            0 => logical_app(
                logical::DNOT,
                vec![logical_app(logical::DAND, vec![d.clone(), p.clone()]).unwrap()],
            ),
            1 => logical_app(
                logical::CONCAT,
                vec![
                    logical_app(logical::DNOT, vec![d.clone()]).unwrap(),
                    d2.clone(),
                ],
            ),
            2 => logical_app(
                logical::HCONCAT,
                vec![
                    d.clone(),
                    logical_app(logical::DOR, vec![d2.clone(), p.clone()]).unwrap(),
                ],
            ),
            _ => logical_app(logical::DIMP, vec![d.clone(), p.clone()]),
        }
        .unwrap();
        let e = eliminate_composite(&composite).map_err(|e| format!("case {case}: {e}"))?;
        ensure(e.as_def().is_some() && !has_definition_symbol(&e), || {
            format!("case {case}: {composite} eliminates to {e}")
        })?;
        let e2 = eliminate_composite(&e).map_err(|e| format!("case {case}: {e}"))?;
        ensure(alpha_eq(&e, &e2), || {
            format!("case {case}: not idempotent on {e}")
        })?;
    }
    Ok("1000 cases: lifted connectives, elimination, binder counts".into())
}

// 6

/// Substitution by renaming every binder to a fresh name first, then
/// replacing free occurrences. Covers the generator grammar only.
fn oracle(c: &Construct, env: &BTreeMap<Arc<str>, Construct>, fresh: &mut usize) -> Construct {
    match c.node() {
        Node::Ref(r) if r.is_var() => env.get(&r.internal).cloned().unwrap_or_else(|| c.clone()),
        Node::Ref(_) => c.clone(),
        Node::App { head, args } => Construct::app(
            head.clone(),
            args.iter().map(|a| oracle(a, env, fresh)).collect(),
        )
        .unwrap(),
        Node::Def(sd) => {
            let mut inner = env.clone();
            let mut bs = Vec::new();
            for b in &sd.binders {
                assert!(b.ty.is_none());
                *fresh += 1;
                let n = format!("w{fresh}");
                inner.insert(b.name.clone(), tvar(&n));
                bs.push(Binder::plain(&n));
            }
            Construct::simple_def(SimpleDef {
                kind: sd.kind,
                binders: bs,
                body: oracle(&sd.body, &inner, fresh),
            })
            .unwrap()
        }
        other => panic!("outside the grammar: {other:?}"),
    }
}

/// Formulas of the grammar up to `levels` nestings of connectives, binders
/// and H.
fn grammar(levels: usize) -> Vec<Construct> {
    let terms = ["x", "y", "a"];
    let atoms: Vec<Construct> = terms
        .iter()
        .flat_map(|s| terms.iter().map(move |t| eq(tvar(s), tvar(t))))
        .collect();
    let mut by_level = vec![atoms.clone()];
    for n in 1..=levels {
        let prev = by_level[n - 1].clone();
        let mut v = atoms.clone();
        for f in &prev {
            v.push(not(f.clone()));
            for b in ["x", "y"] {
                for q in [logical::ALL, logical::EX] {
                    v.push(logical_app(q, vec![sdef(&[b], f.clone())]).unwrap());
                }
            }
            for g in &atoms {
                v.push(logical_app(logical::AND, vec![f.clone(), g.clone()]).unwrap());
            }
        }
        if n >= 2 {
            for f in &by_level[n - 2] {
                for b in ["x", "y"] {
                    let h = logical_app(logical::EPS, vec![sdef(&[b], f.clone())]).unwrap();
                    for t in terms {
                        v.push(eq(h.clone(), tvar(t)));
                    }
                }
            }
        }
        by_level.push(v);
    }
    let mut all = Vec::new();
    let mut seen = BTreeSet::new();
    for v in by_level {
        for c in v {
            if seen.insert(format!("{c:?}")) {
                all.push(c);
            }
        }
    }
    all
}

fn expected_free(c: &Construct, sigma: &BTreeMap<Arc<str>, Construct>) -> BTreeSet<Arc<str>> {
    let fv = free_vars(c);
    let mut out: BTreeSet<Arc<str>> = fv
        .iter()
        .filter(|v| !sigma.contains_key(*v))
        .cloned()
        .collect();
    for (k, v) in sigma {
        if fv.contains(k) {
            out.extend(free_vars(v));
        }
    }
    out
}

fn substitution_safety() -> Outcome {
    let h = |b: &str, body: Construct| logical_app(logical::EPS, vec![sdef(&[b], body)]).unwrap();
    let sigmas: Vec<Vec<(&str, Construct)>> = vec![
        vec![("x", tvar("y"))],
        vec![("x", tvar("a"))],
        vec![("x", h("y", eq(tvar("y"), tvar("x"))))],
        vec![("y", h("x", eq(tvar("x"), tvar("a"))))],
        vec![("x", h("a", eq(tvar("a"), tvar("y"))))],
        vec![("x", tvar("y")), ("y", tvar("x"))],
        vec![("x", h("x", eq(tvar("x"), tvar("y")))), ("y", tvar("a"))],
    ];
    let formulas = grammar(2);
    let mut cases = 0;
    let mut fresh = 0;
    for sigma in &sigmas {
        let env: BTreeMap<Arc<str>, Construct> = sigma
            .iter()
            .map(|(k, v)| (Arc::from(*k), v.clone()))
            .collect();
        let names: Vec<&str> = sigma.iter().map(|(k, _)| *k).collect();
        let vals: Vec<Construct> = sigma.iter().map(|(_, v)| v.clone()).collect();
        let keys: Vec<Arc<str>> = names.iter().map(|n| Arc::from(*n)).collect();
        let d = sdef(&names, logical_app(logical::TRUE, vec![]).unwrap());
        let z = if vals.len() == 1 {
            vals[0].clone()
        } else {
            Construct::tuple(vals.clone()).unwrap()
        };
        for c in &formulas {
            let target_def = sdef(&["y"], c.clone());
            let target_term = logical_app(logical::EPS, vec![target_def.clone()]).unwrap();
            let runs: [(&str, &Construct, Result<Construct, dlogic::Error>); 4] = [
                ("subst_constants", c, subst_constants(c, &keys, &vals)),
                ("apply_def_to_formula", c, apply_def_to_formula(&d, &z, c)),
                (
                    "apply_def_to_term",
                    &target_term,
                    apply_def_to_term(&d, &z, &target_term),
                ),
                ("rep_subst", &target_def, rep_subst(&d, &vals, &target_def)),
            ];
            for (what, input, got) in runs {
                let got = got.map_err(|e| format!("{what} on {input}: {e}"))?;
                let want = oracle(input, &env, &mut fresh);
                ensure(alpha_eq(&got, &want), || {
                    format!("{what} on {input}: {got}, oracle {want}")
                })?;
                let fv = free_vars(&got);
                let expect = expected_free(input, &env);
                ensure(fv == expect, || {
                    format!("{what} on {input}: capture, free {fv:?}, expected {expect:?}")
                })?;
                cases += 1;
            }
        }
    }
    ensure(cases >= 5000, || format!("only {cases} cases"))?;
    Ok(format!(
        "{cases} cases over {} formulas agree with the oracle",
        formulas.len()
    ))
}

// 7

fn same_declaration(a: &Declaration, b: &Declaration) -> bool {
    match (&a.kind, &b.kind) {
        (
            DeclKind::Abbreviation { name: n1, body: b1 },
            DeclKind::Abbreviation { name: n2, body: b2 },
        )
        | (DeclKind::Axiom { name: n1, body: b1 }, DeclKind::Axiom { name: n2, body: b2 }) => {
            n1 == n2 && alpha_eq(b1, b2)
        }
        (
            DeclKind::Primary {
                symbol: s1,
                defining: d1,
            },
            DeclKind::Primary {
                symbol: s2,
                defining: d2,
            },
        ) => {
            s1 == s2
                && match (d1, d2) {
                    (None, None) => true,
                    (Some(x), Some(y)) => alpha_eq(&x.axiom(), &y.axiom()),
                    _ => false,
                }
        }
        (
            DeclKind::SynVars {
                names: n1,
                mode: m1,
            },
            DeclKind::SynVars {
                names: n2,
                mode: m2,
            },
        ) => n1 == n2 && m1 == m2,
        (
            DeclKind::Theorem {
                name: n1,
                premises: p1,
                body: b1,
                proof: s1,
            },
            DeclKind::Theorem {
                name: n2,
                premises: p2,
                body: b2,
                proof: s2,
            },
        ) => {
            n1 == n2
                && p1.len() == p2.len()
                && p1.iter().zip(p2).all(|(x, y)| alpha_eq(x, y))
                && alpha_eq(b1, b2)
                && match (s1, s2) {
                    (None, None) => true,
                    (Some(x), Some(y)) => {
                        x.steps.len() == y.steps.len()
                            && x.steps.iter().zip(&y.steps).all(|(s, t)| {
                                s.index == t.index
                                    && alpha_eq(&s.formula, &t.formula)
                                    && s.just.render(Alphabet::Ascii)
                                        == t.just.render(Alphabet::Ascii)
                            })
                    }
                    _ => false,
                }
        }
        _ => false,
    }
}

fn random_text(rng: &mut StdRng, mode: Mode, depth: usize) -> String {
    let t = |rng: &mut StdRng| ["a", "b", "x", "y", "A", "B"][rng.gen_range(0..6)].to_string();
    let bv = |rng: &mut StdRng| ["u", "v", "x"][rng.gen_range(0..3)];
    if depth == 0 {
        return match mode {
            Mode::T => t(rng),
            Mode::F => match rng.gen_range(0..5) {
                0 => "true".into(),
                1 => "P".into(),
                _ => format!("{} in {}", t(rng), t(rng)),
            },
            Mode::D => format!("({} | {} in {})", bv(rng), bv(rng), t(rng)),
        };
    }
    let sub = |m: Mode, rng: &mut StdRng| {
        let d = rng.gen_range(0..depth);
        random_text(rng, m, d)
    };
    match mode {
        Mode::T => match rng.gen_range(0..8) {
            0 => format!("{{{}, {}}}", sub(Mode::T, rng), sub(Mode::T, rng)),
            1 => format!("U[{}]", sub(Mode::T, rng)),
            2 => format!("P({})", sub(Mode::T, rng)),
            3 => format!("({} \\cup {})", sub(Mode::T, rng), sub(Mode::T, rng)),
            4 => format!("H[{}]", sub(Mode::D, rng)),
            5 => format!(
                "if({}, {}, {})",
                sub(Mode::F, rng),
                sub(Mode::T, rng),
                sub(Mode::T, rng)
            ),
            6 => format!("{{{}}}", sub(Mode::D, rng)),
            _ => format!("{{x:{} & {}}}", sub(Mode::T, rng), sub(Mode::F, rng)),
        },
        Mode::F => match rng.gen_range(0..13) {
            0 => format!("~({})", sub(Mode::F, rng)),
            1 => format!("({} & {})", sub(Mode::F, rng), sub(Mode::F, rng)),
            2 => format!("({} or {})", sub(Mode::F, rng), sub(Mode::F, rng)),
            3 => format!("({} -> {})", sub(Mode::F, rng), sub(Mode::F, rng)),
            4 => format!("({} == {})", sub(Mode::F, rng), sub(Mode::F, rng)),
            5 => format!("A[{}]", sub(Mode::D, rng)),
            6 => format!("E[{}]", sub(Mode::D, rng)),
            7 => format!("A[x:{}, {}]", sub(Mode::T, rng), sub(Mode::F, rng)),
            8 => format!("{}({})", sub(Mode::D, rng), sub(Mode::T, rng)),
            9 => format!(
                "{}({}, {})",
                sub(Mode::D, rng),
                sub(Mode::F, rng),
                sub(Mode::T, rng)
            ),
            10 => format!("{} = {}", sub(Mode::T, rng), sub(Mode::T, rng)),
            11 => format!("{} sub {}", sub(Mode::T, rng), sub(Mode::T, rng)),
            _ => format!("Set({})", sub(Mode::D, rng)),
        },
        Mode::D => match rng.gen_range(0..6) {
            0 => format!("({} | {})", bv(rng), sub(Mode::F, rng)),
            1 => format!(
                "({}:{} | {})",
                bv(rng),
                sub(Mode::T, rng),
                sub(Mode::F, rng)
            ),
            2 => format!("(u, v | {})", sub(Mode::F, rng)),
            3 => format!("(~{})", sub(Mode::D, rng)),
            4 => format!("({} & {})", sub(Mode::D, rng), sub(Mode::F, rng)),
            _ => format!(
                "((u | {}) ! (v | {}))",
                sub(Mode::F, rng),
                sub(Mode::F, rng)
            ),
        },
    }
}

fn round_trip() -> Outcome {
    let mut decls = 0;
    let mut ctx_th = Theory::new(Options::default());
    for e in Manifest::builtin().entries {
        let src = builtin_source(&e.path).expect("bundled");
        let ctx: &Context = ctx_th.context();
        let ds = parse_declarations(src, ctx).map_err(|x| format!("{}: {x}", e.path))?;
        for a in [Alphabet::Ascii, Alphabet::Unicode] {
            let text: String = ds.iter().map(|d| render_declaration(d, a) + "\n").collect();
            let again = parse_declarations(&text, ctx)
                .map_err(|x| format!("{} {a:?}: {x}\n{text}", e.path))?;
            ensure(again.len() == ds.len(), || {
                format!("{}: {} declarations back", e.path, again.len())
            })?;
            for (x, y) in ds.iter().zip(&again) {
                ensure(same_declaration(x, y), || {
                    format!(
                        "{} {a:?}: {} does not survive: {}",
                        e.path,
                        x.name(),
                        render_declaration(x, a)
                    )
                })?;
            }
        }
        decls += ds.len();
        ctx_th = ctx_th
            .load_source(src, &e.path)
            .1
            .map_err(|x| x.to_string())?;
    }

    let th = before("relfun.dlog");
    let mut rng = StdRng::seed_from_u64(7);
    let mut n = 0;
    while n < 10_000 {
        let text = random_text(&mut rng, Mode::F, 4);
        let c = parse_construct(&text, th.context(), Some(Mode::F))
            .map_err(|e| format!("{text}: {e}"))?;
        for a in [Alphabet::Ascii, Alphabet::Unicode] {
            let r = render(&c, a);
            let back = parse_construct(&r, th.context(), Some(Mode::F))
                .map_err(|e| format!("{r}: {e}"))?;
            ensure(alpha_eq(&c, &back), || format!("{text} renders as {r}"))?;
        }
        n += 1;
    }
    Ok(format!(
        "{decls} stdlib declarations and {n} random formulas, ASCII and Unicode"
    ))
}

// 8

fn schema_instantiation() -> Outcome {
    let th = builtin();
    let separation = [
        "(x:A | x in B)",
        "(x:a | ~(x in b))",
        "(x:P(a) | x sub b)",
        "(y:U[A] | E[z:A, y in z & z in B])",
    ];
    let replacement = [
        "(y | E[x:A & y = {x}])",
        "(y | E[x:A & y = P(x)])",
        "(y | E[x:a & y = U[x] \\cup b])",
    ];
    let mut proofs = String::new();
    for (schema, defs, builtin_test) in [
        (
            "Separation",
            &separation[..],
            typed_set_def as fn(&Construct) -> bool,
        ),
        ("Replacement", &replacement[..], rep_ax_def),
    ] {
        let ax = &th.nonlogical_axioms()[schema];
        for (i, d) in defs.iter().enumerate() {
            let dc =
                parse_construct(d, th.context(), Some(Mode::D)).map_err(|e| format!("{d}: {e}"))?;
            ensure(builtin_test(&dc), || {
                format!("{d} fails the test of {schema}")
            })?;
            let inst = instantiate_schema(ax, &vec![(Arc::from("d"), dc)], th.vocabulary())
                .map_err(|e| format!("{schema} at {d}: {e}"))?;
            let shown = render(&inst, Alphabet::Ascii);
            proofs += &format!(
                "Theorem {schema}Instance{i} := {shown}\nproof\n  1. {shown} by schema({schema}; d := {d});\nqed;\n"
            );
        }
    }
    let (reports, r) = th.load_source(&proofs, "instances");
    r.map_err(|e| format!("{e}\n{proofs}"))?;
    ensure(reports.iter().all(|r| r.verdict == Verdict::Proved), || {
        format!("{reports:?}")
    })?;
    let expected = vec![
        f(&th, "TypedSetDef(x:A | x in B) -> Set(x:A | x in B)"),
        f(
            &th,
            "RepAxDef(y | E[x:A & y = {x}]) -> Set(y | E[x:A & y = {x}])",
        ),
    ];
    let th2 = th.load_source(&proofs, "instances").1.unwrap();
    for (name, want) in ["SeparationInstance0", "ReplacementInstance0"]
        .iter()
        .zip(&expected)
    {
        let got = &th2.theorems()[*name].statement;
        ensure(alpha_eq(got, want), || format!("{name} is {got}"))?;
    }
    Ok(format!(
        "{} Separation and {} Replacement instances replay as schema steps",
        separation.len(),
        replacement.len()
    ))
}
