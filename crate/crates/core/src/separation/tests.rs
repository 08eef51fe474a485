use super::*;
use crate::algebra::is_empty;
use crate::alphabet::{Alphabet, LassoWord};
use crate::certificate::Words;
use crate::fixtures::*;

fn ab() -> Alphabet {
    Alphabet::from_chars("ab")
}

fn dbw() -> GammaDescriptor {
    make_gamma("dbw").unwrap()
}

/// `(a*·b)^ω`, hand-built.
fn infinitely_many_b() -> DetOmegaAutomaton {
    DetOmegaAutomaton::parity(ab(), 0, vec![vec![0, 1], vec![0, 1]], vec![0, 1], 0, 1).unwrap()
}

fn x_len(s: &Step) -> usize {
    match &s.verdict.certificate().unwrap().words {
        Words::ThreeWord { x, .. } => x.len(),
        w => panic!("unexpected words {w:?}"),
    }
}

#[test]
fn fig1_refuted_with_certificate() {
    let v = decide(&Mode::recognize(finitely_many_a()), &dbw(), &Options::default()).unwrap();
    assert_eq!(v.decision, Decision::Refuted);
    assert!(v.refuter().unwrap().num_states() <= 4);
    assert_eq!(v.certificate().unwrap().to_string(), "⟨ε, b, a⟩");
    assert_eq!(v.route, Route::Rabin);
}

#[test]
fn accept_all_is_recognizable() {
    let l = accept_all(ab());
    let v = decide(&Mode::recognize(l.clone()), &dbw(), &Options::default()).unwrap();
    assert_eq!(v.decision, Decision::Recognizable);
    let a = v.automaton().unwrap();
    assert!(equivalent(a, &l).unwrap());
}

#[test]
fn eventual_letters_separable() {
    let mode = Mode::separate(finitely_many_a(), finitely_many_b());
    let v = decide(&mode, &dbw(), &Options::default()).unwrap();
    assert_eq!(v.decision, Decision::Separable);
    assert!(check_positive(v.automaton().unwrap(), &mode).unwrap());
    assert!(check_positive(&infinitely_many_b(), &mode).unwrap());
    assert!(!check_positive(&accept_all(ab()), &mode).unwrap());
}

#[test]
fn radius_exception_is_refuted() {
    let i = eventually_constant_once();
    let (l1, l2) = radius_pair(&finitely_many_a(), &i, &i).unwrap();
    let mode = Mode::separate(l1, l2);
    let v = decide(&mode, &dbw(), &Options::default()).unwrap();
    assert_eq!(v.decision, Decision::Refuted);
    assert!(verify_refuter(v.refuter().unwrap(), &mode, &dbw()).unwrap());
    assert!(verify_certificate(v.certificate().unwrap(), &mode).unwrap().valid);
}

#[test]
fn radius_pair_splits_under_and_over() {
    let l = finitely_many_a();
    let i = eventually_constant_once();
    let none = reject_all(ab());
    // only the part of I inside L is given up
    let (l1, l2) = radius_pair(&l, &i, &none).unwrap();
    assert!(equivalent(&l2, &l.complement()).unwrap());
    assert!(!l1.accepts(&LassoWord::parse("(b)", &ab()).unwrap()).unwrap());
    assert!(l1.accepts(&LassoWord::parse("ba(b)", &ab()).unwrap()).unwrap());
    let (l1, l2) = radius_pair(&l, &none, &i).unwrap();
    assert!(equivalent(&l1, &l).unwrap());
    assert!(!l2.accepts(&LassoWord::parse("(a)", &ab()).unwrap()).unwrap());
    assert!(l2.accepts(&LassoWord::parse("(ab)", &ab()).unwrap()).unwrap());
}

#[test]
fn hierarchy_example_by_family() {
    let l = hierarchy_example();
    let mode = Mode::recognize(l);
    let o = Options::default();
    assert_eq!(decide(&mode, &make_gamma("dcw").unwrap(), &o).unwrap().decision, Decision::Recognizable);
    assert_eq!(decide(&mode, &dbw(), &o).unwrap().decision, Decision::Refuted);
    assert_eq!(decide(&mode, &make_gamma("weak").unwrap(), &o).unwrap().decision, Decision::Refuted);
}

#[test]
fn no_class_witness_of_fig1() {
    let l = finitely_many_a();
    let mode = Mode::recognize(l.clone());
    let v = decide(&mode, &dbw(), &Options::default()).unwrap();
    let (w1, w2) = no_class_witness(v.refuter().unwrap(), &dbw(), &mode, DEFAULT_CAP).unwrap();
    assert!(is_subset(&w1, &l).unwrap().0);
    assert!(is_disjoint(&w2, &l).unwrap().0);
    assert!(!is_empty(&w1).0 && !is_empty(&w2).0);
    let again = decide(&Mode::separate(w1, w2), &dbw(), &Options::default()).unwrap();
    assert_eq!(again.decision, Decision::Refuted);
}

#[test]
fn no_class_witness_of_dollar_blocks() {
    let l = dollar_blocks();
    let mode = Mode::recognize(l.clone());
    let v = decide(&mode, &dbw(), &Options::default()).unwrap();
    let (w1, w2) = no_class_witness(v.refuter().unwrap(), &dbw(), &mode, DEFAULT_CAP).unwrap();
    let again = decide(&Mode::separate(w1, w2), &dbw(), &Options::default()).unwrap();
    assert_eq!(again.decision, Decision::Refuted);
}

#[test]
fn constant_image_is_one_word() {
    let a = Alphabet::new(&["acc", "rej"]).unwrap();
    let r = RefuterTransducer::new(a, ab(), 0, vec![vec![1, 1]; 2], vec![None, Some(1)]).unwrap();
    let g = dbw();
    let bw = LassoWord::parse("(b)", &ab()).unwrap();
    for ann in [difference(&g.l_struct, &g.l_acc).unwrap(), intersection(&g.l_struct, &g.l_acc).unwrap()] {
        let img = reduce(&determinize_nbw(&image(&r, &ann).unwrap(), 100).unwrap());
        assert!(img.accepts(&bw).unwrap());
        assert!(!img.accepts(&LassoWord::parse("b(a)", &ab()).unwrap()).unwrap());
        assert!(!img.accepts(&LassoWord::parse("(ab)", &ab()).unwrap()).unwrap());
    }
    // not a refuter, so the pair is rejected
    assert!(no_class_witness(&r, &g, &Mode::recognize(finitely_many_a()), 100).is_err());
}

#[test]
fn session_starts() {
    let s = approx_start(&finitely_many_a(), &dbw()).unwrap();
    assert_eq!(s.status, Status::Running);
    assert_eq!(s.certificate().unwrap().to_string(), "⟨ε, b, a⟩");
    assert_eq!(s.candidates().len(), 5);

    let s = approx_start(&accept_all(ab()), &dbw()).unwrap();
    assert!(matches!(s.status, Status::Separated { .. }));

    let s = approx_start(&dollar_blocks(), &dbw()).unwrap();
    assert_eq!(s.status, Status::Running);
    let names: Vec<&str> = s.candidates().iter().map(|c| c.name.as_str()).collect();
    assert_eq!(names, ["C0", "C1", "C2", "C3", "C4"]);
}

#[test]
fn over_approximation_separates() {
    let s = approx_start(&finitely_many_a(), &dbw()).unwrap();
    let s = approx_step(s, "C2").unwrap();
    let Status::Separated { separator } = &s.status else {
        panic!("expected separation, got {:?}", s.status);
    };
    let (l1, l2) = s.current();
    assert!(equivalent(l1, &finitely_many_a()).unwrap());
    assert!(equivalent(l2, &finitely_many_b()).unwrap());
    assert!(check_positive(separator, &Mode::separate(l1.clone(), l2.clone())).unwrap());
    assert_eq!(s.history[0].choice.as_deref(), Some("C2"));
    assert!(approx_step(s, "C1").is_err());
}

#[test]
fn whole_radius_empties_the_pair() {
    let s = approx_step(approx_start(&finitely_many_a(), &dbw()).unwrap(), "C0").unwrap();
    let (l1, l2) = s.current();
    assert!(is_empty(l1).0 && is_empty(l2).0);
    assert!(matches!(s.status, Status::Separated { .. }));
}

#[test]
fn repeated_c4_never_separates() {
    let mut s = approx_start(&finitely_many_a(), &dbw()).unwrap();
    let mut lens = vec![x_len(s.last())];
    while s.status == Status::Running {
        let prev = s.certificate().unwrap().clone();
        s = approx_step(s, "always-C4").unwrap();
        let (l1, l2) = s.current();
        let kill = verify_certificate(&prev, &Mode::separate(l1.clone(), l2.clone())).unwrap();
        assert!(!kill.valid, "step {} kept {prev}", s.steps_taken());
        if s.last().verdict.decision == Decision::Refuted {
            lens.push(x_len(s.last()));
        }
    }
    assert_eq!(s.status, Status::Exhausted);
    assert_eq!(s.steps_taken(), DEFAULT_MAX_STEPS);
    assert!(lens.windows(2).all(|w| w[0] < w[1]), "{lens:?}");
    assert!(approx_step(s, "C4").is_err());
}

#[test]
fn policies_and_bad_choices() {
    let s = approx_start(&finitely_many_a(), &dbw()).unwrap();
    assert_eq!(s.resolve("always-c3").unwrap(), "C3");
    assert_eq!(s.resolve("round-robin").unwrap(), "C0");
    assert!(approx_step(s.clone(), "C9").is_err());
    let s = approx_step(s, "C3").unwrap();
    if s.status == Status::Running {
        assert_eq!(s.resolve("round-robin").unwrap(), "C1");
    }
}

#[test]
fn session_json_replays() {
    let mut s = approx_start_with(&finitely_many_a(), &dbw(), 3, DEFAULT_CAP).unwrap();
    for c in ["C4", "round-robin", "C3"] {
        if s.status != Status::Running {
            break;
        }
        s = approx_step(s, c).unwrap();
    }
    let back = ApproximationSession::from_json(&s.to_json()).unwrap();
    assert_eq!(back.history, s.history);
    assert_eq!(back.status, s.status);
    assert!(back.replays_exactly().unwrap());

    // a running session keeps going after a round trip
    let s = approx_start(&finitely_many_a(), &dbw()).unwrap();
    let back = ApproximationSession::from_json(&s.to_json()).unwrap();
    let next = approx_step(back, "C2").unwrap();
    assert!(matches!(next.status, Status::Separated { .. }));
}

#[test]
fn tampered_record_does_not_replay() {
    let s = approx_step(approx_start(&finitely_many_a(), &dbw()).unwrap(), "C2").unwrap();
    let mut rec: serde_json::Value = serde_json::from_str(&s.to_json()).unwrap();
    rec["history"][0]["choice"] = "C0".into();
    let t = ApproximationSession::from_json(&rec.to_string()).unwrap();
    assert!(!t.replays_exactly().unwrap());
}
