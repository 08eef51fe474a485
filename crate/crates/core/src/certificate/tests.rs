use super::*;
use crate::algebra::{complement, difference, equivalent, union};
use crate::fixtures::{accept_all, dollar_blocks, eventually_constant_once, finitely_many_a};
use crate::game::{decide_game, refuter_to_transducer, verify_refuter, Player};
use crate::pattern::OmegaPattern;

fn ab() -> Alphabet {
    Alphabet::from_chars("ab")
}

fn refuter_for(mode: &Mode, family: &str) -> (GammaDescriptor, crate::transducer::RefuterTransducer) {
    let g = make_gamma(family).unwrap();
    let v = decide_game(mode, &g, None).unwrap();
    assert_eq!(v.winner, Player::Refuter, "{family}");
    let r = refuter_to_transducer(&v).unwrap();
    assert!(verify_refuter(&r, mode, &g).unwrap());
    (g, r)
}

/// Extract, verify, rebuild and re-verify.
fn closure(mode: &Mode, family: &str) -> Certificate {
    let (g, r) = refuter_for(mode, family);
    let c = extract_certificate(&r, &g, mode).unwrap();
    let rep = verify_certificate(&c, mode).unwrap();
    assert!(rep.valid, "{family}: {c} {rep:?}");
    let back = refuter_from_certificate(&c).unwrap();
    assert!(verify_refuter(&back, mode, &g).unwrap(), "{family}: rebuilt from {c}");
    c
}

#[test]
fn known_certificate_for_finitely_many_a() {
    let c = Certificate::three_word("dbw", &ab(), "", "b", "a").unwrap();
    assert_eq!(c.to_string(), "⟨ε, b, a⟩");
    assert_eq!(c.length(), 2);
    assert!(verify_for(&c, &finitely_many_a()).unwrap());
    let swapped = Certificate::three_word("dbw", &ab(), "", "a", "b").unwrap();
    let rep = verify_certificate(&swapped, &Mode::recognize(finitely_many_a())).unwrap();
    assert!(!rep.valid);
    assert!(rep.checks[0].counterexample.is_some());
}

#[test]
fn json_round_trip() {
    let c = Certificate::three_word("dbw", &ab(), "", "b", "a").unwrap();
    let text = c.to_json();
    assert!(text.contains("\"shape\": \"three-word\""));
    assert!(text.contains("\"x1\": \"b\""));
    assert_eq!(Certificate::from_json(&text).unwrap(), c);
    let bad = text.replace("\"b\"", "\"\"");
    assert!(Certificate::from_json(&bad).is_err());
}

#[test]
fn dollar_certificates() {
    let l = dollar_blocks();
    let s = l.alphabet().clone();
    for (x, x1, x2) in [("01", "$", "1"), ("01$", "$", "1$")] {
        let c = Certificate::three_word("dbw", &s, x, x1, x2).unwrap();
        assert!(verify_for(&c, &l).unwrap(), "{c}");
    }
}

#[test]
fn nothing_certifies_the_full_language() {
    let all = accept_all(ab());
    for (x, x1, x2) in [("", "a", "b"), ("ab", "b", "a"), ("", "b", "b")] {
        let c = Certificate::three_word("dbw", &ab(), x, x1, x2).unwrap();
        let rep = verify_certificate(&c, &Mode::recognize(all.clone())).unwrap();
        assert!(rep.checks[0].holds);
        assert!(!rep.checks[1].holds && !rep.valid);
    }
}

#[test]
fn known_certificate_fails_against_the_radius_pair() {
    let l = finitely_many_a();
    let i = eventually_constant_once();
    let l1 = difference(&l, &i).unwrap();
    let l2 = complement(&union(&l, &i).unwrap());
    let c = Certificate::three_word("dbw", &ab(), "", "b", "a").unwrap();
    let rep = verify_certificate(&c, &Mode::separate(l1, l2)).unwrap();
    assert!(!rep.valid);
    // b^ω lies in I
    let bw = crate::alphabet::LassoWord::parse("(b)", &ab()).unwrap();
    assert!(i.accepts(&bw).unwrap());
}

#[test]
fn extracted_from_finitely_many_a() {
    let mode = Mode::recognize(finitely_many_a());
    let (_, r) = refuter_for(&mode, "dbw");
    let c = closure(&mode, "dbw");
    assert!(c.length() <= 2 * r.num_states(), "{c} vs {} states", r.num_states());
}

#[test]
fn extracted_from_dollar_blocks() {
    let mode = Mode::recognize(dollar_blocks());
    let (_, r) = refuter_for(&mode, "dbw");
    let c = closure(&mode, "dbw");
    assert!(c.length() <= 2 * r.num_states());
}

#[test]
fn rebuilt_refuter_follows_the_words() {
    let c = Certificate::three_word("dbw", &ab(), "", "b", "a").unwrap();
    let r = refuter_from_certificate(&c).unwrap();
    assert_eq!(r.num_states(), 1 + 2 * 2);
    let acc = r.inputs.letter("acc").unwrap();
    let rej = r.inputs.letter("rej").unwrap();
    let y = crate::alphabet::LassoWord::new(vec![], vec![rej]).unwrap();
    assert_eq!(r.run_lasso(&y).unwrap().format(&ab()), "(b)");
    let y = crate::alphabet::LassoWord::new(vec![], vec![acc]).unwrap();
    let out = r.run_lasso(&y).unwrap();
    let b_star_a = OmegaPattern::new(Regex::eps(), Regex::concat(vec![Regex::star(Regex::word(&[1])), Regex::word(&[0])]))
        .unwrap()
        .to_nbw(&ab())
        .unwrap();
    assert!(b_star_a.accepts(&out).unwrap());
    let g = make_gamma("dbw").unwrap();
    assert!(verify_refuter(&r, &Mode::recognize(finitely_many_a()), &g).unwrap());

    let l = dollar_blocks();
    let c = Certificate::three_word("dbw", l.alphabet(), "01", "$", "1").unwrap();
    let r = refuter_from_certificate(&c).unwrap();
    assert_eq!(r.num_states(), 1 + 2 + 2 * 2);
    for y in [[acc, acc], [rej, acc], [rej, rej]] {
        assert_eq!(r.run(&y).unwrap(), vec![0, 1]);
    }
    assert!(verify_refuter(&r, &Mode::recognize(l), &g).unwrap());
}

/// Walks the stratum in order, trusting only the pattern-automaton checks.
fn slow_shortest(l: &DetOmegaAutomaton, family: &str, cap: usize) -> Option<Certificate> {
    let g = make_gamma(family).unwrap();
    let k = l.alphabet().len();
    let words = |n: usize| -> Vec<Word> {
        (0..k.pow(n as u32))
            .map(|mut i| {
                let mut w = vec![0; n];
                for j in (0..n).rev() {
                    w[j] = i % k;
                    i /= k;
                }
                w
            })
            .collect()
    };
    for n in 2..=cap {
        let mut all = Vec::new();
        for lx in 0..=n - 2 {
            for l1 in 1..n - lx {
                for x in words(lx) {
                    for x1 in words(l1) {
                        for x2 in words(n - lx - l1) {
                            all.push((x.clone(), x1.clone(), x2));
                        }
                    }
                }
            }
        }
        all.sort();
        for (x, x1, x2) in all {
            let c = Certificate::new(&g, CertMode::Recognize, l.alphabet().clone(), Words::ThreeWord { x, x1, x2 }).unwrap();
            if verify_for(&c, l).unwrap() {
                return Some(c);
            }
        }
    }
    None
}

#[test]
fn brute_force_examples() {
    let g = make_gamma("dbw").unwrap();
    let c = shortest_certificate_bruteforce(&finitely_many_a(), &g, 3).unwrap().unwrap();
    assert_eq!(c.to_string(), "⟨ε, b, a⟩");
    assert_eq!(Some(c), slow_shortest(&finitely_many_a(), "dbw", 3));
    assert_eq!(shortest_certificate_bruteforce(&accept_all(ab()), &g, 6).unwrap(), None);
    let l = dollar_blocks();
    let c = shortest_certificate_bruteforce(&l, &g, 4).unwrap().unwrap();
    assert!(c.length() <= 4 && verify_for(&c, &l).unwrap());
    assert_eq!(Some(c), slow_shortest(&l, "dbw", 4));
    assert!(matches!(
        shortest_certificate_bruteforce(&l, &g, 40),
        Err(Error::BoundsExceeded(_))
    ));
}

#[test]
fn brute_force_dual() {
    // infinitely many a is not co-Büchi
    let l = finitely_many_a().complement();
    let g = make_gamma("dcw").unwrap();
    let c = shortest_certificate_bruteforce(&l, &g, 3).unwrap().unwrap();
    assert_eq!(Some(c.clone()), slow_shortest(&l, "dcw", 3));
    assert_eq!(c.to_string(), "⟨ε, b, a⟩");
    assert_eq!(shortest_certificate_bruteforce(&finitely_many_a(), &g, 4).unwrap(), None);
}

#[test]
fn radius_candidates_for_finitely_many_a() {
    let l = finitely_many_a();
    let lc = l.complement();
    let c = Certificate::three_word("dbw", &ab(), "", "b", "a").unwrap();
    let cands = radius_candidates(&c, &l, &lc, 1000).unwrap();
    assert_eq!(cands.len(), 5);
    assert!(cands.iter().all(|k| k.available()));
    let parse = |s: &str| crate::alphabet::LassoWord::parse(s, &ab()).unwrap();
    // C0 = everything: both sides empty
    let (a, b) = cands[0].pair.as_ref().unwrap();
    assert!(crate::algebra::is_empty(a).0 && crate::algebra::is_empty(b).0);
    // C2 = (a*·b)^ω: the second side becomes finitely many b
    let c2 = cands[2].radius.as_ref().unwrap();
    assert!(c2.accepts(&parse("(ab)")).unwrap() && !c2.accepts(&parse("b(a)")).unwrap());
    let (a, b) = cands[2].pair.as_ref().unwrap();
    assert!(equivalent(a, &l).unwrap());
    let fin_b = crate::fixtures::finitely_many_b();
    assert!(equivalent(b, &fin_b).unwrap());
    // C4 keeps L and removes x·(x1+x2)*·x2^ω = (a+b)*·a^ω's complement part
    let (a, b) = cands[4].pair.as_ref().unwrap();
    assert!(equivalent(a, &l).unwrap());
    let expected = OmegaPattern::new(
        Regex::star(Regex::words(&[&[0], &[1]])),
        Regex::concat(vec![Regex::word(&[0]), Regex::star(Regex::word(&[0])), Regex::word(&[1]), Regex::star(Regex::word(&[1]))]),
    )
    .unwrap()
    .to_nbw(&ab())
    .unwrap();
    let expected = crate::determinize::determinize_nbw(&expected, 1000).unwrap();
    assert!(equivalent(b, &expected).unwrap());
    let g = make_gamma("dbw").unwrap();
    let v = decide_game(&Mode::separate(a.clone(), b.clone()), &g, None).unwrap();
    assert_eq!(v.winner, Player::Refuter);
    // the certificate no longer applies to any of the new pairs
    for k in &cands {
        let (a, b) = k.pair.clone().unwrap();
        assert!(!verify_certificate(&c, &Mode::separate(a, b)).unwrap().valid, "{}", k.name);
    }
}

/// Four colors by last letter: the highest color seen infinitely often decides.
fn four_color_parity() -> DetOmegaAutomaton {
    let s = Alphabet::from_chars("0123");
    let delta = (0..4).map(|_| (0..4).collect()).collect();
    DetOmegaAutomaton::parity(s, 0, delta, vec![0, 1, 2, 3], 0, 3).unwrap()
}

#[test]
fn flower_from_parity_refuter() {
    let mode = Mode::recognize(four_color_parity());
    let c = closure(&mode, "parity:0..2");
    assert!(matches!(c.words, Words::Flower { ref blocks, .. } if blocks.len() == 3));
    let text = c.to_json();
    assert_eq!(Certificate::from_json(&text).unwrap(), c);
    // parity:1..3 fails too, since the language needs four colors
    let c = closure(&mode, "parity:1..3");
    assert!(verify_certificate(&c, &mode).unwrap().valid);
}

#[test]
fn dual_three_word() {
    let mode = Mode::recognize(finitely_many_a().complement());
    let c = closure(&mode, "dcw");
    assert_eq!(c.shape, Shape::ThreeWordDual);
}

#[test]
fn weak_shapes() {
    let c = closure(&Mode::recognize(finitely_many_a()), "weak");
    assert_eq!(c.shape, Shape::WeakFive);
    let only_a = DetOmegaAutomaton::parity(ab(), 0, vec![vec![0, 1], vec![1, 1]], vec![1, 0], 0, 1).unwrap();
    let c = closure(&Mode::recognize(only_a.clone()), "weak:0..1");
    assert!(matches!(c.shape, Shape::WeakChain { .. }));
    let c = closure(&Mode::recognize(only_a), "bounded");
    assert_eq!(c.shape, Shape::BoundedSix);
    assert_eq!(Certificate::from_json(&c.to_json()).unwrap(), c);
}

#[test]
fn separation_certificates() {
    let l = finitely_many_a();
    let i = eventually_constant_once();
    let mode = Mode::separate(difference(&l, &i).unwrap(), complement(&union(&l, &i).unwrap()));
    let c = closure(&mode, "dbw");
    assert_eq!(c.mode, CertMode::Separate);
}

#[test]
fn generic_families_have_no_shape() {
    let mode = Mode::recognize(finitely_many_a());
    let g = make_gamma("el:Inf(p)").unwrap();
    let v = decide_game(&mode, &g, None).unwrap();
    if v.winner == Player::Refuter {
        let r = refuter_to_transducer(&v).unwrap();
        assert!(matches!(extract_certificate(&r, &g, &mode), Err(Error::ShapeUnsupported(_))));
    }
}
