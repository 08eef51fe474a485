use proptest::prelude::*;

use super::*;
use crate::algebra::{complement, is_disjoint, is_subset, union};
use crate::alphabet::{Alphabet, LassoWord};
use crate::fixtures::*;
use crate::gamma::make_gamma;
use crate::transducer::RefuterTransducer;
use crate::zielonka_tree::ZielonkaTree;

fn ab() -> Alphabet {
    Alphabet::from_chars("ab")
}

/// Answers acc with `a` and rej with `b`.
fn copycat() -> RefuterTransducer {
    let a = Alphabet::new(&["acc", "rej"]).unwrap();
    RefuterTransducer::new(a, ab(), 0, vec![vec![1, 2]; 3], vec![None, Some(0), Some(1)]).unwrap()
}

fn constant_b() -> RefuterTransducer {
    let a = Alphabet::new(&["acc", "rej"]).unwrap();
    RefuterTransducer::new(a, ab(), 0, vec![vec![1, 1]; 2], vec![None, Some(1)]).unwrap()
}

#[test]
fn finitely_many_a_is_not_buchi() {
    let g = make_gamma("dbw").unwrap();
    let mode = Mode::recognize(finitely_many_a());
    let arena = build_arena(&mode, &g).unwrap();
    assert!(arena.stats().base_positions <= 2 * 2 * 2 * 2);
    let v = solve(arena, None).unwrap();
    assert_eq!(v.winner, Player::Refuter);
    let r = refuter_to_transducer(&v).unwrap();
    assert!(verify_refuter(&r, &mode, &g).unwrap());
    let rv = decide_game(&mode, &g, None).unwrap();
    assert_eq!(rv.route, Route::Rabin);
    let r = refuter_to_transducer(&rv).unwrap();
    assert!(r.num_states() <= 4);
    assert!(verify_refuter(&r, &mode, &g).unwrap());
    // steady state: a after acc, b after rej
    let y = [1, 1, 0, 0, 1, 0, 1, 1];
    let x = r.run(&y).unwrap();
    for i in 3..y.len() {
        assert_eq!(x[i], if y[i] == 0 { 0 } else { 1 }, "position {i}");
    }
}

#[test]
fn accept_all_is_buchi() {
    let g = make_gamma("dbw").unwrap();
    let l = accept_all(ab());
    let v = decide_game(&Mode::recognize(l.clone()), &g, None).unwrap();
    assert_eq!(v.winner, Player::Prover);
    let d = prover_to_automaton(&v, &g).unwrap();
    assert_eq!(d.num_states(), 1);
    assert!(crate::algebra::equivalent(&d, &l).unwrap());
    assert!(refuter_to_transducer(&v).is_err());
}

#[test]
fn finitely_many_a_is_co_buchi() {
    let g = make_gamma("dcw").unwrap();
    let l = finitely_many_a();
    let v = decide_game(&Mode::recognize(l.clone()), &g, None).unwrap();
    assert_eq!(v.winner, Player::Prover);
    let d = prover_to_automaton(&v, &g).unwrap();
    assert_eq!(d.parity_range(), Some((1, 2)));
    assert!(is_subset(&d, &l).unwrap().0 && is_subset(&l, &d).unwrap().0);
    assert!(matches!(prover_to_automaton(&v, &g), Ok(_)));
}

#[test]
fn eventual_letters_are_separable() {
    let g = make_gamma("dbw").unwrap();
    let (l1, l2) = (finitely_many_a(), finitely_many_b());
    for generic in [false, true] {
        let mode = Mode::separate(l1.clone(), l2.clone());
        let v = if generic {
            solve(build_arena(&mode, &g).unwrap(), None).unwrap()
        } else {
            decide_game(&mode, &g, None).unwrap()
        };
        assert_eq!(v.winner, Player::Prover);
        let w = prover_to_automaton(&v, &g).unwrap();
        assert!(is_subset(&l1, &w).unwrap().0);
        assert!(is_disjoint(&w, &l2).unwrap().0);
    }
}

#[test]
fn dollar_blocks_are_not_buchi() {
    let g = make_gamma("dbw").unwrap();
    let mode = Mode::recognize(dollar_blocks());
    let v = solve(build_arena(&mode, &g).unwrap(), None).unwrap();
    assert_eq!(v.winner, Player::Refuter);
    let v = decide_game(&mode, &g, None).unwrap();
    assert_eq!(v.winner, Player::Refuter);
    let r = refuter_to_transducer(&v).unwrap();
    assert!(verify_refuter(&r, &mode, &g).unwrap());
    // the answers start with 0·1 whatever the annotations
    let rej = g.letter("rej").unwrap();
    let acc = g.letter("acc").unwrap();
    for y in [[rej; 6], [acc; 6]] {
        assert_eq!(&r.run(&y).unwrap()[..2], &[0, 1]);
    }
}

#[test]
fn handmade_refuters() {
    let dbw = make_gamma("dbw").unwrap();
    let f = finitely_many_a();
    assert!(verify_refuter(&copycat(), &Mode::recognize(f.clone()), &dbw).unwrap());
    assert!(verify_refuter(&copycat(), &Mode::recognize(complement(&f)), &dbw.dualize()).unwrap());
    assert!(!verify_refuter(&constant_b(), &Mode::recognize(f), &dbw).unwrap());
}

#[test]
fn sep_refuter_stays_outside_the_exception() {
    let dbw = make_gamma("dbw").unwrap();
    let f = finitely_many_a();
    let i = eventually_constant_once();
    let l1 = crate::algebra::difference(&f, &i).unwrap();
    let l2 = complement(&union(&f, &i).unwrap());
    let mode = Mode::separate(l1, l2);
    let v = decide_game(&mode, &dbw, None).unwrap();
    assert_eq!(v.winner, Player::Refuter);
    let r = refuter_to_transducer(&v).unwrap();
    assert!(verify_refuter(&r, &mode, &dbw).unwrap());
    // every answer avoids a*·b^ω + b*·a^ω by opening with a·b·a
    let na = dbw.annotations.len();
    let mut inputs = vec![vec![]];
    for _ in 0..5 {
        inputs = inputs
            .into_iter()
            .flat_map(|y: Vec<usize>| (0..na).map(move |a| [y.clone(), vec![a]].concat()))
            .collect();
    }
    for y in inputs {
        assert_eq!(&r.run(&y).unwrap()[..3], &[0, 1, 0], "input {y:?}");
    }
}

#[test]
fn weak_and_bounded_families() {
    // finitely many a is weak: the run settles in one of two sinks only if the word does
    let l = finitely_many_a();
    for (fam, want) in [("weak", Player::Refuter), ("bounded", Player::Refuter), ("parity:1..2", Player::Prover)] {
        let g = make_gamma(fam).unwrap();
        let mode = Mode::recognize(l.clone());
        let v = decide_game(&mode, &g, None).unwrap();
        assert_eq!(v.winner, want, "{fam}");
        match v.winner {
            Player::Refuter => assert!(verify_refuter(&refuter_to_transducer(&v).unwrap(), &mode, &g).unwrap()),
            Player::Prover => {
                let d = prover_to_automaton(&v, &g).unwrap();
                assert!(crate::algebra::equivalent(&d, &l).unwrap());
            }
        }
    }
    // a safety language: only a's
    let only_a = DetOmegaAutomaton::parity(ab(), 0, vec![vec![0, 1], vec![1, 1]], vec![1, 0], 0, 1).unwrap();
    for fam in ["weak", "weak:1..2", "dbw", "dcw"] {
        let g = make_gamma(fam).unwrap();
        let v = decide_game(&Mode::recognize(only_a.clone()), &g, None).unwrap();
        assert_eq!(v.winner, Player::Prover, "{fam}");
        let d = prover_to_automaton(&v, &g).unwrap();
        assert!(crate::algebra::equivalent(&d, &only_a).unwrap(), "{fam}");
    }
    // colors may only rise, so rejecting after accepting needs an even top color
    let g = make_gamma("weak:0..1").unwrap();
    let mode = Mode::recognize(only_a);
    let v = decide_game(&mode, &g, None).unwrap();
    assert_eq!(v.winner, Player::Refuter);
    assert!(verify_refuter(&refuter_to_transducer(&v).unwrap(), &mode, &g).unwrap());
}

#[test]
fn bounded_needs_a_decision() {
    let g = make_gamma("bounded").unwrap();
    let only_a = DetOmegaAutomaton::parity(ab(), 0, vec![vec![0, 1], vec![1, 1]], vec![1, 0], 0, 1).unwrap();
    let v = decide_game(&Mode::recognize(only_a.clone()), &g, None).unwrap();
    assert_eq!(v.winner, Player::Refuter);
    // the first letter settles membership
    let starts_a = DetOmegaAutomaton::parity(ab(), 0, vec![vec![1, 2], vec![1, 1], vec![2, 2]], vec![0, 1, 0], 0, 1).unwrap();
    let v = decide_game(&Mode::recognize(starts_a.clone()), &g, None).unwrap();
    assert_eq!(v.winner, Player::Prover);
    let d = prover_to_automaton(&v, &g).unwrap();
    assert!(crate::algebra::equivalent(&d, &starts_a).unwrap());
}

#[test]
fn superparity_uses_memory() {
    let g = make_gamma("superparity:1,1").unwrap();
    let l = finitely_many_a();
    let v = decide_game(&Mode::recognize(l.clone()), &g, None).unwrap();
    assert_eq!(v.winner, Player::Prover);
    let d = prover_to_automaton(&v, &g).unwrap();
    assert!(crate::algebra::equivalent(&d, &l).unwrap());
}

#[test]
fn arena_dump_lists_positions() {
    let g = make_gamma("dbw").unwrap();
    let a = build_arena(&Mode::recognize(finitely_many_a()), &g).unwrap();
    let d = a.dump();
    assert!(d.starts_with(&format!("positions {}", a.num_positions())));
    assert_eq!(d.lines().count(), a.num_positions() + 1);
}

#[test]
fn cancelled_solve() {
    let g = make_gamma("parity:0..2").unwrap();
    let past = std::time::Instant::now() - std::time::Duration::from_millis(1);
    let a = build_arena(&Mode::recognize(dollar_blocks()), &g).unwrap();
    assert_eq!(solve(a, Some(past)).unwrap_err(), Error::Cancelled);
}

#[test]
fn lasso_answer_of_copycat() {
    let a = Alphabet::new(&["acc", "rej"]).unwrap();
    let y = LassoWord::parse("rej(acc)", &a).unwrap();
    let x = copycat().run_lasso(&y).unwrap();
    assert_eq!(x.format(&ab()), "b(a)");
}

fn random_game() -> impl Strategy<Value = (Vec<Player>, Vec<Vec<usize>>, Vec<(Vec<bool>, Vec<bool>)>)> {
    (2usize..10).prop_flat_map(|n| {
        (
            proptest::collection::vec(any::<bool>(), n),
            proptest::collection::vec(proptest::collection::vec(0..n, 1..3), n),
            proptest::collection::vec(
                (proptest::collection::vec(any::<bool>(), n), proptest::collection::vec(any::<bool>(), n)),
                1..4,
            ),
        )
            .prop_map(|(o, s, p)| {
                let owner = o.into_iter().map(|b| if b { Player::Prover } else { Player::Refuter }).collect();
                (owner, s, p)
            })
    })
}

/// Plays the positional strategy against every opponent choice, as a
/// one-player graph, and checks no opponent cycle beats it.
fn strategy_wins(
    owner: &[Player],
    succ: &[Vec<usize>],
    me: Player,
    region: &[bool],
    strat: &[Option<usize>],
    objective: &Formula,
) -> bool {
    let n = succ.len();
    let alphabet = Alphabet::new(&(0..n).map(|i| format!("e{i}")).collect::<Vec<_>>()).unwrap();
    for start in (0..n).filter(|&v| region[v]) {
        // opponent graph restricted by my strategy
        let mut rows = vec![vec![Vec::new(); n]; n];
        for v in 0..n {
            if owner[v] == me && region[v] {
                match strat[v] {
                    Some(l) => rows[v][succ[v][l]].push(succ[v][l]),
                    None => return false,
                }
            } else {
                for &t in &succ[v] {
                    rows[v][t].push(t);
                }
            }
        }
        let g = crate::automaton::OmegaGraph {
            alphabet: alphabet.clone(),
            initial: vec![start],
            succ: rows,
            marks: (0..n).map(|v| 1u64 << v).collect(),
            formula: objective.negate(),
        };
        if !crate::algebra::graph_is_empty(&g).0 {
            return false;
        }
    }
    true
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn rabin_solver_matches_parity_reduction((owner, succ, raw) in random_game()) {
        let n = succ.len();
        let pairs: Vec<RabinPair> = raw.iter().map(|(g, b)| RabinPair { good: g.clone(), bad: b.clone() }).collect();
        // node v carries mark v; the Rabin objective as an assertion
        let obj = Formula::or(
            pairs
                .iter()
                .map(|p| {
                    let inf = Formula::or((0..n).filter(|&v| p.good[v]).map(|v| Formula::Inf(v as u32)).collect());
                    let fin = Formula::and((0..n).filter(|&v| p.bad[v]).map(|v| Formula::Fin(v as u32)).collect());
                    Formula::and(vec![inf, fin])
                })
                .collect(),
        );
        for me in [Player::Refuter, Player::Prover] {
            let (won, strat) = solve_rabin(&owner, &succ, me, &pairs, None).unwrap();
            // reference: product with the Zielonka tree of `me`'s objective, solved as parity
            let f = obj.clone();
            let tree = ZielonkaTree::new(&f, (1u64 << n) - 1);
            let mut id = std::collections::HashMap::new();
            let mut order = Vec::new();
            for v in 0..n {
                id.insert((v, tree.initial_leaf()), order.len());
                order.push((v, tree.initial_leaf()));
            }
            let mut s2 = Vec::new();
            let mut prio = Vec::new();
            let mut i = 0;
            while i < order.len() {
                let (v, leaf) = order[i];
                let (l2, p) = tree.step(leaf, 1 << v);
                prio.push(p);
                let row = succ[v].iter().map(|&t| {
                    let k = order.len();
                    *id.entry((t, l2)).or_insert_with(|| { order.push((t, l2)); k })
                }).collect();
                s2.push(row);
                i += 1;
            }
            let own: Vec<Player> = order.iter().map(|&(v, _)| {
                if me == Player::Prover { owner[v] } else { owner[v].opponent() }
            }).collect();
            let sol = solve_parity(&own, &s2, &prio, None).unwrap();
            for v in 0..n {
                prop_assert_eq!(won[v], sol.prover_wins[v], "node {}", v);
            }
            prop_assert!(strategy_wins(&owner, &succ, me, &won, &strat, &obj));
        }
    }
}
