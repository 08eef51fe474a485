use proptest::prelude::*;

use inexpress::algebra::{intersection, is_empty, is_subset, reduce};
use inexpress::certificate::{Certificate, CertMode, Words};
use inexpress::determinize::determinize_nbw;
use inexpress::hoa::{emit, parse_automaton};
use inexpress::oracle::EnumerationSpec;
use inexpress::pattern::{OmegaPattern, Regex};
use inexpress::{make_gamma, Alphabet, DetOmegaAutomaton, LassoWord, Letter, NondetBuchiAutomaton, Word};

fn word(k: usize, min: usize, max: usize) -> impl Strategy<Value = Word> + Clone {
    prop::collection::vec(0..k, min..=max)
}

fn lasso(k: usize) -> impl Strategy<Value = LassoWord> {
    (word(k, 0, 4), word(k, 1, 4)).prop_map(|(u, v)| LassoWord::new(u, v).unwrap())
}

fn dpw() -> impl Strategy<Value = DetOmegaAutomaton> {
    (1usize..=3, 0u32..=1, any::<u64>()).prop_map(|(n, low, seed)| {
        let spec = EnumerationSpec::new(n, 2, low, low + 2).unwrap();
        spec.nth(seed % spec.raw_count())
    })
}

fn nbw() -> impl Strategy<Value = NondetBuchiAutomaton> {
    (1usize..=3)
        .prop_flat_map(|n| {
            (
                Just(n),
                prop::collection::vec(prop::collection::vec(prop::collection::vec(0..n, 0..=2), 2), n),
                prop::collection::vec(any::<bool>(), n),
            )
        })
        .prop_map(|(_, delta, acc)| NondetBuchiAutomaton::new(Alphabet::from_chars("ab"), vec![0], delta, acc).unwrap())
}

fn block(k: usize) -> impl Strategy<Value = Regex> + Clone {
    word(k, 1, 2).prop_map(|w| Regex::word(&w))
}

/// The closed pattern forms used by certificates, with small blocks.
fn pattern(k: usize) -> impl Strategy<Value = OmegaPattern> {
    let u = word(k, 0, 2).prop_map(|w| Regex::word(&w));
    prop_oneof![
        (u.clone(), prop::collection::vec(block(k), 1..=2), block(k))
            .prop_map(|(u, vs, w)| OmegaPattern::new(Regex::concat(vec![u, Regex::star(Regex::union(vs))]), w).unwrap()),
        (u.clone(), prop::collection::vec(block(k), 1..=2), block(k)).prop_map(|(u, vs, w)| {
            let mut parts: Vec<Regex> = vs.into_iter().map(Regex::star).collect();
            parts.push(w);
            OmegaPattern::new(u, Regex::concat(parts)).unwrap()
        }),
        (u.clone(), block(k), block(k), block(k)).prop_map(|(u, v1, u2, w)| {
            OmegaPattern::new(Regex::concat(vec![u, Regex::star(v1), u2]), w).unwrap()
        }),
        (u, block(k), block(k), block(k), block(k), block(k)).prop_map(|(u, v1, v2, v3, v4, w)| {
            let inner = Regex::union(vec![v1, Regex::concat(vec![v2, Regex::star(v3), v4])]);
            OmegaPattern::new(Regex::concat(vec![u, Regex::star(inner)]), w).unwrap()
        }),
    ]
}

/// Membership of `l` in `prefix·period^ω` by splitting an unrolling of the
/// lasso: a prefix match, period blocks, then a stretch of whole lasso
/// periods made of period blocks.
fn decomposes(prefix: &Regex, period: &Regex, l: &LassoWord, unroll: usize) -> bool {
    let mut w: Word = l.prefix.clone();
    for _ in 0..unroll {
        w.extend_from_slice(&l.period);
    }
    let n = w.len();
    let mut seg = vec![vec![false; n + 1]; n + 1];
    for i in 0..n {
        for j in i + 1..=n {
            seg[i][j] = period.matches(&w[i..j]);
        }
    }
    let closure = |from: Vec<usize>| -> Vec<bool> {
        let mut seen = vec![false; n + 1];
        let mut stack = from;
        while let Some(i) = stack.pop() {
            if seen[i] {
                continue;
            }
            seen[i] = true;
            for j in i + 1..=n {
                if seg[i][j] && !seen[j] {
                    stack.push(j);
                }
            }
        }
        seen
    };
    let starts: Vec<usize> = (0..=n).filter(|&a| prefix.matches(&w[..a])).collect();
    let mid = closure(starts);
    let p0 = l.prefix.len();
    let lp = l.period.len();
    for p in (p0..=n).filter(|&p| mid[p]) {
        let firsts: Vec<usize> = (p + 1..=n).filter(|&j| seg[p][j]).collect();
        let reach = closure(firsts);
        if (p + lp..=n).step_by(lp).any(|q| reach[q]) {
            return true;
        }
    }
    false
}

fn regex_size(r: &Regex) -> usize {
    match r {
        Regex::Word(w) => w.len().max(1),
        Regex::Concat(ps) | Regex::Union(ps) => ps.iter().map(regex_size).sum(),
        Regex::Star(r) => regex_size(r),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn complement_splits_every_lasso(a in dpw(), w in lasso(2)) {
        prop_assert_ne!(a.accepts(&w).unwrap(), a.complement().accepts(&w).unwrap());
    }

    #[test]
    fn emptiness_witness_is_accepted(a in dpw()) {
        let (empty, witness) = is_empty(&a);
        if !empty {
            prop_assert!(a.accepts(&witness.unwrap()).unwrap());
        }
    }

    #[test]
    fn mutual_inclusion_means_same_members(a in dpw(), b in dpw(), ws in prop::collection::vec(lasso(2), 200)) {
        for other in [reduce(&a), b] {
            if is_subset(&a, &other).unwrap().0 && is_subset(&other, &a).unwrap().0 {
                for w in &ws {
                    prop_assert_eq!(a.accepts(w).unwrap(), other.accepts(w).unwrap());
                }
            }
        }
    }

    #[test]
    fn failed_inclusion_has_a_counterexample(a in dpw(), b in dpw()) {
        let (sub, cex) = is_subset(&a, &b).unwrap();
        if !sub {
            let w = cex.unwrap();
            prop_assert!(a.accepts(&w).unwrap() && !b.accepts(&w).unwrap());
        }
    }

    #[test]
    fn product_stays_within_the_grid(a in dpw(), b in dpw()) {
        prop_assert!(intersection(&a, &b).unwrap().num_states() <= a.num_states() * b.num_states());
    }

    #[test]
    fn determinization_keeps_the_language(n in nbw(), ws in prop::collection::vec(lasso(2), 30)) {
        let d = determinize_nbw(&n, 5_000).unwrap();
        for w in &ws {
            prop_assert_eq!(n.accepts(w).unwrap(), d.accepts(w).unwrap(), "{}", w.format(n.alphabet()));
        }
    }

    #[test]
    fn exchange_format_round_trips(a in dpw()) {
        let back = parse_automaton(&emit(&a)).unwrap().into_det().unwrap();
        prop_assert_eq!(back, a);
    }

    #[test]
    fn weak_structure_is_monotone(y in lasso(3)) {
        let g = make_gamma("weak:0..2").unwrap();
        let seq: Vec<Letter> = y.prefix.iter().chain(&y.period).chain(&y.period).copied().collect();
        let sorted = seq.windows(2).all(|p| p[0] <= p[1]);
        prop_assert_eq!(g.structural(&y).unwrap(), sorted);
    }

    #[test]
    fn double_dual_is_the_family(y in lasso(3), pick in 0usize..5) {
        let spec = ["dbw", "dcw", "parity:0..2", "weak:0..2", "el:Inf(0) & Fin(1)"][pick];
        let g = make_gamma(spec).unwrap();
        let y = LassoWord::new(
            y.prefix.iter().map(|&l| l % g.annotations.len()).collect(),
            y.period.iter().map(|&l| l % g.annotations.len()).collect(),
        ).unwrap();
        let d = g.dualize();
        let dd = d.dualize();
        prop_assert_eq!(g.accepts_annotation(&y).unwrap(), dd.accepts_annotation(&y).unwrap());
        prop_assert_ne!(g.accepts_annotation(&y).unwrap(), d.accepts_annotation(&y).unwrap());
    }

    #[test]
    fn certificate_records_round_trip(x in word(3, 0, 3), x1 in word(3, 1, 3), x2 in word(3, 1, 3), dual in any::<bool>()) {
        let g = make_gamma(if dual { "dcw" } else { "dbw" }).unwrap();
        let c = Certificate::new(&g, CertMode::Recognize, Alphabet::new(&["0", "1", "$"]).unwrap(), Words::ThreeWord { x, x1, x2 }).unwrap();
        prop_assert_eq!(Certificate::from_json(&c.to_json()).unwrap(), c);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn pattern_automaton_matches_decomposition(p in pattern(2), w in lasso(2)) {
        let sigma = Alphabet::from_chars("ab");
        let nbw = p.to_nbw(&sigma).unwrap();
        let unroll = 4 * (regex_size(&p.prefix) + regex_size(&p.period));
        let expect = decomposes(&p.prefix, &p.period, &w, unroll);
        prop_assert_eq!(nbw.accepts(&w).unwrap(), expect, "{} on {}", p.render(&sigma), w.format(&sigma));
    }
}
