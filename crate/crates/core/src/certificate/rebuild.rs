use std::collections::HashMap;

use super::{Certificate, Words};
use crate::alphabet::{Letter, Word};
use crate::error::{Error, Result};
use crate::transducer::RefuterTransducer;

/// Three-word refuter: emit `x`, then `x1` blocks until an `acc` shows up,
/// which makes the next block `x2`. The annotation read on entering a block
/// picks that block; the others are remembered in a flag.
fn three_word(
    c: &Certificate,
    inputs: &crate::alphabet::Alphabet,
    x: &Word,
    x1: &Word,
    x2: &Word,
) -> Result<RefuterTransducer> {
    let acc = inputs.letter("acc")?;
    let na = inputs.len();
    let n = x.len();
    // s_0..s_n, then (block j, position i, flag) for flag in {rej, acc}
    let block = |j: usize, i: usize, flag: usize| -> usize {
        let base = n + 1 + if j == 0 { 0 } else { 2 * x1.len() };
        let len = if j == 0 { x1.len() } else { x2.len() };
        base + flag * len + i
    };
    let total = n + 1 + 2 * (x1.len() + x2.len());
    let mut delta = vec![vec![0; na]; total];
    let mut output: Vec<Option<Letter>> = vec![None; total];
    for i in 0..n {
        output[i + 1] = Some(x[i]);
    }
    for i in 0..=n {
        for a in 0..na {
            delta[i][a] = if i < n { i + 1 } else { block(0, 0, 0) };
        }
    }
    for (j, word) in [x1, x2].into_iter().enumerate() {
        let len = word.len();
        for flag in 0..2 {
            for i in 0..len {
                let s = block(j, i, flag);
                output[s] = Some(word[i]);
                for a in 0..na {
                    let seen = flag == 1 || a == acc;
                    delta[s][a] = if i + 1 < len {
                        block(j, i + 1, usize::from(seen))
                    } else if flag == 1 || a == acc {
                        block(1, 0, 0)
                    } else {
                        block(0, 0, 0)
                    };
                }
            }
        }
    }
    RefuterTransducer::new(inputs.clone(), c.alphabet.clone(), 0, delta, output)
}

/// Refuter emitting one segment at a time. `absorb` folds an annotation into
/// the memory, `next` picks the following segment from the finished one
/// (`None` at the start) and the memory, which then resets to `fresh`.
fn segments<M: Copy + Eq + std::hash::Hash>(
    c: &Certificate,
    inputs: &crate::alphabet::Alphabet,
    segs: &[Word],
    fresh: M,
    absorb: impl Fn(M, Letter) -> M,
    next: impl Fn(Option<usize>, M) -> usize,
) -> Result<RefuterTransducer> {
    if segs.iter().any(|s| s.is_empty()) {
        return Err(Error::EmptyBlock("refuter segment".into()));
    }
    let na = inputs.len();
    let mut id: HashMap<(usize, usize, M), usize> = HashMap::new();
    let mut order: Vec<(usize, usize, M)> = Vec::new();
    let mut delta: Vec<Vec<usize>> = vec![Vec::new()];
    let mut output: Vec<Option<Letter>> = vec![None];
    let mut intern = |key: (usize, usize, M), order: &mut Vec<_>, output: &mut Vec<Option<Letter>>| -> usize {
        *id.entry(key).or_insert_with(|| {
            order.push(key);
            output.push(Some(segs[key.0][key.1]));
            order.len()
        })
    };
    let row0 = (0..na)
        .map(|a| intern((next(None, absorb(fresh, a)), 0, fresh), &mut order, &mut output))
        .collect();
    delta[0] = row0;
    let mut i = 0;
    while i < order.len() {
        let (seg, pos, mem) = order[i];
        let row = (0..na)
            .map(|a| {
                let m = absorb(mem, a);
                let key = if pos + 1 < segs[seg].len() {
                    (seg, pos + 1, m)
                } else {
                    (next(Some(seg), m), 0, fresh)
                };
                intern(key, &mut order, &mut output)
            })
            .collect();
        delta.push(row);
        i += 1;
    }
    RefuterTransducer::new(inputs.clone(), c.alphabet.clone(), 0, delta, output)
}

fn glue(a: &Word, b: &Word) -> Word {
    a.iter().chain(b).copied().collect()
}

/// A refuter whose answers stay inside the certificate's patterns.
pub fn refuter_from_certificate(c: &Certificate) -> Result<RefuterTransducer> {
    let g = c.gamma()?;
    let inputs = &g.annotations;
    match &c.words {
        Words::ThreeWord { x, x1, x2 } => three_word(c, inputs, x, x1, x2),
        Words::Flower { x, blocks } => {
            // segment 0 is x when present; block j follows the largest
            // annotation of the previous segment
            let off = usize::from(!x.is_empty());
            let mut segs: Vec<Word> = Vec::new();
            if off == 1 {
                segs.push(x.clone());
            }
            segs.extend(blocks.iter().cloned());
            segments(
                c,
                inputs,
                &segs,
                0usize,
                |m, a| m.max(a),
                |prev, m| if prev.is_none() && off == 1 { 0 } else { off + m },
            )
        }
        Words::WeakChain { hats, blocks } => {
            // segment 2j enters level j, segment 2j+1 repeats it
            let mut segs = Vec::new();
            for (h, b) in hats.iter().zip(blocks) {
                segs.push(glue(h, b));
                segs.push(b.clone());
            }
            let top = blocks.len() - 1;
            segments(c, inputs, &segs, 0usize, |m, a| m.max(a), |prev, m| match prev {
                None => 0,
                Some(s) => {
                    let level = s / 2;
                    if m > level && level < top {
                        2 * (level + 1)
                    } else {
                        2 * level + 1
                    }
                }
            })
        }
        Words::WeakFive { x, x1, x2, x3, x4 } => {
            let acc = inputs.letter("acc")?;
            let rej = inputs.letter("rej")?;
            // 0: x1, 1: x2·x3, 2: x3, 3: x4·x1, 4: x
            let mut segs = vec![x1.clone(), glue(x2, x3), x3.clone(), glue(x4, x1)];
            if !x.is_empty() {
                segs.push(x.clone());
            }
            let with_x = !x.is_empty();
            segments(
                c,
                inputs,
                &segs,
                (false, false),
                |(sa, sr), a| (sa || a == acc, sr || a == rej),
                |prev, (sa, sr)| match prev {
                    None if with_x => 4,
                    None | Some(0) | Some(3) | Some(4) => {
                        if sa {
                            1
                        } else {
                            0
                        }
                    }
                    _ => {
                        if sr {
                            3
                        } else {
                            2
                        }
                    }
                },
            )
        }
        Words::BoundedSix { hats, blocks } => {
            let acc = inputs.letter("acc")?;
            let rej = inputs.letter("rej")?;
            // 2i enters lasso i, 2i+1 repeats its cycle
            let mut segs = Vec::new();
            for i in 0..3 {
                segs.push(glue(&hats[i], &blocks[i]));
                segs.push(blocks[i].clone());
            }
            segments(
                c,
                inputs,
                &segs,
                None::<Letter>,
                |m, a| m.or((a == acc || a == rej).then_some(a)),
                |prev, m| match prev {
                    None => 0,
                    Some(s) if s < 2 => match m {
                        Some(a) if a == rej => 2,
                        Some(_) => 4,
                        None => 1,
                    },
                    Some(s) => 2 * (s / 2) + 1,
                },
            )
        }
    }
}
