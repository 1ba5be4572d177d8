//! Random instances shared by the integration tests.
#![allow(dead_code)]

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use triplefold::words::{Letter, Word};
use triplefold::Automorphism;

pub fn random_word(rng: &mut ChaCha8Rng, rank: usize, max_len: usize) -> Word {
    let len = rng.gen_range(1..=max_len);
    let letters: Vec<Letter> = (0..len)
        .map(|_| {
            let l = Letter::positive(rng.gen_range(0..rank));
            if rng.gen_bool(0.5) {
                l.inv()
            } else {
                l
            }
        })
        .collect();
    Word::from_letters(letters)
}

pub fn random_nonempty_word(rng: &mut ChaCha8Rng, rank: usize, max_len: usize) -> Word {
    loop {
        let w = random_word(rng, rank, max_len);
        if !w.is_empty() {
            return w;
        }
    }
}

/// `x_i ↦ x_i x_j^ε` (right) or `x_i ↦ x_j^ε x_i` (left), with its inverse.
fn nielsen(rank: usize, i: usize, j: usize, inverse: bool, right: bool) -> Automorphism {
    let gens: Vec<Word> = (0..rank).map(Word::generator).collect();
    let xj = if inverse { gens[j].inverse() } else { gens[j].clone() };
    let mut fwd = gens.clone();
    let mut bwd = gens.clone();
    if right {
        fwd[i] = gens[i].concat(&xj);
        bwd[i] = gens[i].concat(&xj.inverse());
    } else {
        fwd[i] = xj.concat(&gens[i]);
        bwd[i] = xj.inverse().concat(&gens[i]);
    }
    Automorphism::new(fwd, bwd).unwrap()
}

fn swap(rank: usize, i: usize, j: usize) -> Automorphism {
    let mut gens: Vec<Word> = (0..rank).map(Word::generator).collect();
    gens.swap(i, j);
    Automorphism::new(gens.clone(), gens).unwrap()
}

/// A product of `moves` random Nielsen moves and transpositions.
pub fn random_automorphism(rng: &mut ChaCha8Rng, rank: usize, moves: usize) -> Automorphism {
    let mut psi = Automorphism::identity(rank);
    for _ in 0..moves {
        let i = rng.gen_range(0..rank);
        let mut j = rng.gen_range(0..rank);
        if rank > 1 {
            while j == i {
                j = rng.gen_range(0..rank);
            }
        }
        let m = if rank == 1 || rng.gen_ratio(1, 5) {
            if rank == 1 {
                let g = vec![Word::generator(0).inverse()];
                Automorphism::new(g.clone(), g).unwrap()
            } else {
                swap(rank, i, j)
            }
        } else {
            nielsen(rank, i, j, rng.gen_bool(0.5), rng.gen_bool(0.5))
        };
        psi = psi.compose(&m).unwrap();
    }
    psi
}
