use super::{freq_index, index_levels};
use crate::permgrp::{Perm, PermGroup};

/// Permutation of frequency indices induced by a map on runs.
fn induced(k: usize, s: usize, f: impl Fn(&[usize]) -> Vec<usize>) -> Perm {
    let n = s.pow(k as u32);
    let images = (0..n).map(|i| freq_index(&f(&index_levels(i, s, k)), s).unwrap()).collect();
    Perm::from_images(images).expect("run map is a bijection")
}

/// Swaps columns `i` and `j`.
pub fn column_swap(k: usize, s: usize, i: usize, j: usize) -> Perm {
    induced(k, s, |l| {
        let mut m = l.to_vec();
        m.swap(i, j);
        m
    })
}

/// Relabels the symbols of one column by `sigma` (level `a` becomes `sigma[a]`).
pub fn symbol_permutation(k: usize, s: usize, col: usize, sigma: &[usize]) -> Perm {
    induced(k, s, |l| {
        let mut m = l.to_vec();
        m[col] = sigma[l[col]];
        m
    })
}

/// `R_i` (0-based `i`): every other column is multiplied entrywise by column
/// `i`, which in level coding is addition mod 2.
pub fn r_operation(k: usize, i: usize) -> Perm {
    induced(k, 2, |l| (0..k).map(|j| if j == i { l[i] } else { l[j] ^ l[i] }).collect())
}

fn iso_generators(k: usize, s: usize) -> Vec<Perm> {
    let mut gens: Vec<Perm> = (0..k.saturating_sub(1)).map(|i| column_swap(k, s, i, i + 1)).collect();
    let mut swap: Vec<usize> = (0..s).collect();
    swap.swap(0, 1);
    let cycle: Vec<usize> = (0..s).map(|a| (a + 1) % s).collect();
    for col in 0..k {
        gens.push(symbol_permutation(k, s, col, &swap));
        if s > 2 {
            gens.push(symbol_permutation(k, s, col, &cycle));
        }
    }
    gens
}

/// Column permutations and per-column symbol permutations, `S_s ≀ S_k`.
pub fn iso_group(k: usize, s: usize) -> PermGroup {
    PermGroup::new(s.pow(k as u32), iso_generators(k, s)).unwrap()
}

/// Isomorphisms plus `R_1, …, R_k`, `S_2^k ⋊ S_{k+1}`.
pub fn od_group(k: usize) -> PermGroup {
    let mut gens = iso_generators(k, 2);
    gens.extend((0..k).map(|i| r_operation(k, i)));
    PermGroup::new(1 << k, gens).unwrap()
}
