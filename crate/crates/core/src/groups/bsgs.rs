//! Deterministic Schreier–Sims.
//!
//! Transversals are kept as Schreier trees over the strong generators, so
//! memory stays linear in the degree per base level.

use num_bigint::BigUint;
use num_traits::One;
use rand::Rng;

use super::perm::Perm;

const NONE: u32 = u32::MAX;
const ROOT: u32 = u32::MAX - 1;

#[derive(Debug, Clone)]
struct Level {
    /// Indices into `Bsgs::strong` of generators of this level's subgroup.
    gens: Vec<usize>,
    /// Orbit of the base point in discovery order.
    orbit: Vec<u32>,
    /// `edge[β] = s` when `β = s(γ)` for the tree parent `γ`.
    edge: Vec<u32>,
    /// For each orbit position, how many of `gens` have been checked.
    checked: Vec<usize>,
}

/// Base and strong generating set for a permutation group.
#[derive(Debug, Clone)]
pub struct Bsgs {
    degree: usize,
    generators: Vec<Perm>,
    base: Vec<u32>,
    strong: Vec<Perm>,
    strong_inv: Vec<Perm>,
    levels: Vec<Level>,
}

impl Level {
    fn new(degree: usize, base_point: u32) -> Self {
        let mut edge = vec![NONE; degree];
        edge[base_point as usize] = ROOT;
        Level {
            gens: Vec::new(),
            orbit: vec![base_point],
            edge,
            checked: vec![0],
        }
    }

    fn contains(&self, p: u32) -> bool {
        self.edge[p as usize] != NONE
    }

    fn extend_orbit(&mut self, strong: &[Perm]) {
        let mut idx = 0;
        while idx < self.orbit.len() {
            let p = self.orbit[idx];
            for &g in &self.gens {
                let q = strong[g].apply(p);
                if self.edge[q as usize] == NONE {
                    self.edge[q as usize] = g as u32;
                    self.orbit.push(q);
                    self.checked.push(0);
                }
            }
            idx += 1;
        }
    }
}

impl Bsgs {
    /// Runs Schreier–Sims on `generators` (all of the same degree).
    pub fn new(degree: usize, generators: &[Perm]) -> Self {
        let generators: Vec<Perm> = generators.to_vec();
        assert!(generators.iter().all(|g| g.degree() == degree));
        let mut strong: Vec<Perm> = Vec::new();
        for g in &generators {
            if !g.is_identity() && !strong.contains(g) {
                strong.push(g.clone());
            }
        }
        let mut bsgs = Bsgs {
            degree,
            generators,
            base: Vec::new(),
            strong_inv: strong.iter().map(Perm::inverse).collect(),
            strong,
            levels: Vec::new(),
        };
        // Initial base: every generator moves some base point.
        for gi in 0..bsgs.strong.len() {
            let g = &bsgs.strong[gi];
            if bsgs.base.iter().all(|&b| g.apply(b) == b) {
                let p = (0..degree as u32).find(|&p| g.apply(p) != p).unwrap();
                bsgs.base.push(p);
            }
        }
        for (i, &b) in bsgs.base.iter().enumerate() {
            let mut level = Level::new(degree, b);
            level.gens = (0..bsgs.strong.len())
                .filter(|&g| bsgs.base[..i].iter().all(|&c| bsgs.strong[g].apply(c) == c))
                .collect();
            level.extend_orbit(&bsgs.strong);
            bsgs.levels.push(level);
        }
        bsgs.complete();
        bsgs
    }

    fn complete(&mut self) {
        let mut i = self.levels.len() as isize - 1;
        'outer: while i >= 0 {
            let lv = i as usize;
            let mut pos = 0;
            while pos < self.levels[lv].orbit.len() {
                while self.levels[lv].checked[pos] < self.levels[lv].gens.len() {
                    let gi = self.levels[lv].gens[self.levels[lv].checked[pos]];
                    let beta = self.levels[lv].orbit[pos];
                    let u_beta = self.coset_rep(lv, beta);
                    let image = self.strong[gi].apply(beta);
                    let h = self.strip_level(u_beta.then(&self.strong[gi]), lv, image);
                    self.levels[lv].checked[pos] += 1;
                    if h.is_identity() {
                        continue;
                    }
                    let (r, j) = self.strip(&h, lv + 1);
                    if j < self.levels.len() || !r.is_identity() {
                        if j == self.levels.len() {
                            let p = (0..self.degree as u32).find(|&p| r.apply(p) != p).unwrap();
                            self.base.push(p);
                            self.levels.push(Level::new(self.degree, p));
                        }
                        let idx = self.strong.len();
                        self.strong_inv.push(r.inverse());
                        self.strong.push(r);
                        for l in lv + 1..=j {
                            self.levels[l].gens.push(idx);
                            let strong = &self.strong;
                            self.levels[l].extend_orbit(strong);
                        }
                        i = j as isize;
                        continue 'outer;
                    }
                }
                pos += 1;
            }
            i -= 1;
        }
    }

    /// Multiplies `g` (which maps the level's base point to `beta`) by `u_beta⁻¹`.
    fn strip_level(&self, mut g: Perm, level: usize, mut beta: u32) -> Perm {
        let lv = &self.levels[level];
        loop {
            let e = lv.edge[beta as usize];
            debug_assert_ne!(e, NONE);
            if e == ROOT {
                return g;
            }
            g = g.then(&self.strong_inv[e as usize]);
            beta = self.strong_inv[e as usize].apply(beta);
        }
    }

    /// Coset representative mapping the base point of `level` to `beta`.
    pub fn coset_rep(&self, level: usize, mut beta: u32) -> Perm {
        let lv = &self.levels[level];
        let mut path = Vec::new();
        loop {
            let e = lv.edge[beta as usize];
            if e == ROOT {
                break;
            }
            path.push(e as usize);
            beta = self.strong_inv[e as usize].apply(beta);
        }
        let mut u = Perm::identity(self.degree);
        for &e in path.iter().rev() {
            u = u.then(&self.strong[e]);
        }
        u
    }

    /// Sifts `g` from `level` down; returns the residue and the level where
    /// sifting stopped (`levels.len()` if it went through).
    pub fn strip(&self, g: &Perm, level: usize) -> (Perm, usize) {
        let mut g = g.clone();
        for j in level..self.levels.len() {
            let beta = g.apply(self.base[j]);
            if !self.levels[j].contains(beta) {
                return (g, j);
            }
            g = self.strip_level(g, j, beta);
        }
        (g, self.levels.len())
    }

    pub fn contains(&self, g: &Perm) -> bool {
        if g.degree() != self.degree {
            return false;
        }
        let (r, j) = self.strip(g, 0);
        j == self.levels.len() && r.is_identity()
    }

    pub fn order(&self) -> BigUint {
        self.levels
            .iter()
            .fold(BigUint::one(), |acc, l| acc * BigUint::from(l.orbit.len()))
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn base(&self) -> &[u32] {
        &self.base
    }

    pub fn generators(&self) -> &[Perm] {
        &self.generators
    }

    pub fn strong_generators(&self) -> &[Perm] {
        &self.strong
    }

    /// Basic orbits, one per base point.
    pub fn orbit(&self, level: usize) -> &[u32] {
        &self.levels[level].orbit
    }

    pub fn depth(&self) -> usize {
        self.levels.len()
    }

    /// Orbit of `point` under the whole group.
    pub fn orbit_of(&self, point: u32) -> Vec<u32> {
        let mut seen = vec![false; self.degree];
        seen[point as usize] = true;
        let mut out = vec![point];
        let mut idx = 0;
        while idx < out.len() {
            for g in &self.generators {
                let q = g.apply(out[idx]);
                if !seen[q as usize] {
                    seen[q as usize] = true;
                    out.push(q);
                }
            }
            idx += 1;
        }
        out
    }

    /// A uniformly distributed group element.
    pub fn random_element<R: Rng + ?Sized>(&self, rng: &mut R) -> Perm {
        let mut g = Perm::identity(self.degree);
        for level in (0..self.levels.len()).rev() {
            let orbit = &self.levels[level].orbit;
            let beta = orbit[rng.gen_range(0..orbit.len())];
            g = g.then(&self.coset_rep(level, beta));
        }
        g
    }

    /// True when every element is even.
    pub fn is_even(&self) -> bool {
        self.generators.iter().all(Perm::is_even)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::perm::alternating_order;

    fn cyc(n: usize, c: &[u32]) -> Perm {
        Perm::from_cycles(n, &[c]).unwrap()
    }

    #[test]
    fn symmetric_three() {
        let g = Bsgs::new(3, &[cyc(3, &[0, 1, 2]), cyc(3, &[0, 1])]);
        assert_eq!(g.order(), BigUint::from(6u32));
    }

    #[test]
    fn alternating_four() {
        let g = Bsgs::new(4, &[cyc(4, &[0, 1, 2]), cyc(4, &[1, 2, 3])]);
        assert_eq!(g.order(), BigUint::from(12u32));
        assert!(!g.contains(&cyc(4, &[0, 1])));
        assert!(g.contains(&cyc(4, &[0, 2, 3])));
    }

    #[test]
    fn trivial_group() {
        let g = Bsgs::new(5, &[Perm::identity(5)]);
        assert_eq!(g.order(), BigUint::one());
        assert!(g.contains(&Perm::identity(5)));
    }

    #[test]
    fn large_alternating() {
        let n = 40;
        let gens = [cyc(n, &[0, 1, 2]), {
            let c: Vec<u32> = (1..n as u32).collect();
            if c.len() % 2 == 1 {
                cyc(n, &c)
            } else {
                cyc(n, &(0..n as u32).collect::<Vec<_>>())
            }
        }];
        let g = Bsgs::new(n, &gens);
        assert_eq!(g.order(), alternating_order(n));
    }

    #[test]
    fn random_elements_are_members() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(4);
        let g = Bsgs::new(8, &[cyc(8, &[0, 1, 2, 3]), cyc(8, &[4, 5]), cyc(8, &[3, 4])]);
        for _ in 0..20 {
            assert!(g.contains(&g.random_element(&mut rng)));
        }
    }
}
