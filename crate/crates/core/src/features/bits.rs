//! Dense object sets and binary relations over a universe `0..n`.

#[inline]
fn words(n: usize) -> usize {
    n.div_ceil(64)
}

#[inline]
fn tail_mask(n: usize) -> u64 {
    match n % 64 {
        0 => u64::MAX,
        r => (1u64 << r) - 1,
    }
}

fn iter_bits(w: &[u64]) -> impl Iterator<Item = usize> + '_ {
    w.iter().enumerate().flat_map(|(wi, &word)| {
        let mut bits = word;
        std::iter::from_fn(move || {
            if bits == 0 {
                return None;
            }
            let b = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            Some(wi * 64 + b)
        })
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ObjSet {
    n: usize,
    w: Vec<u64>,
}

impl ObjSet {
    pub fn empty(n: usize) -> ObjSet {
        ObjSet { n, w: vec![0; words(n)] }
    }

    pub fn full(n: usize) -> ObjSet {
        let mut s = ObjSet { n, w: vec![u64::MAX; words(n)] };
        s.trim();
        s
    }

    pub fn from_iter(n: usize, items: impl IntoIterator<Item = usize>) -> ObjSet {
        let mut s = ObjSet::empty(n);
        for i in items {
            s.insert(i);
        }
        s
    }

    fn trim(&mut self) {
        if let Some(last) = self.w.last_mut() {
            *last &= tail_mask(self.n);
        }
    }

    pub fn universe(&self) -> usize {
        self.n
    }

    pub fn insert(&mut self, i: usize) {
        self.w[i / 64] |= 1 << (i % 64);
    }

    pub fn contains(&self, i: usize) -> bool {
        self.w[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn count(&self) -> u64 {
        self.w.iter().map(|w| w.count_ones() as u64).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.w.iter().all(|&w| w == 0)
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        iter_bits(&self.w)
    }

    pub fn words(&self) -> &[u64] {
        &self.w
    }

    pub fn union(&self, o: &ObjSet) -> ObjSet {
        self.zip(o, |a, b| a | b)
    }

    pub fn intersection(&self, o: &ObjSet) -> ObjSet {
        self.zip(o, |a, b| a & b)
    }

    pub fn difference(&self, o: &ObjSet) -> ObjSet {
        self.zip(o, |a, b| a & !b)
    }

    pub fn complement(&self) -> ObjSet {
        let mut s = ObjSet {
            n: self.n,
            w: self.w.iter().map(|w| !w).collect(),
        };
        s.trim();
        s
    }

    pub fn intersects(&self, o: &ObjSet) -> bool {
        self.w.iter().zip(&o.w).any(|(a, b)| a & b != 0)
    }

    fn zip(&self, o: &ObjSet, f: impl Fn(u64, u64) -> u64) -> ObjSet {
        ObjSet {
            n: self.n,
            w: self.w.iter().zip(&o.w).map(|(&a, &b)| f(a, b)).collect(),
        }
    }
}

/// Row-major bit matrix; row `a` is the set `{b | (a, b) in R}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Relation {
    n: usize,
    wpr: usize,
    w: Vec<u64>,
}

impl Relation {
    pub fn empty(n: usize) -> Relation {
        let wpr = words(n);
        Relation { n, wpr, w: vec![0; wpr * n] }
    }

    pub fn from_pairs(n: usize, pairs: impl IntoIterator<Item = (usize, usize)>) -> Relation {
        let mut r = Relation::empty(n);
        for (a, b) in pairs {
            r.insert(a, b);
        }
        r
    }

    pub fn universe(&self) -> usize {
        self.n
    }

    pub fn insert(&mut self, a: usize, b: usize) {
        self.w[a * self.wpr + b / 64] |= 1 << (b % 64);
    }

    pub fn contains(&self, a: usize, b: usize) -> bool {
        self.w[a * self.wpr + b / 64] >> (b % 64) & 1 == 1
    }

    pub fn row(&self, a: usize) -> &[u64] {
        &self.w[a * self.wpr..(a + 1) * self.wpr]
    }

    pub fn row_set(&self, a: usize) -> ObjSet {
        ObjSet {
            n: self.n,
            w: self.row(a).to_vec(),
        }
    }

    pub fn row_is_empty(&self, a: usize) -> bool {
        self.row(a).iter().all(|&w| w == 0)
    }

    pub fn count(&self) -> u64 {
        self.w.iter().map(|w| w.count_ones() as u64).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.w.iter().all(|&w| w == 0)
    }

    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n).flat_map(move |a| iter_bits(self.row(a)).map(move |b| (a, b)))
    }

    pub fn union(&self, o: &Relation) -> Relation {
        self.zip(o, |a, b| a | b)
    }

    pub fn intersection(&self, o: &Relation) -> Relation {
        self.zip(o, |a, b| a & b)
    }

    pub fn difference(&self, o: &Relation) -> Relation {
        self.zip(o, |a, b| a & !b)
    }

    fn zip(&self, o: &Relation, f: impl Fn(u64, u64) -> u64) -> Relation {
        Relation {
            n: self.n,
            wpr: self.wpr,
            w: self.w.iter().zip(&o.w).map(|(&a, &b)| f(a, b)).collect(),
        }
    }

    pub fn complement(&self) -> Relation {
        let mut r = Relation {
            n: self.n,
            wpr: self.wpr,
            w: self.w.iter().map(|w| !w).collect(),
        };
        if self.wpr > 0 {
            let m = tail_mask(self.n);
            for a in 0..self.n {
                r.w[a * self.wpr + self.wpr - 1] &= m;
            }
        }
        r
    }

    pub fn inverse(&self) -> Relation {
        let mut r = Relation::empty(self.n);
        for (a, b) in self.pairs() {
            r.insert(b, a);
        }
        r
    }

    pub fn compose(&self, s: &Relation) -> Relation {
        let mut r = Relation::empty(self.n);
        for a in 0..self.n {
            for b in iter_bits(self.row(a)) {
                for k in 0..self.wpr {
                    r.w[a * self.wpr + k] |= s.w[b * self.wpr + k];
                }
            }
        }
        r
    }

    /// Transitive closure by Warshall's algorithm on bit rows.
    pub fn transitive_closure(&self) -> Relation {
        let mut r = self.clone();
        let wpr = self.wpr;
        for k in 0..self.n {
            let row_k: Vec<u64> = r.row(k).to_vec();
            for i in 0..self.n {
                if r.contains(i, k) {
                    for (x, &y) in r.w[i * wpr..(i + 1) * wpr].iter_mut().zip(&row_k) {
                        *x |= y;
                    }
                }
            }
        }
        r
    }

    pub fn identity(c: &ObjSet) -> Relation {
        let mut r = Relation::empty(c.n);
        for a in c.iter() {
            r.insert(a, a);
        }
        r
    }

    /// `R ∩ (Δ × C)`.
    pub fn restrict(&self, c: &ObjSet) -> Relation {
        let mut r = self.clone();
        for a in 0..self.n {
            for (x, &y) in r.w[a * self.wpr..(a + 1) * self.wpr].iter_mut().zip(&c.w) {
                *x &= y;
            }
        }
        r
    }

    pub fn domain(&self) -> ObjSet {
        ObjSet::from_iter(self.n, (0..self.n).filter(|&a| !self.row_is_empty(a)))
    }

    pub fn range(&self) -> ObjSet {
        let mut s = ObjSet::empty(self.n);
        for a in 0..self.n {
            for (x, &y) in s.w.iter_mut().zip(self.row(a)) {
                *x |= y;
            }
        }
        s
    }

    /// Objects reachable from `from` by one step.
    pub fn image(&self, from: &ObjSet) -> ObjSet {
        let mut s = ObjSet::empty(self.n);
        for a in from.iter() {
            for (x, &y) in s.w.iter_mut().zip(self.row(a)) {
                *x |= y;
            }
        }
        s
    }

    /// Length of a shortest path from some object of `from` to some object of `to`.
    pub fn distance(&self, from: &ObjSet, to: &ObjSet) -> Option<u64> {
        if from.intersects(to) {
            return Some(0);
        }
        let mut visited = from.clone();
        let mut frontier = from.clone();
        let mut d = 0;
        while !frontier.is_empty() {
            d += 1;
            let next = self.image(&frontier).difference(&visited);
            if next.intersects(to) {
                return Some(d);
            }
            visited = visited.union(&next);
            frontier = next;
        }
        None
    }

    /// Distances from a single source to every object; `u64::MAX` when unreachable.
    pub fn distances_from(&self, src: usize) -> Vec<u64> {
        let mut dist = vec![u64::MAX; self.n];
        dist[src] = 0;
        let mut frontier = vec![src];
        let mut d = 0;
        while !frontier.is_empty() {
            d += 1;
            let mut next = Vec::new();
            for &u in &frontier {
                for v in iter_bits(self.row(u)) {
                    if dist[v] == u64::MAX {
                        dist[v] = d;
                        next.push(v);
                    }
                }
            }
            frontier = next;
        }
        dist
    }
}
