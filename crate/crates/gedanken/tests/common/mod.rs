//! Dense reference simulator used as an independent oracle.
//!
//! Every experiment is rebuilt here on a minimal register without source or
//! dump ports. Measurements are deferred: a detector that fires moves its
//! branch to a record label, so joint Born weights are read off the final
//! vector in one shot.

#![allow(dead_code)]

use std::f64::consts::FRAC_1_SQRT_2;

use gedanken::ReportDoc;
use nalgebra::{Complex, DMatrix};

pub type C = Complex<f64>;

pub fn re(x: f64) -> C {
    C::new(x, 0.0)
}

#[derive(Debug, Clone)]
pub struct Dense {
    subs: Vec<(String, Vec<String>)>,
    pub amps: Vec<C>,
}

impl Dense {
    pub fn new(subs: &[(&str, &[&str])]) -> Self {
        let subs: Vec<(String, Vec<String>)> =
            subs.iter().map(|(n, ls)| (n.to_string(), ls.iter().map(|l| l.to_string()).collect())).collect();
        let dim = subs.iter().map(|(_, l)| l.len()).product();
        Dense { subs, amps: vec![C::default(); dim] }
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    fn sub(&self, name: &str) -> usize {
        self.subs.iter().position(|(n, _)| n == name).unwrap_or_else(|| panic!("no subsystem {name}"))
    }

    fn label(&self, sub: usize, label: &str) -> usize {
        self.subs[sub].1.iter().position(|l| l == label).unwrap_or_else(|| panic!("no label {label}"))
    }

    fn decode(&self, mut i: usize) -> Vec<usize> {
        let mut d = vec![0; self.subs.len()];
        for (k, (_, ls)) in self.subs.iter().enumerate().rev() {
            d[k] = i % ls.len();
            i /= ls.len();
        }
        d
    }

    fn encode(&self, d: &[usize]) -> usize {
        self.subs.iter().zip(d).fold(0, |acc, ((_, ls), &x)| acc * ls.len() + x)
    }

    fn pattern(&self, assign: &[(&str, &str)]) -> Vec<(usize, usize)> {
        assign.iter().map(|&(s, l)| {
            let k = self.sub(s);
            (k, self.label(k, l))
        }).collect()
    }

    fn fits(d: &[usize], p: &[(usize, usize)]) -> bool {
        p.iter().all(|&(k, x)| d[k] == x)
    }

    pub fn set(&mut self, assign: &[(&str, &str)], amp: C) {
        assert_eq!(assign.len(), self.subs.len(), "full assignment needed");
        let mut d = vec![0; self.subs.len()];
        for (k, x) in self.pattern(assign) {
            d[k] = x;
        }
        let i = self.encode(&d);
        self.amps[i] = amp;
    }

    pub fn amp(&self, assign: &[(&str, &str)]) -> C {
        let p = self.pattern(assign);
        let hits: Vec<usize> = (0..self.dim()).filter(|&i| Self::fits(&self.decode(i), &p)).collect();
        assert_eq!(hits.len(), 1, "assignment must pick one basis state");
        self.amps[hits[0]]
    }

    pub fn labels_of(&self, i: usize) -> Vec<(String, String)> {
        self.decode(i).iter().zip(&self.subs).map(|(&x, (n, ls))| (n.clone(), ls[x].clone())).collect()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Unnormalized Born weight of all basis states matching `cond`.
    pub fn prob(&self, cond: &[(&str, &str)]) -> f64 {
        let p = self.pattern(cond);
        (0..self.dim()).filter(|&i| Self::fits(&self.decode(i), &p)).map(|i| self.amps[i].norm_sqr()).sum()
    }

    /// Permutes basis states: digits matching `cond` and `from` get `to`, and back.
    pub fn swap(&mut self, cond: &[(&str, &str)], from: &[(&str, &str)], to: &[(&str, &str)]) {
        let (c, a, b) = (self.pattern(cond), self.pattern(from), self.pattern(to));
        let mut out = vec![C::default(); self.dim()];
        let mut hit = vec![false; self.dim()];
        for i in 0..self.dim() {
            let mut d = self.decode(i);
            if Self::fits(&d, &c) {
                if Self::fits(&d, &a) {
                    b.iter().for_each(|&(k, x)| d[k] = x);
                } else if Self::fits(&d, &b) {
                    a.iter().for_each(|&(k, x)| d[k] = x);
                }
            }
            let j = self.encode(&d);
            assert!(!hit[j], "swap is not a permutation");
            hit[j] = true;
            out[j] = self.amps[i];
        }
        self.amps = out;
    }

    /// `[new_l0, new_l1] = m [old_l0, old_l1]` on one subsystem.
    pub fn mix(&mut self, sub: &str, (l0, l1): (&str, &str), m: [[C; 2]; 2]) {
        let k = self.sub(sub);
        let (x0, x1) = (self.label(k, l0), self.label(k, l1));
        let mut out = self.amps.clone();
        for i in 0..self.dim() {
            let d = self.decode(i);
            if d[k] != x0 {
                continue;
            }
            let mut d1 = d.clone();
            d1[k] = x1;
            let j = self.encode(&d1);
            let (a, b) = (self.amps[i], self.amps[j]);
            out[i] = m[0][0] * a + m[0][1] * b;
            out[j] = m[1][0] * a + m[1][1] * b;
        }
        self.amps = out;
    }

    pub fn rotate(&mut self, sub: &str, pair: (&str, &str), angle: f64) {
        let (s, c) = angle.sin_cos();
        self.mix(sub, pair, [[re(c), re(-s)], [re(s), re(c)]]);
    }

    pub fn hadamard(&mut self, sub: &str, pair: (&str, &str)) {
        let h = re(FRAC_1_SQRT_2);
        self.mix(sub, pair, [[h, h], [h, -h]]);
    }

    pub fn phase(&mut self, cond: &[(&str, &str)], angle: f64) {
        self.scale_c(cond, C::from_polar(1.0, angle));
    }

    pub fn scale(&mut self, cond: &[(&str, &str)], factor: f64) {
        self.scale_c(cond, re(factor));
    }

    fn scale_c(&mut self, cond: &[(&str, &str)], factor: C) {
        let p = self.pattern(cond);
        for i in 0..self.dim() {
            if Self::fits(&self.decode(i), &p) {
                self.amps[i] *= factor;
            }
        }
    }

    /// Zeroes everything not matching `cond` (no renormalization).
    pub fn keep(&mut self, cond: &[(&str, &str)]) {
        let p = self.pattern(cond);
        for i in 0..self.dim() {
            if !Self::fits(&self.decode(i), &p) {
                self.amps[i] = C::default();
            }
        }
    }

    pub fn normalize(&mut self) {
        let n = self.norm_sqr().sqrt();
        self.amps.iter_mut().for_each(|z| *z /= n);
    }

    pub fn overlap(&self, other: &Dense) -> f64 {
        let z: C = self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum();
        z.norm_sqr() / (self.norm_sqr() * other.norm_sqr())
    }

    /// Normalized squared singular values across `rows | rest`, descending.
    pub fn schmidt(&self, rows: &[&str]) -> Vec<f64> {
        let rs: Vec<usize> = rows.iter().map(|r| self.sub(r)).collect();
        let cs: Vec<usize> = (0..self.subs.len()).filter(|k| !rs.contains(k)).collect();
        let size = |ks: &[usize]| ks.iter().map(|&k| self.subs[k].1.len()).product::<usize>();
        let flat = |d: &[usize], ks: &[usize]| ks.iter().fold(0, |acc, &k| acc * self.subs[k].1.len() + d[k]);
        let mut m = DMatrix::<C>::zeros(size(&rs), size(&cs));
        for i in 0..self.dim() {
            let d = self.decode(i);
            m[(flat(&d, &rs), flat(&d, &cs))] = self.amps[i];
        }
        let n = self.norm_sqr();
        let mut sv: Vec<f64> = m.singular_values().iter().map(|s| s * s / n).filter(|&v| v > 1e-14).collect();
        sv.sort_by(|a, b| b.partial_cmp(a).unwrap());
        sv
    }

    pub fn entropy(&self, rows: &[&str]) -> f64 {
        self.schmidt(rows).iter().map(|&p| -p * p.log2()).sum::<f64>().max(0.0)
    }
}

/// Largest difference between the oracle amplitudes and a report step's
/// state terms, matched by assignment on the oracle's subsystems. Terms the
/// step lists but the oracle lacks count in full; the step must list every
/// nonzero oracle amplitude.
pub fn step_deviation(oracle: &Dense, doc: &ReportDoc, label: &str) -> f64 {
    let step = doc.step(label).unwrap_or_else(|| panic!("no step {label}"));
    let mut worst: f64 = 0.0;
    let mut seen = vec![false; oracle.dim()];
    for term in &step.state {
        let z = C::new(term.amplitude[0], term.amplitude[1]);
        let found = (0..oracle.dim()).find(|&i| {
            oracle.labels_of(i).iter().all(|(s, l)| term.assignment.iter().any(|(ts, tl)| ts == s && tl == l))
        });
        match found {
            Some(i) => {
                seen[i] = true;
                worst = worst.max((oracle.amps[i] - z).norm());
            }
            None => worst = worst.max(z.norm()),
        }
    }
    for (i, z) in oracle.amps.iter().enumerate() {
        if !seen[i] {
            worst = worst.max(z.norm());
        }
    }
    worst
}

// ---- experiments ----------------------------------------------------------

pub struct Oblivion {
    pub p_click_t1: f64,
    pub p_click_t2_given_silence: f64,
    pub p_total_silence: f64,
    /// Post-selected on det1 READY.
    pub interval: Dense,
    /// Post-selected on both detectors READY.
    pub last: Dense,
    pub dim: usize,
}

pub fn oblivion() -> Oblivion {
    let mut s = Dense::new(&[
        ("e-", &["1", "2", "ann"]),
        ("e+", &["3", "4", "ann"]),
        ("det1", &["READY", "CLICK"]),
        ("det2", &["READY", "CLICK"]),
    ]);
    for e in ["1", "2"] {
        for p in ["3", "4"] {
            s.set(&[("e-", e), ("e+", p), ("det1", "READY"), ("det2", "READY")], re(0.5));
        }
    }
    s.swap(&[], &[("e-", "2"), ("e+", "3"), ("det1", "READY")], &[("e-", "ann"), ("e+", "ann"), ("det1", "CLICK")]);
    let p_click_t1 = s.prob(&[("det1", "CLICK")]);
    let mut interval = s.clone();
    interval.keep(&[("det1", "READY")]);
    interval.normalize();
    s.swap(&[], &[("e-", "1"), ("e+", "3"), ("det2", "READY")], &[("e-", "ann"), ("e+", "ann"), ("det2", "CLICK")]);
    let both = s.prob(&[("det1", "READY"), ("det2", "READY")]);
    let silent_t1 = s.prob(&[("det1", "READY")]);
    let mut last = s.clone();
    last.keep(&[("det1", "READY"), ("det2", "READY")]);
    last.normalize();
    Oblivion {
        p_click_t1,
        p_click_t2_given_silence: s.prob(&[("det1", "READY"), ("det2", "CLICK")]) / silent_t1,
        p_total_silence: both,
        interval,
        last,
        dim: s.dim(),
    }
}

/// Probability that an inverse split of `(l0, l1)` sends the particle back to
/// its source: weight of `(l0 + l1)/√2` in the reduced state.
pub fn recombination(s: &Dense, sub: &str, (l0, l1): (&str, &str)) -> f64 {
    let mut t = s.clone();
    t.hadamard(sub, (l0, l1));
    t.prob(&[(sub, l0)]) / s.norm_sqr()
}

pub struct Mirror {
    pub p_no_scatter: f64,
    pub p_spin_down: f64,
    /// After the Hardy split, X basis.
    pub split: Dense,
    /// Post-selected on no scattering, X basis.
    pub quiet: Dense,
    /// Same state in the Z basis.
    pub z_basis: Dense,
    pub dim: usize,
}

pub fn mirror() -> Mirror {
    // X+ = (Z+ + Z-)/√2, X- = (Z+ − Z-)/√2; the mirror starts in Z+
    let mut s = Dense::new(&[("mirror", &["X+", "X-"]), ("e-", &["L", "R"]), ("scatter", &["none", "scattered"])]);
    for m in ["X+", "X-"] {
        for e in ["L", "R"] {
            s.set(&[("mirror", m), ("e-", e), ("scatter", "none")], re(0.5));
        }
    }
    let split = s.clone();
    s.swap(&[("mirror", "X-"), ("e-", "L")], &[("scatter", "none")], &[("scatter", "scattered")]);
    let p_none = s.prob(&[("scatter", "none")]);
    let mut quiet = s.clone();
    quiet.keep(&[("scatter", "none")]);
    quiet.normalize();
    // to the Z basis: Z+ = (X+ + X-)/√2, Z- = (X+ − X-)/√2, same matrix
    let mut z = Dense::new(&[("mirror", &["Z+", "Z-"]), ("e-", &["L", "R"]), ("scatter", &["none", "scattered"])]);
    z.amps = quiet.amps.clone();
    z.hadamard("mirror", ("Z+", "Z-"));
    // joint weight of (no scatter, Z-) from the unnormalized vector
    let mut joint = Dense::new(&[("mirror", &["Z+", "Z-"]), ("e-", &["L", "R"]), ("scatter", &["none", "scattered"])]);
    joint.amps = s.amps.clone();
    joint.hadamard("mirror", ("Z+", "Z-"));
    let p_down = joint.prob(&[("scatter", "none"), ("mirror", "Z-")]) / p_none;
    Mirror { p_no_scatter: p_none, p_spin_down: p_down, split, quiet, z_basis: z, dim: s.dim() }
}

fn atoms(pointers: bool) -> Dense {
    let a2: &[&str] = &["1", "2", "1'", "2'"];
    let a1: &[&str] = &["3", "4", "3'", "3''"];
    let mut subs: Vec<(&str, &[&str])> = vec![("A2", a2), ("A1", a1)];
    if pointers {
        subs.push(("P1", &["rest", "kicked"]));
        subs.push(("P2", &["rest", "kicked"]));
    }
    let mut s = Dense::new(&subs);
    for x in ["1", "2"] {
        for y in ["3", "4"] {
            let mut a = vec![("A2", x), ("A1", y)];
            if pointers {
                a.extend([("P1", "rest"), ("P2", "rest")]);
            }
            s.set(&a, re(0.5));
        }
    }
    s
}

/// Split pair of atoms through both collisions, drift, and (optionally) the
/// two pointer kicks. Returns (split state, final state).
pub fn collision(pointers: bool) -> (Dense, Dense) {
    let mut s = atoms(pointers);
    let start = s.clone();
    s.swap(&[], &[("A2", "2"), ("A1", "3")], &[("A2", "2'"), ("A1", "3'")]);
    if pointers {
        s.swap(&[("A2", "2'"), ("A1", "3'")], &[("P1", "rest")], &[("P1", "kicked")]);
    }
    s.swap(&[], &[("A2", "1"), ("A1", "3")], &[("A2", "1'"), ("A1", "3''")]);
    if pointers {
        s.swap(&[("A2", "1'"), ("A1", "3''")], &[("P2", "rest")], &[("P2", "kicked")]);
    }
    s.swap(&[("A1", "4")], &[("A2", "1")], &[("A2", "1'")]);
    s.swap(&[("A1", "4")], &[("A2", "2")], &[("A2", "2'")]);
    (start, s)
}

/// Inverse of [`collision`] with pointers (every step is a self-inverse swap).
pub fn uncollide(mut s: Dense) -> Dense {
    s.swap(&[("A1", "4")], &[("A2", "2")], &[("A2", "2'")]);
    s.swap(&[("A1", "4")], &[("A2", "1")], &[("A2", "1'")]);
    s.swap(&[("A2", "1'"), ("A1", "3''")], &[("P2", "rest")], &[("P2", "kicked")]);
    s.swap(&[], &[("A2", "1"), ("A1", "3")], &[("A2", "1'"), ("A1", "3''")]);
    s.swap(&[("A2", "2'"), ("A1", "3'")], &[("P1", "rest")], &[("P1", "kicked")]);
    s.swap(&[], &[("A2", "2"), ("A1", "3")], &[("A2", "2'"), ("A1", "3'")]);
    s
}

fn lost(prefix: &str, n: usize) -> Vec<String> {
    (1..=n).map(|k| format!("{prefix}{k}")).collect()
}

/// One-shot P(photon still left) after `n` detector cycles, with every
/// detection deferred to its own record label.
pub fn zeno_survival(alpha: f64, n: usize) -> (f64, usize) {
    let records = lost("lost", n);
    let mut labels = vec!["L", "R"];
    labels.extend(records.iter().map(String::as_str));
    let mut s = Dense::new(&[("photon", &labels)]);
    s.set(&[("photon", "L")], re(1.0));
    for r in &records {
        s.rotate("photon", ("L", "R"), alpha);
        s.swap(&[], &[("photon", "R")], &[("photon", r.as_str())]);
    }
    (s.prob(&[("photon", "L")]), s.dim())
}

/// Left amplitude after `n` cycles with no detector.
pub fn zeno_free(alpha: f64, n: usize) -> f64 {
    let mut s = Dense::new(&[("photon", &["L", "R"])]);
    s.set(&[("photon", "L")], re(1.0));
    for _ in 0..n {
        s.rotate("photon", ("L", "R"), alpha);
    }
    s.amp(&[("photon", "L")]).norm()
}

/// (P(photon left, no explosion), P(bomb z+ | that), register size).
pub fn counterfactual(alpha: f64, n: usize) -> (f64, f64, usize) {
    let records = lost("boom", n);
    let mut labels = vec!["L", "R"];
    labels.extend(records.iter().map(String::as_str));
    let mut s = Dense::new(&[("photon", &labels), ("bomb", &["z+", "z-"])]);
    s.set(&[("photon", "L"), ("bomb", "z+")], re(FRAC_1_SQRT_2));
    s.set(&[("photon", "L"), ("bomb", "z-")], re(FRAC_1_SQRT_2));
    for r in &records {
        s.rotate("photon", ("L", "R"), alpha);
        s.swap(&[("bomb", "z+")], &[("photon", "R")], &[("photon", r.as_str())]);
    }
    let left = s.prob(&[("photon", "L")]);
    (left, s.prob(&[("photon", "L"), ("bomb", "z+")]) / left, s.dim())
}

pub struct Ghost {
    pub p_no_explosion: f64,
    pub p_middle: f64,
    pub middle_second_schmidt: f64,
    pub dim: usize,
}

/// Photon in the middle region coupled by `alpha` to the symmetric side mode,
/// left bomb checked before the right bomb every cycle.
pub fn ghost(alpha: f64, n: usize) -> Ghost {
    let (la, lb) = (lost("boomA", n), lost("boomB", n));
    let mut labels = vec!["left", "middle", "right"];
    labels.extend(la.iter().chain(&lb).map(String::as_str));
    let mut s = Dense::new(&[("photon", &labels), ("A", &["z+", "z-"]), ("B", &["z+", "z-"])]);
    for a in ["z+", "z-"] {
        for b in ["z+", "z-"] {
            s.set(&[("photon", "middle"), ("A", a), ("B", b)], re(0.5));
        }
    }
    for k in 0..n {
        // symmetric mode S = (left + right)/√2, antisymmetric untouched
        s.hadamard("photon", ("left", "right"));
        s.rotate("photon", ("middle", "left"), alpha);
        s.hadamard("photon", ("left", "right"));
        s.swap(&[("A", "z+")], &[("photon", "left")], &[("photon", la[k].as_str())]);
        s.swap(&[("B", "z+")], &[("photon", "right")], &[("photon", lb[k].as_str())]);
    }
    let alive: f64 = ["left", "middle", "right"].iter().map(|p| s.prob(&[("photon", p)])).sum();
    let p_mid = s.prob(&[("photon", "middle")]);
    // bombs given the photon in the middle
    let mut bombs = Dense::new(&[("A", &["z+", "z-"]), ("B", &["z+", "z-"])]);
    for a in ["z+", "z-"] {
        for b in ["z+", "z-"] {
            bombs.set(&[("A", a), ("B", b)], s.amp(&[("photon", "middle"), ("A", a), ("B", b)]));
        }
    }
    let spec = bombs.schmidt(&["A"]);
    Ghost {
        p_no_explosion: alive,
        p_middle: p_mid / alive,
        middle_second_schmidt: spec.get(1).copied().unwrap_or(0.0),
        dim: s.dim(),
    }
}

pub struct NoClicks {
    pub count: usize,
    pub p_up: f64,
    pub p_all: f64,
}

/// Iterates the no-click Kraus operator diag(1, √(1−ε)) on an equal
/// superposition until P(up) reaches `target`.
pub fn no_clicks(eps: f64, target: f64) -> NoClicks {
    let (up, mut down) = (FRAC_1_SQRT_2, FRAC_1_SQRT_2);
    let mut count = 0;
    while up * up / (up * up + down * down) < target {
        down *= (1.0 - eps).sqrt();
        count += 1;
    }
    let n = up * up + down * down;
    NoClicks { count, p_up: up * up / n, p_all: n }
}

/// (unconditioned, marker-erased) probability of leaving by the source port.
pub fn eraser(phi: f64) -> (f64, f64) {
    let mut s = Dense::new(&[("path", &["a", "b"]), ("marker", &["m0", "m1"])]);
    s.set(&[("path", "a"), ("marker", "m0")], re(1.0));
    s.hadamard("path", ("a", "b"));
    s.swap(&[("path", "b")], &[("marker", "m0")], &[("marker", "m1")]);
    s.phase(&[("path", "a")], phi);
    s.hadamard("path", ("a", "b"));
    let marked = s.prob(&[("path", "a")]);
    s.hadamard("marker", ("m0", "m1"));
    let erased = s.prob(&[("path", "a"), ("marker", "m0")]) / s.prob(&[("marker", "m0")]);
    (marked, erased)
}

/// The critical-interval pair as a coefficient matrix (rows e- 1, 2; columns e+ 3, 4).
pub fn hardy_spectrum() -> Vec<f64> {
    let k = 1.0 / 3f64.sqrt();
    let m = DMatrix::from_row_slice(2, 2, &[k, k, 0.0, k]);
    let mut v: Vec<f64> = m.singular_values().iter().map(|s| s * s).collect();
    v.sort_by(|a, b| b.partial_cmp(a).unwrap());
    v
}
