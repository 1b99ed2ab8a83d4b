//! Bounded search for integer solutions of polynomial equations.
//!
//! A model lists variables, polynomial equations, gcd conditions and a height of the form
//! `max |monomial|`. The search assigns one variable at a time. At each node an equation with a
//! single unknown left is solved for its integer roots; otherwise the variable with the fewest
//! candidates is branched on. Candidates come from the height (`|x|^e <= T / rest`) or, for an
//! equation reduced to `c1*w + c2*v^k = 0` with `w` bounded, from the divisibility
//! `c1 / gcd(c1, c2) | v^k`.

use std::collections::BTreeMap;
use std::time::Instant;

use num_bigint::BigUint;
use num_integer::{Integer, Roots};
use serde::{Deserialize, Serialize};

use super::region::Region;
use super::{iroot, Bins, CountOptions, CountRecord, CounterError};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HeightDoc {
    pub max_of: Vec<Vec<String>>,
}

/// Text form of an affine model.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AffineDoc {
    #[serde(default)]
    pub id: Option<String>,
    pub vars: Vec<String>,
    pub equations: Vec<String>,
    #[serde(default)]
    pub gcd_one: Vec<Vec<String>>,
    pub height: HeightDoc,
    #[serde(default)]
    pub nonzero: Vec<String>,
    #[serde(default)]
    pub regions: BTreeMap<String, String>,
}

/// Largest number of variables in a model.
pub const MAX_VARS: usize = 16;

type Exps = [u8; MAX_VARS];
type Term = (i128, Exps);

#[derive(Debug, Clone)]
pub struct AffineModel {
    pub id: String,
    vars: Vec<String>,
    equations: Vec<Vec<Term>>,
    gcd_one: Vec<Vec<usize>>,
    height: Vec<Exps>,
    nonzero: Vec<bool>,
    regions: BTreeMap<String, String>,
}

impl AffineModel {
    pub fn from_json(text: &str) -> Result<Self, CounterError> {
        let doc: AffineDoc = serde_json::from_str(text).map_err(|e| CounterError::Parse(e.to_string()))?;
        Self::from_doc(&doc)
    }

    pub fn from_doc(doc: &AffineDoc) -> Result<Self, CounterError> {
        let vars = doc.vars.clone();
        if vars.len() > MAX_VARS {
            return Err(CounterError::Model(format!("at most {MAX_VARS} variables are supported")));
        }
        let index = |name: &str| {
            vars.iter()
                .position(|v| v == name.trim())
                .ok_or_else(|| CounterError::Parse(format!("unknown variable `{name}`")))
        };
        let equations = doc
            .equations
            .iter()
            .map(|e| parse_polynomial(e, &vars))
            .collect::<Result<Vec<_>, _>>()?;
        let gcd_one = doc
            .gcd_one
            .iter()
            .map(|g| g.iter().map(|v| index(v)).collect::<Result<Vec<_>, _>>())
            .collect::<Result<Vec<_>, _>>()?;
        let mut height = Vec::new();
        for m in &doc.height.max_of {
            let mut e = [0u8; MAX_VARS];
            for f in m {
                let (base, pow) = match f.split_once('^') {
                    Some((b, p)) => (b, p.trim().parse::<u32>().map_err(|_| CounterError::Parse(format!("bad exponent in `{f}`")))?),
                    None => (f.as_str(), 1),
                };
                bump(&mut e[index(base)?], pow, f)?;
            }
            height.push(e);
        }
        if height.is_empty() {
            return Err(CounterError::Model("height needs at least one monomial".into()));
        }
        let mut nonzero = vec![false; vars.len()];
        for v in &doc.nonzero {
            nonzero[index(v)?] = true;
        }
        for (name, body) in &doc.regions {
            Region::parse(name, body, &vars)?;
        }
        Ok(AffineModel {
            id: doc.id.clone().unwrap_or_else(|| "affine".into()),
            vars,
            equations,
            gcd_one,
            height,
            nonzero,
            regions: doc.regions.clone(),
        })
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn region_names(&self) -> impl Iterator<Item = &str> {
        self.regions.keys().map(String::as_str)
    }

    /// A region declared in the model.
    pub fn region(&self, name: &str) -> Result<Region, CounterError> {
        let body = self
            .regions
            .get(name)
            .ok_or_else(|| CounterError::Model(format!("model has no region `{name}`")))?;
        Region::parse(name, body, &self.vars)
    }

    /// Whether `pt` satisfies the equations, gcd conditions and nonzero conditions.
    pub fn satisfies(&self, pt: &[i64]) -> bool {
        pt.len() == self.vars.len()
            && self.equations.iter().all(|eq| matches!(evaluate(eq, pt), Ok(0)))
            && self.gcd_one.iter().all(|g| g.iter().fold(0u64, |a, &v| a.gcd(&pt[v].unsigned_abs())) == 1)
            && pt.iter().zip(&self.nonzero).all(|(&x, &nz)| !nz || x != 0)
    }

    pub fn height(&self, pt: &[i64]) -> BigUint {
        self.height
            .iter()
            .map(|e| {
                pt.iter()
                    .zip(e)
                    .filter(|(_, &k)| k > 0)
                    .fold(BigUint::from(1u32), |acc, (&x, &k)| acc * BigUint::from(x.unsigned_abs()).pow(k as u32))
            })
            .max()
            .expect("nonempty")
    }
}

/// Parses `a = b` or `a` into a list of terms of `a - b`.
fn parse_polynomial(text: &str, vars: &[String]) -> Result<Vec<Term>, CounterError> {
    let (lhs, rhs) = match text.split_once('=') {
        Some((l, r)) => (l, r),
        None => (text, "0"),
    };
    let mut terms = parse_side(lhs, vars)?;
    for (c, e) in parse_side(rhs, vars)? {
        terms.push((-c, e));
    }
    Ok(combine(terms))
}

fn parse_side(text: &str, vars: &[String]) -> Result<Vec<Term>, CounterError> {
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    if s.is_empty() {
        return Err(CounterError::Parse(format!("empty polynomial in `{text}`")));
    }
    let mut out = Vec::new();
    let mut start = 0;
    let bytes = s.as_bytes();
    for i in 1..=bytes.len() {
        if i == bytes.len() || ((bytes[i] == b'+' || bytes[i] == b'-') && bytes[i - 1] != b'^') {
            out.push(parse_term(&s[start..i], vars)?);
            start = i;
        }
    }
    Ok(out)
}

fn parse_term(text: &str, vars: &[String]) -> Result<Term, CounterError> {
    let (sign, body) = match text.as_bytes().first() {
        Some(b'-') => (-1i128, &text[1..]),
        Some(b'+') => (1, &text[1..]),
        _ => (1, text),
    };
    if body.is_empty() {
        return Err(CounterError::Parse(format!("dangling sign in `{text}`")));
    }
    let mut coef = sign;
    let mut exps = [0u8; MAX_VARS];
    for f in body.split('*') {
        let (base, pow) = match f.split_once('^') {
            Some((b, p)) => (b, p.parse::<u32>().map_err(|_| CounterError::Parse(format!("bad exponent in `{f}`")))?),
            None => (f, 1),
        };
        if let Ok(c) = base.parse::<i128>() {
            for _ in 0..pow {
                coef = coef.checked_mul(c).ok_or_else(|| CounterError::Overflow(text.into()))?;
            }
        } else if let Some(i) = vars.iter().position(|v| v == base) {
            bump(&mut exps[i], pow, text)?;
        } else {
            return Err(CounterError::Parse(format!("unknown variable `{base}` in `{text}`")));
        }
    }
    Ok((coef, exps))
}

fn combine(terms: Vec<Term>) -> Vec<Term> {
    let mut out: Vec<Term> = Vec::with_capacity(terms.len());
    for (c, e) in terms {
        match out.iter_mut().find(|(_, f)| *f == e) {
            Some(t) => t.0 += c,
            None => out.push((c, e)),
        }
    }
    out.retain(|(c, _)| *c != 0);
    out
}

fn bump(e: &mut u8, by: u32, text: &str) -> Result<(), CounterError> {
    *e = u32::from(*e)
        .checked_add(by)
        .and_then(|x| u8::try_from(x).ok())
        .ok_or_else(|| CounterError::Parse(format!("exponent too large in `{text}`")))?;
    Ok(())
}

/// Value of a polynomial at a fully assigned point.
fn evaluate(eq: &[Term], vals: &[i64]) -> Result<i128, CounterError> {
    let ovf = || CounterError::Overflow("equation".into());
    let mut acc: i128 = 0;
    for (c, e) in eq {
        let mut t = *c;
        for (&k, &x) in e.iter().zip(vals) {
            for _ in 0..k {
                t = t.checked_mul(x as i128).ok_or_else(ovf)?;
            }
        }
        acc = acc.checked_add(t).ok_or_else(ovf)?;
    }
    Ok(acc)
}

/// Substitutes the values of the variables in `known` into `out`; the result only involves
/// unknowns.
fn reduce_into(eq: &[Term], vals: &[i64], known: u32, out: &mut Vec<Term>) -> Result<(), CounterError> {
    out.clear();
    for (c, e) in eq {
        let mut coef = *c;
        let mut rest = *e;
        for (i, k) in rest.iter_mut().enumerate() {
            if *k == 0 || known & (1 << i) == 0 {
                continue;
            }
            for _ in 0..*k {
                coef = coef.checked_mul(vals[i] as i128).ok_or_else(|| CounterError::Overflow("equation".into()))?;
            }
            *k = 0;
        }
        if coef == 0 {
            continue;
        }
        match out.iter_mut().find(|(_, f)| *f == rest) {
            Some(t) => t.0 += coef,
            None => out.push((coef, rest)),
        }
    }
    out.retain(|(c, _)| *c != 0);
    Ok(())
}

fn support(e: &Exps) -> u32 {
    e.iter().enumerate().filter(|(_, &k)| k > 0).fold(0, |m, (i, _)| m | (1 << i))
}

/// Integer roots of `sum c[k] x^k` with |x| <= bound.
fn integer_roots(c: &[i128], bound: Option<u128>) -> Result<Vec<i64>, CounterError> {
    let deg = c.iter().rposition(|&x| x != 0).unwrap_or(0);
    let ok = |x: i128| bound.is_none_or(|b| x.unsigned_abs() <= b) && x.unsigned_abs() <= i64::MAX as u128;
    let mut roots: Vec<i128> = match deg {
        0 => Vec::new(),
        1 => {
            let (q, r) = (-c[0]).div_rem(&c[1]);
            if r == 0 {
                vec![q]
            } else {
                vec![]
            }
        }
        2 if c[2] != 0 => {
            let ovf = || CounterError::Overflow("discriminant".into());
            let disc = c[1]
                .checked_mul(c[1])
                .and_then(|a| c[2].checked_mul(c[0]).and_then(|b| b.checked_mul(4)).and_then(|b| a.checked_sub(b)))
                .ok_or_else(ovf)?;
            if disc < 0 {
                vec![]
            } else {
                let s = disc.sqrt();
                if s * s != disc {
                    vec![]
                } else {
                    [-c[1] + s, -c[1] - s]
                        .into_iter()
                        .filter_map(|n| {
                            let (q, r) = n.div_rem(&(2 * c[2]));
                            (r == 0).then_some(q)
                        })
                        .collect()
                }
            }
        }
        _ => {
            let low = c.iter().position(|&x| x != 0).expect("nonzero polynomial");
            let mut out = Vec::new();
            if low > 0 {
                out.push(0);
            }
            let n = c[low].unsigned_abs();
            let mut d: u128 = 1;
            while d * d <= n {
                if n % d == 0 {
                    for q in [d, n / d] {
                        if q <= i64::MAX as u128 && bound.is_none_or(|b| q <= b) {
                            for x in [q as i128, -(q as i128)] {
                                if horner(c, x)? == 0 {
                                    out.push(x);
                                }
                            }
                        }
                    }
                }
                d += 1;
            }
            out
        }
    };
    roots.retain(|&x| ok(x));
    roots.sort_unstable();
    roots.dedup();
    Ok(roots.into_iter().map(|x| x as i64).collect())
}

fn horner(c: &[i128], x: i128) -> Result<i128, CounterError> {
    let mut acc: i128 = 0;
    for &k in c.iter().rev() {
        acc = acc
            .checked_mul(x)
            .and_then(|a| a.checked_add(k))
            .ok_or_else(|| CounterError::Overflow("root test".into()))?;
    }
    Ok(acc)
}

/// Smallest-prime-factor table with a trial-division fallback.
struct Factorizer {
    spf: Vec<u32>,
}

impl Factorizer {
    fn new(limit: usize) -> Self {
        let mut spf = vec![0u32; limit + 1];
        for i in 2..=limit {
            if spf[i] == 0 {
                let mut j = i;
                while j <= limit {
                    if spf[j] == 0 {
                        spf[j] = i as u32;
                    }
                    j += i;
                }
            }
        }
        Factorizer { spf }
    }

    fn factor(&self, mut n: u128) -> Vec<(u128, u32)> {
        let mut out: Vec<(u128, u32)> = Vec::new();
        let mut push = |p: u128| match out.last_mut() {
            Some((q, e)) if *q == p => *e += 1,
            _ => out.push((p, 1)),
        };
        let mut d: u128 = 2;
        while n >= self.spf.len() as u128 && d * d <= n {
            while n % d == 0 {
                push(d);
                n /= d;
            }
            d += 1;
        }
        if n >= self.spf.len() as u128 {
            if n > 1 {
                push(n);
            }
            return out;
        }
        while n > 1 {
            let p = self.spf[n as usize] as u128;
            push(p);
            n /= p;
        }
        out
    }

    /// Least m > 0 such that n | m^k.
    fn root_radical(&self, n: u128, k: u32) -> u128 {
        self.factor(n).into_iter().map(|(p, e)| p.pow(e.div_ceil(k))).product()
    }
}

enum Candidates {
    /// Multiples `j * step` with |j| <= count.
    Steps { step: i64, count: i64 },
    Few([i64; 2], usize),
    List(Vec<i64>),
}

impl Candidates {
    fn size(&self) -> u128 {
        match self {
            Candidates::Steps { count, .. } => 2 * *count as u128 + 1,
            Candidates::Few(_, n) => *n as u128,
            Candidates::List(l) => l.len() as u128,
        }
    }

    fn get(&self, i: usize) -> i64 {
        match self {
            Candidates::Steps { step, count } => (i as i64 - count) * step,
            Candidates::Few(v, _) => v[i],
            Candidates::List(l) => l[i],
        }
    }
}

struct Search<'a> {
    model: &'a AffineModel,
    bins: &'a Bins,
    region: &'a Region,
    factorizer: &'a Factorizer,
    tmax: u128,
    full: u32,
    counts: Vec<u128>,
    abs: Vec<u64>,
    /// Reduced equations, one buffer set per depth.
    scratch: Vec<Vec<Vec<Term>>>,
}

impl Search<'_> {
    /// Height bound on |x_v| given the assigned values, if any monomial provides one.
    fn bound(&self, v: usize, vals: &[i64], known: u32) -> Option<u128> {
        let mut best: Option<u128> = None;
        'mono: for m in &self.model.height {
            if m[v] == 0 {
                continue;
            }
            let mut p: u128 = 1;
            for (i, &k) in m.iter().enumerate() {
                if i == v || k == 0 {
                    continue;
                }
                if known & (1 << i) == 0 || vals[i] == 0 {
                    continue 'mono;
                }
                for _ in 0..k {
                    p = p.saturating_mul(vals[i].unsigned_abs() as u128);
                }
            }
            let b = iroot(self.tmax / p, m[v] as u32);
            best = Some(best.map_or(b, |c| c.min(b)));
        }
        best
    }

    fn over_height(&self, vals: &[i64], known: u32) -> bool {
        self.model.height.iter().any(|m| {
            if support(m) & !known != 0 {
                return false;
            }
            let mut p: u128 = 1;
            for (&k, &x) in m.iter().zip(vals) {
                for _ in 0..k {
                    p = p.saturating_mul(x.unsigned_abs() as u128);
                }
            }
            p > self.tmax
        })
    }

    fn steps(&self, v: usize, bound: u128, step: u128) -> Result<Candidates, CounterError> {
        if bound > (i64::MAX / 2) as u128 {
            return Err(CounterError::Overflow(format!("range of {}", self.model.vars[v])));
        }
        let count = (bound / step) as i64;
        if self.model.nonzero[v] {
            let l = (-count..=count).filter(|&j| j != 0).map(|j| j * step as i64).collect();
            return Ok(Candidates::List(l));
        }
        Ok(Candidates::Steps { step: step as i64, count })
    }

    /// Candidates from `c1*w + c2*v^k = 0` with `w` bounded.
    fn binomial(&self, red: &[Term], vals: &[i64], known: u32) -> Option<(usize, u128, u128)> {
        if red.len() != 2 {
            return None;
        }
        let single = |e: &Exps| {
            let s = support(e);
            (s.count_ones() == 1).then(|| {
                let i = s.trailing_zeros() as usize;
                (i, e[i] as u32)
            })
        };
        let (a, b) = (single(&red[0].1)?, single(&red[1].1)?);
        if a.0 == b.0 {
            return None;
        }
        let mut best: Option<(usize, u128, u128)> = None;
        for ((w, kw), c1, (v, k), c2) in [(a, red[0].0, b, red[1].0), (b, red[1].0, a, red[0].0)] {
            if kw != 1 {
                continue;
            }
            let Some(bw) = self.bound(w, vals, known) else { continue };
            let g = c1.gcd(&c2).unsigned_abs();
            let step = self.factorizer.root_radical(c1.unsigned_abs() / g, k);
            let mut r = iroot(c1.unsigned_abs().saturating_mul(bw) / c2.unsigned_abs(), k);
            if let Some(bv) = self.bound(v, vals, known) {
                r = r.min(bv);
            }
            if best.is_none_or(|(_, r0, s0)| r / step < r0 / s0) {
                best = Some((v, r, step));
            }
        }
        best
    }

    fn leaf(&mut self, vals: &[i64]) -> Result<(), CounterError> {
        for eq in &self.model.equations {
            if evaluate(eq, vals)? != 0 {
                return Ok(());
            }
        }
        for (a, v) in self.abs.iter_mut().zip(vals) {
            *a = v.unsigned_abs();
        }
        let abs = &self.abs;
        if !self.model.gcd_one.iter().all(|g| g.iter().fold(0u64, |a, &v| a.gcd(&abs[v])) == 1) {
            return Ok(());
        }
        let mut h: u128 = 0;
        for m in &self.model.height {
            let mut p: u128 = 1;
            for (&x, &k) in abs.iter().zip(m) {
                for _ in 0..k {
                    p = p.saturating_mul(x as u128);
                }
            }
            h = h.max(p);
        }
        if h == 0 || h > self.tmax || !self.region.contains(abs) {
            return Ok(());
        }
        if let Some(b) = self.bins.bin(h) {
            self.counts[b] += 1;
        }
        Ok(())
    }

    /// Root of an equation `c1 * x_v + c0 = 0` with small coefficients.
    fn linear_root(&self, red: &[Term], v: usize, vals: &[i64], known: u32) -> Option<Candidates> {
        let (mut c0, mut c1) = (0i64, 0i64);
        for (c, e) in red {
            let c = i64::try_from(*c).ok()?;
            match e[v] {
                0 => c0 = c0.checked_add(c)?,
                1 => c1 = c1.checked_add(c)?,
                _ => return None,
            }
        }
        if c1 == 0 || c0 == i64::MIN {
            return None;
        }
        if (-c0) % c1 != 0 {
            return Some(Candidates::Few([0; 2], 0));
        }
        let x = (-c0) / c1;
        let fits = self.bound(v, vals, known).is_none_or(|b| x.unsigned_abs() as u128 <= b);
        let n = usize::from(fits && !(self.model.nonzero[v] && x == 0));
        Some(Candidates::Few([x, 0], n))
    }

    fn choose(&self, reduced: &[Vec<Term>], vals: &[i64], known: u32) -> Result<Option<(usize, Candidates)>, CounterError> {
        let unknown = self.full & !known;
        for red in reduced {
            let vs = red.iter().fold(0u32, |m, (_, e)| m | support(e)) & unknown;
            if vs.count_ones() == 1 {
                let v = vs.trailing_zeros() as usize;
                if let Some(c) = self.linear_root(red, v, vals, known) {
                    return Ok(Some((v, c)));
                }
                let deg = red.iter().map(|(_, e)| e[v]).max().unwrap_or(0) as usize;
                let mut c = vec![0i128; deg + 1];
                for (k, e) in red {
                    c[e[v] as usize] += k;
                }
                let mut roots = integer_roots(&c, self.bound(v, vals, known))?;
                if self.model.nonzero[v] {
                    roots.retain(|&x| x != 0);
                }
                return Ok(Some((v, Candidates::List(roots))));
            }
        }
        let mut choice: Option<(usize, Candidates)> = None;
        for v in (0..self.model.vars.len()).filter(|&v| unknown & (1 << v) != 0) {
            if let Some(b) = self.bound(v, vals, known) {
                let c = self.steps(v, b, 1)?;
                if choice.as_ref().is_none_or(|(_, o)| c.size() < o.size()) {
                    choice = Some((v, c));
                }
            }
        }
        for red in reduced {
            if let Some((v, r, step)) = self.binomial(red, vals, known) {
                if choice.as_ref().is_none_or(|(_, o)| 2 * (r / step) + 1 < o.size()) {
                    choice = Some((v, self.steps(v, r, step)?));
                }
            }
        }
        Ok(choice)
    }

    fn node(&mut self, vals: &mut [i64], known: u32, depth: usize, stride: (usize, usize)) -> Result<(), CounterError> {
        if known == self.full {
            return self.leaf(vals);
        }
        if self.over_height(vals, known) {
            return Ok(());
        }
        if self.scratch.len() <= depth {
            self.scratch.resize_with(depth + 1, Vec::new);
        }
        let mut reduced = std::mem::take(&mut self.scratch[depth]);
        reduced.resize_with(self.model.equations.len(), Vec::new);
        let mut consistent = true;
        for (eq, out) in self.model.equations.iter().zip(reduced.iter_mut()) {
            reduce_into(eq, vals, known, out)?;
            if out.len() == 1 && support(&out[0].1) == 0 {
                consistent = false;
                break;
            }
        }
        let choice = if consistent { self.choose(&reduced, vals, known) } else { Ok(None) };
        self.scratch[depth] = reduced;
        if !consistent {
            return Ok(());
        }
        let Some((v, cands)) = choice? else {
            let names: Vec<&str> = (0..self.model.vars.len())
                .filter(|&i| known & (1 << i) == 0)
                .map(|i| self.model.vars[i].as_str())
                .collect();
            return Err(CounterError::Unbounded(names.join(", ")));
        };
        let n = cands.size() as usize;
        let (first, step) = if depth == 0 { stride } else { (0, 1) };
        let mut i = first;
        while i < n {
            vals[v] = cands.get(i);
            self.node(vals, known | (1 << v), depth + 1, stride)?;
            i += step;
        }
        vals[v] = 0;
        Ok(())
    }
}

/// Counts solutions of the model with height at most each checkpoint.
pub fn enumerate_affine(model: &AffineModel, checkpoints: &[u64], region: &Region, opts: &CountOptions) -> Result<Vec<CountRecord>, CounterError> {
    let started = Instant::now();
    let bins = Bins::new(checkpoints);
    let tmax = bins.max() as u128;
    let factorizer = Factorizer::new((tmax as usize).clamp(1000, 1 << 24));
    let workers = opts.workers.max(1);
    let k = model.vars.len();
    let partials: Vec<Result<Vec<u128>, CounterError>> = std::thread::scope(|s| {
        let handles: Vec<_> = (0..workers)
            .map(|w| {
                let (bins, factorizer) = (&bins, &factorizer);
                s.spawn(move || {
                    let mut search = Search {
                        model,
                        bins,
                        region,
                        factorizer,
                        tmax,
                        full: ((1u64 << k) - 1) as u32,
                        counts: vec![0; bins.bounds.len()],
                        abs: vec![0; k],
                        scratch: Vec::new(),
                    };
                    let mut vals = vec![0i64; k];
                    search.node(&mut vals, 0, 0, (w, workers))?;
                    Ok(search.counts)
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("worker panicked")).collect()
    });
    let mut total = vec![0u128; bins.bounds.len()];
    for p in partials {
        for (t, c) in total.iter_mut().zip(p?) {
            *t += c;
        }
    }
    Ok(bins.records(&model.id, &region.id, &total, started))
}

#[cfg(test)]
mod tests {
    use super::*;

    const QUADRIC: &str = r#"{
        "id": "quadric",
        "vars": ["x", "y", "z"],
        "equations": ["x*y = z^2"],
        "gcd_one": [["x", "y", "z"]],
        "height": {"max_of": [["x"], ["y"]]},
        "regions": {"xsmall": "x<=y"}
    }"#;

    fn one(workers: usize) -> CountOptions {
        CountOptions {
            workers,
            include_boundary: false,
        }
    }

    fn brute(t: i64) -> u64 {
        let mut n = 0;
        for x in -t..=t {
            for y in -t..=t {
                for z in -t..=t {
                    if x * y == z * z && num_integer::gcd(num_integer::gcd(x, y), z) == 1 {
                        n += 1;
                    }
                }
            }
        }
        n
    }

    #[test]
    fn parser() {
        let vars: Vec<String> = ["x", "y", "z"].iter().map(|s| s.to_string()).collect();
        let p = parse_polynomial("2*x^2*y - 3 = z - x^2*y", &vars).unwrap();
        let ex = |v: [u8; 3]| {
            let mut e = [0u8; MAX_VARS];
            e[..3].copy_from_slice(&v);
            e
        };
        assert_eq!(p, vec![(3, ex([2, 1, 0])), (-3, ex([0, 0, 0])), (-1, ex([0, 0, 1]))]);
        assert!(parse_polynomial("x*w", &vars).is_err());
        assert!(parse_polynomial("x+", &vars).is_err());
    }

    #[test]
    fn roots() {
        assert_eq!(integer_roots(&[-6, 1, 1], None).unwrap(), vec![-3, 2]);
        assert_eq!(integer_roots(&[3, 0, 1], None).unwrap(), Vec::<i64>::new());
        assert_eq!(integer_roots(&[0, -4, 0, 1], None).unwrap(), vec![-2, 0, 2]);
        assert_eq!(integer_roots(&[-8, 0, 0, 1], Some(1)).unwrap(), Vec::<i64>::new());
        assert_eq!(integer_roots(&[7, 2], None).unwrap(), Vec::<i64>::new());
    }

    #[test]
    fn radicals() {
        let f = Factorizer::new(100);
        assert_eq!(f.root_radical(12, 2), 6);
        assert_eq!(f.root_radical(72, 3), 6);
        assert_eq!(f.root_radical(1, 2), 1);
        assert_eq!(f.root_radical(1_000_003 * 4, 2), 2 * 1_000_003);
    }

    #[test]
    fn quadric_cone_small() {
        let m = AffineModel::from_json(QUADRIC).unwrap();
        let recs = enumerate_affine(&m, &[0, 1, 2, 5, 9, 12], &Region::all(), &one(2)).unwrap();
        let ns: Vec<u64> = recs.iter().map(|r| r.n).collect();
        let expect: Vec<u64> = [0, 1, 2, 5, 9, 12].iter().map(|&t| brute(t)).collect();
        assert_eq!(ns, expect);
        assert_eq!(ns[1], 8);
        assert!(m.satisfies(&[4, 9, -6]));
        assert!(!m.satisfies(&[4, 9, 5]));
        assert_eq!(m.height(&[4, -9, 6]), BigUint::from(9u32));
    }

    #[test]
    fn declared_region() {
        let m = AffineModel::from_json(QUADRIC).unwrap();
        let r = m.region("xsmall").unwrap();
        let ns = enumerate_affine(&m, &[9], &r, &one(1)).unwrap();
        let mut n = 0;
        for x in -9i64..=9 {
            for y in -9i64..=9 {
                for z in -9i64..=9 {
                    if x * y == z * z && num_integer::gcd(num_integer::gcd(x, y), z) == 1 && x.abs() <= y.abs() {
                        n += 1;
                    }
                }
            }
        }
        assert_eq!(ns[0].n, n);
        assert!(m.region("nope").is_err());
    }

    #[test]
    fn unbounded_variable() {
        let m = AffineModel::from_json(r#"{"vars":["x","y"],"equations":["x - x"],"height":{"max_of":[["x"]]}}"#).unwrap();
        assert!(matches!(
            enumerate_affine(&m, &[5], &Region::all(), &one(1)),
            Err(CounterError::Unbounded(_))
        ));
    }

    #[test]
    fn circle() {
        let m = AffineModel::from_json(r#"{"vars":["x","y"],"equations":["x^2+y^2=25"],"height":{"max_of":[["x"],["y"]]}}"#).unwrap();
        let recs = enumerate_affine(&m, &[5], &Region::all(), &one(3)).unwrap();
        assert_eq!(recs[0].n, 12);
    }
}
