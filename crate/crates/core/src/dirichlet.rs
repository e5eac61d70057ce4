//! Dirichlet characters modulo `q` with exact values.
//!
//! `(Z/qZ)*` is decomposed into cyclic components, one per odd prime power
//! (generated by its smallest primitive root) plus zero, one or two for the
//! power of two (`-1` for `4`, `-1` and `5` for `2^e`, `e >= 3`). A character
//! is an exponent vector over those components, and its values are exact
//! roots of unity `e^{2πi a/b}`; conversion to floating point happens only
//! when a sum is accumulated.

use num_complex::Complex64;

use crate::arith::FactorSieve;
use crate::error::{invalid, Error, Result};
use crate::sum::ComplexAccumulator;

/// Largest modulus accepted by [`CharacterGroup::new`].
pub const DEFAULT_MAX_MODULUS: u64 = 1_000_000;

/// The exact root of unity `e^{2πi num/den}`, with `num/den` in lowest terms
/// and `0 <= num < den`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RootOfUnity {
    num: u64,
    den: u64,
}

impl RootOfUnity {
    pub const ONE: RootOfUnity = RootOfUnity { num: 0, den: 1 };

    pub fn new(num: u64, den: u64) -> Self {
        assert!(den > 0, "root of unity with zero denominator");
        let num = num % den;
        let g = gcd(num, den);
        Self { num: num / g, den: den / g }
    }

    pub fn numerator(&self) -> u64 {
        self.num
    }

    pub fn denominator(&self) -> u64 {
        self.den
    }

    pub fn to_complex(self) -> Complex64 {
        match (self.num, self.den) {
            (0, _) => Complex64::new(1.0, 0.0),
            (1, 2) => Complex64::new(-1.0, 0.0),
            (1, 4) => Complex64::new(0.0, 1.0),
            (3, 4) => Complex64::new(0.0, -1.0),
            (n, d) => root_complex(n, d),
        }
    }
}

impl std::ops::Mul for RootOfUnity {
    type Output = RootOfUnity;

    fn mul(self, rhs: Self) -> Self {
        let den = lcm(self.den, rhs.den);
        let num = self.num * (den / self.den) + rhs.num * (den / rhs.den);
        RootOfUnity::new(num, den)
    }
}

/// `e^{2πi k/n}`, folding the angle into `[-π, π]` first.
fn root_complex(k: u64, n: u64) -> Complex64 {
    let k = k % n;
    let signed = if 2 * k > n { k as f64 - n as f64 } else { k as f64 };
    let (s, c) = (std::f64::consts::TAU * signed / n as f64).sin_cos();
    Complex64::new(c, s)
}

/// A character value: either zero (`gcd(n, q) > 1`) or an exact root of unity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CharValue {
    Zero,
    Root(RootOfUnity),
}

impl CharValue {
    pub fn to_complex(self) -> Complex64 {
        match self {
            CharValue::Zero => Complex64::new(0.0, 0.0),
            CharValue::Root(r) => r.to_complex(),
        }
    }
}

/// One cyclic factor of `(Z/qZ)*`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Component {
    /// The prime whose power carries this component.
    pub prime: u64,
    /// `prime^exponent`, the modulus the generator lives in.
    pub prime_power: u64,
    pub exponent: u32,
    /// Generator, as a residue mod `prime_power`.
    pub generator: u64,
    pub order: u64,
}

/// `(Z/qZ)*` with its cyclic decomposition and discrete-log tables.
#[derive(Debug, Clone)]
pub struct CharacterGroup {
    modulus: u64,
    phi: u64,
    components: Vec<Component>,
    /// lcm of the component orders.
    exponent: u64,
    /// Per component, `dlog[i][u mod prime_power]`; `u32::MAX` marks non-units.
    dlog: Vec<Vec<u32>>,
}

const NOT_UNIT: u32 = u32::MAX;

pub fn character_group(q: u64) -> Result<CharacterGroup> {
    CharacterGroup::new(q)
}

impl CharacterGroup {
    pub fn new(q: u64) -> Result<Self> {
        Self::with_bound(q, DEFAULT_MAX_MODULUS)
    }

    pub fn with_bound(q: u64, max_modulus: u64) -> Result<Self> {
        if q == 0 {
            return invalid("character modulus must be positive");
        }
        if q > max_modulus || q > u32::MAX as u64 {
            return Err(Error::Resource(format!(
                "modulus {q} exceeds configured bound {max_modulus}"
            )));
        }
        let mut components = Vec::new();
        let mut dlog = Vec::new();
        for (p, e) in trial_factor(q) {
            let pe = p.pow(e);
            if p == 2 {
                match e {
                    1 => {}
                    2 => {
                        components.push(Component {
                            prime: 2,
                            prime_power: 4,
                            exponent: 2,
                            generator: 3,
                            order: 2,
                        });
                        let mut t = vec![NOT_UNIT; 4];
                        t[1] = 0;
                        t[3] = 1;
                        dlog.push(t);
                    }
                    _ => {
                        let five_order = pe / 4;
                        components.push(Component {
                            prime: 2,
                            prime_power: pe,
                            exponent: e,
                            generator: pe - 1,
                            order: 2,
                        });
                        components.push(Component {
                            prime: 2,
                            prime_power: pe,
                            exponent: e,
                            generator: 5,
                            order: five_order,
                        });
                        let mut sign = vec![NOT_UNIT; pe as usize];
                        let mut five = vec![NOT_UNIT; pe as usize];
                        let mut pow5 = 1u64;
                        for b in 0..five_order {
                            sign[pow5 as usize] = 0;
                            five[pow5 as usize] = b as u32;
                            let neg = pe - pow5;
                            sign[neg as usize] = 1;
                            five[neg as usize] = b as u32;
                            pow5 = pow5 * 5 % pe;
                        }
                        dlog.push(sign);
                        dlog.push(five);
                    }
                }
            } else {
                let order = pe / p * (p - 1);
                let g = smallest_primitive_root(p, pe, order);
                let mut t = vec![NOT_UNIT; pe as usize];
                let mut x = 1u64;
                for k in 0..order {
                    t[x as usize] = k as u32;
                    x = x * g % pe;
                }
                components.push(Component { prime: p, prime_power: pe, exponent: e, generator: g, order });
                dlog.push(t);
            }
        }
        let phi = components.iter().map(|c| c.order).product();
        let exponent = components.iter().fold(1, |acc, c| lcm(acc, c.order));
        Ok(Self { modulus: q, phi, components, exponent, dlog })
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    /// φ(q), the group order.
    pub fn order(&self) -> u64 {
        self.phi
    }

    pub fn components(&self) -> &[Component] {
        &self.components
    }

    /// Exponent of the group: every character value is a power of `e^{2πi/exponent}`.
    pub fn exponent(&self) -> u64 {
        self.exponent
    }

    /// Discrete-log vector of `n` (reduced mod q), or `None` if `gcd(n, q) > 1`.
    pub fn discrete_log(&self, n: u64) -> Option<Vec<u64>> {
        // q = 2·odd has no component for the prime 2.
        if self.modulus % 2 == 0 && n % 2 == 0 {
            return None;
        }
        let mut out = Vec::with_capacity(self.components.len());
        for (c, table) in self.components.iter().zip(&self.dlog) {
            let l = table[(n % c.prime_power) as usize];
            if l == NOT_UNIT {
                return None;
            }
            out.push(l as u64);
        }
        Some(out)
    }

    pub fn is_unit(&self, n: u64) -> bool {
        gcd(n % self.modulus, self.modulus) == 1
    }

    /// Rebuilds a unit mod q from its discrete-log vector.
    pub fn from_discrete_log(&self, logs: &[u64]) -> u64 {
        let q = self.modulus;
        let mut result = 1 % q;
        for (c, &l) in self.components.iter().zip(logs) {
            let local = pow_mod(c.generator, l, c.prime_power);
            // Lift: x ≡ local (mod p^e), x ≡ 1 (mod q / p^e).
            let rest = q / c.prime_power;
            let lifted = crt_pair(local, c.prime_power, 1 % rest, rest);
            result = mul_mod(result, lifted, q);
        }
        result
    }

    pub fn character(&self, exponents: Vec<u64>) -> Result<DirichletCharacter<'_>> {
        if exponents.len() != self.components.len() {
            return invalid(format!(
                "expected {} exponents, got {}",
                self.components.len(),
                exponents.len()
            ));
        }
        if let Some((c, e)) = self.components.iter().zip(&exponents).find(|(c, &e)| e >= c.order) {
            return invalid(format!("exponent {e} out of range for component of order {}", c.order));
        }
        let conductor = self.conductor_of(&exponents);
        Ok(DirichletCharacter { group: self, exponents, conductor })
    }

    pub fn principal(&self) -> DirichletCharacter<'_> {
        self.character(vec![0; self.components.len()]).expect("zero exponents are valid")
    }

    /// All φ(q) characters in mixed-radix order over the components.
    pub fn characters(&self) -> impl Iterator<Item = DirichletCharacter<'_>> + '_ {
        let orders: Vec<u64> = self.components.iter().map(|c| c.order).collect();
        (0..self.phi).map(move |mut idx| {
            let mut exps = Vec::with_capacity(orders.len());
            for &o in &orders {
                exps.push(idx % o);
                idx /= o;
            }
            let conductor = self.conductor_of(&exps);
            DirichletCharacter { group: self, exponents: exps, conductor }
        })
    }

    pub fn primitive_characters(&self) -> impl Iterator<Item = DirichletCharacter<'_>> + '_ {
        self.characters().filter(|c| c.is_primitive())
    }

    fn conductor_of(&self, exponents: &[u64]) -> u64 {
        let mut f = 1u64;
        let mut i = 0;
        while i < self.components.len() {
            let c = &self.components[i];
            if c.prime == 2 && c.exponent >= 3 {
                // (-1, 5) pair.
                let a = exponents[i];
                let b = exponents[i + 1];
                if b != 0 {
                    f *= 1 << (c.exponent - b.trailing_zeros());
                } else if a != 0 {
                    f *= 4;
                }
                i += 2;
                continue;
            }
            let a = exponents[i];
            if a != 0 {
                if c.prime == 2 {
                    f *= 4;
                } else {
                    let mut v = 0;
                    let mut t = a;
                    while t % c.prime == 0 {
                        t /= c.prime;
                        v += 1;
                    }
                    let level = c.exponent.saturating_sub(v).max(1);
                    f *= c.prime.pow(level);
                }
            }
            i += 1;
        }
        f
    }
}

/// A character χ mod q, identified by its exponents on the group's components.
#[derive(Debug, Clone)]
pub struct DirichletCharacter<'g> {
    group: &'g CharacterGroup,
    exponents: Vec<u64>,
    conductor: u64,
}

impl PartialEq for DirichletCharacter<'_> {
    fn eq(&self, other: &Self) -> bool {
        self.group.modulus == other.group.modulus && self.exponents == other.exponents
    }
}

impl<'g> DirichletCharacter<'g> {
    pub fn group(&self) -> &'g CharacterGroup {
        self.group
    }

    pub fn modulus(&self) -> u64 {
        self.group.modulus
    }

    pub fn exponents(&self) -> &[u64] {
        &self.exponents
    }

    pub fn conductor(&self) -> u64 {
        self.conductor
    }

    pub fn is_primitive(&self) -> bool {
        self.conductor == self.group.modulus
    }

    pub fn conductor_and_primitivity(&self) -> (u64, bool) {
        (self.conductor, self.is_primitive())
    }

    pub fn is_principal(&self) -> bool {
        self.exponents.iter().all(|&e| e == 0)
    }

    /// Multiplicative order of χ.
    pub fn order(&self) -> u64 {
        self.group
            .components
            .iter()
            .zip(&self.exponents)
            .fold(1, |acc, (c, &e)| lcm(acc, c.order / gcd(e, c.order)))
    }

    pub fn is_real(&self) -> bool {
        self.order() <= 2
    }

    /// `k` such that χ(n) = e^{2πi k / exponent}, or `None` when χ(n) = 0.
    #[inline]
    pub fn exponent_at(&self, n: u64) -> Option<u64> {
        let g = self.group;
        if g.modulus == 1 {
            return Some(0);
        }
        if g.modulus % 2 == 0 && n % 2 == 0 {
            return None;
        }
        let mut k = 0u64;
        for ((c, table), &e) in g.components.iter().zip(&g.dlog).zip(&self.exponents) {
            let l = table[(n % c.prime_power) as usize];
            if l == NOT_UNIT {
                return None;
            }
            k += (l as u64 * e % c.order) * (g.exponent / c.order);
        }
        Some(k % g.exponent)
    }

    pub fn evaluate(&self, n: u64) -> CharValue {
        match self.exponent_at(n) {
            None => CharValue::Zero,
            Some(k) => CharValue::Root(RootOfUnity::new(k, self.group.exponent)),
        }
    }

    /// Values χ(0), …, χ(q−1) as complex numbers.
    pub fn table(&self) -> CharacterTable {
        let l = self.group.exponent;
        let roots: Vec<Complex64> = (0..l).map(|k| RootOfUnity::new(k, l).to_complex()).collect();
        let values = (0..self.group.modulus)
            .map(|n| self.exponent_at(n).map_or(Complex64::new(0.0, 0.0), |k| roots[k as usize]))
            .collect();
        CharacterTable { modulus: self.group.modulus, values, real: self.is_real() }
    }

    /// ψ(y, χ) = Σ_{n ≤ y} Λ(n) χ(n).
    pub fn psi_twisted(&self, y: f64, sieve: &FactorSieve) -> Result<Complex64> {
        let top = sieve.floor_index(y)?;
        let l = self.group.exponent;
        let mut acc = ComplexAccumulator::new();
        for n in sieve.prime_powers(top) {
            if let Some(k) = self.exponent_at(n as u64) {
                acc.add(RootOfUnity::new(k, l).to_complex() * sieve.lambda(n));
            }
        }
        Ok(acc.value())
    }

    /// max over `0 <= x <= y < q` of |Σ_{x ≤ n ≤ y} χ(n)|.
    pub fn polya_vinogradov_max(&self) -> Result<f64> {
        let q = self.group.modulus;
        if q == 1 {
            return invalid("Pólya–Vinogradov maximum needs q > 1");
        }
        if !self.is_primitive() {
            return invalid(format!("character mod {q} is not primitive"));
        }
        let table = self.table();
        let mut prefix = Vec::with_capacity(q as usize + 1);
        let mut acc = ComplexAccumulator::new();
        prefix.push(Complex64::new(0.0, 0.0));
        for v in &table.values {
            acc.add(*v);
            prefix.push(acc.value());
        }
        if table.real {
            let (lo, hi) = prefix
                .iter()
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), z| (lo.min(z.re), hi.max(z.re)));
            return Ok(hi - lo);
        }
        let mut best = 0.0f64;
        for (i, a) in prefix.iter().enumerate() {
            for b in &prefix[i + 1..] {
                best = best.max((b - a).norm());
            }
        }
        Ok(best)
    }
}

/// Precomputed complex values of one character over a full period.
#[derive(Debug, Clone)]
pub struct CharacterTable {
    modulus: u64,
    values: Vec<Complex64>,
    real: bool,
}

impl CharacterTable {
    #[inline]
    pub fn value(&self, n: u64) -> Complex64 {
        self.values[(n % self.modulus) as usize]
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn is_real(&self) -> bool {
        self.real
    }
}

/// Value tables of every primitive character mod `q`.
pub fn primitive_tables(q: u64) -> Result<Vec<CharacterTable>> {
    let group = CharacterGroup::new(q)?;
    let tables = group.primitive_characters().map(|c| c.table()).collect();
    Ok(tables)
}

/// Number of primitive characters mod q, Σ_{d|q} μ(q/d) φ(d), via the
/// multiplicative formula on prime powers.
pub fn primitive_count(q: u64) -> u64 {
    trial_factor(q)
        .into_iter()
        .map(|(p, e)| {
            let pe = p.pow(e);
            let phi = pe / p * (p - 1);
            if e == 1 {
                p - 2
            } else {
                // φ(p^e) − φ(p^{e−1})
                phi - phi / p
            }
        })
        .product()
}

pub(crate) fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

fn lcm(a: u64, b: u64) -> u64 {
    a / gcd(a, b) * b
}

#[inline]
fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut result = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            result = mul_mod(result, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    result
}

/// x with x ≡ a (mod m), x ≡ b (mod n) for coprime m, n.
fn crt_pair(a: u64, m: u64, b: u64, n: u64) -> u64 {
    if n == 1 {
        return a % m;
    }
    // m·inv(m mod n) ≡ 1 (mod n)
    let inv = mod_inverse(m % n, n);
    let diff = (b + n - a % n) % n;
    let t = mul_mod(diff, inv, n);
    a + m * t
}

fn mod_inverse(a: u64, n: u64) -> u64 {
    let (mut old_r, mut r) = (a as i128, n as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let quot = old_r / r;
        (old_r, r) = (r, old_r - quot * r);
        (old_s, s) = (s, old_s - quot * s);
    }
    old_s.rem_euclid(n as i128) as u64
}

pub(crate) fn trial_factor(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            let mut e = 0;
            while n % d == 0 {
                n /= d;
                e += 1;
            }
            out.push((d, e));
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

fn smallest_primitive_root(p: u64, pe: u64, order: u64) -> u64 {
    let factors: Vec<u64> = trial_factor(order).into_iter().map(|(r, _)| r).collect();
    (2..pe)
        .filter(|g| g % p != 0)
        .find(|&g| factors.iter().all(|&r| pow_mod(g, order / r, pe) != 1))
        .expect("odd prime powers have primitive roots")
}
