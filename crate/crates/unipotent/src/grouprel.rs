//! The u(g) = g − 1 calculus: group words and their expansion into
//! augmentation-ideal polynomials.
//!
//! Under a cubic condition `(g-1)^3 = 0` every power expands as
//! `u(g^m) = m·u(g) + C(m,2)·u(g)^2`, negative exponents included; under a
//! quadratic condition the square term dies and `u(g^m) = m·u(g)`. A word
//! expands as the product of `1 + u(letter)` minus one, which is the
//! subsequence-sum formula in closed form.

use std::fmt;

use crate::coeff::{Coeff, CoeffError};
use crate::freealg::{Gen, Monomial, Polynomial, PowerCap};
use crate::Poly;

/// A freely reduced word in generators `y1, y2, …`: adjacent letters have
/// distinct generators and no exponent is zero.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default, PartialOrd, Ord)]
pub struct GroupWord {
    letters: Vec<(Gen, i32)>,
}

impl GroupWord {
    pub fn one() -> Self {
        GroupWord::default()
    }

    pub fn gen(g: Gen) -> Self {
        GroupWord {
            letters: vec![(g, 1)],
        }
    }

    pub fn gen_pow(g: Gen, e: i32) -> Self {
        if e == 0 {
            GroupWord::one()
        } else {
            GroupWord {
                letters: vec![(g, e)],
            }
        }
    }

    /// Builds a word with free reduction (merging runs, dropping zeros).
    pub fn from_letters<I: IntoIterator<Item = (Gen, i32)>>(letters: I) -> Self {
        let mut out: Vec<(Gen, i32)> = Vec::new();
        for (g, e) in letters {
            if e == 0 {
                continue;
            }
            match out.last_mut() {
                Some((lg, le)) if *lg == g => {
                    *le += e;
                    if *le == 0 {
                        out.pop();
                    }
                }
                _ => out.push((g, e)),
            }
        }
        GroupWord { letters: out }
    }

    pub fn letters(&self) -> &[(Gen, i32)] {
        &self.letters
    }

    pub fn is_one(&self) -> bool {
        self.letters.is_empty()
    }

    /// Reduced word length: the sum of |exponents|.
    pub fn length(&self) -> u32 {
        self.letters.iter().map(|&(_, e)| e.unsigned_abs()).sum()
    }

    pub fn mul(&self, rhs: &GroupWord) -> GroupWord {
        GroupWord::from_letters(self.letters.iter().chain(rhs.letters.iter()).copied())
    }

    pub fn inv(&self) -> GroupWord {
        GroupWord {
            letters: self.letters.iter().rev().map(|&(g, e)| (g, -e)).collect(),
        }
    }

    pub fn pow(&self, e: i32) -> GroupWord {
        let base = if e < 0 { self.inv() } else { self.clone() };
        let mut out = GroupWord::one();
        for _ in 0..e.unsigned_abs() {
            out = out.mul(&base);
        }
        out
    }

    /// `[x, y] = x^-1 y^-1 x y`.
    pub fn commutator(x: &GroupWord, y: &GroupWord) -> GroupWord {
        x.inv().mul(&y.inv()).mul(x).mul(y)
    }

    /// Left-normed commutator `[w1, w2, …, wk]`.
    pub fn left_normed(words: &[GroupWord]) -> GroupWord {
        let mut it = words.iter();
        let mut acc = it.next().cloned().unwrap_or_default();
        for w in it {
            acc = GroupWord::commutator(&acc, w);
        }
        acc
    }

    /// Initial segments `x1, x1x2, …, w` of the reduced word, letter by
    /// letter.
    pub fn initial_segments(&self) -> Vec<GroupWord> {
        let mut out = Vec::new();
        let mut acc: Vec<(Gen, i32)> = Vec::new();
        for &(g, e) in &self.letters {
            let step = if e > 0 { 1 } else { -1 };
            for _ in 0..e.unsigned_abs() {
                acc.push((g, step));
                out.push(GroupWord::from_letters(acc.iter().copied()));
            }
        }
        out
    }

    /// Exponent-sum vector in ℤ^d (the abelianization image).
    pub fn exponent_sums(&self, d: usize) -> Vec<i64> {
        let mut v = vec![0i64; d];
        for &(g, e) in &self.letters {
            if (g as usize) <= d {
                v[g as usize - 1] += i64::from(e);
            }
        }
        v
    }

    pub fn max_gen(&self) -> Gen {
        self.letters.iter().map(|&(g, _)| g).max().unwrap_or(0)
    }
}

impl fmt::Display for GroupWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self
            .letters
            .iter()
            .map(|&(g, e)| {
                if e == 1 {
                    format!("y{g}")
                } else {
                    format!("y{g}^{e}")
                }
            })
            .collect();
        write!(f, "{}", parts.join("*"))
    }
}

/// Parses `y1*y2^-1*y1^2`, the `a`/`b` aliases, `e`/`1` for the identity,
/// and left-normed commutator brackets `[a,b,a]` (nestable).
pub fn parse_word(input: &str) -> Result<GroupWord, CoeffError> {
    let s: String = input.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || CoeffError::Parse(input.to_string());
    let bytes = s.as_bytes();
    let mut pos = 0usize;
    let w = parse_product(&s, bytes, &mut pos).ok_or_else(bad)?;
    if pos != bytes.len() {
        return Err(bad());
    }
    Ok(w)
}

fn parse_product(s: &str, bytes: &[u8], pos: &mut usize) -> Option<GroupWord> {
    let mut acc = GroupWord::one();
    loop {
        let factor = parse_factor(s, bytes, pos)?;
        acc = acc.mul(&factor);
        if *pos < bytes.len() && bytes[*pos] == b'*' {
            *pos += 1;
            continue;
        }
        return Some(acc);
    }
}

fn parse_factor(s: &str, bytes: &[u8], pos: &mut usize) -> Option<GroupWord> {
    if *pos >= bytes.len() {
        return None;
    }
    let base: GroupWord = match bytes[*pos] {
        b'[' => {
            *pos += 1;
            let mut parts = vec![parse_product(s, bytes, pos)?];
            while *pos < bytes.len() && bytes[*pos] == b',' {
                *pos += 1;
                parts.push(parse_product(s, bytes, pos)?);
            }
            if *pos >= bytes.len() || bytes[*pos] != b']' {
                return None;
            }
            *pos += 1;
            if parts.len() < 2 {
                return None;
            }
            GroupWord::left_normed(&parts)
        }
        b'e' | b'1' => {
            *pos += 1;
            GroupWord::one()
        }
        b'a' => {
            *pos += 1;
            GroupWord::gen(1)
        }
        b'b' => {
            *pos += 1;
            GroupWord::gen(2)
        }
        b'y' => {
            *pos += 1;
            let start = *pos;
            while *pos < bytes.len() && bytes[*pos].is_ascii_digit() {
                *pos += 1;
            }
            let g: Gen = s[start..*pos].parse().ok()?;
            if g == 0 {
                return None;
            }
            GroupWord::gen(g)
        }
        _ => return None,
    };
    if *pos < bytes.len() && bytes[*pos] == b'^' {
        *pos += 1;
        let start = *pos;
        if *pos < bytes.len() && (bytes[*pos] == b'-' || bytes[*pos] == b'+') {
            *pos += 1;
        }
        while *pos < bytes.len() && bytes[*pos].is_ascii_digit() {
            *pos += 1;
        }
        let e: i32 = s[start..*pos].parse().ok()?;
        return Some(base.pow(e));
    }
    Some(base)
}

/// Binomial C(m, 2) = m(m−1)/2, valid for negative `m` as well
/// (C(−i+1, 2) = C(i, 2)).
fn choose2(m: i64) -> i64 {
    m * (m - 1) / 2
}

/// `u(g^m)` for a generator `g` with `u(g) = U_gen`.
pub fn u_of_power_gen(g: Gen, m: i64, cap: PowerCap) -> Poly {
    let mut p = Poly::zero();
    p.add_term(Monomial::gen(g), Coeff::from_int(m));
    if cap == PowerCap::Cubic {
        p.add_term(Monomial::gen_pow(g, 2), Coeff::from_int(choose2(m)));
    }
    p
}

/// `u(g^m)` in a single generator: `m·U + C(m,2)·U^2` (cubic) or `m·U`
/// (quadratic).
pub fn u_of_power(m: i64, cap: PowerCap) -> Poly {
    u_of_power_gen(1, m, cap)
}

/// Expands `u(w)` for a reduced word: the product of `1 + u(letter)`
/// minus 1, equal to the sum of `u(x_{i1})⋯u(x_{is})` over subsequences.
pub fn expand_word(w: &GroupWord, cap: PowerCap) -> Poly {
    let mut acc = Poly::one();
    for &(g, e) in w.letters() {
        let factor = Polynomial::one().add(&u_of_power_gen(g, i64::from(e), cap));
        acc = acc.mul(&factor, cap);
    }
    acc.sub(&Poly::one())
}

/// `u([a_x, a_y])` in the quadratic case: `2·u(a_x)u(a_y)` with the
/// anticommutation `u(a_y)u(a_x) = -u(a_x)u(a_y)` normalizing the order.
pub fn quadratic_commutator(x: Gen, y: Gen) -> Poly {
    if x == y {
        return Poly::zero();
    }
    let (lo, hi, sign) = if x < y { (x, y, 2) } else { (y, x, -2) };
    let mut p = Poly::zero();
    let m = Monomial::gen(lo).mul(&Monomial::gen(hi), PowerCap::Quadratic);
    p.add_term(m.expect("distinct generators"), Coeff::from_int(sign));
    p
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::freealg::parse as parse_poly;

    fn pc(s: &str) -> Poly {
        parse_poly(s, PowerCap::Cubic).unwrap()
    }

    fn w(s: &str) -> GroupWord {
        parse_word(s).unwrap()
    }

    #[test]
    fn u_of_power_examples() {
        assert_eq!(u_of_power(-1, PowerCap::Cubic), pc("-U + U^2"));
        assert_eq!(u_of_power(1, PowerCap::Cubic), pc("U"));
        assert_eq!(u_of_power(3, PowerCap::Cubic), pc("3*U + 3*U^2"));
        assert_eq!(u_of_power(-2, PowerCap::Quadratic), pc("-2*U"));
    }

    #[test]
    fn u_of_power_matches_repeated_multiplication() {
        // Oracle: (1+U)^m - 1 computed by repeated multiplication, with
        // (1+U)^-1 = 1 - U + U^2 for the negative direction.
        let one_plus_u = Poly::one().add(&pc("U"));
        let inv = pc("1 - U + U^2");
        assert_eq!(
            one_plus_u.mul(&inv, PowerCap::Cubic),
            Poly::one(),
            "inverse sanity"
        );
        for m in -10i64..=10 {
            let base = if m < 0 { &inv } else { &one_plus_u };
            let direct = base
                .pow(m.unsigned_abs() as u32, PowerCap::Cubic)
                .sub(&Poly::one());
            assert_eq!(u_of_power(m, PowerCap::Cubic), direct, "m = {m}");
        }
    }

    #[test]
    fn expand_word_examples() {
        assert_eq!(expand_word(&w("y1*y2"), PowerCap::Cubic), pc("U*V + U + V"));
        assert_eq!(expand_word(&GroupWord::one(), PowerCap::Cubic), Poly::zero());
        // u([a,b]) equals the closed product form used by the C2 lemma.
        assert_eq!(
            expand_word(&w("[a,b]"), PowerCap::Cubic),
            crate::rewrite::commutator_u_polynomial()
        );
    }

    #[test]
    fn expand_word_matches_subsequence_sum() {
        // Independent oracle: sum u(x_{i1})...u(x_{is}) over all nonempty
        // subsequences of the letter sequence.
        let word = w("y1*y2^-1*y1^2*y2");
        let mut letters: Vec<Poly> = Vec::new();
        for &(g, e) in word.letters() {
            let step = if e > 0 { 1 } else { -1 };
            for _ in 0..e.unsigned_abs() {
                letters.push(u_of_power_gen(g, step, PowerCap::Cubic));
            }
        }
        let n = letters.len();
        let mut total = Poly::zero();
        for mask in 1u32..(1 << n) {
            let mut prod = Poly::one();
            for (i, letter) in letters.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    prod = prod.mul(letter, PowerCap::Cubic);
                }
            }
            total = total.add(&prod);
        }
        assert_eq!(expand_word(&word, PowerCap::Cubic), total);
    }

    #[test]
    fn expansion_is_homomorphic() {
        let samples = ["y1*y2", "y2^-2*y1", "[a,b]", "y1^3*y2^-1*y1^-1", "1"];
        for s1 in samples {
            for s2 in samples {
                let (w1, w2) = (w(s1), w(s2));
                let lhs = expand_word(&w1.mul(&w2), PowerCap::Cubic);
                let (e1, e2) = (
                    expand_word(&w1, PowerCap::Cubic),
                    expand_word(&w2, PowerCap::Cubic),
                );
                let rhs = e1.add(&e2).add(&e1.mul(&e2, PowerCap::Cubic));
                assert_eq!(lhs, rhs, "{s1} * {s2}");
            }
        }
    }

    #[test]
    fn quadratic_commutator_examples() {
        assert_eq!(quadratic_commutator(1, 2), {
            let mut p = Poly::zero();
            p.add_term(
                Monomial::from_letters(&[1, 2], PowerCap::Quadratic).unwrap(),
                Coeff::from_int(2),
            );
            p
        });
        assert!(quadratic_commutator(1, 1).is_zero());
        assert_eq!(
            quadratic_commutator(2, 1),
            quadratic_commutator(1, 2).neg()
        );
    }

    #[test]
    fn word_parsing_and_reduction() {
        assert_eq!(w("y1*y1^-1"), GroupWord::one());
        assert_eq!(w("a*b^-1"), w("y1*y2^-1"));
        assert_eq!(w("[a,b]"), w("a^-1*b^-1*a*b"));
        assert_eq!(w("[a,b,a]"), GroupWord::commutator(&w("[a,b]"), &w("a")));
        assert_eq!(w("y1^2*y2^-3").to_string(), "y1^2*y2^-3");
        assert_eq!(w("e"), GroupWord::one());
        let word = w("y2*y1^-2*y2^2");
        assert_eq!(parse_word(&word.to_string()).unwrap(), word);
    }

    #[test]
    fn initial_segments_example() {
        let segs = w("y1*y2*y1").initial_segments();
        assert_eq!(segs, vec![w("y1"), w("y1*y2"), w("y1*y2*y1")]);
    }
}
