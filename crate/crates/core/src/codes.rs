//! Codes: finite words over {a₊, a₋, A₊, A₋} that label ILM branches at the
//! anticontinuum limit. Two codes describe the same mode when they are
//! related by the sign flip −, the reflection R, or the composition −R, so
//! every mode is identified with the lexicographically least word of its
//! orbit under {1, −1, R, −R}.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::model::RootPair;
use crate::{Error, Result};

/// Hard enumeration limit: 4^12 raw words is the most the brute-force
/// enumerator is allowed to walk.
pub const MAX_CODE_LEN: usize = 12;

/// One site of a code. The declaration order fixes the lexicographic order
/// used for canonical representatives: a₊ < a₋ < A₊ < A₋.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Symbol {
    SmallPlus,
    SmallMinus,
    LargePlus,
    LargeMinus,
}

impl Symbol {
    pub const ALL: [Symbol; 4] = [
        Symbol::SmallPlus,
        Symbol::SmallMinus,
        Symbol::LargePlus,
        Symbol::LargeMinus,
    ];

    pub fn negated(self) -> Symbol {
        match self {
            Symbol::SmallPlus => Symbol::SmallMinus,
            Symbol::SmallMinus => Symbol::SmallPlus,
            Symbol::LargePlus => Symbol::LargeMinus,
            Symbol::LargeMinus => Symbol::LargePlus,
        }
    }

    pub fn sign(self) -> f64 {
        match self {
            Symbol::SmallPlus | Symbol::LargePlus => 1.0,
            Symbol::SmallMinus | Symbol::LargeMinus => -1.0,
        }
    }

    pub fn is_small(self) -> bool {
        matches!(self, Symbol::SmallPlus | Symbol::SmallMinus)
    }

    /// Signed site value ±a or ±A.
    pub fn value(self, roots: &RootPair) -> f64 {
        self.sign() * roots.amplitude(self.is_small())
    }

    pub fn token(self) -> &'static str {
        match self {
            Symbol::SmallPlus => "a+",
            Symbol::SmallMinus => "a-",
            Symbol::LargePlus => "A+",
            Symbol::LargeMinus => "A-",
        }
    }

    pub fn parse_token(token: &str) -> Result<Symbol> {
        match token.trim() {
            "a+" => Ok(Symbol::SmallPlus),
            "a-" => Ok(Symbol::SmallMinus),
            "A+" => Ok(Symbol::LargePlus),
            "A-" => Ok(Symbol::LargeMinus),
            other => Err(Error::InvalidParams(format!(
                "unknown code token {other:?}; expected one of a+, a-, A+, A-"
            ))),
        }
    }
}

/// A nonempty word of symbols. The zero state never appears inside a code;
/// interior zeros would split the mode into separate excitations.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Code(Vec<Symbol>);

impl Code {
    pub fn new(symbols: Vec<Symbol>) -> Result<Self> {
        if symbols.is_empty() {
            return Err(Error::InvalidParams(String::from(
                "a code must contain at least one symbol",
            )));
        }
        Ok(Self(symbols))
    }

    /// Parse the comma-separated token form, e.g. `"A+,a-,a-"`.
    pub fn parse(text: &str) -> Result<Self> {
        let symbols = text
            .split(',')
            .map(Symbol::parse_token)
            .collect::<Result<Vec<_>>>()?;
        Code::new(symbols)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.0
    }

    pub fn negated(&self) -> Code {
        Code(self.0.iter().map(|s| s.negated()).collect())
    }

    pub fn reversed(&self) -> Code {
        Code(self.0.iter().rev().copied().collect())
    }

    /// The orbit {c, −c, Rc, −Rc} with duplicates removed, sorted. Its size
    /// is 2 or 4: no code equals its own negation.
    pub fn equivalent_set(&self) -> Vec<Code> {
        let mut set = alloc::vec![
            self.clone(),
            self.negated(),
            self.reversed(),
            self.reversed().negated(),
        ];
        set.sort();
        set.dedup();
        set
    }

    /// Lexicographically least member of the orbit.
    pub fn canonical(&self) -> Code {
        let mut best = self.clone();
        for candidate in [
            self.negated(),
            self.reversed(),
            self.reversed().negated(),
        ] {
            if candidate < best {
                best = candidate;
            }
        }
        best
    }

    pub fn is_canonical(&self) -> bool {
        *self == self.canonical()
    }

    /// Number of sign changes between adjacent symbols.
    pub fn flips(&self) -> usize {
        self.0
            .windows(2)
            .filter(|w| w[0].sign() != w[1].sign())
            .count()
    }

    /// Number of small-amplitude symbols (±a), the K of the index counts.
    pub fn small_count(&self) -> usize {
        self.0.iter().filter(|s| s.is_small()).count()
    }

    /// Signed site values ±a/±A for given roots.
    pub fn amplitudes(&self, roots: &RootPair) -> Vec<f64> {
        self.0.iter().map(|s| s.value(roots)).collect()
    }

    pub fn all_large(&self) -> bool {
        self.0.iter().all(|s| !s.is_small())
    }

    pub fn all_small(&self) -> bool {
        self.0.iter().all(|s| s.is_small())
    }

    pub fn sign_definite(&self) -> bool {
        self.flips() == 0
    }

    pub fn sign_alternating(&self) -> bool {
        self.flips() + 1 == self.len()
    }
}

impl fmt::Display for Code {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, s) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", s.token())?;
        }
        Ok(())
    }
}

/// Stacked family: a run of A₊ followed by a sign-alternating run of small
/// symbols, starting with a₊ (`Plus`) or a₋ (`Minus`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StackedVariant {
    Plus,
    Minus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StackedCode {
    pub large_run: usize,
    pub small_run: usize,
    pub variant: StackedVariant,
}

impl StackedCode {
    pub fn new(large_run: usize, small_run: usize, variant: StackedVariant) -> Result<Self> {
        if large_run + small_run == 0 {
            return Err(Error::InvalidParams(String::from(
                "a stacked code needs at least one symbol",
            )));
        }
        Ok(Self {
            large_run,
            small_run,
            variant,
        })
    }

    pub fn expand(&self) -> Code {
        let mut symbols = Vec::with_capacity(self.large_run + self.small_run);
        symbols.extend(core::iter::repeat(Symbol::LargePlus).take(self.large_run));
        let first = match self.variant {
            StackedVariant::Plus => Symbol::SmallPlus,
            StackedVariant::Minus => Symbol::SmallMinus,
        };
        let mut s = first;
        for _ in 0..self.small_run {
            symbols.push(s);
            s = s.negated();
        }
        Code(symbols)
    }
}

/// The all-A₊ word of length n.
pub fn uniform_large(n: usize) -> Result<Code> {
    StackedCode::new(n, 0, StackedVariant::Plus).map(|s| s.expand())
}

/// The alternating small word of length n starting at a₊.
pub fn uniform_small(n: usize) -> Result<Code> {
    StackedCode::new(0, n, StackedVariant::Plus).map(|s| s.expand())
}

/// All canonical representatives of length n, in lexicographic order.
/// Brute force over all 4^n words, keeping exactly those that equal their
/// own canonical form; this doubles as the ground-truth oracle for
/// [`count_irreducible`].
pub fn enumerate_irreducible(n: usize) -> Result<Vec<Code>> {
    if n == 0 {
        return Err(Error::InvalidParams(String::from("code length must be >= 1")));
    }
    if n > MAX_CODE_LEN {
        return Err(Error::InvalidParams(format!(
            "code length {n} exceeds the enumeration limit {MAX_CODE_LEN}"
        )));
    }
    let total = 4usize.pow(n as u32);
    let mut out = Vec::new();
    let mut word = alloc::vec![Symbol::SmallPlus; n];
    for index in 0..total {
        let mut rem = index;
        // Most-significant digit first keeps the stream lexicographic.
        for j in (0..n).rev() {
            word[j] = Symbol::ALL[rem & 3];
            rem >>= 2;
        }
        let code = Code(word.clone());
        if code.is_canonical() {
            out.push(code);
        }
    }
    Ok(out)
}

/// Closed-form count of irreducible codes of length n:
/// 16^k + 4^k for odd n = 2k+1, (16^k + 2·4^k)/4 for even n = 2k.
pub fn count_irreducible(n: usize) -> Result<u64> {
    if n == 0 {
        return Err(Error::InvalidParams(String::from("code length must be >= 1")));
    }
    let k = (n / 2) as u32;
    Ok(if n % 2 == 1 {
        16u64.pow(k) + 4u64.pow(k)
    } else {
        (16u64.pow(k) + 2 * 4u64.pow(k)) / 4
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;
    use alloc::vec;

    fn code(text: &str) -> Code {
        Code::parse(text).unwrap()
    }

    #[test]
    fn parse_and_display_round_trip() {
        for text in ["a+", "A-", "a+,a-,A+", "A+,A+,a-,A-"] {
            assert_eq!(code(text).to_string(), text);
        }
        assert!(Code::parse("").is_err());
        assert!(Code::parse("b+").is_err());
        assert!(Code::parse("a+,").is_err());
    }

    #[test]
    fn equivalent_set_of_single_small_site() {
        let set = code("a+").equivalent_set();
        assert_eq!(set, vec![code("a+"), code("a-")]);
    }

    #[test]
    fn equivalent_set_matches_worked_example() {
        // (a+, a-, A+) is equivalent to exactly (A+,a-,a+), (a-,a+,A-), (A-,a+,a-).
        let set = code("a+,a-,A+").equivalent_set();
        let expected = {
            let mut v = vec![
                code("a+,a-,A+"),
                code("A+,a-,a+"),
                code("a-,a+,A-"),
                code("A-,a+,a-"),
            ];
            v.sort();
            v
        };
        assert_eq!(set, expected);
    }

    #[test]
    fn equivalent_set_sizes_are_two_or_four() {
        let mut rng = crate::rng::SplitMix64::new(13);
        for _ in 0..500 {
            let n = 1 + rng.below(7);
            let syms: Vec<Symbol> = (0..n).map(|_| Symbol::ALL[rng.below(4)]).collect();
            let c = Code::new(syms).unwrap();
            let size = c.equivalent_set().len();
            assert!(size == 2 || size == 4, "orbit size {size} for {c}");
        }
    }

    #[test]
    fn canonicalize_sign_flip() {
        assert_eq!(code("a-").canonical(), code("a+"));
    }

    #[test]
    fn canonicalize_idempotent_and_orbit_constant() {
        let mut rng = crate::rng::SplitMix64::new(77);
        for _ in 0..1000 {
            let n = 1 + rng.below(8);
            let syms: Vec<Symbol> = (0..n).map(|_| Symbol::ALL[rng.below(4)]).collect();
            let c = Code::new(syms).unwrap();
            let canon = c.canonical();
            assert_eq!(canon.canonical(), canon);
            for member in c.equivalent_set() {
                assert_eq!(member.canonical(), canon);
            }
            assert!(c.equivalent_set().contains(&canon));
        }
    }

    #[test]
    fn equivalent_codes_share_canonical_form() {
        assert_eq!(
            code("A-,a+,a-").canonical(),
            code("a+,a-,A+").canonical()
        );
    }

    #[test]
    fn enumerate_small_lengths() {
        assert_eq!(enumerate_irreducible(1).unwrap(), vec![code("a+"), code("A+")]);
        assert_eq!(
            enumerate_irreducible(2).unwrap(),
            vec![
                code("a+,a+"),
                code("a+,a-"),
                code("a+,A+"),
                code("a+,A-"),
                code("A+,A+"),
                code("A+,A-"),
            ]
        );
    }

    /// Independent Burnside oracle: |fix(1)| = 4^n, |fix(−)| = 0,
    /// |fix(R)| = 4^{⌈n/2⌉}, |fix(−R)| = 0 for odd n and 4^{n/2} for even n.
    fn burnside_count(n: usize) -> u64 {
        let fix_id = 4u64.pow(n as u32);
        let fix_r = 4u64.pow(n.div_ceil(2) as u32);
        let fix_neg_r = if n % 2 == 0 { 4u64.pow((n / 2) as u32) } else { 0 };
        (fix_id + fix_r + fix_neg_r) / 4
    }

    #[test]
    fn enumeration_count_formula_and_burnside_agree() {
        for n in 1..=8 {
            let enumerated = enumerate_irreducible(n).unwrap().len() as u64;
            assert_eq!(enumerated, count_irreducible(n).unwrap(), "n={n}");
            assert_eq!(enumerated, burnside_count(n), "n={n}");
        }
    }

    #[test]
    fn count_closed_forms() {
        assert_eq!(count_irreducible(1).unwrap(), 2);
        assert_eq!(count_irreducible(2).unwrap(), 6);
        assert_eq!(count_irreducible(3).unwrap(), 20);
        assert_eq!(count_irreducible(4).unwrap(), 72);
    }

    #[test]
    fn enumerated_codes_are_well_formed() {
        for n in 1..=6 {
            let list = enumerate_irreducible(n).unwrap();
            for c in &list {
                assert_eq!(c.len(), n);
                assert!(c.is_canonical());
            }
            // Lexicographically sorted by construction.
            for pair in list.windows(2) {
                assert!(pair[0] < pair[1]);
            }
        }
    }

    #[test]
    fn expand_stacked_examples() {
        let s = StackedCode::new(2, 1, StackedVariant::Plus).unwrap();
        assert_eq!(s.expand(), code("A+,A+,a+"));
        let s = StackedCode::new(1, 2, StackedVariant::Minus).unwrap();
        assert_eq!(s.expand(), code("A+,a-,a+"));
        assert_eq!(uniform_large(3).unwrap(), code("A+,A+,A+"));
        assert_eq!(uniform_small(4).unwrap(), code("a+,a-,a+,a-"));
        assert!(StackedCode::new(0, 0, StackedVariant::Plus).is_err());
    }

    #[test]
    fn flips_examples() {
        assert_eq!(code("A+,A+,A+").flips(), 0);
        assert_eq!(code("a+,a-,a+").flips(), 2);
        assert_eq!(code("A+,a-,a-,A+").flips(), 2);
    }

    #[test]
    fn flips_invariant_under_orbit() {
        let mut rng = crate::rng::SplitMix64::new(4);
        for _ in 0..300 {
            let n = 1 + rng.below(8);
            let syms: Vec<Symbol> = (0..n).map(|_| Symbol::ALL[rng.below(4)]).collect();
            let c = Code::new(syms).unwrap();
            let f = c.flips();
            assert_eq!(c.negated().flips(), f);
            assert_eq!(c.reversed().flips(), f);
        }
    }
}
