//! Exact rational rates, rate splitting, and the uplink sub-block schedule.

use num_integer::Integer;
use num_rational::Rational64;

use super::SimError;

/// Parses `"0.3"`, `"3/10"` or `"1"` into an exact rational.
pub fn parse_rate(s: &str) -> Result<Rational64, SimError> {
    let t = s.trim();
    let bad = || SimError::InvalidRate(s.to_string());
    let r = if let Some((num, den)) = t.split_once('/') {
        let num: i64 = num.trim().parse().map_err(|_| bad())?;
        let den: i64 = den.trim().parse().map_err(|_| bad())?;
        if den == 0 {
            return Err(bad());
        }
        Rational64::new(num, den)
    } else {
        let (neg, body) = match t.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, t),
        };
        let (whole, frac) = body.split_once('.').unwrap_or((body, ""));
        if whole.is_empty() && frac.is_empty()
            || !whole.chars().chain(frac.chars()).all(|c| c.is_ascii_digit())
            || frac.len() > 18
        {
            return Err(bad());
        }
        let digits = format!("{whole}{frac}");
        let num: i64 = digits.parse().map_err(|_| bad())?;
        let r = Rational64::new(num, 10i64.pow(frac.len() as u32));
        if neg {
            -r
        } else {
            r
        }
    };
    if r < Rational64::from_integer(0) {
        return Err(SimError::NegativeRate(s.to_string()));
    }
    Ok(r)
}

/// `"3/10"`, or `"1"` for integers.
pub fn format_rate(r: &Rational64) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Per-user rates in bits per channel use, split into a common part `R_min`
/// and an excess `R_i′ = R_i − R_min`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RateAllocation {
    rates: Vec<Rational64>,
}

impl RateAllocation {
    pub fn new(rates: Vec<Rational64>) -> Result<Self, SimError> {
        if rates.len() < 2 {
            return Err(SimError::TooFewUsers(rates.len()));
        }
        if let Some(r) = rates.iter().find(|r| **r < Rational64::from_integer(0)) {
            return Err(SimError::NegativeRate(format_rate(r)));
        }
        Ok(RateAllocation { rates })
    }

    pub fn parse(rates: &[&str]) -> Result<Self, SimError> {
        RateAllocation::new(rates.iter().map(|s| parse_rate(s)).collect::<Result<_, _>>()?)
    }

    /// The same rate for every user.
    pub fn common(rate: Rational64, users: usize) -> Result<Self, SimError> {
        RateAllocation::new(vec![rate; users])
    }

    pub fn rates(&self) -> &[Rational64] {
        &self.rates
    }

    pub fn num_users(&self) -> usize {
        self.rates.len()
    }

    pub fn sum(&self) -> Rational64 {
        self.rates.iter().sum()
    }

    pub fn r_min(&self) -> Rational64 {
        *self.rates.iter().min().expect("at least two users")
    }

    /// `R_i′ = R_i − R_min`.
    pub fn excess(&self, user: usize) -> Rational64 {
        self.rates[user] - self.r_min()
    }

    /// Users with a positive excess, in increasing order.
    pub fn active(&self) -> Vec<usize> {
        (0..self.rates.len()).filter(|&i| self.excess(i) > Rational64::from_integer(0)).collect()
    }

    /// `R_min^c`: the sum of all rates except one minimal one.
    pub fn r_min_c(&self) -> Rational64 {
        self.sum() - self.r_min()
    }

    /// `R_i^c`: the sum of all rates except user `i`'s.
    pub fn r_c(&self, user: usize) -> Rational64 {
        self.sum() - self.rates[user]
    }

    pub fn is_common(&self) -> bool {
        self.active().is_empty()
    }

    /// Bits carried by each common part: `⌊n R_min⌋`.
    pub fn common_bits(&self, n: u64) -> u64 {
        floor_bits(n, self.r_min())
    }

    /// Bits carried by user `user`'s excess part: `⌊n R_i′⌋`.
    pub fn excess_bits(&self, user: usize, n: u64) -> u64 {
        floor_bits(n, self.excess(user))
    }

    /// Bits carried by the whole message of user `user`: `⌊n R_i⌋`.
    pub fn bits(&self, user: usize, n: u64) -> u64 {
        floor_bits(n, self.rates[user])
    }

    /// Display form `r1;r2;...` with exact rationals.
    pub fn tuple_string(&self) -> String {
        self.rates.iter().map(format_rate).collect::<Vec<_>>().join(";")
    }
}

fn floor_bits(n: u64, r: Rational64) -> u64 {
    (Rational64::from_integer(n as i64) * r).floor().to_integer() as u64
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BlockKind {
    /// Users `l` and `l + 1` transmit their common parts.
    Pair(usize),
    /// User `d` transmits its excess part alone.
    Solo(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SubBlock {
    pub kind: BlockKind,
    pub start: usize,
    pub len: usize,
}

/// `L − 1` pair blocks followed by one solo block per active user.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubblockSchedule {
    pub n: usize,
    pub blocks: Vec<SubBlock>,
}

impl SubblockSchedule {
    pub fn pair_blocks(&self) -> impl Iterator<Item = &SubBlock> {
        self.blocks.iter().filter(|b| matches!(b.kind, BlockKind::Pair(_)))
    }

    pub fn solo_blocks(&self) -> impl Iterator<Item = &SubBlock> {
        self.blocks.iter().filter(|b| matches!(b.kind, BlockKind::Solo(_)))
    }

    pub fn total(&self) -> usize {
        self.blocks.iter().map(|b| b.len).sum()
    }
}

/// Smallest `n₀` such that exactly the multiples of `n₀` give integral
/// sub-block lengths.
pub fn minimal_blocklength(rates: &RateAllocation) -> Result<u64, SimError> {
    let total = rates.r_min_c();
    if total == Rational64::from_integer(0) {
        return Err(SimError::ZeroRates);
    }
    let fractions = std::iter::once(rates.r_min()).chain(rates.active().into_iter().map(|d| rates.excess(d)));
    Ok(fractions.fold(1i64, |acc, r| acc.lcm((r / total).denom())) as u64)
}

/// Lays out the uplink: pair block `l` has length `n R_min / R_min^c` and
/// the solo block of active user `d` has length `n R_d′ / R_min^c`. Pair
/// blocks have length zero when `R_min = 0`.
pub fn build_schedule(rates: &RateAllocation, n: u64) -> Result<SubblockSchedule, SimError> {
    let minimal = minimal_blocklength(rates)?;
    if n == 0 || !n.is_multiple_of(minimal) {
        return Err(SimError::IndivisibleBlocklength { n, minimal });
    }
    let total = rates.r_min_c();
    let len_of = |r: Rational64| (Rational64::from_integer(n as i64) * r / total).to_integer() as usize;
    let pair_len = len_of(rates.r_min());
    let mut blocks = Vec::new();
    let mut start = 0;
    for l in 0..rates.num_users() - 1 {
        blocks.push(SubBlock { kind: BlockKind::Pair(l), start, len: pair_len });
        start += pair_len;
    }
    for d in rates.active() {
        let len = len_of(rates.excess(d));
        blocks.push(SubBlock { kind: BlockKind::Solo(d), start, len });
        start += len;
    }
    debug_assert_eq!(start as u64, n);
    Ok(SubblockSchedule { n: n as usize, blocks })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> Rational64 {
        Rational64::new(n, d)
    }

    #[test]
    fn parsing() {
        assert_eq!(parse_rate("0.3").unwrap(), r(3, 10));
        assert_eq!(parse_rate("1/4").unwrap(), r(1, 4));
        assert_eq!(parse_rate(" 1 ").unwrap(), r(1, 1));
        assert_eq!(parse_rate(".5").unwrap(), r(1, 2));
        assert_eq!(parse_rate("0").unwrap(), r(0, 1));
        assert_eq!(parse_rate("-0.1"), Err(SimError::NegativeRate("-0.1".into())));
        for bad in ["", "abc", "1/0", "0.3.1", "1e-3", "."] {
            assert!(matches!(parse_rate(bad), Err(SimError::InvalidRate(_))), "{bad}");
        }
        assert_eq!(format_rate(&r(3, 10)), "3/10");
        assert_eq!(format_rate(&r(2, 1)), "2");
    }

    #[test]
    fn derived_quantities() {
        let a = RateAllocation::parse(&["1/4", "1/4", "1/2"]).unwrap();
        assert_eq!(a.r_min(), r(1, 4));
        assert_eq!(a.r_min_c(), r(3, 4));
        assert_eq!(a.r_c(2), r(1, 2));
        assert_eq!(a.active(), vec![2]);
        assert_eq!(a.excess(0), r(0, 1));
        assert_eq!(a.excess(2), r(1, 4));
        assert!(!a.is_common());
        assert_eq!(a.tuple_string(), "1/4;1/4;1/2");
        assert_eq!(a.common_bits(64), 16);
        let c = RateAllocation::parse(&["0.3", "0.3"]).unwrap();
        assert_eq!(c.common_bits(64), 19);
        assert!(c.is_common());
    }

    #[test]
    fn schedule_examples() {
        let a = RateAllocation::parse(&["1/4", "1/4", "1/2"]).unwrap();
        let s = build_schedule(&a, 12).unwrap();
        let lens: Vec<usize> = s.blocks.iter().map(|b| b.len).collect();
        assert_eq!(lens, vec![4, 4, 4]);
        assert_eq!(s.blocks[2].kind, BlockKind::Solo(2));
        assert_eq!(s.total(), 12);

        let c = RateAllocation::parse(&["0.2", "0.2", "0.2", "0.2"]).unwrap();
        let s = build_schedule(&c, 9).unwrap();
        assert_eq!(s.blocks.len(), 3);
        assert!(s.blocks.iter().all(|b| b.len == 3 && matches!(b.kind, BlockKind::Pair(_))));

        let two = RateAllocation::parse(&["1/2", "1/2"]).unwrap();
        let s = build_schedule(&two, 4).unwrap();
        assert_eq!(s.blocks, vec![SubBlock { kind: BlockKind::Pair(0), start: 0, len: 4 }]);
    }

    #[test]
    fn indivisible_blocklengths_report_the_minimum() {
        let a = RateAllocation::parse(&["1/4", "1/4", "1/2"]).unwrap();
        assert_eq!(build_schedule(&a, 10), Err(SimError::IndivisibleBlocklength { n: 10, minimal: 3 }));
        let b = RateAllocation::parse(&["0.1", "0.4"]).unwrap();
        // R_min^c = 0.4: pair 1/4, solo 3/4.
        assert_eq!(minimal_blocklength(&b).unwrap(), 4);
        let z = RateAllocation::parse(&["0", "0"]).unwrap();
        assert_eq!(build_schedule(&z, 4), Err(SimError::ZeroRates));
    }

    #[test]
    fn zero_minimum_gives_empty_pair_blocks() {
        let a = RateAllocation::parse(&["0", "1/3", "2/3"]).unwrap();
        let s = build_schedule(&a, 3).unwrap();
        let lens: Vec<usize> = s.blocks.iter().map(|b| b.len).collect();
        assert_eq!(lens, vec![0, 0, 1, 2]);
    }
}
