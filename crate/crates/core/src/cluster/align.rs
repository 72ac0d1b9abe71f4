//! Nucleotide identity from a semi-global alignment.
//!
//! Scoring: match +1, mismatch 0, gap -2 per position; leading and trailing
//! gaps in either sequence are free. Among alignments with the best score the
//! one with the most identical pairs is used. Identity is identical pairs
//! divided by the length of the shorter sequence. Only A/C/G/T pairs count
//! as identical.

use crate::sequence::nucleotide_code;

const MATCH: i64 = 1;
const GAP: i64 = -2;
const NEG: i64 = i64::MIN / 4;

/// Score and identical-pair count packed so that comparing the packed value
/// compares score first and matches second.
#[inline]
fn pack(score: i64, matches: u64) -> i64 {
    (score << 32) + matches as i64
}

#[inline]
fn unpack(key: i64) -> (i64, u64) {
    let matches = key & 0xffff_ffff;
    ((key - matches) >> 32, matches as u64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct AlignmentScore {
    pub score: i64,
    pub matches: u64,
}

const MATCHES: i64 = 0xffff_ffff;

/// Best semi-global alignment of `short` against `long` restricted to
/// diagonals `j - i` in `[-band, long - short + band]`. `band = None` is the
/// full dynamic program.
pub(crate) fn align(short: &[u8], long: &[u8], band: Option<usize>) -> AlignmentScore {
    align_reaching(short, long, band, 0).expect("no early exit without a target")
}

/// As [`align`], but gives up with `None` once the optimal alignment is
/// certain to have fewer than `need` identical pairs.
///
/// Along the optimal path every prefix is itself optimal for its cell, so
/// after row `i` the final match count is at most the best count stored in
/// row `i` plus the `short.len() - i` rows still to come. Paths that ended in
/// the last column earlier are tracked in `best`.
pub(crate) fn align_reaching(
    short: &[u8],
    long: &[u8],
    band: Option<usize>,
    need: u64,
) -> Option<AlignmentScore> {
    debug_assert!(short.len() <= long.len());
    let s = short.len();
    let l = long.len();
    let band = band.unwrap_or(s + l);
    let lo = |i: usize| i.saturating_sub(band);
    let hi = |i: usize| (i + (l - s) + band).min(l);

    let mut prev = vec![NEG; l + 1];
    let mut cur = vec![NEG; l + 1];
    for cell in prev.iter_mut().take(hi(0) + 1) {
        *cell = 0;
    }
    let mut best = NEG;
    if hi(0) == l {
        best = best.max(prev[l]);
    }
    // distinct sentinels so that non-ACGT never matches anything
    let long_codes: Vec<u8> = long
        .iter()
        .map(|&b| nucleotide_code(b).unwrap_or(0xff))
        .collect();
    let hit = pack(MATCH, 1);
    let gap_cost = pack(GAP, 0);

    for i in 1..=s {
        let (a, b) = (lo(i), hi(i));
        let sc = nucleotide_code(short[i - 1]).unwrap_or(0xfe);
        if a == 0 {
            // leading overhang of the shorter sequence is free
            cur[0] = 0;
        }
        let mut row_matches = 0;
        for j in a.max(1)..=b {
            let diag = prev[j - 1] + hit * i64::from(sc == long_codes[j - 1]);
            let gap = prev[j].max(cur[j - 1]) + gap_cost;
            let v = diag.max(gap).max(NEG);
            cur[j] = v;
            row_matches = row_matches.max(v & MATCHES);
        }
        if b == l {
            best = best.max(cur[l]);
        }
        if need > 0
            && (row_matches as u64) + ((s - i) as u64) < need
            && ((best.max(0) & MATCHES) as u64) < need
        {
            return None;
        }
        std::mem::swap(&mut prev, &mut cur);
        // every cell outside the live window stays NEG
        for cell in &mut cur[lo(i - 1)..=hi(i - 1)] {
            *cell = NEG;
        }
    }
    for &cell in &prev[lo(s)..=hi(s)] {
        best = best.max(cell);
    }
    let (score, matches) = unpack(best.max(0));
    Some(AlignmentScore { score, matches })
}

fn ordered<'a>(a: &'a [u8], b: &'a [u8]) -> (&'a [u8], &'a [u8]) {
    if a.len() <= b.len() {
        (a, b)
    } else {
        (b, a)
    }
}

/// Fraction of the shorter sequence aligned to identical bases.
///
/// Returns 0 when either sequence is empty.
pub fn pairwise_identity(a: &str, b: &str) -> f64 {
    let (short, long) = ordered(a.as_bytes(), b.as_bytes());
    if short.is_empty() {
        return 0.0;
    }
    let r = align(short, long, None);
    r.matches as f64 / short.len() as f64
}

/// A/C/G/T composition used as an alignment-free upper bound on matches.
pub(crate) fn composition(seq: &[u8]) -> [u32; 4] {
    let mut c = [0u32; 4];
    for &b in seq {
        if let Some(code) = nucleotide_code(b) {
            c[code as usize] += 1;
        }
    }
    c
}

/// Band half-width for a given threshold and shorter length.
pub fn band_width(threshold: f64, shorter_len: usize) -> usize {
    ((1.0 - threshold) * shorter_len as f64).ceil().max(0.0) as usize + 8
}

/// Whether `pairwise_identity(a, b) >= threshold`, computed with the
/// composition bound and a banded alignment where they are conclusive.
///
/// Any alignment path leaving the band leaves more than `band` bases of the
/// shorter sequence unmatched, so its identity is below the threshold and its
/// score is at most `short - band - 1`. A banded result below the threshold is
/// therefore final; a banded result at or above it is final once its score
/// beats that bound, and otherwise the full alignment decides.
pub(crate) fn identity_reaches(
    a: &[u8],
    comp_a: &[u32; 4],
    b: &[u8],
    comp_b: &[u32; 4],
    threshold: f64,
) -> bool {
    let (short, long) = ordered(a, b);
    if short.is_empty() {
        return false;
    }
    let s = short.len() as f64;
    let bound: u32 = comp_a.iter().zip(comp_b).map(|(x, y)| x.min(y)).sum();
    if (bound as f64) / s < threshold {
        return false;
    }
    // smallest match count whose identity reaches the threshold
    let mut need = (threshold * s).floor() as u64;
    while (need as f64) / s < threshold {
        need += 1;
    }
    let band = band_width(threshold, short.len());
    let Some(banded) = align_reaching(short, long, Some(band), need) else {
        return false;
    };
    if (banded.matches as f64) / s < threshold {
        return false;
    }
    let out_of_band_max = short.len() as i64 - band as i64 - 1;
    if banded.score > out_of_band_max {
        return true;
    }
    align_reaching(short, long, None, need)
        .is_some_and(|full| (full.matches as f64) / s >= threshold)
}
