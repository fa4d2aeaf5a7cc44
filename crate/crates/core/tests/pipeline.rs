use hk_core::colength::{brute_colength_oracle, colength_frobenius, FrobeniusPowerIdeal, GradedQuotient};
use hk_core::hn::{hkm_syzygy, invert_plane_curve, is_valid_destabilization, syzygy_hn_from_ls, CurveContext};
use hk_core::sweep::{emit, run_sweep_with_cache, ColengthCache, EMax, OutputFormat, PrimeSet, SweepConfig};
use hk_core::{fit_quadratic_constant, parse_poly, parse_vars, ExactRational, LengthSequence, ModPoly, PrimeModulus};
use proptest::prelude::*;

const MONSKY: &str = "x^4+y^3*z+z^3*x";

fn reduce(text: &str, p: PrimeModulus) -> ModPoly {
    parse_poly(text, &parse_vars("x,y,z")).unwrap().reduce_mod_p(p)
}

fn maximal(p: PrimeModulus) -> Vec<ModPoly> {
    ["x", "y", "z"].iter().map(|v| reduce(v, p)).collect()
}

fn engine(f: &ModPoly, gens: &[ModPoly], q: u64) -> u64 {
    let ring = GradedQuotient::new(f).unwrap();
    colength_frobenius(&ring, &FrobeniusPowerIdeal::new(gens.to_vec(), q).unwrap()).unwrap()
}

#[test]
fn colengths_feed_the_fit() {
    let p = PrimeModulus::new(2).unwrap();
    let f = reduce(MONSKY, p);
    let gens = maximal(p);
    let colengths: Vec<(u32, u64)> = (1..=6).map(|e| (e, engine(&f, &gens, 2u64.pow(e)))).collect();
    assert_eq!(
        colengths.iter().map(|c| c.1).collect::<Vec<_>>(),
        vec![8, 46, 190, 772, 3088, 12352]
    );
    let fit = fit_quadratic_constant(&LengthSequence::from_colengths(p, colengths).unwrap()).unwrap();
    assert_eq!(fit.alpha, "193/64".parse::<ExactRational>().unwrap());
    assert!(fit.consistent);

    let inversion = invert_plane_curve(4, 2, &fit.alpha).unwrap();
    assert_eq!(inversion.canonical(), Some((2, 2)));
}

#[test]
fn non_maximal_ideal_matches_oracle() {
    let p = PrimeModulus::new(3).unwrap();
    let f = reduce("x^3+y^3+z^3", p);
    let gens = vec![reduce("x+y", p), reduce("y^2", p), reduce("z", p)];
    for q in [3, 9] {
        assert_eq!(engine(&f, &gens, q), brute_colength_oracle(&f, &gens, q).unwrap(), "q = {q}");
    }
}

#[test]
fn sweep_reuses_its_cache_file() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = SweepConfig::new(MONSKY, PrimeSet::List(vec![2, 5]));
    cfg.e_max = EMax::Fixed(3);
    cfg.cache_path = Some(dir.path().join("cache.jsonl"));

    let render = |cfg: &SweepConfig| {
        let mut cache = ColengthCache::open(cfg.cache_path.as_ref().unwrap()).unwrap();
        let records = run_sweep_with_cache(cfg, &mut cache).unwrap();
        let mut out = Vec::new();
        emit(&records, OutputFormat::Csv, &mut out).unwrap();
        (String::from_utf8(out).unwrap(), cache.len())
    };
    let (cold, stored) = render(&cfg);
    assert_eq!(stored, 6);
    let (warm, reloaded) = render(&cfg);
    assert_eq!(cold, warm);
    assert_eq!(reloaded, 6);

    let mut rows = csv::Reader::from_reader(cold.as_bytes());
    let colengths: Vec<String> = rows.records().map(|r| r.unwrap()[4].to_string()).collect();
    assert_eq!(colengths, ["8", "46", "190", "72", "1879", "47029"]);
}

/// Random ternary form of the given degree with small coefficients.
fn form(degree: u32) -> impl Strategy<Value = String> {
    let monomials: Vec<(u32, u32, u32)> = (0..=degree)
        .flat_map(|a| (0..=degree - a).map(move |b| (a, b, degree - a - b)))
        .collect();
    proptest::collection::vec(-3i64..=3, monomials.len()).prop_map(move |coeffs| {
        let terms: Vec<String> = coeffs
            .iter()
            .zip(&monomials)
            .filter(|(c, _)| **c != 0)
            .map(|(c, (a, b, e))| format!("({c})*x^{a}*y^{b}*z^{e}"))
            .collect();
        if terms.is_empty() {
            "0".into()
        } else {
            terms.join("+")
        }
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn engine_agrees_with_oracle(
        (degree, text) in (2u32..=4).prop_flat_map(|d| (Just(d), form(d))),
        p in prop::sample::select(vec![2u64, 3, 5, 7]),
    ) {
        let p = PrimeModulus::new(p).unwrap();
        let f = reduce(&text, p);
        prop_assume!(f.total_degree() == Some(degree));
        let gens = maximal(p);
        // the oracle's dense scan is slow past q = 9
        let qs: Vec<u64> = [p.get(), p.get() * p.get()].into_iter().filter(|&q| q <= 9).collect();
        for q in qs {
            prop_assert_eq!(engine(&f, &gens, q), brute_colength_oracle(&f, &gens, q).unwrap());
        }
    }

    #[test]
    fn inversion_recovers_destabilizations(
        d in 4u32..=7,
        p in prop::sample::select(vec![2u64, 3, 5, 7, 11]),
        l in 1u64..=28,
        s in 1u32..=3,
    ) {
        prop_assume!(is_valid_destabilization(d, p, l, s));
        let ctx = CurveContext::plane_curve(d, vec![1, 1, 1]).unwrap();
        let hkm = hkm_syzygy(&ctx, &syzygy_hn_from_ls(d, p, l, s).unwrap()).unwrap();
        let inversion = invert_plane_curve(d, p, &hkm).unwrap();
        let (l0, s0) = inversion.canonical().unwrap();
        prop_assert!(s0 <= s);
        // the canonical pair lifts back by Frobenius pullback
        prop_assert_eq!(l0 * p.pow(s - s0), l);
    }
}
