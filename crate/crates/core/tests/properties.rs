mod common;

use heavy_rmt::eigen::{full_spectrum, interlacing_check, principal_minor, top_k, weyl_check, LanczosOptions};
use heavy_rmt::ensemble::{apply_gram, gram, truncation_split};
use heavy_rmt::extremes::{inf_norm, rayleigh_lower_bound, top_entries, truncated_moment, EntryScope};
use heavy_rmt::matrix::DenseMatrix;
use heavy_rmt::points::{count_in, extract_points, ks_frechet, PointSample};
use heavy_rmt::tail::{normalizer, NormalizerKind, SlowlyVarying, Symmetry, TailLaw};
use heavy_rmt::EnsembleKind;
use proptest::prelude::*;

fn symmetric(max_n: usize) -> impl Strategy<Value = DenseMatrix> {
    (1..=max_n).prop_flat_map(|n| {
        prop::collection::vec(-1.0f64..1.0, n * (n + 1) / 2).prop_map(move |v| {
            let mut m = DenseMatrix::zeros(n, n);
            let mut it = v.into_iter();
            for i in 0..n {
                for j in i..n {
                    let x = it.next().unwrap();
                    m[(i, j)] = x;
                    m[(j, i)] = x;
                }
            }
            m
        })
    })
}

fn pair(max_n: usize) -> impl Strategy<Value = (DenseMatrix, DenseMatrix)> {
    (1..=max_n).prop_flat_map(|n| (symmetric_of(n), symmetric_of(n)))
}

fn symmetric_of(n: usize) -> impl Strategy<Value = DenseMatrix> {
    prop::collection::vec(-10.0f64..10.0, n * n).prop_map(move |v| {
        let a = DenseMatrix::from_row_major(n, n, v).unwrap();
        DenseMatrix::from_fn(n, n, |i, j| if i <= j { a[(i, j)] } else { a[(j, i)] })
    })
}

fn rect() -> impl Strategy<Value = DenseMatrix> {
    (1usize..6, 0usize..6).prop_flat_map(|(n, extra)| {
        let p = n + extra;
        prop::collection::vec(-3.0f64..3.0, n * p).prop_map(move |v| DenseMatrix::from_row_major(n, p, v).unwrap())
    })
}

proptest! {
    #[test]
    fn dense_matches_characteristic_polynomial(m in symmetric(5)) {
        let oracle = common::eigen_oracle(&m);
        let got = full_spectrum(&m).unwrap().values;
        let rho = oracle.iter().fold(0.0f64, |r, x| r.max(x.abs())).max(f64::MIN_POSITIVE);
        for (a, b) in got.iter().zip(&oracle) {
            prop_assert!((a - b).abs() / rho <= 1e-8, "{got:?} vs {oracle:?}");
        }
    }

    #[test]
    fn scaling_equivariance(m in symmetric(8), c in 0.1f64..50.0) {
        let a = full_spectrum(&m).unwrap().values;
        let b = full_spectrum(&m.scaled(c)).unwrap().values;
        let scale = a.iter().fold(0.0f64, |s, x| s.max(x.abs()));
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((c * x - y).abs() <= 1e-12 * c * scale);
        }
    }

    #[test]
    fn interlacing_holds(m in symmetric(9), pick in 0usize..9) {
        let idx = pick % m.rows();
        prop_assume!(m.rows() >= 2);
        let parent = full_spectrum(&m).unwrap();
        let minor = full_spectrum(&principal_minor(&m, idx).unwrap()).unwrap();
        let r = interlacing_check(&parent, &minor, 1e-8).unwrap();
        prop_assert!(r.holds, "{r:?}");
    }

    #[test]
    fn weyl_holds((b, c) in pair(8)) {
        let sum = b.add(&c).unwrap();
        let r = weyl_check(
            &full_spectrum(&b).unwrap(),
            &full_spectrum(&c).unwrap(),
            &full_spectrum(&sum).unwrap(),
            1e-8,
        ).unwrap();
        prop_assert!(r.holds, "{r:?}");
    }

    #[test]
    fn rayleigh_and_inf_norm_sandwich(m in symmetric(8)) {
        let stats = top_entries(&m, EntryScope::UpperTriangleWithDiagonal, 1).unwrap();
        let lambda = full_spectrum(&m).unwrap().values[0];
        let scale = m.max_abs() * m.rows() as f64;
        prop_assert!(rayleigh_lower_bound(&m, &stats).unwrap() <= lambda + 1e-8 * scale);
        prop_assert!(lambda <= inf_norm(&m) + 1e-8 * scale);
    }

    #[test]
    fn top_entries_equal_full_sort(m in symmetric(7), count in 0usize..28) {
        let n = m.rows();
        let mut all: Vec<(f64, usize, usize)> = Vec::new();
        for i in 0..n {
            for j in i..n {
                all.push((m[(i, j)].abs(), i, j));
            }
        }
        all.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
        let count = count.min(all.len());
        let got = top_entries(&m, EntryScope::UpperTriangleWithDiagonal, count).unwrap();
        let got: Vec<_> = got.top.iter().map(|e| (e.abs_value, e.row, e.col)).collect();
        prop_assert_eq!(got, all[..count].to_vec());
    }

    #[test]
    fn gram_application_agrees(a in rect(), seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let v: Vec<f64> = (0..a.rows()).map(|_| rand::Rng::random_range(&mut rng, -1.0..1.0)).collect();
        let dense = gram(&a).matvec(&v).unwrap();
        let free = apply_gram(&a, &v).unwrap();
        let scale = dense.iter().fold(1e-300f64, |s, x| s.max(x.abs()));
        for (x, y) in dense.iter().zip(&free) {
            prop_assert!((x - y).abs() <= 1e-12 * scale);
        }
        prop_assert!(gram(&a).is_symmetric());
    }

    #[test]
    fn truncation_partition_is_exact(m in symmetric(8), beta in 0.0f64..2.0) {
        let n = m.rows();
        let scaled = m.scaled(40.0);
        let s = truncation_split(&scaled, beta, n);
        let back = s.low_part.add(&s.high_part).unwrap();
        prop_assert_eq!(back.as_slice(), scaled.as_slice());
        for (&lo, &hi) in s.low_part.as_slice().iter().zip(s.high_part.as_slice()) {
            prop_assert!(lo.abs() <= s.threshold);
            prop_assert!(hi == 0.0 || hi.abs() > s.threshold);
        }
    }

    #[test]
    fn counts_are_additive(atoms in prop::collection::vec(0.01f64..10.0, 0..30), a in 0.01f64..3.0, d1 in 0.01f64..3.0, d2 in 0.01f64..3.0) {
        let mut atoms = atoms;
        atoms.sort_by(|x, y| y.total_cmp(x));
        let s = PointSample { atoms, normalizer_used: 1.0, kind: EnsembleKind::Wigner };
        let (b, c) = (a + d1, a + d1 + d2);
        prop_assert_eq!(count_in(&s, a, b).unwrap() + count_in(&s, b, c).unwrap(), count_in(&s, a, c).unwrap());
        prop_assert_eq!(count_in(&s, a, b).unwrap() + count_in(&s, b, f64::INFINITY).unwrap(), count_in(&s, a, f64::INFINITY).unwrap());
    }

    #[test]
    fn ks_is_order_invariant(mut xs in prop::collection::vec(0.01f64..20.0, 1..40), alpha in 0.3f64..3.0) {
        let d = ks_frechet(&xs, alpha).unwrap();
        xs.reverse();
        prop_assert_eq!(ks_frechet(&xs, alpha).unwrap(), d);
        let oracle = common::ks_distance(&xs, |x| (-x.powf(-alpha)).exp());
        prop_assert!((d - oracle).abs() <= 1e-15);
    }

    #[test]
    fn normalization_is_scale_consistent(m in symmetric(6), c in 0.5f64..100.0) {
        let law = TailLaw::symmetric_pareto(1.0).unwrap();
        let norm = normalizer(&law, NormalizerKind::WignerBn, m.rows(), None).unwrap();
        let mut scaled_norm = norm;
        scaled_norm.value *= c;
        let a = extract_points(&full_spectrum(&m).unwrap(), &norm, EnsembleKind::Wigner).unwrap();
        let b = extract_points(&full_spectrum(&m.scaled(c)).unwrap(), &scaled_norm, EnsembleKind::Wigner).unwrap();
        prop_assert_eq!(a.atoms.len(), b.atoms.len());
        let scale = a.atoms.first().copied().unwrap_or(0.0);
        for (x, y) in a.atoms.iter().zip(&b.atoms) {
            prop_assert!((x - y).abs() <= 1e-12 * scale);
        }
    }

    #[test]
    fn quantile_is_monotone_and_round_trips(alpha in 0.2f64..6.0, kappa in 0.0f64..2.0, q1 in 1e-9f64..1.0, q2 in 1e-9f64..1.0) {
        let unit = TailLaw::new(alpha, SlowlyVarying::Unit, Symmetry::Symmetric).unwrap();
        let log = TailLaw::new(alpha, SlowlyVarying::LogPower { kappa }, Symmetry::Symmetric).unwrap();
        let (lo, hi) = if q1 <= q2 { (q1, q2) } else { (q2, q1) };
        for law in [unit, log] {
            let x_lo = law.quantile_tail(lo).unwrap();
            let x_hi = law.quantile_tail(hi).unwrap();
            prop_assert!(x_lo >= x_hi);
            prop_assert!(law.survival(x_lo).unwrap() <= lo);
            prop_assert!(law.survival(x_hi).unwrap() >= law.survival(x_lo).unwrap());
        }
        let x = unit.quantile_tail(lo).unwrap();
        prop_assert!((unit.survival(x).unwrap() - lo).abs() <= 1e-12 * lo);
    }

    #[test]
    fn truncated_moment_shape(alpha in 0.5f64..3.5, order in prop::sample::select(vec![2u32, 4, 6, 8])) {
        // Below alpha the moment converges; the growth bound concerns order > alpha.
        prop_assume!(order as f64 > alpha + 0.05);
        let law = TailLaw::symmetric_pareto(alpha).unwrap();
        let ratio = |t: f64| truncated_moment(&law, t, order).unwrap() / t.powf(order as f64 - alpha);
        let c = alpha / (order as f64 - alpha);
        for t in [10.0, 100.0, 1000.0] {
            let r = ratio(t);
            prop_assert!(r > 0.0 && r <= c + 1.0, "t = {t}, ratio {r}, bound {c}");
        }
    }
}

#[test]
fn lanczos_matches_dense() {
    let mut rng = common::rng(2024);
    for trial in 0..40 {
        let n = 3 + (trial * 37) % 198;
        let m = if trial % 2 == 0 {
            common::random_symmetric(&mut rng, n)
        } else {
            common::random_heavy_symmetric(&mut rng, n)
        };
        let dense = full_spectrum(&m).unwrap().values;
        let opts = LanczosOptions {
            start_seed: trial as u64,
            max_iter: n,
            ..LanczosOptions::default()
        };
        let it = top_k(&m, 3, &opts).unwrap().values;
        let scale = dense[0].abs().max(dense[n - 1].abs());
        for (a, b) in it.iter().zip(&dense) {
            assert!((a - b).abs() <= 1e-8 * scale, "n = {n}: {a} vs {b}");
        }
    }
}

#[test]
fn dense_identities_on_heavy_samples() {
    let mut rng = common::rng(77);
    for n in [1, 2, 5, 30, 120] {
        let m = common::random_heavy_symmetric(&mut rng, n);
        let s = full_spectrum(&m).unwrap();
        let tr = m.trace();
        let fro = m.frobenius_sq();
        let sum: f64 = s.values.iter().sum();
        let sq: f64 = s.values.iter().map(|x| x * x).sum();
        assert!((sum - tr).abs() <= 1e-10 * tr.abs().max(1.0), "trace at n = {n}: {sum} vs {tr}");
        assert!((sq - fro).abs() <= 1e-8 * fro.max(1.0), "frobenius at n = {n}");
        assert!(s.values.windows(2).all(|w| w[0] >= w[1]));
    }
}
