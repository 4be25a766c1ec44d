use fixscan_core::analysis::{cesaro_refine, lemat_deviation, planar_cesaro_residuals, OrthoSystem};
use fixscan_core::geometry::PointN;
use fixscan_core::seed::test_seed;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

const DIM: usize = 128;

fn basis(i: usize, scale: f64) -> Vec<f64> {
    let mut v = vec![0.0; DIM];
    v[i] = scale;
    v
}

fn noise(rng: &mut StdRng, eta: f64) -> Vec<f64> {
    let v: Vec<f64> = (0..DIM).map(|_| rng.random_range(-1.0..1.0)).collect();
    let n = v.iter().map(|c| c * c).sum::<f64>().sqrt();
    v.into_iter().map(|c| eta * c / n).collect()
}

fn add(a: &[f64], b: &[f64]) -> PointN {
    PointN::new(a.iter().zip(b).map(|(x, y)| x + y).collect()).unwrap()
}

/// Random orthogonal matrix from Gram-Schmidt on random rows.
fn rotation(rng: &mut StdRng) -> Vec<Vec<f64>> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    while rows.len() < DIM {
        let mut v: Vec<f64> = (0..DIM).map(|_| rng.random_range(-1.0..1.0)).collect();
        for _ in 0..2 {
            for r in &rows {
                let d: f64 = v.iter().zip(r).map(|(a, b)| a * b).sum();
                v.iter_mut().zip(r).for_each(|(a, b)| *a -= d * b);
            }
        }
        let n = v.iter().map(|c| c * c).sum::<f64>().sqrt();
        if n > 1e-3 {
            rows.push(v.into_iter().map(|c| c / n).collect());
        }
    }
    rows
}

fn rotate(q: &[Vec<f64>], p: &PointN) -> PointN {
    PointN::new(q.iter().map(|r| r.iter().zip(p.coords()).map(|(a, b)| a * b).sum()).collect()).unwrap()
}

#[test]
fn orthonormal_mean_identity() {
    let x0 = PointN::zeros(DIM);
    for m in 1..=64 {
        for lambda in [0.3, 1.0, 7.5] {
            let pts: Vec<PointN> = (0..m).map(|i| PointN::new(basis(i, lambda)).unwrap()).collect();
            let r = cesaro_refine(|p| Ok(p.clone()), &pts, &x0).unwrap();
            assert!((r.dist - lambda / (m as f64).sqrt()).abs() <= 1e-12, "M = {m}");
        }
    }
}

#[test]
fn deviation_is_rotation_invariant() {
    let mut rng = StdRng::seed_from_u64(test_seed());
    let q = rotation(&mut rng);
    let m = 10;
    let ys: Vec<PointN> = (0..m).map(|i| rotate(&q, &PointN::new(basis(i, 1.0)).unwrap())).collect();
    let y = PointN::mean(&ys).unwrap();
    let sys = OrthoSystem::new(ys, y).unwrap();
    assert!(sys.hypothesis_defect() <= 1e-12);
    assert!(lemat_deviation(&sys) <= 1e-12);
}

#[test]
fn deviation_shrinks_with_defect() {
    let mut rng = StdRng::seed_from_u64(test_seed() ^ 0x1e3a);
    let m = 8;
    let mut means = Vec::new();
    for eta in [1e-1, 1e-2, 1e-3] {
        let mut total = 0.0;
        for _ in 0..100 {
            let ys: Vec<PointN> = (0..m).map(|i| add(&basis(i, 1.0), &noise(&mut rng, eta))).collect();
            let exact: Vec<f64> = (0..DIM).map(|j| if j < m { 1.0 / m as f64 } else { 0.0 }).collect();
            let y = add(&exact, &noise(&mut rng, eta));
            let sys = OrthoSystem::new(ys, y).unwrap();
            assert!(sys.hypothesis_defect() <= 3.0 * eta);
            total += lemat_deviation(&sys);
        }
        means.push(total / 100.0);
    }
    assert!(means[0] > means[1] && means[1] > means[2], "{means:?}");
    assert!(means[2] <= 2e-3);
}

#[test]
fn planar_cesaro_residual_decreases() {
    let rs = planar_cesaro_residuals(0.5, 0.1, 1.0, &[4, 8, 16, 32, 64]).unwrap();
    for w in rs.windows(2) {
        assert!(w[1].1 <= 1.1 * w[0].1, "{rs:?}");
    }
    assert!(rs[4].1 < rs[0].1);
}
