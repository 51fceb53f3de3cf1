//! Cross-module invariants: refinement consistency of the integration
//! pairing, bilinearity of convolution, unitarization idempotence, duality
//! contravariance through transposed intertwiners, the factorization
//! cocycle identities, and the permutation-component split of the
//! canonical K^- S representatives.

use std::collections::BTreeMap;
use std::sync::Arc;

use num::bigint::{BigInt, BigUint};
use rand::Rng;

use iwasawa_core::catalog;
use iwasawa_core::function::{integrate, level_pairing_matrix, LCFunction};
use iwasawa_core::gln::{decompose_bks, p1p2};
use iwasawa_core::induction::{classical_induced_rep, classical_intertwiner, induce_functions};
use iwasawa_core::matrix::{lattice_eq, PadicMatrix};
use iwasawa_core::measure::Measure;
use iwasawa_core::padic::PadicNumber;
use iwasawa_core::selftest::seeded_rng;
use iwasawa_core::tower::QuotientTower;

fn int(n: i64, p: u64, prec: u32) -> PadicNumber {
    PadicNumber::from_integer(n, p, prec).unwrap()
}

fn q(n: i64, d: i64, p: u64, prec: u32) -> PadicNumber {
    PadicNumber::from_rational(&BigInt::from(n), &BigInt::from(d), p, prec).unwrap()
}

fn rand_measure(
    rng: &mut rand_chacha::ChaCha8Rng,
    tower: &Arc<QuotientTower>,
    level: u32,
    p: u64,
    prec: u32,
) -> Measure {
    let n = tower.element_count(level).unwrap();
    let mut coeffs = BTreeMap::new();
    for _ in 0..4 {
        coeffs.insert(rng.gen_range(0..n), BigUint::from(rng.gen_range(0u64..200)));
    }
    Measure::from_coeffs(tower.clone(), level, p, prec, coeffs).unwrap()
}

#[test]
fn integration_refinement_consistency() {
    // Pairing a coarse function with a fine measure agrees with pairing
    // the pulled-back function at the fine level.
    let p = 3;
    let prec = 16;
    let t = QuotientTower::zp_additive(p).unwrap();
    let mut rng = seeded_rng(41);
    for _ in 0..100 {
        let mut coarse_vals = BTreeMap::new();
        for g in 0..3usize {
            coarse_vals.insert(g, q(rng.gen_range(-20..20), rng.gen_range(1..5), p, prec));
        }
        let f = LCFunction::from_values(t.clone(), 1, p, coarse_vals).unwrap();
        let mu = rand_measure(&mut rng, &t, 3, p, prec);
        let direct = integrate(&f, &mu).unwrap();
        let mut fine_vals = BTreeMap::new();
        for g in 0..27usize {
            fine_vals.insert(g, f.value(t.project(3, 1, g).unwrap()));
        }
        let f_fine = LCFunction::from_values(t.clone(), 3, p, fine_vals).unwrap();
        let refined = integrate(&f_fine, &mu).unwrap();
        assert!(direct.agrees(&refined));
    }
}

#[test]
fn convolution_bilinear() {
    let p = 5;
    let prec = 12;
    let t = catalog::dihedral_4();
    let mut rng = seeded_rng(42);
    for _ in 0..200 {
        let a = rand_measure(&mut rng, &t, 0, p, prec);
        let b = rand_measure(&mut rng, &t, 0, p, prec);
        let c = rand_measure(&mut rng, &t, 0, p, prec);
        let left = a.add(&b).unwrap().convolve(&c).unwrap();
        let right = a.convolve(&c).unwrap().add(&b.convolve(&c).unwrap()).unwrap();
        assert_eq!(left, right);
        let left = c.convolve(&a.add(&b).unwrap()).unwrap();
        let right = c.convolve(&a).unwrap().add(&c.convolve(&b).unwrap()).unwrap();
        assert_eq!(left, right);
        let s = int(rng.gen_range(0..100), p, prec);
        let left = a.scale(&s).unwrap().convolve(&b).unwrap();
        let right = a.convolve(&b).unwrap().scale(&s).unwrap();
        assert_eq!(left, right);
    }
}

#[test]
fn convolution_matches_fiberwise_double_sum() {
    // Independent route: the coefficient of c in mu * nu is the sum of
    // mu(a) nu(b) over the full multiplication preimage {(a, b) : ab = c},
    // enumerated over the whole level rather than scattered over supports.
    let prec = 10;
    let mut rng = seeded_rng(45);
    for (tower, level, p) in [
        (QuotientTower::zp_additive(3).unwrap(), 2u32, 3u64),
        (catalog::symmetric_3(), 0, 7),
    ] {
        let n = tower.element_count(level).unwrap();
        for _ in 0..25 {
            let mu = rand_measure(&mut rng, &tower, level, p, prec);
            let nu = rand_measure(&mut rng, &tower, level, p, prec);
            let conv = mu.convolve(&nu).unwrap();
            for c in 0..n {
                let mut acc = num::bigint::BigUint::from(0u32);
                for a in 0..n {
                    for b in 0..n {
                        if tower.mul(level, a, b).unwrap() == c {
                            acc += mu.coeff(a) * nu.coeff(b);
                        }
                    }
                }
                let modulus = num::bigint::BigUint::from(p).pow(prec);
                assert_eq!(conv.coeff(c), acc % modulus);
            }
        }
    }
}

#[test]
fn integration_commutes_with_measure_projection() {
    // pairing a coarse function against a fine measure equals pairing it
    // against the projected measure
    let p = 3;
    let prec = 14;
    let t = QuotientTower::zp_additive(p).unwrap();
    let mut rng = seeded_rng(46);
    for _ in 0..60 {
        let mut vals = BTreeMap::new();
        for g in 0..3usize {
            vals.insert(g, q(rng.gen_range(-9..9), rng.gen_range(1..4), p, prec));
        }
        let f = LCFunction::from_values(t.clone(), 1, p, vals).unwrap();
        let mu = rand_measure(&mut rng, &t, 3, p, prec);
        let fine = integrate(&f, &mu).unwrap();
        let coarse = integrate(&f, &mu.project(1).unwrap()).unwrap();
        assert!(fine.agrees(&coarse));
    }
}

#[test]
fn level_pairing_perfect_on_matrix_towers() {
    let t = QuotientTower::gl_zp(2, 2).unwrap();
    let m = level_pairing_matrix(&t, 1, 2, 12).unwrap();
    assert!(m.is_identity_at_prec());
}

#[test]
fn unitarize_idempotent() {
    for rep in [
        catalog::shear_rep_z2(5, 24).unwrap(),
        catalog::skew_standard_rep_s3(5, 24).unwrap(),
        catalog::standard_rep_d4(3, 24).unwrap(),
    ] {
        let (once, _, _) = rep.unitarize().unwrap();
        let (twice, r1, r2) = once.unitarize().unwrap();
        assert!(lattice_eq(once.lattice(), twice.lattice()).unwrap());
        assert_eq!(r1, r2);
    }
}

#[test]
fn duality_contravariant_on_intertwiners() {
    // If T intertwines the tensor model into the function model, its
    // transpose intertwines the dual representations the other way.
    let p = 7;
    let prec = 16;
    let s3 = catalog::symmetric_3();
    let a3 = catalog::subgroup_a3(&s3).unwrap();
    let chars = catalog::characters(a3.tower(), 0, p, prec).unwrap();
    for base in &chars {
        let ind = induce_functions(&a3, base).unwrap();
        let tensor = classical_induced_rep(&a3, base).unwrap();
        let t = classical_intertwiner(&a3, base, &ind).unwrap();
        let tt = t.transpose();
        let dual_fun = ind.rep.dual().unwrap();
        let dual_tensor = tensor.dual().unwrap();
        for g in 0..6 {
            let lhs = tt.mul(dual_fun.act(g)).unwrap();
            let rhs = dual_tensor.act(g).mul(&tt).unwrap();
            assert!(lhs.agrees(&rhs));
        }
    }
}

fn rand_invertible(rng: &mut rand_chacha::ChaCha8Rng, p: u64, n: usize, prec: u32) -> PadicMatrix {
    loop {
        let m = PadicMatrix::from_fn(p, n, n, |_, _| {
            let v = rng.gen_range(-2i64..=2);
            let u = loop {
                let u = rng.gen_range(1..(p.pow(3) as i64));
                if u % p as i64 != 0 {
                    break u;
                }
            };
            int(u, p, prec).shift(v)
        });
        if m.det_valuation().is_ok() {
            return m;
        }
    }
}

#[test]
fn factorization_cocycle_identities() {
    // p2(p2(k g2^-1) g1^-1) = p2(k g2^-1 g1^-1), and the matching product
    // rule for p1, forced by uniqueness of the factorization.
    let prec = 24;
    let mut rng = seeded_rng(43);
    for p in [2u64, 3, 5] {
        for n in [2usize, 3] {
            let mut done = 0;
            while done < 30 {
                let g1 = rand_invertible(&mut rng, p, n, prec);
                let g2 = rand_invertible(&mut rng, p, n, prec);
                let k = {
                    let g = rand_invertible(&mut rng, p, n, prec);
                    match p1p2(&g) {
                        Ok((_, k)) => k,
                        Err(_) => continue,
                    }
                };
                let step = (|| -> iwasawa_core::Result<bool> {
                    let kg2 = k.mul(&g2.inverse()?)?;
                    let (h2, k2) = p1p2(&kg2)?;
                    let kg2g1 = kg2.mul(&g1.inverse()?)?;
                    let (h12, k12) = p1p2(&kg2g1)?;
                    let (h1, k1) = p1p2(&k2.mul(&g1.inverse()?)?)?;
                    Ok(k1.agrees(&k12) && h2.mul(&h1)?.agrees(&h12))
                })();
                match step {
                    Ok(true) => done += 1,
                    Ok(false) => panic!("cocycle identity fails at p={p}, n={n}"),
                    Err(iwasawa_core::Error::PrecisionExhausted(_)) => continue,
                    Err(e) => panic!("unexpected error: {e}"),
                }
            }
        }
    }
}

#[test]
fn ks_carrier_splits_by_permutation_component() {
    // The canonical K^- S representatives carry a well-defined permutation
    // coordinate, and the depth-positive part of the Borel subgroup
    // (unit diagonal norms, sub-unit off-diagonal) acts within each
    // component.
    let prec = 24;
    let mut rng = seeded_rng(44);
    for p in [3u64, 5] {
        let mut seen_identity = 0usize;
        let mut seen_swap = 0usize;
        let mut done = 0usize;
        while done < 60 {
            let g = rand_invertible(&mut rng, p, 2, prec);
            let k = match p1p2(&g) {
                Ok((_, k)) => k,
                Err(_) => continue,
            };
            let d = decompose_bks(&k).unwrap();
            assert!(d.b.is_identity_at_prec());
            match d.perm.as_slice() {
                [0, 1] => seen_identity += 1,
                [1, 0] => seen_swap += 1,
                other => panic!("unexpected permutation {other:?}"),
            }
            // congruence-depth Borel element: unit diagonal, off-diagonal
            // entry in p Z_p
            let b = PadicMatrix::from_fn(p, 2, 2, |r, c| match (r, c) {
                (0, 0) | (1, 1) => int(1 + p as i64 * rng.gen_range(0..4), p, prec),
                (0, 1) => int(rng.gen_range(0..4), p, prec).shift(1),
                _ => PadicNumber::zero(p),
            });
            let kb = match k.mul(&b.inverse().unwrap()) {
                Ok(m) => m,
                Err(_) => continue,
            };
            let (_, k_next) = match p1p2(&kb) {
                Ok(x) => x,
                Err(_) => continue,
            };
            let d_next = decompose_bks(&k_next).unwrap();
            assert_eq!(d.perm, d_next.perm, "Borel congruence action moved the component");
            done += 1;
        }
        assert!(seen_identity > 0 && seen_swap > 0, "sampling missed a component at p={p}");
    }
}

#[test]
fn kminus_tower_components_match_decomposition_shapes() {
    // Level classes of the K^- space in dimension 2 split into the
    // unipotent-coordinate component (p^n classes) and the sub-unit
    // component (p^{n-1} classes), mirroring the two pivot patterns the
    // decomposition produces.
    for p in [2u64, 3, 5] {
        let t = QuotientTower::kminus(2, p).unwrap();
        for level in 1..=2u32 {
            let mut unipotent = 0u64;
            let mut subunit = 0u64;
            for a in t.elements(level).unwrap() {
                let r = t.repr(level, a).unwrap();
                // row-major [1, 0, x, y]: unipotent shape has y = 1,
                // normalized-subunit shape has x = 1, y in p Z_p
                if r[3] == 1 {
                    unipotent += 1;
                } else {
                    assert_eq!(r[2], 1);
                    assert_eq!(r[3] % p, 0);
                    subunit += 1;
                }
            }
            assert_eq!(unipotent, p.pow(level));
            assert_eq!(subunit, p.pow(level - 1));
        }
    }
}
