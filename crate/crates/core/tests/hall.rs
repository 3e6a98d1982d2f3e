mod common;

use codeserve::batch::{serve_by_hall, verify_service};
use codeserve::gf2::{xor_all, GroupVector, Matrix, RequestSeq};
use codeserve::hall::{anchor_pairing, hall_pairing, pairing_oracle, verify_pairing};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn all_sequences(k: u8) -> Vec<Vec<GroupVector>> {
    let size = 1usize << k;
    let mut out = Vec::new();
    for code in 0..size.pow(size as u32) {
        let mut c = code;
        let s = (0..size)
            .map(|_| {
                let v = (c % size) as u32;
                c /= size;
                GroupVector::new(k, v).unwrap()
            })
            .collect();
        out.push(s);
    }
    out
}

#[test]
fn exhaustive_small_dimensions() {
    for k in 1..=2u8 {
        for s in all_sequences(k) {
            let zero_sum = xor_all(k, &s).is_zero();
            let oracle = pairing_oracle(&s).unwrap();
            assert_eq!(oracle.is_some(), zero_sum);
            match hall_pairing(&s, 0) {
                Ok(p) => assert!(zero_sum && verify_pairing(&s, &p)),
                Err(_) => assert!(!zero_sum),
            }
        }
    }
}

#[test]
fn random_zero_sum_sequences() {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for _ in 0..300 {
        let k = rng.gen_range(2..=6u8);
        let mut s: Vec<GroupVector> = (1..1usize << k).map(|_| GroupVector::new(k, rng.gen_range(0..1u32 << k)).unwrap()).collect();
        s.push(xor_all(k, &s));
        let p = hall_pairing(&s, rng.gen()).unwrap();
        assert!(verify_pairing(&s, &p));
        let target = GroupVector::new(k, rng.gen_range(0..1u32 << k)).unwrap();
        let q = anchor_pairing(&p, target);
        assert!(verify_pairing(&s, &q));
        assert_eq!(q.a()[0], target);
    }
}

#[test]
fn constructive_service_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..120 {
        let k = rng.gen_range(1..=4u8);
        let m = rng.gen_range(1..=3usize);
        let mut cols: Vec<GroupVector> = GroupVector::all(k).unwrap().flat_map(|v| vec![v; 2 * m]).collect();
        for _ in 0..rng.gen_range(0..4) {
            cols.push(GroupVector::new(k, rng.gen_range(0..1u32 << k)).unwrap());
        }
        cols.shuffle(&mut rng);
        let g = Matrix::new(k, cols).unwrap();
        let reqs = (0..m << k).map(|_| GroupVector::new(k, rng.gen_range(1..1u32 << k)).unwrap()).collect();
        let r = RequestSeq::new(k, reqs).unwrap();
        let s = serve_by_hall(&g, &r, rng.gen()).unwrap();
        assert!(verify_service(&g, &r, &s));
        assert!(s.max_set_size() <= 2);
    }
}
