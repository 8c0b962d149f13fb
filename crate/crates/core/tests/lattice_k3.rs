use dptorsion::lattice::{embedding_search, lambda_k, Lattice, SearchOptions};
use num_bigint::BigInt;
use num_traits::Signed;

#[test]
fn rescaled_lambda_embeds_primitively_in_k3() {
    let k3 = Lattice::k3();
    for k in 1..=9u32 {
        let src = lambda_k(k, false).rescale(2).unwrap();
        let emb = embedding_search(&src, &k3, SearchOptions::default()).unwrap();
        assert!(emb.verify());
        assert!(emb.is_primitive().unwrap());
        let (comp, inc) = emb.orthogonal_complement().unwrap();
        assert!(inc.verify());
        assert_eq!(comp.rank(), 10 + k as usize);
        assert_eq!(comp.discriminant().abs(), BigInt::from(1u64 << (12 - k)), "k={k}");
    }
    let src = lambda_k(8, true).rescale(2).unwrap();
    let emb = embedding_search(&src, &k3, SearchOptions::default()).unwrap();
    let (comp, _) = emb.orthogonal_complement().unwrap();
    assert_eq!(comp.discriminant().abs(), BigInt::from(1u64 << 4));
}
