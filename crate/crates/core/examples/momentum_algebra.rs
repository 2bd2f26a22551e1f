//! Modular momentum arithmetic on a Monkhorst-Pack mesh: transfers,
//! folding vectors, and the complement identity.
//!
//! Run with `cargo run --example momentum_algebra`.

use kblock::kmesh::{complement_g, count_self_inverse_q, gvector, modsub, KVector, Mesh};

fn main() {
    let mesh = Mesh::new(1, 4, 4).unwrap();
    println!(
        "mesh {mesh}: N_k = {}, n_k = {} bits, self-inverse transfers = {}",
        mesh.num_kpoints(),
        mesh.momentum_bits(),
        count_self_inverse_q(&mesh)
    );

    let kp = KVector([0, 2, 1]);
    let kq = KVector([0, 3, 1]);
    let diff = modsub(&mesh, kp, kq).unwrap();
    let (q, g) = gvector(&mesh, kp, kq).unwrap();
    let (neg_q, not_g) = complement_g(&mesh, q, g).unwrap();

    println!("kp = {:?}, kq = {:?}", kp.0, kq.0);
    println!("kp ⊖ kq = {:?}", diff.0);
    println!("Q = {:?}, G = {:?}  (kp − kq = Q + G)", q.0, g.0);
    println!("⊖Q = {:?}, !G = {:?}  (kq − kp = ⊖Q + !G)", neg_q.0, not_g.0);

    // both integer identities hold exactly on every pair
    let mut checked = 0usize;
    for a in mesh.kpoints() {
        for b in mesh.kpoints() {
            let (q, g) = gvector(&mesh, a, b).unwrap();
            let (nq, ng) = complement_g(&mesh, q, g).unwrap();
            for d in 0..3 {
                assert_eq!(a.0[d] - b.0[d], q.0[d] + g.0[d]);
                assert_eq!(b.0[d] - a.0[d], nq.0[d] + ng.0[d]);
            }
            checked += 1;
        }
    }
    println!("identities verified on {checked} ordered pairs");
}
