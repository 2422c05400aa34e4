//! Small stock algebras used across tests and the CLI examples.

use crate::algebra::{FiniteAlgebra, Signature};

/// The cyclic group Z_n in the signature (mul, inv, e).
pub fn zn_group(n: usize) -> FiniteAlgebra {
    assert!(n >= 1);
    let signature = Signature::new(vec![
        ("mul".to_string(), 2),
        ("inv".to_string(), 1),
        ("e".to_string(), 0),
    ])
    .unwrap();
    let mut mul = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            mul.push((i + j) % n);
        }
    }
    let inv = (0..n).map(|i| (n - i) % n).collect();
    FiniteAlgebra::new(
        Some(format!("Z{n}")),
        signature,
        n,
        vec![mul, inv, vec![0]],
    )
    .unwrap()
}

pub fn z2_group() -> FiniteAlgebra {
    zn_group(2)
}

/// The two-element lattice in the signature (meet, join).
pub fn two_element_lattice() -> FiniteAlgebra {
    let signature =
        Signature::new(vec![("meet".to_string(), 2), ("join".to_string(), 2)]).unwrap();
    let meet = vec![0, 0, 0, 1];
    let join = vec![0, 1, 1, 1];
    FiniteAlgebra::new(Some("2-lattice".to_string()), signature, 2, vec![meet, join]).unwrap()
}

/// An algebra with no operations at all; its clone has only projections.
pub fn empty_signature(size: usize) -> FiniteAlgebra {
    FiniteAlgebra::new(
        Some(format!("bare{size}")),
        Signature::new(Vec::new()).unwrap(),
        size,
        Vec::new(),
    )
    .unwrap()
}

/// The Klein four-group Z2 x Z2.
pub fn z2xz2_group() -> FiniteAlgebra {
    let z2 = z2_group();
    let mut p = FiniteAlgebra::product(&[&z2, &z2]).unwrap();
    p.name = Some("Z2xZ2".to_string());
    p
}
