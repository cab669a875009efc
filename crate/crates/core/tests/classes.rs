use std::collections::HashMap;

use extremal_core::extremal::{build_natural, class_key, ClassKey, ExtremalInstance};
use extremal_core::numeric::squared_projection;
use extremal_core::search::{find_signed_permutation, symmetry_equivalent};
use extremal_core::sp::enumerate_rooted;

fn instances(n: usize, k: usize) -> Vec<ExtremalInstance> {
    enumerate_rooted(n, k)
        .iter()
        .map(|t| build_natural(t).unwrap())
        .collect()
}

/// Trees with equal keys are related by an explicit signed permutation
/// that carries one exact Q onto the other.
#[test]
fn colliding_keys_are_truly_equivalent() {
    let mut collisions = 0;
    for n in 2..=7 {
        for k in 1..n {
            let mut groups: HashMap<ClassKey, Vec<ExtremalInstance>> = HashMap::new();
            for inst in instances(n, k) {
                groups.entry(class_key(&inst)).or_default().push(inst);
            }
            for group in groups.values() {
                let first = &group[0];
                let q = squared_projection(&first.transfer);
                for other in &group[1..] {
                    collisions += 1;
                    let (perm, _) = find_signed_permutation(&first.subspace, &other.subspace, 1e-9)
                        .unwrap_or_else(|| panic!("{} vs {}", first.tree, other.tree));
                    let q2 = squared_projection(&other.transfer);
                    for i in 0..n {
                        for j in 0..n {
                            assert_eq!(q[(i, j)], q2[(perm[i], perm[j])]);
                        }
                    }
                }
            }
        }
    }
    assert!(collisions > 0);
}

#[test]
fn distinct_classes_are_not_symmetry_equivalent() {
    let all = instances(5, 2);
    let keys: Vec<ClassKey> = all.iter().map(class_key).collect();
    for (i, a) in all.iter().enumerate() {
        for (j, b) in all.iter().enumerate().skip(i + 1) {
            let same = symmetry_equivalent(&a.subspace, &b.subspace, 1e-3);
            assert_eq!(same, keys[i] == keys[j], "{} vs {}", a.tree, b.tree);
        }
    }
}

#[test]
fn rank_two_classes_are_edge_multiplicity_partitions() {
    // a rank-2 2-sp graph is a triangle with parallel classes a+b+c = n
    let partitions = |n: usize| {
        (1..=n)
            .flat_map(|a| (1..=a).map(move |b| (a, b)))
            .filter(|&(a, b)| n > a + b && n - a - b <= b)
            .count()
    };
    for n in 3..=9 {
        let keys: std::collections::HashSet<ClassKey> =
            instances(n, 2).iter().map(class_key).collect();
        assert_eq!(keys.len(), partitions(n), "n = {n}");
    }
}
