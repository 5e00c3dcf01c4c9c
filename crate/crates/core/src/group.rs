//! Concrete groups: integer lattices Z^d and finite groups given by Cayley
//! tables, plus the windows used as finite scan domains for sup-norms.
//!
//! Finite tables are fully validated at construction: every row and column
//! must be a permutation of 0..order-1, a two-sided identity must exist, and
//! associativity is checked over all triples.

use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};

/// Maximum lattice dimension; keeps window scans tractable.
pub const MAX_LATTICE_DIM: usize = 4;

/// A concrete group: a lattice Z^d or a finite group with a Cayley table.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum GroupSpec {
    Lattice {
        dim: usize,
    },
    Finite {
        name: String,
        table: Vec<Vec<usize>>,
        #[serde(skip)]
        identity: usize,
        #[serde(skip)]
        inverses: Vec<usize>,
    },
}

/// A group element: integer coordinates on a lattice, a table index otherwise.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Element {
    LatticePoint(Vec<i64>),
    FiniteIndex(usize),
}

impl Element {
    /// Coordinate view used by the noise digest: lattice coordinates, or the
    /// single finite index.
    pub fn digest_coords(&self) -> Vec<i64> {
        match self {
            Element::LatticePoint(c) => c.clone(),
            Element::FiniteIndex(i) => vec![*i as i64],
        }
    }
}

impl Serialize for Element {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Element::LatticePoint(c) => c.serialize(ser),
            Element::FiniteIndex(i) => ser.serialize_u64(*i as u64),
        }
    }
}

impl<'de> Deserialize<'de> for Element {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Wire {
            Index(u64),
            Coords(Vec<i64>),
        }
        Ok(match Wire::deserialize(de)? {
            Wire::Index(i) => Element::FiniteIndex(i as usize),
            Wire::Coords(c) => Element::LatticePoint(c),
        })
    }
}

/// Wire form of a group descriptor; validated into a [`GroupSpec`].
#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum GroupDescriptor {
    Lattice {
        dim: usize,
    },
    Finite {
        #[serde(default)]
        name: String,
        #[serde(default)]
        table: Vec<Vec<usize>>,
    },
}

impl TryFrom<GroupDescriptor> for GroupSpec {
    type Error = CoreError;

    fn try_from(d: GroupDescriptor) -> Result<GroupSpec> {
        match d {
            GroupDescriptor::Lattice { dim } => GroupSpec::lattice(dim),
            GroupDescriptor::Finite { name, table } => {
                if table.is_empty() {
                    // A bare name refers to a built-in group.
                    return match name.as_str() {
                        "Z1" => GroupSpec::cyclic(1),
                        "Z2" => GroupSpec::cyclic(2),
                        "Z3" => GroupSpec::cyclic(3),
                        "Z4" => GroupSpec::cyclic(4),
                        "Z5" => GroupSpec::cyclic(5),
                        "Z6" => GroupSpec::cyclic(6),
                        "Z8" => GroupSpec::cyclic(8),
                        "Z12" => GroupSpec::cyclic(12),
                        "D3" => GroupSpec::dihedral(3),
                        "D4" => GroupSpec::dihedral(4),
                        "D6" => GroupSpec::dihedral(6),
                        "S3" => GroupSpec::symmetric3(),
                        other => Err(CoreError::BadTable(format!(
                            "unknown built-in group name '{other}' and no table given"
                        ))),
                    };
                }
                GroupSpec::from_table(name, table)
            }
        }
    }
}

impl<'de> Deserialize<'de> for GroupSpec {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let d = GroupDescriptor::deserialize(de)?;
        GroupSpec::try_from(d).map_err(serde::de::Error::custom)
    }
}

impl GroupSpec {
    /// The lattice Z^dim, 1 <= dim <= 4.
    pub fn lattice(dim: usize) -> Result<Self> {
        if dim == 0 || dim > MAX_LATTICE_DIM {
            return Err(CoreError::BadTable(format!(
                "lattice dimension {dim} outside 1..={MAX_LATTICE_DIM}"
            )));
        }
        Ok(GroupSpec::Lattice { dim })
    }

    /// Z (the one-dimensional lattice).
    pub fn z() -> Self {
        GroupSpec::Lattice { dim: 1 }
    }

    /// The cyclic group Z_n.
    pub fn cyclic(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(CoreError::BadTable("cyclic group order must be >= 1".into()));
        }
        let table = (0..n).map(|i| (0..n).map(|j| (i + j) % n).collect()).collect();
        Self::from_table(format!("Z{n}"), table)
    }

    /// The dihedral group D_n of order 2n: element i + n*s is r^i s^eps.
    pub fn dihedral(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(CoreError::BadTable("dihedral parameter must be >= 1".into()));
        }
        let order = 2 * n;
        let mut table = vec![vec![0usize; order]; order];
        for i in 0..n {
            for e in 0..2usize {
                for k in 0..n {
                    for d in 0..2usize {
                        // (r^i s^e)(r^k s^d) = r^(i + (-1)^e k) s^(e xor d)
                        let rot = if e == 0 { (i + k) % n } else { (i + n - k % n) % n };
                        table[i + n * e][k + n * d] = rot + n * (e ^ d);
                    }
                }
            }
        }
        Self::from_table(format!("D{n}"), table)
    }

    /// The symmetric group S_3 on {0,1,2}; permutations listed lexicographically.
    pub fn symmetric3() -> Result<Self> {
        let perms: [[usize; 3]; 6] = [
            [0, 1, 2],
            [0, 2, 1],
            [1, 0, 2],
            [1, 2, 0],
            [2, 0, 1],
            [2, 1, 0],
        ];
        let index_of = |p: &[usize; 3]| perms.iter().position(|q| q == p).unwrap();
        let mut table = vec![vec![0usize; 6]; 6];
        for (i, a) in perms.iter().enumerate() {
            for (j, b) in perms.iter().enumerate() {
                // (a b)(x) = a(b(x))
                let comp = [a[b[0]], a[b[1]], a[b[2]]];
                table[i][j] = index_of(&comp);
            }
        }
        Self::from_table("S3".to_string(), table)
    }

    /// Validate a custom Cayley table into a group.
    pub fn from_table(name: String, table: Vec<Vec<usize>>) -> Result<Self> {
        let order = table.len();
        if order == 0 {
            return Err(CoreError::BadTable("empty table".into()));
        }
        for (i, row) in table.iter().enumerate() {
            if row.len() != order {
                return Err(CoreError::BadTable(format!(
                    "row {i} has length {} in an order-{order} table",
                    row.len()
                )));
            }
            if row.iter().any(|&v| v >= order) {
                return Err(CoreError::BadTable(format!("row {i} has an out-of-range entry")));
            }
        }
        // Rows and columns must be permutations.
        for i in 0..order {
            let mut seen_row = vec![false; order];
            let mut seen_col = vec![false; order];
            for j in 0..order {
                if seen_row[table[i][j]] {
                    return Err(CoreError::NonInvertible { index: i });
                }
                seen_row[table[i][j]] = true;
                if seen_col[table[j][i]] {
                    return Err(CoreError::NonInvertible { index: i });
                }
                seen_col[table[j][i]] = true;
            }
        }
        // Two-sided identity.
        let identity = (0..order)
            .find(|&e| (0..order).all(|x| table[e][x] == x && table[x][e] == x))
            .ok_or(CoreError::NoIdentity)?;
        // Associativity over all triples.
        for x in 0..order {
            for y in 0..order {
                for z in 0..order {
                    if table[table[x][y]][z] != table[x][table[y][z]] {
                        return Err(CoreError::NotAssociative { x, y, z });
                    }
                }
            }
        }
        let mut inverses = vec![0usize; order];
        for x in 0..order {
            inverses[x] = (0..order)
                .find(|&y| table[x][y] == identity && table[y][x] == identity)
                .ok_or(CoreError::NonInvertible { index: x })?;
        }
        Ok(GroupSpec::Finite { name, table, identity, inverses })
    }

    pub fn is_lattice(&self) -> bool {
        matches!(self, GroupSpec::Lattice { .. })
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, GroupSpec::Finite { .. })
    }

    /// Lattice dimension, or an error on finite groups.
    pub fn dim(&self) -> Result<usize> {
        match self {
            GroupSpec::Lattice { dim } => Ok(*dim),
            _ => Err(CoreError::NotLattice),
        }
    }

    /// Finite group order, or an error on lattices.
    pub fn order(&self) -> Result<usize> {
        match self {
            GroupSpec::Finite { table, .. } => Ok(table.len()),
            _ => Err(CoreError::NotFinite),
        }
    }

    /// The identity element.
    pub fn identity(&self) -> Element {
        match self {
            GroupSpec::Lattice { dim } => Element::LatticePoint(vec![0; *dim]),
            GroupSpec::Finite { identity, .. } => Element::FiniteIndex(*identity),
        }
    }

    /// Check that an element belongs to this group.
    pub fn contains(&self, x: &Element) -> bool {
        match (self, x) {
            (GroupSpec::Lattice { dim }, Element::LatticePoint(c)) => c.len() == *dim,
            (GroupSpec::Finite { table, .. }, Element::FiniteIndex(i)) => *i < table.len(),
            _ => false,
        }
    }

    fn check_member(&self, x: &Element) -> Result<()> {
        if self.contains(x) {
            Ok(())
        } else {
            Err(CoreError::ElementMismatch(format!("{x:?} does not belong to {self:?}")))
        }
    }

    /// The group product xy.
    pub fn mul(&self, x: &Element, y: &Element) -> Result<Element> {
        self.check_member(x)?;
        self.check_member(y)?;
        match (self, x, y) {
            (GroupSpec::Lattice { .. }, Element::LatticePoint(a), Element::LatticePoint(b)) => {
                let mut out = Vec::with_capacity(a.len());
                for (u, v) in a.iter().zip(b) {
                    out.push(u.checked_add(*v).ok_or_else(|| {
                        CoreError::Overflow(format!("lattice sum {u} + {v}"))
                    })?);
                }
                Ok(Element::LatticePoint(out))
            }
            (GroupSpec::Finite { table, .. }, Element::FiniteIndex(i), Element::FiniteIndex(j)) => {
                Ok(Element::FiniteIndex(table[*i][*j]))
            }
            _ => unreachable!("membership checked above"),
        }
    }

    /// The group inverse x^{-1}.
    pub fn inverse(&self, x: &Element) -> Result<Element> {
        self.check_member(x)?;
        match (self, x) {
            (GroupSpec::Lattice { .. }, Element::LatticePoint(a)) => {
                let mut out = Vec::with_capacity(a.len());
                for u in a {
                    out.push(u.checked_neg().ok_or_else(|| {
                        CoreError::Overflow(format!("negation of {u}"))
                    })?);
                }
                Ok(Element::LatticePoint(out))
            }
            (GroupSpec::Finite { inverses, .. }, Element::FiniteIndex(i)) => {
                Ok(Element::FiniteIndex(inverses[*i]))
            }
            _ => unreachable!("membership checked above"),
        }
    }

    /// Finite scan domain: lattice points with max-norm <= radius in
    /// lexicographic order, or every element of a finite group.
    pub fn window(&self, radius: u32) -> Vec<Element> {
        match self {
            GroupSpec::Lattice { dim } => {
                let r = radius as i64;
                let side = 2 * r + 1;
                let count = (side as usize).pow(*dim as u32);
                let mut out = Vec::with_capacity(count);
                let mut point = vec![-r; *dim];
                loop {
                    out.push(Element::LatticePoint(point.clone()));
                    let mut k = *dim;
                    loop {
                        if k == 0 {
                            return out;
                        }
                        k -= 1;
                        if point[k] < r {
                            point[k] += 1;
                            for c in point.iter_mut().skip(k + 1) {
                                *c = -r;
                            }
                            break;
                        }
                    }
                }
            }
            GroupSpec::Finite { table, .. } => {
                (0..table.len()).map(Element::FiniteIndex).collect()
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lattice_mul_is_vector_addition() {
        let z = GroupSpec::z();
        let r = z
            .mul(&Element::LatticePoint(vec![2]), &Element::LatticePoint(vec![3]))
            .unwrap();
        assert_eq!(r, Element::LatticePoint(vec![5]));

        let z2 = GroupSpec::lattice(2).unwrap();
        let r = z2
            .mul(
                &Element::LatticePoint(vec![1, 0]),
                &Element::LatticePoint(vec![0, 1]),
            )
            .unwrap();
        assert_eq!(r, Element::LatticePoint(vec![1, 1]));
    }

    #[test]
    fn cyclic_mul_and_inverse() {
        let z6 = GroupSpec::cyclic(6).unwrap();
        let r = z6.mul(&Element::FiniteIndex(4), &Element::FiniteIndex(5)).unwrap();
        assert_eq!(r, Element::FiniteIndex(3));
        assert_eq!(z6.inverse(&Element::FiniteIndex(2)).unwrap(), Element::FiniteIndex(4));
    }

    #[test]
    fn lattice_inverse_is_negation() {
        let z = GroupSpec::z();
        assert_eq!(
            z.inverse(&Element::LatticePoint(vec![3])).unwrap(),
            Element::LatticePoint(vec![-3])
        );
    }

    #[test]
    fn s3_transpositions_are_self_inverse() {
        // Derived by scanning the constructed Cayley table for two-sided inverses.
        let s3 = GroupSpec::symmetric3().unwrap();
        let mut self_inverse = 0;
        for i in 0..6 {
            let x = Element::FiniteIndex(i);
            let inv = s3.inverse(&x).unwrap();
            let e = s3.mul(&x, &inv).unwrap();
            assert_eq!(e, s3.identity());
            if inv == x && x != s3.identity() {
                self_inverse += 1;
            }
        }
        // S3 has exactly three transpositions, each its own inverse.
        assert_eq!(self_inverse, 3);
    }

    #[test]
    fn s3_is_nonabelian_of_order_6() {
        let s3 = GroupSpec::symmetric3().unwrap();
        assert_eq!(s3.order().unwrap(), 6);
        let mut commutes = true;
        for i in 0..6 {
            for j in 0..6 {
                let a = Element::FiniteIndex(i);
                let b = Element::FiniteIndex(j);
                if s3.mul(&a, &b).unwrap() != s3.mul(&b, &a).unwrap() {
                    commutes = false;
                }
            }
        }
        assert!(!commutes);
    }

    #[test]
    fn bad_table_with_repeated_row_entry_is_rejected() {
        let table = vec![vec![0, 1], vec![1, 1]];
        match GroupSpec::from_table("bad".into(), table) {
            Err(CoreError::NonInvertible { .. }) => {}
            other => panic!("expected NonInvertible, got {other:?}"),
        }
    }

    #[test]
    fn associativity_failure_reports_indices() {
        // Rows/columns are permutations (latin square) and index 0 acts as
        // identity, but the operation is not associative.
        let table = vec![
            vec![0, 1, 2, 3, 4],
            vec![1, 0, 3, 4, 2],
            vec![2, 3, 4, 0, 1],
            vec![3, 4, 1, 2, 0],
            vec![4, 2, 0, 1, 3],
        ];
        match GroupSpec::from_table("latin".into(), table) {
            Err(CoreError::NotAssociative { .. }) => {}
            other => panic!("expected NotAssociative, got {other:?}"),
        }
    }

    #[test]
    fn window_sizes_match_closed_formula() {
        let z = GroupSpec::z();
        let w = z.window(2);
        assert_eq!(w.len(), 5);
        assert_eq!(w[0], Element::LatticePoint(vec![-2]));
        assert_eq!(w[4], Element::LatticePoint(vec![2]));

        let z2 = GroupSpec::lattice(2).unwrap();
        assert_eq!(z2.window(1).len(), 9);

        let z6 = GroupSpec::cyclic(6).unwrap();
        assert_eq!(z6.window(100).len(), 6);
    }

    #[test]
    fn windows_nest() {
        let z2 = GroupSpec::lattice(2).unwrap();
        let small: std::collections::HashSet<_> = z2.window(3).into_iter().collect();
        let large: std::collections::HashSet<_> = z2.window(4).into_iter().collect();
        assert!(small.is_subset(&large));
    }

    #[test]
    fn dihedral_4_has_order_8() {
        let d4 = GroupSpec::dihedral(4).unwrap();
        assert_eq!(d4.order().unwrap(), 8);
    }

    #[test]
    fn lattice_overflow_is_an_error() {
        let z = GroupSpec::z();
        let r = z.mul(
            &Element::LatticePoint(vec![i64::MAX]),
            &Element::LatticePoint(vec![1]),
        );
        assert!(matches!(r, Err(CoreError::Overflow(_))));
    }

    #[test]
    fn group_json_round_trip() {
        let z6 = GroupSpec::cyclic(6).unwrap();
        let s = serde_json::to_string(&z6).unwrap();
        let back: GroupSpec = serde_json::from_str(&s).unwrap();
        assert_eq!(back, z6);

        let lat: GroupSpec = serde_json::from_str(r#"{"kind":"lattice","dim":1}"#).unwrap();
        assert_eq!(lat, GroupSpec::z());

        let named: GroupSpec = serde_json::from_str(r#"{"kind":"finite","name":"Z6"}"#).unwrap();
        assert_eq!(named, z6);
    }
}
