//! Extreme rays of a pointed polyhedral cone `{x : A x ≥ 0}` by the
//! double-description method.

use num_traits::{One, Signed, Zero};

use crate::rational::Q;

fn dot(a: &[Q], b: &[Q]) -> Q {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Rank of a set of rational vectors.
pub fn rank(rows: &[Vec<Q>]) -> usize {
    let mut m: Vec<Vec<Q>> = rows.to_vec();
    let cols = m.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = Q::one() / &m[r][c];
        for i in 0..m.len() {
            if i != r && !m[i][c].is_zero() {
                let f = &m[i][c] * &inv;
                for k in c..cols {
                    let t = &f * &m[r][k];
                    m[i][k] -= t;
                }
            }
        }
        r += 1;
    }
    r
}

/// Solves `M x = b` for square invertible `M`.
fn solve(mat: &[Vec<Q>], b: &[Q]) -> Option<Vec<Q>> {
    let n = mat.len();
    let mut m: Vec<Vec<Q>> = mat.iter().zip(b).map(|(r, v)| {
        let mut r = r.clone();
        r.push(v.clone());
        r
    }).collect();
    for c in 0..n {
        let p = (c..n).find(|&i| !m[i][c].is_zero())?;
        m.swap(c, p);
        let inv = Q::one() / &m[c][c];
        for k in c..=n {
            m[c][k] = &m[c][k] * &inv;
        }
        for i in 0..n {
            if i != c && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for k in c..=n {
                    let t = &f * &m[c][k];
                    m[i][k] -= t;
                }
            }
        }
    }
    Some(m.into_iter().map(|r| r[n].clone()).collect())
}

/// Scales a ray to primitive integral form (coprime integer entries).
fn normalize(v: Vec<Q>) -> Vec<Q> {
    use num_integer::Integer;
    let mut den = num_bigint::BigInt::one();
    for x in &v {
        den = den.lcm(x.denom());
    }
    let ints: Vec<num_bigint::BigInt> = v.iter().map(|x| (x * Q::from_integer(den.clone())).to_integer()).collect();
    let mut g = num_bigint::BigInt::zero();
    for x in &ints {
        g = g.gcd(x);
    }
    if g.is_zero() {
        return v;
    }
    ints.into_iter().map(|x| Q::from_integer(x / &g)).collect()
}

/// Extreme rays of `{x : rows·x ≥ 0}`. The rows must have full rank (pointed
/// cone). Rays are returned primitive and sorted.
pub fn extreme_rays(rows: &[Vec<Q>]) -> Vec<Vec<Q>> {
    let d = rows.first().map_or(0, Vec::len);
    assert_eq!(rank(rows), d, "cone is not pointed");
    // a basis of d independent rows
    let mut basis: Vec<usize> = Vec::new();
    for i in 0..rows.len() {
        let mut trial: Vec<Vec<Q>> = basis.iter().map(|&j| rows[j].clone()).collect();
        trial.push(rows[i].clone());
        if rank(&trial) == trial.len() {
            basis.push(i);
        }
        if basis.len() == d {
            break;
        }
    }
    let bmat: Vec<Vec<Q>> = basis.iter().map(|&j| rows[j].clone()).collect();
    // initial rays: columns of the inverse, i.e. B r_k = unit_k
    let mut rays: Vec<Vec<Q>> = (0..d)
        .map(|k| {
            let unit: Vec<Q> = (0..d).map(|i| if i == k { Q::one() } else { Q::zero() }).collect();
            normalize(solve(&bmat, &unit).expect("basis rows are independent"))
        })
        .collect();
    let mut added: Vec<usize> = basis.clone();
    for (i, row) in rows.iter().enumerate() {
        if basis.contains(&i) {
            continue;
        }
        let vals: Vec<Q> = rays.iter().map(|r| dot(row, r)).collect();
        let pos: Vec<usize> = (0..rays.len()).filter(|&k| vals[k].is_positive()).collect();
        let neg: Vec<usize> = (0..rays.len()).filter(|&k| vals[k].is_negative()).collect();
        let mut next: Vec<Vec<Q>> = (0..rays.len()).filter(|&k| !vals[k].is_negative()).map(|k| rays[k].clone()).collect();
        for &p in &pos {
            for &n in &neg {
                // algebraic adjacency: common tight rows have rank d - 2
                let tight: Vec<Vec<Q>> = added
                    .iter()
                    .filter(|&&j| dot(&rows[j], &rays[p]).is_zero() && dot(&rows[j], &rays[n]).is_zero())
                    .map(|&j| rows[j].clone())
                    .collect();
                if tight.len() + 2 < d || rank(&tight) != d - 2 {
                    continue;
                }
                let a = -&vals[n];
                let b = vals[p].clone();
                let r: Vec<Q> = rays[p].iter().zip(&rays[n]).map(|(x, y)| &a * x + &b * y).collect();
                next.push(normalize(r));
            }
        }
        rays = next;
        added.push(i);
    }
    rays.sort();
    rays.dedup();
    rays
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    #[test]
    fn square_cone() {
        // x ≥ 0, y ≥ 0, z ≥ 0, and x + y - z ≥ 0 ... in 3d
        let rows = vec![
            vec![q(1), q(0), q(0)],
            vec![q(0), q(1), q(0)],
            vec![q(0), q(0), q(1)],
            vec![q(1), q(1), q(-1)],
        ];
        let rays = extreme_rays(&rows);
        assert_eq!(rays.len(), 4);
        for r in &rays {
            assert!(rows.iter().all(|row| !dot(row, r).is_negative()));
        }
    }

    #[test]
    fn rank_of_dependent_rows() {
        let rows = vec![vec![q(1), q(2)], vec![q(2), q(4)]];
        assert_eq!(rank(&rows), 1);
    }
}
