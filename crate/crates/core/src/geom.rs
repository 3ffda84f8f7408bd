//! Small dense vector helpers shared by the sphere code.

pub type Vec3 = [f64; 3];

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn normalized(a: &[f64]) -> Vec<f64> {
    let n = norm(a);
    a.iter().map(|x| x / n).collect()
}

#[inline]
pub fn dot3(a: &Vec3, b: &Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

#[inline]
pub fn cross3(a: &Vec3, b: &Vec3) -> Vec3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

#[inline]
pub fn norm3(a: &Vec3) -> f64 {
    dot3(a, a).sqrt()
}

#[inline]
pub fn normalize3(a: &Vec3) -> Vec3 {
    let n = norm3(a);
    [a[0] / n, a[1] / n, a[2] / n]
}

#[inline]
pub fn sub3(a: &Vec3, b: &Vec3) -> Vec3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

#[inline]
pub fn add_scaled3(a: &Vec3, b: &Vec3, s: f64) -> Vec3 {
    [a[0] + s * b[0], a[1] + s * b[1], a[2] + s * b[2]]
}

#[inline]
pub fn dist3(a: &Vec3, b: &Vec3) -> f64 {
    norm3(&sub3(a, b))
}

/// Great-circle distance between unit vectors.
pub fn geodesic(a: &Vec3, b: &Vec3) -> f64 {
    let c = cross3(a, b);
    norm3(&c).atan2(dot3(a, b))
}

pub fn to_vec3(x: &[f64]) -> Vec3 {
    let mut v = [0.0; 3];
    for (o, a) in v.iter_mut().zip(x) {
        *o = *a;
    }
    v
}

/// Orthonormal basis of the tangent space `x^⊥` of the unit sphere at `x`:
/// Gram–Schmidt on the coordinate axes least aligned with `x`.
pub fn tangent_frame(x: &[f64]) -> Vec<Vec<f64>> {
    let n = x.len();
    let mut axes: Vec<usize> = (0..n).collect();
    axes.sort_by(|&a, &b| x[a].abs().partial_cmp(&x[b].abs()).unwrap().then(a.cmp(&b)));
    let mut frame: Vec<Vec<f64>> = Vec::with_capacity(n - 1);
    for &ax in axes.iter().take(n - 1) {
        let mut v = vec![0.0; n];
        v[ax] = 1.0;
        let c = dot(&v, x);
        for (vi, xi) in v.iter_mut().zip(x) {
            *vi -= c * xi;
        }
        for f in &frame {
            let c = dot(&v, f);
            for (vi, fi) in v.iter_mut().zip(f) {
                *vi -= c * fi;
            }
        }
        let nv = norm(&v);
        frame.push(v.into_iter().map(|a| a / nv).collect());
    }
    frame
}

/// Tangent frame at `x ∈ S²` as two 3-vectors with `e1 × e2 = x`.
pub fn oriented_frame3(x: &Vec3) -> (Vec3, Vec3) {
    let f = tangent_frame(x);
    let e1 = to_vec3(&f[0]);
    let mut e2 = to_vec3(&f[1]);
    if dot3(&cross3(&e1, &e2), x) < 0.0 {
        e2 = [-e2[0], -e2[1], -e2[2]];
    }
    (e1, e2)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn frame_is_orthonormal_and_tangent() {
        for x in [
            vec![1.0, 0.0, 0.0],
            vec![0.6, 0.0, 0.8],
            normalized(&[0.3, -0.2, 0.9, 0.1]),
        ] {
            let f = tangent_frame(&x);
            assert_eq!(f.len(), x.len() - 1);
            for (i, a) in f.iter().enumerate() {
                assert!(dot(a, &x).abs() < 1e-14);
                for (j, b) in f.iter().enumerate() {
                    let want = if i == j { 1.0 } else { 0.0 };
                    assert!((dot(a, b) - want).abs() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn oriented_frame_is_right_handed() {
        let x = normalize3(&[0.2, -0.7, 0.4]);
        let (e1, e2) = oriented_frame3(&x);
        let c = cross3(&e1, &e2);
        assert!(dist3(&c, &x) < 1e-14);
    }
}
