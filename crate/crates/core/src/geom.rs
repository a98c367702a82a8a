//! Planar and spatial primitives: vectors, rigid motions, polygon predicates,
//! clipping and triangulation.

use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;
use core::ops::{Add, AddAssign, Div, Mul, Neg, Sub};

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Vec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

#[inline]
pub const fn v2(x: f64, y: f64) -> Vec2 {
    Vec2 { x, y }
}

#[inline]
pub const fn v3(x: f64, y: f64, z: f64) -> Vec3 {
    Vec3 { x, y, z }
}

impl Vec2 {
    pub const ZERO: Vec2 = v2(0.0, 0.0);

    #[inline]
    pub fn dot(self, o: Vec2) -> f64 {
        self.x * o.x + self.y * o.y
    }
    /// z-component of the 3D cross product.
    #[inline]
    pub fn cross(self, o: Vec2) -> f64 {
        self.x * o.y - self.y * o.x
    }
    #[inline]
    pub fn norm2(self) -> f64 {
        self.dot(self)
    }
    #[inline]
    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }
    pub fn normalized(self) -> Vec2 {
        let n = self.norm();
        if n == 0.0 {
            self
        } else {
            self * (1.0 / n)
        }
    }
    #[inline]
    pub fn perp(self) -> Vec2 {
        v2(-self.y, self.x)
    }
    #[inline]
    pub fn angle(self) -> f64 {
        self.y.atan2(self.x)
    }
    #[inline]
    pub fn dist(self, o: Vec2) -> f64 {
        (self - o).norm()
    }
    #[inline]
    pub fn lerp(self, o: Vec2, t: f64) -> Vec2 {
        self + (o - self) * t
    }
}

impl Vec3 {
    #[inline]
    pub fn dot(self, o: Vec3) -> f64 {
        self.x * o.x + self.y * o.y + self.z * o.z
    }
    #[inline]
    pub fn cross(self, o: Vec3) -> Vec3 {
        v3(
            self.y * o.z - self.z * o.y,
            self.z * o.x - self.x * o.z,
            self.x * o.y - self.y * o.x,
        )
    }
    #[inline]
    pub fn norm2(self) -> f64 {
        self.dot(self)
    }
    #[inline]
    pub fn norm(self) -> f64 {
        self.norm2().sqrt()
    }
    pub fn normalized(self) -> Vec3 {
        let n = self.norm();
        if n == 0.0 {
            self
        } else {
            self * (1.0 / n)
        }
    }
    #[inline]
    pub fn dist(self, o: Vec3) -> f64 {
        (self - o).norm()
    }
    #[inline]
    pub fn lerp(self, o: Vec3, t: f64) -> Vec3 {
        self + (o - self) * t
    }
}

macro_rules! vec_ops {
    ($t:ident, $($f:ident),+) => {
        impl Add for $t {
            type Output = $t;
            #[inline]
            fn add(self, o: $t) -> $t { $t { $($f: self.$f + o.$f),+ } }
        }
        impl AddAssign for $t {
            #[inline]
            fn add_assign(&mut self, o: $t) { $(self.$f += o.$f;)+ }
        }
        impl Sub for $t {
            type Output = $t;
            #[inline]
            fn sub(self, o: $t) -> $t { $t { $($f: self.$f - o.$f),+ } }
        }
        impl Mul<f64> for $t {
            type Output = $t;
            #[inline]
            fn mul(self, s: f64) -> $t { $t { $($f: self.$f * s),+ } }
        }
        impl Div<f64> for $t {
            type Output = $t;
            #[inline]
            fn div(self, s: f64) -> $t { $t { $($f: self.$f / s),+ } }
        }
        impl Neg for $t {
            type Output = $t;
            #[inline]
            fn neg(self) -> $t { $t { $($f: -self.$f),+ } }
        }
    };
}
vec_ops!(Vec2, x, y);
vec_ops!(Vec3, x, y, z);

/// Orientation-preserving rigid motion of the plane, `p ↦ R p + t`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Motion2 {
    pub cos: f64,
    pub sin: f64,
    pub tx: f64,
    pub ty: f64,
}

impl Default for Motion2 {
    fn default() -> Self {
        Motion2::IDENTITY
    }
}

impl Motion2 {
    pub const IDENTITY: Motion2 = Motion2 { cos: 1.0, sin: 0.0, tx: 0.0, ty: 0.0 };

    pub fn rotation(angle: f64) -> Motion2 {
        Motion2 { cos: angle.cos(), sin: angle.sin(), tx: 0.0, ty: 0.0 }
    }

    pub fn translation(t: Vec2) -> Motion2 {
        Motion2 { cos: 1.0, sin: 0.0, tx: t.x, ty: t.y }
    }

    /// Rotation by `angle` about `center`.
    pub fn rotation_about(center: Vec2, angle: f64) -> Motion2 {
        let r = Motion2::rotation(angle);
        let c = r.apply_vec(center);
        Motion2 { tx: center.x - c.x, ty: center.y - c.y, ..r }
    }

    /// The half-turn `p ↦ 2c − p`.
    pub fn half_turn(center: Vec2) -> Motion2 {
        Motion2 { cos: -1.0, sin: 0.0, tx: 2.0 * center.x, ty: 2.0 * center.y }
    }

    #[inline]
    pub fn apply(&self, p: Vec2) -> Vec2 {
        v2(self.cos * p.x - self.sin * p.y + self.tx, self.sin * p.x + self.cos * p.y + self.ty)
    }

    #[inline]
    pub fn apply_vec(&self, p: Vec2) -> Vec2 {
        v2(self.cos * p.x - self.sin * p.y, self.sin * p.x + self.cos * p.y)
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Motion2) -> Motion2 {
        let t = self.apply(v2(other.tx, other.ty));
        Motion2 {
            cos: self.cos * other.cos - self.sin * other.sin,
            sin: self.sin * other.cos + self.cos * other.sin,
            tx: t.x,
            ty: t.y,
        }
    }

    pub fn inverse(&self) -> Motion2 {
        let r = Motion2 { cos: self.cos, sin: -self.sin, tx: 0.0, ty: 0.0 };
        let t = r.apply_vec(v2(self.tx, self.ty));
        Motion2 { tx: -t.x, ty: -t.y, ..r }
    }

    pub fn angle(&self) -> f64 {
        self.sin.atan2(self.cos)
    }

    pub fn translation_part(&self) -> Vec2 {
        v2(self.tx, self.ty)
    }

    /// Row-major 2×3 matrix `[[a, b, tx], [c, d, ty]]`.
    pub fn matrix(&self) -> [[f64; 3]; 2] {
        [[self.cos, -self.sin, self.tx], [self.sin, self.cos, self.ty]]
    }

    /// Re-normalizes the rotation part after long products.
    pub fn renormalized(&self) -> Motion2 {
        let n = self.cos.hypot(self.sin);
        Motion2 { cos: self.cos / n, sin: self.sin / n, ..*self }
    }

    /// Motion sending `a → a2` and the direction of `b − a` onto `b2 − a2`.
    pub fn from_segments(a: Vec2, b: Vec2, a2: Vec2, b2: Vec2) -> Motion2 {
        let ang = (b2 - a2).angle() - (b - a).angle();
        let r = Motion2::rotation(ang);
        let ra = r.apply_vec(a);
        Motion2 { tx: a2.x - ra.x, ty: a2.y - ra.y, ..r }
    }

    /// Least-squares rigid fit (no reflection) sending `src[i]` near `dst[i]`.
    pub fn fit(src: &[Vec2], dst: &[Vec2]) -> Motion2 {
        debug_assert_eq!(src.len(), dst.len());
        if src.is_empty() {
            return Motion2::IDENTITY;
        }
        let n = src.len() as f64;
        let cs = src.iter().fold(Vec2::ZERO, |a, &p| a + p) / n;
        let cd = dst.iter().fold(Vec2::ZERO, |a, &p| a + p) / n;
        let (mut sxx, mut sxy) = (0.0, 0.0);
        for (p, q) in src.iter().zip(dst) {
            let a = *p - cs;
            let b = *q - cd;
            sxx += a.dot(b);
            sxy += a.cross(b);
        }
        let ang = if sxx == 0.0 && sxy == 0.0 { 0.0 } else { sxy.atan2(sxx) };
        let r = Motion2::rotation(ang);
        let rc = r.apply_vec(cs);
        Motion2 { tx: cd.x - rc.x, ty: cd.y - rc.y, ..r }
    }

    /// Largest displacement difference between two motions over `pts`.
    pub fn distance_on(&self, other: &Motion2, pts: &[Vec2]) -> f64 {
        pts.iter().map(|&p| self.apply(p).dist(other.apply(p))).fold(0.0, f64::max)
    }
}

/// Twice the signed area of triangle `abc`; positive when counterclockwise.
#[inline]
pub fn orient(a: Vec2, b: Vec2, c: Vec2) -> f64 {
    (b - a).cross(c - a)
}

pub fn signed_area(poly: &[Vec2]) -> f64 {
    let n = poly.len();
    if n < 3 {
        return 0.0;
    }
    let mut s = 0.0;
    for i in 0..n {
        s += poly[i].cross(poly[(i + 1) % n]);
    }
    0.5 * s
}

pub fn perimeter(poly: &[Vec2]) -> f64 {
    let n = poly.len();
    (0..n).map(|i| poly[i].dist(poly[(i + 1) % n])).sum()
}

/// Area centroid; falls back to the vertex mean for degenerate input.
pub fn centroid(poly: &[Vec2]) -> Vec2 {
    let n = poly.len();
    let a = signed_area(poly);
    if a.abs() < 1e-300 || n < 3 {
        return poly.iter().fold(Vec2::ZERO, |s, &p| s + p) / (n.max(1) as f64);
    }
    let mut c = Vec2::ZERO;
    for i in 0..n {
        let p = poly[i];
        let q = poly[(i + 1) % n];
        let w = p.cross(q);
        c += (p + q) * w;
    }
    c / (6.0 * a)
}

pub fn dist_point_segment(p: Vec2, a: Vec2, b: Vec2) -> f64 {
    let d = b - a;
    let l2 = d.norm2();
    if l2 == 0.0 {
        return p.dist(a);
    }
    let t = ((p - a).dot(d) / l2).clamp(0.0, 1.0);
    p.dist(a + d * t)
}

pub fn dist_point_segment3(p: Vec3, a: Vec3, b: Vec3) -> f64 {
    let d = b - a;
    let l2 = d.norm2();
    if l2 == 0.0 {
        return p.dist(a);
    }
    let t = ((p - a).dot(d) / l2).clamp(0.0, 1.0);
    p.dist(a + d * t)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Containment {
    Inside,
    Boundary,
    Outside,
}

/// Point-in-polygon with a boundary band of width `eps`.
pub fn point_in_polygon(p: Vec2, poly: &[Vec2], eps: f64) -> Containment {
    let n = poly.len();
    for i in 0..n {
        if dist_point_segment(p, poly[i], poly[(i + 1) % n]) <= eps {
            return Containment::Boundary;
        }
    }
    let mut inside = false;
    for i in 0..n {
        let a = poly[i];
        let b = poly[(i + 1) % n];
        if (a.y > p.y) != (b.y > p.y) {
            let x = a.x + (p.y - a.y) / (b.y - a.y) * (b.x - a.x);
            if p.x < x {
                inside = !inside;
            }
        }
    }
    if inside {
        Containment::Inside
    } else {
        Containment::Outside
    }
}

/// Parameters `(s, t)` of the crossing point of segments `ab` and `cd`, if the
/// supporting lines are not parallel.
pub fn line_params(a: Vec2, b: Vec2, c: Vec2, d: Vec2) -> Option<(f64, f64)> {
    let r = b - a;
    let s = d - c;
    let den = r.cross(s);
    let scale = r.norm() * s.norm();
    if den.abs() <= 1e-14 * scale || scale == 0.0 {
        return None;
    }
    let w = c - a;
    Some((w.cross(s) / den, w.cross(r) / den))
}

/// Whether closed segments `ab` and `cd` come within `eps` of each other.
pub fn segments_touch(a: Vec2, b: Vec2, c: Vec2, d: Vec2, eps: f64) -> bool {
    if let Some((s, t)) = line_params(a, b, c, d) {
        if (0.0..=1.0).contains(&s) && (0.0..=1.0).contains(&t) {
            return true;
        }
    }
    dist_point_segment(a, c, d) <= eps
        || dist_point_segment(b, c, d) <= eps
        || dist_point_segment(c, a, b) <= eps
        || dist_point_segment(d, a, b) <= eps
}

/// Clips `subject` against the convex counterclockwise polygon `clip`.
pub fn clip_convex(subject: &[Vec2], clip: &[Vec2]) -> Vec<Vec2> {
    let mut out: Vec<Vec2> = subject.to_vec();
    let m = clip.len();
    for i in 0..m {
        if out.is_empty() {
            break;
        }
        let a = clip[i];
        let b = clip[(i + 1) % m];
        out = clip_half_plane(&out, a, b);
    }
    out
}

/// Keeps the part of `poly` on the left of the directed line `a → b`.
pub fn clip_half_plane(poly: &[Vec2], a: Vec2, b: Vec2) -> Vec<Vec2> {
    let n = poly.len();
    let mut out = Vec::with_capacity(n + 2);
    for i in 0..n {
        let p = poly[i];
        let q = poly[(i + 1) % n];
        let sp = orient(a, b, p);
        let sq = orient(a, b, q);
        if sp >= 0.0 {
            out.push(p);
        }
        if (sp >= 0.0) != (sq >= 0.0) {
            let t = sp / (sp - sq);
            out.push(p.lerp(q, t));
        }
    }
    out
}

/// Area of the intersection of two convex counterclockwise polygons.
pub fn convex_overlap_area(a: &[Vec2], b: &[Vec2]) -> f64 {
    let c = clip_convex(a, b);
    signed_area(&c).max(0.0)
}

/// Axis-aligned bounding box `(min, max)`.
pub fn bbox(pts: &[Vec2]) -> (Vec2, Vec2) {
    let mut lo = v2(f64::INFINITY, f64::INFINITY);
    let mut hi = v2(f64::NEG_INFINITY, f64::NEG_INFINITY);
    for p in pts {
        lo.x = lo.x.min(p.x);
        lo.y = lo.y.min(p.y);
        hi.x = hi.x.max(p.x);
        hi.y = hi.y.max(p.y);
    }
    (lo, hi)
}

pub fn boxes_overlap(a: (Vec2, Vec2), b: (Vec2, Vec2), eps: f64) -> bool {
    a.0.x <= b.1.x + eps && b.0.x <= a.1.x + eps && a.0.y <= b.1.y + eps && b.0.y <= a.1.y + eps
}

/// Ear-clipping triangulation of a simple counterclockwise polygon. Vertices
/// with a straight angle are kept; no ear ever has zero area.
pub fn triangulate(poly: &[Vec2]) -> Option<Vec<[usize; 3]>> {
    let n = poly.len();
    if n < 3 {
        return None;
    }
    let (lo, hi) = bbox(poly);
    let scale = (hi - lo).norm().max(1e-300);
    let eps = 1e-12 * scale * scale;
    let mut idx: Vec<usize> = (0..n).collect();
    let mut tris = Vec::with_capacity(n - 2);
    let mut guard = 0usize;
    while idx.len() > 3 {
        let m = idx.len();
        let mut best: Option<(usize, f64)> = None;
        for k in 0..m {
            let ip = idx[(k + m - 1) % m];
            let ic = idx[k];
            let inx = idx[(k + 1) % m];
            let (a, b, c) = (poly[ip], poly[ic], poly[inx]);
            let ar = orient(a, b, c);
            if ar <= eps {
                continue;
            }
            let blocked = idx.iter().any(|&j| {
                if j == ip || j == ic || j == inx {
                    return false;
                }
                let p = poly[j];
                if p == a || p == b || p == c {
                    return false;
                }
                orient(a, b, p) >= -eps && orient(b, c, p) >= -eps && orient(c, a, p) >= -eps
            });
            if blocked {
                continue;
            }
            // prefer fat ears: smallest angle as quality
            let q = ear_quality(a, b, c);
            if best.is_none_or(|(_, bq)| q > bq) {
                best = Some((k, q));
            }
        }
        let (k, _) = best?;
        let m = idx.len();
        tris.push([idx[(k + m - 1) % m], idx[k], idx[(k + 1) % m]]);
        idx.remove(k);
        guard += 1;
        if guard > 4 * n {
            return None;
        }
    }
    if orient(poly[idx[0]], poly[idx[1]], poly[idx[2]]) <= eps {
        return None;
    }
    tris.push([idx[0], idx[1], idx[2]]);
    Some(tris)
}

fn ear_quality(a: Vec2, b: Vec2, c: Vec2) -> f64 {
    let ar = orient(a, b, c);
    let l = (a - b).norm2() + (b - c).norm2() + (c - a).norm2();
    ar / l
}

/// Parameter intervals of segment `ab` lying inside (or on the boundary of)
/// the simple polygon `poly`.
pub fn clip_segment_to_polygon(a: Vec2, b: Vec2, poly: &[Vec2], eps: f64) -> Vec<(f64, f64)> {
    let n = poly.len();
    let len = a.dist(b);
    if len == 0.0 {
        return Vec::new();
    }
    let mut ts: Vec<f64> = Vec::with_capacity(8);
    ts.push(0.0);
    ts.push(1.0);
    let d = b - a;
    for i in 0..n {
        let c = poly[i];
        let e = poly[(i + 1) % n];
        if let Some((s, t)) = line_params(a, b, c, e) {
            if s > 0.0 && s < 1.0 && (-1e-12..=1.0 + 1e-12).contains(&t) {
                ts.push(s);
            }
        }
        for p in [c, e] {
            let s = (p - a).dot(d) / (len * len);
            if s > 0.0 && s < 1.0 && dist_point_segment(p, a, b) <= eps {
                ts.push(s);
            }
        }
    }
    ts.sort_by(|x, y| x.partial_cmp(y).unwrap());
    ts.dedup_by(|x, y| (*x - *y).abs() * len <= eps * 1e-3);
    let mut out: Vec<(f64, f64)> = Vec::new();
    for w in ts.windows(2) {
        let (s0, s1) = (w[0], w[1]);
        if (s1 - s0) * len <= 1e-15 * len {
            continue;
        }
        let mid = a.lerp(b, 0.5 * (s0 + s1));
        if point_in_polygon(mid, poly, eps) != Containment::Outside {
            match out.last_mut() {
                Some(last) if (last.1 - s0).abs() * len <= eps => last.1 = s1,
                _ => out.push((s0, s1)),
            }
        }
    }
    out
}

/// Area of the intersection of two simple polygons via triangulation.
pub fn polygon_overlap_area(a: &[Vec2], ta: &[[usize; 3]], b: &[Vec2], tb: &[[usize; 3]]) -> f64 {
    let mut s = 0.0;
    for t in ta {
        let pa = [a[t[0]], a[t[1]], a[t[2]]];
        let ba = bbox(&pa);
        for u in tb {
            let pb = [b[u[0]], b[u[1]], b[u[2]]];
            if !boxes_overlap(ba, bbox(&pb), 0.0) {
                continue;
            }
            s += convex_overlap_area(&pa, &pb);
        }
    }
    s
}

/// Wraps an angle into `(−π, π]`.
pub fn wrap_angle(a: f64) -> f64 {
    use core::f64::consts::PI;
    let mut x = a % (2.0 * PI);
    if x > PI {
        x -= 2.0 * PI;
    } else if x <= -PI {
        x += 2.0 * PI;
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn motion_compose_inverse() {
        let m = Motion2::rotation_about(v2(1.0, 2.0), 0.7).compose(&Motion2::translation(v2(3.0, -1.0)));
        let p = v2(0.3, 0.9);
        let q = m.inverse().apply(m.apply(p));
        assert!(p.dist(q) < 1e-14);
    }

    #[test]
    fn motion_fit_recovers() {
        let m = Motion2::rotation_about(v2(-1.0, 0.5), 2.1);
        let src = vec![v2(0.0, 0.0), v2(1.0, 0.0), v2(0.2, 3.0)];
        let dst: Vec<Vec2> = src.iter().map(|&p| m.apply(p)).collect();
        let f = Motion2::fit(&src, &dst);
        assert!(f.distance_on(&m, &src) < 1e-12);
    }

    #[test]
    fn half_turn_is_involution() {
        let h = Motion2::half_turn(v2(2.0, 1.0));
        let p = v2(5.0, -3.0);
        assert!(h.apply(h.apply(p)).dist(p) < 1e-14);
        assert!((h.apply(p) - v2(-1.0, 5.0)).norm() < 1e-14);
    }

    #[test]
    fn triangulate_with_collinear_points() {
        let poly = vec![v2(0.0, 0.0), v2(0.5, 0.0), v2(1.0, 0.0), v2(1.0, 1.0), v2(0.0, 1.0)];
        let t = triangulate(&poly).unwrap();
        assert_eq!(t.len(), 3);
        let a: f64 = t.iter().map(|t| signed_area(&[poly[t[0]], poly[t[1]], poly[t[2]]])).sum();
        assert!((a - 1.0).abs() < 1e-14);
    }

    #[test]
    fn triangulate_nonconvex() {
        let poly = vec![v2(0.0, 0.0), v2(2.0, 0.0), v2(2.0, 2.0), v2(1.0, 0.5), v2(0.0, 2.0)];
        let t = triangulate(&poly).unwrap();
        let a: f64 = t.iter().map(|t| signed_area(&[poly[t[0]], poly[t[1]], poly[t[2]]])).sum();
        assert!((a - signed_area(&poly)).abs() < 1e-14);
    }

    #[test]
    fn segment_clip_nonconvex() {
        let poly = vec![v2(0.0, 0.0), v2(3.0, 0.0), v2(3.0, 2.0), v2(2.0, 2.0), v2(2.0, 1.0), v2(1.0, 1.0), v2(1.0, 2.0), v2(0.0, 2.0)];
        let iv = clip_segment_to_polygon(v2(-1.0, 1.5), v2(4.0, 1.5), &poly, 1e-12);
        assert_eq!(iv.len(), 2);
        assert!((iv[0].0 - 0.2).abs() < 1e-12 && (iv[0].1 - 0.4).abs() < 1e-12);
        assert!((iv[1].0 - 0.6).abs() < 1e-12 && (iv[1].1 - 0.8).abs() < 1e-12);
    }

    #[test]
    fn overlap_of_squares() {
        let a = vec![v2(0.0, 0.0), v2(2.0, 0.0), v2(2.0, 2.0), v2(0.0, 2.0)];
        let b = vec![v2(1.0, 1.0), v2(3.0, 1.0), v2(3.0, 3.0), v2(1.0, 3.0)];
        assert!((convex_overlap_area(&a, &b) - 1.0).abs() < 1e-14);
    }
}
