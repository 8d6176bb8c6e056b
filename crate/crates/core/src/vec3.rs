//! Minimal 3-vector arithmetic on `[f64; 3]`.

pub type Vec3 = [f64; 3];

#[inline]
pub fn add(a: Vec3, b: Vec3) -> Vec3 {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

#[inline]
pub fn sub(a: Vec3, b: Vec3) -> Vec3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

#[inline]
pub fn scale(a: Vec3, s: f64) -> Vec3 {
    [a[0] * s, a[1] * s, a[2] * s]
}

#[inline]
pub fn dot(a: Vec3, b: Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

#[inline]
pub fn cross(a: Vec3, b: Vec3) -> Vec3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

#[inline]
pub fn norm(a: Vec3) -> f64 {
    dot(a, a).sqrt()
}

#[inline]
pub fn dist(a: Vec3, b: Vec3) -> f64 {
    norm(sub(a, b))
}

/// Axis-aligned bounding box.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Aabb {
    pub min: Vec3,
    pub max: Vec3,
}

impl Aabb {
    pub fn empty() -> Self {
        Aabb {
            min: [f64::INFINITY; 3],
            max: [f64::NEG_INFINITY; 3],
        }
    }

    pub fn insert(&mut self, p: Vec3) {
        for d in 0..3 {
            self.min[d] = self.min[d].min(p[d]);
            self.max[d] = self.max[d].max(p[d]);
        }
    }

    pub fn union(&self, other: &Aabb) -> Aabb {
        let mut out = *self;
        out.insert(other.min);
        out.insert(other.max);
        out
    }

    pub fn diameter(&self) -> f64 {
        dist(self.min, self.max)
    }

    pub fn center(&self) -> Vec3 {
        scale(add(self.min, self.max), 0.5)
    }

    /// Euclidean distance between two boxes (zero when they overlap).
    pub fn distance(&self, other: &Aabb) -> f64 {
        let mut s = 0.0;
        for d in 0..3 {
            let gap = (other.min[d] - self.max[d]).max(self.min[d] - other.max[d]);
            if gap > 0.0 {
                s += gap * gap;
            }
        }
        s.sqrt()
    }

    /// Distance from a point to the box.
    pub fn distance_to_point(&self, p: Vec3) -> f64 {
        let mut s = 0.0;
        for d in 0..3 {
            let gap = (self.min[d] - p[d]).max(p[d] - self.max[d]);
            if gap > 0.0 {
                s += gap * gap;
            }
        }
        s.sqrt()
    }
}
