//! Gauss–Kronrod (7, 15) rule on complex line segments.

use crate::C64;

/// Kronrod abscissae on [0, 1]; the odd entries are the Gauss nodes.
pub const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];

pub const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];

pub const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

/// The 15 Kronrod nodes on [−1, 1] with their weights, in increasing order.
pub fn kronrod_nodes() -> [(f64, f64); 15] {
    let mut out = [(0.0, 0.0); 15];
    for i in 0..7 {
        out[i] = (-XGK[i], WGK[i]);
        out[14 - i] = (XGK[i], WGK[i]);
    }
    out[7] = (0.0, WGK[7]);
    out
}

/// Kronrod and Gauss estimates of ∫_{−1}^{1} of a sampled function.
pub struct Gk15 {
    pub kronrod: C64,
    pub gauss: C64,
    pub abs: f64,
}

/// Applies the rule to `f` on [−1, 1].
pub fn gk15<E>(mut f: impl FnMut(f64) -> Result<C64, E>) -> Result<Gk15, E> {
    let fc = f(0.0)?;
    let mut k = fc * WGK[7];
    let mut g = fc * WG[3];
    let mut abs = fc.norm() * WGK[7];
    for i in 0..7 {
        let a = f(-XGK[i])?;
        let b = f(XGK[i])?;
        k += (a + b) * WGK[i];
        abs += (a.norm() + b.norm()) * WGK[i];
        if i % 2 == 1 {
            g += (a + b) * WG[i / 2];
        }
    }
    Ok(Gk15 { kronrod: k, gauss: g, abs })
}

/// The same estimates from values already sampled at [`kronrod_nodes`].
pub fn gk15_values(v: &[C64]) -> Gk15 {
    let mut k = v[7] * WGK[7];
    let mut g = v[7] * WG[3];
    let mut abs = v[7].norm() * WGK[7];
    for i in 0..7 {
        let (a, b) = (v[i], v[14 - i]);
        k += (a + b) * WGK[i];
        abs += (a.norm() + b.norm()) * WGK[i];
        if i % 2 == 1 {
            g += (a + b) * WG[i / 2];
        }
    }
    Gk15 { kronrod: k, gauss: g, abs }
}

/// A straight piece τ(s) = mid + half·s, s ∈ [−1, 1].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Panel {
    pub a: C64,
    pub b: C64,
}

impl Panel {
    pub fn new(a: C64, b: C64) -> Self {
        Panel { a, b }
    }

    pub fn mid(&self) -> C64 {
        (self.a + self.b) * 0.5
    }

    pub fn half(&self) -> C64 {
        (self.b - self.a) * 0.5
    }

    pub fn at(&self, s: f64) -> C64 {
        self.mid() + self.half() * s
    }

    pub fn len(&self) -> f64 {
        (self.b - self.a).norm()
    }

    pub fn is_empty(&self) -> bool {
        self.a == self.b
    }

    pub fn split(&self) -> (Panel, Panel) {
        let m = self.mid();
        (Panel::new(self.a, m), Panel::new(m, self.b))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_exactness() {
        // Kronrod part integrates degree 22 exactly, Gauss part degree 13
        for deg in 0..=22u32 {
            let r = gk15::<()>(|s| Ok(C64::new(s.powi(deg as i32), 0.0))).unwrap();
            let want = if deg % 2 == 0 { 2.0 / (deg as f64 + 1.0) } else { 0.0 };
            assert!((r.kronrod.re - want).abs() < 1e-14, "kronrod deg {deg}");
            if deg <= 13 {
                assert!((r.gauss.re - want).abs() < 1e-14, "gauss deg {deg}");
            }
        }
    }

    #[test]
    fn weights_sum_to_two() {
        let s: f64 = kronrod_nodes().iter().map(|(_, w)| w).sum();
        assert!((s - 2.0).abs() < 1e-15);
    }
}
