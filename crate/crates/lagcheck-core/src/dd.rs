//! Double-double arithmetic (~31 significant decimal digits).
//!
//! Used to polish polynomial roots past the f64 cancellation floor: the
//! exponential partial sum evaluated near a large root loses up to
//! `|x| / ln 10` digits to cancellation, so plain f64 Newton stalls long
//! before the residual contract is met. Error-free transforms (Dekker /
//! Knuth, with FMA for products) provide the needed headroom without an
//! arbitrary-precision dependency.

/// Unevaluated sum `hi + lo` with `|lo| <= ulp(hi)/2`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) struct Dd {
    pub hi: f64,
    pub lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let err = (a - (s - bb)) + (b - bb);
    (s, err)
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    // requires |a| >= |b|
    let s = a + b;
    let err = b - (s - a);
    (s, err)
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    let err = a.mul_add(b, -p);
    (p, err)
}

impl Dd {
    pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };
    pub const ONE: Dd = Dd { hi: 1.0, lo: 0.0 };

    #[inline]
    pub fn from(x: f64) -> Dd {
        Dd { hi: x, lo: 0.0 }
    }

    #[inline]
    pub fn add(self, o: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, o.hi);
        let e = e + self.lo + o.lo;
        let (hi, lo) = quick_two_sum(s, e);
        Dd { hi, lo }
    }

    #[inline]
    pub fn sub(self, o: Dd) -> Dd {
        self.add(o.neg())
    }

    #[inline]
    pub fn neg(self) -> Dd {
        Dd {
            hi: -self.hi,
            lo: -self.lo,
        }
    }

    #[inline]
    pub fn mul(self, o: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, o.hi);
        let e = e + self.hi * o.lo + self.lo * o.hi;
        let (hi, lo) = quick_two_sum(p, e);
        Dd { hi, lo }
    }

    #[inline]
    pub fn div(self, o: Dd) -> Dd {
        let q1 = self.hi / o.hi;
        let r = self.sub(o.mul_f64(q1));
        let q2 = r.hi / o.hi;
        let r = r.sub(o.mul_f64(q2));
        let q3 = r.hi / o.hi;
        let (hi, lo) = quick_two_sum(q1, q2);
        Dd { hi, lo }.add(Dd::from(q3))
    }

    #[inline]
    pub fn mul_f64(self, x: f64) -> Dd {
        let (p, e) = two_prod(self.hi, x);
        let e = e + self.lo * x;
        let (hi, lo) = quick_two_sum(p, e);
        Dd { hi, lo }
    }
}

/// Complex number with double-double components.
#[derive(Clone, Copy, Debug)]
pub(crate) struct CDd {
    pub re: Dd,
    pub im: Dd,
}

impl CDd {
    pub const ONE: CDd = CDd {
        re: Dd::ONE,
        im: Dd::ZERO,
    };

    #[inline]
    pub fn new(re: f64, im: f64) -> CDd {
        CDd {
            re: Dd::from(re),
            im: Dd::from(im),
        }
    }

    #[inline]
    pub fn add(self, o: CDd) -> CDd {
        CDd {
            re: self.re.add(o.re),
            im: self.im.add(o.im),
        }
    }

    #[inline]
    pub fn sub(self, o: CDd) -> CDd {
        CDd {
            re: self.re.sub(o.re),
            im: self.im.sub(o.im),
        }
    }

    #[inline]
    pub fn mul(self, o: CDd) -> CDd {
        CDd {
            re: self.re.mul(o.re).sub(self.im.mul(o.im)),
            im: self.re.mul(o.im).add(self.im.mul(o.re)),
        }
    }

    #[inline]
    pub fn div(self, o: CDd) -> CDd {
        // |o| stays O(n) in this crate, no overflow concern
        let den = o.re.mul(o.re).add(o.im.mul(o.im));
        let re = self.re.mul(o.re).add(self.im.mul(o.im)).div(den);
        let im = self.im.mul(o.re).sub(self.re.mul(o.im)).div(den);
        CDd { re, im }
    }

    #[inline]
    pub fn div_f64(self, x: f64) -> CDd {
        let d = Dd::from(x);
        CDd {
            re: self.re.div(d),
            im: self.im.div(d),
        }
    }

    /// Euclidean magnitude, in f64 (enough for residual reporting).
    #[inline]
    pub fn abs(self) -> f64 {
        self.re.hi.hypot(self.im.hi)
    }
}

/// `sum_{k=0..n} z^k / k!` in double-double, nested so every division is by
/// a small integer.
pub(crate) fn exp_partial_sum_cdd(n: u32, z: CDd) -> CDd {
    let mut acc = CDd::ONE;
    for k in (1..=n).rev() {
        // acc = 1 + z * acc / k
        acc = CDd::ONE.add(z.mul(acc).div_f64(k as f64));
    }
    acc
}
