/// The pair of weights `(alpha, 1 - alpha)` applied to the two contributors
/// of a blend.
///
/// The larger weight is always the one taken verbatim and the smaller one is
/// derived as its complement. Swapping the contributors and replacing `alpha`
/// by `1 - alpha` therefore produces bit-identical weights, so
/// `blend(a, b, alpha) == blend(b, a, 1 - alpha)` holds exactly in floating
/// point and not just up to rounding.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlendWeights {
    pub a: f64,
    pub b: f64,
}

impl BlendWeights {
    /// `alpha` must lie in `[0, 1]`; callers validate.
    pub fn new(alpha: f64) -> Self {
        if alpha >= 0.5 {
            BlendWeights {
                a: alpha,
                b: 1.0 - alpha,
            }
        } else {
            let b = 1.0 - alpha;
            BlendWeights { a: 1.0 - b, b }
        }
    }

    pub fn swapped(self) -> Self {
        BlendWeights {
            a: self.b,
            b: self.a,
        }
    }

    #[inline]
    pub fn mix(&self, x: f64, y: f64) -> f64 {
        self.a * x + self.b * y
    }
}

pub(crate) fn alpha_is_valid(alpha: f64) -> bool {
    (0.0..=1.0).contains(&alpha)
}
