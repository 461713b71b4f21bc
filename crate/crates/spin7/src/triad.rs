use crate::jet::Jet;
use crate::scalar::Scalar;

/// Metric functions `(a, b, c)` of `dt² + 4a²(R₁²+R₂²) + 4b²R₃² + c²Pₐ²`
/// as jets in `t`. `b` is signed.
#[derive(Clone, Debug, PartialEq)]
pub struct TriadJet<S> {
    pub a: Jet<S>,
    pub b: Jet<S>,
    pub c: Jet<S>,
}

impl<S: Scalar> TriadJet<S> {
    pub fn new(a: Jet<S>, b: Jet<S>, c: Jet<S>) -> Self {
        TriadJet { a, b, c }
    }

    /// Values and first derivatives only.
    pub fn first_order(a: S, b: S, c: S, da: S, db: S, dc: S) -> Self {
        TriadJet { a: Jet::new(&[a, da]), b: Jet::new(&[b, db]), c: Jet::new(&[c, dc]) }
    }

    pub fn values(&self) -> [S; 3] {
        [self.a.value().clone(), self.b.value().clone(), self.c.value().clone()]
    }

    /// Number of jet entries carried by all three functions.
    pub fn order(&self) -> usize {
        self.a.len().min(self.b.len()).min(self.c.len())
    }

    pub fn is_regular(&self) -> bool {
        self.values().iter().all(|x| !x.is_zero())
    }

    /// Metric under `t → λt`, `(a,b,c) → λ(a,b,c)`.
    pub fn rescaled(&self, lambda: &S) -> Self {
        let f = |j: &Jet<S>| {
            let mut e = Vec::new();
            let mut p = lambda.clone();
            for x in j.entries() {
                e.push(x.clone() * p.clone());
                p = p / lambda.clone();
            }
            Jet::new(&e)
        };
        TriadJet { a: f(&self.a), b: f(&self.b), c: f(&self.c) }
    }

    pub fn to_f64(&self) -> TriadJet<f64> {
        TriadJet { a: self.a.map_to_f64(), b: self.b.map_to_f64(), c: self.c.map_to_f64() }
    }
}
