//! Real Clifford algebra in eight dimensions, the parallel spinor, the spin
//! connection of the ansatz and the Cayley calibration.
//!
//! Clifford index = frame index: `P₀..P₃ → 0..3`, `1̂, 2̂, 3̂ → 4..6`, `8 → 7`.
//! All gamma matrices are symmetric with entries in `{−1, 0, 1}`.

use std::collections::BTreeMap;

use nalgebra::{Matrix4, SMatrix};
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use rand::Rng;
use serde::Serialize;

use crate::curvature::connection;
use crate::error::{Error, Result};
use crate::gradient_flow::flow_rhs;
use crate::invariant_forms::{frame_hodge_star, sort_sign, Form, Frame, Generator};
use crate::jet::Jet;
use crate::linalg::{null_space, solve_unique};
use crate::scalar::Scalar;
use crate::triad::TriadJet;

pub const DIM: usize = 16;

/// 16×16 integer matrix, row-major.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct IntMatrix(pub Vec<i64>);

impl IntMatrix {
    pub fn zero() -> Self {
        IntMatrix(vec![0; DIM * DIM])
    }

    pub fn identity() -> Self {
        let mut m = Self::zero();
        for i in 0..DIM {
            m.0[i * DIM + i] = 1;
        }
        m
    }

    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.0[i * DIM + j]
    }

    pub fn mul(&self, o: &IntMatrix) -> IntMatrix {
        let mut out = Self::zero();
        for i in 0..DIM {
            for k in 0..DIM {
                let a = self.get(i, k);
                if a != 0 {
                    for j in 0..DIM {
                        out.0[i * DIM + j] += a * o.get(k, j);
                    }
                }
            }
        }
        out
    }

    pub fn add(&self, o: &IntMatrix) -> IntMatrix {
        IntMatrix(self.0.iter().zip(&o.0).map(|(a, b)| a + b).collect())
    }

    pub fn scale(&self, s: i64) -> IntMatrix {
        IntMatrix(self.0.iter().map(|a| a * s).collect())
    }

    pub fn transpose(&self) -> IntMatrix {
        let mut out = Self::zero();
        for i in 0..DIM {
            for j in 0..DIM {
                out.0[j * DIM + i] = self.get(i, j);
            }
        }
        out
    }

    pub fn trace(&self) -> i64 {
        (0..DIM).map(|i| self.get(i, i)).sum()
    }

    pub fn apply<S: Scalar>(&self, v: &[S]) -> Vec<S> {
        (0..DIM)
            .map(|i| {
                (0..DIM).fold(S::zero(), |acc, j| match self.get(i, j) {
                    0 => acc,
                    k => acc + S::int(k) * v[j].clone(),
                })
            })
            .collect()
    }
}

fn kron(a: &[i64], an: usize, b: &[i64], bn: usize) -> Vec<i64> {
    let n = an * bn;
    let mut out = vec![0; n * n];
    for i in 0..an {
        for j in 0..an {
            for k in 0..bn {
                for l in 0..bn {
                    out[(i * bn + k) * n + j * bn + l] = a[i * an + j] * b[k * bn + l];
                }
            }
        }
    }
    out
}

fn seed(c: char) -> [i64; 4] {
    match c {
        '1' => [1, 0, 0, 1],
        'x' => [0, 1, 1, 0],
        'z' => [1, 0, 0, -1],
        'e' => [0, 1, -1, 0],
        _ => unreachable!(),
    }
}

/// The seven antisymmetric, mutually anticommuting 8×8 blocks.
const LAMBDA_WORDS: [&str; 7] = ["11e", "1ex", "xez", "zez", "e1z", "exx", "ezx"];

#[derive(Clone, Debug)]
pub struct CliffordBasis {
    pub gammas: Vec<IntMatrix>,
}

impl CliffordBasis {
    /// `Γᵢ = [[0, λᵢ], [−λᵢ, 0]]` (i < 7), `Γ₇ = [[0, 1], [1, 0]]`.
    pub fn build() -> Self {
        let mut gammas = Vec::with_capacity(8);
        let block = |lam: &[i64], sign_lower: i64| {
            let mut m = IntMatrix::zero();
            for i in 0..8 {
                for j in 0..8 {
                    m.0[i * DIM + 8 + j] = lam[i * 8 + j];
                    m.0[(8 + i) * DIM + j] = sign_lower * lam[i * 8 + j];
                }
            }
            m
        };
        for w in LAMBDA_WORDS {
            let s: Vec<[i64; 4]> = w.chars().map(seed).collect();
            let lam = kron(&kron(&s[0], 2, &s[1], 2), 4, &s[2], 2);
            gammas.push(block(&lam, -1));
        }
        let mut id8 = vec![0; 64];
        for i in 0..8 {
            id8[i * 8 + i] = 1;
        }
        gammas.push(block(&id8, 1));
        CliffordBasis { gammas }
    }

    pub fn product(&self, idx: &[usize]) -> IntMatrix {
        idx.iter().fold(IntMatrix::identity(), |m, &a| m.mul(&self.gammas[a]))
    }

    /// `Γ₉ = Γ₀Γ₁⋯Γ₇`.
    pub fn chirality(&self) -> IntMatrix {
        self.product(&[0, 1, 2, 3, 4, 5, 6, 7])
    }

    /// `max |{Γ_A, Γ_B} − 2δ_AB|` over all 36 pairs.
    pub fn anticommutator_defect(&self) -> i64 {
        let id = IntMatrix::identity();
        let mut worst = 0;
        for a in 0..8 {
            for b in a..8 {
                let ac = self.gammas[a].mul(&self.gammas[b]).add(&self.gammas[b].mul(&self.gammas[a]));
                let target = if a == b { id.scale(2) } else { IntMatrix::zero() };
                let d = ac.0.iter().zip(&target.0).map(|(x, y)| (x - y).abs()).max().unwrap();
                worst = worst.max(d);
            }
        }
        worst
    }

    pub fn all_symmetric(&self) -> bool {
        self.gammas.iter().all(|g| g.transpose() == *g)
    }
}

/// Frame labels for messages.
pub const FRAME_LABELS: [&str; 8] = ["e0", "e1", "e2", "e3", "h1", "h2", "h3", "e8"];
const H: [usize; 4] = [0, 4, 5, 6];
const E8: usize = 7;

fn gg(cl: &CliffordBasis, a: usize, b: usize) -> IntMatrix {
    cl.product(&[a, b])
}

fn combo(cl: &CliffordBasis, terms: &[(i64, usize, usize)]) -> IntMatrix {
    terms.iter().fold(IntMatrix::zero(), |m, &(s, a, b)| m.add(&gg(cl, a, b).scale(s)))
}

/// The three projection operators that fix η.
pub fn projection_operators(cl: &CliffordBasis) -> [IntMatrix; 3] {
    [
        combo(cl, &[(2, 0, E8), (-1, 1, H[1]), (-1, 2, H[2])]),
        combo(cl, &[(1, 0, E8), (-1, 3, H[3])]),
        combo(cl, &[(2, 1, E8), (1, 0, H[1]), (1, 3, H[2])]),
    ]
}

/// The fifteen combinations into which the spin connection of a flow triad
/// decomposes, labelled by frame direction.
pub fn structure_combinations(cl: &CliffordBasis) -> Vec<(&'static str, IntMatrix)> {
    let (h1, h2, h3) = (H[1], H[2], H[3]);
    vec![
        ("e0", combo(cl, &[(2, 0, E8), (-1, 1, h1), (-1, 2, h2)])),
        ("e0", combo(cl, &[(1, 0, E8), (-1, 3, h3)])),
        ("e1", combo(cl, &[(2, 1, E8), (1, 0, h1), (1, 3, h2)])),
        ("e1", combo(cl, &[(1, 1, E8), (-1, 2, h3)])),
        ("e2", combo(cl, &[(2, 2, E8), (1, 0, h2), (-1, 3, h1)])),
        ("e2", combo(cl, &[(1, 2, E8), (1, 1, h3)])),
        ("e3", combo(cl, &[(2, 3, E8), (-1, 1, h2), (1, 2, h1)])),
        ("e3", combo(cl, &[(1, 3, E8), (1, 0, h3)])),
        ("h1", combo(cl, &[(2, h1, E8), (-1, 0, 1), (-1, 2, 3)])),
        ("h1", combo(cl, &[(1, h1, E8), (1, h2, h3)])),
        ("h2", combo(cl, &[(2, h2, E8), (-1, 0, 2), (-1, 3, 1)])),
        ("h2", combo(cl, &[(1, h2, E8), (1, h3, h1)])),
        ("h3", combo(cl, &[(1, h3, E8), (1, h1, h2)])),
        ("h3", combo(cl, &[(2, h3, E8), (-1, 0, 3), (-1, 1, 2)])),
        ("h3", combo(cl, &[(2, h1, h2), (1, 0, 3), (1, 1, 2)])),
    ]
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Spinor {
    /// Exact kernel vector, first nonzero component positive.
    #[serde(skip)]
    pub exact: Vec<BigRational>,
    /// Unit-normalised components.
    pub components: Vec<f64>,
    /// Eigenvalue of `Γ₉`.
    pub chirality: i64,
}

/// Joint kernel of the projection operators, computed exactly.
pub fn parallel_spinor(cl: &CliffordBasis) -> Result<Spinor> {
    let rows: Vec<Vec<BigRational>> = projection_operators(cl)
        .iter()
        .flat_map(|m| (0..DIM).map(move |i| (0..DIM).map(|j| BigRational::int(m.get(i, j))).collect::<Vec<_>>()))
        .collect();
    let kernel = null_space(rows, DIM);
    if kernel.len() != 1 {
        return Err(Error::Convention(format!(
            "projection kernel has dimension {} (frame/Clifford index map is inconsistent)",
            kernel.len()
        )));
    }
    let mut v = kernel.into_iter().next().unwrap();
    let lead = v.iter().find(|x| !x.is_zero()).unwrap().clone();
    for x in v.iter_mut() {
        *x = x.clone() / lead.clone();
    }
    let g9 = cl.chirality().apply(&v);
    let chirality = if g9 == v {
        1
    } else if g9.iter().zip(&v).all(|(a, b)| *a == -b.clone()) {
        -1
    } else {
        return Err(Error::Convention("parallel spinor is not chiral".into()));
    };
    let norm = v.iter().map(|x| x.to_f64().powi(2)).sum::<f64>().sqrt();
    Ok(Spinor { components: v.iter().map(|x| x.to_f64() / norm).collect(), exact: v, chirality })
}

/// Direction of a spin-connection operator.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    Frame(usize),
    Gauge(Generator),
}

/// `½ Σ_{A<B} ω_{AB,C} Γ_AΓ_B` (the non-derivative part of `D_C`), row-major.
#[derive(Clone, Debug)]
pub struct SpinOperator<S> {
    pub direction: Direction,
    pub matrix: Vec<S>,
}

impl<S: Scalar> SpinOperator<S> {
    pub fn apply(&self, v: &[S]) -> Vec<S> {
        (0..DIM)
            .map(|i| (0..DIM).fold(S::zero(), |acc, j| acc + self.matrix[i * DIM + j].clone() * v[j].clone()))
            .collect()
    }

    /// Coefficient of `Γ_AΓ_B` (A ≠ B), via `tr(Γ_BΓ_A · O)/16`.
    pub fn gamma_coefficient(&self, cl: &CliffordBasis, a: usize, b: usize) -> S {
        let p = gg(cl, b, a);
        let mut tr = S::zero();
        for i in 0..DIM {
            for k in 0..DIM {
                let x = p.get(i, k);
                if x != 0 {
                    tr = tr + S::int(x) * self.matrix[k * DIM + i].clone();
                }
            }
        }
        tr / S::int(DIM as i64)
    }
}

fn assemble<S: Scalar>(cl: &CliffordBasis, direction: Direction, omega: impl Fn(usize, usize) -> Option<S>) -> SpinOperator<S> {
    let mut m = vec![S::zero(); DIM * DIM];
    for a in 0..8 {
        for b in a + 1..8 {
            let Some(w) = omega(a, b) else { continue };
            if w.is_zero() {
                continue;
            }
            let half = w * S::ratio(1, 2);
            let p = gg(cl, a, b);
            for (slot, &x) in m.iter_mut().zip(&p.0) {
                if x != 0 {
                    *slot = slot.clone() + half.clone() * S::int(x);
                }
            }
        }
    }
    SpinOperator { direction, matrix: m }
}

/// Spin-connection operators along the eight frame directions and the
/// gauge generators `L₁..L₃`.
pub fn covariant_derivative_operators<S: Scalar>(cl: &CliffordBasis, triad: &TriadJet<S>) -> Result<Vec<SpinOperator<S>>> {
    let conn = connection(triad)?;
    let mut out: Vec<SpinOperator<S>> = (0..8)
        .map(|c| assemble(cl, Direction::Frame(c), |a, b| Some(conn.component(a, b, c).value().clone())))
        .collect();
    for g in [Generator::L1, Generator::L2, Generator::L3] {
        out.push(assemble(cl, Direction::Gauge(g), |a, b| conn.gauge_component(a, b, g).map(|j| j.value().clone())));
    }
    Ok(out)
}

/// `max_C ‖O_C η‖_∞` for the unit parallel spinor: zero iff η is parallel.
pub fn holonomy_residual(triad: &TriadJet<f64>) -> Result<f64> {
    let cl = CliffordBasis::build();
    let eta = parallel_spinor(&cl)?;
    let ops = covariant_derivative_operators(&cl, triad)?;
    Ok(ops
        .iter()
        .flat_map(|o| o.apply(&eta.components))
        .fold(0.0, |m, x: f64| m.max(x.abs())))
}

/// Per-direction residuals `‖O_C η‖_∞`.
pub fn direction_residuals(triad: &TriadJet<f64>) -> Result<Vec<(Direction, f64)>> {
    let cl = CliffordBasis::build();
    let eta = parallel_spinor(&cl)?;
    Ok(covariant_derivative_operators(&cl, triad)?
        .into_iter()
        .map(|o| {
            let r = o.apply(&eta.components).into_iter().fold(0.0f64, |m, x| m.max(x.abs()));
            (o.direction, r)
        })
        .collect())
}

/// The Cayley form as constant frame components (bit `A` ↔ `eᴬ`).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CayleyForm {
    pub components: BTreeMap<u16, i64>,
}

impl CayleyForm {
    pub fn coefficient(&self, mask: u16) -> i64 {
        self.components.get(&mask).copied().unwrap_or(0)
    }

    /// Coefficient of the monomial `e^{idx}` with indices in any order.
    pub fn coefficient_of(&self, idx: &[usize]) -> i64 {
        let (s, mask) = sort_sign(idx);
        s as i64 * self.coefficient(mask)
    }

    pub fn frame_form<S: Scalar>(&self) -> Form<S> {
        Form::from_terms(self.components.iter().map(|(m, c)| (*m, Jet::constant(S::int(*c)))))
    }

    /// `Φ` in the generator basis, dressed with the triad.
    pub fn on_triad<S: Scalar>(&self, triad: &TriadJet<S>) -> Result<Form<S>> {
        Ok(Frame::spin7(triad)?.from_frame(&self.frame_form()))
    }

    pub fn is_self_dual(&self) -> bool {
        let f: Form<BigRational> = self.frame_form();
        frame_hodge_star(&f) == f
    }

    /// Fully antisymmetric component `Φ_{ABCD}`.
    pub fn tensor(&self, a: usize, b: usize, c: usize, d: usize) -> i64 {
        let idx = [a, b, c, d];
        if (0..4).any(|i| (i + 1..4).any(|j| idx[i] == idx[j])) {
            return 0;
        }
        self.coefficient_of(&idx)
    }

    /// `Φ(X₁, X₂, X₃, X₄)` for frame-component vectors.
    pub fn evaluate(&self, x: &[[f64; 8]; 4]) -> f64 {
        self.components
            .iter()
            .map(|(&mask, &c)| {
                let idx: Vec<usize> = (0..8).filter(|a| mask & (1 << a) != 0).collect();
                let m = Matrix4::from_fn(|i, j| x[i][idx[j]]);
                c as f64 * m.determinant()
            })
            .sum()
    }
}

/// `Φ_ABCD = η̄Γ_AΓ_BΓ_CΓ_Dη`, normalised so that the `e^{8 1̂ 2̂ 3̂}` coefficient is −1.
pub fn cayley_form(cl: &CliffordBasis, eta: &Spinor) -> Result<CayleyForm> {
    let mut raw = BTreeMap::new();
    for a in 0..8 {
        for b in a + 1..8 {
            for c in b + 1..8 {
                for d in c + 1..8 {
                    let v = cl.product(&[a, b, c, d]).apply(&eta.exact);
                    let s: BigRational = v.iter().zip(&eta.exact).map(|(x, y)| x * y).sum();
                    if !s.is_zero() {
                        raw.insert((1u16 << a) | (1 << b) | (1 << c) | (1 << d), s);
                    }
                }
            }
        }
    }
    // e^{8 1̂ 2̂ 3̂} = −e^{4567} in mask order
    let norm = raw
        .get(&0xf0)
        .cloned()
        .ok_or_else(|| Error::Convention("bilinear has no e^{8 1̂ 2̂ 3̂} component".into()))?;
    let mut components = BTreeMap::new();
    for (m, v) in raw {
        let q = v / norm.clone();
        if !q.is_integer() {
            return Err(Error::Convention(format!("non-integral Cayley component {q}")));
        }
        components.insert(m, q.to_integer().try_into().map_err(|_| Error::Convention("component overflow".into()))?);
    }
    Ok(CayleyForm { components })
}

/// The Cayley form of the standard Clifford basis.
pub fn standard_cayley_form() -> Result<CayleyForm> {
    let cl = CliffordBasis::build();
    cayley_form(&cl, &parallel_spinor(&cl)?)
}

/// `max |dΦ|` with `Φ` dressed by the triad (needs first derivatives).
pub fn closure_residual<S: Scalar>(phi: &CayleyForm, triad: &TriadJet<S>) -> Result<f64> {
    Ok(phi.on_triad(triad)?.d().values_only().max_abs())
}

/// Solve `dΦ = 0` for `(ȧ, ḃ, ċ)` at the point `(a, b, c)`. `dΦ` is affine in
/// the unknowns; the system is assembled from its values at four probes and
/// solved exactly. Errors when the solution is not unique.
pub fn recover_flow<S: Scalar>(phi: &CayleyForm, a: &S, b: &S, c: &S) -> Result<[S; 3]> {
    let probe = |d: [S; 3]| -> Result<BTreeMap<u16, S>> {
        let [x, y, z] = d;
        let t = TriadJet::first_order(a.clone(), b.clone(), c.clone(), x, y, z);
        Ok(phi.on_triad(&t)?.d().terms().map(|(m, j)| (*m, j.value().clone())).collect())
    };
    let base = probe([S::zero(), S::zero(), S::zero()])?;
    let cols: Vec<BTreeMap<u16, S>> = (0..3)
        .map(|k| {
            let mut d = [S::zero(), S::zero(), S::zero()];
            d[k] = S::one();
            probe(d)
        })
        .collect::<Result<_>>()?;
    let mut masks: Vec<u16> = base.keys().copied().collect();
    for c in &cols {
        masks.extend(c.keys().copied());
    }
    masks.sort_unstable();
    masks.dedup();
    let get = |m: &BTreeMap<u16, S>, k: u16| m.get(&k).cloned().unwrap_or_else(S::zero);
    let rows: Vec<Vec<S>> = masks
        .iter()
        .map(|&k| cols.iter().map(|c| get(c, k) - get(&base, k)).collect())
        .collect();
    let rhs: Vec<S> = masks.iter().map(|&k| -get(&base, k)).collect();
    if S::is_exact() {
        let sol = solve_unique(&rows, &rhs).ok_or_else(|| Error::Convention("dΦ = 0 does not fix (ȧ, ḃ, ċ) uniquely".into()))?;
        return Ok([sol[0].clone(), sol[1].clone(), sol[2].clone()]);
    }
    // floating path: least squares through the normal equations
    let mut n = [[0.0; 3]; 3];
    let mut r = [0.0; 3];
    for (row, b) in rows.iter().zip(&rhs) {
        for i in 0..3 {
            r[i] += row[i].to_f64() * b.to_f64();
            for j in 0..3 {
                n[i][j] += row[i].to_f64() * row[j].to_f64();
            }
        }
    }
    let m = nalgebra::Matrix3::from_fn(|i, j| n[i][j]);
    let sol = m
        .lu()
        .solve(&nalgebra::Vector3::new(r[0], r[1], r[2]))
        .ok_or_else(|| Error::Convention("dΦ = 0 does not fix (ȧ, ḃ, ċ) uniquely".into()))?;
    Ok([S::from_f64(sol[0]), S::from_f64(sol[1]), S::from_f64(sol[2])])
}

/// `|Φ(X₁..X₄)|` on the plane spanned by four frame-component vectors,
/// orthonormalised internally.
pub fn calibration_check(phi: &CayleyForm, plane: &[[f64; 8]; 4]) -> Result<f64> {
    let m = SMatrix::<f64, 8, 4>::from_fn(|i, j| plane[j][i]);
    let scale = m.column_iter().map(|c| c.norm()).fold(0.0, f64::max);
    let qr = m.qr();
    let r = qr.r();
    if scale == 0.0 || (0..4).any(|i| r[(i, i)].abs() <= 1e-10 * scale) {
        return Err(Error::DegeneratePlane);
    }
    let q = qr.q();
    let x: [[f64; 8]; 4] = std::array::from_fn(|j| std::array::from_fn(|i| q[(i, j)]));
    Ok(phi.evaluate(&x).abs())
}

/// Largest `|Φ|` over `n` random 4-planes with Gaussian spanning vectors.
pub fn random_calibration_max<R: Rng>(phi: &CayleyForm, n: usize, rng: &mut R) -> Result<f64> {
    use rand_distr::{Distribution, StandardNormal};
    let normal = StandardNormal;
    let mut worst: f64 = 0.0;
    for _ in 0..n {
        let plane: [[f64; 8]; 4] = std::array::from_fn(|_| std::array::from_fn(|_| Distribution::<f64>::sample(&normal, rng)));
        worst = worst.max(calibration_check(phi, &plane)?);
    }
    Ok(worst)
}

/// Basis of `{X ∈ so(8) : ½ Σ X_AB Γ_AΓ_B η = 0}`: the stabiliser algebra of η.
pub fn stabiliser_algebra(cl: &CliffordBasis, eta: &Spinor) -> Vec<[[BigRational; 8]; 8]> {
    let pairs: Vec<(usize, usize)> = (0..8).flat_map(|a| (a + 1..8).map(move |b| (a, b))).collect();
    let images: Vec<Vec<BigRational>> = pairs.iter().map(|&(a, b)| gg(cl, a, b).apply(&eta.exact)).collect();
    let rows: Vec<Vec<BigRational>> = (0..DIM).map(|i| images.iter().map(|v| v[i].clone()).collect()).collect();
    null_space(rows, pairs.len())
        .into_iter()
        .map(|x| {
            let mut m: [[BigRational; 8]; 8] = std::array::from_fn(|_| std::array::from_fn(|_| BigRational::zero()));
            for (k, &(a, b)) in pairs.iter().enumerate() {
                m[a][b] = x[k].clone();
                m[b][a] = -x[k].clone();
            }
            m
        })
        .collect()
}

/// `max |X·Φ|` for the derivation action of `X ∈ so(8)` on the 4-form.
pub fn stabiliser_defect(phi: &CayleyForm, x: &[[BigRational; 8]; 8]) -> BigRational {
    let mut worst = BigRational::zero();
    for a in 0..8 {
        for b in a + 1..8 {
            for c in b + 1..8 {
                for d in c + 1..8 {
                    let mut s = BigRational::zero();
                    for e in 0..8 {
                        let t = x[e][a].clone() * BigRational::int(phi.tensor(e, b, c, d))
                            + x[e][b].clone() * BigRational::int(phi.tensor(a, e, c, d))
                            + x[e][c].clone() * BigRational::int(phi.tensor(a, b, e, d))
                            + x[e][d].clone() * BigRational::int(phi.tensor(a, b, c, e));
                        s += t;
                    }
                    if s.abs() > worst {
                        worst = s.abs();
                    }
                }
            }
        }
    }
    worst
}

/// Flow data at `(a, b, c)` (helper for checks that need a flow triad).
pub fn flow_point<S: Scalar>(a: S, b: S, c: S) -> Result<TriadJet<S>> {
    let [da, db, dc] = flow_rhs(&a, &b, &c)?;
    Ok(TriadJet::first_order(a, b, c, da, db, dc))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;
    use rand::SeedableRng;

    type Q = BigRational;

    #[test]
    fn clifford_relations() {
        let cl = CliffordBasis::build();
        assert_eq!(cl.anticommutator_defect(), 0);
        assert!(cl.all_symmetric());
        assert!(cl.gammas.iter().all(|g| g.trace() == 0));
        let g9 = cl.chirality();
        assert_eq!(g9.mul(&g9), IntMatrix::identity());
    }

    #[test]
    fn spinor_is_unique_and_chiral() {
        let cl = CliffordBasis::build();
        let eta = parallel_spinor(&cl).unwrap();
        assert_eq!(eta.chirality, -1);
        let n: f64 = eta.components.iter().map(|x| x * x).sum();
        assert!((n - 1.0).abs() < 1e-15);
        assert_eq!(parallel_spinor(&cl).unwrap(), eta);
        for (label, m) in structure_combinations(&cl) {
            assert!(m.apply(&eta.exact).iter().all(|x| x.is_zero()), "{label}");
        }
    }

    #[test]
    fn cayley_form_pattern() {
        let phi = standard_cayley_form().unwrap();
        assert_eq!(phi.components.len(), 14);
        assert!(phi.components.values().all(|c| c.abs() == 1));
        assert_eq!(phi.coefficient(0x0f), -1);
        assert_eq!(phi.coefficient_of(&[7, 4, 5, 6]), -1);
        assert!(phi.is_self_dual());
        // ½ε e^{îĵ}Ĵᵏ and e⁸ e^î Ĵⁱ with Ĵ¹ = e⁰¹ + e²³
        assert_eq!(phi.coefficient_of(&[5, 6, 0, 1]), 1);
        assert_eq!(phi.coefficient_of(&[5, 6, 2, 3]), 1);
        assert_eq!(phi.coefficient_of(&[7, 4, 0, 1]), 1);
        assert_eq!(phi.coefficient_of(&[7, 6, 1, 2]), 1);
    }

    #[test]
    fn spin_connection_annihilates_eta_exactly_on_flow_triads() {
        let cl = CliffordBasis::build();
        let eta = parallel_spinor(&cl).unwrap();
        for (a, b, c) in [(1, 1, 1), (3, -2, 5), (2, 7, 3)] {
            let t = flow_point(Q::int(a), Q::int(b), Q::int(c)).unwrap();
            for op in covariant_derivative_operators(&cl, &t).unwrap() {
                assert!(op.apply(&eta.exact).iter().all(|x| x.is_zero()), "{:?}", op.direction);
            }
        }
    }

    #[test]
    fn e0_operator_contains_half_c_dot_over_c() {
        let cl = CliffordBasis::build();
        let t: TriadJet<Q> = TriadJet::first_order(Q::int(2), Q::int(3), Q::int(5), Q::int(7), Q::int(11), Q::int(13));
        let ops = covariant_derivative_operators(&cl, &t).unwrap();
        assert_eq!(ops[0].gamma_coefficient(&cl, 0, 7), Q::ratio(13, 10));
        assert_eq!(connection(&t).unwrap().component(0, 7, 0).value(), &Q::ratio(13, 5));
    }

    #[test]
    fn perturbed_flow_breaks_parallelism() {
        let t = flow_point(1.1, 0.7, 1.9).unwrap();
        assert!(holonomy_residual(&t).unwrap() < 1e-14);
        let mut a = t.a.entries().to_vec();
        a[1] += 1e-2;
        let bad = TriadJet::new(Jet::new(&a), t.b.clone(), t.c.clone());
        let res = direction_residuals(&bad).unwrap();
        let h1 = res.iter().find(|(d, _)| *d == Direction::Frame(4)).unwrap().1;
        assert!(h1 > 1e-4);
    }

    #[test]
    fn cayley_form_closed_exactly_and_recovers_flow() {
        let phi = standard_cayley_form().unwrap();
        for (a, b, c) in [(1, 1, 1), (3, -2, 5), (2, 7, 3)] {
            let (a, b, c) = (Q::int(a), Q::int(b), Q::int(c));
            assert_eq!(closure_residual(&phi, &flow_point(a.clone(), b.clone(), c.clone()).unwrap()).unwrap(), 0.0);
            assert_eq!(recover_flow(&phi, &a, &b, &c).unwrap(), flow_rhs(&a, &b, &c).unwrap());
        }
        let got = recover_flow(&phi, &0.8, &-0.3, &1.4).unwrap();
        let want = flow_rhs(&0.8, &-0.3, &1.4).unwrap();
        for i in 0..3 {
            assert!((got[i] - want[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn calibration_bound() {
        let phi = standard_cayley_form().unwrap();
        let unit = |i: usize| -> [f64; 8] { std::array::from_fn(|k| if k == i { 1.0 } else { 0.0 }) };
        let s4 = [unit(0), unit(1), unit(2), unit(3)];
        assert!((calibration_check(&phi, &s4).unwrap() - 1.0).abs() < 1e-15);
        let fibre = [unit(7), unit(4), unit(5), unit(6)];
        assert!((calibration_check(&phi, &fibre).unwrap() - 1.0).abs() < 1e-15);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        assert!(random_calibration_max(&phi, 2000, &mut rng).unwrap() <= 1.0 + 1e-9);
        let degenerate = [unit(0), unit(1), unit(2), unit(1)];
        assert!(matches!(calibration_check(&phi, &degenerate), Err(Error::DegeneratePlane)));
    }

    #[test]
    fn stabiliser_is_spin7_and_preserves_phi() {
        let cl = CliffordBasis::build();
        let eta = parallel_spinor(&cl).unwrap();
        let phi = cayley_form(&cl, &eta).unwrap();
        let alg = stabiliser_algebra(&cl, &eta);
        assert_eq!(alg.len(), 21);
        for x in &alg {
            assert!(stabiliser_defect(&phi, x).is_zero());
        }
        // a rotation outside the stabiliser moves Φ
        let mut x: [[Q; 8]; 8] = std::array::from_fn(|_| std::array::from_fn(|_| Q::zero()));
        x[0][7] = Q::one();
        x[7][0] = -Q::one();
        assert!(!stabiliser_defect(&phi, &x).is_zero());
    }
}
