//! Reference implementations for tests. Nothing here calls into the crate
//! under test; every value is derived from first principles.

use std::f64::consts::PI;

/// One reference-vs-candidate comparison.
#[derive(Debug, Clone)]
pub struct OracleReport {
    pub case: String,
    pub reference: Vec<f64>,
    pub candidate: Vec<f64>,
    pub tolerance: f64,
}

impl OracleReport {
    pub fn new(case: impl Into<String>, reference: Vec<f64>, candidate: Vec<f64>, tolerance: f64) -> Self {
        Self { case: case.into(), reference, candidate, tolerance }
    }

    pub fn max_error(&self) -> f64 {
        if self.reference.len() != self.candidate.len() {
            return f64::INFINITY;
        }
        self.reference
            .iter()
            .zip(&self.candidate)
            .map(|(r, c)| (r - c).abs())
            .fold(0.0, |a, e| if e.is_nan() { f64::INFINITY } else { a.max(e) })
    }

    pub fn pass(&self) -> bool {
        self.max_error() <= self.tolerance
    }

    #[track_caller]
    pub fn assert(&self) {
        assert!(
            self.pass(),
            "{}: |reference - candidate| = {:e} > {:e}\n  reference {:?}\n  candidate {:?}",
            self.case,
            self.max_error(),
            self.tolerance,
            self.reference,
            self.candidate
        );
    }
}

// ------------------------------------------------------------------ Ishigami

pub fn ishigami(x: &[f64], a: f64, b: f64) -> f64 {
    x[0].sin() + a * x[1].sin().powi(2) + b * x[2].powi(4) * x[0].sin()
}

/// Closed-form variance decomposition of the Ishigami function with
/// inputs uniform on [-π, π]³.
///
/// With E[sin²] = 1/2, E[sin⁴] = 3/8, E[x⁴] = π⁴/5, E[x⁸] = π⁸/9:
/// - V₁ = ½(1 + bπ⁴/5)²
/// - V₂ = a²(3/8 − 1/4) = a²/8
/// - V₁₃ = b²π⁸/2 · (1/9 − 1/25) = 8b²π⁸/225
/// - V₃ = V₁₂ = V₂₃ = V₁₂₃ = 0
pub struct IshigamiIndices {
    pub variance: f64,
    pub s1: [f64; 3],
    pub st: [f64; 3],
}

pub fn ishigami_analytic(a: f64, b: f64) -> IshigamiIndices {
    let p4 = PI.powi(4);
    let p8 = PI.powi(8);
    let v1 = 0.5 * (1.0 + b * p4 / 5.0).powi(2);
    let v2 = a * a / 8.0;
    let v13 = 8.0 * b * b * p8 / 225.0;
    let v = v1 + v2 + v13;
    IshigamiIndices { variance: v, s1: [v1 / v, v2 / v, 0.0], st: [(v1 + v13) / v, v2 / v, v13 / v] }
}

// --------------------------------------------------------------- power flow

/// Receiving-end voltage magnitude of a two-bus system feeding a constant
/// P + jQ load through R + jX from a source at V0.
///
/// From V0 = V + (R + jX)(P − jQ)/V* with V real:
/// |V|⁴ + |V|²(2(PR + QX) − V0²) + (P² + Q²)(R² + X²) = 0.
/// The larger root is the stable operating point.
pub fn two_bus_voltage(p: f64, q: f64, r: f64, x: f64, v0: f64) -> Result<f64, String> {
    let b = 2.0 * (p * r + q * x) - v0 * v0;
    let c = (p * p + q * q) * (r * r + x * x);
    let disc = b * b - 4.0 * c;
    if disc < 0.0 {
        return Err(format!("beyond loadability (discriminant {disc:e})"));
    }
    let u = (-b + disc.sqrt()) / 2.0;
    if u <= 0.0 {
        return Err("no positive root".into());
    }
    Ok(u.sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cx {
    pub re: f64,
    pub im: f64,
}

impl Cx {
    pub fn new(re: f64, im: f64) -> Self {
        Self { re, im }
    }
    fn add(self, o: Cx) -> Cx {
        Cx::new(self.re + o.re, self.im + o.im)
    }
    fn sub(self, o: Cx) -> Cx {
        Cx::new(self.re - o.re, self.im - o.im)
    }
    fn mul(self, o: Cx) -> Cx {
        Cx::new(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)
    }
    fn conj(self) -> Cx {
        Cx::new(self.re, -self.im)
    }
    fn inv(self) -> Cx {
        let d = self.re * self.re + self.im * self.im;
        Cx::new(self.re / d, -self.im / d)
    }
    pub fn abs(self) -> f64 {
        self.re.hypot(self.im)
    }
}

fn solve_dense(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() < 1e-300 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        let pivot = a[col].clone();
        for row in col + 1..n {
            let f = a[row][col] / pivot[col];
            for (x, p) in a[row][col..].iter_mut().zip(&pivot[col..]) {
                *x -= f * p;
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let s: f64 = (i + 1..n).map(|k| a[i][k] * x[k]).sum();
        x[i] = (b[i] - s) / a[i][i];
    }
    Some(x)
}

/// Full Newton–Raphson on the bus admittance matrix of the chain
/// 0 –z01– 1 –z12– 2, in rectangular coordinates, with a finite-difference
/// Jacobian. `s` are per-unit injections at buses 1 and 2, generation
/// positive. Returns the complex voltages of all three buses.
pub fn newton_three_bus(z01: Cx, z12: Cx, v0: f64, s: [Cx; 2]) -> Result<[Cx; 3], String> {
    let (y01, y12) = (z01.inv(), z12.inv());
    let zero = Cx::new(0.0, 0.0);
    let ybus = [
        [y01, zero.sub(y01), zero],
        [zero.sub(y01), y01.add(y12), zero.sub(y12)],
        [zero, zero.sub(y12), y12],
    ];
    let mismatch = |x: &[f64]| -> Vec<f64> {
        let v = [Cx::new(v0, 0.0), Cx::new(x[0], x[1]), Cx::new(x[2], x[3])];
        let mut f = Vec::with_capacity(4);
        for i in 1..3 {
            let mut inj = zero;
            for j in 0..3 {
                inj = inj.add(ybus[i][j].mul(v[j]));
            }
            let si = v[i].mul(inj.conj());
            f.push(si.re - s[i - 1].re);
            f.push(si.im - s[i - 1].im);
        }
        f
    };
    let mut x = vec![v0, 0.0, v0, 0.0];
    for _ in 0..60 {
        let f = mismatch(&x);
        let norm = f.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        if norm < 1e-12 {
            return Ok([Cx::new(v0, 0.0), Cx::new(x[0], x[1]), Cx::new(x[2], x[3])]);
        }
        let h = 1e-7;
        let mut jac = vec![vec![0.0; 4]; 4];
        for k in 0..4 {
            let mut xp = x.clone();
            let mut xm = x.clone();
            xp[k] += h;
            xm[k] -= h;
            let (fp, fm) = (mismatch(&xp), mismatch(&xm));
            for r in 0..4 {
                jac[r][k] = (fp[r] - fm[r]) / (2.0 * h);
            }
        }
        let dx = solve_dense(jac, f.iter().map(|v| -v).collect()).ok_or("singular Jacobian")?;
        for k in 0..4 {
            x[k] += dx[k];
        }
    }
    Err("Newton did not converge".into())
}

// ----------------------------------------------------------------- sampling

/// Exact star discrepancy of a 2-D point set: the supremum over anchored
/// boxes [0,u)×[0,v) is attained at box corners taken from the point
/// coordinates (or 1), counting points both open and closed.
pub fn star_discrepancy_2d(points: &[[f64; 2]]) -> f64 {
    let n = points.len() as f64;
    let mut us: Vec<f64> = points.iter().map(|p| p[0]).chain([1.0]).collect();
    let mut vs: Vec<f64> = points.iter().map(|p| p[1]).chain([1.0]).collect();
    us.sort_by(f64::total_cmp);
    vs.sort_by(f64::total_cmp);
    let mut d = 0.0f64;
    for &u in &us {
        for &v in &vs {
            let open = points.iter().filter(|p| p[0] < u && p[1] < v).count() as f64;
            let closed = points.iter().filter(|p| p[0] <= u && p[1] <= v).count() as f64;
            let vol = u * v;
            d = d.max(vol - open / n).max(closed / n - vol);
        }
    }
    d
}

// ----------------------------------------------------------------- geometry

pub fn cylinder_volume_m3(diameter_m: f64, height_m: f64) -> f64 {
    PI * diameter_m * diameter_m / 4.0 * height_m
}

/// Sensible heat of `volume_m3` of water over `delta_k`, in kWh.
pub fn sensible_heat_kwh(volume_m3: f64, delta_k: f64) -> f64 {
    volume_m3 * 1000.0 * 4186.0 * delta_k / 3.6e6
}

// ---------------------------------------------------------------------- OAT

/// Ranks by counting: rank = 1 + #factors with a larger score, or an equal
/// score and a smaller name. Scores are population variances of
/// (min, base, max). Returns per-metric ranks and the mean rank per factor.
pub fn brute_force_oat_ranks(factors: &[&str], triples: &[[f64; 3]], metrics: usize) -> (Vec<Vec<usize>>, Vec<f64>) {
    // triples[m * factors.len() + f] = values for factor f under metric m
    let k = factors.len();
    let var = |t: &[f64; 3]| {
        let mean = (t[0] + t[1] + t[2]) / 3.0;
        t.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / 3.0
    };
    let mut ranks = vec![vec![0; k]; metrics];
    for m in 0..metrics {
        let scores: Vec<f64> = (0..k).map(|f| var(&triples[m * k + f])).collect();
        for f in 0..k {
            let ahead = (0..k)
                .filter(|&g| scores[g] > scores[f] || (scores[g] == scores[f] && factors[g] < factors[f]))
                .count();
            ranks[m][f] = ahead + 1;
        }
    }
    let mean = (0..k).map(|f| ranks.iter().map(|r| r[f] as f64).sum::<f64>() / metrics as f64).collect();
    (ranks, mean)
}
