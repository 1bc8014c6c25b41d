//! Adaptive Gauss–Kronrod (7/15) quadrature of a weight function and its
//! first moment on a finite interval.

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];

/// Gauss weights for the nodes XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

const MAX_INTERVALS: usize = 2000;

#[derive(Debug, Clone, Copy)]
struct Piece {
    a: f64,
    b: f64,
    mass: f64,
    moment: f64,
    err_mass: f64,
    err_moment: f64,
}

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Piece {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut xs = [0.0; 15];
    let mut ys = [0.0; 15];
    let mut ws = [0.0; 15];
    for i in 0..8 {
        let pts: &[f64] = if i == 7 { &[c] } else { &[c - h * XGK[i], c + h * XGK[i]] };
        for (j, &x) in pts.iter().enumerate() {
            let slot = if i == 7 { 14 } else { 2 * i + j };
            xs[slot] = x;
            ys[slot] = f(x);
            ws[slot] = WGK[i];
        }
    }
    let (mass, err_mass) = rule(&ys, &ws, h);
    let moments: [f64; 15] = std::array::from_fn(|i| ys[i] * xs[i]);
    let (moment, err_moment) = rule(&moments, &ws, h);
    Piece {
        a,
        b,
        mass,
        moment,
        err_mass,
        err_moment,
    }
}

/// Kronrod estimate and QUADPACK-style error estimate for values laid out
/// as pairs `(c - h x_i, c + h x_i)` for `i = 0..7` followed by the centre.
fn rule(ys: &[f64; 15], ws: &[f64; 15], h: f64) -> (f64, f64) {
    let k: f64 = ys.iter().zip(ws).map(|(y, w)| y * w).sum();
    let mut g = WG[3] * ys[14];
    for i in 0..3 {
        let odd = 2 * i + 1;
        g += WG[i] * (ys[2 * odd] + ys[2 * odd + 1]);
    }
    let mean = 0.5 * k;
    let resasc: f64 = ys.iter().zip(ws).map(|(y, w)| w * (y - mean).abs()).sum::<f64>() * h;
    let mut err = ((k - g) * h).abs();
    if resasc != 0.0 && err != 0.0 {
        err = resasc * (200.0 * err / resasc).powf(1.5).min(1.0);
    }
    (k * h, err)
}

/// Integrates `f` and `x f(x)` over the union of `breaks` (sorted), refining
/// the worst piece until both relative error estimates drop below `rel_tol`.
///
/// Returns `(∫ f, ∫ x f)`.
pub(crate) fn integrate_with_moment<F: Fn(f64) -> f64>(f: F, breaks: &[f64], rel_tol: f64) -> (f64, f64) {
    let mut pieces: Vec<Piece> = breaks
        .windows(2)
        .filter(|w| w[1] > w[0])
        .map(|w| gk15(&f, w[0], w[1]))
        .collect();
    loop {
        let mass: f64 = pieces.iter().map(|p| p.mass).sum();
        let moment: f64 = pieces.iter().map(|p| p.moment).sum();
        let err_mass: f64 = pieces.iter().map(|p| p.err_mass).sum();
        let err_moment: f64 = pieces.iter().map(|p| p.err_moment).sum();
        let done = err_mass <= rel_tol * mass.abs() && err_moment <= rel_tol * moment.abs();
        if done || pieces.len() >= MAX_INTERVALS {
            return (mass, moment);
        }
        let worst = pieces
            .iter()
            .enumerate()
            .max_by(|(_, p), (_, q)| {
                let sp = p.err_mass / mass.abs().max(f64::MIN_POSITIVE)
                    + p.err_moment / moment.abs().max(f64::MIN_POSITIVE);
                let sq = q.err_mass / mass.abs().max(f64::MIN_POSITIVE)
                    + q.err_moment / moment.abs().max(f64::MIN_POSITIVE);
                sp.total_cmp(&sq)
            })
            .map(|(i, _)| i)
            .expect("at least one piece");
        let p = pieces.swap_remove(worst);
        let mid = 0.5 * (p.a + p.b);
        if !(mid > p.a && mid < p.b) {
            return (mass, moment);
        }
        pieces.push(gk15(&f, p.a, mid));
        pieces.push(gk15(&f, mid, p.b));
    }
}
