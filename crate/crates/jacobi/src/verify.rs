//! Named verification suites. Each returns a [`Report`] carrying the case
//! count and, on failure, the offending values.

use std::fmt;
use std::str::FromStr;

use jacobi_core::coefficients::{
    arcsine_coefficient, c_by_route, cancellation_check, degree_bounds_hold, lambda_one_top_coefficient,
    quotient_coeffs, CoeffTable, LimitParams, Route,
};
use jacobi_core::exact::{choose, int, rat, HalfIntegerParams, Rational};
use jacobi_core::hypergeo::{carlitz_4f3, chu_reduction_pair, gauss_2f1_unity, hyp2f1};
use jacobi_core::moments::{
    biane_inner_sum, biane_limit, corollary21_moment, finite_moment, finite_time_part, limit_moment, limit_time_part,
    spec_case_moment, StationaryShift,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::cache::par_build_table;

pub const SEED: u64 = 20_240_917;
pub const RANDOM_DRAWS: usize = 200;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    LambdaOne,
    Arcsine,
    ArcsineMoment,
    Routes,
    Cancellation,
    Degree,
    Carlitz,
    Chu,
    Gauss,
    Convergence,
    StationaryIndex,
    Biane,
}

impl Suite {
    pub const ALL: [Suite; 12] = [
        Suite::LambdaOne,
        Suite::Arcsine,
        Suite::ArcsineMoment,
        Suite::Routes,
        Suite::Cancellation,
        Suite::Degree,
        Suite::Carlitz,
        Suite::Chu,
        Suite::Gauss,
        Suite::Convergence,
        Suite::StationaryIndex,
        Suite::Biane,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::LambdaOne => "lambda-one",
            Suite::Arcsine => "arcsine",
            Suite::ArcsineMoment => "arcsine-moment",
            Suite::Routes => "routes",
            Suite::Cancellation => "cancellation",
            Suite::Degree => "degree",
            Suite::Carlitz => "carlitz",
            Suite::Chu => "chu",
            Suite::Gauss => "gauss",
            Suite::Convergence => "convergence",
            Suite::StationaryIndex => "stationary-index",
            Suite::Biane => "biane",
        }
    }

    pub fn run(self) -> Report {
        let mut r = Report::new(self);
        match self {
            Suite::LambdaOne => lambda_one(&mut r, 8),
            Suite::Arcsine => arcsine(&mut r, 8),
            Suite::ArcsineMoment => arcsine_moment(&mut r, 8),
            Suite::Routes => routes(&mut r, 5),
            Suite::Cancellation => cancellation(&mut r, 5),
            Suite::Degree => degree(&mut r, 6),
            Suite::Carlitz => carlitz(&mut r),
            Suite::Chu => chu(&mut r),
            Suite::Gauss => gauss(&mut r),
            Suite::Convergence => convergence(&mut r),
            Suite::StationaryIndex => stationary_index(&mut r),
            Suite::Biane => biane(&mut r),
        }
        r
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| format!("unknown suite {s:?}"))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    pub suite: Suite,
    pub cases: usize,
    pub skipped: usize,
    pub failures: Vec<String>,
    pub notes: Vec<String>,
}

impl Report {
    fn new(suite: Suite) -> Self {
        Self { suite, cases: 0, skipped: 0, failures: Vec::new(), notes: Vec::new() }
    }

    pub fn passed(&self) -> bool {
        self.cases > 0 && self.failures.is_empty()
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok {
            self.failures.push(what());
        }
    }

    fn error(&mut self, what: String) {
        self.cases += 1;
        self.failures.push(what);
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.passed() { "PASS" } else { "FAIL" };
        write!(f, "{status} {}: {} cases", self.suite, self.cases)?;
        if self.skipped > 0 {
            write!(f, ", {} skipped", self.skipped)?;
        }
        if !self.failures.is_empty() {
            write!(f, ", {} failed", self.failures.len())?;
        }
        for n in &self.notes {
            write!(f, "\n  note: {n}")?;
        }
        for x in &self.failures {
            write!(f, "\n  counterexample: {x}")?;
        }
        Ok(())
    }
}

pub fn run_all() -> Vec<Report> {
    Suite::ALL.into_iter().map(Suite::run).collect()
}

fn rng() -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(SEED)
}

fn random_rational(rng: &mut ChaCha8Rng, max_num: i64, max_den: i64) -> Rational {
    rat(rng.random_range(-max_num..=max_num), rng.random_range(1..=max_den))
}

/// `count` seeded `(lambda, theta)` pairs with small denominators.
pub fn seeded_params(count: usize) -> Vec<LimitParams> {
    let mut rng = rng();
    (0..count)
        .map(|_| {
            let b = rng.random_range(2..=9);
            let lambda = rat(rng.random_range(1..=b), b);
            let e = rng.random_range(2..=9);
            let theta = rat(rng.random_range(1..e), e);
            LimitParams::new(lambda, theta).expect("drawn inside the domain")
        })
        .collect()
}

fn lambda_one(r: &mut Report, n_max: u32) {
    for theta in [rat(1, 3), rat(1, 2), rat(2, 3)] {
        let params = LimitParams::new(int(1), theta.clone()).expect("valid");
        for n in 1..=n_max {
            for h in 1..=n {
                let expected = lambda_one_top_coefficient(n, h, &theta);
                match c_by_route(Route::Division, n, h, h - 1, &params) {
                    Ok(got) => r.check(got == expected, || {
                        format!("theta={theta} c({n},{h},{}) = {got}, expected {expected}", h - 1)
                    }),
                    Err(e) => r.error(format!("theta={theta} (n,h)=({n},{h}): {e}")),
                }
            }
        }
    }
}

fn arcsine(r: &mut Report, n_max: u32) {
    let params = LimitParams::arcsine();
    let table = match par_build_table(n_max, &params, Route::Division) {
        Ok(t) => t,
        Err(e) => return r.error(e.to_string()),
    };
    for ((n, h, l), entry) in table.iter() {
        let expected = arcsine_coefficient(*n, *h, *l);
        r.check(entry.value == expected, || format!("c({n},{h},{l}) = {}, expected {expected}", entry.value));
    }
}

fn arcsine_moment(r: &mut Report, n_max: u32) {
    let table = match par_build_table(n_max, &LimitParams::arcsine(), Route::Division) {
        Ok(t) => t,
        Err(e) => return r.error(e.to_string()),
    };
    for n in 1..=n_max {
        let (limit, closed) = match (limit_moment(n, &table), spec_case_moment(n)) {
            (Ok(a), Ok(b)) => (a, b),
            (a, b) => return r.error(format!("n={n}: {:?} / {:?}", a.err(), b.err())),
        };
        let arcsine_moment = choose(2 * n as usize, n as usize) / jacobi_core::exact::powi(&int(4), n.into());
        r.check(limit.to_exp_poly() == closed.to_exp_poly() && limit.stationary == arcsine_moment, || {
            format!("n={n}: limit {:?} vs closed form {:?}", limit, closed)
        });
    }
}

fn routes(r: &mut Report, n_max: u32) {
    let mut params = vec![LimitParams::arcsine()];
    params.extend(seeded_params(6));
    for p in &params {
        let tables: Result<Vec<CoeffTable>, _> =
            Route::ALL.iter().map(|&route| par_build_table(n_max, p, route)).collect();
        let tables = match tables {
            Ok(t) => t,
            Err(e) => return r.error(format!("({}, {}): {e}", p.lambda(), p.theta())),
        };
        let reference = &tables[0];
        for (other, route) in tables.iter().zip(Route::ALL).skip(1) {
            for ((n, h, l), entry) in other.iter() {
                let want = reference.get(*n, *h, *l);
                r.check(want == Some(&entry.value), || {
                    format!(
                        "(lambda,theta)=({},{}) c({n},{h},{l}): division {:?}, {route} {}",
                        p.lambda(),
                        p.theta(),
                        want,
                        entry.value
                    )
                });
            }
        }
    }
}

fn cancellation(r: &mut Report, n_max: u32) {
    let mut params = vec![LimitParams::arcsine()];
    params.extend(seeded_params(6));
    for p in &params {
        for n in 1..=n_max {
            for h in 1..=n {
                match cancellation_check(n, h, p) {
                    Ok(Ok(count)) => {
                        r.cases += count;
                    }
                    Ok(Err(f)) => r.error(format!(
                        "(lambda,theta)=({},{}) (n,h,l,i)=({},{},{},{}): sum {} expected {}",
                        p.lambda(),
                        p.theta(),
                        f.n,
                        f.h,
                        f.l,
                        f.i,
                        f.got,
                        f.expected
                    )),
                    Err(e) => r.error(e.to_string()),
                }
            }
        }
    }
}

fn degree(r: &mut Report, n_max: u32) {
    let mut params = vec![LimitParams::arcsine()];
    params.extend(seeded_params(6));
    for p in &params {
        for n in 1..=n_max {
            for h in 1..=n {
                match quotient_coeffs(n, h, p) {
                    Ok(q) => r.check(degree_bounds_hold(&q), || {
                        format!("(lambda,theta)=({},{}) (n,h)=({n},{h})", p.lambda(), p.theta())
                    }),
                    Err(e) => r.error(e.to_string()),
                }
            }
        }
    }
}

fn carlitz(r: &mut Report) {
    for m in [int(3), rat(7, 2), int(5), rat(13, 2)] {
        for n in 1..=6 {
            for h in 1..=n {
                for j in 0..h {
                    match carlitz_4f3(n, h, j, &m) {
                        Ok(pair) => r.check(pair.holds(), || {
                            format!("(n,h,j,m)=({n},{h},{j},{m}): 4F3 = {}, closed form = {}", pair.lhs, pair.rhs)
                        }),
                        Err(_) => r.skipped += 1,
                    }
                }
            }
        }
    }
}

fn chu(r: &mut Report) {
    let mut rng = rng();
    let mut attempts = 0;
    while r.cases < RANDOM_DRAWS && attempts < 100 * RANDOM_DRAWS {
        attempts += 1;
        let n = rng.random_range(0..=6usize);
        let a = random_rational(&mut rng, 20, 4);
        let c = random_rational(&mut rng, 20, 4);
        let e = random_rational(&mut rng, 20, 4);
        match chu_reduction_pair(n, &a, &c, &e) {
            Ok(pair) => r.check(pair.holds(), || {
                format!("(N,a,c,e)=({n},{a},{c},{e}): 4F3 = {}, reduced = {}", pair.lhs, pair.rhs)
            }),
            Err(_) => r.skipped += 1,
        }
    }
}

fn gauss(r: &mut Report) {
    let mut rng = rng();
    let mut attempts = 0;
    while r.cases < RANDOM_DRAWS && attempts < 100 * RANDOM_DRAWS {
        attempts += 1;
        let n = rng.random_range(0..=10usize);
        let b = random_rational(&mut rng, 20, 5);
        let c = random_rational(&mut rng, 20, 5);
        let series = hyp2f1(-int(n as i64), b.clone(), c.clone(), int(1));
        match (series, gauss_2f1_unity(n, &b, &c)) {
            (Ok(s), Ok(g)) => r.check(s == g, || format!("(N,b,c)=({n},{b},{c}): series {s}, product {g}")),
            _ => r.skipped += 1,
        }
    }
}

/// `|finite_time_part / m - limit_time_part|` at `(lambda, theta) = (1, 1/2)`
/// with `m = p = d/2`.
pub fn convergence_error(n: u32, d: u32, t: f64, limit: &jacobi_core::moments::ExpPoly) -> anyhow::Result<f64> {
    let m = d / 2;
    let params = HalfIntegerParams::new(m, int(m.into()), d)?;
    let finite = finite_time_part(n, &params)?;
    Ok((finite.eval(t) / f64::from(m) - limit.eval(t)).abs())
}

pub const CONVERGENCE_DIMS: [u32; 3] = [24, 48, 96];
pub const CONVERGENCE_BAND: (f64, f64) = (0.3, 0.7);

fn convergence(r: &mut Report) {
    let table = match par_build_table(3, &LimitParams::arcsine(), Route::Division) {
        Ok(t) => t,
        Err(e) => return r.error(e.to_string()),
    };
    let jobs: Vec<(u32, f64, u32)> = (1..=3)
        .flat_map(|n| [0.5, 1.0, 2.0].into_iter().flat_map(move |t| CONVERGENCE_DIMS.map(|d| (n, t, d))))
        .collect();
    let results: Vec<_> = jobs
        .par_iter()
        .map(|&(n, t, d)| {
            let limit = limit_time_part(n, &table)?;
            Ok::<_, anyhow::Error>((convergence_error(n, d, t, &limit)?, convergence_error(n, 2 * d, t, &limit)?))
        })
        .collect();
    for (&(n, t, d), res) in jobs.iter().zip(results) {
        match res {
            Ok((e1, e2)) => {
                let ratio = e2 / e1;
                r.check(ratio >= CONVERGENCE_BAND.0 && ratio <= CONVERGENCE_BAND.1, || {
                    format!("n={n} t={t} d={d}: delta(d)={e1:.3e}, delta(2d)={e2:.3e}, ratio {ratio:.4}")
                });
            }
            Err(e) => r.error(format!("n={n} t={t} d={d}: {e}")),
        }
    }
}

fn stationary_index(r: &mut Report) {
    let mut passing = Vec::new();
    for shift in StationaryShift::ALL {
        let mut all = true;
        for m in 3..=5u32 {
            let params = HalfIntegerParams::new(m, rat(2 * i64::from(m) + 1, 2), 2 * m).expect("valid");
            for n in 1..=4 {
                let ok = match (corollary21_moment(n, m, shift), finite_moment(n, &params)) {
                    (Ok(c), Ok(f)) => c.to_exp_poly() == f.moment().to_exp_poly(),
                    _ => false,
                };
                all &= ok;
            }
        }
        r.notes.push(format!("{}: {}", shift.describe(), if all { "matches" } else { "differs" }));
        if all {
            passing.push(shift);
        }
    }
    r.check(passing.len() == 1, || format!("{} readings match, expected exactly one", passing.len()));
}

fn biane(r: &mut Report) {
    for h in 1..=4 {
        for m in [50, 100, 200] {
            let got = biane_inner_sum(h, m, 1.0);
            let want = biane_limit(h, 1.0);
            let rel = ((got - want) / want).abs();
            let bound = 2.0 / f64::from(m);
            r.check(rel < bound, || {
                format!("h={h} m={m}: inner sum {got:.6e}, limit {want:.6e}, relative error {rel:.4e} >= {bound:.4e}")
            });
        }
    }
}
