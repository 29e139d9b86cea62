//! Seeded random instances: Gram matrices, loci and members found by ray
//! probing, plus a sweep that audits every fired certificate.
//!
//! Every instance draws from its own ChaCha stream, so results depend on
//! the seed and instance index only, not on thread scheduling.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::certify::{
    certify_add_members, certify_add_vector, certify_linear_combo, certify_multi_combo, Certificate, Theorem,
};
use crate::locus::{eval_g, solve_on_ray, LocusSpec};
use crate::space::{GramSpace, Vector};

/// Membership tolerance used for sampled members.
pub const MEMBER_TOL: f64 = 1e-8;

/// The generator for instance `index` under `seed`.
pub fn instance_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// `AᵀA + shift·I` with `A` uniform in `[-1, 1]`: symmetric positive
/// definite, with smallest eigenvalue at least `shift`.
pub fn random_spd(rng: &mut impl Rng, n: usize) -> GramSpace {
    let a: Vec<Vec<f64>> = (0..n).map(|_| (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()).collect();
    let shift = rng.gen_range(0.05..0.5);
    let mut g = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            g[i][j] = (0..n).map(|k| a[k][i] * a[k][j]).sum::<f64>();
        }
        g[i][i] += shift;
    }
    GramSpace::new(g).expect("AᵀA + shift·I is positive definite")
}

pub fn random_vector(rng: &mut impl Rng, n: usize, scale: f64) -> Vector {
    Vector::from((0..n).map(|_| rng.gen_range(-scale..scale)).collect::<Vec<_>>())
}

/// A nonzero coefficient in `±[0.2, 2]`.
fn random_alpha(rng: &mut impl Rng) -> f64 {
    let m = rng.gen_range(0.2..2.0);
    if rng.gen_bool(0.5) {
        m
    } else {
        -m
    }
}

/// A space, a locus in it, and some of its members.
#[derive(Clone, Debug)]
pub struct Instance {
    pub space: GramSpace,
    pub spec: LocusSpec,
    pub members: Vec<Vector>,
}

/// Draws a random space of dimension 2 to 4, one to four foci, and a level
/// `c` chosen so the locus passes through a random anchor point. Members
/// are roots of `g - c` along random rays through perturbed anchors.
///
/// Returns `None` when a ray misses the locus too often, which happens for
/// some bounded or sign-mixed loci; callers simply draw again.
pub fn random_instance(rng: &mut impl Rng, members: usize) -> Option<Instance> {
    let n = rng.gen_range(2..=4);
    let space = random_spd(rng, n);
    let k = rng.gen_range(1..=4);
    let foci: Vec<Vector> = (0..k).map(|_| random_vector(rng, n, 3.0)).collect();
    let alphas: Vec<f64> = (0..k).map(|_| random_alpha(rng)).collect();
    let anchor = random_vector(rng, n, 3.0);
    let probe = LocusSpec::new(foci.clone(), alphas.clone(), 0.0).ok()?;
    let c = eval_g(&space, &probe, &anchor).ok()?;
    let spec = probe.with_level(c).ok()?;

    let mut found = Vec::with_capacity(members);
    let mut attempts = 0;
    while found.len() < members && attempts < 20 * members {
        attempts += 1;
        let origin = &anchor + &random_vector(rng, n, 1.0);
        let direction = random_vector(rng, n, 1.0);
        if space.norm(&direction).ok()? < 1e-3 {
            continue;
        }
        let tol = 1e-13 * c.abs().max(1.0);
        let roots = solve_on_ray(&space, &spec, &origin, &direction, -20.0, 20.0, tol).ok()?;
        if roots.is_empty() {
            continue;
        }
        let t = roots[rng.gen_range(0..roots.len())];
        let x = origin.along(&direction, t);
        let r = eval_g(&space, &spec, &x).ok()? - c;
        let near_focus = spec.foci().iter().any(|f| space.norm(&(&x - f)).map_or(true, |d| d < 1e-6));
        if r.abs() <= MEMBER_TOL && !near_focus {
            found.push(x);
        }
    }
    (found.len() == members).then_some(Instance { space, spec, members: found })
}

/// Audit tally for one construction.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Tally {
    pub instances: usize,
    pub fired: usize,
    pub failures: usize,
    /// Fired certificates whose stated direction is flagged as suspect.
    pub suspect_fired: usize,
    /// Of those, how many violate the stated direction.
    pub suspect_stated_failures: usize,
    /// And how many violate the opposite direction.
    pub suspect_alternate_failures: usize,
}

impl Tally {
    fn absorb(&mut self, certs: &[Certificate], space: &GramSpace, spec: &LocusSpec) {
        self.instances += 1;
        for cert in certs.iter().filter(|c| c.fired) {
            if cert.suspect_direction {
                self.suspect_fired += 1;
                if !cert.audit(space, spec) {
                    self.suspect_stated_failures += 1;
                }
                if cert.audit_alternate(space, spec) == Some(false) {
                    self.suspect_alternate_failures += 1;
                }
            } else {
                self.fired += 1;
                if !cert.audit(space, spec) {
                    self.failures += 1;
                }
            }
        }
    }

    fn merge(mut self, other: Tally) -> Tally {
        self.instances += other.instances;
        self.fired += other.fired;
        self.failures += other.failures;
        self.suspect_fired += other.suspect_fired;
        self.suspect_stated_failures += other.suspect_stated_failures;
        self.suspect_alternate_failures += other.suspect_alternate_failures;
        self
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct SoundnessReport {
    pub seed: u64,
    pub instances: usize,
    pub add_vector: Tally,
    pub add_members: Tally,
    pub linear_combo: Tally,
    pub multi_combo: Tally,
}

impl SoundnessReport {
    pub fn tally(&self, theorem: Theorem) -> &Tally {
        match theorem {
            Theorem::AddVector => &self.add_vector,
            Theorem::AddMembers => &self.add_members,
            Theorem::LinearCombo => &self.linear_combo,
            Theorem::MultiCombo => &self.multi_combo,
        }
    }

    /// No non-suspect failures and no failures of the alternate reading.
    pub fn sound(&self) -> bool {
        [&self.add_vector, &self.add_members, &self.linear_combo, &self.multi_combo]
            .iter()
            .all(|t| t.failures == 0 && t.suspect_alternate_failures == 0)
    }
}

/// Runs every construction on `instances` random instances and audits all
/// fired certificates.
pub fn soundness_sweep(seed: u64, instances: usize) -> SoundnessReport {
    let tallies = (0..instances as u64)
        .into_par_iter()
        .map(|index| {
            let mut rng = instance_rng(seed, index);
            let mut t = [Tally::default(), Tally::default(), Tally::default(), Tally::default()];
            let inst = loop {
                if let Some(inst) = random_instance(&mut rng, 3) {
                    break inst;
                }
            };
            let (space, spec, m) = (&inst.space, &inst.spec, &inst.members);
            let n = space.dim();

            let scale = rng.gen_range(0.1..4.0);
            let y = random_vector(&mut rng, n, scale);
            if let Ok(certs) = certify_add_vector(space, spec, &m[0], &y, MEMBER_TOL) {
                t[0].absorb(&certs, space, spec);
            }
            if let Ok(certs) = certify_add_members(space, spec, &m[0], &m[1], MEMBER_TOL) {
                t[1].absorb(&certs, space, spec);
            }
            let (gamma, beta) = (rng.gen_range(0.0..3.0), rng.gen_range(0.0..3.0));
            if let Ok(certs) = certify_linear_combo(space, spec, &m[0], &m[1], gamma, beta, MEMBER_TOL) {
                t[2].absorb(&certs, space, spec);
            }
            let betas: Vec<f64> = (0..3).map(|_| rng.gen_range(0.05..3.0)).collect();
            if let Ok(certs) = certify_multi_combo(space, spec, m, &betas, MEMBER_TOL) {
                t[3].absorb(&certs, space, spec);
            }
            t
        })
        .reduce(
            || [Tally::default(), Tally::default(), Tally::default(), Tally::default()],
            |a, b| {
                let [a0, a1, a2, a3] = a;
                let [b0, b1, b2, b3] = b;
                [a0.merge(b0), a1.merge(b1), a2.merge(b2), a3.merge(b3)]
            },
        );
    let [add_vector, add_members, linear_combo, multi_combo] = tallies;
    SoundnessReport { seed, instances, add_vector, add_members, linear_combo, multi_combo }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn instances_are_reproducible() {
        let a = random_instance(&mut instance_rng(7, 3), 2);
        let b = random_instance(&mut instance_rng(7, 3), 2);
        assert_eq!(a.map(|i| i.members), b.map(|i| i.members));
    }

    #[test]
    fn members_are_members() {
        let mut rng = instance_rng(1, 0);
        let mut seen = 0;
        while seen < 20 {
            if let Some(inst) = random_instance(&mut rng, 2) {
                for m in &inst.members {
                    let r = eval_g(&inst.space, &inst.spec, m).unwrap() - inst.spec.c();
                    assert!(r.abs() <= MEMBER_TOL);
                }
                seen += 1;
            }
        }
    }

    #[test]
    fn small_sweep_is_sound() {
        let report = soundness_sweep(0, 200);
        assert_eq!(report.add_vector.instances, 200);
        assert!(report.sound(), "{report:?}");
    }
}
