//! Maps each subcommand onto the library and records what it produced.

use rayon::prelude::*;

use thresholdlab::certificate::{self, covers_sampled, verdict};
use thresholdlab::cover::{
    self, bipartite_lower_bound_experiment, clique_cover_validity_via_alpha, cover_validity_exhaustive,
    ramsey_clique_cover, AlphaMode, CoverFamily, Validity, ValidityReport,
};
use thresholdlab::deviation::{
    self, clique_family_condition, delta_budget, family_condition_check, fractional_hitting,
    hitting_experiment, moment_check, ramsey_clique_size, tail_check_directed, tail_check_undirected,
    DeviationReport, WeightedFamily,
};
use thresholdlab::family::{
    enumerate_monotone_families, mu_p_exact, mu_p_monte_carlo, threshold_exact, threshold_monte_carlo,
    DEFAULT_EXACT_TOL, DEFAULT_MC_TOL,
};
use thresholdlab::graph::{goodness_implies_hitting_check, Graph, HittingMode};
use thresholdlab::random::{conditional_square_capture, coupling_marginal_test, sample_gnp};
use thresholdlab::stats::{Proportion, Z95};
use thresholdlab::{rng, Direction, MonotoneFamily};

use crate::artifacts::{Cell, Outcome, Quantity, Status, Table};
use crate::config::{Command, CoverInput, FamilySource, Method, Plan};
use crate::error::Result;

/// Smallest χ² p-value accepted by the coupling check.
pub const CHI2_ALPHA: f64 = 1e-3;

fn build_family(src: &FamilySource) -> Result<MonotoneFamily> {
    Ok(src.spec().build()?)
}

fn exact_path(method: Method, family: &MonotoneFamily) -> bool {
    match method {
        Method::Exact => true,
        Method::MonteCarlo => false,
        Method::Auto => family.size() <= thresholdlab::mask::MAX_ENUMERABLE,
    }
}

fn rate(count: u64, total: u64) -> Quantity {
    let prop = Proportion::new(count, total);
    Quantity::monte_carlo(prop.estimate(), prop.half_width())
}

pub fn execute(plan: &Plan) -> Result<Outcome> {
    match &plan.command {
        Command::Mu(p) => {
            let family = build_family(&p.family)?;
            if exact_path(p.method, &family) {
                let profile = family.size_profile()?;
                let mut table = Table::new(&["size", "members"]);
                for (k, &c) in profile.counts.iter().enumerate() {
                    table.push(vec![k.into(), c.into()]);
                }
                Ok(Outcome::new(Status::Pass, table).quantity("mu", Quantity::exact(mu_p_exact(&family, p.p)?)))
            } else {
                let est = mu_p_monte_carlo(&family, p.p, plan.trials(), plan.seed())?;
                let mut table = Table::new(&["trials", "successes", "estimate", "half_width"]);
                table.push(vec![est.trials.into(), est.successes.into(), est.estimate.into(), est.half_width.into()]);
                Ok(Outcome::new(Status::Pass, table).quantity("mu", Quantity::monte_carlo(est.estimate, est.half_width)))
            }
        }
        Command::Threshold(p) => {
            let family = build_family(&p.family)?;
            if exact_path(p.method, &family) {
                let b = threshold_exact(&family, p.tol.unwrap_or(DEFAULT_EXACT_TOL))?;
                let mut table = Table::new(&["lo", "hi"]);
                table.push(vec![b.lo.into(), b.hi.into()]);
                Ok(Outcome::new(Status::Pass, table)
                    .quantity("p_c", Quantity::exact(b.value()))
                    .quantity("bracket_lo", Quantity::exact(b.lo))
                    .quantity("bracket_hi", Quantity::exact(b.hi)))
            } else {
                let t = threshold_monte_carlo(&family, plan.trials(), plan.seed(), p.tol.unwrap_or(DEFAULT_MC_TOL))?;
                let mut table = Table::new(&["level", "p", "estimate", "half_width"]);
                for l in &t.levels {
                    table.push(vec![l.level.into(), l.p.into(), l.estimate.into(), l.half_width.into()]);
                }
                let hw = t.half_width.max(t.bracket.width() / 2.0);
                let n_scaled = match p.family.spec() {
                    thresholdlab::FamilySpec::Builtin { n, .. } => Some((n as f64 * t.p, n as f64 * hw)),
                    _ => None,
                };
                let mut out = Outcome::new(Status::Pass, table)
                    .quantity("p_c", Quantity::monte_carlo(t.p, hw))
                    .quantity("bracket_lo", Quantity::monte_carlo(t.bracket.lo, t.half_width))
                    .quantity("bracket_hi", Quantity::monte_carlo(t.bracket.hi, t.half_width))
                    .fact("halted", t.halted);
                if let Some((v, vhw)) = n_scaled {
                    out = out.quantity("n_times_p_c", Quantity::monte_carlo(v, vhw));
                }
                Ok(out)
            }
        }
        Command::Q(p) => {
            let family = build_family(&p.family)?;
            let w = certificate::q_exact(&family, p.tol)?;
            let mut table = Table::new(&["set", "size"]);
            for t in w.witness.members() {
                table.push(vec![t.to_bitstring().into(), t.count().into()]);
            }
            Ok(Outcome::new(Status::Pass, table)
                .quantity("q", Quantity::exact(w.value()))
                .quantity("bracket_lo", Quantity::exact(w.bracket.lo))
                .quantity("bracket_hi", Quantity::exact(w.bracket.hi))
                .quantity("witness_cost", Quantity::exact(w.cost))
                .quantity("feasible_p", Quantity::exact(w.feasible_p))
                .fact("direction", family.direction())
                .fact("witness", &w.witness))
        }
        Command::Qf(p) => {
            let family = build_family(&p.family)?;
            let w = certificate::qf_exact(&family, p.tol)?;
            let mut table = Table::new(&["set", "weight"]);
            for (t, g) in w.witness.weights() {
                table.push(vec![t.to_bitstring().into(), (*g).into()]);
            }
            Ok(Outcome::new(Status::Pass, table)
                .quantity("q_f", Quantity::exact(w.value()))
                .quantity("bracket_lo", Quantity::exact(w.bracket.lo))
                .quantity("bracket_hi", Quantity::exact(w.bracket.hi))
                .quantity("witness_cost", Quantity::exact(w.cost))
                .quantity("feasible_p", Quantity::exact(w.feasible_p))
                .fact("direction", family.direction())
                .fact("witness", &w.witness))
        }
        Command::Sandwich(p) => {
            let family = build_family(&p.family)?;
            let r = certificate::verify_sandwich(&family)?;
            let mut table = Table::new(&["direction", "p_c", "q_f", "q", "holds"]);
            table.push(vec![r.direction.to_string().into(), r.p_c.into(), r.q_f.into(), r.q.into(), r.holds.into()]);
            Ok(Outcome::new(Status::from_pass(r.holds), table)
                .quantity("p_c", Quantity::exact(r.p_c))
                .quantity("q_f", Quantity::exact(r.q_f))
                .quantity("q", Quantity::exact(r.q))
                .quantity("tolerance", Quantity::exact(r.tolerance))
                .fact("direction", r.direction)
                .fact("holds", r.holds))
        }
        Command::SandwichAll(p) => {
            let dirs = match p.direction {
                Some(d) => vec![d],
                None => vec![Direction::Down, Direction::Up],
            };
            let mut table = Table::new(&["direction", "index", "members", "p_c", "q_f", "q", "holds"]);
            let (mut total, mut trivial, mut failures) = (0u64, 0u64, 0u64);
            for dir in dirs {
                let families = enumerate_monotone_families(p.ground_size, dir)?;
                total += families.len() as u64;
                let reports: Vec<_> = families
                    .par_iter()
                    .enumerate()
                    .filter(|(_, f)| f.is_nontrivial())
                    .map(|(i, f)| Ok((i, f.members()?.len(), certificate::verify_sandwich(f)?)))
                    .collect::<thresholdlab::Result<_>>()?;
                trivial += (families.len() - reports.len()) as u64;
                for (i, members, r) in reports {
                    failures += !r.holds as u64;
                    table.push(vec![
                        dir.to_string().into(),
                        i.into(),
                        members.into(),
                        r.p_c.into(),
                        r.q_f.into(),
                        r.q.into(),
                        r.holds.into(),
                    ]);
                }
            }
            Ok(Outcome::new(Status::from_pass(failures == 0), table)
                .quantity("families", Quantity::exact(total as f64))
                .quantity("trivial_skipped", Quantity::exact(trivial as f64))
                .quantity("failures", Quantity::exact(failures as f64)))
        }
        Command::CertCheck(p) => {
            let family = build_family(&p.family)?;
            let cert = thresholdlab::Certificate::from(p.cert.clone());
            let cost = certificate::cert_cost(&cert, p.p, family.direction())?;
            let mut table = Table::new(&["set", "size"]);
            for t in cert.members() {
                table.push(vec![t.to_bitstring().into(), t.count().into()]);
            }
            if family.size() <= thresholdlab::mask::MAX_ENUMERABLE {
                let v = verdict(&cert, &family, p.p)?;
                let check = certificate::covers(&cert, &family)?;
                Ok(Outcome::new(Status::from_pass(v.p_small), table)
                    .quantity("cost", Quantity::exact(v.cost))
                    .fact("covers", v.covers)
                    .fact("exhaustive", true)
                    .fact("p_small", v.p_small)
                    .fact("counterexample", check.counterexample.map(|s| s.to_bitstring())))
            } else {
                let check = covers_sampled(&cert, &family, plan.trials(), plan.seed())?;
                let status = match (&check.counterexample, cost <= 0.5) {
                    (Some(_), _) | (None, false) => Status::Fail,
                    (None, true) => Status::Inconclusive,
                };
                Ok(Outcome::new(status, table)
                    .quantity("cost", Quantity::exact(cost))
                    .fact("covers", if check.covers { None } else { Some(false) })
                    .fact("exhaustive", false)
                    .fact("counterexample", check.counterexample.map(|s| s.to_bitstring())))
            }
        }
        Command::HittingCheck(p) => {
            let seed = plan.seed();
            let mode_for = |pair_seed: u64| match p.sampled_orders {
                None => HittingMode::Exhaustive,
                Some(samples) => HittingMode::Sampled {
                    samples,
                    seed: rng::substream(pair_seed, 2),
                },
            };
            let rows = (0..plan.trials())
                .into_par_iter()
                .map(|t| {
                    let pair_seed = rng::substream(seed, t);
                    let gamma = sample_gnp(p.n, p.p_gamma, rng::substream(pair_seed, 0))?;
                    let h = sample_gnp(p.n, p.p_h, rng::substream(pair_seed, 1))?;
                    let check = goodness_implies_hitting_check(&h, &gamma, mode_for(pair_seed))?;
                    Ok((t, gamma.edge_count(), h.edge_count(), check))
                })
                .collect::<thresholdlab::Result<Vec<_>>>()?;
            let mut table = Table::new(&["pair", "gamma_edges", "h_edges", "good_edges", "maximal_checked", "holds"]);
            let (mut with_good, mut violations) = (0u64, 0u64);
            for (t, ge, he, c) in &rows {
                with_good += (c.good_edges > 0) as u64;
                violations += !c.holds() as u64;
                table.push(vec![(*t).into(), (*ge).into(), (*he).into(), c.good_edges.into(), c.checked.into(), c.holds().into()]);
            }
            let status = if violations > 0 {
                Status::Fail
            } else if p.sampled_orders.is_some() || with_good == 0 {
                Status::Inconclusive
            } else {
                Status::Pass
            };
            Ok(Outcome::new(status, table)
                .quantity("pairs_with_good_edges", Quantity::exact(with_good as f64))
                .quantity("violations", Quantity::exact(violations as f64))
                .fact("exhaustive", p.sampled_orders.is_none()))
        }
        Command::Coupling(p) => {
            let seed = plan.seed();
            let m = coupling_marginal_test(p.n, p.p, plan.trials(), seed)?;
            let cap = conditional_square_capture(p.n, p.p, rng::substream(seed, u64::MAX), p.capture_trials)?;
            let mut table = Table::new(&["multiplicity", "captured", "total", "frequency", "std_error", "passes"]);
            for c in &cap.classes {
                table.push(vec![
                    c.multiplicity.into(),
                    c.captured.into(),
                    c.total.into(),
                    c.frequency.into(),
                    c.std_error.into(),
                    c.passes.into(),
                ]);
            }
            let pass = m.edge_p_value >= CHI2_ALPHA
                && m.arc_p_value >= CHI2_ALPHA
                && m.degree_violations == 0
                && cap.passes;
            Ok(Outcome::new(Status::from_pass(pass), table)
                .quantity("p_prime", Quantity::exact(cap.p_prime))
                .quantity("edge_chi2", Quantity::sampled(m.edge_chi2))
                .quantity("edge_p_value", Quantity::sampled(m.edge_p_value))
                .quantity("arc_chi2", Quantity::sampled(m.arc_chi2))
                .quantity("arc_p_value", Quantity::sampled(m.arc_p_value))
                .quantity("degree_violations", Quantity::exact(m.degree_violations as f64))
                .quantity("min_capture_frequency", Quantity::sampled(cap.min_frequency))
                .fact("edge_counts", m.edge_counts)
                .fact("arc_state_counts", m.arc_state_counts)
                .fact("capture_passes", cap.passes))
        }
        Command::Moment(p) => {
            let h = p.h.build(p.n)?;
            deviation_outcome(moment_check(&h, p.p, plan.trials(), plan.seed())?)
        }
        Command::TailDirected(p) => {
            let h = p.h.build(p.n)?;
            deviation_outcome(tail_check_directed(&h, p.p, plan.trials(), plan.seed())?)
        }
        Command::TailUndirected(p) => {
            let h = p.h.build(p.n)?;
            deviation_outcome(tail_check_undirected(&h, p.p, plan.trials(), plan.seed(), !p.no_degree_filter)?)
        }
        Command::Hitting(p) => {
            let graphs = p.h.iter().map(|s| s.build(p.n)).collect::<thresholdlab::Result<Vec<Graph>>>()?;
            let r = hitting_experiment(&graphs, p.n, p.p, plan.trials(), plan.seed())?;
            let mut table = Table::new(&[
                "run",
                "edges",
                "max_degree",
                "z",
                "x_count",
                "y_count",
                "hit_count",
                "implication_violations",
                "decomposition_holds",
            ]);
            for rec in &r.records {
                table.push(vec![
                    rec.run.into(),
                    rec.edges.into(),
                    rec.max_degree.into(),
                    rec.z.into(),
                    rec.x_count.into(),
                    rec.y_count.into(),
                    rec.hit_count.into(),
                    rec.implication_violations.into(),
                    rec.decomposition_holds.into(),
                ]);
            }
            let all_hit = r.records.iter().filter(|x| x.hit_count == r.members).count() as u64;
            let mut out = Outcome::new(Status::from_pass(r.passes()), table)
                .quantity("all_hit_rate", rate(all_hit, r.runs))
                .quantity("implication_violations", Quantity::exact(r.implication_violations as f64))
                .quantity("decomposition_violations", Quantity::exact(r.decomposition_violations as f64));
            for (i, _) in r.hit_rates.iter().enumerate() {
                let hits = r.records.iter().filter(|x| x.hits[i]).count() as u64;
                out = out.quantity(&format!("hit_rate_{i}"), rate(hits, r.runs));
            }
            Ok(out)
        }
        Command::FracHitting(p) => {
            let graphs = p.h.iter().map(|s| s.build(p.n)).collect::<thresholdlab::Result<Vec<Graph>>>()?;
            let delta = match p.delta {
                Some(d) => d,
                None => delta_budget(deviation::EPSILON, deviation::GAMMA_UNDIRECTED)?,
            };
            let wf = WeightedFamily::scaled_for_condition(p.n, graphs, delta)?;
            let cond = family_condition_check(&wf, delta, p.n)?;
            let r = fractional_hitting(&wf, p.n, p.p, plan.trials(), plan.seed())?;
            let mut table = Table::new(&["run", "missed_weight"]);
            for (i, w) in r.missed_weight.iter().enumerate() {
                table.push(vec![i.into(), (*w).into()]);
            }
            let below = r.missed_weight.iter().filter(|&&w| w < 1.0).count() as u64;
            let sd = sample_std(&r.missed_weight);
            Ok(Outcome::new(Status::from_pass(cond.satisfied), table)
                .quantity("delta", Quantity::formula(delta))
                .quantity("condition_sum", Quantity::formula(cond.sum))
                .quantity(
                    "mean_missed_weight",
                    Quantity::monte_carlo(r.mean_missed_weight, Z95 * sd / (r.runs as f64).sqrt()),
                )
                .quantity("max_missed_weight", Quantity::sampled(r.max_missed_weight))
                .quantity("below_one_rate", rate(below, r.runs))
                .fact("condition_satisfied", cond.satisfied))
        }
        Command::Condition(p) => {
            let k = match (p.k, p.ramsey_c) {
                (Some(k), _) => k,
                (None, Some(c)) => ramsey_clique_size(p.n, c),
                (None, None) => {
                    return Err(crate::error::CliError::ConfigInvalid(
                        "params.k: give k or ramsey_c".into(),
                    ))
                }
            };
            let delta = match p.delta {
                Some(d) => d,
                None => delta_budget(deviation::EPSILON, deviation::GAMMA_UNDIRECTED)?,
            };
            let r = clique_family_condition(p.n, k, delta)?;
            let mut table = Table::new(&["n", "k", "delta", "log_sum", "satisfied"]);
            table.push(vec![p.n.into(), k.into(), delta.into(), r.log_sum.into(), r.satisfied.into()]);
            Ok(Outcome::new(Status::from_pass(r.satisfied), table)
                .quantity("k", Quantity::formula(k as f64))
                .quantity("delta", Quantity::formula(delta))
                .quantity("log_sum", Quantity::formula(r.log_sum))
                .quantity("sum", Quantity::formula(r.sum))
                .fact("satisfied", r.satisfied))
        }
        Command::CoverGen(p) => {
            let c = ramsey_clique_cover(p.n, p.k)?;
            let mut table = Table::new(&["member", "edges", "clique"]);
            let kn = Graph::complete(p.n);
            for (i, g) in c.members().iter().enumerate() {
                let clique: Vec<String> = (0..p.n)
                    .filter(|&v| kn.neighbors(v).any(|u| !g.has_edge(u, v)))
                    .map(|v| v.to_string())
                    .collect();
                table.push(vec![i.into(), g.edge_count().into(), clique.join(" ").into()]);
            }
            let mut out = Outcome::new(Status::Pass, table)
                .quantity("members", Quantity::exact(c.len() as f64))
                .quantity("m", Quantity::exact(c.m() as f64))
                .fact("m_in_range", c.m_in_range())
                .fact("cover", &c);
            if c.m() > 0 {
                let b = cover::q_upper_bound(c.m() as u64, p.n as u64, c.len() as f64)?;
                out = out.quantity("q_upper_bound", Quantity::formula(b.bound)).fact("bound_vacuous", b.vacuous);
            }
            Ok(out)
        }
        Command::CoverCheck(p) => {
            let c: CoverFamily = match p.cover.input() {
                CoverInput::RamseyClique { n, k } => ramsey_clique_cover(n, k)?,
                CoverInput::Explicit { cover } => cover,
            };
            let r = cover_validity_exhaustive(&c)?;
            Ok(validity_outcome(r)
                .quantity("members", Quantity::exact(c.len() as f64))
                .fact("mode", c.mode())
                .fact("m_in_range", c.m_in_range()))
        }
        Command::AlphaCheck(p) => {
            let mode = if p.sampled {
                AlphaMode::Sampled {
                    trials: plan.trials(),
                    seed: plan.seed(),
                }
            } else {
                AlphaMode::Exhaustive
            };
            Ok(validity_outcome(clique_cover_validity_via_alpha(p.n, p.k, mode)?))
        }
        Command::QBound(p) => {
            let (bound, vacuous) = match (p.size, p.ln_size) {
                (Some(s), _) => {
                    let b = cover::q_upper_bound(p.m, p.n, s)?;
                    (b.bound, b.vacuous)
                }
                (None, Some(ls)) => {
                    let b = cover::q_upper_bound_ln(p.m, ls)?;
                    (b, b >= 1.0)
                }
                (None, None) => {
                    return Err(crate::error::CliError::ConfigInvalid(
                        "params.size: give size or ln_size".into(),
                    ))
                }
            };
            let status = if vacuous { Status::Inconclusive } else { Status::Pass };
            let mut table = Table::new(&["m", "n", "bound", "vacuous"]);
            table.push(vec![p.m.into(), p.n.into(), bound.into(), vacuous.into()]);
            Ok(Outcome::new(status, table)
                .quantity("q_upper_bound", Quantity::formula(bound))
                .fact("vacuous", vacuous)
                .fact("container_bound", cover::CONTAINER_BOUND_FORMULA))
        }
        Command::BipartiteLb(p) => {
            let h = p.h.build(p.n)?;
            let r = bipartite_lower_bound_experiment(&h, plan.trials(), plan.seed())?;
            let mut table = Table::new(&["trials", "contained", "estimate", "std_error", "bound"]);
            table.push(vec![r.trials.into(), r.contained.into(), r.estimate.into(), r.std_error.into(), r.bound.into()]);
            Ok(Outcome::new(Status::from_pass(r.passes), table)
                .quantity("estimate", Quantity::monte_carlo(r.estimate, r.half_width))
                .quantity("bound", Quantity::exact(r.bound))
                .quantity("forest_edges", Quantity::exact(r.forest_edges as f64))
                .fact("passes", r.passes))
        }
    }
}

fn sample_std(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
}

fn deviation_outcome(r: DeviationReport) -> Result<Outcome> {
    let status = if r.vacuous {
        Status::Inconclusive
    } else {
        Status::from_pass(r.passes)
    };
    let mut table = Table::new(&["trial", "statistic", "size", "indicator", "log_value"]);
    for t in &r.records {
        table.push(vec![t.trial.into(), t.statistic.into(), t.size.into(), t.indicator.into(), t.log_value.into()]);
    }
    Ok(Outcome::new(status, table)
        .quantity("estimate", Quantity::monte_carlo(r.estimate, r.half_width))
        .quantity("std_error", Quantity::sampled(r.std_error))
        .quantity("bound", Quantity::formula(r.bound))
        .quantity("m", Quantity::exact(r.m as f64))
        .quantity("event_count", Quantity::exact(r.event_count as f64))
        .fact("kind", r.kind)
        .fact("vacuous", r.vacuous)
        .fact("passes", r.passes))
}

fn validity_outcome(r: ValidityReport) -> Outcome {
    let status = match r.validity {
        Validity::Valid => Status::Pass,
        Validity::Invalid => Status::Fail,
        Validity::Inconclusive => Status::Inconclusive,
    };
    let mut table = Table::new(&["validity", "exhaustive", "checked"]);
    let validity = serde_json::to_value(r.validity).expect("enum serialises");
    table.push(vec![
        Cell::Text(validity.as_str().unwrap_or_default().to_string()),
        r.exhaustive.into(),
        r.checked.into(),
    ]);
    Outcome::new(status, table)
        .quantity("checked", Quantity::exact(r.checked as f64))
        .fact("validity", r.validity)
        .fact("exhaustive", r.exhaustive)
        .fact("witness", r.witness)
}
