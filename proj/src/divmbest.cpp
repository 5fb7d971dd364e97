#include "divmbest/divmbest.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <string>

#include "divmbest/errors.hpp"
#include "divmbest/mbest.hpp"
#include "divmbest/parallel.hpp"

namespace divmbest {

namespace {

constexpr std::size_t kMaxWitnessSolves = 20000;
constexpr double kInf = std::numeric_limits<double>::infinity();

void check_multipliers(const std::vector<Labeling>& previous, const std::vector<double>& lambdas, std::size_t n)
{
    if (lambdas.size() != previous.size()) {
        throw DimensionMismatch("expected " + std::to_string(previous.size()) + " multipliers, got " +
                                std::to_string(lambdas.size()));
    }
    for (double l : lambdas) {
        if (!std::isfinite(l) || l < 0.0) throw InvalidArgument("multipliers must be finite and nonnegative");
    }
    for (const auto& y : previous) {
        if (y.size() != n) throw DimensionMismatch("previous labeling has the wrong number of nodes");
    }
}

double lagrangian_term(const DiscreteMRF& mrf, const Labeling& x, const std::vector<Labeling>& previous,
                       const std::vector<double>& lambdas, const DiversityFn& delta)
{
    double total = energy(mrf, x);
    for (std::size_t i = 0; i < previous.size(); ++i) total += lambdas[i] * similarity(delta, x, previous[i]);
    return total;
}

AugmentedSolve solve_hamming(const DiscreteMRF& mrf, const std::vector<Labeling>& previous,
                             const std::vector<double>& lambdas, const DiversityFn& delta, const MapSolver& solver)
{
    const double top = delta.max_node_term();
    auto penalties = zero_penalties(mrf);
    for (std::size_t i = 0; i < previous.size(); ++i) {
        if (lambdas[i] == 0.0) continue;
        for (std::size_t s = 0; s < mrf.num_nodes(); ++s) {
            for (std::size_t j = 0; j < penalties[s].size(); ++j) {
                penalties[s][j] += lambdas[i] * (top - delta.node_term(static_cast<Label>(j), previous[i][s]));
            }
        }
    }
    const DiscreteMRF augmented = augment_unaries(mrf, penalties);
    const MapResult r = solver.solve(augmented);
    return {r.labeling, energy(augmented, r.labeling), energy(mrf, r.labeling), solver.exact()};
}

AugmentedSolve solve_zero_one(const DiscreteMRF& mrf, const std::vector<Labeling>& previous,
                              const std::vector<double>& lambdas, const MapSolver& solver)
{
    std::map<Labeling, double> bonus;
    for (std::size_t i = 0; i < previous.size(); ++i) bonus[previous[i]] += lambdas[i];

    std::vector<MapResult> candidates;
    LawlerEnumerator it(mrf, solver);
    while (auto r = it.next()) {
        if (!bonus.count(r->labeling)) {
            candidates.push_back(std::move(*r));
            break;
        }
    }
    for (const auto& [y, extra] : bonus) candidates.push_back({y, energy(mrf, y) + extra});

    std::size_t best = 0;
    for (std::size_t i = 1; i < candidates.size(); ++i) {
        if (ranks_before(candidates[i], candidates[best])) best = i;
    }
    const Labeling& x = candidates[best].labeling;
    return {x, candidates[best].energy, energy(mrf, x), solver.exact()};
}

// -lambda_i * max_s W[x_s][y_s] = min over witnesses (s, l = x_s) of
// -lambda_i * W[l][y_s]; every witness tuple becomes one constrained solve.
AugmentedSolve solve_node_max(const DiscreteMRF& mrf, const std::vector<Labeling>& previous,
                              const std::vector<double>& lambdas, const DiversityFn& delta, const MapSolver& solver)
{
    struct Witness {
        NodeId node;
        Label label;
    };
    std::vector<std::vector<Witness>> options(previous.size());
    std::size_t total = 1;
    for (std::size_t i = 0; i < previous.size(); ++i) {
        if (lambdas[i] > 0.0) {
            for (NodeId s = 0; s < mrf.num_nodes(); ++s) {
                for (Label l = 0; l < mrf.num_labels(s); ++l) {
                    if (delta.node_term(l, previous[i][s]) > 0.0) options[i].push_back({s, l});
                }
            }
        }
        const std::size_t choices = options[i].size() + 1;
        if (total > kMaxWitnessSolves / choices) {
            throw StateSpaceTooLarge("node-max diversity needs more than " + std::to_string(kMaxWitnessSolves) +
                                     " constrained solves");
        }
        total *= choices;
    }

    AugmentedSolve best;
    bool found = false;
    std::vector<Label> fixed(mrf.num_nodes(), -1);
    auto consider = [&] {
        ConstraintSet cs;
        for (NodeId s = 0; s < fixed.size(); ++s) {
            if (fixed[s] >= 0) cs.add(Constraint::must_equal(s, fixed[s]));
        }
        const MapResult r = solver.solve(mrf, cs);
        const double value = lagrangian_term(mrf, r.labeling, previous, lambdas, delta);
        if (!found || ranks_before(value, r.labeling, best.augmented_energy, best.labeling)) {
            best = {r.labeling, value, r.energy, solver.exact()};
            found = true;
        }
    };
    std::function<void(std::size_t)> rec = [&](std::size_t i) {
        if (i == previous.size()) {
            consider();
            return;
        }
        rec(i + 1);
        for (const auto& w : options[i]) {
            const Label old = fixed[w.node];
            if (old >= 0 && old != w.label) continue;
            fixed[w.node] = w.label;
            rec(i + 1);
            fixed[w.node] = old;
        }
    };
    rec(0);
    return best;
}

AugmentedSolve solve_cardinality(const DiscreteMRF& mrf, const std::vector<Labeling>& previous,
                                 const std::vector<double>& lambdas, const MapSolver& solver,
                                 const StepSchedule& schedule)
{
    if (!mrf.is_binary()) throw NotBinary("cardinality diversity needs a binary model");
    const std::size_t n = mrf.num_nodes();
    std::vector<double> h(n + 1, 0.0);
    for (std::size_t i = 0; i < previous.size(); ++i) {
        const auto ci = static_cast<double>(foreground_count(previous[i]));
        for (std::size_t c = 0; c <= n; ++c) {
            const double diff = static_cast<double>(c) - ci;
            if (diff > 0.0) h[c] -= lambdas[i] * diff * diff;
        }
    }
    const auto r = cardinality_dual_decomp(mrf, h, {}, schedule, solver);
    return {r.labeling, r.objective, energy(mrf, r.labeling), r.agreed && solver.exact()};
}

std::vector<double> expand_targets(const std::vector<double>& ks, std::size_t count)
{
    if (ks.empty()) throw InvalidArgument("at least one diversity target is required");
    std::vector<double> out(count);
    for (std::size_t i = 0; i < count; ++i) out[i] = ks[std::min(i, ks.size() - 1)];
    return out;
}

}  // namespace

void validate(const StepSchedule& s)
{
    if (!(s.gamma > 0.0) || !std::isfinite(s.gamma)) throw InvalidArgument("step scale gamma must be positive");
    if (s.max_iters < 1) throw InvalidArgument("iteration limit T must be at least 1");
    if (s.patience < 1) throw InvalidArgument("patience must be at least 1");
    if (!(s.tolerance >= 0.0)) throw InvalidArgument("tolerance must be nonnegative");
}

void validate(const DivMBestConfig& config)
{
    if (config.m < 1) throw InvalidArgument("M must be at least 1");
    if (const auto* f = std::get_if<FixedLambda>(&config.mode)) {
        if (!std::isfinite(f->lambda) || f->lambda < 0.0) throw InvalidArgument("lambda must be nonnegative");
    } else {
        const auto& t = std::get<TargetK>(config.mode);
        if (t.ks.empty()) throw InvalidArgument("at least one diversity target is required");
        for (double k : t.ks) {
            if (!std::isfinite(k) || k < 0.0) throw InvalidArgument("diversity targets must be nonnegative");
        }
        validate(t.schedule);
    }
    validate(config.hop_schedule);
}

AugmentedSolve delta_augmented_solve(const DiscreteMRF& mrf, const std::vector<Labeling>& previous,
                                     const std::vector<double>& lambdas, const DiversityFn& delta,
                                     const MapSolver& solver, const StepSchedule& hop_schedule)
{
    check_multipliers(previous, lambdas, mrf.num_nodes());
    switch (delta.kind()) {
    case DiversityKind::WeightedHamming: return solve_hamming(mrf, previous, lambdas, delta, solver);
    case DiversityKind::ZeroOne: return solve_zero_one(mrf, previous, lambdas, solver);
    case DiversityKind::NodeMax: return solve_node_max(mrf, previous, lambdas, delta, solver);
    case DiversityKind::Cardinality: return solve_cardinality(mrf, previous, lambdas, solver, hop_schedule);
    }
    throw InvalidArgument("unknown diversity kind");
}

DualEvaluation evaluate_dual(const DiscreteMRF& mrf, const std::vector<Labeling>& previous,
                             const std::vector<double>& lambdas, const std::vector<double>& ks,
                             const DiversityFn& delta, const MapSolver& solver, const StepSchedule& hop_schedule)
{
    const auto targets = ks.size() == previous.size() ? ks : expand_targets(ks, previous.size());
    DualEvaluation out;
    out.argmin = delta_augmented_solve(mrf, previous, lambdas, delta, solver, hop_schedule);
    const double offset = delta.similarity_offset(mrf.num_nodes());
    out.value = out.argmin.augmented_energy;
    out.supergradient.resize(previous.size());
    for (std::size_t i = 0; i < previous.size(); ++i) {
        out.value -= lambdas[i] * (offset - targets[i]);
        out.supergradient[i] = targets[i] - diversity(delta, out.argmin.labeling, previous[i]);
    }
    return out;
}

AscentResult supergradient_ascent(const DiscreteMRF& mrf, const std::vector<Labeling>& previous,
                                  const DiversityFn& delta, const std::vector<double>& ks, const StepSchedule& schedule,
                                  const MapSolver& solver, std::vector<double> lambda0,
                                  const StepSchedule& hop_schedule)
{
    validate(schedule);
    const auto targets = expand_targets(ks, previous.size());
    for (double k : targets) {
        if (!std::isfinite(k) || k < 0.0) throw InvalidArgument("diversity targets must be nonnegative");
    }
    std::vector<double> lambda = lambda0.empty() ? std::vector<double>(previous.size(), 0.0) : std::move(lambda0);
    check_multipliers(previous, lambda, mrf.num_nodes());

    AscentResult out;
    out.best_dual = -kInf;
    double best_primal = kInf;
    std::vector<double> best_history;

    for (int t = 1; t <= schedule.max_iters; ++t) {
        const auto ev = evaluate_dual(mrf, previous, lambda, targets, delta, solver, hop_schedule);
        if (ev.value > out.best_dual) {
            out.best_dual = ev.value;
            out.lambda = lambda;
            out.dual_argmin = {ev.argmin.labeling, ev.argmin.energy};
        }
        const bool feasible =
            std::all_of(ev.supergradient.begin(), ev.supergradient.end(), [](double g) { return g <= 1e-12; });
        if (feasible && ev.argmin.energy < best_primal) {
            best_primal = ev.argmin.energy;
            out.best_feasible = Solution{ev.argmin.labeling, ev.argmin.energy};
        }
        out.trace.push_back({lambda, ev.value, ev.supergradient, best_primal});
        best_history.push_back(out.best_dual);

        const auto steps = best_history.size();
        if (steps > static_cast<std::size_t>(schedule.patience) &&
            best_history.back() - best_history[steps - 1 - static_cast<std::size_t>(schedule.patience)] <
                schedule.tolerance) {
            break;
        }
        const double alpha = schedule.gamma / std::sqrt(static_cast<double>(t));
        for (std::size_t i = 0; i < lambda.size(); ++i) lambda[i] = std::max(0.0, lambda[i] + alpha * ev.supergradient[i]);
    }
    return out;
}

CardinalityChoice solve_cardinality_subproblem(const std::vector<double>& nu, const std::vector<double>& h)
{
    const std::size_t n = nu.size();
    if (h.size() != n + 1) {
        throw DimensionMismatch("cardinality table needs " + std::to_string(n + 1) + " entries, got " +
                                std::to_string(h.size()));
    }
    std::vector<std::size_t> order(n);
    for (std::size_t s = 0; s < n; ++s) order[s] = s;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return nu[a] > nu[b]; });

    CardinalityChoice out;
    out.value = h[0];
    double prefix = 0.0;
    for (std::size_t c = 1; c <= n; ++c) {
        prefix += nu[order[c - 1]];
        const double v = h[c] - prefix;
        if (v < out.value) {
            out.value = v;
            out.count = c;
        }
    }
    out.z.assign(n, 0);
    for (std::size_t c = 0; c < out.count; ++c) out.z[order[c]] = 1;
    return out;
}

CardinalityResult cardinality_dual_decomp(const DiscreteMRF& mrf, const std::vector<double>& h,
                                          std::vector<double> nu0, const StepSchedule& schedule,
                                          const MapSolver& solver)
{
    if (!mrf.is_binary()) throw NotBinary("cardinality dual decomposition needs a binary model");
    validate(schedule);
    const std::size_t n = mrf.num_nodes();
    if (h.size() != n + 1) throw DimensionMismatch("cardinality table must have num_nodes + 1 entries");
    std::vector<double> nu = nu0.empty() ? std::vector<double>(n, 0.0) : std::move(nu0);
    if (nu.size() != n) throw DimensionMismatch("nu must have one entry per node");

    CardinalityResult out;
    out.best_dual = -kInf;
    out.objective = kInf;
    auto offer = [&](const Labeling& x) {
        const double obj = energy(mrf, x) + h[foreground_count(x)];
        if (out.labeling.empty() || ranks_before(obj, x, out.objective, out.labeling)) {
            out.labeling = x;
            out.objective = obj;
        }
    };

    std::vector<double> best_history;
    for (int t = 1; t <= schedule.max_iters; ++t) {
        auto penalties = zero_penalties(mrf);
        for (std::size_t s = 0; s < n; ++s) penalties[s][1] = nu[s];
        const DiscreteMRF perturbed = augment_unaries(mrf, penalties);
        const Labeling x = solver.solve(perturbed).labeling;
        const auto sub = solve_cardinality_subproblem(nu, h);

        const double dual = energy(perturbed, x) + sub.value;
        out.dual_trace.push_back(dual);
        out.best_dual = std::max(out.best_dual, dual);
        best_history.push_back(out.best_dual);

        Labeling z(n, 0);
        for (std::size_t s = 0; s < n; ++s) z[s] = sub.z[s];
        offer(x);
        offer(z);
        if (x == z) {
            out.agreed = true;
            break;
        }
        const auto steps = best_history.size();
        if (steps > static_cast<std::size_t>(schedule.patience) &&
            best_history.back() - best_history[steps - 1 - static_cast<std::size_t>(schedule.patience)] <
                schedule.tolerance) {
            break;
        }
        const double alpha = schedule.gamma / std::sqrt(static_cast<double>(t));
        for (std::size_t s = 0; s < n; ++s) nu[s] += alpha * static_cast<double>(x[s] - z[s]);
    }
    out.nu = std::move(nu);
    return out;
}

DivMBestRun divmbest_run(const DiscreteMRF& mrf, const DivMBestConfig& config)
{
    validate(config);
    const auto solver = make_solver(config.solver);
    DivMBestRun run;
    const MapResult map = solver->solve(mrf);
    run.set.solutions.push_back({map.labeling, map.energy});
    run.set.lambdas.emplace_back();
    run.set.ks.emplace_back();
    run.exact.push_back(solver->exact());
    run.feasible.push_back(true);

    std::vector<Labeling> previous{map.labeling};
    for (std::size_t m = 1; m < config.m; ++m) {
        if (const auto* f = std::get_if<FixedLambda>(&config.mode)) {
            const std::vector<double> lambdas(previous.size(), f->lambda);
            const auto r =
                delta_augmented_solve(mrf, previous, lambdas, config.diversity, *solver, config.hop_schedule);
            run.set.solutions.push_back({r.labeling, r.energy});
            run.set.lambdas.push_back(lambdas);
            run.set.ks.emplace_back();
            run.exact.push_back(r.exact);
            run.feasible.push_back(true);
        } else {
            const auto& target = std::get<TargetK>(config.mode);
            const auto ks = expand_targets(target.ks, previous.size());
            auto ascent = supergradient_ascent(mrf, previous, config.diversity, ks, target.schedule, *solver, {},
                                               config.hop_schedule);
            const Solution pick = ascent.best_feasible ? *ascent.best_feasible : ascent.dual_argmin;
            run.set.solutions.push_back(pick);
            run.set.lambdas.push_back(ascent.lambda);
            run.set.ks.push_back(ks);
            run.exact.push_back(solver->exact());
            run.feasible.push_back(ascent.best_feasible.has_value());
            run.ascents.push_back(std::move(ascent));
        }
        previous.push_back(run.set.solutions.back().labeling);
    }
    fill_diversities(run.set, config.diversity);
    return run;
}

SolutionSet divmbest_greedy(const DiscreteMRF& mrf, const DivMBestConfig& config)
{
    return divmbest_run(mrf, config).set;
}

std::vector<SolutionSet> divmbest_lambda_grid(const DiscreteMRF& mrf, DivMBestConfig config,
                                              const std::vector<double>& grid)
{
    if (grid.empty()) throw InvalidArgument("lambda grid is empty");
    std::vector<SolutionSet> out(grid.size());
    std::vector<DivMBestConfig> configs(grid.size(), config);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        configs[i].mode = FixedLambda{grid[i]};
        validate(configs[i]);
    }
    parallel_for(grid.size(), [&](std::size_t i) { out[i] = divmbest_greedy(mrf, configs[i]); });
    return out;
}

}  // namespace divmbest
