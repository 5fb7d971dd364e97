// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
// criterion fails.

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>

#include "divmbest/benchtask.hpp"
#include "divmbest/divmbest.hpp"
#include "divmbest/inference.hpp"
#include "divmbest/mbest.hpp"
#include "divmbest/reranker.hpp"
#include "qp_oracle.hpp"
#include "testing.hpp"

using namespace divmbest;
namespace dt = divmbest::testing;

namespace {

constexpr double kExactTol = 1e-9;
constexpr double kChordTol = 1e-7;
constexpr double kQpTol = 1e-3;

struct Outcome {
    bool pass = true;
    std::ostringstream detail;
    std::string failures;

    void require(bool ok, const std::string& what)
    {
        if (!ok) {
            failures += (pass ? "" : "; ") + what;
            pass = false;
        }
    }
};

// Expansion optimality: no alpha-expansion move lowers the energy. Checked by
// enumerating every move of every label.
bool expansion_local_minimum(const DiscreteMRF& mrf, const Labeling& x)
{
    const double e0 = energy(mrf, x);
    const std::size_t n = mrf.num_nodes();
    for (int alpha = 0; alpha < mrf.max_labels(); ++alpha) {
        for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
            Labeling y = x;
            for (std::size_t s = 0; s < n; ++s) {
                if (mask >> s & 1u) y[s] = alpha;
            }
            if (energy(mrf, y) < e0 - kExactTol) return false;
        }
    }
    return true;
}

void criterion_exact_solvers(Outcome& out)
{
    std::mt19937_64 rng(1);
    const int trials = 100;

    int tree_ok = 0;
    for (int t = 0; t < trials; ++t) {
        const auto mrf = dt::random_tree(rng, 2 + t % 9, 4);
        if (std::abs(tree_map(mrf).energy - brute_force_map(mrf).energy) <= kExactTol) ++tree_ok;
    }
    int cut_ok = 0;
    for (int t = 0; t < trials; ++t) {
        const auto mrf = dt::random_submodular_grid(rng, 2 + t % 3, 2 + (t / 3) % 3);
        if (std::abs(graphcut_map(mrf).energy - brute_force_map(mrf).energy) <= kExactTol) ++cut_ok;
    }
    const auto expansion = make_solver("alpha_expansion");
    int exp_ok = 0, local_minima = 0;
    double worst_ratio = 1.0;
    for (int t = 0; t < trials; ++t) {
        const auto mrf = dt::random_potts_grid(rng, 3, 3, 3, 2.0);
        const auto got = expansion->solve(mrf);
        const double best = brute_force_map(mrf).energy;
        if (std::abs(got.energy - best) <= kExactTol) {
            ++exp_ok;
        } else {
            if (expansion_local_minimum(mrf, got.labeling)) ++local_minima;
            if (best > 0.0) worst_ratio = std::max(worst_ratio, got.energy / best);
        }
    }
    out.detail << "tree " << tree_ok << "/" << trials << ", graphcut " << cut_ok << "/" << trials
               << ", alpha_expansion " << exp_ok << "/" << trials;
    if (exp_ok < trials) {
        out.detail << " (" << trials - exp_ok << " misses, " << local_minima
                   << " verified expansion-move local minima, worst energy ratio " << worst_ratio << ")";
    }
    out.require(tree_ok == trials, "tree_map mismatch");
    out.require(cut_ok == trials, "graphcut_map mismatch");
    out.require(exp_ok == trials, "alpha_expansion mismatch");
}

void criterion_mbest(Outcome& out)
{
    std::mt19937_64 rng(2);
    const auto tree = make_solver("tree");
    int ok = 0;
    const int trials = 100;
    for (int t = 0; t < trials; ++t) {
        const auto mrf = dt::random_tree(rng, 2 + t % 7, 3);
        const std::size_t space = static_cast<std::size_t>(mrf.state_space_size(1000));
        const std::size_t m = std::min<std::size_t>(1 + t % 6, space);
        const auto expect = brute_force_top_m(mrf, m);
        const auto lawler = lawler_mbest(mrf, m, *tree);
        const auto bm = bmmf(mrf, m, *tree);
        bool same = lawler.size() == m && bm.size() == m;
        for (std::size_t i = 0; same && i < m; ++i) {
            same = std::abs(lawler[i].energy - expect[i].energy) <= kExactTol &&
                   std::abs(bm[i].energy - expect[i].energy) <= kExactTol &&
                   lawler[i].labeling == expect[i].labeling;
        }
        ok += same ? 1 : 0;
    }
    out.detail << ok << "/" << trials << " trees agree (lawler labelings exact, bmmf energies)";
    out.require(ok == trials, "sequence mismatch");
}

void criterion_weak_duality(Outcome& out)
{
    std::mt19937_64 rng(3);
    const auto brute = make_solver("brute");
    const auto delta = DiversityFn::hamming();
    const int trials = 50;
    int bounded = 0, concave = 0;
    double max_gap = 0.0, sum_gap = 0.0;
    std::uniform_real_distribution<double> ldist(0.0, 4.0);
    for (int t = 0; t < trials; ++t) {
        const auto mrf = dt::random_binary_graph(rng, 4 + t % 7, 0.4);
        const auto map = brute_force_map(mrf).labeling;
        double opt = INFINITY;
        dt::for_each_labeling(mrf, [&](const Labeling& x) {
            if (x != map) opt = std::min(opt, energy(mrf, x));
        });
        const auto ascent = supergradient_ascent(mrf, {map}, delta, {1.0}, StepSchedule{}, *brute);
        bool ok = true;
        for (const auto& step : ascent.trace) ok = ok && step.dual <= opt + kExactTol;
        bounded += ok ? 1 : 0;
        const double gap = opt - ascent.best_dual;
        max_gap = std::max(max_gap, gap);
        sum_gap += gap;

        bool chord = true;
        for (int k = 0; k < 10; ++k) {
            const double a = ldist(rng), b = ldist(rng);
            auto f = [&](double l) { return evaluate_dual(mrf, {map}, {l}, {1.0}, delta, *brute).value; };
            chord = chord && f(0.5 * (a + b)) >= 0.5 * (f(a) + f(b)) - kChordTol;
        }
        concave += chord ? 1 : 0;
    }
    out.detail << "duals <= constrained optimum on " << bounded << "/" << trials << ", chord check " << concave << "/"
               << trials << ", final gap mean " << sum_gap / trials << " max " << max_gap;
    out.require(bounded == trials, "dual above the primal optimum");
    out.require(concave == trials, "concavity chord violated");
}

void criterion_reductions(Outcome& out)
{
    std::mt19937_64 rng(4);
    int map_ok = 0, above_ok = 0;
    const int trials = 50;
    for (int t = 0; t < trials; ++t) {
        const auto mrf = dt::random_submodular_grid(rng, 3, 2 + t % 2);
        const auto map = brute_force_map(mrf);
        for (const char* solver : {"brute", "graphcut"}) {
            DivMBestConfig c;
            c.m = 3;
            c.solver = solver;
            c.mode = FixedLambda{0.0};
            const auto set = divmbest_greedy(mrf, c);
            bool same = true;
            for (const auto& s : set.solutions) same = same && s.labeling == map.labeling;
            map_ok += same ? 1 : 0;

            bool above = true;
            for (double lambda : {0.1, 1.0, 10.0}) {
                c.mode = FixedLambda{lambda};
                c.m = 4;
                for (const auto& s : divmbest_greedy(mrf, c).solutions) {
                    above = above && s.energy >= map.energy - kExactTol;
                }
            }
            above_ok += above ? 1 : 0;
        }
    }
    DivMBestConfig c2cfg;
    c2cfg.m = 2;
    c2cfg.mode = FixedLambda{10.0};
    const auto c2 = divmbest_greedy(dt::c2(), c2cfg);
    const bool c2_ok = c2.size() == 2 && c2[0].labeling == Labeling{0, 0} && c2[0].energy == 0.0 &&
                       c2[1].labeling == Labeling{1, 1} && c2[1].energy == 2.0;
    out.detail << "lambda=0 reproduces MAP " << map_ok << "/" << 2 * trials << ", C2 modes "
               << (c2_ok ? "[(0,0) 0, (1,1) 2]" : "wrong") << ", modes >= MAP energy " << above_ok << "/"
               << 2 * trials;
    out.require(map_ok == 2 * trials, "lambda=0 run left the MAP");
    out.require(c2_ok, "C2 example");
    out.require(above_ok == 2 * trials, "a mode below the MAP energy");
}

std::vector<double> quadratic_hop(std::size_t n, std::size_t c0, double weight)
{
    std::vector<double> h(n + 1);
    for (std::size_t c = 0; c <= n; ++c) {
        const double d = static_cast<double>(c) - static_cast<double>(c0);
        h[c] = weight * d * d;
    }
    return h;
}

double exhaustive_cardinality(const std::vector<double>& nu, const std::vector<double>& h)
{
    double best = INFINITY;
    const std::size_t n = nu.size();
    for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
        double v = h[static_cast<std::size_t>(std::popcount(mask))];
        for (std::size_t s = 0; s < n; ++s) {
            if (mask >> s & 1u) v -= nu[s];
        }
        best = std::min(best, v);
    }
    return best;
}

void criterion_cardinality(Outcome& out)
{
    std::mt19937_64 rng(5);
    const auto brute = make_solver("brute");
    const int trials = 50;
    int bounded = 0, agreed = 0;
    std::uniform_int_distribution<std::size_t> cdist(0, 8);
    std::uniform_real_distribution<double> wdist(0.05, 1.0);
    for (int t = 0; t < trials; ++t) {
        const auto mrf = dt::random_binary_graph(rng, 8, 0.4);
        const double w = wdist(rng);
        const auto h = quadratic_hop(8, cdist(rng), t % 2 == 0 ? w : -w);
        double opt = INFINITY;
        dt::for_each_labeling(mrf, [&](const Labeling& x) { opt = std::min(opt, energy(mrf, x) + h[foreground_count(x)]); });
        const auto r = cardinality_dual_decomp(mrf, h, {}, StepSchedule{}, *brute);
        bool ok = r.best_dual <= opt + kExactTol;
        for (double d : r.dual_trace) ok = ok && d <= opt + kExactTol;
        bounded += ok ? 1 : 0;
        agreed += r.agreed ? 1 : 0;
    }

    // Dyadic inputs keep every partial sum exact, so equality is bitwise.
    int exact_ok = 0;
    const int scans = 500;
    std::uniform_int_distribution<int> idist(-24, 24);
    for (int t = 0; t < scans; ++t) {
        const std::size_t n = 1 + t % 8;
        std::vector<double> nu(n), h(n + 1);
        for (auto& v : nu) v = idist(rng) / 8.0;
        for (auto& v : h) v = idist(rng) / 8.0;
        exact_ok += solve_cardinality_subproblem(nu, h).value == exhaustive_cardinality(nu, h) ? 1 : 0;
    }
    int real_ok = 0;
    std::uniform_real_distribution<double> rdist(-3.0, 3.0);
    for (int t = 0; t < scans; ++t) {
        const std::size_t n = 1 + t % 8;
        std::vector<double> nu(n), h(n + 1);
        for (auto& v : nu) v = rdist(rng);
        for (auto& v : h) v = rdist(rng);
        real_ok += std::abs(solve_cardinality_subproblem(nu, h).value - exhaustive_cardinality(nu, h)) <= 1e-12 ? 1 : 0;
    }
    out.detail << "dual <= optimum " << bounded << "/" << trials << " (agreement " << agreed
               << "), sorting vs exhaustive scan exact " << exact_ok << "/" << scans << " dyadic, " << real_ok << "/"
               << scans << " real within 1e-12";
    out.require(bounded == trials, "dual above optimum");
    out.require(exact_ok == scans && real_ok == scans, "subproblem mismatch");
}

std::vector<CandidateSet> random_candidate_sets(std::mt19937_64& rng, std::size_t images, std::size_t m,
                                                std::size_t p)
{
    std::uniform_real_distribution<double> f(-1.0, 1.0), l(0.0, 1.0);
    std::vector<CandidateSet> out;
    for (std::size_t i = 0; i < images; ++i) {
        CandidateSet s;
        s.id = "img" + std::to_string(i);
        for (std::size_t j = 0; j < m; ++j) {
            std::vector<double> psi(p);
            for (auto& v : psi) v = f(rng);
            s.features.push_back(std::move(psi));
            s.losses.push_back(l(rng));
        }
        out.push_back(std::move(s));
    }
    return out;
}

void criterion_reranker(Outcome& out)
{
    const auto r1 = relative_losses({0.05, 0.25});
    const auto r2 = relative_losses({0.60, 0.65});
    const bool example = r1 == std::vector<double>{0.0, 0.25 - 0.05} && r2 == std::vector<double>{0.0, 0.65 - 0.60} &&
                         relative_losses({5.0, 25.0}) == std::vector<double>{0.0, 20.0} &&
                         relative_losses({60.0, 65.0}) == std::vector<double>{0.0, 5.0};

    std::mt19937_64 rng(6);
    int certified = 0, monotone = 0;
    const int runs = 30;
    for (int t = 0; t < runs; ++t) {
        const auto data = random_candidate_sets(rng, 20, 6, 1 + t % 4);
        const double C = t % 3 == 0 ? 0.1 : (t % 3 == 1 ? 1.0 : 10.0);
        const auto r = train_1slack(data, C, 1e-3);
        certified += r.final_violation <= r.xi + 1e-3 + kExactTol ? 1 : 0;
        bool mono = true;
        for (std::size_t i = 1; i < r.objectives.size(); ++i) {
            mono = mono && r.objectives[i] >= r.objectives[i - 1] - kExactTol;
        }
        monotone += mono ? 1 : 0;
    }

    const std::vector<CandidateSet> toy{{"a", {{1.0}, {0.0}}, {0.0, 0.5}}, {"b", {{0.0}, {1.0}}, {0.5, 0.0}}};
    const auto toy_model = train_1slack(toy, 1.0, 1e-3).model;
    int toy_hits = 0;
    for (const auto& s : toy) toy_hits += predict(toy_model, s) == s.oracle_index() ? 1 : 0;

    int qp_ok = 0;
    const int qps = 200;
    std::uniform_real_distribution<double> adist(-1.0, 1.0), bdist(0.0, 1.0);
    for (int t = 0; t < qps; ++t) {
        const std::size_t p = 1 + t % 2, K = 1 + t % 4;
        std::vector<std::vector<double>> a(K, std::vector<double>(p));
        std::vector<double> b(K);
        for (auto& row : a) {
            for (auto& v : row) v = adist(rng);
        }
        for (auto& v : b) v = bdist(rng);
        const double C = t % 2 == 0 ? 1.0 : 5.0;
        const auto qp = solve_restricted_qp(a, b, C, {});
        const auto ref = dt::active_set_minimizer(a, b, C, p);
        bool ok = std::abs(qp.objective - dt::primal(a, b, C, ref)) <= kQpTol;
        for (std::size_t d = 0; d < p; ++d) ok = ok && std::abs(qp.alpha[d] - ref[d]) <= kQpTol;
        qp_ok += ok ? 1 : 0;
    }
    out.detail << "relative-loss example " << (example ? "exact" : "wrong") << ", certificate " << certified << "/"
               << runs << ", monotone objective " << monotone << "/" << runs << ", separable toy " << toy_hits
               << "/2, QP vs active-set oracle " << qp_ok << "/" << qps << " within 1e-3";
    out.require(example, "relative-loss example");
    out.require(certified == runs, "training certificate");
    out.require(monotone == runs, "QP objective decreased");
    out.require(toy_hits == 2, "separable toy");
    out.require(qp_ok == qps, "restricted QP disagrees with the oracle");
}

void criterion_end_to_end(Outcome& out)
{
    const auto start = std::chrono::steady_clock::now();
    const InstanceParams params;
    const auto config = bench_divmbest(10);

    const auto train_images = build_suite(generate_suite(params, 100, 7001), config, 7002);
    const auto model = train_1slack(candidate_sets(train_images), 1.0, 1e-3).model;

    const auto test_images = build_suite(generate_suite(params, 100, 8001), config, 8002);
    const auto report = evaluate_candidates(test_images, &model);
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    bool curves = true, budgets = true;
    for (const auto& e : report.images) {
        for (std::size_t m = 1; m < e.oracle_curve.size(); ++m) curves = curves && e.oracle_curve[m] >= e.oracle_curve[m - 1];
        budgets = budgets && e.random_hamming == e.budgets && e.confidence_hamming == e.budgets;
    }
    bool hamming_trend = true;
    const auto& h = report.mean_normalized_hamming;
    for (std::size_t m = 1; m < h.size(); ++m) hamming_trend = hamming_trend && h[m] >= h[m - 1] - 0.02;

    const double gain = report.mean_oracle_iou - report.mean_map_iou;
    out.detail << "MAP " << report.mean_map_iou << ", oracle(10) " << report.mean_oracle_iou << " (+" << gain
               << "), reranked " << *report.mean_reranked_iou << " vs random pick " << report.mean_random_pick_iou
               << ", perturbation oracles random " << report.mean_random_perturb_oracle_iou << " confidence "
               << report.mean_confidence_perturb_oracle_iou << ", pipeline " << seconds << " s";
    out.require(report.mean_map_iou >= 0.70 && report.mean_map_iou <= 0.80, "MAP IoU outside [0.70, 0.80]");
    out.require(gain >= 0.03, "oracle gain below 0.03");
    out.require(*report.mean_reranked_iou >= report.mean_random_pick_iou, "reranked below random pick");
    out.require(curves, "oracle curve decreased");
    out.require(budgets, "perturbation budget mismatch");
    out.require(hamming_trend, "mode Hamming distance trend");
    out.require(seconds < 300.0, "runtime over 5 min");
}

void criterion_metrics(Outcome& out)
{
    int checks = 0, ok = 0;
    auto expect = [&](bool v) {
        ++checks;
        ok += v ? 1 : 0;
    };
    const Labeling a{0, 1, 1, 1, 1, 0, 0, 0};
    Labeling comp = a;
    for (auto& v : comp) v = 1 - v;
    expect(iou(a, a) == 1.0);
    expect(iou(a, comp) == 0.0);
    expect(iou(a, Labeling{0, 0, 0, 1, 1, 1, 1, 0}) == 1.0 / 3.0);
    expect(relative_task_loss(a, comp, comp) == 0.0);
    expect(oracle_index(a, {comp, a, a}).index == 1 && oracle_index(a, {comp, a, a}).iou == 1.0);
    expect(oracle_index(a, {comp}).index == 0);

    std::mt19937_64 rng(8);
    std::bernoulli_distribution coin(0.5);
    for (int t = 0; t < 200; ++t) {
        const std::size_t w = 2 + t % 7, h = 2 + t % 5;
        Labeling x(w * h, 0), y(w * h, 0);
        for (std::size_t s = 0; s < w * h; ++s) {
            x[s] = coin(rng) ? 1 : 0;
            y[s] = coin(rng) ? 1 : 0;
        }
        const double d1 = covering_d1(x, y, w, h), d2 = covering_d2(x, y, w, h);
        expect(covering_d1(x, x, w, h) == 1.0);
        expect(covering_d2(x, x, w, h) == 1.0);
        expect(d1 >= 0.0 && d1 <= 1.0);
        expect(d2 <= d1);
        expect(min_cover(x, {x, y}, 1, w, h) == 1.0);
        expect(min_cover(x, {x, y}, 2, w, h) == std::min(1.0, d1));
        expect(iou(x, x) == 1.0);
    }
    expect(covering_d2(Labeling(6, 0), Labeling(6, 1), 3, 2) == 0.0);
    expect(covering_d1(Labeling{0, 0, 1, 1}, Labeling{1, 1, 0, 0}, 4, 1) == 1.0);
    expect(covering_d2(Labeling{0, 0, 1, 1}, Labeling{1, 1, 0, 0}, 4, 1) == 0.0);
    out.detail << ok << "/" << checks << " identities hold";
    out.require(ok == checks, "metric identity");
}

}  // namespace

int main()
{
    struct Criterion {
        int id;
        const char* name;
        double budget_seconds;
        std::function<void(Outcome&)> run;
    };
    const std::vector<Criterion> criteria{
        {1, "exact-solver equivalence", 30.0, criterion_exact_solvers},
        {2, "M-best correctness", 60.0, criterion_mbest},
        {3, "weak duality and concavity", 0.0, criterion_weak_duality},
        {4, "DivMBest reductions", 0.0, criterion_reductions},
        {5, "cardinality dual decomposition", 0.0, criterion_cardinality},
        {6, "re-ranker", 0.0, criterion_reranker},
        {7, "end-to-end synthetic study", 300.0, criterion_end_to_end},
        {8, "metric identities", 0.0, criterion_metrics},
    };
    int failed = 0;
    for (const auto& c : criteria) {
        Outcome out;
        const auto start = std::chrono::steady_clock::now();
        try {
            c.run(out);
        } catch (const std::exception& e) {
            out.require(false, std::string("exception: ") + e.what());
        }
        const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (c.budget_seconds > 0.0) {
            out.require(seconds < c.budget_seconds, "runtime over " + std::to_string(c.budget_seconds) + " s");
        }
        const std::string failures = out.pass ? "" : " [failed: " + out.failures + "]";
        std::printf("%s [%d] %s: %s%s (%.2f s)\n", out.pass ? "PASS" : "FAIL", c.id, c.name, out.detail.str().c_str(),
                    failures.c_str(), seconds);
        std::fflush(stdout);
        failed += out.pass ? 0 : 1;
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
