#include "divmbest/cli.hpp"

#include <CLI11.hpp>
#include <ostream>
#include <sstream>

#include "divmbest/benchtask.hpp"
#include "divmbest/divmbest.hpp"
#include "divmbest/io.hpp"
#include "divmbest/mbest.hpp"
#include "divmbest/reranker.hpp"

#ifndef DIVMBEST_VERSION
#define DIVMBEST_VERSION "unknown"
#endif

namespace divmbest {

namespace {

struct Options {
    std::string in, out, trace, model, csv, candidates_out, mrf_out;
    std::string solver = "brute";
    std::string eval_solver = "graphcut";
    std::string algo = "lawler";
    std::string diversity = "hamming";
    std::size_t m = 1;
    std::size_t count = 1;
    std::uint64_t seed = 1;
    std::vector<double> lambda, lambda_grid, target_k;
    double gamma = 1.0;
    int max_iters = 200;
    double c = 1.0;
    double eps = 1e-3;
    int train_iters = 1000;
    bool margin_rescaling = false;
    InstanceParams params;
};

void emit(const std::string& path, const Json& value, std::ostream& out)
{
    if (path.empty() || path == "-") {
        out << value.dump(1) << '\n';
    } else {
        write_json_atomic(path, value);
    }
}

int cmd_gen(const Options& o, std::ostream& out)
{
    const auto suite = generate_suite(o.params, o.count, o.seed);
    emit(o.out, to_json(suite), out);
    if (!o.mrf_out.empty()) {
        if (suite.empty()) throw InvalidArgument("--mrf-out needs at least one instance");
        write_json_atomic(o.mrf_out, to_json(suite.front().mrf));
    }
    if (!o.out.empty() && o.out != "-") out << "generated " << suite.size() << " instances\n";
    return 0;
}

int cmd_infer(const Options& o, std::ostream& out)
{
    const auto mrf = mrf_from_json(read_json_file(o.in));
    const auto solver = make_solver(o.solver);
    const auto r = solver->solve(mrf);
    Json result = to_json(r.labeling);
    result["energy"] = r.energy;
    result["solver"] = solver->name();
    out << result.dump() << '\n';
    if (!o.out.empty()) write_json_atomic(o.out, result);
    return 0;
}

int cmd_mbest(const Options& o, std::ostream& out)
{
    const auto mrf = mrf_from_json(read_json_file(o.in));
    const auto solver = make_solver(o.solver);
    Json result;
    if (o.algo == "lawler") {
        result = to_json(lawler_mbest(mrf, o.m, *solver));
    } else if (o.algo == "bmmf") {
        const auto r = bmmf_run(mrf, o.m, *solver);
        result = to_json(r.set);
        result["min_marginal_calls"] = r.min_marginal_calls;
    } else {
        throw InvalidArgument("unknown M-best algorithm '" + o.algo + "'");
    }
    result["algo"] = o.algo;
    emit(o.out, result, out);
    return 0;
}

int cmd_divmbest(const Options& o, std::ostream& out)
{
    const int modes = (o.lambda.empty() ? 0 : 1) + (o.lambda_grid.empty() ? 0 : 1) + (o.target_k.empty() ? 0 : 1);
    if (modes != 1) throw CLI::ValidationError("exactly one of --lambda, --lambda-grid, --target-k is required");
    const auto mrf = mrf_from_json(read_json_file(o.in));

    DivMBestConfig config;
    config.m = o.m;
    config.diversity = DiversityFn::from_name(o.diversity);
    config.solver = o.solver;
    StepSchedule schedule;
    schedule.gamma = o.gamma;
    schedule.max_iters = o.max_iters;
    if (!o.target_k.empty()) {
        config.mode = TargetK{o.target_k, schedule};
    } else {
        config.mode = FixedLambda{o.lambda.empty() ? 0.0 : o.lambda.front()};
    }

    Json result;
    Json trace = {{"ascents", Json::array()}};
    if (!o.lambda_grid.empty()) {
        const auto runs = divmbest_lambda_grid(mrf, config, o.lambda_grid);
        result["runs"] = Json::array();
        for (std::size_t i = 0; i < runs.size(); ++i) {
            Json r = to_json(runs[i]);
            r["lambda"] = o.lambda_grid[i];
            result["runs"].push_back(std::move(r));
        }
    } else {
        const auto run = divmbest_run(mrf, config);
        result = to_json(run.set);
        result["exact"] = run.exact;
        result["feasible"] = run.feasible;
        for (const auto& a : run.ascents) trace["ascents"].push_back(to_json(a));
    }
    result["diversity_fn"] = config.diversity.name();
    emit(o.out, result, out);
    if (!o.trace.empty()) write_json_atomic(o.trace, trace);
    return 0;
}

int cmd_rerank_train(const Options& o, std::ostream& out)
{
    const auto data = candidates_from_json(read_json_file(o.in));
    TrainOptions options;
    options.max_iters = o.train_iters;
    options.margin_rescaling = o.margin_rescaling;
    const auto r = train_1slack(data, o.c, o.eps, options);
    emit(o.out, to_json(r.model), out);
    out << "iterations " << r.iterations << " xi " << r.xi << " violation " << r.final_violation
        << (r.degenerate ? " (degenerate: every candidate has the same loss)" : "") << '\n';
    return 0;
}

int cmd_rerank_predict(const Options& o, std::ostream& out)
{
    const auto model = model_from_json(read_json_file(o.model));
    const auto data = candidates_from_json(read_json_file(o.in));
    Json picks = Json::array();
    for (const auto& set : data) {
        const std::size_t j = predict(model, set);
        picks.push_back({{"id", set.id}, {"index", j}, {"score", score(model, set.features[j])}});
    }
    emit(o.out, {{"picks", std::move(picks)}}, out);
    return 0;
}

int cmd_evaluate(const Options& o, std::ostream& out)
{
    const auto instances = instances_from_json(read_json_file(o.in));
    if (instances.empty()) throw InvalidArgument("no instances in '" + o.in + "'");
    auto config = bench_divmbest(o.m, o.lambda.empty() ? kBenchLambda : o.lambda.front());
    config.diversity = DiversityFn::from_name(o.diversity);
    config.solver = o.eval_solver;
    std::optional<RerankerModel> model;
    if (!o.model.empty()) model = model_from_json(read_json_file(o.model));

    const auto images = build_suite(instances, config, o.seed);
    const auto report = evaluate_candidates(images, model ? &*model : nullptr);
    emit(o.out, to_json(report), out);
    if (!o.csv.empty()) write_file_atomic(o.csv, report_csv(report));
    if (!o.candidates_out.empty()) write_json_atomic(o.candidates_out, to_json(candidate_sets(images)));
    if (!o.out.empty() && o.out != "-") {
        out << "images " << report.images.size() << " map " << report.mean_map_iou << " oracle "
            << report.mean_oracle_iou;
        if (report.mean_reranked_iou) out << " reranked " << *report.mean_reranked_iou;
        out << '\n';
    }
    return 0;
}

int cmd_report(const Options& o, std::ostream& out)
{
    const auto report = report_from_json(read_json_file(o.in));
    const auto csv = report_csv(report);
    if (o.out.empty() || o.out == "-") {
        out << csv;
    } else {
        write_file_atomic(o.out, csv);
    }
    return 0;
}

int fail(std::ostream& err, const char* prefix, const std::exception& e)
{
    err << prefix << ": " << e.what() << '\n';
    return 1;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Diverse M-best MAP inference, M-best baselines and candidate re-ranking", "divmbest"};
    app.set_version_flag("--version", std::string("divmbest ") + DIVMBEST_VERSION);
    app.require_subcommand(1);
    Options o;

    auto* gen = app.add_subcommand("gen", "generate synthetic figure-ground instances");
    gen->add_option("--count", o.count, "number of instances")->capture_default_str();
    gen->add_option("--width", o.params.width)->capture_default_str();
    gen->add_option("--height", o.params.height)->capture_default_str();
    gen->add_option("--sigma", o.params.sigma, "noise level")->capture_default_str();
    gen->add_option("--smoothness", o.params.smoothness, "Potts weight w")->capture_default_str();
    gen->add_option("--correlated", o.params.correlated, "smooth share of the noise variance")
        ->capture_default_str();
    gen->add_option("--blur-radius", o.params.blur_radius)->capture_default_str();
    gen->add_option("--seed", o.seed)->capture_default_str();
    gen->add_option("--out", o.out, "instances file ('-' for stdout)")->required();
    gen->add_option("--mrf-out", o.mrf_out, "also write the first instance's MRF");

    auto* infer = app.add_subcommand("infer", "MAP labeling of one MRF");
    infer->add_option("--solver", o.solver, "brute|tree|graphcut|alpha_expansion")->capture_default_str();
    infer->add_option("--in", o.in, "MRF file")->required();
    infer->add_option("--out", o.out, "also write the result here");

    auto* mbest = app.add_subcommand("mbest", "exact M-best MAP solutions");
    mbest->add_option("--algo", o.algo, "lawler|bmmf")->capture_default_str();
    mbest->add_option("--m", o.m)->capture_default_str();
    mbest->add_option("--solver", o.solver)->capture_default_str();
    mbest->add_option("--in", o.in)->required();
    mbest->add_option("--out", o.out);

    auto* div = app.add_subcommand("divmbest", "diverse M-best solutions");
    div->add_option("--m", o.m)->capture_default_str();
    div->add_option("--diversity", o.diversity, "hamming|zeroone|nodemax|hop")->capture_default_str();
    div->add_option("--lambda", o.lambda, "fixed multiplier")->expected(1);
    div->add_option("--lambda-grid", o.lambda_grid, "one run per multiplier")->delimiter(',');
    div->add_option("--target-k", o.target_k, "diversity targets, ascent on the multipliers")->delimiter(',');
    div->add_option("--gamma", o.gamma, "ascent step scale")->capture_default_str();
    div->add_option("--max-iters", o.max_iters, "ascent iterations")->capture_default_str();
    div->add_option("--solver", o.solver)->capture_default_str();
    div->add_option("--in", o.in)->required();
    div->add_option("--out", o.out);
    div->add_option("--trace", o.trace, "write the dual ascent trace");

    auto* train = app.add_subcommand("rerank-train", "train the 1-slack re-ranker");
    train->add_option("--in", o.in, "candidate sets")->required();
    train->add_option("--c", o.c)->capture_default_str();
    train->add_option("--eps", o.eps)->capture_default_str();
    train->add_option("--max-iters", o.train_iters)->capture_default_str();
    train->add_flag("--margin-rescaling", o.margin_rescaling);
    train->add_option("--out", o.out, "model file")->required();

    auto* predict_cmd = app.add_subcommand("rerank-predict", "pick one candidate per image");
    predict_cmd->add_option("--model", o.model)->required();
    predict_cmd->add_option("--in", o.in)->required();
    predict_cmd->add_option("--out", o.out);

    auto* evaluate = app.add_subcommand("evaluate", "run DivMBest and the baselines on instances");
    evaluate->add_option("--in", o.in, "instances file")->required();
    evaluate->add_option("--m", o.m)->capture_default_str();
    evaluate->add_option("--lambda", o.lambda)->expected(1);
    evaluate->add_option("--diversity", o.diversity)->capture_default_str();
    evaluate->add_option("--solver", o.eval_solver, "binary solver")->capture_default_str();
    evaluate->add_option("--seed", o.seed, "seed of the random perturbation baseline")->capture_default_str();
    evaluate->add_option("--model", o.model, "re-ranker model");
    evaluate->add_option("--out", o.out, "report JSON");
    evaluate->add_option("--csv", o.csv, "report table");
    evaluate->add_option("--candidates-out", o.candidates_out, "candidate sets for rerank-train");

    auto* report = app.add_subcommand("report", "CSV table from a report JSON");
    report->add_option("--in", o.in)->required();
    report->add_option("--out", o.out);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::CallForVersion&) {
        out << app.version() << '\n';
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << '\n';
        return 2;
    }

    try {
        if (gen->parsed()) return cmd_gen(o, out);
        if (infer->parsed()) return cmd_infer(o, out);
        if (mbest->parsed()) return cmd_mbest(o, out);
        if (div->parsed()) return cmd_divmbest(o, out);
        if (train->parsed()) return cmd_rerank_train(o, out);
        if (predict_cmd->parsed()) return cmd_rerank_predict(o, out);
        if (evaluate->parsed()) return cmd_evaluate(o, out);
        if (report->parsed()) return cmd_report(o, out);
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << '\n';
        return 2;
    } catch (const IoError& e) {
        return fail(err, "io error", e);
    } catch (const FormatError& e) {
        return fail(err, "format error", e);
    } catch (const SolverClassError& e) {
        return fail(err, "solver/class mismatch", e);
    } catch (const InvalidModel& e) {
        return fail(err, "invalid model", e);
    } catch (const InvalidLabeling& e) {
        return fail(err, "invalid labeling", e);
    } catch (const DimensionMismatch& e) {
        return fail(err, "dimension mismatch", e);
    } catch (const NotIntegral& e) {
        return fail(err, "not integral", e);
    } catch (const StateSpaceTooLarge& e) {
        return fail(err, "state space too large", e);
    } catch (const Unsatisfiable& e) {
        return fail(err, "unsatisfiable", e);
    } catch (const SolverFailure& e) {
        return fail(err, "solver failure", e);
    } catch (const InvalidArgument& e) {
        return fail(err, "invalid argument", e);
    } catch (const Error& e) {
        return fail(err, "error", e);
    }
    return 2;
}

}  // namespace divmbest
