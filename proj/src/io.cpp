#include "divmbest/io.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace divmbest {

namespace {

const Json& field(const Json& j, const char* key, const std::string& where)
{
    if (!j.is_object()) throw FormatError(where + ": expected an object");
    const auto it = j.find(key);
    if (it == j.end()) throw FormatError(where + ": missing field '" + key + "'");
    return *it;
}

// Converts nlohmann type errors into FormatError with some context.
template <class F>
auto parsing(const std::string& where, F&& body)
{
    try {
        return body();
    } catch (const Json::exception& e) {
        throw FormatError(where + ": " + e.what());
    }
}

Json number_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

Json solution_json(const Solution& s) { return {{"x", s.labeling.values()}, {"energy", s.energy}}; }

}  // namespace

Json read_json_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "' for reading");
    try {
        return Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw FormatError("malformed JSON in '" + path + "': " + e.what());
    }
}

void write_file_atomic(const std::string& path, const std::string& content)
{
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot open '" + tmp + "' for writing");
        out << content;
        out.flush();
        if (!out) throw IoError("write to '" + tmp + "' failed");
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        throw IoError("cannot move output into '" + path + "'");
    }
}

void write_json_atomic(const std::string& path, const Json& value) { write_file_atomic(path, value.dump(1) + "\n"); }

Json to_json(const DiscreteMRF& mrf)
{
    Json unaries = Json::array();
    for (std::size_t s = 0; s < mrf.num_nodes(); ++s) {
        const auto u = mrf.unary(s);
        unaries.push_back(std::vector<double>(u.begin(), u.end()));
    }
    Json edges = Json::array();
    for (const auto& e : mrf.edges()) {
        Json table = Json::array();
        for (int a = 0; a < e.ku; ++a) {
            Json row = Json::array();
            for (int b = 0; b < e.kv; ++b) row.push_back(e.at(a, b));
            table.push_back(std::move(row));
        }
        edges.push_back({{"u", e.u}, {"v", e.v}, {"table", std::move(table)}});
    }
    return {{"nodes", mrf.num_nodes()}, {"labels", mrf.label_counts()}, {"unaries", std::move(unaries)},
            {"edges", std::move(edges)}};
}

DiscreteMRF mrf_from_json(const Json& j)
{
    return parsing("MRF", [&] {
        const auto n = field(j, "nodes", "MRF").get<std::size_t>();
        const auto labels = field(j, "labels", "MRF").get<std::vector<int>>();
        auto unaries = field(j, "unaries", "MRF").get<std::vector<std::vector<double>>>();
        if (labels.size() != n || unaries.size() != n) {
            throw FormatError("MRF: 'nodes' is " + std::to_string(n) + " but 'labels' has " +
                              std::to_string(labels.size()) + " and 'unaries' " + std::to_string(unaries.size()) +
                              " entries");
        }
        for (std::size_t s = 0; s < n; ++s) {
            if (labels[s] < 0 || unaries[s].size() != static_cast<std::size_t>(labels[s])) {
                throw FormatError("MRF: node " + std::to_string(s) + " has " + std::to_string(unaries[s].size()) +
                                  " unaries for " + std::to_string(labels[s]) + " labels");
            }
        }
        std::vector<EdgeSpec> edges;
        const auto& list = field(j, "edges", "MRF");
        if (!list.is_array()) throw FormatError("MRF: 'edges' must be an array");
        for (const auto& e : list) {
            EdgeSpec spec;
            spec.u = field(e, "u", "MRF edge").get<std::size_t>();
            spec.v = field(e, "v", "MRF edge").get<std::size_t>();
            const auto table = field(e, "table", "MRF edge").get<std::vector<std::vector<double>>>();
            if (spec.u >= n || spec.v >= n) throw FormatError("MRF: edge endpoint out of range");
            if (table.size() != static_cast<std::size_t>(labels[spec.u])) {
                throw FormatError("MRF: edge (" + std::to_string(spec.u) + "," + std::to_string(spec.v) +
                                  ") table has the wrong number of rows");
            }
            for (const auto& row : table) {
                if (row.size() != static_cast<std::size_t>(labels[spec.v])) {
                    throw FormatError("MRF: edge (" + std::to_string(spec.u) + "," + std::to_string(spec.v) +
                                      ") table has the wrong number of columns");
                }
                spec.table.insert(spec.table.end(), row.begin(), row.end());
            }
            edges.push_back(std::move(spec));
        }
        return DiscreteMRF(std::move(unaries), std::move(edges));
    });
}

Json to_json(const Labeling& x) { return {{"x", x.values()}}; }

Labeling labeling_from_json(const Json& j)
{
    return parsing("labeling", [&] { return Labeling(field(j, "x", "labeling").get<std::vector<Label>>()); });
}

Json to_json(const SolutionSet& set)
{
    Json sols = Json::array();
    for (const auto& s : set.solutions) sols.push_back(solution_json(s));
    return {{"solutions", std::move(sols)},
            {"diversity", set.diversity},
            {"lambdas", set.lambdas},
            {"ks", set.ks}};
}

Json to_json(const AscentResult& ascent)
{
    Json steps = Json::array();
    for (const auto& s : ascent.trace) {
        steps.push_back({{"lambda", s.lambda},
                         {"dual", s.dual},
                         {"supergradient", s.supergradient},
                         {"best_primal", number_or_null(s.best_primal)}});
    }
    return {{"lambda", ascent.lambda},
            {"best_dual", ascent.best_dual},
            {"best_feasible", ascent.best_feasible ? solution_json(*ascent.best_feasible) : Json(nullptr)},
            {"steps", std::move(steps)}};
}

Json to_json(const std::vector<CandidateSet>& sets)
{
    Json images = Json::array();
    for (const auto& s : sets) images.push_back({{"id", s.id}, {"features", s.features}, {"losses", s.losses}});
    return {{"images", std::move(images)}};
}

std::vector<CandidateSet> candidates_from_json(const Json& j)
{
    return parsing("candidate sets", [&] {
        std::vector<CandidateSet> out;
        const auto& images = field(j, "images", "candidate sets");
        if (!images.is_array()) throw FormatError("candidate sets: 'images' must be an array");
        for (const auto& img : images) {
            CandidateSet set;
            set.id = field(img, "id", "candidate set").get<std::string>();
            set.features = field(img, "features", "candidate set").get<std::vector<std::vector<double>>>();
            set.losses = field(img, "losses", "candidate set").get<std::vector<double>>();
            validate(set);
            out.push_back(std::move(set));
        }
        return out;
    });
}

Json to_json(const RerankerModel& model) { return {{"alpha", model.alpha}, {"C", model.C}, {"eps", model.eps}}; }

RerankerModel model_from_json(const Json& j)
{
    return parsing("model", [&] {
        RerankerModel m;
        m.alpha = field(j, "alpha", "model").get<std::vector<double>>();
        m.C = field(j, "C", "model").get<double>();
        m.eps = field(j, "eps", "model").get<double>();
        return m;
    });
}

Json to_json(const std::vector<SyntheticInstance>& instances)
{
    Json list = Json::array();
    for (const auto& inst : instances) {
        list.push_back({{"id", inst.id},
                        {"seed", inst.seed},
                        {"width", inst.width},
                        {"height", inst.height},
                        {"sigma", inst.sigma},
                        {"smoothness", inst.smoothness},
                        {"mask", inst.mask.values()},
                        {"intensity", inst.intensity},
                        {"mrf", to_json(inst.mrf)}});
    }
    return {{"instances", std::move(list)}};
}

std::vector<SyntheticInstance> instances_from_json(const Json& j)
{
    return parsing("instances", [&] {
        std::vector<SyntheticInstance> out;
        const auto& list = field(j, "instances", "instances");
        if (!list.is_array()) throw FormatError("instances: 'instances' must be an array");
        for (const auto& item : list) {
            SyntheticInstance inst;
            inst.id = field(item, "id", "instance").get<std::string>();
            inst.seed = field(item, "seed", "instance").get<std::uint64_t>();
            inst.width = field(item, "width", "instance").get<std::size_t>();
            inst.height = field(item, "height", "instance").get<std::size_t>();
            inst.sigma = field(item, "sigma", "instance").get<double>();
            inst.smoothness = field(item, "smoothness", "instance").get<double>();
            inst.mask = Labeling(field(item, "mask", "instance").get<std::vector<Label>>());
            inst.intensity = field(item, "intensity", "instance").get<std::vector<double>>();
            inst.mrf = mrf_from_json(field(item, "mrf", "instance"));
            const std::size_t n = inst.width * inst.height;
            if (inst.mask.size() != n || inst.mrf.num_nodes() != n) {
                throw FormatError("instance '" + inst.id + "': mask or MRF does not match the " +
                                  std::to_string(inst.width) + "x" + std::to_string(inst.height) + " grid");
            }
            if (!inst.mrf.is_binary()) throw FormatError("instance '" + inst.id + "': MRF is not binary");
            out.push_back(std::move(inst));
        }
        return out;
    });
}

Json to_json(const EvalReport& report)
{
    Json images = Json::array();
    for (const auto& e : report.images) {
        images.push_back({{"id", e.id},
                          {"map_iou", e.map_iou},
                          {"oracle_iou", e.oracle_iou},
                          {"oracle_index", e.oracle_index},
                          {"min_iou", e.min_iou},
                          {"random_pick_iou", e.random_pick_iou},
                          {"reranked_iou", e.reranked_iou ? Json(*e.reranked_iou) : Json(nullptr)},
                          {"reranked_index", e.reranked_index ? Json(*e.reranked_index) : Json(nullptr)},
                          {"random_perturb_oracle_iou", e.random_perturb_oracle_iou},
                          {"confidence_perturb_oracle_iou", e.confidence_perturb_oracle_iou},
                          {"oracle_curve", e.oracle_curve},
                          {"random_perturb_curve", e.random_perturb_curve},
                          {"confidence_perturb_curve", e.confidence_perturb_curve},
                          {"normalized_hamming", e.normalized_hamming},
                          {"energy_gap", e.energy_gap},
                          {"budgets", e.budgets},
                          {"random_hamming", e.random_hamming},
                          {"confidence_hamming", e.confidence_hamming},
                          {"min_cover_curve", e.min_cover_curve},
                          {"d1_oracle", e.d1_oracle},
                          {"d2_oracle", e.d2_oracle}});
    }
    return {{"m", report.m},
            {"mean_map_iou", report.mean_map_iou},
            {"mean_oracle_iou", report.mean_oracle_iou},
            {"mean_random_pick_iou", report.mean_random_pick_iou},
            {"mean_reranked_iou", report.mean_reranked_iou ? Json(*report.mean_reranked_iou) : Json(nullptr)},
            {"mean_random_perturb_oracle_iou", report.mean_random_perturb_oracle_iou},
            {"mean_confidence_perturb_oracle_iou", report.mean_confidence_perturb_oracle_iou},
            {"mean_oracle_curve", report.mean_oracle_curve},
            {"mean_random_perturb_curve", report.mean_random_perturb_curve},
            {"mean_confidence_perturb_curve", report.mean_confidence_perturb_curve},
            {"mean_normalized_hamming", report.mean_normalized_hamming},
            {"mean_min_cover_curve", report.mean_min_cover_curve},
            {"mean_d1_oracle", report.mean_d1_oracle},
            {"mean_d2_oracle", report.mean_d2_oracle},
            {"images", std::move(images)}};
}

EvalReport report_from_json(const Json& j)
{
    return parsing("report", [&] {
        const std::string where = "report";
        EvalReport r;
        r.m = field(j, "m", where).get<std::size_t>();
        r.mean_map_iou = field(j, "mean_map_iou", where).get<double>();
        r.mean_oracle_iou = field(j, "mean_oracle_iou", where).get<double>();
        r.mean_random_pick_iou = field(j, "mean_random_pick_iou", where).get<double>();
        if (const auto& v = field(j, "mean_reranked_iou", where); !v.is_null()) r.mean_reranked_iou = v.get<double>();
        r.mean_random_perturb_oracle_iou = field(j, "mean_random_perturb_oracle_iou", where).get<double>();
        r.mean_confidence_perturb_oracle_iou = field(j, "mean_confidence_perturb_oracle_iou", where).get<double>();
        r.mean_oracle_curve = field(j, "mean_oracle_curve", where).get<std::vector<double>>();
        r.mean_random_perturb_curve = field(j, "mean_random_perturb_curve", where).get<std::vector<double>>();
        r.mean_confidence_perturb_curve = field(j, "mean_confidence_perturb_curve", where).get<std::vector<double>>();
        r.mean_normalized_hamming = field(j, "mean_normalized_hamming", where).get<std::vector<double>>();
        r.mean_min_cover_curve = field(j, "mean_min_cover_curve", where).get<std::vector<double>>();
        r.mean_d1_oracle = field(j, "mean_d1_oracle", where).get<double>();
        r.mean_d2_oracle = field(j, "mean_d2_oracle", where).get<double>();
        for (const auto& img : field(j, "images", where)) {
            const std::string w = "report image";
            ImageEval e;
            e.id = field(img, "id", w).get<std::string>();
            e.map_iou = field(img, "map_iou", w).get<double>();
            e.oracle_iou = field(img, "oracle_iou", w).get<double>();
            e.oracle_index = field(img, "oracle_index", w).get<std::size_t>();
            e.min_iou = field(img, "min_iou", w).get<double>();
            e.random_pick_iou = field(img, "random_pick_iou", w).get<double>();
            if (const auto& v = field(img, "reranked_iou", w); !v.is_null()) e.reranked_iou = v.get<double>();
            if (const auto& v = field(img, "reranked_index", w); !v.is_null()) {
                e.reranked_index = v.get<std::size_t>();
            }
            e.random_perturb_oracle_iou = field(img, "random_perturb_oracle_iou", w).get<double>();
            e.confidence_perturb_oracle_iou = field(img, "confidence_perturb_oracle_iou", w).get<double>();
            e.oracle_curve = field(img, "oracle_curve", w).get<std::vector<double>>();
            e.random_perturb_curve = field(img, "random_perturb_curve", w).get<std::vector<double>>();
            e.confidence_perturb_curve = field(img, "confidence_perturb_curve", w).get<std::vector<double>>();
            e.normalized_hamming = field(img, "normalized_hamming", w).get<std::vector<double>>();
            e.energy_gap = field(img, "energy_gap", w).get<std::vector<double>>();
            e.budgets = field(img, "budgets", w).get<std::vector<std::size_t>>();
            e.random_hamming = field(img, "random_hamming", w).get<std::vector<std::size_t>>();
            e.confidence_hamming = field(img, "confidence_hamming", w).get<std::vector<std::size_t>>();
            e.min_cover_curve = field(img, "min_cover_curve", w).get<std::vector<double>>();
            e.d1_oracle = field(img, "d1_oracle", w).get<double>();
            e.d2_oracle = field(img, "d2_oracle", w).get<double>();
            r.images.push_back(std::move(e));
        }
        return r;
    });
}

std::string report_csv(const EvalReport& report)
{
    std::ostringstream out;
    out << std::setprecision(10);
    out << "id,map_iou,oracle_iou,oracle_index,reranked_iou,random_pick_iou,min_iou,"
           "random_perturb_oracle_iou,confidence_perturb_oracle_iou,last_mode_hamming,last_mode_energy_gap,"
           "min_cover,d1_oracle,d2_oracle\n";
    for (const auto& e : report.images) {
        out << e.id << ',' << e.map_iou << ',' << e.oracle_iou << ',' << e.oracle_index << ',';
        if (e.reranked_iou) out << *e.reranked_iou;
        out << ',' << e.random_pick_iou << ',' << e.min_iou << ',' << e.random_perturb_oracle_iou << ','
            << e.confidence_perturb_oracle_iou << ',' << (e.normalized_hamming.empty() ? 0.0 : e.normalized_hamming.back())
            << ',' << (e.energy_gap.empty() ? 0.0 : e.energy_gap.back()) << ','
            << (e.min_cover_curve.empty() ? 1.0 : e.min_cover_curve.back()) << ',' << e.d1_oracle << ','
            << e.d2_oracle << '\n';
    }
    double gap = 0.0;
    for (const auto& e : report.images) gap += e.energy_gap.empty() ? 0.0 : e.energy_gap.back();
    if (!report.images.empty()) gap /= static_cast<double>(report.images.size());
    out << "mean," << report.mean_map_iou << ',' << report.mean_oracle_iou << ",,";
    if (report.mean_reranked_iou) out << *report.mean_reranked_iou;
    double min_iou = 0.0;
    for (const auto& e : report.images) min_iou += e.min_iou;
    if (!report.images.empty()) min_iou /= static_cast<double>(report.images.size());
    out << ',' << report.mean_random_pick_iou << ',' << min_iou << ',' << report.mean_random_perturb_oracle_iou << ','
        << report.mean_confidence_perturb_oracle_iou << ','
        << (report.mean_normalized_hamming.empty() ? 0.0 : report.mean_normalized_hamming.back()) << ',' << gap
        << ',' << (report.mean_min_cover_curve.empty() ? 1.0 : report.mean_min_cover_curve.back()) << ','
        << report.mean_d1_oracle << ',' << report.mean_d2_oracle << '\n';
    return out.str();
}

}  // namespace divmbest
