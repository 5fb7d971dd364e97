#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "divmbest/benchtask.hpp"
#include "divmbest/divmbest.hpp"
#include "divmbest/errors.hpp"
#include "divmbest/mrf.hpp"
#include "divmbest/reranker.hpp"
#include "divmbest/solutions.hpp"

namespace divmbest {

using Json = nlohmann::json;

class IoError : public Error {
public:
    using Error::Error;
};

// Parse failures raise FormatError, missing files IoError.
Json read_json_file(const std::string& path);
// Writes to a temporary file next to `path` and renames it into place.
void write_file_atomic(const std::string& path, const std::string& content);
void write_json_atomic(const std::string& path, const Json& value);

// {"nodes": n, "labels": [k_0..], "unaries": [[..]..], "edges": [{"u","v","table": [[..]..]}]}
Json to_json(const DiscreteMRF& mrf);
DiscreteMRF mrf_from_json(const Json& j);

// {"x": [..]}
Json to_json(const Labeling& x);
Labeling labeling_from_json(const Json& j);

// {"solutions": [{"x","energy"}..], "diversity": [[..]..], "lambdas": [[..]..], "ks": [[..]..]}
Json to_json(const SolutionSet& set);

// {"lambda", "best_dual", "best_feasible": {"x","energy"} | null, "steps": [{"lambda","dual","supergradient"}..]}
Json to_json(const AscentResult& ascent);

// {"images": [{"id","features","losses"}..]}
Json to_json(const std::vector<CandidateSet>& sets);
std::vector<CandidateSet> candidates_from_json(const Json& j);

// {"alpha", "C", "eps"}
Json to_json(const RerankerModel& model);
RerankerModel model_from_json(const Json& j);

// {"instances": [{"id","seed","width","height","sigma","smoothness","mask","intensity","mrf"}..]}
Json to_json(const std::vector<SyntheticInstance>& instances);
std::vector<SyntheticInstance> instances_from_json(const Json& j);

Json to_json(const EvalReport& report);
EvalReport report_from_json(const Json& j);
// One row per image plus a "mean" footer row.
std::string report_csv(const EvalReport& report);

}  // namespace divmbest
