#pragma once

#include <json.hpp>

namespace penlik {

using Json = nlohmann::ordered_json;

// Seeded experiment runners. Each takes a config object (missing fields take
// the documented defaults), runs the replicates (concurrently, with
// per-replicate derived seeds) and returns a report with the resolved config,
// the generator identity and the summary metrics. run_experiment dispatches
// on config["kind"].
Json run_experiment(const Json& config);

Json oracle_experiment(const Json& config);
Json sandwich_experiment(const Json& config);
Json cox_oracle_experiment(const Json& config);
Json cholesky_experiment(const Json& config);
Json factor_compare_experiment(const Json& config);
Json persistence_experiment(const Json& config);
Json universal_threshold_experiment(const Json& config);
Json gcv_null_experiment(const Json& config);
Json subset_equivalence_experiment(const Json& config);
Json orthonormal_equivalence_experiment(const Json& config);

// Dataset/matrix generation from a config object (CLI `simulate`).
Json generate_to_files(const Json& config, const std::string& data_path);

}  // namespace penlik
