#ifndef QARLAB_RUNNER_HPP
#define QARLAB_RUNNER_HPP

#include <nlohmann/json_fwd.hpp>
#include <string>

#include "qarlab/qar.hpp"

namespace qarlab::runner {

using json = nlohmann::json;

json load_json_file(const std::string& path);

// Fills every default so outputs embed the fully resolved configuration.
json resolve_config(const json& user);

// Command pipelines; paths and all settings come from the config.
void cmd_fit(const json& config);
void cmd_simulate(const json& config);
void cmd_coverage(const json& config);
void cmd_assess(const json& config);
void cmd_krige(const json& config);

// Shared model-description schema (used by the C API and simulate).
QarModel parse_qar_model_json(const json& spec);

} // namespace qarlab::runner

#endif
