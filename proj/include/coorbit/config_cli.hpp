#pragma once

#include "CLI11.hpp"
#include "coorbit/report.hpp"

namespace coorbit {

// Binds every RunConfig field to CLI/TOML options on the given app.
void attach_config_options(CLI::App& app, RunConfig& config);

}  // namespace coorbit
