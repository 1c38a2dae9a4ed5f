#pragma once

#include <string>
#include <vector>

namespace nowcast {

// Reads a completed run directory and writes dependence_<feature>.csv,
// force_<month>.csv and timeline.csv next to the run outputs. Returns the
// files written. Throws Error(Data) when inputs are missing.
std::vector<std::string> emit_report(const std::string& run_dir);

} // namespace nowcast
