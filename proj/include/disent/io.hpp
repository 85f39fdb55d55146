#pragma once

#include <string>
#include <vector>

#include "disent/steady.hpp"

namespace disent {

/// Shortest decimal representation that round-trips to the same double.
std::string format_double(double v);

/// One header row, one row per record. Optional fields print as empty cells.
std::string trajectory_csv(const std::vector<ObservableRecord>& records, int modes,
                           const PairList& pairs);

std::string sweep_csv(const SweepResult& result, int modes);

void write_text_file(const std::string& path, const std::string& content);

}  // namespace disent
