#pragma once

// CSV reading for (gq, R) datasets.
//
// Lines starting with '#' and blank lines are skipped. The first remaining
// line is the header; it must name the columns gq_linear and R_linear and may
// name sigma and label. Other columns (sweep_value, R_db, ...) are ignored,
// so gain-sweep output loads unchanged. Rows are grouped by label, in order of
// first appearance.

#include <istream>
#include <string>
#include <vector>

#include "raman/fit.hpp"

namespace raman::io {

/// Throws ParseError with the offending line number.
std::vector<fit::NoiseDataset> read_datasets(std::istream& in, const std::string& default_label = "data");

}  // namespace raman::io
