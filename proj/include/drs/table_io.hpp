#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "drs/core_model.hpp"

namespace drs {

struct LabeledTable {
  DrsTable table;
  std::string label;

  friend bool operator==(const LabeledTable&, const LabeledTable&) = default;
};

/// Parses either a JSON object {"x11": .., "x10": .., "x01": .., "label": ..}
/// (or an array of such objects) or comma-separated text with a header row
/// naming x11, x10, x01 and optionally label. Counts are validated. Throws
/// ParseError with a line/field diagnostic, NegativeCount or EmptyTable.
std::vector<LabeledTable> parse_tables(std::string_view text);

/// Reads and parses a file; ParseError if it cannot be read.
std::vector<LabeledTable> read_tables(const std::string& path);

}  // namespace drs
