#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "drs/core_model.hpp"
#include "drs/diagnostics.hpp"

namespace drs {

/// Everything `drsest estimate` reports for one table.
struct RunReport {
  std::string method;
  std::string prior;
  std::string knowledge;
  std::string label;
  std::uint64_t seed = 0;
  DrsTable table;
  double n_hat = 0.0;
  std::int64_t n_hat_rounded = 0;  // round half to even
  std::optional<MtEstimate> mt;
  std::optional<Summary> n;
  std::optional<Summary> phi;
  std::optional<double> p_hat;
  std::optional<double> phi_hat;
  std::size_t burn_in = 0;
  std::size_t iterations = 0;
  bool converged = true;
  std::vector<std::string> warnings;

  friend bool operator==(const RunReport&, const RunReport&);
};

std::string serialize_report(const RunReport& report);
std::string serialize_reports(const std::vector<RunReport>& reports);
/// Throws ParseError.
RunReport parse_report(std::string_view text);

}  // namespace drs
