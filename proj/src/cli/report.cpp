#include "drs/report.hpp"

#include <json.hpp>

#include "drs/error.hpp"

namespace drs {
namespace {

using nlohmann::ordered_json;

ordered_json summary_json(const Summary& s) {
  return {{"mean", s.mean}, {"se", s.se}, {"cv", s.cv}, {"ci_low", s.ci_low}, {"ci_high", s.ci_high}};
}

Summary summary_from(const ordered_json& j) {
  Summary s;
  s.mean = j.at("mean").get<double>();
  s.se = j.at("se").get<double>();
  s.cv = j.at("cv").get<double>();
  s.ci_low = j.at("ci_low").get<double>();
  s.ci_high = j.at("ci_high").get<double>();
  return s;
}

ordered_json report_json(const RunReport& r) {
  ordered_json j;
  j["method"] = r.method;
  j["prior"] = r.prior;
  j["knowledge"] = r.knowledge;
  j["label"] = r.label;
  j["seed"] = r.seed;
  j["table"] = {{"x11", r.table.x11}, {"x10", r.table.x10}, {"x01", r.table.x01}};
  j["n_hat"] = r.n_hat;
  j["n_hat_rounded"] = r.n_hat_rounded;
  if (r.mt) {
    j["mt"] = {{"n_hat", r.mt->n_hat}, {"p1_hat", r.mt->p1_hat}, {"p_dot1_hat", r.mt->p_dot1_hat}};
  }
  if (r.n) j["n"] = summary_json(*r.n);
  if (r.phi) j["phi"] = summary_json(*r.phi);
  if (r.p_hat) j["p_hat"] = *r.p_hat;
  if (r.phi_hat) j["phi_hat"] = *r.phi_hat;
  j["burn_in"] = r.burn_in;
  j["iterations"] = r.iterations;
  j["converged"] = r.converged;
  j["warnings"] = r.warnings;
  return j;
}

}  // namespace

bool operator==(const RunReport& a, const RunReport& b) {
  auto mt_eq = [](const std::optional<MtEstimate>& x, const std::optional<MtEstimate>& y) {
    if (x.has_value() != y.has_value()) return false;
    return !x || (x->n_hat == y->n_hat && x->p1_hat == y->p1_hat && x->p_dot1_hat == y->p_dot1_hat);
  };
  return a.method == b.method && a.prior == b.prior && a.knowledge == b.knowledge &&
         a.label == b.label && a.seed == b.seed && a.table == b.table && a.n_hat == b.n_hat &&
         a.n_hat_rounded == b.n_hat_rounded && mt_eq(a.mt, b.mt) && a.n == b.n && a.phi == b.phi &&
         a.p_hat == b.p_hat && a.phi_hat == b.phi_hat && a.burn_in == b.burn_in &&
         a.iterations == b.iterations && a.converged == b.converged && a.warnings == b.warnings;
}

std::string serialize_report(const RunReport& report) { return report_json(report).dump(2) + "\n"; }

std::string serialize_reports(const std::vector<RunReport>& reports) {
  if (reports.size() == 1) return serialize_report(reports.front());
  ordered_json arr = ordered_json::array();
  for (const auto& r : reports) arr.push_back(report_json(r));
  return arr.dump(2) + "\n";
}

RunReport parse_report(std::string_view text) {
  try {
    const auto j = ordered_json::parse(text);
    RunReport r;
    r.method = j.at("method").get<std::string>();
    r.prior = j.at("prior").get<std::string>();
    r.knowledge = j.at("knowledge").get<std::string>();
    r.label = j.at("label").get<std::string>();
    r.seed = j.at("seed").get<std::uint64_t>();
    const auto& t = j.at("table");
    r.table = {t.at("x11").get<std::int64_t>(), t.at("x10").get<std::int64_t>(),
               t.at("x01").get<std::int64_t>()};
    r.n_hat = j.at("n_hat").get<double>();
    r.n_hat_rounded = j.at("n_hat_rounded").get<std::int64_t>();
    if (j.contains("mt")) {
      const auto& m = j.at("mt");
      r.mt = MtEstimate{m.at("n_hat").get<double>(), m.at("p1_hat").get<double>(),
                        m.at("p_dot1_hat").get<double>()};
    }
    if (j.contains("n")) r.n = summary_from(j.at("n"));
    if (j.contains("phi")) r.phi = summary_from(j.at("phi"));
    if (j.contains("p_hat")) r.p_hat = j.at("p_hat").get<double>();
    if (j.contains("phi_hat")) r.phi_hat = j.at("phi_hat").get<double>();
    r.burn_in = j.at("burn_in").get<std::size_t>();
    r.iterations = j.at("iterations").get<std::size_t>();
    r.converged = j.at("converged").get<bool>();
    r.warnings = j.at("warnings").get<std::vector<std::string>>();
    return r;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::ParseError, std::string("report: ") + e.what());
  }
}

}  // namespace drs
