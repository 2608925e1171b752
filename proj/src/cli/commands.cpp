#include "drs/cli.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "drs/diagnostics.hpp"
#include "drs/error.hpp"
#include "drs/estimators.hpp"
#include "drs/report.hpp"
#include "drs/simulation.hpp"
#include "drs/table_io.hpp"

namespace drs {
namespace {

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::NoConvergence:
      return kExitNoConvergence;
    case ErrorCode::EnvelopeFailure:
    case ErrorCode::EmptyTruncation:
    case ErrorCode::OptimizerFailure:
    case ErrorCode::EmptySample:
    case ErrorCode::ZeroWithinVariance:
      return kExitSampler;
    default:
      return kExitValidation;
  }
}

std::string fmt(const char* spec, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, x);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) fail(ErrorCode::ParseError, "cannot write '" + path + "'");
  f << content;
  if (!f) fail(ErrorCode::ParseError, "failed writing '" + path + "'");
}

// Either write to a file and print its path, or print the data itself.
void emit(const std::string& path, const std::string& content, std::ostream& out) {
  if (path.empty()) {
    out << content;
  } else {
    write_file(path, content);
    out << path << "\n";
  }
}

double parse_double(const std::string& s, const std::string& what) {
  if (s == "inf" || s == "1/p") return std::numeric_limits<double>::infinity();
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != s.size() || s.empty()) fail(ErrorCode::ParseError, what + ": '" + s + "' is not a number");
  return v;
}

// "uniform:a,b" (b may be 1/p or inf for the live bound) or "gb1:u,v".
PhiPrior parse_prior(const std::string& text) {
  const auto colon = text.find(':');
  const auto comma = text.find(',', colon == std::string::npos ? 0 : colon);
  if (colon == std::string::npos || comma == std::string::npos) {
    fail(ErrorCode::ParseError, "--phi-prior expects uniform:a,b or gb1:u,v, got '" + text + "'");
  }
  const std::string kind = text.substr(0, colon);
  const double a = parse_double(text.substr(colon + 1, comma - colon - 1), "--phi-prior");
  const double b = parse_double(text.substr(comma + 1), "--phi-prior");
  if (kind == "uniform") return PhiPrior::flat(a, b);
  if (kind == "gb1") return PhiPrior::gen_beta_one(a, b);
  fail(ErrorCode::ParseError, "--phi-prior kind must be uniform or gb1, got '" + kind + "'");
}

struct CommonOptions {
  std::string method = "semwig";
  std::string prior;
  std::string knowledge = "none";
  std::uint64_t seed = 1;
  std::size_t chains = 5;
  std::size_t inner_size = 1000;
  std::size_t max_iterations = 20000;
  std::size_t max_outer = 500;
  std::size_t check_interval = 50;
  double rhat_threshold = 1.1;
  std::size_t retained = 0;
};

void add_method_options(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("--method", o.method, "mt | da | ewig1 | ewig2 | semwig")->capture_default_str();
  cmd->add_option("--phi-prior", o.prior, "uniform:a,b (b may be 1/p) or gb1:u,v");
  cmd->add_option("--phi-knowledge", o.knowledge, "prone | averse | none")->capture_default_str();
  cmd->add_option("--chains", o.chains, "parallel chains for da/semwig")->capture_default_str();
  cmd->add_option("--inner-size", o.inner_size, "inner sample size M for ewig1/ewig2")->capture_default_str();
  cmd->add_option("--max-iterations", o.max_iterations, "per-chain cap for da/semwig")->capture_default_str();
  cmd->add_option("--max-outer", o.max_outer, "outer iteration cap for ewig1/ewig2")->capture_default_str();
  cmd->add_option("--check-interval", o.check_interval, "sqrt(R) checkpoint spacing")->capture_default_str();
  cmd->add_option("--rhat-threshold", o.rhat_threshold, "sqrt(R) burn-in threshold")->capture_default_str();
  cmd->add_option("--retained", o.retained, "post-burn-in draws per chain (default: the burn-in length)");
}

void add_seed_option(CLI::App* cmd, std::uint64_t& seed) {
  cmd->add_option("--seed", seed, "master seed (default: $DRS_SEED, else 1)");
}

// Flags win over DRS_SEED, which wins over the built-in default.
std::uint64_t resolve_seed(const CLI::App* cmd, std::uint64_t flag_value) {
  if (cmd->count("--seed") > 0) return flag_value;
  if (const char* env = std::getenv("DRS_SEED"); env && *env) {
    const std::string s = env;
    std::uint64_t v = 0;
    std::size_t used = 0;
    try {
      v = std::stoull(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != s.size()) fail(ErrorCode::ParseError, "DRS_SEED: '" + s + "' is not an unsigned integer");
    return v;
  }
  return 1;
}

Knowledge knowledge_from(const std::string& s) {
  const auto k = parse_knowledge(s);
  if (!k) fail(ErrorCode::ParseError, "--phi-knowledge must be prone, averse or none, got '" + s + "'");
  return *k;
}

struct MethodChoice {
  bool is_mt = false;
  MethodConfig config;
};

MethodChoice method_from(const CommonOptions& o, std::uint64_t seed) {
  MethodChoice choice;
  choice.config.knowledge = knowledge_from(o.knowledge);
  choice.config.seed = seed;
  if (!o.prior.empty()) choice.config.phi_prior = parse_prior(o.prior);
  choice.config.chains = o.chains;
  choice.config.inner_size = o.inner_size;
  choice.config.max_iterations = o.max_iterations;
  choice.config.max_outer_iterations = o.max_outer;
  choice.config.check_interval = o.check_interval;
  choice.config.rhat_threshold = o.rhat_threshold;
  if (o.retained > 0) choice.config.retained = o.retained;
  if (o.method == "mt") {
    choice.is_mt = true;
    return choice;
  }
  const auto m = parse_method(o.method);
  if (!m) fail(ErrorCode::ParseError, "--method must be mt, da, ewig1, ewig2 or semwig, got '" + o.method + "'");
  choice.config.method = *m;
  validate_config(choice.config);
  return choice;
}

// Label of the prior as used across a study (data-independent).
std::string prior_label(const MethodChoice& choice) {
  if (choice.is_mt) return "-";
  const auto& cfg = choice.config;
  if (cfg.method == Method::EWiG2) {
    switch (cfg.knowledge) {
      case Knowledge::Prone: return "phi>1";
      case Knowledge::Averse: return "phi<1";
      case Knowledge::None: return "phi>0";
    }
  }
  if (cfg.phi_prior) return cfg.phi_prior->describe();
  switch (cfg.knowledge) {
    case Knowledge::Prone: return "U(1,1/p)";
    case Knowledge::Averse: return "U(c_hat,1)";
    case Knowledge::None: break;
  }
  return "GB-I(1,1,p)";
}

std::string method_name(const MethodChoice& choice) {
  return choice.is_mt ? "mt" : to_string(choice.config.method);
}

// ---------------------------------------------------------------------------
// estimate

std::string format_rhat(double v) {
  if (std::isinf(v)) return "inf";
  return fmt("%.10g", v);
}

std::string chain_trace_csv(const ChainSet& set) {
  std::ostringstream out;
  out << "h,chain,N,sqrt_rhat\n";
  const std::size_t m = set.chains.size();
  const std::size_t length = set.length();
  std::vector<double> mean(m, 0.0);
  std::vector<double> m2(m, 0.0);
  for (std::size_t h = 1; h <= length; ++h) {
    // Welford updates give sqrt(R) at every prefix length in O(m) per step.
    const auto hd = static_cast<double>(h);
    for (std::size_t c = 0; c < m; ++c) {
      const auto x = static_cast<double>(set.chains[c].n[h - 1]);
      const double delta = x - mean[c];
      mean[c] += delta / hd;
      m2[c] += delta * (x - mean[c]);
    }
    std::string rhat;
    if (h >= 2 && m >= 2) {
      double grand = 0.0;
      for (double mu : mean) grand += mu;
      grand /= static_cast<double>(m);
      double between = 0.0;
      double within = 0.0;
      for (std::size_t c = 0; c < m; ++c) {
        between += (mean[c] - grand) * (mean[c] - grand);
        within += m2[c] / (hd - 1.0);
      }
      const double b = hd / static_cast<double>(m - 1) * between;
      const double w = within / static_cast<double>(m);
      double value = 1.0;
      if (w > 0.0) {
        value = std::sqrt(((hd - 1.0) / hd * w + b / hd) / w);
      } else if (b > 0.0) {
        value = std::numeric_limits<double>::infinity();
      }
      rhat = format_rhat(value);
    }
    for (std::size_t c = 0; c < m; ++c) {
      out << h << ',' << c << ',' << set.chains[c].n[h - 1] << ',' << rhat << '\n';
    }
  }
  return out.str();
}

std::string ewig_trace_csv(const EwigResult& result) {
  std::ostringstream out;
  out << "h,chain,N,sqrt_rhat\n";
  for (std::size_t j = 0; j < result.n.size(); ++j) out << (j + 1) << ",0," << result.n[j] << ",\n";
  return out.str();
}

void add_prior_limit_warnings(RunReport& report, const PhiPrior& prior, double p_ref) {
  if (!report.phi || !(p_ref > 0.0)) return;
  auto [lo, hi] = prior.bounds();
  if (std::isinf(hi)) hi = 1.0 / p_ref;
  hi = std::min(hi, 1.0 / p_ref);
  const double range = hi - lo;
  if (!(range > 0.0) || !std::isfinite(range)) return;
  if (report.phi->ci_low - lo < 0.02 * range) {
    report.warnings.push_back("phi credible interval within 2% of the prior lower limit");
  }
  if (hi - report.phi->ci_high < 0.02 * range) {
    report.warnings.push_back("phi credible interval within 2% of the prior upper limit");
  }
}

struct EstimateRun {
  RunReport report;
  std::string trace;
};

EstimateRun estimate_one(const LabeledTable& input, const MethodChoice& choice,
                         const std::string& knowledge, std::uint64_t seed, std::size_t index) {
  EstimateRun run;
  RunReport& r = run.report;
  r.method = method_name(choice);
  r.knowledge = knowledge;
  r.label = input.label;
  r.seed = seed;
  r.table = input.table;
  r.mt = mt_mle(input.table);

  if (choice.is_mt) {
    r.prior = "-";
    r.n_hat = r.mt->n_hat;
  } else {
    const EstimationOutcome outcome = estimate(input.table, choice.config, RandomSource(seed).derive(index));
    r.prior = choice.config.method == Method::EWiG2 ? prior_label(choice) : outcome.prior.describe();
    r.n = summarize(outcome.n_draws);
    r.n_hat = r.n->mean;
    if (choice.config.method != Method::EWiG2) r.phi = summarize(outcome.phi_draws);
    r.p_hat = outcome.p_hat;
    r.phi_hat = outcome.phi_hat;
    r.burn_in = outcome.burn_in;
    r.iterations = outcome.iterations;
    r.converged = outcome.converged;
    if (!outcome.converged) r.warnings.push_back("NoConvergence");
    if (outcome.clipped) r.warnings.push_back("DegenerateClip");

    double p_ref = outcome.p_hat.value_or(0.0);
    if (!outcome.p_draws.empty()) p_ref = summarize(outcome.p_draws).mean;
    if (choice.config.method != Method::EWiG2) add_prior_limit_warnings(r, outcome.prior, p_ref);

    if (const auto* set = std::get_if<ChainSet>(&outcome.detail)) {
      run.trace = chain_trace_csv(*set);
    } else {
      run.trace = ewig_trace_csv(std::get<EwigResult>(outcome.detail));
    }
  }
  r.n_hat_rounded = static_cast<std::int64_t>(std::nearbyint(r.n_hat));
  return run;
}

int cmd_estimate(const std::string& input, const std::string& output, const std::string& trace_path,
                 const CommonOptions& o, std::uint64_t seed, std::ostream& out) {
  const auto tables = read_tables(input);
  const MethodChoice choice = method_from(o, seed);
  std::vector<RunReport> reports;
  std::string traces;
  bool all_converged = true;
  for (std::size_t i = 0; i < tables.size(); ++i) {
    EstimateRun run = estimate_one(tables[i], choice, o.knowledge, seed, i);
    all_converged = all_converged && run.report.converged;
    if (!trace_path.empty() && !choice.is_mt) {
      if (tables.size() == 1) {
        traces = run.trace;
      } else {
        // Prefix each block with the table index.
        std::istringstream lines(run.trace);
        std::string line;
        std::getline(lines, line);
        if (i == 0) traces = "table," + line + "\n";
        while (std::getline(lines, line)) traces += std::to_string(i) + "," + line + "\n";
      }
    }
    reports.push_back(std::move(run.report));
  }
  if (!trace_path.empty()) write_file(trace_path, traces);
  emit(output, serialize_reports(reports), out);
  return all_converged ? kExitOk : kExitNoConvergence;
}

// ---------------------------------------------------------------------------
// simulate / reproduce

std::string study_header() {
  return "population,method,prior,mean,se,rmse,ci_low,ci_high,coverage,failed_reps\n";
}

std::string study_row(const StudyResult& s, const std::string& method, const std::string& prior) {
  std::ostringstream row;
  row << csv_field(s.spec.name) << ',' << method << ',' << csv_field(prior) << ','
      << fmt("%.2f", s.mean_estimate) << ',' << fmt("%.2f", s.sample_se) << ',' << fmt("%.2f", s.rmse)
      << ',' << fmt("%.1f", s.ci_low) << ',' << fmt("%.1f", s.ci_high) << ','
      << fmt("%.1f", s.coverage_pct) << ',' << s.failed << '\n';
  return row.str();
}

StudyResult run_choice(const PopulationSpec& spec, const MethodChoice& choice, std::size_t reps,
                       std::uint64_t seed, std::size_t workers) {
  const RandomSource master(seed);
  if (choice.is_mt) return run_study(spec, mt_estimator(), reps, master, workers);
  return run_study(spec, choice.config, reps, master, workers);
}

std::size_t default_workers() { return std::max(1u, std::thread::hardware_concurrency()); }

struct CustomPopulation {
  std::string pop;
  std::string name = "custom";
  std::int64_t n_true = 0;
  double phi = 0.0;
  double p1 = 0.0;
  double p_dot1 = 0.0;
};

PopulationSpec population_from(const CLI::App* cmd, const CustomPopulation& c) {
  const bool custom = cmd->count("--n-true") + cmd->count("--phi") + cmd->count("--p1") +
                          cmd->count("--p-dot1") > 0;
  if (!c.pop.empty()) {
    if (custom) fail(ErrorCode::ParseError, "give either --pop or the custom population flags, not both");
    const auto spec = find_population(c.pop);
    if (!spec) fail(ErrorCode::ParseError, "unknown population '" + c.pop + "' (expected P1-P8)");
    return *spec;
  }
  for (const char* flag : {"--n-true", "--phi", "--p1", "--p-dot1"}) {
    if (cmd->count(flag) == 0) {
      fail(ErrorCode::ParseError, std::string("custom population needs ") + flag + " (or use --pop)");
    }
  }
  PopulationSpec spec{c.name, c.n_true, c.phi, c.p1, c.p_dot1};
  validate_population(spec);
  return spec;
}

int cmd_simulate(const PopulationSpec& spec, const CommonOptions& o, std::size_t reps,
                 std::uint64_t seed, std::size_t workers, const std::string& output, std::ostream& out) {
  const MethodChoice choice = method_from(o, seed);
  const StudyResult s = run_choice(spec, choice, reps, seed, workers);
  emit(output, study_header() + study_row(s, method_name(choice), prior_label(choice)), out);
  return kExitOk;
}

struct GridCell {
  Method method;
  Knowledge knowledge;
  std::optional<PhiPrior> prior;
};

std::vector<GridCell> grid_for(int table_id) {
  switch (table_id) {
    case 3:
      return {{Method::DA, Knowledge::Prone, PhiPrior::flat(1.0, 2.0)},
              {Method::EWiG1, Knowledge::Prone, std::nullopt},
              {Method::EWiG2, Knowledge::Prone, std::nullopt},
              {Method::SEMWiG, Knowledge::Prone, std::nullopt}};
    case 4:
    case 6:
      return {{Method::DA, Knowledge::None, PhiPrior::flat(0.5, 2.0)},
              {Method::EWiG1, Knowledge::None, std::nullopt},
              {Method::EWiG2, Knowledge::None, std::nullopt},
              {Method::SEMWiG, Knowledge::None, std::nullopt}};
    case 5:
      return {{Method::DA, Knowledge::Averse, PhiPrior::flat(0.2, 1.5)},
              {Method::EWiG1, Knowledge::Averse, std::nullopt},
              {Method::EWiG2, Knowledge::Averse, std::nullopt},
              {Method::SEMWiG, Knowledge::Averse, std::nullopt}};
    default:
      break;
  }
  return {};
}

// E(x0) as tabulated: p carried to three decimals, the result rounded half to
// even. Integer arithmetic keeps the .5 ties exact.
long long tabulated_x0(const PopulationSpec& spec) {
  const double p = p_from_marginals(spec.p1, spec.p_dot1, spec.phi);
  const auto p_milli = static_cast<long long>(std::nearbyint(p * 1000.0));
  const auto p1_centi = static_cast<long long>(std::nearbyint(spec.p1 * 100.0));
  const long long scaled = spec.n_true * (100000 - (100 - p1_centi) * (1000 - p_milli));
  long long q = scaled / 100000;
  const long long r = scaled % 100000;
  if (2 * r > 100000 || (2 * r == 100000 && q % 2 != 0)) ++q;
  return q;
}

std::string table2_csv() {
  std::ostringstream out;
  out << "population,phi,p1,p_dot1,expected_x0,expected_x0_exact\n";
  for (const auto& spec : builtin_populations()) {
    const double ex0 = expected_x0(spec);
    out << spec.name << ',' << fmt("%.2f", spec.phi) << ',' << fmt("%.2f", spec.p1) << ','
        << fmt("%.2f", spec.p_dot1) << ',' << tabulated_x0(spec) << ','
        << fmt("%.2f", ex0) << '\n';
  }
  return out.str();
}

int cmd_reproduce(int table_id, std::size_t reps, std::uint64_t seed, std::size_t workers,
                  const std::string& output_dir, std::ostream& out) {
  if (table_id < 2 || table_id > 6) {
    fail(ErrorCode::ParseError, "unknown table id " + std::to_string(table_id) + " (expected 2-6)");
  }
  std::string content;
  if (table_id == 2) {
    content = table2_csv();
  } else {
    if (reps < 2) fail(ErrorCode::ParseError, "--reps must be at least 2");
    const std::size_t first_pop = (table_id == 3 || table_id == 4) ? 0 : 4;
    content = study_header();
    for (const GridCell& cell : grid_for(table_id)) {
      MethodChoice choice;
      choice.config.method = cell.method;
      choice.config.knowledge = cell.knowledge;
      choice.config.phi_prior = cell.prior;
      choice.config.seed = seed;
      for (std::size_t i = 0; i < 4; ++i) {
        const PopulationSpec& spec = builtin_populations()[first_pop + i];
        const StudyResult s = run_choice(spec, choice, reps, seed, workers);
        content += study_row(s, method_name(choice), prior_label(choice));
      }
    }
  }
  std::filesystem::create_directories(output_dir.empty() ? "." : output_dir);
  const std::string path =
      (std::filesystem::path(output_dir.empty() ? "." : output_dir) / ("table" + std::to_string(table_id) + ".csv"))
          .string();
  write_file(path, content);
  out << path << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------
// diagnose

int cmd_diagnose(const std::string& trace_path, double threshold, std::size_t check_interval,
                 const std::string& output, std::ostream& out) {
  std::ifstream in(trace_path, std::ios::binary);
  if (!in) fail(ErrorCode::ParseError, "cannot read '" + trace_path + "'");
  std::string line;
  std::size_t line_no = 1;
  if (!std::getline(in, line)) fail(ErrorCode::ParseError, "trace file is empty");
  std::vector<std::string> header;
  {
    std::istringstream hs(line);
    std::string f;
    while (std::getline(hs, f, ',')) header.push_back(f);
  }
  auto col = [&](const std::string& name) {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (header[i] == name) return i;
    }
    fail(ErrorCode::ParseError, "line 1: trace header lacks column '" + name + "'");
  };
  const std::size_t c_chain = col("chain");
  const std::size_t c_n = col("N");

  std::map<long long, std::vector<double>> by_chain;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    std::vector<std::string> fields;
    std::istringstream ls(line);
    std::string f;
    while (std::getline(ls, f, ',')) fields.push_back(f);
    if (fields.size() < std::max(c_chain, c_n) + 1) {
      fail(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": too few fields");
    }
    try {
      by_chain[std::stoll(fields[c_chain])].push_back(std::stod(fields[c_n]));
    } catch (const std::exception&) {
      fail(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": non-numeric chain or N");
    }
  }
  if (by_chain.empty()) fail(ErrorCode::ParseError, "trace has no rows");

  ChainTraces chains;
  for (auto& [id, values] : by_chain) chains.push_back(std::move(values));
  std::size_t length = chains.front().size();
  for (const auto& c : chains) length = std::min(length, c.size());

  nlohmann::ordered_json j;
  j["chains"] = chains.size();
  j["length"] = length;
  std::vector<double> retained;
  bool converged = false;
  if (chains.size() >= 2 && length >= 2) {
    for (auto& c : chains) c.resize(length);
    const double final_rhat = checkpoint_psrf(chains, length);
    j["sqrt_rhat"] = std::isfinite(final_rhat) ? nlohmann::ordered_json(final_rhat) : nullptr;
    const auto h = select_burnin(chains, threshold, check_interval);
    converged = h.has_value();
    const std::size_t start = h ? *h : length / 2;
    const std::size_t end = h ? std::min(length, 2 * *h) : length;
    j["burn_in"] = start;
    for (const auto& c : chains) retained.insert(retained.end(), c.begin() + start, c.begin() + end);
  } else {
    j["sqrt_rhat"] = nullptr;
    j["burn_in"] = 0;
    for (const auto& c : chains) retained.insert(retained.end(), c.begin(), c.end());
    converged = true;
  }
  j["converged"] = converged;
  const Summary s = summarize(retained);
  j["n"] = {{"mean", s.mean}, {"se", s.se}, {"cv", s.cv}, {"ci_low", s.ci_low}, {"ci_high", s.ci_high}};
  emit(output, j.dump(2) + "\n", out);
  return converged ? kExitOk : kExitNoConvergence;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Population size estimation from dual-record (two-list) data", "drsest"};
  app.require_subcommand(1);

  CommonOptions est;
  std::string est_input;
  std::string est_output;
  std::string est_trace;
  auto* estimate_cmd = app.add_subcommand("estimate", "estimate N for one or more observed tables");
  estimate_cmd->add_option("--input,-i", est_input, "table file (JSON object/array or CSV with header)")
      ->required();
  estimate_cmd->add_option("--output,-o", est_output, "report path (default: print the report)");
  estimate_cmd->add_option("--trace", est_trace, "write per-iteration trace CSV (h,chain,N,sqrt_rhat)");
  add_method_options(estimate_cmd, est);
  add_seed_option(estimate_cmd, est.seed);

  CommonOptions sim;
  CustomPopulation pop;
  std::size_t sim_reps = 50;
  std::size_t sim_workers = default_workers();
  std::string sim_output;
  auto* simulate_cmd = app.add_subcommand("simulate", "replication study on one population");
  simulate_cmd->add_option("--pop", pop.pop, "built-in population P1-P8");
  simulate_cmd->add_option("--name", pop.name, "label for a custom population")->capture_default_str();
  simulate_cmd->add_option("--n-true", pop.n_true, "custom population size");
  simulate_cmd->add_option("--phi", pop.phi, "custom behavioural response");
  simulate_cmd->add_option("--p1", pop.p1, "custom list-1 capture probability");
  simulate_cmd->add_option("--p-dot1", pop.p_dot1, "custom list-2 marginal capture probability");
  simulate_cmd->add_option("--reps", sim_reps, "replicates")->capture_default_str();
  simulate_cmd->add_option("--workers", sim_workers, "worker threads (default: available cores)");
  simulate_cmd->add_option("--output,-o", sim_output, "CSV path (default: print the CSV)");
  add_method_options(simulate_cmd, sim);
  add_seed_option(simulate_cmd, sim.seed);

  int table_id = 0;
  std::size_t rep_reps = 50;
  std::size_t rep_workers = default_workers();
  std::uint64_t rep_seed = 1;
  std::string rep_dir = ".";
  auto* reproduce_cmd = app.add_subcommand("reproduce", "regenerate a results table (2-6) of the study");
  reproduce_cmd->add_option("table", table_id, "table id: 2 (expected x0) or 3-6 (method grids)")->required();
  reproduce_cmd->add_option("--reps", rep_reps, "replicates per cell")->capture_default_str();
  reproduce_cmd->add_option("--workers", rep_workers, "worker threads (default: available cores)");
  reproduce_cmd->add_option("--output-dir,-o", rep_dir, "directory for table<id>.csv")->capture_default_str();
  add_seed_option(reproduce_cmd, rep_seed);

  std::string diag_trace;
  std::string diag_output;
  double diag_threshold = 1.1;
  std::size_t diag_interval = 50;
  auto* diagnose_cmd = app.add_subcommand("diagnose", "recompute sqrt(R), burn-in and summary from a trace");
  diagnose_cmd->add_option("--trace", diag_trace, "trace CSV written by estimate --trace")->required();
  diagnose_cmd->add_option("--rhat-threshold", diag_threshold, "burn-in threshold")->capture_default_str();
  diagnose_cmd->add_option("--check-interval", diag_interval, "checkpoint spacing")->capture_default_str();
  diagnose_cmd->add_option("--output,-o", diag_output, "JSON path (default: print)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitValidation;
  }

  try {
    if (estimate_cmd->parsed()) {
      return cmd_estimate(est_input, est_output, est_trace, est, resolve_seed(estimate_cmd, est.seed), out);
    }
    if (simulate_cmd->parsed()) {
      const PopulationSpec spec = population_from(simulate_cmd, pop);
      return cmd_simulate(spec, sim, sim_reps, resolve_seed(simulate_cmd, sim.seed), sim_workers,
                          sim_output, out);
    }
    if (reproduce_cmd->parsed()) {
      return cmd_reproduce(table_id, rep_reps, resolve_seed(reproduce_cmd, rep_seed), rep_workers, rep_dir,
                           out);
    }
    if (diagnose_cmd->parsed()) {
      return cmd_diagnose(diag_trace, diag_threshold, diag_interval, diag_output, out);
    }
  } catch (const Error& e) {
    err << "drsest: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    err << "drsest: " << e.what() << "\n";
    return kExitGeneric;
  }
  return kExitGeneric;
}

}  // namespace drs
