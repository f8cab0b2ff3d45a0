#include "cli.hpp"

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "gpentropy/gpentropy.hpp"

namespace gpentropy::cli {
namespace {

struct Config {
  std::string spec_path;
  std::string spec_json;
  std::string alphas = "2";
  std::int64_t grid = kDefaultGridSize;
  std::string n_list = "16,64,256,1024";
  std::string format = "json";
  std::uint64_t seed = SelfCheckOptions{}.seed;
  double floor = kDefaultFloor;
  std::string window = "bartlett";
  std::int64_t max_lag = 0;  // 0: floor(sqrt(N))
  std::string out_path;
  std::string data_path;
  std::int64_t length = 10000;
  bool binary = false;
  std::uint64_t max_dim = kDefaultMaxDim;
};

/// Command-line problems that are not library errors.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item.erase(0, item.find_first_not_of(" \t"));
    item.erase(item.find_last_not_of(" \t") + 1);
    if (item.empty()) throw UsageError(fmt::format("empty entry in list \"{}\"", text));
    out.push_back(item);
  }
  if (out.empty()) throw UsageError("empty list");
  return out;
}

std::vector<double> parse_alphas(const std::string& text) {
  std::vector<double> out;
  for (const auto& item : split_list(text)) {
    std::size_t used = 0;
    double value = 0.0;
    try {
      value = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != item.size()) throw UsageError(fmt::format("bad alpha \"{}\"", item));
    check_alpha(value);
    out.push_back(value);
  }
  return out;
}

std::vector<std::int64_t> parse_n_list(const std::string& text) {
  std::vector<std::int64_t> out;
  for (const auto& item : split_list(text)) {
    std::size_t used = 0;
    long long value = 0;
    try {
      value = std::stoll(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != item.size() || value < 1) {
      throw UsageError(fmt::format("bad block count \"{}\" (positive integers only)", item));
    }
    out.push_back(value);
  }
  return out;
}

ProcessSpec load_spec(const Config& config) {
  const bool has_path = !config.spec_path.empty();
  const bool has_inline = !config.spec_json.empty();
  if (has_path == has_inline) {
    throw UsageError("give exactly one of --spec <path> or --spec-json <inline>");
  }
  return has_path ? process_spec_from_file(config.spec_path)
                  : process_spec_from_string(config.spec_json);
}

void check_format(const Config& config, bool csv_allowed) {
  if (config.format == "json") return;
  if (config.format == "csv" && csv_allowed) return;
  throw UsageError(fmt::format("unsupported --format \"{}\"", config.format));
}

class Output {
 public:
  Output(const Config& config, std::ostream& fallback) : fallback_(fallback) {
    if (!config.out_path.empty()) {
      file_.open(config.out_path, std::ios::binary);
      if (!file_) throw UsageError(fmt::format("cannot write \"{}\"", config.out_path));
    }
  }
  std::ostream& stream() { return file_.is_open() ? file_ : fallback_; }

 private:
  std::ofstream file_;
  std::ostream& fallback_;
};

int cmd_rate(const Config& config, std::ostream& out) {
  const std::vector<double> alphas = parse_alphas(config.alphas);
  check_format(config, false);
  const ProcessSpec spec = load_spec(config);
  const EntropyReport report = entropy_rate(spec, alphas, config.grid, config.floor);
  Output sink(config, out);
  sink.stream() << dump_json(to_json(report)) << '\n';
  return kOk;
}

int cmd_finite(const Config& config, std::ostream& out) {
  const std::vector<double> alphas = parse_alphas(config.alphas);
  const std::vector<std::int64_t> ns = parse_n_list(config.n_list);
  check_format(config, true);
  const ProcessSpec spec = load_spec(config);
  for (std::int64_t n : ns) check_block_count(n, spec.m(), config.max_dim);

  std::vector<FiniteEntropy> rows;
  rows.reserve(ns.size());
  for (std::int64_t n : ns) rows.push_back(finite_entropy(spec, n, alphas, config.max_dim));

  Output sink(config, out);
  std::ostream& os = sink.stream();
  if (config.format == "csv") {
    os << "n,shannon";
    for (double alpha : alphas) os << ",renyi_" << alpha_key(alpha);
    os << '\n';
    for (const auto& row : rows) {
      os << row.n << ',' << format_number(row.shannon_per_block);
      for (double alpha : alphas) os << ',' << format_number(row.renyi_per_block.at(alpha));
      os << '\n';
    }
  } else {
    OrderedJson doc;
    doc["spec"] = describe(spec);
    OrderedJson list = OrderedJson::array();
    for (const auto& row : rows) list.push_back(to_json(row));
    doc["rows"] = std::move(list);
    os << dump_json(doc) << '\n';
  }
  return kOk;
}

int cmd_converge(const Config& config, std::ostream& out) {
  const std::vector<std::int64_t> ns = parse_n_list(config.n_list);
  check_format(config, true);
  const ProcessSpec spec = load_spec(config);
  const ConvergenceTable table =
      convergence_study(spec, spectral_log(), ns, config.grid, config.max_dim);

  Output sink(config, out);
  std::ostream& os = sink.stream();
  if (config.format == "csv") {
    os << "n,finite_rate,limit_rate,gap\n";
    for (const auto& row : table.rows) {
      os << row.n << ',' << format_number(row.finite_rate) << ','
         << format_number(row.limit_rate) << ',' << format_number(row.gap) << '\n';
    }
  } else {
    os << dump_json(to_json(table)) << '\n';
  }
  return kOk;
}

int cmd_estimate(const Config& config, std::ostream& out) {
  const std::vector<double> alphas = parse_alphas(config.alphas);
  check_format(config, false);
  if (config.data_path.empty()) throw UsageError("estimate needs a data file");
  const TimeSeries ts = load_timeseries(config.data_path);

  LagWindow window = default_window(ts.length());
  if (config.window == "truncation") {
    window.kind = WindowKind::truncation;
  } else if (config.window != "bartlett") {
    throw UsageError(fmt::format("unknown --window \"{}\"", config.window));
  }
  if (config.max_lag != 0) window.max_lag = config.max_lag;

  const ProcessSpec spec = estimated_spec(ts, window);
  const EntropyReport report = entropy_rate(spec, alphas, config.grid, config.floor);
  OrderedJson doc = to_json(report);
  doc["window"] = {{"kind", to_string(window.kind)},
                   {"max_lag", window.max_lag},
                   {"samples", ts.length()}};
  doc["source"] = ts.source();
  Output sink(config, out);
  sink.stream() << dump_json(doc) << '\n';
  return kOk;
}

int cmd_selfcheck(const Config& config, std::ostream& out, std::ostream& err) {
  SelfCheckOptions options;
  options.seed = config.seed;
  options.floor = config.floor;
  const SelfCheckReport report = run_selfcheck(options);
  Output sink(config, out);
  sink.stream() << dump_json(to_json(report)) << '\n';
  if (report.passed()) return kOk;
  OrderedJson failing = OrderedJson::array();
  for (const auto& c : report.cases) {
    if (!c.passed) failing.push_back(to_json(c));
  }
  OrderedJson doc;
  doc["error"] = "SelfCheckFailed";
  doc["failing"] = std::move(failing);
  err << dump_json(doc, 0) << '\n';
  return kCheckFailed;
}

int cmd_simulate(const Config& config, std::ostream& out) {
  const ProcessSpec spec = load_spec(config);
  const TimeSeries ts = simulate(spec, config.length, config.seed);
  if (config.binary) {
    if (config.out_path.empty()) throw UsageError("--binary needs --out <path>");
    std::ofstream file(config.out_path, std::ios::binary);
    if (!file) throw UsageError(fmt::format("cannot write \"{}\"", config.out_path));
    write_binary(file, ts);
    return kOk;
  }
  Output sink(config, out);
  write_csv(sink.stream(), ts);
  return kOk;
}

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::invalid_spec:
    case ErrorKind::bad_alpha:
    case ErrorKind::parse_error:
    case ErrorKind::lag_out_of_range:
      return kBadInput;
    case ErrorKind::singular_density:
    case ErrorKind::not_positive_definite:
    case ErrorKind::below_floor:
      return kSingular;
    case ErrorKind::domain_error:
    case ErrorKind::no_convergence:
      return kNumerical;
    case ErrorKind::size_limit:
      return kSizeLimit;
  }
  return kNumerical;
}

OrderedJson error_json(const Error& e) {
  OrderedJson doc;
  doc["error"] = to_string(e.kind());
  doc["message"] = e.what();
  if (const auto* s = dynamic_cast<const SingularDensity*>(&e)) {
    doc["theta"] = s->theta();
    doc["eigenvalue"] = s->eigenvalue();
  } else if (const auto* p = dynamic_cast<const NotPositiveDefinite*>(&e)) {
    doc["pivot"] = p->pivot();
  } else if (const auto* b = dynamic_cast<const BelowFloor*>(&e)) {
    doc["eigenvalue"] = b->eigenvalue();
    doc["threshold"] = b->threshold();
  } else if (const auto* l = dynamic_cast<const SizeLimit*>(&e)) {
    doc["requested"] = l->requested();
    doc["cap"] = l->cap();
  } else if (const auto* a = dynamic_cast<const BadAlpha*>(&e)) {
    doc["alpha"] = a->alpha();
  }
  doc["exit_code"] = exit_code_for(e.kind());
  return doc;
}

int report_usage_error(std::ostream& err, const std::string& message) {
  OrderedJson doc;
  doc["error"] = "UsageError";
  doc["message"] = message;
  doc["exit_code"] = static_cast<int>(kBadInput);
  err << dump_json(doc, 0) << '\n';
  return kBadInput;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Config config;
  CLI::App app{"Entropy rates of stationary vector Gaussian processes", "gpentropy"};
  app.require_subcommand(1);

  auto add_spec = [&config](CLI::App* sub) {
    sub->add_option("--spec", config.spec_path, "Process spec JSON file");
    sub->add_option("--spec-json", config.spec_json, "Inline process spec JSON");
  };
  auto add_common = [&config](CLI::App* sub) {
    sub->add_option("--format", config.format, "Output format: json or csv");
    sub->add_option("--out", config.out_path, "Write output to this path instead of stdout");
  };

  CLI::App* rate = app.add_subcommand("rate", "Asymptotic Shannon/Renyi entropy rates");
  add_spec(rate);
  add_common(rate);
  rate->add_option("--alpha", config.alphas, "Comma-separated Renyi orders");
  rate->add_option("--grid", config.grid, "Initial quadrature grid size");
  rate->add_option("--floor", config.floor, "Relative eigenvalue floor");

  CLI::App* finite = app.add_subcommand("finite", "Exact finite-n entropies per block");
  add_spec(finite);
  add_common(finite);
  finite->add_option("--alpha", config.alphas, "Comma-separated Renyi orders");
  finite->add_option("--n", config.n_list, "Comma-separated block counts");
  finite->add_option("--max-dim", config.max_dim, "Cap on n*m");

  CLI::App* converge = app.add_subcommand("converge", "Szego convergence table for f = log");
  add_spec(converge);
  add_common(converge);
  converge->add_option("--n", config.n_list, "Comma-separated block counts");
  converge->add_option("--grid", config.grid, "Quadrature grid size");
  converge->add_option("--max-dim", config.max_dim, "Cap on n*m");

  CLI::App* estimate = app.add_subcommand("estimate", "Entropy rate of a time-series file");
  add_common(estimate);
  estimate->add_option("data", config.data_path, "CSV or GRTS binary time series")->required();
  estimate->add_option("--alpha", config.alphas, "Comma-separated Renyi orders");
  estimate->add_option("--grid", config.grid, "Initial quadrature grid size");
  estimate->add_option("--floor", config.floor, "Relative eigenvalue floor");
  estimate->add_option("--window", config.window, "Lag window: bartlett or truncation");
  estimate->add_option("--max-lag", config.max_lag, "Lag window length L (default floor(sqrt(N)))");

  CLI::App* selfcheck = app.add_subcommand("selfcheck", "Seeded Gaussian identity checks");
  add_common(selfcheck);
  selfcheck->add_option("--seed", config.seed, "Random seed");
  selfcheck->add_option("--floor", config.floor, "Relative eigenvalue floor");

  CLI::App* sim = app.add_subcommand("simulate", "Sample a path from a process spec");
  add_spec(sim);
  sim->add_option("--out", config.out_path, "Output path");
  sim->add_option("--length", config.length, "Number of time steps");
  sim->add_option("--seed", config.seed, "Random seed");
  sim->add_flag("--binary", config.binary, "Write the GRTS binary format");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    return report_usage_error(err, e.what());
  }

  try {
    if (rate->parsed()) return cmd_rate(config, out);
    if (finite->parsed()) return cmd_finite(config, out);
    if (converge->parsed()) return cmd_converge(config, out);
    if (estimate->parsed()) return cmd_estimate(config, out);
    if (selfcheck->parsed()) return cmd_selfcheck(config, out, err);
    if (sim->parsed()) return cmd_simulate(config, out);
  } catch (const Error& e) {
    const OrderedJson doc = error_json(e);
    err << dump_json(doc, 0) << '\n';
    return exit_code_for(e.kind());
  } catch (const UsageError& e) {
    return report_usage_error(err, e.what());
  } catch (const std::invalid_argument& e) {
    return report_usage_error(err, e.what());
  }
  return report_usage_error(err, "no subcommand");
}

}  // namespace gpentropy::cli
