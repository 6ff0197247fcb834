#include "onoff/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string_view>

#include <nlohmann/json.hpp>

#include "onoff/error.hpp"

namespace onoff::io {
namespace {

using nlohmann::json;

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  for (;;) {
    const auto pos = line.find(sep);
    out.push_back(trim(line.substr(0, pos)));
    if (pos == std::string_view::npos) return out;
    line.remove_prefix(pos + 1);
  }
}

// Line-oriented CSV reader: skips blank lines and tracks 1-based line numbers.
class CsvReader {
 public:
  explicit CsvReader(std::istream& in) : in_(in) {}

  bool next(std::vector<std::string_view>& fields) {
    while (std::getline(in_, buffer_)) {
      ++line_;
      if (trim(buffer_).empty()) continue;
      fields = split(buffer_, ',');
      return true;
    }
    if (in_.bad()) throw IoError("read failure");
    return false;
  }

  std::size_t line() const noexcept { return line_; }

  [[noreturn]] void fail(const std::string& message) const { throw ParseError(message, line_); }

  void expect_fields(const std::vector<std::string_view>& fields, std::size_t count) const {
    if (fields.size() != count)
      fail("expected " + std::to_string(count) + " fields, found " + std::to_string(fields.size()));
  }

  double real(std::string_view field, const char* column, bool allow_inf = false) const {
    if (allow_inf && (field == "inf" || field == "+inf")) return kInf;
    double value = 0.0;
    const auto [end, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc() || end != field.data() + field.size() || field.empty())
      fail(std::string("column ") + column + ": '" + std::string(field) + "' is not a number");
    if (!std::isfinite(value)) fail(std::string("column ") + column + ": non-finite value");
    return value;
  }

  std::uint64_t count(std::string_view field, const char* column) const {
    std::uint64_t value = 0;
    const auto [end, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc() || end != field.data() + field.size() || field.empty())
      fail(std::string("column ") + column + ": '" + std::string(field) +
           "' is not a non-negative integer");
    return value;
  }

 private:
  std::istream& in_;
  std::string buffer_;
  std::size_t line_ = 0;
};

std::string header_text(const std::vector<std::string_view>& fields) {
  std::string out;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out += ',';
    out += fields[i];
  }
  return out;
}

json parse_json(std::istream& in) {
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what());
  }
}

// Runs `body`, translating JSON access errors into ParseError.
template <class F>
auto json_guard(const char* what, F&& body) {
  try {
    return body();
  } catch (const json::exception& e) {
    throw ParseError(std::string(what) + ": " + e.what());
  }
}

json number_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

double number_or(const json& j, double fallback) {
  return j.is_null() ? fallback : j.get<double>();
}

json params_json(const ParamMap& params) {
  json j = json::object();
  for (const auto& [name, value] : params) j[name] = value;
  return j;
}

ParamMap params_from(const json& j) {
  ParamMap params;
  for (const auto& [name, value] : j.items()) params[name] = value.get<double>();
  return params;
}

json fit_to_json(const FitResult& fit) {
  return {{"family", std::string(to_string(fit.family))},
          {"params", params_json(fit.params)},
          {"fidelity", fit.fidelity},
          {"residual", fit.residual},
          {"boundary", fit.boundary}};
}

EfficiencyGrid grid_from(const json& j) {
  const auto spacing = j.at("spacing").get<std::string>();
  const double lo = j.at("lo").get<double>(), hi = j.at("hi").get<double>();
  const int count = j.at("count").get<int>();
  if (spacing == "linear") return EfficiencyGrid::linear(lo, hi, count);
  if (spacing == "log") return EfficiencyGrid::log_spaced(lo, hi, count);
  throw InvalidArgument("grid spacing must be 'linear' or 'log', got '" + spacing + "'");
}

template <class T>
T with_stream(const std::filesystem::path& path, T (*reader)(std::istream&)) {
  auto in = open_input(path);
  return reader(in);
}

bool is_json(const std::filesystem::path& path) { return path.extension() == ".json"; }

}  // namespace

std::string format_number(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::vector<OnOffRecord> read_records_csv(std::istream& in) {
  CsvReader csv(in);
  std::vector<std::string_view> fields;
  if (!csv.next(fields)) throw ParseError("empty counts file");
  if (header_text(fields) != "eta,n_runs,n_no_click")
    csv.fail("expected header 'eta,n_runs,n_no_click', found '" + header_text(fields) + "'");
  std::vector<OnOffRecord> records;
  while (csv.next(fields)) {
    csv.expect_fields(fields, 3);
    OnOffRecord r{csv.real(fields[0], "eta"), csv.count(fields[1], "n_runs"),
                  csv.count(fields[2], "n_no_click")};
    try {
      validate(r);
    } catch (const InvalidArgument& e) {
      throw InvalidArgument("line " + std::to_string(csv.line()) + ": " + e.what());
    }
    records.push_back(r);
  }
  if (records.empty()) throw ParseError("counts file has no records");
  return records;
}

std::vector<OnOffRecord> read_records_json(std::istream& in) {
  const json j = parse_json(in);
  auto records = json_guard("counts JSON", [&] {
    if (!j.is_array()) throw ParseError("counts JSON must be an array of records");
    std::vector<OnOffRecord> out;
    for (const auto& item : j)
      out.push_back({item.at("eta").get<double>(), item.at("n_runs").get<std::uint64_t>(),
                     item.at("n_no_click").get<std::uint64_t>()});
    return out;
  });
  if (records.empty()) throw ParseError("counts file has no records");
  for (std::size_t i = 0; i < records.size(); ++i) {
    try {
      validate(records[i]);
    } catch (const InvalidArgument& e) {
      throw InvalidArgument("record " + std::to_string(i) + ": " + e.what());
    }
  }
  return records;
}

std::vector<OnOffRecord> read_records(const std::filesystem::path& path) {
  return with_stream(path, is_json(path) ? &read_records_json : &read_records_csv);
}

void write_records_csv(std::ostream& out, std::span<const OnOffRecord> records) {
  out << "eta,n_runs,n_no_click\n";
  for (const auto& r : records)
    out << format_number(r.eta) << ',' << r.n_runs << ',' << r.n_no_click << '\n';
}

void write_records_json(std::ostream& out, std::span<const OnOffRecord> records) {
  json j = json::array();
  for (const auto& r : records)
    j.push_back({{"eta", r.eta}, {"n_runs", r.n_runs}, {"n_no_click", r.n_no_click}});
  out << j.dump(2) << '\n';
}

DistributionTable read_distribution_csv(std::istream& in) {
  CsvReader csv(in);
  std::vector<std::string_view> fields;
  if (!csv.next(fields)) throw ParseError("empty distribution file");
  const std::string header = header_text(fields);
  const bool with_sigma = header == "n,rho,sigma";
  if (!with_sigma && header != "n,prob")
    csv.fail("expected header 'n,prob' or 'n,rho,sigma', found '" + header + "'");

  std::vector<double> probs, sigma;
  while (csv.next(fields)) {
    csv.expect_fields(fields, with_sigma ? 3 : 2);
    if (csv.count(fields[0], "n") != probs.size())
      csv.fail("photon numbers must run 0, 1, 2, ... without gaps");
    const double p = csv.real(fields[1], with_sigma ? "rho" : "prob");
    if (p < 0.0)
      throw InvalidArgument("line " + std::to_string(csv.line()) + ": negative probability");
    probs.push_back(p);
    if (with_sigma) sigma.push_back(csv.real(fields[2], "sigma", true));
  }
  if (probs.empty()) throw ParseError("distribution file has no rows");
  return {PhotonDistribution(std::move(probs)), std::move(sigma)};
}

DistributionTable read_distribution_json(std::istream& in) {
  const json j = parse_json(in);
  return json_guard("distribution JSON", [&] {
    const json& arr = j.is_object() ? j.at("rho") : j;
    auto probs = arr.get<std::vector<double>>();
    if (probs.empty()) throw ParseError("distribution has no entries");
    std::vector<double> sigma;
    if (j.is_object() && j.contains("sigma"))
      for (const auto& s : j.at("sigma")) sigma.push_back(number_or(s, kInf));
    return DistributionTable{PhotonDistribution(std::move(probs)), std::move(sigma)};
  });
}

DistributionTable read_distribution(const std::filesystem::path& path) {
  return with_stream(path, is_json(path) ? &read_distribution_json : &read_distribution_csv);
}

void write_distribution_csv(std::ostream& out, const PhotonDistribution& rho,
                            std::span<const double> sigma) {
  if (!sigma.empty() && sigma.size() != rho.size())
    throw InvalidArgument("sigma column length does not match the distribution");
  out << (sigma.empty() ? "n,prob\n" : "n,rho,sigma\n");
  for (std::size_t n = 0; n < rho.size(); ++n) {
    out << n << ',' << format_number(rho[n]);
    if (!sigma.empty()) out << ',' << format_number(sigma[n]);
    out << '\n';
  }
}

void write_result_json(std::ostream& out, const ReconstructionResult& result) {
  json sigma = json::array(), errors = json::array(), loglik = json::array();
  for (double s : result.sigma) sigma.push_back(number_or_null(s));
  for (const auto& h : result.error_history) errors.push_back({h.iteration, h.value});
  for (const auto& h : result.loglik_history) loglik.push_back({h.iteration, number_or_null(h.value)});
  const json j = {{"n_bar", result.rho_hat.truncation()},
                  {"rho", std::vector<double>(result.rho_hat.probs().begin(),
                                              result.rho_hat.probs().end())},
                  {"sigma", sigma},
                  {"error_history", errors},
                  {"loglik_history", loglik},
                  {"iterations_run", result.iterations_run},
                  {"stop_reason", std::string(to_string(result.stop_reason))}};
  out << j.dump(2) << '\n';
}

ReconstructionResult read_result_json(std::istream& in) {
  const json j = parse_json(in);
  return json_guard("result JSON", [&] {
    ReconstructionResult r{PhotonDistribution(j.at("rho").get<std::vector<double>>()),
                           {}, {}, {}, j.at("iterations_run").get<std::int64_t>(),
                           stop_reason_from_string(j.at("stop_reason").get<std::string>())};
    for (const auto& s : j.at("sigma")) r.sigma.push_back(number_or(s, kInf));
    for (const auto& h : j.at("error_history"))
      r.error_history.push_back({h.at(0).get<std::int64_t>(), h.at(1).get<double>()});
    for (const auto& h : j.at("loglik_history"))
      r.loglik_history.push_back({h.at(0).get<std::int64_t>(), number_or(h.at(1), -kInf)});
    return r;
  });
}

void write_convergence_csv(std::ostream& out, const ReconstructionResult& result) {
  if (result.error_history.size() != result.loglik_history.size())
    throw InvalidArgument("error and log-likelihood histories differ in length");
  out << "iteration,total_error,log_likelihood\n";
  for (std::size_t k = 0; k < result.error_history.size(); ++k)
    out << result.error_history[k].iteration << ',' << format_number(result.error_history[k].value)
        << ',' << format_number(result.loglik_history[k].value) << '\n';
}

void write_fit_json(std::ostream& out, const FitResult& fit) {
  out << fit_to_json(fit).dump(2) << '\n';
}

FitResult read_fit_json(std::istream& in) {
  const json j = parse_json(in);
  return json_guard("fit JSON", [&] {
    return FitResult{family_from_string(j.at("family").get<std::string>()),
                     params_from(j.at("params")), j.at("fidelity").get<double>(),
                     j.at("residual").get<double>(), j.at("boundary").get<bool>()};
  });
}

void write_fits_csv(std::ostream& out, std::span<const FitResult> fits) {
  out << "family,params,G,residual,boundary\n";
  for (const auto& f : fits) {
    out << to_string(f.family) << ',';
    bool first = true;
    for (const auto& [name, value] : f.params) {
      out << (first ? "" : ";") << name << '=' << format_number(value);
      first = false;
    }
    out << ',' << format_number(f.fidelity) << ',' << format_number(f.residual) << ','
        << (f.boundary ? 1 : 0) << '\n';
  }
}

std::vector<FitResult> read_fits_csv(std::istream& in) {
  CsvReader csv(in);
  std::vector<std::string_view> fields;
  if (!csv.next(fields)) throw ParseError("empty fit table");
  if (header_text(fields) != "family,params,G,residual,boundary")
    csv.fail("expected header 'family,params,G,residual,boundary'");
  std::vector<FitResult> fits;
  while (csv.next(fields)) {
    csv.expect_fields(fields, 5);
    FitResult f{family_from_string(fields[0]), {}, csv.real(fields[2], "G"),
                csv.real(fields[3], "residual"), csv.count(fields[4], "boundary") != 0};
    for (std::string_view item : split(fields[1], ';')) {
      const auto eq = item.find('=');
      if (eq == std::string_view::npos) csv.fail("parameter '" + std::string(item) + "' lacks '='");
      f.params[std::string(trim(item.substr(0, eq)))] = csv.real(trim(item.substr(eq + 1)), "params");
    }
    fits.push_back(std::move(f));
  }
  return fits;
}

void write_scenario_json(std::ostream& out, const ScenarioSpec& spec) {
  json truth;
  if (spec.truth_model) {
    truth = {{"family", std::string(to_string(spec.truth_model->family))},
             {"params", params_json(spec.truth_model->params)},
             {"n_bar", spec.truth_model->n_bar}};
  } else {
    truth = {{"probs", std::vector<double>(spec.truth.probs().begin(), spec.truth.probs().end())}};
  }
  const json j = {{"label", spec.label},
                  {"truth", truth},
                  {"etas", std::vector<double>(spec.grid.etas().begin(), spec.grid.etas().end())},
                  {"runs_per_eta", spec.runs_per_eta},
                  {"seed", spec.seed},
                  {"rng", std::string(SplitMix64::kAlgorithm)}};
  out << j.dump(2) << '\n';
}

ScenarioSpec read_scenario_json(std::istream& in) {
  const json j = parse_json(in);
  ScenarioSpec spec = json_guard("scenario JSON", [&] {
    if (j.contains("rng") && j.at("rng").get<std::string>() != SplitMix64::kAlgorithm)
      throw InvalidArgument("unsupported rng '" + j.at("rng").get<std::string>() + "'");
    const json& t = j.at("truth");
    std::optional<TruthModel> model;
    std::optional<PhotonDistribution> truth;
    if (t.contains("probs")) {
      truth.emplace(t.at("probs").get<std::vector<double>>());
    } else {
      model = TruthModel{family_from_string(t.at("family").get<std::string>()),
                         params_from(t.at("params")), t.at("n_bar").get<int>()};
      truth.emplace(make_distribution(model->family, model->params, model->n_bar));
    }
    EfficiencyGrid grid = j.contains("etas") ? EfficiencyGrid(j.at("etas").get<std::vector<double>>())
                                             : grid_from(j.at("grid"));
    return ScenarioSpec{std::move(*truth), std::move(grid), j.at("runs_per_eta").get<std::uint64_t>(),
                        j.value("seed", std::uint64_t{0}), j.value("label", std::string("custom")),
                        std::move(model)};
  });
  validate(spec);
  return spec;
}

ScenarioSpec read_scenario(const std::filesystem::path& path) {
  return with_stream(path, &read_scenario_json);
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  return out;
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  return in;
}

}  // namespace onoff::io
