#include "cavityfock/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>

#include <fmt/format.h>
#include <openssl/evp.h>

#include "cavityfock/io.hpp"
#include "cavityfock/measurement.hpp"

#ifndef CAVITYFOCK_VERSION
#define CAVITYFOCK_VERSION "0.0.0"
#endif

namespace cavityfock::cli {

using nlohmann::json;

namespace {

constexpr std::pair<ExperimentKind, std::string_view> kKindNames[] = {
    {ExperimentKind::filter_dump, "filter-dump"},     {ExperimentKind::ensemble, "ensemble"},
    {ExperimentKind::trajectories, "trajectories"},   {ExperimentKind::brute_force, "brute-force"},
    {ExperimentKind::binomial, "binomial"},           {ExperimentKind::trap_schedule, "trap-schedule"},
    {ExperimentKind::validate_oracle, "validate-oracle"},
};

std::string join(const std::string& path, std::string_view key) {
  return path.empty() ? std::string(key) : path + "." + std::string(key);
}

// Reads fields out of one JSON object and rejects any key never asked for.
class ObjectReader {
 public:
  ObjectReader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_, "expected a JSON object");
  }

  const json* find(std::string_view key) {
    seen_.insert(std::string(key));
    const auto it = j_.find(std::string(key));
    return it == j_.end() ? nullptr : &*it;
  }

  std::string field(std::string_view key) const { return join(path_, key); }

  void number(std::string_view key, double& out) {
    if (const json* v = find(key)) {
      if (!v->is_number()) throw ConfigError(field(key), "expected a number");
      out = v->get<double>();
      if (!std::isfinite(out)) throw ConfigError(field(key), "must be finite");
    }
  }

  template <class Unsigned>
  void count(std::string_view key, Unsigned& out) {
    if (const json* v = find(key)) {
      if (!v->is_number_integer() || (v->is_number_integer() && !v->is_number_unsigned() && v->get<long long>() < 0))
        throw ConfigError(field(key), "expected a non-negative integer");
      out = v->get<Unsigned>();
    }
  }

  void text(std::string_view key, std::string& out) {
    if (const json* v = find(key)) {
      if (!v->is_string()) throw ConfigError(field(key), "expected a string");
      out = v->get<std::string>();
    }
  }

  void numbers(std::string_view key, std::vector<double>& out) {
    if (const json* v = find(key)) {
      if (!v->is_array()) throw ConfigError(field(key), "expected an array of numbers");
      out.clear();
      for (std::size_t i = 0; i < v->size(); ++i) {
        if (!(*v)[i].is_number()) throw ConfigError(fmt::format("{}[{}]", field(key), i), "expected a number");
        out.push_back((*v)[i].get<double>());
      }
    }
  }

  void finish() const {
    for (const auto& item : j_.items()) {
      if (!seen_.contains(item.key())) throw ConfigError(field(item.key()), "unknown field");
    }
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

void require(bool ok, const std::string& path, const std::string& message) {
  if (!ok) throw ConfigError(path, message);
}

InitialConfig parse_initial(const json& j) {
  ObjectReader r(j, "initial");
  InitialConfig out;
  std::string state = "vacuum";
  r.text("state", state);
  double tail = 1e-12;
  r.number("tail_epsilon", tail);
  require(tail > 0.0, r.field("tail_epsilon"), "must be > 0");
  if (const json* v = r.find("nmax"); v && !v->is_null()) {
    std::size_t nmax = 0;
    r.count("nmax", nmax);
    out.nmax = nmax;
  }
  if (state == "vacuum") {
    out.spec = {Vacuum{}, tail};
  } else if (state == "fock") {
    std::size_t n = 0;
    r.count("n", n);
    out.spec = {FockState{n}, tail};
  } else if (state == "coherent") {
    double nbar = 0.0;
    r.number("nbar", nbar);
    require(nbar >= 0.0, r.field("nbar"), "must be >= 0");
    out.spec = {CoherentState{nbar}, tail};
  } else {
    throw ConfigError(r.field("state"), fmt::format("unknown state '{}' (vacuum, fock, coherent)", state));
  }
  r.finish();
  return out;
}

FilterConfig parse_filter(const json& j) {
  ObjectReader r(j, "filter");
  FilterConfig out;
  std::string type = "resonant";
  r.text("type", type);
  if (type == "resonant") out.type = FilterType::resonant;
  else if (type == "adiabatic") out.type = FilterType::adiabatic;
  else if (type == "dk") out.type = FilterType::dk;
  else if (type == "numeric") out.type = FilterType::numeric;
  else throw ConfigError(r.field("type"), fmt::format("unknown filter type '{}' (resonant, adiabatic, dk, numeric)", type));

  r.count("nmax", out.nmax);
  if (out.type == FilterType::adiabatic) {
    r.number("kappa", out.kappa);
    require(out.kappa >= 0.0 && out.kappa <= 1.0, r.field("kappa"), "must lie in [0, 1]");
  } else {
    r.number("eta", out.eta);
    require(out.eta >= 0.0, r.field("eta"), "must be >= 0");
  }
  if (out.type == FilterType::dk || out.type == FilterType::numeric) {
    r.number("lambda1", out.lambda1);
    r.number("lambda2", out.lambda2);
  }
  if (out.type == FilterType::numeric) {
    r.number("window", out.window);
    r.number("tol", out.tol);
    require(out.window >= 10.0, r.field("window"), "must be >= 10");
    require(out.tol > 0.0, r.field("tol"), "must be > 0");
  }
  r.finish();
  return out;
}

ScheduleConfig parse_schedule(const json& j, const std::string& path) {
  ObjectReader r(j, path);
  ScheduleConfig out;
  std::string type = "fixed";
  r.text("type", type);
  if (type == "fixed") {
    out.type = ScheduleType::fixed;
    r.count("n_prime", out.n_prime);
    r.count("q", out.q);
    require(out.q >= 1, r.field("q"), "must be >= 1");
  } else if (type == "incrementing") {
    out.type = ScheduleType::incrementing;
    r.count("n_prime", out.n_prime);
    r.count("q_start", out.q_start);
    require(out.q_start >= 1, r.field("q_start"), "must be >= 1");
  } else if (type == "custom") {
    out.type = ScheduleType::custom;
    r.numbers("etas", out.etas);
    require(!out.etas.empty(), r.field("etas"), "must not be empty");
    for (std::size_t i = 0; i < out.etas.size(); ++i)
      require(std::isfinite(out.etas[i]) && out.etas[i] > 0.0, fmt::format("{}[{}]", r.field("etas"), i),
              "must be > 0");
  } else if (type == "file") {
    out.type = ScheduleType::file;
    r.text("path", out.path);
    require(!out.path.empty(), r.field("path"), "must name a JSON file");
  } else {
    throw ConfigError(r.field("type"),
                      fmt::format("unknown schedule type '{}' (fixed, incrementing, custom, file)", type));
  }
  r.finish();
  return out;
}

ValidateConfig parse_validate(const json& j) {
  ObjectReader r(j, "validate");
  ValidateConfig out;
  r.numbers("lambdas", out.lambdas);
  r.numbers("etas", out.etas);
  r.count("nmax", out.nmax);
  r.numbers("resonant_etas", out.resonant_etas);
  r.count("resonant_nmax", out.resonant_nmax);
  r.number("tolerance", out.tolerance);
  r.number("window", out.window);
  r.number("tol", out.tol);
  for (double eta : out.etas) require(eta >= 0.0, r.field("etas"), "entries must be >= 0");
  for (double eta : out.resonant_etas) require(eta >= 0.0, r.field("resonant_etas"), "entries must be >= 0");
  require(out.tolerance > 0.0, r.field("tolerance"), "must be > 0");
  require(out.window >= 10.0, r.field("window"), "must be >= 10");
  require(out.tol > 0.0, r.field("tol"), "must be > 0");
  r.finish();
  return out;
}

void check_cross_fields(const ExperimentConfig& c) {
  if (const auto* fock = std::get_if<FockState>(&c.initial.spec.kind); fock && c.initial.nmax && fock->n > *c.initial.nmax)
    throw ConfigError("initial.n", fmt::format("fock n = {} exceeds initial.nmax = {}", fock->n, *c.initial.nmax));
  if (c.kind == ExperimentKind::brute_force && c.atoms > kMaxEnumeratedAtoms)
    throw ConfigError("atoms", fmt::format("brute-force enumeration is limited to {} atoms", kMaxEnumeratedAtoms));
  if (c.kind == ExperimentKind::trap_schedule) {
    require(!c.schedules.empty(), "schedules", "must not be empty");
    require(!c.noise_sigmas.empty(), "noise_sigmas", "must not be empty");
  }
}

std::string kappa_case_name(AtomCase c) { return c == AtomCase::a ? "a" : "b"; }

json initial_to_json(const InitialConfig& init) {
  json j;
  if (std::holds_alternative<Vacuum>(init.spec.kind)) {
    j["state"] = "vacuum";
  } else if (const auto* f = std::get_if<FockState>(&init.spec.kind)) {
    j["state"] = "fock";
    j["n"] = f->n;
  } else {
    j["state"] = "coherent";
    j["nbar"] = std::get<CoherentState>(init.spec.kind).nbar;
  }
  j["nmax"] = init.nmax ? json(*init.nmax) : json(nullptr);
  j["tail_epsilon"] = init.spec.tail_epsilon;
  return j;
}

json filter_to_json(const FilterConfig& f) {
  json j;
  switch (f.type) {
    case FilterType::resonant: j = {{"type", "resonant"}, {"eta", f.eta}}; break;
    case FilterType::adiabatic: j = {{"type", "adiabatic"}, {"kappa", f.kappa}}; break;
    case FilterType::dk:
      j = {{"type", "dk"}, {"lambda1", f.lambda1}, {"lambda2", f.lambda2}, {"eta", f.eta}};
      break;
    case FilterType::numeric:
      j = {{"type", "numeric"}, {"lambda1", f.lambda1}, {"lambda2", f.lambda2}, {"eta", f.eta},
           {"window", f.window}, {"tol", f.tol}};
      break;
  }
  j["nmax"] = f.nmax;
  return j;
}

json schedule_to_json(const ScheduleConfig& s) {
  switch (s.type) {
    case ScheduleType::fixed: return {{"type", "fixed"}, {"n_prime", s.n_prime}, {"q", s.q}};
    case ScheduleType::incrementing: return {{"type", "incrementing"}, {"n_prime", s.n_prime}, {"q_start", s.q_start}};
    case ScheduleType::custom: return {{"type", "custom"}, {"etas", s.etas}};
    case ScheduleType::file: return {{"type", "file"}, {"path", s.path}};
  }
  return {};
}

std::string schedule_label(const ScheduleConfig& s) {
  switch (s.type) {
    case ScheduleType::fixed: return fmt::format("fixed-n{}-q{}", s.n_prime, s.q);
    case ScheduleType::incrementing: return fmt::format("incrementing-n{}-q{}", s.n_prime, s.q_start);
    case ScheduleType::custom: return "custom";
    case ScheduleType::file: return "file";
  }
  return "schedule";
}

// ---- execution ----

FilterTable build_filter(const FilterConfig& f, std::size_t nmax, AtomCase atom_case) {
  switch (f.type) {
    case FilterType::resonant: return resonant_filter(f.eta, nmax);
    case FilterType::adiabatic: return adiabatic_filter(Kappa(f.kappa), nmax);
    case FilterType::dk: return dk_filter(f.lambda1, f.lambda2, f.eta, nmax);
    case FilterType::numeric:
      return numeric_filter(DKParams::from_dimensionless(f.lambda1, f.lambda2, f.eta), atom_case, nmax,
                            PropagationOptions{f.window, f.tol});
  }
  throw std::logic_error("unhandled filter type");
}

PhotonDistribution build_initial(const InitialConfig& init) {
  return make_distribution(init.spec, init.nmax.value_or(default_nmax(init.spec)));
}

Schedule build_schedule(const ScheduleConfig& s, std::size_t atoms) {
  switch (s.type) {
    case ScheduleType::fixed: return make_schedule_fixed(s.n_prime, s.q, atoms);
    case ScheduleType::incrementing: return make_schedule_incrementing(s.n_prime, s.q_start, atoms);
    case ScheduleType::custom: {
      Schedule schedule{s.etas};
      schedule.validate();
      return schedule;
    }
    case ScheduleType::file: {
      std::ifstream in(s.path);
      if (!in) throw ConfigError("schedules.path", fmt::format("cannot open schedule file '{}'", s.path));
      return io::schedule_from_json(json::parse(in));
    }
  }
  throw std::logic_error("unhandled schedule type");
}

class OutputWriter {
 public:
  explicit OutputWriter(std::filesystem::path dir) : dir_(std::move(dir)) { std::filesystem::create_directories(dir_); }

  void write(const std::string& name, const std::string& content) {
    std::ofstream out(dir_ / name, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error(fmt::format("cannot write '{}'", (dir_ / name).string()));
    out << content;
    if (!out) throw std::runtime_error(fmt::format("write to '{}' failed", (dir_ / name).string()));
    files_.push_back({name, sha256_hex(content), content.size()});
  }

  const std::vector<OutputFile>& files() const { return files_; }

 private:
  std::filesystem::path dir_;
  std::vector<OutputFile> files_;
};

std::string json_text(const json& j) { return j.dump(2) + "\n"; }

void run_filter_dump(const ExperimentConfig& c, OutputWriter& out, RunReport& report) {
  const FilterTable table = build_filter(c.filter, c.filter.nmax, c.atom_case);
  if (c.format == OutputFormat::csv) out.write("filter.csv", io::to_csv(table));
  else out.write("filter.json", json_text(io::to_json(table)));
  report.summary = {{"provenance", std::string(to_string(table.provenance()))}, {"nmax", table.nmax()}};
}

void run_ensemble(const ExperimentConfig& c, OutputWriter& out, RunReport& report) {
  const PhotonDistribution d0 = build_initial(c.initial);
  const FilterTable f = build_filter(c.filter, d0.nmax() + c.atoms + 1, c.atom_case);
  const auto history = ensemble_run(d0, f, c.atom_case, c.atoms);
  if (c.format == OutputFormat::csv) out.write("ensemble.csv", io::history_to_csv(history));
  else out.write("ensemble.json", json_text(io::history_to_json(history)));

  const PhotonDistribution& last = history.back();
  std::vector<std::size_t> order(last.size());
  for (std::size_t n = 0; n < order.size(); ++n) order[n] = n;
  const std::size_t top = std::min<std::size_t>(5, order.size());
  std::partial_sort(order.begin(), order.begin() + static_cast<long>(top), order.end(),
                    [&](std::size_t a, std::size_t b) { return last[a] > last[b]; });
  order.resize(top);
  report.summary = {{"final_mean", mean_photon(last)},
                    {"final_variance", variance(last)},
                    {"final_mass", last.mass()},
                    {"most_probable_n", order}};
}

void run_trajectories(const ExperimentConfig& c, OutputWriter& out, RunReport& report) {
  const PhotonDistribution d0 = build_initial(c.initial);
  const std::vector<FilterTable> filters{build_filter(c.filter, d0.nmax() + c.atoms + 1, c.atom_case)};
  const std::vector<AtomCase> cases{c.atom_case};
  const auto trajectories = sample_trajectories(d0, filters, cases, c.atoms, c.trajectories, c.seed);
  out.write("trajectories.jsonl", io::trajectories_to_jsonl(trajectories));

  std::map<std::vector<int>, std::size_t> counts;
  for (const auto& t : trajectories) {
    std::vector<int> key;
    for (const Outcome& o : t.sequence.entries()) key.push_back(o.k);
    ++counts[key];
  }
  json sequences = json::array();
  for (const auto& [key, n] : counts) {
    std::vector<Outcome> entries;
    for (int k : key) entries.push_back({c.atom_case, k});
    sequences.push_back({{"sequence", key},
                         {"count", n},
                         {"frequency", double(n) / double(c.trajectories)},
                         {"probability", sequence_probability(d0, filters, OutcomeSequence(entries))}});
  }
  report.summary = {{"count", c.trajectories}, {"sequences", sequences}};
}

void run_brute_force(const ExperimentConfig& c, OutputWriter& out, RunReport& report) {
  const PhotonDistribution d0 = build_initial(c.initial);
  const FilterTable f = build_filter(c.filter, d0.nmax() + c.atoms + 1, c.atom_case);
  const PhotonDistribution ensemble = brute_force_ensemble(d0, f, c.atom_case, c.atoms);
  if (c.format == OutputFormat::csv) out.write("brute_force.csv", io::to_csv(ensemble));
  else out.write("brute_force.json", json_text(io::to_json(ensemble)));
  const auto recurrence = ensemble_run(d0, f, c.atom_case, c.atoms).back();
  report.summary = {{"sup_distance_to_recurrence", sup_distance(ensemble, recurrence)},
                    {"mean", mean_photon(ensemble)},
                    {"variance", variance(ensemble)}};
}

void run_binomial(const ExperimentConfig& c, OutputWriter& out, RunReport& report) {
  const Kappa kappa(c.kappa);
  const PhotonDistribution closed = binomial_closed_form(kappa, c.atoms);
  if (c.format == OutputFormat::csv) out.write("binomial.csv", io::to_csv(closed));
  else out.write("binomial.json", json_text(io::to_json(closed)));
  const auto recurrence =
      ensemble_run(make_distribution({Vacuum{}}, 0), adiabatic_filter(kappa, c.atoms + 1), AtomCase::a, c.atoms).back();
  report.summary = {{"variance", variance(closed)},
                    {"expected_variance", double(c.atoms) * c.kappa * (1.0 - c.kappa)},
                    {"sup_distance_to_recurrence", sup_distance(closed, recurrence)}};
}

void run_trap_schedule(const ExperimentConfig& c, OutputWriter& out, RunReport& report) {
  const PhotonDistribution d0 = build_initial(c.initial);
  json curves = json::array();
  for (const ScheduleConfig& sc : c.schedules) {
    const Schedule schedule = build_schedule(sc, c.atoms);
    for (const double sigma : c.noise_sigmas) {
      const NoiseModel noise{sigma, c.seed};
      const ScheduleRun result = run_schedule(d0, schedule, c.atom_case, noise, c.target_n, c.realizations);
      const std::string stem = fmt::format("trap_{}_sigma{}", schedule_label(sc), sigma);
      if (c.format == OutputFormat::csv) out.write(stem + ".csv", io::schedule_run_to_csv(result));
      else out.write(stem + ".json", json_text(io::to_json(result)));
      if (result.resampled > 0)
        report.warnings.push_back(fmt::format("{}: redrew {} non-positive noisy eta values", stem, result.resampled));
      const auto reached = first_reaching(result.mean, c.threshold);
      curves.push_back({{"schedule", schedule_label(sc)},
                        {"sigma", sigma},
                        {"realizations", result.realizations},
                        {"atoms_to_threshold", reached ? json(*reached) : json(nullptr)},
                        {"final_mean_probability", result.mean.back()},
                        {"resampled", result.resampled}});
    }
  }
  report.summary = {{"target_n", c.target_n}, {"threshold", c.threshold}, {"curves", curves}};
}

void run_validate(const ExperimentConfig& c, OutputWriter& out, RunReport& report) {
  const ValidateConfig& v = c.validate;
  const PropagationOptions options{v.window, v.tol};
  struct Row {
    std::string check;
    double lambda1, lambda2, eta;
    std::size_t n;
    double analytic, numeric;
  };
  std::vector<Row> rows;
  double worst_dk = 0.0;
  double worst_resonant = 0.0;
  for (double l1 : v.lambdas) {
    for (double l2 : v.lambdas) {
      for (double eta : v.etas) {
        const FilterTable exact = dk_filter(l1, l2, eta, v.nmax);
        const FilterTable numeric = numeric_filter(DKParams::from_dimensionless(l1, l2, eta), AtomCase::a, v.nmax, options);
        for (std::size_t n = 0; n <= v.nmax; ++n) {
          rows.push_back({"dk", l1, l2, eta, n, exact.p_plus(n), numeric.p_plus(n)});
          worst_dk = std::max(worst_dk, std::abs(exact.p_plus(n) - numeric.p_plus(n)));
        }
      }
    }
  }
  for (double eta : v.resonant_etas) {
    const FilterTable exact = resonant_filter(eta, v.resonant_nmax);
    const FilterTable numeric = numeric_filter(DKParams::from_dimensionless(0, 0, eta), AtomCase::a, v.resonant_nmax, options);
    for (std::size_t n = 1; n <= v.resonant_nmax; ++n) {
      rows.push_back({"resonant", 0.0, 0.0, eta, n, exact.p_plus(n), numeric.p_plus(n)});
      worst_resonant = std::max(worst_resonant, std::abs(exact.p_plus(n) - numeric.p_plus(n)));
    }
  }

  if (c.format == OutputFormat::csv) {
    std::string csv = "check,lambda1,lambda2,eta,n,analytic,numeric,abs_diff\n";
    for (const Row& r : rows)
      csv += fmt::format("{},{},{},{},{},{},{},{}\n", r.check, io::format_number(r.lambda1), io::format_number(r.lambda2),
                         io::format_number(r.eta), r.n, io::format_number(r.analytic), io::format_number(r.numeric),
                         io::format_number(std::abs(r.analytic - r.numeric)));
    out.write("validate.csv", csv);
  } else {
    json arr = json::array();
    for (const Row& r : rows)
      arr.push_back({{"check", r.check}, {"lambda1", r.lambda1}, {"lambda2", r.lambda2}, {"eta", r.eta}, {"n", r.n},
                     {"analytic", r.analytic}, {"numeric", r.numeric}, {"abs_diff", std::abs(r.analytic - r.numeric)}});
    out.write("validate.json", json_text(arr));
  }
  const bool pass = worst_dk <= v.tolerance && worst_resonant <= v.tolerance;
  report.summary = {{"max_abs_diff_dk", worst_dk},
                    {"max_abs_diff_resonant", worst_resonant},
                    {"tolerance", v.tolerance},
                    {"pass", pass}};
  if (!pass) report.exit_code = 1;
}

}  // namespace

std::string_view to_string(ExperimentKind kind) {
  for (const auto& [k, name] : kKindNames)
    if (k == kind) return name;
  return "unknown";
}

std::optional<ExperimentKind> parse_kind(std::string_view text) {
  for (const auto& [k, name] : kKindNames)
    if (name == text) return k;
  return std::nullopt;
}

ExperimentConfig config_from_json(const json& j) {
  ObjectReader r(j, "");
  ExperimentConfig c;
  std::string kind = std::string(to_string(c.kind));
  r.text("kind", kind);
  const auto parsed = parse_kind(kind);
  if (!parsed) throw ConfigError("kind", fmt::format("unknown experiment kind '{}'", kind));
  c.kind = *parsed;

  if (const json* v = r.find("initial")) c.initial = parse_initial(*v);
  if (const json* v = r.find("filter")) c.filter = parse_filter(*v);
  std::string atom_case = "a";
  r.text("case", atom_case);
  if (atom_case == "a") c.atom_case = AtomCase::a;
  else if (atom_case == "b") c.atom_case = AtomCase::b;
  else throw ConfigError("case", fmt::format("unknown atom case '{}' (a, b)", atom_case));

  r.count("atoms", c.atoms);
  r.count("seed", c.seed);
  r.count("trajectories", c.trajectories);
  require(c.trajectories >= 1, "trajectories", "must be >= 1");
  r.number("kappa", c.kappa);
  require(c.kappa >= 0.0 && c.kappa <= 1.0, "kappa", "must lie in [0, 1]");
  if (const json* v = r.find("schedules")) {
    if (!v->is_array()) throw ConfigError("schedules", "expected an array of schedule objects");
    c.schedules.clear();
    for (std::size_t i = 0; i < v->size(); ++i) c.schedules.push_back(parse_schedule((*v)[i], fmt::format("schedules[{}]", i)));
  }
  r.numbers("noise_sigmas", c.noise_sigmas);
  for (double s : c.noise_sigmas) require(s >= 0.0 && s < 1.0, "noise_sigmas", "entries must lie in [0, 1)");
  r.count("realizations", c.realizations);
  require(c.realizations >= 1, "realizations", "must be >= 1");
  r.count("target_n", c.target_n);
  r.number("threshold", c.threshold);
  require(c.threshold > 0.0 && c.threshold <= 1.0, "threshold", "must lie in (0, 1]");
  if (const json* v = r.find("validate")) c.validate = parse_validate(*v);
  std::string format = "csv";
  r.text("format", format);
  if (format == "csv") c.format = OutputFormat::csv;
  else if (format == "json") c.format = OutputFormat::json;
  else throw ConfigError("format", fmt::format("unknown format '{}' (csv, json)", format));
  r.finish();

  check_cross_fields(c);
  return c;
}

ExperimentConfig parse_config(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("", fmt::format("invalid JSON: {}", e.what()));
  }
  return config_from_json(j);
}

json to_json(const ExperimentConfig& c) {
  json schedules = json::array();
  for (const auto& s : c.schedules) schedules.push_back(schedule_to_json(s));
  const ValidateConfig& v = c.validate;
  return {{"kind", std::string(to_string(c.kind))},
          {"initial", initial_to_json(c.initial)},
          {"filter", filter_to_json(c.filter)},
          {"case", kappa_case_name(c.atom_case)},
          {"atoms", c.atoms},
          {"seed", c.seed},
          {"trajectories", c.trajectories},
          {"kappa", c.kappa},
          {"schedules", schedules},
          {"noise_sigmas", c.noise_sigmas},
          {"realizations", c.realizations},
          {"target_n", c.target_n},
          {"threshold", c.threshold},
          {"validate",
           {{"lambdas", v.lambdas},
            {"etas", v.etas},
            {"nmax", v.nmax},
            {"resonant_etas", v.resonant_etas},
            {"resonant_nmax", v.resonant_nmax},
            {"tolerance", v.tolerance},
            {"window", v.window},
            {"tol", v.tol}}},
          {"format", c.format == OutputFormat::csv ? "csv" : "json"}};
}

std::vector<std::string> preset_names() { return {"fig1", "fig2"}; }

ExperimentConfig preset(std::string_view name) {
  ExperimentConfig c;
  if (name == "fig1") {
    c.kind = ExperimentKind::ensemble;
    c.initial.spec = {CoherentState{47.0}};
    c.filter = FilterConfig{};
    c.filter.type = FilterType::resonant;
    c.filter.eta = 1.0;
    c.atom_case = AtomCase::a;
    c.atoms = 1000;
    return c;
  }
  if (name == "fig2") {
    c.kind = ExperimentKind::trap_schedule;
    c.initial.spec = {CoherentState{4.0}};
    c.atom_case = AtomCase::a;
    c.atoms = 300;
    c.target_n = 10;
    c.schedules = {ScheduleConfig{ScheduleType::fixed, 10, 1, 1, {}, {}},
                   ScheduleConfig{ScheduleType::incrementing, 10, 1, 1, {}, {}}};
    c.noise_sigmas = {0.0, 0.02};
    c.realizations = 200;
    c.threshold = 0.9;
    return c;
  }
  throw ConfigError("preset", fmt::format("unknown preset '{}' (fig1, fig2)", name));
}

RunReport run(const ExperimentConfig& config, const std::filesystem::path& out_dir) {
  check_cross_fields(config);
  OutputWriter out(out_dir);
  RunReport report;
  switch (config.kind) {
    case ExperimentKind::filter_dump: run_filter_dump(config, out, report); break;
    case ExperimentKind::ensemble: run_ensemble(config, out, report); break;
    case ExperimentKind::trajectories: run_trajectories(config, out, report); break;
    case ExperimentKind::brute_force: run_brute_force(config, out, report); break;
    case ExperimentKind::binomial: run_binomial(config, out, report); break;
    case ExperimentKind::trap_schedule: run_trap_schedule(config, out, report); break;
    case ExperimentKind::validate_oracle: run_validate(config, out, report); break;
  }
  report.outputs = out.files();

  json outputs = json::array();
  for (const auto& f : report.outputs) outputs.push_back({{"file", f.name}, {"bytes", f.bytes}, {"sha256", f.sha256}});
  const json manifest = {{"tool", "cavityfock"},
                         {"version", CAVITYFOCK_VERSION},
                         {"config", to_json(config)},
                         {"outputs", outputs},
                         {"summary", report.summary},
                         {"warnings", report.warnings},
                         {"exit_code", report.exit_code}};
  out.write("manifest.json", json_text(manifest));
  return report;
}

std::string sha256_hex(std::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &length, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("SHA-256 digest failed");
  std::string hex;
  hex.reserve(2 * length);
  for (unsigned int i = 0; i < length; ++i) hex += fmt::format("{:02x}", digest[i]);
  return hex;
}

}  // namespace cavityfock::cli
