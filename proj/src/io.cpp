#include "cavityfock/io.hpp"

#include <charconv>
#include <sstream>
#include <stdexcept>
#include <system_error>

#include <fmt/format.h>

namespace cavityfock::io {

std::string format_number(double value) { return fmt::format("{:.17g}", value); }

nlohmann::json to_json(const PhotonDistribution& d) {
  return nlohmann::json(std::vector<double>(d.probs().begin(), d.probs().end()));
}

PhotonDistribution distribution_from_json(const nlohmann::json& j) {
  if (!j.is_array()) throw std::invalid_argument("photon distribution JSON must be an array of probabilities");
  return PhotonDistribution(j.get<std::vector<double>>());
}

std::string to_csv(const PhotonDistribution& d) {
  std::string out = "n,probability\n";
  for (std::size_t n = 0; n < d.size(); ++n) out += fmt::format("{},{}\n", n, format_number(d[n]));
  return out;
}

PhotonDistribution distribution_from_csv(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  if (!std::getline(in, line) || line != "n,probability")
    throw std::invalid_argument("distribution CSV must start with the header 'n,probability'");
  std::vector<double> probs;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw std::invalid_argument(fmt::format("CSV row {}: missing comma", row));
    std::size_t n = 0;
    const auto [ptr, ec] = std::from_chars(line.data(), line.data() + comma, n);
    if (ec != std::errc{} || ptr != line.data() + comma)
      throw std::invalid_argument(fmt::format("CSV row {}: bad photon number", row));
    if (n != probs.size())
      throw std::invalid_argument(fmt::format("CSV row {}: expected n = {}, got {}", row, probs.size(), n));
    double value = 0.0;
    const char* end = line.data() + line.size();
    const auto parsed = std::from_chars(line.data() + comma + 1, end, value);
    if (parsed.ec != std::errc{} || parsed.ptr != end)
      throw std::invalid_argument(fmt::format("CSV row {}: bad probability", row));
    probs.push_back(value);
  }
  return PhotonDistribution(std::move(probs));
}

nlohmann::json to_json(const FilterTable& f) {
  std::vector<double> plus(f.values().begin(), f.values().end());
  std::vector<double> minus;
  minus.reserve(plus.size());
  for (std::size_t n = 0; n < f.size(); ++n) minus.push_back(f.p_minus(n));
  return {{"provenance", std::string(to_string(f.provenance()))}, {"p_plus", plus}, {"p_minus", minus}};
}

std::string to_csv(const FilterTable& f) {
  std::string out = "n,p_plus,p_minus\n";
  for (std::size_t n = 0; n < f.size(); ++n)
    out += fmt::format("{},{},{}\n", n, format_number(f.p_plus(n)), format_number(f.p_minus(n)));
  return out;
}

std::string history_to_csv(std::span<const PhotonDistribution> history) {
  std::string out = "m,n,probability\n";
  for (std::size_t m = 0; m < history.size(); ++m) {
    for (std::size_t n = 0; n < history[m].size(); ++n)
      out += fmt::format("{},{},{}\n", m, n, format_number(history[m][n]));
  }
  return out;
}

nlohmann::json history_to_json(std::span<const PhotonDistribution> history) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& d : history) out.push_back(to_json(d));
  return out;
}

nlohmann::json to_json(const Trajectory& t) {
  nlohmann::json sequence = nlohmann::json::array();
  for (const Outcome& o : t.sequence.entries())
    sequence.push_back({{"case", o.atom_case == AtomCase::a ? "a" : "b"}, {"k", o.k}});
  return {{"sequence", sequence}, {"probability", t.probability}, {"final", to_json(t.final)}};
}

std::string trajectories_to_jsonl(std::span<const Trajectory> trajectories) {
  std::string out;
  for (const auto& t : trajectories) {
    out += to_json(t).dump();
    out += '\n';
  }
  return out;
}

std::string schedule_run_to_csv(const ScheduleRun& run) {
  std::string out = "m,mean_probability,stddev\n";
  for (std::size_t m = 0; m < run.mean.size(); ++m)
    out += fmt::format("{},{},{}\n", m, format_number(run.mean[m]), format_number(run.stddev[m]));
  return out;
}

nlohmann::json to_json(const ScheduleRun& run) {
  return {{"mean_probability", run.mean},
          {"stddev", run.stddev},
          {"realizations", run.realizations},
          {"resampled", run.resampled}};
}

nlohmann::json to_json(const Schedule& s) { return nlohmann::json(s.etas); }

Schedule schedule_from_json(const nlohmann::json& j) {
  if (!j.is_array()) throw std::invalid_argument("schedule JSON must be an array of eta values");
  Schedule s{j.get<std::vector<double>>()};
  s.validate();
  return s;
}

}  // namespace cavityfock::io
