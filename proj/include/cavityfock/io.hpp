#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "cavityfock/filters.hpp"
#include "cavityfock/fockspace.hpp"
#include "cavityfock/measurement.hpp"
#include "cavityfock/trapping.hpp"

// Text formats. CSV numbers use 17 significant digits so equal doubles give
// equal bytes; every CSV starts with a header row.
namespace cavityfock::io {

std::string format_number(double value);

nlohmann::json to_json(const PhotonDistribution& d);
PhotonDistribution distribution_from_json(const nlohmann::json& j);

// "n,probability"
std::string to_csv(const PhotonDistribution& d);
PhotonDistribution distribution_from_csv(std::string_view text);

// {"provenance": ..., "p_plus": [...], "p_minus": [...]}
nlohmann::json to_json(const FilterTable& f);
// "n,p_plus,p_minus"
std::string to_csv(const FilterTable& f);

// "m,n,probability"
std::string history_to_csv(std::span<const PhotonDistribution> history);
nlohmann::json history_to_json(std::span<const PhotonDistribution> history);

// {"sequence": [{"case": "a", "k": -1}, ...], "probability": p, "final": [...]}
nlohmann::json to_json(const Trajectory& t);
std::string trajectories_to_jsonl(std::span<const Trajectory> trajectories);

// "m,mean_probability,stddev"
std::string schedule_run_to_csv(const ScheduleRun& run);
nlohmann::json to_json(const ScheduleRun& run);

// Schedules are plain JSON arrays of eta.
nlohmann::json to_json(const Schedule& s);
Schedule schedule_from_json(const nlohmann::json& j);

}  // namespace cavityfock::io
