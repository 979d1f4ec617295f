#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "skbd/design.hpp"
#include "skbd/sim.hpp"
#include "skbd/tite.hpp"

namespace skbd {

using json = nlohmann::json;

std::string version();

struct Config {
  SimDesign sim;
  bool has_phi = false;
  std::string hash;

  const DesignConfig& design() const { return sim.design; }
  // Throws ConfigError unless phi was given.
  void require_phi() const;
};

// Strict: unknown keys and wrong types raise ParseError, range problems ConfigError.
Config parse_config(const json& doc);
Config load_config(const std::string& path);
json read_json_file(const std::string& path);
json parse_json_text(const std::string& text);

struct TrialInput {
  TrialState state;
  std::vector<PatientRecord> patients;
  bool has_patients = false;
  std::optional<int> n_min;
  std::optional<int> n_max;
};

// Dose levels are 1-based in documents.
TrialInput parse_trial_input(const json& doc, const Config& cfg, bool require_current = true);

// Working grid: prespecified doses from the config (or 1..m) plus inserted doses.
DoseGrid build_grid(const Config& cfg, std::size_t m, const std::vector<double>* doses,
                    const std::vector<bool>* inserted);

Scenario parse_scenario(const json& doc);
std::vector<Scenario> parse_scenarios(const json& doc);
std::vector<Scenario> load_scenarios(const std::string& path);
json scenario_to_json(const Scenario& s);

double round_sig(double x, int digits = 10);
std::string fmt_num(double x);
// Recursively rounds every floating number to 10 significant digits.
json rounded(const json& j);

std::string render_table_text(const std::vector<TableRow>& rows);
std::string render_table_csv(const std::vector<TableRow>& rows);
json table_to_json(const std::vector<TableRow>& rows);

json decision_to_json(const DecisionDetail& d, const DesignConfig& cfg, const TrialState& st,
                      std::optional<bool> escalation_permitted = std::nullopt);

json oc_to_json(const OCSummary& o);
std::string oc_csv_header(std::size_t doses);
std::string oc_csv_row(const OCSummary& o);
std::string render_oc_csv(const std::vector<OCSummary>& rows);

struct RunManifest {
  std::string command;
  std::string config_path;
  std::string config_hash;
  std::uint64_t seed = 0;
  std::string output_path;
  std::string version;
};

json manifest_to_json(const RunManifest& m);
std::string manifest_csv_comment(const RunManifest& m);

std::string fnv1a_hex(const std::string& bytes);

}  // namespace skbd
