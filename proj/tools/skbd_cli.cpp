#include <cstdlib>
#include <fstream>
#include <iostream>
#include <thread>

#include "CLI11.hpp"
#include "skbd/errors.hpp"
#include "skbd/io.hpp"

using namespace skbd;

namespace {

enum Exit { ok = 0, parse_error = 2, invalid_params = 3, mismatch = 4, runtime_failure = 1 };

int default_threads() {
  if (const char* env = std::getenv("SKBD_THREADS")) {
    int v = std::atoi(env);
    if (v > 0) return v;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

void write_out(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path + "'");
  out << text;
}

std::vector<Scenario> resolve_scenarios(const std::vector<std::string>& specs) {
  std::vector<Scenario> out;
  for (const auto& s : specs) {
    if (s == "fixed") {
      for (auto& x : fixed_scenarios()) out.push_back(x);
      continue;
    }
    if (s == "insertion") {
      for (auto& x : insertion_scenarios()) out.push_back(x);
      continue;
    }
    bool named = false;
    for (auto cat : {fixed_scenarios(), insertion_scenarios()})
      for (auto& x : cat)
        if (x.name == s) out.push_back(x), named = true;
    if (named) continue;
    for (auto& x : load_scenarios(s)) out.push_back(x);
  }
  return out;
}

std::string join(const std::vector<std::string>& v, const char* sep) {
  std::string r;
  for (const auto& s : v) r += (r.empty() ? "" : sep) + s;
  return r;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Kernel-borrowing keyboard dose-finding: tables, decisions, simulations"};
  app.require_subcommand(1);

  std::string config_path, context_path, data_path, format = "text", out_path;
  int n_min = 1, n_max = 18, current = 0;

  auto* table = app.add_subcommand("table", "Print the decision table at one dose");
  table->add_option("--config", config_path, "Design config (JSON)")->required();
  table->add_option("--context", context_path, "Interim data at the other doses (JSON)");
  table->add_option("--current", current, "Dose level the table is for (1-based)");
  table->add_option("--n-min", n_min, "Smallest sample size");
  table->add_option("--n-max", n_max, "Largest sample size");
  table->add_option("--format", format, "text, csv or json")->check(CLI::IsMember({"text", "csv", "json"}));
  table->add_option("--out", out_path, "Output file (default stdout)");

  auto* decide_cmd = app.add_subcommand("decide", "Recommend the next dose from interim data");
  decide_cmd->add_option("--config", config_path, "Design config (JSON)")->required();
  decide_cmd->add_option("--data", data_path, "Trial data (JSON)")->required();
  decide_cmd->add_option("--format", format, "text or json")->check(CLI::IsMember({"text", "json"}));
  decide_cmd->add_option("--out", out_path, "Output file (default stdout)");

  std::vector<std::string> config_paths, scenario_specs;
  long replicates = 1000;
  std::uint64_t seed = 1;
  int threads = 0;
  std::string records_path;
  auto* simulate = app.add_subcommand("simulate", "Operating characteristics by simulation");
  simulate->add_option("--config", config_paths, "Design config(s) (JSON)")->required();
  simulate->add_option("--scenario", scenario_specs,
                       "Scenario file, 'fixed', 'insertion', or a catalog name such as fixed16")
      ->required();
  simulate->add_option("--replicates", replicates, "Trials per scenario and design")->check(CLI::PositiveNumber);
  simulate->add_option("--seed", seed, "Base seed");
  simulate->add_option("--threads", threads, "Worker threads (default SKBD_THREADS or all cores)");
  simulate->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  simulate->add_option("--out", out_path, "Output file (default stdout)");
  simulate->add_option("--records", records_path, "Also dump every trial as JSON lines");

  auto* scen = app.add_subcommand("scenarios", "Scenario catalogs");
  scen->require_subcommand(1);
  auto* exp = scen->add_subcommand("export", "Write a scenario catalog as JSON");
  std::string set = "fixed";
  int levels = 5, count = 100;
  double phi = 0.3;
  exp->add_option("--set", set, "fixed, insertion or random")->check(CLI::IsMember({"fixed", "insertion", "random"}));
  exp->add_option("--levels", levels, "Dose levels for random scenarios");
  exp->add_option("--phi", phi, "Target rate for random scenarios");
  exp->add_option("--count", count, "Number of random scenarios");
  exp->add_option("--seed", seed, "Seed for random scenarios");
  exp->add_option("--out", out_path, "Output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return parse_error;
  }

  try {
    if (table->parsed()) {
      Config cfg = load_config(config_path);
      cfg.require_phi();
      TrialInput in;
      if (!context_path.empty()) {
        in = parse_trial_input(read_json_file(context_path), cfg, current == 0);
      } else {
        std::size_t m = cfg.sim.doses ? cfg.sim.doses->size() : 5;
        in.state.grid = build_grid(cfg, m, nullptr, nullptr);
        in.state.data = TrialData(m);
      }
      if (current > 0) {
        if (static_cast<std::size_t>(current) > in.state.grid.size())
          throw ConfigError("current", "dose level out of range");
        in.state.current = static_cast<std::size_t>(current - 1);
      }
      if (in.n_min && !table->count("--n-min")) n_min = *in.n_min;
      if (in.n_max && !table->count("--n-max")) n_max = *in.n_max;
      if (n_min < 1 || n_max < n_min) throw ConfigError("n_range", "must satisfy 1 <= n_min <= n_max");
      auto rows = decision_table(cfg.design(), in.state.grid, in.state.data, in.state.current, n_min, n_max);
      RunManifest man{"table --config " + config_path +
                          (context_path.empty() ? "" : " --context " + context_path) +
                          " --n-min " + std::to_string(n_min) + " --n-max " + std::to_string(n_max),
                      config_path, cfg.hash, 0, out_path, version()};
      std::string text;
      bool to_file = !out_path.empty() && out_path != "-";
      if (format == "json") {
        json j = {{"manifest", manifest_to_json(man)}, {"rows", table_to_json(rows)}};
        text = j.dump(2) + "\n";
      } else if (format == "csv") {
        text = (to_file ? manifest_csv_comment(man) : "") + render_table_csv(rows);
      } else {
        text = (to_file ? manifest_csv_comment(man) : "") + render_table_text(rows);
      }
      write_out(out_path, text);
      return ok;
    }

    if (decide_cmd->parsed()) {
      Config cfg = load_config(config_path);
      cfg.require_phi();
      TrialInput in = parse_trial_input(read_json_file(data_path), cfg);
      const TrialState& st = in.state;
      json j;
      if (in.has_patients) {
        TiteConfig tc = cfg.sim.tite.value_or(TiteConfig{});
        DoseCounts eff = effective_dose_counts(in.patients, st.grid.size(), tc.tau);
        auto d = evaluate_decision(cfg.design(), st.grid, eff, st.data.n[st.current], st.current,
                                   st.eliminated_from);
        j = decision_to_json(d, cfg.design(), st, suspension_check(in.patients, st.current, tc.tau, tc.min_completed));
      } else {
        j = decision_to_json(evaluate_decision(cfg.design(), st), cfg.design(), st);
      }
      if (format == "json") {
        j["manifest"] = manifest_to_json({"decide --config " + config_path + " --data " + data_path,
                                          config_path, cfg.hash, 0, out_path, version()});
        write_out(out_path, j.dump(2) + "\n");
      } else {
        std::string t = "action: " + j["action"].get<std::string>() + "\n";
        t += "current dose: " + std::to_string(st.current + 1) + "\n";
        t += "pseudo counts: y'=" + fmt_num(j["pseudo_counts"]["y_prime"].get<double>()) +
             " n'=" + fmt_num(j["pseudo_counts"]["n_prime"].get<double>()) + "\n";
        t += "posterior: Beta(" + fmt_num(j["posterior"]["alpha"].get<double>()) + ", " +
             fmt_num(j["posterior"]["beta"].get<double>()) + ")\n";
        t += "strongest key: " + std::to_string(j["strongest_key"].get<int>()) +
             "  target key: " + std::to_string(j["target_key"].get<int>()) + "\n";
        t += "Pr(tox > target): " + fmt_num(j["prob_above_target"].get<double>()) + "\n";
        write_out(out_path, t);
      }
      return ok;
    }

    if (simulate->parsed()) {
      if (threads <= 0) threads = default_threads();
      std::vector<Config> cfgs;
      std::vector<std::string> hashes;
      for (const auto& p : config_paths) {
        cfgs.push_back(load_config(p));
        hashes.push_back(cfgs.back().hash);
      }
      auto scenarios = resolve_scenarios(scenario_specs);
      for (const auto& c : cfgs)
        for (const auto& s : scenarios) check_compatible(c.sim, s);
      if (format == "text") format = "csv";
      std::vector<OCSummary> rows;
      std::ofstream rec;
      if (!records_path.empty()) {
        rec.open(records_path, std::ios::binary);
        if (!rec) throw Error("cannot write '" + records_path + "'");
      }
      for (const auto& s : scenarios) {
        for (const auto& c : cfgs) {
          auto recs = run_records(c.sim, s, replicates, seed, threads);
          OCSummary o = oc_metrics(recs, s, c.sim.metrics, c.sim.insertion.has_value());
          o.design = c.sim.name;
          o.seed = seed;
          rows.push_back(o);
          if (rec) {
            for (std::size_t r = 0; r < recs.size(); ++r) {
              const auto& t = recs[r];
              json p = json::array();
              for (const auto& st : t.path)
                p.push_back({{"cohort", st.cohort}, {"dose", st.dose_index + 1}, {"raw_dose", st.raw_dose},
                             {"n", st.n}, {"y", st.y}, {"action", st.action}});
              json ins = json::array();
              for (const auto& e : t.insertions)
                ins.push_back({{"cohort", e.cohort}, {"raw_dose", e.raw_dose}, {"std_dose", e.std_dose},
                               {"trigger", to_string(e.kind)}});
              json line = {{"scenario", s.name}, {"design", c.sim.name}, {"replicate", r},
                           {"selected", t.selected_mtd ? json(*t.selected_mtd + 1) : json(nullptr)},
                           {"doses", t.raw_doses}, {"allocations", t.allocations}, {"dlts", t.dlts},
                           {"terminated_early", t.terminated_early}, {"path", p}, {"insertions", ins}};
              rec << rounded(line).dump() << "\n";
            }
          }
        }
      }
      std::string cmd = "simulate --config " + join(config_paths, " --config ") + " --scenario " +
                        join(scenario_specs, " --scenario ") + " --replicates " + std::to_string(replicates) +
                        " --seed " + std::to_string(seed) + " --format " + format;
      RunManifest man{cmd, join(config_paths, ";"), join(hashes, ";"), seed, out_path, version()};
      std::string text;
      if (format == "json") {
        json rs = json::array();
        for (const auto& o : rows) rs.push_back(oc_to_json(o));
        text = json{{"manifest", manifest_to_json(man)}, {"results", rs}}.dump(2) + "\n";
      } else {
        text = manifest_csv_comment(man) + render_oc_csv(rows);
      }
      write_out(out_path, text);
      return ok;
    }

    if (exp->parsed()) {
      std::vector<Scenario> list;
      if (set == "fixed") list = fixed_scenarios();
      else if (set == "insertion") list = insertion_scenarios();
      else {
        for (int i = 0; i < count; ++i) {
          Stream rng(seed, static_cast<std::uint64_t>(i));
          Scenario s = random_scenario(levels, phi, RandomConstraints{}, rng);
          s.name = "random" + std::to_string(i + 1);
          list.push_back(s);
        }
      }
      json arr = json::array();
      for (const auto& s : list) arr.push_back(scenario_to_json(s));
      RunManifest man{"scenarios export --set " + set, "", "", set == "random" ? seed : 0, out_path, version()};
      write_out(out_path, json{{"manifest", manifest_to_json(man)}, {"scenarios", arr}}.dump(2) + "\n");
      return ok;
    }
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return parse_error;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return invalid_params;
  } catch (const MismatchError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return mismatch;
  } catch (const NoDataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return invalid_params;
  } catch (const InvalidArgument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return invalid_params;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return runtime_failure;
  }
  return ok;
}
