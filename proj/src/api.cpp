#include "skbd/api.hpp"

#include <random>

#include "httplib.h"
#include "skbd/errors.hpp"

namespace skbd::api {

const char* to_string(JobStatus s) {
  switch (s) {
    case JobStatus::queued: return "queued";
    case JobStatus::running: return "running";
    case JobStatus::done: return "done";
    case JobStatus::failed: return "failed";
  }
  return "?";
}

namespace {

Reply error_reply(int status, const std::string& msg, const std::string& field = "") {
  json b = {{"error", msg}};
  if (!field.empty()) b["field"] = field;
  return {status, b};
}

template <class F>
Reply guarded(F&& f) {
  try {
    return f();
  } catch (const ConfigError& e) {
    return error_reply(400, e.what(), e.field());
  } catch (const ParseError& e) {
    return error_reply(400, e.what());
  } catch (const MismatchError& e) {
    return error_reply(400, e.what());
  } catch (const NoDataError& e) {
    return error_reply(422, e.what());
  } catch (const InvalidArgument& e) {
    return error_reply(400, e.what());
  } catch (const json::exception& e) {
    return error_reply(400, e.what());
  }
}

const json& member(const json& body, const char* key) {
  if (!body.is_object()) throw ParseError("request body must be a JSON object");
  if (!body.contains(key) || body.at(key).is_null()) throw ConfigError(key, "is required");
  return body.at(key);
}

void only_keys(const json& body, std::initializer_list<const char*> keys) {
  if (!body.is_object()) throw ParseError("request body must be a JSON object");
  for (auto it = body.begin(); it != body.end(); ++it) {
    bool ok = false;
    for (auto k : keys) ok = ok || it.key() == k;
    if (!ok) throw ParseError("unknown key '" + it.key() + "'");
  }
}

Scenario named_scenario(const std::string& name) {
  for (auto& s : fixed_scenarios())
    if (s.name == name) return s;
  for (auto& s : insertion_scenarios())
    if (s.name == name) return s;
  throw ConfigError("scenarios", "unknown scenario '" + name + "'");
}

}  // namespace

Reply post_decision(const json& body) {
  return guarded([&] {
    only_keys(body, {"config", "data"});
    Config cfg = parse_config(member(body, "config"));
    cfg.require_phi();
    TrialInput in = parse_trial_input(member(body, "data"), cfg);
    const TrialState& st = in.state;
    if (!in.has_patients) {
      DecisionDetail d = evaluate_decision(cfg.design(), st);
      return Reply{200, decision_to_json(d, cfg.design(), st)};
    }
    TiteConfig tc = cfg.sim.tite.value_or(TiteConfig{});
    DoseCounts eff = effective_dose_counts(in.patients, st.grid.size(), tc.tau);
    DecisionDetail d = evaluate_decision(cfg.design(), st.grid, eff, st.data.n[st.current],
                                         st.current, st.eliminated_from);
    bool ok = suspension_check(in.patients, st.current, tc.tau, tc.min_completed);
    json out = decision_to_json(d, cfg.design(), st, ok);
    json e = json::array();
    for (std::size_t j = 0; j < eff.size(); ++j) e.push_back({{"y_eff", eff.y[j]}, {"n_eff", eff.n[j]}});
    out["effective_counts"] = rounded(e);
    return Reply{200, out};
  });
}

Reply post_table(const json& body) {
  return guarded([&] {
    only_keys(body, {"config", "context", "n_range"});
    Config cfg = parse_config(member(body, "config"));
    cfg.require_phi();
    TrialInput in = parse_trial_input(member(body, "context"), cfg);
    int lo = 1, hi = 18;
    if (body.contains("n_range")) {
      const json& r = body.at("n_range");
      if (!r.is_array() || r.size() != 2 || !r[0].is_number_integer() || !r[1].is_number_integer())
        throw ConfigError("n_range", "expected [n_min, n_max]");
      lo = r[0].get<int>();
      hi = r[1].get<int>();
    }
    if (lo < 1 || hi < lo) throw ConfigError("n_range", "must satisfy 1 <= n_min <= n_max");
    auto rows = decision_table(cfg.design(), in.state.grid, in.state.data, in.state.current, lo, hi);
    return Reply{200, json{{"rows", table_to_json(rows)}}};
  });
}

Reply post_insertion_check(const json& body) {
  return guarded([&] {
    only_keys(body, {"config", "state"});
    Config cfg = parse_config(member(body, "config"));
    cfg.require_phi();
    InsertionConfig ic = cfg.sim.insertion.value_or(InsertionConfig{});
    TrialInput in = parse_trial_input(member(body, "state"), cfg);
    const TrialState& st = in.state;
    const DesignConfig& d = cfg.design();
    if (st.data.total() == 0) throw NoDataError("no observed doses");
    auto probs = insertion_probabilities(st.grid, st.data, ic, d.phi, d.eps1, d.eps2);
    InsertionTrigger t = check_insertion(st, ic, d.phi, d.eps1, d.eps2);
    json out;
    out["p_over"] = probs.p_over;
    out["p_under"] = probs.p_under;
    out["p_over_raw"] = probs.p_over_raw;
    out["p_under_raw"] = probs.p_under_raw;
    out["proposed_dose"] = nullptr;
    out["proposed_std_dose"] = nullptr;
    out["interval"] = nullptr;
    if (t.kind != TriggerKind::none) {
      try {
        double raw = proposed_dose(t, st, ic, d.phi, d.eps1, d.eps2);
        out["proposed_dose"] = raw;
        out["proposed_std_dose"] = st.grid.to_std(raw);
      } catch (const InvalidArgument&) {
        t.kind = TriggerKind::none;
        t.interval_index.reset();
        t.reason = "duplicate dose";
      }
    }
    if (t.kind == TriggerKind::interior) {
      std::size_t r = *t.interval_index;
      out["interval"] = {r + 1, r + 2};
      json q = json::array();
      for (const auto& p : q_curve(r, st.grid, st.data, ic, d.phi, d.eps1, d.eps2))
        q.push_back({{"std_dose", p.std_dose}, {"raw_dose", st.grid.to_raw(p.std_dose)}, {"q", p.q}});
      out["q_curve"] = q;
    }
    out["trigger"] = to_string(t.kind);
    out["reason"] = t.reason;
    return Reply{200, rounded(out)};
  });
}

Reply get_fixed_scenarios() {
  json arr = json::array();
  for (const auto& s : fixed_scenarios()) arr.push_back(scenario_to_json(s));
  return {200, json{{"scenarios", arr}}};
}

Reply get_health() { return {200, json{{"status", "ok"}, {"version", version()}}}; }

SimulationRequest parse_simulation_request(const json& body, long max_replicates) {
  only_keys(body, {"config", "configs", "scenarios", "replicates", "seed", "threads"});
  SimulationRequest req;
  if (body.contains("configs")) {
    const json& cs = body.at("configs");
    if (!cs.is_array() || cs.empty()) throw ConfigError("configs", "expected a non-empty array");
    for (const auto& c : cs) req.configs.push_back(parse_config(c));
  } else {
    req.configs.push_back(parse_config(member(body, "config")));
  }
  const json& sc = member(body, "scenarios");
  if (sc.is_string()) {
    std::string s = sc.get<std::string>();
    if (s == "fixed") req.scenarios = fixed_scenarios();
    else if (s == "insertion") req.scenarios = insertion_scenarios();
    else req.scenarios.push_back(named_scenario(s));
  } else if (sc.is_array()) {
    for (const auto& e : sc)
      req.scenarios.push_back(e.is_string() ? named_scenario(e.get<std::string>()) : parse_scenario(e));
  } else {
    req.scenarios.push_back(parse_scenario(sc));
  }
  if (req.scenarios.empty()) throw ConfigError("scenarios", "is empty");
  if (body.contains("replicates")) {
    const json& r = body.at("replicates");
    if (!r.is_number_integer()) throw ParseError("replicates: expected an integer");
    req.replicates = r.get<long>();
  }
  if (req.replicates < 1 || req.replicates > max_replicates)
    throw ConfigError("replicates", "must lie in [1, " + std::to_string(max_replicates) + "]");
  if (body.contains("seed")) {
    const json& s = body.at("seed");
    if (!s.is_number_integer() || s.get<long long>() < 0) throw ParseError("seed: expected a nonnegative integer");
    req.seed = s.get<std::uint64_t>();
  }
  if (body.contains("threads")) {
    const json& t = body.at("threads");
    if (!t.is_number_integer() || t.get<int>() < 0) throw ParseError("threads: expected a nonnegative integer");
    req.threads = t.get<int>();
  }
  for (const auto& c : req.configs)
    for (const auto& s : req.scenarios) check_compatible(c.sim, s);
  return req;
}

JobStore::JobStore(ServiceOptions opt) : opt_(opt) {
  std::random_device rd;
  salt_ = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
  for (int i = 0; i < std::max(1, opt_.job_workers); ++i) workers_.emplace_back([this] { worker(); });
}

JobStore::~JobStore() {
  {
    std::lock_guard<std::mutex> lk(mu_);
    stop_ = true;
  }
  cv_.notify_all();
  for (auto& t : workers_) t.join();
}

std::string JobStore::submit(SimulationRequest req) {
  auto job = std::make_shared<Job>();
  job->total = req.replicates * static_cast<long>(req.configs.size() * req.scenarios.size());
  job->request = std::move(req);
  {
    std::lock_guard<std::mutex> lk(mu_);
    purge();
    char buf[40];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(mix64(salt_ + ++counter_)));
    job->id = buf;
    jobs_[job->id] = job;
    queue_.push_back(job);
  }
  cv_.notify_one();
  return job->id;
}

std::shared_ptr<Job> JobStore::find(const std::string& id) {
  std::lock_guard<std::mutex> lk(mu_);
  purge();
  auto it = jobs_.find(id);
  return it == jobs_.end() ? nullptr : it->second;
}

void JobStore::purge() {
  auto now = std::chrono::steady_clock::now();
  for (auto it = jobs_.begin(); it != jobs_.end();) {
    auto s = static_cast<JobStatus>(it->second->status.load());
    bool finished = s == JobStatus::done || s == JobStatus::failed;
    if (finished && now - it->second->finished_at > opt_.job_ttl) it = jobs_.erase(it);
    else ++it;
  }
}

void JobStore::worker() {
  for (;;) {
    std::shared_ptr<Job> job;
    {
      std::unique_lock<std::mutex> lk(mu_);
      cv_.wait(lk, [this] { return stop_ || !queue_.empty(); });
      if (stop_) return;
      job = queue_.front();
      queue_.pop_front();
    }
    job->status = static_cast<int>(JobStatus::running);
    const auto& req = job->request;
    int threads = req.threads > 0 ? req.threads : opt_.sim_threads;
    if (threads <= 0) threads = std::max(1u, std::thread::hardware_concurrency());
    try {
      std::vector<OCSummary> out;
      for (const auto& s : req.scenarios)
        for (const auto& c : req.configs)
          out.push_back(run_trials(c.sim, s, req.replicates, req.seed, threads, &job->done));
      {
        std::lock_guard<std::mutex> lk(mu_);
        job->results = std::move(out);
        job->finished_at = std::chrono::steady_clock::now();
      }
      job->status = static_cast<int>(JobStatus::done);
    } catch (const std::exception& e) {
      {
        std::lock_guard<std::mutex> lk(mu_);
        job->error = e.what();
        job->finished_at = std::chrono::steady_clock::now();
      }
      job->status = static_cast<int>(JobStatus::failed);
    }
  }
}

RunManifest job_manifest(const Job& job) {
  RunManifest m;
  m.command = "POST /v1/simulations";
  std::string hashes;
  for (const auto& c : job.request.configs) hashes += (hashes.empty() ? "" : ";") + c.hash;
  m.config_path = "request";
  m.config_hash = hashes;
  m.seed = job.request.seed;
  m.output_path = "/v1/simulations/" + job.id;
  m.version = version();
  return m;
}

json JobStore::describe(const Job& job) const {
  auto s = static_cast<JobStatus>(job.status.load());
  json j;
  j["id"] = job.id;
  j["status"] = to_string(s);
  double p = s == JobStatus::done ? 1.0 : static_cast<double>(job.done.load()) / job.total;
  j["progress"] = round_sig(std::min(1.0, p));
  j["result"] = nullptr;
  j["error"] = nullptr;
  if (s == JobStatus::done) {
    json rs = json::array();
    for (const auto& o : job.results) rs.push_back(oc_to_json(o));
    j["result"] = {{"manifest", manifest_to_json(job_manifest(job))}, {"results", rs}};
  } else if (s == JobStatus::failed) {
    j["error"] = job.error;
  }
  return j;
}

std::string JobStore::csv(const Job& job) const {
  return manifest_csv_comment(job_manifest(job)) + render_oc_csv(job.results);
}

namespace {

void send(httplib::Response& res, const Reply& r) {
  res.status = r.status;
  res.set_content(r.body.dump(), "application/json");
}

json body_json(const httplib::Request& req) { return parse_json_text(req.body); }

}  // namespace

void mount(httplib::Server& server, JobStore& jobs, const ServiceOptions& opt) {
  server.set_default_headers({{"Access-Control-Allow-Origin", opt.cors_origin},
                              {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"},
                              {"Access-Control-Allow-Headers", "Content-Type"}});
  server.Options(R"(/v1/.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });

  auto post = [&server](const char* path, Reply (*fn)(const json&)) {
    server.Post(path, [fn](const httplib::Request& req, httplib::Response& res) {
      Reply r;
      try {
        r = fn(body_json(req));
      } catch (const ParseError& e) {
        r = error_reply(400, e.what());
      }
      send(res, r);
    });
  };
  post("/v1/decision", post_decision);
  post("/v1/table", post_table);
  post("/v1/insertion/check", post_insertion_check);

  server.Post("/v1/simulations", [&jobs, opt](const httplib::Request& req, httplib::Response& res) {
    Reply r = guarded([&] {
      auto sr = parse_simulation_request(body_json(req), opt.max_replicates);
      std::string id = jobs.submit(std::move(sr));
      return Reply{202, json{{"id", id}, {"status", "queued"}}};
    });
    send(res, r);
  });
  server.Get(R"(/v1/simulations/([0-9a-zA-Z]+))",
             [&jobs](const httplib::Request& req, httplib::Response& res) {
               auto job = jobs.find(req.matches[1]);
               if (!job) return send(res, error_reply(404, "unknown simulation id"));
               if (req.has_param("format") && req.get_param_value("format") == "csv") {
                 if (static_cast<JobStatus>(job->status.load()) != JobStatus::done)
                   return send(res, error_reply(409, "simulation not finished"));
                 res.set_content(jobs.csv(*job), "text/csv");
                 return;
               }
               send(res, {200, jobs.describe(*job)});
             });
  server.Get("/v1/scenarios/fixed", [](const httplib::Request&, httplib::Response& res) {
    send(res, get_fixed_scenarios());
  });
  server.Get("/v1/health", [](const httplib::Request&, httplib::Response& res) { send(res, get_health()); });
}

}  // namespace skbd::api
