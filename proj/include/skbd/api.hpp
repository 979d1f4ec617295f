#pragma once

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <deque>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "skbd/io.hpp"

namespace httplib {
class Server;
}

namespace skbd::api {

struct Reply {
  int status = 200;
  json body;
};

struct ServiceOptions {
  std::chrono::seconds job_ttl{3600};
  int job_workers = 1;
  int sim_threads = 0;  // 0: hardware concurrency
  long max_replicates = 100000;
  std::string cors_origin = "*";
};

enum class JobStatus { queued, running, done, failed };

const char* to_string(JobStatus s);

struct SimulationRequest {
  std::vector<Config> configs;
  std::vector<Scenario> scenarios;
  long replicates = 1000;
  std::uint64_t seed = 1;
  int threads = 0;
};

// Accepts {config | configs, scenarios, replicates, seed, threads?}.
SimulationRequest parse_simulation_request(const json& body, long max_replicates);

struct Job {
  std::string id;
  SimulationRequest request;
  std::atomic<int> status{static_cast<int>(JobStatus::queued)};
  std::atomic<long> done{0};
  long total = 1;
  std::chrono::steady_clock::time_point finished_at;
  std::vector<OCSummary> results;
  std::string error;
};

class JobStore {
 public:
  JobStore(ServiceOptions opt);
  ~JobStore();
  JobStore(const JobStore&) = delete;
  JobStore& operator=(const JobStore&) = delete;

  std::string submit(SimulationRequest req);
  // Snapshot as JSON; null when unknown or expired.
  std::shared_ptr<Job> find(const std::string& id);
  json describe(const Job& job) const;
  std::string csv(const Job& job) const;

 private:
  void worker();
  void purge();

  ServiceOptions opt_;
  std::mutex mu_;
  std::condition_variable cv_;
  std::map<std::string, std::shared_ptr<Job>> jobs_;
  std::deque<std::shared_ptr<Job>> queue_;
  std::vector<std::thread> workers_;
  bool stop_ = false;
  std::uint64_t counter_ = 0;
  std::uint64_t salt_ = 0;
};

Reply post_decision(const json& body);
Reply post_table(const json& body);
Reply post_insertion_check(const json& body);
Reply get_fixed_scenarios();
Reply get_health();

// Registers every /v1 route on the server.
void mount(httplib::Server& server, JobStore& jobs, const ServiceOptions& opt);

RunManifest job_manifest(const Job& job);

}  // namespace skbd::api
