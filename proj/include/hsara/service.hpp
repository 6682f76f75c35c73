#pragma once

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "hsara/colgen.hpp"
#include "hsara/instance.hpp"
#include "hsara/scheduler.hpp"

namespace httplib {
class Server;
}

namespace hsara {

struct ServiceOptions {
  std::filesystem::path data_dir = "hsara-data";
  int workers = 2;
};

struct Response {
  int status = 200;
  nlohmann::json body;
  // Set for finished jobs: the frozen payload, served verbatim.
  std::optional<std::string> raw;

  std::string text() const { return raw ? *raw : body.dump(); }
};

enum class JobStatus { queued, running, done, failed };
std::string to_string(JobStatus s);

struct SolveParams {
  Method method = Method::hm;
  double t_max = std::numeric_limits<double>::infinity();
  double alpha = 0.5;
  int replicas = 100;
  int eval_replicas = 1000;
  std::uint64_t seed = 0;
};

// Job-based solver front end. All methods are thread-safe.
class SolveService {
 public:
  explicit SolveService(ServiceOptions options);
  ~SolveService();
  SolveService(const SolveService&) = delete;
  SolveService& operator=(const SolveService&) = delete;

  Response create_instance(const nlohmann::json& body);
  Response get_instance(const std::string& id) const;
  Response submit_solve(const nlohmann::json& body);
  Response get_job(const std::string& id) const;
  Response whatif(const nlohmann::json& body);

  // Blocks until the job is done or failed; false on timeout or unknown id.
  bool wait_for(const std::string& job_id, std::chrono::milliseconds timeout) const;

 private:
  struct Job {
    std::string id;
    std::string instance_id;
    SolveParams params;
    nlohmann::json request;
    JobStatus status = JobStatus::queued;
    std::optional<std::string> frozen;  // final GET payload once done/failed
    std::string error;
    std::chrono::steady_clock::time_point started;
    std::shared_ptr<std::atomic<bool>> cancel = std::make_shared<std::atomic<bool>>(false);
  };

  std::string next_id(const char* prefix);
  std::string store_instance(const Instance& instance, nlohmann::json origin);
  std::string enqueue(const std::string& instance_id, const SolveParams& params, nlohmann::json request);
  void worker_loop();
  void watchdog_loop();
  void run_job(const std::string& job_id);
  void finish(Job& job, JobStatus status, nlohmann::json result);
  void log_event(const Job& job);
  nlohmann::json job_json(const Job& job) const;
  void load_existing();

  ServiceOptions options_;
  mutable std::mutex mutex_;
  mutable std::condition_variable changed_;
  std::map<std::string, Instance> instances_;
  std::map<std::string, nlohmann::json> instance_origin_;
  std::map<std::string, Job> jobs_;
  std::deque<std::string> queue_;
  long counter_ = 0;
  bool stopping_ = false;
  std::vector<std::thread> threads_;
};

// Parses solve parameters; throws std::invalid_argument with a readable reason.
SolveParams parse_solve_params(const nlohmann::json& body);

// Runs one full pipeline (SAR solve, scheduling, cost evaluation) and returns
// the result document.
nlohmann::json solve_pipeline(const Instance& instance, const SolveParams& params,
                              const std::atomic<bool>* cancel = nullptr);

void register_routes(httplib::Server& server, SolveService& service);

}  // namespace hsara
