#include "hsara/service.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>

#include <httplib.h>

#include "hsara/serialization.hpp"
#include "hsara/stochastics.hpp"

namespace hsara {

using nlohmann::json;

std::string to_string(JobStatus s) {
  switch (s) {
    case JobStatus::queued: return "queued";
    case JobStatus::running: return "running";
    case JobStatus::done: return "done";
    case JobStatus::failed: return "failed";
  }
  return "?";
}

namespace {

Response error(int status, const std::string& message) { return {status, {{"error", message}}, {}}; }

json t_max_json(double t) { return std::isfinite(t) ? json(t) : json(nullptr); }

double parse_t_max(const json& v) {
  if (v.is_null()) return std::numeric_limits<double>::infinity();
  if (v.is_string() && (v == "inf" || v == "infinity")) return std::numeric_limits<double>::infinity();
  if (!v.is_number()) throw std::invalid_argument("t_max must be a number, null or \"inf\"");
  const double t = v.get<double>();
  if (!(t >= 0.0)) throw std::invalid_argument("t_max must be >= 0");
  return t;
}

json params_json(const SolveParams& p) {
  return {{"method", to_string(p.method)}, {"t_max", t_max_json(p.t_max)},
          {"alpha", p.alpha},              {"replicas", p.replicas},
          {"eval_replicas", p.eval_replicas}, {"seed", p.seed}};
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::filesystem::create_directories(path.parent_path());
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp);
    out << text;
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace

SolveParams parse_solve_params(const json& body) {
  if (!body.is_object()) throw std::invalid_argument("request body must be a JSON object");
  SolveParams p;
  if (auto it = body.find("method"); it != body.end()) {
    if (!it->is_string()) throw std::invalid_argument("method must be a string");
    p.method = method_from_string(it->get<std::string>());
  }
  if (auto it = body.find("t_max"); it != body.end()) p.t_max = parse_t_max(*it);
  if (auto it = body.find("alpha"); it != body.end()) {
    if (!it->is_number()) throw std::invalid_argument("alpha must be a number");
    p.alpha = it->get<double>();
    if (!(p.alpha >= 0.0 && p.alpha <= 1.0)) throw std::invalid_argument("alpha must lie in [0,1]");
  }
  auto positive_int = [&](const char* key, int& dst) {
    if (auto it = body.find(key); it != body.end()) {
      if (!it->is_number_integer() || it->get<long>() < 1)
        throw std::invalid_argument(std::string(key) + " must be a positive integer");
      dst = it->get<int>();
    }
  };
  positive_int("replicas", p.replicas);
  positive_int("eval_replicas", p.eval_replicas);
  if (auto it = body.find("seed"); it != body.end()) {
    if (!it->is_number_integer() || it->get<long long>() < 0)
      throw std::invalid_argument("seed must be a non-negative integer");
    p.seed = it->get<std::uint64_t>();
  }
  return p;
}

json solve_pipeline(const Instance& instance, const SolveParams& params, const std::atomic<bool>* cancel) {
  ColGenConfig cfg;
  cfg.method = params.method;
  cfg.t_max = params.t_max;
  cfg.cancel = cancel;
  const SarSolution sol = run_colgen(instance, cfg);
  if (cancel && cancel->load()) throw std::runtime_error("job cancelled");

  const CalibratedModel model = calibrate(instance);
  ScheduleConfig sc;
  sc.alpha = params.alpha;
  sc.replicas = params.replicas;
  sc.seed = params.seed;
  const auto schedules = schedule_routes(instance, model, sol.routes, sc);

  json sched_docs = json::array();
  for (std::size_t r = 0; r < schedules.size(); ++r) {
    SarSolution single;
    single.routes = {sol.routes[r]};
    const CostBreakdown rc = evaluate_costs(instance, model, single, {schedules[r]}, params.eval_replicas, params.seed);
    sched_docs.push_back(schedule_to_json(schedules[r], static_cast<int>(r), &rc));
  }
  const CostBreakdown total = evaluate_costs(instance, model, sol, schedules, params.eval_replicas, params.seed);
  return {{"schema_version", kSchemaVersion},
          {"params", params_json(params)},
          {"seed", params.seed},
          {"solution", solution_to_json(sol)},
          {"schedules", sched_docs},
          {"cost_breakdown", cost_breakdown_to_json(total)}};
}

SolveService::SolveService(ServiceOptions options) : options_(std::move(options)) {
  std::filesystem::create_directories(options_.data_dir / "instances");
  std::filesystem::create_directories(options_.data_dir / "jobs");
  load_existing();
  const int workers = std::max(1, options_.workers);
  for (int i = 0; i < workers; ++i) threads_.emplace_back([this] { worker_loop(); });
  threads_.emplace_back([this] { watchdog_loop(); });
}

SolveService::~SolveService() {
  {
    std::lock_guard lock(mutex_);
    stopping_ = true;
    for (auto& [id, job] : jobs_) job.cancel->store(true);
  }
  changed_.notify_all();
  for (auto& t : threads_) t.join();
}

void SolveService::load_existing() {
  for (const auto& entry : std::filesystem::directory_iterator(options_.data_dir / "instances")) {
    if (entry.path().extension() != ".json") continue;
    try {
      std::ifstream in(entry.path());
      const json doc = json::parse(in);
      const std::string id = entry.path().stem().string();
      instances_.emplace(id, instance_from_json(doc.at("instance")));
      instance_origin_[id] = doc.value("origin", json(nullptr));
    } catch (const std::exception&) {
      // Unreadable documents are skipped; they stay on disk for inspection.
    }
  }
  for (const auto& entry : std::filesystem::directory_iterator(options_.data_dir / "jobs")) {
    if (entry.path().extension() != ".json") continue;
    try {
      std::ifstream in(entry.path());
      const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
      const json doc = json::parse(text);
      Job job;
      job.id = doc.at("id").get<std::string>();
      job.instance_id = doc.at("instance_id").get<std::string>();
      job.status = doc.at("status") == "done" ? JobStatus::done : JobStatus::failed;
      job.params = parse_solve_params(doc.at("params"));
      job.frozen = text;
      jobs_.emplace(job.id, std::move(job));
    } catch (const std::exception&) {
    }
  }
  auto bump = [&](const std::string& id) {
    const auto dash = id.find('-');
    if (dash == std::string::npos) return;
    try {
      counter_ = std::max(counter_, std::stol(id.substr(dash + 1)));
    } catch (const std::exception&) {
    }
  };
  for (const auto& [id, _] : instances_) bump(id);
  for (const auto& [id, _] : jobs_) bump(id);
}

std::string SolveService::next_id(const char* prefix) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%s-%06ld", prefix, ++counter_);
  return buf;
}

std::string SolveService::store_instance(const Instance& instance, json origin) {
  std::string id;
  {
    std::lock_guard lock(mutex_);
    id = next_id("inst");
    instances_.emplace(id, instance);
    instance_origin_[id] = origin;
  }
  json doc = {{"schema_version", kSchemaVersion}, {"id", id}, {"origin", origin},
              {"instance", instance_to_json(instance)}};
  write_file(options_.data_dir / "instances" / (id + ".json"), doc.dump());
  return id;
}

Response SolveService::create_instance(const json& body) {
  if (!body.is_object()) return error(400, "request body must be a JSON object");
  try {
    if (body.contains("travel_mean")) {
      const Instance inst = instance_from_json(body);
      const std::string id = store_instance(inst, {{"source", "upload"}});
      return {201, {{"id", id}, {"n", inst.n}}, {}};
    }
    const json& gen = body.contains("generate") ? body.at("generate") : body;
    if (!gen.contains("n") || !gen.contains("seed"))
      return error(422, "expected an instance document or generator parameters {n, seed}");
    if (!gen.at("n").is_number_integer() || !gen.at("seed").is_number_integer())
      return error(422, "n and seed must be integers");
    GeneratorParams gp;
    gp.square_edge = gen.value("square_edge", gp.square_edge);
    gp.horizon = gen.value("L", gp.horizon);
    gp.cancel_prob = gen.value("cancel_prob", gp.cancel_prob);
    if (gen.contains("costs")) {
      const json& c = gen.at("costs");
      gp.costs.hiring = c.value("cf", gp.costs.hiring);
      gp.costs.travel = c.value("ct", gp.costs.travel);
      gp.costs.overtime = c.value("co", gp.costs.overtime);
      gp.costs.earliness = c.value("ce", gp.costs.earliness);
      gp.costs.delay = c.value("cd", gp.costs.delay);
    }
    const int n = gen.at("n").get<int>();
    const auto seed = gen.at("seed").get<std::uint64_t>();
    const Instance inst = generate_instance(n, seed, gp);
    validate(inst);
    const std::string id = store_instance(inst, {{"source", "generator"}, {"n", n}, {"seed", seed}});
    return {201, {{"id", id}, {"n", inst.n}}, {}};
  } catch (const InstanceError& e) {
    return error(422, e.what());
  } catch (const json::exception& e) {
    return error(422, e.what());
  }
}

Response SolveService::get_instance(const std::string& id) const {
  std::lock_guard lock(mutex_);
  auto it = instances_.find(id);
  if (it == instances_.end()) return error(404, "unknown instance " + id);
  return {200,
          {{"id", id}, {"origin", instance_origin_.at(id)}, {"instance", instance_to_json(it->second)}},
          {}};
}

std::string SolveService::enqueue(const std::string& instance_id, const SolveParams& params, json request) {
  std::string id;
  {
    std::lock_guard lock(mutex_);
    id = next_id("job");
    Job job;
    job.id = id;
    job.instance_id = instance_id;
    job.params = params;
    job.request = std::move(request);
    auto [it, _] = jobs_.emplace(id, std::move(job));
    queue_.push_back(id);
    log_event(it->second);
  }
  changed_.notify_all();
  return id;
}

Response SolveService::submit_solve(const json& body) {
  if (!body.is_object()) return error(400, "request body must be a JSON object");
  if (!body.contains("instance_id") || !body.at("instance_id").is_string())
    return error(422, "instance_id is required");
  const std::string inst = body.at("instance_id").get<std::string>();
  {
    std::lock_guard lock(mutex_);
    if (!instances_.count(inst)) return error(404, "unknown instance " + inst);
  }
  SolveParams params;
  try {
    params = parse_solve_params(body);
  } catch (const std::exception& e) {
    return error(422, e.what());
  }
  const std::string id = enqueue(inst, params, body);
  return {202, {{"job_id", id}, {"status", "queued"}}, {}};
}

json SolveService::job_json(const Job& job) const {
  json out = {{"schema_version", kSchemaVersion},
              {"id", job.id},
              {"instance_id", job.instance_id},
              {"status", to_string(job.status)},
              {"params", params_json(job.params)}};
  if (!job.error.empty()) out["error"] = job.error;
  return out;
}

Response SolveService::get_job(const std::string& id) const {
  std::lock_guard lock(mutex_);
  auto it = jobs_.find(id);
  if (it == jobs_.end()) return error(404, "unknown job " + id);
  const Job& job = it->second;
  if (job.frozen) return {200, {}, job.frozen};
  return {200, job_json(job), {}};
}

Response SolveService::whatif(const json& body) {
  if (!body.is_object()) return error(400, "request body must be a JSON object");
  if (!body.contains("base_job_id") || !body.at("base_job_id").is_string())
    return error(422, "base_job_id is required");
  const std::string base_id = body.at("base_job_id").get<std::string>();
  Instance base;
  SolveParams params;
  {
    std::lock_guard lock(mutex_);
    auto it = jobs_.find(base_id);
    if (it == jobs_.end()) return error(404, "unknown job " + base_id);
    if (it->second.status != JobStatus::done) return error(409, "base job " + base_id + " is not done");
    auto inst = instances_.find(it->second.instance_id);
    if (inst == instances_.end()) return error(404, "base instance is gone");
    base = inst->second;
    params = it->second.params;
  }

  const json overrides = body.value("overrides", json::object());
  if (!overrides.is_object()) return error(422, "overrides must be an object");
  static const std::set<std::string> known = {"cf", "ct", "co", "ce", "cd", "alpha", "t_max", "customer_subset"};
  try {
    for (const auto& [key, value] : overrides.items()) {
      if (!known.count(key)) throw std::invalid_argument("unknown override '" + key + "'");
      if (key == "alpha" || key == "t_max" || key == "customer_subset") continue;
      if (!value.is_number() || !(value.get<double>() >= 0.0) || !std::isfinite(value.get<double>()))
        throw std::invalid_argument(key + " must be a finite number >= 0");
    }
    CostParams& c = base.costs;
    c.hiring = overrides.value("cf", c.hiring);
    c.travel = overrides.value("ct", c.travel);
    c.overtime = overrides.value("co", c.overtime);
    c.earliness = overrides.value("ce", c.earliness);
    c.delay = overrides.value("cd", c.delay);
    json merged = params_json(params);
    if (overrides.contains("alpha")) merged["alpha"] = overrides.at("alpha");
    if (overrides.contains("t_max")) merged["t_max"] = overrides.at("t_max");
    params = parse_solve_params(merged);
    if (overrides.contains("customer_subset")) {
      const json& subset = overrides.at("customer_subset");
      if (!subset.is_array()) throw std::invalid_argument("customer_subset must be an array of customer ids");
      std::vector<int> ids;
      for (const json& v : subset) {
        if (!v.is_number_integer()) throw std::invalid_argument("customer_subset entries must be integers");
        ids.push_back(v.get<int>());
      }
      base = subset_instance(base, ids);
    }
    validate(base);
  } catch (const std::exception& e) {
    return error(422, e.what());
  }

  const std::string inst_id = store_instance(base, {{"source", "whatif"}, {"base_job_id", base_id}, {"overrides", overrides}});
  const std::string job_id = enqueue(inst_id, params, body);
  return {202, {{"job_id", job_id}, {"instance_id", inst_id}, {"status", "queued"}}, {}};
}

bool SolveService::wait_for(const std::string& job_id, std::chrono::milliseconds timeout) const {
  std::unique_lock lock(mutex_);
  return changed_.wait_for(lock, timeout, [&] {
    auto it = jobs_.find(job_id);
    return it != jobs_.end() && (it->second.status == JobStatus::done || it->second.status == JobStatus::failed);
  });
}

void SolveService::worker_loop() {
  while (true) {
    std::string id;
    {
      std::unique_lock lock(mutex_);
      changed_.wait(lock, [&] { return stopping_ || !queue_.empty(); });
      if (stopping_) return;
      id = queue_.front();
      queue_.pop_front();
      Job& job = jobs_.at(id);
      job.status = JobStatus::running;
      job.started = std::chrono::steady_clock::now();
      log_event(job);
    }
    changed_.notify_all();
    run_job(id);
  }
}

void SolveService::watchdog_loop() {
  std::unique_lock lock(mutex_);
  while (!stopping_) {
    changed_.wait_for(lock, std::chrono::milliseconds(50));
    const auto now = std::chrono::steady_clock::now();
    for (auto& [id, job] : jobs_) {
      if (job.status != JobStatus::running || !std::isfinite(job.params.t_max)) continue;
      const double elapsed = std::chrono::duration<double>(now - job.started).count();
      if (elapsed > 2.0 * job.params.t_max) job.cancel->store(true);
    }
  }
}

void SolveService::run_job(const std::string& job_id) {
  Instance instance;
  SolveParams params;
  std::shared_ptr<std::atomic<bool>> cancel;
  {
    std::lock_guard lock(mutex_);
    Job& job = jobs_.at(job_id);
    instance = instances_.at(job.instance_id);
    params = job.params;
    cancel = job.cancel;
  }
  json result;
  JobStatus status = JobStatus::done;
  std::string failure;
  try {
    result = solve_pipeline(instance, params, cancel.get());
  } catch (const std::exception& e) {
    status = JobStatus::failed;
    failure = cancel->load() ? std::string("killed after exceeding 2*t_max: ") + e.what() : e.what();
  }
  {
    std::lock_guard lock(mutex_);
    Job& job = jobs_.at(job_id);
    job.error = failure;
    finish(job, status, std::move(result));
  }
  changed_.notify_all();
}

void SolveService::finish(Job& job, JobStatus status, json result) {
  job.status = status;
  json doc = job_json(job);
  if (status == JobStatus::done) doc["result"] = std::move(result);
  job.frozen = doc.dump();
  write_file(options_.data_dir / "jobs" / (job.id + ".json"), *job.frozen);
  log_event(job);
}

void SolveService::log_event(const Job& job) {
  std::ofstream log(options_.data_dir / "events.jsonl", std::ios::app);
  log << json{{"job", job.id}, {"status", to_string(job.status)}}.dump() << '\n';
}

void register_routes(httplib::Server& server, SolveService& service) {
  auto reply = [](httplib::Response& res, const Response& r) {
    res.status = r.status;
    res.set_header("Access-Control-Allow-Origin", "*");
    res.set_content(r.text(), "application/json");
  };
  auto with_body = [reply](auto handler) {
    return [reply, handler](const httplib::Request& req, httplib::Response& res) {
      json body;
      try {
        body = req.body.empty() ? json::object() : json::parse(req.body);
      } catch (const json::parse_error& e) {
        reply(res, {400, {{"error", std::string("malformed JSON: ") + e.what()}}, {}});
        return;
      }
      reply(res, handler(body));
    };
  };
  server.Post("/instances", with_body([&service](const json& b) { return service.create_instance(b); }));
  server.Post("/solve", with_body([&service](const json& b) { return service.submit_solve(b); }));
  server.Post("/whatif", with_body([&service](const json& b) { return service.whatif(b); }));
  server.Get(R"(/instances/([\w-]+))", [&service, reply](const httplib::Request& req, httplib::Response& res) {
    reply(res, service.get_instance(req.matches[1]));
  });
  server.Get(R"(/jobs/([\w-]+))", [&service, reply](const httplib::Request& req, httplib::Response& res) {
    reply(res, service.get_job(req.matches[1]));
  });
  server.Get("/health", [reply](const httplib::Request&, httplib::Response& res) {
    reply(res, {200, {{"status", "ok"}, {"schema_version", kSchemaVersion}}, {}});
  });
  server.Options(R"(/.*)", [](const httplib::Request&, httplib::Response& res) {
    res.set_header("Access-Control-Allow-Origin", "*");
    res.set_header("Access-Control-Allow-Headers", "Content-Type");
    res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
    res.status = 204;
  });
}

}  // namespace hsara
