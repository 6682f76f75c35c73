#include <doctest.h>

#include <chrono>
#include <filesystem>
#include <thread>

#include <httplib.h>

#include "hsara/service.hpp"

using namespace hsara;
using nlohmann::json;
using namespace std::chrono_literals;

namespace {

struct TempDir {
  std::filesystem::path path;
  explicit TempDir(const std::string& name)
      : path(std::filesystem::temp_directory_path() / ("hsara_service_" + name)) {
    std::filesystem::remove_all(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
};

std::string make_instance(SolveService& svc, int n, int seed) {
  const Response r = svc.create_instance({{"n", n}, {"seed", seed}});
  REQUIRE(r.status == 201);
  return r.body.at("id");
}

json finished(SolveService& svc, const std::string& job) {
  REQUIRE(svc.wait_for(job, 120s));
  const Response r = svc.get_job(job);
  REQUIRE(r.status == 200);
  return json::parse(r.text());
}

std::string submit(SolveService& svc, json body) {
  const Response r = svc.submit_solve(body);
  REQUIRE(r.status == 202);
  return r.body.at("job_id");
}

}  // namespace

TEST_CASE("solve job lifecycle") {
  TempDir dir("lifecycle");
  SolveService svc({dir.path, 2});
  const std::string inst = make_instance(svc, 8, 3);
  CHECK(svc.get_instance(inst).body.at("instance").at("n") == 8);

  const std::string job = submit(svc, {{"instance_id", inst}, {"method", "hm"}, {"seed", 5}, {"eval_replicas", 200}});
  const json doc = finished(svc, job);
  CHECK(doc.at("status") == "done");
  CHECK(doc.at("schema_version") == 1);
  const json& result = doc.at("result");
  CHECK(result.at("seed") == 5);
  const json& sol = result.at("solution");
  CHECK(sol.at("routes").size() == result.at("schedules").size());
  int served = 0;
  for (const auto& r : sol.at("routes")) served += static_cast<int>(r.at("customers").size());
  CHECK(served == 8);
  const json& cb = result.at("cost_breakdown");
  CHECK(cb.at("total").get<double>() ==
        doctest::Approx(cb.at("hiring").get<double>() + cb.at("travel").get<double>() +
                        cb.at("overtime").get<double>() + cb.at("earliness").get<double>() +
                        cb.at("delay").get<double>()));

  // Write-once: identical bytes on every read, and on disk.
  CHECK(svc.get_job(job).text() == svc.get_job(job).text());
  CHECK(std::filesystem::exists(dir.path / "jobs" / (job + ".json")));
}

TEST_CASE("what-if runs") {
  TempDir dir("whatif");
  SolveService svc({dir.path, 2});
  const std::string inst = make_instance(svc, 10, 7);
  const std::string base = submit(svc, {{"instance_id", inst}, {"method", "hm"}, {"seed", 2}, {"eval_replicas", 100}});
  const json base_doc = finished(svc, base);
  const double base_obj = base_doc.at("result").at("solution").at("objective");
  const auto base_routes = base_doc.at("result").at("solution").at("routes").size();

  SUBCASE("no overrides reproduces the base objective") {
    const Response r = svc.whatif({{"base_job_id", base}});
    REQUIRE(r.status == 202);
    const json doc = finished(svc, r.body.at("job_id"));
    CHECK(doc.at("result").at("solution").at("objective").get<double>() == base_obj);
  }
  SUBCASE("expensive hiring never adds routes") {
    const Response r = svc.whatif({{"base_job_id", base}, {"overrides", {{"cf", 1000.0}}}});
    REQUIRE(r.status == 202);
    const json doc = finished(svc, r.body.at("job_id"));
    CHECK(doc.at("result").at("solution").at("routes").size() <= base_routes);
    const json inst_doc = svc.get_instance(r.body.at("instance_id")).body;
    CHECK(inst_doc.at("instance").at("costs").at("cf") == 1000.0);
  }
  SUBCASE("customer subset") {
    const Response r = svc.whatif({{"base_job_id", base}, {"overrides", {{"customer_subset", {1, 4, 6}}}}});
    REQUIRE(r.status == 202);
    const json doc = finished(svc, r.body.at("job_id"));
    int served = 0;
    for (const auto& route : doc.at("result").at("solution").at("routes"))
      served += static_cast<int>(route.at("customers").size());
    CHECK(served == 3);
  }
  SUBCASE("invalid overrides") {
    CHECK(svc.whatif({{"base_job_id", base}, {"overrides", {{"alpha", 2.0}}}}).status == 422);
    CHECK(svc.whatif({{"base_job_id", base}, {"overrides", {{"cf", -1.0}}}}).status == 422);
    CHECK(svc.whatif({{"base_job_id", base}, {"overrides", {{"customer_subset", {99}}}}}).status == 422);
    CHECK(svc.whatif({{"base_job_id", base}, {"overrides", {{"speed", 2.0}}}}).status == 422);
  }
}

TEST_CASE("what-if on an unfinished job conflicts") {
  TempDir dir("conflict");
  SolveService svc({dir.path, 1});
  const std::string inst = make_instance(svc, 8, 1);
  const std::string slow = submit(svc, {{"instance_id", inst}, {"method", "em"}});
  const std::string queued = submit(svc, {{"instance_id", inst}, {"method", "hm"}});
  CHECK(svc.whatif({{"base_job_id", queued}}).status == 409);
  CHECK(svc.get_job(queued).body.at("status") == "queued");
  CHECK(finished(svc, queued).at("status") == "done");
  CHECK(finished(svc, slow).at("status") == "done");
}

TEST_CASE("unknown ids and bad requests") {
  TempDir dir("errors");
  SolveService svc({dir.path, 1});
  CHECK(svc.get_job("job-999999").status == 404);
  CHECK(svc.get_instance("inst-999999").status == 404);
  CHECK(svc.submit_solve({{"instance_id", "inst-424242"}}).status == 404);
  CHECK(svc.whatif({{"base_job_id", "job-424242"}}).status == 404);
  const std::string inst = make_instance(svc, 3, 1);
  CHECK(svc.submit_solve({{"instance_id", inst}, {"method", "bp"}}).status == 422);
  CHECK(svc.submit_solve({{"instance_id", inst}, {"replicas", 0}}).status == 422);
  CHECK(svc.submit_solve({{"method", "hm"}}).status == 422);
  CHECK(svc.create_instance({{"n", 3}}).status == 422);
  json bad = svc.get_instance(inst).body.at("instance");
  bad["cancel_prob"][0] = 1.5;
  CHECK(svc.create_instance(bad).status == 422);
  CHECK(svc.create_instance(json::array()).status == 400);
}

TEST_CASE("parallel jobs stay isolated") {
  TempDir dir("isolation");
  SolveService svc({dir.path, 2});
  const std::string inst = make_instance(svc, 9, 4);
  const json body = {{"instance_id", inst}, {"method", "hm"}, {"seed", 3}, {"eval_replicas", 200}};
  const std::string a = submit(svc, body);
  const std::string b = submit(svc, body);
  const json da = finished(svc, a), db = finished(svc, b);
  CHECK(da.at("result").at("schedules") == db.at("result").at("schedules"));
  CHECK(da.at("result").at("cost_breakdown") == db.at("result").at("cost_breakdown"));
}

TEST_CASE("state survives a restart") {
  TempDir dir("restart");
  std::string inst, job, text;
  {
    SolveService svc({dir.path, 1});
    inst = make_instance(svc, 5, 2);
    job = submit(svc, {{"instance_id", inst}, {"method", "is"}, {"eval_replicas", 50}});
    finished(svc, job);
    text = svc.get_job(job).text();
  }
  SolveService again({dir.path, 1});
  CHECK(again.get_job(job).text() == text);
  CHECK(again.get_instance(inst).status == 200);
  const std::string next = make_instance(again, 4, 1);
  CHECK(next != inst);
}

TEST_CASE("jobs over twice their budget are stopped") {
  TempDir dir("watchdog");
  SolveService svc({dir.path, 1});
  const std::string inst = make_instance(svc, 40, 1);
  // The budget check only runs between pricing rounds, so an exact
  // pricing round at n=40 outlives it and the watchdog has to step in.
  const std::string job = submit(svc, {{"instance_id", inst}, {"method", "em"}, {"t_max", 0.2}});
  const json doc = finished(svc, job);
  if (doc.at("status") == "failed") CHECK(doc.at("error").get<std::string>().find("killed") != std::string::npos);
  else CHECK(doc.at("result").at("solution").at("converged") == false);
}

TEST_CASE("HTTP round trip") {
  TempDir dir("http");
  SolveService svc({dir.path, 1});
  httplib::Server server;
  register_routes(server, svc);
  const int port = server.bind_to_any_port("127.0.0.1");
  std::thread loop([&] { server.listen_after_bind(); });
  server.wait_until_ready();

  httplib::Client client("127.0.0.1", port);
  auto health = client.Get("/health");
  REQUIRE(health);
  CHECK(health->status == 200);
  CHECK(health->get_header_value("Access-Control-Allow-Origin") == "*");

  auto created = client.Post("/instances", R"({"n": 4, "seed": 9})", "application/json");
  REQUIRE(created);
  CHECK(created->status == 201);
  const std::string inst = json::parse(created->body).at("id");

  auto solved = client.Post("/solve", json{{"instance_id", inst}, {"method", "em"}, {"eval_replicas", 50}}.dump(),
                            "application/json");
  REQUIRE(solved);
  CHECK(solved->status == 202);
  const std::string job = json::parse(solved->body).at("job_id");
  REQUIRE(svc.wait_for(job, 60s));
  auto got = client.Get("/jobs/" + job);
  REQUIRE(got);
  CHECK(got->status == 200);
  CHECK(json::parse(got->body).at("status") == "done");
  CHECK(got->body == client.Get("/jobs/" + job)->body);

  auto malformed = client.Post("/solve", "{not json", "application/json");
  REQUIRE(malformed);
  CHECK(malformed->status == 400);
  CHECK(client.Get("/jobs/job-000777")->status == 404);

  server.stop();
  loop.join();
}
