// hsara: generate instances, solve them, run benchmarks, or serve the HTTP API.
#include <algorithm>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>
#include <httplib.h>

#include "hsara/colgen.hpp"
#include "hsara/serialization.hpp"
#include "hsara/service.hpp"

namespace {

constexpr int kUsageError = 1;
constexpr int kSolverError = 2;

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text << '\n';
    return;
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text << '\n';
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream in(s);
  for (std::string item; std::getline(in, item, ',');)
    if (!item.empty()) out.push_back(item);
  return out;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

int run_bench(const std::string& sizes, int runs, const std::string& methods, std::uint64_t seed, double t_max,
              const std::string& out_path) {
  std::vector<int> ns;
  for (const auto& s : split_list(sizes)) ns.push_back(std::stoi(s));
  std::vector<hsara::Method> ms;
  for (const auto& s : split_list(methods)) ms.push_back(hsara::method_from_string(s));
  if (ns.empty() || ms.empty() || runs < 1) throw std::invalid_argument("bench needs sizes, methods and runs >= 1");

  std::ostringstream csv;
  csv << "n,method,run,seed,objective,lower_bound,gap_percent,cpu_seconds,routes\n";
  csv.precision(10);
  for (int n : ns) {
    std::map<hsara::Method, std::vector<double>> cpu;
    for (int run = 0; run < runs; ++run) {
      const std::uint64_t inst_seed = seed + static_cast<std::uint64_t>(run);
      const hsara::Instance inst = hsara::generate_instance(n, inst_seed);
      std::optional<double> em_bound;
      std::vector<hsara::SarSolution> sols;
      for (hsara::Method m : ms) {
        hsara::ColGenConfig cfg;
        cfg.method = m;
        cfg.t_max = t_max;
        sols.push_back(hsara::run_colgen(inst, cfg));
        if (m == hsara::Method::em && sols.back().lower_bound) em_bound = sols.back().lower_bound;
      }
      for (const auto& s : sols) {
        // Gap against the EM relaxation bound when EM ran; otherwise the method's own bound.
        const std::optional<double> bound = em_bound ? em_bound : s.lower_bound;
        csv << n << ',' << hsara::to_string(s.method) << ',' << run << ',' << inst_seed << ',' << s.objective << ',';
        if (bound) csv << *bound;
        csv << ',';
        if (bound) csv << hsara::gap(s.objective, *bound);
        csv << ',' << s.cpu_time_s << ',' << s.routes.size() << '\n';
        cpu[s.method].push_back(s.cpu_time_s);
      }
    }
    if (cpu.count(hsara::Method::em) && cpu.count(hsara::Method::hm)) {
      std::vector<double> ratio;
      for (int r = 0; r < runs; ++r)
        ratio.push_back(cpu[hsara::Method::em][r] / std::max(cpu[hsara::Method::hm][r], 1e-9));
      double mean = 0.0;
      for (double x : ratio) mean += x / ratio.size();
      std::cerr << "n=" << n << " speedup EM/HM cpu: mean " << mean << ", median " << median(ratio) << '\n';
    }
  }
  write_text(out_path, csv.str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Home health care routing and appointment scheduling"};
  app.require_subcommand(1);

  auto* gen = app.add_subcommand("generate", "Generate a random instance");
  int gen_n = 10;
  std::uint64_t gen_seed = 1;
  std::string gen_out;
  gen->add_option("--n", gen_n, "Number of customers")->required()->check(CLI::PositiveNumber);
  gen->add_option("--seed", gen_seed, "Random seed")->required();
  gen->add_option("--out", gen_out, "Output JSON file (stdout if omitted)");

  auto* solve = app.add_subcommand("solve", "Solve routing and scheduling for one instance");
  std::string solve_instance, solve_out, solve_method = "hm";
  double solve_tmax = std::numeric_limits<double>::infinity();
  hsara::SolveParams solve_params;
  solve->add_option("--instance", solve_instance, "Instance JSON file")->required()->check(CLI::ExistingFile);
  solve->add_option("--method", solve_method, "is, hm or em")->check(CLI::IsMember({"is", "hm", "em"}));
  solve->add_option("--tmax", solve_tmax, "Wall-clock budget in seconds (0 = initial solution only)")
      ->check(CLI::NonNegativeNumber);
  solve->add_option("--alpha", solve_params.alpha, "Target on-time probability")->check(CLI::Range(0.0, 1.0));
  solve->add_option("--replicas", solve_params.replicas, "Scheduling replicas")->check(CLI::PositiveNumber);
  solve->add_option("--eval-replicas", solve_params.eval_replicas, "Cost evaluation replicas")
      ->check(CLI::PositiveNumber);
  solve->add_option("--seed", solve_params.seed, "Random seed");
  solve->add_option("--out", solve_out, "Output JSON file (stdout if omitted)");

  auto* bench = app.add_subcommand("bench", "Benchmark methods on random instances");
  std::string bench_sizes = "10", bench_methods = "is,hm,em", bench_out;
  int bench_runs = 10;
  std::uint64_t bench_seed = 1;
  double bench_tmax = std::numeric_limits<double>::infinity();
  bench->add_option("--sizes", bench_sizes, "Comma-separated customer counts");
  bench->add_option("--runs", bench_runs, "Instances per size")->check(CLI::PositiveNumber);
  bench->add_option("--methods", bench_methods, "Comma-separated methods");
  bench->add_option("--seed", bench_seed, "Seed of the first instance; run r uses seed + r");
  bench->add_option("--tmax", bench_tmax, "Per-run wall-clock budget in seconds")->check(CLI::NonNegativeNumber);
  bench->add_option("--out", bench_out, "Output CSV file (stdout if omitted)");

  auto* serve = app.add_subcommand("serve", "Run the HTTP service");
  int serve_port = 8080, serve_workers = 2;
  std::string serve_host = "127.0.0.1", serve_data = "hsara-data";
  serve->add_option("--port", serve_port, "TCP port")->check(CLI::Range(1, 65535));
  serve->add_option("--host", serve_host, "Bind address");
  serve->add_option("--data-dir", serve_data, "Directory for persisted instances and jobs");
  serve->add_option("--workers", serve_workers, "Solver worker threads")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsageError;
  }

  try {
    if (*gen) {
      const hsara::Instance inst = hsara::generate_instance(gen_n, gen_seed);
      nlohmann::json doc = hsara::instance_to_json(inst);
      doc["seed"] = gen_seed;
      write_text(gen_out, doc.dump(2));
    } else if (*solve) {
      hsara::Instance inst;
      try {
        std::ifstream in(solve_instance);
        inst = hsara::instance_from_json(nlohmann::json::parse(in));
      } catch (const std::exception& e) {
        std::cerr << "invalid instance: " << e.what() << '\n';
        return kUsageError;
      }
      solve_params.method = hsara::method_from_string(solve_method);
      solve_params.t_max = solve_tmax;
      write_text(solve_out, hsara::solve_pipeline(inst, solve_params).dump(2));
    } else if (*bench) {
      try {
        split_list(bench_sizes);
        for (const auto& m : split_list(bench_methods)) hsara::method_from_string(m);
        for (const auto& s : split_list(bench_sizes))
          if (std::stoi(s) < 1) throw std::invalid_argument("sizes must be positive");
      } catch (const std::exception& e) {
        std::cerr << "invalid bench flags: " << e.what() << '\n';
        return kUsageError;
      }
      return run_bench(bench_sizes, bench_runs, bench_methods, bench_seed, bench_tmax, bench_out);
    } else if (*serve) {
      hsara::SolveService service({serve_data, serve_workers});
      httplib::Server server;
      hsara::register_routes(server, service);
      std::cerr << "listening on " << serve_host << ':' << serve_port << '\n';
      if (!server.listen(serve_host, serve_port)) {
        std::cerr << "cannot bind " << serve_host << ':' << serve_port << '\n';
        return kSolverError;
      }
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kSolverError;
  }
  return 0;
}
