#include <filesystem>
#include <iostream>
#include <memory>
#include <string>

#include <CLI11.hpp>

#include "homeworld/homeworld.hpp"
#include "homeworld/http_clients.hpp"

namespace hw = homeworld;
namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitIo = 1;
constexpr int kExitUsage = 2;
constexpr int kExitFloor = 3;

struct Options {
  std::string bench;
  std::string scene;
  std::string dataset;
  std::string out;
  std::uint64_t seed = 0;
  int jobs = 1;
  std::string replan = "on";
  std::string correction = "on";
  double noise_miss = 0.0;
  double noise_mis = 0.0;
  int pixel_threshold = hw::kPixelThreshold;
  int explore_budget = hw::kExploreBudget;
  int max_steps = 1000;
  std::string planner_endpoint;
  std::string embed_endpoint;
  double sr_floor = -1.0;
  double floor = 0.0;
  int count = 50;
  double mismatch_rate = 0.0;
  std::vector<std::string> types;
};

void episode_flags(CLI::App* app, Options& o) {
  app->add_option("--seed", o.seed, "noise seed (falls back to HOMEWORLD_SEED)")->envname("HOMEWORLD_SEED");
  app->add_option("--replan", o.replan, "Re-Plan on a failed search")->check(CLI::IsMember({"on", "off"}));
  app->add_option("--map-correction", o.correction, "corrective map update")->check(CLI::IsMember({"on", "off"}));
  app->add_option("--noise-miss", o.noise_miss, "detection drop probability")->check(CLI::Range(0.0, 1.0));
  app->add_option("--noise-mis", o.noise_mis, "detection relabel probability")->check(CLI::Range(0.0, 1.0));
  app->add_option("--pixel-threshold", o.pixel_threshold, "inventory confirmation threshold p")->check(CLI::NonNegativeNumber);
  app->add_option("--explore-budget", o.explore_budget, "steps per Find before Re-Plan")->check(CLI::PositiveNumber);
  app->add_option("--max-steps", o.max_steps, "action budget per episode")->check(CLI::PositiveNumber);
  app->add_option("--embed-endpoint", o.embed_endpoint, "embedding service URL");
}

hw::EpisodeConfig config_of(const Options& o) {
  hw::EpisodeConfig c;
  c.seed = o.seed;
  c.replan_enabled = o.replan == "on";
  c.map_correction_enabled = o.correction == "on";
  c.noise.p_miss = o.noise_miss;
  c.noise.p_mis = o.noise_mis;
  c.pixel_threshold = o.pixel_threshold;
  c.explore_budget = o.explore_budget;
  c.max_steps = o.max_steps;
  return c;
}

std::unique_ptr<hw::SimilarityProvider> provider_of(const Options& o) {
  if (o.embed_endpoint.empty()) return std::make_unique<hw::SimilarityProvider>(hw::builtin_similarity());
  auto p = std::make_unique<hw::SimilarityProvider>(hw::SimilarityProvider::external(hw::http_embedder(o.embed_endpoint)));
  // One batched fetch up front; episodes then only read the cache.
  p->warm(hw::default_registry().names());
  return p;
}

void write_or_print(const Options& o, const std::string& name, const std::string& text) {
  if (o.out.empty()) {
    std::cout << text;
    return;
  }
  fs::create_directories(o.out);
  hw::write_text_file((fs::path(o.out) / name).string(), text);
}

int cmd_gen_bench(const Options& o) {
  std::vector<hw::TaskType> mix;
  for (const auto& t : o.types) mix.push_back(hw::task_type_from_string(t));
  const auto bench = hw::generate_benchmark(o.count, mix, o.mismatch_rate, o.seed);
  const std::string text = hw::benchmark_to_jsonl(bench);
  if (o.out.empty()) std::cout << text;
  else hw::write_text_file(o.out, text);
  return kExitOk;
}

int cmd_run(const Options& o) {
  const auto bench = hw::load_benchmark(o.bench);
  const auto sim = provider_of(o);
  const auto traces = hw::run_benchmark(bench, config_of(o), o.jobs, hw::default_registry(), *sim);
  const hw::MetricsReport r = hw::score(traces, bench);
  if (o.out.empty()) {
    std::cout << hw::report_to_json(r).dump(2) << "\n";
  } else {
    write_or_print(o, "report.json", hw::report_to_json(r).dump(2) + "\n");
    write_or_print(o, "report.csv", hw::report_to_csv(r));
    write_or_print(o, "traces.jsonl", hw::traces_to_jsonl(traces));
  }
  std::cerr << "SR " << hw::format_ratio(r.SR) << "  GC " << hw::format_ratio(r.GC) << "  PLWSR "
            << hw::format_ratio(r.PLWSR) << "  PLWGC " << hw::format_ratio(r.PLWGC) << "  HLP_ACC "
            << hw::format_ratio(r.HLP_ACC) << "\n";
  if (o.sr_floor >= 0 && r.SR < o.sr_floor) {
    std::cerr << "SR " << r.SR << " below floor " << o.sr_floor << "\n";
    return kExitFloor;
  }
  return kExitOk;
}

int cmd_report(const Options& o) {
  const auto bench = hw::load_benchmark(o.bench);
  const auto sim = provider_of(o);
  const hw::EpisodeConfig base = config_of(o);
  std::vector<hw::NamedConfig> grid;
  for (bool replan : {true, false})
    for (bool corr : {true, false}) {
      hw::EpisodeConfig c = base;
      c.replan_enabled = replan;
      c.map_correction_enabled = corr;
      grid.push_back({std::string("replan=") + (replan ? "on" : "off") + ";correction=" + (corr ? "on" : "off"), c});
    }
  hw::EpisodeConfig quiet = base;
  quiet.noise = {};
  grid.push_back({"noise=off", quiet});
  const auto rows = hw::ablate(bench, grid, o.jobs, hw::default_registry(), *sim);
  if (o.out.empty()) std::cout << hw::ablation_to_csv(rows);
  else hw::write_text_file(o.out, hw::ablation_to_csv(rows));
  return kExitOk;
}

int cmd_validate(const Options& o) {
  const hw::QAReport r = hw::qa_dataset(o.dataset);
  std::cout << hw::qa_table(r);
  if (!o.out.empty()) hw::write_text_file(o.out, hw::to_json(r).dump(2) + "\n");
  return r.valid_fraction() >= o.floor ? kExitOk : kExitFloor;
}

void print_trace(const hw::EpisodeTrace& t) {
  std::cout << "plan:\n";
  const auto phrases = hw::render_plan(t.plan);
  for (const auto& p : phrases) std::cout << "  " << p.index << ". " << p.text << "\n";
  for (const auto& f : t.plan_findings)
    std::cout << "  finding " << hw::to_string(f.code) << " at " << f.index << ": " << f.detail << "\n";
  for (std::size_t i = 0; i < t.subgoal_outcomes.size(); ++i) {
    const auto& s = t.subgoal_outcomes[i];
    if (s.replan) {
      std::cout << "  replan " << s.replan->original << " -> " << (s.replan->chosen ? *s.replan->chosen : "none");
      if (s.replan->chosen) std::cout << " (score " << hw::format_ratio(s.replan->scores.at(*s.replan->chosen)) << ")";
      std::cout << "\n";
    }
    if (s.status == hw::SubgoalStatus::NotReached) continue;
    std::cout << "  [" << i + 1 << "] " << hw::describe(s.binary) << ": " << hw::to_string(s.status) << " (" << s.steps
              << " steps)";
    if (!s.detail.empty()) std::cout << " " << s.detail;
    std::cout << "\n";
  }
  if (t.success) std::cout << "success in " << t.path_length << " steps\n";
  else std::cout << "failure(" << hw::to_string(t.reason) << ") after " << t.path_length << " steps\n";
}

int cmd_solve(const Options& o) {
  const hw::Scene scene = hw::load_scene(o.scene);
  const auto sim = provider_of(o);
  hw::EpisodeConfig cfg = config_of(o);
  hw::PlannerFn planner;
  if (!o.planner_endpoint.empty()) {
    hw::parse_endpoint(o.planner_endpoint);
    planner = hw::http_planner(o.planner_endpoint);
  }
  std::string line;
  while (true) {
    std::cout << "> " << std::flush;
    if (!std::getline(std::cin, line)) break;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const auto t = hw::run_episode(scene, hw::Instruction{line, std::nullopt}, cfg, planner, hw::default_registry(), *sim);
      print_trace(t);
    } catch (const hw::Error& e) {
      std::cout << e.what() << "\n";
    }
  }
  std::cout << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"homeworld: household gridworld agent and benchmark tools"};
  app.require_subcommand(1);
  Options o;

  auto* run = app.add_subcommand("run", "run a benchmark and score it");
  run->add_option("--bench", o.bench, "benchmark JSONL")->required();
  run->add_option("--jobs", o.jobs, "worker threads")->check(CLI::PositiveNumber);
  run->add_option("--sr-floor", o.sr_floor, "exit nonzero when SR is below")->check(CLI::Range(0.0, 1.0));
  run->add_option("--out", o.out, "output directory (report.json, report.csv, traces.jsonl)");
  episode_flags(run, o);

  auto* solve = app.add_subcommand("solve", "type instructions; the agent executes them");
  solve->add_option("--scene", o.scene, "scene JSON")->required();
  solve->add_option("--planner-endpoint", o.planner_endpoint, "planner service URL for unrecognised instructions");
  episode_flags(solve, o);

  auto* validate = app.add_subcommand("validate-dataset", "validate a JSONL plan dataset");
  validate->add_option("dataset", o.dataset, "dataset JSONL")->required();
  validate->add_option("--floor", o.floor, "minimum valid fraction")->check(CLI::Range(0.0, 1.0));
  validate->add_option("--out", o.out, "write the JSON report here");

  auto* gen = app.add_subcommand("gen-bench", "generate a benchmark");
  gen->add_option("--count", o.count, "episodes")->check(CLI::PositiveNumber);
  gen->add_option("--mismatch-rate", o.mismatch_rate, "probability of an absent synonym")->check(CLI::Range(0.0, 1.0));
  gen->add_option("--types", o.types, "task types to cycle through (default all)");
  gen->add_option("--seed", o.seed, "generation seed (falls back to HOMEWORLD_SEED)")->envname("HOMEWORLD_SEED");
  gen->add_option("--out", o.out, "benchmark JSONL path");

  auto* report = app.add_subcommand("report", "ablation table over Re-Plan, map correction and noise");
  report->add_option("--bench", o.bench, "benchmark JSONL")->required();
  report->add_option("--jobs", o.jobs, "worker threads")->check(CLI::PositiveNumber);
  report->add_option("--out", o.out, "CSV path");
  episode_flags(report, o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*run) return cmd_run(o);
    if (*solve) return cmd_solve(o);
    if (*validate) return cmd_validate(o);
    if (*gen) return cmd_gen_bench(o);
    if (*report) return cmd_report(o);
  } catch (const hw::Error& e) {
    std::cerr << e.what() << "\n";
    switch (e.code()) {
      case hw::ErrorCode::Io: return kExitIo;
      case hw::ErrorCode::InvalidArgument:
      case hw::ErrorCode::UnsupportedTemplate: return kExitUsage;
      default: return kExitIo;
    }
  } catch (const fs::filesystem_error& e) {
    std::cerr << e.what() << "\n";
    return kExitIo;
  }
  return kExitUsage;
}
