// Runs the ten acceptance criteria and prints one PASS/FAIL line each.
#include <chrono>
#include <cstdio>
#include <sstream>

#include "support.hpp"

using namespace homeworld;
using namespace hwtest;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Verdict {
  bool pass;
  std::string detail;
};

LocalMapFrame empty_frame(const SemanticMap& m) {
  LocalMapFrame f;
  f.local.assign(m.planes.size(), BinaryPlane(m.width, m.height));
  f.observed = BinaryPlane(m.width, m.height);
  return f;
}

BinaryPlane random_plane(Rng& rng, int w, int h, double p) {
  BinaryPlane b(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      if (uniform01(rng) < p) b.set({x, y});
  return b;
}

Verdict map_update_oracle() {
  const auto t0 = Clock::now();
  int cases = 0, bad = 0;
  const std::vector<std::pair<int, int>> frames{{0x1FF, 0x000}, {0x1FF, 0x010}, {0x000, 0x000}, {0x0AA, 0x000},
                                                {0x155, 0x001}, {0x007, 0x004}, {0x1C0, 0x100}};
  for (int mask = 0; mask < 512; ++mask)
    for (const auto& [obs, det] : frames)
      for (bool corr : {true, false}) {
        SemanticMap prev(3, 3, {"Apple"});
        for (int i = 0; i < 9; ++i)
          if (mask >> i & 1) prev.planes[2].set({i % 3, i / 3});
        LocalMapFrame f = empty_frame(prev);
        for (int i = 0; i < 9; ++i) {
          if (obs >> i & 1) f.observed.set({i % 3, i / 3});
          if (det >> i & 1) f.local[2].set({i % 3, i / 3});
        }
        ++cases;
        bad += !(update(prev, f, std::string("Apple"), corr) == brute_update(prev, f, "Apple", corr));
      }
  Rng rng(2024);
  const std::vector<std::string> classes{"Apple", "Mug", "Desk", "Fridge"};
  for (int trial = 0; trial < 1000; ++trial) {
    SemanticMap prev(16, 16, classes);
    for (auto& p : prev.planes) p = random_plane(rng, 16, 16, 0.08);
    LocalMapFrame f = empty_frame(prev);
    f.observed = random_plane(rng, 16, 16, 0.4);
    for (auto& p : f.local) {
      p = random_plane(rng, 16, 16, 0.1);
      for (const Cell& c : p.cells())
        if (!f.observed.get(c)) p.set(c, false);
    }
    std::optional<std::string> target;
    if (uniform_index(rng, 5) != 0) target = classes[uniform_index(rng, classes.size())];
    const bool corr = uniform_index(rng, 4) != 0;
    ++cases;
    bad += !(update(prev, f, target, corr) == brute_update(prev, f, target, corr));
  }
  const double secs = seconds_since(t0);
  std::ostringstream d;
  d << cases << " cases, " << bad << " mismatches, " << secs << " s";
  return {bad == 0 && secs < 10.0, d.str()};
}

Verdict inventory_threshold() {
  AgentState st;
  st.map = SemanticMap(20, 20, {"SlicedApple", "Table"});
  st.pose = {{1, 10}, Heading::E, std::nullopt};
  Observation obs;
  for (int x = 2; x <= 15; ++x) obs.observed_cells.insert({x, 10});
  obs.detections = {{"SlicedApple_1", "SlicedApple", pixel_count(1, 7), {{8, 10}}},
                    {"Table_1", "Table", pixel_count(4, 13), {{14, 10}}}};
  st = tick(st, obs);
  const bool ok = pixel_count(1, 7) == 6 && pixel_count(4, 13) == 13 && st.inventory.present.size() == 2 &&
                  !st.inventory.confirmed.count("SlicedApple") && st.inventory.confirmed.count("Table");
  return {ok, "pixels 6 and 13 at p=10"};
}

Verdict replan_ablation() {
  const auto t0 = Clock::now();
  const auto bench = generate_benchmark(50, {}, 1.0, 11);
  EpisodeConfig on, off;
  off.replan_enabled = false;
  const double son = score(run_benchmark(bench, on), bench).SR;
  const double soff = score(run_benchmark(bench, off), bench).SR;
  const double secs = seconds_since(t0);
  std::ostringstream d;
  d << "SR on " << son << ", off " << soff << ", " << secs << " s";
  return {son == 1.0 && son - soff >= 0.5 && secs < 60.0, d.str()};
}

Verdict correction_ablation() {
  const auto bench = generate_benchmark(50, {}, 0.0, 7);
  auto sr = [&](bool corr, NoiseConfig noise) {
    EpisodeConfig c;
    c.map_correction_enabled = corr;
    c.noise = noise;
    return score(run_benchmark(bench, c), bench).SR;
  };
  const NoiseConfig noisy{0.0, 0.1, 1};
  const double on = sr(true, noisy), off = sr(false, noisy);
  const double clean_on = sr(true, {}), clean_off = sr(false, {});
  std::ostringstream d;
  d << "noisy on " << on << " off " << off << "; clean on " << clean_on << " off " << clean_off;
  return {on >= off && clean_on == clean_off, d.str()};
}

Verdict plan_accuracy() {
  int checked = 0, bad = 0;
  double worst = 1.0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto bench = generate_benchmark(12, {}, 0.0, seed);
    const auto r = score(run_benchmark(bench, EpisodeConfig{}), bench);
    worst = std::min(worst, r.HLP_ACC);
    for (const auto& e : bench) {
      ++checked;
      bad += plan_binaries(parse_instruction(e.instruction).spec) != e.golden_plan;
    }
  }
  std::ostringstream d;
  d << checked << " instructions, " << bad << " plan mismatches, min HLP_ACC " << worst;
  return {bad == 0 && worst == 1.0, d.str()};
}

Verdict validator_mutants() {
  int applicable = 0, detected = 0, false_pos = 0;
  for (const auto& s : canonical_specs()) {
    const auto plan = plan_binaries(s);
    false_pos += !validate_spec_plan(s, plan).empty();
    for (Mutation m : kMutations)
      if (auto q = mutate(plan, m)) {
        ++applicable;
        detected += !validate_spec_plan(s, *q).empty();
      }
  }
  const auto qa = qa_dataset_text(qa_dataset_jsonl(100, 60, 5));
  std::ostringstream d;
  d << detected << "/" << applicable << " mutants, " << false_pos << " false positives, QA " << qa.valid_fraction();
  return {applicable > 0 && detected == applicable && false_pos == 0 && qa.valid_fraction() == 0.40, d.str()};
}

Verdict metric_fixtures() {
  int bad = 0;
  std::string failed;
  for (const auto& f : metrics_fixtures()) {
    const auto r = score(f.traces, f.bench);
    const bool ok = r.SR == f.SR && r.GC == f.GC && r.GC_mean == f.GC_mean && r.PLWSR == f.PLWSR &&
                    r.PLWGC == f.PLWGC && r.PLWGC_mean == f.PLWGC_mean && r.HLP_ACC == f.HLP_ACC;
    if (!ok) ++bad, failed += " " + f.name;
  }
  return {bad == 0, bad ? "failed:" + failed : std::to_string(metrics_fixtures().size()) + " fixtures"};
}

SemanticMap known_map(const Scene& s) {
  SemanticMap m(s.grid_w, s.grid_h, {});
  for (const Cell& c : s.obstacles) m.obstacles().set(c);
  for (int y = 0; y < s.grid_h; ++y)
    for (int x = 0; x < s.grid_w; ++x) m.explored().set({x, y});
  return m;
}

Verdict navigation() {
  Rng rng(123);
  int queries = 0, bad = 0, uncovered = 0;
  for (int g = 0; g < 100; ++g) {
    const Scene s = random_grid(rng);
    const SemanticMap m = known_map(s);
    for (int q = 0; q < 10; ++q) {
      const Cell to{uniform_int(rng, 0, s.grid_w - 1), uniform_int(rng, 0, s.grid_h - 1)};
      const int want = relax_distance(m, s.agent, to);
      const NavResult r = shortest_path(m, s.agent, to);
      ++queries;
      if (want < 0 ? r.ok() : !r.ok() || static_cast<int>(r.actions.size()) != want) ++bad;
    }
  }
  Rng erng(55);
  for (int g = 0; g < 100; ++g) {
    Scene s = random_grid(erng);
    const auto reach = reachable_free(s, s.agent.cell);
    AgentState st;
    st.map = SemanticMap(s.grid_w, s.grid_h, {});
    st.pose = s.agent;
    st = tick(st, observe(s));
    const int bound = 4 * static_cast<int>(reach.size());
    for (int steps = 0; steps < bound; ++steps) {
      const auto a = explore_step(st.map, st.pose);
      if (!a || !apply(s, *a).ok()) break;
      st.pose = s.agent;
      st = tick(st, observe(s));
    }
    for (const Cell& c : reach)
      if (!st.map.explored().get(c)) {
        ++uncovered;
        break;
      }
  }
  std::ostringstream d;
  d << queries << " queries, " << bad << " length mismatches, " << uncovered << " grids not covered";
  return {bad == 0 && uncovered == 0, d.str()};
}

Verdict determinism() {
  auto run = [] {
    const auto bench = generate_benchmark(24, {}, 0.5, 99);
    EpisodeConfig cfg;
    cfg.noise = {0.05, 0.05, 3};
    const auto traces = run_benchmark(bench, cfg);
    std::ostringstream tr;
    for (const auto& t : traces) write_trace_jsonl(tr, t, t.episode_id);
    const auto r = score(traces, bench);
    return benchmark_to_jsonl(bench) + "\x1e" + report_to_json(r).dump() + "\x1e" + report_to_csv(r) + "\x1e" +
           traces_to_jsonl(traces) + "\x1e" + tr.str();
  };
  const std::string a = run(), b = run();
  return {a == b, std::to_string(a.size()) + " bytes compared"};
}

Verdict capability_cases() {
  int ok = 0;
  std::string failed;
  const auto cases = end_to_end_cases();
  for (const auto& c : cases) {
    const auto t = run_episode(load_scene(fixture(c.scene)), Instruction{c.instruction, std::nullopt}, EpisodeConfig{});
    if (t.success) ++ok;
    else failed += " " + c.name + "(" + std::string(to_string(t.reason)) + ")";
  }
  return {ok == static_cast<int>(cases.size()), std::to_string(ok) + "/" + std::to_string(cases.size()) + failed};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, Verdict (*)()>> criteria{
      {"map update matches brute-force oracle", map_update_oracle},
      {"inventory pixel threshold", inventory_threshold},
      {"replan lifts success under synonym mismatch", replan_ablation},
      {"map correction does not hurt under noise", correction_ablation},
      {"plan accuracy on every task type", plan_accuracy},
      {"validator catches every mutant", validator_mutants},
      {"metrics match hand-computed fixtures", metric_fixtures},
      {"shortest path and exploration", navigation},
      {"byte-identical reruns", determinism},
      {"capability fixtures succeed", capability_cases},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Verdict o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    failures += !o.pass;
    std::printf("[%s] %2zu %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(), o.detail.c_str());
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures ? 1 : 0;
}
