#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include "camscout/api.hpp"
#include "camscout/error.hpp"
#include "camscout/fixture.hpp"
#include "camscout/pipeline.hpp"

using namespace camscout;
using nlohmann::json;

namespace {

struct Globals {
  std::string data_dir;
  std::vector<std::string> fixtures;
  bool virtual_clock = false;
  std::string renderer;
  std::string log_level = "info";
};

json merged_fixture(const std::vector<std::string>& paths) {
  json site{{"resources", json::object()}, {"planted_cameras", json::array()}};
  for (const auto& p : paths) {
    json one = FixtureFetcher::load_site(p);
    const json resources = one.value("resources", json::object());
    const json planted = one.value("planted_cameras", json::array());
    for (const auto& [url, spec] : resources.items()) site["resources"][url] = spec;
    for (const auto& u : planted) site["planted_cameras"].push_back(u);
  }
  return site;
}

struct Runtime {
  std::unique_ptr<Clock> clock;
  std::unique_ptr<Fetcher> fetcher;
  std::unique_ptr<Store> store;
};

Runtime make_runtime(const Globals& g) {
  Runtime rt;
  if (g.virtual_clock) rt.clock = std::make_unique<VirtualClock>();
  else rt.clock = std::make_unique<SystemClock>();
  std::string renderer = g.renderer;
  if (renderer.empty())
    if (const char* env = std::getenv(RenderServiceFetcher::kEndpointEnv)) renderer = env;
  if (!g.fixtures.empty()) rt.fetcher = std::make_unique<FixtureFetcher>(*rt.clock, merged_fixture(g.fixtures));
  else if (!renderer.empty()) rt.fetcher = std::make_unique<RenderServiceFetcher>(*rt.clock, renderer);
  else rt.fetcher = std::make_unique<StaticFetcher>(*rt.clock);
  rt.store = std::make_unique<Store>(g.data_dir.empty() ? Store::default_root() : std::filesystem::path(g.data_dir));
  return rt;
}

// Planted URLs from fixture JSON files or plain lists (one URL per line).
std::vector<std::string> load_truth(const std::vector<std::string>& paths) {
  std::vector<std::string> urls;
  for (const auto& p : paths) {
    std::ifstream in(p);
    if (!in) throw Error(ErrorKind::Io, "cannot open " + p);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    json j = json::parse(text, nullptr, false);
    if (!j.is_discarded() && j.is_object()) {
      for (const auto& u : j.value("planted_cameras", json::array())) urls.push_back(u.get<std::string>());
      continue;
    }
    std::istringstream lines(text);
    for (std::string line; std::getline(lines, line);) {
      line.erase(line.find_last_not_of(" \t\r") + 1);
      if (!line.empty() && line[0] != '#') urls.push_back(line);
    }
  }
  return urls;
}

void add_method_options(CLI::App* cmd, std::string& method, MethodConfig& cfg) {
  cmd->add_option("--method", method, "luminance|percent|checksum|cascade")->capture_default_str();
  cmd->add_option("--percent-threshold", cfg.percent_threshold)->capture_default_str();
  cmd->add_option("--luminance-threshold", cfg.luminance_threshold)->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"camscout: find public network cameras on web sites"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--data-dir", g.data_dir, "store directory (default $CAMSCOUT_DATA_DIR or ./camscout-data)");
  app.add_option("--fixture", g.fixtures, "serve requests from fixture site JSON instead of the network");
  app.add_option("--renderer", g.renderer, "headless render service endpoint");
  app.add_flag("--virtual-clock", g.virtual_clock, "sleep instantly on a simulated clock");
  app.add_option("--log-level", g.log_level)->capture_default_str();

  // crawl
  auto* crawl_cmd = app.add_subcommand("crawl", "crawl one seed site for data links");
  std::string seed, delay = "3s", timeout = "180s", render_wait = "8s", out_dir;
  CrawlConfig crawl_cfg;
  crawl_cmd->add_option("seed", seed)->required();
  crawl_cmd->add_option("--depth", crawl_cfg.max_depth)->capture_default_str();
  crawl_cmd->add_option("--delay", delay)->capture_default_str();
  crawl_cmd->add_option("--timeout", timeout)->capture_default_str();
  crawl_cmd->add_option("--render-wait", render_wait)->capture_default_str();
  crawl_cmd->add_option("--renderer", g.renderer);
  crawl_cmd->add_option("--connections", crawl_cfg.max_connections_per_domain)->capture_default_str();
  crawl_cmd->add_option("--workers", crawl_cfg.workers)->capture_default_str();
  crawl_cmd->add_option("--out", out_dir, "also append the report to DIR/crawl_report.jsonl");
  crawl_cmd->add_flag("--virtual-clock", g.virtual_clock);
  bool ignore_robots = false;
  crawl_cmd->add_flag("--ignore-robots", ignore_robots);

  // sample
  auto* sample_cmd = app.add_subcommand("sample", "capture frames of stored image links");
  std::string schedule_text = "0,5m,60m,12h";
  bool resample = false;
  SampleOptions sample_opts;
  sample_cmd->add_option("--schedule", schedule_text)->capture_default_str();
  sample_cmd->add_option("--retries", sample_opts.retries_per_offset)->capture_default_str();
  sample_cmd->add_flag("--resample", resample);
  sample_cmd->add_flag("--virtual-clock", g.virtual_clock);

  // identify
  auto* identify_cmd = app.add_subcommand("identify", "classify sampled links and probe streams");
  std::string method = "luminance";
  MethodConfig method_cfg;
  add_method_options(identify_cmd, method, method_cfg);
  identify_cmd->add_flag("--virtual-clock", g.virtual_clock);

  // eval
  auto* eval_cmd = app.add_subcommand("eval", "score a method against labels");
  bool sweep = false;
  std::string csv_path;
  std::vector<std::string> truth_paths;
  add_method_options(eval_cmd, method, method_cfg);
  eval_cmd->add_flag("--sweep", sweep, "sweep thresholds and select one");
  eval_cmd->add_option("--csv", csv_path, "write the PR curve as CSV");
  eval_cmd->add_option("--truth", truth_paths, "planted camera list or fixture JSON instead of human labels");

  // bench
  auto* bench_cmd = app.add_subcommand("bench", "time the identification methods");
  int reps = 20;
  std::size_t synthetic = 0;
  bench_cmd->add_option("--reps", reps)->capture_default_str();
  bench_cmd->add_option("--synthetic", synthetic, "use N generated four-frame sets instead of the store");

  // serve
  auto* serve_cmd = app.add_subcommand("serve", "serve the REST API");
  std::string addr = "127.0.0.1:8080", ui_dir;
  serve_cmd->add_option("--addr", addr)->capture_default_str();
  serve_cmd->add_option("--ui-dir", ui_dir);

  // cameras
  auto* cameras_cmd = app.add_subcommand("cameras", "print stored cameras as JSON lines");

  CLI11_PARSE(app, argc, argv);
  spdlog::set_level(spdlog::level::from_str(g.log_level));
  spdlog::set_pattern("%H:%M:%S %^%l%$ %v");

  try {
    Runtime rt = make_runtime(g);
    if (*crawl_cmd) {
      crawl_cfg.per_request_delay = parse_duration(delay);
      crawl_cfg.page_timeout = parse_duration(timeout);
      crawl_cfg.render_wait = parse_duration(render_wait);
      crawl_cfg.respect_robots = !ignore_robots;
      CrawlReport report;
      try {
        report = run_crawl(seed, crawl_cfg, *rt.fetcher, *rt.clock, *rt.store);
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::SeedUnreachable) throw;
        std::cerr << e.what() << '\n';
        return 2;
      }
      if (!out_dir.empty()) {
        std::filesystem::create_directories(out_dir);
        std::ofstream out(std::filesystem::path(out_dir) / "crawl_report.jsonl", std::ios::app);
        for (const auto& line : crawl_report_lines(report)) out << line.dump() << '\n';
      }
      std::cout << crawl_report_lines(report).back().dump() << '\n';
    } else if (*sample_cmd) {
      SampleSummary s =
          run_sample(*rt.store, SampleSchedule::parse(schedule_text), *rt.clock, *rt.fetcher, sample_opts, resample);
      std::cout << json{{"image_links", s.links}, {"framesets", s.framesets}, {"dead", s.dead}, {"skipped", s.skipped}}
                << '\n';
    } else if (*identify_cmd) {
      method_cfg.method = method_from_string(method);
      IdentifySummary s = run_identify(*rt.store, *rt.fetcher, *rt.clock, method_cfg);
      std::cout << json{{"method", to_string(method_cfg.method)}, {"classified", s.classified},
                        {"cameras", s.cameras},       {"unprobed", s.unprobed},
                        {"unclassifiable", s.unclassifiable}}
                << '\n';
    } else if (*eval_cmd) {
      EvalOptions opts;
      opts.method = method_cfg;
      opts.method.method = method_from_string(method);
      opts.sweep = sweep || !csv_path.empty();
      auto truth = truth_paths.empty() ? truth_from_labels(rt.store->resolved_labels())
                                       : truth_from_urls(load_truth(truth_paths), rt.store->list_framesets());
      EvalReport report = run_eval(*rt.store, truth, opts);
      rt.store->put_eval(report);
      if (!csv_path.empty()) {
        std::ofstream csv(csv_path);
        csv << pr_curve_csv(report.pr_curve);
        if (!csv) throw Error(ErrorKind::Io, "cannot write " + csv_path);
      }
      json j = report;
      if (csv_path.empty()) j.erase("pr_curve");
      std::cout << j.dump() << '\n';
    } else if (*bench_cmd) {
      std::vector<FrameSet> sets;
      if (synthetic == 0) {
        for (const auto& m : rt.store->list_framesets()) sets.push_back(rt.store->load_frameset(m.id));
        if (sets.empty()) synthetic = 250;
      }
      if (synthetic > 0) sets = synthetic_framesets(synthetic);
      std::size_t images = 0;
      for (const auto& s : sets) images += s.present_count();
      auto timings = benchmark_methods(sets, {Method::Checksum, Method::PercentDiff, Method::LuminanceDiff, Method::Cascade},
                                       reps);
      for (const auto& t : timings)
        std::cout << json{{"method", to_string(t.method)}, {"images", images}, {"reps", reps},
                          {"mean_s", t.mean_s},         {"stddev_s", t.stddev_s}}
                  << '\n';
    } else if (*serve_cmd) {
      auto [host, port] = parse_listen_address(addr);
      Api api(*rt.store, *rt.clock);
      ApiServer server(api, ui_dir.empty() ? std::nullopt : std::optional<std::filesystem::path>(ui_dir));
      int bound = server.bind(host, port);
      spdlog::info("listening on http://{}:{}", host, bound);
      server.serve();
    } else if (*cameras_cmd) {
      for (const auto& c : rt.store->list_cameras()) std::cout << json(c).dump() << '\n';
    }
  } catch (const Error& e) {
    std::cerr << "camscout: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
