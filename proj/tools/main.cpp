#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "hatmatch/error.hpp"
#include "hatmatch/pipeline.hpp"
#include "hatmatch/report.hpp"
#include "hatmatch/synthgen.hpp"
#include "hatmatch/validate.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using namespace hatmatch;

namespace {

constexpr int kOk = 0;
constexpr int kStageFailure = 1;
constexpr int kConfigError = 2;

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::string output, method, se;
  // ingest only
  std::vector<std::string> works;
  std::string format;
  std::optional<int> min_pubs;
};

void add_overrides(CLI::App* cmd, std::string& config, Overrides& o) {
  cmd->add_option("-c,--config", config, "Pipeline config (JSON)")->required();
  cmd->add_option("--seed", o.seed, "Override the config seed");
  cmd->add_option("-o,--output", o.output, "Override the output directory");
  cmd->add_option("--method", o.method, "Override match.method (exact, scm, cem, dom)");
  cmd->add_option("--se", o.se, "Override estimate.se (classical, robust, clustered)");
}

// Overrides are patched into the JSON first so the config hash covers them.
PipelineConfig load_config(const std::string& path, const Overrides& o) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  auto j = nlohmann::json::parse(ss.str(), nullptr, false, true);
  if (j.is_discarded() || !j.is_object()) throw ConfigError("config is not a JSON object: " + path);
  if (o.seed) j["seed"] = *o.seed;
  if (!o.method.empty()) j["match"]["method"] = o.method;
  if (!o.se.empty()) j["estimate"]["se"] = o.se;
  std::string base = fs::path(path).parent_path().string();
  if (!o.output.empty()) j["output"] = fs::absolute(o.output).string();
  if (!o.works.empty()) {
    auto works = nlohmann::json::array();
    for (const auto& w : o.works) works.push_back(fs::absolute(w).string());
    j["inputs"]["works"] = works;
  }
  if (!o.format.empty()) j["inputs"]["format"] = o.format;
  if (o.min_pubs) j["eligibility"]["min_pubs"] = *o.min_pubs;
  PipelineConfig c = pipeline_config_from_json(j.dump(), base);
  c.config_path = path;
  return c;
}

PanelMap load_panels(const PipelineConfig& c) {
  const fs::path p = fs::path(c.output_dir) / "panels.jsonl";
  if (!fs::exists(p)) throw InvalidInput("missing " + p.string() + " (run the ingest stage first)");
  return read_panels_file(p.string());
}

GroupAssignment load_groups(const PipelineConfig& c) {
  const fs::path p = fs::path(c.output_dir) / "labels.csv";
  if (!fs::exists(p)) throw InvalidInput("missing " + p.string() + " (run the groups stage first)");
  return read_labels_csv(p.string());
}

void print_warnings(const StageLog& log) {
  for (const auto& w : log.warnings) std::cerr << "warning: " << w << '\n';
}

template <typename F>
int guarded(F&& body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const InvalidInput& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kStageFailure;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Matched difference-in-differences for scientist mobility"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(HATMATCH_VERSION_STRING));

  std::string config;
  Overrides o;
  int exit_code = kOk;

  auto* ingest = app.add_subcommand("ingest", "Parse works files into author panels");
  add_overrides(ingest, config, o);
  ingest->add_option("--works", o.works, "Replace inputs.works (one or more files)");
  ingest->add_option("--format", o.format, "Replace inputs.format (flat, openalex-works)");
  ingest->add_option("--min-pubs", o.min_pubs, "Replace eligibility.min_pubs");
  ingest->callback([&] {
    exit_code = guarded([&] {
      const auto c = load_config(config, o);
      check_inputs(c);
      fs::create_directories(c.output_dir);
      StageLog log;
      const auto out = stage_ingest(c, log);
      print_warnings(log);
      std::cout << out.panels.size() << " eligible authors -> " << c.output_dir << "/panels.jsonl\n";
      return kOk;
    });
  });

  auto* groups = app.add_subcommand("groups", "Detect movers and label G_w / G_1 / G_2");
  add_overrides(groups, config, o);
  groups->callback([&] {
    exit_code = guarded([&] {
      const auto c = load_config(config, o);
      check_inputs(c);
      StageLog log;
      const auto g = stage_groups(c, load_panels(c), log);
      print_warnings(log);
      std::cout << "G_w=" << g.members(Group::Gw).size() << " G_1=" << g.members(Group::G1).size()
                << " G_2=" << g.members(Group::G2).size() << '\n';
      return kOk;
    });
  });

  auto* match = app.add_subcommand("match", "Build candidate pools and refine them");
  add_overrides(match, config, o);
  match->callback([&] {
    exit_code = guarded([&] {
      const auto c = load_config(config, o);
      check_inputs(c);
      StageLog log;
      const auto runs = stage_match(c, load_panels(c), load_groups(c), log);
      print_warnings(log);
      for (const auto& r : runs)
        std::cout << to_string(r.pool) << '/' << to_string(r.outcome) << ": " << r.refined.n_pairs()
                  << " pairs\n";
      return kOk;
    });
  });

  auto* estimate = app.add_subcommand("estimate", "Fit DID, event-study and logit models");
  add_overrides(estimate, config, o);
  estimate->callback([&] {
    exit_code = guarded([&] {
      const auto c = load_config(config, o);
      check_inputs(c);
      const auto panels = load_panels(c);
      const auto g = load_groups(c);
      const auto runs = load_match_runs(c);
      StageLog log;
      stage_estimate(c, panels, g, runs, log);
      print_warnings(log);
      std::cout << "estimates -> " << c.output_dir << "/estimates.csv\n";
      return kOk;
    });
  });

  auto* run = app.add_subcommand("run", "Run every stage and write the manifest");
  add_overrides(run, config, o);
  bool quiet = false;
  run->add_flag("-q,--quiet", quiet, "Suppress progress lines");
  run->callback([&] {
    exit_code = guarded([&] {
      const auto c = load_config(config, o);
      std::ostringstream sink;
      const auto status = run_pipeline(c, quiet ? &sink : &std::cerr);
      if (status.exit_code != kOk)
        std::cerr << (status.exit_code == kConfigError ? "input error: " : "stage '" + status.failed_stage + "' failed: ")
                  << status.message << '\n';
      return status.exit_code;
    });
  });

  std::string synth_config, synth_out;
  std::optional<std::uint64_t> synth_seed;
  auto* simulate = app.add_subcommand("simulate", "Generate a synthetic corpus with planted effects");
  simulate->add_option("-c,--config", synth_config, "Generator config (JSON)")->required();
  simulate->add_option("-o,--output", synth_out, "Directory for works.jsonl, roster.csv, truth.json")->required();
  simulate->add_option("--seed", synth_seed, "Override the generator seed");
  simulate->callback([&] {
    exit_code = guarded([&] {
      SynthConfig sc = read_synth_config(synth_config);
      if (synth_seed) sc.seed = *synth_seed;
      validate_synth_config(sc);
      const SynthCorpus corpus = generate(sc);
      write_synth_corpus(synth_out, corpus);
      std::cout << corpus.records.size() << " works, " << corpus.roster.size() << " roster entries -> "
                << synth_out << '\n';
      return kOk;
    });
  });

  std::string report_dir;
  auto* report = app.add_subcommand("report", "Summarise an artifact directory");
  report->add_option("-d,--dir", report_dir, "Artifact directory")->required();
  report->callback([&] {
    exit_code = guarded([&] {
      const RunReport r = write_report(report_dir);
      std::cout << r.text;
      return kOk;
    });
  });

  std::string validate_dir, truth_path;
  double did_abs = ValidationTolerances{}.did_abs;
  auto* validate = app.add_subcommand("validate", "Check a synthetic run against its ground truth");
  validate->add_option("-d,--dir", validate_dir, "Artifact directory")->required();
  validate->add_option("-t,--truth", truth_path, "truth.json written by simulate")->required();
  validate->add_option("--did-tolerance", did_abs, "Absolute tolerance for noiseless effects");
  validate->callback([&] {
    exit_code = guarded([&] {
      if (!fs::exists(truth_path)) throw InvalidInput("truth file not found: " + truth_path);
      ValidationTolerances tol;
      tol.did_abs = did_abs;
      const auto r = validate_run(validate_dir, read_ground_truth(truth_path), tol);
      std::cout << format_validation_report(r);
      return r.passed() ? kOk : kStageFailure;
    });
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }
  return exit_code;
}
