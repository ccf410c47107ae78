/**
 * Copyright 2026 The mammopipe Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "cli.hpp"

#include <map>

#include <CLI11.hpp>

#include "commands.hpp"
#include "mammopipe/io/png.hpp"

namespace mammopipe::cli {

namespace {

// Flags shared by the commands that consume a run configuration. Values
// given on the command line override the config file.
struct ConfigFlags {
  std::string config;
  std::uint64_t seed = 0;
  double alpha = 0.05;
  std::string policy;
  std::string statistic;
  CLI::Option* seed_opt = nullptr;
  CLI::Option* alpha_opt = nullptr;
  CLI::Option* policy_opt = nullptr;
  CLI::Option* statistic_opt = nullptr;

  void add_config(CLI::App* app) {
    app->add_option("--config", config, "Run configuration JSON");
  }
  void add_seed(CLI::App* app) { seed_opt = app->add_option("--seed", seed, "Global seed"); }
  void add_alpha(CLI::App* app) { alpha_opt = app->add_option("--alpha", alpha, "Significance level"); }
  void add_policy(CLI::App* app) {
    policy_opt = app->add_option("--policy", policy, "style25, combo20, original or a JSON weights file");
  }
  void add_statistic(CLI::App* app) {
    statistic_opt = app->add_option("--statistic", statistic, "entropy or maxprob-std");
  }

  io::RunConfig resolve() const {
    io::RunConfig c = config.empty() ? io::RunConfig{} : io::load_run_config(config);
    if (seed_opt && seed_opt->count()) c.seed = seed;
    if (alpha_opt && alpha_opt->count()) c.alpha = alpha;
    if (policy_opt && policy_opt->count()) {
      try {
        c.policy = io::resolve_policy(policy);
      } catch (const io::IoError&) {
        throw;
      } catch (const std::exception& e) {
        throw UsageError(std::string("--policy: ") + e.what());
      }
    }
    if (statistic_opt && statistic_opt->count()) {
      try {
        c.tta_statistic = parse_statistic(statistic);
      } catch (const std::exception& e) {
        throw UsageError(std::string("--statistic: ") + e.what());
      }
    }
    return c;
  }
};

// Output directory: --out when given, else the config's output_dir.
fs::path out_dir(const std::string& flag, const io::RunConfig& cfg) {
  return flag.empty() ? fs::path(cfg.output_dir) : fs::path(flag);
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Mammography preprocessing, augmentation and evaluation toolkit", "mammopipe"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "mammopipe 0.1.0");
  Console con{out, err};

  // One set per subcommand so option counts are read from the parsed one.
  std::map<std::string, ConfigFlags> flag_sets;
  std::string manifest, out_flag, str_a, str_b;
  std::vector<std::string> list_a;
  int width = 0, height = 0;
  std::size_t count = 0;
  bool unit_float = false;
  double spacing_default = 0.0;
  CLI::Option* spacing_opt = nullptr;
  CLI::Option* pred_dir_opt = nullptr;
  CLI::Option* summary_opt = nullptr;
  CLI::Option* csv_opt = nullptr;

  std::function<void()> action;

  {
    auto* c = app.add_subcommand("preprocess", "Vendor pipelines: windowing, normalization, CLAHE, flip");
    auto& flags = flag_sets[c->get_name()];
    c->add_option("--manifest", manifest, "Sample manifest CSV")->required();
    c->add_option("--out", out_flag, "Output directory");
    c->add_flag("--unit-float", unit_float, "Also write [0,1] float maps for model input");
    flags.add_config(c);
    c->callback([&] {
      action = [&] {
        const auto cfg = flags.resolve();
        cmd_preprocess({manifest, out_dir(out_flag, cfg), unit_float}, cfg, con);
      };
    });
  }
  {
    auto* c = app.add_subcommand("rasterize", "Polygon JSON to label PNG");
    c->add_option("--polygons", str_a, "Polygon JSON")->required();
    c->add_option("--width", width)->required();
    c->add_option("--height", height)->required();
    c->add_option("--out", out_flag, "Label PNG")->required();
    c->callback([&] { action = [&] { cmd_rasterize(str_a, width, height, out_flag, con); }; });
  }
  {
    auto* c = app.add_subcommand("augment", "Annotation-guided intensity manipulation");
    auto& flags = flag_sets[c->get_name()];
    c->add_option("--manifest", manifest, "Preprocessed manifest with labels")->required();
    c->add_option("--out", out_flag, "Output directory");
    flags.add_config(c);
    flags.add_seed(c);
    c->callback([&] {
      action = [&] {
        const auto cfg = flags.resolve();
        cmd_augment({manifest, out_dir(out_flag, cfg)}, cfg, con);
      };
    });
  }
  {
    auto* c = app.add_subcommand("stylize-post", "Collapse, resize to 384x384 and zero background of stylized images");
    c->add_option("--manifest", manifest, "Manifest of stylized images and 384x384 labels")
        ->required()
        ;
    c->add_option("--out", out_flag, "Output directory")->required();
    c->callback([&] { action = [&] { cmd_stylize_post({manifest, out_flag}, con); }; });
  }
  {
    auto* c = app.add_subcommand("style-proxy", "Histogram-matching stand-in for neural stylization");
    c->require_subcommand(1);
    auto* bank = c->add_subcommand("bank", "Build reference histograms, one style per vendor");
    bank->add_option("--manifest", manifest, "Reference images")->required();
    bank->add_option("--out", out_flag, "Style bank JSON")->required();
    bank->callback([&] { action = [&] { cmd_style_bank({manifest, out_flag}, con); }; });
    auto* apply = c->add_subcommand("apply", "Match foreground histograms to one style");
    apply->add_option("--manifest", manifest)->required();
    apply->add_option("--bank", str_a, "Style bank JSON")->required();
    apply->add_option("--style", str_b, "Style name in the bank")->required();
    apply->add_option("--out", out_flag, "Output directory")->required();
    apply->callback([&] { action = [&] { cmd_style_apply({manifest, str_a, str_b, out_flag}, con); }; });
  }
  {
    auto* c = app.add_subcommand("mix", "Sample a training stream from per-category manifests");
    auto& flags = flag_sets[c->get_name()];
    c->add_option("--source", list_a, "CATEGORY=manifest.csv (repeatable)")->required();
    c->add_option("--count", count, "Stream length")->required();
    c->add_option("--out", out_flag, "Stream CSV")->required();
    flags.add_config(c);
    flags.add_seed(c);
    flags.add_policy(c);
    c->callback([&] { action = [&] { cmd_mix({list_a, count, out_flag}, flags.resolve(), con); }; });
  }
  {
    auto* c = app.add_subcommand("evaluate", "Per-image metrics and summary table");
    c->add_option("--manifest", manifest, "id,pred_path,gt_path,spacing_m or a sample manifest")->required();
    pred_dir_opt = c->add_option("--pred-dir", str_a, "Predictions named <id>.png");
    c->add_option("--method", str_b, "Method name")->default_val("method");
    c->add_option("--out", out_flag, "Per-image metrics CSV")->required();
    summary_opt = c->add_option("--summary", list_a, "Summary CSV")->expected(1);
    spacing_opt = c->add_option("--spacing-default", spacing_default, "m/px when a row has no spacing_m");
    c->callback([&] {
      action = [&] {
        EvaluateArgs a;
        a.manifest = manifest;
        if (pred_dir_opt->count()) a.pred_dir = str_a;
        a.method = str_b;
        a.out = out_flag;
        if (summary_opt->count()) a.summary = list_a.front();
        if (spacing_opt->count()) a.spacing_default = spacing_default;
        cmd_evaluate(a, con);
      };
    });
  }
  {
    auto* c = app.add_subcommand("compare-stats", "Kruskal-Wallis and Dunn-Bonferroni across methods");
    auto& flags = flag_sets[c->get_name()];
    c->add_option("--metrics", list_a, "Per-image metrics CSVs")->required();
    c->add_option("--out", out_flag, "Significance CSV")->required();
    flags.add_config(c);
    flags.add_alpha(c);
    c->callback([&] {
      action = [&] {
        std::vector<fs::path> files(list_a.begin(), list_a.end());
        cmd_compare_stats({files, out_flag}, flags.resolve(), con);
      };
    });
  }
  {
    auto* c = app.add_subcommand("uncertainty", "TTA uncertainty maps from probability maps");
    auto& flags = flag_sets[c->get_name()];
    c->add_option("--manifest", manifest, "id,path,transform")->required();
    c->add_option("--out", out_flag, "Output directory")->required();
    flags.add_config(c);
    flags.add_statistic(c);
    c->callback([&] { action = [&] { cmd_uncertainty({manifest, out_flag}, flags.resolve(), con); }; });
  }
  {
    auto* c = app.add_subcommand("report", "Render summary CSVs as result tables");
    c->add_option("--summary", list_a, "Summary CSVs")->required();
    c->add_option("--out", out_flag, "Text report")->required();
    csv_opt = c->add_option("--csv", str_a, "CSV copy of the tables");
    c->callback([&] {
      action = [&] {
        ReportArgs a;
        a.summaries.assign(list_a.begin(), list_a.end());
        a.out = out_flag;
        if (csv_opt->count()) a.csv = str_a;
        cmd_report(a, con);
      };
    });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << app.version() << "\n";
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "mammopipe: usage error: " << e.what() << "\n";
    err << "run 'mammopipe --help' for usage\n";
    return kExitUsage;
  }

  try {
    if (action) action();
    return kExitOk;
  } catch (const UsageError& e) {
    err << "mammopipe: usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "mammopipe: error: " << e.what() << "\n";
    return kExitFailure;
  }
}

}  // namespace mammopipe::cli
