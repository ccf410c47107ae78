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

#include "commands.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <set>
#include <stdexcept>

#include "mammopipe/augment.hpp"
#include "mammopipe/io/atomic_file.hpp"
#include "mammopipe/io/csv.hpp"
#include "mammopipe/io/manifest.hpp"
#include "mammopipe/io/png.hpp"
#include "mammopipe/io/tables.hpp"
#include "mammopipe/metrics.hpp"
#include "mammopipe/parallel.hpp"
#include "mammopipe/preprocess.hpp"
#include "mammopipe/rasterize.hpp"
#include "mammopipe/stats.hpp"
#include "mammopipe/style_proxy.hpp"
#include "mammopipe/uncertainty.hpp"

namespace mammopipe::cli {

using io::IoError;

namespace {

// Ids become file names, so keep them to a portable character set.
void check_id(const std::string& id, const std::string& where) {
  const bool ok = !id.empty() && id != "." && id != ".." &&
                  std::all_of(id.begin(), id.end(), [](unsigned char c) {
                    return std::isalnum(c) || c == '-' || c == '_' || c == '.';
                  });
  if (!ok) throw IoError(where + ": id '" + id + "' must use only letters, digits, '-', '_' or '.'");
}

template <typename Row>
void check_ids(const std::vector<Row>& rows) {
  for (const auto& r : rows) check_id(r.id, r.where);
}

/// Runs fn over every row in parallel. Any failure is rethrown as an IoError
/// naming the manifest row; the lowest failing row wins so the message does
/// not depend on scheduling.
template <typename Row, typename Fn>
void for_each_row(const std::vector<Row>& rows, Fn&& fn) {
  parallel_for(rows.size(), [&](std::size_t i) {
    try {
      fn(i);
    } catch (const std::exception& e) {
      throw IoError(rows[i].where + " (id '" + rows[i].id + "'): " + e.what());
    }
  });
}

LabelMap load_labels(const fs::path& path, int width, int height) {
  LabelMap labels;
  if (path.extension() == ".json") {
    labels = rasterize_polygons(io::read_polygons(path), width, height);
  } else {
    labels = io::read_png_labels(path);
  }
  if (!labels.same_shape(width, height)) {
    throw IoError(path.string() + ": label map is " + std::to_string(labels.width()) + "x" +
                  std::to_string(labels.height()) + ", image is " + std::to_string(width) + "x" +
                  std::to_string(height));
  }
  return labels;
}

std::optional<io::Sidecar> sidecar_for(const fs::path& image) {
  fs::path side = image;
  side.replace_extension(".json");
  if (!fs::exists(side)) return std::nullopt;
  return io::read_sidecar(side);
}

BinaryMask foreground_of(const LabelMap& labels) {
  BinaryMask m(labels.width(), labels.height(), 0);
  for (std::size_t i = 0; i < labels.size(); ++i) m[i] = labels[i] != ClassId::background;
  return m;
}

void report_written(Console& con, const std::string& what, std::size_t n, const fs::path& where) {
  con.out << what << ": " << n << " -> " << where.string() << "\n";
}

}  // namespace

void cmd_preprocess(const PreprocessArgs& a, const io::RunConfig& cfg, Console& con) {
  auto rows = io::read_manifest(a.manifest);
  check_ids(rows);
  std::vector<io::ManifestRow> out_rows(rows.size());
  std::vector<char> degenerate(rows.size(), 0);

  for_each_row(rows, [&](std::size_t i) {
    const auto& r = rows[i];
    auto side = sidecar_for(r.image);
    RawImage raw = io::load_raw_image(r.image, side);
    if (r.window_center) raw.window_center = r.window_center;
    if (r.window_width) raw.window_width = r.window_width;

    std::optional<LabelMap> labels;
    if (!r.labels.empty()) labels = load_labels(r.labels, raw.width(), raw.height());

    PipelineSpec spec = PipelineSpec::for_vendor(r.vendor);
    spec.clahe.clip_limit = cfg.clahe_clip_limit;
    spec.low_percentile = cfg.low_percentile;
    spec.high_percentile = cfg.high_percentile;

    SampleInfo info;
    info.vendor = r.vendor;
    info.laterality = r.laterality;
    info.view = r.view;
    info.spacing_m = r.spacing_m ? r.spacing_m : (side ? side->spacing_m : std::nullopt);
    const PipelineResult res = run_pipeline(raw, spec, info, labels);
    degenerate[i] = res.degenerate;

    io::ManifestRow o;
    o.id = r.id;
    o.image = a.out / "images" / (r.id + ".png");
    io::write_png_gray(o.image, res.sample.image);
    if (labels) {
      o.labels = a.out / "labels" / (r.id + ".png");
      io::write_png_labels(o.labels, res.sample.labels);
    }
    if (a.unit_float) io::write_float_map(a.out / "float" / (r.id + ".bin"), to_unit_float(res.sample.image));

    io::Sidecar s;
    s.width = res.sample.image.width();
    s.height = res.sample.image.height();
    s.dtype = "uint8";
    s.vendor = r.vendor;
    s.laterality = res.sample.laterality;
    s.view = res.sample.view;
    s.spacing_m = info.spacing_m;
    s.degenerate = res.degenerate;
    io::write_sidecar(a.out / "images" / (r.id + ".json"), s);

    o.vendor = r.vendor;
    o.laterality = res.sample.laterality;
    o.view = res.sample.view;
    o.spacing_m = info.spacing_m;
    out_rows[i] = std::move(o);
  });

  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (degenerate[i]) con.err << "warning: " << rows[i].where << " (id '" << rows[i].id << "'): constant image, output is all zeros\n";
  }
  io::write_manifest(a.out / "manifest.csv", out_rows);
  report_written(con, "preprocessed", rows.size(), a.out / "manifest.csv");
}

void cmd_rasterize(const fs::path& polygons, int width, int height, const fs::path& out, Console& con) {
  if (width <= 0 || height <= 0) throw UsageError("--width and --height must be positive");
  const auto polys = io::read_polygons(polygons);
  LabelMap labels;
  try {
    labels = rasterize_polygons(polys, width, height);
  } catch (const std::invalid_argument& e) {
    throw IoError(polygons.string() + ": " + e.what());
  }
  io::write_png_labels(out, labels);
  report_written(con, "polygons", polys.size(), out);
}

void cmd_augment(const AugmentArgs& a, const io::RunConfig& cfg, Console& con) {
  auto rows = io::read_manifest(a.manifest);
  check_ids(rows);
  std::vector<io::ManifestRow> out_rows(rows.size());
  std::vector<std::string> degraded(rows.size());

  for_each_row(rows, [&](std::size_t i) {
    const auto& r = rows[i];
    if (r.labels.empty()) throw IoError("augmentation needs a label map");
    const GrayImage img = io::read_png_gray(r.image);
    const LabelMap labels = load_labels(r.labels, img.width(), img.height());
    SeededRng rng = SeededRng::for_sample(cfg.seed, r.id);
    const ManipulationOutcome res = manipulate(img, ManipulationMasks::from_labels(labels), rng);
    if (res.degraded) degraded[i] = res.degraded_reason;

    io::ManifestRow o = r;
    o.image = a.out / "images" / (r.id + ".png");
    o.labels = a.out / "labels" / (r.id + ".png");
    io::write_png_gray(o.image, res.image);
    io::write_png_labels(o.labels, labels);
    io::write_text_file(a.out / "outcomes" / (r.id + ".json"), io::outcome_json(res, cfg.seed, r.id));
    out_rows[i] = std::move(o);
  });

  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (!degraded[i].empty()) con.err << "warning: " << rows[i].where << " (id '" << rows[i].id << "'): " << degraded[i] << "\n";
  }
  io::write_manifest(a.out / "manifest.csv", out_rows);
  report_written(con, "augmented", rows.size(), a.out / "manifest.csv");
}

void cmd_stylize_post(const StylizePostArgs& a, Console& con) {
  auto rows = io::read_manifest(a.manifest);
  check_ids(rows);
  std::vector<io::ManifestRow> out_rows(rows.size());
  for_each_row(rows, [&](std::size_t i) {
    const auto& r = rows[i];
    if (r.labels.empty()) throw IoError("background removal needs a label map");
    const ColorImage styl = io::read_png_color(r.image);
    const LabelMap labels = load_labels(r.labels, kModelInputSize, kModelInputSize);
    io::ManifestRow o = r;
    o.image = a.out / "images" / (r.id + ".png");
    io::write_png_gray(o.image, postprocess_stylized(styl, labels));
    out_rows[i] = std::move(o);
  });
  io::write_manifest(a.out / "manifest.csv", out_rows);
  report_written(con, "post-processed", rows.size(), a.out / "manifest.csv");
}

void cmd_style_bank(const StyleBankArgs& a, Console& con) {
  auto rows = io::read_manifest(a.manifest);
  std::vector<Histogram256> hists(rows.size());
  for_each_row(rows, [&](std::size_t i) {
    const GrayImage img = io::read_png_gray(rows[i].image);
    BinaryMask fg;
    if (!rows[i].labels.empty()) fg = foreground_of(load_labels(rows[i].labels, img.width(), img.height()));
    hists[i] = StyleBank::reference_histogram(img, fg);
  });

  // Several references for one vendor are averaged with equal weight.
  std::map<std::string, std::pair<Histogram256, int>> acc;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    auto& [h, n] = acc[std::string(to_string(rows[i].vendor))];
    for (std::size_t b = 0; b < 256; ++b) h[b] += hists[i][b];
    ++n;
  }
  StyleBank bank;
  for (auto& [name, hn] : acc) {
    Histogram256 h = hn.first;
    for (double& v : h) v /= hn.second;
    bank.styles[name] = h;
  }
  bank.validate();
  io::write_style_bank(a.out, bank);
  report_written(con, "styles", bank.styles.size(), a.out);
}

void cmd_style_apply(const StyleApplyArgs& a, Console& con) {
  const StyleBank bank = io::read_style_bank(a.bank);
  if (!bank.styles.count(a.style)) {
    throw IoError(a.bank.string() + ": no style named '" + a.style + "'");
  }
  const Histogram256& ref = bank.at(a.style);
  auto rows = io::read_manifest(a.manifest);
  check_ids(rows);
  std::vector<io::ManifestRow> out_rows(rows.size());
  for_each_row(rows, [&](std::size_t i) {
    const auto& r = rows[i];
    const GrayImage img = io::read_png_gray(r.image);
    BinaryMask fg(img.width(), img.height(), 1);
    if (!r.labels.empty()) fg = foreground_of(load_labels(r.labels, img.width(), img.height()));
    io::ManifestRow o = r;
    o.image = a.out / "images" / (r.id + ".png");
    io::write_png_gray(o.image, histogram_match(img, ref, fg));
    out_rows[i] = std::move(o);
  });
  io::write_manifest(a.out / "manifest.csv", out_rows);
  report_written(con, "restyled as " + a.style, rows.size(), a.out / "manifest.csv");
}

void cmd_mix(const MixArgs& a, const io::RunConfig& cfg, Console& con) {
  std::map<SourceCategory, std::vector<io::ManifestRow>> sources;
  for (const auto& spec : a.sources) {
    const auto eq = spec.find('=');
    if (eq == std::string::npos) throw UsageError("--source expects CATEGORY=manifest.csv, got '" + spec + "'");
    SourceCategory c;
    try {
      c = parse_source_category(spec.substr(0, eq));
    } catch (const std::invalid_argument& e) {
      throw UsageError(std::string("--source: ") + e.what());
    }
    if (sources.count(c)) throw UsageError("--source given twice for " + std::string(to_string(c)));
    auto rows = io::read_manifest(spec.substr(eq + 1));
    if (rows.empty()) throw IoError(spec.substr(eq + 1) + ": manifest has no rows");
    sources[c] = std::move(rows);
  }

  using Stream = MixStream<const io::ManifestRow*>;
  std::map<SourceCategory, Stream::Provider> providers;
  for (const auto& [c, rows] : sources) {
    const auto* r = &rows;
    providers[c] = [r](std::uint64_t idx) { return &(*r)[idx % r->size()]; };
  }
  Stream stream(providers, cfg.policy, SeededRng::for_sample(cfg.seed, "mix"));

  const fs::path base = fs::absolute(a.out).parent_path();
  auto rel = [&](const fs::path& p) { return p.empty() ? std::string() : p.lexically_relative(base).generic_string(); };
  io::CsvWriter w("mammopipe.mix v1", {"position", "category", "index", "id", "image", "labels"});
  for (std::size_t i = 0; i < a.count; ++i) {
    const auto item = stream.next();
    w.add_row({std::to_string(i), std::string(to_string(item.category)), std::to_string(item.index),
               item.sample->id, rel(item.sample->image), rel(item.sample->labels)});
  }
  io::write_text_file(a.out, w.str());
  report_written(con, "stream items", a.count, a.out);
}

void cmd_evaluate(const EvaluateArgs& a, Console& con) {
  const double fallback = a.spacing_default.value_or(kDefaultSpacingM);
  if (!(fallback > 0.0)) throw UsageError("--spacing-default must be positive");

  std::vector<io::EvalRow> rows;
  const io::CsvTable probe = io::read_csv(a.manifest);
  if (probe.column("pred_path")) {
    rows = io::read_eval_manifest(a.manifest);
  } else {
    if (!a.pred_dir) throw IoError(a.manifest.string() + ": no pred_path column; pass --pred-dir");
    for (const auto& r : io::read_manifest(a.manifest)) {
      if (r.labels.empty()) throw IoError(r.where + " (id '" + r.id + "'): no ground-truth labels");
      rows.push_back({r.id, *a.pred_dir / (r.id + ".png"), r.labels, r.spacing_m, r.where});
    }
  }
  check_ids(rows);

  std::vector<MetricRecord> records(rows.size());
  for_each_row(rows, [&](std::size_t i) {
    const auto& r = rows[i];
    const LabelMap gt = io::read_png_labels(r.gt);
    const LabelMap pred = io::read_png_labels(r.pred);
    if (!pred.same_shape(gt)) {
      throw IoError(r.pred.string() + ": prediction size differs from " + r.gt.string());
    }
    records[i] = evaluate_pair(r.id, pred, gt, r.spacing_m.value_or(fallback));
    records[i].spacing_assumed = !r.spacing_m.has_value();
  });

  std::sort(records.begin(), records.end(),
            [](const MetricRecord& x, const MetricRecord& y) { return x.image_id < y.image_id; });
  const auto assumed = std::count_if(records.begin(), records.end(), [](const auto& r) { return r.spacing_assumed; });
  if (assumed > 0) con.err << "warning: " << assumed << " image(s) without spacing_m use " << fallback << " m/px\n";

  io::write_text_file(a.out, io::metrics_csv(a.method, records));
  fs::path summary = a.summary.value_or(fs::path(a.out).replace_extension().concat("_summary.csv"));
  io::write_text_file(summary, io::summary_csv({{a.method, aggregate(records)}}));
  report_written(con, "evaluated", records.size(), a.out);
  report_written(con, "summary", 1, summary);
}

void cmd_compare_stats(const CompareArgs& a, const io::RunConfig& cfg, Console& con) {
  std::vector<stats::MethodRecords> methods;
  std::map<std::string, fs::path> seen;
  for (const auto& path : a.metrics) {
    for (auto& m : io::read_metrics_csv(path)) {
      auto [it, fresh] = seen.emplace(m.method, path);
      if (!fresh) {
        throw IoError(path.string() + ": method '" + m.method + "' already read from " + it->second.string());
      }
      methods.push_back(std::move(m));
    }
  }
  if (methods.size() < 2) throw UsageError("compare-stats needs at least two methods");
  if (!(cfg.alpha > 0.0 && cfg.alpha <= 1.0)) throw UsageError("--alpha must be in (0, 1]");
  stats::SignificanceReport rep;
  try {
    rep = stats::significance_table(methods, cfg.alpha);
  } catch (const std::invalid_argument& e) {
    std::string files;
    for (const auto& p : a.metrics) files += (files.empty() ? "" : ", ") + p.string();
    throw IoError(files + ": " + e.what());
  }
  io::write_text_file(a.out, io::significance_csv(rep));
  std::size_t pairs = 0;
  for (const auto& e : rep.entries) pairs += e.pairs.size();
  report_written(con, "significant pairs", pairs, a.out);
}

void cmd_uncertainty(const UncertaintyArgs& a, const io::RunConfig& cfg, Console& con) {
  const io::CsvTable t = io::read_csv(a.manifest);
  t.require_column("id");
  t.require_column("path");
  t.require_column("transform");
  const fs::path base = fs::absolute(a.manifest).parent_path();

  struct Group {
    std::string id;
    std::string where;
    std::vector<std::pair<fs::path, TtaTransform>> maps;
  };
  std::vector<Group> groups;
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const std::string id = t.get(i, "id");
    check_id(id, t.where(i));
    auto [it, fresh] = index.try_emplace(id, groups.size());
    if (fresh) groups.push_back({id, t.where(i), {}});
    fs::path p = t.get(i, "path");
    if (p.is_relative()) p = (base / p).lexically_normal();
    try {
      groups[it->second].maps.emplace_back(p, TtaTransform::parse(t.get(i, "transform")));
    } catch (const std::invalid_argument& e) {
      throw IoError(t.where(i) + ": " + e.what());
    }
  }

  std::vector<std::size_t> clipped(groups.size(), 0);
  for_each_row(groups, [&](std::size_t g) {
    std::vector<ProbMap> aligned;
    for (const auto& [path, tf] : groups[g].maps) {
      ProbMap m = io::read_prob_map(path);
      try {
        m.validate(1e-4);
      } catch (const std::invalid_argument& e) {
        throw IoError(path.string() + ": " + e.what());
      }
      aligned.push_back(align(m, tf));
    }
    const FloatImage u = uncertainty_map(aligned, cfg.tta_statistic);
    io::write_float_map(a.out / (groups[g].id + ".bin"), u);
    io::write_png_rgb(a.out / (groups[g].id + "_hot.png"), render_hot(u, &clipped[g]));
  });
  for (std::size_t g = 0; g < groups.size(); ++g) {
    if (clipped[g]) con.err << "warning: " << groups[g].id << ": " << clipped[g] << " values outside [0,1] clipped\n";
  }
  report_written(con, "uncertainty maps", groups.size(), a.out);
}

void cmd_report(const ReportArgs& a, Console& con) {
  std::vector<io::MethodSummary> all;
  for (const auto& p : a.summaries) {
    for (auto& s : io::read_summary_csv(p)) all.push_back(std::move(s));
  }
  if (all.empty()) throw IoError("no summary rows in the given files");
  const auto rep = io::render_report(all);
  io::write_text_file(a.out, rep.text);
  const fs::path csv = a.csv.value_or(fs::path(a.out).replace_extension(".csv"));
  io::write_text_file(csv, rep.csv);
  report_written(con, "methods", all.size(), a.out);
}

}  // namespace mammopipe::cli
