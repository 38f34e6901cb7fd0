// Copyright 2026 The RegNet Authors
// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// regnet-cli: operator assembly, phantom generation, training and
// experiments. Talks to the library only through the C interface.

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "regnet/regnet.h"

namespace fs = std::filesystem;

namespace {

// Carries the exit code of a failed step.
class CliError : public std::runtime_error {
 public:
  CliError(int code, const std::string& message) : std::runtime_error(message), code_(code) {}
  int code() const { return code_; }

 private:
  int code_;
};

void check(rgn_status status, const std::string& what) {
  if (status != RGN_OK) {
    throw CliError(static_cast<int>(status), what + ": " + rgn_last_error());
  }
}

[[noreturn]] void usage_error(const std::string& message) { throw CliError(1, message); }

template <typename T, void (*Free)(T*)>
struct Deleter {
  void operator()(T* p) const { Free(p); }
};
using OperatorPtr = std::unique_ptr<rgn_operator, Deleter<rgn_operator, rgn_operator_free>>;
using DatasetPtr = std::unique_ptr<rgn_dataset, Deleter<rgn_dataset, rgn_dataset_free>>;
using NetworkPtr = std::unique_ptr<rgn_network, Deleter<rgn_network, rgn_network_free>>;
using FamilyPtr = std::unique_ptr<rgn_family, Deleter<rgn_family, rgn_family_free>>;
using MethodPtr = std::unique_ptr<rgn_method, Deleter<rgn_method, rgn_method_free>>;
using ReportPtr = std::unique_ptr<rgn_report, Deleter<rgn_report, rgn_report_free>>;

std::string format_double(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, r.ptr);
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// Resolved key=value configuration. Every key has a default; files and
// flags may only set known keys.
class Config {
 public:
  Config() {
    values_ = {
        {"grid_side", "64"},        {"angles", "15"},
        {"detectors", "64"},        {"detector_min", "-1.5"},
        {"detector_max", "1.5"},    {"kb_support", "0.055"},
        {"kb_shape", "7"},          {"rank_tol", "1e-10"},
        {"filter", "tsvd"},         {"landweber_step", "0.25"},
        {"alphas", "0.3,0.2,0.1"},  {"deltas", "0.02,0.05"},
        {"variants", "nullspace,continued"},
        {"learning_rate", "0.05"},  {"momentum", "0.99"},
        {"epochs", "10"},           {"batch_size", "10"},
        {"width", "16"},            {"train_count", "200"},
        {"test_count", "50"},       {"validation_count", "10"},
        {"seed", "1"},              {"work_dir", "."},
        {"operator", "operator.rgn1"},
        {"train_set", "train.rgn1"},
        {"test_set", "test.rgn1"},  {"models_dir", "models"},
        {"out_dir", "results"},     {"mu", "0.5"},
        {"rho", "1"},               {"rate_scale", "1"},
        {"rate_deltas", "1e-5,1.778e-5,3.162e-5,5.623e-5,1e-4,1.778e-4,3.162e-4,5.623e-4,"
                        "1e-3,1.778e-3,3.162e-3,5.623e-3,1e-2,1.778e-2,3.162e-2,5.623e-2,1e-1"},
        {"image_index", "0"},       {"reconstruct_delta", "0.05"},
        {"distfn_variant", "classical"},
        {"filter_alphas", "1e-1,1e-2,1e-3,1e-4,1e-5,1e-6"},
        {"filter_mus", "0.25,0.5,1"},
        {"lambda_max", "1"},
    };
  }

  void apply_paper_scale() {
    values_["grid_side"] = "128";
    values_["angles"] = "30";
    values_["detectors"] = "200";
    values_["train_count"] = "1000";
    values_["test_count"] = "250";
    values_["alphas"] =
        "1,0.7,0.5,0.3,0.2,0.15,0.1,0.07,0.05,0.03,0.02,0.01,0.005,0.002,0.001";
  }

  void set(const std::string& key, const std::string& value, const std::string& origin) {
    if (values_.find(key) == values_.end()) {
      usage_error(origin + ": unknown configuration key '" + key + "'");
    }
    values_[key] = value;
  }

  void load_file(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw CliError(3, "cannot open config file '" + path.string() + "'");
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      line = trim(line);
      if (line.empty() || line[0] == '#') continue;
      const auto eq = line.find('=');
      if (eq == std::string::npos) {
        usage_error(path.string() + ":" + std::to_string(line_no) + ": expected key=value");
      }
      set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)),
          path.string() + ":" + std::to_string(line_no));
    }
  }

  const std::string& str(const std::string& key) const { return values_.at(key); }

  double real(const std::string& key) const {
    const std::string& s = str(key);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) {
      usage_error("configuration key '" + key + "': '" + s + "' is not a number");
    }
    return v;
  }

  std::uint64_t integer(const std::string& key) const {
    const std::string& s = str(key);
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
      usage_error("configuration key '" + key + "': '" + s + "' is not a non-negative integer");
    }
    return v;
  }

  std::vector<double> reals(const std::string& key) const {
    std::vector<double> out;
    std::stringstream ss(str(key));
    for (std::string item; std::getline(ss, item, ',');) {
      item = trim(item);
      if (item.empty()) continue;
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
      if (ec != std::errc() || ptr != item.data() + item.size() || !std::isfinite(v)) {
        usage_error("configuration key '" + key + "': '" + item + "' is not a number");
      }
      out.push_back(v);
    }
    return out;
  }

  std::vector<std::string> words(const std::string& key) const {
    std::vector<std::string> out;
    std::stringstream ss(str(key));
    for (std::string item; std::getline(ss, item, ',');) {
      item = trim(item);
      if (!item.empty()) out.push_back(item);
    }
    return out;
  }

  fs::path path(const std::string& key) const {
    const fs::path p(str(key));
    return p.is_absolute() ? p : fs::path(str("work_dir")) / p;
  }

  // Sorted key=value lines; the hash identifies the run configuration.
  std::string canonical() const {
    std::string out;
    for (const auto& [k, v] : values_) out += k + "=" + v + "\n";
    return out;
  }

  std::string hash_hex() const {
    const std::string c = canonical();
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(rgn_hash64(c.data(), c.size())));
    return buf;
  }

 private:
  std::map<std::string, std::string> values_;
};

struct Context {
  Config config;
  std::string command;

  // First line of every artifact.
  std::string stamp() const {
    return "config_hash=" + config.hash_hex() + " seed=" + config.str("seed") +
           " command=" + command;
  }
  std::uint64_t seed() const { return config.integer("seed"); }
};

constexpr std::uint64_t kSplitStride = 1000000;

rgn_geometry geometry_of(const Config& c) {
  rgn_geometry g;
  rgn_geometry_default(&g, 0);
  g.grid_side = c.integer("grid_side");
  g.angles = c.integer("angles");
  g.detectors = c.integer("detectors");
  g.detector_min = c.real("detector_min");
  g.detector_max = c.real("detector_max");
  g.kb_support = c.real("kb_support");
  g.kb_shape = c.real("kb_shape");
  return g;
}

rgn_filter_spec filter_of(const Config& c) {
  rgn_filter_spec f;
  check(rgn_parse_filter(c.str("filter").c_str(), c.real("landweber_step"), &f), "filter");
  return f;
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw CliError(3, "cannot create directory '" + dir.string() + "': " + ec.message());
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw CliError(3, "cannot open '" + path.string() + "' for writing");
  out << text;
  out.close();
  if (!out) throw CliError(3, "error writing '" + path.string() + "'");
}

std::string report_text(const rgn_report* report, rgn_text_kind kind, const std::string& comment) {
  std::size_t needed = 0;
  check(rgn_report_text(report, kind, comment.c_str(), nullptr, 0, &needed), "report");
  std::string buf(needed, '\0');
  check(rgn_report_text(report, kind, comment.c_str(), buf.data(), buf.size(), &needed), "report");
  buf.resize(needed - 1);
  return buf;
}

OperatorPtr load_operator(const Context& ctx) {
  rgn_operator* op = nullptr;
  check(rgn_operator_load(ctx.config.path("operator").string().c_str(),
                          ctx.config.real("rank_tol"), &op),
        "load operator");
  return OperatorPtr(op);
}

DatasetPtr load_dataset(const Context& ctx, const std::string& key) {
  rgn_dataset* ds = nullptr;
  check(rgn_dataset_load(ctx.config.path(key).string().c_str(), &ds), "load " + key);
  return DatasetPtr(ds);
}

std::vector<double> image(const rgn_dataset* ds, std::size_t index) {
  std::size_t count = 0, pixels = 0;
  check(rgn_dataset_shape(ds, &count, &pixels), "dataset");
  std::vector<double> out(pixels);
  check(rgn_dataset_image(ds, index, out.data(), out.size()), "dataset image");
  return out;
}

fs::path manifest_path(const Context& ctx, const std::string& variant) {
  return ctx.config.path("models_dir") / (variant + ".manifest");
}

rgn_variant variant_of(const std::string& name) {
  rgn_variant v;
  check(rgn_parse_variant(name.c_str(), &v), "variant");
  return v;
}

// One method per alpha: classical methods over the configured alphas,
// learned methods over their manifest.
struct MethodSet {
  std::string name;
  std::vector<MethodPtr> methods;
  FamilyPtr family;
};

MethodSet build_methods(const Context& ctx, const rgn_operator* op, const std::string& variant) {
  MethodSet set;
  set.name = variant == "classical" ? ctx.config.str("filter") : variant;
  const rgn_filter_spec filter = filter_of(ctx.config);
  const rgn_variant v = variant_of(variant);
  if (v == RGN_VARIANT_CLASSICAL) {
    for (double a : ctx.config.reals("alphas")) {
      rgn_method* m = nullptr;
      check(rgn_method_create(op, v, &filter, a, nullptr, &m), "method");
      set.methods.emplace_back(m);
    }
    return set;
  }
  rgn_family* family = nullptr;
  check(rgn_family_load(manifest_path(ctx, variant).string().c_str(), &family),
        "load " + variant + " models (run 'train' first)");
  set.family.reset(family);
  for (std::size_t k = 0; k < rgn_family_size(family); ++k) {
    rgn_method* m = nullptr;
    check(rgn_method_create(op, v, &filter, rgn_family_alpha(family, k),
                            rgn_family_network(family, k), &m),
          "method");
    set.methods.emplace_back(m);
  }
  return set;
}

ReportPtr evaluate(const MethodSet& set, const rgn_dataset* ds, std::size_t first,
                   std::size_t count, double delta, std::uint64_t seed) {
  std::vector<const rgn_method*> raw;
  for (const MethodPtr& m : set.methods) raw.push_back(m.get());
  rgn_report* report = nullptr;
  check(rgn_evaluate(raw.data(), raw.size(), ds, first, count, delta, seed, &report),
        "evaluate " + set.name);
  return ReportPtr(report);
}

std::vector<std::string> evaluated_variants(const Context& ctx) {
  std::vector<std::string> out{"classical"};
  for (const std::string& v : ctx.config.words("variants")) {
    if (v != "classical") out.push_back(v);
  }
  return out;
}

// Noise seeds for the test split; validation images are the first
// validation_count test images.
std::uint64_t noise_seed(const Context& ctx, double delta) {
  return ctx.seed() * kSplitStride + 3 * kSplitStride / 4 +
         static_cast<std::uint64_t>(std::llround(delta * 1e6));
}

double select_alpha(const Context& ctx, const MethodSet& set, const rgn_dataset* test,
                    double delta) {
  std::size_t count = 0;
  check(rgn_dataset_shape(test, &count, nullptr), "dataset");
  const std::size_t n = std::min<std::size_t>(ctx.config.integer("validation_count"), count);
  if (n == 0) usage_error("validation subset is empty");
  ReportPtr report = evaluate(set, test, 0, n, delta, noise_seed(ctx, delta));
  double best = 0.0;
  check(rgn_report_best_alpha(report.get(), &best), "select alpha");
  return best;
}

int cmd_assemble(Context& ctx) {
  const rgn_geometry g = geometry_of(ctx.config);
  rgn_operator* raw = nullptr;
  check(rgn_operator_assemble(&g, ctx.config.real("rank_tol"), &raw), "assemble");
  OperatorPtr op(raw);
  std::size_t rows = 0, cols = 0, rank = 0;
  check(rgn_operator_shape(op.get(), &rows, &cols, &rank), "operator");
  const fs::path out = ctx.config.path("operator");
  ensure_dir(out.parent_path().empty() ? fs::path(".") : out.parent_path());
  const std::string meta = ctx.stamp() + "\n" + ctx.config.canonical();
  check(rgn_operator_save(op.get(), out.string().c_str(), meta.c_str()), "save operator");
  std::cout << "operator " << rows << "x" << cols << " rank " << rank << " -> " << out.string()
            << "\n";
  return 0;
}

int cmd_phantoms(Context& ctx) {
  const std::size_t side = ctx.config.integer("grid_side");
  const std::uint64_t base = ctx.seed() * kSplitStride;
  const struct {
    const char* key;
    const char* count_key;
    std::uint64_t first;
  } splits[] = {{"train_set", "train_count", base}, {"test_set", "test_count", base + kSplitStride / 2}};
  for (const auto& s : splits) {
    const std::uint64_t count = ctx.config.integer(s.count_key);
    if (count > kSplitStride / 2) usage_error(std::string(s.count_key) + " exceeds 500000");
    rgn_dataset* raw = nullptr;
    check(rgn_dataset_generate(side, count, s.first, &raw), "generate phantoms");
    DatasetPtr ds(raw);
    const fs::path out = ctx.config.path(s.key);
    ensure_dir(out.parent_path().empty() ? fs::path(".") : out.parent_path());
    const std::string meta = ctx.stamp() + "\nfirst_seed=" + std::to_string(s.first) +
                             "\ncount=" + std::to_string(count) + "\n";
    check(rgn_dataset_save(ds.get(), out.string().c_str(), meta.c_str()), "save phantoms");
    std::cout << count << " phantoms (seeds " << s.first << "..) -> " << out.string() << "\n";
  }
  return 0;
}

void log_epoch(std::size_t epoch, double loss, void* user) {
  const auto* label = static_cast<const std::string*>(user);
  std::cout << *label << " epoch " << epoch + 1 << " loss " << format_double(loss) << "\n"
            << std::flush;
}

int cmd_train(Context& ctx) {
  OperatorPtr op = load_operator(ctx);
  DatasetPtr train = load_dataset(ctx, "train_set");
  const rgn_filter_spec filter = filter_of(ctx.config);
  rgn_train_options opts;
  rgn_train_options_default(&opts);
  opts.learning_rate = ctx.config.real("learning_rate");
  opts.momentum = ctx.config.real("momentum");
  opts.epochs = ctx.config.integer("epochs");
  opts.batch_size = ctx.config.integer("batch_size");
  opts.width = ctx.config.integer("width");
  opts.init_seed = ctx.seed();
  opts.shuffle_seed = ctx.seed() + 1;

  std::vector<double> alphas = ctx.config.reals("alphas");
  std::sort(alphas.begin(), alphas.end(), std::greater<>());
  if (alphas.empty()) usage_error("no regularization parameters given");
  const fs::path dir = ctx.config.path("models_dir");
  ensure_dir(dir);
  for (const std::string& variant : ctx.config.words("variants")) {
    const rgn_variant v = variant_of(variant);
    if (v == RGN_VARIANT_CLASSICAL) continue;
    std::vector<std::string> files;
    for (std::size_t k = 0; k < alphas.size(); ++k) {
      std::string label = variant + " alpha=" + format_double(alphas[k]);
      rgn_network* raw = nullptr;
      check(rgn_train(op.get(), train.get(), v, &filter, alphas[k], &opts, log_epoch,
                      &label, &raw),
            "train " + label);
      NetworkPtr net(raw);
      double lip = 0.0;
      check(rgn_network_lipschitz(net.get(), &lip), "lipschitz");
      std::cout << label << " lipschitz_bound " << format_double(lip) << "\n";
      files.push_back(variant + "_" + std::to_string(k) + ".rgnn");
      const std::string meta = ctx.stamp() + "\nvariant=" + variant +
                               "\nalpha=" + format_double(alphas[k]) + "\n";
      check(rgn_network_save(net.get(), (dir / files.back()).string().c_str(), meta.c_str()),
            "save model");
    }
    std::vector<const char*> names;
    for (const std::string& f : files) names.push_back(f.c_str());
    check(rgn_manifest_write(manifest_path(ctx, variant).string().c_str(), alphas.data(),
                             names.data(), names.size(), ctx.stamp().c_str()),
          "write manifest");
  }
  return 0;
}

int cmd_evaluate(Context& ctx) {
  OperatorPtr op = load_operator(ctx);
  DatasetPtr test = load_dataset(ctx, "test_set");
  std::size_t count = 0;
  check(rgn_dataset_shape(test.get(), &count, nullptr), "dataset");
  const fs::path dir = ctx.config.path("out_dir");
  ensure_dir(dir);
  std::string best = "# " + ctx.stamp() + "\n";
  for (const std::string& variant : evaluated_variants(ctx)) {
    const MethodSet set = build_methods(ctx, op.get(), variant);
    for (double delta : ctx.config.reals("deltas")) {
      ReportPtr report = evaluate(set, test.get(), 0, count, delta, noise_seed(ctx, delta));
      const std::string name = "eval_" + set.name + "_delta" + format_double(delta) + ".csv";
      write_file(dir / name, report_text(report.get(), RGN_TEXT_ALPHA_CSV,
                                         ctx.stamp() + " delta=" + format_double(delta)));
      const double alpha_star = select_alpha(ctx, set, test.get(), delta);
      std::size_t rows = rgn_report_alpha_rows(report.get());
      for (std::size_t r = 0; r < rows; ++r) {
        double a = 0.0, mse = 0.0, mae = 0.0;
        check(rgn_report_alpha_row(report.get(), r, &a, nullptr, &mse, &mae), "report");
        if (a == alpha_star) {
          best += set.name + "_delta" + format_double(delta) + "_alpha=" + format_double(a) +
                  "\n" + set.name + "_delta" + format_double(delta) +
                  "_mse=" + format_double(mse) + "\n" + set.name + "_delta" +
                  format_double(delta) + "_mae=" + format_double(mae) + "\n";
        }
      }
      std::cout << set.name << " delta=" << format_double(delta)
                << " alpha*=" << format_double(alpha_star) << " -> " << (dir / name).string()
                << "\n";
    }
  }
  write_file(dir / "best_alpha.txt", best);
  return 0;
}

int cmd_reconstruct(Context& ctx) {
  OperatorPtr op = load_operator(ctx);
  DatasetPtr test = load_dataset(ctx, "test_set");
  std::size_t count = 0, pixels = 0, rows = 0;
  check(rgn_dataset_shape(test.get(), &count, &pixels), "dataset");
  check(rgn_operator_shape(op.get(), &rows, nullptr, nullptr), "operator");
  const std::size_t index = ctx.config.integer("image_index");
  if (index >= count) usage_error("image_index is outside the test set");
  const double delta = ctx.config.real("reconstruct_delta");
  const std::size_t side = ctx.config.integer("grid_side");
  if (side * side != pixels) usage_error("grid_side does not match the test set");

  const std::vector<double> truth = image(test.get(), index);
  std::vector<double> clean(rows), noisy(rows);
  check(rgn_operator_forward(op.get(), truth.data(), truth.size(), clean.data(), clean.size()),
        "forward");
  check(rgn_add_noise(clean.data(), clean.size(), delta, noise_seed(ctx, delta) + index,
                      noisy.data()),
        "noise");

  const fs::path dir = ctx.config.path("out_dir");
  ensure_dir(dir);
  const std::string stamp = ctx.stamp() + "\nimage_index=" + std::to_string(index) +
                            "\ndelta=" + format_double(delta);
  check(rgn_write_pgm16((dir / "truth.pgm").string().c_str(), truth.data(), side, 1,
                        stamp.c_str()),
        "write image");
  for (const std::string& variant : evaluated_variants(ctx)) {
    const MethodSet set = build_methods(ctx, op.get(), variant);
    const double alpha_star = select_alpha(ctx, set, test.get(), delta);
    for (const MethodPtr& m : set.methods) {
      if (rgn_method_alpha(m.get()) != alpha_star) continue;
      std::vector<double> x(pixels);
      check(rgn_method_reconstruct(m.get(), noisy.data(), noisy.size(), x.data(), x.size()),
            "reconstruct");
      const fs::path out = dir / ("recon_" + set.name + ".pgm");
      const std::string comment = stamp + "\nmethod=" + set.name +
                                  "\nalpha=" + format_double(alpha_star);
      check(rgn_write_pgm16(out.string().c_str(), x.data(), side, 1, comment.c_str()),
            "write image");
      std::cout << set.name << " alpha*=" << format_double(alpha_star) << " -> " << out.string()
                << "\n";
    }
  }
  return 0;
}

int cmd_rates(Context& ctx) {
  OperatorPtr op = load_operator(ctx);
  const rgn_filter_spec filter = filter_of(ctx.config);
  const std::vector<double> deltas = ctx.config.reals("rate_deltas");
  const double mu = ctx.config.real("mu");
  rgn_report* raw = nullptr;
  check(rgn_rates_classical(op.get(), &filter, mu, ctx.config.real("rho"), deltas.data(),
                            deltas.size(), ctx.config.real("rate_scale"), ctx.seed(), &raw),
        "rates");
  ReportPtr report(raw);
  const fs::path dir = ctx.config.path("out_dir");
  ensure_dir(dir);
  write_file(dir / "rates.csv", report_text(report.get(), RGN_TEXT_RATE_CSV, ctx.stamp()));
  const std::string summary = report_text(report.get(), RGN_TEXT_SUMMARY, ctx.stamp()) +
                              "theory=" + format_double(2.0 * mu / (2.0 * mu + 1.0)) + "\n";
  write_file(dir / "rates_summary.txt", summary);
  std::cout << summary;
  return 0;
}

int cmd_distfn(Context& ctx) {
  OperatorPtr op = load_operator(ctx);
  std::size_t cols = 0;
  check(rgn_operator_shape(op.get(), nullptr, &cols, nullptr), "operator");
  const double mu = ctx.config.real("mu");
  const double rho = ctx.config.real("rho");
  std::vector<double> x(cols);
  check(rgn_operator_source_element(op.get(), mu, rho, ctx.seed(), x.data(), x.size()),
        "source element");
  const MethodSet set = build_methods(ctx, op.get(), ctx.config.str("distfn_variant"));
  std::string csv = "# " + ctx.stamp() + " mu=" + format_double(mu) + " rho=" +
                    format_double(rho) + "\nalpha,distance\n";
  for (const MethodPtr& m : set.methods) {
    double d = 0.0;
    check(rgn_method_distance(m.get(), x.data(), x.size(), mu, rho, &d), "distance");
    csv += format_double(rgn_method_alpha(m.get())) + "," + format_double(d) + "\n";
  }
  const fs::path dir = ctx.config.path("out_dir");
  ensure_dir(dir);
  write_file(dir / "distfn.csv", csv);
  std::cout << csv;
  return 0;
}

int cmd_checkfilter(Context& ctx) {
  const rgn_filter_spec filter = filter_of(ctx.config);
  std::vector<double> alphas = ctx.config.reals("filter_alphas");
  std::sort(alphas.begin(), alphas.end(), std::greater<>());
  const std::vector<double> mus = ctx.config.reals("filter_mus");
  int passed = 0;
  rgn_report* raw = nullptr;
  check(rgn_check_filter(&filter, ctx.config.real("lambda_max"), alphas.data(), alphas.size(),
                         mus.data(), mus.size(), &passed, &raw),
        "checkfilter");
  ReportPtr report(raw);
  const std::string text = report_text(report.get(), RGN_TEXT_SUMMARY, ctx.stamp());
  const fs::path dir = ctx.config.path("out_dir");
  ensure_dir(dir);
  write_file(dir / ("checkfilter_" + ctx.config.str("filter") + ".txt"), text);
  std::cout << text;
  return passed != 0 ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Regularizing networks for sparse-view tomography"};
  app.require_subcommand(1);
  std::string config_path;
  std::uint64_t seed = 0;
  std::string alpha_list, delta_list;
  bool paper_scale = false;
  std::vector<std::string> overrides;
  app.add_option("--config", config_path, "key=value configuration file");
  auto* seed_opt = app.add_option("--seed", seed, "master seed");
  app.add_option("--alpha", alpha_list, "comma-separated regularization parameters");
  app.add_option("--delta", delta_list, "comma-separated noise levels");
  app.add_flag("--paper-scale", paper_scale, "128x128 grid, 30 angles, 200 offsets, 1000/250 phantoms");
  app.add_option("--set", overrides, "override a configuration key (key=value)");

  const std::vector<std::pair<std::string, std::string>> commands = {
      {"assemble", "assemble the system matrix and its SVD"},
      {"phantoms", "generate training and test phantoms"},
      {"train", "train one network per variant and regularization parameter"},
      {"reconstruct", "reconstruct one noisy test image with every method"},
      {"evaluate", "error curves over the regularization parameter"},
      {"rates", "convergence-rate experiment for the classical filter"},
      {"distfn", "distance function over the regularization parameter"},
      {"checkfilter", "verify filter axioms and qualification"},
  };
  for (const auto& [name, help] : commands) app.add_subcommand(name, help);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  Context ctx;
  try {
    if (paper_scale) ctx.config.apply_paper_scale();
    if (!config_path.empty()) ctx.config.load_file(config_path);
    for (const std::string& o : overrides) {
      const auto eq = o.find('=');
      if (eq == std::string::npos) usage_error("--set expects key=value, got '" + o + "'");
      ctx.config.set(trim(o.substr(0, eq)), trim(o.substr(eq + 1)), "--set");
    }
    if (*seed_opt) ctx.config.set("seed", std::to_string(seed), "--seed");
    if (!alpha_list.empty()) ctx.config.set("alphas", alpha_list, "--alpha");
    ctx.command = app.get_subcommands().front()->get_name();
    if (!delta_list.empty()) {
      // The rate and reconstruction commands read their own delta keys.
      const char* key = ctx.command == "rates"         ? "rate_deltas"
                        : ctx.command == "reconstruct" ? "reconstruct_delta"
                                                       : "deltas";
      ctx.config.set(key, delta_list, "--delta");
    }

    if (ctx.command == "assemble") return cmd_assemble(ctx);
    if (ctx.command == "phantoms") return cmd_phantoms(ctx);
    if (ctx.command == "train") return cmd_train(ctx);
    if (ctx.command == "reconstruct") return cmd_reconstruct(ctx);
    if (ctx.command == "evaluate") return cmd_evaluate(ctx);
    if (ctx.command == "rates") return cmd_rates(ctx);
    if (ctx.command == "distfn") return cmd_distfn(ctx);
    if (ctx.command == "checkfilter") return cmd_checkfilter(ctx);
    usage_error("unknown command");
  } catch (const CliError& e) {
    std::cerr << "regnet-cli: " << e.what() << "\n";
    return e.code();
  }
}
