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

#include "regnet/regnet.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <limits>
#include <memory>
#include <new>
#include <string>
#include <utility>
#include <vector>

#include "regnet/analysis.hpp"
#include "regnet/error.hpp"
#include "regnet/filters.hpp"
#include "regnet/io.hpp"
#include "regnet/network.hpp"
#include "regnet/radon.hpp"
#include "regnet/regnet.hpp"

struct rgn_operator {
  std::shared_ptr<const regnet::SvdOperator> op;
};

struct rgn_dataset {
  std::size_t grid_side = 0;
  regnet::Matrix images;  // count x pixels
};

struct rgn_network {
  regnet::NetworkParams params;
};

struct rgn_family {
  std::vector<double> alphas;
  std::vector<std::unique_ptr<rgn_network>> networks;
};

struct rgn_method {
  regnet::ReconstructionMethod method;
};

struct rgn_report {
  regnet::ExperimentReport report;
  std::string summary;
};

namespace {

thread_local std::string g_last_error;

rgn_status fail(rgn_status code, std::string message) {
  g_last_error = std::move(message);
  return code;
}

template <typename F>
rgn_status guarded(F&& body) {
  try {
    body();
    return RGN_OK;
  } catch (const regnet::Error& e) {
    return fail(static_cast<rgn_status>(e.kind()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(RGN_ERR_NUMERIC, "out of memory");
  } catch (const std::exception& e) {
    return fail(RGN_ERR_NUMERIC, std::string("internal error: ") + e.what());
  }
}

void require(bool condition, const char* message) {
  if (!condition) throw regnet::UsageError(message);
}

regnet::RegularizingFilter to_filter(const rgn_filter_spec* spec) {
  require(spec != nullptr, "null filter spec");
  switch (spec->kind) {
    case RGN_FILTER_TIKHONOV: return regnet::RegularizingFilter::tikhonov();
    case RGN_FILTER_TSVD: return regnet::RegularizingFilter::truncated_svd();
    case RGN_FILTER_LANDWEBER: return regnet::RegularizingFilter::landweber(spec->landweber_step);
  }
  throw regnet::UsageError("unknown filter kind");
}

regnet::Variant to_variant(rgn_variant v) {
  switch (v) {
    case RGN_VARIANT_CLASSICAL: return regnet::Variant::kClassicalFilter;
    case RGN_VARIANT_NULLSPACE: return regnet::Variant::kNullSpaceRegNet;
    case RGN_VARIANT_CONTINUED: return regnet::Variant::kContinuedSvdRegNet;
  }
  throw regnet::UsageError("unknown method variant");
}

regnet::Vector copy_in(const double* data, std::size_t size, std::size_t expected,
                       const char* what) {
  require(data != nullptr || size == 0, "null input buffer");
  if (size != expected) {
    throw regnet::UsageError(std::string(what) + ": expected " + std::to_string(expected) +
                             " values, got " + std::to_string(size));
  }
  regnet::Vector v(static_cast<Eigen::Index>(size));
  if (size > 0) std::memcpy(v.data(), data, size * sizeof(double));
  return v;
}

void copy_out(const regnet::Vector& v, double* out, std::size_t size, const char* what) {
  require(out != nullptr || size == 0, "null output buffer");
  if (static_cast<std::size_t>(v.size()) != size) {
    throw regnet::UsageError(std::string(what) + ": output buffer holds " +
                             std::to_string(size) + " values, need " + std::to_string(v.size()));
  }
  if (size > 0) std::memcpy(out, v.data(), size * sizeof(double));
}

std::string opt_string(const char* s) { return s != nullptr ? std::string(s) : std::string(); }

regnet::RadonGeometry to_geometry(const rgn_geometry& g) {
  regnet::RadonGeometry geom;
  geom.grid_side = g.grid_side;
  geom.angles = g.angles;
  geom.detectors = g.detectors;
  geom.detector_min = g.detector_min;
  geom.detector_max = g.detector_max;
  geom.kb_support = g.kb_support;
  geom.kb_shape = g.kb_shape;
  return geom;
}

std::size_t side_of(std::size_t pixels) {
  const auto side = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(pixels))));
  if (side * side != pixels) throw regnet::UsageError("image size is not a square");
  return side;
}

}  // namespace

extern "C" {

const char* rgn_last_error(void) { return g_last_error.c_str(); }

const char* rgn_version(void) { return "0.1.0"; }

uint64_t rgn_hash64(const void* bytes, size_t size) {
  if (bytes == nullptr) return regnet::fnv1a64({});
  return regnet::fnv1a64(std::string_view(static_cast<const char*>(bytes), size));
}

rgn_status rgn_parse_variant(const char* name, rgn_variant* out) {
  return guarded([&] {
    require(name != nullptr && out != nullptr, "null argument");
    switch (regnet::parse_variant(name)) {
      case regnet::Variant::kClassicalFilter: *out = RGN_VARIANT_CLASSICAL; break;
      case regnet::Variant::kNullSpaceRegNet: *out = RGN_VARIANT_NULLSPACE; break;
      case regnet::Variant::kContinuedSvdRegNet: *out = RGN_VARIANT_CONTINUED; break;
    }
  });
}

rgn_status rgn_parse_filter(const char* name, double landweber_step, rgn_filter_spec* out) {
  return guarded([&] {
    require(name != nullptr && out != nullptr, "null argument");
    const regnet::RegularizingFilter f = regnet::RegularizingFilter::parse(name, landweber_step);
    rgn_filter_spec spec{};
    switch (f.kind()) {
      case regnet::FilterKind::kTikhonov: spec.kind = RGN_FILTER_TIKHONOV; break;
      case regnet::FilterKind::kTruncatedSvd: spec.kind = RGN_FILTER_TSVD; break;
      case regnet::FilterKind::kLandweber: spec.kind = RGN_FILTER_LANDWEBER; break;
    }
    spec.landweber_step = f.landweber_step();
    *out = spec;
  });
}

void rgn_geometry_default(rgn_geometry* geometry, int paper_scale) {
  if (geometry == nullptr) return;
  const regnet::RadonGeometry g =
      paper_scale != 0 ? regnet::RadonGeometry::paper_scale() : regnet::RadonGeometry::desk_scale();
  geometry->grid_side = g.grid_side;
  geometry->angles = g.angles;
  geometry->detectors = g.detectors;
  geometry->detector_min = g.detector_min;
  geometry->detector_max = g.detector_max;
  geometry->kb_support = g.kb_support;
  geometry->kb_shape = g.kb_shape;
}

rgn_status rgn_operator_assemble(const rgn_geometry* geometry, double rank_tol,
                                 rgn_operator** out) {
  return guarded([&] {
    require(geometry != nullptr && out != nullptr, "null argument");
    const regnet::Matrix a = regnet::assemble_matrix(to_geometry(*geometry));
    auto handle = std::make_unique<rgn_operator>();
    handle->op = std::make_shared<const regnet::SvdOperator>(
        regnet::SvdOperator::decompose(a, rank_tol));
    *out = handle.release();
  });
}

rgn_status rgn_operator_load(const char* path, double rank_tol, rgn_operator** out) {
  return guarded([&] {
    require(path != nullptr && out != nullptr, "null argument");
    auto handle = std::make_unique<rgn_operator>();
    handle->op = std::make_shared<const regnet::SvdOperator>(regnet::load_operator(path, rank_tol));
    *out = handle.release();
  });
}

rgn_status rgn_operator_save(const rgn_operator* op, const char* path, const char* metadata) {
  return guarded([&] {
    require(op != nullptr && path != nullptr, "null argument");
    regnet::save_operator(path, *op->op, opt_string(metadata));
  });
}

void rgn_operator_free(rgn_operator* op) { delete op; }

rgn_status rgn_operator_shape(const rgn_operator* op, size_t* rows, size_t* cols, size_t* rank) {
  return guarded([&] {
    require(op != nullptr, "null operator");
    if (rows != nullptr) *rows = op->op->rows();
    if (cols != nullptr) *cols = op->op->cols();
    if (rank != nullptr) *rank = op->op->rank();
  });
}

rgn_status rgn_operator_retained_count(const rgn_operator* op, double alpha, size_t* out) {
  return guarded([&] {
    require(op != nullptr && out != nullptr, "null argument");
    *out = op->op->retained_count(alpha);
  });
}

rgn_status rgn_operator_forward(const rgn_operator* op, const double* x, size_t x_size, double* y,
                                size_t y_size) {
  return guarded([&] {
    require(op != nullptr, "null operator");
    const regnet::Vector v = op->op->apply_forward(copy_in(x, x_size, op->op->cols(), "forward"));
    copy_out(v, y, y_size, "forward");
  });
}

rgn_status rgn_operator_source_element(const rgn_operator* op, double mu, double rho,
                                       uint64_t seed, double* x, size_t x_size) {
  return guarded([&] {
    require(op != nullptr, "null operator");
    copy_out(regnet::source_element(*op->op, {mu, rho}, seed), x, x_size, "source element");
  });
}

rgn_status rgn_dataset_generate(size_t grid_side, size_t count, uint64_t first_seed,
                                rgn_dataset** out) {
  return guarded([&] {
    require(out != nullptr, "null argument");
    require(grid_side >= 1, "grid side must be >= 1");
    auto ds = std::make_unique<rgn_dataset>();
    ds->grid_side = grid_side;
    ds->images.resize(static_cast<Eigen::Index>(count),
                      static_cast<Eigen::Index>(grid_side * grid_side));
    for (std::size_t k = 0; k < count; ++k) {
      ds->images.row(static_cast<Eigen::Index>(k)) =
          regnet::gen_phantom(first_seed + k, grid_side).coefficients.transpose();
    }
    *out = ds.release();
  });
}

rgn_status rgn_dataset_load(const char* path, rgn_dataset** out) {
  return guarded([&] {
    require(path != nullptr && out != nullptr, "null argument");
    regnet::ArrayRecord rec = regnet::read_container(path);
    auto ds = std::make_unique<rgn_dataset>();
    try {
      ds->grid_side = side_of(static_cast<std::size_t>(rec.matrix.cols()));
    } catch (const regnet::UsageError&) {
      throw regnet::IoError(std::string("'") + path + "' is not an image dataset");
    }
    ds->images = std::move(rec.matrix);
    *out = ds.release();
  });
}

rgn_status rgn_dataset_save(const rgn_dataset* dataset, const char* path, const char* metadata) {
  return guarded([&] {
    require(dataset != nullptr && path != nullptr, "null argument");
    regnet::ArrayRecord rec;
    rec.matrix = dataset->images;
    rec.metadata = opt_string(metadata);
    regnet::write_container(path, rec);
  });
}

void rgn_dataset_free(rgn_dataset* dataset) { delete dataset; }

rgn_status rgn_dataset_shape(const rgn_dataset* dataset, size_t* count, size_t* pixels) {
  return guarded([&] {
    require(dataset != nullptr, "null dataset");
    if (count != nullptr) *count = static_cast<std::size_t>(dataset->images.rows());
    if (pixels != nullptr) *pixels = static_cast<std::size_t>(dataset->images.cols());
  });
}

rgn_status rgn_dataset_image(const rgn_dataset* dataset, size_t index, double* out, size_t size) {
  return guarded([&] {
    require(dataset != nullptr, "null dataset");
    require(index < static_cast<std::size_t>(dataset->images.rows()), "image index out of range");
    const regnet::Vector v = dataset->images.row(static_cast<Eigen::Index>(index)).transpose();
    copy_out(v, out, size, "dataset image");
  });
}

void rgn_train_options_default(rgn_train_options* options) {
  if (options == nullptr) return;
  const regnet::TrainOptions d;
  options->learning_rate = d.learning_rate;
  options->momentum = d.momentum;
  options->epochs = d.epochs;
  options->batch_size = d.batch_size;
  options->width = 16;
  options->init_seed = 0;
  options->shuffle_seed = 0;
}

rgn_status rgn_train(const rgn_operator* op, const rgn_dataset* dataset, rgn_variant variant,
                     const rgn_filter_spec* filter, double alpha, const rgn_train_options* options,
                     rgn_epoch_callback callback, void* user, rgn_network** out) {
  return guarded([&] {
    require(op != nullptr && dataset != nullptr && options != nullptr && out != nullptr,
            "null argument");
    const regnet::Variant v = to_variant(variant);
    require(v != regnet::Variant::kClassicalFilter, "classical methods have no network to train");
    require(static_cast<std::size_t>(dataset->images.cols()) == op->op->cols(),
            "dataset images do not match the operator");
    require(dataset->images.rows() > 0, "training set is empty");

    const regnet::FilterRegularizer reg(op->op, to_filter(filter), alpha);
    std::vector<regnet::TrainingPair> pairs;
    pairs.reserve(static_cast<std::size_t>(dataset->images.rows()));
    for (Eigen::Index k = 0; k < dataset->images.rows(); ++k) {
      regnet::Vector c = dataset->images.row(k).transpose();
      pairs.push_back({reg.apply_normal(c), std::move(c)});
    }
    regnet::NetworkParams params = regnet::init_network(
        regnet::NetworkArch::small_cnn(dataset->grid_side, options->width), options->init_seed);
    regnet::TrainOptions topt;
    topt.learning_rate = options->learning_rate;
    topt.momentum = options->momentum;
    topt.epochs = options->epochs;
    topt.batch_size = options->batch_size;
    topt.shuffle_seed = options->shuffle_seed;
    if (callback != nullptr) {
      topt.on_epoch = [callback, user](std::size_t epoch, double loss) {
        callback(epoch, loss, user);
      };
    }
    regnet::train(params, pairs, regnet::output_head_for(v, op->op, alpha), topt);
    *out = new rgn_network{std::move(params)};
  });
}

rgn_status rgn_network_load(const char* path, rgn_network** out) {
  return guarded([&] {
    require(path != nullptr && out != nullptr, "null argument");
    *out = new rgn_network{regnet::load_model(path)};
  });
}

rgn_status rgn_network_save(const rgn_network* net, const char* path, const char* metadata) {
  return guarded([&] {
    require(net != nullptr && path != nullptr, "null argument");
    regnet::save_model(path, net->params, opt_string(metadata));
  });
}

void rgn_network_free(rgn_network* net) { delete net; }

rgn_status rgn_network_lipschitz(const rgn_network* net, double* out) {
  return guarded([&] {
    require(net != nullptr && out != nullptr, "null argument");
    *out = regnet::lipschitz_upper_bound(net->params);
  });
}

rgn_status rgn_manifest_write(const char* path, const double* alphas,
                              const char* const* model_paths, size_t count,
                              const char* comment) {
  return guarded([&] {
    require(path != nullptr, "null path");
    require(count == 0 || (alphas != nullptr && model_paths != nullptr), "null manifest arrays");
    std::vector<regnet::ManifestEntry> entries;
    for (std::size_t k = 0; k < count; ++k) {
      require(model_paths[k] != nullptr, "null model path");
      entries.push_back({alphas[k], model_paths[k]});
    }
    std::string text;
    std::string c = opt_string(comment);
    std::size_t start = 0;
    while (start < c.size()) {
      const std::size_t end = std::min(c.find('\n', start), c.size());
      text += "# " + c.substr(start, end - start) + "\n";
      start = end + 1;
    }
    text += regnet::format_manifest(entries);
    regnet::write_text_file(path, text);
  });
}

rgn_status rgn_family_load(const char* manifest_path, rgn_family** out) {
  return guarded([&] {
    require(manifest_path != nullptr && out != nullptr, "null argument");
    const std::filesystem::path manifest(manifest_path);
    std::vector<regnet::ManifestEntry> entries;
    try {
      entries = regnet::parse_manifest(regnet::read_text_file(manifest));
    } catch (const regnet::UsageError& e) {
      throw regnet::IoError(std::string("'") + manifest_path + "': " + e.what());
    }
    if (entries.empty()) throw regnet::IoError(std::string("'") + manifest_path + "' lists no models");
    auto family = std::make_unique<rgn_family>();
    for (const regnet::ManifestEntry& e : entries) {
      std::filesystem::path model(e.model_path);
      if (model.is_relative()) model = manifest.parent_path() / model;
      family->alphas.push_back(e.alpha);
      family->networks.push_back(std::make_unique<rgn_network>(rgn_network{regnet::load_model(model)}));
    }
    *out = family.release();
  });
}

void rgn_family_free(rgn_family* family) { delete family; }

size_t rgn_family_size(const rgn_family* family) {
  return family != nullptr ? family->alphas.size() : 0;
}

double rgn_family_alpha(const rgn_family* family, size_t index) {
  if (family == nullptr || index >= family->alphas.size()) {
    return std::numeric_limits<double>::quiet_NaN();
  }
  return family->alphas[index];
}

const rgn_network* rgn_family_network(const rgn_family* family, size_t index) {
  if (family == nullptr || index >= family->networks.size()) return nullptr;
  return family->networks[index].get();
}

rgn_status rgn_method_create(const rgn_operator* op, rgn_variant variant,
                             const rgn_filter_spec* filter, double alpha, const rgn_network* net,
                             rgn_method** out) {
  return guarded([&] {
    require(op != nullptr && out != nullptr, "null argument");
    const regnet::Variant v = to_variant(variant);
    std::optional<regnet::NetworkParams> params;
    if (v == regnet::Variant::kClassicalFilter) {
      require(net == nullptr, "classical methods take no network");
    } else {
      require(net != nullptr, "learned methods need a network");
      params = net->params;
    }
    *out = new rgn_method{regnet::ReconstructionMethod(v, op->op, to_filter(filter), alpha,
                                                       std::move(params))};
  });
}

void rgn_method_free(rgn_method* method) { delete method; }

double rgn_method_alpha(const rgn_method* method) {
  return method != nullptr ? method->method.alpha() : std::numeric_limits<double>::quiet_NaN();
}

rgn_status rgn_method_reconstruct(const rgn_method* method, const double* y, size_t y_size,
                                  double* x, size_t x_size) {
  return guarded([&] {
    require(method != nullptr, "null method");
    const regnet::ReconstructionMethod& m = method->method;
    copy_out(m.reconstruct(copy_in(y, y_size, m.op().rows(), "reconstruct")), x, x_size,
             "reconstruct");
  });
}

rgn_status rgn_method_distance(const rgn_method* method, const double* x, size_t x_size,
                               double mu, double rho, double* out) {
  return guarded([&] {
    require(method != nullptr && out != nullptr, "null argument");
    const regnet::ReconstructionMethod& m = method->method;
    *out = regnet::distance_function(m, copy_in(x, x_size, m.op().cols(), "distance"), {mu, rho});
  });
}

rgn_status rgn_evaluate(const rgn_method* const* methods, size_t method_count,
                        const rgn_dataset* dataset, size_t first, size_t count, double delta,
                        uint64_t seed, rgn_report** out) {
  return guarded([&] {
    require(methods != nullptr && dataset != nullptr && out != nullptr, "null argument");
    require(method_count > 0, "no methods to evaluate");
    require(first <= static_cast<std::size_t>(dataset->images.rows()) &&
                count <= static_cast<std::size_t>(dataset->images.rows()) - first,
            "evaluation range exceeds the dataset");
    const regnet::SvdOperator& op = methods[0]->method.op();
    std::vector<regnet::EvalCandidate> candidates;
    for (std::size_t k = 0; k < method_count; ++k) {
      require(methods[k] != nullptr, "null method");
      require(methods[k]->method.op().cols() == op.cols() &&
                  methods[k]->method.op().rows() == op.rows(),
              "methods use operators of different shapes");
      candidates.push_back(regnet::make_candidate(methods[k]->method));
    }
    require(static_cast<std::size_t>(dataset->images.cols()) == op.cols(),
            "dataset images do not match the operator");
    std::vector<regnet::TestItem> items;
    for (std::size_t k = first; k < first + count; ++k) {
      regnet::Vector truth = dataset->images.row(static_cast<Eigen::Index>(k)).transpose();
      regnet::Vector sino = op.apply_forward(truth);
      items.push_back({std::move(truth), std::move(sino)});
    }
    auto report = std::make_unique<rgn_report>();
    report->report = regnet::evaluate_testset(candidates, items, delta, seed);
    *out = report.release();
  });
}

rgn_status rgn_rates_classical(const rgn_operator* op, const rgn_filter_spec* filter, double mu,
                               double rho, const double* deltas, size_t delta_count, double scale,
                               uint64_t seed, rgn_report** out) {
  return guarded([&] {
    require(op != nullptr && out != nullptr, "null argument");
    require(deltas != nullptr || delta_count == 0, "null delta list");
    const std::vector<double> ds(deltas, deltas + delta_count);
    auto report = std::make_unique<rgn_report>();
    report->report = regnet::classical_rate_experiment(op->op, to_filter(filter), {mu, rho}, ds,
                                                       scale, seed);
    *out = report.release();
  });
}

rgn_status rgn_check_filter(const rgn_filter_spec* filter, double lambda_max,
                            const double* alphas, size_t alpha_count, const double* mus,
                            size_t mu_count, int* passed, rgn_report** out) {
  return guarded([&] {
    require(passed != nullptr && out != nullptr, "null argument");
    require(alphas != nullptr && alpha_count > 0, "empty alpha list");
    require(mus != nullptr || mu_count == 0, "null mu list");
    const regnet::RegularizingFilter f = to_filter(filter);
    const std::vector<double> as(alphas, alphas + alpha_count);
    const regnet::FilterAxiomReport axioms = regnet::verify_filter_axioms(f, lambda_max, as);

    char buf[64];
    const auto num = [&buf](double v) {
      const auto r = std::to_chars(buf, buf + sizeof(buf), v);
      return std::string(buf, r.ptr);
    };
    std::string text = "filter=" + f.name() + "\n";
    text += "bounded=" + std::string(axioms.bounded ? "true" : "false") + "\n";
    text += "bound_sup=" + num(axioms.bound_sup) + "\n";
    text += "convergent=" + std::string(axioms.convergent ? "true" : "false") + "\n";
    bool ok = axioms.ok();
    for (std::size_t m = 0; m < mu_count; ++m) {
      const double mu = mus[m];
      if (!(mu > 0.0) || mu > f.qualification()) {
        throw regnet::UsageError("qualification check: mu must lie in (0, qualification]");
      }
      const double c = f.constant(mu);
      double worst = 0.0;
      for (double a : as) {
        const double sup = regnet::qualification_sup(f, a, mu, lambda_max, 100000);
        worst = std::max(worst, sup / (c * std::pow(a, mu)));
      }
      const bool holds = worst <= 1.0 + 1e-3;
      ok = ok && holds;
      text += "qualification_mu=" + num(mu) + " constant=" + num(c) + " max_ratio=" + num(worst) +
              " holds=" + (holds ? "true" : "false") + "\n";
    }
    text += "passed=" + std::string(ok ? "true" : "false") + "\n";
    auto report = std::make_unique<rgn_report>();
    report->summary = std::move(text);
    *passed = ok ? 1 : 0;
    *out = report.release();
  });
}

void rgn_report_free(rgn_report* report) { delete report; }

rgn_status rgn_report_text(const rgn_report* report, rgn_text_kind kind, const char* comment,
                           char* buf, size_t capacity, size_t* needed) {
  return guarded([&] {
    require(report != nullptr, "null report");
    const std::string c = opt_string(comment);
    std::string text;
    switch (kind) {
      case RGN_TEXT_ALPHA_CSV: text = regnet::format_alpha_csv(report->report, c); break;
      case RGN_TEXT_RATE_CSV: text = regnet::format_rate_csv(report->report, c); break;
      case RGN_TEXT_SUMMARY:
        if (!report->summary.empty()) {
          text = (c.empty() ? std::string() : "# " + c + "\n") + report->summary;
        } else {
          text = regnet::format_slope_summary(report->report, c.empty() ? c : "# " + c);
        }
        break;
      default: throw regnet::UsageError("unknown text kind");
    }
    if (needed != nullptr) *needed = text.size() + 1;
    if (buf == nullptr) return;
    require(capacity >= text.size() + 1, "text buffer too small");
    std::memcpy(buf, text.c_str(), text.size() + 1);
  });
}

rgn_status rgn_report_best_alpha(const rgn_report* report, double* out) {
  return guarded([&] {
    require(report != nullptr && out != nullptr, "null argument");
    require(report->report.best_alpha.has_value(), "report has no best alpha");
    *out = *report->report.best_alpha;
  });
}

rgn_status rgn_report_slope(const rgn_report* report, double* out) {
  return guarded([&] {
    require(report != nullptr && out != nullptr, "null argument");
    require(report->report.slope.has_value(), "report has no fitted slope");
    *out = report->report.slope->slope;
  });
}

size_t rgn_report_alpha_rows(const rgn_report* report) {
  return report != nullptr ? report->report.alpha_rows.size() : 0;
}

rgn_status rgn_report_alpha_row(const rgn_report* report, size_t index, double* alpha,
                                size_t* kept, double* mse, double* mae) {
  return guarded([&] {
    require(report != nullptr, "null report");
    require(index < report->report.alpha_rows.size(), "row index out of range");
    const regnet::AlphaRow& r = report->report.alpha_rows[index];
    if (alpha != nullptr) *alpha = r.alpha;
    if (kept != nullptr) *kept = r.kept;
    if (mse != nullptr) *mse = r.mse;
    if (mae != nullptr) *mae = r.mae;
  });
}

rgn_status rgn_add_noise(const double* y, size_t size, double delta, uint64_t seed,
                         double* out) {
  return guarded([&] {
    copy_out(regnet::add_noise(copy_in(y, size, size, "noise"), delta, seed), out, size, "noise");
  });
}

rgn_status rgn_write_pgm16(const char* path, const double* image, size_t side, int rescale,
                           const char* comment) {
  return guarded([&] {
    require(path != nullptr, "null path");
    regnet::Vector v = copy_in(image, side * side, side * side, "pgm");
    if (rescale != 0) v = regnet::rescale_unit(v);
    regnet::write_pgm16(path, v, side, opt_string(comment));
  });
}

}  // extern "C"
