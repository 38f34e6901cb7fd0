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

#include "regnet/regnet.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

#include "regnet/error.hpp"

namespace regnet {

std::string variant_name(Variant variant) {
  switch (variant) {
    case Variant::kClassicalFilter: return "classical";
    case Variant::kNullSpaceRegNet: return "nullspace";
    case Variant::kContinuedSvdRegNet: return "continued";
  }
  return "unknown";
}

Variant parse_variant(std::string_view name) {
  if (name == "classical") return Variant::kClassicalFilter;
  if (name == "nullspace") return Variant::kNullSpaceRegNet;
  if (name == "continued") return Variant::kContinuedSvdRegNet;
  throw UsageError("unknown method variant '" + std::string(name) +
                   "' (expected classical, nullspace or continued)");
}

Vector nullspace_residual(const SvdOperator& op, const NetworkParams& params, const Vector& z) {
  return op.kernel_project(forward(params, z));
}

Vector continued_svd_residual(const SvdOperator& op, double alpha, const NetworkParams& params,
                              const Vector& z) {
  if (!(alpha > 0.0)) throw UsageError("continued_svd_residual: alpha must be positive");
  return op.trailing_project(forward(params, z), op.retained_count(alpha));
}

OutputHead output_head_for(Variant variant, std::shared_ptr<const SvdOperator> op, double alpha) {
  OutputHead head;
  head.add_input = true;
  switch (variant) {
    case Variant::kClassicalFilter:
      throw UsageError("output_head_for: classical methods have no network");
    case Variant::kNullSpaceRegNet:
      head.projection = [op](const Vector& v) { return op->kernel_project(v); };
      break;
    case Variant::kContinuedSvdRegNet: {
      const std::size_t kept = op->retained_count(alpha);
      head.projection = [op, kept](const Vector& v) { return op->trailing_project(v, kept); };
      break;
    }
  }
  return head;
}

ReconstructionMethod::ReconstructionMethod(Variant variant, std::shared_ptr<const SvdOperator> op,
                                           RegularizingFilter filter, double alpha,
                                           std::optional<NetworkParams> params)
    : variant_(variant),
      regularizer_(std::move(op), filter, alpha),
      params_(std::move(params)) {
  if (variant_ == Variant::kClassicalFilter) {
    params_.reset();
    return;
  }
  if (!params_) {
    throw UsageError("reconstruction method '" + variant_name(variant_) +
                     "' requires network parameters");
  }
  if (params_->arch().pixels() != regularizer_.op().cols()) {
    throw UsageError("reconstruction method: network grid does not match operator columns");
  }
}

Vector ReconstructionMethod::regularize(const Vector& y) const { return regularizer_.apply(y); }

Vector ReconstructionMethod::residual(const Vector& z) const {
  switch (variant_) {
    case Variant::kClassicalFilter:
      return Vector::Zero(z.size());
    case Variant::kNullSpaceRegNet:
      return nullspace_residual(op(), *params_, z);
    case Variant::kContinuedSvdRegNet:
      return continued_svd_residual(op(), alpha(), *params_, z);
  }
  return Vector::Zero(z.size());
}

Vector ReconstructionMethod::reconstruct(const Vector& y) const {
  const Vector z = regularize(y);
  if (variant_ == Variant::kClassicalFilter) return z;
  return z + residual(z);
}

double a3_residual(const ReconstructionMethod& method, const Vector& x) {
  if (method.variant() == Variant::kClassicalFilter) return 0.0;
  const FilterRegularizer& reg = method.regularizer();
  const Vector z = reg.apply_normal(x);
  return reg.apply_normal(method.residual(z)).norm();
}

void RegNetFamily::validate() const {
  if (!op) throw UsageError("regnet family: null operator");
  if (members.empty()) throw UsageError("regnet family: no members");
  for (std::size_t k = 0; k < members.size(); ++k) {
    if (!(members[k].first > 0.0)) throw UsageError("regnet family: alpha must be positive");
    if (k > 0 && !(members[k].first < members[k - 1].first)) {
      throw UsageError("regnet family: alphas must be strictly descending");
    }
    if (members[k].second.arch().pixels() != op->cols()) {
      throw UsageError("regnet family: network grid does not match operator");
    }
  }
}

ReconstructionMethod RegNetFamily::method(std::size_t index) const {
  const auto& [alpha, params] = members.at(index);
  return ReconstructionMethod(variant, op, filter, alpha, params);
}

double RegNetFamily::max_lipschitz() const {
  double worst = 0.0;
  for (const auto& member : members) worst = std::max(worst, lipschitz_upper_bound(member.second));
  return worst;
}

AdaptednessReport adaptedness_probe(const RegNetFamily& family, const std::vector<Vector>& probes) {
  family.validate();
  std::vector<ReconstructionMethod> methods;
  AdaptednessReport report;
  for (std::size_t k = 0; k < family.members.size(); ++k) {
    methods.push_back(family.method(k));
    report.alphas.push_back(family.members[k].first);
  }
  for (const Vector& z : probes) {
    if (family.op->kernel_project(z).norm() > 1e-8 * std::max(1.0, z.norm())) {
      throw UsageError("adaptedness_probe: probes must be orthogonal to the kernel");
    }
    std::vector<Vector> outputs;
    for (const ReconstructionMethod& m : methods) {
      outputs.push_back(m.residual(m.regularizer().apply_normal(z)));
    }
    const Vector& limit = outputs.back();
    std::vector<double> row;
    for (const Vector& out : outputs) row.push_back((out - limit).norm());
    bool monotone = true;
    for (std::size_t a = 1; a < row.size(); ++a) {
      if (row[a] > row[a - 1] * (1.0 + 1e-12) + 1e-300) monotone = false;
    }
    report.distances.push_back(std::move(row));
    report.monotone_tail.push_back(monotone);
  }
  return report;
}

std::vector<ManifestEntry> parse_manifest(std::string_view text) {
  std::vector<ManifestEntry> entries;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream fields(line);
    std::string field;
    ManifestEntry entry;
    bool has_alpha = false;
    bool has_model = false;
    while (fields >> field) {
      if (field.rfind("alpha=", 0) == 0) {
        const std::string value = field.substr(6);
        const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), entry.alpha);
        if (ec != std::errc() || ptr != value.data() + value.size() || !(entry.alpha > 0.0)) {
          throw UsageError("manifest line " + std::to_string(line_no) + ": bad alpha");
        }
        has_alpha = true;
      } else if (field.rfind("model=", 0) == 0) {
        entry.model_path = field.substr(6);
        has_model = !entry.model_path.empty();
      }
    }
    if (!has_alpha || !has_model) {
      throw UsageError("manifest line " + std::to_string(line_no) +
                       ": expected 'alpha=<decimal> model=<path>'");
    }
    entries.push_back(std::move(entry));
  }
  return entries;
}

std::string format_manifest(const std::vector<ManifestEntry>& entries) {
  std::string out;
  char buf[64];
  for (const ManifestEntry& e : entries) {
    const auto res = std::to_chars(buf, buf + sizeof(buf), e.alpha);
    out += "alpha=";
    out.append(buf, res.ptr);
    out += " model=" + e.model_path + "\n";
  }
  return out;
}

}  // namespace regnet
