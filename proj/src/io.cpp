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

#include "regnet/io.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>

#include "regnet/error.hpp"

namespace regnet {

namespace {

class ByteWriter {
 public:
  void raw(std::string_view s) { out_.append(s); }
  void u32(std::uint32_t v) {
    for (int k = 0; k < 4; ++k) out_.push_back(static_cast<char>((v >> (8 * k)) & 0xffu));
  }
  void u64(std::uint64_t v) {
    for (int k = 0; k < 8; ++k) out_.push_back(static_cast<char>((v >> (8 * k)) & 0xffu));
  }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  std::string take() { return std::move(out_); }

 private:
  std::string out_;
};

class ByteReader {
 public:
  ByteReader(std::string_view bytes, const char* what) : bytes_(bytes), what_(what) {}

  std::string_view raw(std::size_t n) {
    need(n);
    std::string_view s = bytes_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int k = 0; k < 4; ++k) {
      v |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes_[pos_ + k])) << (8 * k);
    }
    pos_ += 4;
    return v;
  }
  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int k = 0; k < 8; ++k) {
      v |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes_[pos_ + k])) << (8 * k);
    }
    pos_ += 8;
    return v;
  }
  double f64() { return std::bit_cast<double>(u64()); }
  // Guards element counts read from the file before allocating.
  std::size_t count(std::uint64_t n, std::size_t element_size) {
    if (n > (bytes_.size() - pos_) / element_size) {
      throw IoError(std::string(what_) + ": truncated or corrupt file");
    }
    return static_cast<std::size_t>(n);
  }
  bool at_end() const { return pos_ == bytes_.size(); }

 private:
  void need(std::size_t n) const {
    if (bytes_.size() - pos_ < n) throw IoError(std::string(what_) + ": truncated file");
  }
  std::string_view bytes_;
  std::size_t pos_ = 0;
  const char* what_;
};

}  // namespace

std::string encode_container(const ArrayRecord& record) {
  const Eigen::Index rows = record.matrix.rows();
  const Eigen::Index cols = record.matrix.cols();
  const Eigen::Index r = record.singular_values.size();
  if (record.image_vectors.rows() != (r > 0 ? cols : record.image_vectors.rows()) ||
      record.image_vectors.cols() != r || record.data_vectors.cols() != r ||
      (r > 0 && record.data_vectors.rows() != rows)) {
    throw UsageError("container: singular system shape does not match matrix");
  }
  ByteWriter w;
  w.raw("RGN1");
  w.u32(kContainerVersion);
  w.u64(static_cast<std::uint64_t>(rows));
  w.u64(static_cast<std::uint64_t>(cols));
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) w.f64(record.matrix(i, j));
  }
  w.u64(static_cast<std::uint64_t>(r));
  for (Eigen::Index n = 0; n < r; ++n) w.f64(record.singular_values(n));
  for (Eigen::Index n = 0; n < r; ++n) {
    for (Eigen::Index i = 0; i < cols; ++i) w.f64(record.image_vectors(i, n));
  }
  for (Eigen::Index n = 0; n < r; ++n) {
    for (Eigen::Index i = 0; i < rows; ++i) w.f64(record.data_vectors(i, n));
  }
  w.u64(record.metadata.size());
  w.raw(record.metadata);
  return w.take();
}

ArrayRecord decode_container(std::string_view bytes) {
  ByteReader r(bytes, "RGN1");
  if (r.raw(4) != "RGN1") throw IoError("RGN1: bad magic");
  const std::uint32_t version = r.u32();
  if (version != kContainerVersion) {
    throw IoError("RGN1: unsupported version " + std::to_string(version));
  }
  const std::uint64_t rows = r.u64();
  const std::uint64_t cols = r.u64();
  if (cols != 0 && rows > (std::uint64_t{1} << 40) / cols) throw IoError("RGN1: corrupt shape");
  const std::size_t entries = r.count(rows * cols, 8);
  ArrayRecord rec;
  rec.matrix.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  (void)entries;
  for (Eigen::Index i = 0; i < rec.matrix.rows(); ++i) {
    for (Eigen::Index j = 0; j < rec.matrix.cols(); ++j) rec.matrix(i, j) = r.f64();
  }
  const std::size_t rank = r.count(r.u64(), 8);
  rec.singular_values.resize(static_cast<Eigen::Index>(rank));
  for (std::size_t n = 0; n < rank; ++n) rec.singular_values(static_cast<Eigen::Index>(n)) = r.f64();
  r.count(static_cast<std::uint64_t>(rank) * (rows + cols), 8);
  rec.image_vectors.resize(rank > 0 ? static_cast<Eigen::Index>(cols) : 0,
                           static_cast<Eigen::Index>(rank));
  rec.data_vectors.resize(rank > 0 ? static_cast<Eigen::Index>(rows) : 0,
                          static_cast<Eigen::Index>(rank));
  for (Eigen::Index n = 0; n < rec.image_vectors.cols(); ++n) {
    for (Eigen::Index i = 0; i < rec.image_vectors.rows(); ++i) rec.image_vectors(i, n) = r.f64();
  }
  for (Eigen::Index n = 0; n < rec.data_vectors.cols(); ++n) {
    for (Eigen::Index i = 0; i < rec.data_vectors.rows(); ++i) rec.data_vectors(i, n) = r.f64();
  }
  const std::size_t meta_len = r.count(r.u64(), 1);
  rec.metadata = std::string(r.raw(meta_len));
  if (!r.at_end()) throw IoError("RGN1: trailing bytes after metadata");
  return rec;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("error reading '" + path.string() + "'");
  return data;
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  out.close();
  if (!out) throw IoError("error writing '" + path.string() + "'");
}

void write_container(const std::filesystem::path& path, const ArrayRecord& record) {
  write_text_file(path, encode_container(record));
}

ArrayRecord read_container(const std::filesystem::path& path) {
  return decode_container(read_text_file(path));
}

void save_operator(const std::filesystem::path& path, const SvdOperator& op,
                   const std::string& metadata) {
  ArrayRecord rec;
  rec.matrix = op.matrix();
  rec.singular_values = op.singular_values();
  rec.image_vectors = op.image_vectors();
  rec.data_vectors = op.data_vectors();
  rec.metadata = metadata;
  write_container(path, rec);
}

SvdOperator load_operator(const std::filesystem::path& path, double rank_tol,
                          std::string* metadata) {
  ArrayRecord rec = read_container(path);
  if (rec.singular_values.size() == 0) {
    throw IoError("'" + path.string() + "' holds no singular system");
  }
  if (metadata != nullptr) *metadata = rec.metadata;
  try {
    return SvdOperator::from_parts(std::move(rec.matrix), std::move(rec.singular_values),
                                   std::move(rec.image_vectors), std::move(rec.data_vectors),
                                   rank_tol);
  } catch (const UsageError& e) {
    throw IoError("'" + path.string() + "': " + e.what());
  }
}

std::string encode_model(const NetworkParams& params, const std::string& metadata) {
  const NetworkArch& arch = params.arch();
  ByteWriter w;
  w.raw("RGNN");
  w.u32(kModelVersion);
  w.u64(arch.side);
  w.u32(arch.residual_skip ? 1u : 0u);
  w.u64(arch.layers.size());
  for (const ConvLayerShape& l : arch.layers) {
    w.u64(l.in_channels);
    w.u64(l.out_channels);
  }
  w.u64(params.values().size());
  for (double v : params.values()) w.f64(v);
  w.u64(params.seed());
  w.u64(metadata.size());
  w.raw(metadata);
  return w.take();
}

NetworkParams decode_model(std::string_view bytes, std::string* metadata) {
  ByteReader r(bytes, "RGNN");
  if (r.raw(4) != "RGNN") throw IoError("RGNN: bad magic");
  const std::uint32_t version = r.u32();
  if (version != kModelVersion) throw IoError("RGNN: unsupported version " + std::to_string(version));
  NetworkArch arch;
  arch.side = static_cast<std::size_t>(r.u64());
  arch.residual_skip = r.u32() != 0;
  const std::size_t depth = r.count(r.u64(), 16);
  for (std::size_t l = 0; l < depth; ++l) {
    ConvLayerShape shape;
    shape.in_channels = static_cast<std::size_t>(r.u64());
    shape.out_channels = static_cast<std::size_t>(r.u64());
    arch.layers.push_back(shape);
  }
  const std::size_t count = r.count(r.u64(), 8);
  std::vector<double> values(count);
  for (double& v : values) v = r.f64();
  const std::uint64_t seed = r.u64();
  const std::size_t meta_len = r.count(r.u64(), 1);
  const std::string_view meta = r.raw(meta_len);
  if (!r.at_end()) throw IoError("RGNN: trailing bytes after metadata");
  if (metadata != nullptr) *metadata = std::string(meta);
  try {
    return NetworkParams(std::move(arch), std::move(values), seed);
  } catch (const UsageError& e) {
    throw IoError(std::string("RGNN: ") + e.what());
  }
}

void save_model(const std::filesystem::path& path, const NetworkParams& params,
                const std::string& metadata) {
  write_text_file(path, encode_model(params, metadata));
}

NetworkParams load_model(const std::filesystem::path& path, std::string* metadata) {
  return decode_model(read_text_file(path), metadata);
}

std::string encode_pgm16(const Vector& image, std::size_t side, const std::string& comment) {
  if (static_cast<std::size_t>(image.size()) != side * side) {
    throw UsageError("pgm: image size does not match side");
  }
  std::ostringstream header;
  header << "P5\n";
  std::istringstream lines(comment);
  for (std::string line; std::getline(lines, line);) header << "# " << line << "\n";
  header << side << " " << side << "\n65535\n";
  std::string out = header.str();
  out.reserve(out.size() + 2 * side * side);
  for (std::size_t row = side; row-- > 0;) {
    for (std::size_t col = 0; col < side; ++col) {
      const double v = image(static_cast<Eigen::Index>(row * side + col));
      const double clamped = std::isfinite(v) ? std::clamp(v, 0.0, 1.0) : 0.0;
      const auto level = static_cast<std::uint16_t>(std::lround(clamped * 65535.0));
      out.push_back(static_cast<char>(level >> 8));
      out.push_back(static_cast<char>(level & 0xffu));
    }
  }
  return out;
}

void write_pgm16(const std::filesystem::path& path, const Vector& image, std::size_t side,
                 const std::string& comment) {
  write_text_file(path, encode_pgm16(image, side, comment));
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 14695981039346656037ULL;
  for (char c : bytes) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace regnet
