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

#include <doctest.h>

#include <bit>
#include <cstring>
#include <filesystem>

#include "regnet/error.hpp"
#include "regnet/io.hpp"
#include "support.hpp"

using namespace regnet;
using namespace regnet::testing;

namespace {

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "regnet_test_io";
  std::filesystem::create_directories(dir);
  return dir / name;
}

std::uint64_t read_u64(const std::string& bytes, std::size_t at) {
  std::uint64_t v = 0;
  for (int k = 7; k >= 0; --k) v = (v << 8) | static_cast<unsigned char>(bytes[at + static_cast<std::size_t>(k)]);
  return v;
}

}  // namespace

TEST_CASE("container byte layout") {
  ArrayRecord rec;
  rec.matrix.resize(2, 3);
  rec.matrix << 1, 2, 3, 4, 5, 6;
  rec.metadata = "seed=1\n";
  const std::string bytes = encode_container(rec);
  CHECK(bytes.substr(0, 4) == "RGN1");
  CHECK(static_cast<unsigned char>(bytes[4]) == 1);
  CHECK(read_u64(bytes, 8) == 2);
  CHECK(read_u64(bytes, 16) == 3);
  // Row-major little-endian doubles.
  CHECK(std::bit_cast<double>(read_u64(bytes, 24 + 8 * 1)) == 2.0);
  CHECK(std::bit_cast<double>(read_u64(bytes, 24 + 8 * 3)) == 4.0);
  CHECK(read_u64(bytes, 24 + 48) == 0);
  CHECK(read_u64(bytes, 24 + 56) == 7);
  CHECK(bytes.size() == 24 + 48 + 8 + 8 + 7);
  CHECK(bytes.substr(bytes.size() - 7) == "seed=1\n");
}

TEST_CASE("container round trip with a singular system") {
  const SvdOperator op = SvdOperator::decompose(random_matrix(7, 5, 1));
  ArrayRecord rec{op.matrix(), op.singular_values(), op.image_vectors(), op.data_vectors(), "a=b"};
  const ArrayRecord back = decode_container(encode_container(rec));
  CHECK(back.matrix == rec.matrix);
  CHECK(back.singular_values == rec.singular_values);
  CHECK(back.image_vectors == rec.image_vectors);
  CHECK(back.data_vectors == rec.data_vectors);
  CHECK(back.metadata == "a=b");

  const auto path = scratch("op.rgn1");
  save_operator(path, op, "kind=test\n");
  std::string meta;
  const SvdOperator loaded = load_operator(path, kDefaultRankTol, &meta);
  CHECK(meta == "kind=test\n");
  CHECK(loaded.matrix() == op.matrix());
  CHECK(loaded.image_vectors() == op.image_vectors());
  CHECK(loaded.rank() == op.rank());
}

TEST_CASE("container corruption is an I/O error") {
  const SvdOperator op = SvdOperator::decompose(random_matrix(4, 4, 2));
  const std::string good =
      encode_container({op.matrix(), op.singular_values(), op.image_vectors(), op.data_vectors(), "m"});
  CHECK_THROWS_AS(decode_container(good.substr(0, good.size() - 3)), IoError);
  CHECK_THROWS_AS(decode_container(good + "x"), IoError);
  std::string magic = good;
  magic[0] = 'X';
  CHECK_THROWS_AS(decode_container(magic), IoError);
  std::string version = good;
  version[4] = 9;
  CHECK_THROWS_AS(decode_container(version), IoError);
  std::string rank = good;
  rank[24 + 16 * 8] = 100;  // r larger than min(rows, cols)
  CHECK_THROWS_AS(decode_container(rank), IoError);
  CHECK_THROWS_AS(decode_container(""), IoError);
  CHECK_THROWS_AS(read_container(scratch("missing.rgn1")), IoError);

  // A plain array has no singular system to load as an operator.
  const auto path = scratch("plain.rgn1");
  write_container(path, {random_matrix(2, 2, 3), {}, {}, {}, ""});
  CHECK_THROWS_AS(load_operator(path), IoError);
}

TEST_CASE("model round trip") {
  NetworkParams p = init_network(NetworkArch::small_cnn(6, 3, true), 77);
  const std::string bytes = encode_model(p, "alpha=0.1");
  CHECK(bytes.substr(0, 4) == "RGNN");
  std::string meta;
  const NetworkParams back = decode_model(bytes, &meta);
  CHECK(meta == "alpha=0.1");
  CHECK(back.arch() == p.arch());
  CHECK(back.seed() == 77);
  CHECK(std::equal(back.values().begin(), back.values().end(), p.values().begin()));
  CHECK(encode_model(back, "alpha=0.1") == bytes);

  const auto path = scratch("m.rgnn");
  save_model(path, p);
  CHECK(read_text_file(path) == encode_model(p));
  CHECK(load_model(path).arch() == p.arch());

  CHECK_THROWS_AS(decode_model(bytes.substr(0, 40)), IoError);
  CHECK_THROWS_AS(decode_model(bytes + "!"), IoError);
  std::string bad = bytes;
  bad[3] = 'X';
  CHECK_THROWS_AS(decode_model(bad), IoError);
  CHECK_THROWS_AS(load_model(scratch("missing.rgnn")), IoError);
}

TEST_CASE("16-bit PGM layout") {
  Vector img(4);
  img << 0.0, 1.0, 0.5, 2.0;  // row 0 = (0, 1), row 1 = (0.5, clamp 2 -> 1)
  const std::string pgm = encode_pgm16(img, 2, "seed=3\nalpha=0.1");
  const std::string header = "P5\n# seed=3\n# alpha=0.1\n2 2\n65535\n";
  REQUIRE(pgm.substr(0, header.size()) == header);
  const std::string px = pgm.substr(header.size());
  REQUIRE(px.size() == 8);
  auto level = [&](std::size_t k) {
    return (static_cast<unsigned>(static_cast<unsigned char>(px[2 * k])) << 8) |
           static_cast<unsigned char>(px[2 * k + 1]);
  };
  // Row 1 is written first.
  CHECK(level(0) == 32768);
  CHECK(level(1) == 65535);
  CHECK(level(2) == 0);
  CHECK(level(3) == 65535);
  CHECK_THROWS_AS(encode_pgm16(img, 3), UsageError);
}

TEST_CASE("text files and hashing") {
  const auto path = scratch("t.txt");
  write_text_file(path, "abc\n");
  CHECK(read_text_file(path) == "abc\n");
  CHECK_THROWS_AS(read_text_file(scratch("nope.txt")), IoError);
  CHECK_THROWS_AS(write_text_file(scratch("no_such_dir/x.txt"), "x"), IoError);
  CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(fnv1a64("foobar") == 0x85944171f73967e8ULL);
}
