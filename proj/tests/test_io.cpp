/* Copyright 2026 The Dancekit Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>

#include <json.hpp>

#include "dancekit/error.hpp"
#include "dancekit/io.hpp"
#include "dancekit/synth.hpp"

using namespace dk;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir() {
  const auto dir = fs::temp_directory_path() / "dancekit-io-tests";
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

void spit(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

}  // namespace

TEST_CASE("motion round-trip preserves every value") {
  const auto path = temp_dir() / "motion.json";
  const auto seq = synth::synthesize(synth::Kind::IidGaussian, 2, 5, 42);
  io::write_motion(seq, path);
  const auto back = io::read_motion(path);
  REQUIRE(back.batch == seq.batch);
  REQUIRE(back.length == seq.length);
  CHECK(back.fps == seq.fps);
  CHECK(back.kind == seq.kind);
  for (int b = 0; b < seq.batch; ++b) {
    for (int i = 0; i < seq.length; ++i) {
      CHECK(back.at(b, i).channels == seq.at(b, i).channels);
    }
  }
}

TEST_CASE("motion writes are byte-stable") {
  const auto dir = temp_dir();
  const auto seq = synth::synthesize(synth::Kind::RandomWalk, 1, 4, 7);
  io::write_motion(seq, dir / "a.json");
  io::write_motion(seq, dir / "b.json");
  CHECK(slurp(dir / "a.json") == slurp(dir / "b.json"));
  // write(read(write(x))) is also byte-identical.
  io::write_motion(io::read_motion(dir / "a.json"), dir / "c.json");
  CHECK(slurp(dir / "a.json") == slurp(dir / "c.json"));
  CHECK(io::file_hash_hex(dir / "a.json") == io::file_hash_hex(dir / "c.json"));
}

TEST_CASE("motion reader rejects wrong channel counts and names the field") {
  const auto path = temp_dir() / "short.json";
  const auto seq = synth::synthesize(synth::Kind::IidGaussian, 1, 2, 1);
  io::write_motion(seq, path);
  auto doc = nlohmann::json::parse(slurp(path));
  doc["data"][0][0].erase(138);
  spit(path, doc.dump(2) + "\n");
  try {
    io::read_motion(path);
    FAIL("expected a layout error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Layout);
  }
}

TEST_CASE("motion reader rejects non-finite values") {
  const auto path = temp_dir() / "nan.json";
  const auto seq = synth::synthesize(synth::Kind::IidGaussian, 1, 2, 1);
  io::write_motion(seq, path);
  auto doc = nlohmann::json::parse(slurp(path));
  doc["data"][0][1][17] = "not-a-number";
  spit(path, doc.dump(2) + "\n");
  CHECK_THROWS_AS(io::read_motion(path), Error);
}

TEST_CASE("motion writer refuses NaN") {
  auto seq = synth::synthesize(synth::Kind::IidGaussian, 1, 2, 1);
  seq.at(0, 0).channels[3] = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(io::write_motion(seq, temp_dir() / "refused.json"), Error);
  CHECK_FALSE(fs::exists(temp_dir() / "refused.json"));
}

TEST_CASE("motion reader rejects unknown format versions") {
  const auto path = temp_dir() / "version.json";
  io::write_motion(synth::synthesize(synth::Kind::IidGaussian, 1, 2, 1), path);
  auto doc = nlohmann::json::parse(slurp(path));
  doc["format_version"] = 99;
  spit(path, doc.dump(2) + "\n");
  CHECK_THROWS_AS(io::read_motion(path), Error);
}

TEST_CASE("params round-trip") {
  const auto path = temp_dir() / "params.json";
  const auto params = recal::init_params(11, recal::default_arch());
  io::write_params(params, path);
  const auto back = io::read_params(path);
  CHECK(back.normalize == params.normalize);
  CHECK(back.ln_gamma == params.ln_gamma);
  CHECK(back.ln_beta == params.ln_beta);
  REQUIRE(back.conv_layers.size() == params.conv_layers.size());
  for (std::size_t l = 0; l < params.conv_layers.size(); ++l) {
    CHECK(back.conv_layers[l].weights == params.conv_layers[l].weights);
    CHECK(back.conv_layers[l].bias == params.conv_layers[l].bias);
    CHECK(back.conv_layers[l].activation == params.conv_layers[l].activation);
    CHECK(back.conv_layers[l].batchnorm.has_value() ==
          params.conv_layers[l].batchnorm.has_value());
  }
  io::write_params(back, temp_dir() / "params2.json");
  CHECK(slurp(path) == slurp(temp_dir() / "params2.json"));
}

TEST_CASE("params reader rejects even kernel sizes") {
  const auto path = temp_dir() / "even.json";
  io::write_params(recal::passthrough_params(), path);
  auto doc = nlohmann::json::parse(slurp(path));
  doc["conv_layers"][0]["kernel_size"] = 2;
  doc["conv_layers"][0]["weights"] = {1.0, 0.0, 0.0, 0.0};
  spit(path, doc.dump(2) + "\n");
  try {
    io::read_params(path);
    FAIL("expected a config error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Config);
  }
}

TEST_CASE("params reader rejects zero batchnorm variance") {
  const auto path = temp_dir() / "var.json";
  io::write_params(recal::init_params(3, recal::default_arch()), path);
  auto doc = nlohmann::json::parse(slurp(path));
  doc["conv_layers"][0]["batchnorm"]["running_var"][0] = 0.0;
  spit(path, doc.dump(2) + "\n");
  CHECK_THROWS_AS(io::read_params(path), Error);
}

TEST_CASE("skeleton round-trip and validation at the boundary") {
  const auto path = temp_dir() / "skeleton.json";
  const auto s = motion::Skeleton::default_humanoid();
  io::write_skeleton(s, path);
  const auto back = io::read_skeleton(path);
  CHECK(back.joint_names == s.joint_names);
  CHECK(back.parents == s.parents);
  CHECK(back.mirror_pairs == s.mirror_pairs);
  CHECK(back.foot_joints == s.foot_joints);
  for (std::size_t j = 0; j < s.offsets.size(); ++j) {
    CHECK(back.offsets[j].x == s.offsets[j].x);
    CHECK(back.offsets[j].y == s.offsets[j].y);
    CHECK(back.offsets[j].z == s.offsets[j].z);
  }

  auto doc = nlohmann::json::parse(slurp(path));
  doc["parents"][0] = 5;  // root must have parent -1
  spit(path, doc.dump(2) + "\n");
  CHECK_THROWS_AS(io::read_skeleton(path), Error);
}

TEST_CASE("beats round-trip and ordering check") {
  const auto path = temp_dir() / "beats.json";
  io::write_beats({{1.0, 4.5, 9.0}, 30.0}, path);
  const auto back = io::read_beats(path);
  CHECK(back.fps == 30.0);
  CHECK(back.times == std::vector<double>{1.0, 4.5, 9.0});

  auto doc = nlohmann::json::parse(slurp(path));
  doc["times"] = {4.0, 4.0, 9.0};
  spit(path, doc.dump(2) + "\n");
  CHECK_THROWS_AS(io::read_beats(path), Error);
}

TEST_CASE("templates round-trip") {
  const auto path = temp_dir() / "templates.json";
  const auto templates = metrics::default_templates();
  io::write_templates(templates, path);
  const auto back = io::read_templates(path);
  REQUIRE(back.size() == templates.size());
  for (std::size_t i = 0; i < templates.size(); ++i) {
    CHECK(back[i].name == templates[i].name);
    CHECK(back[i].kind == templates[i].kind);
    CHECK(back[i].joint_a == templates[i].joint_a);
    CHECK(back[i].joint_b == templates[i].joint_b);
    CHECK(back[i].margin == templates[i].margin);
  }
}

TEST_CASE("missing files raise io errors, not crashes") {
  const auto ghost = temp_dir() / "does-not-exist.json";
  try {
    io::read_motion(ghost);
    FAIL("expected an io error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Io);
  }
  CHECK_THROWS_AS(io::read_params(ghost), Error);
  CHECK_THROWS_AS(io::read_skeleton(ghost), Error);
}

TEST_CASE("malformed json names the problem") {
  const auto path = temp_dir() / "broken.json";
  spit(path, "{ this is not json");
  try {
    io::read_motion(path);
    FAIL("expected a schema error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Schema);
  }
}
