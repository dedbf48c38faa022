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

#include "dancekit/io.hpp"

#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "dancekit/error.hpp"

namespace dk::io {

namespace {

using json = nlohmann::ordered_json;

json parse_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw_error(ErrorKind::Io, "cannot open '" + path.string() + "'");
  }
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw_error(ErrorKind::Schema,
                "parse error in '" + path.string() + "': " + e.what());
  }
}

// Typed field access with a schema error naming the field path.
template <typename T>
T field(const json& j, const std::string& key) {
  if (!j.contains(key)) {
    throw_error(ErrorKind::Schema, "missing field '" + key + "'");
  }
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw_error(ErrorKind::Schema, "field '" + key + "' has the wrong type");
  }
}

void check_version(const json& j) {
  const int v = field<int>(j, "format_version");
  if (v != kFormatVersion) {
    throw_error(ErrorKind::Schema,
                "unsupported format_version " + std::to_string(v));
  }
}

void dump_to(const std::filesystem::path& path, const json& j) {
  write_text_atomic(path, j.dump(2) + "\n");
}

}  // namespace

void write_text_atomic(const std::filesystem::path& path,
                       const std::string& content) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw_error(ErrorKind::Io, "cannot write '" + tmp.string() + "'");
    }
    out << content;
    if (!out) {
      throw_error(ErrorKind::Io, "write failed for '" + tmp.string() + "'");
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    throw_error(ErrorKind::Io, "rename failed for '" + path.string() +
                                   "': " + ec.message());
  }
}

std::string file_hash_hex(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw_error(ErrorKind::Io, "cannot open '" + path.string() + "'");
  }
  std::uint64_t hash = 0xcbf29ce484222325ull;
  char c;
  while (in.get(c)) {
    hash ^= static_cast<unsigned char>(c);
    hash *= 0x100000001b3ull;
  }
  std::ostringstream out;
  out << std::hex << hash;
  return out.str();
}

motion::PrimitiveSequence read_motion(const std::filesystem::path& path) {
  const json j = parse_file(path);
  check_version(j);

  const json layout = field<json>(j, "layout");
  const auto expect = [&](const char* key, int want) {
    const int got = field<int>(layout, key);
    if (got != want) {
      throw_error(ErrorKind::Layout,
                  std::string("layout.") + key + " must be " +
                      std::to_string(want) + ", got " + std::to_string(got));
    }
  };
  expect("foot", motion::layout::kFootDims);
  expect("root_translation", motion::layout::kRootTranslationDims);
  expect("root_rotation", motion::layout::kRootRotationDims);
  expect("joint_rotations", motion::layout::kJointRotationDims);

  motion::PrimitiveSequence seq;
  seq.fps = field<double>(j, "fps");
  if (!(seq.fps > 0.0)) {
    throw_error(ErrorKind::Schema, "fps must be positive");
  }
  seq.kind = motion::sequence_kind_from_string(field<std::string>(j, "kind"));
  seq.batch = field<int>(j, "batch");
  seq.length = field<int>(j, "length");
  if (seq.batch < 1 || seq.length < 1) {
    throw_error(ErrorKind::Schema, "batch and length must be >= 1");
  }

  const json& data = field<json>(j, "data");
  if (!data.is_array() ||
      data.size() != static_cast<std::size_t>(seq.batch)) {
    throw_error(ErrorKind::Layout, "data must have 'batch' rows");
  }
  seq.data.reserve(static_cast<std::size_t>(seq.batch) * seq.length);
  for (int b = 0; b < seq.batch; ++b) {
    const json& row = data[b];
    if (!row.is_array() ||
        row.size() != static_cast<std::size_t>(seq.length)) {
      throw_error(ErrorKind::Layout,
                  "data[" + std::to_string(b) + "] must have 'length' frames");
    }
    for (int i = 0; i < seq.length; ++i) {
      const json& frame = row[i];
      if (!frame.is_array() ||
          frame.size() != static_cast<std::size_t>(motion::layout::kTotal)) {
        throw_error(ErrorKind::Layout,
                    "data[" + std::to_string(b) + "][" + std::to_string(i) +
                        "] must have 139 channels");
      }
      std::vector<double> values;
      values.reserve(motion::layout::kTotal);
      for (const json& v : frame) {
        if (!v.is_number()) {
          throw_error(ErrorKind::Numeric,
                      "non-finite or non-numeric channel value at (" +
                          std::to_string(b) + ", " + std::to_string(i) + ")");
        }
        const double d = v.get<double>();
        if (!std::isfinite(d)) {
          throw_error(ErrorKind::Numeric, "non-finite channel value at (" +
                                              std::to_string(b) + ", " +
                                              std::to_string(i) + ")");
        }
        values.push_back(d);
      }
      seq.data.push_back(motion::make_primitive(values));
    }
  }
  return seq;
}

void write_motion(const motion::PrimitiveSequence& seq,
                  const std::filesystem::path& path) {
  if (seq.batch < 1 || seq.length < 1 ||
      seq.data.size() != static_cast<std::size_t>(seq.batch) *
                             static_cast<std::size_t>(seq.length)) {
    throw_error(ErrorKind::Layout, "sequence dimensions are inconsistent");
  }
  for (const auto& p : seq.data) {
    for (double v : p.channels) {
      if (!std::isfinite(v)) {
        throw_error(ErrorKind::Numeric,
                    "refusing to serialize non-finite channel values");
      }
    }
  }
  json j;
  j["format_version"] = kFormatVersion;
  j["fps"] = seq.fps;
  j["kind"] = motion::to_string(seq.kind);
  j["layout"] = {{"foot", motion::layout::kFootDims},
                 {"root_translation", motion::layout::kRootTranslationDims},
                 {"root_rotation", motion::layout::kRootRotationDims},
                 {"joint_rotations", motion::layout::kJointRotationDims}};
  j["batch"] = seq.batch;
  j["length"] = seq.length;
  json data = json::array();
  for (int b = 0; b < seq.batch; ++b) {
    json row = json::array();
    for (int i = 0; i < seq.length; ++i) {
      row.push_back(seq.at(b, i).channels);
    }
    data.push_back(std::move(row));
  }
  j["data"] = std::move(data);
  dump_to(path, j);
}

recal::PoolingParams read_params(const std::filesystem::path& path) {
  const json j = parse_file(path);
  check_version(j);

  recal::PoolingParams params;
  params.normalize = field<bool>(j, "normalize");
  if (params.normalize) {
    params.ln_gamma = field<std::vector<double>>(j, "ln_gamma");
    params.ln_beta = field<std::vector<double>>(j, "ln_beta");
  }
  const json& layers = field<json>(j, "conv_layers");
  if (!layers.is_array()) {
    throw_error(ErrorKind::Schema, "conv_layers must be an array");
  }
  for (const json& lj : layers) {
    recal::ConvLayer layer;
    layer.in_channels = field<int>(lj, "in_channels");
    layer.out_channels = field<int>(lj, "out_channels");
    layer.kernel_size = field<int>(lj, "kernel_size");
    layer.weights = field<std::vector<double>>(lj, "weights");
    layer.bias = field<std::vector<double>>(lj, "bias");
    const std::string act = field<std::string>(lj, "activation");
    if (act == "identity") {
      layer.activation = recal::Activation::Identity;
    } else if (act == "tanh") {
      layer.activation = recal::Activation::Tanh;
    } else {
      throw_error(ErrorKind::Schema, "unknown activation '" + act + "'");
    }
    if (lj.contains("batchnorm") && !lj.at("batchnorm").is_null()) {
      const json& bj = lj.at("batchnorm");
      recal::BatchNorm bn;
      bn.running_mean = field<std::vector<double>>(bj, "running_mean");
      bn.running_var = field<std::vector<double>>(bj, "running_var");
      bn.gamma = field<std::vector<double>>(bj, "gamma");
      bn.beta = field<std::vector<double>>(bj, "beta");
      bn.epsilon = field<double>(bj, "epsilon");
      layer.batchnorm = std::move(bn);
    }
    params.conv_layers.push_back(std::move(layer));
  }
  params.validate();
  return params;
}

void write_params(const recal::PoolingParams& params,
                  const std::filesystem::path& path) {
  params.validate();
  json j;
  j["format_version"] = kFormatVersion;
  j["normalize"] = params.normalize;
  if (params.normalize) {
    j["ln_gamma"] = params.ln_gamma;
    j["ln_beta"] = params.ln_beta;
  }
  json layers = json::array();
  for (const auto& layer : params.conv_layers) {
    json lj;
    lj["in_channels"] = layer.in_channels;
    lj["out_channels"] = layer.out_channels;
    lj["kernel_size"] = layer.kernel_size;
    lj["weights"] = layer.weights;
    lj["bias"] = layer.bias;
    lj["activation"] =
        layer.activation == recal::Activation::Tanh ? "tanh" : "identity";
    if (layer.batchnorm.has_value()) {
      const auto& bn = *layer.batchnorm;
      lj["batchnorm"] = {{"running_mean", bn.running_mean},
                         {"running_var", bn.running_var},
                         {"gamma", bn.gamma},
                         {"beta", bn.beta},
                         {"epsilon", bn.epsilon}};
    }
    layers.push_back(std::move(lj));
  }
  j["conv_layers"] = std::move(layers);
  dump_to(path, j);
}

motion::Skeleton read_skeleton(const std::filesystem::path& path) {
  const json j = parse_file(path);
  motion::Skeleton s;
  s.joint_names = field<std::vector<std::string>>(j, "joint_names");
  s.parents = field<std::vector<int>>(j, "parents");
  const json& offsets = field<json>(j, "offsets");
  if (!offsets.is_array()) {
    throw_error(ErrorKind::Schema, "offsets must be an array of 3-vectors");
  }
  for (const json& o : offsets) {
    if (!o.is_array() || o.size() != 3) {
      throw_error(ErrorKind::Schema, "each offset must be a 3-vector");
    }
    s.offsets.push_back(
        {o[0].get<double>(), o[1].get<double>(), o[2].get<double>()});
  }
  const json& pairs = field<json>(j, "mirror_pairs");
  for (const json& p : pairs) {
    if (!p.is_array() || p.size() != 2) {
      throw_error(ErrorKind::Schema, "each mirror pair must have 2 indices");
    }
    s.mirror_pairs.emplace_back(p[0].get<int>(), p[1].get<int>());
  }
  s.foot_joints = field<std::vector<int>>(j, "foot_joints");
  s.validate();
  return s;
}

void write_skeleton(const motion::Skeleton& s,
                    const std::filesystem::path& path) {
  s.validate();
  json j;
  j["format_version"] = kFormatVersion;
  j["joint_names"] = s.joint_names;
  j["parents"] = s.parents;
  json offsets = json::array();
  for (const auto& o : s.offsets) {
    offsets.push_back({o.x, o.y, o.z});
  }
  j["offsets"] = std::move(offsets);
  json pairs = json::array();
  for (const auto& [l, r] : s.mirror_pairs) {
    pairs.push_back({l, r});
  }
  j["mirror_pairs"] = std::move(pairs);
  j["foot_joints"] = s.foot_joints;
  dump_to(path, j);
}

metrics::BeatTrack read_beats(const std::filesystem::path& path) {
  const json j = parse_file(path);
  metrics::BeatTrack beats;
  beats.fps = field<double>(j, "fps");
  beats.times = field<std::vector<double>>(j, "times");
  beats.validate();
  return beats;
}

void write_beats(const metrics::BeatTrack& beats,
                 const std::filesystem::path& path) {
  beats.validate();
  json j;
  j["fps"] = beats.fps;
  j["times"] = beats.times;
  dump_to(path, j);
}

std::vector<metrics::Template> read_templates(
    const std::filesystem::path& path) {
  const json j = parse_file(path);
  if (!j.is_array()) {
    throw_error(ErrorKind::Schema,
                "templates file must be a JSON list of predicates");
  }
  std::vector<metrics::Template> templates;
  for (const json& tj : j) {
    metrics::Template t;
    t.name = field<std::string>(tj, "name");
    const std::string kind = field<std::string>(tj, "kind");
    if (kind == "above") {
      t.kind = metrics::Template::Kind::Above;
    } else if (kind == "near") {
      t.kind = metrics::Template::Kind::Near;
    } else {
      throw_error(ErrorKind::Schema,
                  "template '" + t.name + "': unknown kind '" + kind + "'");
    }
    t.joint_a = field<std::string>(tj, "joint_a");
    t.joint_b = field<std::string>(tj, "joint_b");
    t.margin = field<double>(tj, "margin");
    if (!std::isfinite(t.margin)) {
      throw_error(ErrorKind::Schema,
                  "template '" + t.name + "': margin must be finite");
    }
    templates.push_back(std::move(t));
  }
  if (templates.empty()) {
    throw_error(ErrorKind::Schema, "templates file must be nonempty");
  }
  return templates;
}

void write_templates(const std::vector<metrics::Template>& templates,
                     const std::filesystem::path& path) {
  json j = json::array();
  for (const auto& t : templates) {
    j.push_back({{"name", t.name},
                 {"kind", t.kind == metrics::Template::Kind::Above ? "above"
                                                                   : "near"},
                 {"joint_a", t.joint_a},
                 {"joint_b", t.joint_b},
                 {"margin", t.margin}});
  }
  dump_to(path, j);
}

void write_report(const metrics::MetricsReport& report,
                  const std::filesystem::path& path) {
  json j;
  j["format_version"] = kFormatVersion;
  j["fid_k"] = report.fid_k;
  j["fid_g"] = report.fid_g;
  j["div_k"] = report.div_k;
  j["div_g"] = report.div_g;
  j["fsr"] = report.fsr;
  j["bas"] = report.bas;
  j["boundary_discontinuity"] = report.boundary_discontinuity;
  j["runtime_ms"] = report.runtime_ms;
  j["config"] = {{"fsr_height_max", report.fsr_height_max},
                 {"fsr_speed_min", report.fsr_speed_min},
                 {"bas_sigma", report.bas_sigma},
                 {"templates_hash", report.templates_hash}};
  dump_to(path, j);
}

}  // namespace dk::io
