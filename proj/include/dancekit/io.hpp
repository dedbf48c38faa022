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

// On-disk formats. Everything is JSON with canonical serialization: fixed
// key order, shortest round-trip decimals, trailing newline. Writers are
// atomic (temp file + rename); readers enforce every type invariant at the
// boundary.

#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "dancekit/metrics.hpp"
#include "dancekit/motion.hpp"
#include "dancekit/recal.hpp"

namespace dk::io {

inline constexpr int kFormatVersion = 1;

motion::PrimitiveSequence read_motion(const std::filesystem::path& path);
void write_motion(const motion::PrimitiveSequence& seq,
                  const std::filesystem::path& path);

recal::PoolingParams read_params(const std::filesystem::path& path);
void write_params(const recal::PoolingParams& params,
                  const std::filesystem::path& path);

motion::Skeleton read_skeleton(const std::filesystem::path& path);
void write_skeleton(const motion::Skeleton& s,
                    const std::filesystem::path& path);

metrics::BeatTrack read_beats(const std::filesystem::path& path);
void write_beats(const metrics::BeatTrack& beats,
                 const std::filesystem::path& path);

std::vector<metrics::Template> read_templates(
    const std::filesystem::path& path);
void write_templates(const std::vector<metrics::Template>& templates,
                     const std::filesystem::path& path);

void write_report(const metrics::MetricsReport& report,
                  const std::filesystem::path& path);

// Atomic canonical text write used by all writers.
void write_text_atomic(const std::filesystem::path& path,
                       const std::string& content);

// FNV-1a 64-bit hash of the file bytes, hex-encoded.
std::string file_hash_hex(const std::filesystem::path& path);

}  // namespace dk::io
