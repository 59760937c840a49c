/*
 * Copyright 2026 The Actigate Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef ACTIGATE_ACTIVATION_STORE_H_
#define ACTIGATE_ACTIVATION_STORE_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "actigate/matrix.h"

namespace actigate {

// One (question, context, answer) example. `activations` holds only the
// answer span: the L answer-token hidden states followed by the EOS state,
// so it always has answer_len + 1 rows.
struct ActivationRecord {
  std::string id;
  std::string question;
  std::string answer;
  std::optional<std::string> reference_answer;
  int context_doc_count = 0;
  int layer = 1;
  int prefix_len = 0;
  int answer_len = 1;
  Matrix activations;
  // Natural-log token probabilities of the answer tokens, one per token.
  std::optional<std::vector<double>> token_logprobs;
  int label = 0;
};

// Throws ValidationError when any record invariant is violated.
void ValidateRecord(const ActivationRecord& record);

// Selects the answer tokens plus EOS out of the full prompt activations.
// `full` must have exactly prefix_len + answer_len + 1 rows; the result is
// rows prefix_len .. prefix_len + answer_len (0-based), in order.
Matrix ExtractAnswerSpan(const Matrix& full, int prefix_len, int answer_len);

// Blob layout: "ACTB", version byte, u32 rows, u32 cols, then rows*cols
// float32, all little-endian, row-major.
inline constexpr char kBlobMagic[4] = {'A', 'C', 'T', 'B'};
inline constexpr std::uint8_t kBlobVersion = 0x01;
inline constexpr std::size_t kBlobHeaderBytes = 4 + 1 + 4 + 4;

std::string EncodeBlob(const Matrix& m);
// Throws CorruptionError on bad magic, version, or size.
Matrix DecodeBlob(std::string_view bytes);

inline constexpr std::size_t BlobBytes(std::size_t rows, std::size_t cols) {
  return kBlobHeaderBytes + rows * cols * sizeof(float);
}

// A manifest line without the matrix payload.
struct ManifestEntry {
  std::string id;
  std::string blob;  // relative to the store directory
  std::uint64_t offset = 0;
  std::uint32_t rows = 0;
  std::uint32_t cols = 0;
  std::string question;
  std::string answer;
  std::optional<std::string> reference_answer;
  int context_doc_count = 0;
  int layer = 1;
  int prefix_len = 0;
  int answer_len = 1;
  int label = 0;
  std::optional<std::vector<double>> token_logprobs;
};

// A directory holding `manifest.jsonl` and `activations.bin`.
//
// The manifest has one JSON object per record. An optional first line of the
// form {"header": {...}} carries free-form metadata (e.g. a generator config)
// and is not a record.
//
// Reads are const and open their own file handles, so one store may be read
// from several threads. Writes are single-writer.
class ActivationStore {
 public:
  static constexpr std::string_view kManifestName = "manifest.jsonl";
  static constexpr std::string_view kBlobName = "activations.bin";

  // Creates the directory if needed and starts an empty store. Fails if a
  // manifest already exists there.
  static ActivationStore Create(const std::filesystem::path& dir);
  // Opens an existing store. Throws StorageError if the manifest is missing.
  static ActivationStore Open(const std::filesystem::path& dir);
  static ActivationStore OpenOrCreate(const std::filesystem::path& dir);

  // Writes the header line. Only allowed on an empty store; `json_object`
  // must be a serialized JSON object.
  void WriteHeader(std::string_view json_object);
  const std::optional<std::string>& header() const { return header_; }

  // Validates, appends the blob, then appends the manifest line. Returns the
  // record id. A failed write leaves the manifest untouched.
  std::string Write(const ActivationRecord& record);

  ActivationRecord Read(std::string_view id) const;
  bool Contains(std::string_view id) const;

  // Manifest entries in write order.
  const std::vector<ManifestEntry>& entries() const { return entries_; }
  // Ids sorted lexicographically.
  std::vector<std::string> SortedIds() const;
  std::size_t size() const { return entries_.size(); }

  const std::filesystem::path& dir() const { return dir_; }

 private:
  explicit ActivationStore(std::filesystem::path dir) : dir_(std::move(dir)) {}
  void LoadManifest();
  void AppendManifestLine(const std::string& line);

  std::filesystem::path dir_;
  std::optional<std::string> header_;
  std::vector<ManifestEntry> entries_;
  std::unordered_map<std::string, std::size_t> index_;
};

// Convenience wrappers that open (or create) the store for a single call.
std::string WriteRecord(const ActivationRecord& record,
                        const std::filesystem::path& store);
ActivationRecord ReadRecord(const std::filesystem::path& store,
                            std::string_view id);

// Reads every record in write order.
std::vector<ActivationRecord> ReadAll(const ActivationStore& store);

}  // namespace actigate

#endif  // ACTIGATE_ACTIVATION_STORE_H_
