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

#include "actigate/activation_store.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <string>

#include "actigate/error.h"
#include "actigate/file_io.h"
#include "byte_io.h"
#include "json.hpp"

namespace actigate {
namespace {

using nlohmann::json;

void Require(bool condition, const std::string& what) {
  if (!condition) throw ValidationError(what);
}

json EntryToJson(const ManifestEntry& e) {
  json j;
  j["id"] = e.id;
  j["blob"] = e.blob;
  j["offset"] = e.offset;
  j["rows"] = e.rows;
  j["cols"] = e.cols;
  j["question"] = e.question;
  j["answer"] = e.answer;
  if (e.reference_answer) j["reference_answer"] = *e.reference_answer;
  j["context_doc_count"] = e.context_doc_count;
  j["layer"] = e.layer;
  j["prefix_len"] = e.prefix_len;
  j["answer_len"] = e.answer_len;
  j["label"] = e.label;
  if (e.token_logprobs) j["token_logprobs"] = *e.token_logprobs;
  return j;
}

template <typename T>
T GetField(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) {
    throw CorruptionError(std::string("manifest line missing field '") + key + "'");
  }
  try {
    return it->get<T>();
  } catch (const json::exception&) {
    throw CorruptionError(std::string("manifest field '") + key + "' has wrong type");
  }
}

int GetInt(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || !it->is_number_integer()) {
    throw CorruptionError(std::string("manifest field '") + key +
                          "' missing or not an integer");
  }
  return it->get<int>();
}

ManifestEntry EntryFromJson(const json& j) {
  ManifestEntry e;
  e.id = GetField<std::string>(j, "id");
  e.blob = GetField<std::string>(j, "blob");
  e.offset = GetField<std::uint64_t>(j, "offset");
  e.rows = GetField<std::uint32_t>(j, "rows");
  e.cols = GetField<std::uint32_t>(j, "cols");
  e.question = GetField<std::string>(j, "question");
  e.answer = GetField<std::string>(j, "answer");
  if (auto it = j.find("reference_answer"); it != j.end() && !it->is_null()) {
    e.reference_answer = GetField<std::string>(j, "reference_answer");
  }
  e.context_doc_count = GetInt(j, "context_doc_count");
  e.layer = GetInt(j, "layer");
  e.prefix_len = GetInt(j, "prefix_len");
  e.answer_len = GetInt(j, "answer_len");
  auto label = j.find("label");
  if (label == j.end()) throw CorruptionError("manifest line missing field 'label'");
  if (!label->is_number_integer()) {
    throw ValidationError("record " + e.id + ": label must be 0 or 1");
  }
  e.label = label->get<int>();
  if (auto it = j.find("token_logprobs"); it != j.end() && !it->is_null()) {
    e.token_logprobs = GetField<std::vector<double>>(j, "token_logprobs");
  }
  return e;
}

}  // namespace

void ValidateRecord(const ActivationRecord& r) {
  Require(!r.id.empty(), "record id must be nonempty");
  const std::string who = "record " + r.id + ": ";
  Require(r.answer_len >= 1, who + "answer_len must be >= 1");
  Require(r.prefix_len >= 0, who + "prefix_len must be >= 0");
  Require(r.layer >= 1, who + "layer must be >= 1");
  Require(r.context_doc_count >= 0, who + "context_doc_count must be >= 0");
  Require(r.label == 0 || r.label == 1, who + "label must be 0 or 1");
  if (r.activations.rows() != static_cast<std::size_t>(r.answer_len) + 1) {
    throw DimensionError(who + "activations have " +
                         std::to_string(r.activations.rows()) +
                         " rows, expected answer_len + 1 = " +
                         std::to_string(r.answer_len + 1));
  }
  if (r.activations.cols() < 1) throw DimensionError(who + "activation width must be >= 1");
  Require(r.activations.AllFinite(), who + "activations contain non-finite values");
  if (r.token_logprobs) {
    Require(r.token_logprobs->size() == static_cast<std::size_t>(r.answer_len),
            who + "token_logprobs length must equal answer_len");
    for (double lp : *r.token_logprobs) {
      Require(std::isfinite(lp) && lp <= 0.0,
              who + "token_logprobs entries must be finite and <= 0");
    }
  }
}

Matrix ExtractAnswerSpan(const Matrix& full, int prefix_len, int answer_len) {
  if (answer_len < 1) throw ValidationError("empty answer: answer_len must be >= 1");
  if (prefix_len < 0) throw ValidationError("prefix_len must be >= 0");
  const std::size_t expected =
      static_cast<std::size_t>(prefix_len) + static_cast<std::size_t>(answer_len) + 1;
  if (full.rows() != expected) {
    throw DimensionError("full activations have " + std::to_string(full.rows()) +
                         " rows, expected T + L + 1 = " + std::to_string(expected));
  }
  return full.Slice(static_cast<std::size_t>(prefix_len),
                    static_cast<std::size_t>(answer_len) + 1);
}

std::string EncodeBlob(const Matrix& m) {
  std::string out;
  out.reserve(BlobBytes(m.rows(), m.cols()));
  out.append(kBlobMagic, sizeof(kBlobMagic));
  out.push_back(static_cast<char>(kBlobVersion));
  internal::AppendU32(out, static_cast<std::uint32_t>(m.rows()));
  internal::AppendU32(out, static_cast<std::uint32_t>(m.cols()));
  for (float v : m.values()) internal::AppendF32(out, v);
  return out;
}

Matrix DecodeBlob(std::string_view bytes) {
  if (bytes.size() < kBlobHeaderBytes) throw CorruptionError("blob truncated in header");
  if (bytes.substr(0, 4) != std::string_view(kBlobMagic, 4)) {
    throw CorruptionError("blob magic mismatch");
  }
  if (static_cast<std::uint8_t>(bytes[4]) != kBlobVersion) {
    throw CorruptionError("unsupported blob version " +
                          std::to_string(static_cast<unsigned char>(bytes[4])));
  }
  const std::uint32_t rows = internal::ReadU32(bytes, 5);
  const std::uint32_t cols = internal::ReadU32(bytes, 9);
  const std::size_t want = BlobBytes(rows, cols);
  if (bytes.size() < want) throw CorruptionError("blob payload truncated");
  if (bytes.size() > want) throw CorruptionError("blob has trailing bytes");
  std::vector<float> values(static_cast<std::size_t>(rows) * cols);
  for (std::size_t i = 0; i < values.size(); ++i) {
    values[i] = internal::ReadF32(bytes, kBlobHeaderBytes + 4 * i);
  }
  return Matrix(rows, cols, std::move(values));
}

ActivationStore ActivationStore::Create(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw StorageError("cannot create store directory " + dir.string());
  if (std::filesystem::exists(dir / kManifestName)) {
    throw StorageError("store already exists at " + dir.string());
  }
  std::ofstream touch(dir / kManifestName, std::ios::binary);
  if (!touch) throw StorageError("cannot create manifest in " + dir.string());
  return ActivationStore(dir);
}

ActivationStore ActivationStore::Open(const std::filesystem::path& dir) {
  if (!std::filesystem::exists(dir / kManifestName)) {
    throw StorageError("no manifest at " + (dir / kManifestName).string());
  }
  ActivationStore store(dir);
  store.LoadManifest();
  return store;
}

ActivationStore ActivationStore::OpenOrCreate(const std::filesystem::path& dir) {
  if (std::filesystem::exists(dir / kManifestName)) return Open(dir);
  return Create(dir);
}

void ActivationStore::LoadManifest() {
  const std::string text = ReadFile(dir_ / kManifestName);
  std::size_t pos = 0;
  std::size_t line_no = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string::npos) end = text.size();
    const std::string_view line(text.data() + pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception&) {
      throw CorruptionError("manifest line " + std::to_string(line_no) +
                            " is not valid JSON");
    }
    if (!j.is_object()) {
      throw CorruptionError("manifest line " + std::to_string(line_no) +
                            " is not an object");
    }
    if (j.contains("header")) {
      if (!entries_.empty() || header_) {
        throw CorruptionError("manifest header must be the first line");
      }
      header_ = j["header"].dump();
      continue;
    }
    ManifestEntry entry = EntryFromJson(j);
    if (index_.contains(entry.id)) {
      throw CorruptionError("duplicate id in manifest: " + entry.id);
    }
    index_.emplace(entry.id, entries_.size());
    entries_.push_back(std::move(entry));
  }
}

void ActivationStore::AppendManifestLine(const std::string& line) {
  std::ofstream out(dir_ / kManifestName, std::ios::binary | std::ios::app);
  if (!out) throw StorageError("cannot open manifest for append in " + dir_.string());
  out << line << '\n';
  out.flush();
  if (!out) throw StorageError("manifest append failed in " + dir_.string());
}

void ActivationStore::WriteHeader(std::string_view json_object) {
  if (!entries_.empty() || header_) {
    throw ValidationError("header can only be written to an empty store");
  }
  json j;
  try {
    j = json::parse(json_object);
  } catch (const json::exception&) {
    throw ValidationError("store header is not valid JSON");
  }
  if (!j.is_object()) throw ValidationError("store header must be a JSON object");
  AppendManifestLine(json{{"header", j}}.dump());
  header_ = j.dump();
}

std::string ActivationStore::Write(const ActivationRecord& record) {
  ValidateRecord(record);
  if (index_.contains(record.id)) {
    throw ValidationError("duplicate record id: " + record.id);
  }

  ManifestEntry entry;
  entry.id = record.id;
  entry.blob = std::string(kBlobName);
  entry.rows = static_cast<std::uint32_t>(record.activations.rows());
  entry.cols = static_cast<std::uint32_t>(record.activations.cols());
  entry.question = record.question;
  entry.answer = record.answer;
  entry.reference_answer = record.reference_answer;
  entry.context_doc_count = record.context_doc_count;
  entry.layer = record.layer;
  entry.prefix_len = record.prefix_len;
  entry.answer_len = record.answer_len;
  entry.label = record.label;
  entry.token_logprobs = record.token_logprobs;

  std::string line;
  const auto blob_path = dir_ / kBlobName;
  std::error_code ec;
  entry.offset = std::filesystem::exists(blob_path)
                     ? std::filesystem::file_size(blob_path, ec)
                     : 0;
  if (ec) throw StorageError("cannot stat " + blob_path.string());
  try {
    line = EntryToJson(entry).dump();
  } catch (const json::exception& e) {
    throw ValidationError("record " + record.id + ": " + e.what());
  }

  const std::string blob = EncodeBlob(record.activations);
  {
    std::ofstream out(blob_path, std::ios::binary | std::ios::app);
    if (!out) throw StorageError("cannot open " + blob_path.string());
    out.write(blob.data(), static_cast<std::streamsize>(blob.size()));
    out.flush();
    if (!out) {
      out.close();
      std::filesystem::resize_file(blob_path, entry.offset, ec);
      throw StorageError("blob append failed: " + blob_path.string());
    }
  }
  try {
    AppendManifestLine(line);
  } catch (const StorageError&) {
    std::filesystem::resize_file(blob_path, entry.offset, ec);
    throw;
  }
  index_.emplace(entry.id, entries_.size());
  entries_.push_back(std::move(entry));
  return record.id;
}

bool ActivationStore::Contains(std::string_view id) const {
  return index_.contains(std::string(id));
}

ActivationRecord ActivationStore::Read(std::string_view id) const {
  auto it = index_.find(std::string(id));
  if (it == index_.end()) {
    throw NotFoundError("unknown record id: " + std::string(id));
  }
  const ManifestEntry& e = entries_[it->second];
  const auto blob_path = dir_ / e.blob;
  std::ifstream in(blob_path, std::ios::binary);
  if (!in) throw CorruptionError("record " + e.id + ": blob file missing: " + blob_path.string());
  std::string bytes(BlobBytes(e.rows, e.cols), '\0');
  in.seekg(static_cast<std::streamoff>(e.offset));
  in.read(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  const auto got = static_cast<std::size_t>(std::max<std::streamsize>(in.gcount(), 0));
  if (!in || got != bytes.size()) {
    throw CorruptionError("record " + e.id + ": blob truncated (" +
                          std::to_string(got) + " of " +
                          std::to_string(bytes.size()) + " bytes)");
  }
  Matrix m;
  try {
    m = DecodeBlob(bytes);
  } catch (const CorruptionError& err) {
    throw CorruptionError("record " + e.id + ": " + err.what());
  }
  if (m.rows() != e.rows || m.cols() != e.cols) {
    throw CorruptionError("record " + e.id + ": blob dims do not match manifest");
  }

  ActivationRecord r;
  r.id = e.id;
  r.question = e.question;
  r.answer = e.answer;
  r.reference_answer = e.reference_answer;
  r.context_doc_count = e.context_doc_count;
  r.layer = e.layer;
  r.prefix_len = e.prefix_len;
  r.answer_len = e.answer_len;
  r.activations = std::move(m);
  r.token_logprobs = e.token_logprobs;
  r.label = e.label;
  try {
    ValidateRecord(r);
  } catch (const ValidationError& err) {
    throw CorruptionError(std::string("stored record fails validation: ") + err.what());
  }
  return r;
}

std::vector<std::string> ActivationStore::SortedIds() const {
  std::vector<std::string> ids;
  ids.reserve(entries_.size());
  for (const auto& e : entries_) ids.push_back(e.id);
  std::sort(ids.begin(), ids.end());
  return ids;
}

std::string WriteRecord(const ActivationRecord& record,
                        const std::filesystem::path& store) {
  return ActivationStore::OpenOrCreate(store).Write(record);
}

ActivationRecord ReadRecord(const std::filesystem::path& store, std::string_view id) {
  return ActivationStore::Open(store).Read(id);
}

std::vector<ActivationRecord> ReadAll(const ActivationStore& store) {
  std::vector<ActivationRecord> out;
  out.reserve(store.size());
  for (const auto& e : store.entries()) out.push_back(store.Read(e.id));
  return out;
}

}  // namespace actigate
