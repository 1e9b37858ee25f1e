// Copyright 2026 The HFI Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "hfi/registry.hpp"

#include <openssl/evp.h>

#include <array>
#include <fstream>
#include <memory>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "hfi/error.hpp"

namespace hfi {
namespace {

using nlohmann::json;

std::string join_lines(const std::vector<std::string>& items) {
  std::string out;
  for (const auto& s : items) out += "\n  " + s;
  return out;
}

std::string require_string(const json& j, const char* key, const std::string& where,
                           std::vector<std::string>& problems) {
  if (!j.contains(key) || !j[key].is_string()) {
    problems.push_back(where + ": missing string field '" + key + "'");
    return {};
  }
  return j[key].get<std::string>();
}

int require_int(const json& j, const char* key, const std::string& where,
                std::vector<std::string>& problems) {
  if (!j.contains(key) || !j[key].is_number_integer()) {
    problems.push_back(where + ": missing integer field '" + key + "'");
    return 0;
  }
  return j[key].get<int>();
}

std::string optional_string(const json& j, const char* key) {
  return j.contains(key) && j[key].is_string() ? j[key].get<std::string>() : std::string();
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& rel) {
  if (rel.empty()) return {};
  std::filesystem::path p(rel);
  return p.is_absolute() ? p : base / p;
}

void check_asset(const std::string& id, const std::filesystem::path& path,
                 const std::string& expected, std::vector<AssetIssue>& issues) {
  if (path.empty()) return;
  std::error_code ec;
  if (!std::filesystem::is_regular_file(path, ec)) {
    issues.push_back({id, path, "missing"});
    return;
  }
  const std::string got = sha256_file(path);
  if (got != expected) {
    issues.push_back({id, path, "checksum mismatch (expected " + expected + ", got " + got + ")"});
  }
}

}  // namespace

const ReconstructorHandle* Registry::find(const std::string& id) const {
  for (const auto& h : reconstructors) {
    if (h.id == id) return &h;
  }
  return nullptr;
}

std::vector<ReconstructorHandle> Registry::select(const std::string& ids) const {
  if (ids == "all") return reconstructors;
  std::vector<ReconstructorHandle> out;
  std::vector<std::string> unknown;
  std::stringstream ss(ids);
  std::string id;
  while (std::getline(ss, id, ',')) {
    if (id.empty()) continue;
    if (const auto* h = find(id)) {
      out.push_back(*h);
    } else {
      unknown.push_back(id);
    }
  }
  if (!unknown.empty()) {
    std::string list;
    for (const auto& u : unknown) list += (list.empty() ? "" : ", ") + u;
    throw ParameterError("unknown reconstructor id(s): " + list + " (registry " +
                         source.string() + ")");
  }
  if (out.empty()) throw ParameterError("no reconstructor selected");
  return out;
}

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw AssetError("cannot read " + path.string());
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) {
    throw AssetError("SHA-256 initialization failed");
  }
  std::array<char, 1 << 16> buf{};
  while (in) {
    in.read(buf.data(), buf.size());
    if (in.gcount() > 0) EVP_DigestUpdate(ctx.get(), buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx.get(), md.data(), &len);
  static constexpr char kHex[] = "0123456789abcdef";
  std::string hex;
  for (unsigned int k = 0; k < len; ++k) {
    hex += kHex[md[k] >> 4];
    hex += kHex[md[k] & 15];
  }
  return hex;
}

Registry load_registry(const std::filesystem::path& path, bool verify_assets) {
  std::ifstream in(path);
  if (!in) throw RegistryError("cannot open registry " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw RegistryError("registry " + path.string() + " is not valid JSON: " + e.what());
  }
  if (!doc.is_object()) throw RegistryError("registry " + path.string() + " must be a JSON object");

  Registry reg;
  reg.source = path;
  const auto base = path.parent_path();
  std::vector<std::string> problems;
  std::set<std::string> seen;

  const json recs = doc.value("reconstructors", json::array());
  if (!recs.is_array()) problems.push_back("'reconstructors' must be an array");
  for (std::size_t k = 0; recs.is_array() && k < recs.size(); ++k) {
    const json& e = recs[k];
    std::string where = "reconstructors[" + std::to_string(k) + "]";
    if (!e.is_object()) {
      problems.push_back(where + ": not an object");
      continue;
    }
    const std::size_t before = problems.size();
    ReconstructorHandle h;
    h.id = require_string(e, "id", where, problems);
    if (!h.id.empty()) where += " '" + h.id + "'";
    if (!h.id.empty() && !seen.insert(h.id).second) {
      problems.push_back(where + ": duplicate id '" + h.id + "'");
    }
    const std::string kind = require_string(e, "kind", where, problems);
    h.native_side = require_int(e, "native_side", where, problems);
    h.factor = require_int(e, "factor", where, problems);
    h.training_corpus = optional_string(e, "training_corpus");
    try {
      if (kind == "classical") {
        h.kind = ReconstructorKind::kClassical;
        const std::string pre = optional_string(e, "prefilter");
        if (!pre.empty() && pre != "none") h.prefilter = FilterSpec::parse(pre);
        h.upsample = parse_upsample(e.value("upsample", std::string("bilinear")));
      } else if (kind == "neural") {
        h.kind = ReconstructorKind::kNeural;
        h.asset = resolve(base, require_string(e, "asset", where, problems));
        h.sha256 = require_string(e, "sha256", where, problems);
        h.decoder_asset = resolve(base, optional_string(e, "decoder_asset"));
        h.decoder_sha256 = optional_string(e, "decoder_sha256");
        if (!h.decoder_asset.empty() && h.decoder_sha256.empty()) {
          problems.push_back(where + ": decoder_asset without decoder_sha256");
        }
        const std::string range = e.value("input_range", std::string("[-1,1]"));
        if (range != "[-1,1]" && range != "[0,1]") {
          problems.push_back(where + ": input_range must be \"[-1,1]\" or \"[0,1]\"");
        }
        h.signed_input = range == "[-1,1]";
      } else if (!kind.empty()) {
        problems.push_back(where + ": unknown kind '" + kind + "'");
      }
      if (problems.size() == before) h.validate();
    } catch (const ParameterError& err) {
      problems.push_back(where + ": " + err.what());
    }
    if (problems.size() == before) {
      bind_backend(h);
      reg.reconstructors.push_back(std::move(h));
    }
  }

  const json dists = doc.value("distance_assets", json::array());
  if (!dists.is_array()) problems.push_back("'distance_assets' must be an array");
  for (std::size_t k = 0; dists.is_array() && k < dists.size(); ++k) {
    const json& e = dists[k];
    std::string where = "distance_assets[" + std::to_string(k) + "]";
    if (!e.is_object()) {
      problems.push_back(where + ": not an object");
      continue;
    }
    DistanceAsset d;
    const std::size_t before = problems.size();
    d.id = require_string(e, "id", where, problems);
    if (!d.id.empty() && !seen.insert(d.id).second) {
      problems.push_back(where + ": duplicate id '" + d.id + "'");
    }
    d.kind = e.value("kind", std::string("lpips"));
    if (d.kind != "lpips") problems.push_back(where + ": unknown kind '" + d.kind + "'");
    d.asset = resolve(base, require_string(e, "asset", where, problems));
    d.sha256 = require_string(e, "sha256", where, problems);
    if (problems.size() == before) reg.distance_assets.push_back(std::move(d));
  }

  if (!problems.empty()) {
    throw RegistryError("registry " + path.string() + " has invalid entries:" +
                        join_lines(problems));
  }
  if (verify_assets) {
    const auto issues = verify_registry(reg);
    if (!issues.empty()) {
      std::vector<std::string> lines;
      for (const auto& i : issues) lines.push_back(i.id + ": " + i.path.string() + ": " + i.problem);
      throw AssetError("registry " + path.string() + " has unusable assets:" + join_lines(lines));
    }
  }
  return reg;
}

std::vector<AssetIssue> verify_registry(const Registry& registry) {
  std::vector<AssetIssue> issues;
  for (const auto& h : registry.reconstructors) {
    if (h.kind != ReconstructorKind::kNeural) continue;
    check_asset(h.id, h.asset, h.sha256, issues);
    check_asset(h.id, h.decoder_asset, h.decoder_sha256, issues);
  }
  for (const auto& d : registry.distance_assets) check_asset(d.id, d.asset, d.sha256, issues);
  return issues;
}

}  // namespace hfi
