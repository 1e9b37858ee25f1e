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

// Model registry: a JSON file listing reconstructors and distance assets.
//
//   {
//     "reconstructors": [
//       {"id": "classical-aa", "kind": "classical", "native_side": 64,
//        "factor": 8, "training_corpus": "synthetic",
//        "prefilter": "gaussian:k=3,sigma=0.8", "upsample": "bilinear"},
//       {"id": "sd14", "kind": "neural", "native_side": 512, "factor": 8,
//        "training_corpus": "laion-aesthetics",
//        "asset": "models/sd14-3f2a9c1e.onnx", "sha256": "3f2a9c1e..."}
//     ],
//     "distance_assets": [
//       {"id": "lpips-vgg", "kind": "lpips",
//        "asset": "models/lpips-vgg-5b1d0e77.onnx", "sha256": "5b1d0e77..."}
//     ]
//   }
//
// Asset paths are relative to the registry file. Neural reconstructors may
// give "decoder_asset"/"decoder_sha256" to split encoder and decoder, and
// "input_range": "[0,1]" when the graph does not expect [-1,1].

#ifndef HFI_REGISTRY_HPP_
#define HFI_REGISTRY_HPP_

#include <filesystem>
#include <string>
#include <vector>

#include "hfi/reconstruct.hpp"

namespace hfi {

struct DistanceAsset {
  std::string id;
  std::string kind = "lpips";
  std::filesystem::path asset;
  std::string sha256;
};

struct Registry {
  std::filesystem::path source;
  std::vector<ReconstructorHandle> reconstructors;
  std::vector<DistanceAsset> distance_assets;

  // nullptr when absent.
  const ReconstructorHandle* find(const std::string& id) const;
  // "all" selects every reconstructor; otherwise a comma-separated id list.
  // Throws ParameterError naming unknown ids.
  std::vector<ReconstructorHandle> select(const std::string& ids) const;
};

struct AssetIssue {
  std::string id;
  std::filesystem::path path;
  std::string problem;  // "missing", "checksum mismatch (expected .., got ..)"
};

// Parses the registry. Structural problems (bad JSON, unknown kind, duplicate
// id, missing field, invalid side/factor) raise RegistryError listing every
// offending entry. With verify_assets, missing or mismatching asset files
// raise AssetError listing every offending entry.
Registry load_registry(const std::filesystem::path& path, bool verify_assets = true);

// Checks every asset file against its recorded checksum.
std::vector<AssetIssue> verify_registry(const Registry& registry);

// Lowercase hex SHA-256 of a file. Throws AssetError if unreadable.
std::string sha256_file(const std::filesystem::path& path);

}  // namespace hfi

#endif  // HFI_REGISTRY_HPP_
