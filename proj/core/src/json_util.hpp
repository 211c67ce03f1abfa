// Copyright 2026 The HandForge Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <string>

#include <json.hpp>

#include "handforge/depth.hpp"
#include "handforge/handsynth.hpp"

namespace handforge::detail {

using Json = nlohmann::json;

Json to_json(const HandParams& p);
HandParams params_from_json(const Json& j);

Json to_json(const Vec3& v);
Vec3 vec3_from_json(const Json& j);

Json to_json(const CameraIntrinsics& k);
CameraIntrinsics intrinsics_from_json(const Json& j);

// Fetches a required key, naming it in the ConfigError on failure.
const Json& at(const Json& j, const std::string& key);

}  // namespace handforge::detail
