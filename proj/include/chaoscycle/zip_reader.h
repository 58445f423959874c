// Copyright 2026 The Chaoscycle Authors
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

#include <filesystem>
#include <map>
#include <string>

namespace chaoscycle {

// Reads every regular file of a zip archive into memory (stored and
// deflate entries). Keys are archive paths with '/' separators.
// Throws ProjectError on a malformed or unsupported archive.
std::map<std::string, std::string> ReadZipArchive(const std::filesystem::path& path);

}  // namespace chaoscycle
