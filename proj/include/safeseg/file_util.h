/* Copyright 2026 The safeseg Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#ifndef SAFESEG_FILE_UTIL_H_
#define SAFESEG_FILE_UTIL_H_

#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"

namespace safeseg {

absl::StatusOr<std::string> ReadFileToString(const std::string& path);

// Writes to a sibling temporary file and renames it over `path`, so readers
// never observe a partial report.
absl::Status WriteFileAtomically(const std::string& path,
                                 absl::string_view contents);

// Regular files below `root` (recursively), as sorted '/'-separated paths
// relative to `root`.
absl::StatusOr<std::vector<std::string>> ListFilesRecursive(
    const std::string& root);

}  // namespace safeseg

#endif  // SAFESEG_FILE_UTIL_H_
