// Copyright 2026 The dpate Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "dpate/status.h"

#include <string>

#include "fmt/format.h"

namespace dpate {

absl::Status DataError(std::string_view kind, std::string_view detail) {
  return absl::InvalidArgumentError(fmt::format("{}: {}", kind, detail));
}

absl::Status InternalError(std::string_view kind, std::string_view detail) {
  return absl::InternalError(fmt::format("{}: {}", kind, detail));
}

bool HasErrorKind(const absl::Status& status, std::string_view kind) {
  if (status.ok()) return false;
  const std::string_view message(status.message().data(),
                                 status.message().size());
  return message.starts_with(kind) && message.size() > kind.size() &&
         message[kind.size()] == ':';
}

}  // namespace dpate
