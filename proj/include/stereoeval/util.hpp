// Copyright 2026 The stereoeval Authors
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

// Small text, file and hashing helpers shared by the library modules.

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace stereoeval {

// Decodes UTF-8 into Unicode scalar values. Invalid sequences decode to
// U+FFFD one byte at a time, so every input has a well-defined result.
std::u32string DecodeUtf8(std::string_view text);

// Splits on runs of ASCII whitespace; empty tokens are never produced.
std::vector<std::string> SplitWhitespace(std::string_view text);

std::string_view Trim(std::string_view text);

std::string Sha256Hex(std::string_view data);

// 64-bit FNV-1a. Used where a stable, cheap, non-cryptographic hash is enough.
std::uint64_t Fnv1a64(std::string_view data);

std::string ReadFile(const std::filesystem::path& path);

// Writes through a temporary file and renames it into place.
void WriteFileAtomic(const std::filesystem::path& path, std::string_view data);

// Shortest round-trip decimal representation, locale independent.
std::string FormatDouble(double value);

// Makes an identifier safe for use as a single path component.
std::string SanitizeFileComponent(std::string_view name);

}  // namespace stereoeval
