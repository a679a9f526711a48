/**
 * Copyright 2026 The SACC Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef SACC_IMAGE_IO_HPP_
#define SACC_IMAGE_IO_HPP_

#include <filesystem>

#include "sacc/image.hpp"

namespace sacc {

/// Decodes PNG/JPEG/BMP into RGB in [0, 1]. Throws DataError when the file
/// is missing or cannot be decoded.
Image read_image(const std::filesystem::path& path);

/// Encodes as 8-bit RGB; the format follows the file extension.
void write_image(const std::filesystem::path& path, const Image& img);

}  // namespace sacc

#endif  // SACC_IMAGE_IO_HPP_
