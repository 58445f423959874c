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

#include "chaoscycle/zip_reader.h"

#include <zlib.h>

#include <cstdint>
#include <fstream>
#include <iterator>
#include <vector>

#include "chaoscycle/error.h"

namespace chaoscycle {

namespace {

constexpr std::uint32_t kEndOfCentralDir = 0x06054b50;
constexpr std::uint32_t kCentralFileHeader = 0x02014b50;
constexpr std::uint32_t kLocalFileHeader = 0x04034b50;

class ByteView {
 public:
  ByteView(const std::string& data, std::string name) : data_(data), name_(std::move(name)) {}

  std::uint16_t U16(std::size_t off) const {
    Need(off, 2);
    return static_cast<std::uint16_t>(Byte(off) | (Byte(off + 1) << 8));
  }
  std::uint32_t U32(std::size_t off) const {
    Need(off, 4);
    return static_cast<std::uint32_t>(Byte(off)) | (static_cast<std::uint32_t>(Byte(off + 1)) << 8) |
           (static_cast<std::uint32_t>(Byte(off + 2)) << 16) |
           (static_cast<std::uint32_t>(Byte(off + 3)) << 24);
  }
  std::string Slice(std::size_t off, std::size_t len) const {
    Need(off, len);
    return data_.substr(off, len);
  }
  std::size_t size() const { return data_.size(); }

 private:
  unsigned Byte(std::size_t off) const { return static_cast<unsigned char>(data_[off]); }
  void Need(std::size_t off, std::size_t len) const {
    if (off + len > data_.size() || off + len < off) {
      throw ProjectError("truncated zip archive " + name_);
    }
  }

  const std::string& data_;
  std::string name_;
};

std::string Inflate(const std::string& compressed, std::size_t expected, const std::string& entry) {
  std::string out(expected, '\0');
  z_stream zs{};
  if (inflateInit2(&zs, -MAX_WBITS) != Z_OK) throw ProjectError("zlib init failed for " + entry);
  zs.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(compressed.data()));
  zs.avail_in = static_cast<uInt>(compressed.size());
  zs.next_out = reinterpret_cast<Bytef*>(out.data());
  zs.avail_out = static_cast<uInt>(out.size());
  const int rc = inflate(&zs, Z_FINISH);
  const auto produced = zs.total_out;
  inflateEnd(&zs);
  if (rc != Z_STREAM_END || produced != expected) {
    throw ProjectError("corrupt deflate data in zip entry " + entry);
  }
  return out;
}

}  // namespace

std::map<std::string, std::string> ReadZipArchive(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ProjectError("cannot open archive " + path.string());
  const std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  const ByteView bytes(data, path.string());

  // The end-of-central-directory record sits within the last 64 KiB + 22 bytes.
  if (data.size() < 22) throw ProjectError("not a zip archive: " + path.string());
  std::size_t eocd = std::string::npos;
  const std::size_t floor = data.size() > 65557 ? data.size() - 65557 : 0;
  for (std::size_t off = data.size() - 22 + 1; off-- > floor;) {
    if (bytes.U32(off) == kEndOfCentralDir) {
      eocd = off;
      break;
    }
  }
  if (eocd == std::string::npos) throw ProjectError("not a zip archive: " + path.string());

  const std::uint16_t entries = bytes.U16(eocd + 10);
  std::size_t off = bytes.U32(eocd + 16);
  std::map<std::string, std::string> files;
  for (std::uint16_t i = 0; i < entries; ++i) {
    if (bytes.U32(off) != kCentralFileHeader) {
      throw ProjectError("bad central directory in " + path.string());
    }
    const std::uint16_t method = bytes.U16(off + 10);
    const std::uint32_t csize = bytes.U32(off + 20);
    const std::uint32_t usize = bytes.U32(off + 24);
    const std::uint16_t name_len = bytes.U16(off + 28);
    const std::uint16_t extra_len = bytes.U16(off + 30);
    const std::uint16_t comment_len = bytes.U16(off + 32);
    const std::uint32_t local = bytes.U32(off + 42);
    std::string name = bytes.Slice(off + 46, name_len);
    off += 46 + name_len + extra_len + comment_len;

    if (name.empty() || name.back() == '/') continue;
    if (bytes.U32(local) != kLocalFileHeader) {
      throw ProjectError("bad local header for " + name + " in " + path.string());
    }
    const std::size_t data_off = local + 30 + bytes.U16(local + 26) + bytes.U16(local + 28);
    const std::string raw = bytes.Slice(data_off, csize);
    if (method == 0) {
      files[name] = raw;
    } else if (method == 8) {
      files[name] = Inflate(raw, usize, name);
    } else {
      throw ProjectError("unsupported compression method " + std::to_string(method) +
                         " for " + name + " in " + path.string());
    }
  }
  return files;
}

}  // namespace chaoscycle
