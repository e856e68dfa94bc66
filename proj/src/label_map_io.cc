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

#include "safeseg/label_map_io.h"

#include <png.h>

#include <csetjmp>
#include <cstdio>
#include <filesystem>
#include <memory>
#include <vector>

#include "absl/strings/ascii.h"
#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_split.h"
#include "absl/strings/strip.h"
#include "json.hpp"
#include "safeseg/file_util.h"

namespace safeseg {
namespace {

struct FileCloser {
  void operator()(FILE* f) const { std::fclose(f); }
};
using FilePtr = std::unique_ptr<FILE, FileCloser>;

struct PngErrorState {
  char message[256] = "unknown libpng error";
};

void PngError(png_structp png, png_const_charp msg) {
  auto* state = static_cast<PngErrorState*>(png_get_error_ptr(png));
  std::snprintf(state->message, sizeof(state->message), "%s", msg);
  png_longjmp(png, 1);
}

void PngWarning(png_structp, png_const_charp) {}

class PngReader {
 public:
  PngReader() {
    png_ = png_create_read_struct(PNG_LIBPNG_VER_STRING, &errors_, PngError,
                                  PngWarning);
    if (png_ != nullptr) info_ = png_create_info_struct(png_);
  }
  ~PngReader() { png_destroy_read_struct(&png_, &info_, nullptr); }
  PngReader(const PngReader&) = delete;
  PngReader& operator=(const PngReader&) = delete;

  bool ok() const { return png_ != nullptr && info_ != nullptr; }
  const char* error() const { return errors_.message; }

  // Reads the header (the signature is already consumed) and configures
  // transforms so each row holds one byte per sample, or two big-endian
  // bytes for 16-bit data.
  bool ReadInfo(FILE* file) {
    if (setjmp(png_jmpbuf(png_))) return false;
    png_init_io(png_, file);
    png_set_sig_bytes(png_, 8);
    png_read_info(png_, info_);
    width = png_get_image_width(png_, info_);
    height = png_get_image_height(png_, info_);
    bit_depth = png_get_bit_depth(png_, info_);
    color_type = png_get_color_type(png_, info_);
    if (bit_depth < 8) png_set_packing(png_);
    png_set_interlace_handling(png_);
    png_read_update_info(png_, info_);
    channels = png_get_channels(png_, info_);
    rowbytes = png_get_rowbytes(png_, info_);
    return true;
  }

  bool ReadRows(std::vector<png_bytep>& rows) {
    if (setjmp(png_jmpbuf(png_))) return false;
    png_read_image(png_, rows.data());
    png_read_end(png_, nullptr);
    return true;
  }

  png_uint_32 width = 0;
  png_uint_32 height = 0;
  int bit_depth = 0;
  int color_type = 0;
  int channels = 0;
  size_t rowbytes = 0;

 private:
  PngErrorState errors_;
  png_structp png_ = nullptr;
  png_infop info_ = nullptr;
};

absl::Status Invalid(const std::string& path, absl::string_view what) {
  return absl::InvalidArgumentError(absl::StrCat(path, ": ", what));
}

absl::StatusOr<LabelMap> DecodePng(const std::string& path,
                                   const LabelFormatDescriptor& format) {
  FilePtr file(std::fopen(path.c_str(), "rb"));
  if (!file) return absl::NotFoundError(absl::StrCat("cannot open '", path, "'"));
  unsigned char sig[8];
  if (std::fread(sig, 1, 8, file.get()) != 8 || png_sig_cmp(sig, 0, 8) != 0) {
    return Invalid(path, "not a PNG file");
  }
  PngReader reader;
  if (!reader.ok()) return absl::InternalError("libpng initialisation failed");
  if (!reader.ReadInfo(file.get())) return Invalid(path, reader.error());

  const bool rgb = reader.color_type == PNG_COLOR_TYPE_RGB ||
                   reader.color_type == PNG_COLOR_TYPE_RGB_ALPHA;
  if (reader.color_type == PNG_COLOR_TYPE_GRAY_ALPHA) {
    return Invalid(path, "gray+alpha PNGs are not label maps");
  }
  if (rgb && format.color_table.empty()) {
    return Invalid(path,
                   "RGB-encoded label map needs a declared color table");
  }
  if (rgb && reader.bit_depth != 8) {
    return Invalid(path, "only 8-bit RGB label maps are supported");
  }
  if (reader.width == 0 || reader.height == 0 ||
      reader.width > (1u << 16) || reader.height > (1u << 16)) {
    return Invalid(path, "unsupported image dimensions");
  }

  std::vector<png_byte> pixels(reader.rowbytes * reader.height);
  std::vector<png_bytep> rows(reader.height);
  for (png_uint_32 y = 0; y < reader.height; ++y) {
    rows[y] = pixels.data() + y * reader.rowbytes;
  }
  if (!reader.ReadRows(rows)) return Invalid(path, reader.error());

  const int w = static_cast<int>(reader.width);
  const int h = static_cast<int>(reader.height);
  std::vector<uint16_t> values(static_cast<size_t>(w) * h);
  for (int y = 0; y < h; ++y) {
    const png_byte* row = rows[y];
    uint16_t* out = values.data() + static_cast<size_t>(y) * w;
    if (rgb) {
      for (int x = 0; x < w; ++x) {
        const png_byte* px = row + x * reader.channels;
        const uint32_t key = (uint32_t{px[0]} << 16) | (uint32_t{px[1]} << 8) |
                             uint32_t{px[2]};
        auto it = format.color_table.find(key);
        if (it == format.color_table.end()) {
          return Invalid(path, absl::StrCat("color (", px[0], ",", px[1], ",",
                                            px[2], ") at (", x, ",", y,
                                            ") is not in the color table"));
        }
        out[x] = it->second;
      }
    } else if (reader.bit_depth == 16) {
      for (int x = 0; x < w; ++x) {
        out[x] = static_cast<uint16_t>((row[2 * x] << 8) | row[2 * x + 1]);
      }
    } else {
      for (int x = 0; x < w; ++x) out[x] = row[x];
    }
  }
  return LabelMap::Create(w, h, std::move(values));
}

absl::StatusOr<RawLayout> ReadSidecar(const std::string& path) {
  const std::string sidecar = path + ".json";
  absl::StatusOr<std::string> text = ReadFileToString(sidecar);
  if (!text.ok()) {
    return absl::NotFoundError(
        absl::StrCat(path, ": raw label map needs dimensions (sidecar '",
                     sidecar, "' not readable)"));
  }
  nlohmann::json j = nlohmann::json::parse(*text, nullptr, false);
  if (j.is_discarded() || !j.is_object() || !j.contains("width") ||
      !j.contains("height") || !j["width"].is_number_integer() ||
      !j["height"].is_number_integer()) {
    return Invalid(sidecar, "expected {\"width\": W, \"height\": H}");
  }
  RawLayout layout;
  layout.width = j["width"].get<int>();
  layout.height = j["height"].get<int>();
  if (j.contains("bits")) {
    if (!j["bits"].is_number_integer()) return Invalid(sidecar, "bad bits");
    layout.bits = j["bits"].get<int>();
  }
  return layout;
}

absl::StatusOr<LabelMap> DecodeRaw(const std::string& path,
                                   const LabelFormatDescriptor& format) {
  RawLayout layout;
  if (format.raw) {
    layout = *format.raw;
  } else {
    absl::StatusOr<RawLayout> sidecar = ReadSidecar(path);
    if (!sidecar.ok()) return sidecar.status();
    layout = *sidecar;
  }
  if (layout.bits != 8 && layout.bits != 16) {
    return Invalid(path, absl::StrCat("raw bits must be 8 or 16, got ",
                                      layout.bits));
  }
  if (layout.width <= 0 || layout.height <= 0) {
    return Invalid(path, "raw dimensions must be positive");
  }
  absl::StatusOr<std::string> data = ReadFileToString(path);
  if (!data.ok()) return data.status();
  const size_t count = static_cast<size_t>(layout.width) * layout.height;
  const size_t bytes = count * (layout.bits / 8);
  if (data->size() != bytes) {
    return Invalid(path, absl::StrCat("expected ", bytes, " bytes for ",
                                      layout.width, "x", layout.height, "x",
                                      layout.bits, "-bit, found ",
                                      data->size()));
  }
  std::vector<uint16_t> values(count);
  const auto* raw = reinterpret_cast<const unsigned char*>(data->data());
  if (layout.bits == 8) {
    for (size_t i = 0; i < count; ++i) values[i] = raw[i];
  } else {
    for (size_t i = 0; i < count; ++i) {
      values[i] = static_cast<uint16_t>(raw[2 * i] | (raw[2 * i + 1] << 8));
    }
  }
  return LabelMap::Create(layout.width, layout.height, std::move(values));
}

LabelFormat Resolve(const std::string& path, LabelFormat format) {
  if (format != LabelFormat::kAuto) return format;
  std::string ext =
      absl::AsciiStrToLower(std::filesystem::path(path).extension().string());
  if (ext == ".png") return LabelFormat::kPng;
  if (ext == ".raw" || ext == ".bin") return LabelFormat::kRaw;
  return LabelFormat::kAuto;
}

struct PngWriteState {
  png_structp png = nullptr;
  png_infop info = nullptr;
  PngErrorState errors;
  ~PngWriteState() { png_destroy_write_struct(&png, &info); }
};

bool WritePngRows(PngWriteState& s, FILE* file, int w, int h, int bit_depth,
                  std::vector<png_bytep>& rows) {
  if (setjmp(png_jmpbuf(s.png))) return false;
  png_init_io(s.png, file);
  png_set_IHDR(s.png, s.info, w, h, bit_depth, PNG_COLOR_TYPE_GRAY,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_set_compression_level(s.png, 1);
  png_write_info(s.png, s.info);
  png_write_image(s.png, rows.data());
  png_write_end(s.png, nullptr);
  return true;
}

}  // namespace

absl::StatusOr<LabelMap> DecodeLabelMap(const std::string& path,
                                        const LabelFormatDescriptor& format) {
  absl::StatusOr<LabelMap> map;
  switch (Resolve(path, format.format)) {
    case LabelFormat::kPng:
      map = DecodePng(path, format);
      break;
    case LabelFormat::kRaw:
      map = DecodeRaw(path, format);
      break;
    case LabelFormat::kAuto:
      return Invalid(path, "cannot infer label map format from extension");
  }
  if (!map.ok() || !format.num_classes) return map;
  const int k = *format.num_classes;
  std::span<const uint16_t> v = map->values();
  for (size_t i = 0; i < v.size(); ++i) {
    if (v[i] >= k && v[i] != format.ignore) {
      return Invalid(path, absl::StrCat("value ", v[i], " at (",
                                        i % map->width(), ",",
                                        i / map->width(),
                                        ") outside declared range 0..", k - 1,
                                        " and not the ignore label ",
                                        format.ignore));
    }
  }
  return map;
}

absl::Status WritePngLabelMap(const std::string& path, const LabelMap& map,
                              int bit_depth) {
  if (bit_depth != 8 && bit_depth != 16) {
    return absl::InvalidArgumentError("PNG bit depth must be 8 or 16");
  }
  const int w = map.width();
  const int h = map.height();
  const int bpp = bit_depth / 8;
  std::vector<png_byte> pixels(static_cast<size_t>(w) * h * bpp);
  std::span<const uint16_t> v = map.values();
  for (size_t i = 0; i < v.size(); ++i) {
    if (bit_depth == 8) {
      if (v[i] > 255) {
        return absl::InvalidArgumentError(
            absl::StrCat("value ", v[i], " does not fit an 8-bit PNG"));
      }
      pixels[i] = static_cast<png_byte>(v[i]);
    } else {
      pixels[2 * i] = static_cast<png_byte>(v[i] >> 8);
      pixels[2 * i + 1] = static_cast<png_byte>(v[i] & 0xff);
    }
  }
  std::vector<png_bytep> rows(h);
  for (int y = 0; y < h; ++y) {
    rows[y] = pixels.data() + static_cast<size_t>(y) * w * bpp;
  }

  FilePtr file(std::fopen(path.c_str(), "wb"));
  if (!file) {
    return absl::PermissionDeniedError(absl::StrCat("cannot write '", path, "'"));
  }
  PngWriteState s;
  s.png = png_create_write_struct(PNG_LIBPNG_VER_STRING, &s.errors, PngError,
                                  PngWarning);
  if (s.png == nullptr) return absl::InternalError("libpng write init failed");
  s.info = png_create_info_struct(s.png);
  if (s.info == nullptr) return absl::InternalError("libpng write init failed");
  if (!WritePngRows(s, file.get(), w, h, bit_depth, rows)) {
    return absl::InternalError(absl::StrCat(path, ": ", s.errors.message));
  }
  return absl::OkStatus();
}

absl::Status WriteRawLabelMap(const std::string& path, const LabelMap& map,
                              int bits) {
  if (bits != 8 && bits != 16) {
    return absl::InvalidArgumentError("raw bits must be 8 or 16");
  }
  std::string data;
  data.reserve(map.size() * (bits / 8));
  for (uint16_t v : map.values()) {
    if (bits == 8) {
      if (v > 255) {
        return absl::InvalidArgumentError(
            absl::StrCat("value ", v, " does not fit 8 bits"));
      }
      data.push_back(static_cast<char>(v));
    } else {
      data.push_back(static_cast<char>(v & 0xff));
      data.push_back(static_cast<char>(v >> 8));
    }
  }
  absl::Status st = WriteFileAtomically(path, data);
  if (!st.ok()) return st;
  nlohmann::ordered_json sidecar = {
      {"width", map.width()}, {"height", map.height()}, {"bits", bits}};
  return WriteFileAtomically(path + ".json", sidecar.dump() + "\n");
}

absl::StatusOr<std::map<uint32_t, uint16_t>> ParseColorTable(
    absl::string_view text) {
  std::map<uint32_t, uint16_t> table;
  int line_no = 0;
  for (absl::string_view line : absl::StrSplit(text, '\n')) {
    ++line_no;
    line = absl::StripAsciiWhitespace(line);
    if (line.empty() || line.front() == '#') continue;
    std::vector<absl::string_view> f = absl::StrSplit(line, ',');
    int r, g, b, c;
    if (f.size() != 4 ||
        !absl::SimpleAtoi(absl::StripAsciiWhitespace(f[0]), &r) ||
        !absl::SimpleAtoi(absl::StripAsciiWhitespace(f[1]), &g) ||
        !absl::SimpleAtoi(absl::StripAsciiWhitespace(f[2]), &b) ||
        !absl::SimpleAtoi(absl::StripAsciiWhitespace(f[3]), &c) || r < 0 ||
        r > 255 || g < 0 || g > 255 || b < 0 || b > 255 || c < 0 ||
        c > 65535) {
      return absl::InvalidArgumentError(
          absl::StrCat("color table line ", line_no,
                       ": expected 'r,g,b,class_index'"));
    }
    const uint32_t key = (uint32_t(r) << 16) | (uint32_t(g) << 8) | uint32_t(b);
    if (!table.emplace(key, static_cast<uint16_t>(c)).second) {
      return absl::InvalidArgumentError(
          absl::StrCat("color table line ", line_no, ": duplicate color"));
    }
  }
  return table;
}

}  // namespace safeseg
