#include "agsynth/image_io.hpp"

#include <png.h>
#include <jpeglib.h>

#include <atomic>
#include <csetjmp>
#include <cstdio>
#include <cstring>
#include <algorithm>
#include <fstream>
#include <string>
#include <thread>

#include "agsynth/error.hpp"

namespace agsynth {
namespace {

bool is_png(std::span<const std::uint8_t> b) {
  return b.size() >= 8 && png_sig_cmp(b.data(), 0, 8) == 0;
}

bool is_jpeg(std::span<const std::uint8_t> b) {
  return b.size() >= 3 && b[0] == 0xFF && b[1] == 0xD8 && b[2] == 0xFF;
}

struct PngReadState {
  std::span<const std::uint8_t> bytes;
  std::size_t offset = 0;
};

void png_quiet_error(png_structp png, png_const_charp) { png_longjmp(png, 1); }
void png_quiet_warning(png_structp, png_const_charp) {}

void png_read_from_span(png_structp png, png_bytep out, png_size_t len) {
  auto* st = static_cast<PngReadState*>(png_get_io_ptr(png));
  if (st->offset + len > st->bytes.size()) png_error(png, "truncated PNG stream");
  std::memcpy(out, st->bytes.data() + st->offset, len);
  st->offset += len;
}

// Raw decode result kept outside the setjmp frame.
struct Decoded {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> rgb;
  std::string error;
};

void decode_png_raw(std::span<const std::uint8_t> bytes, Decoded& out) {
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, png_quiet_error,
                                           png_quiet_warning);
  if (!png) {
    out.error = "cannot allocate PNG reader";
    return;
  }
  png_infop info = png_create_info_struct(png);
  PngReadState state{bytes, 0};
  std::vector<png_bytep> rows;
  std::vector<std::uint8_t> raw;
  if (!info || setjmp(png_jmpbuf(png))) {
    out.error = "corrupt PNG payload";
    png_destroy_read_struct(&png, info ? &info : nullptr, nullptr);
    return;
  }
  png_set_read_fn(png, &state, png_read_from_span);
  png_read_info(png, info);

  const png_uint_32 w = png_get_image_width(png, info);
  const png_uint_32 h = png_get_image_height(png, info);
  const int color = png_get_color_type(png, info);
  const int depth = png_get_bit_depth(png, info);

  if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color == PNG_COLOR_TYPE_GRAY && depth < 8) png_set_expand_gray_1_2_4_to_8(png);
  if (color == PNG_COLOR_TYPE_GRAY || color == PNG_COLOR_TYPE_GRAY_ALPHA)
    png_set_gray_to_rgb(png);
  if (color & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(png);
  if (depth == 16) png_set_swap(png);  // little-endian uint16 in memory
  png_read_update_info(png, info);

  const std::size_t stride = png_get_rowbytes(png, info);
  const bool wide = depth == 16;
  raw.resize(stride * h);
  rows.resize(h);
  for (png_uint_32 y = 0; y < h; ++y) rows[y] = raw.data() + y * stride;
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);

  out.width = static_cast<int>(w);
  out.height = static_cast<int>(h);
  out.rgb.resize(static_cast<std::size_t>(w) * h * 3);
  if (wide) {
    for (std::size_t i = 0; i < out.rgb.size(); ++i) {
      std::uint16_t v;
      std::memcpy(&v, raw.data() + 2 * i, 2);
      out.rgb[i] = static_cast<std::uint8_t>(v / 257);
    }
  } else {
    for (png_uint_32 y = 0; y < h; ++y)
      std::memcpy(out.rgb.data() + static_cast<std::size_t>(y) * w * 3, rows[y],
                  static_cast<std::size_t>(w) * 3);
  }
}

struct JpegError {
  jpeg_error_mgr mgr;
  std::jmp_buf jump;
  char message[JMSG_LENGTH_MAX];
};

void jpeg_error_exit(j_common_ptr cinfo) {
  auto* err = reinterpret_cast<JpegError*>(cinfo->err);
  (*cinfo->err->format_message)(cinfo, err->message);
  std::longjmp(err->jump, 1);
}

void decode_jpeg_raw(std::span<const std::uint8_t> bytes, Decoded& out) {
  jpeg_decompress_struct cinfo;
  JpegError err;
  cinfo.err = jpeg_std_error(&err.mgr);
  err.mgr.error_exit = jpeg_error_exit;
  if (setjmp(err.jump)) {
    out.error = std::string("corrupt JPEG payload: ") + err.message;
    jpeg_destroy_decompress(&cinfo);
    return;
  }
  jpeg_create_decompress(&cinfo);
  jpeg_mem_src(&cinfo, bytes.data(), static_cast<unsigned long>(bytes.size()));
  jpeg_read_header(&cinfo, TRUE);
  cinfo.out_color_space = JCS_RGB;
  jpeg_start_decompress(&cinfo);
  out.width = static_cast<int>(cinfo.output_width);
  out.height = static_cast<int>(cinfo.output_height);
  out.rgb.resize(static_cast<std::size_t>(out.width) * out.height * 3);
  while (cinfo.output_scanline < cinfo.output_height) {
    JSAMPROW row = out.rgb.data() + static_cast<std::size_t>(cinfo.output_scanline) * out.width * 3;
    jpeg_read_scanlines(&cinfo, &row, 1);
  }
  jpeg_finish_decompress(&cinfo);
  jpeg_destroy_decompress(&cinfo);
}

void png_write_to_vector(png_structp png, png_bytep data, png_size_t len) {
  auto* out = static_cast<std::vector<std::uint8_t>*>(png_get_io_ptr(png));
  out->insert(out->end(), data, data + len);
}

void png_flush_noop(png_structp) {}

std::vector<std::uint8_t> encode_png_raw(int width, int height, int color_type, int channels,
                                         std::span<const std::uint8_t> data) {
  std::vector<std::uint8_t> out;
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw Error(ErrorCode::kIo, "cannot allocate PNG writer");
  png_infop info = png_create_info_struct(png);
  std::vector<png_bytep> rows(height);
  volatile bool failed = false;
  if (!info || setjmp(png_jmpbuf(png))) {
    failed = true;
  } else {
    png_set_write_fn(png, &out, png_write_to_vector, png_flush_noop);
    png_set_compression_level(png, 3);
    png_set_IHDR(png, info, width, height, 8, color_type, PNG_INTERLACE_NONE,
                 PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    for (int y = 0; y < height; ++y)
      rows[y] = const_cast<png_bytep>(data.data() +
                                      static_cast<std::size_t>(y) * width * channels);
    png_write_image(png, rows.data());
    png_write_end(png, nullptr);
  }
  png_destroy_write_struct(&png, info ? &info : nullptr);
  if (failed) throw Error(ErrorCode::kIo, "PNG encoding failed");
  return out;
}

}  // namespace

RgbImage decode_image(std::span<const std::uint8_t> bytes, std::string_view origin) {
  const std::string where(origin);
  if (bytes.empty()) throw Error(ErrorCode::kDecode, "empty image payload: " + where);
  Decoded d;
  if (is_png(bytes)) {
    decode_png_raw(bytes, d);
  } else if (is_jpeg(bytes)) {
    decode_jpeg_raw(bytes, d);
  } else {
    throw Error(ErrorCode::kDecode, "unsupported image format (expected PNG or JPEG): " + where);
  }
  if (!d.error.empty()) throw Error(ErrorCode::kDecode, d.error + ": " + where);
  if (d.width < 1 || d.height < 1) throw Error(ErrorCode::kDecode, "image has no pixels: " + where);
  return RgbImage(d.width, d.height, std::move(d.rgb));
}

RgbImage load_image(const std::filesystem::path& path) {
  auto bytes = read_file(path);
  return decode_image(bytes, path.string());
}

std::vector<std::uint8_t> encode_png(const RgbImage& img) {
  return encode_png_raw(img.width(), img.height(), PNG_COLOR_TYPE_RGB, 3, img.pixels());
}

std::vector<std::uint8_t> encode_png(const ImagePlane& plane) {
  std::vector<std::uint8_t> gray(plane.size());
  const double scale = 255.0 / plane.max_value();
  auto v = plane.values();
  for (std::size_t i = 0; i < gray.size(); ++i)
    gray[i] = static_cast<std::uint8_t>(std::min(255.0, v[i] * scale + 0.5));
  return encode_png_raw(plane.width(), plane.height(), PNG_COLOR_TYPE_GRAY, 1, gray);
}

void save_png(const RgbImage& img, const std::filesystem::path& path) {
  write_file_atomic(path, encode_png(img));
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::error_code ec;
  if (!std::filesystem::is_regular_file(path, ec))
    throw Error(ErrorCode::kIo, "no such file: " + path.string());
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open file: " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  if (in.bad()) throw Error(ErrorCode::kIo, "read failed: " + path.string());
  return bytes;
}

void write_file_atomic(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  static std::atomic<unsigned long> counter{0};
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  auto tmp = path;
  tmp += ".tmp" + std::to_string(std::hash<std::thread::id>{}(std::this_thread::get_id())) +
         "." + std::to_string(counter++);
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::kIo, "cannot write file: " + path.string());
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error(ErrorCode::kIo, "write failed: " + path.string());
  }
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw Error(ErrorCode::kIo, "cannot move file into place: " + path.string());
  }
}

void write_file_atomic(const std::filesystem::path& path, std::string_view text) {
  write_file_atomic(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()),
                                    text.size()));
}

}  // namespace agsynth
