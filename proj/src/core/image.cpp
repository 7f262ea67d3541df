#include "core/image.hpp"

#include <jpeglib.h>
#include <png.h>

#include <algorithm>
#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <cstring>
#include <memory>

#include "core/error.hpp"

namespace penh {

namespace {

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

std::string lower_ext(const std::string& path) {
  auto dot = path.find_last_of('.');
  if (dot == std::string::npos) return "";
  std::string ext = path.substr(dot + 1);
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return ext;
}

// ---- PNG ----

ImageTensor load_png(std::FILE* file, const std::string& path) {
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    if (png) png_destroy_read_struct(&png, &info, nullptr);
    fail(ErrorCode::Internal, "libpng allocation failed");
  }

  std::vector<png_byte> raw;
  png_uint_32 width = 0, height = 0;
  int bit_depth = 0;

  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    fail(ErrorCode::FormatError, "failed to decode PNG: " + path);
  }

  png_init_io(png, file);
  png_read_info(png, info);
  width = png_get_image_width(png, info);
  height = png_get_image_height(png, info);
  bit_depth = png_get_bit_depth(png, info);
  int color_type = png_get_color_type(png, info);

  if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color_type == PNG_COLOR_TYPE_GRAY && bit_depth < 8) png_set_expand_gray_1_2_4_to_8(png);
  if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
  if (color_type == PNG_COLOR_TYPE_GRAY || color_type == PNG_COLOR_TYPE_GRAY_ALPHA)
    png_set_gray_to_rgb(png);
  png_set_strip_alpha(png);
  png_read_update_info(png, info);
  bit_depth = png_get_bit_depth(png, info);

  std::size_t row_bytes = png_get_rowbytes(png, info);
  raw.resize(row_bytes * height);
  std::vector<png_bytep> rows(height);
  for (png_uint_32 y = 0; y < height; ++y) rows[y] = raw.data() + y * row_bytes;
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);

  ImageTensor img;
  img.height = static_cast<int>(height);
  img.width = static_cast<int>(width);
  img.data.resize(img.pixel_count() * 3);
  if (bit_depth == 16) {
    // PNG 16-bit samples are big-endian.
    for (std::size_t i = 0; i < img.data.size(); ++i) {
      unsigned hi = raw[2 * i];
      unsigned lo = raw[2 * i + 1];
      img.data[i] = static_cast<float>((hi << 8 | lo) / 65535.0);
    }
  } else {
    for (std::size_t i = 0; i < img.data.size(); ++i)
      img.data[i] = static_cast<float>(raw[i] / 255.0);
  }
  return img;
}

void save_png(const ImageTensor& img, std::FILE* file, const std::string& path) {
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    if (png) png_destroy_write_struct(&png, &info);
    fail(ErrorCode::Internal, "libpng allocation failed");
  }

  std::vector<png_byte> raw(img.pixel_count() * 3);
  for (std::size_t i = 0; i < raw.size(); ++i) {
    float v = std::clamp(img.data[i], 0.0f, 1.0f);
    raw[i] = static_cast<png_byte>(std::lround(v * 255.0f));
  }

  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    fail(ErrorCode::IoError, "failed to write PNG: " + path);
  }

  png_init_io(png, file);
  png_set_IHDR(png, info, img.width, img.height, 8, PNG_COLOR_TYPE_RGB,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  // Fixed encoder settings keep output byte-stable across runs.
  png_set_compression_level(png, 6);
  png_write_info(png, info);
  std::vector<png_bytep> rows(img.height);
  for (int y = 0; y < img.height; ++y)
    rows[y] = raw.data() + static_cast<std::size_t>(y) * img.width * 3;
  png_write_image(png, rows.data());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

// ---- JPEG ----

struct JpegErrorMgr {
  jpeg_error_mgr pub;
  std::jmp_buf jump;
};

void jpeg_error_exit(j_common_ptr cinfo) {
  auto* mgr = reinterpret_cast<JpegErrorMgr*>(cinfo->err);
  std::longjmp(mgr->jump, 1);
}

ImageTensor load_jpeg(std::FILE* file, const std::string& path) {
  jpeg_decompress_struct cinfo;
  JpegErrorMgr err;
  cinfo.err = jpeg_std_error(&err.pub);
  err.pub.error_exit = jpeg_error_exit;
  if (setjmp(err.jump)) {
    jpeg_destroy_decompress(&cinfo);
    fail(ErrorCode::FormatError, "failed to decode JPEG: " + path);
  }
  jpeg_create_decompress(&cinfo);
  jpeg_stdio_src(&cinfo, file);
  jpeg_read_header(&cinfo, TRUE);
  cinfo.out_color_space = JCS_RGB;
  jpeg_start_decompress(&cinfo);

  ImageTensor img;
  img.height = static_cast<int>(cinfo.output_height);
  img.width = static_cast<int>(cinfo.output_width);
  img.data.resize(img.pixel_count() * 3);
  std::vector<JSAMPLE> row(static_cast<std::size_t>(img.width) * 3);
  JSAMPROW row_ptr = row.data();
  std::size_t offset = 0;
  while (cinfo.output_scanline < cinfo.output_height) {
    jpeg_read_scanlines(&cinfo, &row_ptr, 1);
    for (std::size_t i = 0; i < row.size(); ++i)
      img.data[offset + i] = static_cast<float>(row[i] / 255.0);
    offset += row.size();
  }
  jpeg_finish_decompress(&cinfo);
  jpeg_destroy_decompress(&cinfo);
  return img;
}

void save_jpeg(const ImageTensor& img, std::FILE* file, const std::string& path) {
  jpeg_compress_struct cinfo;
  JpegErrorMgr err;
  cinfo.err = jpeg_std_error(&err.pub);
  err.pub.error_exit = jpeg_error_exit;
  if (setjmp(err.jump)) {
    jpeg_destroy_compress(&cinfo);
    fail(ErrorCode::IoError, "failed to write JPEG: " + path);
  }
  jpeg_create_compress(&cinfo);
  jpeg_stdio_dest(&cinfo, file);
  cinfo.image_width = img.width;
  cinfo.image_height = img.height;
  cinfo.input_components = 3;
  cinfo.in_color_space = JCS_RGB;
  jpeg_set_defaults(&cinfo);
  jpeg_set_quality(&cinfo, 95, TRUE);
  jpeg_start_compress(&cinfo, TRUE);

  std::vector<JSAMPLE> row(static_cast<std::size_t>(img.width) * 3);
  while (cinfo.next_scanline < cinfo.image_height) {
    std::size_t offset = static_cast<std::size_t>(cinfo.next_scanline) * img.width * 3;
    for (std::size_t i = 0; i < row.size(); ++i) {
      float v = std::clamp(img.data[offset + i], 0.0f, 1.0f);
      row[i] = static_cast<JSAMPLE>(std::lround(v * 255.0f));
    }
    JSAMPROW row_ptr = row.data();
    jpeg_write_scanlines(&cinfo, &row_ptr, 1);
  }
  jpeg_finish_compress(&cinfo);
  jpeg_destroy_compress(&cinfo);
}

int mirror_index(int i, int n) {
  if (n == 1) return 0;
  int period = 2 * n - 2;
  i = ((i % period) + period) % period;
  return i < n ? i : period - i;
}

}  // namespace

ImageTensor ImageTensor::filled(int height, int width, float r, float g, float b) {
  ImageTensor img;
  img.height = height;
  img.width = width;
  img.data.resize(img.pixel_count() * 3);
  for (std::size_t p = 0; p < img.pixel_count(); ++p) {
    img.data[3 * p] = r;
    img.data[3 * p + 1] = g;
    img.data[3 * p + 2] = b;
  }
  return img;
}

void validate_image(const ImageTensor& img, const std::string& what) {
  if (img.height < 1 || img.width < 1)
    fail(ErrorCode::ShapeError, what + ": image dimensions must be at least 1x1");
  if (img.data.size() != img.pixel_count() * 3)
    fail(ErrorCode::ShapeError, what + ": buffer size does not match HxWx3");
  for (float v : img.data) {
    if (!std::isfinite(v) || v < 0.0f || v > 1.0f)
      fail(ErrorCode::FormatError, what + ": values must be finite and within [0,1]");
  }
}

ImageTensor load_image(const std::string& path) {
  FilePtr file(std::fopen(path.c_str(), "rb"));
  if (!file) fail(ErrorCode::NotFound, "no such image file: " + path);

  unsigned char magic[8] = {0};
  std::size_t got = std::fread(magic, 1, sizeof(magic), file.get());
  std::rewind(file.get());
  if (got >= 8 && png_sig_cmp(magic, 0, 8) == 0) return load_png(file.get(), path);
  if (got >= 2 && magic[0] == 0xFF && magic[1] == 0xD8) return load_jpeg(file.get(), path);
  fail(ErrorCode::FormatError, "not a PNG or JPEG file: " + path);
}

void save_image(const ImageTensor& img, const std::string& path) {
  validate_image(img, "save_image");
  std::string ext = lower_ext(path);
  if (ext != "png" && ext != "jpg" && ext != "jpeg")
    fail(ErrorCode::FormatError, "unsupported output extension (use .png/.jpg): " + path);
  FilePtr file(std::fopen(path.c_str(), "wb"));
  if (!file) fail(ErrorCode::IoError, "cannot open for writing: " + path);
  if (ext == "png")
    save_png(img, file.get(), path);
  else
    save_jpeg(img, file.get(), path);
  if (std::fflush(file.get()) != 0)
    fail(ErrorCode::IoError, "write failed: " + path);
}

ImageTensor resize_bilinear(const ImageTensor& img, int out_height, int out_width) {
  if (out_height < 1 || out_width < 1)
    fail(ErrorCode::ShapeError, "resize target must be at least 1x1");
  if (out_height == img.height && out_width == img.width) return img;

  ImageTensor out;
  out.height = out_height;
  out.width = out_width;
  out.data.resize(out.pixel_count() * 3);
  double scale_y = static_cast<double>(img.height) / out_height;
  double scale_x = static_cast<double>(img.width) / out_width;
  for (int y = 0; y < out_height; ++y) {
    double sy = (y + 0.5) * scale_y - 0.5;
    int y0 = static_cast<int>(std::floor(sy));
    double fy = sy - y0;
    int y1 = std::min(y0 + 1, img.height - 1);
    y0 = std::clamp(y0, 0, img.height - 1);
    for (int x = 0; x < out_width; ++x) {
      double sx = (x + 0.5) * scale_x - 0.5;
      int x0 = static_cast<int>(std::floor(sx));
      double fx = sx - x0;
      int x1 = std::min(x0 + 1, img.width - 1);
      x0 = std::clamp(x0, 0, img.width - 1);
      for (int c = 0; c < 3; ++c) {
        double top = img.at(y0, x0, c) * (1.0 - fx) + img.at(y0, x1, c) * fx;
        double bot = img.at(y1, x0, c) * (1.0 - fx) + img.at(y1, x1, c) * fx;
        out.at(y, x, c) = static_cast<float>(top * (1.0 - fy) + bot * fy);
      }
    }
  }
  return out;
}

ImageTensor pad_reflect(const ImageTensor& img, int out_height, int out_width) {
  if (out_height < img.height || out_width < img.width)
    fail(ErrorCode::ShapeError, "pad target smaller than image");
  if (out_height == img.height && out_width == img.width) return img;
  ImageTensor out;
  out.height = out_height;
  out.width = out_width;
  out.data.resize(out.pixel_count() * 3);
  for (int y = 0; y < out_height; ++y) {
    int sy = mirror_index(y, img.height);
    for (int x = 0; x < out_width; ++x) {
      int sx = mirror_index(x, img.width);
      for (int c = 0; c < 3; ++c) out.at(y, x, c) = img.at(sy, sx, c);
    }
  }
  return out;
}

ImageTensor crop(const ImageTensor& img, int out_height, int out_width) {
  if (out_height > img.height || out_width > img.width)
    fail(ErrorCode::ShapeError, "crop target larger than image");
  if (out_height == img.height && out_width == img.width) return img;
  ImageTensor out;
  out.height = out_height;
  out.width = out_width;
  out.data.resize(out.pixel_count() * 3);
  for (int y = 0; y < out_height; ++y)
    for (int x = 0; x < out_width; ++x)
      for (int c = 0; c < 3; ++c) out.at(y, x, c) = img.at(y, x, c);
  return out;
}

}  // namespace penh
