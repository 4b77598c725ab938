#include "lidar_aug/kitti_io.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "lidar_aug/aug_filter.hpp"
#include "lidar_aug/errors.hpp"

namespace lidar_aug::kitti {

namespace {

std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < s.size() && s[j] != ' ' && s[j] != '\t' && s[j] != '\r') ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

double parse_double(std::string_view tok, std::string_view what, std::size_t line_no) {
  double v = 0.0;
  const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (res.ec != std::errc{} || res.ptr != tok.data() + tok.size()) {
    std::ostringstream msg;
    msg << "line " << line_no << ": cannot parse " << what << " from '" << tok << "'";
    throw ParseError(msg.str());
  }
  return v;
}

void append_fixed(std::string& out, double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  out += buf;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::byte> read_binary_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary | std::ios::ate);
  if (!in) throw IoError("cannot open " + path.string());
  const std::streamsize n = in.tellg();
  in.seekg(0);
  std::vector<std::byte> bytes(static_cast<std::size_t>(n));
  if (n > 0 && !in.read(reinterpret_cast<char*>(bytes.data()), n))
    throw IoError("cannot read " + path.string());
  return bytes;
}

void write_binary_file(std::span<const std::byte> bytes, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("cannot write " + path.string());
}

void write_text_file(std::string_view text, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw IoError("cannot write " + path.string());
}

float load_f32_le(const std::byte* p) {
  std::uint32_t u = static_cast<std::uint32_t>(std::to_integer<std::uint8_t>(p[0])) |
                    static_cast<std::uint32_t>(std::to_integer<std::uint8_t>(p[1])) << 8 |
                    static_cast<std::uint32_t>(std::to_integer<std::uint8_t>(p[2])) << 16 |
                    static_cast<std::uint32_t>(std::to_integer<std::uint8_t>(p[3])) << 24;
  return std::bit_cast<float>(u);
}

void store_f32_le(float v, std::byte* p) {
  const std::uint32_t u = std::bit_cast<std::uint32_t>(v);
  p[0] = static_cast<std::byte>(u & 0xff);
  p[1] = static_cast<std::byte>((u >> 8) & 0xff);
  p[2] = static_cast<std::byte>((u >> 16) & 0xff);
  p[3] = static_cast<std::byte>((u >> 24) & 0xff);
}

}  // namespace

Mat3 Mat3::inverse() const {
  const double a = m[0][0], b = m[0][1], c = m[0][2];
  const double d = m[1][0], e = m[1][1], f = m[1][2];
  const double g = m[2][0], h = m[2][1], i = m[2][2];
  const double det = a * (e * i - f * h) - b * (d * i - f * g) + c * (d * h - e * g);
  if (std::fabs(det) < 1e-12) throw DataError("singular calibration matrix");
  const double inv = 1.0 / det;
  Mat3 r;
  r.m[0][0] = (e * i - f * h) * inv;
  r.m[0][1] = (c * h - b * i) * inv;
  r.m[0][2] = (b * f - c * e) * inv;
  r.m[1][0] = (f * g - d * i) * inv;
  r.m[1][1] = (a * i - c * g) * inv;
  r.m[1][2] = (c * d - a * f) * inv;
  r.m[2][0] = (d * h - e * g) * inv;
  r.m[2][1] = (b * g - a * h) * inv;
  r.m[2][2] = (a * e - b * d) * inv;
  return r;
}

bool Calibration::project(const Vec3& velo, double& u, double& v, double& depth) const {
  const Vec3 rect = rect_from_velo(velo);
  depth = rect.z;
  if (depth <= 0.0) return false;
  const double pu = P2[0] * rect.x + P2[1] * rect.y + P2[2] * rect.z + P2[3];
  const double pv = P2[4] * rect.x + P2[5] * rect.y + P2[6] * rect.z + P2[7];
  const double pw = P2[8] * rect.x + P2[9] * rect.y + P2[10] * rect.z + P2[11];
  if (pw <= 0.0) return false;
  u = pu / pw;
  v = pv / pw;
  return true;
}

void Calibration::validate() const {
  for (double v : P2)
    if (!std::isfinite(v)) throw DataError("non-finite P2");
  // Tr rotation must be orthonormal to 1e-4.
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      double dot = 0.0;
      for (int k = 0; k < 3; ++k) dot += Tr_rot.m[k][i] * Tr_rot.m[k][j];
      const double expect = i == j ? 1.0 : 0.0;
      if (!std::isfinite(dot) || std::fabs(dot - expect) > 1e-4)
        throw DataError("Tr_velo_to_cam rotation is not orthonormal");
    }
  }
  if (image_width <= 0 || image_height <= 0) throw DataError("bad image size");
}

PointCloud read_velodyne(std::span<const std::byte> bytes) {
  if (bytes.size() % 16 != 0)
    throw DataError("truncated velodyne data: " + std::to_string(bytes.size()) +
                    " bytes is not a multiple of 16");
  PointCloud cloud;
  const std::size_t n = bytes.size() / 16;
  cloud.points.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::byte* rec = bytes.data() + i * 16;
    const float x = load_f32_le(rec);
    const float y = load_f32_le(rec + 4);
    const float z = load_f32_le(rec + 8);
    const float intensity = load_f32_le(rec + 12);
    if (!std::isfinite(x) || !std::isfinite(y) || !std::isfinite(z) ||
        !std::isfinite(intensity))
      throw DataError("corrupt velodyne data: non-finite value at point " +
                      std::to_string(i));
    cloud.points[i] = {x, y, z, intensity};
  }
  return cloud;
}

std::vector<std::byte> write_velodyne(const PointCloud& cloud) {
  std::vector<std::byte> bytes(cloud.size() * 16);
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const Point& p = cloud.points[i];
    std::byte* rec = bytes.data() + i * 16;
    store_f32_le(static_cast<float>(p.x), rec);
    store_f32_le(static_cast<float>(p.y), rec + 4);
    store_f32_le(static_cast<float>(p.z), rec + 8);
    store_f32_le(p.intensity, rec + 12);
  }
  return bytes;
}

PointCloud read_velodyne_file(const std::filesystem::path& path) {
  return read_velodyne(read_binary_file(path));
}

void write_velodyne_file(const PointCloud& cloud, const std::filesystem::path& path) {
  write_binary_file(write_velodyne(cloud), path);
}

RawLabel parse_label_line(std::string_view line, std::size_t line_no) {
  const auto tok = split_ws(line);
  if (tok.size() < 15 || tok.size() > 16) {
    std::ostringstream msg;
    msg << "line " << line_no << ": expected 15 or 16 label fields, got " << tok.size();
    throw ParseError(msg.str());
  }
  RawLabel raw;
  raw.type = std::string(tok[0]);
  raw.truncation = parse_double(tok[1], "truncation", line_no);
  raw.occlusion = static_cast<int>(parse_double(tok[2], "occlusion", line_no));
  raw.alpha = parse_double(tok[3], "alpha", line_no);
  for (int i = 0; i < 4; ++i) raw.bbox[i] = parse_double(tok[4 + i], "bbox", line_no);
  raw.h = parse_double(tok[8], "height", line_no);
  raw.w = parse_double(tok[9], "width", line_no);
  raw.l = parse_double(tok[10], "length", line_no);
  raw.x = parse_double(tok[11], "x", line_no);
  raw.y = parse_double(tok[12], "y", line_no);
  raw.z = parse_double(tok[13], "z", line_no);
  raw.rotation_y = parse_double(tok[14], "rotation_y", line_no);
  if (tok.size() == 16) raw.score = parse_double(tok[15], "score", line_no);
  return raw;
}

std::string format_label_line(const RawLabel& raw) {
  std::string out = raw.type;
  out += ' ';
  append_fixed(out, raw.truncation);
  out += ' ';
  out += std::to_string(raw.occlusion);
  out += ' ';
  append_fixed(out, raw.alpha);
  for (double v : raw.bbox) {
    out += ' ';
    append_fixed(out, v);
  }
  for (double v : {raw.h, raw.w, raw.l, raw.x, raw.y, raw.z, raw.rotation_y}) {
    out += ' ';
    append_fixed(out, v);
  }
  if (raw.score) {
    out += ' ';
    append_fixed(out, *raw.score);
  }
  return out;
}

Annotation to_annotation(const RawLabel& raw, const Calibration& calib) {
  Annotation a;
  const Vec3 bottom = calib.velo_from_rect({raw.x, raw.y, raw.z});
  a.center = {bottom.x, bottom.y, bottom.z + raw.h * 0.5};
  a.width = raw.w;
  a.length = raw.l;
  a.height = raw.h;
  a.yaw = wrap_angle(-raw.rotation_y - kPi / 2.0);
  a.class_name = raw.type;
  a.difficulty = assign_difficulty(raw);
  LabelMeta meta;
  meta.truncation = raw.truncation;
  meta.occlusion = raw.occlusion;
  meta.alpha = raw.alpha;
  meta.bbox = raw.bbox;
  meta.score = raw.score;
  a.meta = meta;
  return a;
}

namespace {

// Fallback 2D bbox for annotations without original label metadata: the
// projected hull of the 3D corners, clipped to the image.
std::array<double, 4> project_bbox(const Annotation& a, const Calibration& calib) {
  double min_u = 0.0, min_v = 0.0, max_u = 0.0, max_v = 0.0;
  bool any = false;
  for (const Vec3& corner : box_corners(a)) {
    double u, v, depth;
    if (!calib.project(corner, u, v, depth)) continue;
    if (!any) {
      min_u = max_u = u;
      min_v = max_v = v;
      any = true;
    } else {
      min_u = std::min(min_u, u);
      max_u = std::max(max_u, u);
      min_v = std::min(min_v, v);
      max_v = std::max(max_v, v);
    }
  }
  if (!any) return {0.0, 0.0, 0.0, 0.0};
  min_u = std::clamp(min_u, 0.0, static_cast<double>(calib.image_width));
  max_u = std::clamp(max_u, 0.0, static_cast<double>(calib.image_width));
  min_v = std::clamp(min_v, 0.0, static_cast<double>(calib.image_height));
  max_v = std::clamp(max_v, 0.0, static_cast<double>(calib.image_height));
  return {min_u, min_v, max_u, max_v};
}

}  // namespace

RawLabel to_raw_label(const Annotation& a, const Calibration& calib) {
  RawLabel raw;
  raw.type = a.class_name;
  raw.h = a.height;
  raw.w = a.width;
  raw.l = a.length;
  const Vec3 bottom = {a.center.x, a.center.y, a.center.z - a.height * 0.5};
  const Vec3 rect = calib.rect_from_velo(bottom);
  raw.x = rect.x;
  raw.y = rect.y;
  raw.z = rect.z;
  raw.rotation_y = wrap_angle_pi(-a.yaw - kPi / 2.0);
  if (a.meta) {
    raw.truncation = a.meta->truncation;
    raw.occlusion = a.meta->occlusion;
    raw.alpha = a.meta->alpha;
    raw.bbox = a.meta->bbox;
    raw.score = a.meta->score;
  } else {
    raw.bbox = project_bbox(a, calib);
    raw.alpha = wrap_angle_pi(raw.rotation_y - std::atan2(rect.x, rect.z));
  }
  return raw;
}

LabelReadResult read_labels(std::string_view text, const Calibration& calib) {
  LabelReadResult result;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t eol = text.find('\n', pos);
    const std::string_view line =
        text.substr(pos, eol == std::string_view::npos ? text.size() - pos : eol - pos);
    pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
    ++line_no;
    if (split_ws(line).empty()) continue;
    RawLabel raw = parse_label_line(line, line_no);
    if (raw.type == "DontCare") {
      result.dont_care.push_back(std::move(raw));
    } else {
      result.annotations.push_back(to_annotation(raw, calib));
    }
  }
  return result;
}

std::string write_labels(std::span<const Annotation> annotations,
                         std::span<const RawLabel> dont_care,
                         const Calibration& calib) {
  std::string out;
  for (const Annotation& a : annotations) {
    out += format_label_line(to_raw_label(a, calib));
    out += '\n';
  }
  for (const RawLabel& raw : dont_care) {
    out += format_label_line(raw);
    out += '\n';
  }
  return out;
}

Calibration read_calib(std::string_view text) {
  Calibration calib;
  bool have_p2 = false, have_r0 = false, have_tr = false;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t eol = text.find('\n', pos);
    const std::string_view line =
        text.substr(pos, eol == std::string_view::npos ? text.size() - pos : eol - pos);
    pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
    ++line_no;
    const std::size_t colon = line.find(':');
    if (colon == std::string_view::npos) continue;
    const std::string_view key = line.substr(0, colon);
    const auto values = split_ws(line.substr(colon + 1));
    auto need = [&](std::size_t n) {
      if (values.size() != n) {
        std::ostringstream msg;
        msg << "line " << line_no << ": key " << key << " expects " << n
            << " values, got " << values.size();
        throw ParseError(msg.str());
      }
    };
    if (key == "P2") {
      need(12);
      for (int i = 0; i < 12; ++i) calib.P2[i] = parse_double(values[i], "P2", line_no);
      have_p2 = true;
    } else if (key == "R0_rect" || key == "R_rect") {
      need(9);
      for (int i = 0; i < 9; ++i)
        calib.R0.m[i / 3][i % 3] = parse_double(values[i], "R0_rect", line_no);
      have_r0 = true;
    } else if (key == "Tr_velo_to_cam") {
      need(12);
      for (int i = 0; i < 12; ++i) {
        const double v = parse_double(values[i], "Tr_velo_to_cam", line_no);
        if (i % 4 == 3)
          (i / 4 == 0 ? calib.Tr_t.x : i / 4 == 1 ? calib.Tr_t.y : calib.Tr_t.z) = v;
        else
          calib.Tr_rot.m[i / 4][i % 4] = v;
      }
      have_tr = true;
    } else if (key == "image_size") {
      need(2);
      calib.image_width = static_cast<int>(parse_double(values[0], "image_size", line_no));
      calib.image_height = static_cast<int>(parse_double(values[1], "image_size", line_no));
    }
    // other keys (P0, P1, P3, Tr_imu_to_velo, ...) are ignored
  }
  if (!have_p2) throw DataError("calibration is missing key P2");
  if (!have_r0) throw DataError("calibration is missing key R0_rect");
  if (!have_tr) throw DataError("calibration is missing key Tr_velo_to_cam");
  calib.validate();
  return calib;
}

Calibration read_calib_file(const std::filesystem::path& path) {
  return read_calib(read_text_file(path));
}

std::string write_calib(const Calibration& calib) {
  auto row = [](std::string& out, const char* key, std::span<const double> values) {
    out += key;
    out += ':';
    char buf[40];
    for (double v : values) {
      std::snprintf(buf, sizeof(buf), " %.12e", v);
      out += buf;
    }
    out += '\n';
  };
  std::string out;
  row(out, "P2", calib.P2);
  std::array<double, 9> r0;
  for (int i = 0; i < 9; ++i) r0[i] = calib.R0.m[i / 3][i % 3];
  row(out, "R0_rect", r0);
  std::array<double, 12> tr;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) tr[i * 4 + j] = calib.Tr_rot.m[i][j];
    tr[i * 4 + 3] = i == 0 ? calib.Tr_t.x : i == 1 ? calib.Tr_t.y : calib.Tr_t.z;
  }
  row(out, "Tr_velo_to_cam", tr);
  std::array<double, 2> size{static_cast<double>(calib.image_width),
                             static_cast<double>(calib.image_height)};
  row(out, "image_size", size);
  return out;
}

PointCloud filter_fov(const PointCloud& cloud, const Calibration& calib) {
  PointCloud out;
  out.points.reserve(cloud.size());
  for (const Point& p : cloud.points) {
    double u, v, depth;
    if (!calib.project({p.x, p.y, p.z}, u, v, depth)) continue;
    if (u >= 0.0 && u < calib.image_width && v >= 0.0 && v < calib.image_height)
      out.points.push_back(p);
  }
  return out;
}

void write_scene(const Scene& scene, const std::filesystem::path& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir / "velodyne", ec);
  std::filesystem::create_directories(out_dir / "label_2", ec);
  if (scene.calib) std::filesystem::create_directories(out_dir / "calib", ec);
  if (ec) throw IoError("cannot create " + out_dir.string() + ": " + ec.message());

  write_velodyne_file(scene.cloud, out_dir / "velodyne" / (scene.id + ".bin"));
  if (scene.calib) {
    write_text_file(write_labels(scene.annotations, scene.dont_care, *scene.calib),
                    out_dir / "label_2" / (scene.id + ".txt"));
    write_text_file(write_calib(*scene.calib), out_dir / "calib" / (scene.id + ".txt"));
  } else {
    if (!scene.annotations.empty())
      throw DataError("scene " + scene.id + " has annotations but no calibration");
    write_text_file("", out_dir / "label_2" / (scene.id + ".txt"));
  }
}

std::filesystem::path resolve_dataset_root(const std::filesystem::path& root) {
  if (std::filesystem::is_directory(root / "velodyne")) return root;
  if (std::filesystem::is_directory(root / "training" / "velodyne"))
    return root / "training";
  throw IoError("no velodyne directory under " + root.string());
}

Scene read_scene(const std::filesystem::path& root, const std::string& id) {
  const auto base = resolve_dataset_root(root);
  Scene scene;
  scene.id = id;
  scene.cloud = read_velodyne_file(base / "velodyne" / (id + ".bin"));
  const auto calib_path = base / "calib" / (id + ".txt");
  if (std::filesystem::exists(calib_path))
    scene.calib = read_calib_file(calib_path);
  const auto label_path = base / "label_2" / (id + ".txt");
  if (std::filesystem::exists(label_path)) {
    const std::string text = read_text_file(label_path);
    if (!scene.calib) {
      if (!split_ws(text).empty())
        throw DataError("scene " + id + " has labels but no calibration file");
    } else {
      auto labels = read_labels(text, *scene.calib);
      scene.annotations = std::move(labels.annotations);
      scene.dont_care = std::move(labels.dont_care);
    }
  }
  return scene;
}

std::vector<std::string> read_split(const std::filesystem::path& path) {
  const std::string text = read_text_file(path);
  std::vector<std::string> ids;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t eol = text.find('\n', pos);
    std::string_view line =
        std::string_view(text).substr(pos, eol == std::string::npos ? text.size() - pos : eol - pos);
    pos = eol == std::string::npos ? text.size() + 1 : eol + 1;
    const auto tok = split_ws(line);
    if (tok.empty() || tok[0].front() == '#') continue;
    ids.emplace_back(tok[0]);
  }
  return ids;
}

}  // namespace lidar_aug::kitti
