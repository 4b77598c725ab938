#include "lidar_aug/aug_sample.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "lidar_aug/errors.hpp"

namespace lidar_aug {

namespace {

constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ull;
constexpr std::uint64_t kFnvPrime = 0x100000001b3ull;

void hash_bytes(std::uint64_t& h, const void* data, std::size_t n) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= kFnvPrime;
  }
}

void hash_double(std::uint64_t& h, double v) {
  const std::uint64_t bits = std::bit_cast<std::uint64_t>(v);
  hash_bytes(h, &bits, sizeof(bits));
}

std::array<float, 4> to_f32(const Point& p) {
  return {static_cast<float>(p.x), static_cast<float>(p.y), static_cast<float>(p.z),
          p.intensity};
}

}  // namespace

DatabaseBuilder::DatabaseBuilder(int min_points) : hash_(kFnvOffset) {
  if (min_points < 0) throw ConfigError("database min_points must be >= 0");
  db_.min_points = min_points;
  hash_bytes(hash_, &min_points, sizeof(min_points));
}

void DatabaseBuilder::add_scene(const Scene& scene) {
  hash_bytes(hash_, scene.id.data(), scene.id.size());
  const std::uint64_t cloud_size = scene.cloud.size();
  hash_bytes(hash_, &cloud_size, sizeof(cloud_size));

  for (const Annotation& a : scene.annotations) {
    const auto indices = points_in_box_indices(scene.cloud, a, 0.0);
    if (indices.size() < static_cast<std::size_t>(db_.min_points)) continue;

    SampleEntry entry;
    entry.annotation = a;
    entry.source_scene = scene.id;
    entry.local_points.reserve(indices.size());
    const BoxLocalFrame frame(a);
    for (std::uint32_t i : indices) {
      const Point& p = scene.cloud.points[i];
      const Vec3 local = frame.to_local(p.x, p.y, p.z);
      entry.local_points.push_back({local.x, local.y, local.z, p.intensity});
    }

    hash_bytes(hash_, a.class_name.data(), a.class_name.size());
    for (double v : {a.center.x, a.center.y, a.center.z, a.width, a.length, a.height, a.yaw})
      hash_double(hash_, v);
    for (const Point& p : entry.local_points) {
      const auto f = to_f32(p);
      hash_bytes(hash_, f.data(), sizeof(f));
    }

    db_.class_index[a.class_name].push_back(db_.entries.size());
    db_.entries.push_back(std::move(entry));
  }
}

SampleDatabase DatabaseBuilder::finish() {
  db_.provenance = hash_;
  return std::move(db_);
}

SampleDatabase build_database(std::span<const Scene> scenes, int min_points) {
  DatabaseBuilder builder(min_points);
  for (const Scene& scene : scenes) builder.add_scene(scene);
  return builder.finish();
}

void OversampleParams::validate() const {
  if (target_count < 1) throw ConfigError("oversample: target_count must be >= 1");
  if (max_attempts < 0) throw ConfigError("oversample: max_attempts must be >= 0");
  if (iou_tolerance < 0.0) throw ConfigError("oversample: iou_tolerance must be >= 0");
  if (class_name.empty()) throw ConfigError("oversample: class name must be non-empty");
}

int OversampleParams::attempt_budget() const {
  return max_attempts > 0 ? max_attempts : 5 * target_count;
}

void oversample(Scene& scene, const SampleDatabase& db, const OversampleParams& params,
                Rng& rng) {
  params.validate();
  int current = 0;
  for (const Annotation& a : scene.annotations)
    if (a.class_name == params.class_name) ++current;
  const int wanted = params.target_count - current;
  if (wanted <= 0) return;

  const auto it = db.class_index.find(params.class_name);
  if (it == db.class_index.end()) return;
  std::vector<std::size_t> pool = it->second;

  const int budget = params.redraw ? params.attempt_budget() : wanted;
  int accepted = 0;
  int attempts = 0;
  while (accepted < wanted && attempts < budget && !pool.empty()) {
    const std::size_t j = rng.index(pool.size());
    const std::size_t entry_idx = pool[j];
    pool[j] = pool.back();
    pool.pop_back();
    ++attempts;

    const SampleEntry& entry = db.entries[entry_idx];
    bool collides = false;
    for (const Annotation& existing : scene.annotations) {
      if (bev_iou(entry.annotation, existing) > params.iou_tolerance) {
        collides = true;
        break;
      }
    }
    if (collides) continue;

    if (params.remove_inside_background) {
      const BoxLocalFrame frame(entry.annotation);
      std::erase_if(scene.cloud.points,
                    [&](const Point& p) { return frame.contains(p.x, p.y, p.z, 0.0); });
    }

    const BoxLocalFrame frame(entry.annotation);
    for (const Point& local : entry.local_points) {
      const Vec3 g = frame.to_global({local.x, local.y, local.z});
      scene.cloud.points.push_back({g.x, g.y, g.z, local.intensity});
    }
    scene.annotations.push_back(entry.annotation);
    ++accepted;
  }
}

void save_database(const SampleDatabase& db, const std::filesystem::path& stem) {
  const auto idx_path = stem.string() + ".idx";
  const auto bin_path = stem.string() + ".bin";

  std::ofstream bin(bin_path, std::ios::binary | std::ios::trunc);
  if (!bin) throw IoError("cannot open " + bin_path + " for writing");
  std::ostringstream idx;
  idx << "lidar-aug-sampledb 1\n";
  char hexbuf[32];
  std::snprintf(hexbuf, sizeof(hexbuf), "%016llx",
                static_cast<unsigned long long>(db.provenance));
  idx << "provenance " << hexbuf << "\n";
  idx << "min_points " << db.min_points << "\n";
  idx << "entries " << db.entries.size() << "\n";

  std::uint64_t offset = 0;
  char num[40];
  for (const SampleEntry& entry : db.entries) {
    const Annotation& a = entry.annotation;
    if (entry.source_scene.find_first_of(" \t") != std::string::npos ||
        a.class_name.find_first_of(" \t") != std::string::npos)
      throw DataError("database ids and class names must not contain whitespace");
    idx << entry.source_scene << ' ' << a.class_name;
    for (double v :
         {a.center.x, a.center.y, a.center.z, a.width, a.length, a.height, a.yaw}) {
      std::snprintf(num, sizeof(num), " %.17g", v);
      idx << num;
    }
    idx << ' ' << entry.local_points.size() << ' ' << offset << "\n";
    for (const Point& p : entry.local_points) {
      const auto f = to_f32(p);
      std::uint8_t rec[16];
      for (int k = 0; k < 4; ++k) {
        const std::uint32_t u = std::bit_cast<std::uint32_t>(f[k]);
        rec[k * 4 + 0] = static_cast<std::uint8_t>(u & 0xff);
        rec[k * 4 + 1] = static_cast<std::uint8_t>((u >> 8) & 0xff);
        rec[k * 4 + 2] = static_cast<std::uint8_t>((u >> 16) & 0xff);
        rec[k * 4 + 3] = static_cast<std::uint8_t>((u >> 24) & 0xff);
      }
      bin.write(reinterpret_cast<const char*>(rec), sizeof(rec));
      offset += sizeof(rec);
    }
  }
  if (!bin) throw IoError("cannot write " + bin_path);
  bin.close();

  std::ofstream out(idx_path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + idx_path + " for writing");
  out << idx.str();
  if (!out) throw IoError("cannot write " + idx_path);
}

namespace {

double parse_token_double(const std::string& tok, std::size_t line_no) {
  double v = 0.0;
  const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (res.ec != std::errc{} || res.ptr != tok.data() + tok.size())
    throw ParseError("sample database index line " + std::to_string(line_no) +
                     ": bad number '" + tok + "'");
  return v;
}

}  // namespace

SampleDatabase load_database(const std::filesystem::path& stem) {
  const auto idx_path = stem.string() + ".idx";
  const auto bin_path = stem.string() + ".bin";

  std::ifstream idx(idx_path);
  if (!idx) throw IoError("cannot open " + idx_path);
  std::ifstream bin(bin_path, std::ios::binary);
  if (!bin) throw IoError("cannot open " + bin_path);

  SampleDatabase db;
  std::string magic;
  int version = 0;
  if (!(idx >> magic >> version) || magic != "lidar-aug-sampledb" || version != 1)
    throw DataError("unrecognized sample database header in " + idx_path);
  std::string key, hex;
  if (!(idx >> key >> hex) || key != "provenance")
    throw DataError("sample database missing provenance");
  try {
    db.provenance = std::stoull(hex, nullptr, 16);
  } catch (const std::exception&) {
    throw DataError("sample database has a malformed provenance hash");
  }
  std::size_t entry_count = 0;
  if (!(idx >> key >> db.min_points) || key != "min_points")
    throw DataError("sample database missing min_points");
  if (!(idx >> key >> entry_count) || key != "entries")
    throw DataError("sample database missing entry count");

  db.entries.reserve(entry_count);
  for (std::size_t e = 0; e < entry_count; ++e) {
    SampleEntry entry;
    std::string nums[7];
    std::size_t count = 0;
    std::uint64_t offset = 0;
    if (!(idx >> entry.source_scene >> entry.annotation.class_name >> nums[0] >>
          nums[1] >> nums[2] >> nums[3] >> nums[4] >> nums[5] >> nums[6] >> count >>
          offset))
      throw DataError("sample database index is truncated at entry " + std::to_string(e));
    Annotation& a = entry.annotation;
    a.center.x = parse_token_double(nums[0], e);
    a.center.y = parse_token_double(nums[1], e);
    a.center.z = parse_token_double(nums[2], e);
    a.width = parse_token_double(nums[3], e);
    a.length = parse_token_double(nums[4], e);
    a.height = parse_token_double(nums[5], e);
    a.yaw = parse_token_double(nums[6], e);

    bin.seekg(static_cast<std::streamoff>(offset));
    entry.local_points.resize(count);
    std::vector<std::uint8_t> buf(count * 16);
    if (count > 0 && !bin.read(reinterpret_cast<char*>(buf.data()),
                               static_cast<std::streamsize>(buf.size())))
      throw DataError("sample database blob is truncated at entry " + std::to_string(e));
    for (std::size_t i = 0; i < count; ++i) {
      float f[4];
      for (int k = 0; k < 4; ++k) {
        const std::uint8_t* r = buf.data() + i * 16 + k * 4;
        const std::uint32_t u = static_cast<std::uint32_t>(r[0]) |
                                static_cast<std::uint32_t>(r[1]) << 8 |
                                static_cast<std::uint32_t>(r[2]) << 16 |
                                static_cast<std::uint32_t>(r[3]) << 24;
        f[k] = std::bit_cast<float>(u);
      }
      entry.local_points[i] = {f[0], f[1], f[2], f[3]};
    }
    db.class_index[a.class_name].push_back(db.entries.size());
    db.entries.push_back(std::move(entry));
  }
  return db;
}

}  // namespace lidar_aug
