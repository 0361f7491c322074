#include "chase/skel/io.hpp"

#include <filesystem>
#include <fstream>

#include "chase/core/bytes.hpp"

namespace chase::skel {

namespace {

constexpr char kMagic[4] = {'C', 'H', 'S', 'K'};
constexpr std::uint16_t kFlagValidFrames = 1;

std::uint32_t checked_u32(Index v, const char* what) {
  if (v < 0 || v > static_cast<Index>(UINT32_MAX)) throw DimensionError(std::string(what) + " does not fit u32");
  return static_cast<std::uint32_t>(v);
}

}  // namespace

std::string manifest_path(const std::string& dataset_path) { return dataset_path + ".json"; }

void save_dataset(const std::string& path, const Dataset& data) {
  const Shape shape = data.sample_shape();
  if (shape.size() != 4) throw DimensionError("save_dataset: samples must be (C, T, J, E)");
  bool full_length = true;
  for (const auto& s : data.samples) full_length = full_length && s.valid_frames == shape[1];

  bytes::Writer w;
  w.raw(std::string_view(kMagic, 4));
  w.u16(kDatasetVersion);
  w.u16(full_length ? 0 : kFlagValidFrames);
  for (Index d : shape) w.u32(checked_u32(d, "dimension"));
  w.u32(checked_u32(static_cast<Index>(data.size()), "sample count"));
  w.u32(0);
  for (const auto& s : data.samples) {
    for (Index i = 0; i < s.coords.size(); ++i) w.f32(static_cast<float>(s.coords[i]));
  }
  for (const auto& s : data.samples) w.u32(checked_u32(s.label, "label"));
  if (!full_length) {
    for (const auto& s : data.samples) w.u32(checked_u32(s.valid_frames, "valid_frames"));
  }
  bytes::write_file(path, w.buffer());

  nlohmann::json manifest{{"version", kDatasetVersion},
                          {"classes", data.class_names},
                          {"generator", data.generator},
                          {"seed", data.seed}};
  std::ofstream out(manifest_path(path), std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write manifest for '" + path + "'");
  out << manifest.dump(2) << '\n';
}

Dataset load_dataset(const std::string& path) {
  const std::vector<std::uint8_t> buf = bytes::read_file(path);
  bytes::Reader r(buf);
  r.require(4, "magic");
  if (r.raw(4) != std::string(kMagic, 4)) throw FormatError("bad magic, not a .chsk dataset", 0);
  const std::uint16_t version = r.u16();
  if (version != kDatasetVersion) {
    throw FormatError("unsupported dataset version " + std::to_string(version), 4);
  }
  const std::uint16_t flags = r.u16();
  if (flags & ~kFlagValidFrames) throw FormatError("unknown flag bits", 6);
  Shape shape(4);
  for (Index& d : shape) {
    const std::size_t at = r.offset();
    d = r.u32();
    if (d == 0) throw FormatError("zero dimension", at);
  }
  const std::uint32_t n = r.u32();
  r.u32();

  const Index per = numel(shape);
  Dataset data;
  r.require(static_cast<std::size_t>(per) * n * 4, "coordinates");
  data.samples.reserve(n);
  for (std::uint32_t s = 0; s < n; ++s) {
    TensorXd coords(shape);
    for (Index i = 0; i < per; ++i) coords[i] = r.f32();
    data.samples.push_back(make_sequence(std::move(coords), 0));
  }
  r.require(static_cast<std::size_t>(n) * 4, "labels");
  for (auto& s : data.samples) s.label = static_cast<int>(r.u32());
  if (flags & kFlagValidFrames) {
    r.require(static_cast<std::size_t>(n) * 4, "valid_frames");
    for (auto& s : data.samples) s.valid_frames = r.u32();
  }
  if (r.remaining() != 0) throw FormatError("trailing bytes after dataset payload", r.offset());

  const std::string mpath = manifest_path(path);
  if (std::filesystem::exists(mpath)) {
    std::ifstream in(mpath);
    nlohmann::json manifest;
    try {
      in >> manifest;
    } catch (const nlohmann::json::exception& e) {
      throw FormatError(std::string("malformed manifest: ") + e.what(), 0);
    }
    data.class_names = manifest.value("classes", std::vector<std::string>{});
    data.generator = manifest.value("generator", nlohmann::json::object());
    data.seed = manifest.value("seed", std::uint64_t{0});
  }
  return data;
}

}  // namespace chase::skel
