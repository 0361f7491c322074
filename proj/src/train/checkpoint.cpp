#include "chase/train/checkpoint.hpp"

#include "chase/core/bytes.hpp"

namespace chase::train {

const TensorXd& Checkpoint::tensor(const std::string& name) const {
  for (const auto& [n, t] : tensors)
    if (n == name) return t;
  throw FormatError("checkpoint has no tensor named '" + name + "'", 0);
}

bool Checkpoint::has(const std::string& name) const {
  for (const auto& entry : tensors)
    if (entry.first == name) return true;
  return false;
}

std::vector<std::uint8_t> encode_checkpoint(const Checkpoint& ckpt) {
  bytes::Writer w;
  w.raw("CHCK");
  w.u16(kCheckpointVersion);
  w.u16(0);
  w.u64(ckpt.epoch);
  w.u64(ckpt.step);
  w.u64(ckpt.seed);
  w.u32(static_cast<std::uint32_t>(ckpt.tensors.size()));
  for (const auto& [name, t] : ckpt.tensors) {
    w.u16(static_cast<std::uint16_t>(name.size()));
    w.raw(name);
    w.u32(static_cast<std::uint32_t>(t.rank()));
    for (Index d : t.shape()) w.u64(static_cast<std::uint64_t>(d));
    for (Index i = 0; i < t.size(); ++i) w.f64(t[i]);
  }
  const std::string cfg = ckpt.config.dump();
  w.u32(static_cast<std::uint32_t>(cfg.size()));
  w.raw(cfg);
  return w.buffer();
}

Checkpoint decode_checkpoint(const std::vector<std::uint8_t>& buf) {
  bytes::Reader r(buf);
  if (r.raw(4) != "CHCK") throw FormatError("not a checkpoint (bad magic)", 0);
  const std::size_t at_version = r.offset();
  if (r.u16() != kCheckpointVersion) throw FormatError("unsupported checkpoint version", at_version);
  r.u16();
  Checkpoint c;
  c.epoch = r.u64();
  c.step = r.u64();
  c.seed = r.u64();
  const std::uint32_t count = r.u32();
  for (std::uint32_t k = 0; k < count; ++k) {
    const std::string name = r.raw(r.u16());
    const std::size_t at_rank = r.offset();
    const std::uint32_t rank = r.u32();
    if (rank > 8) throw FormatError("tensor '" + name + "': implausible rank", at_rank);
    Shape shape;
    Index n = 1;
    for (std::uint32_t a = 0; a < rank; ++a) {
      const std::size_t at = r.offset();
      const std::uint64_t d = r.u64();
      if (d == 0 || d > (1ull << 40)) throw FormatError("tensor '" + name + "': bad extent", at);
      shape.push_back(static_cast<Index>(d));
      n *= static_cast<Index>(d);
    }
    r.require(static_cast<std::size_t>(n) * 8, "tensor values");
    TensorXd t(shape);
    for (Index i = 0; i < n; ++i) t[i] = r.f64();
    c.tensors.emplace_back(name, std::move(t));
  }
  const std::uint32_t len = r.u32();
  const std::size_t at_config = r.offset();
  const std::string text = r.raw(len);
  try {
    c.config = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("checkpoint config is not valid JSON: ") + e.what(), at_config);
  }
  if (r.remaining() != 0) throw FormatError("trailing bytes after checkpoint", r.offset());
  return c;
}

void save_checkpoint(const std::string& path, const Checkpoint& ckpt) { bytes::write_file(path, encode_checkpoint(ckpt)); }

Checkpoint load_checkpoint(const std::string& path) { return decode_checkpoint(bytes::read_file(path)); }

}  // namespace chase::train
